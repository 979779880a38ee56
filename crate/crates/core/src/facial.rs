//! Two-way slices of a k-way model, their face certificates, and the
//! slice-wise necessary condition for ML-degree one.

use serde::Serialize;

use crate::chordal::{build_graph, is_doubly_chordal_bipartite, ChordalityWitness, Vertex};
use crate::error::{Error, Result};
use crate::model::{build_a_matrix, fmt_tuple, IndexSet};

/// The pairs `(s,t)` with `i + (s,t) ∈ S`, where `i` fixes every axis other
/// than `a` and `b`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Slice {
    pub a: usize,
    pub b: usize,
    /// States of the remaining axes, in increasing axis order.
    pub fixed: Vec<usize>,
    /// Raw pairs in the original state numbering.
    pub pairs: Vec<(usize, usize)>,
}

impl Slice {
    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// The full tuple `i + (s,t)`.
    pub fn lift(&self, k: usize, s: usize, t: usize) -> Vec<usize> {
        let mut rest = self.fixed.iter();
        (0..k)
            .map(|axis| {
                if axis == self.a {
                    s
                } else if axis == self.b {
                    t
                } else {
                    *rest.next().unwrap()
                }
            })
            .collect()
    }

    /// 1-based description such as `a=1, b=2, i=(axis 3=1)`.
    pub fn describe(&self) -> String {
        let k = self.fixed.len() + 2;
        let others: Vec<String> = (0..k)
            .filter(|&x| x != self.a && x != self.b)
            .zip(&self.fixed)
            .map(|(axis, s)| format!("axis {}={}", axis + 1, s + 1))
            .collect();
        format!("a={}, b={}, i=({})", self.a + 1, self.b + 1, others.join(", "))
    }
}

fn check_slice_args(s: &IndexSet, a: usize, b: usize, fixed: &[usize]) -> Result<()> {
    let k = s.k();
    if k < 3 {
        return Err(Error::TooFewAxes { min: 3, actual: k });
    }
    if a >= k || b >= k || a == b {
        return Err(Error::InvalidArgument(format!(
            "slice axes must be two distinct axes in 1..={k}"
        )));
    }
    if fixed.len() != k - 2 {
        return Err(Error::InvalidArgument(format!(
            "expected {} fixed states, got {}",
            k - 2,
            fixed.len()
        )));
    }
    let others = (0..k).filter(|&x| x != a && x != b);
    for (axis, &state) in others.zip(fixed) {
        if state >= s.dims()[axis] {
            return Err(Error::InvalidArgument(format!(
                "state {} out of range on axis {}",
                state + 1,
                axis + 1
            )));
        }
    }
    Ok(())
}

pub fn slice(s: &IndexSet, a: usize, b: usize, fixed: &[usize]) -> Result<Slice> {
    check_slice_args(s, a, b, fixed)?;
    let k = s.k();
    let others: Vec<usize> = (0..k).filter(|&x| x != a && x != b).collect();
    let pairs = s
        .tuples()
        .iter()
        .filter(|t| others.iter().zip(fixed).all(|(&axis, &st)| t[axis] == st))
        .map(|t| (t[a], t[b]))
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .collect();
    Ok(Slice {
        a,
        b,
        fixed: fixed.to_vec(),
        pairs,
    })
}

/// Evaluates the functional that puts 1 on the fixed states of the other
/// axes against every column of `A_S`. It must equal `k − 2` exactly on the
/// slice columns and stay below it elsewhere.
pub fn face_functional_check(s: &IndexSet, a: usize, b: usize, fixed: &[usize]) -> Result<bool> {
    let sl = slice(s, a, b, fixed)?;
    let k = s.k();
    let matrix = build_a_matrix(s);
    let others: Vec<usize> = (0..k).filter(|&x| x != a && x != b).collect();
    let mut values = vec![0i64; s.len()];
    for (&axis, &state) in others.iter().zip(fixed) {
        for (c, &e) in matrix.blocks[axis].rows[state].entries.iter().enumerate() {
            values[c] += i64::from(e);
        }
    }
    let target = (k - 2) as i64;
    Ok(s.tuples().iter().zip(&values).all(|(t, &v)| {
        let in_slice = sl.pairs.binary_search(&(t[a], t[b])).is_ok()
            && others.iter().zip(fixed).all(|(&axis, &st)| t[axis] == st);
        if in_slice {
            v == target
        } else {
            v < target
        }
    }))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SliceVerdict {
    pub slice: Slice,
    /// `None` for empty slices, which are skipped.
    pub doubly_chordal: Option<bool>,
    /// Witness in the original state numbering.
    pub witness: Option<ChordalityWitness>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SliceScan {
    pub slices: Vec<SliceVerdict>,
    pub empty: usize,
    /// Index into `slices` of the first failure.
    pub first_failure: Option<usize>,
}

impl SliceScan {
    pub fn passed(&self) -> bool {
        self.first_failure.is_none()
    }

    pub fn failure(&self) -> Option<&SliceVerdict> {
        self.first_failure.map(|x| &self.slices[x])
    }
}

fn fixed_states(dims: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for &d in dims {
        out = out
            .into_iter()
            .flat_map(|p| {
                (0..d).map(move |s| {
                    let mut q = p.clone();
                    q.push(s);
                    q
                })
            })
            .collect();
    }
    out
}

fn judge(sl: Slice) -> Result<SliceVerdict> {
    if sl.is_empty() {
        return Ok(SliceVerdict {
            slice: sl,
            doubly_chordal: None,
            witness: None,
        });
    }
    let raw: Vec<Vec<usize>> = sl.pairs.iter().map(|&(x, y)| vec![x, y]).collect();
    let trimmed = IndexSet::trim(2, &raw)?;
    let g = build_graph(&trimmed.set)?;
    let witness = is_doubly_chordal_bipartite(&g).err().map(|w| ChordalityWitness {
        kind: w.kind,
        vertices: w
            .vertices
            .iter()
            .map(|v| match *v {
                Vertex::Row(i) => Vertex::Row(trimmed.states[0][i]),
                Vertex::Col(j) => Vertex::Col(trimmed.states[1][j]),
            })
            .collect(),
    });
    Ok(SliceVerdict {
        slice: sl,
        doubly_chordal: Some(witness.is_none()),
        witness,
    })
}

/// Checks every nonempty 2-way slice for ML-degree one. Slices are visited
/// by axis pair `a < b`, then by fixed states in lexicographic order.
pub fn slices_necessary_condition(s: &IndexSet) -> Result<SliceScan> {
    let k = s.k();
    if k < 3 {
        return Err(Error::TooFewAxes { min: 3, actual: k });
    }
    let mut slices = Vec::new();
    let mut empty = 0;
    let mut first_failure = None;
    for a in 0..k {
        for b in a + 1..k {
            let dims: Vec<usize> = (0..k)
                .filter(|&x| x != a && x != b)
                .map(|x| s.dims()[x])
                .collect();
            for fixed in fixed_states(&dims) {
                let verdict = judge(slice(s, a, b, &fixed)?)?;
                if verdict.doubly_chordal.is_none() {
                    empty += 1;
                }
                if verdict.doubly_chordal == Some(false) && first_failure.is_none() {
                    first_failure = Some(slices.len());
                }
                slices.push(verdict);
            }
        }
    }
    Ok(SliceScan {
        slices,
        empty,
        first_failure,
    })
}

/// One-line summary of a scan.
pub fn summarize(scan: &SliceScan) -> String {
    match scan.failure() {
        None => "necessary condition passed - NOT sufficient (known ML-degree 3 counterexample: the no-three-way model)".to_string(),
        Some(v) => format!(
            "necessary condition fails at slice {}: {}",
            v.slice.describe(),
            v.witness.as_ref().map(ToString::to_string).unwrap_or_default()
        ),
    }
}

/// Pairs of a slice rendered 1-based.
pub fn render_pairs(sl: &Slice) -> String {
    let parts: Vec<String> = sl.pairs.iter().map(|&(x, y)| fmt_tuple(&[x, y])).collect();
    format!("{{{}}}", parts.join(", "))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chordal::WitnessKind;
    use crate::fixtures;
    use proptest::prelude::*;

    fn one_based_pairs(sl: &Slice) -> Vec<(usize, usize)> {
        sl.pairs.iter().map(|&(x, y)| (x + 1, y + 1)).collect()
    }

    #[test]
    fn fixture_slices() {
        let b = slice(&fixtures::fix_b(), 0, 1, &[0]).unwrap();
        assert_eq!(one_based_pairs(&b), vec![(1, 1), (2, 1), (2, 2)]);
        let f = slice(&fixtures::fix_f(), 0, 1, &[0]).unwrap();
        assert_eq!(one_based_pairs(&f), vec![(1, 1), (3, 3)]);
        assert_eq!(render_pairs(&f), "{(1,1), (3,3)}");
    }

    #[test]
    fn empty_slice_is_flagged() {
        let s = IndexSet::from_one_based_tuples(&[&[1, 1, 1, 1], &[2, 2, 2, 2]]).unwrap();
        let sl = slice(&s, 0, 1, &[1, 1]).unwrap();
        assert_eq!(one_based_pairs(&sl), vec![(2, 2)]);
        assert!(slice(&s, 0, 1, &[0, 1]).unwrap().is_empty());
        let scan = slices_necessary_condition(&s).unwrap();
        assert_eq!(scan.slices.len(), 24);
        assert_eq!(scan.empty, 12);
        assert!(scan.passed());
        assert!(scan.slices.iter().filter(|v| v.slice.is_empty()).all(|v| v.doubly_chordal.is_none()));
    }

    #[test]
    fn bad_arguments() {
        let s = fixtures::fix_b();
        assert!(slice(&s, 0, 0, &[0]).is_err());
        assert!(slice(&s, 0, 1, &[7]).is_err());
        assert!(slice(&s, 0, 1, &[]).is_err());
        assert!(matches!(slice(&fixtures::fix_a(), 0, 1, &[]), Err(Error::TooFewAxes { .. })));
    }

    #[test]
    fn face_certificates() {
        assert!(face_functional_check(&fixtures::fix_b(), 0, 1, &[0]).unwrap());
        let f = fixtures::fix_f();
        for (a, b) in [(0, 1), (0, 2), (1, 2)] {
            for st in 0..4 {
                assert!(face_functional_check(&f, a, b, &[st]).unwrap());
            }
        }
    }

    #[test]
    fn fixtures_pass_the_scan() {
        assert!(slices_necessary_condition(&fixtures::fix_b()).unwrap().passed());
        let f = slices_necessary_condition(&fixtures::fix_f()).unwrap();
        assert!(f.passed());
        assert!(summarize(&f).contains("NOT sufficient"));
    }

    fn plant(pattern: &IndexSet, at: usize, extra: usize) -> IndexSet {
        let mut tuples: Vec<Vec<usize>> = pattern.tuples().iter().map(|t| vec![t[0], t[1], at]).collect();
        let depth = extra.max(at + 1);
        for z in 0..depth {
            if z != at {
                tuples.push(vec![z % pattern.dims()[0], z % pattern.dims()[1], z]);
            }
        }
        let mut dims = pattern.dims().to_vec();
        dims.push(depth);
        IndexSet::new(dims, tuples).unwrap()
    }

    #[test]
    fn planted_six_cycle_is_found() {
        let s = plant(&fixtures::c6(), 0, 1);
        let scan = slices_necessary_condition(&s).unwrap();
        let fail = scan.failure().unwrap();
        assert_eq!((fail.slice.a, fail.slice.b, fail.slice.fixed.clone()), (0, 1, vec![0]));
        let w = fail.witness.as_ref().unwrap();
        assert_eq!(w.kind, WitnessKind::InducedCycle);
        assert_eq!(w.vertices.len(), 6);
        assert!(w.verify(&build_graph(&fixtures::c6()).unwrap()));
    }

    proptest! {
        #[test]
        fn planted_patterns_are_detected(at in 0usize..4, extra in 1usize..5, square in any::<bool>()) {
            let pattern = if square { fixtures::double_square() } else { fixtures::c6() };
            let s = plant(&pattern, at, extra);
            let scan = slices_necessary_condition(&s).unwrap();
            let fail = scan.failure().unwrap();
            prop_assert_eq!((fail.slice.a, fail.slice.b), (0, 1));
            prop_assert_eq!(fail.slice.fixed.clone(), vec![at]);
            let w = fail.witness.as_ref().unwrap();
            prop_assert!(w.verify(&build_graph(&pattern).unwrap()));
        }

        #[test]
        fn nonempty_slices_are_faces(s in crate::ctfp::tests::random_set()) {
            if s.k() >= 3 {
                let scan = slices_necessary_condition(&s).unwrap();
                for v in scan.slices.iter().filter(|v| !v.slice.is_empty()) {
                    prop_assert!(face_functional_check(&s, v.slice.a, v.slice.b, &v.slice.fixed).unwrap());
                }
            }
        }
    }
}

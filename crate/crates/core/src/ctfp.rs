//! Coordinate splits, the frequency and swap criteria, and gluing.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::chordal::ml_degree_one_2way;
use crate::error::{Error, Result};
use crate::model::{fmt_tuple, IndexSet};

/// A j-coordinate split: axis `j` is shared, `in_a` are the axes routed to
/// the first factor (0-based, sorted, containing `j`).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SplitSpec {
    j: usize,
    in_a: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct SplitSpecJson {
    j: usize,
    #[serde(rename = "inA")]
    in_a: Vec<usize>,
}

impl Serialize for SplitSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SplitSpecJson {
            j: self.j + 1,
            in_a: self.in_a.iter().map(|a| a + 1).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for SplitSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let json = SplitSpecJson::deserialize(d)?;
        if json.j == 0 || json.in_a.contains(&0) {
            return Err(serde::de::Error::custom("axes are 1-based"));
        }
        Ok(SplitSpec {
            j: json.j - 1,
            in_a: {
                let mut v: Vec<usize> = json.in_a.iter().map(|a| a - 1).collect();
                v.sort_unstable();
                v.dedup();
                v
            },
        })
    }
}

impl SplitSpec {
    /// Validates against `k` axes. `in_a` is sorted and deduplicated.
    pub fn new(k: usize, j: usize, mut in_a: Vec<usize>) -> Result<Self> {
        in_a.sort_unstable();
        in_a.dedup();
        let spec = SplitSpec { j, in_a };
        spec.validate(k)?;
        Ok(spec)
    }

    /// 1-based convenience constructor.
    pub fn one_based(k: usize, j: usize, in_a: &[usize]) -> Result<Self> {
        if j == 0 || in_a.contains(&0) {
            return Err(Error::InvalidSplit("axes are 1-based".into()));
        }
        SplitSpec::new(k, j - 1, in_a.iter().map(|a| a - 1).collect())
    }

    pub fn validate(&self, k: usize) -> Result<()> {
        if self.j >= k || self.in_a.iter().any(|&a| a >= k) {
            return Err(Error::InvalidSplit(format!("axis out of range for k = {k}")));
        }
        if !self.in_a.contains(&self.j) {
            return Err(Error::InvalidSplit("inA must contain j".into()));
        }
        if self.in_a.len() == 1 || self.in_a.len() == k {
            return Err(Error::InvalidSplit(
                "each factor needs at least one non-shared axis".into(),
            ));
        }
        Ok(())
    }

    pub fn j(&self) -> usize {
        self.j
    }

    pub fn in_a(&self) -> &[usize] {
        &self.in_a
    }

    pub fn in_b(&self, k: usize) -> Vec<usize> {
        (0..k)
            .filter(|a| *a == self.j || !self.in_a.contains(a))
            .collect()
    }

    fn pos_in_a(&self) -> usize {
        self.in_a.iter().position(|&a| a == self.j).unwrap()
    }

    fn pos_in_b(&self, k: usize) -> usize {
        self.in_b(k).iter().position(|&a| a == self.j).unwrap()
    }
}

impl fmt::Display for SplitSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let a: Vec<String> = self.in_a.iter().map(|x| (x + 1).to_string()).collect();
        write!(f, "j={}, inA={{{}}}", self.j + 1, a.join(","))
    }
}

/// Multiset of tuples with positive multiplicities.
pub type TupleMultiset = BTreeMap<Vec<usize>, usize>;

fn project(t: &[usize], axes: &[usize]) -> Vec<usize> {
    axes.iter().map(|&a| t[a]).collect()
}

pub fn split(s: &IndexSet, spec: &SplitSpec) -> Result<(TupleMultiset, TupleMultiset)> {
    spec.validate(s.k())?;
    let in_b = spec.in_b(s.k());
    let mut first = TupleMultiset::new();
    let mut second = TupleMultiset::new();
    for t in s.tuples() {
        *first.entry(project(t, &spec.in_a)).or_default() += 1;
        *second.entry(project(t, &in_b)).or_default() += 1;
    }
    Ok((first, second))
}

fn equal_multiplicity_per_state(ms: &TupleMultiset, pos: usize) -> bool {
    let mut seen: BTreeMap<usize, usize> = BTreeMap::new();
    for (t, &mult) in ms {
        if *seen.entry(t[pos]).or_insert(mult) != mult {
            return false;
        }
    }
    true
}

fn distinct_per_state(ms: &TupleMultiset, pos: usize) -> BTreeMap<usize, usize> {
    let mut out = BTreeMap::new();
    for t in ms.keys() {
        *out.entry(t[pos]).or_insert(0) += 1;
    }
    out
}

/// Tuples of each split multiset that share the j-state have equal
/// multiplicity. Necessary, but not sufficient on its own.
pub fn check_equal_frequencies(s: &IndexSet, spec: &SplitSpec) -> Result<bool> {
    let (first, second) = split(s, spec)?;
    Ok(equal_multiplicity_per_state(&first, spec.pos_in_a())
        && equal_multiplicity_per_state(&second, spec.pos_in_b(s.k())))
}

/// Every element of each split multiset occurs exactly as often as there are
/// distinct elements on the other side with the same j-state.
pub fn check_frequency_condition(s: &IndexSet, spec: &SplitSpec) -> Result<bool> {
    let (first, second) = split(s, spec)?;
    let (pa, pb) = (spec.pos_in_a(), spec.pos_in_b(s.k()));
    let partners_of_a = distinct_per_state(&second, pb);
    let partners_of_b = distinct_per_state(&first, pa);
    Ok(first.iter().all(|(t, &m)| partners_of_a.get(&t[pa]) == Some(&m))
        && second.iter().all(|(t, &m)| partners_of_b.get(&t[pb]) == Some(&m)))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SwapWitness {
    pub s1: Vec<usize>,
    pub s2: Vec<usize>,
    pub missing: Vec<usize>,
}

impl fmt::Display for SwapWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} and {} are in S but {} is not",
            fmt_tuple(&self.s1),
            fmt_tuple(&self.s2),
            fmt_tuple(&self.missing)
        )
    }
}

fn concat(spec: &SplitSpec, in_b: &[usize], a_from: &[usize], b_from: &[usize]) -> Vec<usize> {
    let mut out = b_from.to_vec();
    for &ax in &spec.in_a {
        out[ax] = a_from[ax];
    }
    for &ax in in_b {
        out[ax] = b_from[ax];
    }
    out
}

/// For every pair agreeing on axis `j`, both cross concatenations must lie in
/// `S`. Returns the first violation in lexicographic pair order.
pub fn check_swap_condition(s: &IndexSet, spec: &SplitSpec) -> Result<Option<SwapWitness>> {
    spec.validate(s.k())?;
    let in_b = spec.in_b(s.k());
    let tuples = s.tuples();
    for (x, s1) in tuples.iter().enumerate() {
        for s2 in &tuples[x + 1..] {
            if s1[spec.j] != s2[spec.j] {
                continue;
            }
            for (a, b) in [(s1, s2), (s2, s1)] {
                let cross = concat(spec, &in_b, a, b);
                if !s.contains(&cross) {
                    return Ok(Some(SwapWitness {
                        s1: s1.clone(),
                        s2: s2.clone(),
                        missing: cross,
                    }));
                }
            }
        }
    }
    Ok(None)
}

/// Where an axis of a glued set comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum AxisOrigin {
    First(usize),
    Shared { first: usize, second: usize },
    Second(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Glued {
    pub set: IndexSet,
    pub provenance: Vec<AxisOrigin>,
}

/// Glues `s1` and `s2` along `j1`/`j2`. Result axes: axes of `s1` other than
/// `j1`, the shared axis, axes of `s2` other than `j2`.
pub fn glue(s1: &IndexSet, j1: usize, s2: &IndexSet, j2: usize) -> Result<Glued> {
    if j1 >= s1.k() || j2 >= s2.k() {
        return Err(Error::InvalidArgument("glue axis out of range".into()));
    }
    if s1.dims()[j1] != s2.dims()[j2] {
        return Err(Error::DimensionMismatch(format!(
            "shared axis has {} states in the first set and {} in the second",
            s1.dims()[j1],
            s2.dims()[j2]
        )));
    }
    let mut provenance: Vec<AxisOrigin> = (0..s1.k())
        .filter(|&a| a != j1)
        .map(AxisOrigin::First)
        .collect();
    provenance.push(AxisOrigin::Shared {
        first: j1,
        second: j2,
    });
    provenance.extend((0..s2.k()).filter(|&a| a != j2).map(AxisOrigin::Second));

    let mut by_state: BTreeMap<usize, Vec<&Vec<usize>>> = BTreeMap::new();
    for t in s2.tuples() {
        by_state.entry(t[j2]).or_default().push(t);
    }
    let mut tuples = Vec::new();
    for a in s1.tuples() {
        for b in by_state.get(&a[j1]).into_iter().flatten() {
            tuples.push(
                provenance
                    .iter()
                    .map(|o| match *o {
                        AxisOrigin::First(x) => a[x],
                        AxisOrigin::Shared { .. } => a[j1],
                        AxisOrigin::Second(x) => b[x],
                    })
                    .collect(),
            );
        }
    }
    let dims = provenance
        .iter()
        .map(|o| match *o {
            AxisOrigin::First(x) => s1.dims()[x],
            AxisOrigin::Shared { .. } => s1.dims()[j1],
            AxisOrigin::Second(x) => s2.dims()[x],
        })
        .collect();
    Ok(Glued {
        set: IndexSet::new(dims, tuples)?,
        provenance,
    })
}

/// Predicted ML-degree of a factorized set from its 2-way factors.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum MlDegreePrediction {
    Exact(u64),
    GreaterThanOne,
    Unknown,
}

impl fmt::Display for MlDegreePrediction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MlDegreePrediction::Exact(d) => write!(f, "{d}"),
            MlDegreePrediction::GreaterThanOne => write!(f, "> 1"),
            MlDegreePrediction::Unknown => write!(f, "unknown"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CTFPFactorization {
    pub spec: SplitSpec,
    pub s1: IndexSet,
    pub s2: IndexSet,
    pub shared_states: usize,
    k: usize,
}

impl CTFPFactorization {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn in_b(&self) -> Vec<usize> {
        self.spec.in_b(self.k)
    }

    /// Position of the shared axis within `s1` and `s2`.
    pub fn shared_positions(&self) -> (usize, usize) {
        (self.spec.pos_in_a(), self.spec.pos_in_b(self.k))
    }

    /// Glues the factors back and restores the original axis order.
    pub fn reassemble(&self) -> Result<IndexSet> {
        let (p1, p2) = self.shared_positions();
        let glued = glue(&self.s1, p1, &self.s2, p2)?;
        let in_b = self.in_b();
        // Axis q of the original set sits at position perm[q] of the glued set.
        let mut perm = vec![0; self.k];
        for (pos, origin) in glued.provenance.iter().enumerate() {
            let original = match *origin {
                AxisOrigin::First(x) => self.spec.in_a[x],
                AxisOrigin::Shared { .. } => self.spec.j,
                AxisOrigin::Second(x) => in_b[x],
            };
            perm[original] = pos;
        }
        glued.set.permute_axes(&perm)
    }

    /// Projections of a tuple of the original set onto the two factors.
    pub fn project(&self, t: &[usize]) -> (Vec<usize>, Vec<usize>) {
        (project(t, &self.spec.in_a), project(t, &self.in_b()))
    }

    pub fn ml_degree_prediction(&self) -> MlDegreePrediction {
        if self.s1.k() != 2 || self.s2.k() != 2 {
            return MlDegreePrediction::Unknown;
        }
        match (ml_degree_one_2way(&self.s1), ml_degree_one_2way(&self.s2)) {
            (Ok(true), Ok(true)) => MlDegreePrediction::Exact(1),
            (Ok(_), Ok(_)) => MlDegreePrediction::GreaterThanOne,
            _ => MlDegreePrediction::Unknown,
        }
    }
}

pub fn factorize(s: &IndexSet, spec: &SplitSpec) -> Result<CTFPFactorization> {
    if let Some(w) = check_swap_condition(s, spec)? {
        return Err(Error::ConditionFailed(w));
    }
    let (first, second) = split(s, spec)?;
    let in_b = spec.in_b(s.k());
    let s1 = IndexSet::new(
        spec.in_a.iter().map(|&a| s.dims()[a]).collect(),
        first.into_keys().collect(),
    )?;
    let s2 = IndexSet::new(
        in_b.iter().map(|&a| s.dims()[a]).collect(),
        second.into_keys().collect(),
    )?;
    let fact = CTFPFactorization {
        spec: spec.clone(),
        s1,
        s2,
        shared_states: s.dims()[spec.j],
        k: s.k(),
    };
    if &fact.reassemble()? != s {
        return Err(Error::TheoremViolation(format!(
            "swap condition holds for {spec} but the factors do not glue back"
        )));
    }
    Ok(fact)
}

/// Canonical splits of `k` axes: for each `j`, every `in_a` containing the
/// smallest axis other than `j`, so each unordered pair is listed once.
pub fn canonical_splits(k: usize) -> Vec<SplitSpec> {
    let mut out = Vec::new();
    for j in 0..k {
        let others: Vec<usize> = (0..k).filter(|&a| a != j).collect();
        let (first, rest) = others.split_first().expect("k >= 2");
        for mask in 0u64..(1 << rest.len()) {
            if mask == (1 << rest.len()) - 1 {
                continue;
            }
            let mut in_a = vec![j, *first];
            in_a.extend(
                rest.iter()
                    .enumerate()
                    .filter(|(b, _)| mask >> b & 1 == 1)
                    .map(|(_, &a)| a),
            );
            in_a.sort_unstable();
            out.push(SplitSpec { j, in_a });
        }
    }
    out.sort();
    out
}

pub fn find_ctfp(s: &IndexSet) -> Result<Vec<CTFPFactorization>> {
    if s.k() < 3 {
        return Err(Error::TooFewAxes {
            min: 3,
            actual: s.k(),
        });
    }
    let mut found = Vec::new();
    for spec in canonical_splits(s.k()) {
        if check_swap_condition(s, &spec)?.is_none() {
            found.push(factorize(s, &spec)?);
        }
    }
    Ok(found)
}

//! The leveled reparametrization of a 2-way ML-degree-one model and its
//! decomposition into toric fiber products of linear ideals.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_rational::BigRational;
use serde::Serialize;

use crate::ctfp::{check_swap_condition, SplitSpec, SwapWitness};
use crate::error::{Error, Result};
use crate::linalg::{integer_kernel_basis, rat, rowspan_contains, rowspans_equal, RatMatrix};
use crate::model::{
    build_a_matrix, validate_multipartition, Block, IndexSet, MatrixRow, MultipartitionMatrix,
};
use crate::poset::{build_poset, indicator_combination, CliquePoset};

/// A state of one coordinate of the reparametrized set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Label {
    Row(usize),
    Col(usize),
    /// Index into the poset's maximal intersections.
    Intersection(usize),
}

impl Label {
    pub fn render(&self, poset: &CliquePoset) -> String {
        match *self {
            Label::Row(i) => format!("a_{}", i + 1),
            Label::Col(j) => format!("b_{}", j + 1),
            Label::Intersection(x) => format!("I{}", poset.intersections[x].clique),
        }
    }
}

/// `X_r`, `R_r`, `C_r` for `r = 0..=h`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LevelSets {
    pub x: Vec<Vec<usize>>,
    pub r: Vec<Vec<usize>>,
    pub c: Vec<Vec<usize>>,
}

impl LevelSets {
    pub fn h(&self) -> usize {
        self.x.len() - 1
    }

    /// Row labels of block `r` in order: intersections, rows, columns.
    pub fn block_labels(&self, r: usize) -> Vec<Label> {
        self.x[r]
            .iter()
            .map(|&x| Label::Intersection(x))
            .chain(self.r[r].iter().map(|&i| Label::Row(i)))
            .chain(self.c[r].iter().map(|&j| Label::Col(j)))
            .collect()
    }
}

pub fn level_sets(poset: &CliquePoset) -> Result<LevelSets> {
    let h = poset.h;
    let (m, n) = (poset.m(), poset.n());
    let mut x = vec![Vec::new(); h + 1];
    for idx in 0..poset.intersections.len() {
        let lvl = poset.intersection_level(idx);
        if lvl > h {
            return Err(Error::Construction {
                block: lvl,
                reason: "intersection level exceeds h".into(),
            });
        }
        x[lvl].push(idx);
    }
    let rows_at = |lvl: usize| -> BTreeSet<usize> {
        poset
            .cliques_at_level(lvl)
            .into_iter()
            .flat_map(|c| poset.cliques[c].rows.clone())
            .collect()
    };
    let cols_at = |lvl: usize| -> BTreeSet<usize> {
        poset
            .cliques_at_level(lvl)
            .into_iter()
            .flat_map(|c| poset.cliques[c].cols.clone())
            .collect()
    };
    let mut r: Vec<Vec<usize>> = vec![(0..m).collect()];
    let mut c: Vec<Vec<usize>> = vec![Vec::new()];
    for lvl in 1..=h {
        let drop = rows_at(lvl);
        r.push(r[lvl - 1].iter().copied().filter(|i| !drop.contains(i)).collect());
        let above = cols_at(lvl + 1);
        let mut next: BTreeSet<usize> = c[lvl - 1].iter().copied().collect();
        next.extend(cols_at(lvl).into_iter().filter(|j| !above.contains(j)));
        c.push(next.into_iter().collect());
    }
    let sets = LevelSets { x, r, c };
    let fail = |reason: &str| Error::Construction {
        block: h,
        reason: reason.into(),
    };
    if !sets.x[0].is_empty() || !sets.x[h].is_empty() {
        return Err(fail("X_0 and X_h must be empty"));
    }
    if !sets.r[h].is_empty() {
        return Err(fail("R_h must be empty"));
    }
    if sets.c[h] != (0..n).collect::<Vec<_>>() {
        return Err(fail("C_h must be every column"));
    }
    for lvl in 1..=h {
        let decreasing = sets.r[lvl].iter().all(|i| sets.r[lvl - 1].contains(i));
        let increasing = sets.c[lvl - 1].iter().all(|j| sets.c[lvl].contains(j));
        if !decreasing || !increasing {
            return Err(Error::Construction {
                block: lvl,
                reason: "R_r must shrink and C_r must grow".into(),
            });
        }
    }
    Ok(sets)
}

/// `Ā_S` together with its (h+1)-tuple labels.
#[derive(Clone, Debug)]
pub struct ReparamMatrix {
    pub source: IndexSet,
    pub poset: CliquePoset,
    pub levels: LevelSets,
    pub matrix: MultipartitionMatrix,
    /// Label tuple of each column of `A_S`, in the column order of `A_S`.
    pub bar_tuples: Vec<Vec<Label>>,
    /// The label tuples encoded as states (position of the label in its block).
    pub bar_set: IndexSet,
    /// Column `c` of `A_S` is column `column_map[c]` of `bar_set`.
    pub column_map: Vec<usize>,
}

impl ReparamMatrix {
    pub fn h(&self) -> usize {
        self.poset.h
    }

    pub fn render_tuple(&self, t: &[Label]) -> String {
        let parts: Vec<String> = t.iter().map(|l| l.render(&self.poset)).collect();
        format!("({})", parts.join(", "))
    }
}

fn label_has_cell(poset: &CliquePoset, label: Label, i: usize, j: usize) -> bool {
    match label {
        Label::Row(r) => r == i,
        Label::Col(c) => c == j,
        Label::Intersection(x) => poset.intersections[x].clique.contains_cell(i, j),
    }
}

pub fn build_bar_matrix(s: &IndexSet) -> Result<ReparamMatrix> {
    let poset = build_poset(s)?;
    let levels = level_sets(&poset)?;
    let h = poset.h;

    for x in &poset.intersections {
        indicator_combination(s, &x.clique)?;
    }

    let mut blocks = Vec::with_capacity(h + 1);
    let mut bar_tuples: Vec<Vec<Label>> = vec![Vec::with_capacity(h + 1); s.len()];
    let mut states: Vec<Vec<usize>> = vec![Vec::with_capacity(h + 1); s.len()];
    for r in 0..=h {
        let labels = levels.block_labels(r);
        let mut rows = Vec::with_capacity(labels.len());
        for label in &labels {
            rows.push(MatrixRow {
                label: label.render(&poset),
                entries: s
                    .tuples()
                    .iter()
                    .map(|t| u8::from(label_has_cell(&poset, *label, t[0], t[1])))
                    .collect(),
            });
        }
        for (col, t) in s.tuples().iter().enumerate() {
            let hits: Vec<usize> = (0..labels.len())
                .filter(|&l| rows[l].entries[col] == 1)
                .collect();
            if hits.len() != 1 {
                return Err(Error::Construction {
                    block: r,
                    reason: format!(
                        "column {} is covered by {} rows",
                        crate::model::fmt_tuple(t),
                        hits.len()
                    ),
                });
            }
            bar_tuples[col].push(labels[hits[0]]);
            states[col].push(hits[0]);
        }
        blocks.push(Block { rows });
    }
    let matrix = MultipartitionMatrix {
        columns: s.tuples().to_vec(),
        blocks,
    };
    if let Some(f) = validate_multipartition(&matrix).first_failure() {
        return Err(Error::Construction {
            block: f.offense.map_or(0, |o| o.0),
            reason: format!("invariant `{}` fails", f.name),
        });
    }
    let a = build_a_matrix(s);
    let original = RatMatrix::from_ints(&a.to_int_rows(), a.n_cols())?;
    let bar = RatMatrix::from_ints(&matrix.to_int_rows(), matrix.n_cols())?;
    if !rowspans_equal(&original, &bar)? {
        return Err(Error::Construction {
            block: 0,
            reason: "rowspan differs from that of A_S".into(),
        });
    }
    let dims: Vec<usize> = (0..=h).map(|r| levels.block_labels(r).len()).collect();
    let bar_set = IndexSet::new(dims, states.clone()).map_err(|e| Error::Construction {
        block: 0,
        reason: e.to_string(),
    })?;
    let column_map = states
        .iter()
        .map(|t| bar_set.position(t).expect("tuple was inserted"))
        .collect();
    Ok(ReparamMatrix {
        source: s.clone(),
        poset,
        levels,
        matrix,
        bar_tuples,
        bar_set,
        column_map,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InternalCtfpCheck {
    /// 0-based coordinate of the reparametrized tuples.
    pub coordinate: usize,
    pub passed: bool,
    pub witness: Option<SwapWitness>,
}

/// Runs the swap criterion at every internal coordinate `r = 1..h-1` with
/// the split `in_a = {0..=r}`.
pub fn verify_internal_ctfp(rep: &ReparamMatrix) -> Result<Vec<InternalCtfpCheck>> {
    let k = rep.bar_set.k();
    let mut out = Vec::new();
    for r in 1..rep.h() {
        let spec = SplitSpec::new(k, r, (0..=r).collect())?;
        let witness = check_swap_condition(&rep.bar_set, &spec)?;
        out.push(InternalCtfpCheck {
            coordinate: r,
            passed: witness.is_none(),
            witness,
        });
    }
    Ok(out)
}

/// Index of a part in a decomposition step.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PartIndex {
    Row(usize),
    Col(usize),
    Clique(usize),
}

impl PartIndex {
    pub fn render(&self, poset: &CliquePoset) -> String {
        match *self {
            PartIndex::Row(i) => format!("a_{}", i + 1),
            PartIndex::Col(j) => format!("b_{}", j + 1),
            PartIndex::Clique(c) => format!("D{}", poset.cliques[c]),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearDecompositionStep {
    pub r: usize,
    /// Distinct prefixes of length `r+1`.
    pub t: Vec<Vec<Label>>,
    /// Labels of block `r+1` with their multiplicities.
    pub t_prime: BTreeMap<Label, usize>,
    pub partition_index: BTreeSet<PartIndex>,
    pub g: BTreeMap<PartIndex, Vec<Vec<Label>>>,
    pub h: BTreeMap<PartIndex, BTreeMap<Label, usize>>,
    /// Appending every element of `H_x` to every element of `G_x`.
    pub glued: BTreeMap<Vec<Label>, usize>,
}

fn step_error(step: usize, reason: String) -> Error {
    Error::DecompositionInvariant { step, reason }
}

fn g_part(rep: &ReparamMatrix, r: usize, last: Label) -> Result<PartIndex> {
    let lv = &rep.levels;
    let p = &rep.poset;
    match last {
        Label::Row(i) if lv.r[r + 1].contains(&i) => Ok(PartIndex::Row(i)),
        Label::Row(i) if lv.r[r].contains(&i) => {
            let e = p.e_row(i)?;
            if p.levels[e] != r + 1 {
                return Err(step_error(r, format!("E_{} does not have level {}", i + 1, r + 1)));
            }
            Ok(PartIndex::Clique(e))
        }
        Label::Col(j) if lv.c[r].contains(&j) => Ok(PartIndex::Col(j)),
        Label::Intersection(x) if lv.x[r].contains(&x) => {
            let (_, upper) = p.intersection_covers[x];
            Ok(PartIndex::Clique(upper))
        }
        other => Err(step_error(
            r,
            format!("no G-rule for last coordinate {}", other.render(p)),
        )),
    }
}

fn h_part(rep: &ReparamMatrix, r: usize, label: Label) -> Result<PartIndex> {
    let lv = &rep.levels;
    let p = &rep.poset;
    match label {
        Label::Row(i) if lv.r[r + 1].contains(&i) => Ok(PartIndex::Row(i)),
        Label::Intersection(x) if lv.x[r + 1].contains(&x) => {
            let (lower, _) = p.intersection_covers[x];
            Ok(PartIndex::Clique(lower))
        }
        Label::Col(j) if lv.c[r].contains(&j) => Ok(PartIndex::Col(j)),
        Label::Col(j) if lv.c[r + 1].contains(&j) => {
            let e = p.e_col(j)?;
            if p.levels[e] == r + 1 {
                return Ok(PartIndex::Clique(e));
            }
            // Fallback for a minimal E^j: it equals E_i for one of its rows.
            let i = p.cliques[e]
                .rows
                .iter()
                .copied()
                .find(|&i| p.e_row(i).ok() == Some(e))
                .ok_or_else(|| step_error(r, format!("E^{} is not some E_i", j + 1)))?;
            Ok(PartIndex::Row(i))
        }
        other => Err(step_error(
            r,
            format!("no H-rule for element {}", other.render(p)),
        )),
    }
}

fn t_prime_multiplicity(rep: &ReparamMatrix, label: Label) -> usize {
    match label {
        Label::Row(i) => rep.poset.row_cols(i).len(),
        Label::Intersection(x) => rep.poset.intersections[x].clique.cols.len(),
        Label::Col(_) => 1,
    }
}

fn indicator_rows(cols: usize, members: impl Fn(usize) -> bool) -> Vec<BigRational> {
    (0..cols).map(|c| rat(i64::from(members(c)))).collect()
}

/// One factorization per `r = 0..h-1`, each checked for exact reassembly,
/// homogeneity of both gradings and linearity of the new factor.
pub fn linear_decomposition(rep: &ReparamMatrix) -> Result<Vec<LinearDecompositionStep>> {
    let h = rep.h();
    let lv = &rep.levels;
    let mut steps = Vec::with_capacity(h);
    for r in 0..h {
        let t: Vec<Vec<Label>> = rep
            .bar_tuples
            .iter()
            .map(|t| t[..=r].to_vec())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let t_prime: BTreeMap<Label, usize> = lv
            .block_labels(r + 1)
            .into_iter()
            .map(|l| (l, t_prime_multiplicity(rep, l)))
            .collect();

        let mut partition_index: BTreeSet<PartIndex> = BTreeSet::new();
        partition_index.extend(lv.r[r + 1].iter().map(|&i| PartIndex::Row(i)));
        partition_index.extend(lv.c[r].iter().map(|&j| PartIndex::Col(j)));
        partition_index.extend(rep.poset.cliques_at_level(r + 1).into_iter().map(PartIndex::Clique));

        let mut g: BTreeMap<PartIndex, Vec<Vec<Label>>> = BTreeMap::new();
        for prefix in &t {
            let x = g_part(rep, r, prefix[r])?;
            g.entry(x).or_default().push(prefix.clone());
        }
        let mut hp: BTreeMap<PartIndex, BTreeMap<Label, usize>> = BTreeMap::new();
        for (&label, &mult) in &t_prime {
            let x = h_part(rep, r, label)?;
            hp.entry(x).or_default().insert(label, mult);
        }
        for x in g.keys().chain(hp.keys()) {
            if !partition_index.contains(x) {
                return Err(step_error(
                    r,
                    format!("part {} is outside the partition index set", x.render(&rep.poset)),
                ));
            }
        }

        let mut glued: BTreeMap<Vec<Label>, usize> = BTreeMap::new();
        for (x, prefixes) in &g {
            let Some(tail) = hp.get(x) else { continue };
            for prefix in prefixes {
                for (&label, &mult) in tail {
                    let mut full = prefix.clone();
                    full.push(label);
                    *glued.entry(full).or_default() += mult;
                }
            }
        }
        let mut truncated: BTreeMap<Vec<Label>, usize> = BTreeMap::new();
        for t in &rep.bar_tuples {
            *truncated.entry(t[..=r + 1].to_vec()).or_default() += 1;
        }
        if glued != truncated {
            let diff = glued
                .iter()
                .find(|(k, v)| truncated.get(*k) != Some(*v))
                .map(|(k, _)| k.clone())
                .or_else(|| truncated.keys().find(|k| !glued.contains_key(*k)).cloned())
                .unwrap();
            return Err(step_error(
                r,
                format!(
                    "gluing does not reproduce the truncation at {}",
                    rep.render_tuple(&diff)
                ),
            ));
        }

        check_homogeneity(rep, r, &t, &g, &t_prime, &hp)?;
        check_linear(r, &t_prime)?;

        steps.push(LinearDecompositionStep {
            r,
            t,
            t_prime,
            partition_index,
            g,
            h: hp,
            glued,
        });
    }
    Ok(steps)
}

fn check_homogeneity(
    rep: &ReparamMatrix,
    r: usize,
    t: &[Vec<Label>],
    g: &BTreeMap<PartIndex, Vec<Vec<Label>>>,
    t_prime: &BTreeMap<Label, usize>,
    hp: &BTreeMap<PartIndex, BTreeMap<Label, usize>>,
) -> Result<()> {
    // A-matrix of T: one block per coordinate, one row per label in use.
    let mut rows = Vec::new();
    for q in 0..=r {
        let labels: BTreeSet<Label> = t.iter().map(|p| p[q]).collect();
        for l in labels {
            rows.push(indicator_rows(t.len(), |c| t[c][q] == l));
        }
    }
    let a_t = RatMatrix::new(rows, t.len())?;
    for (x, part) in g {
        let v = indicator_rows(t.len(), |c| part.contains(&t[c]));
        if rowspan_contains(&a_t, &v)?.is_none() {
            return Err(step_error(
                r,
                format!("G_{} is not homogeneous", x.render(&rep.poset)),
            ));
        }
    }
    let columns: Vec<Label> = t_prime
        .iter()
        .flat_map(|(&l, &mult)| std::iter::repeat_n(l, mult))
        .collect();
    let block_rows: Vec<Vec<BigRational>> = t_prime
        .keys()
        .map(|l| indicator_rows(columns.len(), |c| columns[c] == *l))
        .collect();
    let b = RatMatrix::new(block_rows, columns.len())?;
    for (x, part) in hp {
        let v = indicator_rows(columns.len(), |c| part.contains_key(&columns[c]));
        if rowspan_contains(&b, &v)?.is_none() {
            return Err(step_error(
                r,
                format!("H_{} is not homogeneous", x.render(&rep.poset)),
            ));
        }
    }
    Ok(())
}

/// The toric ideal of `T′` is generated by differences of repeated columns.
fn check_linear(r: usize, t_prime: &BTreeMap<Label, usize>) -> Result<()> {
    let columns: Vec<Label> = t_prime
        .iter()
        .flat_map(|(&l, &mult)| std::iter::repeat_n(l, mult))
        .collect();
    let rows: Vec<Vec<i64>> = t_prime
        .keys()
        .map(|l| columns.iter().map(|c| i64::from(c == l)).collect())
        .collect();
    for v in integer_kernel_basis(&rows, columns.len()) {
        let support: Vec<usize> = (0..v.len()).filter(|&c| v[c] != 0.into()).collect();
        let ok = support.len() == 2
            && v[support[0]] == 1.into()
            && v[support[1]] == (-1).into()
            && columns[support[0]] == columns[support[1]];
        if !ok {
            return Err(step_error(r, "the new factor's toric ideal is not linear".into()));
        }
    }
    Ok(())
}

impl fmt::Display for LinearDecompositionStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "step r={}: |T|={}, |T'|={}", self.r, self.t.len(), self.t_prime.values().sum::<usize>())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chordal::is_doubly_chordal_bipartite;
    use crate::fixtures;
    use crate::poset::Clique;
    use proptest::prelude::*;

    fn cl(rows: &[usize], cols: &[usize]) -> Clique {
        Clique {
            rows: rows.iter().map(|x| x - 1).collect(),
            cols: cols.iter().map(|x| x - 1).collect(),
        }
    }

    fn inter(rep: &ReparamMatrix, c: &Clique) -> usize {
        rep.poset
            .intersections
            .iter()
            .position(|x| &x.clique == c)
            .unwrap()
    }

    fn rendered(rep: &ReparamMatrix, labels: &[usize]) -> Vec<String> {
        let mut v: Vec<String> = labels
            .iter()
            .map(|&x| Label::Intersection(x).render(&rep.poset))
            .collect();
        v.sort();
        v
    }

    #[test]
    fn fix_d_level_sets() {
        let rep = build_bar_matrix(&fixtures::fix_d()).unwrap();
        let lv = &rep.levels;
        let mut x1 = vec![
            inter(&rep, &cl(&[1], &[1, 2])),
            inter(&rep, &cl(&[2], &[1, 2])),
            inter(&rep, &cl(&[2], &[4, 5])),
        ];
        x1.sort();
        assert_eq!(rendered(&rep, &lv.x[1]), rendered(&rep, &x1));
        assert_eq!(lv.x[2], vec![inter(&rep, &cl(&[2, 4], &[5]))]);
        assert_eq!(lv.r[1], vec![2, 3, 4]);
        assert_eq!(lv.r[2], vec![4]);
        assert_eq!(lv.c[1], vec![2]);
        assert_eq!(lv.c[2], vec![0, 1, 2, 3]);
    }

    #[test]
    fn fix_d_bar_matrix_shape_and_labels() {
        let s = fixtures::fix_d();
        let rep = build_bar_matrix(&s).unwrap();
        let sizes: Vec<usize> = rep.matrix.blocks.iter().map(|b| b.rows.len()).collect();
        assert_eq!(sizes, vec![5, 7, 6, 5]);
        assert_eq!(rep.matrix.n_rows(), 23);
        let col11 = s.position(&[0, 0]).unwrap();
        assert_eq!(
            rep.render_tuple(&rep.bar_tuples[col11]),
            "(a_1, I{1}x{1,2}, b_1, b_1)"
        );
        let col55 = s.position(&[4, 4]).unwrap();
        assert_eq!(rep.render_tuple(&rep.bar_tuples[col55]), "(a_5, a_5, a_5, b_5)");
        let checks = verify_internal_ctfp(&rep).unwrap();
        assert_eq!(checks.iter().map(|c| c.coordinate).collect::<Vec<_>>(), vec![1, 2]);
        assert!(checks.iter().all(|c| c.passed));
    }

    #[test]
    fn independence_model_is_unchanged() {
        let s = fixtures::full(2, 2);
        let rep = build_bar_matrix(&s).unwrap();
        assert_eq!(rep.h(), 1);
        assert_eq!(rep.matrix, build_a_matrix(&s));
        assert!(verify_internal_ctfp(&rep).unwrap().is_empty());
        let steps = linear_decomposition(&rep).unwrap();
        assert_eq!(steps.len(), 1);
        assert_eq!(steps[0].t.len(), 2);
        assert_eq!(steps[0].t_prime.values().copied().collect::<Vec<_>>(), vec![1, 1]);
    }

    #[test]
    fn fix_a_chain() {
        let s = fixtures::fix_a();
        let rep = build_bar_matrix(&s).unwrap();
        assert_eq!(rep.h(), 3);
        assert_eq!(rep.levels.r[1], vec![1, 2]);
        assert_eq!(rep.levels.r[2], vec![2]);
        assert_eq!(rep.levels.c[1], vec![2]);
        assert_eq!(rep.levels.c[2], vec![1, 2]);
        assert!(verify_internal_ctfp(&rep).unwrap().iter().all(|c| c.passed));
        assert_eq!(linear_decomposition(&rep).unwrap().len(), 3);
    }

    #[test]
    fn path_factor_has_four_blocks() {
        let rep = build_bar_matrix(&fixtures::fix_b1()).unwrap();
        assert_eq!(rep.matrix.blocks.len(), rep.h() + 1);
        assert!(validate_multipartition(&rep.matrix).passed());
    }

    #[test]
    fn fix_d_step_one() {
        let rep = build_bar_matrix(&fixtures::fix_d()).unwrap();
        let steps = linear_decomposition(&rep).unwrap();
        let step = &steps[1];
        let render = |t: &[Label]| rep.render_tuple(t);
        let t: Vec<String> = step.t.iter().map(|x| render(x)).collect();
        assert_eq!(t.len(), 7);
        assert!(t.contains(&"(a_1, I{1}x{1,2})".to_string()));
        assert!(t.contains(&"(a_1, b_3)".to_string()));
        assert_eq!(step.t_prime.values().sum::<usize>(), 6);
        assert_eq!(step.glued.len(), 12);
    }

    fn doubly_chordal_set() -> impl Strategy<Value = IndexSet> {
        crate::chordal::tests_support::random_graph().prop_filter_map("doubly chordal", |g| {
            is_doubly_chordal_bipartite(&g).ok()?;
            let tuples = g.edges().into_iter().map(|(i, j)| vec![i, j]).collect();
            IndexSet::new(vec![g.m(), g.n()], tuples).ok()
        })
    }

    proptest! {
        #[test]
        fn reparametrization_invariants(s in doubly_chordal_set()) {
            let rep = build_bar_matrix(&s).unwrap();
            prop_assert!(validate_multipartition(&rep.matrix).passed());
            prop_assert!(verify_internal_ctfp(&rep).unwrap().iter().all(|c| c.passed));
            prop_assert_eq!(linear_decomposition(&rep).unwrap().len(), rep.h());
        }
    }
}

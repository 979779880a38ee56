//! Maximal cliques, maximal intersections and the leveled clique poset.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use num_rational::BigRational;
use serde::Serialize;

use crate::chordal::{build_graph, require_ml_degree_one, BipartiteGraph, Vertex};
use crate::error::{Error, Result};
use crate::linalg::{rat, rowspan_contains, RatMatrix};
use crate::model::{build_a_matrix, IndexSet};

/// A complete rectangle `rows × cols ⊆ S` (0-based, sorted).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Clique {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
}

impl Clique {
    pub fn contains_cell(&self, i: usize, j: usize) -> bool {
        self.rows.binary_search(&i).is_ok() && self.cols.binary_search(&j).is_ok()
    }

    pub fn intersect(&self, other: &Clique) -> Option<Clique> {
        let rows: Vec<usize> = self.rows.iter().copied().filter(|r| other.rows.contains(r)).collect();
        let cols: Vec<usize> = self.cols.iter().copied().filter(|c| other.cols.contains(c)).collect();
        (!rows.is_empty() && !cols.is_empty()).then_some(Clique { rows, cols })
    }

    /// Cell containment.
    pub fn is_subset(&self, other: &Clique) -> bool {
        is_subset(&self.rows, &other.rows) && is_subset(&self.cols, &other.cols)
    }

    pub fn size(&self) -> usize {
        self.rows.len() * self.cols.len()
    }

    fn sort_key(&self) -> (usize, usize, &[usize], &[usize]) {
        (self.rows[0], self.cols[0], &self.rows, &self.cols)
    }
}

impl fmt::Display for Clique {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r: Vec<String> = self.rows.iter().map(|x| (x + 1).to_string()).collect();
        let c: Vec<String> = self.cols.iter().map(|x| (x + 1).to_string()).collect();
        write!(f, "{{{}}}x{{{}}}", r.join(","), c.join(","))
    }
}

fn is_subset(a: &[usize], b: &[usize]) -> bool {
    a.iter().all(|x| b.binary_search(x).is_ok())
}

fn common_cols(g: &BipartiteGraph, rows: &[usize]) -> Vec<usize> {
    (0..g.n()).filter(|&j| rows.iter().all(|&i| g.has_edge(i, j))).collect()
}

fn common_rows(g: &BipartiteGraph, cols: &[usize]) -> Vec<usize> {
    (0..g.m()).filter(|&i| cols.iter().all(|&j| g.has_edge(i, j))).collect()
}

/// Maximal bicliques: close the row supports under intersection, then take
/// the Galois closure of each column set.
pub fn maximal_cliques(s: &IndexSet) -> Result<Vec<Clique>> {
    let g = build_graph(s)?;
    Ok(cliques_of(&g))
}

fn cliques_of(g: &BipartiteGraph) -> Vec<Clique> {
    let mut col_sets: BTreeSet<Vec<usize>> = (0..g.m()).map(|i| g.row_neighbors(i)).collect();
    loop {
        let current: Vec<Vec<usize>> = col_sets.iter().cloned().collect();
        let mut grew = false;
        for (x, a) in current.iter().enumerate() {
            for b in &current[x + 1..] {
                let meet: Vec<usize> = a.iter().copied().filter(|c| b.contains(c)).collect();
                if !meet.is_empty() && col_sets.insert(meet) {
                    grew = true;
                }
            }
        }
        if !grew {
            break;
        }
    }
    let mut cliques: Vec<Clique> = col_sets
        .into_iter()
        .map(|cols| {
            let rows = common_rows(g, &cols);
            let cols = common_cols(g, &rows);
            Clique { rows, cols }
        })
        .collect();
    cliques.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
    cliques.dedup();
    for c in &cliques {
        assert_eq!(common_rows(g, &c.cols), c.rows, "clique {c} admits another row");
        assert_eq!(common_cols(g, &c.rows), c.cols, "clique {c} admits another column");
    }
    cliques
}

/// A maximal pairwise intersection with the first pair of cliques (by index)
/// that produces it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Intersection {
    pub clique: Clique,
    pub generators: (usize, usize),
}

pub fn maximal_intersections(s: &IndexSet) -> Result<Vec<Intersection>> {
    Ok(intersections_of(&maximal_cliques(s)?))
}

fn intersections_of(cliques: &[Clique]) -> Vec<Intersection> {
    let mut all: Vec<Intersection> = Vec::new();
    for a in 0..cliques.len() {
        for b in a + 1..cliques.len() {
            if let Some(c) = cliques[a].intersect(&cliques[b]) {
                if !all.iter().any(|x| x.clique == c) {
                    all.push(Intersection {
                        clique: c,
                        generators: (a, b),
                    });
                }
            }
        }
    }
    let maximal: Vec<Intersection> = all
        .iter()
        .filter(|x| {
            !all.iter()
                .any(|y| y.clique != x.clique && x.clique.is_subset(&y.clique))
        })
        .cloned()
        .collect();
    maximal
}

/// The poset of maximal cliques ordered by row containment, with levels.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CliquePoset {
    pub cliques: Vec<Clique>,
    /// Cover pairs `(lower, upper)` by clique index.
    pub covers: Vec<(usize, usize)>,
    pub levels: Vec<usize>,
    pub intersections: Vec<Intersection>,
    /// For each intersection, the cover `(lower, upper)` that produces it.
    pub intersection_covers: Vec<(usize, usize)>,
    pub h: usize,
    #[serde(skip)]
    graph: BipartiteGraph,
}

impl CliquePoset {
    pub fn m(&self) -> usize {
        self.graph.m()
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn graph(&self) -> &BipartiteGraph {
        &self.graph
    }

    pub fn less(&self, a: usize, b: usize) -> bool {
        a != b && is_subset(&self.cliques[a].rows, &self.cliques[b].rows)
    }

    /// Level of an intersection: the level of its lower clique.
    pub fn intersection_level(&self, x: usize) -> usize {
        self.levels[self.intersection_covers[x].0]
    }

    pub fn cliques_at_level(&self, r: usize) -> Vec<usize> {
        (0..self.cliques.len()).filter(|&c| self.levels[c] == r).collect()
    }

    pub fn row_cols(&self, i: usize) -> Vec<usize> {
        self.graph.row_neighbors(i)
    }

    pub fn col_rows(&self, j: usize) -> Vec<usize> {
        self.graph.col_neighbors(j)
    }

    pub fn index_of(&self, c: &Clique) -> Option<usize> {
        self.cliques.iter().position(|x| x == c)
    }

    /// `E_i`: the least maximal clique with row `i`.
    pub fn e_row(&self, i: usize) -> Result<usize> {
        if i >= self.m() {
            return Err(Error::InvalidArgument(format!("row {} out of range", i + 1)));
        }
        let cols = self.row_cols(i);
        let rows: Vec<usize> = (0..self.m())
            .filter(|&r| is_subset(&cols, &self.row_cols(r)))
            .collect();
        let c = Clique { rows, cols };
        let idx = self
            .index_of(&c)
            .ok_or_else(|| Error::TheoremViolation(format!("E_{} = {c} is not maximal", i + 1)))?;
        for (d, clique) in self.cliques.iter().enumerate() {
            if d != idx && clique.rows.contains(&i) && !self.less(idx, d) {
                return Err(Error::TheoremViolation(format!(
                    "E_{} is not below {clique}",
                    i + 1
                )));
            }
        }
        Ok(idx)
    }

    /// `E^j`: the greatest maximal clique with column `j`.
    pub fn e_col(&self, j: usize) -> Result<usize> {
        if j >= self.n() {
            return Err(Error::InvalidArgument(format!("column {} out of range", j + 1)));
        }
        let rows = self.col_rows(j);
        let cols: Vec<usize> = (0..self.n())
            .filter(|&c| is_subset(&rows, &self.col_rows(c)))
            .collect();
        let c = Clique { rows, cols };
        let idx = self
            .index_of(&c)
            .ok_or_else(|| Error::TheoremViolation(format!("E^{} = {c} is not maximal", j + 1)))?;
        for (d, clique) in self.cliques.iter().enumerate() {
            if d != idx && clique.cols.contains(&j) && !self.less(d, idx) {
                return Err(Error::TheoremViolation(format!(
                    "E^{} is not above {clique}",
                    j + 1
                )));
            }
        }
        Ok(idx)
    }
}

fn leveled(cliques: Vec<Clique>, graph: BipartiteGraph) -> Result<CliquePoset> {
    let k = cliques.len();
    let less = |a: usize, b: usize| a != b && is_subset(&cliques[a].rows, &cliques[b].rows);
    for a in 0..k {
        for b in 0..k {
            if less(a, b) != (a != b && is_subset(&cliques[b].cols, &cliques[a].cols)) {
                return Err(Error::TheoremViolation(format!(
                    "row and column orders disagree on {} and {}",
                    cliques[a], cliques[b]
                )));
            }
        }
    }
    let mut covers = Vec::new();
    for a in 0..k {
        for b in 0..k {
            if less(a, b) && !(0..k).any(|c| less(a, c) && less(c, b)) {
                covers.push((a, b));
            }
        }
    }

    let mut levels = vec![0i64; k];
    let mut assigned = vec![false; k];
    for root in 0..k {
        if assigned[root] {
            continue;
        }
        let mut component = vec![root];
        let mut queue = VecDeque::from([root]);
        assigned[root] = true;
        while let Some(v) = queue.pop_front() {
            for &(lo, hi) in &covers {
                let (w, lw) = if lo == v {
                    (hi, levels[v] + 1)
                } else if hi == v {
                    (lo, levels[v] - 1)
                } else {
                    continue;
                };
                if assigned[w] {
                    if levels[w] != lw {
                        return Err(Error::NotTree(format!(
                            "level constraints conflict at {}",
                            cliques[w]
                        )));
                    }
                } else {
                    assigned[w] = true;
                    levels[w] = lw;
                    component.push(w);
                    queue.push_back(w);
                }
            }
        }
        let min = component.iter().map(|&c| levels[c]).min().unwrap();
        for &c in &component {
            levels[c] += 1 - min;
        }
    }
    let levels: Vec<usize> = levels.into_iter().map(|l| l as usize).collect();

    let component_count = {
        let mut parent: Vec<usize> = (0..k).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            if p[x] != x {
                let r = find(p, p[x]);
                p[x] = r;
            }
            p[x]
        }
        let mut count = k;
        for &(a, b) in &covers {
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra != rb {
                parent[ra] = rb;
                count -= 1;
            }
        }
        count
    };
    if covers.len() + component_count != k {
        return Err(Error::NotTree("the cover graph has a cycle".into()));
    }

    let intersections = intersections_of(&cliques);
    let mut intersection_covers = Vec::with_capacity(intersections.len());
    for x in &intersections {
        let cover = covers
            .iter()
            .copied()
            .find(|&(a, b)| cliques[a].intersect(&cliques[b]).as_ref() == Some(&x.clique))
            .ok_or_else(|| {
                Error::NotTree(format!("intersection {} is not produced by a cover", x.clique))
            })?;
        intersection_covers.push(cover);
    }
    for &(a, b) in &covers {
        let meet = cliques[a].intersect(&cliques[b]);
        if !intersections.iter().any(|x| Some(&x.clique) == meet.as_ref()) {
            return Err(Error::NotTree(format!(
                "cover {} < {} does not meet in a maximal intersection",
                cliques[a], cliques[b]
            )));
        }
    }
    let h = levels.iter().copied().max().unwrap_or(0);
    Ok(CliquePoset {
        cliques,
        covers,
        levels,
        intersections,
        intersection_covers,
        h,
        graph,
    })
}

/// Builds `P_S` for a 2-way set of ML-degree one.
pub fn build_poset(s: &IndexSet) -> Result<CliquePoset> {
    let g = require_ml_degree_one(s)?;
    let cliques = cliques_of(&g);
    leveled(cliques, g)
}

pub fn e_clique_row(s: &IndexSet, i: usize) -> Result<Clique> {
    let p = build_poset(s)?;
    Ok(p.cliques[p.e_row(i)?].clone())
}

pub fn e_clique_col(s: &IndexSet, j: usize) -> Result<Clique> {
    let p = build_poset(s)?;
    Ok(p.cliques[p.e_col(j)?].clone())
}

/// Signed row/column coefficients whose combination of rows of `A_S` is the
/// indicator of a clique.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IndicatorCombination {
    pub row_coeffs: BTreeMap<usize, i64>,
    pub col_coeffs: BTreeMap<usize, i64>,
    /// `(A_k, B_k)` for k = 1, 2, … ; `B_0` is the clique's column set.
    pub trace: Vec<(Vec<usize>, Vec<usize>)>,
}

impl IndicatorCombination {
    /// Coefficients over the rows of `A_S`: `a_1..a_m` then `b_1..b_n`.
    pub fn coefficient_vector(&self, m: usize, n: usize) -> Vec<BigRational> {
        let mut v = vec![rat(0); m + n];
        for (&i, &c) in &self.row_coeffs {
            v[i] = rat(c);
        }
        for (&j, &c) in &self.col_coeffs {
            v[m + j] = rat(c);
        }
        v
    }

    fn support(&self) -> usize {
        self.row_coeffs.values().chain(self.col_coeffs.values()).filter(|&&c| c != 0).count()
    }

    /// Adds `t·(Σ a − Σ b)` over each connected component, choosing `t` to
    /// minimize the support there (ties go to the smallest `|t|`, then the
    /// positive one). The vector is unchanged since each such sum is zero on
    /// the columns of `A_S`.
    pub fn minimal_support(&self, g: &BipartiteGraph) -> IndicatorCombination {
        let mut best = self.clone();
        for comp in g.components() {
            let get = |c: &IndicatorCombination, v: &Vertex| -> i64 {
                match *v {
                    Vertex::Row(i) => c.row_coeffs.get(&i).copied().unwrap_or(0),
                    Vertex::Col(j) => c.col_coeffs.get(&j).copied().unwrap_or(0),
                }
            };
            let shift = |v: &Vertex, t: i64| match v {
                Vertex::Row(_) => t,
                Vertex::Col(_) => -t,
            };
            let mut candidates: Vec<i64> = comp
                .iter()
                .map(|v| -get(&best, v) * shift(v, 1))
                .collect();
            candidates.push(0);
            candidates.sort_by_key(|&t| (t.abs(), -t));
            candidates.dedup();
            let cost = |t: i64| comp.iter().filter(|v| get(&best, v) + shift(v, t) != 0).count();
            let t = candidates
                .iter()
                .copied()
                .min_by_key(|&t| (cost(t), t.abs(), -t))
                .unwrap();
            for v in &comp {
                let value = get(&best, v) + shift(v, t);
                let map = match v {
                    Vertex::Row(i) => best.row_coeffs.entry(*i),
                    Vertex::Col(j) => best.col_coeffs.entry(*j),
                };
                let slot = map.or_insert(0);
                *slot = value;
            }
        }
        best.row_coeffs.retain(|_, c| *c != 0);
        best.col_coeffs.retain(|_, c| *c != 0);
        debug_assert!(best.support() <= self.support());
        best
    }

    /// Renders e.g. `a_2 - b_4 - b_5 + a_4 + a_5` following the trace order.
    pub fn display_terms(&self) -> Vec<(String, i64)> {
        let mut out = Vec::new();
        let mut seen_rows = BTreeSet::new();
        let mut seen_cols = BTreeSet::new();
        for (a, b) in &self.trace {
            for i in a {
                if let Some(&c) = self.row_coeffs.get(i) {
                    if seen_rows.insert(*i) {
                        out.push((format!("a_{}", i + 1), c));
                    }
                }
            }
            for j in b {
                if let Some(&c) = self.col_coeffs.get(j) {
                    if seen_cols.insert(*j) {
                        out.push((format!("b_{}", j + 1), c));
                    }
                }
            }
        }
        for (&i, &c) in &self.row_coeffs {
            if seen_rows.insert(i) {
                out.push((format!("a_{}", i + 1), c));
            }
        }
        for (&j, &c) in &self.col_coeffs {
            if seen_cols.insert(j) {
                out.push((format!("b_{}", j + 1), c));
            }
        }
        out
    }
}

impl fmt::Display for IndicatorCombination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = self.display_terms();
        if terms.is_empty() {
            return write!(f, "0");
        }
        for (idx, (name, c)) in terms.iter().enumerate() {
            let mag = c.abs();
            let body = if mag == 1 { name.clone() } else { format!("{mag}{name}") };
            match (idx, *c < 0) {
                (0, false) => write!(f, "{body}")?,
                (0, true) => write!(f, "-{body}")?,
                (_, false) => write!(f, " + {body}")?,
                (_, true) => write!(f, " - {body}")?,
            }
        }
        Ok(())
    }
}

/// Runs the alternating row/column recursion starting from `C = A_1 × B_0`
/// and checks the result against `A_S` exactly.
pub fn indicator_combination(s: &IndexSet, c: &Clique) -> Result<IndicatorCombination> {
    let g = build_graph(s)?;
    let bound = g.m() + g.n() + 1;
    let mut trace: Vec<(Vec<usize>, Vec<usize>)> = Vec::new();
    let mut a_k: Vec<usize> = c.rows.clone();
    let mut b_prev: Vec<usize> = c.cols.clone();
    let mut history: Vec<Vec<usize>> = Vec::new();
    let mut row_coeffs = BTreeMap::new();
    let mut col_coeffs = BTreeMap::new();
    while !a_k.is_empty() {
        for (u, earlier) in history.iter().enumerate() {
            let v = history.len();
            if v - u >= 2 && earlier.iter().any(|x| a_k.contains(x)) {
                return Err(Error::NonTerminatingRecursion { u: u + 1, v: v + 1 });
            }
        }
        if history.len() > bound {
            return Err(Error::NonTerminatingRecursion {
                u: 1,
                v: history.len() + 1,
            });
        }
        let b_k: Vec<usize> = (0..g.n())
            .filter(|j| !b_prev.contains(j) && a_k.iter().any(|&i| g.has_edge(i, *j)))
            .collect();
        for &i in &a_k {
            *row_coeffs.entry(i).or_insert(0) += 1;
        }
        for &j in &b_k {
            *col_coeffs.entry(j).or_insert(0) -= 1;
        }
        let a_next: Vec<usize> = (0..g.m())
            .filter(|i| !a_k.contains(i) && b_k.iter().any(|&j| g.has_edge(*i, j)))
            .collect();
        trace.push((a_k.clone(), b_k.clone()));
        history.push(std::mem::replace(&mut a_k, a_next));
        b_prev = b_k;
    }
    row_coeffs.retain(|_, v: &mut i64| *v != 0);
    col_coeffs.retain(|_, v: &mut i64| *v != 0);
    let combo = IndicatorCombination {
        row_coeffs,
        col_coeffs,
        trace,
    };

    let a = build_a_matrix(s);
    let rows = RatMatrix::from_ints(&a.to_int_rows(), a.n_cols())?;
    let target: Vec<BigRational> = s
        .tuples()
        .iter()
        .map(|t| rat(i64::from(c.contains_cell(t[0], t[1]))))
        .collect();
    if rows.combine_rows(&combo.coefficient_vector(g.m(), g.n())) != target {
        return Err(Error::TheoremViolation(format!(
            "recursion for {c} does not reproduce its indicator"
        )));
    }
    debug_assert!(rowspan_contains(&rows, &target)?.is_some());
    Ok(combo)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chordal::is_doubly_chordal_bipartite;
    use crate::fixtures;
    use proptest::prelude::*;

    fn cl(rows: &[usize], cols: &[usize]) -> Clique {
        Clique {
            rows: rows.iter().map(|x| x - 1).collect(),
            cols: cols.iter().map(|x| x - 1).collect(),
        }
    }

    fn fix_d_named() -> [Clique; 5] {
        [
            cl(&[1], &[1, 2, 3]),
            cl(&[2], &[1, 2, 4, 5]),
            cl(&[1, 2, 3], &[1, 2]),
            cl(&[2, 4], &[4, 5]),
            cl(&[2, 4, 5], &[5]),
        ]
    }

    #[test]
    fn fix_d_cliques_and_intersections() {
        let s = fixtures::fix_d();
        let cliques = maximal_cliques(&s).unwrap();
        let mut expected = fix_d_named().to_vec();
        expected.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
        assert_eq!(cliques, expected);
        let mut ints: Vec<Clique> = maximal_intersections(&s)
            .unwrap()
            .into_iter()
            .map(|x| x.clique)
            .collect();
        ints.sort();
        let mut want = vec![
            cl(&[1], &[1, 2]),
            cl(&[2], &[1, 2]),
            cl(&[2], &[4, 5]),
            cl(&[2, 4], &[5]),
        ];
        want.sort();
        assert_eq!(ints, want);
    }

    #[test]
    fn fix_d_poset_levels_and_covers() {
        let p = build_poset(&fixtures::fix_d()).unwrap();
        let d = fix_d_named();
        let idx: Vec<usize> = d.iter().map(|c| p.index_of(c).unwrap()).collect();
        let levels: Vec<usize> = idx.iter().map(|&i| p.levels[i]).collect();
        assert_eq!(levels, vec![1, 1, 2, 2, 3]);
        let mut covers: Vec<(usize, usize)> = p
            .covers
            .iter()
            .map(|&(a, b)| {
                (
                    idx.iter().position(|&x| x == a).unwrap() + 1,
                    idx.iter().position(|&x| x == b).unwrap() + 1,
                )
            })
            .collect();
        covers.sort();
        assert_eq!(covers, vec![(1, 3), (2, 3), (2, 4), (4, 5)]);
        assert_eq!(p.h, 3);
    }

    #[test]
    fn fix_d_e_cliques() {
        let p = build_poset(&fixtures::fix_d()).unwrap();
        let d = fix_d_named();
        for (i, c) in d.iter().enumerate() {
            assert_eq!(&p.cliques[p.e_row(i).unwrap()], c);
        }
        let e_cols: Vec<&Clique> = (0..5).map(|j| &p.cliques[p.e_col(j).unwrap()]).collect();
        assert_eq!(e_cols, vec![&d[2], &d[2], &d[0], &d[3], &d[4]]);
    }

    #[test]
    fn full_grid_is_one_clique() {
        let s = fixtures::full(3, 2);
        let p = build_poset(&s).unwrap();
        assert_eq!(p.cliques, vec![cl(&[1, 2, 3], &[1, 2])]);
        assert!(p.covers.is_empty() && p.intersections.is_empty());
        assert_eq!((p.levels.clone(), p.h), (vec![1], 1));
        for i in 0..3 {
            assert_eq!(p.e_row(i).unwrap(), 0);
        }
        assert_eq!(p.e_col(1).unwrap(), 0);
    }

    #[test]
    fn fix_a_is_a_chain() {
        let s = fixtures::fix_a();
        let p = build_poset(&s).unwrap();
        let chain = [cl(&[1], &[1, 2, 3]), cl(&[1, 2], &[1, 2]), cl(&[1, 2, 3], &[1])];
        for (lvl, c) in chain.iter().enumerate() {
            assert_eq!(p.levels[p.index_of(c).unwrap()], lvl + 1);
        }
        let mut ints: Vec<Clique> = p.intersections.iter().map(|x| x.clique.clone()).collect();
        ints.sort();
        assert_eq!(ints, vec![cl(&[1], &[1, 2]), cl(&[1, 2], &[1])]);
    }

    #[test]
    fn fix_d_indicator_combinations() {
        let s = fixtures::fix_d();
        let g = build_graph(&s).unwrap();
        let d23 = indicator_combination(&s, &cl(&[2], &[1, 2])).unwrap();
        assert_eq!(d23.to_string(), "a_2 - b_4 - b_5 + a_4 + a_5");
        assert_eq!(
            d23.trace,
            vec![(vec![1], vec![3, 4]), (vec![3, 4], vec![])]
        );
        let d13 = indicator_combination(&s, &cl(&[1], &[1, 2])).unwrap();
        assert_eq!(d13.to_string(), "a_1 - b_3");
        let d45 = indicator_combination(&s, &cl(&[2, 4], &[5])).unwrap();
        assert_eq!(d45.minimal_support(&g).to_string(), "-a_5 + b_5");
        let d24 = indicator_combination(&s, &cl(&[2], &[4, 5])).unwrap();
        let min = d24.minimal_support(&g);
        assert_eq!(min.row_coeffs, BTreeMap::from([(3, -1), (4, -1)]));
        assert_eq!(min.col_coeffs, BTreeMap::from([(3, 1), (4, 1)]));
    }

    fn doubly_chordal_set() -> impl Strategy<Value = IndexSet> {
        crate::chordal::tests_support::random_graph().prop_filter_map("doubly chordal", |g| {
            if is_doubly_chordal_bipartite(&g).is_err() {
                return None;
            }
            let tuples = g.edges().into_iter().map(|(i, j)| vec![i, j]).collect();
            IndexSet::new(vec![g.m(), g.n()], tuples).ok()
        })
    }

    proptest! {
        #[test]
        fn poset_invariants(s in doubly_chordal_set()) {
            let p = build_poset(&s).unwrap();
            let k = p.cliques.len();
            for a in 0..k {
                for b in 0..k {
                    let rows = is_subset(&p.cliques[a].rows, &p.cliques[b].rows);
                    let cols = is_subset(&p.cliques[b].cols, &p.cliques[a].cols);
                    prop_assert_eq!(rows, cols);
                }
            }
            for &(a, b) in &p.covers {
                prop_assert_eq!(p.levels[a] + 1, p.levels[b]);
            }
            // Level interpolation along rows.
            for i in 0..p.m() {
                let lv: BTreeSet<usize> = (0..k).filter(|&c| p.cliques[c].rows.contains(&i)).map(|c| p.levels[c]).collect();
                let lo = *lv.iter().next().unwrap();
                let hi = *lv.iter().last().unwrap();
                prop_assert_eq!(lv.len(), hi - lo + 1);
            }
            for x in &p.intersections {
                let combo = indicator_combination(&s, &x.clique).unwrap();
                let g = p.graph();
                let min = combo.minimal_support(g);
                let a = build_a_matrix(&s);
                let rm = RatMatrix::from_ints(&a.to_int_rows(), a.n_cols()).unwrap();
                prop_assert_eq!(
                    rm.combine_rows(&min.coefficient_vector(p.m(), p.n())),
                    rm.combine_rows(&combo.coefficient_vector(p.m(), p.n()))
                );
            }
        }
    }
}

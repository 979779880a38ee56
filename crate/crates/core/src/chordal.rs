//! Bipartite graphs of 2-way models and doubly chordal bipartite recognition.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::IndexSet;

/// Bipartite graph on rows `0..m` and columns `0..n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BipartiteGraph {
    m: usize,
    n: usize,
    adj: Vec<Vec<bool>>,
}

/// A vertex of a bipartite graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Vertex {
    Row(usize),
    Col(usize),
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Vertex::Row(i) => write!(f, "r{}", i + 1),
            Vertex::Col(j) => write!(f, "c{}", j + 1),
        }
    }
}

impl BipartiteGraph {
    pub fn new(m: usize, n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut adj = vec![vec![false; n]; m];
        for &(i, j) in edges {
            if i >= m || j >= n {
                return Err(Error::InvalidArgument(format!("edge ({i},{j}) out of range")));
            }
            adj[i][j] = true;
        }
        if let Some(i) = (0..m).find(|&i| !adj[i].iter().any(|&b| b)) {
            return Err(Error::InvalidArgument(format!("row vertex {} is isolated", i + 1)));
        }
        if let Some(j) = (0..n).find(|&j| !adj.iter().any(|r| r[j])) {
            return Err(Error::InvalidArgument(format!("column vertex {} is isolated", j + 1)));
        }
        Ok(BipartiteGraph { m, n, adj })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.adj[i][j]
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.m)
            .flat_map(|i| (0..self.n).filter(move |&j| self.adj[i][j]).map(move |j| (i, j)))
            .collect()
    }

    pub fn row_neighbors(&self, i: usize) -> Vec<usize> {
        (0..self.n).filter(|&j| self.adj[i][j]).collect()
    }

    pub fn col_neighbors(&self, j: usize) -> Vec<usize> {
        (0..self.m).filter(|&i| self.adj[i][j]).collect()
    }

    // Unified vertex ids: rows are 0..m, columns m..m+n.
    fn id(&self, v: Vertex) -> usize {
        match v {
            Vertex::Row(i) => i,
            Vertex::Col(j) => self.m + j,
        }
    }

    fn vertex(&self, id: usize) -> Vertex {
        if id < self.m {
            Vertex::Row(id)
        } else {
            Vertex::Col(id - self.m)
        }
    }

    fn adjacent(&self, a: usize, b: usize) -> bool {
        match (self.vertex(a), self.vertex(b)) {
            (Vertex::Row(i), Vertex::Col(j)) | (Vertex::Col(j), Vertex::Row(i)) => self.adj[i][j],
            _ => false,
        }
    }

    fn neighbors(&self, id: usize) -> Vec<usize> {
        match self.vertex(id) {
            Vertex::Row(i) => self.row_neighbors(i).into_iter().map(|j| self.m + j).collect(),
            Vertex::Col(j) => self.col_neighbors(j),
        }
    }

    /// Connected components as sorted vertex lists.
    pub fn components(&self) -> Vec<Vec<Vertex>> {
        let total = self.m + self.n;
        let mut comp = vec![usize::MAX; total];
        let mut out = Vec::new();
        for start in 0..total {
            if comp[start] != usize::MAX {
                continue;
            }
            let label = out.len();
            let mut stack = vec![start];
            comp[start] = label;
            let mut members = Vec::new();
            while let Some(v) = stack.pop() {
                members.push(v);
                for w in self.neighbors(v) {
                    if comp[w] == usize::MAX {
                        comp[w] = label;
                        stack.push(w);
                    }
                }
            }
            members.sort_unstable();
            out.push(members.into_iter().map(|v| self.vertex(v)).collect());
        }
        out
    }

    pub fn is_forest(&self) -> bool {
        self.edges().len() + self.components().len() == self.m + self.n
    }

    pub fn row_degrees(&self) -> Vec<usize> {
        self.adj.iter().map(|r| r.iter().filter(|&&b| b).count()).collect()
    }

    pub fn col_degrees(&self) -> Vec<usize> {
        (0..self.n).map(|j| self.adj.iter().filter(|r| r[j]).count()).collect()
    }
}

pub fn build_graph(s: &IndexSet) -> Result<BipartiteGraph> {
    s.require_k(2)?;
    let edges: Vec<(usize, usize)> = s.tuples().iter().map(|t| (t[0], t[1])).collect();
    BipartiteGraph::new(s.dims()[0], s.dims()[1], &edges)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum WitnessKind {
    InducedCycle,
    DoubleSquare,
}

/// A forbidden induced subgraph. For cycles the vertices are listed in cycle
/// order; for double squares the shared edge comes first, then the two
/// squares' remaining row/column pairs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChordalityWitness {
    pub kind: WitnessKind,
    pub vertices: Vec<Vertex>,
}

impl fmt::Display for ChordalityWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let vs: Vec<String> = self.vertices.iter().map(ToString::to_string).collect();
        match self.kind {
            WitnessKind::InducedCycle => {
                write!(f, "induced {}-cycle {}", self.vertices.len(), vs.join(" - "))
            }
            WitnessKind::DoubleSquare => write!(f, "induced double square on {}", vs.join(", ")),
        }
    }
}

impl ChordalityWitness {
    /// Re-checks that the listed vertices induce the claimed subgraph.
    pub fn verify(&self, g: &BipartiteGraph) -> bool {
        let ids: Vec<usize> = self.vertices.iter().map(|&v| g.id(v)).collect();
        let mut sorted = ids.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != ids.len() || ids.iter().any(|&v| v >= g.m + g.n) {
            return false;
        }
        match self.kind {
            WitnessKind::InducedCycle => {
                let len = ids.len();
                len >= 6
                    && (0..len).all(|a| {
                        (a + 1..len).all(|b| {
                            let consecutive = b == a + 1 || (a == 0 && b == len - 1);
                            g.adjacent(ids[a], ids[b]) == consecutive
                        })
                    })
            }
            WitnessKind::DoubleSquare => is_double_square(g, &ids),
        }
    }
}

fn is_double_square(g: &BipartiteGraph, ids: &[usize]) -> bool {
    if ids.len() != 6 {
        return false;
    }
    let rows: Vec<usize> = ids.iter().copied().filter(|&v| v < g.m).collect();
    let cols: Vec<usize> = ids.iter().copied().filter(|&v| v >= g.m).collect();
    if rows.len() != 3 || cols.len() != 3 {
        return false;
    }
    let mut missing = Vec::new();
    for &r in &rows {
        for &c in &cols {
            if !g.adjacent(r, c) {
                missing.push((r, c));
            }
        }
    }
    missing.len() == 2 && missing[0].0 != missing[1].0 && missing[0].1 != missing[1].1
}

/// Searches for a chordless cycle of length at least 6 whose smallest vertex
/// is `start`.
fn long_cycle_from(g: &BipartiteGraph, start: usize) -> Option<Vec<usize>> {
    fn extend(g: &BipartiteGraph, start: usize, path: &mut Vec<usize>) -> Option<Vec<usize>> {
        let last = *path.last().unwrap();
        for w in g.neighbors(last) {
            if w <= start || path.contains(&w) {
                continue;
            }
            // No chords to internal vertices of the path.
            if path.len() > 2 && path[1..path.len() - 1].iter().any(|&p| g.adjacent(p, w)) {
                continue;
            }
            path.push(w);
            if path.len() >= 3 && g.adjacent(start, w) {
                if path.len() >= 6 {
                    return Some(path.clone());
                }
            } else if let Some(c) = extend(g, start, path) {
                return Some(c);
            }
            path.pop();
        }
        None
    }
    extend(g, start, &mut vec![start])
}

fn find_long_cycle(g: &BipartiteGraph) -> Option<ChordalityWitness> {
    (0..g.m + g.n).find_map(|s| {
        long_cycle_from(g, s).map(|c| ChordalityWitness {
            kind: WitnessKind::InducedCycle,
            vertices: c.into_iter().map(|v| g.vertex(v)).collect(),
        })
    })
}

fn find_double_square(g: &BipartiteGraph) -> Option<ChordalityWitness> {
    for (r, c) in g.edges() {
        // Squares through the edge (r, c): (r1, c1) with r1 ~ c, r ~ c1, r1 ~ c1.
        let squares: Vec<(usize, usize)> = g
            .col_neighbors(c)
            .into_iter()
            .filter(|&r1| r1 != r)
            .flat_map(|r1| {
                g.row_neighbors(r)
                    .into_iter()
                    .filter(move |&c1| c1 != c && g.has_edge(r1, c1))
                    .map(move |c1| (r1, c1))
            })
            .collect();
        for (x, &(r1, c1)) in squares.iter().enumerate() {
            for &(r2, c2) in &squares[x + 1..] {
                if r1 != r2 && c1 != c2 && !g.has_edge(r1, c2) && !g.has_edge(r2, c1) {
                    return Some(ChordalityWitness {
                        kind: WitnessKind::DoubleSquare,
                        vertices: vec![
                            Vertex::Row(r),
                            Vertex::Col(c),
                            Vertex::Row(r1),
                            Vertex::Col(c1),
                            Vertex::Row(r2),
                            Vertex::Col(c2),
                        ],
                    });
                }
            }
        }
    }
    None
}

/// `Ok(())` when doubly chordal bipartite, otherwise the first forbidden
/// subgraph found (long cycles are searched before double squares).
pub fn is_doubly_chordal_bipartite(g: &BipartiteGraph) -> std::result::Result<(), ChordalityWitness> {
    let witness = find_long_cycle(g).or_else(|| find_double_square(g));
    match witness {
        Some(w) => {
            assert!(w.verify(g), "witness {w} does not re-verify");
            Err(w)
        }
        None => Ok(()),
    }
}

pub fn ml_degree_one_2way(s: &IndexSet) -> Result<bool> {
    Ok(is_doubly_chordal_bipartite(&build_graph(s)?).is_ok())
}

/// Fails with [`Error::NotDoublyChordal`] when the 2-way set does not have
/// ML-degree one.
pub fn require_ml_degree_one(s: &IndexSet) -> Result<BipartiteGraph> {
    let g = build_graph(s)?;
    is_doubly_chordal_bipartite(&g).map_err(Error::NotDoublyChordal)?;
    Ok(g)
}

#[cfg(test)]
pub(crate) mod tests_support {
    use super::BipartiteGraph;
    use proptest::prelude::*;

    pub(crate) fn random_graph() -> impl Strategy<Value = BipartiteGraph> {
        (1usize..5, 1usize..5)
            .prop_flat_map(|(m, n)| prop::collection::vec(any::<bool>(), m * n).prop_map(move |b| (m, n, b)))
            .prop_filter_map("no isolated vertices", |(m, n, bits)| {
                let edges: Vec<(usize, usize)> = (0..m * n)
                    .filter(|&x| bits[x])
                    .map(|x| (x / n, x % n))
                    .collect();
                BipartiteGraph::new(m, n, &edges).ok()
            })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use super::tests_support::random_graph;
    use crate::fixtures;
    use proptest::prelude::*;

    #[test]
    fn fix_a_graph_shape() {
        let g = build_graph(&fixtures::fix_a()).unwrap();
        assert_eq!((g.m(), g.n()), (3, 3));
        assert_eq!(g.edges().len(), 6);
        assert_eq!(g.row_degrees(), vec![3, 2, 1]);
    }

    #[test]
    fn fix_d_graph_shape() {
        let g = build_graph(&fixtures::fix_d()).unwrap();
        assert_eq!(g.m() + g.n(), 10);
        assert_eq!(g.edges().len(), 12);
        assert!(is_doubly_chordal_bipartite(&g).is_ok());
        assert!(brute_force(&g));
    }

    #[test]
    fn k22_is_a_four_cycle() {
        let g = build_graph(&fixtures::full(2, 2)).unwrap();
        assert_eq!(g.edges().len(), 4);
        assert!(is_doubly_chordal_bipartite(&g).is_ok());
    }

    #[test]
    fn c6_is_rejected_with_cycle() {
        let g = build_graph(&fixtures::c6()).unwrap();
        let w = is_doubly_chordal_bipartite(&g).unwrap_err();
        assert_eq!(w.kind, WitnessKind::InducedCycle);
        assert_eq!(w.vertices.len(), 6);
        assert!(!ml_degree_one_2way(&fixtures::c6()).unwrap());
    }

    #[test]
    fn double_square_is_rejected() {
        let g = build_graph(&fixtures::double_square()).unwrap();
        assert_eq!(g.edges().len(), 7);
        let w = is_doubly_chordal_bipartite(&g).unwrap_err();
        assert_eq!(w.kind, WitnessKind::DoubleSquare);
        assert!(w.verify(&g));
    }

    #[test]
    fn forest_factor_is_doubly_chordal() {
        assert!(ml_degree_one_2way(&fixtures::fix_b1()).unwrap());
        assert!(build_graph(&fixtures::fix_b1()).unwrap().is_forest());
    }

    #[test]
    fn three_way_sets_are_rejected() {
        assert!(matches!(
            build_graph(&fixtures::fix_b()),
            Err(Error::WrongArity { .. })
        ));
    }

    /// Oracle: scan every vertex subset for an induced long cycle or double square.
    pub(crate) fn brute_force(g: &BipartiteGraph) -> bool {
        let total = g.m + g.n;
        for mask in 0u32..(1 << total) {
            let ids: Vec<usize> = (0..total).filter(|&v| mask >> v & 1 == 1).collect();
            if ids.len() < 6 {
                continue;
            }
            if ids.len() == 6 && is_double_square(g, &ids) {
                return false;
            }
            let degree_two = ids
                .iter()
                .all(|&a| ids.iter().filter(|&&b| g.adjacent(a, b)).count() == 2);
            if degree_two && induced_connected(g, &ids) {
                return false;
            }
        }
        true
    }

    fn induced_connected(g: &BipartiteGraph, ids: &[usize]) -> bool {
        let mut seen = vec![ids[0]];
        let mut stack = vec![ids[0]];
        while let Some(v) = stack.pop() {
            for &w in ids {
                if g.adjacent(v, w) && !seen.contains(&w) {
                    seen.push(w);
                    stack.push(w);
                }
            }
        }
        seen.len() == ids.len()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(400))]

        #[test]
        fn recognizer_matches_brute_force(g in random_graph()) {
            let fast = is_doubly_chordal_bipartite(&g);
            if let Err(w) = &fast {
                prop_assert!(w.verify(&g));
            }
            prop_assert_eq!(fast.is_ok(), brute_force(&g));
        }

        #[test]
        fn completion_is_doubly_chordal(g in random_graph()) {
            let all: Vec<(usize, usize)> = (0..g.m()).flat_map(|i| (0..g.n()).map(move |j| (i, j))).collect();
            let k = BipartiteGraph::new(g.m(), g.n(), &all).unwrap();
            prop_assert!(is_doubly_chordal_bipartite(&k).is_ok());
        }
    }
}

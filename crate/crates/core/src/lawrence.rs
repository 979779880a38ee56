//! Lawrence lifts of 2-way models, the star-forest criterion for their
//! factorization, and spanning-tree ML-degree predictions.

use std::collections::HashMap;

use serde::Serialize;

use crate::chordal::{build_graph, BipartiteGraph};
use crate::ctfp::find_ctfp;
use crate::error::{Error, Result};
use crate::linalg::{rowspans_equal, RatMatrix};
use crate::model::{build_a_matrix, IndexSet, MultipartitionMatrix};

/// `(T 0; 0 T; I I)` for a `d × n` matrix `T`.
pub fn lawrence_lift(t: &[Vec<i64>], n: usize) -> Result<Vec<Vec<i64>>> {
    if t.iter().any(|r| r.len() != n) {
        return Err(Error::DimensionMismatch("ragged matrix".into()));
    }
    let mut out = Vec::with_capacity(2 * t.len() + n);
    for r in t {
        let mut row = r.clone();
        row.extend(std::iter::repeat_n(0, n));
        out.push(row);
    }
    for r in t {
        let mut row = vec![0; n];
        row.extend_from_slice(r);
        out.push(row);
    }
    for i in 0..n {
        let mut row = vec![0; 2 * n];
        row[i] = 1;
        row[n + i] = 1;
        out.push(row);
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct LawrenceLift {
    pub source: IndexSet,
    pub s_prime: IndexSet,
    /// The modified lift, i.e. the A-matrix of `s_prime`.
    pub matrix: MultipartitionMatrix,
}

/// Builds `S′ = {(a_t, b_t, t)} ∪ {(a_t+m, b_t+n, t)}` and checks that its
/// A-matrix spans the same rows as the plain lift of `A_S`.
pub fn modified_lawrence_lift(s: &IndexSet) -> Result<LawrenceLift> {
    s.require_k(2)?;
    let (m, n) = (s.dims()[0], s.dims()[1]);
    let size = s.len();
    let mut tuples = Vec::with_capacity(2 * size);
    for (t, pair) in s.tuples().iter().enumerate() {
        tuples.push(vec![pair[0], pair[1], t]);
        tuples.push(vec![pair[0] + m, pair[1] + n, t]);
    }
    let s_prime = IndexSet::new(vec![2 * m, 2 * n, size], tuples)?;
    let matrix = build_a_matrix(&s_prime);
    let plain = lawrence_lift(&build_a_matrix(s).to_int_rows(), size)?;
    let same = rowspans_equal(
        &RatMatrix::from_ints(&plain, 2 * size)?,
        &RatMatrix::from_ints(&matrix.to_int_rows(), 2 * size)?,
    )?;
    if !same {
        return Err(Error::TheoremViolation(
            "modified lift does not span the rows of the Lawrence lift".into(),
        ));
    }
    Ok(LawrenceLift {
        source: s.clone(),
        s_prime,
        matrix,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum StarSide {
    Left,
    Right,
    Either,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct StarForest {
    pub holds: bool,
    /// Side holding the centers; `None` when the criterion fails.
    pub side: Option<StarSide>,
}

/// Every component is a star and all centers sit on one side.
pub fn is_star_forest_same_side(g: &BipartiteGraph) -> StarForest {
    let left = g.col_degrees().iter().all(|&d| d <= 1);
    let right = g.row_degrees().iter().all(|&d| d <= 1);
    let side = match (left, right) {
        (true, true) => Some(StarSide::Either),
        (true, false) => Some(StarSide::Left),
        (false, true) => Some(StarSide::Right),
        (false, false) => None,
    };
    StarForest {
        holds: side.is_some(),
        side,
    }
}

/// The star-forest answer, cross-checked against a direct search on `S′`.
pub fn lift_is_ctfp(s: &IndexSet) -> Result<bool> {
    let combinatorial = is_star_forest_same_side(&build_graph(s)?).holds;
    let lift = modified_lawrence_lift(s)?;
    let searched = !find_ctfp(&lift.s_prime)?.is_empty();
    if combinatorial != searched {
        return Err(Error::TheoremViolation(format!(
            "star-forest criterion says {combinatorial} but the split search says {searched}"
        )));
    }
    Ok(combinatorial)
}

/// Number of spanning trees by deletion-contraction on the multigraph.
type TreeMemo = HashMap<(usize, Vec<(usize, usize)>), u64>;

pub fn spanning_tree_count(g: &BipartiteGraph) -> u64 {
    let edges: Vec<(usize, usize)> = g.edges().into_iter().map(|(i, j)| (i, g.m() + j)).collect();
    let mut memo = HashMap::new();
    count_trees(g.m() + g.n(), edges, &mut memo)
}

fn normalize(vertices: usize, edges: Vec<(usize, usize)>) -> (usize, Vec<(usize, usize)>) {
    let mut edges: Vec<(usize, usize)> = edges
        .into_iter()
        .filter(|(u, v)| u != v)
        .map(|(u, v)| (u.min(v), u.max(v)))
        .collect();
    edges.sort_unstable();
    (vertices, edges)
}

fn count_trees(
    vertices: usize,
    edges: Vec<(usize, usize)>,
    memo: &mut TreeMemo,
) -> u64 {
    let key = normalize(vertices, edges);
    if let Some(&c) = memo.get(&key) {
        return c;
    }
    let (vertices, edges) = key.clone();
    let result = match edges.first() {
        None => u64::from(vertices == 1),
        Some(&(u, v)) => {
            let rest: Vec<(usize, usize)> = edges[1..].to_vec();
            let deleted = count_trees(vertices, rest.clone(), memo);
            // Contract v into u and move the last vertex into v's slot.
            let last = vertices - 1;
            let relabel = |x: usize| {
                let x = if x == v { u } else { x };
                if x == last { v } else { x }
            };
            let contracted: Vec<(usize, usize)> =
                rest.iter().map(|&(a, b)| (relabel(a), relabel(b))).collect();
            deleted + count_trees(vertices - 1, contracted, memo)
        }
    };
    memo.insert(key, result);
    result
}

/// ML-degree of the lift: 1 on forests, otherwise the spanning-tree count of
/// a connected graph.
pub fn lift_ml_degree_prediction(s: &IndexSet) -> Result<u64> {
    let g = build_graph(s)?;
    if g.is_forest() {
        return Ok(1);
    }
    if g.components().len() > 1 {
        return Err(Error::Disconnected(
            "spanning-tree prediction is only stated for connected graphs".into(),
        ));
    }
    Ok(spanning_tree_count(&g))
}

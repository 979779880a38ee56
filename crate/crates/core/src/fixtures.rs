//! Worked examples used by tests, the CLI and the acceptance suite.

use crate::model::IndexSet;

fn set(tuples: &[&[usize]]) -> IndexSet {
    IndexSet::from_one_based_tuples(tuples).expect("fixture is a valid index set")
}

/// Staircase on [3]×[3].
pub fn fix_a() -> IndexSet {
    set(&[&[1, 1], &[1, 2], &[1, 3], &[2, 1], &[2, 2], &[3, 1]])
}

pub fn fix_b1() -> IndexSet {
    set(&[&[1, 1], &[1, 3], &[2, 1], &[2, 2], &[3, 3]])
}

pub fn fix_b2() -> IndexSet {
    set(&[&[1, 1], &[1, 3], &[2, 1], &[3, 2], &[3, 3]])
}

/// The glue of [`fix_b1`] and [`fix_b2`] along their shared axis.
pub fn fix_b() -> IndexSet {
    set(&[
        &[1, 1, 1],
        &[1, 1, 3],
        &[1, 3, 2],
        &[1, 3, 3],
        &[2, 1, 1],
        &[2, 1, 3],
        &[2, 2, 1],
        &[3, 3, 2],
        &[3, 3, 3],
    ])
}

/// A 3-way set that is not a coordinate toric fiber product.
pub fn fix_c() -> IndexSet {
    set(&[&[1, 2, 1], &[1, 2, 2], &[1, 1, 2], &[2, 2, 2]])
}

/// Running 5×5 example with five maximal cliques.
pub fn fix_d() -> IndexSet {
    set(&[
        &[1, 1],
        &[1, 2],
        &[1, 3],
        &[2, 1],
        &[2, 2],
        &[2, 4],
        &[2, 5],
        &[3, 1],
        &[3, 2],
        &[4, 4],
        &[4, 5],
        &[5, 5],
    ])
}

/// A tree: column 1 joined to rows 1, 2, 3 and row 2 joined to column 2.
pub fn fix_e() -> IndexSet {
    set(&[&[1, 1], &[2, 1], &[2, 2], &[3, 1]])
}

/// No-three-way interaction on three binary variables, with each pair of
/// variables encoded as one 4-state axis via `(i, j) ↦ 2(i−1)+j`.
pub fn fix_f() -> IndexSet {
    set(&[
        &[1, 1, 1],
        &[1, 2, 2],
        &[2, 1, 3],
        &[2, 2, 4],
        &[3, 3, 1],
        &[3, 4, 2],
        &[4, 3, 3],
        &[4, 4, 4],
    ])
}

/// Hierarchical design matrix of the no-three-way model. Columns are the
/// cells 111, 112, 121, 122, 211, 212, 221, 222; rows are the (x1,x2),
/// (x1,x3) and (x2,x3) margins.
pub fn no_three_way_design() -> Vec<Vec<i64>> {
    let cells: Vec<[usize; 3]> = (0..8).map(|c| [c >> 2 & 1, c >> 1 & 1, c & 1]).collect();
    let mut rows = Vec::new();
    for (p, q) in [(0, 1), (0, 2), (1, 2)] {
        for a in 0..2 {
            for b in 0..2 {
                rows.push(
                    cells
                        .iter()
                        .map(|x| i64::from(x[p] == a && x[q] == b))
                        .collect(),
                );
            }
        }
    }
    rows
}

/// Chordless 6-cycle.
pub fn c6() -> IndexSet {
    set(&[&[1, 1], &[1, 2], &[2, 2], &[2, 3], &[3, 3], &[3, 1]])
}

/// Two 4-cycles sharing the edge (1,1).
pub fn double_square() -> IndexSet {
    set(&[&[1, 1], &[1, 2], &[2, 1], &[2, 2], &[1, 3], &[3, 1], &[3, 3]])
}

pub fn full(m: usize, n: usize) -> IndexSet {
    let tuples = (0..m).flat_map(|i| (0..n).map(move |j| vec![i, j])).collect();
    IndexSet::new(vec![m, n], tuples).expect("full grid is valid")
}

pub fn full3(n1: usize, n2: usize, n3: usize) -> IndexSet {
    let mut tuples = Vec::new();
    for i in 0..n1 {
        for j in 0..n2 {
            for k in 0..n3 {
                tuples.push(vec![i, j, k]);
            }
        }
    }
    IndexSet::new(vec![n1, n2, n3], tuples).expect("full grid is valid")
}

/// Looks up a fixture by its command-line name.
pub fn by_name(name: &str) -> Option<IndexSet> {
    Some(match name.to_ascii_lowercase().as_str() {
        "fix-a" | "a" => fix_a(),
        "fix-b" | "b" => fix_b(),
        "fix-b1" | "b1" => fix_b1(),
        "fix-b2" | "b2" => fix_b2(),
        "fix-c" | "c" => fix_c(),
        "fix-d" | "d" => fix_d(),
        "fix-e" | "e" => fix_e(),
        "fix-f" | "f" => fix_f(),
        "c6" => c6(),
        "double-square" => double_square(),
        "k22" => full(2, 2),
        "k23" => full(2, 3),
        _ => return None,
    })
}

pub const NAMES: &[&str] = &[
    "fix-a",
    "fix-b",
    "fix-b1",
    "fix-b2",
    "fix-c",
    "fix-d",
    "fix-e",
    "fix-f",
    "c6",
    "double-square",
    "k22",
    "k23",
];

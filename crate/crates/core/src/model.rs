//! Index sets, star matrices and multipartition matrices.
//!
//! States are 0-based everywhere inside the crate. The JSON forms and all
//! user-facing labels are 1-based.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The support `S ⊂ [n_1] × … × [n_k]` of a k-way quasi-independence model.
///
/// Tuples are kept sorted lexicographically and distinct, and every state of
/// every axis is used by at least one tuple.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "IndexSetJson", into = "IndexSetJson")]
pub struct IndexSet {
    dims: Vec<usize>,
    tuples: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct IndexSetJson {
    dims: Vec<usize>,
    tuples: Vec<Vec<usize>>,
}

impl TryFrom<IndexSetJson> for IndexSet {
    type Error = Error;

    fn try_from(json: IndexSetJson) -> Result<Self> {
        IndexSet::from_one_based(json.dims, json.tuples)
    }
}

impl From<IndexSet> for IndexSetJson {
    fn from(set: IndexSet) -> Self {
        IndexSetJson {
            tuples: set.one_based_tuples(),
            dims: set.dims,
        }
    }
}

/// Result of [`IndexSet::trim`]: the renumbered set plus, per axis, the
/// original state of each new state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trimmed {
    pub set: IndexSet,
    pub states: Vec<Vec<usize>>,
}

impl IndexSet {
    /// Builds an index set from 0-based tuples. Rejects duplicates, states out
    /// of range and unused states.
    pub fn new(dims: Vec<usize>, mut tuples: Vec<Vec<usize>>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::InvalidIndexSet("k must be positive".into()));
        }
        if let Some(axis) = dims.iter().position(|&d| d == 0) {
            return Err(Error::InvalidIndexSet(format!(
                "axis {} has no states",
                axis + 1
            )));
        }
        let k = dims.len();
        let mut used: Vec<Vec<bool>> = dims.iter().map(|&d| vec![false; d]).collect();
        for t in &tuples {
            if t.len() != k {
                return Err(Error::InvalidIndexSet(format!(
                    "tuple {} has length {}, expected {k}",
                    fmt_tuple(t),
                    t.len()
                )));
            }
            for (axis, &s) in t.iter().enumerate() {
                if s >= dims[axis] {
                    return Err(Error::InvalidIndexSet(format!(
                        "tuple {} has state {} on axis {} but the axis has {} states",
                        fmt_tuple(t),
                        s + 1,
                        axis + 1,
                        dims[axis]
                    )));
                }
                used[axis][s] = true;
            }
        }
        tuples.sort();
        if let Some(w) = tuples.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidIndexSet(format!(
                "duplicate tuple {}",
                fmt_tuple(&w[0])
            )));
        }
        for (axis, states) in used.iter().enumerate() {
            if let Some(s) = states.iter().position(|&u| !u) {
                return Err(Error::InvalidIndexSet(format!(
                    "state {} of axis {} is unused (trim the set first)",
                    s + 1,
                    axis + 1
                )));
            }
        }
        Ok(IndexSet { dims, tuples })
    }

    /// Builds an index set from 1-based tuples, as they appear in files.
    pub fn from_one_based(dims: Vec<usize>, tuples: Vec<Vec<usize>>) -> Result<Self> {
        let mut zero = Vec::with_capacity(tuples.len());
        for t in tuples {
            if t.contains(&0) {
                return Err(Error::InvalidIndexSet(format!(
                    "tuple {t:?} contains state 0; states are 1-based"
                )));
            }
            zero.push(t.into_iter().map(|s| s - 1).collect());
        }
        IndexSet::new(dims, zero)
    }

    /// Convenience for literal fixtures: 1-based tuples with dims inferred
    /// from the largest state per axis.
    pub fn from_one_based_tuples(tuples: &[&[usize]]) -> Result<Self> {
        let k = tuples.first().map_or(0, |t| t.len());
        let mut dims = vec![0; k];
        for t in tuples {
            for (axis, &s) in t.iter().enumerate().take(k) {
                dims[axis] = dims[axis].max(s);
            }
        }
        IndexSet::from_one_based(dims, tuples.iter().map(|t| t.to_vec()).collect())
    }

    /// Renumbers the used states of each axis to `0..count`, restoring
    /// surjectivity. Duplicates are merged.
    pub fn trim(k: usize, tuples: &[Vec<usize>]) -> Result<Trimmed> {
        if tuples.is_empty() {
            return Err(Error::InvalidIndexSet("cannot trim an empty set".into()));
        }
        let mut states: Vec<Vec<usize>> = vec![Vec::new(); k];
        for t in tuples {
            if t.len() != k {
                return Err(Error::InvalidIndexSet(format!(
                    "tuple {} has length {}, expected {k}",
                    fmt_tuple(t),
                    t.len()
                )));
            }
            for (axis, &s) in t.iter().enumerate() {
                states[axis].push(s);
            }
        }
        for s in &mut states {
            s.sort_unstable();
            s.dedup();
        }
        let mut renumbered: Vec<Vec<usize>> = tuples
            .iter()
            .map(|t| {
                t.iter()
                    .enumerate()
                    .map(|(axis, s)| states[axis].binary_search(s).unwrap())
                    .collect()
            })
            .collect();
        renumbered.sort();
        renumbered.dedup();
        let dims = states.iter().map(Vec::len).collect();
        Ok(Trimmed {
            set: IndexSet::new(dims, renumbered)?,
            states,
        })
    }

    pub fn k(&self) -> usize {
        self.dims.len()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn tuples(&self) -> &[Vec<usize>] {
        &self.tuples
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn contains(&self, tuple: &[usize]) -> bool {
        self.position(tuple).is_some()
    }

    /// Column index of `tuple` in the lexicographic column order.
    pub fn position(&self, tuple: &[usize]) -> Option<usize> {
        self.tuples
            .binary_search_by(|t| t.as_slice().cmp(tuple))
            .ok()
    }

    pub fn one_based_tuples(&self) -> Vec<Vec<usize>> {
        self.tuples
            .iter()
            .map(|t| t.iter().map(|s| s + 1).collect())
            .collect()
    }

    /// Reorders axes: axis `q` of the result is axis `perm[q]` of `self`.
    pub fn permute_axes(&self, perm: &[usize]) -> Result<IndexSet> {
        let mut seen = vec![false; self.k()];
        if perm.len() != self.k() {
            return Err(Error::InvalidArgument(format!(
                "permutation has length {}, expected {}",
                perm.len(),
                self.k()
            )));
        }
        for &p in perm {
            if p >= self.k() || std::mem::replace(&mut seen[p], true) {
                return Err(Error::InvalidArgument(format!(
                    "{perm:?} is not a permutation"
                )));
            }
        }
        let dims = perm.iter().map(|&p| self.dims[p]).collect();
        let tuples = self
            .tuples
            .iter()
            .map(|t| perm.iter().map(|&p| t[p]).collect())
            .collect();
        IndexSet::new(dims, tuples)
    }

    pub(crate) fn require_k(&self, expected: usize) -> Result<()> {
        if self.k() != expected {
            return Err(Error::WrongArity {
                expected,
                actual: self.k(),
            });
        }
        Ok(())
    }
}

impl fmt::Display for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (idx, t) in self.tuples.iter().enumerate() {
            if idx > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", fmt_tuple(t))?;
        }
        write!(f, "}}")
    }
}

/// Formats a 0-based tuple 1-based, e.g. `(1,2,1)`.
pub fn fmt_tuple(t: &[usize]) -> String {
    let parts: Vec<String> = t.iter().map(|s| (s + 1).to_string()).collect();
    format!("({})", parts.join(","))
}

/// Row label of `state` on `axis`: `a_i`, `b_j`, `c_l`, … (1-based).
pub fn axis_row_label(axis: usize, state: usize) -> String {
    if axis < 26 {
        format!("{}_{}", (b'a' + axis as u8) as char, state + 1)
    } else {
        format!("x{}_{}", axis + 1, state + 1)
    }
}

/// The 0/star grid of a 2-way model.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StarMatrix {
    m: usize,
    n: usize,
    support: Vec<Vec<bool>>,
}

impl StarMatrix {
    pub fn new(support: Vec<Vec<bool>>) -> Result<Self> {
        let m = support.len();
        let n = support.first().map_or(0, Vec::len);
        if m == 0 || n == 0 {
            return Err(Error::InvalidIndexSet("star matrix must be nonempty".into()));
        }
        if support.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidIndexSet("star matrix is not rectangular".into()));
        }
        if let Some(i) = support.iter().position(|r| !r.iter().any(|&b| b)) {
            return Err(Error::InvalidIndexSet(format!("row {} is empty", i + 1)));
        }
        if let Some(j) = (0..n).find(|&j| !support.iter().any(|r| r[j])) {
            return Err(Error::InvalidIndexSet(format!("column {} is empty", j + 1)));
        }
        Ok(StarMatrix { m, n, support })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.support[i][j]
    }

    pub fn support(&self) -> &[Vec<bool>] {
        &self.support
    }

    pub fn to_index_set(&self) -> IndexSet {
        let tuples = (0..self.m)
            .flat_map(|i| (0..self.n).filter(move |&j| self.support[i][j]).map(move |j| vec![i, j]))
            .collect();
        IndexSet::new(vec![self.m, self.n], tuples).expect("star matrix invariants imply a valid set")
    }
}

impl fmt::Display for StarMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in &self.support {
            let cells: Vec<&str> = row.iter().map(|&b| if b { "*" } else { "0" }).collect();
            writeln!(f, "[{}]", cells.join(" "))?;
        }
        Ok(())
    }
}

pub fn star_matrix(s: &IndexSet) -> Result<StarMatrix> {
    s.require_k(2)?;
    let (m, n) = (s.dims()[0], s.dims()[1]);
    let mut support = vec![vec![false; n]; m];
    for t in s.tuples() {
        support[t[0]][t[1]] = true;
    }
    StarMatrix::new(support)
}

pub fn from_star(star: &StarMatrix) -> IndexSet {
    star.to_index_set()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixRow {
    pub label: String,
    pub entries: Vec<u8>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Block {
    pub rows: Vec<MatrixRow>,
}

/// A 0/1 matrix whose rows are grouped into labeled blocks.
///
/// Columns carry tuple labels; repeated columns are allowed. The struct does
/// not enforce the one-1-per-column-per-block property, see
/// [`validate_multipartition`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "MatrixJson", into = "MatrixJson")]
pub struct MultipartitionMatrix {
    pub columns: Vec<Vec<usize>>,
    pub blocks: Vec<Block>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MatrixJson {
    columns: Vec<Vec<usize>>,
    blocks: Vec<Block>,
}

impl TryFrom<MatrixJson> for MultipartitionMatrix {
    type Error = Error;

    fn try_from(json: MatrixJson) -> Result<Self> {
        let mut columns = Vec::with_capacity(json.columns.len());
        for c in json.columns {
            if c.contains(&0) {
                return Err(Error::InvalidArgument(
                    "column labels are 1-based".into(),
                ));
            }
            columns.push(c.into_iter().map(|s| s - 1).collect());
        }
        let n = columns.len();
        for block in &json.blocks {
            for row in &block.rows {
                if row.entries.len() != n || row.entries.iter().any(|&e| e > 1) {
                    return Err(Error::InvalidArgument(format!(
                        "row {} must hold {n} entries in {{0,1}}",
                        row.label
                    )));
                }
            }
        }
        Ok(MultipartitionMatrix {
            columns,
            blocks: json.blocks,
        })
    }
}

impl From<MultipartitionMatrix> for MatrixJson {
    fn from(m: MultipartitionMatrix) -> Self {
        MatrixJson {
            columns: m
                .columns
                .iter()
                .map(|c| c.iter().map(|s| s + 1).collect())
                .collect(),
            blocks: m.blocks,
        }
    }
}

impl MultipartitionMatrix {
    pub fn n_cols(&self) -> usize {
        self.columns.len()
    }

    pub fn n_rows(&self) -> usize {
        self.blocks.iter().map(|b| b.rows.len()).sum()
    }

    pub fn rows(&self) -> impl Iterator<Item = &MatrixRow> {
        self.blocks.iter().flat_map(|b| b.rows.iter())
    }

    /// All rows stacked, as exact rationals.
    pub fn to_rat_rows(&self) -> Vec<Vec<BigRational>> {
        self.rows()
            .map(|r| {
                r.entries
                    .iter()
                    .map(|&e| BigRational::from_integer(BigInt::from(e)))
                    .collect()
            })
            .collect()
    }

    pub fn to_int_rows(&self) -> Vec<Vec<i64>> {
        self.rows()
            .map(|r| r.entries.iter().map(|&e| i64::from(e)).collect())
            .collect()
    }

    /// For each block, the row holding the 1 of each column (`None` when the
    /// column has no 1 or several in that block).
    pub fn row_of_column(&self) -> Vec<Vec<Option<usize>>> {
        self.blocks
            .iter()
            .map(|block| {
                (0..self.n_cols())
                    .map(|c| {
                        let mut hit = None;
                        for (r, row) in block.rows.iter().enumerate() {
                            if row.entries[c] == 1 {
                                if hit.is_some() {
                                    return None;
                                }
                                hit = Some(r);
                            }
                        }
                        hit
                    })
                    .collect()
            })
            .collect()
    }

    /// Matrix-vector product `M·v` over the stacked rows.
    pub fn apply(&self, v: &[BigRational]) -> Vec<BigRational> {
        self.rows()
            .map(|r| {
                r.entries
                    .iter()
                    .zip(v)
                    .filter(|(&e, _)| e == 1)
                    .fold(BigRational::zero(), |acc, (_, x)| acc + x)
            })
            .collect()
    }

    pub fn apply_f64(&self, v: &[f64]) -> Vec<f64> {
        self.rows()
            .map(|r| {
                r.entries
                    .iter()
                    .zip(v)
                    .filter(|(&e, _)| e == 1)
                    .map(|(_, x)| x)
                    .sum()
            })
            .collect()
    }

    /// Compact JSON in the documented field order.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("matrix serialization cannot fail")
    }
}

impl fmt::Display for MultipartitionMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let width = self.rows().map(|r| r.label.chars().count()).max().unwrap_or(0);
        let header: Vec<String> = self
            .columns
            .iter()
            .map(|c| c.iter().map(|s| (s + 1).to_string()).collect::<String>())
            .collect();
        let cw = header.iter().map(String::len).max().unwrap_or(1).max(1);
        write!(f, "{:width$} ", "")?;
        for h in &header {
            write!(f, " {h:>cw$}")?;
        }
        writeln!(f)?;
        for (b, block) in self.blocks.iter().enumerate() {
            if b > 0 {
                writeln!(f, "{:width$} {}", "", "-".repeat((cw + 1) * header.len()))?;
            }
            for row in &block.rows {
                write!(f, "{:width$} ", row.label)?;
                for e in &row.entries {
                    write!(f, " {e:>cw$}")?;
                }
                writeln!(f)?;
            }
        }
        Ok(())
    }
}

/// The A-matrix of the quasi-independence model on `s`: one block per axis,
/// one row per state, columns in lexicographic tuple order.
pub fn build_a_matrix(s: &IndexSet) -> MultipartitionMatrix {
    let blocks = (0..s.k())
        .map(|axis| Block {
            rows: (0..s.dims()[axis])
                .map(|state| MatrixRow {
                    label: axis_row_label(axis, state),
                    entries: s
                        .tuples()
                        .iter()
                        .map(|t| u8::from(t[axis] == state))
                        .collect(),
                })
                .collect(),
        })
        .collect();
    MultipartitionMatrix {
        columns: s.tuples().to_vec(),
        blocks,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InvariantCheck {
    pub name: &'static str,
    pub passed: bool,
    /// First offending (block, column), 0-based.
    pub offense: Option<(usize, usize)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub checks: Vec<InvariantCheck>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn first_failure(&self) -> Option<&InvariantCheck> {
        self.checks.iter().find(|c| !c.passed)
    }
}

/// Checks the multipartition invariants: entries are 0/1 and rectangular,
/// each block has exactly one 1 per column, row supports inside a block are
/// disjoint, and every block sums to the all-ones vector.
pub fn validate_multipartition(m: &MultipartitionMatrix) -> ValidationReport {
    let n = m.n_cols();
    let mut shape = InvariantCheck {
        name: "rectangular 0/1 entries",
        passed: true,
        offense: None,
    };
    for (b, block) in m.blocks.iter().enumerate() {
        for row in &block.rows {
            if shape.passed && (row.entries.len() != n || row.entries.iter().any(|&e| e > 1)) {
                shape.passed = false;
                shape.offense = Some((b, 0));
            }
        }
    }
    if !shape.passed {
        return ValidationReport { checks: vec![shape] };
    }

    let mut exactly_one = InvariantCheck {
        name: "exactly one 1 per column in each block",
        passed: true,
        offense: None,
    };
    let mut disjoint = InvariantCheck {
        name: "row supports disjoint within each block",
        passed: true,
        offense: None,
    };
    let mut ones = InvariantCheck {
        name: "each block sums to the all-ones vector",
        passed: true,
        offense: None,
    };
    for (b, block) in m.blocks.iter().enumerate() {
        for c in 0..n {
            let count: usize = block.rows.iter().map(|r| usize::from(r.entries[c])).sum();
            if count != 1 && exactly_one.passed {
                exactly_one.passed = false;
                exactly_one.offense = Some((b, c));
            }
            if count > 1 && disjoint.passed {
                disjoint.passed = false;
                disjoint.offense = Some((b, c));
            }
            if count != 1 && ones.passed {
                ones.passed = false;
                ones.offense = Some((b, c));
            }
        }
    }
    if m.blocks.is_empty() {
        ones.passed = false;
    }
    ValidationReport {
        checks: vec![shape, exactly_one, disjoint, ones],
    }
}

/// Nonnegative counts aligned with the columns of a model matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountVector {
    entries: Vec<BigRational>,
}

impl CountVector {
    pub fn new(entries: Vec<BigRational>) -> Result<Self> {
        if entries.iter().any(|e| e < &BigRational::zero()) {
            return Err(Error::InvalidArgument("counts must be nonnegative".into()));
        }
        if entries.iter().all(Zero::is_zero) {
            return Err(Error::InvalidArgument("counts must have a positive total".into()));
        }
        Ok(CountVector { entries })
    }

    pub fn from_integers<I: IntoIterator<Item = i64>>(counts: I) -> Result<Self> {
        CountVector::new(
            counts
                .into_iter()
                .map(|c| BigRational::from_integer(BigInt::from(c)))
                .collect(),
        )
    }

    pub fn ones(len: usize) -> Self {
        CountVector {
            entries: vec![BigRational::one(); len],
        }
    }

    pub fn entries(&self) -> &[BigRational] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn total(&self) -> BigRational {
        self.entries.iter().fold(BigRational::zero(), |a, b| a + b)
    }

    pub fn is_positive(&self) -> bool {
        self.entries.iter().all(|e| e > &BigRational::zero())
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.entries.iter().map(rational_to_f64).collect()
    }
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

/// Parses `"p/q"`, `"p"` or a decimal-free integer string into a rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || Error::InvalidArgument(format!("`{s}` is not a rational number"));
    let s = s.trim();
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(|_| bad())?;
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            if q.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(p, q))
        }
        None => Ok(BigRational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

pub fn format_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

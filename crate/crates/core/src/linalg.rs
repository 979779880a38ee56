//! Exact linear algebra over ℚ and ℤ.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::model::format_rational;

/// Dense matrix of arbitrary-precision rationals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatMatrix {
    rows: Vec<Vec<BigRational>>,
    ncols: usize,
}

impl RatMatrix {
    pub fn new(rows: Vec<Vec<BigRational>>, ncols: usize) -> Result<Self> {
        if let Some(r) = rows.iter().find(|r| r.len() != ncols) {
            return Err(Error::DimensionMismatch(format!(
                "row of length {} in a matrix with {ncols} columns",
                r.len()
            )));
        }
        Ok(RatMatrix { rows, ncols })
    }

    pub fn from_ints(rows: &[Vec<i64>], ncols: usize) -> Result<Self> {
        RatMatrix::new(
            rows.iter()
                .map(|r| r.iter().map(|&x| rat(x)).collect())
                .collect(),
            ncols,
        )
    }

    pub fn identity(n: usize) -> Self {
        let rows = (0..n)
            .map(|i| (0..n).map(|j| rat(i64::from(i == j))).collect())
            .collect();
        RatMatrix { rows, ncols: n }
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rows(&self) -> &[Vec<BigRational>] {
        &self.rows
    }

    pub fn rank(&self) -> usize {
        let mut work = self.rows.clone();
        rref(&mut work, self.ncols).len()
    }

    /// Rows of `self` followed by rows of `other`.
    pub fn stack(&self, other: &RatMatrix) -> Result<RatMatrix> {
        if self.ncols != other.ncols {
            return Err(Error::DimensionMismatch(format!(
                "cannot stack {} and {} columns",
                self.ncols, other.ncols
            )));
        }
        let mut rows = self.rows.clone();
        rows.extend(other.rows.iter().cloned());
        Ok(RatMatrix {
            rows,
            ncols: self.ncols,
        })
    }

    pub fn transpose(&self) -> RatMatrix {
        let rows = (0..self.ncols)
            .map(|c| self.rows.iter().map(|r| r[c].clone()).collect())
            .collect();
        RatMatrix {
            rows,
            ncols: self.rows.len(),
        }
    }

    /// `cᵀ·M` for a coefficient vector over the rows.
    pub fn combine_rows(&self, coeffs: &[BigRational]) -> Vec<BigRational> {
        let mut out = vec![BigRational::zero(); self.ncols];
        for (row, c) in self.rows.iter().zip(coeffs) {
            if c.is_zero() {
                continue;
            }
            for (o, x) in out.iter_mut().zip(row) {
                *o += c * x;
            }
        }
        out
    }
}

pub fn rat(x: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

/// In-place reduced row echelon form with leftmost pivots. Returns the pivot
/// columns; zero rows are dropped.
fn rref(rows: &mut Vec<Vec<BigRational>>, ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut pr = 0;
    for c in 0..ncols {
        if pr == rows.len() {
            break;
        }
        let Some(found) = (pr..rows.len()).find(|&r| !rows[r][c].is_zero()) else {
            continue;
        };
        rows.swap(pr, found);
        let inv = rows[pr][c].recip();
        for x in rows[pr].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = rows[pr].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r == pr || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, p) in row.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *x -= &f * p;
                }
            }
        }
        pivots.push(c);
        pr += 1;
    }
    rows.truncate(pr);
    pivots
}

/// Solves `cᵀ·M = v`. Returns the certificate `c` (free variables set to zero)
/// or `None` when `v` is outside the row space.
pub fn rowspan_contains(m: &RatMatrix, v: &[BigRational]) -> Result<Option<Vec<BigRational>>> {
    if v.len() != m.ncols {
        return Err(Error::DimensionMismatch(format!(
            "vector of length {} against {} columns",
            v.len(),
            m.ncols
        )));
    }
    let unknowns = m.nrows();
    // Augmented system Mᵀ c = v, one equation per column of M.
    let mut system: Vec<Vec<BigRational>> = (0..m.ncols)
        .map(|c| {
            let mut eq: Vec<BigRational> = m.rows.iter().map(|r| r[c].clone()).collect();
            eq.push(v[c].clone());
            eq
        })
        .collect();
    let pivots = rref(&mut system, unknowns + 1);
    if pivots.last() == Some(&unknowns) {
        return Ok(None);
    }
    let mut coeffs = vec![BigRational::zero(); unknowns];
    for (row, &p) in system.iter().zip(&pivots) {
        coeffs[p] = row[unknowns].clone();
    }
    debug_assert_eq!(m.combine_rows(&coeffs), v);
    Ok(Some(coeffs))
}

/// Whether every grading row lies in the ℚ-rowspan of `m`, which is
/// equivalent to homogeneity of the toric ideal of `m` under that grading.
pub fn is_homogeneous_wrt(m: &RatMatrix, grading_rows: &[Vec<BigRational>]) -> Result<bool> {
    for g in grading_rows {
        if rowspan_contains(m, g)?.is_none() {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn rowspans_equal(a: &RatMatrix, b: &RatMatrix) -> Result<bool> {
    let joint = a.stack(b)?.rank();
    Ok(joint == a.rank() && joint == b.rank())
}

/// `x^u − x^v ∈ I_M` iff `M·u = M·v`.
pub fn binomial_in_ideal(m: &[Vec<i64>], u: &[i64], v: &[i64]) -> Result<bool> {
    if u.iter().chain(v).any(|&x| x < 0) {
        return Err(Error::InvalidArgument("exponent vectors must be nonnegative".into()));
    }
    for row in m {
        if row.len() != u.len() || u.len() != v.len() {
            return Err(Error::DimensionMismatch("exponent length differs from column count".into()));
        }
        let lhs: i64 = row.iter().zip(u).map(|(a, b)| a * b).sum();
        let rhs: i64 = row.iter().zip(v).map(|(a, b)| a * b).sum();
        if lhs != rhs {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Integer row echelon form over the first `limit` columns using unimodular
/// row operations. Returns the number of pivot rows; rows past it are zero on
/// those columns.
fn integer_echelon(rows: &mut [Vec<BigInt>], limit: usize) -> usize {
    let mut pr = 0;
    for c in 0..limit {
        if pr == rows.len() {
            break;
        }
        loop {
            let best = (pr..rows.len())
                .filter(|&r| !rows[r][c].is_zero())
                .min_by(|&x, &y| rows[x][c].abs().cmp(&rows[y][c].abs()));
            let Some(best) = best else { break };
            rows.swap(pr, best);
            let mut done = true;
            for r in pr + 1..rows.len() {
                if rows[r][c].is_zero() {
                    continue;
                }
                let q = rows[r][c].div_floor(&rows[pr][c]);
                let (head, tail) = rows.split_at_mut(r);
                for (x, p) in tail[0].iter_mut().zip(&head[pr]) {
                    *x -= &q * p;
                }
                if !tail[0][c].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if rows[pr][c].is_zero() {
            continue;
        }
        if rows[pr][c].is_negative() {
            for x in rows[pr].iter_mut() {
                *x = -x.clone();
            }
        }
        pr += 1;
    }
    pr
}

/// Row Hermite normal form of the lattice spanned by `rows`; zero rows dropped.
pub fn hermite_normal_form(rows: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let Some(width) = rows.first().map(Vec::len) else {
        return Vec::new();
    };
    let mut work = rows.to_vec();
    let rank = integer_echelon(&mut work, width);
    work.truncate(rank);
    for i in 0..rank {
        let p = work[i].iter().position(|x| !x.is_zero()).unwrap();
        for k in 0..i {
            let q = work[k][p].div_floor(&work[i][p]);
            if q.is_zero() {
                continue;
            }
            let (head, tail) = work.split_at_mut(i);
            for (x, y) in head[k].iter_mut().zip(&tail[0]) {
                *x -= &q * y;
            }
        }
    }
    work
}

/// A ℤ-basis of `ker_ℤ(M)`, normalized: Hermite form, first nonzero entry
/// positive, sorted lexicographically.
pub fn integer_kernel_basis(m: &[Vec<i64>], ncols: usize) -> Vec<Vec<BigInt>> {
    let r = m.len();
    // [Mᵀ | I]; rows whose Mᵀ part reduces to zero carry kernel vectors.
    let mut work: Vec<Vec<BigInt>> = (0..ncols)
        .map(|c| {
            let mut row: Vec<BigInt> = m.iter().map(|mr| BigInt::from(mr[c])).collect();
            row.extend((0..ncols).map(|k| BigInt::from(u8::from(k == c))));
            row
        })
        .collect();
    let rank = integer_echelon(&mut work, r);
    let kernel: Vec<Vec<BigInt>> = work[rank..].iter().map(|row| row[r..].to_vec()).collect();
    let mut basis = hermite_normal_form(&kernel);
    basis.sort();
    basis
}

pub fn is_primitive(v: &[BigInt]) -> bool {
    v.iter().fold(BigInt::zero(), |g, x| g.gcd(x)).is_one()
}

/// Whether `w` is an integer combination of `basis`.
pub fn lattice_contains(basis: &[Vec<BigInt>], w: &[BigInt]) -> bool {
    let hnf = hermite_normal_form(basis);
    let mut rest = w.to_vec();
    for row in &hnf {
        let p = row.iter().position(|x| !x.is_zero()).unwrap();
        if rest[p].is_zero() {
            continue;
        }
        let (q, rem) = rest[p].div_rem(&row[p]);
        if !rem.is_zero() {
            return false;
        }
        for (x, y) in rest.iter_mut().zip(row) {
            *x -= &q * y;
        }
    }
    rest.iter().all(Zero::is_zero)
}

pub fn rat_vec_strings(v: &[BigRational]) -> Vec<String> {
    v.iter().map(format_rational).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::model::build_a_matrix;
    use proptest::prelude::*;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn a_of(s: &crate::IndexSet) -> (Vec<Vec<i64>>, RatMatrix) {
        let a = build_a_matrix(s);
        let ints = a.to_int_rows();
        let m = RatMatrix::from_ints(&ints, a.n_cols()).unwrap();
        (ints, m)
    }

    fn indicator(s: &crate::IndexSet, cells: &[[usize; 2]]) -> Vec<BigRational> {
        s.tuples()
            .iter()
            .map(|t| rat(i64::from(cells.iter().any(|c| c[0] - 1 == t[0] && c[1] - 1 == t[1]))))
            .collect()
    }

    #[test]
    fn d1_cap_d3_certificate_is_a1_minus_b3() {
        let s = fixtures::fix_d();
        let (_, m) = a_of(&s);
        let v = indicator(&s, &[[1, 1], [1, 2]]);
        let c = rowspan_contains(&m, &v).unwrap().unwrap();
        let mut expected = vec![rat(0); 10];
        expected[0] = rat(1);
        expected[7] = rat(-1);
        assert_eq!(c, expected);
    }

    #[test]
    fn identity_certificate_is_the_vector() {
        let m = RatMatrix::identity(3);
        let v = vec![rat(1), rat(2), rat(3)];
        assert_eq!(rowspan_contains(&m, &v).unwrap().unwrap(), v);
    }

    #[test]
    fn single_cell_indicator_outside_rowspan() {
        let s = fixtures::fix_a();
        let (ints, m) = a_of(&s);
        let v = indicator(&s, &[[1, 1]]);
        assert!(rowspan_contains(&m, &v).unwrap().is_none());
        // Cross-check: some kernel vector is not orthogonal to v.
        let kernel = integer_kernel_basis(&ints, 6);
        assert!(kernel.iter().any(|k| !k[0].is_zero()));
        assert!(!is_homogeneous_wrt(&m, &[v]).unwrap());
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let m = RatMatrix::identity(2);
        assert!(matches!(
            rowspan_contains(&m, &[rat(1)]),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn kernel_of_two_by_two_independence() {
        let (ints, _) = a_of(&fixtures::full(2, 2));
        assert_eq!(integer_kernel_basis(&ints, 4), vec![ints_vec(&[1, -1, -1, 1])]);
    }

    fn ints_vec(v: &[i64]) -> Vec<BigInt> {
        ints(v)
    }

    #[test]
    fn full_rank_has_empty_kernel() {
        let m = vec![vec![1, 0], vec![0, 1]];
        assert!(integer_kernel_basis(&m, 2).is_empty());
    }

    #[test]
    fn fix_a_kernel_is_one_square() {
        let (ints, m) = a_of(&fixtures::fix_a());
        assert_eq!(m.rank(), 5);
        let basis = integer_kernel_basis(&ints, 6);
        assert_eq!(basis.len(), 1);
        let support: Vec<usize> = (0..6).filter(|&c| !basis[0][c].is_zero()).collect();
        assert_eq!(support, vec![0, 1, 3, 4]);
    }

    #[test]
    fn binomial_examples() {
        let (ints, _) = a_of(&fixtures::full(2, 2));
        assert!(binomial_in_ideal(&ints, &[1, 0, 0, 1], &[0, 1, 1, 0]).unwrap());
        assert!(binomial_in_ideal(&ints, &[2, 1, 0, 3], &[2, 1, 0, 3]).unwrap());
        let (ints, _) = a_of(&fixtures::fix_a());
        assert!(!binomial_in_ideal(&ints, &[1, 0, 0, 0, 0, 0], &[0, 0, 0, 0, 1, 0]).unwrap());
    }

    #[test]
    fn intersections_of_fix_d_are_homogeneous_gradings() {
        let s = fixtures::fix_d();
        let (_, m) = a_of(&s);
        let rows = vec![
            indicator(&s, &[[1, 1], [1, 2]]),
            indicator(&s, &[[2, 1], [2, 2]]),
            indicator(&s, &[[2, 4], [2, 5]]),
            indicator(&s, &[[2, 5], [4, 5]]),
        ];
        assert!(is_homogeneous_wrt(&m, &rows).unwrap());
        assert!(is_homogeneous_wrt(&m, m.rows()).unwrap());
    }

    #[test]
    fn hermite_form_is_reduced() {
        let rows = vec![ints(&[2, 4, 6]), ints(&[1, 3, 5])];
        let h = hermite_normal_form(&rows);
        assert_eq!(h, vec![ints(&[1, 1, 1]), ints(&[0, 2, 4])]);
        assert!(lattice_contains(&rows, &ints(&[3, 7, 11])));
        assert!(!lattice_contains(&rows, &ints(&[0, 1, 2])));
    }

    fn small_matrix() -> impl Strategy<Value = (Vec<Vec<i64>>, usize)> {
        (1usize..5, 1usize..7).prop_flat_map(|(r, c)| {
            (prop::collection::vec(prop::collection::vec(-2i64..3, c), r), Just(c))
        })
    }

    proptest! {
        #[test]
        fn kernel_vectors_are_primitive_and_annihilated((m, c) in small_matrix()) {
            let rm = RatMatrix::from_ints(&m, c).unwrap();
            let basis = integer_kernel_basis(&m, c);
            prop_assert_eq!(basis.len(), c - rm.rank());
            for b in &basis {
                prop_assert!(is_primitive(b));
                prop_assert!(b.iter().find(|x| !x.is_zero()).unwrap().is_positive());
                for row in &m {
                    let dot: BigInt = row.iter().zip(b).map(|(x, y)| BigInt::from(*x) * y).sum();
                    prop_assert!(dot.is_zero());
                }
            }
        }

        #[test]
        fn certificates_reproduce_targets((m, c) in small_matrix(), coeffs in prop::collection::vec(-3i64..4, 5)) {
            let rm = RatMatrix::from_ints(&m, c).unwrap();
            let target: Vec<BigRational> = rm.combine_rows(&coeffs.iter().take(m.len()).map(|&x| rat(x)).collect::<Vec<_>>());
            let cert = rowspan_contains(&rm, &target).unwrap().unwrap();
            prop_assert_eq!(rm.combine_rows(&cert), target);
        }
    }
}

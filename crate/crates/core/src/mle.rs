//! Likelihood, Birch residuals, iterative proportional scaling and the
//! multiplicative MLE of a coordinate toric fiber product.

use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::ctfp::CTFPFactorization;
use crate::error::{Error, Result};
use crate::model::{format_rational, rational_to_f64, Block, CountVector, MatrixRow, MultipartitionMatrix};
use crate::reparam::build_bar_matrix;

/// A probability vector over the columns of a model matrix.
#[derive(Clone, Debug, PartialEq)]
pub enum Distribution {
    Exact(Vec<BigRational>),
    Float(Vec<f64>),
}

impl Distribution {
    pub fn to_f64(&self) -> Vec<f64> {
        match self {
            Distribution::Exact(p) => p.iter().map(rational_to_f64).collect(),
            Distribution::Float(p) => p.clone(),
        }
    }

    /// Exact rationals as `p/q`, floats to 12 significant digits.
    pub fn render(&self) -> Vec<String> {
        match self {
            Distribution::Exact(p) => p.iter().map(format_rational).collect(),
            Distribution::Float(p) => p.iter().map(|x| format_sig(*x)).collect(),
        }
    }
}

/// Twelve significant digits, trailing zeros trimmed; scientific notation
/// outside `1e-5 ≤ |x| < 1e12`.
pub fn format_sig(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let e = x.abs().log10().floor() as i32;
    if (-5..12).contains(&e) {
        let digits = (11 - e).max(0) as usize;
        trim_zeros(&format!("{x:.digits$}"))
    } else {
        let s = format!("{x:.11e}");
        let (mantissa, exp) = s.split_once('e').unwrap();
        format!("{}e{exp}", trim_zeros(mantissa))
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Residual {
    Exact(BigRational),
    Float(f64),
}

impl Residual {
    pub fn is_zero(&self) -> bool {
        match self {
            Residual::Exact(r) => r.is_zero(),
            Residual::Float(r) => *r == 0.0,
        }
    }

    pub fn render(&self) -> String {
        match self {
            Residual::Exact(r) => format_rational(r),
            Residual::Float(r) => format_sig(*r),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MLEResult {
    pub distribution: Distribution,
    pub cycles: usize,
    pub birch_residual_max_abs: Residual,
    pub converged: bool,
    pub warnings: Vec<String>,
}

impl MLEResult {
    pub fn exact(&self) -> bool {
        matches!(self.distribution, Distribution::Exact(_))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IPSConfig {
    pub max_cycles: usize,
    pub tolerance: f64,
}

impl Default for IPSConfig {
    fn default() -> Self {
        IPSConfig {
            max_cycles: 10_000,
            tolerance: 1e-10,
        }
    }
}

fn check_len(m: &MultipartitionMatrix, len: usize) -> Result<()> {
    if m.n_cols() != len {
        return Err(Error::DimensionMismatch(format!(
            "{} entries for a matrix with {} columns",
            len,
            m.n_cols()
        )));
    }
    Ok(())
}

/// `Σ u_s log p_s`, with `0·log 0 = 0` and `−∞` when a positive count meets
/// a zero probability.
pub fn log_likelihood(p: &[f64], u: &[f64]) -> Result<f64> {
    if p.len() != u.len() {
        return Err(Error::DimensionMismatch("p and u differ in length".into()));
    }
    let mut total = 0.0;
    for (&ps, &us) in p.iter().zip(u) {
        if us == 0.0 {
            continue;
        }
        if ps <= 0.0 {
            return Ok(f64::NEG_INFINITY);
        }
        total += us * ps.ln();
    }
    Ok(total)
}

/// `M·u − u₊·M·p`.
pub fn birch_residual(
    m: &MultipartitionMatrix,
    u: &CountVector,
    p: &[BigRational],
) -> Result<Vec<BigRational>> {
    check_len(m, u.len())?;
    check_len(m, p.len())?;
    let total = u.total();
    let mu = m.apply(u.entries());
    let mp = m.apply(p);
    Ok(mu.into_iter().zip(mp).map(|(a, b)| a - &total * b).collect())
}

pub fn birch_residual_f64(m: &MultipartitionMatrix, u: &[f64], p: &[f64]) -> Result<Vec<f64>> {
    check_len(m, u.len())?;
    check_len(m, p.len())?;
    let total: f64 = u.iter().sum();
    let mu = m.apply_f64(u);
    let mp = m.apply_f64(p);
    Ok(mu.into_iter().zip(mp).map(|(a, b)| a - total * b).collect())
}

pub fn max_abs(v: &[BigRational]) -> BigRational {
    v.iter().map(|x| x.abs()).max().unwrap_or_else(BigRational::zero)
}

fn max_abs_f64(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |acc, x| acc.max(x.abs()))
}

fn block_rows(m: &MultipartitionMatrix) -> Result<Vec<Vec<usize>>> {
    m.row_of_column()
        .into_iter()
        .enumerate()
        .map(|(b, rows)| {
            rows.into_iter()
                .enumerate()
                .map(|(c, r)| {
                    r.ok_or_else(|| {
                        Error::InvalidArgument(format!(
                            "column {} has no unique 1 in block {}",
                            c + 1,
                            b + 1
                        ))
                    })
                })
                .collect()
        })
        .collect()
}

/// One pass over the blocks in exact arithmetic, starting from uniform.
pub fn ips_one_cycle(m: &MultipartitionMatrix, u: &CountVector) -> Result<Vec<BigRational>> {
    check_len(m, u.len())?;
    if !u.is_positive() {
        return Err(Error::NonPositiveCounts);
    }
    let n = m.n_cols();
    let rows = block_rows(m)?;
    let total = u.total();
    let mut p = vec![BigRational::new(1.into(), (n as i64).into()); n];
    for (b, assign) in rows.iter().enumerate() {
        let count = m.blocks[b].rows.len();
        let mut data = vec![BigRational::zero(); count];
        let mut model = vec![BigRational::zero(); count];
        for (c, &r) in assign.iter().enumerate() {
            data[r] += &u.entries()[c];
            model[r] += &p[c];
        }
        for (c, &r) in assign.iter().enumerate() {
            if model[r].is_zero() {
                return Err(Error::ZeroMarginal {
                    block: b + 1,
                    row: m.blocks[b].rows[r].label.clone(),
                });
            }
            p[c] = &p[c] * &data[r] / (&total * &model[r]);
        }
    }
    Ok(p)
}

/// Floating-point IPS until the Birch residual is below `tolerance·u₊`.
pub fn ips_run(m: &MultipartitionMatrix, u: &[f64], config: &IPSConfig) -> Result<MLEResult> {
    check_len(m, u.len())?;
    if config.tolerance <= 0.0 {
        return Err(Error::InvalidArgument("tolerance must be positive".into()));
    }
    if u.iter().any(|&x| x < 0.0 || !x.is_finite()) {
        return Err(Error::InvalidArgument("counts must be finite and nonnegative".into()));
    }
    let total: f64 = u.iter().sum();
    if total <= 0.0 {
        return Err(Error::InvalidArgument("counts must have a positive total".into()));
    }
    let mut warnings = Vec::new();
    if u.contains(&0.0) {
        warnings.push("zero counts: the MLE may not exist; result is best effort".to_string());
    }
    let n = m.n_cols();
    let rows = block_rows(m)?;
    let mut p = vec![1.0 / n as f64; n];
    let mut cycles = 0;
    let mut residual = f64::INFINITY;
    while cycles < config.max_cycles {
        for (b, assign) in rows.iter().enumerate() {
            let count = m.blocks[b].rows.len();
            let mut data = vec![0.0; count];
            let mut model = vec![0.0; count];
            for (c, &r) in assign.iter().enumerate() {
                data[r] += u[c];
                model[r] += p[c];
            }
            for (c, &r) in assign.iter().enumerate() {
                p[c] = if model[r] > 0.0 {
                    p[c] * data[r] / (total * model[r])
                } else {
                    0.0
                };
            }
        }
        cycles += 1;
        residual = max_abs_f64(&birch_residual_f64(m, u, &p)?);
        if residual < config.tolerance * total {
            break;
        }
    }
    let converged = residual < config.tolerance * total;
    if !converged {
        warnings.push(format!("no convergence after {cycles} cycles"));
    }
    Ok(MLEResult {
        distribution: Distribution::Float(p),
        cycles,
        birch_residual_max_abs: Residual::Float(residual),
        converged,
        warnings,
    })
}

/// Exact one-cycle IPS plus its residual against `check` (usually `A_S`).
pub fn ips_exact(
    m: &MultipartitionMatrix,
    check: &MultipartitionMatrix,
    u: &CountVector,
) -> Result<MLEResult> {
    let p = ips_one_cycle(m, u)?;
    let residual = max_abs(&birch_residual(check, u, &p)?);
    let converged = residual.is_zero();
    let mut warnings = Vec::new();
    if !converged {
        warnings.push("one cycle does not reach the MLE for this parametrization".into());
    }
    Ok(MLEResult {
        distribution: Distribution::Exact(p),
        cycles: 1,
        birch_residual_max_abs: Residual::Exact(residual),
        converged,
        warnings,
    })
}

/// Sums counts of the original set over the projection onto a factor.
pub fn marginal_counts(fact: &CTFPFactorization, original: &crate::IndexSet, u: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let mut first = vec![0.0; fact.s1.len()];
    let mut second = vec![0.0; fact.s2.len()];
    for (t, &x) in original.tuples().iter().zip(u) {
        let (a, b) = fact.project(t);
        first[fact.s1.position(&a).unwrap()] += x;
        second[fact.s2.position(&b).unwrap()] += x;
    }
    (first, second)
}

/// `p̂(A+B) = p̂₁(A)·p̂₂(B)/d_i`, where `d_i` is the shared-state marginal of
/// `p̂₁`. Output follows the column order of the reassembled set.
pub fn tfp_mle_combine(p1: &[f64], p2: &[f64], fact: &CTFPFactorization) -> Result<Vec<f64>> {
    if p1.len() != fact.s1.len() || p2.len() != fact.s2.len() {
        return Err(Error::DimensionMismatch("factor distributions do not match the factors".into()));
    }
    let (j1, j2) = fact.shared_positions();
    let mut d1 = vec![0.0; fact.shared_states];
    let mut d2 = vec![0.0; fact.shared_states];
    for (t, &x) in fact.s1.tuples().iter().zip(p1) {
        d1[t[j1]] += x;
    }
    for (t, &x) in fact.s2.tuples().iter().zip(p2) {
        d2[t[j2]] += x;
    }
    for (i, (a, b)) in d1.iter().zip(&d2).enumerate() {
        if *a <= 0.0 {
            return Err(Error::ZeroMarginal {
                block: 0,
                row: format!("shared state {}", i + 1),
            });
        }
        if (a - b).abs() > 1e-8 * a.max(*b).max(1.0) {
            return Err(Error::InvalidArgument(format!(
                "factor marginals disagree at shared state {}: {a} vs {b}",
                i + 1
            )));
        }
    }
    let glued = fact.reassemble()?;
    Ok(glued
        .tuples()
        .iter()
        .map(|t| {
            let (a, b) = fact.project(t);
            let pa = p1[fact.s1.position(&a).unwrap()];
            let pb = p2[fact.s2.position(&b).unwrap()];
            pa * pb / d1[t[fact.spec.j()]]
        })
        .collect())
}

fn pull_back(
    fact_set: &crate::IndexSet,
    matrix: &MultipartitionMatrix,
    original: &crate::IndexSet,
    project: impl Fn(&[usize]) -> Vec<usize>,
    skip_first: bool,
    blocks: &mut Vec<Block>,
    tag: &str,
) {
    for (b, block) in matrix.blocks.iter().enumerate() {
        if skip_first && b == 0 {
            continue;
        }
        blocks.push(Block {
            rows: block
                .rows
                .iter()
                .map(|row| MatrixRow {
                    label: format!("{tag}{}", row.label),
                    entries: original
                        .tuples()
                        .iter()
                        .map(|t| row.entries[fact_set.position(&project(t)).unwrap()])
                        .collect(),
                })
                .collect(),
        });
    }
}

/// Glues the leveled reparametrizations of two 2-way factors into one
/// multipartition matrix on the original columns. The first factor's blocks
/// end with the shared partition and the second factor's start with it, so
/// the shared block is kept once.
pub fn glued_reparametrization(fact: &CTFPFactorization) -> Result<MultipartitionMatrix> {
    if fact.s1.k() != 2 || fact.s2.k() != 2 {
        return Err(Error::WrongArity {
            expected: 2,
            actual: fact.s1.k().max(fact.s2.k()),
        });
    }
    let (j1, j2) = fact.shared_positions();
    let first = fact.s1.permute_axes(if j1 == 1 { &[0, 1] } else { &[1, 0] })?;
    let second = fact.s2.permute_axes(if j2 == 0 { &[0, 1] } else { &[1, 0] })?;
    let rep1 = build_bar_matrix(&first)?;
    let rep2 = build_bar_matrix(&second)?;
    let original = fact.reassemble()?;
    let mut blocks = Vec::new();
    pull_back(
        &first,
        &rep1.matrix,
        &original,
        |t| {
            let (a, _) = fact.project(t);
            if j1 == 1 { a } else { vec![a[1], a[0]] }
        },
        false,
        &mut blocks,
        "L.",
    );
    pull_back(
        &second,
        &rep2.matrix,
        &original,
        |t| {
            let (_, b) = fact.project(t);
            if j2 == 0 { b } else { vec![b[1], b[0]] }
        },
        true,
        &mut blocks,
        "R.",
    );
    Ok(MultipartitionMatrix {
        columns: original.tuples().to_vec(),
        blocks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ctfp::{factorize, SplitSpec};
    use crate::fixtures;
    use crate::linalg::rat;
    use crate::model::build_a_matrix;
    use num_bigint::BigInt;
    use proptest::prelude::*;

    fn q(p: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(p), BigInt::from(d))
    }

    #[test]
    fn significant_digits() {
        assert_eq!(format_sig(0.12), "0.12");
        assert_eq!(format_sig(1.0 / 3.0), "0.333333333333");
        assert_eq!(format_sig(-29.81887979751), "-29.8188797975");
        assert_eq!(format_sig(3.5832314893e-10), "3.5832314893e-10");
        assert_eq!(format_sig(0.0), "0");
        assert_eq!(format_sig(12.0), "12");
    }

    #[test]
    fn log_likelihood_examples() {
        let v = log_likelihood(&[0.25; 4], &[1.0; 4]).unwrap();
        assert!((v - 4.0 * 0.25f64.ln()).abs() < 1e-15);
        assert_eq!(log_likelihood(&[1.0, 0.0], &[2.0, 0.0]).unwrap(), 0.0);
        assert_eq!(log_likelihood(&[1.0, 0.0], &[2.0, 1.0]).unwrap(), f64::NEG_INFINITY);
    }

    #[test]
    fn independence_one_cycle_is_marginal_product() {
        let m = build_a_matrix(&fixtures::full(2, 2));
        let u = CountVector::from_integers([1, 2, 3, 4]).unwrap();
        let p = ips_one_cycle(&m, &u).unwrap();
        assert_eq!(p, vec![q(3, 25), q(9, 50), q(7, 25), q(21, 50)]);
        assert!(birch_residual(&m, &u, &p).unwrap().iter().all(Zero::is_zero));
        let run = ips_run(&m, &[1.0, 2.0, 3.0, 4.0], &IPSConfig::default()).unwrap();
        assert_eq!(run.cycles, 1);
        for (a, b) in run.distribution.to_f64().iter().zip([0.12, 0.18, 0.28, 0.42]) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn model_point_has_zero_residual() {
        let m = build_a_matrix(&fixtures::full(2, 2));
        let p = vec![q(3, 25), q(9, 50), q(7, 25), q(21, 50)];
        let u = CountVector::new(p.iter().map(|x| x * rat(50)).collect()).unwrap();
        assert!(birch_residual(&m, &u, &p).unwrap().iter().all(Zero::is_zero));
    }

    #[test]
    fn reparametrized_fix_d_is_one_cycle_exact() {
        let s = fixtures::fix_d();
        let a = build_a_matrix(&s);
        let bar = build_bar_matrix(&s).unwrap().matrix;
        let u = CountVector::ones(12);
        let res = ips_exact(&bar, &a, &u).unwrap();
        assert!(res.birch_residual_max_abs.is_zero());
        let p = match &res.distribution {
            Distribution::Exact(p) => p.clone(),
            Distribution::Float(_) => unreachable!(),
        };
        assert!(birch_residual(&bar, &u, &p).unwrap().iter().all(Zero::is_zero));
        let run = ips_run(&bar, &[1.0; 12], &IPSConfig::default()).unwrap();
        assert_eq!(run.cycles, 1);
    }

    #[test]
    fn original_parametrization_of_fix_d_needs_more_cycles() {
        let s = fixtures::fix_d();
        let a = build_a_matrix(&s);
        let u = CountVector::from_integers([3, 1, 4, 1, 5, 9, 2, 6, 5, 3, 5, 8]).unwrap();
        let plain = ips_exact(&a, &a, &u).unwrap();
        assert!(!plain.birch_residual_max_abs.is_zero());
        let bar = build_bar_matrix(&s).unwrap().matrix;
        assert!(ips_exact(&bar, &a, &u).unwrap().birch_residual_max_abs.is_zero());
    }

    #[test]
    fn no_three_way_is_not_one_cycle() {
        let m = build_a_matrix(&fixtures::fix_f());
        let u = CountVector::from_integers(1..=8).unwrap();
        let res = ips_exact(&m, &m, &u).unwrap();
        assert!(!res.birch_residual_max_abs.is_zero());
        let run = ips_run(&m, &(1..=8).map(f64::from).collect::<Vec<_>>(), &IPSConfig::default()).unwrap();
        assert!(run.converged);
        assert!(run.cycles > 1);
    }

    #[test]
    fn exact_path_rejects_zero_counts() {
        let m = build_a_matrix(&fixtures::full(2, 2));
        let u = CountVector::from_integers([0, 1, 1, 1]).unwrap();
        assert!(matches!(ips_one_cycle(&m, &u), Err(Error::NonPositiveCounts)));
    }

    #[test]
    fn combine_on_full_cube_is_independence() {
        let s = fixtures::full3(2, 2, 2);
        let spec = SplitSpec::one_based(3, 2, &[1, 2]).unwrap();
        let fact = factorize(&s, &spec).unwrap();
        let px = [0.3, 0.7];
        let py = [0.4, 0.6];
        let pz = [0.1, 0.9];
        let p1: Vec<f64> = fact.s1.tuples().iter().map(|t| px[t[0]] * py[t[1]]).collect();
        let p2: Vec<f64> = fact.s2.tuples().iter().map(|t| py[t[0]] * pz[t[1]]).collect();
        let p = tfp_mle_combine(&p1, &p2, &fact).unwrap();
        for (t, x) in s.tuples().iter().zip(&p) {
            assert!((x - px[t[0]] * py[t[1]] * pz[t[2]]).abs() < 1e-15);
        }
    }

    #[test]
    fn combine_with_single_shared_state_is_product() {
        let s = IndexSet::new(
            vec![2, 1, 2],
            vec![vec![0, 0, 0], vec![0, 0, 1], vec![1, 0, 0], vec![1, 0, 1]],
        )
        .unwrap();
        let spec = SplitSpec::one_based(3, 2, &[1, 2]).unwrap();
        let fact = factorize(&s, &spec).unwrap();
        let p = tfp_mle_combine(&[0.25, 0.75], &[0.5, 0.5], &fact).unwrap();
        assert_eq!(p, vec![0.125, 0.125, 0.375, 0.375]);
    }

    use crate::IndexSet;

    #[test]
    fn glued_factor_reparametrizations_are_one_cycle_on_fix_b() {
        let s = fixtures::fix_b();
        let spec = SplitSpec::one_based(3, 2, &[1, 2]).unwrap();
        let fact = factorize(&s, &spec).unwrap();
        let glued = glued_reparametrization(&fact).unwrap();
        assert!(crate::model::validate_multipartition(&glued).passed());
        let a = build_a_matrix(&s);
        assert!(crate::linalg::rowspans_equal(
            &crate::linalg::RatMatrix::new(a.to_rat_rows(), 9).unwrap(),
            &crate::linalg::RatMatrix::new(glued.to_rat_rows(), 9).unwrap(),
        )
        .unwrap());
        let u = CountVector::from_integers([3, 1, 4, 1, 5, 9, 2, 6, 5]).unwrap();
        assert!(ips_exact(&glued, &a, &u).unwrap().birch_residual_max_abs.is_zero());
    }

    proptest! {
        #[test]
        fn exact_ips_is_scale_invariant(counts in prop::collection::vec(1i64..20, 12), c in 1i64..7) {
            let s = fixtures::fix_d();
            let bar = build_bar_matrix(&s).unwrap().matrix;
            let u = CountVector::from_integers(counts.clone()).unwrap();
            let cu = CountVector::from_integers(counts.iter().map(|x| x * c)).unwrap();
            prop_assert_eq!(ips_one_cycle(&bar, &u).unwrap(), ips_one_cycle(&bar, &cu).unwrap());
        }
    }
}

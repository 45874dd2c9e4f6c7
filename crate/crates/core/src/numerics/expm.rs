//! Matrix exponentials by scaling and squaring.
//!
//! Eigendecomposition is never used: deformed generators such as
//! `T G T^{-1}` are non-normal and may be defective.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use super::fock::FockOperator;
use crate::error::{Error, Result};

/// Consecutive small terms required before a power series is declared converged.
pub const SERIES_SMALL_RUN: usize = 3;
/// Relative size of a term counted as small.
pub const SERIES_REL_TOL: f64 = 1e-14;
/// Term cap for operator power series.
pub const SERIES_MAX_TERMS: usize = 500;

fn factorial_tail_bound(norm: f64, m: usize) -> f64 {
    // norm^(m+1)/(m+1)! times the geometric factor for the rest of the tail
    let mut t = 1.0;
    for k in 1..=m + 1 {
        t *= norm / k as f64;
    }
    let ratio = norm / (m as f64 + 2.0);
    if ratio >= 1.0 {
        f64::INFINITY
    } else {
        t / (1.0 - ratio)
    }
}

fn square_in_place(m: &mut DMatrix<C64>, scale: u32, done: u32) -> Result<()> {
    let sq = &*m * &*m;
    if sq.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::ExponentialOverflow { scale, squarings: done + 1 });
    }
    *m = sq;
    Ok(())
}

/// `exp(A)` by scaling and squaring with a Taylor kernel.
///
/// `A` is scaled by `2^-s` until its 1-norm is at most 1/2, the Taylor degree is
/// picked so the truncation bound on the scaled matrix is below `tol / 2^s`, and
/// the result is squared `s` times.
pub fn matrix_exponential(a: &FockOperator, tol: f64) -> Result<FockOperator> {
    if !(tol > 0.0 && tol <= 1e-4) {
        return Err(Error::InvalidTolerance(tol));
    }
    if !a.is_finite() {
        return Err(Error::NonFinite { index: 0 });
    }
    let dim = a.dim();
    let norm = a.norm_one();
    if norm == 0.0 {
        return Ok(FockOperator::identity(dim));
    }
    let s = if norm > 0.5 { (norm / 0.5).log2().ceil() as u32 } else { 0 };
    let scaled = a.matrix() * C64::new(0.5f64.powi(s as i32), 0.0);
    let scaled_norm = norm * 0.5f64.powi(s as i32);
    let target = (tol * 0.5f64.powi(s as i32)).max(1e-18);
    let mut degree = 1;
    while factorial_tail_bound(scaled_norm, degree) > target && degree < 40 {
        degree += 1;
    }

    // Horner: I + B(I + B/2(I + ... (I + B/m)))
    let id = DMatrix::<C64>::identity(dim, dim);
    let mut acc = id.clone();
    for k in (1..=degree).rev() {
        acc = &id + (&scaled * &acc) * C64::new(1.0 / k as f64, 0.0);
    }
    for done in 0..s {
        square_in_place(&mut acc, s, done)?;
    }
    Ok(FockOperator::from_matrix_unchecked(acc))
}

/// Outcome of a power-series exponential.
#[derive(Debug, Clone)]
pub struct SeriesSum {
    pub value: FockOperator,
    /// Terms summed in the scaled series, including the identity.
    pub terms_used: usize,
    /// Squarings applied after the series (`exp(X) = exp(X/2^s)^(2^s)`).
    pub squarings: u32,
    /// Frobenius norm of each term divided by the running partial sum.
    pub relative_terms: Vec<f64>,
}

/// `sum_k X^k / k!` summed term by term.
///
/// Summing the raw series of a large generator loses everything to
/// cancellation, so the generator is first divided by `2^s` (1-norm at most 1)
/// and the sum is squared back using `exp(X) = exp(X/2^s)^(2^s)`. The sum stops
/// after [`SERIES_SMALL_RUN`] consecutive terms below [`SERIES_REL_TOL`] times
/// the partial sum, or fails with `SeriesStalled` after `max_terms`.
pub fn series_exponential(x: &FockOperator, max_terms: usize) -> Result<SeriesSum> {
    if !x.is_finite() {
        return Err(Error::NonFinite { index: 0 });
    }
    let dim = x.dim();
    let norm = x.norm_one();
    let s = if norm > 1.0 { norm.log2().ceil() as u32 } else { 0 };
    let scaled = x.matrix() * C64::new(0.5f64.powi(s as i32), 0.0);

    let mut term = DMatrix::<C64>::identity(dim, dim);
    let mut acc = term.clone();
    let mut relative_terms = vec![1.0];
    let mut run = 0;
    let mut k = 1;
    loop {
        if k >= max_terms {
            return Err(Error::SeriesStalled { terms: k, last_term_norm: term.norm() });
        }
        term = (&scaled * &term) * C64::new(1.0 / k as f64, 0.0);
        acc += &term;
        let rel = term.norm() / acc.norm().max(f64::MIN_POSITIVE);
        relative_terms.push(rel);
        k += 1;
        if rel <= SERIES_REL_TOL {
            run += 1;
            if run == SERIES_SMALL_RUN {
                break;
            }
        } else {
            run = 0;
        }
    }
    for done in 0..s {
        square_in_place(&mut acc, s, done)?;
    }
    Ok(SeriesSum {
        value: FockOperator::from_matrix_unchecked(acc),
        terms_used: k,
        squarings: s,
        relative_terms,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::fock::annihilator_matrix;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn exp_of_zero_is_identity_exactly() {
        let e = matrix_exponential(&FockOperator::zeros(8), 1e-12).unwrap();
        assert_eq!(e, FockOperator::identity(8));
    }

    #[test]
    fn diagonal_case() {
        let a = FockOperator::from_diagonal(&[c(1.0), c(2.0)]);
        let e = matrix_exponential(&a, 1e-14).unwrap();
        assert!((e.get(0, 0).re - 1f64.exp()).abs() < 1e-13);
        assert!((e.get(1, 1).re - 2f64.exp()).abs() < 1e-12);
        assert!(e.get(0, 1).norm() == 0.0 && e.get(1, 0).norm() == 0.0);
    }

    /// Term-by-term Taylor summation without scaling: the oracle for a
    /// generator of small norm.
    fn naive_series(a: &DMatrix<C64>, terms: usize) -> DMatrix<C64> {
        let n = a.nrows();
        let mut term = DMatrix::<C64>::identity(n, n);
        let mut acc = term.clone();
        for k in 1..terms {
            term = (a * &term) * c(1.0 / k as f64);
            acc += &term;
        }
        acc
    }

    #[test]
    fn displacement_generator_matches_plain_series() {
        let dim = 32;
        let a0 = annihilator_matrix(dim).unwrap();
        let z = c(0.5);
        let gen = &a0.adjoint().scale(z) - &a0.scale(z.conj());
        let w = matrix_exponential(&gen, 1e-14).unwrap();
        // ||gen||_1 is about 5.5 here: 120 terms is far past the peak term
        let oracle = naive_series(gen.matrix(), 120);
        let diff = (w.matrix() - oracle).norm();
        assert!(diff < 1e-10, "diff {diff}");
        let unit = &w.adjoint() * &w;
        assert!(unit.block_residual(&FockOperator::identity(dim), 24) < 1e-10);
    }

    #[test]
    fn inverse_pair() {
        let dim = 16;
        let a0 = annihilator_matrix(dim).unwrap();
        let gen = &(&a0 * &a0).scale(C64::new(0.3, -0.2)) + &a0.adjoint().scale(c(0.7));
        let e1 = matrix_exponential(&gen, 1e-13).unwrap();
        let e2 = matrix_exponential(&gen.scale(c(-1.0)), 1e-13).unwrap();
        let prod = &e1 * &e2;
        assert!(prod.block_residual(&FockOperator::identity(dim), dim) < 1e-9);
    }

    #[test]
    fn rejects_bad_tolerance() {
        assert!(matrix_exponential(&FockOperator::zeros(2), 1e-3).is_err());
        assert!(matrix_exponential(&FockOperator::zeros(2), 0.0).is_err());
    }

    #[test]
    fn overflow_is_reported() {
        let a = FockOperator::from_diagonal(&[c(800.0), c(0.0)]);
        match matrix_exponential(&a, 1e-12) {
            Err(Error::ExponentialOverflow { scale, .. }) => assert!(scale > 0),
            other => panic!("expected overflow, got {other:?}"),
        }
    }

    #[test]
    fn series_matches_scaling_and_squaring() {
        let dim = 24;
        let a0 = annihilator_matrix(dim).unwrap();
        let gen = &(&a0.adjoint() * &a0.adjoint()).scale(c(0.2)) - &(&a0 * &a0).scale(c(0.2));
        let s = series_exponential(&gen, SERIES_MAX_TERMS).unwrap();
        let e = matrix_exponential(&gen, 1e-14).unwrap();
        assert!(s.value.block_residual(&e, dim) < 1e-11);
        assert!(s.terms_used >= 4);
    }

    #[test]
    fn series_stall_reported() {
        let a = FockOperator::from_diagonal(&[c(0.9), c(0.1)]);
        assert!(matches!(series_exponential(&a, 3), Err(Error::SeriesStalled { .. })));
    }
}

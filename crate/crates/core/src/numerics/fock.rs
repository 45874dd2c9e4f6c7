//! Dense vectors and operators on the truncated number basis.

use std::ops::{Add, Mul, Sub};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Default truncation dimension.
pub const DEFAULT_DIM: usize = 64;

/// A state flagged unreliable when its tail mass exceeds this fraction of its norm.
pub const TAIL_TOL: f64 = 1e-8;

/// Size of the leading block used for operator comparisons: `dim - dim/4`.
///
/// Squeezing and displacement populate the top Fock levels, where the truncated
/// ladder algebra is wrong; residuals are only meaningful below this cut.
pub fn leading_block(dim: usize) -> usize {
    dim - dim / 4
}

fn tail_len(dim: usize) -> usize {
    dim.div_ceil(8)
}

/// Complex amplitudes in the number basis `e_0, ..., e_{dim-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    coeffs: DVector<C64>,
    tail_estimate: f64,
}

impl FockVector {
    pub fn new(coeffs: Vec<C64>) -> Result<Self> {
        Self::from_dvector(DVector::from_vec(coeffs))
    }

    pub fn from_dvector(coeffs: DVector<C64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidDimension { dim: 0, reason: "vector must have dim >= 1" });
        }
        if let Some(index) = coeffs.iter().position(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self::from_dvector_unchecked(coeffs))
    }

    pub(crate) fn from_dvector_unchecked(coeffs: DVector<C64>) -> Self {
        let dim = coeffs.len();
        let tail = tail_len(dim);
        let tail_estimate = coeffs.rows(dim - tail, tail).norm();
        Self { coeffs, tail_estimate }
    }

    pub fn zeros(dim: usize) -> Self {
        Self::from_dvector_unchecked(DVector::zeros(dim))
    }

    /// The basis vector `e_n`.
    pub fn basis(dim: usize, n: usize) -> Result<Self> {
        if n >= dim {
            return Err(Error::InvalidDimension { dim, reason: "basis index beyond truncation" });
        }
        let mut v = DVector::zeros(dim);
        v[n] = C64::new(1.0, 0.0);
        Ok(Self::from_dvector_unchecked(v))
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &DVector<C64> {
        &self.coeffs
    }

    pub fn as_slice(&self) -> &[C64] {
        self.coeffs.as_slice()
    }

    pub fn into_dvector(self) -> DVector<C64> {
        self.coeffs
    }

    /// Norm of the last `ceil(dim/8)` coefficients.
    pub fn tail_estimate(&self) -> f64 {
        self.tail_estimate
    }

    pub fn norm(&self) -> f64 {
        self.coeffs.norm()
    }

    pub fn is_converged(&self) -> bool {
        self.tail_estimate <= TAIL_TOL * self.norm()
    }

    /// `<self, other>`, conjugate-linear in `self`.
    pub fn inner(&self, other: &FockVector) -> Result<C64> {
        check_dims(self.dim(), other.dim())?;
        Ok(self.coeffs.dotc(&other.coeffs))
    }

    pub fn scale(&self, c: C64) -> FockVector {
        Self::from_dvector_unchecked(&self.coeffs * c)
    }

    /// Euclidean distance restricted to the first `rows` coefficients.
    pub fn distance_leading(&self, other: &FockVector, rows: usize) -> Result<f64> {
        check_dims(self.dim(), other.dim())?;
        let rows = rows.min(self.dim());
        Ok((self.coeffs.rows(0, rows) - other.coeffs.rows(0, rows)).norm())
    }

    pub fn distance(&self, other: &FockVector) -> Result<f64> {
        self.distance_leading(other, self.dim())
    }

    pub fn normalized(&self) -> FockVector {
        let n = self.norm();
        if n == 0.0 {
            return self.clone();
        }
        self.scale(C64::new(1.0 / n, 0.0))
    }
}

impl Add for &FockVector {
    type Output = FockVector;
    fn add(self, rhs: &FockVector) -> FockVector {
        assert_eq!(self.dim(), rhs.dim(), "dimension mismatch in vector addition");
        FockVector::from_dvector_unchecked(&self.coeffs + &rhs.coeffs)
    }
}

impl Sub for &FockVector {
    type Output = FockVector;
    fn sub(self, rhs: &FockVector) -> FockVector {
        assert_eq!(self.dim(), rhs.dim(), "dimension mismatch in vector subtraction");
        FockVector::from_dvector_unchecked(&self.coeffs - &rhs.coeffs)
    }
}

fn check_dims(left: usize, right: usize) -> Result<()> {
    if left != right {
        return Err(Error::DimensionMismatch { left, right });
    }
    Ok(())
}

/// Dense complex square matrix acting on [`FockVector`]s.
#[derive(Debug, Clone, PartialEq)]
pub struct FockOperator {
    entries: DMatrix<C64>,
}

impl FockOperator {
    pub fn new(entries: DMatrix<C64>) -> Result<Self> {
        if entries.nrows() != entries.ncols() {
            return Err(Error::DimensionMismatch { left: entries.nrows(), right: entries.ncols() });
        }
        if entries.nrows() == 0 {
            return Err(Error::InvalidDimension { dim: 0, reason: "operator must have dim >= 1" });
        }
        if let Some(index) = entries.iter().position(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self { entries })
    }

    pub(crate) fn from_matrix_unchecked(entries: DMatrix<C64>) -> Self {
        Self { entries }
    }

    pub fn identity(dim: usize) -> Self {
        Self { entries: DMatrix::identity(dim, dim) }
    }

    pub fn zeros(dim: usize) -> Self {
        Self { entries: DMatrix::zeros(dim, dim) }
    }

    pub fn from_diagonal(diag: &[C64]) -> Self {
        Self { entries: DMatrix::from_diagonal(&DVector::from_column_slice(diag)) }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.entries
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.entries[(row, col)]
    }

    pub fn adjoint(&self) -> FockOperator {
        Self { entries: self.entries.adjoint() }
    }

    pub fn scale(&self, c: C64) -> FockOperator {
        Self { entries: &self.entries * c }
    }

    pub fn apply(&self, v: &FockVector) -> Result<FockVector> {
        check_dims(self.dim(), v.dim())?;
        Ok(FockVector::from_dvector_unchecked(&self.entries * v.coeffs()))
    }

    pub fn column(&self, n: usize) -> FockVector {
        FockVector::from_dvector_unchecked(self.entries.column(n).into_owned())
    }

    pub fn commutator(&self, other: &FockOperator) -> FockOperator {
        &(self * other) - &(other * self)
    }

    pub fn is_finite(&self) -> bool {
        self.entries.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.norm()
    }

    /// Maximum absolute column sum.
    pub fn norm_one(&self) -> f64 {
        self.entries
            .column_iter()
            .map(|c| c.iter().map(|z| z.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Spectral norm from a dense SVD.
    pub fn op_norm(&self) -> f64 {
        self.entries.clone().singular_values().max()
    }

    /// Frobenius norm of `self - other` on the leading `block x block` corner.
    pub fn block_residual(&self, other: &FockOperator, block: usize) -> f64 {
        let b = block.min(self.dim()).min(other.dim());
        (self.entries.view((0, 0), (b, b)) - other.entries.view((0, 0), (b, b))).norm()
    }

    /// [`Self::block_residual`] on the standard leading block.
    pub fn leading_residual(&self, other: &FockOperator) -> f64 {
        self.block_residual(other, leading_block(self.dim()))
    }

    pub fn try_inverse(&self) -> Option<FockOperator> {
        self.entries.clone().try_inverse().map(|entries| Self { entries })
    }
}

impl Mul for &FockOperator {
    type Output = FockOperator;
    fn mul(self, rhs: &FockOperator) -> FockOperator {
        FockOperator { entries: &self.entries * &rhs.entries }
    }
}

impl Add for &FockOperator {
    type Output = FockOperator;
    fn add(self, rhs: &FockOperator) -> FockOperator {
        FockOperator { entries: &self.entries + &rhs.entries }
    }
}

impl Sub for &FockOperator {
    type Output = FockOperator;
    fn sub(self, rhs: &FockOperator) -> FockOperator {
        FockOperator { entries: &self.entries - &rhs.entries }
    }
}

/// The truncated bosonic annihilator: `(m, n) = sqrt(n)` when `m = n - 1`.
///
/// `[a0, a0^dag]` is the identity except for its last diagonal entry, which is
/// `1 - dim`.
pub fn annihilator_matrix(dim: usize) -> Result<FockOperator> {
    if dim < 2 {
        return Err(Error::InvalidDimension { dim, reason: "ladder operators need dim >= 2" });
    }
    let mut m = DMatrix::zeros(dim, dim);
    for n in 1..dim {
        m[(n - 1, n)] = C64::new((n as f64).sqrt(), 0.0);
    }
    Ok(FockOperator { entries: m })
}

pub fn creation_matrix(dim: usize) -> Result<FockOperator> {
    Ok(annihilator_matrix(dim)?.adjoint())
}

/// `q0 = (a0 + a0^dag) / sqrt 2`.
pub fn position_matrix(dim: usize) -> Result<FockOperator> {
    let a = annihilator_matrix(dim)?;
    Ok((&a + &a.adjoint()).scale(C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0)))
}

/// `p0 = (a0 - a0^dag) / (i sqrt 2)`.
pub fn momentum_matrix(dim: usize) -> Result<FockOperator> {
    let a = annihilator_matrix(dim)?;
    Ok((&a - &a.adjoint()).scale(C64::new(0.0, -std::f64::consts::FRAC_1_SQRT_2)))
}

/// `N0 = a0^dag a0`, exactly diagonal.
pub fn number_matrix(dim: usize) -> Result<FockOperator> {
    if dim < 2 {
        return Err(Error::InvalidDimension { dim, reason: "ladder operators need dim >= 2" });
    }
    let diag: Vec<C64> = (0..dim).map(|n| C64::new(n as f64, 0.0)).collect();
    Ok(FockOperator::from_diagonal(&diag))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn annihilator_entries() {
        let a = annihilator_matrix(4).unwrap();
        assert_eq!(a.get(0, 1), C64::new(1.0, 0.0));
        assert_eq!(a.get(1, 2), C64::new(2f64.sqrt(), 0.0));
        assert_eq!(a.get(2, 3), C64::new(3f64.sqrt(), 0.0));
        let nonzero = a.matrix().iter().filter(|z| z.norm() > 0.0).count();
        assert_eq!(nonzero, 3);
    }

    #[test]
    fn commutator_truncation_artifact() {
        let a = annihilator_matrix(4).unwrap();
        let c = a.commutator(&a.adjoint());
        let diag: Vec<f64> = (0..4).map(|i| c.get(i, i).re).collect();
        for (got, want) in diag.iter().zip([1.0, 1.0, 1.0, -3.0]) {
            assert!((got - want).abs() < 1e-14);
        }
    }

    #[test]
    fn commutator_is_identity_on_leading_block() {
        let a = annihilator_matrix(64).unwrap();
        let c = a.commutator(&a.adjoint());
        assert!(c.block_residual(&FockOperator::identity(64), 63) < 1e-12);
    }

    #[test]
    fn small_dimension_rejected() {
        assert!(matches!(annihilator_matrix(1), Err(Error::InvalidDimension { .. })));
    }

    #[test]
    fn ladder_action_on_basis() {
        let dim = 16;
        let a = annihilator_matrix(dim).unwrap();
        for n in 1..dim {
            let out = a.apply(&FockVector::basis(dim, n).unwrap()).unwrap();
            let want = FockVector::basis(dim, n - 1).unwrap().scale(C64::new((n as f64).sqrt(), 0.0));
            assert_eq!(out, want);
        }
    }

    #[test]
    fn tail_estimate_uses_last_eighth() {
        let mut c = vec![C64::new(0.0, 0.0); 16];
        c[0] = C64::new(1.0, 0.0);
        c[15] = C64::new(3.0, 4.0);
        let v = FockVector::new(c).unwrap();
        assert!((v.tail_estimate() - 5.0).abs() < 1e-15);
        assert!(!v.is_converged());
        assert!(FockVector::basis(16, 0).unwrap().is_converged());
    }

    #[test]
    fn non_finite_rejected() {
        assert!(FockVector::new(vec![C64::new(f64::NAN, 0.0)]).is_err());
        assert!(FockVector::new(vec![]).is_err());
    }
}

//! Parametric oscillator built from pseudo-bosonic operators, solved in the
//! interaction picture through the capital operators
//! `A(t) = a cosh(2Λt) + b sinh(2Λt)`, `B(t) = b cosh(2Λt) + a sinh(2Λt)`
//! and the quadratures `X+ = (A + B)/2`, `X- = (A - B)/(2i)`.
//!
//! The cavity-loss approximation `H ≈ H0 + H1` concerns a shifted-boson model
//! and is not computed here.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::deformations::DeformationModel;
use crate::error::{Error, Result};
use crate::numerics::{dopri5, leading_block, matrix_exponential, FockOperator, FockVector, OdeStats};
use crate::operators::{deformed_squeeze, BuildRoute, SqueezeKind, SqueezeParams, EXP_TOL};

/// Accepted open interval for `ode_tol`.
pub const ODE_TOL_RANGE: (f64, f64) = (1e-12, 1e-6);
/// Largest `|2Λ|` accepted by the identification.
pub const MAX_IDENTIFICATION_SQUEEZE: f64 = 0.8;
/// Residual gap within which two pairings count as tied.
pub const IDENTIFICATION_TIE_TOL: f64 = 1e-12;
/// A variance whose real part is below `-VARIANCE_FLAG_TOL` is flagged.
pub const VARIANCE_FLAG_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DynamicsParams {
    #[serde(default)]
    pub omega: f64,
    pub lambda: f64,
    pub t: f64,
}

impl DynamicsParams {
    pub fn new(omega: f64, lambda: f64, t: f64) -> Result<Self> {
        let p = Self { omega, lambda, t };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega.is_finite() && self.lambda.is_finite() && self.t.is_finite()) {
            return Err(Error::Domain("dynamics parameters must be finite".into()));
        }
        if self.omega < 0.0 {
            return Err(Error::Domain(format!("omega = {} is negative", self.omega)));
        }
        Ok(())
    }

    fn at(&self, t: f64) -> Self {
        Self { t, ..*self }
    }

    fn phase(&self) -> f64 {
        2.0 * self.lambda * self.t
    }
}

#[derive(Debug, Clone)]
pub struct CapitalOps {
    pub a_t: FockOperator,
    pub b_t: FockOperator,
    pub xplus_t: FockOperator,
    pub xminus_t: FockOperator,
}

impl CapitalOps {
    fn from_ab(a_t: DMatrix<C64>, b_t: DMatrix<C64>) -> Result<Self> {
        let xplus = (&a_t + &b_t) * C64::new(0.5, 0.0);
        let xminus = (&a_t - &b_t) * C64::new(0.0, -0.5);
        Ok(Self {
            a_t: FockOperator::new(a_t)?,
            b_t: FockOperator::new(b_t)?,
            xplus_t: FockOperator::new(xplus)?,
            xminus_t: FockOperator::new(xminus)?,
        })
    }

    /// Largest entrywise deviation over all four operators.
    pub fn max_deviation(&self, other: &CapitalOps) -> f64 {
        [
            (&self.a_t, &other.a_t),
            (&self.b_t, &other.b_t),
            (&self.xplus_t, &other.xplus_t),
            (&self.xminus_t, &other.xminus_t),
        ]
        .iter()
        .map(|(x, y)| (x.matrix() - y.matrix()).iter().map(|v| v.norm()).fold(0.0, f64::max))
        .fold(0.0, f64::max)
    }

    /// `max ||X±(t) - X±(0) e^{±2Λt}||_F` against the capital operators at `t = 0`.
    pub fn growth_residual(&self, initial: &CapitalOps, params: &DynamicsParams) -> f64 {
        let g = params.phase().exp();
        let plus = (self.xplus_t.matrix() - initial.xplus_t.matrix() * C64::new(g, 0.0)).norm();
        let minus = (self.xminus_t.matrix() - initial.xminus_t.matrix() * C64::new(1.0 / g, 0.0)).norm();
        plus.max(minus)
    }

    /// `||[A, B] - I||_F` on the leading block.
    pub fn commutator_residual(&self) -> f64 {
        let dim = self.a_t.dim();
        self.a_t.commutator(&self.b_t).block_residual(&FockOperator::identity(dim), leading_block(dim))
    }
}

pub fn capital_ops_analytic(model: &DeformationModel, params: &DynamicsParams) -> Result<CapitalOps> {
    params.validate()?;
    let (ch, sh) = (params.phase().cosh(), params.phase().sinh());
    let a = model.ladder_a().matrix();
    let b = model.ladder_b().matrix();
    CapitalOps::from_ab(a * C64::new(ch, 0.0) + b * C64::new(sh, 0.0), b * C64::new(ch, 0.0) + a * C64::new(sh, 0.0))
}

#[derive(Debug, Clone)]
pub struct NumericCapitalOps {
    pub ops: CapitalOps,
    pub stats: OdeStats,
}

/// Integrates `A' = 2Λ B`, `B' = 2Λ A` from `(a, b)` at `t = 0`.
pub fn capital_ops_numeric(model: &DeformationModel, params: &DynamicsParams, ode_tol: f64) -> Result<NumericCapitalOps> {
    params.validate()?;
    if !(ode_tol > ODE_TOL_RANGE.0 && ode_tol < ODE_TOL_RANGE.1) {
        return Err(Error::InvalidTolerance(ode_tol));
    }
    let dim = model.dim();
    let n = dim * dim;
    let mut y0 = DVector::zeros(2 * n);
    y0.rows_mut(0, n).copy_from(&DVector::from_column_slice(model.ladder_a().matrix().as_slice()));
    y0.rows_mut(n, n).copy_from(&DVector::from_column_slice(model.ladder_b().matrix().as_slice()));
    let rate = C64::new(2.0 * params.lambda, 0.0);
    let rhs = |_: f64, y: &DVector<C64>| {
        let mut dy = DVector::zeros(2 * n);
        dy.rows_mut(0, n).copy_from(&(y.rows(n, n) * rate));
        dy.rows_mut(n, n).copy_from(&(y.rows(0, n) * rate));
        dy
    };
    let (y, stats) = dopri5(rhs, 0.0, y0, params.t, ode_tol)?;
    let a_t = DMatrix::from_column_slice(dim, dim, y.rows(0, n).as_slice());
    let b_t = DMatrix::from_column_slice(dim, dim, y.rows(n, n).as_slice());
    Ok(NumericCapitalOps { ops: CapitalOps::from_ab(a_t, b_t)?, stats })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NumberElements {
    pub t: f64,
    /// `<Psi0, B(t)A(t) phi0>`
    pub psi_phi: C64,
    /// `<phi0, B(t)A(t) phi0>`
    pub phi_phi: C64,
    /// `<phi0, N(t)^dag Psi0>`
    pub adjoint: C64,
    pub psi_phi_expected: f64,
    pub phi_phi_expected: C64,
}

impl NumberElements {
    pub fn psi_phi_residual(&self) -> f64 {
        (self.psi_phi - self.psi_phi_expected).norm()
    }

    pub fn phi_phi_residual(&self) -> f64 {
        (self.phi_phi - self.phi_phi_expected).norm()
    }

    pub fn adjoint_residual(&self) -> f64 {
        (self.adjoint - self.psi_phi_expected).norm()
    }

    pub fn max_residual(&self) -> f64 {
        self.psi_phi_residual().max(self.phi_phi_residual()).max(self.adjoint_residual())
    }
}

fn ground_pair(model: &DeformationModel) -> Result<(FockVector, FockVector)> {
    Ok((model.phi_fock(0)?, model.psi_fock(0)?))
}

pub fn number_matrix_elements(model: &DeformationModel, params: &DynamicsParams) -> Result<NumberElements> {
    let ops = capital_ops_analytic(model, params)?;
    let (phi0, psi0) = ground_pair(model)?;
    let n_t = FockOperator::new(ops.b_t.matrix() * ops.a_t.matrix())?;
    let n_phi = n_t.apply(&phi0)?;
    let psi_phi = psi0.inner(&n_phi)?;
    let phi_phi = phi0.inner(&n_phi)?;
    let adjoint = phi0.inner(&n_t.adjoint().apply(&psi0)?)?;
    let (ch, sh) = (params.phase().cosh(), params.phase().sinh());
    let b2_phi = model.ladder_b().apply(&model.ladder_b().apply(&phi0)?)?;
    let cross = phi0.inner(&b2_phi)?;
    Ok(NumberElements {
        t: params.t,
        psi_phi,
        phi_phi,
        adjoint,
        psi_phi_expected: sh * sh,
        phi_phi_expected: C64::new(phi0.norm().powi(2) * sh * sh, 0.0) + cross * (sh * ch),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureVariance {
    pub t: f64,
    pub var_plus: C64,
    pub var_minus: C64,
    pub dx_plus: f64,
    pub dx_minus: f64,
    pub product: f64,
    pub ratio: f64,
    /// `|<Psi0, [X+, X-] phi0>| / 2`
    pub heisenberg_bound: f64,
    pub flagged: bool,
}

/// `(δG)^2 = <Psi0, G^2 phi0> - <Psi0, G phi0>^2` for `G = X±(t)`.
pub fn quadrature_variance_product(model: &DeformationModel, params: &DynamicsParams) -> Result<QuadratureVariance> {
    let ops = capital_ops_analytic(model, params)?;
    let (phi0, psi0) = ground_pair(model)?;
    let variance = |g: &FockOperator| -> Result<C64> {
        let g_phi = g.apply(&phi0)?;
        let first = psi0.inner(&g_phi)?;
        Ok(psi0.inner(&g.apply(&g_phi)?)? - first * first)
    };
    let var_plus = variance(&ops.xplus_t)?;
    let var_minus = variance(&ops.xminus_t)?;
    let flagged = var_plus.re < -VARIANCE_FLAG_TOL || var_minus.re < -VARIANCE_FLAG_TOL;
    let dx_plus = var_plus.re.max(0.0).sqrt();
    let dx_minus = var_minus.re.max(0.0).sqrt();
    let comm = ops.xplus_t.commutator(&ops.xminus_t);
    let heisenberg_bound = 0.5 * psi0.inner(&comm.apply(&phi0)?)?.norm();
    Ok(QuadratureVariance {
        t: params.t,
        var_plus,
        var_minus,
        dx_plus,
        dx_minus,
        product: dx_plus * dx_minus,
        ratio: dx_plus / dx_minus,
        heisenberg_bound,
        flagged,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrajectoryRow {
    pub t: f64,
    pub psi_phi: f64,
    pub psi_phi_imag: f64,
    pub expected: f64,
    pub phi_phi: C64,
    pub variance_product: f64,
    pub flagged: bool,
}

/// Number elements and variance product over `times`, evaluated in parallel.
pub fn trajectory(model: &DeformationModel, params: &DynamicsParams, times: &[f64]) -> Result<Vec<TrajectoryRow>> {
    times
        .par_iter()
        .map(|&t| {
            let p = params.at(t);
            let el = number_matrix_elements(model, &p)?;
            let var = quadrature_variance_product(model, &p)?;
            Ok(TrajectoryRow {
                t,
                psi_phi: el.psi_phi.re,
                psi_phi_imag: el.psi_phi.im,
                expected: el.psi_phi_expected,
                phi_phi: el.phi_phi,
                variance_product: var.product,
                flagged: var.flagged,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FieldSample {
    pub x: f64,
    pub amp_plus: f64,
    pub amp_minus: f64,
    /// `sin(x - omega t)`
    pub phase_sin: f64,
    /// `cos(x - omega t)`
    pub phase_cos: f64,
}

/// Amplitudes `2e^{2Λt}` (on `sin`) and `2e^{-2Λt}` (on `cos`) of the field
/// quadratures at each sample, with `k = 1`.
pub fn field_quadrature_profile(params: &DynamicsParams, x_samples: &[f64]) -> Vec<FieldSample> {
    let amp_plus = 2.0 * params.phase().exp();
    let amp_minus = 2.0 * (-params.phase()).exp();
    x_samples
        .iter()
        .map(|&x| {
            let arg = x - params.omega * params.t;
            FieldSample { x, amp_plus, amp_minus, phase_sin: arg.sin(), phase_cos: arg.cos() }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Pairing {
    /// `"exp(-iH)"` or `"exp(+iH)"`.
    pub exponential: String,
    /// Argument of the deformed squeeze operator.
    pub z: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentificationReport {
    pub lambda: f64,
    pub block: usize,
    pub route: BuildRoute,
    pub pairings: Vec<Pairing>,
    pub best: usize,
}

impl IdentificationReport {
    pub fn best_pairing(&self) -> &Pairing {
        &self.pairings[self.best]
    }

    pub fn min_residual(&self) -> f64 {
        self.best_pairing().residual
    }

    /// Residual of a named pairing.
    pub fn residual(&self, exponential: &str, z: f64) -> Option<f64> {
        self.pairings.iter().find(|p| p.exponential == exponential && p.z == z).map(|p| p.residual)
    }
}

/// Compares `exp(∓iH)` for `H = iΛ(b^2 - a^2)` (`omega = 0`, unit time) with
/// `𝒮(±2Λ)` on the leading `dim/2` block, over all four sign pairings.
pub fn squeeze_hamiltonian_identification(model: &DeformationModel, lambda: f64) -> Result<IdentificationReport> {
    if !lambda.is_finite() {
        return Err(Error::Domain(format!("lambda = {lambda} is not finite")));
    }
    if (2.0 * lambda).abs() > MAX_IDENTIFICATION_SQUEEZE {
        return Err(Error::TruncationUnsafe(format!(
            "|2 lambda| = {} exceeds {MAX_IDENTIFICATION_SQUEEZE}",
            (2.0 * lambda).abs()
        )));
    }
    let a = model.ladder_a().matrix();
    let b = model.ladder_b().matrix();
    let h = (b * b - a * a) * C64::new(0.0, lambda);
    let exp_minus = matrix_exponential(&FockOperator::new(&h * C64::new(0.0, -1.0))?, EXP_TOL)?;
    let exp_plus = matrix_exponential(&FockOperator::new(&h * C64::new(0.0, 1.0))?, EXP_TOL)?;
    let route = if model.is_regular() { BuildRoute::Conjugation } else { BuildRoute::Bch };
    let block = model.dim() / 2;
    let mut pairings = Vec::with_capacity(4);
    for (exponential, e, z) in [
        ("exp(-iH)", &exp_minus, -2.0 * lambda),
        ("exp(+iH)", &exp_plus, 2.0 * lambda),
        ("exp(-iH)", &exp_minus, 2.0 * lambda),
        ("exp(+iH)", &exp_plus, -2.0 * lambda),
    ] {
        let (s, _) = deformed_squeeze(model, &SqueezeParams::new(C64::new(z, 0.0)), SqueezeKind::S, route)?;
        pairings.push(Pairing { exponential: exponential.into(), z, residual: e.block_residual(&s, block) });
    }
    // the first two are inverse forms of one identity; ties keep the earlier entry
    let min = pairings.iter().map(|p| p.residual).fold(f64::INFINITY, f64::min);
    let best = pairings.iter().position(|p| p.residual <= min + IDENTIFICATION_TIE_TOL).unwrap_or(0);
    Ok(IdentificationReport { lambda, block, route, pairings, best })
}

//! Metric-dependent statistics, resolution-of-identity residuals and
//! convergence radii.

pub mod radius;

pub use radius::{
    convergence_radius_empirical, convergence_radius_theoretical, laplace_heine_check, radius_report,
    swanson_radius_displayed_form, swanson_radius_theorem_form, BoundSpec, EmpiricalRadius, LaplaceHeine,
    RadiusAgreement, RadiusReport,
};
pub use crate::deformations::swanson_norm_sq;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::deformations::{metric_eta, DeformationModel};
use crate::error::{Error, Result};
use crate::numerics::{
    complex_plane_integral, momentum_matrix, position_matrix, FockOperator, FockVector, QuadratureSpec,
};
use crate::operators::SqueezeParams;
use crate::states::{coherent, coherent_coefficients, displace_vector, squeezed_vacuum_coefficients};

/// Allowed deviation of `<chi, eta chi>` from 1.
pub const NORMALIZATION_TOL: f64 = 1e-8;

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// `<x, eta y>`.
pub fn metric_inner(metric: &FockOperator, x: &FockVector, y: &FockVector) -> Result<C64> {
    x.inner(&metric.apply(y)?)
}

/// `chi / sqrt(<chi, eta chi>)` and the raw value `<chi, eta chi>`.
pub fn eta_normalize(metric: &FockOperator, state: &FockVector) -> Result<(FockVector, f64)> {
    let raw = metric_inner(metric, state, state)?.re;
    if !(raw > 0.0) {
        return Err(Error::NotNormalized { measured: c(raw) });
    }
    Ok((state.scale(c(1.0 / raw.sqrt())), raw))
}

/// `<chi, op^2 chi>_eta - <chi, op chi>_eta^2` for an eta-normalised `chi`.
pub fn deformed_variance(metric: &FockOperator, op: &FockOperator, state: &FockVector) -> Result<C64> {
    let norm = metric_inner(metric, state, state)?;
    if (norm - c(1.0)).norm() > NORMALIZATION_TOL {
        return Err(Error::NotNormalized { measured: norm });
    }
    let once = op.apply(state)?;
    let twice = op.apply(&once)?;
    let mean = metric_inner(metric, state, &once)?;
    Ok(metric_inner(metric, state, &twice)? - mean * mean)
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Uncertainty {
    /// `(Delta_eta q)` on `phi_z`, `q = T q0 T^{-1}`.
    pub dq: f64,
    pub dp: f64,
    pub product: f64,
    /// `(Delta_{eta^{-1}} q†)` on `Psi_z`.
    pub mirror_dq: f64,
    pub mirror_dp: f64,
    pub mirror_product: f64,
    /// `(Delta p0)` on the standard coherent state.
    pub standard_dp: f64,
    /// `<phi_z, eta phi_z>` before normalisation.
    pub raw_norm: f64,
    /// Largest imaginary part among the four variances.
    pub max_imag: f64,
}

/// Deformed position/momentum spreads of the bi-coherent states.
pub fn uncertainty_saturation(model: &DeformationModel, z: C64) -> Result<Uncertainty> {
    let s = model.require_similarity("deformed uncertainty")?;
    let dim = model.dim();
    let q0 = position_matrix(dim)?;
    let p0 = momentum_matrix(dim)?;
    let q = &(&s.t * &q0) * &s.t_inv;
    let p = &(&s.t * &p0) * &s.t_inv;
    let eta = metric_eta(model)?.operator;
    let eta_inv = &s.t * &s.t.adjoint();
    let phi = coherent(z, dim)?;
    let (phi_z, raw_norm) = eta_normalize(&eta, &s.t.apply(&phi)?)?;
    let (psi_z, _) = eta_normalize(&eta_inv, &s.t_inv.adjoint().apply(&phi)?)?;
    let vq = deformed_variance(&eta, &q, &phi_z)?;
    let vp = deformed_variance(&eta, &p, &phi_z)?;
    let mq = deformed_variance(&eta_inv, &q.adjoint(), &psi_z)?;
    let mp = deformed_variance(&eta_inv, &p.adjoint(), &psi_z)?;
    let (phi_n, _) = eta_normalize(&FockOperator::identity(dim), &phi)?;
    let sp = deformed_variance(&FockOperator::identity(dim), &p0, &phi_n)?;
    let max_imag = [vq, vp, mq, mp].iter().map(|v| v.im.abs()).fold(0.0, f64::max);
    let (dq, dp) = (vq.re.sqrt(), vp.re.sqrt());
    let (mirror_dq, mirror_dp) = (mq.re.sqrt(), mp.re.sqrt());
    Ok(Uncertainty {
        dq,
        dp,
        product: dq * dp,
        mirror_dq,
        mirror_dp,
        mirror_product: mirror_dq * mirror_dp,
        standard_dp: sp.re.sqrt(),
        raw_norm,
        max_imag,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EtaStatistics {
    /// `|<phi_n, phi_z>_eta|^2`.
    pub weights: Vec<f64>,
    pub total_probability: f64,
    /// `max_n |weight_n - e^{-|z|^2} |z|^{2n} / n!|`.
    pub poisson_deviation: f64,
    /// `(Delta_eta N)^2` on `phi_z`, `N = b a`.
    pub variance_n: C64,
    /// `sum_n |<Psi_n, Psi_z>_{eta^{-1}}|^2`.
    pub mirror_total: f64,
    /// `(Delta_{eta^{-1}} N†)^2` on `Psi_z`.
    pub mirror_variance_n: C64,
    /// `sum_n |<e_n, phi_z>|^2`, which is not 1 unless `T` is unitary.
    pub unweighted_total: f64,
}

/// eta-Poisson statistics of the bi-coherent state `phi_z`.
pub fn eta_statistics(model: &DeformationModel, z: C64) -> Result<EtaStatistics> {
    let s = model.require_similarity("eta statistics")?;
    let dim = model.dim();
    let eta = metric_eta(model)?.operator;
    let eta_inv = &s.t * &s.t.adjoint();
    let phi = coherent(z, dim)?;
    let phi_z = s.t.apply(&phi)?;
    let psi_z = s.t_inv.adjoint().apply(&phi)?;
    let mut weights = Vec::with_capacity(dim);
    let mut mirror_total = 0.0;
    for n in 0..dim {
        weights.push(metric_inner(&eta, &model.phi_fock(n)?, &phi_z)?.norm_sqr());
        mirror_total += metric_inner(&eta_inv, &model.psi_fock(n)?, &psi_z)?.norm_sqr();
    }
    let poisson = coherent_coefficients(z, dim);
    let poisson_deviation = weights.iter().zip(&poisson).map(|(w, p)| (w - p.norm_sqr()).abs()).fold(0.0, f64::max);
    let n_op = model.number_operator();
    let (phi_norm, _) = eta_normalize(&eta, &phi_z)?;
    let (psi_norm, _) = eta_normalize(&eta_inv, &psi_z)?;
    Ok(EtaStatistics {
        total_probability: weights.iter().sum(),
        weights,
        poisson_deviation,
        variance_n: deformed_variance(&eta, &n_op, &phi_norm)?,
        mirror_total,
        mirror_variance_n: deformed_variance(&eta_inv, &n_op.adjoint(), &psi_norm)?,
        unweighted_total: phi_z.norm().powi(2),
    })
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct IdentityResolution {
    /// `(1/pi) ∫ <f, tau^alpha_z> <kappa^alpha_z, g> d^2 alpha`.
    pub integral: C64,
    pub exact: C64,
    pub residual: C64,
    /// `sum_{n < dim} <f, phi_n> <Psi_n, g> - <f, g>`.
    pub discrete_residual: C64,
}

/// Resolution of the identity by the coherent bi-squeezed family (`z = 0`
/// gives the bi-coherent family).
///
/// With `tau^alpha = T W(alpha) psi0` and `kappa^alpha = (T^{-1})† W(alpha) psi0`,
/// `<f, tau^alpha> = <W(-alpha) T† f, psi0>` and
/// `<kappa^alpha, g> = conj <W(-alpha) T^{-1} g, psi0>`; `W(-alpha)` acts on the
/// low-support vectors `T† f`, `T^{-1} g` in normal order, which is exact below
/// the truncation.
pub fn identity_resolution_residual(
    model: &DeformationModel,
    p: &SqueezeParams,
    f: &FockVector,
    g: &FockVector,
    spec: &QuadratureSpec,
) -> Result<IdentityResolution> {
    let s = model.require_similarity("identity resolution")?;
    let psi0 = squeezed_vacuum_coefficients(p, model.dim());
    let tf = s.t.adjoint().apply(f)?;
    let tg = s.t_inv.apply(g)?;
    let integrand = |alpha: C64| -> Result<C64> {
        let left = displace_vector(&tf, -alpha).inner(&psi0)?;
        let right = displace_vector(&tg, -alpha).inner(&psi0)?.conj();
        Ok(left * right)
    };
    let integral = complex_plane_integral(integrand, spec)?;
    let exact = f.inner(g)?;
    Ok(IdentityResolution {
        integral,
        exact,
        residual: integral - exact,
        discrete_residual: quasi_basis_residual(model, f, g, model.dim())?,
    })
}

/// `sum_{n < nmax} <f, phi_n> <Psi_n, g> - <f, g>`.
pub fn quasi_basis_residual(model: &DeformationModel, f: &FockVector, g: &FockVector, nmax: usize) -> Result<C64> {
    let mut acc = C64::new(0.0, 0.0);
    for n in 0..nmax.min(model.dim()) {
        acc += f.inner(&model.phi_fock(n)?)? * model.psi_fock(n)?.inner(g)?;
    }
    Ok(acc - f.inner(g)?)
}

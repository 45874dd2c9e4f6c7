//! Coherent, squeezed, bi-coherent and bi-squeezed states.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::deformations::{BasisVector, DeformationModel};
use crate::error::{Error, Result};
use crate::numerics::{annihilator_matrix, leading_block, special::squeeze_weights, FockOperator, FockVector};
use crate::operators::{
    check_displacement, deformed_displacement, deformed_squeeze, displacement, BuildRoute, DisplacementKind,
    SqueezeKind, SqueezeParams, MAX_TANH_R,
};

/// Term cap for state series.
pub const STATE_SERIES_CAP: usize = 400;
/// Relative term size counted as small by the state series.
pub const STATE_SERIES_REL_TOL: f64 = 1e-14;
const SMALL_RUN: usize = 3;

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// `e^{-|z|^2/2} z^n / sqrt(n!)` for `n < len`, by the ratio recurrence.
pub fn coherent_coefficients(z: C64, len: usize) -> Vec<C64> {
    let mut out = Vec::with_capacity(len);
    let mut cur = c((-z.norm_sqr() / 2.0).exp());
    for n in 0..len {
        out.push(cur);
        cur = cur * z / ((n + 1) as f64).sqrt();
    }
    out
}

/// `Phi_z = W(z) e0`.
pub fn coherent(z: C64, dim: usize) -> Result<FockVector> {
    check_displacement(z, dim)?;
    FockVector::new(coherent_coefficients(z, dim))
}

/// `S(z) e0` without the tail check.
pub fn squeezed_vacuum_coefficients(p: &SqueezeParams, dim: usize) -> FockVector {
    let w = squeeze_weights(dim.div_ceil(2));
    let e = c(p.lambda.exp());
    let mut coeffs = vec![c(0.0); dim];
    let mut pow = c(1.0);
    for (k, wk) in w.iter().enumerate() {
        coeffs[2 * k] = e * pow * *wk;
        pow *= p.lambda_b;
    }
    FockVector::from_dvector_unchecked(coeffs.into())
}

/// `psi^0_z = S(z) e0` with `c_{2k} = e^lambda lambda_b^k sqrt((2k)!)/k!`.
pub fn squeezed_vacuum(p: &SqueezeParams, dim: usize) -> Result<FockVector> {
    if p.tanh_r() > MAX_TANH_R {
        return Err(Error::TruncationUnsafe(format!("tanh r = {:.4} exceeds {MAX_TANH_R}", p.tanh_r())));
    }
    let v = squeezed_vacuum_coefficients(p, dim);
    if !v.is_converged() {
        return Err(Error::TruncationUnsafe(format!(
            "squeezed vacuum tail {:.3e} at dim {dim} exceeds tolerance",
            v.tail_estimate()
        )));
    }
    Ok(v)
}

/// `psi^alpha_z = W(alpha) S(z) e0` and its eigen-relation residuals.
#[derive(Debug, Clone)]
pub struct CoherentSqueezed {
    pub state: FockVector,
    /// `||[cosh r (a0 - alpha) + e^{i theta} sinh r (a0† - ᾱ)] psi||`
    pub vacuum_residual: f64,
    /// `||(a0 + zeta a0†) psi - (alpha + zeta ᾱ) psi||` with `zeta = e^{i theta} tanh r`.
    pub eigen_residual: f64,
    /// `||(a0 + z a0†) psi - alpha psi||`, the relation as usually written; not
    /// an identity, reported for comparison.
    pub literal_eigen_residual: f64,
}

pub fn coherent_squeezed(alpha: C64, p: &SqueezeParams, dim: usize) -> Result<CoherentSqueezed> {
    let vac = squeezed_vacuum(p, dim)?;
    let state = displacement(alpha, dim)?.apply(&vac)?;
    let a0 = annihilator_matrix(dim)?;
    let rows = leading_block(dim);
    let (vacuum_residual, eigen_residual, literal_eigen_residual) =
        squeeze_eigen_residuals(&a0, &a0.adjoint(), &state, alpha, p, rows)?;
    Ok(CoherentSqueezed { state, vacuum_residual, eigen_residual, literal_eigen_residual })
}

/// The three relations for a pair `(x, y)` playing the roles of `(a0, a0†)`.
fn squeeze_eigen_residuals(
    x: &FockOperator,
    y: &FockOperator,
    v: &FockVector,
    alpha: C64,
    p: &SqueezeParams,
    rows: usize,
) -> Result<(f64, f64, f64)> {
    let xv = x.apply(v)?;
    let yv = y.apply(v)?;
    let zero = FockVector::zeros(v.dim());
    let ch = c(p.r.cosh());
    let sh = C64::from_polar(p.r.sinh(), p.theta);
    let vac = &(&xv.scale(ch) - &v.scale(ch * alpha)) + &(&yv.scale(sh) - &v.scale(sh * alpha.conj()));
    let zeta = p.zeta();
    let eig = &(&xv + &yv.scale(zeta)) - &v.scale(alpha + zeta * alpha.conj());
    let lit = &(&xv + &yv.scale(p.z)) - &v.scale(alpha);
    Ok((vac.distance_leading(&zero, rows)?, eig.distance_leading(&zero, rows)?, lit.distance_leading(&zero, rows)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Construction {
    /// `T` (or `(T^{-1})†`) applied to the standard state.
    TAction,
    /// Deformed operator applied to `phi_0` (or `Psi_0`).
    OperatorAction,
    /// Expansion over the biorthogonal families.
    Series,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SeriesDiagnostics {
    pub terms_used: usize,
    pub last_term_norm: f64,
    /// Model series radius minus `r` (infinite for bounded families).
    pub estimated_radius_margin: f64,
    /// `true` when the small-term rule ended the sum; `false` when the
    /// available basis ran out first.
    pub stopped_by_rule: bool,
}

/// A `phi`-side state with its `Psi`-side partner.
#[derive(Debug, Clone)]
pub struct BiStatePair {
    pub left: BasisVector,
    pub right: BasisVector,
    pub construction: Construction,
    /// `<left, right>`.
    pub pairing: C64,
    pub diagnostics: Option<SeriesDiagnostics>,
}

impl BiStatePair {
    fn new(left: BasisVector, right: BasisVector, construction: Construction, diagnostics: Option<SeriesDiagnostics>) -> Result<Self> {
        let pairing = left.inner(&right)?;
        Ok(Self { left, right, construction, pairing, diagnostics })
    }

    pub fn left_fock(&self) -> Result<&FockVector> {
        match &self.left {
            BasisVector::Fock(v) => Ok(v),
            BasisVector::Grid(_) => Err(Error::RepresentationMismatch("state lives on a grid")),
        }
    }

    pub fn right_fock(&self) -> Result<&FockVector> {
        match &self.right {
            BasisVector::Fock(v) => Ok(v),
            BasisVector::Grid(_) => Err(Error::RepresentationMismatch("state lives on a grid")),
        }
    }

    /// Both sides converged in the tail sense (grid states always pass).
    pub fn is_converged(&self) -> bool {
        let ok = |b: &BasisVector| match b {
            BasisVector::Fock(v) => v.is_converged(),
            BasisVector::Grid(_) => true,
        };
        ok(&self.left) && ok(&self.right)
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Side {
    Phi,
    Psi,
}

fn basis(model: &DeformationModel, side: Side, n: usize) -> Result<BasisVector> {
    match side {
        Side::Phi => model.phi(n),
        Side::Psi => model.psi(n),
    }
}

fn available(model: &DeformationModel) -> usize {
    match model.kind() {
        crate::deformations::ModelKind::Swanson(d) => d.n_max() + 1,
        _ => model.dim(),
    }
}

fn axpy(acc: BasisVector, k: C64, v: &BasisVector) -> Result<BasisVector> {
    Ok(match (acc, v) {
        (BasisVector::Fock(a), BasisVector::Fock(b)) => BasisVector::Fock(&a + &b.scale(k)),
        (BasisVector::Grid(a), BasisVector::Grid(b)) => BasisVector::Grid(a.axpy(k, b)?),
        _ => return Err(Error::RepresentationMismatch("series mixes representations")),
    })
}

/// `sum_k coeff(k) basis(index(k))` in ascending `k`, with the small-term stop.
fn series_sum(
    model: &DeformationModel,
    side: Side,
    coeff: impl Fn(usize) -> C64,
    index: impl Fn(usize) -> usize,
    radius_margin: f64,
) -> Result<(BasisVector, SeriesDiagnostics)> {
    let limit = available(model);
    let first = basis(model, side, index(0))?;
    let mut acc = match &first {
        BasisVector::Fock(v) => BasisVector::Fock(v.scale(coeff(0))),
        BasisVector::Grid(f) => BasisVector::Grid(f.scale(coeff(0))),
    };
    let mut run = 0;
    let mut last_term_norm = acc.norm();
    let mut k = 1;
    let mut stopped_by_rule = false;
    while k < STATE_SERIES_CAP && index(k) < limit {
        let v = basis(model, side, index(k))?;
        let ck = coeff(k);
        last_term_norm = ck.norm() * v.norm();
        acc = axpy(acc, ck, &v)?;
        k += 1;
        if last_term_norm <= STATE_SERIES_REL_TOL * acc.norm() {
            run += 1;
            if run == SMALL_RUN {
                stopped_by_rule = true;
                break;
            }
        } else {
            run = 0;
        }
    }
    if !stopped_by_rule && k >= STATE_SERIES_CAP {
        return Err(Error::SeriesStalled { terms: k, last_term_norm });
    }
    Ok((acc, SeriesDiagnostics { terms_used: k, last_term_norm, estimated_radius_margin: radius_margin, stopped_by_rule }))
}

/// Bi-coherent pair `(phi_z, Psi_z)`.
pub fn bi_coherent(model: &DeformationModel, z: C64, construction: Construction) -> Result<BiStatePair> {
    check_displacement(z, model.dim())?;
    match construction {
        Construction::TAction => {
            let s = model.require_similarity("T-action construction")?;
            let phi = coherent(z, model.dim())?;
            BiStatePair::new(
                BasisVector::Fock(s.t.apply(&phi)?),
                BasisVector::Fock(s.t_inv.adjoint().apply(&phi)?),
                construction,
                None,
            )
        }
        Construction::OperatorAction => {
            let (u, _) = deformed_displacement(model, z, DisplacementKind::U, BuildRoute::Series)?;
            let (v, _) = deformed_displacement(model, z, DisplacementKind::V, BuildRoute::Series)?;
            BiStatePair::new(
                BasisVector::Fock(u.apply(&model.phi_fock(0)?)?),
                BasisVector::Fock(v.apply(&model.psi_fock(0)?)?),
                construction,
                None,
            )
        }
        Construction::Series => {
            let coeffs = coherent_coefficients(z, available(model));
            let margin = f64::INFINITY;
            let (left, dl) = series_sum(model, Side::Phi, |n| coeffs[n], |n| n, margin)?;
            let (right, dr) = series_sum(model, Side::Psi, |n| coeffs[n], |n| n, margin)?;
            let diag = if dl.terms_used >= dr.terms_used { dl } else { dr };
            BiStatePair::new(left, right, construction, Some(diag))
        }
    }
}

/// Coefficient used in the `kappa` series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KappaCoefficient {
    /// `lambda_b^k`, the expansion of `(T^{-1})† S(z) e0`.
    LambdaB,
    /// `lambda_a^k`; does not reproduce `kappa_z`, kept for comparison.
    LambdaA,
}

/// Bi-squeezed pair `(tau_z, kappa_z)` by one construction.
pub fn bi_squeezed(model: &DeformationModel, p: &SqueezeParams, construction: Construction) -> Result<BiStatePair> {
    bi_squeezed_with(model, p, construction, KappaCoefficient::LambdaB)
}

pub fn bi_squeezed_with(
    model: &DeformationModel,
    p: &SqueezeParams,
    construction: Construction,
    kappa: KappaCoefficient,
) -> Result<BiStatePair> {
    if p.tanh_r() > MAX_TANH_R {
        return Err(Error::TruncationUnsafe(format!("tanh r = {:.4} exceeds {MAX_TANH_R}", p.tanh_r())));
    }
    match construction {
        Construction::TAction => {
            let s = model.require_similarity("T-action construction")?;
            let vac = squeezed_vacuum_coefficients(p, model.dim());
            BiStatePair::new(
                BasisVector::Fock(s.t.apply(&vac)?),
                BasisVector::Fock(s.t_inv.adjoint().apply(&vac)?),
                construction,
                None,
            )
        }
        Construction::OperatorAction => {
            let (sc, _) = deformed_squeeze(model, p, SqueezeKind::S, BuildRoute::Series)?;
            let (tc, _) = deformed_squeeze(model, p, SqueezeKind::T, BuildRoute::Series)?;
            BiStatePair::new(
                BasisVector::Fock(sc.apply(&model.phi_fock(0)?)?),
                BasisVector::Fock(tc.apply(&model.psi_fock(0)?)?),
                construction,
                None,
            )
        }
        Construction::Series => {
            let radius = model.series_radius();
            if p.r >= radius {
                return Err(Error::SeriesDivergent { lambda_b_abs: p.lambda_b.norm(), limit: radius.tanh() / 2.0 });
            }
            let n = available(model).div_ceil(2) + 1;
            let w = squeeze_weights(n);
            let e = p.lambda.exp();
            let lb = p.lambda_b;
            let lk = match kappa {
                KappaCoefficient::LambdaB => p.lambda_b,
                KappaCoefficient::LambdaA => p.lambda_a,
            };
            let margin = radius - p.r;
            let (left, dl) = series_sum(model, Side::Phi, |k| lb.powu(k as u32) * (e * w[k]), |k| 2 * k, margin)?;
            let (right, dr) = series_sum(model, Side::Psi, |k| lk.powu(k as u32) * (e * w[k]), |k| 2 * k, margin)?;
            let diag = if dl.terms_used >= dr.terms_used { dl } else { dr };
            BiStatePair::new(left, right, construction, Some(diag))
        }
    }
}

/// Pairwise leading-block distances between the available constructions.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConstructionAgreement {
    /// `(first, second, max(left distance, right distance))`.
    pub pairs: Vec<(Construction, Construction, f64)>,
    /// `max |<tau, kappa> - 1|` over constructions.
    pub pairing_deviation: f64,
}

impl ConstructionAgreement {
    pub fn max_residual(&self) -> f64 {
        self.pairs.iter().map(|p| p.2).fold(0.0, f64::max)
    }
}

/// Builds `(tau_z, kappa_z)` by every construction the model supports and
/// compares them pairwise.
pub fn bi_squeezed_agreement(model: &DeformationModel, p: &SqueezeParams) -> Result<ConstructionAgreement> {
    let constructions: &[Construction] = if model.is_regular() {
        &[Construction::TAction, Construction::OperatorAction, Construction::Series]
    } else {
        &[Construction::Series]
    };
    let built = constructions.iter().map(|&c| bi_squeezed(model, p, c)).collect::<Result<Vec<_>>>()?;
    let rows = leading_block(model.dim());
    let mut pairs = Vec::new();
    for i in 0..built.len() {
        for j in i + 1..built.len() {
            let dl = built[i].left_fock()?.distance_leading(built[j].left_fock()?, rows)?;
            let dr = built[i].right_fock()?.distance_leading(built[j].right_fock()?, rows)?;
            pairs.push((built[i].construction, built[j].construction, dl.max(dr)));
        }
    }
    let pairing_deviation = built.iter().map(|b| (b.pairing - c(1.0)).norm()).fold(0.0, f64::max);
    Ok(ConstructionAgreement { pairs, pairing_deviation })
}

/// Coherent bi-squeezed pair with its identity residuals.
#[derive(Debug, Clone)]
pub struct CoherentBiSqueezed {
    /// T-action pair `(T psi^alpha_z, (T^{-1})† psi^alpha_z)`.
    pub pair: BiStatePair,
    /// Distance to `(U(alpha) 𝒮(z) phi_0, V(alpha) 𝒯(z) Psi_0)`.
    pub route_residual: f64,
    /// `[cosh r (a - alpha) + e^{i theta} sinh r (b - ᾱ)] tau = 0`.
    pub vacuum_residual: f64,
    /// `[cosh r (b† - alpha) + e^{i theta} sinh r (a† - ᾱ)] kappa = 0`.
    pub mirror_residual: f64,
    /// `(a + zeta b) tau = (alpha + zeta ᾱ) tau` and the `kappa` mirror, `zeta = e^{i theta} tanh r`.
    pub eigen_residual: f64,
    /// `(a + z b) tau = alpha tau` and mirror, as usually written; reported only.
    pub literal_eigen_residual: f64,
    pub pairing_residual: f64,
}

impl CoherentBiSqueezed {
    /// Largest residual among the identities that hold.
    pub fn max_residual(&self) -> f64 {
        [self.route_residual, self.vacuum_residual, self.mirror_residual, self.eigen_residual, self.pairing_residual]
            .into_iter()
            .fold(0.0, f64::max)
    }
}

pub fn coherent_bi_squeezed(model: &DeformationModel, alpha: C64, p: &SqueezeParams) -> Result<CoherentBiSqueezed> {
    let s = model.require_similarity("coherent bi-squeezed states")?;
    let dim = model.dim();
    let psi = displacement(alpha, dim)?.apply(&squeezed_vacuum_coefficients(p, dim))?;
    let tau = s.t.apply(&psi)?;
    let kappa = s.t_inv.adjoint().apply(&psi)?;

    let (sc, _) = deformed_squeeze(model, p, SqueezeKind::S, BuildRoute::Series)?;
    let (tc, _) = deformed_squeeze(model, p, SqueezeKind::T, BuildRoute::Series)?;
    let (u, _) = deformed_displacement(model, alpha, DisplacementKind::U, BuildRoute::Series)?;
    let (v, _) = deformed_displacement(model, alpha, DisplacementKind::V, BuildRoute::Series)?;
    let tau_op = u.apply(&sc.apply(&model.phi_fock(0)?)?)?;
    let kappa_op = v.apply(&tc.apply(&model.psi_fock(0)?)?)?;
    let rows = leading_block(dim);
    let route_residual = tau.distance_leading(&tau_op, rows)?.max(kappa.distance_leading(&kappa_op, rows)?);

    let a = model.ladder_a();
    let b = model.ladder_b();
    let (vac_t, eig_t, lit_t) = squeeze_eigen_residuals(a, b, &tau, alpha, p, rows)?;
    let (vac_k, eig_k, lit_k) = squeeze_eigen_residuals(&b.adjoint(), &a.adjoint(), &kappa, alpha, p, rows)?;
    let pairing = tau.inner(&kappa)?;
    Ok(CoherentBiSqueezed {
        pair: BiStatePair {
            left: BasisVector::Fock(tau),
            right: BasisVector::Fock(kappa),
            construction: Construction::TAction,
            pairing,
            diagnostics: None,
        },
        route_residual,
        vacuum_residual: vac_t,
        mirror_residual: vac_k,
        eigen_residual: eig_t.max(eig_k),
        literal_eigen_residual: lit_t.max(lit_k),
        pairing_residual: (pairing - c(1.0)).norm(),
    })
}

/// Result of evolving `tau_z` under `H = b a`.
#[derive(Debug, Clone)]
pub struct Evolution {
    pub state: BasisVector,
    /// Term-wise evolved series against the series state at `theta - 2t`.
    pub residual: f64,
    /// `exp(-iHt)` applied to the T-action state against the T-action state
    /// at `theta - 2t` (regular models).
    pub matrix_residual: Option<f64>,
}

/// `e^{-iHt} tau_z` with each series term multiplied by `e^{-2ikt}`.
pub fn evolve_bi_squeezed_number_hamiltonian(model: &DeformationModel, p: &SqueezeParams, t: f64) -> Result<Evolution> {
    let radius = model.series_radius();
    if p.r >= radius {
        return Err(Error::SeriesDivergent { lambda_b_abs: p.lambda_b.norm(), limit: radius.tanh() / 2.0 });
    }
    let w = squeeze_weights(available(model).div_ceil(2) + 1);
    let e = p.lambda.exp();
    let lb = p.lambda_b;
    let coeff = |k: usize| lb.powu(k as u32) * C64::from_polar(e * w[k], -2.0 * k as f64 * t);
    let (state, _) = series_sum(model, Side::Phi, coeff, |k| 2 * k, radius - p.r)?;
    let target_params = SqueezeParams::from_polar(p.r, p.theta - 2.0 * t);
    let target = bi_squeezed(model, &target_params, Construction::Series)?;
    let residual = distance(&state, &target.left)?;
    let matrix_residual = if model.is_regular() {
        let dim = model.dim();
        let s = model.require_similarity("matrix evolution")?;
        // b a = T a0† a0 T^{-1}, and a0† a0 is exactly diagonal in the truncation
        let phases: Vec<C64> = (0..dim).map(|n| C64::from_polar(1.0, -(n as f64) * t)).collect();
        let u = &(&s.t * &FockOperator::from_diagonal(&phases)) * &s.t_inv;
        let tau = bi_squeezed(model, p, Construction::TAction)?;
        let moved = u.apply(tau.left_fock()?)?;
        let want = bi_squeezed(model, &target_params, Construction::TAction)?;
        Some(moved.distance_leading(want.left_fock()?, leading_block(dim))?)
    } else {
        None
    };
    Ok(Evolution { state, residual, matrix_residual })
}

fn distance(x: &BasisVector, y: &BasisVector) -> Result<f64> {
    match (x, y) {
        (BasisVector::Fock(a), BasisVector::Fock(b)) => a.distance(b),
        (BasisVector::Grid(a), BasisVector::Grid(b)) => Ok(a.axpy(c(-1.0), b)?.norm()),
        _ => Err(Error::RepresentationMismatch("cannot compare a Fock vector with a grid function")),
    }
}

/// `W(beta) v` in normal order, `e^{-|beta|^2/2} e^{beta a0†} e^{-β̄ a0} v`.
///
/// The lowering factor is a finite sum on `v`'s support and the raising
/// factor only moves weight upward, so every component below `dim` is exact
/// up to rounding: there is no truncation error for low-support vectors.
pub fn displace_vector(v: &FockVector, beta: C64) -> FockVector {
    let dim = v.dim();
    let src = v.as_slice();
    let top = src.iter().rposition(|z| z.norm() != 0.0).map_or(0, |i| i + 1);
    // e^{-β̄ a0}: (a0^k v)_n = sqrt((n+k)!/n!) v_{n+k}
    let mb = -beta.conj();
    let mut lowered = vec![c(0.0); top];
    for (n, slot) in lowered.iter_mut().enumerate() {
        let mut acc = c(0.0);
        let mut coef = c(1.0);
        for k in 0..top - n {
            if k > 0 {
                coef = coef * mb * (((n + k) as f64).sqrt() / k as f64);
            }
            acc += coef * src[n + k];
        }
        *slot = acc;
    }
    // e^{beta a0†}: (a0†^k u)_m = sqrt(m!/(m-k)!) u_{m-k}
    let mut out = vec![c(0.0); dim];
    for (j, uj) in lowered.iter().enumerate() {
        let mut coef = *uj;
        out[j] += coef;
        for m in j + 1..dim {
            coef = coef * beta * ((m as f64).sqrt() / (m - j) as f64);
            out[m] += coef;
        }
    }
    let g = c((-beta.norm_sqr() / 2.0).exp());
    FockVector::from_dvector_unchecked(nalgebra::DVector::from_vec(out) * g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::deformations::{build_identity, build_rank_one, build_swanson_default, RankOneSpec};
    use std::f64::consts::PI;

    fn rank_one(dim: usize) -> DeformationModel {
        build_rank_one(&RankOneSpec::example(dim).unwrap(), dim).unwrap()
    }

    #[test]
    fn coherent_examples() {
        assert_eq!(coherent(c(0.0), 16).unwrap(), FockVector::basis(16, 0).unwrap());
        let v = coherent(c(1.0), 32).unwrap();
        assert!((v.as_slice()[0].re - 0.606_530_659_712_633_4).abs() < 1e-15);
        let z = C64::new(0.0, 2.0);
        let v = coherent(z, 64).unwrap();
        let a0 = annihilator_matrix(64).unwrap();
        assert!(a0.apply(&v).unwrap().distance(&v.scale(z)).unwrap() < 1e-8);
        assert!((v.norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn coherent_matches_displaced_vacuum() {
        let z = C64::new(0.6, -0.4);
        let w = displacement(z, 48).unwrap();
        let v = coherent(z, 48).unwrap();
        assert!(w.column(0).distance_leading(&v, 36).unwrap() < 1e-12);
    }

    #[test]
    fn squeezed_vacuum_examples() {
        let p = SqueezeParams::from_polar(0.5, 0.0);
        let v = squeezed_vacuum(&p, 64).unwrap();
        assert!((v.as_slice()[2].re + 0.307_719_176_458_370_4).abs() < 1e-14);
        assert!((v.norm() - 1.0).abs() < 1e-10);
        assert!(v.as_slice().iter().skip(1).step_by(2).all(|z| z.norm() == 0.0));
        assert_eq!(squeezed_vacuum(&SqueezeParams::new(c(0.0)), 8).unwrap(), FockVector::basis(8, 0).unwrap());
        assert!(matches!(squeezed_vacuum(&SqueezeParams::from_polar(1.0, 0.0), 64), Err(Error::TruncationUnsafe(_))));
    }

    #[test]
    fn coherent_squeezed_relations() {
        let cs = coherent_squeezed(c(0.5), &SqueezeParams::from_polar(0.4, PI / 4.0), 64).unwrap();
        assert!(cs.vacuum_residual < 1e-8, "{}", cs.vacuum_residual);
        assert!(cs.eigen_residual < 1e-8);
        assert!(cs.literal_eigen_residual > 1e-3);
        assert!((cs.state.norm() - 1.0).abs() < 1e-8);
        let one = coherent_squeezed(c(1.0), &SqueezeParams::new(c(0.0)), 32).unwrap();
        assert!(one.state.distance(&coherent(c(1.0), 32).unwrap()).unwrap() < 1e-12);
    }

    #[test]
    fn bi_coherent_routes() {
        let m = rank_one(64);
        let z = c(0.8);
        let t = bi_coherent(&m, z, Construction::TAction).unwrap();
        let s = bi_coherent(&m, z, Construction::Series).unwrap();
        let o = bi_coherent(&m, z, Construction::OperatorAction).unwrap();
        assert!(t.left_fock().unwrap().distance(s.left_fock().unwrap()).unwrap() < 1e-10);
        assert!(t.right_fock().unwrap().distance(s.right_fock().unwrap()).unwrap() < 1e-10);
        assert!(t.left_fock().unwrap().distance_leading(o.left_fock().unwrap(), 48).unwrap() < 1e-9);
        assert!((t.pairing - c(1.0)).norm() < 1e-12);
        let zero = bi_coherent(&m, c(0.0), Construction::Series).unwrap();
        assert_eq!(zero.pairing, c(1.0));
    }

    #[test]
    fn bi_coherent_identity_is_coherent() {
        let m = build_identity(32).unwrap();
        let z = C64::new(0.3, 0.7);
        let pair = bi_coherent(&m, z, Construction::Series).unwrap();
        let phi = coherent(z, 32).unwrap();
        assert!(pair.left_fock().unwrap().distance(&phi).unwrap() < 1e-15);
        assert!(pair.right_fock().unwrap().distance(&phi).unwrap() < 1e-15);
    }

    #[test]
    fn bi_squeezed_rank_one_closed_form() {
        let m = rank_one(64);
        let p = SqueezeParams::from_polar(0.4, 0.0);
        let vac = squeezed_vacuum(&p, 64).unwrap();
        // tau = psi + alpha <u, psi> v with u = e0, v = e0 + e1, alpha = 1
        let mut want = vac.as_slice().to_vec();
        let proj = vac.as_slice()[0];
        want[0] += proj;
        want[1] += proj;
        let want = FockVector::new(want).unwrap();
        for cons in [Construction::TAction, Construction::Series] {
            let pair = bi_squeezed(&m, &p, cons).unwrap();
            assert!(pair.left_fock().unwrap().distance(&want).unwrap() < 1e-9, "{cons:?}");
        }
        let agree = bi_squeezed_agreement(&m, &p).unwrap();
        assert!(agree.max_residual() < 1e-7, "{agree:?}");
        assert!(agree.pairing_deviation < 1e-7);
    }

    #[test]
    fn kappa_with_lambda_a_disagrees() {
        let m = rank_one(64);
        let p = SqueezeParams::from_polar(0.4, 0.7);
        let b = bi_squeezed(&m, &p, Construction::TAction).unwrap();
        let wrong = bi_squeezed_with(&m, &p, Construction::Series, KappaCoefficient::LambdaA).unwrap();
        let right = bi_squeezed_with(&m, &p, Construction::Series, KappaCoefficient::LambdaB).unwrap();
        assert!(right.right_fock().unwrap().distance(b.right_fock().unwrap()).unwrap() < 1e-12);
        assert!(wrong.right_fock().unwrap().distance(b.right_fock().unwrap()).unwrap() > 1e-2);
        assert!((wrong.pairing - c(1.0)).norm() > 1e-2);
    }

    #[test]
    fn bi_squeezed_zero() {
        let m = rank_one(32);
        let pair = bi_squeezed(&m, &SqueezeParams::new(c(0.0)), Construction::Series).unwrap();
        assert_eq!(pair.left_fock().unwrap(), &m.phi_fock(0).unwrap());
        assert_eq!(pair.pairing, c(1.0));
    }

    #[test]
    fn swanson_bi_squeezed_inside_radius() {
        let m = build_swanson_default(0.3, 32, 96, 600).unwrap();
        let pair = bi_squeezed(&m, &SqueezeParams::from_polar(0.2, 0.0), Construction::Series).unwrap();
        assert!((pair.pairing - c(1.0)).norm() < 1e-6, "{}", pair.pairing);
        let d = pair.diagnostics.unwrap();
        assert!(d.stopped_by_rule && d.estimated_radius_margin > 0.3);
        assert!(matches!(
            bi_squeezed(&m, &SqueezeParams::from_polar(0.7, 0.0), Construction::Series),
            Err(Error::SeriesDivergent { .. })
        ));
        assert!(matches!(
            bi_squeezed(&m, &SqueezeParams::from_polar(0.2, 0.0), Construction::TAction),
            Err(Error::Capability { .. })
        ));
    }

    #[test]
    fn coherent_bi_squeezed_identities() {
        let m = rank_one(64);
        let cb = coherent_bi_squeezed(&m, c(0.5), &SqueezeParams::from_polar(0.3, 0.0)).unwrap();
        assert!(cb.max_residual() < 1e-7, "{cb:?}");
        assert!(cb.literal_eigen_residual > 1e-3);
    }

    #[test]
    fn evolution_matches_rotated_state() {
        let m = rank_one(64);
        let p = SqueezeParams::from_polar(0.4, 0.0);
        for t in [0.0, 0.7, PI] {
            let ev = evolve_bi_squeezed_number_hamiltonian(&m, &p, t).unwrap();
            assert!(ev.residual < 1e-9, "t={t}");
            assert!(ev.matrix_residual.unwrap() < 1e-8, "t={t} {:?}", ev.matrix_residual);
        }
    }

    #[test]
    fn normal_ordered_displacement_matches_matrix() {
        let dim = 48;
        let beta = C64::new(0.9, -0.5);
        let v = FockVector::new((0..dim).map(|n| if n < 4 { C64::new(1.0 / (n + 1) as f64, n as f64) } else { c(0.0) }).collect())
            .unwrap();
        let direct = displacement(beta, dim).unwrap().apply(&v).unwrap();
        assert!(displace_vector(&v, beta).distance_leading(&direct, 24).unwrap() < 1e-12);
        let e0 = FockVector::basis(dim, 0).unwrap();
        assert!(displace_vector(&e0, beta).distance(&coherent(beta, dim).unwrap()).unwrap() < 1e-15);
    }
}

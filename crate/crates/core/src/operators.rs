//! Displacement and squeezing operators, standard and deformed, each built by
//! more than one independent route.
//!
//! Squeezing convention: `S(z) = exp((z̄/2) a0^2 - (z/2) a0†^2)` with
//! `z = r e^{i theta}`. This is the convention under which
//! `lambda = -ln(cosh r)/2`, `lambda_a = e^{-i theta} tanh(r)/2` and
//! `lambda_b = -conj(lambda_a)` factorise `S(z)`, and under which
//! `S(z) e0` has `c2 = e^lambda lambda_b sqrt 2 < 0` for `theta = 0`.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::deformations::DeformationModel;
use crate::error::{Error, Result};
use crate::numerics::{
    annihilator_matrix, leading_block, matrix_exponential, series_exponential, FockOperator, SERIES_MAX_TERMS,
};

/// Tolerance passed to [`matrix_exponential`] throughout.
pub const EXP_TOL: f64 = 1e-14;
/// Largest `tanh r` accepted by the squeezing constructions.
pub const MAX_TANH_R: f64 = 0.8;
/// Smallest truncation accepted by the squeezing constructions.
pub const MIN_SQUEEZE_DIM: usize = 16;

/// `z = r e^{i theta}` and the factorisation coefficients of `S(z)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SqueezeParams {
    pub z: C64,
    pub r: f64,
    pub theta: f64,
    pub lambda: f64,
    pub lambda_a: C64,
    pub lambda_b: C64,
}

impl SqueezeParams {
    pub fn new(z: C64) -> Self {
        let (r, theta) = z.to_polar();
        Self::from_polar(r, theta)
    }

    pub fn from_polar(r: f64, theta: f64) -> Self {
        let lambda_a = C64::from_polar(0.5 * r.tanh(), -theta);
        Self {
            z: C64::from_polar(r, theta),
            r,
            theta,
            lambda: -0.5 * r.cosh().ln(),
            lambda_a,
            lambda_b: -lambda_a.conj(),
        }
    }

    pub fn tanh_r(&self) -> f64 {
        self.r.tanh()
    }

    /// `zeta = e^{i theta} tanh r`, the mixing coefficient of the squeezed
    /// annihilator `a0 + zeta a0†`.
    pub fn zeta(&self) -> C64 {
        C64::from_polar(self.r.tanh(), self.theta)
    }

    pub fn negated(&self) -> Self {
        Self::new(-self.z)
    }
}

fn check_squeeze(p: &SqueezeParams, dim: usize) -> Result<()> {
    if !(p.r.is_finite() && p.theta.is_finite()) {
        return Err(Error::Domain(format!("squeeze parameter {} is not finite", p.z)));
    }
    if p.tanh_r() > MAX_TANH_R {
        return Err(Error::TruncationUnsafe(format!("tanh r = {:.4} exceeds {MAX_TANH_R}", p.tanh_r())));
    }
    if dim < MIN_SQUEEZE_DIM && p.r > 0.0 {
        return Err(Error::TruncationUnsafe(format!("dim {dim} below {MIN_SQUEEZE_DIM} for squeezing")));
    }
    Ok(())
}

/// `|z|^2 <= dim / 4`.
pub fn check_displacement(z: C64, dim: usize) -> Result<()> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::Domain(format!("displacement {z} is not finite")));
    }
    if z.norm_sqr() > dim as f64 / 4.0 {
        return Err(Error::TruncationUnsafe(format!("|z|^2 = {:.4} exceeds dim/4 = {}", z.norm_sqr(), dim as f64 / 4.0)));
    }
    Ok(())
}

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// `(z̄/2) x^2 - (z/2) y^2`.
fn squeeze_generator(z: C64, x: &FockOperator, y: &FockOperator) -> FockOperator {
    &(x * x).scale(z.conj() / 2.0) - &(y * y).scale(z / 2.0)
}

/// `exp(lambda_b y^2) exp(lambda (x y + y x)) exp(lambda_a x^2)`.
fn bch_product(p: &SqueezeParams, x: &FockOperator, y: &FockOperator) -> Result<FockOperator> {
    let left = matrix_exponential(&(y * y).scale(p.lambda_b), EXP_TOL)?;
    let mid = matrix_exponential(&(&(x * y) + &(y * x)).scale(c(p.lambda)), EXP_TOL)?;
    let right = matrix_exponential(&(x * x).scale(p.lambda_a), EXP_TOL)?;
    Ok(&(&left * &mid) * &right)
}

/// `W(z) = exp(z a0† - z̄ a0)`.
pub fn displacement(z: C64, dim: usize) -> Result<FockOperator> {
    check_displacement(z, dim)?;
    let a0 = annihilator_matrix(dim)?;
    let gen = &a0.adjoint().scale(z) - &a0.scale(z.conj());
    matrix_exponential(&gen, EXP_TOL)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SqueezeRoute {
    /// Matrix exponential of the generator.
    Exponential,
    /// `exp(lambda_b a0†^2) exp(lambda (a0 a0† + a0† a0)) exp(lambda_a a0^2)`.
    Factorized,
}

/// The standard squeezing operator `S(z)`.
pub fn squeeze_standard(p: &SqueezeParams, dim: usize, route: SqueezeRoute) -> Result<FockOperator> {
    check_squeeze(p, dim)?;
    let a0 = annihilator_matrix(dim)?;
    match route {
        SqueezeRoute::Exponential => matrix_exponential(&squeeze_generator(p.z, &a0, &a0.adjoint()), EXP_TOL),
        SqueezeRoute::Factorized => bch_product(p, &a0, &a0.adjoint()),
    }
}

/// Agreement of the two `S(z)` routes.
///
/// The factorised product multiplies truncated exponentials of `a0†^2` and
/// `a0^2`, and `exp(lambda_a a0^2)` pulls the highest levels down into the
/// block, so the routes only agree well below the truncation edge.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SqueezeRouteAgreement {
    /// Block on which agreement is asserted (`dim / 2`).
    pub block: usize,
    pub residual: f64,
    /// The same comparison on the usual leading block, for reference.
    pub leading_block: usize,
    pub leading_residual: f64,
}

pub fn squeeze_route_agreement(p: &SqueezeParams, dim: usize) -> Result<SqueezeRouteAgreement> {
    let e = squeeze_standard(p, dim, SqueezeRoute::Exponential)?;
    let f = squeeze_standard(p, dim, SqueezeRoute::Factorized)?;
    let block = dim / 2;
    Ok(SqueezeRouteAgreement {
        block,
        residual: e.block_residual(&f, block),
        leading_block: leading_block(dim),
        leading_residual: e.leading_residual(&f),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BuildRoute {
    /// `T X T^{-1}` (or `(T^{-1})† X T†`) of the standard operator.
    Conjugation,
    /// Power series of the deformed generator.
    Series,
    /// Factorised product of three exponentials (diagnostic only).
    Bch,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DisplacementKind {
    /// `U(z) = T W(z) T^{-1} = exp(z b - z̄ a)`.
    U,
    /// `V(z) = (T^{-1})† W(z) T† = exp(z a† - z̄ b†)`.
    V,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SqueezeKind {
    /// `𝒮(z) = T S(z) T^{-1} = exp((z̄/2) a^2 - (z/2) b^2)`, acting on the `phi` side.
    S,
    /// `𝒯(z) = (T^{-1})† S(z) T† = exp((z̄/2) b†^2 - (z/2) a†^2)`, acting on the `Psi` side.
    T,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct OperatorBuildReport {
    pub route: BuildRoute,
    pub terms_used: usize,
    pub squarings: u32,
    /// Leading-block residual against the conjugation route (regular models)
    /// or the series route (otherwise).
    pub residual_vs_reference: f64,
}

fn conjugate(model: &DeformationModel, x: &FockOperator, side_psi: bool) -> Result<FockOperator> {
    let s = model.require_similarity("conjugation route")?;
    Ok(if side_psi {
        &(&s.t_inv.adjoint() * x) * &s.t.adjoint()
    } else {
        &(&s.t * x) * &s.t_inv
    })
}

/// `U(z)` or `V(z)` by conjugation or by the series of the deformed generator.
pub fn deformed_displacement(
    model: &DeformationModel,
    z: C64,
    kind: DisplacementKind,
    route: BuildRoute,
) -> Result<(FockOperator, OperatorBuildReport)> {
    check_displacement(z, model.dim())?;
    let a = model.ladder_a();
    let b = model.ladder_b();
    let series_gen = || match kind {
        DisplacementKind::U => &b.scale(z) - &a.scale(z.conj()),
        DisplacementKind::V => &a.adjoint().scale(z) - &b.adjoint().scale(z.conj()),
    };
    let conj = || -> Result<FockOperator> {
        conjugate(model, &displacement(z, model.dim())?, kind == DisplacementKind::V)
    };
    let (op, terms_used, squarings) = match route {
        BuildRoute::Conjugation => (conj()?, 0, 0),
        BuildRoute::Series => {
            let s = series_exponential(&series_gen(), SERIES_MAX_TERMS)?;
            (s.value, s.terms_used, s.squarings)
        }
        BuildRoute::Bch => {
            // exp(z y - z̄ x) = exp(z y) exp(-z̄ x) exp(-|z|^2/2) with [x, y] = 1
            let (x, y) = match kind {
                DisplacementKind::U => (a.clone(), b.clone()),
                DisplacementKind::V => (b.adjoint(), a.adjoint()),
            };
            let left = matrix_exponential(&y.scale(z), EXP_TOL)?;
            let right = matrix_exponential(&x.scale(-z.conj()), EXP_TOL)?;
            ((&left * &right).scale(c((-z.norm_sqr() / 2.0).exp())), 0, 0)
        }
    };
    let reference = if model.is_regular() {
        if route == BuildRoute::Conjugation { None } else { Some(conj()?) }
    } else if route == BuildRoute::Series {
        None
    } else {
        Some(series_exponential(&series_gen(), SERIES_MAX_TERMS)?.value)
    };
    let residual_vs_reference = reference.map_or(0.0, |r| op.leading_residual(&r));
    Ok((op, OperatorBuildReport { route, terms_used, squarings, residual_vs_reference }))
}

fn squeeze_pair(model: &DeformationModel, kind: SqueezeKind) -> (FockOperator, FockOperator) {
    match kind {
        SqueezeKind::S => (model.ladder_a().clone(), model.ladder_b().clone()),
        SqueezeKind::T => (model.ladder_b().adjoint(), model.ladder_a().adjoint()),
    }
}

fn deformed_squeeze_raw(
    model: &DeformationModel,
    p: &SqueezeParams,
    kind: SqueezeKind,
    route: BuildRoute,
) -> Result<(FockOperator, usize, u32)> {
    let (x, y) = squeeze_pair(model, kind);
    Ok(match route {
        BuildRoute::Conjugation => {
            let s = squeeze_standard(p, model.dim(), SqueezeRoute::Exponential)?;
            (conjugate(model, &s, kind == SqueezeKind::T)?, 0, 0)
        }
        BuildRoute::Series => {
            let s = series_exponential(&squeeze_generator(p.z, &x, &y), SERIES_MAX_TERMS)?;
            (s.value, s.terms_used, s.squarings)
        }
        BuildRoute::Bch => (bch_product(p, &x, &y)?, 0, 0),
    })
}

/// `𝒮(z)` or `𝒯(z)` by one route, with its residual against the reference
/// route. The BCH factors are individually unbounded in infinite dimensions,
/// so the BCH residual is a diagnostic only.
pub fn deformed_squeeze(
    model: &DeformationModel,
    p: &SqueezeParams,
    kind: SqueezeKind,
    route: BuildRoute,
) -> Result<(FockOperator, OperatorBuildReport)> {
    check_squeeze(p, model.dim())?;
    let (op, terms_used, squarings) = deformed_squeeze_raw(model, p, kind, route)?;
    let reference_route = if model.is_regular() { BuildRoute::Conjugation } else { BuildRoute::Series };
    let residual_vs_reference = if route == reference_route {
        0.0
    } else {
        op.leading_residual(&deformed_squeeze_raw(model, p, kind, reference_route)?.0)
    };
    Ok((op, OperatorBuildReport { route, terms_used, squarings, residual_vs_reference }))
}

/// Pairwise leading-block residuals between the three `𝒮`/`𝒯` routes.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SqueezeRouteComparison {
    pub kind: SqueezeKind,
    pub block: usize,
    pub conjugation_vs_series: f64,
    /// Diagnostic only.
    pub conjugation_vs_bch: f64,
    /// Diagnostic only.
    pub series_vs_bch: f64,
    pub series_terms: usize,
}

pub fn compare_squeeze_routes(
    model: &DeformationModel,
    p: &SqueezeParams,
    kind: SqueezeKind,
    block: usize,
) -> Result<SqueezeRouteComparison> {
    check_squeeze(p, model.dim())?;
    let conj = deformed_squeeze_raw(model, p, kind, BuildRoute::Conjugation)?.0;
    let (series, series_terms, _) = deformed_squeeze_raw(model, p, kind, BuildRoute::Series)?;
    let bch = deformed_squeeze_raw(model, p, kind, BuildRoute::Bch)?.0;
    Ok(SqueezeRouteComparison {
        kind,
        block,
        conjugation_vs_series: conj.block_residual(&series, block),
        conjugation_vs_bch: conj.block_residual(&bch, block),
        series_vs_bch: series.block_residual(&bch, block),
        series_terms,
    })
}

/// Leading-block residuals of the inverse and intertwining relations.
#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize)]
pub struct OperatorRelations {
    /// `||𝒮(z) 𝒮(-z) - 1||`
    pub s_inverse: f64,
    /// `||𝒮(-z) - 𝒯(z)†||`
    pub s_minus_vs_t_dag: f64,
    /// `||𝒯(z) 𝒯(-z) - 1||`
    pub t_inverse: f64,
    /// `||𝒯(-z) - 𝒮(z)†||`
    pub t_minus_vs_s_dag: f64,
    /// `||T T† 𝒯(z) - 𝒮(z) T T†||`
    pub intertwining: f64,
}

impl OperatorRelations {
    pub fn max(&self) -> f64 {
        [self.s_inverse, self.s_minus_vs_t_dag, self.t_inverse, self.t_minus_vs_s_dag, self.intertwining]
            .into_iter()
            .fold(0.0, f64::max)
    }
}

/// Checks the inverse and intertwining relations with operators built by
/// `route` (conjugation or series).
pub fn verify_operator_relations(
    model: &DeformationModel,
    p: &SqueezeParams,
    route: BuildRoute,
) -> Result<OperatorRelations> {
    let sim = model.require_similarity("operator relations")?;
    let m = p.negated();
    let s = deformed_squeeze(model, p, SqueezeKind::S, route)?.0;
    let s_m = deformed_squeeze(model, &m, SqueezeKind::S, route)?.0;
    let t = deformed_squeeze(model, p, SqueezeKind::T, route)?.0;
    let t_m = deformed_squeeze(model, &m, SqueezeKind::T, route)?.0;
    let id = FockOperator::identity(model.dim());
    let ttd = &sim.t * &sim.t.adjoint();
    Ok(OperatorRelations {
        s_inverse: (&s * &s_m).leading_residual(&id),
        s_minus_vs_t_dag: s_m.leading_residual(&t.adjoint()),
        t_inverse: (&t * &t_m).leading_residual(&id),
        t_minus_vs_s_dag: t_m.leading_residual(&s.adjoint()),
        intertwining: (&ttd * &t).leading_residual(&(&s * &ttd)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::deformations::{build_identity, build_rank_one, RankOneSpec};
    use crate::numerics::special::squeeze_weights;
    use std::f64::consts::PI;

    fn rank_one(dim: usize) -> DeformationModel {
        build_rank_one(&RankOneSpec::example(dim).unwrap(), dim).unwrap()
    }

    #[test]
    fn params_relations() {
        for (r, th) in [(0.0, 0.0), (0.4, 1.0), (0.7, -2.0)] {
            let p = SqueezeParams::from_polar(r, th);
            assert!((p.lambda_b + p.lambda_a.conj()).norm() == 0.0);
            assert!((p.z - C64::from_polar(r, th)).norm() < 1e-15);
        }
        assert_eq!(SqueezeParams::new(c(0.0)).lambda, 0.0);
    }

    #[test]
    fn displacement_basics() {
        assert_eq!(displacement(c(0.0), 16).unwrap(), FockOperator::identity(16));
        let w = displacement(c(1.0), 48).unwrap();
        let col = w.column(0);
        let mut fact = 1.0;
        for n in 0..20 {
            if n > 0 {
                fact *= n as f64;
            }
            let want = (-0.5f64).exp() / fact.sqrt();
            assert!((col.as_slice()[n] - c(want)).norm() < 1e-12, "n={n}");
        }
        let z = C64::new(0.7, 0.2);
        let prod = &displacement(z, 48).unwrap() * &displacement(-z, 48).unwrap();
        assert!(prod.block_residual(&FockOperator::identity(48), 48) < 1e-10);
        assert!(matches!(displacement(c(5.0), 16), Err(Error::TruncationUnsafe(_))));
    }

    #[test]
    fn squeeze_vacuum_column() {
        let p = SqueezeParams::from_polar(0.5, 0.0);
        let s = squeeze_standard(&p, 64, SqueezeRoute::Exponential).unwrap();
        let col = s.column(0);
        let w = squeeze_weights(10);
        for k in 0..10 {
            let want = p.lambda.exp() * p.lambda_b.powu(k as u32) * w[k];
            assert!((col.as_slice()[2 * k] - want).norm() < 1e-12, "k={k}");
            assert_eq!(col.as_slice()[2 * k + 1], c(0.0));
        }
        // (cosh 0.5)^{-1/2} = 0.9417106; the often quoted 0.94176 is a slip
        assert!((col.as_slice()[0].re - 0.941_710_615_831_675_7).abs() < 1e-12);
        assert!((col.as_slice()[2].re + 0.307_71).abs() < 1e-5);
        assert!((col.norm() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn squeeze_zero_both_routes() {
        let p = SqueezeParams::new(c(0.0));
        for route in [SqueezeRoute::Exponential, SqueezeRoute::Factorized] {
            assert_eq!(squeeze_standard(&p, 32, route).unwrap(), FockOperator::identity(32));
        }
    }

    #[test]
    fn squeeze_routes_agree_below_edge() {
        let rep = squeeze_route_agreement(&SqueezeParams::from_polar(0.3, 0.4), 64).unwrap();
        assert!(rep.residual < 1e-8, "{rep:?}");
    }

    #[test]
    fn squeeze_tanh_limit() {
        let p = SqueezeParams::from_polar(1.2, 0.0);
        assert!(matches!(squeeze_standard(&p, 64, SqueezeRoute::Exponential), Err(Error::TruncationUnsafe(_))));
    }

    #[test]
    fn identity_model_reduces_to_standard() {
        let m = build_identity(32).unwrap();
        let z = C64::new(0.4, -0.3);
        let w = displacement(z, 32).unwrap();
        let (u, _) = deformed_displacement(&m, z, DisplacementKind::U, BuildRoute::Conjugation).unwrap();
        let (v, _) = deformed_displacement(&m, z, DisplacementKind::V, BuildRoute::Conjugation).unwrap();
        assert_eq!(u, w);
        assert_eq!(v, w);
        let p = SqueezeParams::from_polar(0.3, 0.5);
        let s = squeeze_standard(&p, 32, SqueezeRoute::Exponential).unwrap();
        assert_eq!(deformed_squeeze(&m, &p, SqueezeKind::S, BuildRoute::Conjugation).unwrap().0, s);
        assert_eq!(deformed_squeeze(&m, &p, SqueezeKind::T, BuildRoute::Conjugation).unwrap().0, s);
    }

    #[test]
    fn deformed_displacement_routes() {
        let m = rank_one(64);
        for kind in [DisplacementKind::U, DisplacementKind::V] {
            let (_, rep) = deformed_displacement(&m, c(0.5), kind, BuildRoute::Series).unwrap();
            assert!(rep.residual_vs_reference < 1e-8, "{kind:?} {rep:?}");
            let (u0, _) = deformed_displacement(&m, c(0.0), kind, BuildRoute::Series).unwrap();
            assert_eq!(u0, FockOperator::identity(64));
        }
    }

    #[test]
    fn deformed_squeeze_conjugation_vs_series() {
        let m = rank_one(64);
        for kind in [SqueezeKind::S, SqueezeKind::T] {
            let cmp = compare_squeeze_routes(&m, &SqueezeParams::from_polar(0.4, 0.0), kind, 32).unwrap();
            assert!(cmp.conjugation_vs_series < 1e-8, "{cmp:?}");
        }
    }

    #[test]
    fn squeeze_zero_all_routes() {
        let m = rank_one(32);
        let p = SqueezeParams::new(c(0.0));
        for route in [BuildRoute::Conjugation, BuildRoute::Series, BuildRoute::Bch] {
            for kind in [SqueezeKind::S, SqueezeKind::T] {
                let (op, _) = deformed_squeeze(&m, &p, kind, route).unwrap();
                assert!(op.block_residual(&FockOperator::identity(32), 32) < 1e-14);
            }
        }
    }

    #[test]
    fn relations_rank_one() {
        let m = rank_one(64);
        let rel = verify_operator_relations(&m, &SqueezeParams::from_polar(0.3, PI / 3.0), BuildRoute::Conjugation)
            .unwrap();
        assert!(rel.max() < 1e-8, "{rel:?}");
        let zero = verify_operator_relations(&m, &SqueezeParams::new(c(0.0)), BuildRoute::Conjugation).unwrap();
        assert_eq!(zero.max(), 0.0);
    }

    #[test]
    fn identity_squeeze_is_unitary() {
        let m = build_identity(64).unwrap();
        let rel = verify_operator_relations(&m, &SqueezeParams::from_polar(0.5, 0.0), BuildRoute::Conjugation).unwrap();
        assert!(rel.s_minus_vs_t_dag < 1e-9);
    }

    #[test]
    fn conjugation_needs_regular_model() {
        let m = crate::deformations::build_swanson_default(0.3, 32, 40, 400).unwrap();
        let p = SqueezeParams::from_polar(0.2, 0.0);
        assert!(matches!(
            deformed_squeeze(&m, &p, SqueezeKind::S, BuildRoute::Conjugation),
            Err(Error::Capability { .. })
        ));
        assert!(deformed_squeeze(&m, &p, SqueezeKind::S, BuildRoute::Series).is_ok());
    }
}

//! Pseudo-bosonic structures: the bosonic baseline, the bounded rank-one
//! deformation `T = 1 + alpha P_{u,v}`, and the non-regular Swanson model.

use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{
    annihilator_matrix, hermite_family, l2_inner, leading_block, momentum_matrix, oscillator_basis,
    position_matrix, special, FockOperator, FockVector, Grid, GridFunction,
};

/// Tolerance for `<u, v> = 1` in the rank-one construction.
pub const RANK_ONE_NORM_TOL: f64 = 1e-12;
/// Tolerance for `T T^{-1} = 1`.
pub const SIMILARITY_TOL: f64 = 1e-10;

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// A basis vector in whichever representation the model uses.
#[derive(Debug, Clone)]
pub enum BasisVector {
    Fock(FockVector),
    Grid(GridFunction),
}

impl BasisVector {
    /// `<self, other>`; mixing representations is an error.
    pub fn inner(&self, other: &BasisVector) -> Result<C64> {
        match (self, other) {
            (BasisVector::Fock(a), BasisVector::Fock(b)) => a.inner(b),
            (BasisVector::Grid(a), BasisVector::Grid(b)) => l2_inner(a, b),
            _ => Err(Error::RepresentationMismatch("cannot pair a Fock vector with a grid function")),
        }
    }

    pub fn norm(&self) -> f64 {
        match self {
            BasisVector::Fock(v) => v.norm(),
            BasisVector::Grid(f) => f.norm(),
        }
    }
}

/// Rank-one deformation data.
#[derive(Debug, Clone, PartialEq)]
pub struct RankOneSpec {
    pub u: FockVector,
    pub v: FockVector,
    pub alpha: C64,
}

impl RankOneSpec {
    pub fn new(u: FockVector, v: FockVector, alpha: C64) -> Result<Self> {
        let spec = Self { u, v, alpha };
        spec.validate()?;
        Ok(spec)
    }

    /// `u = e0`, `v = e0 + e1`, `alpha = 1`.
    pub fn example(dim: usize) -> Result<Self> {
        let u = FockVector::basis(dim, 0)?;
        let v = &u + &FockVector::basis(dim, 1)?;
        Self::new(u, v, c(1.0))
    }

    pub fn validate(&self) -> Result<()> {
        let uv = self.u.inner(&self.v)?;
        if (uv - c(1.0)).norm() > RANK_ONE_NORM_TOL {
            return Err(Error::Normalization { found: uv });
        }
        if (self.alpha + c(1.0)).norm() == 0.0 {
            return Err(Error::SingularDeformation);
        }
        Ok(())
    }

    /// `beta = -alpha / (1 + alpha)`, so that `alpha + beta + alpha beta = 0`.
    pub fn beta(&self) -> C64 {
        -self.alpha / (c(1.0) + self.alpha)
    }
}

/// Swanson parameters.
///
/// `n1 = 1` and `n2 = e^{-i nu} / sqrt(pi)` so that `<phi_0, Psi_0> = 1` with the
/// conjugate-linear-first inner product.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwansonSpec {
    pub nu: f64,
    pub n1: C64,
    pub n2: C64,
}

impl SwansonSpec {
    pub fn new(nu: f64) -> Result<Self> {
        let spec = Self {
            nu,
            n1: c(1.0),
            n2: C64::from_polar(std::f64::consts::PI.sqrt().recip(), -nu),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let q = std::f64::consts::FRAC_PI_4;
        if !(self.nu.abs() < q) || !self.nu.is_finite() {
            return Err(Error::Domain(format!("nu = {} outside (-pi/4, pi/4)", self.nu)));
        }
        Ok(())
    }

    pub fn cos2nu(&self) -> f64 {
        (2.0 * self.nu).cos()
    }

    /// `x + sqrt(x^2 - 1)` with `x = 1/cos(2 nu)`: the growth rate of `||phi_n||^2`.
    pub fn growth(&self) -> f64 {
        let x = 1.0 / self.cos2nu();
        x + (x * x - 1.0).sqrt()
    }
}

/// `T` together with its inverse.
#[derive(Debug, Clone)]
pub struct Similarity {
    pub t: FockOperator,
    pub t_inv: FockOperator,
}

/// Sampled Swanson families plus their Fock-basis projections.
#[derive(Debug, Clone)]
pub struct SwansonData {
    pub spec: SwansonSpec,
    pub grid: Arc<Grid>,
    phi: Vec<GridFunction>,
    psi: Vec<GridFunction>,
    phi_fock: Vec<FockVector>,
    psi_fock: Vec<FockVector>,
    pub precision_degraded: bool,
}

impl SwansonData {
    pub fn n_max(&self) -> usize {
        self.phi.len() - 1
    }
}

#[derive(Debug, Clone)]
pub enum ModelKind {
    Identity,
    RankOne(RankOneSpec),
    Swanson(Box<SwansonData>),
    Similarity,
}

/// A pseudo-bosonic pair `(a, b)` with its biorthogonal families.
#[derive(Debug, Clone)]
pub struct DeformationModel {
    name: String,
    dim: usize,
    a: FockOperator,
    b: FockOperator,
    similarity: Option<Similarity>,
    kind: ModelKind,
}

impl DeformationModel {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> &ModelKind {
        &self.kind
    }

    pub fn is_regular(&self) -> bool {
        self.similarity.is_some()
    }

    pub fn ladder_a(&self) -> &FockOperator {
        &self.a
    }

    pub fn ladder_b(&self) -> &FockOperator {
        &self.b
    }

    pub fn similarity(&self) -> Option<&Similarity> {
        self.similarity.as_ref()
    }

    pub fn t(&self) -> Option<&FockOperator> {
        self.similarity.as_ref().map(|s| &s.t)
    }

    pub fn t_inv(&self) -> Option<&FockOperator> {
        self.similarity.as_ref().map(|s| &s.t_inv)
    }

    pub(crate) fn require_similarity(&self, what: &'static str) -> Result<&Similarity> {
        self.similarity
            .as_ref()
            .ok_or_else(|| Error::Capability { model: self.name.clone(), what })
    }

    pub(crate) fn swanson(&self) -> Option<&SwansonData> {
        match &self.kind {
            ModelKind::Swanson(d) => Some(d),
            _ => None,
        }
    }

    /// Pseudo-bosonic number operator `N = b a`.
    pub fn number_operator(&self) -> FockOperator {
        &self.b * &self.a
    }

    /// `phi_n` in the model's native representation.
    pub fn phi(&self, n: usize) -> Result<BasisVector> {
        match &self.kind {
            ModelKind::Swanson(d) => d
                .phi
                .get(n)
                .cloned()
                .map(BasisVector::Grid)
                .ok_or(Error::InvalidDimension { dim: d.n_max() + 1, reason: "index beyond sampled family" }),
            _ => self.phi_fock(n).map(BasisVector::Fock),
        }
    }

    pub fn psi(&self, n: usize) -> Result<BasisVector> {
        match &self.kind {
            ModelKind::Swanson(d) => d
                .psi
                .get(n)
                .cloned()
                .map(BasisVector::Grid)
                .ok_or(Error::InvalidDimension { dim: d.n_max() + 1, reason: "index beyond sampled family" }),
            _ => self.psi_fock(n).map(BasisVector::Fock),
        }
    }

    /// `phi_n` in the number basis: `T e_n`, or the grid projection
    /// `sum_k <e_k, phi_n> e_k` for the Swanson model.
    pub fn phi_fock(&self, n: usize) -> Result<FockVector> {
        if let Some(d) = self.swanson() {
            return d.phi_fock.get(n).cloned().ok_or(Error::InvalidDimension {
                dim: self.dim,
                reason: "index beyond projected family",
            });
        }
        let s = self.require_similarity("Fock basis")?;
        if n >= self.dim {
            return Err(Error::InvalidDimension { dim: self.dim, reason: "basis index beyond truncation" });
        }
        Ok(s.t.column(n))
    }

    /// `Psi_n = (T^{-1})^dag e_n`, or its grid projection.
    pub fn psi_fock(&self, n: usize) -> Result<FockVector> {
        if let Some(d) = self.swanson() {
            return d.psi_fock.get(n).cloned().ok_or(Error::InvalidDimension {
                dim: self.dim,
                reason: "index beyond projected family",
            });
        }
        let s = self.require_similarity("Fock basis")?;
        if n >= self.dim {
            return Err(Error::InvalidDimension { dim: self.dim, reason: "basis index beyond truncation" });
        }
        Ok(s.t_inv.adjoint().column(n))
    }

    /// `phi_n` grid samples (Swanson only).
    pub fn phi_grid(&self, n: usize) -> Result<&GridFunction> {
        let d = self.swanson().ok_or(Error::RepresentationMismatch("model has no grid representation"))?;
        d.phi.get(n).ok_or(Error::InvalidDimension { dim: d.n_max() + 1, reason: "index beyond sampled family" })
    }

    pub fn psi_grid(&self, n: usize) -> Result<&GridFunction> {
        let d = self.swanson().ok_or(Error::RepresentationMismatch("model has no grid representation"))?;
        d.psi.get(n).ok_or(Error::InvalidDimension { dim: d.n_max() + 1, reason: "index beyond sampled family" })
    }

    /// Largest `r` for which the bi-squeezed series converges: infinite for
    /// bounded families; `atanh(1/q)` for Swanson, where `||phi_{2k}|| ~ q^k`
    /// and the term ratio tends to `q tanh r`.
    pub fn series_radius(&self) -> f64 {
        match &self.kind {
            ModelKind::Swanson(d) => (1.0 / d.spec.growth()).atanh(),
            _ => f64::INFINITY,
        }
    }

    /// `ln ||phi_n||` for any `n`, using closed forms where the model has them.
    pub fn ln_norm_phi(&self, n: usize) -> Result<f64> {
        match &self.kind {
            ModelKind::Identity => Ok(0.0),
            ModelKind::Swanson(d) => Ok(d.spec.n1.norm().ln() + 0.5 * swanson_ln_norm_sq(n, d.spec.nu)?),
            ModelKind::RankOne(spec) => {
                // phi_n = e_n + alpha <u, e_n> v; beyond the support of u it is e_n
                if n < spec.u.dim() {
                    let un = spec.u.as_slice()[n].conj();
                    let mut coeffs = spec.v.scale(spec.alpha * un).into_dvector();
                    if n < coeffs.len() {
                        coeffs[n] += c(1.0);
                        Ok(coeffs.norm().ln())
                    } else {
                        Ok((coeffs.norm_squared() + 1.0).sqrt().ln())
                    }
                } else {
                    Ok(0.0)
                }
            }
            ModelKind::Similarity => Ok(self.phi_fock(n)?.norm().ln()),
        }
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if dim < 2 {
        return Err(Error::InvalidDimension { dim, reason: "models need dim >= 2" });
    }
    Ok(())
}

/// `T = 1`: `phi_n = Psi_n = e_n`, `a = a0`, `b = a0^dag`.
pub fn build_identity(dim: usize) -> Result<DeformationModel> {
    check_dim(dim)?;
    let a = annihilator_matrix(dim)?;
    Ok(DeformationModel {
        name: "identity".into(),
        dim,
        b: a.adjoint(),
        a,
        similarity: Some(Similarity { t: FockOperator::identity(dim), t_inv: FockOperator::identity(dim) }),
        kind: ModelKind::Identity,
    })
}

fn regular_from_similarity(name: String, t: FockOperator, t_inv: FockOperator, kind: ModelKind) -> Result<DeformationModel> {
    let dim = t.dim();
    check_dim(dim)?;
    if t_inv.dim() != dim {
        return Err(Error::DimensionMismatch { left: dim, right: t_inv.dim() });
    }
    let residual = (&t * &t_inv).block_residual(&FockOperator::identity(dim), dim);
    if residual > SIMILARITY_TOL {
        return Err(Error::SingularDeformation);
    }
    let a0 = annihilator_matrix(dim)?;
    let a = &(&t * &a0) * &t_inv;
    let b = &(&t * &a0.adjoint()) * &t_inv;
    Ok(DeformationModel { name, dim, a, b, similarity: Some(Similarity { t, t_inv }), kind })
}

/// A regular model from any bounded `T` with bounded inverse.
pub fn from_similarity(name: &str, t: FockOperator, t_inv: FockOperator) -> Result<DeformationModel> {
    regular_from_similarity(name.to_string(), t, t_inv, ModelKind::Similarity)
}

fn pad(v: &FockVector, dim: usize) -> Result<FockVector> {
    if v.dim() > dim {
        if v.as_slice()[dim..].iter().any(|z| z.norm() != 0.0) {
            return Err(Error::TruncationUnsafe(format!("vector of dim {} does not fit dim {dim}", v.dim())));
        }
        return FockVector::new(v.as_slice()[..dim].to_vec());
    }
    let mut c = v.as_slice().to_vec();
    c.resize(dim, C64::new(0.0, 0.0));
    FockVector::new(c)
}

/// `T = 1 + alpha P_{u,v}` with `P_{u,v} f = <u, f> v` and
/// `T^{-1} = 1 + beta P_{u,v}`.
pub fn build_rank_one(spec: &RankOneSpec, dim: usize) -> Result<DeformationModel> {
    check_dim(dim)?;
    spec.validate()?;
    let u = pad(&spec.u, dim)?;
    let v = pad(&spec.v, dim)?;
    let proj = v.coeffs() * u.coeffs().adjoint();
    let id = DMatrix::<C64>::identity(dim, dim);
    let t = FockOperator::new(&id + &proj * spec.alpha)?;
    let t_inv = FockOperator::new(&id + &proj * spec.beta())?;
    let spec = RankOneSpec { u, v, alpha: spec.alpha };
    if spec.alpha == c(0.0) {
        let mut m = build_identity(dim)?;
        m.kind = ModelKind::RankOne(spec);
        m.name = "rank-one".into();
        return Ok(m);
    }
    regular_from_similarity("rank-one".into(), t, t_inv, ModelKind::RankOne(spec))
}

/// Swanson pseudo-bosons `a = (q0 e^{i nu} + i p0 e^{-i nu})/sqrt 2`,
/// `b = (q0 e^{i nu} - i p0 e^{-i nu})/sqrt 2`, with basis functions sampled on
/// `grid` up to degree `n_max`. `nu = 0` returns the identity model.
pub fn build_swanson(spec: &SwansonSpec, dim: usize, grid: Arc<Grid>, n_max: usize) -> Result<DeformationModel> {
    check_dim(dim)?;
    spec.validate()?;
    if spec.nu == 0.0 {
        return build_identity(dim);
    }
    let q0 = position_matrix(dim)?;
    let p0 = momentum_matrix(dim)?;
    let ep = C64::from_polar(1.0, spec.nu);
    let em = ep.conj();
    let i = C64::new(0.0, 1.0);
    let k = c(std::f64::consts::FRAC_1_SQRT_2);
    let a = (&q0.scale(ep) + &p0.scale(i * em)).scale(k);
    let b = (&q0.scale(ep) - &p0.scale(i * em)).scale(k);

    let n_max = n_max.max(dim - 1);
    let phi_fam = hermite_family(n_max, ep, &grid)?;
    let psi_fam = hermite_family(n_max, em, &grid)?;
    let phi: Vec<GridFunction> = phi_fam.functions.iter().map(|f| f.scale(spec.n1)).collect();
    let psi: Vec<GridFunction> = psi_fam.functions.iter().map(|f| f.scale(spec.n2)).collect();

    // change of representation through the oscillator eigenfunctions on the same grid
    let e = oscillator_basis(dim - 1, &grid)?;
    let project = |f: &GridFunction| -> Result<FockVector> {
        let coeffs = e.iter().map(|ek| l2_inner(ek, f)).collect::<Result<Vec<_>>>()?;
        FockVector::new(coeffs)
    };
    let phi_fock = phi[..dim].iter().map(project).collect::<Result<Vec<_>>>()?;
    let psi_fock = psi[..dim].iter().map(project).collect::<Result<Vec<_>>>()?;

    Ok(DeformationModel {
        name: "swanson".into(),
        dim,
        a,
        b,
        similarity: None,
        kind: ModelKind::Swanson(Box::new(SwansonData {
            spec: *spec,
            grid,
            phi,
            psi,
            phi_fock,
            psi_fock,
            precision_degraded: phi_fam.precision_degraded || psi_fam.precision_degraded,
        })),
    })
}

/// Swanson model on the default grid for degrees up to `n_max`.
pub fn build_swanson_default(nu: f64, dim: usize, n_max: usize, nodes: usize) -> Result<DeformationModel> {
    let spec = SwansonSpec::new(nu)?;
    if nu == 0.0 {
        return build_identity(dim);
    }
    let grid = Arc::new(Grid::for_scaled_hermite(n_max.max(dim - 1), nu, nodes)?);
    build_swanson(&spec, dim, grid, n_max)
}

/// `ln ||phi_n||^2 = ln( sqrt(pi / cos 2nu) L_n(1 / cos 2nu) )` for the Swanson
/// family with `N1 = 1`.
pub fn swanson_ln_norm_sq(n: usize, nu: f64) -> Result<f64> {
    SwansonSpec::new(nu)?;
    let c2 = (2.0 * nu).cos();
    Ok(0.5 * (std::f64::consts::PI / c2).ln() + special::ln_legendre(n, 1.0 / c2))
}

/// `||phi_n||^2` for the Swanson family with `N1 = 1`.
pub fn swanson_norm_sq(n: usize, nu: f64) -> Result<f64> {
    Ok(swanson_ln_norm_sq(n, nu)?.exp())
}

/// Output of the metric construction.
#[derive(Debug, Clone)]
pub struct Metric {
    pub operator: FockOperator,
    /// `true` when built from a truncated `S_Psi` sum rather than `T`.
    pub truncated: bool,
    pub terms: usize,
}

/// Summands below this fraction of the first one end the `S_Psi` sum.
pub const METRIC_DECAY_TOL: f64 = 1e-12;

/// `eta = (T^{-1})^dag T^{-1}` for regular models.
///
/// Non-regular models fall back to `S_Psi = sum_n |Psi_n><Psi_n|` and fail with
/// `MetricDivergent` when the summands do not decay; [`truncated_metric`]
/// forces a capped sum instead.
pub fn metric_eta(model: &DeformationModel) -> Result<Metric> {
    if let Some(s) = model.similarity() {
        return Ok(Metric { operator: &s.t_inv.adjoint() * &s.t_inv, truncated: false, terms: model.dim() });
    }
    let first = model.psi_fock(0)?.norm().powi(2);
    let mut acc = DMatrix::<C64>::zeros(model.dim(), model.dim());
    for n in 0..model.dim() {
        let p = model.psi_fock(n)?;
        let size = p.norm().powi(2);
        if size <= METRIC_DECAY_TOL * first {
            return Ok(Metric { operator: FockOperator::new(acc)?, truncated: true, terms: n });
        }
        if n > 0 && size >= first {
            return Err(Error::MetricDivergent { n, summand_norm: size });
        }
        acc += p.coeffs() * p.coeffs().adjoint();
    }
    Err(Error::MetricDivergent { n: model.dim(), summand_norm: model.psi_fock(model.dim() - 1)?.norm().powi(2) })
}

/// `S_Psi` summed over `n < cap`, flagged as truncated.
pub fn truncated_metric(model: &DeformationModel, cap: usize) -> Result<Metric> {
    let mut acc = DMatrix::<C64>::zeros(model.dim(), model.dim());
    let cap = cap.min(model.dim());
    for n in 0..cap {
        let p = model.psi_fock(n)?;
        acc += p.coeffs() * p.coeffs().adjoint();
    }
    Ok(Metric { operator: FockOperator::new(acc)?, truncated: true, terms: cap })
}

/// Maximum ladder-relation residuals over `n < nmax`.
#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize)]
pub struct LadderResiduals {
    /// `||b phi_n - sqrt(n+1) phi_{n+1}||`
    pub b_phi: f64,
    /// `||a phi_n - sqrt(n) phi_{n-1}||`
    pub a_phi: f64,
    /// `||a^dag Psi_n - sqrt(n+1) Psi_{n+1}||`
    pub a_dag_psi: f64,
    /// `||b^dag Psi_n - sqrt(n) Psi_{n-1}||`
    pub b_dag_psi: f64,
}

impl LadderResiduals {
    pub fn max(&self) -> f64 {
        self.b_phi.max(self.a_phi).max(self.a_dag_psi).max(self.b_dag_psi)
    }
}

#[derive(Debug, Clone)]
pub struct BiorthogonalityReport {
    /// `G_{nm} = <phi_n, Psi_m>`.
    pub gram: DMatrix<C64>,
    pub max_deviation: f64,
    pub ladder: LadderResiduals,
    /// Rows whose Fock representation fails the tail test.
    pub flagged_rows: Vec<usize>,
}

/// Gram matrix `<phi_n, Psi_m>` for `n, m < nmax`, plus ladder residuals.
///
/// Ladder residuals are measured in the number basis on the leading block;
/// Swanson vectors get there through their grid projections.
pub fn biorthogonality_matrix(model: &DeformationModel, nmax: usize) -> Result<BiorthogonalityReport> {
    let phis = (0..nmax).map(|n| model.phi(n)).collect::<Result<Vec<_>>>()?;
    let psis = (0..nmax).map(|n| model.psi(n)).collect::<Result<Vec<_>>>()?;
    let mut gram = DMatrix::<C64>::zeros(nmax, nmax);
    let mut max_deviation: f64 = 0.0;
    for n in 0..nmax {
        for m in 0..nmax {
            let g = phis[n].inner(&psis[m])?;
            gram[(n, m)] = g;
            let want = if n == m { 1.0 } else { 0.0 };
            max_deviation = max_deviation.max((g - c(want)).norm());
        }
    }
    let ladder = ladder_residuals(model, nmax)?;
    let mut flagged_rows = Vec::new();
    for n in 0..nmax.min(model.dim()) {
        let ok = model.phi_fock(n).map(|v| v.is_converged()).unwrap_or(false)
            && model.psi_fock(n).map(|v| v.is_converged()).unwrap_or(false);
        if !ok {
            flagged_rows.push(n);
        }
    }
    Ok(BiorthogonalityReport { gram, max_deviation, ladder, flagged_rows })
}

/// Ladder residuals for `n < nmax` on the leading block of the number basis.
pub fn ladder_residuals(model: &DeformationModel, nmax: usize) -> Result<LadderResiduals> {
    let rows = leading_block(model.dim());
    let a = model.ladder_a();
    let b = model.ladder_b();
    let a_dag = a.adjoint();
    let b_dag = b.adjoint();
    let nmax = nmax.min(model.dim() - 1);
    let phi = (0..=nmax).map(|n| model.phi_fock(n)).collect::<Result<Vec<_>>>()?;
    let psi = (0..=nmax).map(|n| model.psi_fock(n)).collect::<Result<Vec<_>>>()?;
    let mut r = LadderResiduals::default();
    for n in 0..nmax {
        let up = c(((n + 1) as f64).sqrt());
        let down = c((n as f64).sqrt());
        r.b_phi = r.b_phi.max(b.apply(&phi[n])?.distance_leading(&phi[n + 1].scale(up), rows)?);
        r.a_dag_psi = r.a_dag_psi.max(a_dag.apply(&psi[n])?.distance_leading(&psi[n + 1].scale(up), rows)?);
        if n == 0 {
            r.a_phi = r.a_phi.max(a.apply(&phi[0])?.distance_leading(&FockVector::zeros(model.dim()), rows)?);
            r.b_dag_psi = r.b_dag_psi.max(b_dag.apply(&psi[0])?.distance_leading(&FockVector::zeros(model.dim()), rows)?);
        } else {
            r.a_phi = r.a_phi.max(a.apply(&phi[n])?.distance_leading(&phi[n - 1].scale(down), rows)?);
            r.b_dag_psi = r.b_dag_psi.max(b_dag.apply(&psi[n])?.distance_leading(&psi[n - 1].scale(down), rows)?);
        }
    }
    Ok(r)
}

/// Model registry entry, addressable by name.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ModelSpec {
    Identity {},
    RankOne {
        /// Coefficients of `u` as `[re, im]` pairs; defaults to `e0`.
        #[serde(default)]
        u: Option<Vec<[f64; 2]>>,
        /// Defaults to `e0 + e1`.
        #[serde(default)]
        v: Option<Vec<[f64; 2]>>,
        /// Defaults to `1`.
        #[serde(default)]
        alpha: Option<[f64; 2]>,
    },
    Swanson {
        nu: f64,
        #[serde(default)]
        n_max: Option<usize>,
        #[serde(default)]
        grid_nodes: Option<usize>,
    },
}

/// Default highest sampled Swanson degree.
pub const SWANSON_DEFAULT_N_MAX: usize = 128;
/// Default Swanson grid size.
pub const SWANSON_DEFAULT_NODES: usize = 800;

impl ModelSpec {
    pub fn build(&self, dim: usize) -> Result<DeformationModel> {
        match self {
            ModelSpec::Identity {} => build_identity(dim),
            ModelSpec::RankOne { u, v, alpha } => {
                let to_vec = |c: &Vec<[f64; 2]>| {
                    if c.len() > dim {
                        return Err(Error::DimensionMismatch { left: dim, right: c.len() });
                    }
                    let mut coeffs: Vec<C64> = c.iter().map(|p| C64::new(p[0], p[1])).collect();
                    coeffs.resize(dim, C64::new(0.0, 0.0));
                    FockVector::new(coeffs)
                };
                let default = RankOneSpec::example(dim)?;
                let u = u.as_ref().map(to_vec).transpose()?.unwrap_or(default.u);
                let v = v.as_ref().map(to_vec).transpose()?.unwrap_or(default.v);
                let alpha = alpha.map(|a| C64::new(a[0], a[1])).unwrap_or(default.alpha);
                build_rank_one(&RankOneSpec::new(u, v, alpha)?, dim)
            }
            ModelSpec::Swanson { nu, n_max, grid_nodes } => build_swanson_default(
                *nu,
                dim,
                n_max.unwrap_or(SWANSON_DEFAULT_N_MAX),
                grid_nodes.unwrap_or(SWANSON_DEFAULT_NODES),
            ),
        }
    }
}

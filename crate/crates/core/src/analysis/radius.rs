//! Convergence radii of the bi-squeezed series and the Swanson norm asymptotics.

use serde::{Deserialize, Serialize};

use crate::deformations::{DeformationModel, ModelKind, SwansonSpec};
use crate::error::{Error, Result};
use crate::numerics::special::{ln_legendre_sequence, ln_squeeze_weight};

/// Largest `k` in the ratio trace.
pub const RATIO_TRACE_LEN: usize = 2000;
/// Upper end of the bisection; a model still convergent here is reported as entire.
pub const RADIUS_SEARCH_MAX: f64 = 18.0;
/// Relative agreement required to call a closed form a match.
pub const RADIUS_MATCH_TOL: f64 = 0.02;

/// Growth data for the sufficient-convergence theorem: `|alpha_n|` has ratio
/// limit `alpha_bar`, and the basis norms are bounded by `A r_growth^n M_n`
/// with `M_{n+1}/M_n -> m_limit`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundSpec {
    pub alpha_seq: Vec<f64>,
    pub alpha_bar: f64,
    pub a_const: f64,
    pub r_growth: f64,
    pub m_seq: Vec<f64>,
    pub m_limit: f64,
}

/// `alpha_n = n! / sqrt((2n)!)` for `n < len`.
fn squeeze_alpha_seq(len: usize) -> Vec<f64> {
    (0..len).map(|n| (-ln_squeeze_weight(n)).exp()).collect()
}

impl BoundSpec {
    /// Uniformly bounded families (`r = M = 1`).
    pub fn bounded(len: usize) -> Self {
        Self {
            alpha_seq: squeeze_alpha_seq(len),
            alpha_bar: 0.5,
            a_const: 1.0,
            r_growth: 1.0,
            m_seq: vec![1.0; len],
            m_limit: 1.0,
        }
    }

    /// Swanson families: `||phi_n|| <= A q^{n/2}` with `q = x + sqrt(x^2 - 1)`,
    /// `x = 1/cos 2nu`, so `r_growth^2 = q`.
    pub fn swanson(nu: f64, len: usize) -> Result<Self> {
        let spec = SwansonSpec::new(nu)?;
        Ok(Self {
            alpha_seq: squeeze_alpha_seq(len),
            alpha_bar: 0.5,
            a_const: (std::f64::consts::PI / spec.cos2nu()).powf(0.25),
            r_growth: spec.growth().sqrt(),
            m_seq: vec![1.0; len],
            m_limit: 1.0,
        })
    }

    /// Checks the limits against the supplied sequences within 1%.
    pub fn validate(&self) -> Result<()> {
        let n = self.alpha_seq.len();
        if n < 2 || self.m_seq.len() < 2 {
            return Err(Error::DegenerateSpec(n as f64));
        }
        if !(self.a_const > 0.0 && self.r_growth > 0.0) {
            return Err(Error::DegenerateSpec(self.r_growth));
        }
        let ratio = (self.alpha_seq[n - 1] / self.alpha_seq[n - 2]).abs();
        if (ratio - self.alpha_bar).abs() > 0.01 * self.alpha_bar.abs() {
            return Err(Error::DegenerateSpec(ratio));
        }
        let m = self.m_seq.len();
        let m_ratio = self.m_seq[m - 1] / self.m_seq[m - 2];
        if (m_ratio - self.m_limit).abs() > 0.01 * self.m_limit.abs() {
            return Err(Error::DegenerateSpec(m_ratio));
        }
        Ok(())
    }
}

/// `atanh(2 alpha_bar M / r^2)`, infinite when the argument reaches 1.
pub fn convergence_radius_theoretical(spec: &BoundSpec) -> Result<f64> {
    spec.validate()?;
    let arg = 2.0 * spec.alpha_bar * spec.m_limit / (spec.r_growth * spec.r_growth);
    if !(arg > 0.0) || !arg.is_finite() {
        return Err(Error::DegenerateSpec(arg));
    }
    Ok(if arg >= 1.0 { f64::INFINITY } else { arg.atanh() })
}

/// The displayed Swanson radius `atanh(q^{-2})`.
pub fn swanson_radius_displayed_form(nu: f64) -> Result<f64> {
    let q = SwansonSpec::new(nu)?.growth();
    Ok((1.0 / (q * q)).atanh())
}

/// The theorem radius `atanh(q^{-1})` for the Swanson model.
pub fn swanson_radius_theorem_form(nu: f64) -> Result<f64> {
    convergence_radius_theoretical(&BoundSpec::swanson(nu, 64)?)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EmpiricalRadius {
    /// Infinite when every `r` up to [`RADIUS_SEARCH_MAX`] converges.
    pub rho: f64,
    /// `t_{k+1}/t_k` at `r = rho` (or at the search maximum), `k < 2000`.
    pub trace: Vec<f64>,
}

/// `ln ||phi_{2k}||` for `k <= RATIO_TRACE_LEN`.
fn ln_even_norms(model: &DeformationModel) -> Result<Vec<f64>> {
    let n = 2 * RATIO_TRACE_LEN;
    match model.kind() {
        ModelKind::Swanson(d) => {
            let c2 = d.spec.cos2nu();
            let base = 0.5 * (std::f64::consts::PI / c2).ln();
            let seq = ln_legendre_sequence(n, 1.0 / c2);
            let shift = d.spec.n1.norm().ln();
            Ok((0..=RATIO_TRACE_LEN).map(|k| shift + 0.5 * (base + seq[2 * k])).collect())
        }
        _ => (0..=RATIO_TRACE_LEN).map(|k| model.ln_norm_phi(2 * k)).collect(),
    }
}

/// `h_k = (w_{k+1}/w_k) ||phi_{2k+2}|| / (2 ||phi_{2k}||)`, so that the term
/// ratio at radius `r` is `tanh(r) h_k`.
fn growth_trace(ln_norms: &[f64]) -> Vec<f64> {
    (0..RATIO_TRACE_LEN)
        .map(|k| (ln_squeeze_weight(k + 1) - ln_squeeze_weight(k) + ln_norms[k + 1] - ln_norms[k] - 2f64.ln()).exp())
        .collect()
}

/// Limit of `h` from `m = k + 1 = 500, 1000, 2000`, with the `1/m` and `1/m^2`
/// terms eliminated by Richardson extrapolation.
fn extrapolated_limit(h: &[f64]) -> f64 {
    let m = h.len();
    (8.0 * h[m - 1] - 6.0 * h[m / 2 - 1] + h[m / 4 - 1]) / 3.0
}

fn check_monotone(trace: &[f64]) -> Result<()> {
    let tail = &trace[trace.len() / 2..];
    let increasing = tail.windows(2).all(|w| w[1] >= w[0] - 1e-14 * w[0].abs());
    let decreasing = tail.windows(2).all(|w| w[1] <= w[0] + 1e-14 * w[0].abs());
    if increasing || decreasing {
        Ok(())
    } else {
        Err(Error::Inconclusive { k: trace.len(), trace: trace.to_vec() })
    }
}

/// Ratio-test radius of `sum_k (tanh r / 2)^k sqrt((2k)!)/k! ||phi_{2k}||`.
///
/// The ratio `t_{k+1}/t_k` is `tanh(r) h_k` with `h_k` independent of `r`, so
/// the trace is computed once; bisection then finds the largest `r` whose
/// extrapolated limit ratio stays below 1. The term ratios do not depend on
/// `theta`; the argument is kept for interface symmetry with the state
/// constructions.
pub fn convergence_radius_empirical(model: &DeformationModel, _theta: f64) -> Result<EmpiricalRadius> {
    let h = growth_trace(&ln_even_norms(model)?);
    check_monotone(&h)?;
    let limit = extrapolated_limit(&h);
    let scaled = |r: f64| h.iter().map(|x| r.tanh() * x).collect::<Vec<f64>>();
    let converges = |r: f64| r.tanh() * limit < 1.0;
    if converges(RADIUS_SEARCH_MAX) {
        return Ok(EmpiricalRadius { rho: f64::INFINITY, trace: scaled(RADIUS_SEARCH_MAX) });
    }
    let (mut lo, mut hi) = (0.0, RADIUS_SEARCH_MAX);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if converges(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-14 {
            break;
        }
    }
    let rho = 0.5 * (lo + hi);
    Ok(EmpiricalRadius { rho, trace: scaled(rho) })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RadiusAgreement {
    /// Empirical radius matches `atanh(q^{-1})` only.
    Theorem,
    /// Empirical radius matches `atanh(q^{-2})` only.
    DisplayedForm,
    Both,
    Neither,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RadiusReport {
    pub nu: f64,
    pub rho_theoretical: f64,
    pub rho_displayed_form: f64,
    pub rho_empirical: f64,
    pub agreement: RadiusAgreement,
    /// Relative deviations of the empirical radius from the two closed forms.
    pub deviation_theoretical: f64,
    pub deviation_displayed_form: f64,
}

fn rel_dev(a: f64, b: f64) -> f64 {
    if a.is_infinite() && b.is_infinite() {
        0.0
    } else {
        (a - b).abs() / b.abs()
    }
}

/// All three radii for a Swanson model, and which closed form the ratio
/// test supports.
pub fn radius_report(model: &DeformationModel) -> Result<RadiusReport> {
    let nu = match model.kind() {
        ModelKind::Swanson(d) => d.spec.nu,
        _ => 0.0,
    };
    let (rho_theoretical, rho_displayed_form) = if nu == 0.0 {
        (convergence_radius_theoretical(&BoundSpec::bounded(64))?, f64::INFINITY)
    } else {
        (swanson_radius_theorem_form(nu)?, swanson_radius_displayed_form(nu)?)
    };
    let rho_empirical = convergence_radius_empirical(model, 0.0)?.rho;
    let deviation_theoretical = rel_dev(rho_empirical, rho_theoretical);
    let deviation_displayed_form = rel_dev(rho_empirical, rho_displayed_form);
    let agreement = match (deviation_theoretical <= RADIUS_MATCH_TOL, deviation_displayed_form <= RADIUS_MATCH_TOL) {
        (true, true) => RadiusAgreement::Both,
        (true, false) => RadiusAgreement::Theorem,
        (false, true) => RadiusAgreement::DisplayedForm,
        (false, false) => RadiusAgreement::Neither,
    };
    Ok(RadiusReport {
        nu,
        rho_theoretical,
        rho_displayed_form,
        rho_empirical,
        agreement,
        deviation_theoretical,
        deviation_displayed_form,
    })
}

/// Relative deviation of `P_n(x)` from its Laplace-Heine asymptote.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LaplaceHeine {
    pub x: f64,
    /// `(n, |P_n(x) / asymptote - 1|)`.
    pub deviations: Vec<(usize, f64)>,
    pub max_deviation: f64,
}

/// Compares `P_n(x)` with `(2 pi n)^{-1/2} (x^2-1)^{-1/4} (x + sqrt(x^2-1))^{n+1/2}`
/// in log space.
pub fn laplace_heine_check(ns: &[usize], x: f64) -> Result<LaplaceHeine> {
    if !(x > 1.0) || !x.is_finite() {
        return Err(Error::Domain(format!("Laplace-Heine needs x > 1, got {x}")));
    }
    if ns.is_empty() || ns.iter().any(|&n| !(50..=2000).contains(&n)) {
        return Err(Error::Domain("degrees must lie in [50, 2000]".into()));
    }
    let top = *ns.iter().max().expect("non-empty");
    let seq = ln_legendre_sequence(top, x);
    let s = (x * x - 1.0).sqrt();
    let deviations: Vec<(usize, f64)> = ns
        .iter()
        .map(|&n| {
            let nf = n as f64;
            let ln_asym = -0.5 * (std::f64::consts::TAU * nf).ln() - 0.25 * (x * x - 1.0).ln() + (nf + 0.5) * (x + s).ln();
            (n, (seq[n] - ln_asym).exp_m1().abs())
        })
        .collect();
    let max_deviation = deviations.iter().map(|d| d.1).fold(0.0, f64::max);
    Ok(LaplaceHeine { x, deviations, max_deviation })
}

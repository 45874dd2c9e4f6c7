//! Phase-space integrals `(1/pi) ∫ F(alpha) d^2 alpha` over a disk.

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::special::gauss_legendre;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QuadratureScheme {
    /// Gauss-Legendre in `|alpha|^2`, uniform trapezoid in the angle.
    PolarGauss,
    /// Trapezoid on the square `[-R, R]^2`.
    TensorTrapezoid,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureSpec {
    pub radial_order: usize,
    pub angular_order: usize,
    pub cutoff_radius: f64,
    pub scheme: QuadratureScheme,
}

impl QuadratureSpec {
    pub fn polar(radial_order: usize, angular_order: usize, cutoff_radius: f64) -> Self {
        Self { radial_order, angular_order, cutoff_radius, scheme: QuadratureScheme::PolarGauss }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.cutoff_radius > 0.0) || !self.cutoff_radius.is_finite() {
            return Err(Error::InvalidQuadrature("cutoff radius must be positive"));
        }
        if self.radial_order < 4 || self.angular_order < 4 {
            return Err(Error::InvalidQuadrature("orders must be at least 4"));
        }
        Ok(())
    }

    /// Nodes and weights with the `1/pi` already folded into the weights.
    pub fn nodes(&self) -> Result<Vec<(C64, f64)>> {
        self.validate()?;
        let r = self.cutoff_radius;
        let mut out = Vec::with_capacity(self.radial_order * self.angular_order);
        match self.scheme {
            QuadratureScheme::PolarGauss => {
                // (1/pi) ∫∫ F r dr dθ = (1/2pi) ∫_0^{2pi} ∫_0^{R^2} F du dθ, u = r^2
                let (x, w) = gauss_legendre(self.radial_order);
                let half = r * r / 2.0;
                let dtheta = std::f64::consts::TAU / self.angular_order as f64;
                for (xi, wi) in x.iter().zip(&w) {
                    let u = half * (xi + 1.0);
                    let radius = u.sqrt();
                    for j in 0..self.angular_order {
                        let alpha = C64::from_polar(radius, dtheta * j as f64);
                        out.push((alpha, wi * half * dtheta / std::f64::consts::TAU));
                    }
                }
            }
            QuadratureScheme::TensorTrapezoid => {
                let nx = self.radial_order;
                let ny = self.angular_order;
                let hx = 2.0 * r / (nx - 1) as f64;
                let hy = 2.0 * r / (ny - 1) as f64;
                for i in 0..nx {
                    let wx = if i == 0 || i == nx - 1 { 0.5 * hx } else { hx };
                    for j in 0..ny {
                        let wy = if j == 0 || j == ny - 1 { 0.5 * hy } else { hy };
                        let alpha = C64::new(-r + hx * i as f64, -r + hy * j as f64);
                        out.push((alpha, wx * wy / std::f64::consts::PI));
                    }
                }
            }
        }
        Ok(out)
    }
}

/// `(1/pi) ∫_{|alpha| <= R} F(alpha) d^2 alpha`.
///
/// The integrand is evaluated in parallel; the weighted sum is reduced in node
/// order so results are bit-reproducible.
pub fn complex_plane_integral<F>(f: F, spec: &QuadratureSpec) -> Result<C64>
where
    F: Fn(C64) -> Result<C64> + Sync,
{
    let nodes = spec.nodes()?;
    let values: Vec<Result<C64>> = nodes.par_iter().map(|(alpha, _)| f(*alpha)).collect();
    let mut acc = C64::new(0.0, 0.0);
    for ((alpha, w), v) in nodes.iter().zip(values) {
        let v = v?;
        if !v.re.is_finite() || !v.im.is_finite() {
            return Err(Error::NonFiniteIntegrand { at: *alpha });
        }
        acc += v * *w;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gaussian(a: C64) -> Result<C64> {
        Ok(C64::new((-a.norm_sqr()).exp(), 0.0))
    }

    #[test]
    fn gaussian_integrates_to_one() {
        let v = complex_plane_integral(gaussian, &QuadratureSpec::polar(40, 8, 8.0)).unwrap();
        assert!((v - C64::new(1.0, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn odd_angular_moment_vanishes() {
        let f = |a: C64| Ok(a.conj() * (-a.norm_sqr()).exp());
        let v = complex_plane_integral(f, &QuadratureSpec::polar(40, 16, 8.0)).unwrap();
        assert!(v.norm() < 1e-12);
    }

    #[test]
    fn radial_refinement_is_converged() {
        let a = complex_plane_integral(gaussian, &QuadratureSpec::polar(40, 8, 8.0)).unwrap();
        let b = complex_plane_integral(gaussian, &QuadratureSpec::polar(80, 8, 8.0)).unwrap();
        assert!((a - b).norm() < 1e-12);
    }

    #[test]
    fn tensor_trapezoid_also_integrates_gaussian() {
        let spec = QuadratureSpec {
            radial_order: 121,
            angular_order: 121,
            cutoff_radius: 8.0,
            scheme: QuadratureScheme::TensorTrapezoid,
        };
        let v = complex_plane_integral(gaussian, &spec).unwrap();
        assert!((v - C64::new(1.0, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn non_finite_reports_location() {
        let f = |a: C64| Ok(if a.re > 1.0 { C64::new(f64::NAN, 0.0) } else { C64::new(0.0, 0.0) });
        let err = complex_plane_integral(f, &QuadratureSpec::polar(8, 8, 3.0)).unwrap_err();
        match err {
            Error::NonFiniteIntegrand { at } => assert!(at.re > 1.0),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn invalid_spec_rejected() {
        assert!(QuadratureSpec::polar(2, 8, 3.0).validate().is_err());
        assert!(QuadratureSpec::polar(8, 8, -1.0).validate().is_err());
    }
}

//! Adaptive Dormand-Prince 5(4) for complex vector ODEs.

use nalgebra::DVector;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
/// Fifth-order weights minus fourth-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

#[derive(Debug, Clone, Copy, Default)]
pub struct OdeStats {
    pub accepted: usize,
    pub rejected: usize,
}

/// Integrates `y' = f(t, y)` from `t0` to `t1` with mixed error control
/// `|e_i| <= tol (1 + |y_i|)`.
pub fn dopri5<F>(f: F, t0: f64, y0: DVector<C64>, t1: f64, tol: f64) -> Result<(DVector<C64>, OdeStats)>
where
    F: Fn(f64, &DVector<C64>) -> DVector<C64>,
{
    if !(tol > 0.0) {
        return Err(Error::InvalidTolerance(tol));
    }
    let mut stats = OdeStats::default();
    let span = t1 - t0;
    if span == 0.0 {
        return Ok((y0, stats));
    }
    let dir = span.signum();
    let mut t = t0;
    let mut y = y0;
    let mut h = dir * span.abs().min(0.1 * tol.powf(0.2).max(1e-3));
    let h_min = 1e-14 * span.abs();
    let mut k: Vec<DVector<C64>> = Vec::with_capacity(7);
    let mut k1 = f(t, &y);
    while dir * (t1 - t) > 0.0 {
        if dir * (t + h - t1) > 0.0 {
            h = t1 - t;
        }
        k.clear();
        k.push(k1.clone());
        for s in 1..7 {
            let mut ys = y.clone();
            for (j, kj) in k.iter().enumerate() {
                if A[s][j] != 0.0 {
                    ys.axpy(C64::new(h * A[s][j], 0.0), kj, C64::new(1.0, 0.0));
                }
            }
            k.push(f(t + C[s] * h, &ys));
        }
        // the seventh stage is evaluated at the fifth-order solution
        let mut y_new = y.clone();
        for (j, kj) in k.iter().enumerate().take(6) {
            if A[6][j] != 0.0 {
                y_new.axpy(C64::new(h * A[6][j], 0.0), kj, C64::new(1.0, 0.0));
            }
        }
        let mut err_sq = 0.0;
        for i in 0..y.len() {
            let mut e = C64::new(0.0, 0.0);
            for (j, kj) in k.iter().enumerate() {
                e += kj[i] * (h * E[j]);
            }
            let scale = tol * (1.0 + y[i].norm().max(y_new[i].norm()));
            err_sq += (e.norm() / scale).powi(2);
        }
        let err = (err_sq / y.len() as f64).sqrt();
        if !err.is_finite() {
            return Err(Error::IntegrationFailure { t, h });
        }
        let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        if err <= 1.0 {
            t += h;
            y = y_new;
            k1 = k[6].clone();
            stats.accepted += 1;
        } else {
            stats.rejected += 1;
        }
        h *= factor;
        if h.abs() < h_min && dir * (t1 - t) > h_min {
            return Err(Error::IntegrationFailure { t, h });
        }
    }
    Ok((y, stats))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_growth_and_rotation() {
        let rate = C64::new(0.3, 2.0);
        let y0 = DVector::from_vec(vec![C64::new(1.0, 0.0), C64::new(0.0, 2.0)]);
        let (y, stats) = dopri5(|_, y| y * rate, 0.0, y0.clone(), 3.0, 1e-10).unwrap();
        let want = y0 * (rate * 3.0).exp();
        assert!((y - want).norm() < 1e-8);
        assert!(stats.accepted > 5);
    }

    #[test]
    fn backwards_in_time() {
        let y0 = DVector::from_vec(vec![C64::new(1.0, 0.0)]);
        let (y, _) = dopri5(|_, y| y.clone(), 1.0, y0, 0.0, 1e-10).unwrap();
        assert!((y[0].re - (-1f64).exp()).abs() < 1e-9);
    }

    #[test]
    fn time_dependent_rhs() {
        // y' = cos t, y(0) = 0
        let y0 = DVector::from_vec(vec![C64::new(0.0, 0.0)]);
        let (y, _) = dopri5(|t, _| DVector::from_vec(vec![C64::new(t.cos(), 0.0)]), 0.0, y0, 2.0, 1e-11).unwrap();
        assert!((y[0].re - 2f64.sin()).abs() < 1e-9);
    }

    #[test]
    fn blow_up_reports_failure() {
        let y0 = DVector::from_vec(vec![C64::new(1.0, 0.0)]);
        let res = dopri5(|_, y| y.map(|v| v * v), 0.0, y0, 2.0, 1e-8);
        assert!(matches!(res, Err(Error::IntegrationFailure { .. })));
    }
}

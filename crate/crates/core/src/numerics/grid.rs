//! Position-space grids, sampled wavefunctions, and scaled Hermite functions.

use std::sync::Arc;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Default number of nodes on the real line.
pub const DEFAULT_GRID_NODES: usize = 400;

/// Multiplier on the classical turning point used to size the grid extent.
pub const GRID_EXTENT_FACTOR: f64 = 1.6;

/// Beyond this degree the Hermite recurrence is flagged as precision-degraded.
pub const HERMITE_DEGREE_BUDGET: usize = 2000;

/// Quadrature nodes and positive weights on the real line.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl Grid {
    pub fn new(nodes: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if nodes.len() != weights.len() {
            return Err(Error::InvalidGrid("nodes and weights differ in length"));
        }
        if nodes.len() < 2 {
            return Err(Error::InvalidGrid("need at least two nodes"));
        }
        if nodes.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidGrid("nodes must be strictly increasing"));
        }
        if weights.iter().any(|w| !(*w > 0.0) || !w.is_finite()) {
            return Err(Error::InvalidGrid("weights must be positive"));
        }
        Ok(Self { nodes, weights })
    }

    /// Trapezoid rule with `m` equispaced nodes on `[-half_width, half_width]`.
    pub fn trapezoid(m: usize, half_width: f64) -> Result<Self> {
        if m < 2 || !(half_width > 0.0) {
            return Err(Error::InvalidGrid("trapezoid grid needs m >= 2 and a positive extent"));
        }
        let h = 2.0 * half_width / (m - 1) as f64;
        let nodes: Vec<f64> = (0..m).map(|i| -half_width + h * i as f64).collect();
        let mut weights = vec![h; m];
        weights[0] *= 0.5;
        weights[m - 1] *= 0.5;
        Self::new(nodes, weights)
    }

    /// Gauss-Hermite nodes with weights rescaled by `exp(x^2)`, so that
    /// `sum w_i f(x_i)` integrates `f` itself rather than `f e^{-x^2}`.
    pub fn gauss_hermite(m: usize) -> Result<Self> {
        if m < 2 {
            return Err(Error::InvalidGrid("Gauss-Hermite needs m >= 2"));
        }
        // Golub-Welsch Jacobi matrix for weight e^{-x^2}
        let mut jac = DMatrix::<f64>::zeros(m, m);
        for k in 1..m {
            let off = (k as f64 / 2.0).sqrt();
            jac[(k - 1, k)] = off;
            jac[(k, k - 1)] = off;
        }
        let mut nodes: Vec<f64> = SymmetricEigen::new(jac).eigenvalues.iter().copied().collect();
        nodes.sort_by(|a, b| a.partial_cmp(b).unwrap());
        // Newton polish on the normalized Hermite function of degree m, then
        // Christoffel weights 1 / sum_k psi_k(x)^2.
        for x in nodes.iter_mut() {
            for _ in 0..3 {
                let (psi, dpsi) = hermite_function_and_derivative(m, *x);
                if dpsi != 0.0 {
                    *x -= psi / dpsi;
                }
            }
        }
        let weights = nodes
            .iter()
            .map(|&x| {
                let sum: f64 = real_hermite_functions(m - 1, x).iter().map(|p| p * p).sum();
                1.0 / sum
            })
            .collect();
        Self::new(nodes, weights)
    }

    /// Trapezoid grid sized for Swanson-type functions up to degree `n_max`.
    ///
    /// `|exp(-e^{2i nu} x^2 / 2)| = exp(-cos(2 nu) x^2 / 2)`, so the support widens
    /// as `cos(2 nu) -> 0`; the extent is `GRID_EXTENT_FACTOR` times
    /// `sqrt((2 n_max + 1) / cos 2nu)`.
    pub fn for_scaled_hermite(n_max: usize, nu: f64, m: usize) -> Result<Self> {
        let c = (2.0 * nu).cos();
        if c <= 0.0 {
            return Err(Error::NonNormalizable { re_s2: c });
        }
        let half = GRID_EXTENT_FACTOR * ((2 * n_max + 1) as f64 / c).sqrt();
        Self::trapezoid(m, half)
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Orthonormal Hermite functions `psi_0..=psi_n` at a real point.
fn real_hermite_functions(n: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    let p0 = std::f64::consts::PI.powf(-0.25) * (-x * x / 2.0).exp();
    out.push(p0);
    if n == 0 {
        return out;
    }
    out.push(2f64.sqrt() * x * p0);
    for k in 1..n {
        let next = (2.0 / (k + 1) as f64).sqrt() * x * out[k] - (k as f64 / (k + 1) as f64).sqrt() * out[k - 1];
        out.push(next);
    }
    out
}

fn hermite_function_and_derivative(n: usize, x: f64) -> (f64, f64) {
    let psi = real_hermite_functions(n, x);
    // psi_n' = sqrt(2n) psi_{n-1} - x psi_n
    (psi[n], (2.0 * n as f64).sqrt() * psi[n - 1] - x * psi[n])
}

/// Complex samples of a function on a shared [`Grid`].
#[derive(Debug, Clone)]
pub struct GridFunction {
    grid: Arc<Grid>,
    values: Vec<C64>,
}

impl GridFunction {
    pub fn new(grid: Arc<Grid>, values: Vec<C64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::DimensionMismatch { left: grid.len(), right: values.len() });
        }
        Ok(Self { grid, values })
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn scale(&self, c: C64) -> GridFunction {
        Self { grid: self.grid.clone(), values: self.values.iter().map(|v| v * c).collect() }
    }

    /// `self + c * other` on the same grid.
    pub fn axpy(&self, c: C64, other: &GridFunction) -> Result<GridFunction> {
        same_grid(self, other)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a + c * b).collect();
        Ok(Self { grid: self.grid.clone(), values })
    }

    pub fn norm(&self) -> f64 {
        l2_inner(self, self).map(|z| z.re.max(0.0).sqrt()).unwrap_or(0.0)
    }

    pub fn zeros(grid: Arc<Grid>) -> Self {
        let values = vec![C64::new(0.0, 0.0); grid.len()];
        Self { grid, values }
    }
}

fn same_grid(f: &GridFunction, g: &GridFunction) -> Result<()> {
    if Arc::ptr_eq(&f.grid, &g.grid) || *f.grid == *g.grid {
        Ok(())
    } else {
        Err(Error::GridMismatch)
    }
}

/// `sum_i w_i conj(f_i) g_i`, conjugate-linear in `f`.
pub fn l2_inner(f: &GridFunction, g: &GridFunction) -> Result<C64> {
    same_grid(f, g)?;
    Ok(f.values
        .iter()
        .zip(&g.values)
        .zip(f.grid.weights())
        .map(|((a, b), w)| a.conj() * b * *w)
        .sum())
}

/// A family of scaled Hermite functions together with a stability flag.
#[derive(Debug, Clone)]
pub struct HermiteFamily {
    pub functions: Vec<GridFunction>,
    /// Set when the requested degree exceeds [`HERMITE_DEGREE_BUDGET`] or some
    /// sample overflowed.
    pub precision_degraded: bool,
}

/// `x -> (2^n n!)^{-1/2} H_n(s x) exp(-s^2 x^2 / 2)` for `n = 0..=n_max`.
///
/// The Gaussian is carried inside the recurrence: each node keeps a pair of
/// mantissas and a separate real log-scale that absorbs renormalizations, so
/// neither the Gaussian underflow nor the super-exponential growth of `H_n`
/// reaches the floating point limits before the final multiply.
pub fn hermite_family(n_max: usize, s: C64, grid: &Arc<Grid>) -> Result<HermiteFamily> {
    let re_s2 = (s * s).re;
    if !(re_s2 > 0.0) {
        return Err(Error::NonNormalizable { re_s2 });
    }
    let m = grid.len();
    let mut columns = vec![Vec::with_capacity(m); n_max + 1];
    let mut degraded = n_max > HERMITE_DEGREE_BUDGET;
    for &x in grid.nodes() {
        let sx = s * x;
        let exponent = -sx * sx / 2.0;
        let mut log_scale = exponent.re;
        let phase = C64::from_polar(1.0, exponent.im);
        let mut prev = C64::new(0.0, 0.0);
        let mut cur = phase;
        for (n, col) in columns.iter_mut().enumerate() {
            if n > 0 {
                let k = (n - 1) as f64;
                let next = (2.0 / (k + 1.0)).sqrt() * sx * cur - (k / (k + 1.0)).sqrt() * prev;
                prev = cur;
                cur = next;
                let mag = cur.norm();
                if mag > 1e150 || (mag < 1e-150 && mag > 0.0) {
                    let shift = mag.ln();
                    let f = (-shift).exp();
                    cur *= f;
                    prev *= f;
                    log_scale += shift;
                }
            }
            let v = cur * log_scale.exp();
            if !v.re.is_finite() || !v.im.is_finite() {
                degraded = true;
            }
            col.push(v);
        }
    }
    let functions = columns
        .into_iter()
        .map(|values| GridFunction { grid: grid.clone(), values })
        .collect();
    Ok(HermiteFamily { functions, precision_degraded: degraded })
}

/// Single scaled Hermite function; see [`hermite_family`].
pub fn hermite_grid_function(n: usize, s: C64, grid: &Arc<Grid>) -> Result<(GridFunction, bool)> {
    let mut fam = hermite_family(n, s, grid)?;
    let f = fam.functions.pop().expect("family is non-empty");
    Ok((f, fam.precision_degraded))
}

/// Orthonormal oscillator eigenfunctions `e_0..=e_{n_max}` on `grid`.
pub fn oscillator_basis(n_max: usize, grid: &Arc<Grid>) -> Result<Vec<GridFunction>> {
    let norm = C64::new(std::f64::consts::PI.powf(-0.25), 0.0);
    Ok(hermite_family(n_max, C64::new(1.0, 0.0), grid)?
        .functions
        .into_iter()
        .map(|f| f.scale(norm))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit() -> C64 {
        C64::new(1.0, 0.0)
    }

    #[test]
    fn ground_state_is_gaussian() {
        let grid = Arc::new(Grid::trapezoid(11, 3.0).unwrap());
        let (f, degraded) = hermite_grid_function(0, unit(), &grid).unwrap();
        assert!(!degraded);
        for (x, v) in grid.nodes().iter().zip(f.values()) {
            assert!((v - C64::new((-x * x / 2.0).exp(), 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn first_excited_at_one() {
        let grid = Arc::new(Grid::new(vec![0.0, 1.0], vec![1.0, 1.0]).unwrap());
        let (f, _) = hermite_grid_function(1, unit(), &grid).unwrap();
        // 2^{-1/2} * 2 * e^{-1/2}
        assert!((f.values()[1].re - 0.857_763_884_960_706_8).abs() < 1e-14);
    }

    #[test]
    fn second_at_origin_with_complex_scale() {
        let grid = Arc::new(Grid::new(vec![0.0, 1.0], vec![1.0, 1.0]).unwrap());
        let (f, _) = hermite_grid_function(2, C64::from_polar(1.0, 0.3), &grid).unwrap();
        assert!((f.values()[0] - C64::new(-2.0 / 8f64.sqrt(), 0.0)).norm() < 1e-15);
    }

    #[test]
    fn non_decaying_scale_rejected() {
        let grid = Arc::new(Grid::trapezoid(8, 1.0).unwrap());
        let s = C64::from_polar(1.0, std::f64::consts::FRAC_PI_4 + 0.01);
        assert!(matches!(hermite_grid_function(0, s, &grid), Err(Error::NonNormalizable { .. })));
    }

    #[test]
    fn orthonormal_on_gauss_hermite_grid() {
        let grid = Arc::new(Grid::gauss_hermite(200).unwrap());
        let e = oscillator_basis(1, &grid).unwrap();
        assert!((l2_inner(&e[0], &e[0]).unwrap() - unit()).norm() < 1e-12);
        assert!(l2_inner(&e[0], &e[1]).unwrap().norm() < 1e-12);
    }

    #[test]
    fn gram_matrix_is_identity() {
        let grid = Arc::new(Grid::trapezoid(400, 1.6 * 41f64.sqrt()).unwrap());
        let e = oscillator_basis(20, &grid).unwrap();
        for n in 0..=20 {
            for m in 0..=20 {
                let g = l2_inner(&e[n], &e[m]).unwrap();
                let want = if n == m { 1.0 } else { 0.0 };
                assert!((g - C64::new(want, 0.0)).norm() < 1e-10, "({n},{m}) {g}");
            }
        }
    }

    #[test]
    fn large_degree_does_not_overflow() {
        let grid = Arc::new(Grid::trapezoid(64, 60.0).unwrap());
        let fam = hermite_family(400, C64::from_polar(1.0, 0.3), &grid).unwrap();
        assert!(!fam.precision_degraded);
        assert!(fam.functions.iter().all(|f| f.values().iter().all(|v| v.re.is_finite())));
    }

    #[test]
    fn grid_mismatch_detected() {
        let g1 = Arc::new(Grid::trapezoid(10, 1.0).unwrap());
        let g2 = Arc::new(Grid::trapezoid(10, 2.0).unwrap());
        let f = GridFunction::zeros(g1);
        let g = GridFunction::zeros(g2);
        assert_eq!(l2_inner(&f, &g), Err(Error::GridMismatch));
    }

    #[test]
    fn invalid_grids_rejected() {
        assert!(Grid::new(vec![0.0, 0.0], vec![1.0, 1.0]).is_err());
        assert!(Grid::new(vec![0.0, 1.0], vec![1.0, -1.0]).is_err());
    }
}

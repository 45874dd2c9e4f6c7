//! Legendre polynomials and factorial helpers.

/// `ln n!` by direct summation (exact enough for n up to several thousand).
pub fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// `ln( sqrt((2k)!) / k! )`, the squeezed-vacuum coefficient magnitude.
pub fn ln_squeeze_weight(k: usize) -> f64 {
    0.5 * ln_factorial(2 * k) - ln_factorial(k)
}

/// `sqrt((2k)!) / k!` for each `k < count`, built by the ratio
/// `sqrt((2k+1)(2k+2)) / (k+1)` to avoid factorial overflow.
pub fn squeeze_weights(count: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(count);
    let mut w = 1.0;
    for k in 0..count {
        out.push(w);
        let kf = k as f64;
        w *= ((2.0 * kf + 1.0) * (2.0 * kf + 2.0)).sqrt() / (kf + 1.0);
    }
    out
}

/// `P_n(x)` by the three-term recurrence.
pub fn legendre(n: usize, x: f64) -> f64 {
    let (mut prev, mut cur) = (1.0, x);
    if n == 0 {
        return prev;
    }
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0) * x * cur - kf * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// `ln P_k(x)` for `k = 0..=n` and `x >= 1`.
///
/// The recurrence is run on rescaled values with a separate log accumulator;
/// for `x > 1` all `P_k` are positive and the forward recurrence follows the
/// dominant solution.
pub fn ln_legendre_sequence(n: usize, x: f64) -> Vec<f64> {
    assert!(x >= 1.0, "log-space Legendre needs x >= 1");
    let mut out = Vec::with_capacity(n + 1);
    out.push(0.0);
    if n == 0 {
        return out;
    }
    out.push(x.ln());
    let (mut prev, mut cur, mut log_scale) = (1.0, x, 0.0);
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0) * x * cur - kf * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
        if cur > 1e100 {
            prev /= cur;
            log_scale += cur.ln();
            cur = 1.0;
        }
        out.push(log_scale + cur.ln());
    }
    out
}

pub fn ln_legendre(n: usize, x: f64) -> f64 {
    *ln_legendre_sequence(n, x).last().expect("non-empty")
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; order];
    let mut weights = vec![0.0; order];
    let n = order as f64;
    for i in 0..order.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(order, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(order, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[order - 1 - i] = x;
        weights[i] = w;
        weights[order - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut prev, mut cur) = (1.0, x);
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0) * x * cur - kf * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    let nf = n as f64;
    (cur, nf * (x * cur - prev) / (x * x - 1.0))
}

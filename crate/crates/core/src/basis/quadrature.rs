//! Gauss–Legendre nodes and weights on the reference interval (−1, 1).
//!
//! Nodes are the roots of the Legendre polynomial P_n, found by Newton
//! iteration from Chebyshev-like initial guesses. Weights follow from
//! w = 2 / ((1 − x²) P'_n(x)²).

use std::f64::consts::PI;

const NEWTON_TOL: f64 = 1e-15;
const NEWTON_MAX_ITER: usize = 100;

/// Evaluates the classical Legendre polynomial P_n and its derivative at `x`
/// using the three-term recurrence.
pub fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    if n == 0 {
        return (1.0, 0.0);
    }
    let mut p_prev = 1.0;
    let mut p = x;
    for k in 2..=n {
        let kf = k as f64;
        let p_next = ((2.0 * kf - 1.0) * x * p - (kf - 1.0) * p_prev) / kf;
        p_prev = p;
        p = p_next;
    }
    // P'_n = n (x P_n − P_{n−1}) / (x² − 1), valid away from the endpoints.
    let dp = if (x * x - 1.0).abs() > f64::EPSILON {
        n as f64 * (x * p - p_prev) / (x * x - 1.0)
    } else {
        // P'_n(±1) = (±1)^{n+1} n(n+1)/2
        let sign = if x > 0.0 || n % 2 == 1 { 1.0 } else { -1.0 };
        sign * (n * (n + 1)) as f64 / 2.0
    };
    (p, dp)
}

/// Values of the classical Legendre polynomials P_0..=P_degree at `x`.
pub fn legendre_all(degree: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(degree + 1);
    out.push(1.0);
    if degree >= 1 {
        out.push(x);
    }
    for k in 2..=degree {
        let kf = k as f64;
        let next = ((2.0 * kf - 1.0) * x * out[k - 1] - (kf - 1.0) * out[k - 2]) / kf;
        out.push(next);
    }
    out
}

/// Values of the Legendre polynomials normalized to be orthonormal on (−1, 1):
/// p_j = sqrt((2j + 1) / 2) P_j.
pub fn orthonormal_legendre_all(degree: usize, x: f64) -> Vec<f64> {
    let mut out = legendre_all(degree, x);
    for (j, v) in out.iter_mut().enumerate() {
        *v *= ((2 * j + 1) as f64 / 2.0).sqrt();
    }
    out
}

/// Writes `p_0(x) ..= p_{out.len()−1}(x)` (orthonormal scaling) into `out`
/// without allocating.
pub fn orthonormal_legendre_into(x: f64, out: &mut [f64]) {
    let n = out.len();
    if n == 0 {
        return;
    }
    let (mut prev, mut cur) = (0.0, 1.0);
    for k in 0..n {
        if k > 0 {
            let kf = k as f64;
            let next = ((2.0 * kf - 1.0) * x * cur - (kf - 1.0) * prev) / kf;
            prev = cur;
            cur = next;
        }
        out[k] = cur * ((2 * k + 1) as f64 / 2.0).sqrt();
    }
}

/// The `n`-point Gauss–Legendre rule on (−1, 1), nodes in ascending order.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "a quadrature rule needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let half = n.div_ceil(2);
    for i in 0..half {
        // Initial guess for the i-th largest root.
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..NEWTON_MAX_ITER {
            let (p, dp) = legendre_with_derivative(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < NEWTON_TOL {
                break;
            }
        }
        let (_, dp) = legendre_with_derivative(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        // The middle root is exactly zero by symmetry.
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

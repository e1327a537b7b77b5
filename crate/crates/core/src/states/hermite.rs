//! Hermite functions, their derivatives, displaced atoms in one dimension and
//! closed-form displaced Fock matrix elements.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;

/// `phi_0(y), ..., phi_max(y)` with
/// `phi_m = H_m(y) exp(-y^2/2) / (2^m m! sqrt(pi))^{1/2}`.
pub fn hermite_functions(max: usize, y: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(max + 1);
    out.push(PI.powf(-0.25) * (-0.5 * y * y).exp());
    if max >= 1 {
        out.push(2f64.sqrt() * y * out[0]);
    }
    for k in 1..max {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * y * out[k] - (kf / (kf + 1.0)).sqrt() * out[k - 1];
        out.push(next);
    }
    out
}

/// Expansion coefficients of `d^b phi_m` in the Hermite basis, indexed by
/// Hermite order `0..=m+b`. Uses `phi_m' = sqrt(m/2) phi_{m-1} - sqrt((m+1)/2) phi_{m+1}`.
pub fn derivative_coeffs(m: usize, b: usize) -> Vec<f64> {
    let mut c = vec![0.0; m + b + 1];
    c[m] = 1.0;
    for _ in 0..b {
        let mut next = vec![0.0; c.len()];
        for (j, &cj) in c.iter().enumerate() {
            if cj == 0.0 {
                continue;
            }
            if j > 0 {
                next[j - 1] += cj * (j as f64 / 2.0).sqrt();
            }
            if j + 1 < next.len() {
                next[j + 1] -= cj * ((j + 1) as f64 / 2.0).sqrt();
            }
        }
        c = next;
    }
    c
}

/// `d^b phi_m (y)`.
pub fn hermite_derivative(m: usize, b: usize, y: f64) -> f64 {
    let phi = hermite_functions(m + b, y);
    derivative_coeffs(m, b)
        .iter()
        .zip(&phi)
        .map(|(c, p)| c * p)
        .sum()
}

/// `d^b` of `y -> exp(i (y - ax/2) ap) phi_m(y - ax)`.
pub fn displaced_1d(m: usize, ax: f64, ap: f64, b: usize, y: f64) -> C64 {
    let u = y - ax;
    let phase = C64::from_polar(1.0, (y - 0.5 * ax) * ap);
    if b == 0 {
        return phase * hermite_functions(m, u)[m];
    }
    let phi = hermite_functions(m + b, u);
    let iap = C64::new(0.0, ap);
    let mut acc = C64::new(0.0, 0.0);
    let mut binom = 1.0;
    for k in 0..=b {
        let dk: f64 = derivative_coeffs(m, k)
            .iter()
            .zip(&phi)
            .map(|(c, p)| c * p)
            .sum();
        acc += iap.powu((b - k) as u32) * (binom * dk);
        binom = binom * (b - k) as f64 / (k + 1) as f64;
    }
    phase * acc
}

/// Generalized Laguerre polynomial `L_k^{(a)}(r)`.
pub fn laguerre(k: usize, a: usize, r: f64) -> f64 {
    let a = a as f64;
    let mut prev = 1.0;
    if k == 0 {
        return prev;
    }
    let mut cur = 1.0 + a - r;
    for j in 1..k {
        let jf = j as f64;
        let next = ((2.0 * jf + 1.0 + a - r) * cur - (jf + a) * prev) / (jf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// `<phi_m | D_xi | phi_k>` in one dimension, with `D_xi` acting as
/// `exp(i (y - xi_x/2) xi_p) phi(y - xi_x)`.
pub fn displaced_fock_element(m: usize, k: usize, xi_x: f64, xi_p: f64) -> C64 {
    let zeta = C64::new(xi_x, xi_p) / 2f64.sqrt();
    let r = zeta.norm_sqr();
    let env = (-0.5 * r).exp();
    if m >= k {
        let ratio: f64 = (k + 1..=m).map(|j| 1.0 / (j as f64).sqrt()).product();
        zeta.powu((m - k) as u32) * (ratio * env * laguerre(k, m - k, r))
    } else {
        let ratio: f64 = (m + 1..=k).map(|j| 1.0 / (j as f64).sqrt()).product();
        (-zeta.conj()).powu((k - m) as u32) * (ratio * env * laguerre(m, k - m, r))
    }
}

/// Gauss-Legendre nodes and weights on `[0, 1]`.
pub fn gauss_legendre_unit(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for i in 0..n {
        // Newton iteration from the Chebyshev-like initial guess.
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes.push(0.5 * (1.0 - x));
        weights.push(1.0 / ((1.0 - x * x) * dp * dp));
    }
    (nodes, weights)
}

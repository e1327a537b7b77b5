//! The two four-dimensional identities for `n = 1`: the Wigner function from
//! matrix elements through the double characteristic integral, and its
//! decomposition over off-diagonal Wigner transforms.
//!
//! Both run on the self-dual lattice `h = sqrt(2 pi / N)`, `N` nodes per axis,
//! centered so the origin is a node. Matrix elements only ever need overlaps at
//! points of the `h/2` lattice, which are precomputed once.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use super::{VerifyConfig, VerifyReport};
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::states::{MixedState, PureState};
use crate::transforms::{reference_wigner_at, wigner_at, MatelSampler};

/// Residuals at or below this count as converged for the refinement test.
pub const FLOOR: f64 = 1e-10;
/// At most this many evaluation points per call.
pub const MAX_POINTS: usize = 8;
/// Lattice sizes used by the suite.
pub const LATTICES: [usize; 2] = [48, 64];

/// The 8 evaluation points used by the suite.
pub const SUITE_POINTS: [[f64; 2]; 8] = [
    [0.0, 0.0],
    [1.0, 1.0],
    [1.0, 0.0],
    [-0.5, 0.7],
    [0.3, -1.2],
    [-1.1, -0.4],
    [0.8, 0.2],
    [-0.2, 1.5],
];

fn spacing(nodes: usize) -> f64 {
    (2.0 * PI / nodes as f64).sqrt()
}

/// Overlaps `<chi_a|psi_j>` at every `h/2` lattice point `a = (i, k) h/2`
/// with `|i|, |k| <= half`.
struct HalfLattice {
    half: isize,
    weights: Vec<f64>,
    overlaps: Vec<Vec<C64>>,
}

impl HalfLattice {
    fn new(rho: &MixedState, chi: &PureState, half: isize, step: f64) -> Result<Self> {
        let sampler = MatelSampler::new(rho, chi)?;
        let side = (2 * half + 1) as usize;
        let overlaps = (0..side * side)
            .into_par_iter()
            .map(|flat| {
                let i = (flat / side) as isize - half;
                let k = (flat % side) as isize - half;
                sampler.overlaps(&[i as f64 * step, k as f64 * step])
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            half,
            weights: rho.components().iter().map(|(w, _)| *w).collect(),
            overlaps,
        })
    }

    fn at(&self, i: isize, k: isize) -> &[C64] {
        let side = 2 * self.half + 1;
        &self.overlaps[((i + self.half) * side + k + self.half) as usize]
    }

    /// `M(a, b) = sum_j lambda_j <chi_a|psi_j><psi_j|chi_b>` at half-lattice indices.
    fn matel(&self, a: (isize, isize), b: (isize, isize)) -> C64 {
        let oa = self.at(a.0, a.1);
        let ob = self.at(b.0, b.1);
        self.weights
            .iter()
            .zip(oa.iter().zip(ob))
            .map(|(w, (x, y))| x * y.conj() * *w)
            .sum()
    }
}

fn validate(rho: &MixedState, chi: &PureState, points: &[Vec<f64>], nodes: usize) -> Result<()> {
    if rho.dim() != 1 || chi.dim() != 1 {
        return Err(Error::Unsupported("4-D identities are implemented for n = 1 only".into()));
    }
    if points.is_empty() || points.len() > MAX_POINTS {
        return Err(Error::Unsupported(format!("between 1 and {MAX_POINTS} evaluation points required")));
    }
    if points.iter().any(|p| p.len() != 2) {
        return Err(Error::DimensionMismatch("evaluation points must have length 2".into()));
    }
    if nodes < 8 || nodes % 2 != 0 {
        return Err(Error::InvalidGrid(format!("lattice needs an even node count >= 8, got {nodes}")));
    }
    if !rho.is_analytic() || !chi.is_analytic() {
        return Err(Error::NotAnalytic("4-D identity check"));
    }
    Ok(())
}

fn lattice_label(nodes: usize) -> Grid {
    let h = spacing(nodes);
    Grid::phase_space(1, nodes.next_power_of_two(), 0.5 * nodes as f64 * h).expect("valid lattice")
}

fn report(check: &str, tol_key: &str, cfg: &VerifyConfig, nodes: usize, result: Result<f64>, n_points: usize) -> VerifyReport {
    let tol = cfg.tol(tol_key);
    match result {
        Ok(residual) => {
            let h = spacing(nodes);
            VerifyReport::judged(check, residual, tol, n_points, &lattice_label(nodes), cfg.seed)
                .with_detail(format!("self-dual lattice {nodes}^4, h = {h:.6}"))
        }
        Err(e) => VerifyReport::errored(check, tol, cfg.seed, &e),
    }
}

/// `sum over (beta, xi) lattice of exp(-i (a - beta/2)^xi) M(beta - xi/2, beta + xi/2)`,
/// scaled by `(2pi)^{-3} h^4`, at each point.
pub fn wigner_from_matel(rho: &MixedState, chi: &PureState, points: &[Vec<f64>], nodes: usize) -> Result<Vec<C64>> {
    validate(rho, chi, points, nodes)?;
    let h = spacing(nodes);
    let c = (nodes / 2) as isize;
    // beta = (k - c) h and xi = (l - c) h; beta -+ xi/2 sits at half-lattice
    // index 2(k - c) -+ (l - c).
    let lat = HalfLattice::new(rho, chi, 3 * c + 1, 0.5 * h)?;
    let coord = |k: usize| (k as isize - c) as f64 * h;
    let pref = h.powi(4) / (2.0 * PI).powi(3);
    Ok(points
        .iter()
        .map(|alpha| {
            let sum: C64 = (0..nodes * nodes)
                .into_par_iter()
                .map(|flat| {
                    let (kx, kp) = (flat / nodes, flat % nodes);
                    let (ux, up) = (alpha[0] - 0.5 * coord(kx), alpha[1] - 0.5 * coord(kp));
                    // exp(-i u^xi) = exp(-i ux xi_p) exp(+i up xi_x)
                    let ex: Vec<C64> = (0..nodes).map(|l| C64::from_polar(1.0, up * coord(l))).collect();
                    let ep: Vec<C64> = (0..nodes).map(|l| C64::from_polar(1.0, -ux * coord(l))).collect();
                    let (bx, bp) = (2 * (kx as isize - c), 2 * (kp as isize - c));
                    let mut acc = C64::new(0.0, 0.0);
                    for (lx, fx) in ex.iter().enumerate() {
                        let sx = lx as isize - c;
                        let mut row = C64::new(0.0, 0.0);
                        for (lp, fp) in ep.iter().enumerate() {
                            let sp = lp as isize - c;
                            row += fp * lat.matel((bx - sx, bp - sp), (bx + sx, bp + sp));
                        }
                        acc += fx * row;
                    }
                    acc
                })
                .collect::<Vec<_>>()
                .into_iter()
                .sum();
            sum * pref
        })
        .collect())
}

/// `(2pi)^{-2} h^4 sum over (alpha, beta) of W_{|chi_a><chi_b|}(gamma) M(alpha, beta)`
/// at each point, with the closed-form off-diagonal transform.
pub fn wigner_decomp(rho: &MixedState, chi: &PureState, points: &[Vec<f64>], nodes: usize) -> Result<Vec<C64>> {
    validate(rho, chi, points, nodes)?;
    let h = spacing(nodes);
    let c = (nodes / 2) as isize;
    // Lattice points alpha = (k - c) h are even half-lattice indices.
    let lat = HalfLattice::new(rho, chi, 2 * c, 0.5 * h)?;
    let coord = |k: usize| (k as isize - c) as f64 * h;
    // exp(i alpha^beta / 2) = t[ax][bp] conj(t[ap][bx]) with t[k][l] = exp(i t_k t_l / 2).
    let t: Vec<Vec<C64>> = (0..nodes)
        .map(|k| (0..nodes).map(|l| C64::from_polar(1.0, 0.5 * coord(k) * coord(l))).collect())
        .collect();
    let pref = h.powi(4) / (2.0 * PI).powi(2);
    let side = 2 * nodes - 1;
    points
        .iter()
        .map(|gamma| {
            // W_chi(gamma - (alpha + beta)/2), indexed by kx_a + kx_b and kp_a + kp_b.
            let wtab: Vec<f64> = (0..side * side)
                .into_par_iter()
                .map(|flat| {
                    let (sx, sp) = ((flat / side) as isize - 2 * c, (flat % side) as isize - 2 * c);
                    reference_wigner_at(chi, &[gamma[0] - 0.5 * sx as f64 * h, gamma[1] - 0.5 * sp as f64 * h])
                })
                .collect();
            // exp(i gamma^alpha) per lattice point.
            let g: Vec<C64> = (0..nodes * nodes)
                .map(|flat| {
                    let (x, p) = (coord(flat / nodes), coord(flat % nodes));
                    C64::from_polar(1.0, gamma[0] * p - gamma[1] * x)
                })
                .collect();
            let sum: C64 = (0..nodes * nodes)
                .into_par_iter()
                .map(|fa| {
                    let (ax, ap) = (fa / nodes, fa % nodes);
                    let ia = (2 * (ax as isize - c), 2 * (ap as isize - c));
                    let mut acc = C64::new(0.0, 0.0);
                    for bx in 0..nodes {
                        for bp in 0..nodes {
                            let ib = (2 * (bx as isize - c), 2 * (bp as isize - c));
                            let w = wtab[(ax + bx) * side + ap + bp];
                            let phase = g[bx * nodes + bp].conj() * t[ax][bp] * t[ap][bx].conj();
                            acc += phase * lat.matel(ia, ib) * w;
                        }
                    }
                    g[fa] * acc
                })
                .collect::<Vec<_>>()
                .into_iter()
                .sum();
            Ok(sum * pref)
        })
        .collect()
}

fn max_residual(rho: &MixedState, points: &[Vec<f64>], values: Result<Vec<C64>>) -> Result<f64> {
    let values = values?;
    Ok(points
        .iter()
        .zip(values)
        .map(|(p, v)| (v - wigner_at(rho, p)).norm())
        .fold(0.0, f64::max))
}

/// Max difference between the double-characteristic integral and the Wigner function.
pub fn check_wigner_from_matel(rho: &MixedState, chi: &PureState, points: &[Vec<f64>], nodes: usize) -> VerifyReport {
    check_wigner_from_matel_with(rho, chi, points, nodes, &VerifyConfig::default())
}

pub fn check_wigner_from_matel_with(
    rho: &MixedState,
    chi: &PureState,
    points: &[Vec<f64>],
    nodes: usize,
    cfg: &VerifyConfig,
) -> VerifyReport {
    let r = max_residual(rho, points, wigner_from_matel(rho, chi, points, nodes));
    report("double-char", "double-char", cfg, nodes, r, points.len())
}

/// Max difference between the off-diagonal decomposition and the Wigner function.
pub fn check_wigner_decomp(rho: &MixedState, chi: &PureState, points: &[Vec<f64>], nodes: usize) -> VerifyReport {
    check_wigner_decomp_with(rho, chi, points, nodes, &VerifyConfig::default())
}

pub fn check_wigner_decomp_with(
    rho: &MixedState,
    chi: &PureState,
    points: &[Vec<f64>],
    nodes: usize,
    cfg: &VerifyConfig,
) -> VerifyReport {
    let r = max_residual(rho, points, wigner_decomp(rho, chi, points, nodes));
    report("wigner-decomp", "wigner-decomp", cfg, nodes, r, points.len())
}

/// Both identities on both lattices, each also requiring the residual to at
/// least halve from the coarse to the fine lattice (or sit at [`FLOOR`]).
pub fn suite_checks(rho: &MixedState, chi: &PureState, cfg: &VerifyConfig) -> Vec<VerifyReport> {
    if rho.dim() != 1 || !rho.is_analytic() || !chi.is_analytic() {
        let why = if rho.dim() != 1 {
            "4-D identities run for n = 1 only"
        } else {
            "requires analytic states"
        };
        return vec![
            VerifyReport::skipped("double-char", cfg.tol("double-char"), cfg.seed, why),
            VerifyReport::skipped("wigner-decomp", cfg.tol("wigner-decomp"), cfg.seed, why),
        ];
    }
    let points: Vec<Vec<f64>> = SUITE_POINTS.iter().map(|p| p.to_vec()).collect();
    let pair = |check: &dyn Fn(usize) -> VerifyReport| {
        let coarse = check(LATTICES[0]);
        let mut fine = check(LATTICES[1]);
        let reduced = fine.residual <= coarse.residual / 2.0 || fine.residual <= FLOOR;
        if !coarse.passed() || !reduced {
            fine.status = super::Status::Fail;
        }
        fine.detail = format!(
            "{}; residual {:.3e} on {}^4 -> {:.3e} on {}^4 ({})",
            fine.detail,
            coarse.residual,
            LATTICES[0],
            fine.residual,
            LATTICES[1],
            if reduced { "refinement ok" } else { "no refinement gain" }
        );
        fine
    };
    vec![
        pair(&|nodes| check_wigner_from_matel_with(rho, chi, &points, nodes, cfg)),
        pair(&|nodes| check_wigner_decomp_with(rho, chi, &points, nodes, cfg)),
    ]
}

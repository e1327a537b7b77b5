//! Quantum states built from displaced Hermite-Gauss atoms, plus the
//! non-Schwartz demo states.

pub mod hermite;
pub mod io;
pub mod random;

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::grid::wedge;
use hermite::{displaced_1d, displaced_fock_element, gauss_legendre_unit};

/// Gauss-Legendre order used for overlaps with the plateau.
const PLATEAU_NODES: usize = 64;

/// `c D_alpha phi_m` with `m` a per-axis Hermite order and `alpha = [x.., p..]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Atom {
    pub m: Vec<u32>,
    pub alpha: Vec<f64>,
    pub coeff: C64,
}

impl Atom {
    pub fn new(m: Vec<u32>, alpha: Vec<f64>, coeff: C64) -> Result<Self> {
        if m.is_empty() || alpha.len() != 2 * m.len() {
            return Err(Error::InvalidState(format!(
                "atom with {} Hermite orders needs a displacement of length {}, got {}",
                m.len(),
                2 * m.len(),
                alpha.len()
            )));
        }
        if alpha.iter().any(|v| !v.is_finite()) || !(coeff.re.is_finite() && coeff.im.is_finite()) {
            return Err(Error::InvalidState("atom has non-finite parameters".into()));
        }
        Ok(Self { m, alpha, coeff })
    }

    /// Undisplaced unit-norm Hermite function.
    pub fn fock(m: Vec<u32>) -> Self {
        let n = m.len();
        Self {
            m,
            alpha: vec![0.0; 2 * n],
            coeff: C64::new(1.0, 0.0),
        }
    }

    pub fn dim(&self) -> usize {
        self.m.len()
    }

    pub fn eval(&self, y: &[f64]) -> C64 {
        let n = self.dim();
        let mut v = self.coeff;
        for j in 0..n {
            v *= displaced_1d(self.m[j] as usize, self.alpha[j], self.alpha[n + j], 0, y[j]);
        }
        v
    }

    /// `d^b` of the atom at `y`.
    pub fn eval_deriv(&self, y: &[f64], b: &[u32]) -> C64 {
        let n = self.dim();
        let mut v = self.coeff;
        for j in 0..n {
            v *= displaced_1d(
                self.m[j] as usize,
                self.alpha[j],
                self.alpha[n + j],
                b[j] as usize,
                y[j],
            );
        }
        v
    }

    /// `<self|other>`, using `<D_a phi_m | D_b phi_k> = exp(i a^b/2) <phi_m|D_{b-a}|phi_k>`.
    pub fn inner(&self, other: &Atom) -> C64 {
        let n = self.dim();
        let mut v = self.coeff.conj() * other.coeff * C64::from_polar(1.0, 0.5 * wedge(&self.alpha, &other.alpha));
        for j in 0..n {
            v *= displaced_fock_element(
                self.m[j] as usize,
                other.m[j] as usize,
                other.alpha[j] - self.alpha[j],
                other.alpha[n + j] - self.alpha[n + j],
            );
        }
        v
    }

    /// The atom after applying `D_xi`, using `D_xi D_a = exp(i a^xi/2) D_{xi+a}`.
    pub fn displaced(&self, xi: &[f64]) -> Atom {
        let phase = C64::from_polar(1.0, 0.5 * wedge(&self.alpha, xi));
        Atom {
            m: self.m.clone(),
            alpha: self.alpha.iter().zip(xi).map(|(a, x)| a + x).collect(),
            coeff: self.coeff * phase,
        }
    }

    /// `int_{[0,1]^n} atom(y) dy`.
    fn plateau_integral(&self, nodes: &[f64], weights: &[f64]) -> C64 {
        let n = self.dim();
        let mut v = self.coeff;
        for j in 0..n {
            let s: C64 = nodes
                .iter()
                .zip(weights)
                .map(|(&y, &w)| displaced_1d(self.m[j] as usize, self.alpha[j], self.alpha[n + j], 0, y) * w)
                .sum();
            v *= s;
        }
        v
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Kind {
    Atoms(Vec<Atom>),
    /// Indicator of the unit cube `[0,1]^n`.
    Plateau(usize),
}

/// A wavefunction: a finite atom superposition, or the plateau indicator.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    kind: Kind,
    norm_sq: f64,
}

impl PureState {
    pub fn from_atoms(atoms: Vec<Atom>) -> Result<Self> {
        let n = match atoms.first() {
            Some(a) => a.dim(),
            None => return Err(Error::InvalidState("pure state has no atoms".into())),
        };
        if atoms.iter().any(|a| a.dim() != n) {
            return Err(Error::InvalidState("atoms of different dimensions".into()));
        }
        let mut norm_sq = 0.0;
        for a in &atoms {
            for b in &atoms {
                norm_sq += a.inner(b).re;
            }
        }
        Ok(Self {
            kind: Kind::Atoms(atoms),
            norm_sq: norm_sq.max(0.0),
        })
    }

    /// Unit Gaussian `pi^{-n/4} exp(-|y|^2/2)`.
    pub fn vacuum(n: usize) -> Self {
        Self::fock(vec![0; n])
    }

    pub fn fock(m: Vec<u32>) -> Self {
        Self {
            kind: Kind::Atoms(vec![Atom::fock(m)]),
            norm_sq: 1.0,
        }
    }

    /// Coherent state `D_alpha phi_0`.
    pub fn coherent(alpha: &[f64]) -> Self {
        let n = alpha.len() / 2;
        Self {
            kind: Kind::Atoms(vec![Atom {
                m: vec![0; n],
                alpha: alpha.to_vec(),
                coeff: C64::new(1.0, 0.0),
            }]),
            norm_sq: 1.0,
        }
    }

    /// Indicator of `[0,1]^n`: unit norm, but its Wigner function decays only
    /// polynomially in momentum.
    pub fn plateau(n: usize) -> Self {
        Self {
            kind: Kind::Plateau(n),
            norm_sq: 1.0,
        }
    }

    pub fn dim(&self) -> usize {
        match &self.kind {
            Kind::Atoms(a) => a[0].dim(),
            Kind::Plateau(n) => *n,
        }
    }

    pub fn is_analytic(&self) -> bool {
        matches!(self.kind, Kind::Atoms(_))
    }

    pub fn atoms(&self) -> Option<&[Atom]> {
        match &self.kind {
            Kind::Atoms(a) => Some(a),
            Kind::Plateau(_) => None,
        }
    }

    fn analytic_atoms(&self, what: &'static str) -> Result<&[Atom]> {
        self.atoms().ok_or(Error::NotAnalytic(what))
    }

    pub fn norm_sq(&self) -> f64 {
        self.norm_sq
    }

    pub fn normalized(&self) -> Result<Self> {
        if !(self.norm_sq > 0.0) {
            return Err(Error::InvalidState("cannot normalize a zero wavefunction".into()));
        }
        Ok(self.scaled(C64::new(self.norm_sq.sqrt().recip(), 0.0)))
    }

    /// Multiplies every coefficient by `c`.
    pub fn scaled(&self, c: C64) -> Self {
        match &self.kind {
            Kind::Atoms(atoms) => Self {
                kind: Kind::Atoms(
                    atoms
                        .iter()
                        .map(|a| Atom {
                            coeff: a.coeff * c,
                            ..a.clone()
                        })
                        .collect(),
                ),
                norm_sq: self.norm_sq * c.norm_sqr(),
            },
            // The plateau only ever appears with unit amplitude.
            Kind::Plateau(_) => self.clone(),
        }
    }

    pub fn eval(&self, y: &[f64]) -> C64 {
        match &self.kind {
            Kind::Atoms(atoms) => atoms.iter().map(|a| a.eval(y)).sum(),
            Kind::Plateau(n) => {
                if y[..*n].iter().all(|&v| (0.0..=1.0).contains(&v)) {
                    C64::new(1.0, 0.0)
                } else {
                    C64::new(0.0, 0.0)
                }
            }
        }
    }

    /// Exact derivative `d^b psi(y)` for analytic states.
    pub fn eval_deriv(&self, y: &[f64], b: &[u32]) -> Result<C64> {
        let atoms = self.analytic_atoms("pointwise derivatives")?;
        Ok(atoms.iter().map(|a| a.eval_deriv(y, b)).sum())
    }

    /// `D_xi psi`.
    pub fn displaced(&self, xi: &[f64]) -> Result<Self> {
        if xi.len() != 2 * self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "displacement of length {} for a state in {} dimensions",
                xi.len(),
                self.dim()
            )));
        }
        let atoms = self.analytic_atoms("displacement")?;
        Ok(Self {
            kind: Kind::Atoms(atoms.iter().map(|a| a.displaced(xi)).collect()),
            norm_sq: self.norm_sq,
        })
    }

    /// `<self|other>` in closed form (Gauss-Legendre against the plateau).
    pub fn inner(&self, other: &PureState) -> Result<C64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch("inner product of states in different dimensions".into()));
        }
        match (&self.kind, &other.kind) {
            (Kind::Atoms(a), Kind::Atoms(b)) => {
                let mut s = C64::new(0.0, 0.0);
                for x in a {
                    for y in b {
                        s += x.inner(y);
                    }
                }
                Ok(s)
            }
            (Kind::Plateau(_), Kind::Atoms(b)) => {
                let (nodes, weights) = gauss_legendre_unit(PLATEAU_NODES);
                Ok(b.iter().map(|y| y.plateau_integral(&nodes, &weights)).sum())
            }
            (Kind::Atoms(_), Kind::Plateau(_)) => Ok(other.inner(self)?.conj()),
            (Kind::Plateau(_), Kind::Plateau(_)) => Ok(C64::new(1.0, 0.0)),
        }
    }

    /// `<psi|D_xi|psi>`.
    pub fn expect_displacement(&self, xi: &[f64]) -> Result<C64> {
        self.inner(&self.displaced(xi)?)
    }
}

/// A finite mixture `rho = sum_j lambda_j |psi_j><psi_j|` with `lambda_j >= 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct MixedState {
    components: Vec<(f64, PureState)>,
    name: String,
}

impl MixedState {
    pub fn new(weights: Vec<f64>, states: Vec<PureState>) -> Result<Self> {
        if weights.len() != states.len() {
            return Err(Error::InvalidState(format!(
                "{} weights for {} pure states",
                weights.len(),
                states.len()
            )));
        }
        if states.is_empty() {
            return Err(Error::InvalidState("mixture has no components".into()));
        }
        if let Some((i, w)) = weights.iter().enumerate().find(|(_, w)| !(w.is_finite() && **w >= 0.0)) {
            return Err(Error::InvalidState(format!("weight {i} is {w}; weights must be finite and >= 0")));
        }
        let n = states[0].dim();
        if states.iter().any(|s| s.dim() != n) {
            return Err(Error::InvalidState("pure states of different dimensions".into()));
        }
        Ok(Self {
            components: weights.into_iter().zip(states).collect(),
            name: "state".into(),
        })
    }

    pub fn pure(psi: PureState) -> Self {
        Self {
            components: vec![(1.0, psi)],
            name: "pure".into(),
        }
    }

    pub fn vacuum(n: usize) -> Self {
        Self::pure(PureState::vacuum(n)).with_name("vacuum")
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.components[0].1.dim()
    }

    pub fn components(&self) -> &[(f64, PureState)] {
        &self.components
    }

    pub fn is_analytic(&self) -> bool {
        self.components.iter().all(|(_, s)| s.is_analytic())
    }

    /// `tr rho = sum_j lambda_j ||psi_j||^2`.
    pub fn trace(&self) -> f64 {
        self.components.iter().map(|(w, s)| w * s.norm_sq()).sum()
    }

    /// `K(x, y) = sum_j lambda_j psi_j(x) conj(psi_j(y))`.
    pub fn eval_kernel(&self, x: &[f64], y: &[f64]) -> C64 {
        self.components
            .iter()
            .map(|(w, s)| s.eval(x) * s.eval(y).conj() * *w)
            .sum()
    }

    /// Re-expresses the mixture through its eigendecomposition, so that the
    /// components are orthonormal and the weights are the eigenvalues.
    pub fn spectral(&self) -> Result<MixedState> {
        let k = self.components.len();
        let mut gram = DMatrix::<C64>::zeros(k, k);
        for i in 0..k {
            for j in 0..k {
                let g = self.components[i].1.inner(&self.components[j].1)?;
                gram[(i, j)] = g * (self.components[i].0 * self.components[j].0).sqrt();
            }
        }
        let eig = gram.symmetric_eigen();
        let top = eig.eigenvalues.iter().cloned().fold(0.0, f64::max);
        let mut order: Vec<usize> = (0..k).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));

        let mut weights = Vec::new();
        let mut states = Vec::new();
        for idx in order {
            let mu = eig.eigenvalues[idx];
            if mu <= 1e-14 * top {
                continue;
            }
            let mut atoms = Vec::new();
            for (i, (w, s)) in self.components.iter().enumerate() {
                let c = eig.eigenvectors[(i, idx)] * (w / mu).sqrt();
                let src = s.analytic_atoms("spectral decomposition")?;
                atoms.extend(src.iter().map(|a| Atom {
                    coeff: a.coeff * c,
                    ..a.clone()
                }));
            }
            weights.push(mu);
            states.push(PureState::from_atoms(atoms)?);
        }
        Ok(MixedState::new(weights, states)?.with_name(self.name.clone()))
    }

    /// Multiplies component `j` by the phase `exp(i phases[j])`; `rho` is unchanged.
    pub fn with_component_phases(&self, phases: &[f64]) -> MixedState {
        let components = self
            .components
            .iter()
            .zip(phases.iter().chain(std::iter::repeat(&0.0)))
            .map(|((w, s), &t)| (*w, s.scaled(C64::from_polar(1.0, t))))
            .collect();
        MixedState {
            components,
            name: self.name.clone(),
        }
    }
}

/// Largest truncation accepted by [`heavy_tail`].
pub const HEAVY_TAIL_MAX_K: usize = 20;

/// Mixture of unit Gaussians centred at `z_k = k^3`, `k = 1..=K`, with weights
/// proportional to `k^{-2}` and renormalized to trace one. The untruncated
/// mixture has a divergent first moment.
pub fn heavy_tail(k_max: usize) -> Result<MixedState> {
    if k_max == 0 || k_max > HEAVY_TAIL_MAX_K {
        return Err(Error::InvalidState(format!(
            "heavy-tail truncation K must be in 1..={HEAVY_TAIL_MAX_K}, got {k_max}"
        )));
    }
    let raw: Vec<f64> = (1..=k_max).map(|k| 6.0 / (PI * PI * (k * k) as f64)).collect();
    let total: f64 = raw.iter().sum();
    let states = (1..=k_max)
        .map(|k| PureState::coherent(&[(k * k * k) as f64, 0.0]))
        .collect();
    Ok(MixedState::new(raw.iter().map(|w| w / total).collect(), states)?.with_name(format!("heavy-tail-{k_max}")))
}

/// Built-in states addressable by name: `vacuum`, `fock1`, `plateau`, `heavy-tail`.
pub fn demo_state(name: &str, k: Option<usize>) -> Result<MixedState> {
    match name {
        "vacuum" => Ok(MixedState::vacuum(1)),
        "fock1" => Ok(MixedState::pure(PureState::fock(vec![1])).with_name("fock1")),
        "plateau" => Ok(MixedState::pure(PureState::plateau(1)).with_name("plateau")),
        "heavy-tail" | "heavy_tail" => heavy_tail(k.unwrap_or(5)),
        other => Err(Error::InvalidState(format!(
            "unknown demo state '{other}' (expected vacuum, fock1, plateau or heavy-tail)"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn quad_norm(psi: &PureState, l: f64, n: usize) -> f64 {
        let h = 2.0 * l / n as f64;
        (0..n)
            .map(|k| psi.eval(&[-l + k as f64 * h]).norm_sqr())
            .sum::<f64>()
            * h
    }

    #[test]
    fn vacuum_values() {
        let v = PureState::vacuum(1);
        assert!((v.eval(&[0.0]).re - 0.7511255444649425).abs() < 1e-15);
        assert!(v.eval(&[41.0]).norm() < 1e-300);
        assert!(v.eval(&[-45.0]).norm() < 1e-300);
    }

    #[test]
    fn shifted_gaussian_has_no_phase() {
        let s = 1.3;
        let psi = PureState::coherent(&[s, 0.0]);
        for &y in &[-1.0, 0.0, 0.4, 2.5] {
            let want = PI.powf(-0.25) * (-(y - s) * (y - s) / 2.0).exp();
            let got = psi.eval(&[y]);
            assert!((got.re - want).abs() < 1e-15 && got.im.abs() < 1e-15);
        }
    }

    #[test]
    fn displacement_composition() {
        let psi = PureState::from_atoms(vec![
            Atom::new(vec![1], vec![0.3, -0.2], C64::new(0.6, 0.1)).unwrap(),
            Atom::new(vec![0], vec![-1.0, 0.7], C64::new(-0.2, 0.5)).unwrap(),
        ])
        .unwrap();
        assert_eq!(psi.displaced(&[0.0, 0.0]).unwrap(), psi);
        let xi = [0.9, -1.4];
        let back = psi.displaced(&xi).unwrap().displaced(&[-0.9, 1.4]).unwrap();
        for y in [-2.0, -0.3, 0.0, 1.1] {
            assert!((back.eval(&[y]) - psi.eval(&[y])).norm() < 1e-14);
        }
        let moved = psi.displaced(&xi).unwrap();
        assert!((quad_norm(&moved, 16.0, 1024) - quad_norm(&psi, 16.0, 1024)).abs() < 1e-12);
        // Pointwise check of the displacement action.
        for y in [-1.2, 0.5, 2.0] {
            let want = C64::from_polar(1.0, (y - xi[0] / 2.0) * xi[1]) * psi.eval(&[y - xi[0]]);
            assert!((moved.eval(&[y]) - want).norm() < 1e-14);
        }
    }

    #[test]
    fn closed_form_norm_matches_quadrature() {
        let psi = PureState::from_atoms(vec![
            Atom::new(vec![2], vec![0.5, 1.0], C64::new(1.0, -0.3)).unwrap(),
            Atom::new(vec![0], vec![-0.4, -0.8], C64::new(0.2, 0.9)).unwrap(),
        ])
        .unwrap();
        assert!((psi.norm_sq() - quad_norm(&psi, 16.0, 1024)).abs() < 1e-12);
    }

    #[test]
    fn kernel_examples() {
        let vac = MixedState::vacuum(1);
        let x = [0.4];
        let y = [-1.1];
        let want = (-(0.16 + 1.21) / 2.0f64).exp() / PI.sqrt();
        assert!((vac.eval_kernel(&x, &y).re - want).abs() < 1e-15);

        let mix = MixedState::new(
            vec![0.5, 0.5],
            vec![PureState::fock(vec![0]), PureState::fock(vec![1])],
        )
        .unwrap();
        assert!((mix.eval_kernel(&[0.0], &[0.0]).re - 0.5 / PI.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn kernel_hermitian_and_diagonal_nonnegative() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..5 {
            let rho = random::random_mixture(&mut rng, 1, 5, 2);
            for _ in 0..200 {
                let x = [rng.gen_range(-4.0..4.0)];
                let y = [rng.gen_range(-4.0..4.0)];
                let kxy = rho.eval_kernel(&x, &y);
                let kyx = rho.eval_kernel(&y, &x);
                assert!((kxy - kyx.conj()).norm() <= 1e-15 * (1.0 + kxy.norm()));
                let kxx = rho.eval_kernel(&x, &x);
                assert!(kxx.re >= 0.0 && kxx.im.abs() < 1e-15);
            }
        }
    }

    #[test]
    fn derivative_oracle_against_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let psi = random::random_pure(&mut rng, 1, 3);
        let eps = 1e-5;
        for _ in 0..100 {
            let y = rng.gen_range(-3.0..3.0);
            let fd = (psi.eval(&[y + eps]) - psi.eval(&[y - eps])) / (2.0 * eps);
            let exact = psi.eval_deriv(&[y], &[1]).unwrap();
            assert!((exact - fd).norm() < 1e-6);
        }
    }

    #[test]
    fn plateau_behaviour() {
        let p = PureState::plateau(1);
        assert_eq!(p.eval(&[0.5]).re, 1.0);
        assert_eq!(p.eval(&[-0.1]).re, 0.0);
        assert!(p.displaced(&[1.0, 0.0]).is_err());
        assert!(p.eval_deriv(&[0.5], &[1]).is_err());
        // <phi_0 | plateau> = pi^{-1/4} int_0^1 exp(-y^2/2) dy
        let want = PI.powf(-0.25) * (PI / 2.0).sqrt() * libm_erf(1.0 / 2f64.sqrt());
        let got = PureState::vacuum(1).inner(&p).unwrap();
        assert!((got.re - want).abs() < 1e-13, "{got} vs {want}");
    }

    // erf via its Taylor series, adequate for |x| < 1.
    fn libm_erf(x: f64) -> f64 {
        let mut term = x;
        let mut sum = x;
        for k in 1..60 {
            term *= -x * x / k as f64;
            sum += term / (2 * k + 1) as f64;
        }
        2.0 / PI.sqrt() * sum
    }

    #[test]
    fn heavy_tail_demo() {
        let one = heavy_tail(1).unwrap();
        assert_eq!(one.components().len(), 1);
        assert_eq!(one.components()[0].0, 1.0);
        assert_eq!(one.components()[0].1, PureState::coherent(&[1.0, 0.0]));
        let moment = |k| {
            heavy_tail(k)
                .unwrap()
                .components()
                .iter()
                .map(|(w, s)| w * s.atoms().unwrap()[0].alpha[0])
                .sum::<f64>()
        };
        assert!(moment(3) > moment(2));
        assert!((heavy_tail(6).unwrap().trace() - 1.0).abs() < 1e-14);
        assert!(heavy_tail(21).is_err());
        assert!(heavy_tail(0).is_err());
    }

    #[test]
    fn spectral_decomposition_of_mixture() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let rho = random::random_mixture(&mut rng, 1, 3, 2);
        let spec = rho.spectral().unwrap();
        assert!((spec.trace() - rho.trace()).abs() < 1e-12);
        for (i, (_, a)) in spec.components().iter().enumerate() {
            for (j, (_, b)) in spec.components().iter().enumerate() {
                let g = a.inner(b).unwrap();
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((g - want).norm() < 1e-10);
            }
        }
        for &(x, y) in &[(0.3, -0.9), (1.2, 1.0), (-2.0, 0.4)] {
            assert!((spec.eval_kernel(&[x], &[y]) - rho.eval_kernel(&[x], &[y])).norm() < 1e-12);
        }
    }

    #[test]
    fn invalid_mixtures_rejected() {
        assert!(MixedState::new(vec![-0.1], vec![PureState::vacuum(1)]).is_err());
        assert!(MixedState::new(vec![0.5, 0.5], vec![PureState::vacuum(1)]).is_err());
        assert!(MixedState::new(vec![], vec![]).is_err());
        assert!(Atom::new(vec![0], vec![0.0], C64::new(1.0, 0.0)).is_err());
    }
}

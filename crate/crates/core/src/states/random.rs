//! Seeded random test states.

use num_complex::Complex64 as C64;
use rand::Rng;

use super::{Atom, MixedState, PureState};

/// Largest Hermite order drawn for random atoms.
pub const RANDOM_MAX_ORDER: u32 = 2;
/// Random displacements are drawn from `[-SPREAD, SPREAD]` on every axis.
pub const SPREAD: f64 = 1.5;

pub fn random_atom<R: Rng>(rng: &mut R, n: usize) -> Atom {
    let m = (0..n).map(|_| rng.gen_range(0..=RANDOM_MAX_ORDER)).collect();
    let alpha = (0..2 * n).map(|_| rng.gen_range(-SPREAD..SPREAD)).collect();
    let coeff = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    Atom { m, alpha, coeff }
}

/// Unit-norm superposition of `atoms` random atoms.
pub fn random_pure<R: Rng>(rng: &mut R, n: usize, atoms: usize) -> PureState {
    loop {
        let list = (0..atoms.max(1)).map(|_| random_atom(rng, n)).collect();
        let psi = PureState::from_atoms(list).expect("atoms share a dimension");
        if psi.norm_sq() > 1e-6 {
            return psi.normalized().expect("nonzero norm");
        }
    }
}

/// Trace-one mixture of `components` random pure states, returned in its
/// orthonormal eigenbasis.
pub fn random_mixture<R: Rng>(rng: &mut R, n: usize, components: usize, atoms: usize) -> MixedState {
    let states: Vec<PureState> = (0..components.max(1)).map(|_| random_pure(rng, n, atoms)).collect();
    let raw: Vec<f64> = states.iter().map(|_| rng.gen_range(0.2..1.0)).collect();
    let total: f64 = raw.iter().sum();
    let weights = raw.iter().map(|w| w / total).collect();
    MixedState::new(weights, states)
        .and_then(|m| m.spectral())
        .expect("random mixture is valid")
        .with_name("random")
}

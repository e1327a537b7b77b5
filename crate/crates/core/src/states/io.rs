//! JSON state files.
//!
//! A mixed state is `{"weights": [...], "pure_states": [{"atoms": [...]}, ...]}`
//! and a reference wavefunction is a single `{"atoms": [...]}`. Each atom is
//! `{"m": 0 or [..], "alpha": [x.., p..], "coeff": [re, im]}`.

use std::fs;
use std::path::Path;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::{Atom, MixedState, PureState};
use crate::error::{Error, Result};

#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum Orders {
    Scalar(u32),
    Vector(Vec<u32>),
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AtomDoc {
    m: Orders,
    alpha: Vec<f64>,
    coeff: [f64; 2],
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PureDoc {
    atoms: Vec<AtomDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MixedDoc {
    weights: Vec<f64>,
    pure_states: Vec<PureDoc>,
}

fn parse_err(e: serde_json::Error) -> Error {
    Error::Parse(format!("line {}, column {}: {e}", e.line(), e.column()))
}

fn field_err(path: &str, msg: impl std::fmt::Display) -> Error {
    Error::Parse(format!("{path}: {msg}"))
}

fn atom_from_doc(doc: &AtomDoc, path: &str) -> Result<Atom> {
    if doc.alpha.is_empty() || doc.alpha.len() % 2 != 0 {
        return Err(field_err(
            &format!("{path}.alpha"),
            format!("expected an even, nonzero number of entries, got {}", doc.alpha.len()),
        ));
    }
    let n = doc.alpha.len() / 2;
    let m = match &doc.m {
        Orders::Scalar(v) if n == 1 => vec![*v],
        Orders::Scalar(_) => {
            return Err(field_err(&format!("{path}.m"), format!("expected a list of {n} orders")));
        }
        Orders::Vector(v) if v.len() == n => v.clone(),
        Orders::Vector(v) => {
            return Err(field_err(
                &format!("{path}.m"),
                format!("expected {n} orders to match alpha, got {}", v.len()),
            ));
        }
    };
    Atom::new(m, doc.alpha.clone(), C64::new(doc.coeff[0], doc.coeff[1])).map_err(|e| field_err(path, e))
}

fn pure_from_doc(doc: &PureDoc, path: &str) -> Result<PureState> {
    if doc.atoms.is_empty() {
        return Err(field_err(&format!("{path}.atoms"), "at least one atom is required"));
    }
    let atoms = doc
        .atoms
        .iter()
        .enumerate()
        .map(|(i, a)| atom_from_doc(a, &format!("{path}.atoms[{i}]")))
        .collect::<Result<Vec<_>>>()?;
    PureState::from_atoms(atoms).map_err(|e| field_err(path, e))
}

pub fn mixed_from_json(text: &str) -> Result<MixedState> {
    let doc: MixedDoc = serde_json::from_str(text).map_err(parse_err)?;
    if doc.weights.len() != doc.pure_states.len() {
        return Err(field_err(
            "weights",
            format!("{} weights for {} pure states", doc.weights.len(), doc.pure_states.len()),
        ));
    }
    if let Some(i) = doc.weights.iter().position(|w| !(w.is_finite() && *w >= 0.0)) {
        return Err(field_err(&format!("weights[{i}]"), "weights must be finite and nonnegative"));
    }
    let states = doc
        .pure_states
        .iter()
        .enumerate()
        .map(|(i, p)| pure_from_doc(p, &format!("pure_states[{i}]")))
        .collect::<Result<Vec<_>>>()?;
    if states.iter().any(|s| s.dim() != states[0].dim()) {
        return Err(field_err("pure_states", "all pure states must share one dimension"));
    }
    MixedState::new(doc.weights, states)
}

/// Parses a reference wavefunction and normalizes it.
pub fn pure_from_json(text: &str) -> Result<PureState> {
    let doc: PureDoc = serde_json::from_str(text).map_err(parse_err)?;
    pure_from_doc(&doc, "chi")?.normalized()
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

fn with_path(path: &Path, e: Error) -> Error {
    match e {
        Error::Parse(msg) => Error::Parse(format!("{}: {msg}", path.display())),
        other => other,
    }
}

pub fn load_state(path: &Path) -> Result<MixedState> {
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "state".into());
    mixed_from_json(&read(path)?)
        .map(|s| s.with_name(name))
        .map_err(|e| with_path(path, e))
}

pub fn load_pure(path: &Path) -> Result<PureState> {
    pure_from_json(&read(path)?).map_err(|e| with_path(path, e))
}

fn pure_doc(psi: &PureState) -> Result<PureDoc> {
    let atoms = psi
        .atoms()
        .ok_or_else(|| Error::Unsupported("only atom expansions can be written as JSON".into()))?;
    Ok(PureDoc {
        atoms: atoms
            .iter()
            .map(|a| AtomDoc {
                m: Orders::Vector(a.m.clone()),
                alpha: a.alpha.clone(),
                coeff: [a.coeff.re, a.coeff.im],
            })
            .collect(),
    })
}

pub fn mixed_to_json(rho: &MixedState) -> Result<String> {
    let doc = MixedDoc {
        weights: rho.components().iter().map(|(w, _)| *w).collect(),
        pure_states: rho.components().iter().map(|(_, s)| pure_doc(s)).collect::<Result<_>>()?,
    };
    serde_json::to_string_pretty(&doc).map_err(|e| Error::Parse(e.to_string()))
}

pub fn pure_to_json(psi: &PureState) -> Result<String> {
    serde_json::to_string_pretty(&pure_doc(psi)?).map_err(|e| Error::Parse(e.to_string()))
}

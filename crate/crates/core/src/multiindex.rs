//! Multi-indices over configuration space (length `n`) or phase space
//! (length `2n`, position block first, momentum block second).

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Largest total order a multi-index may carry.
pub const MAX_ORDER: u32 = 64;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(entries: Vec<u32>) -> Result<Self> {
        let order: u64 = entries.iter().map(|&e| e as u64).sum();
        if order > MAX_ORDER as u64 {
            return Err(Error::InvalidIndex(format!(
                "total order {order} exceeds {MAX_ORDER}"
            )));
        }
        Ok(Self(entries))
    }

    pub fn zeros(len: usize) -> Self {
        Self(vec![0; len])
    }

    /// Single nonzero entry `value` at `axis`.
    pub fn unit(len: usize, axis: usize, value: u32) -> Result<Self> {
        let mut e = vec![0; len];
        e[axis] = value;
        Self::new(e)
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// |a|, the sum of all entries.
    pub fn order(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    /// Componentwise `self <= other`.
    pub fn le(&self, other: &MultiIndex) -> bool {
        self.0.len() == other.0.len() && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// Product of componentwise binomial coefficients `binom(a_i, b_i)`.
    pub fn binom(&self, b: &MultiIndex) -> Result<u128> {
        if !b.le(self) {
            return Err(Error::IndexNotBelow {
                a: self.0.clone(),
                b: b.0.clone(),
            });
        }
        let mut acc: u128 = 1;
        for (&n, &k) in self.0.iter().zip(&b.0) {
            acc = acc
                .checked_mul(binomial(n, k))
                .ok_or_else(|| Error::InvalidIndex("binomial coefficient overflow".into()))?;
        }
        Ok(acc)
    }

    /// Swap the position and momentum halves: `(a_x, a_p) -> (a_p, a_x)`.
    pub fn hat(&self) -> Result<MultiIndex> {
        if self.0.len() % 2 != 0 {
            return Err(Error::InvalidIndex(format!(
                "hat needs an even-length index, got length {}",
                self.0.len()
            )));
        }
        let n = self.0.len() / 2;
        let mut e = Vec::with_capacity(self.0.len());
        e.extend_from_slice(&self.0[n..]);
        e.extend_from_slice(&self.0[..n]);
        Ok(Self(e))
    }

    /// `prod_i point_i^{a_i}` with `0^0 = 1`.
    pub fn monomial(&self, point: &[f64]) -> f64 {
        debug_assert_eq!(point.len(), self.0.len());
        self.0
            .iter()
            .zip(point)
            .map(|(&e, &x)| if e == 0 { 1.0 } else { x.powi(e as i32) })
            .product()
    }

    pub fn checked_add(&self, other: &MultiIndex) -> Result<MultiIndex> {
        self.same_len(other)?;
        Self::new(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn checked_sub(&self, other: &MultiIndex) -> Result<MultiIndex> {
        if !other.le(self) {
            return Err(Error::IndexNotBelow {
                a: self.0.clone(),
                b: other.0.clone(),
            });
        }
        Ok(Self(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect()))
    }

    pub fn scaled(&self, factor: u32) -> Result<MultiIndex> {
        Self::new(self.0.iter().map(|a| a * factor).collect())
    }

    /// Adds the same scalar to every component.
    pub fn plus_scalar(&self, s: u32) -> Result<MultiIndex> {
        Self::new(self.0.iter().map(|a| a + s).collect())
    }

    /// Every index `b` with `b <= self`, in lexicographic order.
    pub fn box_below(&self) -> BoxIter {
        BoxIter {
            upper: self.0.clone(),
            current: Some(vec![0; self.0.len()]),
        }
    }

    /// All indices of length `len` with total order at most `max_order`.
    pub fn all_up_to(len: usize, max_order: u32) -> Vec<MultiIndex> {
        let upper = MultiIndex(vec![max_order; len]);
        upper
            .box_below()
            .filter(|b| b.order() <= max_order)
            .collect()
    }

    fn same_len(&self, other: &MultiIndex) -> Result<()> {
        if self.0.len() != other.0.len() {
            return Err(Error::DimensionMismatch(format!(
                "multi-index lengths {} and {}",
                self.0.len(),
                other.0.len()
            )));
        }
        Ok(())
    }
}

fn binomial(n: u32, k: u32) -> u128 {
    let k = k.min(n - k) as u128;
    let n = n as u128;
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Iterator over a downward-closed box of multi-indices.
pub struct BoxIter {
    upper: Vec<u32>,
    current: Option<Vec<u32>>,
}

impl Iterator for BoxIter {
    type Item = MultiIndex;

    fn next(&mut self) -> Option<MultiIndex> {
        let cur = self.current.take()?;
        let out = MultiIndex(cur.clone());
        let mut next = cur;
        let mut axis = next.len();
        loop {
            if axis == 0 {
                self.current = None;
                break;
            }
            axis -= 1;
            if next[axis] < self.upper[axis] {
                next[axis] += 1;
                self.current = Some(next);
                break;
            }
            next[axis] = 0;
        }
        Some(out)
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|e| e.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

impl FromStr for MultiIndex {
    type Err = Error;

    /// Parses a comma-separated list such as `1,2`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Err(Error::InvalidIndex("empty multi-index".into()));
        }
        let entries = s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<u32>()
                    .map_err(|_| Error::InvalidIndex(format!("'{t}' is not a nonnegative integer")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(entries)
    }
}

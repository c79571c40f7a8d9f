//! Binary chromosomes over candidate views.
//!
//! Bit `i` (0-based) is set iff candidate view `i` is materialized. The textual
//! form is a plain bitstring whose first character is bit 0, so `"1000110110"`
//! materializes views `{0, 4, 5, 7, 8}`.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{invalid_param, Error, Result};

/// A fixed-length materialization vector.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Chromosome {
    bits: Vec<bool>,
}

impl Chromosome {
    pub fn zeros(len: usize) -> Self {
        Self {
            bits: vec![false; len],
        }
    }

    pub fn ones(len: usize) -> Self {
        Self {
            bits: vec![true; len],
        }
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        Self { bits }
    }

    /// Builds a chromosome of length `len` with exactly the given views set.
    pub fn from_view_ids<I: IntoIterator<Item = usize>>(len: usize, ids: I) -> Result<Self> {
        let mut c = Self::zeros(len);
        for id in ids {
            if id >= len {
                return Err(invalid_param(format!(
                    "view id {id} out of range for {len} candidate views"
                )));
            }
            c.bits[id] = true;
        }
        Ok(c)
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn get(&self, i: usize) -> bool {
        self.bits[i]
    }

    pub fn set(&mut self, i: usize, value: bool) {
        self.bits[i] = value;
    }

    pub fn flip(&mut self, i: usize) {
        self.bits[i] = !self.bits[i];
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// Indices of materialized views, ascending.
    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits
            .iter()
            .enumerate()
            .filter_map(|(i, &b)| b.then_some(i))
    }

    /// The set of materialized view ids, ascending.
    pub fn decode(&self) -> Vec<usize> {
        self.iter_ones().collect()
    }

    pub fn complement(&self) -> Self {
        Self {
            bits: self.bits.iter().map(|b| !b).collect(),
        }
    }

    pub fn to_bitstring(&self) -> String {
        self.bits
            .iter()
            .map(|&b| if b { '1' } else { '0' })
            .collect()
    }
}

impl fmt::Display for Chromosome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_bitstring())
    }
}

impl FromStr for Chromosome {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bits = s
            .trim()
            .chars()
            .enumerate()
            .map(|(i, ch)| match ch {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Parse(format!(
                    "bitstring character {i} is {other:?}, expected '0' or '1'"
                ))),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { bits })
    }
}

impl Serialize for Chromosome {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_bitstring())
    }
}

impl<'de> Deserialize<'de> for Chromosome {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Fraction of positions at which `a` and `b` agree.
pub fn hamming_similarity(a: &Chromosome, b: &Chromosome) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            expected: a.len(),
            actual: b.len(),
        });
    }
    if a.is_empty() {
        return Ok(1.0);
    }
    let agree = a.bits.iter().zip(&b.bits).filter(|(x, y)| x == y).count();
    Ok(agree as f64 / a.len() as f64)
}

/// A chromosome with exactly `num_set` bits set at uniformly chosen positions.
pub fn random_chromosome<R: Rng + ?Sized>(
    length: usize,
    num_set: usize,
    rng: &mut R,
) -> Result<Chromosome> {
    if num_set > length {
        return Err(invalid_param(format!(
            "cannot set {num_set} bits in a chromosome of length {length}"
        )));
    }
    let mut c = Chromosome::zeros(length);
    for i in rand::seq::index::sample(rng, length, num_set) {
        c.bits[i] = true;
    }
    Ok(c)
}

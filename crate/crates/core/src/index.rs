//! Trinary multi-indices and binary transposition masks.
//!
//! Both are rendered as digit strings with pair 0 first (`"02"` is
//! `α = (0, 2)`), and both rank in base 3 / base 2 with pair 0 as the most
//! significant digit.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// `α ∈ {0,1,2}^K`, one projector label per Alice–Bob pair.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex(Vec<u8>);

impl MultiIndex {
    pub fn new(digits: Vec<u8>) -> Result<Self> {
        if digits.is_empty() {
            return Err(Error::index("multi-index needs at least one digit"));
        }
        if let Some(bad) = digits.iter().find(|&&x| x > 2) {
            return Err(Error::index(format!("trinary digit {bad} out of range")));
        }
        Ok(MultiIndex(digits))
    }

    /// Inverse of [`MultiIndex::rank`].
    pub fn from_rank(rank: usize, k: usize) -> Result<Self> {
        if k == 0 || rank >= 3usize.pow(k as u32) {
            return Err(Error::index(format!(
                "rank {rank} out of range for K = {k}"
            )));
        }
        let mut digits = vec![0u8; k];
        let mut rest = rank;
        for slot in digits.iter_mut().rev() {
            *slot = (rest % 3) as u8;
            rest /= 3;
        }
        Ok(MultiIndex(digits))
    }

    pub fn rank(&self) -> usize {
        self.0.iter().fold(0, |acc, &x| acc * 3 + x as usize)
    }

    pub fn digits(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// All `3^k` indices in rank order.
    pub fn all(k: usize) -> impl Iterator<Item = MultiIndex> {
        (0..3usize.pow(k as u32)).map(move |r| MultiIndex::from_rank(r, k).unwrap())
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for d in &self.0 {
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

/// Accepts `"02"` or `"0,2"`.
impl FromStr for MultiIndex {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        MultiIndex::new(parse_digits(s)?)
    }
}

fn parse_digits(s: &str) -> Result<Vec<u8>> {
    let s = s.trim();
    let parts: Vec<&str> = if s.contains(',') {
        s.split(',').map(str::trim).collect()
    } else {
        s.split("").filter(|p| !p.is_empty()).collect()
    };
    parts
        .iter()
        .map(|p| {
            p.parse::<u8>()
                .map_err(|_| Error::index(format!("bad digit {p:?} in {s:?}")))
        })
        .collect()
}

/// `a ∈ {0,1}^K`: bit `i` set means Bob `i` (subsystem `K + i`) is transposed.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TranspositionMask(Vec<bool>);

impl TranspositionMask {
    pub fn new(bits: Vec<bool>) -> Result<Self> {
        if bits.is_empty() {
            return Err(Error::index("mask needs at least one bit"));
        }
        Ok(TranspositionMask(bits))
    }

    pub fn from_rank(rank: usize, k: usize) -> Result<Self> {
        if k == 0 || k >= usize::BITS as usize || rank >> k != 0 {
            return Err(Error::index(format!(
                "mask rank {rank} out of range for K = {k}"
            )));
        }
        Ok(TranspositionMask(
            (0..k).map(|i| (rank >> (k - 1 - i)) & 1 == 1).collect(),
        ))
    }

    pub fn rank(&self) -> usize {
        self.0.iter().fold(0, |acc, &b| acc * 2 + b as usize)
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().all(|b| !b)
    }

    pub fn full(k: usize) -> Self {
        TranspositionMask(vec![true; k])
    }

    /// The `2^k − 1` nonzero masks in binary-rank order: `01, 10, 11` for `k = 2`.
    pub fn nonzero(k: usize) -> impl Iterator<Item = TranspositionMask> {
        (1..1usize << k).map(move |r| TranspositionMask::from_rank(r, k).unwrap())
    }

    /// Bob positions `K + i` for every set bit.
    pub fn bob_subsystems(&self) -> Vec<usize> {
        let k = self.0.len();
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(i, _)| k + i)
            .collect()
    }
}

impl fmt::Display for TranspositionMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            write!(f, "{}", b as u8)?;
        }
        Ok(())
    }
}

impl FromStr for TranspositionMask {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let digits = parse_digits(s)?;
        if let Some(bad) = digits.iter().find(|&&x| x > 1) {
            return Err(Error::index(format!("mask bit {bad} is not 0 or 1")));
        }
        TranspositionMask::new(digits.into_iter().map(|x| x == 1).collect())
    }
}

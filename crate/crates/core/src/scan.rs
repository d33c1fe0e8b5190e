//! Deterministic lattice scans of the simplex.
//!
//! Points are the compositions of `n` into `3^K` nonnegative parts, divided
//! by `n`, enumerated in lexicographic order of the part counts. Each point
//! is classified by the product-state bounds and every PPT mask.

use std::fmt;
use std::io::Write;

use crate::error::{Error, Result};
use crate::index::{MultiIndex, TranspositionMask};
use crate::simplex::{ppt_all, sep_bound_check, FidelityVector};

/// Refuse scans larger than this many points.
pub const MAX_POINTS: u128 = 10_000_000;

/// Target size used to pick a grid resolution when none is given.
pub const DEFAULT_POINTS: u128 = 100_000;

/// `C(n + parts − 1, parts − 1)`, saturating.
pub fn lattice_size(n: usize, parts: usize) -> u128 {
    let r = parts.saturating_sub(1) as u128;
    let mut acc: u128 = 1;
    for i in 1..=r.min(n as u128) {
        // C(n + r, i) built incrementally; exact at every step.
        acc = match acc.checked_mul(n as u128 + r - i + 1) {
            Some(x) => x / i,
            None => return u128::MAX,
        };
    }
    acc
}

/// Largest resolution whose lattice has at most [`DEFAULT_POINTS`] points (at least 1).
pub fn default_resolution(k: usize) -> usize {
    let parts = 3usize.checked_pow(k as u32).unwrap_or(usize::MAX);
    let mut n = 1;
    while lattice_size(n + 1, parts) <= DEFAULT_POINTS {
        n += 1;
    }
    n
}

/// Compositions of `n` into `parts` parts, lexicographic.
#[derive(Clone, Debug)]
pub struct Compositions {
    counts: Vec<usize>,
    n: usize,
    done: bool,
}

impl Compositions {
    pub fn new(n: usize, parts: usize) -> Self {
        assert!(parts >= 1, "need at least one part");
        let mut counts = vec![0; parts];
        counts[parts - 1] = n;
        Compositions {
            counts,
            n,
            done: false,
        }
    }
}

impl Iterator for Compositions {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let current = self.counts.clone();
        let m = self.counts.len();
        // Rightmost slot with mass somewhere to its right.
        let mut tail = 0;
        let mut pivot = None;
        for i in (0..m.saturating_sub(1)).rev() {
            tail += self.counts[i + 1];
            if tail > 0 {
                pivot = Some(i);
                break;
            }
        }
        match pivot {
            Some(i) => {
                self.counts[i] += 1;
                let head: usize = self.counts[..=i].iter().sum();
                for c in &mut self.counts[i + 1..] {
                    *c = 0;
                }
                self.counts[m - 1] = self.n - head;
            }
            None => self.done = true,
        }
        Some(current)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Region {
    /// Some partial transpose is not positive.
    Npt,
    /// PPT for every mask but outside the product-state bounds.
    PptAll,
    /// PPT for every mask and inside the product-state bounds.
    BoundPass,
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Region::Npt => "NPT",
            Region::PptAll => "PPT-all",
            Region::BoundPass => "bound-pass",
        })
    }
}

#[derive(Clone, Debug)]
pub struct ScanPoint {
    pub rank: usize,
    pub point: FidelityVector,
    pub sep_pass: bool,
    /// One verdict per nonzero mask, binary-rank order.
    pub ppt: Vec<bool>,
    pub region: Region,
}

pub fn classify(rank: usize, point: FidelityVector, tol: f64) -> Result<ScanPoint> {
    let sep_pass = sep_bound_check(&point, tol)?.passes;
    let ppt: Vec<bool> = ppt_all(&point, tol)?
        .into_iter()
        .map(|v| v.is_ppt)
        .collect();
    let region = if !ppt.iter().all(|&x| x) {
        Region::Npt
    } else if sep_pass {
        Region::BoundPass
    } else {
        Region::PptAll
    };
    Ok(ScanPoint {
        rank,
        point,
        sep_pass,
        ppt,
        region,
    })
}

/// Classifies every lattice point of resolution `n`.
pub fn scan(d: usize, k: usize, n: usize, tol: f64) -> Result<Vec<ScanPoint>> {
    if n == 0 {
        return Err(Error::domain("grid resolution must be positive"));
    }
    let parts = 3usize
        .checked_pow(k as u32)
        .ok_or_else(|| Error::index(format!("K = {k} is too large")))?;
    let size = lattice_size(n, parts);
    if size > MAX_POINTS {
        return Err(Error::Capacity {
            dim: usize::try_from(size).unwrap_or(usize::MAX),
            max: MAX_POINTS as usize,
        });
    }
    let scale = n as f64;
    Compositions::new(n, parts)
        .enumerate()
        .map(|(rank, counts)| {
            let pi = counts.iter().map(|&c| c as f64 / scale).collect();
            classify(rank, FidelityVector::new(d, k, pi)?, tol)
        })
        .collect()
}

/// Header: `point, pi_<α>…, sep_bound, ppt_<mask>…, class`.
pub fn write_csv<W: Write>(points: &[ScanPoint], k: usize, out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["point".to_string()];
    header.extend(MultiIndex::all(k).map(|a| format!("pi_{a}")));
    header.push("sep_bound".into());
    header.extend(TranspositionMask::nonzero(k).map(|m| format!("ppt_{m}")));
    header.push("class".into());
    w.write_record(&header)?;
    for p in points {
        let mut row = vec![p.rank.to_string()];
        row.extend(p.point.pi().iter().map(|&x| format_f64(x)));
        row.push(p.sep_pass.to_string());
        row.extend(p.ppt.iter().map(bool::to_string));
        row.push(p.region.to_string());
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// 17 significant digits, enough to round-trip any `f64`.
pub fn format_f64(x: f64) -> String {
    format!("{x:.16e}")
}

//! The `O ⊗ O`-invariant projector families.
//!
//! On one Alice–Bob pair, with the flip `F` and the maximally entangled
//! projector `P⁺`:
//!
//! ```text
//! Q⁰ = (I + F)/2    Q¹ = (I − F)/2    P¹ = P⁺    P⁰ = I − P⁺
//! Π⁰ = Q⁰ − P¹      Π¹ = Q¹           Π² = P¹
//! ```
//!
//! For `K` pairs, `Π^α = Π^{α_1}_{0|K} ⊗ … ⊗ Π^{α_K}_{K−1|2K−1}`, where the
//! subscript names the two subsystems the factor acts on. It is built in
//! pair order (A₀B₀A₁B₁…) and relabeled into the A₀…A_{K−1}B₀…B_{K−1} layout.

use num_complex::Complex64;

use crate::dense::{self, kron, partial_transpose, ComplexOperator, SubsystemSet};
use crate::error::{Error, Result};
use crate::index::MultiIndex;
use crate::tol;

pub(crate) fn check_local_dim(d: usize) -> Result<()> {
    if d < 2 {
        return Err(Error::domain(format!(
            "local dimension must be at least 2, got {d}"
        )));
    }
    Ok(())
}

/// `d^{2K}`, or a capacity error past [`tol::MAX_DIM`].
pub fn total_dim(d: usize, k: usize) -> Result<usize> {
    let dim = (0..2 * k).try_fold(1usize, |acc, _| acc.checked_mul(d));
    match dim {
        Some(dim) if dim <= tol::MAX_DIM => Ok(dim),
        Some(dim) => Err(Error::Capacity {
            dim,
            max: tol::MAX_DIM,
        }),
        None => Err(Error::Capacity {
            dim: usize::MAX,
            max: tol::MAX_DIM,
        }),
    }
}

/// `F = Σ_ij |ij⟩⟨ji|`.
pub fn flip(d: usize) -> Result<ComplexOperator> {
    check_local_dim(d)?;
    let mut f = ComplexOperator::zeros(vec![d, d])?;
    for i in 0..d {
        for j in 0..d {
            f.set(i * d + j, j * d + i, Complex64::new(1.0, 0.0));
        }
    }
    Ok(f)
}

/// `Tr Π^α` on one pair: `d(d+1)/2 − 1`, `d(d−1)/2`, `1`.
pub fn bipartite_trace(d: usize, alpha: u8) -> u64 {
    let d = d as u64;
    match alpha {
        0 => d * (d + 1) / 2 - 1,
        1 => d * (d - 1) / 2,
        2 => 1,
        _ => panic!("trinary digit {alpha} out of range"),
    }
}

/// `Tr Π^α = Π_i Tr Π^{α_i}`, exact.
pub fn multipartite_trace(d: usize, alpha: &MultiIndex) -> u64 {
    alpha
        .digits()
        .iter()
        .map(|&a| bipartite_trace(d, a))
        .product()
}

/// Projectors on one Alice–Bob pair `C^d ⊗ C^d`.
#[derive(Clone, Debug)]
pub struct BipartiteBasis {
    pub d: usize,
    pub flip: ComplexOperator,
    pub pplus: ComplexOperator,
    pub q0: ComplexOperator,
    pub q1: ComplexOperator,
    pub p0: ComplexOperator,
    pub p1: ComplexOperator,
    /// `[Π⁰, Π¹, Π²]`.
    pub pi: [ComplexOperator; 3],
}

impl BipartiteBasis {
    pub fn new(d: usize) -> Result<Self> {
        let flip = flip(d)?;
        let id = ComplexOperator::identity(vec![d, d])?;
        let pplus = partial_transpose(&flip, &SubsystemSet::new([1])?)?.scaled(1.0 / d as f64);
        let q0 = (&id + &flip).scaled(0.5);
        let q1 = (&id - &flip).scaled(0.5);
        let p1 = pplus.clone();
        let p0 = &id - &p1;
        let pi = [&q0 - &p1, q1.clone(), p1.clone()];
        Ok(BipartiteBasis {
            d,
            flip,
            pplus,
            q0,
            q1,
            p0,
            p1,
            pi,
        })
    }

    pub fn trace(&self, alpha: u8) -> u64 {
        bipartite_trace(self.d, alpha)
    }

    /// `Π̃^α = Π^α / Tr Π^α`.
    pub fn normalized(&self, alpha: u8) -> ComplexOperator {
        self.pi[alpha as usize].scaled(1.0 / self.trace(alpha) as f64)
    }
}

/// Destination of each pair-ordered leg: A_i (leg `2i`) goes to `i`,
/// B_i (leg `2i + 1`) goes to `K + i`.
pub fn pair_permutation(k: usize) -> Vec<usize> {
    assert!(k >= 1, "need at least one pair");
    (0..2 * k)
        .map(|leg| if leg % 2 == 0 { leg / 2 } else { k + leg / 2 })
        .collect()
}

/// Inverse of [`pair_permutation`]: position `p` of the A…AB…B layout to its pair-ordered leg.
pub fn unpair_permutation(k: usize) -> Vec<usize> {
    let forward = pair_permutation(k);
    let mut inverse = vec![0; 2 * k];
    for (leg, &pos) in forward.iter().enumerate() {
        inverse[pos] = leg;
    }
    inverse
}

/// Dense `Π^α` on `[d; 2K]` in A…AB…B layout.
pub fn build_multipartite(d: usize, alpha: &MultiIndex) -> Result<ComplexOperator> {
    check_local_dim(d)?;
    let k = alpha.len();
    total_dim(d, k)?;
    let basis = BipartiteBasis::new(d)?;
    build_from_basis(&basis, alpha)
}

fn build_from_basis(basis: &BipartiteBasis, alpha: &MultiIndex) -> Result<ComplexOperator> {
    let k = alpha.len();
    let mut digits = alpha.digits().iter();
    let first = *digits.next().expect("multi-index is nonempty");
    let paired = digits.try_fold(basis.pi[first as usize].clone(), |acc, &a| {
        kron(&acc, &basis.pi[a as usize])
    })?;
    dense::permute_subsystems(&paired, &pair_permutation(k))
}

/// All `3^K` projectors `Π^α` for one `(d, K)`, in rank order, with exact traces.
#[derive(Clone, Debug)]
pub struct ProjectorFamily {
    d: usize,
    k: usize,
    projectors: Vec<ComplexOperator>,
    traces: Vec<u64>,
}

impl ProjectorFamily {
    pub fn new(d: usize, k: usize) -> Result<Self> {
        check_local_dim(d)?;
        if k == 0 {
            return Err(Error::domain("need at least one pair"));
        }
        total_dim(d, k)?;
        let basis = BipartiteBasis::new(d)?;
        let mut projectors = Vec::with_capacity(3usize.pow(k as u32));
        let mut traces = Vec::with_capacity(projectors.capacity());
        for alpha in MultiIndex::all(k) {
            projectors.push(build_from_basis(&basis, &alpha)?);
            traces.push(multipartite_trace(d, &alpha));
        }
        Ok(ProjectorFamily {
            d,
            k,
            projectors,
            traces,
        })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.projectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.projectors.is_empty()
    }

    pub fn projector(&self, rank: usize) -> &ComplexOperator {
        &self.projectors[rank]
    }

    pub fn trace(&self, rank: usize) -> u64 {
        self.traces[rank]
    }

    pub fn normalized(&self, rank: usize) -> ComplexOperator {
        self.projectors[rank].scaled(1.0 / self.traces[rank] as f64)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&ComplexOperator, u64)> {
        self.projectors.iter().zip(self.traces.iter().copied())
    }
}

//! Fidelity coordinates on the simplex of invariant states.
//!
//! An invariant state is `ρ = Σ_α π_α Π̃^α` with `π_α = Tr(ρ Π^α)`. Partial
//! transposition of Bob factors acts on the coordinates as the row-vector
//! map `π' = π (C^{a_1} ⊗ … ⊗ C^{a_K})`, with `C⁰ = I` and `C¹ = C` the 3×3
//! matrix from [`c_matrix`]. Because the `Π̃^α` are mutually orthogonal
//! and positive, `τ_a ρ ≥ 0` holds exactly when every `π'_α ≥ 0`.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};

use crate::dense::{self, inner, vector_norm, ComplexOperator};
use crate::error::{Error, Result};
use crate::index::{MultiIndex, TranspositionMask};
use crate::projectors::{
    self, bipartite_trace, check_local_dim, multipartite_trace, pair_permutation, total_dim,
    unpair_permutation, BipartiteBasis,
};
use crate::tol;

/// `3^K` coordinates in base-3 rank order (pair 0 most significant).
///
/// Vectors with all `π_α ≥ −tol::DEFAULT` and `Σ π_α = 1` (within
/// `tol::SUM`) are *state-valued*. Outputs of [`pt_map`] may be negative;
/// they keep the flag cleared instead of raising.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FidelityRepr", into = "FidelityRepr")]
pub struct FidelityVector {
    d: usize,
    k: usize,
    pi: Vec<f64>,
    state_valued: bool,
}

#[derive(Serialize, Deserialize)]
struct FidelityRepr {
    d: usize,
    #[serde(rename = "K")]
    k: usize,
    pi: Vec<f64>,
}

impl TryFrom<FidelityRepr> for FidelityVector {
    type Error = Error;

    fn try_from(repr: FidelityRepr) -> Result<Self> {
        FidelityVector::new(repr.d, repr.k, repr.pi)
    }
}

impl From<FidelityVector> for FidelityRepr {
    fn from(f: FidelityVector) -> Self {
        FidelityRepr {
            d: f.d,
            k: f.k,
            pi: f.pi,
        }
    }
}

fn num_coords(k: usize) -> Result<usize> {
    if k == 0 {
        return Err(Error::domain("need at least one pair"));
    }
    u32::try_from(k)
        .ok()
        .and_then(|k| 3usize.checked_pow(k))
        .ok_or_else(|| Error::index(format!("K = {k} is too large")))
}

impl FidelityVector {
    pub fn new(d: usize, k: usize, pi: Vec<f64>) -> Result<Self> {
        check_local_dim(d)?;
        let n = num_coords(k)?;
        if pi.len() != n {
            return Err(Error::index(format!(
                "K = {k} needs {n} coordinates, got {}",
                pi.len()
            )));
        }
        if pi.iter().any(|x| !x.is_finite()) {
            return Err(Error::domain("coordinates must be finite"));
        }
        let state_valued = pi.iter().all(|&x| x >= -tol::DEFAULT)
            && (pi.iter().sum::<f64>() - 1.0).abs() <= tol::SUM;
        Ok(FidelityVector {
            d,
            k,
            pi,
            state_valued,
        })
    }

    /// `e_α`: the vertex `Π̃^α`.
    pub fn vertex(d: usize, alpha: &MultiIndex) -> Result<Self> {
        let mut pi = vec![0.0; num_coords(alpha.len())?];
        pi[alpha.rank()] = 1.0;
        Self::new(d, alpha.len(), pi)
    }

    /// Equal weight on every vertex.
    pub fn uniform(d: usize, k: usize) -> Result<Self> {
        let n = num_coords(k)?;
        Self::new(d, k, vec![1.0 / n as f64; n])
    }

    /// Coordinates of `I / d^{2K}`: `π_α = Tr Π^α / d^{2K}`.
    pub fn maximally_mixed(d: usize, k: usize) -> Result<Self> {
        check_local_dim(d)?;
        let total = (d * d) as f64;
        let pi = MultiIndex::all(k)
            .map(|a| {
                a.digits()
                    .iter()
                    .map(|&x| bipartite_trace(d, x) as f64 / total)
                    .product()
            })
            .collect();
        Self::new(d, k, pi)
    }

    /// Uniform sample from the simplex (flat Dirichlet), deterministic in `seed`.
    pub fn random(d: usize, k: usize, seed: u64) -> Result<Self> {
        let n = num_coords(k)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let raw: Vec<f64> = (0..n).map(|_| Exp1.sample(&mut rng)).collect();
        let total: f64 = raw.iter().sum();
        Self::new(d, k, raw.into_iter().map(|x| x / total).collect())
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn pi(&self) -> &[f64] {
        &self.pi
    }

    pub fn get(&self, alpha: &MultiIndex) -> f64 {
        self.pi[alpha.rank()]
    }

    pub fn sum(&self) -> f64 {
        self.pi.iter().sum()
    }

    pub fn is_state(&self) -> bool {
        self.state_valued
    }

    pub fn max_abs_diff(&self, other: &FidelityVector) -> f64 {
        self.pi
            .iter()
            .zip(&other.pi)
            .map(|(a, b)| (a - b).abs())
            .fold(
                if self.pi.len() == other.pi.len() {
                    0.0
                } else {
                    f64::INFINITY
                },
                f64::max,
            )
    }

    fn require_state(&self) -> Result<()> {
        if !self.state_valued {
            return Err(Error::domain(format!(
                "fidelity vector is not a state (min {:e}, sum {})",
                self.pi.iter().copied().fold(f64::INFINITY, f64::min),
                self.sum()
            )));
        }
        Ok(())
    }
}

/// Partial transposition in fidelity coordinates on one pair:
/// `π'_α = Σ_β π_β C[β][α]`.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    pub d: usize,
    pub entries: [[f64; 3]; 3],
}

/// `C = (1/2d) · [[d−2, d, 2], [d+2, d, −2], [(d−1)(d+2), −d(d−1), 2]]`.
pub fn c_matrix(d: usize) -> Result<CMatrix> {
    check_local_dim(d)?;
    let x = d as f64;
    let s = 1.0 / (2.0 * x);
    Ok(CMatrix {
        d,
        entries: [
            [(x - 2.0) * s, x * s, 2.0 * s],
            [(x + 2.0) * s, x * s, -2.0 * s],
            [(x - 1.0) * (x + 2.0) * s, -x * (x - 1.0) * s, 2.0 * s],
        ],
    })
}

impl CMatrix {
    pub fn row_sums(&self) -> [f64; 3] {
        self.entries.map(|row| row.iter().sum())
    }

    /// Matrix product `self · other`.
    pub fn compose(&self, other: &CMatrix) -> [[f64; 3]; 3] {
        let mut out = [[0.0; 3]; 3];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, slot) in row.iter_mut().enumerate() {
                *slot = (0..3)
                    .map(|m| self.entries[i][m] * other.entries[m][j])
                    .sum();
            }
        }
        out
    }
}

/// Applies `M` (row-vector convention) to trinary axis `axis` of a `3^k` tensor.
fn apply_on_axis(pi: &mut [f64], k: usize, axis: usize, m: &[[f64; 3]; 3]) {
    let stride = 3usize.pow((k - 1 - axis) as u32);
    let block = 3 * stride;
    for base in (0..pi.len()).step_by(block) {
        for inner in 0..stride {
            let at = |b: usize| base + b * stride + inner;
            let v = [pi[at(0)], pi[at(1)], pi[at(2)]];
            for a in 0..3 {
                pi[at(a)] = (0..3).map(|b| v[b] * m[b][a]).sum();
            }
        }
    }
}

/// Coordinates of `τ_a ρ`. The zero mask is the identity.
pub fn pt_map(f: &FidelityVector, mask: &TranspositionMask) -> Result<FidelityVector> {
    if mask.len() != f.k {
        return Err(Error::index(format!(
            "mask has {} bits, vector has K = {}",
            mask.len(),
            f.k
        )));
    }
    let c = c_matrix(f.d)?;
    let mut pi = f.pi.clone();
    for (axis, _) in mask.bits().iter().enumerate().filter(|(_, &b)| b) {
        apply_on_axis(&mut pi, f.k, axis, &c.entries);
    }
    FidelityVector::new(f.d, f.k, pi)
}

/// Outcome of one PPT test.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PptVerdict {
    pub mask: String,
    pub is_ppt: bool,
    pub min_coordinate: f64,
    /// Multi-indices whose transformed coordinate is below `−tol`.
    pub violations: Vec<(String, f64)>,
    pub transformed: Vec<f64>,
}

/// `τ_a ρ ≥ 0` ⟺ every transformed coordinate is `≥ −tol`.
pub fn ppt_check(f: &FidelityVector, mask: &TranspositionMask, tol: f64) -> Result<PptVerdict> {
    f.require_state()?;
    let image = pt_map(f, mask)?;
    let violations: Vec<(String, f64)> = image
        .pi
        .iter()
        .enumerate()
        .filter(|(_, &x)| x < -tol)
        .map(|(r, &x)| (MultiIndex::from_rank(r, f.k).unwrap().to_string(), x))
        .collect();
    Ok(PptVerdict {
        mask: mask.to_string(),
        is_ppt: violations.is_empty(),
        min_coordinate: image.pi.iter().copied().fold(f64::INFINITY, f64::min),
        violations,
        transformed: image.pi,
    })
}

/// [`ppt_check`] for all `2^K − 1` nonzero masks, in binary-rank order.
pub fn ppt_all(f: &FidelityVector, tol: f64) -> Result<Vec<PptVerdict>> {
    TranspositionMask::nonzero(f.k)
        .map(|mask| ppt_check(f, &mask, tol))
        .collect()
}

/// Left-hand sides of the two six-inequality PPT systems for `K = 2`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PptInequalities {
    /// Mask `01`: for `x = 0, 1, 2`,
    /// `π_{x0} + π_{x1} − (d−1)π_{x2}` then `π_{x0} − π_{x1} + π_{x2}`.
    pub sys01: [f64; 6],
    /// Mask `10`: the same with the digits swapped.
    pub sys10: [f64; 6],
}

impl PptInequalities {
    pub fn sys01_holds(&self, tol: f64) -> bool {
        self.sys01.iter().all(|&r| r >= -tol)
    }

    pub fn sys10_holds(&self, tol: f64) -> bool {
        self.sys10.iter().all(|&r| r >= -tol)
    }
}

pub fn ppt_inequalities_01_10(f: &FidelityVector) -> Result<PptInequalities> {
    if f.k != 2 {
        return Err(Error::domain(format!(
            "inequality systems need K = 2, got {}",
            f.k
        )));
    }
    let dm1 = f.d as f64 - 1.0;
    let p = |a: usize, b: usize| f.pi[3 * a + b];
    let mut sys01 = [0.0; 6];
    let mut sys10 = [0.0; 6];
    for x in 0..3 {
        sys01[2 * x] = p(x, 0) + p(x, 1) - dm1 * p(x, 2);
        sys01[2 * x + 1] = p(x, 0) - p(x, 1) + p(x, 2);
        sys10[2 * x] = p(0, x) + p(1, x) - dm1 * p(2, x);
        sys10[2 * x + 1] = p(0, x) - p(1, x) + p(2, x);
    }
    Ok(PptInequalities { sys01, sys10 })
}

/// `(Tr(P_ψ⊗P_φ Π⁰), Tr(… Π¹), Tr(… Π²))` for one pair.
pub fn pair_product_fidelities(psi: &[Complex64], phi: &[Complex64]) -> [f64; 3] {
    let d = psi.len() as f64;
    let alpha = inner(psi, phi).norm_sqr();
    let beta = inner(psi, &dense::conjugate(phi)).norm_sqr();
    [
        (1.0 + alpha) / 2.0 - beta / d,
        (1.0 - alpha) / 2.0,
        beta / d,
    ]
}

/// Kronecker product of per-pair 3-vectors, pair 0 most significant.
fn tensor3(factors: &[[f64; 3]]) -> Vec<f64> {
    factors.iter().fold(vec![1.0], |acc, u| {
        acc.iter()
            .flat_map(|&a| u.iter().map(move |&b| a * b))
            .collect()
    })
}

/// Fidelities of `P_{ψ_1} ⊗ … ⊗ P_{ψ_K} ⊗ P_{φ_1} ⊗ … ⊗ P_{φ_K}`.
pub fn product_state_fidelities(
    psis: &[Vec<Complex64>],
    phis: &[Vec<Complex64>],
) -> Result<FidelityVector> {
    if psis.is_empty() || psis.len() != phis.len() {
        return Err(Error::index(format!(
            "need K ≥ 1 Alice and Bob vectors, got {} and {}",
            psis.len(),
            phis.len()
        )));
    }
    let d = psis[0].len();
    check_local_dim(d)?;
    for v in psis.iter().chain(phis) {
        if v.len() != d {
            return Err(Error::index(format!(
                "vector of length {} in dimension {d}",
                v.len()
            )));
        }
        let norm = vector_norm(v);
        if (norm - 1.0).abs() > tol::NORM {
            return Err(Error::domain(format!("vector norm {norm} is not 1")));
        }
    }
    let factors: Vec<[f64; 3]> = psis
        .iter()
        .zip(phis)
        .map(|(psi, phi)| pair_product_fidelities(psi, phi))
        .collect();
    FidelityVector::new(d, psis.len(), tensor3(&factors))
}

/// `1 / (f_{σ_1} ⋯ f_{σ_K})` with `f_0 = 1`, `f_1 = 2`, `f_2 = d`.
pub fn sep_bound(d: usize, sigma: &MultiIndex) -> f64 {
    let denom: f64 = sigma
        .digits()
        .iter()
        .map(|&s| match s {
            0 => 1.0,
            1 => 2.0,
            _ => d as f64,
        })
        .product();
    1.0 / denom
}

/// Result of the product-state bound test.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SepVerdict {
    pub passes: bool,
    /// True only for `K = 1`, where the bounds characterize separability exactly.
    /// For `K ≥ 2` a pass is a necessary-condition pass.
    pub sufficient: bool,
    pub violated: Vec<String>,
    pub bounds: Vec<f64>,
}

impl SepVerdict {
    pub fn label(&self) -> &'static str {
        match (self.passes, self.sufficient) {
            (true, true) => "separable",
            (true, false) => "necessary-condition pass",
            (false, _) => "entangled",
        }
    }
}

/// Checks `π_σ ≤ sep_bound(d, σ) + tol` for every `σ`.
pub fn sep_bound_check(f: &FidelityVector, tol: f64) -> Result<SepVerdict> {
    f.require_state()?;
    let mut violated = Vec::new();
    let mut bounds = Vec::with_capacity(f.pi.len());
    for (sigma, &x) in MultiIndex::all(f.k).zip(&f.pi) {
        let bound = sep_bound(f.d, &sigma);
        if x > bound + tol {
            violated.push(sigma.to_string());
        }
        bounds.push(bound);
    }
    Ok(SepVerdict {
        passes: violated.is_empty(),
        sufficient: f.k == 1,
        violated,
        bounds,
    })
}

/// Nonzero entries `(row, col, value)` of each bipartite `Π^a`, optionally normalized.
fn sparse_pair_projectors(d: usize, normalized: bool) -> Result<[Vec<(usize, usize, f64)>; 3]> {
    let basis = BipartiteBasis::new(d)?;
    let s = d * d;
    Ok([0u8, 1, 2].map(|a| {
        let scale = if normalized {
            1.0 / basis.trace(a) as f64
        } else {
            1.0
        };
        let p = &basis.pi[a as usize];
        let mut entries = Vec::new();
        for r in 0..s {
            for c in 0..s {
                let v = p.get(r, c).re;
                if v != 0.0 {
                    entries.push((r, c, v * scale));
                }
            }
        }
        entries
    }))
}

/// `Tr(ρ Π^α)` for every `α`, contracting one pair at a time.
fn contract_pairs(
    mat: &[Complex64],
    n: usize,
    s: usize,
    proj: &[Vec<(usize, usize, f64)>; 3],
) -> Vec<f64> {
    if n == 1 {
        return vec![mat[0].re];
    }
    let m = n / s;
    let mut out = Vec::new();
    for entries in proj {
        // M[u,v] = Σ_{x,y} Π[y,x] ρ[(x,u),(y,v)]
        let mut reduced = vec![Complex64::new(0.0, 0.0); m * m];
        for &(y, x, w) in entries {
            for u in 0..m {
                let row = &mat[(x * m + u) * n + y * m..(x * m + u) * n + y * m + m];
                for (slot, val) in reduced[u * m..(u + 1) * m].iter_mut().zip(row) {
                    *slot += val * w;
                }
            }
        }
        out.extend(contract_pairs(&reduced, m, s, proj));
    }
    out
}

/// Projects a density matrix onto the invariant simplex: `π_α = Tr(ρ Π^α) / Tr ρ`.
///
/// `rho` must be Hermitian, PSD within `tol::PSD`, of trace 1 within
/// `tol::TRACE`, and of dimension `d^{2K}` (its shape is reinterpreted as
/// `[d; 2K]`).
pub fn twirl_coords(rho: &ComplexOperator, d: usize, k: usize) -> Result<FidelityVector> {
    check_local_dim(d)?;
    num_coords(k)?;
    let dim = total_dim(d, k)?;
    if rho.dim() != dim {
        return Err(Error::index(format!(
            "state has dimension {}, expected d^(2K) = {dim}",
            rho.dim()
        )));
    }
    let trace = rho.trace();
    if (trace.re - 1.0).abs() > tol::TRACE || trace.im.abs() > tol::TRACE {
        return Err(Error::domain(format!("state trace {trace} is not 1")));
    }
    if !dense::is_psd(rho, tol::PSD)? {
        return Err(Error::domain("state is not positive semidefinite"));
    }
    let rho = rho.clone().reshaped(vec![d; 2 * k])?;
    let paired = dense::permute_subsystems(&rho, &unpair_permutation(k))?;
    let proj = sparse_pair_projectors(d, false)?;
    let pi = contract_pairs(paired.data(), dim, d * d, &proj);
    FidelityVector::new(d, k, pi.into_iter().map(|x| x / trace.re).collect())
}

/// `Σ_α w_α ⊗_i Π̃^{α_i}` in pair order.
fn expand_pairs(weights: &[f64], s: usize, proj: &[Vec<(usize, usize, f64)>; 3]) -> Vec<f64> {
    if weights.len() == 1 {
        return vec![weights[0]];
    }
    let third = weights.len() / 3;
    let mut out: Vec<f64> = Vec::new();
    let mut n = 0;
    for (a, entries) in proj.iter().enumerate() {
        let block = &weights[a * third..(a + 1) * third];
        if block.iter().all(|&w| w == 0.0) {
            continue;
        }
        let sub = expand_pairs(block, s, proj);
        let m = (sub.len() as f64).sqrt().round() as usize;
        if out.is_empty() {
            n = s * m;
            out = vec![0.0; n * n];
        }
        for &(x, y, w) in entries {
            for u in 0..m {
                let dst = (x * m + u) * n + y * m;
                for (slot, val) in out[dst..dst + m].iter_mut().zip(&sub[u * m..(u + 1) * m]) {
                    *slot += w * val;
                }
            }
        }
    }
    if out.is_empty() {
        let m = s.pow((weights.len() as f64).log(3.0).round() as u32);
        out = vec![0.0; m * m];
    }
    out
}

/// `ρ = Σ_α π_α Π^α / Tr Π^α` as a dense operator on `[d; 2K]`.
pub fn reconstruct(f: &FidelityVector) -> Result<ComplexOperator> {
    f.require_state()?;
    reconstruct_unchecked(f)
}

/// [`reconstruct`] without the state check; used for images of [`pt_map`].
pub fn reconstruct_unchecked(f: &FidelityVector) -> Result<ComplexOperator> {
    total_dim(f.d, f.k)?;
    let proj = sparse_pair_projectors(f.d, true)?;
    let data = expand_pairs(&f.pi, f.d * f.d, &proj);
    let paired = ComplexOperator::from_real(vec![f.d; 2 * f.k], &data)?;
    dense::permute_subsystems(&paired, &pair_permutation(f.k))
}

/// Coordinates after tracing out Alice–Bob pair `pair`: sums over that digit.
pub fn reduce(f: &FidelityVector, pair: usize) -> Result<FidelityVector> {
    if f.k < 2 {
        return Err(Error::domain("reduction needs K ≥ 2"));
    }
    if pair >= f.k {
        return Err(Error::index(format!(
            "pair {pair} out of range for K = {}",
            f.k
        )));
    }
    let stride = 3usize.pow((f.k - 1 - pair) as u32);
    let block = 3 * stride;
    let mut pi = Vec::with_capacity(f.pi.len() / 3);
    for base in (0..f.pi.len()).step_by(block) {
        for inner in 0..stride {
            pi.push((0..3).map(|b| f.pi[base + b * stride + inner]).sum());
        }
    }
    FidelityVector::new(f.d, f.k - 1, pi)
}

/// Tracing Alice `alice` and Bob `bob`. Equal indices give a natural
/// reduction; distinct ones are the composition of the two natural
/// reductions, leaving `K − 2` pairs.
pub fn reduce_mixed(f: &FidelityVector, alice: usize, bob: usize) -> Result<FidelityVector> {
    if alice == bob {
        return reduce(f, alice);
    }
    if f.k < 3 {
        return Err(Error::domain("a mixed-pair reduction needs K ≥ 3"));
    }
    let (hi, lo) = (alice.max(bob), alice.min(bob));
    reduce(&reduce(f, hi)?, lo)
}

/// Werner (`Q̃^i`) or isotropic (`P̃^i`) generators of one pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HullFamily {
    Werner,
    Isotropic,
}

/// `Π`-coordinates of `Q̃⁰, Q̃¹, P̃⁰, P̃¹`.
pub fn pair_vertex_coords(d: usize, family: HullFamily, index: u8) -> Result<[f64; 3]> {
    check_local_dim(d)?;
    let x = d as f64;
    let dd1 = x * (x + 1.0);
    Ok(match (family, index) {
        (HullFamily::Werner, 0) => [(x - 1.0) * (x + 2.0) / dd1, 0.0, 2.0 / dd1],
        (HullFamily::Werner, 1) => [0.0, 1.0, 0.0],
        (HullFamily::Isotropic, 0) => {
            let s = 2.0 * (x + 1.0);
            [(x + 2.0) / s, x / s, 0.0]
        }
        (HullFamily::Isotropic, 1) => [0.0, 0.0, 1.0],
        (_, i) => return Err(Error::index(format!("generator index {i} is not 0 or 1"))),
    })
}

/// One of the `4^K` tensor-product hull generators.
#[derive(Clone, Debug, PartialEq)]
pub struct HullVertex {
    /// Per-pair labels, e.g. `["Q0", "P1"]`.
    pub labels: Vec<&'static str>,
    pub coords: FidelityVector,
}

pub fn hull_vertices(d: usize, k: usize) -> Result<Vec<HullVertex>> {
    num_coords(k)?;
    let generators = [
        ("Q0", pair_vertex_coords(d, HullFamily::Werner, 0)?),
        ("Q1", pair_vertex_coords(d, HullFamily::Werner, 1)?),
        ("P0", pair_vertex_coords(d, HullFamily::Isotropic, 0)?),
        ("P1", pair_vertex_coords(d, HullFamily::Isotropic, 1)?),
    ];
    let count = 4usize.pow(k as u32);
    (0..count)
        .map(|r| {
            let picks: Vec<usize> = (0..k).map(|i| (r >> (2 * (k - 1 - i))) & 3).collect();
            let factors: Vec<[f64; 3]> = picks.iter().map(|&g| generators[g].1).collect();
            Ok(HullVertex {
                labels: picks.iter().map(|&g| generators[g].0).collect(),
                coords: FidelityVector::new(d, k, tensor3(&factors))?,
            })
        })
        .collect()
}

/// Common point of the Werner line `(1−q)Q̃⁰ + qQ̃¹` and the isotropic line
/// `(1−p)P̃⁰ + pP̃¹`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IntersectionPoint {
    pub q: f64,
    pub p: f64,
    /// `Π`-coordinates from the Werner parametrization.
    pub coords: [f64; 3],
    /// The same point from the isotropic parametrization.
    pub coords_isotropic: [f64; 3],
}

fn on_line(start: [f64; 3], end: [f64; 3], t: f64) -> [f64; 3] {
    [0, 1, 2].map(|i| (1.0 - t) * start[i] + t * end[i])
}

/// Solves the two lines in the `(π₁, π₂)` plane. The solution is the
/// maximally mixed state: `q = (d−1)/(2d)`, `p = 1/d²`.
pub fn intersection_point(d: usize) -> Result<IntersectionPoint> {
    let w0 = pair_vertex_coords(d, HullFamily::Werner, 0)?;
    let w1 = pair_vertex_coords(d, HullFamily::Werner, 1)?;
    let i0 = pair_vertex_coords(d, HullFamily::Isotropic, 0)?;
    let i1 = pair_vertex_coords(d, HullFamily::Isotropic, 1)?;
    // q (w1 − w0) + p (i0 − i1) = i0 − w0, components 1 and 2.
    let (a11, a12, b1) = (w1[1] - w0[1], i0[1] - i1[1], i0[1] - w0[1]);
    let (a21, a22, b2) = (w1[2] - w0[2], i0[2] - i1[2], i0[2] - w0[2]);
    let det = a11 * a22 - a12 * a21;
    let q = (b1 * a22 - a12 * b2) / det;
    let p = (a11 * b2 - b1 * a21) / det;
    Ok(IntersectionPoint {
        q,
        p,
        coords: on_line(w0, w1, q),
        coords_isotropic: on_line(i0, i1, p),
    })
}

/// The closed-form values `q = 1/2 − 1/(d(d+1))` and
/// `p = (2/(d(d+1)))(1/2 + 1/(d(d+1)))` often given for the
/// crossing of the two lines. They do not satisfy both line equations;
/// [`intersection_point`] gives the actual crossing.
pub fn intersection_closed_form(d: usize) -> (f64, f64) {
    let dd1 = (d * (d + 1)) as f64;
    (0.5 - 1.0 / dd1, 2.0 / dd1 * (0.5 + 1.0 / dd1))
}

/// `Tr Π^α` as the exact integer used for normalization.
pub fn projector_trace(d: usize, alpha: &MultiIndex) -> u64 {
    multipartite_trace(d, alpha)
}

/// Dense `Π̃^α`, built through [`projectors::build_multipartite`].
pub fn normalized_projector(d: usize, alpha: &MultiIndex) -> Result<ComplexOperator> {
    let p = projectors::build_multipartite(d, alpha)?;
    Ok(p.scaled(1.0 / multipartite_trace(d, alpha) as f64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::{
        kron, partial_trace, partial_transpose, random_unit_vector, Field, SubsystemSet,
    };
    use crate::projectors::ProjectorFamily;
    use proptest::prelude::*;

    fn fv(d: usize, k: usize, pi: &[f64]) -> FidelityVector {
        FidelityVector::new(d, k, pi.to_vec()).unwrap()
    }

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    /// Dense oracle: `π_α = Tr(ρ Π^α)` with every projector built explicitly.
    fn dense_coords(rho: &ComplexOperator, d: usize, k: usize) -> Vec<f64> {
        let fam = ProjectorFamily::new(d, k).unwrap();
        fam.iter()
            .map(|(p, _)| rho.trace_product(p).unwrap().re)
            .collect()
    }

    #[test]
    fn c_matrix_small_d() {
        let c2 = c_matrix(2).unwrap();
        assert_eq!(
            c2.entries,
            [[0.0, 0.5, 0.5], [1.0, 0.5, -0.5], [1.0, -0.5, 0.5]]
        );
        let c3 = c_matrix(3).unwrap();
        let expected = [[1.0, 3.0, 2.0], [5.0, 3.0, -2.0], [10.0, -6.0, 2.0]];
        for (row, want) in c3.entries.iter().zip(&expected) {
            for (x, w) in row.iter().zip(want) {
                assert!((x - w / 6.0).abs() <= 1e-15);
            }
        }
        assert!(matches!(c_matrix(1), Err(Error::Domain(_))));
    }

    #[test]
    fn c_matrix_rows_sum_to_one_and_squares_to_identity() {
        for d in 2..=10 {
            let c = c_matrix(d).unwrap();
            assert!(c.row_sums().iter().all(|s| (s - 1.0).abs() <= 1e-14));
            assert!(c.entries.iter().flatten().any(|&x| x < 0.0));
            let sq = c.compose(&c);
            for (i, row) in sq.iter().enumerate() {
                for (j, x) in row.iter().enumerate() {
                    let id = if i == j { 1.0 } else { 0.0 };
                    assert!((x - id).abs() <= 1e-12);
                }
            }
        }
    }

    #[test]
    fn pt_map_examples() {
        let e2 = fv(2, 1, &[0.0, 0.0, 1.0]);
        let id: TranspositionMask = "0".parse().unwrap();
        assert_eq!(pt_map(&e2, &id).unwrap(), e2);

        let image = pt_map(&e2, &"1".parse().unwrap()).unwrap();
        assert_eq!(image.pi(), &[1.0, -0.5, 0.5]);
        assert!(!image.is_state());

        // Dense: (1⊗τ)P⁺ = F/d = (Q⁰ − Q¹)/d, and Q⁰ = Π⁰ + Π², so
        // π' = (TrΠ⁰/d, −TrΠ¹/d, TrΠ²/d) = (1, −1/2, 1/2) at d = 2.
        let rho = reconstruct(&e2).unwrap();
        let pt = partial_transpose(&rho, &SubsystemSet::new([1]).unwrap()).unwrap();
        assert!(close(&dense_coords(&pt, 2, 1), image.pi(), 1e-14));

        let u = FidelityVector::uniform(2, 2).unwrap();
        let image = pt_map(&u, &"01".parse().unwrap()).unwrap();
        assert!((image.sum() - 1.0).abs() <= 1e-12);
        let rho = reconstruct(&u).unwrap();
        let pt = partial_transpose(&rho, &SubsystemSet::new([3]).unwrap()).unwrap();
        assert!(close(&dense_coords(&pt, 2, 2), image.pi(), 1e-13));

        assert!(matches!(
            pt_map(&u, &"1".parse().unwrap()),
            Err(Error::Index(_))
        ));
    }

    #[test]
    fn ppt_check_examples() {
        let e2 = fv(2, 1, &[0.0, 0.0, 1.0]);
        let v = ppt_check(&e2, &"1".parse().unwrap(), 1e-9).unwrap();
        assert!(!v.is_ppt);
        assert_eq!(v.violations, vec![("1".to_string(), -0.5)]);

        for d in 2..=6 {
            let mixed = FidelityVector::maximally_mixed(d, 1).unwrap();
            assert!(
                ppt_check(&mixed, &"1".parse().unwrap(), 1e-9)
                    .unwrap()
                    .is_ppt
            );
        }

        let e00 = FidelityVector::vertex(2, &"00".parse().unwrap()).unwrap();
        let verdicts = ppt_all(&e00, 1e-9).unwrap();
        assert_eq!(verdicts.len(), 3);
        assert!(verdicts.iter().all(|v| v.is_ppt));
        // Dense: every partial transpose of Π̃⁰⊗Π̃⁰ is PSD.
        let rho = reconstruct(&e00).unwrap();
        for mask in TranspositionMask::nonzero(2) {
            let pt = partial_transpose(&rho, &SubsystemSet::new(mask.bob_subsystems()).unwrap())
                .unwrap();
            assert!(dense::min_eigenvalue(&pt).unwrap() >= -1e-12);
        }

        let bad = fv(2, 1, &[0.5, 0.5, 0.5]);
        assert!(matches!(
            ppt_check(&bad, &"1".parse().unwrap(), 1e-9),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn ppt_all_order_and_uniform_point() {
        let masks: Vec<String> = ppt_all(&FidelityVector::uniform(3, 1).unwrap(), 1e-9)
            .unwrap()
            .into_iter()
            .map(|v| v.mask)
            .collect();
        assert_eq!(masks, ["1"]);
        let u = FidelityVector::uniform(2, 2).unwrap();
        let verdicts = ppt_all(&u, 1e-9).unwrap();
        let masks: Vec<&str> = verdicts.iter().map(|v| v.mask.as_str()).collect();
        assert_eq!(masks, ["01", "10", "11"]);
        assert!(verdicts.iter().all(|v| v.is_ppt));
    }

    #[test]
    fn inequality_examples() {
        for d in 2..=4 {
            let e22 = FidelityVector::vertex(d, &"22".parse().unwrap()).unwrap();
            let ineq = ppt_inequalities_01_10(&e22).unwrap();
            // π₂₀ + π₂₁ − (d−1)π₂₂ is the fifth residual.
            assert_eq!(ineq.sys01[4], -(d as f64 - 1.0));
            assert!(!ineq.sys01_holds(1e-9));
            assert!(
                !ppt_check(&e22, &"01".parse().unwrap(), 1e-9)
                    .unwrap()
                    .is_ppt
            );
        }
        let u = FidelityVector::uniform(2, 2).unwrap();
        let ineq = ppt_inequalities_01_10(&u).unwrap();
        assert!(ineq.sys01.iter().chain(&ineq.sys10).all(|&r| r >= 0.0));
        assert!(matches!(
            ppt_inequalities_01_10(&FidelityVector::uniform(2, 1).unwrap()),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn inequality_residuals_are_scaled_transformed_coords() {
        for seed in 0..20 {
            let f = FidelityVector::random(3, 2, seed).unwrap();
            let ineq = ppt_inequalities_01_10(&f).unwrap();
            let t01 = pt_map(&f, &"01".parse().unwrap()).unwrap();
            let t10 = pt_map(&f, &"10".parse().unwrap()).unwrap();
            for x in 0..3 {
                assert!((ineq.sys01[2 * x] / 2.0 - t01.pi()[3 * x + 1]).abs() <= 1e-14);
                assert!((ineq.sys01[2 * x + 1] / 3.0 - t01.pi()[3 * x + 2]).abs() <= 1e-14);
                assert!((ineq.sys10[2 * x] / 2.0 - t10.pi()[3 + x]).abs() <= 1e-14);
                assert!((ineq.sys10[2 * x + 1] / 3.0 - t10.pi()[6 + x]).abs() <= 1e-14);
            }
        }
    }

    fn basis(d: usize, i: usize) -> Vec<Complex64> {
        (0..d)
            .map(|j| Complex64::new((i == j) as u8 as f64, 0.0))
            .collect()
    }

    #[test]
    fn product_state_examples() {
        for d in 2..=5 {
            let e1 = basis(d, 0);
            let f = product_state_fidelities(std::slice::from_ref(&e1), std::slice::from_ref(&e1))
                .unwrap();
            let x = d as f64;
            assert!(close(f.pi(), &[1.0 - 1.0 / x, 0.0, 1.0 / x], 1e-15));
            let f = product_state_fidelities(&[e1], &[basis(d, 1)]).unwrap();
            assert!(close(f.pi(), &[0.5, 0.5, 0.0], 1e-15));
        }
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let phi = vec![Complex64::new(s, 0.0), Complex64::new(0.0, s)];
        let f = product_state_fidelities(&[basis(2, 0)], &[phi]).unwrap();
        assert!(close(f.pi(), &[0.5, 0.25, 0.25], 1e-15));

        let unnormalized = vec![Complex64::new(2.0, 0.0), Complex64::new(0.0, 0.0)];
        assert!(matches!(
            product_state_fidelities(&[unnormalized], &[basis(2, 0)]),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn product_fidelities_match_dense_trace() {
        for (d, k) in [(2, 1), (3, 1), (2, 2)] {
            for seed in 0..10u64 {
                let psis: Vec<_> = (0..k)
                    .map(|i| random_unit_vector(d, Field::Complex, seed * 10 + i as u64))
                    .collect();
                let phis: Vec<_> = (0..k)
                    .map(|i| random_unit_vector(d, Field::Complex, seed * 10 + 5 + i as u64))
                    .collect();
                let f = product_state_fidelities(&psis, &phis).unwrap();
                let rho = psis
                    .iter()
                    .chain(&phis)
                    .map(|v| ComplexOperator::outer(v).unwrap())
                    .reduce(|acc, x| kron(&acc, &x).unwrap())
                    .unwrap();
                assert!(close(&dense_coords(&rho, d, k), f.pi(), 1e-13));
                assert!(close(twirl_coords(&rho, d, k).unwrap().pi(), f.pi(), 1e-13));
                assert!(sep_bound_check(&f, 1e-12).unwrap().passes);
            }
        }
    }

    #[test]
    fn sep_bound_examples() {
        let v = sep_bound_check(&fv(2, 1, &[0.0, 0.0, 1.0]), 1e-12).unwrap();
        assert!(!v.passes);
        assert_eq!(v.violated, vec!["2"]);
        assert_eq!(v.label(), "entangled");
        let v = sep_bound_check(&fv(2, 1, &[1.0, 0.0, 0.0]), 1e-12).unwrap();
        assert!(v.passes && v.sufficient);
        assert_eq!(v.label(), "separable");
        for d in 2..=5 {
            assert_eq!(sep_bound(d, &"12".parse().unwrap()), 1.0 / (2.0 * d as f64));
        }
        let v = sep_bound_check(&FidelityVector::uniform(2, 2).unwrap(), 1e-12).unwrap();
        assert!(!v.sufficient);
        assert_eq!(v.label(), "necessary-condition pass");
    }

    #[test]
    fn twirl_examples() {
        let mixed = ComplexOperator::identity(vec![2, 2]).unwrap().scaled(0.25);
        let f = twirl_coords(&mixed, 2, 1).unwrap();
        assert!(close(f.pi(), &[0.5, 0.25, 0.25], 1e-15));
        assert_eq!(f, FidelityVector::maximally_mixed(2, 1).unwrap());

        for alpha in MultiIndex::all(2) {
            let rho = normalized_projector(2, &alpha).unwrap();
            let f = twirl_coords(&rho, 2, 2).unwrap();
            assert!(close(
                f.pi(),
                FidelityVector::vertex(2, &alpha).unwrap().pi(),
                1e-14
            ));
        }

        let not_unit = ComplexOperator::identity(vec![4]).unwrap();
        assert!(matches!(
            twirl_coords(&not_unit, 2, 1),
            Err(Error::Domain(_))
        ));
        let mut not_psd = ComplexOperator::zeros(vec![4]).unwrap();
        not_psd.set(0, 0, Complex64::new(1.5, 0.0));
        not_psd.set(1, 1, Complex64::new(-0.5, 0.0));
        assert!(matches!(
            twirl_coords(&not_psd, 2, 1),
            Err(Error::Domain(_))
        ));
        assert!(matches!(twirl_coords(&mixed, 2, 2), Err(Error::Index(_))));
    }

    #[test]
    fn twirl_matches_dense_on_random_states() {
        for (d, k) in [(2usize, 1usize), (3, 1), (2, 2), (3, 2)] {
            let n = d.pow(2 * k as u32);
            let g = dense::random_unitary(n, 17);
            let weights = FidelityVector::random(2, 1, 3).unwrap();
            // ρ = G diag(w) G†, a generic full-rank state.
            let mut diag = ComplexOperator::zeros(vec![d; 2 * k]).unwrap();
            let spread: Vec<f64> = (0..n).map(|i| weights.pi()[i % 3] + i as f64).collect();
            let total: f64 = spread.iter().sum();
            for (i, w) in spread.iter().enumerate() {
                diag.set(i, i, Complex64::new(w / total, 0.0));
            }
            let g = g.reshaped(vec![d; 2 * k]).unwrap();
            let rho = &(&g * &diag) * &g.adjoint();
            let f = twirl_coords(&rho, d, k).unwrap();
            assert!(f.is_state());
            assert!(close(f.pi(), &dense_coords(&rho, d, k), 1e-13));
            let again = twirl_coords(&reconstruct(&f).unwrap(), d, k).unwrap();
            assert!(again.max_abs_diff(&f) <= 1e-12);
        }
    }

    #[test]
    fn reconstruct_examples() {
        for alpha in MultiIndex::all(2) {
            let rho = reconstruct(&FidelityVector::vertex(2, &alpha).unwrap()).unwrap();
            let expected = normalized_projector(2, &alpha).unwrap();
            assert!(rho.max_abs_diff(&expected).unwrap() <= 1e-15);
        }
        let b = BipartiteBasis::new(2).unwrap();
        let mut expected = b.pi[0].scaled(0.5);
        expected.add_scaled(1.0, &b.pi[1]).unwrap();
        expected.add_scaled(1.0, &b.pi[2]).unwrap();
        let expected = expected.scaled(1.0 / 3.0);
        let rho = reconstruct(&FidelityVector::uniform(2, 1).unwrap()).unwrap();
        assert!(rho.max_abs_diff(&expected).unwrap() <= 1e-15);
        assert!((rho.trace().re - 1.0).abs() <= 1e-15);
        assert!(matches!(
            reconstruct(&FidelityVector::uniform(2, 7).unwrap()),
            Err(Error::Capacity { .. })
        ));
    }

    #[test]
    fn reduce_examples() {
        let u = FidelityVector::uniform(2, 2).unwrap();
        assert!(close(reduce(&u, 0).unwrap().pi(), &[1.0 / 3.0; 3], 1e-15));
        let e02 = FidelityVector::vertex(2, &"02".parse().unwrap()).unwrap();
        assert_eq!(reduce(&e02, 0).unwrap().pi(), &[0.0, 0.0, 1.0]);
        assert_eq!(reduce(&e02, 1).unwrap().pi(), &[1.0, 0.0, 0.0]);
        assert!(matches!(
            reduce(&FidelityVector::uniform(2, 1).unwrap(), 0),
            Err(Error::Domain(_))
        ));
        assert!(matches!(reduce(&u, 2), Err(Error::Index(_))));
    }

    #[test]
    fn reduce_matches_dense_partial_trace() {
        for seed in 0..5 {
            let f = FidelityVector::random(2, 2, seed).unwrap();
            let rho = reconstruct(&f).unwrap();
            for pair in 0..2 {
                let traced =
                    partial_trace(&rho, &SubsystemSet::new([pair, 2 + pair]).unwrap()).unwrap();
                let dense = twirl_coords(&traced, 2, 1).unwrap();
                assert!(dense.max_abs_diff(&reduce(&f, pair).unwrap()) <= 1e-12);
            }
        }
    }

    #[test]
    fn mixed_reduction_leaves_maximally_mixed_strays() {
        // Tracing A_0 and B_2 of a K = 3 state leaves B_0 and A_2 maximally
        // mixed; dropping them too gives the two-step natural reduction.
        let (d, k) = (2, 3);
        let f = FidelityVector::random(d, k, 9).unwrap();
        let rho = reconstruct(&f).unwrap();
        let traced = partial_trace(&rho, &SubsystemSet::new([0, 5]).unwrap()).unwrap();
        // Remaining order: A_1 A_2 B_0 B_1.
        let stray = partial_trace(&traced, &SubsystemSet::new([1, 2]).unwrap()).unwrap();
        let expected = reduce_mixed(&f, 0, 2).unwrap();
        assert_eq!(expected.k(), 1);
        assert!(twirl_coords(&stray, d, 1).unwrap().max_abs_diff(&expected) <= 1e-12);
        // B_0 ⊗ A_2 marginal is I/d².
        let strays = partial_trace(&traced, &SubsystemSet::new([0, 3]).unwrap()).unwrap();
        let id = ComplexOperator::identity(vec![d, d]).unwrap().scaled(0.25);
        assert!(strays.max_abs_diff(&id).unwrap() <= 1e-12);
        assert!(matches!(
            reduce_mixed(&FidelityVector::uniform(2, 2).unwrap(), 0, 1),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn vertex_coords_match_dense_twirl() {
        for d in 2..=4 {
            let b = BipartiteBasis::new(d).unwrap();
            let states = [
                (HullFamily::Werner, 0, &b.q0),
                (HullFamily::Werner, 1, &b.q1),
                (HullFamily::Isotropic, 0, &b.p0),
                (HullFamily::Isotropic, 1, &b.p1),
            ];
            for (family, i, op) in states {
                let rho = op.scaled(1.0 / op.trace().re);
                let twirled = twirl_coords(&rho, d, 1).unwrap();
                let coords = pair_vertex_coords(d, family, i).unwrap();
                assert!(close(twirled.pi(), &coords, 1e-12), "{family:?} {i} d={d}");
            }
        }
        let v = pair_vertex_coords(2, HullFamily::Werner, 0).unwrap();
        assert!(close(&v, &[2.0 / 3.0, 0.0, 1.0 / 3.0], 1e-15));
        assert!(pair_vertex_coords(2, HullFamily::Werner, 2).is_err());
    }

    #[test]
    fn hull_vertices_are_tensor_products() {
        let verts = hull_vertices(3, 2).unwrap();
        assert_eq!(verts.len(), 16);
        assert_eq!(verts[0].labels, vec!["Q0", "Q0"]);
        assert_eq!(verts[7].labels, vec!["Q1", "P1"]);
        let q1 = pair_vertex_coords(3, HullFamily::Werner, 1).unwrap();
        let p1 = pair_vertex_coords(3, HullFamily::Isotropic, 1).unwrap();
        assert_eq!(verts[7].coords.pi(), tensor3(&[q1, p1]).as_slice());
        assert!(verts.iter().all(|v| v.coords.is_state()));
    }

    #[test]
    fn intersection_is_maximally_mixed() {
        for d in 2..=8 {
            let pt = intersection_point(d).unwrap();
            let x = d as f64;
            assert!((pt.q - (x - 1.0) / (2.0 * x)).abs() <= 1e-15);
            assert!((pt.p - 1.0 / (x * x)).abs() <= 1e-15);
            assert!(close(&pt.coords, &pt.coords_isotropic, 1e-15));
            let mixed = FidelityVector::maximally_mixed(d, 1).unwrap();
            assert!(close(&pt.coords, mixed.pi(), 1e-15));
            assert!(pt.q < 0.5 && pt.p < 1.0 / x);
        }
    }

    #[test]
    fn closed_form_intersection_values() {
        let (q, p) = intersection_closed_form(2);
        assert!((q - 1.0 / 3.0).abs() <= 1e-16 && (p - 2.0 / 9.0).abs() <= 1e-16);
        let (q, p) = intersection_closed_form(3);
        assert!((q - 5.0 / 12.0).abs() <= 1e-16 && (p - 7.0 / 72.0).abs() <= 1e-16);
    }

    #[test]
    fn json_round_trip_and_validation() {
        let f = FidelityVector::random(3, 2, 4).unwrap();
        let text = serde_json::to_string(&f).unwrap();
        assert!(text.contains("\"K\":2"));
        let back: FidelityVector = serde_json::from_str(&text).unwrap();
        assert_eq!(back, f);
        assert!(serde_json::from_str::<FidelityVector>(r#"{"d":2,"K":1,"pi":[1,0]}"#).is_err());
        assert!(serde_json::from_str::<FidelityVector>(r#"{"d":1,"K":1,"pi":[1,0,0]}"#).is_err());
    }

    fn state_vector(k: usize) -> impl Strategy<Value = Vec<f64>> {
        proptest::collection::vec(0.0f64..1.0, 3usize.pow(k as u32)).prop_filter_map(
            "nonzero",
            |v| {
                let s: f64 = v.iter().sum();
                (s > 1e-6).then(|| v.iter().map(|x| x / s).collect())
            },
        )
    }

    proptest! {
        #[test]
        fn pt_map_preserves_trace_and_is_involutive(
            d in 2usize..8,
            pi in state_vector(2),
            mask_rank in 0usize..4,
        ) {
            let f = FidelityVector::new(d, 2, pi).unwrap();
            let mask = TranspositionMask::from_rank(mask_rank, 2).unwrap();
            let once = pt_map(&f, &mask).unwrap();
            prop_assert!((once.sum() - 1.0).abs() <= 1e-12);
            let twice = pt_map(&once, &mask).unwrap();
            prop_assert!(twice.max_abs_diff(&f) <= 1e-12);
        }

        #[test]
        fn bipartite_ppt_is_the_bound_pair(d in 2usize..10, pi in state_vector(1)) {
            let f = FidelityVector::new(d, 1, pi.clone()).unwrap();
            let ppt = ppt_check(&f, &"1".parse().unwrap(), 0.0).unwrap().is_ppt;
            let margin = (pi[1] - 0.5).abs().min((pi[2] - 1.0 / d as f64).abs());
            prop_assume!(margin > 1e-12);
            prop_assert_eq!(ppt, pi[1] <= 0.5 && pi[2] <= 1.0 / d as f64);
        }

        #[test]
        fn reduction_preserves_normalization(pi in state_vector(3), pair in 0usize..3) {
            let f = FidelityVector::new(2, 3, pi).unwrap();
            let r = reduce(&f, pair).unwrap();
            prop_assert!(r.is_state());
            prop_assert_eq!(r.k(), 2);
        }
    }
}

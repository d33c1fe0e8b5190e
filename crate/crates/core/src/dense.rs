//! Dense complex operators on tensor-product spaces.
//!
//! Every operator carries its subsystem factorization (`shape`), so partial
//! transposes, partial traces and leg permutations can address factors by
//! position. Indexing is row-major; factor 0 is the most significant digit
//! of a row or column index.

use std::ops::{Add, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tol;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Square complex matrix with a declared tensor factorization.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "OperatorRepr", into = "OperatorRepr")]
pub struct ComplexOperator {
    dim: usize,
    shape: Vec<usize>,
    data: Vec<Complex64>,
}

/// Wire format: `{"dim": n, "shape": [...], "re": [n·n], "im": [n·n]}`.
#[derive(Serialize, Deserialize)]
struct OperatorRepr {
    dim: usize,
    shape: Vec<usize>,
    re: Vec<f64>,
    im: Vec<f64>,
}

impl TryFrom<OperatorRepr> for ComplexOperator {
    type Error = Error;

    fn try_from(repr: OperatorRepr) -> Result<Self> {
        if repr.re.len() != repr.im.len() {
            return Err(Error::index(format!(
                "re has {} entries but im has {}",
                repr.re.len(),
                repr.im.len()
            )));
        }
        let data = repr
            .re
            .iter()
            .zip(&repr.im)
            .map(|(&re, &im)| Complex64::new(re, im))
            .collect();
        let op = ComplexOperator::new(repr.shape, data)?;
        if op.dim != repr.dim {
            return Err(Error::index(format!(
                "declared dim {} does not match shape product {}",
                repr.dim, op.dim
            )));
        }
        Ok(op)
    }
}

impl From<ComplexOperator> for OperatorRepr {
    fn from(op: ComplexOperator) -> Self {
        OperatorRepr {
            dim: op.dim,
            re: op.data.iter().map(|z| z.re).collect(),
            im: op.data.iter().map(|z| z.im).collect(),
            shape: op.shape,
        }
    }
}

fn shape_dim(shape: &[usize], max: usize) -> Result<usize> {
    if shape.is_empty() {
        return Err(Error::index("shape must list at least one factor"));
    }
    if shape.contains(&0) {
        return Err(Error::index("local dimensions must be positive"));
    }
    let dim = shape
        .iter()
        .try_fold(1usize, |acc, &k| acc.checked_mul(k))
        .ok_or(Error::Capacity {
            dim: usize::MAX,
            max,
        })?;
    if dim > max {
        return Err(Error::Capacity { dim, max });
    }
    Ok(dim)
}

/// `strides[k]` is the weight of digit `k` in a flat index.
fn strides(shape: &[usize]) -> Vec<usize> {
    let mut strides = vec![1; shape.len()];
    for k in (0..shape.len().saturating_sub(1)).rev() {
        strides[k] = strides[k + 1] * shape[k + 1];
    }
    strides
}

impl ComplexOperator {
    /// Wraps row-major `data` with the given factorization.
    pub fn new(shape: Vec<usize>, data: Vec<Complex64>) -> Result<Self> {
        let dim = shape_dim(&shape, tol::MAX_DIM)?;
        if data.len() != dim * dim {
            return Err(Error::index(format!(
                "expected {} entries for dim {dim}, got {}",
                dim * dim,
                data.len()
            )));
        }
        Ok(ComplexOperator { dim, shape, data })
    }

    pub fn from_real(shape: Vec<usize>, data: &[f64]) -> Result<Self> {
        Self::new(
            shape,
            data.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        )
    }

    pub fn zeros(shape: Vec<usize>) -> Result<Self> {
        let dim = shape_dim(&shape, tol::MAX_DIM)?;
        Ok(ComplexOperator {
            dim,
            shape,
            data: vec![ZERO; dim * dim],
        })
    }

    pub fn identity(shape: Vec<usize>) -> Result<Self> {
        let mut op = Self::zeros(shape)?;
        for i in 0..op.dim {
            op.data[i * op.dim + i] = ONE;
        }
        Ok(op)
    }

    /// `|v⟩⟨v|` on a single factor of dimension `v.len()`.
    pub fn outer(v: &[Complex64]) -> Result<Self> {
        let n = v.len();
        let mut op = Self::zeros(vec![n])?;
        for (i, vi) in v.iter().enumerate() {
            for (j, vj) in v.iter().enumerate() {
                op.data[i * n + j] = vi * vj.conj();
            }
        }
        Ok(op)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    /// Row-major entries.
    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.dim + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: Complex64) {
        self.data[row * self.dim + col] = value;
    }

    /// Same entries, different factorization of the same dimension.
    pub fn reshaped(mut self, shape: Vec<usize>) -> Result<Self> {
        let dim = shape_dim(&shape, tol::MAX_DIM)?;
        if dim != self.dim {
            return Err(Error::index(format!(
                "shape {shape:?} has dimension {dim}, operator has {}",
                self.dim
            )));
        }
        self.shape = shape;
        Ok(self)
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.data[i * self.dim + i]).sum()
    }

    /// `Tr(self · other)` without forming the product.
    pub fn trace_product(&self, other: &ComplexOperator) -> Result<Complex64> {
        self.check_same_dim(other)?;
        let n = self.dim;
        let mut acc = ZERO;
        for i in 0..n {
            for j in 0..n {
                acc += self.data[i * n + j] * other.data[j * n + i];
            }
        }
        Ok(acc)
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut data = vec![ZERO; n * n];
        for i in 0..n {
            for j in 0..n {
                data[j * n + i] = self.data[i * n + j].conj();
            }
        }
        ComplexOperator {
            dim: n,
            shape: self.shape.clone(),
            data,
        }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        ComplexOperator {
            dim: self.dim,
            shape: self.shape.clone(),
            data: self.data.iter().map(|z| z * factor).collect(),
        }
    }

    /// `self += factor · other`.
    pub fn add_scaled(&mut self, factor: f64, other: &ComplexOperator) -> Result<()> {
        self.check_same_dim(other)?;
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += b * factor;
        }
        Ok(())
    }

    pub fn matmul(&self, other: &ComplexOperator) -> Result<Self> {
        self.check_same_dim(other)?;
        let n = self.dim;
        let mut data = vec![ZERO; n * n];
        for i in 0..n {
            let out = &mut data[i * n..(i + 1) * n];
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == ZERO {
                    continue;
                }
                let row = &other.data[k * n..(k + 1) * n];
                for (o, b) in out.iter_mut().zip(row) {
                    *o += a * b;
                }
            }
        }
        Ok(ComplexOperator {
            dim: n,
            shape: self.shape.clone(),
            data,
        })
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &ComplexOperator) -> Result<f64> {
        self.check_same_dim(other)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// `max|A − A†|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.data[i * n + j] - self.data[j * n + i].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermiticity_defect() <= tol::HERMITIAN * self.max_abs()
    }

    fn check_same_dim(&self, other: &ComplexOperator) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::index(format!(
                "dimension mismatch: {} vs {}",
                self.dim, other.dim
            )));
        }
        Ok(())
    }

    fn to_nalgebra(&self) -> DMatrix<Complex64> {
        DMatrix::from_row_slice(self.dim, self.dim, &self.data)
    }
}

impl Add for &ComplexOperator {
    type Output = ComplexOperator;

    /// Panics on dimension mismatch.
    fn add(self, rhs: &ComplexOperator) -> ComplexOperator {
        let mut out = self.clone();
        out.add_scaled(1.0, rhs)
            .expect("operator dimensions differ");
        out
    }
}

impl Sub for &ComplexOperator {
    type Output = ComplexOperator;

    /// Panics on dimension mismatch.
    fn sub(self, rhs: &ComplexOperator) -> ComplexOperator {
        let mut out = self.clone();
        out.add_scaled(-1.0, rhs)
            .expect("operator dimensions differ");
        out
    }
}

impl Mul for &ComplexOperator {
    type Output = ComplexOperator;

    /// Matrix product. Panics on dimension mismatch.
    fn mul(self, rhs: &ComplexOperator) -> ComplexOperator {
        self.matmul(rhs).expect("operator dimensions differ")
    }
}

/// Sorted set of subsystem positions within a shape.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SubsystemSet {
    indices: Vec<usize>,
}

impl SubsystemSet {
    /// Rejects duplicate positions. Range is checked against a shape at use.
    pub fn new(indices: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut indices: Vec<usize> = indices.into_iter().collect();
        indices.sort_unstable();
        if indices.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::index(format!("duplicate subsystem in {indices:?}")));
        }
        Ok(SubsystemSet { indices })
    }

    pub fn empty() -> Self {
        SubsystemSet {
            indices: Vec::new(),
        }
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn contains(&self, index: usize) -> bool {
        self.indices.binary_search(&index).is_ok()
    }

    fn check_range(&self, factors: usize) -> Result<()> {
        match self.indices.last() {
            Some(&last) if last >= factors => Err(Error::index(format!(
                "subsystem {last} out of range for {factors} factors"
            ))),
            _ => Ok(()),
        }
    }
}

/// Kronecker product under the default dimension cap.
pub fn kron(a: &ComplexOperator, b: &ComplexOperator) -> Result<ComplexOperator> {
    kron_capped(a, b, tol::MAX_DIM)
}

/// Kronecker product; row index of the result is `i_a · b.dim + i_b`.
pub fn kron_capped(
    a: &ComplexOperator,
    b: &ComplexOperator,
    max: usize,
) -> Result<ComplexOperator> {
    let dim = a.dim.checked_mul(b.dim).ok_or(Error::Capacity {
        dim: usize::MAX,
        max,
    })?;
    if dim > max {
        return Err(Error::Capacity { dim, max });
    }
    let (na, nb) = (a.dim, b.dim);
    let mut data = vec![ZERO; dim * dim];
    for ia in 0..na {
        for ja in 0..na {
            let x = a.data[ia * na + ja];
            if x == ZERO {
                continue;
            }
            for ib in 0..nb {
                let row = (ia * nb + ib) * dim + ja * nb;
                for jb in 0..nb {
                    data[row + jb] = x * b.data[ib * nb + jb];
                }
            }
        }
    }
    let mut shape = a.shape.clone();
    shape.extend_from_slice(&b.shape);
    Ok(ComplexOperator { dim, shape, data })
}

/// Kronecker product of state vectors.
pub fn kron_vec(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    a.iter()
        .flat_map(|x| b.iter().map(move |y| x * y))
        .collect()
}

/// Transposes the factors in `subs`: their row and column digits swap.
pub fn partial_transpose(a: &ComplexOperator, subs: &SubsystemSet) -> Result<ComplexOperator> {
    subs.check_range(a.shape.len())?;
    let n = a.dim;
    let strides = strides(&a.shape);
    // Contribution of the transposed digits to each flat index.
    let sub_part: Vec<usize> = (0..n)
        .map(|i| {
            subs.indices
                .iter()
                .map(|&k| (i / strides[k]) % a.shape[k] * strides[k])
                .sum()
        })
        .collect();
    let mut data = vec![ZERO; n * n];
    for r in 0..n {
        for c in 0..n {
            let nr = r - sub_part[r] + sub_part[c];
            let nc = c - sub_part[c] + sub_part[r];
            data[nr * n + nc] = a.data[r * n + c];
        }
    }
    Ok(ComplexOperator {
        dim: n,
        shape: a.shape.clone(),
        data,
    })
}

/// Traces out the factors in `subs`. Tracing every factor yields a 1×1 operator.
pub fn partial_trace(a: &ComplexOperator, subs: &SubsystemSet) -> Result<ComplexOperator> {
    subs.check_range(a.shape.len())?;
    let strides = strides(&a.shape);
    let kept: Vec<usize> = (0..a.shape.len()).filter(|k| !subs.contains(*k)).collect();
    let offsets = |factors: &[usize]| -> Vec<usize> {
        let mut offs = vec![0usize];
        for &k in factors {
            let stride = strides[k];
            offs = offs
                .iter()
                .flat_map(|&o| (0..a.shape[k]).map(move |x| o + x * stride))
                .collect();
        }
        offs
    };
    let keep_off = offsets(&kept);
    let trace_off = offsets(&subs.indices);
    let m = keep_off.len();
    let n = a.dim;
    let mut data = vec![ZERO; m * m];
    for (r, &ro) in keep_off.iter().enumerate() {
        for (c, &co) in keep_off.iter().enumerate() {
            data[r * m + c] = trace_off
                .iter()
                .map(|&t| a.data[(ro + t) * n + co + t])
                .sum();
        }
    }
    let shape = if kept.is_empty() {
        vec![1]
    } else {
        kept.iter().map(|&k| a.shape[k]).collect()
    };
    Ok(ComplexOperator {
        dim: m,
        shape,
        data,
    })
}

/// Relabels tensor legs: old factor `l` ends up at position `dest[l]`.
pub fn permute_subsystems(a: &ComplexOperator, dest: &[usize]) -> Result<ComplexOperator> {
    let k = a.shape.len();
    if dest.len() != k {
        return Err(Error::index(format!(
            "permutation has {} entries for {k} factors",
            dest.len()
        )));
    }
    let mut seen = vec![false; k];
    for &p in dest {
        if p >= k || std::mem::replace(&mut seen[p], true) {
            return Err(Error::index(format!("{dest:?} is not a permutation")));
        }
    }
    let mut new_shape = vec![0; k];
    for (l, &p) in dest.iter().enumerate() {
        new_shape[p] = a.shape[l];
    }
    let old_strides = strides(&a.shape);
    let new_strides = strides(&new_shape);
    let n = a.dim;
    let map: Vec<usize> = (0..n)
        .map(|i| {
            (0..k)
                .map(|l| (i / old_strides[l]) % a.shape[l] * new_strides[dest[l]])
                .sum()
        })
        .collect();
    let mut data = vec![ZERO; n * n];
    for r in 0..n {
        for c in 0..n {
            data[map[r] * n + map[c]] = a.data[r * n + c];
        }
    }
    Ok(ComplexOperator {
        dim: n,
        shape: new_shape,
        data,
    })
}

fn require_hermitian(a: &ComplexOperator) -> Result<()> {
    let defect = a.hermiticity_defect();
    if defect > tol::HERMITIAN * a.max_abs() {
        return Err(Error::domain(format!(
            "operator is not Hermitian (max|A − A†| = {defect:e})"
        )));
    }
    Ok(())
}

/// Eigenvalues of the Hermitian part, ascending.
pub fn eigenvalues_hermitian(a: &ComplexOperator) -> Result<Vec<f64>> {
    require_hermitian(a)?;
    let m = a.to_nalgebra();
    let herm = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let mut values: Vec<f64> = herm.symmetric_eigenvalues().iter().copied().collect();
    values.sort_by(f64::total_cmp);
    Ok(values)
}

pub fn min_eigenvalue(a: &ComplexOperator) -> Result<f64> {
    Ok(eigenvalues_hermitian(a)?[0])
}

/// `λ_min(a) ≥ −tol`.
pub fn is_psd(a: &ComplexOperator, tol: f64) -> Result<bool> {
    Ok(min_eigenvalue(a)? >= -tol)
}

/// Haar-distributed real orthogonal `d × d` matrix, deterministic in `seed`.
///
/// QR of a standard normal matrix with the columns of `Q` rescaled so that
/// `R` has a positive diagonal.
pub fn random_orthogonal(d: usize, seed: u64) -> ComplexOperator {
    assert!(d >= 1, "dimension must be positive");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = DMatrix::<f64>::from_fn(d, d, |_, _| rng.sample(StandardNormal));
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..d {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    let data = (0..d)
        .flat_map(|i| (0..d).map(move |j| (i, j)))
        .map(|(i, j)| Complex64::new(q[(i, j)], 0.0))
        .collect();
    ComplexOperator {
        dim: d,
        shape: vec![d],
        data,
    }
}

/// Haar-distributed unitary `d × d` matrix, deterministic in `seed`.
pub fn random_unitary(d: usize, seed: u64) -> ComplexOperator {
    assert!(d >= 1, "dimension must be positive");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = DMatrix::<Complex64>::from_fn(d, d, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..d {
        let rjj = r[(j, j)];
        if rjj.norm() > 0.0 {
            let phase = rjj / rjj.norm();
            for i in 0..d {
                q[(i, j)] *= phase;
            }
        }
    }
    let data = (0..d)
        .flat_map(|i| (0..d).map(move |j| (i, j)))
        .map(|(i, j)| q[(i, j)])
        .collect();
    ComplexOperator {
        dim: d,
        shape: vec![d],
        data,
    }
}

/// Scalar field for sampled vectors.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Field {
    Real,
    Complex,
}

/// Uniformly random unit vector in `R^d` or `C^d`, deterministic in `seed`.
pub fn random_unit_vector(d: usize, field: Field, seed: u64) -> Vec<Complex64> {
    assert!(d >= 1, "dimension must be positive");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let v: Vec<Complex64> = (0..d)
            .map(|_| {
                let re = rng.sample(StandardNormal);
                let im = match field {
                    Field::Real => 0.0,
                    Field::Complex => rng.sample(StandardNormal),
                };
                Complex64::new(re, im)
            })
            .collect();
        let norm = vector_norm(&v);
        if norm > 1e-300 {
            return v.into_iter().map(|z| z / norm).collect();
        }
    }
}

pub fn vector_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `⟨a|b⟩`, conjugate-linear in `a`.
pub fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn conjugate(v: &[Complex64]) -> Vec<Complex64> {
    v.iter().map(|z| z.conj()).collect()
}

//! Brute-force cross-checks of every closed form against dense matrices.
//!
//! Each check rebuilds the relevant objects from explicit `d^{2K}`-dimensional
//! operators (projectors from [`ProjectorFamily`], partial transposes and
//! traces from [`crate::dense`]) and reports the largest absolute entrywise
//! residual against the coordinate-level result.

use num_complex::Complex64;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::dense::{
    self, kron, kron_vec, partial_trace, partial_transpose, random_orthogonal, random_unit_vector,
    ComplexOperator, Field, SubsystemSet,
};
use crate::error::Result;
use crate::index::TranspositionMask;
use crate::projectors::{BipartiteBasis, ProjectorFamily};
use crate::simplex::{
    self, c_matrix, pair_vertex_coords, product_state_fidelities, pt_map, sep_bound_check,
    twirl_coords, FidelityVector, HullFamily,
};

/// Seed used when the caller does not pick one.
pub const DEFAULT_SEED: u64 = 20_050_117;

pub const C_MATRIX_TOL: f64 = 1e-12;
pub const RESOLUTION_TOL: f64 = 1e-12;
pub const INVARIANCE_TOL: f64 = 1e-10;
pub const PT_CONSISTENCY_TOL: f64 = 1e-11;
pub const PRODUCT_TOL: f64 = 1e-12;
pub const COPLANARITY_TOL: f64 = 1e-12;
pub const REDUCTION_TOL: f64 = 1e-12;
pub const VERTEX_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationReport {
    pub check: String,
    pub d: usize,
    #[serde(rename = "K")]
    pub k: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mask: Option<String>,
    pub samples: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub max_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl VerificationReport {
    fn new(check: &str, d: usize, k: usize, max_residual: f64, tolerance: f64) -> Self {
        VerificationReport {
            check: check.to_string(),
            d,
            k,
            mask: None,
            samples: 0,
            seed: None,
            max_residual,
            tolerance,
            pass: max_residual <= tolerance,
            note: None,
        }
    }

    fn sampled(mut self, samples: usize, seed: u64) -> Self {
        self.samples = samples;
        self.seed = Some(seed);
        if samples == 0 {
            self.note = Some("no samples".into());
        }
        self
    }
}

impl std::fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{} {} (d={}, K={}",
            if self.pass { "PASS" } else { "FAIL" },
            self.check,
            self.d,
            self.k
        )?;
        if let Some(mask) = &self.mask {
            write!(f, ", mask={mask}")?;
        }
        if self.samples > 0 {
            write!(f, ", samples={}", self.samples)?;
        }
        write!(
            f,
            "): residual {:e} vs tol {:e}",
            self.max_residual, self.tolerance
        )
    }
}

fn seeds(seed: u64) -> impl FnMut() -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    move || rng.next_u64()
}

/// `Σ_α w_α Π^α / Tr Π^α` from explicit dense projectors.
fn dense_state(family: &ProjectorFamily, weights: &[f64]) -> Result<ComplexOperator> {
    let mut out = ComplexOperator::zeros(family.projector(0).shape().to_vec())?;
    for (rank, &w) in weights.iter().enumerate() {
        out.add_scaled(w / family.trace(rank) as f64, family.projector(rank))?;
    }
    Ok(out)
}

/// `(1⊗τ)Π̃^β` expanded over `Π̃^α` must reproduce row `β` of `C`.
pub fn verify_c_matrix(d: usize) -> Result<VerificationReport> {
    let basis = BipartiteBasis::new(d)?;
    let c = c_matrix(d)?;
    let bob = SubsystemSet::new([1])?;
    let mut worst = 0.0f64;
    for beta in 0..3u8 {
        let pt = partial_transpose(&basis.normalized(beta), &bob)?;
        for alpha in 0..3 {
            let coeff = pt.trace_product(&basis.pi[alpha])?.re;
            worst = worst.max((coeff - c.entries[beta as usize][alpha]).abs());
        }
    }
    Ok(VerificationReport::new(
        "c_matrix",
        d,
        1,
        worst,
        C_MATRIX_TOL,
    ))
}

/// Completeness `Σ Π^α = I`, idempotence, and `Π^α Π^β = 0` for `α ≠ β`.
pub fn verify_resolution(d: usize, k: usize) -> Result<VerificationReport> {
    let family = ProjectorFamily::new(d, k)?;
    let identity = ComplexOperator::identity(vec![d; 2 * k])?;
    let mut sum = identity.scaled(0.0);
    for (p, _) in family.iter() {
        sum.add_scaled(1.0, p)?;
    }
    let mut worst = sum.max_abs_diff(&identity)?;
    // Hermitian projectors: Π^β Π^α = (Π^α Π^β)†, so α ≤ β suffices.
    for a in 0..family.len() {
        for b in a..family.len() {
            let prod = family.projector(a).matmul(family.projector(b))?;
            let residual = if a == b {
                prod.max_abs_diff(family.projector(a))?
            } else {
                prod.max_abs()
            };
            worst = worst.max(residual);
        }
    }
    Ok(VerificationReport::new(
        "resolution",
        d,
        k,
        worst,
        RESOLUTION_TOL,
    ))
}

/// `[O⊗O, Π^α] = 0` for seeded random orthogonal tuples `(O_1 … O_K)`.
pub fn verify_invariance(
    d: usize,
    k: usize,
    trials: usize,
    seed: u64,
) -> Result<VerificationReport> {
    let family = ProjectorFamily::new(d, k)?;
    let mut next = seeds(seed);
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let locals: Vec<ComplexOperator> = (0..k).map(|_| random_orthogonal(d, next())).collect();
        let mut oo = locals[0].clone();
        for o in locals.iter().chain(&locals).skip(1) {
            oo = kron(&oo, o)?;
        }
        for (p, _) in family.iter() {
            let comm = &oo.matmul(p)? - &p.matmul(&oo)?;
            worst = worst.max(comm.max_abs());
        }
    }
    Ok(VerificationReport::new("invariance", d, k, worst, INVARIANCE_TOL).sampled(trials, seed))
}

/// Dense `τ_a ρ` against `Σ_α pt_map(f)_α Π̃^α`, plus `λ_min` agreement.
pub fn verify_pt_consistency_mask(
    d: usize,
    k: usize,
    mask: &TranspositionMask,
    samples: usize,
    seed: u64,
) -> Result<VerificationReport> {
    let family = ProjectorFamily::new(d, k)?;
    let subs = SubsystemSet::new(mask.bob_subsystems())?;
    let mut next = seeds(seed);
    let mut worst = 0.0f64;
    let mut sign_mismatches = 0;
    for _ in 0..samples {
        let f = FidelityVector::random(d, k, next())?;
        let rho = dense_state(&family, f.pi())?;
        let transposed = partial_transpose(&rho, &subs)?;
        let image = pt_map(&f, mask)?;
        let expected = dense_state(&family, image.pi())?;
        worst = worst.max(transposed.max_abs_diff(&expected)?);
        // Spectrum of Σ c_α Π̃^α is {c_α / Tr Π^α}.
        let coord_min = image
            .pi()
            .iter()
            .enumerate()
            .map(|(r, &c)| c / family.trace(r) as f64)
            .fold(f64::INFINITY, f64::min);
        let dense_min = dense::min_eigenvalue(&transposed)?;
        worst = worst.max((coord_min - dense_min).abs());
        if (coord_min < 0.0) != (dense_min < 0.0)
            && coord_min.abs().max(dense_min.abs()) > PT_CONSISTENCY_TOL
        {
            sign_mismatches += 1;
        }
    }
    let mut report = VerificationReport::new("pt_consistency", d, k, worst, PT_CONSISTENCY_TOL)
        .sampled(samples, seed);
    report.mask = Some(mask.to_string());
    if sign_mismatches > 0 {
        report.pass = false;
        report.note = Some(format!("{sign_mismatches} min-eigenvalue sign mismatches"));
    }
    Ok(report)
}

/// [`verify_pt_consistency_mask`] for every nonzero mask.
pub fn verify_pt_consistency(
    d: usize,
    k: usize,
    samples: usize,
    seed: u64,
) -> Result<Vec<VerificationReport>> {
    TranspositionMask::nonzero(k)
        .map(|mask| verify_pt_consistency_mask(d, k, &mask, samples, seed))
        .collect()
}

/// Closed-form product-state fidelities against `Tr(σ Π^α)` for dense
/// `σ = |Ψ⟩⟨Ψ|`, `Ψ = ψ_1 ⊗ … ⊗ ψ_K ⊗ φ_1 ⊗ … ⊗ φ_K`. Any excess over the
/// product-state bounds also counts as residual.
pub fn verify_product_fidelities(
    d: usize,
    k: usize,
    field: Field,
    trials: usize,
    seed: u64,
) -> Result<VerificationReport> {
    let family = ProjectorFamily::new(d, k)?;
    let mut next = seeds(seed);
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let psis: Vec<Vec<Complex64>> = (0..k)
            .map(|_| random_unit_vector(d, field, next()))
            .collect();
        let phis: Vec<Vec<Complex64>> = (0..k)
            .map(|_| random_unit_vector(d, field, next()))
            .collect();
        let closed = product_state_fidelities(&psis, &phis)?;
        let big = psis
            .iter()
            .chain(&phis)
            .skip(1)
            .fold(psis[0].clone(), |acc, v| kron_vec(&acc, v));
        let sigma = ComplexOperator::outer(&big)?.reshaped(vec![d; 2 * k])?;
        for (rank, (p, _)) in family.iter().enumerate() {
            let dense = sigma.trace_product(p)?.re;
            worst = worst.max((dense - closed.pi()[rank]).abs());
        }
        let verdict = sep_bound_check(&closed, 0.0)?;
        for (x, bound) in closed.pi().iter().zip(&verdict.bounds) {
            worst = worst.max(x - bound);
        }
    }
    let name = match field {
        Field::Real => "product_fidelities_real",
        Field::Complex => "product_fidelities_complex",
    };
    Ok(VerificationReport::new(name, d, k, worst, PRODUCT_TOL).sampled(trials, seed))
}

/// Gram determinant of `{Q̃⁰, Q̃¹, P̃⁰, P̃¹}` and the identity `Q⁰ + Q¹ = P⁰ + P¹`.
pub fn verify_coplanarity(d: usize) -> Result<VerificationReport> {
    let b = BipartiteBasis::new(d)?;
    let states: Vec<ComplexOperator> = [&b.q0, &b.q1, &b.p0, &b.p1]
        .iter()
        .map(|x| x.scaled(1.0 / x.trace().re))
        .collect();
    let mut gram = nalgebra::Matrix4::<f64>::zeros();
    for i in 0..4 {
        for j in 0..4 {
            gram[(i, j)] = states[i].trace_product(&states[j])?.re;
        }
    }
    let det = gram.determinant().abs();
    let dependence = (&(&b.q0 + &b.q1) - &(&b.p0 + &b.p1)).max_abs();
    Ok(VerificationReport::new(
        "coplanarity",
        d,
        1,
        det.max(dependence),
        COPLANARITY_TOL,
    ))
}

/// Dense partial trace over `{i, K+i}` then twirl, against [`simplex::reduce`].
pub fn verify_reduction(
    d: usize,
    k: usize,
    samples: usize,
    seed: u64,
) -> Result<VerificationReport> {
    let family = ProjectorFamily::new(d, k)?;
    let mut next = seeds(seed);
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let f = FidelityVector::random(d, k, next())?;
        let rho = dense_state(&family, f.pi())?;
        for pair in 0..k {
            let traced = partial_trace(&rho, &SubsystemSet::new([pair, k + pair])?)?;
            let dense = twirl_coords(&traced, d, k - 1)?;
            worst = worst.max(dense.max_abs_diff(&simplex::reduce(&f, pair)?));
        }
    }
    Ok(VerificationReport::new("reduction", d, k, worst, REDUCTION_TOL).sampled(samples, seed))
}

/// [`pair_vertex_coords`] against the twirl of the dense normalized generators,
/// and the two parametrizations of [`simplex::intersection_point`].
pub fn verify_vertex_coords(d: usize) -> Result<VerificationReport> {
    let b = BipartiteBasis::new(d)?;
    let mut worst = 0.0f64;
    for (family, index, op) in [
        (HullFamily::Werner, 0, &b.q0),
        (HullFamily::Werner, 1, &b.q1),
        (HullFamily::Isotropic, 0, &b.p0),
        (HullFamily::Isotropic, 1, &b.p1),
    ] {
        let twirled = twirl_coords(&op.scaled(1.0 / op.trace().re), d, 1)?;
        let coords = pair_vertex_coords(d, family, index)?;
        for (x, y) in twirled.pi().iter().zip(&coords) {
            worst = worst.max((x - y).abs());
        }
    }
    let pt = simplex::intersection_point(d)?;
    for (x, y) in pt.coords.iter().zip(&pt.coords_isotropic) {
        worst = worst.max((x - y).abs());
    }
    Ok(VerificationReport::new(
        "vertex_coords",
        d,
        1,
        worst,
        VERTEX_TOL,
    ))
}

/// Every check that fits `(d, K)`, with the given sample counts.
pub fn run_case(d: usize, k: usize, samples: usize, seed: u64) -> Result<Vec<VerificationReport>> {
    let mut reports = Vec::new();
    if k == 1 {
        reports.push(verify_c_matrix(d)?);
        reports.push(verify_coplanarity(d)?);
        reports.push(verify_vertex_coords(d)?);
    }
    reports.push(verify_resolution(d, k)?);
    reports.push(verify_invariance(d, k, samples, seed)?);
    reports.extend(verify_pt_consistency(d, k, samples, seed)?);
    reports.push(verify_product_fidelities(d, k, Field::Real, samples, seed)?);
    reports.push(verify_product_fidelities(
        d,
        k,
        Field::Complex,
        samples,
        seed,
    )?);
    if k >= 2 {
        reports.push(verify_reduction(d, k, samples, seed)?);
    }
    Ok(reports)
}

/// Cases run when no `(d, K)` is requested.
pub const DEFAULT_CASES: [(usize, usize); 3] = [(2, 1), (2, 2), (3, 1)];

/// Samples per randomized check in the default suite.
pub const DEFAULT_SAMPLES: usize = 100;

pub fn run_suite(
    cases: &[(usize, usize)],
    samples: usize,
    seed: u64,
) -> Result<Vec<VerificationReport>> {
    let mut reports = Vec::new();
    for &(d, k) in cases {
        reports.extend(run_case(d, k, samples, seed)?);
    }
    Ok(reports)
}

/// First failing report, if any.
pub fn first_failure(reports: &[VerificationReport]) -> Option<&VerificationReport> {
    reports.iter().find(|r| !r.pass)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn c_matrix_reproduced() {
        for d in 2..=3 {
            let r = verify_c_matrix(d).unwrap();
            assert!(r.max_residual <= 1e-13, "{r}");
        }
        assert!(verify_c_matrix(4).unwrap().pass);
    }

    #[test]
    fn resolution_small_cases() {
        for (d, k) in [(2, 1), (2, 2), (3, 1)] {
            assert!(verify_resolution(d, k).unwrap().pass);
        }
    }

    #[test]
    fn invariance_and_vacuous_case() {
        let r = verify_invariance(3, 1, 100, DEFAULT_SEED).unwrap();
        assert!(r.pass, "{r}");
        let r = verify_invariance(2, 2, 50, DEFAULT_SEED).unwrap();
        assert!(r.pass, "{r}");
        let r = verify_invariance(2, 1, 0, DEFAULT_SEED).unwrap();
        assert!(r.pass);
        assert_eq!(r.note.as_deref(), Some("no samples"));
    }

    #[test]
    fn pt_consistency_cases() {
        let reports = verify_pt_consistency(2, 1, 100, 1).unwrap();
        assert_eq!(reports.len(), 1);
        assert!(reports[0].max_residual <= 1e-12);
        let r = verify_pt_consistency_mask(2, 2, &"11".parse().unwrap(), 50, 2).unwrap();
        assert!(r.pass, "{r}");
    }

    #[test]
    fn pt_consistency_on_vertex() {
        let family = ProjectorFamily::new(2, 2).unwrap();
        let f = FidelityVector::vertex(2, &"00".parse().unwrap()).unwrap();
        let rho = dense_state(&family, f.pi()).unwrap();
        for mask in TranspositionMask::nonzero(2) {
            let subs = SubsystemSet::new(mask.bob_subsystems()).unwrap();
            let dense = partial_transpose(&rho, &subs).unwrap();
            let coords = dense_state(&family, pt_map(&f, &mask).unwrap().pi()).unwrap();
            assert!(dense.max_abs_diff(&coords).unwrap() <= 1e-13);
        }
    }

    #[test]
    fn product_fidelities_cases() {
        let r = verify_product_fidelities(2, 1, Field::Real, 50, 3).unwrap();
        assert!(r.max_residual <= 1e-13, "{r}");
        let r = verify_product_fidelities(3, 1, Field::Complex, 50, 3).unwrap();
        assert!(r.max_residual <= 1e-13, "{r}");
    }

    #[test]
    fn coplanarity_cases() {
        assert!(verify_coplanarity(2).unwrap().max_residual <= 1e-14);
        assert!(verify_coplanarity(3).unwrap().pass);
    }

    #[test]
    fn reduction_case() {
        assert!(verify_reduction(2, 2, 20, 4).unwrap().pass);
    }

    #[test]
    fn reports_are_deterministic() {
        let a = run_case(2, 1, 10, 99).unwrap();
        let b = run_case(2, 1, 10, 99).unwrap();
        assert_eq!(a, b);
        assert!(first_failure(&a).is_none());
    }

    #[test]
    fn failing_report_is_located() {
        let mut reports = run_case(2, 1, 2, 5).unwrap();
        reports[1].pass = false;
        assert_eq!(first_failure(&reports).unwrap().check, reports[1].check);
        let shown = VerificationReport::new("x", 2, 1, 1.0, 0.5).to_string();
        assert!(shown.starts_with("FAIL x (d=2, K=1)"));
    }
}

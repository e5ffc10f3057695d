//! Numerical certification: map positivity sampling, block-positivity by
//! see-saw, PPT tests, detection and decomposition certificates.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    hermitian_eig, partial_transpose, project_psd, trace_product, BipartiteOperator, ComplexMatrix,
};
use crate::random::{self, substream};
use crate::witness::{apply_phi0, apply_phi_alpha, apply_phi_tilde_with, WitnessSpec};

/// PSD and unit-trace tolerance for states.
pub const STATE_TOL: f64 = 1e-9;
/// See-saw defaults: restarts, alternations, convergence threshold.
pub const SEESAW_RESTARTS: usize = 32;
pub const SEESAW_ITERS: usize = 500;
pub const SEESAW_CONVERGENCE: f64 = 1e-12;

const CHUNKS: u64 = 16;

/// Splits `samples` into fixed chunks with their own generators, so the
/// result depends only on (seed, samples).
fn sample_chunks(samples: usize, seed: u64) -> Vec<(usize, random::Rng)> {
    let chunks = CHUNKS.min(samples as u64).max(1);
    (0..chunks)
        .map(|c| {
            let lo = samples * c as usize / chunks as usize;
            let hi = samples * (c as usize + 1) / chunks as usize;
            (hi - lo, substream(seed, c))
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct PositivityReport {
    pub samples: usize,
    pub seed: u64,
    /// max Tr(Φ[P]²) over the samples
    pub max_purity: f64,
    /// 1/(d−1) + 1e−9
    pub threshold: f64,
    /// max Tr(Φ̃[P]²) with Φ̃ = (dκ−1)Φ
    pub max_unnormalised: f64,
    /// (dκ−1)²/(d−1)
    pub unnormalised_bound: f64,
    pub pass: bool,
}

/// Samples Haar-random rank-one P and checks Tr(Φ[P]²) ≤ 1/(d−1).
pub fn check_positivity_condition(spec: &WitnessSpec, samples: usize, seed: u64) -> Result<PositivityReport> {
    if samples == 0 {
        return Err(Error::InvalidSpec("need at least one sample".into()));
    }
    let d = spec.dim();
    let family = spec.mums();
    let norm = spec.normalisation();
    let worst = sample_chunks(samples, seed)
        .into_par_iter()
        .map(|(count, mut rng)| -> Result<f64> {
            let mut m: f64 = 0.0;
            for _ in 0..count {
                let p = random::haar_projector(d, &mut rng);
                let y = apply_phi_tilde_with(spec, &family, &p)?;
                m = m.max(trace_product(&y, &y).re);
            }
            Ok(m)
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    let threshold = 1.0 / (d as f64 - 1.0) + 1e-9;
    let max_purity = worst / (norm * norm);
    Ok(PositivityReport {
        samples,
        seed,
        max_purity,
        threshold,
        max_unnormalised: worst,
        unnormalised_bound: norm * norm / (d as f64 - 1.0),
        pass: max_purity <= threshold,
    })
}

/// Worst deviations of the trace identities used in the positivity argument.
#[derive(Debug, Clone, Serialize)]
pub struct TraceIdentityReport {
    pub samples: usize,
    /// max |Tr(Φ₀[P]²) − 1/d|, |Tr(Φ₀[P]Φ_α[P]) − 1/d|, |Tr(Φ_α[P]Φ_β[P]) − 1/d| (α≠β)
    pub cross_terms: f64,
    /// max |Tr(Φ_α[P]²) − (1−κ)/(d−1) − (dκ−1)/(d−1) Σ_m Tr(P_m P)²|
    pub diagonal_terms: f64,
    /// max of Σ_α Σ_k Tr(P_k P)² − ((N−1)/d + κ); must be ≤ 0 up to tolerance
    pub overlap_excess: f64,
}

pub fn check_trace_identities(spec: &WitnessSpec, samples: usize, seed: u64) -> Result<TraceIdentityReport> {
    let d = spec.dim();
    let df = d as f64;
    let kappa = spec.kappa();
    let family = spec.mums();
    let n = spec.n();
    let parts = sample_chunks(samples, seed)
        .into_par_iter()
        .map(|(count, mut rng)| -> Result<(f64, f64, f64)> {
            let (mut cross, mut diag, mut excess) = (0.0f64, 0.0f64, f64::NEG_INFINITY);
            for _ in 0..count {
                let p = random::haar_projector(d, &mut rng);
                let phi0 = apply_phi0(&p);
                let outs: Vec<ComplexMatrix> = spec
                    .rotations()
                    .iter()
                    .enumerate()
                    .map(|(i, o)| apply_phi_alpha(&family, i + 1, o, &p))
                    .collect::<Result<_>>()?;
                cross = cross.max((trace_product(&phi0, &phi0).re - 1.0 / df).abs());
                let mut total = 0.0;
                for (a, oa) in outs.iter().enumerate() {
                    cross = cross.max((trace_product(&phi0, oa).re - 1.0 / df).abs());
                    for ob in outs.iter().skip(a + 1) {
                        cross = cross.max((trace_product(oa, ob).re - 1.0 / df).abs());
                    }
                    let s: f64 = family
                        .measurement(a + 1)
                        .iter()
                        .map(|pm| trace_product(pm, &p).re.powi(2))
                        .sum();
                    total += s;
                    let expected = (1.0 - kappa) / (df - 1.0) + (df * kappa - 1.0) / (df - 1.0) * s;
                    diag = diag.max((trace_product(oa, oa).re - expected).abs());
                }
                let bound = (n as f64 - 1.0) / df + kappa;
                if n > 0 {
                    excess = excess.max(total - bound);
                }
            }
            Ok((cross, diag, excess))
        })
        .collect::<Result<Vec<_>>>()?;
    let (cross, diag, excess) = parts.into_iter().fold(
        (0.0f64, 0.0f64, f64::NEG_INFINITY),
        |(a, b, c), (x, y, z)| (a.max(x), b.max(y), c.max(z)),
    );
    Ok(TraceIdentityReport {
        samples,
        cross_terms: cross,
        diagonal_terms: diag,
        overlap_excess: excess,
    })
}

/// Result of a see-saw search over product vectors.
#[derive(Debug, Clone)]
pub struct SeeSawResult {
    /// Smallest ⟨ψ⊗φ|W|ψ⊗φ⟩ found; an upper bound on the true minimum.
    pub value: f64,
    pub psi: Vec<Complex64>,
    pub phi: Vec<Complex64>,
}

/// (I ⊗ ⟨φ|) W (I ⊗ |φ⟩).
fn contract_second(w: &ComplexMatrix, d: usize, phi: &[Complex64]) -> ComplexMatrix {
    ComplexMatrix::from_fn(d, d, |i, j| {
        let mut acc = Complex64::new(0.0, 0.0);
        for k in 0..d {
            for l in 0..d {
                acc += phi[k].conj() * w.get(i * d + k, j * d + l) * phi[l];
            }
        }
        acc
    })
}

/// (⟨ψ| ⊗ I) W (|ψ⟩ ⊗ I).
fn contract_first(w: &ComplexMatrix, d: usize, psi: &[Complex64]) -> ComplexMatrix {
    ComplexMatrix::from_fn(d, d, |k, l| {
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..d {
            for j in 0..d {
                acc += psi[i].conj() * w.get(i * d + k, j * d + l) * psi[j];
            }
        }
        acc
    })
}

fn lowest(m: &ComplexMatrix) -> (f64, Vec<Complex64>) {
    let eig = hermitian_eig(m).expect("contractions of a Hermitian operator are Hermitian");
    (eig.min(), eig.eigenvectors.column(0))
}

fn seesaw_run(w: &ComplexMatrix, d: usize, iters: usize, rng: &mut random::Rng) -> SeeSawResult {
    let mut phi = random::haar_vector(d, rng);
    let mut psi = random::haar_vector(d, rng);
    let mut value = f64::INFINITY;
    for _ in 0..iters {
        let (_, p) = lowest(&contract_second(w, d, &phi));
        psi = p;
        let (v, f) = lowest(&contract_first(w, d, &psi));
        phi = f;
        let done = (value - v).abs() < SEESAW_CONVERGENCE;
        value = v;
        if done {
            break;
        }
    }
    SeeSawResult { value, psi, phi }
}

/// Multi-start alternating minimisation of ⟨ψ⊗φ|W|ψ⊗φ⟩.
pub fn block_positivity_search(w: &BipartiteOperator, restarts: usize, iters: usize, seed: u64) -> Result<SeeSawResult> {
    let m = w.matrix();
    let residual = m.hermiticity_residual();
    if residual > 1e-10 * m.max_abs().max(1.0) {
        return Err(Error::NotHermitian { residual });
    }
    let d = w.dim();
    let runs: Vec<SeeSawResult> = (0..restarts.max(1) as u64)
        .into_par_iter()
        .map(|r| seesaw_run(m, d, iters.max(1), &mut substream(seed, r)))
        .collect();
    Ok(runs
        .into_iter()
        .reduce(|a, b| if b.value < a.value { b } else { a })
        .expect("at least one restart"))
}

/// Smallest product-state expectation found by the see-saw search.
pub fn block_positivity_min(w: &BipartiteOperator, restarts: usize, iters: usize, seed: u64) -> Result<f64> {
    Ok(block_positivity_search(w, restarts, iters, seed)?.value)
}

/// Minimum eigenvalue of ρ^Γ is at least −tol.
pub fn is_ppt(rho: &BipartiteOperator, tol: f64) -> Result<bool> {
    Ok(partial_transpose(rho).min_eigenvalue()? >= -tol)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    #[serde(rename = "detected-PPT-entangled", alias = "detected-ppt-entangled")]
    DetectedPptEntangled,
    #[serde(rename = "detected-NPT", alias = "detected-npt")]
    DetectedNpt,
    NotDetected,
    InvalidState,
}

#[derive(Debug, Clone, Serialize)]
pub struct DetectionResult {
    /// Tr(W ρ)
    pub expectation: f64,
    pub ppt: bool,
    pub psd: bool,
    pub trace: f64,
    pub verdict: Verdict,
}

pub fn detect(w: &BipartiteOperator, rho: &BipartiteOperator, tol: f64) -> Result<DetectionResult> {
    if w.dim() != rho.dim() {
        return Err(Error::DimensionMismatch(format!(
            "witness acts on d = {}, state on d = {}",
            w.dim(),
            rho.dim()
        )));
    }
    let herm = rho.matrix().hermiticity_residual();
    let trace = rho.trace();
    let psd = herm <= tol && rho.min_eigenvalue().map(|l| l >= -tol).unwrap_or(false);
    let ppt = herm <= tol && is_ppt(rho, tol).unwrap_or(false);
    let expectation = w.expectation(rho);
    let valid = psd && (trace - 1.0).abs() <= tol;
    let verdict = if !valid {
        Verdict::InvalidState
    } else if expectation < -tol {
        if ppt {
            Verdict::DetectedPptEntangled
        } else {
            Verdict::DetectedNpt
        }
    } else {
        Verdict::NotDetected
    };
    Ok(DetectionResult {
        expectation,
        ppt,
        psd,
        trace,
        verdict,
    })
}

/// Explicit W = A + B^Γ with A, B ⪰ 0.
#[derive(Debug, Clone, Serialize)]
pub struct DecompositionCertificate {
    pub a: BipartiteOperator,
    pub b: BipartiteOperator,
    /// ‖W − A − B^Γ‖_max
    pub residual: f64,
    pub min_eig_a: f64,
    pub min_eig_b: f64,
    pub tol: f64,
    pub valid: bool,
}

pub fn verify_decomposition(
    w: &BipartiteOperator,
    a: &BipartiteOperator,
    b: &BipartiteOperator,
    tol: f64,
) -> Result<DecompositionCertificate> {
    if w.dim() != a.dim() || w.dim() != b.dim() {
        return Err(Error::DimensionMismatch("W, A and B must share d".into()));
    }
    let recon = a + &partial_transpose(b);
    let residual = w.max_abs_diff(&recon);
    let min_eig_a = a.min_eigenvalue()?;
    let min_eig_b = b.min_eigenvalue()?;
    Ok(DecompositionCertificate {
        a: a.clone(),
        b: b.clone(),
        residual,
        min_eig_a,
        min_eig_b,
        tol,
        valid: residual <= tol && min_eig_a >= -tol && min_eig_b >= -tol,
    })
}

/// Alternating projections between {A + B^Γ = W} and the pair of PSD cones.
///
/// Returns a certificate only when one is found within `iters` rounds.
/// A `None` result says nothing about indecomposability.
pub fn search_decomposition(w: &BipartiteOperator, iters: usize, tol: f64) -> Result<Option<DecompositionCertificate>> {
    let d = w.dim();
    let m = w.matrix();
    let residual = m.hermiticity_residual();
    if residual > 1e-10 * m.max_abs().max(1.0) {
        return Err(Error::NotHermitian { residual });
    }
    let pt = |x: &ComplexMatrix| partial_transpose(&BipartiteOperator::new(x.clone(), d).expect("d² side")).into_matrix();
    let try_certificate = |b: &ComplexMatrix| -> Result<Option<DecompositionCertificate>> {
        // A is defined to close the identity exactly; only its spectrum is in question.
        let b = project_psd(b)?;
        let a = m - &pt(&b);
        let cert = verify_decomposition(
            w,
            &BipartiteOperator::new(a, d)?,
            &BipartiteOperator::new(b, d)?,
            tol,
        )?;
        Ok(cert.valid.then_some(cert))
    };
    let mut a = project_psd(m)?;
    let mut b = project_psd(&pt(&(m - &a)))?;
    for it in 0..iters {
        let r = &(m - &a) - &pt(&b);
        let half = r.scale(0.5);
        a = project_psd(&(&a + &half))?;
        b = project_psd(&(&b + &pt(&half)))?;
        if it % 8 == 0 || it + 1 == iters {
            if let Some(c) = try_certificate(&b)? {
                return Ok(Some(c));
            }
            let b_alt = pt(&(m - &a));
            if let Some(c) = try_certificate(&b_alt)? {
                return Ok(Some(c));
            }
        }
    }
    Ok(None)
}

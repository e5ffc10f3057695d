//! Mutually unbiased measurement families P_k^{(α)} = I/d + t F_k^{(α)}.

use serde::{Deserialize, Serialize};

use crate::basis::HermitianBasis;
use crate::error::{Error, Result};
use crate::linalg::{min_eigenvalue, trace_product, ComplexMatrix};

/// κ as a function of t: κ = 1/d + (d−1) t² (1+√d)².
pub fn t_to_kappa(d: usize, t: f64) -> f64 {
    let s = (d as f64).sqrt();
    1.0 / d as f64 + (d as f64 - 1.0) * t * t * (1.0 + s).powi(2)
}

/// Positive root of the κ ↔ t relation. κ must exceed 1/d.
pub fn kappa_to_t(d: usize, kappa: f64) -> Result<f64> {
    let floor = 1.0 / d as f64;
    if kappa.is_nan() || kappa <= floor {
        return Err(Error::KappaOutOfRange {
            kappa,
            reason: format!("need kappa > 1/d = {floor}"),
        });
    }
    let s = (d as f64).sqrt();
    Ok(((kappa - floor) / ((d as f64 - 1.0) * (1.0 + s).powi(2))).sqrt())
}

/// The traceless operators F_k^{(α)} derived from a basis; `ops[α-1][k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct FOperators {
    dim: usize,
    ops: Vec<Vec<ComplexMatrix>>,
}

impl FOperators {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// F_k^{(α)}, α ∈ 1..=d+1, k ∈ 0..d.
    pub fn get(&self, alpha: usize, k: usize) -> &ComplexMatrix {
        &self.ops[alpha - 1][k]
    }

    pub fn group(&self, alpha: usize) -> &[ComplexMatrix] {
        &self.ops[alpha - 1]
    }

    pub fn iter(&self) -> impl Iterator<Item = &ComplexMatrix> {
        self.ops.iter().flatten()
    }
}

/// F_0 = (√d+1) Σ_l G_{α,l}; F_k = Σ_l G_{α,l} − √d(√d+1) G_{α,k}.
pub fn build_f(basis: &HermitianBasis) -> FOperators {
    let d = basis.dim();
    let s = (d as f64).sqrt();
    let ops = (1..=d + 1)
        .map(|alpha| {
            let group = basis.group(alpha);
            let sum = group
                .iter()
                .skip(1)
                .fold(group[0].clone(), |acc, g| &acc + g);
            let mut f = Vec::with_capacity(d);
            f.push(sum.scale(s + 1.0));
            for g in group {
                f.push(&sum - &g.scale(s * (s + 1.0)));
            }
            f
        })
        .collect();
    FOperators { dim: d, ops }
}

/// N measurements of d outcomes each.
#[derive(Debug, Clone, PartialEq)]
pub struct MumFamily {
    dim: usize,
    operators: Vec<Vec<ComplexMatrix>>,
    kappa: f64,
    t: f64,
    positivity_enforced: bool,
}

impl MumFamily {
    /// Wraps operators `operators[α-1][k]` without checks; see [`verify_mum`].
    pub fn from_operators(
        dim: usize,
        operators: Vec<Vec<ComplexMatrix>>,
        kappa: f64,
        t: f64,
        positivity_enforced: bool,
    ) -> Self {
        Self {
            dim,
            operators,
            kappa,
            t,
            positivity_enforced,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of measurements N.
    pub fn n(&self) -> usize {
        self.operators.len()
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn positivity_enforced(&self) -> bool {
        self.positivity_enforced
    }

    /// P_k^{(α)}, α ∈ 1..=N, k ∈ 0..d.
    pub fn p(&self, alpha: usize, k: usize) -> &ComplexMatrix {
        &self.operators[alpha - 1][k]
    }

    pub fn measurement(&self, alpha: usize) -> &[ComplexMatrix] {
        &self.operators[alpha - 1]
    }

    /// Keeps only the listed measurements, in the given order.
    pub fn select(&self, alphas: &[usize]) -> Self {
        Self {
            operators: alphas.iter().map(|&a| self.operators[a - 1].clone()).collect(),
            ..self.clone()
        }
    }

    pub fn to_file(&self) -> MumFile {
        let mut operators = Vec::new();
        for (a, m) in self.operators.iter().enumerate() {
            for (k, p) in m.iter().enumerate() {
                operators.push(MumEntry {
                    alpha: a + 1,
                    k,
                    matrix: p.clone(),
                });
            }
        }
        MumFile {
            dim: self.dim,
            n: self.n(),
            kappa: self.kappa,
            t: self.t,
            positivity_enforced: self.positivity_enforced,
            operators,
        }
    }

    pub fn from_file(file: MumFile) -> Result<Self> {
        let d = file.dim;
        let mut slots: Vec<Vec<Option<ComplexMatrix>>> = vec![vec![None; d]; file.n];
        for e in file.operators {
            if e.alpha == 0 || e.alpha > file.n || e.k >= d {
                return Err(Error::InvalidFamily(format!(
                    "index (alpha={}, k={}) out of range",
                    e.alpha, e.k
                )));
            }
            slots[e.alpha - 1][e.k] = Some(e.matrix);
        }
        let operators = slots
            .into_iter()
            .map(|m| {
                m.into_iter()
                    .collect::<Option<Vec<_>>>()
                    .ok_or_else(|| Error::InvalidFamily("missing operator".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_operators(
            d,
            operators,
            file.kappa,
            file.t,
            file.positivity_enforced,
        ))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MumFile {
    pub dim: usize,
    pub n: usize,
    pub kappa: f64,
    pub t: f64,
    pub positivity_enforced: bool,
    pub operators: Vec<MumEntry>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MumEntry {
    pub alpha: usize,
    pub k: usize,
    pub matrix: ComplexMatrix,
}

/// Largest κ for which every I/d + tF stays PSD. P is linear in t, so the
/// bound is t_max = min 1/(d|λ_min(F)|).
pub fn kappa_opt(basis: &HermitianBasis) -> f64 {
    let f = build_f(basis);
    kappa_opt_from_f(&f)
}

pub fn kappa_opt_from_f(f: &FOperators) -> f64 {
    let d = f.dim();
    let t_max = f
        .iter()
        .map(|op| min_eigenvalue(op).expect("F operators are Hermitian"))
        .filter(|&l| l < 0.0)
        .map(|l| 1.0 / (d as f64 * l.abs()))
        .fold(f64::INFINITY, f64::min);
    t_to_kappa(d, t_max).min(1.0)
}

/// Builds α = 1..=N. With `enforce_positivity`, κ may not exceed κ_opt.
pub fn build_mums(
    basis: &HermitianBasis,
    kappa: f64,
    n: usize,
    enforce_positivity: bool,
) -> Result<MumFamily> {
    let d = basis.dim();
    if n == 0 || n > d + 1 {
        return Err(Error::InvalidSpec(format!(
            "number of measurements N = {n} must lie in 1..={}",
            d + 1
        )));
    }
    let t = kappa_to_t(d, kappa)?;
    let f = build_f(basis);
    if enforce_positivity {
        let opt = kappa_opt_from_f(&f);
        if kappa > opt + 1e-12 {
            return Err(Error::KappaOutOfRange {
                kappa,
                reason: format!("exceeds kappa_opt = {opt} while positivity is enforced"),
            });
        }
    }
    let id_d = ComplexMatrix::identity(d).scale(1.0 / d as f64);
    let operators = (1..=n)
        .map(|alpha| f.group(alpha).iter().map(|op| &id_d + &op.scale(t)).collect())
        .collect();
    Ok(MumFamily::from_operators(d, operators, kappa, t, enforce_positivity))
}

/// Deviations of a family from its defining relations.
#[derive(Debug, Clone, Serialize)]
pub struct MumReport {
    pub dim: usize,
    pub n: usize,
    pub kappa: f64,
    /// max |Tr P − 1|
    pub unit_trace: f64,
    /// max ‖Σ_k P_k − I‖_max
    pub completeness: f64,
    /// max |Tr(P_k^α P_l^β) − expected|
    pub gram: f64,
    /// smallest eigenvalue over all operators, when requested
    pub min_eigenvalue: Option<f64>,
    pub tol: f64,
    pub pass: bool,
}

impl MumReport {
    pub fn worst(&self) -> f64 {
        self.unit_trace.max(self.completeness).max(self.gram)
    }
}

/// Expected Tr(P_k^α P_l^β) for a family with parameter κ.
pub fn expected_overlap(d: usize, kappa: f64, same_alpha: bool, same_k: bool) -> f64 {
    let df = d as f64;
    let mut v = 1.0 / df;
    if same_alpha {
        let delta = if same_k { 1.0 } else { 0.0 };
        v += (df * kappa - 1.0) / (df - 1.0) * (delta - 1.0 / df);
    }
    v
}

pub fn verify_mum(family: &MumFamily, tol: f64, check_positivity: bool) -> MumReport {
    let d = family.dim();
    let id = ComplexMatrix::identity(d);
    let mut unit_trace: f64 = 0.0;
    let mut completeness: f64 = 0.0;
    let mut gram: f64 = 0.0;
    for a in 1..=family.n() {
        let m = family.measurement(a);
        let sum = m.iter().skip(1).fold(m[0].clone(), |acc, p| &acc + p);
        completeness = completeness.max(sum.max_abs_diff(&id));
        for p in m {
            unit_trace = unit_trace.max((p.trace().re - 1.0).abs().max(p.trace().im.abs()));
        }
        for b in 1..=family.n() {
            for (k, p) in m.iter().enumerate() {
                for (l, q) in family.measurement(b).iter().enumerate() {
                    let v = trace_product(p, q);
                    let e = expected_overlap(d, family.kappa(), a == b, k == l);
                    gram = gram.max((v.re - e).abs().max(v.im.abs()));
                }
            }
        }
    }
    let min_eig = check_positivity.then(|| {
        (1..=family.n())
            .flat_map(|a| family.measurement(a).iter())
            .map(|p| min_eigenvalue(p).unwrap_or(f64::NEG_INFINITY))
            .fold(f64::INFINITY, f64::min)
    });
    let positive = min_eig.is_none_or(|l| l >= -tol);
    MumReport {
        dim: d,
        n: family.n(),
        kappa: family.kappa(),
        unit_trace,
        completeness,
        gram,
        min_eigenvalue: min_eig,
        tol,
        pass: unit_trace <= tol && completeness <= tol && gram <= tol && positive,
    }
}

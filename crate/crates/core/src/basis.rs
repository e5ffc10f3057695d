//! Orthonormal Hermitian operator bases {I/√d, G_{α,k}}.
//!
//! Traceless elements are grouped by measurement index α ∈ 1..=d+1 with
//! d−1 elements per group (k ∈ 1..=d−1). Group α feeds measurement α.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c, trace_inner, ComplexMatrix, DEFAULT_TOL, I, ONE, ZERO};
use crate::mum::{kappa_to_t, MumFamily};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BasisLabel {
    #[serde(rename = "gellmann")]
    GellMann,
    /// Gell-Mann off-diagonals with diagonals shifted towards |0⟩⟨0|.
    #[serde(rename = "appendix-b", alias = "shifted-diagonal")]
    ShiftedDiagonal,
    #[serde(rename = "mub-derived", alias = "mub")]
    MubDerived,
    #[serde(rename = "custom")]
    Custom,
}

impl fmt::Display for BasisLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BasisLabel::GellMann => "gellmann",
            BasisLabel::ShiftedDiagonal => "appendix-b",
            BasisLabel::MubDerived => "mub-derived",
            BasisLabel::Custom => "custom",
        })
    }
}

impl FromStr for BasisLabel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gellmann" | "gell-mann" => Ok(BasisLabel::GellMann),
            "appendix-b" | "shifted-diagonal" => Ok(BasisLabel::ShiftedDiagonal),
            "mub" | "mub-derived" => Ok(BasisLabel::MubDerived),
            "custom" => Ok(BasisLabel::Custom),
            other => Err(Error::Parse(format!(
                "unknown basis '{other}' (expected gellmann, appendix-b, mub)"
            ))),
        }
    }
}

/// Orthonormal Hermitian basis {g0 = I/√d} ∪ {G_{α,k}}.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianBasis {
    dim: usize,
    label: BasisLabel,
    g0: ComplexMatrix,
    // grouped[α-1][k-1]
    grouped: Vec<Vec<ComplexMatrix>>,
}

impl HermitianBasis {
    /// Assembles a basis without validating it. Use [`HermitianBasis::validated`]
    /// for untrusted input.
    pub fn from_parts(
        dim: usize,
        label: BasisLabel,
        g0: ComplexMatrix,
        grouped: Vec<Vec<ComplexMatrix>>,
    ) -> Self {
        Self {
            dim,
            label,
            g0,
            grouped,
        }
    }

    /// Assembles a basis and checks shapes, hermiticity, tracelessness and
    /// orthonormality to `tol`.
    pub fn validated(
        dim: usize,
        label: BasisLabel,
        g0: ComplexMatrix,
        grouped: Vec<Vec<ComplexMatrix>>,
        tol: f64,
    ) -> Result<Self> {
        if dim < 2 {
            return Err(Error::DimensionTooSmall(dim));
        }
        if grouped.len() != dim + 1 || grouped.iter().any(|g| g.len() != dim - 1) {
            return Err(Error::InvalidBasis(format!(
                "expected {} groups of {} operators",
                dim + 1,
                dim - 1
            )));
        }
        let all_square = std::iter::once(&g0)
            .chain(grouped.iter().flatten())
            .all(|m| m.rows() == dim && m.cols() == dim);
        if !all_square {
            return Err(Error::InvalidBasis(format!("every operator must be {dim}x{dim}")));
        }
        let basis = Self::from_parts(dim, label, g0, grouped);
        let report = verify_orthonormal(&basis, tol);
        if !report.pass {
            return Err(Error::InvalidBasis(format!(
                "Gram deviation {:.3e}, trace {:.3e}, hermiticity {:.3e} (tol {tol:.1e})",
                report.max_gram_deviation, report.max_trace, report.hermiticity_residual
            )));
        }
        Ok(basis)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn label(&self) -> BasisLabel {
        self.label
    }

    pub fn g0(&self) -> &ComplexMatrix {
        &self.g0
    }

    /// G_{α,k} with α ∈ 1..=d+1 and k ∈ 1..=d−1.
    pub fn g(&self, alpha: usize, k: usize) -> &ComplexMatrix {
        &self.grouped[alpha - 1][k - 1]
    }

    /// The d−1 operators of group α.
    pub fn group(&self, alpha: usize) -> &[ComplexMatrix] {
        &self.grouped[alpha - 1]
    }

    /// Flat index μ: 0 ↦ g0, (α,k) ↦ (α−1)(d−1)+k.
    pub fn flat(&self, mu: usize) -> &ComplexMatrix {
        if mu == 0 {
            &self.g0
        } else {
            let m = mu - 1;
            &self.grouped[m / (self.dim - 1)][m % (self.dim - 1)]
        }
    }

    pub fn flat_index(&self, alpha: usize, k: usize) -> usize {
        (alpha - 1) * (self.dim - 1) + k
    }

    /// All d² operators in flat order.
    pub fn flat_iter(&self) -> impl Iterator<Item = &ComplexMatrix> {
        std::iter::once(&self.g0).chain(self.grouped.iter().flatten())
    }

    pub fn len(&self) -> usize {
        self.dim * self.dim
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn to_file(&self) -> BasisFile {
        let mut grouped = Vec::new();
        for (a, group) in self.grouped.iter().enumerate() {
            for (k, m) in group.iter().enumerate() {
                grouped.push(GroupedEntry {
                    alpha: a + 1,
                    k: k + 1,
                    matrix: m.clone(),
                });
            }
        }
        BasisFile {
            dim: self.dim,
            label: self.label,
            g0: self.g0.clone(),
            grouped,
        }
    }

    /// Loads and validates a basis read from JSON.
    pub fn from_file(file: BasisFile, tol: f64) -> Result<Self> {
        let d = file.dim;
        if d < 2 {
            return Err(Error::DimensionTooSmall(d));
        }
        let mut slots: Vec<Vec<Option<ComplexMatrix>>> = vec![vec![None; d - 1]; d + 1];
        for e in file.grouped {
            if e.alpha == 0 || e.alpha > d + 1 || e.k == 0 || e.k > d - 1 {
                return Err(Error::InvalidBasis(format!(
                    "index (alpha={}, k={}) out of range",
                    e.alpha, e.k
                )));
            }
            let slot = &mut slots[e.alpha - 1][e.k - 1];
            if slot.is_some() {
                return Err(Error::InvalidBasis(format!(
                    "duplicate entry (alpha={}, k={})",
                    e.alpha, e.k
                )));
            }
            *slot = Some(e.matrix);
        }
        let grouped = slots
            .into_iter()
            .enumerate()
            .map(|(a, g)| {
                g.into_iter()
                    .enumerate()
                    .map(|(k, m)| {
                        m.ok_or_else(|| {
                            Error::InvalidBasis(format!("missing entry (alpha={}, k={})", a + 1, k + 1))
                        })
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::validated(d, file.label, file.g0, grouped, tol)
    }
}

impl Serialize for HermitianBasis {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_file().serialize(s)
    }
}

/// On-disk layout of a basis.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BasisFile {
    pub dim: usize,
    pub label: BasisLabel,
    pub g0: ComplexMatrix,
    pub grouped: Vec<GroupedEntry>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GroupedEntry {
    pub alpha: usize,
    pub k: usize,
    pub matrix: ComplexMatrix,
}

fn check_dim(d: usize) -> Result<()> {
    if d < 2 {
        Err(Error::DimensionTooSmall(d))
    } else {
        Ok(())
    }
}

fn identity_part(d: usize) -> ComplexMatrix {
    ComplexMatrix::identity(d).scale(1.0 / (d as f64).sqrt())
}

/// Generalised Gell-Mann matrix σ_{kl}: symmetric for k<l, antisymmetric
/// for k>l, diagonal for k=l (k ≥ 1).
pub fn gellmann_matrix(d: usize, k: usize, l: usize) -> ComplexMatrix {
    let r = 1.0 / 2f64.sqrt();
    if k < l {
        ComplexMatrix::from_fn(d, d, |i, j| {
            if (i, j) == (k, l) || (i, j) == (l, k) {
                c(r, 0.0)
            } else {
                ZERO
            }
        })
    } else if k > l {
        // σ_{lk} with l<k: (i/√2)(|l⟩⟨k| − |k⟩⟨l|)
        ComplexMatrix::from_fn(d, d, |i, j| {
            if (i, j) == (l, k) {
                I * r
            } else if (i, j) == (k, l) {
                -I * r
            } else {
                ZERO
            }
        })
    } else {
        assert!(k >= 1, "σ_00 is not part of the traceless set");
        let norm = (1.0 / (k * (k + 1)) as f64).sqrt();
        ComplexMatrix::from_fn(d, d, |i, j| {
            if i != j {
                ZERO
            } else if i < k {
                c(norm, 0.0)
            } else if i == k {
                c(-(k as f64) * norm, 0.0)
            } else {
                ZERO
            }
        })
    }
}

/// Off-diagonal groups shared by the Gell-Mann and shifted-diagonal bases:
/// group α ∈ 1..=d holds {σ_{k,α−1} | k ≠ α−1} in increasing k.
fn off_diagonal_groups(d: usize) -> Vec<Vec<ComplexMatrix>> {
    (1..=d)
        .map(|alpha| {
            (0..d)
                .filter(|&k| k != alpha - 1)
                .map(|k| gellmann_matrix(d, k, alpha - 1))
                .collect()
        })
        .collect()
}

pub fn gellmann_basis(d: usize) -> Result<HermitianBasis> {
    check_dim(d)?;
    let mut grouped = off_diagonal_groups(d);
    grouped.push((1..d).map(|k| gellmann_matrix(d, k, k)).collect());
    Ok(HermitianBasis::from_parts(
        d,
        BasisLabel::GellMann,
        identity_part(d),
        grouped,
    ))
}

/// Diagonal element σ′_{kk} = (I + √d|0⟩⟨0|)/(√d(√d+1)) − |k⟩⟨k| for k ≥ 1.
pub fn shifted_diagonal_matrix(d: usize, k: usize) -> ComplexMatrix {
    assert!(k >= 1 && k < d);
    let s = (d as f64).sqrt();
    let pref = 1.0 / (s * (s + 1.0));
    ComplexMatrix::from_real_fn(d, d, |i, j| {
        if i != j {
            return 0.0;
        }
        let mut v = pref;
        if i == 0 {
            v += pref * s;
        }
        if i == k {
            v -= 1.0;
        }
        v
    })
}

/// Gell-Mann off-diagonal operators with the diagonal group replaced by
/// the shifted operators σ′_{kk}. Under an identity-free permutation of
/// the last measurement, this basis yields closed-form witnesses in every d.
pub fn shifted_diagonal_basis(d: usize) -> Result<HermitianBasis> {
    check_dim(d)?;
    let mut grouped = off_diagonal_groups(d);
    grouped.push((1..d).map(|k| shifted_diagonal_matrix(d, k)).collect());
    Ok(HermitianBasis::from_parts(
        d,
        BasisLabel::ShiftedDiagonal,
        identity_part(d),
        grouped,
    ))
}

pub fn is_prime(n: usize) -> bool {
    if n < 2 {
        return false;
    }
    let mut i = 2;
    while i * i <= n {
        if n % i == 0 {
            return false;
        }
        i += 1;
    }
    true
}

/// d+1 mutually unbiased bases for prime d, as vectors `bases[α-1][k]`.
///
/// α = 1 is the computational basis. For odd d the remaining bases are
/// the quadratic-phase vectors ψ_k^{(s)}(j) = ω^{s j² + k j}/√d, s = 0..d−1.
/// For d = 2 they are the σ_x and σ_y eigenbases.
pub fn mub_vectors(d: usize) -> Result<Vec<Vec<Vec<num_complex::Complex64>>>> {
    check_dim(d)?;
    if !is_prime(d) {
        return Err(Error::NotPrime(d));
    }
    let mut bases = Vec::with_capacity(d + 1);
    bases.push(
        (0..d)
            .map(|k| (0..d).map(|j| if j == k { ONE } else { ZERO }).collect())
            .collect(),
    );
    let amp = 1.0 / (d as f64).sqrt();
    if d == 2 {
        for phase in [ONE, I] {
            bases.push(
                (0..2)
                    .map(|k| {
                        let sign = if k == 0 { 1.0 } else { -1.0 };
                        vec![c(amp, 0.0), phase * sign * amp]
                    })
                    .collect(),
            );
        }
    } else {
        let two_pi = 2.0 * std::f64::consts::PI;
        for s in 0..d {
            bases.push(
                (0..d)
                    .map(|k| {
                        (0..d)
                            .map(|j| {
                                let e = (s * j * j + k * j) % d;
                                num_complex::Complex64::from_polar(
                                    amp,
                                    two_pi * e as f64 / d as f64,
                                )
                            })
                            .collect()
                    })
                    .collect(),
            );
        }
    }
    Ok(bases)
}

/// Basis recovered from the rank-one MUB projectors at κ = 1.
pub fn mub_derived_basis(d: usize) -> Result<HermitianBasis> {
    let bases = mub_vectors(d)?;
    let operators: Vec<Vec<ComplexMatrix>> = bases
        .iter()
        .map(|b| b.iter().map(|v| ComplexMatrix::projector(v)).collect())
        .collect();
    let family = MumFamily::from_operators(d, operators, 1.0, kappa_to_t(d, 1.0)?, true);
    let mut basis = basis_from_mums(&family)?;
    basis.label = BasisLabel::MubDerived;
    Ok(basis)
}

/// Inverts P = I/d + tF and F ↔ G for a complete family of d+1 measurements.
pub fn basis_from_mums(family: &MumFamily) -> Result<HermitianBasis> {
    let d = family.dim();
    if family.n() != d + 1 {
        return Err(Error::InvalidFamily(format!(
            "need all {} measurements to recover a basis, got {}",
            d + 1,
            family.n()
        )));
    }
    let t = family.t();
    if t.abs() < 1e-14 {
        return Err(Error::Degenerate("t = 0 cannot be inverted".into()));
    }
    let report = crate::mum::verify_mum(family, 1e-8, false);
    if !report.pass {
        return Err(Error::InvalidFamily(format!(
            "trace relations violated by {:.3e}",
            report.worst()
        )));
    }
    let s = (d as f64).sqrt();
    let id_d = ComplexMatrix::identity(d).scale(1.0 / d as f64);
    let grouped = (1..=d + 1)
        .map(|alpha| {
            let f: Vec<ComplexMatrix> = (0..d)
                .map(|k| (family.p(alpha, k) - &id_d).scale(1.0 / t))
                .collect();
            let f0 = f[0].scale(1.0 / (s + 1.0));
            (1..d)
                .map(|k| (&f0 - &f[k]).scale(1.0 / (s * (s + 1.0))))
                .collect()
        })
        .collect();
    HermitianBasis::validated(d, BasisLabel::Custom, identity_part(d), grouped, 1e-8)
}

pub fn build_basis(label: BasisLabel, d: usize) -> Result<HermitianBasis> {
    match label {
        BasisLabel::GellMann => gellmann_basis(d),
        BasisLabel::ShiftedDiagonal => shifted_diagonal_basis(d),
        BasisLabel::MubDerived => mub_derived_basis(d),
        BasisLabel::Custom => Err(Error::InvalidBasis(
            "custom bases are loaded from a JSON file".into(),
        )),
    }
}

/// Orthonormality diagnostics of a basis.
#[derive(Debug, Clone, Serialize)]
pub struct OrthonormalityReport {
    pub dim: usize,
    pub label: BasisLabel,
    /// max |Tr(G_μ G_ν) − δ_{μν}| over all flat pairs, g0 included.
    pub max_gram_deviation: f64,
    /// Flat indices where the Gram deviation is largest.
    pub worst_pair: (usize, usize),
    /// max |Tr G_{α,k}|.
    pub max_trace: f64,
    /// max ‖G − G†‖_max.
    pub hermiticity_residual: f64,
    pub tol: f64,
    pub pass: bool,
}

pub fn verify_orthonormal(basis: &HermitianBasis, tol: f64) -> OrthonormalityReport {
    let ops: Vec<&ComplexMatrix> = basis.flat_iter().collect();
    let mut worst = 0.0;
    let mut worst_pair = (0, 0);
    for (m, a) in ops.iter().enumerate() {
        for (n, b) in ops.iter().enumerate().skip(m) {
            let g = trace_inner(a, b).expect("square operators of equal size");
            let target = if m == n { 1.0 } else { 0.0 };
            let dev = (g - c(target, 0.0)).norm();
            if dev > worst {
                worst = dev;
                worst_pair = (m, n);
            }
        }
    }
    let max_trace = ops[1..].iter().map(|g| g.trace().norm()).fold(0.0, f64::max);
    let herm = ops.iter().map(|g| g.hermiticity_residual()).fold(0.0, f64::max);
    OrthonormalityReport {
        dim: basis.dim(),
        label: basis.label(),
        max_gram_deviation: worst,
        worst_pair,
        max_trace,
        hermiticity_residual: herm,
        tol,
        pass: worst <= tol && max_trace <= tol && herm <= tol,
    }
}

/// Orthonormality check at the default tolerance.
pub fn is_orthonormal(basis: &HermitianBasis) -> bool {
    verify_orthonormal(basis, DEFAULT_TOL).pass
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{eigenvalues, trace_product};

    #[test]
    fn qubit_gellmann_is_normalised_pauli_set() {
        let b = gellmann_basis(2).unwrap();
        let r = 1.0 / 2f64.sqrt();
        let x = ComplexMatrix::from_real_rows(&[&[0.0, r], &[r, 0.0]]);
        let z = ComplexMatrix::diag(&[r, -r]);
        assert!(b.g(2, 1).max_abs_diff(&x) < 1e-15);
        assert!(b.g(3, 1).max_abs_diff(&z) < 1e-15);
        // σ_y up to sign
        let y = b.g(1, 1);
        assert!((y.get(0, 1).im.abs() - r).abs() < 1e-15);
        for g in b.flat_iter().skip(1) {
            assert!((trace_product(g, g).re - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn qutrit_diagonal_gellmann() {
        let b = gellmann_basis(3).unwrap();
        let r2 = 1.0 / 2f64.sqrt();
        let r6 = 1.0 / 6f64.sqrt();
        assert!(b.g(4, 1).max_abs_diff(&ComplexMatrix::diag(&[r2, -r2, 0.0])) < 1e-15);
        assert!(b.g(4, 2).max_abs_diff(&ComplexMatrix::diag(&[r6, r6, -2.0 * r6])) < 1e-15);
        let ev = eigenvalues(b.g(4, 1)).unwrap();
        assert!((ev[0] + r2).abs() < 1e-14 && ev[1].abs() < 1e-14 && (ev[2] - r2).abs() < 1e-14);
    }

    #[test]
    fn gellmann_four_is_orthonormal() {
        let b = gellmann_basis(4).unwrap();
        assert_eq!(b.flat_iter().count(), 16);
        let rep = verify_orthonormal(&b, 1e-12);
        assert!(rep.pass, "{rep:?}");
    }

    #[test]
    fn shifted_diagonal_qubit_element() {
        let s = 2f64.sqrt();
        let pref = 1.0 / (s * (s + 1.0));
        let expected = ComplexMatrix::diag(&[pref * (1.0 + s), pref - 1.0]);
        let m = shifted_diagonal_matrix(2, 1);
        assert!(m.max_abs_diff(&expected) < 1e-15);
        assert!(m.trace().norm() < 1e-14);
        assert!((trace_product(&m, &m).re - 1.0).abs() < 1e-14);
    }

    #[test]
    fn shifted_diagonal_elements_orthonormal() {
        for d in 2..=7 {
            for k in 1..d {
                let a = shifted_diagonal_matrix(d, k);
                assert!(a.trace().norm() < 1e-12);
                for l in 1..d {
                    let b = shifted_diagonal_matrix(d, l);
                    let target = if k == l { 1.0 } else { 0.0 };
                    assert!((trace_product(&a, &b).re - target).abs() < 1e-12, "d={d} k={k} l={l}");
                }
                for m in 0..d {
                    for n in 0..d {
                        if m != n {
                            let g = gellmann_matrix(d, m, n);
                            assert!(trace_product(&a, &g).norm() < 1e-14);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn mub_overlaps_are_unbiased() {
        for d in [2, 3, 5] {
            let bases = mub_vectors(d).unwrap();
            assert_eq!(bases.len(), d + 1);
            for (a, ba) in bases.iter().enumerate() {
                for (b, bb) in bases.iter().enumerate() {
                    for (k, u) in ba.iter().enumerate() {
                        for (l, v) in bb.iter().enumerate() {
                            let ov: num_complex::Complex64 =
                                u.iter().zip(v).map(|(x, y)| x.conj() * y).sum();
                            let expected = if a == b {
                                if k == l {
                                    1.0
                                } else {
                                    0.0
                                }
                            } else {
                                1.0 / d as f64
                            };
                            assert!((ov.norm_sqr() - expected).abs() < 1e-12);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn mub_basis_requires_prime() {
        assert!(matches!(mub_derived_basis(4), Err(Error::NotPrime(4))));
        assert!(matches!(gellmann_basis(1), Err(Error::DimensionTooSmall(1))));
        assert!(matches!(shifted_diagonal_basis(0), Err(Error::DimensionTooSmall(0))));
    }

    #[test]
    fn qubit_mub_basis_is_pauli_up_to_sign() {
        let b = mub_derived_basis(2).unwrap();
        assert!(is_orthonormal(&b));
        let r = 1.0 / 2f64.sqrt();
        let paulis = gellmann_basis(2).unwrap();
        for g in b.flat_iter().skip(1) {
            let best = paulis
                .flat_iter()
                .skip(1)
                .map(|p| trace_product(g, p).re.abs())
                .fold(0.0, f64::max);
            assert!((best - 1.0).abs() < 1e-12);
            assert!((g.max_abs() - r).abs() < 1e-12);
        }
    }

    #[test]
    fn planted_scaling_defect_is_reported() {
        let b = gellmann_basis(3).unwrap();
        let mut grouped: Vec<Vec<ComplexMatrix>> =
            (1..=4).map(|a| b.group(a).to_vec()).collect();
        grouped[1][0] = grouped[1][0].scale(1.01);
        let bad = HermitianBasis::from_parts(3, BasisLabel::Custom, b.g0().clone(), grouped);
        let rep = verify_orthonormal(&bad, 1e-10);
        assert!(!rep.pass);
        assert!((rep.max_gram_deviation - 0.0201).abs() < 1e-12);
        let mu = bad.flat_index(2, 1);
        assert_eq!(rep.worst_pair, (mu, mu));
    }

    #[test]
    fn basis_json_round_trip_validates() {
        let b = shifted_diagonal_basis(3).unwrap();
        let s = serde_json::to_string(&b).unwrap();
        let file: BasisFile = serde_json::from_str(&s).unwrap();
        let back = HermitianBasis::from_file(file, 1e-10).unwrap();
        assert_eq!(back, b);

        let mut file: BasisFile = serde_json::from_str(&s).unwrap();
        file.grouped.pop();
        assert!(HermitianBasis::from_file(file, 1e-10).is_err());
    }

    #[test]
    fn label_parsing() {
        assert_eq!("mub".parse::<BasisLabel>().unwrap(), BasisLabel::MubDerived);
        assert_eq!("appendix-b".parse::<BasisLabel>().unwrap(), BasisLabel::ShiftedDiagonal);
        assert!("pauli".parse::<BasisLabel>().is_err());
    }
}

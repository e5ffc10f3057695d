//! Real orthogonal d×d matrices with O·n★ = ±n★, n★ = (1,…,1)/√d.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::random;

#[derive(Debug, Clone, PartialEq)]
pub struct StarRotation {
    dim: usize,
    entries: DMatrix<f64>,
    sign: i8,
    descriptor: RotationDescriptor,
}

/// Textual recipe for a rotation: `id`, `perm:r`, `haar:seed`, `haar-neg:seed`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RotationDescriptor {
    Identity,
    Permutation(usize),
    Haar(u64),
    HaarNegative(u64),
    Explicit,
}

impl fmt::Display for RotationDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RotationDescriptor::Identity => write!(f, "id"),
            RotationDescriptor::Permutation(r) => write!(f, "perm:{r}"),
            RotationDescriptor::Haar(s) => write!(f, "haar:{s}"),
            RotationDescriptor::HaarNegative(s) => write!(f, "haar-neg:{s}"),
            RotationDescriptor::Explicit => write!(f, "explicit"),
        }
    }
}

impl Serialize for RotationDescriptor {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> serde::Deserialize<'de> for RotationDescriptor {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        if s == "explicit" {
            return Ok(RotationDescriptor::Explicit);
        }
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl FromStr for RotationDescriptor {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "id" {
            return Ok(RotationDescriptor::Identity);
        }
        let (kind, arg) = s
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("bad rotation descriptor '{s}'")))?;
        let bad = |_| Error::Parse(format!("bad rotation argument in '{s}'"));
        match kind {
            "perm" => Ok(RotationDescriptor::Permutation(arg.parse().map_err(bad)?)),
            "haar" => Ok(RotationDescriptor::Haar(arg.parse().map_err(bad)?)),
            "haar-neg" => Ok(RotationDescriptor::HaarNegative(arg.parse().map_err(bad)?)),
            _ => Err(Error::Parse(format!(
                "unknown rotation kind '{kind}' (expected id, perm:r, haar:seed, haar-neg:seed)"
            ))),
        }
    }
}

impl RotationDescriptor {
    pub fn build(self, d: usize) -> Result<StarRotation> {
        match self {
            RotationDescriptor::Identity => Ok(StarRotation::identity(d)),
            RotationDescriptor::Permutation(r) => StarRotation::permutation(d, r),
            RotationDescriptor::Haar(seed) => Ok(StarRotation::haar(d, seed, 1)),
            RotationDescriptor::HaarNegative(seed) => Ok(StarRotation::haar(d, seed, -1)),
            RotationDescriptor::Explicit => Err(Error::InvalidRotation(
                "explicit rotations carry their own matrix".into(),
            )),
        }
    }
}

/// Parses a comma separated descriptor list such as `id,id,perm:1`.
pub fn parse_rotation_list(s: &str, d: usize) -> Result<Vec<StarRotation>> {
    s.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| p.parse::<RotationDescriptor>()?.build(d))
        .collect()
}

pub fn n_star(d: usize) -> DVector<f64> {
    DVector::from_element(d, 1.0 / (d as f64).sqrt())
}

/// Orthogonal V whose first column is n★, completed by Gram–Schmidt over
/// e_0, e_1, … (dependent vectors skipped).
pub fn star_frame(d: usize) -> DMatrix<f64> {
    let mut cols: Vec<DVector<f64>> = vec![n_star(d)];
    for i in 0..d {
        if cols.len() == d {
            break;
        }
        let mut v = DVector::from_fn(d, |j, _| if j == i { 1.0 } else { 0.0 });
        for _ in 0..2 {
            for q in &cols {
                let p = q.dot(&v);
                v -= q * p;
            }
        }
        let n = v.norm();
        if n > 1e-10 {
            cols.push(v / n);
        }
    }
    DMatrix::from_columns(&cols)
}

impl StarRotation {
    pub fn identity(d: usize) -> Self {
        Self {
            dim: d,
            entries: DMatrix::identity(d, d),
            sign: 1,
            descriptor: RotationDescriptor::Identity,
        }
    }

    /// Cyclic shift S^{(r)}|i⟩ = |i+r mod d⟩.
    pub fn permutation(d: usize, r: usize) -> Result<Self> {
        if r >= d {
            return Err(Error::InvalidRotation(format!(
                "shift r = {r} must satisfy 0 <= r < d = {d}"
            )));
        }
        let entries = DMatrix::from_fn(d, d, |row, col| if row == (col + r) % d { 1.0 } else { 0.0 });
        Ok(Self {
            dim: d,
            entries,
            sign: 1,
            descriptor: RotationDescriptor::Permutation(r),
        })
    }

    /// O = V·diag(sign, B)·Vᵀ for an orthogonal (d−1)×(d−1) block B.
    pub fn householder(d: usize, block: &DMatrix<f64>, sign: i8) -> Result<Self> {
        if block.nrows() != d - 1 || block.ncols() != d - 1 {
            return Err(Error::InvalidRotation(format!(
                "block must be {}x{}",
                d - 1,
                d - 1
            )));
        }
        if sign != 1 && sign != -1 {
            return Err(Error::InvalidRotation(format!("sign must be ±1, got {sign}")));
        }
        let res = (block.transpose() * block - DMatrix::identity(d - 1, d - 1)).abs().max();
        if res > 1e-10 {
            return Err(Error::InvalidRotation(format!(
                "block is not orthogonal (residual {res:.3e})"
            )));
        }
        let mut inner = DMatrix::zeros(d, d);
        inner[(0, 0)] = sign as f64;
        inner.view_mut((1, 1), (d - 1, d - 1)).copy_from(block);
        let v = star_frame(d);
        Ok(Self {
            dim: d,
            entries: &v * inner * v.transpose(),
            sign,
            descriptor: RotationDescriptor::Explicit,
        })
    }

    /// Haar-random block from `seed`, conjugated into the complement of n★.
    pub fn haar(d: usize, seed: u64, sign: i8) -> Self {
        let block = random::haar_orthogonal(d - 1, &mut random::rng(seed));
        let mut r = Self::householder(d, &block, sign).expect("Haar block is orthogonal");
        r.descriptor = if sign > 0 {
            RotationDescriptor::Haar(seed)
        } else {
            RotationDescriptor::HaarNegative(seed)
        };
        r
    }

    /// Wraps an arbitrary matrix without checks (for diagnostics).
    pub fn from_matrix_unchecked(entries: DMatrix<f64>, sign: i8) -> Self {
        Self {
            dim: entries.nrows(),
            entries,
            sign,
            descriptor: RotationDescriptor::Explicit,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn sign(&self) -> i8 {
        self.sign
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn get(&self, k: usize, l: usize) -> f64 {
        self.entries[(k, l)]
    }

    pub fn descriptor(&self) -> RotationDescriptor {
        self.descriptor
    }

    pub fn compose(&self, other: &StarRotation) -> StarRotation {
        StarRotation {
            dim: self.dim,
            entries: &self.entries * &other.entries,
            sign: self.sign * other.sign,
            descriptor: RotationDescriptor::Explicit,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RotationReport {
    pub dim: usize,
    pub sign: i8,
    /// ‖OᵀO − I‖_max
    pub orthogonality: f64,
    /// ‖O n★ − sign·n★‖_∞
    pub n_star: f64,
    /// max_k |Σ_l O_kl − sign|
    pub row_sums: f64,
    /// max_l |Σ_k O_kl − sign|
    pub col_sums: f64,
    pub tol: f64,
    pub pass: bool,
}

pub fn verify_rotation(o: &StarRotation, tol: f64) -> RotationReport {
    let d = o.dim;
    let m = &o.entries;
    let s = o.sign as f64;
    let orthogonality = (m.transpose() * m - DMatrix::identity(d, d)).abs().max();
    let ns = n_star(d);
    let n_star_res = (m * &ns - &ns * s).abs().max();
    let row_sums = (0..d).map(|k| (m.row(k).sum() - s).abs()).fold(0.0, f64::max);
    let col_sums = (0..d).map(|l| (m.column(l).sum() - s).abs()).fold(0.0, f64::max);
    RotationReport {
        dim: d,
        sign: o.sign,
        orthogonality,
        n_star: n_star_res,
        row_sums,
        col_sums,
        tol,
        pass: orthogonality <= tol && n_star_res <= tol && row_sums <= tol && col_sums <= tol,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_has_unit_sums() {
        let o = StarRotation::identity(3);
        assert_eq!(o.matrix(), &DMatrix::<f64>::identity(3, 3));
        let rep = verify_rotation(&o, 1e-12);
        assert!(rep.pass);
        let p = StarRotation::permutation(3, 1).unwrap();
        assert_eq!(o.compose(&p).matrix(), p.matrix());
    }

    #[test]
    fn cyclic_shifts_match_displayed_permutations() {
        let s1 = StarRotation::permutation(3, 1).unwrap();
        let expected1 = DMatrix::from_row_slice(3, 3, &[0., 0., 1., 1., 0., 0., 0., 1., 0.]);
        assert_eq!(s1.matrix(), &expected1);
        let s2 = StarRotation::permutation(3, 2).unwrap();
        let expected2 = DMatrix::from_row_slice(3, 3, &[0., 1., 0., 0., 0., 1., 1., 0., 0.]);
        assert_eq!(s2.matrix(), &expected2);
        assert_eq!(StarRotation::permutation(4, 0).unwrap().matrix(), &DMatrix::identity(4, 4));
        assert!(StarRotation::permutation(3, 3).is_err());
        let rep = verify_rotation(&s1, 0.0);
        assert!(rep.pass && rep.row_sums == 0.0 && rep.col_sums == 0.0);
    }

    #[test]
    fn householder_identity_block_gives_identity() {
        let o = StarRotation::householder(4, &DMatrix::identity(3, 3), 1).unwrap();
        assert!((o.matrix() - DMatrix::<f64>::identity(4, 4)).abs().max() < 1e-14);
    }

    #[test]
    fn qubit_flip_block_gives_swap() {
        let o = StarRotation::householder(2, &DMatrix::from_element(1, 1, -1.0), 1).unwrap();
        let swap = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        assert!((o.matrix() - swap).abs().max() < 1e-15);
    }

    #[test]
    fn haar_rotation_invariants() {
        let o = StarRotation::haar(4, 11, 1);
        assert!(verify_rotation(&o, 1e-10).pass);
        let neg = StarRotation::haar(4, 11, -1);
        let rep = verify_rotation(&neg, 1e-10);
        assert!(rep.pass, "{rep:?}");
        assert!((neg.matrix().row(0).sum() + 1.0).abs() < 1e-10);
    }

    #[test]
    fn non_orthogonal_block_rejected_and_flagged() {
        let bad = DMatrix::from_element(2, 2, 0.5);
        assert!(StarRotation::householder(3, &bad, 1).is_err());
        let planted = StarRotation::from_matrix_unchecked(DMatrix::from_element(3, 3, 1.0 / 3.0), 1);
        let rep = verify_rotation(&planted, 1e-10);
        assert!(!rep.pass && rep.orthogonality > 0.1);
    }

    #[test]
    fn descriptors_parse_and_build() {
        let rs = parse_rotation_list("id, perm:2,haar:5,haar-neg:6", 3).unwrap();
        assert_eq!(rs.len(), 4);
        assert_eq!(rs[1].descriptor().to_string(), "perm:2");
        assert_eq!(rs[3].sign(), -1);
        assert!(parse_rotation_list("spin:1", 3).is_err());
        assert!(parse_rotation_list("perm:x", 3).is_err());
        assert!(parse_rotation_list("perm:5", 3).is_err());
    }
}

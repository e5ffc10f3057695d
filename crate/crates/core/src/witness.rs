//! Positive trace-preserving maps built from measurement families and
//! n★-fixing rotations, their witnesses W and W̃, and the Q-matrix form.
//!
//! Conventions: measurements listed in a [`WitnessSpec`] are indexed
//! α = 1..=N; the first L are subtracted, the rest added. Complex
//! conjugation (P̄, F̄, Ḡ) is entrywise in the computational basis.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::basis::{build_basis, BasisLabel, HermitianBasis};
use crate::error::{Error, Result};
use crate::linalg::{kron, max_entangled, trace_product, BipartiteOperator, ComplexMatrix};
use crate::mum::{build_f, build_mums, kappa_opt, MumFamily};
use crate::rotations::{RotationDescriptor, StarRotation};

/// Recipe for a map Φ and its witnesses.
#[derive(Debug, Clone)]
pub struct WitnessSpec {
    basis: HermitianBasis,
    n: usize,
    l: usize,
    kappa: f64,
    rotations: Vec<StarRotation>,
    alphas: Vec<usize>,
    enforce_positivity: bool,
}

impl WitnessSpec {
    /// Uses basis groups 1..=N in order, positivity of the P's enforced.
    pub fn new(
        basis: HermitianBasis,
        n: usize,
        l: usize,
        kappa: f64,
        rotations: Vec<StarRotation>,
    ) -> Result<Self> {
        Self::build(basis, n, l, kappa, rotations, (1..=n).collect(), true)
    }

    /// Full control: `alphas` picks which basis groups play measurements
    /// 1..=N (the first L of them are subtracted).
    pub fn build(
        basis: HermitianBasis,
        n: usize,
        l: usize,
        kappa: f64,
        rotations: Vec<StarRotation>,
        alphas: Vec<usize>,
        enforce_positivity: bool,
    ) -> Result<Self> {
        let d = basis.dim();
        if n > d + 1 || l > n {
            return Err(Error::InvalidSpec(format!(
                "need 0 <= L <= N <= d+1, got N = {n}, L = {l}, d = {d}"
            )));
        }
        if rotations.len() != n {
            return Err(Error::InvalidSpec(format!(
                "expected {n} rotations, got {}",
                rotations.len()
            )));
        }
        if let Some(r) = rotations.iter().find(|r| r.dim() != d) {
            return Err(Error::InvalidSpec(format!(
                "rotation of dimension {} does not match d = {d}",
                r.dim()
            )));
        }
        if alphas.len() != n {
            return Err(Error::InvalidSpec(format!(
                "expected {n} measurement indices, got {}",
                alphas.len()
            )));
        }
        let mut seen = vec![false; d + 2];
        for &a in &alphas {
            if a == 0 || a > d + 1 || seen[a] {
                return Err(Error::InvalidSpec(format!(
                    "measurement indices must be distinct values in 1..={}",
                    d + 1
                )));
            }
            seen[a] = true;
        }
        let floor = 1.0 / d as f64;
        if !(kappa > floor) {
            return Err(Error::KappaOutOfRange {
                kappa,
                reason: format!("need kappa > 1/d = {floor}"),
            });
        }
        if enforce_positivity {
            let opt = kappa_opt(&basis);
            if kappa > opt + 1e-12 {
                return Err(Error::KappaOutOfRange {
                    kappa,
                    reason: format!(
                        "exceeds kappa_opt = {opt:.12} for the {} basis; allow non-positive operators to go further",
                        basis.label()
                    ),
                });
            }
        }
        Ok(Self {
            basis,
            n,
            l,
            kappa,
            rotations,
            alphas,
            enforce_positivity,
        })
    }

    /// Same recipe at a different κ.
    pub fn with_kappa(&self, kappa: f64) -> Result<Self> {
        Self::build(
            self.basis.clone(),
            self.n,
            self.l,
            kappa,
            self.rotations.clone(),
            self.alphas.clone(),
            self.enforce_positivity,
        )
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn basis(&self) -> &HermitianBasis {
        &self.basis
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn rotations(&self) -> &[StarRotation] {
        &self.rotations
    }

    pub fn alphas(&self) -> &[usize] {
        &self.alphas
    }

    pub fn enforce_positivity(&self) -> bool {
        self.enforce_positivity
    }

    /// a = dκ − 1 − N + 2L.
    pub fn identity_coefficient(&self) -> f64 {
        self.dim() as f64 * self.kappa - 1.0 - self.n as f64 + 2.0 * self.l as f64
    }

    /// dκ − 1.
    pub fn normalisation(&self) -> f64 {
        self.dim() as f64 * self.kappa - 1.0
    }

    /// The N measurements of this recipe, in spec order.
    pub fn mums(&self) -> MumFamily {
        let d = self.dim();
        build_mums(&self.basis, self.kappa, d + 1, false)
            .expect("recipe validated at construction")
            .select(&self.alphas)
    }

    /// +1 for added measurements, −1 for subtracted ones (index 0-based).
    fn sign_of(&self, idx: usize) -> f64 {
        if idx < self.l {
            -1.0
        } else {
            1.0
        }
    }

    pub fn provenance(&self) -> Provenance {
        Provenance {
            basis: self.basis.label().to_string(),
            dim: self.dim(),
            n: self.n,
            l: self.l,
            kappa: self.kappa,
            alphas: self.alphas.clone(),
            rotations: self.rotations.iter().map(|r| r.descriptor()).collect(),
            positivity_enforced: self.enforce_positivity,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub basis: String,
    pub dim: usize,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "L")]
    pub l: usize,
    pub kappa: f64,
    pub alphas: Vec<usize>,
    pub rotations: Vec<RotationDescriptor>,
    pub positivity_enforced: bool,
}

impl Provenance {
    /// Rebuilds the recipe. Fails for custom bases and explicit rotations,
    /// which a provenance record cannot reconstruct.
    pub fn to_spec(&self) -> Result<WitnessSpec> {
        let label: BasisLabel = self.basis.parse()?;
        let basis = build_basis(label, self.dim)?;
        let rotations = self
            .rotations
            .iter()
            .map(|r| r.build(self.dim))
            .collect::<Result<Vec<_>>>()?;
        WitnessSpec::build(
            basis,
            self.n,
            self.l,
            self.kappa,
            rotations,
            self.alphas.clone(),
            self.positivity_enforced,
        )
    }
}

fn check_square(x: &ComplexMatrix, d: usize) -> Result<()> {
    if x.rows() != d || x.cols() != d {
        return Err(Error::DimensionMismatch(format!(
            "map input must be {d}x{d}, got {}x{}",
            x.rows(),
            x.cols()
        )));
    }
    Ok(())
}

/// Φ_α[X] = Σ_{k,l} O_kl P_k Tr(P_l X) for measurement α of `family`.
pub fn apply_phi_alpha(
    family: &MumFamily,
    alpha: usize,
    rotation: &StarRotation,
    x: &ComplexMatrix,
) -> Result<ComplexMatrix> {
    let d = family.dim();
    check_square(x, d)?;
    if rotation.dim() != d {
        return Err(Error::DimensionMismatch("rotation dimension".into()));
    }
    let p = family.measurement(alpha);
    let probs: Vec<_> = p.iter().map(|pl| trace_product(pl, x)).collect();
    let mut out = ComplexMatrix::zeros(d, d);
    for (k, pk) in p.iter().enumerate() {
        let w: num_complex::Complex64 = (0..d).map(|l| probs[l] * rotation.get(k, l)).sum();
        out = &out + &pk.scale_c(w);
    }
    Ok(out)
}

/// Completely depolarising channel Φ₀[X] = I Tr(X)/d.
pub fn apply_phi0(x: &ComplexMatrix) -> ComplexMatrix {
    let d = x.rows();
    ComplexMatrix::identity(d).scale_c(x.trace() / d as f64)
}

/// Φ[X] = (1/(dκ−1))[a Φ₀[X] + Σ_{α>L} Φ_α[X] − Σ_{α≤L} Φ_α[X]].
pub fn apply_phi(spec: &WitnessSpec, x: &ComplexMatrix) -> Result<ComplexMatrix> {
    apply_phi_with(spec, &spec.mums(), x)
}

/// As [`apply_phi`] with a precomputed family (`spec.mums()`).
pub fn apply_phi_with(
    spec: &WitnessSpec,
    family: &MumFamily,
    x: &ComplexMatrix,
) -> Result<ComplexMatrix> {
    let norm = spec.normalisation();
    if norm.abs() < 1e-14 {
        return Err(Error::Degenerate("kappa = 1/d makes the map undefined".into()));
    }
    Ok(apply_phi_tilde_with(spec, family, x)?.scale(1.0 / norm))
}

/// Unnormalised Φ̃ = (dκ−1)Φ.
pub fn apply_phi_tilde_with(
    spec: &WitnessSpec,
    family: &MumFamily,
    x: &ComplexMatrix,
) -> Result<ComplexMatrix> {
    check_square(x, spec.dim())?;
    let mut out = apply_phi0(x).scale(spec.identity_coefficient());
    for (idx, rot) in spec.rotations.iter().enumerate() {
        let term = apply_phi_alpha(family, idx + 1, rot, x)?;
        out = &out + &term.scale(spec.sign_of(idx));
    }
    Ok(out)
}

/// Σ_{i,j} |i⟩⟨j| ⊗ Φ[|i⟩⟨j|].
pub fn choi<F>(d: usize, mut map: F) -> Result<ComplexMatrix>
where
    F: FnMut(&ComplexMatrix) -> Result<ComplexMatrix>,
{
    let mut out = ComplexMatrix::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            let e = ComplexMatrix::unit(d, i, j);
            out = &out + &kron(&e, &map(&e)?);
        }
    }
    Ok(out)
}

/// Σ_{k,l} O_kl Ā_l ⊗ B_k over one measurement's operators.
fn rotated_pair_sum(ops: &[ComplexMatrix], rotation: &StarRotation) -> ComplexMatrix {
    let d = ops.len();
    let n = ops[0].rows();
    let mut out = ComplexMatrix::zeros(n * n, n * n);
    for l in 0..d {
        let mut right = ComplexMatrix::zeros(n, n);
        for (k, op) in ops.iter().enumerate() {
            let o = rotation.get(k, l);
            if o != 0.0 {
                right = &right + &op.scale(o);
            }
        }
        out = &out + &kron(&ops[l].conj(), &right);
    }
    out
}

/// H_α = Σ_{k,l} O_kl P̄_l ⊗ P_k.
pub fn h_term(family: &MumFamily, alpha: usize, rotation: &StarRotation) -> ComplexMatrix {
    rotated_pair_sum(family.measurement(alpha), rotation)
}

/// W = (a/d) I + Σ_{α>L} H_α − Σ_{α≤L} H_α.
pub fn witness_w(spec: &WitnessSpec) -> Result<BipartiteOperator> {
    let d = spec.dim();
    if spec.normalisation().abs() < 1e-14 {
        return Err(Error::Degenerate("kappa = 1/d makes the map undefined".into()));
    }
    let family = spec.mums();
    let mut w = ComplexMatrix::identity(d * d).scale(spec.identity_coefficient() / d as f64);
    for (idx, rot) in spec.rotations.iter().enumerate() {
        w = &w + &h_term(&family, idx + 1, rot).scale(spec.sign_of(idx));
    }
    BipartiteOperator::new(w, d)
}

/// J_α = Σ_{k,l} O_kl F̄_l ⊗ F_k for basis group `group`.
pub fn j_term(basis: &HermitianBasis, group: usize, rotation: &StarRotation) -> ComplexMatrix {
    let f = build_f(basis);
    rotated_pair_sum(f.group(group), rotation)
}

/// W̃ = (d−1)(√d+1)² I + Σ_{α>L} J_α − Σ_{α≤L} J_α. Independent of κ.
pub fn witness_wtilde(spec: &WitnessSpec) -> Result<BipartiteOperator> {
    let d = spec.dim();
    let s = (d as f64).sqrt();
    let f = build_f(&spec.basis);
    let mut w = ComplexMatrix::identity(d * d).scale((d as f64 - 1.0) * (s + 1.0).powi(2));
    for (idx, (rot, &alpha)) in spec.rotations.iter().zip(&spec.alphas).enumerate() {
        w = &w + &rotated_pair_sum(f.group(alpha), rot).scale(spec.sign_of(idx));
    }
    BipartiteOperator::new(w, d)
}

/// Factor relating the two normalisations: W̃ = factor · W.
pub fn wtilde_over_w(d: usize, kappa: f64) -> f64 {
    let s = (d as f64).sqrt();
    d as f64 * (d as f64 - 1.0) * (s + 1.0).powi(2) / (d as f64 * kappa - 1.0)
}

/// d(√d+1)² [I − d P₊].
pub fn reduction_witness(d: usize) -> Result<BipartiteOperator> {
    if d < 2 {
        return Err(Error::DimensionTooSmall(d));
    }
    let s = (d as f64).sqrt();
    let m = &ComplexMatrix::identity(d * d) - &max_entangled(d).scale(d as f64);
    BipartiteOperator::new(m.scale(d as f64 * (s + 1.0).powi(2)), d)
}

/// R = (1/d)[Σ_{k,m} |k⟩⟨m|⊗|k⟩⟨m| − Σ_k (|k⟩⟨k| − |k−r⟩⟨k−r|) ⊗ |k⟩⟨k|].
pub fn shift_operator_r(d: usize, r: usize) -> ComplexMatrix {
    let mut m = max_entangled(d).scale(d as f64);
    for k in 0..d {
        let kr = (k + d - r) % d;
        let diag_k = kron(&ComplexMatrix::unit(d, k, k), &ComplexMatrix::unit(d, k, k));
        let diag_kr = kron(&ComplexMatrix::unit(d, kr, kr), &ComplexMatrix::unit(d, k, k));
        m = &(&m - &diag_k) + &diag_kr;
    }
    m.scale(1.0 / d as f64)
}

/// Closed form d(√d+1)²[I − dR] of the witness obtained from the
/// shifted-diagonal basis with the last measurement cyclically shifted by r.
pub fn cyclic_shift_witness(d: usize, r: usize) -> Result<BipartiteOperator> {
    if d < 2 {
        return Err(Error::DimensionTooSmall(d));
    }
    if r >= d {
        return Err(Error::InvalidRotation(format!("shift r = {r} must be < d = {d}")));
    }
    let s = (d as f64).sqrt();
    let m = &ComplexMatrix::identity(d * d) - &shift_operator_r(d, r).scale(d as f64);
    BipartiteOperator::new(m.scale(d as f64 * (s + 1.0).powi(2)), d)
}

/// Recipe whose W̃ the closed form of [`cyclic_shift_witness`] describes:
/// shifted-diagonal basis, N = L = d+1, identity rotations except the last.
pub fn cyclic_shift_spec(d: usize, r: usize) -> Result<WitnessSpec> {
    let basis = crate::basis::shifted_diagonal_basis(d)?;
    let kappa = kappa_opt(&basis);
    let mut rots: Vec<StarRotation> = (0..d).map(|_| StarRotation::identity(d)).collect();
    rots.push(StarRotation::permutation(d, r)?);
    WitnessSpec::new(basis, d + 1, d + 1, kappa, rots)
}

/// Q^{(α)}_{kl} = d(O_00 − 1) + d(√d+1)² O_kl − d(√d+1)(O_0l + O_k0), k,l ∈ 1..d.
pub fn q_block(rotation: &StarRotation) -> DMatrix<f64> {
    let d = rotation.dim();
    let df = d as f64;
    let s = df.sqrt();
    let o = |k: usize, l: usize| rotation.get(k, l);
    DMatrix::from_fn(d - 1, d - 1, |i, j| {
        let (k, l) = (i + 1, j + 1);
        df * (o(0, 0) - 1.0) + df * (s + 1.0).powi(2) * o(k, l) - df * (s + 1.0) * (o(0, l) + o(k, 0))
    })
}

/// Per-group Q blocks and their normalised block-diagonal assembly.
///
/// The flat matrix pairs G_μᵀ (first factor) with G_ν (second factor), so
/// group α contributes the transposed block Q^{(α)ᵀ}.
#[derive(Debug, Clone)]
pub struct QMatrix {
    dim: usize,
    blocks: Vec<DMatrix<f64>>,
    assembled: DMatrix<f64>,
}

impl QMatrix {
    /// Needs one rotation per group α = 1..=d+1.
    pub fn from_rotations(rotations: &[StarRotation]) -> Result<Self> {
        let d = rotations
            .first()
            .ok_or_else(|| Error::InvalidSpec("no rotations".into()))?
            .dim();
        if rotations.len() != d + 1 {
            return Err(Error::InvalidSpec(format!(
                "need {} rotations for the full Q matrix, got {}",
                d + 1,
                rotations.len()
            )));
        }
        if let Some(r) = rotations.iter().find(|r| r.sign() != 1) {
            return Err(Error::InvalidRotation(format!(
                "Q blocks need n★-fixing rotations, got sign {}",
                r.sign()
            )));
        }
        let blocks: Vec<_> = rotations.iter().map(q_block).collect();
        let s = (d as f64).sqrt();
        let scale = d as f64 * (s + 1.0).powi(2);
        let n = d * d;
        let mut assembled = DMatrix::zeros(n, n);
        assembled[(0, 0)] = 1.0;
        for (a, b) in blocks.iter().enumerate() {
            let off = 1 + a * (d - 1);
            assembled
                .view_mut((off, off), (d - 1, d - 1))
                .copy_from(&(b.transpose() / scale));
        }
        Ok(Self {
            dim: d,
            blocks,
            assembled,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Q^{(α)}, α ∈ 1..=d+1.
    pub fn block(&self, alpha: usize) -> &DMatrix<f64> {
        &self.blocks[alpha - 1]
    }

    pub fn assembled(&self) -> &DMatrix<f64> {
        &self.assembled
    }
}

/// J_α expressed through the basis: Σ_{k,l} Q_kl Ḡ_{α,l} ⊗ G_{α,k}.
pub fn j_term_from_q(basis: &HermitianBasis, group: usize, q: &DMatrix<f64>) -> ComplexMatrix {
    let d = basis.dim();
    let g = basis.group(group);
    let mut out = ComplexMatrix::zeros(d * d, d * d);
    for l in 0..d - 1 {
        let mut right = ComplexMatrix::zeros(d, d);
        for k in 0..d - 1 {
            right = &right + &g[k].scale(q[(k, l)]);
        }
        out = &out + &kron(&g[l].conj(), &right);
    }
    out
}

/// W′ = I − Σ_{μν} Q_μν G_μᵀ ⊗ G_ν over the flat basis, for Qᵀ Q ≤ I.
pub fn ccnr_witness(basis: &HermitianBasis, q: &DMatrix<f64>) -> Result<BipartiteOperator> {
    let d = basis.dim();
    let n = d * d;
    if q.nrows() != n || q.ncols() != n {
        return Err(Error::DimensionMismatch(format!("Q must be {n}x{n}")));
    }
    let top = (q.transpose() * q).symmetric_eigen().eigenvalues.max();
    if top > 1.0 + 1e-10 {
        return Err(Error::QNotContractive(top));
    }
    let ops: Vec<&ComplexMatrix> = basis.flat_iter().collect();
    let mut sum = ComplexMatrix::zeros(n, n);
    for (mu, gm) in ops.iter().enumerate() {
        let mut right = ComplexMatrix::zeros(d, d);
        let mut any = false;
        for (nu, gn) in ops.iter().enumerate() {
            let v = q[(mu, nu)];
            if v != 0.0 {
                right = &right + &gn.scale(v);
                any = true;
            }
        }
        if any {
            sum = &sum + &kron(&gm.transpose(), &right);
        }
    }
    BipartiteOperator::new(&ComplexMatrix::identity(n) - &sum, d)
}

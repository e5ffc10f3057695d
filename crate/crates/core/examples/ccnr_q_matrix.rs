//! The Q-matrix of a rotation set: per-group orthogonality up to
//! d²(√d+1)⁴ and the CCNR form of W̃ when every measurement is subtracted.
//!
//!     cargo run --example ccnr_q_matrix

use mumw::basis::gellmann_basis;
use mumw::rotations::StarRotation;
use mumw::witness::{ccnr_witness, q_block, witness_wtilde, QMatrix, WitnessSpec};
use nalgebra::DMatrix;

fn main() -> mumw::Result<()> {
    let d = 4;
    let s = (d as f64).sqrt();
    let norm = (d * d) as f64 * (s + 1.0).powi(4);
    let rots: Vec<StarRotation> = (0..=d as u64)
        .map(|seed| StarRotation::haar(d, seed, 1))
        .collect();
    for (a, o) in rots.iter().enumerate() {
        let q = q_block(o);
        let dev = (q.transpose() * &q / norm - DMatrix::identity(d - 1, d - 1)).amax();
        println!("alpha={} |Q^T Q / d^2(sqrt d+1)^4 - I| = {dev:.2e}", a + 1);
    }

    let q = QMatrix::from_rotations(&rots)?;
    let flat = q.assembled();
    let orth = (flat.transpose() * flat - DMatrix::identity(d * d, d * d)).amax();
    println!("assembled Q orthogonality defect {orth:.2e}");

    let basis = gellmann_basis(d)?;
    let spec = WitnessSpec::new(basis.clone(), d + 1, d + 1, 0.3, rots)?;
    let wt = witness_wtilde(&spec)?;
    let ccnr = ccnr_witness(&basis, flat)?;
    let scale = d as f64 * (s + 1.0).powi(2);
    println!("|W~/d(sqrt d+1)^2 - W_ccnr| = {:.2e}", wt.scale(1.0 / scale).max_abs_diff(&ccnr));
    Ok(())
}

//! The positive map Φ, its Choi matrix, and the scaling W = (dκ−1)·Choi(Φ).
//!
//!     cargo run --example choi_map

use mumw::basis::mub_derived_basis;
use mumw::linalg::ComplexMatrix;
use mumw::rotations::StarRotation;
use mumw::witness::{apply_phi_with, choi, witness_w, WitnessSpec};

fn main() -> mumw::Result<()> {
    let d = 3;
    let rots = vec![
        StarRotation::identity(d),
        StarRotation::permutation(d, 1)?,
        StarRotation::haar(d, 7, 1),
    ];
    let spec = WitnessSpec::new(mub_derived_basis(d)?, 3, 1, 0.8, rots)?;
    let family = spec.mums();

    // Φ is trace preserving and Hermiticity preserving.
    let x = ComplexMatrix::from_real_rows(&[&[0.5, 0.1, 0.0], &[0.1, 0.3, 0.2], &[0.0, 0.2, 0.2]]);
    let y = apply_phi_with(&spec, &family, &x)?;
    println!("Tr X = {:.6}, Tr Phi[X] = {:.6}", x.trace().re, y.trace().re);
    println!("Phi[X] =\n{y:?}");

    let c = choi(d, |e| apply_phi_with(&spec, &family, e))?;
    let w = witness_w(&spec)?;
    let dev = w.matrix().max_abs_diff(&c.scale(spec.normalisation()));
    println!("|W - (d kappa - 1) Choi(Phi)| = {dev:.2e}");
    Ok(())
}

//! Block positivity by see-saw search and the sampled positivity condition
//! Tr(Φ[P]²) ≤ 1/(d−1) for rank-one P.
//!
//!     cargo run --release --example block_positivity

use mumw::basis::gellmann_basis;
use mumw::linalg::{max_entangled, BipartiteOperator};
use mumw::rotations::StarRotation;
use mumw::verify::{block_positivity_search, check_positivity_condition, SEESAW_ITERS, SEESAW_RESTARTS};
use mumw::witness::{reduction_witness, witness_w, WitnessSpec};

fn main() -> mumw::Result<()> {
    let d = 3;
    let r = block_positivity_search(&reduction_witness(d)?, SEESAW_RESTARTS, SEESAW_ITERS, 1)?;
    println!("reduction witness: product minimum {:.3e}", r.value);

    let neg = BipartiteOperator::new(max_entangled(2).scale(-1.0), 2)?;
    println!("-P+ (d=2): product minimum {:.6}", block_positivity_search(&neg, 32, 500, 1)?.value);

    let rots = vec![
        StarRotation::haar(d, 11, 1),
        StarRotation::permutation(d, 2)?,
        StarRotation::identity(d),
    ];
    let spec = WitnessSpec::new(gellmann_basis(d)?, 3, 1, 5.0 / 9.0, rots)?;
    let w = witness_w(&spec)?;
    let ss = block_positivity_search(&w, SEESAW_RESTARTS, SEESAW_ITERS, 1)?;
    println!("random spec: min eigenvalue {:.4}, product minimum {:.3e}", w.min_eigenvalue()?, ss.value);

    let rep = check_positivity_condition(&spec, 10_000, 42)?;
    println!(
        "max Tr(Phi[P]^2) over {} samples = {:.6} (bound {:.6})",
        rep.samples, rep.max_purity, rep.threshold
    );
    Ok(())
}

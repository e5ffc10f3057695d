//! Subtracting all d+1 measurements with identity rotations gives the
//! reduction witness d(√d+1)²(I − dP₊) for every basis.
//!
//!     cargo run --example reduction_witness

use mumw::reproduce::{full_subtraction_spec, standard_bases};
use mumw::witness::{reduction_witness, witness_w, witness_wtilde, wtilde_over_w};

fn main() -> mumw::Result<()> {
    for d in 2..=5 {
        let target = reduction_witness(d)?;
        for basis in standard_bases(d)? {
            let label = basis.label();
            let spec = full_subtraction_spec(basis)?;
            let wt = witness_wtilde(&spec)?;
            let w = witness_w(&spec)?;
            let ratio = wtilde_over_w(d, spec.kappa());
            println!(
                "d={d} {label:<12} |W~ - d(sqrt d+1)^2 (I - dP+)| = {:.2e}   |W~ - ratio*W| = {:.2e}   min eig {:.4}",
                wt.max_abs_diff(&target),
                wt.max_abs_diff(&w.scale(ratio)),
                wt.min_eigenvalue()?
            );
        }
    }
    Ok(())
}

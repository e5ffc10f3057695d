//! Witnesses from permutation rotations: the d = 3 Gell-Mann pair and the
//! cyclic-shift family d(√d+1)²[I − dR] from the shifted-diagonal basis.
//!
//!     cargo run --example permutation_witnesses

use mumw::golden;
use mumw::reproduce::gellmann_shift_spec;
use mumw::witness::{cyclic_shift_spec, cyclic_shift_witness, witness_wtilde};

fn main() -> mumw::Result<()> {
    for (r, g) in [(1, golden::SHIFT1_GELLMANN), (2, golden::SHIFT2_GELLMANN)] {
        let w = witness_wtilde(&gellmann_shift_spec(r)?)?;
        println!("{}: deviation from reference matrix {:.2e}", g.name, g.deviation(w.matrix()));
        println!("W~ / {} =\n{:?}", g.prefactor_label, w.matrix().scale(1.0 / (g.prefactor)()));
    }

    for d in 3..=5 {
        for r in 1..d {
            let pipeline = witness_wtilde(&cyclic_shift_spec(d, r)?)?;
            let closed = cyclic_shift_witness(d, r)?;
            println!(
                "d={d} r={r}: |pipeline - closed form| = {:.2e}, min eig {:.4}",
                pipeline.max_abs_diff(&closed),
                closed.min_eigenvalue()?
            );
        }
    }
    Ok(())
}

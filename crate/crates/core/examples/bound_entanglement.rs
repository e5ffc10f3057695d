//! d = 3 witnesses with two subtracted measurements: the MUB ones detect
//! PPT entangled states, the Gell-Mann ones decompose as A + B^Γ.
//!
//!     cargo run --example bound_entanglement

use mumw::golden;
use mumw::reproduce::{gellmann_decomposable_specs, mub_indecomposable_specs};
use mumw::verify::{detect, search_decomposition, verify_decomposition, STATE_TOL};
use mumw::witness::witness_wtilde;

fn main() -> mumw::Result<()> {
    let [m1, m2] = mub_indecomposable_specs()?;
    for (spec, state) in [(m1, golden::PPT_STATE_1), (m2, golden::PPT_STATE_2)] {
        let w = witness_wtilde(&spec)?;
        let rho = state.operator();
        let r = detect(&w, &rho, STATE_TOL)?;
        println!(
            "subtract {:?}: Tr(W {}) = {:.6}  ppt={} psd={} trace={:.12}  -> {:?}",
            &spec.alphas()[..2],
            state.name,
            r.expectation,
            r.ppt,
            r.psd,
            r.trace,
            r.verdict
        );
        let found = search_decomposition(&w, 2000, 1e-8 * w.matrix().max_abs())?;
        println!("  decomposition search: {}", if found.is_some() { "found" } else { "none (not a proof)" });
    }

    let [g3, g4] = gellmann_decomposable_specs()?;
    for (spec, a, b) in [
        (g3, golden::DECOMPOSITION_A3, golden::DECOMPOSITION_B3),
        (g4, golden::DECOMPOSITION_A4, golden::DECOMPOSITION_B4),
    ] {
        let w = witness_wtilde(&spec)?;
        let cert = verify_decomposition(&w, &a.operator(), &b.operator(), 1e-9)?;
        println!(
            "gell-mann subtract {:?}: reference {} + {}^G residual {:.3e} valid={}",
            &spec.alphas()[..2],
            a.name,
            b.name,
            cert.residual,
            cert.valid
        );
        if let Some(c) = search_decomposition(&w, 2000, 1e-8 * w.matrix().max_abs())? {
            println!(
                "  searched certificate: residual {:.1e}, min eig A {:.1e}, min eig B {:.1e}",
                c.residual, c.min_eig_a, c.min_eig_b
            );
        }
    }
    Ok(())
}

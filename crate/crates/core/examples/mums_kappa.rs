//! κ_opt per basis and the defining relations of the resulting measurements.
//!
//!     cargo run --example mums_kappa

use mumw::basis::{build_basis, is_prime, BasisLabel};
use mumw::mum::{build_mums, kappa_opt, kappa_to_t, verify_mum};

fn main() -> mumw::Result<()> {
    println!("{:>3}  {:<12} {:>14} {:>14} {:>10}", "d", "basis", "kappa_opt", "(d+2)/d^2", "t");
    for d in 2..=6 {
        let mut labels = vec![BasisLabel::GellMann, BasisLabel::ShiftedDiagonal];
        if is_prime(d) {
            labels.push(BasisLabel::MubDerived);
        }
        for label in labels {
            let basis = build_basis(label, d)?;
            let k = kappa_opt(&basis);
            let gm = (d as f64 + 2.0) / (d * d) as f64;
            println!(
                "{d:>3}  {:<12} {k:>14.10} {gm:>14.10} {:>10.6}",
                label.to_string(),
                kappa_to_t(d, k)?
            );
        }
    }

    // Relations at κ_opt and half-way down to 1/d.
    let basis = build_basis(BasisLabel::GellMann, 4)?;
    let opt = kappa_opt(&basis);
    for kappa in [opt, (0.25 + opt) / 2.0] {
        let family = build_mums(&basis, kappa, 5, true)?;
        let rep = verify_mum(&family, 1e-10, true);
        println!(
            "d=4 kappa={kappa:.6}: trace {:.1e}, completeness {:.1e}, gram {:.1e}, min eig {:.3e}, pass {}",
            rep.unit_trace,
            rep.completeness,
            rep.gram,
            rep.min_eigenvalue.unwrap_or(f64::NAN),
            rep.pass
        );
    }

    // Above κ_opt the operators stop being positive; building must opt in.
    assert!(build_mums(&basis, opt + 0.05, 5, true).is_err());
    let loose = build_mums(&basis, opt + 0.05, 5, false)?;
    let rep = verify_mum(&loose, 1e-10, true);
    println!("kappa above opt: min eig {:.3e}", rep.min_eigenvalue.unwrap_or(f64::NAN));
    Ok(())
}

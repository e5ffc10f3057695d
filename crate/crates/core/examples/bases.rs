//! Builds the operator bases and prints their orthonormality diagnostics.
//!
//!     cargo run --example bases

use mumw::basis::{build_basis, is_prime, verify_orthonormal, BasisLabel};

fn main() -> mumw::Result<()> {
    println!("{:>3}  {:<12} {:>12} {:>12}  pass", "d", "basis", "gram dev", "max |Tr G|");
    for d in 2..=7 {
        let mut labels = vec![BasisLabel::GellMann, BasisLabel::ShiftedDiagonal];
        if is_prime(d) {
            labels.push(BasisLabel::MubDerived);
        }
        for label in labels {
            let basis = build_basis(label, d)?;
            let rep = verify_orthonormal(&basis, 1e-10);
            println!(
                "{d:>3}  {:<12} {:>12.2e} {:>12.2e}  {}",
                label.to_string(),
                rep.max_gram_deviation,
                rep.max_trace,
                rep.pass
            );
        }
    }

    // Grouping: d+1 groups of d−1 traceless elements.
    let b = build_basis(BasisLabel::GellMann, 3)?;
    for alpha in 1..=4 {
        println!("group {alpha}: G(alpha, 1) =\n{:?}", b.g(alpha, 1));
    }
    Ok(())
}

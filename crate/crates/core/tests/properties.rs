use mumw::basis::{
    basis_from_mums, build_basis, gellmann_basis, is_prime, mub_derived_basis,
    shifted_diagonal_basis, verify_orthonormal, BasisLabel,
};
use mumw::linalg::{
    eigenvalues, kron, kron_vec, BipartiteOperator, ComplexMatrix,
};
use mumw::mum::{build_mums, expected_overlap, kappa_opt, kappa_to_t, t_to_kappa, verify_mum};
use mumw::random::{self, density_matrix, haar_vector, hermitian};
use mumw::rotations::{verify_rotation, StarRotation};
use mumw::golden;
use mumw::verify::{check_positivity_condition, check_trace_identities, is_ppt, search_decomposition};
use mumw::witness::{witness_wtilde, WitnessSpec};
use num_complex::Complex64;
use proptest::prelude::*;

fn labels(d: usize) -> Vec<BasisLabel> {
    let mut v = vec![BasisLabel::GellMann, BasisLabel::ShiftedDiagonal];
    if is_prime(d) {
        v.push(BasisLabel::MubDerived);
    }
    v
}

fn rotation(d: usize, kind: u8, seed: u64) -> StarRotation {
    match kind % 3 {
        0 => StarRotation::identity(d),
        1 => StarRotation::permutation(d, (seed as usize) % d).unwrap(),
        _ => StarRotation::haar(d, seed, 1),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn kron_is_associative_and_trace_multiplicative(seed in any::<u64>(), da in 1usize..4, db in 1usize..4, dc in 1usize..3) {
        let mut rng = random::rng(seed);
        let a = random::complex_matrix(da, da, &mut rng);
        let b = random::complex_matrix(db, db, &mut rng);
        let c = random::complex_matrix(dc, dc, &mut rng);
        let left = kron(&kron(&a, &b), &c);
        let right = kron(&a, &kron(&b, &c));
        prop_assert!(left.max_abs_diff(&right) < 1e-12);
        let t = kron(&a, &b).trace() - a.trace() * b.trace();
        prop_assert!(t.norm() < 1e-11);
    }

    #[test]
    fn partial_transpose_is_trace_preserving_involution(seed in any::<u64>(), d in 2usize..5) {
        let mut rng = random::rng(seed);
        let w = BipartiteOperator::new(hermitian(d * d, &mut rng), d).unwrap();
        let g = w.partial_transpose();
        prop_assert!(g.partial_transpose().max_abs_diff(&w) < 1e-15);
        prop_assert!((g.trace() - w.trace()).abs() < 1e-12);
    }

    #[test]
    fn eigenvalues_sum_to_trace(seed in any::<u64>(), n in 1usize..10) {
        let mut rng = random::rng(seed);
        let h = hermitian(n, &mut rng);
        let s: f64 = eigenvalues(&h).unwrap().iter().sum();
        prop_assert!((s - h.trace().re).abs() < 1e-10 * (1.0 + h.max_abs() * n as f64));
    }

    #[test]
    fn kappa_t_round_trip(d in 2usize..9, frac in 0.001f64..1.0) {
        let kappa = 1.0 / d as f64 + frac * (1.0 - 1.0 / d as f64);
        let t = kappa_to_t(d, kappa).unwrap();
        prop_assert!(t > 0.0);
        prop_assert!((t_to_kappa(d, t) - kappa).abs() < 1e-14);
    }

    #[test]
    fn separable_states_never_detected(seed in any::<u64>(), kinds in proptest::collection::vec(any::<u8>(), 4), l in 0usize..=4) {
        let d = 3;
        let rots: Vec<_> = kinds.iter().enumerate().map(|(i, &k)| rotation(d, k, seed.wrapping_add(i as u64))).collect();
        let spec = WitnessSpec::new(gellmann_basis(d).unwrap(), 4, l, 5.0 / 9.0, rots).unwrap();
        let w = witness_wtilde(&spec).unwrap();
        let mut rng = random::rng(seed ^ 0x5eed);
        for _ in 0..32 {
            let v = kron_vec(&haar_vector(d, &mut rng), &haar_vector(d, &mut rng));
            let e = w.matrix().expectation(&v);
            prop_assert!(e >= -1e-8 * w.matrix().max_abs(), "product expectation {e}");
        }
    }

    #[test]
    fn rotations_close_under_composition(d in 2usize..7, s1 in any::<u64>(), s2 in any::<u64>(), r in 0usize..7) {
        let a = StarRotation::haar(d, s1, 1);
        let b = StarRotation::permutation(d, r % d).unwrap();
        let c = StarRotation::haar(d, s2, -1);
        let ab = a.compose(&b);
        prop_assert!(verify_rotation(&ab, 1e-10).pass);
        prop_assert_eq!(ab.sign(), 1);
        let ac = a.compose(&c);
        prop_assert!(verify_rotation(&ac, 1e-10).pass);
        prop_assert_eq!(ac.sign(), -1);
    }
}

#[test]
fn mum_relations_hold_for_all_bases() {
    for d in 2..=6 {
        for label in labels(d) {
            let basis = build_basis(label, d).unwrap();
            assert!(verify_orthonormal(&basis, 1e-10).pass, "{label} d={d}");
            let opt = kappa_opt(&basis);
            for kappa in [opt, (1.0 / d as f64 + opt) / 2.0] {
                let family = build_mums(&basis, kappa, d + 1, true).unwrap();
                let rep = verify_mum(&family, 1e-10, true);
                assert!(rep.pass, "{label} d={d} kappa={kappa}: {rep:?}");
            }
        }
    }
}

/// Direct Gram-matrix oracle, independent of `verify_mum`.
#[test]
fn mum_gram_matches_closed_form() {
    let d = 4;
    let basis = shifted_diagonal_basis(d).unwrap();
    let kappa = 0.3;
    let family = build_mums(&basis, kappa, d + 1, true).unwrap();
    for a in 1..=d + 1 {
        for b in 1..=d + 1 {
            for k in 0..d {
                for l in 0..d {
                    let v = (family.p(a, k).matmul(family.p(b, l)).unwrap()).trace().re;
                    let e = expected_overlap(d, kappa, a == b, k == l);
                    assert!((v - e).abs() < 1e-12);
                }
            }
        }
    }
}

#[test]
fn basis_round_trips_through_mums() {
    for d in 2..=6 {
        for label in labels(d) {
            let basis = build_basis(label, d).unwrap();
            let kappa = (1.0 / d as f64 + kappa_opt(&basis)) / 2.0;
            let family = build_mums(&basis, kappa, d + 1, true).unwrap();
            let back = basis_from_mums(&family).unwrap();
            for alpha in 1..=d + 1 {
                for k in 1..d {
                    let diff = back.g(alpha, k).max_abs_diff(basis.g(alpha, k));
                    assert!(diff < 1e-10, "{label} d={d} G({alpha},{k}) off by {diff}");
                }
            }
        }
    }
}

#[test]
fn kappa_opt_closed_forms() {
    for d in 2..=8 {
        let gm = kappa_opt(&gellmann_basis(d).unwrap());
        assert!((gm - (d as f64 + 2.0) / (d * d) as f64).abs() < 1e-10, "d={d}: {gm}");
        if is_prime(d) {
            assert!((kappa_opt(&mub_derived_basis(d).unwrap()) - 1.0).abs() < 1e-10);
        }
    }
}

/// Largest κ with all operators PSD, found by bisection on the eigenvalues.
fn bisect_kappa_opt(label: BasisLabel, d: usize) -> f64 {
    let basis = build_basis(label, d).unwrap();
    let positive = |kappa: f64| {
        let family = build_mums(&basis, kappa, d + 1, false).unwrap();
        (1..=d + 1).all(|a| {
            family
                .measurement(a)
                .iter()
                .all(|p| eigenvalues(p).unwrap()[0] >= -1e-13)
        })
    };
    let (mut lo, mut hi) = (1.0 / d as f64 + 1e-9, 1.0);
    if positive(hi) {
        return hi;
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if positive(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

#[test]
fn kappa_opt_agrees_with_bisection_oracle() {
    for d in 2..=5 {
        for label in labels(d) {
            let basis = build_basis(label, d).unwrap();
            let oracle = bisect_kappa_opt(label, d);
            assert!((kappa_opt(&basis) - oracle).abs() < 1e-9, "{label} d={d}");
        }
    }
}

/// Regression: the shifted-diagonal basis shares κ_opt with Gell-Mann.
#[test]
fn shifted_diagonal_kappa_opt_regression() {
    for d in 2..=6 {
        let k = kappa_opt(&shifted_diagonal_basis(d).unwrap());
        assert!((k - (d as f64 + 2.0) / (d * d) as f64).abs() < 1e-10, "d={d}: {k}");
    }
}

fn sampled_specs() -> Vec<WitnessSpec> {
    let mut out = Vec::new();
    for (d, label) in [(3, BasisLabel::MubDerived), (4, BasisLabel::GellMann), (3, BasisLabel::ShiftedDiagonal)] {
        let basis = build_basis(label, d).unwrap();
        let opt = kappa_opt(&basis);
        for (n, l) in [(d + 1, 0), (d, d / 2), (d - 1, d - 1)] {
            let rots = (0..n).map(|i| rotation(d, i as u8, 100 + i as u64)).collect();
            out.push(WitnessSpec::new(basis.clone(), n, l, opt, rots).unwrap());
        }
    }
    out
}

#[test]
fn overlap_inequality_and_trace_identities() {
    for spec in sampled_specs() {
        let r = check_trace_identities(&spec, 1000, 5).unwrap();
        assert!(r.cross_terms < 1e-9, "{r:?}");
        assert!(r.diagonal_terms < 1e-9, "{r:?}");
        assert!(r.overlap_excess < 1e-9, "{r:?}");
    }
}

#[test]
fn positivity_bound_survives_nonpositive_operators() {
    let d = 3;
    let basis = gellmann_basis(d).unwrap();
    for kappa in [0.8, 1.0, 1.5] {
        let rots = vec![
            StarRotation::haar(d, 1, 1),
            StarRotation::identity(d),
            StarRotation::permutation(d, 1).unwrap(),
            StarRotation::haar(d, 2, 1),
        ];
        let spec = WitnessSpec::build(basis.clone(), 4, 2, kappa, rots, vec![1, 2, 3, 4], false).unwrap();
        let family = spec.mums();
        assert!(!verify_mum(&family, 1e-10, true).pass, "operators should be non-positive at {kappa}");
        let rep = check_positivity_condition(&spec, 2000, 9).unwrap();
        assert!(rep.pass, "kappa={kappa}: {rep:?}");
    }
}

/// Random states pushed towards the maximally mixed state until PPT.
fn random_ppt(d: usize, rng: &mut random::Rng) -> BipartiteOperator {
    let rho = density_matrix(d * d, rng);
    let id = ComplexMatrix::identity(d * d).scale(1.0 / (d * d) as f64);
    let mut lambda = 1.0;
    loop {
        let m = &rho.scale(lambda) + &id.scale(1.0 - lambda);
        let op = BipartiteOperator::new(m, d).unwrap();
        if is_ppt(&op, 0.0).unwrap() {
            return op;
        }
        lambda *= 0.9;
    }
}

#[test]
fn decomposable_witnesses_do_not_detect_ppt_states() {
    let d = 3;
    let basis = gellmann_basis(d).unwrap();
    let mut rng = random::rng(77);
    let states: Vec<_> = (0..200)
        .map(|_| random_ppt(d, &mut rng))
        .chain([golden::PPT_STATE_1.operator(), golden::PPT_STATE_2.operator()])
        .collect();
    for alphas in [vec![2, 4, 1, 3], vec![1, 2, 3, 4]] {
        let rots = (0..4).map(|_| StarRotation::identity(d)).collect();
        let spec = WitnessSpec::build(basis.clone(), 4, 2, 5.0 / 9.0, rots, alphas, true).unwrap();
        let w = witness_wtilde(&spec).unwrap();
        let cert = search_decomposition(&w, 2000, 1e-8 * w.matrix().max_abs()).unwrap();
        assert!(cert.expect("Gell-Mann witnesses are decomposable").valid);
        for rho in &states {
            assert!(w.expectation(rho) >= -1e-8);
        }
    }
}

#[test]
fn product_vectors_have_unit_norm() {
    let mut rng = random::rng(3);
    let v = kron_vec(&haar_vector(3, &mut rng), &haar_vector(4, &mut rng));
    let n: f64 = v.iter().map(Complex64::norm_sqr).sum();
    assert!((n - 1.0).abs() < 1e-12);
}

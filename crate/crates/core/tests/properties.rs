use std::sync::Arc;

use num_complex::Complex64;
use proptest::prelude::*;
use qfourier::classical::{cyclic_group, symmetric_group_s3};
use qfourier::dual::{make_onplus_dual, make_su2_dual, make_suq2_dual, make_trivial_dual};
use qfourier::fourier::{convolve, ell1_norm, ell2_norm, ell_infty_norm, plancherel_gram_norm};
use qfourier::random_series::{four_unitary_decomposition, random_contraction, randomize, MatrixFamily};
use qfourier::{DualDescriptor, FourierCoeffs, RngSeed};

fn builtin(choice: u8, q: f64, kmax: usize) -> Arc<DualDescriptor> {
    Arc::new(match choice % 7 {
        0 => make_trivial_dual(),
        1 => make_su2_dual(kmax).unwrap(),
        2 => make_suq2_dual(q, kmax).unwrap(),
        3 => make_onplus_dual(3, kmax.min(4)).unwrap(),
        4 => make_onplus_dual(5, kmax.min(3)).unwrap(),
        5 => symmetric_group_s3().dual().as_ref().clone(),
        _ => cyclic_group(kmax + 2).unwrap().dual().as_ref().clone(),
    })
}

fn arb_dual() -> impl Strategy<Value = Arc<DualDescriptor>> {
    (any::<u8>(), 0.02f64..0.98, 0usize..=6).prop_map(|(c, q, k)| builtin(c, q, k))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn quantum_dimension_trace_equality(q in 0.02f64..0.98, kmax in 0usize..=12) {
        let dual = make_suq2_dual(q, kmax).unwrap();
        for irrep in dual.irreps() {
            let t: f64 = irrep.q_diag().iter().sum();
            let ti: f64 = irrep.q_diag().iter().map(|x| 1.0 / x).sum();
            prop_assert!((t - ti).abs() <= 1e-12 * t);
            prop_assert!((t - irrep.quantum_dimension()).abs() <= 1e-12 * t);
            prop_assert!(irrep.quantum_dimension() >= irrep.n() as f64 * (1.0 - 1e-12));
        }
    }

    #[test]
    fn plancherel_consistency(dual in arb_dual(), seed in any::<u64>()) {
        let f = FourierCoeffs::random_sparse(dual, &mut RngSeed::new(seed).rng());
        let a = ell2_norm(&f);
        prop_assert!((plancherel_gram_norm(&f) - a).abs() <= 1e-12 * a);
    }

    #[test]
    fn norms_scale(dual in arb_dual(), seed in any::<u64>(), re in -5.0f64..5.0, im in -5.0f64..5.0) {
        let f = FourierCoeffs::random_sparse(dual, &mut RngSeed::new(seed).rng());
        let c = Complex64::new(re, im);
        let g = f.scale(c);
        for norm in [ell_infty_norm as fn(&FourierCoeffs) -> f64, ell2_norm, ell1_norm] {
            let want = c.norm() * norm(&f);
            prop_assert!((norm(&g) - want).abs() <= 1e-12 * want.max(1.0));
        }
    }

    #[test]
    fn triangle_inequality(dual in arb_dual(), seed in any::<u64>()) {
        let mut rng = RngSeed::new(seed).rng();
        let f = FourierCoeffs::random_sparse(dual.clone(), &mut rng);
        let g = FourierCoeffs::random_sparse(dual, &mut rng);
        let s = f.add(&g).unwrap();
        for norm in [ell_infty_norm as fn(&FourierCoeffs) -> f64, ell2_norm, ell1_norm] {
            prop_assert!(norm(&s) <= norm(&f) + norm(&g) + 1e-12);
        }
    }

    #[test]
    fn convolution_associative_on_s3(seed in any::<u64>()) {
        let s3 = symmetric_group_s3();
        let mut rng = RngSeed::new(seed).rng();
        let [a, b, c]: [FourierCoeffs; 3] = std::array::from_fn(|_| FourierCoeffs::random(s3.dual().clone(), &mut rng));
        let left = convolve(&convolve(&a, &b).unwrap(), &c).unwrap();
        let right = convolve(&a, &convolve(&b, &c).unwrap()).unwrap();
        prop_assert!(left.max_abs_diff(&right).unwrap() <= 1e-12);
    }

    #[test]
    fn randomize_is_a_left_action(dual in arb_dual(), seed in any::<u64>()) {
        let mut rng = RngSeed::new(seed).rng();
        let f = FourierCoeffs::random_sparse(dual.clone(), &mut rng);
        let u = MatrixFamily::haar(dual.clone(), &mut rng);
        let v = MatrixFamily::haar(dual, &mut rng);
        let once = randomize(&f, &u.compose(&v).unwrap()).unwrap();
        let twice = randomize(&randomize(&f, &v).unwrap(), &u).unwrap();
        prop_assert!(once.max_abs_diff(&twice).unwrap() <= 1e-12);
    }

    #[test]
    fn four_unitaries_rebuild_contractions(n in 1usize..=16, radius in 0.0f64..=1.0, seed in any::<u64>()) {
        let x = random_contraction(n, radius, &mut RngSeed::new(seed).rng());
        let v = four_unitary_decomposition(&x).unwrap();
        let mut sum = v[0].clone() + &v[1] + &v[2] + &v[3];
        sum *= Complex64::new(0.5, 0.0);
        prop_assert!(qfourier::linalg::max_abs_diff(&sum, &x) <= 1e-9);
        for m in &v {
            prop_assert!(qfourier::linalg::unitarity_defect(m) <= 1e-9);
        }
    }

    #[test]
    fn coefficient_json_round_trip(dual in arb_dual(), seed in any::<u64>()) {
        let f = FourierCoeffs::random_sparse(dual.clone(), &mut RngSeed::new(seed).rng());
        let s = f.to_json().unwrap();
        let g = FourierCoeffs::from_json(&s, dual).unwrap();
        prop_assert_eq!(f.max_abs_diff(&g).unwrap(), 0.0);
    }
}

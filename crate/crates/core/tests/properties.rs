use mml_core::linalg::{random_pd, seeded_rng, MatrixJson, PdMatrix, PsdMatrix, SpectrumSpec};
use mml_core::majorization::{log_majorize, log_majorize_compound, route_disagreement};
use mml_core::means::{commuting_mean, geom_mean, mean_apply, scalar_mean, MeanSpec};
use mml_core::twobytwo::{phi_value, projection, FamilyPoint, PhiParams};
use mml_core::verify::AhQuery;
use proptest::prelude::*;

fn pair(seed: u64, n: usize) -> (PdMatrix<f64>, PdMatrix<f64>) {
    let mut rng = seeded_rng(seed);
    let a = random_pd(n, SpectrumSpec::default(), &mut rng);
    let b = random_pd(n, SpectrumSpec::default(), &mut rng);
    (a, b)
}

fn rel(x: &PsdMatrix<f64>, y: &PsdMatrix<f64>) -> f64 {
    x.hermitian().distance(y.hermitian()).unwrap() / y.op_norm().max(1e-300)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn geometric_mean_transposes(seed in any::<u64>(), n in 2usize..=5, t in 0.05f64..0.95) {
        let (a, b) = pair(seed, n);
        let ab = geom_mean(&a, b.as_psd(), t).unwrap();
        let ba = geom_mean(&b, a.as_psd(), 1.0 - t).unwrap();
        prop_assert!(rel(&ab, &ba) < 1e-10);
    }

    #[test]
    fn separate_homogeneity(seed in any::<u64>(), n in 2usize..=4, k in 0.05f64..0.95, t in 0.05f64..0.95,
                            lam in 0.1f64..10.0, mu in 0.1f64..10.0) {
        let (a, b) = pair(seed, n);
        let spec = MeanSpec::Fkt { k, t };
        let (wa, wb) = spec.separate_homogeneity().unwrap();
        let base = mean_apply(&spec, &a, b.as_psd()).unwrap();
        let sa = PdMatrix::new(a.hermitian().scale(lam)).unwrap();
        let sb = b.as_psd().scale(mu).unwrap();
        let scaled = mean_apply(&spec, &sa, &sb).unwrap();
        let expect = base.scale(lam.powf(wa) * mu.powf(wb)).unwrap();
        prop_assert!(rel(&scaled, &expect) < 1e-9);
    }

    #[test]
    fn commuting_pairs_follow_scalars(a in prop::collection::vec(0.1f64..10.0, 3), b in prop::collection::vec(0.0f64..10.0, 3),
                                      k in 0.05f64..0.95, t in 0.05f64..0.95) {
        let spec = MeanSpec::Fkt { k, t };
        let am = PdMatrix::from_diagonal(&a).unwrap();
        let bm = PsdMatrix::from_diagonal(&b).unwrap();
        let m = mean_apply(&spec, &am, &bm).unwrap();
        let exact = commuting_mean(&spec, &a, &b).unwrap();
        prop_assert!(m.hermitian().distance(exact.hermitian()).unwrap() < 1e-10 * (1.0 + exact.op_norm()));
        let s = scalar_mean(&spec, a[0], b[0]).unwrap();
        prop_assert!((exact.hermitian().matrix()[(0, 0)].re - s).abs() < 1e-12 * (1.0 + s));
    }

    #[test]
    fn ah_margin_is_jointly_scale_invariant(seed in any::<u64>(), n in 2usize..=4, k in 0.05f64..0.95, t in 0.05f64..0.95,
                                            q in 0.05f64..1.5, log_lam in -3.0f64..3.0) {
        let (a, b) = pair(seed, n);
        let query = AhQuery::new(MeanSpec::Fkt { k, t }, q).unwrap();
        let lam = 10f64.powf(log_lam);
        let m0 = query.measure(&a, b.as_psd()).unwrap().margin;
        let sa = PdMatrix::new(a.hermitian().scale(lam)).unwrap();
        let m1 = query.measure(&sa, &b.as_psd().scale(lam).unwrap()).unwrap().margin;
        prop_assert!((m0 - m1).abs() < 1e-10, "{m0} {m1}");
    }

    #[test]
    fn leading_product_routes_agree(seed in any::<u64>(), n in 2usize..=5) {
        let (a, b) = pair(seed, n);
        prop_assert!(route_disagreement(a.as_psd()).unwrap() < 1e-8);
        let direct = log_majorize(a.as_psd(), b.as_psd(), 1e-9).unwrap();
        let compound = log_majorize_compound(a.as_psd(), b.as_psd(), 1e-9).unwrap();
        prop_assert!((direct.worst_margin - compound.worst_margin).abs() < 1e-8);
    }

    #[test]
    fn phi_matches_matrix_norm(lx in -2.0f64..2.0, ly in -2.0f64..2.0, k in 0.05f64..0.95, t in 0.05f64..0.95) {
        let pt = FamilyPoint::new(10f64.powf(lx), 10f64.powf(ly)).unwrap();
        let p = PhiParams::new(k, t);
        let b: PsdMatrix<f64> = projection();
        let m = mean_apply(&MeanSpec::Fkt { k, t }, &pt.matrix().unwrap(), &b).unwrap();
        let phi = phi_value(&p, &pt);
        prop_assert!((m.op_norm() - phi).abs() <= 1e-10 * phi.max(1.0));
    }

    #[test]
    fn matrix_json_roundtrips_exactly(seed in any::<u64>(), n in 1usize..=6) {
        let mut rng = seeded_rng(seed);
        let a = random_pd::<f64, _>(n, SpectrumSpec::default(), &mut rng);
        let text = serde_json::to_string(&MatrixJson::from_matrix(a.matrix())).unwrap();
        let back: MatrixJson = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back.to_matrix::<f64>().unwrap(), a.matrix().clone());
    }
}

use fidelity::goe::GoeIntegrator;
use fidelity::gue::fidelity_gue;
use fidelity::linear_response::{b2, c_of_tau, default_rule, fidelity_lr, ResponseForm};
use fidelity::model::{Beta, EnsembleSpec, FidelityCurve, PerturbationSpec, TimeGrid};
use fidelity::runner::output::{create, records_from_curve, write_csv};
use fidelity::runner::read_csv;
use fidelity::sim::eigen::diagonalize;
use fidelity::sim::ensemble::mix;
use fidelity::sim::estimator::{central_band, pair_amplitude};
use fidelity::sim::sample_pair;
use proptest::prelude::*;

fn beta_strategy() -> impl Strategy<Value = Beta> {
    prop_oneof![Just(Beta::Orthogonal), Just(Beta::Unitary), Just(Beta::Symplectic)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gue_decreases_with_perturbation(eps in 0.0f64..15.0, d in 0.01f64..3.0, tau in 0.0f64..4.0) {
        let a = fidelity_gue(eps, tau).unwrap();
        let b = fidelity_gue(eps + d, tau).unwrap();
        prop_assert!(b <= a + 1e-15);
        prop_assert!((0.0..=1.0).contains(&b));
    }

    #[test]
    fn goe_stays_in_unit_interval(eps in 0.0f64..12.0, tau in 0.0f64..3.0) {
        let f = GoeIntegrator::default_instance().fidelity(eps, tau).unwrap();
        prop_assert!((-1e-9..=1.0 + 1e-9).contains(&f), "f({tau}) = {f}");
    }

    #[test]
    fn exponentiated_response_dominates_linear(beta in beta_strategy(), eps in 0.0f64..5.0, tau in 0.0f64..3.0) {
        let lin = fidelity_lr(beta, eps, tau, ResponseForm::Linear).unwrap();
        let exp = fidelity_lr(beta, eps, tau, ResponseForm::Exponentiated).unwrap();
        prop_assert!(exp >= lin - 1e-15);
    }

    #[test]
    fn decay_function_curvature(beta in beta_strategy(), tau in 2.2f64..6.0) {
        // C'' = 2/beta - b2(tau).
        let h = 0.05;
        let c = |t: f64| c_of_tau(beta, t, default_rule()).unwrap();
        let second = (c(tau + h) - 2.0 * c(tau) + c(tau - h)) / (h * h);
        let expected = 2.0 / beta.as_f64() - b2(beta, tau).unwrap();
        prop_assert!((second - expected).abs() < 1e-4, "{second} vs {expected}");
    }

    #[test]
    fn uniform_grid_endpoints(min in 0.0f64..2.0, span in 0.1f64..5.0, steps in 2usize..400) {
        let g = TimeGrid::uniform(min, min + span, steps).unwrap();
        prop_assert_eq!(g.len(), steps);
        prop_assert_eq!(g.taus()[0], min);
        prop_assert_eq!(g.taus()[steps - 1], min + span);
    }

    #[test]
    fn csv_keeps_every_bit(values in proptest::collection::vec(any::<f64>().prop_filter("finite", |v| v.is_finite()), 1..30)) {
        let curve = FidelityCurve {
            taus: (0..values.len()).map(|i| i as f64 / 3.0).collect(),
            values: values.clone(),
            stderr: Some(values.iter().map(|v| v.abs()).collect()),
            imag_diag: None,
        };
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bits.csv");
        write_csv(create(&path).unwrap(), &records_from_curve(&curve, "m", Beta::Unitary, 0.1)).unwrap();
        let back = read_csv(&path).unwrap();
        for (row, v) in back.iter().zip(&values) {
            prop_assert_eq!(row.f.to_bits(), v.to_bits());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn single_realization_starts_at_one(beta in beta_strategy(), seed in any::<u64>(), eps in 0.1f64..20.0) {
        let spec = EnsembleSpec::new(beta, 24).unwrap();
        let phi = PerturbationSpec::new(eps).unwrap().phi(24);
        let pair = sample_pair(&spec, phi, seed, 0, 0).unwrap();
        let base = diagonalize(&pair.h0).unwrap();
        let pert = diagonalize(&mix(&pair.h0, &pair.h1, phi)).unwrap();
        let band = central_band(&spec, 0.5).unwrap();
        let (re, im) = pair_amplitude(&base, &pert, band, &[0.0, 0.7]);
        prop_assert!((re[0] - 1.0).abs() <= 1e-12);
        prop_assert!(im[0].abs() <= 1e-12);
        prop_assert!(re[1].hypot(im[1]) <= 1.0 + 1e-12);
    }
}

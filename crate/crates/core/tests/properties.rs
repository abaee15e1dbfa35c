use proptest::prelude::*;

use qsl_core::bounds::{bound_set, classify_regime, envelope_angle};
use qsl_core::spectral::{
    dual_state, energy_moments, overlap_magnitude, qutrit_from_moments, validate_state, SpectralState,
};

fn arb_state() -> impl Strategy<Value = SpectralState> {
    prop::collection::vec((0.0f64..1.0, 0.01f64..1.0), 1..8).prop_map(|raw| {
        let total: f64 = raw.iter().map(|(_, w)| w).sum();
        let levels: Vec<(f64, f64)> = raw.iter().map(|&(e, w)| (e, w / total)).collect();
        validate_state(&levels).unwrap()
    })
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    a == b || (a - b).abs() <= rel * a.abs().max(b.abs())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn overlap_is_a_probability_amplitude(s in arb_state(), t in 0.0f64..200.0) {
        let g = overlap_magnitude(&s, t);
        prop_assert!((0.0..=1.0 + 1e-12).contains(&g));
    }

    #[test]
    fn dual_preserves_overlap_magnitude(s in arb_state(), t in 0.0f64..200.0) {
        let d = dual_state(&s);
        prop_assert!((overlap_magnitude(&s, t) - overlap_magnitude(&d, t)).abs() <= 1e-12);
    }

    #[test]
    fn dual_reflects_moments_and_swaps_bounds(s in arb_state()) {
        let m = energy_moments(&s, None).unwrap();
        let md = energy_moments(&dual_state(&s), None).unwrap();
        prop_assert!((md.mean - (m.emax - m.mean)).abs() <= 1e-12);
        prop_assert!((md.sigma - m.sigma).abs() <= 1e-12);
        let (b, bd) = (bound_set(&m), bound_set(&md));
        prop_assert!(close(b.tau_ml, bd.tau_ml_dual, 1e-9));
        prop_assert!(close(b.tau_ml_dual, bd.tau_ml, 1e-9));
        prop_assert_eq!(classify_regime(&md).regime, classify_regime(&m).regime.dual());
    }

    #[test]
    fn energy_shift_leaves_bounds_and_magnitude_unchanged(
        s in arb_state(), shift in -5.0f64..5.0, t in 0.0f64..50.0,
    ) {
        let shifted = s.shifted(shift).unwrap();
        prop_assert!((overlap_magnitude(&s, t) - overlap_magnitude(&shifted, t)).abs() <= 1e-12);
        let b = bound_set(&energy_moments(&s, None).unwrap());
        let bs = bound_set(&energy_moments(&shifted, None).unwrap());
        prop_assert!(close(b.tau_mt, bs.tau_mt, 1e-9));
        prop_assert!(close(b.tau_ml, bs.tau_ml, 1e-9));
        prop_assert!(close(b.tau_ml_dual, bs.tau_ml_dual, 1e-9));
    }

    #[test]
    fn qsl_never_undercuts_bandwidth_bound(s in arb_state()) {
        let b = bound_set(&energy_moments(&s, None).unwrap());
        prop_assert!(b.tau_qsl >= b.tau_bw * (1.0 - 1e-12));
    }

    #[test]
    fn envelope_is_nondecreasing(s in arb_state(), t in 0.0f64..20.0, dt in 0.0f64..5.0) {
        let b = bound_set(&energy_moments(&s, None).unwrap());
        prop_assert!(envelope_angle(t + dt, &b) >= envelope_angle(t, &b) - 1e-15);
    }

    #[test]
    fn envelope_bounds_the_evolution(s in arb_state(), t in 0.0f64..20.0) {
        let b = bound_set(&energy_moments(&s, None).unwrap());
        let angle = overlap_magnitude(&s, t).min(1.0).acos();
        prop_assert!(angle <= envelope_angle(t, &b) + 1e-3);
    }

    #[test]
    fn qutrit_reproduces_requested_moments(
        mean in 0.05f64..0.95, frac in 0.05f64..0.95, eta in 0.1f64..0.9,
    ) {
        let sigma = frac * (mean * (1.0 - mean)).sqrt();
        match qutrit_from_moments(mean, sigma, eta, 1.0) {
            Ok(s) => {
                let m = energy_moments(&s, None).unwrap();
                prop_assert!((m.mean - mean).abs() <= 1e-12);
                prop_assert!((m.sigma - sigma).abs() <= 1e-12);
            }
            Err(e) => {
                let infeasible = matches!(e, qsl_core::Error::InfeasibleMoments { .. });
                prop_assert!(infeasible);
            }
        }
    }
}

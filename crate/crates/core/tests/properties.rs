//! Property tests over randomly drawn admissible parameters.

use proptest::prelude::*;

use spp_scatter::analysis::{dressed_resonances, locate_peaks, measure_fwhm};
use spp_scatter::model::{reflectance, Detuning, LambdaParams, TwoLevelParams};
use spp_scatter::oracle::solve_stationary_system;

fn tls_strategy() -> impl Strategy<Value = TwoLevelParams> {
    (1e-3..10.0_f64, 0.0..5.0_f64).prop_map(|(gamma, gamma_prime)| TwoLevelParams {
        gamma,
        gamma_prime,
        omega1: 0.0,
    })
}

fn lambda_strategy() -> impl Strategy<Value = LambdaParams> {
    (
        0.05..2.0_f64,
        0.2..10.0_f64,
        -10.0..10.0_f64,
        0.0..5.0_f64,
        0.0..1.0_f64,
        0.0..0.5_f64,
    )
        .prop_map(|(coupling, v_g, delta, rabi, gamma_prime, gamma2)| LambdaParams {
            coupling,
            v_g,
            omega1: 0.0,
            delta,
            rabi,
            gamma_prime,
            gamma2,
        })
}

proptest! {
    #[test]
    fn tls_peak_value_is_exact(p in tls_strategy()) {
        let r = reflectance(p.reflection(Detuning::from_delta(0.0)).unwrap());
        prop_assert!((r - p.peak_reflectance()).abs() < 1e-14);
    }

    #[test]
    fn tls_half_maximum_at_analytic_width(p in tls_strategy()) {
        let peak = p.peak_reflectance();
        for sign in [-1.0, 1.0] {
            let d = Detuning::from_delta(sign * p.analytic_fwhm() / 2.0);
            let r = reflectance(p.reflection(d).unwrap());
            prop_assert!((r - peak / 2.0).abs() < 1e-14);
        }
    }

    #[test]
    fn tls_reflectance_decreases_away_from_resonance(
        p in tls_strategy(),
        d1 in 0.0..20.0_f64,
        gap in 1e-6..20.0_f64,
    ) {
        let r1 = reflectance(p.reflection(Detuning::from_delta(d1)).unwrap());
        let r2 = reflectance(p.reflection(Detuning::from_delta(d1 + gap)).unwrap());
        prop_assert!(r2 < r1);
        // Even in the detuning.
        let rm = reflectance(p.reflection(Detuning::from_delta(-d1)).unwrap());
        prop_assert!((rm - r1).abs() < 1e-14);
    }

    #[test]
    fn lambda_amplitude_is_passive(p in lambda_strategy(), x in -20.0..20.0_f64) {
        match p.reflection(Detuning::from_x(x)) {
            Ok(r) => prop_assert!(r.norm() <= 1.0 + 1e-9),
            // Only the measure-zero degeneracy may refuse.
            Err(spp_scatter::Error::SingularPoint { .. }) => {}
            Err(e) => prop_assert!(false, "unexpected error: {e}"),
        }
    }

    #[test]
    fn lambda_transparency_holds_without_metastable_loss(mut p in lambda_strategy()) {
        p.gamma2 = 0.0;
        prop_assume!(p.rabi > 1e-9);
        let r = p.reflection(Detuning::from_x(-p.delta)).unwrap();
        prop_assert_eq!(reflectance(r), 0.0);
    }

    #[test]
    fn dressed_roots_carry_the_invariant_amplitude(mut p in lambda_strategy()) {
        p.gamma2 = 0.0;
        let g = p.guided_rate();
        let target = g / (g + p.gamma_prime);
        let roots = dressed_resonances(&p);
        prop_assert!((roots.upper * roots.lower + p.rabi * p.rabi / 4.0).abs() < 1e-9);
        for x in [roots.upper, roots.lower] {
            prop_assume!((x + p.delta).abs() > 1e-9);
            let r = p.reflection(Detuning::from_x(x)).unwrap();
            prop_assert!((r.norm() - target).abs() < 1e-9);
        }
    }

    #[test]
    fn oracle_flux_and_magnitude_agree_with_closed_form(
        mut p in lambda_strategy(),
        x in -15.0..15.0_f64,
    ) {
        p.gamma_prime = 0.0;
        p.gamma2 = 0.0;
        prop_assume!((x + p.delta).abs() > 1e-6 || p.rabi > 1e-6);
        let s = solve_stationary_system(&p, x).unwrap();
        prop_assert!((s.flux() - 1.0).abs() < 1e-10);
        prop_assert!((s.r.re + s.r.norm_sqr()).abs() < 1e-10);
        let closed = p.reflection(Detuning::from_x(x)).unwrap();
        prop_assert!((s.r.norm() - closed.norm()).abs() < 1e-10);
    }

    #[test]
    fn lossy_oracle_flux_is_bounded(p in lambda_strategy(), x in -15.0..15.0_f64) {
        let s = solve_stationary_system(&p, x).unwrap();
        prop_assert!(s.flux() <= 1.0 + 1e-10);
    }

    #[test]
    fn control_off_reduces_to_equivalent_two_level(mut p in lambda_strategy(), x in -5.0..5.0_f64) {
        p.rabi = 0.0;
        p.gamma2 = 0.0;
        prop_assume!((x + p.delta).abs() > 1e-6);
        let lambda = reflectance(p.reflection(Detuning::from_x(x)).unwrap());
        let tls = reflectance(p.tls_equivalent().reflection(Detuning::from_delta(x)).unwrap());
        prop_assert!((lambda - tls).abs() < 1e-12);
    }

    #[test]
    fn measured_width_matches_synthetic_lorentzian(
        w in 0.01..2.0_f64,
        center in -3.0..3.0_f64,
        height in 0.05..1.0_f64,
    ) {
        let model = move |x: f64| -> spp_scatter::Result<spp_scatter::ComplexAmplitude> {
            let r = height / (1.0 + (2.0 * (x - center) / w).powi(2));
            Ok(spp_scatter::ComplexAmplitude::new(r.sqrt(), 0.0))
        };
        let peaks = locate_peaks(&model, -12.0, 12.0, 2048).unwrap();
        prop_assert_eq!(peaks.len(), 1);
        let m = measure_fwhm(&model, &peaks[0]).unwrap();
        let got = m.fwhm.unwrap();
        prop_assert!(((got - w) / w).abs() < 1e-8, "w = {}, measured {}", w, got);
    }
}

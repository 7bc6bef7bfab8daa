//! Acceptance suite: one test per criterion, each printing a pass line with
//! the measured quantity (run with `--nocapture` to see them all).

use std::process::Command;

use spp_scatter::analysis::{
    design_control_field, dressed_resonances, effective_model, locate_peaks, measure_fwhm,
    narrow_line, AxisModel, FixedRates,
};
use spp_scatter::figures::{analyze_curve, preset, FigureId};
use spp_scatter::model::{reflectance, Axis, Detuning, LambdaParams, SpectrumModel, TwoLevelParams};
use spp_scatter::oracle::{convergence_study, solve_stationary_system};
use spp_scatter::verify::{flux_battery_points, preset_lambda_params};

fn pass(n: usize, what: &str) {
    println!("[PASS] acceptance {n}: {what}");
}

#[test]
fn criterion_01_tls_resonance_value() {
    let p = TwoLevelParams::new(0.1, 0.1, 0.0).unwrap();
    let r = reflectance(p.reflection(Detuning::from_delta(0.0)).unwrap());
    let err = (r - 0.25).abs();
    assert!(err < 1e-12, "R(0) = {r}, |err| = {err:e}");
    pass(1, &format!("R(0) = {r} for equal rates (|err| = {err:e} < 1e-12)"));
}

#[test]
fn criterion_02_tls_width_law() {
    let gamma_prime = 0.1;
    for gamma in [0.1, 0.5, 1.0, 5.0] {
        let p = TwoLevelParams::new(gamma, gamma_prime, 0.0).unwrap();
        let model = SpectrumModel::TwoLevel(p);
        let am = AxisModel {
            model: &model,
            axis: Axis::Delta,
        };
        let w = 5.0 * (gamma + gamma_prime);
        let peaks = locate_peaks(&am, -w, w, 512).unwrap();
        assert_eq!(peaks.len(), 1, "gamma = {gamma}");
        let fwhm = measure_fwhm(&am, &peaks[0]).unwrap().fwhm.unwrap();
        let expected = gamma + gamma_prime;
        let rel = ((fwhm - expected) / expected).abs();
        assert!(rel < 1e-6, "gamma = {gamma}: fwhm {fwhm} vs {expected}, rel {rel:e}");
    }
    pass(2, "measured FWHM = Γ+Γ′ within 1e-6 relative for Γ ∈ {0.1, 0.5, 1, 5}");
}

#[test]
fn criterion_03_transparency() {
    let mut worst = 0.0_f64;
    for delta in [0.0, 5.0, 10.0, 15.0] {
        let p = LambdaParams::new(1.0, 10.0, 0.0, delta, 2.0, 0.1, 0.0).unwrap();
        let r = reflectance(p.reflection(Detuning::from_x(-delta)).unwrap());
        worst = worst.max(r);
        assert!(r < 1e-24, "delta = {delta}: R = {r:e}");
    }
    pass(3, &format!("R(x = −δ) ≤ {worst:e} < 1e-24 for δ ∈ {{0, 5, 10, 15}}"));
}

#[test]
fn criterion_04_oracle_equivalence() {
    let mut worst = 0.0_f64;
    let mut grids = 0;
    for id in [FigureId::Fig3, FigureId::Fig4, FigureId::Fig5] {
        let pre = preset(id);
        for curve in &pre.curves {
            let SpectrumModel::Lambda(p) = curve.model else {
                continue;
            };
            grids += 1;
            for k in 0..=200 {
                let x = pre.window.0 + (pre.window.1 - pre.window.0) * f64::from(k) / 200.0;
                let closed = p.reflection(Detuning::from_x(x)).unwrap();
                let oracle = solve_stationary_system(&p, x).unwrap();
                let diff = (oracle.r.norm() - closed.norm()).abs();
                worst = worst.max(diff);
                assert!(diff < 1e-10, "{} at x = {x}: diff {diff:e}", curve.label);
            }
        }
    }
    pass(
        4,
        &format!("boundary-matching oracle matches the closed form on {grids} 201-point grids (max diff {worst:e} < 1e-10)"),
    );
}

#[test]
fn criterion_05_flux_conservation() {
    let mut worst = 0.0_f64;
    let points = flux_battery_points();
    assert_eq!(points.len(), 50);
    for (p, x) in points {
        let s = solve_stationary_system(&p, x).unwrap();
        let err = (s.flux() - 1.0).abs();
        worst = worst.max(err);
        assert!(err < 1e-10, "flux error {err:e} at x = {x}");
    }
    pass(5, &format!("lossless flux conserved over 50 fixed draws (max error {worst:e} < 1e-10)"));
}

#[test]
fn criterion_06_lattice_convergence() {
    // Narrow line of the driven fig4 preset (rate reading of Γ = 0.1).
    let p = LambdaParams::new(0.1_f64.sqrt(), 1.0, 0.0, 5.0, 2.0, 0.1, 0.0).unwrap();
    let (center, _) = narrow_line(&p).unwrap();
    let spacings = [0.04, 0.02, 0.01, 0.005];
    let study = convergence_study(&p, center, &spacings).unwrap();
    assert!(
        study.errors.windows(2).all(|w| w[1] < w[0]),
        "errors not decreasing: {:?}",
        study.errors
    );
    assert!(
        study.fitted_order >= 0.9,
        "fitted order {} < 0.9 (errors {:?})",
        study.fitted_order,
        study.errors
    );
    pass(
        6,
        &format!(
            "lattice error falls over {} halvings with fitted order {:.2} ≥ 0.9",
            spacings.len() - 1,
            study.fitted_order
        ),
    );
}

#[test]
fn criterion_07_dressed_amplitude_identity() {
    let mut worst = 0.0_f64;
    for delta in [5.0, 10.0, 15.0] {
        let p = LambdaParams::new(1.0, 10.0, 0.0, delta, 2.0, 0.1, 0.0).unwrap();
        let g = p.guided_rate();
        let target = g / (g + p.gamma_prime);
        let roots = dressed_resonances(&p);
        for x in [roots.upper, roots.lower] {
            let r = p.reflection(Detuning::from_x(x)).unwrap();
            let err = (r.norm() - target).abs();
            worst = worst.max(err);
            assert!(err <= 1e-12, "delta = {delta}, x = {x}: |r| err {err:e}");
        }
    }
    pass(7, &format!("|r| = g/(g+Γ′) at both dressed roots, max dev {worst:e} ≤ 1e-12"));
}

#[test]
fn criterion_08_narrowing_and_intensity_preservation() {
    let pre = preset(FigureId::Fig5);
    for variant in ["coupling", "rate"] {
        let mut widths = Vec::new();
        let mut amps = Vec::new();
        for curve in pre.curves.iter().filter(|c| c.label.ends_with(variant)) {
            let report = analyze_curve(&curve.model, pre.window).unwrap();
            let narrow = report
                .peaks
                .iter()
                .find(|e| e.kind == "narrow")
                .unwrap_or_else(|| panic!("{}: no narrow line", curve.label));
            widths.push(narrow.fwhm);
            amps.push(narrow.amplitude);
        }
        assert_eq!(widths.len(), 3);
        assert!(
            widths[0] > widths[1] && widths[1] > widths[2],
            "{variant}: widths {widths:?} not strictly decreasing"
        );
        let (lo, hi) = amps
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &a| {
                (l.min(a), h.max(a))
            });
        let spread = hi / lo - 1.0;
        assert!(spread < 0.01, "{variant}: amplitude spread {spread}");
    }
    pass(
        8,
        "narrow-line FWHM strictly decreases across δ = 5 → 10 → 15 with amplitude spread < 1% (both readings)",
    );
}

#[test]
fn criterion_09_effective_model_accuracy() {
    for delta in [10.0, 15.0] {
        let p = LambdaParams::new(1.0, 10.0, 0.0, delta, 2.0, 0.1, 0.0).unwrap();
        let eff = effective_model(&p).unwrap();
        let (center, fwhm) = narrow_line(&p).unwrap();
        let center_tol = eff.validity * eff.validity * center.abs();
        let center_err = (eff.predicted_center - center).abs();
        assert!(
            center_err <= center_tol,
            "delta = {delta}: center err {center_err:e} > {center_tol:e}"
        );
        let fwhm_rel = ((eff.predicted_fwhm - fwhm) / fwhm).abs();
        assert!(fwhm_rel <= 0.2, "delta = {delta}: fwhm rel err {fwhm_rel}");
    }
    pass(9, "effective model hits the measured center within (Ω/2δ)² and the width within 20%");
}

#[test]
fn criterion_10_inverse_design_round_trip() {
    let fixed = FixedRates {
        coupling: 1.0,
        v_g: 10.0,
        gamma_prime: 0.1,
        gamma2: 0.0,
    };
    let forward = LambdaParams::new(1.0, 10.0, 0.0, 10.0, 2.0, 0.1, 0.0).unwrap();
    let (center, fwhm) = narrow_line(&forward).unwrap();
    let design = design_control_field(center, fwhm, &fixed).unwrap();
    let delta_rel = ((design.delta - 10.0) / 10.0).abs();
    let rabi_rel = ((design.rabi - 2.0) / 2.0).abs();
    assert!(design.iterations <= 100, "{} iterations", design.iterations);
    assert!(delta_rel < 1e-6, "delta rel err {delta_rel:e}");
    assert!(rabi_rel < 1e-6, "rabi rel err {rabi_rel:e}");
    pass(
        10,
        &format!(
            "design recovered (δ, Ω) to ({delta_rel:.1e}, {rabi_rel:.1e}) relative in {} iterations",
            design.iterations
        ),
    );
}

#[test]
fn criterion_11_figure_determinism() {
    let bin = env!("CARGO_BIN_EXE_spp-scatter");
    let dir_a = tempfile::tempdir().unwrap();
    let dir_b = tempfile::tempdir().unwrap();
    for dir in [&dir_a, &dir_b] {
        let status = Command::new(bin)
            .args(["figure", "fig4", "--out"])
            .arg(dir.path())
            .status()
            .expect("figure invocation");
        assert!(status.success());
    }
    let mut names: Vec<_> = std::fs::read_dir(dir_a.path())
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .collect();
    names.sort();
    assert_eq!(names.len(), 6, "5 curve CSVs + 1 report expected");
    for name in &names {
        let a = std::fs::read(dir_a.path().join(name)).unwrap();
        let b = std::fs::read(dir_b.path().join(name)).unwrap();
        assert_eq!(a, b, "{name:?} differs between invocations");
    }
    pass(11, "two consecutive `figure fig4` invocations are byte-identical (6 files)");
}

#[test]
fn verify_battery_is_green() {
    // The CLI `verify` battery doubles as a compact regression net; keep it
    // green alongside the numbered criteria.
    for check in spp_scatter::verify::run_all() {
        assert!(check.passed, "{}: {}", check.name, check.detail);
    }
    let _ = preset_lambda_params();
}

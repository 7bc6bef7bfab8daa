//! Domain types and closed-form single-photon reflection coefficients for a
//! two-level and a Λ-type three-level emitter side-coupled to a 1D photonic
//! continuum (e.g. the surface-plasmon mode of a metal nanowire).
//!
//! # Unit conventions
//!
//! | Quantity | Field | Convention |
//! |----------|-------|------------|
//! | guided decay rate (two-level) | `gamma` | absolute frequency units, ħ = 1 |
//! | loss to unguided channels | `gamma_prime` | same units; ≥ 0 |
//! | emitter–continuum coupling (Λ) | `coupling` | enters reflection only as g = Γ²/v_g |
//! | group velocity | `v_g` | presets use v_g = 1 so g carries frequency units |
//! | control Rabi frequency / detuning | `rabi`, `delta` | frequency units |
//! | metastable-state loss | `gamma2` | frequency units; ≥ 0 |
//!
//! Nothing in this module normalizes by `gamma_prime`; normalized axes such
//! as (Δ − f_c)/Γ′ are a presentation concern handled at figure emission.
//!
//! # Detuning signs
//!
//! A [`Detuning`] stores Δ = ω₁ − E (emitter minus photon), the convention
//! natural for the two-level coefficient. The Λ-emitter coefficient uses the
//! opposite photon detuning x = E − ω₁ = −Δ. Both constructors and both
//! accessors are provided so every call site states which sign it means, and
//! sampled spectra carry an explicit [`Axis`] tag.
//!
//! # Sign of the Λ reflection coefficient
//!
//! The Λ closed form is kept verbatim even though its overall sign is
//! opposite to the flux-conserving convention obeyed by the two-level
//! coefficient (which satisfies Re r = −|r|² when lossless). All physical
//! outputs (reflectance, peak positions, widths) depend only on |r|;
//! transmission is never derived from the closed form — it comes from the
//! scattering oracles in [`crate::oracle`].

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

/// Dimensionless complex scattering amplitude.
pub type ComplexAmplitude = Complex64;

/// Denominator floor below which a closed-form evaluation is reported as a
/// singular point rather than divided through.
pub const DENOMINATOR_GUARD: f64 = 1e-300;

/// Reflection (or transmission) probability |amp|².
pub fn reflectance(amp: ComplexAmplitude) -> f64 {
    amp.norm_sqr()
}

/// Which sign convention a sampled detuning axis uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    /// Δ = ω₁ − E, emitter minus photon.
    Delta,
    /// x = E − ω₁, photon minus emitter.
    X,
}

impl Axis {
    pub fn detuning(self, value: f64) -> Detuning {
        match self {
            Axis::Delta => Detuning::from_delta(value),
            Axis::X => Detuning::from_x(value),
        }
    }
}

/// A detuning with both sign conventions attached.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Detuning {
    delta: f64,
}

impl Detuning {
    /// From Δ = ω₁ − E.
    pub fn from_delta(delta: f64) -> Self {
        Detuning { delta }
    }

    /// From the photon detuning x = E − ω₁.
    pub fn from_x(x: f64) -> Self {
        Detuning { delta: -x }
    }

    /// Δ = ω₁ − E.
    pub fn delta(self) -> f64 {
        self.delta
    }

    /// x = E − ω₁ = −Δ.
    pub fn x(self) -> f64 {
        -self.delta
    }
}

fn require(ok: bool, name: &'static str, value: f64, constraint: &'static str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            constraint,
        })
    }
}

/// Two-level emitter coupled to the guided continuum.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TwoLevelParams {
    /// Decay rate Γ into the guided modes.
    pub gamma: f64,
    /// Decay rate Γ′ into all other channels.
    pub gamma_prime: f64,
    /// Transition frequency ω₁ of |g⟩ ↔ |e⟩.
    pub omega1: f64,
}

impl TwoLevelParams {
    pub fn new(gamma: f64, gamma_prime: f64, omega1: f64) -> Result<Self> {
        let p = TwoLevelParams {
            gamma,
            gamma_prime,
            omega1,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        require(
            self.gamma.is_finite() && self.gamma > 0.0,
            "gamma",
            self.gamma,
            "gamma > 0",
        )?;
        require(
            self.gamma_prime.is_finite() && self.gamma_prime >= 0.0,
            "gamma_prime",
            self.gamma_prime,
            "gamma_prime >= 0",
        )?;
        require(self.omega1.is_finite(), "omega1", self.omega1, "finite")
    }

    /// Reflection coefficient r = −1 / (1 + Γ′/Γ − 2iΔ/Γ).
    pub fn reflection(&self, detuning: Detuning) -> Result<ComplexAmplitude> {
        self.validate()?;
        let den = Complex64::new(
            1.0 + self.gamma_prime / self.gamma,
            -2.0 * detuning.delta() / self.gamma,
        );
        let r = -den.inv();
        debug_assert!(r.norm() <= 1.0 + 1e-9);
        Ok(r)
    }

    /// On-resonance reflectance (Γ/(Γ+Γ′))².
    pub fn peak_reflectance(&self) -> f64 {
        let a = self.gamma / (self.gamma + self.gamma_prime);
        a * a
    }

    /// The reflection line is a Lorentzian of full width Γ + Γ′ in Δ.
    pub fn analytic_fwhm(&self) -> f64 {
        self.gamma + self.gamma_prime
    }
}

/// Λ-type three-level emitter driven by a classical control field.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LambdaParams {
    /// Emitter–continuum coupling constant Γ; the reflection depends on it
    /// only through the guided rate g = Γ²/v_g.
    pub coupling: f64,
    /// Group velocity of the guided photons.
    pub v_g: f64,
    /// Transition frequency ω₁ of |g⟩ ↔ |e⟩.
    pub omega1: f64,
    /// Control-field detuning δ.
    pub delta: f64,
    /// Control-field Rabi frequency Ω.
    pub rabi: f64,
    /// Excited-state loss Γ′.
    pub gamma_prime: f64,
    /// Metastable-state loss Γ₂.
    pub gamma2: f64,
}

impl LambdaParams {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        coupling: f64,
        v_g: f64,
        omega1: f64,
        delta: f64,
        rabi: f64,
        gamma_prime: f64,
        gamma2: f64,
    ) -> Result<Self> {
        let p = LambdaParams {
            coupling,
            v_g,
            omega1,
            delta,
            rabi,
            gamma_prime,
            gamma2,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        require(
            self.coupling.is_finite() && self.coupling > 0.0,
            "coupling",
            self.coupling,
            "coupling > 0",
        )?;
        require(
            self.v_g.is_finite() && self.v_g > 0.0,
            "v_g",
            self.v_g,
            "v_g > 0",
        )?;
        require(
            self.rabi.is_finite() && self.rabi >= 0.0,
            "rabi",
            self.rabi,
            "rabi >= 0",
        )?;
        require(
            self.gamma_prime.is_finite() && self.gamma_prime >= 0.0,
            "gamma_prime",
            self.gamma_prime,
            "gamma_prime >= 0",
        )?;
        require(
            self.gamma2.is_finite() && self.gamma2 >= 0.0,
            "gamma2",
            self.gamma2,
            "gamma2 >= 0",
        )?;
        require(self.delta.is_finite(), "delta", self.delta, "finite")?;
        require(self.omega1.is_finite(), "omega1", self.omega1, "finite")
    }

    /// Effective guided decay rate g = Γ²/v_g.
    pub fn guided_rate(&self) -> f64 {
        self.coupling * self.coupling / self.v_g
    }

    /// Reflection coefficient of the driven Λ emitter, written verbatim as
    ///
    /// ```text
    /// r = −i g (ω₁ − E − δ − iΓ₂)
    ///     ─────────────────────────────────────────────────────────────
    ///     (E − ω₁ + iΓ′)(E − ω₁ + δ + iΓ₂) − Ω²/4 + i g (E − ω₁ + δ + iΓ₂)
    /// ```
    ///
    /// with g = Γ²/v_g and x = E − ω₁ the photon detuning. No symbolic
    /// cancellation is applied; the degenerate point Ω = 0, Γ₂ = 0, x = −δ
    /// makes the denominator vanish and is reported as a singular point.
    pub fn reflection(&self, detuning: Detuning) -> Result<ComplexAmplitude> {
        self.validate()?;
        let x = detuning.x();
        let g = self.guided_rate();
        let num = Complex64::new(0.0, -g) * Complex64::new(-x - self.delta, -self.gamma2);
        let a = Complex64::new(x, self.gamma_prime);
        let b = Complex64::new(x + self.delta, self.gamma2);
        let den = a * b - self.rabi * self.rabi / 4.0 + Complex64::new(0.0, g) * b;
        if den.norm() < DENOMINATOR_GUARD {
            return Err(Error::SingularPoint {
                modulus: den.norm(),
            });
        }
        let r = num / den;
        debug_assert!(r.re.is_finite() && r.im.is_finite());
        debug_assert!(r.norm() <= 1.0 + 1e-9);
        Ok(r)
    }

    /// Two-level parameters under which the two-level coefficient reproduces
    /// this emitter's reflectance with the control field off.
    ///
    /// With Ω = 0 and Γ₂ = 0 the Λ magnitude spectrum is a Lorentzian with
    /// peak (g/(g+Γ′))² and full width 2(g+Γ′); the two-level formula yields
    /// the same curve for Γ_eq = 2g, Γ′_eq = 2Γ′ (the spectra are even, so
    /// the Δ = −x sign flip is invisible in magnitude). The factor of two is
    /// a deliberate bridge between the two parameterizations — both formulas
    /// are kept verbatim rather than rescaling either one.
    pub fn tls_equivalent(&self) -> TwoLevelParams {
        TwoLevelParams {
            gamma: 2.0 * self.guided_rate(),
            gamma_prime: 2.0 * self.gamma_prime,
            omega1: self.omega1,
        }
    }
}

/// Model selector used by spectrum sampling, figures and the CLI.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "model")]
pub enum SpectrumModel {
    #[serde(rename = "tls")]
    TwoLevel(TwoLevelParams),
    #[serde(rename = "lambda")]
    Lambda(LambdaParams),
}

impl SpectrumModel {
    /// The axis this model's formulas are written in.
    pub fn native_axis(&self) -> Axis {
        match self {
            SpectrumModel::TwoLevel(_) => Axis::Delta,
            SpectrumModel::Lambda(_) => Axis::X,
        }
    }

    /// Reflection amplitude at a detuning value interpreted on `axis`.
    pub fn reflection_on(&self, axis: Axis, value: f64) -> Result<ComplexAmplitude> {
        let d = axis.detuning(value);
        match self {
            SpectrumModel::TwoLevel(p) => p.reflection(d),
            SpectrumModel::Lambda(p) => p.reflection(d),
        }
    }

    pub fn gamma_prime(&self) -> f64 {
        match self {
            SpectrumModel::TwoLevel(p) => p.gamma_prime,
            SpectrumModel::Lambda(p) => p.gamma_prime,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            SpectrumModel::TwoLevel(p) => p.validate(),
            SpectrumModel::Lambda(p) => p.validate(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tls(gamma: f64, gamma_prime: f64) -> TwoLevelParams {
        TwoLevelParams::new(gamma, gamma_prime, 0.0).unwrap()
    }

    fn lls(coupling: f64, v_g: f64, delta: f64, rabi: f64, gp: f64, g2: f64) -> LambdaParams {
        LambdaParams::new(coupling, v_g, 0.0, delta, rabi, gp, g2).unwrap()
    }

    #[test]
    fn tls_resonance_equal_rates_reflects_one_quarter() {
        let r = tls(0.1, 0.1).reflection(Detuning::from_delta(0.0)).unwrap();
        assert!((r.re + 0.5).abs() < 1e-15 && r.im.abs() < 1e-15);
        assert!((reflectance(r) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn tls_lossless_resonance_is_perfect_mirror() {
        let r = tls(0.1, 0.0).reflection(Detuning::from_delta(0.0)).unwrap();
        assert!((r.re + 1.0).abs() < 1e-15 && r.im.abs() < 1e-15);
        assert!((reflectance(r) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn tls_half_maximum_point() {
        // Δ = (Γ+Γ′)/2 is the analytic half-maximum point.
        let p = tls(0.1, 0.1);
        let r = p.reflection(Detuning::from_delta(0.1)).unwrap();
        assert!((reflectance(r) - 0.125).abs() < 1e-15);
    }

    #[test]
    fn tls_rejects_nonpositive_gamma() {
        assert!(matches!(
            TwoLevelParams::new(0.0, 0.1, 0.0),
            Err(Error::InvalidParameter { name: "gamma", .. })
        ));
        let bad = TwoLevelParams {
            gamma: -1.0,
            gamma_prime: 0.0,
            omega1: 0.0,
        };
        assert!(bad.reflection(Detuning::from_delta(0.0)).is_err());
    }

    #[test]
    fn reflectance_examples() {
        assert_eq!(reflectance(Complex64::new(-0.5, 0.0)), 0.25);
        assert_eq!(reflectance(Complex64::new(0.0, 0.0)), 0.0);
        assert!((reflectance(Complex64::new(0.6, 0.8)) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn guided_rate_examples() {
        assert!((lls(0.1, 1.0, 0.0, 0.0, 0.0, 0.0).guided_rate() - 0.01).abs() < 1e-17);
        assert!((lls(1.0, 10.0, 0.0, 0.0, 0.0, 0.0).guided_rate() - 0.1).abs() < 1e-16);
        assert!((lls(0.5, 1.0, 0.0, 0.0, 0.0, 0.0).guided_rate() - 0.25).abs() < 1e-16);
    }

    #[test]
    fn lambda_transparency_at_two_photon_resonance() {
        // Γ₂ = 0 and x = −δ make the numerator vanish exactly.
        for delta in [0.0, 5.0, 10.0, 15.0] {
            let p = lls(1.0, 10.0, delta, 2.0, 0.1, 0.0);
            let r = p.reflection(Detuning::from_x(-delta)).unwrap();
            assert_eq!(reflectance(r), 0.0);
        }
    }

    #[test]
    fn lambda_lossless_resonance_with_decoupled_third_level() {
        // Ω = 0, Γ′ = Γ₂ = 0, x = 0 (δ ≠ 0 so the spectator factor is finite).
        for delta in [1.0, 5.0] {
            let p = lls(0.3, 1.0, delta, 0.0, 0.0, 0.0);
            let r = p.reflection(Detuning::from_x(0.0)).unwrap();
            assert!((r.norm() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn lambda_degenerate_point_reports_singular() {
        // Ω = 0, Γ₂ = 0, x = −δ collapses the denominator.
        let p = lls(0.3, 1.0, 2.0, 0.0, 0.1, 0.0);
        assert!(matches!(
            p.reflection(Detuning::from_x(-2.0)),
            Err(Error::SingularPoint { .. })
        ));
    }

    #[test]
    fn lambda_dressed_resonance_amplitude() {
        // At the real roots of x(x+δ) = Ω²/4 with Γ₂ = 0 the amplitude is
        // g/(g+Γ′) independent of δ and Ω; here g = 0.1, so |r|² = 0.25.
        let p = lls(1.0, 10.0, 5.0, 2.0, 0.1, 0.0);
        let root = (-5.0 - 29.0_f64.sqrt()) / 2.0;
        let r = p.reflection(Detuning::from_x(root)).unwrap();
        assert!((reflectance(r) - 0.25).abs() < 1e-12);
        // Confirmed by a dense grid search for the maximum around the root.
        let best = (-200..=200)
            .map(|k| root + f64::from(k) * 1e-4)
            .map(|x| reflectance(p.reflection(Detuning::from_x(x)).unwrap()))
            .fold(0.0, f64::max);
        assert!(best <= 0.25 + 1e-12);
        assert!((best - 0.25).abs() < 1e-6);
    }

    #[test]
    fn tls_equivalent_bridge_values() {
        let e = lls(1.0, 10.0, 0.0, 0.0, 0.1, 0.0).tls_equivalent();
        assert!((e.gamma - 0.2).abs() < 1e-15 && (e.gamma_prime - 0.2).abs() < 1e-15);
        let e = lls(0.1, 1.0, 0.0, 0.0, 0.1, 0.0).tls_equivalent();
        assert!((e.gamma - 0.02).abs() < 1e-16 && (e.gamma_prime - 0.2).abs() < 1e-15);
        let e = lls(1.0, 1.0, 0.0, 0.0, 0.0, 0.0).tls_equivalent();
        assert!((e.gamma - 2.0).abs() < 1e-15 && e.gamma_prime == 0.0);
        // Lossless: both peaks reach unit reflectance.
        assert!((e.peak_reflectance() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn tls_equivalent_overlays_lambda_magnitude_spectrum() {
        // With Ω = 0, Γ₂ = 0 the magnitude spectra coincide pointwise.
        for (coupling, v_g, gp) in [(1.0, 10.0, 0.1), (0.1, 1.0, 0.1), (0.7, 2.0, 0.0)] {
            let lp = lls(coupling, v_g, 0.37, 0.0, gp, 0.0);
            let tp = lp.tls_equivalent();
            for k in 0..=100 {
                let x = -2.0 + 0.04 * f64::from(k);
                let rl = reflectance(lp.reflection(Detuning::from_x(x)).unwrap());
                let rt = reflectance(tp.reflection(Detuning::from_delta(x)).unwrap());
                assert!(
                    (rl - rt).abs() < 1e-12,
                    "overlay mismatch at x={x}: {rl} vs {rt}"
                );
            }
        }
    }

    #[test]
    fn lambda_spectrum_is_passive() {
        // |r| ≤ 1 for admissible parameters, losses included.
        let p = lls(0.9, 0.7, -3.0, 4.0, 0.25, 0.08);
        for k in -300..=300 {
            let x = f64::from(k) * 0.05;
            let r = p.reflection(Detuning::from_x(x)).unwrap();
            assert!(r.norm() <= 1.0 + 1e-9);
        }
    }

    #[test]
    fn detuning_sign_conventions() {
        let d = Detuning::from_x(0.25);
        assert_eq!(d.delta(), -0.25);
        assert_eq!(d.x(), 0.25);
        assert_eq!(Detuning::from_delta(-0.25), d);
    }
}

//! Spectrum sampling and quantitative line analysis: peak location, width
//! measurement, the transparency dip, the far-detuned effective model, and
//! inverse design of the control field (δ, Ω) for a requested narrow line.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{reflectance, Axis, ComplexAmplitude, Detuning, LambdaParams};

/// Anything that can evaluate a reflection amplitude on a scalar detuning
/// axis. Implemented for plain closures, so synthetic line shapes can be
/// analyzed with the same machinery as the physical models.
pub trait ReflectionModel {
    fn reflection_at(&self, detuning: f64) -> Result<ComplexAmplitude>;

    fn reflectance_at(&self, detuning: f64) -> Result<f64> {
        Ok(reflectance(self.reflection_at(detuning)?))
    }
}

impl<F> ReflectionModel for F
where
    F: Fn(f64) -> Result<ComplexAmplitude>,
{
    fn reflection_at(&self, detuning: f64) -> Result<ComplexAmplitude> {
        self(detuning)
    }
}

/// A [`crate::model::SpectrumModel`] bound to one detuning axis.
pub struct AxisModel<'a> {
    pub model: &'a crate::model::SpectrumModel,
    pub axis: Axis,
}

impl ReflectionModel for AxisModel<'_> {
    fn reflection_at(&self, detuning: f64) -> Result<ComplexAmplitude> {
        self.model.reflection_on(self.axis, detuning)
    }
}

/// Uniformly sampled reflection spectrum.
#[derive(Clone, Debug, Serialize)]
pub struct SpectrumGrid {
    pub axis: Axis,
    /// Strictly increasing detuning values on `axis`.
    pub points: Vec<f64>,
    /// Reflectance per point, each in [0, 1 + 1e-9].
    pub reflectance: Vec<f64>,
    /// Complex amplitude per point.
    pub amplitude: Vec<ComplexAmplitude>,
}

/// Evaluate `model` once per point on a uniform grid over `[lo, hi]`.
pub fn sample_spectrum<M: ReflectionModel>(
    model: &M,
    axis: Axis,
    lo: f64,
    hi: f64,
    points: usize,
) -> Result<SpectrumGrid> {
    if points < 2 {
        return Err(Error::Precondition(format!(
            "spectrum grid needs at least 2 points, got {points}"
        )));
    }
    if !(lo.is_finite() && hi.is_finite() && hi > lo) {
        return Err(Error::Precondition(format!(
            "spectrum range must be finite with hi > lo, got [{lo}, {hi}]"
        )));
    }
    let step = (hi - lo) / (points - 1) as f64;
    let mut xs = Vec::with_capacity(points);
    let mut rs = Vec::with_capacity(points);
    let mut amps = Vec::with_capacity(points);
    for k in 0..points {
        let x = if k + 1 == points { hi } else { lo + step * k as f64 };
        let amp = model.reflection_at(x).map_err(|e| Error::EvalAt {
            point: x,
            source: Box::new(e),
        })?;
        let r = reflectance(amp);
        debug_assert!((0.0..=1.0 + 1e-9).contains(&r));
        xs.push(x);
        rs.push(r);
        amps.push(amp);
    }
    Ok(SpectrumGrid {
        axis,
        points: xs,
        reflectance: rs,
        amplitude: amps,
    })
}

/// One analyzed reflection peak. `fwhm` and the half-maximum crossings are
/// filled in by [`measure_fwhm`]; [`locate_peaks`] leaves them unset.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct PeakReport {
    /// Detuning of the (refined) maximum on the analysis axis.
    pub center: f64,
    /// Reflectance at the center.
    pub amplitude: f64,
    /// Detuning interval that was analyzed.
    pub window: (f64, f64),
    pub half_left: Option<f64>,
    pub half_right: Option<f64>,
    pub fwhm: Option<f64>,
}

/// Local minimum of the spectrum (the transparency dip).
#[derive(Clone, Copy, Debug, Serialize)]
pub struct DipReport {
    /// Photon detuning of the minimum.
    pub location: f64,
    /// Reflectance at the minimum.
    pub residual: f64,
}

/// The two real roots of x(x+δ) = Ω²/4, where the control field pins the
/// reflection maxima (upper = x₊, lower = x₋).
#[derive(Clone, Copy, Debug, Serialize)]
pub struct DressedRoots {
    pub upper: f64,
    pub lower: f64,
}

/// Golden-section refinement tolerance, relative to the window scale.
const REFINE_REL_TOL: f64 = 1e-10;
/// Bisection tolerance for half-maximum crossings, times the window width.
const HALF_MAX_ABS_TOL: f64 = 1e-12;
/// Half-maximum search reach, in multiples of the window width.
const BRACKET_REACH: f64 = 10.0;

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section maximization of `f` on the bracket `[a, b]`.
fn golden_max<F: Fn(f64) -> Result<f64>>(f: &F, mut a: f64, mut b: f64, tol: f64) -> Result<(f64, f64)> {
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    while b - a > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d)?;
        }
    }
    let m = 0.5 * (a + b);
    let fm = f(m)?;
    let best = [(c, fc), (d, fd), (m, fm)]
        .into_iter()
        .max_by(|x, y| x.1.total_cmp(&y.1))
        .expect("non-empty");
    Ok(best)
}

/// Locate every interior reflection maximum inside `[lo, hi]`.
///
/// A coarse uniform scan (`coarse` ≥ 32 points) is split into sub-windows at
/// its interior local minima; the argmax of each sub-window is then refined
/// by golden section. Returns peaks sorted by center; an empty list (not an
/// error) when the window holds no interior maximum.
pub fn locate_peaks<M: ReflectionModel>(
    model: &M,
    lo: f64,
    hi: f64,
    coarse: usize,
) -> Result<Vec<PeakReport>> {
    if coarse < 32 {
        return Err(Error::Precondition(format!(
            "peak scan needs at least 32 coarse points, got {coarse}"
        )));
    }
    if !(lo.is_finite() && hi.is_finite() && hi > lo) {
        return Err(Error::Precondition(format!(
            "peak window must be finite with hi > lo, got [{lo}, {hi}]"
        )));
    }
    let n = coarse;
    let step = (hi - lo) / (n - 1) as f64;
    let mut x = Vec::with_capacity(n);
    let mut r = Vec::with_capacity(n);
    for k in 0..n {
        let v = if k + 1 == n { hi } else { lo + step * k as f64 };
        x.push(v);
        r.push(model.reflectance_at(v).map_err(|e| Error::EvalAt {
            point: v,
            source: Box::new(e),
        })?);
    }

    // Sub-window boundaries at interior local minima.
    let mut bounds = vec![0usize];
    for i in 1..n - 1 {
        if r[i] <= r[i - 1] && r[i] <= r[i + 1] {
            bounds.push(i);
        }
    }
    bounds.push(n - 1);

    let tol = REFINE_REL_TOL * lo.abs().max(hi.abs()).max(hi - lo);
    let mut peaks = Vec::new();
    for w in bounds.windows(2) {
        let (s, e) = (w[0], w[1]);
        if e <= s {
            continue;
        }
        let m = (s..=e)
            .max_by(|&i, &j| r[i].total_cmp(&r[j]))
            .expect("non-empty sub-window");
        // Window-edge maxima are not peaks; split points are minima and
        // cannot win unless the segment is flat, which is also not a peak.
        if m == 0 || m == n - 1 || r[m] < r[m - 1] || r[m] < r[m + 1] {
            continue;
        }
        let f = |v: f64| model.reflectance_at(v);
        let (mut center, mut amp) = golden_max(&f, x[m - 1], x[m + 1], tol)?;
        // Refinement never reports less than the best coarse sample.
        if r[m] > amp {
            center = x[m];
            amp = r[m];
        }
        peaks.push(PeakReport {
            center,
            amplitude: amp,
            window: (lo, hi),
            half_left: None,
            half_right: None,
            fwhm: None,
        });
    }
    peaks.sort_by(|a, b| a.center.total_cmp(&b.center));
    peaks.dedup_by(|a, b| (a.center - b.center).abs() <= tol);
    Ok(peaks)
}

/// Bisect one half-maximum crossing on a bracket with
/// R(inner) ≥ half > R(outer).
fn bisect_half<M: ReflectionModel>(
    model: &M,
    mut inner: f64,
    mut outer: f64,
    half: f64,
    tol: f64,
) -> Result<f64> {
    while (outer - inner).abs() > tol {
        let mid = 0.5 * (inner + outer);
        if model.reflectance_at(mid)? >= half {
            inner = mid;
        } else {
            outer = mid;
        }
    }
    Ok(0.5 * (inner + outer))
}

/// Measure the full width at half maximum of a located peak.
///
/// Walks outward from the center in fixed steps until the reflectance drops
/// below half the peak amplitude, then bisects each crossing to an absolute
/// tolerance of 1e-12 times the window width. The walk may leave the window
/// but gives up (with a bracketing error) beyond ten window widths.
pub fn measure_fwhm<M: ReflectionModel>(model: &M, peak: &PeakReport) -> Result<PeakReport> {
    if !(peak.amplitude > 0.0) {
        return Err(Error::Precondition(format!(
            "peak amplitude must be positive, got {}",
            peak.amplitude
        )));
    }
    let half = peak.amplitude / 2.0;
    let width = peak.window.1 - peak.window.0;
    let step = width / 1024.0;
    let reach = BRACKET_REACH * width;
    let tol = HALF_MAX_ABS_TOL * width;

    let mut crossings = [0.0_f64; 2];
    for (slot, dir) in [(0usize, -1.0_f64), (1usize, 1.0_f64)] {
        let side = if dir < 0.0 { "left" } else { "right" };
        let mut prev = peak.center;
        let mut k = 1u64;
        let found = loop {
            let cur = peak.center + dir * step * k as f64;
            if (cur - peak.center).abs() > reach {
                break None;
            }
            if model.reflectance_at(cur)? < half {
                break Some((prev, cur));
            }
            prev = cur;
            k += 1;
        };
        let (inner, outer) = found.ok_or(Error::Bracketing { side, reach })?;
        crossings[slot] = bisect_half(model, inner, outer, half, tol)?;
    }
    let (half_left, half_right) = (crossings[0], crossings[1]);
    Ok(PeakReport {
        half_left: Some(half_left),
        half_right: Some(half_right),
        fwhm: Some(half_right - half_left),
        ..*peak
    })
}

/// The dressed resonances: real roots of x(x+δ) = Ω²/4, evaluated with the
/// cancellation-free quadratic (the product of the roots is −Ω²/4).
pub fn dressed_resonances(params: &LambdaParams) -> DressedRoots {
    let d = params.delta;
    let o = params.rabi;
    let s = d.hypot(o);
    if o == 0.0 {
        // Roots are 0 and −δ exactly.
        return DressedRoots {
            upper: if d >= 0.0 { 0.0 } else { -d },
            lower: if d >= 0.0 { -d } else { 0.0 },
        };
    }
    let lower = -(d.abs() + s) / 2.0;
    let upper = -(o * o / 4.0) / lower;
    if d >= 0.0 {
        DressedRoots { upper, lower }
    } else {
        DressedRoots {
            upper: -lower,
            lower: -upper,
        }
    }
}

/// Closed-form residual reflectance at the two-photon resonance x = −δ.
fn dip_residual_closed_form(params: &LambdaParams) -> f64 {
    let g = params.guided_rate();
    let g2 = params.gamma2;
    let q = params.rabi * params.rabi / 4.0 + g2 * (params.gamma_prime + g);
    g * g * g2 * g2 / (q * q + params.delta * params.delta * g2 * g2)
}

/// Locate the transparency dip.
///
/// With Γ₂ = 0 the dip is analytic: reflection vanishes exactly at x = −δ.
/// With Γ₂ > 0 the minimum is located numerically between the two dressed
/// resonances and cross-checked against the closed-form residual at x = −δ.
pub fn dip_report(params: &LambdaParams) -> Result<DipReport> {
    params.validate()?;
    if params.rabi == 0.0 {
        return Err(Error::NoDip);
    }
    if params.gamma2 == 0.0 {
        return Ok(DipReport {
            location: -params.delta,
            residual: 0.0,
        });
    }
    let roots = dressed_resonances(params);
    let model = |x: f64| params.reflection(Detuning::from_x(x));
    // Coarse scan between the two maxima, then golden-section minimization
    // (run on the negated reflectance through the shared maximizer).
    let coarse = 256;
    let lo = roots.lower;
    let hi = roots.upper;
    let step = (hi - lo) / coarse as f64;
    let mut best_i = 0usize;
    let mut best = f64::INFINITY;
    for i in 0..=coarse {
        let x = lo + step * i as f64;
        let r = model.reflectance_at(x)?;
        if r < best {
            best = r;
            best_i = i;
        }
    }
    let a = lo + step * best_i.saturating_sub(1) as f64;
    let b = (lo + step * (best_i + 1) as f64).min(hi);
    let neg = |x: f64| model.reflectance_at(x).map(|r| -r);
    let tol = REFINE_REL_TOL * lo.abs().max(hi.abs()).max(hi - lo);
    let (location, _) = golden_max(&neg, a, b, tol)?;
    let residual = model.reflectance_at(location)?;
    debug_assert!({
        let closed = dip_residual_closed_form(params);
        residual <= closed * (1.0 + 1e-6) + 1e-30
    });
    Ok(DipReport { location, residual })
}

/// Far-detuned effective description of the narrow line after adiabatic
/// elimination of the excited state.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct EffectiveModel {
    /// AC Stark displacement Ω²/(4δ) of the Raman line.
    pub stark_shift: f64,
    /// Predicted narrow-line center: the exact dressed root x₋.
    pub predicted_center: f64,
    /// Predicted narrow-line width 2(g+Γ′)|x₋+δ|/√(δ²+Ω²), evaluated
    /// cancellation-free as (g+Γ′)Ω²/(√(δ²+Ω²)(|δ|+√(δ²+Ω²))).
    pub predicted_fwhm: f64,
    /// Expansion parameter Ω/(2δ); the relative error of the predictions is
    /// O(validity²), so far-detuned claims require validity < 1.
    pub validity: f64,
}

/// Effective narrow-line model; undefined at δ = 0.
pub fn effective_model(params: &LambdaParams) -> Result<EffectiveModel> {
    params.validate()?;
    if params.delta == 0.0 {
        return Err(Error::DegenerateControl);
    }
    let d = params.delta;
    let o = params.rabi;
    let s = d.hypot(o);
    let rate = params.guided_rate() + params.gamma_prime;
    Ok(EffectiveModel {
        stark_shift: o * o / (4.0 * d),
        predicted_center: dressed_resonances(params).lower,
        predicted_fwhm: rate * o * o / (s * (d.abs() + s)),
        validity: (o / (2.0 * d)).abs(),
    })
}

/// Result of the control-field design loop.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ControlFieldDesign {
    /// Designed control detuning δ.
    pub delta: f64,
    /// Designed Rabi frequency Ω.
    pub rabi: f64,
    /// Achieved narrow-line center (photon detuning).
    pub center: f64,
    /// Achieved narrow-line width.
    pub fwhm: f64,
    pub iterations: usize,
}

/// Rates held fixed while the control field is designed.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct FixedRates {
    pub coupling: f64,
    pub v_g: f64,
    pub gamma_prime: f64,
    pub gamma2: f64,
}

impl FixedRates {
    fn with_control(&self, delta: f64, rabi: f64) -> Result<LambdaParams> {
        LambdaParams::new(
            self.coupling,
            self.v_g,
            0.0,
            delta,
            rabi,
            self.gamma_prime,
            self.gamma2,
        )
    }
}

/// Forward map used by the design loop: center and width of the narrow line
/// (the maximum at the dressed root x₋, the one shifted to the two-photon
/// side for δ > 0).
pub fn narrow_line(params: &LambdaParams) -> Result<(f64, f64)> {
    let roots = dressed_resonances(params);
    // Window centered on x₋, reaching exactly to the dip at −δ on one side
    // and mirrored on the other; the line sits many widths inside it in the
    // far-detuned regime.
    let half = (roots.lower + params.delta).abs();
    if !(half > 0.0) {
        return Err(Error::Precondition(
            "narrow line undefined: dressed root coincides with the dip".into(),
        ));
    }
    let (lo, hi) = (roots.lower - half, roots.lower + half);
    let model = AxisModel {
        model: &crate::model::SpectrumModel::Lambda(*params),
        axis: Axis::X,
    };
    let peaks = locate_peaks(&model, lo, hi, 1024)?;
    let peak = peaks
        .into_iter()
        .min_by(|a, b| {
            (a.center - roots.lower)
                .abs()
                .total_cmp(&(b.center - roots.lower).abs())
        })
        .ok_or_else(|| Error::Precondition("no narrow line inside the design window".into()))?;
    let measured = measure_fwhm(&model, &peak)?;
    Ok((measured.center, measured.fwhm.expect("fwhm just measured")))
}

const DESIGN_MAX_ITER: usize = 100;
const DESIGN_CENTER_TOL: f64 = 1e-6;

/// Design (δ, Ω) so the narrow line lands on `target_center` with width
/// `target_fwhm`, holding the rates in `fixed`.
///
/// Damped Newton iteration on the residual map with a forward-difference
/// Jacobian (relative step 1e-6); the initial iterate inverts the effective
/// model analytically. Steps that would cross δ = 0 (or drive Ω negative)
/// are rejected and the trust region halved. The width residual is accepted
/// at 1e-6 in absolute units and additionally relative to the target, which
/// keeps the recovered parameters accurate to parts in 1e6.
pub fn design_control_field(
    target_center: f64,
    target_fwhm: f64,
    fixed: &FixedRates,
) -> Result<ControlFieldDesign> {
    if !(target_fwhm > 0.0 && target_fwhm.is_finite()) {
        return Err(Error::Precondition(format!(
            "target fwhm must be positive, got {target_fwhm}"
        )));
    }
    let probe = fixed.with_control(1.0, 0.0)?;
    let rate = probe.guided_rate() + probe.gamma_prime;
    if !(target_center < 0.0) || target_center.abs() < 5.0 * rate {
        return Err(Error::Precondition(format!(
            "target center {target_center} lies in the broad-peak region \
             (requires center < −{:.3})",
            5.0 * rate
        )));
    }

    // Seed from the inverted effective model: x₋ ≈ −δ, fwhm ≈ (g+Γ′)Ω²/(2δ²).
    let mut delta = -target_center;
    let mut rabi = delta * (2.0 * target_fwhm / rate).sqrt();
    let fwhm_tol = DESIGN_CENTER_TOL * target_fwhm.min(1.0);

    let eval = |delta: f64, rabi: f64| -> Result<(f64, f64)> {
        narrow_line(&fixed.with_control(delta, rabi)?)
    };
    let residual = |obs: (f64, f64)| (obs.0 - target_center, obs.1 - target_fwhm);
    let norm2 = |r: (f64, f64)| r.0 * r.0 + r.1 * r.1;

    let mut obs = eval(delta, rabi)?;
    let mut res = residual(obs);
    for iter in 1..=DESIGN_MAX_ITER {
        if res.0.abs() <= DESIGN_CENTER_TOL && res.1.abs() <= fwhm_tol {
            return Ok(ControlFieldDesign {
                delta,
                rabi,
                center: obs.0,
                fwhm: obs.1,
                iterations: iter - 1,
            });
        }
        // Forward-difference Jacobian.
        let hd = 1e-6 * delta.abs().max(1.0);
        let hr = 1e-6 * rabi.abs().max(1.0);
        let od = eval(delta + hd, rabi)?;
        let or = eval(delta, rabi + hr)?;
        let j = [
            [(od.0 - obs.0) / hd, (or.0 - obs.0) / hr],
            [(od.1 - obs.1) / hd, (or.1 - obs.1) / hr],
        ];
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        if det.abs() < 1e-30 {
            return Err(Error::Infeasible {
                center_residual: res.0,
                fwhm_residual: res.1,
                iterations: iter,
            });
        }
        let step = (
            -(j[1][1] * res.0 - j[0][1] * res.1) / det,
            -(-j[1][0] * res.0 + j[0][0] * res.1) / det,
        );
        // Backtracking with rejection of sign crossings.
        let mut lambda = 1.0;
        let mut accepted = false;
        while lambda >= 1.0 / 1024.0 {
            let nd = delta + lambda * step.0;
            let nr = rabi + lambda * step.1;
            if nd * delta <= 0.0 || nr < 0.0 {
                lambda *= 0.5;
                continue;
            }
            match eval(nd, nr) {
                Ok(nobs) => {
                    let nres = residual(nobs);
                    if norm2(nres) < norm2(res) {
                        delta = nd;
                        rabi = nr;
                        obs = nobs;
                        res = nres;
                        accepted = true;
                        break;
                    }
                    lambda *= 0.5;
                }
                Err(_) => lambda *= 0.5,
            }
        }
        if !accepted {
            return Err(Error::Infeasible {
                center_residual: res.0,
                fwhm_residual: res.1,
                iterations: iter,
            });
        }
    }
    if res.0.abs() <= DESIGN_CENTER_TOL && res.1.abs() <= fwhm_tol {
        return Ok(ControlFieldDesign {
            delta,
            rabi,
            center: obs.0,
            fwhm: obs.1,
            iterations: DESIGN_MAX_ITER,
        });
    }
    Err(Error::Infeasible {
        center_residual: res.0,
        fwhm_residual: res.1,
        iterations: DESIGN_MAX_ITER,
    })
}

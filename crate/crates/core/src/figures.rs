//! Parameter presets for the four reference spectra and their emission as
//! machine-readable datasets: one CSV per curve plus a JSON report carrying
//! every curve's peak and dip analysis.
//!
//! The Λ-emitter curves are emitted in two readings side by side, because a
//! printed coupling number Γ fixes the physical spectrum only together with
//! a velocity convention:
//! * `coupling` — v_g = 1 and Γ taken as the coupling constant, g = Γ²;
//! * `rate` — the guided rate g itself set equal to the printed Γ.
//!
//! CSV schema (one header row, then one row per grid point):
//! `x, delta, delta_norm, R, re_r, im_r` with `delta = −x` and
//! `delta_norm = (delta − f_c)/Γ′`, where f_c is the analyzed-line center
//! in the Δ convention (0 for two-level curves, and 0 for presets that do
//! not recenter their axis). Output is byte-identical for identical inputs;
//! every file is written to a temporary name and renamed into place.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;

use crate::analysis::{
    dip_report, dressed_resonances, effective_model, locate_peaks, measure_fwhm, sample_spectrum,
    AxisModel, DipReport, EffectiveModel, PeakReport, SpectrumGrid,
};
use crate::error::{Error, Result};
use crate::model::{Axis, LambdaParams, SpectrumModel, TwoLevelParams};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FigureId {
    Fig2,
    Fig3,
    Fig4,
    Fig5,
}

impl FigureId {
    pub const ALL: [FigureId; 4] = [FigureId::Fig2, FigureId::Fig3, FigureId::Fig4, FigureId::Fig5];

    pub fn as_str(self) -> &'static str {
        match self {
            FigureId::Fig2 => "fig2",
            FigureId::Fig3 => "fig3",
            FigureId::Fig4 => "fig4",
            FigureId::Fig5 => "fig5",
        }
    }
}

impl fmt::Display for FigureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FigureId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fig2" => Ok(FigureId::Fig2),
            "fig3" => Ok(FigureId::Fig3),
            "fig4" => Ok(FigureId::Fig4),
            "fig5" => Ok(FigureId::Fig5),
            other => Err(Error::UnknownFigure(other.to_string())),
        }
    }
}

/// One labelled curve of a figure preset.
#[derive(Clone, Debug)]
pub struct FigureCurve {
    pub label: String,
    pub model: SpectrumModel,
}

/// A figure preset: curves, the shared photon-detuning window, the default
/// grid density and whether the normalized axis recenters on the analyzed
/// line.
#[derive(Clone, Debug)]
pub struct FigurePreset {
    pub id: FigureId,
    pub curves: Vec<FigureCurve>,
    /// Sampling window on the x (photon-detuning) axis.
    pub window: (f64, f64),
    pub points: usize,
    /// Whether `delta_norm` subtracts the analyzed-line center.
    pub subtract_center: bool,
}

const DEFAULT_POINTS: usize = 4001;

fn tls_curve(label: &str, gamma: f64, gamma_prime: f64) -> FigureCurve {
    FigureCurve {
        label: label.to_string(),
        model: SpectrumModel::TwoLevel(TwoLevelParams {
            gamma,
            gamma_prime,
            omega1: 0.0,
        }),
    }
}

/// Both velocity readings of a printed Λ coupling.
fn lambda_curves(stem: &str, printed_gamma: f64, delta: f64, rabi: f64, gp: f64) -> [FigureCurve; 2] {
    let coupling = FigureCurve {
        label: format!("{stem}-coupling"),
        model: SpectrumModel::Lambda(LambdaParams {
            coupling: printed_gamma,
            v_g: 1.0,
            omega1: 0.0,
            delta,
            rabi,
            gamma_prime: gp,
            gamma2: 0.0,
        }),
    };
    let rate = FigureCurve {
        label: format!("{stem}-rate"),
        model: SpectrumModel::Lambda(LambdaParams {
            coupling: printed_gamma.sqrt(),
            v_g: 1.0,
            omega1: 0.0,
            delta,
            rabi,
            gamma_prime: gp,
            gamma2: 0.0,
        }),
    };
    [coupling, rate]
}

/// The preset behind a figure id.
pub fn preset(id: FigureId) -> FigurePreset {
    match id {
        // Two-level family: Γ ∈ {0.1, 0.5, 1, 5} at Γ′ = 0.1.
        FigureId::Fig2 => FigurePreset {
            id,
            curves: vec![
                tls_curve("tls-gamma-0.1", 0.1, 0.1),
                tls_curve("tls-gamma-0.5", 0.5, 0.1),
                tls_curve("tls-gamma-1", 1.0, 0.1),
                tls_curve("tls-gamma-5", 5.0, 0.1),
            ],
            window: (-30.0, 30.0),
            points: DEFAULT_POINTS,
            subtract_center: true,
        },
        // Resonant control field, Γ ∈ {0.05, 0.2, 0.5}, Ω = 2, Γ′ = 0.1.
        FigureId::Fig3 => FigurePreset {
            id,
            curves: [0.05, 0.2, 0.5]
                .iter()
                .flat_map(|&g| lambda_curves(&format!("lls-gamma-{g}"), g, 0.0, 2.0, 0.1))
                .collect(),
            window: (-8.0, 8.0),
            points: DEFAULT_POINTS,
            subtract_center: true,
        },
        // Two-level reference against the driven emitter at δ = 0 and δ = 5.
        FigureId::Fig4 => {
            let mut curves = vec![tls_curve("tls", 0.1, 0.1)];
            curves.extend(lambda_curves("lls-delta-0", 0.1, 0.0, 2.0, 0.1));
            curves.extend(lambda_curves("lls-delta-5", 0.1, 5.0, 2.0, 0.1));
            FigurePreset {
                id,
                curves,
                window: (-8.0, 3.0),
                points: DEFAULT_POINTS,
                subtract_center: true,
            }
        }
        // Narrowing family: δ ∈ {5, 10, 15}; the plot axis is Δ/Γ′ without
        // recentering.
        FigureId::Fig5 => FigurePreset {
            id,
            curves: [5.0, 10.0, 15.0]
                .iter()
                .flat_map(|&d| lambda_curves(&format!("lls-delta-{d}"), 0.1, d, 2.0, 0.1))
                .collect(),
            window: (-18.0, 3.0),
            points: DEFAULT_POINTS,
            subtract_center: false,
        },
    }
}

/// A peak in both detuning conventions, with its measured width.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct PeakEntry {
    /// "narrow", "broad" or "single".
    pub kind: &'static str,
    pub center_x: f64,
    pub center_delta: f64,
    pub amplitude: f64,
    pub fwhm: f64,
    pub half_left_x: f64,
    pub half_right_x: f64,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct DipEntry {
    pub x: f64,
    pub delta: f64,
    pub residual: f64,
}

/// Per-curve analysis carried in the figure report.
#[derive(Clone, Debug, Serialize)]
pub struct CurveReport {
    pub label: String,
    #[serde(flatten)]
    pub model: SpectrumModel,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub guided_rate: Option<f64>,
    /// Center of the analyzed line in the Δ convention (0 for two-level).
    pub f_c_delta: f64,
    pub f_c_x: f64,
    pub peaks: Vec<PeakEntry>,
    pub dip: Option<DipEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub effective: Option<EffectiveModel>,
}

#[derive(Clone, Debug, Serialize)]
pub struct FigureReport {
    pub figure: FigureId,
    pub window_x: (f64, f64),
    pub points: usize,
    pub curves: Vec<CurveReport>,
}

/// Paths written by [`render_figure`].
#[derive(Clone, Debug)]
pub struct RenderedFigure {
    pub curve_files: Vec<PathBuf>,
    pub report_file: PathBuf,
    pub report: FigureReport,
}

fn measured_entry(model: &SpectrumModel, peak: &PeakReport, kind: &'static str) -> Result<PeakEntry> {
    let am = AxisModel {
        model,
        axis: Axis::X,
    };
    let m = measure_fwhm(&am, peak)?;
    Ok(PeakEntry {
        kind,
        center_x: m.center,
        center_delta: -m.center,
        amplitude: m.amplitude,
        fwhm: m.fwhm.expect("measured"),
        half_left_x: m.half_left.expect("measured"),
        half_right_x: m.half_right.expect("measured"),
    })
}

/// Peak/dip analysis of one curve on the x axis.
///
/// Two-level curves are scanned over the whole window. Λ curves are scanned
/// in two windows centered on the dressed roots and bounded by the dip at
/// x = −δ, which keeps the narrow line resolvable at any detuning without a
/// prohibitively dense global scan.
pub fn analyze_curve(model: &SpectrumModel, window: (f64, f64)) -> Result<CurveReport> {
    match model {
        SpectrumModel::TwoLevel(_) => {
            let am = AxisModel {
                model,
                axis: Axis::X,
            };
            let peaks = locate_peaks(&am, window.0, window.1, 1024)?;
            let mut entries = Vec::new();
            for p in &peaks {
                entries.push(measured_entry(model, p, "single")?);
            }
            Ok(CurveReport {
                label: String::new(),
                model: *model,
                guided_rate: None,
                f_c_delta: 0.0,
                f_c_x: 0.0,
                peaks: entries,
                dip: None,
                effective: None,
            })
        }
        SpectrumModel::Lambda(p) => {
            let roots = dressed_resonances(p);
            let am = AxisModel {
                model,
                axis: Axis::X,
            };
            let mut entries = Vec::new();
            for (root, kind) in [(roots.lower, "narrow"), (roots.upper, "broad")] {
                let half = (root + p.delta).abs().max(1e-6 * p.rabi.max(1.0));
                let (lo, hi) = (root - half, root + half);
                let peaks = locate_peaks(&am, lo, hi, 1024)?;
                let Some(best) = peaks.into_iter().min_by(|a, b| {
                    (a.center - root).abs().total_cmp(&(b.center - root).abs())
                }) else {
                    continue;
                };
                entries.push(measured_entry(model, &best, kind)?);
            }
            entries.sort_by(|a, b| a.center_x.total_cmp(&b.center_x));
            let narrow = entries.iter().find(|e| e.kind == "narrow");
            let f_c_x = narrow.map(|e| e.center_x).unwrap_or(0.0);
            let dip = if p.rabi > 0.0 {
                let d: DipReport = dip_report(p)?;
                Some(DipEntry {
                    x: d.location,
                    delta: -d.location,
                    residual: d.residual,
                })
            } else {
                None
            };
            Ok(CurveReport {
                label: String::new(),
                model: *model,
                guided_rate: Some(p.guided_rate()),
                f_c_delta: -f_c_x,
                f_c_x,
                peaks: entries,
                dip,
                effective: if p.delta != 0.0 {
                    Some(effective_model(p)?)
                } else {
                    None
                },
            })
        }
    }
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

fn curve_csv(grid: &SpectrumGrid, f_c_delta: f64, gamma_prime: f64) -> String {
    let norm = if gamma_prime > 0.0 { gamma_prime } else { 1.0 };
    let mut out = String::with_capacity(grid.points.len() * 64);
    out.push_str("x, delta, delta_norm, R, re_r, im_r\n");
    for (k, &x) in grid.points.iter().enumerate() {
        let delta = -x + 0.0; // +0.0 folds the negative zero that -x produces at the origin
        let delta_norm = (delta - f_c_delta) / norm;
        let amp = grid.amplitude[k];
        out.push_str(&format!(
            "{x}, {delta}, {delta_norm}, {r}, {re}, {im}\n",
            r = grid.reflectance[k],
            re = amp.re,
            im = amp.im,
        ));
    }
    out
}

/// Render one figure preset into `sink`: one CSV per curve plus one JSON
/// report. Returns the written paths and the in-memory report.
pub fn render_figure(
    id: FigureId,
    points_override: Option<usize>,
    sink: &Path,
) -> Result<RenderedFigure> {
    let mut preset = preset(id);
    if let Some(points) = points_override {
        preset.points = points;
    }
    fs::create_dir_all(sink)?;

    let mut curve_files = Vec::new();
    let mut curves = Vec::new();
    for curve in &preset.curves {
        let mut report = analyze_curve(&curve.model, preset.window)?;
        report.label = curve.label.clone();
        let am = AxisModel {
            model: &curve.model,
            axis: Axis::X,
        };
        let grid = sample_spectrum(&am, Axis::X, preset.window.0, preset.window.1, preset.points)?;
        let f_c_for_axis = if preset.subtract_center {
            report.f_c_delta
        } else {
            0.0
        };
        let csv = curve_csv(&grid, f_c_for_axis, curve.model.gamma_prime());
        let path = sink.join(format!("{}_{}.csv", id, curve.label));
        write_atomic(&path, csv.as_bytes())?;
        curve_files.push(path);
        curves.push(report);
    }

    let report = FigureReport {
        figure: id,
        window_x: preset.window,
        points: preset.points,
        curves,
    };
    let report_file = sink.join(format!("{id}_report.json"));
    let mut json = serde_json::to_string_pretty(&report).expect("report serializes");
    json.push('\n');
    write_atomic(&report_file, json.as_bytes())?;

    Ok(RenderedFigure {
        curve_files,
        report_file,
        report,
    })
}

//! Command-line front end: spectra, line analysis, self-verification,
//! reference-figure reproduction and control-field design.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use spp_scatter::analysis::{
    design_control_field, dip_report, locate_peaks, measure_fwhm, sample_spectrum, AxisModel,
    FixedRates,
};
use spp_scatter::figures::{render_figure, FigureId};
use spp_scatter::model::{Axis, LambdaParams, SpectrumModel, TwoLevelParams};
use spp_scatter::verify;

/// Environment variable holding the default output directory.
const OUT_ENV: &str = "SPP_SCATTER_OUT";

#[derive(Parser)]
#[command(
    name = "spp-scatter",
    about = "Single-photon reflection spectra for waveguide-coupled emitters",
    after_help = "Exit codes: 0 success, 1 parameter or usage error, 2 verification failure.\n\
                  Detuning axes: tls spectra are sampled in Delta = omega1 - E, lambda spectra \
                  in x = E - omega1.\n\
                  A config file (--config, `key = value` lines, `#` comments) may supply any \
                  long flag value; explicit flags override it."
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Sample a reflection spectrum to CSV (x, delta, delta_norm, R, re_r, im_r).
    Spectrum(SpectrumArgs),
    /// Locate peaks, measure widths and report the transparency dip as JSON.
    Analyze(AnalyzeArgs),
    /// Run the built-in oracle-agreement and flux battery.
    Verify,
    /// Reproduce a reference figure (fig2..fig5) as CSV datasets + JSON report.
    Figure(FigureArgs),
    /// Design the control field (delta, rabi) for a requested narrow line.
    Design(DesignArgs),
}

#[derive(Args, Clone)]
struct ModelArgs {
    /// Emitter model: "tls" or "lambda".
    #[arg(long)]
    model: Option<String>,
    /// Coupling rate Gamma (tls: guided decay rate; lambda: coupling constant).
    #[arg(long)]
    gamma: Option<f64>,
    /// Loss rate Gamma' into unguided channels.
    #[arg(long = "gamma-prime")]
    gamma_prime: Option<f64>,
    /// Metastable-state loss rate Gamma_2 (lambda only; default 0).
    #[arg(long)]
    gamma2: Option<f64>,
    /// Control-field Rabi frequency Omega (lambda only).
    #[arg(long)]
    rabi: Option<f64>,
    /// Control-field detuning delta (lambda only).
    #[arg(long = "delta-control")]
    delta_control: Option<f64>,
    /// Group velocity v_g (lambda only; default 1).
    #[arg(long)]
    vg: Option<f64>,
    /// Transition frequency omega_1 (default 0).
    #[arg(long)]
    omega1: Option<f64>,
    /// Config file with `key = value` lines; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct SpectrumArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Lower edge of the detuning grid (on the model's native axis).
    #[arg(long, allow_hyphen_values = true)]
    min: Option<f64>,
    /// Upper edge of the detuning grid.
    #[arg(long, allow_hyphen_values = true)]
    max: Option<f64>,
    /// Number of grid points.
    #[arg(long)]
    points: Option<usize>,
    /// Output CSV path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Lower edge of the analysis window (native axis).
    #[arg(long, allow_hyphen_values = true)]
    min: Option<f64>,
    /// Upper edge of the analysis window.
    #[arg(long, allow_hyphen_values = true)]
    max: Option<f64>,
    /// Coarse scan points for peak location (>= 32).
    #[arg(long)]
    coarse: Option<usize>,
    /// Output JSON path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FigureArgs {
    /// Figure id: fig2, fig3, fig4 or fig5.
    id: String,
    /// Override the grid point count.
    #[arg(long)]
    points: Option<usize>,
    /// Output directory (default: $SPP_SCATTER_OUT, else ".").
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DesignArgs {
    /// Requested narrow-line center (photon detuning x; negative).
    #[arg(long = "target-center", allow_hyphen_values = true)]
    target_center: f64,
    /// Requested narrow-line full width at half maximum.
    #[arg(long = "target-fwhm")]
    target_fwhm: f64,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long = "gamma-prime")]
    gamma_prime: Option<f64>,
    #[arg(long)]
    gamma2: Option<f64>,
    #[arg(long)]
    vg: Option<f64>,
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output JSON path (stdout summary is always printed).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Usage problems exit 1; --help/--version print and exit 0.
            if e.use_stderr() {
                eprint!("{e}");
                return ExitCode::from(1);
            }
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };
    let outcome = match cli.cmd {
        Cmd::Spectrum(args) => cmd_spectrum(args),
        Cmd::Analyze(args) => cmd_analyze(args),
        Cmd::Verify => return cmd_verify(),
        Cmd::Figure(args) => cmd_figure(args),
        Cmd::Design(args) => cmd_design(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

type CmdResult = Result<(), String>;

// ---------------------------------------------------------------------------
// Config handling

struct Config(BTreeMap<String, String>);

const CONFIG_KEYS: &[&str] = &[
    "model",
    "gamma",
    "gamma-prime",
    "gamma2",
    "rabi",
    "delta-control",
    "vg",
    "omega1",
    "min",
    "max",
    "points",
    "coarse",
];

impl Config {
    fn load(path: Option<&Path>) -> Result<Self, String> {
        let mut map = BTreeMap::new();
        if let Some(path) = path {
            let text = fs::read_to_string(path)
                .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
            for (lineno, raw) in text.lines().enumerate() {
                let line = raw.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let (key, value) = line
                    .split_once('=')
                    .ok_or_else(|| format!("config line {}: expected `key = value`", lineno + 1))?;
                let key = key.trim().to_string();
                if !CONFIG_KEYS.contains(&key.as_str()) {
                    return Err(format!("config line {}: unknown key `{key}`", lineno + 1));
                }
                map.insert(key, value.trim().to_string());
            }
        }
        Ok(Config(map))
    }

    fn f64(&self, key: &str) -> Result<Option<f64>, String> {
        self.0
            .get(key)
            .map(|v| {
                v.parse::<f64>()
                    .map_err(|_| format!("config key `{key}`: invalid number `{v}`"))
            })
            .transpose()
    }

    fn usize(&self, key: &str) -> Result<Option<usize>, String> {
        self.0
            .get(key)
            .map(|v| {
                v.parse::<usize>()
                    .map_err(|_| format!("config key `{key}`: invalid integer `{v}`"))
            })
            .transpose()
    }

    fn string(&self, key: &str) -> Option<String> {
        self.0.get(key).cloned()
    }
}

fn resolve(flag: Option<f64>, cfg: Result<Option<f64>, String>, default: Option<f64>, name: &str)
    -> Result<f64, String>
{
    if let Some(v) = flag {
        return Ok(v);
    }
    if let Some(v) = cfg? {
        return Ok(v);
    }
    default.ok_or_else(|| format!("missing required parameter --{name}"))
}

fn build_model(args: &ModelArgs) -> Result<SpectrumModel, String> {
    let cfg = Config::load(args.config.as_deref())?;
    let model = args
        .model
        .clone()
        .or_else(|| cfg.string("model"))
        .ok_or("missing required parameter --model (tls or lambda)")?;
    let omega1 = resolve(args.omega1, cfg.f64("omega1"), Some(0.0), "omega1")?;
    match model.as_str() {
        "tls" => {
            let gamma = resolve(args.gamma, cfg.f64("gamma"), None, "gamma")?;
            let gamma_prime =
                resolve(args.gamma_prime, cfg.f64("gamma-prime"), None, "gamma-prime")?;
            let p = TwoLevelParams::new(gamma, gamma_prime, omega1).map_err(|e| e.to_string())?;
            Ok(SpectrumModel::TwoLevel(p))
        }
        "lambda" => {
            let gamma = resolve(args.gamma, cfg.f64("gamma"), None, "gamma")?;
            let gamma_prime =
                resolve(args.gamma_prime, cfg.f64("gamma-prime"), None, "gamma-prime")?;
            let rabi = resolve(args.rabi, cfg.f64("rabi"), None, "rabi")?;
            let delta = resolve(
                args.delta_control,
                cfg.f64("delta-control"),
                None,
                "delta-control",
            )?;
            let vg = resolve(args.vg, cfg.f64("vg"), Some(1.0), "vg")?;
            let gamma2 = resolve(args.gamma2, cfg.f64("gamma2"), Some(0.0), "gamma2")?;
            let p = LambdaParams::new(gamma, vg, omega1, delta, rabi, gamma_prime, gamma2)
                .map_err(|e| e.to_string())?;
            Ok(SpectrumModel::Lambda(p))
        }
        other => Err(format!("unknown model `{other}` (expected tls or lambda)")),
    }
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), String> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, bytes).map_err(|e| format!("cannot write {}: {e}", tmp.display()))?;
    fs::rename(&tmp, path).map_err(|e| format!("cannot rename into {}: {e}", path.display()))
}

fn emit(out: Option<&Path>, text: &str) -> CmdResult {
    match out {
        Some(path) => write_atomic(path, text.as_bytes()),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

// ---------------------------------------------------------------------------
// spectrum

/// Center of the analyzed line in the Δ convention, used for the
/// `delta_norm` column; 0 for two-level spectra and whenever the narrow
/// line of a driven emitter cannot be isolated.
fn analyzed_center_delta(model: &SpectrumModel) -> f64 {
    match model {
        SpectrumModel::TwoLevel(_) => 0.0,
        SpectrumModel::Lambda(p) => spp_scatter::analysis::narrow_line(p)
            .map(|(center_x, _)| -center_x)
            .unwrap_or(0.0),
    }
}

fn cmd_spectrum(args: SpectrumArgs) -> CmdResult {
    let cfg = Config::load(args.model.config.as_deref())?;
    let model = build_model(&args.model)?;
    let min = resolve(args.min, cfg.f64("min"), None, "min")?;
    let max = resolve(args.max, cfg.f64("max"), None, "max")?;
    let points = match args.points {
        Some(p) => p,
        None => cfg
            .usize("points")?
            .ok_or("missing required parameter --points")?,
    };
    let axis = model.native_axis();
    let am = AxisModel {
        model: &model,
        axis,
    };
    let grid = sample_spectrum(&am, axis, min, max, points).map_err(|e| e.to_string())?;
    let f_c_delta = analyzed_center_delta(&model);
    let norm = if model.gamma_prime() > 0.0 {
        model.gamma_prime()
    } else {
        1.0
    };
    let mut csv = String::from("x, delta, delta_norm, R, re_r, im_r\n");
    for (k, &v) in grid.points.iter().enumerate() {
        // +0.0 folds the negative zero produced by negating the origin.
        let (x, delta) = match axis {
            Axis::Delta => (-v + 0.0, v),
            Axis::X => (v, -v + 0.0),
        };
        let amp = grid.amplitude[k];
        csv.push_str(&format!(
            "{x}, {delta}, {dn}, {r}, {re}, {im}\n",
            dn = (delta - f_c_delta) / norm,
            r = grid.reflectance[k],
            re = amp.re,
            im = amp.im,
        ));
    }
    emit(args.out.as_deref(), &csv)
}

// ---------------------------------------------------------------------------
// analyze

#[derive(Serialize)]
struct AnalyzePeak {
    center_x: f64,
    center_delta: f64,
    amplitude: f64,
    fwhm: f64,
    half_left: f64,
    half_right: f64,
}

#[derive(Serialize)]
struct AnalyzeReport {
    #[serde(flatten)]
    model: SpectrumModel,
    axis: Axis,
    window: (f64, f64),
    coarse: usize,
    peaks: Vec<AnalyzePeak>,
    dip: Option<spp_scatter::figures::DipEntry>,
}

fn cmd_analyze(args: AnalyzeArgs) -> CmdResult {
    let cfg = Config::load(args.model.config.as_deref())?;
    let model = build_model(&args.model)?;
    let min = resolve(args.min, cfg.f64("min"), None, "min")?;
    let max = resolve(args.max, cfg.f64("max"), None, "max")?;
    let coarse = match args.coarse {
        Some(c) => c,
        None => cfg.usize("coarse")?.unwrap_or(512),
    };
    let axis = model.native_axis();
    let am = AxisModel {
        model: &model,
        axis,
    };
    let located = locate_peaks(&am, min, max, coarse).map_err(|e| e.to_string())?;
    let mut peaks = Vec::new();
    for p in &located {
        let m = measure_fwhm(&am, p).map_err(|e| e.to_string())?;
        let center_x = match axis {
            Axis::X => m.center,
            Axis::Delta => -m.center,
        };
        peaks.push(AnalyzePeak {
            center_x,
            center_delta: -center_x,
            amplitude: m.amplitude,
            fwhm: m.fwhm.expect("measured"),
            half_left: m.half_left.expect("measured"),
            half_right: m.half_right.expect("measured"),
        });
    }
    let dip = match &model {
        SpectrumModel::Lambda(p) if p.rabi > 0.0 => {
            let d = dip_report(p).map_err(|e| e.to_string())?;
            (min..=max)
                .contains(&d.location)
                .then_some(spp_scatter::figures::DipEntry {
                    x: d.location,
                    delta: -d.location,
                    residual: d.residual,
                })
        }
        _ => None,
    };
    let report = AnalyzeReport {
        model,
        axis,
        window: (min, max),
        coarse,
        peaks,
        dip,
    };
    let mut json = serde_json::to_string_pretty(&report).expect("report serializes");
    json.push('\n');
    emit(args.out.as_deref(), &json)
}

// ---------------------------------------------------------------------------
// verify

fn cmd_verify() -> ExitCode {
    let results = verify::run_all();
    let mut failed = 0;
    for check in &results {
        if check.passed {
            println!("ok   {} — {}", check.name, check.detail);
        } else {
            failed += 1;
            println!("FAIL {} — {}", check.name, check.detail);
        }
    }
    if failed == 0 {
        println!("verify: {} checks passed", results.len());
        ExitCode::SUCCESS
    } else {
        println!("verify: {failed}/{} checks FAILED", results.len());
        ExitCode::from(2)
    }
}

// ---------------------------------------------------------------------------
// figure

fn default_out_dir() -> PathBuf {
    std::env::var_os(OUT_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("."))
}

fn cmd_figure(args: FigureArgs) -> CmdResult {
    let id: FigureId = args.id.parse().map_err(|e: spp_scatter::Error| e.to_string())?;
    let sink = args.out.unwrap_or_else(default_out_dir);
    let rendered = render_figure(id, args.points, &sink).map_err(|e| e.to_string())?;
    for f in &rendered.curve_files {
        println!("wrote {}", f.display());
    }
    println!("wrote {}", rendered.report_file.display());
    Ok(())
}

// ---------------------------------------------------------------------------
// design

#[derive(Serialize)]
struct DesignReport {
    fixed: FixedRates,
    target_center: f64,
    target_fwhm: f64,
    delta: f64,
    rabi: f64,
    achieved_center_x: f64,
    achieved_center_delta: f64,
    achieved_fwhm: f64,
    iterations: usize,
}

fn cmd_design(args: DesignArgs) -> CmdResult {
    let cfg = Config::load(args.config.as_deref())?;
    let fixed = FixedRates {
        coupling: resolve(args.gamma, cfg.f64("gamma"), None, "gamma")?,
        v_g: resolve(args.vg, cfg.f64("vg"), Some(1.0), "vg")?,
        gamma_prime: resolve(args.gamma_prime, cfg.f64("gamma-prime"), None, "gamma-prime")?,
        gamma2: resolve(args.gamma2, cfg.f64("gamma2"), Some(0.0), "gamma2")?,
    };
    let design = design_control_field(args.target_center, args.target_fwhm, &fixed)
        .map_err(|e| e.to_string())?;
    println!("delta-control = {}", design.delta);
    println!("rabi          = {}", design.rabi);
    println!(
        "achieved center = {} (x axis; delta axis {})",
        design.center, -design.center
    );
    println!("achieved fwhm   = {}", design.fwhm);
    println!("iterations      = {}", design.iterations);
    if args.out.is_some() {
        let report = DesignReport {
            fixed,
            target_center: args.target_center,
            target_fwhm: args.target_fwhm,
            delta: design.delta,
            rabi: design.rabi,
            achieved_center_x: design.center,
            achieved_center_delta: -design.center,
            achieved_fwhm: design.fwhm,
            iterations: design.iterations,
        };
        let mut json = serde_json::to_string_pretty(&report).expect("report serializes");
        json.push('\n');
        emit(args.out.as_deref(), &json)?;
    }
    Ok(())
}

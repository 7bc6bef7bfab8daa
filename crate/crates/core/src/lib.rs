//! Single-photon reflection spectra for optical emitters coupled to a 1D
//! waveguide (nanowire surface plasmons): closed-form coefficients for a
//! two-level and a driven Λ-type emitter, two independent scattering oracles
//! that re-derive them numerically, spectral-line analysis (peaks, widths,
//! the transparency dip, a far-detuned effective model), inverse design of
//! the control field, and reproducible dataset emission for the reference
//! figures.

pub mod analysis;
pub mod error;
pub mod figures;
pub mod linalg;
pub mod model;
pub mod oracle;
pub mod verify;

pub use analysis::{
    design_control_field, dip_report, dressed_resonances, effective_model, locate_peaks,
    measure_fwhm, narrow_line, sample_spectrum, AxisModel, ControlFieldDesign, DipReport,
    DressedRoots, EffectiveModel, FixedRates, PeakReport, ReflectionModel, SpectrumGrid,
};
pub use error::{Error, Result};
pub use model::{
    reflectance, Axis, ComplexAmplitude, Detuning, LambdaParams, SpectrumModel, TwoLevelParams,
};
pub use oracle::{
    convergence_study, lattice_scatter, solve_stationary_system, ConvergenceStudy, LatticeSpec,
    ScatteringSolution,
};

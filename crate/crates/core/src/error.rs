//! Crate-wide error type.

use std::fmt;

/// Alias used by every fallible operation in this crate.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A physical parameter violates its domain constraint.
    InvalidParameter {
        name: &'static str,
        value: f64,
        constraint: &'static str,
    },
    /// The denominator of a closed-form amplitude collapsed below the
    /// representable floor (measure-zero parameter degeneracy).
    SingularPoint { modulus: f64 },
    /// Gaussian elimination met a pivot too small to divide by.
    SingularSystem { pivot: f64 },
    /// The requested photon detuning maps outside the lattice band.
    BandEdge { x: f64, limit: f64 },
    /// Plane-wave extraction from the lattice solution left a residual
    /// above the acceptance threshold.
    Extraction { residual: f64, threshold: f64 },
    /// An input precondition was violated.
    Precondition(String),
    /// A half-maximum crossing could not be bracketed within the allowed
    /// search reach.
    Bracketing { side: &'static str, reach: f64 },
    /// Dip analysis requested with the control field switched off.
    NoDip,
    /// The adiabatic effective model is undefined at zero control detuning.
    DegenerateControl,
    /// Control-field design did not converge; carries the final residuals.
    Infeasible {
        center_residual: f64,
        fwhm_residual: f64,
        iterations: usize,
    },
    /// A reflection evaluator failed at a specific grid point.
    EvalAt { point: f64, source: Box<Error> },
    /// Unknown figure identifier.
    UnknownFigure(String),
    /// File output failed.
    Io(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParameter {
                name,
                value,
                constraint,
            } => write!(f, "invalid parameter {name} = {value}: requires {constraint}"),
            Error::SingularPoint { modulus } => {
                write!(f, "singular point: denominator modulus {modulus:e} below guard")
            }
            Error::SingularSystem { pivot } => {
                write!(f, "singular linear system: pivot magnitude {pivot:e}")
            }
            Error::BandEdge { x, limit } => write!(
                f,
                "photon detuning {x} outside the lattice band (|x| a / v_g limit {limit})"
            ),
            Error::Extraction {
                residual,
                threshold,
            } => write!(
                f,
                "plane-wave extraction residual {residual:e} above threshold {threshold:e}"
            ),
            Error::Precondition(msg) => write!(f, "precondition violated: {msg}"),
            Error::Bracketing { side, reach } => write!(
                f,
                "half-maximum not bracketed on the {side} side within reach {reach}"
            ),
            Error::NoDip => write!(f, "no transparency dip: control field is off (rabi = 0)"),
            Error::DegenerateControl => {
                write!(f, "effective model undefined for zero control detuning")
            }
            Error::Infeasible {
                center_residual,
                fwhm_residual,
                iterations,
            } => write!(
                f,
                "design target infeasible after {iterations} iterations \
                 (center residual {center_residual:e}, fwhm residual {fwhm_residual:e})"
            ),
            Error::EvalAt { point, source } => {
                write!(f, "evaluator failed at detuning {point}: {source}")
            }
            Error::UnknownFigure(id) => write!(f, "unknown figure id: {id}"),
            Error::Io(msg) => write!(f, "i/o error: {msg}"),
        }
    }
}

impl std::error::Error for Error {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            Error::EvalAt { source, .. } => Some(source.as_ref()),
            _ => None,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

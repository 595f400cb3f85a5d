//! Laboratory for discretized point-line incidence geometry.
//!
//! The library works in the phase space Ω = [−1,1]³ whose elements
//! ω = (a, b, c) encode the planar point (a, b) together with the line of
//! slope c through it.  On top of the anisotropic metric geometry of Ω it
//! provides:
//!
//! * skewed rectangles, dyadic covers, covering numbers and concentration
//!   ([`phase`]);
//! * the smoothed incidence count I(w; P, L) and a numerical high-low scan
//!   ([`incidence`], [`kernel`]);
//! * constructive regularization: uniform-subset extraction, weak-uniformity
//!   constants, Katz-Tao extraction, Frostman scans ([`regularity`]);
//! * branching functions f(x, y, z) on a discrete grid, direction numbers,
//!   the b/e functionals and the effective-triple search ([`branching`]);
//! * generators for the standard example configurations ([`constructions`]);
//! * the constructive small-triangle pipeline ([`heilbronn`]);
//! * exact finite-field verification: Hermitian unitals, tangents, Vinh's
//!   inequality ([`finite_field`]).

pub mod branching;
pub mod constructions;
pub mod finite_field;
pub mod heilbronn;
pub mod incidence;
pub mod io;
pub mod kernel;
pub mod phase;
pub mod regularity;
pub mod util;

/// Errors surfaced by the geometric operations.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("inadmissible scale triple: v = {v} < u*w = {uw}")]
    InadmissibleScale { v: f64, uw: f64 },
    #[error("scale triple is not dyadic: {0}")]
    NotDyadic(String),
    #[error("rectangle scale is not of the blowup form u0 x u0*w0 x w0")]
    NotBlowupForm,
    #[error("input is not {0}-separated")]
    NotSeparated(f64),
    #[error("Frostman condition fails: window at w={w} holds {count} points > {bound}")]
    FrostmanViolation { w: f64, count: usize, bound: f64 },
    #[error("invalid input: {0}")]
    BadInput(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

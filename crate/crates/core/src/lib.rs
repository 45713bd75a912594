//! Exact verification of a six-dimensional geodesically h-projective
//! structure of type [33].
//!
//! The crate builds a two-parameter family of split-signature metrics on a
//! coordinate chart, together with a companion symmetric tensor `a`, a
//! defining function `phi` and the deformed tensor
//! `h = a + 3 (f3 + f6 + c) g`, and checks the defining identities of the
//! structure by exact rational arithmetic at randomly sampled regular
//! points. There is no floating point anywhere in the verification path;
//! a check passes only if the residual is the zero of `Q`.
//!
//! Layout:
//! - [`expr`]: a small exact expression engine (rationals, coordinates,
//!   parameters; differentiation, simplification, parsing and printing),
//! - [`tensor`]: exact dense matrices over `Q` and the pointwise curvature
//!   pipeline (Christoffel symbols, Riemann tensor, covariant derivatives),
//! - [`hspace`]: the model itself, its parameter space, parameter files and
//!   deterministic sampling of certified regular points,
//! - [`verify`]: the checks and the report they produce.

// Index loops are written `for i in 0..DIM` throughout so the code reads like
// the tensor notation it implements; iterator adapters obscure that.
#![allow(clippy::needless_range_loop)]

pub mod expr;
pub mod hspace;
pub mod tensor;
pub mod verify;

pub use expr::{Expr, ExprError, Point, Rational, Symbol, DIM};
pub use hspace::{
    parse_params_file, render_params, HSpaceModel, HSpaceParams, ParamsError, ParamsFileError,
    SampleStrategy, Sign,
};
pub use tensor::{Geometry, MetricField, PointFrame, RationalMatrix, TensorField};
pub use verify::{
    run_full_suite, run_selected, CheckKind, CheckResult, CheckStatus, VerificationReport,
};

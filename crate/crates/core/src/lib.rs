//! Parseval frames with `n + 1` vectors in ℝⁿ.
//!
//! The crate covers four workflows:
//!
//! * [`construct`]: complete a seed vector `w` with `‖w‖ < 1` to the unique
//!   triangular Parseval frame `{v₁, …, vₙ, w}`, keeping a per-level trace.
//! * [`scaling`]: decide whether a unit-norm `(n + 1)`-frame can be rescaled
//!   into a Parseval frame, in closed form, with an independent
//!   nonnegative least-squares oracle.
//! * [`diagnostics`]: the necessary identities satisfied by Parseval frames
//!   (cosine sums, planar tightness, minor determinants, …) as an audit.
//! * [`frame`]: the frame type itself, verification, random Parseval frames
//!   and canonical forms up to rotation and sign flips.
//!
//! Frames are stored as `n × N` matrices whose columns are the frame vectors.

pub mod cli;
pub mod construct;
pub mod diagnostics;
pub mod error;
pub mod frame;
pub mod io;
mod linalg;
pub mod scaling;

pub use construct::{
    construct, construct_base2, expected_diagonal, orthocomplement_vector, uniqueness_check,
    ConstructionTrace, LevelRecord, SeedVector, TriangularParsevalFrame,
};
pub use diagnostics::{audit, DiagnosticsReport};
pub use error::{FrameError, Result};
pub use frame::{
    canonicalize, equivalent, frame_operator, gram_and_angles, random_parseval, verify, AngleTable,
    CanonicalForm, FrameMatrix, TightnessReport,
};
pub use scaling::{decide_scalability, oracle_scale, ScalabilityVerdict, ScalingWeights};

/// Default tolerance for boolean verdicts.
pub const DEFAULT_TOL: f64 = 1e-9;

//! Rate-distortion solvers.
//!
//! Everything is parametrized by slopes `s ≤ 0` in bits per unit distortion;
//! distortion targets are met by adjusting the slopes. Rates are in bits.

mod closed_form;
mod curve;
mod distortion;
mod solver;
mod target;

pub use closed_form::{binary_conditional_rd, gaussian_conditional_rd};
pub use curve::{rd_curve, RdCurve, SweepGrid};
pub use distortion::{DistortionKind, DistortionMatrix, DistortionSpec};
pub use solver::{RdOptions, RdPoint, RdProblem, WarmStart};

use crate::error::Result;

/// Single-source BA at slope `slope`.
pub fn ba_point(source: &[f64], d: &DistortionMatrix, slope: f64, opts: &RdOptions) -> Result<RdPoint> {
    RdProblem::single(source, d)?.solve(&[slope], opts)
}

/// Single-source RD at distortion target `target`.
pub fn ba_target(source: &[f64], d: &DistortionMatrix, target: f64, opts: &RdOptions) -> Result<RdPoint> {
    RdProblem::single(source, d)?.solve_targets(&[target], opts)
}

/// Conditional RD `R_{X|Y}` at a slope; `joint_xy` is x-major (`nx` × `ny`).
pub fn ba_conditional(
    joint_xy: &[f64],
    nx: usize,
    ny: usize,
    d: &DistortionMatrix,
    slope: f64,
    opts: &RdOptions,
) -> Result<RdPoint> {
    RdProblem::conditional(joint_xy, nx, ny, d)?.solve(&[slope], opts)
}

/// Conditional RD `R_{X|Y}(D)` at a distortion target.
pub fn ba_conditional_target(
    joint_xy: &[f64],
    nx: usize,
    ny: usize,
    d: &DistortionMatrix,
    target: f64,
    opts: &RdOptions,
) -> Result<RdPoint> {
    RdProblem::conditional(joint_xy, nx, ny, d)?.solve_targets(&[target], opts)
}

/// Joint doubly symmetric binary law `p(x, y)` with crossover `p`, x-major.
pub fn doubly_symmetric(p: f64) -> [f64; 4] {
    [(1.0 - p) / 2.0, p / 2.0, p / 2.0, (1.0 - p) / 2.0]
}

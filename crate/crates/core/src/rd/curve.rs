use std::f64::consts::LN_2;

use super::solver::{RdOptions, RdPoint, RdProblem, WarmStart};
use crate::par::{self, Exec};

/// Points to solve along a sweep.
#[derive(Debug, Clone, PartialEq)]
pub enum SweepGrid {
    /// One slope vector per point.
    Slopes(Vec<Vec<f64>>),
    /// One distortion-target vector per point.
    Targets(Vec<Vec<f64>>),
}

impl SweepGrid {
    pub fn len(&self) -> usize {
        match self {
            SweepGrid::Slopes(v) | SweepGrid::Targets(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `n` scalar slopes spaced evenly from `from` to `to`.
    pub fn linear_slopes(from: f64, to: f64, n: usize) -> Self {
        SweepGrid::Slopes(linspace(from, to, n).into_iter().map(|s| vec![s]).collect())
    }
}

pub(crate) fn linspace(from: f64, to: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![from],
        _ => (0..n).map(|k| from + (to - from) * k as f64 / (n - 1) as f64).collect(),
    }
}

/// Solved sweep in request order; failed points carry their error text.
#[derive(Debug, Clone)]
pub struct RdCurve {
    pub points: Vec<std::result::Result<RdPoint, String>>,
    /// Rate never increases when every distortion coordinate increases.
    pub monotone: bool,
    /// Midpoint convexity of the sorted (D, R) points; only defined for one
    /// distortion coordinate.
    pub convex: Option<bool>,
}

impl RdCurve {
    pub fn ok_points(&self) -> impl Iterator<Item = &RdPoint> {
        self.points.iter().filter_map(|p| p.as_ref().ok())
    }
}

/// Solves every grid point. Sequential sweeps warm-start each point from the
/// previous one; parallel sweeps solve points independently.
pub fn rd_curve(problem: &RdProblem, grid: &SweepGrid, opts: &RdOptions) -> RdCurve {
    let inner = RdOptions {
        exec: Exec::Sequential,
        ..*opts
    };
    let points: Vec<std::result::Result<RdPoint, String>> = match (grid, opts.exec) {
        (SweepGrid::Slopes(slopes), Exec::Sequential) => {
            let mut warm: Option<WarmStart> = None;
            slopes
                .iter()
                .map(|s| {
                    let (pt, w) = problem
                        .solve_warm(s, &inner, warm.as_ref())
                        .map_err(|e| e.to_string())?;
                    warm = Some(w);
                    Ok(pt)
                })
                .collect()
        }
        (SweepGrid::Slopes(slopes), Exec::Parallel) => par::map(Exec::Parallel, slopes, |s| {
            problem.solve(s, &inner).map_err(|e| e.to_string())
        }),
        (SweepGrid::Targets(targets), exec) => par::map(exec, targets, |t| {
            problem.solve_targets(t, &inner).map_err(|e| e.to_string())
        }),
    };

    // Solver slack in bits, plus the target tolerance times the steepest slope.
    let steepest = points
        .iter()
        .flatten()
        .flat_map(|p| p.slopes.iter().map(|s| s.abs()))
        .fold(0.0, f64::max);
    let slack = 2.0 * (opts.tol_nats / LN_2) + steepest * opts.target_tol + 1e-10;
    let ok: Vec<&RdPoint> = points.iter().flatten().collect();
    let monotone = ok.iter().all(|a| {
        ok.iter().all(|b| {
            let dominated = b.distortions.iter().zip(&a.distortions).all(|(db, da)| db >= da);
            !dominated || b.rate <= a.rate + slack
        })
    });
    let convex = (problem.num_coords() == 1).then(|| {
        let mut sorted: Vec<(f64, f64)> = ok.iter().map(|p| (p.distortions[0], p.rate)).collect();
        sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
        sorted.windows(3).all(|w| {
            let (d0, r0) = w[0];
            let (d1, r1) = w[1];
            let (d2, r2) = w[2];
            if d2 - d0 <= 0.0 {
                return true;
            }
            let chord = r0 + (r2 - r0) * (d1 - d0) / (d2 - d0);
            r1 <= chord + slack
        })
    });
    RdCurve {
        points,
        monotone,
        convex,
    }
}

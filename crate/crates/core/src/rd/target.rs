//! Distortion-target solves: invert `E d_i(s)` to find slopes that meet the
//! targets, one coordinate at a time.

use super::solver::{RdOptions, RdPoint, RdProblem, WarmStart};
use crate::error::{invalid, Result};

const MAX_SWEEPS: usize = 60;
const MAX_ROOT_STEPS: usize = 200;
const MIN_BRACKET: f64 = 1e-13;
const MAX_NEWTON_STEPS: usize = 40;
const MAX_BACKTRACKS: usize = 30;
const FD_STEP: f64 = 1e-4;
/// Largest Newton move per coordinate, relative to `max(|s|, 1)`.
const MAX_STEP: f64 = 2.0;
/// Tolerated dual decrease from solver noise, in bits.
const DUAL_SLACK: f64 = 1e-12;

struct Search<'a> {
    problem: &'a RdProblem,
    opts: &'a RdOptions,
    warm: Option<WarmStart>,
    iterations: usize,
}

impl Search<'_> {
    fn eval(&mut self, slopes: &[f64]) -> Result<RdPoint> {
        let (pt, w) = self.problem.solve_warm(slopes, self.opts, self.warm.as_ref())?;
        self.iterations += pt.iterations;
        self.warm = Some(w);
        Ok(pt)
    }
}

enum Outcome {
    Point(RdPoint),
    /// No continuous root: time-share between two solved points.
    Mixed(RdPoint),
}

impl RdProblem {
    /// Smallest rate with `E d_i ≤ targets[i]` for every coordinate.
    ///
    /// When every target reaches the zero-rate distortion, the zero-rate
    /// reconstruction is returned directly. Several coordinates are first
    /// solved jointly by projected Newton steps on the dual; a single
    /// coordinate, or a Newton stall, falls back to adjusting each slope in
    /// turn (bracket, then Illinois regula falsi) until `|E d_i - D_i| ≤
    /// target_tol`, or the constraint is slack at slope 0.
    pub fn solve_targets(&self, targets: &[f64], opts: &RdOptions) -> Result<RdPoint> {
        let m = self.num_coords();
        if targets.len() != m {
            return Err(invalid(format!("{} targets for {m} coordinates", targets.len())));
        }
        if targets.iter().any(|t| !t.is_finite() || *t < 0.0) {
            return Err(invalid("distortion targets must be finite and >= 0"));
        }
        let trivial = self.zero_rate_distortions();
        if targets.iter().zip(&trivial).all(|(t, z)| t >= z) {
            return Ok(RdPoint {
                rate: 0.0,
                distortions: trivial,
                slopes: vec![0.0; m],
                iterations: 0,
                converged: true,
            });
        }

        let mut search = Search {
            problem: self,
            opts,
            warm: None,
            iterations: 0,
        };
        let mut slopes: Vec<f64> = targets
            .iter()
            .zip(&trivial)
            .map(|(t, z)| if t >= z { 0.0 } else { -1.0 })
            .collect();
        if m > 1 {
            if let Some(mut pt) = newton(&mut search, targets, &mut slopes)? {
                pt.iterations = search.iterations;
                return Ok(pt);
            }
        }
        let sweeps = if m == 1 { 1 } else { MAX_SWEEPS };
        let mut last = None;
        for _ in 0..sweeps {
            for (i, &t) in targets.iter().enumerate() {
                last = Some(find_coordinate(&mut search, i, &mut slopes, t)?);
            }
            if let Some(Outcome::Point(pt)) = &last {
                if satisfied(pt, targets, opts) {
                    break;
                }
            }
        }
        let mut pt = match last.expect("at least one coordinate") {
            Outcome::Point(pt) => pt,
            Outcome::Mixed(pt) => pt,
        };
        pt.converged = pt.converged && satisfied(&pt, targets, opts);
        pt.iterations = search.iterations;
        Ok(pt)
    }
}

/// `I + Σ s_i (D_i - E d_i)`: a lower bound on `R(D)` for every slope
/// vector, maximized exactly where the targets are met.
fn dual_value(pt: &RdPoint, targets: &[f64]) -> f64 {
    pt.rate
        + pt.slopes
            .iter()
            .zip(targets)
            .zip(&pt.distortions)
            .map(|((s, t), d)| s * (t - d))
            .sum::<f64>()
}

/// Projected Newton ascent on the concave dual `s ↦ I + s·(D - E d(s))` over
/// `s ≤ 0`, with a finite-difference Jacobian of `E d`. Returns `None` when
/// it stalls (typically where `E d` jumps), leaving `slopes` at the best
/// point found.
fn newton(search: &mut Search, targets: &[f64], slopes: &mut [f64]) -> Result<Option<RdPoint>> {
    let opts = search.opts;
    let m = targets.len();
    let mut cur = search.eval(slopes)?;
    let mut value = dual_value(&cur, targets);
    for _ in 0..MAX_NEWTON_STEPS {
        let resid: Vec<f64> = targets.iter().zip(&cur.distortions).map(|(t, d)| t - d).collect();
        // Coordinates pinned at slope 0 with a slack constraint stay there.
        let free: Vec<usize> = (0..m)
            .filter(|&i| !(cur.slopes[i] == 0.0 && resid[i] >= -opts.target_tol))
            .collect();
        if free.iter().all(|&i| resid[i].abs() <= opts.target_tol) {
            if !cur.converged {
                return Ok(None);
            }
            return Ok(Some(cur));
        }

        // J[a][b] = ∂ E d_{free[a]} / ∂ s_{free[b]}, by one-sided differences.
        let base = cur.clone();
        let mut jac = vec![vec![0.0; free.len()]; free.len()];
        for (b, &j) in free.iter().enumerate() {
            let h = FD_STEP * slopes[j].abs().max(1.0);
            let mut probe = base.slopes.clone();
            probe[j] = if probe[j] - h >= opts.min_slope {
                probe[j] - h
            } else {
                (probe[j] + h).min(0.0)
            };
            let delta = probe[j] - base.slopes[j];
            let pt = search.eval(&probe)?;
            for (a, &i) in free.iter().enumerate() {
                jac[a][b] = (pt.distortions[i] - base.distortions[i]) / delta;
            }
        }
        let rhs: Vec<f64> = free.iter().map(|&i| resid[i]).collect();
        let Some(step) = solve_symmetric(&jac, &rhs) else {
            return Ok(None);
        };
        let slope_rate: f64 = rhs.iter().zip(&step).map(|(r, d)| r * d).sum();

        // Backtracking on the dual value.
        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..MAX_BACKTRACKS {
            let mut trial = base.slopes.clone();
            for (k, &i) in free.iter().enumerate() {
                let limit = MAX_STEP * base.slopes[i].abs().max(1.0);
                trial[i] = (base.slopes[i] + (t * step[k]).clamp(-limit, limit)).clamp(opts.min_slope, 0.0);
            }
            let pt = search.eval(&trial)?;
            let v = dual_value(&pt, targets);
            if v >= value + 1e-4 * t * slope_rate.max(0.0) - DUAL_SLACK {
                accepted = Some((pt, v));
                break;
            }
            t *= 0.5;
        }
        let Some((pt, v)) = accepted else {
            slopes.copy_from_slice(&base.slopes);
            return Ok(None);
        };
        slopes.copy_from_slice(&pt.slopes);
        cur = pt;
        value = v;
    }
    Ok(None)
}

/// Solves `J x = b` for a (numerically) symmetric positive semidefinite `J`
/// by Gaussian elimination with partial pivoting on the symmetrized matrix,
/// adding a small ridge when it is singular.
fn solve_symmetric(jac: &[Vec<f64>], rhs: &[f64]) -> Option<Vec<f64>> {
    let n = rhs.len();
    let scale = (0..n).map(|i| jac[i][i].abs()).fold(0.0, f64::max);
    if !scale.is_finite() || scale <= 0.0 {
        return None;
    }
    for ridge in [0.0, 1e-10, 1e-6, 1e-3] {
        let mut a: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                let mut row: Vec<f64> = (0..n).map(|j| 0.5 * (jac[i][j] + jac[j][i])).collect();
                row[i] += ridge * scale;
                row.push(rhs[i]);
                row
            })
            .collect();
        let mut ok = true;
        for col in 0..n {
            let piv = (col..n)
                .max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))
                .expect("nonempty");
            if a[piv][col].abs() <= 1e-12 * scale {
                ok = false;
                break;
            }
            a.swap(col, piv);
            let (top, bottom) = a.split_at_mut(col + 1);
            let pivot = &top[col];
            for row in bottom.iter_mut() {
                let f = row[col] / pivot[col];
                for (x, p) in row[col..].iter_mut().zip(&pivot[col..]) {
                    *x -= f * p;
                }
            }
        }
        if !ok {
            continue;
        }
        let mut x = vec![0.0; n];
        for r in (0..n).rev() {
            let s: f64 = (r + 1..n).map(|c| a[r][c] * x[c]).sum();
            x[r] = (a[r][n] - s) / a[r][r];
        }
        if x.iter().all(|v| v.is_finite()) {
            return Some(x);
        }
    }
    None
}

fn satisfied(pt: &RdPoint, targets: &[f64], opts: &RdOptions) -> bool {
    pt.distortions
        .iter()
        .zip(targets)
        .zip(&pt.slopes)
        .all(|((&d, &t), &s)| (d - t).abs() <= opts.target_tol || (s == 0.0 && d <= t + opts.target_tol))
}

fn find_coordinate(search: &mut Search, i: usize, slopes: &mut [f64], target: f64) -> Result<Outcome> {
    let tol = search.opts.target_tol;
    let min_slope = search.opts.min_slope;
    let f = |pt: &RdPoint| pt.distortions[i] - target;

    let mut cur = search.eval(slopes)?;
    if f(&cur).abs() <= tol || (slopes[i] == 0.0 && f(&cur) <= 0.0) {
        return Ok(Outcome::Point(cur));
    }

    // Bracket: `hi` side has E d_i > target (slope closer to 0).
    let (mut lo, mut lo_pt, mut hi, mut hi_pt);
    let mut step = (slopes[i].abs() * 0.25).max(0.5);
    if f(&cur) > 0.0 {
        hi = slopes[i];
        hi_pt = cur;
        loop {
            let s = (hi - step).max(min_slope);
            slopes[i] = s;
            cur = search.eval(slopes)?;
            if f(&cur).abs() <= tol {
                return Ok(Outcome::Point(cur));
            }
            if f(&cur) < 0.0 {
                lo = s;
                lo_pt = cur;
                break;
            }
            hi = s;
            hi_pt = cur;
            if s <= min_slope {
                // Target below the reachable distortion.
                hi_pt.converged = false;
                return Ok(Outcome::Point(hi_pt));
            }
            step *= 2.0;
        }
    } else {
        lo = slopes[i];
        lo_pt = cur;
        loop {
            let s = (lo + step).min(0.0);
            slopes[i] = s;
            cur = search.eval(slopes)?;
            if f(&cur).abs() <= tol || (s == 0.0 && f(&cur) <= 0.0) {
                return Ok(Outcome::Point(cur));
            }
            if f(&cur) > 0.0 {
                hi = s;
                hi_pt = cur;
                break;
            }
            lo = s;
            lo_pt = cur;
            step *= 2.0;
        }
    }

    // Illinois regula falsi on [lo, hi].
    let (mut f_lo, mut f_hi) = (f(&lo_pt), f(&hi_pt));
    let mut side = 0i8;
    for _ in 0..MAX_ROOT_STEPS {
        if hi - lo < MIN_BRACKET {
            break;
        }
        let mut s = (lo * f_hi - hi * f_lo) / (f_hi - f_lo);
        if !(s > lo && s < hi) {
            s = 0.5 * (lo + hi);
        }
        slopes[i] = s;
        let pt = search.eval(slopes)?;
        let fs = f(&pt);
        if fs.abs() <= tol {
            return Ok(Outcome::Point(pt));
        }
        if fs < 0.0 {
            lo = s;
            lo_pt = pt;
            f_lo = fs;
            if side == -1 {
                f_hi *= 0.5;
            }
            side = -1;
        } else {
            hi = s;
            hi_pt = pt;
            f_hi = fs;
            if side == 1 {
                f_lo *= 0.5;
            }
            side = 1;
        }
    }

    // E d_i jumps across the bracket: time-share the two endpoints.
    let (d_lo, d_hi) = (lo_pt.distortions[i], hi_pt.distortions[i]);
    let lambda = ((target - d_lo) / (d_hi - d_lo)).clamp(0.0, 1.0);
    let mix = |a: f64, b: f64| (1.0 - lambda) * a + lambda * b;
    slopes[i] = lo;
    Ok(Outcome::Mixed(RdPoint {
        rate: mix(lo_pt.rate, hi_pt.rate),
        distortions: lo_pt
            .distortions
            .iter()
            .zip(&hi_pt.distortions)
            .map(|(&a, &b)| mix(a, b))
            .collect(),
        slopes: slopes.to_vec(),
        iterations: 0,
        converged: lo_pt.converged && hi_pt.converged,
    }))
}

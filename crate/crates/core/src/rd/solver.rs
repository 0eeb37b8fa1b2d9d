//! Blahut–Arimoto over a (possibly product) alphabet, optionally split by a
//! side-information variable known to encoder and decoder.
//!
//! A problem is a list of components `(p(y), p(x | y))` sharing one set of
//! distortion matrices. At slopes `s_1..s_m ≤ 0` every component is solved
//! with the test channel `Q(x̂|x) ∝ q(x̂) 2^{Σ_i s_i d_i(x, x̂)}` and the results
//! are averaged with weights `p(y)`. Solving all components at a common slope
//! vector is what makes the aggregate lie on the conditional RD surface.

use std::f64::consts::LN_2;

use super::distortion::DistortionMatrix;
use crate::bn::{joint_size, JointTable, SizeGuard};
use crate::error::{invalid, Result};
use crate::par::{self, Exec};

/// Solver settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RdOptions {
    /// Stop when the Blahut upper/lower bound gap falls below this (nats).
    pub tol_nats: f64,
    pub max_iters: usize,
    /// Accepted `|E d - D|` when solving for a distortion target.
    pub target_tol: f64,
    /// Most negative slope tried (bits per unit distortion).
    pub min_slope: f64,
    pub exec: Exec,
}

impl Default for RdOptions {
    fn default() -> Self {
        Self {
            tol_nats: 1e-9,
            max_iters: 10_000,
            target_tol: 1e-6,
            min_slope: -50.0,
            exec: Exec::Parallel,
        }
    }
}

/// One solved point: rate in bits, expected distortion per coordinate.
#[derive(Debug, Clone, PartialEq)]
pub struct RdPoint {
    pub rate: f64,
    pub distortions: Vec<f64>,
    pub slopes: Vec<f64>,
    /// Largest iteration count over components (summed over bisection steps
    /// for target solves).
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone)]
struct Component {
    weight: f64,
    /// Source symbols with positive conditional probability.
    support: Vec<usize>,
    probs: Vec<f64>,
}

/// Reconstruction marginals per component, reusable as a warm start.
#[derive(Debug, Clone, PartialEq)]
pub struct WarmStart {
    q: Vec<Vec<f64>>,
}

/// A rate-distortion problem over product alphabet `x_cards`.
#[derive(Debug, Clone)]
pub struct RdProblem {
    x_cards: Vec<usize>,
    src_size: usize,
    rec_size: usize,
    components: Vec<Component>,
    /// Per coordinate, `src_size * rec_size` row-major.
    distortions: Vec<Vec<f64>>,
}

impl RdProblem {
    /// Unconditional problem for one source distribution.
    pub fn single(source: &[f64], d: &DistortionMatrix) -> Result<Self> {
        Self::multi(&[source.len()], &[(1.0, source.to_vec())], std::slice::from_ref(d))
    }

    /// Conditional problem from `p(x, y)` laid out x-major (`nx` rows, `ny`
    /// columns).
    pub fn conditional(joint_xy: &[f64], nx: usize, ny: usize, d: &DistortionMatrix) -> Result<Self> {
        if joint_xy.len() != nx * ny {
            return Err(invalid(format!(
                "joint has {} entries, expected {nx}x{ny}",
                joint_xy.len()
            )));
        }
        check_normalized(joint_xy)?;
        let parts = (0..ny)
            .map(|y| {
                let col: Vec<f64> = (0..nx).map(|x| joint_xy[x * ny + y]).collect();
                let w: f64 = col.iter().sum();
                (w, col)
            })
            .collect::<Vec<_>>();
        Self::from_weighted(&[nx], parts, std::slice::from_ref(d))
    }

    /// General problem: product source alphabet `x_cards` with one component
    /// `(p(y), p(x|y))` per side-information value, `x` indexed mixed-radix
    /// (last coordinate fastest). `ds[i]` acts on coordinate `i`.
    pub fn multi(x_cards: &[usize], components: &[(f64, Vec<f64>)], ds: &[DistortionMatrix]) -> Result<Self> {
        let total: f64 = components.iter().map(|(w, _)| w).sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(invalid(format!("component weights sum to {total}")));
        }
        for (w, p) in components {
            if *w > 0.0 {
                check_normalized(p)?;
            }
        }
        let parts = components
            .iter()
            .map(|(w, p)| (*w, p.iter().map(|x| x * w).collect()))
            .collect();
        Self::from_weighted(x_cards, parts, ds)
    }

    /// Problem for the variables `x_vars` of `table`, conditioned on
    /// `side_vars` (may be empty). `ds[i]` applies to `x_vars[i]`.
    pub fn from_table(
        table: &JointTable,
        x_vars: &[usize],
        side_vars: &[usize],
        ds: &[DistortionMatrix],
        guard: SizeGuard,
    ) -> Result<Self> {
        if x_vars.is_empty() {
            return Err(invalid("no source variables"));
        }
        let mut scope: Vec<usize> = side_vars.to_vec();
        scope.extend_from_slice(x_vars);
        let m = table.marginal(&scope)?;
        let x_cards: Vec<usize> = x_vars
            .iter()
            .map(|&v| table.cardinality_of(v).expect("in scope"))
            .collect();
        let n = joint_size(&x_cards);
        guard.check(n.saturating_mul(n))?;
        let n = n as usize;
        // Side variables lead the scope, so each y owns a contiguous block.
        let parts = m
            .probs()
            .chunks(n)
            .map(|block| (block.iter().sum(), block.to_vec()))
            .collect();
        Self::from_weighted(&x_cards, parts, ds)
    }

    // `parts` holds (p(y), p(x, y)) pairs.
    fn from_weighted(x_cards: &[usize], parts: Vec<(f64, Vec<f64>)>, ds: &[DistortionMatrix]) -> Result<Self> {
        if ds.len() != x_cards.len() {
            return Err(invalid(format!(
                "{} distortion matrices for {} coordinates",
                ds.len(),
                x_cards.len()
            )));
        }
        let src_size: usize = x_cards.iter().product();
        let rec_cards: Vec<usize> = ds.iter().map(|d| d.cols()).collect();
        let rec_size: usize = rec_cards.iter().product();
        for (d, &k) in ds.iter().zip(x_cards) {
            if d.rows() != k {
                return Err(invalid(format!(
                    "distortion matrix has {} rows for an alphabet of {k}",
                    d.rows()
                )));
            }
        }
        let components = parts
            .into_iter()
            .filter(|(w, _)| *w > 0.0)
            .map(|(w, joint)| {
                if joint.len() != src_size {
                    return Err(invalid("component length does not match the alphabet"));
                }
                let support: Vec<usize> = (0..src_size).filter(|&x| joint[x] > 0.0).collect();
                let probs = support.iter().map(|&x| joint[x] / w).collect();
                Ok(Component {
                    weight: w,
                    support,
                    probs,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let distortions = ds
            .iter()
            .enumerate()
            .map(|(i, d)| {
                let mut out = Vec::with_capacity(src_size * rec_size);
                for x in 0..src_size {
                    let xi = digit(x, x_cards, i);
                    for xh in 0..rec_size {
                        out.push(d.get(xi, digit(xh, &rec_cards, i)));
                    }
                }
                out
            })
            .collect();
        Ok(Self {
            x_cards: x_cards.to_vec(),
            src_size,
            rec_size,
            components,
            distortions,
        })
    }

    pub fn num_coords(&self) -> usize {
        self.distortions.len()
    }

    pub fn num_components(&self) -> usize {
        self.components.len()
    }

    pub fn x_cards(&self) -> &[usize] {
        &self.x_cards
    }

    /// `Σ_y p(y) H(X | y)` in bits: the rate at zero distortion.
    pub fn conditional_entropy(&self) -> f64 {
        self.components
            .iter()
            .map(|c| c.weight * crate::info::entropy(&c.probs))
            .sum()
    }

    /// Per coordinate, the distortion of the best reconstruction that uses
    /// no rate: `Σ_y p(y) min_x̂ E[d_i(X, x̂) | y]`.
    pub fn zero_rate_distortions(&self) -> Vec<f64> {
        (0..self.num_coords())
            .map(|i| {
                self.components
                    .iter()
                    .map(|c| {
                        let best = (0..self.rec_size)
                            .map(|xh| {
                                c.support
                                    .iter()
                                    .zip(&c.probs)
                                    .map(|(&x, &p)| p * self.distortions[i][x * self.rec_size + xh])
                                    .sum::<f64>()
                            })
                            .fold(f64::INFINITY, f64::min);
                        c.weight * best
                    })
                    .sum()
            })
            .collect()
    }

    /// Blahut–Arimoto at fixed slopes.
    pub fn solve(&self, slopes: &[f64], opts: &RdOptions) -> Result<RdPoint> {
        Ok(self.solve_warm(slopes, opts, None)?.0)
    }

    /// Like [`RdProblem::solve`], also returning every component's own point.
    pub fn solve_detailed(&self, slopes: &[f64], opts: &RdOptions) -> Result<(RdPoint, Vec<RdPoint>)> {
        self.check_slopes(slopes)?;
        let exps = self.exponents(slopes);
        let parts = par::map(opts.exec, &self.components, |c| {
            solve_component(c, &exps, self, slopes, opts, None, false).0
        });
        let pt = self.aggregate(slopes, &parts);
        Ok((pt, parts))
    }

    /// Solve with an optional warm start; returns the state for the next call.
    pub fn solve_warm(
        &self,
        slopes: &[f64],
        opts: &RdOptions,
        warm: Option<&WarmStart>,
    ) -> Result<(RdPoint, WarmStart)> {
        self.check_slopes(slopes)?;
        let exps = self.exponents(slopes);
        let idx: Vec<usize> = (0..self.components.len()).collect();
        let solved = par::map(opts.exec, &idx, |&k| {
            let init = warm.and_then(|w| w.q.get(k)).map(Vec::as_slice);
            let (pt, q, _) = solve_component(&self.components[k], &exps, self, slopes, opts, init, false);
            (pt, q)
        });
        let (parts, qs): (Vec<RdPoint>, Vec<Vec<f64>>) = solved.into_iter().unzip();
        Ok((self.aggregate(slopes, &parts), WarmStart { q: qs }))
    }

    /// Values of the Blahut functional `-Σ_x p(x) ln Σ_x̂ q(x̂) A(x, x̂)` per
    /// iteration for component `k`; nonincreasing in exact arithmetic.
    pub fn functional_trace(&self, k: usize, slopes: &[f64], opts: &RdOptions) -> Result<Vec<f64>> {
        self.check_slopes(slopes)?;
        let exps = self.exponents(slopes);
        Ok(solve_component(&self.components[k], &exps, self, slopes, opts, None, true).2)
    }

    fn check_slopes(&self, slopes: &[f64]) -> Result<()> {
        if slopes.len() != self.num_coords() {
            return Err(invalid(format!(
                "{} slopes for {} distortion coordinates",
                slopes.len(),
                self.num_coords()
            )));
        }
        if slopes.iter().any(|s| !s.is_finite() || *s > 0.0) {
            return Err(invalid("slopes must be finite and <= 0"));
        }
        Ok(())
    }

    // A(x, x̂) = 2^{Σ s_i d_i(x, x̂) - max_x̂' Σ s_i d_i(x, x̂')}; the per-row
    // shift cancels in every BA quantity and keeps the row maximum at 1.
    fn exponents(&self, slopes: &[f64]) -> Vec<f64> {
        let mut a = vec![0.0; self.src_size * self.rec_size];
        for x in 0..self.src_size {
            let row = &mut a[x * self.rec_size..(x + 1) * self.rec_size];
            for (xh, slot) in row.iter_mut().enumerate() {
                *slot = slopes
                    .iter()
                    .zip(&self.distortions)
                    .map(|(s, d)| s * d[x * self.rec_size + xh])
                    .sum();
            }
            let top = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            row.iter_mut().for_each(|e| *e = (*e - top).exp2());
        }
        a
    }

    fn aggregate(&self, slopes: &[f64], parts: &[RdPoint]) -> RdPoint {
        let mut rate = 0.0;
        let mut distortions = vec![0.0; self.num_coords()];
        for (c, p) in self.components.iter().zip(parts) {
            rate += c.weight * p.rate;
            for (acc, d) in distortions.iter_mut().zip(&p.distortions) {
                *acc += c.weight * d;
            }
        }
        RdPoint {
            rate,
            distortions,
            slopes: slopes.to_vec(),
            iterations: parts.iter().map(|p| p.iterations).max().unwrap_or(0),
            converged: parts.iter().all(|p| p.converged),
        }
    }
}

const WARM_BLEND: f64 = 1e-9;

fn digit(mut index: usize, cards: &[usize], pos: usize) -> usize {
    for k in (pos + 1..cards.len()).rev() {
        index /= cards[k];
    }
    index % cards[pos]
}

fn check_normalized(p: &[f64]) -> Result<()> {
    if p.iter().any(|x| !x.is_finite() || *x < 0.0) {
        return Err(invalid("probabilities must be finite and nonnegative"));
    }
    let s: f64 = p.iter().sum();
    if (s - 1.0).abs() > 1e-9 {
        return Err(invalid(format!("distribution sums to {s}")));
    }
    Ok(())
}

/// One Blahut-Arimoto update for a component, with scratch buffers.
struct BaMap<'a> {
    c: &'a Component,
    exps: &'a [f64],
    n_rec: usize,
    z: Vec<f64>,
    cvec: Vec<f64>,
}

impl BaMap<'_> {
    /// Writes the update of `q` into `out`; returns the Blahut stopping gap
    /// `max ln c - Σ q ln c` and the functional `-Σ_x p(x) ln Σ_x̂ q A` at `q`.
    fn step(&mut self, q: &[f64], out: &mut [f64]) -> (f64, f64) {
        let n_rec = self.n_rec;
        for (zx, &x) in self.z.iter_mut().zip(&self.c.support) {
            let row = &self.exps[x * n_rec..(x + 1) * n_rec];
            *zx = row
                .iter()
                .zip(q)
                .map(|(a, qv)| a * qv)
                .sum::<f64>()
                .max(f64::MIN_POSITIVE);
        }
        let functional = -self.c.probs.iter().zip(&self.z).map(|(p, zx)| p * zx.ln()).sum::<f64>();
        self.cvec.iter_mut().for_each(|v| *v = 0.0);
        for ((&x, &p), &zx) in self.c.support.iter().zip(&self.c.probs).zip(&self.z) {
            let row = &self.exps[x * n_rec..(x + 1) * n_rec];
            let w = p / zx;
            for (cv, a) in self.cvec.iter_mut().zip(row) {
                *cv += w * a;
            }
        }
        let max_log = self.cvec.iter().fold(f64::NEG_INFINITY, |m, &v| m.max(v.ln()));
        let avg_log: f64 = q
            .iter()
            .zip(&self.cvec)
            .filter(|(qv, _)| **qv > 0.0)
            .map(|(qv, cv)| qv * cv.ln())
            .sum();
        for ((o, qv), cv) in out.iter_mut().zip(q).zip(&self.cvec) {
            *o = qv * cv;
        }
        let total: f64 = out.iter().sum();
        if !(total.is_finite() && total > 0.0) {
            return (f64::NAN, functional);
        }
        out.iter_mut().for_each(|o| *o /= total);
        (max_log - avg_log, functional)
    }
}

fn solve_component(
    c: &Component,
    exps: &[f64],
    problem: &RdProblem,
    slopes: &[f64],
    opts: &RdOptions,
    init: Option<&[f64]>,
    trace: bool,
) -> (RdPoint, Vec<f64>, Vec<f64>) {
    let n_rec = problem.rec_size;
    // A warm start is blended with the uniform law: the multiplicative update
    // cannot revive entries that reached zero at another slope.
    let uniform = 1.0 / n_rec as f64;
    let mut q = match init {
        Some(q0) if q0.len() == n_rec && q0.iter().all(|v| v.is_finite() && *v >= 0.0) => {
            let total: f64 = q0.iter().sum();
            q0.iter()
                .map(|v| (1.0 - WARM_BLEND) * v / total + WARM_BLEND * uniform)
                .collect()
        }
        _ => vec![uniform; n_rec],
    };
    let mut ba = BaMap {
        c,
        exps,
        n_rec,
        z: vec![0.0; c.support.len()],
        cvec: vec![0.0; n_rec],
    };
    let mut history = Vec::new();
    let mut converged = false;
    let mut iterations = 0;

    // Blahut-Arimoto steps grouped in threes with a squared extrapolation
    // (SQUAREM) between them. An extrapolated point is kept only if it does
    // not raise the Blahut functional, so the recorded values never increase.
    'outer: while iterations < opts.max_iters {
        let q0 = q;
        let mut q1 = vec![0.0; n_rec];
        let (g0, f0) = ba.step(&q0, &mut q1);
        iterations += 1;
        if trace {
            history.push(f0);
        }
        if !g0.is_finite() {
            q = q0;
            break;
        }
        if g0 < opts.tol_nats {
            q = q1;
            converged = true;
            break;
        }
        if iterations >= opts.max_iters {
            q = q1;
            break;
        }
        let mut q2 = vec![0.0; n_rec];
        let (g1, f1) = ba.step(&q1, &mut q2);
        iterations += 1;
        if trace {
            history.push(f1);
        }
        if g1 < opts.tol_nats || !g1.is_finite() || iterations >= opts.max_iters {
            converged = g1 < opts.tol_nats;
            q = q2;
            break;
        }
        let r: Vec<f64> = q1.iter().zip(&q0).map(|(a, b)| a - b).collect();
        let v: Vec<f64> = q2.iter().zip(&q1).zip(&r).map(|((a, b), r)| a - b - r).collect();
        let norm = |x: &[f64]| x.iter().map(|t| t * t).sum::<f64>().sqrt();
        let mut alpha = -norm(&r) / norm(&v);
        if !alpha.is_finite() || alpha > -1.0 {
            q = q2;
            continue;
        }
        let mut qe = vec![0.0; n_rec];
        let mut q3 = vec![0.0; n_rec];
        while alpha < -1.0 - 1e-9 {
            let mut feasible = true;
            for k in 0..n_rec {
                qe[k] = q0[k] - 2.0 * alpha * r[k] + alpha * alpha * v[k];
                feasible &= qe[k] >= 0.0;
            }
            let total: f64 = qe.iter().sum();
            if feasible && total > 0.0 {
                qe.iter_mut().for_each(|x| *x /= total);
                let (g, f) = ba.step(&qe, &mut q3);
                iterations += 1;
                if g.is_finite() && f <= f1 {
                    if trace {
                        history.push(f);
                    }
                    q = q3;
                    if g < opts.tol_nats {
                        converged = true;
                        break 'outer;
                    }
                    continue 'outer;
                }
                if iterations >= opts.max_iters {
                    break;
                }
            }
            alpha = 0.5 * (alpha - 1.0);
        }
        q = q2;
    }

    // Final channel from q; report the exact I(X; X̂) and E d_i of that channel.
    let mut out_marginal = vec![0.0; n_rec];
    let mut channel = vec![0.0; c.support.len() * n_rec];
    for (k, (&x, &p)) in c.support.iter().zip(&c.probs).enumerate() {
        let row = &exps[x * n_rec..(x + 1) * n_rec];
        let zx: f64 = row
            .iter()
            .zip(&q)
            .map(|(a, qv)| a * qv)
            .sum::<f64>()
            .max(f64::MIN_POSITIVE);
        for xh in 0..n_rec {
            let qq = q[xh] * row[xh] / zx;
            channel[k * n_rec + xh] = qq;
            out_marginal[xh] += p * qq;
        }
    }
    let mut rate_nats = 0.0;
    let mut distortions = vec![0.0; problem.num_coords()];
    for (k, (&x, &p)) in c.support.iter().zip(&c.probs).enumerate() {
        for xh in 0..n_rec {
            let qq = channel[k * n_rec + xh];
            // Mass that underflows in the output marginal contributes nothing.
            if p * qq > 0.0 && out_marginal[xh] > 0.0 {
                rate_nats += p * qq * (qq / out_marginal[xh]).ln();
                for (acc, d) in distortions.iter_mut().zip(&problem.distortions) {
                    *acc += p * qq * d[x * n_rec + xh];
                }
            }
        }
    }
    if !rate_nats.is_finite() {
        converged = false;
    }
    let point = RdPoint {
        rate: (rate_nats / LN_2).max(0.0),
        distortions,
        slopes: slopes.to_vec(),
        iterations,
        converged,
    };
    (point, q, history)
}

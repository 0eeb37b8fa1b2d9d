//! Numerical checks of the sandwich bounds on the joint rate-distortion
//! function of a network source, and of its separability into conditionally
//! independent blocks given side information.

use std::fmt;

use crate::bn::{conditional_partition, marginal, BayesNet, Partition, SizeGuard};
use crate::error::{invalid, Result};
use crate::info::Bits;
use crate::par::{self, Exec};
use crate::rd::{DistortionSpec, RdOptions, RdPoint, RdProblem};

/// Default agreement tolerance for bound comparisons, in bits.
pub const BOUND_TOL: f64 = 2e-4;

/// Points per variable in [`default_target_grid`].
pub const DEFAULT_GRID_POINTS: usize = 9;

/// `lower ≤ joint ≤ upper` where `lower = Σ R_{X_i|Pa(X_i)}(D_i)` and
/// `upper = Σ R_{X_i}(D_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub targets: Vec<f64>,
    pub lower: Bits,
    pub joint: Bits,
    pub upper: Bits,
    /// `joint - lower`; negative beyond `-tolerance` means a violation.
    pub slack_lower: Bits,
    /// `upper - joint`.
    pub slack_upper: Bits,
    pub tolerance: f64,
    pub lower_terms: Vec<RdPoint>,
    pub joint_point: RdPoint,
    pub upper_terms: Vec<RdPoint>,
}

impl BoundReport {
    pub fn lower_converged(&self) -> bool {
        self.lower_terms.iter().all(|p| p.converged)
    }

    pub fn upper_converged(&self) -> bool {
        self.upper_terms.iter().all(|p| p.converged)
    }

    pub fn joint_converged(&self) -> bool {
        self.joint_point.converged
    }

    pub fn converged(&self) -> bool {
        self.lower_converged() && self.joint_converged() && self.upper_converged()
    }

    /// Both inequalities hold up to `tolerance`.
    pub fn holds(&self) -> bool {
        self.slack_lower.raw() >= -self.tolerance && self.slack_upper.raw() >= -self.tolerance
    }
}

impl fmt::Display for BoundReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let flag = |ok: bool| if ok { "" } else { " (not converged)" };
        writeln!(f, "targets: {:?}", self.targets)?;
        writeln!(
            f,
            "lower  Σ R(X_i | parents) = {:.6}{}",
            self.lower.raw(),
            flag(self.lower_converged())
        )?;
        writeln!(
            f,
            "joint  R(D)               = {:.6}{}",
            self.joint.raw(),
            flag(self.joint_converged())
        )?;
        writeln!(
            f,
            "upper  Σ R(X_i)           = {:.6}{}",
            self.upper.raw(),
            flag(self.upper_converged())
        )?;
        writeln!(
            f,
            "slack  lower {:+.3e}, upper {:+.3e} (tolerance {:.1e})",
            self.slack_lower.raw(),
            self.slack_upper.raw(),
            self.tolerance
        )?;
        write!(f, "ordering {}", if self.holds() { "holds" } else { "VIOLATED" })
    }
}

/// Joint conditional RD given `side` against the sum over conditionally
/// independent blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct DecompositionReport {
    /// Non-side variables in ascending id order; `targets[k]` applies to
    /// `sources[k]`.
    pub sources: Vec<usize>,
    pub targets: Vec<f64>,
    pub joint_conditional: Bits,
    pub subset_sum: Bits,
    pub blocks: Partition,
    pub per_block: Vec<RdPoint>,
    pub joint_point: RdPoint,
    pub tolerance: f64,
}

impl DecompositionReport {
    /// `joint_conditional - subset_sum` in bits.
    pub fn difference(&self) -> f64 {
        self.joint_conditional.raw() - self.subset_sum.raw()
    }

    pub fn converged(&self) -> bool {
        self.joint_point.converged && self.per_block.iter().all(|p| p.converged)
    }

    pub fn agrees(&self) -> bool {
        self.difference().abs() <= self.tolerance
    }

    /// The joint solve came out below the block sum by more than the
    /// tolerance. Reported rather than treated as an error.
    pub fn joint_below_sum(&self) -> bool {
        self.difference() < -self.tolerance
    }
}

impl fmt::Display for DecompositionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "side set: {:?}", self.blocks.side_set)?;
        for (block, pt) in self.blocks.blocks.iter().zip(&self.per_block) {
            writeln!(
                f,
                "block {:?}: {:.6} bits{}",
                block,
                pt.rate,
                if pt.converged { "" } else { " (not converged)" }
            )?;
        }
        writeln!(f, "subset sum        = {:.6}", self.subset_sum.raw())?;
        writeln!(f, "joint conditional = {:.6}", self.joint_conditional.raw())?;
        write!(
            f,
            "difference {:+.3e} (tolerance {:.1e}): {}",
            self.difference(),
            self.tolerance,
            if self.agrees() {
                "agree"
            } else if self.joint_below_sum() {
                "joint below block sum"
            } else {
                "disagree"
            }
        )
    }
}

struct Term {
    problem: RdProblem,
    targets: Vec<f64>,
}

fn solve_terms(terms: &[Term], opts: &RdOptions) -> Result<Vec<RdPoint>> {
    let inner = RdOptions {
        exec: Exec::Sequential,
        ..*opts
    };
    par::map(opts.exec, terms, |t| t.problem.solve_targets(&t.targets, &inner))
        .into_iter()
        .collect()
}

fn problem_for(
    net: &BayesNet,
    sources: &[usize],
    side: &[usize],
    d: &DistortionSpec,
    guard: SizeGuard,
) -> Result<RdProblem> {
    let mut scope = side.to_vec();
    scope.extend_from_slice(sources);
    let table = marginal(net, &scope, guard)?;
    let ds: Vec<_> = sources.iter().map(|&v| d.for_var(v).clone()).collect();
    RdProblem::from_table(&table, sources, side, &ds, guard)
}

/// Solves the joint RD at `targets` (one per variable) together with the
/// per-variable marginal and parent-conditional RDs that bracket it.
pub fn lemma1_bounds(
    net: &BayesNet,
    targets: &[f64],
    d: &DistortionSpec,
    opts: &RdOptions,
    guard: SizeGuard,
) -> Result<BoundReport> {
    let m = net.num_vars();
    if targets.len() != m {
        return Err(invalid(format!("{} targets for {m} variables", targets.len())));
    }
    d.check(net)?;
    let all: Vec<usize> = (0..m).collect();
    let mut terms = vec![Term {
        problem: problem_for(net, &all, &[], d, guard)?,
        targets: targets.to_vec(),
    }];
    for (v, &t) in targets.iter().enumerate() {
        terms.push(Term {
            problem: problem_for(net, &[v], &[], d, guard)?,
            targets: vec![t],
        });
    }
    for (v, &t) in targets.iter().enumerate() {
        terms.push(Term {
            problem: problem_for(net, &[v], net.parents(v), d, guard)?,
            targets: vec![t],
        });
    }
    let mut points = solve_terms(&terms, opts)?;
    let lower_terms = points.split_off(1 + m);
    let upper_terms = points.split_off(1);
    let joint_point = points.pop().expect("joint term");

    let lower: f64 = lower_terms.iter().map(|p| p.rate).sum();
    let upper: f64 = upper_terms.iter().map(|p| p.rate).sum();
    let joint = joint_point.rate;
    Ok(BoundReport {
        targets: targets.to_vec(),
        lower: Bits::new(lower),
        joint: Bits::new(joint),
        upper: Bits::new(upper),
        slack_lower: Bits::new(joint - lower),
        slack_upper: Bits::new(upper - joint),
        tolerance: BOUND_TOL,
        lower_terms,
        joint_point,
        upper_terms,
    })
}

/// Compares the conditional RD of all non-side variables given `side` with
/// the sum of per-block conditional RDs. `targets` has one entry per non-side
/// variable, in ascending id order.
pub fn lemma2_check(
    net: &BayesNet,
    side: &[usize],
    targets: &[f64],
    d: &DistortionSpec,
    opts: &RdOptions,
    guard: SizeGuard,
) -> Result<DecompositionReport> {
    if side.is_empty() {
        return Err(invalid("side set must be nonempty"));
    }
    d.check(net)?;
    let partition = conditional_partition(net, side)?;
    let sources: Vec<usize> = (0..net.num_vars()).filter(|v| !side.contains(v)).collect();
    if sources.is_empty() {
        return Err(invalid("side set covers every variable"));
    }
    if targets.len() != sources.len() {
        return Err(invalid(format!(
            "{} targets for {} non-side variables",
            targets.len(),
            sources.len()
        )));
    }
    let target_of = |v: usize| targets[sources.iter().position(|&u| u == v).expect("non-side")];

    let mut terms = vec![Term {
        problem: problem_for(net, &sources, &partition.side_set, d, guard)?,
        targets: targets.to_vec(),
    }];
    for block in &partition.blocks {
        terms.push(Term {
            problem: problem_for(net, block, &partition.side_set, d, guard)?,
            targets: block.iter().map(|&v| target_of(v)).collect(),
        });
    }
    let mut points = solve_terms(&terms, opts)?;
    let per_block = points.split_off(1);
    let joint_point = points.pop().expect("joint term");
    let subset_sum: f64 = per_block.iter().map(|p| p.rate).sum();
    Ok(DecompositionReport {
        sources,
        targets: targets.to_vec(),
        joint_conditional: Bits::new(joint_point.rate),
        subset_sum: Bits::new(subset_sum),
        blocks: partition,
        per_block,
        joint_point,
        tolerance: BOUND_TOL,
    })
}

/// Per variable, the smallest distortion reachable with no rate:
/// `min_x̂ Σ_x p(x) d(x, x̂)`.
pub fn zero_rate_distortions(net: &BayesNet, d: &DistortionSpec, guard: SizeGuard) -> Result<Vec<f64>> {
    d.check(net)?;
    (0..net.num_vars())
        .map(|v| Ok(problem_for(net, &[v], &[], d, guard)?.zero_rate_distortions()[0]))
        .collect()
}

/// `DEFAULT_GRID_POINTS` target vectors; point `j` sets every variable to
/// `j / DEFAULT_GRID_POINTS` of its zero-rate distortion, `j = 1..`.
pub fn default_target_grid(net: &BayesNet, d: &DistortionSpec, guard: SizeGuard) -> Result<Vec<Vec<f64>>> {
    let z = zero_rate_distortions(net, d, guard)?;
    let n = DEFAULT_GRID_POINTS as f64;
    Ok((1..=DEFAULT_GRID_POINTS)
        .map(|j| z.iter().map(|zi| zi * j as f64 / n).collect())
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bn::{copy_pair, fig4a, fig4b, independent, random_net, RandomNetConfig};
    use crate::info::binary_entropy;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn opts() -> RdOptions {
        RdOptions {
            exec: Exec::Sequential,
            ..RdOptions::default()
        }
    }

    fn guard() -> SizeGuard {
        SizeGuard::default()
    }

    #[test]
    fn independent_variables_collapse() {
        let net = independent(3);
        let d = DistortionSpec::hamming(&net);
        let r = lemma1_bounds(&net, &[0.1, 0.2, 0.3], &d, &opts(), guard()).unwrap();
        let expected: f64 = [0.1, 0.2, 0.3].iter().map(|&t| 1.0 - binary_entropy(t)).sum();
        for v in [r.lower, r.joint, r.upper] {
            assert!((v.raw() - expected).abs() < 2e-4, "{} vs {expected}", v.raw());
        }
        assert!(r.converged() && r.holds());
    }

    #[test]
    fn copy_pair_bounds() {
        let net = copy_pair();
        let d = DistortionSpec::hamming(&net);
        let r = lemma1_bounds(&net, &[0.1, 0.1], &d, &opts(), guard()).unwrap();
        let one = 1.0 - binary_entropy(0.1);
        assert!((r.lower.raw() - one).abs() < 1e-4);
        assert!((r.upper.raw() - 2.0 * one).abs() < 1e-4);
        assert!(r.lower.raw() - 2e-4 <= r.joint.raw() && r.joint.raw() <= r.upper.raw() + 2e-4);
        assert!(r.holds());
    }

    #[test]
    fn zero_rate_targets() {
        let net = fig4b(0.1, 0.2);
        let d = DistortionSpec::hamming(&net);
        let z = zero_rate_distortions(&net, &d, guard()).unwrap();
        let r = lemma1_bounds(&net, &z, &d, &opts(), guard()).unwrap();
        for v in [r.lower, r.joint, r.upper] {
            assert!(v.raw() <= 1e-6);
        }
    }

    #[test]
    fn sandwich_on_random_nets() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let cfg = RandomNetConfig {
            vars: 3,
            min_card: 2,
            max_card: 3,
            max_parents: 2,
            edge_prob: 0.6,
            zero_prob: 0.1,
        };
        for _ in 0..4 {
            let net = random_net(&cfg, &mut rng);
            let d = DistortionSpec::hamming(&net);
            for t in default_target_grid(&net, &d, guard()).unwrap().iter().step_by(3) {
                let r = lemma1_bounds(&net, t, &d, &opts(), guard()).unwrap();
                if r.converged() {
                    assert!(r.holds(), "{r}");
                }
            }
        }
    }

    #[test]
    fn fork_separates_given_root() {
        let net = fig4a(0.1, 0.1);
        let d = DistortionSpec::hamming(&net);
        let r = lemma2_check(&net, &[0], &[0.05, 0.05], &d, &opts(), guard()).unwrap();
        assert_eq!(r.blocks.blocks, vec![vec![1], vec![2]]);
        let expected = 2.0 * (binary_entropy(0.1) - binary_entropy(0.05));
        assert!((r.joint_conditional.raw() - expected).abs() < 2e-4);
        assert!((r.subset_sum.raw() - expected).abs() < 2e-4);
        assert!(r.agrees() && r.converged());
    }

    #[test]
    fn single_block_is_trivial() {
        let net = fig4b(0.1, 0.2);
        // X1 -> Y -> X2 with side X1: {Y, X2} stay connected.
        let r = lemma2_check(
            &net,
            &[0],
            &[0.05, 0.05],
            &DistortionSpec::hamming(&net),
            &opts(),
            guard(),
        )
        .unwrap();
        assert_eq!(r.blocks.blocks.len(), 1);
        assert_eq!(r.joint_conditional, r.subset_sum);
    }

    #[test]
    fn all_but_one_side() {
        let net = fig4a(0.2, 0.3);
        let d = DistortionSpec::hamming(&net);
        let r = lemma2_check(&net, &[0, 1], &[0.1], &d, &opts(), guard()).unwrap();
        assert_eq!(r.sources, vec![2]);
        assert_eq!(r.joint_conditional, r.subset_sum);
        // X2 given (Y, X1) is X2 given Y: crossover 0.3.
        assert!((r.subset_sum.raw() - (binary_entropy(0.3) - binary_entropy(0.1))).abs() < 1e-4);
    }

    #[test]
    fn rejects_bad_arguments() {
        let net = fig4a(0.1, 0.1);
        let d = DistortionSpec::hamming(&net);
        assert!(lemma2_check(&net, &[], &[0.1, 0.1, 0.1], &d, &opts(), guard()).is_err());
        assert!(lemma2_check(&net, &[0], &[0.1], &d, &opts(), guard()).is_err());
        assert!(lemma1_bounds(&net, &[0.1], &d, &opts(), guard()).is_err());
    }

    #[test]
    fn default_grid_shape() {
        let net = fig4a(0.1, 0.1);
        let grid = default_target_grid(&net, &DistortionSpec::hamming(&net), guard()).unwrap();
        assert_eq!(grid.len(), 9);
        assert!(grid[8].iter().all(|&t| (t - 0.5).abs() < 1e-12));
        assert!(grid[0].iter().all(|&t| t > 0.0));
    }
}

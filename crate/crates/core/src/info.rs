//! Entropies and mutual informations of network sources, in bits.

use std::fmt;

use crate::bn::{enumerate_joint, marginal, BayesNet, JointTable, SizeGuard};
use crate::error::{invalid, Result};
use crate::par::Exec;

/// Slack allowed below zero before a value is considered negative.
pub const NEG_TOL: f64 = 1e-9;

/// An information quantity in bits.
///
/// `value()` is clamped at zero; `raw()` keeps the floating-point result
/// before clamping.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Bits {
    raw: f64,
}

impl Bits {
    pub fn new(raw: f64) -> Self {
        Self { raw }
    }

    pub fn value(self) -> f64 {
        self.raw.max(0.0)
    }

    pub fn raw(self) -> f64 {
        self.raw
    }
}

impl fmt::Display for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.6} bits", self.value())
    }
}

/// `-Σ p log2 p` with `0 log 0 = 0`.
pub fn entropy(probs: &[f64]) -> f64 {
    probs.iter().filter(|&&p| p > 0.0).map(|&p| -p * p.log2()).sum()
}

/// Binary entropy `h_b(p)`.
pub fn binary_entropy(p: f64) -> f64 {
    entropy(&[p, 1.0 - p])
}

/// `H(X_i | Parent(X_i)) = Σ_pa p(pa) H(X_i | pa)`.
pub fn node_conditional_entropy(net: &BayesNet, id: usize) -> Result<Bits> {
    net.check_ids(&[id])?;
    let parents = net.parents(id);
    let rows = &net.cpt(id).rows;
    if parents.is_empty() {
        return Ok(Bits::new(entropy(&rows[0])));
    }
    let pa = marginal(net, parents, SizeGuard::new(SizeGuard::MAX).expect("max guard"))?;
    let h = pa
        .probs()
        .iter()
        .zip(rows)
        .map(|(&w, row)| if w > 0.0 { w * entropy(row) } else { 0.0 })
        .sum();
    Ok(Bits::new(h))
}

/// `Σ_i H(X_i | Parent(X_i))`.
pub fn joint_entropy_factorized(net: &BayesNet) -> Result<Bits> {
    let mut h = 0.0;
    for id in 0..net.num_vars() {
        h += node_conditional_entropy(net, id)?.raw();
    }
    Ok(Bits::new(h))
}

/// Entropy of a joint table.
pub fn joint_entropy_bruteforce(table: &JointTable) -> Bits {
    Bits::new(entropy(table.probs()))
}

/// `Σ_i H(X_i) - H(X_1, ..., X_m)`, computed by enumeration.
pub fn redundancy_gap(net: &BayesNet, guard: SizeGuard) -> Result<Bits> {
    let table = enumerate_joint(net, guard, Exec::Parallel)?;
    let mut sum = 0.0;
    for id in 0..net.num_vars() {
        sum += entropy(table.marginal(&[id])?.probs());
    }
    Ok(Bits::new(sum - entropy(table.probs())))
}

/// `Σ_i I(X_i; Parent(X_i)) = Σ_i [H(X_i) - H(X_i | Parent(X_i))]`.
///
/// Marginals come from variable elimination, so this route is independent of
/// [`redundancy_gap`].
pub fn parent_information_sum(net: &BayesNet) -> Result<Bits> {
    let guard = SizeGuard::new(SizeGuard::MAX).expect("max guard");
    let mut sum = 0.0;
    for id in 0..net.num_vars() {
        let h = entropy(marginal(net, &[id], guard)?.probs());
        sum += h - node_conditional_entropy(net, id)?.raw();
    }
    Ok(Bits::new(sum))
}

/// `I(A; B | C)` from marginals of `table`.
pub fn conditional_mutual_information(table: &JointTable, a: &[usize], b: &[usize], c: &[usize]) -> Result<Bits> {
    let all: Vec<usize> = a.iter().chain(b).chain(c).copied().collect();
    let mut sorted = all.clone();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != all.len() {
        return Err(invalid("variable sets overlap"));
    }
    let h = |vars: Vec<usize>| -> Result<f64> { Ok(entropy(table.marginal(&vars)?.probs())) };
    let ac = h(a.iter().chain(c).copied().collect())?;
    let bc = h(b.iter().chain(c).copied().collect())?;
    let abc = h(all)?;
    let c_only = h(c.to_vec())?;
    Ok(Bits::new(ac + bc - abc - c_only))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bn::{binary_vars, copy_pair, fig4a, independent, Cpt};

    const HB01: f64 = 0.468_995_593_589_281_2;

    #[test]
    fn binary_entropy_reference() {
        // -0.1 log2 0.1 - 0.9 log2 0.9
        let direct = -0.1 * (0.1f64).ln() / std::f64::consts::LN_2 - 0.9 * (0.9f64).ln() / std::f64::consts::LN_2;
        assert!((binary_entropy(0.1) - direct).abs() < 1e-15);
        assert!((binary_entropy(0.1) - HB01).abs() < 1e-15);
        assert_eq!(binary_entropy(0.0), 0.0);
    }

    #[test]
    fn node_entropies() {
        let net = fig4a(0.1, 0.1);
        assert!((node_conditional_entropy(&net, 0).unwrap().value() - 1.0).abs() < 1e-15);
        assert!((node_conditional_entropy(&net, 1).unwrap().value() - HB01).abs() < 1e-12);
        assert_eq!(node_conditional_entropy(&copy_pair(), 1).unwrap().value(), 0.0);
        assert!(node_conditional_entropy(&net, 3).is_err());
    }

    #[test]
    fn factorized_entropies() {
        assert!((joint_entropy_factorized(&independent(5)).unwrap().value() - 5.0).abs() < 1e-12);
        let h = joint_entropy_factorized(&fig4a(0.1, 0.1)).unwrap().value();
        assert!((h - (1.0 + 2.0 * HB01)).abs() < 1e-12);
        assert!((h - 1.9380).abs() < 1e-4);
    }

    #[test]
    fn bruteforce_entropies() {
        let uniform = JointTable::new(vec![0, 1, 2], vec![2, 2, 2], vec![0.125; 8]).unwrap();
        assert!((joint_entropy_bruteforce(&uniform).value() - 3.0).abs() < 1e-15);
        let point = JointTable::new(vec![0], vec![3], vec![0.0, 1.0, 0.0]).unwrap();
        assert_eq!(joint_entropy_bruteforce(&point).value(), 0.0);
        let net = fig4a(0.1, 0.1);
        let t = enumerate_joint(&net, SizeGuard::DEFAULT, Exec::Sequential).unwrap();
        assert!((joint_entropy_bruteforce(&t).value() - (1.0 + 2.0 * HB01)).abs() < 1e-12);
    }

    #[test]
    fn redundancy_examples() {
        let g = SizeGuard::DEFAULT;
        assert!(redundancy_gap(&independent(4), g).unwrap().value() < 1e-12);
        assert!((redundancy_gap(&copy_pair(), g).unwrap().value() - 1.0).abs() < 1e-12);
        let r = redundancy_gap(&fig4a(0.1, 0.1), g).unwrap().value();
        assert!((r - 2.0 * (1.0 - HB01)).abs() < 1e-12);
        assert!((r - 1.0620).abs() < 1e-4);
        assert!(redundancy_gap(&crate::bn::chain(30, 0.1), g).is_err());
    }

    #[test]
    fn cmi_examples() {
        let indep = JointTable::new(vec![0, 1], vec![2, 2], vec![0.25; 4]).unwrap();
        assert!(conditional_mutual_information(&indep, &[0], &[1], &[]).unwrap().value() < 1e-15);

        let copy = JointTable::new(vec![0, 1], vec![2, 2], vec![0.5, 0.0, 0.0, 0.5]).unwrap();
        let i = conditional_mutual_information(&copy, &[0], &[1], &[]).unwrap();
        assert!((i.value() - 1.0).abs() < 1e-15);

        let net = fig4a(0.1, 0.1);
        let t = enumerate_joint(&net, SizeGuard::DEFAULT, Exec::Sequential).unwrap();
        let i = conditional_mutual_information(&t, &[1], &[2], &[0]).unwrap();
        assert!(i.value() <= 1e-9);
        assert!(conditional_mutual_information(&t, &[1], &[1], &[0]).is_err());
    }

    #[test]
    fn parents_with_zero_mass_do_not_contribute() {
        // B is always 0, so C's second row is unreachable.
        let net = BayesNet::new(
            binary_vars(&["b", "c"]),
            vec![
                Cpt::root(0, vec![1.0, 0.0]),
                Cpt::new(1, vec![0], vec![vec![1.0, 0.0], vec![0.5, 0.5]]),
            ],
        )
        .unwrap();
        assert_eq!(joint_entropy_factorized(&net).unwrap().value(), 0.0);
    }
}

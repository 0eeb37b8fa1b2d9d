//! Discrete Bayesian-network sources.
//!
//! A [`BayesNet`] owns its variables, one [`Cpt`] per variable and a
//! topological order. Parent configurations are indexed mixed-radix over the
//! CPT's parent list with the *last* parent varying fastest; the same layout
//! is used for [`JointTable`] entries over a scope.

mod bundled;
mod format;
mod guard;
mod infer;
mod joint;
mod partition;
mod random;
mod sample;
mod validate;

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub use bundled::{bundled_networks, chain, copy_pair, fig4a, fig4b, independent, scene};
pub use format::{load_network, parse_network, to_json, NetFile};
pub use guard::{SizeGuard, SIZE_GUARD_ENV};
pub use infer::marginal;
pub use joint::{enumerate_joint, joint_probability, JointTable};
pub use partition::{conditional_partition, moral_graph, Partition};
pub use random::{random_net, RandomNetConfig};
pub use sample::sample;
pub use validate::{validate, ValidationReport, Violation};

/// Rows may be off by this much at load time and get renormalized.
pub const RENORMALIZE_TOL: f64 = 1e-9;
/// Accepted deviation of a row sum from 1 on a constructed network.
pub const ROW_SUM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct Variable {
    pub id: usize,
    pub name: String,
    pub cardinality: usize,
}

/// Conditional probability table of `child` given `parents`.
///
/// `rows[c][x]` is `p(child = x | parents = config c)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Cpt {
    pub child: usize,
    pub parents: Vec<usize>,
    pub rows: Vec<Vec<f64>>,
}

impl Cpt {
    pub fn new(child: usize, parents: Vec<usize>, rows: Vec<Vec<f64>>) -> Self {
        Self { child, parents, rows }
    }

    /// Root-node table with a single row.
    pub fn root(child: usize, probs: Vec<f64>) -> Self {
        Self::new(child, Vec::new(), vec![probs])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BayesNet {
    variables: Vec<Variable>,
    cpts: Vec<Cpt>,
    order: Vec<usize>,
    cards: Vec<usize>,
    by_child: Vec<Option<usize>>,
}

impl BayesNet {
    /// Builds and validates a network.
    ///
    /// Rows whose sum is off by more than [`ROW_SUM_TOL`] but within
    /// [`RENORMALIZE_TOL`] of 1 are rescaled; any other invariant violation is returned as [`Error::Validation`].
    pub fn new(variables: Vec<Variable>, mut cpts: Vec<Cpt>) -> Result<Self> {
        for cpt in &mut cpts {
            for row in &mut cpt.rows {
                let sum: f64 = row.iter().sum();
                if sum.is_finite()
                    && (sum - 1.0).abs() > ROW_SUM_TOL
                    && (sum - 1.0).abs() <= RENORMALIZE_TOL
                    && row.iter().all(|&p| p >= 0.0)
                {
                    row.iter_mut().for_each(|p| *p /= sum);
                }
            }
        }
        cpts.sort_by_key(|c| c.child);
        let net = Self::new_unchecked(variables, cpts);
        let report = validate(&net);
        if report.is_empty() {
            Ok(net)
        } else {
            Err(Error::Validation(report))
        }
    }

    /// Builds a network without checking any invariant.
    ///
    /// The topological order is computed when possible; on a cyclic graph it
    /// only contains the acyclic prefix. Use [`validate`] to inspect the
    /// result. Every other operation assumes a valid network.
    pub fn new_unchecked(variables: Vec<Variable>, cpts: Vec<Cpt>) -> Self {
        let n = variables.len();
        let cards = variables.iter().map(|v| v.cardinality).collect();
        let mut by_child = vec![None; n];
        for (k, cpt) in cpts.iter().enumerate() {
            if cpt.child < n && by_child[cpt.child].is_none() {
                by_child[cpt.child] = Some(k);
            }
        }
        let mut net = Self {
            variables,
            cpts,
            order: Vec::new(),
            cards,
            by_child,
        };
        net.order = net.kahn_order();
        net
    }

    /// Replaces the topological order (unchecked).
    pub fn with_order(mut self, order: Vec<usize>) -> Self {
        self.order = order;
        self
    }

    // Kahn's algorithm, smallest ready id first.
    fn kahn_order(&self) -> Vec<usize> {
        let n = self.variables.len();
        let mut indegree = vec![0usize; n];
        let mut children = vec![Vec::new(); n];
        for cpt in &self.cpts {
            if cpt.child >= n {
                continue;
            }
            for &p in &cpt.parents {
                if p < n {
                    indegree[cpt.child] += 1;
                    children[p].push(cpt.child);
                }
            }
        }
        let mut ready: BinaryHeap<Reverse<usize>> = (0..n).filter(|&v| indegree[v] == 0).map(Reverse).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(Reverse(v)) = ready.pop() {
            order.push(v);
            for &c in &children[v] {
                indegree[c] -= 1;
                if indegree[c] == 0 {
                    ready.push(Reverse(c));
                }
            }
        }
        order
    }

    pub fn num_vars(&self) -> usize {
        self.variables.len()
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn variable(&self, id: usize) -> &Variable {
        &self.variables[id]
    }

    pub fn cpts(&self) -> &[Cpt] {
        &self.cpts
    }

    /// The CPT whose child is `id`.
    pub fn cpt(&self, id: usize) -> &Cpt {
        &self.cpts[self.by_child[id].expect("variable without a CPT")]
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn cards(&self) -> &[usize] {
        &self.cards
    }

    pub fn cardinality(&self, id: usize) -> usize {
        self.cards[id]
    }

    pub fn parents(&self, id: usize) -> &[usize] {
        &self.cpt(id).parents
    }

    pub fn children(&self, id: usize) -> Vec<usize> {
        self.cpts
            .iter()
            .filter(|c| c.parents.contains(&id))
            .map(|c| c.child)
            .collect()
    }

    pub fn var_by_name(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|v| v.name == name)
    }

    /// `L`: the largest number of parents of any variable.
    pub fn max_in_degree(&self) -> usize {
        self.cpts.iter().map(|c| c.parents.len()).max().unwrap_or(0)
    }

    /// `k`: the largest cardinality of any variable.
    pub fn max_cardinality(&self) -> usize {
        self.cards.iter().copied().max().unwrap_or(0)
    }

    /// Number of joint states, saturating.
    pub fn joint_size(&self) -> u128 {
        joint_size(&self.cards)
    }

    pub fn parent_config_count(&self, id: usize) -> usize {
        self.parents(id).iter().map(|&p| self.cards[p]).product()
    }

    /// Mixed-radix index of the parent configuration of `id` in `states`.
    pub fn parent_config(&self, id: usize, states: &[usize]) -> usize {
        self.parents(id)
            .iter()
            .fold(0, |acc, &p| acc * self.cards[p] + states[p])
    }

    /// Inverse of [`BayesNet::parent_config`]: parent states for `config`.
    pub fn parent_states(&self, id: usize, mut config: usize) -> Vec<usize> {
        let parents = self.parents(id);
        let mut out = vec![0; parents.len()];
        for (slot, &p) in out.iter_mut().zip(parents).rev() {
            *slot = config % self.cards[p];
            config /= self.cards[p];
        }
        out
    }

    /// `p(x_id = state | parents as in states)`.
    pub fn conditional(&self, id: usize, states: &[usize]) -> f64 {
        self.cpt(id).rows[self.parent_config(id, states)][states[id]]
    }

    /// Checks that `states` is a full, in-range assignment.
    pub fn check_assignment(&self, states: &[usize]) -> Result<()> {
        if states.len() != self.num_vars() {
            return Err(Error::InvalidArgument(format!(
                "assignment has {} entries, network has {} variables",
                states.len(),
                self.num_vars()
            )));
        }
        for (var, (&state, &cardinality)) in states.iter().zip(&self.cards).enumerate() {
            if state >= cardinality {
                return Err(Error::InvalidState {
                    var,
                    state,
                    cardinality,
                });
            }
        }
        Ok(())
    }

    pub(crate) fn check_ids(&self, ids: &[usize]) -> Result<()> {
        for &id in ids {
            if id >= self.num_vars() {
                return Err(Error::InvalidArgument(format!("unknown variable id {id}")));
            }
        }
        Ok(())
    }

    /// Ancestors of `ids`, including `ids` themselves, as a membership mask.
    pub fn ancestral_mask(&self, ids: &[usize]) -> Vec<bool> {
        let mut mask = vec![false; self.num_vars()];
        let mut stack: Vec<usize> = ids.to_vec();
        while let Some(v) = stack.pop() {
            if !mask[v] {
                mask[v] = true;
                stack.extend_from_slice(self.parents(v));
            }
        }
        mask
    }

    /// First 16 bytes of SHA-256 over the canonical JSON serialization.
    pub fn digest(&self) -> [u8; 16] {
        let canonical = format::canonical_bytes(self);
        let hash = Sha256::digest(&canonical);
        let mut out = [0u8; 16];
        out.copy_from_slice(&hash[..16]);
        out
    }
}

pub(crate) fn joint_size(cards: &[usize]) -> u128 {
    cards.iter().fold(1u128, |acc, &c| acc.saturating_mul(c as u128))
}

/// Binary variables named by the given labels, ids in list order.
pub fn binary_vars(names: &[&str]) -> Vec<Variable> {
    names
        .iter()
        .enumerate()
        .map(|(id, n)| Variable {
            id,
            name: (*n).to_string(),
            cardinality: 2,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parent_config_is_mixed_radix_last_fastest() {
        let vars = vec![
            Variable {
                id: 0,
                name: "a".into(),
                cardinality: 2,
            },
            Variable {
                id: 1,
                name: "b".into(),
                cardinality: 3,
            },
            Variable {
                id: 2,
                name: "c".into(),
                cardinality: 2,
            },
        ];
        let rows = (0..6).map(|_| vec![0.5, 0.5]).collect();
        let net = BayesNet::new(
            vars,
            vec![
                Cpt::root(0, vec![0.5, 0.5]),
                Cpt::root(1, vec![0.2, 0.3, 0.5]),
                Cpt::new(2, vec![0, 1], rows),
            ],
        )
        .unwrap();
        assert_eq!(net.parent_config(2, &[0, 0, 0]), 0);
        assert_eq!(net.parent_config(2, &[0, 1, 0]), 1);
        assert_eq!(net.parent_config(2, &[1, 0, 0]), 3);
        assert_eq!(net.parent_config(2, &[1, 2, 0]), 5);
        for c in 0..6 {
            let ps = net.parent_states(2, c);
            assert_eq!(net.parent_config(2, &[ps[0], ps[1], 0]), c);
        }
        assert_eq!(net.max_in_degree(), 2);
        assert_eq!(net.max_cardinality(), 3);
    }

    #[test]
    fn small_row_error_is_renormalized() {
        let net = BayesNet::new(binary_vars(&["a"]), vec![Cpt::root(0, vec![0.5 + 4e-10, 0.5])]).unwrap();
        let sum: f64 = net.cpt(0).rows[0].iter().sum();
        assert!((sum - 1.0).abs() < 1e-15);
    }

    #[test]
    fn order_puts_parents_first() {
        // ids listed child-first
        let net = BayesNet::new(
            binary_vars(&["x2", "x1"]),
            vec![
                Cpt::new(0, vec![1], vec![vec![1.0, 0.0], vec![0.0, 1.0]]),
                Cpt::root(1, vec![0.5, 0.5]),
            ],
        )
        .unwrap();
        assert_eq!(net.order(), &[1, 0]);
    }

    #[test]
    fn digest_is_stable_and_structure_sensitive() {
        let a = fig4a(0.1, 0.1);
        let b = fig4a(0.1, 0.1);
        let c = fig4a(0.1, 0.2);
        assert_eq!(a.digest(), b.digest());
        assert_ne!(a.digest(), c.digest());
    }
}

use super::{joint_size, BayesNet, SizeGuard};
use crate::error::{invalid, Error, Result};
use crate::par::{self, Exec};

const TABLE_SUM_TOL: f64 = 1e-9;

/// Dense probability table over the joint states of `scope`.
///
/// Entry order is mixed-radix over `scope` with the last variable fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct JointTable {
    scope: Vec<usize>,
    cards: Vec<usize>,
    probs: Vec<f64>,
}

impl JointTable {
    pub fn new(scope: Vec<usize>, cards: Vec<usize>, probs: Vec<f64>) -> Result<Self> {
        if scope.len() != cards.len() {
            return Err(invalid("scope and cardinalities differ in length"));
        }
        let mut sorted = scope.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != scope.len() {
            return Err(invalid("scope contains a repeated variable"));
        }
        if joint_size(&cards) != probs.len() as u128 {
            return Err(invalid(format!(
                "table has {} entries, scope needs {}",
                probs.len(),
                joint_size(&cards)
            )));
        }
        if probs.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(invalid("table entry outside [0, 1]"));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > TABLE_SUM_TOL {
            return Err(invalid(format!("table sums to {sum}")));
        }
        Ok(Self { scope, cards, probs })
    }

    /// Table for a single distribution over one variable labeled `var`.
    pub fn from_distribution(var: usize, probs: Vec<f64>) -> Result<Self> {
        Self::new(vec![var], vec![probs.len()], probs)
    }

    pub(crate) fn from_parts_unchecked(scope: Vec<usize>, cards: Vec<usize>, probs: Vec<f64>) -> Self {
        Self { scope, cards, probs }
    }

    pub fn scope(&self) -> &[usize] {
        &self.scope
    }

    pub fn cards(&self) -> &[usize] {
        &self.cards
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// Position of `var` in the scope.
    pub fn position(&self, var: usize) -> Option<usize> {
        self.scope.iter().position(|&v| v == var)
    }

    pub fn cardinality_of(&self, var: usize) -> Option<usize> {
        self.position(var).map(|k| self.cards[k])
    }

    /// Index of the entry for `states` (given in scope order).
    pub fn index_of(&self, states: &[usize]) -> usize {
        states.iter().zip(&self.cards).fold(0, |acc, (&s, &c)| acc * c + s)
    }

    /// States (in scope order) of entry `index`.
    pub fn states_of(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.cards.len()];
        for (slot, &c) in out.iter_mut().zip(&self.cards).rev() {
            *slot = index % c;
            index /= c;
        }
        out
    }

    /// Marginal over `vars`, laid out in the order given.
    pub fn marginal(&self, vars: &[usize]) -> Result<JointTable> {
        let mut positions = Vec::with_capacity(vars.len());
        for &v in vars {
            let k = self
                .position(v)
                .ok_or_else(|| invalid(format!("variable {v} not in table scope")))?;
            if positions.contains(&k) {
                return Err(invalid(format!("variable {v} requested twice")));
            }
            positions.push(k);
        }
        let cards: Vec<usize> = positions.iter().map(|&k| self.cards[k]).collect();
        let mut out = vec![0.0; cards.iter().product()];

        // Odometer over the full scope, tracking the marginal index by strides.
        let mut strides = vec![0usize; self.cards.len()];
        let mut stride = 1;
        for (&k, &c) in positions.iter().zip(&cards).rev() {
            strides[k] = stride;
            stride *= c;
        }
        let mut state = vec![0usize; self.cards.len()];
        let mut target = 0usize;
        for &p in &self.probs {
            out[target] += p;
            for d in (0..state.len()).rev() {
                state[d] += 1;
                target += strides[d];
                if state[d] < self.cards[d] {
                    break;
                }
                target -= strides[d] * state[d];
                state[d] = 0;
            }
        }
        Ok(JointTable {
            scope: vars.to_vec(),
            cards,
            probs: out,
        })
    }
}

/// `∏_i p(x_i | parents(x_i))` for a full assignment in variable-id order.
pub fn joint_probability(net: &BayesNet, states: &[usize]) -> Result<f64> {
    net.check_assignment(states)?;
    Ok(product_of_conditionals(net, states))
}

pub(crate) fn product_of_conditionals(net: &BayesNet, states: &[usize]) -> f64 {
    let mut p = 1.0;
    for &v in net.order() {
        p *= net.conditional(v, states);
        if p == 0.0 {
            break;
        }
    }
    p
}

/// Brute-force joint table over all variables, in id order.
pub fn enumerate_joint(net: &BayesNet, guard: SizeGuard, exec: Exec) -> Result<JointTable> {
    let size = net.joint_size();
    guard.check(size)?;
    let size = size as usize;
    let cards = net.cards().to_vec();
    let mut probs = vec![0.0; size];
    par::fill_chunks(exec, &mut probs, 1 << 14, |offset, chunk| {
        let mut states = vec![0usize; cards.len()];
        let mut rest = offset;
        for (s, &c) in states.iter_mut().zip(&cards).rev() {
            *s = rest % c;
            rest /= c;
        }
        for slot in chunk.iter_mut() {
            *slot = product_of_conditionals(net, &states);
            for d in (0..states.len()).rev() {
                states[d] += 1;
                if states[d] < cards[d] {
                    break;
                }
                states[d] = 0;
            }
        }
    });
    let sum: f64 = probs.iter().sum();
    if (sum - 1.0).abs() > TABLE_SUM_TOL {
        return Err(Error::InvalidArgument(format!(
            "enumerated joint sums to {sum}; network is not normalized"
        )));
    }
    Ok(JointTable {
        scope: (0..net.num_vars()).collect(),
        cards,
        probs,
    })
}

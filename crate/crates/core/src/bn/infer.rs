//! Exact marginals by variable elimination over the ancestral set.

use super::{joint_size, BayesNet, JointTable, SizeGuard};
use crate::error::{invalid, Result};

/// Table over `vars` (sorted by id) with last variable fastest.
#[derive(Debug, Clone)]
struct Factor {
    vars: Vec<usize>,
    cards: Vec<usize>,
    vals: Vec<f64>,
}

impl Factor {
    fn from_cpt(net: &BayesNet, child: usize) -> Self {
        let cpt = net.cpt(child);
        let mut vars: Vec<usize> = cpt.parents.clone();
        vars.push(child);
        let native_cards: Vec<usize> = vars.iter().map(|&v| net.cardinality(v)).collect();
        // Native layout is (parents..., child), row-major.
        let native: Vec<f64> = cpt.rows.iter().flatten().copied().collect();
        Factor {
            vars,
            cards: native_cards,
            vals: native,
        }
        .sorted()
    }

    fn strides(&self) -> Vec<usize> {
        let mut s = vec![0; self.cards.len()];
        let mut acc = 1;
        for k in (0..self.cards.len()).rev() {
            s[k] = acc;
            acc *= self.cards[k];
        }
        s
    }

    // Re-lays the factor out with variables in ascending id order.
    fn sorted(self) -> Self {
        let mut perm: Vec<usize> = (0..self.vars.len()).collect();
        perm.sort_by_key(|&k| self.vars[k]);
        self.permuted(&perm)
    }

    // New factor whose k-th variable is self.vars[perm[k]].
    fn permuted(&self, perm: &[usize]) -> Self {
        let vars: Vec<usize> = perm.iter().map(|&k| self.vars[k]).collect();
        let cards: Vec<usize> = perm.iter().map(|&k| self.cards[k]).collect();
        let old_strides = self.strides();
        let src_strides: Vec<usize> = perm.iter().map(|&k| old_strides[k]).collect();
        let mut vals = vec![0.0; self.vals.len()];
        let mut state = vec![0usize; cards.len()];
        let mut src = 0usize;
        for slot in vals.iter_mut() {
            *slot = self.vals[src];
            for d in (0..state.len()).rev() {
                state[d] += 1;
                src += src_strides[d];
                if state[d] < cards[d] {
                    break;
                }
                src -= src_strides[d] * state[d];
                state[d] = 0;
            }
        }
        Factor { vars, cards, vals }
    }

    fn product(factors: &[&Factor], net: &BayesNet) -> Factor {
        let mut vars: Vec<usize> = factors.iter().flat_map(|f| f.vars.iter().copied()).collect();
        vars.sort_unstable();
        vars.dedup();
        let cards: Vec<usize> = vars.iter().map(|&v| net.cardinality(v)).collect();
        let size: usize = cards.iter().product();
        // Stride of each result variable inside each operand (0 if absent).
        let operand_strides: Vec<Vec<usize>> = factors
            .iter()
            .map(|f| {
                let fs = f.strides();
                vars.iter()
                    .map(|v| f.vars.iter().position(|u| u == v).map_or(0, |k| fs[k]))
                    .collect()
            })
            .collect();
        let mut idx = vec![0usize; factors.len()];
        let mut state = vec![0usize; vars.len()];
        let mut vals = vec![0.0; size];
        for slot in vals.iter_mut() {
            *slot = factors.iter().zip(&idx).map(|(f, &i)| f.vals[i]).product();
            for d in (0..state.len()).rev() {
                state[d] += 1;
                for (i, s) in idx.iter_mut().zip(&operand_strides) {
                    *i += s[d];
                }
                if state[d] < cards[d] {
                    break;
                }
                for (i, s) in idx.iter_mut().zip(&operand_strides) {
                    *i -= s[d] * state[d];
                }
                state[d] = 0;
            }
        }
        Factor { vars, cards, vals }
    }

    fn sum_out(&self, var: usize) -> Factor {
        let k = self.vars.iter().position(|&v| v == var).expect("var in factor");
        let strides = self.strides();
        let inner = strides[k];
        let card = self.cards[k];
        let outer = self.vals.len() / (inner * card);
        let mut vals = Vec::with_capacity(outer * inner);
        for o in 0..outer {
            for i in 0..inner {
                let base = o * inner * card + i;
                vals.push((0..card).map(|c| self.vals[base + c * inner]).sum());
            }
        }
        let mut vars = self.vars.clone();
        let mut cards = self.cards.clone();
        vars.remove(k);
        cards.remove(k);
        Factor { vars, cards, vals }
    }
}

/// Exact marginal distribution of `vars` (in the order given).
///
/// Only the ancestral set of `vars` is touched. Non-query variables are
/// eliminated greedily by smallest resulting factor; every intermediate
/// factor is checked against `guard`.
pub fn marginal(net: &BayesNet, vars: &[usize], guard: SizeGuard) -> Result<JointTable> {
    net.check_ids(vars)?;
    let mut sorted = vars.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != vars.len() {
        return Err(invalid("marginal query repeats a variable"));
    }
    guard.check(joint_size(
        &vars.iter().map(|&v| net.cardinality(v)).collect::<Vec<_>>(),
    ))?;

    let mask = net.ancestral_mask(vars);
    let mut factors: Vec<Factor> = (0..net.num_vars())
        .filter(|&v| mask[v])
        .map(|v| Factor::from_cpt(net, v))
        .collect();
    let mut to_eliminate: Vec<usize> = (0..net.num_vars())
        .filter(|&v| mask[v] && !sorted.contains(&v))
        .collect();

    while !to_eliminate.is_empty() {
        // Pick the variable whose elimination product is smallest.
        let (pick, _) = to_eliminate
            .iter()
            .enumerate()
            .map(|(k, &v)| {
                let mut scope: Vec<usize> = factors
                    .iter()
                    .filter(|f| f.vars.contains(&v))
                    .flat_map(|f| f.vars.iter().copied())
                    .collect();
                scope.sort_unstable();
                scope.dedup();
                let cards: Vec<usize> = scope.iter().map(|&u| net.cardinality(u)).collect();
                (k, joint_size(&cards))
            })
            .min_by_key(|&(k, size)| (size, to_eliminate[k]))
            .expect("nonempty");
        let v = to_eliminate.swap_remove(pick);
        let (with, without): (Vec<Factor>, Vec<Factor>) = factors.into_iter().partition(|f| f.vars.contains(&v));
        let refs: Vec<&Factor> = with.iter().collect();
        let scope_cards: Vec<usize> = {
            let mut s: Vec<usize> = refs.iter().flat_map(|f| f.vars.iter().copied()).collect();
            s.sort_unstable();
            s.dedup();
            s.iter().map(|&u| net.cardinality(u)).collect()
        };
        guard.check(joint_size(&scope_cards))?;
        let merged = Factor::product(&refs, net).sum_out(v);
        factors = without;
        factors.push(merged);
    }

    let refs: Vec<&Factor> = factors.iter().collect();
    let result = Factor::product(&refs, net);
    // Query vars may be absent from `result` only if `vars` is empty.
    let perm: Vec<usize> = vars
        .iter()
        .map(|v| result.vars.iter().position(|u| u == v).expect("query var kept"))
        .collect();
    let result = result.permuted(&perm);
    Ok(JointTable::from_parts_unchecked(result.vars, result.cards, result.vals))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bn::{chain, enumerate_joint, random_net, scene, RandomNetConfig};
    use crate::par::Exec;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn assert_tables_close(a: &JointTable, b: &JointTable) {
        assert_eq!(a.scope(), b.scope());
        for (x, y) in a.probs().iter().zip(b.probs()) {
            assert!((x - y).abs() < 1e-12, "{x} vs {y}");
        }
    }

    #[test]
    fn matches_enumeration_on_random_nets() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..40 {
            let cfg = RandomNetConfig {
                vars: 6,
                min_card: 2,
                max_card: 3,
                max_parents: 3,
                edge_prob: 0.5,
                zero_prob: 0.1,
            };
            let net = random_net(&cfg, &mut rng);
            let full = enumerate_joint(&net, SizeGuard::DEFAULT, Exec::Sequential).unwrap();
            for query in [vec![5], vec![3, 1], vec![0, 4, 2], vec![]] {
                let ve = marginal(&net, &query, SizeGuard::DEFAULT).unwrap();
                assert_tables_close(&ve, &full.marginal(&query).unwrap());
            }
        }
    }

    #[test]
    fn long_chain_stays_small() {
        let net = chain(200, 0.1);
        let m = marginal(&net, &[199], SizeGuard::new(16).unwrap()).unwrap();
        assert!((m.probs()[0] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn scene_marginal() {
        let net = scene();
        let full = enumerate_joint(&net, SizeGuard::DEFAULT, Exec::Sequential).unwrap();
        let q = [net.num_vars() - 1, 0];
        assert_tables_close(
            &marginal(&net, &q, SizeGuard::DEFAULT).unwrap(),
            &full.marginal(&q).unwrap(),
        );
    }
}

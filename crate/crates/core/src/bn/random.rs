use rand::Rng;

use super::{BayesNet, Cpt, Variable};

/// Shape of a randomly generated network.
#[derive(Debug, Clone)]
pub struct RandomNetConfig {
    pub vars: usize,
    pub min_card: usize,
    pub max_card: usize,
    pub max_parents: usize,
    /// Probability that each earlier variable is proposed as a parent.
    pub edge_prob: f64,
    /// Probability that a CPT entry is forced to zero (one entry per row
    /// always stays positive).
    pub zero_prob: f64,
}

impl RandomNetConfig {
    pub fn binary(vars: usize) -> Self {
        Self {
            vars,
            min_card: 2,
            max_card: 2,
            max_parents: 3,
            edge_prob: 0.4,
            zero_prob: 0.05,
        }
    }
}

/// Random valid network whose ids are already in topological order.
pub fn random_net(cfg: &RandomNetConfig, rng: &mut impl Rng) -> BayesNet {
    let min_card = cfg.min_card.max(2);
    let max_card = cfg.max_card.max(min_card);
    let cards: Vec<usize> = (0..cfg.vars).map(|_| rng.gen_range(min_card..=max_card)).collect();
    let variables = cards
        .iter()
        .enumerate()
        .map(|(id, &cardinality)| Variable {
            id,
            name: format!("V{id}"),
            cardinality,
        })
        .collect();
    let cpts = (0..cfg.vars)
        .map(|child| {
            let parents: Vec<usize> = (0..child)
                .filter(|_| rng.gen_bool(cfg.edge_prob.clamp(0.0, 1.0)))
                .collect::<Vec<_>>()
                .into_iter()
                .rev()
                .take(cfg.max_parents)
                .rev()
                .collect();
            let rows_n: usize = parents.iter().map(|&p| cards[p]).product();
            let rows = (0..rows_n)
                .map(|_| random_row(cards[child], cfg.zero_prob, rng))
                .collect();
            Cpt::new(child, parents, rows)
        })
        .collect();
    BayesNet::new(variables, cpts).expect("generated network is valid")
}

fn random_row(k: usize, zero_prob: f64, rng: &mut impl Rng) -> Vec<f64> {
    let keep = rng.gen_range(0..k);
    let mut row: Vec<f64> = (0..k)
        .map(|x| {
            if x != keep && rng.gen_bool(zero_prob.clamp(0.0, 1.0)) {
                0.0
            } else {
                rng.gen_range(0.02..1.0)
            }
        })
        .collect();
    let sum: f64 = row.iter().sum();
    row.iter_mut().for_each(|p| *p /= sum);
    row
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bn::validate;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generated_nets_validate() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let cfg = RandomNetConfig {
                vars: 7,
                min_card: 2,
                max_card: 4,
                max_parents: 2,
                edge_prob: 0.6,
                zero_prob: 0.2,
            };
            let net = random_net(&cfg, &mut rng);
            assert!(validate(&net).is_empty());
            assert!(net.max_in_degree() <= 2);
        }
    }
}

//! Example networks, both as builders and as the shipped JSON files.

use super::{binary_vars, parse_network, BayesNet, Cpt, Variable};

fn bsc(p: f64) -> Vec<Vec<f64>> {
    vec![vec![1.0 - p, p], vec![p, 1.0 - p]]
}

/// Fork `X1 <- Y -> X2` with uniform `Y` and binary symmetric channels of
/// crossover `p1`, `p2`. Ids: Y = 0, X1 = 1, X2 = 2.
pub fn fig4a(p1: f64, p2: f64) -> BayesNet {
    BayesNet::new(
        binary_vars(&["Y", "X1", "X2"]),
        vec![
            Cpt::root(0, vec![0.5, 0.5]),
            Cpt::new(1, vec![0], bsc(p1)),
            Cpt::new(2, vec![0], bsc(p2)),
        ],
    )
    .expect("fork network is valid")
}

/// Chain `X1 -> Y -> X2` with uniform `X1`. Ids: X1 = 0, Y = 1, X2 = 2.
///
/// Both (X1, Y) and (X2, Y) are doubly symmetric with parameters `p1`, `p2`.
pub fn fig4b(p1: f64, p2: f64) -> BayesNet {
    BayesNet::new(
        binary_vars(&["X1", "Y", "X2"]),
        vec![
            Cpt::root(0, vec![0.5, 0.5]),
            Cpt::new(1, vec![0], bsc(p1)),
            Cpt::new(2, vec![1], bsc(p2)),
        ],
    )
    .expect("chain network is valid")
}

/// Binary Markov chain of `n` nodes, uniform root, crossover `p` per link.
pub fn chain(n: usize, p: f64) -> BayesNet {
    let vars = (0..n)
        .map(|id| Variable {
            id,
            name: format!("X{}", id + 1),
            cardinality: 2,
        })
        .collect();
    let cpts = (0..n)
        .map(|id| {
            if id == 0 {
                Cpt::root(0, vec![0.5, 0.5])
            } else {
                Cpt::new(id, vec![id - 1], bsc(p))
            }
        })
        .collect();
    BayesNet::new(vars, cpts).expect("chain is valid")
}

/// `m` independent uniform binary variables.
pub fn independent(m: usize) -> BayesNet {
    let vars = (0..m)
        .map(|id| Variable {
            id,
            name: format!("X{}", id + 1),
            cardinality: 2,
        })
        .collect();
    let cpts = (0..m).map(|id| Cpt::root(id, vec![0.5, 0.5])).collect();
    BayesNet::new(vars, cpts).expect("independent net is valid")
}

/// `X1 -> X2` where X2 copies a uniform X1.
pub fn copy_pair() -> BayesNet {
    BayesNet::new(
        binary_vars(&["X1", "X2"]),
        vec![Cpt::root(0, vec![0.5, 0.5]), Cpt::new(1, vec![0], bsc(0.0))],
    )
    .expect("copy net is valid")
}

/// Small outdoor-scene network with illustrative CPTs.
pub fn scene() -> BayesNet {
    let vars = vec![
        Variable {
            id: 0,
            name: "Outdoor".into(),
            cardinality: 2,
        },
        Variable {
            id: 1,
            name: "Sky".into(),
            cardinality: 2,
        },
        Variable {
            id: 2,
            name: "Grass".into(),
            cardinality: 2,
        },
        Variable {
            id: 3,
            name: "Cloud".into(),
            cardinality: 3,
        },
        Variable {
            id: 4,
            name: "Tree".into(),
            cardinality: 2,
        },
    ];
    let cpts = vec![
        Cpt::root(0, vec![0.4, 0.6]),
        Cpt::new(1, vec![0], vec![vec![0.9, 0.1], vec![0.2, 0.8]]),
        Cpt::new(2, vec![0], vec![vec![0.85, 0.15], vec![0.35, 0.65]]),
        Cpt::new(3, vec![1], vec![vec![1.0, 0.0, 0.0], vec![0.3, 0.45, 0.25]]),
        Cpt::new(
            4,
            vec![0, 2],
            vec![vec![0.95, 0.05], vec![0.7, 0.3], vec![0.6, 0.4], vec![0.2, 0.8]],
        ),
    ];
    BayesNet::new(vars, cpts).expect("scene net is valid")
}

const FIG4A_JSON: &str = include_str!("../../../../networks/fig4a.json");
const FIG4B_JSON: &str = include_str!("../../../../networks/fig4b.json");
const SCENE_JSON: &str = include_str!("../../../../networks/scene.json");

/// The networks shipped under `networks/`, by file stem.
pub fn bundled_networks() -> Vec<(&'static str, BayesNet)> {
    [("fig4a", FIG4A_JSON), ("fig4b", FIG4B_JSON), ("scene", SCENE_JSON)]
        .into_iter()
        .map(|(name, text)| (name, parse_network(text).expect("bundled network parses")))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_files_match_builders() {
        let nets = bundled_networks();
        assert_eq!(nets[0].1, fig4a(0.1, 0.1));
        assert_eq!(nets[1].1, fig4b(0.1, 0.1));
        assert_eq!(nets[2].1, scene());
    }

    #[test]
    fn copy_pair_is_deterministic_child() {
        let net = copy_pair();
        assert_eq!(net.cpt(1).rows, vec![vec![1.0, 0.0], vec![0.0, 1.0]]);
    }
}

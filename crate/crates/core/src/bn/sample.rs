use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::BayesNet;
use crate::par::{self, Exec};

// Samples are drawn in fixed-size chunks, each from its own ChaCha stream, so
// the output depends only on (seed, n) and not on the execution mode.
const CHUNK: usize = 4096;

/// `n` i.i.d. state vectors (variable-id order) by ancestral sampling.
pub fn sample(net: &BayesNet, seed: u64, n: usize, exec: Exec) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new(); n];
    par::fill_chunks(exec, &mut out, CHUNK, |offset, chunk| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream((offset / CHUNK) as u64);
        for slot in chunk.iter_mut() {
            *slot = draw(net, &mut rng);
        }
    });
    out
}

fn draw(net: &BayesNet, rng: &mut impl Rng) -> Vec<usize> {
    let mut states = vec![0usize; net.num_vars()];
    for &v in net.order() {
        let row = &net.cpt(v).rows[net.parent_config(v, &states)];
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        let mut pick = None;
        for (x, &p) in row.iter().enumerate() {
            if p > 0.0 {
                acc += p;
                pick = Some(x);
                if u < acc {
                    break;
                }
            }
        }
        states[v] = pick.expect("row has positive mass");
    }
    states
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bn::fig4a;

    #[test]
    fn empty_and_deterministic() {
        let net = fig4a(0.1, 0.1);
        assert!(sample(&net, 3, 0, Exec::Sequential).is_empty());
        let a = sample(&net, 3, 10_000, Exec::Sequential);
        let b = sample(&net, 3, 10_000, Exec::Parallel);
        assert_eq!(a, b);
        assert_ne!(a, sample(&net, 4, 10_000, Exec::Sequential));
    }

    #[test]
    fn fork_frequency_matches_joint() {
        let net = fig4a(0.1, 0.1);
        let n = 100_000;
        let s = sample(&net, 7, n, Exec::Parallel);
        let hits = s.iter().filter(|v| v[..] == [0, 0, 0]).count();
        let freq = hits as f64 / n as f64;
        assert!((freq - 0.405).abs() < 0.01, "{freq}");
    }

    #[test]
    fn never_draws_zero_probability_states() {
        let net = crate::bn::copy_pair();
        for v in sample(&net, 1, 5000, Exec::Sequential) {
            assert_eq!(v[0], v[1]);
        }
    }
}

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use semrd::bn::{
    conditional_partition, enumerate_joint, marginal, parse_network, random_net, sample, to_json, BayesNet,
    RandomNetConfig, SizeGuard,
};
use semrd::codec::{
    build_factorized_codebooks, build_joint_huffman, decode, encode, joint_expected_length, Bitstream, PrefixCode,
};
use semrd::info::{
    conditional_mutual_information, joint_entropy_bruteforce, joint_entropy_factorized, parent_information_sum,
    redundancy_gap,
};
use semrd::par::Exec;

fn net_from_seed(seed: u64, vars: usize, max_card: usize) -> BayesNet {
    let cfg = RandomNetConfig {
        vars,
        min_card: 2,
        max_card,
        max_parents: 3,
        edge_prob: 0.5,
        zero_prob: 0.1,
    };
    random_net(&cfg, &mut ChaCha8Rng::seed_from_u64(seed))
}

fn guard() -> SizeGuard {
    SizeGuard::default()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn factorized_entropy_matches_enumeration(seed in any::<u64>(), vars in 1usize..8, card in 2usize..4) {
        let net = net_from_seed(seed, vars, card);
        let table = enumerate_joint(&net, guard(), Exec::Sequential).unwrap();
        let f = joint_entropy_factorized(&net).unwrap().raw();
        let b = joint_entropy_bruteforce(&table).raw();
        prop_assert!((f - b).abs() <= 1e-9, "{f} vs {b}");
    }

    #[test]
    fn redundancy_is_parent_information(seed in any::<u64>(), vars in 1usize..8) {
        let net = net_from_seed(seed, vars, 3);
        let gap = redundancy_gap(&net, guard()).unwrap().raw();
        let info = parent_information_sum(&net).unwrap().raw();
        prop_assert!(gap >= -1e-9);
        prop_assert!((gap - info).abs() <= 1e-9, "{gap} vs {info}");
    }

    #[test]
    fn elimination_matches_enumeration(seed in any::<u64>(), vars in 2usize..7, pick in any::<u64>()) {
        let net = net_from_seed(seed, vars, 3);
        let table = enumerate_joint(&net, guard(), Exec::Sequential).unwrap();
        // Query a nonempty subset in a scrambled order.
        let mut query: Vec<usize> = (0..vars).filter(|v| pick >> v & 1 == 1).collect();
        if query.is_empty() {
            query.push(vars - 1);
        }
        query.reverse();
        let ve = marginal(&net, &query, guard()).unwrap();
        let brute = table.marginal(&query).unwrap();
        prop_assert_eq!(ve.scope(), brute.scope());
        for (a, b) in ve.probs().iter().zip(brute.probs()) {
            prop_assert!((a - b).abs() <= 1e-12);
        }
    }

    #[test]
    fn huffman_is_a_complete_prefix_code(weights in prop::collection::vec(0.0f64..1.0, 1..40)) {
        let total: f64 = weights.iter().sum();
        prop_assume!(total > 0.0);
        let probs: Vec<f64> = weights.iter().map(|w| w / total).collect();
        let code = PrefixCode::huffman(&probs).unwrap();
        prop_assert!(code.is_prefix_free());
        prop_assert!(code.kraft_sum() <= 1.0 + 1e-12);
        let h = semrd::info::entropy(&probs);
        let l = code.expected_length(&probs);
        prop_assert!(l >= h - 1e-9 && l < h + 1.0, "L={l} H={h}");
    }

    #[test]
    fn codec_round_trips(seed in any::<u64>(), vars in 1usize..7, n in 0usize..300) {
        let net = net_from_seed(seed, vars, 3);
        let fcb = build_factorized_codebooks(&net).unwrap();
        let samples = sample(&net, seed ^ 0x5eed, n, Exec::Sequential);
        let stream = encode(&fcb, &samples, Exec::Sequential).unwrap();
        let bytes = stream.to_bytes();
        let back = decode(&fcb, &Bitstream::from_bytes(&bytes).unwrap()).unwrap();
        prop_assert_eq!(back, samples);
    }

    #[test]
    fn expected_lengths_bracket_entropy(seed in any::<u64>(), vars in 1usize..7) {
        let net = net_from_seed(seed, vars, 3);
        let h = joint_entropy_factorized(&net).unwrap().raw();
        let fcb = build_factorized_codebooks(&net).unwrap();
        let lf = fcb.expected_length();
        prop_assert!(lf >= h - 1e-9 && lf < h + vars as f64, "Lf={lf} H={h}");
        let table = enumerate_joint(&net, guard(), Exec::Sequential).unwrap();
        let lj = joint_expected_length(&build_joint_huffman(&table, guard()).unwrap(), &table);
        prop_assert!(lj >= h - 1e-9 && lj < h + 1.0);
        prop_assert!(lj <= lf + 1e-9);
    }

    #[test]
    fn partition_blocks_are_conditionally_independent(seed in any::<u64>(), vars in 2usize..7, pick in any::<u64>()) {
        let net = net_from_seed(seed, vars, 2);
        let side: Vec<usize> = (0..vars).filter(|v| pick >> v & 1 == 1).collect();
        let part = conditional_partition(&net, &side).unwrap();
        let covered: usize = part.blocks.iter().map(Vec::len).sum();
        prop_assert_eq!(covered + side.len(), vars);
        let table = enumerate_joint(&net, guard(), Exec::Sequential).unwrap();
        for (i, a) in part.blocks.iter().enumerate() {
            for b in &part.blocks[i + 1..] {
                let cmi = conditional_mutual_information(&table, a, b, &side).unwrap().raw();
                prop_assert!(cmi.abs() <= 1e-9, "I({a:?};{b:?}|{side:?}) = {cmi}");
            }
        }
    }

    #[test]
    fn json_round_trips(seed in any::<u64>(), vars in 1usize..7) {
        let net = net_from_seed(seed, vars, 3);
        let back = parse_network(&to_json(&net, None)).unwrap();
        prop_assert_eq!(back.digest(), net.digest());
    }
}

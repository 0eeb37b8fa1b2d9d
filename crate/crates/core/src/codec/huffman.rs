use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::bn::{JointTable, SizeGuard};
use crate::error::{invalid, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
enum Node {
    Leaf(usize),
    Internal { zero: usize, one: usize },
}

/// A prefix code over symbols `0..n`, kept as the literal Huffman tree.
///
/// Symbols with zero probability have no codeword.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrefixCode {
    codewords: Vec<Option<Vec<bool>>>,
    nodes: Vec<Node>,
    root: usize,
}

// Heap entry; the heap pops the smallest weight, then smallest contained symbol.
struct Pending {
    weight: f64,
    min_symbol: usize,
    node: usize,
}

impl PartialEq for Pending {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Pending {}

impl PartialOrd for Pending {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Pending {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .weight
            .total_cmp(&self.weight)
            .then_with(|| other.min_symbol.cmp(&self.min_symbol))
    }
}

impl PrefixCode {
    /// Huffman code for `probs`.
    ///
    /// Merges always take the two lightest subtrees; equal weights are broken
    /// by the smallest symbol contained in each subtree. The first subtree
    /// popped becomes the 0-branch.
    pub fn huffman(probs: &[f64]) -> Result<Self> {
        if probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(invalid("probabilities must be finite and nonnegative"));
        }
        let mut nodes = Vec::new();
        let mut heap = BinaryHeap::new();
        for (symbol, &weight) in probs.iter().enumerate() {
            if weight > 0.0 {
                heap.push(Pending {
                    weight,
                    min_symbol: symbol,
                    node: nodes.len(),
                });
                nodes.push(Node::Leaf(symbol));
            }
        }
        if heap.is_empty() {
            return Err(invalid("distribution has no positive entry"));
        }
        while heap.len() > 1 {
            let zero = heap.pop().expect("two entries");
            let one = heap.pop().expect("two entries");
            heap.push(Pending {
                weight: zero.weight + one.weight,
                min_symbol: zero.min_symbol.min(one.min_symbol),
                node: nodes.len(),
            });
            nodes.push(Node::Internal {
                zero: zero.node,
                one: one.node,
            });
        }
        let root = heap.pop().expect("root").node;

        let mut codewords = vec![None; probs.len()];
        let mut stack = vec![(root, Vec::new())];
        while let Some((n, prefix)) = stack.pop() {
            match nodes[n] {
                Node::Leaf(s) => codewords[s] = Some(prefix),
                Node::Internal { zero, one } => {
                    let mut z = prefix.clone();
                    z.push(false);
                    let mut o = prefix;
                    o.push(true);
                    stack.push((one, o));
                    stack.push((zero, z));
                }
            }
        }
        Ok(Self { codewords, nodes, root })
    }

    pub fn num_symbols(&self) -> usize {
        self.codewords.len()
    }

    pub fn codeword(&self, symbol: usize) -> Option<&[bool]> {
        self.codewords.get(symbol)?.as_deref()
    }

    /// Codeword lengths; `None` for symbols without a codeword.
    pub fn lengths(&self) -> Vec<Option<usize>> {
        self.codewords.iter().map(|c| c.as_ref().map(Vec::len)).collect()
    }

    /// `Σ 2^-len` over symbols that have a codeword.
    pub fn kraft_sum(&self) -> f64 {
        self.codewords
            .iter()
            .flatten()
            .map(|c| (-(c.len() as f64)).exp2())
            .sum()
    }

    /// `Σ p(x) len(x)`; symbols with positive probability must be coded.
    pub fn expected_length(&self, probs: &[f64]) -> f64 {
        probs
            .iter()
            .zip(&self.codewords)
            .filter(|(p, _)| **p > 0.0)
            .map(|(p, c)| p * c.as_ref().expect("positive symbol is coded").len() as f64)
            .sum()
    }

    /// Walks the tree, pulling one bit at a time from `next_bit`.
    pub fn decode_symbol(&self, mut next_bit: impl FnMut() -> Option<bool>) -> Option<usize> {
        let mut n = self.root;
        loop {
            match self.nodes[n] {
                Node::Leaf(s) => return Some(s),
                Node::Internal { zero, one } => n = if next_bit()? { one } else { zero },
            }
        }
    }

    /// Whether no codeword is a prefix of another.
    pub fn is_prefix_free(&self) -> bool {
        let words: Vec<&Vec<bool>> = self.codewords.iter().flatten().collect();
        words.iter().enumerate().all(|(i, a)| {
            words
                .iter()
                .enumerate()
                .all(|(j, b)| i == j || !(a.len() <= b.len() && b[..a.len()] == a[..]))
        })
    }
}

/// Huffman code over the full joint alphabet of `table`.
pub fn build_joint_huffman(table: &JointTable, guard: SizeGuard) -> Result<PrefixCode> {
    guard.check(table.len() as u128)?;
    PrefixCode::huffman(table.probs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn textbook_lengths() {
        let c = PrefixCode::huffman(&[0.25; 4]).unwrap();
        assert_eq!(c.lengths(), vec![Some(2); 4]);
        let c = PrefixCode::huffman(&[0.5, 0.25, 0.25]).unwrap();
        assert_eq!(c.lengths(), vec![Some(1), Some(2), Some(2)]);
        let c = PrefixCode::huffman(&[0.5, 0.5]).unwrap();
        assert_eq!(c.lengths(), vec![Some(1), Some(1)]);
    }

    #[test]
    fn tie_break_is_fixed() {
        // Merge order: {1,2} (0.25+0.25), then {0} vs {1,2}: 0.5 == 0.5, and
        // symbol 0 is smaller, so symbol 0 gets the 0-branch.
        let c = PrefixCode::huffman(&[0.5, 0.25, 0.25]).unwrap();
        assert_eq!(c.codeword(0), Some(&[false][..]));
        assert_eq!(c.codeword(1), Some(&[true, false][..]));
        assert_eq!(c.codeword(2), Some(&[true, true][..]));

        let c = PrefixCode::huffman(&[0.25; 4]).unwrap();
        assert_eq!(c.codeword(0), Some(&[false, false][..]));
        assert_eq!(c.codeword(1), Some(&[false, true][..]));
        assert_eq!(c.codeword(2), Some(&[true, false][..]));
        assert_eq!(c.codeword(3), Some(&[true, true][..]));
    }

    #[test]
    fn zero_symbols_and_single_symbol() {
        let c = PrefixCode::huffman(&[0.0, 1.0, 0.0]).unwrap();
        assert_eq!(c.lengths(), vec![None, Some(0), None]);
        assert_eq!(c.decode_symbol(|| None), Some(1));
        assert_eq!(c.expected_length(&[0.0, 1.0, 0.0]), 0.0);
        assert!(PrefixCode::huffman(&[0.0, 0.0]).is_err());
        assert!(PrefixCode::huffman(&[-0.5, 1.5]).is_err());
    }

    fn dist() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(0.0f64..1.0, 1..40).prop_filter_map("positive mass", |w| {
            let s: f64 = w.iter().sum();
            (s > 0.0).then(|| w.iter().map(|x| x / s).collect())
        })
    }

    proptest! {
        #[test]
        fn huffman_is_optimal_prefix_code(p in dist()) {
            let c = PrefixCode::huffman(&p).unwrap();
            prop_assert!(c.is_prefix_free());
            let support = p.iter().filter(|&&x| x > 0.0).count();
            if support > 1 {
                prop_assert!((c.kraft_sum() - 1.0).abs() < 1e-12);
            }
            let h = crate::info::entropy(&p);
            let l = c.expected_length(&p);
            prop_assert!(l >= h - 1e-9 && l < h + 1.0);
            prop_assert_eq!(PrefixCode::huffman(&p).unwrap(), c);
        }

        #[test]
        fn decode_inverts_codewords(p in dist()) {
            let c = PrefixCode::huffman(&p).unwrap();
            for s in 0..p.len() {
                if let Some(word) = c.codeword(s) {
                    let mut it = word.iter().copied();
                    prop_assert_eq!(c.decode_symbol(|| it.next()), Some(s));
                    prop_assert!(it.next().is_none());
                }
            }
        }
    }
}

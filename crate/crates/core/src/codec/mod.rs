//! Lossless coding of network sources.
//!
//! [`build_factorized_codebooks`] builds one Huffman code per node and per
//! reachable parent configuration from the declared CPTs; [`encode`] walks the
//! nodes in topological order and emits each node's codeword under its
//! parents' states. [`build_joint_huffman`] is the joint-alphabet baseline.

mod bits;
mod complexity;
mod factorized;
mod huffman;
mod stream;

pub use bits::{BitReader, BitWriter};
pub use complexity::{complexity_report, ComplexityReport, JointBuild};
pub use factorized::{build_factorized_codebooks, decode, encode, FactorizedCodebook};
pub use huffman::{build_joint_huffman, PrefixCode};
pub use stream::{Bitstream, HEADER_LEN, MAGIC, VERSION};

use crate::bn::JointTable;

/// Expected bits per joint symbol of a joint-alphabet code.
pub fn joint_expected_length(code: &PrefixCode, table: &JointTable) -> f64 {
    code.expected_length(table.probs())
}

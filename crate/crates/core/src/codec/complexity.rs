use std::fmt;
use std::time::{Duration, Instant};

use super::{build_factorized_codebooks, build_joint_huffman};
use crate::bn::{enumerate_joint, BayesNet, SizeGuard};
use crate::error::{Error, Result};
use crate::par::Exec;

/// Outcome of the joint-alphabet Huffman build.
#[derive(Debug, Clone, PartialEq)]
pub enum JointBuild {
    Built { elapsed: Duration },
    Skipped { reason: String },
}

/// Codebook sizes and build times for factorized vs joint Huffman coding.
#[derive(Debug, Clone)]
pub struct ComplexityReport {
    /// `m`
    pub vars: usize,
    /// `k`
    pub max_cardinality: usize,
    /// `L`
    pub max_in_degree: usize,
    /// Number of joint symbols, `∏ card(X_i)` (equals `k^m` for a uniform
    /// cardinality).
    pub joint_alphabet: u128,
    /// `m * k^max(L, 1)`.
    pub factorized_bound: u128,
    pub conditional_codes: usize,
    pub entries_touched: usize,
    pub factorized_build: Duration,
    pub joint_build: JointBuild,
}

pub fn complexity_report(net: &BayesNet, guard: SizeGuard) -> Result<ComplexityReport> {
    let k = net.max_cardinality() as u128;
    let l = net.max_in_degree();
    let factorized_bound = (net.num_vars() as u128).saturating_mul(k.saturating_pow(l.max(1) as u32));

    let start = Instant::now();
    let fcb = build_factorized_codebooks(net)?;
    let factorized_build = start.elapsed();

    let start = Instant::now();
    let joint_build = match enumerate_joint(net, guard, Exec::Sequential).and_then(|t| build_joint_huffman(&t, guard)) {
        Ok(_) => JointBuild::Built {
            elapsed: start.elapsed(),
        },
        Err(Error::SizeGuard { size, limit }) => JointBuild::Skipped {
            reason: format!("skipped: exceeds guard ({size} > {limit})"),
        },
        Err(e) => return Err(e),
    };

    Ok(ComplexityReport {
        vars: net.num_vars(),
        max_cardinality: net.max_cardinality(),
        max_in_degree: l,
        joint_alphabet: net.joint_size(),
        factorized_bound,
        conditional_codes: fcb.num_codes(),
        entries_touched: fcb.entries_touched(),
        factorized_build,
        joint_build,
    })
}

impl fmt::Display for ComplexityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "variables m = {}, max cardinality k = {}, max in-degree L = {}",
            self.vars, self.max_cardinality, self.max_in_degree
        )?;
        writeln!(f, "joint alphabet size       {}", self.joint_alphabet)?;
        writeln!(f, "factorized bound m*k^L    {}", self.factorized_bound)?;
        writeln!(f, "conditional codes built   {}", self.conditional_codes)?;
        writeln!(f, "CPT entries touched       {}", self.entries_touched)?;
        writeln!(f, "factorized build time     {:?}", self.factorized_build)?;
        match &self.joint_build {
            JointBuild::Built { elapsed } => writeln!(f, "joint build time          {elapsed:?}"),
            JointBuild::Skipped { reason } => writeln!(f, "joint build               {reason}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bn::{chain, independent};

    #[test]
    fn ten_node_chain() {
        let r = complexity_report(&chain(10, 0.1), SizeGuard::DEFAULT).unwrap();
        assert_eq!(r.joint_alphabet, 1024);
        assert_eq!(r.factorized_bound, 20);
        assert!(matches!(r.joint_build, JointBuild::Built { .. }));
    }

    #[test]
    fn single_node() {
        let r = complexity_report(&independent(1), SizeGuard::DEFAULT).unwrap();
        assert_eq!(r.joint_alphabet, 2);
        assert_eq!(r.factorized_bound, 2);
    }

    #[test]
    fn thirty_node_chain_skips_joint() {
        let r = complexity_report(&chain(30, 0.1), SizeGuard::DEFAULT).unwrap();
        assert_eq!(r.factorized_bound, 60);
        match &r.joint_build {
            JointBuild::Skipped { reason } => assert!(reason.starts_with("skipped: exceeds guard")),
            other => panic!("{other:?}"),
        }
        assert!(r.to_string().contains("skipped"));
    }
}

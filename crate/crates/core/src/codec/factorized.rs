use super::bits::{BitReader, BitWriter};
use super::huffman::PrefixCode;
use super::stream::Bitstream;
use crate::bn::{marginal, BayesNet, SizeGuard};
use crate::error::{Error, Result};
use crate::par::{self, Exec};

/// One Huffman code per (variable, reachable parent configuration).
#[derive(Debug, Clone)]
pub struct FactorizedCodebook {
    net: BayesNet,
    digest: [u8; 16],
    /// `codes[v][config]`, `None` when the configuration has zero probability.
    codes: Vec<Vec<Option<PrefixCode>>>,
    /// `p(parents of v = config)`.
    parent_mass: Vec<Vec<f64>>,
    entries_touched: usize,
}

/// Builds the per-node conditional Huffman codes from the declared CPTs.
///
/// Configuration reachability comes from exact parent marginals; every CPT
/// row of a reachable configuration is visited once.
pub fn build_factorized_codebooks(net: &BayesNet) -> Result<FactorizedCodebook> {
    let guard = SizeGuard::new(SizeGuard::MAX).expect("max guard");
    let mut codes = Vec::with_capacity(net.num_vars());
    let mut parent_mass = Vec::with_capacity(net.num_vars());
    let mut entries_touched = 0;
    for v in 0..net.num_vars() {
        let mass = if net.parents(v).is_empty() {
            vec![1.0]
        } else {
            marginal(net, net.parents(v), guard)?.probs().to_vec()
        };
        let rows = &net.cpt(v).rows;
        let mut per_config = Vec::with_capacity(rows.len());
        for (row, &w) in rows.iter().zip(&mass) {
            if w > 0.0 {
                entries_touched += row.len();
                per_config.push(Some(PrefixCode::huffman(row)?));
            } else {
                per_config.push(None);
            }
        }
        codes.push(per_config);
        parent_mass.push(mass);
    }
    Ok(FactorizedCodebook {
        net: net.clone(),
        digest: net.digest(),
        codes,
        parent_mass,
        entries_touched,
    })
}

impl FactorizedCodebook {
    pub fn net(&self) -> &BayesNet {
        &self.net
    }

    pub fn digest(&self) -> [u8; 16] {
        self.digest
    }

    /// Code used for `var` under parent configuration `config`.
    pub fn code(&self, var: usize, config: usize) -> Option<&PrefixCode> {
        self.codes.get(var)?.get(config)?.as_ref()
    }

    /// Number of conditional codes built.
    pub fn num_codes(&self) -> usize {
        self.codes.iter().flatten().filter(|c| c.is_some()).count()
    }

    /// CPT entries read while building; at most `Σ_v rows(v) * card(v)`.
    pub fn entries_touched(&self) -> usize {
        self.entries_touched
    }

    pub fn codes(&self) -> impl Iterator<Item = (usize, usize, &PrefixCode)> {
        self.codes.iter().enumerate().flat_map(|(v, per)| {
            per.iter()
                .enumerate()
                .filter_map(move |(c, code)| code.as_ref().map(|code| (v, c, code)))
        })
    }

    /// Exact expected bits per state vector: `Σ_v Σ_pa p(pa) E[len_v | pa]`.
    pub fn expected_length(&self) -> f64 {
        self.codes
            .iter()
            .enumerate()
            .map(|(v, per)| {
                per.iter()
                    .zip(&self.parent_mass[v])
                    .zip(&self.net.cpt(v).rows)
                    .filter_map(|((code, &w), row)| code.as_ref().map(|c| w * c.expected_length(row)))
                    .sum::<f64>()
            })
            .sum()
    }

    /// Per-code `(var, config, H(X_v | config), E[len | config])`.
    pub fn conditional_lengths(&self) -> Vec<(usize, usize, f64, f64)> {
        self.codes()
            .map(|(v, c, code)| {
                let row = &self.net.cpt(v).rows[c];
                (v, c, crate::info::entropy(row), code.expected_length(row))
            })
            .collect()
    }

    fn encode_one(&self, index: usize, states: &[usize], out: &mut BitWriter) -> Result<()> {
        self.net.check_assignment(states)?;
        for &v in self.net.order() {
            let word = self
                .code(v, self.net.parent_config(v, states))
                .and_then(|c| c.codeword(states[v]))
                .ok_or(Error::UncodableSample { index, var: v })?;
            out.push_bits(word);
        }
        Ok(())
    }
}

const ENCODE_CHUNK: usize = 8192;

/// Encodes `samples` (variable-id order) into a framed stream.
///
/// Chunks are encoded independently under `exec` and concatenated in order,
/// so the stream is identical for every execution mode.
pub fn encode(fcb: &FactorizedCodebook, samples: &[Vec<usize>], exec: Exec) -> Result<Bitstream> {
    let chunks: Vec<&[Vec<usize>]> = samples.chunks(ENCODE_CHUNK).collect();
    let parts = par::map_range(exec, chunks.len(), |k| -> Result<BitWriter> {
        let mut w = BitWriter::new();
        for (j, s) in chunks[k].iter().enumerate() {
            fcb.encode_one(k * ENCODE_CHUNK + j, s, &mut w)?;
        }
        Ok(w)
    });
    let mut payload = BitWriter::new();
    for part in parts {
        payload.append(&part?);
    }
    Ok(Bitstream {
        digest: fcb.digest,
        count: samples.len() as u64,
        payload: payload.into_bytes(),
    })
}

/// Inverse of [`encode`].
pub fn decode(fcb: &FactorizedCodebook, stream: &Bitstream) -> Result<Vec<Vec<usize>>> {
    if stream.digest != fcb.digest {
        return Err(Error::WrongCodebook);
    }
    let net = &fcb.net;
    let mut reader = BitReader::new(&stream.payload);
    let capacity = stream.count.min(stream.payload.len() as u64 * 8 + 1) as usize;
    let mut out = Vec::with_capacity(capacity);
    for index in 0..stream.count {
        let mut states = vec![0usize; net.num_vars()];
        for &v in net.order() {
            let code = fcb
                .code(v, net.parent_config(v, &states))
                .ok_or_else(|| Error::CorruptStream(format!("vector {index}: unreachable parent state")))?;
            states[v] = code
                .decode_symbol(|| reader.read())
                .ok_or_else(|| Error::CorruptStream(format!("truncated payload at vector {index}")))?;
        }
        out.push(states);
    }
    let rest = reader.remaining();
    if rest >= 8 {
        return Err(Error::CorruptStream(format!("{rest} trailing bits after last vector")));
    }
    while let Some(bit) = reader.read() {
        if bit {
            return Err(Error::CorruptStream("nonzero padding".into()));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bn::{binary_vars, chain, fig4a, independent, sample, scene, BayesNet, Cpt};
    use crate::info::joint_entropy_factorized;

    #[test]
    fn code_counts() {
        let fcb = build_factorized_codebooks(&independent(1)).unwrap();
        assert_eq!(fcb.num_codes(), 1);
        assert_eq!(fcb.code(0, 0).unwrap().lengths(), vec![Some(1), Some(1)]);
        assert!((fcb.expected_length() - 1.0).abs() < 1e-15);

        let fcb = build_factorized_codebooks(&fig4a(0.1, 0.1)).unwrap();
        assert_eq!(fcb.num_codes(), 5);

        let fcb = build_factorized_codebooks(&chain(10, 0.1)).unwrap();
        assert_eq!(fcb.num_codes(), 19);
        assert_eq!(fcb.entries_touched(), 38);
    }

    #[test]
    fn fork_expected_length_window() {
        let net = fig4a(0.1, 0.1);
        let h = joint_entropy_factorized(&net).unwrap().value();
        let l = build_factorized_codebooks(&net).unwrap().expected_length();
        assert!(l >= h && l < h + 3.0, "{l}");
    }

    #[test]
    fn round_trip_and_empty() {
        for net in [fig4a(0.2, 0.3), scene()] {
            let fcb = build_factorized_codebooks(&net).unwrap();
            let empty = encode(&fcb, &[], Exec::Sequential).unwrap();
            assert!(empty.payload.is_empty());
            assert!(decode(&fcb, &empty).unwrap().is_empty());

            let s = sample(&net, 9, 20_000, Exec::Parallel);
            let seq = encode(&fcb, &s, Exec::Sequential).unwrap();
            let par = encode(&fcb, &s, Exec::Parallel).unwrap();
            assert_eq!(seq, par);
            assert_eq!(decode(&fcb, &seq).unwrap(), s);
        }
    }

    #[test]
    fn truncation_and_wrong_codebook() {
        let net = fig4a(0.1, 0.1);
        let fcb = build_factorized_codebooks(&net).unwrap();
        let s = sample(&net, 1, 100, Exec::Sequential);
        let mut stream = encode(&fcb, &s, Exec::Sequential).unwrap();

        let other = build_factorized_codebooks(&fig4a(0.1, 0.2)).unwrap();
        assert!(matches!(decode(&other, &stream), Err(Error::WrongCodebook)));

        stream.payload.pop();
        assert!(matches!(decode(&fcb, &stream), Err(Error::CorruptStream(_))));
    }

    #[test]
    fn zero_probability_sample_is_uncodable() {
        let net = BayesNet::new(
            binary_vars(&["a", "b"]),
            vec![
                Cpt::root(0, vec![1.0, 0.0]),
                Cpt::new(1, vec![0], vec![vec![0.5, 0.5], vec![0.5, 0.5]]),
            ],
        )
        .unwrap();
        let fcb = build_factorized_codebooks(&net).unwrap();
        assert_eq!(fcb.num_codes(), 2);
        assert!(matches!(
            encode(&fcb, &[vec![0, 1], vec![1, 0]], Exec::Sequential),
            Err(Error::UncodableSample { index: 1, var: 0 })
        ));
        assert!(matches!(
            encode(&fcb, &[vec![0, 2]], Exec::Sequential),
            Err(Error::InvalidState { .. })
        ));
    }
}

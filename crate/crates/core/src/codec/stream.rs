//! Stream framing.
//!
//! ```text
//! offset  size  field
//! 0       4     magic "SMRD"
//! 4       1     format version (1)
//! 5       8     vector count n, big-endian
//! 13      16    network digest
//! 29      ...   payload, MSB-first, zero-padded to a byte boundary
//! ```

use crate::error::{Error, Result};

pub const MAGIC: [u8; 4] = *b"SMRD";
pub const VERSION: u8 = 1;
pub const HEADER_LEN: usize = 29;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bitstream {
    pub digest: [u8; 16],
    pub count: u64,
    pub payload: Vec<u8>,
}

impl Bitstream {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(HEADER_LEN + self.payload.len());
        out.extend_from_slice(&MAGIC);
        out.push(VERSION);
        out.extend_from_slice(&self.count.to_be_bytes());
        out.extend_from_slice(&self.digest);
        out.extend_from_slice(&self.payload);
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < HEADER_LEN {
            return Err(Error::CorruptStream(format!(
                "{} bytes is shorter than the {HEADER_LEN}-byte header",
                bytes.len()
            )));
        }
        if bytes[..4] != MAGIC {
            return Err(Error::CorruptStream("bad magic".into()));
        }
        if bytes[4] != VERSION {
            return Err(Error::CorruptStream(format!("unsupported version {}", bytes[4])));
        }
        let count = u64::from_be_bytes(bytes[5..13].try_into().expect("8 bytes"));
        let digest = bytes[13..29].try_into().expect("16 bytes");
        Ok(Self {
            digest,
            count,
            payload: bytes[HEADER_LEN..].to_vec(),
        })
    }
}

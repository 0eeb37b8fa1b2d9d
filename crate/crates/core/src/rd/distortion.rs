use std::str::FromStr;

use crate::bn::BayesNet;
use crate::error::{invalid, Error, Result};

/// `d(x, x̂)` as a dense source-by-reconstruction matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DistortionMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DistortionMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 || data.len() != rows * cols {
            return Err(invalid(format!(
                "distortion matrix needs {rows}x{cols} entries, got {}",
                data.len()
            )));
        }
        if data.iter().any(|d| !d.is_finite() || *d < 0.0) {
            return Err(invalid("distortion entries must be finite and nonnegative"));
        }
        Ok(Self { rows, cols, data })
    }

    /// `d(x, x̂) = [x != x̂]`.
    pub fn hamming(k: usize) -> Self {
        let data = (0..k * k).map(|i| if i / k == i % k { 0.0 } else { 1.0 }).collect();
        Self { rows: k, cols: k, data }
    }

    /// `d(x, x̂) = (x - x̂)^2` on state labels.
    pub fn squared_error(k: usize) -> Self {
        let data = (0..k * k)
            .map(|i| {
                let diff = (i / k) as f64 - (i % k) as f64;
                diff * diff
            })
            .collect();
        Self { rows: k, cols: k, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, x: usize, xhat: usize) -> f64 {
        self.data[x * self.cols + xhat]
    }

    /// Largest entry, `d_max`.
    pub fn max(&self) -> f64 {
        self.data.iter().copied().fold(0.0, f64::max)
    }
}

/// Named per-variable distortion presets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DistortionKind {
    Hamming,
    SquaredError,
}

impl DistortionKind {
    pub fn matrix(self, k: usize) -> DistortionMatrix {
        match self {
            DistortionKind::Hamming => DistortionMatrix::hamming(k),
            DistortionKind::SquaredError => DistortionMatrix::squared_error(k),
        }
    }
}

impl FromStr for DistortionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hamming" => Ok(Self::Hamming),
            "squared" | "squared-error" | "mse" => Ok(Self::SquaredError),
            other => Err(invalid(format!("unknown distortion measure '{other}'"))),
        }
    }
}

/// One distortion matrix per network variable.
#[derive(Debug, Clone, PartialEq)]
pub struct DistortionSpec {
    pub matrices: Vec<DistortionMatrix>,
}

impl DistortionSpec {
    /// The same preset for every variable, reconstruction alphabet equal to
    /// the source alphabet.
    pub fn preset(net: &BayesNet, kind: DistortionKind) -> Self {
        Self {
            matrices: net.cards().iter().map(|&k| kind.matrix(k)).collect(),
        }
    }

    pub fn hamming(net: &BayesNet) -> Self {
        Self::preset(net, DistortionKind::Hamming)
    }

    pub fn for_var(&self, id: usize) -> &DistortionMatrix {
        &self.matrices[id]
    }

    pub(crate) fn check(&self, net: &BayesNet) -> Result<()> {
        if self.matrices.len() != net.num_vars() {
            return Err(invalid(format!(
                "{} distortion matrices for {} variables",
                self.matrices.len(),
                net.num_vars()
            )));
        }
        for (v, m) in self.matrices.iter().enumerate() {
            if m.rows() != net.cardinality(v) {
                return Err(invalid(format!(
                    "distortion matrix for variable {v} has {} rows, cardinality is {}",
                    m.rows(),
                    net.cardinality(v)
                )));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets() {
        let h = DistortionMatrix::hamming(3);
        assert_eq!(h.get(1, 1), 0.0);
        assert_eq!(h.get(0, 2), 1.0);
        let s = DistortionMatrix::squared_error(3);
        assert_eq!(s.get(0, 2), 4.0);
        assert_eq!(s.max(), 4.0);
        assert!(DistortionMatrix::new(2, 2, vec![0.0, -1.0, 1.0, 0.0]).is_err());
        assert_eq!("hamming".parse::<DistortionKind>().unwrap(), DistortionKind::Hamming);
        assert!("l1".parse::<DistortionKind>().is_err());
    }
}

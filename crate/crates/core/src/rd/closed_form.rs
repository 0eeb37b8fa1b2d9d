use crate::error::{invalid, Result};
use crate::info::binary_entropy;

/// Conditional RD of a doubly symmetric binary pair with crossover `p` under
/// Hamming distortion: `h_b(p) - h_b(D)` for `D ≤ p`, zero beyond.
pub fn binary_conditional_rd(p: f64, d: f64) -> Result<f64> {
    if !(0.0..=0.5).contains(&p) {
        return Err(invalid(format!("crossover {p} outside [0, 0.5]")));
    }
    if d.is_nan() || d < 0.0 {
        return Err(invalid(format!("distortion {d} must be >= 0")));
    }
    if d >= p {
        return Ok(0.0);
    }
    Ok(binary_entropy(p) - binary_entropy(d))
}

/// Conditional RD of a jointly Gaussian pair under squared error:
/// `½ log2(σ²(1 - r²) / D)` for `D ≤ σ²(1 - r²)`, zero beyond.
pub fn gaussian_conditional_rd(sigma: f64, r: f64, d: f64) -> Result<f64> {
    if !sigma.is_finite() || sigma <= 0.0 {
        return Err(invalid(format!("sigma {sigma} must be positive")));
    }
    if r.is_nan() || r.abs() > 1.0 {
        return Err(invalid(format!("correlation {r} outside [-1, 1]")));
    }
    if d.is_nan() || d <= 0.0 {
        return Err(invalid(format!("distortion {d} must be > 0")));
    }
    let residual = sigma * sigma * (1.0 - r * r);
    if d >= residual {
        return Ok(0.0);
    }
    Ok(0.5 * (residual / d).log2())
}

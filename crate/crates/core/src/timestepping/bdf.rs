//! Coefficients of the q-step BDF methods and the matching extrapolation.

use crate::error::{Error, Result};

fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `δ(ζ) = Σ_{ℓ=1}^q (1−ζ)^ℓ / ℓ = Σ_j δ_j ζ^j` and
/// `γ(ζ) = (1 − (1−ζ)^q) / ζ = Σ_j γ_j ζ^j`.
#[derive(Debug, Clone, PartialEq)]
pub struct BdfScheme {
    q: usize,
    delta: Vec<f64>,
    gamma: Vec<f64>,
}

impl BdfScheme {
    pub const MAX_ORDER: usize = 6;

    pub fn new(q: usize) -> Result<Self> {
        if !(1..=Self::MAX_ORDER).contains(&q) {
            return Err(Error::InvalidArgument(format!("BDF order must lie in 1..=6 (zero-stable range), got {q}")));
        }
        let delta = (0..=q)
            .map(|j| {
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                sign * (j.max(1)..=q).map(|l| binomial(l, j) / l as f64).sum::<f64>()
            })
            .collect();
        let gamma = (0..q)
            .map(|j| {
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                sign * binomial(q, j + 1)
            })
            .collect();
        Ok(BdfScheme { q, delta, gamma })
    }

    pub fn order(&self) -> usize {
        self.q
    }

    /// `δ_0, …, δ_q`.
    pub fn delta(&self) -> &[f64] {
        &self.delta
    }

    /// `γ_0, …, γ_{q−1}`.
    pub fn gamma(&self) -> &[f64] {
        &self.gamma
    }
}

pub fn bdf_coefficients(q: usize) -> Result<BdfScheme> {
    BdfScheme::new(q)
}

//! Finite-scale estimates of `n⁺`-summability.
//!
//! From a spectrum `μ_k` we form `μ'_k = (1 + μ_k²)^{-1/2}` sorted descending,
//! the partial sums `σ_k = Σ_{i ≤ k} μ'_i` and the ratios
//! `r_k = σ_k / k^((n-1)/n)`. A bounded sup shows up at finite size as a flat
//! tail of `r_k`; a wrong (too small) exponent shows up as power growth.

use serde::{Deserialize, Serialize};

use crate::dirac::SpectralData;
use crate::error::{Error, Result};

pub const DEFAULT_TAIL_SPREAD: f64 = 0.25;

/// Largest tail log-log slope of `r_k` that still counts as flat.
pub const DEFAULT_GROWTH_SLOPE: f64 = 0.05;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummabilityConfig {
    pub tail_spread: f64,
    pub growth_slope: f64,
}

impl Default for SummabilityConfig {
    fn default() -> Self {
        Self {
            tail_spread: DEFAULT_TAIL_SPREAD,
            growth_slope: DEFAULT_GROWTH_SLOPE,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Plateau,
    Growing,
    Inconclusive,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Plateau => "plateau",
            Verdict::Growing => "growing",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummabilityReport {
    pub exponent: u32,
    #[serde(rename = "K")]
    pub k: usize,
    pub mu_prime: Vec<f64>,
    pub sigma: Vec<f64>,
    pub ratios: Vec<f64>,
    /// `(max - min) / mean` of `r_k` over `k ∈ [K/2, K]`
    pub tail_spread: f64,
    /// least-squares slope of `ln r_k` against `ln k` over the same window
    pub tail_slope: f64,
    pub verdict: Verdict,
}

impl SummabilityReport {
    /// `max_k r_k`, the finite-size stand-in for `‖(1+D²)^{-1/2}‖_{n⁺}`.
    pub fn sup_ratio(&self) -> f64 {
        self.ratios.iter().copied().fold(0.0, f64::max)
    }

    /// Columns `k, mu_prime, sigma, ratio` with 1-based `k`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,mu_prime,sigma,ratio\n");
        for (i, ((m, s), r)) in self.mu_prime.iter().zip(&self.sigma).zip(&self.ratios).enumerate() {
            out.push_str(&format!("{},{m},{s},{r}\n", i + 1));
        }
        out
    }
}

fn tail_window(k: usize) -> std::ops::RangeInclusive<usize> {
    (k / 2).max(1)..=k
}

fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    if xs.len() < 2 {
        return 0.0;
    }
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}

pub fn sigma_sequence(spec: &SpectralData, exponent: u32) -> Result<SummabilityReport> {
    sigma_sequence_with(spec, exponent, &SummabilityConfig::default())
}

pub fn sigma_sequence_with(
    spec: &SpectralData,
    exponent: u32,
    config: &SummabilityConfig,
) -> Result<SummabilityReport> {
    if spec.is_empty() {
        return Err(Error::InvalidArgument("summability needs a nonempty spectrum".into()));
    }
    if exponent == 0 {
        return Err(Error::InvalidArgument("summability exponent must be at least 1".into()));
    }
    // ascending |μ| gives descending μ'
    let mu_prime: Vec<f64> = spec
        .abs_ascending()
        .into_iter()
        .map(|m| 1.0 / (1.0 + m * m).sqrt())
        .collect();
    let power = (exponent as f64 - 1.0) / exponent as f64;
    let mut sigma = Vec::with_capacity(mu_prime.len());
    let mut acc = 0.0;
    for m in &mu_prime {
        acc += m;
        sigma.push(acc);
    }
    let ratios: Vec<f64> = sigma
        .iter()
        .enumerate()
        .map(|(i, s)| s / ((i + 1) as f64).powf(power))
        .collect();

    let k = mu_prime.len();
    let window: Vec<usize> = tail_window(k).collect();
    let tail: Vec<f64> = window.iter().map(|&j| ratios[j - 1]).collect();
    let max = tail.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = tail.iter().copied().fold(f64::INFINITY, f64::min);
    let mean = tail.iter().sum::<f64>() / tail.len() as f64;
    let tail_spread = (max - min) / mean;
    let xs: Vec<f64> = window.iter().map(|&j| (j as f64).ln()).collect();
    let ys: Vec<f64> = tail.iter().map(|r| r.ln()).collect();
    let tail_slope = least_squares_slope(&xs, &ys);

    let verdict = if tail_slope > config.growth_slope {
        Verdict::Growing
    } else if tail_spread < config.tail_spread {
        Verdict::Plateau
    } else {
        Verdict::Inconclusive
    };
    Ok(SummabilityReport {
        exponent,
        k,
        mu_prime,
        sigma,
        ratios,
        tail_spread,
        tail_slope,
        verdict,
    })
}

/// `σ_k(sub) ≤ σ_k(ref)` for every common `k`.
pub fn monotone_comparison(sub: &SummabilityReport, reference: &SummabilityReport) -> Result<bool> {
    if sub.exponent != reference.exponent {
        return Err(Error::InvalidArgument(format!(
            "exponent mismatch: {} vs {}",
            sub.exponent, reference.exponent
        )));
    }
    Ok(sub
        .sigma
        .iter()
        .zip(&reference.sigma)
        .all(|(s, r)| *s <= r + 1e-12 * (1.0 + r.abs())))
}

/// Total multiplicity of eigenvalues with `|λ| ≤ Λ`.
pub fn counting_function(spec: &SpectralData, lambda: f64) -> usize {
    spec.count_abs_at_most(lambda)
}

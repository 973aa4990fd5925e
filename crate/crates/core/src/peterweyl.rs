//! Blockwise reference spectra over irreducible representations.
//!
//! A weight block is `Σ_j dπ_ℓ(X_j) ⊗ F_j` on `E_ℓ ⊗ S`. For `Tⁿ` the
//! irreducibles are characters (`d_ℓ = 1`, `dπ_ℓ(X_j) = 2πi ℓ_j`); for SU(2)
//! they are the spin-`ℓ/2` representations with `dπ_ℓ(X_j) = i J_j`.
//! A subrepresentation keeps block `ℓ` with multiplicity `m_ℓ ≤ d_ℓ`.

use std::f64::consts::PI;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::clifford::{build_clifford, CliffordRep, Sign};
use crate::dirac::{SpectralData, MERGE_TOL};
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigenvalues, ComplexMatrix, C64, I};
use crate::nctorus::TruncatedGNS;

/// Slack allowed in `λ_k(ref) ≤ μ_k(sub)`.
pub const MAJORIZATION_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Group {
    #[serde(rename = "T^n")]
    Torus,
    #[serde(rename = "SU(2)")]
    Su2,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum WeightLabel {
    Lattice(Vec<i64>),
    Spin(usize),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightBlock {
    pub group: Group,
    pub label: WeightLabel,
    pub d: usize,
    pub m: usize,
    pub eigenvalues: SpectralData,
}

impl WeightBlock {
    /// The same block with multiplicity `m`.
    pub fn with_multiplicity(&self, m: usize) -> Result<Self> {
        if m > self.d {
            return Err(Error::MultiplicityBound { block: 0, m, d: self.d });
        }
        Ok(Self { m, ..self.clone() })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let block: Self = serde_json::from_str(s)?;
        if block.m > block.d {
            return Err(Error::MultiplicityBound {
                block: 0,
                m: block.m,
                d: block.d,
            });
        }
        Ok(block)
    }
}

/// `Σ_j 2π ℓ_j (i F_j)` for one character of `Tⁿ`.
pub fn torus_block_matrix(label: &[i64], cliff: &CliffordRep) -> Result<ComplexMatrix> {
    if label.len() != cliff.n() {
        return Err(Error::DimensionMismatch {
            expected: cliff.n(),
            actual: label.len(),
        });
    }
    let dim = cliff.dim();
    Ok(label
        .iter()
        .zip(cliff.generators())
        .fold(ComplexMatrix::zeros(dim, dim), |acc, (&l, f)| {
            &acc + &f.scale(C64::new(0.0, 2.0 * PI * l as f64))
        }))
}

/// Blocks for every weight with `|ℓ_j| ≤ cutoff`, using `cliff` for the spinors.
pub fn torus_weight_blocks_with(cliff: &CliffordRep, cutoff: i64) -> Result<Vec<WeightBlock>> {
    let box_ = TruncatedGNS::new(cliff.n(), cutoff)?;
    let labels: Vec<Vec<i64>> = box_.points().collect();
    labels
        .into_par_iter()
        .map(|label| {
            let values = hermitian_eigenvalues(&torus_block_matrix(&label, cliff)?)?;
            Ok(WeightBlock {
                group: Group::Torus,
                label: WeightLabel::Lattice(label),
                d: 1,
                m: 1,
                eigenvalues: SpectralData::from_values(values, MERGE_TOL),
            })
        })
        .collect()
}

/// Torus blocks with the `+1` branch Clifford representation of rank `n`.
pub fn torus_weight_blocks(n: usize, cutoff: i64) -> Result<Vec<WeightBlock>> {
    torus_weight_blocks_with(&build_clifford(n, Sign::Plus)?, cutoff)
}

/// `(J_x, J_y, J_z)` for spin `ℓ/2` in the basis `m = ℓ/2, ℓ/2 - 1, …, -ℓ/2`.
pub fn spin_matrices(ell: usize) -> [ComplexMatrix; 3] {
    let d = ell + 1;
    let j = ell as f64 / 2.0;
    let m_of = |k: usize| j - k as f64;
    // J_+ |m> = sqrt(j(j+1) - m(m+1)) |m+1>, and |m+1> sits one index earlier
    let mut jp = ComplexMatrix::zeros(d, d);
    for k in 1..d {
        let m = m_of(k);
        jp[(k - 1, k)] = C64::new((j * (j + 1.0) - m * (m + 1.0)).sqrt(), 0.0);
    }
    let jm = jp.adjoint();
    let jx = (&jp + &jm).scale_real(0.5);
    let jy = (&jp - &jm).scale(C64::new(0.0, -0.5));
    let jz = ComplexMatrix::diagonal(&(0..d).map(|k| C64::new(m_of(k), 0.0)).collect::<Vec<_>>());
    [jx, jy, jz]
}

/// `Σ_j (i J_j) ⊗ F_j` on `ℂ^(ℓ+1) ⊗ S`.
pub fn su2_block_matrix(ell: usize, cliff3: &CliffordRep) -> Result<ComplexMatrix> {
    if cliff3.n() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            actual: cliff3.n(),
        });
    }
    let d = ell + 1;
    let s = cliff3.dim();
    Ok(spin_matrices(ell)
        .iter()
        .zip(cliff3.generators())
        .fold(ComplexMatrix::zeros(d * s, d * s), |acc, (j, f)| {
            &acc + &j.scale(I).kron(f)
        }))
}

/// `‖(B + ℓ/2)(B - ℓ/2 - 1)‖_max`, which vanishes for the `+1` branch where
/// the block is `-Σ J_j ⊗ σ_j`.
pub fn su2_quadratic_defect(ell: usize, block: &ComplexMatrix) -> f64 {
    let half = ell as f64 / 2.0;
    let id = ComplexMatrix::identity(block.rows());
    let a = block + &id.scale_real(half);
    let b = block - &id.scale_real(half + 1.0);
    (&a * &b).max_abs()
}

pub fn su2_weight_block(ell: usize, cliff3: &CliffordRep) -> Result<WeightBlock> {
    let values = hermitian_eigenvalues(&su2_block_matrix(ell, cliff3)?)?;
    Ok(WeightBlock {
        group: Group::Su2,
        label: WeightLabel::Spin(ell),
        d: ell + 1,
        m: ell + 1,
        eigenvalues: SpectralData::from_values(values, MERGE_TOL),
    })
}

/// Blocks `ℓ = 0..=cutoff`.
pub fn su2_weight_blocks(cutoff: usize, cliff3: &CliffordRep) -> Result<Vec<WeightBlock>> {
    (0..=cutoff)
        .into_par_iter()
        .map(|ell| su2_weight_block(ell, cliff3))
        .collect()
}

/// Union of block spectra, block `i` repeated `choice[i]` times.
pub fn subrepresentation_spectrum(blocks: &[WeightBlock], choice: &[usize]) -> Result<SpectralData> {
    if blocks.len() != choice.len() {
        return Err(Error::DimensionMismatch {
            expected: blocks.len(),
            actual: choice.len(),
        });
    }
    let mut values = Vec::new();
    for (i, (block, &m)) in blocks.iter().zip(choice).enumerate() {
        if m > block.d {
            return Err(Error::MultiplicityBound {
                block: i,
                m,
                d: block.d,
            });
        }
        for _ in 0..m {
            values.extend(block.eigenvalues.expanded());
        }
    }
    Ok(SpectralData::from_values(values, MERGE_TOL))
}

/// The reference spectrum, `m_ℓ = d_ℓ` for every block.
pub fn reference_spectrum(blocks: &[WeightBlock]) -> Result<SpectralData> {
    let full: Vec<usize> = blocks.iter().map(|b| b.d).collect();
    subrepresentation_spectrum(blocks, &full)
}

/// Uniform `m_ℓ ∈ 0..=d_ℓ` per block.
pub fn random_admissible_choice<R: Rng>(blocks: &[WeightBlock], rng: &mut R) -> Vec<usize> {
    blocks.iter().map(|b| rng.gen_range(0..=b.d)).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Majorization {
    pub holds: bool,
    /// 0-based index `k` of the first `λ_k(ref) > μ_k(sub)`.
    pub first_violation: Option<usize>,
}

/// Compares sorted `|λ|` sequences: holds iff `λ_k(ref) ≤ μ_k(sub)` for every
/// `k < |sub|`. A sub spectrum longer than the reference violates at `|ref|`.
pub fn majorization_check(sub: &SpectralData, reference: &SpectralData) -> Majorization {
    let mu = sub.abs_ascending();
    let lambda = reference.abs_ascending();
    let first_violation = mu
        .iter()
        .enumerate()
        .find(|&(k, &m)| lambda.get(k).is_none_or(|&l| l > m + MAJORIZATION_TOL))
        .map(|(k, _)| k);
    Majorization {
        holds: first_violation.is_none(),
        first_violation,
    }
}

/// `Σ_{ℓ ≤ L} d_ℓ²` by direct summation.
pub fn su2_matrix_coefficient_dimension(cutoff: usize) -> usize {
    (0..=cutoff).map(|ell| (ell + 1) * (ell + 1)).sum()
}

/// Closed form `(L+1)(L+2)(2L+3)/6`.
pub fn su2_matrix_coefficient_closed_form(cutoff: usize) -> usize {
    (cutoff + 1) * (cutoff + 2) * (2 * cutoff + 3) / 6
}

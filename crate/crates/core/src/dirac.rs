//! The operator `D = Σ_j ∂_j ⊗ F_j` on the truncated `ℋ₀ ⊗ S`.
//!
//! In the GNS basis `δ_p ⊗ s` the generators `∂_j` are diagonal, so `D` is
//! block diagonal with one `dim S × dim S` block per lattice point:
//! `block(p) = Σ_j 2π p_j (i F_j)`. Blocks are stored and diagonalized
//! independently; the full sparse matrix is only assembled for commutator
//! and real-structure checks.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::clifford::CliffordRep;
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigenvalues, ComplexMatrix, I};
use crate::nctorus::{derivation, gns_operator, FourierElement, ThetaMatrix, TruncatedGNS};
use crate::sparse::SparseMatrix;

/// Eigenvalues closer than this are merged into one multiplicity.
pub const MERGE_TOL: f64 = 1e-9;

/// `|λ| < ZERO_TOL` counts as kernel.
pub const ZERO_TOL: f64 = 1e-9;

/// Power-iteration cap for interior operator norms.
pub const NORM_MAX_ITER: usize = 5_000;

/// Real eigenvalues with multiplicities, ascending by value.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SpectralData {
    eigenvalues: Vec<(f64, usize)>,
}

impl SpectralData {
    pub fn empty() -> Self {
        Self {
            eigenvalues: Vec::new(),
        }
    }

    /// Groups sorted values whose distance to the first member of their group
    /// is at most `tol`; each group is represented by its mean.
    pub fn from_values(mut values: Vec<f64>, tol: f64) -> Self {
        values.sort_by(f64::total_cmp);
        let mut eigenvalues: Vec<(f64, usize)> = Vec::new();
        let mut start = 0;
        while start < values.len() {
            let mut end = start + 1;
            while end < values.len() && values[end] - values[start] <= tol {
                end += 1;
            }
            let group = &values[start..end];
            let mean = group.iter().sum::<f64>() / group.len() as f64;
            eigenvalues.push((mean, group.len()));
            start = end;
        }
        Self { eigenvalues }
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (f64, usize)>) -> Result<Self> {
        let mut eigenvalues: Vec<(f64, usize)> = pairs.into_iter().collect();
        if let Some(bad) = eigenvalues.iter().find(|(v, m)| *m == 0 || !v.is_finite()) {
            return Err(Error::InvalidArgument(format!("invalid eigenvalue entry {bad:?}")));
        }
        eigenvalues.sort_by(|a, b| a.0.total_cmp(&b.0));
        Ok(Self { eigenvalues })
    }

    pub fn eigenvalues(&self) -> &[(f64, usize)] {
        &self.eigenvalues
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn total_multiplicity(&self) -> usize {
        self.eigenvalues.iter().map(|(_, m)| m).sum()
    }

    /// Every eigenvalue repeated by its multiplicity, ascending.
    pub fn expanded(&self) -> Vec<f64> {
        self.eigenvalues
            .iter()
            .flat_map(|&(v, m)| std::iter::repeat_n(v, m))
            .collect()
    }

    /// `|λ|` repeated by multiplicity, ascending.
    pub fn abs_ascending(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.expanded().into_iter().map(f64::abs).collect();
        v.sort_by(f64::total_cmp);
        v
    }

    /// Multiset distance: `None` if the total multiplicities differ, otherwise
    /// the largest gap between the sorted expansions.
    pub fn multiset_deviation(&self, other: &Self) -> Option<f64> {
        let a = self.expanded();
        let b = other.expanded();
        (a.len() == b.len()).then(|| a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max))
    }

    pub fn negation_symmetry_defect(&self) -> Option<f64> {
        let neg = Self::from_values(self.expanded().into_iter().map(|v| -v).collect(), MERGE_TOL);
        self.multiset_deviation(&neg)
    }

    /// Total multiplicity of eigenvalues with `|λ| ≤ bound`.
    pub fn count_abs_at_most(&self, bound: f64) -> usize {
        self.eigenvalues
            .iter()
            .filter(|(v, _)| v.abs() <= bound)
            .map(|(_, m)| m)
            .sum()
    }

    pub fn kernel_multiplicity(&self) -> usize {
        self.eigenvalues
            .iter()
            .filter(|(v, _)| v.abs() < ZERO_TOL)
            .map(|(_, m)| m)
            .sum()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("value,multiplicity\n");
        for (v, m) in &self.eigenvalues {
            out.push_str(&format!("{v},{m}\n"));
        }
        out
    }
}

#[derive(Clone, Debug)]
pub struct BlockDiracOperator {
    n_alg: usize,
    active: Vec<usize>,
    pairing: Vec<usize>,
    cliff: CliffordRep,
    gns: TruncatedGNS,
    blocks: Vec<ComplexMatrix>,
}

/// Assembles `D = Σ_{j ∈ active} ∂_j ⊗ F_j` (0-based directions).
///
/// `cliff.n()` must equal either `active.len()` (the k-th active direction is
/// paired with `F_k`) or the lattice dimension (direction `j` pairs with `F_j`,
/// i.e. the spinor space of the ambient torus).
pub fn assemble_dirac(cliff: &CliffordRep, gns: &TruncatedGNS, active: &[usize]) -> Result<BlockDiracOperator> {
    let n_alg = gns.n();
    if active.is_empty() {
        return Err(Error::InvalidArgument("active direction set is empty".into()));
    }
    if active.windows(2).any(|w| w[0] >= w[1]) || active.iter().any(|&j| j >= n_alg) {
        return Err(Error::InvalidArgument(format!(
            "active directions {active:?} must be strictly increasing and below {n_alg}"
        )));
    }
    let pairing: Vec<usize> = if cliff.n() == active.len() {
        (0..active.len()).collect()
    } else if cliff.n() == n_alg {
        active.to_vec()
    } else {
        return Err(Error::InvalidArgument(format!(
            "generator-count mismatch: Cl({}) for {} active directions on a rank-{n_alg} lattice",
            cliff.n(),
            active.len()
        )));
    };
    // i F_j, Hermitian
    let hermitian_generators: Vec<ComplexMatrix> = pairing.iter().map(|&g| cliff.generators()[g].scale(I)).collect();
    let dim = cliff.dim();
    let blocks = gns
        .points()
        .map(|p| {
            active
                .iter()
                .zip(&hermitian_generators)
                .fold(ComplexMatrix::zeros(dim, dim), |acc, (&j, h)| {
                    &acc + &h.scale_real(2.0 * PI * p[j] as f64)
                })
        })
        .collect();
    Ok(BlockDiracOperator {
        n_alg,
        active: active.to_vec(),
        pairing,
        cliff: cliff.clone(),
        gns: gns.clone(),
        blocks,
    })
}

/// Convenience: the ergodic operator with every direction active.
pub fn assemble_full(cliff: &CliffordRep, gns: &TruncatedGNS) -> Result<BlockDiracOperator> {
    let all: Vec<usize> = (0..gns.n()).collect();
    assemble_dirac(cliff, gns, &all)
}

#[derive(Clone, Debug)]
pub struct CommutatorReport {
    pub commutator: SparseMatrix,
    /// sup over interior basis vectors of `‖([D, a] - Σ π(∂_j a) ⊗ F_j) ξ‖`
    pub formula_deviation: f64,
    /// largest singular value of `[D, a]` restricted to interior vectors
    pub interior_norm: f64,
    pub interior_dim: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct GradingReport {
    pub square_defect: f64,
    pub hermiticity_defect: f64,
    pub anticommutation_defect: f64,
    pub commutation_defect: f64,
}

impl GradingReport {
    pub fn max_defect(&self) -> f64 {
        self.square_defect
            .max(self.hermiticity_defect)
            .max(self.anticommutation_defect)
            .max(self.commutation_defect)
    }
}

impl BlockDiracOperator {
    pub fn n_alg(&self) -> usize {
        self.n_alg
    }

    pub fn active(&self) -> &[usize] {
        &self.active
    }

    pub fn cliff(&self) -> &CliffordRep {
        &self.cliff
    }

    pub fn gns(&self) -> &TruncatedGNS {
        &self.gns
    }

    pub fn spinor_dim(&self) -> usize {
        self.cliff.dim()
    }

    pub fn dim(&self) -> usize {
        self.gns.dim() * self.cliff.dim()
    }

    pub fn block(&self, p: &[i64]) -> Option<&ComplexMatrix> {
        self.gns.index_of(p).map(|i| &self.blocks[i])
    }

    pub fn blocks(&self) -> &[ComplexMatrix] {
        &self.blocks
    }

    pub fn hermiticity_defect(&self) -> f64 {
        self.blocks
            .iter()
            .map(ComplexMatrix::hermiticity_defect)
            .fold(0.0, f64::max)
    }

    /// `max_p ‖block(p)‖`, which grows linearly with the truncation radius.
    pub fn max_block_norm(&self) -> Result<f64> {
        self.blocks
            .iter()
            .map(ComplexMatrix::operator_norm)
            .try_fold(0.0_f64, |acc, n| n.map(|n| acc.max(n)))
    }

    /// The whole operator as a block-diagonal sparse matrix, basis index
    /// `gns_index * dim S + spinor_index`.
    pub fn to_sparse(&self) -> SparseMatrix {
        let d = self.spinor_dim();
        let trip = self
            .blocks
            .iter()
            .enumerate()
            .flat_map(|(b, m)| (0..d).flat_map(move |r| (0..d).map(move |c| (b * d + r, b * d + c, m[(r, c)]))));
        SparseMatrix::from_triplets(self.dim(), self.dim(), trip)
    }

    /// Union of block spectra.
    pub fn spectrum(&self) -> Result<SpectralData> {
        let per_block: Vec<Vec<f64>> = self
            .blocks
            .par_iter()
            .map(hermitian_eigenvalues)
            .collect::<Result<_>>()?;
        Ok(SpectralData::from_values(
            per_block.into_iter().flatten().collect(),
            MERGE_TOL,
        ))
    }

    /// `π(a) ⊗ 1` on `ℋ₀ ⊗ S`.
    pub fn represent(&self, a: &FourierElement, theta: &ThetaMatrix) -> Result<SparseMatrix> {
        Ok(gns_operator(a, &self.gns, theta)?.kron_dense(&ComplexMatrix::identity(self.spinor_dim())))
    }

    /// `Σ_j π(∂_j a) ⊗ F_j` over the active directions.
    pub fn commutator_formula(&self, a: &FourierElement, theta: &ThetaMatrix) -> Result<SparseMatrix> {
        let mut acc = SparseMatrix::zeros(self.dim(), self.dim());
        for (&j, &g) in self.active.iter().zip(&self.pairing) {
            let term = gns_operator(&derivation(j, a)?, &self.gns, theta)?.kron_dense(&self.cliff.generators()[g]);
            acc = &acc + &term;
        }
        Ok(acc)
    }

    pub fn commutator_with(&self, a: &FourierElement, theta: &ThetaMatrix) -> Result<CommutatorReport> {
        self.gns.check_radius(a)?;
        let d = self.to_sparse();
        let pa = self.represent(a, theta)?;
        let commutator = d.commutator(&pa);
        let formula = self.commutator_formula(a, theta)?;
        let margin = a.radius();
        let interior = self.gns.interior_with_spinor(margin, self.spinor_dim());
        if interior.is_empty() {
            return Err(Error::EmptyInterior {
                margin,
                radius: self.gns.radius(),
            });
        }
        let formula_deviation = (&commutator - &formula).max_column_norm(&interior);
        let interior_norm = commutator
            .select_columns(&interior)
            .largest_singular_value(NORM_MAX_ITER);
        Ok(CommutatorReport {
            commutator,
            formula_deviation,
            interior_norm,
            interior_dim: interior.len(),
        })
    }

    /// `γ = 1 ⊗ γ_S`; only defined when the Clifford module is even.
    pub fn grading(&self) -> Result<SparseMatrix> {
        let gs = self
            .cliff
            .gamma_s()
            .ok_or_else(|| Error::InvalidArgument(format!("no grading for odd n = {}", self.cliff.n())))?;
        Ok(SparseMatrix::identity(self.gns.dim()).kron_dense(gs))
    }

    /// Checks `γ² = 1`, `γ† = γ`, `γD = -Dγ` and `[γ, π(a) ⊗ 1] = 0` for the given elements.
    pub fn check_grading(&self, elements: &[FourierElement], theta: &ThetaMatrix) -> Result<GradingReport> {
        let gamma = self.grading()?;
        let id = SparseMatrix::identity(self.dim());
        let d = self.to_sparse();
        let mut commutation_defect: f64 = 0.0;
        for a in elements {
            commutation_defect = commutation_defect.max(gamma.commutator(&self.represent(a, theta)?).max_abs());
        }
        Ok(GradingReport {
            square_defect: (&(&gamma * &gamma) - &id).max_abs(),
            hermiticity_defect: (&gamma - &gamma.adjoint()).max_abs(),
            anticommutation_defect: gamma.anticommutator(&d).max_abs(),
            commutation_defect,
        })
    }
}

/// Eigenvalues of the ergodic torus operator predicted by `(Σ p_j iF_j)² = |p|²`:
/// `±2π|p|` with multiplicity `2^(m-1)` each per lattice point (for `n = 1`
/// the single eigenvalue per point is `-branch · 2πp`).
pub fn analytic_torus_spectrum(cliff: &CliffordRep, gns: &TruncatedGNS) -> SpectralData {
    let mut values = Vec::with_capacity(gns.dim() * cliff.dim());
    for p in gns.points() {
        let norm = p.iter().map(|&x| (x * x) as f64).sum::<f64>().sqrt();
        if cliff.dim() == 1 {
            values.push(-cliff.branch().value() * 2.0 * PI * p[0] as f64);
        } else {
            for _ in 0..cliff.dim() / 2 {
                values.push(2.0 * PI * norm);
                values.push(-2.0 * PI * norm);
            }
        }
    }
    SpectralData::from_values(values, MERGE_TOL)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum KernelVerdict {
    #[serde(rename = "compact-resolvent plausible")]
    CompactResolventPlausible,
    #[serde(rename = "fails compact resolvent")]
    FailsCompactResolvent,
}

impl std::fmt::Display for KernelVerdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            KernelVerdict::CompactResolventPlausible => "compact-resolvent plausible",
            KernelVerdict::FailsCompactResolvent => "fails compact resolvent",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelRow {
    #[serde(rename = "N")]
    pub radius: i64,
    pub kernel: usize,
    pub dim: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelProbe {
    pub rows: Vec<KernelRow>,
    /// Absent when fewer than two radii were probed.
    pub verdict: Option<KernelVerdict>,
}

/// Kernel multiplicity of `D` for each truncation radius, plus a stabilization
/// verdict: every window count `#{|λ| ≤ 2πk}`, `k = 0..=N_a`, must agree
/// between consecutive radii `N_a < N_b`.
pub fn kernel_growth_probe(cliff: &CliffordRep, n_alg: usize, active: &[usize], radii: &[i64]) -> Result<KernelProbe> {
    let mut sorted = radii.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let mut rows = Vec::with_capacity(sorted.len());
    let mut spectra = Vec::with_capacity(sorted.len());
    for &radius in &sorted {
        let gns = TruncatedGNS::new(n_alg, radius)?;
        let d = assemble_dirac(cliff, &gns, active)?;
        let spec = d.spectrum()?;
        rows.push(KernelRow {
            radius,
            kernel: spec.kernel_multiplicity(),
            dim: d.dim(),
        });
        spectra.push(spec);
    }
    let verdict = (sorted.len() >= 2).then(|| {
        let stable = sorted.windows(2).zip(spectra.windows(2)).all(|(r, s)| {
            s[0].kernel_multiplicity() == s[1].kernel_multiplicity()
                && (0..=r[0]).all(|k| {
                    let bound = 2.0 * PI * k as f64 + ZERO_TOL;
                    s[0].count_abs_at_most(bound) == s[1].count_abs_at_most(bound)
                })
        });
        if stable {
            KernelVerdict::CompactResolventPlausible
        } else {
            KernelVerdict::FailsCompactResolvent
        }
    });
    Ok(KernelProbe { rows, verdict })
}

/// `|p|` for a lattice point, used when comparing against `2π|p|`.
pub fn lattice_norm(p: &[i64]) -> f64 {
    p.iter().map(|&x| (x * x) as f64).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::{build_clifford, Sign};

    #[test]
    fn zero_block_and_antisymmetry() {
        let cliff = build_clifford(2, Sign::Plus).unwrap();
        let gns = TruncatedGNS::new(2, 2).unwrap();
        let d = assemble_full(&cliff, &gns).unwrap();
        assert_eq!(d.block(&[0, 0]).unwrap().max_abs(), 0.0);
        for p in gns.points() {
            let q: Vec<i64> = p.iter().map(|x| -x).collect();
            assert!(d.block(&p).unwrap().max_deviation(&-d.block(&q).unwrap()) < 1e-15);
        }
        assert!(d.hermiticity_defect() < 1e-15);
    }

    #[test]
    fn generator_count_mismatch() {
        let cliff = build_clifford(3, Sign::Plus).unwrap();
        let gns = TruncatedGNS::new(2, 1).unwrap();
        assert!(assemble_dirac(&cliff, &gns, &[0, 1]).is_err());
        assert!(assemble_dirac(&build_clifford(1, Sign::Plus).unwrap(), &gns, &[1, 0]).is_err());
    }

    #[test]
    fn spectral_data_grouping() {
        let s = SpectralData::from_values(vec![1.0, -1.0, 1.0 + 1e-12, 0.0], MERGE_TOL);
        assert_eq!(s.eigenvalues().len(), 3);
        assert_eq!(s.total_multiplicity(), 4);
        assert_eq!(s.eigenvalues()[2].1, 2);
        assert_eq!(s.to_csv().lines().count(), 4);
        assert!(SpectralData::from_pairs([(1.0, 0)]).is_err());
    }

    #[test]
    fn odd_operator_has_no_grading() {
        let cliff = build_clifford(3, Sign::Plus).unwrap();
        let gns = TruncatedGNS::new(3, 1).unwrap();
        let d = assemble_full(&cliff, &gns).unwrap();
        assert!(d.grading().is_err());
    }

    #[test]
    fn singleton_probe_has_no_verdict() {
        let cliff = build_clifford(2, Sign::Plus).unwrap();
        let probe = kernel_growth_probe(&cliff, 2, &[0, 1], &[3]).unwrap();
        assert_eq!(probe.rows.len(), 1);
        assert_eq!(probe.rows[0].kernel, 2);
        assert!(probe.verdict.is_none());
    }
}

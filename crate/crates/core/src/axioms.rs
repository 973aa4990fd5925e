//! Real structure `J = J_0 ⊗ J_S` on the truncated `ℋ₀ ⊗ S` and the checks
//! built on it: reality signs, zeroth- and first-order conditions, and the
//! tensor-doubling reduction to `J² = 1`, `JD = DJ`.
//!
//! `J_0[a] = [a*]`. On the basis, `J_0 δ_p` is read off from `adjoint(U^p)`,
//! so `J_0` and the algebra share one phase convention.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::clifford::{check_against, expected_signs, AntiUnitary, CliffordRep, Sign, SignTriple};
use crate::dirac::BlockDiracOperator;
use crate::error::{Error, Result};
use crate::linalg::{inner, ComplexMatrix, C64, ONE, ZERO};
use crate::nctorus::{adjoint, gns_operator, right_multiplication, FourierElement, ThetaMatrix, TruncatedGNS};
use crate::sparse::SparseMatrix;

/// Tolerance for reality and order conditions on interiors.
pub const AXIOM_TOL: f64 = 1e-10;

/// Tolerance for the finite-dimensional doubling relations.
pub const DOUBLING_TOL: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct RealStructure {
    c: SparseMatrix,
    c_adjoint: SparseMatrix,
    spinor_dim: usize,
    gns: TruncatedGNS,
    signs: SignTriple,
    n: usize,
}

pub fn build_real_structure(cliff: &CliffordRep, gns: &TruncatedGNS, theta: &ThetaMatrix) -> Result<RealStructure> {
    if theta.n() != gns.n() {
        return Err(Error::DimensionMismatch {
            expected: gns.n(),
            actual: theta.n(),
        });
    }
    let mut trip = Vec::with_capacity(gns.dim());
    for (col, p) in gns.points().enumerate() {
        let star = adjoint(&FourierElement::monomial(p, ONE), theta)?;
        for (q, c) in star.terms() {
            let row = gns.index_of(q).expect("the box is symmetric under p -> -p");
            trip.push((row, col, *c));
        }
    }
    let c0 = SparseMatrix::from_triplets(gns.dim(), gns.dim(), trip);
    let c = c0.kron_dense(cliff.js().matrix());
    Ok(RealStructure {
        c_adjoint: c.adjoint(),
        c,
        spinor_dim: cliff.dim(),
        gns: gns.clone(),
        signs: cliff.signs(),
        n: cliff.n(),
    })
}

impl RealStructure {
    pub fn matrix(&self) -> &SparseMatrix {
        &self.c
    }

    pub fn signs(&self) -> SignTriple {
        self.signs
    }

    pub fn dim(&self) -> usize {
        self.c.rows()
    }

    pub fn gns(&self) -> &TruncatedGNS {
        &self.gns
    }

    pub fn spinor_dim(&self) -> usize {
        self.spinor_dim
    }

    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        let conj: Vec<C64> = v.iter().map(|z| z.conj()).collect();
        self.c.matvec(&conj)
    }

    /// `J²` as a linear operator.
    pub fn square(&self) -> SparseMatrix {
        &self.c * &self.c.conj()
    }

    /// `J T J⁻¹ = C·conj(T)·C†` for linear `T`.
    pub fn conjugate_linear(&self, t: &SparseMatrix) -> SparseMatrix {
        &(&self.c * &t.conj()) * &self.c_adjoint
    }

    /// `J (π(b*) ⊗ 1) J⁻¹`, the opposite action of `b`.
    pub fn opposite_action(&self, b: &FourierElement, theta: &ThetaMatrix) -> Result<SparseMatrix> {
        let pb =
            gns_operator(&adjoint(b, theta)?, &self.gns, theta)?.kron_dense(&ComplexMatrix::identity(self.spinor_dim));
        Ok(self.conjugate_linear(&pb))
    }

    fn interior(&self, margin: i64) -> Result<Vec<usize>> {
        let idx = self.gns.interior_with_spinor(margin, self.spinor_dim);
        if idx.is_empty() {
            return Err(Error::EmptyInterior {
                margin,
                radius: self.gns.radius(),
            });
        }
        Ok(idx)
    }
}

fn left_action(a: &FourierElement, j: &RealStructure, theta: &ThetaMatrix) -> Result<SparseMatrix> {
    Ok(gns_operator(a, &j.gns, theta)?.kron_dense(&ComplexMatrix::identity(j.spinor_dim)))
}

fn margin(a: &FourierElement, b: &FourierElement) -> i64 {
    a.radius() + b.radius() + 1
}

/// sup over interior basis vectors of `‖J(π(b*)⊗1)J⁻¹ ξ - (R_b ⊗ 1) ξ‖`,
/// where `R_b` is right multiplication by `b`.
pub fn opposite_action_defect(b: &FourierElement, j: &RealStructure, theta: &ThetaMatrix) -> Result<f64> {
    let opp = j.opposite_action(b, theta)?;
    let right = right_multiplication(b, &j.gns, theta)?.kron_dense(&ComplexMatrix::identity(j.spinor_dim));
    Ok((&opp - &right).max_column_norm(&j.interior(b.radius() + 1)?))
}

/// sup over interior basis vectors of `‖[π(a)⊗1, J(π(b*)⊗1)J⁻¹] ξ‖`.
pub fn check_zeroth_order(
    a: &FourierElement,
    b: &FourierElement,
    j: &RealStructure,
    theta: &ThetaMatrix,
) -> Result<f64> {
    let interior = j.interior(margin(a, b))?;
    let pa = left_action(a, j, theta)?;
    let opp = j.opposite_action(b, theta)?;
    Ok(pa.commutator(&opp).max_column_norm(&interior))
}

/// sup over interior basis vectors of `‖[[D, π(a)⊗1], J(π(b*)⊗1)J⁻¹] ξ‖`.
pub fn check_first_order(
    d: &BlockDiracOperator,
    a: &FourierElement,
    b: &FourierElement,
    j: &RealStructure,
    theta: &ThetaMatrix,
) -> Result<f64> {
    if d.dim() != j.dim() {
        return Err(Error::DimensionMismatch {
            expected: j.dim(),
            actual: d.dim(),
        });
    }
    let interior = j.interior(margin(a, b))?;
    let inner_comm = d.to_sparse().commutator(&left_action(a, j, theta)?);
    let opp = j.opposite_action(b, theta)?;
    Ok(inner_comm.commutator(&opp).max_column_norm(&interior))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrderDefects {
    pub zeroth_order: f64,
    pub first_order: f64,
}

/// Zeroth- and first-order defects for one pair, sharing the opposite action.
pub fn check_order_conditions(
    d: &SparseMatrix,
    a: &FourierElement,
    b: &FourierElement,
    j: &RealStructure,
    theta: &ThetaMatrix,
) -> Result<OrderDefects> {
    if d.rows() != j.dim() {
        return Err(Error::DimensionMismatch {
            expected: j.dim(),
            actual: d.rows(),
        });
    }
    let interior = j.interior(margin(a, b))?;
    let pa = left_action(a, j, theta)?;
    let opp = j.opposite_action(b, theta)?;
    Ok(OrderDefects {
        zeroth_order: pa.commutator(&opp).max_column_norm(&interior),
        first_order: d.commutator(&pa).commutator(&opp).max_column_norm(&interior),
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RealitySigns {
    pub signs: SignTriple,
    pub j_square_deviation: f64,
    pub jd_deviation: f64,
    pub jgamma_deviation: Option<f64>,
}

impl RealitySigns {
    pub fn max_deviation(&self) -> f64 {
        self.j_square_deviation
            .max(self.jd_deviation)
            .max(self.jgamma_deviation.unwrap_or(0.0))
    }
}

fn measure_sparse_sign(relation: &'static str, lhs: &SparseMatrix, rhs: &SparseMatrix) -> Result<(Sign, f64)> {
    let plus = (lhs - rhs).max_abs();
    let minus = (lhs + rhs).max_abs();
    let (sign, dev) = if plus <= minus {
        (Sign::Plus, plus)
    } else {
        (Sign::Minus, minus)
    };
    if dev >= AXIOM_TOL {
        return Err(Error::RelationFailed {
            relation: relation.into(),
            deviation: dev,
            tolerance: AXIOM_TOL,
        });
    }
    Ok((sign, dev))
}

/// Measures `J² = ε_J`, `JD = ε_D DJ` and (with a grading) `Jγ = ε_γ γJ`,
/// then compares with the mod-8 table for the Clifford rank.
pub fn check_reality_signs(d: &SparseMatrix, gamma: Option<&SparseMatrix>, j: &RealStructure) -> Result<RealitySigns> {
    let id = SparseMatrix::identity(j.dim());
    let (eps_j, j_square_deviation) = measure_sparse_sign("J^2 = ε_J", &j.square(), &id)?;
    let (eps_d, jd_deviation) = measure_sparse_sign("J D = ε_D D J", &j.conjugate_linear(d), d)?;
    let (eps_gamma, jgamma_deviation) = match gamma {
        Some(g) => {
            let (s, dev) = measure_sparse_sign("J γ = ε_γ γ J", &j.conjugate_linear(g), g)?;
            (Some(s), Some(dev))
        }
        None => (None, None),
    };
    let signs = SignTriple {
        eps_j,
        eps_d,
        eps_gamma,
    };
    let mut expected = expected_signs(j.n);
    if gamma.is_none() {
        expected.eps_gamma = None;
    }
    check_against(signs, expected)?;
    Ok(RealitySigns {
        signs,
        j_square_deviation,
        jd_deviation,
        jgamma_deviation,
    })
}

/// `|⟨Jξ, Jη⟩ - ⟨η, ξ⟩|` for one pair.
pub fn norm_preservation_defect(j: &RealStructure, xi: &[C64], eta: &[C64]) -> f64 {
    (inner(&j.apply(xi), &j.apply(eta)) - inner(eta, xi)).norm()
}

/// Machine-readable record of one certified relation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub check: String,
    pub n: usize,
    pub theta: String,
    pub max_deviation: f64,
    pub verdict: Verdict,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

impl VerificationReport {
    pub fn new(check: impl Into<String>, n: usize, theta: &ThetaMatrix, max_deviation: f64, tol: f64) -> Self {
        Self {
            check: check.into(),
            n,
            theta: theta.fingerprint(),
            max_deviation,
            verdict: if max_deviation < tol {
                Verdict::Pass
            } else {
                Verdict::Fail
            },
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DoublingStep {
    /// which reduction was applied: `"eps_d=-1"` or `"eps_j=-1"`
    pub reduction: &'static str,
    pub expected_j_square: Sign,
    pub hermiticity_defect: f64,
    pub j_square_defect: f64,
    pub commutation_defect: f64,
    pub unitarity_defect: f64,
    pub norm_preservation_defect: f64,
    pub restriction_defect: f64,
}

impl DoublingStep {
    pub fn max_defect(&self) -> f64 {
        [
            self.hermiticity_defect,
            self.j_square_defect,
            self.commutation_defect,
            self.unitarity_defect,
            self.norm_preservation_defect,
            self.restriction_defect,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug)]
pub struct DoublingReport {
    pub d2: ComplexMatrix,
    pub j2: AntiUnitary,
    pub steps: Vec<DoublingStep>,
    /// `‖J'² - 1‖` for the final pair
    pub final_j_square_defect: f64,
    /// `‖J'D'J'⁻¹ - D'‖` for the final pair
    pub final_commutation_defect: f64,
}

impl DoublingReport {
    pub fn max_defect(&self) -> f64 {
        self.steps
            .iter()
            .map(DoublingStep::max_defect)
            .fold(self.final_j_square_defect.max(self.final_commutation_defect), f64::max)
    }

    pub fn passed(&self, tol: f64) -> bool {
        self.max_defect() < tol
    }
}

fn c_quaternionic() -> ComplexMatrix {
    // C(x1, x2) = (-conj x2, conj x1)
    ComplexMatrix::from_row_major(2, 2, vec![ZERO, -ONE, ONE, ZERO]).expect("2x2")
}

fn c_swap() -> ComplexMatrix {
    // C'(x1, x2) = (conj x2, conj x1)
    ComplexMatrix::from_row_major(2, 2, vec![ZERO, ONE, ONE, ZERO]).expect("2x2")
}

fn sample_norm_preservation(j: &AntiUnitary, rng: &mut ChaCha8Rng) -> f64 {
    let dim = j.dim();
    let mut worst: f64 = 0.0;
    for _ in 0..8 {
        let xi: Vec<C64> = (0..dim)
            .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let eta: Vec<C64> = (0..dim)
            .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        worst = worst.max(j.norm_preservation_defect(&xi, &eta));
    }
    worst
}

#[allow(clippy::too_many_arguments)]
fn double(
    d: &ComplexMatrix,
    j: &AntiUnitary,
    original: &ComplexMatrix,
    reduction: &'static str,
    d_factor: ComplexMatrix,
    c_factor: ComplexMatrix,
    expected_j_square: Sign,
    rng: &mut ChaCha8Rng,
) -> Result<(ComplexMatrix, AntiUnitary, DoublingStep)> {
    let d2 = d.kron(&d_factor);
    let j2 = AntiUnitary::new(j.matrix().kron(&c_factor))?;
    let dim = d2.rows();
    let id = ComplexMatrix::identity(dim);
    // the C^2 factor is the fastest index; component 0 carries the original operator
    let period = dim / original.rows();
    let top_left = ComplexMatrix::from_fn(original.rows(), original.cols(), |r, c| d2[(r * period, c * period)]);
    let step = DoublingStep {
        reduction,
        expected_j_square,
        hermiticity_defect: d2.hermiticity_defect(),
        j_square_defect: j2.square().max_deviation(&id.scale_real(expected_j_square.value())),
        commutation_defect: j2.conjugate_linear(&d2).max_deviation(&d2),
        unitarity_defect: (&j2.matrix().adjoint() * j2.matrix()).max_deviation(&id),
        norm_preservation_defect: sample_norm_preservation(&j2, rng),
        restriction_defect: top_left.max_deviation(original),
    };
    Ok((d2, j2, step))
}

/// Reduces `(D, J)` with `J² = ε_J`, `JD = ε_D DJ` to a pair `(D', J')` with
/// `J'² = 1` and `J'D' = D'J'` by tensoring with `C²`:
///
/// * `ε_D = -1`: `D ⊗ diag(1, -1)`, `J ⊗ C'` with `C'(x1, x2) = (x̄2, x̄1)`;
/// * `ε_J = -1`: `D ⊗ 1`, `J ⊗ C` with `C(x1, x2) = (-x̄2, x̄1)`.
///
/// Each step records its own relation defects; the original `D` always sits in
/// the upper-left block.
pub fn doubling_trick(d: &ComplexMatrix, j: &AntiUnitary, eps_j: Sign, eps_d: Sign) -> Result<DoublingReport> {
    if !d.is_square() || d.rows() != j.dim() {
        return Err(Error::DimensionMismatch {
            expected: j.dim(),
            actual: d.rows(),
        });
    }
    let herm = d.hermiticity_defect();
    if herm >= DOUBLING_TOL {
        return Err(Error::RelationFailed {
            relation: "D = D†".into(),
            deviation: herm,
            tolerance: DOUBLING_TOL,
        });
    }
    let id = ComplexMatrix::identity(d.rows());
    let scale = 1.0 + d.max_abs();
    let js_dev = j.square().max_deviation(&id.scale_real(eps_j.value()));
    let jd_dev = j.conjugate_linear(d).max_deviation(&d.scale_real(eps_d.value()));
    if js_dev >= AXIOM_TOL || jd_dev >= AXIOM_TOL * scale {
        return Err(Error::InvalidArgument(format!(
            "signs (ε_J, ε_D) = ({eps_j}, {eps_d}) inconsistent with the supplied J: J² defect {js_dev:e}, JD defect {jd_dev:e}"
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_d0b1);
    let mut steps = Vec::new();
    let mut cur_d = d.clone();
    let mut cur_j = j.clone();
    let mut cur_eps_j = eps_j;
    if eps_d == Sign::Minus {
        let (d2, j2, step) = double(
            &cur_d,
            &cur_j,
            d,
            "eps_d=-1",
            ComplexMatrix::diagonal(&[ONE, -ONE]),
            c_swap(),
            cur_eps_j,
            &mut rng,
        )?;
        steps.push(step);
        cur_d = d2;
        cur_j = j2;
    }
    if cur_eps_j == Sign::Minus {
        let (d2, j2, step) = double(
            &cur_d,
            &cur_j,
            d,
            "eps_j=-1",
            ComplexMatrix::identity(2),
            c_quaternionic(),
            Sign::Plus,
            &mut rng,
        )?;
        steps.push(step);
        cur_d = d2;
        cur_j = j2;
        cur_eps_j = Sign::Plus;
    }
    debug_assert_eq!(cur_eps_j, Sign::Plus);
    let final_id = ComplexMatrix::identity(cur_d.rows());
    Ok(DoublingReport {
        final_j_square_defect: cur_j.square().max_deviation(&final_id),
        final_commutation_defect: cur_j.conjugate_linear(&cur_d).max_deviation(&cur_d),
        d2: cur_d,
        j2: cur_j,
        steps,
    })
}

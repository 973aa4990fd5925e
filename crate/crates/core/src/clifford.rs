//! Irreducible representations of the complex Clifford algebra Cl(n).
//!
//! Generators are built by the usual tensor recursion on Pauli matrices:
//! going from 2m to 2m + 2 generators, every old generator is tensored with
//! `σ_z` and the two new ones are `1 ⊗ σ_x` and `1 ⊗ σ_y`. For odd n the last
//! generator is `±` the chirality of the even part, which picks one of the two
//! inequivalent irreducibles.
//!
//! The stored `F_j` are `i·e_j`, so `F_j† = -F_j` and `F_j F_k + F_k F_j = -2δ_jk`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{inner, ComplexMatrix, C64, I, ONE, ZERO};

/// Default cap on the number of generators (spinor dimension 2^6 = 64).
pub const DEFAULT_MAX_GENERATORS: usize = 12;

/// Exact-structure tolerance for Clifford relations.
pub const STRUCTURE_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-", alias = "−")]
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn from_value(v: f64) -> Self {
        if v < 0.0 {
            Sign::Minus
        } else {
            Sign::Plus
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        })
    }
}

impl std::str::FromStr for Sign {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "+" | "+1" | "1" | "plus" => Ok(Sign::Plus),
            "-" | "−" | "-1" | "minus" => Ok(Sign::Minus),
            other => Err(Error::Parse(format!("not a sign: {other:?}"))),
        }
    }
}

/// The real-structure sign triple. `eps_gamma` only exists for even n.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignTriple {
    pub eps_j: Sign,
    pub eps_d: Sign,
    pub eps_gamma: Option<Sign>,
}

impl fmt::Display for SignTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.eps_gamma {
            Some(g) => write!(f, "({}, {}, {})", self.eps_j, self.eps_d, g),
            None => write!(f, "({}, {})", self.eps_j, self.eps_d),
        }
    }
}

/// The KO-dimension sign table, periodic in n modulo 8.
pub fn expected_signs(n: usize) -> SignTriple {
    use Sign::{Minus as M, Plus as P};
    let (eps_j, eps_d, eps_gamma) = match n % 8 {
        0 => (P, P, Some(P)),
        1 => (P, M, None),
        2 => (M, P, Some(M)),
        3 => (M, P, None),
        4 => (M, P, Some(P)),
        5 => (M, M, None),
        6 => (P, P, Some(M)),
        7 => (P, P, None),
        _ => unreachable!(),
    };
    SignTriple {
        eps_j,
        eps_d,
        eps_gamma,
    }
}

/// An antiunitary map `v ↦ C·conj(v)` with `C` unitary.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AntiUnitary {
    c: ComplexMatrix,
}

impl AntiUnitary {
    pub fn new(c: ComplexMatrix) -> Result<Self> {
        if !c.is_square() {
            return Err(Error::InvalidArgument("antiunitary matrix must be square".into()));
        }
        let defect = (&c.adjoint() * &c).max_deviation(&ComplexMatrix::identity(c.rows()));
        if defect >= STRUCTURE_TOL {
            return Err(Error::RelationFailed {
                relation: "C†C = 1".into(),
                deviation: defect,
                tolerance: STRUCTURE_TOL,
            });
        }
        Ok(Self { c })
    }

    /// Plain complex conjugation on `C^dim`.
    pub fn conjugation(dim: usize) -> Self {
        Self {
            c: ComplexMatrix::identity(dim),
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.c
    }

    pub fn dim(&self) -> usize {
        self.c.rows()
    }

    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        let conj: Vec<C64> = v.iter().map(|z| z.conj()).collect();
        self.c.matvec(&conj)
    }

    /// `J²` as a linear matrix: `C·conj(C)`.
    pub fn square(&self) -> ComplexMatrix {
        &self.c * &self.c.conj()
    }

    /// `J T J⁻¹` for a linear `T`, which is `C·conj(T)·C†`.
    pub fn conjugate_linear(&self, t: &ComplexMatrix) -> ComplexMatrix {
        &(&self.c * &t.conj()) * &self.c.adjoint()
    }

    pub fn inverse(&self) -> Self {
        Self { c: self.c.transpose() }
    }

    /// `J ⊗ K` for two antiunitaries, acting on the tensor product.
    pub fn tensor(&self, other: &Self) -> Self {
        Self {
            c: self.c.kron(&other.c),
        }
    }

    /// `|⟨Jξ, Jη⟩ - ⟨η, ξ⟩|`.
    pub fn norm_preservation_defect(&self, xi: &[C64], eta: &[C64]) -> f64 {
        (inner(&self.apply(xi), &self.apply(eta)) - inner(eta, xi)).norm()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CliffordRep {
    n: usize,
    m: usize,
    dim: usize,
    branch: Sign,
    generators: Vec<ComplexMatrix>,
    gamma_s: Option<ComplexMatrix>,
    js: AntiUnitary,
    signs: SignTriple,
}

pub fn build_clifford(n: usize, branch: Sign) -> Result<CliffordRep> {
    CliffordRep::build(n, branch, DEFAULT_MAX_GENERATORS)
}

fn pauli_x() -> ComplexMatrix {
    ComplexMatrix::from_row_major(2, 2, vec![ZERO, ONE, ONE, ZERO]).expect("2x2")
}

fn pauli_y() -> ComplexMatrix {
    ComplexMatrix::from_row_major(2, 2, vec![ZERO, -I, I, ZERO]).expect("2x2")
}

fn pauli_z() -> ComplexMatrix {
    ComplexMatrix::diagonal(&[ONE, -ONE])
}

/// `(-i)^m e_1 ⋯ e_k` for selfadjoint generators `e`.
fn chirality_of(e: &[ComplexMatrix], m: usize, dim: usize) -> ComplexMatrix {
    let phase = (-I).powu(m as u32);
    e.iter()
        .fold(ComplexMatrix::identity(dim), |acc, g| &acc * g)
        .scale(phase)
}

/// Selfadjoint anticommuting involutions `e_1..e_n`.
fn selfadjoint_generators(n: usize, branch: Sign) -> Vec<ComplexMatrix> {
    let m = n / 2;
    let mut e: Vec<ComplexMatrix> = Vec::with_capacity(n);
    let mut dim = 1;
    for _ in 0..m {
        let z = pauli_z();
        e = e.iter().map(|g| g.kron(&z)).collect();
        let id = ComplexMatrix::identity(dim);
        e.push(id.kron(&pauli_x()));
        e.push(id.kron(&pauli_y()));
        dim *= 2;
    }
    if n % 2 == 1 {
        let gamma = chirality_of(&e, m, dim);
        e.push(gamma.scale_real(branch.value()));
    }
    e
}

impl CliffordRep {
    pub fn build(n: usize, branch: Sign, max_generators: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("Cl(n) needs n >= 1".into()));
        }
        if n > max_generators {
            return Err(Error::InvalidArgument(format!(
                "n = {n} exceeds the configured maximum {max_generators}"
            )));
        }
        let m = n / 2;
        let dim = 1usize << m;
        let branch = if n.is_multiple_of(2) { Sign::Plus } else { branch };
        let e = selfadjoint_generators(n, branch);
        let generators: Vec<ComplexMatrix> = e.iter().map(|g| g.scale(I)).collect();
        let gamma_s = n.is_multiple_of(2).then(|| chirality_of(&e, m, dim));

        // J_S = C∘conj with C a product of the purely imaginary generators, or,
        // for n ≡ 0 mod 4, of the purely real ones (the imaginary product
        // gives ε_D = -1 there).
        let use_real = n.is_multiple_of(2) && m.is_multiple_of(2);
        let c = e
            .iter()
            .filter(|g| {
                if use_real {
                    g.is_entrywise_real()
                } else {
                    g.is_entrywise_imaginary()
                }
            })
            .fold(ComplexMatrix::identity(dim), |acc, g| &acc * g);
        let js = AntiUnitary::new(c)?;

        Ok(Self {
            n,
            m,
            dim,
            branch,
            generators,
            gamma_s,
            js,
            signs: expected_signs(n),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn branch(&self) -> Sign {
        self.branch
    }

    /// The anti-Hermitian generators `F_1..F_n`.
    pub fn generators(&self) -> &[ComplexMatrix] {
        &self.generators
    }

    pub fn gamma_s(&self) -> Option<&ComplexMatrix> {
        self.gamma_s.as_ref()
    }

    pub fn js(&self) -> &AntiUnitary {
        &self.js
    }

    pub fn signs(&self) -> SignTriple {
        self.signs
    }

    /// `(-i)^m e_1 ⋯ e_n` with `e_j = -i F_j`.
    pub fn chirality(&self) -> ComplexMatrix {
        let e: Vec<ComplexMatrix> = self.generators.iter().map(|f| f.scale(-I)).collect();
        chirality_of(&e, self.m, self.dim)
    }

    /// Largest deviation across all defining relations of the representation.
    pub fn relation_defect(&self) -> f64 {
        let id = ComplexMatrix::identity(self.dim);
        let mut worst: f64 = 0.0;
        for (j, fj) in self.generators.iter().enumerate() {
            worst = worst.max(fj.adjoint().max_deviation(&-fj));
            for (k, fk) in self.generators.iter().enumerate() {
                let expected = if j == k {
                    id.scale_real(-2.0)
                } else {
                    ComplexMatrix::zeros(self.dim, self.dim)
                };
                worst = worst.max(fj.anticommutator(fk).max_deviation(&expected));
            }
            if let Some(g) = &self.gamma_s {
                worst = worst.max(g.anticommutator(fj).max_abs());
            }
        }
        if let Some(g) = &self.gamma_s {
            worst = worst.max(g.hermiticity_defect());
            worst = worst.max((g * g).max_deviation(&id));
        }
        worst
    }

    /// Measures (ε_J, ε_D, ε_γ) from the matrices and checks them against the
    /// stored table values.
    pub fn verify_signs(&self) -> Result<SignTriple> {
        let measured = measure_signs(&self.js, &self.generators, self.gamma_s.as_ref())?;
        check_against(measured, self.signs)?;
        Ok(measured)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let rep: Self = serde_json::from_str(s)?;
        if rep.generators.len() != rep.n || rep.dim != 1 << (rep.n / 2) {
            return Err(Error::Parse("inconsistent Clifford representation header".into()));
        }
        Ok(rep)
    }
}

/// Picks the sign `s` minimising `‖lhs - s·rhs‖`; fails if neither fits.
pub(crate) fn measure_sign(
    relation: &'static str,
    lhs: &ComplexMatrix,
    rhs: &ComplexMatrix,
    tol: f64,
) -> Result<(Sign, f64)> {
    let plus = lhs.max_deviation(rhs);
    let minus = lhs.max_deviation(&-rhs);
    let (sign, dev) = if plus <= minus {
        (Sign::Plus, plus)
    } else {
        (Sign::Minus, minus)
    };
    if dev >= tol {
        return Err(Error::RelationFailed {
            relation: relation.into(),
            deviation: dev,
            tolerance: tol,
        });
    }
    Ok((sign, dev))
}

fn measure_signs(js: &AntiUnitary, generators: &[ComplexMatrix], gamma: Option<&ComplexMatrix>) -> Result<SignTriple> {
    let dim = js.dim();
    let (eps_j, _) = measure_sign(
        "J_S^2 = ε_J",
        &js.square(),
        &ComplexMatrix::identity(dim),
        STRUCTURE_TOL,
    )?;
    let (eps_d, _) = measure_sign(
        "J_S F_1 J_S^-1 = ε_D F_1",
        &js.conjugate_linear(&generators[0]),
        &generators[0],
        STRUCTURE_TOL,
    )?;
    for f in &generators[1..] {
        let dev = js.conjugate_linear(f).max_deviation(&f.scale_real(eps_d.value()));
        if dev >= STRUCTURE_TOL {
            return Err(Error::RelationFailed {
                relation: "J_S F_j J_S^-1 = ε_D F_j for all j".into(),
                deviation: dev,
                tolerance: STRUCTURE_TOL,
            });
        }
    }
    let eps_gamma = match gamma {
        Some(g) => Some(measure_sign("J_S γ_S J_S^-1 = ε_γ γ_S", &js.conjugate_linear(g), g, STRUCTURE_TOL)?.0),
        None => None,
    };
    Ok(SignTriple {
        eps_j,
        eps_d,
        eps_gamma,
    })
}

pub(crate) fn check_against(measured: SignTriple, expected: SignTriple) -> Result<()> {
    let pairs = [
        ("ε_J", Some(measured.eps_j), Some(expected.eps_j)),
        ("ε_D", Some(measured.eps_d), Some(expected.eps_d)),
        ("ε_γ", measured.eps_gamma, expected.eps_gamma),
    ];
    for (relation, got, want) in pairs {
        if got != want {
            let show = |s: Option<Sign>| s.map_or_else(|| "absent".to_string(), |s| s.to_string());
            return Err(Error::SignMismatch {
                relation,
                measured: show(got),
                expected: show(want),
            });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn n1_is_multiplication_by_i() {
        let rep = build_clifford(1, Sign::Plus).unwrap();
        assert_eq!(rep.dim(), 1);
        assert_eq!(rep.generators()[0][(0, 0)], I);
        let s = rep.verify_signs().unwrap();
        assert_eq!((s.eps_j, s.eps_d, s.eps_gamma), (Sign::Plus, Sign::Minus, None));
        assert_eq!(rep.chirality(), ComplexMatrix::identity(1));
        let minus = build_clifford(1, Sign::Minus).unwrap();
        assert_eq!(minus.chirality(), ComplexMatrix::scalar(1, -ONE));
    }

    #[test]
    fn n2_relations_are_exact() {
        let rep = build_clifford(2, Sign::Minus).unwrap();
        assert_eq!(rep.branch(), Sign::Plus, "branch ignored for even n");
        let [f1, f2] = [&rep.generators()[0], &rep.generators()[1]];
        assert_eq!(f1.anticommutator(f2), ComplexMatrix::zeros(2, 2));
        assert_eq!(f1 * f1, ComplexMatrix::scalar(2, -ONE));
        assert_eq!(rep.chirality(), *rep.gamma_s().unwrap());
    }

    #[test]
    fn n3_last_generator_squares_to_minus_one() {
        let rep = build_clifford(3, Sign::Plus).unwrap();
        let n2 = build_clifford(2, Sign::Plus).unwrap();
        let f3 = &rep.generators()[2];
        assert_eq!(*f3, n2.gamma_s().unwrap().scale(I));
        assert_eq!(f3 * f3, ComplexMatrix::scalar(2, -ONE));
    }

    #[test]
    fn table_signs() {
        let cases = [
            (2, (Sign::Minus, Sign::Plus, Some(Sign::Minus))),
            (4, (Sign::Minus, Sign::Plus, Some(Sign::Plus))),
            (7, (Sign::Plus, Sign::Plus, None)),
        ];
        for (n, (j, d, g)) in cases {
            let s = build_clifford(n, Sign::Plus).unwrap().verify_signs().unwrap();
            assert_eq!((s.eps_j, s.eps_d, s.eps_gamma), (j, d, g), "n = {n}");
        }
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(build_clifford(0, Sign::Plus).is_err());
        assert!(build_clifford(13, Sign::Plus).is_err());
        assert!(CliffordRep::build(13, Sign::Plus, 14).is_ok());
    }

    #[test]
    fn wrong_j_is_reported() {
        let mut rep = build_clifford(2, Sign::Plus).unwrap();
        rep.js = AntiUnitary::conjugation(2);
        assert!(rep.verify_signs().is_err());
    }

    #[test]
    fn json_round_trip_and_minus_alias() {
        let rep = build_clifford(3, Sign::Minus).unwrap();
        let json = rep.to_json().unwrap();
        assert!(json.contains("\"branch\": \"-\""));
        let back = CliffordRep::from_json(&json).unwrap();
        assert_eq!(back, rep);
        let sign: Sign = serde_json::from_str("\"−\"").unwrap();
        assert_eq!(sign, Sign::Minus);
    }
}

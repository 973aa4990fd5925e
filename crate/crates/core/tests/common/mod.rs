//! Independent reference implementations used as test oracles.
#![allow(dead_code)]

use std::collections::BTreeMap;
use std::f64::consts::PI;

use ergodic_dirac::linalg::{ComplexMatrix, C64};
use ergodic_dirac::nctorus::{FourierElement, ThetaMatrix};
use nalgebra::DMatrix;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Eigenvalues of a Hermitian matrix via nalgebra, ascending.
pub fn nalgebra_eigenvalues(m: &ComplexMatrix) -> Vec<f64> {
    let n = m.rows();
    let dm = DMatrix::from_fn(n, n, |i, j| m[(i, j)]);
    let mut ev: Vec<f64> = dm.symmetric_eigen().eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

pub fn max_gap(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len(), "multiset sizes differ");
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Noncommutative torus arithmetic by rewriting words in the generators.
///
/// A word is a list of letters `(j, ±1)` meaning `U_j^{±1}`. Normal ordering
/// bubble-sorts letters by index, each swap of `U_j^a U_k^b` (j > k) producing
/// the scalar `e^{2πiθ_jk a b}` from `U_j U_k = e^{2πiθ_jk} U_k U_j`.
pub struct WordAlgebra {
    theta: Vec<Vec<f64>>,
}

type Word = Vec<(usize, i64)>;

impl WordAlgebra {
    pub fn new(theta: &ThetaMatrix) -> Self {
        let n = theta.n();
        Self {
            theta: (0..n).map(|j| (0..n).map(|k| theta.get(j, k)).collect()).collect(),
        }
    }

    fn n(&self) -> usize {
        self.theta.len()
    }

    fn word_of(p: &[i64]) -> Word {
        let mut w = Vec::new();
        for (j, &e) in p.iter().enumerate() {
            let letter = if e >= 0 { 1 } else { -1 };
            for _ in 0..e.abs() {
                w.push((j, letter));
            }
        }
        w
    }

    /// Normal-orders a word, returning its scalar and exponent vector.
    fn normal_order(&self, mut w: Word) -> (C64, Vec<i64>) {
        let mut turns = 0.0;
        let len = w.len();
        for pass in 0..len {
            let mut swapped = false;
            for i in 0..len.saturating_sub(1 + pass) {
                let (j, a) = w[i];
                let (k, b) = w[i + 1];
                if j > k {
                    turns += self.theta[j][k] * (a * b) as f64;
                    w.swap(i, i + 1);
                    swapped = true;
                }
            }
            if !swapped {
                break;
            }
        }
        let mut p = vec![0i64; self.n()];
        for (j, e) in w {
            p[j] += e;
        }
        (C64::from_polar(1.0, 2.0 * PI * turns), p)
    }

    pub fn multiply(&self, a: &FourierElement, b: &FourierElement) -> BTreeMap<Vec<i64>, C64> {
        let mut out: BTreeMap<Vec<i64>, C64> = BTreeMap::new();
        for (p, x) in a.terms() {
            for (q, y) in b.terms() {
                let mut w = Self::word_of(p);
                w.extend(Self::word_of(q));
                let (phase, r) = self.normal_order(w);
                *out.entry(r).or_default() += x * y * phase;
            }
        }
        out
    }

    /// `(c U^p)* = c̄ (U^p)^{-1}`: reverse the word and invert each letter.
    pub fn adjoint(&self, a: &FourierElement) -> BTreeMap<Vec<i64>, C64> {
        let mut out: BTreeMap<Vec<i64>, C64> = BTreeMap::new();
        for (p, c) in a.terms() {
            let w: Word = Self::word_of(p).into_iter().rev().map(|(j, e)| (j, -e)).collect();
            let (phase, r) = self.normal_order(w);
            *out.entry(r).or_default() += c.conj() * phase;
        }
        out
    }

    pub fn to_element(&self, m: &BTreeMap<Vec<i64>, C64>) -> FourierElement {
        FourierElement::from_terms(self.n(), m.iter().map(|(p, c)| (p.clone(), *c))).unwrap()
    }

    /// `τ(a⁰ (∂₁a¹ ∂₂a² − ∂₂a¹ ∂₁a²))` with derivations applied coefficientwise.
    pub fn cocycle(&self, a0: &FourierElement, a1: &FourierElement, a2: &FourierElement) -> C64 {
        let d = |j: usize, a: &FourierElement| {
            FourierElement::from_terms(
                a.n(),
                a.terms()
                    .map(|(p, c)| (p.clone(), c * C64::new(0.0, 2.0 * PI * p[j] as f64))),
            )
            .unwrap()
        };
        let left = self.to_element(&self.multiply(&d(0, a1), &d(1, a2)));
        let right = self.to_element(&self.multiply(&d(1, a1), &d(0, a2)));
        let inner = left.sub(&right);
        let full = self.multiply(a0, &inner);
        full.get(&vec![0; self.n()]).copied().unwrap_or_default()
    }
}

pub fn random_theta(n: usize, rng: &mut ChaCha8Rng) -> ThetaMatrix {
    let upper: Vec<f64> = (0..n * (n - 1) / 2).map(|_| rng.gen_range(-1.0..1.0)).collect();
    ThetaMatrix::from_upper(n, &upper).unwrap()
}

pub fn random_monomial(n: usize, radius: i64, rng: &mut ChaCha8Rng) -> FourierElement {
    let p: Vec<i64> = (0..n).map(|_| rng.gen_range(-radius..=radius)).collect();
    FourierElement::monomial(
        p,
        C64::from_polar(rng.gen_range(0.5..1.5), rng.gen_range(0.0..2.0 * PI)),
    )
}

pub fn random_element(n: usize, radius: i64, terms: usize, rng: &mut ChaCha8Rng) -> FourierElement {
    (0..terms).fold(FourierElement::zero(n), |acc, _| {
        acc.add(&random_monomial(n, radius, rng))
    })
}

pub fn random_hermitian(dim: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
    let a = ComplexMatrix::from_fn(dim, dim, |_, _| {
        C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    });
    (&a + &a.adjoint()).scale_real(0.5)
}

pub fn random_unitary(dim: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
    // Gram-Schmidt on a random complex matrix
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(dim);
    for _ in 0..dim {
        let mut v: Vec<C64> = (0..dim)
            .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        for u in &cols {
            let proj: C64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (vi, ui) in v.iter_mut().zip(u) {
                *vi -= proj * ui;
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        cols.push(v.into_iter().map(|z| z / norm).collect());
    }
    ComplexMatrix::from_fn(dim, dim, |i, j| cols[j][i])
}

fn block2(a: &ComplexMatrix, b: &ComplexMatrix, c: &ComplexMatrix, d: &ComplexMatrix) -> ComplexMatrix {
    let h = a.rows();
    ComplexMatrix::from_fn(2 * h, 2 * h, |i, j| match (i < h, j < h) {
        (true, true) => a[(i, j)],
        (true, false) => b[(i, j - h)],
        (false, true) => c[(i - h, j)],
        (false, false) => d[(i - h, j - h)],
    })
}

/// A Hermitian `D` with antiunitary `J = C∘conj` satisfying `J² = ε_J` and
/// `JD = ε_D DJ`, built from the four normal forms and then rotated by a
/// random unitary `W` (`D ↦ WDW†`, `C ↦ WCWᵀ`). Dimension `2·half`.
pub fn synthetic_real_pair(
    eps_j: ergodic_dirac::clifford::Sign,
    eps_d: ergodic_dirac::clifford::Sign,
    half: usize,
    rng: &mut ChaCha8Rng,
) -> (ComplexMatrix, ergodic_dirac::clifford::AntiUnitary) {
    use ergodic_dirac::clifford::{AntiUnitary, Sign};
    let dim = 2 * half;
    let real =
        |rng: &mut ChaCha8Rng, h: usize| ComplexMatrix::from_fn(h, h, |_, _| C64::new(rng.gen_range(-1.0..1.0), 0.0));
    let complex = |rng: &mut ChaCha8Rng, h: usize| {
        ComplexMatrix::from_fn(h, h, |_, _| {
            C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        })
    };
    let zero = ComplexMatrix::zeros(half, half);
    let id = ComplexMatrix::identity(half);
    let omega = block2(&zero, &-&id, &id, &zero);
    let (d, c) = match (eps_j, eps_d) {
        (Sign::Plus, Sign::Plus) => {
            let r = real(rng, dim);
            ((&r + &r.transpose()).scale_real(0.5), ComplexMatrix::identity(dim))
        }
        (Sign::Plus, Sign::Minus) => {
            let r = real(rng, dim);
            (
                (&r - &r.transpose()).scale(C64::new(0.0, 0.5)),
                ComplexMatrix::identity(dim),
            )
        }
        (Sign::Minus, Sign::Plus) => {
            let a = random_hermitian(half, rng);
            let m = complex(rng, half);
            let b = (&m - &m.transpose()).scale_real(0.5);
            (block2(&a, &b, &-&b.conj(), &a.conj()), omega)
        }
        (Sign::Minus, Sign::Minus) => {
            let a = random_hermitian(half, rng);
            let m = complex(rng, half);
            let b = (&m + &m.transpose()).scale_real(0.5);
            (block2(&a, &b, &b.adjoint(), &-&a.conj()), omega)
        }
    };
    let w = random_unitary(dim, rng);
    let d = &(&w * &d) * &w.adjoint();
    let c = &(&w * &c) * &w.transpose();
    (d, AntiUnitary::new(c).unwrap())
}

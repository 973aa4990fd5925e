//! The smooth noncommutative torus: finitely supported Fourier series in the
//! unitaries `U_1..U_n` with `U_j U_k = e^{2πiθ_jk} U_k U_j`.
//!
//! Monomials are ordered, `U^p := U_1^{p_1} ⋯ U_n^{p_n}`, which gives
//! `U^p U^q = e^{2πi φ(p,q)} U^{p+q}` with `φ(p,q) = Σ_{j>k} θ_jk p_j q_k`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::linalg::{C64, ONE, ZERO};
use crate::sparse::SparseMatrix;

pub type LatticePoint = Vec<i64>;

/// Antisymmetry tolerance applied when a θ-matrix is loaded.
pub const ANTISYMMETRY_TOL: f64 = 1e-12;

/// Unimodularity tolerance for torus group elements.
pub const UNIMODULAR_TOL: f64 = 1e-9;

/// Antisymmetric real matrix of deformation angles, in full turns.
#[derive(Clone, Debug, PartialEq)]
pub struct ThetaMatrix {
    n: usize,
    entries: Vec<f64>,
}

impl ThetaMatrix {
    pub fn zero(n: usize) -> Self {
        Self {
            n,
            entries: vec![0.0; n * n],
        }
    }

    /// The two-dimensional case `UV = e^{2πiθ} VU`.
    pub fn two_dim(theta: f64) -> Self {
        Self {
            n: 2,
            entries: vec![0.0, theta, -theta, 0.0],
        }
    }

    /// Row-major `n × n` entries, validated for antisymmetry.
    pub fn from_row_major(n: usize, entries: Vec<f64>) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                actual: entries.len(),
            });
        }
        for j in 0..n {
            if entries[j * n + j].abs() > ANTISYMMETRY_TOL {
                return Err(Error::InvalidArgument(format!("theta[{j}][{j}] must vanish")));
            }
            for k in 0..j {
                if (entries[j * n + k] + entries[k * n + j]).abs() > ANTISYMMETRY_TOL {
                    return Err(Error::InvalidArgument(format!(
                        "theta is not antisymmetric at ({j}, {k})"
                    )));
                }
            }
        }
        Ok(Self { n, entries })
    }

    /// From the strictly upper triangle `θ_12, θ_13, …, θ_{n-1,n}` (row by row).
    pub fn from_upper(n: usize, upper: &[f64]) -> Result<Self> {
        let expected = n * n.saturating_sub(1) / 2;
        if upper.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                actual: upper.len(),
            });
        }
        let mut entries = vec![0.0; n * n];
        let mut it = upper.iter();
        for j in 0..n {
            for k in (j + 1)..n {
                let v = *it.next().expect("length checked");
                entries[j * n + k] = v;
                entries[k * n + j] = -v;
            }
        }
        Ok(Self { n, entries })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, j: usize, k: usize) -> f64 {
        self.entries[j * self.n + k]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    /// `φ(p, q) = Σ_{j>k} θ_jk p_j q_k`.
    pub fn product_phase(&self, p: &[i64], q: &[i64]) -> f64 {
        let mut acc = 0.0;
        for (j, &pj) in p.iter().enumerate().take(self.n) {
            if pj == 0 {
                continue;
            }
            for (k, &qk) in q.iter().enumerate().take(j) {
                acc += self.get(j, k) * (pj * qk) as f64;
            }
        }
        acc
    }

    /// Short stable hash of the entries, for reports.
    pub fn fingerprint(&self) -> String {
        let mut h = Sha256::new();
        h.update((self.n as u64).to_le_bytes());
        for e in &self.entries {
            h.update(e.to_le_bytes());
        }
        let digest = h.finalize();
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&self.entries)?)
    }

    /// Accepts a flat row-major array of `n²` floats or a nested `n × n` array.
    pub fn from_json(s: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(s)?;
        let arr = value
            .as_array()
            .ok_or_else(|| Error::Parse("theta must be a JSON array".into()))?;
        let flat: Vec<f64> = if arr.iter().all(|v| v.is_array()) {
            arr.iter()
                .flat_map(|row| row.as_array().cloned().unwrap_or_default())
                .map(|v| {
                    v.as_f64()
                        .ok_or_else(|| Error::Parse("theta entries must be numbers".into()))
                })
                .collect::<Result<_>>()?
        } else {
            arr.iter()
                .map(|v| {
                    v.as_f64()
                        .ok_or_else(|| Error::Parse("theta entries must be numbers".into()))
                })
                .collect::<Result<_>>()?
        };
        let n = (flat.len() as f64).sqrt().round() as usize;
        if n * n != flat.len() || n == 0 {
            return Err(Error::Parse(format!("theta has {} entries, not a square", flat.len())));
        }
        Self::from_row_major(n, flat)
    }
}

/// Finitely supported Fourier series `Σ a_p U^p`. Zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq)]
pub struct FourierElement {
    n: usize,
    coeffs: BTreeMap<LatticePoint, C64>,
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    p: Vec<i64>,
    re: f64,
    im: f64,
}

#[derive(Serialize, Deserialize)]
struct ElementJson {
    n: usize,
    terms: Vec<TermJson>,
}

impl FourierElement {
    pub fn zero(n: usize) -> Self {
        Self {
            n,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::monomial(vec![0; n], ONE)
    }

    pub fn monomial(p: LatticePoint, c: C64) -> Self {
        let mut e = Self::zero(p.len());
        e.add_term(p, c);
        e
    }

    /// The generator `U_j` (0-based direction index).
    pub fn generator(n: usize, j: usize) -> Self {
        let mut p = vec![0; n];
        p[j] = 1;
        Self::monomial(p, ONE)
    }

    pub fn from_terms(n: usize, terms: impl IntoIterator<Item = (LatticePoint, C64)>) -> Result<Self> {
        let mut e = Self::zero(n);
        for (p, c) in terms {
            if p.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    actual: p.len(),
                });
            }
            e.add_term(p, c);
        }
        Ok(e)
    }

    fn add_term(&mut self, p: LatticePoint, c: C64) {
        use std::collections::btree_map::Entry;
        match self.coeffs.entry(p) {
            Entry::Vacant(slot) => {
                if c != ZERO {
                    slot.insert(c);
                }
            }
            Entry::Occupied(mut slot) => {
                *slot.get_mut() += c;
                if *slot.get() == ZERO {
                    slot.remove();
                }
            }
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coeff(&self, p: &[i64]) -> C64 {
        self.coeffs.get(p).copied().unwrap_or(ZERO)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&LatticePoint, &C64)> {
        self.coeffs.iter()
    }

    pub fn support_len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `max_p max_j |p_j|` over the support; 0 for the zero element.
    pub fn radius(&self) -> i64 {
        self.coeffs
            .keys()
            .flat_map(|p| p.iter().map(|x| x.abs()))
            .max()
            .unwrap_or(0)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (p, c) in &other.coeffs {
            out.add_term(p.clone(), *c);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-ONE))
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut out = Self::zero(self.n);
        for (p, c) in &self.coeffs {
            out.add_term(p.clone(), c * s);
        }
        out
    }

    /// Largest coefficient distance to `other` over the union of supports.
    pub fn max_deviation(&self, other: &Self) -> f64 {
        self.sub(other).coeffs.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn to_json(&self) -> Result<String> {
        let doc = ElementJson {
            n: self.n,
            terms: self
                .coeffs
                .iter()
                .map(|(p, c)| TermJson {
                    p: p.clone(),
                    re: c.re,
                    im: c.im,
                })
                .collect(),
        };
        Ok(serde_json::to_string(&doc)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let doc: ElementJson = serde_json::from_str(s)?;
        Self::from_terms(doc.n, doc.terms.into_iter().map(|t| (t.p, C64::new(t.re, t.im))))
    }
}

fn check_dims(a: &FourierElement, theta: &ThetaMatrix) -> Result<()> {
    if a.n != theta.n {
        return Err(Error::DimensionMismatch {
            expected: theta.n,
            actual: a.n,
        });
    }
    Ok(())
}

fn cis(turns: f64) -> C64 {
    C64::from_polar(1.0, 2.0 * PI * turns)
}

pub fn multiply(a: &FourierElement, b: &FourierElement, theta: &ThetaMatrix) -> Result<FourierElement> {
    check_dims(a, theta)?;
    check_dims(b, theta)?;
    let mut out = FourierElement::zero(a.n);
    for (p, x) in &a.coeffs {
        for (q, y) in &b.coeffs {
            let sum: LatticePoint = p.iter().zip(q).map(|(s, t)| s + t).collect();
            out.add_term(sum, x * y * cis(theta.product_phase(p, q)));
        }
    }
    Ok(out)
}

/// `a*`. The adjoint of `U^p` is the reversed word `U_n^{-p_n} ⋯ U_1^{-p_1}`,
/// which is multiplied back into ordered form one factor at a time.
pub fn adjoint(a: &FourierElement, theta: &ThetaMatrix) -> Result<FourierElement> {
    check_dims(a, theta)?;
    let n = a.n;
    let mut out = FourierElement::zero(n);
    for (p, c) in &a.coeffs {
        let mut word = FourierElement::identity(n);
        for j in (0..n).rev() {
            let mut q = vec![0; n];
            q[j] = -p[j];
            word = multiply(&word, &FourierElement::monomial(q, ONE), theta)?;
        }
        for (q, w) in word.coeffs {
            out.add_term(q, w * c.conj());
        }
    }
    Ok(out)
}

/// `∂_j(Σ a_p U^p) = Σ 2πi p_j a_p U^p` (0-based direction).
pub fn derivation(j: usize, a: &FourierElement) -> Result<FourierElement> {
    if j >= a.n {
        return Err(Error::InvalidArgument(format!(
            "direction {j} out of range for n = {}",
            a.n
        )));
    }
    let mut out = FourierElement::zero(a.n);
    for (p, c) in &a.coeffs {
        out.add_term(p.clone(), c * C64::new(0.0, 2.0 * PI * p[j] as f64));
    }
    Ok(out)
}

/// The invariant trace: the coefficient at the origin.
pub fn trace(a: &FourierElement) -> C64 {
    a.coeff(&vec![0; a.n])
}

/// The torus action `α_z(U^p) = z^p U^p`.
pub fn act(z: &[C64], a: &FourierElement) -> Result<FourierElement> {
    check_torus_element(z, a.n)?;
    let mut out = FourierElement::zero(a.n);
    for (p, c) in &a.coeffs {
        out.add_term(p.clone(), c * character(z, p));
    }
    Ok(out)
}

/// `z^p = Π z_j^{p_j}` for unimodular `z`.
pub fn character(z: &[C64], p: &[i64]) -> C64 {
    z.iter().zip(p).map(|(zj, &pj)| zj.powi(pj as i32)).product()
}

fn check_torus_element(z: &[C64], n: usize) -> Result<()> {
    if z.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: z.len(),
        });
    }
    if let Some(bad) = z.iter().find(|zj| (zj.norm() - 1.0).abs() > UNIMODULAR_TOL) {
        return Err(Error::InvalidArgument(format!("torus element {bad} is not unimodular")));
    }
    Ok(())
}

/// The component of `a` in the spectral subspace of the character `ℓ`.
pub fn isotypic_projection(a: &FourierElement, ell: &[i64]) -> FourierElement {
    let c = a.coeff(ell);
    if c == ZERO {
        FourierElement::zero(a.n)
    } else {
        FourierElement::monomial(ell.to_vec(), c)
    }
}

/// `τ(a⁰ (∂₁a¹ ∂₂a² − ∂₂a¹ ∂₁a²))` on the two-dimensional torus.
pub fn cyclic_cocycle_2d(
    a0: &FourierElement,
    a1: &FourierElement,
    a2: &FourierElement,
    theta: &ThetaMatrix,
) -> Result<C64> {
    if theta.n != 2 {
        return Err(Error::InvalidArgument(format!(
            "the cyclic 2-cocycle is defined for n = 2, got n = {}",
            theta.n
        )));
    }
    let d1a1 = derivation(0, a1)?;
    let d2a1 = derivation(1, a1)?;
    let d1a2 = derivation(0, a2)?;
    let d2a2 = derivation(1, a2)?;
    let inner = multiply(&d1a1, &d2a2, theta)?.sub(&multiply(&d2a1, &d1a2, theta)?);
    Ok(trace(&multiply(a0, &inner, theta)?))
}

/// The box `{p : |p_j| ≤ N}` with a lexicographic bijection onto `0..(2N+1)^n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedGNS {
    n: usize,
    radius: i64,
    side: usize,
    dim: usize,
}

impl TruncatedGNS {
    pub fn new(n: usize, radius: i64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("lattice dimension must be positive".into()));
        }
        if radius < 0 {
            return Err(Error::InvalidArgument("truncation radius must be nonnegative".into()));
        }
        let side = (2 * radius + 1) as usize;
        let dim = side
            .checked_pow(n as u32)
            .ok_or_else(|| Error::InvalidArgument("truncated space too large".into()))?;
        Ok(Self { n, radius, side, dim })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn radius(&self) -> i64 {
        self.radius
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn index_of(&self, p: &[i64]) -> Option<usize> {
        if p.len() != self.n || p.iter().any(|x| x.abs() > self.radius) {
            return None;
        }
        Some(
            p.iter()
                .fold(0usize, |acc, &x| acc * self.side + (x + self.radius) as usize),
        )
    }

    pub fn point(&self, mut idx: usize) -> LatticePoint {
        assert!(idx < self.dim, "basis index out of range");
        let mut p = vec![0; self.n];
        for j in (0..self.n).rev() {
            p[j] = (idx % self.side) as i64 - self.radius;
            idx /= self.side;
        }
        p
    }

    pub fn points(&self) -> impl Iterator<Item = LatticePoint> + '_ {
        (0..self.dim).map(|i| self.point(i))
    }

    /// Indices of basis vectors `δ_p` with `max_j |p_j| ≤ N - margin`.
    pub fn interior(&self, margin: i64) -> Vec<usize> {
        let r = self.radius - margin;
        if r < 0 {
            return Vec::new();
        }
        (0..self.dim)
            .filter(|&i| self.point(i).iter().all(|x| x.abs() <= r))
            .collect()
    }

    /// Interior indices lifted to `ℋ₀ ⊗ C^spinor`.
    pub fn interior_with_spinor(&self, margin: i64, spinor: usize) -> Vec<usize> {
        self.interior(margin)
            .into_iter()
            .flat_map(|i| (0..spinor).map(move |s| i * spinor + s))
            .collect()
    }

    pub(crate) fn check_radius(&self, a: &FourierElement) -> Result<()> {
        if a.n != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                actual: a.n,
            });
        }
        if a.radius() > self.radius {
            return Err(Error::RadiusExceedsTruncation {
                radius: a.radius(),
                truncation: self.radius,
            });
        }
        Ok(())
    }
}

/// Left multiplication `[a'] ↦ [a a']`, cut to the box.
pub fn gns_operator(a: &FourierElement, h: &TruncatedGNS, theta: &ThetaMatrix) -> Result<SparseMatrix> {
    h.check_radius(a)?;
    check_dims(a, theta)?;
    let mut trip = Vec::with_capacity(h.dim * a.support_len());
    for col in 0..h.dim {
        let p = h.point(col);
        for (q, c) in &a.coeffs {
            let target: LatticePoint = q.iter().zip(&p).map(|(x, y)| x + y).collect();
            if let Some(row) = h.index_of(&target) {
                trip.push((row, col, c * cis(theta.product_phase(q, &p))));
            }
        }
    }
    Ok(SparseMatrix::from_triplets(h.dim, h.dim, trip))
}

/// Right multiplication `[c] ↦ [c b]`, cut to the box.
pub fn right_multiplication(b: &FourierElement, h: &TruncatedGNS, theta: &ThetaMatrix) -> Result<SparseMatrix> {
    h.check_radius(b)?;
    check_dims(b, theta)?;
    let mut trip = Vec::with_capacity(h.dim * b.support_len());
    for col in 0..h.dim {
        let p = h.point(col);
        for (q, c) in &b.coeffs {
            let target: LatticePoint = p.iter().zip(q).map(|(x, y)| x + y).collect();
            if let Some(row) = h.index_of(&target) {
                trip.push((row, col, c * cis(theta.product_phase(&p, q))));
            }
        }
    }
    Ok(SparseMatrix::from_triplets(h.dim, h.dim, trip))
}

/// The diagonal unitary `δ_p ↦ z^p δ_p` implementing the torus action.
pub fn torus_unitary(z: &[C64], h: &TruncatedGNS) -> Result<SparseMatrix> {
    check_torus_element(z, h.n)?;
    let diag: Vec<C64> = h.points().map(|p| character(z, &p)).collect();
    Ok(SparseMatrix::from_diagonal(&diag))
}

/// The infinitesimal generator `∂_j = diag(2πi p_j)` on the box (0-based direction).
pub fn generator_operator(j: usize, h: &TruncatedGNS) -> Result<SparseMatrix> {
    if j >= h.n {
        return Err(Error::InvalidArgument(format!(
            "direction {j} out of range for n = {}",
            h.n
        )));
    }
    let diag: Vec<C64> = h.points().map(|p| C64::new(0.0, 2.0 * PI * p[j] as f64)).collect();
    Ok(SparseMatrix::from_diagonal(&diag))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uv(theta: f64) -> (FourierElement, FourierElement, ThetaMatrix) {
        (
            FourierElement::generator(2, 0),
            FourierElement::generator(2, 1),
            ThetaMatrix::two_dim(theta),
        )
    }

    #[test]
    fn commutation_relation_uv() {
        let theta = 0.3;
        let (u, v, th) = uv(theta);
        let vu = multiply(&v, &u, &th).unwrap();
        assert_eq!(vu.support_len(), 1);
        assert!((vu.coeff(&[1, 1]) - cis(-theta)).norm() < 1e-15);
        let uv = multiply(&u, &v, &th).unwrap();
        assert!(uv.max_deviation(&vu.scale(cis(theta))) < 1e-15);
    }

    #[test]
    fn adjoint_of_monomial_is_inverse() {
        let th = ThetaMatrix::from_upper(3, &[0.1, 0.27, -0.4]).unwrap();
        let a = FourierElement::monomial(vec![2, -1, 3], C64::new(0.3, 0.4));
        let prod = multiply(&a, &adjoint(&a, &th).unwrap(), &th).unwrap();
        assert!(prod.max_deviation(&FourierElement::identity(3).scale(C64::new(0.25, 0.0))) < 1e-14);
    }

    #[test]
    fn derivation_and_trace_basics() {
        let (u, _, _) = uv(0.0);
        assert!(
            derivation(0, &u)
                .unwrap()
                .max_deviation(&u.scale(C64::new(0.0, 2.0 * PI)))
                < 1e-15
        );
        assert!(derivation(1, &FourierElement::identity(2)).unwrap().is_zero());
        assert!(derivation(2, &u).is_err());
        assert_eq!(trace(&FourierElement::identity(2)), ONE);
        assert_eq!(trace(&u), ZERO);
    }

    #[test]
    fn theta_validation() {
        assert!(ThetaMatrix::from_row_major(2, vec![0.0, 0.3, 0.3, 0.0]).is_err());
        assert!(ThetaMatrix::from_row_major(2, vec![0.1, 0.3, -0.3, 0.0]).is_err());
        let t = ThetaMatrix::from_json("[[0, 0.3], [-0.3, 0]]").unwrap();
        assert_eq!(t, ThetaMatrix::two_dim(0.3));
        assert_eq!(ThetaMatrix::from_json("[0, 0.3, -0.3, 0]").unwrap(), t);
        assert!(ThetaMatrix::from_json("[0, 0.3, 0.3]").is_err());
        assert_eq!(t.fingerprint().len(), 16);
        assert_ne!(t.fingerprint(), ThetaMatrix::two_dim(0.31).fingerprint());
    }

    #[test]
    fn gns_box_bijection() {
        let h = TruncatedGNS::new(3, 2).unwrap();
        assert_eq!(h.dim(), 125);
        for i in 0..h.dim() {
            assert_eq!(h.index_of(&h.point(i)), Some(i));
        }
        assert_eq!(h.index_of(&[3, 0, 0]), None);
        assert_eq!(h.interior(2).len(), 1);
        assert!(h.interior(3).is_empty());
    }

    #[test]
    fn gns_rejects_large_radius() {
        let h = TruncatedGNS::new(2, 1).unwrap();
        let a = FourierElement::monomial(vec![2, 0], ONE);
        assert!(matches!(
            gns_operator(&a, &h, &ThetaMatrix::zero(2)),
            Err(Error::RadiusExceedsTruncation { .. })
        ));
    }

    #[test]
    fn torus_unitary_rejects_non_unimodular() {
        let h = TruncatedGNS::new(2, 1).unwrap();
        assert!(torus_unitary(&[C64::new(1.1, 0.0), ONE], &h).is_err());
        assert_eq!(torus_unitary(&[ONE, ONE], &h).unwrap(), SparseMatrix::identity(9));
    }

    #[test]
    fn element_json_format() {
        let a = FourierElement::from_terms(2, [(vec![1, 0], ONE), (vec![0, -1], C64::new(0.0, 2.0))]).unwrap();
        let json = a.to_json().unwrap();
        assert_eq!(
            json,
            r#"{"n":2,"terms":[{"p":[0,-1],"re":0.0,"im":2.0},{"p":[1,0],"re":1.0,"im":0.0}]}"#
        );
        assert_eq!(FourierElement::from_json(&json).unwrap(), a);
        assert!(FourierElement::from_json(r#"{"n":2,"terms":[{"p":[1],"re":1,"im":0}]}"#).is_err());
    }

    #[test]
    fn cocycle_needs_two_dimensions() {
        let th = ThetaMatrix::zero(3);
        let one = FourierElement::identity(3);
        assert!(cyclic_cocycle_2d(&one, &one, &one, &th).is_err());
    }
}

//! Compressed-sparse-row complex matrices for operators on the truncated
//! Hilbert space. Shift operators and block-diagonal operators have a handful
//! of nonzeros per row, so products stay cheap even at a few thousand rows.

use std::ops::{Add, Mul, Sub};

use crate::linalg::{vec_norm, ComplexMatrix, C64, ONE, ZERO};

#[derive(Clone, Debug, PartialEq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<C64>,
}

impl SparseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            indptr: vec![0; rows + 1],
            indices: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_diagonal(&vec![ONE; n])
    }

    pub fn from_diagonal(diag: &[C64]) -> Self {
        Self::from_triplets(diag.len(), diag.len(), diag.iter().enumerate().map(|(i, &v)| (i, i, v)))
    }

    /// Duplicate entries are summed; exact zeros are dropped.
    pub fn from_triplets(rows: usize, cols: usize, triplets: impl IntoIterator<Item = (usize, usize, C64)>) -> Self {
        let mut trip: Vec<(usize, usize, C64)> = triplets.into_iter().collect();
        for &(i, j, _) in &trip {
            assert!(i < rows && j < cols, "triplet ({i}, {j}) out of bounds {rows}x{cols}");
        }
        trip.sort_by_key(|&(i, j, _)| (i, j));
        let mut indptr = vec![0; rows + 1];
        let mut indices = Vec::with_capacity(trip.len());
        let mut values = Vec::with_capacity(trip.len());
        let mut k = 0;
        while k < trip.len() {
            let (i, j, mut v) = trip[k];
            k += 1;
            while k < trip.len() && trip[k].0 == i && trip[k].1 == j {
                v += trip[k].2;
                k += 1;
            }
            if v != ZERO {
                indices.push(j);
                values.push(v);
                indptr[i + 1] += 1;
            }
        }
        for r in 0..rows {
            indptr[r + 1] += indptr[r];
        }
        Self {
            rows,
            cols,
            indptr,
            indices,
            values,
        }
    }

    pub fn from_dense(m: &ComplexMatrix) -> Self {
        Self::from_triplets(
            m.rows(),
            m.cols(),
            (0..m.rows())
                .flat_map(|i| (0..m.cols()).map(move |j| (i, j)))
                .map(|(i, j)| (i, j, m[(i, j)])),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, C64)> + '_ {
        let range = self.indptr[i]..self.indptr[i + 1];
        self.indices[range.clone()]
            .iter()
            .copied()
            .zip(self.values[range].iter().copied())
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        (0..self.rows).flat_map(move |i| self.row(i).map(move |(j, v)| (i, j, v)))
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        let range = self.indptr[i]..self.indptr[i + 1];
        match self.indices[range.clone()].binary_search(&j) {
            Ok(k) => self.values[range.start + k],
            Err(_) => ZERO,
        }
    }

    pub fn to_dense(&self) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(self.rows, self.cols);
        for (i, j, v) in self.triplets() {
            m[(i, j)] = v;
        }
        m
    }

    pub fn adjoint(&self) -> Self {
        Self::from_triplets(self.cols, self.rows, self.triplets().map(|(i, j, v)| (j, i, v.conj())))
    }

    pub fn transpose(&self) -> Self {
        Self::from_triplets(self.cols, self.rows, self.triplets().map(|(i, j, v)| (j, i, v)))
    }

    pub fn conj(&self) -> Self {
        Self {
            values: self.values.iter().map(|v| v.conj()).collect(),
            ..self.clone()
        }
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::from_triplets(self.rows, self.cols, self.triplets().map(|(i, j, v)| (i, j, v * s)))
    }

    /// `self ⊗ small` with `small` dense.
    pub fn kron_dense(&self, small: &ComplexMatrix) -> Self {
        let (r, c) = (small.rows(), small.cols());
        let mut indptr = Vec::with_capacity(self.rows * r + 1);
        let mut indices = Vec::new();
        let mut values = Vec::new();
        indptr.push(0);
        for i in 0..self.rows {
            for a in 0..r {
                for (j, v) in self.row(i) {
                    for b in 0..c {
                        let s = small[(a, b)];
                        if s != ZERO {
                            indices.push(j * c + b);
                            values.push(v * s);
                        }
                    }
                }
                indptr.push(indices.len());
            }
        }
        Self {
            rows: self.rows * r,
            cols: self.cols * c,
            indptr,
            indices,
            values,
        }
    }

    pub fn matvec(&self, x: &[C64]) -> Vec<C64> {
        assert_eq!(x.len(), self.cols, "matvec dimension");
        (0..self.rows)
            .map(|i| self.row(i).map(|(j, v)| v * x[j]).sum())
            .collect()
    }

    pub fn commutator(&self, other: &Self) -> Self {
        &(self * other) - &(other * self)
    }

    pub fn anticommutator(&self, other: &Self) -> Self {
        &(self * other) + &(other * self)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Largest Euclidean norm among the selected columns, i.e. the sup of
    /// `‖A δ_j‖` over the given basis vectors.
    pub fn max_column_norm(&self, columns: &[usize]) -> f64 {
        let mut sq = vec![0.0f64; self.cols];
        for (_, j, v) in self.triplets() {
            sq[j] += v.norm_sqr();
        }
        columns.iter().map(|&j| sq[j].sqrt()).fold(0.0, f64::max)
    }

    /// Keeps only the selected columns, in the given order.
    pub fn select_columns(&self, columns: &[usize]) -> Self {
        let mut remap = vec![usize::MAX; self.cols];
        for (new, &old) in columns.iter().enumerate() {
            remap[old] = new;
        }
        Self::from_triplets(
            self.rows,
            columns.len(),
            self.triplets()
                .filter(|&(_, j, _)| remap[j] != usize::MAX)
                .map(|(i, j, v)| (i, remap[j], v)),
        )
    }

    /// Largest singular value by power iteration on `A†A`.
    ///
    /// The start vector is deterministic. Iteration stops when the Rayleigh
    /// quotient changes by less than `1e-15` relative, or after `max_iter` steps.
    pub fn largest_singular_value(&self, max_iter: usize) -> f64 {
        if self.nnz() == 0 || self.cols == 0 {
            return 0.0;
        }
        let adj = self.adjoint();
        let mut x: Vec<C64> = (0..self.cols)
            .map(|k| C64::new(1.0 + 0.1 * ((k as f64) * 0.7).sin(), 0.05 * ((k as f64) * 1.3).cos()))
            .collect();
        let n0 = vec_norm(&x);
        x.iter_mut().for_each(|v| *v /= n0);
        let mut last = 0.0;
        for _ in 0..max_iter {
            let y = adj.matvec(&self.matvec(&x));
            let rq: f64 = x.iter().zip(&y).map(|(a, b)| (a.conj() * b).re).sum();
            let ny = vec_norm(&y);
            if ny == 0.0 {
                return 0.0;
            }
            x = y.into_iter().map(|v| v / ny).collect();
            if (rq - last).abs() <= 1e-15 * rq.abs() {
                return rq.max(0.0).sqrt();
            }
            last = rq;
        }
        last.max(0.0).sqrt()
    }
}

impl Mul for &SparseMatrix {
    type Output = SparseMatrix;
    fn mul(self, rhs: &SparseMatrix) -> SparseMatrix {
        assert_eq!(self.cols, rhs.rows, "sparse product dimension");
        let mut indptr = Vec::with_capacity(self.rows + 1);
        let mut indices = Vec::new();
        let mut values = Vec::new();
        let mut acc = vec![ZERO; rhs.cols];
        let mut touched = vec![false; rhs.cols];
        let mut cols_hit: Vec<usize> = Vec::new();
        indptr.push(0);
        for i in 0..self.rows {
            for (k, a) in self.row(i) {
                for (j, b) in rhs.row(k) {
                    if !touched[j] {
                        touched[j] = true;
                        cols_hit.push(j);
                    }
                    acc[j] += a * b;
                }
            }
            cols_hit.sort_unstable();
            for &j in &cols_hit {
                if acc[j] != ZERO {
                    indices.push(j);
                    values.push(acc[j]);
                }
                acc[j] = ZERO;
                touched[j] = false;
            }
            cols_hit.clear();
            indptr.push(indices.len());
        }
        SparseMatrix {
            rows: self.rows,
            cols: rhs.cols,
            indptr,
            indices,
            values,
        }
    }
}

fn combine(a: &SparseMatrix, b: &SparseMatrix, sign: f64) -> SparseMatrix {
    assert_eq!((a.rows, a.cols), (b.rows, b.cols), "sparse shape mismatch");
    let mut indptr = Vec::with_capacity(a.rows + 1);
    let mut indices = Vec::with_capacity(a.nnz() + b.nnz());
    let mut values = Vec::with_capacity(a.nnz() + b.nnz());
    indptr.push(0);
    for i in 0..a.rows {
        let mut push = |j: usize, v: C64| {
            if v != ZERO {
                indices.push(j);
                values.push(v);
            }
        };
        let mut ra = a.row(i).peekable();
        let mut rb = b.row(i).map(|(j, v)| (j, v * sign)).peekable();
        loop {
            match (ra.peek().copied(), rb.peek().copied()) {
                (Some((ja, va)), Some((jb, vb))) => {
                    if ja < jb {
                        push(ja, va);
                        ra.next();
                    } else if jb < ja {
                        push(jb, vb);
                        rb.next();
                    } else {
                        push(ja, va + vb);
                        ra.next();
                        rb.next();
                    }
                }
                (Some((ja, va)), None) => {
                    push(ja, va);
                    ra.next();
                }
                (None, Some((jb, vb))) => {
                    push(jb, vb);
                    rb.next();
                }
                (None, None) => break,
            }
        }
        indptr.push(indices.len());
    }
    SparseMatrix {
        rows: a.rows,
        cols: a.cols,
        indptr,
        indices,
        values,
    }
}

impl Add for &SparseMatrix {
    type Output = SparseMatrix;
    fn add(self, rhs: &SparseMatrix) -> SparseMatrix {
        combine(self, rhs, 1.0)
    }
}

impl Sub for &SparseMatrix {
    type Output = SparseMatrix;
    fn sub(self, rhs: &SparseMatrix) -> SparseMatrix {
        combine(self, rhs, -1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::I;

    fn sample() -> ComplexMatrix {
        ComplexMatrix::from_fn(4, 3, |i, j| {
            if (i + j) % 2 == 0 {
                C64::new(i as f64 - 1.0, j as f64 * 0.5)
            } else {
                ZERO
            }
        })
    }

    #[test]
    fn dense_round_trip_and_products_agree() {
        let a = sample();
        let b = a.adjoint();
        let sa = SparseMatrix::from_dense(&a);
        let sb = SparseMatrix::from_dense(&b);
        assert_eq!(sa.to_dense(), a);
        assert!((&sa * &sb).to_dense().approx_eq(&(&a * &b), 1e-14));
        assert!(sa.adjoint().to_dense().approx_eq(&b, 1e-15));
        let k = ComplexMatrix::from_row_major(2, 2, vec![ZERO, -I, I, ZERO]).unwrap();
        assert!(sa.kron_dense(&k).to_dense().approx_eq(&a.kron(&k), 1e-15));
    }

    #[test]
    fn duplicates_summed_and_cancellations_dropped() {
        let m = SparseMatrix::from_triplets(2, 2, [(0, 0, ONE), (0, 0, -ONE), (1, 0, ONE), (1, 0, ONE)]);
        assert_eq!(m.nnz(), 1);
        assert_eq!(m.get(1, 0), C64::new(2.0, 0.0));
        assert_eq!(m.get(0, 0), ZERO);
    }

    #[test]
    fn column_norm_and_selection() {
        let m = SparseMatrix::from_triplets(
            2,
            3,
            [(0, 0, C64::new(3.0, 0.0)), (1, 0, C64::new(0.0, 4.0)), (1, 2, ONE)],
        );
        assert!((m.max_column_norm(&[0]) - 5.0).abs() < 1e-15);
        assert!((m.max_column_norm(&[1, 2]) - 1.0).abs() < 1e-15);
        let s = m.select_columns(&[2, 0]);
        assert_eq!(s.cols(), 2);
        assert_eq!(s.get(1, 0), ONE);
    }

    #[test]
    fn power_iteration_matches_dense_norm() {
        let a = sample();
        let dense = a.operator_norm().unwrap();
        let sparse = SparseMatrix::from_dense(&a).largest_singular_value(10_000);
        assert!((dense - sparse).abs() < 1e-9, "{dense} vs {sparse}");
    }
}

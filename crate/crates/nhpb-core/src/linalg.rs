//! Dense complex matrices and linear solves.
//!
//! Everything in this crate works on small dense matrices: excitation
//! manifolds are at most 9 states wide, and the master-equation
//! superoperators stay in the low thousands of rows. A row-major `Vec`
//! backed matrix with an LU solve (partially pivoted, rayon-parallel
//! trailing updates for large systems) covers all of it.

pub use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Row-major dense complex matrix.
#[derive(Clone, PartialEq)]
pub struct CMatrix {
    nrows: usize,
    ncols: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        CMatrix { nrows, ncols, data: vec![C64::new(0.0, 0.0); nrows * ncols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    /// Builds from a nested row list; all rows must have equal length.
    pub fn from_rows(rows: &[Vec<C64>]) -> Self {
        let nrows = rows.len();
        let ncols = if nrows == 0 { 0 } else { rows[0].len() };
        let mut data = Vec::with_capacity(nrows * ncols);
        for r in rows {
            assert_eq!(r.len(), ncols, "ragged row list");
            data.extend_from_slice(r);
        }
        CMatrix { nrows, ncols, data }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn is_square(&self) -> bool {
        self.nrows == self.ncols
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.ncols..(i + 1) * self.ncols]
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn transpose(&self) -> CMatrix {
        let mut t = CMatrix::zeros(self.ncols, self.nrows);
        for i in 0..self.nrows {
            for j in 0..self.ncols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn adjoint(&self) -> CMatrix {
        let mut t = CMatrix::zeros(self.ncols, self.nrows);
        for i in 0..self.nrows {
            for j in 0..self.ncols {
                t[(j, i)] = self[(i, j)].conj();
            }
        }
        t
    }

    pub fn mul(&self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.ncols, rhs.nrows, "dimension mismatch in matrix product");
        let mut out = CMatrix::zeros(self.nrows, rhs.ncols);
        for i in 0..self.nrows {
            for k in 0..self.ncols {
                let a = self[(i, k)];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                let rk = rhs.row(k);
                let oi = &mut out.data[i * rhs.ncols..(i + 1) * rhs.ncols];
                for (o, r) in oi.iter_mut().zip(rk.iter()) {
                    *o += a * r;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.ncols, v.len(), "dimension mismatch in matrix-vector product");
        (0..self.nrows)
            .map(|i| self.row(i).iter().zip(v.iter()).map(|(a, x)| a * x).sum())
            .collect()
    }

    pub fn scale(&self, c: C64) -> CMatrix {
        let mut m = self.clone();
        for x in &mut m.data {
            *x *= c;
        }
        m
    }

    pub fn add(&self, rhs: &CMatrix) -> CMatrix {
        assert_eq!((self.nrows, self.ncols), (rhs.nrows, rhs.ncols));
        let mut m = self.clone();
        for (x, y) in m.data.iter_mut().zip(rhs.data.iter()) {
            *x += y;
        }
        m
    }

    pub fn sub(&self, rhs: &CMatrix) -> CMatrix {
        assert_eq!((self.nrows, self.ncols), (rhs.nrows, rhs.ncols));
        let mut m = self.clone();
        for (x, y) in m.data.iter_mut().zip(rhs.data.iter()) {
            *x -= y;
        }
        m
    }

    /// `self + c * I`; square matrices only.
    pub fn add_scaled_identity(&self, c: C64) -> CMatrix {
        assert!(self.is_square());
        let mut m = self.clone();
        for i in 0..self.nrows {
            m[(i, i)] += c;
        }
        m
    }

    pub fn trace(&self) -> C64 {
        assert!(self.is_square());
        (0..self.nrows).map(|i| self[(i, i)]).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn fro_norm(&self) -> f64 {
        self.data.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest |a_ij - a_ji| over the strict upper triangle.
    pub fn max_asymmetry(&self) -> f64 {
        assert!(self.is_square());
        let mut worst = 0.0f64;
        for i in 0..self.nrows {
            for j in (i + 1)..self.ncols {
                worst = worst.max((self[(i, j)] - self[(j, i)]).norm());
            }
        }
        worst
    }

    /// Replaces the matrix by its symmetric part (a + a^T)/2.
    pub fn symmetrize(&mut self) {
        for i in 0..self.nrows {
            for j in (i + 1)..self.ncols {
                let m = (self[(i, j)] + self[(j, i)]) * 0.5;
                self[(i, j)] = m;
                self[(j, i)] = m;
            }
        }
    }

    /// Kronecker product, row-major convention:
    /// `(A ⊗ B)[(i*p + k), (j*q + l)] = A[i,j] * B[k,l]` for `B` of shape `p×q`.
    pub fn kron(&self, b: &CMatrix) -> CMatrix {
        let (p, q) = (b.nrows, b.ncols);
        let mut out = CMatrix::zeros(self.nrows * p, self.ncols * q);
        for i in 0..self.nrows {
            for j in 0..self.ncols {
                let a = self[(i, j)];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for k in 0..p {
                    for l in 0..q {
                        out[(i * p + k, j * q + l)] = a * b[(k, l)];
                    }
                }
            }
        }
        out
    }
}

impl std::ops::Index<(usize, usize)> for CMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.ncols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.ncols + j]
    }
}

impl std::fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "CMatrix {}x{} [", self.nrows, self.ncols)?;
        for i in 0..self.nrows {
            write!(f, "  ")?;
            for j in 0..self.ncols {
                let z = self[(i, j)];
                write!(f, "{:+.4e}{:+.4e}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Bilinear (unconjugated) inner product `Σ_i a_i b_i`.
pub fn c_dot(a: &[C64], b: &[C64]) -> C64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

/// Hermitian inner product `Σ_i conj(a_i) b_i`.
pub fn h_dot(a: &[C64], b: &[C64]) -> C64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

/// Euclidean norm.
pub fn norm2(a: &[C64]) -> f64 {
    a.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

/// Trailing updates switch to rayon above this size; below it the
/// sequential loop is faster than the fork overhead.
const LU_PAR_THRESHOLD: usize = 192;

/// LU factorization with partial pivoting, stored packed (L unit lower, U upper).
pub struct LuFactors {
    n: usize,
    data: Vec<C64>,
    piv: Vec<usize>,
}

/// Factors a square matrix, consuming it in place.
///
/// Fails when a pivot falls below `n * eps * max|a_ij|` of the input, which
/// is the working-precision notion of singular used everywhere in the crate.
pub fn lu_factor(m: CMatrix) -> Result<LuFactors> {
    assert!(m.is_square(), "LU factorization requires a square matrix");
    let n = m.nrows;
    let mut a = m.data;
    let mut piv = vec![0usize; n];
    let scale = a.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let threshold = (n as f64) * f64::EPSILON * scale;
    for k in 0..n {
        let mut pmax = -1.0;
        let mut pidx = k;
        for i in k..n {
            let m = a[i * n + k].norm_sqr();
            if m > pmax {
                pmax = m;
                pidx = i;
            }
        }
        piv[k] = pidx;
        if pidx != k {
            for j in 0..n {
                a.swap(k * n + j, pidx * n + j);
            }
        }
        let pivot = a[k * n + k];
        if pivot.norm() <= threshold {
            return Err(Error::SingularMatrix { pivot: pivot.norm(), threshold });
        }
        let (head, tail) = a.split_at_mut((k + 1) * n);
        let row_k = &head[k * n + k + 1..(k + 1) * n];
        let update = |row: &mut [C64]| {
            let l = row[k] / pivot;
            row[k] = l;
            for (x, u) in row[k + 1..].iter_mut().zip(row_k.iter()) {
                *x -= l * u;
            }
        };
        if n - k > LU_PAR_THRESHOLD {
            tail.par_chunks_mut(n).for_each(update);
        } else {
            tail.chunks_mut(n).for_each(update);
        }
    }
    Ok(LuFactors { n, data: a, piv })
}

impl LuFactors {
    // Index form matches the substitution recurrences; iterators obscure
    // the k-th pivot row access.
    #[allow(clippy::needless_range_loop)]
    pub fn solve(&self, b: &[C64]) -> Vec<C64> {
        assert_eq!(b.len(), self.n);
        let n = self.n;
        let mut x = b.to_vec();
        // Rows were swapped in full during factorization, so the stored
        // multipliers live in the final permutation; permute b completely
        // before substituting.
        for k in 0..n {
            x.swap(k, self.piv[k]);
        }
        for k in 0..n {
            let xk = x[k];
            if xk != C64::new(0.0, 0.0) {
                for i in (k + 1)..n {
                    let l = self.data[i * n + k];
                    x[i] -= l * xk;
                }
            }
        }
        for k in (0..n).rev() {
            let mut s = x[k];
            for j in (k + 1)..n {
                s -= self.data[k * n + j] * x[j];
            }
            x[k] = s / self.data[k * n + k];
        }
        x
    }
}

/// Convenience: factor and solve `a x = b` for one right-hand side.
pub fn solve(a: &CMatrix, b: &[C64]) -> Result<Vec<C64>> {
    Ok(lu_factor(a.clone())?.solve(b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn identity_solve_is_identity() {
        let a = CMatrix::identity(4);
        let b = vec![c(1.0, 2.0), c(-3.0, 0.5), c(0.0, 0.0), c(4.0, -4.0)];
        let x = solve(&a, &b).unwrap();
        for (xi, bi) in x.iter().zip(b.iter()) {
            assert!((xi - bi).norm() < 1e-15);
        }
    }

    #[test]
    fn solve_matches_hand_inverted_2x2() {
        // a = [[2, i], [i, 1]], det = 2 - i^2 = 3
        // inverse = (1/3) [[1, -i], [-i, 2]]
        let a =
            CMatrix::from_rows(&[vec![c(2.0, 0.0), c(0.0, 1.0)], vec![c(0.0, 1.0), c(1.0, 0.0)]]);
        let b = vec![c(1.0, 0.0), c(0.0, 0.0)];
        let x = solve(&a, &b).unwrap();
        assert!((x[0] - c(1.0 / 3.0, 0.0)).norm() < 1e-15);
        assert!((x[1] - c(0.0, -1.0 / 3.0)).norm() < 1e-15);
    }

    #[test]
    fn singular_matrix_is_rejected() {
        let a =
            CMatrix::from_rows(&[vec![c(1.0, 0.0), c(2.0, 0.0)], vec![c(2.0, 0.0), c(4.0, 0.0)]]);
        match solve(&a, &[c(1.0, 0.0), c(0.0, 0.0)]) {
            Err(Error::SingularMatrix { .. }) => {}
            other => panic!("expected SingularMatrix, got {other:?}"),
        }
    }

    #[test]
    fn kron_of_2x2_matches_hand_expansion() {
        let a =
            CMatrix::from_rows(&[vec![c(1.0, 0.0), c(2.0, 0.0)], vec![c(0.0, 0.0), c(1.0, 1.0)]]);
        let b =
            CMatrix::from_rows(&[vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(1.0, 0.0), c(0.0, 0.0)]]);
        let k = a.kron(&b);
        assert_eq!(k.nrows(), 4);
        assert!((k[(0, 1)] - c(1.0, 0.0)).norm() < 1e-15);
        assert!((k[(0, 3)] - c(2.0, 0.0)).norm() < 1e-15);
        assert!((k[(3, 2)] - c(1.0, 1.0)).norm() < 1e-15);
        assert!((k[(2, 0)]).norm() < 1e-15);
    }

    #[test]
    fn kron_mixed_product_identity() {
        // (A ⊗ B)(C ⊗ D) = (AC) ⊗ (BD)
        let a =
            CMatrix::from_rows(&[vec![c(1.0, 0.5), c(0.0, -1.0)], vec![c(2.0, 0.0), c(1.0, 1.0)]]);
        let b =
            CMatrix::from_rows(&[vec![c(0.0, 1.0), c(1.0, 0.0)], vec![c(1.0, -1.0), c(0.5, 0.0)]]);
        let lhs = a.kron(&b).mul(&a.kron(&b));
        let rhs = a.mul(&a).kron(&b.mul(&b));
        assert!(lhs.sub(&rhs).max_abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn lu_solve_residual_is_small(seed in 0u64..1000) {
            // fixed-size 7x7 with entries from a cheap deterministic generator
            let n = 7;
            let mut s = seed.wrapping_mul(0x9e3779b97f4a7c15).wrapping_add(1);
            let mut next = move || {
                s ^= s << 13; s ^= s >> 7; s ^= s << 17;
                (s >> 11) as f64 / (1u64 << 53) as f64 - 0.5
            };
            let mut a = CMatrix::zeros(n, n);
            for i in 0..n { for j in 0..n { a[(i,j)] = c(next(), next()); } }
            let b: Vec<C64> = (0..n).map(|_| c(next(), next())).collect();
            let x = solve(&a, &b).unwrap();
            let r: Vec<C64> = a.mul_vec(&x).iter().zip(b.iter()).map(|(ax, bi)| ax - bi).collect();
            prop_assert!(norm2(&r) <= 1e-11 * a.max_abs() * norm2(&x).max(1.0));
        }
    }
}

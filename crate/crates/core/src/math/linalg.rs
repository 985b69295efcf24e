//! Dense complex linear algebra on row-major matrices.
//!
//! Sized for the problems in this crate: ridge normal equations up to a few
//! hundred unknowns, per-resource-element MIMO solves of size 2–8, and
//! Hermitian eigendecompositions for pseudoinverse fallbacks. Everything is
//! straightforward textbook numerics — partial-pivot LU, Cholesky, cyclic
//! Jacobi — with no blocking or backends, which keeps results bit-identical
//! across platforms.

use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;
#[cfg_attr(test, allow(unused_imports))]
use num_traits::Float;

/// Dense row-major complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct CMat {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Complex64>,
}

impl CMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMat {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = CMat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Self {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            debug_assert_eq!(row.len(), c);
            data.extend_from_slice(row);
        }
        CMat { rows: r, cols: c, data }
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// Conjugate transpose.
    pub fn hermitian(&self) -> CMat {
        let mut out = CMat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn mul(&self, other: &CMat) -> CMat {
        assert_eq!(self.cols, other.rows, "matmul shape mismatch");
        let mut out = CMat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.cols, v.len(), "matvec shape mismatch");
        (0..self.rows)
            .map(|i| {
                let mut acc = Complex64::new(0.0, 0.0);
                for j in 0..self.cols {
                    acc += self[(i, j)] * v[j];
                }
                acc
            })
            .collect()
    }

    /// Gram matrix Aᴴ·A (Hermitian positive semidefinite).
    pub fn gram(&self) -> CMat {
        let f = self.cols;
        let mut g = CMat::zeros(f, f);
        for i in 0..f {
            for j in i..f {
                let mut acc = Complex64::new(0.0, 0.0);
                for t in 0..self.rows {
                    acc += self[(t, i)].conj() * self[(t, j)];
                }
                g[(i, j)] = acc;
                g[(j, i)] = acc.conj();
            }
        }
        g
    }

    /// Aᴴ·B without forming the transpose.
    pub fn herm_mul(&self, b: &CMat) -> CMat {
        assert_eq!(self.rows, b.rows, "herm_mul shape mismatch");
        let mut out = CMat::zeros(self.cols, b.cols);
        for t in 0..self.rows {
            for i in 0..self.cols {
                let a = self[(t, i)].conj();
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..b.cols {
                    out[(i, j)] += a * b[(t, j)];
                }
            }
        }
        out
    }

    pub fn add_scaled_identity(&mut self, lambda: f64) {
        debug_assert_eq!(self.rows, self.cols);
        for i in 0..self.rows {
            self[(i, i)] += Complex64::new(lambda, 0.0);
        }
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Trace of the real part of the diagonal.
    pub fn trace_re(&self) -> f64 {
        debug_assert_eq!(self.rows, self.cols);
        (0..self.rows).map(|i| self[(i, i)].re).sum()
    }

    /// Solves A·X = B for square A by LU with partial pivoting.
    /// Returns None if A is singular to working precision.
    pub fn solve_lu(&self, b: &CMat) -> Option<CMat> {
        assert_eq!(self.rows, self.cols, "solve_lu needs square A");
        assert_eq!(self.rows, b.rows, "solve_lu shape mismatch");
        let n = self.rows;
        let mut a = self.clone();
        let mut x = b.clone();
        for col in 0..n {
            // Pivot on the largest magnitude in this column.
            let mut pivot = col;
            let mut best = a[(col, col)].norm_sqr();
            for r in col + 1..n {
                let mag = a[(r, col)].norm_sqr();
                if mag > best {
                    best = mag;
                    pivot = r;
                }
            }
            if best == 0.0 || !best.is_finite() {
                return None;
            }
            if pivot != col {
                for j in 0..n {
                    a.data.swap(col * n + j, pivot * n + j);
                }
                for j in 0..x.cols {
                    x.data.swap(col * x.cols + j, pivot * x.cols + j);
                }
            }
            let inv = Complex64::new(1.0, 0.0) / a[(col, col)];
            for r in col + 1..n {
                let factor = a[(r, col)] * inv;
                if factor == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in col..n {
                    let v = a[(col, j)];
                    a[(r, j)] -= factor * v;
                }
                for j in 0..x.cols {
                    let v = x[(col, j)];
                    x[(r, j)] -= factor * v;
                }
            }
        }
        // Back substitution.
        for col in (0..n).rev() {
            let inv = Complex64::new(1.0, 0.0) / a[(col, col)];
            for j in 0..x.cols {
                let mut acc = x[(col, j)];
                for k in col + 1..n {
                    acc -= a[(col, k)] * x[(k, j)];
                }
                x[(col, j)] = acc * inv;
            }
        }
        Some(x)
    }

    /// Matrix inverse via `solve_lu` against the identity.
    pub fn invert(&self) -> Option<CMat> {
        self.solve_lu(&CMat::identity(self.rows))
    }

    /// Solves the Hermitian positive-definite system A·X = B by Cholesky.
    /// Returns None if a non-positive pivot shows A is not PD.
    pub fn cholesky_solve(&self, b: &CMat) -> Option<CMat> {
        assert_eq!(self.rows, self.cols, "cholesky needs square A");
        assert_eq!(self.rows, b.rows, "cholesky shape mismatch");
        let n = self.rows;
        let mut l = CMat::zeros(n, n);
        for i in 0..n {
            for j in 0..=i {
                let mut acc = self[(i, j)];
                for k in 0..j {
                    acc -= l[(i, k)] * l[(j, k)].conj();
                }
                if i == j {
                    let d = acc.re;
                    if !(d > 0.0) || !d.is_finite() {
                        return None;
                    }
                    l[(i, i)] = Complex64::new(d.sqrt(), 0.0);
                } else {
                    l[(i, j)] = acc / l[(j, j)];
                }
            }
        }
        // Forward solve L·Y = B, then backward Lᴴ·X = Y.
        let mut x = b.clone();
        for i in 0..n {
            let inv = Complex64::new(1.0 / l[(i, i)].re, 0.0);
            for j in 0..x.cols {
                let mut acc = x[(i, j)];
                for k in 0..i {
                    acc -= l[(i, k)] * x[(k, j)];
                }
                x[(i, j)] = acc * inv;
            }
        }
        for i in (0..n).rev() {
            let inv = Complex64::new(1.0 / l[(i, i)].re, 0.0);
            for j in 0..x.cols {
                let mut acc = x[(i, j)];
                for k in i + 1..n {
                    acc -= l[(k, i)].conj() * x[(k, j)];
                }
                x[(i, j)] = acc * inv;
            }
        }
        Some(x)
    }

    /// Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.
    /// Returns eigenvalues ascending and the unitary matrix of column
    /// eigenvectors in matching order.
    pub fn hermitian_eig(&self) -> (Vec<f64>, CMat) {
        assert_eq!(self.rows, self.cols, "hermitian_eig needs square A");
        let n = self.rows;
        let mut a = self.clone();
        let mut v = CMat::identity(n);
        let fro = a.frobenius().max(f64::MIN_POSITIVE);
        for _sweep in 0..64 {
            let mut off = 0.0;
            for p in 0..n {
                for q in p + 1..n {
                    off += a[(p, q)].norm_sqr();
                }
            }
            if off.sqrt() <= 1e-14 * fro {
                break;
            }
            for p in 0..n {
                for q in p + 1..n {
                    let apq = a[(p, q)];
                    let mag = apq.norm();
                    if mag <= 1e-300 {
                        continue;
                    }
                    let phase = apq / mag;
                    let app = a[(p, p)].re;
                    let aqq = a[(q, q)].re;
                    let zeta = (aqq - app) / (2.0 * mag);
                    let t = if zeta >= 0.0 {
                        1.0 / (zeta + (1.0 + zeta * zeta).sqrt())
                    } else {
                        -1.0 / (-zeta + (1.0 + zeta * zeta).sqrt())
                    };
                    let c = 1.0 / (1.0 + t * t).sqrt();
                    let s = t * c;
                    // Unitary plane rotation U: U[p][p]=c, U[p][q]=s*phase,
                    // U[q][p]=-s*conj(phase), U[q][q]=c; apply A <- UᴴAU.
                    let up = Complex64::new(c, 0.0);
                    let uq = phase * s;
                    for j in 0..n {
                        let ajp = a[(j, p)];
                        let ajq = a[(j, q)];
                        a[(j, p)] = ajp * up - ajq * uq.conj();
                        a[(j, q)] = ajp * uq + ajq * up;
                    }
                    for j in 0..n {
                        let apj = a[(p, j)];
                        let aqj = a[(q, j)];
                        a[(p, j)] = apj * up - aqj * uq;
                        a[(q, j)] = apj * uq.conj() + aqj * up;
                    }
                    for j in 0..n {
                        let vjp = v[(j, p)];
                        let vjq = v[(j, q)];
                        v[(j, p)] = vjp * up - vjq * uq.conj();
                        v[(j, q)] = vjp * uq + vjq * up;
                    }
                }
            }
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| a[(i, i)].re.partial_cmp(&a[(j, j)].re).unwrap());
        let vals: Vec<f64> = order.iter().map(|&i| a[(i, i)].re).collect();
        let mut vecs = CMat::zeros(n, n);
        for (new, &old) in order.iter().enumerate() {
            for r in 0..n {
                vecs[(r, new)] = v[(r, old)];
            }
        }
        (vals, vecs)
    }
}

impl core::ops::Index<(usize, usize)> for CMat {
    type Output = Complex64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl core::ops::IndexMut<(usize, usize)> for CMat {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::rng::Rng;

    fn random(rng: &mut Rng, rows: usize, cols: usize) -> CMat {
        CMat {
            rows,
            cols,
            data: rng.complex_normal_vec(rows * cols),
        }
    }

    #[test]
    fn lu_solve_recovers_solution() {
        let mut rng = Rng::new(21);
        for n in [1usize, 2, 5, 9] {
            let a = random(&mut rng, n, n);
            let x_true = random(&mut rng, n, 3);
            let b = a.mul(&x_true);
            let x = a.solve_lu(&b).expect("nonsingular");
            for (u, w) in x.data.iter().zip(x_true.data.iter()) {
                assert!((u - w).norm() < 1e-9, "{u} vs {w}");
            }
        }
    }

    #[test]
    fn lu_rejects_singular() {
        let mut a = CMat::zeros(2, 2);
        a[(0, 0)] = Complex64::new(1.0, 0.0);
        a[(0, 1)] = Complex64::new(2.0, 0.0);
        a[(1, 0)] = Complex64::new(2.0, 0.0);
        a[(1, 1)] = Complex64::new(4.0, 0.0);
        assert!(a.solve_lu(&CMat::identity(2)).is_none());
    }

    #[test]
    fn invert_times_original_is_identity() {
        let mut rng = Rng::new(33);
        let a = random(&mut rng, 6, 6);
        let inv = a.invert().expect("nonsingular");
        let prod = a.mul(&inv);
        for i in 0..6 {
            for j in 0..6 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((prod[(i, j)] - Complex64::new(want, 0.0)).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn cholesky_matches_lu_on_hpd() {
        let mut rng = Rng::new(8);
        let a = random(&mut rng, 7, 7);
        let mut g = a.gram();
        g.add_scaled_identity(0.1);
        let b = random(&mut rng, 7, 2);
        let x1 = g.cholesky_solve(&b).expect("pd");
        let x2 = g.solve_lu(&b).expect("nonsingular");
        for (u, w) in x1.data.iter().zip(x2.data.iter()) {
            assert!((u - w).norm() < 1e-9);
        }
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let mut a = CMat::identity(2);
        a[(1, 1)] = Complex64::new(-1.0, 0.0);
        assert!(a.cholesky_solve(&CMat::identity(2)).is_none());
    }

    #[test]
    fn hermitian_eig_reconstructs() {
        let mut rng = Rng::new(55);
        let a = random(&mut rng, 8, 8);
        let g = a.gram(); // Hermitian PSD test matrix.
        let (vals, vecs) = g.hermitian_eig();
        // Residual ||G v - λ v|| per pair.
        for (k, &lam) in vals.iter().enumerate() {
            let v: Vec<Complex64> = (0..8).map(|r| vecs[(r, k)]).collect();
            let gv = g.mul_vec(&v);
            for (a_i, b_i) in gv.iter().zip(v.iter()) {
                assert!((a_i - b_i * lam).norm() < 1e-9 * g.frobenius().max(1.0));
            }
        }
        // Eigenvalues ascending and non-negative for a Gram matrix.
        for w in vals.windows(2) {
            assert!(w[0] <= w[1] + 1e-12);
        }
        assert!(vals[0] > -1e-9);
    }
}

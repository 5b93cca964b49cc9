//! Dense complex matrices and a cyclic Jacobi eigensolver for Hermitian
//! matrices.
//!
//! The solver rotates off-diagonal pairs with complex plane rotations until
//! the largest off-diagonal magnitude drops below the requested threshold;
//! for Hermitian input this always converges at the dimensions used here.

use crate::error::{Error, Result};
use num_complex::Complex64;

pub type C64 = Complex64;

/// Column-major is unnecessary at this scale; entries are stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    n_rows: usize,
    n_cols: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(n_rows: usize, n_cols: usize) -> CMatrix {
        CMatrix {
            n_rows,
            n_cols,
            data: vec![C64::new(0.0, 0.0); n_rows * n_cols],
        }
    }

    pub fn identity(n: usize) -> CMatrix {
        let mut m = CMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<C64>>) -> CMatrix {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, Vec::len);
        debug_assert!(rows.iter().all(|r| r.len() == n_cols));
        CMatrix {
            n_rows,
            n_cols,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn diag_real(values: &[f64]) -> CMatrix {
        let n = values.len();
        let mut m = CMatrix::zeros(n, n);
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = C64::new(v, 0.0);
        }
        m
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn mul(&self, other: &CMatrix) -> CMatrix {
        debug_assert_eq!(self.n_cols, other.n_rows);
        let mut out = CMatrix::zeros(self.n_rows, other.n_cols);
        for i in 0..self.n_rows {
            for k in 0..self.n_cols {
                let a = self[(i, k)];
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..other.n_cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn adjoint(&self) -> CMatrix {
        let mut out = CMatrix::zeros(self.n_cols, self.n_rows);
        for i in 0..self.n_rows {
            for j in 0..self.n_cols {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn add(&self, other: &CMatrix) -> CMatrix {
        debug_assert_eq!((self.n_rows, self.n_cols), (other.n_rows, other.n_cols));
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&other.data) {
            *a += b;
        }
        out
    }

    pub fn sub(&self, other: &CMatrix) -> CMatrix {
        debug_assert_eq!((self.n_rows, self.n_cols), (other.n_rows, other.n_cols));
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&other.data) {
            *a -= b;
        }
        out
    }

    pub fn scale(&self, s: f64) -> CMatrix {
        let mut out = self.clone();
        for a in &mut out.data {
            *a *= s;
        }
        out
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Largest deviation from the conjugate transpose.
    pub fn hermitian_deviation(&self) -> f64 {
        debug_assert_eq!(self.n_rows, self.n_cols);
        let mut dev: f64 = 0.0;
        for i in 0..self.n_rows {
            for j in i..self.n_cols {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev
    }

    pub fn commutator_norm(&self, other: &CMatrix) -> f64 {
        self.mul(other).sub(&other.mul(self)).max_abs()
    }

    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        debug_assert_eq!(self.n_cols, v.len());
        (0..self.n_rows)
            .map(|i| {
                (0..self.n_cols)
                    .map(|j| self[(i, j)] * v[j])
                    .sum::<C64>()
            })
            .collect()
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.n_rows).map(|i| self[(i, j)]).collect()
    }

    pub fn from_columns(n_rows: usize, cols: &[Vec<C64>]) -> CMatrix {
        let mut m = CMatrix::zeros(n_rows, cols.len());
        for (j, col) in cols.iter().enumerate() {
            debug_assert_eq!(col.len(), n_rows);
            for (i, &v) in col.iter().enumerate() {
                m[(i, j)] = v;
            }
        }
        m
    }
}

impl std::ops::Index<(usize, usize)> for CMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.n_cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.n_cols + j]
    }
}

pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn vec_norm(v: &[C64]) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

/// Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.
///
/// Returns eigenvalues (ascending) and the unitary matrix whose columns are
/// the corresponding eigenvectors, so `a = v * diag(values) * v^H` up to the
/// sweep threshold.
pub fn hermitian_eig(a: &CMatrix, off_threshold: f64) -> Result<(Vec<f64>, CMatrix)> {
    let n = a.n_rows();
    debug_assert_eq!(n, a.n_cols());
    let mut m = a.clone();
    let mut v = CMatrix::identity(n);
    const MAX_SWEEPS: usize = 100;
    let scale = m.max_abs().max(1.0);
    let threshold = off_threshold * scale;
    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let mut off: f64 = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                off = off.max(m[(p, q)].norm());
            }
        }
        if off <= threshold {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[(p, q)];
                let r = apq.norm();
                if r <= threshold * 1e-2 {
                    continue;
                }
                let phase = apq / r;
                let app = m[(p, p)].re;
                let aqq = m[(q, q)].re;
                // Zero the (p,q) entry of the Hermitian 2x2 block
                // [[app, r e^{i phi}], [r e^{-i phi}, aqq]] with the unitary
                // [[c, s e^{i phi}], [-s e^{-i phi}, c]].
                let tau = (app - aqq) / (2.0 * r);
                let t = if tau >= 0.0 {
                    -1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (tau - (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // Column update: col_p' = c*col_p - s*conj(phase)*col_q,
                //                col_q' = s*phase*col_p + c*col_q.
                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = c * mkp - s * phase.conj() * mkq;
                    m[(k, q)] = s * phase * mkp + c * mkq;
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * phase.conj() * vkq;
                    v[(k, q)] = s * phase * vkp + c * vkq;
                }
                // Row update with the conjugate transpose.
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = c * mpk - s * phase * mqk;
                    m[(q, k)] = s * phase.conj() * mpk + c * mqk;
                }
                // Clean the rotated pair against drift.
                m[(p, q)] = C64::new(0.0, 0.0);
                m[(q, p)] = C64::new(0.0, 0.0);
                let mpp = m[(p, p)];
                let mqq = m[(q, q)];
                m[(p, p)] = C64::new(mpp.re, 0.0);
                m[(q, q)] = C64::new(mqq.re, 0.0);
            }
        }
    }
    if !converged {
        return Err(Error::NoConvergence(MAX_SWEEPS));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].re.partial_cmp(&m[(j, j)].re).unwrap());
    let values: Vec<f64> = order.iter().map(|&i| m[(i, i)].re).collect();
    let vectors = CMatrix::from_columns(n, &order.iter().map(|&i| v.column(i)).collect::<Vec<_>>());
    Ok((values, vectors))
}

/// Gram-Schmidt orthonormalization of the columns; used by the test-side
/// generators to produce random unitaries.
pub fn orthonormalize_columns(m: &CMatrix) -> CMatrix {
    let n = m.n_rows();
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(m.n_cols());
    for j in 0..m.n_cols() {
        let mut col = m.column(j);
        for prev in &cols {
            let proj = inner(prev, &col);
            for (c, p) in col.iter_mut().zip(prev) {
                *c -= proj * p;
            }
        }
        let norm = vec_norm(&col);
        debug_assert!(norm > 1e-9, "columns must be linearly independent");
        for c in &mut col {
            *c /= norm;
        }
        cols.push(col);
    }
    CMatrix::from_columns(n, &cols)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn reconstruct(values: &[f64], vectors: &CMatrix) -> CMatrix {
        vectors
            .mul(&CMatrix::diag_real(values))
            .mul(&vectors.adjoint())
    }

    fn random_hermitian(rng: &mut ChaCha8Rng, n: usize) -> CMatrix {
        let mut m = CMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(rng.random_range(-3.0..3.0), 0.0);
            for j in i + 1..n {
                let z = C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
                m[(i, j)] = z;
                m[(j, i)] = z.conj();
            }
        }
        m
    }

    #[test]
    fn eig_of_diagonal_matrix() {
        let a = CMatrix::diag_real(&[3.0, -1.0, 2.0]);
        let (vals, vecs) = hermitian_eig(&a, 1e-12).unwrap();
        assert_eq!(vals, vec![-1.0, 2.0, 3.0]);
        assert!(reconstruct(&vals, &vecs).sub(&a).max_abs() < 1e-10);
    }

    #[test]
    fn eig_of_2x2_with_complex_offdiagonal() {
        // [[0, -i],[i, 0]] has eigenvalues -1, 1.
        let a = CMatrix::from_rows(vec![
            vec![C64::new(0.0, 0.0), C64::new(0.0, -1.0)],
            vec![C64::new(0.0, 1.0), C64::new(0.0, 0.0)],
        ]);
        let (vals, vecs) = hermitian_eig(&a, 1e-12).unwrap();
        assert!((vals[0] + 1.0).abs() < 1e-12);
        assert!((vals[1] - 1.0).abs() < 1e-12);
        assert!(reconstruct(&vals, &vecs).sub(&a).max_abs() < 1e-12);
        // Unitarity of the eigenvector matrix.
        let gram = vecs.adjoint().mul(&vecs);
        assert!(gram.sub(&CMatrix::identity(2)).max_abs() < 1e-12);
    }

    #[test]
    fn eig_reconstructs_random_hermitian_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 1..=8 {
            for _ in 0..10 {
                let a = random_hermitian(&mut rng, n);
                let (vals, vecs) = hermitian_eig(&a, 1e-12).unwrap();
                let err = reconstruct(&vals, &vecs).sub(&a).max_abs();
                assert!(err < 1e-10, "n={n} err={err}");
                let gram = vecs.adjoint().mul(&vecs);
                assert!(gram.sub(&CMatrix::identity(n)).max_abs() < 1e-10);
                assert!(vals.windows(2).all(|w| w[0] <= w[1]));
            }
        }
    }

    #[test]
    fn eig_matches_known_spectrum_via_similarity() {
        // Conjugate a known diagonal by a random unitary; the solver must
        // recover the diagonal values.
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let n = 5;
        let mut raw = CMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                raw[(i, j)] = C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            }
        }
        let u = orthonormalize_columns(&raw);
        let spectrum = [-2.0, -0.5, 0.0, 1.0, 4.0];
        let a = u.mul(&CMatrix::diag_real(&spectrum)).mul(&u.adjoint());
        let (vals, _) = hermitian_eig(&a, 1e-12).unwrap();
        for (got, want) in vals.iter().zip(spectrum) {
            assert!((got - want).abs() < 1e-10, "{got} vs {want}");
        }
    }
}

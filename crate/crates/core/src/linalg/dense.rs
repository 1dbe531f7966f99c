//! Dense symmetric eigensolver: Householder reduction to tridiagonal form, implicit
//! QL for the eigenvalues, inverse iteration plus back-transformation for the
//! ground vector.

use crate::error::Result;
use crate::scalar::Real;

use super::tridiagonal::Tridiagonal;
use super::{canonical_sign, dot, normalize, SymMatrix};

/// Product of Householder reflectors `Q = H_0 H_1 ... H_{n-3}` with
/// `H_k = I - beta_k v_k v_k^T` acting on rows `k + 1..n`.
#[derive(Debug, Clone)]
pub struct Reflectors<T> {
    n: usize,
    vs: Vec<Vec<T>>,
    betas: Vec<T>,
}

impl<T: Real> Reflectors<T> {
    /// Maps a tridiagonal-basis vector back to the original basis (`y = Q z`).
    pub fn apply(&self, z: &mut [T]) {
        assert_eq!(z.len(), self.n);
        for k in (0..self.vs.len()).rev() {
            let beta = self.betas[k];
            if beta == T::zero() {
                continue;
            }
            let v = &self.vs[k];
            let tail = &mut z[k + 1..];
            let s = beta * dot(v, tail);
            for (t, &vi) in tail.iter_mut().zip(v) {
                *t -= s * vi;
            }
        }
    }
}

/// Reduces a symmetric matrix to tridiagonal form `T = Q^T A Q`, reading only its
/// lower triangle.
pub fn tridiagonalize<T: Real>(matrix: &SymMatrix<T>) -> (Tridiagonal<T>, Reflectors<T>) {
    let n = matrix.n();
    let mut a = matrix.clone();
    let mut diag = vec![T::zero(); n];
    let mut off = vec![T::zero(); n.saturating_sub(1)];
    let mut vs = Vec::with_capacity(n.saturating_sub(2));
    let mut betas = Vec::with_capacity(n.saturating_sub(2));
    let mut p = vec![T::zero(); n];

    for k in 0..n.saturating_sub(2) {
        let m = n - k - 1;
        let mut v: Vec<T> = (k + 1..n).map(|i| a.get(i, k)).collect();
        let xnorm = v.iter().fold(T::zero(), |acc, &x| acc + x * x).sqrt();
        diag[k] = a.get(k, k);
        if xnorm == T::zero() {
            off[k] = T::zero();
            vs.push(v);
            betas.push(T::zero());
            continue;
        }
        let alpha = if v[0] > T::zero() { -xnorm } else { xnorm };
        v[0] -= alpha;
        let vtv = dot(&v, &v);
        let beta = T::lit(2.0) / vtv;
        off[k] = alpha;

        // p = beta A22 v ; w = p - (beta/2)(v.p) v ; A22 -= v w^T + w v^T.
        // Only the lower triangle of A22 is read or written.
        let p = &mut p[..m];
        p.iter_mut().for_each(|x| *x = T::zero());
        for r in 0..m {
            let row = &a.row(k + 1 + r)[k + 1..k + 2 + r];
            let vr = v[r];
            let (strict, d) = row.split_at(r);
            let mut acc = d[0] * vr;
            for ((pc, &x), &vc) in p[..r].iter_mut().zip(strict).zip(&v[..r]) {
                acc += x * vc;
                *pc += x * vr;
            }
            p[r] += acc;
        }
        p.iter_mut().for_each(|x| *x *= beta);
        let kcoef = beta * T::lit(0.5) * dot(&v, p);
        for (pr, &vr) in p.iter_mut().zip(&v) {
            *pr -= kcoef * vr;
        }
        for r in 0..m {
            let (vr, wr) = (v[r], p[r]);
            let row = &mut a.row_mut(k + 1 + r)[k + 1..k + 2 + r];
            for ((x, &pc), &vc) in row.iter_mut().zip(&p[..=r]).zip(&v[..=r]) {
                *x = *x - vr * pc - wr * vc;
            }
        }
        vs.push(v);
        betas.push(beta);
    }
    if n >= 2 {
        diag[n - 2] = a.get(n - 2, n - 2);
        off[n - 2] = a.get(n - 1, n - 2);
    }
    if n >= 1 {
        diag[n - 1] = a.get(n - 1, n - 1);
    }
    (Tridiagonal::new(diag, off), Reflectors { n, vs, betas })
}

/// All eigenvalues in ascending order.
pub fn symmetric_eigenvalues<T: Real>(matrix: &SymMatrix<T>) -> Result<Vec<T>> {
    if matrix.n() == 0 {
        return Ok(Vec::new());
    }
    tridiagonalize(matrix).0.eigenvalues_ql()
}

#[derive(Debug, Clone)]
pub struct DenseSpectrum<T> {
    /// Ascending.
    pub eigenvalues: Vec<T>,
    /// Unit eigenvector of `eigenvalues[0]`, sign fixed by [`canonical_sign`].
    pub ground: Vec<T>,
}

pub fn symmetric_ground<T: Real>(matrix: &SymMatrix<T>) -> Result<DenseSpectrum<T>> {
    let n = matrix.n();
    assert!(n > 0, "empty matrix has no ground state");
    let (t, q) = tridiagonalize(matrix);
    let eigenvalues = t.eigenvalues_ql()?;
    let mut ground = t.eigenvector(eigenvalues[0]);
    q.apply(&mut ground);
    normalize(&mut ground);
    canonical_sign(&mut ground);
    Ok(DenseSpectrum {
        eigenvalues,
        ground,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::residual_norm;
    use approx::assert_relative_eq;
    use nalgebra::DMatrix;

    fn pseudo_random(n: usize, seed: u64) -> SymMatrix<f64> {
        let mut state = seed;
        let mut next = || {
            state = state
                .wrapping_mul(6_364_136_223_846_793_005)
                .wrapping_add(1_442_695_040_888_963_407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        let mut m = SymMatrix::zeros(n);
        for i in 0..n {
            for j in 0..=i {
                let v = next();
                m.set(i, j, v);
                m.set(j, i, v);
            }
        }
        m
    }

    fn oracle(m: &SymMatrix<f64>) -> Vec<f64> {
        let n = m.n();
        let d = DMatrix::from_fn(n, n, |i, j| m.get(i, j));
        let mut ev: Vec<f64> = d.symmetric_eigen().eigenvalues.iter().copied().collect();
        ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
        ev
    }

    #[test]
    fn matches_nalgebra_on_random_matrices() {
        for (n, seed) in [(1, 1), (2, 2), (3, 3), (7, 4), (32, 5), (100, 6)] {
            let m = pseudo_random(n, seed);
            let ours = symmetric_eigenvalues(&m).unwrap();
            for (a, b) in ours.iter().zip(oracle(&m)) {
                assert_relative_eq!(*a, b, epsilon = 1e-11);
            }
            let g = symmetric_ground(&m).unwrap();
            let r = residual_norm(&m, &g.ground, g.eigenvalues[0]);
            assert!(r < 1e-11, "n = {n}: residual {r}");
        }
    }

    #[test]
    fn tridiagonalization_preserves_trace_and_similarity() {
        let m = pseudo_random(20, 9);
        let (t, q) = tridiagonalize(&m);
        let trace: f64 = t.diag.iter().sum();
        assert_relative_eq!(trace, m.trace(), epsilon = 1e-12);
        // Q e_0 = e_0 and Q columns are orthonormal.
        let mut e0 = vec![0.0; 20];
        e0[0] = 1.0;
        q.apply(&mut e0);
        assert_relative_eq!(e0[0], 1.0, epsilon = 1e-15);
        let mut e5 = vec![0.0; 20];
        e5[5] = 1.0;
        q.apply(&mut e5);
        assert_relative_eq!(dot(&e5, &e5), 1.0, epsilon = 1e-13);
    }

    #[test]
    fn diagonal_and_degenerate_inputs() {
        let m = SymMatrix::from_fn(4, |i, j| if i == j { [2.0, -1.0, 2.0, -1.0][i] } else { 0.0 });
        let s = symmetric_ground(&m).unwrap();
        assert_eq!(s.eigenvalues, vec![-1.0, -1.0, 2.0, 2.0]);
        assert!(residual_norm(&m, &s.ground, -1.0) < 1e-14);
    }

    #[test]
    fn single_precision() {
        let m64 = pseudo_random(16, 11);
        let m32 = SymMatrix::from_fn(16, |i, j| m64.get(i, j) as f32);
        let e64 = symmetric_eigenvalues(&m64).unwrap();
        let e32 = symmetric_eigenvalues(&m32).unwrap();
        for (a, b) in e32.iter().zip(&e64) {
            assert!((*a as f64 - b).abs() < 1e-5);
        }
    }
}

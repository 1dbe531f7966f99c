//! Real symmetric eigenvalue machinery.
//!
//! Two independent routes to the low end of a spectrum:
//! - [`dense`]: Householder tridiagonalization followed by implicit QL.
//! - [`lanczos`]: Krylov projection with full reorthogonalization, with Ritz
//!   values located by Sturm-sequence bisection.
//!
//! Both recover eigenvectors of their tridiagonal matrix by inverse iteration.

pub mod dense;
pub mod lanczos;
pub mod tridiagonal;

use crate::scalar::Real;

/// A real symmetric operator available only through its action on vectors.
pub trait LinearOperator<T: Real>: Sync {
    fn dim(&self) -> usize;

    /// Writes `A x` into `y`. Both slices have length [`dim`](Self::dim).
    fn apply_into(&self, x: &[T], y: &mut [T]);

    /// Materializes the operator column by column.
    fn to_dense(&self) -> SymMatrix<T> {
        let n = self.dim();
        let mut m = SymMatrix::zeros(n);
        let mut e = vec![T::zero(); n];
        let mut col = vec![T::zero(); n];
        for j in 0..n {
            e[j] = T::one();
            self.apply_into(&e, &mut col);
            for (i, &v) in col.iter().enumerate() {
                m.set(i, j, v);
            }
            e[j] = T::zero();
        }
        m
    }
}

/// Dense square matrix in row-major order, used for symmetric problems.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: Real> SymMatrix<T> {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![T::zero(); n * n],
        }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m.data[i * n + j] = f(i, j);
            }
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.n + j] = v;
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub(crate) fn row_mut(&mut self, i: usize) -> &mut [T] {
        &mut self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn trace(&self) -> T {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn max_asymmetry(&self) -> T {
        let mut worst = T::zero();
        for i in 0..self.n {
            for j in 0..i {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst
    }

    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        (0..self.n).map(|i| dot(self.row(i), x)).collect()
    }
}

impl<T: Real> LinearOperator<T> for SymMatrix<T> {
    fn dim(&self) -> usize {
        self.n
    }

    fn apply_into(&self, x: &[T], y: &mut [T]) {
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = dot(self.row(i), x);
        }
    }

    fn to_dense(&self) -> SymMatrix<T> {
        self.clone()
    }
}

#[inline]
pub fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

#[inline]
pub fn norm<T: Real>(a: &[T]) -> T {
    dot(a, a).sqrt()
}

/// `y += alpha * x`
#[inline]
pub fn axpy<T: Real>(alpha: T, x: &[T], y: &mut [T]) {
    for (yi, &xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub fn normalize<T: Real>(v: &mut [T]) -> T {
    let n = norm(v);
    if n > T::zero() {
        for x in v.iter_mut() {
            *x /= n;
        }
    }
    n
}

/// Fixes the overall sign of an eigenvector: positive component sum, or a positive
/// largest-magnitude entry when the sum vanishes.
pub fn canonical_sign<T: Real>(v: &mut [T]) {
    let sum: T = v.iter().copied().sum();
    let scale = v.iter().fold(T::zero(), |m, x| m.max(x.abs()));
    let flip = if sum.abs() > T::epsilon() * T::lit(v.len() as f64) * scale {
        sum < T::zero()
    } else {
        v.iter()
            .copied()
            .fold(T::zero(), |best, x| if x.abs() > best.abs() { x } else { best })
            < T::zero()
    };
    if flip {
        for x in v.iter_mut() {
            *x = -*x;
        }
    }
}

/// `|A v - lambda v|_2`
pub fn residual_norm<T: Real, A: LinearOperator<T> + ?Sized>(a: &A, v: &[T], lambda: T) -> T {
    let mut av = vec![T::zero(); v.len()];
    a.apply_into(v, &mut av);
    av.iter()
        .zip(v)
        .map(|(&x, &y)| {
            let r = x - lambda * y;
            r * r
        })
        .sum::<T>()
        .sqrt()
}

//! Symmetric tridiagonal eigenproblems.

use crate::error::{QcaError, Result};
use crate::scalar::Real;

use super::{canonical_sign, normalize};

/// Symmetric tridiagonal matrix: `diag[i]` on the diagonal, `off[i]` coupling `i` and `i + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tridiagonal<T> {
    pub diag: Vec<T>,
    pub off: Vec<T>,
}

impl<T: Real> Tridiagonal<T> {
    pub fn new(diag: Vec<T>, off: Vec<T>) -> Self {
        assert_eq!(
            off.len() + 1,
            diag.len().max(1),
            "tridiagonal needs n - 1 off-diagonal entries"
        );
        Self { diag, off }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// Bounds containing the whole spectrum.
    pub fn gershgorin(&self) -> (T, T) {
        let n = self.len();
        let mut lo = T::infinity();
        let mut hi = T::neg_infinity();
        for i in 0..n {
            let mut r = T::zero();
            if i > 0 {
                r += self.off[i - 1].abs();
            }
            if i + 1 < n {
                r += self.off[i].abs();
            }
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        (lo, hi)
    }

    fn scale(&self) -> T {
        let (lo, hi) = self.gershgorin();
        lo.abs().max(hi.abs()).max(T::min_positive_value())
    }

    /// Number of eigenvalues strictly below `x` (Sturm sequence count).
    pub fn count_below(&self, x: T) -> usize {
        let pivmin = T::min_positive_value() / T::epsilon();
        let mut count = 0;
        let mut q = T::one();
        for i in 0..self.len() {
            let coupling = if i == 0 {
                T::zero()
            } else {
                self.off[i - 1] * self.off[i - 1] / q
            };
            q = self.diag[i] - x - coupling;
            if q.abs() < pivmin {
                q = -pivmin;
            }
            if q < T::zero() {
                count += 1;
            }
        }
        count
    }

    /// The `k`-th smallest eigenvalue (0-based) by bisection.
    pub fn eigenvalue_bisect(&self, k: usize) -> T {
        assert!(k < self.len(), "eigenvalue index out of range");
        let (mut lo, mut hi) = self.gershgorin();
        let width = hi - lo;
        lo = lo - width * T::lit(1e-3) - T::min_positive_value();
        hi = hi + width * T::lit(1e-3) + T::min_positive_value();
        let two_eps = T::lit(2.0) * T::epsilon();
        for _ in 0..400 {
            let mid = lo + (hi - lo) * T::lit(0.5);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo <= two_eps * lo.abs().max(hi.abs()) {
                break;
            }
        }
        lo + (hi - lo) * T::lit(0.5)
    }

    /// All eigenvalues in ascending order by the implicit QL algorithm.
    pub fn eigenvalues_ql(&self) -> Result<Vec<T>> {
        let n = self.len();
        let mut d = self.diag.clone();
        let mut e = self.off.clone();
        e.push(T::zero());
        let two = T::lit(2.0);

        for l in 0..n {
            let mut iterations = 0;
            loop {
                let mut m = l;
                while m + 1 < n {
                    let dd = d[m].abs() + d[m + 1].abs();
                    if e[m].abs() <= T::epsilon() * dd {
                        break;
                    }
                    m += 1;
                }
                if m == l {
                    break;
                }
                iterations += 1;
                if iterations > 60 {
                    return Err(QcaError::NoConvergence {
                        iterations,
                        residual: e[l].abs().as_f64(),
                    });
                }
                let mut g = (d[l + 1] - d[l]) / (two * e[l]);
                let mut r = g.hypot(T::one());
                g = d[m] - d[l] + e[l] / (g + r.copysign(g));
                let (mut s, mut c, mut p) = (T::one(), T::one(), T::zero());
                let mut deflated = false;
                let mut i = m;
                while i > l {
                    i -= 1;
                    let f = s * e[i];
                    let b = c * e[i];
                    r = f.hypot(g);
                    e[i + 1] = r;
                    if r == T::zero() {
                        d[i + 1] -= p;
                        e[m] = T::zero();
                        deflated = true;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = d[i + 1] - p;
                    r = (d[i] - g) * s + two * c * b;
                    p = s * r;
                    d[i + 1] = g + p;
                    g = c * r - b;
                }
                if deflated {
                    continue;
                }
                d[l] -= p;
                e[l] = g;
                e[m] = T::zero();
            }
        }
        d.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
        Ok(d)
    }

    /// Unit eigenvector for (a close approximation of) eigenvalue `lambda`, by
    /// inverse iteration on the pivoted LU factorization of `T - lambda I`.
    pub fn eigenvector(&self, lambda: T) -> Vec<T> {
        let n = self.len();
        if n == 1 {
            return vec![T::one()];
        }
        let tiny = T::epsilon() * self.scale();
        let lu = ShiftedLu::factor(self, lambda, tiny);
        let golden = 0.618_033_988_749_895_f64;
        let mut x: Vec<T> = (0..n)
            .map(|i| T::lit(1.0 + 0.5 * ((i as f64 * golden).fract() - 0.5)))
            .collect();
        normalize(&mut x);
        for _ in 0..4 {
            lu.solve(&mut x);
            if normalize(&mut x) == T::zero() || x.iter().any(|v| !v.is_finite()) {
                // Shift landed exactly on an eigenvalue of a reducible matrix.
                let lu = ShiftedLu::factor(self, lambda - tiny * T::lit(16.0), tiny);
                x = vec![T::one(); n];
                lu.solve(&mut x);
                normalize(&mut x);
            }
        }
        canonical_sign(&mut x);
        x
    }
}

/// LU factorization with partial pivoting of `T - sigma I`, following the layout of
/// LAPACK's `gttrf`: unit lower bidiagonal `L`, upper triangular `U` with two
/// superdiagonals.
struct ShiftedLu<T> {
    lower: Vec<T>,
    d: Vec<T>,
    up1: Vec<T>,
    up2: Vec<T>,
    swapped: Vec<bool>,
}

impl<T: Real> ShiftedLu<T> {
    fn factor(t: &Tridiagonal<T>, sigma: T, tiny: T) -> Self {
        let n = t.len();
        let mut d: Vec<T> = t.diag.iter().map(|&x| x - sigma).collect();
        let mut lower = t.off.clone();
        let mut up1 = t.off.clone();
        let mut up2 = vec![T::zero(); n.saturating_sub(2)];
        let mut swapped = vec![false; n.saturating_sub(1)];
        for i in 0..n - 1 {
            if d[i].abs() >= lower[i].abs() {
                if d[i] == T::zero() {
                    d[i] = tiny;
                }
                let fact = lower[i] / d[i];
                lower[i] = fact;
                d[i + 1] -= fact * up1[i];
            } else {
                let fact = d[i] / lower[i];
                d[i] = lower[i];
                lower[i] = fact;
                let temp = up1[i];
                up1[i] = d[i + 1];
                d[i + 1] = temp - fact * d[i + 1];
                if i + 2 < n {
                    up2[i] = up1[i + 1];
                    up1[i + 1] = -fact * up1[i + 1];
                }
                swapped[i] = true;
            }
        }
        for x in d.iter_mut() {
            if x.abs() < tiny {
                *x = if *x < T::zero() { -tiny } else { tiny };
            }
        }
        Self {
            lower,
            d,
            up1,
            up2,
            swapped,
        }
    }

    fn solve(&self, b: &mut [T]) {
        let n = self.d.len();
        for i in 0..n - 1 {
            if self.swapped[i] {
                let temp = b[i];
                b[i] = b[i + 1];
                b[i + 1] = temp - self.lower[i] * b[i];
            } else {
                let li = self.lower[i] * b[i];
                b[i + 1] -= li;
            }
        }
        b[n - 1] /= self.d[n - 1];
        if n > 1 {
            b[n - 2] = (b[n - 2] - self.up1[n - 2] * b[n - 1]) / self.d[n - 2];
        }
        for i in (0..n.saturating_sub(2)).rev() {
            b[i] = (b[i] - self.up1[i] * b[i + 1] - self.up2[i] * b[i + 2]) / self.d[i];
        }
    }
}

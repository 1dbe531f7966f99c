//! The `2^M` two-state circuit Hamiltonian.
//!
//! Basis words are `M`-bit integers: bit `k` holds the state of cell `k + 1`, so a
//! word printed most-significant bit first reads `|x_M ... x_2 x_1>`.
//!
//! The diagonal is stored explicitly; the tunneling part (`-gamma_eff` between
//! words differing in one bit) is applied on the fly.
//!
//! Parallel application splits the output vector into fixed chunks of
//! [`APPLY_CHUNK`] entries. Every output entry is computed by the same fixed-order
//! sum regardless of which thread owns its chunk, so results are bit-identical to
//! the sequential path for any thread count.

use rayon::prelude::*;

use crate::electrostatics::pairwise_interaction_table;
use crate::error::{QcaError, Result};
use crate::library::CircuitLayout;
use crate::linalg::{LinearOperator, SymMatrix};
use crate::model::{detuning_from_field, FieldVector, TwoStateParams};
use crate::scalar::Real;

/// Device count above which assembly is refused outright (`2^24` amplitudes).
pub const MAX_CELLS: usize = 24;
/// Device count above which callers should warn about memory and run time.
pub const SOFT_MAX_CELLS: usize = 14;
/// Largest `M` for which [`HamiltonianModel::dense_matrix`] is allowed.
pub const DENSE_MATRIX_MAX_CELLS: usize = 12;
/// Output entries per parallel work item.
pub const APPLY_CHUNK: usize = 1024;

/// A basis word `|x_M ... x_1>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasisIndex(pub usize);

impl BasisIndex {
    /// State of the 0-based cell `k` (cell `k + 1` in one-based numbering).
    #[inline]
    pub fn bit(self, k: usize) -> bool {
        (self.0 >> k) & 1 == 1
    }

    #[inline]
    pub fn flip(self, k: usize) -> Self {
        BasisIndex(self.0 ^ (1 << k))
    }

    /// `+1` if cell `k` is in state 1, else `-1`.
    #[inline]
    pub fn spin(self, k: usize) -> i32 {
        if self.bit(k) {
            1
        } else {
            -1
        }
    }

    /// Ket notation, most significant cell first: `|x_M ... x_1>`.
    pub fn ket(self, m: usize) -> String {
        let bits: String = (0..m).rev().map(|k| if self.bit(k) { '1' } else { '0' }).collect();
        format!("|{bits}>")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianModel<T> {
    m: usize,
    diagonal: Vec<T>,
    gamma_eff: T,
    /// Constant subtracted from the raw diagonal so that its minimum is zero.
    shift: T,
}

impl<T: Real> HamiltonianModel<T> {
    /// Builds the model directly from a diagonal (length `2^m`), without shifting.
    pub fn from_parts(m: usize, diagonal: Vec<T>, gamma_eff: T) -> Result<Self> {
        if m == 0 {
            return Err(QcaError::InvalidArgument("circuit has no cells".into()));
        }
        if m > MAX_CELLS {
            return Err(QcaError::Capacity {
                what: "device cells",
                limit: MAX_CELLS,
                got: m,
            });
        }
        if diagonal.len() != 1 << m {
            return Err(QcaError::DimensionMismatch {
                expected: 1 << m,
                got: diagonal.len(),
            });
        }
        Ok(Self {
            m,
            diagonal,
            gamma_eff,
            shift: T::zero(),
        })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn diagonal(&self) -> &[T] {
        &self.diagonal
    }

    pub fn gamma_eff(&self) -> T {
        self.gamma_eff
    }

    /// The constant removed from the diagonal during assembly.
    pub fn shift(&self) -> T {
        self.shift
    }

    pub fn exceeds_soft_cap(&self) -> bool {
        self.m > SOFT_MAX_CELLS
    }

    /// Returns a copy with `c` added to every diagonal entry.
    pub fn shifted(&self, c: T) -> Self {
        Self {
            diagonal: self.diagonal.iter().map(|&d| d + c).collect(),
            shift: self.shift - c,
            ..self.clone()
        }
    }

    #[inline]
    fn row(&self, w: usize, v: &[T]) -> T {
        let mut flips = T::zero();
        for k in 0..self.m {
            flips += v[w ^ (1 << k)];
        }
        self.diagonal[w] * v[w] - self.gamma_eff * flips
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.diagonal.len() {
            return Err(QcaError::DimensionMismatch {
                expected: self.diagonal.len(),
                got: len,
            });
        }
        Ok(())
    }

    /// `H v`.
    pub fn apply(&self, v: &[T]) -> Result<Vec<T>> {
        self.check_len(v.len())?;
        let mut out = vec![T::zero(); v.len()];
        for (w, o) in out.iter_mut().enumerate() {
            *o = self.row(w, v);
        }
        Ok(out)
    }

    /// `H v` on the rayon pool of the caller; see the module docs for determinism.
    pub fn apply_parallel(&self, v: &[T], out: &mut [T]) -> Result<()> {
        self.check_len(v.len())?;
        self.check_len(out.len())?;
        out.par_chunks_mut(APPLY_CHUNK)
            .enumerate()
            .for_each(|(c, chunk)| {
                let base = c * APPLY_CHUNK;
                for (i, o) in chunk.iter_mut().enumerate() {
                    *o = self.row(base + i, v);
                }
            });
        Ok(())
    }

    /// Explicit matrix, only for `M <= 12`.
    pub fn dense_matrix(&self) -> Result<SymMatrix<T>> {
        if self.m > DENSE_MATRIX_MAX_CELLS {
            return Err(QcaError::Capacity {
                what: "cells for a dense matrix",
                limit: DENSE_MATRIX_MAX_CELLS,
                got: self.m,
            });
        }
        let n = self.diagonal.len();
        let mut a = SymMatrix::zeros(n);
        for w in 0..n {
            a.set(w, w, self.diagonal[w]);
            for k in 0..self.m {
                a.set(w, w ^ (1 << k), -self.gamma_eff);
            }
        }
        Ok(a)
    }
}

impl<T: Real> LinearOperator<T> for HamiltonianModel<T> {
    fn dim(&self) -> usize {
        self.diagonal.len()
    }

    fn apply_into(&self, x: &[T], y: &mut [T]) {
        if x.len() >= 4 * APPLY_CHUNK {
            self.apply_parallel(x, y).expect("dimension checked by caller");
        } else {
            for (w, o) in y.iter_mut().enumerate() {
                *o = self.row(w, x);
            }
        }
    }
}

/// Assembles the circuit Hamiltonian for a uniform field.
///
/// Cell `j` gets the detuning `Delta_j = -q_e E.a_j + delta_o`; the field's `ez`
/// component does not enter (the clock is folded into `gamma_eff`).
pub fn assemble<T: Real>(
    layout: &CircuitLayout<T>,
    field: &FieldVector<T>,
    params: &TwoStateParams<T>,
) -> Result<HamiltonianModel<T>> {
    params.validate()?;
    if !field.is_finite() {
        return Err(QcaError::InvalidArgument("field must be finite".into()));
    }
    let m = layout.cell_count();
    if m == 0 {
        return Err(QcaError::InvalidArgument("circuit has no device cells".into()));
    }
    if m > MAX_CELLS {
        return Err(QcaError::Capacity {
            what: "device cells",
            limit: MAX_CELLS,
            got: m,
        });
    }
    let table = pairwise_interaction_table(layout)?;
    let in_plane = FieldVector::new(field.ex, field.ey, T::zero());
    let half = T::lit(0.5);
    let detunings: Vec<T> = layout
        .devices()
        .iter()
        .map(|mol| (detuning_from_field(mol, &in_plane, &layout.constants) + params.delta_o) * half)
        .collect();

    let n = 1usize << m;
    let mut diagonal = vec![T::zero(); n];
    diagonal.par_chunks_mut(APPLY_CHUNK).enumerate().for_each(|(c, chunk)| {
        for (i, d) in chunk.iter_mut().enumerate() {
            let w = c * APPLY_CHUNK + i;
            let mut e = table.energy_of(w);
            for (j, &dj) in detunings.iter().enumerate() {
                if (w >> j) & 1 == 1 {
                    e += dj;
                } else {
                    e -= dj;
                }
            }
            *d = e;
        }
    });
    let shift = diagonal.iter().copied().fold(T::infinity(), T::min);
    for d in diagonal.iter_mut() {
        *d -= shift;
    }
    Ok(HamiltonianModel {
        m,
        diagonal,
        gamma_eff: params.gamma_eff,
        shift,
    })
}

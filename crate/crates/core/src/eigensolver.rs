//! Ground state and first gap of a symmetric operator.
//!
//! Small problems (dimension up to `2^dense_max_cells`) are diagonalized densely;
//! larger ones use Lanczos with full reorthogonalization. Both paths are
//! deterministic: the Lanczos start vector is fixed (see
//! [`crate::linalg::lanczos::start_vector`]) and operator application is
//! order-independent.

use crate::error::{QcaError, Result};
use crate::hamiltonian::HamiltonianModel;
use crate::linalg::dense::{symmetric_eigenvalues, symmetric_ground};
use crate::linalg::lanczos::{self, LanczosOptions};
use crate::linalg::{residual_norm, LinearOperator};
use crate::scalar::Real;

/// Largest `M` accepted by [`spectrum_small`].
pub const SPECTRUM_MAX_CELLS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Dense for small dimensions, Lanczos otherwise.
    Auto,
    Dense,
    Lanczos,
}

#[derive(Debug, Clone, Copy)]
pub struct SolverOptions<T> {
    /// Residual tolerance `|Hv - E v|` in eV.
    pub tol: T,
    pub max_iter: usize,
    /// `Auto` uses the dense path up to dimension `2^dense_max_cells`.
    pub dense_max_cells: usize,
    /// Gaps below this are flagged as degenerate, eV.
    pub degeneracy_threshold: T,
    pub method: Method,
}

impl<T: Real> Default for SolverOptions<T> {
    fn default() -> Self {
        Self {
            tol: T::lit(1e-10).max(T::lit(1e3) * T::epsilon()),
            max_iter: 2000,
            dense_max_cells: 10,
            degeneracy_threshold: T::lit(1e-9),
            method: Method::Auto,
        }
    }
}

impl<T: Real> SolverOptions<T> {
    pub fn with_tol(tol: T) -> Self {
        Self {
            tol,
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.tol.is_finite() && self.tol > T::zero()) {
            return Err(QcaError::InvalidArgument(format!(
                "tolerance must be positive, got {}",
                self.tol
            )));
        }
        if self.max_iter == 0 {
            return Err(QcaError::InvalidArgument("max_iter must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroundStateResult<T> {
    pub energy: T,
    /// `E1 - E0`; zero for one-dimensional problems.
    pub gap: T,
    /// Unit ground vector with positive component sum.
    pub vector: Vec<T>,
    /// Lanczos steps, or zero for the dense path.
    pub iterations: usize,
    pub residual: T,
    pub degenerate: bool,
    pub method: Method,
}

/// Lowest eigenpair and gap of any symmetric operator.
pub fn ground_state_of<T: Real, A: LinearOperator<T> + ?Sized>(
    op: &A,
    opts: &SolverOptions<T>,
) -> Result<GroundStateResult<T>> {
    opts.validate()?;
    let n = op.dim();
    if n == 0 {
        return Err(QcaError::InvalidArgument("operator has dimension zero".into()));
    }
    let dense_limit = 1usize.checked_shl(opts.dense_max_cells as u32).unwrap_or(usize::MAX);
    let method = match opts.method {
        Method::Auto if n <= dense_limit => Method::Dense,
        Method::Auto => Method::Lanczos,
        m => m,
    };
    let (energy, e1, vector, iterations, residual) = match method {
        Method::Dense => {
            let spec = symmetric_ground(&op.to_dense())?;
            let r = residual_norm(op, &spec.ground, spec.eigenvalues[0]);
            (spec.eigenvalues[0], spec.eigenvalues.get(1).copied(), spec.ground, 0, r)
        }
        _ => {
            let lo = LanczosOptions {
                tol: opts.tol,
                gap_tol: opts.tol.sqrt().max(opts.tol),
                max_iter: opts.max_iter,
            };
            let r = lanczos::lowest(op, &lo)?;
            (r.e0, r.e1, r.vector, r.iterations, r.residual)
        }
    };
    let gap = e1.map_or(T::zero(), |e1| (e1 - energy).max(T::zero()));
    Ok(GroundStateResult {
        energy,
        gap,
        vector,
        iterations,
        residual,
        degenerate: n > 1 && gap < opts.degeneracy_threshold,
        method,
    })
}

/// Ground state of a circuit Hamiltonian.
pub fn ground_state<T: Real>(
    h: &HamiltonianModel<T>,
    opts: &SolverOptions<T>,
) -> Result<GroundStateResult<T>> {
    ground_state_of(h, opts)
}

/// Full ascending spectrum of a small circuit (`M <= 10`).
pub fn spectrum_small<T: Real>(h: &HamiltonianModel<T>) -> Result<Vec<T>> {
    if h.m() > SPECTRUM_MAX_CELLS {
        return Err(QcaError::Capacity {
            what: "cells for a full spectrum",
            limit: SPECTRUM_MAX_CELLS,
            got: h.m(),
        });
    }
    symmetric_eigenvalues(&h.dense_matrix()?)
}

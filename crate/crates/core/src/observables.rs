//! Polarizations and correlations of circuit ground states.
//!
//! Cell polarization is `<sigma_z>` with `+1` for state 1. A pair reports
//! `P_pair = s (P_L - P_R) / 2`, where `L` is the first-listed member and `s` the
//! pair's handedness sign; a driver pair holding bit 1 reads `+1` under the same
//! rule. That single convention lives in [`pair_polarization`].

use crate::error::{QcaError, Result};
use crate::library::{CircuitLayout, DevicePair};
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq)]
pub struct PolarizationReport<T> {
    pub per_cell: Vec<T>,
    pub per_pair: Vec<T>,
    pub output: T,
    pub degenerate: bool,
}

fn cells_of<T: Real>(v: &[T]) -> Result<usize> {
    let n = v.len();
    if n == 0 || !n.is_power_of_two() {
        return Err(QcaError::InvalidArgument(format!(
            "state vector length {n} is not a power of two"
        )));
    }
    Ok(n.trailing_zeros() as usize)
}

/// `<sigma_z>` of cell `k` (0-based).
pub fn cell_polarization<T: Real>(v: &[T], k: usize) -> Result<T> {
    let m = cells_of(v)?;
    if k >= m {
        return Err(QcaError::IndexOutOfRange { index: k, len: m });
    }
    let mut p = T::zero();
    for (w, &a) in v.iter().enumerate() {
        let prob = a * a;
        if (w >> k) & 1 == 1 {
            p += prob;
        } else {
            p -= prob;
        }
    }
    Ok(p)
}

/// All cell polarizations in one pass over the vector.
pub fn cell_polarizations<T: Real>(v: &[T]) -> Result<Vec<T>> {
    let m = cells_of(v)?;
    let mut p = vec![T::zero(); m];
    for (w, &a) in v.iter().enumerate() {
        let prob = a * a;
        for (k, pk) in p.iter_mut().enumerate() {
            if (w >> k) & 1 == 1 {
                *pk += prob;
            } else {
                *pk -= prob;
            }
        }
    }
    Ok(p)
}

/// `s (P_L - P_R) / 2`.
pub fn pair_polarization<T: Real>(p_left: T, p_right: T, sign: i8) -> T {
    let s = if sign < 0 { -T::one() } else { T::one() };
    s * (p_left - p_right) * T::lit(0.5)
}

/// Mean polarization of the output pairs, given per-pair values in pair order.
pub fn output_polarization<T: Real>(pairs: &[DevicePair], per_pair: &[T]) -> Result<T> {
    if pairs.len() != per_pair.len() {
        return Err(QcaError::DimensionMismatch {
            expected: pairs.len(),
            got: per_pair.len(),
        });
    }
    let outs: Vec<T> = pairs
        .iter()
        .zip(per_pair)
        .filter(|(p, _)| p.is_output)
        .map(|(_, &v)| v)
        .collect();
    if outs.is_empty() {
        return Err(QcaError::NoOutput);
    }
    let n = T::lit(outs.len() as f64);
    Ok(outs.into_iter().sum::<T>() / n)
}

/// Connected correlation `<z_j z_k> - <z_j><z_k>`.
pub fn pair_correlation<T: Real>(v: &[T], j: usize, k: usize) -> Result<T> {
    let m = cells_of(v)?;
    for idx in [j, k] {
        if idx >= m {
            return Err(QcaError::IndexOutOfRange { index: idx, len: m });
        }
    }
    if j == k {
        return Err(QcaError::InvalidArgument("correlation needs two distinct cells".into()));
    }
    let mut zz = T::zero();
    for (w, &a) in v.iter().enumerate() {
        let same = ((w >> j) & 1) == ((w >> k) & 1);
        if same {
            zz += a * a;
        } else {
            zz -= a * a;
        }
    }
    Ok(zz - cell_polarization(v, j)? * cell_polarization(v, k)?)
}

/// Builds the full report for a ground vector of `layout`.
pub fn polarization_report<T: Real>(
    layout: &CircuitLayout<T>,
    v: &[T],
    degenerate: bool,
) -> Result<PolarizationReport<T>> {
    let per_cell = cell_polarizations(v)?;
    if per_cell.len() != layout.cell_count() {
        return Err(QcaError::DimensionMismatch {
            expected: 1 << layout.cell_count(),
            got: v.len(),
        });
    }
    let pairs = layout.device_pairs()?;
    let per_pair: Vec<T> = pairs
        .iter()
        .map(|p| pair_polarization(per_cell[p.left], per_cell[p.right], p.sign))
        .collect();
    let output = output_polarization(&pairs, &per_pair)?;
    Ok(PolarizationReport {
        per_cell,
        per_pair,
        output,
        degenerate,
    })
}

//! Field sweeps, CSV output, failure onsets and the majority truth table.
//!
//! The grid runs `ex` in the outer loop and `ey` in the inner loop; rows are
//! always emitted in that order no matter how many threads solve them.

use std::io::{Read, Write};
use std::str::FromStr;

use rayon::prelude::*;

use crate::eigensolver::{ground_state, GroundStateResult, SolverOptions};
use crate::error::{QcaError, Result};
use crate::hamiltonian::assemble;
use crate::library::{build_majority, majority, BuildConfig, CircuitLayout};
use crate::model::FieldVector;
use crate::observables::{polarization_report, PolarizationReport};
use crate::scalar::Real;

/// Axis values closer than this to zero count as the zero-field point.
const ZERO_FIELD: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Units {
    /// Multiples of the layout's `E_o`.
    Eo,
    /// V/nm.
    Absolute,
}

impl FromStr for Units {
    type Err = QcaError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "eo" => Ok(Units::Eo),
            "abs" => Ok(Units::Absolute),
            other => Err(QcaError::InvalidArgument(format!(
                "units must be `eo` or `abs`, got `{other}`"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Ex,
    Ey,
}

impl FromStr for Axis {
    type Err = QcaError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ex" => Ok(Axis::Ex),
            "ey" => Ok(Axis::Ey),
            other => Err(QcaError::InvalidArgument(format!(
                "axis must be `ex` or `ey`, got `{other}`"
            ))),
        }
    }
}

/// `steps` evenly spaced values from `min` to `max` inclusive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldRange<T> {
    pub min: T,
    pub max: T,
    pub steps: usize,
}

impl<T: Real> FieldRange<T> {
    pub fn new(min: T, max: T, steps: usize) -> Result<Self> {
        let r = Self { min, max, steps };
        r.validate()?;
        Ok(r)
    }

    pub fn point(x: T) -> Self {
        Self {
            min: x,
            max: x,
            steps: 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.steps == 0 {
            return Err(QcaError::InvalidSweep("steps must be at least 1".into()));
        }
        if !(self.min.is_finite() && self.max.is_finite()) {
            return Err(QcaError::InvalidSweep("range bounds must be finite".into()));
        }
        if self.min > self.max {
            return Err(QcaError::InvalidSweep(format!(
                "min {} exceeds max {}",
                self.min, self.max
            )));
        }
        if self.steps == 1 && self.min != self.max {
            return Err(QcaError::InvalidSweep(
                "a single step needs min == max".into(),
            ));
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<T> {
        if self.steps == 1 || self.min == self.max {
            return vec![self.min; self.steps];
        }
        // Weighted form: exact endpoints, and a symmetric range gives exact
        // negatives (and an exact zero in the middle).
        let last = self.steps - 1;
        let n = T::lit(last as f64);
        (0..self.steps)
            .map(|i| match i {
                0 => self.min,
                i if i == last => self.max,
                i => (self.min * T::lit((last - i) as f64) + self.max * T::lit(i as f64)) / n,
            })
            .collect()
    }
}

impl<T: Real> FromStr for FieldRange<T> {
    type Err = QcaError;
    /// `MIN:MAX:STEPS`, or a single value for a one-point range.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || QcaError::InvalidSweep(format!("expected MIN:MAX:STEPS, got `{s}`"));
        let num = |t: &str| t.trim().parse::<f64>().map(T::lit).map_err(|_| bad());
        let parts: Vec<&str> = s.split(':').collect();
        match parts.as_slice() {
            [x] => Ok(Self::point(num(x)?)),
            [lo, hi, n] => {
                let steps = n.trim().parse::<usize>().map_err(|_| bad())?;
                Self::new(num(lo)?, num(hi)?, steps)
            }
            _ => Err(bad()),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SweepSpec<T> {
    pub layout: CircuitLayout<T>,
    pub ex: FieldRange<T>,
    pub ey: FieldRange<T>,
    /// Clock field, recorded for reference only; it does not enter the two-state model.
    pub ez: T,
    pub units: Units,
    /// Worker threads; `0` uses the global rayon pool.
    pub threads: usize,
    pub solver: SolverOptions<T>,
}

impl<T: Real> SweepSpec<T> {
    pub fn new(layout: CircuitLayout<T>, ex: FieldRange<T>, ey: FieldRange<T>) -> Self {
        Self {
            layout,
            ex,
            ey,
            ez: T::zero(),
            units: Units::Eo,
            threads: 0,
            solver: SolverOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow<T> {
    pub ex_over_eo: T,
    pub ey_over_eo: T,
    pub e0: T,
    pub gap: T,
    pub per_pair: Vec<T>,
    pub p_out: T,
    pub degenerate: bool,
    pub iterations: usize,
    /// Set when the solve failed; numeric fields are then NaN.
    pub error: Option<String>,
}

impl<T: Real> SweepRow<T> {
    pub fn is_usable(&self) -> bool {
        self.error.is_none() && !self.degenerate
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult<T> {
    pub n_pairs: usize,
    pub rows: Vec<SweepRow<T>>,
}

/// Ground state and polarizations of one layout at one field.
#[derive(Debug, Clone)]
pub struct PointSolution<T> {
    pub ground: GroundStateResult<T>,
    pub report: PolarizationReport<T>,
}

pub fn solve_point<T: Real>(
    layout: &CircuitLayout<T>,
    field: &FieldVector<T>,
    opts: &SolverOptions<T>,
) -> Result<PointSolution<T>> {
    let h = assemble(layout, field, &layout.params)?;
    let ground = ground_state(&h, opts)?;
    let report = polarization_report(layout, &ground.vector, ground.degenerate)?;
    Ok(PointSolution { ground, report })
}

fn with_pool<R: Send>(threads: usize, f: impl FnOnce() -> R + Send) -> Result<R> {
    if threads == 0 {
        return Ok(f());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| QcaError::InvalidArgument(format!("cannot start thread pool: {e}")))?;
    Ok(pool.install(f))
}

pub fn run_sweep<T: Real>(spec: &SweepSpec<T>) -> Result<SweepResult<T>> {
    spec.ex.validate()?;
    spec.ey.validate()?;
    spec.layout.validate()?;
    let n_pairs = spec.layout.device_pairs()?.len();
    let eo = spec.layout.eo()?;
    let (to_field, to_eo) = match spec.units {
        Units::Eo => (eo, T::one()),
        Units::Absolute => (T::one(), T::one() / eo),
    };
    let xs = spec.ex.values();
    let ys = spec.ey.values();
    let points: Vec<(T, T)> = xs
        .iter()
        .flat_map(|&x| ys.iter().map(move |&y| (x, y)))
        .collect();

    let solve = |&(x, y): &(T, T)| -> SweepRow<T> {
        let field = FieldVector::new(x * to_field, y * to_field, spec.ez);
        match solve_point(&spec.layout, &field, &spec.solver) {
            Ok(s) => SweepRow {
                ex_over_eo: x * to_eo,
                ey_over_eo: y * to_eo,
                e0: s.ground.energy,
                gap: s.ground.gap,
                per_pair: s.report.per_pair,
                p_out: s.report.output,
                degenerate: s.ground.degenerate,
                iterations: s.ground.iterations,
                error: None,
            },
            Err(e) => SweepRow {
                ex_over_eo: x * to_eo,
                ey_over_eo: y * to_eo,
                e0: T::nan(),
                gap: T::nan(),
                per_pair: vec![T::nan(); n_pairs],
                p_out: T::nan(),
                degenerate: false,
                iterations: 0,
                error: Some(e.to_string()),
            },
        }
    };
    let rows = with_pool(spec.threads, || points.par_iter().map(solve).collect::<Vec<_>>())?;
    Ok(SweepResult { n_pairs, rows })
}

fn fmt_real<T: Real>(x: T) -> String {
    if x.is_nan() {
        "NaN".to_string()
    } else {
        format!("{:.11e}", x.as_f64())
    }
}

pub fn csv_header(n_pairs: usize) -> Vec<String> {
    let mut h = vec![
        "ex_over_Eo".to_string(),
        "ey_over_Eo".into(),
        "e0_eV".into(),
        "gap_eV".into(),
    ];
    h.extend((1..=n_pairs).map(|i| format!("p_pair_{i}")));
    h.extend(["p_out".to_string(), "degenerate".into(), "iters".into()]);
    h
}

/// Writes the sweep as CSV: 12 significant digits, LF line endings. Failed rows
/// carry `NaN` values and `error` in the degenerate column.
pub fn write_csv<T: Real, W: Write>(result: &SweepResult<T>, out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(csv_header(result.n_pairs))?;
    for r in &result.rows {
        let mut rec = vec![
            fmt_real(r.ex_over_eo),
            fmt_real(r.ey_over_eo),
            fmt_real(r.e0),
            fmt_real(r.gap),
        ];
        rec.extend(r.per_pair.iter().map(|&p| fmt_real(p)));
        rec.push(fmt_real(r.p_out));
        rec.push(match (&r.error, r.degenerate) {
            (Some(_), _) => "error".into(),
            (None, true) => "1".into(),
            (None, false) => "0".into(),
        });
        rec.push(r.iterations.to_string());
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a CSV written by [`write_csv`].
pub fn read_csv<R: Read>(input: R) -> Result<SweepResult<f64>> {
    let mut rd = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    let header: Vec<String> = rd.headers()?.iter().map(str::to_string).collect();
    if header.len() < 7 {
        return Err(QcaError::InvalidSweep("CSV header too short".into()));
    }
    let n_pairs = header.len() - 7;
    if header != csv_header(n_pairs) {
        return Err(QcaError::InvalidSweep(format!(
            "unexpected CSV header: {}",
            header.join(",")
        )));
    }
    let mut rows = Vec::new();
    for (i, rec) in rd.records().enumerate() {
        let rec = rec?;
        let num = |j: usize| -> Result<f64> {
            rec[j].parse::<f64>().map_err(|_| {
                QcaError::InvalidSweep(format!("row {}: bad number `{}`", i + 1, &rec[j]))
            })
        };
        let (degenerate, error) = match &rec[4 + n_pairs + 1] {
            "0" => (false, None),
            "1" => (true, None),
            "error" => (false, Some("solver error".to_string())),
            other => {
                return Err(QcaError::InvalidSweep(format!(
                    "row {}: bad degenerate flag `{other}`",
                    i + 1
                )))
            }
        };
        rows.push(SweepRow {
            ex_over_eo: num(0)?,
            ey_over_eo: num(1)?,
            e0: num(2)?,
            gap: num(3)?,
            per_pair: (0..n_pairs).map(|k| num(4 + k)).collect::<Result<_>>()?,
            p_out: num(4 + n_pairs)?,
            degenerate,
            iterations: rec[6 + n_pairs].parse().map_err(|_| {
                QcaError::InvalidSweep(format!("row {}: bad iteration count", i + 1))
            })?,
            error,
        });
    }
    Ok(SweepResult { n_pairs, rows })
}

/// Failure onsets of a one-dimensional sweep, in the sweep's `E_o` units.
#[derive(Debug, Clone, PartialEq)]
pub struct Onset<T> {
    /// Output at zero field.
    pub p0: T,
    /// Onset magnitude for positive field, if the output ever fails there.
    pub positive: Option<T>,
    /// Onset magnitude for negative field.
    pub negative: Option<T>,
    /// Rows skipped because they were degenerate or failed.
    pub excluded: usize,
}

impl<T: Real> Onset<T> {
    /// Onset in only one direction, or onsets differing by more than `tol`.
    pub fn is_asymmetric(&self, tol: T) -> bool {
        match (self.positive, self.negative) {
            (Some(p), Some(n)) => (p - n).abs() > tol,
            (None, None) => false,
            _ => true,
        }
    }

    /// The smaller of the two onsets.
    pub fn nearest(&self) -> Option<T> {
        match (self.positive, self.negative) {
            (Some(p), Some(n)) => Some(p.min(n)),
            (p, n) => p.or(n),
        }
    }
}

/// Locates where the output stops encoding its zero-field bit.
///
/// The output is projected on its zero-field sign, `q = p_out sign(p_out(0))`, and
/// the onset is the smallest `|E|` (per direction) with `q < threshold |p_out(0)|`,
/// linearly interpolated between grid points. Projecting matters: a failing
/// circuit usually flips its output rather than merely shrinking it.
pub fn failure_onset<T: Real>(result: &SweepResult<T>, axis: Axis, threshold: T) -> Result<Onset<T>> {
    if !(threshold > T::zero() && threshold < T::one()) {
        return Err(QcaError::InvalidArgument(format!(
            "threshold must lie in (0, 1), got {threshold}"
        )));
    }
    type Coord<T> = fn(&SweepRow<T>) -> T;
    let (along, across): (Coord<T>, Coord<T>) = match axis {
        Axis::Ex => (|r| r.ex_over_eo, |r| r.ey_over_eo),
        Axis::Ey => (|r| r.ey_over_eo, |r| r.ex_over_eo),
    };
    let Some(first) = result.rows.first() else {
        return Err(QcaError::InvalidSweep("sweep has no rows".into()));
    };
    let fixed = across(first);
    if result.rows.iter().any(|r| across(r) != fixed) {
        return Err(QcaError::InvalidSweep(
            "onset needs a one-dimensional sweep along the chosen axis".into(),
        ));
    }
    let zero = T::lit(ZERO_FIELD);
    let origin = result
        .rows
        .iter()
        .find(|r| along(r).abs() <= zero)
        .ok_or_else(|| QcaError::InvalidSweep("sweep does not include zero field".into()))?;
    if !origin.is_usable() {
        return Err(QcaError::InvalidSweep(
            "zero-field row is degenerate or failed".into(),
        ));
    }
    let p0 = origin.p_out;
    if p0 == T::zero() {
        return Err(QcaError::InvalidSweep("zero-field output is exactly zero".into()));
    }
    let sign = p0.signum();
    let level = threshold * p0.abs();
    let excluded = result.rows.iter().filter(|r| !r.is_usable()).count();
    let usable: Vec<(T, T)> = result
        .rows
        .iter()
        .filter(|r| r.is_usable())
        .map(|r| (along(r), r.p_out * sign))
        .collect();

    let scan = |dir: T| -> Option<T> {
        let mut side: Vec<(T, T)> = usable
            .iter()
            .filter(|(x, _)| *x * dir >= T::zero() || x.abs() <= zero)
            .map(|&(x, q)| (x.abs(), q))
            .collect();
        side.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite field values"));
        for w in side.windows(2) {
            let ((x0, q0), (x1, q1)) = (w[0], w[1]);
            if q1 < level {
                let (f0, f1) = (q0 - level, q1 - level);
                if f0 <= T::zero() {
                    return Some(x0);
                }
                return Some(x0 + (x1 - x0) * f0 / (f0 - f1));
            }
        }
        None
    };
    Ok(Onset {
        p0,
        positive: scan(T::one()),
        negative: scan(-T::one()),
        excluded,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TruthRow<T> {
    pub bits: [bool; 3],
    pub expected: bool,
    /// `Err` holds the solver's message.
    pub p_out: std::result::Result<T, String>,
    pub pass: bool,
}

/// All eight majority-gate input combinations at one field (in `E_o` units).
///
/// A row passes when the output's sign encodes `M(A, B, C)` and `|p_out| >= 0.5`.
pub fn truth_table<T: Real>(
    cfg: &BuildConfig<T>,
    rotated: bool,
    ex_over_eo: T,
    ey_over_eo: T,
    opts: &SolverOptions<T>,
) -> Result<Vec<TruthRow<T>>> {
    let eo = crate::model::field_scale_eo(cfg.geometry.a, &cfg.constants)?;
    let field = FieldVector::new(ex_over_eo * eo, ey_over_eo * eo, T::zero());
    let mut rows = Vec::with_capacity(8);
    for code in 0..8u8 {
        let bits = [code & 4 != 0, code & 2 != 0, code & 1 != 0];
        let layout = build_majority(cfg, bits, rotated)?;
        let expected = majority(bits);
        let p_out = solve_point(&layout, &field, opts)
            .map(|s| s.report.output)
            .map_err(|e| e.to_string());
        let pass = match &p_out {
            Ok(p) => (*p > T::zero()) == expected && p.abs() >= T::lit(0.5),
            Err(_) => false,
        };
        rows.push(TruthRow {
            bits,
            expected,
            p_out,
            pass,
        });
    }
    Ok(rows)
}

//! Stock circuits.
//!
//! Coordinates are multiples of the pair pitch `p` (default `2a`). Every pair is
//! built unrotated (members at `c -/+ (a/2) x`, `a_vec = a y`) and rotated
//! afterwards with [`rotate_pairs`] when requested.
//!
//! | circuit  | drivers                        | device pairs (in cell order)                                   | output |
//! |----------|--------------------------------|----------------------------------------------------------------|--------|
//! | wire     | (0, 0)                         | (k, 0), k = 1..n                                               | last   |
//! | fan-in   | (0, 1), (0, -1)                | (1, 1), (1, -1), (1, 0), (2, 0), (3, 0), (4, 0)                | (4, 0) |
//! | fan-out  | (0, 0)                         | (1, 0), (2, 0), (2, 1), (2, -1), (3, 1), (3, -1)               | (3, ±1)|
//! | inverter | (0, 0)                         | (0, 1), (0, -1), (1, 1), (1, -1), (2, 0), (3, 0)               | (2, 0) |
//! | majority | A (-2m, 0), B (0, 2m), C (0, -2m) | (0, 0), (-m, 0), (0, m), (0, -m), (1, 0), (2, 0)            | (2, 0) |
//!
//! The majority arm length is `m = 1.25`.

use crate::error::{QcaError, Result};
use crate::model::{MoleculeSpec, PhysicalConstants, Role, TwoStateParams, Vec3};
use crate::scalar::Real;

use super::layout::{handedness, CircuitLayout, Geometry};

/// Majority-gate arm length in units of the pitch.
pub const MAJORITY_ARM: f64 = 1.25;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BuildConfig<T> {
    pub geometry: Geometry<T>,
    pub params: TwoStateParams<T>,
    pub constants: PhysicalConstants<T>,
}

impl<T: Real> Default for BuildConfig<T> {
    fn default() -> Self {
        Self {
            geometry: Geometry::default(),
            params: TwoStateParams::default(),
            constants: PhysicalConstants::default(),
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum Slot {
    Device { output: bool },
    Driver { bit: bool },
}

fn dev(x: f64, y: f64) -> ((f64, f64), Slot) {
    ((x, y), Slot::Device { output: false })
}

fn out(x: f64, y: f64) -> ((f64, f64), Slot) {
    ((x, y), Slot::Device { output: true })
}

fn drv(x: f64, y: f64, bit: bool) -> ((f64, f64), Slot) {
    ((x, y), Slot::Driver { bit })
}

fn assemble<T: Real>(
    cfg: &BuildConfig<T>,
    name: &str,
    rotated: bool,
    slots: &[((f64, f64), Slot)],
) -> Result<CircuitLayout<T>> {
    let g = cfg.geometry;
    let half = g.a * T::lit(0.5);
    let a_vec = Vec3::new(T::zero(), g.a, T::zero());
    let mut molecules = Vec::with_capacity(2 * slots.len());
    let mut input_bits = Vec::new();

    let devices = slots.iter().filter(|(_, s)| matches!(s, Slot::Device { .. }));
    let drivers = slots.iter().filter(|(_, s)| matches!(s, Slot::Driver { .. }));
    for (pair_id, ((x, y), slot)) in devices.chain(drivers).enumerate() {
        let c = Vec3::new(T::lit(*x) * g.pitch, T::lit(*y) * g.pitch, T::zero());
        let offset = Vec3::new(half, T::zero(), T::zero());
        let (role_l, role_r, is_output) = match *slot {
            Slot::Device { output } => (Role::Device, Role::Device, output),
            // Unrotated pairs have s = +1, so the left member holds the bit.
            Slot::Driver { bit } => {
                input_bits.push(bit);
                (Role::Driver { bit }, Role::Driver { bit: !bit }, false)
            }
        };
        for (center, role) in [(c - offset, role_l), (c + offset, role_r)] {
            molecules.push(MoleculeSpec {
                id: molecules.len() as u32,
                center,
                a_vec,
                h: g.h,
                role,
                pair_id: pair_id as u32 + 1,
                pair_sign: 1,
                is_output,
            });
        }
    }
    let layout = CircuitLayout {
        name: name.to_string(),
        rotated: false,
        input_bits,
        geometry: g,
        params: cfg.params,
        constants: cfg.constants,
        molecules,
    };
    let layout = if rotated { rotate_pairs(&layout)? } else { layout };
    layout.validate()?;
    Ok(layout)
}

/// Driver pair at the origin followed by `n_pairs` device pairs along +x.
pub fn build_wire<T: Real>(
    cfg: &BuildConfig<T>,
    n_pairs: usize,
    input_bit: bool,
    rotated: bool,
) -> Result<CircuitLayout<T>> {
    if n_pairs == 0 {
        return Err(QcaError::InvalidArgument("a wire needs at least one pair".into()));
    }
    let mut slots: Vec<_> = (1..n_pairs).map(|k| dev(k as f64, 0.0)).collect();
    slots.push(out(n_pairs as f64, 0.0));
    slots.push(drv(0.0, 0.0, input_bit));
    assemble(cfg, "wire", rotated, &slots)
}

/// Two drivers carrying the same bit merge through a junction into a 3-pair tail.
pub fn build_fan_in<T: Real>(
    cfg: &BuildConfig<T>,
    input_bit: bool,
    rotated: bool,
) -> Result<CircuitLayout<T>> {
    let slots = [
        dev(1.0, 1.0),
        dev(1.0, -1.0),
        dev(1.0, 0.0),
        dev(2.0, 0.0),
        dev(3.0, 0.0),
        out(4.0, 0.0),
        drv(0.0, 1.0, input_bit),
        drv(0.0, -1.0, input_bit),
    ];
    assemble(cfg, "fanin", rotated, &slots)
}

/// One driver, a 2-pair trunk ending in a junction, two branches, two outputs.
pub fn build_fan_out<T: Real>(
    cfg: &BuildConfig<T>,
    input_bit: bool,
    rotated: bool,
) -> Result<CircuitLayout<T>> {
    let slots = [
        dev(1.0, 0.0),
        dev(2.0, 0.0),
        dev(2.0, 1.0),
        dev(2.0, -1.0),
        out(3.0, 1.0),
        out(3.0, -1.0),
        drv(0.0, 0.0, input_bit),
    ];
    assemble(cfg, "fanout", rotated, &slots)
}

/// Two parallel branches beside the driver couple diagonally onto the output pair.
pub fn build_inverter<T: Real>(
    cfg: &BuildConfig<T>,
    input_bit: bool,
    rotated: bool,
) -> Result<CircuitLayout<T>> {
    let slots = [
        dev(0.0, 1.0),
        dev(0.0, -1.0),
        dev(1.0, 1.0),
        dev(1.0, -1.0),
        out(2.0, 0.0),
        dev(3.0, 0.0),
        drv(0.0, 0.0, input_bit),
    ];
    assemble(cfg, "inverter", rotated, &slots)
}

/// Three-input majority gate; inputs `(A, B, C)` enter from west, north and south.
pub fn build_majority<T: Real>(
    cfg: &BuildConfig<T>,
    bits: [bool; 3],
    rotated: bool,
) -> Result<CircuitLayout<T>> {
    let m = MAJORITY_ARM;
    let slots = [
        dev(0.0, 0.0),
        dev(-m, 0.0),
        dev(0.0, m),
        dev(0.0, -m),
        dev(1.0, 0.0),
        out(2.0, 0.0),
        drv(-2.0 * m, 0.0, bits[0]),
        drv(0.0, 2.0 * m, bits[1]),
        drv(0.0, -2.0 * m, bits[2]),
    ];
    assemble(cfg, "majority", rotated, &slots)
}

/// Bitwise majority.
pub fn majority(bits: [bool; 3]) -> bool {
    bits.iter().filter(|&&b| b).count() >= 2
}

fn pair_groups<T: Real>(layout: &CircuitLayout<T>) -> Result<Vec<(usize, usize)>> {
    let mut v: Vec<(usize, usize)> = Vec::new();
    let cells: Vec<usize> = (0..layout.molecules.len())
        .filter(|&i| layout.molecules[i].role.is_device())
        .collect();
    for p in layout.device_pairs()? {
        v.push((cells[p.left], cells[p.right]));
    }
    for p in layout.driver_pairs()? {
        v.push((p.left, p.right));
    }
    Ok(v)
}

/// Turns every pair by -90° about its own center (`y -> x`, `x -> -y`).
///
/// Pair centers stay put; molecule positions and `a_vec` rotate together, so the
/// handedness sign and every driver's bit are preserved.
pub fn rotate_pairs<T: Real>(layout: &CircuitLayout<T>) -> Result<CircuitLayout<T>> {
    let mut out = layout.clone();
    let half = T::lit(0.5);
    for (l, r) in pair_groups(layout)? {
        let pc = (layout.molecules[l].center + layout.molecules[r].center) * half;
        for i in [l, r] {
            let m = &mut out.molecules[i];
            m.center = pc + (m.center - pc).rotate_z_quarter(-1);
            m.a_vec = m.a_vec.rotate_z_quarter(-1);
        }
        let s = handedness(&out.molecules[l], &out.molecules[r])?;
        out.molecules[l].pair_sign = s;
        out.molecules[r].pair_sign = s;
    }
    out.rotated = !layout.rotated;
    Ok(out)
}

/// Exact mirror image about the x axis, with dot labels swapped so that the
/// in-plane `a_vec` component along y is kept.
///
/// Positions map `y -> -y` and `a_vec -> (-a_x, a_y, -a_z)`. Driver states and
/// input bits are complemented. Under `E_y -> -E_y` every cell polarization of the
/// image is the negative of the original's.
pub fn mirror_y<T: Real>(layout: &CircuitLayout<T>) -> Result<CircuitLayout<T>> {
    let mut out = layout.clone();
    for m in &mut out.molecules {
        m.center.y = -m.center.y;
        m.a_vec = Vec3::new(-m.a_vec.x, m.a_vec.y, -m.a_vec.z);
        if let Role::Driver { bit } = m.role {
            m.role = Role::Driver { bit: !bit };
        }
    }
    for (l, r) in pair_groups(&out)? {
        let s = handedness(&out.molecules[l], &out.molecules[r])?;
        out.molecules[l].pair_sign = s;
        out.molecules[r].pair_sign = s;
    }
    out.input_bits = layout.input_bits.iter().map(|b| !b).collect();
    Ok(out)
}

/// Keeps drivers and the first `n_pairs` device pairs. If every output pair was
/// dropped, the last kept pair becomes the output.
pub fn truncate<T: Real>(layout: &CircuitLayout<T>, n_pairs: usize) -> Result<CircuitLayout<T>> {
    if n_pairs == 0 {
        return Err(QcaError::InvalidArgument("must keep at least one pair".into()));
    }
    let pairs = layout.device_pairs()?;
    if n_pairs >= pairs.len() {
        return Ok(layout.clone());
    }
    let kept: Vec<u32> = pairs[..n_pairs].iter().map(|p| p.pair_id).collect();
    let mut out = layout.clone();
    out.molecules
        .retain(|m| !m.role.is_device() || kept.contains(&m.pair_id));
    if !out.molecules.iter().any(|m| m.role.is_device() && m.is_output) {
        let last = kept[n_pairs - 1];
        for m in out.molecules.iter_mut().filter(|m| m.pair_id == last) {
            m.is_output = true;
        }
    }
    out.name = format!("{}-first{}", layout.name, n_pairs);
    out.validate()?;
    Ok(out)
}

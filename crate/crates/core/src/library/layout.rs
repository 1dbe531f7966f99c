use std::collections::BTreeMap;

use crate::error::{QcaError, Result};
use crate::model::{field_scale_eo, MoleculeSpec, PhysicalConstants, Role, TwoStateParams};
use crate::scalar::Real;

/// Largest device count the stock builders produce.
pub const STOCK_MAX_CELLS: usize = 14;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Geometry<T> {
    /// Active-dot separation `|a_vec|`, nm.
    pub a: T,
    /// Active-dot elevation, nm.
    pub h: T,
    /// Center-to-center spacing of neighbouring pairs, nm.
    pub pitch: T,
}

impl<T: Real> Default for Geometry<T> {
    fn default() -> Self {
        Self {
            a: T::one(),
            h: T::lit(0.5),
            pitch: T::lit(2.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CircuitLayout<T> {
    pub name: String,
    pub rotated: bool,
    /// Bits carried by the driver pairs, in driver order.
    pub input_bits: Vec<bool>,
    pub geometry: Geometry<T>,
    pub params: TwoStateParams<T>,
    pub constants: PhysicalConstants<T>,
    /// Device molecules first (they become Hilbert-space cells in this order),
    /// then driver molecules.
    pub molecules: Vec<MoleculeSpec<T>>,
}

/// Two device cells forming one logical pair. `left` is the first-listed member.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DevicePair {
    pub pair_id: u32,
    pub left: usize,
    pub right: usize,
    pub sign: i8,
    pub is_output: bool,
}

/// Two driver molecules forming one classical input pair (molecule indices).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DriverPair {
    pub pair_id: u32,
    pub left: usize,
    pub right: usize,
    pub sign: i8,
    pub bit: bool,
}

/// Pair handedness `s = sign(z . ((c_R - c_L) x a_L))`.
pub fn handedness<T: Real>(left: &MoleculeSpec<T>, right: &MoleculeSpec<T>) -> Result<i8> {
    let d = right.center - left.center;
    let z = d.cross(left.a_vec).z;
    let scale = d.norm() * left.a_vec.norm();
    if z.is_nan() || z.abs() <= T::lit(1e-9) * scale {
        return Err(QcaError::Pairing {
            pair_id: left.pair_id as i64,
            message: "pair axis is parallel to a_vec; handedness undefined".into(),
        });
    }
    Ok(if z > T::zero() { 1 } else { -1 })
}

fn pol(bit: bool) -> i8 {
    if bit {
        1
    } else {
        -1
    }
}

impl<T: Real> CircuitLayout<T> {
    pub fn devices(&self) -> Vec<&MoleculeSpec<T>> {
        self.molecules.iter().filter(|m| m.role.is_device()).collect()
    }

    pub fn drivers(&self) -> Vec<&MoleculeSpec<T>> {
        self.molecules.iter().filter(|m| !m.role.is_device()).collect()
    }

    /// Number of device molecules `M`.
    pub fn cell_count(&self) -> usize {
        self.molecules.iter().filter(|m| m.role.is_device()).count()
    }

    /// Field scale `E_o` for this layout's cell size.
    pub fn eo(&self) -> Result<T> {
        field_scale_eo(self.geometry.a, &self.constants)
    }

    /// Groups molecule indices by pair id, preserving first-appearance order.
    fn group(&self, device: bool) -> Result<Vec<(u32, Vec<usize>)>> {
        let mut order: Vec<u32> = Vec::new();
        let mut groups: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
        for (i, m) in self.molecules.iter().enumerate() {
            if m.role.is_device() != device {
                continue;
            }
            let entry = groups.entry(m.pair_id).or_insert_with(|| {
                order.push(m.pair_id);
                Vec::new()
            });
            entry.push(i);
        }
        order
            .into_iter()
            .map(|id| {
                let members = groups.remove(&id).unwrap_or_default();
                if members.len() != 2 {
                    return Err(QcaError::Pairing {
                        pair_id: id as i64,
                        message: format!("pair has {} member(s), expected 2", members.len()),
                    });
                }
                Ok((id, members))
            })
            .collect()
    }

    /// Device pairs in order of first appearance; `left`/`right` are cell indices.
    pub fn device_pairs(&self) -> Result<Vec<DevicePair>> {
        let mut cell_of = vec![usize::MAX; self.molecules.len()];
        let mut next = 0;
        for (i, m) in self.molecules.iter().enumerate() {
            if m.role.is_device() {
                cell_of[i] = next;
                next += 1;
            }
        }
        self.group(true)?
            .into_iter()
            .map(|(pair_id, idx)| {
                let (l, r) = (&self.molecules[idx[0]], &self.molecules[idx[1]]);
                if l.pair_sign != r.pair_sign || l.is_output != r.is_output {
                    return Err(QcaError::Pairing {
                        pair_id: pair_id as i64,
                        message: "members disagree on pair_sign or is_output".into(),
                    });
                }
                Ok(DevicePair {
                    pair_id,
                    left: cell_of[idx[0]],
                    right: cell_of[idx[1]],
                    sign: l.pair_sign,
                    is_output: l.is_output,
                })
            })
            .collect()
    }

    pub fn driver_pairs(&self) -> Result<Vec<DriverPair>> {
        self.group(false)?
            .into_iter()
            .map(|(pair_id, idx)| {
                let (l, r) = (&self.molecules[idx[0]], &self.molecules[idx[1]]);
                let (Role::Driver { bit: bl }, Role::Driver { bit: br }) = (l.role, r.role) else {
                    unreachable!("grouped by role")
                };
                if bl == br {
                    return Err(QcaError::Pairing {
                        pair_id: pair_id as i64,
                        message: "driver molecules are kinked; they must hold opposite states".into(),
                    });
                }
                if l.pair_sign != r.pair_sign || l.is_output || r.is_output {
                    return Err(QcaError::Pairing {
                        pair_id: pair_id as i64,
                        message: "driver members disagree on pair_sign or are flagged output".into(),
                    });
                }
                // P_pair = s (P_L - P_R) / 2 = s P_L for an unkinked pair.
                let bit = l.pair_sign * pol(bl) > 0;
                Ok(DriverPair {
                    pair_id,
                    left: idx[0],
                    right: idx[1],
                    sign: l.pair_sign,
                    bit,
                })
            })
            .collect()
    }

    /// Rewrites the driver states so that driver pair `i` carries `bits[i]`.
    pub fn set_input_bits(&mut self, bits: &[bool]) -> Result<()> {
        let pairs = self.driver_pairs()?;
        if pairs.len() != bits.len() {
            return Err(QcaError::DimensionMismatch {
                expected: pairs.len(),
                got: bits.len(),
            });
        }
        for (p, &bit) in pairs.iter().zip(bits) {
            let left_state = p.sign * pol(bit) > 0;
            self.molecules[p.left].role = Role::Driver { bit: left_state };
            self.molecules[p.right].role = Role::Driver { bit: !left_state };
        }
        self.input_bits = bits.to_vec();
        Ok(())
    }

    /// Checks every structural and geometric invariant.
    pub fn validate(&self) -> Result<()> {
        self.constants.validate()?;
        self.params.validate()?;
        let g = self.geometry;
        if !(g.a.is_finite() && g.a > T::zero()) {
            return Err(QcaError::InvalidGeometry(format!("a must be positive, got {}", g.a)));
        }
        if !(g.h.is_finite() && g.h >= T::zero()) {
            return Err(QcaError::InvalidGeometry(format!("h must be non-negative, got {}", g.h)));
        }
        if !(g.pitch.is_finite() && g.pitch > T::zero()) {
            return Err(QcaError::InvalidGeometry(format!(
                "pitch must be positive, got {}",
                g.pitch
            )));
        }

        let mut ids = std::collections::BTreeSet::new();
        for m in &self.molecules {
            m.validate()?;
            if !ids.insert(m.id) {
                return Err(QcaError::InvalidGeometry(format!("duplicate molecule id {}", m.id)));
            }
        }
        if self.cell_count() == 0 {
            return Err(QcaError::InvalidGeometry("layout has no device molecules".into()));
        }
        let mut seen_driver = false;
        for m in &self.molecules {
            if m.role.is_device() && seen_driver {
                return Err(QcaError::InvalidGeometry(format!(
                    "device molecule {} listed after a driver molecule",
                    m.id
                )));
            }
            seen_driver |= !m.role.is_device();
        }

        let min_sep = g.a * T::lit(0.5);
        for (i, p) in self.molecules.iter().enumerate() {
            for q in &self.molecules[i + 1..] {
                if (p.center - q.center).norm() < min_sep {
                    return Err(QcaError::InvalidGeometry(format!(
                        "molecules {} and {} are closer than a/2",
                        p.id, q.id
                    )));
                }
            }
        }

        let devices = self.device_pairs()?;
        let drivers = self.driver_pairs()?;
        let device_ids: std::collections::BTreeSet<u32> =
            devices.iter().map(|p| p.pair_id).collect();
        for d in &drivers {
            if device_ids.contains(&d.pair_id) {
                return Err(QcaError::Pairing {
                    pair_id: d.pair_id as i64,
                    message: "pair mixes device and driver molecules".into(),
                });
            }
        }
        let cells = self.devices();
        for p in &devices {
            let s = handedness(cells[p.left], cells[p.right])?;
            if s != p.sign {
                return Err(QcaError::Pairing {
                    pair_id: p.pair_id as i64,
                    message: format!("pair_sign {} disagrees with geometry ({s})", p.sign),
                });
            }
        }
        for p in &drivers {
            let s = handedness(&self.molecules[p.left], &self.molecules[p.right])?;
            if s != p.sign {
                return Err(QcaError::Pairing {
                    pair_id: p.pair_id as i64,
                    message: format!("pair_sign {} disagrees with geometry ({s})", p.sign),
                });
            }
        }
        if !devices.iter().any(|p| p.is_output) {
            return Err(QcaError::NoOutput);
        }
        if !self.input_bits.is_empty() {
            let bits: Vec<bool> = drivers.iter().map(|p| p.bit).collect();
            if bits != self.input_bits {
                return Err(QcaError::InvalidGeometry(
                    "input_bits metadata disagrees with driver states".into(),
                ));
            }
        }
        Ok(())
    }
}

//! JSON layout documents.
//!
//! ```json
//! {
//!   "format_version": 1,
//!   "circuit": { "name": "wire", "rotated": false, "input_bits": [1], "pitch_nm": 2.0 },
//!   "constants": { "coulomb_k_eV_nm": 1.43996454784, "epsilon_r": 1.0 },
//!   "cell": { "a_nm": 1.0, "h_nm": 0.5, "gamma_eff_eV": 0.01, "delta_o_eV": 0.0 },
//!   "molecules": [
//!     { "id": 0, "center_nm": [1.5, 0, 0], "a_vec_nm": [0, 1, 0], "role": "device",
//!       "pair_id": 1, "pair_sign": 1, "is_output": true },
//!     { "id": 2, "center_nm": [-0.5, 0, 0], "a_vec_nm": [0, 1, 0], "role": "driver",
//!       "driver_bit": 1, "pair_id": 2, "pair_sign": 1, "is_output": false }
//!   ]
//! }
//! ```
//!
//! `driver_bit` is the occupied active dot of that driver molecule. Reals are
//! written with 17 significant digits, so a save/load cycle is exact for `f64`.
//! Unknown keys are rejected.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::value::RawValue;

use crate::error::{QcaError, Result};
use crate::model::{MoleculeSpec, PhysicalConstants, Role, TwoStateParams, Vec3};
use crate::scalar::Real;

use super::layout::{CircuitLayout, Geometry};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq)]
struct Num(f64);

impl Serialize for Num {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if !self.0.is_finite() {
            return Err(serde::ser::Error::custom("non-finite number in layout"));
        }
        let raw = RawValue::from_string(format!("{:.16e}", self.0))
            .map_err(serde::ser::Error::custom)?;
        raw.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Num {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        f64::deserialize(d).map(Num)
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Document {
    format_version: u32,
    circuit: CircuitDoc,
    constants: ConstantsDoc,
    cell: CellDoc,
    molecules: Vec<MoleculeDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CircuitDoc {
    name: String,
    rotated: bool,
    input_bits: Vec<Bit>,
    pitch_nm: Num,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[allow(non_snake_case)]
struct ConstantsDoc {
    coulomb_k_eV_nm: Num,
    epsilon_r: Num,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[allow(non_snake_case)]
struct CellDoc {
    a_nm: Num,
    h_nm: Num,
    gamma_eff_eV: Num,
    delta_o_eV: Num,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum RoleDoc {
    Device,
    Driver,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Bit(bool);

impl Serialize for Bit {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_u8(self.0 as u8)
    }
}

impl<'de> Deserialize<'de> for Bit {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        match u8::deserialize(d)? {
            0 => Ok(Bit(false)),
            1 => Ok(Bit(true)),
            other => Err(D::Error::custom(format!("bit must be 0 or 1, got {other}"))),
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MoleculeDoc {
    id: u32,
    center_nm: [Num; 3],
    a_vec_nm: [Num; 3],
    role: RoleDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    driver_bit: Option<Bit>,
    pair_id: u32,
    pair_sign: i8,
    is_output: bool,
}

fn vec_doc<T: Real>(v: Vec3<T>) -> [Num; 3] {
    v.to_f64().map(Num)
}

fn vec_from<T: Real>(v: &[Num; 3]) -> Vec3<T> {
    Vec3::from_f64([v[0].0, v[1].0, v[2].0])
}

/// Serializes a layout to pretty-printed JSON (trailing newline included).
pub fn save_layout<T: Real>(layout: &CircuitLayout<T>) -> Result<String> {
    let g = layout.geometry;
    let doc = Document {
        format_version: FORMAT_VERSION,
        circuit: CircuitDoc {
            name: layout.name.clone(),
            rotated: layout.rotated,
            input_bits: layout.input_bits.iter().map(|&b| Bit(b)).collect(),
            pitch_nm: Num(g.pitch.as_f64()),
        },
        constants: ConstantsDoc {
            coulomb_k_eV_nm: Num(layout.constants.coulomb_k.as_f64()),
            epsilon_r: Num(layout.constants.epsilon_r.as_f64()),
        },
        cell: CellDoc {
            a_nm: Num(g.a.as_f64()),
            h_nm: Num(g.h.as_f64()),
            gamma_eff_eV: Num(layout.params.gamma_eff.as_f64()),
            delta_o_eV: Num(layout.params.delta_o.as_f64()),
        },
        molecules: layout
            .molecules
            .iter()
            .map(|m| MoleculeDoc {
                id: m.id,
                center_nm: vec_doc(m.center),
                a_vec_nm: vec_doc(m.a_vec),
                role: if m.role.is_device() {
                    RoleDoc::Device
                } else {
                    RoleDoc::Driver
                },
                driver_bit: match m.role {
                    Role::Driver { bit } => Some(Bit(bit)),
                    Role::Device => None,
                },
                pair_id: m.pair_id,
                pair_sign: m.pair_sign,
                is_output: m.is_output,
            })
            .collect(),
    };
    let mut text = serde_json::to_string_pretty(&doc).map_err(|e| QcaError::Schema {
        line: 0,
        column: 0,
        message: e.to_string(),
    })?;
    text.push('\n');
    Ok(text)
}

/// Parses and validates a layout document.
pub fn load_layout<T: Real>(text: &str) -> Result<CircuitLayout<T>> {
    let doc: Document = serde_json::from_str(text).map_err(|e| QcaError::Schema {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let schema = |message: String| QcaError::Schema {
        line: 0,
        column: 0,
        message,
    };
    if doc.format_version != FORMAT_VERSION {
        return Err(schema(format!(
            "unsupported format_version {}, expected {FORMAT_VERSION}",
            doc.format_version
        )));
    }
    let h = T::lit(doc.cell.h_nm.0);
    let mut molecules = Vec::with_capacity(doc.molecules.len());
    for (i, m) in doc.molecules.iter().enumerate() {
        let role = match (m.role, m.driver_bit) {
            (RoleDoc::Device, None) => Role::Device,
            (RoleDoc::Driver, Some(Bit(bit))) => Role::Driver { bit },
            (RoleDoc::Device, Some(_)) => {
                return Err(schema(format!("molecules[{i}]: device molecule has driver_bit")))
            }
            (RoleDoc::Driver, None) => {
                return Err(schema(format!("molecules[{i}]: driver molecule lacks driver_bit")))
            }
        };
        molecules.push(MoleculeSpec {
            id: m.id,
            center: vec_from(&m.center_nm),
            a_vec: vec_from(&m.a_vec_nm),
            h,
            role,
            pair_id: m.pair_id,
            pair_sign: m.pair_sign,
            is_output: m.is_output,
        });
    }
    let layout = CircuitLayout {
        name: doc.circuit.name,
        rotated: doc.circuit.rotated,
        input_bits: doc.circuit.input_bits.iter().map(|b| b.0).collect(),
        geometry: Geometry {
            a: T::lit(doc.cell.a_nm.0),
            h,
            pitch: T::lit(doc.circuit.pitch_nm.0),
        },
        params: TwoStateParams {
            gamma_eff: T::lit(doc.cell.gamma_eff_eV.0),
            delta_o: T::lit(doc.cell.delta_o_eV.0),
        },
        constants: PhysicalConstants {
            coulomb_k: T::lit(doc.constants.coulomb_k_eV_nm.0),
            q_e: T::one(),
            epsilon_r: T::lit(doc.constants.epsilon_r.0),
        },
        molecules,
    };
    for m in &layout.molecules {
        if (m.a_vec.norm() - layout.geometry.a).abs() > T::lit(1e-9) * layout.geometry.a {
            return Err(QcaError::InvalidGeometry(format!(
                "molecule {}: |a_vec| differs from cell a_nm",
                m.id
            )));
        }
    }
    layout.validate()?;
    Ok(layout)
}

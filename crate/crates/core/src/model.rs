//! Units, geometry primitives, and the two-state cell parameterization.
//!
//! Energies are in eV, lengths in nm, fields in V/nm and charges in units of the
//! fundamental charge, so `1 q_e · (V/nm) · nm = 1 eV` and no conversion factors
//! appear anywhere in the numerical paths.
//!
//! Frame: signal flows along x, the input (dominant unwanted) field is along y,
//! and the clock acts along z.

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{QcaError, Result};
use crate::scalar::Real;

/// `q_e^2 / (4 pi eps_0)` in eV nm (CODATA 2018).
pub const COULOMB_K_EV_NM: f64 = 1.439_964_547_84;

/// Coulomb prefactor and dielectric environment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalConstants<T> {
    /// `q_e^2 / 4 pi eps_0` in eV nm.
    pub coulomb_k: T,
    /// Fundamental charge in the unit system; always one.
    pub q_e: T,
    pub epsilon_r: T,
}

impl<T: Real> Default for PhysicalConstants<T> {
    fn default() -> Self {
        Self {
            coulomb_k: T::lit(COULOMB_K_EV_NM),
            q_e: T::one(),
            epsilon_r: T::one(),
        }
    }
}

impl<T: Real> PhysicalConstants<T> {
    pub fn with_epsilon_r(epsilon_r: T) -> Result<Self> {
        let c = Self {
            epsilon_r,
            ..Self::default()
        };
        c.validate()?;
        Ok(c)
    }

    /// Screened prefactor `coulomb_k / epsilon_r`.
    #[inline]
    pub fn k_eff(&self) -> T {
        self.coulomb_k / self.epsilon_r
    }

    pub fn validate(&self) -> Result<()> {
        let k = self.k_eff();
        if !(k.is_finite() && k > T::zero()) {
            return Err(QcaError::InvalidArgument(format!(
                "coulomb_k/epsilon_r must be positive and finite, got {k}"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec3<T> {
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T: Real> Vec3<T> {
    pub const fn new(x: T, y: T, z: T) -> Self {
        Self { x, y, z }
    }

    pub fn zero() -> Self {
        Self::new(T::zero(), T::zero(), T::zero())
    }

    pub fn x_hat() -> Self {
        Self::new(T::one(), T::zero(), T::zero())
    }

    pub fn y_hat() -> Self {
        Self::new(T::zero(), T::one(), T::zero())
    }

    pub fn z_hat() -> Self {
        Self::new(T::zero(), T::zero(), T::one())
    }

    pub fn from_f64(v: [f64; 3]) -> Self {
        Self::new(T::lit(v[0]), T::lit(v[1]), T::lit(v[2]))
    }

    pub fn to_f64(self) -> [f64; 3] {
        [self.x.as_f64(), self.y.as_f64(), self.z.as_f64()]
    }

    #[inline]
    pub fn dot(self, other: Self) -> T {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    #[inline]
    pub fn cross(self, other: Self) -> Self {
        Self::new(
            self.y * other.z - self.z * other.y,
            self.z * other.x - self.x * other.z,
            self.x * other.y - self.y * other.x,
        )
    }

    #[inline]
    pub fn norm(self) -> T {
        self.dot(self).sqrt()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    /// Rotation by `quarter_turns * 90°` about z. Exact: only swaps and negations.
    pub fn rotate_z_quarter(self, quarter_turns: i32) -> Self {
        match quarter_turns.rem_euclid(4) {
            0 => self,
            1 => Self::new(-self.y, self.x, self.z),
            2 => Self::new(-self.x, -self.y, self.z),
            _ => Self::new(self.y, -self.x, self.z),
        }
    }
}

impl<T: Real> Add for Vec3<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl<T: Real> Sub for Vec3<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl<T: Real> Mul<T> for Vec3<T> {
    type Output = Self;
    fn mul(self, s: T) -> Self {
        Self::new(self.x * s, self.y * s, self.z * s)
    }
}

impl<T: Real> Neg for Vec3<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y, -self.z)
    }
}

/// Uniform applied electric field in V/nm.
///
/// Only `ex` and `ey` enter two-state detunings; `ez` is the clock and is absorbed
/// into the effective tunneling energy.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FieldVector<T> {
    pub ex: T,
    pub ey: T,
    pub ez: T,
}

impl<T: Real> FieldVector<T> {
    pub fn new(ex: T, ey: T, ez: T) -> Self {
        Self { ex, ey, ez }
    }

    pub fn zero() -> Self {
        Self::new(T::zero(), T::zero(), T::zero())
    }

    pub fn in_plane(ex: T, ey: T) -> Self {
        Self::new(ex, ey, T::zero())
    }

    pub fn as_vec3(self) -> Vec3<T> {
        Vec3::new(self.ex, self.ey, self.ez)
    }

    pub fn is_finite(self) -> bool {
        self.as_vec3().is_finite()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Role {
    Device,
    /// Frozen classical charge source; `bit` names the occupied active dot.
    Driver { bit: bool },
}

impl Role {
    pub fn is_device(self) -> bool {
        matches!(self, Role::Device)
    }
}

/// Which of the three localized electron sites is occupied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CellState {
    Zero,
    One,
    Null,
}

impl CellState {
    pub fn from_bit(bit: bool) -> Self {
        if bit {
            CellState::One
        } else {
            CellState::Zero
        }
    }
}

/// One three-dot molecule.
///
/// The null dot sits at `center`; active dots 0 and 1 are elevated by `h` and split
/// by `a_vec`, which points from dot 0 to dot 1.
#[derive(Debug, Clone, PartialEq)]
pub struct MoleculeSpec<T> {
    pub id: u32,
    pub center: Vec3<T>,
    pub a_vec: Vec3<T>,
    pub h: T,
    pub role: Role,
    pub pair_id: u32,
    /// Handedness sign `s` of the pair this molecule belongs to (`+1` or `-1`).
    pub pair_sign: i8,
    pub is_output: bool,
}

impl<T: Real> MoleculeSpec<T> {
    pub fn null_dot(&self) -> Vec3<T> {
        self.center
    }

    pub fn active_dot(&self, bit: bool) -> Vec3<T> {
        let half = self.a_vec * T::lit(0.5);
        let raised = self.center + Vec3::z_hat() * self.h;
        if bit {
            raised + half
        } else {
            raised - half
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.center.is_finite() && self.a_vec.is_finite() && self.h.is_finite()) {
            return Err(QcaError::InvalidGeometry(format!(
                "molecule {} has non-finite coordinates",
                self.id
            )));
        }
        if self.a_vec.norm() <= T::zero() {
            return Err(QcaError::InvalidGeometry(format!(
                "molecule {} has zero-length a_vec",
                self.id
            )));
        }
        if self.h < T::zero() {
            return Err(QcaError::InvalidGeometry(format!(
                "molecule {} has negative elevation h",
                self.id
            )));
        }
        if self.pair_sign != 1 && self.pair_sign != -1 {
            return Err(QcaError::Pairing {
                pair_id: self.pair_id as i64,
                message: format!("pair_sign must be +1 or -1, got {}", self.pair_sign),
            });
        }
        Ok(())
    }
}

/// Two-state cell parameters: effective tunneling and chemical bias.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoStateParams<T> {
    pub gamma_eff: T,
    pub delta_o: T,
}

impl<T: Real> Default for TwoStateParams<T> {
    fn default() -> Self {
        Self {
            gamma_eff: T::lit(0.010),
            delta_o: T::zero(),
        }
    }
}

impl<T: Real> TwoStateParams<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.gamma_eff.is_finite() && self.gamma_eff > T::zero()) {
            return Err(QcaError::InvalidArgument(format!(
                "gamma_eff must be positive, got {}",
                self.gamma_eff
            )));
        }
        if !self.delta_o.is_finite() {
            return Err(QcaError::InvalidArgument("delta_o must be finite".into()));
        }
        Ok(())
    }
}

/// Field strength `E_o = E_k / (q_e a)` that kinks an isolated cell pair, in V/nm.
pub fn field_scale_eo<T: Real>(a: T, constants: &PhysicalConstants<T>) -> Result<T> {
    if !(a.is_finite() && a > T::zero()) {
        return Err(QcaError::InvalidGeometry(format!(
            "cell size a must be positive, got {a}"
        )));
    }
    let factor = T::one() - T::one() / T::lit(2.0).sqrt();
    Ok(constants.k_eff() * factor / (a * a))
}

/// Active-state detuning `Δ_E = -q_e E·a` in eV.
pub fn detuning_from_field<T: Real>(
    molecule: &MoleculeSpec<T>,
    field: &FieldVector<T>,
    constants: &PhysicalConstants<T>,
) -> T {
    -constants.q_e * field.as_vec3().dot(molecule.a_vec)
}

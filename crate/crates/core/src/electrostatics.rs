//! Point-charge electrostatics between molecules.
//!
//! A molecule in an active state carries `-1` on the occupied active dot and `+1`
//! on its null dot. In the null state the electron sits on the null dot with the
//! neutralizing charge, so the molecule carries no net charge at all.

use crate::error::{QcaError, Result};
use crate::library::CircuitLayout;
use crate::model::{CellState, MoleculeSpec, PhysicalConstants, Role, Vec3};
use crate::scalar::Real;

/// Minimum separation treated as distinct, in nm.
const COINCIDENCE_NM: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct ChargeConfig<T> {
    pub charges: Vec<(Vec3<T>, T)>,
}

impl<T: Real> ChargeConfig<T> {
    pub fn new(charges: Vec<(Vec3<T>, T)>) -> Self {
        Self { charges }
    }

    pub fn of_molecule(molecule: &MoleculeSpec<T>, state: CellState) -> Self {
        let charges = match state {
            CellState::Zero | CellState::One => vec![
                (molecule.active_dot(state == CellState::One), -T::one()),
                (molecule.null_dot(), T::one()),
            ],
            CellState::Null => Vec::new(),
        };
        Self { charges }
    }

    /// Charges of a driver molecule, or of a device molecule in the given state.
    pub fn of_driver(molecule: &MoleculeSpec<T>) -> Option<Self> {
        match molecule.role {
            Role::Driver { bit } => Some(Self::of_molecule(molecule, CellState::from_bit(bit))),
            Role::Device => None,
        }
    }
}

/// Interaction energy `Σ k q_i q_j / (ε_r r_ij)` between two charge sets, in eV.
pub fn coulomb_energy<T: Real>(
    c1: &ChargeConfig<T>,
    c2: &ChargeConfig<T>,
    constants: &PhysicalConstants<T>,
) -> Result<T> {
    let k = constants.k_eff();
    let eps = T::lit(COINCIDENCE_NM);
    let mut total = T::zero();
    for &(p1, q1) in &c1.charges {
        for &(p2, q2) in &c2.charges {
            let r = (p1 - p2).norm();
            if r.is_nan() || r <= eps {
                let [x, y, z] = p1.to_f64();
                return Err(QcaError::SingularGeometry { x, y, z });
            }
            total += k * q1 * q2 / r;
        }
    }
    Ok(total)
}

/// Energy cost of a kink in an isolated cell pair, `k (1 - 1/√2) / (ε_r a)`.
pub fn kink_energy<T: Real>(a: T, constants: &PhysicalConstants<T>) -> Result<T> {
    if !(a.is_finite() && a > T::zero()) {
        return Err(QcaError::InvalidGeometry(format!(
            "cell size a must be positive, got {a}"
        )));
    }
    Ok(constants.k_eff() * (T::one() - T::one() / T::lit(2.0).sqrt()) / a)
}

/// Coupling between device cells `j < k`: `energy[s_j][s_k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PairInteraction<T> {
    pub j: usize,
    pub k: usize,
    pub energy: [[T; 2]; 2],
}

/// State-resolved electrostatic energies for a circuit's device cells.
///
/// Nothing is dropped: entries are full Coulomb sums, including the null-dot
/// charges, so the table differs from any "shifted" variant only by a constant.
#[derive(Debug, Clone, PartialEq)]
pub struct InteractionTable<T> {
    pub cells: usize,
    pub pairs: Vec<PairInteraction<T>>,
    /// Potential energy `d_j(s_j)` of device cell `j` in the field of all drivers.
    pub driver: Vec<[T; 2]>,
}

impl<T: Real> InteractionTable<T> {
    pub fn build(
        devices: &[&MoleculeSpec<T>],
        drivers: &[&MoleculeSpec<T>],
        constants: &PhysicalConstants<T>,
    ) -> Result<Self> {
        let configs: Vec<[ChargeConfig<T>; 2]> = devices
            .iter()
            .map(|m| {
                [
                    ChargeConfig::of_molecule(m, CellState::Zero),
                    ChargeConfig::of_molecule(m, CellState::One),
                ]
            })
            .collect();
        let driver_configs: Vec<ChargeConfig<T>> =
            drivers.iter().filter_map(|m| ChargeConfig::of_driver(m)).collect();

        let n = devices.len();
        let mut pairs = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for j in 0..n {
            for k in j + 1..n {
                let mut energy = [[T::zero(); 2]; 2];
                for (sj, row) in energy.iter_mut().enumerate() {
                    for (sk, e) in row.iter_mut().enumerate() {
                        *e = coulomb_energy(&configs[j][sj], &configs[k][sk], constants)?;
                    }
                }
                pairs.push(PairInteraction { j, k, energy });
            }
        }

        let mut driver = Vec::with_capacity(n);
        for cfg in &configs {
            let mut d = [T::zero(); 2];
            for (s, e) in d.iter_mut().enumerate() {
                for dc in &driver_configs {
                    *e += coulomb_energy(&cfg[s], dc, constants)?;
                }
            }
            driver.push(d);
        }
        Ok(Self {
            cells: n,
            pairs,
            driver,
        })
    }

    /// Total electrostatic energy of a basis word (bit `j` = state of cell `j`).
    pub fn energy_of(&self, word: usize) -> T {
        let bit = |j: usize| (word >> j) & 1;
        let mut e = T::zero();
        for p in &self.pairs {
            e += p.energy[bit(p.j)][bit(p.k)];
        }
        for (j, d) in self.driver.iter().enumerate() {
            e += d[bit(j)];
        }
        e
    }
}

/// Builds the interaction table for every device pair and the driver potentials.
pub fn pairwise_interaction_table<T: Real>(
    layout: &CircuitLayout<T>,
) -> Result<InteractionTable<T>> {
    let devices = layout.devices();
    let drivers = layout.drivers();
    InteractionTable::build(&devices, &drivers, &layout.constants)
}

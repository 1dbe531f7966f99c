//! Ground-state simulation of clocked molecular QCA circuits in uniform applied fields.
//!
//! Everything numeric is generic over [`Real`] (`f32` or `f64`); the aliases at
//! the bottom of this file fix the scalar for the common cases.

pub mod eigensolver;
pub mod electrostatics;
pub mod error;
pub mod hamiltonian;
pub mod library;
pub mod linalg;
pub mod model;
pub mod observables;
pub mod scalar;
pub mod sweep;
pub mod three_state;

pub use eigensolver::{ground_state, ground_state_of, spectrum_small, GroundStateResult, Method, SolverOptions};
pub use electrostatics::{coulomb_energy, kink_energy, pairwise_interaction_table, ChargeConfig, InteractionTable};
pub use error::{QcaError, Result};
pub use hamiltonian::{assemble, BasisIndex, HamiltonianModel, MAX_CELLS, SOFT_MAX_CELLS};
pub use library::{
    build_fan_in, build_fan_out, build_inverter, build_majority, build_wire, load_layout, majority, mirror_y,
    rotate_pairs, save_layout, truncate, BuildConfig, CircuitLayout, DevicePair, DriverPair, Geometry,
};
pub use model::{
    detuning_from_field, field_scale_eo, CellState, FieldVector, MoleculeSpec, PhysicalConstants, Role,
    TwoStateParams, Vec3, COULOMB_K_EV_NM,
};
pub use observables::{cell_polarization, output_polarization, pair_correlation, polarization_report, PolarizationReport};
pub use scalar::Real;
pub use sweep::{
    failure_onset, read_csv, run_sweep, solve_point, truth_table, write_csv, Axis, FieldRange, Onset, SweepResult,
    SweepRow, SweepSpec, Units,
};
pub use three_state::{compare_models, gamma_eff, null_population, three_state_circuit_ground_state, ModelComparison, ThreeStateParams};

pub type Layout = CircuitLayout<f64>;
pub type Hamiltonian = HamiltonianModel<f64>;
pub type Field = FieldVector<f64>;
pub type Sweep = SweepResult<f64>;
pub type Layout32 = CircuitLayout<f32>;
pub type Hamiltonian32 = HamiltonianModel<f32>;
pub type Field32 = FieldVector<f32>;

//! Circuit layouts: the layout type, stock builders, transforms and file format.

pub mod builders;
pub mod format;
pub mod layout;

pub use builders::{
    build_fan_in, build_fan_out, build_inverter, build_majority, build_wire, majority, mirror_y,
    rotate_pairs, truncate, BuildConfig, MAJORITY_ARM,
};
pub use format::{load_layout, save_layout, FORMAT_VERSION};
pub use layout::{handedness, CircuitLayout, DevicePair, DriverPair, Geometry, STOCK_MAX_CELLS};

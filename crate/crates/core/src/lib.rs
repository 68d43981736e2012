//! Rotation numbers, conjugacies to rotations and rotation-number
//! derivatives for monotone families of circle diffeomorphisms.

pub mod catalog;
pub mod circle_map;
pub mod conjugacy;
pub mod error;
pub mod monotone_family;
pub mod quadrature;
pub mod report;
pub mod rotation;
pub mod tongues;

pub use catalog::{catalog, FamilySpec};
pub use circle_map::{power_map, FamilyMap, Lift, OrbitPoint, PowerMap, SineShift};
pub use conjugacy::{c0_distance, circle_distance, conjugacy_defect, integral_conjugacy, orbit_conjugacy, MonotoneTable};
pub use error::{Error, Result};
pub use monotone_family::{ContinuityReport, DerivativeReport, DerivativeStatus};
pub use rotation::{detect_rational, rotation_number, rotation_number_with, RationalGuess, RotationConfig, RotationEstimate};
pub use tongues::{plateau_interval, tongue_scan, Plateau, Side, SlopeProbe, TongueRecord};

//! Gap widths around rational points in the fractional parts of radical
//! sequences `{(a·t + b)^(1/α)}`.
//!
//! The crate has two halves that are meant to be checked against each other:
//!
//! * [`closed_form`] evaluates the limiting gap functions exactly, as rationals,
//!   together with brute-force residue-set oracles for every reduction step.
//! * [`engine`] measures gaps at finite `N` with exact integer neighbor search
//!   and double-double widths, and scales them into approximants of the limit.
//!
//! [`orchard`] rebuilds the same gaps geometrically, as illuminated segments of a
//! screen behind the integer lattice, and [`ratmod`] holds the shared exact
//! integer and rational primitives.

pub mod closed_form;
pub mod dd;
pub mod engine;
mod error;
pub mod orchard;
pub mod ratmod;

pub use closed_form::{ClosedFormQuery, ClosedFormValue, FormulaPath};
pub use dd::Dd;
pub use engine::{GapMeasurement, ScaledApproximant, SequenceSpec};
pub use error::{Error, Result, Side};
pub use orchard::{Coefficient, IlluminationSegment, Intercept, OrchardScene, Window};
pub use ratmod::{PeriodicClass, Rational, ResidueSet};

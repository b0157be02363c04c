//! Simulation core for evaluating compliant gripper-finger designs on
//! connector-insertion tasks.
//!
//! The crate is organized around the pipeline a design evaluation runs
//! through:
//!
//! - [`geometry`]: convex-part bodies, pose math, and contact queries.
//! - [`compliance`]: the design-parameter table and the six-axis
//!   spring/damper coupling between robot flange and grip frame.
//! - [`dynamics`]: penalty contact, Coulomb friction, the grasp model,
//!   and the semi-implicit time stepper.
//! - [`strategy`]: motion primitives and the scripted
//!   search-and-insertion sequence.
//! - [`evaluate`]: outcome classification, the lateral-offset tolerance
//!   sweep, and the evaluation metrics and tables.
//!
//! Everything here is deterministic: no randomness, no wall-clock, and
//! fixed iteration orders throughout. Distinct trials never share mutable
//! state and may run in parallel.
//!
//! The crate is `no_std` (with `alloc`); all I/O, file formats, and the
//! command-line front end live in the companion `insertsim-cli` crate.
//! Internal length unit is meters; millimeters appear only at I/O
//! boundaries.

#![no_std]
#![warn(missing_debug_implementations)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod compliance;
pub mod dynamics;
pub mod evaluate;
pub mod geometry;
pub mod math;
pub mod strategy;
pub mod trial;

pub use compliance::{DesignParams, DesignTable, StiffnessSpec};
pub use dynamics::SimConfig;
pub use evaluate::{FailureType, Outcome, SweepResult};
pub use geometry::{BodyModel, ContactPoint, ConvexPart};
pub use math::Pose;
pub use strategy::TaskSpec;
pub use trial::TrialRecord;

/// Meters per millimeter; all public APIs that talk millimeters convert
/// through this.
pub const MM: f64 = 1e-3;

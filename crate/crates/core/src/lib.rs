//! Task-based robot programming workbench.
//!
//! Robot work is described as a process of tasks; tasks expand into skill
//! invocations that run on a simulated cell. A knowledge base decides which
//! input modalities a cell offers for each task parameter and in which
//! order, and a session engine walks a person (or a hidden operator) through
//! supplying parameter values over a JSON message bridge.

pub mod analytics;
pub mod bridge;
pub mod geometry;
pub mod kb;
pub mod model;
pub mod session;
pub mod setup;
pub mod sim;
pub mod tasks;

/// Scalar type used throughout the domain model.
pub type Real = f64;
pub type Vec3 = geometry::Vector3<Real>;
pub type Quaternion = geometry::Quat<Real>;
pub type Pose6D = geometry::Pose<Real>;
pub type Axis3 = geometry::Axis<Real>;

//! Task catalog and expansion of task instances into skill sequences.

mod catalog;
mod expand;
mod solver;
mod tables;

pub use catalog::*;
pub use expand::{
    expand, infer_skill_parameters, resolve_tool_changes, ExpandError, Inferred, InferredArgs,
    PlanWorld, Planner, APPROACH_OFFSET, DRILL_FORCE, GRIPPER_FORCE, MOVE_ACCEL, MOVE_SPEED,
    SCREW_DEPTH, WELDING_CURRENT, WELDING_SPEED,
};
pub use solver::{solve_assembly_pose, solve_coaxial, AxialCondition, SolveError};
pub use tables::{Defaults, MaterialEntry, MaterialTable, TableError, Tables};

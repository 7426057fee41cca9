//! Discrete-time scenario simulation.

pub mod engine;
pub mod events;
pub mod kinematics;
pub mod report;

pub use engine::{adjudicate_shot, run, shot_probability, CycleRecord, Engine, RunOptions, RunOutput, ShotResult, SimError};
pub use events::{Event, EventKind, EventLog};
pub use kinematics::{step_kinematics, Motion};
pub use report::{Outcome, Policy, SimReport};

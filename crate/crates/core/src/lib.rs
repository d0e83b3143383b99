//! Bite-acquisition planning on segmented plate masks, with a closed-loop
//! meal simulator and LLM-driven bite sequencing.

pub mod geometry;
pub mod llm;
pub mod planner;
pub mod plate;
pub mod portions;
pub mod render;
pub mod sequencer;
pub mod sim;
pub mod skills;

pub use geometry::{AxisEstimate, DensityMap, GeometryError};
pub use llm::{LlmError, LlmTransport};
pub use planner::{PlanError, PlannerConfig, SkillSequence};
pub use plate::{FoodCategory, FoodItem, FoodMask, Pixel, PlateObservation, PlateState};
pub use portions::{PortionBasis, PortionEstimate};
pub use sequencer::{NextBite, PreferenceSpec, SequencerContext, SequencerError};
pub use sim::{EpisodeLog, Planner, SkillEffectConfig, TerminationReason};
pub use skills::{SkillCommand, SkillKind};

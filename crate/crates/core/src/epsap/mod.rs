//! Layout generation: a two-stage hybrid evolution strategy over geometric transformations.

mod evolve;
mod guided;
mod init;
pub mod penalty;
pub mod transform;

#[cfg(test)]
pub(crate) mod test_support;

use thiserror::Error;

pub use evolve::{
    evaluate, evolve, evolve_with_observer, EsParams, EvolutionOutcome, GenerationLog, Individual,
};
pub use init::init_population;
pub use penalty::{intrinsic_penalty, penalty_components, Indicator, PenaltyComponents};
pub use transform::{
    apply_transformation, Level, Operation, Target, TransformKind, Transformation,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EpsapError {
    #[error("infeasible program: {0}")]
    InfeasibleProgram(String),
    #[error("invalid program: {}", .0.join("; "))]
    InvalidProgram(Vec<String>),
    #[error("invalid transformation target: {0}")]
    InvalidTarget(String),
    #[error("invalid evolution parameters: {0}")]
    InvalidParams(String),
}

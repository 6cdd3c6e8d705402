//! EnergyPlus 8.8 input compilation and the external simulator adapter.
//!
//! [`emit_idf`] turns a layout plus its systems description into an [`IdfDocument`] whose
//! names and nodes close over themselves (see [`check_closure`]). [`eplus`] runs the
//! simulator on such a document and reads its hourly outputs back.

pub mod builder;
pub mod check;
pub mod defaults;
pub mod document;
pub mod emit;
pub mod eplus;
pub mod nodes;
pub mod schema;
pub mod systems;
pub mod zones;

use planforge_core::constructions::ConstructionError;
use thiserror::Error;

pub use check::{check_closure, ClosureReport};
pub use defaults::Defaults;
pub use document::{Field, IdfDocument, Record};
pub use emit::{emit_idf, emit_project, EmitInput};

/// EnergyPlus version the emitted documents target.
pub const IDF_VERSION: &str = "8.8";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IdfError {
    #[error("layout is not feasible: {0}")]
    InfeasibleLayout(String),
    #[error("unsupported system combination: {0}")]
    UnsupportedCombination(String),
    #[error("component {class} '{name}' appears twice on branch '{branch}' of loop '{loop_name}'")]
    DuplicateComponent {
        loop_name: String,
        branch: String,
        class: String,
        name: String,
    },
    #[error("node '{0}' is assigned to two ports")]
    DuplicateNode(String),
    #[error("'{value}' cannot be used as an IDF name (contains ',', ';', '!' or a line break)")]
    InvalidName { value: String },
    #[error("IDF parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("object defaults: {0}")]
    Defaults(String),
    #[error("unknown gain profile '{0}'")]
    UnknownProfile(String),
    #[error("emitted document does not close: {}", .0.join("; "))]
    Closure(Vec<String>),
    #[error(transparent)]
    Construction(#[from] ConstructionError),
}

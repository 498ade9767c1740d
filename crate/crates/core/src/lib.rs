//! Core of the CAT-SD nominal classification method.
//!
//! The crate is `no_std` and only needs `alloc`. It contains the domain
//! model and its validation ([`model`]), per-criterion
//! similarity-dissimilarity functions and their elicitation helpers
//! ([`sdfunc`]), the revised Simos weighting procedure ([`srf`]) and the
//! classification engine ([`engine`]).
//!
//! Everything here is pure: values are immutable once built and may be
//! shared freely between threads. File formats, the CLI and the HTTP
//! service live in the `catsd` crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod engine;
pub mod exact;
pub mod ids;
pub mod model;
pub mod sdfunc;
pub mod srf;

pub use engine::{
    classify, ActionAssignment, AssignmentReport, CategoryOutcome, ClassifyOptions, ComparisonTrace, CriterionTrace,
    EngineError,
};
pub use exact::Exact;
pub use ids::{ActionId, CategoryId, CriterionId, FunctionId};
pub use model::{
    check_non_negativity, non_negativity_slacks, validate_model, validate_performances, Action, CategoryModel,
    Criterion, DecisionModel, Direction, InteractionCoefficient, InteractionKind, Issue, IssueCode, ModelError,
    PerformanceTable, ReferenceAction, Scale, ValidationReport,
};
pub use sdfunc::{DomainKind, Piece, PieceValue, SdError, SdFunction};
pub use srf::{srf_weights, SrfError, SrfWeights, WeightElicitation};

/// Absolute tolerance used for floating point comparisons throughout the crate.
pub const TOLERANCE: f64 = 1e-9;

//! Mechanical knowing agents over the language L_O.

pub mod endorse;
pub mod formula;
pub mod knowledge;
pub mod model;

pub use endorse::{build_total_endorser, check_total_endorsement, endorsement_chain, replay_derivation};
pub use formula::{parse_formula, Formula};
pub use knowledge::{enumerate_knowledge, measure, AgentSpec, MeasureResult};
pub use model::{bounded_model_check, ModelContext, Truth};

//! Ordinal notations as programs, certificate checking, and an epistemic
//! engine for mechanical knowing agents.

pub mod cert;
pub mod corpus;
pub mod epistemic;
pub mod fgh;
pub mod onl;
pub mod ordinal;
pub mod registry;

pub use ordinal::{Ordinal, OrdValue, ValueMap};

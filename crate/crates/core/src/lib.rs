//! Decides whether a finite set of pure quantum states admits perfect state
//! exclusion, how many identical copies make it do so, and checks explicit
//! exclusion measurements.
//!
//! Rules are registered in a [`criteria::CriterionRegistry`] and chained by
//! [`criteria::classify`]; the exact fallback lives in [`incoherence`].

pub mod criteria;
pub mod error;
pub mod incoherence;
pub mod multicopy;
pub mod numerics;
pub mod povm;
pub mod states;

pub use error::{Error, Result};

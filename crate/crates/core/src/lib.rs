//! Verification toolkit for finite quasi-pseudometric type spaces: exact
//! axiom checking, sequence classification, admissibility and contraction
//! verification, Picard iteration with certified bounds, and
//! certificate-emitting fixed-point theorem profiles.
//!
//! All arithmetic is exact rational; identical inputs always produce
//! byte-identical reports and certificates.

#![allow(clippy::result_large_err)]

pub mod admissibility;
pub mod certifier;
pub mod error;
pub mod io;
pub mod picard;
pub mod rational;
pub mod search;
pub mod sequence;
pub mod space;

pub use error::{Error, Result};
pub use rational::Rat;
pub use space::{AxiomReport, Chain, CompletenessFlag, D2Witness, KBound, QPSpace};

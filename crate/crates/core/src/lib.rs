//! fbnet grades multi-attribute entities on ordinal scales. Raw indicator
//! scores are fuzzified into linguistic memberships, aggregated through a
//! weighted rule base, and fed as soft evidence into a three-layer
//! Bayesian network whose conditional probability table is fitted and
//! dynamically updated by maximum-likelihood estimation.

pub mod bnet;
pub mod cli;
pub mod config;
pub mod error;
pub mod eval;
pub mod fuzzify;
pub mod learn;
pub mod model;
pub mod rulebase;
pub mod types;

pub use error::{Error, Result};

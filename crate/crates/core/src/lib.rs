//! Exact q-series engine for Nahm sums and Rogers–Ramanujan type identities.

pub mod error;
pub mod bailey;
pub mod eta;
pub mod identity;
pub mod nahm;
pub mod registry;
pub mod search;
mod kernel;
pub mod rational;
pub mod series;

pub use error::{Error, Result};
pub use rational::Rational;
pub use series::{Monomial, QSeries};

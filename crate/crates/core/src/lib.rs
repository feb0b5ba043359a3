//! Weighted Fock-space kernels, Berezin transforms and a numerical test of
//! whether two Berezin transforms commute.

pub mod berezin;
pub mod commutativity;
pub mod config;
pub mod error;
pub mod quadrature;
pub mod scan;
pub mod special_fn;
pub mod sum;
pub mod verify;

pub use config::{RunConfig, Tolerances};
pub use error::{Error, Result};
pub use special_fn::{FockSpace, SeriesValue, WeightParams};

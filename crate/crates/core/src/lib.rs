//! Load-coupled transmission-energy minimization for cellular downlinks with
//! joint transmission.
//!
//! The crate is organized bottom-up:
//!
//! * [`model`]: network instances, associations, and random 3GPP-style drops.
//! * [`coupling`]: SINR and load functions and the load fixed point.
//! * [`optimizer`]: power scaling (POLO), association growth (AOLO), their
//!   alternation (PALO), and the non-JT full-load baseline.
//! * [`harness`]: seeded scenario sweeps, aggregation, and result files.

pub mod coupling;
pub mod error;
pub mod harness;
pub mod model;
pub mod optimizer;

pub use error::{Error, Result};

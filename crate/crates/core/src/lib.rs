//! Statevector simulation and metrology for postselected weak-value
//! amplification, including teleportation-based protocols that prepare the
//! system's input state after the system-probe interaction.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod estimation;
pub mod experiment;
pub mod metrology;
pub mod protocols;
pub mod statevec;

pub use error::{Error, Result};
pub use num_complex::Complex64;

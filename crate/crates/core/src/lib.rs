//! Verification of refined conjectures for Mazur-Tate elements of elliptic curves over Q.

pub mod arith;
pub mod conjectures;
pub mod curves;
pub mod modsym;
pub mod padic;
pub mod error;
pub mod group_ring;
pub mod harness;

pub use error::{Error, Result};

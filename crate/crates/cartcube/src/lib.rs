//! Exhaustive computation with presheaves on the truncated Cartesian cube
//! category `□≤N` and on other finite sites.
//!
//! Everything is finite and enumerated: carriers are dense index ranges,
//! maps are tables, and every search reports either a result, a refutation,
//! or an explicit budget overrun.

pub mod certificate;
pub mod checks;
pub mod cofib;
pub mod fib;
pub mod cube;
pub mod error;
pub mod fincat;
pub mod homotopy;
pub mod interval;
pub mod nerve;
pub mod presheaf;
pub mod report;
pub mod search;

pub use error::{Error, Result};

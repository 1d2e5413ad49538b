//! Exact computations with saturated fusion systems of finite groups.
//!
//! The crate computes, over explicit Cayley tables: conjugation fusion
//! systems of a Sylow subgroup inside an ambient group, their focal,
//! hyperfocal and elementary-focal residuals, double Burnside modules with
//! Mackey composition, characteristic bisets and characteristic idempotents
//! at finite `p`-adic precision, degree-one transfer maps, and a battery of
//! executable theorem checks (residual control of transfer, normalizer
//! control with wreath witnesses, `p`-nilpotency detection, idempotent
//! commutation with normal-subsystem inclusions).

// divisibility is spelled `x % n == 0` throughout
#![allow(clippy::manual_is_multiple_of)]

pub mod battery;
pub mod burnside;
pub mod catalog;
pub mod error;
pub mod fusion;
pub mod group;
pub mod structure;
pub mod theorems;
pub mod transfer;

pub use error::Error;

//! Simulator for the classical reduction from all-or-nothing oblivious
//! transfer to one-out-of-two oblivious transfer, and for Lo's
//! cheating-unitary attack on one-sided two-party quantum computations.
//!
//! The crate is organized bottom-up:
//!
//! * [`linalg`]: dense complex states, density matrices, Schmidt
//!   decompositions and basis rotations.
//! * [`protocol`]: two-party protocols as one overall unitary, the purified
//!   (dice-entangled) executions, the security-clause checker, and the
//!   joint-input model whose sender input depends on the receiver's choice.
//! * [`ot`]: the ideal all-or-nothing OT black box.
//! * [`reduction`]: Monte-Carlo execution of the parity-masking reduction.
//! * [`attack`]: synthesis and verification of the receiver's cheating
//!   unitary, including the dice ablation.

pub mod attack;
pub mod error;
pub mod jsonl;
pub mod linalg;
pub mod ot;
pub mod protocol;
pub mod reduction;
pub mod rng;

pub use error::{Error, Result};

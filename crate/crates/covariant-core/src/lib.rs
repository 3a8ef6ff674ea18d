#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod channel;
pub mod depolarization;
pub mod entropy;
pub mod error;
pub mod hermitian;
pub mod interconversion;
pub mod modes;
pub mod par;
pub mod qubit;
pub mod random;
pub mod sdp;
pub mod su2;
pub mod symmetry;

pub use error::{Error, Result};

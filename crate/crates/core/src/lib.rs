//! Horoball packings in negatively curved spaces and constructive
//! solvers for the geodesics and points that avoid them.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

mod error;
pub mod exact;
pub mod halfspace;
pub mod heisenberg;
pub mod math;
mod numeric;
pub mod packing;
pub mod rays;
pub mod shadow;
pub mod sharp_ball;
pub mod sharp_interval;
pub mod tree;
pub mod uncover;

pub use error::{Error, Result};
pub use numeric::{Mode, NumericContext};

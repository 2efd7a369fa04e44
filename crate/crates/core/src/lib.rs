//! Monotone convolution of probability measures on the real line.
//!
//! Measures are handled through their reciprocal Cauchy transforms
//! `H = 1/G`; monotone convolution is composition of these maps and
//! convolution semigroups are flows of a holomorphic vector field.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod alt;
pub mod atomic;
pub mod bp;
pub mod branch;
pub mod error;
pub mod field;
pub mod grid;
pub mod invert;
pub mod nevanlinna;
pub mod measure;
pub mod moments;
pub mod ode;
pub mod quad;
pub mod roots;
pub mod semigroup;
pub mod stable;
pub mod transform;

pub use error::{Error, Result};
pub use measure::{AtomicMeasure, Family, GridMeasure, Measure, Tail};

/// Complex numbers used throughout.
pub type C64 = num_complex::Complex64;

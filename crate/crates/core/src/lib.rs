//! Geometric phases of Majorana zero-energy states at a ferromagnet /
//! topological-insulator / superconductor edge junction.
//!
//! The crate is `no_std` with `alloc`; the default `std` feature only adds
//! internal caching of expensive lattice eigensolves.
//!
//! Layout:
//! - [`bdg`]: Nambu spinors, the BdG kernel, quadrature inner products.
//! - [`junction`]: evanescent modes and the matched bound state.
//! - [`holonomy`]: connections, Wilson phases, curvature, Stokes checks.
//! - [`lattice`]: tight-binding oracle and its numerical zero mode.
//! - [`nonadiabatic`]: time-ordered evolution and overlap products.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod bdg;
mod cache;
pub mod error;
pub mod holonomy;
pub mod junction;
pub mod lattice;
pub mod linalg;
pub mod math;
pub mod nonadiabatic;

pub use error::{Error, Result};
pub use faer::c64;

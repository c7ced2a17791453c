//! Dyadic Green functions for free space, a dielectric half-space and a
//! dielectric sphere, with the Purcell rates, frequency shifts and
//! two-emitter superradiance fidelity built on top of them.

pub mod cli;
pub mod constants;
pub mod dielectric;
pub mod emitters;
pub mod error;
pub mod fidelity;
pub mod green;
pub mod green_free;
pub mod green_planar;
pub mod green_sphere;
pub mod quadrature;
pub mod specfun;

pub use error::{Error, Result};
pub use green::{Basis, GreenTensor};

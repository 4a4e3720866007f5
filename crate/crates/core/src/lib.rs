//! Exact computations around Fourier-Mukai transformations of K3 surfaces
//! of Picard rank one and degree `2d`.
//!
//! * [`arith`]: exact divisors `s || d` and the star product.
//! * [`modgroup`]: the Atkin-Lehner group `AL_d` and Fricke group `Fr_d`.
//! * [`lattice`]: the Mukai lattice `N_d`, its isometries, orientation and
//!   discriminant action.
//! * [`corr`]: the map `R: AL_d -> O^+(N_d)` and its inverse `q`.
//! * [`fmcalc`]: Mukai vectors, the partner census `P_d` and the induced
//!   transformations of moduli-space kernels.
//! * [`halfplane`]: floating-point upper half plane and central charge checks.
//! * [`cli`]: the `fmk3` command line front end.

pub mod arith;
pub mod cli;
pub mod corr;
pub mod error;
pub mod fmcalc;
pub mod halfplane;
pub mod lattice;
pub mod modgroup;

pub use error::{Error, Result};

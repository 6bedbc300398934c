//! Thermal Casimir–Polder potentials of ground-state polar molecules in
//! planar cavities.
//!
//! The crate is organised bottom-up:
//!
//! * [`numerics`]: adaptive Gauss–Kronrod quadrature and the special
//!   functions used by the closed-form results.
//! * [`materials`]: permittivity models and reflection coefficients of
//!   half-spaces, multilayer stacks and constant-reflectivity walls.
//! * [`greens`]: the trace of the scattering Green tensor of the cavity
//!   (and of a single plate) at real and imaginary frequencies.
//! * [`molecules`]: transition data, polarizability, thermal photon numbers.
//! * [`potential`]: the non-resonant, propagating and evanescent potential
//!   components, well depths and heating rates.
//! * [`asymptotics`]: series and closed forms for ideal constant-reflectivity
//!   cavities.
//! * [`config`]: the line-oriented configuration format.

pub mod asymptotics;
pub mod config;
pub mod constants;
pub mod error;
pub mod greens;
pub mod materials;
pub mod molecules;
pub mod numerics;
pub mod potential;

pub use error::{Error, Result};
pub use greens::{CavityGeometry, Geometry, GreenTraceParts, PlateGeometry};
pub use materials::{Layer, MirrorSpec, PermittivityModel};
pub use molecules::{Molecule, ThermalEnvironment, Transition};
pub use num_complex::Complex64;
pub use numerics::QuadratureSpec;
pub use potential::{ExtremumReport, PotentialComponents};

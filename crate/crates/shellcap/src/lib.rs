//! Finite-strain surface elasticity and anelasticity toolkit.
//!
//! The crate provides four layers:
//!
//! - [`tensor`]: dense 2x2/3x3 tensors with explicit index variance, metrics
//!   with cached inverses, two-point maps, invariants and spectral square
//!   roots;
//! - [`geometry`]: finite-difference differential geometry of metric fields
//!   in foliation coordinates (Christoffel symbols, second fundamental form,
//!   Gauss/Codazzi residuals, projections, area maps);
//! - [`constitutive`]: hyperelastic bulk and surface materials with
//!   eigenstrain-bearing material metrics, returning Cauchy stress from
//!   energy derivatives, plus finite-difference validation of every model;
//! - [`sphere`]: the complete radial boundary-value problem of an
//!   incompressible spherical shell around a dry or fluid-filled cavity
//!   bounded by an eigenstrained elastic surface: relaxed radii, residual
//!   stress profiles, and pressure-stretch sweeps.
//!
//! [`config`] and [`run`] drive the same solvers from declarative scenario
//! files for the `shellcap` command-line tool; outputs are byte-deterministic
//! CSV/JSON with 17-significant-digit floats.

// indexed loops are the natural idiom for fixed-size tensor kernels;
// negated comparisons are deliberate NaN guards; frozen oracle constants
// keep every printed digit
#![allow(
    clippy::needless_range_loop,
    clippy::neg_cmp_op_on_partial_ord,
    clippy::excessive_precision
)]

pub mod config;
pub mod constitutive;
pub mod emit;
pub mod geometry;
pub mod quadrature;
pub mod roots;
pub mod run;
pub mod sphere;
pub mod tensor;

pub use sphere::{CavitySolution, NondimensionalProblem, SolverSettings, SphereProblem};

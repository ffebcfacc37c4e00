//! Numerical laboratory for co-rotating vortex pairs in planar flows.
//!
//! The crate builds desingularized steady states of the 2D Euler equation
//! for a pair of identical vortices by an asymptotic expansion in the
//! inverse separation, solves the weakly viscous vorticity equation in the
//! co-rotating frame, and measures how closely the viscous solution tracks
//! the inviscid family.
//!
//! Module map:
//! - [`profile`]: radially symmetric vorticity profiles `w*` and the derived
//!   scalar functions (`Q`, `phi`, `g`, the weight `p`), admissibility checks.
//! - [`point_vortex`]: the Helmholtz-Kirchhoff ODE system, conserved
//!   quantities, minimal distance and turnover time.
//! - [`grid`] / [`biot_savart`]: Cartesian fields, the free-space Biot-Savart
//!   velocity via a domain-doubled spectral Poisson solve, Lamb-Oseen fields.
//! - [`operator`]: the linearized operator about `w*` acting sector-by-sector
//!   in angular Fourier modes, its kernel, and its right-inverse built from
//!   homogeneous solutions of the radial equation.
//! - [`steady`]: the order-4 expansion of the co-rotating pair, its rotation
//!   rate, residual, and the rescaled two-core field.
//! - [`fokker_planck`]: the viscous first-order profile correction in the
//!   mode-2 sector and exponentially weighted profile norms.
//! - [`viscous`]: pseudo-spectral solver for the rotating viscous vorticity
//!   equation plus per-vortex profile extraction and error metrics.

pub mod biot_savart;
pub mod error;
pub mod fft2;
pub mod fokker_planck;
pub mod grid;
pub mod ode;
pub mod operator;
pub mod point_vortex;
pub mod profile;
pub mod quad;
pub mod steady;
pub mod vec2;
pub mod viscous;

pub use error::{Error, Result};
pub use vec2::Vec2;

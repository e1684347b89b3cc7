//! Boundary-integral engine for two-phase 2D Stokes flow driven by
//! capillarity, with distinct viscosities, on an asymptotically flat
//! interface represented as the graph of a function.
//!
//! The moving-boundary problem is reduced to the nonlocal evolution
//! df/dt = Phi(f): the fixed-time transmission problem is solved by a
//! hydrodynamic single-layer trace plus a double-layer potential whose
//! density comes from a second-kind singular integral equation. The crate
//! provides the singular quadrature, the boundary operators, the fixed-time
//! solve, time steppers, off-interface field evaluation with jump checks,
//! and spectral/linearization diagnostics.

// indexed loops over kernel matrices stay; zipping five slices is not clearer
#![allow(clippy::needless_range_loop)]

pub mod bvp;
pub mod diagnostics;
pub mod error;
pub mod evolution;
pub mod fields;
pub mod grid;
pub mod operators;
pub mod quadrature;
pub mod solver;
pub mod spectral;

pub use bvp::{FluidParams, SolveMethod, SolverConfig, TraceFields};
pub use error::{Error, Result};
pub use grid::{GeometryCache, Grid, InterfaceProfile, ProfileShape};
pub use operators::VectorDensity;
pub use quadrature::{KernelSpec, QuadratureConfig};

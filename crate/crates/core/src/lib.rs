//! Origin behaviour of the reduced radial wave equation.
//!
//! Writing `R(r) = u(r)/r` turns the radial Laplacian acting on `R` into
//! `u''/r` plus a point source `-4π δ³(r) u(0)` hidden at the origin. The reduced
//! equation `u'' + Q(r, E) u = 0` is therefore only equivalent to the
//! three-dimensional one when `u(0) = 0`. This crate
//!
//! * checks the point source numerically with shrinking-ball flux integrals
//!   ([`distributional`]),
//! * classifies potentials by their behaviour at the origin and works out which
//!   near-origin branches survive each boundary policy ([`indicial`]),
//! * solves Schrödinger and Klein–Gordon bound states with `u(0) = 0` enforced,
//!   and reproduces the spurious repulsive-core bound state that appears when only
//!   square integrability is demanded ([`eigen`]).
//!
//! Units have ħ = 1; the mass enters only through [`EquationKind`].

pub mod distributional;
pub mod eigen;
pub mod error;
pub mod fd;
pub mod grid;
pub mod indicial;
pub mod potential;
pub mod quadrature;
pub mod solution;

pub use error::CoreError;
pub use grid::{make_grid, GridScheme, RadialGrid};
pub use potential::{Family, PotentialModel, PowerTerm};
pub use quadrature::{norm_squared, quadrature};
pub use solution::{count_nodes, BoundaryPolicy, EquationKind, OriginExpansion, RadialSolution};

//! Bounds on graph gonality from chip-firing, edge expansion and the
//! Laplacian spectrum.
//!
//! The crate is organised bottom-up: [`graph`] holds the multigraph,
//! [`divisor`] and [`reduction`] implement chip-firing and reduced divisors,
//! [`gonality`] searches for exact gonality, [`expansion`] and [`spectral`]
//! compute the expansion invariants, and [`bounds`] combines everything into a
//! [`bounds::BoundReport`]. [`randgraph`] samples configuration-model graphs
//! and runs the bound pipeline over them.

pub mod bounds;
pub mod divisor;
pub mod expansion;
pub mod gonality;
pub mod graph;
pub mod multiset;
pub mod randgraph;
pub mod rational;
pub mod reduction;
pub mod spectral;

pub use divisor::Divisor;
pub use graph::{load_graph, Multigraph};
pub use rational::Rational;

//! Homomorphism densities of oriented and bipartite graphs in graphs and step
//! graphons, with exact rational arithmetic throughout, and brute-force
//! checks of directed Sidorenko, forcing and tournament properties.

pub mod cutnorm;
pub mod density;
pub mod enumerate;
pub mod error;
pub mod forcing;
pub mod format;
pub mod graph;
pub mod graphon;
pub mod optimize;
pub mod par;
pub mod random;
pub mod rational;
pub mod sidorenko;
pub mod tournament;

pub use density::{Density, HomCount};
pub use error::{Error, Result};
pub use graph::{BipartiteGraph, OrientedGraph, Tournament, UndirectedGraph};
pub use graphon::StepGraphon;
pub use rational::Rational;

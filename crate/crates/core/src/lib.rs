//! Coarse wirings of finite graphs into structured host graphs, and thick
//! embeddings of graphs into Euclidean and hyperbolic model spaces.
//!
//! The crate is organised around a small set of value types:
//!
//! * [`graphs::Graph`] — finite simple graphs with exact cut-set and Cheeger
//!   machinery,
//! * [`hosts::HostHandle`] — implicit host graphs (lattice grids, lamplighter
//!   balls, thickenings) navigated by coordinate arithmetic,
//! * [`wiring::Wiring`] — vertex maps plus edge walks, verified and measured
//!   by [`wiring::verify_coarse_wiring`],
//! * [`geometry::ThickEmbedding`] — polyline embeddings into model spaces
//!   with certified thickness,
//! * [`bounds`] — cut-set pullback along wirings and profile evaluators.
//!
//! Everything is deterministic: randomized constructions take explicit seeds.

pub mod bounds;
pub mod construct;
pub mod error;
pub mod graphs;
pub mod geometry;
pub mod hosts;
pub mod json;
pub mod wiring;

pub use error::{Error, Result};

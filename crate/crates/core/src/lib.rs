//! Computation, search and certification of bounds on k-distance sets in
//! finite-dimensional normed spaces.
//!
//! A set is a *k-distance set* when its pairwise nonzero distances take
//! exactly `k` values. The modules cover the distance spectrum itself
//! ([`spectrum`]), chain-height certificates under cone orders
//! ([`chains`]), the planar two-cone construction ([`planar`]), greedy cone
//! covers in general dimension ([`cover`]), the cluster decomposition and
//! volume bounds ([`decompose`]), and exact subset search ([`search`]).

pub mod acceptance;
pub mod certificate;
pub mod chains;
pub mod cover;
pub mod decompose;
pub mod error;
pub mod norm;
pub mod planar;
pub mod rational;
pub mod search;
pub mod spectrum;
pub mod vector;

pub use error::{Error, Result};
pub use norm::{norm_eval, Magnitude, NormKind, NormSpec};
pub use rational::Rational;
pub use spectrum::{DistanceSpectrum, PointSet};
pub use vector::Vector;

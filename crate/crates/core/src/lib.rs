//! One-dimensional fold model of shrinking Bing's decomposition.
//!
//! Stages of the decomposition are modelled as a binary tree of
//! piecewise-linear slope ±1 functions into `[0, 1]`; a clasp choice at each
//! node determines both daughters. The crate provides the exact fold
//! machinery ([`plfun`]), tree bookkeeping ([`bingtree`]), the plane
//! geometry used by the small-displacement construction ([`geometry`]),
//! clasp strategies ([`strategies`]) and the measurement harness
//! ([`experiments`]).

pub mod bingtree;
pub mod error;
pub mod exact;
pub mod experiments;
pub mod geometry;
pub mod plfun;
pub mod seed;
pub mod strategies;
mod turnlist;

pub use error::{Error, Result};
pub use exact::Q;
pub use plfun::{derive_clasp, identity_path, ClaspChoice, FoldedPath, Interval, Side, Slope};

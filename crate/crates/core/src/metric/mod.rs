//! Word length with respect to the switch-walk-switch generating set.
//!
//! Exact lengths come from breadth-first search ([`LengthOracle`]); large
//! elements are bracketed by lamp-based bounds ([`lemma_max_bounds`],
//! [`refined_bounds`]).

mod bfs;
mod bounds;
mod construct;
mod cyclic;
mod k0;
mod local_time;
mod sws;

pub use bfs::{exact_length_bfs, LengthOracle, DEFAULT_NODE_CAP};
pub use bounds::{
    covering_length, ell, ell_function, lemma_max_bounds, range_of, refined_bounds, window_sum,
    Ell, LengthBounds, RangeInfo,
};
pub(crate) use bounds::refined_from_parts;
pub use construct::{construct, Construction};
pub use cyclic::{cycle_cover_lower, cyclic_bounds, cyclic_witness};
pub use local_time::{local_time, LocalTimeMap};
pub use sws::{sws_generators, SwsGenerators};

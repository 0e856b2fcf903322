//! Exact counting and verification laboratory for distance-geometry and
//! sum-product statistics over prime fields.
//!
//! The crate computes, with exact integer arithmetic throughout:
//!
//! * planar quantities over `E` in `F_p^2` — the distance set and
//!   histogram, isosceles triples, non-degenerate rectangles, bisector
//!   energy and incidences, paraboloid quadruples ([`counting`]);
//! * point-plane incidences in `F_p^3` with collinear-richness profiling
//!   ([`incidence`]);
//! * residue-set machinery over `A` in `F_p` — difference and square
//!   sets, representation functions, fourth-order energy, popular sets
//!   and their shifted statistics ([`sumprod`]);
//! * a registry of identity and inequality checks binding the counters
//!   together, with exact assertions where a proof pins a constant and
//!   ratio dashboards where it does not, plus the exact-rational exponent
//!   solver ([`checks`]);
//! * deterministic, seedable set generators including exhaustive
//!   small-case enumeration ([`gen`]).
//!
//! Heavy counters are data-parallel over rayon when the default
//! `parallel` feature is on; a sequential driver is always available and
//! produces bit-identical results.

pub mod counting;
mod exec;
pub mod field;
pub mod gen;
pub mod geom;
pub mod incidence;
pub mod sumprod;

pub mod checks;

pub use counting::PlaneSet;
pub use field::{make_modulus, PrimeModulus, Scalar};
pub use geom::Point2;
pub use sumprod::ResidueSet;

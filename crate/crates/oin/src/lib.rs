//! Finite partial order isomorphisms of bounded rank over a linear order.
//!
//! The carrier is a linearly ordered point universe (a finite chain or the
//! integer line); elements are partial injective order-preserving maps with
//! at most `n` points of support, composed left to right. The crate provides
//! the element algebra, whole-semigroup structure over finite chains
//! (enumeration, Green's relations with first-principles oracles, egg-box
//! grids, the ideal chain, stability), the congruence machinery (Rees
//! congruences, principal-congruence closure, full lattice enumeration,
//! collapse chains, Rees quotients) and the layer-escape witness machinery
//! behind tight ideal series.
//!
//! Structure checks are shipped as library features, not test-only code:
//! every fast predicate comes with an independent oracle that recomputes the
//! same relation from first principles.

pub mod carrier;
pub mod congruence;
pub mod iso;
pub mod semigroup;
pub mod series;

pub use carrier::{Carrier, Coord, Window};
pub use iso::PartialOrderIso;
pub use semigroup::{BoundedSemigroup, EnumeratedSemigroup, GreenRelation};

//! Exact machinery for divisor classes on the moduli space of stable rational
//! curves, encoded combinatorially: a divisor is a rational function on the
//! two-part partitions of the marking set, a curve class is its pairing vector
//! against the boundary, and every question we ask (F-nefness, cone
//! membership, effectivity) is decided in exact rational arithmetic with
//! certificates that re-verify themselves.
//!
//! Layout:
//! - [`groundset`]: subsets of `[n-1]` as partition representatives, the
//!   symmetric-group action, orbits, integer partitions.
//! - [`picard`]: divisor classes as functions modulo the vertex/pair
//!   relations, F-curve pairings, exact Picard rank.
//! - [`curves`]: pairwise balanced designs (PBDs), F-curves as PBDs, curve
//!   classes, the Paley biplane.
//! - [`fnef`]: symmetric functions on cyclic groups, the bracket, the
//!   standard/total/supertotal functions and their exact identities.
//! - [`lift`]: CRT weights and the lift of an F-nef divisor to a product
//!   group, plus pullbacks of symmetric divisors.
//! - [`ratlp`]: exact rational LP (simplex with Bland's rule), witness/Farkas
//!   certificates, cone membership, double description for extremal rays.
//! - [`boundarycert`]: effective-boundary certificates via pair weights and
//!   the ascent that propagates them across partitions with repeated parts.
//! - [`strongf`]: the support/criticality dichotomy search over coordinate
//!   supports, with canonical-form dedup, checkpointing, and budgets.
//! - [`acceptance`]: the desk-scale verification suite shared by the
//!   `acceptance` test target and `fcone repro`.

pub mod acceptance;
pub mod boundarycert;
pub mod curves;
pub mod fnef;
pub mod groundset;
pub mod lift;
pub mod picard;
pub mod ratlp;
pub mod rational;
pub mod sampling;
pub mod strongf;

pub use rational::Rat;

//! Exact-arithmetic finitely additive measures at desk scale.
//!
//! The crate decides whether a linear functional, given through its values on
//! a finite basis, is represented by a nonnegative measure on a finite ground
//! set — and when it is not, produces a certificate that verifies by direct
//! substitution. Around that core sit the supporting constructions: rings of
//! sets with outer/inner measures and carrier extensions, layer-cake
//! integration of exact rational quantities, minimal representing structures,
//! disintegration of a marginal into a prior mixture, the decomposition of a
//! convex function on ℝ into its kink measure, and the universal dyadic-cell
//! map realizing finitely supported laws on (0,1).
//!
//! Everything is computed over arbitrary-precision rationals; there is no
//! floating point anywhere in the crate. All values are immutable after
//! construction and every operation is a pure function, so concurrent use is
//! safe. The one source of randomness — the sampler in [`skorohod`] — is a
//! named seedable generator with reproducible streams.

pub mod conglomerate;
pub mod convex;
pub mod error;
pub mod integrate;
pub mod lp;
pub mod measure;
pub mod quantity;
pub mod rational;
pub mod sets;
pub mod skorohod;

pub use error::{Error, Result};
pub use measure::{
    carried_value, carrier_ring, inner_measure, is_extension, outer_measure,
    AdditiveSetFunction, MeasureStructure,
};
pub use quantity::{PointMap, RandomQuantity, SimpleFunction};
pub use rational::{ExtendedRational, Rational};
pub use sets::{generate_ring, GroundSet, SetRing, Subset};

//! Projective points over Q, homogeneous forms, morphisms of projective
//! space and the orbit machinery built on them.

mod form;
mod linalg;
mod linear;
mod morphism;
mod orbit;
mod point;
mod pullback;

pub use form::{split_linear_factors, HomogeneousForm};
pub use linear::normal_crossings_linear_check;
pub use morphism::{BaseLocusCheck, Morphism};
pub use orbit::{OrbitCache, OrbitRecord, DEFAULT_DIGIT_CEILING};
pub use point::ProjectivePoint;
pub use pullback::{reduced_pullback_degree, PullbackDegree, DEFAULT_PULLBACK_DEGREE_BOUND};

pub(crate) use linalg::{determinant, rank};
pub(crate) use orbit::exceeds_digits;

//! Exact-arithmetic toolkit for primitive prime divisors of classical and
//! dynamical integer sequences.
//!
//! * [`arith`]: primality, valuations and a budgeted factoring pipeline.
//! * [`geometry`]: normalized projective points, forms, morphisms, orbits.
//! * [`sequences`]: six families of integer sequences behind one interface.
//! * [`primdiv`]: gcd-based primitive parts and Zsigmondy sets.
//! * [`heights`]: Weil, local and canonical heights, truncated counting.
//! * [`vojta`]: degree thresholds and end-to-end experiments.

pub mod arith;
pub mod error;
pub mod geometry;
pub mod numfmt;
pub mod primdiv;
pub mod sequences;
pub mod heights;
pub mod vojta;

pub use error::{Error, Result};

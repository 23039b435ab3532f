use std::fmt;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// A rational point of projective space in normalized integer coordinates:
/// coprime entries, first nonzero entry positive.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ProjectivePoint {
    coords: Vec<BigInt>,
}

impl ProjectivePoint {
    /// Normalizes an arbitrary nonzero integer vector.
    pub fn normalize(raw: Vec<BigInt>) -> Result<Self> {
        let mut g = BigInt::zero();
        for c in &raw {
            g = g.gcd(c);
            if g.is_one() {
                break;
            }
        }
        if g.is_zero() {
            return Err(Error::AllZero);
        }
        let first_negative = raw.iter().find(|c| !c.is_zero()).is_some_and(|c| c.is_negative());
        if first_negative {
            g = -g;
        }
        let coords = if g.is_one() { raw } else { raw.into_iter().map(|c| c / &g).collect() };
        Ok(ProjectivePoint { coords })
    }

    pub fn from_i64s(raw: &[i64]) -> Result<Self> {
        Self::normalize(raw.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn coords(&self) -> &[BigInt] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<BigInt> {
        self.coords
    }

    /// Number of homogeneous coordinates, N + 1.
    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    /// Largest absolute coordinate.
    pub fn max_abs(&self) -> BigInt {
        self.coords.iter().map(|c| c.abs()).max().unwrap_or_default()
    }

    pub(crate) fn is_normalized(coords: &[BigInt]) -> bool {
        let first = coords.iter().find(|c| !c.is_zero());
        match first {
            None => false,
            Some(c) if c.sign() == Sign::Minus => false,
            Some(_) => coords.iter().fold(BigInt::zero(), |g, c| g.gcd(c)).is_one(),
        }
    }
}

impl fmt::Display for ProjectivePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}

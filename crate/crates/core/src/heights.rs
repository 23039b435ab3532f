//! Weil, local and canonical heights on P^N(Q) and the truncated counting
//! function. Natural logarithms throughout.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::arith::{self, factor, ln_biguint, Budget};
use crate::error::{Error, Result};
use crate::geometry::{HomogeneousForm, Morphism, OrbitCache, ProjectivePoint};
use crate::numfmt;

/// `log max |x_i|` of the normalized coordinates.
pub fn weil_height(p: &ProjectivePoint) -> f64 {
    ln_biguint(p.max_abs().magnitude())
}

/// `ord_p(F(P)) * log p`.
pub fn local_height(p: &ProjectivePoint, form: &HomogeneousForm, prime: &BigInt) -> Result<f64> {
    let value = form.evaluate(p.coords())?;
    if value.is_zero() {
        return Err(Error::OnDivisor);
    }
    let e = arith::ord_p(&value, prime)?;
    Ok(e as f64 * arith::ln_abs(prime))
}

/// One partial value `d^-n h(f^n P)`, kept with the exact data it came from.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HeightValue {
    pub n: u64,
    #[serde(serialize_with = "numfmt::serialize")]
    pub value: f64,
    /// `h(f^n P)`.
    #[serde(serialize_with = "numfmt::serialize")]
    pub log_height: f64,
    /// `d^n`.
    #[serde(serialize_with = "numfmt::dec")]
    pub scale: BigUint,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HeightEstimate {
    pub d: u32,
    pub values: Vec<HeightValue>,
    #[serde(serialize_with = "numfmt::serialize")]
    pub final_estimate: f64,
    /// `max d^n |v_(n+1) - v_n|` over the computed values.
    #[serde(serialize_with = "numfmt::serialize")]
    pub cauchy_bound: f64,
    pub truncated: bool,
    pub truncation_reason: Option<String>,
}

impl HeightEstimate {
    pub fn value(&self, n: u64) -> Option<f64> {
        self.values.get(n as usize).map(|v| v.value)
    }

    /// Whether `self` (started at `f(P)`) equals `d` times the shifted
    /// values of `base` (started at `P`) at every shared index. Compared on
    /// the underlying heights and exact scales, not on rounded quotients.
    pub fn is_shift_of(&self, base: &HeightEstimate) -> bool {
        let d = BigUint::from(self.d);
        self.d == base.d
            && self.values.iter().zip(base.values.iter().skip(1)).all(|(a, b)| {
                a.log_height.to_bits() == b.log_height.to_bits() && &a.scale * &d == b.scale
            })
    }

    fn from_heights(d: u32, heights: Vec<f64>, truncation_reason: Option<String>) -> Self {
        let mut scale = BigUint::one();
        let mut values = Vec::with_capacity(heights.len());
        for (n, h) in heights.into_iter().enumerate() {
            let value = if h == 0.0 { 0.0 } else { h / ratio_f64(&scale) };
            values.push(HeightValue { n: n as u64, value, log_height: h, scale: scale.clone() });
            scale *= d;
        }
        let cauchy_bound = values
            .windows(2)
            .map(|w| (w[1].value - w[0].value).abs() * ratio_f64(&w[0].scale))
            .fold(0.0, f64::max);
        let final_estimate = values.last().map_or(0.0, |v| v.value);
        HeightEstimate {
            d,
            values,
            final_estimate,
            cauchy_bound,
            truncated: truncation_reason.is_some(),
            truncation_reason,
        }
    }
}

fn ratio_f64(x: &BigUint) -> f64 {
    x.to_f64().unwrap_or(f64::INFINITY)
}

/// `d^-n h(f^n P)` for `n <= n_max`. A digit-ceiling hit ends the sequence
/// early with `truncated` set.
pub fn canonical_height_estimate(f: &Morphism, p: &ProjectivePoint, n_max: u64) -> Result<HeightEstimate> {
    let orbit = OrbitCache::new(f.clone(), p.clone())?;
    canonical_height_from_orbit(&orbit, n_max)
}

/// Same as [`canonical_height_estimate`] over an existing orbit cache.
pub fn canonical_height_from_orbit(orbit: &OrbitCache, n_max: u64) -> Result<HeightEstimate> {
    let mut heights = Vec::new();
    let mut reason = None;
    for n in 0..=n_max {
        match orbit.orbit_point(n) {
            Ok(q) => heights.push(weil_height(&q)),
            Err(Error::ResourceLimit(msg)) => {
                reason = Some(msg);
                break;
            }
            Err(e) => return Err(e),
        }
    }
    Ok(HeightEstimate::from_heights(orbit.morphism().degree(), heights, reason))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CountingValue {
    #[serde(serialize_with = "numfmt::serialize")]
    pub sum: f64,
    pub complete: bool,
    /// `sum + log(cofactor)` when a composite cofactor is left, else `sum`.
    #[serde(serialize_with = "numfmt::serialize")]
    pub upper_bound: f64,
}

/// `sum log p` over the distinct primes `p` dividing `value` outside `excluded`.
pub fn truncated_counting(value: &BigInt, excluded: &[BigUint], budget: &Budget) -> Result<CountingValue> {
    if value.is_zero() {
        return Err(Error::ZeroInput);
    }
    let f = factor(value, budget)?;
    let sum: f64 = f
        .factors
        .iter()
        .filter(|(p, _)| !excluded.contains(p))
        .map(|(p, _)| ln_biguint(p))
        .sum();
    let complete = f.is_complete();
    let upper_bound = if complete { sum } else { sum + ln_biguint(&f.cofactor) };
    Ok(CountingValue { sum, complete, upper_bound })
}

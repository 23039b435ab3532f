//! Generators for the integer sequences whose primitive divisors we study.
//!
//! Classical families are indexed from 1, dynamical ones from 0:
//!
//! | kind                 | term                                         |
//! |----------------------|----------------------------------------------|
//! | `powerdiff`          | `u^n - v^n`                                  |
//! | `lucas`              | `L_0 = 0, L_1 = 1, L_{n+1} = p L_n - q L_{n-1}` |
//! | `eds`                | elliptic divisibility sequence from `a_1..a_4` |
//! | `gcdgroup`           | `gcd(u^n - 1, v^n - 1)`                      |
//! | `dynvalue`           | `F(f^n(P))`                                  |
//! | `wanderingnumerator` | numerator of `f^n(alpha) - beta`             |

use std::collections::HashMap;
use std::sync::Mutex;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::geometry::{exceeds_digits, HomogeneousForm, Morphism, OrbitCache, ProjectivePoint, DEFAULT_DIGIT_CEILING};

/// Declarative description of one sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SequenceSpec {
    PowerDiff { u: BigInt, v: BigInt },
    Lucas { p: BigInt, q: BigInt },
    Eds { init: [BigInt; 4] },
    GcdGroup { u: BigInt, v: BigInt },
    DynValue { morphism: Morphism, form: HomogeneousForm, start: ProjectivePoint },
    WanderingNumerator { morphism: Morphism, alpha: BigRational, beta: BigRational },
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidSpec(msg.into())
}

impl SequenceSpec {
    pub fn power_diff(u: i64, v: i64) -> Result<Self> {
        let s = SequenceSpec::PowerDiff { u: u.into(), v: v.into() };
        s.validate()?;
        Ok(s)
    }

    pub fn lucas(p: i64, q: i64) -> Result<Self> {
        let s = SequenceSpec::Lucas { p: p.into(), q: q.into() };
        s.validate()?;
        Ok(s)
    }

    pub fn eds(init: [i64; 4]) -> Result<Self> {
        let s = SequenceSpec::Eds { init: init.map(BigInt::from) };
        s.validate()?;
        Ok(s)
    }

    pub fn gcd_group(u: i64, v: i64) -> Result<Self> {
        let s = SequenceSpec::GcdGroup { u: u.into(), v: v.into() };
        s.validate()?;
        Ok(s)
    }

    pub fn dyn_value(morphism: Morphism, form: HomogeneousForm, start: ProjectivePoint) -> Result<Self> {
        let s = SequenceSpec::DynValue { morphism, form, start };
        s.validate()?;
        Ok(s)
    }

    pub fn wandering(morphism: Morphism, alpha: BigRational, beta: BigRational) -> Result<Self> {
        let s = SequenceSpec::WanderingNumerator { morphism, alpha, beta };
        s.validate()?;
        Ok(s)
    }

    /// Serialized name of the kind.
    pub fn kind_name(&self) -> &'static str {
        match self {
            SequenceSpec::PowerDiff { .. } => "powerdiff",
            SequenceSpec::Lucas { .. } => "lucas",
            SequenceSpec::Eds { .. } => "eds",
            SequenceSpec::GcdGroup { .. } => "gcdgroup",
            SequenceSpec::DynValue { .. } => "dynvalue",
            SequenceSpec::WanderingNumerator { .. } => "wanderingnumerator",
        }
    }

    pub fn first_index(&self) -> u64 {
        match self {
            SequenceSpec::DynValue { .. } | SequenceSpec::WanderingNumerator { .. } => 0,
            _ => 1,
        }
    }

    /// Morphism and start point for the dynamical kinds.
    pub fn dynamics(&self) -> Option<(&Morphism, ProjectivePoint)> {
        match self {
            SequenceSpec::DynValue { morphism, start, .. } => Some((morphism, start.clone())),
            SequenceSpec::WanderingNumerator { morphism, alpha, .. } => Some((morphism, rational_point(alpha))),
            _ => None,
        }
    }

    /// The form whose values along the orbit give the sequence, for the
    /// dynamical kinds. For `wanderingnumerator` this is `q X - p Y` with
    /// `beta = p/q`.
    pub fn divisor_form(&self) -> Option<HomogeneousForm> {
        match self {
            SequenceSpec::DynValue { form, .. } => Some(form.clone()),
            SequenceSpec::WanderingNumerator { beta, .. } => HomogeneousForm::new(
                2,
                [(vec![1, 0], beta.denom().clone()), (vec![0, 1], -beta.numer().clone())],
            )
            .ok(),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            SequenceSpec::PowerDiff { u, v } => {
                if !(u > v && v.is_positive()) {
                    return Err(invalid("powerdiff needs u > v > 0"));
                }
                if !u.gcd(v).is_one() {
                    return Err(invalid("powerdiff needs gcd(u, v) = 1"));
                }
            }
            SequenceSpec::Lucas { p, q } => {
                if (p * p - q * BigInt::from(4)).is_zero() {
                    return Err(invalid("lucas discriminant p^2 - 4q vanishes"));
                }
            }
            SequenceSpec::Eds { init } => {
                if !init[0].is_one() {
                    return Err(invalid("eds needs a_1 = 1"));
                }
                if init[1].is_zero() || init[2].is_zero() {
                    return Err(invalid("eds needs a_2 * a_3 != 0"));
                }
                if !init[3].is_multiple_of(&init[1]) {
                    return Err(invalid("eds needs a_2 | a_4"));
                }
            }
            SequenceSpec::GcdGroup { u, v } => {
                let two = BigInt::from(2);
                if u < &two || v < &two {
                    return Err(invalid("gcdgroup needs u, v >= 2"));
                }
            }
            SequenceSpec::DynValue { morphism, form, start } => {
                let n = morphism.num_vars();
                if form.num_vars() != n {
                    return Err(Error::DimensionMismatch { expected: n, got: form.num_vars() });
                }
                if start.len() != n {
                    return Err(Error::DimensionMismatch { expected: n, got: start.len() });
                }
            }
            SequenceSpec::WanderingNumerator { morphism, .. } => {
                if morphism.num_vars() != 2 {
                    return Err(invalid("wanderingnumerator needs a morphism of P^1"));
                }
            }
        }
        Ok(())
    }

    /// Lucas pairs with `pq != 0`, `gcd(p, q) = 1` and `alpha/beta` not a
    /// root of unity (equivalently `p^2 / q` not in {0, 1, 2, 3, 4}).
    pub fn is_nondegenerate_lucas(&self) -> bool {
        match self {
            SequenceSpec::Lucas { p, q } => {
                if p.is_zero() || q.is_zero() || !p.gcd(q).is_one() {
                    return false;
                }
                let p2 = p * p;
                (0..=4).all(|k| p2 != q * BigInt::from(k))
            }
            _ => false,
        }
    }
}

fn rational_point(r: &BigRational) -> ProjectivePoint {
    ProjectivePoint::normalize(vec![r.numer().clone(), r.denom().clone()]).expect("denominator is nonzero")
}

/// An integer in a config: written as a decimal string, read from a string
/// or a JSON number.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntText(pub String);

impl IntText {
    pub fn to_bigint(&self) -> Result<BigInt> {
        int(&self.0)
    }

    pub fn to_biguint(&self) -> Result<num_bigint::BigUint> {
        self.to_bigint()?
            .try_into()
            .map_err(|_| Error::Parse(format!("not a non-negative integer: {:?}", self.0)))
    }
}

impl From<String> for IntText {
    fn from(s: String) -> Self {
        IntText(s)
    }
}

impl std::ops::Deref for IntText {
    type Target = str;
    fn deref(&self) -> &str {
        &self.0
    }
}

impl Serialize for IntText {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for IntText {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        match serde_json::Value::deserialize(deserializer)? {
            serde_json::Value::String(s) => Ok(IntText(s)),
            serde_json::Value::Number(n) if n.is_i64() || n.is_u64() => Ok(IntText(n.to_string())),
            other => Err(serde::de::Error::custom(format!("expected an integer, got {other}"))),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "lowercase", deny_unknown_fields)]
enum SpecRepr {
    PowerDiff { u: IntText, v: IntText },
    Lucas { p: IntText, q: IntText },
    Eds { init: Vec<IntText> },
    GcdGroup { u: IntText, v: IntText },
    DynValue { morphism: Vec<String>, form: String, start: Vec<IntText> },
    WanderingNumerator { morphism: Vec<String>, alpha: String, beta: String },
}

fn int(s: &str) -> Result<BigInt> {
    s.trim().parse().map_err(|_| Error::Parse(format!("not an integer: {s:?}")))
}

fn rational(s: &str) -> Result<BigRational> {
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (int(n)?, int(d)?),
        None => (int(s)?, BigInt::one()),
    };
    if den.is_zero() {
        return Err(Error::Parse(format!("zero denominator in {s:?}")));
    }
    Ok(BigRational::new(num, den))
}

impl TryFrom<SpecRepr> for SequenceSpec {
    type Error = Error;

    fn try_from(r: SpecRepr) -> Result<Self> {
        let spec = match r {
            SpecRepr::PowerDiff { u, v } => SequenceSpec::PowerDiff { u: int(&u)?, v: int(&v)? },
            SpecRepr::Lucas { p, q } => SequenceSpec::Lucas { p: int(&p)?, q: int(&q)? },
            SpecRepr::Eds { init } => {
                let vals = init.iter().map(|s| int(s)).collect::<Result<Vec<_>>>()?;
                let init: [BigInt; 4] = vals.try_into().map_err(|_| invalid("eds needs four initial terms"))?;
                SequenceSpec::Eds { init }
            }
            SpecRepr::GcdGroup { u, v } => SequenceSpec::GcdGroup { u: int(&u)?, v: int(&v)? },
            SpecRepr::DynValue { morphism, form, start } => {
                let morphism = Morphism::parse(&morphism)?;
                let form = HomogeneousForm::parse(&form, morphism.num_vars())?;
                let coords = start.iter().map(|s| int(s)).collect::<Result<Vec<_>>>()?;
                SequenceSpec::DynValue { morphism, form, start: ProjectivePoint::normalize(coords)? }
            }
            SpecRepr::WanderingNumerator { morphism, alpha, beta } => SequenceSpec::WanderingNumerator {
                morphism: Morphism::parse(&morphism)?,
                alpha: rational(&alpha)?,
                beta: rational(&beta)?,
            },
        };
        spec.validate()?;
        Ok(spec)
    }
}

impl From<&SequenceSpec> for SpecRepr {
    fn from(s: &SequenceSpec) -> Self {
        let t = |x: &BigInt| IntText(x.to_string());
        let strs = |v: &[BigInt]| v.iter().map(t).collect();
        match s {
            SequenceSpec::PowerDiff { u, v } => SpecRepr::PowerDiff { u: t(u), v: t(v) },
            SequenceSpec::Lucas { p, q } => SpecRepr::Lucas { p: t(p), q: t(q) },
            SequenceSpec::Eds { init } => SpecRepr::Eds { init: strs(init) },
            SequenceSpec::GcdGroup { u, v } => SpecRepr::GcdGroup { u: t(u), v: t(v) },
            SequenceSpec::DynValue { morphism, form, start } => SpecRepr::DynValue {
                morphism: morphism.component_strings(),
                form: form.to_string(),
                start: strs(start.coords()),
            },
            SequenceSpec::WanderingNumerator { morphism, alpha, beta } => SpecRepr::WanderingNumerator {
                morphism: morphism.component_strings(),
                alpha: alpha.to_string(),
                beta: beta.to_string(),
            },
        }
    }
}

impl Serialize for SequenceSpec {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        SpecRepr::from(self).serialize(serializer)
    }
}

impl SequenceSpec {
    /// Parses the JSON shape, keeping the error kind of a failed validation.
    pub fn from_value(value: serde_json::Value) -> Result<Self> {
        let repr: SpecRepr = serde_json::from_value(value).map_err(|e| Error::Parse(e.to_string()))?;
        SequenceSpec::try_from(repr)
    }
}

impl<'de> Deserialize<'de> for SequenceSpec {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = SpecRepr::deserialize(deserializer)?;
        SequenceSpec::try_from(repr).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Default)]
struct StreamState {
    /// `terms[k]` is the term at index `first_index + k`.
    terms: Vec<BigInt>,
    /// Running `(u^n, v^n)` for the power-based kinds.
    powers: Option<(BigInt, BigInt)>,
    eds: HashMap<u64, BigInt>,
}

/// Memoized terms of one sequence. Reads from several threads are safe;
/// each index is computed once.
#[derive(Debug)]
pub struct TermStream {
    spec: SequenceSpec,
    orbit: Option<OrbitCache>,
    digit_ceiling: u64,
    state: Mutex<StreamState>,
}

impl TermStream {
    pub fn new(spec: SequenceSpec) -> Result<Self> {
        Self::with_digit_ceiling(spec, DEFAULT_DIGIT_CEILING)
    }

    pub fn with_digit_ceiling(spec: SequenceSpec, digit_ceiling: u64) -> Result<Self> {
        spec.validate()?;
        let orbit = match spec.dynamics() {
            Some((f, start)) => Some(OrbitCache::new(f.clone(), start)?.with_digit_ceiling(digit_ceiling)),
            None => None,
        };
        let mut state = StreamState::default();
        if let SequenceSpec::Eds { init } = &spec {
            state.eds.insert(0, BigInt::zero());
            for (i, a) in init.iter().enumerate() {
                state.eds.insert(i as u64 + 1, a.clone());
            }
        }
        Ok(TermStream { spec, orbit, digit_ceiling, state: Mutex::new(state) })
    }

    /// Reuses an existing orbit cache (for instance one loaded from disk).
    pub fn with_orbit(spec: SequenceSpec, orbit: OrbitCache) -> Result<Self> {
        let ceiling = orbit.digit_ceiling();
        let mut stream = Self::with_digit_ceiling(spec, ceiling)?;
        match stream.spec.dynamics() {
            Some((f, start)) if f == orbit.morphism() && &start == orbit.start() => {
                stream.orbit = Some(orbit);
                Ok(stream)
            }
            _ => Err(invalid("orbit cache does not match the sequence")),
        }
    }

    pub fn spec(&self) -> &SequenceSpec {
        &self.spec
    }

    pub fn orbit(&self) -> Option<&OrbitCache> {
        self.orbit.as_ref()
    }

    /// The exact term `a_n`.
    pub fn term(&self, n: u64) -> Result<BigInt> {
        let first = self.spec.first_index();
        if n < first {
            return Err(Error::IndexOutOfRange { index: n, first });
        }
        let mut state = self.state.lock().unwrap_or_else(|e| e.into_inner());
        let k = (n - first) as usize;
        while state.terms.len() <= k {
            let index = first + state.terms.len() as u64;
            let next = self.compute(&mut state, index)?;
            if self.orbit.is_none() && exceeds_digits(next.magnitude(), self.digit_ceiling) {
                return Err(Error::ResourceLimit(format!(
                    "term {index} has more than {} digits",
                    self.digit_ceiling
                )));
            }
            state.terms.push(next);
        }
        Ok(state.terms[k].clone())
    }

    /// Terms from the first index through `n_max` inclusive.
    pub fn terms_through(&self, n_max: u64) -> Result<Vec<BigInt>> {
        (self.spec.first_index()..=n_max).map(|n| self.term(n)).collect()
    }

    fn compute(&self, state: &mut StreamState, n: u64) -> Result<BigInt> {
        match &self.spec {
            SequenceSpec::PowerDiff { u, v } => {
                let (pu, pv) = advance_powers(state, u, v);
                Ok(pu - pv)
            }
            SequenceSpec::GcdGroup { u, v } => {
                let (pu, pv) = advance_powers(state, u, v);
                Ok((pu - 1u32).gcd(&(pv - 1u32)))
            }
            SequenceSpec::Lucas { p, q } => Ok(match n {
                1 => BigInt::one(),
                2 => p.clone(),
                _ => {
                    let k = state.terms.len();
                    p * &state.terms[k - 1] - q * &state.terms[k - 2]
                }
            }),
            SequenceSpec::Eds { .. } => eds_term(&mut state.eds, n),
            SequenceSpec::DynValue { form, .. } => {
                let point = self.orbit.as_ref().expect("dynamical stream has an orbit").orbit_point(n)?;
                form.evaluate(point.coords())
            }
            SequenceSpec::WanderingNumerator { beta, .. } => {
                let point = self.orbit.as_ref().expect("dynamical stream has an orbit").orbit_point(n)?;
                let (x, y) = (&point.coords()[0], &point.coords()[1]);
                Ok(x * beta.denom() - y * beta.numer())
            }
        }
    }
}

fn advance_powers(state: &mut StreamState, u: &BigInt, v: &BigInt) -> (BigInt, BigInt) {
    let next = match state.powers.take() {
        None => (u.clone(), v.clone()),
        Some((pu, pv)) => (pu * u, pv * v),
    };
    state.powers = Some(next.clone());
    next
}

/// Elliptic divisibility term via the duplication formulas
/// `a_{2m+1} = a_{m+2} a_m^3 - a_{m-1} a_{m+1}^3` and
/// `a_{2m} a_2 = a_m (a_{m+2} a_{m-1}^2 - a_{m-2} a_{m+1}^2)`.
fn eds_term(memo: &mut HashMap<u64, BigInt>, n: u64) -> Result<BigInt> {
    if let Some(v) = memo.get(&n) {
        return Ok(v.clone());
    }
    let m = n / 2;
    let value = if n % 2 == 1 {
        let am = eds_term(memo, m)?;
        let am1 = eds_term(memo, m + 1)?;
        let am2 = eds_term(memo, m + 2)?;
        let amm1 = eds_term(memo, m - 1)?;
        &am2 * am.pow(3) - &amm1 * am1.pow(3)
    } else {
        let am = eds_term(memo, m)?;
        let am1 = eds_term(memo, m + 1)?;
        let am2 = eds_term(memo, m + 2)?;
        let amm1 = eds_term(memo, m - 1)?;
        let amm2 = eds_term(memo, m - 2)?;
        let numerator = am * (am2 * amm1.pow(2) - amm2 * am1.pow(2));
        let a2 = &memo[&2];
        let (q, r) = numerator.div_rem(a2);
        if !r.is_zero() {
            return Err(Error::NonIntegral(n));
        }
        q
    };
    memo.insert(n, value.clone());
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn b(v: i64) -> BigInt {
        BigInt::from(v)
    }

    /// Independent EDS oracle: the general Ward relation with `m - n` in {1, 2}.
    fn ward_oracle(init: [i64; 4], upto: usize) -> Vec<BigInt> {
        let mut a = vec![b(0)];
        a.extend(init.iter().map(|&x| b(x)));
        for k in 5..=upto {
            let (m, n) = if k % 2 == 1 { ((k + 1) / 2, (k - 1) / 2) } else { (k / 2 + 1, k / 2 - 1) };
            let num = &a[m + 1] * &a[m - 1] * a[n].pow(2) - &a[n + 1] * &a[n - 1] * a[m].pow(2);
            let den = &a[m - n];
            assert!((&num % den).is_zero());
            a.push(num / den);
        }
        a
    }

    #[test]
    fn examples() {
        let t = |s: SequenceSpec, n| TermStream::new(s).unwrap().term(n).unwrap();
        assert_eq!(t(SequenceSpec::power_diff(2, 1).unwrap(), 6), b(63));
        assert_eq!(t(SequenceSpec::lucas(1, -1).unwrap(), 12), b(144));
        assert_eq!(t(SequenceSpec::eds([1, 1, -1, 1]).unwrap(), 10), b(-4));
        assert_eq!(t(SequenceSpec::gcd_group(2, 3).unwrap(), 4), b(5));
        let f = Morphism::parse(&["X^2+Y^2", "Y^2"]).unwrap();
        let dynv = SequenceSpec::dyn_value(
            f,
            HomogeneousForm::parse("X - 3Y", 2).unwrap(),
            ProjectivePoint::from_i64s(&[1, 1]).unwrap(),
        )
        .unwrap();
        assert_eq!(t(dynv, 2), b(2));
        let square = Morphism::power_map(2, 2).unwrap();
        let wander = SequenceSpec::wandering(square, BigRational::from(b(2)), BigRational::from(b(3))).unwrap();
        assert_eq!(t(wander, 3), b(253));
    }

    #[test]
    fn eds_matches_ward_oracle() {
        let stream = TermStream::new(SequenceSpec::eds([1, 1, -1, 1]).unwrap()).unwrap();
        let oracle = ward_oracle([1, 1, -1, 1], 40);
        for n in 1..=40u64 {
            assert_eq!(stream.term(n).unwrap(), oracle[n as usize], "a_{n}");
        }
        let head: Vec<i64> = (1..=10).map(|n| stream.term(n).unwrap().try_into().unwrap()).collect();
        assert_eq!(head, vec![1, 1, -1, 1, 2, -1, -3, -5, 7, -4]);
    }

    #[test]
    fn eds_non_integral_is_reported() {
        // a_2 = 2 does not divide a_4 = 1, so a_6 = 27/2 (validation would
        // reject this seed; the recurrence check is exercised directly).
        let mut memo: HashMap<u64, BigInt> = [(0, 0), (1, 1), (2, 2), (3, 1), (4, 1)]
            .into_iter()
            .map(|(k, v)| (k, b(v)))
            .collect();
        assert_eq!(eds_term(&mut memo, 5), Ok(b(7)));
        assert_eq!(eds_term(&mut memo, 6), Err(Error::NonIntegral(6)));
    }

    #[test]
    fn index_conventions() {
        let s = TermStream::new(SequenceSpec::power_diff(3, 2).unwrap()).unwrap();
        assert_eq!(s.term(0), Err(Error::IndexOutOfRange { index: 0, first: 1 }));
        let f = Morphism::power_map(2, 2).unwrap();
        let w = SequenceSpec::wandering(f, BigRational::new(b(1), b(2)), BigRational::from(b(0))).unwrap();
        // f^0(1/2) - 0 has numerator 1.
        assert_eq!(TermStream::new(w).unwrap().term(0).unwrap(), b(1));
    }

    #[test]
    fn classical_digit_ceiling() {
        let s = TermStream::with_digit_ceiling(SequenceSpec::power_diff(10, 1).unwrap(), 5).unwrap();
        assert_eq!(s.term(5).unwrap(), b(99999));
        assert!(matches!(s.term(6), Err(Error::ResourceLimit(_))));
    }

    #[test]
    fn validation() {
        assert!(SequenceSpec::power_diff(2, 2).is_err());
        assert!(SequenceSpec::power_diff(4, 2).is_err());
        assert!(SequenceSpec::power_diff(1, 2).is_err());
        assert!(SequenceSpec::lucas(2, 1).is_err());
        assert!(SequenceSpec::eds([2, 1, 1, 1]).is_err());
        assert!(SequenceSpec::eds([1, 0, 1, 1]).is_err());
        assert!(SequenceSpec::eds([1, 2, 1, 3]).is_err());
        assert!(SequenceSpec::gcd_group(1, 3).is_err());
        assert!(SequenceSpec::lucas(1, -1).unwrap().is_nondegenerate_lucas());
        assert!(!SequenceSpec::lucas(1, 1).unwrap().is_nondegenerate_lucas());
        assert!(!SequenceSpec::lucas(3, 0).unwrap().is_nondegenerate_lucas());
        assert!(!SequenceSpec::lucas(2, 2).unwrap().is_nondegenerate_lucas());
        assert!(!SequenceSpec::lucas(0, 1).unwrap().is_nondegenerate_lucas());
    }

    #[test]
    fn json_shape() {
        let s = SequenceSpec::power_diff(2, 1).unwrap();
        assert_eq!(serde_json::to_string(&s).unwrap(), r#"{"kind":"powerdiff","params":{"u":"2","v":"1"}}"#);
        let text = r#"{"kind":"dynvalue","params":{"morphism":["X^2+Y^2","Y^2"],"form":"X-3*Y","start":["2","2"]}}"#;
        let spec: SequenceSpec = serde_json::from_str(text).unwrap();
        assert_eq!(spec.dynamics().unwrap().1, ProjectivePoint::from_i64s(&[1, 1]).unwrap());
        let bad = r#"{"kind":"powerdiff","params":{"u":"2","v":"2"}}"#;
        assert!(serde_json::from_str::<SequenceSpec>(bad).is_err());
        let wander = r#"{"kind":"wanderingnumerator","params":{"morphism":["X^2","Y^2"],"alpha":"4/6","beta":"3"}}"#;
        let spec: SequenceSpec = serde_json::from_str(wander).unwrap();
        assert!(serde_json::to_string(&spec).unwrap().contains(r#""alpha":"2/3""#));
    }

    #[test]
    fn dyn_value_growth_is_cauchy() {
        let f = Morphism::parse(&["X^2+Y^2", "Y^2"]).unwrap();
        let spec = SequenceSpec::dyn_value(
            f,
            HomogeneousForm::parse("X - 3Y", 2).unwrap(),
            ProjectivePoint::from_i64s(&[1, 1]).unwrap(),
        )
        .unwrap();
        let s = TermStream::new(spec).unwrap();
        let v: Vec<f64> = (1..=12)
            .map(|n| crate::arith::ln_abs(&s.term(n).unwrap()) / 2f64.powi(n as i32))
            .collect();
        let diffs: Vec<f64> = v.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
        for w in diffs.windows(2).skip(2) {
            assert!(w[1] <= w[0] + 1e-15, "{diffs:?}");
        }
    }

    fn arb_spec() -> impl Strategy<Value = SequenceSpec> {
        prop_oneof![
            (2i64..60, 1i64..59).prop_filter_map("coprime", |(u, v)| SequenceSpec::power_diff(u, v).ok()),
            (-10i64..10, -10i64..10).prop_filter_map("disc", |(p, q)| SequenceSpec::lucas(p, q).ok()),
            (-5i64..5, -5i64..5, -5i64..5).prop_filter_map("eds", |(a2, a3, k)| SequenceSpec::eds([1, a2, a3, a2 * k]).ok()),
            (2i64..30, 2i64..30).prop_filter_map("gcd", |(u, v)| SequenceSpec::gcd_group(u, v).ok()),
            (-9i64..9, 1i64..9, -9i64..9, 1i64..9).prop_filter_map("wander", |(a, b_, c, d)| {
                let f = Morphism::parse(&["X^2 - 2*Y^2", "X*Y + 3*Y^2"]).ok()?;
                SequenceSpec::wandering(f, BigRational::new(a.into(), b_.into()), BigRational::new(c.into(), d.into())).ok()
            }),
        ]
    }

    proptest! {
        #[test]
        fn spec_json_round_trips(spec in arb_spec()) {
            let text = serde_json::to_string(&spec).unwrap();
            let back: SequenceSpec = serde_json::from_str(&text).unwrap();
            prop_assert_eq!(&back, &spec);
            prop_assert_eq!(serde_json::to_string(&back).unwrap(), text);
        }

        #[test]
        fn power_diff_is_divisibility_sequence(u in 2i64..12, v in 1i64..11, m in 1u64..40, k in 1u64..5) {
            prop_assume!(u > v);
            if let Ok(spec) = SequenceSpec::power_diff(u, v) {
                let s = TermStream::new(spec).unwrap();
                prop_assert!((s.term(m * k).unwrap() % s.term(m).unwrap()).is_zero());
            }
        }

        #[test]
        fn lucas_is_divisibility_sequence(p in -10i64..10, q in -10i64..10, m in 1u64..40, k in 1u64..5) {
            if let Ok(spec) = SequenceSpec::lucas(p, q) {
                let s = TermStream::new(spec).unwrap();
                let am = s.term(m).unwrap();
                let amk = s.term(m * k).unwrap();
                if am.is_zero() {
                    prop_assert!(amk.is_zero());
                } else {
                    prop_assert!((amk % am).is_zero());
                }
            }
        }

        #[test]
        fn gcd_group_divides_both(u in 2i64..40, v in 2i64..40, n in 1u64..60) {
            let s = TermStream::new(SequenceSpec::gcd_group(u, v).unwrap()).unwrap();
            let g = s.term(n).unwrap();
            let nn = n as u32;
            prop_assert!(((b(u).pow(nn) - b(1)) % &g).is_zero());
            prop_assert!(((b(v).pow(nn) - b(1)) % &g).is_zero());
        }
    }

    #[test]
    fn power_diff_divisibility_through_200() {
        let s = TermStream::new(SequenceSpec::power_diff(3, 2).unwrap()).unwrap();
        for n in 1..=200u64 {
            let an = s.term(n).unwrap();
            for m in (1..n).filter(|m| n % m == 0) {
                assert!((&an % s.term(m).unwrap()).is_zero(), "{m} | {n}");
            }
        }
    }

    #[test]
    fn eds_full_ward_relation_on_samples() {
        let s = TermStream::new(SequenceSpec::eds([1, 1, -1, 1]).unwrap()).unwrap();
        let a = |k: u64| s.term(k).unwrap_or_else(|_| b(0));
        for m in 2..20u64 {
            for n in 1..m {
                let lhs = a(m + n) * a(m - n);
                let rhs = a(m + 1) * a(m - 1) * a(n).pow(2) - a(n + 1) * a(n - 1) * a(m).pow(2);
                assert_eq!(lhs, rhs, "m={m} n={n}");
            }
        }
    }
}

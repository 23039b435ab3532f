//! Primitive parts, primitive-divisor verdicts and Zsigmondy sets.
//!
//! No factorization is needed to decide whether `a_n` has a primitive prime
//! divisor: dividing `|a_n|` by its gcd with every earlier nonzero term until
//! the gcd is 1 leaves exactly the primitive part `c_n`, and `c_n > 1` iff a
//! primitive prime exists. Factoring is only used to list those primes.

use std::fmt::Write as _;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::arith::{self, decimal_digits, factor, ln_biguint, Budget};
use crate::error::{Error, Result};
use crate::geometry::{HomogeneousForm, ProjectivePoint, DEFAULT_DIGIT_CEILING};
use crate::numfmt;
use crate::sequences::{SequenceSpec, TermStream};

/// gcd with one Euclid step first; the binary gcd is slow on operands of
/// very different sizes.
fn gcd(a: &BigUint, b: &BigUint) -> BigUint {
    let (big, small) = if a.bits() >= b.bits() { (a, b) } else { (b, a) };
    if small.is_zero() {
        return big.clone();
    }
    if big.bits() > small.bits() + 64 {
        (big % small).gcd(small)
    } else {
        big.gcd(small)
    }
}

/// Divides every prime of `h` out of `c`.
fn strip(c: &mut BigUint, h: &BigUint) {
    let mut g = gcd(c, h);
    while !g.is_one() && !c.is_zero() {
        *c /= &g;
        g = gcd(c, &g);
    }
}

/// `|a|` with every prime dividing a nonzero history term or an excluded
/// prime removed, multiplicities of the remaining primes intact.
pub fn primitive_part(a: &BigInt, history: &[BigInt], excluded: &[BigInt]) -> Result<BigUint> {
    if a.is_zero() {
        return Err(Error::ZeroInput);
    }
    let mut c = a.magnitude().clone();
    for h in history.iter().chain(excluded) {
        if c.is_one() {
            break;
        }
        if !h.is_zero() {
            strip(&mut c, h.magnitude());
        }
    }
    Ok(c)
}

/// Whether `a` has a prime divisor dividing no nonzero history term and
/// outside `excluded`. Zero always does (it is divisible by every prime).
pub fn has_primitive_divisor(a: &BigInt, history: &[BigInt], excluded: &[BigInt]) -> bool {
    if a.is_zero() {
        return true;
    }
    primitive_part(a, history, excluded).is_ok_and(|c| !c.is_one())
}

/// Pairwise coprime integers whose prime supports together cover every
/// prime seen so far. New primitive parts are coprime to all generators by
/// construction, so they are appended without splitting.
#[derive(Debug, Clone, Default)]
pub struct SupportBasis {
    generators: Vec<BigUint>,
}

impl SupportBasis {
    pub fn new(excluded: &[BigUint]) -> Self {
        let mut basis = SupportBasis::default();
        for p in excluded {
            let c = basis.strip(p);
            basis.absorb(c);
        }
        basis
    }

    pub fn generators(&self) -> &[BigUint] {
        &self.generators
    }

    /// `a` with every prime of the basis removed.
    pub fn strip(&self, a: &BigUint) -> BigUint {
        let mut c = a.clone();
        for g in &self.generators {
            if c.is_one() {
                break;
            }
            strip(&mut c, g);
        }
        c
    }

    /// Adds a value already coprime to every generator.
    pub fn absorb(&mut self, c: BigUint) {
        if c > BigUint::one() {
            self.generators.push(c);
        }
    }
}

/// One term of a sequence with its primitive-divisor diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TermRecord {
    pub n: u64,
    #[serde(serialize_with = "numfmt::dec")]
    pub value: BigInt,
    /// `None` for a zero term.
    #[serde(serialize_with = "numfmt::dec_opt")]
    pub primitive_part: Option<BigUint>,
    pub has_primitive: bool,
    /// `log c_n`; `None` for a zero term.
    #[serde(serialize_with = "numfmt::serialize_opt")]
    pub b_n: Option<f64>,
    /// Filled only when `c_n` factors completely within the budget.
    #[serde(serialize_with = "numfmt::dec_opt_vec")]
    pub primitive_primes: Option<Vec<BigUint>>,
}

/// Knobs for [`zsigmondy_report`].
#[derive(Debug, Clone, PartialEq)]
pub struct ZsigmondyOptions {
    /// Primes treated as invertible (the ring Z[1/S]).
    pub excluded_primes: Vec<BigUint>,
    /// Budget for listing primitive primes; `None` skips factoring.
    pub budget: Option<Budget>,
    pub digit_ceiling: u64,
}

impl Default for ZsigmondyOptions {
    fn default() -> Self {
        ZsigmondyOptions {
            excluded_primes: Vec::new(),
            budget: Some(Budget::default()),
            digit_ceiling: DEFAULT_DIGIT_CEILING,
        }
    }
}

impl ZsigmondyOptions {
    pub fn excluding(primes: &[u64]) -> Self {
        ZsigmondyOptions {
            excluded_primes: primes.iter().map(|&p| BigUint::from(p)).collect(),
            ..Self::default()
        }
    }

    pub fn without_factoring(mut self) -> Self {
        self.budget = None;
        self
    }
}

/// The Zsigmondy set of a sequence up to a horizon with per-term records.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZsigmondyReport {
    pub spec: SequenceSpec,
    pub horizon: u64,
    #[serde(serialize_with = "numfmt::dec_vec")]
    pub excluded_primes: Vec<BigUint>,
    pub zsigmondy_set: Vec<u64>,
    pub truncated: bool,
    /// First index that could not be computed because of a resource limit.
    pub truncated_at: Option<u64>,
    pub truncation_reason: Option<String>,
    /// `max log|a_n| / n` over nonzero terms with `horizon/2 < n <= horizon`.
    #[serde(serialize_with = "numfmt::serialize_opt")]
    pub tail_log_growth: Option<f64>,
    pub records: Vec<TermRecord>,
}

impl ZsigmondyReport {
    pub fn record(&self, n: u64) -> Option<&TermRecord> {
        let first = self.records.first()?.n;
        self.records.get(n.checked_sub(first)? as usize)
    }

    /// Columns `n,digits,c_n_digits,has_primitive,b_n`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,digits,c_n_digits,has_primitive,b_n\n");
        for r in &self.records {
            let c_digits = r.primitive_part.as_ref().map(|c| decimal_digits(c).to_string()).unwrap_or_default();
            let b = r.b_n.map(numfmt::sig12).unwrap_or_default();
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                r.n,
                decimal_digits(r.value.magnitude()),
                c_digits,
                r.has_primitive,
                b
            );
        }
        out
    }
}

fn validated_excluded(excluded: &[BigUint]) -> Result<Vec<BigUint>> {
    let mut out = excluded.to_vec();
    out.sort();
    out.dedup();
    if let Some(p) = out.iter().find(|p| !arith::is_probable_prime(p)) {
        return Err(Error::NotPrime(p.to_string()));
    }
    Ok(out)
}

/// Computes the Zsigmondy set of `spec` through index `n_max`.
pub fn zsigmondy_set(spec: &SequenceSpec, n_max: u64, excluded: &[BigUint]) -> Result<ZsigmondyReport> {
    let opts = ZsigmondyOptions { excluded_primes: excluded.to_vec(), ..ZsigmondyOptions::default() };
    let stream = TermStream::with_digit_ceiling(spec.clone(), opts.digit_ceiling)?;
    zsigmondy_report(&stream, n_max, &opts)
}

/// Like [`zsigmondy_set`] but over an existing stream, so its caches are
/// reused. A resource limit ends the run early with `truncated` set; other
/// errors propagate.
pub fn zsigmondy_report(stream: &TermStream, n_max: u64, opts: &ZsigmondyOptions) -> Result<ZsigmondyReport> {
    let spec = stream.spec();
    let first = spec.first_index();
    if n_max < first {
        return Err(Error::IndexOutOfRange { index: n_max, first });
    }
    let excluded = validated_excluded(&opts.excluded_primes)?;
    let mut basis = SupportBasis::new(&excluded);
    let mut records = Vec::new();
    let mut truncated_at = None;
    let mut truncation_reason = None;
    for n in first..=n_max {
        let value = match stream.term(n) {
            Ok(v) => v,
            Err(Error::ResourceLimit(msg)) => {
                truncated_at = Some(n);
                truncation_reason = Some(msg);
                break;
            }
            Err(e) => return Err(e),
        };
        records.push(analyze_term(n, value, &mut basis, opts.budget.as_ref())?);
    }
    let zsigmondy_set = records.iter().filter(|r| !r.has_primitive).map(|r| r.n).collect();
    let tail_log_growth = records
        .iter()
        .filter(|r| r.n > n_max / 2 && r.n > 0 && !r.value.is_zero())
        .map(|r| arith::ln_abs(&r.value) / r.n as f64)
        .reduce(f64::max);
    Ok(ZsigmondyReport {
        spec: spec.clone(),
        horizon: n_max,
        excluded_primes: excluded,
        zsigmondy_set,
        truncated: truncated_at.is_some(),
        truncated_at,
        truncation_reason,
        tail_log_growth,
        records,
    })
}

fn analyze_term(n: u64, value: BigInt, basis: &mut SupportBasis, budget: Option<&Budget>) -> Result<TermRecord> {
    if value.is_zero() {
        return Ok(TermRecord {
            n,
            value,
            primitive_part: None,
            has_primitive: true,
            b_n: None,
            primitive_primes: None,
        });
    }
    let c = basis.strip(value.magnitude());
    let has_primitive = !c.is_one();
    let b_n = if has_primitive { ln_biguint(&c) } else { 0.0 };
    let primitive_primes = match budget {
        Some(b) => {
            let f = factor(&BigInt::from(c.clone()), b)?;
            f.is_complete().then(|| f.primes())
        }
        None => None,
    };
    basis.absorb(c.clone());
    Ok(TermRecord {
        n,
        value,
        primitive_part: Some(c),
        has_primitive,
        b_n: Some(b_n),
        primitive_primes,
    })
}

/// `B_n = log c_n`, the summed local heights at primes new at step `n`.
pub fn b_statistic(report: &ZsigmondyReport, n: u64) -> Result<f64> {
    let first = report.spec.first_index();
    let record = report.record(n).ok_or(Error::IndexOutOfRange { index: n, first })?;
    record.b_n.ok_or(Error::ZeroTerm(n))
}

/// Whether the reduction of `point` mod `p` lies on `{F = 0}` mod `p`,
/// i.e. `p | F(point)` for the normalized point.
pub fn reduction_intersects(point: &ProjectivePoint, form: &HomogeneousForm, p: &BigInt) -> Result<bool> {
    if !arith::is_prime_int(p) {
        return Err(Error::NotPrime(p.to_string()));
    }
    let value = form.evaluate(point.coords())?;
    Ok(value.is_multiple_of(p))
}

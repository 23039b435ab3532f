//! Exact integer utilities: primality, valuations, a budgeted factoring
//! pipeline and a few helpers for logarithms and digit counts of big values.

use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint, RandBigInt, Sign};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Bases that make Miller-Rabin deterministic below 3.317e24.
const DETERMINISTIC_BASES: [u32; 13] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];
const DETERMINISTIC_LIMIT: u128 = 3_317_044_064_679_887_385_961_981;
const EXTRA_ROUNDS: usize = 16;

/// How much effort `factor` may spend.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct Budget {
    /// Trial division runs over all primes up to this bound.
    pub trial_bound: u64,
    /// Pollard-rho iterations allowed per composite cofactor.
    pub rho_iterations: u64,
    /// Cofactors wider than this many bits skip the rho stage.
    pub rho_max_bits: u64,
    /// Cofactors wider than this are left unfactored without a primality
    /// test (a single Miller-Rabin round is slow at tens of thousands of bits).
    pub primality_max_bits: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            trial_bound: 1_000_000,
            rho_iterations: 200_000,
            rho_max_bits: 1024,
            primality_max_bits: 4096,
        }
    }
}

impl Budget {
    pub fn trial_only(trial_bound: u64) -> Self {
        Budget {
            trial_bound,
            rho_iterations: 0,
            rho_max_bits: 0,
            primality_max_bits: Budget::default().primality_max_bits,
        }
    }
}

/// Result of a (possibly partial) factorization.
///
/// `value = sign * cofactor * prod(p^e)`. When the budget runs out the
/// unfactored composite remainder is kept in `cofactor`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    pub value: BigInt,
    pub factors: Vec<(BigUint, u32)>,
    pub cofactor: BigUint,
    pub budget_exhausted: bool,
}

impl Factorization {
    pub fn is_complete(&self) -> bool {
        !self.budget_exhausted
    }

    pub fn sign(&self) -> Sign {
        self.value.sign()
    }

    /// Distinct primes found, in increasing order.
    pub fn primes(&self) -> Vec<BigUint> {
        self.factors.iter().map(|(p, _)| p.clone()).collect()
    }

    /// Multiplies everything back together, sign included.
    pub fn reassemble(&self) -> BigInt {
        let mut acc = self.cofactor.clone();
        for (p, e) in &self.factors {
            acc *= p.pow(*e);
        }
        BigInt::from_biguint(self.value.sign(), acc)
    }
}

fn sieve(bound: u64) -> Vec<u64> {
    if bound < 2 {
        return Vec::new();
    }
    let n = bound as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

/// Primes up to `bound`; the default bound is sieved once and shared.
pub fn primes_up_to(bound: u64) -> std::borrow::Cow<'static, [u64]> {
    static DEFAULT: OnceLock<Vec<u64>> = OnceLock::new();
    let default_bound = Budget::default().trial_bound;
    if bound <= default_bound {
        let all = DEFAULT.get_or_init(|| sieve(default_bound));
        let end = all.partition_point(|&p| p <= bound);
        std::borrow::Cow::Borrowed(&all[..end])
    } else {
        std::borrow::Cow::Owned(sieve(bound))
    }
}

fn seed_from(n: &BigUint, salt: u64) -> u64 {
    let low = n.iter_u64_digits().next().unwrap_or(0);
    low ^ n.bits().rotate_left(32) ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

fn miller_rabin_round(n: &BigUint, n_minus_one: &BigUint, d: &BigUint, s: u64, base: &BigUint) -> bool {
    let mut x = base.modpow(d, n);
    if x.is_one() || &x == n_minus_one {
        return true;
    }
    for _ in 1..s {
        x = (&x * &x) % n;
        if &x == n_minus_one {
            return true;
        }
        if x.is_one() {
            return false;
        }
    }
    false
}

/// Strong probable-prime test with a fixed deterministic witness set.
pub fn is_probable_prime(n: &BigUint) -> bool {
    if n < &BigUint::from(2u32) {
        return false;
    }
    for &p in &DETERMINISTIC_BASES {
        let p = BigUint::from(p);
        if n == &p {
            return true;
        }
        if (n % &p).is_zero() {
            return false;
        }
    }
    let n_minus_one = n - 1u32;
    let s = n_minus_one.trailing_zeros().unwrap_or(0);
    let d = &n_minus_one >> s;
    for &b in &DETERMINISTIC_BASES {
        if !miller_rabin_round(n, &n_minus_one, &d, s, &BigUint::from(b)) {
            return false;
        }
    }
    let below_limit = n.to_u128().is_some_and(|v| v < DETERMINISTIC_LIMIT);
    if below_limit {
        return true;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed_from(n, 1));
    let two = BigUint::from(2u32);
    for _ in 0..EXTRA_ROUNDS {
        let base = rng.gen_biguint_range(&two, &n_minus_one);
        if !miller_rabin_round(n, &n_minus_one, &d, s, &base) {
            return false;
        }
    }
    true
}

pub fn is_prime_int(n: &BigInt) -> bool {
    n.sign() == Sign::Plus && is_probable_prime(n.magnitude())
}

/// Brent's variant of Pollard rho. Returns a nontrivial divisor of the
/// odd composite `n` or `None` once `iterations` are spent.
fn pollard_brent(n: &BigUint, iterations: u64) -> Option<BigUint> {
    const BATCH: u64 = 64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed_from(n, 2));
    let one = BigUint::one();
    let mut spent = 0u64;
    while spent < iterations {
        let c = rng.gen_biguint_range(&one, n);
        let mut y = rng.gen_biguint_range(&one, n);
        let step = |v: &BigUint| (v * v + &c) % n;
        let mut r = 1u64;
        let mut q = BigUint::one();
        let mut g = BigUint::one();
        let mut x = y.clone();
        let mut ys = y.clone();
        while g.is_one() && spent < iterations {
            x = y.clone();
            for _ in 0..r {
                y = step(&y);
            }
            spent += r;
            let mut k = 0u64;
            while k < r && g.is_one() {
                ys = y.clone();
                let lim = BATCH.min(r - k);
                for _ in 0..lim {
                    y = step(&y);
                    let diff = if x > y { &x - &y } else { &y - &x };
                    q = (q * diff) % n;
                }
                spent += lim;
                g = q.gcd(n);
                k += lim;
            }
            r *= 2;
        }
        if &g == n {
            // The batch overshot; walk it one step at a time.
            loop {
                ys = step(&ys);
                let diff = if x > ys { &x - &ys } else { &ys - &x };
                g = diff.gcd(n);
                if !g.is_one() {
                    break;
                }
            }
        }
        if !g.is_one() && &g != n {
            return Some(g);
        }
    }
    None
}

fn exact_root(n: &BigUint) -> Option<(BigUint, u32)> {
    let bits = n.bits();
    for k in 2..=bits.min(64) as u32 {
        let r = n.nth_root(k);
        if r > BigUint::one() && &r.pow(k) == n {
            return Some((r, k));
        }
    }
    None
}

/// Best-effort factorization: trial division to `budget.trial_bound`,
/// then perfect-power detection and seeded Pollard rho on what remains.
pub fn factor(n: &BigInt, budget: &Budget) -> Result<Factorization> {
    if n.is_zero() {
        return Err(Error::ZeroInput);
    }
    let mut rest = n.magnitude().clone();
    let mut found: Vec<(BigUint, u32)> = Vec::new();

    // Trial division, batching primes whose product fits in a u64.
    let primes = primes_up_to(budget.trial_bound);
    let mut i = 0;
    while i < primes.len() && !rest.is_one() {
        let mut modulus: u64 = 1;
        let start = i;
        while i < primes.len() {
            match modulus.checked_mul(primes[i]) {
                Some(m) => {
                    modulus = m;
                    i += 1;
                }
                None => break,
            }
        }
        let residue = (&rest % modulus).to_u64().unwrap_or(0);
        for &p in &primes[start..i] {
            if residue % p == 0 {
                let mut e = 0u32;
                loop {
                    let (q, r) = rest.div_rem(&BigUint::from(p));
                    if !r.is_zero() {
                        break;
                    }
                    rest = q;
                    e += 1;
                }
                found.push((BigUint::from(p), e));
            }
        }
        let last = primes[i - 1];
        if BigUint::from(last) * BigUint::from(last) > rest {
            break;
        }
    }

    let mut cofactor = BigUint::one();
    let mut stack: Vec<BigUint> = Vec::new();
    if !rest.is_one() {
        stack.push(rest);
    }
    while let Some(m) = stack.pop() {
        let trial_sq = BigUint::from(budget.trial_bound) * BigUint::from(budget.trial_bound);
        if m.bits() > budget.primality_max_bits {
            cofactor *= m;
            continue;
        }
        if is_probable_prime(&m) || (m < trial_sq && m > BigUint::one()) {
            // Below trial_bound^2 with no small factor means prime.
            found.push((m, 1));
            continue;
        }
        if let Some((root, k)) = exact_root(&m) {
            for _ in 0..k {
                stack.push(root.clone());
            }
            continue;
        }
        if m.bits() > budget.rho_max_bits || budget.rho_iterations == 0 {
            cofactor *= m;
            continue;
        }
        match pollard_brent(&m, budget.rho_iterations) {
            Some(d) => {
                let other = &m / &d;
                stack.push(d);
                stack.push(other);
            }
            None => cofactor *= m,
        }
    }

    found.sort();
    let mut factors: Vec<(BigUint, u32)> = Vec::new();
    for (p, e) in found {
        match factors.last_mut() {
            Some((q, f)) if *q == p => *f += e,
            _ => factors.push((p, e)),
        }
    }
    let budget_exhausted = !cofactor.is_one();
    Ok(Factorization {
        value: n.clone(),
        factors,
        cofactor,
        budget_exhausted,
    })
}

/// Exponent of the prime `p` in `n`.
pub fn ord_p(n: &BigInt, p: &BigInt) -> Result<u64> {
    if n.is_zero() {
        return Err(Error::ZeroInput);
    }
    if !is_prime_int(p) {
        return Err(Error::NotPrime(p.to_string()));
    }
    Ok(valuation(n.magnitude(), p.magnitude()))
}

/// Exponent of `p` in `n` for `n != 0`, `p >= 2`; no primality check.
pub(crate) fn valuation(n: &BigUint, p: &BigUint) -> u64 {
    let mut rest = n.clone();
    let mut e = 0;
    loop {
        let (q, r) = rest.div_rem(p);
        if !r.is_zero() {
            return e;
        }
        rest = q;
        e += 1;
    }
}

/// Natural log of a positive integer, accurate to f64 precision at any size.
pub fn ln_biguint(n: &BigUint) -> f64 {
    assert!(!n.is_zero(), "log of zero");
    let bits = n.bits();
    if bits <= 1000 {
        return n.to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 64;
    let top = (n >> shift).to_f64().unwrap_or(0.0);
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

pub fn ln_abs(n: &BigInt) -> f64 {
    ln_biguint(n.magnitude())
}

/// Number of decimal digits of `|n|` (zero has one digit).
pub fn decimal_digits(n: &BigUint) -> u64 {
    if n.is_zero() {
        return 1;
    }
    let estimate = (ln_biguint(n) / std::f64::consts::LN_10).floor().max(0.0) as u64;
    let ten = BigUint::from(10u32);
    let mut k = estimate.saturating_sub(1);
    // Smallest k with 10^(k+1) > n, starting just below the estimate.
    let mut bound = ten.pow(k as u32 + 1);
    while &bound <= n {
        bound *= &ten;
        k += 1;
    }
    while k > 0 && ten.pow(k as u32) > *n {
        k -= 1;
    }
    k + 1
}

//! Degree of the reduced pullback `((f^j)^* D)^red` for `D = {F = 0}`.
//!
//! Everything is computed on binary forms: on P^1 the composition itself
//! is a binary form, on higher dimensions it is restricted to a
//! pseudorandom line first. The squarefree degree of a binary form comes
//! from a univariate gcd with the derivative.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{HomogeneousForm, Morphism};
use crate::error::{Error, Result};

/// Composed degrees above this raise `ResourceLimit`.
pub const DEFAULT_PULLBACK_DEGREE_BOUND: u64 = 5000;

const LINE_SEED: u64 = 0x11ae_5eed;
const LINE_ATTEMPTS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PullbackDegree {
    /// Degree of the squarefree part of `F o f^j`.
    pub degree: u64,
    /// Degree of `F o f^j` itself, `d^j * deg F`.
    pub full_degree: u64,
    /// False when squarefreeness was decided on a random line (N >= 2).
    pub exact: bool,
}

/// Binary form `sum c[i] s^i t^(deg - i)`.
#[derive(Debug, Clone, PartialEq)]
struct BinaryForm {
    degree: usize,
    coeffs: Vec<BigInt>,
}

impl BinaryForm {
    fn constant(c: BigInt) -> Self {
        BinaryForm { degree: 0, coeffs: vec![c] }
    }

    fn linear(s: BigInt, t: BigInt) -> Self {
        BinaryForm { degree: 1, coeffs: vec![t, s] }
    }

    fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    fn mul(&self, other: &Self) -> Self {
        let mut coeffs = vec![BigInt::zero(); self.degree + other.degree + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    coeffs[i + j] += a * b;
                }
            }
        }
        BinaryForm { degree: self.degree + other.degree, coeffs }
    }

    fn add_assign(&mut self, other: &Self) {
        debug_assert_eq!(self.degree, other.degree);
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a += b;
        }
    }

    /// Degree of the squarefree part.
    fn squarefree_degree(&self) -> u64 {
        let top = self.coeffs.iter().rposition(|c| !c.is_zero()).expect("nonzero form");
        let at_infinity = (self.degree - top > 0) as u64;
        let g: Vec<BigInt> = self.coeffs[..=top].to_vec();
        let dg = derivative(&g);
        let common = gcd_degree(&g, &dg);
        (top - common) as u64 + at_infinity
    }
}

fn derivative(p: &[BigInt]) -> Vec<BigInt> {
    p.iter().enumerate().skip(1).map(|(i, c)| c * BigInt::from(i)).collect()
}

fn trim(p: &mut Vec<BigInt>) {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
}

fn primitive(p: &mut [BigInt]) {
    let g = p.iter().fold(BigInt::zero(), |g, c| g.gcd(c));
    if !g.is_zero() && !g.is_one() {
        for c in p.iter_mut() {
            *c /= &g;
        }
    }
}

/// Pseudo-remainder of `a` by `b` (coefficients low to high, `b` trimmed).
fn pseudo_rem(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut r: Vec<BigInt> = a.to_vec();
    let db = b.len() - 1;
    let lb = &b[db];
    trim(&mut r);
    while r.len() > db && !r.is_empty() {
        let lr = r.last().cloned().expect("nonempty");
        let shift = r.len() - 1 - db;
        for c in r.iter_mut() {
            *c *= lb;
        }
        for (i, c) in b.iter().enumerate() {
            r[i + shift] -= &lr * c;
        }
        trim(&mut r);
    }
    r
}

/// Degree of gcd(a, b) over Q via the primitive remainder sequence.
fn gcd_degree(a: &[BigInt], b: &[BigInt]) -> usize {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    trim(&mut x);
    trim(&mut y);
    if x.len() < y.len() {
        std::mem::swap(&mut x, &mut y);
    }
    if y.is_empty() {
        return x.len().saturating_sub(1);
    }
    primitive(&mut x);
    primitive(&mut y);
    loop {
        let mut r = pseudo_rem(&x, &y);
        if r.is_empty() {
            return y.len() - 1;
        }
        if r.len() == 1 {
            return 0;
        }
        primitive(&mut r);
        x = y;
        y = r;
    }
}

/// Evaluates a homogeneous form at binary forms of a common degree.
fn compose(form: &HomogeneousForm, args: &[BinaryForm]) -> BinaryForm {
    let arg_degree = args[0].degree;
    let max_exp = form.degree() as usize;
    let powers: Vec<Vec<BinaryForm>> = args
        .iter()
        .map(|h| {
            let mut row = vec![BinaryForm::constant(BigInt::one())];
            for k in 1..=max_exp {
                let next = row[k - 1].mul(h);
                row.push(next);
            }
            row
        })
        .collect();
    let out_degree = arg_degree * form.degree() as usize;
    let mut acc = BinaryForm { degree: out_degree, coeffs: vec![BigInt::zero(); out_degree + 1] };
    for (e, c) in form.terms() {
        let mut m = BinaryForm::constant(c.clone());
        for (i, &k) in e.iter().enumerate() {
            if k > 0 {
                m = m.mul(&powers[i][k as usize]);
            }
        }
        acc.add_assign(&m);
    }
    acc
}

fn compose_along(f: &Morphism, form: &HomogeneousForm, j: u32, line: Vec<BinaryForm>) -> BinaryForm {
    let mut args = line;
    for _ in 0..j {
        args = f.forms().iter().map(|g| compose(g, &args)).collect();
    }
    compose(form, &args)
}

/// Degree of the reduced divisor `((f^j)^* {F = 0})^red`.
pub fn reduced_pullback_degree(
    f: &Morphism,
    form: &HomogeneousForm,
    j: u32,
    degree_bound: u64,
) -> Result<PullbackDegree> {
    if form.num_vars() != f.num_vars() {
        return Err(Error::DimensionMismatch { expected: f.num_vars(), got: form.num_vars() });
    }
    let full_degree = (f.degree() as u64)
        .checked_pow(j)
        .and_then(|p| p.checked_mul(form.degree() as u64))
        .filter(|&d| d <= degree_bound)
        .ok_or_else(|| {
            Error::ResourceLimit(format!(
                "composed degree {}^{} * {} exceeds {}",
                f.degree(),
                j,
                form.degree(),
                degree_bound
            ))
        })?;
    let n = f.num_vars();
    if n == 2 {
        let line = vec![
            BinaryForm::linear(BigInt::one(), BigInt::zero()),
            BinaryForm::linear(BigInt::zero(), BigInt::one()),
        ];
        let g = compose_along(f, form, j, line);
        if g.is_zero() {
            return Err(Error::InvalidSpec("pullback vanishes identically".into()));
        }
        return Ok(PullbackDegree { degree: g.squarefree_degree(), full_degree, exact: true });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(LINE_SEED);
    for _ in 0..LINE_ATTEMPTS {
        let line: Vec<BinaryForm> = (0..n)
            .map(|_| BinaryForm::linear(BigInt::from(rng.gen_range(-97i64..=97)), BigInt::from(rng.gen_range(-97i64..=97))))
            .collect();
        let g = compose_along(f, form, j, line);
        if !g.is_zero() {
            return Ok(PullbackDegree { degree: g.squarefree_degree(), full_degree, exact: false });
        }
    }
    Err(Error::InvalidSpec("pullback vanished on every sampled line".into()))
}

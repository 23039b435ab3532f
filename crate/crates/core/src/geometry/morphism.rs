use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::form::PowerTable;
use super::{determinant, HomogeneousForm, ProjectivePoint};
use crate::error::{Error, Result};

const BASE_LOCUS_SAMPLES: usize = 32;
const BASE_LOCUS_SEED: u64 = 0x5eed_0f_ba5e;

/// Outcome of the well-definedness check run at construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BaseLocusCheck {
    /// P^1: resultant nonzero. Higher dimensions: no sampled common zero.
    Clear,
    /// A sampled point was a common zero of all forms (N >= 2).
    Suspected,
    /// P^1 only: the two forms share a factor (resultant zero).
    CommonFactor,
}

/// A morphism of P^N given by N + 1 forms of a common degree d >= 2.
///
/// Construction does not reject forms with a common zero; evaluation at a
/// common zero returns [`Error::BaseLocus`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Morphism {
    forms: Vec<HomogeneousForm>,
    degree: u32,
    base_locus: BaseLocusCheck,
}

impl Morphism {
    /// Builds the morphism, dividing out any content common to all forms.
    ///
    /// On P^1 a shared factor is detected exactly (resultant). On higher
    /// dimensions the forms are sampled at pseudorandom points. Either way
    /// the outcome is recorded in [`Morphism::base_locus_check`].
    pub fn new(mut forms: Vec<HomogeneousForm>) -> Result<Self> {
        let n = forms.len();
        if n < 2 {
            return Err(Error::InvalidSpec("a morphism needs at least two forms".into()));
        }
        for f in &forms {
            if f.num_vars() != n {
                return Err(Error::DimensionMismatch { expected: n, got: f.num_vars() });
            }
        }
        let degree = forms[0].degree();
        if forms.iter().any(|f| f.degree() != degree) {
            return Err(Error::InvalidSpec("forms of a morphism must share a degree".into()));
        }
        if degree < 2 {
            return Err(Error::InvalidSpec("morphism degree must be at least 2".into()));
        }
        let common = forms.iter().fold(BigInt::zero(), |g, f| g.gcd(&f.content()));
        if !common.is_one() {
            for f in &mut forms {
                f.divide_exact(&common);
            }
        }
        let mut base_locus = BaseLocusCheck::Clear;
        if n == 2 {
            if binary_resultant(&forms[0], &forms[1]).is_zero() {
                base_locus = BaseLocusCheck::CommonFactor;
            }
        } else {
            // 0/1 vectors first (coordinate points and their sums), then
            // pseudorandom points.
            let corners = if n <= 10 { (1u32..1 << n).collect() } else { Vec::new() };
            let corner_points = corners.into_iter().map(|mask| {
                (0..n).map(|i| BigInt::from((mask >> i) & 1)).collect::<Vec<_>>()
            });
            let mut rng = ChaCha8Rng::seed_from_u64(BASE_LOCUS_SEED);
            let random_points: Vec<Vec<BigInt>> = (0..BASE_LOCUS_SAMPLES)
                .map(|_| (0..n).map(|_| BigInt::from(rng.gen_range(-1000i64..=1000))).collect())
                .collect();
            for pt in corner_points.chain(random_points) {
                if pt.iter().all(Zero::is_zero) {
                    continue;
                }
                let powers = PowerTable::new(&pt, degree);
                if forms.iter().all(|f| f.evaluate_with(&powers).is_zero()) {
                    base_locus = BaseLocusCheck::Suspected;
                    break;
                }
            }
        }
        Ok(Morphism { forms, degree, base_locus })
    }

    /// Parses one form per coordinate, e.g. `["X^2+Y^2", "Y^2"]`.
    pub fn parse<S: AsRef<str>>(components: &[S]) -> Result<Self> {
        let n = components.len();
        let forms = components
            .iter()
            .map(|c| HomogeneousForm::parse_with_content(c.as_ref(), n))
            .collect::<Result<Vec<_>>>()?;
        Self::new(forms)
    }

    /// The power map `[X_0^d, ..., X_N^d]`.
    pub fn power_map(num_vars: usize, degree: u32) -> Result<Self> {
        let forms = (0..num_vars)
            .map(|i| {
                let mut e = vec![0; num_vars];
                e[i] = degree;
                HomogeneousForm::new(num_vars, [(e, BigInt::one())])
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(forms)
    }

    pub fn forms(&self) -> &[HomogeneousForm] {
        &self.forms
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    /// Number of homogeneous coordinates, N + 1.
    pub fn num_vars(&self) -> usize {
        self.forms.len()
    }

    /// Dimension N of the projective space.
    pub fn dimension(&self) -> usize {
        self.forms.len() - 1
    }

    pub fn base_locus_check(&self) -> BaseLocusCheck {
        self.base_locus
    }

    /// True unless the construction check came back clean.
    pub fn base_locus_warning(&self) -> bool {
        self.base_locus != BaseLocusCheck::Clear
    }

    /// Normalized image of `p`.
    pub fn apply(&self, p: &ProjectivePoint) -> Result<ProjectivePoint> {
        if p.len() != self.num_vars() {
            return Err(Error::DimensionMismatch { expected: self.num_vars(), got: p.len() });
        }
        let powers = PowerTable::new(p.coords(), self.degree);
        let image: Vec<BigInt> = self.forms.iter().map(|f| f.evaluate_with(&powers)).collect();
        ProjectivePoint::normalize(image).map_err(|_| Error::BaseLocus(p.to_string()))
    }

    /// Canonical text of the components, used for hashing and display.
    pub fn component_strings(&self) -> Vec<String> {
        self.forms.iter().map(ToString::to_string).collect()
    }
}

impl fmt::Display for Morphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.component_strings().join(", "))
    }
}

/// Coefficients of a binary form from the highest power of the first
/// variable down: `a_d, ..., a_0` for `sum a_i X^i Y^(d-i)`.
fn binary_coefficients_desc(f: &HomogeneousForm) -> Vec<BigInt> {
    let d = f.degree() as usize;
    let mut out = vec![BigInt::zero(); d + 1];
    for (e, c) in f.terms() {
        out[d - e[0] as usize] = c.clone();
    }
    out
}

fn binary_resultant(a: &HomogeneousForm, b: &HomogeneousForm) -> BigInt {
    let (ca, cb) = (binary_coefficients_desc(a), binary_coefficients_desc(b));
    let (m, n) = (ca.len() - 1, cb.len() - 1);
    let size = m + n;
    let mut rows = vec![vec![BigInt::zero(); size]; size];
    for k in 0..n {
        for (j, c) in ca.iter().enumerate() {
            rows[k][k + j] = c.clone();
        }
    }
    for k in 0..m {
        for (j, c) in cb.iter().enumerate() {
            rows[n + k][k + j] = c.clone();
        }
    }
    determinant(&rows)
}

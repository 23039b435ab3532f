//! Degree thresholds for non-density of Zsigmondy indices on P^N, and
//! experiments pairing a dynamical sequence with those thresholds.
//!
//! All comparisons are exact rationals; floats only appear in the
//! diagnostic tables.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Pow};
use serde::{Deserialize, Serialize};

use crate::arith::{decimal_digits, Budget};
use crate::error::{Error, Result};
use crate::geometry::{
    normal_crossings_linear_check, reduced_pullback_degree, split_linear_factors, HomogeneousForm, PullbackDegree,
    DEFAULT_DIGIT_CEILING, DEFAULT_PULLBACK_DEGREE_BOUND,
};
use crate::heights::{canonical_height_from_orbit, HeightEstimate};
use crate::numfmt;
use crate::primdiv::{zsigmondy_report, ZsigmondyOptions, ZsigmondyReport};
use crate::sequences::{SequenceSpec, TermStream};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdKind {
    /// `deg F > (N+1)(1 + 1/(d-2))`.
    FormDegree,
    /// `deg D > (d-1)/(d-2) * deg(-K)`.
    DivisorDegree,
    /// `deg D_j / d^j > deg D/(d-1) + deg(-K)/d^j`.
    PullbackDegree,
    /// `d^j (d-2) deg D > (d-1) deg(-K)`.
    MinIterate,
}

/// `satisfied` is exactly `lhs > rhs`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ThresholdVerdict {
    pub satisfied: bool,
    #[serde(serialize_with = "numfmt::dec")]
    pub lhs: BigRational,
    #[serde(serialize_with = "numfmt::dec")]
    pub rhs: BigRational,
    pub which: ThresholdKind,
}

impl ThresholdVerdict {
    fn new(lhs: BigRational, rhs: BigRational, which: ThresholdKind) -> Self {
        ThresholdVerdict { satisfied: lhs > rhs, lhs, rhs, which }
    }
}

fn q(n: u64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn need_d3(d: u32) -> Result<()> {
    if d <= 2 {
        Err(Error::DegreeTooSmall(d as u64))
    } else {
        Ok(())
    }
}

/// `deg F > (N+1)(1 + 1/(d-2))` for a divisor `{F = 0}` on P^N.
pub fn check_form_degree(n: u32, d: u32, deg_f: u64) -> Result<ThresholdVerdict> {
    need_d3(d)?;
    let rhs = q(n as u64 + 1) * (BigRational::one() + BigRational::new(BigInt::one(), BigInt::from(d - 2)));
    Ok(ThresholdVerdict::new(q(deg_f), rhs, ThresholdKind::FormDegree))
}

/// `deg D > (d-1)/(d-2) * deg(-K)`.
pub fn check_divisor_degree(d: u32, deg_d: u64, deg_neg_canonical: u64) -> Result<ThresholdVerdict> {
    need_d3(d)?;
    let rhs = BigRational::new(BigInt::from(d - 1), BigInt::from(d - 2)) * q(deg_neg_canonical);
    Ok(ThresholdVerdict::new(q(deg_d), rhs, ThresholdKind::DivisorDegree))
}

/// `deg D_j / d^j > deg D/(d-1) + deg(-K)/d^j` where `D_j` is the reduced
/// `j`-fold pullback of `D`.
pub fn check_pullback_degree(
    d: u32,
    deg_d: u64,
    deg_neg_canonical: u64,
    j: u32,
    deg_delta_j: u64,
) -> Result<ThresholdVerdict> {
    if d < 2 {
        return Err(Error::DegreeTooSmall(d as u64));
    }
    let dj = BigRational::from_integer(BigInt::from(d).pow(j));
    let lhs = q(deg_delta_j) / &dj;
    let rhs = q(deg_d) / q(d as u64 - 1) + q(deg_neg_canonical) / dj;
    Ok(ThresholdVerdict::new(lhs, rhs, ThresholdKind::PullbackDegree))
}

/// `d^j (d-2) deg D > (d-1) deg(-K)`.
pub fn check_min_iterate(d: u32, deg_d: u64, deg_neg_canonical: u64, j: u32) -> Result<ThresholdVerdict> {
    need_d3(d)?;
    let lhs = BigInt::from(d).pow(j) * BigInt::from(d - 2) * BigInt::from(deg_d);
    let rhs = BigInt::from(d - 1) * BigInt::from(deg_neg_canonical);
    Ok(ThresholdVerdict::new(lhs.into(), rhs.into(), ThresholdKind::MinIterate))
}

/// Smallest `j >= 0` with `d^j (d-2) deg D > (d-1) deg(-K)`.
pub fn min_iterate_j(d: u32, deg_d: u64, deg_neg_canonical: u64) -> Result<u32> {
    need_d3(d)?;
    if deg_d == 0 {
        return Err(Error::InvalidSpec("divisor degree must be positive".into()));
    }
    let rhs = BigInt::from(d - 1) * BigInt::from(deg_neg_canonical);
    let mut lhs = BigInt::from(d - 2) * BigInt::from(deg_d);
    let mut j = 0;
    while lhs <= rhs {
        lhs *= d;
        j += 1;
    }
    Ok(j)
}

/// One experiment: a dynamical sequence run to a horizon plus the
/// threshold checks for its divisor.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub spec: SequenceSpec,
    pub horizon: u64,
    pub excluded_primes: Vec<BigUint>,
    pub budget: Budget,
    pub digit_ceiling: u64,
    /// Pullback iterate for the reduced-pullback check.
    pub j: u32,
    /// Linear factors of the divisor form, when it is a product of them.
    pub linear_factors: Option<Vec<HomogeneousForm>>,
    pub pullback_degree_bound: u64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigRepr {
    spec: serde_json::Value,
    horizon: u64,
    #[serde(default)]
    excluded_primes: Vec<crate::sequences::IntText>,
    #[serde(default)]
    budget: Budget,
    #[serde(default = "default_ceiling")]
    digit_ceiling: u64,
    #[serde(default = "default_j")]
    j: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    linear_factors: Option<Vec<String>>,
    #[serde(default = "default_pullback_bound")]
    pullback_degree_bound: u64,
}

fn default_ceiling() -> u64 {
    DEFAULT_DIGIT_CEILING
}

fn default_j() -> u32 {
    1
}

fn default_pullback_bound() -> u64 {
    DEFAULT_PULLBACK_DEGREE_BOUND
}

impl ExperimentConfig {
    /// Defaults everywhere except the sequence and horizon. The linear factors
    /// are left empty; see [`ExperimentConfig::with_linear_factors`].
    pub fn new(spec: SequenceSpec, horizon: u64) -> Result<Self> {
        let cfg = ExperimentConfig {
            spec,
            horizon,
            excluded_primes: Vec::new(),
            budget: Budget::default(),
            digit_ceiling: DEFAULT_DIGIT_CEILING,
            j: default_j(),
            linear_factors: None,
            pullback_degree_bound: DEFAULT_PULLBACK_DEGREE_BOUND,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Attaches linear factors; their product must be the divisor form up
    /// to a constant.
    pub fn with_linear_factors(mut self, factors: Vec<HomogeneousForm>) -> Result<Self> {
        self.linear_factors = Some(factors);
        self.validate()?;
        Ok(self)
    }

    /// Splits `form_text` into linear factors if it is written as a product
    /// of them; otherwise leaves the config unchanged.
    pub fn detect_linear_factors(self, form_text: &str) -> Result<Self> {
        match split_linear_factors(form_text, self.spec.dynamics().map_or(0, |(f, _)| f.num_vars())) {
            Some(factors) => self.with_linear_factors(factors),
            None => Ok(self),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.spec.validate()?;
        let Some(form) = self.spec.divisor_form() else {
            return Err(Error::InvalidSpec(format!(
                "experiments need a dynamical sequence, got {}",
                self.spec.kind_name()
            )));
        };
        if let Some(factors) = &self.linear_factors {
            let Some((first, rest)) = factors.split_first() else {
                return Err(Error::InvalidSpec("empty list of linear factors".into()));
            };
            first.linear_coefficients()?;
            let mut product = first.clone();
            for l in rest {
                l.linear_coefficients()?;
                product = product.mul(l)?;
            }
            let product = HomogeneousForm::new(form.num_vars(), product.terms().map(|(e, c)| (e.to_vec(), c.clone())))?;
            if product != form && product.neg() != form {
                return Err(Error::InvalidSpec("linear factors do not multiply to the divisor form".into()));
            }
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_value(value)
    }

    /// Parses the JSON config schema. Without an explicit
    /// `linear_factors` list the form text of a `dynvalue` spec is split
    /// into linear factors when possible.
    pub fn from_value(value: serde_json::Value) -> Result<Self> {
        let form_text = value
            .pointer("/spec/params/form")
            .and_then(|v| v.as_str())
            .map(str::to_owned);
        let repr: ConfigRepr = serde_json::from_value(value).map_err(|e| Error::Parse(e.to_string()))?;
        let excluded_primes = repr.excluded_primes.iter().map(|p| p.to_biguint()).collect::<Result<Vec<_>>>()?;
        let spec = SequenceSpec::from_value(repr.spec)?;
        let num_vars = spec.dynamics().map_or(0, |(f, _)| f.num_vars());
        let mut cfg = ExperimentConfig {
            spec,
            horizon: repr.horizon,
            excluded_primes,
            budget: repr.budget,
            digit_ceiling: repr.digit_ceiling,
            j: repr.j,
            linear_factors: None,
            pullback_degree_bound: repr.pullback_degree_bound,
        };
        match (repr.linear_factors, form_text) {
            (Some(texts), _) => {
                let factors = texts
                    .iter()
                    .map(|t| HomogeneousForm::parse(t, num_vars))
                    .collect::<Result<Vec<_>>>()?;
                cfg = cfg.with_linear_factors(factors)?;
            }
            (None, Some(text)) => cfg = cfg.detect_linear_factors(&text)?,
            (None, None) => cfg.validate()?,
        }
        Ok(cfg)
    }

    pub fn to_value(&self) -> serde_json::Value {
        let repr = ConfigRepr {
            spec: serde_json::to_value(&self.spec).expect("spec serializes"),
            horizon: self.horizon,
            excluded_primes: self.excluded_primes.iter().map(|p| crate::sequences::IntText::from(p.to_string())).collect(),
            budget: self.budget,
            digit_ceiling: self.digit_ceiling,
            j: self.j,
            linear_factors: self.linear_factors.as_ref().map(|fs| fs.iter().map(ToString::to_string).collect()),
            pullback_degree_bound: self.pullback_degree_bound,
        };
        serde_json::to_value(repr).expect("config serializes")
    }
}

/// One row of the B_n table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TermRow {
    pub n: u64,
    pub digits: u64,
    pub has_primitive: bool,
    #[serde(serialize_with = "numfmt::serialize_opt")]
    pub b_n: Option<f64>,
    /// `B_n / d^n`.
    #[serde(serialize_with = "numfmt::serialize_opt")]
    pub b_n_scaled: Option<f64>,
    /// `B_n / (d^n h)` with `h` the final canonical-height estimate.
    #[serde(serialize_with = "numfmt::serialize_opt")]
    pub kappa_n: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PullbackInfo {
    pub j: u32,
    pub reduced_divisor_degree: u64,
    pub result: Option<PullbackDegree>,
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub config: serde_json::Value,
    pub dimension: usize,
    pub degree: u32,
    pub form_degree: u32,
    pub verdicts: Vec<ThresholdVerdict>,
    pub min_iterate_j: Option<u32>,
    pub normal_crossings: Option<bool>,
    pub pullback: PullbackInfo,
    pub zsigmondy: Vec<u64>,
    pub truncated: bool,
    pub truncation_reason: Option<String>,
    pub terms: Vec<TermRow>,
    pub height: HeightEstimate,
    /// Minimum of `kappa_n` over the tail `n >= horizon / 2`.
    #[serde(serialize_with = "numfmt::serialize_opt")]
    pub kappa_hat: Option<f64>,
    pub conclusion: String,
    #[serde(skip)]
    pub zsigmondy_report: ZsigmondyReport,
}

impl ExperimentReport {
    /// Columns `n,digits,has_primitive,b_n,b_n_scaled,kappa_n`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,digits,has_primitive,b_n,b_n_scaled,kappa_n\n");
        let f = |x: Option<f64>| x.map(numfmt::sig12).unwrap_or_default();
        for r in &self.terms {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                r.n,
                r.digits,
                r.has_primitive,
                f(r.b_n),
                f(r.b_n_scaled),
                f(r.kappa_n)
            ));
        }
        out
    }
}

/// Runs the sequence to the horizon, estimates the canonical height of the
/// start point and evaluates every applicable threshold.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let stream = TermStream::with_digit_ceiling(cfg.spec.clone(), cfg.digit_ceiling)?;
    run_experiment_on(cfg, &stream)
}

/// Same as [`run_experiment`] over an existing stream, so a warm orbit
/// cache is reused.
pub fn run_experiment_on(cfg: &ExperimentConfig, stream: &TermStream) -> Result<ExperimentReport> {
    cfg.validate()?;
    if stream.spec() != &cfg.spec {
        return Err(Error::InvalidSpec("stream does not match the experiment spec".into()));
    }
    let (f, _) = cfg.spec.dynamics().expect("validated");
    let form = cfg.spec.divisor_form().expect("validated");
    let d = f.degree();
    let n_dim = f.dimension() as u32;
    let deg_neg_canonical = n_dim as u64 + 1;

    let opts = ZsigmondyOptions {
        excluded_primes: cfg.excluded_primes.clone(),
        budget: Some(cfg.budget),
        digit_ceiling: cfg.digit_ceiling,
    };
    let zr = zsigmondy_report(stream, cfg.horizon, &opts)?;
    let orbit = stream.orbit().expect("dynamical streams carry an orbit");
    let height = canonical_height_from_orbit(orbit, cfg.horizon)?;

    let reduced_degree = reduced_pullback_degree(f, &form, 0, u64::MAX)?.degree;
    let (pull, note) = match reduced_pullback_degree(f, &form, cfg.j, cfg.pullback_degree_bound) {
        Ok(p) => (Some(p), None),
        Err(Error::ResourceLimit(msg)) => (None, Some(msg)),
        Err(e) => return Err(e),
    };

    let mut verdicts = Vec::new();
    let mut min_j = None;
    if d >= 3 {
        verdicts.push(check_form_degree(n_dim, d, form.degree() as u64)?);
        verdicts.push(check_divisor_degree(d, reduced_degree, deg_neg_canonical)?);
        min_j = Some(min_iterate_j(d, reduced_degree, deg_neg_canonical)?);
    }
    if let Some(p) = &pull {
        verdicts.push(check_pullback_degree(d, reduced_degree, deg_neg_canonical, cfg.j, p.degree)?);
    }

    let normal_crossings = match &cfg.linear_factors {
        Some(fs) => Some(normal_crossings_linear_check(fs)?),
        None => None,
    };

    let h_hat = height.final_estimate;
    let mut terms = Vec::new();
    for r in &zr.records {
        let scale = (d as f64).powi(r.n as i32);
        let b_n_scaled = r.b_n.map(|b| b / scale);
        let kappa_n = match b_n_scaled {
            Some(b) if h_hat > 0.0 => Some(b / h_hat),
            _ => None,
        };
        terms.push(TermRow {
            n: r.n,
            digits: decimal_digits(r.value.magnitude()),
            has_primitive: r.has_primitive,
            b_n: r.b_n,
            b_n_scaled,
            kappa_n,
        });
    }
    let tail_start = cfg.horizon / 2;
    let kappa_hat = terms
        .iter()
        .filter(|t| t.n >= tail_start)
        .filter_map(|t| t.kappa_n)
        .reduce(f64::min);

    let conclusion = conclusion(d, &verdicts, normal_crossings, cfg.horizon, &zr);
    Ok(ExperimentReport {
        config: cfg.to_value(),
        dimension: n_dim as usize,
        degree: d,
        form_degree: form.degree(),
        verdicts,
        min_iterate_j: min_j,
        normal_crossings,
        pullback: PullbackInfo { j: cfg.j, reduced_divisor_degree: reduced_degree, result: pull, note },
        zsigmondy: zr.zsigmondy_set.clone(),
        truncated: zr.truncated || height.truncated,
        truncation_reason: zr.truncation_reason.clone().or_else(|| height.truncation_reason.clone()),
        terms,
        height,
        kappa_hat,
        conclusion,
        zsigmondy_report: zr,
    })
}

fn conclusion(
    d: u32,
    verdicts: &[ThresholdVerdict],
    normal_crossings: Option<bool>,
    horizon: u64,
    zr: &ZsigmondyReport,
) -> String {
    let reached = zr.records.last().map_or(0, |r| r.n);
    let horizon_text = if zr.truncated { format!("{reached} (truncated before {horizon})") } else { horizon.to_string() };
    let predictive = verdicts.iter().any(|v| v.satisfied && v.which != ThresholdKind::MinIterate);
    if d < 3 && !predictive {
        return "degree below 3, threshold unsatisfied: no prediction".into();
    }
    if !predictive {
        return "threshold unsatisfied: no prediction".into();
    }
    match normal_crossings {
        Some(true) => format!(
            "threshold satisfied, normal crossings verified: Zsigmondy indices {:?} observed up to horizon {}; consistent with non-density at this horizon, no claim beyond it",
            zr.zsigmondy_set, horizon_text
        ),
        Some(false) => "threshold satisfied but the divisor is not normal crossings: no prediction".into(),
        None => "threshold satisfied, normal crossings not verified: no prediction".into(),
    }
}

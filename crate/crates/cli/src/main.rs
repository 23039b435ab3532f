//! `zsigmondy`: command-line front end for the sequence, Zsigmondy-set,
//! height and threshold tools.
//!
//! Exit status 0 on success, 2 on invalid input (a JSON error object on
//! stderr), 3 when a resource limit truncated the report.

mod cache;
mod config;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use zsigmondy_core::arith::Budget;
use zsigmondy_core::geometry::DEFAULT_DIGIT_CEILING;
use zsigmondy_core::heights::{canonical_height_from_orbit, weil_height};
use zsigmondy_core::numfmt::{self, Sig12};
use zsigmondy_core::primdiv::{zsigmondy_report, ZsigmondyOptions};
use zsigmondy_core::sequences::{IntText, SequenceSpec};
use zsigmondy_core::vojta::{
    check_divisor_degree, check_form_degree, check_min_iterate, check_pullback_degree, min_iterate_j,
    run_experiment_on, ExperimentConfig,
};
use zsigmondy_core::{Error, Result};

use cache::CachedStream;

#[derive(Parser)]
#[command(name = "zsigmondy", version, about = "Primitive divisors, Zsigmondy sets and heights")]
#[command(args_override_self = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the terms of a sequence.
    Seq(SeqArgs),
    /// Zsigmondy set with per-term primitive parts.
    Zsigmondy(SeqArgs),
    /// Canonical-height estimate along the orbit of a dynamical sequence.
    Heights(SeqArgs),
    /// Evaluate one degree threshold.
    VojtaCheck(VojtaArgs),
    /// Full experiment: Zsigmondy set, B_n table, heights and thresholds.
    Experiment(SeqArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct Common {
    /// JSON config file; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override a config field, e.g. `spec.params.u=3` or `n_max=50`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Write the report here instead of standard output.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Args)]
struct SeqArgs {
    #[command(flatten)]
    common: Common,
    /// powerdiff, lucas, eds, gcdgroup, dynvalue or wanderingnumerator.
    #[arg(long)]
    kind: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    u: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    v: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    p: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    q: Option<String>,
    /// Four comma-separated EDS terms.
    #[arg(long, allow_hyphen_values = true)]
    init: Option<String>,
    /// Comma-separated morphism components.
    #[arg(long, allow_hyphen_values = true)]
    morphism: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    form: Option<String>,
    /// Comma-separated coordinates.
    #[arg(long, allow_hyphen_values = true)]
    start: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<String>,
    #[arg(long, alias = "horizon")]
    n_max: Option<u64>,
    /// Comma-separated excluded primes.
    #[arg(long, allow_hyphen_values = true)]
    exclude: Option<String>,
    #[arg(long)]
    digit_ceiling: Option<u64>,
    /// Pullback iterate (experiment only).
    #[arg(long)]
    j: Option<u32>,
    /// Do not read or write the orbit cache.
    #[arg(long)]
    no_cache: bool,
}

#[derive(Clone, Copy, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum CheckKind {
    Form,
    Divisor,
    Pullback,
    MinJ,
}

#[derive(Args)]
struct VojtaArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, value_enum)]
    check: Option<CheckKind>,
    /// Dimension of the projective space.
    #[arg(long = "N")]
    n: Option<u32>,
    #[arg(long)]
    d: Option<u32>,
    #[arg(long)]
    deg_f: Option<u64>,
    #[arg(long)]
    deg_d: Option<u64>,
    /// Defaults to N + 1.
    #[arg(long)]
    deg_neg_canonical: Option<u64>,
    #[arg(long)]
    j: Option<u32>,
    #[arg(long)]
    deg_delta_j: Option<u64>,
}

/// Why a command did not finish cleanly.
enum Failure {
    Invalid(Error),
    /// The report was written but is truncated.
    Truncated,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Invalid(e)
    }
}

type Outcome = std::result::Result<(), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => {
            let msg = e.render().to_string();
            return fail(&Error::Parse(msg.trim().to_string()));
        }
    };
    let outcome = match cli.command {
        Command::Seq(a) => seq(a),
        Command::Zsigmondy(a) => zsigmondy(a),
        Command::Heights(a) => heights(a),
        Command::VojtaCheck(a) => vojta_check(a),
        Command::Experiment(a) => experiment(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Truncated) => ExitCode::from(3),
        Err(Failure::Invalid(Error::ResourceLimit(msg))) => {
            let partial = json!({"truncated": true, "truncation_reason": msg});
            println!("{partial}");
            ExitCode::from(3)
        }
        Err(Failure::Invalid(e)) => fail(&e),
    }
}

fn fail(e: &Error) -> ExitCode {
    let obj = json!({"error": e.kind(), "message": e.to_string()});
    eprintln!("{obj}");
    ExitCode::from(2)
}

fn emit(common: &Common, text: &str) -> Result<()> {
    match &common.output {
        Some(path) => std::fs::write(path, text).map_err(|e| Error::Parse(format!("{}: {e}", path.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).and_then(|_| out.flush()).map_err(|e| Error::Parse(e.to_string()))
        }
    }
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string(v).expect("reports serialize");
    s.push('\n');
    s
}

/// Config shared by `seq`, `zsigmondy` and `heights`.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RunConfig {
    spec: Value,
    n_max: u64,
    #[serde(default)]
    excluded_primes: Vec<IntText>,
    #[serde(default)]
    budget: Budget,
    #[serde(default = "default_ceiling")]
    digit_ceiling: u64,
}

fn default_ceiling() -> u64 {
    DEFAULT_DIGIT_CEILING
}

/// File config, then `--set`, then inline flags. `horizon_key` names the
/// field that `--n-max` sets.
fn build_value(a: &SeqArgs, horizon_key: &str) -> Result<Value> {
    let mut v = config::load(a.common.config.as_deref())?;
    for o in &a.common.overrides {
        config::apply_override(&mut v, o)?;
    }
    if let Some(kind) = &a.kind {
        config::set_kind(&mut v, kind)?;
    }
    let scalars = [
        ("u", &a.u),
        ("v", &a.v),
        ("p", &a.p),
        ("q", &a.q),
        ("form", &a.form),
        ("alpha", &a.alpha),
        ("beta", &a.beta),
    ];
    for (key, val) in scalars {
        if let Some(val) = val {
            config::set_path(&mut v, &format!("spec.params.{key}"), Value::String(val.clone()))?;
        }
    }
    for (key, val) in [("init", &a.init), ("morphism", &a.morphism), ("start", &a.start)] {
        if let Some(val) = val {
            config::set_path(&mut v, &format!("spec.params.{key}"), config::list(val))?;
        }
    }
    if let Some(n) = a.n_max {
        config::set_path(&mut v, horizon_key, json!(n))?;
    }
    if let Some(ex) = &a.exclude {
        config::set_path(&mut v, "excluded_primes", config::list(ex))?;
    }
    if let Some(c) = a.digit_ceiling {
        config::set_path(&mut v, "digit_ceiling", json!(c))?;
    }
    if let Some(j) = a.j {
        config::set_path(&mut v, "j", json!(j))?;
    }
    Ok(v)
}

fn run_config(a: &SeqArgs) -> Result<RunSettings> {
    let v = build_value(a, "n_max")?;
    if v.get("spec").is_none() {
        return Err(Error::InvalidSpec("no sequence given (use --kind or a config file)".into()));
    }
    if v.get("n_max").is_none() {
        return Err(Error::InvalidSpec("n_max is required".into()));
    }
    let raw: RunConfig = serde_json::from_value(v).map_err(|e| Error::Parse(e.to_string()))?;
    Ok(RunSettings {
        spec: SequenceSpec::from_value(raw.spec)?,
        n_max: raw.n_max,
        excluded_primes: raw.excluded_primes.iter().map(IntText::to_biguint).collect::<Result<Vec<_>>>()?,
        budget: raw.budget,
        digit_ceiling: raw.digit_ceiling,
    })
}

struct RunSettings {
    spec: SequenceSpec,
    n_max: u64,
    excluded_primes: Vec<num_bigint::BigUint>,
    budget: Budget,
    digit_ceiling: u64,
}

fn open_stream(a: &SeqArgs, spec: SequenceSpec, ceiling: u64) -> Result<CachedStream> {
    let dir = (!a.no_cache).then(cache::cache_dir);
    CachedStream::open(spec, ceiling, dir.as_deref())
}

fn seq(a: SeqArgs) -> Outcome {
    let cfg = run_config(&a)?;
    let cs = open_stream(&a, cfg.spec.clone(), cfg.digit_ceiling)?;
    let first = cfg.spec.first_index();
    let mut terms = Vec::new();
    let mut reason = None;
    for n in first..=cfg.n_max {
        match cs.stream.term(n) {
            Ok(t) => terms.push((n, t)),
            Err(Error::ResourceLimit(msg)) => {
                reason = Some(msg);
                break;
            }
            Err(e) => return Err(e.into()),
        }
    }
    cs.save()?;
    let text = match a.common.format {
        Format::Json => to_json(&json!({
            "spec": cfg.spec,
            "first_index": first,
            "n_max": cfg.n_max,
            "terms": terms.iter().map(|(n, t)| json!({"n": n, "value": t.to_string()})).collect::<Vec<_>>(),
            "truncated": reason.is_some(),
            "truncation_reason": reason,
        })),
        Format::Csv => {
            let mut s = String::from("n,value\n");
            for (n, t) in &terms {
                s.push_str(&format!("{n},{t}\n"));
            }
            s
        }
    };
    emit(&a.common, &text)?;
    if reason.is_some() {
        return Err(Failure::Truncated);
    }
    Ok(())
}

fn zsigmondy(a: SeqArgs) -> Outcome {
    let cfg = run_config(&a)?;
    let cs = open_stream(&a, cfg.spec.clone(), cfg.digit_ceiling)?;
    let opts = ZsigmondyOptions {
        excluded_primes: cfg.excluded_primes.clone(),
        budget: Some(cfg.budget),
        digit_ceiling: cfg.digit_ceiling,
    };
    let report = zsigmondy_report(&cs.stream, cfg.n_max, &opts)?;
    cs.save()?;
    let text = match a.common.format {
        Format::Json => to_json(&report),
        Format::Csv => report.to_csv(),
    };
    emit(&a.common, &text)?;
    if report.truncated {
        return Err(Failure::Truncated);
    }
    Ok(())
}

fn heights(a: SeqArgs) -> Outcome {
    let cfg = run_config(&a)?;
    if cfg.spec.dynamics().is_none() {
        return Err(Error::InvalidSpec(format!("heights need a dynamical sequence, got {}", cfg.spec.kind_name())).into());
    }
    let cs = open_stream(&a, cfg.spec.clone(), cfg.digit_ceiling)?;
    let orbit = cs.stream.orbit().expect("dynamical streams carry an orbit");
    let estimate = canonical_height_from_orbit(orbit, cfg.n_max)?;
    cs.save()?;
    let text = match a.common.format {
        Format::Json => to_json(&json!({
            "spec": cfg.spec,
            "n_max": cfg.n_max,
            "start_weil_height": Sig12(weil_height(orbit.start())),
            "estimate": estimate,
        })),
        Format::Csv => {
            let mut s = String::from("n,value,log_height,scale\n");
            for v in &estimate.values {
                s.push_str(&format!("{},{},{},{}\n", v.n, numfmt::sig12(v.value), numfmt::sig12(v.log_height), v.scale));
            }
            s
        }
    };
    emit(&a.common, &text)?;
    if estimate.truncated {
        return Err(Failure::Truncated);
    }
    Ok(())
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct VojtaConfig {
    check: Option<CheckKind>,
    #[serde(rename = "N")]
    n: Option<u32>,
    d: Option<u32>,
    deg_f: Option<u64>,
    deg_d: Option<u64>,
    deg_neg_canonical: Option<u64>,
    j: Option<u32>,
    deg_delta_j: Option<u64>,
}

fn vojta_check(a: VojtaArgs) -> Outcome {
    let mut v = config::load(a.common.config.as_deref())?;
    for o in &a.common.overrides {
        config::apply_override(&mut v, o)?;
    }
    let flags = [
        ("N", a.n.map(u64::from)),
        ("d", a.d.map(u64::from)),
        ("deg_f", a.deg_f),
        ("deg_d", a.deg_d),
        ("deg_neg_canonical", a.deg_neg_canonical),
        ("j", a.j.map(u64::from)),
        ("deg_delta_j", a.deg_delta_j),
    ];
    for (key, val) in flags {
        if let Some(x) = val {
            config::set_path(&mut v, key, json!(x))?;
        }
    }
    if let Some(c) = a.check {
        config::set_path(&mut v, "check", serde_json::to_value(c).expect("enum serializes"))?;
    }
    let cfg: VojtaConfig = serde_json::from_value(v).map_err(|e| Error::Parse(e.to_string()))?;
    let need = |x: Option<u64>, name: &str| x.ok_or_else(|| Error::InvalidSpec(format!("--{name} is required")));
    let d = need(cfg.d.map(u64::from), "d")? as u32;
    let canonical = |n: Option<u32>| -> Result<u64> {
        match (cfg.deg_neg_canonical, n) {
            (Some(k), _) => Ok(k),
            (None, Some(n)) => Ok(n as u64 + 1),
            (None, None) => Err(Error::InvalidSpec("--N or --deg-neg-canonical is required".into())),
        }
    };
    let check = cfg.check.unwrap_or(if cfg.deg_f.is_some() { CheckKind::Form } else { CheckKind::Pullback });
    let out = match check {
        CheckKind::Form => {
            let n = need(cfg.n.map(u64::from), "N")? as u32;
            verdict_out(&check_form_degree(n, d, need(cfg.deg_f, "deg-f")?)?)
        }
        CheckKind::Divisor => verdict_out(&check_divisor_degree(d, need(cfg.deg_d, "deg-d")?, canonical(cfg.n)?)?),
        CheckKind::Pullback => verdict_out(&check_pullback_degree(
            d,
            need(cfg.deg_d, "deg-d")?,
            canonical(cfg.n)?,
            need(cfg.j.map(u64::from), "j")? as u32,
            need(cfg.deg_delta_j, "deg-delta-j")?,
        )?),
        CheckKind::MinJ => {
            let deg_d = need(cfg.deg_d, "deg-d")?;
            let k = canonical(cfg.n)?;
            let j = min_iterate_j(d, deg_d, k)?;
            VerdictOut { j: Some(j), ..verdict_out(&check_min_iterate(d, deg_d, k, j)?) }
        }
    };
    let text = match a.common.format {
        Format::Json => to_json(&out),
        Format::Csv => format!("satisfied,lhs,rhs\n{},{},{}\n", out.satisfied, out.lhs, out.rhs),
    };
    emit(&a.common, &text)?;
    Ok(())
}

#[derive(Serialize)]
struct VerdictOut {
    satisfied: bool,
    lhs: String,
    rhs: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    j: Option<u32>,
}

fn verdict_out(v: &zsigmondy_core::vojta::ThresholdVerdict) -> VerdictOut {
    VerdictOut { satisfied: v.satisfied, lhs: v.lhs.to_string(), rhs: v.rhs.to_string(), j: None }
}

fn experiment(a: SeqArgs) -> Outcome {
    let v = build_value(&a, "horizon")?;
    if v.get("spec").is_none() {
        return Err(Error::InvalidSpec("no sequence given (use --kind or a config file)".into()).into());
    }
    let cfg = ExperimentConfig::from_value(v)?;
    let cs = open_stream(&a, cfg.spec.clone(), cfg.digit_ceiling)?;
    let report = run_experiment_on(&cfg, &cs.stream)?;
    cs.save()?;
    let text = match a.common.format {
        Format::Json => to_json(&report),
        Format::Csv => report.to_csv(),
    };
    emit(&a.common, &text)?;
    if report.truncated {
        return Err(Failure::Truncated);
    }
    Ok(())
}

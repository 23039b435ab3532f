//! Acceptance criteria 1-12. Each criterion prints one PASS/FAIL line to
//! stdout (uncaptured) and the test fails if any criterion fails.
//!
//! Frozen oracles were computed independently (Python integers / sympy
//! factorization) before the implementation existed.

use std::collections::BTreeSet;
use std::io::Write;
use std::time::{Duration, Instant};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use zsigmondy_core::arith::{factor, ln_abs, Budget};
use zsigmondy_core::geometry::{split_linear_factors, HomogeneousForm, Morphism, ProjectivePoint};
use zsigmondy_core::heights::{canonical_height_estimate, local_height};
use zsigmondy_core::numfmt::sig12;
use zsigmondy_core::primdiv::{zsigmondy_report, ZsigmondyOptions, ZsigmondyReport};
use zsigmondy_core::sequences::{SequenceSpec, TermStream};
use zsigmondy_core::vojta::{
    check_form_degree, check_min_iterate, check_pullback_degree, min_iterate_j, run_experiment, ExperimentConfig,
};
use zsigmondy_core::Error;

type Outcome = Result<String, String>;

/// Z(2^n - 1), n <= 100.
const MERSENNE_Z: [u64; 2] = [1, 6];
/// Fibonacci Zsigmondy set, n <= 50.
const FIBONACCI_Z: [u64; 4] = [1, 2, 6, 12];
/// EDS(1, 1, -1, 1), n = 1..=20.
const EDS_TERMS: [i64; 20] = [
    1, 1, -1, 1, 2, -1, -3, -5, 7, -4, -23, 29, 59, 129, -314, -65, 1529, -3689, -8209, -16264,
];
/// Number of n <= 100 with gcd(2^n - 1, 3^n - 1) = 1.
const GCD_ONES: usize = 47;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn report(spec: &SequenceSpec, n_max: u64, excluded: &[BigUint]) -> ZsigmondyReport {
    let stream = TermStream::new(spec.clone()).expect("valid spec");
    let opts = ZsigmondyOptions { excluded_primes: excluded.to_vec(), ..ZsigmondyOptions::default() }.without_factoring();
    zsigmondy_report(&stream, n_max, &opts).expect("report")
}

fn coprime_pairs(count: usize, seed: u64) -> Vec<(i64, i64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = BTreeSet::new();
    while seen.len() < count {
        let u = rng.gen_range(2..=50i64);
        let v = rng.gen_range(1..u);
        if u.gcd(&v) == 1 {
            seen.insert((u, v));
        }
    }
    seen.into_iter().collect()
}

fn lucas_specs(count: usize, seed: u64) -> Vec<SequenceSpec> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    while out.len() < count {
        let p = rng.gen_range(-10..=10i64);
        let q = rng.gen_range(-10..=10i64);
        let Ok(spec) = SequenceSpec::lucas(p, q) else { continue };
        if spec.is_nondegenerate_lucas() && seen.insert((p, q)) {
            out.push(spec);
        }
    }
    out
}

fn criterion_1() -> Outcome {
    let allowed: BTreeSet<u64> = [1, 2, 6].into();
    let pairs = coprime_pairs(50, 1);
    for &(u, v) in &pairs {
        let z = report(&SequenceSpec::power_diff(u, v).unwrap(), 30, &[]).zsigmondy_set;
        ensure(z.iter().all(|n| allowed.contains(n)), || format!("Z({u}^n - {v}^n) = {z:?}"))?;
    }
    Ok(format!("{} pairs, every Z within {{1,2,6}}", pairs.len()))
}

fn criterion_2() -> Outcome {
    let z = report(&SequenceSpec::power_diff(2, 1).unwrap(), 100, &[]).zsigmondy_set;
    ensure(z == MERSENNE_Z, || format!("Z(2^n - 1) = {z:?}"))?;
    Ok(format!("Z(2^n - 1) up to 100 = {z:?}"))
}

fn criterion_3() -> Outcome {
    let specs = lucas_specs(20, 3);
    let mut worst = 0;
    for spec in &specs {
        let z = report(spec, 100, &[]).zsigmondy_set;
        let max = z.iter().copied().max().unwrap_or(0);
        worst = worst.max(max);
        ensure(max <= 30, || format!("{spec:?}: Z = {z:?}"))?;
    }
    Ok(format!("{} nondegenerate Lucas specs, largest Zsigmondy index {worst}", specs.len()))
}

fn criterion_4() -> Outcome {
    let z = report(&SequenceSpec::lucas(1, -1).unwrap(), 50, &[]).zsigmondy_set;
    ensure(z == FIBONACCI_Z, || format!("Z(F_n) = {z:?}"))?;
    Ok(format!("Z(F_n) up to 50 = {z:?}"))
}

/// Ward's relation with n = 2, solved for the top index: a brute-force
/// recurrence independent of the duplication formulas.
fn ward_oracle(init: [i64; 4], n_max: usize) -> Vec<BigRational> {
    let mut a: Vec<BigRational> = std::iter::once(0).chain(init).map(|x| BigRational::from(BigInt::from(x))).collect();
    while a.len() <= n_max {
        let n = a.len();
        let next = (&a[n - 1] * &a[n - 3] * &a[2] * &a[2] - &a[3] * &a[1] * &a[n - 2] * &a[n - 2]) / &a[n - 4];
        a.push(next);
    }
    a
}

fn criterion_5() -> Outcome {
    let spec = SequenceSpec::eds([1, 1, -1, 1]).unwrap();
    let stream = TermStream::new(spec.clone()).unwrap();
    let terms = stream.terms_through(20).map_err(|e| e.to_string())?;
    let oracle = ward_oracle([1, 1, -1, 1], 20);
    for n in 1..=20 {
        let got = &terms[n - 1];
        ensure(BigRational::from(got.clone()) == oracle[n], || format!("a_{n}: {got} vs oracle {}", oracle[n]))?;
        ensure(*got == BigInt::from(EDS_TERMS[n - 1]), || format!("a_{n}: {got} vs frozen {}", EDS_TERMS[n - 1]))?;
    }
    let a = |k: i64| -> BigInt { if k == 0 { BigInt::zero() } else { terms[k as usize - 1].clone() } };
    let mut checked = 0;
    for m in 1..20i64 {
        for n in 1..=m {
            if m + n > 20 {
                continue;
            }
            let lhs = a(m + n) * a(m - n);
            let rhs = a(m + 1) * a(m - 1) * a(n) * a(n) - a(n + 1) * a(n - 1) * a(m) * a(m);
            ensure(lhs == rhs, || format!("Ward relation fails at (m, n) = ({m}, {n})"))?;
            checked += 1;
        }
    }
    let z = report(&spec, 50, &[]).zsigmondy_set;
    ensure(z.iter().all(|&n| n <= 30), || format!("Z(EDS) = {z:?}"))?;
    Ok(format!("terms match, Ward relation on {checked} pairs, Z up to 50 = {z:?}"))
}

#[derive(Default)]
struct OracleTally {
    full: usize,
    partial: usize,
}

/// Factorization oracle for the first `n_max` terms: primes of `a_n` not
/// dividing earlier terms must be exactly the support of the reported
/// primitive part, with the same exponents. Unfactored cofactors are kept
/// so later primes dividing them still count as seen.
fn factor_oracle(report: &ZsigmondyReport, n_max: u64, budget: &Budget, tally: &mut OracleTally) -> Result<(), String> {
    let mut seen: BTreeSet<BigUint> = report.excluded_primes.iter().cloned().collect();
    let mut opaque: Vec<BigUint> = Vec::new();
    for r in report.records.iter().filter(|r| r.n <= n_max) {
        if r.value.is_zero() {
            continue;
        }
        let c = r.primitive_part.clone().expect("nonzero term has a primitive part");
        ensure(r.has_primitive == (r.b_n.unwrap() > 0.0), || format!("n={}: has_primitive vs b_n", r.n))?;
        let f = factor(&r.value, budget).map_err(|e| e.to_string())?;
        let mut product = BigUint::one();
        for (p, e) in &f.factors {
            let old = seen.contains(p) || opaque.iter().any(|m| m.is_multiple_of(p));
            if old {
                ensure(!c.is_multiple_of(p), || format!("n={}: old prime {p} divides c_n", r.n))?;
            } else {
                product *= p.pow(*e);
            }
        }
        if f.is_complete() {
            ensure(product == c, || format!("n={}: new-prime product {product} != c_n {c}", r.n))?;
            tally.full += 1;
        } else {
            ensure(c.is_multiple_of(&product), || format!("n={}: new primes do not divide c_n", r.n))?;
            opaque.push(f.cofactor.clone());
            tally.partial += 1;
        }
        seen.extend(f.primes());
    }
    Ok(())
}

fn criterion_6() -> Outcome {
    let budget = Budget { rho_iterations: 2_000_000, ..Budget::default() };
    let mut reports: Vec<ZsigmondyReport> = Vec::new();
    for (u, v) in coprime_pairs(50, 1) {
        reports.push(report(&SequenceSpec::power_diff(u, v).unwrap(), 30, &[]));
    }
    reports.push(report(&SequenceSpec::power_diff(2, 1).unwrap(), 100, &[]));
    for spec in lucas_specs(20, 3) {
        reports.push(report(&spec, 100, &[]));
    }
    reports.push(report(&SequenceSpec::lucas(1, -1).unwrap(), 50, &[]));
    reports.push(report(&SequenceSpec::eds([1, 1, -1, 1]).unwrap(), 50, &[]));
    let mut terms = 0;
    for r in &reports {
        for t in r.records.iter().filter(|t| !t.value.is_zero()) {
            let b = t.b_n.ok_or("nonzero term without b_n")?;
            ensure(t.has_primitive == (b > 0.0), || format!("{:?} n={}: has_primitive vs b_n", r.spec, t.n))?;
            terms += 1;
        }
    }
    let mut tally = OracleTally::default();
    for r in &reports {
        factor_oracle(r, 30, &budget, &mut tally).map_err(|e| format!("{:?}: {e}", r.spec))?;
    }
    Ok(format!(
        "b_n equivalence on {terms} terms; factoring oracle agrees on {} terms ({} complete, {} with an unfactored cofactor)",
        tally.full + tally.partial,
        tally.full,
        tally.partial
    ))
}

fn criterion_7() -> Outcome {
    let mut values = 0;
    for d in 2..=5u32 {
        let n_max = match d {
            2 => 12,
            3 => 7,
            4 => 6,
            _ => 5,
        };
        let f = Morphism::power_map(2, d).unwrap();
        for a in 2..=5i64 {
            let p = ProjectivePoint::from_i64s(&[a, 1]).unwrap();
            let want = sig12((a as f64).ln());
            let base = canonical_height_estimate(&f, &p, n_max).map_err(|e| e.to_string())?;
            ensure(!base.truncated, || "estimate truncated".into())?;
            for v in &base.values {
                ensure(sig12(v.value) == want, || format!("d={d} a={a} n={}: {} vs {want}", v.n, sig12(v.value)))?;
                values += 1;
            }
            let image = canonical_height_estimate(&f, &f.apply(&p).unwrap(), n_max - 1).map_err(|e| e.to_string())?;
            ensure(image.is_shift_of(&base), || format!("d={d} a={a}: functional equation fails"))?;
            for (x, y) in image.values.iter().zip(&base.values[1..]) {
                ensure(sig12(x.value) == sig12(d as f64 * y.value), || format!("d={d} a={a}: shifted value differs"))?;
            }
        }
    }
    Ok(format!("{values} partial values equal log a; functional equation exact on all 16 systems"))
}

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let budget = Budget::default();
    let mut done = 0;
    let mut worst: f64 = 0.0;
    while done < 100 {
        let n = rng.gen_range(2..=3usize);
        let deg = rng.gen_range(1..=3u32);
        let monomials: Vec<Vec<u32>> = exponents(n, deg);
        let terms: Vec<(Vec<u32>, BigInt)> =
            monomials.into_iter().map(|e| (e, BigInt::from(rng.gen_range(-20..=20i64)))).collect();
        let Ok(form) = HomogeneousForm::new(n, terms) else { continue };
        let coords: Vec<i64> = (0..n).map(|_| rng.gen_range(-500..=500i64)).collect();
        let Ok(p) = ProjectivePoint::from_i64s(&coords) else { continue };
        let value = form.evaluate(p.coords()).unwrap();
        if value.is_zero() || value.abs() > BigInt::from(10u64.pow(12)) {
            continue;
        }
        let f = factor(&value, &budget).map_err(|e| e.to_string())?;
        ensure(f.is_complete(), || format!("{value} did not factor"))?;
        let sum: f64 = f
            .primes()
            .into_iter()
            .map(|q| local_height(&p, &form, &BigInt::from(q)).unwrap())
            .sum();
        let expect = ln_abs(&value);
        let err = (sum - expect).abs() / expect.max(1.0);
        worst = worst.max(err);
        ensure(err <= 1e-9, || format!("F={form} P={p}: {sum} vs {expect}"))?;
        done += 1;
    }
    Ok(format!("100 pairs, worst relative error {worst:.1e}"))
}

fn exponents(n: usize, deg: u32) -> Vec<Vec<u32>> {
    if n == 1 {
        return vec![vec![deg]];
    }
    let mut out = Vec::new();
    for k in 0..=deg {
        for mut rest in exponents(n - 1, deg - k) {
            rest.insert(0, k);
            out.push(rest);
        }
    }
    out
}

fn criterion_9() -> Outcome {
    let r = |a: i64, b: i64| BigRational::new(a.into(), b.into());
    let v = check_form_degree(2, 3, 7).map_err(|e| e.to_string())?;
    ensure(v.satisfied && v.lhs == r(7, 1) && v.rhs == r(6, 1), || format!("(2,3,7): {v:?}"))?;
    let v = check_form_degree(1, 3, 4).map_err(|e| e.to_string())?;
    ensure(!v.satisfied && v.lhs == v.rhs, || format!("(1,3,4): {v:?}"))?;
    ensure(check_form_degree(1, 2, 100) == Err(Error::DegreeTooSmall(2)), || "(1,2,100) not rejected".into())?;
    // j = 0, d = 3, N = 2 reduces to deg D > 6: 5 fails, 7 holds.
    let v = check_pullback_degree(3, 5, 3, 0, 5).map_err(|e| e.to_string())?;
    ensure(!v.satisfied && v.rhs == r(11, 2), || format!("j=0 degD=5: {v:?}"))?;
    ensure(check_pullback_degree(3, 7, 3, 0, 7).unwrap().satisfied, || "j=0 degD=7 should hold".into())?;
    let v = check_pullback_degree(3, 2, 3, 1, 6).map_err(|e| e.to_string())?;
    ensure(!v.satisfied && v.lhs == r(2, 1) && v.rhs == r(2, 1), || format!("d=3 j=1: {v:?}"))?;
    let v = check_pullback_degree(4, 1, 5, 0, 1).map_err(|e| e.to_string())?;
    ensure(!v.satisfied && v.rhs == r(1, 3) + r(5, 1), || format!("d=4 j=0: {v:?}"))?;
    for (d, deg_d, k, want) in [(3, 2, 3, 2), (3, 7, 3, 0), (4, 1, 5, 2)] {
        let j = min_iterate_j(d, deg_d, k).map_err(|e| e.to_string())?;
        ensure(j == want, || format!("min_iterate_j({d},{deg_d},{k}) = {j}, want {want}"))?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..100 {
        let d = rng.gen_range(3..=20u32);
        let deg_d = rng.gen_range(1..=100u64);
        let k = rng.gen_range(1..=100u64);
        let j = min_iterate_j(d, deg_d, k).map_err(|e| e.to_string())?;
        ensure(check_min_iterate(d, deg_d, k, j).unwrap().satisfied, || format!("({d},{deg_d},{k}) j={j} fails"))?;
        if j > 0 {
            ensure(!check_min_iterate(d, deg_d, k, j - 1).unwrap().satisfied, || format!("({d},{deg_d},{k}) j-1 holds"))?;
        }
    }
    Ok("worked instances exact; min_iterate_j minimal on 100 random triples".into())
}

fn criterion_10() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let primes: Vec<u32> = (2..100u32).filter(|&p| (2..p).all(|q| p % q != 0)).collect();
    let mut specs = Vec::new();
    while specs.len() < 20 {
        let spec = match rng.gen_range(0..4) {
            0 => SequenceSpec::power_diff(rng.gen_range(2..30), rng.gen_range(1..29)),
            1 => SequenceSpec::lucas(rng.gen_range(-10..=10), rng.gen_range(-10..=10)),
            2 => SequenceSpec::gcd_group(rng.gen_range(2..12), rng.gen_range(2..12)),
            _ => SequenceSpec::eds([1, rng.gen_range(1..4), rng.gen_range(-5..=5), 0]).and_then(|s| match s {
                SequenceSpec::Eds { init } => {
                    let a2 = init[1].clone();
                    SequenceSpec::eds([1, i64::try_from(&a2).unwrap(), i64::try_from(&init[2]).unwrap(), i64::try_from(&(a2 * 3)).unwrap()])
                }
                _ => unreachable!(),
            }),
        };
        if let Ok(s) = spec {
            if matches!(s, SequenceSpec::Lucas { .. }) && !s.is_nondegenerate_lucas() {
                continue;
            }
            specs.push(s);
        }
    }
    for spec in &specs {
        let small: Vec<BigUint> = primes.iter().filter(|_| rng.gen_bool(0.2)).map(|&p| BigUint::from(p)).collect();
        let mut large = small.clone();
        large.extend(primes.iter().filter(|_| rng.gen_bool(0.2)).map(|&p| BigUint::from(p)));
        let zs = report(spec, 40, &small).zsigmondy_set;
        let zl = report(spec, 40, &large).zsigmondy_set;
        ensure(zs.iter().all(|n| zl.contains(n)), || format!("{spec:?}: {zs:?} not within {zl:?}"))?;
    }
    Ok(format!("{} specs, Z(S) within Z(S') at N_max = 40", specs.len()))
}

fn criterion_11() -> Outcome {
    let r = report(&SequenceSpec::gcd_group(2, 3).unwrap(), 100, &[]);
    let ones = r.records.iter().filter(|t| t.value.is_one()).count();
    ensure(ones == GCD_ONES && ones >= 10, || format!("{ones} indices with value 1, oracle {GCD_ONES}"))?;
    let stat = r.tail_log_growth.ok_or("statistic missing")?;
    let json = serde_json::to_value(&r).map_err(|e| e.to_string())?;
    ensure(json["tail_log_growth"] == sig12(stat), || "statistic not serialized".into())?;
    Ok(format!("{ones} indices with value 1; max over 50 < n <= 100 of log(a_n)/n = {}", sig12(stat)))
}

fn criterion_12() -> Outcome {
    let form = "X*Y*Z*(X+Y+Z)*(X+2*Y+3*Z)*(X-Y+2*Z)*(2*X+Y-Z)";
    let spec = SequenceSpec::dyn_value(
        Morphism::power_map(3, 3).unwrap(),
        HomogeneousForm::parse(form, 3).unwrap(),
        ProjectivePoint::from_i64s(&[1, 2, 3]).unwrap(),
    )
    .unwrap();
    let factors = split_linear_factors(form, 3).ok_or("form did not split")?;
    let cfg = ExperimentConfig::new(spec, 8).and_then(|c| c.with_linear_factors(factors)).map_err(|e| e.to_string())?;
    let rep = run_experiment(&cfg).map_err(|e| e.to_string())?;
    ensure(!rep.truncated, || "experiment truncated".into())?;
    ensure(rep.verdicts.iter().any(|v| v.satisfied && v.lhs == BigRational::from(BigInt::from(7))), || {
        format!("threshold verdicts {:?}", rep.verdicts)
    })?;
    ensure(rep.normal_crossings == Some(true), || "normal crossings not verified".into())?;
    ensure(rep.conclusion.starts_with("threshold satisfied"), || rep.conclusion.clone())?;
    ensure(rep.terms.len() == 9, || "missing terms".into())?;
    let zs = &rep.zsigmondy_report;
    ensure(zs.zsigmondy_set == rep.zsigmondy, || "zsigmondy list mismatch".into())?;
    let mut tally = OracleTally::default();
    factor_oracle(zs, 30, &Budget::default(), &mut tally)?;
    Ok(format!(
        "threshold 7 > 6 satisfied, normal crossings verified, Zsigmondy indices {:?}; oracle agrees on {} terms ({} complete)",
        rep.zsigmondy,
        tally.full + tally.partial,
        tally.full
    ))
}

#[test]
fn acceptance() {
    type Criterion = (u32, &'static str, fn() -> Outcome, Duration);
    let criteria: [Criterion; 12] = [
        (1, "classical Zsigmondy bound", criterion_1, Duration::from_secs(10)),
        (2, "Z(2^n - 1) up to 100", criterion_2, Duration::from_secs(30)),
        (3, "Lucas primitive divisors past 30", criterion_3, Duration::MAX),
        (4, "Fibonacci Zsigmondy set", criterion_4, Duration::MAX),
        (5, "EDS regression", criterion_5, Duration::MAX),
        (6, "B_n equivalence and factoring oracle", criterion_6, Duration::MAX),
        (7, "canonical height exactness", criterion_7, Duration::MAX),
        (8, "local height decomposition", criterion_8, Duration::MAX),
        (9, "threshold arithmetic", criterion_9, Duration::MAX),
        (10, "exclusion monotonicity", criterion_10, Duration::MAX),
        (11, "gcd-sequence experiment", criterion_11, Duration::MAX),
        (12, "end-to-end P^2 experiment", criterion_12, Duration::from_secs(300)),
    ];
    let mut out = std::io::stdout();
    let mut failed = Vec::new();
    for (id, name, run, limit) in criteria {
        let start = Instant::now();
        let result = run();
        let elapsed = start.elapsed();
        let result = match result {
            Ok(detail) if elapsed > limit => Err(format!("{detail}; took {elapsed:.2?}, limit {limit:.0?}")),
            other => other,
        };
        let line = match &result {
            Ok(detail) => format!("criterion {id:>2} PASS  {name}: {detail} [{elapsed:.2?}]"),
            Err(why) => format!("criterion {id:>2} FAIL  {name}: {why} [{elapsed:.2?}]"),
        };
        writeln!(out, "{line}").unwrap();
        if result.is_err() {
            failed.push(id);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}

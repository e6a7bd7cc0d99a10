//! Command implementations. Every command validates its configuration before computing,
//! then writes its output in one piece.

use std::fmt::Write as _;
use std::io::Write as _;

use rayon::prelude::*;
use rug::float::Round;
use rug::{Float, Rational};
use serde::Serialize;
use serde_json::{json, Value};
use tycho_core::certify::SampleStatus;
use tycho_core::flat::{self, DerivativePolynomial};
use tycho_core::{
    certify_distinctness, certify_growth, certify_initial_limit, certify_residuals, parse_rational, BundleSpec,
    CertifiedValue, CoefficientFamily, CoefficientSequence, Equation, Error, EvalConfig, LimitPlan, PressureSign,
    PrecisionPolicy, Recursion, Result, SamplePlan, SolutionBundle, SolutionRef, Target, Verdict,
};

use crate::grid::Grid;
use crate::{CertifyArgs, CommonArgs, Family, Format, SweepArgs};

pub const SCHEMA_VERSION: &str = "tycho-report/1";

/// Process exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum Status {
    Pass = 0,
    Fail = 1,
    Inconclusive = 2,
    Usage = 64,
}

impl From<Verdict> for Status {
    fn from(v: Verdict) -> Status {
        match v {
            Verdict::Pass => Status::Pass,
            Verdict::Fail => Status::Fail,
            Verdict::Inconclusive => Status::Inconclusive,
        }
    }
}

fn usage(e: &Error) -> Status {
    eprintln!("tycho: {e}");
    Status::Usage
}

/// Parsed and validated parameters shared by every command; echoed into reports.
#[derive(Debug, Clone, Serialize)]
struct RunConfig {
    family: &'static str,
    k: u32,
    a0: String,
    order: usize,
    pressure_order: usize,
    precision: u32,
    max_order: usize,
    recursion: Recursion,
    pressure_sign: PressureSign,
    #[serde(skip_serializing_if = "Option::is_none")]
    grid: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    suites: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    samples: Option<usize>,
}

struct Prepared {
    config: RunConfig,
    spec: BundleSpec,
    eval: EvalConfig,
}

fn prepare(c: &CommonArgs, default_family: Family) -> Result<Prepared> {
    let family = c.family.unwrap_or(default_family);
    tycho_core::FlatFamily::new(c.k)?;
    let a0 = parse_rational(&c.a0).map_err(|_| Error::invalid("a0", format!("`{}` is not a rational", c.a0)))?;
    if a0.cmp0() != std::cmp::Ordering::Greater {
        return Err(Error::invalid("a0", "scale must be a positive rational"));
    }
    if c.precision < 16 {
        return Err(Error::invalid("precision", "at least 16 bits are required"));
    }
    if c.max_order == 0 {
        return Err(Error::invalid("max-order", "must be positive"));
    }
    let recursion: Recursion = c.recursion.parse()?;
    let pressure_sign: PressureSign = c.pressure_sign.parse()?;
    let mut spec = BundleSpec::new(c.k, a0, c.order);
    spec.recursion = recursion;
    spec.pressure_sign = pressure_sign;
    if let Some(m) = c.pressure_order {
        spec.pressure_order = m;
    }
    let eval = EvalConfig {
        policy: PrecisionPolicy::with_initial(c.precision),
        max_order: c.max_order.max(c.order),
        ..EvalConfig::default()
    };
    Ok(Prepared {
        config: RunConfig {
            family: family.name(),
            k: c.k,
            a0: spec.a0.to_string(),
            order: c.order,
            pressure_order: spec.pressure_order,
            precision: c.precision,
            max_order: eval.max_order,
            recursion,
            pressure_sign,
            grid: None,
            suites: None,
            samples: None,
        },
        spec,
        eval,
    })
}

fn emit(out: &Option<std::path::PathBuf>, text: &str) -> Status {
    let res = match out {
        Some(path) => std::fs::write(path, text),
        None => std::io::stdout().lock().write_all(text.as_bytes()),
    };
    match res {
        Ok(()) => Status::Pass,
        Err(e) => {
            eprintln!("tycho: cannot write output: {e}");
            Status::Usage
        }
    }
}

fn poly_string(p: &DerivativePolynomial) -> String {
    let mut out = String::new();
    for (i, (e, c)) in p.terms().collect::<Vec<_>>().into_iter().rev().enumerate() {
        let neg = c.cmp0() == std::cmp::Ordering::Less;
        let mag = c.clone().abs();
        if i == 0 {
            out.push_str(if neg { "-" } else { "" });
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        let coeff = if mag == 1 && e > 0 { String::new() } else { mag.to_string() };
        match e {
            0 => out.push_str(&mag.to_string()),
            1 => write!(out, "{coeff}s").unwrap(),
            _ => write!(out, "{coeff}s^{e}").unwrap(),
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

pub fn construct(c: &CommonArgs) -> Status {
    let p = match prepare(c, Family::NsBundle) {
        Ok(p) => p,
        Err(e) => return usage(&e),
    };
    let theta = match flat::certified_theta(c.k) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("tycho: {e}");
            return Status::Inconclusive;
        }
    };
    let spec = &p.spec;
    let family = p.config.family;
    let columns: Vec<(&str, CoefficientFamily)> = match family {
        "heat" | "burgers" => vec![("c_n", CoefficientFamily::Heat)],
        "vorticity" => vec![("a_n", CoefficientFamily::Vorticity(spec.recursion))],
        "velocity" | "pressure" => vec![("b_n", CoefficientFamily::Velocity(spec.recursion))],
        _ => vec![
            ("a_n", CoefficientFamily::Vorticity(spec.recursion)),
            ("b_n", CoefficientFamily::Velocity(spec.recursion)),
        ],
    };
    let mut tables = Vec::new();
    for (name, fam) in &columns {
        match CoefficientSequence::new(*fam, spec.a0.clone()) {
            Ok(s) => tables.push((*name, s.prefix(spec.order))),
            Err(e) => return usage(&e),
        }
    }
    let mut polys = Vec::new();
    for n in 0..=spec.order {
        match flat::derivative_polynomial(c.k, n) {
            Ok(q) => polys.push(q),
            Err(e) => return usage(&e),
        }
    }
    let text = match c.format.unwrap_or(Format::Csv) {
        Format::Json => {
            let coeffs: Vec<Value> = tables
                .iter()
                .map(|(name, v)| json!({"name": name, "values": v.iter().map(Rational::to_string).collect::<Vec<_>>()}))
                .collect();
            let stats: Vec<Value> = polys
                .iter()
                .enumerate()
                .map(|(n, q)| {
                    json!({"n": n, "degree": q.degree(), "leading": q.leading_coefficient().to_string(),
                           "terms": q.nonzero_terms(), "max_bits": q.max_coefficient_bits()})
                })
                .collect();
            let doc = json!({
                "schema_version": SCHEMA_VERSION,
                "config": p.config,
                "theta": {"value": theta.value, "certified_min": theta.certified_min},
                "coefficients": coeffs,
                "derivative_polynomials": stats,
            });
            serde_json::to_string_pretty(&doc).expect("serializable") + "\n"
        }
        Format::Csv => {
            let mut s = String::new();
            writeln!(s, "family: {family}").unwrap();
            writeln!(s, "k: {}  a0: {}  order: {}", c.k, spec.a0, spec.order).unwrap();
            writeln!(s, "recursion: {}  pressure sign: {}", spec.recursion.name(), spec.pressure_sign.name()).unwrap();
            writeln!(
                s,
                "theta: {} (certified min Re(w^-2k) on the circle: {:.6})",
                theta.value, theta.certified_min
            )
            .unwrap();
            writeln!(s, "\ncoefficients:").unwrap();
            let header: Vec<&str> = tables.iter().map(|(n, _)| *n).collect();
            writeln!(s, "  n  {}", header.join("  ")).unwrap();
            for n in 0..=spec.order {
                let row: Vec<String> = tables.iter().map(|(_, v)| v[n].to_string()).collect();
                writeln!(s, "  {n}  {}", row.join("  ")).unwrap();
            }
            writeln!(s, "\nderivative polynomials (f^(n) = Q_n(1/t) f):").unwrap();
            for (n, q) in polys.iter().enumerate().take(4) {
                writeln!(s, "  Q_{n} = {}", poly_string(q)).unwrap();
            }
            writeln!(s, "  n  degree  leading  terms  max_bits").unwrap();
            for (n, q) in polys.iter().enumerate() {
                writeln!(
                    s,
                    "  {n}  {}  {}  {}  {}",
                    q.degree(),
                    q.leading_coefficient(),
                    q.nonzero_terms(),
                    q.max_coefficient_bits()
                )
                .unwrap();
            }
            s
        }
    };
    emit(&c.out, &text)
}

fn decimal(x: &Float) -> String {
    format!("{x:.19e}")
}

/// Decimal upper bound of a nonnegative error.
fn decimal_up(x: &Float) -> String {
    let e = x.to_f64_round(Round::Up);
    format!("{:.5e}", e * (1.0 + 1e-5))
}

struct Row {
    space: Vec<Rational>,
    t: Rational,
    values: Vec<String>,
    error: String,
    flags: String,
    status: Verdict,
}

fn row_status(e: &Error) -> Verdict {
    if e.is_inconclusive() {
        Verdict::Inconclusive
    } else {
        Verdict::Fail
    }
}

fn evaluate_row(bundle: &SolutionBundle, family: Family, x: &[Rational], t: &Rational, cfg: &EvalConfig) -> Result<(Vec<CertifiedValue>, Float)> {
    let target = Target {
        absolute: Some(1e-300),
        relative: Some(1e-15),
    };
    let prec = cfg.policy.initial_bits;
    let vals: Vec<CertifiedValue> = match family {
        Family::Heat => vec![bundle.heat.value(&x[0], t, target, cfg)?],
        Family::Burgers => {
            cfg.check_time(t)?;
            vec![bundle.burgers.velocity(&x[0], t, prec)?.to_certified()]
        }
        Family::Vorticity => vec![bundle.vorticity.value_at(&[x[0].clone(), x[1].clone()], t, target, cfg)?],
        Family::Velocity | Family::NsBundle => {
            bundle.velocity.velocity(&[x[0].clone(), x[1].clone()], t, target, cfg)?.to_vec()
        }
        Family::Pressure => {
            cfg.check_time(t)?;
            vec![bundle.pressure.value(&[x[0].clone(), x[1].clone()], t, prec)?.to_certified()]
        }
    };
    let err = vals.iter().map(|v| v.error.clone()).fold(Float::with_val(prec, 0), |a, b| a.max(&b));
    Ok((vals, err))
}

pub fn sweep(a: &SweepArgs) -> Status {
    let c = &a.common;
    let mut p = match prepare(c, Family::Heat) {
        Ok(p) => p,
        Err(e) => return usage(&e),
    };
    let family = c.family.unwrap_or(Family::Heat);
    let planar = !matches!(family, Family::Heat | Family::Burgers);
    let spec = a.grid.clone().unwrap_or_else(|| {
        if planar {
            "x1=-1:1:5;x2=-1:1:5;t=1".to_string()
        } else {
            "x=-1:1:21;t=1/2,1,2".to_string()
        }
    });
    let points = match Grid::parse(&spec).and_then(|g| g.points(planar)) {
        Ok(pts) => pts,
        Err(e) => return usage(&e),
    };
    if let Some(bad) = points.iter().find(|(_, t)| t.cmp0() != std::cmp::Ordering::Greater) {
        return usage(&Error::invalid("grid", format!("time {} is not positive", bad.1)));
    }
    p.config.grid = Some(spec);
    let bundle = match SolutionBundle::new(p.spec.clone()) {
        Ok(b) => b,
        Err(e) => return usage(&e),
    };
    let rows: Vec<Row> = points
        .par_iter()
        .map(|(x, t)| match evaluate_row(&bundle, family, x, t, &p.eval) {
            Ok((vals, err)) => Row {
                space: x.clone(),
                t: t.clone(),
                values: vals.iter().map(|v| decimal(&v.value)).collect(),
                error: decimal_up(&err),
                flags: String::new(),
                status: Verdict::Pass,
            },
            Err(e) => Row {
                space: x.clone(),
                t: t.clone(),
                values: Vec::new(),
                error: String::new(),
                flags: e.to_string(),
                status: row_status(&e),
            },
        })
        .collect();
    let verdict = rows.iter().fold(Verdict::Pass, |v, r| v.combine(r.status));
    let value_names: &[&str] = match family {
        Family::Heat | Family::Burgers => &["u"],
        Family::Vorticity => &["omega"],
        Family::Velocity | Family::NsBundle => &["u1", "u2"],
        Family::Pressure => &["p"],
    };
    let coord_names: &[&str] = if planar { &["x1", "x2"] } else { &["x"] };
    let text = match c.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let mut header: Vec<&str> = coord_names.to_vec();
            header.push("t");
            header.extend_from_slice(value_names);
            header.extend_from_slice(&["error", "flags"]);
            w.write_record(&header).expect("in-memory write");
            for r in &rows {
                let mut rec: Vec<String> = r.space.iter().map(Rational::to_string).collect();
                rec.push(r.t.to_string());
                for i in 0..value_names.len() {
                    rec.push(r.values.get(i).cloned().unwrap_or_default());
                }
                rec.push(r.error.clone());
                rec.push(r.flags.clone());
                w.write_record(&rec).expect("in-memory write");
            }
            String::from_utf8(w.into_inner().expect("flushed")).expect("utf-8")
        }
        Format::Json => {
            let results: Vec<Value> = rows
                .iter()
                .map(|r| {
                    let values: serde_json::Map<String, Value> = value_names
                        .iter()
                        .zip(&r.values)
                        .map(|(n, v)| (n.to_string(), Value::String(v.clone())))
                        .collect();
                    json!({
                        "point": r.space.iter().map(Rational::to_string).collect::<Vec<_>>(),
                        "t": r.t.to_string(),
                        "values": values,
                        "error": r.error,
                        "flags": r.flags,
                    })
                })
                .collect();
            let doc = json!({
                "schema_version": SCHEMA_VERSION,
                "config": p.config,
                "results": results,
                "verdict": verdict,
            });
            serde_json::to_string_pretty(&doc).expect("serializable") + "\n"
        }
    };
    match emit(&c.out, &text) {
        Status::Pass => verdict.into(),
        s => s,
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Suite {
    Residual(Equation),
    Limit,
    Growth,
    Distinctness,
}

fn residual_equations(family: Family) -> Vec<Equation> {
    match family {
        Family::Heat => vec![Equation::Heat],
        Family::Burgers => vec![Equation::Burgers],
        Family::Vorticity => vec![Equation::VorticityPolar],
        Family::Velocity => vec![Equation::Divergence],
        Family::Pressure => vec![Equation::PressureOde],
        Family::NsBundle => vec![
            Equation::VorticityPolar,
            Equation::NsMomentum,
            Equation::Divergence,
            Equation::Jacobian,
            Equation::PressureOde,
        ],
    }
}

fn parse_suites(spec: &str, family: Family) -> Result<Vec<Suite>> {
    let mut out = Vec::new();
    for name in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let add: Vec<Suite> = match name {
            "residuals" => residual_equations(family).into_iter().map(Suite::Residual).collect(),
            "limit" => vec![Suite::Limit],
            "growth" => vec![Suite::Growth],
            "distinctness" => vec![Suite::Distinctness],
            other => match other.parse::<Equation>() {
                Ok(eq) => vec![Suite::Residual(eq)],
                Err(_) => return Err(Error::invalid("suite", format!("unknown suite `{other}`"))),
            },
        };
        for s in add {
            if !out.contains(&s) {
                out.push(s);
            }
        }
    }
    if out.is_empty() {
        return Err(Error::invalid("suite", "no suite selected"));
    }
    Ok(out)
}

fn solution_refs(bundle: &SolutionBundle, family: Family, for_limit: bool) -> Vec<SolutionRef<'_>> {
    match family {
        Family::Heat => vec![SolutionRef::Heat(&bundle.heat)],
        Family::Burgers => vec![SolutionRef::Burgers(&bundle.burgers)],
        Family::Vorticity => vec![SolutionRef::Vorticity(&bundle.vorticity)],
        Family::Velocity => vec![SolutionRef::Velocity(&bundle.velocity)],
        Family::Pressure => vec![SolutionRef::Pressure(&bundle.pressure)],
        Family::NsBundle if for_limit => vec![
            SolutionRef::Velocity(&bundle.velocity),
            SolutionRef::Vorticity(&bundle.vorticity),
            SolutionRef::Pressure(&bundle.pressure),
        ],
        Family::NsBundle => vec![SolutionRef::Velocity(&bundle.velocity)],
    }
}

struct CertifyParams {
    limit: LimitPlan,
    radii: Vec<Rational>,
    time: Rational,
    other: BundleSpec,
}

fn certify_params(a: &CertifyArgs, spec: &BundleSpec, cfg: &EvalConfig) -> Result<CertifyParams> {
    let rational = |field: &'static str, s: &str| {
        parse_rational(s).map_err(|_| Error::invalid(field, format!("`{s}` is not a rational")))
    };
    let radius = rational("radius", &a.radius)?;
    let t_start = rational("t-start", &a.t_start)?;
    let threshold: f64 = a
        .threshold
        .trim()
        .parse()
        .ok()
        .filter(|v: &f64| v.is_finite() && *v > 0.0)
        .ok_or_else(|| Error::invalid("threshold", format!("`{}` is not a positive decimal", a.threshold)))?;
    let radii = a
        .radii
        .split(',')
        .map(|r| rational("radii", r))
        .collect::<Result<Vec<_>>>()?;
    let time = rational("time", &a.time)?;
    cfg.check_time(&time)?;
    let mut other = spec.clone();
    other.k = a.k_other.unwrap_or(spec.k + 1);
    tycho_core::FlatFamily::new(other.k)?;
    if let Some(s) = &a.a0_other {
        other.a0 = rational("a0-other", s)?;
    }
    Ok(CertifyParams {
        limit: LimitPlan::new(radius, t_start, a.steps, threshold),
        radii,
        time,
        other,
    })
}

#[derive(Serialize)]
struct SuiteResult {
    suite: String,
    family: String,
    verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    report: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

fn to_result<T: Serialize>(suite: &str, family: &str, r: Result<T>, verdict: impl Fn(&T) -> Verdict) -> SuiteResult {
    match r {
        Ok(rep) => SuiteResult {
            suite: suite.to_string(),
            family: family.to_string(),
            verdict: verdict(&rep),
            report: Some(serde_json::to_value(&rep).expect("serializable")),
            error: None,
        },
        Err(e) => SuiteResult {
            suite: suite.to_string(),
            family: family.to_string(),
            verdict: row_status(&e),
            report: None,
            error: Some(e.to_string()),
        },
    }
}

fn csv_float(x: Option<f64>) -> String {
    x.map(|v| format!("{v:e}")).unwrap_or_default()
}

fn certify_csv(results: &[SuiteResult]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["suite", "family", "item", "x1", "x2", "t", "value", "error", "status"])
        .expect("in-memory write");
    let get = |v: &Value, k: &str| v.get(k).and_then(Value::as_f64);
    for r in results {
        let mut push = |item: String, x1: String, x2: String, t: String, value: String, err: String, status: String| {
            w.write_record([&r.suite, &r.family, &item, &x1, &x2, &t, &value, &err, &status])
                .expect("in-memory write");
        };
        let Some(rep) = &r.report else {
            push(String::new(), String::new(), String::new(), String::new(), String::new(), String::new(), r.verdict.name().to_string());
            continue;
        };
        let status_of = |v: &Value| v.as_str().unwrap_or("").to_string();
        if let Some(samples) = rep.get("samples").and_then(Value::as_array) {
            for s in samples {
                let pt: Vec<f64> = s["point"].as_array().unwrap().iter().filter_map(Value::as_f64).collect();
                push(
                    s["index"].to_string(),
                    csv_float(pt.first().copied()),
                    csv_float(pt.get(1).copied()),
                    csv_float(get(s, "t")),
                    csv_float(get(s, "residual")),
                    csv_float(get(s, "tolerance")),
                    status_of(&s["status"]),
                );
            }
        } else if let Some(ladder) = rep.get("ladder").and_then(Value::as_array) {
            for (j, e) in ladder.iter().enumerate() {
                let (value, err, x1, t) = if e.get("sup_upper").is_some() {
                    let (lo, hi) = (get(e, "sup_lower").unwrap_or(0.0), get(e, "sup_upper").unwrap_or(0.0));
                    (hi, hi - lo, None, get(e, "t"))
                } else {
                    let (lo, hi) = (get(e, "ratio_lower").unwrap_or(0.0), get(e, "ratio_upper").unwrap_or(0.0));
                    (hi, hi - lo, get(e, "radius"), get(rep, "t"))
                };
                push(
                    j.to_string(),
                    csv_float(x1),
                    String::new(),
                    csv_float(t),
                    csv_float(Some(value)),
                    csv_float(Some(err)),
                    r.verdict.name().to_string(),
                );
            }
        } else {
            let wit: Vec<f64> = rep["witness"].as_array().map(|a| a.iter().filter_map(Value::as_f64).collect()).unwrap_or_default();
            push(
                String::new(),
                csv_float(wit.first().copied()),
                csv_float(wit.get(1).copied()),
                csv_float(get(rep, "t")),
                csv_float(get(rep, "margin")),
                String::new(),
                r.verdict.name().to_string(),
            );
        }
    }
    String::from_utf8(w.into_inner().expect("flushed")).expect("utf-8")
}

pub fn certify(a: &CertifyArgs, forced: Option<&str>) -> Status {
    let c = &a.common;
    let mut p = match prepare(c, Family::NsBundle) {
        Ok(p) => p,
        Err(e) => return usage(&e),
    };
    let family = c.family.unwrap_or(Family::NsBundle);
    let suite_spec = forced.unwrap_or(&a.suite);
    let suites = match parse_suites(suite_spec, family) {
        Ok(s) => s,
        Err(e) => return usage(&e),
    };
    if a.samples == 0 {
        return usage(&Error::invalid("samples", "must be positive"));
    }
    let params = match certify_params(a, &p.spec, &p.eval) {
        Ok(x) => x,
        Err(e) => return usage(&e),
    };
    let bundle = match SolutionBundle::new(p.spec.clone()) {
        Ok(b) => b,
        Err(e) => return usage(&e),
    };
    let needs_other = suites.contains(&Suite::Distinctness);
    let other = if needs_other {
        match SolutionBundle::new(params.other.clone()) {
            Ok(b) => Some(b),
            Err(e) => return usage(&e),
        }
    } else {
        None
    };
    p.config.suites = Some(
        suites
            .iter()
            .map(|s| match s {
                Suite::Residual(eq) => eq.name().to_string(),
                Suite::Limit => "limit".into(),
                Suite::Growth => "growth".into(),
                Suite::Distinctness => "distinctness".into(),
            })
            .collect(),
    );
    p.config.samples = Some(a.samples);
    let cfg = &p.eval;
    let mut results = Vec::new();
    for suite in &suites {
        match suite {
            Suite::Residual(eq) => {
                let plan = SamplePlan::default_for(*eq, a.samples);
                let r = certify_residuals(&bundle, *eq, &plan, cfg);
                results.push(to_result(eq.name(), family.name(), r, |r| r.verdict));
            }
            Suite::Limit => {
                for s in solution_refs(&bundle, family, true) {
                    let r = certify_initial_limit(s, &params.limit, cfg);
                    results.push(to_result("limit", s.family(), r, |r| r.verdict));
                }
            }
            Suite::Growth => {
                for s in solution_refs(&bundle, family, false) {
                    let r = certify_growth(s, &params.time, a.exponent, &params.radii, cfg);
                    results.push(to_result("growth", s.family(), r, |r| r.verdict));
                }
            }
            Suite::Distinctness => {
                let o = other.as_ref().expect("built above");
                let pairs = solution_refs(&bundle, family, false)
                    .into_iter()
                    .zip(solution_refs(o, family, false));
                for (x, y) in pairs {
                    let witness = if matches!(x, SolutionRef::Heat(_) | SolutionRef::Burgers(_)) {
                        vec![Rational::from(1)]
                    } else {
                        vec![Rational::from(1), Rational::new()]
                    };
                    let r = certify_distinctness(x, y, &witness, &params.time, cfg);
                    results.push(to_result("distinctness", x.family(), r, |r| r.verdict));
                }
            }
        }
    }
    let verdict = results.iter().fold(Verdict::Pass, |v, r| v.combine(r.verdict));
    for r in &results {
        let detail = match (&r.error, &r.report) {
            (Some(e), _) => e.clone(),
            (None, Some(rep)) => match rep.get("samples").and_then(Value::as_array) {
                Some(s) => {
                    let count = |st: SampleStatus| s.iter().filter(|x| x["status"] == json!(st)).count();
                    format!(
                        "{} samples: {} pass, {} fail, {} inconclusive, {} excluded",
                        s.len(),
                        count(SampleStatus::Pass),
                        count(SampleStatus::Fail),
                        count(SampleStatus::Inconclusive),
                        count(SampleStatus::Excluded)
                    )
                }
                None => String::new(),
            },
            _ => String::new(),
        };
        eprintln!("{} [{}]: {} {}", r.suite, r.family, r.verdict.name(), detail);
    }
    let text = match c.format.unwrap_or(Format::Json) {
        Format::Json => {
            let doc = json!({
                "schema_version": SCHEMA_VERSION,
                "config": p.config,
                "results": results,
                "verdict": verdict,
            });
            serde_json::to_string_pretty(&doc).expect("serializable") + "\n"
        }
        Format::Csv => certify_csv(&results),
    };
    match emit(&c.out, &text) {
        Status::Pass => verdict.into(),
        s => s,
    }
}

//! Acceptance suite: one PASS/FAIL line per criterion. Expected values come from
//! independent oracles computed here, never from the library under test.

use std::collections::BTreeMap;
use std::process::Command;
use std::time::Instant;

use rug::ops::Pow;
use rug::{Integer, Rational};
use tycho_core::certify::{SampleStatus, SamplePlan};
use tycho_core::coeffs::{vorticity_closed_form, CoefficientSequence};
use tycho_core::solutions::biot_savart_radial;
use tycho_core::{
    certify_distinctness, certify_growth, certify_initial_limit, certify_residuals, flat, BundleSpec, CoefficientFamily,
    Coordinate, DerivativeOrder, Equation, EvalConfig, LimitPlan, PressureSign, Recursion, SolutionBundle, SolutionRef,
    Target, Verdict,
};

/// Relative agreement between a partial-sum residual and its single-term prediction.
const RESIDUAL_IDENTITY_TOL: f64 = 1e-10;
/// Relative agreement between quadrature and the closed velocity series.
const BIOT_SAVART_TOL: f64 = 1e-8;
/// Final sup-norm and pairing threshold of the initial-limit ladder.
const LIMIT_THRESHOLD: f64 = 1e-12;
/// Relative agreement between the linearity margin and the a0 = 1 magnitude.
const LINEARITY_TOL: f64 = 1e-10;

type Outcome = Result<String, String>;

fn q(p: i64, d: i64) -> Rational {
    Rational::from((p, d))
}

fn check(cond: bool, detail: String) -> Outcome {
    if cond {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn bundle(k: u32, a0: Rational, order: usize) -> SolutionBundle {
    SolutionBundle::new(BundleSpec::new(k, a0, order)).expect("valid bundle")
}

/// `f^{(n)}/f` as a Laurent polynomial `Σ c_j t^{-j}`, differentiated directly in `t`:
/// `d/dt (t^{-j} f) = -j t^{-j-1} f + 2k t^{-j-2k-1} f`.
fn laurent_oracle(k: u32, n: usize) -> BTreeMap<usize, Integer> {
    let mut cur = BTreeMap::from([(0usize, Integer::from(1))]);
    for _ in 0..n {
        let mut next: BTreeMap<usize, Integer> = BTreeMap::new();
        for (j, c) in &cur {
            if *j > 0 {
                *next.entry(j + 1).or_default() -= Integer::from(c * *j as u32);
            }
            *next.entry(j + 2 * k as usize + 1).or_default() += Integer::from(c * (2 * k));
        }
        next.retain(|_, c| *c != 0);
        cur = next;
    }
    cur
}

fn eval_laurent(p: &BTreeMap<usize, Integer>, s: &Rational) -> Rational {
    p.iter().map(|(j, c)| s.clone().pow(*j as u32) * c).sum()
}

fn rel_diff(a: &Rational, b: &Rational) -> f64 {
    if a == b {
        return 0.0;
    }
    let d = Rational::from(a - b).abs().to_f64();
    d / b.clone().abs().to_f64().max(f64::MIN_POSITIVE)
}

fn c01_derivative_polynomials() -> Outcome {
    let mut compared = 0;
    for k in 1..=3u32 {
        for n in 0..=12usize {
            let lib = flat::derivative_polynomial(k, n).map_err(|e| e.to_string())?;
            let oracle = laurent_oracle(k, n);
            let lib_terms: BTreeMap<usize, Integer> = lib.terms().map(|(e, c)| (e, c.clone())).collect();
            if lib_terms != oracle {
                return Err(format!("mismatch at k={k}, n={n}"));
            }
            compared += 1;
        }
    }
    let q11: Vec<(usize, Integer)> = flat::derivative_polynomial(1, 1).unwrap().terms().map(|(e, c)| (e, c.clone())).collect();
    let q21: Vec<(usize, Integer)> = flat::derivative_polynomial(2, 1).unwrap().terms().map(|(e, c)| (e, c.clone())).collect();
    let q12: Vec<(usize, Integer)> = flat::derivative_polynomial(1, 2).unwrap().terms().map(|(e, c)| (e, c.clone())).collect();
    let explicit = q11 == vec![(3, Integer::from(2))]
        && q21 == vec![(5, Integer::from(4))]
        && q12 == vec![(4, Integer::from(-6)), (6, Integer::from(4))];
    check(explicit, format!("{compared} polynomials equal the direct-differentiation oracle; Q_1, Q_2 explicit forms match"))
}

fn c02_coefficient_laws() -> Outcome {
    let a0 = q(7, 3);
    for recursion in [Recursion::OddProduct, Recursion::PolarHeat] {
        let seq = CoefficientSequence::new(CoefficientFamily::Vorticity(recursion), a0.clone()).unwrap();
        let pre = seq.prefix(100);
        for (n, a) in pre.iter().enumerate() {
            let closed = vorticity_closed_form(recursion, n as u32, &a0).unwrap();
            if *a != closed {
                return Err(format!("{} recursion differs from closed form at n={n}", recursion.name()));
            }
        }
    }
    let odd = CoefficientSequence::new(CoefficientFamily::Vorticity(Recursion::OddProduct), q(1, 1)).unwrap();
    let stated = odd.value(1) == q(1, 3) && odd.value(2) == q(1, 45);
    check(stated, "n ≤ 100 recursion ≡ closed form (both recursions); a_1 = a0/3, a_2 = a0/45 under the stated law".into())
}

/// Partial-sum residual identity plus the certified suite, for the heat or polar operator.
fn residual_identity(equation: Equation) -> Outcome {
    let cfg = EvalConfig::default();
    let mut worst = 0.0f64;
    let mut lines = Vec::new();
    for k in [1u32, 2] {
        let b = bundle(k, q(1, 1), 30);
        let plan = SamplePlan::default_for(equation, 32);
        let report = certify_residuals(&b, equation, &plan, &cfg).map_err(|e| e.to_string())?;
        if report.verdict != Verdict::Pass {
            return Err(format!("k={k}: suite verdict {}", report.verdict.name()));
        }
        let (series, squared) = match equation {
            Equation::Heat => (b.heat.series().clone(), false),
            _ => (b.vorticity.series().clone(), true),
        };
        let n = series.order();
        let oracle = laurent_oracle(k, n + 1);
        for p in plan.points() {
            let s = Rational::from(p.t.recip_ref());
            let rho = p.space[0].clone();
            let w = Rational::from(rho.square_ref());
            let exact = if squared {
                let c = Coordinate::Squared(w.clone());
                let rt = series.partial_sum_exact(&c, &p.t, DerivativeOrder::new(0, 1)).unwrap();
                let rw = series.partial_sum_exact(&c, &p.t, DerivativeOrder::new(1, 0)).unwrap();
                let rww = series.partial_sum_exact(&c, &p.t, DerivativeOrder::new(2, 0)).unwrap();
                rt - rw * 4u32 - rww * Rational::from(&w * 4u32)
            } else {
                let c = Coordinate::Linear(rho.clone());
                let rt = series.partial_sum_exact(&c, &p.t, DerivativeOrder::new(0, 1)).unwrap();
                let rxx = series.partial_sum_exact(&c, &p.t, DerivativeOrder::new(2, 0)).unwrap();
                rt - rxx
            };
            let predicted = series.coefficient(n) * eval_laurent(&oracle, &s) * w.clone().pow(n as u32);
            worst = worst.max(rel_diff(&exact, &predicted));
        }
        lines.push(format!("k={k} pass"));
    }
    check(
        worst <= RESIDUAL_IDENTITY_TOL,
        format!("{}; max relative deviation from c_N f^(N+1) r^(2N): {worst:e}", lines.join(", ")),
    )
}

fn c05_biot_savart() -> Outcome {
    let b = bundle(1, q(1, 1), 40);
    let cfg = EvalConfig::default();
    let mut worst = 0.0f64;
    for r in [q(1, 4), q(1, 2), q(3, 4), q(1, 1), q(5, 4)] {
        for t in [q(1, 2), q(1, 1), q(2, 1)] {
            let x = [r.clone(), Rational::new()];
            let closed = b.velocity.velocity(&x, &t, Target::relative(1e-14), &cfg).map_err(|e| e.to_string())?;
            let quad = biot_savart_radial(&b.vorticity, [r.to_f64(), 0.0], &t, &cfg).map_err(|e| e.to_string())?;
            let c = closed[1].value_f64();
            let rel = (quad.velocity[1] - c).abs() / c.abs();
            if quad.velocity[0].abs() > 1e-300 {
                return Err("radial component of the reconstructed velocity is nonzero".into());
            }
            worst = worst.max(rel);
        }
    }
    check(worst <= BIOT_SAVART_TOL, format!("5×3 grid, k=1, a0=1, N=40: max relative difference {worst:e}"))
}

fn c06_pressure() -> Outcome {
    let mut spec = BundleSpec::new(1, q(1, 1), 30);
    spec.pressure_sign = PressureSign::Stated;
    let b = SolutionBundle::new(spec).unwrap();
    let plan = SamplePlan::default_for(Equation::PressureOde, 10);
    let report = certify_residuals(&b, Equation::PressureOde, &plan, &EvalConfig::default()).map_err(|e| e.to_string())?;
    let worst = report
        .samples
        .iter()
        .filter_map(|s| Some(s.residual?.abs() / s.tolerance?))
        .fold(0.0f64, f64::max);
    let mut symbolic = true;
    for a0 in [q(1, 1), q(2, 1), q(7, 3)] {
        let mut spec = BundleSpec::new(1, a0.clone(), 6);
        spec.pressure_sign = PressureSign::Stated;
        let p = SolutionBundle::new(spec).unwrap().pressure;
        let half = Rational::from(&a0 / 2u32);
        let expected = -Rational::from(half.square_ref()) / 2u32;
        for t in [q(1, 2), q(1, 1), q(2, 1)] {
            symbolic &= p.coefficients_exact(&t).unwrap()[1] == expected;
        }
    }
    check(
        report.verdict == Verdict::Pass && symbolic,
        format!(
            "ODE suite {} at 10 points (max residual/budget {worst:.2e}); d_1 = -(a0/2)² f²/2 exactly: {symbolic}",
            report.verdict.name()
        ),
    )
}

fn c07_momentum() -> Outcome {
    let cfg = EvalConfig::default();
    let b = bundle(1, q(1, 1), 30);
    let plan = SamplePlan::default_for(Equation::NsMomentum, 32);
    let with = certify_residuals(&b, Equation::NsMomentum, &plan, &cfg).map_err(|e| e.to_string())?;
    let mut spec = BundleSpec::new(1, q(1, 1), 30);
    spec.pressure_order = 0;
    let without = certify_residuals(&SolutionBundle::new(spec).unwrap(), Equation::NsMomentum, &plan, &cfg)
        .map_err(|e| e.to_string())?;
    check(
        with.verdict == Verdict::Pass && without.verdict == Verdict::Fail,
        format!(
            "with pressure: {}; pressure omitted: {}",
            with.verdict.name(),
            without.verdict.name()
        ),
    )
}

fn c08_divergence_jacobian() -> Outcome {
    let cfg = EvalConfig::default();
    let b = bundle(1, q(1, 1), 30);
    let mut parts = Vec::new();
    let mut ok = true;
    for eq in [Equation::Divergence, Equation::Jacobian] {
        let plan = SamplePlan::default_for(eq, 20);
        let r = certify_residuals(&b, eq, &plan, &cfg).map_err(|e| e.to_string())?;
        ok &= r.verdict == Verdict::Pass;
        parts.push(format!("{} {}", eq.name(), r.verdict.name()));
    }
    check(ok, format!("20 annulus points: {}", parts.join(", ")))
}

fn c09_initial_limit() -> Outcome {
    let cfg = EvalConfig::default();
    let b = bundle(1, q(1, 1), 30);
    let plan = LimitPlan::new(q(1, 1), q(4, 5), 3, LIMIT_THRESHOLD);
    let mut ok = true;
    let mut parts = Vec::new();
    for s in [SolutionRef::Heat(&b.heat), SolutionRef::Velocity(&b.velocity)] {
        let r = certify_initial_limit(s, &plan, &cfg).map_err(|e| e.to_string())?;
        let last = r.ladder.last().map(|e| e.sup_upper).unwrap_or(f64::NAN);
        // e^{-1/t²} at t = 0.1 sets the scale of the final rung.
        let scale = (-100f64).exp();
        ok &= r.verdict == Verdict::Pass && last < LIMIT_THRESHOLD;
        parts.push(format!(
            "{} {} (sup at t=0.1: {last:.3e}, e^-100 = {scale:.2e})",
            r.family,
            r.verdict.name()
        ));
    }
    check(ok, parts.join("; "))
}

fn c10_burgers() -> Outcome {
    let b = bundle(1, q(1, 1), 30);
    let plan = SamplePlan::default_for(Equation::Burgers, 16);
    let r = certify_residuals(&b, Equation::Burgers, &plan, &EvalConfig::default()).map_err(|e| e.to_string())?;
    let excluded = r.samples.iter().filter(|s| s.status == SampleStatus::Excluded).count();
    let worst = r
        .samples
        .iter()
        .filter_map(|s| Some(s.residual?.abs() + s.fd_estimate.unwrap_or(0.0)))
        .fold(0.0f64, f64::max);
    check(
        r.verdict == Verdict::Pass && excluded == 0,
        format!("16 points: {} ; max |residual|+FD estimate {worst:.2e}; pole guard triggered {excluded} times", r.verdict.name()),
    )
}

fn c11_distinctness() -> Outcome {
    let cfg = EvalConfig::default();
    let one = q(1, 1);
    let b1 = bundle(1, one.clone(), 30);
    let b2 = bundle(2, one.clone(), 30);
    let b1a2 = bundle(1, q(2, 1), 30);
    let heat = certify_distinctness(SolutionRef::Heat(&b1.heat), SolutionRef::Heat(&b2.heat), std::slice::from_ref(&one), &one, &cfg)
        .map_err(|e| e.to_string())?;
    let witness = [one.clone(), Rational::new()];
    let vel = certify_distinctness(SolutionRef::Velocity(&b1.velocity), SolutionRef::Velocity(&b2.velocity), &witness, &one, &cfg)
        .map_err(|e| e.to_string())?;
    let lin = certify_distinctness(SolutionRef::Velocity(&b1.velocity), SolutionRef::Velocity(&b1a2.velocity), &witness, &one, &cfg)
        .map_err(|e| e.to_string())?;
    let magnitude = lin.values_a.iter().map(|v| v * v).sum::<f64>().sqrt();
    let lin_rel = (lin.margin - magnitude).abs() / magnitude;
    check(
        heat.verdict == Verdict::Pass && vel.verdict == Verdict::Pass && lin.verdict == Verdict::Pass && lin_rel <= LINEARITY_TOL,
        format!(
            "heat k1/k2 margin {:.3e}; velocity k1/k2 margin {:.3e}; velocity a0 1/2 margin {:.6e} vs |u| {:.6e}",
            heat.margin, vel.margin, lin.margin, magnitude
        ),
    )
}

fn c12_growth() -> Outcome {
    let b = bundle(1, q(1, 1), 30);
    let radii = [q(2, 1), q(4, 1), q(8, 1), q(16, 1)];
    let r = certify_growth(SolutionRef::Heat(&b.heat), &q(1, 1), 4, &radii, &EvalConfig::default())
        .map_err(|e| e.to_string())?;
    let ratios: Vec<String> = r.ladder.iter().map(|e| format!("{:.4e}", e.ratio_lower)).collect();
    check(
        r.verdict == Verdict::Pass,
        format!("{}: |u(x,1)|/|x|^4 at x=2,4,8,16 = [{}]", r.label, ratios.join(", ")),
    )
}

fn tycho(args: &[&str]) -> (i32, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_tycho")).args(args).output().expect("binary runs");
    (out.status.code().unwrap_or(-1), out.stdout)
}

fn c13_cli() -> Outcome {
    let scenarios: [(&str, &[&str], i32); 5] = [
        ("pass", &["certify", "--family", "heat", "--suite", "heat", "--samples", "8"], 0),
        ("fail", &["certify", "--suite", "ns-momentum", "--pressure-order", "0", "--samples", "8"], 1),
        ("inconclusive", &["growth-check", "--family", "heat", "--order", "8", "--max-order", "8"], 2),
        ("usage", &["construct", "--k", "0"], 64),
        ("usage", &["certify", "--suite", "bogus"], 64),
    ];
    let mut parts = Vec::new();
    let mut ok = true;
    for (name, args, expected) in scenarios {
        let (code, _) = tycho(args);
        ok &= code == expected;
        parts.push(format!("{name}={code}"));
    }
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut files = Vec::new();
    for i in 0..2 {
        let path = dir.path().join(format!("run{i}.json"));
        let p = path.to_str().unwrap().to_string();
        tycho(&["certify", "--suite", "residuals,distinctness", "--samples", "8", "--out", &p]);
        files.push(std::fs::read(&path).map_err(|e| e.to_string())?);
    }
    let (_, s1) = tycho(&["sweep", "--family", "velocity"]);
    let (_, s2) = tycho(&["sweep", "--family", "velocity"]);
    let identical = files[0] == files[1] && !files[0].is_empty() && s1 == s2;
    ok &= identical;
    check(ok, format!("exit codes {}; repeated runs byte-identical: {identical}", parts.join(" ")))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 13] = [
        ("derivative-polynomial oracle equivalence", c01_derivative_polynomials),
        ("coefficient laws", c02_coefficient_laws),
        ("heat residual", || residual_identity(Equation::Heat)),
        ("vorticity polar residual", || residual_identity(Equation::VorticityPolar)),
        ("Biot-Savart cross-validation", c05_biot_savart),
        ("pressure identification", c06_pressure),
        ("momentum residual with pressure", c07_momentum),
        ("divergence and Jacobian", c08_divergence_jacobian),
        ("distributional initial limit", c09_initial_limit),
        ("Burgers residual via Cole-Hopf", c10_burgers),
        ("nonuniqueness witnesses", c11_distinctness),
        ("growth evidence", c12_growth),
        ("CLI contract", c13_cli),
    ];
    let mut passed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(d) => {
                passed += 1;
                println!("criterion {:02} {name}: PASS ({d}) [{secs:.1}s]", i + 1);
            }
            Err(d) => println!("criterion {:02} {name}: FAIL ({d}) [{secs:.1}s]", i + 1),
        }
    }
    println!("acceptance: {passed}/{} criteria passed", criteria.len());
    if passed != criteria.len() {
        std::process::exit(1);
    }
}

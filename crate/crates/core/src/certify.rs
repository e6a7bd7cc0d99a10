//! Verification harness: PDE residual suites, initial-limit ladders, growth ladders and
//! pairwise distinctness, each producing a serializable report whose verdict is backed by
//! explicit computed inequalities.

use std::cmp::Ordering;

use rayon::prelude::*;
use rug::float::Round;
use rug::ops::Pow;
use rug::{Float, Rational};
use serde::{Deserialize, Serialize};

use crate::arith::{self, CertifiedValue, Enclosure};
use crate::coeffs::Recursion;
use crate::error::{Error, Result};
use crate::fd::Stencil;
use crate::flat::{self, FlatFamily};
use crate::quadrature;
use crate::series::{Coordinate, DerivativeOrder, EvalConfig, Target, TruncatedSeries};
use crate::solutions::{
    BurgersSolution, HeatSolution, PressureSign, PressureSolution, SolutionBundle, VelocitySolution,
    VorticitySolution,
};

/// Default number of sample points per residual suite.
pub const DEFAULT_SAMPLES: usize = 32;

/// Tolerance for the Burgers residual computed by finite differences.
pub const BURGERS_TOLERANCE: f64 = 1e-6;

/// Relative accuracy requested for values entering limit and growth ladders.
pub const LADDER_RELATIVE_TARGET: f64 = 1e-6;

/// Finite-difference step for residuals whose samples are exact rationals.
fn exact_step() -> Rational {
    Rational::from((1, 4096))
}

/// Finite-difference step for the Burgers residual, whose samples are enclosures.
fn burgers_step() -> Rational {
    Rational::from((1, 512))
}

/// Radius added to the stencil reach for the Cauchy estimate of the remainder.
fn cauchy_delta() -> Rational {
    Rational::from((1, 2))
}

/// Equation checked by a residual suite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Equation {
    Heat,
    VorticityPolar,
    NsMomentum,
    Divergence,
    Jacobian,
    PressureOde,
    Burgers,
}

impl Equation {
    pub const ALL: [Equation; 7] = [
        Equation::Heat,
        Equation::VorticityPolar,
        Equation::NsMomentum,
        Equation::Divergence,
        Equation::Jacobian,
        Equation::PressureOde,
        Equation::Burgers,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Equation::Heat => "heat",
            Equation::VorticityPolar => "vorticity-polar",
            Equation::NsMomentum => "ns-momentum",
            Equation::Divergence => "divergence",
            Equation::Jacobian => "jacobian",
            Equation::PressureOde => "pressure-ode",
            Equation::Burgers => "burgers",
        }
    }
}

impl std::str::FromStr for Equation {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Equation::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| Error::invalid("equation", format!("unknown equation `{s}`")))
    }
}

/// Outcome of a check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl Verdict {
    /// Fail dominates inconclusive, which dominates pass.
    pub fn combine(self, other: Verdict) -> Verdict {
        match (self, other) {
            (Verdict::Fail, _) | (_, Verdict::Fail) => Verdict::Fail,
            (Verdict::Inconclusive, _) | (_, Verdict::Inconclusive) => Verdict::Inconclusive,
            _ => Verdict::Pass,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

/// Status of one residual sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SampleStatus {
    Pass,
    Fail,
    Inconclusive,
    /// Skipped for a reported reason (for example the Cole-Hopf pole guard).
    Excluded,
}

/// One residual sample: `|residual| ≤ tolerance` decides the status.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualSample {
    pub index: usize,
    pub point: Vec<f64>,
    pub t: f64,
    pub residual: Option<f64>,
    pub tolerance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fd_estimate: Option<f64>,
    pub status: SampleStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// Parameters of the solutions a report was computed for.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportMetadata {
    pub k: u32,
    pub a0: String,
    pub order: usize,
    pub pressure_order: usize,
    pub precision: u32,
    pub recursion: Recursion,
    pub pressure_sign: PressureSign,
}

impl ReportMetadata {
    fn of(bundle: &SolutionBundle, cfg: &EvalConfig) -> Self {
        ReportMetadata {
            k: bundle.spec.k,
            a0: bundle.spec.a0.to_string(),
            order: bundle.spec.order,
            pressure_order: bundle.spec.pressure_order,
            precision: cfg.policy.initial_bits,
            recursion: bundle.spec.recursion,
            pressure_sign: bundle.spec.pressure_sign,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub equation: Equation,
    pub samples: Vec<ResidualSample>,
    pub verdict: Verdict,
    pub metadata: ReportMetadata,
}

/// Spatial part of a sample box; all bounds are exact rationals.
#[derive(Debug, Clone, PartialEq)]
pub enum SpaceDomain {
    /// `x ∈ [lo, hi]` (a line coordinate or a radius).
    Interval { lo: Rational, hi: Rational },
    /// `x ∈ [-half, half]²`.
    Square { half: Rational },
    /// `inner ≤ |x| ≤ outer` in the plane.
    Annulus { inner: Rational, outer: Rational },
}

impl SpaceDomain {
    fn dims(&self) -> usize {
        match self {
            SpaceDomain::Interval { .. } => 1,
            _ => 2,
        }
    }
}

/// Deterministic low-discrepancy sample plan over `space × [t_lo, t_hi]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplePlan {
    pub count: usize,
    pub space: SpaceDomain,
    pub t_lo: Rational,
    pub t_hi: Rational,
}

/// A sample location with exact coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplePoint {
    pub space: Vec<Rational>,
    pub t: Rational,
}

fn q(p: i64, d: i64) -> Rational {
    Rational::from((p, d))
}

/// Halton radical inverse of `i` in `base`, as an exact rational in `[0, 1)`.
pub fn radical_inverse(mut i: u64, base: u64) -> Rational {
    let mut num = Rational::new();
    let mut scale = Rational::from((1, base));
    while i > 0 {
        num += Rational::from(&scale * (i % base));
        scale /= base;
        i /= base;
    }
    num
}

fn lerp(lo: &Rational, hi: &Rational, u: &Rational) -> Rational {
    Rational::from(hi - lo) * u + lo
}

impl SamplePlan {
    /// Default box for an equation.
    pub fn default_for(equation: Equation, count: usize) -> SamplePlan {
        let space = match equation {
            Equation::Heat => SpaceDomain::Interval { lo: q(0, 1), hi: q(1, 1) },
            Equation::VorticityPolar => SpaceDomain::Interval { lo: q(0, 1), hi: q(3, 2) },
            Equation::NsMomentum => SpaceDomain::Square { half: q(1, 1) },
            Equation::Divergence | Equation::Jacobian => SpaceDomain::Annulus {
                inner: q(1, 10),
                outer: q(3, 2),
            },
            Equation::PressureOde => SpaceDomain::Interval { lo: q(1, 4), hi: q(3, 2) },
            Equation::Burgers => SpaceDomain::Interval { lo: q(-1, 1), hi: q(1, 1) },
        };
        SamplePlan {
            count,
            space,
            t_lo: q(1, 2),
            t_hi: q(2, 1),
        }
    }

    fn validate(&self, cfg: &EvalConfig) -> Result<()> {
        if self.count == 0 {
            return Err(Error::invalid("samples", "sample count must be positive"));
        }
        if self.t_lo > self.t_hi {
            return Err(Error::invalid("time", "empty time range"));
        }
        cfg.check_time(&self.t_lo)?;
        match &self.space {
            SpaceDomain::Interval { lo, hi } if lo > hi => Err(Error::invalid("space", "empty interval")),
            SpaceDomain::Square { half } if half.cmp0() != Ordering::Greater => {
                Err(Error::invalid("space", "square half-width must be positive"))
            }
            SpaceDomain::Annulus { inner, outer } if inner.cmp0() == Ordering::Less || inner >= outer => {
                Err(Error::invalid("space", "annulus needs 0 ≤ inner < outer"))
            }
            _ => Ok(()),
        }
    }

    /// The first `count` accepted Halton points (bases 2, 3, 5).
    pub fn points(&self) -> Vec<SamplePoint> {
        let d = self.space.dims();
        let bases = [2u64, 3, 5];
        let mut out = Vec::with_capacity(self.count);
        let mut i = 1u64;
        while out.len() < self.count {
            let u: Vec<Rational> = (0..=d).map(|j| radical_inverse(i, bases[j])).collect();
            i += 1;
            let t = lerp(&self.t_lo, &self.t_hi, &u[d]);
            let space = match &self.space {
                SpaceDomain::Interval { lo, hi } => vec![lerp(lo, hi, &u[0])],
                SpaceDomain::Square { half } => {
                    let neg = Rational::from(-half);
                    vec![lerp(&neg, half, &u[0]), lerp(&neg, half, &u[1])]
                }
                SpaceDomain::Annulus { inner, outer } => {
                    let neg = Rational::from(-outer);
                    let p = vec![lerp(&neg, outer, &u[0]), lerp(&neg, outer, &u[1])];
                    let w = Rational::from(p[0].square_ref()) + Rational::from(p[1].square_ref());
                    if w < Rational::from(inner.square_ref()) || w > Rational::from(outer.square_ref()) {
                        continue;
                    }
                    p
                }
            };
            out.push(SamplePoint { space, t });
        }
        out
    }
}

struct Outcome {
    residual: Float,
    tolerance: Float,
    fd_estimate: Option<f64>,
}

/// `q` rounded to the nearest double.
pub fn nearest(q: &Rational) -> f64 {
    Float::with_val(53, q).to_f64()
}

fn up_f64(x: &Float) -> f64 {
    x.to_f64_round(Round::Up)
}

fn pow_q(x: &Rational, n: usize) -> Rational {
    Rational::from(x.pow(n as i32))
}

fn w_of(p: &[Rational]) -> Rational {
    p.iter().map(|c| Rational::from(c.square_ref())).sum()
}

fn f_enclosure(series: &TruncatedSeries, t: &Rational, power: u32, prec: u32) -> Result<Enclosure> {
    series.flat().value_power(t, power, prec)
}

/// `|c_N| B_{N+1}(t) w^N`: the Cauchy bound on the single-term truncation residual.
fn single_term_bound(series: &TruncatedSeries, w: &Rational, t: &Rational, prec: u32) -> Result<Float> {
    let n = series.order();
    let b = flat::derivative_tail_bound_prec(series.k(), n + 1, t, prec)?.bound;
    let c = Rational::from(series.coefficient(n).abs_ref()) * pow_q(w, n);
    Ok(arith::mul_up(&b, &arith::rational_up(&c, prec)))
}

/// `Σ_{m=N+1}^{2N} weight(m) w^m Σ_{i+j=m; i,j≤N} |b_i||b_j| B_i B_j`: bound on the part of
/// `U_N²` that a pressure of order `N+1` does not balance.
fn product_tail_bound<W>(velocity: &TruncatedSeries, w: &Rational, t: &Rational, prec: u32, weight: W) -> Result<Float>
where
    W: Fn(usize) -> Rational,
{
    let n = velocity.order();
    let bounds = flat::cauchy_bounds(velocity.k(), t, n, prec)?;
    let beta: Vec<Float> = velocity
        .coefficients()
        .iter()
        .zip(&bounds)
        .map(|(b, bb)| arith::mul_up(&arith::rational_up(&b.clone().abs(), prec), bb))
        .collect();
    let mut total = Float::with_val(prec, 0);
    for m in n + 1..=2 * n {
        let mut inner = Float::with_val(prec, 0);
        for i in m - n..=n {
            inner = arith::add_up(&inner, &arith::mul_up(&beta[i], &beta[m - i]));
        }
        let scale = Rational::from(weight(m).abs_ref()) * pow_q(w, m);
        total = arith::add_up(&total, &arith::mul_up(&inner, &arith::rational_up(&scale, prec)));
    }
    Ok(total)
}

fn residual_outcome(res: &Enclosure, bound: &Float) -> Outcome {
    let cv = res.to_certified();
    Outcome {
        residual: cv.value.clone(),
        tolerance: arith::add_up(bound, &cv.error),
        fd_estimate: None,
    }
}

fn heat_residual(s: &HeatSolution, p: &SamplePoint, prec: u32) -> Result<Outcome> {
    let series = s.series();
    let c = Coordinate::Linear(p.space[0].clone());
    let r = series.partial_sum_exact(&c, &p.t, DerivativeOrder::new(0, 1))?
        - series.partial_sum_exact(&c, &p.t, DerivativeOrder::new(2, 0))?;
    let res = f_enclosure(series, &p.t, 1, prec)?.mul_rational(&r);
    let bound = single_term_bound(series, &Rational::from(p.space[0].square_ref()), &p.t, prec)?;
    Ok(residual_outcome(&res, &bound))
}

/// `ω_t - ω_r/r - ω_rr = ω_t - 4ω_w - 4wω_ww` in `w = r²`.
fn vorticity_residual(s: &VorticitySolution, p: &SamplePoint, prec: u32) -> Result<Outcome> {
    let series = s.series();
    let w = w_of(&p.space);
    let c = Coordinate::Squared(w.clone());
    let rt = series.partial_sum_exact(&c, &p.t, DerivativeOrder::new(0, 1))?;
    let rw = series.partial_sum_exact(&c, &p.t, DerivativeOrder::new(1, 0))?;
    let rww = series.partial_sum_exact(&c, &p.t, DerivativeOrder::new(2, 0))?;
    let r = rt - rw * 4u32 - rww * Rational::from(&w * 4u32);
    let res = f_enclosure(series, &p.t, 1, prec)?.mul_rational(&r);
    let bound = single_term_bound(series, &w, &p.t, prec)?;
    Ok(residual_outcome(&res, &bound))
}

/// Norm of `u_t + u·∇u - Δu + ∇p` for `u = x^⊥U`, `w = |x|²`:
/// the tangential part is `r(U_t - 8U_w - 4wU_ww)` and the radial part `r(2p_w - U²)`.
fn momentum_residual(b: &SolutionBundle, p: &SamplePoint, prec: u32) -> Result<Outcome> {
    let vel = b.velocity.series();
    let w = w_of(&p.space);
    let c = Coordinate::Squared(w.clone());
    let u = vel.partial_sum_exact(&c, &p.t, DerivativeOrder::VALUE)?;
    let ut = vel.partial_sum_exact(&c, &p.t, DerivativeOrder::new(0, 1))?;
    let uw = vel.partial_sum_exact(&c, &p.t, DerivativeOrder::new(1, 0))?;
    let uww = vel.partial_sum_exact(&c, &p.t, DerivativeOrder::new(2, 0))?;
    let tang = ut - uw * 8u32 - uww * Rational::from(&w * 4u32);
    let pw = b.pressure.value_exact(&w, &p.t, 1)?;
    let rad = pw * 2u32 - Rational::from(u.square_ref());
    let f1 = f_enclosure(vel, &p.t, 1, prec)?;
    let f2 = f_enclosure(vel, &p.t, 2, prec)?;
    let t_enc = f1.mul_rational(&tang);
    let p_enc = f2.mul_rational(&rad);

    let tol_t = arith::add_up(&single_term_bound(vel, &w, &p.t, prec)?, &t_enc.to_certified().error);
    let tol_p = arith::add_up(
        &product_tail_bound(vel, &w, &p.t, prec, |_| Rational::from(1))?,
        &p_enc.to_certified().error,
    );
    let r_up = Float::with_val_round(prec, arith::rational_up(&w, prec).sqrt_ref(), Round::Up).0;
    let norm = |a: &Float, b: &Float| -> Float {
        let s = arith::add_up(&arith::mul_up(a, a), &arith::mul_up(b, b));
        let root = Float::with_val_round(prec, s.sqrt_ref(), Round::Up).0;
        arith::mul_up(&r_up, &root)
    };
    Ok(Outcome {
        residual: norm(&t_enc.mag_upper(), &p_enc.mag_upper()),
        tolerance: norm(&tol_t, &tol_p),
        fd_estimate: None,
    })
}

fn shifted(p: &[Rational], axis: usize, o: &Rational) -> Rational {
    let mut v = p.to_vec();
    v[axis] += o;
    w_of(&v)
}

/// Exact five-point first difference along `axis` of `g(x) · R(|x|²)`.
fn fd_axis<G, R>(p: &[Rational], axis: usize, h: &Rational, g: G, r: R) -> Result<Rational>
where
    G: Fn(&[Rational]) -> Rational,
    R: Fn(&Rational) -> Result<Rational>,
{
    let offs = Stencil::offsets(h);
    let mut vals = Vec::with_capacity(5);
    for o in &offs {
        let mut v = p.to_vec();
        v[axis] += o;
        vals.push(g(&v) * r(&shifted(p, axis, o))?);
    }
    Ok(Stencil::First.apply_exact(&vals.try_into().expect("five"), h))
}

/// `w` at the edge of the complex disc of radius `2h + δ` around `p` along `axis`.
fn disc_w(p: &[Rational], axis: usize, h: &Rational) -> Rational {
    let mut v: Vec<Rational> = p.iter().map(|c| c.clone().abs()).collect();
    v[axis] += Rational::from(h * 2u32) + cauchy_delta();
    w_of(&v)
}

fn divergence_residual(b: &SolutionBundle, p: &SamplePoint, prec: u32) -> Result<Outcome> {
    let vel = b.velocity.series();
    let h = exact_step();
    let u_r = |w: &Rational| vel.partial_sum_exact(&Coordinate::Squared(w.clone()), &p.t, DerivativeOrder::VALUE);
    let d1 = fd_axis(&p.space, 0, &h, |x| Rational::from(-&x[1]), u_r)?;
    let d2 = fd_axis(&p.space, 1, &h, |x| x[0].clone(), u_r)?;
    let res = f_enclosure(vel, &p.t, 1, prec)?.mul_rational(&(d1 + d2));
    let mut bound = Float::with_val(prec, 0);
    for axis in 0..2 {
        let other = Rational::from(p.space[1 - axis].abs_ref());
        let sup = arith::mul_up(
            &arith::rational_up(&other, prec),
            &vel.majorant(&disc_w(&p.space, axis, &h), &p.t, prec)?,
        );
        bound = arith::add_up(&bound, &Stencil::First.truncation_bound_from_disc(&h, &cauchy_delta(), &sup));
    }
    Ok(residual_outcome(&res, &bound))
}

fn jacobian_residual(b: &SolutionBundle, p: &SamplePoint, prec: u32) -> Result<Outcome> {
    let vel = b.velocity.series();
    let vort = b.vorticity.series();
    let h = exact_step();
    let w = w_of(&p.space);
    let om = |w: &Rational| vort.partial_sum_exact(&Coordinate::Squared(w.clone()), &p.t, DerivativeOrder::VALUE);
    let d1 = fd_axis(&p.space, 0, &h, |_| Rational::from(1), om)?;
    let d2 = fd_axis(&p.space, 1, &h, |_| Rational::from(1), om)?;
    let ur = vel.partial_sum_exact(&Coordinate::Squared(w), &p.t, DerivativeOrder::VALUE)?;
    let u1 = Rational::from(-&p.space[1]) * &ur;
    let u2 = Rational::from(&p.space[0] * &ur);
    let j = Rational::from(&u1 * &d1) + Rational::from(&u2 * &d2);
    let f1 = f_enclosure(vel, &p.t, 1, prec)?;
    let res = f_enclosure(vel, &p.t, 2, prec)?.mul_rational(&j);
    let mut bound = Float::with_val(prec, 0);
    for (axis, ui) in [(0usize, &u1), (1, &u2)] {
        let sup = vort.majorant(&disc_w(&p.space, axis, &h), &p.t, prec)?;
        let err = Stencil::First.truncation_bound_from_disc(&h, &cauchy_delta(), &sup);
        let umag = f1.mul_rational(ui).mag_upper();
        bound = arith::add_up(&bound, &arith::mul_up(&umag, &err));
    }
    Ok(residual_outcome(&res, &bound))
}

/// `p_rr + p_r/r - σ(2U² + 2rU∂_rU)` with `p_rr`, `p_r` from exact five-point differences in `r`.
fn pressure_ode_residual(b: &SolutionBundle, p: &SamplePoint, prec: u32) -> Result<Outcome> {
    let pressure: &PressureSolution = &b.pressure;
    let vel = b.velocity.series();
    let r = p.space[0].clone().abs();
    if r.cmp0() == Ordering::Equal {
        return Err(Error::invalid("point", "pressure-ode samples need r > 0"));
    }
    let h = exact_step();
    let offs = Stencil::offsets(&h);
    let mut vals = Vec::with_capacity(5);
    for o in &offs {
        let ro = Rational::from(&r + o);
        vals.push(pressure.value_exact(&Rational::from(ro.square_ref()), &p.t, 0)?);
    }
    let vals: [Rational; 5] = vals.try_into().expect("five");
    let lhs = Stencil::Second.apply_exact(&vals, &h) + Stencil::First.apply_exact(&vals, &h) / &r;
    let w = Rational::from(r.square_ref());
    let c = Coordinate::Squared(w.clone());
    let u = vel.partial_sum_exact(&c, &p.t, DerivativeOrder::VALUE)?;
    let uw = vel.partial_sum_exact(&c, &p.t, DerivativeOrder::new(1, 0))?;
    let rhs = (Rational::from(u.square_ref()) * 2u32 + u * uw * Rational::from(&w * 4u32)) * pressure.sign().sigma();
    let res = f_enclosure(vel, &p.t, 2, prec)?.mul_rational(&(lhs - rhs));

    let identity = product_tail_bound(vel, &w, &p.t, prec, |m| Rational::from(2 * m as u64 + 2))?;
    let reach = (&r + Rational::from(&h * 2u32)) + cauchy_delta();
    let sup = pressure.majorant(&Rational::from(reach.square_ref()), &p.t, prec)?;
    let second = Stencil::Second.truncation_bound_from_disc(&h, &cauchy_delta(), &sup);
    let first = Stencil::First.truncation_bound_from_disc(&h, &cauchy_delta(), &sup);
    let first_over_r = arith::mul_up(&first, &arith::rational_up(&Rational::from(r.recip_ref()), prec));
    let bound = arith::add_up(&identity, &arith::add_up(&second, &first_over_r));
    Ok(residual_outcome(&res, &bound))
}

/// `u_t + u u_x - u_xx` by five-point differences in `x` and `t` at step `h`.
fn burgers_fd(s: &BurgersSolution, x: &Rational, t: &Rational, h: &Rational, prec: u32) -> Result<Enclosure> {
    let offs = Stencil::offsets(h);
    let mut in_x = Vec::with_capacity(5);
    let mut in_t = Vec::with_capacity(5);
    for o in &offs {
        in_x.push(s.velocity(&Rational::from(x + o), t, prec)?);
        in_t.push(s.velocity(x, &Rational::from(t + o), prec)?);
    }
    let in_x: [Enclosure; 5] = in_x.try_into().expect("five");
    let in_t: [Enclosure; 5] = in_t.try_into().expect("five");
    let ut = Stencil::First.apply(&in_t, h);
    let ux = Stencil::First.apply(&in_x, h);
    let uxx = Stencil::Second.apply(&in_x, h);
    Ok(ut.add(&in_x[2].mul(&ux)).sub(&uxx))
}

fn burgers_residual(s: &BurgersSolution, p: &SamplePoint, prec: u32) -> Result<Outcome> {
    let x = &p.space[0];
    let h = burgers_step();
    let fine = burgers_fd(s, x, &p.t, &h, prec)?;
    let coarse = burgers_fd(s, x, &p.t, &(Rational::from(&h * 2u32)), prec)?;
    let diff = fine.sub(&coarse).mag_upper();
    let estimate = arith::div_up(&diff, &Float::with_val(prec, 15));
    let cv = fine.to_certified();
    Ok(Outcome {
        residual: cv.value,
        tolerance: Float::with_val(prec, BURGERS_TOLERANCE),
        fd_estimate: Some(up_f64(&arith::add_up(&estimate, &cv.error))),
    })
}

fn sample_from(index: usize, p: &SamplePoint, r: Result<Outcome>) -> ResidualSample {
    let point = p.space.iter().map(nearest).collect();
    let t = nearest(&p.t);
    match r {
        Ok(o) => {
            let abs = Float::with_val(o.residual.prec(), o.residual.abs_ref());
            let total = match o.fd_estimate {
                Some(e) => arith::add_up(&abs, &Float::with_val(64, e)),
                None => abs,
            };
            let pass = total <= o.tolerance;
            ResidualSample {
                index,
                point,
                t,
                residual: Some(o.residual.to_f64()),
                tolerance: Some(up_f64(&o.tolerance)),
                fd_estimate: o.fd_estimate,
                status: if pass { SampleStatus::Pass } else { SampleStatus::Fail },
                note: None,
            }
        }
        Err(e) => {
            let status = match e {
                Error::NearPole { .. } => SampleStatus::Excluded,
                ref e if e.is_inconclusive() => SampleStatus::Inconclusive,
                _ => SampleStatus::Fail,
            };
            ResidualSample {
                index,
                point,
                t,
                residual: None,
                tolerance: None,
                fd_estimate: None,
                status,
                note: Some(e.to_string()),
            }
        }
    }
}

fn verdict_of(samples: &[ResidualSample]) -> Verdict {
    let mut v = Verdict::Pass;
    let mut counted = 0;
    for s in samples {
        match s.status {
            SampleStatus::Pass => counted += 1,
            SampleStatus::Fail => v = v.combine(Verdict::Fail),
            SampleStatus::Inconclusive => v = v.combine(Verdict::Inconclusive),
            SampleStatus::Excluded => {}
        }
    }
    if counted == 0 {
        v = v.combine(Verdict::Inconclusive);
    }
    v
}

/// Runs one residual suite over a sample plan. Samples are evaluated in parallel and
/// reported in plan order.
pub fn certify_residuals(
    bundle: &SolutionBundle,
    equation: Equation,
    plan: &SamplePlan,
    cfg: &EvalConfig,
) -> Result<ResidualReport> {
    plan.validate(cfg)?;
    let needs_plane = matches!(
        equation,
        Equation::NsMomentum | Equation::Divergence | Equation::Jacobian
    );
    if needs_plane != (plan.space.dims() == 2) {
        return Err(Error::Incompatible(format!(
            "{} needs a {} sample domain",
            equation.name(),
            if needs_plane { "planar" } else { "one-dimensional" }
        )));
    }
    if equation == Equation::Burgers {
        let floor = &plan.t_lo - Rational::from(&burgers_step() * 4u32);
        cfg.check_time(&floor)?;
    }
    let prec = cfg.policy.initial_bits;
    let points = plan.points();
    let samples: Vec<ResidualSample> = points
        .par_iter()
        .enumerate()
        .map(|(i, p)| {
            let r = match equation {
                Equation::Heat => heat_residual(&bundle.heat, p, prec),
                Equation::VorticityPolar => vorticity_residual(&bundle.vorticity, p, prec),
                Equation::NsMomentum => momentum_residual(bundle, p, prec),
                Equation::Divergence => divergence_residual(bundle, p, prec),
                Equation::Jacobian => jacobian_residual(bundle, p, prec),
                Equation::PressureOde => pressure_ode_residual(bundle, p, prec),
                Equation::Burgers => burgers_residual(&bundle.burgers, p, prec),
            };
            sample_from(i, p, r)
        })
        .collect();
    Ok(ResidualReport {
        equation,
        verdict: verdict_of(&samples),
        samples,
        metadata: ReportMetadata::of(bundle, cfg),
    })
}

/// A solution handed to the limit, growth and distinctness checks.
#[derive(Debug, Clone, Copy)]
pub enum SolutionRef<'a> {
    Heat(&'a HeatSolution),
    Vorticity(&'a VorticitySolution),
    Velocity(&'a VelocitySolution),
    Pressure(&'a PressureSolution),
    Burgers(&'a BurgersSolution),
}

impl SolutionRef<'_> {
    pub fn family(&self) -> &'static str {
        match self {
            SolutionRef::Heat(_) => "heat",
            SolutionRef::Vorticity(_) => "vorticity",
            SolutionRef::Velocity(_) => "velocity",
            SolutionRef::Pressure(_) => "pressure",
            SolutionRef::Burgers(_) => "burgers",
        }
    }

    fn planar(&self) -> bool {
        matches!(
            self,
            SolutionRef::Vorticity(_) | SolutionRef::Velocity(_) | SolutionRef::Pressure(_)
        )
    }

    /// Certified components of the solution at a point on the positive first axis
    /// (`x` on the line, `(ρ, 0)` in the plane).
    fn components(&self, rho: &Rational, t: &Rational, target: Target, cfg: &EvalConfig) -> Result<Vec<CertifiedValue>> {
        let prec = cfg.policy.initial_bits;
        let point = [rho.clone(), Rational::new()];
        match self {
            SolutionRef::Heat(s) => Ok(vec![s.value(rho, t, target, cfg)?]),
            SolutionRef::Vorticity(s) => Ok(vec![s.value(rho, t, target, cfg)?]),
            SolutionRef::Velocity(s) => Ok(s.velocity(&point, t, target, cfg)?.to_vec()),
            SolutionRef::Pressure(s) => {
                cfg.check_time(t)?;
                Ok(vec![s.value(&point, t, prec)?.to_certified()])
            }
            SolutionRef::Burgers(s) => {
                cfg.check_time(t)?;
                Ok(vec![s.velocity(rho, t, prec)?.to_certified()])
            }
        }
    }

    /// Enclosure of `|u|` at `ρ` (Euclidean norm for vector fields).
    fn magnitude(&self, rho: &Rational, t: &Rational, cfg: &EvalConfig) -> Result<(Float, Float)> {
        let prec = cfg.policy.initial_bits;
        let target = Target {
            absolute: Some(1e-300),
            relative: Some(LADDER_RELATIVE_TARGET),
        };
        let (lo, hi) = match self {
            SolutionRef::Velocity(s) => {
                // |u(ρ,0)| = |ρ|·|U|
                let u = s.profile(&[rho.clone(), Rational::new()], t, target, cfg)?;
                let a = arith::rational_up(&Rational::from(rho.abs_ref()), prec);
                let a_lo = arith::rational_down(&Rational::from(rho.abs_ref()), prec);
                (
                    Float::with_val_round(prec, &a_lo * &u.lower_magnitude(), Round::Down).0,
                    arith::mul_up(&a, &u.upper_magnitude()),
                )
            }
            other => {
                let v = other.components(rho, t, target, cfg)?.remove(0);
                (v.lower_magnitude(), v.upper_magnitude())
            }
        };
        Ok((lo, hi))
    }

    /// Scalar density paired with the bump: the solution itself on the line; `r·ω`, `r·p`
    /// and `r³U` (the pairing of `u` with `x^⊥ φ`) in the plane, up to the factor `2π`.
    fn pairing_density(&self, rho: &Rational, t: &Rational, cfg: &EvalConfig) -> Result<CertifiedValue> {
        let target = Target {
            absolute: Some(1e-300),
            relative: Some(LADDER_RELATIVE_TARGET),
        };
        let weight = match self {
            SolutionRef::Heat(_) | SolutionRef::Burgers(_) => Rational::from(1),
            SolutionRef::Vorticity(_) | SolutionRef::Pressure(_) => rho.clone(),
            SolutionRef::Velocity(_) => pow_q(rho, 3),
        };
        let v = match self {
            SolutionRef::Velocity(s) => s.profile(&[rho.clone(), Rational::new()], t, target, cfg)?,
            other => other.components(rho, t, target, cfg)?.remove(0),
        };
        Ok(v.enclosure().mul_rational(&weight).to_certified())
    }
}

/// Sup-norm ladder entry: `[lower, upper]` bounds on `max |u|` over the grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LadderEntry {
    pub t: f64,
    pub sup_lower: f64,
    pub sup_upper: f64,
    pub pairing: f64,
    pub pairing_error: f64,
}

/// Parameters of the initial-limit ladder `t_j = t_start · 2^{-j}`, `j = 0..=steps`.
#[derive(Debug, Clone, PartialEq)]
pub struct LimitPlan {
    pub radius: Rational,
    pub t_start: Rational,
    pub steps: u32,
    pub threshold: f64,
    pub grid_points: usize,
    pub quadrature_order: usize,
}

impl LimitPlan {
    pub fn new(radius: Rational, t_start: Rational, steps: u32, threshold: f64) -> Self {
        LimitPlan {
            radius,
            t_start,
            steps,
            threshold,
            grid_points: 41,
            quadrature_order: 32,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitReport {
    pub family: String,
    pub radius: f64,
    pub threshold: f64,
    pub grid_points: usize,
    pub ladder: Vec<LadderEntry>,
    pub strictly_decreasing: bool,
    pub final_below_threshold: bool,
    pub pairing_below_threshold: bool,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

fn grid(plan: &LimitPlan, planar: bool) -> Vec<Rational> {
    let n = plan.grid_points.max(2);
    // On the line the grid spans [-R, R]; radial fields only need [0, R].
    let lo = if planar { Rational::new() } else { Rational::from(-&plan.radius) };
    (0..n)
        .map(|i| lerp(&lo, &plan.radius, &Rational::from((i as i64, (n - 1) as i64))))
        .collect()
}

fn ladder_entry(sol: &SolutionRef, plan: &LimitPlan, t: &Rational, cfg: &EvalConfig) -> Result<LadderEntry> {
    let pts = grid(plan, sol.planar());
    let mags: Vec<Result<(Float, Float)>> = pts.par_iter().map(|x| sol.magnitude(x, t, cfg)).collect();
    let mut lo = Float::with_val(cfg.policy.initial_bits, 0);
    let mut hi = Float::with_val(cfg.policy.initial_bits, 0);
    for m in mags {
        let (l, h) = m?;
        if l > lo {
            lo = l;
        }
        if h > hi {
            hi = h;
        }
    }
    let radius = nearest(&plan.radius);
    let (a, b) = if sol.planar() { (0.0, radius) } else { (-radius, radius) };
    let scale = if sol.planar() { std::f64::consts::TAU } else { 1.0 };
    let pair = |order: usize| -> Result<(f64, f64)> {
        let rule = quadrature::gauss_legendre_rule(order, a, b)?;
        let vals: Vec<Result<CertifiedValue>> = rule
            .par_iter()
            .map(|(x, _)| sol.pairing_density(&arith::rational_from_f64(*x), t, cfg))
            .collect();
        let mut sum = 0.0;
        let mut err = 0.0;
        for ((x, w), v) in rule.iter().zip(vals) {
            let v = v?;
            let phi = quadrature::bump(x.abs(), radius);
            sum += w * phi * v.value_f64();
            err += w * phi * v.error_f64();
        }
        Ok((scale * sum, scale * err))
    };
    let (full, err_full) = pair(plan.quadrature_order)?;
    let (half, _) = pair((plan.quadrature_order / 2).max(1))?;
    Ok(LadderEntry {
        t: nearest(t),
        sup_lower: lo.to_f64_round(Round::Down),
        sup_upper: up_f64(&hi),
        pairing: full,
        pairing_error: err_full + (full - half).abs(),
    })
}

/// Sup-norm and test-function-pairing ladder as `t → 0⁺`.
pub fn certify_initial_limit(sol: SolutionRef, plan: &LimitPlan, cfg: &EvalConfig) -> Result<LimitReport> {
    if plan.radius.cmp0() != Ordering::Greater {
        return Err(Error::invalid("radius", "compact radius must be positive"));
    }
    if plan.quadrature_order == 0 {
        return Err(Error::invalid("quadrature-order", "must be positive"));
    }
    let last = &plan.t_start / Rational::from(rug::Integer::from(1) << plan.steps);
    cfg.check_time(&last)?;
    let times: Vec<Rational> = (0..=plan.steps)
        .map(|j| &plan.t_start / Rational::from(rug::Integer::from(1) << j))
        .collect();
    let mut ladder = Vec::new();
    let mut note = None;
    for t in &times {
        match ladder_entry(&sol, plan, t, cfg) {
            Ok(e) => ladder.push(e),
            Err(e) if e.is_inconclusive() => {
                note = Some(e.to_string());
                break;
            }
            Err(e) => return Err(e),
        }
    }
    let complete = ladder.len() == times.len();
    let strictly_decreasing = ladder.windows(2).all(|p| p[1].sup_upper < p[0].sup_lower);
    let final_below_threshold = complete && ladder.last().is_some_and(|e| e.sup_upper < plan.threshold);
    let pairing_below_threshold =
        complete && ladder.last().is_some_and(|e| e.pairing.abs() + e.pairing_error < plan.threshold);
    let verdict = if !complete {
        Verdict::Inconclusive
    } else if strictly_decreasing && final_below_threshold && pairing_below_threshold {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    Ok(LimitReport {
        family: sol.family().to_string(),
        radius: nearest(&plan.radius),
        threshold: plan.threshold,
        grid_points: plan.grid_points,
        ladder,
        strictly_decreasing,
        final_below_threshold,
        pairing_below_threshold,
        verdict,
        note,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthEntry {
    pub radius: f64,
    pub ratio_lower: f64,
    pub ratio_upper: f64,
}

/// Finite-ladder evidence for super-polynomial growth: `|u(x,t)|/|x|^N` at increasing radii.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthReport {
    pub family: String,
    pub t: f64,
    pub exponent: u32,
    pub label: String,
    pub ladder: Vec<GrowthEntry>,
    pub strictly_increasing: bool,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

pub fn certify_growth(
    sol: SolutionRef,
    t: &Rational,
    exponent: u32,
    radii: &[Rational],
    cfg: &EvalConfig,
) -> Result<GrowthReport> {
    if radii.len() < 2 {
        return Err(Error::invalid("radii", "ladder too short for a monotonicity verdict (need ≥ 2 radii)"));
    }
    if radii.iter().any(|r| r.cmp0() != Ordering::Greater) || radii.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid("radii", "radii must be positive and strictly increasing"));
    }
    cfg.check_time(t)?;
    let prec = cfg.policy.initial_bits;
    let mags: Vec<Result<(Float, Float)>> = radii.par_iter().map(|r| sol.magnitude(r, t, cfg)).collect();
    let mut ladder = Vec::new();
    let mut note = None;
    for (r, m) in radii.iter().zip(mags) {
        match m {
            Ok((lo, hi)) => {
                let p = pow_q(r, exponent as usize);
                let lo = Float::with_val_round(prec, &lo / &arith::rational_up(&p, prec), Round::Down).0;
                let hi = arith::div_up(&hi, &arith::rational_down(&p, prec));
                ladder.push(GrowthEntry {
                    radius: nearest(r),
                    ratio_lower: lo.to_f64_round(Round::Down),
                    ratio_upper: up_f64(&hi),
                });
            }
            Err(e) if e.is_inconclusive() => {
                note = Some(e.to_string());
                break;
            }
            Err(e) => return Err(e),
        }
    }
    let complete = ladder.len() == radii.len();
    let strictly_increasing = ladder.windows(2).all(|p| p[0].ratio_upper < p[1].ratio_lower);
    let verdict = match (complete, strictly_increasing) {
        (false, _) => Verdict::Inconclusive,
        (true, true) => Verdict::Pass,
        (true, false) => Verdict::Fail,
    };
    Ok(GrowthReport {
        family: sol.family().to_string(),
        t: nearest(t),
        exponent,
        label: "finite-ladder monotonicity".to_string(),
        ladder,
        strictly_increasing,
        verdict,
        note,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistinctnessReport {
    pub family: String,
    pub witness: Vec<f64>,
    pub t: f64,
    pub values_a: Vec<f64>,
    pub errors_a: Vec<f64>,
    pub values_b: Vec<f64>,
    pub errors_b: Vec<f64>,
    /// `max_i (|a_i - b_i| - err_a_i - err_b_i)`; positive exactly when separated.
    pub margin: f64,
    pub verdict: Verdict,
}

/// Relative accuracy of witness evaluations.
const WITNESS_TARGET: f64 = 1e-30;

/// Certifies `A ≠ B` at a witness point: pass iff some component's enclosures are disjoint.
pub fn certify_distinctness(
    a: SolutionRef,
    b: SolutionRef,
    witness: &[Rational],
    t: &Rational,
    cfg: &EvalConfig,
) -> Result<DistinctnessReport> {
    if a.family() != b.family() {
        return Err(Error::Incompatible(format!(
            "cannot compare {} with {}",
            a.family(),
            b.family()
        )));
    }
    let eval = |s: &SolutionRef| -> Result<Vec<CertifiedValue>> {
        let target = Target {
            absolute: Some(1e-300),
            relative: Some(WITNESS_TARGET),
        };
        match (s, witness) {
            (SolutionRef::Velocity(v), [x1, x2]) => Ok(v.velocity(&[x1.clone(), x2.clone()], t, target, cfg)?.to_vec()),
            (SolutionRef::Vorticity(v), [x1, x2]) => Ok(vec![v.value_at(&[x1.clone(), x2.clone()], t, target, cfg)?]),
            (SolutionRef::Pressure(p), [x1, x2]) => {
                Ok(vec![p.value(&[x1.clone(), x2.clone()], t, cfg.policy.initial_bits)?.to_certified()])
            }
            (_, [x]) if !s.planar() => s.components(x, t, target, cfg),
            _ => Err(Error::invalid("witness", "witness dimension does not match the family")),
        }
    };
    let va = eval(&a)?;
    let vb = eval(&b)?;
    let prec = cfg.policy.initial_bits;
    let mut margin = Float::with_val(prec, f64::NEG_INFINITY);
    let mut separated = false;
    for (x, y) in va.iter().zip(&vb) {
        separated |= x.separated_from(y);
        let d = Float::with_val_round(prec, &x.value - &y.value, Round::Down).0.abs();
        let e = arith::add_up(&x.error, &y.error);
        let m = Float::with_val_round(prec, &d - &e, Round::Down).0;
        if m > margin {
            margin = m;
        }
    }
    let identical = va == vb;
    let verdict = if separated {
        Verdict::Pass
    } else if identical {
        Verdict::Fail
    } else {
        Verdict::Inconclusive
    };
    let f = |v: &[CertifiedValue]| -> (Vec<f64>, Vec<f64>) {
        (v.iter().map(CertifiedValue::value_f64).collect(), v.iter().map(CertifiedValue::error_f64).collect())
    };
    let (values_a, errors_a) = f(&va);
    let (values_b, errors_b) = f(&vb);
    Ok(DistinctnessReport {
        family: a.family().to_string(),
        witness: witness.iter().map(nearest).collect(),
        t: nearest(t),
        values_a,
        errors_a,
        values_b,
        errors_b,
        margin: margin.to_f64_round(Round::Down),
        verdict,
    })
}

/// Exact flat factor used when callers need `f_k(t)` alongside a report.
pub fn flat_value(k: u32, t: &Rational, prec: u32) -> Result<Enclosure> {
    FlatFamily::new(k)?.value_power(t, 1, prec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solutions::BundleSpec;

    #[test]
    fn halton_points_are_deterministic_and_inside() {
        let plan = SamplePlan::default_for(Equation::Jacobian, 20);
        let a = plan.points();
        assert_eq!(a, plan.points());
        assert_eq!(a.len(), 20);
        for p in &a {
            let w = w_of(&p.space);
            assert!(w >= q(1, 100) && w <= q(9, 4));
            assert!(p.t >= q(1, 2) && p.t <= q(2, 1));
        }
        assert_eq!(radical_inverse(1, 2), q(1, 2));
        assert_eq!(radical_inverse(6, 2), q(3, 8));
    }

    #[test]
    fn verdicts_combine() {
        assert_eq!(Verdict::Pass.combine(Verdict::Inconclusive), Verdict::Inconclusive);
        assert_eq!(Verdict::Inconclusive.combine(Verdict::Fail), Verdict::Fail);
        assert_eq!("ns-momentum".parse::<Equation>().unwrap(), Equation::NsMomentum);
        assert!("bogus".parse::<Equation>().is_err());
    }

    #[test]
    fn heat_suite_passes_small() {
        let b = SolutionBundle::new(BundleSpec::new(1, q(1, 1), 12)).unwrap();
        let plan = SamplePlan::default_for(Equation::Heat, 4);
        let r = certify_residuals(&b, Equation::Heat, &plan, &EvalConfig::default()).unwrap();
        assert_eq!(r.verdict, Verdict::Pass, "{r:?}");
    }

    #[test]
    fn short_growth_ladder_is_rejected() {
        let b = SolutionBundle::new(BundleSpec::new(1, q(1, 1), 4)).unwrap();
        let r = certify_growth(SolutionRef::Heat(&b.heat), &q(1, 1), 4, &[q(2, 1)], &EvalConfig::default());
        assert!(matches!(r, Err(Error::InvalidParameter { .. })));
    }
}

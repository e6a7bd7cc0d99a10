//! Concrete solution objects: heat solutions on the line, the radial vorticity, velocity
//! and pressure of the planar Navier-Stokes family, and Burgers solutions by Cole-Hopf.

use std::cmp::Ordering;

use rug::{Float, Rational};
use serde::{Deserialize, Serialize};

use crate::arith::{self, CertifiedValue, Enclosure};
use crate::coeffs::{CoefficientFamily, Recursion};
use crate::error::{Error, Result};
use crate::flat::{self, DerivativeTable, FlatFamily};
use crate::quadrature;
use crate::series::{Coordinate, DerivativeOrder, EvalConfig, Target, TruncatedSeries};

/// Minimum `|φ|` accepted by the Cole-Hopf quotient.
pub const POLE_GUARD: f64 = 1e-6;

/// Requested relative tolerance of the Biot-Savart quadrature.
pub const BIOT_SAVART_REL_TOL: f64 = 1e-10;

const BIOT_SAVART_MAX_PANELS: usize = 4096;

fn square(q: &Rational) -> Rational {
    Rational::from(q.square_ref())
}

/// `u(x,t) = Σ f^{(n)}(t) x^{2n}/(2n)!`.
#[derive(Debug, Clone)]
pub struct HeatSolution {
    series: TruncatedSeries,
}

pub fn make_heat_solution(k: u32, order: usize) -> Result<HeatSolution> {
    Ok(HeatSolution {
        series: TruncatedSeries::new(CoefficientFamily::Heat, k, Rational::from(1), order)?,
    })
}

impl HeatSolution {
    pub fn series(&self) -> &TruncatedSeries {
        &self.series
    }

    pub fn k(&self) -> u32 {
        self.series.k()
    }

    pub fn order(&self) -> usize {
        self.series.order()
    }

    /// Certified value of the full series at `(x, t)`.
    pub fn value(&self, x: &Rational, t: &Rational, target: Target, cfg: &EvalConfig) -> Result<CertifiedValue> {
        self.series.evaluate(&Coordinate::Linear(x.clone()), t, target, cfg)
    }

    pub fn derivative(
        &self,
        x: &Rational,
        t: &Rational,
        d: DerivativeOrder,
        target: Target,
        cfg: &EvalConfig,
    ) -> Result<CertifiedValue> {
        self.series
            .evaluate_derivative(&Coordinate::Linear(x.clone()), t, d, target, cfg)
    }

    /// Enclosure of the truncated partial sum (or one of its derivatives).
    pub fn partial(&self, x: &Rational, t: &Rational, d: DerivativeOrder, prec: u32) -> Result<Enclosure> {
        self.series.partial_sum(&Coordinate::Linear(x.clone()), t, d, prec)
    }
}

/// `ω(r,t) = Σ a_n f^{(n)}(t) r^{2n}`.
#[derive(Debug, Clone)]
pub struct VorticitySolution {
    series: TruncatedSeries,
    recursion: Recursion,
}

pub fn make_vorticity_solution(k: u32, a0: &Rational, order: usize) -> Result<VorticitySolution> {
    make_vorticity_solution_with(Recursion::default(), k, a0, order)
}

pub fn make_vorticity_solution_with(
    recursion: Recursion,
    k: u32,
    a0: &Rational,
    order: usize,
) -> Result<VorticitySolution> {
    Ok(VorticitySolution {
        series: TruncatedSeries::new(CoefficientFamily::Vorticity(recursion), k, a0.clone(), order)?,
        recursion,
    })
}

impl VorticitySolution {
    pub fn series(&self) -> &TruncatedSeries {
        &self.series
    }

    pub fn recursion(&self) -> Recursion {
        self.recursion
    }

    pub fn value(&self, r: &Rational, t: &Rational, target: Target, cfg: &EvalConfig) -> Result<CertifiedValue> {
        self.series.evaluate(&Coordinate::Linear(r.clone()), t, target, cfg)
    }

    pub fn value_at(&self, x: &[Rational; 2], t: &Rational, target: Target, cfg: &EvalConfig) -> Result<CertifiedValue> {
        self.series.evaluate(&Coordinate::plane(x), t, target, cfg)
    }
}

/// `u(x,t) = x^⊥ U(|x|,t)` with `U = Σ a_n/(2(n+1)) f^{(n)}(t) r^{2n}`.
#[derive(Debug, Clone)]
pub struct VelocitySolution {
    series: TruncatedSeries,
    recursion: Recursion,
}

pub fn make_velocity_solution(k: u32, a0: &Rational, order: usize) -> Result<VelocitySolution> {
    make_velocity_solution_with(Recursion::default(), k, a0, order)
}

pub fn make_velocity_solution_with(
    recursion: Recursion,
    k: u32,
    a0: &Rational,
    order: usize,
) -> Result<VelocitySolution> {
    Ok(VelocitySolution {
        series: TruncatedSeries::new(CoefficientFamily::Velocity(recursion), k, a0.clone(), order)?,
        recursion,
    })
}

/// `x^⊥ = (-x₂, x₁)`.
pub fn perp(x: &[Rational; 2]) -> [Rational; 2] {
    [Rational::from(-&x[1]), x[0].clone()]
}

fn scale_certified(v: &CertifiedValue, q: &Rational) -> CertifiedValue {
    v.enclosure().mul_rational(q).to_certified()
}

impl VelocitySolution {
    pub fn series(&self) -> &TruncatedSeries {
        &self.series
    }

    pub fn recursion(&self) -> Recursion {
        self.recursion
    }

    /// Certified scalar profile `U(|x|, t)`.
    pub fn profile(&self, x: &[Rational; 2], t: &Rational, target: Target, cfg: &EvalConfig) -> Result<CertifiedValue> {
        self.series.evaluate(&Coordinate::plane(x), t, target, cfg)
    }

    /// Certified components of `u(x,t) = x^⊥ U`.
    pub fn velocity(
        &self,
        x: &[Rational; 2],
        t: &Rational,
        target: Target,
        cfg: &EvalConfig,
    ) -> Result<[CertifiedValue; 2]> {
        let u = self.profile(x, t, target, cfg)?;
        let p = perp(x);
        Ok([scale_certified(&u, &p[0]), scale_certified(&u, &p[1])])
    }

    /// Exact `R` with partial-sum `∂_w^m ∂_t^j U = R · f_k(t)` at `w = |x|²`.
    pub fn profile_exact(&self, x: &[Rational; 2], t: &Rational, d: DerivativeOrder) -> Result<Rational> {
        self.series.partial_sum_exact(&Coordinate::plane(x), t, d)
    }
}

/// Sign convention for the pressure identification.
///
/// `Stated` solves `p_rr + p_r/r = -2U² - 2rU∂_rU`, giving `d_{m+1} = -c_m/(2(m+1))`.
/// `Momentum` solves `p_rr + p_r/r = 2U² + 2rU∂_rU = -div(u·∇u)`, the Poisson equation
/// implied by the momentum equation, giving `d_{m+1} = c_m/(2(m+1))`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PressureSign {
    Stated,
    #[default]
    Momentum,
}

impl PressureSign {
    pub fn name(self) -> &'static str {
        match self {
            PressureSign::Stated => "stated",
            PressureSign::Momentum => "momentum",
        }
    }

    /// `σ` with `p_rr + p_r/r = σ (2U² + 2rU∂_rU)`.
    pub fn sigma(self) -> i32 {
        match self {
            PressureSign::Stated => -1,
            PressureSign::Momentum => 1,
        }
    }
}

impl std::str::FromStr for PressureSign {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "stated" => Ok(PressureSign::Stated),
            "momentum" => Ok(PressureSign::Momentum),
            other => Err(Error::invalid(
                "pressure-sign",
                format!("unknown pressure sign `{other}` (expected stated or momentum)"),
            )),
        }
    }
}

/// `p(r,t) = Σ_{m=1}^{M} d_m(t) r^{2m}` with `d_0 = 0` and
/// `d_{m+1} = σ c_m/(2(m+1))`, `c_m = Σ_{i+j=m} b_i b_j f^{(i)} f^{(j)}`.
#[derive(Debug, Clone)]
pub struct PressureSolution {
    order: usize,
    sign: PressureSign,
    velocity: TruncatedSeries,
}

/// Pressure under the stated identification `d_{m+1} = -c_m/(2(m+1))`.
pub fn make_pressure_solution(k: u32, a0: &Rational, order: usize) -> Result<PressureSolution> {
    make_pressure_solution_with(PressureSign::Stated, Recursion::default(), k, a0, order)
}

pub fn make_pressure_solution_with(
    sign: PressureSign,
    recursion: Recursion,
    k: u32,
    a0: &Rational,
    order: usize,
) -> Result<PressureSolution> {
    let velocity = TruncatedSeries::new(
        CoefficientFamily::Velocity(recursion),
        k,
        a0.clone(),
        order.saturating_sub(1),
    )?;
    Ok(PressureSolution { order, sign, velocity })
}

impl PressureSolution {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn sign(&self) -> PressureSign {
        self.sign
    }

    pub fn k(&self) -> u32 {
        self.velocity.k()
    }

    pub fn a0(&self) -> &Rational {
        self.velocity.a0()
    }

    /// `d_m(t) = Σ coeff · f^{(i)}(t) f^{(j)}(t)` over the returned `(i, j, coeff)`, `i ≤ j`.
    pub fn bilinear_terms(&self, m: usize) -> Vec<(usize, usize, Rational)> {
        if m == 0 || m > self.order {
            return Vec::new();
        }
        let b = self.velocity.coefficients();
        let scale = Rational::from((self.sign.sigma(), 2 * m as i64));
        let c = m - 1;
        let mut out = Vec::new();
        for i in 0..=c / 2 {
            let j = c - i;
            let mult = if i == j { 1 } else { 2 };
            let coeff = Rational::from(&b[i] * &b[j]) * mult * &scale;
            out.push((i, j, coeff));
        }
        out
    }

    /// Exact `D_0, ..., D_M` with `d_m(t) = D_m · f_k(t)²`.
    pub fn coefficients_exact(&self, t: &Rational) -> Result<Vec<Rational>> {
        let s = flat::inverse_time(t)?;
        let q = DerivativeTable::for_family(self.velocity.flat()).values_at(&s, self.order.saturating_sub(1))?;
        let mut out = vec![Rational::new()];
        for m in 1..=self.order {
            let mut acc = Rational::new();
            for (i, j, coeff) in self.bilinear_terms(m) {
                acc += Rational::from(&q[i] * &q[j]) * coeff;
            }
            out.push(acc);
        }
        Ok(out)
    }

    /// Enclosure of `d_m(t)`.
    pub fn coefficient(&self, m: usize, t: &Rational, prec: u32) -> Result<Enclosure> {
        let d = self.coefficients_exact(t)?;
        let r = d.get(m).cloned().unwrap_or_default();
        Ok(FlatFamily::new(self.k())?.value_power(t, 2, prec)?.mul_rational(&r))
    }

    /// Exact `R` with `∂_w^m p = R · f_k(t)²` at `w = r²`.
    pub fn value_exact(&self, w: &Rational, t: &Rational, m: u32) -> Result<Rational> {
        let d = self.coefficients_exact(t)?;
        let mut acc = Rational::new();
        for (n, dn) in d.iter().enumerate().skip(m as usize) {
            let n = n as u32;
            let pw = Rational::from(rug::ops::Pow::pow(w, (n - m) as i32));
            acc += Rational::from(dn * &pw) * arith::falling(n, m);
        }
        Ok(acc)
    }

    /// Enclosure of `p(x,t)`.
    pub fn value(&self, x: &[Rational; 2], t: &Rational, prec: u32) -> Result<Enclosure> {
        let w = square(&x[0]) + square(&x[1]);
        let r = self.value_exact(&w, t, 0)?;
        Ok(FlatFamily::new(self.k())?.value_power(t, 2, prec)?.mul_rational(&r))
    }

    /// Enclosures of `∇p = 2x ∂_w p`.
    pub fn gradient(&self, x: &[Rational; 2], t: &Rational, prec: u32) -> Result<[Enclosure; 2]> {
        let w = square(&x[0]) + square(&x[1]);
        let pw = self.value_exact(&w, t, 1)?;
        let f2 = FlatFamily::new(self.k())?.value_power(t, 2, prec)?;
        Ok([
            f2.mul_rational(&(Rational::from(&pw * &x[0]) * 2u32)),
            f2.mul_rational(&(Rational::from(&pw * &x[1]) * 2u32)),
        ])
    }

    /// Upper bound on `sup_{|z|² ≤ w} |p(z,t)|` over complex `z`, from the Cauchy bounds
    /// on each `f^{(i)}`.
    pub fn majorant(&self, w: &Rational, t: &Rational, prec: u32) -> Result<Float> {
        let bounds = flat::cauchy_bounds(self.k(), t, self.order, prec)?;
        let w = Rational::from(w.abs_ref());
        let mut total = Float::with_val(prec, 0);
        for m in 1..=self.order {
            let mut dm = Float::with_val(prec, 0);
            for (i, j, coeff) in self.bilinear_terms(m) {
                let c = arith::rational_up(&coeff.abs(), prec);
                dm = arith::add_up(&dm, &arith::mul_up(&c, &arith::mul_up(&bounds[i], &bounds[j])));
            }
            let pw = arith::rational_up(&Rational::from(rug::ops::Pow::pow(&w, m as i32)), prec);
            total = arith::add_up(&total, &arith::mul_up(&dm, &pw));
        }
        Ok(total)
    }
}

/// Burgers solution `u = -2φ_x/φ` with `φ = 1 + φ̃` and `φ̃` a truncated heat solution.
#[derive(Debug, Clone)]
pub struct BurgersSolution {
    heat: Option<TruncatedSeries>,
    guard: f64,
}

pub fn make_burgers_solution(k: u32, order: usize) -> Result<BurgersSolution> {
    Ok(BurgersSolution {
        heat: Some(TruncatedSeries::new(CoefficientFamily::Heat, k, Rational::from(1), order)?),
        guard: POLE_GUARD,
    })
}

impl BurgersSolution {
    /// The branch `φ̃ ≡ 0`, for which `u ≡ 0`.
    pub fn trivial() -> Self {
        BurgersSolution {
            heat: None,
            guard: POLE_GUARD,
        }
    }

    pub fn with_guard(mut self, guard: f64) -> Self {
        self.guard = guard;
        self
    }

    pub fn guard(&self) -> f64 {
        self.guard
    }

    pub fn heat(&self) -> Option<&TruncatedSeries> {
        self.heat.as_ref()
    }

    pub fn k(&self) -> Option<u32> {
        self.heat.as_ref().map(TruncatedSeries::k)
    }

    /// Enclosure of `φ = 1 + φ̃`.
    pub fn phi(&self, x: &Rational, t: &Rational, prec: u32) -> Result<Enclosure> {
        let one = Enclosure::from_rational(&Rational::from(1), prec);
        match &self.heat {
            None => Ok(one),
            Some(h) => Ok(one.add(&h.partial_sum(&Coordinate::Linear(x.clone()), t, DerivativeOrder::VALUE, prec)?)),
        }
    }

    /// Enclosure of `u(x,t)`; fails with [`Error::NearPole`] where `|φ|` may fall below the guard.
    pub fn velocity(&self, x: &Rational, t: &Rational, prec: u32) -> Result<Enclosure> {
        let Some(h) = &self.heat else {
            return Ok(Enclosure::zero(prec));
        };
        let coord = Coordinate::Linear(x.clone());
        let f = h.flat().value_power(t, 1, prec)?;
        let r0 = h.partial_sum_exact(&coord, t, DerivativeOrder::VALUE)?;
        let r1 = h.partial_sum_exact(&coord, t, DerivativeOrder::new(1, 0))?;
        let phi = Enclosure::from_rational(&Rational::from(1), prec).add(&f.mul_rational(&r0));
        let lower = phi.mag_lower();
        if lower < self.guard {
            return Err(Error::NearPole {
                x: x.to_f64(),
                t: t.to_f64(),
                magnitude: phi.midpoint().to_f64().abs(),
                guard: self.guard,
            });
        }
        let num = f.mul_rational(&(r1 * -2i32));
        Ok(num.div(&phi).expect("guard excludes zero"))
    }
}

/// Velocity produced by the radial Biot-Savart law, with an error bound on `|u|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BiotSavartVelocity {
    pub velocity: [f64; 2],
    pub error: f64,
    pub evaluations: usize,
}

/// `u = (x^⊥/r²) ∫_0^r s ω(s) ds` for an arbitrary radial profile `ω(s)`.
pub fn biot_savart_profile<F>(mut omega: F, x: [f64; 2], rel_tol: f64) -> Result<BiotSavartVelocity>
where
    F: FnMut(f64) -> Result<f64>,
{
    let r = x[0].hypot(x[1]);
    if r == 0.0 {
        return Ok(BiotSavartVelocity {
            velocity: [0.0, 0.0],
            error: 0.0,
            evaluations: 0,
        });
    }
    let q = quadrature::adaptive_gauss_kronrod(|s| Ok(s * omega(s)?), 0.0, r, rel_tol, 0.0, BIOT_SAVART_MAX_PANELS)?;
    let r2 = r * r;
    Ok(BiotSavartVelocity {
        velocity: [-x[1] * q.value / r2, x[0] * q.value / r2],
        error: q.error / r,
        evaluations: q.evaluations,
    })
}

/// Radial Biot-Savart velocity for a vorticity solution, using its truncated series as the
/// integrand. The error covers quadrature, the series tail at radius `|x|`, and the
/// floating-point evaluation of the integrand.
pub fn biot_savart_radial(
    omega: &VorticitySolution,
    x: [f64; 2],
    t: &Rational,
    cfg: &EvalConfig,
) -> Result<BiotSavartVelocity> {
    cfg.check_time(t)?;
    let r = x[0].hypot(x[1]);
    let prec = cfg.policy.initial_bits;
    let series = omega.series();
    let s = flat::inverse_time(t)?;
    let q = DerivativeTable::for_family(series.flat()).values_at(&s, series.order())?;
    let f = series.flat().value_power(t, 1, prec)?;
    let coeffs: Vec<f64> = series
        .coefficients()
        .iter()
        .zip(&q)
        .map(|(a, qn)| f.mul_rational(&Rational::from(a * qn)).midpoint().to_f64())
        .collect();
    let profile = |rho: f64| -> Result<f64> {
        let w = rho * rho;
        Ok(coeffs.iter().rev().fold(0.0, |acc, c| acc * w + c))
    };
    let mut out = biot_savart_profile(profile, x, BIOT_SAVART_REL_TOL)?;
    if r > 0.0 {
        let rq = arith::rational_from_f64(r);
        let tail = series.tail_bound(&Coordinate::Linear(rq.clone()), t, DerivativeOrder::VALUE, prec)?;
        let major = series.majorant(&square(&rq), t, prec)?;
        let eps = (4 * (coeffs.len() + 2)) as f64 * f64::EPSILON;
        // ∫_0^r s·e ds = e r²/2 for a pointwise integrand error e, then divided by r.
        let extra = (tail.bound.to_f64_round(rug::float::Round::Up) + eps * major.to_f64_round(rug::float::Round::Up)) * r / 2.0;
        out.error += extra;
    }
    Ok(out)
}

/// Parameters shared by every member of a Navier-Stokes/heat/Burgers bundle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BundleSpec {
    pub k: u32,
    #[serde(with = "rational_string")]
    pub a0: Rational,
    pub order: usize,
    pub pressure_order: usize,
    pub recursion: Recursion,
    pub pressure_sign: PressureSign,
}

impl BundleSpec {
    /// Spec with the pressure truncation tied to the velocity truncation, `M = N + 1`.
    pub fn new(k: u32, a0: Rational, order: usize) -> Self {
        BundleSpec {
            k,
            a0,
            order,
            pressure_order: order + 1,
            recursion: Recursion::default(),
            pressure_sign: PressureSign::default(),
        }
    }

    pub fn nominal_pressure_order(&self) -> usize {
        self.order + 1
    }
}

/// Serializes rationals as `"p/q"` strings.
pub mod rational_string {
    use rug::Rational;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(q: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&q.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        crate::arith::parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

/// All solutions built from one [`BundleSpec`].
#[derive(Debug, Clone)]
pub struct SolutionBundle {
    pub spec: BundleSpec,
    pub heat: HeatSolution,
    pub vorticity: VorticitySolution,
    pub velocity: VelocitySolution,
    pub pressure: PressureSolution,
    pub burgers: BurgersSolution,
}

impl SolutionBundle {
    pub fn new(spec: BundleSpec) -> Result<Self> {
        if spec.a0.cmp0() != Ordering::Greater {
            return Err(Error::invalid("a0", "scale must be a positive rational"));
        }
        Ok(SolutionBundle {
            heat: make_heat_solution(spec.k, spec.order)?,
            vorticity: make_vorticity_solution_with(spec.recursion, spec.k, &spec.a0, spec.order)?,
            velocity: make_velocity_solution_with(spec.recursion, spec.k, &spec.a0, spec.order)?,
            pressure: make_pressure_solution_with(
                spec.pressure_sign,
                spec.recursion,
                spec.k,
                &spec.a0,
                spec.pressure_order,
            )?,
            burgers: make_burgers_solution(spec.k, spec.order)?,
            spec,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: i64, d: i64) -> Rational {
        Rational::from((p, d))
    }

    #[test]
    fn velocity_vanishes_at_origin() {
        let u = make_velocity_solution(1, &q(1, 1), 20).unwrap();
        let v = u
            .velocity(&[q(0, 1), q(0, 1)], &q(1, 1), Target::absolute(1e-30), &EvalConfig::default())
            .unwrap();
        assert_eq!(v[0].value_f64(), 0.0);
        assert_eq!(v[1].value_f64(), 0.0);
    }

    #[test]
    fn first_pressure_coefficient() {
        for a0 in [q(1, 1), q(2, 1), q(7, 3)] {
            let p = make_pressure_solution(1, &a0, 4).unwrap();
            let d = p.coefficients_exact(&q(1, 1)).unwrap();
            assert_eq!(d[0], q(0, 1));
            // d_1 = -(a0/2)² f² / 2 and Q_0 = 1.
            let half = Rational::from(&a0 / 2u32);
            let expected = -Rational::from(half.square_ref()) / 2;
            assert_eq!(d[1], expected);
        }
    }

    #[test]
    fn pressure_scales_quadratically() {
        let t = q(3, 4);
        let p1 = make_pressure_solution(2, &q(1, 1), 6).unwrap().coefficients_exact(&t).unwrap();
        let p3 = make_pressure_solution(2, &q(3, 1), 6).unwrap().coefficients_exact(&t).unwrap();
        for (a, b) in p1.iter().zip(&p3) {
            assert_eq!(Rational::from(a * 9), *b);
        }
    }

    #[test]
    fn zero_pressure_order_is_identically_zero() {
        let p = make_pressure_solution_with(PressureSign::Momentum, Recursion::PolarHeat, 1, &q(1, 1), 0).unwrap();
        assert_eq!(p.value_exact(&q(1, 1), &q(1, 1), 0).unwrap(), q(0, 1));
    }

    #[test]
    fn trivial_burgers_branch_is_zero() {
        let b = BurgersSolution::trivial();
        let v = b.velocity(&q(1, 3), &q(1, 1), 64).unwrap();
        assert!(v.contains_zero() && v.mag_upper() == 0);
    }

    #[test]
    fn burgers_is_odd_and_zero_at_origin() {
        let b = make_burgers_solution(1, 20).unwrap();
        let zero = b.velocity(&q(0, 1), &q(1, 1), 128).unwrap();
        assert_eq!(zero.mag_upper(), 0);
        let a = b.velocity(&q(1, 2), &q(1, 1), 128).unwrap().midpoint();
        let c = b.velocity(&q(-1, 2), &q(1, 1), 128).unwrap().midpoint();
        assert_eq!(a, -c);
    }

    #[test]
    fn constant_vorticity_gives_rigid_rotation() {
        let omega0 = 3.0;
        let u = biot_savart_profile(|_| Ok(omega0), [0.3, -0.4], 1e-12).unwrap();
        assert!((u.velocity[0] - 0.4 * omega0 / 2.0).abs() < 1e-14);
        assert!((u.velocity[1] - 0.3 * omega0 / 2.0).abs() < 1e-14);
        let z = biot_savart_profile(|_| Ok(omega0), [0.0, 0.0], 1e-12).unwrap();
        assert_eq!(z.velocity, [0.0, 0.0]);
    }
}

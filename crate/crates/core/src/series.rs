//! Certified evaluation of truncated series `Σ_{n≤N} c_n f_k^{(n)}(t) ρ^{2n}` and their
//! term-wise derivatives.
//!
//! A partial sum is computed exactly as `R · f_k(t)` with `R` rational; only the
//! exponential factor is rounded. The discarded tail is bounded with the Cauchy estimate
//! `|f_k^{(n)}(t)| ≤ n!/(θt)^n e^{-t^{-2k}/2}` and a ratio envelope that decreases in `n`,
//! which closes the sum geometrically once the envelope drops below one half.

use std::sync::Arc;

use rug::float::Round;
use rug::ops::Pow;
use rug::{Float, Integer, Rational};
use serde::{Deserialize, Serialize};

use crate::arith::{self, CertifiedValue, Enclosure, PrecisionPolicy};
use crate::coeffs::{CoefficientFamily, CoefficientSequence};
use crate::error::{Error, Result};
use crate::flat::{self, DerivativeTable, FlatFamily, Theta};

/// Spatial variable a series is written in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variable {
    /// `x ∈ ℝ`, series in `x^{2n}`.
    Line,
    /// `r = |x|` in the plane, series in `r^{2n}`.
    Radial,
}

/// Where a series (or one of its derivatives) is evaluated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Coordinate {
    /// `ρ` itself (`x` on the line, `r` in the plane); spatial derivatives are `∂_ρ^m`.
    Linear(Rational),
    /// `w = ρ²`; spatial derivatives are `∂_w^m`. Used for planar points, where
    /// `w = x₁² + x₂²` stays rational.
    Squared(Rational),
}

impl Coordinate {
    pub fn plane(x: &[Rational; 2]) -> Coordinate {
        Coordinate::Squared(Rational::from(x[0].square_ref()) + Rational::from(x[1].square_ref()))
    }

    fn is_zero(&self) -> bool {
        match self {
            Coordinate::Linear(v) | Coordinate::Squared(v) => v.cmp0() == std::cmp::Ordering::Equal,
        }
    }

    /// Smallest `n` with a nonzero multiplier for spatial order `m`.
    fn first_index(&self, m: u32) -> usize {
        match self {
            Coordinate::Linear(_) => m.div_ceil(2) as usize,
            Coordinate::Squared(_) => m as usize,
        }
    }

    /// Exact multiplier `∂^m ρ^{2n}` (or `∂_w^m w^n`) at this coordinate.
    fn multiplier(&self, n: usize, m: u32) -> Rational {
        let n = n as u32;
        match self {
            Coordinate::Linear(rho) => {
                if 2 * n < m {
                    return Rational::new();
                }
                Rational::from(rho.pow((2 * n - m) as i32)) * arith::falling(2 * n, m)
            }
            Coordinate::Squared(w) => {
                if n < m {
                    return Rational::new();
                }
                Rational::from(w.pow((n - m) as i32)) * arith::falling(n, m)
            }
        }
    }

    /// `|μ_{n+1}/μ_n|` for `n ≥ first_index(m)`; decreasing in `n`.
    fn multiplier_ratio(&self, n: usize, m: u32) -> Rational {
        let n = n as u32;
        match self {
            Coordinate::Linear(rho) => {
                let num = Integer::from((2 * n + 2) * (2 * n + 1));
                let den = Integer::from((2 * n + 2 - m) * (2 * n + 1 - m));
                Rational::from((num, den)) * Rational::from(rho.square_ref())
            }
            Coordinate::Squared(w) => Rational::from((n + 1, n + 1 - m)) * Rational::from(w.abs_ref()),
        }
    }
}

/// Spatial and temporal differentiation orders applied term by term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct DerivativeOrder {
    pub spatial: u32,
    pub temporal: u32,
}

impl DerivativeOrder {
    pub const VALUE: DerivativeOrder = DerivativeOrder {
        spatial: 0,
        temporal: 0,
    };

    pub fn new(spatial: u32, temporal: u32) -> Self {
        DerivativeOrder { spatial, temporal }
    }
}

/// Requested accuracy: the total certified error must not exceed
/// `max(absolute, relative · |value|)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Target {
    pub absolute: Option<f64>,
    pub relative: Option<f64>,
}

impl Target {
    pub fn absolute(a: f64) -> Self {
        Target {
            absolute: Some(a),
            relative: None,
        }
    }

    pub fn relative(r: f64) -> Self {
        Target {
            absolute: None,
            relative: Some(r),
        }
    }

    /// No accuracy requirement; the error is only reported.
    pub fn none() -> Self {
        Target::default()
    }

    fn is_none(&self) -> bool {
        self.absolute.is_none() && self.relative.is_none()
    }

    fn allowed(&self, magnitude_lower: &Float) -> Float {
        let p = magnitude_lower.prec();
        let mut out = Float::with_val(p, self.absolute.unwrap_or(0.0));
        if let Some(r) = self.relative {
            let rel = Float::with_val_round(p, magnitude_lower * r, Round::Down).0;
            if rel > out {
                out = rel;
            }
        }
        out
    }
}

/// Evaluation resources: precision policy, truncation cap and time floor.
#[derive(Debug, Clone)]
pub struct EvalConfig {
    pub policy: PrecisionPolicy,
    pub max_order: usize,
    pub time_floor: Rational,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            policy: PrecisionPolicy::default(),
            max_order: 2048,
            time_floor: Rational::from((1, 100)),
        }
    }
}

impl EvalConfig {
    pub fn check_time(&self, t: &Rational) -> Result<()> {
        flat::inverse_time(t)?;
        if *t < self.time_floor {
            return Err(Error::BelowTimeFloor {
                t: t.to_f64(),
                floor: self.time_floor.to_f64(),
            });
        }
        Ok(())
    }
}

/// Upper bound on the discarded remainder beyond order `order`.
#[derive(Debug, Clone, PartialEq)]
pub struct TailBound {
    pub order: usize,
    pub k: u32,
    pub t: Rational,
    pub coordinate: Coordinate,
    pub bound: Float,
}

/// One instance of a series family: coefficients, flatness order, scale and truncation.
#[derive(Debug, Clone)]
pub struct TruncatedSeries {
    family: CoefficientFamily,
    flat: FlatFamily,
    order: usize,
    variable: Variable,
    coeffs: Arc<CoefficientSequence>,
}

impl TruncatedSeries {
    pub fn new(family: CoefficientFamily, k: u32, a0: Rational, order: usize) -> Result<Self> {
        let variable = match family {
            CoefficientFamily::Heat => Variable::Line,
            _ => Variable::Radial,
        };
        let a0 = if family == CoefficientFamily::Heat {
            Rational::from(1)
        } else {
            a0
        };
        Ok(TruncatedSeries {
            family,
            flat: FlatFamily::new(k)?,
            order,
            variable,
            coeffs: Arc::new(CoefficientSequence::new(family, a0)?),
        })
    }

    pub fn family(&self) -> CoefficientFamily {
        self.family
    }

    pub fn k(&self) -> u32 {
        self.flat.k()
    }

    pub fn flat(&self) -> FlatFamily {
        self.flat
    }

    pub fn a0(&self) -> &Rational {
        self.coeffs.a0()
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn variable(&self) -> Variable {
        self.variable
    }

    pub fn with_order(&self, order: usize) -> TruncatedSeries {
        TruncatedSeries {
            order,
            ..self.clone()
        }
    }

    pub fn coefficient(&self, n: usize) -> Rational {
        self.coeffs.value(n)
    }

    pub fn coefficients(&self) -> Vec<Rational> {
        self.coeffs.prefix(self.order)
    }

    /// Exact `R` with `Σ_{n≤N} c_n ∂^m ∂_t^j [f^{(n)} ρ^{2n}] = R · f_k(t)`.
    pub fn partial_sum_exact(
        &self,
        coord: &Coordinate,
        t: &Rational,
        d: DerivativeOrder,
    ) -> Result<Rational> {
        let s = flat::inverse_time(t)?;
        let j = d.temporal as usize;
        let q = DerivativeTable::for_family(self.flat).values_at(&s, self.order + j)?;
        let c = self.coeffs.prefix(self.order);
        let mut acc = Rational::new();
        for n in coord.first_index(d.spatial)..=self.order {
            let mu = coord.multiplier(n, d.spatial);
            if mu.cmp0() == std::cmp::Ordering::Equal {
                continue;
            }
            acc += Rational::from(&c[n] * &q[n + j]) * mu;
        }
        Ok(acc)
    }

    /// Exact `R` for the single term `n` (same normalization as [`Self::partial_sum_exact`]).
    pub fn term_exact(
        &self,
        n: usize,
        coord: &Coordinate,
        t: &Rational,
        d: DerivativeOrder,
    ) -> Result<Rational> {
        let s = flat::inverse_time(t)?;
        let q = DerivativeTable::for_family(self.flat)
            .polynomial(n + d.temporal as usize)?
            .eval(&s);
        Ok(self.coeffs.value(n) * q * coord.multiplier(n, d.spatial))
    }

    /// Partial sum with rounding error only (no tail).
    pub fn partial_sum(
        &self,
        coord: &Coordinate,
        t: &Rational,
        d: DerivativeOrder,
        prec: u32,
    ) -> Result<Enclosure> {
        let r = self.partial_sum_exact(coord, t, d)?;
        Ok(self.flat.value_power(t, 1, prec)?.mul_rational(&r))
    }

    fn envelope<'a>(
        &'a self,
        coord: &'a Coordinate,
        t: &Rational,
        d: DerivativeOrder,
        prec: u32,
    ) -> Result<Envelope<'a>> {
        let theta = flat::certified_theta(self.k())?;
        Envelope::new(self, coord, t, d, theta, prec)
    }

    /// Upper bound on `Σ_{n≥from} |c_n ∂^m ∂_t^j [f^{(n)} ρ^{2n}]|` via the Cauchy estimate.
    pub fn envelope_tail(
        &self,
        coord: &Coordinate,
        t: &Rational,
        d: DerivativeOrder,
        from: usize,
        prec: u32,
    ) -> Result<Float> {
        self.envelope(coord, t, d, prec)?.tail_from(from)
    }

    /// Upper bound on `sup_{|z|² ≤ w} |Σ_n c_n f^{(n)}(t) z^{2n}|` over complex `z`, valid for
    /// the full series and every partial sum (all terms are majorized by `|c_n| B_n w^n`).
    pub fn majorant(&self, w: &Rational, t: &Rational, prec: u32) -> Result<Float> {
        let coord = Coordinate::Squared(Rational::from(w.abs_ref()));
        self.envelope_tail(&coord, t, DerivativeOrder::VALUE, 0, prec)
    }

    pub fn tail_bound(
        &self,
        coord: &Coordinate,
        t: &Rational,
        d: DerivativeOrder,
        prec: u32,
    ) -> Result<TailBound> {
        let bound = self.envelope_tail(coord, t, d, self.order + 1, prec)?;
        Ok(TailBound {
            order: self.order,
            k: self.k(),
            t: t.clone(),
            coordinate: coord.clone(),
            bound,
        })
    }

    /// Certified value of the full (untruncated) series at `coord`.
    pub fn evaluate(
        &self,
        coord: &Coordinate,
        t: &Rational,
        target: Target,
        cfg: &EvalConfig,
    ) -> Result<CertifiedValue> {
        self.evaluate_derivative(coord, t, DerivativeOrder::VALUE, target, cfg)
    }

    /// Certified value of the term-wise differentiated full series. The truncation order is
    /// raised above `self.order()` (never lowered) when the tail alone would miss the
    /// target; precision is escalated along the configured ladder.
    pub fn evaluate_derivative(
        &self,
        coord: &Coordinate,
        t: &Rational,
        d: DerivativeOrder,
        target: Target,
        cfg: &EvalConfig,
    ) -> Result<CertifiedValue> {
        cfg.check_time(t)?;
        let mut order = self.order;
        let mut last_bits = cfg.policy.initial_bits;
        for bits in cfg.policy.ladder() {
            last_bits = bits;
            let mut env = self.envelope(coord, t, d, bits)?;
            loop {
                let tail = env.tail_from(order + 1)?;
                let enc = self.with_order(order).partial_sum(coord, t, d, bits)?;
                let v = enc.to_certified().widen(&tail);
                if target.is_none() {
                    return Ok(v);
                }
                let allowed = target.allowed(&v.lower_magnitude());
                if v.error <= allowed {
                    return Ok(v);
                }
                let mut half = Float::with_val(bits, &allowed / 2u32);
                if half.is_zero() {
                    // The enclosure still straddles zero: aim at a fraction of the current
                    // estimate, or at a much smaller tail when the estimate is itself zero.
                    let estimate = Float::with_val(bits, v.value.abs_ref());
                    half = Float::with_val(bits, &target.allowed(&estimate) / 4u32);
                    if half.is_zero() {
                        half = Float::with_val(bits, &tail >> 64u32);
                    }
                }
                if tail > half {
                    let next = env.first_order_below(&half, order + 1, cfg.max_order)?;
                    if next == order {
                        break;
                    }
                    order = next;
                    continue;
                }
                break;
            }
        }
        Err(Error::PrecisionExhausted { bits: last_bits })
    }
}

/// Smallest `N` (scanning upward from 0) whose tail bound is ≤ `target`.
pub fn adaptive_truncation(
    template: &TruncatedSeries,
    coord: &Coordinate,
    t: &Rational,
    d: DerivativeOrder,
    target: f64,
    cfg: &EvalConfig,
) -> Result<usize> {
    cfg.check_time(t)?;
    let bits = cfg.policy.initial_bits;
    let mut env = template.envelope(coord, t, d, bits)?;
    env.first_order_below(&Float::with_val(bits, target), 0, cfg.max_order)
}

/// Lazily computed majorant terms `T_n` and ratio envelope `R_n ≥ T_{n'+1}/T_{n'}` (n' ≥ n).
struct Envelope<'a> {
    series: &'a TruncatedSeries,
    coord: &'a Coordinate,
    d: DerivativeOrder,
    inv_theta_t: Float,
    prec: u32,
    start: usize,
    terms: Vec<(Float, Float)>,
    exp_half: Float,
}

const ENVELOPE_GUARD: usize = 1_000_000;

impl<'a> Envelope<'a> {
    fn new(
        series: &'a TruncatedSeries,
        coord: &'a Coordinate,
        t: &Rational,
        d: DerivativeOrder,
        theta: Theta,
        prec: u32,
    ) -> Result<Self> {
        let half_y = series.flat.exponent(t)? / 2u32;
        Ok(Envelope {
            series,
            coord,
            d,
            inv_theta_t: flat::inverse_theta_t_up(&theta, t, prec),
            prec,
            start: coord.first_index(d.spatial),
            terms: Vec::new(),
            exp_half: arith::exp_neg_up(&half_y, prec),
        })
    }

    fn direct_term(&self, n: usize) -> Float {
        let j = self.d.temporal;
        let c = Rational::from(self.series.coeffs.value(n).abs_ref());
        let mu = Rational::from(self.coord.multiplier(n, self.d.spatial).abs_ref());
        let exact = c * mu * arith::factorial(n as u32 + j);
        let pow = Float::with_val_round(self.prec, (&self.inv_theta_t).pow((n as u32) + j), Round::Up).0;
        arith::mul_up(&arith::mul_up(&arith::rational_up(&exact, self.prec), &pow), &self.exp_half)
    }

    fn ratio(&self, n: usize) -> Float {
        let env = self.series.family.ratio_envelope(n as u32, self.d.temporal)
            * self.coord.multiplier_ratio(n, self.d.spatial);
        arith::mul_up(&arith::rational_up(&env, self.prec), &self.inv_theta_t)
    }

    fn ensure(&mut self, n: usize) {
        while self.start + self.terms.len() <= n {
            let i = self.start + self.terms.len();
            let term = match self.terms.last() {
                None => self.direct_term(i),
                Some((prev, _)) => {
                    // T_i = T_{i-1} · (c_i/c_{i-1}) (i-1+j+1) (μ_i/μ_{i-1}) / (θt)
                    let c_ratio = (self.series.coeffs.value(i) / self.series.coeffs.value(i - 1)).abs() * (i as u32 + self.d.temporal)
                        * self.coord.multiplier_ratio(i - 1, self.d.spatial);
                    let step = arith::mul_up(&arith::rational_up(&c_ratio, self.prec), &self.inv_theta_t);
                    arith::mul_up(prev, &step)
                }
            };
            let r = self.ratio(i);
            self.terms.push((term, r));
        }
    }

    fn tail_from(&mut self, from: usize) -> Result<Float> {
        let zero = Float::with_val(self.prec, 0);
        if self.coord.is_zero() {
            // Only the n = first_index term can be nonzero at the origin.
            let n = self.start;
            let only = if (self.coord.multiplier(n, self.d.spatial)).cmp0() != std::cmp::Ordering::Equal
                && n >= from
            {
                self.direct_term(n)
            } else {
                zero
            };
            return Ok(only);
        }
        let mut n = from.max(self.start);
        let mut total = zero;
        let half = Float::with_val(self.prec, 0.5);
        loop {
            if n > from + ENVELOPE_GUARD {
                return Err(Error::TruncationExhausted {
                    max_order: from + ENVELOPE_GUARD,
                });
            }
            self.ensure(n);
            let (term, r) = &self.terms[n - self.start];
            if *r <= half {
                let one_minus = arith::sub_down(&Float::with_val(self.prec, 1), r);
                total = arith::add_up(&total, &arith::div_up(term, &one_minus));
                return Ok(total);
            }
            total = arith::add_up(&total, term);
            n += 1;
        }
    }

    /// Smallest order `N ≥ from` whose tail (terms `> N`) is ≤ `target`.
    fn first_order_below(&mut self, target: &Float, from: usize, max_order: usize) -> Result<usize> {
        let mut n = from;
        loop {
            if n > max_order {
                return Err(Error::TruncationExhausted { max_order });
            }
            if self.tail_from(n + 1)? <= *target {
                return Ok(n);
            }
            n += 1;
        }
    }
}

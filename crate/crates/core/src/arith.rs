//! Outward-rounded interval arithmetic on MPFR floats, exact-rational helpers, and the
//! `CertifiedValue` type returned by every evaluator.
//!
//! All polynomial and coefficient work in this crate is exact (`rug::Rational`); the only
//! inexact step is the exponential factor `exp(-y)` and the final conversion, both done
//! here with directed rounding so that the true value always lies in the enclosure.

use std::cmp::Ordering;
use std::fmt;

use rug::float::Round;
use rug::{Float, Integer, Rational};

use crate::error::{Error, Result};

/// Environment variable overriding the default precision cap (bits).
pub const PRECISION_CAP_ENV: &str = "TYCHO_MAX_PRECISION";

/// Default working precision in bits.
pub const DEFAULT_PRECISION: u32 = 128;

/// Default precision cap in bits when the environment does not override it.
pub const DEFAULT_PRECISION_CAP: u32 = 4096;

/// Working-precision escalation policy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrecisionPolicy {
    pub initial_bits: u32,
    pub max_bits: u32,
    /// Rounding bound must fall below this fraction of the value's magnitude.
    pub rel_fraction: f64,
}

impl Default for PrecisionPolicy {
    fn default() -> Self {
        PrecisionPolicy {
            initial_bits: DEFAULT_PRECISION,
            max_bits: precision_cap_from_env(),
            rel_fraction: 2f64.powi(-20),
        }
    }
}

impl PrecisionPolicy {
    pub fn with_initial(bits: u32) -> Self {
        let mut p = PrecisionPolicy::default();
        p.initial_bits = bits.max(16);
        p.max_bits = p.max_bits.max(p.initial_bits);
        p
    }

    /// Successive precisions tried: initial, doubled, ... up to and including the cap.
    pub fn ladder(&self) -> impl Iterator<Item = u32> {
        let max = self.max_bits.max(self.initial_bits);
        let mut next = Some(self.initial_bits);
        std::iter::from_fn(move || {
            let cur = next?;
            next = if cur >= max {
                None
            } else {
                Some((cur.saturating_mul(2)).min(max))
            };
            Some(cur)
        })
    }
}

/// Reads the precision cap from [`PRECISION_CAP_ENV`], falling back to the default.
pub fn precision_cap_from_env() -> u32 {
    std::env::var(PRECISION_CAP_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<u32>().ok())
        .filter(|&b| b >= 16)
        .unwrap_or(DEFAULT_PRECISION_CAP)
}

/// A closed interval `[lo, hi]` of MPFR floats, maintained with outward rounding.
#[derive(Clone, PartialEq)]
pub struct Enclosure {
    lo: Float,
    hi: Float,
}

impl fmt::Debug for Enclosure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:e}, {:e}]", self.lo.to_f64(), self.hi.to_f64())
    }
}

fn down<T>(prec: u32, v: T) -> Float
where
    Float: rug::ops::AssignRound<T, Round = Round, Ordering = Ordering>,
{
    Float::with_val_round(prec, v, Round::Down).0
}

fn up<T>(prec: u32, v: T) -> Float
where
    Float: rug::ops::AssignRound<T, Round = Round, Ordering = Ordering>,
{
    Float::with_val_round(prec, v, Round::Up).0
}

impl Enclosure {
    pub fn point(x: Float) -> Self {
        Enclosure { lo: x.clone(), hi: x }
    }

    pub fn zero(prec: u32) -> Self {
        Enclosure::point(Float::with_val(prec, 0))
    }

    pub fn from_rational(q: &Rational, prec: u32) -> Self {
        Enclosure {
            lo: down(prec, q),
            hi: up(prec, q),
        }
    }

    pub fn from_bounds(lo: Float, hi: Float) -> Self {
        debug_assert!(lo <= hi);
        Enclosure { lo, hi }
    }

    /// Encloses `exp(-y)` for exact rational `y`.
    pub fn exp_neg(y: &Rational, prec: u32) -> Self {
        // -y rounded down then exp rounded down is a lower bound, symmetric for the upper.
        let neg = Rational::from(-y);
        let mut lo = down(prec + 8, &neg);
        let mut hi = up(prec + 8, &neg);
        lo.set_prec_round(prec, Round::Down);
        hi.set_prec_round(prec, Round::Up);
        let lo = down(prec, lo.exp_ref());
        let hi = up(prec, hi.exp_ref());
        Enclosure { lo, hi }
    }

    pub fn lo(&self) -> &Float {
        &self.lo
    }

    pub fn hi(&self) -> &Float {
        &self.hi
    }

    pub fn prec(&self) -> u32 {
        self.lo.prec().max(self.hi.prec())
    }

    pub fn contains_zero(&self) -> bool {
        self.lo.cmp0() != Some(Ordering::Greater) && self.hi.cmp0() != Some(Ordering::Less)
    }

    pub fn add(&self, o: &Enclosure) -> Enclosure {
        let p = self.prec().max(o.prec());
        Enclosure {
            lo: down(p, &self.lo + &o.lo),
            hi: up(p, &self.hi + &o.hi),
        }
    }

    pub fn sub(&self, o: &Enclosure) -> Enclosure {
        let p = self.prec().max(o.prec());
        Enclosure {
            lo: down(p, &self.lo - &o.hi),
            hi: up(p, &self.hi - &o.lo),
        }
    }

    pub fn neg(&self) -> Enclosure {
        Enclosure {
            lo: Float::with_val(self.hi.prec(), -&self.hi),
            hi: Float::with_val(self.lo.prec(), -&self.lo),
        }
    }

    pub fn mul(&self, o: &Enclosure) -> Enclosure {
        let p = self.prec().max(o.prec());
        let pairs = [
            (&self.lo, &o.lo),
            (&self.lo, &o.hi),
            (&self.hi, &o.lo),
            (&self.hi, &o.hi),
        ];
        let mut lo: Option<Float> = None;
        let mut hi: Option<Float> = None;
        for (a, b) in pairs {
            let l = down(p, a * b);
            let h = up(p, a * b);
            lo = Some(match lo {
                Some(cur) if cur <= l => cur,
                _ => l,
            });
            hi = Some(match hi {
                Some(cur) if cur >= h => cur,
                _ => h,
            });
        }
        Enclosure {
            lo: lo.unwrap(),
            hi: hi.unwrap(),
        }
    }

    pub fn mul_rational(&self, q: &Rational) -> Enclosure {
        self.mul(&Enclosure::from_rational(q, self.prec()))
    }

    /// Division; `None` when the divisor interval contains zero.
    pub fn div(&self, o: &Enclosure) -> Option<Enclosure> {
        if o.contains_zero() {
            return None;
        }
        let p = self.prec().max(o.prec());
        let recip = Enclosure {
            lo: down(p, 1 / &o.hi),
            hi: up(p, 1 / &o.lo),
        };
        Some(self.mul(&recip))
    }

    pub fn square(&self) -> Enclosure {
        let a = self.abs();
        let p = a.prec();
        Enclosure {
            lo: down(p, a.lo.square_ref()),
            hi: up(p, a.hi.square_ref()),
        }
    }

    pub fn abs(&self) -> Enclosure {
        let p = self.prec();
        if self.lo.cmp0() != Some(Ordering::Less) {
            self.clone()
        } else if self.hi.cmp0() != Some(Ordering::Greater) {
            self.neg()
        } else {
            let m = if Float::with_val(p, -&self.lo) > self.hi {
                Float::with_val(p, -&self.lo)
            } else {
                self.hi.clone()
            };
            Enclosure {
                lo: Float::with_val(p, 0),
                hi: m,
            }
        }
    }

    /// Lower bound on |x| over the enclosure.
    pub fn mag_lower(&self) -> Float {
        self.abs().lo
    }

    /// Upper bound on |x| over the enclosure.
    pub fn mag_upper(&self) -> Float {
        self.abs().hi
    }

    /// Widens the enclosure by `r ≥ 0` on both sides.
    pub fn inflate(&self, r: &Float) -> Enclosure {
        let p = self.prec().max(r.prec());
        Enclosure {
            lo: down(p, &self.lo - r),
            hi: up(p, &self.hi + r),
        }
    }

    pub fn midpoint(&self) -> Float {
        let p = self.prec();
        let mut m = Float::with_val(p + 1, &self.lo + &self.hi);
        m /= 2;
        Float::with_val(p, m)
    }

    /// Smallest `r` (rounded up) such that `[mid - r, mid + r]` covers the enclosure.
    pub fn radius_about(&self, mid: &Float) -> Float {
        let p = self.prec();
        let a = up(p, mid - &self.lo);
        let b = up(p, &self.hi - mid);
        if a > b {
            a
        } else {
            b
        }
    }

    pub fn to_certified(&self) -> CertifiedValue {
        let value = self.midpoint();
        let error = self.radius_about(&value);
        CertifiedValue { value, error }
    }
}

/// A number together with a rigorous error bound: the true value lies in
/// `[value - error, value + error]`.
#[derive(Clone, PartialEq)]
pub struct CertifiedValue {
    pub value: Float,
    pub error: Float,
}

impl fmt::Debug for CertifiedValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:e} ± {:e}", self.value.to_f64(), self.error.to_f64())
    }
}

impl CertifiedValue {
    pub fn exact(value: Float) -> Self {
        let p = value.prec();
        CertifiedValue {
            value,
            error: Float::with_val(p, 0),
        }
    }

    pub fn value_f64(&self) -> f64 {
        self.value.to_f64()
    }

    /// Error bound converted to `f64`, rounded upward.
    pub fn error_f64(&self) -> f64 {
        self.error.to_f64_round(Round::Up)
    }

    pub fn enclosure(&self) -> Enclosure {
        let p = self.value.prec().max(self.error.prec());
        Enclosure {
            lo: down(p, &self.value - &self.error),
            hi: up(p, &self.value + &self.error),
        }
    }

    /// Adds a further nonnegative error contribution.
    pub fn widen(mut self, extra: &Float) -> Self {
        let p = self.error.prec().max(extra.prec());
        self.error = up(p, &self.error + extra);
        self
    }

    pub fn lower_magnitude(&self) -> Float {
        self.enclosure().mag_lower()
    }

    pub fn upper_magnitude(&self) -> Float {
        self.enclosure().mag_upper()
    }

    pub fn contains(&self, x: &Rational) -> bool {
        let e = self.enclosure();
        *e.lo() <= *x && *e.hi() >= *x
    }

    /// True when the enclosures of `self` and `other` are disjoint.
    pub fn separated_from(&self, other: &CertifiedValue) -> bool {
        let a = self.enclosure();
        let b = other.enclosure();
        a.hi() < b.lo() || b.hi() < a.lo()
    }
}

/// Upper-rounded conversion of a nonnegative rational to a float.
pub fn rational_up(q: &Rational, prec: u32) -> Float {
    up(prec, q)
}

/// Lower-rounded conversion of a rational to a float.
pub fn rational_down(q: &Rational, prec: u32) -> Float {
    down(prec, q)
}

/// `a + b` rounded up.
pub fn add_up(a: &Float, b: &Float) -> Float {
    up(a.prec().max(b.prec()), a + b)
}

/// `a * b` rounded up.
pub fn mul_up(a: &Float, b: &Float) -> Float {
    up(a.prec().max(b.prec()), a * b)
}

/// `a / b` rounded up.
pub fn div_up(a: &Float, b: &Float) -> Float {
    up(a.prec().max(b.prec()), a / b)
}

/// `a - b` rounded down.
pub fn sub_down(a: &Float, b: &Float) -> Float {
    down(a.prec().max(b.prec()), a - b)
}

/// Upper bound on `exp(-y)`.
pub fn exp_neg_up(y: &Rational, prec: u32) -> Float {
    Enclosure::exp_neg(y, prec).hi
}

/// Parses an exact rational from `"p/q"`, an integer, or a decimal such as `"-0.125"` or
/// `"1e-3"`. Binary floating point is never involved.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::invalid("rational", format!("cannot parse `{s}`"));
    if s.is_empty() {
        return Err(bad());
    }
    if s.contains('/') {
        return Rational::parse(s).map(Rational::from).map_err(|_| bad());
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = match digits.find('.') {
        Some(i) => (&digits[..i], &digits[i + 1..]),
        None => (digits, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let all: String = format!("{int_part}{frac_part}");
    let num = Integer::from_str_radix(if all.is_empty() { "0" } else { &all }, 10)
        .map_err(|_| bad())?;
    let scale = exponent - frac_part.len() as i32;
    let mut q = Rational::from(num);
    if scale >= 0 {
        q *= Integer::from(Integer::u_pow_u(10, scale as u32));
    } else {
        q /= Integer::from(Integer::u_pow_u(10, (-scale) as u32));
    }
    if neg {
        q = -q;
    }
    Ok(q)
}

/// Exact rational from an `f64` (every finite double is a dyadic rational).
pub fn rational_from_f64(x: f64) -> Rational {
    Rational::from_f64(x).expect("finite f64")
}

/// `n!` as an exact integer.
pub fn factorial(n: u32) -> Integer {
    Integer::from(Integer::factorial(n))
}

/// Falling factorial `n (n-1) ... (n-m+1)`; zero when `m > n`.
pub fn falling(n: u32, m: u32) -> Integer {
    if m > n {
        return Integer::new();
    }
    let mut acc = Integer::from(1);
    for i in 0..m {
        acc *= n - i;
    }
    acc
}

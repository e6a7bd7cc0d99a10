//! Exact calculus for the flat family `f_k(t) = exp(-t^{-2k})`.
//!
//! Every derivative has the form `f_k^{(n)}(t) = Q_n(1/t) · f_k(t)` with `Q_n` an integer
//! polynomial in `s = 1/t`. Since `d/dt = -s² d/ds`, the polynomials obey
//! `Q_{n+1}(s) = s² (2k s^{2k-1} Q_n(s) - Q_n'(s))`, `Q_0 = 1`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock, RwLock};

use rug::float::Round;
use rug::ops::Pow;
use rug::{Float, Integer, Rational};

use crate::arith::{self, CertifiedValue, Enclosure, PrecisionPolicy};
use crate::error::{Error, Result};

/// Largest derivative order any table will produce.
pub const MAX_DERIVATIVE_ORDER: usize = 8192;

/// Polynomials up to this order are cached; higher orders are streamed.
const CACHE_LIMIT: usize = 384;

/// Flatness order `k ≥ 1` of `f_k(t) = exp(-t^{-2k})`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FlatFamily {
    k: u32,
}

impl FlatFamily {
    pub fn new(k: u32) -> Result<Self> {
        if k == 0 {
            return Err(Error::invalid("k", "flatness order must be ≥ 1"));
        }
        if k > 64 {
            return Err(Error::invalid("k", "flatness order above 64 is not supported"));
        }
        Ok(FlatFamily { k })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    /// Exponent argument `y = t^{-2k}` as an exact rational, so that `f_k(t) = e^{-y}`.
    pub fn exponent(&self, t: &Rational) -> Result<Rational> {
        let s = inverse_time(t)?;
        Ok(Rational::from((&s).pow(2 * self.k)))
    }

    /// Enclosure of `f_k(t)^power = exp(-power · t^{-2k})`.
    pub fn value_power(&self, t: &Rational, power: u32, prec: u32) -> Result<Enclosure> {
        let y = self.exponent(t)? * power;
        Ok(Enclosure::exp_neg(&y, prec))
    }
}

/// `s = 1/t`, rejecting `t ≤ 0`.
pub fn inverse_time(t: &Rational) -> Result<Rational> {
    if t.cmp0() != std::cmp::Ordering::Greater {
        return Err(Error::invalid("t", "time must be strictly positive"));
    }
    Ok(Rational::from(t.recip_ref()))
}

/// `Q_n` for a given `k`: dense integer coefficients indexed by the exponent of `s`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DerivativePolynomial {
    k: u32,
    n: usize,
    coeffs: Vec<Integer>,
}

impl DerivativePolynomial {
    pub fn one(k: u32) -> Self {
        DerivativePolynomial {
            k,
            n: 0,
            coeffs: vec![Integer::from(1)],
        }
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coefficient(&self, exponent: usize) -> Integer {
        self.coeffs.get(exponent).cloned().unwrap_or_default()
    }

    pub fn leading_coefficient(&self) -> &Integer {
        self.coeffs.last().expect("nonempty")
    }

    /// Nonzero `(exponent, coefficient)` pairs in ascending exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (usize, &Integer)> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| c.cmp0() != std::cmp::Ordering::Equal)
    }

    pub fn nonzero_terms(&self) -> usize {
        self.terms().count()
    }

    /// Bit length of the largest coefficient.
    pub fn max_coefficient_bits(&self) -> u32 {
        self.coeffs.iter().map(|c| c.significant_bits()).max().unwrap_or(0)
    }

    /// Applies the recurrence once.
    pub fn next(&self) -> DerivativePolynomial {
        let shift = 2 * self.k as usize + 1;
        let two_k = 2 * self.k;
        let mut out = vec![Integer::new(); self.coeffs.len() + shift];
        for (e, c) in self.coeffs.iter().enumerate() {
            if c.cmp0() == std::cmp::Ordering::Equal {
                continue;
            }
            out[e + shift] += Integer::from(c * two_k);
            if e > 0 {
                out[e + 1] -= Integer::from(c * e as u32);
            }
        }
        while out.len() > 1 && out.last().map(|c| c.cmp0()) == Some(std::cmp::Ordering::Equal) {
            out.pop();
        }
        DerivativePolynomial {
            k: self.k,
            n: self.n + 1,
            coeffs: out,
        }
    }

    /// Exact value `Q_n(s)` by homogeneous integer Horner (one final normalization).
    pub fn eval(&self, s: &Rational) -> Rational {
        let (p, q) = (s.numer(), s.denom());
        let d = self.degree();
        if *q == 1 {
            let mut h = Integer::new();
            for c in self.coeffs.iter().rev() {
                h *= p;
                h += c;
            }
            return Rational::from(h);
        }
        // h = Σ c_e p^e q^{d-e}
        let mut qpow = Vec::with_capacity(d + 1);
        qpow.push(Integer::from(1));
        for i in 1..=d {
            let next = Integer::from(&qpow[i - 1] * q);
            qpow.push(next);
        }
        let mut h = Integer::new();
        for (e, c) in self.coeffs.iter().enumerate().rev() {
            h *= p;
            if c.cmp0() != std::cmp::Ordering::Equal {
                h += Integer::from(c * &qpow[d - e]);
            }
        }
        Rational::from((h, qpow.pop().unwrap()))
    }
}

/// Lazily extended, shared table of `Q_n` for one `k`.
#[derive(Debug)]
pub struct DerivativeTable {
    k: u32,
    polys: RwLock<Vec<Arc<DerivativePolynomial>>>,
}

impl DerivativeTable {
    fn new(k: u32) -> Self {
        DerivativeTable {
            k,
            polys: RwLock::new(vec![Arc::new(DerivativePolynomial::one(k))]),
        }
    }

    /// Shared table for `k` (created on first use).
    pub fn for_family(family: FlatFamily) -> Arc<DerivativeTable> {
        static TABLES: OnceLock<Mutex<HashMap<u32, Arc<DerivativeTable>>>> = OnceLock::new();
        let map = TABLES.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = map.lock().expect("table registry poisoned");
        guard
            .entry(family.k())
            .or_insert_with(|| Arc::new(DerivativeTable::new(family.k())))
            .clone()
    }

    fn check_order(n: usize) -> Result<()> {
        if n > MAX_DERIVATIVE_ORDER {
            return Err(Error::OrderLimit {
                requested: n,
                max: MAX_DERIVATIVE_ORDER,
            });
        }
        Ok(())
    }

    fn extend_cache(&self, upto: usize) {
        let upto = upto.min(CACHE_LIMIT);
        if self.polys.read().expect("poisoned").len() > upto {
            return;
        }
        let mut w = self.polys.write().expect("poisoned");
        while w.len() <= upto {
            let next = Arc::new(w.last().unwrap().next());
            w.push(next);
        }
    }

    /// `Q_n`; orders beyond the cache are computed by streaming from the last cached entry.
    pub fn polynomial(&self, n: usize) -> Result<Arc<DerivativePolynomial>> {
        Self::check_order(n)?;
        self.extend_cache(n);
        let r = self.polys.read().expect("poisoned");
        if n < r.len() {
            return Ok(r[n].clone());
        }
        let mut p = (*r[r.len() - 1]).clone();
        drop(r);
        while p.order() < n {
            p = p.next();
        }
        Ok(Arc::new(p))
    }

    /// Exact values `Q_0(s), ..., Q_nmax(s)`.
    pub fn values_at(&self, s: &Rational, nmax: usize) -> Result<Vec<Rational>> {
        Self::check_order(nmax)?;
        self.extend_cache(nmax);
        let mut out = Vec::with_capacity(nmax + 1);
        let r = self.polys.read().expect("poisoned");
        let cached = r.len().min(nmax + 1);
        for p in r.iter().take(cached) {
            out.push(p.eval(s));
        }
        if cached <= nmax {
            let mut p = (*r[cached - 1]).clone();
            drop(r);
            while p.order() < nmax {
                p = p.next();
                out.push(p.eval(s));
            }
        }
        Ok(out)
    }

    pub fn k(&self) -> u32 {
        self.k
    }
}

/// `Q_n` for `f_k`, from the shared table.
pub fn derivative_polynomial(k: u32, n: usize) -> Result<Arc<DerivativePolynomial>> {
    let fam = FlatFamily::new(k)?;
    DerivativeTable::for_family(fam).polynomial(n)
}

/// Certified `f_k^{(n)}(t)`, escalating precision until the rounding bound is below
/// `policy.rel_fraction · |value|`.
pub fn eval_flat_derivative(
    k: u32,
    n: usize,
    t: &Rational,
    policy: &PrecisionPolicy,
) -> Result<CertifiedValue> {
    let fam = FlatFamily::new(k)?;
    let s = inverse_time(t)?;
    let q = DerivativeTable::for_family(fam).polynomial(n)?.eval(&s);
    if q.cmp0() == std::cmp::Ordering::Equal {
        return Ok(CertifiedValue::exact(Float::with_val(policy.initial_bits, 0)));
    }
    let y = fam.exponent(t)?;
    let mut last_bits = policy.initial_bits;
    for bits in policy.ladder() {
        last_bits = bits;
        let v = Enclosure::exp_neg(&y, bits).mul_rational(&q).to_certified();
        let lower = v.lower_magnitude();
        if lower.cmp0() == Some(std::cmp::Ordering::Greater) {
            let allowed = Float::with_val(bits, &lower * policy.rel_fraction);
            if v.error <= allowed {
                return Ok(v);
            }
        }
    }
    Err(Error::PrecisionExhausted { bits: last_bits })
}

/// Certified Cauchy radius fraction for `f_k`: on the circle `|z - t| = θt` one has
/// `Re(z^{-2k}) ≥ t^{-2k}/2`, which yields `|f_k^{(n)}(t)| ≤ n!/(θt)^n · e^{-t^{-2k}/2}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Theta {
    pub k: u32,
    pub value: f64,
    /// Certified lower bound of `min Re(w^{-2k})` over `|w - 1| = θ` (≥ 1/2).
    pub certified_min: f64,
}

const THETA_SAMPLES: usize = 1 << 16;
const THETA_FLOAT_MARGIN: f64 = 1e-10;

/// Certified lower bound of `min_{|w-1|=θ} Re(w^{-2k})`: dense sampling minus a Lipschitz
/// margin `2kθ(1-θ)^{-2k-1} · Δφ/2`, minus a floating-point margin.
pub fn certified_circle_minimum(k: u32, theta: f64) -> f64 {
    assert!(theta > 0.0 && theta < 1.0);
    let two_k = 2 * k as i32;
    let step = std::f64::consts::TAU / THETA_SAMPLES as f64;
    let mut min = f64::INFINITY;
    for i in 0..THETA_SAMPLES {
        let phi = i as f64 * step;
        let (wr, wi) = (1.0 + theta * phi.cos(), theta * phi.sin());
        let modulus = wr.hypot(wi);
        let arg = wi.atan2(wr);
        let v = modulus.powi(-two_k) * (two_k as f64 * arg).cos();
        min = min.min(v);
    }
    let lipschitz = two_k as f64 * theta * (1.0 - theta).powi(-two_k - 1);
    min - lipschitz * step / 2.0 - THETA_FLOAT_MARGIN
}

fn search_theta(k: u32) -> Option<Theta> {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let mut best: Option<f64> = None;
    for _ in 0..48 {
        let mid = 0.5 * (lo + hi);
        if certified_circle_minimum(k, mid) >= 0.5 {
            lo = mid;
            best = Some(mid);
        } else {
            hi = mid;
        }
    }
    // Round down to a short dyadic so the persisted value is exactly representable.
    let value = (best? * 2f64.powi(24)).floor() / 2f64.powi(24);
    let certified_min = certified_circle_minimum(k, value);
    (value > 0.0 && certified_min >= 0.5).then_some(Theta {
        k,
        value,
        certified_min,
    })
}

/// Certified θ(k); computed once per `k` and then read from a write-once table.
pub fn certified_theta(k: u32) -> Result<Theta> {
    FlatFamily::new(k)?;
    static THETAS: OnceLock<Mutex<HashMap<u32, Option<Theta>>>> = OnceLock::new();
    let map = THETAS.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(entry) = map.lock().expect("theta table poisoned").get(&k) {
        return entry.ok_or(Error::ThetaUnavailable { k });
    }
    let found = search_theta(k);
    map.lock()
        .expect("theta table poisoned")
        .entry(k)
        .or_insert(found)
        .ok_or(Error::ThetaUnavailable { k })
}

/// Upper bound `n!/(θt)^n · e^{-t^{-2k}/2}` on `|f_k^{(n)}(t)|`.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivativeBound {
    pub k: u32,
    pub n: usize,
    pub t: Rational,
    pub theta: f64,
    pub bound: Float,
}

/// Upper bound of `1/(θt)` as a float.
pub(crate) fn inverse_theta_t_up(theta: &Theta, t: &Rational, prec: u32) -> Float {
    let th = arith::rational_from_f64(theta.value);
    let prod = Rational::from(&th * t);
    arith::rational_up(&Rational::from(prod.recip_ref()), prec)
}

pub fn derivative_tail_bound(k: u32, n: usize, t: &Rational) -> Result<DerivativeBound> {
    derivative_tail_bound_prec(k, n, t, arith::DEFAULT_PRECISION)
}

pub fn derivative_tail_bound_prec(
    k: u32,
    n: usize,
    t: &Rational,
    prec: u32,
) -> Result<DerivativeBound> {
    let fam = FlatFamily::new(k)?;
    let theta = certified_theta(k)?;
    let half_y = fam.exponent(t)? / 2u32;
    let fact = arith::rational_up(&Rational::from(arith::factorial(n as u32)), prec);
    let inv = inverse_theta_t_up(&theta, t, prec);
    let pow = Float::with_val_round(prec, (&inv).pow(n as u32), Round::Up).0;
    let e = arith::exp_neg_up(&half_y, prec);
    let bound = arith::mul_up(&arith::mul_up(&fact, &pow), &e);
    Ok(DerivativeBound {
        k,
        n,
        t: t.clone(),
        theta: theta.value,
        bound,
    })
}

/// Cauchy bounds `B_n ≥ |f_k^{(n)}(t)|` for `n = 0..=nmax`, built by `B_{n+1} = B_n (n+1)/(θt)`.
pub fn cauchy_bounds(k: u32, t: &Rational, nmax: usize, prec: u32) -> Result<Vec<Float>> {
    let first = derivative_tail_bound_prec(k, 0, t, prec)?;
    let theta = certified_theta(k)?;
    let inv = inverse_theta_t_up(&theta, t, prec);
    let mut out = Vec::with_capacity(nmax + 1);
    out.push(first.bound);
    for n in 0..nmax {
        let step = arith::mul_up(&inv, &Float::with_val(prec, n + 1));
        let next = arith::mul_up(&out[n], &step);
        out.push(next);
    }
    Ok(out)
}

//! Fourth-order central finite differences with explicit truncation bounds.
//!
//! Samples are enclosures, so rounding in the stencil is carried by interval arithmetic.
//! The truncation part is `C h^4 sup|F^{(m+4)}|`, and the derivative supremum is either
//! supplied directly or obtained from a Cauchy estimate over a complex disc.

use rug::ops::Pow;
use rug::{Float, Rational};

use crate::arith::{self, CertifiedValue, Enclosure};
use crate::error::Result;

/// Five-point central stencils on offsets `-2h, -h, 0, h, 2h`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stencil {
    /// `(f(-2h) - 8f(-h) + 8f(h) - f(2h)) / 12h`, error `h⁴/30 · f⁽⁵⁾(ξ)`.
    First,
    /// `(-f(-2h) + 16f(-h) - 30f(0) + 16f(h) - f(2h)) / 12h²`, error `h⁴/90 · f⁽⁶⁾(ξ)`.
    Second,
}

impl Stencil {
    pub fn derivative_order(self) -> u32 {
        match self {
            Stencil::First => 1,
            Stencil::Second => 2,
        }
    }

    /// Order of the derivative appearing in the remainder.
    pub fn remainder_order(self) -> u32 {
        self.derivative_order() + 4
    }

    fn weights(self) -> [i32; 5] {
        match self {
            Stencil::First => [1, -8, 0, 8, -1],
            Stencil::Second => [-1, 16, -30, 16, -1],
        }
    }

    fn error_constant(self) -> Rational {
        match self {
            Stencil::First => Rational::from((1, 30)),
            Stencil::Second => Rational::from((1, 90)),
        }
    }

    /// The five sample offsets `-2h, ..., 2h`.
    pub fn offsets(h: &Rational) -> [Rational; 5] {
        [-2, -1, 0, 1, 2].map(|i| Rational::from(h * i))
    }

    /// Exact stencil applied to exact samples.
    pub fn apply_exact(self, samples: &[Rational; 5], h: &Rational) -> Rational {
        let mut acc = Rational::new();
        for (w, v) in self.weights().iter().zip(samples) {
            if *w != 0 {
                acc += Rational::from(v * *w);
            }
        }
        let scale = Rational::from((h).pow(self.derivative_order())) * 12u32;
        acc / scale
    }

    /// Stencil applied to enclosed samples; the result encloses the difference quotient.
    pub fn apply(self, samples: &[Enclosure; 5], h: &Rational) -> Enclosure {
        let prec = samples.iter().map(Enclosure::prec).max().unwrap_or(arith::DEFAULT_PRECISION);
        let mut acc = Enclosure::zero(prec);
        for (w, v) in self.weights().iter().zip(samples) {
            if *w != 0 {
                acc = acc.add(&v.mul_rational(&Rational::from(*w)));
            }
        }
        let scale = Rational::from((h).pow(self.derivative_order())) * 12u32;
        acc.mul_rational(&Rational::from(scale.recip_ref()))
    }

    /// `C h⁴ · derivative_sup`, where `derivative_sup ≥ |F^{(m+4)}|` on `[x-2h, x+2h]`.
    pub fn truncation_bound(self, h: &Rational, derivative_sup: &Float) -> Float {
        let prec = derivative_sup.prec();
        let c = Rational::from((h).pow(4u32)) * self.error_constant();
        arith::mul_up(&arith::rational_up(&c.abs(), prec), derivative_sup)
    }

    /// Truncation bound from `disc_sup ≥ sup |F|` over the complex disc of radius `2h + δ`
    /// centred at the evaluation point, via `|F^{(j)}(ξ)| ≤ j!/δ^j · sup_{|z-ξ|=δ} |F|`.
    pub fn truncation_bound_from_disc(self, h: &Rational, delta: &Rational, disc_sup: &Float) -> Float {
        let sup = analytic_derivative_sup(self.remainder_order(), delta, disc_sup);
        self.truncation_bound(h, &sup)
    }
}

/// Cauchy estimate `j!/δ^j · disc_sup`.
pub fn analytic_derivative_sup(j: u32, delta: &Rational, disc_sup: &Float) -> Float {
    let prec = disc_sup.prec();
    let c = Rational::from(arith::factorial(j)) / Rational::from((delta).pow(j));
    arith::mul_up(&arith::rational_up(&c, prec), disc_sup)
}

/// Certified derivative estimate: the stencil value with its rounding radius widened by
/// `truncation`, so the true derivative lies in the returned interval.
pub fn fd_derivative<F>(stencil: Stencil, h: &Rational, truncation: &Float, mut sample: F) -> Result<CertifiedValue>
where
    F: FnMut(&Rational) -> Result<Enclosure>,
{
    let offs = Stencil::offsets(h);
    let mut vals = Vec::with_capacity(5);
    for o in &offs {
        vals.push(if stencil == Stencil::First && o.cmp0() == std::cmp::Ordering::Equal {
            Enclosure::zero(truncation.prec())
        } else {
            sample(o)?
        });
    }
    let vals: [Enclosure; 5] = vals.try_into().expect("five samples");
    Ok(stencil.apply(&vals, h).to_certified().widen(truncation))
}

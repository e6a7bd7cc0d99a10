//! Exact rational coefficient sequences for the heat, vorticity and velocity series.

use std::sync::Mutex;

use rug::{Integer, Rational};
use serde::{Deserialize, Serialize};

use crate::arith;
use crate::error::{Error, Result};

/// Recursion used for the radial vorticity coefficients `a_n`.
///
/// `OddProduct` is `a_{n+1} = a_n / ((2n+1)(2n+3))`. `PolarHeat` is
/// `a_{n+1} = a_n / (4(n+1)²)`, the recursion under which
/// `ω_t - ω_r/r - ω_rr` annihilates `Σ a_n f^{(n)}(t) r^{2n}` term by term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Recursion {
    OddProduct,
    #[default]
    PolarHeat,
}

impl Recursion {
    /// `a_{n+1}/a_n`.
    pub fn step(self, n: u32) -> Rational {
        match self {
            Recursion::OddProduct => Rational::from((1, (2 * n + 1) * (2 * n + 3))),
            Recursion::PolarHeat => Rational::from((1, 4 * (n + 1) * (n + 1))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Recursion::OddProduct => "odd-product",
            Recursion::PolarHeat => "polar-heat",
        }
    }
}

impl std::str::FromStr for Recursion {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "odd-product" => Ok(Recursion::OddProduct),
            "polar-heat" => Ok(Recursion::PolarHeat),
            other => Err(Error::invalid(
                "recursion",
                format!("unknown recursion `{other}` (expected odd-product or polar-heat)"),
            )),
        }
    }
}

/// Which series a coefficient sequence feeds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CoefficientFamily {
    Heat,
    Vorticity(Recursion),
    Velocity(Recursion),
}

fn check_a0(a0: &Rational) -> Result<()> {
    if a0.cmp0() != std::cmp::Ordering::Greater {
        return Err(Error::invalid("a0", "scale must be a positive rational"));
    }
    Ok(())
}

/// `1/(2n)!`.
pub fn heat_coefficient(n: u32) -> Rational {
    Rational::from((Integer::from(1), arith::factorial(2 * n)))
}

/// `a_n` under the odd-product recursion.
pub fn vorticity_coefficient(n: u32, a0: &Rational) -> Result<Rational> {
    vorticity_coefficient_with(Recursion::OddProduct, n, a0)
}

/// `a_n` by iterating the chosen recursion from `a_0`.
pub fn vorticity_coefficient_with(recursion: Recursion, n: u32, a0: &Rational) -> Result<Rational> {
    check_a0(a0)?;
    let mut a = a0.clone();
    for i in 0..n {
        a *= recursion.step(i);
    }
    Ok(a)
}

/// Product form of `a_n`: `(∏_{j=1}^{n} (2j-1)^{-2}) a_0/(2n+1)` for the odd-product
/// recursion and `a_0 / (4^n (n!)²)` for the polar-heat recursion.
pub fn vorticity_closed_form(recursion: Recursion, n: u32, a0: &Rational) -> Result<Rational> {
    check_a0(a0)?;
    Ok(match recursion {
        Recursion::OddProduct => {
            let mut odd = Integer::from(1);
            for j in 1..=n {
                odd *= 2 * j - 1;
            }
            let den = Integer::from(odd.square_ref()) * (2 * n + 1);
            Rational::from((Integer::from(1), den)) * a0
        }
        Recursion::PolarHeat => {
            let f = arith::factorial(n);
            let den = Integer::from(Integer::u_pow_u(4, n)) * Integer::from(f.square_ref());
            Rational::from((Integer::from(1), den)) * a0
        }
    })
}

/// `b_n = a_n / (2(n+1))` (odd-product recursion).
pub fn velocity_coefficient(n: u32, a0: &Rational) -> Result<Rational> {
    velocity_coefficient_with(Recursion::OddProduct, n, a0)
}

pub fn velocity_coefficient_with(recursion: Recursion, n: u32, a0: &Rational) -> Result<Rational> {
    Ok(vorticity_coefficient_with(recursion, n, a0)? / (2 * (n + 1)))
}

impl CoefficientFamily {
    pub fn coefficient(self, n: u32, a0: &Rational) -> Result<Rational> {
        match self {
            CoefficientFamily::Heat => Ok(heat_coefficient(n)),
            CoefficientFamily::Vorticity(r) => vorticity_coefficient_with(r, n, a0),
            CoefficientFamily::Velocity(r) => velocity_coefficient_with(r, n, a0),
        }
    }

    /// Upper bound, valid for every `n' ≥ n`, on `(n'+j+1) c_{n'+1}/c_{n'}`.
    ///
    /// For each family `(n+j+1) c_{n+1}/c_n` is a decreasing function of `n`, so its value
    /// at `n` bounds all later ones. Velocity coefficients are dominated by the vorticity
    /// ratio since `b_{n+1}/b_n = (a_{n+1}/a_n)(n+1)/(n+2)`.
    pub fn ratio_envelope(self, n: u32, j: u32) -> Rational {
        let lead = Rational::from(n + j + 1);
        match self {
            CoefficientFamily::Heat => lead / ((2 * n + 1) * (2 * n + 2)),
            CoefficientFamily::Vorticity(r) | CoefficientFamily::Velocity(r) => lead * r.step(n),
        }
    }
}

/// Lazily extended, memoized coefficient list.
#[derive(Debug)]
pub struct CoefficientSequence {
    family: CoefficientFamily,
    a0: Rational,
    values: Mutex<Vec<Rational>>,
}

impl Clone for CoefficientSequence {
    fn clone(&self) -> Self {
        CoefficientSequence {
            family: self.family,
            a0: self.a0.clone(),
            values: Mutex::new(self.values.lock().expect("poisoned").clone()),
        }
    }
}

impl CoefficientSequence {
    pub fn new(family: CoefficientFamily, a0: Rational) -> Result<Self> {
        if family != CoefficientFamily::Heat {
            check_a0(&a0)?;
        }
        Ok(CoefficientSequence {
            family,
            a0,
            values: Mutex::new(Vec::new()),
        })
    }

    pub fn family(&self) -> CoefficientFamily {
        self.family
    }

    pub fn a0(&self) -> &Rational {
        &self.a0
    }

    pub fn value(&self, n: usize) -> Rational {
        self.prefix(n)[n].clone()
    }

    /// `c_0, ..., c_n`.
    pub fn prefix(&self, n: usize) -> Vec<Rational> {
        let mut v = self.values.lock().expect("poisoned");
        while v.len() <= n {
            let i = v.len() as u32;
            let next = match (self.family, v.last()) {
                (_, None) => self
                    .family
                    .coefficient(0, &self.a0)
                    .expect("a0 validated at construction"),
                (CoefficientFamily::Heat, Some(prev)) => {
                    Rational::from(prev / ((2 * i - 1) * (2 * i)))
                }
                (CoefficientFamily::Vorticity(r), Some(prev)) => {
                    Rational::from(prev * &r.step(i - 1))
                }
                (CoefficientFamily::Velocity(r), Some(prev)) => {
                    // b_i = b_{i-1} · step(i-1) · i/(i+1)
                    Rational::from(prev * &r.step(i - 1)) * Rational::from((i, i + 1))
                }
            };
            v.push(next);
        }
        v[..=n].to_vec()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: i64, d: i64) -> Rational {
        Rational::from((p, d))
    }

    #[test]
    fn heat_values() {
        assert_eq!(heat_coefficient(0), q(1, 1));
        assert_eq!(heat_coefficient(1), q(1, 2));
        assert_eq!(heat_coefficient(3), q(1, 720));
    }

    #[test]
    fn vorticity_values() {
        let one = q(1, 1);
        assert_eq!(vorticity_coefficient(0, &one).unwrap(), one);
        assert_eq!(vorticity_coefficient(1, &one).unwrap(), q(1, 3));
        assert_eq!(vorticity_coefficient(2, &one).unwrap(), q(1, 45));
        let polar = Recursion::PolarHeat;
        assert_eq!(vorticity_coefficient_with(polar, 1, &one).unwrap(), q(1, 4));
        assert_eq!(vorticity_coefficient_with(polar, 2, &one).unwrap(), q(1, 64));
    }

    #[test]
    fn velocity_values() {
        let one = q(1, 1);
        assert_eq!(velocity_coefficient(0, &one).unwrap(), q(1, 2));
        assert_eq!(velocity_coefficient(1, &one).unwrap(), q(1, 12));
        assert_eq!(velocity_coefficient(0, &q(2, 1)).unwrap(), q(1, 1));
    }

    #[test]
    fn rejects_nonpositive_scale() {
        assert!(vorticity_coefficient(1, &q(0, 1)).is_err());
        assert!(velocity_coefficient(1, &q(-1, 2)).is_err());
        assert!(CoefficientSequence::new(CoefficientFamily::Vorticity(Recursion::PolarHeat), q(-1, 1)).is_err());
    }

    #[test]
    fn memoized_sequence_matches_direct() {
        for fam in [
            CoefficientFamily::Heat,
            CoefficientFamily::Vorticity(Recursion::OddProduct),
            CoefficientFamily::Velocity(Recursion::OddProduct),
            CoefficientFamily::Vorticity(Recursion::PolarHeat),
            CoefficientFamily::Velocity(Recursion::PolarHeat),
        ] {
            let a0 = q(7, 3);
            let seq = CoefficientSequence::new(fam, a0.clone()).unwrap();
            let pre = seq.prefix(30);
            for (n, c) in pre.iter().enumerate() {
                assert_eq!(*c, fam.coefficient(n as u32, &a0).unwrap(), "{fam:?} n={n}");
            }
        }
    }

    #[test]
    fn ratio_envelope_dominates_and_decreases() {
        let a0 = q(1, 1);
        for fam in [
            CoefficientFamily::Heat,
            CoefficientFamily::Vorticity(Recursion::OddProduct),
            CoefficientFamily::Velocity(Recursion::OddProduct),
            CoefficientFamily::Vorticity(Recursion::PolarHeat),
            CoefficientFamily::Velocity(Recursion::PolarHeat),
        ] {
            let seq = CoefficientSequence::new(fam, a0.clone()).unwrap();
            let c = seq.prefix(301);
            for j in 0..6u32 {
                for n in 0..300u32 {
                    let env = fam.ratio_envelope(n, j);
                    let actual = Rational::from(&c[n as usize + 1] / &c[n as usize]) * (n + j + 1);
                    assert!(actual <= env, "{fam:?} n={n} j={j}");
                    assert!(fam.ratio_envelope(n + 1, j) <= env, "{fam:?} not decreasing at n={n}");
                }
            }
        }
    }
}

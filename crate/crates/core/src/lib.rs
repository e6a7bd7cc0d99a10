//! Construction and certified verification of flat-function power-series solutions:
//! Tychonoff-type heat solutions on the line, radial vorticity/velocity/pressure solutions
//! of the 2-D incompressible Navier-Stokes equations with zero initial data, and
//! Cole-Hopf solutions of viscous Burgers.
//!
//! Layers, bottom-up:
//! - [`arith`]: outward-rounded MPFR intervals and [`CertifiedValue`].
//! - [`flat`]: derivative polynomials of `exp(-t^{-2k})`, certified θ(k), derivative bounds.
//! - [`coeffs`]: exact coefficient sequences.
//! - [`series`]: truncated series with rigorous tail bounds.
//! - [`solutions`]: the concrete solution families.
//! - [`certify`]: residual, limit, growth and distinctness verification reports.

pub mod arith;
pub mod certify;
pub mod coeffs;
pub mod error;
pub mod fd;
pub mod flat;
pub mod quadrature;
pub mod series;
pub mod solutions;

pub use arith::{parse_rational, CertifiedValue, Enclosure, PrecisionPolicy};
pub use coeffs::{CoefficientFamily, CoefficientSequence, Recursion};
pub use error::{Error, Result};
pub use flat::{DerivativeBound, DerivativePolynomial, FlatFamily, Theta};
pub use series::{Coordinate, DerivativeOrder, EvalConfig, TailBound, Target, TruncatedSeries, Variable};

pub use rug::{Float, Integer, Rational};
pub use certify::{
    certify_distinctness, certify_growth, certify_initial_limit, certify_residuals, DistinctnessReport, Equation,
    GrowthReport, LimitPlan, LimitReport, ResidualReport, SamplePlan, SolutionRef, SpaceDomain, Verdict,
};
pub use solutions::{
    BundleSpec, BurgersSolution, HeatSolution, PressureSign, PressureSolution, SolutionBundle, VelocitySolution,
    VorticitySolution,
};

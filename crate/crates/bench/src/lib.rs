//! Shared fixtures for the criterion benchmarks.

use tycho_core::{parse_rational, Rational};

/// Exact rational from a decimal literal used in benchmark inputs.
pub fn q(s: &str) -> Rational {
    parse_rational(s).expect("valid literal")
}

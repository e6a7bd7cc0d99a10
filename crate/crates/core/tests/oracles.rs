use rug::ops::Pow;
use rug::{Float, Integer, Rational};
use tycho_core::arith::{self, Enclosure};
use tycho_core::coeffs::{heat_coefficient, vorticity_closed_form};
use tycho_core::fd::Stencil;
use tycho_core::flat::{self, DerivativeTable};
use tycho_core::solutions::{make_heat_solution, perp};
use tycho_core::{
    BundleSpec, Coordinate, DerivativeOrder, EvalConfig, FlatFamily, Recursion, SolutionBundle, Target, TruncatedSeries,
};

fn q(p: i64, d: i64) -> Rational {
    Rational::from((p, d))
}

#[test]
fn derivative_polynomials_have_expected_degree_and_leading_coefficient() {
    for k in 1..=3u32 {
        for n in 0..=20usize {
            let p = flat::derivative_polynomial(k, n).unwrap();
            assert_eq!(p.degree(), n * (2 * k as usize + 1));
            assert_eq!(*p.leading_coefficient(), Integer::from(2 * k).pow(n as u32));
        }
    }
}

#[test]
fn flat_derivatives_match_difference_quotients() {
    // f^{(n+1)}(t) against a five-point difference of f^{(n)} at high precision.
    let k = 1;
    let t = q(3, 4);
    let h = q(1, 1 << 14);
    let fam = FlatFamily::new(k).unwrap();
    let table = DerivativeTable::for_family(fam);
    for n in 0..6usize {
        let samples = Stencil::offsets(&h).map(|o| {
            let tt = Rational::from(&t + &o);
            let s = Rational::from(tt.recip_ref());
            let qn = table.polynomial(n).unwrap().eval(&s);
            fam.value_power(&tt, 1, 256).unwrap().mul_rational(&qn)
        });
        let fd = Stencil::First.apply(&samples, &h).midpoint().to_f64();
        let exact = flat::eval_flat_derivative(k, n + 1, &t, &Default::default()).unwrap().value_f64();
        assert!((fd - exact).abs() <= 1e-9 * exact.abs().max(1.0), "n={n}: {fd} vs {exact}");
    }
}

#[test]
fn cauchy_bounds_dominate_derivatives() {
    for k in [1u32, 2] {
        for t in [q(1, 4), q(1, 2), q(1, 1), q(3, 1)] {
            let bounds = flat::cauchy_bounds(k, &t, 40, 128).unwrap();
            let s = Rational::from(t.recip_ref());
            let f = FlatFamily::new(k).unwrap().value_power(&t, 1, 128).unwrap();
            let table = DerivativeTable::for_family(FlatFamily::new(k).unwrap());
            let qs = table.values_at(&s, 40).unwrap();
            for (n, (b, qn)) in bounds.iter().zip(&qs).enumerate() {
                let v = f.mul_rational(qn).mag_upper();
                assert!(v <= *b, "k={k} t={t} n={n}");
            }
        }
    }
}

#[test]
fn theta_circle_minimum_holds_under_independent_sampling() {
    for k in 1..=3u32 {
        let theta = flat::certified_theta(k).unwrap().value;
        let m = 200_003;
        let mut min = f64::INFINITY;
        for i in 0..m {
            let phi = std::f64::consts::TAU * i as f64 / m as f64;
            let (re, im) = (1.0 + theta * phi.cos(), theta * phi.sin());
            // Re(w^{-2k}) through repeated complex multiplication.
            let d = re * re + im * im;
            let (ir, ii) = (re / d, -im / d);
            let (mut pr, mut pi) = (1.0f64, 0.0f64);
            for _ in 0..2 * k {
                let nr = pr * ir - pi * ii;
                pi = pr * ii + pi * ir;
                pr = nr;
            }
            min = min.min(pr);
        }
        assert!(min >= 0.5 - 1e-9, "k={k}: {min}");
    }
}

#[test]
fn heat_coefficients_are_reciprocal_even_factorials() {
    let mut fact = Integer::from(1);
    for n in 0..40u32 {
        if n > 0 {
            fact *= (2 * n - 1) * (2 * n);
        }
        assert_eq!(heat_coefficient(n), Rational::from((Integer::from(1), fact.clone())));
    }
}

#[test]
fn polar_heat_coefficients_solve_the_radial_heat_recursion() {
    // Σ a_n f^{(n)} r^{2n} solves ω_t = ω_rr + ω_r/r iff a_n = 4(n+1)² a_{n+1}.
    for n in 0..50u32 {
        let a = vorticity_closed_form(Recursion::PolarHeat, n, &q(5, 2)).unwrap();
        let b = vorticity_closed_form(Recursion::PolarHeat, n + 1, &q(5, 2)).unwrap();
        assert_eq!(a, b * (4 * (n + 1) * (n + 1)));
    }
}

#[test]
fn evaluation_agrees_with_a_long_exact_partial_sum() {
    let cfg = EvalConfig::default();
    let heat = make_heat_solution(1, 10).unwrap();
    let long = heat.series().with_order(300);
    for (x, t) in [(q(1, 2), q(1, 1)), (q(3, 1), q(1, 2)), (q(-2, 1), q(2, 1))] {
        let v = heat.value(&x, &t, Target::relative(1e-20), &cfg).unwrap_or_else(|e| panic!("x={x} t={t}: {e}"));
        let exact = long.partial_sum_exact(&Coordinate::Linear(x.clone()), &t, DerivativeOrder::VALUE).unwrap();
        let brute = FlatFamily::new(1).unwrap().value_power(&t, 1, 256).unwrap().mul_rational(&exact);
        let diff = Float::with_val(256, &v.value - brute.midpoint()).abs();
        assert!(diff <= Float::with_val(256, &v.error * 1.001), "x={x} t={t}");
    }
}

#[test]
fn heat_solution_is_even_and_velocity_is_tangential() {
    let cfg = EvalConfig::default();
    let b = SolutionBundle::new(BundleSpec::new(1, q(1, 1), 20)).unwrap();
    for x in [q(1, 3), q(7, 5)] {
        let a = b.heat.value(&x, &q(1, 1), Target::relative(1e-25), &cfg).unwrap();
        let c = b.heat.value(&Rational::from(-&x), &q(1, 1), Target::relative(1e-25), &cfg).unwrap();
        assert_eq!(a.value, c.value);
    }
    let x = [q(2, 3), q(-1, 4)];
    let u = b.velocity.velocity(&x, &q(1, 1), Target::relative(1e-25), &cfg).unwrap();
    let dot = u[0].enclosure().mul_rational(&x[0]).add(&u[1].enclosure().mul_rational(&x[1]));
    assert!(dot.contains_zero());
    assert_eq!(perp(&x), [q(1, 4), q(2, 3)]);
}

#[test]
fn heat_equation_holds_for_difference_quotients_of_certified_values() {
    // u_t - u_xx by five-point differences of certified values, independent of the residual suite.
    let cfg = EvalConfig::default();
    let heat = make_heat_solution(1, 30).unwrap();
    let h = q(1, 256);
    for (x, t) in [(q(1, 2), q(1, 1)), (q(1, 5), q(3, 2))] {
        let target = Target::relative(1e-40);
        let in_x = Stencil::offsets(&h).map(|o| {
            heat.value(&Rational::from(&x + &o), &t, target, &cfg).unwrap().enclosure()
        });
        let in_t = Stencil::offsets(&h).map(|o| {
            heat.value(&x, &Rational::from(&t + &o), target, &cfg).unwrap().enclosure()
        });
        let r = Stencil::First.apply(&in_t, &h).sub(&Stencil::Second.apply(&in_x, &h));
        assert!(r.mag_upper().to_f64() < 1e-8, "{}", r.mag_upper());
    }
}

#[test]
fn tail_bound_covers_the_next_hundred_terms() {
    let s = TruncatedSeries::new(tycho_core::CoefficientFamily::Heat, 1, q(1, 1), 12).unwrap();
    let c = Coordinate::Linear(q(3, 2));
    let t = q(1, 1);
    let tail = s.tail_bound(&c, &t, DerivativeOrder::VALUE, 128).unwrap();
    let extra = s.with_order(112).partial_sum_exact(&c, &t, DerivativeOrder::VALUE).unwrap()
        - s.partial_sum_exact(&c, &t, DerivativeOrder::VALUE).unwrap();
    let f = FlatFamily::new(1).unwrap().value_power(&t, 1, 128).unwrap();
    assert!(f.mul_rational(&extra).mag_upper() <= tail.bound);
}

#[test]
fn enclosure_products_contain_exact_products() {
    let a = q(1, 3);
    let b = q(-22, 7);
    let ea = Enclosure::from_rational(&a, 64);
    let eb = Enclosure::from_rational(&b, 64);
    assert!(ea.mul(&eb).to_certified().contains(&Rational::from(&a * &b)));
    assert!(arith::exp_neg_up(&q(1, 1), 64) >= Float::with_val(64, -1).exp());
}

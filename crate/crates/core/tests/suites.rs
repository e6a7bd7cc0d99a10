use tycho_core::{
    certify_residuals, BundleSpec, EvalConfig, Equation, PressureSign, Rational, SamplePlan, SolutionBundle, Verdict,
};

fn bundle(k: u32, order: usize) -> SolutionBundle {
    SolutionBundle::new(BundleSpec::new(k, Rational::from(1), order)).unwrap()
}

fn run(b: &SolutionBundle, eq: Equation, count: usize) -> Verdict {
    let plan = SamplePlan::default_for(eq, count);
    let r = certify_residuals(b, eq, &plan, &EvalConfig::default()).unwrap();
    for s in r.samples.iter().filter(|s| s.status != tycho_core::certify::SampleStatus::Pass) {
        eprintln!("{}: {s:?}", eq.name());
    }
    r.verdict
}

#[test]
fn every_residual_suite_passes_for_k1() {
    let b = bundle(1, 30);
    for eq in Equation::ALL {
        assert_eq!(run(&b, eq, 32), Verdict::Pass, "{}", eq.name());
    }
}

#[test]
fn every_residual_suite_passes_for_k2() {
    let b = bundle(2, 20);
    for eq in Equation::ALL {
        assert_eq!(run(&b, eq, 12), Verdict::Pass, "{}", eq.name());
    }
}

#[test]
fn momentum_fails_without_pressure() {
    let mut spec = BundleSpec::new(1, Rational::from(1), 20);
    spec.pressure_order = 0;
    let b = SolutionBundle::new(spec).unwrap();
    assert_eq!(run(&b, Equation::NsMomentum, 8), Verdict::Fail);
}

#[test]
fn stated_pressure_sign_solves_its_own_ode_but_not_momentum() {
    let mut spec = BundleSpec::new(1, Rational::from(1), 20);
    spec.pressure_sign = PressureSign::Stated;
    let b = SolutionBundle::new(spec).unwrap();
    assert_eq!(run(&b, Equation::PressureOde, 10), Verdict::Pass);
    assert_eq!(run(&b, Equation::NsMomentum, 8), Verdict::Fail);
}

#[test]
fn odd_product_recursion_fails_the_polar_equation() {
    let mut spec = BundleSpec::new(1, Rational::from(1), 20);
    spec.recursion = tycho_core::Recursion::OddProduct;
    let b = SolutionBundle::new(spec).unwrap();
    assert_eq!(run(&b, Equation::VorticityPolar, 8), Verdict::Fail);
}

mod ladders {
    use tycho_core::certify::SampleStatus;
    use tycho_core::{
        certify_distinctness, certify_growth, certify_initial_limit, certify_residuals, BundleSpec, Equation, Error,
        EvalConfig, LimitPlan, Rational, SamplePlan, SolutionBundle, SolutionRef, Verdict,
    };

    fn q(p: i64, d: i64) -> Rational {
        Rational::from((p, d))
    }

    fn bundle(k: u32) -> SolutionBundle {
        SolutionBundle::new(BundleSpec::new(k, q(1, 1), 20)).unwrap()
    }

    #[test]
    fn generous_threshold_passes_and_time_floor_is_enforced() {
        let b = bundle(1);
        let cfg = EvalConfig::default();
        let plan = LimitPlan::new(q(1, 1), q(4, 5), 3, 1e6);
        let r = certify_initial_limit(SolutionRef::Vorticity(&b.vorticity), &plan, &cfg).unwrap();
        assert_eq!(r.verdict, Verdict::Pass);
        assert!(r.strictly_decreasing);
        let deep = LimitPlan::new(q(1, 1), q(4, 5), 10, 1e-12);
        assert!(matches!(
            certify_initial_limit(SolutionRef::Heat(&b.heat), &deep, &cfg),
            Err(Error::BelowTimeFloor { .. })
        ));
    }

    #[test]
    fn unreachable_threshold_fails() {
        let b = bundle(1);
        let plan = LimitPlan::new(q(1, 1), q(4, 5), 1, 1e-300);
        let r = certify_initial_limit(SolutionRef::Heat(&b.heat), &plan, &EvalConfig::default()).unwrap();
        assert_eq!(r.verdict, Verdict::Fail);
        assert!(!r.final_below_threshold);
    }

    #[test]
    fn growth_ladder_validation_and_truncation_limits() {
        let b = bundle(1);
        let cfg = EvalConfig::default();
        let heat = SolutionRef::Heat(&b.heat);
        assert!(matches!(certify_growth(heat, &q(1, 1), 4, &[q(2, 1)], &cfg), Err(Error::InvalidParameter { .. })));
        assert!(certify_growth(heat, &q(1, 1), 4, &[q(4, 1), q(2, 1)], &cfg).is_err());
        let tight = EvalConfig { max_order: 21, ..EvalConfig::default() };
        let r = certify_growth(heat, &q(1, 1), 4, &[q(8, 1), q(16, 1)], &tight).unwrap();
        assert_eq!(r.verdict, Verdict::Inconclusive);
        assert_eq!(r.label, "finite-ladder monotonicity");
    }

    #[test]
    fn identical_solutions_are_not_distinct() {
        let a = bundle(1);
        let b = bundle(1);
        let cfg = EvalConfig::default();
        let r = certify_distinctness(SolutionRef::Heat(&a.heat), SolutionRef::Heat(&b.heat), &[q(1, 1)], &q(1, 1), &cfg)
            .unwrap();
        assert_eq!(r.verdict, Verdict::Fail);
        assert!(r.margin <= 0.0);
        let mixed = certify_distinctness(SolutionRef::Heat(&a.heat), SolutionRef::Velocity(&b.velocity), &[q(1, 1)], &q(1, 1), &cfg);
        assert!(matches!(mixed, Err(Error::Incompatible(_))));
    }

    #[test]
    fn pole_guard_excludes_points_and_reports_them() {
        let mut b = bundle(1);
        b.burgers = b.burgers.clone().with_guard(1e3);
        let plan = SamplePlan::default_for(Equation::Burgers, 4);
        let r = certify_residuals(&b, Equation::Burgers, &plan, &EvalConfig::default()).unwrap();
        assert!(r.samples.iter().all(|s| s.status == SampleStatus::Excluded && s.note.is_some()));
        assert_eq!(r.verdict, Verdict::Inconclusive);
    }

    #[test]
    fn raising_truncation_order_keeps_suites_passing() {
        let cfg = EvalConfig::default();
        for order in [15, 30, 45] {
            let b = SolutionBundle::new(BundleSpec::new(1, q(1, 1), order)).unwrap();
            for eq in [Equation::Heat, Equation::NsMomentum] {
                let r = certify_residuals(&b, eq, &SamplePlan::default_for(eq, 6), &cfg).unwrap();
                assert_eq!(r.verdict, Verdict::Pass, "{} at N={order}", eq.name());
            }
        }
    }

    #[test]
    fn reports_serialize_deterministically() {
        let b = bundle(1);
        let plan = SamplePlan::default_for(Equation::Jacobian, 6);
        let cfg = EvalConfig::default();
        let a = certify_residuals(&b, Equation::Jacobian, &plan, &cfg).unwrap();
        let c = certify_residuals(&b, Equation::Jacobian, &plan, &cfg).unwrap();
        assert_eq!(a, c);
        assert_eq!(a.samples.iter().map(|s| s.index).collect::<Vec<_>>(), (0..6).collect::<Vec<_>>());
    }
}

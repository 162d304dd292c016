//! Randomized and corpus-driven invariants: unitary grid operations,
//! convolution algebra, resolution scaling laws, the distinction preorder,
//! and the rotation self-consistency of sampled 3D measures.

use covobs::{
    char_fn, compare, convolve, is_alpha_regular, limit_of_resolution, make_dirac, make_gaussian,
    make_uniform, mix, outcome_distribution, position_distribution, rotation_covariance_test,
    sinc_measure, GridSpec, Measure1D, MixedState, Observable1D, Relation, RotInvMeasure3D,
    SampleCloud3D, WaveFunction,
};
use proptest::prelude::*;

fn grid_small() -> GridSpec {
    GridSpec::new(256, 40.0).unwrap()
}

fn grid_mid() -> GridSpec {
    GridSpec::new(1024, 40.0).unwrap()
}

/// Random smear from the gaussian / uniform / atom / mixture families.
fn smear_strategy() -> impl Strategy<Value = Measure1D> {
    let g = grid_small();
    prop_oneof![
        (-2.0..2.0f64, 0.3..1.2f64)
            .prop_map(move |(c, s)| make_gaussian(c, s, g).unwrap()),
        (-2.0..2.0f64, 0.3..2.0f64)
            .prop_map(move |(c, w)| make_uniform(c, w, g).unwrap()),
        (-32i64..32i64).prop_map(move |k| make_dirac(k as f64 * g.dx(), g)),
        (-1.5..1.5f64, 0.3..0.9f64, 0.2..0.8f64).prop_map(move |(c, s, w)| {
            mix(&[
                (w, make_gaussian(c, s, g).unwrap()),
                (1.0 - w, make_dirac(0.0, g)),
            ])
            .unwrap()
        }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn grid_operations_preserve_the_norm(
        center in -2.0..2.0f64,
        sigma in 0.4..1.0f64,
        q in -3.0..3.0f64,
        p in -3.0..3.0f64,
        a in 0.4..2.0f64,
    ) {
        let psi = WaveFunction::gaussian(grid_small(), center, sigma).unwrap();
        for w in [
            psi.translate(q).unwrap(),
            psi.boost(p).unwrap(),
            psi.dilate(a, center).unwrap(),
            psi.fourier(),
        ] {
            prop_assert!((w.norm() - 1.0).abs() <= 1e-8, "norm {}", w.norm());
        }
    }

    #[test]
    fn convolution_multiplies_characteristic_functions(
        a in smear_strategy(),
        b in smear_strategy(),
        xi in -8.0..8.0f64,
    ) {
        let c = convolve(&a, &b).unwrap();
        let lhs = c.char_eval(xi);
        let rhs = a.char_eval(xi) * b.char_eval(xi);
        prop_assert!((lhs - rhs).norm() <= 1e-8, "residual {}", (lhs - rhs).norm());
    }

    #[test]
    fn characteristic_functions_are_hermitian(
        m in smear_strategy(),
        xi in 0.0..10.0f64,
    ) {
        let d = (m.char_eval(-xi) - m.char_eval(xi).conj()).norm();
        prop_assert!(d <= 1e-12, "asymmetry {d}");
    }

    #[test]
    fn convolution_conserves_mass(a in smear_strategy(), b in smear_strategy()) {
        let c = convolve(&a, &b).unwrap();
        prop_assert!((c.mass() - 1.0).abs() <= 1e-9, "mass {}", c.mass());
    }

    #[test]
    fn window_supremum_is_monotone_and_saturates(
        m in smear_strategy(),
        lo in 0.05..3.0f64,
        step in 0.05..3.0f64,
    ) {
        let g_lo = m.sliding_sup(lo);
        let g_hi = m.sliding_sup(lo + step);
        prop_assert!(g_hi >= g_lo - 1e-12, "g({lo}) = {g_lo} > g({}) = {g_hi}", lo + step);
        // any window wider than the whole grid catches everything
        prop_assert!((m.sliding_sup(2.0 * m.grid.length) - m.mass()).abs() <= 1e-12);
    }

    #[test]
    fn every_smearing_is_below_the_sharp_class(m in smear_strategy()) {
        let verdict = compare(&m, &make_dirac(0.0, grid_small()), 1e-6, 8.0, 256).unwrap();
        prop_assert!(
            matches!(verdict.relation, Relation::LeftLessEq | Relation::Equivalent),
            "{:?}",
            verdict.relation
        );
    }

    #[test]
    fn comparison_is_reflexive(m in smear_strategy()) {
        let verdict = compare(&m, &m, 1e-6, 8.0, 256).unwrap();
        prop_assert!(matches!(verdict.relation, Relation::Equivalent));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn outcomes_are_linear_in_the_state(
        w in 0.1..0.9f64,
        c1 in -1.5..1.5f64,
        c2 in -1.5..1.5f64,
        s_smear in 0.4..1.0f64,
    ) {
        let g = grid_mid();
        let obs = Observable1D::position(make_gaussian(0.0, s_smear, g).unwrap());
        let psi1 = WaveFunction::gaussian(g, c1, 0.8).unwrap();
        let psi2 = WaveFunction::hermite(g, 2, c2, 1.0).unwrap();
        let mixed = MixedState::new(vec![(w, psi1.clone()), (1.0 - w, psi2.clone())]).unwrap();

        let d_mixed = outcome_distribution(&obs, &mixed).unwrap();
        let d1 = outcome_distribution(&obs, &MixedState::pure(psi1)).unwrap();
        let d2 = outcome_distribution(&obs, &MixedState::pure(psi2)).unwrap();
        let sup = d_mixed
            .density
            .iter()
            .zip(d1.density.iter().zip(&d2.density))
            .map(|(m, (a, b))| (m - (w * a + (1.0 - w) * b)).abs())
            .fold(0.0f64, f64::max);
        prop_assert!(sup <= 1e-9, "sup {sup}");
    }

    #[test]
    fn translating_a_state_translates_its_position_density(
        center in -1.0..1.0f64,
        steps in -40i64..40i64,
    ) {
        let g = grid_mid();
        let q = steps as f64 * g.dx();
        let psi = WaveFunction::gaussian(g, center, 0.9).unwrap();
        let moved = position_distribution(&MixedState::pure(psi.translate(q).unwrap()));
        let base = position_distribution(&MixedState::pure(psi))
            .translated(q)
            .unwrap();
        let sup = moved
            .density
            .iter()
            .zip(&base.density)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        prop_assert!(sup <= 1e-8, "sup {sup}");
    }

    #[test]
    fn resolution_scales_and_ignores_shifts(
        sigma in 0.4..1.0f64,
        s_idx in 0usize..3,
        steps in -128i64..128i64,
    ) {
        let g = grid_mid();
        let s = [0.5, 2.0, 3.0][s_idx];
        let rho = make_gaussian(0.0, sigma, g).unwrap();
        let base = limit_of_resolution(&rho, 0.02).unwrap();

        let scaled = limit_of_resolution(&rho.scaled(s).unwrap(), 0.02).unwrap();
        let tol = scaled.tolerance.max(s * base.tolerance);
        prop_assert!(
            (scaled.gamma - s * base.gamma).abs() <= 2.0 * tol,
            "gamma({s}x) = {} vs {}",
            scaled.gamma,
            s * base.gamma
        );

        let t = steps as f64 * g.dx();
        let shifted = limit_of_resolution(&rho.translated(t).unwrap(), 0.02).unwrap();
        prop_assert!(
            (shifted.gamma - base.gamma).abs() <= base.tolerance,
            "gamma shifted by {t}: {} vs {}",
            shifted.gamma,
            base.gamma
        );
    }

    #[test]
    fn resolution_brackets_the_regularity_transition(m in smear_strategy()) {
        let report = limit_of_resolution(&m, 0.05).unwrap();
        prop_assert!(is_alpha_regular(&m, report.gamma));
        let below = report.gamma - 2.0 * report.tolerance;
        if below > 0.0 {
            prop_assert!(!is_alpha_regular(&m, below));
        }
    }
}

#[test]
fn comparison_is_transitive_on_nested_band_limits() {
    let g = GridSpec::new(2048, 40.0).unwrap();
    let narrow = sinc_measure(0.5, g).unwrap();
    let wide = sinc_measure(1.5, g).unwrap();
    let gaussian = make_gaussian(0.0, 1.0, g).unwrap();
    let rel = |a: &Measure1D, b: &Measure1D| compare(a, b, 1e-6, 6.0, 1024).unwrap().relation;
    assert!(matches!(rel(&narrow, &wide), Relation::LeftLessEq));
    assert!(matches!(rel(&wide, &gaussian), Relation::LeftLessEq));
    assert!(matches!(rel(&narrow, &gaussian), Relation::LeftLessEq));
}

#[test]
fn no_smearing_class_is_minimal() {
    let g = GridSpec::new(2048, 40.0).unwrap();
    let corpus = vec![
        make_gaussian(0.0, 1.0, g).unwrap(),
        make_gaussian(0.4, 1.8, g).unwrap(),
        make_uniform(0.0, 2.0, g).unwrap(),
        mix(&[
            (0.5, make_gaussian(-0.5, 0.7, g).unwrap()),
            (0.5, make_gaussian(0.8, 1.1, g).unwrap()),
        ])
        .unwrap(),
    ];
    for rho in &corpus {
        let radius = char_fn(rho, 8.0, 1024)
            .unwrap()
            .support_radius()
            .expect("corpus members have detectable support");
        let below = sinc_measure(radius / 2.0, g).unwrap();
        let verdict = compare(&below, rho, 1e-6, 8.0, 1024).unwrap();
        assert!(
            matches!(verdict.relation, Relation::LeftLessEq),
            "{:?} for radius {radius}",
            verdict.relation
        );
    }
}

#[test]
fn effect_suprema_satisfy_the_complement_duality() {
    let g = grid_mid();
    let dx = g.dx();
    let smears = [
        make_gaussian(0.0, 0.7, g).unwrap(),
        make_uniform(0.0, 1.6, g).unwrap(),
        mix(&[
            (0.6, make_gaussian(0.3, 0.5, g).unwrap()),
            (0.4, make_dirac(-16.0 * dx, g)),
        ])
        .unwrap(),
    ];
    let windows = [(-0.9, 0.4), (-2.0, -0.5), (0.1, 2.6)];
    // scan range generous enough that the shifted set stays inside the grid
    let scan: Vec<f64> = (-600..=600).map(|k| k as f64 * dx * 0.25).collect();
    for rho in &smears {
        for (a, b) in windows {
            let obs = Observable1D::position(rho.clone());
            let shifted_mass = |x: f64| rho.closed_interval_mass(a - x, b - x);
            let inf = scan.iter().map(|&x| shifted_mass(x)).fold(f64::INFINITY, f64::min);
            let complement = covobs::IntervalUnion::interval(a, b)
                .unwrap()
                .complement_within(-20.0, 20.0)
                .unwrap();
            let sup_c = covobs::effect_sup(&obs, &complement);
            assert!(
                inf <= 1.0 - sup_c + 1e-8,
                "inf {inf} vs 1 - {sup_c} on [{a}, {b}]"
            );
        }
    }
}

#[test]
fn rotating_samples_matches_fresh_samples() {
    let g = GridSpec::new(2048, 40.0).unwrap();
    let density: Vec<f64> = (0..g.n)
        .map(|j| {
            let r = g.x(j);
            if r < 0.0 {
                0.0
            } else {
                r * r * (-r * r / 2.0).exp()
            }
        })
        .collect();
    let total: f64 = density.iter().sum::<f64>() * g.dx();
    let radial = Measure1D::new(
        g,
        density.into_iter().map(|d| d / total).collect(),
        Vec::new(),
    )
    .unwrap();
    let rho = RotInvMeasure3D::new(0.0, radial).unwrap();
    // a cloud of origin points turns the covariance check into a pure
    // comparison of rotated draws against fresh draws
    let n = 40_000;
    let origins = SampleCloud3D::new(vec![[0.0, 0.0, 0.0]; n], 0).unwrap();
    let r = [[0.0, 0.0, 1.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]];
    let report = rotation_covariance_test(&rho, &origins, &r, 2024).unwrap();
    assert!(report.pass, "{report:?}");
}

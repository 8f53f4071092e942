use proptest::prelude::*;

use scorelab::categorical::{
    expected_brier_closed_form, expected_ls_gap, expected_score, score, CategoricalOutcome,
};
use scorelab::continuous::{expected_score_density, DensityForecastPair};
use scorelab::perturb::{
    make_binary_pair, make_odd_perturbation, max_feasible_epsilon, PerturbationShape, ShapeKind,
};
use scorelab::{Grid, GridDensity, GridFunction, ProbVector, Rule};

fn prob_vector(m: usize) -> impl Strategy<Value = ProbVector> {
    prop::collection::vec(0.01f64..1.0, m).prop_map(|raw| {
        let s: f64 = raw.iter().sum();
        ProbVector::new(raw.into_iter().map(|v| v / s).collect()).unwrap()
    })
}

fn shape_kind() -> impl Strategy<Value = ShapeKind> {
    prop_oneof![
        Just(ShapeKind::Bump),
        Just(ShapeKind::Sine),
        Just(ShapeKind::TanhStep)
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn categorical_rules_are_proper(
        (p, f) in (2usize..6).prop_flat_map(|m| (prob_vector(m), prob_vector(m)))
    ) {
        for rule in Rule::CATEGORICAL {
            let at_p = expected_score(rule, &p, &p).unwrap();
            let at_f = expected_score(rule, &f, &p).unwrap();
            prop_assert!(at_p <= at_f + 1e-14, "{rule}: {at_p} > {at_f}");
        }
    }

    #[test]
    fn brier_closed_form_matches(p in prob_vector(4), f in prob_vector(4)) {
        let direct = expected_score(Rule::Brier, &f, &p).unwrap();
        prop_assert!((direct - expected_brier_closed_form(&f, &p)).abs() < 1e-14);
    }

    #[test]
    fn rps_reduces_to_brier_for_two_categories(a in 0.0f64..=1.0, j in 1usize..=2) {
        let f = ProbVector::binary(a).unwrap();
        let j = CategoricalOutcome::new(j, 2).unwrap();
        let b = score(Rule::Brier, &f, j).unwrap();
        let r = score(Rule::Rps, &f, j).unwrap();
        prop_assert!((b - r).abs() < 1e-15);
    }

    #[test]
    fn spherical_is_bounded(f in prob_vector(5), j in 1usize..=5) {
        let s = score(Rule::Spherical, &f, CategoricalOutcome::new(j, 5).unwrap()).unwrap();
        prop_assert!((-1.0..=0.0).contains(&s));
    }

    #[test]
    fn binary_pairs_are_symmetric_departures(p in 0.05f64..0.95, frac in 0.0f64..0.99) {
        let gamma = frac * p.min(1.0 - p);
        let (plus, minus) = make_binary_pair(p, gamma).unwrap();
        let mid = 0.5 * (plus.probs()[0] + minus.probs()[0]);
        prop_assert!((mid - p).abs() < 1e-15);
        let b_plus = expected_score(Rule::Brier, &plus, &ProbVector::binary(p).unwrap()).unwrap();
        let b_minus = expected_score(Rule::Brier, &minus, &ProbVector::binary(p).unwrap()).unwrap();
        prop_assert!((b_plus - b_minus).abs() < 1e-15);
    }

    #[test]
    fn log_gap_sign_follows_skew(p in 0.51f64..0.99, frac in 0.01f64..0.99) {
        let gamma = frac * (1.0 - p);
        prop_assert!(expected_ls_gap(p, gamma).unwrap() > 0.0);
        prop_assert!(expected_ls_gap(1.0 - p, gamma).unwrap() < 0.0);
    }

    #[test]
    fn scalar_path_stays_valid(
        kind in shape_kind(),
        w in 0.55f64..0.9,
        mu in 0.3f64..1.5,
        frac in 0.0f64..=1.0,
        c in 0.0f64..=1.0,
    ) {
        let grid = Grid::symmetric(8.0, 513).unwrap();
        let p = GridDensity::skewed_mixture(grid, w, mu).unwrap();
        let shape = PerturbationShape::default_for(kind);
        let emax = max_feasible_epsilon(&shape, &p).unwrap();
        let gamma = make_odd_perturbation(&shape, frac * emax, &p).unwrap();
        let path = gamma.scaled(c);
        path.check_valid_against(&p).unwrap();
        prop_assert!(path.is_sign_constrained());
        let pair = DensityForecastPair::new(p, path).unwrap();
        for f in [pair.plus(), pair.minus()] {
            prop_assert!((f.integral() - 1.0).abs() < 1e-12);
            prop_assert!(f.values().iter().all(|&v| v > 0.0));
        }
    }

    #[test]
    fn density_rules_are_proper(
        w in 0.55f64..0.9,
        shift in -0.5f64..0.5,
        spread in 0.7f64..1.4,
    ) {
        let grid = Grid::symmetric(8.0, 513).unwrap();
        let p = GridDensity::skewed_mixture(grid, w, 1.0).unwrap();
        let f = GridDensity::normal(grid, shift, spread).unwrap();
        for rule in Rule::DENSITY {
            let at_p = expected_score_density(rule, &p, &p).unwrap();
            let at_f = expected_score_density(rule, &f, &p).unwrap();
            prop_assert!(at_p < at_f, "{rule}: {at_p} >= {at_f}");
        }
    }
}

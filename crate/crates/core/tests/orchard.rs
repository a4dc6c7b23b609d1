use radgap::closed_form::gap_sqrt;
use radgap::engine::{exact_gap_at, SequenceSpec};
use radgap::orchard::{compare_to_closed_form, illumination_pattern, shadow_points, PointStatus};
use radgap::ratmod::farey_sequence;
use radgap::{Coefficient, Error, OrchardScene, Rational};

fn relative_errors(scene: &OrchardScene, max_q: u64) -> Vec<(Rational, f64)> {
    compare_to_closed_form(scene, max_q)
        .unwrap()
        .into_iter()
        .filter(|c| c.status == PointStatus::Lit)
        .map(|c| (c.x, c.relative_error.unwrap()))
        .collect()
}

#[test]
fn linear_intercept_converges_like_parabolic() {
    let schedule = [250u64, 500, 1000, 2000];
    let runs: Vec<Vec<(Rational, f64)>> = schedule
        .iter()
        .map(|&k| {
            let scene = OrchardScene::linear(k, Coefficient::sqrt(2), Coefficient::integer(1));
            relative_errors(&scene, 4)
        })
        .collect();
    let last = compare_to_closed_form(
        &OrchardScene::linear(2000, Coefficient::sqrt(2), Coefficient::integer(1)),
        4,
    )
    .unwrap();
    let points = &runs[0];
    assert_eq!(points.len(), 5);
    for (i, &(x, _)) in points.iter().enumerate() {
        let errors: Vec<f64> = runs.iter().map(|r| r[i].1).collect();
        let drops = errors.windows(2).filter(|w| w[1] < w[0]).count();
        assert!(drops >= 2, "{x}: {errors:?}");
        // both intercepts share the closed-form target
        let here = last.iter().find(|c| c.x == x).unwrap();
        assert_eq!(here.closed_form, gap_sqrt(x).unwrap().value);
        assert!(here.relative_error.unwrap() < 0.1);
    }
}

#[test]
fn parabolic_screen_reproduces_gap_function() {
    let scene = OrchardScene::parabolic(141);
    let half = compare_to_closed_form(&scene, 2).unwrap();
    let half = half.iter().find(|c| c.x == Rational::new(1, 2).unwrap()).unwrap();
    assert!(half.relative_error.unwrap() < 0.05);
    for c in compare_to_closed_form(&scene, 6).unwrap() {
        assert!(c.relative_error.unwrap() < 0.1, "{}", c.x);
    }
}

#[test]
fn segments_are_engine_gaps() {
    for k_max in [10u64, 57, 141] {
        let segs = illumination_pattern(&OrchardScene::parabolic(k_max)).unwrap();
        let spec = SequenceSpec::square_roots((k_max + 1) * (k_max + 1) - 1);
        for x in farey_sequence(5).unwrap().into_iter().filter(|x| x.denom() > 1) {
            let m = exact_gap_at(&spec, x).unwrap();
            let xf = x.to_f64();
            let seg = segs
                .iter()
                .find(|s| s.x_lo.to_f64() < xf && s.x_hi.to_f64() > xf)
                .unwrap();
            let (lo, hi) = (seg.lower.unwrap(), seg.upper.unwrap());
            assert_eq!(lo.k * lo.k + lo.m as u64, m.lower.radicand);
            assert_eq!(hi.k * hi.k + hi.m as u64, m.upper.radicand);
        }
    }
}

#[test]
fn windowed_scene_counts_points_inside() {
    let scene = OrchardScene {
        window: radgap::Window { lo: 0.25, hi: 0.5 },
        ..OrchardScene::parabolic(60)
    };
    let shadows = shadow_points(&scene).unwrap();
    let expected = (1..=60u64)
        .flat_map(|k| (1..=2 * k).map(move |m| ((k * k + m) as f64).sqrt() - k as f64))
        .filter(|&x| x > 0.25 && x < 0.5)
        .count();
    assert_eq!(shadows.len(), expected);
    let cmp = compare_to_closed_form(&scene, 4).unwrap();
    let xs: Vec<String> = cmp.iter().map(|c| c.x.to_string()).collect();
    assert_eq!(xs, ["1/4", "1/3", "1/2"]);
    assert_eq!(cmp[0].status, PointStatus::Boundary);
    assert_eq!(cmp[1].status, PointStatus::Lit);
    assert_eq!(cmp[2].status, PointStatus::Boundary);
}

#[test]
fn singular_intercepts() {
    let scene = OrchardScene::linear(5, Coefficient::integer(0), Coefficient::integer(0));
    assert!(matches!(
        illumination_pattern(&scene),
        Err(Error::SingularIntercept { .. })
    ));
    assert!(matches!(
        compare_to_closed_form(&scene, 3),
        Err(Error::SingularIntercept { .. })
    ));
    // exact rationals flag individual points, floats are not checked
    let exact = OrchardScene::linear(40, Coefficient::integer(1), Coefficient::integer(2));
    let flagged: Vec<Rational> = compare_to_closed_form(&exact, 4)
        .unwrap()
        .into_iter()
        .filter(|c| c.status == PointStatus::Singular)
        .map(|c| c.x)
        .collect();
    assert!(flagged.contains(&Rational::new(1, 2).unwrap()));
    let shifted = OrchardScene::linear(40, Coefficient::Exact { num: 1, den: 3 }, Coefficient::integer(0));
    for c in compare_to_closed_form(&shifted, 2).unwrap() {
        if c.x == Rational::new(1, 2).unwrap() {
            // m − 1/3 = k never holds
            assert_eq!(c.status, PointStatus::Lit);
        }
    }
}

#[test]
fn diluted_linear_is_refused() {
    let scene = OrchardScene::linear(10, Coefficient::sqrt(2), Coefficient::integer(1)).with_dilution(2, 0);
    assert!(matches!(compare_to_closed_form(&scene, 3), Err(Error::Domain(_))));
    assert!(shadow_points(&scene).is_ok());
}

use ads3::catalog::{element, spec, GroupLabel};
use ads3::classifier::{boundary_distance, bucket_ids, classify, orbit_id, same_orbit};
use ads3::engine::{act, orbit_dimension, stabilizer_algebra, tangent_basis};
use ads3::reconcile::boundary_allowance;
use ads3::sl2::{a_t, exp_traceless, iwasawa, k_t, n_t, project_to_ads, Mat2, TracelessMat};
use ads3::transporter::{transport_residual, transporter};
use proptest::prelude::*;

const TOL: f64 = 1e-9;

fn label() -> impl Strategy<Value = GroupLabel> {
    (0..GroupLabel::ALL.len()).prop_map(|i| GroupLabel::ALL[i])
}

fn point() -> impl Strategy<Value = (f64, f64, f64)> {
    (0.0..std::f64::consts::TAU, -2.0..2.0f64, -2.0..2.0f64)
}

fn params(label: GroupLabel, half: f64) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-half..half, spec(label).param_count)
}

fn with_params(half: f64) -> impl Strategy<Value = (GroupLabel, Vec<f64>)> {
    label().prop_flat_map(move |l| (Just(l), params(l, half)))
}

fn close(a: Mat2, b: Mat2, tol: f64) -> bool {
    (a - b).max_abs() <= tol * a.max_abs().max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn one_parameter_subgroups(t in -5.0..5.0f64) {
        prop_assert!(close(exp_traceless(TracelessMat::X.scale(t)), a_t(t), 1e-12));
        prop_assert!(close(exp_traceless(TracelessMat::Y.scale(t)), n_t(t), 1e-12));
        prop_assert!(close(exp_traceless(TracelessMat::Z.scale(t)), k_t(t), 1e-12));
    }

    #[test]
    fn exp_lands_in_sl2(h in -3.0..3.0f64, e in -3.0..3.0f64, f in -3.0..3.0f64) {
        let v = TracelessMat { h, e, f };
        let g = exp_traceless(v);
        prop_assert!((g.det() - 1.0).abs() < 1e-9 * g.max_abs().powi(2).max(1.0));
        prop_assert!(close(g * exp_traceless(v.scale(-1.0)), Mat2::I, 1e-9 * g.max_abs().powi(2)));
    }

    #[test]
    fn action_is_a_homomorphism((l, x) in with_params(1.5), y in prop::collection::vec(-1.5..1.5f64, 4), (th, t, s) in point()) {
        let y: Vec<f64> = y.into_iter().take(x.len()).collect();
        let p = iwasawa(th, t, s);
        let g = element(l, &x).unwrap();
        let h = element(l, &y).unwrap();
        let lhs = act(&g.compose(&h), p);
        let rhs = act(&g, act(&h, p));
        prop_assert!(close(lhs.m(), rhs.m(), 1e-10));
        prop_assert!((lhs.m().det() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn rank_plus_nullity(l in label(), (th, t, s) in point()) {
        let p = iwasawa(th, t, s);
        prop_assert_eq!(orbit_dimension(l, p, TOL) + stabilizer_algebra(l, p, TOL).len(), l.dim());
        prop_assert!(tangent_basis(l, p).iter().all(|v| (p.m().adj() * *v).trace().abs() < 1e-10));
    }

    #[test]
    fn orbit_id_is_constant_on_orbits((l, g) in with_params(3.0), (th, t, s) in point()) {
        let p = iwasawa(th, t, s);
        let q = act(&element(l, &g).unwrap(), p);
        let allow = boundary_allowance(TOL);
        prop_assume!(boundary_distance(l, p) > allow && boundary_distance(l, q) > allow);
        prop_assert!(orbit_id(l, p, TOL).matches(&orbit_id(l, q, TOL), 1e-6), "{} {} {}", l, p.m(), q.m());
        prop_assert!(same_orbit(l, p, q, 1e-6));
    }

    #[test]
    fn classification_is_constant_on_orbits((l, g) in with_params(1.5), (th, t, s) in point()) {
        let p = iwasawa(th, t, s);
        let q = act(&element(l, &g).unwrap(), p);
        let allow = boundary_allowance(TOL);
        prop_assume!(boundary_distance(l, p) > allow && boundary_distance(l, q) > allow);
        let (a, b) = (classify(l, p, TOL), classify(l, q, TOL));
        prop_assert_eq!(a.character, b.character);
        prop_assert_eq!(a.orbit_class, b.orbit_class);
        prop_assert_eq!(a.stabilizer.dim + a.dimension, l.dim());
    }

    #[test]
    fn same_orbit_is_symmetric(l in label(), a in point(), b in point()) {
        let (p, q) = (iwasawa(a.0, a.1, a.2), iwasawa(b.0, b.1, b.2));
        prop_assert!(same_orbit(l, p, p, TOL));
        prop_assert_eq!(same_orbit(l, p, q, TOL), same_orbit(l, q, p, TOL));
    }

    #[test]
    fn same_orbit_is_transitive_along_orbits((l, g) in with_params(1.5), h in prop::collection::vec(-1.5..1.5f64, 4), (th, t, s) in point()) {
        let h: Vec<f64> = h.into_iter().take(g.len()).collect();
        let p = iwasawa(th, t, s);
        let q1 = act(&element(l, &g).unwrap(), p);
        let q2 = act(&element(l, &h).unwrap(), p);
        prop_assert!(same_orbit(l, p, q1, TOL) && same_orbit(l, p, q2, TOL));
        prop_assert!(same_orbit(l, q1, q2, TOL));
    }

    #[test]
    fn transporter_round_trips((l, g) in with_params(1.5), (th, t, s) in point()) {
        let p = iwasawa(th, t, s);
        let q = act(&element(l, &g).unwrap(), p);
        let h = transporter(l, p, q, TOL).unwrap();
        prop_assert!(transport_residual(l, &h, p, q) <= 1e-8);
    }

    #[test]
    fn projection_lands_on_ads((th, t, s) in point(), e in -0.05..0.05f64) {
        let m = iwasawa(th, t, s).m().scale((1.0 + e).sqrt());
        let p = project_to_ads(m, 1e-13).unwrap();
        prop_assert!((p.m().det() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn buckets_partition_their_input(l in label(), pts in prop::collection::vec(point(), 1..40)) {
        let ids: Vec<_> = pts.iter().map(|&(a, b, c)| orbit_id(l, iwasawa(a, b, c), TOL)).collect();
        let buckets = bucket_ids(&ids, TOL);
        prop_assert_eq!(buckets.iter().map(|b| b.1).sum::<usize>(), ids.len());
        prop_assert!(buckets.len() <= ids.len());
    }
}

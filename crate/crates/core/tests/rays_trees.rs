use horoshade::halfspace::{penetration_depth, Geodesic, Horoball, Ideal, Point};
use horoshade::packing::{extremal, extremal_ratio, farey, HoroballFamily};
use horoshade::rays::*;
use horoshade::sharp_interval::{sharp_ratio, t1};
use horoshade::tree::*;
use horoshade::{Error, NumericContext};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn ford_with_top() -> HoroballFamily {
    let mut fam = farey(60, 0, 1, false).unwrap();
    fam.push_top();
    fam
}

#[test]
fn rays_from_outside_points_avoid_the_nearest_member() {
    let fam = ford_with_top();
    let ctx = NumericContext::default();
    let t = t1(1.0).unwrap() + glue_constants().cone + 0.01;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut tried = 0;
    for _ in 0..2000 {
        if tried == 25 {
            break;
        }
        let x = Point::new(vec![rng.gen_range(0.0..1.0)], rng.gen_range(-9.0f64..-0.5).exp()).unwrap();
        let r = match ray_from_point(&fam, &x, t, &ctx) {
            Ok(r) => r,
            Err(Error::PointInsideHoroball { .. }) => continue,
            Err(e) => panic!("{x:?}: {e}"),
        };
        tried += 1;
        assert!(r.report.ok, "{x:?}: {:?}", r.report.deepest());
        assert!(r.nearest_depth <= 1e-9, "{x:?}: {}", r.nearest_depth);
        // the ray starts at x
        assert!((r.ray.param_of(&x) - r.ray.range.lo).abs() < 1e-9);
    }
    assert!(tried == 25, "only {tried} starting points were outside the packing");
}

#[test]
fn margin_grows_with_t() {
    let fam = ford_with_top();
    let ctx = NumericContext::default();
    let g = Geodesic::arc(vec![0.2], vec![0.7]).unwrap();
    let mut prev = f64::NEG_INFINITY;
    for k in 0..20 {
        let t = 0.25 * k as f64;
        let m = verify_avoidance(&g, &fam, t, &ctx).unwrap().margin;
        assert!(m >= prev);
        if prev.is_finite() {
            assert!((m - prev - 0.25).abs() < 1e-12);
        }
        prev = m;
    }
}

#[test]
fn lines_start_in_the_largest_shadow() {
    let ctx = NumericContext::default();
    let t = -sharp_ratio().ln() + glue_constants().triangle + 0.01;
    for fam in [farey(40, 0, 1, false).unwrap(), extremal(10, extremal_ratio()).unwrap()] {
        let l = biinfinite_line(&fam, t, &ctx).unwrap();
        assert!(l.report.ok, "{:?}", l.report.deepest());
        let (b, r) = match &fam.members[l.start] {
            Horoball::Tangent { base, radius } => (base[0], *radius),
            _ => unreachable!(),
        };
        let (p, q) = l.line.endpoints();
        for e in [p, q] {
            match e {
                Ideal::Finite(v) => assert!((v[0] - b).abs() <= r + 1e-12),
                Ideal::Infinity => panic!("line endpoint at infinity"),
            }
        }
    }
}

#[test]
fn line_rejects_nothing_when_t_is_large() {
    // shrink clamps at the sharp ratio, so very large t still solves
    let fam = farey(20, 0, 1, false).unwrap();
    let l = biinfinite_line(&fam, 50.0, &NumericContext::default()).unwrap();
    assert!(l.report.ok);
    assert!(l.report.margin > 40.0);
    assert!(penetration_depth(&l.line, &fam.members[l.start]) <= 50.0);
}

fn instances() -> impl Strategy<Value = (TruncatedTree, TreeHoroballs)> {
    (0u64..10_000).prop_filter_map("instance generation failed", |seed| random_instance(seed, 6, 60).ok())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn busemann_is_one_lipschitz((t, _) in instances(), f in 0.0..1.0f64) {
        for s in t.stubs().take(3).collect::<Vec<_>>() {
            for (u, v, l) in t.edges() {
                let bu = tree_busemann(&t, s, &TreePoint::vertex(u)).unwrap();
                let bv = tree_busemann(&t, s, &TreePoint::vertex(v)).unwrap();
                let bm = tree_busemann(&t, s, &TreePoint { from: u, to: v, offset: f * l }).unwrap();
                prop_assert!((bu - bv).abs() <= l + 1e-12);
                prop_assert!((bm - bu).abs() <= f * l + 1e-12);
                prop_assert!((bm - bv).abs() <= (1.0 - f) * l + 1e-12);
            }
            prop_assert!(tree_busemann(&t, s, &TreePoint::vertex(t.root)).unwrap().abs() < 1e-12);
        }
    }

    #[test]
    fn greedy_rays_are_shallow_geodesics((t, hb) in instances()) {
        let r = greedy_ray(&t, &hb, t.root).unwrap();
        prop_assert!(is_geodesic_path(&t, &r.first) && is_geodesic_path(&t, &r.second));
        prop_assert!(r.max_depth <= t.max_edge + 1e-12);
        // shared prefix up to the branch, different right after it
        prop_assert_eq!(&r.first[..=r.branch], &r.second[..=r.branch]);
        prop_assert!(r.first[r.branch + 1] != r.second[r.branch + 1]);
        // before the branch neither ray is inside an open horoball
        for &v in &r.first[..=r.branch] {
            for i in 0..hb.len() {
                prop_assert!(hb.excess(&t, i, v) <= 1e-12);
            }
        }
        for p in [&r.first, &r.second] {
            let end = *p.last().unwrap();
            prop_assert!(t.is_stub(end));
            prop_assert!(hb.balls.iter().all(|b| b.end != end));
        }
    }
}

#[test]
fn covering_configuration_is_tight() {
    let t = regular_tree(3, 8, 1.0).unwrap();
    let hb = covering_horoballs(&t).unwrap();
    // every vertex lies in some closed horoball
    for v in 0..t.len() {
        let best = (0..hb.len()).map(|i| hb.excess(&t, i, v)).fold(f64::NEG_INFINITY, f64::max);
        assert!(best >= -1e-12, "vertex {v} is uncovered");
    }
    let r = greedy_ray(&t, &hb, t.root).unwrap();
    assert!(r.max_depth <= t.max_edge + 1e-12);
    assert!(r.max_depth >= 1.0 - 1e-12);
}

#[test]
fn odd_truncations_of_the_covering_leave_no_free_stub() {
    // every admissible path ends at a stub carrying a horoball
    for depth in [1, 3, 7] {
        let t = regular_tree(3, depth, 1.0).unwrap();
        let hb = covering_horoballs(&t).unwrap();
        assert!(matches!(greedy_ray(&t, &hb, t.root), Err(Error::TruncationExhausted { .. })));
    }
    for depth in [2, 4, 6] {
        let t = regular_tree(3, depth, 1.0).unwrap();
        let hb = covering_horoballs(&t).unwrap();
        assert!(greedy_ray(&t, &hb, t.root).unwrap().max_depth <= 1.0 + 1e-12);
    }
}

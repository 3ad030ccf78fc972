use std::f64::consts::PI;

use horoshade::heisenberg::*;
use horoshade::uncover::{canonical_ball, check_avoidance, s0, uncover, uncover_two, Ball, BallFamily, Modulus, UncoverSpace};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn heis() -> impl Strategy<Value = HeisPoint> {
    (-2.0..2.0f64, -2.0..2.0f64, -4.0..4.0f64).prop_map(|(x, y, v)| HeisPoint::new(x, y, v))
}

fn close(a: &HeisPoint, b: &HeisPoint) -> f64 {
    (a.zeta - b.zeta).norm().max((a.v - b.v).abs())
}

/// Endpoint of a horizontal polygon from the identity, as a product of
/// horizontal steps, with its Euclidean length.
fn polygon(steps: &[Complex64]) -> (HeisPoint, f64) {
    let mut p = HeisPoint::IDENTITY;
    let mut len = 0.0;
    for z in steps {
        p = heis_mul(&p, &HeisPoint { zeta: *z, v: 0.0 });
        len += z.norm();
    }
    (p, len)
}

/// Regular n-gon enclosing area `a`, traversed so the lift climbs by `4a`.
fn lifted_ngon(n: usize, a: f64) -> Vec<Complex64> {
    let side = (4.0 * a * (PI / n as f64).tan() / n as f64).sqrt();
    (0..n).map(|k| Complex64::from_polar(side, -2.0 * PI * k as f64 / n as f64)).collect()
}

#[test]
fn ngon_lifts_reach_the_vertical_axis() {
    for n in [3, 4, 8, 64, 1024] {
        let (p, len) = polygon(&lifted_ngon(n, 0.25));
        assert!(p.zeta.norm() < 1e-9 && (p.v - 1.0).abs() < 1e-9, "{n}: {p:?}");
        let d = cc_dist(&HeisPoint::IDENTITY, &p, 1e-9).unwrap();
        assert!(d <= len + 1e-9, "{n}: {d} > {len}");
    }
    // perimeters decrease to sqrt(pi)
    let (_, len) = polygon(&lifted_ngon(4096, 0.25));
    assert!((len - PI.sqrt()).abs() < 1e-6);
}

#[test]
fn geodesic_matches_chord_product() {
    for p in [HeisPoint::new(1.0, 0.5, 0.3), HeisPoint::new(-0.7, 0.2, -2.5), HeisPoint::new(0.0, 0.0, 1.0)] {
        let g = cc_geodesic(&p);
        let n = 20000;
        let h = g.length / n as f64;
        // midpoint headings of the constant-curvature projection
        let steps: Vec<Complex64> =
            (0..n).map(|k| Complex64::from_polar(h, g.heading + g.kappa * h * (k as f64 + 0.5))).collect();
        let (q, len) = polygon(&steps);
        assert!(close(&q, &p) < 1e-6, "{p:?} vs {q:?}");
        assert!((len - g.length).abs() < 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn cygan_is_left_invariant(a in heis(), b in heis(), g in heis()) {
        let d = cygan_dist(&a, &b);
        let d2 = cygan_dist(&heis_mul(&g, &a), &heis_mul(&g, &b));
        prop_assert!((d - d2).abs() <= 1e-9 * (1.0 + d));
    }

    #[test]
    fn cc_is_left_invariant_and_symmetric(a in heis(), b in heis(), g in heis()) {
        let d = cc_dist(&a, &b, 1e-9).unwrap();
        let d2 = cc_dist(&heis_mul(&g, &a), &heis_mul(&g, &b), 1e-9).unwrap();
        prop_assert!((d - d2).abs() <= 1e-7 * (1.0 + d));
        prop_assert!((cc_dist(&b, &a, 1e-9).unwrap() - d).abs() <= 1e-7 * (1.0 + d));
    }

    #[test]
    fn dilation_scales_both_metrics(a in heis(), b in heis(), t in 0.1..5.0f64) {
        let (da, db) = (dilate(&a, t).unwrap(), dilate(&b, t).unwrap());
        prop_assert!((cygan_dist(&da, &db) - t * cygan_dist(&a, &b)).abs() <= 1e-9 * (1.0 + t * 10.0));
        let d = cc_dist(&a, &b, 1e-9).unwrap();
        prop_assert!((cc_dist(&da, &db, 1e-9).unwrap() - t * d).abs() <= 1e-7 * (1.0 + t * d));
        // dilation is a group morphism
        let lhs = dilate(&heis_mul(&a, &b), t).unwrap();
        prop_assert!(close(&lhs, &heis_mul(&da, &db)) <= 1e-9 * (1.0 + t * t * 10.0));
    }

    #[test]
    fn cc_bounds(p in heis()) {
        let d = cc_dist(&HeisPoint::IDENTITY, &p, 1e-9).unwrap();
        let c = p.zeta.norm();
        // horizontal length dominates the planar projection; the curve
        // plus its closing chord encloses area |v|/4
        prop_assert!(d >= c - 1e-12);
        prop_assert!(d + c >= (PI * p.v.abs()).sqrt() - 1e-9);
        // the path out along a straight segment, then round a circle
        let (_, len) = polygon(
            &[vec![p.zeta], lifted_ngon(256, p.v.abs() / 4.0).into_iter().map(|z| if p.v < 0.0 { z.conj() } else { z }).collect()]
                .concat(),
        );
        prop_assert!(d <= len + 1e-9);
    }

    #[test]
    fn geodesic_points_split_length(p in heis(), f in 0.0..1.0f64) {
        let g = cc_geodesic(&p);
        let m = g.point(f * g.length);
        let o = HeisPoint::IDENTITY;
        let d1 = cc_dist(&o, &m, 1e-9).unwrap();
        let d2 = cc_dist(&m, &p, 1e-9).unwrap();
        prop_assert!((d1 + d2 - g.length).abs() <= 1e-6 * (1.0 + g.length));
    }

    #[test]
    fn extension_lands_on_the_sphere(x in heis(), y in heis(), r in 0.1..3.0f64) {
        let h = Heisenberg;
        prop_assume!(h.dist(&x, &y) > 1e-3);
        let z = extend_sphere_cc(&x, &y, r).unwrap();
        prop_assert!((h.dist(&x, &z) - r).abs() <= 1e-7 * (1.0 + r));
        // the relative position is a dilate of the original one
        let rel = heis_mul(&x.inverse(), &y);
        let lam = r / h.dist(&x, &y);
        prop_assert!(close(&heis_mul(&x.inverse(), &z), &dilate(&rel, lam).unwrap()) <= 1e-9 * (1.0 + lam * lam * 20.0));
    }

    #[test]
    fn canonical_ball_contract(c in heis(), r2 in 0.2..2.0f64, f in 0.05..0.95f64, dir in heis()) {
        let h = Heisenberg;
        prop_assume!(dir.gauge() > 1e-2);
        let r1 = f * r2;
        let p = h.extend_sphere(&c, &heis_mul(&c, &dir), r2);
        let b = canonical_ball(&h, &c, r2, r1, &p).unwrap();
        prop_assert!((b.radius - 0.5 * (r2 - r1)).abs() <= 1e-12);
        prop_assert!((h.dist(&c, &b.center) - 0.5 * (r1 + r2)).abs() <= 1e-6);
        prop_assert!((h.dist(&p, &b.center) - b.radius).abs() <= 1e-6);
    }
}

fn heisenberg_family(seed: u64, count: usize, d: f64) -> BallFamily<Heisenberg> {
    let h = Heisenberg;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut balls: Vec<Ball<HeisPoint>> = Vec::new();
    while balls.len() < count {
        let c = HeisPoint::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(-4.0..4.0));
        let mut r = rng.gen_range(0.05..1.0f64);
        for b in &balls {
            let dist = h.dist(&c, &b.center);
            r = r.min(d * dist * dist / b.radius);
        }
        if r > 1e-3 {
            balls.push(Ball { center: c, radius: r });
        }
    }
    BallFamily::new(h, balls, d).unwrap()
}

#[test]
fn heisenberg_uncover_avoids_every_ball() {
    let d = 0.25;
    let bound = s0(d, Modulus::Heisenberg, false).unwrap();
    assert!(bound > 0.0 && bound < 0.02, "{bound}");
    let s = 0.9 * bound;
    for seed in 0..5 {
        let fam = heisenberg_family(seed, 60, d);
        assert!(fam.packing_violations(1e-12).is_empty());
        let w = uncover(&fam, s, None).unwrap();
        let chk = check_avoidance(&fam, s, &w.output, 1e-9);
        assert!(chk.ok, "seed {seed}: {chk:?}");
        let (a, b) = uncover_two(&fam, s, None).unwrap();
        for o in [&a.output, &b.output] {
            assert!(check_avoidance(&fam, s, o, 1e-9).ok);
        }
        let start = &fam.balls[a.chain[0].index];
        assert!(fam.space.dist(&a.output, &b.output) >= s * start.radius - 1e-9);
    }
}

#[test]
fn heisenberg_uncover_rejects_large_shrink() {
    let fam = heisenberg_family(1, 10, 0.25);
    let bound = s0(0.25, Modulus::Heisenberg, false).unwrap();
    assert!(uncover(&fam, bound * 1.01, None).is_err());
}

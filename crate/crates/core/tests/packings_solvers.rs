use std::cmp::Ordering;

use horoshade::exact::separation;
use horoshade::halfspace::{penetration_depth, Geodesic, Horoball};
use horoshade::packing::*;
use horoshade::rays::verify_avoidance;
use horoshade::sharp_ball::solve_hnr;
use horoshade::sharp_interval::*;
use horoshade::{Error, NumericContext};
use proptest::prelude::*;

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 { a.abs() } else { gcd(b, a % b) }
}

fn tangent(h: &Horoball) -> (f64, f64) {
    match h {
        Horoball::Tangent { base, radius } => (base[0], *radius),
        _ => panic!("expected a tangent member"),
    }
}

#[test]
fn ford_tangency_is_unimodularity() {
    let fam = farey(30, 0, 1, false).unwrap();
    let ex = fam.exact.as_ref().unwrap();
    let labels = fam.labels.as_ref().unwrap();
    let frac: Vec<(i64, i64)> = labels
        .iter()
        .map(|l| {
            let (p, q) = l.split_once('/').unwrap();
            (p.parse().unwrap(), q.parse().unwrap())
        })
        .collect();
    for &(p, q) in &frac {
        assert_eq!(gcd(p, q), 1);
    }
    for i in 0..fam.len() {
        for j in i + 1..fam.len() {
            let det = (frac[i].0 * frac[j].1 - frac[j].0 * frac[i].1).abs();
            let want = if det == 1 { Ordering::Equal } else { Ordering::Greater };
            assert_eq!(separation(&ex[i], &ex[j]).unwrap(), want, "{} {}", labels[i], labels[j]);
        }
    }
}

#[test]
fn generated_families_are_disjoint() {
    let exact = NumericContext::exact();
    let float = NumericContext::default();
    assert!(validate_disjoint(&farey(40, -1, 2, true).unwrap(), &exact).unwrap().ok);
    assert!(validate_disjoint(&geometric(-3, 3).unwrap(), &exact).unwrap().ok);
    for dim in [2, 3] {
        let fam = random_disjoint(50, dim, 7).unwrap();
        assert_eq!(fam.len(), 50);
        assert!(validate_disjoint(&fam, &float).unwrap().ok);
    }
    // extremal children fill the annulus of their parent's shadow
    for s in [0.05, 0.1, extremal_ratio()] {
        let fam = extremal(8, s).unwrap();
        for i in 1..fam.len() {
            let (xc, rc) = tangent(&fam.members[i]);
            let (xp, rp) = tangent(&fam.members[extremal_parent(i).unwrap()]);
            assert!(((xc - xp).abs() + rc - rp).abs() <= 1e-12 * rp + 4e-15, "{i}: {xc} {rc} {xp} {rp}");
            assert!(((xc - xp).abs() - rc - s * rp).abs() <= 1e-12 * rp + 4e-15);
        }
    }
    // exact rejection of overlapping rationals
    let bad = horoshade::packing::HoroballFamily::from_exact(
        2,
        vec![
            horoshade::exact::ExactHoroball::Tangent { base: vec![horoshade::exact::ratio(0, 1)], radius: horoshade::exact::ratio(1, 2) },
            horoshade::exact::ExactHoroball::Tangent { base: vec![horoshade::exact::ratio(1, 2)], radius: horoshade::exact::ratio(1, 2) },
        ],
    )
    .unwrap();
    assert!(!validate_disjoint(&bad, &exact).unwrap().ok);
    assert!(matches!(validate_disjoint(&random_disjoint(5, 2, 1).unwrap(), &exact), Err(Error::NotRational(_))));
}

#[test]
fn interval_solver_sides_and_chain() {
    let fam = farey(50, 0, 1, false).unwrap();
    let ctx = NumericContext::default();
    let s = 0.15;
    let r = solve_2d(&fam, s, None, Side::Right, &ctx).unwrap();
    let l = solve_2d(&fam, s, None, Side::Left, &ctx).unwrap();
    assert!(r.certified && l.certified);
    assert!(r.margin >= 0.0 && l.margin >= 0.0);
    assert!(r.endpoint != l.endpoint);
    for w in [&r, &l] {
        for pair in w.chain.windows(2) {
            assert!(pair[1].lo >= pair[0].lo - 1e-12 && pair[1].hi <= pair[0].hi + 1e-12);
        }
        let gaps = uncovered_gaps(&fam, s, -1.0, 2.0);
        assert!(gaps.iter().any(|&(a, b)| a <= w.endpoint && w.endpoint <= b));
    }
}

#[test]
fn interval_solver_limits() {
    let fam = farey(20, 0, 1, false).unwrap();
    let ctx = NumericContext::default();
    assert!(solve_2d(&fam, sharp_ratio(), None, Side::Right, &ctx).is_ok());
    assert!(matches!(
        solve_2d(&fam, sharp_ratio() * 1.001, None, Side::Right, &ctx),
        Err(Error::ShrinkTooLarge { .. })
    ));
    assert!(solve_2d(&random_disjoint(5, 3, 1).unwrap(), 0.1, None, Side::Right, &ctx).is_err());
}

#[test]
fn golden_ratio_vertical_avoids_shrunk_ford_circles() {
    let fam = farey(1000, 1, 2, false).unwrap();
    let golden = 0.5 * (1.0 + 5f64.sqrt());
    let g = Geodesic::vertical(vec![golden]);
    let ctx = NumericContext::default();
    let rep = verify_avoidance(&g, &fam, 0.27, &ctx).unwrap();
    assert!(rep.ok, "{:?}", rep.deepest());
    // deepest at 2/1, where the depth is ln(0.5 / (2 - golden))
    let (i, d) = rep.deepest().unwrap();
    assert_eq!(fam.labels.as_ref().unwrap()[i], "2/1");
    assert!((d - ((0.5 / (2.0 - golden)).ln() - 0.27)).abs() < 1e-12);
    assert!(!verify_avoidance(&g, &fam, 0.25, &ctx).unwrap().ok);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn dioph_matches_penetration(xi in 0.0..1.0f64, t in 0.0..3.0f64) {
        let sols = dioph_solutions(xi, t, 100).unwrap();
        let g = Geodesic::vertical(vec![xi]);
        for q in 1..=100i64 {
            for p in [(xi * q as f64).floor() as i64, (xi * q as f64).ceil() as i64] {
                if gcd(p, q) != 1 {
                    continue;
                }
                let h = Horoball::tangent(vec![p as f64 / q as f64], 0.5 / (q * q) as f64).unwrap();
                let d = penetration_depth(&g, &h);
                let listed = sols.contains(&(p, q as u64));
                // skip the boundary band where rounding decides
                if (d - t).abs() > 1e-9 {
                    prop_assert_eq!(listed, d > t, "p/q = {}/{}, depth {}", p, q, d);
                }
            }
        }
    }

    #[test]
    fn interval_solver_commutes_with_scaling(seed in 0u64..50, lam in 0.1..10.0f64, shift in -5.0..5.0f64) {
        let fam = random_disjoint(30, 2, seed).unwrap();
        let moved = HoroballFamily::new(
            2,
            fam.members
                .iter()
                .map(|h| {
                    let (b, r) = tangent(h);
                    Horoball::tangent(vec![lam * b + shift], lam * r).unwrap()
                })
                .collect(),
        )
        .unwrap();
        let ctx = NumericContext::default();
        let a = solve_2d(&fam, 0.2, None, Side::Right, &ctx).unwrap();
        let b = solve_2d(&moved, 0.2, None, Side::Right, &ctx).unwrap();
        prop_assert!(a.certified && b.certified);
        prop_assert!((lam * a.endpoint + shift - b.endpoint).abs() <= 1e-9 * (1.0 + lam + shift.abs()));
    }

    #[test]
    fn ball_solver_opposite_directions(seed in 0u64..40, s in 0.05..0.4f64) {
        let fam = random_disjoint(30, 3, seed).unwrap();
        let ctx = NumericContext::default();
        let a = solve_hnr(&fam, s, None, &[1.0, 0.0], &ctx).unwrap();
        let b = solve_hnr(&fam, s, None, &[-1.0, 0.0], &ctx).unwrap();
        prop_assert!(a.certified && b.certified);
        let r0 = match &fam.members[a.chain[0].horoball] {
            Horoball::Tangent { radius, .. } => *radius,
            _ => unreachable!(),
        };
        let sep = ((a.endpoint[0] - b.endpoint[0]).powi(2) + (a.endpoint[1] - b.endpoint[1]).powi(2)).sqrt();
        prop_assert!(sep >= s * r0);
        for w in [&a, &b] {
            for pair in w.chain.windows(2) {
                let d = ((pair[0].center[0] - pair[1].center[0]).powi(2)
                    + (pair[0].center[1] - pair[1].center[1]).powi(2))
                .sqrt();
                prop_assert!(d + pair[1].radius <= pair[0].radius + 1e-9);
            }
        }
    }

    #[test]
    fn dioph_backends_agree(xi in -2.0..2.0f64, t in 0.0..2.0f64) {
        prop_assert_eq!(dioph_scan(xi, t, 500), dioph_convergents(xi, t, 500).unwrap());
    }
}

#[test]
fn extremal_family_is_sharp() {
    let fam = extremal(10, extremal_ratio()).unwrap();
    let ctx = NumericContext::default();
    let s = sharp_ratio();
    let w = solve_2d(&fam, s * (1.0 - 1e-9), None, Side::Right, &ctx).unwrap();
    assert!(w.certified);
    // the chain descends through the tree
    for pair in w.chain.windows(2) {
        assert!(tangent(&fam.members[pair[1].horoball]).1 < tangent(&fam.members[pair[0].horoball]).1);
    }
}

//! Sharp solver over the boundary line of the hyperbolic plane: nested
//! annulus components of shadows, the optimal shrink constant, and the
//! matching Diophantine approximation check.

use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{invalid, Error, Result};
use crate::exact;
use crate::halfspace::Horoball;
use crate::math;
use crate::numeric::NumericContext;
use crate::packing::HoroballFamily;

/// The optimal penetration constant for curvature bounded above by `-a^2`.
pub fn t1(a: f64) -> Result<f64> {
    if !(a >= 1.0) {
        return Err(invalid("t1 needs a >= 1"));
    }
    let mut v = math::powf(2.0, 2.0 / a)
        * (math::sqrt(1.0 + math::powf(2.0, 1.0 - 1.0 / a)) - 1.0 - math::powf(2.0, -1.0 - 1.0 / a));
    if a >= 2.0 {
        v = v.min(1.0 - math::powf(2.0, -2.0 / a));
    }
    Ok(-math::ln(v))
}

/// `4 sqrt 2 - 5`, the largest shrink factor the sharp solvers accept.
pub fn sharp_ratio() -> f64 {
    4.0 * core::f64::consts::SQRT_2 - 5.0
}

pub(crate) fn check_sharp(s: f64) -> Result<()> {
    let bound = sharp_ratio();
    if !(s > 0.0) || s > bound * (1.0 + 1e-12) {
        return Err(Error::ShrinkTooLarge { s, bound });
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// One of the two components of a shadow annulus on the real line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntervalComponent {
    pub lo: f64,
    pub hi: f64,
    pub horoball: usize,
    pub side: Side,
}

impl IntervalComponent {
    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }
}

fn slack(lo: f64, hi: f64, tol: f64) -> f64 {
    tol * (hi - lo) + 4.0 * f64::EPSILON * lo.abs().max(hi.abs())
}

/// Given `[k1, k2]` and a shadow `(center, radius)`, returns `None` when the
/// closed scaled shadow misses the interval, else the annulus component
/// contained in it with the larger margin (ties go right).
pub(crate) fn choose_on_line(
    k1: f64,
    k2: f64,
    center: f64,
    radius: f64,
    s: f64,
    tol: f64,
) -> Result<Option<(Side, f64, f64)>> {
    let eps = slack(k1, k2, tol);
    let sr = s * radius;
    if center - sr > k2 + eps || center + sr < k1 - eps {
        return Ok(None);
    }
    let left = (center - radius, center - sr);
    let right = (center + sr, center + radius);
    let margin = |c: (f64, f64)| -> Option<f64> {
        (c.0 >= k1 - eps && c.1 <= k2 + eps).then(|| (c.0 - k1).min(k2 - c.1))
    };
    match (margin(left), margin(right)) {
        (None, None) => Err(Error::Invariant(alloc::format!(
            "no annulus component of ({center}, {radius}) fits in [{k1}, {k2}]"
        ))),
        (Some(_), None) => Ok(Some((Side::Left, left.0, left.1))),
        (None, Some(_)) => Ok(Some((Side::Right, right.0, right.1))),
        (Some(a), Some(b)) => Ok(Some(if a > b {
            (Side::Left, left.0, left.1)
        } else {
            (Side::Right, right.0, right.1)
        })),
    }
}

fn tangent_1d(h: &Horoball) -> Result<(f64, f64)> {
    match h {
        Horoball::Tangent { base, radius } if base.len() == 1 => Ok((base[0], *radius)),
        _ => Err(invalid("expected a tangent horoball over the line")),
    }
}

/// The annulus component of `h` on the given side.
pub fn component(h: &Horoball, index: usize, s: f64, side: Side) -> Result<IntervalComponent> {
    let (b, r) = tangent_1d(h)?;
    let (lo, hi) = match side {
        Side::Left => (b - r, b - s * r),
        Side::Right => (b + s * r, b + r),
    };
    Ok(IntervalComponent { lo, hi, horoball: index, side })
}

/// One refinement of `k` against the horoball `h2` (member `index`).
pub fn step_2d(
    k: &IntervalComponent,
    h2: &Horoball,
    index: usize,
    s: f64,
    ctx: &NumericContext,
) -> Result<Option<IntervalComponent>> {
    check_sharp(s)?;
    let (b, r) = tangent_1d(h2)?;
    Ok(choose_on_line(k.lo, k.hi, b, r, s, ctx.tolerance)?
        .map(|(side, lo, hi)| IntervalComponent { lo, hi, horoball: index, side }))
}

/// Result of the sharp line solver.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalWitness {
    pub chain: Vec<IntervalComponent>,
    pub endpoint: f64,
    /// Smallest `|endpoint - b_n| - s r_n` over the family.
    pub margin: f64,
    pub certified: bool,
}

/// Members processed after the start, and a check that no larger member
/// interferes with the seed region.
pub(crate) struct Order {
    pub start: usize,
    pub larger: Vec<usize>,
    pub rest: Vec<usize>,
}

pub(crate) fn order_members(radii: &[(usize, f64)], start: Option<usize>) -> Result<Order> {
    if radii.is_empty() {
        return Err(Error::Empty("family has no tangent horoballs".into()));
    }
    let start = match start {
        Some(i) => {
            if !radii.iter().any(|&(j, _)| j == i) {
                return Err(invalid("start must index a tangent horoball"));
            }
            i
        }
        None => {
            let mut best = radii[0];
            for &c in radii {
                if c.1 > best.1 {
                    best = c;
                }
            }
            best.0
        }
    };
    let r0 = radii.iter().find(|c| c.0 == start).map(|c| c.1).unwrap_or(0.0);
    let mut larger = Vec::new();
    let mut rest: Vec<(usize, f64)> = Vec::new();
    for &(i, r) in radii {
        if i == start {
            continue;
        }
        if r > r0 {
            larger.push(i);
        } else {
            rest.push((i, r));
        }
    }
    rest.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    Ok(Order { start, larger, rest: rest.into_iter().map(|c| c.0).collect() })
}

/// Finds an endpoint on the line whose vertical geodesic avoids every
/// open horoball of the family shrunk by the factor `s`.
pub fn solve_2d(
    fam: &HoroballFamily,
    s: f64,
    start: Option<usize>,
    side: Side,
    ctx: &NumericContext,
) -> Result<IntervalWitness> {
    check_sharp(s)?;
    if fam.dim != 2 {
        return Err(Error::DimensionMismatch { expected: 2, found: fam.dim });
    }
    let radii: Vec<(usize, f64)> = fam
        .members
        .iter()
        .enumerate()
        .filter_map(|(i, h)| match h {
            Horoball::Tangent { radius, .. } => Some((i, *radius)),
            _ => None,
        })
        .collect();
    let order = order_members(&radii, start)?;
    let mut k = component(&fam.members[order.start], order.start, s, side)?;
    for &j in &order.larger {
        let (b, r) = tangent_1d(&fam.members[j])?;
        if b - s * r < k.hi && b + s * r > k.lo {
            return Err(Error::StartBlocked { start: order.start, blocker: j });
        }
    }
    let mut chain = alloc::vec![k];
    for &j in &order.rest {
        if let Some(next) = step_2d(&k, &fam.members[j], j, s, ctx)? {
            chain.push(next);
            k = next;
        }
    }
    let endpoint = k.midpoint();
    let margin = line_margin(fam, s, endpoint);
    Ok(IntervalWitness { chain, endpoint, margin, certified: margin >= -ctx.tolerance })
}

/// Smallest `|x - b_n| - s r_n` over the tangent members.
pub fn line_margin(fam: &HoroballFamily, s: f64, x: f64) -> f64 {
    fam.members
        .iter()
        .filter_map(|h| match h {
            Horoball::Tangent { base, radius } => Some((x - base[0]).abs() - s * radius),
            _ => None,
        })
        .fold(f64::INFINITY, f64::min)
}

/// Parts of `[lo, hi]` not covered by the open scaled shadows
/// `(b - s r, b + s r)`, as closed intervals (possibly single points).
pub fn uncovered_gaps(fam: &HoroballFamily, s: f64, lo: f64, hi: f64) -> Vec<(f64, f64)> {
    let mut iv: Vec<(f64, f64)> = fam
        .members
        .iter()
        .filter_map(|h| match h {
            Horoball::Tangent { base, radius } => Some((base[0] - s * radius, base[0] + s * radius)),
            _ => None,
        })
        .filter(|&(a, b)| b > lo && a < hi)
        .collect();
    iv.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut gaps = Vec::new();
    // `cursor` is never inside an open interval seen so far
    let mut cursor = lo;
    for (a, b) in iv {
        if a >= cursor {
            gaps.push((cursor, a.min(hi)));
        }
        if b > cursor {
            cursor = b;
        }
        if cursor > hi {
            break;
        }
    }
    if cursor <= hi {
        gaps.push((cursor, hi));
    }
    gaps
}

/// Reduced fractions `p/q` with `q <= q_max` and `|xi - p/q| < e^{-t}/(2 q^2)`,
/// sorted by denominator.
pub fn dioph_solutions(xi: f64, t: f64, q_max: u64) -> Result<Vec<(i64, u64)>> {
    if q_max == 0 {
        return Err(invalid("q_max must be positive"));
    }
    if !xi.is_finite() || !(t >= 0.0) {
        return Err(invalid("dioph needs finite xi and t >= 0"));
    }
    if q_max > 10_000 {
        dioph_convergents(xi, t, q_max)
    } else {
        Ok(dioph_scan(xi, t, q_max))
    }
}

fn satisfies(xi: f64, t: f64, p: i64, q: u64) -> bool {
    let qf = q as f64;
    (qf * xi - p as f64).abs() < math::exp(-t) / (2.0 * qf)
}

/// Direct scan over denominators with the nearest numerator.
pub fn dioph_scan(xi: f64, t: f64, q_max: u64) -> Vec<(i64, u64)> {
    let mut out = Vec::new();
    for q in 1..=q_max {
        let p = libm::round(q as f64 * xi) as i64;
        if p.gcd(&(q as i64)) == 1 && satisfies(xi, t, p, q) {
            out.push((p, q));
        }
    }
    out
}

/// Checks only the continued-fraction convergents of `xi`, which contain
/// every solution when `t >= 0`.
pub fn dioph_convergents(xi: f64, t: f64, q_max: u64) -> Result<Vec<(i64, u64)>> {
    let mut x = exact::from_f64(xi)?;
    let (mut p0, mut q0) = (BigInt::from(1), BigInt::from(0));
    let (mut p1, mut q1) = (x.floor().to_integer(), BigInt::from(1));
    let qmax = BigInt::from(q_max);
    let mut out = Vec::new();
    loop {
        if q1 > qmax {
            break;
        }
        if let (Some(p), Some(q)) = (p1.to_i64(), q1.to_u64()) {
            if satisfies(xi, t, p, q) {
                out.push((p, q));
            }
        }
        let frac = &x - x.floor();
        if frac.is_zero() {
            break;
        }
        x = frac.recip();
        let a = x.floor().to_integer();
        let p2 = &a * &p1 + &p0;
        let q2 = &a * &q1 + &q0;
        p0 = core::mem::replace(&mut p1, p2);
        q0 = core::mem::replace(&mut q1, q2);
        if !q1.is_positive() {
            break;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::packing;

    #[test]
    fn t1_values() {
        assert!((t1(1.0).unwrap() + math::ln(sharp_ratio())).abs() < 1e-14);
        assert!((t1(1.0).unwrap() - 0.42030).abs() < 1e-5);
        assert!((t1(2.0).unwrap() - 0.9151).abs() < 1e-3);
        assert!(t1(0.5).is_err());
        assert!(t1(200.0).unwrap() > t1(20.0).unwrap());
    }

    #[test]
    fn step_examples() {
        let ctx = NumericContext::default();
        let s = sharp_ratio();
        let root = Horoball::tangent(alloc::vec![0.0], 1.0).unwrap();
        let k = component(&root, 0, s, Side::Right).unwrap();
        let child = Horoball::tangent(alloc::vec![(1.0 + s) / 2.0], (1.0 - s) / 2.0).unwrap();
        let got = step_2d(&k, &child, 1, s, &ctx).unwrap().unwrap();
        assert_eq!(got.side, Side::Right);

        let k = component(&root, 0, 0.4, Side::Right).unwrap();
        let far = Horoball::tangent(alloc::vec![5.0], 0.5).unwrap();
        assert!(step_2d(&k, &far, 1, 0.4, &ctx).unwrap().is_none());
        let small = Horoball::tangent(alloc::vec![0.6], 0.04).unwrap();
        let got = step_2d(&k, &small, 1, 0.4, &ctx).unwrap().unwrap();
        assert_eq!(got.side, Side::Right);
        assert!((got.lo - 0.616).abs() < 1e-12 && (got.hi - 0.64).abs() < 1e-12);
    }

    #[test]
    fn single_horoball() {
        let fam = HoroballFamily::new(2, alloc::vec![Horoball::tangent(alloc::vec![0.0], 1.0).unwrap()]).unwrap();
        let w = solve_2d(&fam, 0.3, None, Side::Right, &NumericContext::default()).unwrap();
        assert!((0.3..=1.0).contains(&w.endpoint));
        assert!(w.certified);
    }

    #[test]
    fn gaps_of_simple_cover() {
        let fam = HoroballFamily::new(
            2,
            alloc::vec![
                Horoball::tangent(alloc::vec![0.0], 1.0).unwrap(),
                Horoball::tangent(alloc::vec![2.0], 1.0).unwrap(),
            ],
        )
        .unwrap();
        let g = uncovered_gaps(&fam, 0.5, -1.0, 3.0);
        assert_eq!(g, [(-1.0, -0.5), (0.5, 1.5), (2.5, 3.0)]);
        let g = uncovered_gaps(&fam, 1.0, -1.0, 3.0);
        assert_eq!(g, [(-1.0, -1.0), (1.0, 1.0), (3.0, 3.0)]);
    }

    #[test]
    fn dioph_small_cases() {
        let third = dioph_solutions(1.0 / 3.0, 0.0, 3).unwrap();
        assert!(third.contains(&(1, 3)));
        let g = (1.0 + math::sqrt(5.0)) / 2.0;
        let sol = dioph_solutions(g, 0.0, 1000).unwrap();
        for f in [(3, 2), (5, 3), (8, 5), (13, 8)] {
            assert!(sol.contains(&f));
        }
        assert_eq!(dioph_scan(g, 0.05, 5000), dioph_convergents(g, 0.05, 5000).unwrap());
    }

    #[test]
    fn farey_endpoint_is_badly_approximable() {
        let fam = packing::farey(200, 0, 1, false).unwrap();
        let w = solve_2d(&fam, 0.5, None, Side::Right, &NumericContext::default()).unwrap();
        assert!(w.certified);
        for q in 1..=200i64 {
            let p = libm::round(w.endpoint * q as f64);
            assert!((w.endpoint - p / q as f64).abs() >= 0.5 / (2.0 * (q * q) as f64) - 1e-12);
        }
    }
}

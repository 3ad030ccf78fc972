//! Nested canonical balls in a metric space, producing points that avoid
//! a shrunken copy of every ball of a quadratically separated family.

use alloc::format;
use alloc::vec::Vec;
use core::fmt::Debug;

use crate::error::{invalid, Error, Result};
use crate::math;

/// Modulus of sphere extendability `eps -> delta(eps)`.
#[derive(Debug, Clone, Copy)]
pub enum Modulus {
    /// `delta(eps) = eps`, as in Euclidean spaces and trees.
    Identity,
    /// `delta(eps) = 1 - (1 + eps^2 / pi)^{-1/2}` for the Heisenberg group
    /// with its Carnot-Carathéodory metric.
    Heisenberg,
    Custom(fn(f64) -> f64),
}

impl Modulus {
    pub fn delta(&self, eps: f64) -> f64 {
        match self {
            Modulus::Identity => eps,
            Modulus::Heisenberg => 1.0 - 1.0 / math::sqrt(1.0 + eps * eps / core::f64::consts::PI),
            Modulus::Custom(f) => f(eps),
        }
    }
}

/// `phi(t) = (sqrt(4t + 1) - t - 1) / t`.
pub fn phi(t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(invalid("phi needs a positive argument"));
    }
    Ok((math::sqrt(4.0 * t + 1.0) - t - 1.0) / t)
}

fn phi_unchecked(t: f64) -> f64 {
    (math::sqrt(4.0 * t + 1.0) - t - 1.0) / t
}

fn objective(d: f64, modulus: Modulus, eps: f64) -> f64 {
    let a = phi_unchecked(4.0 * d * (1.0 + eps));
    let b = phi_unchecked(4.0 * d * (2.0 - modulus.delta(eps)));
    a.min(b)
}

/// Maximizer and maximum of `min(phi(4D(1+eps)), phi(4D(2-delta(eps))))`
/// over `eps` in `(0, 1)`, by golden-section search.
pub fn best_epsilon(d: f64, modulus: Modulus) -> Result<(f64, f64)> {
    if !(d > 0.0 && d <= 0.25) {
        return Err(invalid("packing constant must lie in (0, 1/4]"));
    }
    let g = (math::sqrt(5.0) - 1.0) / 2.0;
    let (mut a, mut b) = (0.0f64, 1.0f64);
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let mut f1 = objective(d, modulus, x1);
    let mut f2 = objective(d, modulus, x2);
    while b - a > 1e-12 {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = objective(d, modulus, x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = objective(d, modulus, x1);
        }
    }
    let eps = 0.5 * (a + b);
    Ok((eps, objective(d, modulus, eps)))
}

/// Largest admissible shrink factor for packing constant `d`.
pub fn s0(d: f64, modulus: Modulus, has_lines: bool) -> Result<f64> {
    if has_lines {
        if !(d > 0.0 && d < 0.5) {
            return Err(invalid("packing constant must lie in (0, 1/2)"));
        }
        return Ok((math::sqrt(1.0 + 16.0 * d) - 1.0 - 4.0 * d) / (4.0 * d));
    }
    if let Modulus::Identity = modulus {
        if !(d > 0.0 && d <= 0.25) {
            return Err(invalid("packing constant must lie in (0, 1/4]"));
        }
        return phi(6.0 * d);
    }
    best_epsilon(d, modulus).map(|(_, v)| v)
}

/// Uniform penetration bound `-ln(s0(1/4) / (2 c_max C))`.
pub fn t0(c: f64, modulus: Modulus, has_lines: bool, c_max: f64) -> Result<f64> {
    if !(c >= 1.0) || !(c_max > 0.0) {
        return Err(invalid("t0 needs C >= 1 and c_max > 0"));
    }
    Ok(-math::ln(s0(0.25, modulus, has_lines)? / (2.0 * c_max * c)))
}

/// The metric operations the nested-ball construction relies on.
pub trait UncoverSpace {
    type Point: Clone + Debug;

    fn dist(&self, a: &Self::Point, b: &Self::Point) -> f64;
    /// Point at distance `lambda` from `from` on a geodesic toward `toward`.
    fn point_toward(&self, from: &Self::Point, toward: &Self::Point, lambda: f64) -> Self::Point;
    /// Point on the sphere `S(center, r)` close to `near`.
    fn extend_sphere(&self, center: &Self::Point, near: &Self::Point, r: f64) -> Self::Point;
    /// A fixed point on the sphere `S(center, r)`.
    fn sphere_point(&self, center: &Self::Point, r: f64) -> Self::Point;
    fn antipodal_pair(&self, center: &Self::Point, r: f64) -> Option<(Self::Point, Self::Point)>;
    fn modulus(&self) -> Modulus;
    fn has_lines(&self) -> bool;
    /// Allowed error for a distance comparison at scale `scale`.
    fn slack(&self, scale: f64) -> f64 {
        1e-9 * scale + 1e-15
    }
}

/// `R^k` with the Euclidean metric. With `lines` unset the solver runs the
/// general three-case refinement instead of the line-based shortcut.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Euclidean {
    pub dim: usize,
    pub lines: bool,
}

impl Euclidean {
    pub fn new(dim: usize) -> Self {
        Euclidean { dim, lines: true }
    }
}

impl UncoverSpace for Euclidean {
    type Point = Vec<f64>;

    fn dist(&self, a: &Vec<f64>, b: &Vec<f64>) -> f64 {
        math::dist(a, b)
    }

    fn point_toward(&self, from: &Vec<f64>, toward: &Vec<f64>, lambda: f64) -> Vec<f64> {
        let d = math::dist(from, toward);
        if d == 0.0 {
            return from.clone();
        }
        let dir = math::sub(toward, from);
        math::axpy(from, lambda / d, &dir)
    }

    fn extend_sphere(&self, center: &Vec<f64>, near: &Vec<f64>, r: f64) -> Vec<f64> {
        let d = math::dist(center, near);
        if d == 0.0 {
            return self.sphere_point(center, r);
        }
        let dir = math::sub(near, center);
        math::axpy(center, r / d, &dir)
    }

    fn sphere_point(&self, center: &Vec<f64>, r: f64) -> Vec<f64> {
        let mut p = center.clone();
        p[0] += r;
        p
    }

    fn antipodal_pair(&self, center: &Vec<f64>, r: f64) -> Option<(Vec<f64>, Vec<f64>)> {
        let mut a = center.clone();
        let mut b = center.clone();
        a[0] += r;
        b[0] -= r;
        Some((a, b))
    }

    fn modulus(&self) -> Modulus {
        Modulus::Identity
    }

    fn has_lines(&self) -> bool {
        self.lines
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ball<P> {
    pub center: P,
    pub radius: f64,
}

/// Balls `B(xi, r)` satisfying `r r' <= D d(xi, xi')^2`.
#[derive(Debug, Clone)]
pub struct BallFamily<S: UncoverSpace> {
    pub space: S,
    pub balls: Vec<Ball<S::Point>>,
    pub packing_constant: f64,
}

impl<S: UncoverSpace> BallFamily<S> {
    pub fn new(space: S, balls: Vec<Ball<S::Point>>, packing_constant: f64) -> Result<Self> {
        let max = if space.has_lines() { 0.5 } else { 0.25 };
        if !(packing_constant > 0.0 && packing_constant <= max) {
            return Err(invalid("packing constant out of range"));
        }
        if balls.iter().any(|b| !(b.radius > 0.0 && b.radius.is_finite())) {
            return Err(invalid("ball radii must be positive and finite"));
        }
        Ok(BallFamily { space, balls, packing_constant })
    }

    /// Pairs violating the quadratic separation condition (quadratic time).
    pub fn packing_violations(&self, tol: f64) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.balls.len() {
            for j in i + 1..self.balls.len() {
                let d = self.space.dist(&self.balls[i].center, &self.balls[j].center);
                let lhs = self.balls[i].radius * self.balls[j].radius;
                if lhs > self.packing_constant * d * d * (1.0 + tol) {
                    out.push((i, j));
                }
            }
        }
        out
    }
}

/// A ball inside the annulus `B(xi, r) - B(xi, s r)` of radius `r(1-s)/2`
/// whose center lies at distance `r(1+s)/2` from `xi`.
#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalBall<P> {
    pub center: P,
    pub radius: f64,
    pub annulus_of: usize,
    pub s: f64,
}

/// Which construction produced a link of the chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepCase {
    Start,
    /// The new center is far from the current one.
    Far,
    /// The current center is near the new sphere; extended onto it.
    Sphere,
    /// The current center is deep inside the new ball.
    Inner,
    /// Line-based construction in spaces with geodesic lines.
    Line,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Link<P> {
    pub index: usize,
    pub ball: CanonicalBall<P>,
    pub case: StepCase,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NestedWitness<P> {
    pub chain: Vec<Link<P>>,
    pub output: P,
}

/// Canonical ball of radius `(r2 - r1)/2` in `B(xi, r2) - B(xi, r1)`
/// containing the point `p` of the sphere `S(xi, r2)`.
pub fn canonical_ball<S: UncoverSpace>(
    space: &S,
    xi: &S::Point,
    r2: f64,
    r1: f64,
    p: &S::Point,
) -> Result<Ball<S::Point>> {
    if !(r1 > 0.0 && r1 < r2) {
        return Err(invalid("canonical ball needs 0 < r1 < r2"));
    }
    let dp = space.dist(xi, p);
    if (dp - r2).abs() > space.slack(r2) {
        return Err(Error::Invariant(format!("contact point at distance {dp} instead of {r2}")));
    }
    let rad = 0.5 * (r2 - r1);
    let center = space.point_toward(p, xi, rad);
    let dc = space.dist(xi, &center);
    if (dc - 0.5 * (r2 + r1)).abs() > space.slack(r2) {
        return Err(Error::Invariant(format!("canonical center at distance {dc} from the ball center")));
    }
    Ok(Ball { center, radius: rad })
}

/// One refinement: given a canonical ball `k` of a ball of radius at least
/// `other.radius`, returns `None` when `k` misses `B(other.center, s r')`,
/// and otherwise a canonical ball of `other` contained in `k`.
pub fn refine_step<S: UncoverSpace>(
    space: &S,
    k: &Ball<S::Point>,
    other: &Ball<S::Point>,
    s: f64,
    delta: f64,
) -> Result<Option<(Ball<S::Point>, StepCase)>> {
    let xi = &other.center;
    let r = other.radius;
    let eta = &k.center;
    let d = space.dist(xi, eta);
    if d > k.radius + s * r {
        return Ok(None);
    }
    let rad = 0.5 * r * (1.0 - s);
    let (center, case) = if d >= r {
        (space.point_toward(xi, eta, 0.5 * r * (1.0 + s)), StepCase::Far)
    } else {
        let zeta = if d > 0.0 { space.extend_sphere(xi, eta, r) } else { space.sphere_point(xi, r) };
        let case = if space.has_lines() {
            StepCase::Line
        } else if d >= (1.0 - delta) * r {
            StepCase::Sphere
        } else {
            StepCase::Inner
        };
        (space.point_toward(&zeta, xi, rad), case)
    };
    let excess = space.dist(&center, eta) + rad - k.radius;
    if excess > space.slack(k.radius) {
        return Err(Error::Invariant(format!(
            "refined ball leaves the current ball by {excess:e} ({case:?})"
        )));
    }
    Ok(Some((Ball { center, radius: rad }, case)))
}

/// Check that `output` avoids every open ball `B(xi_n, s r_n)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AvoidanceCheck {
    /// Smallest `dist(output, xi_n) - s r_n`.
    pub margin: f64,
    pub worst: Option<usize>,
    pub ok: bool,
}

pub fn check_avoidance<S: UncoverSpace>(fam: &BallFamily<S>, s: f64, output: &S::Point, tol: f64) -> AvoidanceCheck {
    let mut margin = f64::INFINITY;
    let mut worst = None;
    for (i, b) in fam.balls.iter().enumerate() {
        let m = fam.space.dist(output, &b.center) - s * b.radius;
        if m < margin {
            margin = m;
            worst = Some(i);
        }
    }
    AvoidanceCheck { margin, worst, ok: margin >= -tol }
}

struct Plan {
    start: usize,
    order: Vec<usize>,
    delta: f64,
}

fn plan<S: UncoverSpace>(fam: &BallFamily<S>, s: f64, start: Option<usize>) -> Result<Plan> {
    if fam.balls.is_empty() {
        return Err(Error::Empty("ball family is empty".into()));
    }
    let d = fam.packing_constant;
    let modulus = fam.space.modulus();
    let bound = s0(d, modulus, fam.space.has_lines())?;
    if !(s > 0.0) || s >= bound {
        return Err(Error::ShrinkTooLarge { s, bound });
    }
    let delta = if fam.space.has_lines() {
        0.0
    } else {
        let mut eps = best_epsilon(d, modulus)?.0;
        if let Modulus::Identity = modulus {
            eps = 0.5;
        }
        modulus.delta(eps)
    };
    let sup = fam.balls.iter().map(|b| b.radius).fold(0.0, f64::max);
    let eps = 1.0 - (1.0 + s) * math::sqrt(d);
    let start = match start {
        Some(i) => {
            let b = fam.balls.get(i).ok_or_else(|| invalid("start index out of range"))?;
            if b.radius < (1.0 - eps) * sup {
                return Err(invalid(format!("start ball {i} is too small to seed the construction")));
            }
            i
        }
        None => {
            let mut best = 0;
            for (i, b) in fam.balls.iter().enumerate() {
                if b.radius > fam.balls[best].radius {
                    best = i;
                }
            }
            best
        }
    };
    let r0 = fam.balls[start].radius;
    let c0 = &fam.balls[start].center;
    let mut order: Vec<usize> = (0..fam.balls.len())
        .filter(|&i| i != start)
        .filter(|&i| fam.balls[i].radius <= r0)
        .filter(|&i| fam.space.dist(&fam.balls[i].center, c0) <= 3.0 * sup)
        .collect();
    order.sort_by(|&a, &b| fam.balls[b].radius.total_cmp(&fam.balls[a].radius).then(a.cmp(&b)));
    Ok(Plan { start, order, delta })
}

fn descend<S: UncoverSpace>(fam: &BallFamily<S>, s: f64, plan: &Plan, contact: &S::Point) -> Result<NestedWitness<S::Point>> {
    let sp = &fam.space;
    let b0 = &fam.balls[plan.start];
    let k0 = canonical_ball(sp, &b0.center, b0.radius, s * b0.radius, contact)?;
    let mut chain = alloc::vec![Link {
        index: plan.start,
        ball: CanonicalBall { center: k0.center.clone(), radius: k0.radius, annulus_of: plan.start, s },
        case: StepCase::Start,
    }];
    let mut k = k0;
    for &i in &plan.order {
        if let Some((next, case)) = refine_step(sp, &k, &fam.balls[i], s, plan.delta)? {
            chain.push(Link {
                index: i,
                ball: CanonicalBall { center: next.center.clone(), radius: next.radius, annulus_of: i, s },
                case,
            });
            k = next;
        }
    }
    Ok(NestedWitness { chain, output: k.center })
}

/// Finds a point avoiding every open ball `B(xi_n, s r_n)` of the family.
pub fn uncover<S: UncoverSpace>(fam: &BallFamily<S>, s: f64, start: Option<usize>) -> Result<NestedWitness<S::Point>> {
    let plan = plan(fam, s, start)?;
    let b0 = &fam.balls[plan.start];
    let p = fam.space.sphere_point(&b0.center, b0.radius);
    descend(fam, s, &plan, &p)
}

/// Two avoiding points seeded at antipodal canonical balls of the start
/// ball; they lie at distance at least `s r_start` from each other.
pub fn uncover_two<S: UncoverSpace>(
    fam: &BallFamily<S>,
    s: f64,
    start: Option<usize>,
) -> Result<(NestedWitness<S::Point>, NestedWitness<S::Point>)> {
    let plan = plan(fam, s, start)?;
    let b0 = &fam.balls[plan.start];
    let (p, q) = fam
        .space
        .antipodal_pair(&b0.center, b0.radius)
        .ok_or_else(|| invalid("space has no antipodal points"))?;
    Ok((descend(fam, s, &plan, &p)?, descend(fam, s, &plan, &q)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn phi_values() {
        assert!(phi(2.0).unwrap().abs() < 1e-15);
        assert!((phi(1.0).unwrap() - (math::sqrt(5.0) - 2.0)).abs() < 1e-15);
        assert!((phi(1.5).unwrap() - 0.097168).abs() < 1e-6);
        assert!(phi(0.0).is_err());
    }

    #[test]
    fn s0_closed_forms() {
        let l = s0(0.25, Modulus::Identity, true).unwrap();
        assert!((l - (math::sqrt(5.0) - 2.0)).abs() < 1e-15);
        let g = s0(0.25, Modulus::Identity, false).unwrap();
        assert!((g - 0.097168).abs() < 1e-6);
        let h = s0(0.25, Modulus::Heisenberg, false).unwrap();
        assert!((h - 0.018373).abs() < 1e-6);
        assert!(s0(0.3, Modulus::Identity, false).is_err());
        assert!(s0(0.5, Modulus::Identity, true).is_err());
    }

    #[test]
    fn golden_section_matches_identity_closed_form() {
        let (eps, v) = best_epsilon(0.25, Modulus::Identity).unwrap();
        assert!((eps - 0.5).abs() < 1e-6);
        assert!((v - phi(1.5).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn t0_values() {
        let a = t0(1.0, Modulus::Identity, true, 0.5).unwrap();
        assert!((a + math::ln(math::sqrt(5.0) - 2.0)).abs() < 1e-12);
        let b = t0(1.0, Modulus::Identity, false, 0.5).unwrap();
        assert!((b - 2.331).abs() < 1e-3);
    }

    #[test]
    fn canonical_ball_examples() {
        let e1 = Euclidean::new(1);
        let k = canonical_ball(&e1, &vec![0.0], 1.0, 0.5, &vec![1.0]).unwrap();
        assert_eq!((k.center, k.radius), (vec![0.75], 0.25));
        let e2 = Euclidean::new(2);
        let k = canonical_ball(&e2, &vec![0.0, 0.0], 2.0, 1.0, &vec![2.0, 0.0]).unwrap();
        assert_eq!((k.center, k.radius), (vec![1.5, 0.0], 0.5));
        assert!(canonical_ball(&e1, &vec![0.0], 1.0, 0.5, &vec![0.9]).is_err());
    }

    #[test]
    fn refine_far_ball_is_skipped() {
        let e = Euclidean::new(1);
        let k = Ball { center: vec![0.6], radius: 0.4 };
        let far = Ball { center: vec![3.0], radius: 1.0 };
        assert!(refine_step(&e, &k, &far, 0.2, 0.0).unwrap().is_none());
        let near_miss = Ball { center: vec![1.2], radius: 0.3 };
        assert!(refine_step(&e, &k, &near_miss, 0.2, 0.0).unwrap().is_none());
    }

    #[test]
    fn refine_far_case() {
        let e = Euclidean::new(1);
        let k = Ball { center: vec![0.6], radius: 0.4 };
        let other = Ball { center: vec![1.0], radius: 0.25 };
        let (kp, case) = refine_step(&e, &k, &other, 0.2, 0.0).unwrap().unwrap();
        assert_eq!(case, StepCase::Far);
        assert!((kp.center[0] - 0.85).abs() < 1e-15 && (kp.radius - 0.1).abs() < 1e-15);
    }

    #[test]
    fn refine_inner_case_in_the_plane() {
        let e = Euclidean { dim: 2, lines: false };
        let k = Ball { center: vec![0.55, 0.0], radius: 0.45 };
        let other = Ball { center: vec![0.56, 0.02], radius: 0.2 };
        let (kp, case) = refine_step(&e, &k, &other, 0.05, 0.5).unwrap().unwrap();
        assert_eq!(case, StepCase::Inner);
        assert!(math::dist(&kp.center, &k.center) + kp.radius <= k.radius + 1e-12);
    }

    #[test]
    fn single_ball() {
        let fam = BallFamily::new(Euclidean::new(1), vec![Ball { center: vec![0.0], radius: 1.0 }], 0.25).unwrap();
        let w = uncover(&fam, 0.1, None).unwrap();
        let d = w.output[0].abs();
        assert!((0.1..=1.0).contains(&d));
        let (a, b) = uncover_two(&fam, 0.1, None).unwrap();
        assert!(a.output[0] > 0.0 && b.output[0] < 0.0);
    }

    #[test]
    fn two_tangent_shadows() {
        let balls = vec![Ball { center: vec![0.0], radius: 0.5 }, Ball { center: vec![1.0], radius: 0.5 }];
        let fam = BallFamily::new(Euclidean::new(1), balls, 0.25).unwrap();
        let w = uncover(&fam, 0.2, None).unwrap();
        assert!(check_avoidance(&fam, 0.2, &w.output, 1e-12).ok);
    }

    #[test]
    fn shrink_above_bound_is_rejected() {
        let fam = BallFamily::new(Euclidean::new(1), vec![Ball { center: vec![0.0], radius: 1.0 }], 0.25).unwrap();
        assert!(matches!(uncover(&fam, 0.24, None), Err(Error::ShrinkTooLarge { .. })));
    }
}

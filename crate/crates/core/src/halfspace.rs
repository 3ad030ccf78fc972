//! Upper half-space model of real hyperbolic space.
//!
//! Points are `(base, height)` with `base` in `R^{n-1}` and `height > 0`.
//! Horoballs are either Euclidean balls tangent to the boundary or the
//! region above a fixed height. Geodesics are unit speed, oriented from
//! their first ideal endpoint to their second, and may be restricted to a
//! parameter range.

use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};
use crate::math;

/// A point of the upper half-space.
#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    pub base: Vec<f64>,
    pub height: f64,
}

impl Point {
    pub fn new(base: Vec<f64>, height: f64) -> Result<Self> {
        if !(height > 0.0) || !height.is_finite() {
            return Err(invalid("point height must be positive and finite"));
        }
        if base.iter().any(|x| !x.is_finite()) {
            return Err(invalid("point base must be finite"));
        }
        Ok(Point { base, height })
    }

    pub fn boundary_dim(&self) -> usize {
        self.base.len()
    }
}

/// A point of the ideal boundary `R^{n-1} ∪ {∞}`.
#[derive(Debug, Clone, PartialEq)]
pub enum Ideal {
    Finite(Vec<f64>),
    Infinity,
}

/// A horoball of the upper half-space.
#[derive(Debug, Clone, PartialEq)]
pub enum Horoball {
    /// Euclidean ball of radius `radius` tangent to the boundary at `base`.
    Tangent { base: Vec<f64>, radius: f64 },
    /// The region `{height >= height}` centered at infinity.
    AtInfinity { height: f64 },
}

impl Horoball {
    pub fn tangent(base: Vec<f64>, radius: f64) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(invalid("horoball radius must be positive and finite"));
        }
        Ok(Horoball::Tangent { base, radius })
    }

    pub fn at_infinity(height: f64) -> Result<Self> {
        if !(height > 0.0) || !height.is_finite() {
            return Err(invalid("horoball height must be positive and finite"));
        }
        Ok(Horoball::AtInfinity { height })
    }

    /// The ideal point the horoball is centered at.
    pub fn center(&self) -> Ideal {
        match self {
            Horoball::Tangent { base, .. } => Ideal::Finite(base.clone()),
            Horoball::AtInfinity { .. } => Ideal::Infinity,
        }
    }

    pub fn is_tangent(&self) -> bool {
        matches!(self, Horoball::Tangent { .. })
    }

    /// Whether `p` lies in the closed horoball.
    pub fn contains(&self, p: &Point) -> bool {
        point_to_horoball_dist(p, self) <= 0.0
    }
}

/// A closed interval of geodesic parameters; either end may be infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamRange {
    pub lo: f64,
    pub hi: f64,
}

impl ParamRange {
    pub const FULL: ParamRange = ParamRange { lo: f64::NEG_INFINITY, hi: f64::INFINITY };

    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() || lo > hi {
            return Err(invalid("parameter range must satisfy lo <= hi"));
        }
        Ok(ParamRange { lo, hi })
    }

    pub fn from(lo: f64) -> Self {
        ParamRange { lo, hi: f64::INFINITY }
    }

    pub fn contains(&self, t: f64) -> bool {
        self.lo <= t && t <= self.hi
    }

    pub fn clamp(&self, t: f64) -> f64 {
        if t < self.lo {
            self.lo
        } else if t > self.hi {
            self.hi
        } else {
            t
        }
    }

    pub fn intersect(&self, lo: f64, hi: f64) -> Option<(f64, f64)> {
        let a = self.lo.max(lo);
        let b = self.hi.min(hi);
        (a <= b).then_some((a, b))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum GeodesicKind {
    /// Vertical line over `foot`. Downward lines run from infinity to the
    /// foot with `height = e^{-t}`; upward lines run the other way.
    Vertical { foot: Vec<f64>, upward: bool },
    /// Semicircle from `a` to `b`, parameter 0 at the top.
    Arc { a: Vec<f64>, b: Vec<f64> },
}

/// An oriented unit-speed geodesic restricted to `range`.
#[derive(Debug, Clone, PartialEq)]
pub struct Geodesic {
    pub kind: GeodesicKind,
    pub range: ParamRange,
}

impl Geodesic {
    pub fn vertical(foot: Vec<f64>) -> Self {
        Geodesic { kind: GeodesicKind::Vertical { foot, upward: false }, range: ParamRange::FULL }
    }

    pub fn arc(a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::DimensionMismatch { expected: a.len(), found: b.len() });
        }
        if math::dist_sq(&a, &b) == 0.0 {
            return Err(invalid("arc endpoints coincide"));
        }
        Ok(Geodesic { kind: GeodesicKind::Arc { a, b }, range: ParamRange::FULL })
    }

    /// The full line from `from` to `to`.
    pub fn between(from: &Ideal, to: &Ideal) -> Result<Self> {
        match (from, to) {
            (Ideal::Infinity, Ideal::Infinity) => Err(invalid("geodesic endpoints coincide")),
            (Ideal::Infinity, Ideal::Finite(f)) => Ok(Geodesic::vertical(f.clone())),
            (Ideal::Finite(f), Ideal::Infinity) => Ok(Geodesic {
                kind: GeodesicKind::Vertical { foot: f.clone(), upward: true },
                range: ParamRange::FULL,
            }),
            (Ideal::Finite(a), Ideal::Finite(b)) => Geodesic::arc(a.clone(), b.clone()),
        }
    }

    pub fn with_range(mut self, range: ParamRange) -> Self {
        self.range = range;
        self
    }

    pub fn boundary_dim(&self) -> usize {
        match &self.kind {
            GeodesicKind::Vertical { foot, .. } => foot.len(),
            GeodesicKind::Arc { a, .. } => a.len(),
        }
    }

    /// `(start, end)` ideal endpoints of the underlying full line.
    pub fn endpoints(&self) -> (Ideal, Ideal) {
        match &self.kind {
            GeodesicKind::Vertical { foot, upward: false } => (Ideal::Infinity, Ideal::Finite(foot.clone())),
            GeodesicKind::Vertical { foot, upward: true } => (Ideal::Finite(foot.clone()), Ideal::Infinity),
            GeodesicKind::Arc { a, b } => (Ideal::Finite(a.clone()), Ideal::Finite(b.clone())),
        }
    }

    /// Same set, opposite orientation; `t` maps to `-t`.
    pub fn reversed(&self) -> Self {
        let kind = match &self.kind {
            GeodesicKind::Vertical { foot, upward } => GeodesicKind::Vertical { foot: foot.clone(), upward: !upward },
            GeodesicKind::Arc { a, b } => GeodesicKind::Arc { a: b.clone(), b: a.clone() },
        };
        Geodesic { kind, range: ParamRange { lo: -self.range.hi, hi: -self.range.lo } }
    }

    pub fn point_at(&self, t: f64) -> Point {
        match &self.kind {
            GeodesicKind::Vertical { foot, upward } => {
                let h = if *upward { math::exp(t) } else { math::exp(-t) };
                Point { base: foot.clone(), height: h }
            }
            GeodesicKind::Arc { a, b } => {
                let rho = math::dist(a, b) / 2.0;
                let th = libm::tanh(t);
                let base = a
                    .iter()
                    .zip(b)
                    .map(|(x, y)| 0.5 * (x + y) + th * 0.5 * (y - x))
                    .collect();
                Point { base, height: rho / libm::cosh(t) }
            }
        }
    }

    /// Parameter of a point assumed to lie on the line.
    pub fn param_of(&self, p: &Point) -> f64 {
        match &self.kind {
            GeodesicKind::Vertical { upward, .. } => {
                if *upward {
                    math::ln(p.height)
                } else {
                    -math::ln(p.height)
                }
            }
            GeodesicKind::Arc { a, b } => {
                let h2 = p.height * p.height;
                let da = math::dist_sq(&p.base, a) + h2;
                let db = math::dist_sq(&p.base, b) + h2;
                0.5 * (math::ln(da) - math::ln(db))
            }
        }
    }

    /// Ray from `x` toward the ideal point `to`, parameterized from `x`'s
    /// parameter onward.
    pub fn ray(x: &Point, to: &Ideal) -> Result<Self> {
        let g = geodesic_through(x, to)?.reversed();
        let t0 = g.param_of(x);
        Ok(g.with_range(ParamRange::from(t0)))
    }
}

/// Hyperbolic distance between two points.
pub fn hyperbolic_dist(p: &Point, q: &Point) -> f64 {
    let dh = p.height - q.height;
    let e2 = math::dist_sq(&p.base, &q.base) + dh * dh;
    2.0 * math::asinh(math::sqrt(e2) / (2.0 * math::sqrt(p.height * q.height)))
}

/// Signed algebraic distance between two horoballs; negative when they
/// overlap, zero when tangent.
pub fn dist_alg_horoballs(h1: &Horoball, h2: &Horoball) -> Result<f64> {
    match (h1, h2) {
        (Horoball::Tangent { base: x, radius: r }, Horoball::Tangent { base: y, radius: s }) => {
            if x.len() != y.len() {
                return Err(Error::DimensionMismatch { expected: x.len(), found: y.len() });
            }
            let d2 = math::dist_sq(x, y);
            if d2 == 0.0 {
                return Err(invalid("horoballs share a center"));
            }
            Ok(math::ln(d2) - math::ln(4.0 * r * s))
        }
        (Horoball::Tangent { radius, .. }, Horoball::AtInfinity { height })
        | (Horoball::AtInfinity { height }, Horoball::Tangent { radius, .. }) => {
            Ok(math::ln(*height) - math::ln(2.0 * radius))
        }
        (Horoball::AtInfinity { .. }, Horoball::AtInfinity { .. }) => Err(invalid("horoballs share a center")),
    }
}

/// The horoball `H(t)`: same center, boundary pushed `t` deeper.
pub fn shrink(h: &Horoball, t: f64) -> Result<Horoball> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(invalid("shrink amount must be finite and non-negative"));
    }
    Ok(shrink_by_factor_unchecked(h, math::exp(-t)))
}

/// Shrink by the multiplicative factor `s = e^{-t}` in `(0, 1]`.
pub fn shrink_by_factor(h: &Horoball, s: f64) -> Result<Horoball> {
    if !(s > 0.0 && s <= 1.0) {
        return Err(invalid("shrink factor must lie in (0, 1]"));
    }
    Ok(shrink_by_factor_unchecked(h, s))
}

fn shrink_by_factor_unchecked(h: &Horoball, s: f64) -> Horoball {
    match h {
        Horoball::Tangent { base, radius } => Horoball::Tangent { base: base.clone(), radius: radius * s },
        Horoball::AtInfinity { height } => Horoball::AtInfinity { height: height / s },
    }
}

/// Busemann function of the point at infinity, zero at height 1.
pub fn busemann_height(p: &Point) -> f64 {
    math::ln(p.height)
}

/// Signed distance from a point to a horoball; negative inside.
pub fn point_to_horoball_dist(p: &Point, h: &Horoball) -> f64 {
    match h {
        Horoball::Tangent { base, radius } => {
            let q = math::dist_sq(&p.base, base) + p.height * p.height;
            math::ln(q) - math::ln(2.0 * radius * p.height)
        }
        Horoball::AtInfinity { height } => math::ln(*height) - math::ln(p.height),
    }
}

/// The full line starting at `xi` and passing through `p`.
pub fn geodesic_through(p: &Point, xi: &Ideal) -> Result<Geodesic> {
    match xi {
        Ideal::Infinity => Ok(Geodesic::vertical(p.base.clone())),
        Ideal::Finite(x) => {
            if x.len() != p.base.len() {
                return Err(Error::DimensionMismatch { expected: p.base.len(), found: x.len() });
            }
            let w = math::sub(&p.base, x);
            let w2 = math::norm_sq(&w);
            if w2 == 0.0 {
                return Geodesic::between(xi, &Ideal::Infinity);
            }
            let den = w2 + p.height * p.height;
            let other = math::axpy(x, den / w2, &w);
            Geodesic::arc(x.clone(), other)
        }
    }
}

/// Closed-form profile of a geodesic against one horoball.
enum Profile {
    /// `f(t) = c + sign * t`, vertical line against the horoball at infinity.
    Linear { c: f64, sign: f64 },
    /// Vertical line against a tangent horoball.
    VerticalBall { ln2r: f64, u2: f64, upward: bool },
    /// `f(t) = ln(4 r rho) - ln(P e^t + Q e^{-t})`.
    ArcBall { ln4rrho: f64, p: f64, q: f64, rho: f64, r: f64 },
    /// `f(t) = ln(rho / h) - ln cosh t`.
    ArcTop { c: f64, rho: f64, h: f64 },
}

fn profile(g: &Geodesic, h: &Horoball) -> Profile {
    match (&g.kind, h) {
        (GeodesicKind::Vertical { upward, .. }, Horoball::AtInfinity { height }) => {
            let sign = if *upward { 1.0 } else { -1.0 };
            Profile::Linear { c: -math::ln(*height), sign }
        }
        (GeodesicKind::Vertical { foot, upward }, Horoball::Tangent { base, radius }) => Profile::VerticalBall {
            ln2r: math::ln(2.0 * radius),
            u2: math::dist_sq(foot, base),
            upward: *upward,
        },
        (GeodesicKind::Arc { a, b }, Horoball::Tangent { base, radius }) => {
            let rho = math::dist(a, b) / 2.0;
            Profile::ArcBall {
                ln4rrho: math::ln(4.0 * radius * rho),
                p: math::dist_sq(b, base),
                q: math::dist_sq(a, base),
                rho,
                r: *radius,
            }
        }
        (GeodesicKind::Arc { a, b }, Horoball::AtInfinity { height }) => {
            let rho = math::dist(a, b) / 2.0;
            Profile::ArcTop { c: math::ln(rho / height), rho, h: *height }
        }
    }
}

fn ln_cosh(t: f64) -> f64 {
    let a = t.abs();
    a + libm::log1p(math::exp(-2.0 * a)) - core::f64::consts::LN_2
}

impl Profile {
    fn at(&self, t: f64) -> f64 {
        match *self {
            Profile::Linear { c, sign } => c + sign * t,
            Profile::VerticalBall { ln2r, u2, upward } => {
                let lh = if upward { t } else { -t };
                let h = math::exp(lh);
                ln2r + lh - math::ln(u2 + h * h)
            }
            Profile::ArcBall { ln4rrho, p, q, .. } => {
                // ln(P e^t + Q e^-t) computed without overflow
                let a = if p > 0.0 { math::ln(p) + t } else { f64::NEG_INFINITY };
                let b = if q > 0.0 { math::ln(q) - t } else { f64::NEG_INFINITY };
                let m = a.max(b);
                ln4rrho - (m + math::ln(math::exp(a - m) + math::exp(b - m)))
            }
            Profile::ArcTop { c, .. } => c - ln_cosh(t),
        }
    }

    fn argmax(&self) -> f64 {
        match *self {
            Profile::Linear { sign, .. } => sign * f64::INFINITY,
            Profile::VerticalBall { u2, upward, .. } => {
                let lu = 0.5 * math::ln(u2);
                if upward {
                    lu
                } else {
                    -lu
                }
            }
            Profile::ArcBall { p, q, .. } => 0.5 * (math::ln(q) - math::ln(p)),
            Profile::ArcTop { .. } => 0.0,
        }
    }

    fn sup(&self) -> f64 {
        let t = self.argmax();
        if t.is_finite() {
            self.at(t)
        } else {
            f64::INFINITY
        }
    }

    fn entry_exit(&self) -> Option<(f64, f64)> {
        match *self {
            Profile::Linear { c, sign } => {
                let t = -c / sign;
                Some(if sign > 0.0 { (t, f64::INFINITY) } else { (f64::NEG_INFINITY, t) })
            }
            Profile::VerticalBall { ln2r, u2, upward } => {
                let r = math::exp(ln2r) / 2.0;
                let disc = r * r - u2;
                if disc < 0.0 {
                    return None;
                }
                let hi = r + math::sqrt(disc);
                let lo = if hi > 0.0 { u2 / hi } else { 0.0 };
                let (lhl, lhh) = (math::ln(lo), math::ln(hi));
                Some(if upward { (lhl, lhh) } else { (-lhh, -lhl) })
            }
            Profile::ArcBall { p, q, rho, r, .. } => {
                let k = 2.0 * r * rho;
                if p == 0.0 {
                    return Some((math::ln(q / (2.0 * k)), f64::INFINITY));
                }
                if q == 0.0 {
                    return Some((f64::NEG_INFINITY, math::ln(2.0 * k / p)));
                }
                let disc = k * k - p * q;
                if disc < 0.0 {
                    return None;
                }
                let zp = (k + math::sqrt(disc)) / p;
                let zm = q / (p * zp);
                Some((math::ln(zm), math::ln(zp)))
            }
            Profile::ArcTop { rho, h, .. } => {
                if rho < h {
                    return None;
                }
                let w = math::acosh(rho / h);
                Some((-w, w))
            }
        }
    }
}

/// Signed hyperbolic depth of the deepest point of `g` (within its range)
/// inside `h`. A value `<= 0` means the geodesic avoids the open horoball.
pub fn penetration_depth(g: &Geodesic, h: &Horoball) -> f64 {
    let prof = profile(g, h);
    let star = prof.argmax();
    let t = g.range.clamp(star);
    if t.is_infinite() {
        return f64::INFINITY;
    }
    prof.at(t)
}

/// Depth of the full line, ignoring its range.
pub fn line_depth(g: &Geodesic, h: &Horoball) -> f64 {
    profile(g, h).sup()
}

/// Signed depth of the point `g(t)` inside `h`.
pub fn depth_at(g: &Geodesic, h: &Horoball, t: f64) -> f64 {
    profile(g, h).at(t)
}

/// Parameter of the deepest point of the full line; may be infinite.
pub fn deepest_param(g: &Geodesic, h: &Horoball) -> f64 {
    profile(g, h).argmax()
}

/// Parameter interval where the full line lies in the closed horoball.
pub fn entry_exit(g: &Geodesic, h: &Horoball) -> Option<(f64, f64)> {
    profile(g, h).entry_exit()
}

/// Parameter interval where `g`, restricted to its range, lies in the
/// closed horoball.
pub fn entry_exit_in_range(g: &Geodesic, h: &Horoball) -> Option<(f64, f64)> {
    let (a, b) = entry_exit(g, h)?;
    g.range.intersect(a, b)
}

/// Reflection in the unit sphere centered at a boundary point. It is a
/// hyperbolic isometry exchanging `center` and infinity.
#[derive(Debug, Clone, PartialEq)]
pub struct Inversion {
    pub center: Vec<f64>,
}

impl Inversion {
    pub fn new(center: Vec<f64>) -> Self {
        Inversion { center }
    }

    pub fn point(&self, p: &Point) -> Point {
        let w = math::sub(&p.base, &self.center);
        let den = math::norm_sq(&w) + p.height * p.height;
        Point { base: math::axpy(&self.center, 1.0 / den, &w), height: p.height / den }
    }

    pub fn ideal(&self, x: &Ideal) -> Ideal {
        match x {
            Ideal::Infinity => Ideal::Finite(self.center.clone()),
            Ideal::Finite(v) => {
                let w = math::sub(v, &self.center);
                let d2 = math::norm_sq(&w);
                if d2 == 0.0 {
                    Ideal::Infinity
                } else {
                    Ideal::Finite(math::axpy(&self.center, 1.0 / d2, &w))
                }
            }
        }
    }

    pub fn horoball(&self, h: &Horoball) -> Horoball {
        match h {
            Horoball::AtInfinity { height } => {
                Horoball::Tangent { base: self.center.clone(), radius: 1.0 / (2.0 * height) }
            }
            Horoball::Tangent { base, radius } => {
                let w = math::sub(base, &self.center);
                let d2 = math::norm_sq(&w);
                if d2 == 0.0 {
                    Horoball::AtInfinity { height: 1.0 / (2.0 * radius) }
                } else {
                    Horoball::Tangent { base: math::axpy(&self.center, 1.0 / d2, &w), radius: radius / d2 }
                }
            }
        }
    }

    /// Image geodesic with the same orientation; finite range ends are
    /// carried over through the induced parameter shift.
    pub fn geodesic(&self, g: &Geodesic) -> Result<Geodesic> {
        let (a, b) = g.endpoints();
        let img = Geodesic::between(&self.ideal(&a), &self.ideal(&b))?;
        let shift = img.param_of(&self.point(&g.point_at(0.0)));
        Ok(img.with_range(ParamRange { lo: g.range.lo + shift, hi: g.range.hi + shift }))
    }
}

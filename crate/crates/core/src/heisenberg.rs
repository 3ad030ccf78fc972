//! The Heisenberg group `C x R` with its Cygan and Carnot-Carathéodory
//! metrics, and its nested-ball space instance.

use core::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{invalid, Result};
use crate::math;
use crate::uncover::{t0, Modulus, UncoverSpace};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeisPoint {
    pub zeta: Complex64,
    pub v: f64,
}

impl HeisPoint {
    pub const IDENTITY: HeisPoint = HeisPoint { zeta: Complex64 { re: 0.0, im: 0.0 }, v: 0.0 };

    pub fn new(x: f64, y: f64, v: f64) -> Self {
        HeisPoint { zeta: Complex64::new(x, y), v }
    }

    pub fn inverse(&self) -> Self {
        HeisPoint { zeta: -self.zeta, v: -self.v }
    }

    /// Gauge `(|zeta|^4 + v^2)^{1/4}`.
    pub fn gauge(&self) -> f64 {
        let n2 = self.zeta.norm_sqr();
        math::sqrt(math::sqrt(n2 * n2 + self.v * self.v))
    }
}

/// `(zeta, v)(zeta', v') = (zeta + zeta', v + v' + 2 Im(zeta conj(zeta')))`.
pub fn heis_mul(a: &HeisPoint, b: &HeisPoint) -> HeisPoint {
    HeisPoint { zeta: a.zeta + b.zeta, v: a.v + b.v + 2.0 * (a.zeta * b.zeta.conj()).im }
}

pub fn cygan_dist(a: &HeisPoint, b: &HeisPoint) -> f64 {
    heis_mul(&a.inverse(), b).gauge()
}

pub fn dilate(a: &HeisPoint, t: f64) -> Result<HeisPoint> {
    if !(t > 0.0) {
        return Err(invalid("dilation factor must be positive"));
    }
    Ok(HeisPoint { zeta: a.zeta * t, v: a.v * t * t })
}

/// `(theta - sin theta cos theta) / sin^2 theta`, the ratio `|v| / |zeta|^2`
/// reached by a geodesic whose projection turns by `2 theta`.
fn area_ratio(theta: f64) -> f64 {
    let s = math::sin(theta);
    num(theta) / (s * s)
}

fn num(theta: f64) -> f64 {
    if theta < 1e-3 {
        let t2 = theta * theta;
        theta * t2 * (2.0 / 3.0 - t2 * (2.0 / 15.0 - t2 * 4.0 / 315.0))
    } else {
        theta - math::sin(theta) * math::cos(theta)
    }
}

/// A unit-speed horizontal geodesic from the identity: the projection
/// turns with constant curvature `kappa` from initial heading `heading`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CcGeodesic {
    pub heading: f64,
    pub kappa: f64,
    pub length: f64,
}

impl CcGeodesic {
    pub fn point(&self, sigma: f64) -> HeisPoint {
        let w = self.kappa * sigma;
        let rot = Complex64::from_polar(1.0, self.heading);
        let (z, v) = if w.abs() < 1e-2 {
            // (e^{iw} - 1)/(iw) and (w - sin w)/w^2 by series
            let w2 = w * w;
            let re = 1.0 - w2 / 6.0 + w2 * w2 / 120.0;
            let im = w / 2.0 - w * w2 / 24.0 + w * w2 * w2 / 720.0;
            let q = w / 6.0 - w * w2 / 120.0 + w * w2 * w2 / 5040.0;
            (Complex64::new(re, im) * sigma, -2.0 * sigma * sigma * q)
        } else {
            let e = Complex64::from_polar(1.0, w) - 1.0;
            (e / Complex64::new(0.0, self.kappa), -2.0 * (w - math::sin(w)) / (self.kappa * self.kappa))
        };
        HeisPoint { zeta: rot * z, v }
    }
}

/// Length-minimizing horizontal geodesic from the identity to `p`.
pub fn cc_geodesic(p: &HeisPoint) -> CcGeodesic {
    let c = p.zeta.norm();
    let av = p.v.abs();
    if av == 0.0 {
        return CcGeodesic { heading: p.zeta.arg(), kappa: 0.0, length: c };
    }
    let theta = if c == 0.0 {
        PI
    } else {
        let q = av / (c * c);
        let (mut lo, mut hi) = (0.0f64, PI);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if area_ratio(mid) < q {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    };
    let length = if theta >= PI {
        math::sqrt(PI * av)
    } else if av <= c * c {
        c * theta / math::sin(theta)
    } else {
        math::sqrt(av * theta * theta / num(theta))
    };
    let turn = -2.0 * theta * p.v.signum();
    let heading = if c == 0.0 { 0.0 } else { p.zeta.arg() - turn / 2.0 };
    CcGeodesic { heading, kappa: turn / length, length }
}

/// Carnot-Carathéodory distance. The root-find runs to full double
/// precision, so any positive `accuracy` is met.
pub fn cc_dist(a: &HeisPoint, b: &HeisPoint, accuracy: f64) -> Result<f64> {
    if !(accuracy > 0.0) {
        return Err(invalid("accuracy must be positive"));
    }
    Ok(cc_norm(&heis_mul(&a.inverse(), b)))
}

fn cc_norm(p: &HeisPoint) -> f64 {
    cc_geodesic(p).length
}

/// `x dilate(x^{-1} y, r / d_CC(x, y))`, on the sphere `S(x, r)`.
pub fn extend_sphere_cc(x: &HeisPoint, y: &HeisPoint, r: f64) -> Result<HeisPoint> {
    if !(r > 0.0) {
        return Err(invalid("radius must be positive"));
    }
    let rel = heis_mul(&x.inverse(), y);
    let a = cc_norm(&rel);
    if a == 0.0 {
        return Err(invalid("cannot extend from the center"));
    }
    Ok(heis_mul(x, &dilate(&rel, r / a)?))
}

/// Complex hyperbolic plane: `t0(sqrt(pi), Heisenberg modulus, 2^{-1/2})`.
pub fn t0_complex_hyperbolic() -> f64 {
    t0(math::sqrt(PI), Modulus::Heisenberg, false, core::f64::consts::FRAC_1_SQRT_2)
        .expect("constants are in range")
}

/// The Heisenberg group with its Carnot-Carathéodory metric.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Heisenberg;

impl UncoverSpace for Heisenberg {
    type Point = HeisPoint;

    fn dist(&self, a: &HeisPoint, b: &HeisPoint) -> f64 {
        cc_norm(&heis_mul(&a.inverse(), b))
    }

    fn point_toward(&self, from: &HeisPoint, toward: &HeisPoint, lambda: f64) -> HeisPoint {
        let rel = heis_mul(&from.inverse(), toward);
        if rel == HeisPoint::IDENTITY {
            return *from;
        }
        heis_mul(from, &cc_geodesic(&rel).point(lambda))
    }

    fn extend_sphere(&self, center: &HeisPoint, near: &HeisPoint, r: f64) -> HeisPoint {
        extend_sphere_cc(center, near, r).unwrap_or_else(|_| self.sphere_point(center, r))
    }

    fn sphere_point(&self, center: &HeisPoint, r: f64) -> HeisPoint {
        heis_mul(center, &HeisPoint::new(r, 0.0, 0.0))
    }

    fn antipodal_pair(&self, center: &HeisPoint, r: f64) -> Option<(HeisPoint, HeisPoint)> {
        Some((heis_mul(center, &HeisPoint::new(r, 0.0, 0.0)), heis_mul(center, &HeisPoint::new(-r, 0.0, 0.0))))
    }

    fn modulus(&self) -> Modulus {
        Modulus::Heisenberg
    }

    fn has_lines(&self) -> bool {
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &HeisPoint, b: &HeisPoint, tol: f64) -> bool {
        (a.zeta - b.zeta).norm() <= tol && (a.v - b.v).abs() <= tol
    }

    #[test]
    fn group_law() {
        let z = HeisPoint::new(0.3, -1.2, 0.7);
        assert_eq!(heis_mul(&HeisPoint::IDENTITY, &z), z);
        assert_eq!(heis_mul(&HeisPoint::new(1.0, 0.0, 0.0), &HeisPoint::new(0.0, 1.0, 0.0)), HeisPoint::new(1.0, 1.0, -2.0));
        assert!(close(&heis_mul(&z, &z.inverse()), &HeisPoint::IDENTITY, 0.0));
    }

    #[test]
    fn cygan_examples() {
        let o = HeisPoint::IDENTITY;
        assert_eq!(cygan_dist(&o, &HeisPoint::new(1.0, 0.0, 0.0)), 1.0);
        assert_eq!(cygan_dist(&o, &HeisPoint::new(0.0, 0.0, 1.0)), 1.0);
        assert!((cygan_dist(&o, &HeisPoint::new(1.0, 0.0, 1.0)) - math::powf(2.0, 0.25)).abs() < 1e-15);
        assert_eq!(dilate(&HeisPoint::new(1.0, 0.0, 1.0), 2.0).unwrap(), HeisPoint::new(2.0, 0.0, 4.0));
        assert!(dilate(&o, 0.0).is_err());
    }

    #[test]
    fn cc_examples() {
        let o = HeisPoint::IDENTITY;
        assert!((cc_dist(&o, &HeisPoint::new(1.0, 0.0, 0.0), 1e-3).unwrap() - 1.0).abs() < 1e-15);
        assert!((cc_dist(&o, &HeisPoint::new(0.0, 0.0, 1.0), 1e-3).unwrap() - math::sqrt(PI)).abs() < 1e-12);
        assert!(cc_dist(&o, &o, 0.0).is_err());
    }

    #[test]
    fn geodesic_reaches_its_target() {
        for p in [
            HeisPoint::new(1.0, 0.5, 0.3),
            HeisPoint::new(-0.2, 0.1, -2.0),
            HeisPoint::new(0.0, 0.0, -0.5),
            HeisPoint::new(1e-4, 0.0, 1e-9),
            HeisPoint::new(0.3, 0.4, 100.0),
        ] {
            let g = cc_geodesic(&p);
            assert!(close(&g.point(g.length), &p, 1e-9 * (1.0 + p.gauge())), "{p:?} {:?}", g.point(g.length));
        }
    }

    #[test]
    fn sphere_points_are_antipodal() {
        let h = Heisenberg;
        let c = HeisPoint::new(0.4, -0.3, 1.1);
        let (a, b) = h.antipodal_pair(&c, 0.7).unwrap();
        assert!((h.dist(&c, &a) - 0.7).abs() < 1e-12 && (h.dist(&c, &b) - 0.7).abs() < 1e-12);
        assert!((h.dist(&a, &b) - 1.4).abs() < 1e-12);
    }

    #[test]
    fn horizontal_extension() {
        let y2 = extend_sphere_cc(&HeisPoint::IDENTITY, &HeisPoint::new(0.99, 0.0, 0.0), 1.0).unwrap();
        assert!(close(&y2, &HeisPoint::new(1.0, 0.0, 0.0), 1e-15));
        assert!((Modulus::Heisenberg.delta(0.1) - 0.0015873).abs() < 1e-6);
    }

    #[test]
    fn complex_hyperbolic_constant() {
        assert!((t0_complex_hyperbolic() - 4.9157).abs() < 1e-3);
    }
}

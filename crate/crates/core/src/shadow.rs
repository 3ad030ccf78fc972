//! Shadows of horoballs seen from the point at infinity, and the
//! quadratic separation criterion on the boundary.

use alloc::vec::Vec;

use crate::error::{invalid, Result};
use crate::halfspace::{hyperbolic_dist, Horoball, Point};
use crate::math;
use crate::numeric::NumericContext;

/// Pinching bounds: sectional curvature in `[-b^2, -a^2]` with `a <= 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvatureBand {
    pub a: f64,
    /// Constant in the outer shadow bound `c_max e^{-d}`.
    pub c_max: f64,
}

impl CurvatureBand {
    /// A Riemannian band with upper curvature bound `-a^2`.
    pub fn riemannian(a: f64) -> Result<Self> {
        if !(a > 0.0 && a <= 1.0) {
            return Err(invalid("curvature parameter a must lie in (0, 1]"));
        }
        Ok(CurvatureBand { a, c_max: math::powf(2.0, -1.0 / a) })
    }

    /// Constant curvature -1.
    pub fn constant() -> Self {
        CurvatureBand { a: 1.0, c_max: 0.5 }
    }

    /// Generic CAT(-1) space.
    pub fn cat_minus_one() -> Self {
        CurvatureBand { a: 1.0, c_max: core::f64::consts::E * core::f64::consts::E }
    }
}

/// Inner and outer radii of the shadow of a horoball on the boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct Shadow {
    pub center: Vec<f64>,
    pub inner_radius: f64,
    pub outer_radius: f64,
}

/// Shadow of `h` seen from infinity. Requires `h` disjoint from the
/// horoball above height 1.
pub fn shadow_of(h: &Horoball, band: &CurvatureBand, ctx: &NumericContext) -> Result<Shadow> {
    match h {
        Horoball::AtInfinity { .. } => Err(invalid("horoball at infinity has no shadow")),
        Horoball::Tangent { base, radius } => {
            if 2.0 * radius > 1.0 + ctx.tolerance {
                return Err(invalid("horoball meets the horoball above height 1"));
            }
            let e = 2.0 * radius;
            Ok(Shadow {
                center: base.clone(),
                inner_radius: 0.5 * e,
                outer_radius: math::powf(2.0, -1.0 / band.a) * e,
            })
        }
    }
}

/// Hamenstädt distance between two boundary points; with infinity as the
/// base point it is the Euclidean distance.
pub fn hamenstadt_dist(x: &[f64], y: &[f64]) -> f64 {
    math::dist(x, y)
}

/// Hamenstädt-type distance between two points at or below height 1.
pub fn hamenstadt_dist_points(x: &Point, y: &Point) -> f64 {
    let dx = -math::ln(x.height);
    let dy = -math::ln(y.height);
    math::exp(-0.5 * (dx + dy - hyperbolic_dist(x, y)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Separation {
    /// `|x - x'|^2`
    pub lhs: f64,
    /// `4 r r'`
    pub rhs: f64,
    /// Open horoballs are disjoint.
    pub holds: bool,
    pub tangent: bool,
}

pub fn quadratic_separation(a: &Horoball, b: &Horoball, ctx: &NumericContext) -> Result<Separation> {
    let (lhs, rhs) = match (a, b) {
        (Horoball::Tangent { base: x, radius: r }, Horoball::Tangent { base: y, radius: s }) => {
            (math::dist_sq(x, y), 4.0 * r * s)
        }
        _ => return Err(invalid("separation needs two tangent horoballs")),
    };
    let slack = ctx.tolerance * rhs;
    Ok(Separation { lhs, rhs, holds: lhs >= rhs - slack, tangent: (lhs - rhs).abs() <= slack })
}

/// The two components `[b - r, b - s r]` and `[b + s r, b + r]` of the
/// shadow annulus on the real line.
pub fn annulus_components_2d(h: &Horoball, s: f64) -> Result<[(f64, f64); 2]> {
    let (b, r) = match h {
        Horoball::Tangent { base, radius } if base.len() == 1 => (base[0], *radius),
        _ => return Err(invalid("annulus components need a tangent horoball over the line")),
    };
    if !(s > 0.0 && s < 1.0) {
        return Err(invalid("shrink factor must lie in (0, 1)"));
    }
    Ok([(b - r, b - s * r), (b + s * r, b + r)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn shadow_radii() {
        let h = Horoball::tangent(vec![0.0], 0.5).unwrap();
        let ctx = NumericContext::default();
        let sh = shadow_of(&h, &CurvatureBand::constant(), &ctx).unwrap();
        assert_eq!((sh.inner_radius, sh.outer_radius), (0.5, 0.5));
        let sh = shadow_of(&h, &CurvatureBand::riemannian(0.5).unwrap(), &ctx).unwrap();
        assert!((sh.outer_radius - 0.25).abs() < 1e-15);
        assert!(shadow_of(&Horoball::tangent(vec![0.0], 0.6).unwrap(), &CurvatureBand::constant(), &ctx).is_err());
    }

    #[test]
    fn golden_ratio_at_unit_height() {
        let x = Point::new(vec![0.0], 1.0).unwrap();
        let y = Point::new(vec![1.0], 1.0).unwrap();
        let g = (1.0 + math::sqrt(5.0)) / 2.0;
        assert!((hamenstadt_dist_points(&x, &y) - g).abs() < 1e-12);
    }

    #[test]
    fn low_points_approach_boundary_distance() {
        let x = Point::new(vec![0.0], 1e-6).unwrap();
        let y = Point::new(vec![1.0], 1e-6).unwrap();
        assert!((hamenstadt_dist_points(&x, &y) - 1.0).abs() < 1e-6);
    }

    #[test]
    fn separation_of_tangent_pair() {
        let a = Horoball::tangent(vec![0.0], 0.5).unwrap();
        let b = Horoball::tangent(vec![0.5], 0.125).unwrap();
        let sep = quadratic_separation(&a, &b, &NumericContext::default()).unwrap();
        assert_eq!((sep.lhs, sep.rhs), (0.25, 0.25));
        assert!(sep.holds && sep.tangent);
    }

    #[test]
    fn annulus_components() {
        let h = Horoball::tangent(vec![0.0], 1.0).unwrap();
        let [l, r] = annulus_components_2d(&h, 0.5).unwrap();
        assert_eq!((l, r), ((-1.0, -0.5), (0.5, 1.0)));
        assert!(annulus_components_2d(&h, 1.0).is_err());
        let [l, _] = annulus_components_2d(&h, 1.0 - 1e-12).unwrap();
        assert!(l.1 - l.0 < 2e-12);
    }
}

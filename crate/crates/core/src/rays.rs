//! Geodesic rays and lines avoiding shrunk horoballs, built from the sharp
//! boundary solvers and certified by closed-form penetration depths.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::halfspace::{
    entry_exit, geodesic_through, penetration_depth, point_to_horoball_dist, shrink, Geodesic, Horoball, Ideal,
    Inversion, Point,
};
use crate::math;
use crate::numeric::NumericContext;
use crate::packing::HoroballFamily;
use crate::sharp_ball::solve_hnr;
use crate::sharp_interval::{sharp_ratio, solve_2d, Side};

/// Neighborhood constants relating the boundary solvers to rays and lines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GlueConstants {
    /// `ln(2 + sqrt 5)`
    pub cone: f64,
    /// `ln(1 + sqrt 2)`
    pub triangle: f64,
}

pub fn glue_constants() -> GlueConstants {
    GlueConstants {
        cone: math::ln(2.0 + math::sqrt(5.0)),
        triangle: math::ln(1.0 + core::f64::consts::SQRT_2),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AvoidanceReport {
    pub geodesic: Geodesic,
    /// Depth of the geodesic into every shrunk member.
    pub max_depths: Vec<(usize, f64)>,
    pub ok: bool,
    /// Minus the largest depth.
    pub margin: f64,
}

impl AvoidanceReport {
    /// Index and depth of the deepest member, if any.
    pub fn deepest(&self) -> Option<(usize, f64)> {
        self.max_depths.iter().copied().max_by(|a, b| a.1.total_cmp(&b.1))
    }
}

/// Depth of `g` (within its range) into every `shrink(H_n, t)`.
pub fn verify_avoidance(g: &Geodesic, fam: &HoroballFamily, t: f64, ctx: &NumericContext) -> Result<AvoidanceReport> {
    let mut max_depths = Vec::with_capacity(fam.len());
    let mut worst = f64::NEG_INFINITY;
    for (i, h) in fam.members.iter().enumerate() {
        let d = penetration_depth(g, &shrink(h, t)?);
        worst = worst.max(d);
        max_depths.push((i, d));
    }
    Ok(AvoidanceReport { geodesic: g.clone(), max_depths, ok: worst <= ctx.tolerance, margin: -worst })
}

/// A ray with its certificate at `t`, plus its depth into the nearest
/// unshrunk member.
#[derive(Debug, Clone, PartialEq)]
pub struct RayResult {
    pub ray: Geodesic,
    pub report: AvoidanceReport,
    pub nearest: usize,
    /// Depth of the ray into the nearest member itself.
    pub nearest_depth: f64,
}

fn boundary_solve(fam: &HoroballFamily, s: f64, start: Option<usize>, choice: usize, ctx: &NumericContext) -> Result<Vec<f64>> {
    if fam.dim == 2 {
        let side = if choice == 0 { Side::Right } else { Side::Left };
        Ok(alloc::vec![solve_2d(fam, s, start, side, ctx)?.endpoint])
    } else {
        let mut dir = alloc::vec![0.0; fam.dim - 1];
        dir[0] = if choice == 0 { 1.0 } else { -1.0 };
        Ok(solve_hnr(fam, s, start, &dir, ctx)?.endpoint)
    }
}

fn clamp_shrink(t: f64) -> f64 {
    math::exp(-t).min(sharp_ratio())
}

/// A geodesic ray from `x` avoiding every `shrink(H_n, t)`.
pub fn ray_from_point(fam: &HoroballFamily, x: &Point, t: f64, ctx: &NumericContext) -> Result<RayResult> {
    if fam.is_empty() {
        return Err(Error::Empty("family is empty".into()));
    }
    if x.base.len() != fam.dim - 1 {
        return Err(Error::DimensionMismatch { expected: fam.dim - 1, found: x.base.len() });
    }
    let mut nearest = 0;
    let mut best = f64::INFINITY;
    for (i, h) in fam.members.iter().enumerate() {
        let d = point_to_horoball_dist(x, h);
        if d < -ctx.tolerance {
            return Err(Error::PointInsideHoroball { index: i });
        }
        if d < best {
            best = d;
            nearest = i;
        }
    }
    let h0 = &fam.members[nearest];
    let xi0 = h0.center();
    let line = geodesic_through(x, &xi0)?;
    let tx = line.param_of(x);

    let mut first: Option<(usize, f64)> = None;
    for (i, h) in fam.members.iter().enumerate() {
        if i == nearest {
            continue;
        }
        if let Some((a, b)) = entry_exit(&line, h) {
            if b > tx && b > a {
                let e = a.max(tx);
                if first.map_or(true, |f| e < f.1) {
                    first = Some((i, e));
                }
            }
        }
    }

    let finish = |ray: Geodesic| -> Result<RayResult> {
        let report = verify_avoidance(&ray, fam, t, ctx)?;
        let nearest_depth = penetration_depth(&ray, h0);
        Ok(RayResult { ray, report, nearest, nearest_depth })
    };

    let h1 = match first {
        None => {
            let ray = line.with_range(crate::halfspace::ParamRange::from(tx));
            return finish(ray);
        }
        Some((i, _)) => i,
    };

    let inv = match &xi0 {
        Ideal::Finite(c) => Some(Inversion::new(c.clone())),
        Ideal::Infinity => None,
    };
    let normalized: Vec<Horoball> = fam
        .members
        .iter()
        .map(|h| match &inv {
            Some(m) => m.horoball(h),
            None => h.clone(),
        })
        .collect();
    let nfam = HoroballFamily::new(fam.dim, normalized)?;
    let s = clamp_shrink(t - glue_constants().cone);

    let mut last_err = None;
    let mut fallback = None;
    for start in [Some(h1), None] {
        for choice in 0..2 {
            let eta = match boundary_solve(&nfam, s, start, choice, ctx) {
                Ok(e) => e,
                Err(e) => {
                    last_err = Some(e);
                    continue;
                }
            };
            let target = match &inv {
                Some(m) => m.ideal(&Ideal::Finite(eta)),
                None => Ideal::Finite(eta),
            };
            let res = finish(Geodesic::ray(x, &target)?)?;
            if res.report.ok && res.nearest_depth <= ctx.tolerance {
                return Ok(res);
            }
            fallback.get_or_insert(res);
        }
    }
    match (fallback, last_err) {
        (Some(res), _) => Ok(res),
        (None, Some(e)) => Err(e),
        (None, None) => Err(Error::Invariant("no ray candidate was produced".into())),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LineResult {
    pub line: Geodesic,
    pub report: AvoidanceReport,
    pub start: usize,
}

/// A bi-infinite geodesic avoiding every `shrink(H_n, t)`, joining two
/// boundary points found on opposite sides of the largest member.
pub fn biinfinite_line(fam: &HoroballFamily, t: f64, ctx: &NumericContext) -> Result<LineResult> {
    let s = clamp_shrink(t - glue_constants().triangle);
    let a = boundary_solve(fam, s, None, 0, ctx)?;
    let b = boundary_solve(fam, s, None, 1, ctx)?;
    if math::dist(&a, &b) == 0.0 {
        return Err(Error::Invariant("line endpoints coincide".into()));
    }
    let start = fam
        .tangent_indices()
        .fold(None, |acc: Option<(usize, f64)>, i| {
            let r = match &fam.members[i] {
                Horoball::Tangent { radius, .. } => *radius,
                _ => 0.0,
            };
            match acc {
                Some((_, best)) if best >= r => acc,
                _ => Some((i, r)),
            }
        })
        .map(|c| c.0)
        .unwrap_or(0);
    let line = Geodesic::arc(b, a)?;
    let report = verify_avoidance(&line, fam, t, ctx)?;
    Ok(LineResult { line, report, start })
}

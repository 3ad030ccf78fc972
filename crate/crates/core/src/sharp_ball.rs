//! Sharp solver on the boundary `R^{n-1}` of real hyperbolic space, using
//! maximal balls of shadow annuli and a planar rotation that reduces each
//! step to the line case.

use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};
use crate::halfspace::Horoball;
use crate::math;
use crate::numeric::NumericContext;
use crate::packing::HoroballFamily;
use crate::sharp_interval::{check_sharp, choose_on_line, order_members, Side};

/// Maximal ball of the annulus `B(b, r) - B(b, s r)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AnnulusBall {
    pub center: Vec<f64>,
    pub radius: f64,
    pub horoball: usize,
}

fn tangent(h: &Horoball) -> Result<(&[f64], f64)> {
    match h {
        Horoball::Tangent { base, radius } => Ok((base, *radius)),
        _ => Err(invalid("expected a tangent horoball")),
    }
}

pub fn maximal_annulus_ball(h: &Horoball, index: usize, s: f64, direction: &[f64]) -> Result<AnnulusBall> {
    let (b, r) = tangent(h)?;
    if !(s > 0.0 && s < 1.0) {
        return Err(invalid("shrink factor must lie in (0, 1)"));
    }
    if direction.len() != b.len() {
        return Err(Error::DimensionMismatch { expected: b.len(), found: direction.len() });
    }
    let n = math::norm(direction);
    if (n - 1.0).abs() > 1e-9 {
        return Err(invalid("direction must be a unit vector"));
    }
    Ok(AnnulusBall {
        center: math::axpy(b, 0.5 * r * (1.0 + s) / n, direction),
        radius: 0.5 * r * (1.0 - s),
        horoball: index,
    })
}

/// Orients a line direction so its first significant coordinate is positive.
fn canonical_axis(u: &[f64]) -> Vec<f64> {
    let flip = u.iter().find(|c| c.abs() > 1e-12).map(|c| *c < 0.0).unwrap_or(false);
    if flip {
        u.iter().map(|c| -c).collect()
    } else {
        u.to_vec()
    }
}

/// An accepted refinement with the data used to audit it.
#[derive(Debug, Clone, PartialEq)]
pub struct BallStep {
    pub ball: AnnulusBall,
    pub side: Side,
    /// Whether the new center was rotated onto the line through `b` and `y`.
    pub rotated: bool,
    /// Component of `center - y` outside the plane of the construction.
    pub plane_residual: f64,
}

/// Refines the maximal annulus ball `k` of `h` against `h2` (member
/// `index`). Returns `None` when `k` misses `B(b', s r')`.
pub fn step_hnr(
    k: &AnnulusBall,
    h: &Horoball,
    h2: &Horoball,
    index: usize,
    s: f64,
    ctx: &NumericContext,
) -> Result<Option<BallStep>> {
    check_sharp(s)?;
    let (b, _) = tangent(h)?;
    let (b2, r2) = tangent(h2)?;
    if b2.len() != b.len() {
        return Err(Error::DimensionMismatch { expected: b.len(), found: b2.len() });
    }
    let y = &k.center;
    if math::dist(y, b2) > k.radius + s * r2 {
        return Ok(None);
    }
    let yb = math::sub(y, b);
    let ty_len = math::norm(&yb);
    if ty_len == 0.0 {
        return Err(Error::Invariant("annulus ball centered at its horoball".into()));
    }
    let u: Vec<f64> = yb.iter().map(|c| c / ty_len).collect();
    let axis = canonical_axis(&u);
    let sgn = math::dot(&u, &axis);
    let w = math::sub(b2, y);
    let wn = math::norm(&w);
    let along = math::dot(&w, &u);
    let perp = math::sqrt((wn * wn - along * along).max(0.0));
    let collinear = wn == 0.0 || perp / wn < 1e-12;

    let ty = math::dot(&yb, &axis);
    let c2 = if collinear { math::dot(&math::sub(b2, b), &axis) } else { ty + wn * sgn };
    let picked = choose_on_line(ty - k.radius, ty + k.radius, c2, r2, s, ctx.tolerance)?;
    let (side, lo, hi) = match picked {
        Some(p) => p,
        None => return Ok(None),
    };
    let m = 0.5 * (lo + hi);
    let center = if collinear {
        math::axpy(b, m, &axis)
    } else {
        math::axpy(y, (m - ty) * sgn / wn, &w)
    };
    let rad = 0.5 * r2 * (1.0 - s);

    let excess = math::dist(&center, y) + rad - k.radius;
    if excess > ctx.tolerance * k.radius + 8.0 * f64::EPSILON * math::norm(y).max(1.0) {
        return Err(Error::Invariant(alloc::format!("refined ball leaves the current ball by {excess:e}")));
    }
    let off = math::sub(&center, y);
    let mut resid2 = math::norm_sq(&off);
    let a = math::dot(&off, &u);
    resid2 -= a * a;
    if !collinear {
        let e2: Vec<f64> = w.iter().zip(&u).map(|(wi, ui)| (wi - along * ui) / perp).collect();
        let c = math::dot(&off, &e2);
        resid2 -= c * c;
    }
    Ok(Some(BallStep {
        ball: AnnulusBall { center, radius: rad, horoball: index },
        side,
        rotated: !collinear,
        plane_residual: math::sqrt(resid2.max(0.0)),
    }))
}

#[derive(Debug, Clone, PartialEq)]
pub struct BallWitness {
    pub chain: Vec<AnnulusBall>,
    pub endpoint: Vec<f64>,
    /// Smallest `|endpoint - b_n| - s r_n` over the family.
    pub margin: f64,
    pub certified: bool,
}

/// Smallest `|x - b_n| - s r_n` over the tangent members.
pub fn ball_margin(fam: &HoroballFamily, s: f64, x: &[f64]) -> f64 {
    fam.members
        .iter()
        .filter_map(|h| match h {
            Horoball::Tangent { base, radius } => Some(math::dist(x, base) - s * radius),
            _ => None,
        })
        .fold(f64::INFINITY, f64::min)
}

/// Finds a boundary point whose vertical geodesic avoids every open
/// horoball of the family shrunk by the factor `s`.
pub fn solve_hnr(
    fam: &HoroballFamily,
    s: f64,
    start: Option<usize>,
    direction: &[f64],
    ctx: &NumericContext,
) -> Result<BallWitness> {
    check_sharp(s)?;
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
    let mut k = maximal_annulus_ball(&fam.members[order.start], order.start, s, direction)?;
    for &j in &order.larger {
        let (b, r) = tangent(&fam.members[j])?;
        if math::dist(&k.center, b) < k.radius + s * r {
            return Err(Error::StartBlocked { start: order.start, blocker: j });
        }
    }
    let mut chain = alloc::vec![k.clone()];
    for &j in &order.rest {
        if let Some(step) = step_hnr(&k, &fam.members[k.horoball], &fam.members[j], j, s, ctx)? {
            k = step.ball;
            chain.push(k.clone());
        }
    }
    let margin = ball_margin(fam, s, &k.center);
    Ok(BallWitness { chain, endpoint: k.center, margin, certified: margin >= -ctx.tolerance })
}

//! Horoball families and the standard packings used as test beds.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Pow};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Error, Result};
use crate::exact::{self, ExactHoroball, Rational, ZSqrt2};
use crate::halfspace::{dist_alg_horoballs, Horoball};
use crate::math;
use crate::numeric::{Mode, NumericContext};

/// A finite family of horoballs in `H^dim`, with optional labels and an
/// optional exact rational description of every member.
#[derive(Debug, Clone, PartialEq)]
pub struct HoroballFamily {
    pub dim: usize,
    pub members: Vec<Horoball>,
    pub labels: Option<Vec<String>>,
    pub exact: Option<Vec<ExactHoroball>>,
}

impl HoroballFamily {
    pub fn new(dim: usize, members: Vec<Horoball>) -> Result<Self> {
        if dim < 2 {
            return Err(invalid("family dimension must be at least 2"));
        }
        for h in &members {
            if let Horoball::Tangent { base, radius } = h {
                if base.len() != dim - 1 {
                    return Err(Error::DimensionMismatch { expected: dim - 1, found: base.len() });
                }
                if !(*radius > 0.0) {
                    return Err(invalid("horoball radius must be positive"));
                }
            }
        }
        Ok(HoroballFamily { dim, members, labels: None, exact: None })
    }

    pub fn from_exact(dim: usize, exact: Vec<ExactHoroball>) -> Result<Self> {
        let members = exact.iter().map(ExactHoroball::to_float).collect();
        let mut fam = HoroballFamily::new(dim, members)?;
        fam.exact = Some(exact);
        Ok(fam)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Indices of the members tangent to the boundary.
    pub fn tangent_indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.members.iter().enumerate().filter(|(_, h)| h.is_tangent()).map(|(i, _)| i)
    }

    /// Appends the horoball above height 1.
    pub fn push_top(&mut self) {
        self.members.push(Horoball::AtInfinity { height: 1.0 });
        if let Some(ex) = self.exact.as_mut() {
            ex.push(ExactHoroball::AtInfinity { height: Rational::one() });
        }
        if let Some(l) = self.labels.as_mut() {
            l.push(String::from("inf"));
        }
    }
}

/// Ford circles `p/q` with `1 <= q <= q_max` and `lo <= p/q <= hi`, ordered
/// by value, optionally followed by the horoball above height 1.
pub fn farey(q_max: u32, lo: i64, hi: i64, include_infinity: bool) -> Result<HoroballFamily> {
    if q_max == 0 {
        return Err(invalid("q_max must be positive"));
    }
    if lo > hi {
        return Err(Error::Empty(String::from("fraction range is empty")));
    }
    let mut fr: Vec<(i64, i64)> = Vec::new();
    for q in 1..=q_max as i64 {
        for p in lo * q..=hi * q {
            if p.gcd(&q) == 1 {
                fr.push((p, q));
            }
        }
    }
    fr.sort_by(|a, b| ((a.0 as i128) * (b.1 as i128)).cmp(&((b.0 as i128) * (a.1 as i128))));
    let exact: Vec<ExactHoroball> = fr
        .iter()
        .map(|&(p, q)| ExactHoroball::Tangent {
            base: alloc::vec![exact::ratio(p, q)],
            radius: exact::ratio(1, 2 * q * q),
        })
        .collect();
    let members = fr
        .iter()
        .map(|&(p, q)| {
            let qf = q as f64;
            Horoball::Tangent { base: alloc::vec![p as f64 / qf], radius: 0.5 / (qf * qf) }
        })
        .collect();
    let labels = fr.iter().map(|(p, q)| format!("{p}/{q}")).collect();
    let mut fam = HoroballFamily { dim: 2, members, labels: Some(labels), exact: Some(exact) };
    if include_infinity {
        fam.push_top();
    }
    Ok(fam)
}

/// Tangent chain `Tangent((8/15)(1 - 16^n), 16^n)` for `n_min <= n <= n_max`.
pub fn geometric(n_min: i32, n_max: i32) -> Result<HoroballFamily> {
    if n_min > n_max {
        return Err(Error::Empty(String::from("index range is empty")));
    }
    let sixteen = Rational::from_integer(BigInt::from(16));
    let c = exact::ratio(8, 15);
    let mut exact_members = Vec::new();
    let mut labels = Vec::new();
    for n in n_min..=n_max {
        let p: Rational = Pow::pow(&sixteen, n);
        let base = &c * (Rational::one() - &p);
        exact_members.push(ExactHoroball::Tangent { base: alloc::vec![base], radius: p });
        labels.push(format!("{n}"));
    }
    let mut fam = HoroballFamily::from_exact(2, exact_members)?;
    fam.labels = Some(labels);
    Ok(fam)
}

/// The tangency shrink factor `4 sqrt 2 - 5` of the extremal tree.
pub fn extremal_ratio() -> f64 {
    4.0 * core::f64::consts::SQRT_2 - 5.0
}

/// Binary tree of horoballs rooted at `Tangent(0, 1)`. The children of
/// `(x, r)` are `(x -+ r(1+s)/2, r(1-s)/2)`, listed generation by generation.
pub fn extremal(generations: u32, s: f64) -> Result<HoroballFamily> {
    if !(s > 0.0 && s < 1.0) {
        return Err(invalid("shrink factor must lie in (0, 1)"));
    }
    if generations > 24 {
        return Err(invalid("too many generations"));
    }
    let mut members = alloc::vec![Horoball::Tangent { base: alloc::vec![0.0], radius: 1.0 }];
    let mut labels = alloc::vec![String::new()];
    let mut start = 0;
    for _ in 0..generations {
        let end = members.len();
        for i in start..end {
            let (x, r) = match &members[i] {
                Horoball::Tangent { base, radius } => (base[0], *radius),
                Horoball::AtInfinity { .. } => unreachable!(),
            };
            let off = r * (1.0 + s) / 2.0;
            let cr = r * (1.0 - s) / 2.0;
            members.push(Horoball::Tangent { base: alloc::vec![x - off], radius: cr });
            members.push(Horoball::Tangent { base: alloc::vec![x + off], radius: cr });
            let parent = labels[i].clone();
            labels.push(format!("{parent}L"));
            labels.push(format!("{parent}R"));
        }
        start = end;
    }
    Ok(HoroballFamily { dim: 2, members, labels: Some(labels), exact: None })
}

/// The extremal family at the tangency ratio, with coordinates and radii
/// in `Z[sqrt 2]`: children sit at offset `r (2 sqrt 2 - 2)` with radius
/// `r (3 - 2 sqrt 2)`. Same ordering as [`extremal`].
pub fn extremal_exact(generations: u32) -> Result<Vec<(ZSqrt2, ZSqrt2)>> {
    let overflow = || invalid("too many generations for exact coordinates");
    let off = ZSqrt2::new(-2, 2);
    let shrink = ZSqrt2::new(3, -2);
    let mut out = alloc::vec![(ZSqrt2::new(0, 0), ZSqrt2::new(1, 0))];
    let mut start = 0;
    for _ in 0..generations {
        let end = out.len();
        for i in start..end {
            let (x, r) = out[i];
            let d = r.checked_mul(off).ok_or_else(overflow)?;
            let cr = r.checked_mul(shrink).ok_or_else(overflow)?;
            out.push((x.checked_sub(d).ok_or_else(overflow)?, cr));
            out.push((x.checked_add(d).ok_or_else(overflow)?, cr));
        }
        start = end;
    }
    Ok(out)
}

/// Index of the parent of member `i` in an extremal family.
pub fn extremal_parent(i: usize) -> Option<usize> {
    (i > 0).then(|| (i - 1) / 2)
}

/// Greedy seeded rejection sampling of `count` disjoint tangent horoballs
/// in `H^dim` with radii at most 1/2.
pub fn random_disjoint(count: usize, dim: usize, seed: u64) -> Result<HoroballFamily> {
    if dim < 2 {
        return Err(invalid("family dimension must be at least 2"));
    }
    let k = dim - 1;
    let side = math::powf(count.max(1) as f64, 1.0 / k as f64);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut members: Vec<Horoball> = Vec::with_capacity(count);
    let max_attempts = 10_000 * count.max(1);
    let mut attempts = 0;
    while members.len() < count {
        attempts += 1;
        if attempts > max_attempts {
            return Err(invalid("could not place the requested number of horoballs"));
        }
        let base: Vec<f64> = (0..k).map(|_| rng.gen_range(0.0..side)).collect();
        let radius = math::exp(rng.gen_range(math::ln(0.01)..math::ln(0.5)));
        let cand = Horoball::Tangent { base, radius };
        let ok = members.iter().all(|h| dist_alg_horoballs(h, &cand).map(|d| d > 0.0).unwrap_or(false));
        if ok {
            members.push(cand);
        }
    }
    HoroballFamily::new(dim, members)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DisjointnessReport {
    /// Pairs whose open horoballs overlap, with their algebraic distance.
    pub violations: Vec<(usize, usize, f64)>,
    /// Smallest algebraic distance among the pairs that were examined.
    pub closest: f64,
    pub ok: bool,
}

/// Checks that the open horoballs of `fam` are pairwise disjoint.
///
/// Tangent members are swept along the first boundary coordinate, so only
/// pairs that could overlap are compared. In exact mode the comparison is
/// done on the family's rational description.
pub fn validate_disjoint(fam: &HoroballFamily, ctx: &NumericContext) -> Result<DisjointnessReport> {
    let exact = match ctx.mode {
        Mode::Float => None,
        Mode::ExactRational => Some(
            fam.exact
                .as_ref()
                .ok_or_else(|| Error::NotRational(String::from("family has no exact description")))?,
        ),
    };
    let mut violations = Vec::new();
    let mut closest = f64::INFINITY;
    let mut check = |i: usize, j: usize, violations: &mut Vec<(usize, usize, f64)>| -> Result<()> {
        let d = dist_alg_horoballs(&fam.members[i], &fam.members[j]).unwrap_or(f64::NEG_INFINITY);
        closest = closest.min(d);
        let bad = match exact {
            Some(ex) => exact::separation(&ex[i], &ex[j])? == Ordering::Less,
            None => d < -ctx.tolerance,
        };
        if bad {
            violations.push((i, j, d));
        }
        Ok(())
    };

    let tops: Vec<usize> = (0..fam.len()).filter(|&i| !fam.members[i].is_tangent()).collect();
    let mut tangent: Vec<(f64, f64, usize)> = fam
        .members
        .iter()
        .enumerate()
        .filter_map(|(i, h)| match h {
            Horoball::Tangent { base, radius } => Some((base[0], *radius, i)),
            _ => None,
        })
        .collect();
    tangent.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.2.cmp(&b.2)));
    let r_max = tangent.iter().map(|t| t.1).fold(0.0, f64::max);
    for a in 0..tangent.len() {
        let (x, r, i) = tangent[a];
        let reach = 4.0 * r * r_max * (1.0 + 1e-6);
        for &(y, _, j) in &tangent[a + 1..] {
            if (y - x) * (y - x) > reach {
                break;
            }
            let (lo, hi) = if i < j { (i, j) } else { (j, i) };
            check(lo, hi, &mut violations)?;
        }
    }
    for (k, &t) in tops.iter().enumerate() {
        for &u in &tops[k + 1..] {
            violations.push((t, u, f64::NEG_INFINITY));
        }
        for &(_, _, i) in &tangent {
            let (lo, hi) = if i < t { (i, t) } else { (t, i) };
            check(lo, hi, &mut violations)?;
        }
    }
    violations.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
    Ok(DisjointnessReport { ok: violations.is_empty(), violations, closest })
}

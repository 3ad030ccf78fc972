//! SVG 1.1 drawing of a planar family: tangent horoballs as circles, the
//! horoball at infinity as a line, geodesics as sampled curves.

use std::fmt::Write;

use anyhow::{bail, Result};
use horoshade::halfspace::{Geodesic, Horoball};
use horoshade::packing::HoroballFamily;

const WIDTH: f64 = 800.0;

struct View {
    x0: f64,
    scale: f64,
    height: f64,
}

impl View {
    fn x(&self, x: f64) -> f64 {
        (x - self.x0) * self.scale
    }

    fn y(&self, y: f64) -> f64 {
        self.height - y * self.scale
    }
}

pub fn render(fam: &HoroballFamily, geodesics: &[Geodesic]) -> Result<String> {
    if fam.dim != 2 || geodesics.iter().any(|g| g.boundary_dim() != 1) {
        bail!("rendering needs a planar family");
    }
    let (mut lo, mut hi, mut top) = (f64::INFINITY, f64::NEG_INFINITY, 0.0f64);
    for h in &fam.members {
        match h {
            Horoball::Tangent { base, radius } => {
                lo = lo.min(base[0] - radius);
                hi = hi.max(base[0] + radius);
                top = top.max(2.0 * radius);
            }
            Horoball::AtInfinity { height } => top = top.max(*height),
        }
    }
    if !lo.is_finite() {
        (lo, hi) = (-1.0, 1.0);
    }
    if top == 0.0 {
        top = 0.5 * (hi - lo);
    }
    let pad = 0.05 * (hi - lo);
    let top = 1.1 * top;
    let scale = WIDTH / (hi - lo + 2.0 * pad);
    let v = View { x0: lo - pad, scale, height: top * scale };

    let mut s = String::new();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{:.3}" viewBox="0 0 {WIDTH} {:.3}">"#,
        v.height, v.height
    )?;
    writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#)?;
    writeln!(s, r#"<line x1="0" y1="{0:.3}" x2="{WIDTH}" y2="{0:.3}" stroke="black" stroke-width="1"/>"#, v.y(0.0))?;
    for h in &fam.members {
        match h {
            Horoball::Tangent { base, radius } => writeln!(
                s,
                r##"<circle cx="{:.4}" cy="{:.4}" r="{:.4}" fill="#dde6f3" stroke="#2b4c7e" stroke-width="0.5"/>"##,
                v.x(base[0]),
                v.y(*radius),
                radius * scale
            )?,
            Horoball::AtInfinity { height } => writeln!(
                s,
                r##"<line x1="0" y1="{0:.4}" x2="{WIDTH}" y2="{0:.4}" stroke="#2b4c7e" stroke-width="1"/>"##,
                v.y(*height)
            )?,
        }
    }
    for g in geodesics {
        let (a, b) = (g.range.lo.max(-40.0), g.range.hi.min(40.0));
        let mut pts = String::new();
        for k in 0..=800 {
            let p = g.point_at(a + (b - a) * k as f64 / 800.0);
            if p.height <= top {
                write!(pts, "{:.3},{:.3} ", v.x(p.base[0]), v.y(p.height))?;
            }
        }
        writeln!(s, r##"<polyline points="{}" fill="none" stroke="#b03030" stroke-width="1.5"/>"##, pts.trim_end())?;
    }
    s.push_str("</svg>\n");
    Ok(s)
}

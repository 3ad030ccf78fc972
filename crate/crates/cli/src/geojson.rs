//! JSON form of geodesics: `{"type":"vertical","foot":[..]}` or
//! `{"type":"arc","a":[..],"b":[..],"range":[lo,hi]}`.

use anyhow::Result;
use horoshade::halfspace::{Geodesic, GeodesicKind, ParamRange};
use serde::{Deserialize, Serialize};

use crate::doc::{floats, nums, Num};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum GeodesicDoc {
    Vertical {
        foot: Vec<Num>,
        #[serde(default, skip_serializing_if = "is_false")]
        upward: bool,
        #[serde(default = "full", skip_serializing_if = "is_full")]
        range: [Num; 2],
    },
    Arc {
        a: Vec<Num>,
        b: Vec<Num>,
        #[serde(default = "full")]
        range: [Num; 2],
    },
}

fn is_false(b: &bool) -> bool {
    !b
}

fn full() -> [Num; 2] {
    [Num(f64::NEG_INFINITY), Num(f64::INFINITY)]
}

fn is_full(r: &[Num; 2]) -> bool {
    *r == full()
}

impl GeodesicDoc {
    pub fn from_geodesic(g: &Geodesic) -> Self {
        let range = [Num(g.range.lo), Num(g.range.hi)];
        match &g.kind {
            GeodesicKind::Vertical { foot, upward } => GeodesicDoc::Vertical { foot: nums(foot), upward: *upward, range },
            GeodesicKind::Arc { a, b } => GeodesicDoc::Arc { a: nums(a), b: nums(b), range },
        }
    }

    pub fn to_geodesic(&self) -> Result<Geodesic> {
        let (g, r) = match self {
            GeodesicDoc::Vertical { foot, upward, range } => {
                let g = Geodesic::vertical(floats(foot));
                (if *upward { g.reversed() } else { g }, range)
            }
            GeodesicDoc::Arc { a, b, range } => (Geodesic::arc(floats(a), floats(b))?, range),
        };
        Ok(g.with_range(ParamRange::new(r[0].0, r[1].0)?))
    }

    /// Inline JSON, or the path of a file holding it.
    pub fn load(arg: &str) -> Result<Self> {
        let text = if arg.trim_start().starts_with('{') { arg.to_string() } else { std::fs::read_to_string(arg)? };
        Ok(serde_json::from_str(&text)?)
    }
}

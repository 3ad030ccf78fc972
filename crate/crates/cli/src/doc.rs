//! The JSON family document exchanged between subcommands.
//!
//! Floats are written as their shortest round-trip decimal strings, so
//! `parse(emit(doc)) == doc` holds bit for bit. Tangent and at-infinity
//! entries may also carry an exact `"p/q"` form.

use std::fmt;

use anyhow::{anyhow, bail, Result};
use horoshade::exact::{format_rational, parse_rational, ExactHoroball};
use horoshade::halfspace::Horoball;
use horoshade::packing::HoroballFamily;
use horoshade::shadow::{shadow_of, CurvatureBand};
use horoshade::tree::{TreeHoroball, TreeHoroballs, TruncatedTree};
use horoshade::uncover::{Ball, BallFamily, Euclidean};
use horoshade::{Error, NumericContext};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A float serialized as a decimal string. Equality is bitwise.
#[derive(Debug, Clone, Copy)]
pub struct Num(pub f64);

impl PartialEq for Num {
    fn eq(&self, other: &Self) -> bool {
        self.0.to_bits() == other.0.to_bits()
    }
}

impl fmt::Display for Num {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // Debug is the shortest representation that parses back exactly
        write!(f, "{:?}", self.0)
    }
}

impl Serialize for Num {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Num {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Text(String),
            Float(f64),
        }
        match Raw::deserialize(d)? {
            Raw::Float(x) => Ok(Num(x)),
            Raw::Text(s) => s
                .trim()
                .parse::<f64>()
                .map(Num)
                .map_err(|_| serde::de::Error::custom(format!("not a decimal number: {s:?}"))),
        }
    }
}

pub fn nums(v: &[f64]) -> Vec<Num> {
    v.iter().copied().map(Num).collect()
}

pub fn floats(v: &[Num]) -> Vec<f64> {
    v.iter().map(|n| n.0).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Model {
    UpperHalfSpace,
    EuclideanBalls,
    Tree,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactTangent {
    pub base: Vec<String>,
    pub radius: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeBall {
    pub end: usize,
    pub level: Num,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Entry {
    Tangent {
        base: Vec<Num>,
        radius: Num,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        exact: Option<ExactTangent>,
    },
    AtInfinity {
        height: Num,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        exact: Option<String>,
    },
    Ball {
        center: Vec<Num>,
        radius: Num,
    },
    Tree {
        vertices: usize,
        root: usize,
        edges: Vec<(usize, usize, Num)>,
        horoballs: Vec<TreeBall>,
    },
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<serde_json::Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Constant `D` of `r r' <= D d^2` for ball families.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub packing_constant: Option<Num>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyDocument {
    pub model: Model,
    pub dim: usize,
    pub entries: Vec<Entry>,
    #[serde(default)]
    pub metadata: Metadata,
}

fn exact_entry(h: &ExactHoroball) -> Entry {
    match h {
        ExactHoroball::Tangent { base, radius } => {
            let f = h.to_float();
            let Horoball::Tangent { base: fb, radius: fr } = f else { unreachable!() };
            Entry::Tangent {
                base: nums(&fb),
                radius: Num(fr),
                exact: Some(ExactTangent { base: base.iter().map(format_rational).collect(), radius: format_rational(radius) }),
            }
        }
        ExactHoroball::AtInfinity { height } => {
            let Horoball::AtInfinity { height: fh } = h.to_float() else { unreachable!() };
            Entry::AtInfinity { height: Num(fh), exact: Some(format_rational(height)) }
        }
    }
}

impl FamilyDocument {
    pub fn parse(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("documents always serialize")
    }

    pub fn from_horoballs(fam: &HoroballFamily) -> Self {
        let entries = match &fam.exact {
            Some(ex) => ex.iter().map(exact_entry).collect(),
            None => fam
                .members
                .iter()
                .map(|h| match h {
                    Horoball::Tangent { base, radius } => Entry::Tangent { base: nums(base), radius: Num(*radius), exact: None },
                    Horoball::AtInfinity { height } => Entry::AtInfinity { height: Num(*height), exact: None },
                })
                .collect(),
        };
        FamilyDocument {
            model: Model::UpperHalfSpace,
            dim: fam.dim,
            entries,
            metadata: Metadata { labels: fam.labels.clone(), ..Metadata::default() },
        }
    }

    pub fn from_balls(dim: usize, balls: &[(Vec<f64>, f64)], packing_constant: f64) -> Self {
        FamilyDocument {
            model: Model::EuclideanBalls,
            dim,
            entries: balls.iter().map(|(c, r)| Entry::Ball { center: nums(c), radius: Num(*r) }).collect(),
            metadata: Metadata { packing_constant: Some(Num(packing_constant)), ..Metadata::default() },
        }
    }

    pub fn from_tree(t: &TruncatedTree, hb: &TreeHoroballs) -> Self {
        let edges = t.edges().into_iter().map(|(u, v, l)| (u, v, Num(l))).collect();
        let horoballs = hb.balls.iter().map(|b| TreeBall { end: b.end, level: Num(b.level) }).collect();
        FamilyDocument {
            model: Model::Tree,
            dim: 1,
            entries: vec![Entry::Tree { vertices: t.len(), root: t.root, edges, horoballs }],
            metadata: Metadata::default(),
        }
    }

    fn expect(&self, model: Model) -> Result<()> {
        if self.model != model {
            bail!("expected a {model:?} document, found {:?}", self.model);
        }
        Ok(())
    }

    /// The horoball family. With `exact` every entry must carry its
    /// rational form, and members are rebuilt from it.
    pub fn horoballs(&self, exact: bool) -> Result<HoroballFamily> {
        self.expect(Model::UpperHalfSpace)?;
        let mut fam = if exact {
            let mut ex = Vec::with_capacity(self.entries.len());
            for (i, e) in self.entries.iter().enumerate() {
                let missing = || anyhow!(Error::NotRational(format!("entry {i} has no exact form")));
                ex.push(match e {
                    Entry::Tangent { exact: Some(x), .. } => ExactHoroball::Tangent {
                        base: x.base.iter().map(|s| parse_rational(s)).collect::<horoshade::Result<_>>()?,
                        radius: parse_rational(&x.radius)?,
                    },
                    Entry::AtInfinity { exact: Some(h), .. } => ExactHoroball::AtInfinity { height: parse_rational(h)? },
                    Entry::Tangent { .. } | Entry::AtInfinity { .. } => return Err(missing()),
                    _ => bail!("entry {i} is not a horoball"),
                });
            }
            HoroballFamily::from_exact(self.dim, ex)?
        } else {
            let mut members = Vec::with_capacity(self.entries.len());
            for (i, e) in self.entries.iter().enumerate() {
                members.push(match e {
                    Entry::Tangent { base, radius, .. } => Horoball::tangent(floats(base), radius.0)?,
                    Entry::AtInfinity { height, .. } => Horoball::at_infinity(height.0)?,
                    _ => bail!("entry {i} is not a horoball"),
                });
            }
            HoroballFamily::new(self.dim, members)?
        };
        if let Some(l) = &self.metadata.labels {
            if l.len() != fam.len() {
                bail!("{} labels for {} entries", l.len(), fam.len());
            }
            fam.labels = Some(l.clone());
        }
        Ok(fam)
    }

    /// Euclidean balls on the boundary: the entries of a ball document, or
    /// the inner shadows of the tangent members of a horoball document.
    pub fn balls(&self, packing_constant: Option<f64>, ctx: &NumericContext) -> Result<BallFamily<Euclidean>> {
        let (dim, balls) = match self.model {
            Model::EuclideanBalls => {
                let mut out = Vec::new();
                for (i, e) in self.entries.iter().enumerate() {
                    let Entry::Ball { center, radius } = e else { bail!("entry {i} is not a ball") };
                    if center.len() != self.dim {
                        bail!("ball {i} has {} coordinates in dimension {}", center.len(), self.dim);
                    }
                    out.push(Ball { center: floats(center), radius: radius.0 });
                }
                (self.dim, out)
            }
            Model::UpperHalfSpace => {
                let fam = self.horoballs(false)?;
                let mut out = Vec::new();
                for h in fam.members.iter().filter(|h| h.is_tangent()) {
                    let sh = shadow_of(h, &CurvatureBand::constant(), ctx)?;
                    out.push(Ball { center: sh.center, radius: sh.inner_radius });
                }
                (self.dim - 1, out)
            }
            Model::Tree => bail!("tree documents have no ball family"),
        };
        let d = packing_constant.or(self.metadata.packing_constant.map(|n| n.0)).unwrap_or(0.25);
        Ok(BallFamily::new(Euclidean::new(dim), balls, d)?)
    }

    pub fn tree(&self) -> Result<(TruncatedTree, TreeHoroballs)> {
        self.expect(Model::Tree)?;
        let [Entry::Tree { vertices, root, edges, horoballs }] = self.entries.as_slice() else {
            bail!("a tree document holds exactly one tree entry");
        };
        let edges: Vec<(usize, usize, f64)> = edges.iter().map(|&(u, v, l)| (u, v, l.0)).collect();
        let t = TruncatedTree::new(*vertices, &edges, *root)?;
        let balls = horoballs.iter().map(|b| TreeHoroball { end: b.end, level: b.level.0 }).collect();
        let hb = TreeHoroballs::new(&t, balls)?;
        Ok((t, hb))
    }
}

use std::io::{Read, Write};
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use horoshade::exact::{from_f64, parse_rational, to_f64, ExactHoroball};
use horoshade::halfspace::{penetration_depth, shrink_by_factor, Geodesic, Horoball, Point};
use horoshade::heisenberg::t0_complex_hyperbolic;
use horoshade::packing::{extremal, extremal_ratio, farey, geometric, random_disjoint, validate_disjoint, HoroballFamily};
use horoshade::rays::{biinfinite_line, ray_from_point, verify_avoidance, AvoidanceReport};
use horoshade::shadow::{shadow_of, CurvatureBand};
use horoshade::sharp_ball::solve_hnr;
use horoshade::sharp_interval::{dioph_solutions, sharp_ratio, solve_2d, t1, Side};
use horoshade::tree::{covering_horoballs, greedy_ray, random_instance, regular_tree};
use horoshade::uncover::{check_avoidance, s0, t0, uncover, uncover_two, Modulus, NestedWitness, StepCase};
use horoshade::{Error, Mode, NumericContext};
use serde_json::{json, Value};

use crate::args::{Cli, Command, PackKind, SideArg, SolveMode, UncloudArgs, VerifyKind};
use crate::doc::{nums, FamilyDocument, Model, Num};
use crate::geojson::GeodesicDoc;
use crate::svg;

struct Io<'a> {
    input: &'a mut dyn Read,
    out: &'a mut dyn Write,
}

impl Io<'_> {
    fn family(&mut self, path: Option<&Path>) -> Result<FamilyDocument> {
        let text = match path {
            Some(p) if p != Path::new("-") => {
                std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?
            }
            _ => {
                let mut s = String::new();
                self.input.read_to_string(&mut s).context("reading the family from stdin")?;
                s
            }
        };
        FamilyDocument::parse(&text).context("parsing the family document")
    }

    fn emit(&mut self, v: &Value) -> Result<()> {
        writeln!(self.out, "{}", serde_json::to_string_pretty(v)?)?;
        Ok(())
    }
}

/// Runs one command. Returns whether every certificate it reports passed.
pub fn run(cli: &Cli, input: &mut dyn Read, out: &mut dyn Write) -> Result<bool> {
    let g = &cli.global;
    let ctx = NumericContext {
        tolerance: g.tolerance,
        mode: if g.exact { Mode::ExactRational } else { Mode::Float },
    };
    let mut io = Io { input, out };
    match &cli.command {
        Command::Pack { kind, out } => pack(&mut io, kind, out.as_deref(), g.seed, g.exact),
        Command::Shadow { family, curvature, balls } => {
            let doc = io.family(family.as_deref())?;
            shadow(&mut io, &doc, *curvature, *balls, g.exact, &ctx)
        }
        Command::Uncloud(args) => {
            let doc = io.family(args.family.as_deref())?;
            uncloud(&mut io, &doc, args, g.exact, &ctx)
        }
        Command::Ray { family, point, t } => {
            let doc = io.family(family.as_deref())?;
            ray(&mut io, &doc, point, *t, g.exact, &ctx)
        }
        Command::Line { family, t } => {
            let doc = io.family(family.as_deref())?;
            let fam = doc.horoballs(g.exact)?;
            let l = biinfinite_line(&fam, *t, &ctx)?;
            let rep = verify_avoidance(&l.line, &fam, *t, &ctx)?;
            let v = json!({
                "geodesic": GeodesicDoc::from_geodesic(&l.line),
                "start": l.start,
                "t": Num(*t),
                "avoidance": report_json(&rep, &fam),
                "certified": rep.ok,
            });
            io.emit(&v)?;
            Ok(rep.ok)
        }
        Command::Verify { what } => verify(&mut io, what, g.json, g.exact, &ctx),
        Command::Dioph { xi, t, qmax } => {
            let x = parse_xi(xi, g.exact)?;
            let sols = dioph_solutions(x, *t, *qmax)?;
            let v = json!({
                "xi": Num(x),
                "t": Num(*t),
                "qmax": qmax,
                "solutions": sols.iter().map(|(p, q)| json!({"p": p, "q": q})).collect::<Vec<_>>(),
            });
            io.emit(&v)?;
            Ok(true)
        }
        Command::Render { family, geodesic, svg: path } => {
            let doc = io.family(family.as_deref())?;
            let fam = doc.horoballs(g.exact)?;
            let gs = geodesic.iter().map(|s| GeodesicDoc::load(s)?.to_geodesic()).collect::<Result<Vec<_>>>()?;
            std::fs::write(path, svg::render(&fam, &gs)?).with_context(|| format!("writing {}", path.display()))?;
            Ok(true)
        }
    }
}

fn parse_range<T: std::str::FromStr>(s: &str) -> Result<(T, T)> {
    let (a, b) = s.split_once("..").ok_or_else(|| anyhow!("range must look like lo..hi, got {s:?}"))?;
    let p = |x: &str| x.trim().parse::<T>().map_err(|_| anyhow!("bad range bound {x:?}"));
    Ok((p(a)?, p(b)?))
}

fn pack(io: &mut Io, kind: &PackKind, out: Option<&Path>, seed: u64, exact: bool) -> Result<bool> {
    let doc = match kind {
        PackKind::Farey { qmax, range, infinity } => {
            let (lo, hi) = parse_range::<i64>(range)?;
            let mut d = FamilyDocument::from_horoballs(&farey(*qmax, lo, hi, *infinity)?);
            d.metadata.generator = Some(json!({"name": "farey", "qmax": qmax, "range": [lo, hi], "infinity": infinity}));
            d
        }
        PackKind::Geometric { range } => {
            let (lo, hi) = parse_range::<i32>(range)?;
            let mut d = FamilyDocument::from_horoballs(&geometric(lo, hi)?);
            d.metadata.generator = Some(json!({"name": "geometric", "range": [lo, hi]}));
            d
        }
        PackKind::Extremal { generations, shrink_s } => {
            if exact {
                bail!(Error::NotRational("extremal coordinates lie in Z[sqrt 2]".into()));
            }
            let s = shrink_s.unwrap_or_else(extremal_ratio);
            let mut d = FamilyDocument::from_horoballs(&extremal(*generations, s)?);
            d.metadata.generator = Some(json!({"name": "extremal", "generations": generations, "s": Num(s)}));
            d
        }
        PackKind::Random { count, dim } => {
            let mut fam = random_disjoint(*count, *dim, seed)?;
            if exact {
                // floats are dyadic rationals; record them exactly
                let ex = fam
                    .members
                    .iter()
                    .map(|h| match h {
                        Horoball::Tangent { base, radius } => Ok(ExactHoroball::Tangent {
                            base: base.iter().map(|&x| from_f64(x)).collect::<horoshade::Result<_>>()?,
                            radius: from_f64(*radius)?,
                        }),
                        Horoball::AtInfinity { height } => Ok(ExactHoroball::AtInfinity { height: from_f64(*height)? }),
                    })
                    .collect::<horoshade::Result<Vec<_>>>()?;
                fam.exact = Some(ex);
            }
            let mut d = FamilyDocument::from_horoballs(&fam);
            d.metadata.generator = Some(json!({"name": "random", "count": count, "dim": dim}));
            d.metadata.seed = Some(seed);
            d
        }
        PackKind::Tree { depth, degree, edge, random } => {
            let (t, hb) = if *random {
                random_instance(seed, *depth, 60)?
            } else {
                let t = regular_tree(*degree, *depth, *edge)?;
                let hb = covering_horoballs(&t)?;
                (t, hb)
            };
            let mut d = FamilyDocument::from_tree(&t, &hb);
            d.metadata.generator = Some(if *random {
                json!({"name": "random_tree", "depth": depth})
            } else {
                json!({"name": "covering_tree", "depth": depth, "degree": degree, "edge": Num(*edge)})
            });
            if *random {
                d.metadata.seed = Some(seed);
            }
            d
        }
    };
    let text = doc.to_json();
    match out {
        Some(p) => std::fs::write(p, text + "\n").with_context(|| format!("writing {}", p.display()))?,
        None => writeln!(io.out, "{text}")?,
    }
    Ok(true)
}

fn label(fam: &HoroballFamily, i: usize) -> Value {
    fam.labels.as_ref().map_or(Value::Null, |l| Value::String(l[i].clone()))
}

fn shadow(io: &mut Io, doc: &FamilyDocument, a: f64, balls: bool, exact: bool, ctx: &NumericContext) -> Result<bool> {
    let fam = doc.horoballs(exact)?;
    let band = CurvatureBand::riemannian(a)?;
    let mut list = Vec::new();
    let mut inner = Vec::new();
    for i in fam.tangent_indices() {
        let sh = shadow_of(&fam.members[i], &band, ctx)?;
        list.push(json!({
            "member": i,
            "label": label(&fam, i),
            "center": nums(&sh.center),
            "inner_radius": Num(sh.inner_radius),
            "outer_radius": Num(sh.outer_radius),
        }));
        inner.push((sh.center, sh.inner_radius));
    }
    if balls {
        let mut d = FamilyDocument::from_balls(fam.dim - 1, &inner, 0.25);
        d.metadata.generator = Some(json!({"name": "inner_shadows"}));
        writeln!(io.out, "{}", d.to_json())?;
    } else {
        io.emit(&json!({ "curvature": Num(a), "shadows": list }))?;
    }
    Ok(true)
}

/// Deepest penetration of the vertical geodesic over `x` into the tangent
/// members scaled by `s`; the avoided set is exactly the open scaled shadow.
fn vertical_check(fam: &HoroballFamily, s: f64, x: &[f64]) -> Result<(f64, Option<usize>)> {
    let g = Geodesic::vertical(x.to_vec());
    let mut worst = (f64::NEG_INFINITY, None);
    for i in fam.tangent_indices() {
        let d = penetration_depth(&g, &shrink_by_factor(&fam.members[i], s)?);
        if d > worst.0 {
            worst = (d, Some(i));
        }
    }
    Ok(worst)
}

fn parse_vec(s: &str) -> Result<Vec<f64>> {
    s.split(',').map(|c| c.trim().parse::<f64>().map_err(|_| anyhow!("bad coordinate {c:?}"))).collect()
}

fn uncloud(io: &mut Io, doc: &FamilyDocument, args: &UncloudArgs, exact: bool, ctx: &NumericContext) -> Result<bool> {
    let s = match (args.shrink_s, args.shrink_t) {
        (Some(s), None) => s,
        (None, Some(t)) => (-t).exp(),
        _ => bail!("give exactly one of --shrink-s and --shrink-t"),
    };
    let mut witnesses = Vec::new();
    let mut all = true;
    match args.mode {
        SolveMode::Dim2 | SolveMode::Hnr => {
            let fam = doc.horoballs(exact)?;
            let mut endpoints = Vec::new();
            if args.mode == SolveMode::Dim2 {
                let sides = match (args.two, args.side) {
                    (true, _) => vec![Side::Right, Side::Left],
                    (false, SideArg::Right) => vec![Side::Right],
                    (false, SideArg::Left) => vec![Side::Left],
                };
                for side in sides {
                    let w = solve_2d(&fam, s, args.start, side, ctx)?;
                    let chain: Vec<Value> = w
                        .chain
                        .iter()
                        .map(|c| json!({"member": c.horoball, "label": label(&fam, c.horoball), "lo": Num(c.lo), "hi": Num(c.hi)}))
                        .collect();
                    endpoints.push((vec![w.endpoint], w.margin, chain, json!(if side == Side::Right { "R" } else { "L" })));
                }
            } else {
                let k = fam.dim - 1;
                let mut dir = match &args.direction {
                    Some(d) => parse_vec(d)?,
                    None => {
                        let mut e = vec![0.0; k];
                        e[0] = 1.0;
                        e
                    }
                };
                let n = dir.iter().map(|c| c * c).sum::<f64>().sqrt();
                if !(n > 0.0) {
                    bail!("direction must be nonzero");
                }
                dir.iter_mut().for_each(|c| *c /= n);
                let dirs = if args.two { vec![dir.clone(), dir.iter().map(|c| -c).collect()] } else { vec![dir] };
                for d in dirs {
                    let w = solve_hnr(&fam, s, args.start, &d, ctx)?;
                    let chain: Vec<Value> = w
                        .chain
                        .iter()
                        .map(|c| json!({"member": c.horoball, "label": label(&fam, c.horoball), "center": nums(&c.center), "radius": Num(c.radius)}))
                        .collect();
                    endpoints.push((w.endpoint, w.margin, chain, json!(nums(&d))));
                }
            }
            for (x, margin, chain, how) in endpoints {
                let (depth, deepest) = vertical_check(&fam, s, &x)?;
                let ok = depth <= ctx.tolerance;
                all &= ok;
                witnesses.push(json!({
                    "endpoint": nums(&x),
                    "seed": how,
                    "solver_margin": Num(margin),
                    "verified_depth": Num(depth),
                    "deepest": deepest,
                    "chain": chain,
                    "certified": ok,
                }));
            }
        }
        SolveMode::Generic => {
            let bf = doc.balls(args.packing_constant, ctx)?;
            let runs: Vec<NestedWitness<Vec<f64>>> = if args.two {
                let (a, b) = uncover_two(&bf, s, args.start)?;
                vec![a, b]
            } else {
                vec![uncover(&bf, s, args.start)?]
            };
            for w in runs {
                let chk = check_avoidance(&bf, s, &w.output, ctx.tolerance);
                all &= chk.ok;
                let chain: Vec<Value> = w
                    .chain
                    .iter()
                    .map(|l| {
                        json!({
                            "member": l.index,
                            "case": case_name(l.case),
                            "center": nums(&l.ball.center),
                            "radius": Num(l.ball.radius),
                        })
                    })
                    .collect();
                witnesses.push(json!({
                    "point": nums(&w.output),
                    "verified_margin": Num(chk.margin),
                    "nearest": chk.worst,
                    "chain": chain,
                    "certified": chk.ok,
                }));
            }
        }
    }
    let mode = match args.mode {
        SolveMode::Generic => "generic",
        SolveMode::Dim2 => "dim2",
        SolveMode::Hnr => "hnr",
    };
    io.emit(&json!({ "mode": mode, "s": Num(s), "witnesses": witnesses, "certified": all }))?;
    Ok(all)
}

fn case_name(c: StepCase) -> &'static str {
    match c {
        StepCase::Start => "start",
        StepCase::Far => "far",
        StepCase::Sphere => "sphere",
        StepCase::Inner => "inner",
        StepCase::Line => "line",
    }
}

fn report_json(rep: &AvoidanceReport, fam: &HoroballFamily) -> Value {
    let deepest = rep.deepest();
    json!({
        "ok": rep.ok,
        "margin": Num(rep.margin),
        "deepest": deepest.map(|(i, d)| json!({"member": i, "label": label(fam, i), "depth": Num(d)})),
        "checked": rep.max_depths.len(),
    })
}

fn ray(io: &mut Io, doc: &FamilyDocument, point: &str, t: f64, exact: bool, ctx: &NumericContext) -> Result<bool> {
    if doc.model == Model::Tree {
        let (tree, hb) = doc.tree()?;
        let v: usize = point.trim().parse().map_err(|_| anyhow!("tree rays start at a vertex index"))?;
        let r = greedy_ray(&tree, &hb, v)?;
        // recompute depths along both paths
        let depth = hb.max_depth(&tree, &r.first).max(hb.max_depth(&tree, &r.second));
        let ok = depth <= t + ctx.tolerance;
        io.emit(&json!({
            "first": r.first,
            "second": r.second,
            "branch": r.branch,
            "max_depth": Num(depth),
            "t": Num(t),
            "certified": ok,
        }))?;
        return Ok(ok);
    }
    let fam = doc.horoballs(exact)?;
    let (b, h) = point.split_once(';').ok_or_else(|| anyhow!("point must look like \"b;h\""))?;
    let h: f64 = h.trim().parse().map_err(|_| anyhow!("bad height {h:?}"))?;
    let x = Point::new(parse_vec(b)?, h)?;
    let r = ray_from_point(&fam, &x, t, ctx)?;
    let rep = verify_avoidance(&r.ray, &fam, t, ctx)?;
    io.emit(&json!({
        "geodesic": GeodesicDoc::from_geodesic(&r.ray),
        "nearest": r.nearest,
        "nearest_depth": Num(r.nearest_depth),
        "t": Num(t),
        "avoidance": report_json(&rep, &fam),
        "certified": rep.ok,
    }))?;
    Ok(rep.ok)
}

struct Check {
    name: String,
    pass: bool,
    detail: String,
}

fn verify(io: &mut Io, what: &VerifyKind, as_json: bool, exact: bool, ctx: &NumericContext) -> Result<bool> {
    let mut checks = Vec::new();
    let mut close = |name: &str, got: f64, want: f64, tol: f64| {
        checks.push(Check {
            name: name.into(),
            pass: (got - want).abs() <= tol,
            detail: format!("{got:.12} (expected {want:.12}, tolerance {tol:e})"),
        })
    };
    match what {
        VerifyKind::Constants => {
            close("t1(1) = -log(4 sqrt 2 - 5)", t1(1.0)?, -sharp_ratio().ln(), 1e-12);
            close("s0(1/4) with lines = sqrt 5 - 2", s0(0.25, Modulus::Identity, true)?, 5f64.sqrt() - 2.0, 1e-12);
            close("t0 complex hyperbolic plane", t0_complex_hyperbolic(), 4.9157, 1e-3);
            close("t0 real hyperbolic space", t0(1.0, Modulus::Identity, true, 0.5)?, -(5f64.sqrt() - 2.0).ln(), 1e-6);
        }
        VerifyKind::Packing { family } => {
            let doc = io.family(family.as_deref())?;
            match doc.model {
                Model::UpperHalfSpace => {
                    let fam = doc.horoballs(exact)?;
                    let rep = validate_disjoint(&fam, ctx)?;
                    let detail = match rep.violations.first() {
                        Some((i, j, d)) => format!("{} overlapping pairs, first {i} and {j} at {d}", rep.violations.len()),
                        None => format!("{} members, closest algebraic distance {}", fam.len(), rep.closest),
                    };
                    let mode = if exact { "exact" } else { "float" };
                    checks.push(Check { name: format!("disjoint horoballs ({mode})"), pass: rep.ok, detail });
                }
                Model::EuclideanBalls => {
                    let bf = doc.balls(None, ctx)?;
                    let bad = bf.packing_violations(ctx.tolerance);
                    checks.push(Check {
                        name: format!("quadratic packing condition, D = {}", bf.packing_constant),
                        pass: bad.is_empty(),
                        detail: format!("{} balls, {} violating pairs", bf.balls.len(), bad.len()),
                    });
                }
                Model::Tree => {
                    let res = doc.tree();
                    checks.push(Check {
                        name: "disjoint tree horoballs".into(),
                        pass: res.is_ok(),
                        detail: match res {
                            Ok((t, hb)) => format!("{} vertices, {} horoballs", t.len(), hb.len()),
                            Err(e) => e.to_string(),
                        },
                    });
                }
            }
        }
        VerifyKind::Avoidance { family, geodesic, t } => {
            let doc = io.family(family.as_deref())?;
            let fam = doc.horoballs(exact)?;
            let g = GeodesicDoc::load(geodesic)?.to_geodesic()?;
            let rep = verify_avoidance(&g, &fam, *t, ctx)?;
            let detail = match rep.deepest() {
                Some((i, d)) => format!("deepest member {i} at depth {d}, margin {}", rep.margin),
                None => "empty family".into(),
            };
            checks.push(Check { name: format!("avoidance at t = {t}"), pass: rep.ok, detail });
        }
    }
    let all = checks.iter().all(|c| c.pass);
    if as_json {
        let list: Vec<Value> =
            checks.iter().map(|c| json!({"name": c.name, "pass": c.pass, "detail": c.detail})).collect();
        io.emit(&json!({ "checks": list, "pass": all }))?;
    } else {
        for c in &checks {
            writeln!(io.out, "{} {}: {}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail)?;
        }
        writeln!(io.out, "{} of {} checks passed", checks.iter().filter(|c| c.pass).count(), checks.len())?;
    }
    Ok(all)
}

fn parse_xi(xi: &str, exact: bool) -> Result<f64> {
    let x = xi.trim();
    if x.eq_ignore_ascii_case("golden") {
        if exact {
            bail!(Error::NotRational("the golden ratio is irrational".into()));
        }
        return Ok(0.5 * (1.0 + 5f64.sqrt()));
    }
    if exact {
        // the scan itself runs in floats
        return Ok(to_f64(&parse_rational(x)?));
    }
    match x.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Ok(to_f64(&parse_rational(x)?)),
    }
}


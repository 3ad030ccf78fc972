//! Truncated metric trees with horoballs centered at ends, and the greedy
//! walk producing two rays of bounded Busemann excess.
//!
//! An end is represented by a leaf ("stub"); the part of the tree beyond a
//! stub is never visited, and a walk that would need it fails.

use alloc::collections::VecDeque;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Error, Result};

const EPS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedTree {
    /// Neighbors with edge lengths, in increasing neighbor order.
    pub adj: Vec<Vec<(usize, f64)>>,
    pub root: usize,
    pub max_edge: f64,
}

impl TruncatedTree {
    /// Validates connectivity, acyclicity, positive lengths and degrees.
    pub fn new(n: usize, edges: &[(usize, usize, f64)], root: usize) -> Result<Self> {
        if n == 0 || root >= n {
            return Err(invalid("tree needs a root among its vertices"));
        }
        if edges.len() + 1 != n {
            return Err(invalid("a tree on n vertices has n - 1 edges"));
        }
        let mut adj = vec![Vec::new(); n];
        let mut max_edge = 0.0f64;
        for &(u, v, l) in edges {
            if u >= n || v >= n || u == v {
                return Err(invalid("edge endpoints out of range"));
            }
            if !(l > 0.0 && l.is_finite()) {
                return Err(invalid("edge lengths must be positive"));
            }
            adj[u].push((v, l));
            adj[v].push((u, l));
            max_edge = max_edge.max(l);
        }
        for a in adj.iter_mut() {
            a.sort_by_key(|e| e.0);
        }
        let t = TruncatedTree { adj, root, max_edge };
        if t.distances_from(root).iter().any(|d| d.is_infinite()) {
            return Err(invalid("tree is not connected"));
        }
        for (v, a) in t.adj.iter().enumerate() {
            if a.len() == 2 || (a.len() < 3 && v == root && n > 1) {
                return Err(invalid(format!("vertex {v} has degree {} (interior degree must be at least 3)", a.len())));
            }
        }
        Ok(t)
    }

    pub fn len(&self) -> usize {
        self.adj.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    pub fn is_stub(&self, v: usize) -> bool {
        v != self.root && self.adj[v].len() == 1
    }

    pub fn stubs(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(move |&v| self.is_stub(v))
    }

    pub fn edges(&self) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::new();
        for (u, a) in self.adj.iter().enumerate() {
            for &(v, l) in a {
                if u < v {
                    out.push((u, v, l));
                }
            }
        }
        out
    }

    pub fn edge_length(&self, u: usize, v: usize) -> Option<f64> {
        self.adj[u].iter().find(|e| e.0 == v).map(|e| e.1)
    }

    pub fn distances_from(&self, s: usize) -> Vec<f64> {
        let mut d = vec![f64::INFINITY; self.len()];
        d[s] = 0.0;
        let mut q = VecDeque::from([s]);
        while let Some(u) = q.pop_front() {
            for &(v, l) in &self.adj[u] {
                if d[v].is_infinite() {
                    d[v] = d[u] + l;
                    q.push_back(v);
                }
            }
        }
        d
    }

    fn children(&self, v: usize, parent: Option<usize>) -> impl Iterator<Item = usize> + '_ {
        self.adj[v].iter().map(|e| e.0).filter(move |&w| Some(w) != parent)
    }

    /// Stub reached from `v` by always taking the smallest forward neighbor.
    pub fn leftmost_stub(&self, mut v: usize, mut parent: usize) -> usize {
        while !self.is_stub(v) {
            let next = self.children(v, Some(parent)).next().expect("interior vertex has children");
            parent = v;
            v = next;
        }
        v
    }
}

/// `k`-regular tree truncated at combinatorial depth `depth`, vertices
/// numbered breadth first.
pub fn regular_tree(k: usize, depth: usize, edge: f64) -> Result<TruncatedTree> {
    if k < 3 || depth == 0 {
        return Err(invalid("regular tree needs degree >= 3 and depth >= 1"));
    }
    let mut edges = Vec::new();
    let mut frontier = vec![0usize];
    let mut n = 1;
    for level in 0..depth {
        let mut next = Vec::new();
        for &u in &frontier {
            let kids = if level == 0 { k } else { k - 1 };
            for _ in 0..kids {
                edges.push((u, n, edge));
                next.push(n);
                n += 1;
            }
        }
        frontier = next;
    }
    TruncatedTree::new(n, &edges, 0)
}

/// A point on the edge `from -> to` at distance `offset` from `from`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TreePoint {
    pub from: usize,
    pub to: usize,
    pub offset: f64,
}

impl TreePoint {
    pub fn vertex(v: usize) -> Self {
        TreePoint { from: v, to: v, offset: 0.0 }
    }
}

/// Busemann function of the end of `stub`, normalized to vanish at the root.
pub fn tree_busemann(t: &TruncatedTree, stub: usize, x: &TreePoint) -> Result<f64> {
    if stub >= t.len() || !t.is_stub(stub) {
        return Err(invalid(format!("vertex {stub} is not a stub")));
    }
    let d = t.distances_from(stub);
    busemann_with(t, &d, x)
}

fn busemann_with(t: &TruncatedTree, d: &[f64], x: &TreePoint) -> Result<f64> {
    let to_stub = if x.from == x.to {
        d[x.from]
    } else {
        let l = t.edge_length(x.from, x.to).ok_or_else(|| invalid("point is not on an edge"))?;
        if !(0.0..=l).contains(&x.offset) {
            return Err(invalid("offset outside the edge"));
        }
        (x.offset + d[x.from]).min(l - x.offset + d[x.to])
    };
    Ok(d[t.root] - to_stub)
}

/// `{x : busemann(end, x) >= level}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TreeHoroball {
    pub end: usize,
    pub level: f64,
}

/// Horoballs with their distance tables, after validation.
#[derive(Debug, Clone)]
pub struct TreeHoroballs {
    pub balls: Vec<TreeHoroball>,
    dists: Vec<Vec<f64>>,
}

impl TreeHoroballs {
    /// Checks that every ball contains its stub and that the open balls are
    /// pairwise disjoint.
    pub fn new(t: &TruncatedTree, balls: Vec<TreeHoroball>) -> Result<Self> {
        let mut dists = Vec::with_capacity(balls.len());
        for b in &balls {
            if b.end >= t.len() || !t.is_stub(b.end) {
                return Err(invalid(format!("vertex {} is not a stub", b.end)));
            }
            let d = t.distances_from(b.end);
            if d[t.root] - b.level < -EPS {
                return Err(invalid(format!("horoball at {} misses its own stub", b.end)));
            }
            dists.push(d);
        }
        for i in 0..balls.len() {
            if balls[i + 1..].iter().any(|b| b.end == balls[i].end) {
                return Err(invalid(format!("two horoballs share the end {}", balls[i].end)));
            }
            for j in i + 1..balls.len() {
                let sep = dists[i][balls[j].end];
                if sep < radius(&dists[i], t, &balls[i]) + radius(&dists[j], t, &balls[j]) - EPS {
                    return Err(Error::PackingViolation { a: i, b: j });
                }
            }
        }
        Ok(TreeHoroballs { balls, dists })
    }

    pub fn len(&self) -> usize {
        self.balls.len()
    }

    pub fn is_empty(&self) -> bool {
        self.balls.is_empty()
    }

    /// `busemann - level` of ball `i` at vertex `v`.
    pub fn excess(&self, t: &TruncatedTree, i: usize, v: usize) -> f64 {
        self.dists[i][t.root] - self.dists[i][v] - self.balls[i].level
    }

    /// The ball whose open interior contains `v`, if any.
    fn containing(&self, t: &TruncatedTree, v: usize) -> Option<usize> {
        (0..self.len()).find(|&i| self.excess(t, i, v) > EPS)
    }

    fn toward_end(&self, i: usize, u: usize, w: usize) -> bool {
        self.dists[i][w] < self.dists[i][u]
    }

    /// Largest excess over the vertices of `path` (the maximum on an edge is
    /// attained at an endpoint).
    pub fn max_depth(&self, t: &TruncatedTree, path: &[usize]) -> f64 {
        let mut m = f64::NEG_INFINITY;
        for &v in path {
            for i in 0..self.len() {
                m = m.max(self.excess(t, i, v));
            }
        }
        m
    }
}

fn radius(d: &[f64], t: &TruncatedTree, b: &TreeHoroball) -> f64 {
    d[t.root] - b.level
}

/// Covering configuration: through the root and through every vertex on
/// a horosphere, one horoball per forward branch, centered at that
/// branch's leftmost end and tangent at the vertex.
pub fn covering_horoballs(t: &TruncatedTree) -> Result<TreeHoroballs> {
    let droot = t.distances_from(t.root);
    let mut balls = Vec::new();
    let mut todo = vec![(t.root, None::<usize>)];
    while let Some((v, parent)) = todo.pop() {
        for c in t.children(v, parent).collect::<Vec<_>>() {
            let s = t.leftmost_stub(c, v);
            let d = t.distances_from(s);
            let rho = d[v];
            balls.push(TreeHoroball { end: s, level: droot[s] - rho });
            // vertices of the branch lying on the new horosphere
            let mut stack = vec![(c, v)];
            while let Some((w, pw)) = stack.pop() {
                if (d[w] - rho).abs() <= EPS {
                    if !t.is_stub(w) {
                        todo.push((w, Some(pw)));
                    }
                    continue;
                }
                for x in t.children(w, Some(pw)) {
                    stack.push((x, w));
                }
            }
        }
    }
    TreeHoroballs::new(t, balls)
}

/// Seeded random tree (degrees 3 or 4, lengths in `[0.1, 1]`, truncated at
/// combinatorial depth `depth`) with random disjoint horoballs whose
/// horospheres stay clear of the last edge before their stub.
pub fn random_instance(seed: u64, depth: usize, attempts: usize) -> Result<(TruncatedTree, TreeHoroballs)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    let mut frontier = vec![0usize];
    let mut n = 1;
    for level in 0..depth {
        let mut next = Vec::new();
        for &u in &frontier {
            let deg = rng.gen_range(3..=4);
            let kids = if level == 0 { deg } else { deg - 1 };
            for _ in 0..kids {
                edges.push((u, n, rng.gen_range(0.1..=1.0)));
                next.push(n);
                n += 1;
            }
        }
        frontier = next;
    }
    let t = TruncatedTree::new(n, &edges, 0)?;
    let stubs: Vec<usize> = t.stubs().collect();
    let mut balls: Vec<TreeHoroball> = Vec::new();
    let mut tables: Vec<(Vec<f64>, f64)> = Vec::new();
    for _ in 0..attempts {
        let s = stubs[rng.gen_range(0..stubs.len())];
        if balls.iter().any(|b| b.end == s) {
            continue;
        }
        let d = t.distances_from(s);
        let last = t.adj[s][0].1;
        if d[t.root] <= last {
            continue;
        }
        let rho = rng.gen_range(last..d[t.root]);
        if rho <= last || tables.iter().zip(&balls).any(|((dt, r), b)| dt[s] < r + rho + EPS || d[b.end] < r + rho) {
            continue;
        }
        balls.push(TreeHoroball { end: s, level: d[t.root] - rho });
        tables.push((d, rho));
    }
    let hb = TreeHoroballs::new(&t, balls)?;
    Ok((t, hb))
}

#[derive(Debug, Clone, PartialEq)]
pub struct GreedyRays {
    /// Vertex paths from the start to a stub whose end carries no horoball;
    /// each ray continues along that end.
    pub first: Vec<usize>,
    pub second: Vec<usize>,
    /// Position in both paths of the vertex where they split.
    pub branch: usize,
    pub max_depth: f64,
}

/// Continues a walk whose last two vertices are fixed. Inside an open
/// horoball the walk only steps away from its end; elsewhere any child is
/// admissible. Children are tried in order, backtracking out of branches
/// whose stubs all carry horoballs, so only the truncation can make it fail.
fn walk(t: &TruncatedTree, hb: &TreeHoroballs, path: Vec<usize>) -> Result<Vec<usize>> {
    let fixed = path.len();
    let mut path = path;
    // untried admissible children at each vertex after the fixed prefix
    let mut pending: Vec<Vec<usize>> = Vec::new();
    let mut stuck = None;
    loop {
        let u = *path.last().unwrap();
        let back = if path.len() >= 2 { Some(path[path.len() - 2]) } else { None };
        let options: Vec<usize> = if t.is_stub(u) && back.is_some() {
            // past a stub the walk only moves away from every other stub
            if !hb.balls.iter().any(|b| b.end == u) {
                return Ok(path);
            }
            Vec::new()
        } else {
            match hb.containing(t, u) {
                Some(i) => t.children(u, back).filter(|&w| !hb.toward_end(i, u, w)).collect(),
                None => t.children(u, back).collect(),
            }
        };
        if options.is_empty() {
            stuck.get_or_insert(u);
        }
        pending.push(options.into_iter().rev().collect());
        // next untried option, unwinding exhausted vertices
        loop {
            match pending.last_mut() {
                Some(opts) => match opts.pop() {
                    Some(w) => {
                        path.push(w);
                        break;
                    }
                    None => {
                        pending.pop();
                        if path.len() <= fixed {
                            return Err(Error::TruncationExhausted { vertex: stuck.unwrap_or(u) });
                        }
                        path.pop();
                    }
                },
                None => return Err(Error::TruncationExhausted { vertex: stuck.unwrap_or(u) }),
            }
        }
    }
}

/// Two rays from vertex `x0` that enter each horoball by at most one edge,
/// splitting at the last vertex before the first horosphere they cross.
pub fn greedy_ray(t: &TruncatedTree, hb: &TreeHoroballs, x0: usize) -> Result<GreedyRays> {
    if x0 >= t.len() {
        return Err(invalid("start vertex out of range"));
    }
    if let Some(i) = hb.containing(t, x0) {
        return Err(invalid(format!("start vertex lies inside horoball {i}")));
    }
    let first = walk(t, hb, vec![x0])?;
    // last vertex before the walk first enters an open horoball
    let mut branch = 0;
    for k in 1..first.len() {
        if hb.containing(t, first[k]).is_some() {
            break;
        }
        branch = k;
    }
    if branch + 1 >= first.len() {
        branch = 0;
    }
    let b = first[branch];
    let back = if branch > 0 { Some(first[branch - 1]) } else { None };
    let alt = t
        .children(b, back)
        .find(|&w| w != first[branch + 1])
        .ok_or(Error::TruncationExhausted { vertex: b })?;
    let mut prefix = first[..=branch].to_vec();
    prefix.push(alt);
    let second = walk(t, hb, prefix)?;
    let max_depth = hb.max_depth(t, &first).max(hb.max_depth(t, &second));
    Ok(GreedyRays { first, second, branch, max_depth })
}

/// Whether consecutive edges of `path` are distinct and present.
pub fn is_geodesic_path(t: &TruncatedTree, path: &[usize]) -> bool {
    path.windows(2).all(|w| t.edge_length(w[0], w[1]).is_some()) && path.windows(3).all(|w| w[0] != w[2])
}

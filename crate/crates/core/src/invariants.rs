//! Rays, limit lines, the eigengraph, axes, special chains and the algebraic
//! invariant `I_c` of a CT.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::ct::{CtData, EdgeClass, Term};
use crate::iterset::{equivalent, AtomRef, IteratedSet};
use crate::graphmap::{edge_index, reduce_path, reverse_path, Circuit, EdgeRef};
use crate::stallings::{fold, PairCoord, SubgroupConjClass, SubgroupGraph};
use crate::words::{conjugacy_class, CyclicWord, Word};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InvariantError {
    #[error("edge {0} is not a higher order edge")]
    NotHigherOrder(String),
    #[error("path {0} has no growing term")]
    NotGrowing(String),
    #[error("{0} is not an axis")]
    NotAnAxis(String),
    #[error("strong axes lie on different axes")]
    AxisMismatch,
    #[error("invalid total order: {0}")]
    InvalidTotalOrder(String),
    #[error("line {0} has no algebraic type")]
    Untyped(String),
    #[error("chain step {0} is not a one-edge extension")]
    BadExtension(usize),
}

fn fwd(e: usize) -> EdgeRef {
    e as EdgeRef + 1
}

/// `w` or `w̄`, based at the base of the twist loop.
pub fn twist_traversal(ct: &CtData, t: usize, sign: i8) -> Vec<EdgeRef> {
    if sign >= 0 {
        ct.twist_loop(t).to_vec()
    } else {
        reverse_path(ct.twist_loop(t))
    }
}

fn sign_of(x: i64) -> i8 {
    if x > 0 {
        1
    } else {
        -1
    }
}

// ---------------------------------------------------------------- rays

/// A ray that is determined by finite data.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Ray {
    /// `R_E = E·u·f_#(u)·…`
    Eigen(usize),
    /// `E·w^{±∞}`, sign relative to the orientation of the twist path.
    LinearTail { edge: usize, sign: i8 },
    /// Repeats a closed Nielsen path forever.
    Periodic { lp: Vec<EdgeRef> },
}

impl Ray {
    pub fn start(&self, ct: &CtData) -> usize {
        match self {
            Ray::Eigen(e) | Ray::LinearTail { edge: e, .. } => ct.graph().src(fwd(*e)),
            Ray::Periodic { lp } => ct.graph().src(lp[0]),
        }
    }

    /// First `d` edges.
    pub fn prefix(&self, ct: &CtData, d: usize) -> Vec<EdgeRef> {
        let mut out = Vec::with_capacity(d + 8);
        match self {
            Ray::Eigen(e) => {
                out.push(fwd(*e));
                let mut cur = ct.tail_split(*e).to_vec();
                while out.len() < d {
                    out.extend(ct.terms_path(&cur));
                    cur = ct.terms_image(&cur);
                }
            }
            Ray::LinearTail { edge, sign } => {
                out.push(fwd(*edge));
                let lp = twist_traversal(ct, ct.twist_of(*edge).expect("linear edge"), *sign);
                while out.len() < d {
                    out.extend_from_slice(&lp);
                }
            }
            Ray::Periodic { lp } => {
                while out.len() < d {
                    out.extend_from_slice(lp);
                }
            }
        }
        out.truncate(d);
        out
    }

    pub fn is_eigen(&self) -> bool {
        matches!(self, Ray::Eigen(_))
    }

    fn right(&self, ct: &CtData) -> String {
        match self {
            Ray::Eigen(e) => format!("R_{}", ct.name(fwd(*e))),
            Ray::LinearTail { edge, sign } => {
                let w = twist_traversal(ct, ct.twist_of(*edge).unwrap(), *sign);
                format!("{}({})∞", ct.name(fwd(*edge)), ct.format_path(&w))
            }
            Ray::Periodic { lp } => format!("({})∞", ct.format_path(lp)),
        }
    }

    fn left(&self, ct: &CtData) -> String {
        match self {
            Ray::Eigen(e) => format!("R_{}^-1", ct.name(fwd(*e))),
            Ray::LinearTail { edge, sign } => {
                let w = twist_traversal(ct, ct.twist_of(*edge).unwrap(), -*sign);
                format!("∞({}){}", ct.format_path(&w), ct.name(-fwd(*edge)))
            }
            Ray::Periodic { lp } => format!("∞({})", ct.format_path(&reverse_path(lp))),
        }
    }

    pub fn display(&self, ct: &CtData) -> String {
        self.right(ct)
    }
}

// ---------------------------------------------------------------- lines

/// An oriented line `(R⁻)⁻¹ ρ R⁺` or a bi-infinite periodic line.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Line {
    General { minus: Ray, rho: Vec<EdgeRef>, plus: Ray },
    /// Least rotation of the oriented period.
    Periodic { lp: Vec<EdgeRef> },
}

/// Moves edges at the end of `rho` into a periodic ray `plus`.
fn absorb(ct: &CtData, rho: &mut Vec<EdgeRef>, plus: &mut Ray) {
    'outer: while let Some(&last) = rho.last() {
        let Ray::Periodic { lp } = plus else { return };
        if lp.last() == Some(&last) {
            rho.pop();
            lp.rotate_right(1);
            continue;
        }
        if last > 0 {
            let e = edge_index(last);
            if let Some(t) = ct.twist_of(e) {
                for sign in [1, -1] {
                    if *lp == twist_traversal(ct, t, sign) {
                        rho.pop();
                        *plus = Ray::LinearTail { edge: e, sign };
                        continue 'outer;
                    }
                }
            }
        }
        return;
    }
}

impl Line {
    pub fn general(ct: &CtData, minus: Ray, rho: Vec<EdgeRef>, plus: Ray) -> Line {
        Line::General { minus, rho, plus }.canonical(ct)
    }

    pub fn periodic(lp: &[EdgeRef]) -> Line {
        Line::Periodic { lp: Circuit::from_closed(lp).edges().to_vec() }
    }

    /// Pushes maximal periodic pieces of `ρ` into the adjacent rays.
    pub fn canonical(self, ct: &CtData) -> Line {
        match self {
            Line::Periodic { lp } => Line::periodic(&lp),
            Line::General { mut minus, rho, mut plus } => {
                let mut rho = reduce_path(&rho);
                absorb(ct, &mut rho, &mut plus);
                let mut back = reverse_path(&rho);
                absorb(ct, &mut back, &mut minus);
                let rho = reverse_path(&back);
                if rho.is_empty() {
                    if let (Ray::Periodic { lp: a }, Ray::Periodic { lp: b }) = (&minus, &plus) {
                        if reverse_path(a) == *b {
                            return Line::periodic(b);
                        }
                    }
                }
                Line::General { minus, rho, plus }
            }
        }
    }

    pub fn inverse(&self, ct: &CtData) -> Line {
        match self {
            Line::Periodic { lp } => Line::periodic(&reverse_path(lp)),
            Line::General { minus, rho, plus } => {
                Line::General { minus: plus.clone(), rho: reverse_path(rho), plus: minus.clone() }.canonical(ct)
            }
        }
    }

    pub fn is_periodic(&self) -> bool {
        matches!(self, Line::Periodic { .. })
    }

    pub fn ends(&self) -> Option<(&Ray, &Ray)> {
        match self {
            Line::General { minus, plus, .. } => Some((minus, plus)),
            Line::Periodic { .. } => None,
        }
    }

    /// Non-periodic with at least one periodic end.
    pub fn is_staple(&self) -> bool {
        self.ends().is_some_and(|(m, p)| !m.is_eigen() || !p.is_eigen())
    }

    /// Higher edges whose eigenrays are ends of the line.
    pub fn eigen_ends(&self) -> Vec<usize> {
        let mut out = Vec::new();
        if let Some((m, p)) = self.ends() {
            for r in [m, p] {
                if let Ray::Eigen(e) = r {
                    out.push(*e);
                }
            }
        }
        out
    }

    /// A finite window with `d` edges of each ray.
    pub fn window(&self, ct: &CtData, d: usize) -> Vec<EdgeRef> {
        match self {
            Line::General { minus, rho, plus } => {
                let mut out = reverse_path(&minus.prefix(ct, d));
                out.extend_from_slice(rho);
                out.extend(plus.prefix(ct, d));
                out
            }
            Line::Periodic { lp } => {
                let mut out = Vec::new();
                while out.len() < 2 * d {
                    out.extend_from_slice(lp);
                }
                out
            }
        }
    }

    pub fn display(&self, ct: &CtData) -> String {
        match self {
            Line::Periodic { lp } => format!("∞({})∞", ct.format_path(lp)),
            Line::General { minus, rho, plus } => {
                let mut parts = vec![minus.left(ct)];
                if !rho.is_empty() {
                    parts.push(ct.format_path(rho));
                }
                parts.push(plus.right(ct));
                parts.join(" ")
            }
        }
    }
}

/// `f_#(L) = L`, checked on a window with `d` edges on each side.
pub fn is_invariant(ct: &CtData, line: &Line, d: usize) -> bool {
    let p = line.window(ct, d);
    let q = ct.map_path(&p);
    let m = d / 2;
    if p.len() <= 2 * m {
        return false;
    }
    let inner = &p[m..p.len() - m];
    q.windows(inner.len()).any(|w| w == inner)
}

/// Every term of the complete splitting is a fixed edge or an iNP.
pub fn is_nielsen_path(ct: &CtData, p: &[EdgeRef]) -> bool {
    if p.is_empty() {
        return true;
    }
    match ct.complete_splitting(p) {
        Ok(ts) => ts.iter().all(|&t| match t {
            Term::Edge(e) => ct.is_fixed(edge_index(e)),
            Term::Inp { .. } => true,
            Term::Exceptional { .. } => false,
        }),
        Err(_) => false,
    }
}

fn ray_lifts(ct: &CtData, r: &Ray) -> bool {
    match r {
        Ray::Eigen(e) => ct.is_higher(*e),
        Ray::LinearTail { edge, .. } => ct.is_linear(*edge),
        Ray::Periodic { lp } => {
            !lp.is_empty() && ct.graph().dst(*lp.last().unwrap()) == ct.graph().src(lp[0]) && is_nielsen_path(ct, lp)
        }
    }
}

/// Reads the line in the eigengraph: Nielsen middle, rays that are stubs,
/// lollipop tails or periodic Nielsen loops.
pub fn lifts_to_eigengraph(ct: &CtData, line: &Line) -> bool {
    match line {
        Line::Periodic { lp } => ray_lifts(ct, &Ray::Periodic { lp: lp.clone() }),
        Line::General { minus, rho, plus } => {
            let g = ct.graph();
            let x = minus.start(ct);
            let y = plus.start(ct);
            let joined = if rho.is_empty() { x == y } else { g.src(rho[0]) == x && g.dst(*rho.last().unwrap()) == y };
            joined && ray_lifts(ct, minus) && ray_lifts(ct, plus) && is_nielsen_path(ct, rho)
        }
    }
}

// ---------------------------------------------------------------- f_#^∞

fn f_inf_term(ct: &CtData, t: Term) -> Result<(Vec<EdgeRef>, Ray), InvariantError> {
    match t {
        Term::Exceptional { first, last, .. } => {
            let d = ct.degree(first).unwrap() - ct.degree(last).unwrap();
            Ok((vec![], Ray::LinearTail { edge: first, sign: sign_of(d) }))
        }
        Term::Inp { .. } => Err(InvariantError::NotGrowing(ct.format_term(t))),
        Term::Edge(e) => {
            let i = edge_index(e);
            match ct.class(i) {
                EdgeClass::Fixed => Err(InvariantError::NotGrowing(ct.format_term(t))),
                EdgeClass::Linear { twist, degree } => {
                    if e > 0 {
                        Ok((vec![], Ray::LinearTail { edge: i, sign: sign_of(degree) }))
                    } else {
                        Ok((vec![], Ray::Periodic { lp: twist_traversal(ct, twist, -sign_of(degree)) }))
                    }
                }
                EdgeClass::Higher => {
                    if e > 0 {
                        Ok((vec![], Ray::Eigen(i)))
                    } else {
                        // f^k(Ē) begins with f^{k-1}(ū)
                        let img = ct.term_image(t);
                        f_infinity(ct, &img[..img.len() - 1])
                    }
                }
            }
        }
    }
}

/// Limit of `f^k_#(σ)`: the Nielsen prefix and the ray after it.
pub fn f_infinity(ct: &CtData, sigma: &[Term]) -> Result<(Vec<EdgeRef>, Ray), InvariantError> {
    let i = sigma
        .iter()
        .position(|&t| ct.is_growing(t))
        .ok_or_else(|| InvariantError::NotGrowing(ct.format_terms(sigma)))?;
    let mut mu = ct.terms_path(&sigma[..i]);
    let (rest, r) = f_inf_term(ct, sigma[i])?;
    mu.extend(rest);
    Ok((mu, r))
}

pub fn eigenray(ct: &CtData, e: usize) -> Result<Ray, InvariantError> {
    if !ct.is_higher(e) {
        return Err(InvariantError::NotHigherOrder(ct.name(fwd(e))));
    }
    Ok(Ray::Eigen(e))
}

/// `(f^∞(σ̄_1))⁻¹ ρ f^∞(σ_2)`.
pub fn line_between(ct: &CtData, s1: Term, rho: &[Term], s2: Term) -> Line {
    let (mm, rm) = f_inf_term(ct, s1.inverse()).expect("growing term");
    let (mp, rp) = f_inf_term(ct, s2).expect("growing term");
    let mut mid = reverse_path(&mm);
    mid.extend(ct.terms_path(rho));
    mid.extend(mp);
    Line::general(ct, rm, mid, rp)
}

// ---------------------------------------------------------------- limit lines

fn acc_term(
    ct: &CtData,
    t: Term,
    memo: &mut BTreeMap<usize, BTreeSet<Line>>,
) -> BTreeSet<Line> {
    let mut out = BTreeSet::new();
    match t {
        Term::Inp { .. } => {}
        Term::Exceptional { first, last, .. } => {
            let d = ct.degree(first).unwrap() - ct.degree(last).unwrap();
            let tw = ct.twist_of(first).unwrap();
            out.insert(Line::periodic(&twist_traversal(ct, tw, sign_of(d))));
        }
        Term::Edge(e) => {
            let i = edge_index(e);
            match ct.class(i) {
                EdgeClass::Fixed => {}
                EdgeClass::Linear { twist, degree } => {
                    let s = if e > 0 { sign_of(degree) } else { -sign_of(degree) };
                    out.insert(Line::periodic(&twist_traversal(ct, twist, s)));
                }
                EdgeClass::Higher => {
                    let om = omega(ct, i, memo);
                    if e > 0 {
                        out = om;
                    } else {
                        out = om.iter().map(|l| l.inverse(ct)).collect();
                    }
                }
            }
        }
    }
    out
}

fn omega(ct: &CtData, e: usize, memo: &mut BTreeMap<usize, BTreeSet<Line>>) -> BTreeSet<Line> {
    if let Some(s) = memo.get(&e) {
        return s.clone();
    }
    let u = ct.tail_split(e).to_vec();
    let mut ts = u.clone();
    ts.extend(ct.terms_image(&u));
    let (rhos, sigmas) = ct.coarsen(&ts);
    let mut out = BTreeSet::new();
    for i in 0..sigmas.len().saturating_sub(1) {
        out.insert(line_between(ct, sigmas[i], &rhos[i + 1], sigmas[i + 1]));
    }
    for &s in &sigmas {
        out.extend(acc_term(ct, s, memo));
    }
    memo.insert(e, out.clone());
    out
}

/// `Ω(r_E)`, the lines accumulated by the eigenray of `E`.
pub fn limit_lines(ct: &CtData, e: usize) -> Result<BTreeSet<Line>, InvariantError> {
    eigenray(ct, e)?;
    Ok(omega(ct, e, &mut BTreeMap::new()))
}

/// Non-periodic elements of `Ω(r_E)`.
pub fn acc_np(ct: &CtData, e: usize) -> Result<BTreeSet<Line>, InvariantError> {
    Ok(limit_lines(ct, e)?.into_iter().filter(|l| !l.is_periodic()).collect())
}

/// `Ω(φ)`: union over all eigenrays.
pub fn all_limit_lines(ct: &CtData) -> BTreeSet<Line> {
    let mut memo = BTreeMap::new();
    let mut out = BTreeSet::new();
    for e in ct.higher_edges() {
        out.extend(omega(ct, e, &mut memo));
    }
    out
}

pub fn all_acc_np(ct: &CtData) -> BTreeSet<Line> {
    all_limit_lines(ct).into_iter().filter(|l| !l.is_periodic()).collect()
}

// ---------------------------------------------------------------- subgraph forests

/// BFS spanning forest of the subgraph spanned by an edge set and extra
/// vertices.
#[derive(Debug, Clone)]
struct Forest {
    comp: Vec<Option<usize>>,
    /// Edge from the parent into the vertex.
    parent: Vec<Option<EdgeRef>>,
    roots: Vec<usize>,
    non_tree: Vec<usize>,
}

impl Forest {
    fn new(ct: &CtData, vertices: &BTreeSet<usize>, edges: &BTreeSet<usize>) -> Forest {
        let g = ct.graph();
        let nv = g.vertices().len();
        let mut adj: Vec<Vec<EdgeRef>> = vec![Vec::new(); nv];
        for &e in edges {
            adj[g.src(fwd(e))].push(fwd(e));
            adj[g.dst(fwd(e))].push(-fwd(e));
        }
        let mut comp = vec![None; nv];
        let mut parent = vec![None; nv];
        let mut roots = Vec::new();
        let mut used = BTreeSet::new();
        for &r in vertices {
            if comp[r].is_some() {
                continue;
            }
            let c = roots.len();
            roots.push(r);
            comp[r] = Some(c);
            let mut q = VecDeque::from([r]);
            while let Some(v) = q.pop_front() {
                for &e in &adj[v] {
                    let x = g.dst(e);
                    if comp[x].is_none() {
                        comp[x] = Some(c);
                        parent[x] = Some(e);
                        used.insert(edge_index(e));
                        q.push_back(x);
                    }
                }
            }
        }
        let non_tree = edges.iter().copied().filter(|e| !used.contains(e)).collect();
        Forest { comp, parent, roots, non_tree }
    }

    fn up(&self, ct: &CtData, mut v: usize) -> Vec<EdgeRef> {
        let mut out = Vec::new();
        while let Some(e) = self.parent[v] {
            out.push(-e);
            v = ct.graph().src(e);
        }
        out
    }

    /// Tree path between two vertices of one component.
    fn path(&self, ct: &CtData, u: usize, v: usize) -> Option<Vec<EdgeRef>> {
        if self.comp[u].is_none() || self.comp[u] != self.comp[v] {
            return None;
        }
        let mut p = self.up(ct, u);
        p.extend(reverse_path(&self.up(ct, v)));
        Some(reduce_path(&p))
    }

    fn component_edges(&self, ct: &CtData, c: usize) -> Vec<usize> {
        self.non_tree.iter().copied().filter(|&e| self.comp[ct.graph().src(fwd(e))] == Some(c)).collect()
    }

    /// Loops at `x` for the non-tree edges of its component.
    fn loops_at(&self, ct: &CtData, x: usize) -> Vec<Vec<EdgeRef>> {
        let g = ct.graph();
        let Some(c) = self.comp[x] else { return vec![] };
        self.component_edges(ct, c)
            .into_iter()
            .map(|e| {
                let mut p = self.path(ct, x, g.src(fwd(e))).unwrap();
                p.push(fwd(e));
                p.extend(self.path(ct, g.dst(fwd(e)), x).unwrap());
                reduce_path(&p)
            })
            .collect()
    }
}

fn endpoints(ct: &CtData, edges: &BTreeSet<usize>) -> BTreeSet<usize> {
    let g = ct.graph();
    edges.iter().flat_map(|&e| [g.src(fwd(e)), g.dst(fwd(e))]).collect()
}

/// Edges of the core: iteratively drop edges at valence-one vertices.
pub fn core_edges(ct: &CtData, edges: &BTreeSet<usize>) -> BTreeSet<usize> {
    let g = ct.graph();
    let mut cur = edges.clone();
    loop {
        let mut val: BTreeMap<usize, usize> = BTreeMap::new();
        for &e in &cur {
            *val.entry(g.src(fwd(e))).or_default() += 1;
            *val.entry(g.dst(fwd(e))).or_default() += 1;
        }
        let before = cur.len();
        cur.retain(|&e| val[&g.src(fwd(e))] > 1 && val[&g.dst(fwd(e))] > 1);
        if cur.len() == before {
            return cur;
        }
    }
}

/// Free factor system of a subgraph: conjugacy classes of the nontrivial
/// component groups, sorted.
pub fn ffs_of(ct: &CtData, edges: &BTreeSet<usize>) -> Vec<SubgroupConjClass> {
    let core = core_edges(ct, edges);
    let forest = Forest::new(ct, &endpoints(ct, &core), &core);
    let g = ct.graph();
    let mut out: Vec<SubgroupConjClass> = forest
        .roots
        .iter()
        .map(|&r| {
            let gens: Vec<Word> = forest.loops_at(ct, r).iter().map(|p| g.path_word(p)).collect();
            SubgroupConjClass::from_generators(&gens, ct.rank())
        })
        .filter(|c| !c.is_trivial())
        .collect();
    out.sort();
    out
}

fn ranks_of(ffs: &[SubgroupConjClass]) -> Vec<usize> {
    let mut r: Vec<usize> = ffs.iter().map(|c| c.subgroup_rank()).collect();
    r.sort_unstable_by(|a, b| b.cmp(a));
    r
}

// ---------------------------------------------------------------- eigengraph

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ComponentKind {
    Contractible,
    InfiniteCyclic,
    Large,
}

impl ComponentKind {
    pub fn of_rank(r: usize) -> ComponentKind {
        match r {
            0 => ComponentKind::Contractible,
            1 => ComponentKind::InfiniteCyclic,
            _ => ComponentKind::Large,
        }
    }
}

impl fmt::Display for ComponentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ComponentKind::Contractible => "contractible",
            ComponentKind::InfiniteCyclic => "infinite-cyclic",
            ComponentKind::Large => "large",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EigenComponent {
    pub vertices: Vec<usize>,
    pub fixed_edges: Vec<usize>,
    /// Linear edges whose lollipop hangs here.
    pub lollipops: Vec<usize>,
    /// Higher edges whose eigenray stub starts here.
    pub stubs: Vec<usize>,
    pub rank: usize,
}

impl EigenComponent {
    pub fn kind(&self) -> ComponentKind {
        ComponentKind::of_rank(self.rank)
    }
}

/// `Γ(f)` or `Γ(f|K)`: fixed edges and vertices, a lollipop per linear edge,
/// a ray stub per higher edge.
#[derive(Debug, Clone)]
pub struct Eigengraph {
    forest: Forest,
    pub components: Vec<EigenComponent>,
}

pub fn eigengraph(ct: &CtData) -> Eigengraph {
    let all: BTreeSet<usize> = (0..ct.edge_count()).collect();
    let verts: BTreeSet<usize> = (0..ct.graph().vertices().len()).collect();
    eigengraph_on(ct, &verts, &all)
}

/// Eigengraph of the restriction to the subgraph spanned by `edges`.
pub fn restricted_eigengraph(ct: &CtData, edges: &BTreeSet<usize>) -> Eigengraph {
    eigengraph_on(ct, &endpoints(ct, edges), edges)
}

fn eigengraph_on(ct: &CtData, verts: &BTreeSet<usize>, edges: &BTreeSet<usize>) -> Eigengraph {
    let g = ct.graph();
    let fixed: BTreeSet<usize> = edges.iter().copied().filter(|&e| ct.is_fixed(e)).collect();
    let forest = Forest::new(ct, verts, &fixed);
    let mut components: Vec<EigenComponent> = forest
        .roots
        .iter()
        .map(|_| EigenComponent { vertices: vec![], fixed_edges: vec![], lollipops: vec![], stubs: vec![], rank: 0 })
        .collect();
    for &v in verts {
        components[forest.comp[v].unwrap()].vertices.push(v);
    }
    for &e in edges {
        let c = forest.comp[g.src(fwd(e))].unwrap();
        match ct.class(e) {
            EdgeClass::Fixed => components[c].fixed_edges.push(e),
            EdgeClass::Linear { .. } => components[c].lollipops.push(e),
            EdgeClass::Higher => components[c].stubs.push(e),
        }
    }
    for (c, comp) in components.iter_mut().enumerate() {
        comp.rank = forest.component_edges(ct, c).len() + comp.lollipops.len();
    }
    Eigengraph { forest, components }
}

impl Eigengraph {
    pub fn component_at(&self, v: usize) -> Option<usize> {
        self.forest.comp.get(v).copied().flatten()
    }

    /// Path of fixed edges between two vertices of one component.
    pub fn fixed_path(&self, ct: &CtData, u: usize, v: usize) -> Option<Vec<EdgeRef>> {
        self.forest.path(ct, u, v)
    }

    /// Loops at `x` generating the fixed subgroup of its component.
    pub fn fix_loops(&self, ct: &CtData, x: usize) -> Vec<Vec<EdgeRef>> {
        let g = ct.graph();
        let mut out = self.forest.loops_at(ct, x);
        if let Some(c) = self.component_at(x) {
            for &e in &self.components[c].lollipops {
                let w = ct.twist_loop(ct.twist_of(e).unwrap());
                let mut p = self.forest.path(ct, x, g.src(fwd(e))).unwrap();
                p.push(fwd(e));
                p.extend_from_slice(w);
                p.push(-fwd(e));
                p.extend(self.forest.path(ct, g.src(fwd(e)), x).unwrap());
                out.push(reduce_path(&p));
            }
        }
        out
    }

    pub fn fix_subgroup(&self, ct: &CtData, x: usize) -> SubgroupGraph {
        let gens: Vec<Word> = self.fix_loops(ct, x).iter().map(|p| ct.graph().path_word(p)).collect();
        fold(&gens, ct.rank())
    }

    /// Conjugacy classes of the nontrivial fixed subgroups.
    pub fn fix_classes(&self, ct: &CtData) -> Vec<SubgroupConjClass> {
        let mut out: Vec<SubgroupConjClass> = self
            .components
            .iter()
            .map(|c| SubgroupConjClass::of(&self.fix_subgroup(ct, c.vertices[0])))
            .filter(|c| !c.is_trivial())
            .collect();
        out.sort();
        out
    }
}

// ---------------------------------------------------------------- axes

pub fn twist_class(ct: &CtData, t: usize, sign: i8) -> CyclicWord {
    let w = ct.graph().path_word(&twist_traversal(ct, t, sign));
    conjugacy_class(&w).expect("twist path is nontrivial")
}

/// Unoriented axes, one representative per twist path.
pub fn axes(ct: &CtData) -> Vec<CyclicWord> {
    let mut out: Vec<CyclicWord> = (0..ct.twist_loops().len())
        .map(|t| {
            let a = twist_class(ct, t, 1);
            let b = a.inverse();
            a.min(b)
        })
        .collect();
    out.sort();
    out.dedup();
    out
}

/// Oriented axes: both orientations of every twist path.
pub fn oriented_axes(ct: &CtData) -> Vec<CyclicWord> {
    let mut out: Vec<CyclicWord> =
        (0..ct.twist_loops().len()).flat_map(|t| [twist_class(ct, t, 1), twist_class(ct, t, -1)]).collect();
    out.sort();
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Site {
    Base,
    Linear(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StrongAxis {
    pub axis: CyclicWord,
    pub twist: usize,
    /// `+1` when the axis is the twist path, `-1` for its inverse.
    pub orientation: i8,
    pub site: Site,
    pub degree: i64,
}

impl StrongAxis {
    pub fn describe(&self, ct: &CtData) -> String {
        let site = match self.site {
            Site::Base => "base".to_string(),
            Site::Linear(e) => ct.name(fwd(e)),
        };
        format!("{} at {} degree {}", self.axis, site, self.degree)
    }

    /// Vertex where the fixed subgroup of the site is read.
    fn vertex(&self, ct: &CtData) -> usize {
        match self.site {
            Site::Base => ct.graph().src(ct.twist_loop(self.twist)[0]),
            Site::Linear(e) => ct.graph().src(fwd(e)),
        }
    }

    /// The axis element as a loop at the site vertex.
    fn element(&self, ct: &CtData) -> Word {
        let w = twist_traversal(ct, self.twist, self.orientation);
        let p = match self.site {
            Site::Base => w,
            Site::Linear(e) => {
                let mut p = vec![fwd(e)];
                p.extend(w);
                p.push(-fwd(e));
                p
            }
        };
        ct.graph().path_word(&p)
    }
}

pub fn strong_axes(ct: &CtData, a: &CyclicWord) -> Result<Vec<StrongAxis>, InvariantError> {
    for t in 0..ct.twist_loops().len() {
        for orientation in [1i8, -1] {
            if twist_class(ct, t, orientation) != *a {
                continue;
            }
            let mut out = vec![StrongAxis { axis: a.clone(), twist: t, orientation, site: Site::Base, degree: 0 }];
            for e in ct.family(t) {
                out.push(StrongAxis {
                    axis: a.clone(),
                    twist: t,
                    orientation,
                    site: Site::Linear(e),
                    degree: orientation as i64 * ct.degree(e).unwrap(),
                });
            }
            return Ok(out);
        }
    }
    Err(InvariantError::NotAnAxis(a.to_string()))
}

/// `SA(φ)` over all oriented axes.
pub fn all_strong_axes(ct: &CtData) -> Vec<StrongAxis> {
    oriented_axes(ct).iter().flat_map(|a| strong_axes(ct, a).unwrap()).collect()
}

pub fn twist_coordinate(a1: &StrongAxis, a2: &StrongAxis) -> Result<i64, InvariantError> {
    if a1.axis != a2.axis {
        return Err(InvariantError::AxisMismatch);
    }
    Ok(a1.degree - a2.degree)
}

/// `[Fix(Φ), a]` for strong axes whose fixed subgroup has rank at least two.
pub fn algebraic_strong_axes(ct: &CtData) -> Vec<(StrongAxis, SubgroupGraph, Word)> {
    let eg = eigengraph(ct);
    let mut out = Vec::new();
    for sa in all_strong_axes(ct) {
        let v = sa.vertex(ct);
        let c = eg.component_at(v).unwrap();
        if eg.components[c].rank < 2 {
            continue;
        }
        out.push((sa.clone(), eg.fix_subgroup(ct, v), sa.element(ct)));
    }
    out
}

// ---------------------------------------------------------------- partial order

/// `E1 < E2` on higher edges, as pairs `(E1, E2)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RayOrder {
    pub pairs: BTreeSet<(usize, usize)>,
}

impl RayOrder {
    pub fn less(&self, a: usize, b: usize) -> bool {
        self.pairs.contains(&(a, b))
    }

    /// `a <_c b`: nothing strictly between.
    pub fn covers(&self, a: usize, b: usize) -> bool {
        self.less(a, b) && !self.pairs.iter().any(|&(x, y)| x == a && self.less(y, b))
    }

    pub fn is_minimal(&self, e: usize) -> bool {
        !self.pairs.iter().any(|&(_, y)| y == e)
    }
}

pub fn ray_partial_order(ct: &CtData) -> RayOrder {
    let mut pairs = BTreeSet::new();
    for e in ct.higher_edges() {
        for &t in ct.tail_split(e) {
            if let Some((x, _)) = ct.higher_sign(t) {
                pairs.insert((x, e));
            }
        }
    }
    loop {
        let mut add = Vec::new();
        for &(a, b) in &pairs {
            for &(c, d) in &pairs {
                if b == c && !pairs.contains(&(a, d)) {
                    add.push((a, d));
                }
            }
        }
        if add.is_empty() {
            return RayOrder { pairs };
        }
        pairs.extend(add);
    }
}

// ---------------------------------------------------------------- chains

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainElement {
    pub edges: BTreeSet<usize>,
    pub core: BTreeSet<usize>,
    pub ffs: Vec<SubgroupConjClass>,
    /// Higher edge whose addition produced this element.
    pub added: Option<usize>,
}

impl ChainElement {
    pub fn ranks(&self) -> Vec<usize> {
        ranks_of(&self.ffs)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpecialChain {
    pub order: Vec<usize>,
    pub elements: Vec<ChainElement>,
}

/// `K_0`: fixed and linear edges.
pub fn k0(ct: &CtData) -> BTreeSet<usize> {
    (0..ct.edge_count()).filter(|&e| !ct.is_higher(e)).collect()
}

/// Free factor system `F_0(φ)` realized by the core of `K_0`.
pub fn linear_ffs(ct: &CtData) -> ChainElement {
    let edges = k0(ct);
    ChainElement { core: core_edges(ct, &edges), ffs: ffs_of(ct, &edges), edges, added: None }
}

pub fn special_chain(ct: &CtData, order: &[usize]) -> Result<SpecialChain, InvariantError> {
    let higher: BTreeSet<usize> = ct.higher_edges().into_iter().collect();
    let given: BTreeSet<usize> = order.iter().copied().collect();
    if given != higher || order.len() != higher.len() {
        return Err(InvariantError::InvalidTotalOrder("must list every higher order edge once".into()));
    }
    let po = ray_partial_order(ct);
    let pos: BTreeMap<usize, usize> = order.iter().enumerate().map(|(i, &e)| (e, i)).collect();
    for &(a, b) in &po.pairs {
        if pos[&a] > pos[&b] {
            return Err(InvariantError::InvalidTotalOrder(format!(
                "{} must precede {}",
                ct.name(fwd(a)),
                ct.name(fwd(b))
            )));
        }
    }
    let mut elements = vec![linear_ffs(ct)];
    let mut edges = k0(ct);
    for &e in order {
        edges.insert(e);
        let ffs = ffs_of(ct, &edges);
        if ffs != elements.last().unwrap().ffs {
            elements.push(ChainElement { core: core_edges(ct, &edges), ffs, edges: edges.clone(), added: Some(e) });
        }
    }
    Ok(SpecialChain { order: order.to_vec(), elements })
}

/// Parses a comma or space separated list of edge names.
pub fn parse_order(ct: &CtData, text: &str) -> Result<Vec<usize>, InvariantError> {
    text.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| ct.edge(s).ok_or_else(|| InvariantError::InvalidTotalOrder(format!("unknown edge {s}"))))
        .collect()
}

fn admissible_sets(ct: &CtData) -> Vec<BTreeSet<usize>> {
    let higher = ct.higher_edges();
    let po = ray_partial_order(ct);
    let n = higher.len().min(20);
    (0u32..(1 << n))
        .map(|mask| (0..n).filter(|i| mask >> i & 1 == 1).map(|i| higher[i]).collect::<BTreeSet<usize>>())
        .filter(|s| po.pairs.iter().all(|&(r, q)| !s.contains(&q) || s.contains(&r)))
        .collect()
}

/// Whether the subgraph contains `K_0` and has the free factor system of
/// `K_0 ∪ S` for an admissible `S`.
pub fn is_special_ffs(ct: &CtData, h: &BTreeSet<usize>) -> bool {
    if !k0(ct).is_subset(h) {
        return false;
    }
    let target = ffs_of(ct, h);
    admissible_sets(ct).into_iter().any(|s| {
        let mut k = k0(ct);
        k.extend(s);
        ffs_of(ct, &k) == target
    })
}

// ---------------------------------------------------------------- extensions

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ArcType {
    H,
    HH,
    LH,
}

impl fmt::Display for ArcType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ArcType::H => "H",
            ArcType::HH => "HH",
            ArcType::LH => "LH",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Extension {
    /// Index of the larger chain element.
    pub step: usize,
    /// The edge `D` whose eigenray is new.
    pub edge: usize,
    /// The added arc, oriented to end with `D`.
    pub arc: Vec<EdgeRef>,
    pub arc_type: ArcType,
    pub kind: ComponentKind,
    /// Higher edges of the arc.
    pub new_rays: Vec<usize>,
}

pub fn extension(ct: &CtData, chain: &SpecialChain, step: usize) -> Result<Extension, InvariantError> {
    if step == 0 || step >= chain.elements.len() {
        return Err(InvariantError::BadExtension(step));
    }
    let g = ct.graph();
    let hi = &chain.elements[step];
    let lo = &chain.elements[step - 1];
    let d = hi.added.ok_or(InvariantError::BadExtension(step))?;
    let arc_edges: Vec<usize> = hi.core.difference(&lo.core).copied().collect();
    if !arc_edges.contains(&d) {
        return Err(InvariantError::BadExtension(step));
    }
    let (arc, arc_type) = match arc_edges.len() {
        1 => (vec![fwd(d)], ArcType::H),
        2 => {
            let c = if arc_edges[0] == d { arc_edges[1] } else { arc_edges[0] };
            let into = if g.src(fwd(c)) == g.src(fwd(d)) {
                -fwd(c)
            } else if g.dst(fwd(c)) == g.src(fwd(d)) {
                fwd(c)
            } else {
                return Err(InvariantError::BadExtension(step));
            };
            let t = match ct.class(c) {
                EdgeClass::Higher => ArcType::HH,
                EdgeClass::Linear { .. } => ArcType::LH,
                EdgeClass::Fixed => return Err(InvariantError::BadExtension(step)),
            };
            (vec![into, fwd(d)], t)
        }
        _ => return Err(InvariantError::BadExtension(step)),
    };
    let eg = restricted_eigengraph(ct, &hi.core);
    let c = eg.component_at(g.src(fwd(d))).ok_or(InvariantError::BadExtension(step))?;
    let new_rays = arc_edges.iter().copied().filter(|&e| ct.is_higher(e)).collect();
    Ok(Extension { step, edge: d, arc, arc_type, kind: eg.components[c].kind(), new_rays })
}

pub fn extensions(ct: &CtData, chain: &SpecialChain) -> Result<Vec<Extension>, InvariantError> {
    (1..chain.elements.len()).map(|s| extension(ct, chain, s)).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AddedLines {
    Lines(Vec<Line>),
    /// `[Fix(Φ), F_c(r̃⁺)]` based at the initial vertex of `D`.
    Large { fix: SubgroupGraph, carrier: SubgroupGraph },
}

/// Periodic rays at `x` along a loop of fixed edges through the component,
/// together with the tail to the loop.
fn cycle_ends(ct: &CtData, eg: &Eigengraph, comp: usize, y: usize) -> Vec<(Ray, Vec<EdgeRef>)> {
    let g = ct.graph();
    let mut out = Vec::new();
    for e in eg.forest.component_edges(ct, comp) {
        let s = g.src(fwd(e));
        let mut lp = vec![fwd(e)];
        lp.extend(eg.forest.path(ct, g.dst(fwd(e)), s).unwrap());
        for cyc in [lp.clone(), reverse_path(&lp)] {
            let mut cyc = cyc;
            let mut rho = eg.forest.path(ct, s, y).unwrap();
            while !rho.is_empty() && rho[0] == cyc[0] {
                rho.remove(0);
                cyc.rotate_left(1);
            }
            out.push((Ray::Periodic { lp: cyc }, rho));
        }
    }
    out
}

pub fn added_lines(ct: &CtData, chain: &SpecialChain, ext: &Extension) -> AddedLines {
    let g = ct.graph();
    let core = &chain.elements[ext.step].core;
    let eg = restricted_eigengraph(ct, core);
    let y = g.src(fwd(ext.edge));
    let comp = eg.component_at(y).unwrap();
    let info = &eg.components[comp];
    match info.kind() {
        ComponentKind::Large => AddedLines::Large {
            fix: eg.fix_subgroup(ct, y),
            carrier: fc_subgroup(ct, chain, ext.edge).conjugate(&g.path_word(&[fwd(ext.edge)])),
        },
        ComponentKind::Contractible => {
            let mut lines = BTreeSet::new();
            for &new in &ext.new_rays {
                for &x in &info.stubs {
                    if x == new {
                        continue;
                    }
                    let rho = eg.fixed_path(ct, g.src(fwd(x)), g.src(fwd(new))).unwrap();
                    lines.insert(Line::general(ct, Ray::Eigen(x), rho, Ray::Eigen(new)));
                }
            }
            AddedLines::Lines(lines.into_iter().collect())
        }
        ComponentKind::InfiniteCyclic => {
            let mut lines = BTreeSet::new();
            for &new in &ext.new_rays {
                let y = g.src(fwd(new));
                for &l in &info.lollipops {
                    let rho = eg.fixed_path(ct, g.src(fwd(l)), y).unwrap();
                    for sign in [1, -1] {
                        lines.insert(Line::general(ct, Ray::LinearTail { edge: l, sign }, rho.clone(), Ray::Eigen(new)));
                    }
                }
                for (r, rho) in cycle_ends(ct, &eg, comp, y) {
                    lines.insert(Line::general(ct, r, rho, Ray::Eigen(new)));
                }
            }
            AddedLines::Lines(lines.into_iter().collect())
        }
    }
}

// ---------------------------------------------------------------- algebraic data

/// `F_c(r_E)` based at the terminal vertex of `E`: the component, containing
/// `u_E`, of the smallest chain element whose core contains `u_E`.
pub fn fc_subgroup(ct: &CtData, chain: &SpecialChain, e: usize) -> SubgroupGraph {
    let g = ct.graph();
    let u: BTreeSet<usize> = ct.tail(e).iter().map(|&x| edge_index(x)).collect();
    let all: BTreeSet<usize> = (0..ct.edge_count()).collect();
    let core = chain.elements.iter().map(|el| &el.core).find(|c| u.is_subset(c)).unwrap_or(&all);
    let forest = Forest::new(ct, &endpoints(ct, core), core);
    let x = g.dst(fwd(e));
    let gens: Vec<Word> = forest.loops_at(ct, x).iter().map(|p| g.path_word(p)).collect();
    fold(&gens, ct.rank())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LineType {
    PP,
    PNP,
    NPP,
    NPNP,
}

impl fmt::Display for LineType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LineType::PP => "P-P",
            LineType::PNP => "P-NP",
            LineType::NPP => "NP-P",
            LineType::NPNP => "NP-NP",
        })
    }
}

/// `H_c(L)`: a conjugacy pair of elements and subgroups.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlgebraicLine {
    pub kind: LineType,
    pub coords: [PairCoord; 2],
}

impl AlgebraicLine {
    pub fn describe(&self) -> String {
        let c: Vec<String> = self.coords.iter().map(describe_coord).collect();
        format!("{} [{}, {}]", self.kind, c[0], c[1])
    }
}

pub fn describe_coord(c: &PairCoord) -> String {
    match c {
        PairCoord::Elem(w) => w.to_string(),
        PairCoord::Sub(h) => {
            let gens: Vec<String> = h.generators().iter().map(|w| w.to_string()).collect();
            format!("<{}>", gens.join(","))
        }
    }
}

pub fn algebraic_line(ct: &CtData, line: &Line, chain: &SpecialChain) -> Result<AlgebraicLine, InvariantError> {
    let g = ct.graph();
    let Line::General { minus, rho, plus } = line else {
        return Err(InvariantError::Untyped(line.display(ct)));
    };
    let wt = |p: &[EdgeRef]| g.path_word(p);
    let minus_c = match minus {
        Ray::Periodic { lp } => PairCoord::Elem(wt(lp).inverse()),
        Ray::LinearTail { edge, sign } => {
            let mut p = vec![fwd(*edge)];
            p.extend(twist_traversal(ct, ct.twist_of(*edge).unwrap(), *sign));
            p.push(-fwd(*edge));
            PairCoord::Elem(wt(&p).inverse())
        }
        Ray::Eigen(e) => PairCoord::Sub(fc_subgroup(ct, chain, *e).conjugate(&wt(&[fwd(*e)]))),
    };
    let plus_c = match plus {
        Ray::Periodic { lp } => PairCoord::Elem(wt(lp).conjugate_by(&wt(rho))),
        Ray::LinearTail { edge, sign } => {
            let mut p = rho.clone();
            p.push(fwd(*edge));
            let w = wt(twist_traversal(ct, ct.twist_of(*edge).unwrap(), *sign).as_slice());
            PairCoord::Elem(w.conjugate_by(&wt(&p)))
        }
        Ray::Eigen(e) => {
            let mut p = rho.clone();
            p.push(fwd(*e));
            PairCoord::Sub(fc_subgroup(ct, chain, *e).conjugate(&wt(&p)))
        }
    };
    let kind = match (&minus_c, &plus_c) {
        (PairCoord::Elem(a), PairCoord::Elem(b)) => {
            if a == b {
                return Err(InvariantError::Untyped(line.display(ct)));
            }
            LineType::PP
        }
        (PairCoord::Elem(_), PairCoord::Sub(_)) => LineType::PNP,
        (PairCoord::Sub(_), PairCoord::Elem(_)) => LineType::NPP,
        (PairCoord::Sub(_), PairCoord::Sub(_)) => LineType::NPNP,
    };
    Ok(AlgebraicLine { kind, coords: [minus_c, plus_c] })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AlgebraicAdded {
    Lines(Vec<AlgebraicLine>),
    Pair(SubgroupGraph, SubgroupGraph),
}

/// The six components of `I_c(φ)`.
#[derive(Debug, Clone)]
pub struct AlgebraicInvariant {
    pub chain: Vec<Vec<SubgroupConjClass>>,
    pub fix: Vec<SubgroupConjClass>,
    pub added: Vec<AlgebraicAdded>,
    pub limit: Vec<AlgebraicLine>,
    pub axes: Vec<CyclicWord>,
    pub strong: Vec<(SubgroupGraph, Word)>,
}

pub const IC_COMPONENTS: [&str; 6] =
    ["chain", "fixed subgroups", "added lines", "limit lines", "oriented axes", "strong axes"];

pub fn algebraic_invariant(ct: &CtData, chain: &SpecialChain) -> Result<AlgebraicInvariant, InvariantError> {
    let mut added = Vec::new();
    for ext in extensions(ct, chain)? {
        added.push(match added_lines(ct, chain, &ext) {
            AddedLines::Large { fix, carrier } => AlgebraicAdded::Pair(fix, carrier),
            AddedLines::Lines(ls) => AlgebraicAdded::Lines(
                ls.iter().map(|l| algebraic_line(ct, l, chain)).collect::<Result<Vec<_>, _>>()?,
            ),
        });
    }
    let limit = all_acc_np(ct).iter().map(|l| algebraic_line(ct, l, chain)).collect::<Result<Vec<_>, _>>()?;
    Ok(AlgebraicInvariant {
        chain: chain.ffs_list(),
        fix: eigengraph(ct).fix_classes(ct),
        added,
        limit,
        axes: oriented_axes(ct),
        strong: algebraic_strong_axes(ct).into_iter().map(|(_, h, a)| (h, a)).collect(),
    })
}

impl AlgebraicInvariant {
    /// One of the six ordered children of `I_c`.
    pub fn component(&self, i: usize) -> IteratedSet<AtomRef> {
        let lines = |ls: &[AlgebraicLine]| IteratedSet::of_leaves(false, ls.iter().cloned().map(AtomRef::Line));
        match i {
            0 => chain_set(&self.chain),
            1 => IteratedSet::of_leaves(false, self.fix.iter().cloned().map(AtomRef::Subgroup)),
            2 => IteratedSet::of_sets(
                true,
                self.added.iter().map(|a| match a {
                    AlgebraicAdded::Lines(ls) => lines(ls),
                    AlgebraicAdded::Pair(h1, h2) => {
                        IteratedSet::of_leaves(false, [AtomRef::GoodPair(h1.clone(), h2.clone())])
                    }
                }),
            ),
            3 => lines(&self.limit),
            4 => IteratedSet::of_leaves(false, self.axes.iter().cloned().map(AtomRef::Axis)),
            5 => IteratedSet::of_leaves(
                false,
                self.strong.iter().map(|(h, a)| AtomRef::StrongAxis(h.clone(), a.clone())),
            ),
            _ => panic!("I_c has six components"),
        }
    }

    pub fn to_iterated_set(&self) -> IteratedSet<AtomRef> {
        IteratedSet::of_sets(true, (0..IC_COMPONENTS.len()).map(|i| self.component(i)))
    }

    /// Name of the first component that is not equivalent, if any.
    pub fn first_difference(&self, other: &AlgebraicInvariant) -> Option<&'static str> {
        (0..IC_COMPONENTS.len())
            .find(|&i| equivalent(&self.component(i), &other.component(i)).is_none())
            .map(|i| IC_COMPONENTS[i])
    }
}

/// First component of `I_c`: the chain as an ordered list of unordered sets.
pub fn chain_set(chain: &[Vec<SubgroupConjClass>]) -> IteratedSet<AtomRef> {
    IteratedSet::of_sets(true, chain.iter().map(|f| IteratedSet::of_leaves(false, f.iter().cloned().map(AtomRef::Subgroup))))
}

impl SpecialChain {
    pub fn ffs_list(&self) -> Vec<Vec<SubgroupConjClass>> {
        self.elements.iter().map(|e| e.ffs.clone()).collect()
    }
}

pub fn assemble_ic(ct: &CtData, chain: &SpecialChain) -> Result<IteratedSet<AtomRef>, InvariantError> {
    Ok(algebraic_invariant(ct, chain)?.to_iterated_set())
}

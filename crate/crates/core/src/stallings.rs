//! Folded subgroup graphs.
//!
//! A `SubgroupGraph` is a based, folded, labeled graph: every vertex has at
//! most one outgoing edge per signed label. Both orientations of each edge are
//! stored, so `adj[v][&l]` and `adj[u][&-l]` describe the same edge.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::words::{conjugacy_class, least_rotation, Word};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StallingsError {
    #[error("subgroup is trivial")]
    TrivialSubgroup,
    #[error("pair is not a free product of its coordinates")]
    NotGoodPair,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubgroupGraph {
    rank: usize,
    adj: Vec<BTreeMap<i32, usize>>,
    base: usize,
}

struct Folder {
    parent: Vec<usize>,
    adj: Vec<BTreeMap<i32, usize>>,
    pending: Vec<(usize, usize)>,
}

impl Folder {
    fn new() -> Self {
        Folder { parent: Vec::new(), adj: Vec::new(), pending: Vec::new() }
    }

    fn vertex(&mut self) -> usize {
        self.parent.push(self.parent.len());
        self.adj.push(BTreeMap::new());
        self.parent.len() - 1
    }

    fn find(&mut self, mut v: usize) -> usize {
        while self.parent[v] != v {
            self.parent[v] = self.parent[self.parent[v]];
            v = self.parent[v];
        }
        v
    }

    fn half(&mut self, s: usize, l: i32, t: usize) {
        let s = self.find(s);
        let t = self.find(t);
        match self.adj[s].get(&l).copied() {
            Some(t2) => {
                let t2 = self.find(t2);
                if t2 != t {
                    self.pending.push((t2, t));
                }
            }
            None => {
                self.adj[s].insert(l, t);
            }
        }
    }

    fn edge(&mut self, s: usize, l: i32, t: usize) {
        self.half(s, l, t);
        self.half(t, -l, s);
        self.drain();
    }

    fn drain(&mut self) {
        while let Some((a, b)) = self.pending.pop() {
            let a = self.find(a);
            let b = self.find(b);
            if a == b {
                continue;
            }
            let (keep, gone) = if a < b { (a, b) } else { (b, a) };
            self.parent[gone] = keep;
            let moved = std::mem::take(&mut self.adj[gone]);
            for (l, x) in moved {
                self.half(keep, l, x);
            }
        }
    }

    fn finish(mut self, base: usize, rank: usize) -> SubgroupGraph {
        let root = self.find(base);
        let mut id: BTreeMap<usize, usize> = BTreeMap::new();
        let mut order = vec![root];
        id.insert(root, 0);
        let mut i = 0;
        while i < order.len() {
            let v = order[i];
            let nbrs: Vec<usize> = self.adj[v].values().copied().collect();
            for x in nbrs {
                let x = self.find(x);
                if let std::collections::btree_map::Entry::Vacant(slot) = id.entry(x) {
                    slot.insert(order.len());
                    order.push(x);
                }
            }
            i += 1;
        }
        let mut adj = vec![BTreeMap::new(); order.len()];
        for (k, &v) in order.iter().enumerate() {
            let entries: Vec<(i32, usize)> = self.adj[v].iter().map(|(&l, &x)| (l, x)).collect();
            for (l, x) in entries {
                let x = self.find(x);
                adj[k].insert(l, id[&x]);
            }
        }
        SubgroupGraph { rank, adj, base: 0 }
    }
}

/// Folds the wedge of petals spelling the generators.
pub fn fold(generators: &[Word], rank: usize) -> SubgroupGraph {
    let mut f = Folder::new();
    let base = f.vertex();
    for g in generators {
        let ls = g.letters();
        if ls.is_empty() {
            continue;
        }
        let mut cur = base;
        for (i, &l) in ls.iter().enumerate() {
            let next = if i + 1 == ls.len() { base } else { f.vertex() };
            f.edge(cur, l, next);
            cur = next;
        }
    }
    f.finish(base, rank)
}

impl SubgroupGraph {
    pub fn rank_of_ambient(&self) -> usize {
        self.rank
    }

    pub fn base(&self) -> usize {
        self.base
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    /// Edges as `(source, target, label)` with positive labels.
    pub fn edges(&self) -> Vec<(usize, usize, i32)> {
        let mut out = Vec::new();
        for (v, m) in self.adj.iter().enumerate() {
            for (&l, &x) in m {
                if l > 0 {
                    out.push((v, x, l));
                }
            }
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        self.edges().len()
    }

    pub fn step(&self, v: usize, l: i32) -> Option<usize> {
        self.adj[v].get(&l).copied()
    }

    pub fn read(&self, v: usize, letters: &[i32]) -> Option<usize> {
        letters.iter().try_fold(v, |cur, &l| self.step(cur, l))
    }

    pub fn membership(&self, w: &Word) -> bool {
        self.read(self.base, w.letters()) == Some(self.base)
    }

    /// Rank of the subgroup, by Euler characteristic.
    pub fn subgroup_rank(&self) -> usize {
        (self.edge_count() + 1).saturating_sub(self.vertex_count())
    }

    pub fn is_trivial(&self) -> bool {
        self.edge_count() == 0
    }

    /// BFS tree words from `root`.
    fn tree_words(&self, root: usize) -> (Vec<Option<Vec<i32>>>, BTreeSet<(usize, i32)>) {
        let mut words: Vec<Option<Vec<i32>>> = vec![None; self.adj.len()];
        let mut tree = BTreeSet::new();
        words[root] = Some(vec![]);
        let mut q = VecDeque::from([root]);
        while let Some(v) = q.pop_front() {
            for (&l, &x) in &self.adj[v] {
                if words[x].is_none() {
                    let mut w = words[v].clone().unwrap();
                    w.push(l);
                    words[x] = Some(w);
                    tree.insert((v, l));
                    tree.insert((x, -l));
                    q.push_back(x);
                }
            }
        }
        (words, tree)
    }

    /// Path word from `from` to `to` inside the graph.
    pub fn path_word(&self, from: usize, to: usize) -> Option<Word> {
        let (words, _) = self.tree_words(from);
        words[to].clone().map(|w| Word::reduce(&w, self.rank).unwrap())
    }

    /// Free basis of the based fundamental group.
    pub fn generators(&self) -> Vec<Word> {
        self.generators_at(self.base)
    }

    pub fn generators_at(&self, root: usize) -> Vec<Word> {
        let (words, tree) = self.tree_words(root);
        let mut out = Vec::new();
        for (u, x, l) in self.edges() {
            if tree.contains(&(u, l)) {
                continue;
            }
            let (Some(a), Some(b)) = (&words[u], &words[x]) else { continue };
            let mut raw = a.clone();
            raw.push(l);
            raw.extend(b.iter().rev().map(|y| -y));
            out.push(Word::reduce(&raw, self.rank).unwrap());
        }
        out
    }

    /// Core: iteratively prune valence-one vertices, ignoring the base.
    /// Returns kept vertices and the hair word from the base to the core.
    fn core_vertices(&self) -> (Vec<bool>, Option<(usize, Word)>) {
        let n = self.adj.len();
        let mut alive = vec![true; n];
        let mut val: Vec<usize> = (0..n).map(|v| self.adj[v].len()).collect();
        let mut q: VecDeque<usize> = (0..n).filter(|&v| val[v] <= 1).collect();
        while let Some(v) = q.pop_front() {
            if !alive[v] || val[v] > 1 {
                continue;
            }
            alive[v] = false;
            for &x in self.adj[v].values() {
                if alive[x] {
                    val[x] -= 1;
                    if val[x] <= 1 {
                        q.push_back(x);
                    }
                }
            }
        }
        if !alive.iter().any(|&a| a) {
            return (alive, None);
        }
        let (words, _) = self.tree_words(self.base);
        let c = (0..n)
            .filter(|&v| alive[v])
            .min_by_key(|&v| (words[v].as_ref().map(|w| w.len()).unwrap_or(usize::MAX), v))
            .unwrap();
        let hair = Word::reduce(words[c].as_ref().unwrap(), self.rank).unwrap();
        (alive, Some((c, hair)))
    }

    /// Canonical BFS code from `start` restricted to `alive` vertices.
    fn code_from(&self, start: usize, alive: &[bool]) -> (Vec<i64>, Vec<usize>) {
        let mut num: BTreeMap<usize, usize> = BTreeMap::new();
        let mut order = vec![start];
        num.insert(start, 0);
        let mut code = Vec::new();
        let mut i = 0;
        while i < order.len() {
            let v = order[i];
            for (&l, &x) in &self.adj[v] {
                if !alive[x] {
                    continue;
                }
                let k = match num.get(&x) {
                    Some(&k) => k,
                    None => {
                        num.insert(x, order.len());
                        order.push(x);
                        order.len() - 1
                    }
                };
                code.extend([i as i64, l as i64, k as i64]);
            }
            code.push(-1);
            i += 1;
        }
        (code, order)
    }

    /// Based graph of `g H g^-1`.
    pub fn conjugate(&self, g: &Word) -> SubgroupGraph {
        let gens: Vec<Word> = self.generators().iter().map(|h| h.conjugate_by(g)).collect();
        fold(&gens, self.rank)
    }
}

/// Core graph of a subgroup in canonical position, with the data needed to
/// produce conjugators.
#[derive(Debug, Clone)]
pub struct CoreInfo {
    /// Canonical code of the core (empty for the trivial subgroup).
    pub code: Vec<i64>,
    /// Vertices of the source graph at which the code is attained.
    pub starts: Vec<usize>,
    /// Words from the base of the source graph to each start.
    pub start_words: Vec<Word>,
}

pub fn core_info(h: &SubgroupGraph) -> CoreInfo {
    let (alive, hc) = h.core_vertices();
    let Some((c, hair)) = hc else {
        return CoreInfo { code: vec![], starts: vec![], start_words: vec![] };
    };
    let mut best: Option<Vec<i64>> = None;
    let mut starts = Vec::new();
    for v in 0..alive.len() {
        if !alive[v] {
            continue;
        }
        let (code, _) = h.code_from(v, &alive);
        match &best {
            Some(b) if code > *b => {}
            Some(b) if code == *b => starts.push(v),
            _ => {
                best = Some(code);
                starts = vec![v];
            }
        }
    }
    let (words, _) = {
        // paths inside the core from c
        let mut words: Vec<Option<Vec<i32>>> = vec![None; alive.len()];
        words[c] = Some(vec![]);
        let mut q = VecDeque::from([c]);
        while let Some(v) = q.pop_front() {
            for (&l, &x) in &h.adj[v] {
                if alive[x] && words[x].is_none() {
                    let mut w = words[v].clone().unwrap();
                    w.push(l);
                    words[x] = Some(w);
                    q.push_back(x);
                }
            }
        }
        (words, ())
    };
    let start_words = starts
        .iter()
        .map(|&s| hair.mul(&Word::reduce(words[s].as_ref().unwrap(), h.rank).unwrap()))
        .collect();
    CoreInfo { code: best.unwrap(), starts, start_words }
}

/// Conjugacy class of a finitely generated subgroup.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SubgroupConjClass {
    rank: usize,
    code: Vec<i64>,
}

impl SubgroupConjClass {
    pub fn of(h: &SubgroupGraph) -> Self {
        SubgroupConjClass { rank: h.rank, code: core_info(h).code }
    }

    pub fn from_generators(gens: &[Word], rank: usize) -> Self {
        Self::of(&fold(gens, rank))
    }

    pub fn is_trivial(&self) -> bool {
        self.code.is_empty()
    }

    /// A representative subgroup whose base sits at the canonical start.
    pub fn representative(&self) -> SubgroupGraph {
        let mut adj: Vec<BTreeMap<i32, usize>> = Vec::new();
        let mut i = 0;
        let mut cur = 0usize;
        adj.push(BTreeMap::new());
        while i < self.code.len() {
            if self.code[i] == -1 {
                cur += 1;
                i += 1;
                continue;
            }
            let (v, l, x) = (self.code[i] as usize, self.code[i + 1] as i32, self.code[i + 2] as usize);
            debug_assert_eq!(v, cur);
            while adj.len() <= v.max(x) {
                adj.push(BTreeMap::new());
            }
            adj[v].insert(l, x);
            i += 3;
        }
        SubgroupGraph { rank: self.rank, adj, base: 0 }
    }

    pub fn subgroup_rank(&self) -> usize {
        if self.code.is_empty() {
            0
        } else {
            self.representative().subgroup_rank()
        }
    }
}

impl fmt::Display for SubgroupConjClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.code.is_empty() {
            return write!(f, "<1>");
        }
        let gens: Vec<String> = self.representative().generators().iter().map(|g| g.to_string()).collect();
        write!(f, "<{}>", gens.join(","))
    }
}

pub fn conj_class_equal(a: &SubgroupConjClass, b: &SubgroupConjClass) -> bool {
    a == b
}

/// Some `g` with `g H1 g^-1 = H2`.
pub fn conjugator(h1: &SubgroupGraph, h2: &SubgroupGraph) -> Option<Word> {
    let c1 = core_info(h1);
    let c2 = core_info(h2);
    if c1.code != c2.code {
        return None;
    }
    if c1.code.is_empty() {
        return Some(Word::identity(h1.rank));
    }
    Some(c2.start_words[0].mul(&c1.start_words[0].inverse()))
}

/// Finite group `N(H)/H`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalizerQuotient {
    pub reps: Vec<Word>,
    pub table: Vec<Vec<usize>>,
}

impl NormalizerQuotient {
    pub fn order(&self) -> usize {
        self.reps.len()
    }
}

pub fn normalizer_quotient(h: &SubgroupGraph) -> Result<NormalizerQuotient, StallingsError> {
    let (alive, hc) = h.core_vertices();
    let Some((c, hair)) = hc else { return Err(StallingsError::TrivialSubgroup) };
    let (code_c, _) = h.code_from(c, &alive);
    let mut verts = vec![c];
    for v in 0..alive.len() {
        if alive[v] && v != c && h.code_from(v, &alive).0 == code_c {
            verts.push(v);
        }
    }
    let q: Vec<Word> = verts.iter().map(|&v| h.path_word(c, v).unwrap()).collect();
    let index: BTreeMap<usize, usize> = verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut table = vec![vec![0; verts.len()]; verts.len()];
    for i in 0..verts.len() {
        for j in 0..verts.len() {
            let prod = q[i].mul(&q[j]);
            let end = h.read(c, prod.letters()).expect("normalizer words read in the core");
            table[i][j] = index[&end];
        }
    }
    let reps = q.iter().map(|w| w.conjugate_by(&hair)).collect();
    Ok(NormalizerQuotient { reps, table })
}

/// `H`-conjugacy classes of subgroups of `H` that are `F_n`-conjugate to `K`.
pub fn split_conj_class(k: &SubgroupGraph, h: &SubgroupGraph) -> Result<Vec<SubgroupGraph>, StallingsError> {
    let (k_alive, kc) = k.core_vertices();
    let Some((k0, _)) = kc else { return Err(StallingsError::TrivialSubgroup) };
    let (h_alive, hc) = h.core_vertices();
    if hc.is_none() {
        return Ok(vec![]);
    }
    let (k0_code, _) = k.code_from(k0, &k_alive);
    let orbit: Vec<usize> =
        (0..k_alive.len()).filter(|&v| k_alive[v] && k.code_from(v, &k_alive).0 == k0_code).collect();
    let k_gens = k.generators_at(k0);
    let mut covered = BTreeSet::new();
    let mut out = Vec::new();
    for v in 0..h_alive.len() {
        if !h_alive[v] || covered.contains(&v) {
            continue;
        }
        let Some(map) = immersion(k, k0, &k_alive, h, v) else { continue };
        for &o in &orbit {
            covered.insert(map[&o]);
        }
        let t = h.path_word(h.base, v).unwrap();
        let gens: Vec<Word> = k_gens.iter().map(|g| g.conjugate_by(&t)).collect();
        out.push(fold(&gens, h.rank));
    }
    Ok(out)
}

fn immersion(
    k: &SubgroupGraph,
    k0: usize,
    k_alive: &[bool],
    h: &SubgroupGraph,
    v: usize,
) -> Option<BTreeMap<usize, usize>> {
    let mut map = BTreeMap::from([(k0, v)]);
    let mut q = VecDeque::from([k0]);
    while let Some(x) = q.pop_front() {
        let hx = map[&x];
        for (&l, &y) in &k.adj[x] {
            if !k_alive[y] {
                continue;
            }
            let hy = h.step(hx, l)?;
            match map.get(&y) {
                Some(&z) if z != hy => return None,
                Some(_) => {}
                None => {
                    map.insert(y, hy);
                    q.push_back(y);
                }
            }
        }
    }
    Some(map)
}

pub fn join(a: &SubgroupGraph, b: &SubgroupGraph) -> SubgroupGraph {
    let mut gens = a.generators();
    gens.extend(b.generators());
    fold(&gens, a.rank)
}

pub fn is_good_pair(h1: &SubgroupGraph, h2: &SubgroupGraph) -> Result<bool, StallingsError> {
    if h1.is_trivial() || h2.is_trivial() {
        return Err(StallingsError::TrivialSubgroup);
    }
    Ok(join(h1, h2).subgroup_rank() == h1.subgroup_rank() + h2.subgroup_rank())
}

/// One coordinate of a conjugacy pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PairCoord {
    Elem(Word),
    Sub(SubgroupGraph),
}

impl PairCoord {
    fn generators(&self) -> Vec<Word> {
        match self {
            PairCoord::Elem(w) => vec![w.clone()],
            PairCoord::Sub(h) => h.generators(),
        }
    }

    fn conjugate(&self, g: &Word) -> PairCoord {
        match self {
            PairCoord::Elem(w) => PairCoord::Elem(w.conjugate_by(g)),
            PairCoord::Sub(h) => PairCoord::Sub(h.conjugate(g)),
        }
    }
}

/// Position of a subgroup `X <= L` up to `L`-conjugacy.
fn l_key(l: &SubgroupGraph, x: &SubgroupGraph) -> Option<(Vec<i64>, usize)> {
    let info = core_info(x);
    let v = info.start_words.iter().filter_map(|t| l.read(l.base, t.letters())).min()?;
    Some((info.code, v))
}

/// Circuit of an element of `L` in the graph of `L`, up to rotation.
fn l_circuit(l: &SubgroupGraph, x: &Word) -> Option<Vec<(usize, i32)>> {
    let (p, c) = x.cyclic_split();
    let mut v = l.read(l.base, p.letters())?;
    let mut seq = Vec::new();
    for &a in c.letters() {
        seq.push((v, a));
        v = l.step(v, a)?;
    }
    Some(least_rotation(&seq))
}

fn coord_matches(l: &SubgroupGraph, x: &PairCoord, y: &PairCoord) -> bool {
    match (x, y) {
        (PairCoord::Elem(a), PairCoord::Elem(b)) => match (l_circuit(l, a), l_circuit(l, b)) {
            (Some(p), Some(q)) => p == q,
            _ => false,
        },
        (PairCoord::Sub(a), PairCoord::Sub(b)) => match (l_key(l, a), l_key(l, b)) {
            (Some(p), Some(q)) => p == q,
            _ => false,
        },
        _ => false,
    }
}

fn coord_class_equal(x: &PairCoord, y: &PairCoord) -> bool {
    match (x, y) {
        (PairCoord::Elem(a), PairCoord::Elem(b)) => conjugacy_class(a).ok() == conjugacy_class(b).ok(),
        (PairCoord::Sub(a), PairCoord::Sub(b)) => SubgroupConjClass::of(a) == SubgroupConjClass::of(b),
        _ => false,
    }
}

/// Simultaneous conjugacy of tuples whose coordinates form a free product
/// (or a subgroup together with elements of it).
pub fn conj_tuple_equal(x: &[PairCoord], y: &[PairCoord]) -> bool {
    if x.len() != y.len() || x.is_empty() {
        return false;
    }
    if !x.iter().zip(y).all(|(a, b)| coord_class_equal(a, b)) {
        return false;
    }
    let rank = match &x[0] {
        PairCoord::Elem(w) => w.rank(),
        PairCoord::Sub(h) => h.rank,
    };
    let kx = fold(&x.iter().flat_map(|c| c.generators()).collect::<Vec<_>>(), rank);
    let ly = fold(&y.iter().flat_map(|c| c.generators()).collect::<Vec<_>>(), rank);
    let Some(g0) = conjugator(&kx, &ly) else { return false };
    let Ok(nq) = normalizer_quotient(&ly) else { return false };
    nq.reps.iter().any(|n| {
        let g = n.mul(&g0);
        x.iter().zip(y).all(|(a, b)| coord_matches(&ly, &a.conjugate(&g), b))
    })
}

pub fn pairs_equal(
    p: (&SubgroupGraph, &SubgroupGraph),
    q: (&SubgroupGraph, &SubgroupGraph),
) -> Result<bool, StallingsError> {
    if !is_good_pair(p.0, p.1)? || !is_good_pair(q.0, q.1)? {
        return Err(StallingsError::NotGoodPair);
    }
    Ok(conj_tuple_equal(
        &[PairCoord::Sub(p.0.clone()), PairCoord::Sub(p.1.clone())],
        &[PairCoord::Sub(q.0.clone()), PairCoord::Sub(q.1.clone())],
    ))
}

/// Expresses each basis letter `x_i` as a word in the given images, by
/// folding while tracking petal labels. `None` unless the images form a basis.
pub fn express_in_images(images: &[Word], rank: usize) -> Option<Vec<Word>> {
    let m = images.len();
    // edges: (src, dst, x-label > 0, y-label)
    let mut edges: Vec<(usize, usize, i32, Word)> = Vec::new();
    let mut nv = 1usize;
    for (e, img) in images.iter().enumerate() {
        let ls = img.letters();
        if ls.is_empty() {
            return None;
        }
        let mut cur = 0;
        for (i, &l) in ls.iter().enumerate() {
            let next = if i + 1 == ls.len() {
                0
            } else {
                nv += 1;
                nv - 1
            };
            let y = if i == 0 { Word::generator(e + 1, m) } else { Word::identity(m) };
            if l > 0 {
                edges.push((cur, next, l, y));
            } else {
                edges.push((next, cur, -l, y.inverse()));
            }
            cur = next;
        }
    }
    loop {
        // find two half-edges at a vertex with the same signed label
        let mut found = None;
        'outer: for i in 0..edges.len() {
            for j in (i + 1)..edges.len() {
                let (a, b) = (&edges[i], &edges[j]);
                if a.2 != b.2 {
                    continue;
                }
                if a.0 == b.0 {
                    found = Some((i, j, true));
                    break 'outer;
                }
                if a.1 == b.1 {
                    found = Some((i, j, false));
                    break 'outer;
                }
            }
        }
        let Some((i, j, forward)) = found else { break };
        // orient both as leaving the shared vertex: y-labels of the half-edges
        let (y1, v1, y2, v2) = if forward {
            (edges[i].3.clone(), edges[i].1, edges[j].3.clone(), edges[j].1)
        } else {
            (edges[i].3.inverse(), edges[i].0, edges[j].3.inverse(), edges[j].0)
        };
        if v1 == v2 {
            if y1 != y2 {
                return None;
            }
            edges.remove(j);
            continue;
        }
        // merge `gone` into `keep`; never remove the base
        let (keep, gone, yk, yg) = if v2 == 0 { (v2, v1, y2, y1) } else { (v1, v2, y1, y2) };
        let shift = yk.inverse().mul(&yg);
        let drop = if keep == v1 { j } else { i };
        edges.remove(drop);
        for e in edges.iter_mut() {
            if e.0 == gone {
                e.3 = shift.mul(&e.3);
                e.0 = keep;
            }
            if e.1 == gone {
                e.3 = e.3.mul(&shift.inverse());
                e.1 = keep;
            }
        }
    }
    let mut out = vec![None; rank];
    for (s, t, l, y) in edges {
        if s != 0 || t != 0 || out[l as usize - 1].is_some() {
            return None;
        }
        out[l as usize - 1] = Some(y);
    }
    out.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        Word::parse(s, 3).unwrap()
    }

    fn sub(gens: &[&str]) -> SubgroupGraph {
        fold(&gens.iter().map(|g| w(g)).collect::<Vec<_>>(), 3)
    }

    #[test]
    fn fold_examples() {
        let g = sub(&["a"]);
        assert_eq!(g.vertex_count(), 1);
        assert_eq!(g.edges(), vec![(0, 0, 1)]);
        let g = sub(&["aa", "b"]);
        assert_eq!(g.vertex_count(), 2);
        assert_eq!(g.edge_count(), 3);
        assert_eq!(g.subgroup_rank(), 2);
        let g = sub(&["a", "ab"]);
        assert_eq!(g.vertex_count(), 1);
        assert_eq!(g.subgroup_rank(), 2);
    }

    #[test]
    fn membership_examples() {
        let g = sub(&["aa", "b"]);
        assert!(g.membership(&w("aab")));
        assert!(!g.membership(&w("a")));
        assert!(g.membership(&w("baaB")));
    }

    #[test]
    fn conjugacy_examples() {
        let a = sub(&["a"]);
        let b = sub(&["baB"]);
        assert_eq!(SubgroupConjClass::of(&a), SubgroupConjClass::of(&b));
        let g = conjugator(&a, &b).unwrap();
        assert_eq!(a.conjugate(&g).generators(), b.generators());
        assert_eq!(g, w("b"));
        assert_ne!(SubgroupConjClass::of(&a), SubgroupConjClass::of(&sub(&["aa"])));
    }

    #[test]
    fn core_comparison_by_hand() {
        // <a^2, b>: core has two vertices joined by a-edges, b-loop at one.
        // <a^2, aBA>... is <a^2, a b A>: same shape with the b-loop at the other vertex.
        let h1 = sub(&["aa", "b"]);
        let h2 = sub(&["aa", "abA"]);
        assert_eq!(SubgroupConjClass::of(&h1), SubgroupConjClass::of(&h2));
        let g = conjugator(&h1, &h2).unwrap();
        let c = h1.conjugate(&g);
        for x in h2.generators() {
            assert!(c.membership(&x));
        }
        for x in c.generators() {
            assert!(h2.membership(&x));
        }
    }

    #[test]
    fn normalizer_examples() {
        let rank2 = |s: &[&str]| fold(&s.iter().map(|x| Word::parse(x, 2).unwrap()).collect::<Vec<_>>(), 2);
        assert_eq!(normalizer_quotient(&rank2(&["a"])).unwrap().order(), 1);
        let nq = normalizer_quotient(&rank2(&["aa"])).unwrap();
        assert_eq!(nq.order(), 2);
        let h = rank2(&["aa"]);
        assert!(!h.membership(&nq.reps[1]));
        assert!(h.membership(&nq.reps[1].mul(&Word::parse("a", 2).unwrap())) || h.membership(&nq.reps[1].mul(&Word::parse("A", 2).unwrap())));
        assert_eq!(nq.table, vec![vec![0, 1], vec![1, 0]]);
        assert_eq!(normalizer_quotient(&rank2(&["a", "b"])).unwrap().order(), 1);
    }

    #[test]
    fn split_examples() {
        let rank2 = |s: &[&str]| fold(&s.iter().map(|x| Word::parse(x, 2).unwrap()).collect::<Vec<_>>(), 2);
        assert_eq!(split_conj_class(&rank2(&["a"]), &rank2(&["a", "b"])).unwrap().len(), 1);
        assert_eq!(split_conj_class(&rank2(&["a"]), &rank2(&["a", "baB"])).unwrap().len(), 2);
        assert!(split_conj_class(&rank2(&["b"]), &rank2(&["a"])).unwrap().is_empty());
    }

    #[test]
    fn good_pairs() {
        assert!(is_good_pair(&sub(&["a"]), &sub(&["b"])).unwrap());
        assert!(!is_good_pair(&sub(&["a"]), &sub(&["a"])).unwrap());
        assert!(is_good_pair(&sub(&["a"]), &sub(&["baB"])).unwrap());
        assert_eq!(is_good_pair(&sub(&[]), &sub(&["a"])), Err(StallingsError::TrivialSubgroup));
    }

    #[test]
    fn pair_examples() {
        let (a, b) = (sub(&["a"]), sub(&["b"]));
        assert!(pairs_equal((&a, &b), (&sub(&["caC"]), &sub(&["cbC"]))).unwrap());
        assert!(!pairs_equal((&a, &b), (&b, &a)).unwrap());
        assert!(pairs_equal((&a, &b), (&a, &sub(&["abA"]))).unwrap());
        assert_eq!(pairs_equal((&a, &a), (&a, &b)), Err(StallingsError::NotGoodPair));
    }

    #[test]
    fn pair_with_normalizer_orbit() {
        // L = <a^2, b a b^-1 ...>: exercise the N(L)/L loop with a nontrivial quotient
        let l1 = sub(&["aa"]);
        let l2 = sub(&["b"]);
        let k2 = sub(&["abA"]);
        // conjugating by a swaps the two vertices of the a^2-cycle
        assert!(pairs_equal((&l1, &l2), (&l1, &k2)).unwrap());
    }

    #[test]
    fn basis_inversion() {
        let imgs = vec![w("a"), w("ba"), w("cb")];
        let inv = express_in_images(&imgs, 3).unwrap();
        for (i, v) in inv.iter().enumerate() {
            assert_eq!(v.substitute(&imgs), Word::generator(i + 1, 3));
        }
        assert!(express_in_images(&[w("a"), w("bb"), w("c")], 3).is_none());
        assert!(express_in_images(&[w("a"), w("a"), w("c")], 3).is_none());
    }
}

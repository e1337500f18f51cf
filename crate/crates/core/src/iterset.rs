//! Iterated sets: rooted trees with ordered or unordered internal vertices
//! and atom-labeled leaves, their equivalences and automorphisms, and the
//! element-level Whitehead orbit oracle.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;

use crate::invariants::{describe_coord, AlgebraicLine, LineType};
use crate::stallings::{conj_tuple_equal, express_in_images, PairCoord, SubgroupConjClass, SubgroupGraph};
use crate::words::{conjugacy_class, CyclicWord, Word};

/// Leaf labels. Morphisms only exist between atoms of the same kind.
pub trait Atom: Clone + fmt::Debug {
    fn kind(&self) -> u32;
    fn equals(&self, other: &Self) -> bool;
}

impl Atom for CyclicWord {
    fn kind(&self) -> u32 {
        0
    }

    fn equals(&self, other: &Self) -> bool {
        self == other
    }
}

#[derive(Debug, Clone)]
pub enum Node<A> {
    Leaf(A),
    Set { ordered: bool, children: Vec<usize> },
}

/// Node `0` is the root and is always a set.
#[derive(Debug, Clone)]
pub struct IteratedSet<A> {
    nodes: Vec<Node<A>>,
}

/// Maps node ids of the source to node ids of the target.
pub type TreeIso = Vec<usize>;

/// Upper bound on enumerated isomorphisms.
pub const ENUM_CAP: usize = 100_000;

impl<A: Atom> IteratedSet<A> {
    pub fn new(ordered: bool) -> Self {
        IteratedSet { nodes: vec![Node::Set { ordered, children: vec![] }] }
    }

    pub fn of_leaves(ordered: bool, atoms: impl IntoIterator<Item = A>) -> Self {
        let mut x = Self::new(ordered);
        for a in atoms {
            x.add_leaf(0, a);
        }
        x
    }

    /// Grafts the parts as children of a fresh root.
    pub fn of_sets(ordered: bool, parts: impl IntoIterator<Item = IteratedSet<A>>) -> Self {
        let mut x = Self::new(ordered);
        for p in parts {
            x.graft(0, &p, 0);
        }
        x
    }

    fn graft(&mut self, parent: usize, src: &IteratedSet<A>, at: usize) {
        match &src.nodes[at] {
            Node::Leaf(a) => {
                self.add_leaf(parent, a.clone());
            }
            Node::Set { ordered, children } => {
                let id = self.add_set(parent, *ordered);
                for &c in children {
                    self.graft(id, src, c);
                }
            }
        }
    }

    fn push_child(&mut self, parent: usize, node: Node<A>) -> usize {
        let id = self.nodes.len();
        match &mut self.nodes[parent] {
            Node::Set { children, .. } => children.push(id),
            Node::Leaf(_) => panic!("node {parent} is a leaf"),
        }
        self.nodes.push(node);
        id
    }

    pub fn add_set(&mut self, parent: usize, ordered: bool) -> usize {
        self.push_child(parent, Node::Set { ordered, children: vec![] })
    }

    pub fn add_leaf(&mut self, parent: usize, atom: A) -> usize {
        self.push_child(parent, Node::Leaf(atom))
    }

    pub fn root(&self) -> usize {
        0
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.children(0).is_empty()
    }

    pub fn node(&self, i: usize) -> &Node<A> {
        &self.nodes[i]
    }

    pub fn children(&self, i: usize) -> &[usize] {
        match &self.nodes[i] {
            Node::Set { children, .. } => children,
            Node::Leaf(_) => &[],
        }
    }

    pub fn leaves(&self) -> Vec<usize> {
        (0..self.nodes.len()).filter(|&i| matches!(self.nodes[i], Node::Leaf(_))).collect()
    }

    pub fn atom(&self, i: usize) -> Option<&A> {
        match &self.nodes[i] {
            Node::Leaf(a) => Some(a),
            Node::Set { .. } => None,
        }
    }

    /// Copy of the subtree below a set vertex.
    pub fn subtree(&self, i: usize) -> IteratedSet<A> {
        let Node::Set { ordered, children } = &self.nodes[i] else { panic!("node {i} is a leaf") };
        let mut x = Self::new(*ordered);
        for &c in children {
            x.graft(0, self, c);
        }
        x
    }

    /// Shape signature: kinds, order flags and sorted child signatures.
    fn signatures(&self) -> Vec<String> {
        let mut sig = vec![String::new(); self.nodes.len()];
        for i in (0..self.nodes.len()).rev() {
            sig[i] = match &self.nodes[i] {
                Node::Leaf(a) => format!("L{}", a.kind()),
                Node::Set { ordered, children } => {
                    let mut cs: Vec<&str> = children.iter().map(|&c| sig[c].as_str()).collect();
                    if !ordered {
                        cs.sort_unstable();
                    }
                    format!("{}[{}]", if *ordered { 'O' } else { 'U' }, cs.join(","))
                }
            };
        }
        sig
    }

    pub fn render(&self, show: &dyn Fn(&A) -> String) -> String {
        let mut out = String::new();
        self.render_at(0, 0, show, &mut out);
        out
    }

    fn render_at(&self, i: usize, depth: usize, show: &dyn Fn(&A) -> String, out: &mut String) {
        let pad = "  ".repeat(depth);
        match &self.nodes[i] {
            Node::Leaf(a) => out.push_str(&format!("{pad}{}\n", show(a))),
            Node::Set { ordered, children } => {
                out.push_str(&format!("{pad}{}\n", if *ordered { "(ordered)" } else { "{unordered}" }));
                for &c in children {
                    self.render_at(c, depth + 1, show, out);
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Mode {
    /// Leaf labels must be equal.
    Equivalence,
    /// Leaf kinds must agree; consistency is checked globally afterwards.
    Morphism,
}

struct Matcher<'a, A> {
    x: &'a IteratedSet<A>,
    y: &'a IteratedSet<A>,
    sx: Vec<String>,
    sy: Vec<String>,
    mode: Mode,
    memo: HashMap<(usize, usize), bool>,
}

/// Kuhn's algorithm; `adj[i][j]` allows `i -> j`.
fn perfect_matching(adj: &[Vec<bool>]) -> Option<Vec<usize>> {
    let n = adj.len();
    let mut owner: Vec<Option<usize>> = vec![None; n];
    fn augment(i: usize, adj: &[Vec<bool>], seen: &mut [bool], owner: &mut [Option<usize>]) -> bool {
        for j in 0..adj.len() {
            if adj[i][j] && !seen[j] {
                seen[j] = true;
                if owner[j].is_none_or(|k| augment(k, adj, seen, owner)) {
                    owner[j] = Some(i);
                    return true;
                }
            }
        }
        false
    }
    for i in 0..n {
        if !augment(i, adj, &mut vec![false; n], &mut owner) {
            return None;
        }
    }
    let mut m = vec![0; n];
    for (j, o) in owner.iter().enumerate() {
        m[o.unwrap()] = j;
    }
    Some(m)
}

impl<'a, A: Atom> Matcher<'a, A> {
    fn new(x: &'a IteratedSet<A>, y: &'a IteratedSet<A>, mode: Mode) -> Self {
        Matcher { x, y, sx: x.signatures(), sy: y.signatures(), mode, memo: HashMap::new() }
    }

    fn eq(&mut self, u: usize, v: usize) -> bool {
        if self.sx[u] != self.sy[v] {
            return false;
        }
        if let Some(&b) = self.memo.get(&(u, v)) {
            return b;
        }
        let r = match (&self.x.nodes[u], &self.y.nodes[v]) {
            (Node::Leaf(a), Node::Leaf(b)) => self.mode == Mode::Morphism || a.equals(b),
            (Node::Set { ordered: true, children: cu }, Node::Set { children: cv, .. }) => {
                let (cu, cv) = (cu.clone(), cv.clone());
                cu.iter().zip(&cv).all(|(&a, &b)| self.eq(a, b))
            }
            (Node::Set { children: cu, .. }, Node::Set { children: cv, .. }) => {
                let (cu, cv) = (cu.clone(), cv.clone());
                perfect_matching(&self.adjacency(&cu, &cv)).is_some()
            }
            _ => false,
        };
        self.memo.insert((u, v), r);
        r
    }

    fn adjacency(&mut self, cu: &[usize], cv: &[usize]) -> Vec<Vec<bool>> {
        cu.iter().map(|&a| cv.iter().map(|&b| self.eq(a, b)).collect()).collect()
    }

    fn witness(&mut self, u: usize, v: usize, map: &mut TreeIso) {
        map[u] = v;
        let (cu, cv) = (self.x.children(u).to_vec(), self.y.children(v).to_vec());
        let ordered = matches!(self.x.nodes[u], Node::Set { ordered: true, .. });
        let m: Vec<usize> =
            if ordered { (0..cu.len()).collect() } else { perfect_matching(&self.adjacency(&cu, &cv)).unwrap() };
        for (i, &c) in cu.iter().enumerate() {
            self.witness(c, cv[m[i]], map);
        }
    }

    /// All isomorphisms of the subtrees at `u` and `v`, as pair lists.
    fn enumerate(&mut self, u: usize, v: usize) -> Vec<Vec<(usize, usize)>> {
        if !self.eq(u, v) {
            return vec![];
        }
        let (cu, cv) = (self.x.children(u).to_vec(), self.y.children(v).to_vec());
        if cu.is_empty() {
            return vec![vec![(u, v)]];
        }
        let ordered = matches!(self.x.nodes[u], Node::Set { ordered: true, .. });
        let mut out = Vec::new();
        let mut used = vec![false; cv.len()];
        let mut acc = vec![(u, v)];
        self.assign(&cu, &cv, 0, ordered, &mut used, &mut acc, &mut out);
        out
    }

    #[allow(clippy::too_many_arguments)]
    fn assign(
        &mut self,
        cu: &[usize],
        cv: &[usize],
        i: usize,
        ordered: bool,
        used: &mut [bool],
        acc: &mut Vec<(usize, usize)>,
        out: &mut Vec<Vec<(usize, usize)>>,
    ) {
        if out.len() >= ENUM_CAP {
            return;
        }
        if i == cu.len() {
            out.push(acc.clone());
            return;
        }
        let range: Vec<usize> = if ordered { vec![i] } else { (0..cv.len()).collect() };
        for j in range {
            if used[j] || !self.eq(cu[i], cv[j]) {
                continue;
            }
            used[j] = true;
            for sub in self.enumerate(cu[i], cv[j]) {
                let keep = acc.len();
                acc.extend(sub);
                self.assign(cu, cv, i + 1, ordered, used, acc, out);
                acc.truncate(keep);
                if out.len() >= ENUM_CAP {
                    break;
                }
            }
            used[j] = false;
        }
    }

    fn all(&mut self) -> Vec<TreeIso> {
        let n = self.x.len();
        self.enumerate(0, 0)
            .into_iter()
            .map(|pairs| {
                let mut m = vec![0; n];
                for (a, b) in pairs {
                    m[a] = b;
                }
                m
            })
            .collect()
    }
}

/// A label-preserving, order-preserving tree isomorphism, if one exists.
pub fn equivalent<A: Atom>(x: &IteratedSet<A>, y: &IteratedSet<A>) -> Option<TreeIso> {
    if x.len() != y.len() {
        return None;
    }
    let mut m = Matcher::new(x, y, Mode::Equivalence);
    if !m.eq(0, 0) {
        return None;
    }
    let mut map = vec![0; x.len()];
    m.witness(0, 0, &mut map);
    Some(map)
}

/// Every equivalence `x -> y`.
pub fn equivalences<A: Atom>(x: &IteratedSet<A>, y: &IteratedSet<A>) -> Vec<TreeIso> {
    if x.len() != y.len() {
        return vec![];
    }
    Matcher::new(x, y, Mode::Equivalence).all()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AutGroup {
    /// Sorted; the identity comes first.
    pub elements: Vec<TreeIso>,
    /// `table[i][j]` is the index of `elements[i] ∘ elements[j]`.
    pub table: Vec<Vec<usize>>,
}

impl AutGroup {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn inverse_of(&self, i: usize) -> Option<usize> {
        (0..self.order()).find(|&j| self.table[i][j] == 0 && self.table[j][i] == 0)
    }
}

pub fn compose_iso(g: &TreeIso, f: &TreeIso) -> TreeIso {
    f.iter().map(|&v| g[v]).collect()
}

pub fn automorphisms<A: Atom>(x: &IteratedSet<A>) -> AutGroup {
    let mut elements = equivalences(x, x);
    elements.sort();
    let index: BTreeMap<&TreeIso, usize> = elements.iter().enumerate().map(|(i, e)| (e, i)).collect();
    let table = elements
        .iter()
        .map(|g| elements.iter().map(|f| index[&compose_iso(g, f)]).collect())
        .collect();
    AutGroup { elements: elements.clone(), table }
}

fn consistent<A: Atom>(x: &IteratedSet<A>, y: &IteratedSet<A>, f: &TreeIso) -> bool {
    let ls = x.leaves();
    for (i, &l1) in ls.iter().enumerate() {
        for &l2 in &ls[i + 1..] {
            let (a1, a2) = (x.atom(l1).unwrap(), x.atom(l2).unwrap());
            if a1.kind() == a2.kind() && a1.equals(a2) && !y.atom(f[l1]).unwrap().equals(y.atom(f[l2]).unwrap()) {
                return false;
            }
        }
    }
    true
}

/// Tree isomorphisms that preserve kinds and orders and are consistent.
pub fn label_twist_candidates<A: Atom>(x: &IteratedSet<A>, y: &IteratedSet<A>) -> Vec<TreeIso> {
    if x.len() != y.len() {
        return vec![];
    }
    Matcher::new(x, y, Mode::Morphism).all().into_iter().filter(|f| consistent(x, y, f)).collect()
}

/// Decides whether one automorphism carries every source atom to its
/// partner. `None` when the atoms are outside the oracle's scope.
pub trait OrbitOracle<A> {
    fn same_orbit(&self, pairs: &[(&A, &A)]) -> Option<bool>;
}

/// Classical Whitehead oracle for tuples of conjugacy classes.
#[derive(Debug, Clone, Copy, Default)]
pub struct ElementOracle;

impl OrbitOracle<CyclicWord> for ElementOracle {
    fn same_orbit(&self, pairs: &[(&CyclicWord, &CyclicWord)]) -> Option<bool> {
        let a: Vec<CyclicWord> = pairs.iter().map(|p| p.0.clone()).collect();
        let b: Vec<CyclicWord> = pairs.iter().map(|p| p.1.clone()).collect();
        Some(whitehead_orbit(&a, &b).is_some())
    }
}

impl OrbitOracle<AtomRef> for ElementOracle {
    fn same_orbit(&self, pairs: &[(&AtomRef, &AtomRef)]) -> Option<bool> {
        let mut cw = Vec::new();
        for (a, b) in pairs {
            match (a, b) {
                (AtomRef::Axis(x), AtomRef::Axis(y)) => cw.push((x, y)),
                _ => return None,
            }
        }
        self.same_orbit(&cw)
    }
}

/// Whether some candidate `f` admits one automorphism moving every leaf
/// label onto the label of its image.
pub fn w_step<A: Atom>(x: &IteratedSet<A>, y: &IteratedSet<A>, oracle: &dyn OrbitOracle<A>) -> Option<bool> {
    let mut unknown = false;
    for f in label_twist_candidates(x, y) {
        let pairs: Vec<(&A, &A)> = x.leaves().iter().map(|&l| (x.atom(l).unwrap(), y.atom(f[l]).unwrap())).collect();
        match oracle.same_orbit(&pairs) {
            Some(true) => return Some(true),
            Some(false) => {}
            None => unknown = true,
        }
    }
    if unknown {
        None
    } else {
        Some(false)
    }
}

// ---------------------------------------------------------------- atoms of I_c

#[derive(Debug, Clone)]
pub enum AtomRef {
    Subgroup(SubgroupConjClass),
    Line(AlgebraicLine),
    GoodPair(SubgroupGraph, SubgroupGraph),
    Axis(CyclicWord),
    StrongAxis(SubgroupGraph, Word),
}

impl Atom for AtomRef {
    fn kind(&self) -> u32 {
        match self {
            AtomRef::Subgroup(_) => 0,
            AtomRef::Line(l) => match l.kind {
                LineType::PP => 1,
                LineType::PNP => 2,
                LineType::NPP => 3,
                LineType::NPNP => 4,
            },
            AtomRef::GoodPair(..) => 5,
            AtomRef::Axis(_) => 6,
            AtomRef::StrongAxis(..) => 7,
        }
    }

    fn equals(&self, other: &Self) -> bool {
        match (self, other) {
            (AtomRef::Subgroup(a), AtomRef::Subgroup(b)) => a == b,
            (AtomRef::Line(a), AtomRef::Line(b)) => a.kind == b.kind && conj_tuple_equal(&a.coords, &b.coords),
            (AtomRef::GoodPair(a1, a2), AtomRef::GoodPair(b1, b2)) => conj_tuple_equal(
                &[PairCoord::Sub(a1.clone()), PairCoord::Sub(a2.clone())],
                &[PairCoord::Sub(b1.clone()), PairCoord::Sub(b2.clone())],
            ),
            (AtomRef::Axis(a), AtomRef::Axis(b)) => a == b,
            (AtomRef::StrongAxis(h1, a1), AtomRef::StrongAxis(h2, a2)) => conj_tuple_equal(
                &[PairCoord::Sub(h1.clone()), PairCoord::Elem(a1.clone())],
                &[PairCoord::Sub(h2.clone()), PairCoord::Elem(a2.clone())],
            ),
            _ => false,
        }
    }
}

impl fmt::Display for AtomRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AtomRef::Subgroup(c) => write!(f, "{c}"),
            AtomRef::Line(l) => write!(f, "{}", l.describe()),
            AtomRef::GoodPair(a, b) => write!(
                f,
                "pair [{}, {}]",
                describe_coord(&PairCoord::Sub(a.clone())),
                describe_coord(&PairCoord::Sub(b.clone()))
            ),
            AtomRef::Axis(a) => write!(f, "axis {a}"),
            AtomRef::StrongAxis(h, a) => {
                write!(f, "strong axis [{}, {}]", describe_coord(&PairCoord::Sub(h.clone())), a)
            }
        }
    }
}

// ---------------------------------------------------------------- Whitehead

/// Automorphism of `F_n` given by basis images.
pub type Images = Vec<Word>;

pub fn identity_images(rank: usize) -> Images {
    (1..=rank).map(|i| Word::generator(i, rank)).collect()
}

/// `(g ∘ f)(x) = g(f(x))`.
pub fn compose_images(g: &Images, f: &Images) -> Images {
    f.iter().map(|w| w.substitute(g)).collect()
}

/// Permutations with inversions, then nontrivial moves `(A, a)`.
pub fn whitehead_moves(rank: usize) -> Vec<Images> {
    let mut out = Vec::new();
    let mut perm: Vec<usize> = (0..rank).collect();
    let mut perms = Vec::new();
    permutations(&mut perm, 0, &mut perms);
    for p in &perms {
        for signs in 0u32..(1 << rank) {
            let imgs: Images = (0..rank)
                .map(|i| {
                    let l = (p[i] + 1) as i32 * if signs >> i & 1 == 1 { -1 } else { 1 };
                    Word::reduce(&[l], rank).unwrap()
                })
                .collect();
            if imgs != identity_images(rank) {
                out.push(imgs);
            }
        }
    }
    for a in (1..=rank as i32).flat_map(|k| [k, -k]) {
        let others: Vec<i32> = (1..=rank as i32).filter(|&k| k != a.abs()).collect();
        for mask in 1u32..(1 << (2 * others.len())) {
            let inside = |l: i32| -> bool {
                if l == a {
                    return true;
                }
                if l.abs() == a.abs() {
                    return false;
                }
                let i = others.iter().position(|&k| k == l.abs()).unwrap();
                mask >> (2 * i + usize::from(l < 0)) & 1 == 1
            };
            let aw = Word::reduce(&[a], rank).unwrap();
            let imgs: Images = (1..=rank as i32)
                .map(|x| {
                    let xw = Word::generator(x as usize, rank);
                    if x.abs() == a.abs() {
                        return xw;
                    }
                    match (inside(x), inside(-x)) {
                        (true, false) => xw.mul(&aw),
                        (false, true) => aw.inverse().mul(&xw),
                        (true, true) => aw.inverse().mul(&xw).mul(&aw),
                        (false, false) => xw,
                    }
                })
                .collect();
            out.push(imgs);
        }
    }
    out
}

fn permutations(p: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
    if k == p.len() {
        out.push(p.clone());
        return;
    }
    for i in k..p.len() {
        p.swap(k, i);
        permutations(p, k + 1, out);
        p.swap(k, i);
    }
}

pub fn apply_tuple(images: &Images, t: &[CyclicWord]) -> Vec<CyclicWord> {
    t.iter().map(|c| conjugacy_class(&c.to_word().substitute(images)).expect("automorphisms preserve nontriviality")).collect()
}

fn total_len(t: &[CyclicWord]) -> usize {
    t.iter().map(|c| c.len()).sum()
}

/// Peak reduction: a tuple of minimal total length in the orbit and an
/// automorphism carrying the input to it.
pub fn minimize(t: &[CyclicWord]) -> (Vec<CyclicWord>, Images) {
    let rank = t.first().map(|c| c.rank()).unwrap_or(1);
    let moves = whitehead_moves(rank);
    let mut cur = t.to_vec();
    let mut acc = identity_images(rank);
    'outer: loop {
        let n = total_len(&cur);
        for m in &moves {
            let next = apply_tuple(m, &cur);
            if total_len(&next) < n {
                cur = next;
                acc = compose_images(m, &acc);
                continue 'outer;
            }
        }
        return (cur, acc);
    }
}

pub fn minimal_length(t: &[CyclicWord]) -> usize {
    total_len(&minimize(t).0)
}

/// An automorphism taking `t1` to `t2` coordinatewise, if one exists.
pub fn whitehead_orbit(t1: &[CyclicWord], t2: &[CyclicWord]) -> Option<Images> {
    if t1.len() != t2.len() {
        return None;
    }
    let Some(rank) = t1.first().map(|c| c.rank()) else { return Some(vec![]) };
    if t2.iter().any(|c| c.rank() != rank) {
        return None;
    }
    let (m1, a1) = minimize(t1);
    let (m2, a2) = minimize(t2);
    if total_len(&m1) != total_len(&m2) {
        return None;
    }
    let level = total_len(&m1);
    let moves = whitehead_moves(rank);
    let mut seen: HashMap<Vec<CyclicWord>, Images> = HashMap::new();
    seen.insert(m1.clone(), identity_images(rank));
    let mut queue = VecDeque::from([m1]);
    while let Some(cur) = queue.pop_front() {
        let path = seen[&cur].clone();
        if cur == m2 {
            let back = express_in_images(&a2, rank)?;
            return Some(compose_images(&back, &compose_images(&path, &a1)));
        }
        for m in &moves {
            let next = apply_tuple(m, &cur);
            if total_len(&next) == level && !seen.contains_key(&next) {
                seen.insert(next.clone(), compose_images(m, &path));
                queue.push_back(next);
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::HashSet;

    #[derive(Debug, Clone, PartialEq)]
    struct L(u32, u32);

    impl Atom for L {
        fn kind(&self) -> u32 {
            self.0
        }
        fn equals(&self, o: &Self) -> bool {
            self == o
        }
    }

    fn leaf(k: u32, v: u32) -> L {
        L(k, v)
    }

    #[test]
    fn equivalence_examples() {
        let x = IteratedSet::of_leaves(false, [leaf(0, 1), leaf(0, 1)]);
        let id = equivalent(&x, &x).unwrap();
        assert_eq!(id.len(), 3);
        let y = IteratedSet::of_leaves(false, [leaf(0, 1), leaf(0, 2)]);
        assert!(equivalent(&x, &y).is_none());
        assert!(label_twist_candidates(&x, &y).is_empty());
        let y2 = IteratedSet::of_leaves(false, [leaf(0, 2), leaf(0, 1)]);
        assert!(equivalent(&y, &y2).is_some());
        let oy = IteratedSet::of_leaves(true, [leaf(0, 1), leaf(0, 2)]);
        let oy2 = IteratedSet::of_leaves(true, [leaf(0, 2), leaf(0, 1)]);
        assert!(equivalent(&oy, &oy2).is_none());
    }

    #[test]
    fn automorphism_examples() {
        let x = IteratedSet::of_leaves(false, [leaf(0, 1), leaf(0, 1)]);
        assert_eq!(automorphisms(&x).order(), 2);
        let o = IteratedSet::of_leaves(true, [leaf(0, 1), leaf(0, 1), leaf(0, 1)]);
        assert_eq!(automorphisms(&o).order(), 1);
        // two leaves of equal kind but distinct labels
        let x2 = IteratedSet::of_leaves(false, [leaf(0, 1), leaf(0, 2)]);
        assert_eq!(automorphisms(&x2).order(), 1);
        assert_eq!(label_twist_candidates(&x2, &x2).len(), 2);
    }

    #[test]
    fn twist_candidates() {
        let x = IteratedSet::of_leaves(false, [leaf(0, 1), leaf(0, 2)]);
        let y = IteratedSet::of_leaves(false, [leaf(0, 2), leaf(0, 1)]);
        let c = label_twist_candidates(&x, &y);
        assert!(c.contains(&vec![0, 1, 2]));
        assert!(c.contains(&vec![0, 2, 1]));
        let z = IteratedSet::of_leaves(false, [leaf(0, 1), leaf(1, 1)]);
        assert!(label_twist_candidates(&x, &z).is_empty());
        let shallow = IteratedSet::of_leaves(false, [leaf(0, 1)]);
        assert!(label_twist_candidates(&x, &shallow).is_empty());
    }

    fn cw(s: &str) -> CyclicWord {
        CyclicWord::parse(s, 2).unwrap()
    }

    #[test]
    fn w_step_with_axes() {
        let x = IteratedSet::of_leaves(false, [cw("a")]);
        let y = IteratedSet::of_leaves(false, [cw("ab")]);
        assert_eq!(w_step(&x, &y, &ElementOracle), Some(true));
        let z = IteratedSet::of_leaves(false, [cw("aa")]);
        assert_eq!(w_step(&x, &z, &ElementOracle), Some(false));
    }

    #[test]
    fn whitehead_examples() {
        let id = whitehead_orbit(&[cw("a")], &[cw("a")]).unwrap();
        assert_eq!(apply_tuple(&id, &[cw("a")]), vec![cw("a")]);
        let w = whitehead_orbit(&[cw("ab")], &[cw("a")]).unwrap();
        assert_eq!(apply_tuple(&w, &[cw("ab")]), vec![cw("a")]);
        // the move b -> A b sends ab to b
        let mv = vec![Word::parse("a", 2).unwrap(), Word::parse("Ab", 2).unwrap()];
        assert_eq!(apply_tuple(&mv, &[cw("ab")]), vec![cw("b")]);
        assert!(whitehead_orbit(&[cw("aa")], &[cw("a")]).is_none());
        assert_eq!(minimal_length(&[cw("abAB")]), 4);
        assert_eq!(minimal_length(&[cw("abb")]), 1);
        assert_eq!(minimal_length(&[cw("aabb")]), 4);
        assert_eq!(minimal_length(&[cw("aab")]), 1);
    }

    #[test]
    fn whitehead_moves_are_automorphisms() {
        for r in 1..=3 {
            for m in whitehead_moves(r) {
                let inv = express_in_images(&m, r).expect("basis");
                assert_eq!(compose_images(&inv, &m), identity_images(r));
            }
        }
        // 2n·2^(2n-2) - 2n nontrivial moves of the second type, plus n!2^n - 1
        assert_eq!(whitehead_moves(2).len(), 7 + 4 * 4 - 4);
    }

    fn cyclic_words_up_to(n: usize) -> Vec<CyclicWord> {
        let mut all = HashSet::new();
        let mut layer = vec![Word::identity(2)];
        for _ in 0..n {
            let mut next = vec![];
            for w in &layer {
                for l in [1, -1, 2, -2] {
                    let v = w.mul(&Word::reduce(&[l], 2).unwrap());
                    if v.len() == w.len() + 1 {
                        if let Ok(c) = conjugacy_class(&v) {
                            all.insert(c);
                        }
                        next.push(v);
                    }
                }
            }
            layer = next;
        }
        let mut v: Vec<CyclicWord> = all.into_iter().collect();
        v.sort();
        v
    }

    /// Words reachable with at most three moves.
    fn ball(c: &CyclicWord, moves: &[Images]) -> HashSet<CyclicWord> {
        let mut seen = HashSet::from([c.clone()]);
        let mut frontier = vec![c.clone()];
        for _ in 0..3 {
            let mut next = vec![];
            for w in &frontier {
                for m in moves {
                    let v = apply_tuple(m, std::slice::from_ref(w)).pop().unwrap();
                    if seen.insert(v.clone()) {
                        next.push(v);
                    }
                }
            }
            frontier = next;
        }
        seen
    }

    #[test]
    fn whitehead_agrees_with_exhaustive_search() {
        let words = cyclic_words_up_to(4);
        let moves = whitehead_moves(2);
        let balls: Vec<HashSet<CyclicWord>> = words.iter().map(|w| ball(w, &moves)).collect();
        for (i, u) in words.iter().enumerate() {
            for (j, v) in words.iter().enumerate() {
                let brute = !balls[i].is_disjoint(&balls[j]);
                let got = whitehead_orbit(std::slice::from_ref(u), std::slice::from_ref(v));
                assert_eq!(got.is_some(), brute, "{u} vs {v}");
                if let Some(a) = got {
                    assert_eq!(apply_tuple(&a, std::slice::from_ref(u)), vec![v.clone()]);
                }
            }
        }
    }

    // ------------------------------------------------ random trees

    #[derive(Debug, Clone)]
    enum T {
        Leaf(u32),
        Set(bool, Vec<T>),
    }

    fn tree() -> impl Strategy<Value = T> {
        let leaf = (0u32..3).prop_map(T::Leaf);
        leaf.prop_recursive(3, 8, 3, |inner| {
            (any::<bool>(), prop::collection::vec(inner, 1..4)).prop_map(|(o, c)| T::Set(o, c))
        })
    }

    fn root_tree() -> impl Strategy<Value = T> {
        (any::<bool>(), prop::collection::vec(tree(), 1..4)).prop_map(|(o, c)| T::Set(o, c))
    }

    fn build(t: &T) -> IteratedSet<L> {
        fn go(x: &mut IteratedSet<L>, parent: usize, t: &T) {
            match t {
                T::Leaf(v) => {
                    x.add_leaf(parent, L(v % 2, *v));
                }
                T::Set(o, cs) => {
                    let id = x.add_set(parent, *o);
                    for c in cs {
                        go(x, id, c);
                    }
                }
            }
        }
        let T::Set(o, cs) = t else { unreachable!() };
        let mut x = IteratedSet::new(*o);
        for c in cs {
            go(&mut x, 0, c);
        }
        x
    }

    /// Canonical string: unordered children sorted.
    fn canon(t: &T) -> String {
        match t {
            T::Leaf(v) => format!("{v}"),
            T::Set(o, cs) => {
                let mut s: Vec<String> = cs.iter().map(canon).collect();
                if !o {
                    s.sort();
                }
                format!("{}({})", if *o { "o" } else { "u" }, s.join(" "))
            }
        }
    }

    /// Product formula over repeated identical children.
    fn aut_count(t: &T) -> usize {
        match t {
            T::Leaf(_) => 1,
            T::Set(o, cs) => {
                let mut n: usize = cs.iter().map(aut_count).product();
                if !o {
                    let mut mult: BTreeMap<String, usize> = BTreeMap::new();
                    for c in cs {
                        *mult.entry(canon(c)).or_default() += 1;
                    }
                    for k in mult.values() {
                        n *= (1..=*k).product::<usize>();
                    }
                }
                n
            }
        }
    }

    fn shuffle(t: &T, seed: u64) -> T {
        match t {
            T::Leaf(v) => T::Leaf(*v),
            T::Set(o, cs) => {
                let mut cs: Vec<T> = cs.iter().enumerate().map(|(i, c)| shuffle(c, seed.wrapping_mul(31).wrapping_add(i as u64))).collect();
                if !o && cs.len() > 1 {
                    let k = (seed % cs.len() as u64) as usize;
                    cs.rotate_left(k);
                    if seed.is_multiple_of(3) {
                        cs.reverse();
                    }
                }
                T::Set(*o, cs)
            }
        }
    }

    fn leaf_count(t: &T) -> usize {
        match t {
            T::Leaf(_) => 1,
            T::Set(_, cs) => cs.iter().map(leaf_count).sum(),
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn equivalence_matches_canonical_form(a in root_tree(), b in root_tree(), seed in any::<u64>()) {
            prop_assume!(leaf_count(&a) <= 8 && leaf_count(&b) <= 8);
            let (x, y) = (build(&a), build(&b));
            prop_assert_eq!(equivalent(&x, &y).is_some(), canon(&a) == canon(&b));
            let s = shuffle(&a, seed);
            let z = build(&s);
            let w = equivalent(&x, &z);
            prop_assert!(w.is_some());
            let w = w.unwrap();
            for l in x.leaves() {
                prop_assert_eq!(x.atom(l), z.atom(w[l]));
            }
            prop_assert!(equivalent(&z, &x).is_some());
        }

        #[test]
        fn automorphisms_match_product_formula(a in root_tree()) {
            prop_assume!(leaf_count(&a) <= 8);
            let x = build(&a);
            let g = automorphisms(&x);
            prop_assert_eq!(g.order(), aut_count(&a));
            prop_assert_eq!(&g.elements[0], &(0..x.len()).collect::<Vec<_>>());
            for i in 0..g.order() {
                prop_assert!(g.inverse_of(i).is_some());
                for j in 0..g.order() {
                    let k = g.table[i][j];
                    prop_assert_eq!(&compose_iso(&g.elements[i], &g.elements[j]), &g.elements[k]);
                }
            }
        }

        #[test]
        fn whitehead_symmetric_and_invariant(
            w in prop::collection::vec(prop::sample::select(vec![1i32, -1, 2, -2, 3, -3]), 1..6),
            m1 in 0usize..200, m2 in 0usize..200,
        ) {
            let word = Word::reduce(&w, 3).unwrap();
            prop_assume!(!word.cyclic_split().1.is_empty());
            let c = conjugacy_class(&word).unwrap();
            let moves = whitehead_moves(3);
            let a = compose_images(&moves[m2 % moves.len()], &moves[m1 % moves.len()]);
            let d = apply_tuple(&a, std::slice::from_ref(&c));
            prop_assert!(whitehead_orbit(std::slice::from_ref(&c), &d).is_some());
            prop_assert!(whitehead_orbit(&d, std::slice::from_ref(&c)).is_some());
            let sq = conjugacy_class(&word.pow(2)).unwrap();
            prop_assert_eq!(
                whitehead_orbit(std::slice::from_ref(&c), std::slice::from_ref(&sq)).is_some(),
                whitehead_orbit(std::slice::from_ref(&sq), std::slice::from_ref(&c)).is_some()
            );
        }
    }
}

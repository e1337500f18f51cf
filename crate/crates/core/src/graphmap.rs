//! Marked graphs, edge paths, tightening and graph self-maps.
//!
//! An oriented edge reference is a signed integer: `i + 1` is edge `i`
//! traversed forward, `-(i + 1)` the same edge reversed.

use std::collections::VecDeque;
use std::fmt;

use thiserror::Error;

use crate::stallings::express_in_images;
use crate::words::{least_rotation, CyclicWord, Word};

pub type EdgeRef = i32;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("path breaks at position {index}")]
    BrokenPath { index: usize },
    #[error("unknown edge {0:?}")]
    UnknownEdge(String),
    #[error("unknown vertex {0:?}")]
    UnknownVertex(String),
    #[error("graph is not connected")]
    Disconnected,
    #[error("tree edges do not form a spanning tree")]
    BadTree,
    #[error("no marking word for edge {0}")]
    MissingMarking(String),
    #[error("marking has rank {found}, graph has rank {expected}")]
    RankMismatch { expected: usize, found: usize },
    #[error("vertex {0} has valence one")]
    ValenceOne(String),
    #[error("image of edge {0} does not respect endpoints")]
    EndpointMismatch(String),
    #[error("image of edge {0} is not tight")]
    NotTight(String),
    #[error("map is not a homotopy equivalence")]
    NotHomotopyEquivalence,
    #[error("marking words do not form a basis")]
    BadMarking,
    #[error("trivial conjugacy class has no circuit")]
    EmptyWord,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub name: String,
    pub src: usize,
    pub dst: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarkedGraph {
    vertices: Vec<String>,
    edges: Vec<Edge>,
    tree: Vec<bool>,
    marking: Vec<Option<Word>>,
    rank: usize,
    /// `x_i` as a word in non-tree edge letters (edge index + 1).
    inverse_marking: Vec<Word>,
}

pub fn rev(e: EdgeRef) -> EdgeRef {
    -e
}

pub fn edge_index(e: EdgeRef) -> usize {
    e.unsigned_abs() as usize - 1
}

/// Free reduction of a sequence of edge references.
pub fn reduce_path(p: &[EdgeRef]) -> Vec<EdgeRef> {
    let mut out: Vec<EdgeRef> = Vec::with_capacity(p.len());
    for &e in p {
        if out.last() == Some(&-e) {
            out.pop();
        } else {
            out.push(e);
        }
    }
    out
}

pub fn reverse_path(p: &[EdgeRef]) -> Vec<EdgeRef> {
    p.iter().rev().map(|&e| -e).collect()
}

/// Removes cancelling pairs between the two ends of a tight closed path.
pub fn cyclic_tighten(p: &[EdgeRef]) -> Vec<EdgeRef> {
    let p = reduce_path(p);
    let mut i = 0;
    while 2 * i + 1 < p.len() && p[i] == -p[p.len() - 1 - i] {
        i += 1;
    }
    p[i..p.len() - i].to_vec()
}

impl MarkedGraph {
    pub fn new(
        vertices: Vec<String>,
        edges: Vec<Edge>,
        tree_edges: &[usize],
        marking: Vec<Option<Word>>,
        rank: usize,
    ) -> Result<MarkedGraph, GraphError> {
        let nv = vertices.len();
        let mut tree = vec![false; edges.len()];
        for &t in tree_edges {
            tree[t] = true;
        }
        // spanning tree check by union-find
        let mut parent: Vec<usize> = (0..nv).collect();
        fn find(p: &mut [usize], mut v: usize) -> usize {
            while p[v] != v {
                p[v] = p[p[v]];
                v = p[v];
            }
            v
        }
        for &t in tree_edges {
            let (a, b) = (find(&mut parent, edges[t].src), find(&mut parent, edges[t].dst));
            if a == b {
                return Err(GraphError::BadTree);
            }
            parent[a] = b;
        }
        if nv > 0 && tree_edges.len() + 1 != nv {
            return Err(GraphError::BadTree);
        }
        for e in &edges {
            let (a, b) = (find(&mut parent, e.src), find(&mut parent, e.dst));
            parent[a] = b;
        }
        let root = find(&mut parent, 0);
        if (0..nv).any(|v| find(&mut parent, v) != root) {
            return Err(GraphError::Disconnected);
        }
        let mut valence = vec![0usize; nv];
        for e in &edges {
            valence[e.src] += 1;
            valence[e.dst] += 1;
        }
        if let Some(v) = (0..nv).find(|&v| valence[v] < 2) {
            return Err(GraphError::ValenceOne(vertices[v].clone()));
        }
        let graph_rank = edges.len() + 1 - nv;
        if graph_rank != rank {
            return Err(GraphError::RankMismatch { expected: graph_rank, found: rank });
        }
        let mut images = Vec::new();
        let mut non_tree = Vec::new();
        for (i, e) in edges.iter().enumerate() {
            if tree[i] {
                continue;
            }
            let w = marking[i].clone().ok_or_else(|| GraphError::MissingMarking(e.name.clone()))?;
            if w.rank() != rank {
                return Err(GraphError::RankMismatch { expected: rank, found: w.rank() });
            }
            images.push(w);
            non_tree.push(i);
        }
        let inv = express_in_images(&images, rank).ok_or(GraphError::BadMarking)?;
        // rewrite y-letters (positions among non-tree edges) as edge letters
        let ne = edges.len();
        let inverse_marking = inv
            .iter()
            .map(|v| {
                let raw: Vec<i32> = v
                    .letters()
                    .iter()
                    .map(|&l| {
                        let e = non_tree[l.unsigned_abs() as usize - 1] as i32 + 1;
                        e * l.signum()
                    })
                    .collect();
                Word::reduce(&raw, ne).unwrap()
            })
            .collect();
        Ok(MarkedGraph { vertices, edges, tree, marking, rank, inverse_marking })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_tree_edge(&self, i: usize) -> bool {
        self.tree[i]
    }

    pub fn marking_word(&self, i: usize) -> Option<&Word> {
        self.marking[i].as_ref()
    }

    pub fn tree_edges(&self) -> Vec<usize> {
        (0..self.edges.len()).filter(|&i| self.tree[i]).collect()
    }

    pub fn src(&self, e: EdgeRef) -> usize {
        let ed = &self.edges[edge_index(e)];
        if e > 0 {
            ed.src
        } else {
            ed.dst
        }
    }

    pub fn dst(&self, e: EdgeRef) -> usize {
        self.src(-e)
    }

    pub fn edge_by_name(&self, name: &str) -> Option<EdgeRef> {
        self.edges.iter().position(|e| e.name == name).map(|i| i as i32 + 1)
    }

    pub fn vertex_by_name(&self, name: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v == name)
    }

    pub fn edge_name(&self, e: EdgeRef) -> String {
        let n = &self.edges[edge_index(e)].name;
        if e > 0 {
            n.clone()
        } else {
            n.to_uppercase()
        }
    }

    /// Parses single-letter edge names; uppercase reverses.
    pub fn parse_path(&self, text: &str) -> Result<Vec<EdgeRef>, GraphError> {
        let mut out = Vec::new();
        for ch in text.chars().filter(|c| !c.is_whitespace()) {
            let lower = ch.to_lowercase().to_string();
            let e = self.edge_by_name(&lower).ok_or_else(|| GraphError::UnknownEdge(ch.to_string()))?;
            out.push(if ch.is_uppercase() { -e } else { e });
        }
        Ok(out)
    }

    pub fn format_path(&self, p: &[EdgeRef]) -> String {
        if p.is_empty() {
            return "1".into();
        }
        p.iter().map(|&e| self.edge_name(e)).collect()
    }

    pub fn is_composable(&self, p: &[EdgeRef]) -> Result<(), GraphError> {
        for (i, w) in p.windows(2).enumerate() {
            if self.dst(w[0]) != self.src(w[1]) {
                return Err(GraphError::BrokenPath { index: i + 1 });
            }
        }
        Ok(())
    }

    pub fn tighten(&self, p: &[EdgeRef]) -> Result<Vec<EdgeRef>, GraphError> {
        self.is_composable(p)?;
        Ok(reduce_path(p))
    }

    /// Word in `F_n` read along a path through the marking.
    pub fn path_word(&self, p: &[EdgeRef]) -> Word {
        let mut out = Word::identity(self.rank);
        for &e in p {
            if let Some(w) = &self.marking[edge_index(e)] {
                out = if e > 0 { out.mul(w) } else { out.mul(&w.inverse()) };
            }
        }
        out
    }

    /// Tight path inside the spanning tree.
    pub fn tree_path(&self, from: usize, to: usize) -> Vec<EdgeRef> {
        let mut prev: Vec<Option<EdgeRef>> = vec![None; self.vertices.len()];
        let mut seen = vec![false; self.vertices.len()];
        seen[from] = true;
        let mut q = VecDeque::from([from]);
        while let Some(v) = q.pop_front() {
            for (i, e) in self.edges.iter().enumerate() {
                if !self.tree[i] {
                    continue;
                }
                for (r, a, b) in [(i as i32 + 1, e.src, e.dst), (-(i as i32 + 1), e.dst, e.src)] {
                    if a == v && !seen[b] {
                        seen[b] = true;
                        prev[b] = Some(r);
                        q.push_back(b);
                    }
                }
            }
        }
        let mut out = Vec::new();
        let mut v = to;
        while v != from {
            let e = prev[v].expect("tree is spanning");
            out.push(e);
            v = self.src(e);
        }
        out.reverse();
        out
    }

    /// Tight loop at vertex 0 whose word is `w`.
    pub fn loop_of(&self, w: &Word) -> Vec<EdgeRef> {
        let in_edges = w.substitute(&self.inverse_marking);
        let mut raw = Vec::new();
        let mut cur = 0;
        for &e in in_edges.letters() {
            raw.extend(self.tree_path(cur, self.src(e)));
            raw.push(e);
            cur = self.dst(e);
        }
        raw.extend(self.tree_path(cur, 0));
        reduce_path(&raw)
    }

    pub fn circuit_of(&self, cls: &CyclicWord) -> Result<Circuit, GraphError> {
        if cls.is_empty() {
            return Err(GraphError::EmptyWord);
        }
        Ok(Circuit::from_closed(&self.loop_of(&cls.to_word())))
    }
}

/// Oriented circuit stored in its least rotation.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Circuit {
    edges: Vec<EdgeRef>,
}

impl Circuit {
    pub fn from_closed(p: &[EdgeRef]) -> Circuit {
        Circuit { edges: least_rotation(&cyclic_tighten(p)) }
    }

    pub fn edges(&self) -> &[EdgeRef] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn reversed(&self) -> Circuit {
        Circuit::from_closed(&reverse_path(&self.edges))
    }

    pub fn display<'a>(&'a self, g: &'a MarkedGraph) -> impl fmt::Display + 'a {
        struct D<'a>(&'a Circuit, &'a MarkedGraph);
        impl fmt::Display for D<'_> {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "({})", self.1.format_path(&self.0.edges))
            }
        }
        D(self, g)
    }
}

/// Map between marked graphs sending each edge to a tight path.
#[derive(Debug, Clone)]
pub struct GraphMap {
    pub domain: MarkedGraph,
    pub codomain: MarkedGraph,
    vmap: Vec<usize>,
    images: Vec<Vec<EdgeRef>>,
}

impl GraphMap {
    pub fn new(
        domain: MarkedGraph,
        codomain: MarkedGraph,
        vmap: Vec<usize>,
        images: Vec<Vec<EdgeRef>>,
    ) -> Result<GraphMap, GraphError> {
        for (i, e) in domain.edges.iter().enumerate() {
            let img = &images[i];
            codomain.is_composable(img).map_err(|_| GraphError::EndpointMismatch(e.name.clone()))?;
            if reduce_path(img).len() != img.len() {
                return Err(GraphError::NotTight(e.name.clone()));
            }
            let ok = match (img.first(), img.last()) {
                (Some(&a), Some(&b)) => codomain.src(a) == vmap[e.src] && codomain.dst(b) == vmap[e.dst],
                _ => vmap[e.src] == vmap[e.dst],
            };
            if !ok {
                return Err(GraphError::EndpointMismatch(e.name.clone()));
            }
        }
        Ok(GraphMap { domain, codomain, vmap, images })
    }

    pub fn image(&self, e: EdgeRef) -> Vec<EdgeRef> {
        let img = &self.images[edge_index(e)];
        if e > 0 {
            img.clone()
        } else {
            reverse_path(img)
        }
    }

    pub fn vertex_image(&self, v: usize) -> usize {
        self.vmap[v]
    }

    pub fn map_path(&self, p: &[EdgeRef]) -> Vec<EdgeRef> {
        let mut raw = Vec::new();
        for &e in p {
            raw.extend(self.image(e));
        }
        reduce_path(&raw)
    }

    pub fn compose(&self, inner: &GraphMap) -> GraphMap {
        let images = (0..inner.domain.edges.len()).map(|i| self.map_path(&inner.images[i])).collect();
        let vmap = inner.vmap.iter().map(|&v| self.vmap[v]).collect();
        GraphMap { domain: inner.domain.clone(), codomain: self.codomain.clone(), vmap, images }
    }

    pub fn lipschitz(&self) -> usize {
        self.images.iter().map(|i| i.len()).max().unwrap_or(0)
    }
}

/// Bounded cancellation bound: total length of edge images.
pub fn bcc(h: &GraphMap) -> usize {
    h.images.iter().map(|i| i.len()).sum()
}

/// Self-map of a marked graph.
#[derive(Debug, Clone)]
pub struct GraphSelfMap {
    map: GraphMap,
}

impl GraphSelfMap {
    pub fn new(graph: MarkedGraph, vmap: Vec<usize>, images: Vec<Vec<EdgeRef>>) -> Result<Self, GraphError> {
        let map = GraphMap::new(graph.clone(), graph, vmap, images)?;
        Ok(GraphSelfMap { map })
    }

    pub fn graph(&self) -> &MarkedGraph {
        &self.map.domain
    }

    pub fn as_map(&self) -> &GraphMap {
        &self.map
    }

    pub fn image(&self, e: EdgeRef) -> Vec<EdgeRef> {
        self.map.image(e)
    }

    pub fn map_path(&self, p: &[EdgeRef]) -> Vec<EdgeRef> {
        self.map.map_path(p)
    }

    pub fn iterate(&self, p: &[EdgeRef], k: usize) -> Vec<EdgeRef> {
        let mut cur = reduce_path(p);
        for _ in 0..k {
            cur = self.map_path(&cur);
        }
        cur
    }

    pub fn map_circuit(&self, c: &Circuit) -> Circuit {
        Circuit::from_closed(&self.map_path(c.edges()))
    }

    pub fn iterate_length(&self, e: EdgeRef, k: usize) -> usize {
        self.iterate(&[e], k).len()
    }

    pub fn compose(&self, inner: &GraphSelfMap) -> GraphSelfMap {
        GraphSelfMap { map: self.map.compose(&inner.map) }
    }

    /// Images of the basis under the induced automorphism.
    pub fn induced_automorphism(&self) -> Result<Vec<Word>, GraphError> {
        let g = self.graph();
        let images: Vec<Word> = (1..=g.rank)
            .map(|i| g.path_word(&self.map_path(&g.loop_of(&Word::generator(i, g.rank)))))
            .collect();
        if express_in_images(&images, g.rank).is_none() {
            return Err(GraphError::NotHomotopyEquivalence);
        }
        Ok(images)
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    /// Rose on `names` with the identity marking.
    pub fn rose(names: &[&str]) -> MarkedGraph {
        let n = names.len();
        let edges = names.iter().map(|s| Edge { name: s.to_string(), src: 0, dst: 0 }).collect();
        let marking = (1..=n).map(|i| Some(Word::generator(i, n))).collect();
        MarkedGraph::new(vec!["v".into()], edges, &[], marking, n).unwrap()
    }

    #[test]
    fn tighten_examples() {
        let g = rose(&["a", "b"]);
        let p = g.parse_path("aAb").unwrap();
        assert_eq!(g.format_path(&g.tighten(&p).unwrap()), "b");
        let t = g.parse_path("abAB").unwrap();
        assert_eq!(g.tighten(&t).unwrap(), t);
    }

    #[test]
    fn broken_path() {
        // two vertices joined by x, y; loop z at v0
        let edges = vec![
            Edge { name: "x".into(), src: 0, dst: 1 },
            Edge { name: "y".into(), src: 1, dst: 0 },
            Edge { name: "z".into(), src: 0, dst: 0 },
        ];
        let marking = vec![None, Some(Word::generator(1, 2)), Some(Word::generator(2, 2))];
        let g = MarkedGraph::new(vec!["u".into(), "v".into()], edges, &[0], marking, 2).unwrap();
        let p = g.parse_path("xx").unwrap();
        assert_eq!(g.tighten(&p), Err(GraphError::BrokenPath { index: 1 }));
        assert_eq!(g.path_word(&g.parse_path("xyz").unwrap()).to_string(), "ab");
        // subdivided rose: class [ab] traverses x y z
        let c = g.circuit_of(&CyclicWord::parse("ab", 2).unwrap()).unwrap();
        assert_eq!(c, Circuit::from_closed(&g.parse_path("xyz").unwrap()));
    }

    #[test]
    fn circuit_on_rose() {
        let g = rose(&["a", "b"]);
        let c = g.circuit_of(&CyclicWord::parse("a", 2).unwrap()).unwrap();
        assert_eq!(c.edges(), &[1]);
        let c = g.circuit_of(&CyclicWord::parse("bAB", 2).unwrap()).unwrap();
        assert_eq!(c.edges(), &[-1]);
    }

    #[test]
    fn induced_automorphism_of_rose_map() {
        let g = rose(&["a", "b"]);
        let f = GraphSelfMap::new(g.clone(), vec![0], vec![vec![1], vec![2, 1]]).unwrap();
        let imgs = f.induced_automorphism().unwrap();
        assert_eq!(imgs[1].to_string(), "ba");
        let bad = GraphSelfMap::new(g, vec![0], vec![vec![1, 1], vec![2]]).unwrap();
        assert_eq!(bad.induced_automorphism(), Err(GraphError::NotHomotopyEquivalence));
    }

    #[test]
    fn bcc_bounds() {
        let g = rose(&["a", "b"]);
        let h = GraphMap::new(g.clone(), g, vec![0], vec![vec![1, 2, 2, 2], vec![2]]).unwrap();
        assert!(bcc(&h) >= 3);
    }
}

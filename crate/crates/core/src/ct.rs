//! Completely split train track data for polynomially growing maps.
//!
//! Every edge maps as `f(E) = E·u` with `u` a closed path below `E` in the
//! filtration. Vertices are fixed.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::Ratio;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::graphmap::{
    edge_index, reduce_path, reverse_path, Circuit, Edge, EdgeRef, GraphError, GraphSelfMap, MarkedGraph,
};
use crate::words::{primitive_period, Word};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CtError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("invalid CT: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
    #[error("declared class of edge {edge} does not match its image")]
    ClassificationError { edge: String },
    #[error("path {0} is not completely split")]
    NotSplit(String),
    #[error("no polynomial fits the growth of {0}")]
    NotPolynomial(String),
    #[error("edge {0} is not a higher order edge")]
    NotHigherOrder(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Violation {
    #[error("image of {edge} does not begin with {edge}")]
    ImagePrefix { edge: String },
    #[error("u of {edge} is not a closed path")]
    TailNotClosed { edge: String },
    #[error("u of {edge} not in lower filtration")]
    TailNotLower { edge: String },
    #[error("edge {edge} declared {declared} but its image is {found}")]
    Classification { edge: String, declared: String, found: String },
    #[error("twist path {twist} is not a Nielsen path")]
    TwistNotNielsen { twist: String },
    #[error("twist path {twist} is not root-free")]
    TwistNotRootFree { twist: String },
    #[error("twist path {twist} is not a closed path at the terminal vertex of {edge}")]
    TwistBase { twist: String, edge: String },
    #[error("twist paths {a} and {b} determine the same unoriented circuit")]
    DuplicateTwist { a: String, b: String },
    #[error("linear edges {a} and {b} share degree {degree}")]
    EqualDegrees { a: String, b: String, degree: i64 },
    #[error("map is not a homotopy equivalence")]
    NotHomotopyEquivalence,
    #[error("u of {edge} has no complete splitting")]
    NotSplit { edge: String },
    #[error("growth of {edge} is not polynomial")]
    NotPolynomial { edge: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EdgeClass {
    Fixed,
    Linear { twist: usize, degree: i64 },
    Higher,
}

impl EdgeClass {
    fn label(&self) -> &'static str {
        match self {
            EdgeClass::Fixed => "fixed",
            EdgeClass::Linear { .. } => "linear",
            EdgeClass::Higher => "higher",
        }
    }
}

/// A term of a complete splitting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Edge(EdgeRef),
    /// `E w^power Ē`
    Inp { edge: usize, power: i64 },
    /// `E_first w^power Ē_last`
    Exceptional { first: usize, power: i64, last: usize },
}

impl Term {
    pub fn inverse(self) -> Term {
        match self {
            Term::Edge(e) => Term::Edge(-e),
            Term::Inp { edge, power } => Term::Inp { edge, power: -power },
            Term::Exceptional { first, power, last } => Term::Exceptional { first: last, power: -power, last: first },
        }
    }
}

pub fn invert_terms(ts: &[Term]) -> Vec<Term> {
    ts.iter().rev().map(|t| t.inverse()).collect()
}

/// Integer valued polynomial with rational coefficients, lowest degree first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrowthPolynomial {
    pub coeffs: Vec<Ratio<i64>>,
    pub k0: usize,
}

impl GrowthPolynomial {
    pub fn eval(&self, k: i64) -> Ratio<i64> {
        let x = Ratio::from_integer(k);
        self.coeffs.iter().rev().fold(Ratio::zero(), |acc, c| acc * x + c)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.iter().rposition(|c| !c.is_zero()).unwrap_or(0)
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

impl fmt::Display for GrowthPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let den = self.coeffs.iter().fold(1i64, |l, c| l / gcd(l, *c.denom()) * c.denom());
        let nums: Vec<i64> = self.coeffs.iter().map(|c| (c * den).to_integer()).collect();
        let mut parts = String::new();
        for (i, &n) in nums.iter().enumerate().rev() {
            if n == 0 {
                continue;
            }
            let mag = n.abs();
            let body = match i {
                0 => mag.to_string(),
                _ => {
                    let var = if i == 1 { "k".to_string() } else { format!("k^{i}") };
                    if mag == 1 {
                        var
                    } else {
                        format!("{mag}{var}")
                    }
                }
            };
            if parts.is_empty() {
                if n < 0 {
                    parts.push('-');
                }
            } else {
                parts.push_str(if n < 0 { " - " } else { " + " });
            }
            parts.push_str(&body);
        }
        if parts.is_empty() {
            parts.push('0');
        }
        if den == 1 {
            write!(f, "{parts}")
        } else {
            write!(f, "({parts})/{den}")
        }
    }
}

#[derive(Debug, Clone)]
pub struct CtData {
    map: GraphSelfMap,
    order: Vec<usize>,
    height: Vec<usize>,
    class: Vec<EdgeClass>,
    twists: Vec<Vec<EdgeRef>>,
    tails: Vec<Vec<EdgeRef>>,
    prefixed: Vec<bool>,
    splits: Vec<Option<Vec<Term>>>,
    /// Last edge of `f^k_#(E)` for `k <= depth`.
    last_tab: Vec<Vec<EdgeRef>>,
}

/// Partition of the edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Classification {
    pub fixed: Vec<usize>,
    pub linear: Vec<usize>,
    pub higher: Vec<usize>,
}

impl CtData {
    pub fn from_parts(
        graph: MarkedGraph,
        images: Vec<Vec<EdgeRef>>,
        order: Vec<usize>,
        class: Vec<EdgeClass>,
        twists: Vec<Vec<EdgeRef>>,
    ) -> Result<CtData, CtError> {
        let ne = graph.edge_count();
        let vmap: Vec<usize> = (0..graph.vertices().len()).collect();
        let mut sorted = order.clone();
        sorted.sort();
        if sorted != (0..ne).collect::<Vec<_>>() {
            return Err(CtError::Parse { line: 0, message: "order must list every edge exactly once".into() });
        }
        let mut height = vec![0; ne];
        for (h, &e) in order.iter().enumerate() {
            height[e] = h;
        }
        let mut tails = Vec::with_capacity(ne);
        let mut prefixed = Vec::with_capacity(ne);
        for (i, img) in images.iter().enumerate() {
            let e = i as EdgeRef + 1;
            if img.first() == Some(&e) {
                tails.push(img[1..].to_vec());
                prefixed.push(true);
            } else {
                tails.push(img.clone());
                prefixed.push(false);
            }
        }
        let map = GraphSelfMap::new(graph, vmap, images)?;
        let depth = 2 * ne;
        let mut ct = CtData {
            map,
            order,
            height,
            class,
            twists,
            tails,
            prefixed,
            splits: vec![None; ne],
            last_tab: (0..ne).map(|i| vec![i as EdgeRef + 1; depth + 1]).collect(),
        };
        for h in 0..ne {
            let e = ct.order[h];
            let tail = ct.tails[e].clone();
            let lower = tail.iter().all(|&x| ct.height[edge_index(x)] < h);
            if !lower || !ct.prefixed[e] {
                continue;
            }
            if let Ok(s) = ct.complete_splitting(&tail) {
                if let Some(&last) = s.last() {
                    for k in 1..=depth {
                        ct.last_tab[e][k] = ct.last_of(last, k - 1);
                    }
                }
                ct.splits[e] = Some(s);
            }
        }
        Ok(ct)
    }

    pub fn graph(&self) -> &MarkedGraph {
        self.map.graph()
    }

    pub fn map(&self) -> &GraphSelfMap {
        &self.map
    }

    pub fn edge_count(&self) -> usize {
        self.graph().edge_count()
    }

    pub fn rank(&self) -> usize {
        self.graph().rank()
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn height(&self, e: usize) -> usize {
        self.height[e]
    }

    pub fn class(&self, e: usize) -> EdgeClass {
        self.class[e]
    }

    pub fn twist_loops(&self) -> &[Vec<EdgeRef>] {
        &self.twists
    }

    pub fn twist_loop(&self, t: usize) -> &[EdgeRef] {
        &self.twists[t]
    }

    pub fn twist_circuit(&self, t: usize) -> Circuit {
        Circuit::from_closed(&self.twists[t])
    }

    pub fn tail(&self, e: usize) -> &[EdgeRef] {
        &self.tails[e]
    }

    pub fn tail_split(&self, e: usize) -> &[Term] {
        self.splits[e].as_deref().expect("validated CT has split tails")
    }

    pub fn name(&self, e: EdgeRef) -> String {
        self.graph().edge_name(e)
    }

    pub fn edge(&self, name: &str) -> Option<usize> {
        self.graph().edge_by_name(name).map(edge_index)
    }

    pub fn degree(&self, e: usize) -> Option<i64> {
        match self.class[e] {
            EdgeClass::Linear { degree, .. } => Some(degree),
            _ => None,
        }
    }

    pub fn twist_of(&self, e: usize) -> Option<usize> {
        match self.class[e] {
            EdgeClass::Linear { twist, .. } => Some(twist),
            _ => None,
        }
    }

    pub fn is_fixed(&self, e: usize) -> bool {
        self.class[e] == EdgeClass::Fixed
    }

    pub fn is_linear(&self, e: usize) -> bool {
        matches!(self.class[e], EdgeClass::Linear { .. })
    }

    pub fn is_higher(&self, e: usize) -> bool {
        self.class[e] == EdgeClass::Higher
    }

    fn by_order(&self, pred: impl Fn(usize) -> bool) -> Vec<usize> {
        self.order.iter().copied().filter(|&e| pred(e)).collect()
    }

    pub fn fixed_edges(&self) -> Vec<usize> {
        self.by_order(|e| self.is_fixed(e))
    }

    pub fn linear_edges(&self) -> Vec<usize> {
        self.by_order(|e| self.is_linear(e))
    }

    pub fn higher_edges(&self) -> Vec<usize> {
        self.by_order(|e| self.is_higher(e))
    }

    /// Linear edges whose twist path is `t`, in filtration order.
    pub fn family(&self, t: usize) -> Vec<usize> {
        self.by_order(|e| self.twist_of(e) == Some(t))
    }

    pub fn format_path(&self, p: &[EdgeRef]) -> String {
        self.graph().format_path(p)
    }

    pub fn parse_path(&self, text: &str) -> Result<Vec<EdgeRef>, CtError> {
        Ok(self.graph().parse_path(text)?)
    }

    pub fn map_path(&self, p: &[EdgeRef]) -> Vec<EdgeRef> {
        self.map.map_path(p)
    }

    pub fn iterate(&self, p: &[EdgeRef], k: usize) -> Vec<EdgeRef> {
        self.map.iterate(p, k)
    }

    /// `|f^k_#(E)|`, summing `|f^j_#(u)|` for `j < k`.
    pub fn iterate_length(&self, e: EdgeRef, k: usize) -> usize {
        let i = edge_index(e);
        if !self.prefixed[i] {
            return self.map.iterate_length(e, k);
        }
        let mut total = 1;
        let mut cur = self.tails[i].clone();
        for _ in 0..k {
            total += cur.len();
            cur = self.map_path(&cur);
        }
        total
    }

    // ---- terms ----

    pub fn term_path(&self, t: Term) -> Vec<EdgeRef> {
        match t {
            Term::Edge(e) => vec![e],
            Term::Inp { edge, power } => self.linear_path(edge, power, edge),
            Term::Exceptional { first, power, last } => self.linear_path(first, power, last),
        }
    }

    fn linear_path(&self, first: usize, power: i64, last: usize) -> Vec<EdgeRef> {
        let w = &self.twists[self.twist_of(first).expect("linear edge")];
        let mut p = vec![first as EdgeRef + 1];
        let piece = if power >= 0 { w.clone() } else { reverse_path(w) };
        for _ in 0..power.unsigned_abs() {
            p.extend_from_slice(&piece);
        }
        p.push(-(last as EdgeRef + 1));
        p
    }

    pub fn terms_path(&self, ts: &[Term]) -> Vec<EdgeRef> {
        ts.iter().flat_map(|&t| self.term_path(t)).collect()
    }

    pub fn term_len(&self, t: Term) -> usize {
        match t {
            Term::Edge(_) => 1,
            Term::Inp { edge, power } | Term::Exceptional { first: edge, power, .. } => {
                2 + self.twists[self.twist_of(edge).unwrap()].len() * power.unsigned_abs() as usize
            }
        }
    }

    pub fn format_term(&self, t: Term) -> String {
        self.format_path(&self.term_path(t))
    }

    pub fn format_terms(&self, ts: &[Term]) -> String {
        if ts.is_empty() {
            return "1".into();
        }
        ts.iter().map(|&t| self.format_term(t)).collect::<Vec<_>>().join("·")
    }

    pub fn is_growing(&self, t: Term) -> bool {
        match t {
            Term::Edge(e) => !self.is_fixed(edge_index(e)),
            Term::Inp { .. } => false,
            Term::Exceptional { .. } => true,
        }
    }

    /// Exceptional, or a linear edge in either orientation.
    pub fn is_linear_term(&self, t: Term) -> bool {
        match t {
            Term::Edge(e) => self.is_linear(edge_index(e)),
            Term::Inp { .. } => false,
            Term::Exceptional { .. } => true,
        }
    }

    /// Term of `ℰ_f` (forward) or `ℰ_f^-1` (backward); returns the sign.
    pub fn higher_sign(&self, t: Term) -> Option<(usize, bool)> {
        match t {
            Term::Edge(e) if self.is_higher(edge_index(e)) => Some((edge_index(e), e > 0)),
            _ => None,
        }
    }

    /// The complete splitting of `f_#(t)` inherited termwise.
    pub fn term_image(&self, t: Term) -> Vec<Term> {
        match t {
            Term::Edge(e) => {
                let i = edge_index(e);
                if self.is_fixed(i) {
                    return vec![t];
                }
                let s = self.tail_split(i);
                if e > 0 {
                    let mut out = vec![t];
                    out.extend_from_slice(s);
                    out
                } else {
                    let mut out = invert_terms(s);
                    out.push(t);
                    out
                }
            }
            Term::Inp { .. } => vec![t],
            Term::Exceptional { first, power, last } => {
                let d = self.degree(first).unwrap() - self.degree(last).unwrap();
                vec![Term::Exceptional { first, power: power + d, last }]
            }
        }
    }

    pub fn terms_image(&self, ts: &[Term]) -> Vec<Term> {
        ts.iter().flat_map(|&t| self.term_image(t)).collect()
    }

    pub fn iterate_terms(&self, ts: &[Term], k: usize) -> Vec<Term> {
        let mut cur = ts.to_vec();
        for _ in 0..k {
            cur = self.terms_image(&cur);
        }
        cur
    }

    fn depth(&self) -> usize {
        self.last_tab.first().map(|v| v.len() - 1).unwrap_or(0)
    }

    fn last_of(&self, t: Term, k: usize) -> EdgeRef {
        match t {
            Term::Edge(e) if e > 0 => self.last_tab[edge_index(e)][k],
            Term::Edge(e) => e,
            Term::Inp { edge, .. } => -(edge as EdgeRef + 1),
            Term::Exceptional { last, .. } => -(last as EdgeRef + 1),
        }
    }

    fn first_of(&self, t: Term, k: usize) -> EdgeRef {
        -self.last_of(t.inverse(), k)
    }

    /// No cancellation between `f^k_#` images for `k <= 2·#edges`.
    fn legal_turn(&self, a: Term, b: Term) -> bool {
        (0..=self.depth()).all(|k| self.last_of(a, k) != -self.first_of(b, k))
    }

    fn candidates(&self, p: &[EdgeRef], i: usize) -> Vec<(Term, usize)> {
        let mut out = Vec::new();
        let e = p[i];
        if e > 0 {
            let ei = edge_index(e);
            if let EdgeClass::Linear { twist, degree } = self.class[ei] {
                let w = &self.twists[twist];
                let wr = reverse_path(w);
                let count = |piece: &[EdgeRef]| {
                    let mut k = 0;
                    let m = piece.len();
                    while m > 0 && i + 1 + (k + 1) * m <= p.len() && p[i + 1 + k * m..i + 1 + (k + 1) * m] == *piece {
                        k += 1;
                    }
                    k
                };
                let kp = count(w) as i64;
                let km = count(&wr) as i64;
                let mut powers: Vec<i64> = (1..=kp).rev().collect();
                powers.extend((1..=km).rev().map(|k| -k));
                powers.push(0);
                powers.sort_by_key(|k| std::cmp::Reverse(k.unsigned_abs()));
                for k in powers {
                    let at = i + 1 + k.unsigned_abs() as usize * w.len();
                    if at >= p.len() || p[at] >= 0 {
                        continue;
                    }
                    let ej = edge_index(p[at]);
                    let Some(dj) = self.degree(ej) else { continue };
                    if self.twist_of(ej) != Some(twist) {
                        continue;
                    }
                    let t = if ej == ei {
                        if k == 0 {
                            continue;
                        }
                        Term::Inp { edge: ei, power: k }
                    } else if dj.signum() == degree.signum() {
                        Term::Exceptional { first: ei, power: k, last: ej }
                    } else {
                        continue;
                    };
                    out.push((t, at + 1 - i));
                }
            }
        }
        out.push((Term::Edge(e), 1));
        out
    }

    fn split_from(&self, p: &[EdgeRef], i: usize, prev: Option<Term>, out: &mut Vec<Term>) -> bool {
        if i == p.len() {
            return true;
        }
        for (t, len) in self.candidates(p, i) {
            if let Some(q) = prev {
                if !self.legal_turn(q, t) {
                    continue;
                }
            }
            // single edges of a lower edge need their own splittings
            if let Term::Edge(e) = t {
                let ei = edge_index(e);
                if !self.is_fixed(ei) && self.splits[ei].is_none() {
                    continue;
                }
            }
            out.push(t);
            if self.split_from(p, i + len, Some(t), out) {
                return true;
            }
            out.pop();
        }
        false
    }

    pub fn complete_splitting(&self, p: &[EdgeRef]) -> Result<Vec<Term>, CtError> {
        if self.graph().is_composable(p).is_err() || reduce_path(p).len() != p.len() {
            return Err(CtError::NotSplit(self.format_path(p)));
        }
        let mut out = Vec::new();
        if self.split_from(p, 0, None, &mut out) {
            Ok(out)
        } else {
            Err(CtError::NotSplit(self.format_path(p)))
        }
    }

    /// Partition into `ρ_0 σ_1 ρ_1 … σ_q ρ_q` with single growing `σ_i`.
    pub fn coarsen(&self, ts: &[Term]) -> (Vec<Vec<Term>>, Vec<Term>) {
        let mut rhos = vec![vec![]];
        let mut sigmas = vec![];
        for &t in ts {
            if self.is_growing(t) {
                sigmas.push(t);
                rhos.push(vec![]);
            } else {
                rhos.last_mut().unwrap().push(t);
            }
        }
        (rhos, sigmas)
    }

    // ---- classification ----

    pub fn classify_edges(&self) -> Result<Classification, CtError> {
        let mut c = Classification { fixed: vec![], linear: vec![], higher: vec![] };
        for &e in &self.order {
            let found = self.computed_class(e);
            let same = match (found, self.class[e]) {
                (EdgeClass::Fixed, EdgeClass::Fixed) | (EdgeClass::Higher, EdgeClass::Higher) => true,
                (a, b) => a == b,
            };
            if !same {
                return Err(CtError::ClassificationError { edge: self.name(e as EdgeRef + 1) });
            }
            match found {
                EdgeClass::Fixed => c.fixed.push(e),
                EdgeClass::Linear { .. } => c.linear.push(e),
                EdgeClass::Higher => c.higher.push(e),
            }
        }
        Ok(c)
    }

    fn computed_class(&self, e: usize) -> EdgeClass {
        let u = &self.tails[e];
        if u.is_empty() && self.prefixed[e] {
            return EdgeClass::Fixed;
        }
        for (t, w) in self.twists.iter().enumerate() {
            if let Some(d) = power_of(u, w) {
                if d != 0 {
                    return EdgeClass::Linear { twist: t, degree: d };
                }
            }
        }
        EdgeClass::Higher
    }

    // ---- growth ----

    pub fn growth_polynomial_edge(&self, e: EdgeRef) -> Result<GrowthPolynomial, CtError> {
        fit_growth(|k| self.iterate_length(e, k), self.rank(), 2 * self.edge_count())
            .ok_or_else(|| CtError::NotPolynomial(self.name(e)))
    }

    pub fn growth_polynomial_circuit(&self, c: &Circuit) -> Result<GrowthPolynomial, CtError> {
        let mut lens = vec![c.len()];
        let mut cur = c.clone();
        let lens_fn = |k: usize| {
            while lens.len() <= k {
                cur = self.map.map_circuit(&cur);
                lens.push(cur.len());
            }
            lens[k]
        };
        fit_growth(lens_fn, self.rank(), 2 * self.edge_count())
            .ok_or_else(|| CtError::NotPolynomial(self.format_path(c.edges())))
    }

    fn first_growing(&self, ts: &[Term]) -> Option<Term> {
        ts.iter().copied().find(|&t| self.is_growing(t))
    }

    fn last_growing(&self, ts: &[Term]) -> Option<Term> {
        ts.iter().rev().copied().find(|&t| self.is_growing(t))
    }

    /// Least `M >= 1` after which first and last growing terms of every growing
    /// term type leave `ℰ_f^-1` and `ℰ_f` respectively.
    pub fn stabilization_constant(&self) -> usize {
        let cap = 4 * self.edge_count() + 4;
        let mut m_all = 1;
        for e in 0..self.edge_count() {
            if self.is_fixed(e) {
                continue;
            }
            for t in [Term::Edge(e as EdgeRef + 1), Term::Edge(-(e as EdgeRef + 1))] {
                let (mut first, mut last) = (t, t);
                let mut m = 1;
                loop {
                    first = self.first_growing(&self.term_image(first)).unwrap();
                    last = self.last_growing(&self.term_image(last)).unwrap();
                    let bad_first = matches!(self.higher_sign(first), Some((_, false)));
                    let bad_last = matches!(self.higher_sign(last), Some((_, true)));
                    if (!bad_first && !bad_last) || m >= cap {
                        break;
                    }
                    m += 1;
                }
                m_all = m_all.max(m);
            }
        }
        m_all
    }

    /// `f^k` with the same filtration and twist paths.
    pub fn power(&self, k: usize) -> Result<CtData, CtError> {
        assert!(k >= 1);
        let ne = self.edge_count();
        let images: Vec<Vec<EdgeRef>> = (0..ne).map(|i| self.iterate(&[i as EdgeRef + 1], k)).collect();
        let class = self
            .class
            .iter()
            .map(|c| match *c {
                EdgeClass::Linear { twist, degree } => EdgeClass::Linear { twist, degree: degree * k as i64 },
                other => other,
            })
            .collect();
        CtData::from_parts(self.graph().clone(), images, self.order.clone(), class, self.twists.clone())
    }

    /// Images of the basis under the represented automorphism.
    pub fn automorphism(&self) -> Vec<Word> {
        self.map.induced_automorphism().expect("validated CT is a homotopy equivalence")
    }
}

/// `u = w^d` as paths.
fn power_of(u: &[EdgeRef], w: &[EdgeRef]) -> Option<i64> {
    if w.is_empty() {
        return None;
    }
    if u.is_empty() {
        return Some(0);
    }
    let m = w.len();
    if !u.len().is_multiple_of(m) {
        return None;
    }
    let wr = reverse_path(w);
    if u.chunks(m).all(|c| c == w) {
        Some((u.len() / m) as i64)
    } else if u.chunks(m).all(|c| c == wr.as_slice()) {
        Some(-((u.len() / m) as i64))
    } else {
        None
    }
}

/// Fits `len(k)` by a polynomial of degree at most `n`, confirmed on
/// `2(n+2)` further points, for the least `k0 <= max_k0`.
pub fn fit_growth(mut len: impl FnMut(usize) -> usize, n: usize, max_k0: usize) -> Option<GrowthPolynomial> {
    let window = n + 1 + 2 * (n + 2);
    for k0 in 0..=max_k0 {
        let vals: Vec<i64> = (k0..k0 + window).map(|k| len(k) as i64).collect();
        let mut diffs = vals.clone();
        let mut table = vec![diffs[0]];
        for _ in 0..=n {
            diffs = diffs.windows(2).map(|w| w[1] - w[0]).collect();
            table.push(diffs[0]);
        }
        if diffs.iter().any(|&d| d != 0) {
            continue;
        }
        // P(k) = sum_j Δ^j C(k - k0, j)
        let mut coeffs = vec![Ratio::<i64>::zero(); n + 1];
        let mut basis = vec![Ratio::<i64>::one()];
        for (j, &dj) in table.iter().take(n + 1).enumerate() {
            for (i, c) in basis.iter().enumerate() {
                coeffs[i] += c * dj;
            }
            // basis *= (k - k0 - j) / (j + 1)
            let shift = Ratio::from_integer(-((k0 + j) as i64));
            let mut next = vec![Ratio::zero(); basis.len() + 1];
            for (i, c) in basis.iter().enumerate() {
                next[i + 1] += c;
                next[i] += c * shift;
            }
            let scale = Ratio::new(1, (j + 1) as i64);
            basis = next.into_iter().map(|c| c * scale).collect();
        }
        while coeffs.len() > 1 && coeffs.last().unwrap().is_zero() {
            coeffs.pop();
        }
        return Some(GrowthPolynomial { coeffs, k0 });
    }
    None
}

/// Checks every listed axiom; an empty list means valid.
pub fn validate_ct(ct: &CtData) -> Vec<Violation> {
    let mut v = Vec::new();
    let g = ct.graph();
    let name = |e: usize| ct.name(e as EdgeRef + 1);
    for &e in &ct.order {
        if !ct.prefixed[e] {
            v.push(Violation::ImagePrefix { edge: name(e) });
            continue;
        }
        let u = &ct.tails[e];
        let end = g.dst(e as EdgeRef + 1);
        if let (Some(&a), Some(&b)) = (u.first(), u.last()) {
            if g.src(a) != end || g.dst(b) != end {
                v.push(Violation::TailNotClosed { edge: name(e) });
            }
        }
        if u.iter().any(|&x| ct.height[edge_index(x)] >= ct.height[e]) {
            v.push(Violation::TailNotLower { edge: name(e) });
        }
        let found = ct.computed_class(e);
        let declared = ct.class[e];
        if found != declared {
            let show = |c: EdgeClass| match c {
                EdgeClass::Linear { twist, degree } => {
                    format!("linear(twist={}, degree={degree})", ct.format_path(&ct.twists[twist]))
                }
                other => other.label().to_string(),
            };
            v.push(Violation::Classification { edge: name(e), declared: show(declared), found: show(found) });
        }
    }
    for (t, w) in ct.twists.iter().enumerate() {
        let tname = ct.format_path(w);
        if primitive_period(w) != w.len() {
            v.push(Violation::TwistNotRootFree { twist: tname.clone() });
        }
        if ct.map_path(w) != *w {
            v.push(Violation::TwistNotNielsen { twist: tname.clone() });
        }
        let closed = g.is_composable(w).is_ok() && !w.is_empty() && g.src(w[0]) == g.dst(*w.last().unwrap());
        for e in ct.family(t) {
            if !closed || g.src(w[0]) != g.dst(e as EdgeRef + 1) {
                v.push(Violation::TwistBase { twist: tname.clone(), edge: name(e) });
            }
        }
        for s in 0..t {
            let c1 = Circuit::from_closed(w);
            let c2 = Circuit::from_closed(&ct.twists[s]);
            if c1 == c2 || c1 == c2.reversed() {
                v.push(Violation::DuplicateTwist { a: ct.format_path(&ct.twists[s]), b: tname.clone() });
            }
        }
        let fam = ct.family(t);
        for (i, &a) in fam.iter().enumerate() {
            for &b in &fam[i + 1..] {
                if ct.degree(a) == ct.degree(b) {
                    v.push(Violation::EqualDegrees { a: name(a), b: name(b), degree: ct.degree(a).unwrap() });
                }
            }
        }
    }
    if ct.map.induced_automorphism().is_err() {
        v.push(Violation::NotHomotopyEquivalence);
    }
    if !v.is_empty() {
        return v;
    }
    for &e in &ct.order {
        if ct.splits[e].is_none() {
            v.push(Violation::NotSplit { edge: name(e) });
        }
    }
    if !v.is_empty() {
        return v;
    }
    for &e in &ct.order {
        if ct.growth_polynomial_edge(e as EdgeRef + 1).is_err() {
            v.push(Violation::NotPolynomial { edge: name(e) });
        }
    }
    v
}

fn perr(line: usize, message: impl Into<String>) -> CtError {
    CtError::Parse { line, message: message.into() }
}

/// Parses the text format without checking CT axioms.
pub fn parse_ct(text: &str) -> Result<CtData, CtError> {
    struct RawEdge {
        line: usize,
        name: String,
        src: String,
        dst: String,
        fields: BTreeMap<String, String>,
    }
    let mut rank = None;
    let mut vertices: Vec<String> = Vec::new();
    let mut raw: Vec<RawEdge> = Vec::new();
    let mut order: Option<(usize, Vec<String>)> = None;
    let mut marking: Option<(usize, Vec<String>, Vec<(String, String)>)> = None;
    for (ln, line) in text.lines().enumerate() {
        let ln = ln + 1;
        let line = line.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let mut toks = line.split_whitespace();
        let key = toks.next().unwrap();
        let rest: Vec<&str> = toks.collect();
        match key {
            "rank" => {
                let r = rest.first().and_then(|s| s.parse::<usize>().ok()).ok_or_else(|| perr(ln, "bad rank"))?;
                rank = Some(r);
            }
            "vertices" => vertices = rest.iter().map(|s| s.to_string()).collect(),
            "edge" => {
                if rest.len() < 3 {
                    return Err(perr(ln, "edge needs a name, source and target"));
                }
                let name = rest[0].to_string();
                if name.len() != 1 || !name.chars().all(|c| c.is_ascii_lowercase()) {
                    return Err(perr(ln, format!("edge name {name:?} must be one lowercase letter")));
                }
                let mut fields = BTreeMap::new();
                for f in &rest[3..] {
                    let (k, val) = f.split_once('=').ok_or_else(|| perr(ln, format!("expected key=value, found {f:?}")))?;
                    fields.insert(k.to_string(), val.to_string());
                }
                raw.push(RawEdge { line: ln, name, src: rest[1].into(), dst: rest[2].into(), fields });
            }
            "order" => order = Some((ln, rest.iter().map(|s| s.to_string()).collect())),
            "marking" => {
                let mut tree = Vec::new();
                let mut words = Vec::new();
                let mut in_words = false;
                for t in rest {
                    if t == "words:" {
                        in_words = true;
                    } else if let Some(list) = t.strip_prefix("tree=") {
                        tree = list.split(',').filter(|s| !s.is_empty()).map(|s| s.to_string()).collect();
                    } else if in_words {
                        let (e, w) = t.split_once('=').ok_or_else(|| perr(ln, format!("expected edge=word, found {t:?}")))?;
                        words.push((e.to_string(), w.to_string()));
                    } else {
                        return Err(perr(ln, format!("unexpected {t:?}")));
                    }
                }
                marking = Some((ln, tree, words));
            }
            other => return Err(perr(ln, format!("unknown directive {other:?}"))),
        }
    }
    let rank = rank.ok_or_else(|| perr(0, "missing rank"))?;
    let vid = |s: &str, ln: usize| vertices.iter().position(|v| v == s).ok_or_else(|| perr(ln, format!("unknown vertex {s:?}")));
    let mut edges = Vec::new();
    for r in &raw {
        if edges.iter().any(|e: &Edge| e.name == r.name) {
            return Err(perr(r.line, format!("duplicate edge {}", r.name)));
        }
        edges.push(Edge { name: r.name.clone(), src: vid(&r.src, r.line)?, dst: vid(&r.dst, r.line)? });
    }
    let index = |s: &str, ln: usize| edges.iter().position(|e| e.name == s).ok_or_else(|| perr(ln, format!("unknown edge {s:?}")));
    let (mln, tree_names, word_list) = marking.ok_or_else(|| perr(0, "missing marking"))?;
    let mut tree = Vec::new();
    for t in &tree_names {
        tree.push(index(t, mln)?);
    }
    let mut mark = vec![None; edges.len()];
    for (e, w) in &word_list {
        let i = index(e, mln)?;
        mark[i] = Some(Word::parse(w, rank).map_err(|err| perr(mln, err.to_string()))?);
    }
    let graph = MarkedGraph::new(vertices.clone(), edges.clone(), &tree, mark, rank)
        .map_err(|err| perr(mln, err.to_string()))?;
    let (oln, onames) = order.ok_or_else(|| perr(0, "missing order"))?;
    let mut ord = Vec::new();
    for n in &onames {
        ord.push(index(n, oln)?);
    }
    let mut images = Vec::new();
    let mut class = Vec::new();
    let mut twists: Vec<Vec<EdgeRef>> = Vec::new();
    for r in &raw {
        let img = r.fields.get("image").ok_or_else(|| perr(r.line, "missing image"))?;
        let p = graph.parse_path(img).map_err(|err| perr(r.line, err.to_string()))?;
        images.push(p);
        let c = match r.fields.get("class").map(String::as_str) {
            Some("fixed") => EdgeClass::Fixed,
            Some("higher") => EdgeClass::Higher,
            Some("linear") => {
                let tw = r.fields.get("twist").ok_or_else(|| perr(r.line, "linear edge needs twist="))?;
                let deg = r.fields.get("degree").ok_or_else(|| perr(r.line, "linear edge needs degree="))?;
                let degree: i64 = deg.parse().map_err(|_| perr(r.line, format!("bad degree {deg:?}")))?;
                if degree == 0 {
                    return Err(perr(r.line, "degree must be nonzero"));
                }
                let w = graph.parse_path(tw).map_err(|err| perr(r.line, err.to_string()))?;
                let t = match twists.iter().position(|x| *x == w) {
                    Some(t) => t,
                    None => {
                        twists.push(w);
                        twists.len() - 1
                    }
                };
                EdgeClass::Linear { twist: t, degree }
            }
            Some(other) => return Err(perr(r.line, format!("unknown class {other:?}"))),
            None => return Err(perr(r.line, "missing class=")),
        };
        class.push(c);
    }
    CtData::from_parts(graph, images, ord, class, twists).map_err(|err| match err {
        CtError::Graph(GraphError::EndpointMismatch(e)) | CtError::Graph(GraphError::NotTight(e)) => {
            let ln = raw.iter().find(|r| r.name == e).map(|r| r.line).unwrap_or(0);
            perr(ln, format!("image of {e} is not a tight path with the right endpoints"))
        }
        CtError::Parse { line: 0, message } => perr(oln, message),
        other => other,
    })
}

/// Parses and validates.
pub fn load_ct(text: &str) -> Result<CtData, CtError> {
    let ct = parse_ct(text)?;
    let v = validate_ct(&ct);
    if v.is_empty() {
        Ok(ct)
    } else {
        Err(CtError::Invalid(v))
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub const RUNNING: &str = include_str!("../../../data/running.ct");
    pub const FIXED_EDGE: &str = include_str!("../../../data/fixed_edge.ct");

    pub fn running() -> CtData {
        load_ct(RUNNING).unwrap()
    }

    fn e(ct: &CtData, n: &str) -> EdgeRef {
        ct.edge(n).unwrap() as EdgeRef + 1
    }

    #[test]
    fn running_example_is_valid() {
        assert_eq!(validate_ct(&running()), vec![]);
        assert_eq!(validate_ct(&parse_ct(FIXED_EDGE).unwrap()), vec![]);
    }

    #[test]
    fn corrupted_tail_reported() {
        let bad = RUNNING.replace("image=ba ", "image=bab ");
        let v = validate_ct(&parse_ct(&bad).unwrap());
        assert!(v.contains(&Violation::TailNotLower { edge: "b".into() }), "{v:?}");
    }

    #[test]
    fn classification_matches_declaration() {
        let ct = running();
        let c = ct.classify_edges().unwrap();
        let names = |v: &[usize]| v.iter().map(|&i| ct.name(i as EdgeRef + 1)).collect::<Vec<_>>().join("");
        assert_eq!(names(&c.fixed), "a");
        assert_eq!(names(&c.linear), "bp");
        assert_eq!(names(&c.higher), "cdeq");
        let fe = load_ct(FIXED_EDGE).unwrap();
        let c = fe.classify_edges().unwrap();
        let names = |v: &[usize]| v.iter().map(|&i| fe.name(i as EdgeRef + 1)).collect::<Vec<_>>().join("");
        assert_eq!(names(&c.fixed), "ae");
        assert_eq!(names(&c.linear), "b");
        assert_eq!(names(&c.higher), "cdfg");
    }

    #[test]
    fn map_path_examples() {
        let ct = running();
        let q = e(&ct, "q");
        assert_eq!(ct.format_path(&ct.map_path(&[q])), "qc");
        assert_eq!(ct.format_path(&ct.iterate(&[q], 3)), "qccbcbba");
        let a = e(&ct, "a");
        assert_eq!(ct.map_path(&[a]), vec![a]);
        let qcb = ct.parse_path("qccb").unwrap();
        assert_eq!(ct.graph().tighten(&qcb).unwrap(), qcb);
    }

    #[test]
    fn iterate_length_matches_direct_iteration() {
        let ct = running();
        let q = e(&ct, "q");
        assert_eq!(ct.iterate_length(q, 0), 1);
        assert_eq!(ct.iterate_length(q, 2), 4);
        assert_eq!((1000 + 50 + 6) / 6, 176);
        assert_eq!(ct.iterate_length(q, 10), 176);
        assert_eq!(ct.iterate(&[q], 10).len(), 176);
    }

    #[test]
    fn splitting_examples() {
        let ct = running();
        let s = ct.complete_splitting(&ct.parse_path("qc").unwrap()).unwrap();
        assert_eq!(s, vec![Term::Edge(e(&ct, "q")), Term::Edge(e(&ct, "c"))]);
        let s = ct.complete_splitting(&ct.parse_path("bab").unwrap()).unwrap();
        assert_eq!(s.len(), 3);
        let s = ct.complete_splitting(&ct.parse_path("baB").unwrap()).unwrap();
        assert_eq!(s, vec![Term::Inp { edge: ct.edge("b").unwrap(), power: 1 }]);
        let s = ct.complete_splitting(&ct.parse_path("pAAB").unwrap()).unwrap();
        assert_eq!(s, vec![Term::Exceptional { first: ct.edge("p").unwrap(), power: -2, last: ct.edge("b").unwrap() }]);
        // b·a·a·P: degrees 1 and 2 share sign; exceptional
        let s = ct.complete_splitting(&ct.parse_path("baaP").unwrap()).unwrap();
        assert_eq!(s.len(), 1);
    }

    #[test]
    fn bab_splitting_survives_iteration() {
        // oracle: concatenating the termwise images stays tight for 10 iterates
        let ct = running();
        let p = ct.parse_path("bab").unwrap();
        let s = ct.complete_splitting(&p).unwrap();
        let mut cur = s.clone();
        for _ in 0..10 {
            cur = ct.terms_image(&cur);
            let path = ct.terms_path(&cur);
            assert_eq!(reduce_path(&path), path);
        }
    }

    #[test]
    fn growth_examples() {
        let ct = running();
        let g = ct.growth_polynomial_edge(e(&ct, "q")).unwrap();
        assert_eq!(g.k0, 0);
        assert_eq!(g.to_string(), "(k^3 + 5k + 6)/6");
        assert_eq!(ct.growth_polynomial_edge(e(&ct, "a")).unwrap().to_string(), "1");
        assert_eq!(ct.growth_polynomial_edge(e(&ct, "b")).unwrap().to_string(), "k + 1");
        for k in 0..=30 {
            assert_eq!(g.eval(k as i64), Ratio::from_integer(ct.iterate_length(e(&ct, "q"), k) as i64));
        }
    }

    #[test]
    fn stabilization_examples() {
        // oracle: iterate c̄ directly; the first growing term of f(C) is B (not
        // in ℰ_f^-1), so one step suffices for C; q̄ needs two
        let ct = running();
        let qbar = -e(&ct, "q");
        let first = |k: usize| {
            let s = ct.complete_splitting(&ct.iterate(&[qbar], k)).unwrap();
            *s.iter().find(|&&t| ct.is_growing(t)).unwrap()
        };
        assert_eq!(first(1), Term::Edge(-e(&ct, "c")));
        assert_eq!(first(2), Term::Edge(-e(&ct, "b")));
        assert_eq!(ct.stabilization_constant(), 2);
        assert_eq!(load_ct(FIXED_EDGE).unwrap().stabilization_constant(), 1);
    }

    #[test]
    fn power_doubles_degrees() {
        let ct = running();
        let c2 = ct.power(2).unwrap();
        assert_eq!(validate_ct(&c2), vec![]);
        assert_eq!(c2.degree(ct.edge("p").unwrap()), Some(4));
        assert_eq!(c2.iterate_length(e(&ct, "q"), 3), ct.iterate_length(e(&ct, "q"), 6));
    }
}

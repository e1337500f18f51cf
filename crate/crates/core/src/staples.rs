//! Visible lines along an eigenray, translation numbers and staple pairs.

use std::collections::BTreeMap;

use crate::ct::{CtData, Term};
use crate::graphmap::{edge_index, reverse_path};
use crate::invariants::{eigenray, line_between, ray_partial_order, twist_class, InvariantError, Line, RayOrder};
use crate::words::CyclicWord;

/// The coarsened splitting `R_E = E·ρ_0·σ_1·ρ_1·σ_2·…` to some depth.
#[derive(Debug, Clone)]
pub struct RaySplitting {
    pub edge: usize,
    /// `rhos[i]` is `ρ_i`.
    pub rhos: Vec<Vec<Term>>,
    /// `sigmas[i - 1]` is `σ_i`.
    pub sigmas: Vec<Term>,
}

impl RaySplitting {
    pub fn new(ct: &CtData, e: usize, min_sigmas: usize) -> Result<RaySplitting, InvariantError> {
        eigenray(ct, e)?;
        let mut cur = ct.tail_split(e).to_vec();
        let mut ts = cur.clone();
        loop {
            let (rhos, sigmas) = ct.coarsen(&ts);
            if sigmas.len() >= min_sigmas {
                return Ok(RaySplitting { edge: e, rhos, sigmas });
            }
            cur = ct.terms_image(&cur);
            ts.extend_from_slice(&cur);
        }
    }

    pub fn sigma(&self, i: usize) -> Term {
        self.sigmas[i - 1]
    }

    /// `ℓ_i = (R_i^-)^-1 ρ_i R_{i+1}^+`.
    pub fn line(&self, ct: &CtData, i: usize) -> Line {
        line_between(ct, self.sigma(i), &self.rhos[i], self.sigma(i + 1))
    }
}

fn growing(ct: &CtData, ts: &[Term]) -> usize {
    ts.iter().filter(|&&t| ct.is_growing(t)).count()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VisibleLine {
    pub ray: usize,
    pub index: usize,
    pub line: Line,
}

pub fn visible_lines(ct: &CtData, e: usize, count: usize) -> Result<Vec<VisibleLine>, InvariantError> {
    if count == 0 {
        eigenray(ct, e)?;
        return Ok(vec![]);
    }
    let rs = RaySplitting::new(ct, e, count + 1)?;
    Ok((1..=count).map(|i| VisibleLine { ray: e, index: i, line: rs.line(ct, i) }).collect())
}

/// `p = g(u)`: the index with `f_#(ρ_0) ⊂ ρ_p`.
pub fn base_index(ct: &CtData, e: usize) -> usize {
    growing(ct, ct.tail_split(e))
}

/// `j` with `f_#(ℓ_i) = ℓ_j`.
pub fn forward_index(ct: &CtData, e: usize, i: usize) -> Result<usize, InvariantError> {
    let rs = RaySplitting::new(ct, e, i.max(1))?;
    Ok(forward_in(ct, &rs, i))
}

fn forward_in(ct: &CtData, rs: &RaySplitting, i: usize) -> usize {
    base_index(ct, rs.edge) + (1..=i).map(|k| growing(ct, &ct.term_image(rs.sigma(k)))).sum::<usize>()
}

/// `B(r)`: the index of `Φ^{2M}(ℓ_p)`.
pub fn staple_bound(ct: &CtData, e: usize) -> Result<usize, InvariantError> {
    let m = ct.stabilization_constant();
    let mut i = base_index(ct, e);
    for _ in 0..2 * m {
        i = forward_index(ct, e, i)?;
    }
    Ok(i)
}

fn is_topmost(po: &RayOrder, e: usize, l: &Line) -> bool {
    !l.is_periodic() && (po.is_minimal(e) || l.eigen_ends().iter().any(|&x| po.covers(x, e)))
}

/// `τ(φ, r)`: topmost lines among `ℓ_1 … ℓ_p`.
pub fn translation_number(ct: &CtData, e: usize) -> Result<usize, InvariantError> {
    let po = ray_partial_order(ct);
    let p = base_index(ct, e);
    Ok(visible_lines(ct, e, p)?.iter().filter(|v| is_topmost(&po, e, &v.line)).count())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StapleKind {
    QuasiExceptional,
    Exceptional,
    Linear,
    LinearInverse,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StaplePair {
    pub ray: usize,
    /// Smallest visible index.
    pub index: usize,
    pub lines: (Line, Line),
    pub axis: CyclicWord,
    pub kind: StapleKind,
    /// `m_b(φ)`.
    pub m: i64,
}

impl StaplePair {
    pub fn describe(&self, ct: &CtData) -> String {
        format!("({}, {})", self.lines.0.display(ct), self.lines.1.display(ct))
    }
}

/// Linear edge of a forward linear edge term.
fn linear_forward(ct: &CtData, t: Term) -> Option<usize> {
    match t {
        Term::Edge(x) if x > 0 && ct.is_linear(edge_index(x)) => Some(edge_index(x)),
        _ => None,
    }
}

fn linear_backward(ct: &CtData, t: Term) -> Option<usize> {
    match t {
        Term::Edge(x) if x < 0 && ct.is_linear(edge_index(x)) => Some(edge_index(x)),
        _ => None,
    }
}

/// `σ_i ρ_i σ_{i+1} = E' w^q Ē''` with degrees of opposite signs.
fn quasi_exceptional(ct: &CtData, rs: &RaySplitting, i: usize) -> Option<(usize, usize)> {
    let e1 = linear_forward(ct, rs.sigma(i))?;
    let e2 = linear_backward(ct, rs.sigma(i + 1))?;
    let t = ct.twist_of(e1)?;
    if ct.twist_of(e2) != Some(t) || e1 == e2 {
        return None;
    }
    let (d1, d2) = (ct.degree(e1)?, ct.degree(e2)?);
    if d1.signum() == d2.signum() {
        return None;
    }
    let rho = ct.terms_path(&rs.rhos[i]);
    let w = ct.twist_loop(t);
    let wr = reverse_path(w);
    let ok = rho.is_empty()
        || rho.len().is_multiple_of(w.len()) && (rho.chunks(w.len()).all(|c| c == w) || rho.chunks(w.len()).all(|c| c == wr));
    ok.then_some((e1, e2))
}

/// Visible staple pairs of `R_E` with index at most `B(r)`, one per pair of lines.
pub fn staple_pairs(ct: &CtData, e: usize) -> Result<Vec<StaplePair>, InvariantError> {
    let bound = staple_bound(ct, e)?;
    let rs = RaySplitting::new(ct, e, bound + 2)?;
    let mut found: BTreeMap<(Line, Line), StaplePair> = BTreeMap::new();
    let mut push = |i: usize, l1: Line, l2: Line, t: usize, kind: StapleKind, m: i64| {
        if l1.is_periodic() || l2.is_periodic() {
            return;
        }
        found.entry((l1.clone(), l2.clone())).or_insert(StaplePair {
            ray: e,
            index: i,
            lines: (l1, l2),
            axis: twist_class(ct, t, 1),
            kind,
            m,
        });
    };
    for i in 2..=bound {
        let s = rs.sigma(i);
        if let Some((e1, e2)) = quasi_exceptional(ct, &rs, i) {
            let m = ct.degree(e1).unwrap() - ct.degree(e2).unwrap();
            push(i, rs.line(ct, i - 1), rs.line(ct, i + 1), ct.twist_of(e1).unwrap(), StapleKind::QuasiExceptional, m);
            continue;
        }
        match s {
            Term::Exceptional { first, last, .. } => {
                let m = ct.degree(first).unwrap() - ct.degree(last).unwrap();
                push(i, rs.line(ct, i - 1), rs.line(ct, i), ct.twist_of(first).unwrap(), StapleKind::Exceptional, m);
            }
            Term::Edge(x) if ct.is_linear(edge_index(x)) => {
                let le = edge_index(x);
                let (l0, l1) = (rs.line(ct, i - 1), rs.line(ct, i));
                let d = ct.degree(le).unwrap();
                if x > 0 && !l1.is_periodic() {
                    push(i, l0, l1, ct.twist_of(le).unwrap(), StapleKind::Linear, d);
                } else if x < 0 && !l0.is_periodic() {
                    push(i, l0, l1, ct.twist_of(le).unwrap(), StapleKind::LinearInverse, -d);
                }
            }
            _ => {}
        }
    }
    let mut out: Vec<StaplePair> = found.into_values().collect();
    out.sort_by_key(|b| b.index);
    Ok(out)
}

/// `m_b(φ)` for a pair in `S_2(φ)`.
pub fn m_of_phi(ct: &CtData, lines: &(Line, Line)) -> Option<i64> {
    ct.higher_edges()
        .into_iter()
        .filter_map(|e| staple_pairs(ct, e).ok())
        .flatten()
        .find(|b| &b.lines == lines)
        .map(|b| b.m)
}

/// `S_2(φ)`: pairs over every eigenray, first occurrence kept.
pub fn all_staple_pairs(ct: &CtData) -> Result<Vec<StaplePair>, InvariantError> {
    let mut out: Vec<StaplePair> = Vec::new();
    for e in ct.higher_edges() {
        for b in staple_pairs(ct, e)? {
            if !out.iter().any(|x| x.lines == b.lines) {
                out.push(b);
            }
        }
    }
    Ok(out)
}

/// `S(φ)`: lines occurring in some staple pair.
pub fn staples(ct: &CtData) -> Result<Vec<Line>, InvariantError> {
    let mut out: Vec<Line> = all_staple_pairs(ct)?.into_iter().flat_map(|b| [b.lines.0, b.lines.1]).collect();
    out.sort();
    out.dedup();
    Ok(out)
}

/// Classes of the relation generated by occurring along the same ray.
/// Input is one list of pairs per ray; output lists the classes as line pairs.
pub fn equivalence_classes(per_ray: &[Vec<(Line, Line)>]) -> Vec<Vec<(Line, Line)>> {
    let mut keys: Vec<(Line, Line)> = per_ray.iter().flatten().cloned().collect();
    keys.sort();
    keys.dedup();
    let idx = |k: &(Line, Line)| keys.binary_search(k).unwrap();
    let mut parent: Vec<usize> = (0..keys.len()).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut y = x;
        while p[y] != r {
            let n = p[y];
            p[y] = r;
            y = n;
        }
        r
    }
    for ray in per_ray {
        for w in ray.windows(2) {
            let (a, b) = (find(&mut parent, idx(&w[0])), find(&mut parent, idx(&w[1])));
            parent[a] = b;
        }
    }
    let mut classes: BTreeMap<usize, Vec<(Line, Line)>> = BTreeMap::new();
    for (i, k) in keys.iter().enumerate() {
        let r = find(&mut parent, i);
        classes.entry(r).or_default().push(k.clone());
    }
    let mut out: Vec<Vec<(Line, Line)>> = classes.into_values().collect();
    out.sort();
    out
}

/// Equivalence classes of `S_2(φ)` for a CT.
pub fn staple_classes(ct: &CtData) -> Result<Vec<Vec<(Line, Line)>>, InvariantError> {
    let per_ray = ct
        .higher_edges()
        .into_iter()
        .map(|e| Ok(staple_pairs(ct, e)?.into_iter().map(|b| b.lines).collect()))
        .collect::<Result<Vec<Vec<(Line, Line)>>, InvariantError>>()?;
    Ok(equivalence_classes(&per_ray))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ct::load_ct;
    use crate::ct::tests::{running, FIXED_EDGE};
    use crate::invariants::{acc_np, limit_lines};
    use std::collections::BTreeSet;

    fn e(ct: &CtData, n: &str) -> usize {
        ct.edge(n).unwrap()
    }

    fn shown(ct: &CtData, b: &[StaplePair]) -> BTreeSet<(String, String)> {
        b.iter().map(|x| (x.lines.0.display(ct), x.lines.1.display(ct))).collect()
    }

    #[test]
    fn visible_lines_of_q() {
        let ct = running();
        let q = e(&ct, "q");
        assert!(visible_lines(&ct, q, 0).unwrap().is_empty());
        let vs = visible_lines(&ct, q, 40).unwrap();
        let om = limit_lines(&ct, q).unwrap();
        for v in &vs {
            assert!(om.contains(&v.line), "{}", v.line.display(&ct));
        }
        let kinds: BTreeSet<String> = vs.iter().map(|v| v.line.display(&ct)).collect();
        assert!(kinds.contains("∞(a) R_c") && kinds.contains("∞(a) b(a)∞"));
        assert_eq!(vs[0].line.display(&ct), "∞(a) R_c");
    }

    #[test]
    fn forward_index_is_monotone() {
        let ct = running();
        let q = e(&ct, "q");
        let js: Vec<usize> = (1..=10).map(|i| forward_index(&ct, q, i).unwrap()).collect();
        assert!(js.windows(2).all(|w| w[0] < w[1]));
        assert!(js.iter().enumerate().all(|(i, &j)| j > i + 1));
        // ρ_1 sits between c and c·b, so lands after the b of f(c)
        assert_eq!(js[0], 3);
        // M = 2, so four steps of j: 1 -> 3 -> 6 -> 10 -> 15
        assert_eq!(&js[..1], &[3]);
        assert_eq!(js[2], 6);
        assert_eq!(js[5], 10);
        assert_eq!(js[9], 15);
        assert_eq!(staple_bound(&ct, q).unwrap(), 15);
        // f_#(ℓ_i) = ℓ_j
        let rs = RaySplitting::new(&ct, q, 40).unwrap();
        for i in 1..=10 {
            let j = js[i - 1];
            let img = ct.map_path(&rs.line(&ct, i).window(&ct, 30));
            let target = rs.line(&ct, j).window(&ct, 30);
            let mid = &target[10..target.len() - 10];
            assert!(img.windows(mid.len()).any(|w| w == mid));
        }
    }

    #[test]
    fn translation_numbers() {
        let ct = running();
        let t: Vec<usize> = ["q", "c", "d", "e"].iter().map(|n| translation_number(&ct, e(&ct, n)).unwrap()).collect();
        assert_eq!(t, vec![1, 1, 2, 3]);
        let sq = ct.power(2).unwrap();
        for n in ["c", "d", "e", "q"] {
            assert_eq!(
                translation_number(&sq, e(&sq, n)).unwrap(),
                2 * translation_number(&ct, e(&ct, n)).unwrap()
            );
        }
    }

    #[test]
    fn running_staples() {
        let ct = running();
        let s2 = all_staple_pairs(&ct).unwrap();
        let want: BTreeSet<(String, String)> = [
            ("∞(a) b(a)∞".to_string(), "∞(a) b(a)∞".to_string()),
            ("∞(a) b(a)∞".to_string(), "∞(a) R_c".to_string()),
        ]
        .into_iter()
        .collect();
        assert_eq!(shown(&ct, &s2), want);
        let s: BTreeSet<String> = staples(&ct).unwrap().iter().map(|l| l.display(&ct)).collect();
        assert_eq!(s, BTreeSet::from(["∞(a) R_c".to_string(), "∞(a) b(a)∞".to_string()]));
        let bb = s2.iter().find(|b| b.lines.0 == b.lines.1).unwrap();
        assert_eq!(bb.m, 1);
        assert_eq!(m_of_phi(&ct, &bb.lines), Some(1));
        for b in &s2 {
            assert!(b.lines.0.is_staple() && b.lines.1.is_staple());
            for l in [&b.lines.0, &b.lines.1] {
                assert!(acc_np(&ct, b.ray).unwrap().contains(l));
            }
        }
        let sq = ct.power(2).unwrap();
        assert_eq!(m_of_phi(&sq, &bb.lines), Some(2));
        assert_eq!(staple_classes(&ct).unwrap().len(), 1);
    }

    #[test]
    fn lower_rays_share_pairs() {
        let ct = running();
        let low = staple_pairs(&ct, e(&ct, "c")).unwrap();
        let high = staple_pairs(&ct, e(&ct, "q")).unwrap();
        for b in &low {
            let inv = (b.lines.1.inverse(&ct), b.lines.0.inverse(&ct));
            assert!(high.iter().any(|h| h.lines == b.lines || h.lines == inv));
        }
    }

    #[test]
    fn classes_by_union_find() {
        let ct = running();
        let vs: Vec<Line> = visible_lines(&ct, e(&ct, "q"), 3).unwrap().into_iter().map(|v| v.line).collect();
        let a = (vs[0].clone(), vs[0].clone());
        let b = (vs[1].clone(), vs[1].clone());
        let c = (vs[0].clone(), vs[1].clone());
        assert_eq!(equivalence_classes(&[vec![a.clone()], vec![b.clone()]]).len(), 2);
        assert_eq!(equivalence_classes(&[vec![a.clone(), c.clone()], vec![c, b]]).len(), 1);
    }

    #[test]
    fn fixed_edge_staples() {
        let fx = load_ct(FIXED_EDGE).unwrap();
        for e in fx.higher_edges() {
            for b in staple_pairs(&fx, e).unwrap() {
                assert!(matches!(b.kind, StapleKind::Linear | StapleKind::LinearInverse));
            }
        }
    }
}

//! Deterministic text and JSON reports, plus the comparison driver used by the CLI.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::ct::{CtData, EdgeClass};
use crate::graphmap::EdgeRef;
use crate::invariants::{
    acc_np, added_lines, algebraic_invariant, algebraic_line, all_limit_lines, all_strong_axes, chain_set, eigengraph, eigenray,
    extensions, is_special_ffs, limit_lines, oriented_axes, ray_partial_order, special_chain, twist_coordinate,
    AddedLines, AlgebraicInvariant, InvariantError, Site, SpecialChain, IC_COMPONENTS,
};
use crate::iterset::{equivalent, w_step, AtomRef, ElementOracle, IteratedSet};
use crate::staples::{all_staple_pairs, staple_classes, staples, translation_number};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Section {
    pub name: String,
    pub lines: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Report {
    pub sections: Vec<Section>,
}

impl Report {
    pub fn push(&mut self, name: &str, lines: Vec<String>) {
        self.sections.push(Section { name: name.to_string(), lines });
    }

    pub fn section(&self, name: &str) -> Option<&Section> {
        self.sections.iter().find(|s| s.name == name)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for s in &self.sections {
            out.push_str(&format!("== {} ==\n", s.name));
            for l in &s.lines {
                out.push_str(l);
                out.push('\n');
            }
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

/// 64-bit FNV-1a, used for the stable `I_c` digest.
pub fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325u64, |h, &b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3))
}

pub fn render_ic(ic: &IteratedSet<AtomRef>) -> String {
    ic.render(&|a: &AtomRef| a.to_string())
}

#[derive(Debug, Clone, Default)]
pub struct ReportOptions {
    /// Chain order; `None` takes higher edges in filtration order.
    pub order: Option<Vec<usize>>,
    /// Number of edges shown for each eigenray prefix.
    pub depth: usize,
    /// Subgraphs to test for specialness, with a label each.
    pub special: Vec<(String, BTreeSet<usize>)>,
}

fn fwd(e: usize) -> EdgeRef {
    e as EdgeRef + 1
}

pub fn default_order(ct: &CtData) -> Vec<usize> {
    ct.higher_edges()
}

pub fn chain_for(ct: &CtData, order: Option<&[usize]>) -> Result<SpecialChain, InvariantError> {
    match order {
        Some(o) => special_chain(ct, o),
        None => special_chain(ct, &default_order(ct)),
    }
}

fn names(ct: &CtData, es: impl IntoIterator<Item = usize>) -> String {
    let v: Vec<String> = es.into_iter().map(|e| ct.name(fwd(e))).collect();
    if v.is_empty() {
        "-".to_string()
    } else {
        v.join(" ")
    }
}

fn err_line(e: impl std::fmt::Display) -> Vec<String> {
    vec![format!("unavailable: {e}")]
}

fn classification(ct: &CtData) -> Vec<String> {
    let linear: Vec<String> = ct
        .linear_edges()
        .into_iter()
        .map(|e| match ct.class(e) {
            EdgeClass::Linear { twist, degree } => {
                format!("{} (twist {}, degree {degree})", ct.name(fwd(e)), ct.format_path(ct.twist_loop(twist)))
            }
            _ => unreachable!(),
        })
        .collect();
    vec![
        format!("fixed: {}", names(ct, ct.fixed_edges())),
        format!("linear: {}", if linear.is_empty() { "-".to_string() } else { linear.join(", ") }),
        format!("higher: {}", names(ct, ct.higher_edges())),
    ]
}

fn growth(ct: &CtData) -> Vec<String> {
    ct.order()
        .iter()
        .filter(|&&e| !ct.is_fixed(e))
        .map(|&e| match ct.growth_polynomial_edge(fwd(e)) {
            Ok(p) => format!("|f^k({})| = {p}", ct.name(fwd(e))),
            Err(err) => format!("|f^k({})|: {err}", ct.name(fwd(e))),
        })
        .collect()
}

fn rays(ct: &CtData, depth: usize) -> Vec<String> {
    ct.higher_edges()
        .into_iter()
        .map(|e| match eigenray(ct, e) {
            Ok(r) => format!("R_{} = {}...", ct.name(fwd(e)), ct.format_path(&r.prefix(ct, depth))),
            Err(err) => format!("R_{}: {err}", ct.name(fwd(e))),
        })
        .collect()
}

fn limits(ct: &CtData) -> Vec<String> {
    let mut out = Vec::new();
    for e in ct.higher_edges() {
        let n = ct.name(fwd(e));
        match (limit_lines(ct, e), acc_np(ct, e)) {
            (Ok(om), Ok(np)) => {
                let ls: Vec<String> = om.iter().map(|l| l.display(ct)).collect();
                out.push(format!("Ω(r_{n}) = {{{}}}", ls.join(", ")));
                out.push(format!("|acc_NP(r_{n})| = {}", np.len()));
            }
            (Err(err), _) | (_, Err(err)) => out.push(format!("r_{n}: {err}")),
        }
    }
    out
}

fn eigengraph_summary(ct: &CtData) -> Vec<String> {
    let g = ct.graph();
    eigengraph(ct)
        .components
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let vs: Vec<&str> = c.vertices.iter().map(|&v| g.vertices()[v].as_str()).collect();
            format!(
                "component {i}: vertices {}; fixed {}; lollipops {}; stubs {}; rank {} ({})",
                vs.join(" "),
                names(ct, c.fixed_edges.iter().copied()),
                names(ct, c.lollipops.iter().copied()),
                names(ct, c.stubs.iter().copied()),
                c.rank,
                c.kind()
            )
        })
        .collect()
}

fn axes_section(ct: &CtData) -> Vec<String> {
    let mut out: Vec<String> = oriented_axes(ct).iter().map(|a| format!("axis {a}")).collect();
    let sas = all_strong_axes(ct);
    out.extend(sas.iter().map(|s| format!("strong {}", s.describe(ct))));
    let site = |s: &Site| match s {
        Site::Base => "base".to_string(),
        Site::Linear(e) => ct.name(fwd(*e)),
    };
    for a in &sas {
        for b in &sas {
            if a != b && a.axis == b.axis {
                if let Ok(t) = twist_coordinate(a, b) {
                    out.push(format!("τ_{}({}, {}) = {t}", a.axis, site(&a.site), site(&b.site)));
                }
            }
        }
    }
    out
}

fn order_section(ct: &CtData) -> Vec<String> {
    let po = ray_partial_order(ct);
    if po.pairs.is_empty() {
        return vec!["none".to_string()];
    }
    po.pairs.iter().map(|&(a, b)| format!("r_{} < r_{}", ct.name(fwd(a)), ct.name(fwd(b)))).collect()
}

fn chain_section(ct: &CtData, chain: &SpecialChain) -> Vec<String> {
    let mut out = vec![format!("order: {}", names(ct, chain.order.iter().copied()))];
    for (i, el) in chain.elements.iter().enumerate() {
        let cls: Vec<String> = el.ffs.iter().map(|c| c.to_string()).collect();
        let ranks: Vec<String> = el.ranks().iter().map(|r| r.to_string()).collect();
        let via = el.added.map(|e| format!(" after {}", ct.name(fwd(e)))).unwrap_or_default();
        out.push(format!("F_{i}{via}: ranks ({}) {{{}}}", ranks.join(","), cls.join(", ")));
    }
    out
}

fn extension_sections(ct: &CtData, chain: &SpecialChain) -> (Vec<String>, Vec<String>) {
    let exts = match extensions(ct, chain) {
        Ok(x) => x,
        Err(e) => return (err_line(&e), err_line(&e)),
    };
    let mut types = Vec::new();
    let mut added = Vec::new();
    for x in &exts {
        let d = ct.name(fwd(x.edge));
        types.push(format!("step {} ({d}): arc {} type ({}, {})", x.step, ct.format_path(&x.arc), x.arc_type, x.kind));
        match added_lines(ct, chain, x) {
            AddedLines::Lines(ls) => {
                let s: Vec<String> = ls.iter().map(|l| l.display(ct)).collect();
                added.push(format!("step {} ({d}): {{{}}}", x.step, s.join(", ")));
            }
            AddedLines::Large { fix, carrier } => {
                let gens = |h: &crate::stallings::SubgroupGraph| {
                    h.generators().iter().map(|w| w.to_string()).collect::<Vec<_>>().join(",")
                };
                added.push(format!("step {} ({d}): pair [<{}>, <{}>]", x.step, gens(&fix), gens(&carrier)));
            }
        }
    }
    (types, added)
}

fn staple_sections(ct: &CtData) -> (Vec<String>, Vec<String>, Vec<String>) {
    let tau: Vec<String> = ct
        .higher_edges()
        .into_iter()
        .map(|e| match translation_number(ct, e) {
            Ok(t) => format!("τ(r_{}) = {t}", ct.name(fwd(e))),
            Err(err) => format!("r_{}: {err}", ct.name(fwd(e))),
        })
        .collect();
    let pairs = match all_staple_pairs(ct) {
        Ok(p) => p,
        Err(e) => return (tau, err_line(&e), err_line(e)),
    };
    let mut st: Vec<String> = match staples(ct) {
        Ok(s) => s.iter().map(|l| format!("staple {}", l.display(ct))).collect(),
        Err(e) => err_line(e),
    };
    st.extend(pairs.iter().map(|p| {
        format!("pair {} on r_{} at index {} ({:?})", p.describe(ct), ct.name(fwd(p.ray)), p.index, p.kind)
    }));
    if let Ok(classes) = staple_classes(ct) {
        for (i, c) in classes.iter().enumerate() {
            let s: Vec<String> = c.iter().map(|(a, b)| format!("({}, {})", a.display(ct), b.display(ct))).collect();
            st.push(format!("class {i}: {}", s.join(" ")));
        }
    }
    let ms = pairs.iter().map(|p| format!("m_b{} = {}", p.describe(ct), p.m)).collect();
    (tau, st, ms)
}

fn algebraic_section(ct: &CtData, chain: &SpecialChain) -> Vec<String> {
    all_limit_lines(ct)
        .iter()
        .map(|l| match algebraic_line(ct, l, chain) {
            Ok(h) => format!("{} -> {}", l.display(ct), h.describe()),
            Err(_) => format!("{} -> untyped", l.display(ct)),
        })
        .collect()
}

pub fn invariants_report(ct: &CtData, opts: &ReportOptions) -> Result<Report, InvariantError> {
    let chain = chain_for(ct, opts.order.as_deref())?;
    let mut r = Report::default();
    r.push("classification", classification(ct));
    r.push("growth", growth(ct));
    r.push("eigenrays", rays(ct, opts.depth));
    r.push("limit lines", limits(ct));
    r.push("eigengraph", eigengraph_summary(ct));
    r.push("axes", axes_section(ct));
    r.push("partial order", order_section(ct));
    r.push("chain", chain_section(ct, &chain));
    let (types, added) = extension_sections(ct, &chain);
    r.push("extensions", types);
    r.push("added lines", added);
    r.push("algebraic lines", algebraic_section(ct, &chain));
    let (tau, st, ms) = staple_sections(ct);
    r.push("translation numbers", tau);
    r.push("staples", st);
    r.push("m values", ms);
    if !opts.special.is_empty() {
        let lines = opts
            .special
            .iter()
            .map(|(label, h)| {
                format!("{label}: {}", if is_special_ffs(ct, h) { "special" } else { "not special" })
            })
            .collect();
        r.push("special", lines);
    }
    let digest = match algebraic_invariant(ct, &chain) {
        Ok(ic) => {
            let text = render_ic(&ic.to_iterated_set());
            vec![format!("fnv1a-64 {:016x}", fnv1a(text.as_bytes()))]
        }
        Err(e) => err_line(e),
    };
    r.push("I_c digest", digest);
    Ok(r)
}

/// Complement of the named edges, for specialness queries.
pub fn complement(ct: &CtData, removed: &[usize]) -> BTreeSet<usize> {
    (0..ct.edge_count()).filter(|e| !removed.contains(e)).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Comparison {
    Indistinguishable,
    /// Name of the first component of `I_c` that differs.
    Distinguished(&'static str),
    /// `I_c` could not be assembled for one side.
    Undetermined(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompareOutcome {
    pub result: Comparison,
    /// Whether the oriented axes of both sides lie in one `Aut(F_n)` orbit.
    pub axes_orbit: Option<bool>,
}

/// Obstruction-first comparison: the chain component, then the rest of `I_c`.
pub fn compare(a: &CtData, chain_a: &SpecialChain, b: &CtData, chain_b: &SpecialChain) -> CompareOutcome {
    let axes = |ct: &CtData| IteratedSet::of_leaves(false, oriented_axes(ct));
    let axes_orbit = if a.rank() == b.rank() { w_step(&axes(a), &axes(b), &ElementOracle) } else { Some(false) };
    if equivalent(&chain_set(&chain_a.ffs_list()), &chain_set(&chain_b.ffs_list())).is_none() {
        return CompareOutcome { result: Comparison::Distinguished(IC_COMPONENTS[0]), axes_orbit };
    }
    let ics: Result<(AlgebraicInvariant, AlgebraicInvariant), InvariantError> =
        algebraic_invariant(a, chain_a).and_then(|x| Ok((x, algebraic_invariant(b, chain_b)?)));
    let result = match ics {
        Ok((x, y)) => match x.first_difference(&y) {
            Some(c) => Comparison::Distinguished(c),
            None => Comparison::Indistinguishable,
        },
        Err(e) => Comparison::Undetermined(e.to_string()),
    };
    CompareOutcome { result, axes_orbit }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ct::load_ct;
    use crate::ct::tests::{running, FIXED_EDGE};

    fn opts(depth: usize) -> ReportOptions {
        ReportOptions { depth, ..Default::default() }
    }

    #[test]
    fn deterministic_and_json_matches_text() {
        let ct = running();
        let r1 = invariants_report(&ct, &opts(8)).unwrap();
        let r2 = invariants_report(&ct, &opts(8)).unwrap();
        assert_eq!(r1.to_text(), r2.to_text());
        let v: serde_json::Value = serde_json::from_str(&r1.to_json()).unwrap();
        let secs = v["sections"].as_array().unwrap();
        assert_eq!(secs.len(), r1.sections.len());
        for (j, s) in secs.iter().zip(&r1.sections) {
            assert_eq!(j["name"], s.name.as_str());
            assert_eq!(j["lines"].as_array().unwrap().len(), s.lines.len());
        }
    }

    #[test]
    fn depth_leaves_digest_alone() {
        let ct = running();
        let a = invariants_report(&ct, &opts(4)).unwrap();
        let b = invariants_report(&ct, &opts(20)).unwrap();
        assert_ne!(a.section("eigenrays"), b.section("eigenrays"));
        assert_eq!(a.section("I_c digest"), b.section("I_c digest"));
        assert!(a.section("I_c digest").unwrap().lines[0].starts_with("fnv1a-64 "));
    }

    #[test]
    fn fnv_reference_values() {
        assert_eq!(fnv1a(b""), 0xcbf29ce484222325);
        assert_eq!(fnv1a(b"a"), 0xaf63dc4c8601ec8c);
    }

    #[test]
    fn bad_order_propagates() {
        let ct = running();
        let order = crate::invariants::parse_order(&ct, "q,c,d,e").unwrap();
        let o = ReportOptions { order: Some(order), ..opts(4) };
        assert!(matches!(invariants_report(&ct, &o), Err(InvariantError::InvalidTotalOrder(_))));
    }

    #[test]
    fn fixed_edge_report_survives() {
        let ct = load_ct(FIXED_EDGE).unwrap();
        let e = ct.edge("e").unwrap();
        let o = ReportOptions { special: vec![("complement of e".into(), complement(&ct, &[e]))], ..opts(6) };
        let r = invariants_report(&ct, &o).unwrap();
        assert_eq!(r.section("special").unwrap().lines, vec!["complement of e: not special"]);
        assert!(r.section("extensions").unwrap().lines[0].starts_with("unavailable"));
    }

    #[test]
    fn compare_self_and_fixed_edge() {
        let ct = running();
        let ch = chain_for(&ct, None).unwrap();
        let same = compare(&ct, &ch, &ct, &ch);
        assert_eq!(same.result, Comparison::Indistinguishable);
        assert_eq!(same.axes_orbit, Some(true));
        let fe = load_ct(FIXED_EDGE).unwrap();
        let chf = chain_for(&fe, None).unwrap();
        assert_eq!(compare(&ct, &ch, &fe, &chf).result, Comparison::Distinguished("chain"));
    }
}

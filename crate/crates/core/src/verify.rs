//! Checking candidate conjugators: equality in `Out(F_n)`, the twist
//! coordinate criterion and membership in `X_c(φ)`.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::ct::CtData;
use crate::invariants::{
    algebraic_invariant, algebraic_line, all_limit_lines, all_strong_axes, twist_coordinate, AlgebraicAdded,
    InvariantError, SpecialChain, StrongAxis,
};
use crate::stallings::{conj_tuple_equal, express_in_images, fold, PairCoord, SubgroupConjClass};
use crate::words::{conjugacy_class, letter_of, Word};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerifyError {
    #[error("the images do not form a basis of F_{0}")]
    NotAutomorphism(usize),
    #[error("clause {clause}: {message}")]
    Parse { clause: usize, message: String },
    #[error("rank mismatch: {0} vs {1}")]
    RankMismatch(usize, usize),
    #[error("bad correspondence: {0}")]
    BadCorrespondence(String),
    #[error(transparent)]
    Invariant(#[from] InvariantError),
}

/// An automorphism of `F_n`, standing for its outer class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OuterAuto {
    images: Vec<Word>,
    inverse: Vec<Word>,
}

impl OuterAuto {
    pub fn new(images: Vec<Word>) -> Result<OuterAuto, VerifyError> {
        let rank = images.len();
        let inverse = express_in_images(&images, rank).ok_or(VerifyError::NotAutomorphism(rank))?;
        Ok(OuterAuto { images, inverse })
    }

    pub fn identity(rank: usize) -> OuterAuto {
        let id: Vec<Word> = (1..=rank).map(|i| Word::generator(i, rank)).collect();
        OuterAuto { images: id.clone(), inverse: id }
    }

    /// `x -> g x g^-1`.
    pub fn inner(g: &Word) -> OuterAuto {
        let rank = g.rank();
        OuterAuto {
            images: (1..=rank).map(|i| Word::generator(i, rank).conjugate_by(g)).collect(),
            inverse: (1..=rank).map(|i| Word::generator(i, rank).conjugate_by(&g.inverse())).collect(),
        }
    }

    pub fn rank(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[Word] {
        &self.images
    }

    pub fn apply(&self, w: &Word) -> Word {
        w.substitute(&self.images)
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &OuterAuto) -> OuterAuto {
        OuterAuto {
            images: other.images.iter().map(|w| self.apply(w)).collect(),
            inverse: self.inverse.iter().map(|w| w.substitute(&other.inverse)).collect(),
        }
    }

    pub fn inverse(&self) -> OuterAuto {
        OuterAuto { images: self.inverse.clone(), inverse: self.images.clone() }
    }

    pub fn pow(&self, k: i64) -> OuterAuto {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        (0..k.unsigned_abs()).fold(OuterAuto::identity(self.rank()), |acc, _| base.compose(&acc))
    }

    /// Parses clauses `x1 -> w` or `a -> w` separated by `;` or newlines.
    /// Words use letters, or `x<k>` with an optional `^-1`; `1` is trivial.
    /// Unlisted generators are fixed.
    pub fn parse(text: &str, rank: usize) -> Result<OuterAuto, VerifyError> {
        let mut images: Vec<Word> = (1..=rank).map(|i| Word::generator(i, rank)).collect();
        let clauses = text.split([';', '\n']).map(str::trim).filter(|c| !c.is_empty()).enumerate();
        for (i, clause) in clauses {
            let n = i + 1;
            let err = |m: String| VerifyError::Parse { clause: n, message: m };
            let (lhs, rhs) = clause.split_once("->").ok_or_else(|| err(format!("expected `x -> word` in {clause:?}")))?;
            let lhs = parse_word(lhs.trim(), rank).map_err(&err)?;
            let [g] = lhs.letters() else { return Err(err(format!("{lhs} is not a generator"))) };
            if *g < 0 {
                return Err(err(format!("{lhs} is not a generator")));
            }
            images[*g as usize - 1] = parse_word(rhs.trim(), rank).map_err(&err)?;
        }
        OuterAuto::new(images)
    }
}

fn parse_word(text: &str, rank: usize) -> Result<Word, String> {
    if text == "1" {
        return Ok(Word::identity(rank));
    }
    let chars: Vec<char> = text.chars().filter(|c| !c.is_whitespace()).collect();
    let mut raw = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let mut l = if c == 'x' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit()) {
            let mut j = i + 1;
            while j < chars.len() && chars[j].is_ascii_digit() {
                j += 1;
            }
            let k: i32 = chars[i + 1..j].iter().collect::<String>().parse().map_err(|_| format!("bad index in {text:?}"))?;
            i = j;
            k
        } else {
            i += 1;
            letter_of(c).ok_or_else(|| format!("unexpected {c:?} in {text:?}"))?
        };
        if chars.get(i) == Some(&'^') && chars.get(i + 1) == Some(&'-') && chars.get(i + 2) == Some(&'1') {
            l = -l;
            i += 3;
        }
        raw.push(l);
    }
    Word::reduce(&raw, rank).map_err(|e| e.to_string())
}

impl fmt::Display for OuterAuto {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .images
            .iter()
            .enumerate()
            .map(|(i, w)| format!("{} -> {}", Word::generator(i + 1, self.rank()), w))
            .collect();
        f.write_str(&parts.join("; "))
    }
}

/// Whether `u` and `v` differ by an inner automorphism.
pub fn outer_equal(u: &OuterAuto, v: &OuterAuto) -> Result<bool, VerifyError> {
    if u.rank() != v.rank() {
        return Err(VerifyError::RankMismatch(u.rank(), v.rank()));
    }
    let n = u.rank();
    let h = u.compose(&v.inverse());
    let x1 = Word::generator(1, n);
    let h1 = h.apply(&x1);
    if n == 1 {
        return Ok(h1 == x1);
    }
    let (p1, c1) = h1.cyclic_split();
    if c1 != x1 {
        return Ok(false);
    }
    // h = i_g with g = p1 x1^k
    let y = p1.inverse().mul(&h.apply(&Word::generator(2, n))).mul(&p1);
    let lead = y.letters().first().copied().filter(|&l| l.abs() == 1);
    let k = lead.map_or(0, |l| y.letters().iter().take_while(|&&m| m == l).count() as i64 * l.signum() as i64);
    let g = p1.mul(&x1.pow(k));
    Ok((1..=n).all(|i| {
        let x = Word::generator(i, n);
        x.conjugate_by(&g) == h.apply(&x)
    }))
}

/// `θ φ θ^-1 = ψ` in `Out(F_n)`.
pub fn verify_conjugator(phi: &OuterAuto, psi: &OuterAuto, theta: &OuterAuto) -> Result<bool, VerifyError> {
    outer_equal(&theta.compose(phi).compose(&theta.inverse()), psi)
}

/// Twist coordinates preserved by a strong-axis correspondence.
pub fn recognition_check(
    c1: &CtData,
    c2: &CtData,
    correspondence: &[(StrongAxis, StrongAxis)],
) -> Result<bool, VerifyError> {
    let s1: BTreeSet<StrongAxis> = all_strong_axes(c1).into_iter().collect();
    let s2: BTreeSet<StrongAxis> = all_strong_axes(c2).into_iter().collect();
    let left: BTreeSet<StrongAxis> = correspondence.iter().map(|p| p.0.clone()).collect();
    let right: BTreeSet<StrongAxis> = correspondence.iter().map(|p| p.1.clone()).collect();
    if left != s1 || right != s2 || left.len() != correspondence.len() || right.len() != correspondence.len() {
        return Err(VerifyError::BadCorrespondence("must pair every strong axis exactly once".into()));
    }
    for (a1, a2) in correspondence {
        for (b1, b2) in correspondence {
            if a1.axis != b1.axis {
                continue;
            }
            if a2.axis != b2.axis {
                return Ok(false);
            }
            if twist_coordinate(a1, b1)? != twist_coordinate(a2, b2)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

pub const X_ITEMS: [&str; 7] = [
    "chain preserved",
    "factor classes fixed",
    "fixed subgroups fixed",
    "added line pairs fixed",
    "limit line pairs fixed",
    "oriented axes fixed",
    "large strong axes fixed",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct XChecklist {
    pub items: [bool; 7],
}

impl XChecklist {
    pub fn all(&self) -> bool {
        self.items.iter().all(|&b| b)
    }
}

fn image_class(theta: &OuterAuto, c: &SubgroupConjClass) -> SubgroupConjClass {
    let h = c.representative();
    let gens: Vec<Word> = h.generators().iter().map(|w| theta.apply(w)).collect();
    SubgroupConjClass::from_generators(&gens, theta.rank())
}

fn image_coord(theta: &OuterAuto, c: &PairCoord) -> PairCoord {
    match c {
        PairCoord::Elem(w) => PairCoord::Elem(theta.apply(w)),
        PairCoord::Sub(h) => {
            PairCoord::Sub(fold(&h.generators().iter().map(|w| theta.apply(w)).collect::<Vec<_>>(), theta.rank()))
        }
    }
}

fn tuple_fixed(theta: &OuterAuto, t: &[PairCoord]) -> bool {
    let img: Vec<PairCoord> = t.iter().map(|c| image_coord(theta, c)).collect();
    conj_tuple_equal(&img, t)
}

/// The seven conditions for `θ ∈ X_c(φ)`. Item 5 runs over the lines of
/// `Ω(φ)` that carry an algebraic type.
pub fn x_membership(ct: &CtData, chain: &SpecialChain, theta: &OuterAuto) -> Result<XChecklist, VerifyError> {
    if theta.rank() != ct.rank() {
        return Err(VerifyError::RankMismatch(theta.rank(), ct.rank()));
    }
    let ic = algebraic_invariant(ct, chain)?;
    let mut items = [false; 7];
    items[0] = ic.chain.iter().all(|ffs| {
        let mut img: Vec<SubgroupConjClass> = ffs.iter().map(|c| image_class(theta, c)).collect();
        img.sort();
        img == *ffs
    });
    items[1] = ic.chain.iter().flatten().all(|c| image_class(theta, c) == *c);
    items[2] = ic.fix.iter().all(|c| image_class(theta, c) == *c);
    items[3] = ic.added.iter().all(|a| match a {
        AlgebraicAdded::Lines(ls) => ls.iter().all(|l| tuple_fixed(theta, &l.coords)),
        AlgebraicAdded::Pair(h1, h2) => tuple_fixed(theta, &[PairCoord::Sub(h1.clone()), PairCoord::Sub(h2.clone())]),
    });
    items[4] = all_limit_lines(ct)
        .iter()
        .filter_map(|l| algebraic_line(ct, l, chain).ok())
        .all(|h| tuple_fixed(theta, &h.coords));
    items[5] = ic.axes.iter().all(|a| conjugacy_class(&theta.apply(&a.to_word())).ok().as_ref() == Some(a));
    items[6] = ic.strong.iter().all(|(h, a)| tuple_fixed(theta, &[PairCoord::Sub(h.clone()), PairCoord::Elem(a.clone())]));
    Ok(XChecklist { items })
}

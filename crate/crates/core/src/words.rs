//! Reduced words in a free group of fixed rank.
//!
//! Letters are signed generator indices: `k` is `x_k`, `-k` is its inverse.
//! The text form writes `x_1 .. x_26` as `a .. z` and inverses in uppercase.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WordError {
    #[error("generator index {index} out of range for rank {rank}")]
    InvalidGenerator { index: i32, rank: usize },
    #[error("the trivial word has no conjugacy class representative")]
    EmptyWord,
    #[error("cannot parse word {text:?}: unexpected {found:?}")]
    Parse { text: String, found: char },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    letters: Vec<i32>,
    rank: usize,
}

fn check(letters: &[i32], rank: usize) -> Result<(), WordError> {
    for &l in letters {
        if l == 0 || l.unsigned_abs() as usize > rank {
            return Err(WordError::InvalidGenerator { index: l, rank });
        }
    }
    Ok(())
}

/// Stack-based free reduction.
fn free_reduce(raw: impl IntoIterator<Item = i32>) -> Vec<i32> {
    let mut out: Vec<i32> = Vec::new();
    for l in raw {
        if out.last() == Some(&-l) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    out
}

impl Word {
    pub fn reduce(raw: &[i32], rank: usize) -> Result<Word, WordError> {
        check(raw, rank)?;
        Ok(Word { letters: free_reduce(raw.iter().copied()), rank })
    }

    pub fn identity(rank: usize) -> Word {
        Word { letters: Vec::new(), rank }
    }

    pub fn generator(i: usize, rank: usize) -> Word {
        assert!(i >= 1 && i <= rank, "generator {i} out of range");
        Word { letters: vec![i as i32], rank }
    }

    pub fn parse(text: &str, rank: usize) -> Result<Word, WordError> {
        let mut raw = Vec::new();
        for ch in text.chars() {
            if ch.is_whitespace() || ch == '1' && text.trim() == "1" {
                continue;
            }
            let l = letter_of(ch).ok_or_else(|| WordError::Parse { text: text.to_string(), found: ch })?;
            raw.push(l);
        }
        Word::reduce(&raw, rank)
    }

    pub fn letters(&self) -> &[i32] {
        &self.letters
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn inverse(&self) -> Word {
        Word { letters: self.letters.iter().rev().map(|l| -l).collect(), rank: self.rank }
    }

    pub fn mul(&self, other: &Word) -> Word {
        debug_assert_eq!(self.rank, other.rank);
        Word {
            letters: free_reduce(self.letters.iter().chain(other.letters.iter()).copied()),
            rank: self.rank,
        }
    }

    pub fn pow(&self, k: i64) -> Word {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut out = Word::identity(self.rank);
        for _ in 0..k.unsigned_abs() {
            out = out.mul(&base);
        }
        out
    }

    /// `g w g^-1`
    pub fn conjugate_by(&self, g: &Word) -> Word {
        g.mul(self).mul(&g.inverse())
    }

    /// Splits `w = p c p^-1` with `c` cyclically reduced.
    pub fn cyclic_split(&self) -> (Word, Word) {
        let l = &self.letters;
        let mut i = 0;
        while i + 1 < l.len().saturating_sub(i) && l[i] == -l[l.len() - 1 - i] {
            i += 1;
        }
        let p = Word { letters: l[..i].to_vec(), rank: self.rank };
        let c = Word { letters: l[i..l.len() - i].to_vec(), rank: self.rank };
        (p, c)
    }

    /// Substitutes `images[k-1]` for `x_k`.
    pub fn substitute(&self, images: &[Word]) -> Word {
        let rank = images.first().map(|w| w.rank).unwrap_or(self.rank);
        let mut raw = Vec::new();
        for &l in &self.letters {
            let img = &images[l.unsigned_abs() as usize - 1];
            if l > 0 {
                raw.extend_from_slice(&img.letters);
            } else {
                raw.extend(img.letters.iter().rev().map(|x| -x));
            }
        }
        Word { letters: free_reduce(raw), rank }
    }

    /// Exponent sum per generator.
    pub fn abelianize(&self) -> Vec<i64> {
        let mut v = vec![0i64; self.rank];
        for &l in &self.letters {
            v[l.unsigned_abs() as usize - 1] += l.signum() as i64;
        }
        v
    }
}

pub fn letter_of(ch: char) -> Option<i32> {
    if ch.is_ascii_lowercase() {
        Some((ch as u8 - b'a') as i32 + 1)
    } else if ch.is_ascii_uppercase() {
        Some(-((ch as u8 - b'A') as i32 + 1))
    } else {
        None
    }
}

pub fn char_of(l: i32) -> char {
    let k = (l.unsigned_abs() - 1) as u8;
    if l > 0 {
        (b'a' + k) as char
    } else {
        (b'A' + k) as char
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "1");
        }
        for &l in &self.letters {
            write!(f, "{}", char_of(l))?;
        }
        Ok(())
    }
}

/// Conjugacy class of a nontrivial element, stored as the least rotation of
/// its cyclic reduction.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CyclicWord {
    letters: Vec<i32>,
    rank: usize,
}

pub fn least_rotation<T: Ord + Clone>(s: &[T]) -> Vec<T> {
    let n = s.len();
    let mut best: Option<Vec<T>> = None;
    for r in 0..n {
        let cand: Vec<T> = s[r..].iter().chain(s[..r].iter()).cloned().collect();
        if best.as_ref().is_none_or(|b| cand < *b) {
            best = Some(cand);
        }
    }
    best.unwrap_or_default()
}

impl CyclicWord {
    pub fn letters(&self) -> &[i32] {
        &self.letters
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn to_word(&self) -> Word {
        Word { letters: self.letters.clone(), rank: self.rank }
    }

    pub fn inverse(&self) -> CyclicWord {
        conjugacy_class(&self.to_word().inverse()).expect("nontrivial")
    }

    pub fn parse(text: &str, rank: usize) -> Result<CyclicWord, WordError> {
        conjugacy_class(&Word::parse(text, rank)?)
    }
}

impl fmt::Display for CyclicWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.to_word())
    }
}

pub fn conjugacy_class(w: &Word) -> Result<CyclicWord, WordError> {
    let (_, c) = w.cyclic_split();
    if c.is_empty() {
        return Err(WordError::EmptyWord);
    }
    Ok(CyclicWord { letters: least_rotation(&c.letters), rank: w.rank })
}

/// Smallest `p` with `s` equal to `s[..p]` repeated.
pub fn primitive_period<T: PartialEq>(s: &[T]) -> usize {
    let n = s.len();
    (1..=n).find(|&p| n.is_multiple_of(p) && (p..n).all(|i| s[i] == s[i - p])).unwrap_or(n)
}

/// `w = root^exponent` with `root` not a proper power.
pub fn root_decomposition(w: &Word) -> Result<(Word, u32), WordError> {
    let (p, c) = w.cyclic_split();
    if c.is_empty() {
        return Err(WordError::EmptyWord);
    }
    let per = primitive_period(&c.letters);
    let core = Word { letters: c.letters[..per].to_vec(), rank: w.rank };
    Ok((core.conjugate_by(&p), (c.len() / per) as u32))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        Word::parse(s, 3).unwrap()
    }

    #[test]
    fn reduce_cases() {
        assert!(Word::reduce(&[1, -1], 2).unwrap().is_empty());
        assert_eq!(Word::reduce(&[1, 2, -2, 1], 2).unwrap().letters(), &[1, 1]);
        // stack oracle written independently
        let raw = [2, 1, -1, -2, 3];
        let mut st: Vec<i32> = vec![];
        for x in raw {
            match st.last() {
                Some(&y) if y == -x => {
                    st.pop();
                }
                _ => st.push(x),
            }
        }
        assert_eq!(Word::reduce(&raw, 3).unwrap().letters(), st.as_slice());
        assert_eq!(st, vec![3]);
    }

    #[test]
    fn reduce_rejects_out_of_range() {
        assert_eq!(
            Word::reduce(&[1, 4], 3),
            Err(WordError::InvalidGenerator { index: 4, rank: 3 })
        );
        assert!(Word::reduce(&[0], 3).is_err());
    }

    #[test]
    fn conjugacy_examples() {
        assert_eq!(conjugacy_class(&w("baB")).unwrap(), conjugacy_class(&w("a")).unwrap());
        assert_eq!(conjugacy_class(&w("ab")).unwrap(), conjugacy_class(&w("ba")).unwrap());
        assert_ne!(conjugacy_class(&w("abAb")).unwrap(), conjugacy_class(&w("bb")).unwrap());
        assert_eq!(conjugacy_class(&w("abAb")).unwrap().len(), 4);
        assert_eq!(conjugacy_class(&w("")), Err(WordError::EmptyWord));
    }

    #[test]
    fn conjugator_search_confirms_inequivalence() {
        // brute force: no g of length <= 6 conjugates abAb to bb
        let target = w("bb");
        let src = w("abAb");
        let mut frontier = vec![Word::identity(3)];
        for _ in 0..6 {
            let mut next = vec![];
            for g in &frontier {
                for l in [1, -1, 2, -2, 3, -3] {
                    let h = g.mul(&Word::reduce(&[l], 3).unwrap());
                    if h.len() == g.len() + 1 {
                        assert_ne!(src.conjugate_by(&h), target);
                        next.push(h);
                    }
                }
            }
            frontier = next;
        }
    }

    #[test]
    fn roots() {
        assert_eq!(root_decomposition(&w("aa")).unwrap(), (w("a"), 2));
        assert_eq!(root_decomposition(&w("ab")).unwrap(), (w("ab"), 1));
        let x = w("cabababC");
        let (r, e) = root_decomposition(&x).unwrap();
        assert_eq!(e, 3);
        assert_eq!(r, w("cabC"));
        assert_eq!(r.pow(3), x);
        assert_eq!(root_decomposition(&w("")), Err(WordError::EmptyWord));
    }

    #[test]
    fn text_round_trip() {
        assert_eq!(w("abA").to_string(), "abA");
        assert_eq!(w("aA").to_string(), "1");
        assert_eq!(w("abA").letters(), &[1, 2, -1]);
    }
}

//! Reduced words in the free group on `k` generators.
//!
//! Letters are `(generator, sign)` pairs. Words print as strings where
//! generator `i` is the `i`-th lowercase letter and its inverse the matching
//! uppercase letter, so `"aB"` is `a·b⁻¹`; the empty word prints as `""`.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::ops::Mul;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Default cap on the number of words [`enumerate_ball`] will produce.
pub const DEFAULT_BALL_CAP: usize = 5_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub generator: u8,
    /// `true` for the inverse generator.
    pub inverse: bool,
}

impl Letter {
    pub const fn new(generator: u8, inverse: bool) -> Self {
        Self { generator, inverse }
    }

    pub fn inv(self) -> Self {
        Self { generator: self.generator, inverse: !self.inverse }
    }

    pub fn sign(self) -> i64 {
        if self.inverse {
            -1
        } else {
            1
        }
    }

    /// Position in the alphabet `a, A, b, B, ...` used for lexicographic order.
    fn rank(self) -> usize {
        2 * self.generator as usize + self.inverse as usize
    }

    fn to_char(self) -> char {
        let c = (b'a' + self.generator) as char;
        if self.inverse {
            c.to_ascii_uppercase()
        } else {
            c
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct FreeWord {
    letters: Vec<Letter>,
}

impl FreeWord {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn generator(g: u8) -> Self {
        Self { letters: vec![Letter::new(g, false)] }
    }

    /// Builds the reduced form of an arbitrary letter sequence.
    pub fn from_letters<I: IntoIterator<Item = Letter>>(letters: I) -> Self {
        let mut out: Vec<Letter> = Vec::new();
        for l in letters {
            if out.last() == Some(&l.inv()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Self { letters: out }
    }

    /// Signed-integer form: `+(i+1)` for generator `i`, `-(i+1)` for its inverse.
    pub fn from_signed(seq: &[i32]) -> Self {
        Self::from_letters(seq.iter().map(|&x| {
            assert!(x != 0, "letter 0 is not allowed");
            Letter::new((x.unsigned_abs() - 1) as u8, x < 0)
        }))
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn is_reduced(&self) -> bool {
        self.letters.windows(2).all(|w| w[0] != w[1].inv())
    }

    pub fn inverse(&self) -> Self {
        Self { letters: self.letters.iter().rev().map(|l| l.inv()).collect() }
    }

    /// Word with its last letter deleted (`e` stays `e`).
    pub fn parent(&self) -> Self {
        let mut letters = self.letters.clone();
        letters.pop();
        Self { letters }
    }

    pub fn pow(&self, n: i64) -> Self {
        let base = if n < 0 { self.inverse() } else { self.clone() };
        let mut acc = Self::empty();
        for _ in 0..n.unsigned_abs() {
            acc = &acc * &base;
        }
        acc
    }

    /// Sum of exponents of generator `g`.
    pub fn exponent_sum(&self, g: u8) -> i64 {
        self.letters.iter().filter(|l| l.generator == g).map(|l| l.sign()).sum()
    }

    /// Largest generator index used, plus one.
    pub fn rank_used(&self) -> usize {
        self.letters.iter().map(|l| l.generator as usize + 1).max().unwrap_or(0)
    }

    /// Splits `w = u·c·u⁻¹` with `c` cyclically reduced; returns `(u, c)`.
    pub fn cyclic_reduction(&self) -> (FreeWord, FreeWord) {
        let l = &self.letters;
        let mut i = 0;
        let mut j = l.len();
        while j >= i + 2 && l[i] == l[j - 1].inv() {
            i += 1;
            j -= 1;
        }
        (
            FreeWord { letters: l[..i].to_vec() },
            FreeWord { letters: l[i..j].to_vec() },
        )
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        self.is_reduced()
            && match (self.letters.first(), self.letters.last()) {
                (Some(&f), Some(&b)) => self.len() == 1 || f != b.inv(),
                _ => true,
            }
    }

    /// Maximal runs `s^n` of a single generator, in order.
    pub fn syllables(&self) -> Vec<(u8, i64)> {
        let mut out: Vec<(u8, i64)> = Vec::new();
        for l in &self.letters {
            match out.last_mut() {
                Some((g, n)) if *g == l.generator => *n += l.sign(),
                _ => out.push((l.generator, l.sign())),
            }
        }
        out
    }

    /// Length-then-lexicographic order over the alphabet `a, A, b, B, ...`.
    pub fn shortlex_cmp(&self, other: &Self) -> Ordering {
        self.len().cmp(&other.len()).then_with(|| {
            self.letters
                .iter()
                .map(|l| l.rank())
                .cmp(other.letters.iter().map(|l| l.rank()))
        })
    }
}

/// Reduced product of two reduced words.
pub fn multiply_words(u: &FreeWord, v: &FreeWord) -> FreeWord {
    let mut k = 0;
    let (a, b) = (&u.letters, &v.letters);
    while k < a.len() && k < b.len() && a[a.len() - 1 - k] == b[k].inv() {
        k += 1;
    }
    let mut letters = Vec::with_capacity(a.len() + b.len() - 2 * k);
    letters.extend_from_slice(&a[..a.len() - k]);
    letters.extend_from_slice(&b[k..]);
    FreeWord { letters }
}

impl Mul for &FreeWord {
    type Output = FreeWord;

    fn mul(self, rhs: &FreeWord) -> FreeWord {
        multiply_words(self, rhs)
    }
}

impl fmt::Display for FreeWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.letters {
            write!(f, "{}", l.to_char())?;
        }
        Ok(())
    }
}

impl FromStr for FreeWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let letters = s
            .chars()
            .map(|c| {
                if c.is_ascii_lowercase() {
                    Ok(Letter::new(c as u8 - b'a', false))
                } else if c.is_ascii_uppercase() {
                    Ok(Letter::new(c as u8 - b'A', true))
                } else {
                    Err(Error::Parse(format!("bad letter {c:?} in word {s:?}")))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        let w = FreeWord { letters };
        if !w.is_reduced() {
            return Err(Error::Parse(format!("word {s:?} is not reduced")));
        }
        Ok(w)
    }
}

/// Number of reduced words of length at most `radius` over `k` generators.
pub fn ball_size(k: usize, radius: usize) -> u128 {
    let mut total: u128 = 1;
    let mut sphere: u128 = 2 * k as u128;
    for _ in 0..radius {
        total = total.saturating_add(sphere);
        sphere = sphere.saturating_mul(2 * k as u128 - 1);
    }
    total
}

/// All reduced words of length `<= radius`, in shortlex order.
pub fn enumerate_ball(k: usize, radius: usize) -> Result<Vec<FreeWord>> {
    enumerate_ball_capped(k, radius, DEFAULT_BALL_CAP)
}

pub fn enumerate_ball_capped(k: usize, radius: usize, cap: usize) -> Result<Vec<FreeWord>> {
    if k == 0 || k > 26 {
        return Err(Error::Usage(format!("generator count must be in 1..=26, got {k}")));
    }
    let count = ball_size(k, radius);
    if count > cap as u128 {
        return Err(Error::EnumerationCap { count, cap });
    }
    let alphabet: Vec<Letter> = (0..k as u8)
        .flat_map(|g| [Letter::new(g, false), Letter::new(g, true)])
        .collect();
    let mut out = Vec::with_capacity(count as usize);
    out.push(FreeWord::empty());
    let mut start = 0;
    for _ in 0..radius {
        let end = out.len();
        // extending a shortlex-sorted sphere letter by letter keeps it sorted
        for i in start..end {
            for &l in &alphabet {
                if out[i].letters.last() == Some(&l.inv()) {
                    continue;
                }
                let mut letters = out[i].letters.clone();
                letters.push(l);
                out.push(FreeWord { letters });
            }
        }
        start = end;
    }
    Ok(out)
}

/// Sentinel for a missing trie edge.
pub const NO_WORD: u32 = u32::MAX;

/// The ball of radius `L` with an index and trie edges.
///
/// Words are stored in shortlex order. `child(i, l)` is the index of
/// `word(i)·l` when that product is reduced and still inside the ball.
#[derive(Debug, Clone)]
pub struct WordBall {
    k: usize,
    radius: usize,
    words: Vec<FreeWord>,
    index: HashMap<FreeWord, usize>,
    child: Vec<u32>,
    parent: Vec<u32>,
}

impl WordBall {
    pub fn new(k: usize, radius: usize) -> Result<Self> {
        let words = enumerate_ball(k, radius)?;
        let index: HashMap<FreeWord, usize> =
            words.iter().cloned().enumerate().map(|(i, w)| (w, i)).collect();
        let width = 2 * k;
        let mut child = vec![NO_WORD; words.len() * width];
        let mut parent = vec![NO_WORD; words.len()];
        for (i, w) in words.iter().enumerate() {
            if let Some(last) = w.letters.last() {
                let p = index[&w.parent()];
                parent[i] = p as u32;
                child[p * width + last.rank()] = i as u32;
            }
        }
        Ok(Self { k, radius, words, index, child, parent })
    }

    pub fn generators(&self) -> usize {
        self.k
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn words(&self) -> &[FreeWord] {
        &self.words
    }

    pub fn word(&self, i: usize) -> &FreeWord {
        &self.words[i]
    }

    pub fn index_of(&self, w: &FreeWord) -> Option<usize> {
        self.index.get(w).copied()
    }

    /// Number of words of length `<= r` (a prefix of the shortlex listing).
    pub fn prefix_len(&self, r: usize) -> usize {
        ball_size(self.k, r.min(self.radius)) as usize
    }

    #[inline]
    pub fn child(&self, i: usize, l: Letter) -> Option<usize> {
        let c = self.child[i * 2 * self.k + l.rank()];
        (c != NO_WORD).then_some(c as usize)
    }

    #[inline]
    pub fn parent(&self, i: usize) -> Option<usize> {
        let p = self.parent[i];
        (p != NO_WORD).then_some(p as usize)
    }

    /// Index of `word(i)·l` after reduction, if it lies in the ball.
    #[inline]
    pub fn right_mul_letter(&self, i: usize, l: Letter) -> Option<usize> {
        match self.words[i].letters.last() {
            Some(&last) if last == l.inv() => self.parent(i),
            _ => self.child(i, l),
        }
    }

    /// Index of the reduced product, if it lies in the ball.
    pub fn product(&self, i: usize, j: usize) -> Option<usize> {
        let mut cur = i;
        for &l in &self.words[j].letters {
            cur = self.right_mul_letter(cur, l)?;
        }
        Some(cur)
    }

    /// Visits every pair `(x, y)` with `|x|, |y|, |xy| <= r` as index triples
    /// `(x, y, xy)`. Each pair is visited once; the visiting order is not
    /// the lexicographic order of `(x, y)`.
    pub fn for_each_pair_within(&self, r: usize, mut f: impl FnMut(usize, usize, usize)) {
        let r = r.min(self.radius);
        let n = self.prefix_len(r);
        for x in 0..n {
            let xw = &self.words[x].letters;
            // y = s⁻¹·q where s is the length-k suffix of x that cancels
            let mut p = x;
            let mut s_inv = 0usize; // index of s⁻¹
            for k in 0..=xw.len() {
                if k > 0 {
                    let l = xw[xw.len() - k];
                    p = self.parent(p).expect("prefix exists");
                    // s⁻¹ grows on the right by the inverse of the newly cancelled letter
                    s_inv = self.child(s_inv, l.inv()).expect("suffix inverse fits in ball");
                }
                if k > r {
                    break;
                }
                let plen = xw.len() - k;
                // first letter of q must not cancel against p or against s⁻¹
                let forbid_p = xw.get(plen.wrapping_sub(1)).filter(|_| plen > 0).map(|l| l.inv());
                let forbid_s = if k > 0 { Some(xw[plen]) } else { None };
                let budget = (r - plen).min(r - k);
                f(x, s_inv, p);
                if budget == 0 {
                    continue;
                }
                for g in 0..self.k as u8 {
                    for inv in [false, true] {
                        let l = Letter::new(g, inv);
                        if Some(l) == forbid_p || Some(l) == forbid_s {
                            continue;
                        }
                        self.walk_q(p, s_inv, l, budget, &mut f, x);
                    }
                }
            }
        }
    }

    fn walk_q(
        &self,
        pq: usize,
        sq: usize,
        l: Letter,
        budget: usize,
        f: &mut impl FnMut(usize, usize, usize),
        x: usize,
    ) {
        let (Some(pq), Some(sq)) = (self.child(pq, l), self.child(sq, l)) else {
            return;
        };
        f(x, sq, pq);
        if budget == 1 {
            return;
        }
        for g in 0..self.k as u8 {
            for inv in [false, true] {
                let m = Letter::new(g, inv);
                if m == l.inv() {
                    continue;
                }
                self.walk_q(pq, sq, m, budget - 1, f, x);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn w(s: &str) -> FreeWord {
        s.parse().unwrap()
    }

    /// Repeated single-pair cancellation until nothing changes.
    fn naive_reduce(mut letters: Vec<Letter>) -> Vec<Letter> {
        loop {
            let pos = letters.windows(2).position(|p| p[0] == p[1].inv());
            match pos {
                Some(i) => {
                    letters.drain(i..i + 2);
                }
                None => return letters,
            }
        }
    }

    #[test]
    fn multiply_examples() {
        assert_eq!(&w("a") * &w("A"), FreeWord::empty());
        assert_eq!(&w("ab") * &w("Ba"), w("aa"));
        assert_eq!(&w("abA") * &w("aBB"), w("aB"));
    }

    #[test]
    fn ball_counts() {
        assert_eq!(enumerate_ball(2, 0).unwrap(), vec![FreeWord::empty()]);
        assert_eq!(enumerate_ball(2, 1).unwrap().len(), 5);
        let ball = enumerate_ball(2, 3).unwrap();
        assert_eq!(ball.len(), 53);
        assert_eq!(ball_size(2, 3), 53);

        // exhaustive generation: all letter strings of length <= 3, keep reduced ones
        let alphabet = [w("a"), w("A"), w("b"), w("B")];
        let mut brute = std::collections::BTreeSet::new();
        brute.insert(String::new());
        let mut layer = vec![Vec::<Letter>::new()];
        for _ in 0..3 {
            let mut next = Vec::new();
            for word in &layer {
                for a in &alphabet {
                    let mut x = word.clone();
                    x.push(a.letters[0]);
                    next.push(x);
                }
            }
            for x in &next {
                let f = FreeWord { letters: x.clone() };
                if f.is_reduced() {
                    brute.insert(f.to_string());
                }
            }
            layer = next;
        }
        let listed: std::collections::BTreeSet<String> = ball.iter().map(|x| x.to_string()).collect();
        assert_eq!(listed, brute);
    }

    #[test]
    fn ball_is_shortlex_sorted_without_duplicates() {
        let ball = enumerate_ball(3, 3).unwrap();
        for pair in ball.windows(2) {
            assert_eq!(pair[0].shortlex_cmp(&pair[1]), Ordering::Less);
        }
        assert!(ball.iter().all(FreeWord::is_reduced));
    }

    #[test]
    fn cap_is_reported() {
        let err = enumerate_ball_capped(2, 10, 1000).unwrap_err();
        assert!(err.to_string().contains("cap of 1000"), "{err}");
    }

    #[test]
    fn string_roundtrip_and_helpers() {
        let x = w("abAAb");
        assert_eq!(x.to_string(), "abAAb");
        assert_eq!(x.syllables(), vec![(0, 1), (1, 1), (0, -2), (1, 1)]);
        assert_eq!(x.exponent_sum(0), -1);
        assert!("aA".parse::<FreeWord>().is_err());
        assert_eq!(w("abA").cyclic_reduction(), (w("a"), w("b")));
        assert_eq!(w("a").parent(), FreeWord::empty());
        assert_eq!(w("ab").pow(-2), w("BABA"));
    }

    #[test]
    fn ball_trie_and_pair_walk() {
        let ball = WordBall::new(2, 4).unwrap();
        for i in 0..ball.len() {
            for j in 0..ball.len() {
                let prod = ball.word(i) * ball.word(j);
                assert_eq!(ball.product(i, j), ball.index_of(&prod));
            }
        }
        for r in 0..=4 {
            let mut seen = std::collections::BTreeSet::new();
            ball.for_each_pair_within(r, |x, y, xy| {
                assert_eq!(ball.index_of(&(ball.word(x) * ball.word(y))), Some(xy));
                assert!(seen.insert((x, y)), "pair visited twice");
            });
            let n = ball.prefix_len(r);
            let mut expected = std::collections::BTreeSet::new();
            for x in 0..n {
                for y in 0..n {
                    if (ball.word(x) * ball.word(y)).len() <= r {
                        expected.insert((x, y));
                    }
                }
            }
            assert_eq!(seen, expected, "radius {r}");
        }
    }

    fn letter() -> impl Strategy<Value = Letter> {
        (0u8..2, any::<bool>()).prop_map(|(g, i)| Letter::new(g, i))
    }

    proptest! {
        #[test]
        fn product_matches_naive_reduction(
            a in prop::collection::vec(letter(), 0..=6),
            b in prop::collection::vec(letter(), 0..=6),
        ) {
            let u = FreeWord::from_letters(a);
            let v = FreeWord::from_letters(b);
            let mut concat = u.letters.clone();
            concat.extend_from_slice(&v.letters);
            let p = multiply_words(&u, &v);
            let expected = naive_reduce(concat);
            prop_assert_eq!(p.letters(), expected.as_slice());
            prop_assert!(p.len() <= u.len() + v.len());
            prop_assert_eq!(&p * &v.inverse(), u);
        }
    }
}

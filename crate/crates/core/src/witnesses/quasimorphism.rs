//! Homogeneous Brooks counting quasimorphisms on free groups.

use crate::error::{Error, Result};
use crate::quasirep::Sup;
use crate::word::{FreeWord, Letter, WordBall};

/// Default pattern.
pub const DEFAULT_PATTERN: &str = "ab";

#[inline]
fn code(l: Letter) -> u8 {
    2 * l.generator + l.inverse as u8
}

fn codes(w: &FreeWord) -> Vec<u8> {
    w.letters().iter().map(|&l| code(l)).collect()
}

/// Occurrences of `pat` in `word`, overlapping ones included.
fn count_linear(word: &[u8], pat: &[u8]) -> i64 {
    if pat.len() > word.len() {
        return 0;
    }
    word.windows(pat.len()).filter(|w| *w == pat).count() as i64
}

/// Occurrences of `pat` in the cyclic word `c`, starting at each position.
#[inline]
fn count_cyclic(c: &[u8], pat: &[u8]) -> i64 {
    let n = c.len();
    let mut count = 0;
    for i in 0..n {
        let mut j = 0;
        let mut p = i;
        while j < pat.len() && c[p] == pat[j] {
            j += 1;
            p += 1;
            if p == n {
                p = 0;
            }
        }
        count += (j == pat.len()) as i64;
    }
    count
}

/// Bounds of the cyclic reduction of a reduced word.
#[inline]
fn cyclic_core(w: &[u8]) -> &[u8] {
    let (mut i, mut j) = (0, w.len());
    while j >= i + 2 && w[i] == w[j - 1] ^ 1 {
        i += 1;
        j -= 1;
    }
    &w[i..j]
}

/// `φ = homogenization of C_w − C_{w⁻¹}` for a non-self-overlapping
/// pattern `w`.
#[derive(Debug, Clone)]
pub struct Quasimorphism {
    pattern: FreeWord,
    fwd: Vec<u8>,
    bwd: Vec<u8>,
    rank: usize,
}

/// Brooks quasimorphism of a pattern on the free group of rank
/// `max(2, generators used)`.
pub fn brooks_phi(w: &FreeWord) -> Result<Quasimorphism> {
    if w.len() < 2 {
        return Err(Error::Usage("pattern must have length at least 2".into()));
    }
    if !w.is_cyclically_reduced() {
        return Err(Error::Usage(format!("pattern {w} is not cyclically reduced")));
    }
    let l = w.letters();
    if let Some(k) = (1..l.len()).find(|&k| l[..k] == l[l.len() - k..]) {
        return Err(Error::Usage(format!(
            "pattern {w} overlaps itself: prefix of length {k} equals a suffix"
        )));
    }
    Ok(Quasimorphism {
        fwd: codes(w),
        bwd: codes(&w.inverse()),
        rank: w.rank_used().max(2),
        pattern: w.clone(),
    })
}

impl Quasimorphism {
    pub fn pattern(&self) -> &FreeWord {
        &self.pattern
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Counting function `C_w − C_{w⁻¹}` (not homogeneous).
    pub fn counting(&self, g: &FreeWord) -> i64 {
        let c = codes(g);
        count_linear(&c, &self.fwd) - count_linear(&c, &self.bwd)
    }

    /// `C(c^{N+1}) − C(c^N)` with `N = |w| + 1` on the cyclic reduction `c`.
    pub fn eval_by_powers(&self, g: &FreeWord) -> i64 {
        let (_, c) = g.cyclic_reduction();
        let n = self.pattern.len() as i64 + 1;
        self.counting(&c.pow(n + 1)) - self.counting(&c.pow(n))
    }

    /// `C(g^n)/n`, which converges to `φ(g)`.
    pub fn eval_limit(&self, g: &FreeWord, n: i64) -> f64 {
        self.counting(&g.pow(n)) as f64 / n as f64
    }

    /// `φ(g)`, by counting occurrences in the cyclic reduction read as a
    /// cyclic word.
    pub fn eval(&self, g: &FreeWord) -> i64 {
        self.eval_codes(&codes(g))
    }

    #[inline]
    fn eval_codes(&self, w: &[u8]) -> i64 {
        let c = cyclic_core(w);
        if c.is_empty() {
            return 0;
        }
        count_cyclic(c, &self.fwd) - count_cyclic(c, &self.bwd)
    }
}

/// Reduced word kept as a stack together with running signed pattern
/// counts, so `φ` of the current word costs `O(|w|)` plus the depth of
/// its cyclic cancellation.
struct CountedStack<'a> {
    phi: &'a Quasimorphism,
    letters: Vec<u8>,
    /// `prefix[j]`: signed occurrences ending strictly before position `j`.
    prefix: Vec<i64>,
}

impl<'a> CountedStack<'a> {
    fn new(phi: &'a Quasimorphism, capacity: usize) -> Self {
        let mut prefix = Vec::with_capacity(capacity + 1);
        prefix.push(0);
        Self { phi, letters: Vec::with_capacity(capacity), prefix }
    }

    fn clear(&mut self) {
        self.letters.clear();
        self.prefix.truncate(1);
    }

    fn last(&self) -> Option<u8> {
        self.letters.last().copied()
    }

    fn ends_with(&self, pat: &[u8]) -> bool {
        self.letters.ends_with(pat)
    }

    fn push(&mut self, c: u8) {
        self.letters.push(c);
        let step = self.ends_with(&self.phi.fwd) as i64 - self.ends_with(&self.phi.bwd) as i64;
        let last = *self.prefix.last().expect("prefix starts at 0");
        self.prefix.push(last + step);
    }

    fn pop(&mut self) {
        self.letters.pop();
        self.prefix.pop();
    }

    fn phi(&self) -> i64 {
        let w = &self.letters;
        let n = w.len();
        let mut i = 0;
        while n >= 2 * i + 2 && w[i] == w[n - 1 - i] ^ 1 {
            i += 1;
        }
        let core = &w[i..n - i];
        let m = self.phi.fwd.len();
        if core.len() < 2 * m {
            return if core.is_empty() {
                0
            } else {
                count_cyclic(core, &self.phi.fwd) - count_cyclic(core, &self.phi.bwd)
            };
        }
        // occurrences inside the core, then those wrapping around its end
        let inside = self.prefix[n - i] - self.prefix[i + m - 1];
        let mut wrap = 0;
        for start in core.len() - m + 1..core.len() {
            let head = core.len() - start;
            let matches = |pat: &[u8]| core[start..] == pat[..head] && core[..m - head] == pat[head..];
            wrap += matches(&self.phi.fwd) as i64 - matches(&self.phi.bwd) as i64;
        }
        inside + wrap
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoboundaryReport {
    pub value: f64,
    pub witness: (FreeWord, FreeWord),
    pub truncation: usize,
}

/// `max |φ(γη) − φ(γ) − φ(η)|` over all `|γ|, |η| <= L`.
///
/// For each `γ` the ball is walked as a trie in `η` while the reduced
/// product is kept on a stack, so each pair costs one cyclic count.
pub fn coboundary_sup(phi: &Quasimorphism, truncation: usize) -> Result<CoboundaryReport> {
    if truncation == 0 {
        return Err(Error::Usage("truncation must be at least 1".into()));
    }
    let ball = WordBall::new(phi.rank, truncation)?;
    let phis: Vec<i64> = ball.words().iter().map(|w| phi.eval(w)).collect();
    let letters: Vec<Letter> = (0..phi.rank as u8)
        .flat_map(|g| [Letter::new(g, false), Letter::new(g, true)])
        .collect();
    let mut best = Sup::default();
    let mut stack = CountedStack::new(phi, 2 * truncation);
    // (η index, letter index to try next, popped code if the step cancelled)
    let mut frames: Vec<(usize, usize, Option<u8>)> = Vec::with_capacity(truncation + 1);
    for g in 0..ball.len() {
        stack.clear();
        for c in codes(ball.word(g)) {
            stack.push(c);
        }
        let pg = phis[g];
        best.offer(0.0, (g, 0));
        frames.clear();
        frames.push((0, 0, None));
        while let Some(top) = frames.last_mut() {
            let (eta, next) = (top.0, top.1);
            if next == letters.len() {
                let (_, _, popped) = frames.pop().expect("nonempty");
                if frames.is_empty() {
                    break;
                }
                match popped {
                    Some(c) => stack.push(c),
                    None => stack.pop(),
                }
                continue;
            }
            top.1 += 1;
            let Some(child) = ball.child(eta, letters[next]) else { continue };
            let lc = code(letters[next]);
            let popped = if stack.last() == Some(lc ^ 1) {
                stack.pop();
                Some(lc ^ 1)
            } else {
                stack.push(lc);
                None
            };
            let d = (stack.phi() - pg - phis[child]).abs() as f64;
            if d >= best.value {
                best.offer(d, (g, child));
            }
            frames.push((child, 0, popped));
        }
    }
    Ok(CoboundaryReport {
        value: best.value,
        witness: (ball.word(best.at.0).clone(), ball.word(best.at.1).clone()),
        truncation,
    })
}

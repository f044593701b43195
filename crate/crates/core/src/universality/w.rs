//! The sparse word family: two words `a b^(2r) c` and `a b^(2q+1) c` for every
//! triple of non-empty binary words, with all lengths pairwise distinct.

use std::cmp::Ordering;
use std::collections::HashSet;
use std::fmt;
use std::sync::Mutex;

use super::sq::{is_binary, sq_decode};
use crate::error::{Error, Result};

/// Triples are processed level by level, `|abc|` ascending.
pub const MAX_LEVEL: usize = 12;

/// Family words up to this length are checked against the doubling code
/// when their entry is created.
pub const CODE_CHECK_LEN: u64 = 1 << 17;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WEntry {
    pub a: String,
    pub b: String,
    pub c: String,
    /// Exponent half for the word outside the language.
    pub r: u64,
    /// Exponent half for the word inside the language.
    pub q: u64,
}

impl WEntry {
    fn len_with(&self, k: u64) -> u64 {
        (self.a.len() + self.c.len()) as u64 + k * self.b.len() as u64
    }

    /// Length of `a b^(2r) c`.
    pub fn even_len(&self) -> u64 {
        self.len_with(2 * self.r)
    }

    /// Length of `a b^(2q+1) c`.
    pub fn odd_len(&self) -> u64 {
        self.len_with(2 * self.q + 1)
    }

    fn word(&self, k: u64) -> String {
        format!("{}{}{}", self.a, self.b.repeat(k as usize), self.c)
    }

    /// `a b^(2r) c`, the member outside the language.
    pub fn even_word(&self) -> String {
        self.word(2 * self.r)
    }

    /// `a b^(2q+1) c`, the member inside the language.
    pub fn odd_word(&self) -> String {
        self.word(2 * self.q + 1)
    }
}

impl fmt::Display for WEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "a={} b={} c={} r={} q={} len_r={} len_q={}",
            self.a,
            self.b,
            self.c,
            self.r,
            self.q,
            self.even_len(),
            self.odd_len()
        )
    }
}

/// Word of the family together with its side.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WHit {
    pub entry: WEntry,
    /// True for the `b^(2q+1)` word, which belongs to the language.
    pub in_language: bool,
}

/// Binary words of length `n` in lexicographic order.
fn words_of_len(n: usize) -> impl Iterator<Item = String> {
    (0..1u64 << n).map(move |v| {
        (0..n)
            .rev()
            .map(|i| if v >> i & 1 == 1 { '1' } else { '0' })
            .collect()
    })
}

/// All triples with `|abc| = level`, in processing order: componentwise,
/// each component by length and then lexicographically.
pub fn triples_of_level(level: usize) -> Vec<(String, String, String)> {
    let mut out = Vec::new();
    for la in 1..level.saturating_sub(1) {
        for a in words_of_len(la) {
            for lb in 1..level - la {
                let lc = level - la - lb;
                for b in words_of_len(lb) {
                    for c in words_of_len(lc) {
                        out.push((a.clone(), b.clone(), c));
                    }
                }
            }
        }
    }
    out
}

/// Processing order on triples.
pub fn triple_cmp(x: (&str, &str, &str), y: (&str, &str, &str)) -> Ordering {
    let total = |t: (&str, &str, &str)| t.0.len() + t.1.len() + t.2.len();
    let word = |u: &str, v: &str| u.len().cmp(&v.len()).then_with(|| u.cmp(v));
    total(x)
        .cmp(&total(y))
        .then_with(|| word(x.0, y.0))
        .then_with(|| word(x.1, y.1))
        .then_with(|| word(x.2, y.2))
}

/// `[2^(3n+3), 2^(3n+4))` for triples with `|abc| = n`.
pub fn default_range(level: usize) -> (u64, u64) {
    (1u64 << (3 * level + 3), 1u64 << (3 * level + 4))
}

type RangeFn = Box<dyn Fn(usize) -> (u64, u64) + Send + Sync>;

#[derive(Default)]
struct Progress {
    entries: Vec<WEntry>,
    used: HashSet<u64>,
    /// Levels fully processed so far; the next one is `done_levels + 3`.
    done_levels: usize,
}

/// Memoized inductive construction. Entries are produced in triple order
/// and shared by every caller holding the same value.
pub struct WConstruction {
    range: RangeFn,
    progress: Mutex<Progress>,
}

impl Default for WConstruction {
    fn default() -> Self {
        Self::new()
    }
}

impl fmt::Debug for WConstruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = self.progress.lock().expect("w cache poisoned");
        f.debug_struct("WConstruction")
            .field("entries", &p.entries.len())
            .finish()
    }
}

impl WConstruction {
    pub fn new() -> Self {
        Self::with_range(default_range)
    }

    /// Same construction with another length window per level. Used to get
    /// short family words in tests.
    pub fn with_range(range: impl Fn(usize) -> (u64, u64) + Send + Sync + 'static) -> Self {
        WConstruction {
            range: Box::new(range),
            progress: Mutex::new(Progress::default()),
        }
    }

    fn process_level(&self, p: &mut Progress) -> Result<()> {
        let level = p.done_levels + 3;
        if level > MAX_LEVEL {
            return Err(Error::CapExceeded(format!(
                "triple level {level} exceeds the limit {MAX_LEVEL}"
            )));
        }
        let (lo, hi) = (self.range)(level);
        for (a, b, c) in triples_of_level(level) {
            let fixed = (a.len() + c.len()) as u64;
            let step = b.len() as u64;
            let pick = |odd: u64, used: &HashSet<u64>| -> Option<u64> {
                // smallest j with fixed + (2j + odd) * step >= lo
                let need = lo.saturating_sub(fixed + odd * step);
                let mut j = need.div_ceil(2 * step);
                loop {
                    let len = fixed + (2 * j + odd) * step;
                    if len >= hi {
                        return None;
                    }
                    if len >= lo && !used.contains(&len) {
                        return Some(j);
                    }
                    j += 1;
                }
            };
            let no_room = || {
                Error::Invalid(format!(
                    "no free length for triple ({a}, {b}, {c}) in [{lo}, {hi})"
                ))
            };
            let r = pick(0, &p.used).ok_or_else(no_room)?;
            p.used.insert(fixed + 2 * r * step);
            let q = pick(1, &p.used).ok_or_else(no_room)?;
            p.used.insert(fixed + (2 * q + 1) * step);
            let entry = WEntry { a, b, c, r, q };
            for len in [entry.even_len(), entry.odd_len()] {
                if len <= CODE_CHECK_LEN {
                    let w = if len == entry.even_len() {
                        entry.even_word()
                    } else {
                        entry.odd_word()
                    };
                    if sq_decode(&w).is_some() {
                        return Err(Error::Invalid(format!(
                            "family word for {entry} is a doubling code"
                        )));
                    }
                }
            }
            p.entries.push(entry);
        }
        p.done_levels += 1;
        Ok(())
    }

    fn ensure<F: Fn(&Progress) -> bool>(
        &self,
        done: F,
    ) -> Result<std::sync::MutexGuard<'_, Progress>> {
        let mut p = self.progress.lock().expect("w cache poisoned");
        while !done(&p) {
            self.process_level(&mut p)?;
        }
        Ok(p)
    }

    /// Parameters of the triple `(a, b, c)`.
    pub fn params(&self, a: &str, b: &str, c: &str) -> Result<WEntry> {
        if [a, b, c].iter().any(|w| w.is_empty() || !is_binary(w)) {
            return Err(Error::Invalid(
                "triple components must be non-empty binary words".into(),
            ));
        }
        let level = a.len() + b.len() + c.len();
        let p = self.ensure(|p| p.done_levels + 3 > level)?;
        Ok(p.entries
            .iter()
            .find(|e| e.a == a && e.b == b && e.c == c)
            .cloned()
            .expect("every triple of a processed level has an entry"))
    }

    /// Entries of all levels whose window starts at or below `n`; these are
    /// the only ones that can have a word of length `<= n`.
    pub fn entries_up_to(&self, n: u64) -> Result<Vec<WEntry>> {
        let p = self.ensure(|p| (self.range)(p.done_levels + 3).0 > n)?;
        Ok(p.entries.clone())
    }

    /// Family words of length `<= n` with their side, shortest first.
    pub fn words_up_to(&self, n: u64) -> Result<Vec<(String, bool)>> {
        let mut out = Vec::new();
        for e in self.entries_up_to(n)? {
            if e.even_len() <= n {
                out.push((e.even_word(), false));
            }
            if e.odd_len() <= n {
                out.push((e.odd_word(), true));
            }
        }
        out.sort_by(|x, y| x.0.len().cmp(&y.0.len()).then_with(|| x.0.cmp(&y.0)));
        Ok(out)
    }

    /// Whether `w` is a family word, and on which side.
    pub fn lookup(&self, w: &str) -> Result<Option<WHit>> {
        let n = w.len() as u64;
        if n < (self.range)(3).0 {
            return Ok(None);
        }
        for e in self.entries_up_to(n)? {
            if e.even_len() == n && e.even_word() == w {
                return Ok(Some(WHit {
                    entry: e,
                    in_language: false,
                }));
            }
            if e.odd_len() == n && e.odd_word() == w {
                return Ok(Some(WHit {
                    entry: e,
                    in_language: true,
                }));
            }
        }
        Ok(None)
    }
}

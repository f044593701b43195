//! The oracle language built around an external set `X` and the storage
//! model that answers `#` queries by membership in it.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;

use super::sq::{is_binary, sq_decode};
use super::w::WConstruction;
use crate::error::Result;
use crate::protocol::{ProtocolAlphabet, ProtocolOracle, MINUS};

/// Membership predicate for a set of binary words, counting its calls.
pub trait OracleX {
    fn member(&self, x: &str) -> bool;
    fn calls(&self) -> usize;
}

/// Explicit finite set.
#[derive(Debug, Default)]
pub struct FiniteSetOracle {
    set: BTreeSet<String>,
    calls: AtomicUsize,
}

impl FiniteSetOracle {
    pub fn new<I, S>(words: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        FiniteSetOracle {
            set: words.into_iter().map(Into::into).collect(),
            calls: AtomicUsize::new(0),
        }
    }

    /// Parses one word per line; blank lines and `#` comments are skipped
    /// and a line holding `eps` stands for the empty word.
    pub fn from_lines(text: &str) -> Result<Self> {
        let mut set = BTreeSet::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let w = if line == crate::alphabet::EPSILON {
                ""
            } else {
                line
            };
            if !is_binary(w) {
                return Err(crate::Error::Parse {
                    line: i + 1,
                    msg: format!("`{line}` is not a binary word"),
                });
            }
            set.insert(w.to_string());
        }
        Ok(FiniteSetOracle {
            set,
            calls: AtomicUsize::new(0),
        })
    }

    pub fn words(&self) -> &BTreeSet<String> {
        &self.set
    }
}

impl OracleX for FiniteSetOracle {
    fn member(&self, x: &str) -> bool {
        self.calls.fetch_add(1, Ordering::Relaxed);
        self.set.contains(x)
    }

    fn calls(&self) -> usize {
        self.calls.load(Ordering::Relaxed)
    }
}

/// Membership in the oracle language, rules tried in order: family word,
/// doubling code of `x` (asks `X`), odd length, square `uu`, and finally
/// `u <lex v` for `w = uv` with `|u| = |v|`.
pub fn l_membership(w: &str, x: &dyn OracleX, wc: &WConstruction) -> Result<bool> {
    if let Some(hit) = wc.lookup(w)? {
        return Ok(hit.in_language);
    }
    Ok(outside_family(w, |d| x.member(d)))
}

/// The rules after the family check.
pub(crate) fn outside_family(w: &str, mut in_x: impl FnMut(&str) -> bool) -> bool {
    if let Some(d) = sq_decode(w) {
        return in_x(&d);
    }
    if w.len() % 2 == 1 {
        return true;
    }
    let (u, v) = w.split_at(w.len() / 2);
    u <= v
}

/// Stateless model with write letters `0 1`, queries `#` and `r`, and
/// responses `+ − r`. Query `#` answers `+` iff the written word is in the
/// oracle language; query `r` needs an empty write word and answers `r`.
#[derive(Clone)]
pub struct ProtXOracle {
    alphabet: ProtocolAlphabet,
    x: Arc<dyn OracleX + Send + Sync>,
    w: Arc<WConstruction>,
}

impl fmt::Debug for ProtXOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProtXOracle").finish_non_exhaustive()
    }
}

/// Write, query and response tokens of [`ProtXOracle`].
pub fn prot_x_alphabet() -> ProtocolAlphabet {
    ProtocolAlphabet::new(
        &["0", "1"],
        &["#", "r"],
        &["+", MINUS, "r"],
        &[("#", "+"), ("#", MINUS), ("r", "r")],
    )
    .expect("fixed alphabet")
}

impl ProtXOracle {
    pub fn new(x: Arc<dyn OracleX + Send + Sync>, w: Arc<WConstruction>) -> Self {
        ProtXOracle {
            alphabet: prot_x_alphabet(),
            x,
            w,
        }
    }

    pub fn oracle(&self) -> &Arc<dyn OracleX + Send + Sync> {
        &self.x
    }
}

impl ProtocolOracle for ProtXOracle {
    type State = ();

    fn alphabet(&self) -> &ProtocolAlphabet {
        &self.alphabet
    }

    fn initial_state(&self) {}

    fn respond(&self, _: &(), u: &[String], q: &str) -> Option<(String, ())> {
        match q {
            "#" => {
                let word: String = u.concat();
                let inside = l_membership(&word, self.x.as_ref(), &self.w).ok()?;
                Some((if inside { "+" } else { MINUS }.to_string(), ()))
            }
            "r" if u.is_empty() => Some(("r".to_string(), ())),
            _ => None,
        }
    }

    fn canonical_key(&self, _: &()) -> String {
        String::new()
    }

    fn reset_symbols(&self) -> Option<(String, String)> {
        Some(("r".into(), "r".into()))
    }
}

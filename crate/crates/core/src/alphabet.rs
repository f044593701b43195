//! Alphabets, words and the three-valued verdict shared by every bounded search.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};

/// Token reserved for epsilon in the textual formats. Never an alphabet member.
pub const EPSILON: &str = "eps";

/// A word is a sequence of alphabet tokens.
pub type Word = Vec<String>;

/// Splits a whitespace-separated token string into a word.
pub fn tokens(s: &str) -> Word {
    s.split_whitespace().map(str::to_string).collect()
}

/// Joins a word back into its whitespace-separated form.
pub fn show_word<S: AsRef<str>>(w: &[S]) -> String {
    w.iter().map(AsRef::as_ref).collect::<Vec<_>>().join(" ")
}

/// An ordered finite set of distinct tokens. Symbol order is declaration order
/// and is the order used for lexicographic enumeration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Alphabet {
    symbols: Vec<String>,
    index: HashMap<String, usize>,
}

impl Alphabet {
    pub fn new<I, S>(symbols: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let symbols: Vec<String> = symbols.into_iter().map(Into::into).collect();
        if symbols.is_empty() {
            return Err(Error::InvalidAlphabet("alphabet is empty".into()));
        }
        let mut index = HashMap::with_capacity(symbols.len());
        for (i, s) in symbols.iter().enumerate() {
            if s.is_empty() || s.chars().any(char::is_whitespace) {
                return Err(Error::InvalidAlphabet(format!("bad token {s:?}")));
            }
            if s == EPSILON {
                return Err(Error::InvalidAlphabet(format!("`{EPSILON}` is reserved")));
            }
            if index.insert(s.clone(), i).is_some() {
                return Err(Error::InvalidAlphabet(format!("duplicate token `{s}`")));
            }
        }
        Ok(Alphabet { symbols, index })
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn symbol(&self, i: usize) -> &str {
        &self.symbols[i]
    }

    pub fn index_of(&self, s: &str) -> Option<usize> {
        self.index.get(s).copied()
    }

    pub fn contains(&self, s: &str) -> bool {
        self.index.contains_key(s)
    }

    /// Maps a word to symbol indices, failing on the first undeclared token.
    pub fn encode<S: AsRef<str>>(&self, w: &[S]) -> Result<Vec<usize>> {
        w.iter()
            .map(|s| {
                self.index_of(s.as_ref())
                    .ok_or_else(|| Error::UnknownSymbol(s.as_ref().to_string()))
            })
            .collect()
    }

    pub fn decode(&self, w: &[usize]) -> Word {
        w.iter().map(|&i| self.symbols[i].clone()).collect()
    }

    /// Same tokens in the same order.
    pub fn same_as(&self, other: &Alphabet) -> bool {
        self.symbols == other.symbols
    }

    /// Same token set, order ignored.
    pub fn same_set(&self, other: &Alphabet) -> bool {
        self.len() == other.len() && self.symbols.iter().all(|s| other.contains(s))
    }

    /// Alphabet without the given token. Fails if nothing would remain.
    pub fn without(&self, token: &str) -> Result<Alphabet> {
        Alphabet::new(self.symbols.iter().filter(|s| *s != token).cloned())
    }

    /// Alphabet extended by tokens not already present.
    pub fn with<I, S>(&self, extra: I) -> Result<Alphabet>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut symbols = self.symbols.clone();
        for s in extra {
            let s = s.into();
            if !self.contains(&s) && !symbols.contains(&s) {
                symbols.push(s);
            }
        }
        Alphabet::new(symbols)
    }
}

impl fmt::Display for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.symbols.join(" "))
    }
}

/// Outcome of a bounded search. `Unknown` is only reported when a configured
/// bound cut the search short.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    Accept,
    Reject,
    Unknown,
}

impl Verdict {
    pub fn is_accept(self) -> bool {
        self == Verdict::Accept
    }

    pub fn is_definite(self) -> bool {
        self != Verdict::Unknown
    }

    pub fn from_bool(b: bool) -> Self {
        if b {
            Verdict::Accept
        } else {
            Verdict::Reject
        }
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Accept => 0,
            Verdict::Reject => 1,
            Verdict::Unknown => 2,
        }
    }

    /// Yes/No/Unknown label used in decider reports.
    pub fn answer(self) -> &'static str {
        match self {
            Verdict::Accept => "yes",
            Verdict::Reject => "no",
            Verdict::Unknown => "unknown",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Accept => "accept",
            Verdict::Reject => "reject",
            Verdict::Unknown => "unknown",
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_reserved_and_duplicate_tokens() {
        assert!(Alphabet::new(["a", "eps"]).is_err());
        assert!(Alphabet::new(["a", "a"]).is_err());
        assert!(Alphabet::new(Vec::<String>::new()).is_err());
        assert!(Alphabet::new(["a b"]).is_err());
    }

    #[test]
    fn encode_reports_unknown() {
        let a = Alphabet::new(["x", "y"]).unwrap();
        assert_eq!(a.encode(&["y", "x"]).unwrap(), vec![1, 0]);
        assert_eq!(a.encode(&["z"]), Err(Error::UnknownSymbol("z".into())));
    }
}

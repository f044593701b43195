//! Shipped storage models: a two-bracket stack, a set of words, and a set
//! that accepts a single insertion. Also the periodic filter `(v#)^k`.

use std::collections::BTreeSet;

use super::{ProtocolAlphabet, ProtocolOracle};
use crate::alphabet::{Alphabet, Word};
use crate::error::{Error, Result};
use crate::universality::ProtXOracle;

/// Stack of two bracket kinds. Queries `push(`, `push[`, `pop`; the state is
/// the stack as a string of opening brackets, top last.
///
/// With `exact` set, a protocol must also end with an empty stack.
#[derive(Clone, Debug)]
pub struct DyckOracle {
    alphabet: ProtocolAlphabet,
    exact: bool,
}

impl DyckOracle {
    pub fn new(exact: bool) -> Self {
        let alphabet = ProtocolAlphabet::new(
            &[],
            &["push(", "push[", "pop"],
            &["(", ")", "[", "]"],
            &[("push(", "("), ("push[", "["), ("pop", ")"), ("pop", "]")],
        )
        .expect("fixed alphabet");
        DyckOracle { alphabet, exact }
    }

    pub fn is_exact(&self) -> bool {
        self.exact
    }
}

impl ProtocolOracle for DyckOracle {
    type State = String;

    fn alphabet(&self) -> &ProtocolAlphabet {
        &self.alphabet
    }

    fn initial_state(&self) -> String {
        String::new()
    }

    fn respond(&self, state: &String, u: &[String], q: &str) -> Option<(String, String)> {
        if !u.is_empty() {
            return None;
        }
        let mut next = state.clone();
        let r = match q {
            "push(" => {
                next.push('(');
                "("
            }
            "push[" => {
                next.push('[');
                "["
            }
            "pop" => match next.pop()? {
                '(' => ")",
                _ => "]",
            },
            _ => return None,
        };
        Some((r.to_string(), next))
    }

    fn canonical_key(&self, state: &String) -> String {
        state.clone()
    }

    fn is_final(&self, state: &String) -> bool {
        !self.exact || state.is_empty()
    }
}

/// Minus sign used in negative responses.
pub const MINUS: &str = "−";

/// Set of words over `{a, b}` with insert, remove and test queries.
#[derive(Clone, Debug)]
pub struct SetOracle {
    alphabet: ProtocolAlphabet,
}

impl SetOracle {
    pub fn new() -> Self {
        let neg = format!("{MINUS}#");
        let alphabet = ProtocolAlphabet::new(
            &["a", "b"],
            &["#ins", "#out", "#test"],
            &["#", "+#", &neg],
            &[
                ("#ins", "#"),
                ("#out", "#"),
                ("#test", "+#"),
                ("#test", &neg),
            ],
        )
        .expect("fixed alphabet");
        SetOracle { alphabet }
    }
}

impl Default for SetOracle {
    fn default() -> Self {
        Self::new()
    }
}

fn key_of_word(w: &[String]) -> String {
    format!("[{}]", w.join("."))
}

impl ProtocolOracle for SetOracle {
    type State = BTreeSet<Word>;

    fn alphabet(&self) -> &ProtocolAlphabet {
        &self.alphabet
    }

    fn initial_state(&self) -> BTreeSet<Word> {
        BTreeSet::new()
    }

    fn respond(
        &self,
        state: &BTreeSet<Word>,
        u: &[String],
        q: &str,
    ) -> Option<(String, BTreeSet<Word>)> {
        let mut next = state.clone();
        let r = match q {
            "#ins" => {
                next.insert(u.to_vec());
                "#".to_string()
            }
            "#out" => {
                next.remove(u);
                "#".to_string()
            }
            "#test" if state.contains(u) => "+#".to_string(),
            "#test" => format!("{MINUS}#"),
            _ => return None,
        };
        Some((r, next))
    }

    fn canonical_key(&self, state: &BTreeSet<Word>) -> String {
        state.iter().map(|w| key_of_word(w)).collect()
    }
}

/// Letters `0`, `1`, ..., `k-1`.
pub fn sigma_k(k: usize) -> Vec<String> {
    (0..k).map(|i| i.to_string()).collect()
}

/// Set that stores only the first inserted word. The first `ins` answers `+`,
/// later ones `−`; `test` answers `+` iff the word equals the stored one.
#[derive(Clone, Debug)]
pub struct SingleInsertOracle {
    alphabet: ProtocolAlphabet,
}

impl SingleInsertOracle {
    /// Over the digit letters of [`sigma_k`].
    pub fn new(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::Invalid("letter count must be at least 1".into()));
        }
        Self::over(&sigma_k(k))
    }

    /// Over an arbitrary letter list.
    pub fn over<S: AsRef<str>>(letters: &[S]) -> Result<Self> {
        let letters: Vec<&str> = letters.iter().map(AsRef::as_ref).collect();
        let alphabet = ProtocolAlphabet::new(
            &letters,
            &["ins", "test"],
            &["+", MINUS],
            &[("ins", "+"), ("ins", MINUS), ("test", "+"), ("test", MINUS)],
        )?;
        Ok(SingleInsertOracle { alphabet })
    }

    pub fn letters(&self) -> &[String] {
        self.alphabet.wr()
    }
}

impl ProtocolOracle for SingleInsertOracle {
    type State = Option<Word>;

    fn alphabet(&self) -> &ProtocolAlphabet {
        &self.alphabet
    }

    fn initial_state(&self) -> Option<Word> {
        None
    }

    fn respond(
        &self,
        state: &Option<Word>,
        u: &[String],
        q: &str,
    ) -> Option<(String, Option<Word>)> {
        match (q, state) {
            ("ins", None) => Some(("+".into(), Some(u.to_vec()))),
            ("ins", Some(_)) => Some((MINUS.into(), state.clone())),
            ("test", Some(w)) if w == u => Some(("+".into(), state.clone())),
            ("test", _) => Some((MINUS.into(), state.clone())),
            _ => None,
        }
    }

    fn canonical_key(&self, state: &Option<Word>) -> String {
        state
            .as_deref()
            .map_or_else(|| "none".to_string(), key_of_word)
    }
}

/// Alphabet of the periodic filter: the letters followed by `#`.
pub fn per_k_alphabet<S: AsRef<str>>(letters: &[S]) -> Result<Alphabet> {
    Alphabet::new(
        letters
            .iter()
            .map(|s| s.as_ref().to_string())
            .chain(["#".to_string()]),
    )
}

/// `w = (v#)^k` for one `v` over the digit letters of [`sigma_k`].
pub fn per_k_membership<S: AsRef<str>>(w: &[S], k: usize) -> bool {
    per_k_membership_over(w, &sigma_k(k), k)
}

/// `w = (v#)^k` for one `v` over `letters`; `v` may be empty.
pub fn per_k_membership_over<S: AsRef<str>, T: AsRef<str>>(
    w: &[S],
    letters: &[T],
    k: usize,
) -> bool {
    if k == 0 || !w.len().is_multiple_of(k) {
        return false;
    }
    let n = w.len() / k;
    let first = &w[..n];
    let Some((last, v)) = first.split_last() else {
        return false;
    };
    last.as_ref() == "#"
        && v.iter()
            .all(|t| letters.iter().any(|l| l.as_ref() == t.as_ref()))
        && w.chunks(n)
            .all(|c| c.iter().zip(first).all(|(x, y)| x.as_ref() == y.as_ref()))
}

/// Any shipped oracle, for callers that choose one at run time.
#[derive(Clone, Debug)]
pub enum BuiltinOracle {
    Dyck(DyckOracle),
    Set(SetOracle),
    SingleInsert(SingleInsertOracle),
    ProtX(ProtXOracle),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BuiltinState {
    Dyck(String),
    Set(BTreeSet<Word>),
    SingleInsert(Option<Word>),
    ProtX,
}

impl BuiltinOracle {
    /// Parses `dyck`, `dyck-exact`, `set` or `sis:K`.
    pub fn from_name(name: &str) -> Result<BuiltinOracle> {
        match name {
            "dyck" => Ok(BuiltinOracle::Dyck(DyckOracle::new(false))),
            "dyck-exact" => Ok(BuiltinOracle::Dyck(DyckOracle::new(true))),
            "set" => Ok(BuiltinOracle::Set(SetOracle::new())),
            _ => {
                let k = name
                    .strip_prefix("sis:")
                    .and_then(|k| k.parse::<usize>().ok())
                    .ok_or_else(|| Error::Invalid(format!("unknown oracle `{name}`")))?;
                Ok(BuiltinOracle::SingleInsert(SingleInsertOracle::new(k)?))
            }
        }
    }
}

impl ProtocolOracle for BuiltinOracle {
    type State = BuiltinState;

    fn alphabet(&self) -> &ProtocolAlphabet {
        match self {
            BuiltinOracle::Dyck(o) => o.alphabet(),
            BuiltinOracle::Set(o) => o.alphabet(),
            BuiltinOracle::SingleInsert(o) => o.alphabet(),
            BuiltinOracle::ProtX(o) => o.alphabet(),
        }
    }

    fn initial_state(&self) -> BuiltinState {
        match self {
            BuiltinOracle::Dyck(o) => BuiltinState::Dyck(o.initial_state()),
            BuiltinOracle::Set(o) => BuiltinState::Set(o.initial_state()),
            BuiltinOracle::SingleInsert(o) => BuiltinState::SingleInsert(o.initial_state()),
            BuiltinOracle::ProtX(_) => BuiltinState::ProtX,
        }
    }

    fn respond(
        &self,
        state: &BuiltinState,
        u: &[String],
        q: &str,
    ) -> Option<(String, BuiltinState)> {
        match (self, state) {
            (BuiltinOracle::Dyck(o), BuiltinState::Dyck(s)) => {
                o.respond(s, u, q).map(|(r, s)| (r, BuiltinState::Dyck(s)))
            }
            (BuiltinOracle::Set(o), BuiltinState::Set(s)) => {
                o.respond(s, u, q).map(|(r, s)| (r, BuiltinState::Set(s)))
            }
            (BuiltinOracle::SingleInsert(o), BuiltinState::SingleInsert(s)) => o
                .respond(s, u, q)
                .map(|(r, s)| (r, BuiltinState::SingleInsert(s))),
            (BuiltinOracle::ProtX(o), BuiltinState::ProtX) => {
                o.respond(&(), u, q).map(|(r, ())| (r, BuiltinState::ProtX))
            }
            _ => None,
        }
    }

    fn canonical_key(&self, state: &BuiltinState) -> String {
        match (self, state) {
            (BuiltinOracle::Dyck(o), BuiltinState::Dyck(s)) => o.canonical_key(s),
            (BuiltinOracle::Set(o), BuiltinState::Set(s)) => o.canonical_key(s),
            (BuiltinOracle::SingleInsert(o), BuiltinState::SingleInsert(s)) => o.canonical_key(s),
            _ => String::new(),
        }
    }

    fn reset_symbols(&self) -> Option<(String, String)> {
        match self {
            BuiltinOracle::ProtX(o) => o.reset_symbols(),
            _ => None,
        }
    }

    fn is_final(&self, state: &BuiltinState) -> bool {
        match (self, state) {
            (BuiltinOracle::Dyck(o), BuiltinState::Dyck(s)) => o.is_final(s),
            _ => true,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::tokens;
    use crate::protocol::membership;

    fn m(w: &str) -> Word {
        tokens(&w.replace('-', MINUS))
    }

    #[test]
    fn dyck_responses() {
        let d = DyckOracle::new(false);
        let e = String::new();
        assert_eq!(d.respond(&e, &[], "push("), Some(("(".into(), "(".into())));
        assert_eq!(
            d.respond(&"(".into(), &[], "pop"),
            Some((")".into(), e.clone()))
        );
        assert_eq!(d.respond(&e, &[], "pop"), None);
        assert!(membership(&d, &m("push( ( push[ [ pop ] pop )")));
        assert!(!membership(&d, &m("push( ( pop ]")));
        assert!(membership(&d, &m("push( (")));
        assert!(!membership(&DyckOracle::new(true), &m("push( (")));
    }

    #[test]
    fn set_examples() {
        let s = SetOracle::new();
        assert!(membership(&s, &m("a #ins # a #test +#")));
        assert!(!membership(&s, &m("a #test +#")));
        assert!(membership(&s, &m("a #ins # b #test -#")));
        assert!(!membership(&s, &m("a #ins # a #out # a #test +#")));
        assert!(membership(&s, &m("a b #ins # a b #test +#")));
        assert!(membership(&s, &m("#ins # #test +#")));
    }

    #[test]
    fn set_keys_distinguish_empty_word() {
        let s = SetOracle::new();
        let with_empty: BTreeSet<Word> = [Vec::new()].into();
        assert_ne!(
            s.canonical_key(&with_empty),
            s.canonical_key(&BTreeSet::new())
        );
    }

    #[test]
    fn single_insert_examples() {
        let o = SingleInsertOracle::new(2).unwrap();
        assert!(membership(&o, &m("0 ins + 0 test +")));
        assert!(!membership(&o, &m("0 ins + 1 ins +")));
        assert!(membership(&o, &m("0 ins + 1 ins -")));
        assert!(membership(&o, &m("0 test -")));
        assert!(!membership(&o, &m("0 ins + 1 test +")));
    }

    #[test]
    fn per_k_examples() {
        let ab = ["a", "b"];
        assert!(per_k_membership_over(&m("a b # a b #"), &ab, 2));
        assert!(!per_k_membership_over(&m("a b # b a #"), &ab, 2));
        assert!(per_k_membership(&m("#"), 1));
        assert!(per_k_membership(&m("# #"), 2));
        assert!(!per_k_membership(&m("#"), 2));
        assert!(!per_k_membership(&m(""), 1));
        assert!(!per_k_membership(&m("0 # 0"), 1));
        assert!(!per_k_membership(&m("2 #"), 2));
    }

    #[test]
    fn builtin_names() {
        for n in ["dyck", "dyck-exact", "set", "sis:3"] {
            assert!(BuiltinOracle::from_name(n).is_ok(), "{n}");
        }
        assert!(BuiltinOracle::from_name("sis:0").is_err());
        assert!(BuiltinOracle::from_name("stack").is_err());
    }
}

//! For a binary automaton and a state `s`: the states reachable from `s` by
//! some word inside the oracle language, and by some word outside it.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};

use super::dag::{length_sets, lex_extreme, LexKind};
use super::lang::{outside_family, OracleX};
use super::w::WConstruction;
use crate::alphabet::Alphabet;
use crate::error::{Error, Result};
use crate::nfa::{Nfa, NfaBuilder};

/// Remembers answers of the external set so each word is asked once.
pub struct MemoOracle<'a> {
    x: &'a dyn OracleX,
    seen: HashMap<String, bool>,
}

impl<'a> MemoOracle<'a> {
    pub fn new(x: &'a dyn OracleX) -> Self {
        MemoOracle {
            x,
            seen: HashMap::new(),
        }
    }

    pub fn member(&mut self, w: &str) -> bool {
        if let Some(&b) = self.seen.get(w) {
            return b;
        }
        let b = self.x.member(w);
        self.seen.insert(w.to_string(), b);
        b
    }
}

/// Targets reached by a word inside (`inside`) and outside (`outside`) the
/// oracle language.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DeltaSets {
    pub inside: BTreeSet<usize>,
    pub outside: BTreeSet<usize>,
}

fn binary_indices(a: &Nfa) -> Result<(usize, usize)> {
    let al = a.alphabet();
    match (al.index_of("0"), al.index_of("1")) {
        (Some(z), Some(o)) if al.len() == 2 => Ok((z, o)),
        _ => Err(Error::AlphabetMismatch(
            "expected the binary alphabet {0, 1}".into(),
        )),
    }
}

fn binary_alphabet() -> Alphabet {
    Alphabet::new(["0", "1"]).expect("fixed alphabet")
}

/// Words of `L(sub)` avoiding the given family words, split by parity. The
/// prefix component tracks whether the run is still spelling a prefix of a
/// family word.
fn avoid_family(sub: &Nfa, target: usize, family: &[(String, bool)]) -> Result<(Nfa, Nfa)> {
    let (zero, one) = binary_indices(sub)?;
    let words: HashSet<&str> = family.iter().map(|(w, _)| w.as_str()).collect();
    let mut prefixes: HashSet<String> = HashSet::new();
    for (w, _) in family {
        for k in 0..=w.len() {
            prefixes.insert(w[..k].to_string());
        }
    }
    prefixes.insert(String::new());

    type Key = (usize, Option<String>, bool);
    let mut b = NfaBuilder::new(binary_alphabet());
    let name = |k: &Key| {
        format!(
            "({},{},{})",
            sub.state_name(k.0),
            k.1.as_deref().map_or("_".to_string(), |p| format!("[{p}]")),
            if k.2 { "odd" } else { "even" }
        )
    };
    let start: Key = (sub.initial(), Some(String::new()), false);
    let sid = b.state(name(&start));
    b.set_initial(sid);
    let mut ids: HashMap<Key, usize> = HashMap::from([(start.clone(), sid)]);
    let mut queue = VecDeque::from([start]);
    let mut odd_accepting = Vec::new();
    let mut even_accepting = Vec::new();
    while let Some(k) = queue.pop_front() {
        let id = ids[&k];
        if k.0 == target && k.1.as_deref().is_none_or(|p| !words.contains(p)) {
            if k.2 {
                odd_accepting.push(id);
            } else {
                even_accepting.push(id);
            }
        }
        for (sym, ch) in [(zero, '0'), (one, '1')] {
            for t in sub.step_set(&[k.0], sym) {
                let p = k.1.as_ref().and_then(|p| {
                    let ext = format!("{p}{ch}");
                    prefixes.contains(&ext).then_some(ext)
                });
                let next: Key = (t, p, !k.2);
                let nid = match ids.get(&next) {
                    Some(&i) => i,
                    None => {
                        let i = b.state(name(&next));
                        ids.insert(next.clone(), i);
                        queue.push_back(next);
                        i
                    }
                };
                b.edge(id, Some(if ch == '0' { 0 } else { 1 }), nid);
            }
        }
    }
    let mut odd = b.clone();
    for i in odd_accepting {
        odd.set_accepting(i);
    }
    let mut even = b;
    for i in even_accepting {
        even.set_accepting(i);
    }
    Ok((odd.build()?, even.build()?))
}

/// Membership of `uv` (with `|u| = |v|`) in the oracle language for a word
/// known to avoid the family: `u <lex v`, or `u = v` and the square rule.
fn even_case(a: &Nfa, memo: &mut MemoOracle<'_>) -> Result<(bool, bool)> {
    let lens = length_sets(a)?;
    let (mut inside, mut outside) = (false, false);
    let max_half = a.num_states();
    for t in 0..a.num_states() {
        for len in 0..=max_half {
            if inside && outside {
                return Ok((true, true));
            }
            let ext = |k| lex_extreme(a, &lens, t, len, k);
            let (Some(min_l), Some(max_l)) = (ext(LexKind::MinLeft)?, ext(LexKind::MaxLeft)?)
            else {
                continue;
            };
            let (Some(min_r), Some(max_r)) = (ext(LexKind::MinRight)?, ext(LexKind::MaxRight)?)
            else {
                continue;
            };
            if !inside {
                inside = min_l < max_r
                    || (min_l == max_r
                        && outside_family(&format!("{min_l}{max_r}"), |d| memo.member(d)));
            }
            if !outside {
                outside = min_r < max_l
                    || (min_r == max_l
                        && !outside_family(&format!("{max_l}{min_r}"), |d| memo.member(d)));
            }
        }
    }
    Ok((inside, outside))
}

/// Both target sets for state `s` of an epsilon-free binary automaton.
///
/// Per target `s'`: an infinite `L(A_ss')` puts `s'` in both sets; family
/// words of length `<= |S|` are tested directly; the rest of the language
/// is split into odd words (all inside) and even words, which are decided
/// from lexicographic extremes around every midpoint.
pub fn delta_sets(
    a: &Nfa,
    s: usize,
    memo: &mut MemoOracle<'_>,
    wc: &WConstruction,
) -> Result<DeltaSets> {
    binary_indices(a)?;
    if a.has_epsilon() {
        return Err(Error::Invalid("epsilon moves are not allowed here".into()));
    }
    let family = wc.words_up_to(a.num_states() as u64)?;
    let mut out = DeltaSets::default();
    for target in 0..a.num_states() {
        let sub = a.sub_automaton_at(s, target);
        let trimmed = sub.trim();
        if trimmed.is_empty() {
            continue;
        }
        if !trimmed.is_finite() {
            out.inside.insert(target);
            out.outside.insert(target);
            continue;
        }
        for (w, in_language) in &family {
            let chars: Vec<String> = w.chars().map(String::from).collect();
            if sub.accepts(&chars)? {
                if *in_language {
                    out.inside.insert(target);
                } else {
                    out.outside.insert(target);
                }
            }
        }
        let kept = trimmed
            .state_index(a.state_name(target))
            .expect("trimming a non-empty language keeps its accepting state");
        let (odd, even) = avoid_family(&trimmed, kept, &family)?;
        if !odd.is_empty() {
            out.inside.insert(target);
        }
        let even = even.trim();
        if even.is_empty() {
            continue;
        }
        let (inside, outside) = even_case(&even, memo)?;
        if inside {
            out.inside.insert(target);
        }
        if outside {
            out.outside.insert(target);
        }
    }
    Ok(out)
}

/// States reachable from `s` by a word of the oracle language.
pub fn delta_l(a: &Nfa, s: usize, x: &dyn OracleX, wc: &WConstruction) -> Result<BTreeSet<usize>> {
    Ok(delta_sets(a, s, &mut MemoOracle::new(x), wc)?.inside)
}

/// States reachable from `s` by a word outside the oracle language.
pub fn delta_lbar(
    a: &Nfa,
    s: usize,
    x: &dyn OracleX,
    wc: &WConstruction,
) -> Result<BTreeSet<usize>> {
    Ok(delta_sets(a, s, &mut MemoOracle::new(x), wc)?.outside)
}

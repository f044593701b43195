//! Path-length sets and lexicographic extremes in acyclic binary automata.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::nfa::Nfa;

/// `lengths(s1, s2)`: lengths of all paths from `s1` to `s2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LengthSets {
    sets: Vec<Vec<BTreeSet<usize>>>,
}

impl LengthSets {
    pub fn get(&self, s1: usize, s2: usize) -> &BTreeSet<usize> {
        &self.sets[s1][s2]
    }

    pub fn contains(&self, s1: usize, s2: usize, len: usize) -> bool {
        self.sets[s1][s2].contains(&len)
    }

    /// Union over all accepting targets.
    pub fn to_accepting(&self, a: &Nfa, s: usize) -> BTreeSet<usize> {
        a.accepting_states()
            .flat_map(|f| self.sets[s][f].iter().copied())
            .collect()
    }
}

/// States in an order where every edge goes forward, or `Cyclic`.
pub fn topological_order(a: &Nfa) -> Result<Vec<usize>> {
    let n = a.num_states();
    let mut indegree = vec![0usize; n];
    for (_, _, d) in a.transitions() {
        indegree[d] += 1;
    }
    let mut ready: Vec<usize> = (0..n).filter(|&s| indegree[s] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(s) = ready.pop() {
        order.push(s);
        for &(_, d) in a.successors(s) {
            indegree[d] -= 1;
            if indegree[d] == 0 {
                ready.push(d);
            }
        }
    }
    if order.len() == n {
        Ok(order)
    } else {
        Err(Error::Cyclic)
    }
}

fn require_plain(a: &Nfa) -> Result<()> {
    if a.has_epsilon() {
        return Err(Error::Invalid("epsilon moves are not allowed here".into()));
    }
    Ok(())
}

/// Backward induction `lengths(s1, s2) = ⋃ 1 + lengths(s, s2)` over the
/// successors `s` of `s1`, with `0 ∈ lengths(s, s)`.
///
/// The whole transition graph must be acyclic and free of epsilon moves.
pub fn length_sets(a: &Nfa) -> Result<LengthSets> {
    require_plain(a)?;
    let order = topological_order(a)?;
    let n = a.num_states();
    let mut sets = vec![vec![BTreeSet::new(); n]; n];
    for &s1 in order.iter().rev() {
        sets[s1][s1].insert(0);
        let mut succ: Vec<usize> = a.successors(s1).iter().map(|&(_, d)| d).collect();
        succ.sort_unstable();
        succ.dedup();
        for s in succ {
            let shifted: Vec<Vec<usize>> = sets[s]
                .iter()
                .map(|set| set.iter().map(|k| k + 1).collect())
                .collect();
            for (target, extra) in sets[s1].iter_mut().zip(shifted) {
                target.extend(extra);
            }
        }
    }
    Ok(LengthSets { sets })
}

/// Which extreme to compute. `*Left` ranges over words of the given length
/// from the initial state to `s`, `*Right` over words from `s` to an
/// accepting state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LexKind {
    MinLeft,
    MaxLeft,
    MinRight,
    MaxRight,
}

impl LexKind {
    pub const ALL: [LexKind; 4] = [
        LexKind::MinLeft,
        LexKind::MaxLeft,
        LexKind::MinRight,
        LexKind::MaxRight,
    ];
}

/// Smallest or largest word of length `len` in the chosen path set, built one
/// letter at a time: a letter is kept when some successor of the current
/// prefix's state set can still finish in the remaining length.
pub fn lex_extreme(
    a: &Nfa,
    lens: &LengthSets,
    s: usize,
    len: usize,
    kind: LexKind,
) -> Result<Option<String>> {
    require_plain(a)?;
    let zero = a.alphabet().index_of("0");
    let one = a.alphabet().index_of("1");
    if a.alphabet().len() != 2 || zero.is_none() || one.is_none() {
        return Err(Error::AlphabetMismatch(
            "expected the binary alphabet {0, 1}".into(),
        ));
    }
    let letters: [(usize, char); 2] = match kind {
        LexKind::MinLeft | LexKind::MinRight => [(zero.unwrap(), '0'), (one.unwrap(), '1')],
        LexKind::MaxLeft | LexKind::MaxRight => [(one.unwrap(), '1'), (zero.unwrap(), '0')],
    };
    let right = matches!(kind, LexKind::MinRight | LexKind::MaxRight);
    let acc: Vec<BTreeSet<usize>> = if right {
        (0..a.num_states())
            .map(|t| lens.to_accepting(a, t))
            .collect()
    } else {
        Vec::new()
    };
    let finishes = |t: usize, rest: usize| {
        if right {
            acc[t].contains(&rest)
        } else {
            lens.contains(t, s, rest)
        }
    };
    let start = if right { s } else { a.initial() };
    if !finishes(start, len) {
        return Ok(None);
    }
    let mut current = vec![start];
    let mut word = String::with_capacity(len);
    for k in 0..len {
        let rest = len - k - 1;
        let mut chosen = None;
        for &(sym, ch) in &letters {
            let next = a.step_set(&current, sym);
            if next.iter().any(|&t| finishes(t, rest)) {
                chosen = Some((ch, next));
                break;
            }
        }
        let (ch, next) = chosen.expect("a finishing path exists by the length check");
        word.push(ch);
        current = next;
    }
    Ok(Some(word))
}

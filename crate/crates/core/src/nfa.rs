//! Nondeterministic and deterministic finite automata over token alphabets.
//!
//! States carry opaque string names; algorithms work on dense indices. Every
//! construction that builds a new automaton derives fresh names from the
//! operands' names so that reduction outputs stay readable.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::ops::Deref;

use crate::alphabet::{Alphabet, Word};
use crate::error::{Error, Result};

/// Default bound on the number of words `enumerate_words` may produce.
pub const DEFAULT_ENUM_CAP: usize = 1_000_000;

/// A labelled edge; `None` is epsilon.
pub type Edge = (Option<usize>, usize);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Nfa {
    alphabet: Alphabet,
    states: Vec<String>,
    index: HashMap<String, usize>,
    out: Vec<Vec<Edge>>,
    initial: usize,
    accepting: Vec<bool>,
}

/// Incremental builder. States are created on first mention.
#[derive(Clone, Debug)]
pub struct NfaBuilder {
    alphabet: Alphabet,
    states: Vec<String>,
    index: HashMap<String, usize>,
    edges: BTreeSet<(usize, Option<usize>, usize)>,
    initial: Option<usize>,
    accepting: BTreeSet<usize>,
}

impl NfaBuilder {
    pub fn new(alphabet: Alphabet) -> Self {
        NfaBuilder {
            alphabet,
            states: Vec::new(),
            index: HashMap::new(),
            edges: BTreeSet::new(),
            initial: None,
            accepting: BTreeSet::new(),
        }
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    /// Returns the index of `name`, declaring it if needed.
    pub fn state(&mut self, name: impl Into<String>) -> usize {
        let name = name.into();
        if let Some(&i) = self.index.get(&name) {
            return i;
        }
        let i = self.states.len();
        self.index.insert(name.clone(), i);
        self.states.push(name);
        i
    }

    pub fn has_state(&self, name: &str) -> bool {
        self.index.contains_key(name)
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn edge(&mut self, src: usize, label: Option<usize>, dst: usize) {
        self.edges.insert((src, label, dst));
    }

    /// String-level transition; `label` may be the epsilon token.
    pub fn transition(&mut self, src: &str, label: &str, dst: &str) -> Result<()> {
        let label = if label == crate::alphabet::EPSILON {
            None
        } else {
            Some(
                self.alphabet
                    .index_of(label)
                    .ok_or_else(|| Error::UnknownSymbol(label.to_string()))?,
            )
        };
        let s = self.state(src);
        let d = self.state(dst);
        self.edge(s, label, d);
        Ok(())
    }

    pub fn set_initial(&mut self, s: usize) {
        self.initial = Some(s);
    }

    pub fn set_accepting(&mut self, s: usize) {
        self.accepting.insert(s);
    }

    pub fn build(self) -> Result<Nfa> {
        let initial = self
            .initial
            .ok_or_else(|| Error::Invalid("no initial state".into()))?;
        let n = self.states.len();
        let mut out = vec![Vec::new(); n];
        for (s, l, d) in self.edges {
            out[s].push((l, d));
        }
        let mut accepting = vec![false; n];
        for s in self.accepting {
            accepting[s] = true;
        }
        Ok(Nfa {
            alphabet: self.alphabet,
            states: self.states,
            index: self.index,
            out,
            initial,
            accepting,
        })
    }
}

impl Nfa {
    /// Canonical empty-language automaton: one non-accepting state, no transitions.
    pub fn empty(alphabet: Alphabet) -> Nfa {
        Self::empty_named(alphabet, "empty")
    }

    fn empty_named(alphabet: Alphabet, name: &str) -> Nfa {
        let mut b = NfaBuilder::new(alphabet);
        let s = b.state(name);
        b.set_initial(s);
        b.build().expect("initial is set")
    }

    /// One accepting state with a self-loop on every symbol.
    pub fn universal(alphabet: Alphabet) -> Nfa {
        let mut b = NfaBuilder::new(alphabet);
        let s = b.state("all");
        b.set_initial(s);
        b.set_accepting(s);
        for a in 0..b.alphabet().len() {
            b.edge(s, Some(a), s);
        }
        b.build().expect("initial is set")
    }

    /// Prefix-tree automaton for a finite list of words (the literal-alternation
    /// helper used for fixtures).
    pub fn from_words<S: AsRef<str>>(alphabet: Alphabet, words: &[Vec<S>]) -> Result<Nfa> {
        let mut b = NfaBuilder::new(alphabet);
        let root = b.state("t");
        b.set_initial(root);
        for w in words {
            let enc = b.alphabet().encode(w)?;
            let mut cur = root;
            let mut name = String::from("t");
            for a in enc {
                name.push('.');
                name.push_str(&a.to_string());
                let next = b.state(name.clone());
                b.edge(cur, Some(a), next);
                cur = next;
            }
            b.set_accepting(cur);
        }
        b.build()
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn state_names(&self) -> &[String] {
        &self.states
    }

    pub fn state_name(&self, s: usize) -> &str {
        &self.states[s]
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    fn require_state(&self, name: &str) -> Result<usize> {
        self.state_index(name)
            .ok_or_else(|| Error::UnknownState(name.to_string()))
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn is_accepting(&self, s: usize) -> bool {
        self.accepting[s]
    }

    pub fn accepting_states(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.num_states()).filter(|&s| self.accepting[s])
    }

    pub fn successors(&self, s: usize) -> &[Edge] {
        &self.out[s]
    }

    /// All transitions ordered by (source, label, target).
    pub fn transitions(&self) -> impl Iterator<Item = (usize, Option<usize>, usize)> + '_ {
        self.out
            .iter()
            .enumerate()
            .flat_map(|(s, es)| es.iter().map(move |&(l, d)| (s, l, d)))
    }

    pub fn num_transitions(&self) -> usize {
        self.out.iter().map(Vec::len).sum()
    }

    pub fn has_epsilon(&self) -> bool {
        self.transitions().any(|(_, l, _)| l.is_none())
    }

    /// Rebuilds the automaton with a builder seeded from this one.
    pub fn to_builder(&self) -> NfaBuilder {
        let mut b = NfaBuilder::new(self.alphabet.clone());
        for name in &self.states {
            b.state(name.clone());
        }
        for (s, l, d) in self.transitions() {
            b.edge(s, l, d);
        }
        b.set_initial(self.initial);
        for s in self.accepting_states() {
            b.set_accepting(s);
        }
        b
    }

    /// Epsilon closure of a set of states, returned sorted.
    pub fn closure(&self, set: &[usize]) -> Vec<usize> {
        let mut seen = vec![false; self.num_states()];
        let mut stack: Vec<usize> = Vec::new();
        for &s in set {
            if !seen[s] {
                seen[s] = true;
                stack.push(s);
            }
        }
        while let Some(s) = stack.pop() {
            for &(l, d) in &self.out[s] {
                if l.is_none() && !seen[d] {
                    seen[d] = true;
                    stack.push(d);
                }
            }
        }
        (0..self.num_states()).filter(|&s| seen[s]).collect()
    }

    pub fn start_set(&self) -> Vec<usize> {
        self.closure(&[self.initial])
    }

    /// Closed successor set on one symbol.
    pub fn step_set(&self, set: &[usize], sym: usize) -> Vec<usize> {
        let mut next = Vec::new();
        for &s in set {
            for &(l, d) in &self.out[s] {
                if l == Some(sym) {
                    next.push(d);
                }
            }
        }
        self.closure(&next)
    }

    pub fn accepts_encoded(&self, w: &[usize]) -> bool {
        let mut set = self.start_set();
        for &a in w {
            set = self.step_set(&set, a);
            if set.is_empty() {
                return false;
            }
        }
        set.iter().any(|&s| self.accepting[s])
    }

    /// Membership with epsilon closure. Fails on undeclared symbols.
    pub fn accepts<S: AsRef<str>>(&self, w: &[S]) -> Result<bool> {
        let enc = self.alphabet.encode(w)?;
        Ok(self.accepts_encoded(&enc))
    }

    /// States reachable from `from` through any transitions.
    pub fn reachable_from(&self, from: &[usize]) -> Vec<bool> {
        let mut seen = vec![false; self.num_states()];
        let mut queue: VecDeque<usize> = VecDeque::new();
        for &s in from {
            if !seen[s] {
                seen[s] = true;
                queue.push_back(s);
            }
        }
        while let Some(s) = queue.pop_front() {
            for &(_, d) in &self.out[s] {
                if !seen[d] {
                    seen[d] = true;
                    queue.push_back(d);
                }
            }
        }
        seen
    }

    /// States from which one of `targets` is reachable.
    pub fn coreachable_to(&self, targets: &[usize]) -> Vec<bool> {
        let n = self.num_states();
        let mut rev = vec![Vec::new(); n];
        for (s, _, d) in self.transitions() {
            rev[d].push(s);
        }
        let mut seen = vec![false; n];
        let mut queue: VecDeque<usize> = VecDeque::new();
        for &t in targets {
            if !seen[t] {
                seen[t] = true;
                queue.push_back(t);
            }
        }
        while let Some(s) = queue.pop_front() {
            for &p in &rev[s] {
                if !seen[p] {
                    seen[p] = true;
                    queue.push_back(p);
                }
            }
        }
        seen
    }

    /// Keeps exactly the states that are reachable and coreachable. An automaton
    /// whose initial state would disappear becomes the canonical empty automaton.
    pub fn trim(&self) -> Nfa {
        let reach = self.reachable_from(&[self.initial]);
        let acc: Vec<usize> = self.accepting_states().collect();
        let coreach = self.coreachable_to(&acc);
        let keep: Vec<bool> = (0..self.num_states())
            .map(|s| reach[s] && coreach[s])
            .collect();
        if !keep[self.initial] {
            return Nfa::empty_named(self.alphabet.clone(), &self.states[self.initial]);
        }
        self.restrict_states(&keep)
    }

    /// Sub-automaton induced by `keep`; the initial state must be kept.
    fn restrict_states(&self, keep: &[bool]) -> Nfa {
        let mut b = NfaBuilder::new(self.alphabet.clone());
        let mut map = vec![usize::MAX; self.num_states()];
        for s in 0..self.num_states() {
            if keep[s] {
                map[s] = b.state(self.states[s].clone());
            }
        }
        for (s, l, d) in self.transitions() {
            if keep[s] && keep[d] {
                b.edge(map[s], l, map[d]);
            }
        }
        b.set_initial(map[self.initial]);
        for s in self.accepting_states() {
            if keep[s] {
                b.set_accepting(map[s]);
            }
        }
        b.build().expect("initial is kept")
    }

    pub fn is_empty(&self) -> bool {
        let reach = self.reachable_from(&[self.initial]);
        !self.accepting_states().any(|s| reach[s])
    }

    /// True iff the language is finite: no labelled edge lies on a cycle of the
    /// trimmed automaton. Epsilon-only cycles do not count.
    pub fn is_finite(&self) -> bool {
        let t = self.trim();
        for (s, l, d) in t.transitions() {
            if l.is_some() && t.reachable_from(&[d])[s] {
                return false;
            }
        }
        true
    }

    /// Words of length at most `max_len`, ordered by length and then
    /// lexicographically by alphabet order.
    pub fn enumerate_words(&self, max_len: usize) -> Result<Vec<Word>> {
        self.enumerate_words_capped(max_len, DEFAULT_ENUM_CAP)
    }

    pub fn enumerate_words_capped(&self, max_len: usize, cap: usize) -> Result<Vec<Word>> {
        Ok(self
            .enumerate_encoded(max_len, cap)?
            .into_iter()
            .map(|w| self.alphabet.decode(&w))
            .collect())
    }

    /// Index-level enumeration; see [`Nfa::enumerate_words`].
    pub fn enumerate_encoded(&self, max_len: usize, cap: usize) -> Result<Vec<Vec<usize>>> {
        let t = self.trim();
        let mut out = Vec::new();
        if t.is_empty() {
            return Ok(out);
        }
        let mut level: Vec<(Vec<usize>, Vec<usize>)> = vec![(Vec::new(), t.start_set())];
        for len in 0..=max_len {
            for (w, set) in &level {
                if set.iter().any(|&s| t.accepting[s]) {
                    out.push(w.clone());
                }
            }
            if out.len() > cap {
                return Err(Error::CapExceeded(format!("more than {cap} words")));
            }
            if len == max_len {
                break;
            }
            let mut next = Vec::new();
            for (w, set) in &level {
                for a in 0..t.alphabet.len() {
                    let s2 = t.step_set(set, a);
                    if !s2.is_empty() {
                        let mut w2 = w.clone();
                        w2.push(a);
                        next.push((w2, s2));
                    }
                }
                if next.len() + out.len() > cap {
                    return Err(Error::CapExceeded(format!("more than {cap} prefixes")));
                }
            }
            if next.is_empty() {
                break;
            }
            level = next;
        }
        Ok(out)
    }

    /// Pair construction recognising the intersection. Epsilon moves of either
    /// side advance that side alone. Only reachable pairs are built.
    pub fn product_intersect(&self, other: &Nfa) -> Result<Nfa> {
        if !self.alphabet.same_as(&other.alphabet) {
            return Err(Error::AlphabetMismatch(format!(
                "[{}] vs [{}]",
                self.alphabet, other.alphabet
            )));
        }
        let mut b = NfaBuilder::new(self.alphabet.clone());
        let name = |p: usize, q: usize| format!("({},{})", self.states[p], other.states[q]);
        let start = b.state(name(self.initial, other.initial));
        b.set_initial(start);
        let mut queue = VecDeque::from([(self.initial, other.initial)]);
        let mut seen: HashMap<(usize, usize), usize> =
            HashMap::from([((self.initial, other.initial), start)]);
        while let Some((p, q)) = queue.pop_front() {
            let id = seen[&(p, q)];
            if self.accepting[p] && other.accepting[q] {
                b.set_accepting(id);
            }
            let mut moves: Vec<(Option<usize>, usize, usize)> = Vec::new();
            for &(l, p2) in &self.out[p] {
                match l {
                    None => moves.push((None, p2, q)),
                    Some(a) => {
                        for &(l2, q2) in &other.out[q] {
                            if l2 == Some(a) {
                                moves.push((Some(a), p2, q2));
                            }
                        }
                    }
                }
            }
            for &(l2, q2) in &other.out[q] {
                if l2.is_none() {
                    moves.push((None, p, q2));
                }
            }
            for (l, p2, q2) in moves {
                let target = match seen.get(&(p2, q2)) {
                    Some(&t) => t,
                    None => {
                        let t = b.state(name(p2, q2));
                        seen.insert((p2, q2), t);
                        queue.push_back((p2, q2));
                        t
                    }
                };
                b.edge(id, l, target);
            }
        }
        b.build()
    }

    /// Same states and transitions; initial `s1`, sole accepting state `s2`.
    pub fn sub_automaton(&self, s1: &str, s2: &str) -> Result<Nfa> {
        let i = self.require_state(s1)?;
        let f = self.require_state(s2)?;
        Ok(self.sub_automaton_at(i, f))
    }

    pub fn sub_automaton_at(&self, s1: usize, s2: usize) -> Nfa {
        let mut a = self.clone();
        a.initial = s1;
        a.accepting = vec![false; self.num_states()];
        a.accepting[s2] = true;
        a
    }

    /// Equivalent automaton without epsilon transitions, same state set.
    pub fn remove_epsilon(&self) -> Nfa {
        let mut b = NfaBuilder::new(self.alphabet.clone());
        for name in &self.states {
            b.state(name.clone());
        }
        b.set_initial(self.initial);
        for s in 0..self.num_states() {
            let cl = self.closure(&[s]);
            if cl.iter().any(|&c| self.accepting[c]) {
                b.set_accepting(s);
            }
            for &c in &cl {
                for &(l, d) in &self.out[c] {
                    if l.is_some() {
                        b.edge(s, l, d);
                    }
                }
            }
        }
        b.build().expect("initial is set")
    }

    /// Copy with every state name prefixed.
    pub fn with_prefix(&self, prefix: &str) -> Nfa {
        let mut a = self.clone();
        a.states = self.states.iter().map(|s| format!("{prefix}{s}")).collect();
        a.index = a
            .states
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i))
            .collect();
        a
    }

    /// Graphviz rendering.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph nfa {\n  rankdir=LR;\n  __start [shape=point];\n");
        for (i, name) in self.states.iter().enumerate() {
            let shape = if self.accepting[i] {
                "doublecircle"
            } else {
                "circle"
            };
            s.push_str(&format!("  {i} [label={:?}, shape={shape}];\n", name));
        }
        s.push_str(&format!("  __start -> {};\n", self.initial));
        for (src, l, d) in self.transitions() {
            let label = l.map_or("ε", |a| self.alphabet.symbol(a));
            s.push_str(&format!("  {src} -> {d} [label={:?}];\n", label));
        }
        s.push_str("}\n");
        s
    }
}

/// An [`Nfa`] known to have no epsilon moves and at most one move per
/// (state, symbol).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dfa(Nfa);

impl Dfa {
    pub fn new(nfa: Nfa) -> Result<Dfa> {
        for s in 0..nfa.num_states() {
            let mut seen = BTreeSet::new();
            for &(l, _) in nfa.successors(s) {
                let Some(a) = l else {
                    return Err(Error::NotDeterministic(format!(
                        "epsilon move from `{}`",
                        nfa.state_name(s)
                    )));
                };
                if !seen.insert(a) {
                    return Err(Error::NotDeterministic(format!(
                        "two moves from `{}` on `{}`",
                        nfa.state_name(s),
                        nfa.alphabet().symbol(a)
                    )));
                }
            }
        }
        Ok(Dfa(nfa))
    }

    pub fn as_nfa(&self) -> &Nfa {
        &self.0
    }

    pub fn into_nfa(self) -> Nfa {
        self.0
    }

    pub fn next(&self, s: usize, a: usize) -> Option<usize> {
        self.0
            .successors(s)
            .iter()
            .find(|&&(l, _)| l == Some(a))
            .map(|&(_, d)| d)
    }
}

impl Deref for Dfa {
    type Target = Nfa;

    fn deref(&self) -> &Nfa {
        &self.0
    }
}

//! Finite-state transducers with word outputs and the rational-transduction
//! algebra: composition, inversion, images and preimages of regular languages,
//! and bounded application.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};

use crate::alphabet::{Alphabet, Word};
use crate::error::{Error, Result};
use crate::nfa::{Nfa, NfaBuilder};

/// `(input symbol or epsilon, output word, target)`.
pub type FstEdge = (Option<usize>, Vec<usize>, usize);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fst {
    input: Alphabet,
    output: Alphabet,
    states: Vec<String>,
    index: HashMap<String, usize>,
    out: Vec<Vec<FstEdge>>,
    initial: usize,
    accepting: Vec<bool>,
}

#[derive(Clone, Debug)]
pub struct FstBuilder {
    input: Alphabet,
    output: Alphabet,
    states: Vec<String>,
    index: HashMap<String, usize>,
    edges: BTreeSet<(usize, Option<usize>, Vec<usize>, usize)>,
    initial: Option<usize>,
    accepting: BTreeSet<usize>,
}

impl FstBuilder {
    pub fn new(input: Alphabet, output: Alphabet) -> Self {
        FstBuilder {
            input,
            output,
            states: Vec::new(),
            index: HashMap::new(),
            edges: BTreeSet::new(),
            initial: None,
            accepting: BTreeSet::new(),
        }
    }

    pub fn input(&self) -> &Alphabet {
        &self.input
    }

    pub fn output(&self) -> &Alphabet {
        &self.output
    }

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

    pub fn edge(&mut self, src: usize, input: Option<usize>, output: Vec<usize>, dst: usize) {
        self.edges.insert((src, input, output, dst));
    }

    /// String-level transition; `input` may be the epsilon token.
    pub fn transition<S: AsRef<str>>(
        &mut self,
        src: &str,
        input: &str,
        output: &[S],
        dst: &str,
    ) -> Result<()> {
        let i = if input == crate::alphabet::EPSILON {
            None
        } else {
            Some(
                self.input
                    .index_of(input)
                    .ok_or_else(|| Error::UnknownSymbol(input.to_string()))?,
            )
        };
        let o = self.output.encode(output)?;
        let s = self.state(src);
        let d = self.state(dst);
        self.edge(s, i, o, d);
        Ok(())
    }

    pub fn set_initial(&mut self, s: usize) {
        self.initial = Some(s);
    }

    pub fn set_accepting(&mut self, s: usize) {
        self.accepting.insert(s);
    }

    pub fn build(self) -> Result<Fst> {
        let initial = self
            .initial
            .ok_or_else(|| Error::Invalid("no initial state".into()))?;
        let n = self.states.len();
        let mut out = vec![Vec::new(); n];
        for (s, i, o, d) in self.edges {
            out[s].push((i, o, d));
        }
        let mut accepting = vec![false; n];
        for s in self.accepting {
            accepting[s] = true;
        }
        Ok(Fst {
            input: self.input,
            output: self.output,
            states: self.states,
            index: self.index,
            out,
            initial,
            accepting,
        })
    }
}

/// Result of bounded application.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Application {
    pub outputs: BTreeSet<Word>,
    /// Set when some run was cut because its output outgrew the cap.
    pub truncated: bool,
}

/// Pairs `(u, v)` with `u T v`, collected over all inputs up to a length.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RelationSample {
    pub pairs: BTreeSet<(Word, Word)>,
    pub truncated: bool,
}

impl Fst {
    /// Identity relation on all words over `alphabet`.
    pub fn identity(alphabet: Alphabet) -> Fst {
        let mut b = FstBuilder::new(alphabet.clone(), alphabet);
        let s = b.state("id");
        b.set_initial(s);
        b.set_accepting(s);
        for a in 0..b.input().len() {
            b.edge(s, Some(a), vec![a], s);
        }
        b.build().expect("initial is set")
    }

    /// `{(x, x) : x ∈ L(a)}`.
    pub fn id_on(a: &Nfa) -> Fst {
        let alphabet = a.alphabet().clone();
        let mut b = FstBuilder::new(alphabet.clone(), alphabet);
        for name in a.state_names() {
            b.state(name.clone());
        }
        for (s, l, d) in a.transitions() {
            b.edge(s, l, l.into_iter().collect(), d);
        }
        b.set_initial(a.initial());
        for s in a.accepting_states() {
            b.set_accepting(s);
        }
        b.build().expect("initial is set")
    }

    pub fn input_alphabet(&self) -> &Alphabet {
        &self.input
    }

    pub fn output_alphabet(&self) -> &Alphabet {
        &self.output
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

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn is_accepting(&self, s: usize) -> bool {
        self.accepting[s]
    }

    pub fn accepting_states(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.num_states()).filter(|&s| self.accepting[s])
    }

    pub fn successors(&self, s: usize) -> &[FstEdge] {
        &self.out[s]
    }

    pub fn transitions(
        &self,
    ) -> impl Iterator<Item = (usize, Option<usize>, &[usize], usize)> + '_ {
        self.out
            .iter()
            .enumerate()
            .flat_map(|(s, es)| es.iter().map(move |(i, o, d)| (s, *i, o.as_slice(), *d)))
    }

    pub fn num_transitions(&self) -> usize {
        self.out.iter().map(Vec::len).sum()
    }

    /// No epsilon-input moves and at most one move per (state, input symbol).
    /// Always recomputed from the transition table.
    pub fn is_deterministic(&self) -> bool {
        self.out.iter().all(|es| {
            let mut seen = BTreeSet::new();
            es.iter().all(|(i, _, _)| i.is_some_and(|a| seen.insert(a)))
        })
    }

    /// Copy in which every transition outputs at most one symbol; longer
    /// outputs are spread over fresh intermediate states.
    pub fn split_outputs(&self) -> Fst {
        let mut b = FstBuilder::new(self.input.clone(), self.output.clone());
        for name in &self.states {
            b.state(name.clone());
        }
        b.set_initial(self.initial);
        for s in self.accepting_states() {
            b.set_accepting(s);
        }
        for (k, (s, i, o, d)) in self.transitions().enumerate() {
            if o.len() <= 1 {
                b.edge(s, i, o.to_vec(), d);
                continue;
            }
            let mut cur = s;
            for (j, &x) in o.iter().enumerate() {
                let (inp, next) = if j + 1 == o.len() {
                    (if j == 0 { i } else { None }, d)
                } else {
                    let m = b.state(format!("{}~{k}.{j}", self.states[s]));
                    (if j == 0 { i } else { None }, m)
                };
                b.edge(cur, inp, vec![x], next);
                cur = next;
            }
        }
        b.build().expect("initial is set")
    }

    /// Bounded application: every `v` with `u T v` and `|v| <= output_cap`.
    pub fn apply<S: AsRef<str>>(&self, u: &[S], output_cap: usize) -> Result<Application> {
        let enc = self.input.encode(u)?;
        let (outs, truncated) = self.apply_encoded(&enc, output_cap);
        Ok(Application {
            outputs: outs.into_iter().map(|v| self.output.decode(&v)).collect(),
            truncated,
        })
    }

    pub fn apply_encoded(&self, u: &[usize], output_cap: usize) -> (BTreeSet<Vec<usize>>, bool) {
        let mut results = BTreeSet::new();
        let mut truncated = false;
        let start = (self.initial, 0usize, Vec::new());
        let mut seen: HashSet<(usize, usize, Vec<usize>)> = HashSet::from([start.clone()]);
        let mut stack = vec![start];
        while let Some((s, pos, v)) = stack.pop() {
            if pos == u.len() && self.accepting[s] {
                results.insert(v.clone());
            }
            for (i, o, d) in &self.out[s] {
                let pos2 = match i {
                    None => pos,
                    Some(a) if pos < u.len() && u[pos] == *a => pos + 1,
                    Some(_) => continue,
                };
                if v.len() + o.len() > output_cap {
                    truncated = true;
                    continue;
                }
                let mut v2 = v.clone();
                v2.extend_from_slice(o);
                let next = (*d, pos2, v2);
                if seen.insert(next.clone()) {
                    stack.push(next);
                }
            }
        }
        (results, truncated)
    }

    /// Applies the transducer to every input of length at most `max_input_len`.
    pub fn relation_sample(&self, max_input_len: usize, output_cap: usize) -> RelationSample {
        let mut sample = RelationSample::default();
        for u in all_words(self.input.len(), max_input_len) {
            let (outs, truncated) = self.apply_encoded(&u, output_cap);
            sample.truncated |= truncated;
            let uw = self.input.decode(&u);
            for v in outs {
                sample.pairs.insert((uw.clone(), self.output.decode(&v)));
            }
        }
        sample
    }

    /// Graphviz rendering.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph fst {\n  rankdir=LR;\n  __start [shape=point];\n");
        for (i, name) in self.states.iter().enumerate() {
            let shape = if self.accepting[i] {
                "doublecircle"
            } else {
                "circle"
            };
            s.push_str(&format!("  {i} [label={:?}, shape={shape}];\n", name));
        }
        s.push_str(&format!("  __start -> {};\n", self.initial));
        for (src, i, o, d) in self.transitions() {
            let inp = i.map_or("ε", |a| self.input.symbol(a));
            let outw = if o.is_empty() {
                "ε".to_string()
            } else {
                crate::alphabet::show_word(&self.output.decode(o))
            };
            s.push_str(&format!(
                "  {src} -> {d} [label={:?}];\n",
                format!("{inp}/{outw}")
            ));
        }
        s.push_str("}\n");
        s
    }
}

/// All index words of length `<= max_len` over `k` symbols, shortest first.
pub fn all_words(k: usize, max_len: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    let mut level = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::with_capacity(level.len() * k);
        for w in &level {
            for a in 0..k {
                let mut w2: Vec<usize> = w.clone();
                w2.push(a);
                next.push(w2);
            }
        }
        out.extend(next.iter().cloned());
        level = next;
    }
    out
}

/// Relational composition `t2 ∘ t1`: `u ↦ t2(t1(u))`.
pub fn compose(t1: &Fst, t2: &Fst) -> Result<Fst> {
    if !t1.output.same_as(&t2.input) {
        return Err(Error::AlphabetMismatch(format!(
            "first output [{}] vs second input [{}]",
            t1.output, t2.input
        )));
    }
    let t1 = t1.split_outputs();
    let mut b = FstBuilder::new(t1.input.clone(), t2.output.clone());
    let name = |p: usize, q: usize| format!("({},{})", t1.states[p], t2.states[q]);
    let start = b.state(name(t1.initial, t2.initial));
    b.set_initial(start);
    let mut ids: HashMap<(usize, usize), usize> =
        HashMap::from([((t1.initial, t2.initial), start)]);
    let mut queue = VecDeque::from([(t1.initial, t2.initial)]);
    while let Some((p, q)) = queue.pop_front() {
        let id = ids[&(p, q)];
        if t1.accepting[p] && t2.accepting[q] {
            b.set_accepting(id);
        }
        let mut moves: Vec<(Option<usize>, Vec<usize>, usize, usize)> = Vec::new();
        for (i, o, p2) in &t1.out[p] {
            match o.as_slice() {
                [] => moves.push((*i, Vec::new(), *p2, q)),
                [mid] => {
                    for (i2, o2, q2) in &t2.out[q] {
                        if *i2 == Some(*mid) {
                            moves.push((*i, o2.clone(), *p2, *q2));
                        }
                    }
                }
                _ => unreachable!("outputs were split"),
            }
        }
        for (i2, o2, q2) in &t2.out[q] {
            if i2.is_none() {
                moves.push((None, o2.clone(), p, *q2));
            }
        }
        for (i, o, p2, q2) in moves {
            let target = *ids.entry((p2, q2)).or_insert_with(|| {
                queue.push_back((p2, q2));
                b.state(name(p2, q2))
            });
            b.edge(id, i, o, target);
        }
    }
    b.build()
}

/// Inverse relation. Output words become input paths through fresh states.
pub fn invert(t: &Fst) -> Fst {
    let mut b = FstBuilder::new(t.output.clone(), t.input.clone());
    for name in &t.states {
        b.state(name.clone());
    }
    b.set_initial(t.initial);
    for s in t.accepting_states() {
        b.set_accepting(s);
    }
    for (k, (s, i, o, d)) in t.transitions().enumerate() {
        let emitted: Vec<usize> = i.into_iter().collect();
        if o.is_empty() {
            b.edge(s, None, emitted, d);
            continue;
        }
        let mut cur = s;
        for (j, &x) in o.iter().enumerate() {
            let next = if j + 1 == o.len() {
                d
            } else {
                b.state(format!("{}^{k}.{j}", t.states[s]))
            };
            let outw = if j == 0 { emitted.clone() } else { Vec::new() };
            b.edge(cur, Some(x), outw, next);
            cur = next;
        }
    }
    b.build().expect("initial is set")
}

/// NFA for `{u : t(u) ∩ L(a) ≠ ∅}`: pairs of transducer and automaton states,
/// where each transducer move advances the automaton over its whole output.
pub fn preimage_nfa(t: &Fst, a: &Nfa) -> Result<Nfa> {
    if !t.output.same_as(a.alphabet()) {
        return Err(Error::AlphabetMismatch(format!(
            "transducer output [{}] vs automaton [{}]",
            t.output,
            a.alphabet()
        )));
    }
    let mut b = NfaBuilder::new(t.input.clone());
    let name = |p: usize, q: usize| format!("({},{})", t.states[p], a.state_name(q));
    let start = b.state(name(t.initial, a.initial()));
    b.set_initial(start);
    let mut ids: HashMap<(usize, usize), usize> =
        HashMap::from([((t.initial, a.initial()), start)]);
    let mut queue = VecDeque::from([(t.initial, a.initial())]);
    while let Some((p, q)) = queue.pop_front() {
        let id = ids[&(p, q)];
        if t.accepting[p] && a.is_accepting(q) {
            b.set_accepting(id);
        }
        let mut moves: Vec<(Option<usize>, usize, usize)> = Vec::new();
        for &(l, q2) in a.successors(q) {
            if l.is_none() {
                moves.push((None, p, q2));
            }
        }
        for (i, o, p2) in &t.out[p] {
            let mut set = a.closure(&[q]);
            for &x in o {
                set = a.step_set(&set, x);
            }
            for q2 in set {
                moves.push((*i, *p2, q2));
            }
        }
        for (i, p2, q2) in moves {
            let target = *ids.entry((p2, q2)).or_insert_with(|| {
                queue.push_back((p2, q2));
                b.state(name(p2, q2))
            });
            b.edge(id, i, target);
        }
    }
    b.build()
}

/// NFA for `t(L(a))`, as the preimage under the inverse transducer.
pub fn image_nfa(t: &Fst, a: &Nfa) -> Result<Nfa> {
    if !t.input.same_as(a.alphabet()) {
        return Err(Error::AlphabetMismatch(format!(
            "transducer input [{}] vs automaton [{}]",
            t.input,
            a.alphabet()
        )));
    }
    preimage_nfa(&invert(t), a)
}

//! One-way automata with an auxiliary data structure reached through a query
//! tape, their bounded simulation, and the constructions on them.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::hash::Hash;

use crate::alphabet::{Alphabet, Verdict, Word, EPSILON};
use crate::error::{Error, Result};
use crate::fst::{Fst, FstBuilder};
use crate::protocol::{ProtocolAlphabet, ProtocolOracle};
use crate::search::Bounds;

/// Token for the left endmarker in files and move labels.
pub const LEFT_END: &str = "lm";
/// Token for the right endmarker.
pub const RIGHT_END: &str = "rm";

/// What a write move reads.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Read {
    Eps,
    Letter(usize),
    Left,
    Right,
}

/// `(read, written word, target)`.
pub type WriteMove = (Read, Word, usize);
/// `(query, response, target)`.
pub type QueryMove = (String, String, usize);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdsAutomaton {
    input: Alphabet,
    protocol: ProtocolAlphabet,
    states: Vec<String>,
    index: HashMap<String, usize>,
    query: Vec<bool>,
    wmoves: Vec<Vec<WriteMove>>,
    qmoves: Vec<Vec<QueryMove>>,
    initial: usize,
    accepting: Vec<bool>,
}

#[derive(Clone, Debug)]
pub struct AdsBuilder {
    input: Alphabet,
    protocol: ProtocolAlphabet,
    states: Vec<String>,
    index: HashMap<String, usize>,
    query: Vec<bool>,
    wmoves: BTreeSet<(usize, Read, Word, usize)>,
    qmoves: BTreeSet<(usize, String, String, usize)>,
    initial: Option<usize>,
    accepting: BTreeSet<usize>,
}

impl AdsBuilder {
    pub fn new(input: Alphabet, protocol: ProtocolAlphabet) -> Self {
        AdsBuilder {
            input,
            protocol,
            states: Vec::new(),
            index: HashMap::new(),
            query: Vec::new(),
            wmoves: BTreeSet::new(),
            qmoves: BTreeSet::new(),
            initial: None,
            accepting: BTreeSet::new(),
        }
    }

    pub fn input(&self) -> &Alphabet {
        &self.input
    }

    pub fn protocol(&self) -> &ProtocolAlphabet {
        &self.protocol
    }

    /// Write state, created on first mention.
    pub fn state(&mut self, name: impl Into<String>) -> usize {
        let name = name.into();
        if let Some(&i) = self.index.get(&name) {
            return i;
        }
        let i = self.states.len();
        self.index.insert(name.clone(), i);
        self.states.push(name);
        self.query.push(false);
        i
    }

    pub fn query_state(&mut self, name: impl Into<String>) -> usize {
        let i = self.state(name);
        self.query[i] = true;
        i
    }

    pub fn mark_query(&mut self, s: usize) {
        self.query[s] = true;
    }

    pub fn wmove(&mut self, src: usize, read: Read, write: Word, dst: usize) {
        self.wmoves.insert((src, read, write, dst));
    }

    pub fn qmove(&mut self, src: usize, q: impl Into<String>, r: impl Into<String>, dst: usize) {
        self.qmoves.insert((src, q.into(), r.into(), dst));
    }

    /// Parses a read label: `eps`, `lm`, `rm`, or an input letter.
    pub fn read_label(&self, tok: &str) -> Result<Read> {
        Ok(match tok {
            EPSILON => Read::Eps,
            LEFT_END => Read::Left,
            RIGHT_END => Read::Right,
            _ => Read::Letter(
                self.input
                    .index_of(tok)
                    .ok_or_else(|| Error::UnknownSymbol(tok.to_string()))?,
            ),
        })
    }

    pub fn set_initial(&mut self, s: usize) {
        self.initial = Some(s);
    }

    pub fn set_accepting(&mut self, s: usize) {
        self.accepting.insert(s);
    }

    pub fn build(self) -> Result<AdsAutomaton> {
        let initial = self
            .initial
            .ok_or_else(|| Error::Invalid("no initial state".into()))?;
        for t in [LEFT_END, RIGHT_END] {
            if self.input.contains(t) {
                return Err(Error::InvalidAlphabet(format!(
                    "`{t}` is reserved for endmarkers"
                )));
            }
        }
        let n = self.states.len();
        let mut wmoves = vec![Vec::new(); n];
        for (s, rd, x, d) in self.wmoves {
            if self.query[s] {
                return Err(Error::Invalid(format!(
                    "query state `{}` has a write move",
                    self.states[s]
                )));
            }
            if let Some(t) = x.iter().find(|t| !self.protocol.is_wr(t)) {
                return Err(Error::UnknownSymbol(t.clone()));
            }
            wmoves[s].push((rd, x, d));
        }
        let mut qmoves = vec![Vec::new(); n];
        for (s, q, r, d) in self.qmoves {
            if !self.query[s] {
                return Err(Error::Invalid(format!(
                    "write state `{}` has a query move",
                    self.states[s]
                )));
            }
            if self.query[d] {
                return Err(Error::Invalid(format!(
                    "query move from `{}` lands in query state `{}`",
                    self.states[s], self.states[d]
                )));
            }
            if !self.protocol.is_valid(&q, &r) {
                return Err(Error::Invalid(format!("({q}, {r}) is not a valid pair")));
            }
            qmoves[s].push((q, r, d));
        }
        let mut accepting = vec![false; n];
        for s in self.accepting {
            accepting[s] = true;
        }
        Ok(AdsAutomaton {
            input: self.input,
            protocol: self.protocol,
            states: self.states,
            index: self.index,
            query: self.query,
            wmoves,
            qmoves,
            initial,
            accepting,
        })
    }
}

/// Result of a bounded search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimOutcome {
    pub verdict: Verdict,
    /// Distinct configurations visited.
    pub configs: usize,
    /// Protocol of an accepting run.
    pub protocol: Option<Word>,
    /// Input word of an accepting run, for searches that guess the input.
    pub input: Option<Word>,
}

struct Node<S> {
    state: usize,
    pos: Pos,
    tape: Word,
    ostate: S,
    blocks: usize,
    parent: usize,
    event: Event,
}

#[derive(Clone, Debug)]
enum Event {
    Start,
    Letter(usize),
    Write,
    Query(String, String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Pos {
    /// Index into `⊢w⊣` for a fixed word.
    Fixed(usize),
    BeforeLeft,
    /// Letters guessed so far.
    Inside(usize),
    AfterRight,
}

impl AdsAutomaton {
    pub fn input_alphabet(&self) -> &Alphabet {
        &self.input
    }

    pub fn protocol(&self) -> &ProtocolAlphabet {
        &self.protocol
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

    pub fn is_query_state(&self, s: usize) -> bool {
        self.query[s]
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

    pub fn write_moves(&self, s: usize) -> &[WriteMove] {
        &self.wmoves[s]
    }

    pub fn query_moves(&self, s: usize) -> &[QueryMove] {
        &self.qmoves[s]
    }

    pub fn read_token(&self, r: Read) -> &str {
        match r {
            Read::Eps => EPSILON,
            Read::Left => LEFT_END,
            Read::Right => RIGHT_END,
            Read::Letter(a) => self.input.symbol(a),
        }
    }

    /// Copy into a builder, for constructions that add to an automaton.
    pub fn to_builder(&self) -> AdsBuilder {
        let mut b = AdsBuilder::new(self.input.clone(), self.protocol.clone());
        for (i, name) in self.states.iter().enumerate() {
            b.state(name.clone());
            if self.query[i] {
                b.mark_query(i);
            }
        }
        for s in 0..self.num_states() {
            for (r, x, d) in &self.wmoves[s] {
                b.wmove(s, *r, x.clone(), *d);
            }
            for (q, r, d) in &self.qmoves[s] {
                b.qmove(s, q.clone(), r.clone(), *d);
            }
        }
        b.set_initial(self.initial);
        for s in self.accepting_states() {
            b.set_accepting(s);
        }
        b
    }

    /// Syntactic determinism: a write state has either one epsilon move and
    /// nothing else, or moves on pairwise distinct reads; a query state asks
    /// a single query and branches on distinct responses.
    pub fn is_deterministic(&self) -> bool {
        (0..self.num_states()).all(|s| {
            if self.query[s] {
                let qs: BTreeSet<&str> =
                    self.qmoves[s].iter().map(|(q, _, _)| q.as_str()).collect();
                let rs: BTreeSet<&str> =
                    self.qmoves[s].iter().map(|(_, r, _)| r.as_str()).collect();
                qs.len() <= 1 && rs.len() == self.qmoves[s].len()
            } else {
                let moves = &self.wmoves[s];
                let reads: BTreeSet<Read> = moves.iter().map(|(r, _, _)| *r).collect();
                let has_eps = reads.contains(&Read::Eps);
                reads.len() == moves.len() && (!has_eps || moves.len() == 1)
            }
        })
    }

    fn check_oracle<O: ProtocolOracle>(&self, o: &O) -> Result<()> {
        if &self.protocol != o.alphabet() {
            return Err(Error::AlphabetMismatch(
                "automaton and oracle use different protocol alphabets".into(),
            ));
        }
        Ok(())
    }

    /// Breadth-first search of the configuration graph, deduplicated on
    /// (state, input position, tape, oracle key). `step` says where a read
    /// leads from an input position; `done` marks positions past `⊣`.
    fn search<O, F, D>(
        &self,
        o: &O,
        bounds: &Bounds,
        start: Pos,
        step: F,
        done: D,
    ) -> Result<SimOutcome>
    where
        O: ProtocolOracle,
        F: Fn(Pos, Read) -> Vec<(Pos, Option<usize>)>,
        D: Fn(Pos) -> bool,
    {
        bounds.validate()?;
        self.check_oracle(o)?;
        let mut seen: HashSet<(usize, Pos, Word, String)> = HashSet::new();
        let mut nodes: Vec<Node<O::State>> = Vec::new();
        let mut queue = VecDeque::new();
        let mut hit = false;
        let init = o.initial_state();
        seen.insert((self.initial, start, Vec::new(), o.canonical_key(&init)));
        nodes.push(Node {
            state: self.initial,
            pos: start,
            tape: Vec::new(),
            ostate: init,
            blocks: 0,
            parent: 0,
            event: Event::Start,
        });
        queue.push_back(0usize);
        while let Some(i) = queue.pop_front() {
            let (state, pos) = (nodes[i].state, nodes[i].pos);
            if self.accepting[state]
                && done(pos)
                && nodes[i].tape.is_empty()
                && o.is_final(&nodes[i].ostate)
            {
                return Ok(self.outcome(Verdict::Accept, &nodes, Some(i)));
            }
            let mut next = Vec::new();
            if self.query[state] {
                let asked: BTreeSet<&String> =
                    self.qmoves[state].iter().map(|(q, _, _)| q).collect();
                for q in asked {
                    let Some((r, ostate)) = o.respond(&nodes[i].ostate, &nodes[i].tape, q) else {
                        continue;
                    };
                    for (q2, r2, d) in &self.qmoves[state] {
                        if q2 != q || *r2 != r {
                            continue;
                        }
                        if nodes[i].blocks >= bounds.max_blocks {
                            hit = true;
                            continue;
                        }
                        next.push(Node {
                            state: *d,
                            pos,
                            tape: Vec::new(),
                            ostate: ostate.clone(),
                            blocks: nodes[i].blocks + 1,
                            parent: i,
                            event: Event::Query(q.clone(), r.clone()),
                        });
                    }
                }
            } else {
                for (rd, x, d) in &self.wmoves[state] {
                    for (pos2, letter) in step(pos, *rd) {
                        if nodes[i].tape.len() + x.len() > bounds.max_tape {
                            hit = true;
                            continue;
                        }
                        let mut tape = nodes[i].tape.clone();
                        tape.extend(x.iter().cloned());
                        next.push(Node {
                            state: *d,
                            pos: pos2,
                            tape,
                            ostate: nodes[i].ostate.clone(),
                            blocks: nodes[i].blocks,
                            parent: i,
                            event: letter.map_or(Event::Write, Event::Letter),
                        });
                    }
                }
            }
            for node in next {
                let key = (
                    node.state,
                    node.pos,
                    node.tape.clone(),
                    o.canonical_key(&node.ostate),
                );
                if seen.contains(&key) {
                    continue;
                }
                if seen.len() >= bounds.max_configs {
                    return Ok(self.outcome(Verdict::Unknown, &nodes, None));
                }
                seen.insert(key);
                nodes.push(node);
                queue.push_back(nodes.len() - 1);
            }
        }
        let verdict = if hit {
            Verdict::Unknown
        } else {
            Verdict::Reject
        };
        Ok(self.outcome(verdict, &nodes, None))
    }

    fn outcome<S>(&self, verdict: Verdict, nodes: &[Node<S>], end: Option<usize>) -> SimOutcome {
        let Some(end) = end else {
            return SimOutcome {
                verdict,
                configs: nodes.len(),
                protocol: None,
                input: None,
            };
        };
        let mut protocol = Vec::new();
        let mut input = Vec::new();
        let mut i = end;
        while i != 0 {
            match &nodes[i].event {
                Event::Query(q, r) => {
                    protocol.push(r.clone());
                    protocol.push(q.clone());
                    protocol.extend(nodes[nodes[i].parent].tape.iter().rev().cloned());
                }
                Event::Letter(a) => input.push(self.input.symbol(*a).to_string()),
                Event::Write | Event::Start => {}
            }
            i = nodes[i].parent;
        }
        protocol.reverse();
        input.reverse();
        SimOutcome {
            verdict,
            configs: nodes.len(),
            protocol: Some(protocol),
            input: Some(input),
        }
    }

    /// Runs on `⊢w⊣`. Accepts in an accepting state with all input consumed,
    /// an empty query tape, and a final oracle state.
    pub fn simulate<O: ProtocolOracle, S: AsRef<str>>(
        &self,
        w: &[S],
        o: &O,
        bounds: &Bounds,
    ) -> Result<SimOutcome> {
        let word = self.input.encode(w)?;
        let n = word.len();
        let step = |pos: Pos, rd: Read| -> Vec<(Pos, Option<usize>)> {
            let Pos::Fixed(p) = pos else {
                return Vec::new();
            };
            let ok = match rd {
                Read::Eps => return vec![(pos, None)],
                Read::Left => p == 0,
                Read::Right => p == n + 1,
                Read::Letter(a) => p >= 1 && p <= n && word[p - 1] == a,
            };
            if ok {
                vec![(Pos::Fixed(p + 1), None)]
            } else {
                Vec::new()
            }
        };
        self.search(o, bounds, Pos::Fixed(0), step, |pos| {
            pos == Pos::Fixed(n + 2)
        })
    }

    /// Searches for an accepted input of length at most `max_len`, guessing
    /// the letters. `Reject` means no such input exists.
    pub fn find_accepted_word<O: ProtocolOracle>(
        &self,
        o: &O,
        max_len: usize,
        bounds: &Bounds,
    ) -> Result<SimOutcome> {
        let k = self.input.len();
        let step = |pos: Pos, rd: Read| -> Vec<(Pos, Option<usize>)> {
            match (pos, rd) {
                (_, Read::Eps) => vec![(pos, None)],
                (Pos::BeforeLeft, Read::Left) => vec![(Pos::Inside(0), None)],
                (Pos::Inside(i), Read::Letter(a)) if i < max_len && a < k => {
                    vec![(Pos::Inside(i + 1), Some(a))]
                }
                (Pos::Inside(_), Read::Right) => vec![(Pos::AfterRight, None)],
                _ => Vec::new(),
            }
        };
        self.search(o, bounds, Pos::BeforeLeft, step, |pos| {
            pos == Pos::AfterRight
        })
    }
}

/// Automaton over the flattened protocol alphabet accepting exactly the
/// correct protocols: it copies each write word to the query tape, asks the
/// query read from the input, and checks that the next input letter is the
/// response.
pub fn m_prot(pa: &ProtocolAlphabet) -> AdsAutomaton {
    let input = pa.flattened();
    let mut b = AdsBuilder::new(input.clone(), pa.clone());
    let start = b.state("start");
    let read = b.state("read");
    let acc = b.state("acc");
    b.set_initial(start);
    b.set_accepting(acc);
    b.wmove(start, Read::Left, Vec::new(), read);
    b.wmove(read, Read::Right, Vec::new(), acc);
    let letter = |t: &str| Read::Letter(input.index_of(t).expect("flattened alphabet"));
    for a in pa.wr() {
        b.wmove(read, letter(a), vec![a.clone()], read);
    }
    for q in pa.query() {
        let ask = b.query_state(format!("ask:{q}"));
        b.wmove(read, letter(q), Vec::new(), ask);
        for r in pa.responses_for(q) {
            let got = b.state(format!("got:{q}:{r}"));
            b.qmove(ask, q.clone(), r, got);
            b.wmove(got, letter(r), Vec::new(), read);
        }
    }
    b.build().expect("construction is well formed")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Phase {
    Pre,
    Mid,
    Post,
}

impl Phase {
    fn tag(self) -> &'static str {
        match self {
            Phase::Pre => "pre",
            Phase::Mid => "mid",
            Phase::Post => "post",
        }
    }
}

/// Automaton for `{u : t(u) ∩ L(m) ≠ ∅}`. The transducer runs lazily: it
/// moves only when `m` wants an input letter or `⊣` and the buffer of
/// transducer output is empty. Deterministic `m` and `t` give a
/// deterministic result.
pub fn compose_with_fst(m: &AdsAutomaton, t: &Fst) -> Result<AdsAutomaton> {
    if !t.output_alphabet().same_as(&m.input) {
        return Err(Error::AlphabetMismatch(format!(
            "transducer output [{}] vs automaton input [{}]",
            t.output_alphabet(),
            m.input
        )));
    }
    type Key = (usize, usize, Vec<usize>, Phase);
    let mut b = AdsBuilder::new(t.input_alphabet().clone(), m.protocol.clone());
    let name = |k: &Key| {
        let buf: Vec<&str> = k.2.iter().map(|&a| m.input.symbol(a)).collect();
        format!(
            "({},{},[{}],{})",
            m.states[k.0],
            t.state_name(k.1),
            buf.join("."),
            k.3.tag()
        )
    };
    let start: Key = (m.initial, t.initial(), Vec::new(), Phase::Pre);
    let mut ids: HashMap<Key, usize> = HashMap::new();
    let mut queue = VecDeque::new();
    let mut intern = |b: &mut AdsBuilder, queue: &mut VecDeque<Key>, k: Key| -> usize {
        if let Some(&i) = ids.get(&k) {
            return i;
        }
        let i = b.state(name(&k));
        if m.query[k.0] {
            b.mark_query(i);
        }
        ids.insert(k.clone(), i);
        queue.push_back(k);
        i
    };
    let sid = intern(&mut b, &mut queue, start);
    b.set_initial(sid);
    while let Some(k) = queue.pop_front() {
        let id = intern(&mut b, &mut queue, k.clone());
        let (ms, ts, buf, phase) = k;
        if phase == Phase::Post && m.accepting[ms] {
            b.set_accepting(id);
        }
        if m.query[ms] {
            for (q, r, d) in &m.qmoves[ms] {
                let target = intern(&mut b, &mut queue, (*d, ts, buf.clone(), phase));
                b.qmove(id, q.clone(), r.clone(), target);
            }
            continue;
        }
        let mut wants_input = false;
        for (rd, x, d) in &m.wmoves[ms] {
            match (rd, phase) {
                (Read::Eps, _) => {
                    let target = intern(&mut b, &mut queue, (*d, ts, buf.clone(), phase));
                    b.wmove(id, Read::Eps, x.clone(), target);
                }
                (Read::Left, Phase::Pre) => {
                    let target = intern(&mut b, &mut queue, (*d, ts, buf.clone(), Phase::Mid));
                    b.wmove(id, Read::Left, x.clone(), target);
                }
                (Read::Letter(a), Phase::Mid) => {
                    wants_input = true;
                    if buf.first() == Some(a) {
                        let target = intern(&mut b, &mut queue, (*d, ts, buf[1..].to_vec(), phase));
                        b.wmove(id, Read::Eps, x.clone(), target);
                    }
                }
                (Read::Right, Phase::Mid) => {
                    wants_input = true;
                    if buf.is_empty() && t.is_accepting(ts) {
                        let target = intern(&mut b, &mut queue, (*d, ts, Vec::new(), Phase::Post));
                        b.wmove(id, Read::Right, x.clone(), target);
                    }
                }
                _ => {}
            }
        }
        if wants_input && buf.is_empty() && phase == Phase::Mid {
            for (i, o, ts2) in t.successors(ts) {
                let target = intern(&mut b, &mut queue, (ms, *ts2, o.clone(), phase));
                let rd = i.map_or(Read::Eps, Read::Letter);
                b.wmove(id, rd, Vec::new(), target);
            }
        }
    }
    b.build()
}

/// Transducer from inputs to the candidate protocols of runs: write moves
/// emit their word, query moves emit `q r` without reading, and endmarker
/// reads become silent moves between three copies of the state set (before
/// `⊢`, between the markers, after `⊣`).
pub fn extractor(m: &AdsAutomaton) -> Fst {
    let out = m.protocol.flattened();
    let mut b = FstBuilder::new(m.input.clone(), out.clone());
    let id = |b: &mut FstBuilder, s: usize, p: Phase| match p {
        Phase::Mid => b.state(m.states[s].clone()),
        _ => b.state(format!("{}:{}", p.tag(), m.states[s])),
    };
    let enc = |w: &[String]| {
        out.encode(w)
            .expect("protocol tokens are in the flattened alphabet")
    };
    let init = id(&mut b, m.initial, Phase::Pre);
    b.set_initial(init);
    for s in 0..m.num_states() {
        for p in [Phase::Pre, Phase::Mid, Phase::Post] {
            let src = id(&mut b, s, p);
            if p == Phase::Post && m.accepting[s] {
                b.set_accepting(src);
            }
            for (q, r, d) in &m.qmoves[s] {
                let dst = id(&mut b, *d, p);
                b.edge(src, None, enc(&[q.clone(), r.clone()]), dst);
            }
            for (rd, x, d) in &m.wmoves[s] {
                let (input, p2) = match (rd, p) {
                    (Read::Eps, _) => (None, p),
                    (Read::Left, Phase::Pre) => (None, Phase::Mid),
                    (Read::Letter(a), Phase::Mid) => (Some(*a), p),
                    (Read::Right, Phase::Mid) => (None, Phase::Post),
                    _ => continue,
                };
                let dst = id(&mut b, *d, p2);
                b.edge(src, input, enc(x), dst);
            }
        }
    }
    b.build().expect("initial is set")
}

/// Code of the `i`-th write letter (1-based): `a b^i a`.
pub fn letter_code(i: usize) -> Word {
    let mut w = vec!["a".to_string()];
    w.extend(std::iter::repeat_n("b".to_string(), i));
    w.push("a".to_string());
    w
}

/// Protocol alphabet with write letters `a b` and the same queries.
pub fn recoded_alphabet(pa: &ProtocolAlphabet) -> Result<ProtocolAlphabet> {
    let pairs: Vec<(&str, &str)> = pa.valid_pairs().collect();
    let q: Vec<&str> = pa.query().iter().map(String::as_str).collect();
    let r: Vec<&str> = pa.resp().iter().map(String::as_str).collect();
    ProtocolAlphabet::new(&["a", "b"], &q, &r, &pairs)
}

/// Rewrites every write letter as its code over `{a, b}`. Returns the new
/// automaton and the deterministic transducer that performs the coding.
pub fn two_letter_recode(m: &AdsAutomaton) -> Result<(AdsAutomaton, Fst)> {
    let pa = &m.protocol;
    if pa.wr().is_empty() {
        return Err(Error::InvalidAlphabet("no write letters to recode".into()));
    }
    let coded = recoded_alphabet(pa)?;
    let code = |w: &[String]| -> Word {
        w.iter()
            .flat_map(|t| {
                letter_code(pa.wr().iter().position(|x| x == t).expect("write letter") + 1)
            })
            .collect()
    };
    let mut b = AdsBuilder::new(m.input.clone(), coded);
    for (i, name) in m.states.iter().enumerate() {
        b.state(name.clone());
        if m.query[i] {
            b.mark_query(i);
        }
    }
    for s in 0..m.num_states() {
        for (rd, x, d) in &m.wmoves[s] {
            b.wmove(s, *rd, code(x), *d);
        }
        for (q, r, d) in &m.qmoves[s] {
            b.qmove(s, q.clone(), r.clone(), *d);
        }
    }
    b.set_initial(m.initial);
    for s in m.accepting_states() {
        b.set_accepting(s);
    }
    let wr = Alphabet::new(pa.wr().iter().cloned())?;
    let ab = Alphabet::new(["a", "b"])?;
    let mut cb = FstBuilder::new(wr.clone(), ab.clone());
    let c = cb.state("code");
    cb.set_initial(c);
    cb.set_accepting(c);
    for i in 0..wr.len() {
        cb.edge(c, Some(i), ab.encode(&letter_code(i + 1))?, c);
    }
    Ok((b.build()?, cb.build()?))
}

/// Oracle that decodes `a b^i a` write words before asking the inner one.
#[derive(Clone, Debug)]
pub struct RecodedOracle<O> {
    inner: O,
    alphabet: ProtocolAlphabet,
}

impl<O: ProtocolOracle> RecodedOracle<O> {
    pub fn new(inner: O) -> Result<Self> {
        let alphabet = recoded_alphabet(inner.alphabet())?;
        Ok(RecodedOracle { inner, alphabet })
    }

    /// Inverse of the letter coding; `None` if `w` is not a code sequence.
    pub fn decode(&self, w: &[String]) -> Option<Word> {
        let wr = self.inner.alphabet().wr();
        let mut out = Vec::new();
        let mut i = 0;
        while i < w.len() {
            if w[i] != "a" {
                return None;
            }
            let mut j = i + 1;
            while j < w.len() && w[j] == "b" {
                j += 1;
            }
            if j >= w.len() || w[j] != "a" || j == i + 1 {
                return None;
            }
            out.push(wr.get(j - i - 2)?.clone());
            i = j + 1;
        }
        Some(out)
    }
}

impl<O: ProtocolOracle> ProtocolOracle for RecodedOracle<O> {
    type State = O::State;

    fn alphabet(&self) -> &ProtocolAlphabet {
        &self.alphabet
    }

    fn initial_state(&self) -> O::State {
        self.inner.initial_state()
    }

    fn respond(&self, state: &O::State, u: &[String], q: &str) -> Option<(String, O::State)> {
        self.inner.respond(state, &self.decode(u)?, q)
    }

    fn canonical_key(&self, state: &O::State) -> String {
        self.inner.canonical_key(state)
    }

    fn reset_symbols(&self) -> Option<(String, String)> {
        self.inner.reset_symbols()
    }

    fn is_final(&self, state: &O::State) -> bool {
        self.inner.is_final(state)
    }
}

/// How a copied automaton treats its endmarker moves.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Marker {
    Read,
    Silent,
}

/// Copies `m` into `b` with phase-tripled states and a bit recording whether
/// the query tape is empty. Returns the index of `(state, phase, bit)`.
fn embed(
    b: &mut AdsBuilder,
    m: &AdsAutomaton,
    prefix: &str,
    left: Marker,
    right: Marker,
) -> HashMap<(usize, Phase, bool), usize> {
    let mut ids = HashMap::new();
    for s in 0..m.num_states() {
        for p in [Phase::Pre, Phase::Mid, Phase::Post] {
            for bit in [true, false] {
                let e = if bit { "e" } else { "w" };
                let i = b.state(format!("{prefix}{}{e}:{}", p.tag(), m.states[s]));
                if m.query[s] {
                    b.mark_query(i);
                }
                ids.insert((s, p, bit), i);
            }
        }
    }
    for s in 0..m.num_states() {
        for p in [Phase::Pre, Phase::Mid, Phase::Post] {
            for bit in [true, false] {
                let src = ids[&(s, p, bit)];
                for (q, r, d) in &m.qmoves[s] {
                    b.qmove(src, q.clone(), r.clone(), ids[&(*d, p, true)]);
                }
                for (rd, x, d) in &m.wmoves[s] {
                    let (read, p2) = match (rd, p) {
                        (Read::Eps, _) => (Read::Eps, p),
                        (Read::Left, Phase::Pre) => (
                            if left == Marker::Read {
                                Read::Left
                            } else {
                                Read::Eps
                            },
                            Phase::Mid,
                        ),
                        (Read::Letter(a), Phase::Mid) => (Read::Letter(*a), p),
                        (Read::Right, Phase::Mid) => (
                            if right == Marker::Read {
                                Read::Right
                            } else {
                                Read::Eps
                            },
                            Phase::Post,
                        ),
                        _ => continue,
                    };
                    b.wmove(src, read, x.clone(), ids[&(*d, p2, bit && x.is_empty())]);
                }
            }
        }
    }
    ids
}

fn reset_pair<O: ProtocolOracle>(o: &O) -> Result<(String, String)> {
    o.reset_symbols().ok_or(Error::MissingReset)
}

fn same_shape(m1: &AdsAutomaton, m2: &AdsAutomaton) -> Result<()> {
    if !m1.input.same_as(&m2.input) || m1.protocol != m2.protocol {
        return Err(Error::AlphabetMismatch(
            "operands use different alphabets".into(),
        ));
    }
    Ok(())
}

/// Automaton for `L(m1) · L(m2)`: runs `m1` up to a guessed split, issues
/// the reset block, then runs `m2` on the rest from a fresh storage.
pub fn concat<O: ProtocolOracle>(
    m1: &AdsAutomaton,
    m2: &AdsAutomaton,
    o: &O,
) -> Result<AdsAutomaton> {
    same_shape(m1, m2)?;
    let (rq, rr) = reset_pair(o)?;
    let mut b = AdsBuilder::new(m1.input.clone(), m1.protocol.clone());
    let first = embed(&mut b, m1, "1:", Marker::Read, Marker::Silent);
    let second = embed(&mut b, m2, "2:", Marker::Silent, Marker::Read);
    let reset = b.query_state("reset");
    let resume = b.state("resume");
    b.set_initial(first[&(m1.initial, Phase::Pre, true)]);
    for f in m1.accepting_states() {
        b.wmove(first[&(f, Phase::Post, true)], Read::Eps, Vec::new(), reset);
    }
    b.qmove(reset, rq, rr, resume);
    b.wmove(
        resume,
        Read::Eps,
        Vec::new(),
        second[&(m2.initial, Phase::Pre, true)],
    );
    for f in m2.accepting_states() {
        b.set_accepting(second[&(f, Phase::Post, true)]);
    }
    b.build()
}

/// Automaton for `L(m)*`: after `⊢`, repeatedly runs `m` on a guessed
/// factor followed by the reset block, and accepts at `⊣`.
pub fn star<O: ProtocolOracle>(m: &AdsAutomaton, o: &O) -> Result<AdsAutomaton> {
    let (rq, rr) = reset_pair(o)?;
    let mut b = AdsBuilder::new(m.input.clone(), m.protocol.clone());
    let start = b.state("start");
    let hub = b.state("hub");
    let acc = b.state("acc");
    let reset = b.query_state("reset");
    let ids = embed(&mut b, m, "f:", Marker::Silent, Marker::Silent);
    b.set_initial(start);
    b.set_accepting(acc);
    b.wmove(start, Read::Left, Vec::new(), hub);
    b.wmove(hub, Read::Right, Vec::new(), acc);
    b.wmove(
        hub,
        Read::Eps,
        Vec::new(),
        ids[&(m.initial, Phase::Pre, true)],
    );
    for f in m.accepting_states() {
        b.wmove(ids[&(f, Phase::Post, true)], Read::Eps, Vec::new(), reset);
    }
    b.qmove(reset, rq, rr, hub);
    b.build()
}

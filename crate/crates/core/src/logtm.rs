//! Turing machines with a read-only input, a work tape of fixed size, and
//! either a one-way advice tape or a query tape to a protocol oracle.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt;

use crate::ads::{LEFT_END, RIGHT_END};
use crate::alphabet::{Alphabet, Verdict, Word};
use crate::error::{Error, Result};
use crate::nfa::{Dfa, Nfa, NfaBuilder};
use crate::protocol::{ProtocolAlphabet, ProtocolOracle};
use crate::search::Bounds;

/// Symbol read on the advice tape after the advice word.
pub const LAMBDA: &str = "Λ";
/// Initial content of every work cell.
pub const BLANK: &str = "_";
/// Default limit on the number of surface configurations.
pub const DEFAULT_STATE_CAP: usize = 100_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Move {
    L,
    R,
    S,
}

impl Move {
    pub fn parse(s: &str) -> Option<Move> {
        match s {
            "L" => Some(Move::L),
            "R" => Some(Move::R),
            "S" => Some(Move::S),
            _ => None,
        }
    }

    fn apply(self, pos: usize, len: usize) -> Option<usize> {
        match self {
            Move::L => pos.checked_sub(1),
            Move::R => (pos + 1 < len).then_some(pos + 1),
            Move::S => Some(pos),
        }
    }
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Move::L => "L",
            Move::R => "R",
            Move::S => "S",
        })
    }
}

/// One transition. `advice: None` ignores the advice symbol; `consume`
/// advances the advice head. `emit` appends a symbol to the query tape.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Rule {
    pub from: usize,
    pub input: String,
    pub work: String,
    pub advice: Option<String>,
    pub to: usize,
    pub write: String,
    pub input_move: Move,
    pub work_move: Move,
    pub consume: bool,
    pub emit: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LogTm {
    states: Vec<String>,
    index: HashMap<String, usize>,
    input: Alphabet,
    work: Alphabet,
    advice: Option<Alphabet>,
    work_size: usize,
    initial: usize,
    accepting: Vec<bool>,
    rejecting: Vec<bool>,
    rules: Vec<Vec<Rule>>,
    queries: Vec<Option<String>>,
    responses: Vec<Vec<(String, usize)>>,
}

#[derive(Clone, Debug)]
pub struct LogTmBuilder {
    states: Vec<String>,
    index: HashMap<String, usize>,
    input: Alphabet,
    work: Alphabet,
    advice: Option<Alphabet>,
    work_size: usize,
    initial: Option<usize>,
    accepting: BTreeSet<usize>,
    rejecting: BTreeSet<usize>,
    rules: Vec<Rule>,
    queries: BTreeSet<(usize, String)>,
    responses: BTreeSet<(usize, String, usize)>,
}

impl LogTmBuilder {
    pub fn new(input: Alphabet, work: Alphabet, work_size: usize) -> Self {
        LogTmBuilder {
            states: Vec::new(),
            index: HashMap::new(),
            input,
            work,
            advice: None,
            work_size,
            initial: None,
            accepting: BTreeSet::new(),
            rejecting: BTreeSet::new(),
            rules: Vec::new(),
            queries: BTreeSet::new(),
            responses: BTreeSet::new(),
        }
    }

    pub fn advice(&mut self, advice: Alphabet) {
        self.advice = Some(advice);
    }

    /// Index of the named state, declaring it on first use.
    pub fn state(&mut self, name: impl Into<String>) -> usize {
        let name = name.into();
        if let Some(&i) = self.index.get(&name) {
            return i;
        }
        self.states.push(name.clone());
        self.index.insert(name, self.states.len() - 1);
        self.states.len() - 1
    }

    pub fn set_initial(&mut self, s: usize) {
        self.initial = Some(s);
    }

    pub fn set_accepting(&mut self, s: usize) {
        self.accepting.insert(s);
    }

    pub fn set_rejecting(&mut self, s: usize) {
        self.rejecting.insert(s);
    }

    pub fn rule(&mut self, r: Rule) {
        self.rules.push(r);
    }

    /// In state `s` the machine asks `q` with the current query tape.
    pub fn query(&mut self, s: usize, q: impl Into<String>) {
        self.queries.insert((s, q.into()));
    }

    pub fn on_response(&mut self, s: usize, r: impl Into<String>, to: usize) {
        self.responses.insert((s, r.into(), to));
    }

    pub fn build(self) -> Result<LogTm> {
        let n = self.states.len();
        let initial = self
            .initial
            .ok_or_else(|| Error::Invalid("no initial state".into()))?;
        if self.work_size == 0 {
            return Err(Error::Invalid("work tape needs at least one cell".into()));
        }
        if !self.work.contains(BLANK) {
            return Err(Error::InvalidAlphabet(format!(
                "work alphabet must contain the blank `{BLANK}`"
            )));
        }
        for t in [LEFT_END, RIGHT_END] {
            if self.input.contains(t) {
                return Err(Error::InvalidAlphabet(format!(
                    "`{t}` is reserved for the endmarkers"
                )));
            }
        }
        if let Some(adv) = &self.advice {
            if adv.contains(LAMBDA) {
                return Err(Error::InvalidAlphabet(format!(
                    "`{LAMBDA}` is reserved for the padding"
                )));
            }
        }
        let mut queries: Vec<Option<String>> = vec![None; n];
        for (s, q) in self.queries {
            if queries[s].replace(q).is_some() {
                return Err(Error::Invalid(format!(
                    "state `{}` asks two queries",
                    self.states[s]
                )));
            }
        }
        let mut rules: Vec<Vec<Rule>> = vec![Vec::new(); n];
        for r in self.rules {
            let input_ok =
                r.input == LEFT_END || r.input == RIGHT_END || self.input.contains(&r.input);
            if !input_ok {
                return Err(Error::UnknownSymbol(r.input));
            }
            for w in [&r.work, &r.write] {
                if !self.work.contains(w) {
                    return Err(Error::UnknownSymbol(w.clone()));
                }
            }
            if let Some(a) = &r.advice {
                let known = a == LAMBDA || self.advice.as_ref().is_some_and(|adv| adv.contains(a));
                if !known {
                    return Err(Error::UnknownSymbol(a.clone()));
                }
            }
            if queries[r.from].is_some() {
                return Err(Error::Invalid(format!(
                    "query state `{}` has ordinary rules",
                    self.states[r.from]
                )));
            }
            rules[r.from].push(r);
        }
        let mut responses = vec![Vec::new(); n];
        for (s, r, to) in self.responses {
            if queries[s].is_none() {
                return Err(Error::Invalid(format!(
                    "`onresp` from non-query state `{}`",
                    self.states[s]
                )));
            }
            responses[s].push((r, to));
        }
        let flags = |set: &BTreeSet<usize>| (0..n).map(|s| set.contains(&s)).collect::<Vec<_>>();
        Ok(LogTm {
            accepting: flags(&self.accepting),
            rejecting: flags(&self.rejecting),
            states: self.states,
            index: self.index,
            input: self.input,
            work: self.work,
            advice: self.advice,
            work_size: self.work_size,
            initial,
            rules,
            queries,
            responses,
        })
    }
}

/// Control state, work tape content, work head and input head. The advice
/// and query tapes are not part of it.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SurfaceConfig {
    pub q: usize,
    pub mem: Vec<usize>,
    pub work_head: usize,
    pub input_head: usize,
}

impl LogTm {
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

    pub fn input_alphabet(&self) -> &Alphabet {
        &self.input
    }

    pub fn work_alphabet(&self) -> &Alphabet {
        &self.work
    }

    pub fn advice_alphabet(&self) -> Option<&Alphabet> {
        self.advice.as_ref()
    }

    pub fn work_size(&self) -> usize {
        self.work_size
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn is_accepting(&self, s: usize) -> bool {
        self.accepting[s]
    }

    pub fn is_rejecting(&self, s: usize) -> bool {
        self.rejecting[s]
    }

    pub fn rules(&self) -> impl Iterator<Item = &Rule> + '_ {
        self.rules.iter().flatten()
    }

    pub fn query_of(&self, s: usize) -> Option<&str> {
        self.queries[s].as_deref()
    }

    pub fn responses(&self, s: usize) -> &[(String, usize)] {
        &self.responses[s]
    }

    pub fn uses_advice(&self) -> bool {
        self.rules().any(|r| r.advice.is_some() || r.consume)
    }

    pub fn uses_queries(&self) -> bool {
        self.queries.iter().any(Option::is_some) || self.rules().any(|r| r.emit.is_some())
    }

    /// `⊢ x ⊣` as tokens.
    fn extended_input<S: AsRef<str>>(&self, x: &[S]) -> Result<Word> {
        self.input.encode(x)?;
        let mut ext = vec![LEFT_END.to_string()];
        ext.extend(x.iter().map(|s| s.as_ref().to_string()));
        ext.push(RIGHT_END.to_string());
        Ok(ext)
    }

    fn start_config(&self) -> SurfaceConfig {
        let blank = self.work.index_of(BLANK).expect("checked at build");
        SurfaceConfig {
            q: self.initial,
            mem: vec![blank; self.work_size],
            work_head: 0,
            input_head: 0,
        }
    }

    /// Rules applicable in `c`, paired with the successor configuration. A
    /// rule that would move a head off its tape is blocked.
    fn moves<'a>(&'a self, c: &SurfaceConfig, ext: &[String]) -> Vec<(&'a Rule, SurfaceConfig)> {
        let mut out = Vec::new();
        for r in &self.rules[c.q] {
            if r.input != ext[c.input_head] || r.work != self.work.symbol(c.mem[c.work_head]) {
                continue;
            }
            let (Some(ih), Some(wh)) = (
                r.input_move.apply(c.input_head, ext.len()),
                r.work_move.apply(c.work_head, self.work_size),
            ) else {
                continue;
            };
            let mut mem = c.mem.clone();
            mem[c.work_head] = self.work.index_of(&r.write).expect("checked at build");
            out.push((
                r,
                SurfaceConfig {
                    q: r.to,
                    mem,
                    work_head: wh,
                    input_head: ih,
                },
            ));
        }
        out
    }

    fn config_name(&self, c: &SurfaceConfig) -> String {
        let mem: Vec<&str> = c.mem.iter().map(|&i| self.work.symbol(i)).collect();
        format!(
            "{}|{}|{}|{}",
            self.states[c.q],
            mem.join(""),
            c.work_head,
            c.input_head
        )
    }
}

/// Runs on input `x` with advice `y`. Accepts when an accepting state is
/// reached with the advice head past `y`; after `y` the head reads `Λ`.
/// `Unknown` if more than `step_cap` configurations are visited.
pub fn run_with_advice<S: AsRef<str>, T: AsRef<str>>(
    tm: &LogTm,
    x: &[S],
    y: &[T],
    step_cap: usize,
) -> Result<Verdict> {
    let ext = tm.extended_input(x)?;
    let y: Vec<&str> = y.iter().map(AsRef::as_ref).collect();
    if let Some(adv) = &tm.advice {
        adv.encode(&y)?;
    } else if !y.is_empty() {
        return Err(Error::Invalid("machine has no advice alphabet".into()));
    }
    let start = (tm.start_config(), 0usize);
    let mut seen = HashSet::from([start.clone()]);
    let mut queue = VecDeque::from([start]);
    while let Some((c, pos)) = queue.pop_front() {
        if tm.accepting[c.q] && pos == y.len() {
            return Ok(Verdict::Accept);
        }
        let under = y.get(pos).copied().unwrap_or(LAMBDA);
        for (r, c2) in tm.moves(&c, &ext) {
            if r.advice.as_deref().is_some_and(|a| a != under) {
                continue;
            }
            let pos2 = if r.consume {
                (pos + 1).min(y.len())
            } else {
                pos
            };
            let next = (c2, pos2);
            if seen.contains(&next) {
                continue;
            }
            if seen.len() >= step_cap {
                return Ok(Verdict::Unknown);
            }
            seen.insert(next.clone());
            queue.push_back(next);
        }
    }
    Ok(Verdict::Reject)
}

/// NFA over the advice alphabet and `Λ` whose states are the surface
/// configurations on `x`. Each move is labeled by the advice symbol it
/// consumes, or is silent. A rule that looks at the advice symbol without
/// consuming it records the symbol in the state until it is consumed.
/// For every advice word `y`: `x` is accepted with advice `y` iff some
/// `yΛ^k` is accepted.
pub fn surface_config_nfa<S: AsRef<str>>(tm: &LogTm, x: &[S], state_cap: usize) -> Result<Nfa> {
    let ext = tm.extended_input(x)?;
    let adv = tm
        .advice
        .as_ref()
        .ok_or_else(|| Error::Invalid("machine has no advice alphabet".into()))?;
    let al = adv.with([LAMBDA])?;
    let syms: Vec<usize> = (0..al.len()).collect();
    let lambda = al.index_of(LAMBDA).expect("just added");
    type Key = (SurfaceConfig, Option<usize>);
    let mut b = NfaBuilder::new(al.clone());
    let name = |k: &Key| match k.1 {
        None => tm.config_name(&k.0),
        Some(a) => format!("{}|{}", tm.config_name(&k.0), al.symbol(a)),
    };
    let start: Key = (tm.start_config(), None);
    let sid = b.state(name(&start));
    b.set_initial(sid);
    let mut ids: HashMap<Key, usize> = HashMap::from([(start.clone(), sid)]);
    let mut queue = VecDeque::from([start]);
    while let Some(k) = queue.pop_front() {
        let id = ids[&k];
        let (c, pending) = &k;
        if tm.accepting[c.q] && pending.is_none_or(|p| p == lambda) {
            b.set_accepting(id);
        }
        for (r, c2) in tm.moves(c, &ext) {
            let need = r
                .advice
                .as_ref()
                .map(|a| al.index_of(a).expect("checked at build"));
            let mut edges: Vec<(Option<usize>, Option<usize>)> = Vec::new();
            match (need, r.consume, *pending) {
                (None, false, p) => edges.push((None, p)),
                (None, true, Some(p)) => edges.push((Some(p), None)),
                (None, true, None) => edges.extend(syms.iter().map(|&s| (Some(s), None))),
                (Some(a), true, p) if p.is_none_or(|p| p == a) => edges.push((Some(a), None)),
                (Some(a), false, p) if p.is_none_or(|p| p == a) => edges.push((None, Some(a))),
                _ => {}
            }
            for (label, p2) in edges {
                let next: Key = (c2.clone(), p2);
                let target = match ids.get(&next) {
                    Some(&t) => t,
                    None => {
                        if ids.len() >= state_cap {
                            return Err(Error::CapExceeded(format!(
                                "more than {state_cap} surface configurations"
                            )));
                        }
                        let t = b.state(name(&next));
                        ids.insert(next.clone(), t);
                        queue.push_back(next);
                        t
                    }
                };
                b.edge(id, label, target);
            }
        }
    }
    b.build()
}

/// The flagged automaton: states `(q, seen)` where `seen` records that `Λ`
/// was read. `Λ` moves lead into the flagged half and other symbols have no
/// moves there.
pub fn lambda_flagged(a: &Dfa, lambda: &str) -> Result<Dfa> {
    let l = a
        .alphabet()
        .index_of(lambda)
        .ok_or_else(|| Error::UnknownSymbol(lambda.to_string()))?;
    let n = a.num_states();
    let mut b = NfaBuilder::new(a.alphabet().clone());
    for flag in [false, true] {
        for s in 0..n {
            let id = b.state(format!(
                "{}{}",
                a.state_name(s),
                if flag { "'" } else { "" }
            ));
            if a.is_accepting(s) {
                b.set_accepting(id);
            }
        }
    }
    b.set_initial(a.initial());
    for (s, sym, d) in a.transitions() {
        let sym = sym.expect("deterministic automata have no epsilon moves");
        if sym == l {
            b.edge(s, Some(l), n + d);
            b.edge(n + s, Some(l), n + d);
        } else {
            b.edge(s, Some(sym), d);
        }
    }
    Dfa::new(b.build()?)
}

/// Automaton for `{y : yΛ^k ∈ L(a) for some k ≥ 0}` over the alphabet
/// without `Λ`: the unflagged half of [`lambda_flagged`], where a state
/// accepts iff a `Λ`-only path leads to an accepting state.
pub fn lambda_eliminate(a: &Dfa, lambda: &str) -> Result<Dfa> {
    let flagged = lambda_flagged(a, lambda)?;
    let n = a.num_states();
    let l = a
        .alphabet()
        .index_of(lambda)
        .expect("checked by the flagged construction");
    let al = a.alphabet().without(lambda)?;
    let mut b = NfaBuilder::new(al.clone());
    for s in 0..n {
        b.state(a.state_name(s));
    }
    b.set_initial(a.initial());
    for s in 0..n {
        let mut cur = s;
        let mut visited = HashSet::new();
        let accepts = loop {
            if flagged.is_accepting(cur) {
                break true;
            }
            if !visited.insert(cur) {
                break false;
            }
            match flagged.next(cur, l) {
                Some(d) => cur = d,
                None => break false,
            }
        };
        if accepts {
            b.set_accepting(s);
        }
        for &(sym, d) in flagged.successors(s) {
            let sym = sym.expect("deterministic");
            if sym != l {
                let name = a.alphabet().symbol(sym);
                b.edge(s, al.index_of(name), d);
            }
        }
    }
    Dfa::new(b.build()?)
}

#[derive(Clone, Debug)]
struct PNode<S> {
    c: SurfaceConfig,
    tape: Word,
    ostate: S,
    blocks: usize,
}

/// Bounded search over surface configurations, query tape and oracle key.
/// Accepts in an accepting state with an empty query tape and a final
/// oracle state.
pub fn run_with_protocol<S: AsRef<str>, O: ProtocolOracle>(
    tm: &LogTm,
    x: &[S],
    o: &O,
    bounds: &Bounds,
) -> Result<Verdict> {
    bounds.validate()?;
    if tm.uses_advice() {
        return Err(Error::Invalid(
            "protocol machines cannot read advice".into(),
        ));
    }
    let pa = o.alphabet();
    check_protocol_symbols(tm, pa)?;
    let ext = tm.extended_input(x)?;
    let init = o.initial_state();
    let start = PNode {
        c: tm.start_config(),
        tape: Vec::new(),
        ostate: init,
        blocks: 0,
    };
    let key = |n: &PNode<O::State>| (n.c.clone(), n.tape.clone(), o.canonical_key(&n.ostate));
    let mut seen = HashSet::from([key(&start)]);
    let mut queue = VecDeque::from([start]);
    let mut hit = false;
    while let Some(n) = queue.pop_front() {
        if tm.accepting[n.c.q] && n.tape.is_empty() && o.is_final(&n.ostate) {
            return Ok(Verdict::Accept);
        }
        let mut next = Vec::new();
        if let Some(q) = &tm.queries[n.c.q] {
            if let Some((r, ostate)) = o.respond(&n.ostate, &n.tape, q) {
                for (r2, to) in &tm.responses[n.c.q] {
                    if *r2 != r {
                        continue;
                    }
                    if n.blocks >= bounds.max_blocks {
                        hit = true;
                        continue;
                    }
                    let mut c = n.c.clone();
                    c.q = *to;
                    next.push(PNode {
                        c,
                        tape: Vec::new(),
                        ostate: ostate.clone(),
                        blocks: n.blocks + 1,
                    });
                }
            }
        } else {
            for (r, c) in tm.moves(&n.c, &ext) {
                let mut tape = n.tape.clone();
                if let Some(e) = &r.emit {
                    if tape.len() >= bounds.max_tape {
                        hit = true;
                        continue;
                    }
                    tape.push(e.clone());
                }
                next.push(PNode {
                    c,
                    tape,
                    ostate: n.ostate.clone(),
                    blocks: n.blocks,
                });
            }
        }
        for m in next {
            let k = key(&m);
            if seen.contains(&k) {
                continue;
            }
            if seen.len() >= bounds.max_configs {
                return Ok(Verdict::Unknown);
            }
            seen.insert(k);
            queue.push_back(m);
        }
    }
    Ok(if hit {
        Verdict::Unknown
    } else {
        Verdict::Reject
    })
}

fn check_protocol_symbols(tm: &LogTm, pa: &ProtocolAlphabet) -> Result<()> {
    for r in tm.rules() {
        if let Some(e) = &r.emit {
            if !pa.is_wr(e) {
                return Err(Error::UnknownSymbol(e.clone()));
            }
        }
    }
    for s in 0..tm.num_states() {
        if let Some(q) = &tm.queries[s] {
            if !pa.is_query(q) {
                return Err(Error::UnknownSymbol(q.clone()));
            }
            for (r, _) in &tm.responses[s] {
                if !pa.is_valid(q, r) {
                    return Err(Error::Invalid(format!("({q}, {r}) is not a valid pair")));
                }
            }
        }
    }
    Ok(())
}

/// Advice machine that reads the protocol of a query machine from its
/// advice tape: every emitted symbol, query and response is consumed as an
/// advice symbol instead. Its accepted advice words are the protocols of
/// accepting runs.
pub fn protocol_to_advice(tm: &LogTm, pa: &ProtocolAlphabet) -> Result<LogTm> {
    if tm.uses_advice() {
        return Err(Error::Invalid("machine already reads advice".into()));
    }
    check_protocol_symbols(tm, pa)?;
    let mut b = LogTmBuilder::new(tm.input.clone(), tm.work.clone(), tm.work_size);
    b.advice(pa.flattened());
    for name in &tm.states {
        b.state(name.clone());
    }
    b.set_initial(tm.initial);
    for s in 0..tm.num_states() {
        if tm.accepting[s] {
            b.set_accepting(s);
        }
        if tm.rejecting[s] {
            b.set_rejecting(s);
        }
    }
    for r in tm.rules() {
        let mut r2 = r.clone();
        if let Some(e) = r2.emit.take() {
            r2.advice = Some(e);
            r2.consume = true;
        }
        b.rule(r2);
    }
    let mut input_syms: Vec<String> = vec![LEFT_END.to_string(), RIGHT_END.to_string()];
    input_syms.extend(tm.input.symbols().iter().cloned());
    for s in 0..tm.num_states() {
        let Some(q) = &tm.queries[s] else { continue };
        let asked = b.state(format!("{}?", tm.states[s]));
        for i in &input_syms {
            for w in tm.work.symbols() {
                let step = |advice: &str, to: usize| Rule {
                    from: 0,
                    input: i.clone(),
                    work: w.clone(),
                    advice: Some(advice.to_string()),
                    to,
                    write: w.clone(),
                    input_move: Move::S,
                    work_move: Move::S,
                    consume: true,
                    emit: None,
                };
                b.rule(Rule {
                    from: s,
                    ..step(q, asked)
                });
                for (r, to) in &tm.responses[s] {
                    b.rule(Rule {
                        from: asked,
                        ..step(r, *to)
                    });
                }
            }
        }
    }
    b.build()
}

/// NFA over the flattened protocol alphabet accepting the protocols of the
/// accepting runs of a query machine on `x`.
pub fn protocol_nfa<S: AsRef<str>>(
    tm: &LogTm,
    x: &[S],
    pa: &ProtocolAlphabet,
    state_cap: usize,
) -> Result<Nfa> {
    let adv = protocol_to_advice(tm, pa)?;
    let a = surface_config_nfa(&adv, x, state_cap)?;
    let al = pa.flattened();
    let mut b = NfaBuilder::new(al.clone());
    for name in a.state_names() {
        b.state(name.clone());
    }
    b.set_initial(a.initial());
    for s in a.accepting_states() {
        b.set_accepting(s);
    }
    for (s, l, d) in a.transitions() {
        match l {
            None => b.edge(s, None, d),
            Some(l) => {
                if let Some(t) = al.index_of(a.alphabet().symbol(l)) {
                    b.edge(s, Some(t), d);
                }
            }
        }
    }
    b.build()
}

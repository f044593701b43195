//! Regular realizability: does a regular language meet a fixed filter? Also
//! the reductions between realizability and automata with storage.

use std::collections::{HashMap, HashSet, VecDeque};

use crate::ads::{compose_with_fst, extractor, m_prot, AdsAutomaton, Read};
use crate::alphabet::{Alphabet, Verdict, Word};
use crate::error::{Error, Result};
use crate::fst::{image_nfa, preimage_nfa, Fst, FstBuilder};
use crate::nfa::{Dfa, Nfa, NfaBuilder};
use crate::protocol::{
    membership, per_k_alphabet, per_k_membership_over, sigma_k, BuiltinOracle, DyckOracle,
    ProtocolAlphabet, ProtocolOracle, SingleInsertOracle, MINUS,
};
use crate::search::Bounds;

/// Verdict of a realizability decider. `Accept` always carries a witness in
/// both the automaton language and the filter.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NrrAnswer {
    pub verdict: Verdict,
    pub witness: Option<Word>,
    /// Search nodes created; zero for saturation.
    pub configs: usize,
}

impl NrrAnswer {
    fn no(configs: usize) -> Self {
        NrrAnswer {
            verdict: Verdict::Reject,
            witness: None,
            configs,
        }
    }

    fn yes(witness: Word, configs: usize) -> Self {
        NrrAnswer {
            verdict: Verdict::Accept,
            witness: Some(witness),
            configs,
        }
    }
}

/// A filter language: a protocol language or the periodic language
/// `{(w#)^k}` over the given letters.
#[derive(Clone, Debug)]
#[allow(clippy::large_enum_variant)]
pub enum Filter {
    Protocol(BuiltinOracle),
    PerK { k: usize, letters: Vec<String> },
}

impl Filter {
    /// Parses `dyck`, `dyck-exact`, `set`, `sis:K` or `per:K`. The periodic
    /// filter uses the digit letters `0..K-1`.
    pub fn from_name(name: &str) -> Result<Filter> {
        if let Some(k) = name.strip_prefix("per:") {
            let k: usize = k
                .parse()
                .map_err(|_| Error::Invalid(format!("bad repetition count in `{name}`")))?;
            if k == 0 {
                return Err(Error::Invalid("repetition count must be at least 1".into()));
            }
            return Ok(Filter::PerK {
                k,
                letters: sigma_k(k),
            });
        }
        Ok(Filter::Protocol(BuiltinOracle::from_name(name)?))
    }

    pub fn alphabet(&self) -> Alphabet {
        match self {
            Filter::Protocol(o) => o.alphabet().flattened(),
            Filter::PerK { letters, .. } => {
                per_k_alphabet(letters).expect("letters are distinct and not `#`")
            }
        }
    }

    pub fn contains<S: AsRef<str>>(&self, w: &[S]) -> bool {
        match self {
            Filter::Protocol(o) => membership(o, w),
            Filter::PerK { k, letters } => per_k_membership_over(w, letters, *k),
        }
    }
}

/// An automaton paired with a filter.
#[derive(Clone, Debug)]
pub struct NrrInstance {
    pub automaton: Nfa,
    pub filter: Filter,
}

impl NrrInstance {
    pub fn new(automaton: Nfa, filter: Filter) -> Result<Self> {
        check_alphabet(&automaton, &filter.alphabet())?;
        Ok(NrrInstance { automaton, filter })
    }

    /// Dispatches to the complete backend when there is one.
    pub fn decide(&self, bounds: &Bounds) -> Result<NrrAnswer> {
        match &self.filter {
            Filter::Protocol(BuiltinOracle::Dyck(d)) => nreg_dyck(&self.automaton, d.is_exact()),
            Filter::Protocol(o) => nreg_generic(&self.automaton, o, bounds),
            Filter::PerK { k, letters } => nreg_per_k(&self.automaton, *k, letters),
        }
    }
}

fn check_alphabet(a: &Nfa, expected: &Alphabet) -> Result<()> {
    if a.alphabet().same_set(expected) {
        Ok(())
    } else {
        Err(Error::AlphabetMismatch(format!(
            "automaton alphabet [{}] vs filter alphabet [{expected}]",
            a.alphabet()
        )))
    }
}

struct Node<S> {
    state: usize,
    tape: Word,
    ostate: S,
    blocks: usize,
    parent: usize,
    emitted: Word,
}

/// Bounded search over (automaton state, pending write word, oracle key).
/// Write tokens extend the pending word; a query token is answered by the
/// oracle and the automaton must then read that response.
pub fn nreg_generic<O: ProtocolOracle>(a: &Nfa, o: &O, bounds: &Bounds) -> Result<NrrAnswer> {
    bounds.validate()?;
    let pa = o.alphabet();
    check_alphabet(a, &pa.flattened())?;
    let a = a.trim();
    if a.is_empty() {
        return Ok(NrrAnswer::no(0));
    }
    let al = a.alphabet();
    let init = o.initial_state();
    let mut seen: HashSet<(usize, Word, String)> =
        HashSet::from([(a.initial(), Vec::new(), o.canonical_key(&init))]);
    let mut nodes = vec![Node {
        state: a.initial(),
        tape: Vec::new(),
        ostate: init,
        blocks: 0,
        parent: 0,
        emitted: Vec::new(),
    }];
    let mut queue = VecDeque::from([0usize]);
    let mut hit = false;
    while let Some(i) = queue.pop_front() {
        let n = &nodes[i];
        if a.is_accepting(n.state) && n.tape.is_empty() && o.is_final(&n.ostate) {
            let w = witness(&nodes, i);
            debug_assert!(a.accepts(&w).unwrap_or(false) && membership(o, &w));
            return Ok(NrrAnswer::yes(w, nodes.len()));
        }
        let mut next = Vec::new();
        for &(l, d) in a.successors(n.state) {
            let Some(l) = l else {
                next.push((d, n.tape.clone(), n.ostate.clone(), n.blocks, Vec::new()));
                continue;
            };
            let t = al.symbol(l);
            if pa.is_wr(t) {
                if n.tape.len() >= bounds.max_tape {
                    hit = true;
                    continue;
                }
                let mut tape = n.tape.clone();
                tape.push(t.to_string());
                next.push((d, tape, n.ostate.clone(), n.blocks, vec![t.to_string()]));
            } else if pa.is_query(t) {
                let Some((r, ostate)) = o.respond(&n.ostate, &n.tape, t) else {
                    continue;
                };
                if n.blocks >= bounds.max_blocks {
                    hit = true;
                    continue;
                }
                let ri = al
                    .index_of(&r)
                    .expect("responses are in the flattened alphabet");
                for d2 in a.step_set(&a.closure(&[d]), ri) {
                    next.push((
                        d2,
                        Vec::new(),
                        ostate.clone(),
                        n.blocks + 1,
                        vec![t.to_string(), r.clone()],
                    ));
                }
            }
        }
        for (state, tape, ostate, blocks, emitted) in next {
            let key = (state, tape, o.canonical_key(&ostate));
            if seen.contains(&key) {
                continue;
            }
            if seen.len() >= bounds.max_configs {
                return Ok(unknown(nodes.len()));
            }
            let tape = key.1.clone();
            seen.insert(key);
            nodes.push(Node {
                state,
                tape,
                ostate,
                blocks,
                parent: i,
                emitted,
            });
            queue.push_back(nodes.len() - 1);
        }
    }
    Ok(if hit {
        unknown(nodes.len())
    } else {
        NrrAnswer::no(nodes.len())
    })
}

fn unknown(configs: usize) -> NrrAnswer {
    NrrAnswer {
        verdict: Verdict::Unknown,
        witness: None,
        configs,
    }
}

fn witness<S>(nodes: &[Node<S>], mut i: usize) -> Word {
    let mut parts = Vec::new();
    while i != 0 {
        parts.push(&nodes[i].emitted);
        i = nodes[i].parent;
    }
    parts.into_iter().rev().flatten().cloned().collect()
}

/// One query block of the Dyck protocol seen as a pushdown move.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum StackOp {
    Push(usize),
    Pop(usize),
}

const BRACKETS: [(&str, &str, &str); 2] = [("push(", "(", ")"), ("push[", "[", "]")];

fn block_word(op: StackOp) -> Word {
    match op {
        StackOp::Push(x) => vec![BRACKETS[x].0.to_string(), BRACKETS[x].1.to_string()],
        StackOp::Pop(x) => vec!["pop".to_string(), BRACKETS[x].2.to_string()],
    }
}

/// How a balanced pair `(s, t)` was first derived: either `s = t`, or a
/// balanced prefix to `u` followed by a matched push/pop around `(v, w)`.
#[derive(Clone, Copy, Debug)]
enum Balanced {
    Empty,
    Extend {
        u: usize,
        push: usize,
        v: usize,
        w: usize,
    },
}

/// Complete decider for the Dyck filters by pushdown saturation. The
/// automaton states are the control states and each query block is a push
/// or pop. A balanced-path relation is saturated first; the prefix-closed
/// filter additionally allows unmatched pushes.
pub fn nreg_dyck(a: &Nfa, exact: bool) -> Result<NrrAnswer> {
    let pa = DyckOracle::new(exact).alphabet().clone();
    check_alphabet(a, &pa.flattened())?;
    let n = a.num_states();
    let al = a.alphabet();
    let sym = |t: &str| al.index_of(t).expect("checked alphabet");
    // moves[s]: (op, t) for every block path from s to t
    let mut moves: Vec<Vec<(StackOp, usize)>> = vec![Vec::new(); n];
    for (s, row) in moves.iter_mut().enumerate() {
        let from = a.closure(&[s]);
        for (x, (push, open, close)) in BRACKETS.iter().enumerate() {
            for t in a.step_set(&a.step_set(&from, sym(push)), sym(open)) {
                row.push((StackOp::Push(x), t));
            }
            for t in a.step_set(&a.step_set(&from, sym("pop")), sym(close)) {
                row.push((StackOp::Pop(x), t));
            }
        }
    }
    let accepting: Vec<bool> = (0..n)
        .map(|s| a.closure(&[s]).iter().any(|&c| a.is_accepting(c)))
        .collect();

    let mut bal: Vec<Vec<Option<Balanced>>> = vec![vec![None; n]; n];
    for (s, row) in bal.iter_mut().enumerate() {
        row[s] = Some(Balanced::Empty);
    }
    let mut changed = true;
    while changed {
        changed = false;
        for s in 0..n {
            for u in 0..n {
                if bal[s][u].is_none() {
                    continue;
                }
                for &(op, v) in &moves[u] {
                    let StackOp::Push(x) = op else { continue };
                    for w in 0..n {
                        if bal[v][w].is_none() {
                            continue;
                        }
                        for &(op2, t) in &moves[w] {
                            if op2 == StackOp::Pop(x) && bal[s][t].is_none() {
                                bal[s][t] = Some(Balanced::Extend { u, push: x, v, w });
                                changed = true;
                            }
                        }
                    }
                }
            }
        }
    }

    let q0 = a.initial();
    if exact {
        return Ok(
            match (0..n).find(|&t| accepting[t] && bal[q0][t].is_some()) {
                Some(t) => NrrAnswer::yes(expand(&bal, q0, t), 0),
                None => NrrAnswer::no(0),
            },
        );
    }
    // reach[t]: how t was reached with some stack: (previous state, None for
    // a balanced segment or Some(x) for an unmatched push)
    let mut reach: Vec<Option<(usize, Option<usize>)>> = vec![None; n];
    reach[q0] = Some((q0, None));
    let mut queue = VecDeque::from([q0]);
    while let Some(s) = queue.pop_front() {
        for t in 0..n {
            if reach[t].is_none() && bal[s][t].is_some() {
                reach[t] = Some((s, None));
                queue.push_back(t);
            }
        }
        for &(op, t) in &moves[s] {
            if let StackOp::Push(x) = op {
                if reach[t].is_none() {
                    reach[t] = Some((s, Some(x)));
                    queue.push_back(t);
                }
            }
        }
    }
    let Some(f) = (0..n).find(|&t| accepting[t] && reach[t].is_some()) else {
        return Ok(NrrAnswer::no(0));
    };
    let mut parts = Vec::new();
    let mut t = f;
    while t != q0 {
        let (s, how) = reach[t].expect("on the reach tree");
        parts.push(match how {
            None => expand(&bal, s, t),
            Some(x) => block_word(StackOp::Push(x)),
        });
        t = s;
    }
    Ok(NrrAnswer::yes(
        parts.into_iter().rev().flatten().collect(),
        0,
    ))
}

fn expand(bal: &[Vec<Option<Balanced>>], s: usize, t: usize) -> Word {
    match bal[s][t].expect("derived pair") {
        Balanced::Empty => Vec::new(),
        Balanced::Extend { u, push, v, w } => {
            let mut out = expand(bal, s, u);
            out.extend(block_word(StackOp::Push(push)));
            out.extend(expand(bal, v, w));
            out.extend(block_word(StackOp::Pop(push)));
            out
        }
    }
}

/// Complete decider for `{(w#)^k}`. Guesses the states reached after each
/// `#`, then runs `k` copies of the automaton in lockstep on `w`.
pub fn nreg_per_k<S: AsRef<str>>(a: &Nfa, k: usize, letters: &[S]) -> Result<NrrAnswer> {
    if k == 0 {
        return Err(Error::Invalid("repetition count must be at least 1".into()));
    }
    check_alphabet(a, &per_k_alphabet(letters)?)?;
    let a = a.remove_epsilon();
    let al = a.alphabet();
    let hash = al.index_of("#").expect("checked alphabet");
    let letter_ids: Vec<usize> = letters
        .iter()
        .map(|l| al.index_of(l.as_ref()).expect("checked alphabet"))
        .collect();
    let n = a.num_states();
    let after_hash: Vec<Vec<usize>> = (0..n).map(|s| a.step_set(&[s], hash)).collect();

    // key: guessed block starts (first is the initial state) and current copies
    type Key = (Vec<usize>, Vec<usize>);
    let mut starts: Vec<Vec<usize>> = vec![vec![a.initial()]];
    for _ in 1..k {
        starts = starts
            .into_iter()
            .flat_map(|g| {
                (0..n).map(move |s| {
                    let mut g = g.clone();
                    g.push(s);
                    g
                })
            })
            .collect();
    }
    let mut parent: HashMap<Key, Option<(Key, usize)>> = HashMap::new();
    let mut queue = VecDeque::new();
    for g in starts {
        let key = (g.clone(), g);
        parent.insert(key.clone(), None);
        queue.push_back(key);
    }
    let closes = |guess: &[usize], cur: &[usize]| {
        (0..k).all(|i| {
            let targets = &after_hash[cur[i]];
            if i + 1 < k {
                targets.contains(&guess[i + 1])
            } else {
                targets.iter().any(|&t| a.is_accepting(t))
            }
        })
    };
    while let Some(key) = queue.pop_front() {
        if closes(&key.0, &key.1) {
            let mut w = Vec::new();
            let mut cur = &key;
            while let Some((prev, l)) = &parent[cur] {
                w.push(al.symbol(*l).to_string());
                cur = prev;
            }
            w.reverse();
            w.push("#".to_string());
            let out: Word = w.iter().cloned().cycle().take(w.len() * k).collect();
            return Ok(NrrAnswer::yes(out, parent.len()));
        }
        for &l in &letter_ids {
            let mut tuples: Vec<Vec<usize>> = vec![Vec::new()];
            for &s in &key.1 {
                let succ = a.step_set(&[s], l);
                tuples = tuples
                    .into_iter()
                    .flat_map(|t| {
                        succ.iter().map(move |&d| {
                            let mut t = t.clone();
                            t.push(d);
                            t
                        })
                    })
                    .collect();
            }
            for t in tuples {
                let next = (key.0.clone(), t);
                if !parent.contains_key(&next) {
                    parent.insert(next.clone(), Some((key.clone(), l)));
                    queue.push_back(next);
                }
            }
        }
    }
    Ok(NrrAnswer::no(parent.len()))
}

/// NFA for all candidate protocols of `m`: the image of every input under
/// the extractor. `m` accepts some word iff this NFA meets the protocol
/// language.
pub fn nonemptiness_to_nrr(m: &AdsAutomaton) -> Result<Nfa> {
    let t = extractor(m);
    Ok(image_nfa(&t, &Nfa::universal(m.input_alphabet().clone()))?.trim())
}

/// Automaton whose language is `L(a) ∩ PROT`: the protocol checker composed
/// with the identity on `L(a)`.
pub fn nrr_to_nonemptiness(a: &Nfa, pa: &ProtocolAlphabet) -> Result<AdsAutomaton> {
    let mp = m_prot(pa);
    check_alphabet(a, mp.input_alphabet())?;
    let a = if a.alphabet().same_as(mp.input_alphabet()) {
        a.clone()
    } else {
        reorder(a, mp.input_alphabet())?
    };
    compose_with_fst(&mp, &Fst::id_on(&a))
}

/// Same automaton over a permuted alphabet.
fn reorder(a: &Nfa, target: &Alphabet) -> Result<Nfa> {
    let mut b = NfaBuilder::new(target.clone());
    for name in a.state_names() {
        b.state(name.clone());
    }
    for (s, l, d) in a.transitions() {
        let l = l.map(|x| {
            target
                .index_of(a.alphabet().symbol(x))
                .expect("same symbol set")
        });
        b.edge(s, l, d);
    }
    b.set_initial(a.initial());
    for f in a.accepting_states() {
        b.set_accepting(f);
    }
    b.build()
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum RegKey {
    /// In a query state, about to read the query.
    Ask(usize, usize),
    /// Query read; about to read a response.
    Await(usize, usize, String),
    /// Reading token `j` of write move `mv` from `src`; the move ends at
    /// input position `pos`.
    Emit {
        src: usize,
        mv: usize,
        pos: usize,
        j: usize,
    },
    /// No further move.
    Halt(usize, usize),
}

/// DFA accepting exactly the protocol words of the run of deterministic
/// `m` on `w`, tokens read in the order `m` writes, queries and receives
/// them, accepting where `m` may accept. Its language meets the protocol
/// language iff `m` accepts `w`.
pub fn membership_to_reg<S: AsRef<str>>(m: &AdsAutomaton, w: &[S]) -> Result<Dfa> {
    if !m.is_deterministic() {
        return Err(Error::NotDeterministic(
            "membership reduction needs a deterministic automaton".into(),
        ));
    }
    let word = m.input_alphabet().encode(w)?;
    let mut ext = vec![Read::Left];
    ext.extend(word.iter().map(|&a| Read::Letter(a)));
    ext.push(Read::Right);
    let done = ext.len();
    let out = m.protocol().flattened();

    // Follows moves that write nothing; `None` on a silent loop.
    let settle = |mut s: usize, mut pos: usize| -> Option<(RegKey, bool)> {
        let mut acc = false;
        let mut visited = HashSet::new();
        loop {
            if !visited.insert((s, pos)) {
                return None;
            }
            acc |= m.is_accepting(s) && pos == done;
            if m.is_query_state(s) {
                return Some((RegKey::Ask(s, pos), acc));
            }
            let step = m
                .write_moves(s)
                .iter()
                .enumerate()
                .find_map(|(i, (rd, x, d))| match rd {
                    Read::Eps => Some((i, x, *d, pos)),
                    _ if pos < done && ext[pos] == *rd => Some((i, x, *d, pos + 1)),
                    _ => None,
                });
            let Some((mv, x, d, pos2)) = step else {
                return Some((RegKey::Halt(s, pos), acc));
            };
            if !x.is_empty() {
                return Some((
                    RegKey::Emit {
                        src: s,
                        mv,
                        pos: pos2,
                        j: 0,
                    },
                    acc,
                ));
            }
            s = d;
            pos = pos2;
        }
    };

    let mut b = NfaBuilder::new(out.clone());
    let dead = b.state("dead");
    let name = |k: &RegKey, acc: bool| {
        let core = match k {
            RegKey::Ask(s, p) => format!("ask:{}@{p}", m.state_name(*s)),
            RegKey::Await(s, p, q) => format!("await:{}@{p}:{q}", m.state_name(*s)),
            RegKey::Emit { src, mv, pos, j } => {
                format!("emit:{}#{mv}@{pos}.{j}", m.state_name(*src))
            }
            RegKey::Halt(s, p) => format!("halt:{}@{p}", m.state_name(*s)),
        };
        if acc {
            format!("{core}+")
        } else {
            core
        }
    };
    let mut ids: HashMap<(RegKey, bool), usize> = HashMap::new();
    let mut queue = VecDeque::new();
    let mut intern =
        |b: &mut NfaBuilder, queue: &mut VecDeque<(RegKey, bool)>, k: Option<(RegKey, bool)>| {
            let Some(k) = k else { return dead };
            *ids.entry(k.clone()).or_insert_with(|| {
                queue.push_back(k.clone());
                b.state(name(&k.0, k.1))
            })
        };
    let start = intern(&mut b, &mut queue, settle(m.initial(), 0));
    b.set_initial(start);
    let sym = |t: &str| {
        out.index_of(t)
            .expect("protocol tokens are in the flattened alphabet")
    };
    while let Some(k) = queue.pop_front() {
        let id = intern(&mut b, &mut queue, Some(k.clone()));
        if k.1 {
            b.set_accepting(id);
        }
        match k.0 {
            RegKey::Ask(s, pos) => {
                let mut asked: Vec<&String> = m.query_moves(s).iter().map(|(q, _, _)| q).collect();
                asked.dedup();
                for q in asked {
                    let t = intern(
                        &mut b,
                        &mut queue,
                        Some((RegKey::Await(s, pos, q.clone()), false)),
                    );
                    b.edge(id, Some(sym(q)), t);
                }
            }
            RegKey::Await(s, pos, ref q) => {
                for (q2, r, d) in m.query_moves(s) {
                    if q2 == q {
                        let t = intern(&mut b, &mut queue, settle(*d, pos));
                        b.edge(id, Some(sym(r)), t);
                    }
                }
            }
            RegKey::Emit { src, mv, pos, j } => {
                let (_, x, d) = &m.write_moves(src)[mv];
                let next = if j + 1 < x.len() {
                    Some((
                        RegKey::Emit {
                            src,
                            mv,
                            pos,
                            j: j + 1,
                        },
                        false,
                    ))
                } else {
                    settle(*d, pos)
                };
                let t = intern(&mut b, &mut queue, next);
                b.edge(id, Some(sym(&x[j])), t);
            }
            RegKey::Halt(..) => {}
        }
    }
    Dfa::new(b.build()?)
}

/// Instance for the source filter from one for the target filter, when the
/// source filter is the image of the target under `t`: the preimage of
/// `L(a)`.
pub fn filter_transfer(a: &Nfa, t: &Fst) -> Result<Nfa> {
    preimage_nfa(t, a)
}

/// Deterministic transducer from single-insert protocols with blocks
/// `w ins +, w test +, …` (k blocks) to `(w#)^k`, over digit letters.
pub fn spk_to_perk_fst(k: usize) -> Result<Fst> {
    spk_to_perk_fst_over(&sigma_k(k), k)
}

pub fn spk_to_perk_fst_over<S: AsRef<str>>(letters: &[S], k: usize) -> Result<Fst> {
    if k == 0 {
        return Err(Error::Invalid("block count must be at least 1".into()));
    }
    let sis = SingleInsertOracle::over(letters)?;
    let input = sis.alphabet().flattened();
    let output = per_k_alphabet(letters)?;
    let mut b = FstBuilder::new(input.clone(), output.clone());
    let blocks: Vec<usize> = (0..=k).map(|i| b.state(format!("block{i}"))).collect();
    b.set_initial(blocks[0]);
    b.set_accepting(blocks[k]);
    let hash = vec![output.index_of("#").expect("per alphabet has #")];
    for i in 0..k {
        for l in letters {
            let l = l.as_ref();
            b.edge(
                blocks[i],
                input.index_of(l),
                vec![output.index_of(l).expect("shared letter")],
                blocks[i],
            );
        }
        let asked = b.state(format!("asked{i}"));
        let q = if i == 0 { "ins" } else { "test" };
        b.edge(blocks[i], input.index_of(q), Vec::new(), asked);
        b.edge(asked, input.index_of("+"), hash.clone(), blocks[i + 1]);
    }
    b.build()
}

/// Nondeterministic transducer from `(w#)^n` to single-insert protocols
/// with `n` blocks, over digit letters.
pub fn perk_to_spk_fst(n: usize) -> Result<Fst> {
    perk_to_spk_fst_over(&sigma_k(n), n)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Edit {
    Copy,
    Change,
    Erase,
    Add,
}

/// Each block `w#` becomes `v q r`: `v` is `w` itself, or `w` with at least
/// one letter changed, erased or added (others may change). Until `ins +`
/// has been written a copied block ends in `test −` or `ins +` and an
/// edited one in `test −`; afterwards a copied block ends in `test +` or
/// `ins −` and an edited one in `test −` or `ins −`.
pub fn perk_to_spk_fst_over<S: AsRef<str>>(letters: &[S], n: usize) -> Result<Fst> {
    if n == 0 {
        return Err(Error::Invalid("block count must be at least 1".into()));
    }
    let sis = SingleInsertOracle::over(letters)?;
    let output = sis.alphabet().flattened();
    let input = per_k_alphabet(letters)?;
    let letters: Vec<&str> = letters.iter().map(AsRef::as_ref).collect();
    let o = |t: &str| output.index_of(t).expect("single-insert token");
    let i = |t: &str| input.index_of(t).expect("per token");
    let mut b = FstBuilder::new(input.clone(), output.clone());
    let tag = |e: Edit| match e {
        Edit::Copy => "copy",
        Edit::Change => "change",
        Edit::Erase => "erase",
        Edit::Add => "add",
    };
    // block starts: (block index, ins + written)
    let mut start = HashMap::new();
    for blk in 0..=n {
        for ins in [false, true] {
            let s = b.state(format!("b{blk}{}", if ins { "i" } else { "" }));
            start.insert((blk, ins), s);
            if blk == n {
                b.set_accepting(s);
            }
        }
    }
    b.set_initial(start[&(0, false)]);
    for blk in 0..n {
        for ins in [false, true] {
            let from = start[&(blk, ins)];
            let to_same = start[&(blk + 1, ins)];
            let to_ins = start[&(blk + 1, true)];
            let base = format!("b{blk}{}", if ins { "i" } else { "" });
            for e in [Edit::Copy, Edit::Change, Edit::Erase, Edit::Add] {
                // `edited` is set once the required edit has happened
                let plain = b.state(format!("{base}:{}", tag(e)));
                let edited = if e == Edit::Copy {
                    plain
                } else {
                    b.state(format!("{base}:{}!", tag(e)))
                };
                b.edge(from, None, Vec::new(), plain);
                for &l in &letters {
                    for state in [plain, edited] {
                        b.edge(state, Some(i(l)), vec![o(l)], state);
                    }
                    match e {
                        Edit::Copy => {}
                        Edit::Change => {
                            for &l2 in letters.iter().filter(|&&l2| l2 != l) {
                                b.edge(plain, Some(i(l)), vec![o(l2)], edited);
                                b.edge(edited, Some(i(l)), vec![o(l2)], edited);
                            }
                        }
                        Edit::Erase | Edit::Add => {
                            for &l2 in letters.iter().filter(|&&l2| l2 != l) {
                                for state in [plain, edited] {
                                    b.edge(state, Some(i(l)), vec![o(l2)], state);
                                }
                            }
                            if e == Edit::Erase {
                                for state in [plain, edited] {
                                    b.edge(state, Some(i(l)), Vec::new(), edited);
                                }
                            } else {
                                for state in [plain, edited] {
                                    b.edge(state, None, vec![o(l)], edited);
                                }
                            }
                        }
                    }
                }
                let hash = Some(i("#"));
                let test = o("test");
                let insq = o("ins");
                let (plus, minus) = (o("+"), o(MINUS));
                match (e, ins) {
                    (Edit::Copy, false) => {
                        b.edge(edited, hash, vec![test, minus], to_same);
                        b.edge(edited, hash, vec![insq, plus], to_ins);
                    }
                    (Edit::Copy, true) => {
                        b.edge(edited, hash, vec![test, plus], to_same);
                        b.edge(edited, hash, vec![insq, minus], to_same);
                    }
                    (_, false) => b.edge(edited, hash, vec![test, minus], to_same),
                    (_, true) => {
                        b.edge(edited, hash, vec![test, minus], to_same);
                        b.edge(edited, hash, vec![insq, minus], to_same);
                    }
                }
            }
        }
    }
    b.build()
}

/// Non-emptiness of `m` decided through its candidate-protocol NFA.
pub fn ads_nonempty_via_nrr<O: ProtocolOracle>(
    m: &AdsAutomaton,
    o: &O,
    bounds: &Bounds,
) -> Result<NrrAnswer> {
    nreg_generic(&nonemptiness_to_nrr(m)?, o, bounds)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::tokens;
    use crate::protocol::SetOracle;

    fn w(s: &str) -> Word {
        tokens(&s.replace('-', MINUS))
    }

    fn dyck_words(words: &[&str]) -> Nfa {
        let al = DyckOracle::new(false).alphabet().flattened();
        let ws: Vec<Word> = words.iter().map(|s| tokens(s)).collect();
        Nfa::from_words(al, &ws).unwrap()
    }

    #[test]
    fn generic_on_dyck() {
        let a = dyck_words(&["push( ( pop )"]);
        let b = Bounds::default();
        let ans = nreg_generic(&a, &DyckOracle::new(false), &b).unwrap();
        assert_eq!(ans.verdict, Verdict::Accept);
        assert_eq!(ans.witness.unwrap(), tokens("push( ( pop )"));
        let a = dyck_words(&["push( ("]);
        assert_eq!(
            nreg_generic(&a, &DyckOracle::new(true), &b)
                .unwrap()
                .verdict,
            Verdict::Reject
        );
        assert_eq!(
            nreg_generic(&a, &DyckOracle::new(false), &b)
                .unwrap()
                .verdict,
            Verdict::Accept
        );
    }

    #[test]
    fn saturation_on_fixed_words() {
        let a = dyck_words(&["push( ( push[ [ pop ] pop )"]);
        let ans = nreg_dyck(&a, true).unwrap();
        assert_eq!(ans.witness.unwrap(), tokens("push( ( push[ [ pop ] pop )"));
        let a = dyck_words(&["push( ( pop ]"]);
        assert_eq!(nreg_dyck(&a, false).unwrap().verdict, Verdict::Reject);
        let a = dyck_words(&["push( ( push[ ["]);
        assert_eq!(nreg_dyck(&a, true).unwrap().verdict, Verdict::Reject);
        let ans = nreg_dyck(&a, false).unwrap();
        assert_eq!(ans.witness.unwrap(), tokens("push( ( push[ ["));
    }

    #[test]
    fn saturation_with_loop() {
        // (push( ( pop ))* and push( ( (pop ))?
        let al = DyckOracle::new(false).alphabet().flattened();
        let mut b = NfaBuilder::new(al.clone());
        let s = b.state("s");
        b.set_initial(s);
        b.set_accepting(s);
        for (x, l, y) in [
            ("s", "push(", "a"),
            ("a", "(", "b"),
            ("b", "pop", "c"),
            ("c", ")", "s"),
        ] {
            b.transition(x, l, y).unwrap();
        }
        let star = b.build().unwrap();
        assert_eq!(
            nreg_dyck(&star, true).unwrap().witness.unwrap(),
            Word::new()
        );
        let opt = dyck_words(&["push( (", "push( ( pop )"]);
        assert_eq!(
            nreg_dyck(&opt, true).unwrap().witness.unwrap(),
            tokens("push( ( pop )")
        );
    }

    #[test]
    fn per_k_decider() {
        let al = per_k_alphabet(&["a", "b"]).unwrap();
        let a = Nfa::from_words(al.clone(), &[tokens("a b # a b #"), tokens("a # b #")]).unwrap();
        let ans = nreg_per_k(&a, 2, &["a", "b"]).unwrap();
        assert_eq!(ans.witness.unwrap(), tokens("a b # a b #"));
        let a = Nfa::from_words(al, &[tokens("a # b #")]).unwrap();
        assert_eq!(
            nreg_per_k(&a, 2, &["a", "b"]).unwrap().verdict,
            Verdict::Reject
        );
    }

    #[test]
    fn spk_to_perk_maps_blocks() {
        let t = spk_to_perk_fst_over(&["a", "b"], 2).unwrap();
        assert!(t.is_deterministic());
        let out = t.apply(&w("a b ins + a b test +"), 20).unwrap().outputs;
        assert_eq!(
            out.into_iter().collect::<Vec<_>>(),
            vec![tokens("a b # a b #")]
        );
        assert!(t
            .apply(&w("a b test + a b test +"), 20)
            .unwrap()
            .outputs
            .is_empty());
    }

    #[test]
    fn perk_to_spk_modes() {
        let t = perk_to_spk_fst(1).unwrap();
        let out = t.apply(&tokens("0 #"), 6).unwrap().outputs;
        assert!(out.contains(&w("0 ins +")));
        assert!(out.contains(&w("0 test -")));
        assert!(!out.contains(&w("0 test +")));
        assert!(!out.contains(&w("ins +")));
        assert!(out.contains(&w("test -")));
        assert!(out.contains(&w("0 0 test -")));
    }

    #[test]
    fn membership_reduction_on_m_prot() {
        let o = SetOracle::new();
        let m = m_prot(o.alphabet());
        let p = w("a #ins # a #test +#");
        let d = membership_to_reg(&m, &p).unwrap();
        assert!(d.accepts(&p).unwrap());
        assert_eq!(
            nreg_generic(&d, &o, &Bounds::default()).unwrap().verdict,
            Verdict::Accept
        );
        let bad = w("a #test +#");
        let d = membership_to_reg(&m, &bad).unwrap();
        assert_eq!(
            nreg_generic(&d, &o, &Bounds::default()).unwrap().verdict,
            Verdict::Reject
        );
    }

    #[test]
    fn reductions_on_m_prot() {
        let o = SetOracle::new();
        let m = m_prot(o.alphabet());
        let a = nonemptiness_to_nrr(&m).unwrap();
        assert!(a.accepts(&Word::new()).unwrap());
        let one = Nfa::from_words(o.alphabet().flattened(), &[w("a #ins #")]).unwrap();
        let back = nrr_to_nonemptiness(&one, o.alphabet()).unwrap();
        let b = Bounds::default();
        assert!(back
            .simulate(&w("a #ins #"), &o, &b)
            .unwrap()
            .verdict
            .is_accept());
        assert!(!back
            .simulate(&w("a #ins -#"), &o, &b)
            .unwrap()
            .verdict
            .is_accept());
        let empty = Nfa::empty(o.alphabet().flattened());
        let back = nrr_to_nonemptiness(&empty, o.alphabet()).unwrap();
        assert_eq!(
            back.find_accepted_word(&o, 4, &b).unwrap().verdict,
            Verdict::Reject
        );
    }

    #[test]
    fn filter_names() {
        assert!(matches!(
            Filter::from_name("per:2").unwrap(),
            Filter::PerK { k: 2, .. }
        ));
        assert!(Filter::from_name("dyck-exact").is_ok());
        assert!(Filter::from_name("per:0").is_err());
        assert!(Filter::from_name("stack").is_err());
    }
}

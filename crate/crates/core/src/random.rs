//! Seeded generators of small random instances for tests and fuzzing.

use rand::seq::IndexedRandom;
use rand::Rng;

use crate::ads::{AdsAutomaton, AdsBuilder, Read};
use crate::alphabet::Alphabet;
use crate::fst::{Fst, FstBuilder};
use crate::nfa::{Dfa, Nfa, NfaBuilder};
use crate::protocol::ProtocolAlphabet;
use crate::universality::prot_x_alphabet;

fn names(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("q{i}")).collect()
}

/// NFA with `n` states, each with up to `max_out` moves to arbitrary states.
/// A move is silent with probability `eps`.
pub fn random_nfa<R: Rng>(
    rng: &mut R,
    alphabet: &Alphabet,
    n: usize,
    max_out: usize,
    eps: f64,
) -> Nfa {
    let mut b = NfaBuilder::new(alphabet.clone());
    for name in names(n) {
        b.state(name);
    }
    b.set_initial(0);
    for s in 0..n {
        for _ in 0..rng.random_range(0..=max_out) {
            let label = (!rng.random_bool(eps)).then(|| rng.random_range(0..alphabet.len()));
            b.edge(s, label, rng.random_range(0..n));
        }
        if rng.random_bool(0.3) {
            b.set_accepting(s);
        }
    }
    b.build().expect("initial is set")
}

/// NFA whose moves all go from a lower to a higher state index.
pub fn random_dag_nfa<R: Rng>(rng: &mut R, alphabet: &Alphabet, n: usize, edge_prob: f64) -> Nfa {
    let mut b = NfaBuilder::new(alphabet.clone());
    for name in names(n) {
        b.state(name);
    }
    b.set_initial(0);
    for s in 0..n {
        for d in s + 1..n {
            for a in 0..alphabet.len() {
                if rng.random_bool(edge_prob) {
                    b.edge(s, Some(a), d);
                }
            }
        }
        if rng.random_bool(0.4) {
            b.set_accepting(s);
        }
    }
    b.build().expect("initial is set")
}

/// Partial DFA: each (state, symbol) has a move with probability
/// `edge_prob`.
pub fn random_dfa<R: Rng>(rng: &mut R, alphabet: &Alphabet, n: usize, edge_prob: f64) -> Dfa {
    let mut b = NfaBuilder::new(alphabet.clone());
    for name in names(n) {
        b.state(name);
    }
    b.set_initial(0);
    for s in 0..n {
        for a in 0..alphabet.len() {
            if rng.random_bool(edge_prob) {
                b.edge(s, Some(a), rng.random_range(0..n));
            }
        }
        if rng.random_bool(0.35) {
            b.set_accepting(s);
        }
    }
    Dfa::new(b.build().expect("initial is set")).expect("one move per symbol")
}

fn random_word<R: Rng>(rng: &mut R, k: usize, max_len: usize) -> Vec<usize> {
    let len = rng.random_range(0..=max_len);
    (0..len).map(|_| rng.random_range(0..k)).collect()
}

/// Transducer with `n` states and outputs of length at most `max_out`.
/// Moves that read nothing only go forward, so every input has finitely
/// many outputs.
pub fn random_fst<R: Rng>(
    rng: &mut R,
    input: &Alphabet,
    output: &Alphabet,
    n: usize,
    max_out: usize,
) -> Fst {
    let mut b = FstBuilder::new(input.clone(), output.clone());
    for name in names(n) {
        b.state(name);
    }
    b.set_initial(0);
    for s in 0..n {
        for _ in 0..rng.random_range(1..=3) {
            let out = random_word(rng, output.len(), max_out);
            if s + 1 < n && rng.random_bool(0.2) {
                b.edge(s, None, out, rng.random_range(s + 1..n));
            } else {
                b.edge(
                    s,
                    Some(rng.random_range(0..input.len())),
                    out,
                    rng.random_range(0..n),
                );
            }
        }
        if rng.random_bool(0.4) {
            b.set_accepting(s);
        }
    }
    b.build().expect("initial is set")
}

/// Automaton with storage on at most `n` states. Moves go to higher state
/// indices except self-loops that read a letter or `⊣` and write nothing, so the
/// number of query blocks and the query tape stay bounded. With
/// `deterministic`, every write state has one silent move or distinct read
/// moves, and every query state asks one query.
pub fn random_ads<R: Rng>(
    rng: &mut R,
    input: &Alphabet,
    pa: &ProtocolAlphabet,
    n: usize,
    deterministic: bool,
) -> AdsAutomaton {
    let n = n.max(2);
    let mut b = AdsBuilder::new(input.clone(), pa.clone());
    // the last state is a write state so query moves have a target
    let query: Vec<bool> = (0..n)
        .map(|s| s > 0 && s + 1 < n && rng.random_bool(0.45))
        .collect();
    for (s, &q) in query.iter().enumerate() {
        if q {
            b.query_state(format!("q{s}"));
        } else {
            b.state(format!("q{s}"));
        }
    }
    b.set_initial(0);
    let write_targets = |s: usize| -> Vec<usize> { (s + 1..n).filter(|&d| !query[d]).collect() };
    for (s, &is_query) in query.iter().enumerate() {
        if is_query {
            let targets = write_targets(s);
            let qs: Vec<&String> = pa.query().iter().collect();
            let chosen: Vec<&String> = if deterministic {
                vec![*qs.choose(rng).expect("non-empty")]
            } else {
                qs.iter()
                    .copied()
                    .filter(|_| rng.random_bool(0.6))
                    .collect()
            };
            for q in chosen {
                for r in pa.responses_for(q) {
                    if rng.random_bool(0.75) {
                        b.qmove(
                            s,
                            q.clone(),
                            r,
                            *targets.choose(rng).expect("last state is a write state"),
                        );
                    }
                }
            }
            continue;
        }
        if s == 0 {
            b.wmove(0, Read::Left, Vec::new(), 1);
            if n > 2 && !deterministic && rng.random_bool(0.3) {
                b.wmove(0, Read::Left, Vec::new(), rng.random_range(1..n));
            }
            continue;
        }
        let mut used = Vec::new();
        for l in 0..input.len() {
            if rng.random_bool(0.4) {
                b.wmove(s, Read::Letter(l), Vec::new(), s);
                used.push(Read::Letter(l));
            }
        }
        if s + 1 == n {
            // the only way the last state can consume `⊣`
            b.wmove(s, Read::Right, Vec::new(), s);
            continue;
        }
        for _ in 0..rng.random_range(1..=2) {
            // `⊢` was read by the initial state, so later reads skip it
            let rd = match rng.random_range(0..10) {
                0..2 => Read::Eps,
                2..6 => Read::Right,
                _ => Read::Letter(rng.random_range(0..input.len())),
            };
            let clash = used.contains(&rd)
                || used.contains(&Read::Eps)
                || (rd == Read::Eps && !used.is_empty());
            if deterministic && clash {
                continue;
            }
            let d = rng.random_range(s + 1..n);
            let x: Vec<String> = if pa.wr().is_empty() || rng.random_bool(0.6) {
                Vec::new()
            } else {
                (0..rng.random_range(1..=2))
                    .map(|_| pa.wr().choose(rng).expect("non-empty").clone())
                    .collect()
            };
            b.wmove(s, rd, x, d);
            used.push(rd);
        }
    }
    b.set_accepting(n - 1);
    for (s, &is_query) in query.iter().enumerate().take(n - 1).skip(1) {
        if !is_query && rng.random_bool(0.3) {
            b.set_accepting(s);
        }
    }
    b.build().expect("generated automaton is well formed")
}

/// NFA over the alphabet of the external-set protocol. Moves on `0` and `1`
/// go forward; the others may go anywhere.
pub fn random_prot_x_nfa<R: Rng>(rng: &mut R, n: usize) -> Nfa {
    let al = prot_x_alphabet().flattened();
    let mut b = NfaBuilder::new(al.clone());
    for name in names(n) {
        b.state(name);
    }
    b.set_initial(0);
    let binary = [
        al.index_of("0").expect("binary"),
        al.index_of("1").expect("binary"),
    ];
    let others: Vec<usize> = (0..al.len()).filter(|i| !binary.contains(i)).collect();
    for s in 0..n {
        for d in s + 1..n {
            for &a in &binary {
                if rng.random_bool(0.35) {
                    b.edge(s, Some(a), d);
                }
            }
        }
        for _ in 0..rng.random_range(0..=2) {
            b.edge(
                s,
                Some(*others.choose(rng).expect("non-empty")),
                rng.random_range(0..n),
            );
        }
        if rng.random_bool(0.3) {
            b.set_accepting(s);
        }
    }
    b.build().expect("initial is set")
}

//! Fixtures and brute-force reference implementations shared by the
//! integration tests.

#![allow(dead_code)]

use std::collections::BTreeSet;

use adskit::ads::{LEFT_END, RIGHT_END};
use adskit::fst::all_words;
use adskit::logtm::{LogTm, LogTmBuilder, Move, Rule, BLANK, LAMBDA};
use adskit::nfa::Nfa;
use adskit::protocol::{membership, ProtocolOracle, SingleInsertOracle, MINUS};
use adskit::{Alphabet, Fst, Word};

pub fn ab() -> Alphabet {
    Alphabet::new(["a", "b"]).unwrap()
}

pub fn binary() -> Alphabet {
    Alphabet::new(["0", "1"]).unwrap()
}

/// Tokens with `-` standing for the minus response.
pub fn w(s: &str) -> Word {
    s.split_whitespace()
        .map(|t| {
            if t == "-" {
                MINUS.to_string()
            } else {
                t.to_string()
            }
        })
        .collect()
}

/// All words over `al` of length at most `n`, as tokens.
pub fn words_up_to(al: &Alphabet, n: usize) -> Vec<Word> {
    all_words(al.len(), n)
        .iter()
        .map(|u| al.decode(u))
        .collect()
}

/// Two-stage application: every output of `t2` on every output of `t1`.
pub fn two_stage(t1: &Fst, t2: &Fst, u: &Word, cap: usize) -> (BTreeSet<Word>, bool) {
    let first = t1.apply(u, cap).unwrap();
    let mut out = BTreeSet::new();
    let mut truncated = first.truncated;
    for mid in &first.outputs {
        let second = t2.apply(mid, cap).unwrap();
        truncated |= second.truncated;
        out.extend(second.outputs);
    }
    (out, truncated)
}

/// Does the extractor produce a correct protocol for `u`?
pub fn extracted_member<O: ProtocolOracle>(t: &Fst, o: &O, u: &Word, cap: usize) -> bool {
    t.apply(u, cap)
        .unwrap()
        .outputs
        .iter()
        .any(|p| membership(o, p))
}

/// Accepted words of `a` of length at most `n`, by enumeration.
pub fn language(a: &Nfa, n: usize) -> BTreeSet<Word> {
    a.enumerate_words(n).unwrap().into_iter().collect()
}

/// Accepting runs of a plain NFA without silent moves between two states,
/// by walking every path.
pub fn path_words(a: &Nfa, from: usize, to: usize, max_len: usize) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    let mut stack = vec![(from, String::new())];
    while let Some((s, word)) = stack.pop() {
        if s == to {
            out.insert(word.clone());
        }
        if word.len() == max_len {
            continue;
        }
        for &(l, d) in a.successors(s) {
            let l = l.expect("no silent moves");
            stack.push((d, format!("{word}{}", a.alphabet().symbol(l))));
        }
    }
    out
}

#[allow(clippy::too_many_arguments)]
fn rule(
    from: usize,
    input: &str,
    work: &str,
    advice: Option<&str>,
    to: usize,
    write: &str,
    im: Move,
    consume: bool,
) -> Rule {
    Rule {
        from,
        input: input.into(),
        work: work.into(),
        advice: advice.map(str::to_string),
        to,
        write: write.into(),
        input_move: im,
        work_move: Move::S,
        consume,
        emit: None,
    }
}

/// Accepts iff the first advice symbol equals the first input symbol; the
/// rest of the advice is then consumed.
pub fn first_symbol_tm() -> LogTm {
    let mut b = LogTmBuilder::new(ab(), Alphabet::new([BLANK]).unwrap(), 1);
    b.advice(ab());
    let s = b.state("start");
    let c = b.state("cmp");
    let f = b.state("drain");
    b.set_initial(s);
    b.set_accepting(f);
    b.rule(rule(s, LEFT_END, BLANK, None, c, BLANK, Move::R, false));
    for l in ["a", "b"] {
        b.rule(rule(c, l, BLANK, Some(l), f, BLANK, Move::S, true));
        for y in ["a", "b"] {
            b.rule(rule(f, l, BLANK, Some(y), f, BLANK, Move::S, true));
        }
    }
    b.build().unwrap()
}

/// Accepts iff the advice equals the input.
pub fn equality_tm() -> LogTm {
    let mut b = LogTmBuilder::new(ab(), Alphabet::new([BLANK]).unwrap(), 1);
    b.advice(ab());
    let s = b.state("start");
    let c = b.state("cmp");
    let f = b.state("acc");
    b.set_initial(s);
    b.set_accepting(f);
    b.rule(rule(s, LEFT_END, BLANK, None, c, BLANK, Move::R, false));
    for l in ["a", "b"] {
        b.rule(rule(c, l, BLANK, Some(l), c, BLANK, Move::R, true));
    }
    b.rule(rule(
        c,
        RIGHT_END,
        BLANK,
        Some(LAMBDA),
        f,
        BLANK,
        Move::S,
        false,
    ));
    b.build().unwrap()
}

/// Accepts iff the advice holds an even number of `b`, keeping the parity
/// in its single work cell. Never moves its input head.
pub fn parity_tm() -> LogTm {
    let mut b = LogTmBuilder::new(ab(), Alphabet::new([BLANK, "1"]).unwrap(), 1);
    b.advice(ab());
    let s = b.state("scan");
    let f = b.state("acc");
    b.set_initial(s);
    b.set_accepting(f);
    for cell in [BLANK, "1"] {
        let flipped = if cell == BLANK { "1" } else { BLANK };
        b.rule(rule(s, LEFT_END, cell, Some("a"), s, cell, Move::S, true));
        b.rule(rule(
            s,
            LEFT_END,
            cell,
            Some("b"),
            s,
            flipped,
            Move::S,
            true,
        ));
    }
    b.rule(rule(
        s,
        LEFT_END,
        BLANK,
        Some(LAMBDA),
        f,
        BLANK,
        Move::S,
        false,
    ));
    b.build().unwrap()
}

/// Reference predicates for the toy machines.
pub fn first_symbol_ref(x: &[String], y: &[String]) -> bool {
    matches!((x.first(), y.first()), (Some(a), Some(b)) if a == b)
}

pub fn equality_ref(x: &[String], y: &[String]) -> bool {
    x == y
}

pub fn parity_ref(_: &[String], y: &[String]) -> bool {
    y.iter().filter(|t| *t == "b").count() % 2 == 0
}

/// Correct single-insert protocols with exactly `n` blocks, write words of
/// at most `max_word` letters and at most `cap` tokens.
pub fn sis_protocols(
    o: &SingleInsertOracle,
    n: usize,
    max_word: usize,
    cap: usize,
) -> BTreeSet<Word> {
    let letters = Alphabet::new(o.letters().iter().cloned()).unwrap();
    let mut out = BTreeSet::new();
    let mut stack: Vec<(Word, usize, Option<Word>)> = vec![(Vec::new(), 0, None)];
    while let Some((prefix, blocks, stored)) = stack.pop() {
        if blocks == n {
            out.insert(prefix);
            continue;
        }
        let Some(budget) = cap.checked_sub(prefix.len() + 2 * (n - blocks)) else {
            continue;
        };
        for u in words_up_to(&letters, budget.min(max_word)) {
            for q in ["ins", "test"] {
                let (r, next) = o.respond(&stored, &u, q).unwrap();
                let mut p = prefix.clone();
                p.extend(u.iter().cloned());
                p.push(q.to_string());
                p.push(r);
                stack.push((p, blocks + 1, next));
            }
        }
    }
    out
}

/// The word written before the first `ins` query, if there is one.
pub fn first_ins_word(p: &[String]) -> Option<Word> {
    let mut u = Vec::new();
    let mut i = 0;
    while i < p.len() {
        match p[i].as_str() {
            "ins" => return Some(u),
            "test" => {
                u.clear();
                i += 2;
            }
            t => {
                u.push(t.to_string());
                i += 1;
            }
        }
    }
    None
}

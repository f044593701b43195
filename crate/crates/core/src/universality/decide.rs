//! Deciding non-emptiness of `L(A) ∩ PROT_X` with calls to `X`, and the
//! reduction in the other direction.

use std::collections::BTreeSet;

use super::delta::{delta_sets, MemoOracle};
use super::lang::{prot_x_alphabet, OracleX};
use super::sq::sq;
use super::w::WConstruction;
use crate::alphabet::{Alphabet, Word};
use crate::error::{Error, Result};
use crate::nfa::{Nfa, NfaBuilder};
use crate::protocol::MINUS;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UniversalityAnswer {
    pub nonempty: bool,
    /// Calls made to `X` by this decision.
    pub oracle_calls: usize,
}

/// Block language `(y # + | n # − | r r)*` over `y n # + − r`.
fn block_language(al: &Alphabet) -> Nfa {
    let mut b = NfaBuilder::new(al.clone());
    let start = b.state("blk");
    b.set_initial(start);
    b.set_accepting(start);
    for (first, resp) in [("y", "+"), ("n", MINUS)] {
        b.transition("blk", first, &format!("blk:{first}"))
            .expect("declared");
        b.transition(&format!("blk:{first}"), "#", &format!("blk:{first}#"))
            .expect("declared");
        b.transition(&format!("blk:{first}#"), resp, "blk")
            .expect("declared");
    }
    b.state("blk:r");
    b.transition("blk", "r", "blk:r").expect("declared");
    b.transition("blk:r", "r", "blk").expect("declared");
    b.build().expect("initial is set")
}

/// Replaces every binary stretch of `a` by a letter `y` (a word inside the
/// oracle language leads there) or `n` (a word outside does), then checks
/// the result against the block language.
pub fn universality_decide(
    a: &Nfa,
    x: &dyn OracleX,
    wc: &WConstruction,
) -> Result<UniversalityAnswer> {
    let flat = prot_x_alphabet().flattened();
    if !a.alphabet().same_set(&flat) {
        return Err(Error::AlphabetMismatch(format!(
            "expected [{flat}], got [{}]",
            a.alphabet()
        )));
    }
    let before = x.calls();
    let e = a.remove_epsilon();
    let binary = Alphabet::new(["0", "1"]).expect("fixed alphabet");
    let mut bb = NfaBuilder::new(binary);
    for name in e.state_names() {
        bb.state(name.clone());
    }
    bb.set_initial(e.initial());
    for (s, l, d) in e.transitions() {
        let sym = e.alphabet().symbol(l.expect("epsilon removed"));
        if sym == "0" || sym == "1" {
            bb.edge(s, Some(if sym == "0" { 0 } else { 1 }), d);
        }
    }
    let bin = bb.build()?;

    let letters = Alphabet::new(["y", "n", "#", "+", MINUS, "r"]).expect("fixed alphabet");
    let mut b = NfaBuilder::new(letters.clone());
    for name in e.state_names() {
        b.state(name.clone());
    }
    b.set_initial(e.initial());
    for s in e.accepting_states() {
        b.set_accepting(s);
    }
    for (s, l, d) in e.transitions() {
        let sym = e.alphabet().symbol(l.expect("epsilon removed"));
        if sym != "0" && sym != "1" {
            b.edge(s, letters.index_of(sym), d);
        }
    }
    let mut memo = MemoOracle::new(x);
    let y = letters.index_of("y");
    let n = letters.index_of("n");
    for s in 0..e.num_states() {
        let d = delta_sets(&bin, s, &mut memo, wc)?;
        for t in d.inside {
            b.edge(s, y, t);
        }
        for t in d.outside {
            b.edge(s, n, t);
        }
    }
    let summary = b.build()?;
    let r = summary.product_intersect(&block_language(&letters))?;
    Ok(UniversalityAnswer {
        nonempty: !r.is_empty(),
        oracle_calls: x.calls() - before,
    })
}

/// `x ↦ sq(x) # +` as a token sequence.
pub fn forward_reduce(x: &str) -> Word {
    let mut w: Word = sq(x).chars().map(String::from).collect();
    w.push("#".into());
    w.push("+".into());
    w
}

/// Call budget checked in tests: `states² · longest path · 2`.
pub fn call_budget(a: &Nfa) -> usize {
    let n = a.num_states();
    n * n * n.max(1) * 2
}

/// All binary words of length at most `n`.
pub fn binary_words_up_to(n: usize) -> BTreeSet<String> {
    let mut out = BTreeSet::from([String::new()]);
    let mut level = vec![String::new()];
    for _ in 0..n {
        let mut next = Vec::new();
        for w in &level {
            for c in ['0', '1'] {
                next.push(format!("{w}{c}"));
            }
        }
        out.extend(next.iter().cloned());
        level = next;
    }
    out
}

//! The ten acceptance criteria. Each prints one pass/fail line; the test
//! fails if any criterion fails.

mod common;

use std::collections::BTreeSet;
use std::io::Write;
use std::sync::Arc;
use std::time::{Duration, Instant};

use adskit::ads::{extractor, AdsAutomaton};
use adskit::logtm::{
    lambda_eliminate, run_with_advice, surface_config_nfa, LogTm, DEFAULT_STATE_CAP, LAMBDA,
};
use adskit::nrr::{
    membership_to_reg, nonemptiness_to_nrr, nreg_dyck, nreg_generic, nrr_to_nonemptiness,
    perk_to_spk_fst_over, spk_to_perk_fst,
};
use adskit::protocol::{
    axiom_fuzz, membership, Axiom, DyckOracle, FuzzConfig, ProtocolOracle, SetOracle,
    SingleInsertOracle,
};
use adskit::random::{
    random_ads, random_dag_nfa, random_dfa, random_fst, random_nfa, random_prot_x_nfa,
};
use adskit::search::Bounds;
use adskit::universality::decide::binary_words_up_to;
use adskit::universality::{
    delta_l, delta_lbar, forward_reduce, l_membership, length_sets, lex_extreme, prot_x_alphabet,
    universality_decide, FiniteSetOracle, LexKind, OracleX, ProtXOracle, WConstruction,
};
use adskit::{compose, invert, Alphabet, Nfa, Verdict, Word};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::*;

type Outcome = Result<String, String>;

fn check(failures: &mut Vec<String>, cond: bool, msg: impl FnOnce() -> String) {
    if !cond && failures.len() < 5 {
        failures.push(msg());
    }
}

fn finish(failures: Vec<String>, detail: String) -> Outcome {
    if failures.is_empty() {
        Ok(detail)
    } else {
        Err(failures.join("; "))
    }
}

fn compose_criterion() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (ab, bin) = (ab(), binary());
    let mut failures = Vec::new();
    let mut checked = 0;
    for i in 0..200 {
        let n = rng.random_range(1..=4);
        let t1 = random_fst(&mut rng, &ab, &bin, n, 2);
        let n = rng.random_range(1..=4);
        let t2 = random_fst(&mut rng, &bin, &ab, n, 2);
        let t = compose(&t1, &t2).map_err(|e| e.to_string())?;
        for u in words_up_to(&ab, 4) {
            let (expected, cut) = two_stage(&t1, &t2, &u, 400);
            let got = t.apply(&u, 400).unwrap();
            check(
                &mut failures,
                !cut && !got.truncated && got.outputs == expected,
                || format!("pair {i}, input {u:?}"),
            );
            checked += 1;
        }
    }
    finish(failures, format!("200 pairs, {checked} inputs"))
}

fn inversion_criterion() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (ab, bin) = (ab(), binary());
    let mut failures = Vec::new();
    for i in 0..200 {
        let n = rng.random_range(1..=4);
        let t = random_fst(&mut rng, &ab, &bin, n, 2);
        let back = invert(&invert(&t));
        check(
            &mut failures,
            t.relation_sample(4, 40) == back.relation_sample(4, 40),
            || format!("transducer {i}"),
        );
    }
    finish(failures, "200 transducers".into())
}

fn axiom_criterion() -> Outcome {
    let cfg = FuzzConfig {
        trials: 10_000,
        max_blocks: 50,
        max_wr_len: 3,
        seed: 3,
    };
    let five = [
        Axiom::EmptyWord,
        Axiom::BlockShape,
        Axiom::PrefixClosed,
        Axiom::Total,
        Axiom::Functional,
    ];
    let mut failures = Vec::new();
    let set = SetOracle::new();
    let sis = SingleInsertOracle::new(2).unwrap();
    for ax in five {
        let r = axiom_fuzz(&set, ax, &cfg);
        check(&mut failures, r.violations == 0, || {
            format!("set ({ax}): {}", r.violations)
        });
        let r = axiom_fuzz(&sis, ax, &cfg);
        check(&mut failures, r.violations == 0, || {
            format!("single-insert ({ax}): {}", r.violations)
        });
    }
    let dyck = DyckOracle::new(false);
    for ax in [
        Axiom::EmptyWord,
        Axiom::BlockShape,
        Axiom::PrefixClosed,
        Axiom::Functional,
    ] {
        let r = axiom_fuzz(&dyck, ax, &cfg);
        check(&mut failures, r.violations == 0, || {
            format!("dyck ({ax}): {}", r.violations)
        });
    }
    let total = axiom_fuzz(&dyck, Axiom::Total, &cfg);
    check(
        &mut failures,
        total.violations > 0 && total.examples.iter().all(|e| e.contains("pop")),
        || {
            format!(
                "dyck (iv) expected pop-on-empty violations, got {:?}",
                total.examples
            )
        },
    );
    finish(
        failures,
        format!(
            "dyck (iv) reports {} pop-on-empty violations",
            total.violations
        ),
    )
}

fn set_automata(seed: u64, count: usize, deterministic: bool) -> Vec<AdsAutomaton> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pa = SetOracle::new().alphabet().clone();
    (0..count)
        .map(|_| {
            let n = rng.random_range(2..=4);
            random_ads(&mut rng, &ab(), &pa, n, deterministic)
        })
        .collect()
}

fn extractor_criterion() -> Outcome {
    let o = SetOracle::new();
    let bounds = Bounds::default();
    let mut failures = Vec::new();
    let mut accepted = 0;
    for (i, m) in set_automata(4, 100, false).iter().enumerate() {
        let t = extractor(m);
        for u in words_up_to(&ab(), 4) {
            let sim = m.simulate(&u, &o, &bounds).unwrap().verdict;
            let ext = extracted_member(&t, &o, &u, 30);
            accepted += usize::from(sim.is_accept());
            check(
                &mut failures,
                sim.is_definite() && sim.is_accept() == ext,
                || format!("automaton {i}, input {u:?}: simulate {sim:?}, extractor {ext}"),
            );
        }
    }
    finish(
        failures,
        format!("100 automata, {accepted} accepting pairs"),
    )
}

fn nonemptiness_criterion() -> Outcome {
    let o = SetOracle::new();
    let bounds = Bounds::default();
    let mut failures = Vec::new();
    let (mut unknown, mut yes) = (0, 0);
    for (i, m) in set_automata(4, 100, false).iter().enumerate() {
        let direct = m.find_accepted_word(&o, 5, &bounds).unwrap().verdict;
        let a = nonemptiness_to_nrr(m).unwrap();
        let via = nreg_generic(&a, &o, &bounds).unwrap().verdict;
        let back = nrr_to_nonemptiness(&a, o.alphabet()).unwrap();
        let round = nreg_generic(&nonemptiness_to_nrr(&back).unwrap(), &o, &bounds)
            .unwrap()
            .verdict;
        if ![direct, via, round].iter().all(|v| v.is_definite()) {
            unknown += 1;
            continue;
        }
        yes += usize::from(direct.is_accept());
        check(&mut failures, direct == via && via == round, || {
            format!("automaton {i}: bounded {direct:?}, nrr {via:?}, round trip {round:?}")
        });
    }
    check(&mut failures, unknown < 10, || {
        format!("{unknown}% unknown")
    });
    finish(failures, format!("{yes} non-empty, {unknown} unknown"))
}

fn membership_criterion() -> Outcome {
    let o = SetOracle::new();
    let bounds = Bounds::default();
    let mut failures = Vec::new();
    let mut accepted = 0;
    for (i, m) in set_automata(6, 50, true).iter().enumerate() {
        for u in words_up_to(&ab(), 4) {
            let sim = m.simulate(&u, &o, &bounds).unwrap().verdict;
            let reg = membership_to_reg(m, &u).unwrap();
            let via = nreg_generic(reg.as_nfa(), &o, &bounds).unwrap().verdict;
            accepted += usize::from(sim.is_accept());
            check(&mut failures, sim.is_definite() && sim == via, || {
                format!("automaton {i}, input {u:?}: simulate {sim:?}, reg {via:?}")
            });
        }
    }
    finish(failures, format!("50 automata, {accepted} accepting pairs"))
}

fn dyck_criterion() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let al = DyckOracle::new(false).alphabet().flattened();
    let bounds = Bounds {
        max_configs: 20_000,
        max_blocks: 24,
        max_tape: 8,
    };
    let mut failures = Vec::new();
    let (mut generic_unknown, mut yes) = (0, 0);
    for i in 0..500 {
        let exact = i % 2 == 1;
        let o = DyckOracle::new(exact);
        let n = rng.random_range(1..=5);
        let a = random_nfa(&mut rng, &al, n, 3, 0.1);
        let sat = nreg_dyck(&a, exact).unwrap();
        check(&mut failures, sat.verdict.is_definite(), || {
            format!("instance {i}: saturation unknown")
        });
        if let Some(wit) = &sat.witness {
            check(
                &mut failures,
                a.accepts(wit).unwrap() && membership(&o, wit),
                || format!("instance {i}: bad witness {wit:?}"),
            );
        }
        yes += usize::from(sat.verdict.is_accept());
        let gen = nreg_generic(&a, &o, &bounds).unwrap().verdict;
        if !gen.is_definite() {
            generic_unknown += 1;
            continue;
        }
        check(&mut failures, gen == sat.verdict, || {
            format!(
                "instance {i} (exact {exact}): saturation {:?}, generic {gen:?}",
                sat.verdict
            )
        });
    }
    finish(
        failures,
        format!("500 instances, {yes} yes, generic unknown on {generic_unknown}"),
    )
}

fn padded(y: &Word, k: usize) -> Word {
    let mut w = y.clone();
    w.extend(std::iter::repeat_n(LAMBDA.to_string(), k));
    w
}

fn logtm_criterion() -> Outcome {
    let mut failures = Vec::new();
    type Reference = fn(&[String], &[String]) -> bool;
    let machines: [(&str, LogTm, Reference); 3] = [
        ("first-symbol", first_symbol_tm(), first_symbol_ref),
        ("equality", equality_tm(), equality_ref),
        ("parity", parity_tm(), parity_ref),
    ];
    for (name, tm, reference) in &machines {
        for x in words_up_to(&ab(), 3) {
            let a = surface_config_nfa(tm, &x, DEFAULT_STATE_CAP).unwrap();
            for y in words_up_to(&ab(), 3) {
                let direct = run_with_advice(tm, &x, &y, 100_000).unwrap();
                let via = (0..=3).any(|k| a.accepts(&padded(&y, k)).unwrap());
                check(
                    &mut failures,
                    direct.is_definite() && direct.is_accept() == via,
                    || format!("{name}, x={x:?}, y={y:?}: run {direct:?}, nfa {via}"),
                );
                check(
                    &mut failures,
                    direct.is_accept() == reference(&x, &y),
                    || format!("{name}, x={x:?}, y={y:?}: run disagrees with the reference"),
                );
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let al = Alphabet::new(["a", "b", LAMBDA]).unwrap();
    for i in 0..200 {
        let n = rng.random_range(1..=6);
        let d = random_dfa(&mut rng, &al, n, 0.8);
        let e = lambda_eliminate(&d, LAMBDA).unwrap();
        for y in words_up_to(&ab(), 4) {
            let oracle = (0..=6).any(|k| d.accepts(&padded(&y, k)).unwrap());
            check(&mut failures, e.accepts(&y).unwrap() == oracle, || {
                format!("dfa {i}, y={y:?}")
            });
        }
    }
    finish(failures, "3 machines, 200 automata".into())
}

fn transducer_criterion() -> Outcome {
    let mut failures = Vec::new();
    let sis2 = SingleInsertOracle::new(2).unwrap();
    let letters = binary();
    let t = spk_to_perk_fst(2).unwrap();
    let mut image = BTreeSet::new();
    for p in sis_protocols(&sis2, 2, 2, 8) {
        let out = t.apply(&p, 20).unwrap().outputs;
        let shaped = first_ins_word(&p).is_some_and(|u| {
            let mut v = u.clone();
            v.extend(w("ins +"));
            v.extend(u);
            v.extend(w("test +"));
            v == p
        });
        check(&mut failures, out.is_empty() != shaped, || {
            format!("spk_to_perk on {p:?}")
        });
        image.extend(out);
    }
    let periodic: BTreeSet<Word> = words_up_to(&letters, 2)
        .into_iter()
        .map(|u| {
            let mut v = u.clone();
            v.push("#".into());
            v.extend(u);
            v.push("#".into());
            v
        })
        .collect();
    check(&mut failures, image == periodic, || {
        "spk_to_perk image differs from (w#)^2".into()
    });
    let mut compared = 0;
    for n in 1..=3 {
        let t = perk_to_spk_fst_over(&["0", "1"], n).unwrap();
        let cap = 2 * n + 3;
        let all = sis_protocols(&sis2, n, cap, cap);
        for u in words_up_to(&letters, 2) {
            let mut input = Vec::new();
            for _ in 0..n {
                input.extend(u.iter().cloned());
                input.push("#".to_string());
            }
            let got = t.apply(&input, cap).unwrap().outputs;
            let expected: BTreeSet<Word> = all
                .iter()
                .filter(|p| first_ins_word(p).is_none_or(|v| v == u))
                .cloned()
                .collect();
            compared += expected.len();
            check(&mut failures, got == expected, || {
                let extra: Vec<_> = got.difference(&expected).take(3).collect();
                let missing: Vec<_> = expected.difference(&got).take(3).collect();
                format!("perk_to_spk n={n}, w={u:?}: extra {extra:?}, missing {missing:?}")
            });
        }
    }
    finish(
        failures,
        format!("{} periodic words, {compared} protocols", periodic.len()),
    )
}

fn brute_lex(a: &Nfa, s: usize, len: usize, kind: LexKind) -> Option<String> {
    let words: BTreeSet<String> = match kind {
        LexKind::MinLeft | LexKind::MaxLeft => path_words(a, a.initial(), s, len),
        LexKind::MinRight | LexKind::MaxRight => a
            .accepting_states()
            .flat_map(|f| path_words(a, s, f, len))
            .collect(),
    };
    let mut of_len = words.into_iter().filter(|w| w.len() == len);
    match kind {
        LexKind::MinLeft | LexKind::MinRight => of_len.next(),
        LexKind::MaxLeft | LexKind::MaxRight => of_len.next_back(),
    }
}

fn universality_criterion() -> Outcome {
    let mut failures = Vec::new();
    let wc = Arc::new(WConstruction::new());
    let empty = FiniteSetOracle::new(Vec::<String>::new());
    let entry = wc.params("0", "0", "0").map_err(|e| e.to_string())?;
    let again = WConstruction::new()
        .params("0", "0", "0")
        .map_err(|e| e.to_string())?;
    let (even, odd) = (entry.even_word(), entry.odd_word());
    check(
        &mut failures,
        entry == again && even == "0".repeat(4096) && odd == "0".repeat(4097),
        || format!("(a) family words for (0,0,0): {entry}"),
    );
    check(
        &mut failures,
        !l_membership(&even, &empty, &wc).unwrap() && l_membership(&odd, &empty, &wc).unwrap(),
        || "(a) wrong sides for the (0,0,0) words".into(),
    );

    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let bin = binary();
    for i in 0..200 {
        let n = rng.random_range(1..=6);
        let a = random_dag_nfa(&mut rng, &bin, n, 0.4);
        let lens = length_sets(&a).unwrap();
        for s in 0..a.num_states() {
            for len in 0..a.num_states() {
                for kind in LexKind::ALL {
                    let got = lex_extreme(&a, &lens, s, len, kind).unwrap();
                    check(&mut failures, got == brute_lex(&a, s, len, kind), || {
                        format!("(b) dag {i}, state {s}, length {len}, {kind:?}: {got:?}")
                    });
                }
            }
        }
    }

    let x = FiniteSetOracle::new(["", "0", "11"]);
    for i in 0..100 {
        let n = rng.random_range(1..=5);
        let a = random_dag_nfa(&mut rng, &bin, n, 0.4);
        for s in 0..a.num_states() {
            let (mut inside, mut outside) = (BTreeSet::new(), BTreeSet::new());
            for t in 0..a.num_states() {
                for u in path_words(&a, s, t, 6) {
                    if l_membership(&u, &x, &wc).unwrap() {
                        inside.insert(t);
                    } else {
                        outside.insert(t);
                    }
                }
            }
            let got_in = delta_l(&a, s, &x, &wc).unwrap();
            let got_out = delta_lbar(&a, s, &x, &wc).unwrap();
            check(
                &mut failures,
                got_in == inside && got_out == outside,
                || {
                    format!(
                        "(c) dag {i}, state {s}: {got_in:?}/{got_out:?} vs {inside:?}/{outside:?}"
                    )
                },
            );
        }
    }

    let shared: Arc<dyn OracleX + Send + Sync> = Arc::new(FiniteSetOracle::new(["", "0", "11"]));
    let o = ProtXOracle::new(shared.clone(), wc.clone());
    let bounds = Bounds::default();
    let (mut yes, mut unknown) = (0, 0);
    for i in 0..100 {
        let n = rng.random_range(1..=4);
        let a = random_prot_x_nfa(&mut rng, n);
        let got = universality_decide(&a, shared.as_ref(), &wc)
            .unwrap()
            .nonempty;
        let generic = nreg_generic(&a, &o, &bounds).unwrap().verdict;
        if !generic.is_definite() {
            unknown += 1;
            continue;
        }
        yes += usize::from(got);
        check(&mut failures, generic == Verdict::from_bool(got), || {
            format!("(d) instance {i}: decide {got}, generic {generic:?}")
        });
    }
    check(&mut failures, unknown == 0, || {
        format!("(d) generic unknown on {unknown} instances")
    });
    let flat = prot_x_alphabet().flattened();
    for xw in binary_words_up_to(4) {
        let a = Nfa::from_words(flat.clone(), &[forward_reduce(&xw)]).unwrap();
        let got = universality_decide(&a, shared.as_ref(), &wc)
            .unwrap()
            .nonempty;
        check(&mut failures, got == shared.member(&xw), || {
            format!("(d) forward reduction of `{xw}`")
        });
    }
    finish(failures, format!("(d) {yes} non-empty of 100"))
}

type Criterion = (&'static str, fn() -> Outcome, Option<Duration>);

#[test]
fn acceptance() {
    let criteria: [Criterion; 10] = [
        (
            "composition",
            compose_criterion,
            Some(Duration::from_secs(60)),
        ),
        ("inversion involution", inversion_criterion, None),
        ("protocol axioms", axiom_criterion, None),
        ("extractor", extractor_criterion, None),
        (
            "non-emptiness and realizability",
            nonemptiness_criterion,
            None,
        ),
        ("deterministic membership", membership_criterion, None),
        ("dyck backend", dyck_criterion, None),
        ("surface configurations and padding", logtm_criterion, None),
        ("periodic transducers", transducer_criterion, None),
        (
            "oracle universality",
            universality_criterion,
            Some(Duration::from_secs(300)),
        ),
    ];
    let mut failed = Vec::new();
    for (i, (name, run, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let mut outcome = run();
        let elapsed = start.elapsed();
        if let (Ok(_), Some(limit)) = (&outcome, limit) {
            if elapsed > *limit {
                outcome = Err(format!("took {elapsed:.1?}, limit {limit:?}"));
            }
        }
        // Written past the test harness capture so the report shows on success too.
        let line = match &outcome {
            Ok(detail) => format!(
                "criterion {:>2} PASS {name} ({detail}) [{elapsed:.1?}]",
                i + 1
            ),
            Err(why) => {
                failed.push(i + 1);
                format!("criterion {:>2} FAIL {name}: {why} [{elapsed:.1?}]", i + 1)
            }
        };
        let mut out = std::io::stdout().lock();
        let _ = writeln!(out, "{line}");
        let _ = out.flush();
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}

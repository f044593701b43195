mod common;

use std::collections::BTreeSet;
use std::sync::Arc;

use adskit::ads::{
    compose_with_fst, concat, extractor, m_prot, star, two_letter_recode, AdsAutomaton, Read,
    RecodedOracle, LEFT_END, RIGHT_END,
};
use adskit::protocol::{flatten, membership, random_member, ProtocolOracle, SetOracle};
use adskit::random::{random_ads, random_nfa};
use adskit::search::Bounds;
use adskit::universality::{forward_reduce, FiniteSetOracle, OracleX, ProtXOracle, WConstruction};
use adskit::{invert, Alphabet, Fst, FstBuilder, Nfa, Verdict, Word};
use proptest::prelude::*;
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::*;

/// Walks every run of `m` on `⊢w⊣` without merging configurations.
fn brute_accepts<O: ProtocolOracle>(m: &AdsAutomaton, w: &Word, o: &O, depth: usize) -> bool {
    let mut ext = vec![LEFT_END.to_string()];
    ext.extend(w.iter().cloned());
    ext.push(RIGHT_END.to_string());
    let mut stack = vec![(m.initial(), 0usize, Word::new(), o.initial_state(), 0usize)];
    while let Some((s, pos, tape, ostate, steps)) = stack.pop() {
        if m.is_accepting(s) && pos == ext.len() && tape.is_empty() && o.is_final(&ostate) {
            return true;
        }
        if steps == depth {
            continue;
        }
        for (q, r, d) in m.query_moves(s) {
            if let Some((answer, next)) = o.respond(&ostate, &tape, q) {
                if &answer == r {
                    stack.push((*d, pos, Word::new(), next, steps + 1));
                }
            }
        }
        for (rd, x, d) in m.write_moves(s) {
            let pos2 = match rd {
                Read::Eps => pos,
                _ if pos < ext.len() && m.read_token(*rd) == ext[pos] => pos + 1,
                _ => continue,
            };
            let mut tape2 = tape.clone();
            tape2.extend(x.iter().cloned());
            stack.push((*d, pos2, tape2, ostate.clone(), steps + 1));
        }
    }
    false
}

fn set_ads(r: &mut ChaCha8Rng, deterministic: bool) -> AdsAutomaton {
    let n = r.random_range(2..=4);
    random_ads(r, &ab(), SetOracle::new().alphabet(), n, deterministic)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn simulate_matches_run_enumeration(seed in any::<u64>()) {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let o = SetOracle::new();
        let m = set_ads(&mut r, false);
        for u in words_up_to(&ab(), 5) {
            let v = m.simulate(&u, &o, &Bounds::default()).unwrap().verdict;
            prop_assert!(v.is_definite());
            prop_assert_eq!(v.is_accept(), brute_accepts(&m, &u, &o, 40), "{:?}", u);
        }
    }

    #[test]
    fn accepting_runs_report_correct_protocols(seed in any::<u64>()) {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let o = SetOracle::new();
        let m = set_ads(&mut r, false);
        let t = extractor(&m);
        for u in words_up_to(&ab(), 4) {
            let out = m.simulate(&u, &o, &Bounds::default()).unwrap();
            if let Some(p) = out.protocol {
                prop_assert!(membership(&o, &p));
                prop_assert!(t.apply(&u, 30).unwrap().outputs.contains(&p));
            }
        }
    }

    #[test]
    fn inverse_extractor_recovers_the_language(seed in any::<u64>()) {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let o = SetOracle::new();
        let m = set_ads(&mut r, false);
        let t = extractor(&m);
        let back = invert(&t);
        let mut protocols = BTreeSet::new();
        for u in words_up_to(&ab(), 4) {
            protocols.extend(t.apply(&u, 30).unwrap().outputs.into_iter().filter(|p| membership(&o, p)));
        }
        let mut recovered = BTreeSet::new();
        for p in &protocols {
            recovered.extend(back.apply(p, 4).unwrap().outputs);
        }
        let accepted: BTreeSet<Word> = words_up_to(&ab(), 4)
            .into_iter()
            .filter(|u| m.simulate(u, &o, &Bounds::default()).unwrap().verdict.is_accept())
            .collect();
        prop_assert_eq!(recovered, accepted);
    }

    #[test]
    fn protocol_checker_matches_membership(seed in any::<u64>()) {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let o = SetOracle::new();
        let m = m_prot(o.alphabet());
        let flat = o.alphabet().flattened();
        for _ in 0..4 {
            let mut blocks = random_member(&o, &mut r, 6, 2);
            if !blocks.is_empty() && r.random_bool(0.5) {
                let i = r.random_range(0..blocks.len());
                let q = blocks[i].q.clone();
                blocks[i].r = o.alphabet().responses_for(&q).choose(&mut r).unwrap().to_string();
            }
            let mut p = flatten(&blocks);
            if r.random_bool(0.2) {
                p.push(flat.symbols().choose(&mut r).unwrap().clone());
            }
            let v = m.simulate(&p, &o, &Bounds::default()).unwrap().verdict;
            prop_assert_eq!(v, Verdict::from_bool(membership(&o, &p)), "{:?}", p);
        }
    }

    #[test]
    fn identity_composition_intersects(seed in any::<u64>()) {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let o = SetOracle::new();
        let m = set_ads(&mut r, false);
        let n = r.random_range(1..=3);
        let a = random_nfa(&mut r, &ab(), n, 3, 0.1);
        let c = compose_with_fst(&m, &Fst::id_on(&a)).unwrap();
        for u in words_up_to(&ab(), 4) {
            let both = m.simulate(&u, &o, &Bounds::default()).unwrap().verdict.is_accept() && a.accepts(&u).unwrap();
            prop_assert_eq!(c.simulate(&u, &o, &Bounds::default()).unwrap().verdict.is_accept(), both);
        }
    }

    #[test]
    fn recoding_keeps_verdicts(seed in any::<u64>()) {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let o = SetOracle::new();
        let m = set_ads(&mut r, false);
        let (m2, _) = two_letter_recode(&m).unwrap();
        let ro = RecodedOracle::new(o.clone()).unwrap();
        for u in words_up_to(&ab(), 4) {
            prop_assert_eq!(
                m.simulate(&u, &o, &Bounds::default()).unwrap().verdict,
                m2.simulate(&u, &ro, &Bounds::default()).unwrap().verdict
            );
        }
    }
}

#[test]
fn doubling_transducer_composition() {
    let o = SetOracle::new();
    let mut r = ChaCha8Rng::seed_from_u64(11);
    let one = Alphabet::new(["a"]).unwrap();
    let mut b = FstBuilder::new(one, ab());
    let s = b.state("s");
    b.set_initial(s);
    b.set_accepting(s);
    b.edge(s, Some(0), vec![1, 1], s);
    let t = b.build().unwrap();
    for _ in 0..30 {
        let m = set_ads(&mut r, false);
        let c = compose_with_fst(&m, &t).unwrap();
        for k in 0..=2 {
            let u = vec!["a".to_string(); k];
            let v = vec!["b".to_string(); 2 * k];
            assert_eq!(
                c.simulate(&u, &o, &Bounds::default()).unwrap().verdict,
                m.simulate(&v, &o, &Bounds::default()).unwrap().verdict
            );
        }
    }
}

#[test]
fn letter_codes_are_injective() {
    let m = m_prot(SetOracle::new().alphabet());
    let (_, codec) = two_letter_recode(&m).unwrap();
    let ro = RecodedOracle::new(SetOracle::new()).unwrap();
    let wr = Alphabet::new(["a", "b"]).unwrap();
    let mut seen = BTreeSet::new();
    for u in words_up_to(&wr, 4) {
        let out: Vec<Word> = codec.apply(&u, 40).unwrap().outputs.into_iter().collect();
        assert_eq!(out.len(), 1);
        assert_eq!(ro.decode(&out[0]), Some(u.clone()));
        assert!(seen.insert(out[0].clone()));
    }
}

#[test]
fn concatenation_and_star_with_reset() {
    let x: Arc<dyn OracleX + Send + Sync> = Arc::new(FiniteSetOracle::new(["0"]));
    let o = ProtXOracle::new(x, Arc::new(WConstruction::new()));
    let p = forward_reduce("0");
    let flat = o.alphabet().flattened();
    let single = Nfa::from_words(flat, std::slice::from_ref(&p)).unwrap();
    let m = compose_with_fst(&m_prot(o.alphabet()), &Fst::id_on(&single)).unwrap();
    let b = Bounds::default();
    assert!(m.simulate(&p, &o, &b).unwrap().verdict.is_accept());
    let pp: Word = p.iter().chain(&p).cloned().collect();
    let c = concat(&m, &m, &o).unwrap();
    assert!(c.simulate(&pp, &o, &b).unwrap().verdict.is_accept());
    assert!(!c.simulate(&p, &o, &b).unwrap().verdict.is_accept());
    let s = star(&m, &o).unwrap();
    for k in 0..=3 {
        let word: Word = (0..k).flat_map(|_| p.clone()).collect();
        assert!(
            s.simulate(&word, &o, &b).unwrap().verdict.is_accept(),
            "{k} copies"
        );
    }
    assert!(!s.simulate(&p[..3], &o, &b).unwrap().verdict.is_accept());
    assert!(concat(&m, &m, &SetOracle::new()).is_err());
}

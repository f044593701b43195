mod common;

use std::collections::BTreeSet;

use adskit::format::{parse_fst, parse_nfa, write_fst, write_nfa};
use adskit::random::{random_fst, random_nfa};
use adskit::{compose, image_nfa, invert, preimage_nfa, Alphabet, Nfa, Word};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::*;

fn abc() -> Alphabet {
    Alphabet::new(["a", "b", "c"]).unwrap()
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn nfa(r: &mut ChaCha8Rng, al: &Alphabet) -> Nfa {
    let n = r.random_range(1..=5);
    random_nfa(r, al, n, 3, 0.15)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn trim_keeps_words(seed in any::<u64>()) {
        let a = nfa(&mut rng(seed), &ab());
        prop_assert_eq!(language(&a, 5), language(&a.trim(), 5));
    }

    #[test]
    fn accepts_matches_enumeration(seed in any::<u64>()) {
        let a = nfa(&mut rng(seed), &ab());
        let words = language(&a, 4);
        for u in words_up_to(&ab(), 4) {
            prop_assert_eq!(a.accepts(&u).unwrap(), words.contains(&u));
        }
    }

    #[test]
    fn product_is_intersection(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (a, b) = (nfa(&mut r, &abc()), nfa(&mut r, &abc()));
        let p = a.product_intersect(&b).unwrap();
        let expected: BTreeSet<Word> = language(&a, 5).intersection(&language(&b, 5)).cloned().collect();
        prop_assert_eq!(language(&p, 5), expected);
        let u = a.product_intersect(&Nfa::universal(abc())).unwrap();
        prop_assert_eq!(language(&u, 5), language(&a, 5));
    }

    #[test]
    fn finite_languages_have_short_words(seed in any::<u64>()) {
        let a = nfa(&mut rng(seed), &ab());
        if a.is_finite() {
            let bound = a.trim().num_states();
            let long = a.enumerate_words(2 * a.num_states()).unwrap().into_iter().any(|w| w.len() >= bound.max(1));
            prop_assert!(!long);
        }
    }

    #[test]
    fn sub_automaton_of_initial_and_sole_accepting(seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = nfa(&mut r, &ab());
        let f = r.random_range(0..a.num_states());
        let sub = a.sub_automaton_at(a.initial(), f);
        for u in words_up_to(&ab(), 4) {
            prop_assert_eq!(sub.accepts(&u).unwrap(), runs_to(&a, &u, f));
        }
    }

    #[test]
    fn nfa_text_round_trip(seed in any::<u64>()) {
        let a = nfa(&mut rng(seed), &ab());
        let text = write_nfa(&a);
        let back = parse_nfa(&text).unwrap();
        prop_assert_eq!(write_nfa(&back), text);
    }

    #[test]
    fn fst_text_round_trip(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.random_range(1..=4);
        let t = random_fst(&mut r, &ab(), &binary(), n, 2);
        let text = write_fst(&t);
        prop_assert_eq!(write_fst(&parse_fst(&text).unwrap()), text);
    }

    #[test]
    fn composition_is_associative(seed in any::<u64>()) {
        let mut r = rng(seed);
        let mut pick = |i: &Alphabet, o: &Alphabet| {
            let n = r.random_range(1..=3);
            random_fst(&mut r, i, o, n, 2)
        };
        let t1 = pick(&ab(), &binary());
        let t2 = pick(&binary(), &ab());
        let t3 = pick(&ab(), &binary());
        let left = compose(&compose(&t1, &t2).unwrap(), &t3).unwrap();
        let right = compose(&t1, &compose(&t2, &t3).unwrap()).unwrap();
        for u in words_up_to(&ab(), 3) {
            let l = left.apply(&u, 300).unwrap();
            let rr = right.apply(&u, 300).unwrap();
            prop_assert!(!l.truncated && !rr.truncated);
            prop_assert_eq!(l.outputs, rr.outputs);
        }
    }

    #[test]
    fn image_and_preimage_match_application(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.random_range(1..=4);
        let t = random_fst(&mut r, &ab(), &binary(), n, 2);
        let m = r.random_range(1..=4);
        let a = random_nfa(&mut r, &binary(), m, 3, 0.1);
        let pre = preimage_nfa(&t, &a).unwrap();
        for u in words_up_to(&ab(), 4) {
            let app = t.apply(&u, 60).unwrap();
            prop_assert!(!app.truncated);
            let hit = app.outputs.iter().any(|v| a.accepts(v).unwrap());
            prop_assert_eq!(pre.accepts(&u).unwrap(), hit, "preimage at {:?}", u);
        }
        let b = random_nfa(&mut r, &ab(), m, 3, 0.1);
        let img = image_nfa(&t, &b).unwrap();
        let mut reached = BTreeSet::new();
        for u in words_up_to(&ab(), 6) {
            if b.accepts(&u).unwrap() {
                reached.extend(t.apply(&u, 60).unwrap().outputs);
            }
        }
        for v in words_up_to(&binary(), 4) {
            if reached.contains(&v) {
                prop_assert!(img.accepts(&v).unwrap(), "image misses {:?}", v);
            }
            if img.accepts(&v).unwrap() {
                let back = preimage_nfa(&t, &Nfa::from_words(binary(), std::slice::from_ref(&v)).unwrap()).unwrap();
                prop_assert!(!back.product_intersect(&b).unwrap().is_empty(), "image has extra {:?}", v);
            }
        }
    }

    #[test]
    fn inversion_swaps_samples(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.random_range(1..=4);
        let t = random_fst(&mut r, &ab(), &binary(), n, 2);
        let inv = invert(&t);
        let forward = t.relation_sample(3, 12);
        for (u, v) in &forward.pairs {
            prop_assert!(inv.apply(v, 12).unwrap().outputs.contains(u));
        }
        let backward = inv.relation_sample(3, 3);
        for (v, u) in &backward.pairs {
            prop_assert!(t.apply(u, 12).unwrap().outputs.contains(v));
        }
    }
}

/// Whether some run on `u` from the initial state ends in `f`.
fn runs_to(a: &Nfa, u: &Word, f: usize) -> bool {
    let mut cur = a.start_set();
    for t in u {
        cur = a.closure(&a.step_set(&cur, a.alphabet().index_of(t).unwrap()));
    }
    cur.contains(&f)
}

#[test]
fn universal_and_empty_products() {
    let a = Nfa::from_words(ab(), &[w("a b"), w("b")]).unwrap();
    assert!(a.product_intersect(&Nfa::empty(ab())).unwrap().is_empty());
    let words = language(&a, 3);
    assert_eq!(words, BTreeSet::from([w("a b"), w("b")]));
}

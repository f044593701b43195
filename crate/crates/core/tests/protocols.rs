mod common;

use std::collections::BTreeSet;

use adskit::protocol::{
    axiom_fuzz, flatten, membership, parse_blocks, random_member, Axiom, DyckOracle, FuzzConfig,
    ProtocolBlock, ProtocolOracle, SetOracle, SingleInsertOracle, MINUS,
};
use adskit::Word;
use proptest::prelude::*;
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::*;

/// Naive set semantics over explicit blocks, independent of the oracle.
fn naive_set_member(w: &[String]) -> bool {
    let Ok(blocks) = parse_blocks(SetOracle::new().alphabet(), w) else {
        return false;
    };
    let mut set: BTreeSet<Word> = BTreeSet::new();
    for b in blocks {
        let expected = match b.q.as_str() {
            "#ins" => {
                set.insert(b.u.clone());
                "#".to_string()
            }
            "#out" => {
                set.remove(&b.u);
                "#".to_string()
            }
            _ if set.contains(&b.u) => "+#".to_string(),
            _ => format!("{MINUS}#"),
        };
        if b.r != expected {
            return false;
        }
    }
    true
}

/// A member, possibly with one response flipped to another valid one.
fn perturbed<O: ProtocolOracle>(o: &O, r: &mut ChaCha8Rng) -> Word {
    let mut blocks = random_member(o, r, 8, 2);
    if !blocks.is_empty() && r.random_bool(0.5) {
        let i = r.random_range(0..blocks.len());
        let q = blocks[i].q.clone();
        let options = o.alphabet().responses_for(&q);
        blocks[i].r = options.choose(r).unwrap().to_string();
    }
    flatten(&blocks)
}

fn prefixes_are_members<O: ProtocolOracle>(o: &O, p: &[String]) -> bool {
    if !membership(o, p) {
        return true;
    }
    let blocks: Vec<ProtocolBlock> = parse_blocks(o.alphabet(), p).unwrap();
    (0..=blocks.len()).all(|k| membership(o, &flatten(&blocks[..k])))
}

#[test]
fn fixed_words() {
    let dyck = DyckOracle::new(false);
    assert!(membership(&dyck, &w("push( ( push[ [ pop ] pop )")));
    assert!(!membership(&dyck, &w("push( ( pop ]")));
    let set = SetOracle::new();
    assert!(membership(&set, &w("a b #ins # a b #test +#")));
    assert!(!membership(&set, &w("a b #test +#")));
    assert!(!membership(&set, &w("a b")));
}

#[test]
fn single_insert_prefix_closure() {
    let cfg = FuzzConfig {
        trials: 1000,
        ..FuzzConfig::default()
    };
    let r = axiom_fuzz(
        &SingleInsertOracle::new(3).unwrap(),
        Axiom::PrefixClosed,
        &cfg,
    );
    assert_eq!(r.violations, 0);
}

#[test]
fn reset_axiom_is_skipped_without_reset_pair() {
    let r = axiom_fuzz(&SetOracle::new(), Axiom::Reset, &FuzzConfig::default());
    assert!(r.skipped);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn set_membership_matches_naive_replay(seed in any::<u64>()) {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let o = SetOracle::new();
        for _ in 0..20 {
            let p = perturbed(&o, &mut r);
            prop_assert_eq!(membership(&o, &p), naive_set_member(&p), "{:?}", p);
        }
    }

    #[test]
    fn block_prefixes_of_members_are_members(seed in any::<u64>()) {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let dyck = DyckOracle::new(false);
        let sis = SingleInsertOracle::new(2).unwrap();
        let set = SetOracle::new();
        prop_assert!(prefixes_are_members(&set, &perturbed(&set, &mut r)));
        prop_assert!(prefixes_are_members(&sis, &perturbed(&sis, &mut r)));
        prop_assert!(prefixes_are_members(&dyck, &perturbed(&dyck, &mut r)));
    }

    #[test]
    fn equal_keys_answer_alike(seed in any::<u64>()) {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let o = SetOracle::new();
        let states: Vec<_> = (0..6)
            .map(|_| {
                let blocks = random_member(&o, &mut r, 6, 1);
                adskit::protocol::replay(&o, &blocks).unwrap()
            })
            .collect();
        for x in &states {
            for y in &states {
                if o.canonical_key(x) != o.canonical_key(y) {
                    continue;
                }
                for _ in 0..100 {
                    let len = r.random_range(0..=2);
                    let u: Word = (0..len).map(|_| o.alphabet().wr().choose(&mut r).unwrap().clone()).collect();
                    let q = o.alphabet().query().choose(&mut r).unwrap();
                    let rx = o.respond(x, &u, q).map(|p| p.0);
                    let ry = o.respond(y, &u, q).map(|p| p.0);
                    prop_assert_eq!(rx, ry);
                }
            }
        }
    }
}

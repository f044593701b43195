//! Finite automata, transducers, protocol languages and automata with data
//! structures, together with the reductions and deciders built on them.

pub mod ads;
pub mod alphabet;
pub mod error;
pub mod format;
pub mod fst;
pub mod logtm;
pub mod nfa;
pub mod nrr;
pub mod protocol;
pub mod random;
pub mod search;
pub mod universality;

pub use alphabet::{show_word, tokens, Alphabet, Verdict, Word, EPSILON};
pub use error::{Error, Result};
pub use fst::{compose, image_nfa, invert, preimage_nfa, Fst, FstBuilder};
pub use nfa::{Dfa, Nfa, NfaBuilder};

//! A protocol language over `0 1 # r + − r` whose non-emptiness problem is
//! equivalent to membership in an arbitrary set `X`, with both reductions.

pub mod dag;
pub mod decide;
pub mod delta;
pub mod lang;
pub mod sq;
pub mod w;

pub use dag::{length_sets, lex_extreme, LengthSets, LexKind};
pub use decide::{forward_reduce, universality_decide, UniversalityAnswer};
pub use delta::{delta_l, delta_lbar, delta_sets, DeltaSets, MemoOracle};
pub use lang::{l_membership, prot_x_alphabet, FiniteSetOracle, OracleX, ProtXOracle};
pub use sq::{beta, sq, sq_decode};
pub use w::{WConstruction, WEntry, WHit};

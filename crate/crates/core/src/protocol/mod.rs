//! Languages of correct protocols: block parsing, the oracle interface,
//! membership by replay, and randomized axiom checks.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::alphabet::{show_word, Alphabet, Word};
use crate::error::{Error, Result};

mod oracles;

pub use oracles::{
    per_k_alphabet, per_k_membership, per_k_membership_over, sigma_k, BuiltinOracle, BuiltinState,
    DyckOracle, SetOracle, SingleInsertOracle, MINUS,
};

/// Write, query and response alphabets with the valid query/response pairs.
///
/// The write alphabet may be empty and is disjoint from the other two. Query
/// and response tokens may coincide, since blocks are parsed positionally.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProtocolAlphabet {
    wr: Vec<String>,
    query: Vec<String>,
    resp: Vec<String>,
    valid: BTreeSet<(String, String)>,
    wr_set: HashSet<String>,
    query_set: HashSet<String>,
    resp_set: HashSet<String>,
}

impl ProtocolAlphabet {
    pub fn new<S: AsRef<str>>(wr: &[S], query: &[S], resp: &[S], valid: &[(S, S)]) -> Result<Self> {
        let own = |v: &[S]| v.iter().map(|s| s.as_ref().to_string()).collect::<Vec<_>>();
        let (wr, query, resp) = (own(wr), own(query), own(resp));
        if query.is_empty() || resp.is_empty() {
            return Err(Error::InvalidAlphabet(
                "query and response alphabets must be non-empty".into(),
            ));
        }
        for part in [&wr, &query, &resp] {
            if !part.is_empty() {
                Alphabet::new(part.iter().cloned())?;
            }
        }
        let wr_set: HashSet<String> = wr.iter().cloned().collect();
        let query_set: HashSet<String> = query.iter().cloned().collect();
        let resp_set: HashSet<String> = resp.iter().cloned().collect();
        if let Some(t) = wr
            .iter()
            .find(|t| query_set.contains(*t) || resp_set.contains(*t))
        {
            return Err(Error::InvalidAlphabet(format!(
                "write token `{t}` is also a query or response token"
            )));
        }
        let mut pairs = BTreeSet::new();
        for (q, r) in valid {
            let (q, r) = (q.as_ref(), r.as_ref());
            if !query_set.contains(q) || !resp_set.contains(r) {
                return Err(Error::InvalidAlphabet(format!(
                    "valid pair ({q}, {r}) is undeclared"
                )));
            }
            pairs.insert((q.to_string(), r.to_string()));
        }
        Ok(ProtocolAlphabet {
            wr,
            query,
            resp,
            valid: pairs,
            wr_set,
            query_set,
            resp_set,
        })
    }

    pub fn wr(&self) -> &[String] {
        &self.wr
    }

    pub fn query(&self) -> &[String] {
        &self.query
    }

    pub fn resp(&self) -> &[String] {
        &self.resp
    }

    pub fn valid_pairs(&self) -> impl Iterator<Item = (&str, &str)> {
        self.valid.iter().map(|(q, r)| (q.as_str(), r.as_str()))
    }

    pub fn is_wr(&self, t: &str) -> bool {
        self.wr_set.contains(t)
    }

    pub fn is_query(&self, t: &str) -> bool {
        self.query_set.contains(t)
    }

    pub fn is_resp(&self, t: &str) -> bool {
        self.resp_set.contains(t)
    }

    pub fn is_valid(&self, q: &str, r: &str) -> bool {
        self.valid.contains(&(q.to_string(), r.to_string()))
    }

    /// Responses allowed after query `q`, in response-alphabet order.
    pub fn responses_for(&self, q: &str) -> Vec<&str> {
        self.resp
            .iter()
            .filter(|r| self.is_valid(q, r))
            .map(String::as_str)
            .collect()
    }

    /// Union alphabet: write tokens, then queries, then responses, without repeats.
    pub fn flattened(&self) -> Alphabet {
        let mut seen = HashSet::new();
        let all: Vec<String> = self
            .wr
            .iter()
            .chain(&self.query)
            .chain(&self.resp)
            .filter(|t| seen.insert(t.to_string()))
            .cloned()
            .collect();
        Alphabet::new(all).expect("components were validated")
    }
}

/// One query block `u q r`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProtocolBlock {
    pub u: Word,
    pub q: String,
    pub r: String,
}

impl fmt::Display for ProtocolBlock {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for t in &self.u {
            write!(f, "{t} ")?;
        }
        write!(f, "{} {}", self.q, self.r)
    }
}

pub fn flatten(blocks: &[ProtocolBlock]) -> Word {
    let mut w = Vec::new();
    for b in blocks {
        w.extend(b.u.iter().cloned());
        w.push(b.q.clone());
        w.push(b.r.clone());
    }
    w
}

/// Splits a word into query blocks. Write tokens accumulate until a query
/// token, which must be followed by a valid response.
pub fn parse_blocks<S: AsRef<str>>(pa: &ProtocolAlphabet, w: &[S]) -> Result<Vec<ProtocolBlock>> {
    let mut blocks = Vec::new();
    let mut u = Vec::new();
    let mut i = 0;
    while i < w.len() {
        let t = w[i].as_ref();
        if pa.is_wr(t) {
            u.push(t.to_string());
            i += 1;
            continue;
        }
        if !pa.is_query(t) {
            return Err(Error::Malformed(format!(
                "token {} `{t}` is not a write or query token",
                i + 1
            )));
        }
        let Some(r) = w.get(i + 1).map(AsRef::as_ref) else {
            return Err(Error::Malformed(format!("query `{t}` has no response")));
        };
        if !pa.is_resp(r) {
            return Err(Error::Malformed(format!(
                "`{r}` after query `{t}` is not a response"
            )));
        }
        if !pa.is_valid(t, r) {
            return Err(Error::Malformed(format!("({t}, {r}) is not a valid pair")));
        }
        blocks.push(ProtocolBlock {
            u: std::mem::take(&mut u),
            q: t.to_string(),
            r: r.to_string(),
        });
        i += 2;
    }
    if !u.is_empty() {
        return Err(Error::Malformed(format!(
            "trailing write word `{}`",
            show_word(&u)
        )));
    }
    Ok(blocks)
}

/// A response-functional storage model.
pub trait ProtocolOracle {
    type State: Clone + fmt::Debug;

    fn alphabet(&self) -> &ProtocolAlphabet;

    fn initial_state(&self) -> Self::State;

    /// Response to query `q` after writing `u`, with the successor state, or
    /// `None` when the model has no legal response.
    fn respond(&self, state: &Self::State, u: &[String], q: &str) -> Option<(String, Self::State)>;

    /// Equal keys imply behaviorally equivalent states.
    fn canonical_key(&self, state: &Self::State) -> String;

    /// Query/response pair that returns every state to the initial one.
    fn reset_symbols(&self) -> Option<(String, String)> {
        None
    }

    /// Whether a protocol may end in this state. All states are final for
    /// block-prefix-closed languages.
    fn is_final(&self, _state: &Self::State) -> bool {
        true
    }
}

/// Replays blocks from the initial state; `None` if some recorded response
/// differs from the oracle's.
pub fn replay<O: ProtocolOracle>(o: &O, blocks: &[ProtocolBlock]) -> Option<O::State> {
    let mut state = o.initial_state();
    for b in blocks {
        let (r, next) = o.respond(&state, &b.u, &b.q)?;
        if r != b.r {
            return None;
        }
        state = next;
    }
    Some(state)
}

/// Parse, replay, and check the end condition.
pub fn membership<O: ProtocolOracle, S: AsRef<str>>(o: &O, w: &[S]) -> bool {
    parse_blocks(o.alphabet(), w)
        .ok()
        .and_then(|blocks| replay(o, &blocks))
        .is_some_and(|s| o.is_final(&s))
}

/// The six protocol axioms; the last one only applies with a reset pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Axiom {
    EmptyWord,
    BlockShape,
    PrefixClosed,
    Total,
    Functional,
    Reset,
}

impl Axiom {
    pub const ALL: [Axiom; 6] = [
        Axiom::EmptyWord,
        Axiom::BlockShape,
        Axiom::PrefixClosed,
        Axiom::Total,
        Axiom::Functional,
        Axiom::Reset,
    ];

    pub fn numeral(self) -> &'static str {
        match self {
            Axiom::EmptyWord => "i",
            Axiom::BlockShape => "ii",
            Axiom::PrefixClosed => "iii",
            Axiom::Total => "iv",
            Axiom::Functional => "v",
            Axiom::Reset => "vi",
        }
    }
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.numeral())
    }
}

impl FromStr for Axiom {
    type Err = Error;

    fn from_str(s: &str) -> Result<Axiom> {
        Axiom::ALL
            .into_iter()
            .find(|a| a.numeral() == s)
            .ok_or_else(|| Error::Invalid(format!("unknown axiom `{s}` (expected i..vi)")))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FuzzReport {
    pub axiom: Axiom,
    pub trials: usize,
    pub violations: usize,
    /// Set when the axiom does not apply to this oracle.
    pub skipped: bool,
    /// Up to [`FuzzReport::MAX_EXAMPLES`] counterexamples.
    pub examples: Vec<String>,
}

impl FuzzReport {
    pub const MAX_EXAMPLES: usize = 20;

    fn record(&mut self, example: String) {
        self.violations += 1;
        if self.examples.len() < Self::MAX_EXAMPLES {
            self.examples.push(example);
        }
    }
}

/// Shape of the random protocols used by [`axiom_fuzz`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FuzzConfig {
    pub trials: usize,
    pub max_blocks: usize,
    pub max_wr_len: usize,
    pub seed: u64,
}

impl Default for FuzzConfig {
    fn default() -> Self {
        FuzzConfig {
            trials: 1000,
            max_blocks: 50,
            max_wr_len: 3,
            seed: 0,
        }
    }
}

fn random_wr_word<R: Rng>(pa: &ProtocolAlphabet, rng: &mut R, max_len: usize) -> Word {
    if pa.wr().is_empty() {
        return Vec::new();
    }
    let n = rng.random_range(0..=max_len);
    (0..n)
        .map(|_| pa.wr()[rng.random_range(0..pa.wr().len())].clone())
        .collect()
}

/// A random member with at most `max_blocks` blocks, built by asking the
/// oracle. Stops early when no query gets a response.
pub fn random_member<O: ProtocolOracle, R: Rng>(
    o: &O,
    rng: &mut R,
    max_blocks: usize,
    max_wr_len: usize,
) -> Vec<ProtocolBlock> {
    let pa = o.alphabet();
    let n = rng.random_range(0..=max_blocks);
    let mut state = o.initial_state();
    let mut blocks = Vec::with_capacity(n);
    'blocks: for _ in 0..n {
        let u = random_wr_word(pa, rng, max_wr_len);
        let mut qs: Vec<&String> = pa.query().iter().collect();
        qs.shuffle(rng);
        for (attempt, u) in [u, Vec::new()].into_iter().enumerate() {
            for q in &qs {
                if let Some((r, next)) = o.respond(&state, &u, q) {
                    blocks.push(ProtocolBlock {
                        u,
                        q: (*q).clone(),
                        r,
                    });
                    state = next;
                    continue 'blocks;
                }
            }
            if attempt == 1 {
                break 'blocks;
            }
        }
    }
    blocks
}

/// Randomized check of one axiom. Members are generated through `respond`,
/// while checks go through parsing and [`membership`].
pub fn axiom_fuzz<O: ProtocolOracle>(o: &O, axiom: Axiom, cfg: &FuzzConfig) -> FuzzReport {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut report = FuzzReport {
        axiom,
        trials: cfg.trials,
        violations: 0,
        skipped: false,
        examples: Vec::new(),
    };
    let pa = o.alphabet();
    let gen = |rng: &mut ChaCha8Rng| random_member(o, rng, cfg.max_blocks, cfg.max_wr_len);
    match axiom {
        Axiom::EmptyWord => {
            if !membership(o, &Vec::<String>::new()) {
                report.record("empty protocol rejected".into());
            }
        }
        Axiom::BlockShape => {
            for _ in 0..cfg.trials {
                let w = flatten(&gen(&mut rng));
                if parse_blocks(pa, &w).is_err() || !membership(o, &w) {
                    report.record(format!("generated `{}` is not a member", show_word(&w)));
                }
            }
        }
        Axiom::PrefixClosed => {
            for _ in 0..cfg.trials {
                let p = gen(&mut rng);
                for k in 0..p.len() {
                    let w = flatten(&p[..k]);
                    if !membership(o, &w) {
                        report.record(format!(
                            "prefix `{}` of `{}` rejected",
                            show_word(&w),
                            show_word(&flatten(&p))
                        ));
                        break;
                    }
                }
            }
        }
        Axiom::Total => {
            for _ in 0..cfg.trials {
                let p = gen(&mut rng);
                let u = random_wr_word(pa, &mut rng, cfg.max_wr_len);
                for q in pa.query() {
                    let ok = pa.responses_for(q).into_iter().any(|r| {
                        let mut w = flatten(&p);
                        w.extend(u.iter().cloned());
                        w.push(q.clone());
                        w.push(r.to_string());
                        membership(o, &w)
                    });
                    if !ok {
                        let key = replay(o, &p)
                            .map(|s| o.canonical_key(&s))
                            .unwrap_or_default();
                        report.record(format!(
                            "no response to `{}` after `{}` (state `{key}`)",
                            show_word(&[&u[..], std::slice::from_ref(q)].concat()),
                            show_word(&flatten(&p))
                        ));
                    }
                }
            }
        }
        Axiom::Functional => {
            for _ in 0..cfg.trials {
                let p = gen(&mut rng);
                let (Some(s1), Some(s2)) = (replay(o, &p), replay(o, &p)) else {
                    report.record(format!("replay of `{}` failed", show_word(&flatten(&p))));
                    continue;
                };
                if o.canonical_key(&s1) != o.canonical_key(&s2) {
                    report.record(format!("replays of `{}` disagree", show_word(&flatten(&p))));
                    continue;
                }
                let u = random_wr_word(pa, &mut rng, cfg.max_wr_len);
                for q in pa.query() {
                    let a = o.respond(&s1, &u, q).map(|(r, s)| (r, o.canonical_key(&s)));
                    let b = o.respond(&s2, &u, q).map(|(r, s)| (r, o.canonical_key(&s)));
                    if a != b {
                        report.record(format!(
                            "responses to `{q}` after `{}` differ",
                            show_word(&flatten(&p))
                        ));
                    }
                }
            }
        }
        Axiom::Reset => {
            let Some((rq, rr)) = o.reset_symbols() else {
                report.skipped = true;
                return report;
            };
            for _ in 0..cfg.trials {
                let p1 = gen(&mut rng);
                let p2 = gen(&mut rng);
                let mut w = flatten(&p1);
                w.push(rq.clone());
                w.push(rr.clone());
                w.extend(flatten(&p2));
                if !membership(o, &w) {
                    report.record(format!("`{}` rejected", show_word(&w)));
                }
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::tokens;

    #[test]
    fn parse_examples() {
        let d = DyckOracle::new(false);
        let blocks = parse_blocks(d.alphabet(), &tokens("push( ( pop )")).unwrap();
        assert_eq!(blocks.len(), 2);
        assert_eq!(blocks[0].q, "push(");
        assert!(blocks[1].u.is_empty());
        assert!(parse_blocks(d.alphabet(), &tokens("")).unwrap().is_empty());
        let s = SetOracle::new();
        assert!(parse_blocks(s.alphabet(), &tokens("a #ins")).is_err());
        assert!(parse_blocks(s.alphabet(), &tokens("a #ins +#")).is_err());
        assert!(parse_blocks(s.alphabet(), &tokens("a")).is_err());
    }

    #[test]
    fn overlapping_query_and_response_tokens() {
        let pa = ProtocolAlphabet::new(&["0"], &["r"], &["r"], &[("r", "r")]).unwrap();
        assert_eq!(parse_blocks(&pa, &tokens("r r r r")).unwrap().len(), 2);
        assert_eq!(pa.flattened().len(), 2);
        assert!(ProtocolAlphabet::new(&["r"], &["r"], &["x"], &[("r", "x")]).is_err());
    }

    #[test]
    fn axiom_names_round_trip() {
        for a in Axiom::ALL {
            assert_eq!(a.numeral().parse::<Axiom>().unwrap(), a);
        }
        assert!("vii".parse::<Axiom>().is_err());
    }

    #[test]
    fn reset_axiom_skipped_without_reset() {
        let cfg = FuzzConfig {
            trials: 10,
            ..FuzzConfig::default()
        };
        let r = axiom_fuzz(&SetOracle::new(), Axiom::Reset, &cfg);
        assert!(r.skipped);
    }

    #[test]
    fn dyck_total_axiom_fails_on_empty_pop() {
        let cfg = FuzzConfig {
            trials: 200,
            max_blocks: 4,
            ..FuzzConfig::default()
        };
        let r = axiom_fuzz(&DyckOracle::new(false), Axiom::Total, &cfg);
        assert!(r.violations > 0);
        assert!(r
            .examples
            .iter()
            .all(|e| e.contains("`pop`") && e.ends_with("(state ``)")));
    }
}

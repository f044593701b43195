//! Line-based text formats for automata, transducers, automata with storage
//! and machines. Lines are whitespace-tokenized; a line whose first
//! character is `#` is a comment. Words inside a line are comma-joined
//! tokens, with `-` for the empty word.

use std::fmt::Write as _;

use crate::ads::{AdsAutomaton, AdsBuilder};
use crate::alphabet::{Alphabet, Word, EPSILON};
use crate::error::{Error, Result};
use crate::fst::{Fst, FstBuilder};
use crate::logtm::{LogTm, LogTmBuilder, Move, Rule};
use crate::nfa::{Dfa, Nfa, NfaBuilder};
use crate::protocol::ProtocolAlphabet;

/// Any parsed file.
#[derive(Clone, Debug)]
pub enum Document {
    Nfa(Nfa),
    Dfa(Dfa),
    Fst(Fst),
    Ads(AdsAutomaton),
    LogTm(LogTm),
}

impl Document {
    pub fn kind(&self) -> &'static str {
        match self {
            Document::Nfa(_) => "nfa",
            Document::Dfa(_) => "dfa",
            Document::Fst(_) => "fst",
            Document::Ads(_) => "ads",
            Document::LogTm(_) => "logtm",
        }
    }

    pub fn to_text(&self) -> String {
        match self {
            Document::Nfa(a) => write_nfa(a),
            Document::Dfa(a) => write_dfa(a),
            Document::Fst(t) => write_fst(t),
            Document::Ads(m) => write_ads(m),
            Document::LogTm(tm) => write_logtm(tm),
        }
    }
}

struct Line {
    no: usize,
    toks: Vec<String>,
}

impl Line {
    fn err(&self, msg: impl Into<String>) -> Error {
        Error::Parse {
            line: self.no,
            msg: msg.into(),
        }
    }

    fn args(&self) -> &[String] {
        &self.toks[1..]
    }

    fn exactly(&self, n: usize) -> Result<&[String]> {
        if self.args().len() == n {
            Ok(self.args())
        } else {
            Err(self.err(format!(
                "`{}` takes {n} argument(s), got {}",
                self.toks[0],
                self.args().len()
            )))
        }
    }
}

fn lines(text: &str) -> Vec<Line> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| {
            let t = l.trim_start();
            !t.is_empty() && !t.starts_with('#')
        })
        .map(|(i, l)| Line {
            no: i + 1,
            toks: l.split_whitespace().map(str::to_string).collect(),
        })
        .collect()
}

fn kind_of(ls: &[Line]) -> Result<&str> {
    let first = ls.first().ok_or(Error::Parse {
        line: 1,
        msg: "empty file".into(),
    })?;
    if first.toks[0] != "type" {
        return Err(first.err("file must start with `type <kind>`"));
    }
    Ok(first.exactly(1)?[0].as_str())
}

/// Parses a file of any kind, dispatching on its `type` line.
pub fn parse_document(text: &str) -> Result<Document> {
    let ls = lines(text);
    match kind_of(&ls)? {
        "nfa" => parse_nfa(text).map(Document::Nfa),
        "dfa" => parse_dfa(text).map(Document::Dfa),
        "fst" => parse_fst(text).map(Document::Fst),
        "ads" => parse_ads(text).map(Document::Ads),
        "logtm" => parse_logtm(text).map(Document::LogTm),
        k => Err(ls[0].err(format!("unknown type `{k}`"))),
    }
}

fn parse_word(tok: &str) -> Word {
    if tok == "-" {
        Vec::new()
    } else {
        tok.split(',').map(str::to_string).collect()
    }
}

fn show(w: &[String]) -> String {
    if w.is_empty() {
        "-".to_string()
    } else {
        w.join(",")
    }
}

fn alphabet_of(l: &Line) -> Result<Alphabet> {
    Alphabet::new(l.args().iter().cloned()).map_err(|e| l.err(e.to_string()))
}

fn expect_kind(ls: &[Line], kinds: &[&str]) -> Result<()> {
    let k = kind_of(ls)?;
    if kinds.contains(&k) {
        Ok(())
    } else {
        Err(ls[0].err(format!("expected type {}, got `{k}`", kinds.join(" or "))))
    }
}

fn find<'a>(ls: &'a [Line], key: &str) -> Option<&'a Line> {
    ls.iter().find(|l| l.toks[0] == key)
}

fn required<'a>(ls: &'a [Line], key: &str) -> Result<&'a Line> {
    find(ls, key).ok_or(Error::Parse {
        line: ls.last().map_or(1, |l| l.no),
        msg: format!("missing `{key}` line"),
    })
}

fn parse_nfa_lines(ls: &[Line]) -> Result<Nfa> {
    let al = alphabet_of(required(ls, "alphabet")?)?;
    let mut b = NfaBuilder::new(al.clone());
    for l in &ls[1..] {
        let a = l.args();
        match l.toks[0].as_str() {
            "alphabet" => {}
            "states" => {
                for s in a {
                    b.state(s.clone());
                }
            }
            "initial" => {
                let s = b.state(l.exactly(1)?[0].clone());
                b.set_initial(s);
            }
            "accept" => {
                for s in a {
                    let s = b.state(s.clone());
                    b.set_accepting(s);
                }
            }
            "trans" => {
                let a = l.exactly(3)?;
                let label = if a[1] == EPSILON {
                    None
                } else {
                    Some(al.index_of(&a[1]).ok_or_else(|| {
                        l.err(format!("symbol `{}` is not in the alphabet", a[1]))
                    })?)
                };
                let src = b.state(a[0].clone());
                let dst = b.state(a[2].clone());
                b.edge(src, label, dst);
            }
            k => return Err(l.err(format!("unknown directive `{k}`"))),
        }
    }
    b.build().map_err(|e| ls[0].err(e.to_string()))
}

pub fn parse_nfa(text: &str) -> Result<Nfa> {
    let ls = lines(text);
    expect_kind(&ls, &["nfa", "dfa"])?;
    parse_nfa_lines(&ls)
}

pub fn parse_dfa(text: &str) -> Result<Dfa> {
    let ls = lines(text);
    expect_kind(&ls, &["dfa", "nfa"])?;
    Dfa::new(parse_nfa_lines(&ls)?)
}

fn header(
    out: &mut String,
    kind: &str,
    names: &[String],
    initial: &str,
    accepting: impl Iterator<Item = String>,
) {
    let _ = writeln!(out, "type {kind}");
    let _ = writeln!(out, "states {}", names.join(" "));
    let _ = writeln!(out, "initial {initial}");
    let acc: Vec<String> = accepting.collect();
    let _ = writeln!(
        out,
        "accept{}",
        acc.iter().map(|s| format!(" {s}")).collect::<String>()
    );
}

fn write_automaton(a: &Nfa, kind: &str) -> String {
    let mut out = String::new();
    let names = a.state_names();
    header(
        &mut out,
        kind,
        names,
        a.state_name(a.initial()),
        a.accepting_states().map(|s| names[s].clone()),
    );
    let _ = writeln!(out, "alphabet {}", a.alphabet());
    for (s, l, d) in a.transitions() {
        let label = l.map_or(EPSILON, |x| a.alphabet().symbol(x));
        let _ = writeln!(out, "trans {} {label} {}", names[s], names[d]);
    }
    out
}

pub fn write_nfa(a: &Nfa) -> String {
    write_automaton(a, "nfa")
}

pub fn write_dfa(a: &Dfa) -> String {
    write_automaton(a.as_nfa(), "dfa")
}

/// Transducer files: `alphabet` is the input side and `output` the output
/// side; `trans <src> <tok|eps> <word|-> <dst>`.
pub fn parse_fst(text: &str) -> Result<Fst> {
    let ls = lines(text);
    expect_kind(&ls, &["fst"])?;
    let input = alphabet_of(required(&ls, "alphabet")?)?;
    let output = alphabet_of(required(&ls, "output")?)?;
    let mut b = FstBuilder::new(input.clone(), output.clone());
    for l in &ls[1..] {
        let a = l.args();
        match l.toks[0].as_str() {
            "alphabet" | "output" => {}
            "states" => {
                for s in a {
                    b.state(s.clone());
                }
            }
            "initial" => {
                let s = b.state(l.exactly(1)?[0].clone());
                b.set_initial(s);
            }
            "accept" => {
                for s in a {
                    let s = b.state(s.clone());
                    b.set_accepting(s);
                }
            }
            "trans" => {
                let a = l.exactly(4)?;
                let label = if a[1] == EPSILON {
                    None
                } else {
                    Some(input.index_of(&a[1]).ok_or_else(|| {
                        l.err(format!("symbol `{}` is not in the input alphabet", a[1]))
                    })?)
                };
                let out = output
                    .encode(&parse_word(&a[2]))
                    .map_err(|e| l.err(e.to_string()))?;
                let src = b.state(a[0].clone());
                let dst = b.state(a[3].clone());
                b.edge(src, label, out, dst);
            }
            k => return Err(l.err(format!("unknown directive `{k}`"))),
        }
    }
    b.build().map_err(|e| ls[0].err(e.to_string()))
}

pub fn write_fst(t: &Fst) -> String {
    let mut out = String::new();
    let names = t.state_names();
    header(
        &mut out,
        "fst",
        names,
        t.state_name(t.initial()),
        t.accepting_states().map(|s| names[s].clone()),
    );
    let _ = writeln!(out, "alphabet {}", t.input_alphabet());
    let _ = writeln!(out, "output {}", t.output_alphabet());
    for (s, i, o, d) in t.transitions() {
        let label = i.map_or(EPSILON, |x| t.input_alphabet().symbol(x));
        let word = t.output_alphabet().decode(o);
        let _ = writeln!(
            out,
            "trans {} {label} {} {}",
            names[s],
            show(&word),
            names[d]
        );
    }
    out
}

/// Automaton-with-storage files: `alphabet` (input), `wr`, `query`, `resp`,
/// one `valid <q> <r>` per pair, `partition wr|query <ids...>`,
/// `wmove <s> <tok|eps|lm|rm> <word|-> <s'>` and `qmove <s> <q> <r> <s'>`.
pub fn parse_ads(text: &str) -> Result<AdsAutomaton> {
    let ls = lines(text);
    expect_kind(&ls, &["ads"])?;
    let input = alphabet_of(required(&ls, "alphabet")?)?;
    let list = |key: &str| -> Vec<String> {
        find(&ls, key)
            .map(|l| l.args().to_vec())
            .unwrap_or_default()
    };
    let valid: Vec<(String, String)> = ls
        .iter()
        .filter(|l| l.toks[0] == "valid")
        .map(|l| l.exactly(2).map(|a| (a[0].clone(), a[1].clone())))
        .collect::<Result<_>>()?;
    let pa = ProtocolAlphabet::new(&list("wr"), &list("query"), &list("resp"), &valid)
        .map_err(|e| required(&ls, "query").map_or(e.clone(), |l| l.err(e.to_string())))?;
    let mut b = AdsBuilder::new(input, pa);
    for l in &ls[1..] {
        let a = l.args();
        match l.toks[0].as_str() {
            "alphabet" | "wr" | "query" | "resp" | "valid" => {}
            "states" => {
                for s in a {
                    b.state(s.clone());
                }
            }
            "partition" => {
                let Some((kind, ids)) = a.split_first() else {
                    return Err(l.err("`partition` needs `wr` or `query`"));
                };
                match kind.as_str() {
                    "wr" => {
                        for s in ids {
                            b.state(s.clone());
                        }
                    }
                    "query" => {
                        for s in ids {
                            b.query_state(s.clone());
                        }
                    }
                    k => return Err(l.err(format!("unknown partition `{k}`"))),
                }
            }
            "initial" => {
                let s = b.state(l.exactly(1)?[0].clone());
                b.set_initial(s);
            }
            "accept" => {
                for s in a {
                    let s = b.state(s.clone());
                    b.set_accepting(s);
                }
            }
            "wmove" => {
                let a = l.exactly(4)?;
                let read = b.read_label(&a[1]).map_err(|e| l.err(e.to_string()))?;
                let src = b.state(a[0].clone());
                let dst = b.state(a[3].clone());
                b.wmove(src, read, parse_word(&a[2]), dst);
            }
            "qmove" => {
                let a = l.exactly(4)?;
                let src = b.state(a[0].clone());
                let dst = b.state(a[3].clone());
                b.qmove(src, a[1].clone(), a[2].clone(), dst);
            }
            k => return Err(l.err(format!("unknown directive `{k}`"))),
        }
    }
    b.build().map_err(|e| ls[0].err(e.to_string()))
}

pub fn write_ads(m: &AdsAutomaton) -> String {
    let mut out = String::new();
    let names = m.state_names();
    header(
        &mut out,
        "ads",
        names,
        m.state_name(m.initial()),
        m.accepting_states().map(|s| names[s].clone()),
    );
    let pa = m.protocol();
    let _ = writeln!(out, "alphabet {}", m.input_alphabet());
    let _ = writeln!(
        out,
        "wr{}",
        pa.wr().iter().map(|s| format!(" {s}")).collect::<String>()
    );
    let _ = writeln!(out, "query {}", pa.query().join(" "));
    let _ = writeln!(out, "resp {}", pa.resp().join(" "));
    for (q, r) in pa.valid_pairs() {
        let _ = writeln!(out, "valid {q} {r}");
    }
    let part = |query: bool| -> String {
        (0..m.num_states())
            .filter(|&s| m.is_query_state(s) == query)
            .map(|s| format!(" {}", names[s]))
            .collect()
    };
    let _ = writeln!(out, "partition wr{}", part(false));
    let _ = writeln!(out, "partition query{}", part(true));
    for s in 0..m.num_states() {
        for (rd, x, d) in m.write_moves(s) {
            let _ = writeln!(
                out,
                "wmove {} {} {} {}",
                names[s],
                m.read_token(*rd),
                show(x),
                names[*d]
            );
        }
        for (q, r, d) in m.query_moves(s) {
            let _ = writeln!(out, "qmove {} {q} {r} {}", names[s], names[*d]);
        }
    }
    out
}

/// Machine files: `input`, `work`, optional `advice`, `worksize N`,
/// `tmstate <ids...>`, `initial`, `accept`, `reject`,
/// `rule <q> <in> <work> <advice|-> -> <q'> <write> <L|R|S> <L|R|S> <consume|hold> [emit <sym>]`,
/// `query <q> <qsym>` and `onresp <q> <rsym> <q'>`.
pub fn parse_logtm(text: &str) -> Result<LogTm> {
    let ls = lines(text);
    expect_kind(&ls, &["logtm"])?;
    let input = alphabet_of(required(&ls, "input")?)?;
    let work = alphabet_of(required(&ls, "work")?)?;
    let size_line = required(&ls, "worksize")?;
    let size: usize = size_line.exactly(1)?[0]
        .parse()
        .map_err(|_| size_line.err("worksize must be a number"))?;
    let mut b = LogTmBuilder::new(input, work, size);
    if let Some(l) = find(&ls, "advice") {
        b.advice(alphabet_of(l)?);
    }
    for l in &ls[1..] {
        let a = l.args();
        match l.toks[0].as_str() {
            "input" | "work" | "advice" | "worksize" => {}
            "tmstate" | "states" => {
                for s in a {
                    b.state(s.clone());
                }
            }
            "initial" => {
                let s = b.state(l.exactly(1)?[0].clone());
                b.set_initial(s);
            }
            "accept" => {
                for s in a {
                    let s = b.state(s.clone());
                    b.set_accepting(s);
                }
            }
            "reject" => {
                for s in a {
                    let s = b.state(s.clone());
                    b.set_rejecting(s);
                }
            }
            "rule" => {
                if !(a.len() == 10 || (a.len() == 12 && a[10] == "emit")) || a[4] != "->" {
                    return Err(l.err(
                        "expected `rule <q> <in> <work> <advice|-> -> <q'> <write> <move> <move> <consume|hold> [emit <sym>]`",
                    ));
                }
                let mv = |t: &str| Move::parse(t).ok_or_else(|| l.err(format!("bad move `{t}`")));
                let consume = match a[9].as_str() {
                    "consume" => true,
                    "hold" => false,
                    t => return Err(l.err(format!("expected `consume` or `hold`, got `{t}`"))),
                };
                let from = b.state(a[0].clone());
                let to = b.state(a[5].clone());
                b.rule(Rule {
                    from,
                    input: a[1].clone(),
                    work: a[2].clone(),
                    advice: (a[3] != "-").then(|| a[3].clone()),
                    to,
                    write: a[6].clone(),
                    input_move: mv(&a[7])?,
                    work_move: mv(&a[8])?,
                    consume,
                    emit: a.get(11).cloned(),
                });
            }
            "query" => {
                let a = l.exactly(2)?;
                let s = b.state(a[0].clone());
                b.query(s, a[1].clone());
            }
            "onresp" => {
                let a = l.exactly(3)?;
                let s = b.state(a[0].clone());
                let d = b.state(a[2].clone());
                b.on_response(s, a[1].clone(), d);
            }
            k => return Err(l.err(format!("unknown directive `{k}`"))),
        }
    }
    b.build().map_err(|e| ls[0].err(e.to_string()))
}

pub fn write_logtm(tm: &LogTm) -> String {
    let mut out = String::new();
    let names = tm.state_names();
    let _ = writeln!(out, "type logtm");
    let _ = writeln!(
        out,
        "input{}",
        tm.input_alphabet()
            .symbols()
            .iter()
            .map(|s| format!(" {s}"))
            .collect::<String>()
    );
    let _ = writeln!(out, "work {}", tm.work_alphabet());
    if let Some(adv) = tm.advice_alphabet() {
        let _ = writeln!(
            out,
            "advice{}",
            adv.symbols()
                .iter()
                .map(|s| format!(" {s}"))
                .collect::<String>()
        );
    }
    let _ = writeln!(out, "worksize {}", tm.work_size());
    let _ = writeln!(out, "tmstate {}", names.join(" "));
    let _ = writeln!(out, "initial {}", names[tm.initial()]);
    let flagged = |f: &dyn Fn(usize) -> bool| -> String {
        (0..tm.num_states())
            .filter(|&s| f(s))
            .map(|s| format!(" {}", names[s]))
            .collect()
    };
    let _ = writeln!(out, "accept{}", flagged(&|s| tm.is_accepting(s)));
    let _ = writeln!(out, "reject{}", flagged(&|s| tm.is_rejecting(s)));
    for r in tm.rules() {
        let _ = write!(
            out,
            "rule {} {} {} {} -> {} {} {} {} {}",
            names[r.from],
            r.input,
            r.work,
            r.advice.as_deref().unwrap_or("-"),
            names[r.to],
            r.write,
            r.input_move,
            r.work_move,
            if r.consume { "consume" } else { "hold" }
        );
        if let Some(e) = &r.emit {
            let _ = write!(out, " emit {e}");
        }
        out.push('\n');
    }
    for s in 0..tm.num_states() {
        if let Some(q) = tm.query_of(s) {
            let _ = writeln!(out, "query {} {q}", names[s]);
            for (r, d) in tm.responses(s) {
                let _ = writeln!(out, "onresp {} {r} {}", names[s], names[*d]);
            }
        }
    }
    out
}

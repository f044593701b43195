//! Command-line front end: file formats, reductions, deciders and fuzzing.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use adskit::ads::{extractor, m_prot, two_letter_recode};
use adskit::format::{parse_ads, parse_dfa, parse_fst, parse_logtm, parse_nfa, Document};
use adskit::logtm::{
    lambda_eliminate, run_with_advice, run_with_protocol, surface_config_nfa, LAMBDA,
};
use adskit::nrr::{
    filter_transfer, membership_to_reg, nonemptiness_to_nrr, nrr_to_nonemptiness, Filter,
    NrrInstance,
};
use adskit::protocol::{axiom_fuzz, membership, Axiom, BuiltinOracle, FuzzConfig, ProtocolOracle};
use adskit::search::Bounds;
use adskit::universality::{
    forward_reduce, l_membership, universality_decide, FiniteSetOracle, ProtXOracle, WConstruction,
};
use adskit::{compose, image_nfa, invert, preimage_nfa, show_word, tokens, Verdict, Word};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

/// Exit code for command-line usage errors.
pub const EXIT_USAGE: i32 = 3;
/// Exit code for unreadable or malformed inputs and failed constructions.
pub const EXIT_FAILURE: i32 = 4;

#[derive(Parser, Debug)]
#[command(
    name = "adskit",
    version,
    about = "Automata with data structures, transducers and protocol deciders"
)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Search limits, e.g. `max-configs=1000,max-blocks=8,max-tape=4`.
    #[arg(long, global = true, default_value_t = Bounds::default())]
    bounds: Bounds,
    /// Seed for randomized commands.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// File listing the binary words of `X`, one per line (`eps` for the empty word).
    #[arg(long, global = true)]
    oracle_file: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Text,
    Dot,
    Jsonl,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Membership of a word in an automaton.
    Accepts {
        automaton: PathBuf,
        word: Option<String>,
    },
    /// Drops states that are unreachable or cannot reach acceptance.
    Trim { automaton: PathBuf },
    /// Intersection of two automata.
    Product { left: PathBuf, right: PathBuf },
    #[command(subcommand)]
    Fst(FstCommand),
    #[command(subcommand)]
    Protocol(ProtocolCommand),
    #[command(subcommand)]
    Ads(AdsCommand),
    #[command(subcommand)]
    Nrr(NrrCommand),
    #[command(subcommand)]
    Logtm(LogtmCommand),
    #[command(subcommand)]
    Universality(UniversalityCommand),
}

#[derive(Subcommand, Debug)]
enum FstCommand {
    /// All outputs on one input.
    Apply {
        fst: PathBuf,
        word: Option<String>,
        /// Longest output explored.
        #[arg(long, default_value_t = 32)]
        cap: usize,
    },
    /// Relation of the first transducer followed by the second.
    Compose { first: PathBuf, second: PathBuf },
    /// Swaps inputs and outputs.
    Invert { fst: PathBuf },
    /// Outputs produced on the language of an automaton.
    Image { fst: PathBuf, automaton: PathBuf },
    /// Inputs that produce a word of an automaton.
    Preimage { fst: PathBuf, automaton: PathBuf },
}

#[derive(Subcommand, Debug)]
enum ProtocolCommand {
    /// Whether a token sequence is a correct protocol.
    Member {
        #[arg(long)]
        oracle: String,
        word: Option<String>,
    },
    /// Randomized axiom check.
    Fuzz {
        #[arg(long)]
        oracle: String,
        /// One of i..vi, or `all`.
        #[arg(long, default_value = "all")]
        axiom: String,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 50)]
        max_blocks: usize,
        #[arg(long, default_value_t = 3)]
        max_write: usize,
    },
}

#[derive(Subcommand, Debug)]
enum AdsCommand {
    /// Runs an automaton on one input against an oracle.
    Simulate {
        automaton: PathBuf,
        word: Option<String>,
        #[arg(long, default_value = "set")]
        oracle: String,
    },
    /// Transducer from inputs to candidate protocols.
    Extract { automaton: PathBuf },
    /// Automaton accepting exactly the correct protocols of an oracle.
    Mprot {
        #[arg(long)]
        oracle: String,
    },
    /// Re-encodes write letters over two letters.
    Recode { automaton: PathBuf },
}

#[derive(Subcommand, Debug)]
enum NrrCommand {
    /// Whether an automaton accepts a word of the filter language.
    Decide {
        automaton: PathBuf,
        /// dyck, dyck-exact, set, sis:K, per:K or protx.
        #[arg(long)]
        filter: String,
    },
    /// Candidate-protocol automaton of an automaton with storage.
    ReduceFromAds { automaton: PathBuf },
    /// Automaton with storage accepting the protocols of an automaton.
    ReduceToAds {
        automaton: PathBuf,
        #[arg(long)]
        filter: String,
    },
    /// DFA of the protocol run of a deterministic automaton on one input.
    MemberToReg {
        automaton: PathBuf,
        word: Option<String>,
    },
    /// Preimage of an automaton under a transducer.
    FilterTransfer { automaton: PathBuf, fst: PathBuf },
}

#[derive(Subcommand, Debug)]
enum LogtmCommand {
    /// Runs a machine with advice, or with an oracle when it asks queries.
    Run {
        machine: PathBuf,
        input: Option<String>,
        #[arg(long)]
        advice: Option<String>,
        #[arg(long)]
        oracle: Option<String>,
        #[arg(long, default_value_t = 100_000)]
        steps: usize,
    },
    /// Automaton over advice words accepted on one input.
    SurfaceNfa {
        machine: PathBuf,
        input: Option<String>,
        #[arg(long, default_value_t = adskit::logtm::DEFAULT_STATE_CAP)]
        cap: usize,
    },
    /// Removes trailing padding from a DFA over an alphabet with `Λ`.
    LambdaElim { automaton: PathBuf },
}

#[derive(Subcommand, Debug)]
enum UniversalityCommand {
    /// Whether a binary automaton accepts a correct protocol of the `X` model.
    Decide { automaton: PathBuf },
    /// Membership of a binary word in the oracle language.
    Lmember { word: String },
    /// Family parameters of a triple.
    Wparams { a: String, b: String, c: String },
    /// The protocol `sq(x) # +`.
    Forward { word: String },
}

/// A command failure, reported on stderr.
#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Input { path: String, source: adskit::Error },
    #[error(transparent)]
    Lib(#[from] adskit::Error),
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            _ => EXIT_FAILURE,
        }
    }
}

type Res<T> = std::result::Result<T, CliError>;

/// What a command prints: text lines, one JSON record per line, and an
/// optional DOT rendering.
struct Report {
    code: i32,
    lines: Vec<String>,
    records: Vec<Value>,
    dot: Option<String>,
}

impl Report {
    fn new(code: i32) -> Self {
        Report {
            code,
            lines: Vec::new(),
            records: Vec::new(),
            dot: None,
        }
    }

    fn line(&mut self, text: impl Into<String>, record: Value) {
        self.lines.push(text.into());
        self.records.push(record);
    }

    fn verdict(v: Verdict, detail: Option<String>, mut record: Value) -> Self {
        let mut r = Report::new(v.exit_code());
        record["verdict"] = json!(v.answer());
        r.line(
            match detail {
                Some(d) => format!("{} {d}", v.answer()),
                None => v.answer().to_string(),
            },
            record,
        );
        r
    }

    fn document(doc: Document) -> Self {
        let text = doc.to_text();
        let mut r = Report::new(0);
        r.dot = match &doc {
            Document::Nfa(a) => Some(a.to_dot()),
            Document::Dfa(a) => Some(a.as_nfa().to_dot()),
            Document::Fst(t) => Some(t.to_dot()),
            Document::Ads(_) | Document::LogTm(_) => None,
        };
        r.records.push(json!({"kind": doc.kind(), "text": text}));
        r.lines.push(text.trim_end().to_string());
        r
    }

    fn render(&self, format: Format) -> Res<String> {
        let mut out = String::new();
        match format {
            Format::Text => {
                for l in &self.lines {
                    out.push_str(l);
                    out.push('\n');
                }
            }
            Format::Jsonl => {
                for r in &self.records {
                    out.push_str(&r.to_string());
                    out.push('\n');
                }
            }
            Format::Dot => {
                let dot = self
                    .dot
                    .as_ref()
                    .ok_or_else(|| CliError::Usage("this command has no DOT rendering".into()))?;
                out.push_str(dot);
                if !dot.ends_with('\n') {
                    out.push('\n');
                }
            }
        }
        Ok(out)
    }
}

fn read(path: &Path) -> Res<String> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn load<T>(path: &Path, parse: impl Fn(&str) -> adskit::Result<T>) -> Res<T> {
    parse(&read(path)?).map_err(|source| CliError::Input {
        path: path.display().to_string(),
        source,
    })
}

fn word_arg(w: &Option<String>) -> Word {
    w.as_deref().map(tokens).unwrap_or_default()
}

/// Shows a word with runs of binary letters written without spaces.
fn compact(w: &[String]) -> String {
    let mut parts: Vec<String> = Vec::new();
    let mut run = String::new();
    for t in w {
        if t == "0" || t == "1" {
            run.push_str(t);
        } else {
            if !run.is_empty() {
                parts.push(std::mem::take(&mut run));
            }
            parts.push(t.clone());
        }
    }
    if !run.is_empty() {
        parts.push(run);
    }
    parts.join(" ")
}

fn x_oracle(common: &Common) -> Res<Arc<FiniteSetOracle>> {
    let path = common
        .oracle_file
        .as_ref()
        .ok_or_else(|| CliError::Usage("--oracle-file is required".into()))?;
    Ok(Arc::new(load(path, FiniteSetOracle::from_lines)?))
}

fn oracle(name: &str, common: &Common) -> Res<BuiltinOracle> {
    if name == "protx" {
        let x = x_oracle(common)?;
        return Ok(BuiltinOracle::ProtX(ProtXOracle::new(
            x,
            Arc::new(WConstruction::new()),
        )));
    }
    Ok(BuiltinOracle::from_name(name)?)
}

fn filter(name: &str, common: &Common) -> Res<Filter> {
    if name == "protx" {
        return Ok(Filter::Protocol(oracle(name, common)?));
    }
    Ok(Filter::from_name(name)?)
}

fn witness_detail(w: &Option<Word>, label: &str) -> Option<String> {
    w.as_ref().map(|w| format!("{label}: {}", show_word(w)))
}

fn run_command(cmd: Command, common: &Common) -> Res<Report> {
    let bounds = &common.bounds;
    bounds.validate()?;
    Ok(match cmd {
        Command::Accepts { automaton, word } => {
            let a = load(&automaton, parse_nfa)?;
            let w = word_arg(&word);
            let v = Verdict::from_bool(a.accepts(&w)?);
            Report::verdict(v, None, json!({"word": show_word(&w)}))
        }
        Command::Trim { automaton } => {
            Report::document(Document::Nfa(load(&automaton, parse_nfa)?.trim()))
        }
        Command::Product { left, right } => {
            let a = load(&left, parse_nfa)?;
            let b = load(&right, parse_nfa)?;
            Report::document(Document::Nfa(a.product_intersect(&b)?))
        }
        Command::Fst(c) => fst_command(c)?,
        Command::Protocol(c) => protocol_command(c, common)?,
        Command::Ads(c) => ads_command(c, common)?,
        Command::Nrr(c) => nrr_command(c, common)?,
        Command::Logtm(c) => logtm_command(c, common)?,
        Command::Universality(c) => universality_command(c, common)?,
    })
}

fn fst_command(cmd: FstCommand) -> Res<Report> {
    Ok(match cmd {
        FstCommand::Apply { fst, word, cap } => {
            let t = load(&fst, parse_fst)?;
            let w = word_arg(&word);
            let app = t.apply(&w, cap)?;
            let mut r = Report::new(0);
            for o in &app.outputs {
                let shown = if o.is_empty() {
                    "-".to_string()
                } else {
                    show_word(o)
                };
                r.line(shown, json!({"output": show_word(o)}));
            }
            if app.truncated {
                r.line(format!("truncated at {cap}"), json!({"truncated": cap}));
            }
            r
        }
        FstCommand::Compose { first, second } => {
            let t1 = load(&first, parse_fst)?;
            let t2 = load(&second, parse_fst)?;
            Report::document(Document::Fst(compose(&t1, &t2)?))
        }
        FstCommand::Invert { fst } => {
            Report::document(Document::Fst(invert(&load(&fst, parse_fst)?)))
        }
        FstCommand::Image { fst, automaton } => {
            let t = load(&fst, parse_fst)?;
            let a = load(&automaton, parse_nfa)?;
            Report::document(Document::Nfa(image_nfa(&t, &a)?))
        }
        FstCommand::Preimage { fst, automaton } => {
            let t = load(&fst, parse_fst)?;
            let a = load(&automaton, parse_nfa)?;
            Report::document(Document::Nfa(preimage_nfa(&t, &a)?))
        }
    })
}

fn protocol_command(cmd: ProtocolCommand, common: &Common) -> Res<Report> {
    Ok(match cmd {
        ProtocolCommand::Member { oracle: name, word } => {
            let o = oracle(&name, common)?;
            let w = word_arg(&word);
            Report::verdict(
                Verdict::from_bool(membership(&o, &w)),
                None,
                json!({"word": show_word(&w)}),
            )
        }
        ProtocolCommand::Fuzz {
            oracle: name,
            axiom,
            trials,
            max_blocks,
            max_write,
        } => {
            let o = oracle(&name, common)?;
            let axioms = if axiom == "all" {
                Axiom::ALL.to_vec()
            } else {
                vec![axiom.parse::<Axiom>()?]
            };
            let cfg = FuzzConfig {
                trials,
                max_blocks,
                max_wr_len: max_write,
                seed: common.seed,
            };
            let mut r = Report::new(0);
            for ax in axioms {
                let rep = axiom_fuzz(&o, ax, &cfg);
                if rep.skipped {
                    r.line(
                        format!("axiom {ax}: skipped"),
                        json!({"axiom": ax.numeral(), "skipped": true}),
                    );
                    continue;
                }
                if rep.violations > 0 {
                    r.code = 1;
                }
                r.line(
                    format!(
                        "axiom {ax}: {} violations in {} trials",
                        rep.violations, rep.trials
                    ),
                    json!({
                        "axiom": ax.numeral(),
                        "trials": rep.trials,
                        "violations": rep.violations,
                        "examples": rep.examples,
                    }),
                );
                for e in &rep.examples {
                    r.lines.push(format!("  {e}"));
                }
            }
            r
        }
    })
}

fn ads_command(cmd: AdsCommand, common: &Common) -> Res<Report> {
    Ok(match cmd {
        AdsCommand::Simulate {
            automaton,
            word,
            oracle: name,
        } => {
            let m = load(&automaton, parse_ads)?;
            let o = oracle(&name, common)?;
            let w = word_arg(&word);
            let out = m.simulate(&w, &o, &common.bounds)?;
            Report::verdict(
                out.verdict,
                witness_detail(&out.protocol, "protocol"),
                json!({
                    "word": show_word(&w),
                    "configs": out.configs,
                    "protocol": out.protocol.as_ref().map(|p| show_word(p)),
                }),
            )
        }
        AdsCommand::Extract { automaton } => {
            Report::document(Document::Fst(extractor(&load(&automaton, parse_ads)?)))
        }
        AdsCommand::Mprot { oracle: name } => {
            let o = oracle(&name, common)?;
            Report::document(Document::Ads(m_prot(o.alphabet())))
        }
        AdsCommand::Recode { automaton } => {
            let (m, _) = two_letter_recode(&load(&automaton, parse_ads)?)?;
            Report::document(Document::Ads(m))
        }
    })
}

fn nrr_command(cmd: NrrCommand, common: &Common) -> Res<Report> {
    Ok(match cmd {
        NrrCommand::Decide {
            automaton,
            filter: name,
        } => {
            let a = load(&automaton, parse_nfa)?;
            let inst = NrrInstance::new(a, filter(&name, common)?)?;
            let ans = inst.decide(&common.bounds)?;
            Report::verdict(
                ans.verdict,
                witness_detail(&ans.witness, "witness"),
                json!({
                    "filter": name,
                    "configs": ans.configs,
                    "witness": ans.witness.as_ref().map(|w| show_word(w)),
                }),
            )
        }
        NrrCommand::ReduceFromAds { automaton } => Report::document(Document::Nfa(
            nonemptiness_to_nrr(&load(&automaton, parse_ads)?)?,
        )),
        NrrCommand::ReduceToAds {
            automaton,
            filter: name,
        } => {
            let a = load(&automaton, parse_nfa)?;
            let Filter::Protocol(o) = filter(&name, common)? else {
                return Err(CliError::Usage(format!(
                    "`{name}` is not a protocol filter"
                )));
            };
            Report::document(Document::Ads(nrr_to_nonemptiness(&a, o.alphabet())?))
        }
        NrrCommand::MemberToReg { automaton, word } => {
            let m = load(&automaton, parse_ads)?;
            Report::document(Document::Dfa(membership_to_reg(&m, &word_arg(&word))?))
        }
        NrrCommand::FilterTransfer { automaton, fst } => {
            let a = load(&automaton, parse_nfa)?;
            let t = load(&fst, parse_fst)?;
            Report::document(Document::Nfa(filter_transfer(&a, &t)?))
        }
    })
}

fn logtm_command(cmd: LogtmCommand, common: &Common) -> Res<Report> {
    Ok(match cmd {
        LogtmCommand::Run {
            machine,
            input,
            advice,
            oracle: name,
            steps,
        } => {
            let tm = load(&machine, parse_logtm)?;
            let x = word_arg(&input);
            let v = match name {
                Some(name) => run_with_protocol(&tm, &x, &oracle(&name, common)?, &common.bounds)?,
                None => run_with_advice(&tm, &x, &word_arg(&advice), steps)?,
            };
            Report::verdict(v, None, json!({"input": show_word(&x)}))
        }
        LogtmCommand::SurfaceNfa {
            machine,
            input,
            cap,
        } => {
            let tm = load(&machine, parse_logtm)?;
            Report::document(Document::Nfa(surface_config_nfa(
                &tm,
                &word_arg(&input),
                cap,
            )?))
        }
        LogtmCommand::LambdaElim { automaton } => {
            let d = load(&automaton, parse_dfa)?;
            Report::document(Document::Dfa(lambda_eliminate(&d, LAMBDA)?))
        }
    })
}

fn universality_command(cmd: UniversalityCommand, common: &Common) -> Res<Report> {
    let wc = WConstruction::new();
    Ok(match cmd {
        UniversalityCommand::Decide { automaton } => {
            let a = load(&automaton, parse_nfa)?;
            let x = x_oracle(common)?;
            let ans = universality_decide(&a, x.as_ref(), &wc)?;
            Report::verdict(
                Verdict::from_bool(ans.nonempty),
                Some(format!("oracle-calls: {}", ans.oracle_calls)),
                json!({"oracle_calls": ans.oracle_calls}),
            )
        }
        UniversalityCommand::Lmember { word } => {
            let x = x_oracle(common)?;
            let inside = l_membership(&word, x.as_ref(), &wc)?;
            Report::verdict(Verdict::from_bool(inside), None, json!({"word": word}))
        }
        UniversalityCommand::Wparams { a, b, c } => {
            let e = wc.params(&a, &b, &c)?;
            let mut r = Report::new(0);
            r.line(
                e.to_string(),
                json!({
                    "a": e.a, "b": e.b, "c": e.c, "r": e.r, "q": e.q,
                    "len_r": e.even_len(), "len_q": e.odd_len(),
                }),
            );
            r
        }
        UniversalityCommand::Forward { word } => {
            let p = forward_reduce(&word);
            let mut r = Report::new(0);
            r.line(compact(&p), json!({"x": word, "protocol": show_word(&p)}));
            r
        }
    })
}

/// Parses `argv` (program name first), runs the command and writes its
/// report. Returns the process exit code: 0 yes or success, 1 no, 2 unknown,
/// 3 usage errors and 4 input or construction errors.
pub fn run_cli<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let format = cli.common.format;
    match run_command(cli.command, &cli.common).and_then(|r| r.render(format).map(|t| (r.code, t)))
    {
        Ok((code, text)) => {
            let _ = out.write_all(text.as_bytes());
            code
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.code()
        }
    }
}

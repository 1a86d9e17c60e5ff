mod io;
mod spec;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use iufst::convert::{sweep_reduce, to_min_dfa, to_nfa};
use iufst::decide::{
    distinguishing_word, inclusion_counterexample, is_empty, is_finite, is_universal, DecideError,
    DecideOptions,
};
use iufst::hierarchy::{build_lf, combine_add, combine_mul, measure_sweep_growth};
use iufst::lba::{compile_lba, run_lba};
use iufst::machine::split_word;
use iufst::oracle::{compare_languages, compare_on, Acceptor, Bounded, OracleError, Predicate};
use iufst::run::{find_accepting_trace, run, run_deterministic, DEFAULT_TAPE_CAP};
use iufst::textio::MachineFile;
use iufst::Transducer;

use spec::{CtorSpec, FamilySpec};

#[derive(Parser)]
#[command(
    name = "iufst",
    version,
    about = "Iterated uniform finite-state transducers"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a machine on one word.
    Run {
        #[arg(short, long)]
        machine: PathBuf,
        /// Symbols separated by `,`; unseparated when every symbol is one character.
        #[arg(short, long, allow_hyphen_values = true)]
        word: String,
        /// Defaults to the declared constant bound.
        #[arg(long)]
        max_sweeps: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_TAPE_CAP)]
        tape_cap: usize,
        /// Print one tape per sweep boundary.
        #[arg(long)]
        trace: bool,
    },
    /// Convert a machine to another model.
    Convert {
        #[arg(short, long)]
        machine: PathBuf,
        /// nfa, dfa, min-dfa or reduce:I.
        #[arg(long)]
        to: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Decide a language property.
    Decide {
        question: Question,
        #[arg(short, long)]
        machine: PathBuf,
        /// Second machine, for equiv and subset.
        #[arg(short = 'n', long)]
        other: Option<PathBuf>,
        #[arg(long, default_value_t = DecideOptions::default().dfa_state_cap)]
        dfa_cap: usize,
    },
    /// Generate a witness machine: block:K, block-nfa:K, unary:N,K, e:N,K,
    /// copy, uexpo, d[:K], id-ctor[:SYM] or expo-ctor[:SYM].
    Gen {
        family: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Combine two constructors (id[:SYM] or expo[:SYM]).
    Combine {
        op: CombineOp,
        #[arg(long)]
        left: CtorSpec,
        #[arg(long)]
        right: CtorSpec,
        /// Emit the acceptor of u$u v with |v| = f(|u$u|) instead of the constructor.
        #[arg(long)]
        lf: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Linear bounded automata.
    Lba {
        #[command(subcommand)]
        command: LbaCommand,
    },
    /// Compare a witness family against its membership predicate.
    Verify {
        #[arg(long)]
        lang: FamilySpec,
        #[arg(long)]
        max_len: usize,
        /// Sweep limit for machines without a constant bound.
        #[arg(long)]
        max_sweeps: Option<usize>,
    },
    /// Sweep counts on a growing family of accepted words, as CSV.
    Measure {
        /// uexpo, copy, unary:N,K, d, id-ctor[:SYM] or expo-ctor[:SYM].
        family: String,
        #[arg(long, default_value_t = 1)]
        from: usize,
        #[arg(long, default_value_t = 6)]
        to: usize,
        #[arg(long, default_value_t = 200)]
        max_sweeps: usize,
    },
}

#[derive(Subcommand)]
enum LbaCommand {
    /// Compile to an equivalent iterated transducer.
    Compile {
        #[arg(short, long)]
        machine: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run the configuration search on one word.
    Run {
        #[arg(short, long)]
        machine: PathBuf,
        #[arg(short, long, allow_hyphen_values = true)]
        word: String,
        #[arg(long, default_value_t = 1 << 20)]
        max_steps: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Question {
    Empty,
    Finite,
    Universal,
    Equiv,
    Subset,
}

#[derive(Clone, Copy, ValueEnum)]
enum CombineOp {
    Add,
    Mul,
}

/// Exit status of a successful command.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Verdict {
    Yes,
    No,
    Unknown,
}

impl From<bool> for Verdict {
    fn from(b: bool) -> Self {
        if b {
            Verdict::Yes
        } else {
            Verdict::No
        }
    }
}

impl From<Verdict> for ExitCode {
    fn from(v: Verdict) -> Self {
        ExitCode::from(match v {
            Verdict::Yes => 0,
            Verdict::No => 1,
            Verdict::Unknown => 3,
        })
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(v) => v.into(),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(cmd: Command) -> Result<Verdict> {
    match cmd {
        Command::Run {
            machine,
            word,
            max_sweeps,
            tape_cap,
            trace,
        } => cmd_run(
            &io::load_transducer(&machine)?,
            &word,
            max_sweeps,
            tape_cap,
            trace,
        ),
        Command::Convert {
            machine,
            to,
            output,
        } => cmd_convert(&machine, &to, output.as_ref()),
        Command::Decide {
            question,
            machine,
            other,
            dfa_cap,
        } => cmd_decide(
            question,
            &machine,
            other.as_ref(),
            DecideOptions {
                dfa_state_cap: dfa_cap,
            },
        ),
        Command::Gen { family, output } => {
            let m = if family.starts_with("id") || family.starts_with("expo") {
                MachineFile::transducer(family.parse::<CtorSpec>()?.build()?.machine)
            } else {
                family.parse::<FamilySpec>()?.machine()?
            };
            io::save(&m, output.as_ref())?;
            Ok(Verdict::Yes)
        }
        Command::Combine {
            op,
            left,
            right,
            lf,
            output,
        } => {
            let (l, r) = (left.build()?, right.build()?);
            let c = match op {
                CombineOp::Add => combine_add(&l, &r)?,
                CombineOp::Mul => combine_mul(&l, &r)?,
            };
            eprintln!("f(m) = {}", c.f);
            let t = if lf { build_lf(&c)? } else { c.machine };
            io::save(&MachineFile::transducer(t), output.as_ref())?;
            Ok(Verdict::Yes)
        }
        Command::Lba { command } => cmd_lba(command),
        Command::Verify {
            lang,
            max_len,
            max_sweeps,
        } => cmd_verify(&lang, max_len, max_sweeps),
        Command::Measure {
            family,
            from,
            to,
            max_sweeps,
        } => cmd_measure(&family, from, to, max_sweeps),
    }
}

fn parse_word(t: &Transducer, text: &str) -> Result<Vec<iufst::SymbolId>> {
    Ok(t.parse_word(text)?)
}

fn cmd_run(
    t: &Transducer,
    word: &str,
    max_sweeps: Option<usize>,
    cap: usize,
    trace: bool,
) -> Result<Verdict> {
    let w = parse_word(t, word)?;
    let Some(max) = max_sweeps.or(t.constant_sweeps()) else {
        bail!("the machine declares no constant bound; pass --max-sweeps");
    };
    let r = run(t, &w, max, cap)?;
    if trace {
        let tapes = if r.accepted {
            find_accepting_trace(t, &w, max, cap)?.unwrap_or_default()
        } else if t.is_deterministic() {
            run_deterministic(t, &w, max)?.trace
        } else {
            Vec::new()
        };
        for tape in &tapes {
            println!("{}", t.tape_names(tape).join(" "));
        }
    }
    if r.cap_hit {
        println!("unknown: tape cap hit after {} tapes", r.tapes_explored);
        return Ok(Verdict::Unknown);
    }
    match r.min_accept_sweeps {
        Some(s) => println!("accepted sweeps={s}"),
        None => println!("rejected"),
    }
    Ok(r.accepted.into())
}

fn cmd_convert(path: &Path, to: &str, out: Option<&PathBuf>) -> Result<Verdict> {
    let m = io::load(path)?;
    let result = match (to, &m) {
        ("nfa", MachineFile::Nfa(_)) => m.clone(),
        ("nfa", MachineFile::Dfa(d)) => MachineFile::Nfa(d.to_nfa()),
        ("dfa", MachineFile::Nfa(n)) => MachineFile::Dfa(n.determinize()),
        ("min-dfa", MachineFile::Nfa(n)) => MachineFile::Dfa(n.determinize().minimize()),
        ("dfa", MachineFile::Dfa(_)) => m.clone(),
        ("min-dfa", MachineFile::Dfa(d)) => MachineFile::Dfa(d.minimize()),
        (_, MachineFile::Lba(_)) => bail!("use `lba compile` for linear bounded automata"),
        _ => {
            let t = m.as_transducer().context("not a transducer")?;
            match to {
                "nfa" => MachineFile::Nfa(to_nfa(t)?),
                "dfa" => MachineFile::Dfa(to_nfa(t)?.determinize()),
                "min-dfa" => MachineFile::Dfa(to_min_dfa(t)?),
                _ => {
                    let Some(i) = to.strip_prefix("reduce:") else {
                        bail!("unknown target `{to}` (expected nfa, dfa, min-dfa or reduce:I)");
                    };
                    let i: usize = i
                        .parse()
                        .with_context(|| format!("bad reduction factor `{i}`"))?;
                    let r = sweep_reduce(t, i)?;
                    eprintln!(
                        "states={} universe={}",
                        r.machine.num_states(),
                        r.universe_states
                    );
                    MachineFile::transducer(r.machine)
                }
            }
        }
    };
    io::save(&result, out)?;
    Ok(Verdict::Yes)
}

fn show(w: &[String]) -> String {
    if w.is_empty() {
        "(empty word)".to_string()
    } else {
        w.join(",")
    }
}

fn cmd_decide(
    q: Question,
    path: &Path,
    other: Option<&PathBuf>,
    opts: DecideOptions,
) -> Result<Verdict> {
    let t = io::load_transducer(path)?;
    let second = || -> Result<Transducer> {
        io::load_transducer(other.context("this question needs a second machine (-n)")?)
    };
    let answer: Result<(bool, Option<Vec<String>>), DecideError> = match q {
        Question::Empty => is_empty(&t).map(|b| (b, None)),
        Question::Finite => is_finite(&t).map(|b| (b, None)),
        Question::Universal => is_universal(&t, opts).map(|b| (b, None)),
        Question::Equiv => distinguishing_word(&t, &second()?, opts).map(|w| (w.is_none(), w)),
        Question::Subset => {
            inclusion_counterexample(&t, &second()?, opts).map(|w| (w.is_none(), w))
        }
    };
    match answer {
        Ok((b, witness)) => {
            println!("{b}");
            if let Some(w) = witness {
                println!("counterexample: {}", show(&w));
            }
            Ok(b.into())
        }
        Err(DecideError::Budget(cap)) => {
            println!("unknown: more than {cap} subset states");
            Ok(Verdict::Unknown)
        }
        Err(e) => Err(e.into()),
    }
}

fn cmd_lba(cmd: LbaCommand) -> Result<Verdict> {
    match cmd {
        LbaCommand::Compile { machine, output } => {
            let m = io::load_lba(&machine)?;
            let c = compile_lba(&m)?;
            io::save(&MachineFile::transducer(c.machine), output.as_ref())?;
            Ok(Verdict::Yes)
        }
        LbaCommand::Run {
            machine,
            word,
            max_steps,
        } => {
            let m = io::load_lba(&machine)?;
            let names = split_word(&word, &m.input_names());
            let w = m.word(&names)?;
            let r = run_lba(&m, &w, max_steps)?;
            match r.steps_to_accept {
                Some(s) => println!("accepted steps={s}"),
                None if r.halted => println!("rejected"),
                None => {
                    println!("unknown: step budget exhausted");
                    return Ok(Verdict::Unknown);
                }
            }
            Ok(r.accepted.into())
        }
    }
}

fn cmd_verify(lang: &FamilySpec, max_len: usize, max_sweeps: Option<usize>) -> Result<Verdict> {
    let m = lang.machine()?;
    let pred = Predicate(|w: &[&str]| lang.contains(w));
    let fallback = max_sweeps.unwrap_or((max_len + 2).max(lang.corpus_sweeps()));
    let acceptor: Box<dyn Acceptor + '_> = match &m {
        MachineFile::Nfa(n) => Box::new(n.clone()),
        _ => Box::new(Bounded::new(
            m.as_transducer().context("not a transducer")?,
            fallback,
        )),
    };
    let corpus = lang.corpus();
    let outcome =
        compare_languages(acceptor.as_ref(), &pred, lang.alphabet(), max_len).and_then(|mut d| {
            compare_on(acceptor.as_ref(), &pred, &corpus).map(|e| {
                d.extend(e);
                d
            })
        });
    let diffs = match outcome {
        Ok(d) => d,
        Err(OracleError::CapHit(w)) => {
            println!("unknown: tape cap hit on {w}");
            return Ok(Verdict::Unknown);
        }
        Err(e) => return Err(e.into()),
    };
    for w in diffs.iter().take(20) {
        println!("disagree: {}", show(w));
    }
    println!(
        "{}: max-len {max_len}, {} extra words, {} disagreements",
        lang.0.family,
        corpus.len(),
        diffs.len()
    );
    Ok(diffs.is_empty().into())
}

fn cmd_measure(family: &str, from: usize, to: usize, max_sweeps: usize) -> Result<Verdict> {
    let rows = if family.starts_with("id") || family.starts_with("expo") {
        let c = family.parse::<CtorSpec>()?.build()?;
        measure_sweep_growth(&c.machine, |m| c.witness(m), from..=to, max_sweeps)
    } else {
        let spec: FamilySpec = family.parse()?;
        let t = match spec.machine()? {
            MachineFile::Niufst(t) | MachineFile::Iufst(t) => t,
            _ => bail!("{family} is not a transducer family"),
        };
        let words = (from..=to)
            .map(|p| spec.growth_word(p))
            .collect::<Result<Vec<_>>>()?;
        measure_sweep_growth(&t, |p| words[p - from].clone(), from..=to, max_sweeps)
    };
    println!("param,length,sweeps");
    for r in &rows {
        let s = r.sweeps.map(|s| s.to_string()).unwrap_or_default();
        println!("{},{},{s}", r.param, r.length);
    }
    Ok(Verdict::Yes)
}

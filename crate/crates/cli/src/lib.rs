//! Command-line front end for the rational-verification engine.

pub mod game_file;
pub mod witness;

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use rv_core::engine::{
    a_nash, e_nash, non_emptiness, synthesize_profile, Options, Punishment, Specification, Verdict,
};
use rv_core::formula::{negate_to_ltl, parse_gr1, parse_ltl};
use rv_core::model::Game;
use rv_core::oracle::{brute_e_nash, OracleConfig};
use rv_core::welfare::{approx_opt_welfare, welfare_threshold, Direction, Measure, Mode, WelfareError, WelfareQuery};
use rv_core::Rational;

use crate::game_file::parse_game_file;
use crate::witness::{revalidate, transducer_docs, WitnessDocument};

pub const EXIT_YES: i32 = 0;
pub const EXIT_NO: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_LIMIT: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "rv", version, about = "Rational verification of concurrent games")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Is there a Nash equilibrium whose run satisfies the specification?
    ENash(QueryArgs),
    /// Does every Nash equilibrium run satisfy the specification?
    ANash(QueryArgs),
    /// Is there any Nash equilibrium?
    NonEmptiness(CommonArgs),
    /// Is there an equilibrium whose social welfare meets a threshold?
    Welfare(WelfareArgs),
    /// Approximate the best or worst equilibrium welfare.
    WelfareOpt(OptArgs),
    #[command(hide = true)]
    Oracle(SpecArgs),
    #[command(hide = true)]
    CheckWitness(CheckArgs),
}

#[derive(Args, Debug)]
struct SpecArgs {
    #[arg(long)]
    game: PathBuf,
    /// Formula text, or @FILE to read it from a file.
    #[arg(long, default_value = "true")]
    spec: String,
    #[arg(long, value_enum)]
    spec_lang: Option<SpecLang>,
}

#[derive(Args, Debug)]
struct OutputArgs {
    /// Write the witness document here instead of standard output.
    #[arg(long)]
    witness: Option<PathBuf>,
    /// Include synthesised strategies in the witness.
    #[arg(long)]
    synthesize: bool,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

#[derive(Args, Debug)]
struct QueryArgs {
    #[command(flatten)]
    spec: SpecArgs,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args, Debug)]
struct CommonArgs {
    #[arg(long)]
    game: PathBuf,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args, Debug)]
struct WelfareArgs {
    #[command(flatten)]
    spec: SpecArgs,
    #[command(flatten)]
    out: OutputArgs,
    #[arg(long, value_enum)]
    measure: MeasureArg,
    #[arg(long, value_enum, default_value = "ge")]
    dir: DirArg,
    #[arg(long)]
    threshold: String,
}

#[derive(Args, Debug)]
struct OptArgs {
    #[command(flatten)]
    spec: SpecArgs,
    #[arg(long, value_enum)]
    measure: MeasureArg,
    #[arg(long, value_enum)]
    mode: ModeArg,
    #[arg(long)]
    eps: String,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

#[derive(Args, Debug)]
struct CheckArgs {
    #[command(flatten)]
    spec: SpecArgs,
    /// Witness document to re-check.
    #[arg(long)]
    witness: PathBuf,
    /// The document is an A-Nash counterexample: check it against the negation.
    #[arg(long)]
    negate: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum SpecLang {
    Gr1,
    Ltl,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum MeasureArg {
    Usw,
    Esw,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum DirArg {
    Ge,
    Le,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum ModeArg {
    Max,
    Min,
}

impl From<MeasureArg> for Measure {
    fn from(m: MeasureArg) -> Measure {
        match m {
            MeasureArg::Usw => Measure::Utilitarian,
            MeasureArg::Esw => Measure::Egalitarian,
        }
    }
}

/// A failure with its exit code.
#[derive(Debug)]
struct Failure {
    code: i32,
    msg: String,
}

fn usage(msg: impl ToString) -> Failure {
    Failure {
        code: EXIT_USAGE,
        msg: msg.to_string(),
    }
}

fn limit(msg: impl ToString) -> Failure {
    Failure {
        code: EXIT_LIMIT,
        msg: msg.to_string(),
    }
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    usage(format!("{}: {e}", path.display()))
}

fn load(args: &SpecArgs) -> Result<(Game, Specification), Failure> {
    let game = parse_game_file(&args.game).map_err(usage)?;
    let spec = load_spec(&game, &args.spec, args.spec_lang)?;
    Ok((game, spec))
}

fn load_spec(game: &Game, text: &str, lang: Option<SpecLang>) -> Result<Specification, Failure> {
    let text = match text.strip_prefix('@') {
        Some(path) => std::fs::read_to_string(path).map_err(|e| io_failure(Path::new(path), e))?,
        None => text.to_string(),
    };
    let atoms = game.arena.atoms();
    match lang {
        Some(SpecLang::Gr1) => parse_gr1(&text, atoms).map(Specification::Gr1).map_err(usage),
        Some(SpecLang::Ltl) => parse_ltl(&text, atoms).map(Specification::Ltl).map_err(usage),
        None => match parse_gr1(&text, atoms) {
            Ok(g) => Ok(Specification::Gr1(g)),
            Err(_) => parse_ltl(&text, atoms).map(Specification::Ltl).map_err(usage),
        },
    }
}

fn rational_arg(text: &str, what: &str) -> Result<Rational, Failure> {
    text.parse().map_err(|_| usage(format!("{what} must be INT or INT/INT, got '{text}'")))
}

/// Prints the verdict and the witness document; returns the exit code.
fn report(
    query: &str,
    game: &Game,
    verdict: &Verdict,
    out_args: &OutputArgs,
    out: &mut dyn Write,
) -> Result<i32, Failure> {
    let witness = verdict.witness.as_ref();
    let demanded = out_args.witness.is_some() || out_args.synthesize;
    if verdict.witness_gap.is_some() && demanded {
        writeln!(out, "{}", if verdict.answer { "YES" } else { "NO" }).ok();
        return Err(limit("an equilibrium exists but no witness cycle could be built"));
    }
    let mut doc = WitnessDocument::new(query, game, verdict, witness);
    if out_args.synthesize {
        if let Some(w) = witness {
            let profile = synthesize_profile(game, Some(w), &Punishment::compute(game)).map_err(limit)?;
            doc.transducers = Some(transducer_docs(game, &profile));
        }
    }
    let json = serde_json::to_string_pretty(&doc).expect("serialisable document");
    writeln!(out, "{}", if verdict.answer { "YES" } else { "NO" }).ok();
    match &out_args.witness {
        Some(path) => std::fs::write(path, format!("{json}\n")).map_err(|e| io_failure(path, e))?,
        None => {
            writeln!(out, "{json}").ok();
        }
    }
    Ok(if verdict.answer { EXIT_YES } else { EXIT_NO })
}

fn options(jobs: usize) -> Result<Options, Failure> {
    if jobs == 0 {
        return Err(usage("--jobs must be at least 1"));
    }
    Ok(Options { jobs })
}

fn dispatch(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Failure> {
    match cli.command {
        Command::ENash(a) => {
            let (game, spec) = load(&a.spec)?;
            let v = e_nash(&game, &spec, options(a.out.jobs)?);
            report("e-nash", &game, &v, &a.out, out)
        }
        Command::ANash(a) => {
            let (game, spec) = load(&a.spec)?;
            let v = a_nash(&game, &spec, options(a.out.jobs)?);
            report("a-nash", &game, &v, &a.out, out)
        }
        Command::NonEmptiness(a) => {
            let game = parse_game_file(&a.game).map_err(usage)?;
            let v = non_emptiness(&game, options(a.out.jobs)?);
            report("non-emptiness", &game, &v, &a.out, out)
        }
        Command::Welfare(a) => {
            let (game, spec) = load(&a.spec)?;
            let q = WelfareQuery {
                measure: a.measure.into(),
                direction: match a.dir {
                    DirArg::Ge => Direction::AtLeast,
                    DirArg::Le => Direction::AtMost,
                },
                threshold: rational_arg(&a.threshold, "--threshold")?,
                spec,
            };
            let v = welfare_threshold(&game, &q, options(a.out.jobs)?).map_err(usage)?;
            report("welfare", &game, &v, &a.out, out)
        }
        Command::WelfareOpt(a) => {
            let (game, spec) = load(&a.spec)?;
            let eps = rational_arg(&a.eps, "--eps")?;
            let mode = match a.mode {
                ModeArg::Max => Mode::Max,
                ModeArg::Min => Mode::Min,
            };
            match approx_opt_welfare(&game, &spec, a.measure.into(), mode, &eps, options(a.jobs)?) {
                Ok(r) => {
                    writeln!(out, "{}", r.value).ok();
                    writeln!(err, "threshold calls: {}", r.threshold_calls).ok();
                    Ok(EXIT_YES)
                }
                Err(WelfareError::NoEquilibrium) => {
                    writeln!(out, "NO").ok();
                    writeln!(err, "no equilibrium satisfies the specification").ok();
                    Ok(EXIT_NO)
                }
                Err(e) => Err(usage(e)),
            }
        }
        Command::Oracle(a) => {
            let (game, spec) = load(&a)?;
            let yes = brute_e_nash(&game, &spec, &OracleConfig::default()).map_err(limit)?;
            writeln!(out, "{}", if yes { "YES" } else { "NO" }).ok();
            Ok(if yes { EXIT_YES } else { EXIT_NO })
        }
        Command::CheckWitness(a) => {
            let (game, spec) = load(&a.spec)?;
            let spec = if a.negate {
                Specification::Ltl(negate_to_ltl(&spec.to_ltl()))
            } else {
                spec
            };
            let text = std::fs::read_to_string(&a.witness).map_err(|e| io_failure(&a.witness, e))?;
            let doc: WitnessDocument = serde_json::from_str(&text).map_err(usage)?;
            match revalidate(&game, &spec, &doc) {
                Ok(_) => {
                    writeln!(out, "VALID").ok();
                    Ok(EXIT_YES)
                }
                Err(e) => {
                    writeln!(out, "INVALID").ok();
                    writeln!(err, "{e}").ok();
                    Ok(EXIT_NO)
                }
            }
        }
    }
}

/// Runs the tool on `args` (including the program name) and returns the
/// exit code. Diagnostics go to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_YES };
            let text = e.render().to_string();
            if e.use_stderr() {
                write!(err, "{text}").ok();
            } else {
                write!(out, "{text}").ok();
            }
            return code;
        }
    };
    match dispatch(cli, out, err) {
        Ok(code) => code,
        Err(f) => {
            writeln!(err, "error: {}", f.msg).ok();
            f.code
        }
    }
}

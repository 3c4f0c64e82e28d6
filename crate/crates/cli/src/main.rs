//! `cattsu`: check, normalize, compare and rehydrate `.catt` files.
//!
//! Exit status is 0 on success or equality, 1 on a semantic failure or
//! inequality, 2 on usage, parse or I/O errors.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use cattsu::frontend::{Definition, Environment, LoadError, Session, PRELUDE};
use cattsu::reduction::{decide_eq, normalize_traced, ReductionError, DEFAULT_FUEL};
use cattsu::rehydrate::{RehydrateError, Rehydrator};
use cattsu::typing::{Checker, Mode, DEFAULT_MAX_DIM};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use thiserror::Error;

#[derive(Parser)]
#[command(name = "cattsu", version, about = "Type checker and normalizer for Catt and Catt_su")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Definitional equality: `su` compares normal forms, `catt` is syntactic.
    #[arg(long, value_enum, default_value_t = ModeArg::Su, global = true)]
    mode: ModeArg,
    /// Maximum number of reduction steps for a single normalization.
    #[arg(long, default_value_t = DEFAULT_FUEL, global = true)]
    fuel: u64,
    /// Maximum dimension of any context.
    #[arg(long, default_value_t = DEFAULT_MAX_DIM, global = true)]
    max_dim: usize,
    /// Machine-readable output, one JSON object per line.
    #[arg(long, global = true)]
    json: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Su,
    Catt,
}

#[derive(Subcommand)]
enum Command {
    /// Check every declaration of the given files.
    Check {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Print the normal form of a definition.
    Normalize {
        file: PathBuf,
        name: String,
        /// Print every reduction step.
        #[arg(long)]
        trace: bool,
    },
    /// Decide whether two definitions over the same context are equal.
    Eq { file: PathBuf, first: String, second: String },
    /// Print a Catt term equal in Catt_su to the given definition.
    Rehydrate { file: PathBuf, name: String },
}

#[derive(Debug, Error)]
enum Failure {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Semantic(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Semantic(_) => 1,
            Failure::Usage(_) => 2,
        }
    }
}

fn load_error(path: &Path, e: LoadError) -> Failure {
    let msg = format!("{}:{e}", path.display());
    match e {
        LoadError::Parse(_) => Failure::Usage(msg),
        LoadError::Elab(_) => Failure::Semantic(msg),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

/// The environment with the prelude loaded, read from `CATTSU_PRELUDE` if set.
fn prelude(cli: &Cli) -> Result<Environment, Failure> {
    let mode = match cli.mode {
        ModeArg::Su => Mode::CattSu,
        ModeArg::Catt => Mode::Catt,
    };
    let mut session = Environment::with_limits(mode, cli.max_dim, cli.fuel).session();
    match std::env::var_os("CATTSU_PRELUDE") {
        Some(path) => {
            let path = PathBuf::from(path);
            let src = read(&path)?;
            session.load(&src).map_err(|e| load_error(&path, e))?;
        }
        None => {
            session.load(PRELUDE).map_err(|e| load_error(Path::new("<prelude>"), e))?;
        }
    }
    Ok(session.env)
}

fn load(env: &Environment, path: &Path) -> Result<(Session, Vec<String>), Failure> {
    let src = read(path)?;
    let mut session = env.clone().session();
    let names = session.load(&src).map_err(|e| load_error(path, e))?;
    Ok((session, names))
}

fn lookup<'a>(session: &'a Session, name: &str) -> Result<&'a Definition, Failure> {
    session.env.get(name).ok_or_else(|| Failure::Usage(format!("unknown name '{name}'")))
}

fn json_line(value: &impl Serialize) {
    println!("{}", serde_json::to_string(value).expect("serializable"));
}

#[derive(Serialize)]
struct CheckReport<'a> {
    file: String,
    ok: bool,
    definitions: &'a [String],
    error: Option<String>,
}

fn check(cli: &Cli, files: &[PathBuf]) -> Result<(), Failure> {
    let env = prelude(cli)?;
    let results: Vec<Result<Vec<String>, Failure>> = std::thread::scope(|scope| {
        let handles: Vec<_> = files
            .iter()
            .map(|f| {
                let env = &env;
                scope.spawn(move || load(env, f).map(|(_, names)| names))
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("checker thread panicked")).collect()
    });
    let mut worst: Option<Failure> = None;
    for (file, result) in files.iter().zip(results) {
        let file = file.display().to_string();
        match &result {
            Ok(names) if cli.json => json_line(&CheckReport { file, ok: true, definitions: names, error: None }),
            Ok(names) => println!("{file}: ok ({} definitions)", names.len()),
            Err(e) if cli.json => {
                json_line(&CheckReport { file, ok: false, definitions: &[], error: Some(e.to_string()) })
            }
            Err(e) => eprintln!("{e}"),
        }
        if let Err(e) = result {
            if worst.as_ref().is_none_or(|w| e.code() > w.code()) {
                worst = Some(e);
            }
        }
    }
    match worst {
        Some(Failure::Usage(_)) => Err(Failure::Usage(String::new())),
        Some(Failure::Semantic(_)) => Err(Failure::Semantic(String::new())),
        None => Ok(()),
    }
}

#[derive(Serialize)]
struct StepRecord {
    index: usize,
    rule: String,
    locus: String,
    result: String,
    redex: String,
}

#[derive(Serialize)]
struct NormalForm {
    name: String,
    normal_form: String,
    coherence_count: usize,
    input_coherence_count: usize,
    steps: usize,
}

fn normalize(cli: &Cli, file: &Path, name: &str, trace: bool) -> Result<(), Failure> {
    let env = prelude(cli)?;
    let (session, _) = load(&env, file)?;
    let def = lookup(&session, name)?;
    let (nf, steps) =
        normalize_traced(&def.term, cli.fuel).map_err(|e: ReductionError| Failure::Semantic(e.to_string()))?;
    let printer = session.env.printer();
    if trace {
        for (i, (step, result)) in steps.iter().enumerate() {
            let record = StepRecord {
                index: i + 1,
                rule: step.rule.to_string(),
                locus: step.locus.to_string(),
                result: printer.term(&def.ctx, result),
                redex: step.contraction.to_string(),
            };
            if cli.json {
                json_line(&record);
            } else {
                let locus = if record.locus.is_empty() { "." } else { &record.locus };
                println!("{:>4} {:<2} {:<12} {}  {}", record.index, record.rule, locus, record.redex, record.result);
            }
        }
    }
    let printed = printer.term(&def.ctx, &nf);
    if cli.json {
        json_line(&NormalForm {
            name: name.to_string(),
            normal_form: printed,
            coherence_count: nf.coherence_count(),
            input_coherence_count: def.term.coherence_count(),
            steps: steps.len(),
        });
    } else {
        println!("{printed}");
    }
    Ok(())
}

#[derive(Serialize)]
struct Equality<'a> {
    first: &'a str,
    second: &'a str,
    equal: bool,
}

fn eq(cli: &Cli, file: &Path, first: &str, second: &str) -> Result<(), Failure> {
    let env = prelude(cli)?;
    let (session, _) = load(&env, file)?;
    let (a, b) = (lookup(&session, first)?, lookup(&session, second)?);
    if a.ctx != b.ctx {
        return Err(Failure::Usage(format!("'{first}' and '{second}' are declared over different contexts")));
    }
    let mut checker = session.env.checker();
    let equal = checker.convertible_terms(&a.term, &b.term).map_err(|e| Failure::Semantic(e.to_string()))?;
    if cli.json {
        json_line(&Equality { first, second, equal });
    } else {
        println!("{}", if equal { "equal" } else { "not equal" });
    }
    if equal {
        Ok(())
    } else {
        Err(Failure::Semantic(String::new()))
    }
}

#[derive(Serialize)]
struct Rehydrated {
    name: String,
    term: String,
    coherence_count: usize,
    catt_valid: bool,
    equal: bool,
}

fn rehydrate(cli: &Cli, file: &Path, name: &str) -> Result<(), Failure> {
    let env = prelude(cli)?;
    let (session, _) = load(&env, file)?;
    let def = lookup(&session, name)?;
    let mut r = Rehydrator::new(cli.fuel);
    let term = r
        .rehydrated_normal_form(&def.ctx, &def.term)
        .map_err(|e: RehydrateError| Failure::Semantic(format!("{name}: {e}")))?;
    let catt_valid = Checker::with_limits(Mode::Catt, cli.max_dim, cli.fuel).check_term(&def.ctx, &term).is_ok();
    let equal = decide_eq(&def.term, &term).map_err(|e| Failure::Semantic(e.to_string()))?;
    let printed = session.env.printer().term(&def.ctx, &term);
    if cli.json {
        json_line(&Rehydrated {
            name: name.to_string(),
            term: printed,
            coherence_count: term.coherence_count(),
            catt_valid,
            equal,
        });
    } else {
        println!("{printed}");
        println!("catt check: {}", if catt_valid { "ok" } else { "failed" });
        println!("equal in catt_su: {}", if equal { "yes" } else { "no" });
    }
    if catt_valid && equal {
        Ok(())
    } else {
        Err(Failure::Semantic(format!("{name}: verification failed")))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Check { files } => check(&cli, files),
        Command::Normalize { file, name, trace } => normalize(&cli, file, name, *trace),
        Command::Eq { file, first, second } => eq(&cli, file, first, second),
        Command::Rehydrate { file, name } => rehydrate(&cli, file, name),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let msg = e.to_string();
            if !msg.is_empty() {
                eprintln!("error: {msg}");
            }
            ExitCode::from(e.code())
        }
    }
}

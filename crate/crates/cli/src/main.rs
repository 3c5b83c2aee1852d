use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use frob_core::catalog::resolve_law;
use frob_core::derivation::{
    check_all, load_derivation, semantic_cross_check, Derivation, DerivationError, LemmaDb,
};
use frob_core::model::RelModel;
use frob_core::portgraph::PortGraph;
use frob_core::report;
use frob_core::search::{
    check_model_correspondence, enumerate_models, enumerate_morphisms, find_counterexample, SearchOptions,
};
use frob_core::semantics::{eval, holds, model_laws};
use frob_core::syntax::{parse_law, parse_term, parse_theory, print_theory};
use frob_core::term::{typecheck, Generator};
use frob_core::theory::{Law, Theory, TheoryKind};

#[derive(Parser)]
#[command(name = "frob", version, about = "Frobenius theories, string diagrams and their relational models")]
struct Cli {
    /// Write machine output to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for model search and derivation checking.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    /// Seed for the order in which work is handed to workers.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a theory, a term or a file and print what was read.
    Parse {
        #[arg(long)]
        theory: Option<String>,
        #[arg(long)]
        term: Option<String>,
        /// A `.thy` theory file or a `.drv` derivation file.
        #[arg(long)]
        file: Option<PathBuf>,
    },
    /// Evaluate a term in a model.
    Eval {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        term: String,
        #[arg(long)]
        theory: Option<String>,
    },
    /// Check every law of a theory in a model.
    CheckModel {
        #[arg(long)]
        theory: String,
        #[arg(long)]
        model: PathBuf,
    },
    /// List all models up to a carrier size.
    Enumerate {
        #[arg(long)]
        theory: String,
        #[arg(long)]
        max_carrier: usize,
        /// Keep one model per isomorphism class.
        #[arg(long)]
        dedup_iso: bool,
    },
    /// List the morphisms from the first model to the second.
    Morphisms {
        #[arg(long)]
        theory: String,
        /// Give twice: source, then target.
        #[arg(long, num_args = 1, required = true)]
        model: Vec<PathBuf>,
    },
    /// Look for a model of a theory that violates a law.
    Counterexample {
        #[arg(long)]
        theory: String,
        /// A law name, or a statement such as "LHS <= RHS".
        #[arg(long)]
        law: String,
        #[arg(long)]
        max_carrier: usize,
    },
    /// Check derivation files; a directory checks every `.drv` file in it.
    Derive {
        #[arg(long)]
        file: PathBuf,
        /// Also evaluate every step in all models up to this size.
        #[arg(long)]
        max_carrier: Option<usize>,
    },
    /// Compare the algebras of a cartesian theory with its relational models.
    Correspondence {
        #[arg(long)]
        theory: String,
        #[arg(long)]
        max_carrier: usize,
    },
    /// Print the string diagram of a term in Graphviz format.
    Dot {
        #[arg(long)]
        term: String,
        #[arg(long)]
        theory: Option<String>,
    },
}

/// What a command produced: machine output, and whether a property failed.
struct Output {
    text: String,
    violated: bool,
}

impl Output {
    fn records(records: &[Value], violated: bool) -> Self {
        Output {
            text: report::to_lines(records),
            violated,
        }
    }
}

/// Failures that stop a command before it produces a result. All of them
/// exit with status 2.
#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{file}:{message}")]
    Parse { file: String, message: String },
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Other(String),
}

fn other(e: impl std::fmt::Display) -> CliError {
    CliError::Other(e.to_string())
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn load_theory(name: &str) -> Result<Theory, CliError> {
    if let Ok(t) = frob_core::builtins::builtin(name) {
        return Ok(t);
    }
    let path = Path::new(name);
    if !path.exists() {
        return Err(CliError::Usage(format!("`{name}` is neither a built-in theory nor a file")));
    }
    parse_theory(&read(path)?).map_err(|e| CliError::Parse {
        file: name.to_string(),
        message: e.to_string(),
    })
}

fn load_model(path: &Path, theory: Option<&Theory>) -> Result<RelModel, CliError> {
    let value: Value = serde_json::from_str(&read(path)?).map_err(|e| CliError::Parse {
        file: path.display().to_string(),
        message: format!("{}:{}: {e}", e.line(), e.column()),
    })?;
    RelModel::from_json(&value, theory).map_err(|e| CliError::Parse {
        file: path.display().to_string(),
        message: format!(" {e}"),
    })
}

/// A Frobenius signature holding exactly the generators a model interprets.
fn theory_of_model(model: &RelModel) -> Result<Theory, CliError> {
    let mut t = Theory::new("model", TheoryKind::Frobenius);
    for (name, rel) in model.relations() {
        t.declare(Generator::new(name, rel.arity(), rel.coarity())).map_err(other)?;
    }
    Ok(t)
}

fn resolve_cli_law(text: &str, theory: &Theory) -> Result<Law, CliError> {
    let parse_err = |e: frob_core::syntax::ParseError| CliError::Parse {
        file: "--law".to_string(),
        message: e.to_string(),
    };
    if text.contains('=') {
        return parse_law("law", text, theory.signature()).map_err(parse_err);
    }
    if let Some(found) = resolve_law(text, theory) {
        return found.map_err(parse_err);
    }
    if let Some(base) = text.strip_suffix(".converse") {
        if let Some(found) = resolve_law(base, theory) {
            return Ok(found.map_err(parse_err)?.converse());
        }
    }
    Err(CliError::Usage(format!("unknown law `{text}` for theory {}", theory.name())))
}

fn parse_cli_term(text: &str, theory: &Theory) -> Result<frob_core::term::Term, CliError> {
    let term = parse_term(text, theory.signature()).map_err(|e| CliError::Parse {
        file: "--term".to_string(),
        message: e.to_string(),
    })?;
    typecheck(&term, theory.signature()).map_err(other)?;
    Ok(term)
}

fn search_options(cli: &Cli, dedup_iso: bool) -> SearchOptions {
    SearchOptions {
        jobs: cli.jobs,
        seed: cli.seed,
        budget: None,
        dedup_iso,
    }
}

fn run(cli: &Cli) -> Result<Output, CliError> {
    match &cli.command {
        Command::Parse { theory, term, file } => cmd_parse(theory.as_deref(), term.as_deref(), file.as_deref()),
        Command::Eval { model, term, theory } => {
            let theory = theory.as_deref().map(load_theory).transpose()?;
            let m = load_model(model, theory.as_ref())?;
            let theory = match theory {
                Some(t) => t,
                None => theory_of_model(&m)?,
            };
            let t = parse_cli_term(term, &theory)?;
            let rel = eval(&t, &m).map_err(other)?;
            eprintln!("{} pairs", rel.len());
            Ok(Output::records(&[report::relation(&rel)], false))
        }
        Command::CheckModel { theory, model } => {
            let theory = load_theory(theory)?;
            let m = load_model(model, Some(&theory))?;
            let laws = model_laws(&theory).map_err(other)?;
            let mut records = Vec::new();
            for law in &laws {
                if !holds(&m, law).map_err(other)? {
                    records.push(report::violation(theory.name(), law));
                }
            }
            let violations = records.len();
            records.push(report::check_summary(theory.name(), m.carrier(), laws.len(), violations));
            eprintln!("{violations} of {} laws violated", laws.len());
            Ok(Output::records(&records, violations > 0))
        }
        Command::Enumerate { theory, max_carrier, dedup_iso } => {
            let theory = load_theory(theory)?;
            let options = search_options(cli, *dedup_iso);
            let mut records = Vec::new();
            for k in 0..=*max_carrier {
                let set = enumerate_models(&theory, k, &options).map_err(other)?;
                eprintln!("carrier {k}: {} models", set.models.len());
                records.extend(report::model_set(&set));
            }
            Ok(Output::records(&records, false))
        }
        Command::Morphisms { theory, model } => {
            let theory = load_theory(theory)?;
            let [source, target] = model.as_slice() else {
                return Err(CliError::Usage("`morphisms` takes exactly two --model files".into()));
            };
            let source = load_model(source, Some(&theory))?;
            let target = load_model(target, Some(&theory))?;
            let homs = enumerate_morphisms(&theory, &source, &target).map_err(other)?;
            eprintln!("{} morphisms", homs.len());
            Ok(Output::records(&report::morphisms(theory.name(), &source, &target, &homs), false))
        }
        Command::Counterexample { theory, law, max_carrier } => {
            let theory = load_theory(theory)?;
            let law = resolve_cli_law(law, &theory)?;
            let found = find_counterexample(&theory, &law, *max_carrier, &search_options(cli, false)).map_err(other)?;
            match &found.model {
                Some(m) => eprintln!("counterexample with {} elements", m.carrier()),
                None => eprintln!("no counterexample up to {max_carrier} elements (not a proof)"),
            }
            Ok(Output::records(&[report::counterexample(&found)], found.model.is_some()))
        }
        Command::Derive { file, max_carrier } => cmd_derive(cli, file, *max_carrier),
        Command::Correspondence { theory, max_carrier } => {
            let theory = load_theory(theory)?;
            let r = check_model_correspondence(&theory, *max_carrier, &search_options(cli, false)).map_err(other)?;
            eprintln!(
                "{}",
                if r.holds() { "models and algebras correspond" } else { "correspondence fails" }
            );
            Ok(Output::records(&[report::correspondence(&r)], !r.holds()))
        }
        Command::Dot { term, theory } => {
            let theory = match theory {
                Some(t) => load_theory(t)?,
                None => Theory::new("empty", TheoryKind::Frobenius),
            };
            let t = parse_cli_term(term, &theory)?;
            Ok(Output {
                text: PortGraph::from_term(&t.expand()).to_dot(),
                violated: false,
            })
        }
    }
}

fn cmd_parse(theory: Option<&str>, term: Option<&str>, file: Option<&Path>) -> Result<Output, CliError> {
    if let Some(path) = file {
        if path.extension().is_some_and(|x| x == "drv") {
            let d = load_derivation(path).map_err(derivation_error)?;
            let record = json!({
                "kind": "derivation-file",
                "name": d.name,
                "theory": d.theory.name(),
                "goal": format!("{} {} {}", d.goal.lhs, d.goal.cmp.symbol(), d.goal.rhs),
                "steps": d.steps.len() + d.converse.as_ref().map_or(0, Vec::len),
            });
            return Ok(Output::records(&[record], false));
        }
        let t = parse_theory(&read(path)?).map_err(|e| CliError::Parse {
            file: path.display().to_string(),
            message: e.to_string(),
        })?;
        return Ok(Output::records(&[report::theory(&t)], false));
    }
    let Some(name) = theory else {
        return Err(CliError::Usage("`parse` needs --theory or --file".into()));
    };
    let t = load_theory(name)?;
    match term {
        Some(text) => {
            let term = parse_cli_term(text, &t)?;
            let (m, n) = term.ty();
            let record = json!({
                "kind": "term",
                "term": term.to_string(),
                "type": [m, n],
                "boxes": term.expand().box_count(),
            });
            Ok(Output::records(&[record], false))
        }
        // With --out the theory is written in the theory file format.
        None => Ok(Output {
            text: print_theory(&t),
            violated: false,
        }),
    }
}

fn derivation_error(e: DerivationError) -> CliError {
    match e {
        DerivationError::Parse { file, line, message } => CliError::Parse {
            file,
            message: format!("{line}: {message}"),
        },
        DerivationError::Io(m) => CliError::Io(m),
        other => CliError::Other(other.to_string()),
    }
}

/// Checks one derivation together with the lemmas it depends on, taken from
/// the other files of its directory, or every derivation of a directory.
fn cmd_derive(cli: &Cli, file: &Path, max_carrier: Option<usize>) -> Result<Output, CliError> {
    let (derivations, targets) = if file.is_dir() {
        let ds = frob_core::derivation::load_dir(file).map_err(derivation_error)?;
        let names = ds.iter().map(|d| d.name.clone()).collect();
        (ds, names)
    } else {
        let target = load_derivation(file).map_err(derivation_error)?;
        let mut pool: BTreeMap<String, Derivation> = BTreeMap::new();
        if let Some(dir) = file.parent().filter(|d| d.is_dir()) {
            if let Ok(entries) = fs::read_dir(dir) {
                let mut paths: Vec<PathBuf> = entries
                    .filter_map(|e| e.ok().map(|e| e.path()))
                    .filter(|p| p.extension().is_some_and(|x| x == "drv"))
                    .collect();
                paths.sort();
                for p in paths {
                    match load_derivation(&p) {
                        Ok(d) => {
                            pool.entry(d.name.clone()).or_insert(d);
                        }
                        Err(e) => eprintln!("skipping {}: {e}", p.display()),
                    }
                }
            }
        }
        let target_name = target.name.clone();
        pool.insert(target_name.clone(), target);
        let mut needed = BTreeSet::new();
        let mut stack = vec![target_name.clone()];
        while let Some(name) = stack.pop() {
            if let Some(d) = pool.get(&name) {
                if needed.insert(name) {
                    stack.extend(d.cited_lemmas());
                }
            }
        }
        let ds: Vec<Derivation> = pool.into_values().filter(|d| needed.contains(&d.name)).collect();
        (ds, BTreeSet::from([target_name]))
    };
    let mut db = LemmaDb::new();
    let results = check_all(&derivations, &mut db).map_err(other)?;
    let mut records = Vec::new();
    let mut violated = false;
    let options = search_options(cli, false);
    for (d, result) in derivations.iter().zip(results) {
        if !targets.contains(&d.name) {
            continue;
        }
        match result {
            Ok(r) => {
                records.push(report::derivation(&r));
                if let Some(k) = max_carrier {
                    match semantic_cross_check(d, &db, k, &options) {
                        Ok(c) => records.push(report::cross_check(&c)),
                        Err(e) => {
                            violated = true;
                            records.push(report::rejected(&d.name, &e.to_string()));
                        }
                    }
                }
            }
            Err(e) => {
                violated = true;
                records.push(report::rejected(&d.name, &e.to_string()));
            }
        }
    }
    let rejected = records.iter().filter(|r| r["kind"] == "rejected").count();
    eprintln!("{} derivations, {rejected} rejected", targets.len());
    Ok(Output::records(&records, violated))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.jobs > 0 {
        // Only fails if a pool already exists, which cannot happen here.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(cli.jobs).build_global();
    }
    match run(&cli) {
        Ok(out) => {
            let written = match &cli.out {
                Some(path) => fs::write(path, &out.text).map_err(|e| format!("{}: {e}", path.display())),
                None => {
                    print!("{}", out.text);
                    Ok(())
                }
            };
            if let Err(e) = written {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
            if out.violated {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

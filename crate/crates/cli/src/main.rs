use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use lattice_chirality::certificate::{
    achirality_certificate, chirality_proof, extended_group_chirality, reversing_symmetry, Certificate, Verdict,
};
use lattice_chirality::chirality::{induced_automorphism, ThreeCharacter};
use lattice_chirality::coxeter::{emit_dot, finite_volume_check, graph_symmetries, DEFAULT_SYMMETRY_BOUND};
use lattice_chirality::discriminant::{class_invariants, DiscriminantGroup, Parity};
use lattice_chirality::linalg::{int_vec, Rat};
use lattice_chirality::roots::{run_vinberg, RootConfig, RootSequence, RunStatus};
use lattice_chirality::script::{DerivationScript, StepOutcome};
use lattice_chirality::tables::{emit_table1, generate_tables, run_classification, verify_all, ClassEntry, TableFormat};
use lattice_chirality::{parse_lattice_expr, Error, Lattice};

/// Vinberg's algorithm, Coxeter graphs and chirality certificates for even
/// hyperbolic lattices.
#[derive(Parser)]
#[command(name = "chirality", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Rank, signature, discriminant and class invariants.
    Info {
        #[arg(allow_hyphen_values = true)]
        expr: String,
    },
    /// Run Vinberg's algorithm and print the roots as JSON.
    Vinberg {
        #[arg(allow_hyphen_values = true)]
        expr: String,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Coxeter graph of the roots found.
    Graph {
        #[arg(allow_hyphen_values = true)]
        expr: String,
        #[arg(long, value_enum, default_value = "dot")]
        format: GraphFormat,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Finite-volume report for the roots found.
    Volume {
        #[arg(allow_hyphen_values = true)]
        expr: String,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Symmetries of the Coxeter graph and their action on discr_3.
    Symmetries {
        #[arg(allow_hyphen_values = true)]
        expr: String,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Decide chirality and write a certificate.
    Chirality {
        #[arg(allow_hyphen_values = true)]
        expr: String,
        /// Certificate file; printed to stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Re-check a certificate from scratch.
    Verify { certificate: PathBuf },
    /// The 75 classification lattices, optionally with verdicts.
    Tables {
        #[arg(long, value_enum, default_value = "all")]
        parity: ParityFilter,
        /// Run the derivation script and attach verdicts.
        #[arg(long)]
        classify: bool,
        #[arg(long, value_enum)]
        emit: Option<Emit>,
        #[arg(long, value_enum, default_value = "text")]
        format: OutFormat,
        /// Derivation script to use instead of the built-in one.
        #[arg(long)]
        script: Option<PathBuf>,
    },
}

#[derive(Args, Clone)]
struct RunArgs {
    /// Allowed root squares, e.g. `2,6` or `2,4,6`.
    #[arg(long, value_delimiter = ',')]
    squares: Option<Vec<i64>>,
    /// Largest level to explore, an integer or fraction.
    #[arg(long)]
    max_level: Option<String>,
    #[arg(long)]
    max_roots: Option<usize>,
    /// Base point coordinates, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    point: Option<Vec<i64>>,
    /// Skip the finite-volume check between levels.
    #[arg(long)]
    no_volume: bool,
}

#[derive(ValueEnum, Clone, Copy)]
enum GraphFormat {
    Dot,
    Json,
}

#[derive(ValueEnum, Clone, Copy, PartialEq, Eq)]
enum ParityFilter {
    Even,
    Odd,
    All,
}

#[derive(ValueEnum, Clone, Copy)]
enum Emit {
    Table1,
}

#[derive(ValueEnum, Clone, Copy)]
enum OutFormat {
    Text,
    Markdown,
    Json,
}

enum Failure {
    Usage(String),
    Budget(String),
    Verification(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Budget(_) => Failure::Budget(e.to_string()),
            Error::Verification(_) => Failure::Verification(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type CliResult = std::result::Result<(), Failure>;

fn lattice(expr: &str) -> Result<(String, Lattice), Failure> {
    let e = parse_lattice_expr(expr)?;
    Ok((e.to_string(), e.to_lattice()?))
}

impl RunArgs {
    fn config(&self, l: &Lattice) -> Result<RootConfig, Failure> {
        let mut c = RootConfig::new(l)?;
        if let Some(s) = &self.squares {
            c.allowed_squares = s.clone();
        }
        if let Some(m) = &self.max_level {
            c.max_level = m.parse::<Rat>().map_err(|_| Failure::Usage(format!("bad level `{m}`")))?;
        }
        if let Some(n) = self.max_roots {
            c.max_roots = n;
        }
        if let Some(p) = &self.point {
            c.base_point = int_vec(p);
        }
        c.check_volume = !self.no_volume;
        c.validate(l)?;
        Ok(c)
    }

    fn run(&self, l: &Lattice) -> Result<RootSequence, Failure> {
        Ok(run_vinberg(l, &self.config(l)?)?)
    }
}

/// Writes to stdout; a closed pipe ends the program quietly.
fn emit(text: &str) {
    let mut out = std::io::stdout().lock();
    if writeln!(out, "{text}").and_then(|_| out.flush()).is_err() {
        std::process::exit(0);
    }
}

fn print_json(v: &impl serde::Serialize) -> CliResult {
    emit(&serde_json::to_string_pretty(v)?);
    Ok(())
}

fn budget_status(seq: &RootSequence) -> CliResult {
    match seq.status {
        RunStatus::Complete => Ok(()),
        RunStatus::BudgetExhausted => Err(Failure::Budget(format!("root search stopped after {} roots without completing", seq.roots.len()))),
    }
}

fn info(expr: &str) -> CliResult {
    let (name, l) = lattice(expr)?;
    let (pos, neg) = l.signature();
    let disc = DiscriminantGroup::of(&l)?;
    let invariants = class_invariants(&l).ok();
    let entry = generate_tables()?.into_iter().find(|e| Some(e.invariants) == invariants).map(|e| e.lattice_expr);
    print_json(&json!({
        "lattice": name,
        "rank": l.rank(),
        "signature": [pos, neg],
        "det": l.det().to_string(),
        "discriminant": disc.summary(),
        "invariants": invariants,
        "table_entry": entry,
    }))
}

fn graph_json(seq: &RootSequence, l: &Lattice) -> Result<Value, Failure> {
    let g = seq.graph(l)?;
    let edges: Vec<Value> = g
        .edges()
        .into_iter()
        .map(|(i, j, m)| json!({ "a": g.names()[i], "b": g.names()[j], "weight": m.to_string() }))
        .collect();
    Ok(json!({
        "vertices": seq.to_json()?.roots,
        "edges": edges,
        "status": seq.status,
    }))
}

fn symmetries(expr: &str, run: &RunArgs) -> CliResult {
    let (name, l) = lattice(expr)?;
    let seq = run.run(&l)?;
    let g = seq.graph(&l)?;
    let roots = seq.vectors();
    let chi = ThreeCharacter::of(&l).ok();
    let mut out = Vec::new();
    for s in graph_symmetries(&g, DEFAULT_SYMMETRY_BOUND.max(g.len()))? {
        let auto = induced_automorphism(&l, &roots, &s)?;
        let delta3 = match (&auto, &chi) {
            (Some(a), Some(c)) => Some(c.eval(a)?),
            _ => None,
        };
        let matrix = auto.map(|a| a.to_i64()).transpose()?;
        out.push(json!({ "perm": s.perm, "matrix": matrix, "delta3": delta3 }));
    }
    print_json(&json!({ "lattice": name, "status": seq.status, "roots": seq.names(), "symmetries": out }))?;
    budget_status(&seq)
}

/// Certificate from the built-in derivation chain, for table lattices.
fn scripted_certificate(name: &str) -> Result<Option<Certificate>, Failure> {
    let Some(chain) = DerivationScript::builtin()?.chain_for(name) else {
        return Ok(None);
    };
    let outcomes = chain.execute();
    for (step, out) in chain.steps.iter().zip(outcomes) {
        match out {
            StepOutcome::Certified { certificate, millis } => {
                eprintln!("{:>6} ms  {} {}", millis, step.kind, step.lattice);
                if step.lattice == name {
                    return Ok(Some(certificate));
                }
            }
            StepOutcome::Checked { .. } => {}
            StepOutcome::Failed { error, .. } => {
                eprintln!("step on line {} failed: {error}", step.line);
                return Ok(None);
            }
        }
    }
    Ok(None)
}

/// Direct strategy: a reversing symmetry of the walls found, otherwise a
/// completeness argument with {2,6}- or {2,4,6}-roots.
fn direct_certificate(name: &str, l: &Lattice, run: &RunArgs) -> Result<Option<Certificate>, Failure> {
    let seq = run.run(l)?;
    if let Some(s) = reversing_symmetry(l, &seq)? {
        let pick: Vec<usize> = (0..seq.roots.len()).collect();
        return Ok(Some(achirality_certificate(l, name, &seq, &pick, &s)?));
    }
    if seq.status == RunStatus::Complete && !seq.config.allowed_squares.contains(&4) {
        return Ok(Some(chirality_proof(l, name, &seq)?));
    }
    let mut ext = run.clone();
    ext.squares = Some(vec![2, 4, 6]);
    let seq = ext.run(l)?;
    if seq.status == RunStatus::Complete {
        if let Ok(c) = extended_group_chirality(l, name, &seq) {
            return Ok(Some(c));
        }
    }
    Ok(None)
}

fn chirality(expr: &str, out: Option<PathBuf>, run: &RunArgs) -> CliResult {
    let (name, l) = lattice(expr)?;
    let cert = match scripted_certificate(&name)? {
        Some(c) => Some(c),
        None => direct_certificate(&name, &l, run)?,
    };
    let Some(cert) = cert else {
        emit(&format!("{name}: {}", Verdict::Unknown));
        return Err(Failure::Budget("computation budget exhausted before a certificate was found".into()));
    };
    cert.verify()?;
    let text = cert.to_json()?;
    match out {
        Some(path) => {
            std::fs::write(&path, text)?;
            emit(&format!("{name}: {} (certificate in {})", cert.verdict, path.display()));
        }
        None => emit(&text),
    }
    Ok(())
}

fn verify(path: PathBuf) -> CliResult {
    let text = std::fs::read_to_string(&path)?;
    let cert = Certificate::from_json(&text).map_err(|e| Failure::Verification(e.to_string()))?;
    let v = cert.verify().map_err(|e| Failure::Verification(e.to_string()))?;
    emit(&format!("{}: {v} (verified, chain depth {})", cert.lattice, cert.depth()));
    Ok(())
}

fn tables(parity: ParityFilter, classify: bool, table: Option<Emit>, format: OutFormat, script: Option<PathBuf>) -> CliResult {
    let mut entries = generate_tables()?;
    if classify || table.is_some() {
        let script = match script {
            Some(p) => DerivationScript::parse(&std::fs::read_to_string(p)?)?,
            None => DerivationScript::builtin()?,
        };
        let run = run_classification(&script)?;
        for s in run.failures() {
            eprintln!("line {}: {} {} failed: {}", s.line, s.kind, s.lattice, s.outcome);
        }
        verify_all(&run.entries)?;
        eprintln!(
            "chiral {}, achiral {}, unknown {}, pure classes {}",
            run.summary.chiral, run.summary.achiral, run.summary.unknown, run.summary.pure_classes
        );
        if run.summary.unknown > 0 && table.is_some() {
            return Err(Failure::Budget(format!("{} verdicts left unresolved", run.summary.unknown)));
        }
        entries = run.entries;
    }
    if table.is_some() {
        let f = match format {
            OutFormat::Text => TableFormat::Text,
            OutFormat::Markdown => TableFormat::Markdown,
            OutFormat::Json => TableFormat::Json,
        };
        emit(emit_table1(&entries, f)?.trim_end());
        return Ok(());
    }
    let keep = |e: &&ClassEntry| match parity {
        ParityFilter::All => true,
        ParityFilter::Even => e.invariants.parity == Parity::Even,
        ParityFilter::Odd => e.invariants.parity == Parity::Odd,
    };
    let shown: Vec<_> = entries.iter().filter(keep).collect();
    match format {
        OutFormat::Json => print_json(&shown)?,
        OutFormat::Text | OutFormat::Markdown => {
            for e in shown {
                let i = &e.invariants;
                emit(&format!("{:>3} {:>3} {:<5} {:<20} {}", i.rho, i.d, i.parity.to_string(), e.lattice_expr, e.status()));
            }
        }
    }
    Ok(())
}

fn dispatch(cli: Cli) -> CliResult {
    match cli.command {
        Command::Info { expr } => info(&expr),
        Command::Vinberg { expr, run } => {
            let (_, l) = lattice(&expr)?;
            let seq = run.run(&l)?;
            print_json(&seq.to_json()?)?;
            budget_status(&seq)
        }
        Command::Graph { expr, format, run } => {
            let (_, l) = lattice(&expr)?;
            let seq = run.run(&l)?;
            match format {
                GraphFormat::Dot => emit(emit_dot(&seq.graph(&l)?).trim_end()),
                GraphFormat::Json => print_json(&graph_json(&seq, &l)?)?,
            }
            budget_status(&seq)
        }
        Command::Volume { expr, run } => {
            let (_, l) = lattice(&expr)?;
            let seq = run.run(&l)?;
            let report = finite_volume_check(&seq.graph(&l)?, l.rank() - 1);
            print_json(&json!({ "roots": seq.names(), "status": seq.status, "report": report }))?;
            budget_status(&seq)
        }
        Command::Symmetries { expr, run } => symmetries(&expr, &run),
        Command::Chirality { expr, out, run } => chirality(&expr, out, &run),
        Command::Verify { certificate } => verify(certificate),
        Command::Tables { parity, classify, emit, format, script } => tables(parity, classify, emit, format, script),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let (code, m) = match f {
                Failure::Usage(m) => (1, m),
                Failure::Budget(m) => (2, m),
                Failure::Verification(m) => (3, m),
            };
            eprintln!("error: {m}");
            ExitCode::from(code)
        }
    }
}

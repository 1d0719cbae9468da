//! The `teamsem` command line.
//!
//! Exit codes: 0 for a true verdict or success, 1 for a false verdict, 2
//! for usage, parse and evaluation errors, 3 when a harness reports a
//! failure.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use crate::deps::{check_closed_world, compute_dmax, parse_dep_file, DepError, Dependency, Property, Registry};
use crate::eval::{tarski_eval, Compiled, EvalConfig, EvalError};
use crate::model::{parse_model, parse_team, Assignment, ModelError, Structure, Team, Var};
use crate::syntax::{
    free_vars, is_first_order, parse_classical, parse_formula, require_first_order, to_nnf, to_prenex, FormulaError,
    FreshGen, ParseError,
};
use crate::transforms::{
    build_dep_union, build_eq1, build_nt_relativized, build_phi_r, build_theta_t, desugar, extract_atoms,
    identity_translation, put_back_qfree, relativize_closed_world, safety_pipeline, split_occurrences, Eq1Branch,
    TransformError,
};
use crate::verify::{run_harness, Report, SweepSpec, VerifyError, HARNESSES};

pub const EXIT_TRUE: i32 = 0;
pub const EXIT_FALSE: i32 = 1;
pub const EXIT_ERROR: i32 = 2;
pub const EXIT_HARNESS_FAIL: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    ModelFile { path: PathBuf, source: ModelError },
    #[error("{path}: {source}")]
    DepFile { path: PathBuf, source: DepError },
    #[error("formula {0}")]
    Formula(#[from] ParseError),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Syntax(#[from] FormulaError),
    #[error(transparent)]
    Dependency(#[from] DepError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Transform(#[from] TransformError),
    #[error(transparent)]
    Verify(#[from] VerifyError),
}

#[derive(Parser, Debug)]
#[command(name = "teamsem", version, about = "Exact team semantics over finite models")]
pub struct Cli {
    /// Extra dependency definitions (also read from TEAMSEM_DEPS).
    #[arg(long, global = true, value_name = "FILE")]
    pub deps_file: Option<PathBuf>,
    /// Worker threads for harness sweeps.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct FormulaArg {
    /// Formula text.
    #[arg(long, short = 'f', conflicts_with = "formula_file")]
    pub formula: Option<String>,
    /// File holding the formula.
    #[arg(long, value_name = "FILE")]
    pub formula_file: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Strategy {
    Naive,
    Fast,
    Structural,
}

impl Strategy {
    fn config(self) -> EvalConfig {
        match self {
            Strategy::Naive => EvalConfig::naive(),
            Strategy::Fast => EvalConfig::fast(),
            Strategy::Structural => EvalConfig::structural(),
        }
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Parse a formula and print it back with its free variables.
    Parse {
        #[command(flatten)]
        formula: FormulaArg,
    },
    /// Evaluate a formula on a team (or a sentence on the model).
    Eval {
        #[arg(long, value_name = "FILE")]
        model: PathBuf,
        /// Team file; without it the formula is read as a sentence.
        #[arg(long, value_name = "FILE")]
        team: Option<PathBuf>,
        #[command(flatten)]
        formula: FormulaArg,
        #[arg(long, value_enum, default_value = "fast")]
        strategy: Strategy,
        /// Print the evaluation trace.
        #[arg(long)]
        trace: bool,
    },
    /// Evaluate a first-order formula under one assignment.
    Tarski {
        #[arg(long, value_name = "FILE")]
        model: PathBuf,
        #[command(flatten)]
        formula: FormulaArg,
        /// Assignment as `x=a,y=b` using element names.
        #[arg(long, default_value = "")]
        assign: String,
    },
    /// Closure properties of a dependency.
    Classify {
        #[arg(long)]
        dep: String,
        #[arg(long, default_value_t = 3)]
        max_domain: usize,
    },
    /// The maximal members of a dependency on a domain of the given size.
    Dmax {
        #[arg(long)]
        dep: String,
        #[arg(long, default_value_t = 3)]
        max_domain: usize,
    },
    /// Apply a rewrite and print the result.
    Transform(TransformArgs),
    /// Run a named harness (or `all`).
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Pass {
    Desugar,
    Nnf,
    Prenex,
    Extract,
    Split,
    DepUnion,
    PutbackQfree,
    Pipeline,
    PhiR,
    ThetaT,
    Eq1,
    NtRelativized,
    Relativize,
}

#[derive(Args, Debug)]
pub struct TransformArgs {
    #[arg(value_enum)]
    pub pass: Pass,
    #[command(flatten)]
    pub formula: FormulaArg,
    /// Dependency (several for `extract` and `pipeline`).
    #[arg(long)]
    pub dep: Vec<String>,
    /// Relation symbol for `split` and `putback-qfree`.
    #[arg(long, default_value = "W")]
    pub symbol: String,
    /// Arity of the symbol for `putback-qfree`.
    #[arg(long, default_value_t = 1)]
    pub arity: usize,
    /// Number of encoded relations for `dep-union`.
    #[arg(long, default_value_t = 2)]
    pub count: usize,
    /// Branch formula `θ(x, z)` for `eq1`; repeat for several branches.
    #[arg(long)]
    pub theta: Vec<String>,
    /// Parameter variables of the branches for `eq1`, space separated.
    #[arg(long, default_value = "z")]
    pub params: String,
    /// Variables the result is about (`eq1`, `relativize`, `nt-relativized`).
    #[arg(long, default_value = "v")]
    pub vars: String,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    pub harness: String,
    #[arg(long)]
    pub max_domain: Option<usize>,
    #[arg(long)]
    pub max_rows: Option<usize>,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Seeded random formulas added to the exhaustive corpora.
    #[arg(long, default_value_t = 200)]
    pub random: usize,
    #[arg(long)]
    pub dep: Vec<String>,
    /// Cap on the number of cases.
    #[arg(long)]
    pub budget: Option<usize>,
    /// Where the machine-readable report goes.
    #[arg(long, value_name = "FILE")]
    pub report: Option<PathBuf>,
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn load_model(path: &Path) -> Result<Structure, CliError> {
    parse_model(&read(path)?).map_err(|source| CliError::ModelFile {
        path: path.to_path_buf(),
        source,
    })
}

fn load_team(path: &Path, m: &Structure) -> Result<Team, CliError> {
    parse_team(&read(path)?, m).map_err(|source| CliError::ModelFile {
        path: path.to_path_buf(),
        source,
    })
}

fn formula_text(arg: &FormulaArg) -> Result<String, CliError> {
    match (&arg.formula, &arg.formula_file) {
        (Some(f), _) => Ok(f.clone()),
        (None, Some(p)) => read(p),
        (None, None) => Err(CliError::Usage("a formula is required (--formula or --formula-file)".into())),
    }
}

fn registry(cli: &Cli) -> Result<Registry, CliError> {
    let mut reg = Registry::standard();
    let env = std::env::var_os("TEAMSEM_DEPS").map(PathBuf::from);
    for path in env.iter().chain(&cli.deps_file) {
        let deps = parse_dep_file(&read(path)?).map_err(|source| CliError::DepFile {
            path: path.clone(),
            source,
        })?;
        for d in deps {
            reg.register(d).map_err(|source| CliError::DepFile {
                path: path.clone(),
                source,
            })?;
        }
    }
    Ok(reg)
}

fn var_list(text: &str) -> Vec<Var> {
    text.split_whitespace().map(Var::new).collect()
}

/// Run the command line and return the exit code. Output goes to `out`,
/// diagnostics to stderr.
pub fn run(cli: Cli, out: &mut dyn std::io::Write) -> i32 {
    if let Some(j) = cli.jobs {
        // a second call in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(j).build_global();
    }
    match execute(&cli, out) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    }
}

fn verdict(out: &mut dyn std::io::Write, v: bool) -> Result<i32, CliError> {
    emit(out, &v.to_string())?;
    Ok(if v { EXIT_TRUE } else { EXIT_FALSE })
}

fn emit(out: &mut dyn std::io::Write, text: &str) -> Result<(), CliError> {
    writeln!(out, "{text}").map_err(|source| CliError::Io {
        path: PathBuf::from("<stdout>"),
        source,
    })
}

fn execute(cli: &Cli, out: &mut dyn std::io::Write) -> Result<i32, CliError> {
    let reg = registry(cli)?;
    match &cli.command {
        Command::Parse { formula } => {
            let f = parse_formula(&formula_text(formula)?)?;
            reg.validate(&f)?;
            let free: Vec<String> = free_vars(&f).iter().map(|v| v.to_string()).collect();
            emit(out, &f.to_string())?;
            emit(out, &format!("free: {}", free.join(" ")))?;
            emit(out, &format!("first-order: {}", is_first_order(&f)))?;
            Ok(EXIT_TRUE)
        }
        Command::Eval {
            model,
            team,
            formula,
            strategy,
            trace,
        } => {
            let m = load_model(model)?;
            let x = match team {
                Some(p) => load_team(p, &m)?,
                None => Team::unit(),
            };
            let f = parse_formula(&formula_text(formula)?)?;
            let compiled = Compiled::new(&f, &reg, strategy.config())?;
            if *trace {
                let t = compiled.explain(&m, &x)?;
                emit(out, t.to_string().trim_end())?;
                return verdict(out, t.verdict);
            }
            let v = compiled.eval(&m, &x)?;
            verdict(out, v)
        }
        Command::Tarski { model, formula, assign } => {
            let m = load_model(model)?;
            let c = parse_classical(&formula_text(formula)?)?;
            let mut s = Assignment::new();
            for part in assign.split(',').map(str::trim).filter(|p| !p.is_empty()) {
                let (v, e) = part
                    .split_once('=')
                    .ok_or_else(|| CliError::Usage(format!("bad assignment `{part}`, expected var=element")))?;
                let elem = m
                    .elem(e.trim())
                    .ok_or_else(|| CliError::Usage(format!("unknown element `{}`", e.trim())))?;
                s.insert(Var::new(v.trim()), elem);
            }
            let v = tarski_eval(&m, &s, &c)?;
            verdict(out, v)
        }
        Command::Classify { dep, max_domain } => {
            let d = reg.lookup(dep)?;
            let bound = crate::deps::clamp_bound(d.arity(), *max_domain);
            emit(out, &format!("{} (arity {}, domains up to {bound})", d.name(), d.arity()))?;
            for p in Property::ALL {
                let v = if p == Property::ClosedWorld {
                    check_closed_world(&d, bound)?
                } else {
                    crate::deps::check_closure(&d, p, bound)?
                };
                let mark = if v.holds { "yes" } else { "no" };
                let witness = v.witness.map(|w| format!("  witness {w}")).unwrap_or_default();
                emit(out, &format!("{:<13}{mark}{witness}", p.name()))?;
            }
            Ok(EXIT_TRUE)
        }
        Command::Dmax { dep, max_domain } => {
            let d = reg.lookup(dep)?;
            let u: Vec<u8> = (0..*max_domain as u8).collect();
            for r in compute_dmax(&d, &u)? {
                emit(out, &format!("{r:?}"))?;
            }
            Ok(EXIT_TRUE)
        }
        Command::Transform(args) => transform(args, &reg, out),
        Command::Verify(args) => verify(args, out),
    }
}

fn one_dep(args: &TransformArgs, reg: &Registry) -> Result<Dependency, CliError> {
    match args.dep.as_slice() {
        [d] => Ok(reg.lookup(d)?),
        _ => Err(CliError::Usage("this pass takes exactly one --dep".into())),
    }
}

fn transform(args: &TransformArgs, reg: &Registry, out: &mut dyn std::io::Write) -> Result<i32, CliError> {
    let text = || formula_text(&args.formula);
    let printed = match args.pass {
        Pass::Desugar => desugar(&parse_formula(&text()?)?).to_string(),
        Pass::Nnf => to_nnf(&parse_classical(&text()?)?).to_string(),
        Pass::Prenex => {
            let c = require_first_order(&to_nnf(&parse_classical(&text()?)?))?;
            crate::syntax::classical_to_nnf(&to_prenex(&c)).to_string()
        }
        Pass::Extract => {
            let targets: Vec<Dependency> = args.dep.iter().map(|d| reg.lookup(d)).collect::<Result<_, _>>()?;
            let ex = extract_atoms(&parse_formula(&text()?)?, &targets, reg)?;
            let mut lines = vec![ex.formula.to_string()];
            for b in &ex.bindings {
                lines.push(format!("{} : {}", b.symbol, b.dep.name()));
            }
            lines.join("\n")
        }
        Pass::Split => {
            let chi = parse_classical(&text()?)?;
            let (split, names) = split_occurrences(&chi, &args.symbol, &mut FreshGen::new())?;
            format!("{}\nsymbols: {}", crate::syntax::classical_to_nnf(&split), names.join(" "))
        }
        Pass::DepUnion => {
            let d = one_dep(args, reg)?;
            let k = d.arity();
            let mut fresh = FreshGen::new();
            let vs: Vec<Vec<Var>> = (0..args.count).map(|_| fresh.vars("v", k)).collect();
            let ws: Vec<Vec<Var>> = (0..args.count).map(|_| fresh.vars("w", k)).collect();
            build_dep_union(&d, &vs, &ws, &mut fresh)?.to_string()
        }
        Pass::PutbackQfree => {
            let p = put_back_qfree(&parse_formula(&text()?)?, &args.symbol, args.arity, &mut FreshGen::new())?;
            p.formula.to_string()
        }
        Pass::Pipeline => {
            let targets: Vec<Dependency> = args.dep.iter().map(|d| reg.lookup(d)).collect::<Result<_, _>>()?;
            safety_pipeline(&parse_formula(&text()?)?, &targets, reg, &identity_translation)?
                .sentence
                .to_string()
        }
        Pass::PhiR => build_phi_r(&one_dep(args, reg)?)?.to_string(),
        Pass::ThetaT => {
            let d = one_dep(args, reg)?;
            build_theta_t(&crate::deps::dmax_dependency(&d, "dmax"))?.to_string()
        }
        Pass::Eq1 => {
            let d = one_dep(args, reg)?;
            let x: Vec<Var> = (1..=d.arity())
                .map(|i| Var::new(&if d.arity() == 1 { "x".to_string() } else { format!("x{i}") }))
                .collect();
            let branches = args
                .theta
                .iter()
                .map(|t| {
                    Ok(Eq1Branch {
                        theta: parse_classical(t)?,
                        x: x.clone(),
                        z: var_list(&args.params),
                    })
                })
                .collect::<Result<Vec<_>, CliError>>()?;
            build_eq1(&d, &branches, &var_list(&args.vars))?.to_string()
        }
        Pass::NtRelativized => {
            let v = var_list(&args.vars);
            let [t] = v.as_slice() else {
                return Err(CliError::Usage("nt-relativized takes a single variable".into()));
            };
            build_nt_relativized(t, "P").to_string()
        }
        Pass::Relativize => relativize_closed_world(&one_dep(args, reg)?, "P", &var_list(&args.vars))?.to_string(),
    };
    emit(out, &printed)?;
    Ok(EXIT_TRUE)
}

fn verify(args: &VerifyArgs, out: &mut dyn std::io::Write) -> Result<i32, CliError> {
    let names: Vec<&str> = if args.harness == "all" {
        HARNESSES.to_vec()
    } else {
        vec![args.harness.as_str()]
    };
    let spec = SweepSpec {
        max_domain: args.max_domain,
        max_rows: args.max_rows,
        seed: args.seed,
        random: args.random,
        deps: args.dep.clone(),
        budget: args.budget,
    };
    let mut reports = Vec::new();
    for name in names {
        let report = run_harness(name, &spec)?;
        emit(out, report.to_string().trim_end())?;
        reports.push(report);
    }
    let path = args
        .report
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("teamsem-{}.report", args.harness)));
    finish(&reports, &path, out)
}

/// Write the machine-readable reports and pick the exit code.
fn finish(reports: &[Report], path: &Path, out: &mut dyn std::io::Write) -> Result<i32, CliError> {
    let serialized: String = reports.iter().map(Report::serialize).collect();
    fs::write(path, serialized).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    if reports.iter().all(Report::passed) {
        return Ok(EXIT_TRUE);
    }
    emit(out, &format!("report: {}", path.display()))?;
    Ok(EXIT_HARNESS_FAIL)
}

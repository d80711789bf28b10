//! `listrem`: translate, transform, solve and verify list-manipulating CHCs.
//!
//! Exit status is 0 when everything checked holds, 1 when some verdict is
//! negative or unknown, 2 on usage, input or parse errors.

mod plan;
mod problem;
mod repl;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use chc_listrem::frontend::{parse_source_named, translate};
use chc_listrem::model::{is_list_free, ClauseSet};
use chc_listrem::oracle::{bounded_lfp, goal_violated, DomainBounds};
use chc_listrem::solver::{check_model, parse_model, solve, SolverConfig, Validity, SOLVER_ENV};
use chc_listrem::strategy::{Command, DerivationState, Script};
use chc_listrem::syntax::{parse_chc_named, SolverVerdict};

use crate::plan::{Verdict, VerifyPlan};
use crate::problem::{load, read, render, Problem};

#[derive(Parser)]
#[command(name = "listrem", version, about = "Remove list arguments from constrained Horn clauses")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct SolverArgs {
    /// Solver command; `{file}` stands for the SMT-LIB file. Defaults to $CHC_SOLVER_CMD.
    #[arg(long)]
    solver: Option<String>,
    /// Solver timeout in seconds.
    #[arg(long, default_value_t = 60)]
    timeout: u64,
    /// Keep the generated .smt2 files in this directory.
    #[arg(long)]
    keep_temps: Option<PathBuf>,
}

impl SolverArgs {
    fn config(&self) -> Result<SolverConfig> {
        let mut cfg = match &self.solver {
            Some(cmd) => SolverConfig::new(cmd.clone()),
            None => SolverConfig::from_env().with_context(|| format!("no solver: pass --solver or set {SOLVER_ENV}"))?,
        };
        if self.timeout == 0 {
            bail!("--timeout must be positive");
        }
        cfg.timeout = Duration::from_secs(self.timeout);
        cfg.keep_temps = self.keep_temps.clone();
        Ok(cfg)
    }
}

#[derive(Args)]
struct GoalArgs {
    /// Program: a `.fun` source or a clause file.
    program: PathBuf,
    /// Goal tag.
    #[arg(long)]
    goal: String,
    /// Extra clause file with tagged goals.
    #[arg(long)]
    goals: Option<PathBuf>,
    /// Goal whose property may be used as a lemma (repeatable).
    #[arg(long = "lemma")]
    lemmas: Vec<String>,
}

impl GoalArgs {
    fn state(&self) -> Result<DerivationState> {
        let mut p = load(&self.program)?;
        if let Some(g) = &self.goals {
            p.load_goals(g)?;
        }
        let lemmas = self.lemmas.iter().map(|l| p.lemma(l)).collect::<Result<_>>()?;
        Ok(DerivationState::new(&p.program, p.goal(&self.goal)?.clone(), lemmas).with_functions(p.functions))
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Translate a `.fun` source into program clauses, one goal file per contract and a lemma manifest.
    Translate {
        source: PathBuf,
        /// Output directory (default: next to the source).
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Transform a goal with the program into list-free clauses.
    Transform {
        #[command(flatten)]
        goal: GoalArgs,
        /// Transformation script to replay.
        #[arg(long, conflicts_with = "auto", required_unless_present = "auto")]
        script: Option<PathBuf>,
        /// Let the strategy choose every step.
        #[arg(long)]
        auto: bool,
        /// Write the clauses here instead of standard output.
        #[arg(short, long)]
        out: Option<PathBuf>,
        /// Write the primitive steps taken as a script.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Check satisfiability of a list-free clause file with the external solver.
    Solve {
        clauses: PathBuf,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Prove the goals of a plan file in dependency order.
    Verify {
        plan: PathBuf,
        #[command(flatten)]
        solver: SolverArgs,
        /// Goals proved at the same time (default: as many as possible).
        #[arg(long)]
        jobs: Option<usize>,
        /// Write one `key=value` record per goal to this file.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Search for goal violations among small ground instances.
    OracleCheck {
        program: PathBuf,
        /// Extra clause file with tagged goals.
        #[arg(long)]
        goals: Option<PathBuf>,
        /// Only check these goals (repeatable).
        #[arg(long = "goal")]
        only: Vec<String>,
        /// Integer range and list length as `min,max,len`.
        #[arg(long, default_value = "0,2,3")]
        bounds: String,
    },
    /// Check a candidate model against every clause of a clause file.
    CheckModel { clauses: PathBuf, model: PathBuf },
    /// Apply transformation steps one at a time.
    Repl {
        #[command(flatten)]
        goal: GoalArgs,
    },
}

fn parse_bounds(text: &str) -> Result<DomainBounds> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    let [lo, hi, len] = parts.as_slice() else { bail!("bounds must be `min,max,len`, got `{text}`") };
    let b = DomainBounds::new(lo.parse()?, hi.parse()?, len.parse()?);
    if b.int_min > b.int_max {
        bail!("empty integer range in `{text}`");
    }
    Ok(b)
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

fn cmd_translate(source: &Path, out: Option<&Path>) -> Result<bool> {
    let fs = parse_source_named(&read(source)?, &source.display().to_string())?;
    let t = translate(&fs)?;
    let dir = out.map(Path::to_path_buf).unwrap_or_else(|| source.parent().unwrap_or(Path::new(".")).to_path_buf());
    std::fs::create_dir_all(&dir)?;
    let stem = source.file_stem().and_then(|s| s.to_str()).unwrap_or("program");
    let program = dir.join(format!("{stem}.chc"));
    write_file(&program, &render(&t.program.clauses))?;
    println!("{}: {} clauses", program.display(), t.program.clauses.len());
    for g in &t.goals {
        let tag = g.tag.as_deref().unwrap();
        let path = dir.join(format!("{stem}.{tag}.chc"));
        write_file(&path, &render(std::slice::from_ref(g)))?;
        println!("{}: {tag}", path.display());
    }
    let manifest: String = t.lemmas.iter().map(|l| format!("{l}\n")).collect();
    let path = dir.join(format!("{stem}.lemmas"));
    write_file(&path, &manifest)?;
    println!("{}: {} lemmas", path.display(), t.lemmas.len());
    Ok(true)
}

fn cmd_transform(
    args: &GoalArgs,
    script: Option<&Path>,
    out: Option<&Path>,
    trace: Option<&Path>,
) -> Result<bool> {
    let mut st = args.state()?;
    match script {
        Some(path) => st.run_script(&Script::parse(&read(path)?).with_context(|| path.display().to_string())?)?,
        None => st.apply(&Command::Auto)?,
    }
    if let Some(path) = trace {
        write_file(path, &Script { commands: st.trace.clone() }.to_string())?;
    }
    if !st.is_finished() {
        eprint!("{st}");
        bail!("the derivation left {} clauses unprocessed", st.work.len());
    }
    let text = render(&st.result()?.clauses);
    match out {
        Some(p) => write_file(p, &text)?,
        None => print!("{text}"),
    }
    eprintln!("{} iterations, {} definitions", st.iterations, st.defs.len());
    Ok(true)
}

fn cmd_solve(path: &Path, solver: &SolverArgs) -> Result<bool> {
    let cfg = solver.config()?;
    let cs = parse_chc_named(&read(path)?, &path.display().to_string())?;
    if !is_list_free(&cs) {
        bail!("{} still mentions lists", path.display());
    }
    let v = solve(&cs, &cfg)?;
    match &v {
        SolverVerdict::Sat(_) => println!("sat"),
        SolverVerdict::Unsat => println!("unsat"),
        SolverVerdict::Unknown(why) => println!("unknown: {why}"),
    }
    Ok(matches!(v, SolverVerdict::Sat(_)))
}

fn cmd_verify(path: &Path, solver: &SolverArgs, jobs: Option<usize>, report: Option<&Path>) -> Result<bool> {
    let base = path.parent().unwrap_or(Path::new("."));
    let plan = VerifyPlan::parse(&read(path)?, base).with_context(|| path.display().to_string())?;
    let cfg = solver.config()?;
    let cpus = std::thread::available_parallelism().map_or(1, |n| n.get());
    let jobs = jobs.unwrap_or_else(|| plan.goals.len().min(cpus)).max(1);
    let reports = plan::verify(&plan, &cfg, jobs)?;
    for r in &reports {
        println!("{r}");
    }
    if let Some(p) = report {
        write_file(p, &reports.iter().map(|r| r.record() + "\n").collect::<String>())?;
    }
    let ok = reports.iter().all(|r| r.verdict == Verdict::Sat);
    let proved = reports.iter().filter(|r| r.verdict == Verdict::Sat).count();
    println!("{proved}/{} goals verified", reports.len());
    Ok(ok)
}

fn cmd_oracle_check(p: &Problem, only: &[String], bounds: &DomainBounds) -> Result<bool> {
    let atoms = bounded_lfp(&p.program, bounds)?;
    let mut ok = true;
    for g in &p.goals {
        let tag = g.tag.as_deref().unwrap_or("goal");
        if !only.is_empty() && !only.iter().any(|o| o == tag) {
            continue;
        }
        match goal_violated(&atoms, g, bounds) {
            None => println!("{tag}: no violation"),
            Some(w) => {
                ok = false;
                println!("{tag}: violated by {w}");
            }
        }
    }
    Ok(ok)
}

fn cmd_check_model(clauses: &Path, model: &Path) -> Result<bool> {
    let cs: ClauseSet = parse_chc_named(&read(clauses)?, &clauses.display().to_string())?;
    let m = parse_model(&read(model)?, &cs)?;
    let reports = check_model(&cs, &m)?;
    for r in &reports {
        println!("{r}");
    }
    Ok(reports.iter().all(|r| r.validity == Validity::Valid))
}

fn run(cli: Cli) -> Result<bool> {
    match cli.cmd {
        Cmd::Translate { source, out } => cmd_translate(&source, out.as_deref()),
        Cmd::Transform { goal, script, auto: _, out, trace } => {
            cmd_transform(&goal, script.as_deref(), out.as_deref(), trace.as_deref())
        }
        Cmd::Solve { clauses, solver } => cmd_solve(&clauses, &solver),
        Cmd::Verify { plan, solver, jobs, report } => cmd_verify(&plan, &solver, jobs, report.as_deref()),
        Cmd::OracleCheck { program, goals, only, bounds } => {
            let bounds = parse_bounds(&bounds)?;
            let mut p = load(&program)?;
            if let Some(g) = goals {
                p.load_goals(&g)?;
            }
            cmd_oracle_check(&p, &only, &bounds)
        }
        Cmd::CheckModel { clauses, model } => cmd_check_model(&clauses, &model),
        Cmd::Repl { goal } => {
            let st = goal.state()?;
            let stdin = std::io::stdin();
            repl::run(st, stdin.lock(), std::io::stdout())?;
            std::io::stdout().flush()?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bounds_are_parsed() {
        let b = parse_bounds("-1, 2,3").unwrap();
        assert_eq!((b.int_min, b.int_max, b.max_list_len), (-1, 2, 3));
        assert!(parse_bounds("1,2").is_err());
        assert!(parse_bounds("3,2,1").is_err());
    }

    #[test]
    fn cli_is_well_formed() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}

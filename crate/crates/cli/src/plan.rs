//! Proof plans and the verify driver.
//!
//! A plan file names a program and the goals to prove, one per line:
//!
//! ```text
//! program quicksort.fun
//! goals extra.chc
//! G1
//! G3 after G1 G2
//! G5 after G1 G2 G3 G4 script g5.script
//! ```
//!
//! A goal may use the lemmas of the goals it comes `after`, and only once
//! those are proved. Paths are relative to the plan file.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use anyhow::{bail, Context, Result};
use chc_listrem::model::is_list_free;
use chc_listrem::solver::{solve, SolverConfig};
use chc_listrem::strategy::{Command, DerivationState, Script};
use chc_listrem::syntax::SolverVerdict;

use crate::problem::{self, Problem};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlanGoal {
    pub goal: String,
    pub after: Vec<String>,
    pub script: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyPlan {
    pub program: PathBuf,
    pub goal_files: Vec<PathBuf>,
    pub goals: Vec<PlanGoal>,
}

impl VerifyPlan {
    pub fn parse(text: &str, base: &Path) -> Result<VerifyPlan> {
        let mut program = None;
        let mut goal_files = Vec::new();
        let mut goals: Vec<PlanGoal> = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            let words: Vec<&str> = line.split_whitespace().collect();
            let at = || format!("plan line {}", n + 1);
            match words.as_slice() {
                [] => {}
                ["program", p] => program = Some(base.join(p)),
                ["goals", p] => goal_files.push(base.join(p)),
                [goal, rest @ ..] => {
                    let mut g = PlanGoal { goal: goal.to_string(), after: Vec::new(), script: None };
                    let mut it = rest.iter();
                    let mut in_after = false;
                    while let Some(w) = it.next() {
                        match *w {
                            "after" => in_after = true,
                            "script" => {
                                let p = it.next().with_context(|| format!("{}: script needs a path", at()))?;
                                g.script = Some(base.join(p));
                                in_after = false;
                            }
                            dep if in_after => g.after.push(dep.to_string()),
                            other => bail!("{}: unexpected `{other}`", at()),
                        }
                    }
                    if goals.iter().any(|h| h.goal == g.goal) {
                        bail!("{}: goal {} listed twice", at(), g.goal);
                    }
                    goals.push(g);
                }
            }
        }
        let program = program.context("plan has no `program` line")?;
        let plan = VerifyPlan { program, goal_files, goals };
        plan.stages()?;
        Ok(plan)
    }

    /// Goals grouped so that every goal comes after the goals it depends on.
    pub fn stages(&self) -> Result<Vec<Vec<&PlanGoal>>> {
        let known: BTreeSet<&str> = self.goals.iter().map(|g| g.goal.as_str()).collect();
        for g in &self.goals {
            if let Some(d) = g.after.iter().find(|d| !known.contains(d.as_str())) {
                bail!("goal {} comes after {d}, which is not in the plan", g.goal);
            }
        }
        let mut placed: BTreeSet<&str> = BTreeSet::new();
        let mut stages = Vec::new();
        while placed.len() < self.goals.len() {
            let ready: Vec<&PlanGoal> = self
                .goals
                .iter()
                .filter(|g| !placed.contains(g.goal.as_str()))
                .filter(|g| g.after.iter().all(|d| placed.contains(d.as_str())))
                .collect();
            if ready.is_empty() {
                bail!("plan dependencies are cyclic");
            }
            placed.extend(ready.iter().map(|g| g.goal.as_str()));
            stages.push(ready);
        }
        Ok(stages)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Sat,
    Unsat,
    Unknown(String),
    Failed(String),
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Sat => write!(f, "sat"),
            Verdict::Unsat => write!(f, "unsat"),
            Verdict::Unknown(why) => write!(f, "unknown ({why})"),
            Verdict::Failed(why) => write!(f, "failed ({why})"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct GoalReport {
    pub goal: String,
    pub verdict: Verdict,
    pub lemmas: Vec<String>,
    pub iterations: usize,
    pub definitions: usize,
    pub clauses: usize,
    pub time: Duration,
}

impl GoalReport {
    /// One `key=value` record per goal.
    pub fn record(&self) -> String {
        let verdict = match &self.verdict {
            Verdict::Sat => "sat",
            Verdict::Unsat => "unsat",
            Verdict::Unknown(_) => "unknown",
            Verdict::Failed(_) => "failed",
        };
        format!(
            "goal={} verdict={verdict} lemmas={} iterations={} definitions={} clauses={} time_ms={}",
            self.goal,
            if self.lemmas.is_empty() { "-".to_string() } else { self.lemmas.join(",") },
            self.iterations,
            self.definitions,
            self.clauses,
            self.time.as_millis()
        )
    }
}

impl fmt::Display for GoalReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:<8} {}", self.goal, self.verdict)?;
        if !self.lemmas.is_empty() {
            write!(f, " using {}", self.lemmas.join(", "))?;
        }
        write!(f, " [{} clauses, {} ms]", self.clauses, self.time.as_millis())
    }
}

fn prove(p: &Problem, g: &PlanGoal, proved: &BTreeSet<String>, cfg: &SolverConfig) -> GoalReport {
    let start = Instant::now();
    let lemmas: Vec<String> = g.after.iter().filter(|d| proved.contains(*d)).cloned().collect();
    let mut report = GoalReport {
        goal: g.goal.clone(),
        verdict: Verdict::Sat,
        lemmas: lemmas.clone(),
        iterations: 0,
        definitions: 0,
        clauses: 0,
        time: Duration::ZERO,
    };
    let outcome = (|| -> Result<Verdict> {
        let goal = p.goal(&g.goal)?.clone();
        let lemmas = lemmas.iter().map(|l| p.lemma(l)).collect::<Result<_>>()?;
        let mut st = DerivationState::new(&p.program, goal, lemmas).with_functions(p.functions.clone());
        let run = match &g.script {
            Some(path) => Script::parse(&problem::read(path)?)
                .with_context(|| path.display().to_string())
                .and_then(|s| Ok(st.run_script(&s)?)),
            None => st.apply(&Command::Auto).map_err(Into::into),
        };
        report.iterations = st.iterations;
        report.definitions = st.defs.len();
        run?;
        if !st.is_finished() {
            bail!("derivation left {} clauses unprocessed", st.work.len());
        }
        let result = st.result()?;
        report.clauses = result.clauses.len();
        if !is_list_free(&result) {
            bail!("derived clauses still mention lists");
        }
        Ok(match solve(&result, cfg)? {
            SolverVerdict::Sat(_) => Verdict::Sat,
            SolverVerdict::Unsat => Verdict::Unsat,
            SolverVerdict::Unknown(why) => Verdict::Unknown(why),
        })
    })();
    report.verdict = outcome.unwrap_or_else(|e| Verdict::Failed(format!("{e:#}")));
    report.time = start.elapsed();
    report
}

/// Proves the goals stage by stage. Goals of one stage run concurrently, at
/// most `jobs` at a time. A goal that fails is not available as a lemma to
/// later goals, which still run.
pub fn verify(plan: &VerifyPlan, cfg: &SolverConfig, jobs: usize) -> Result<Vec<GoalReport>> {
    let mut p = problem::load(&plan.program)?;
    for f in &plan.goal_files {
        p.load_goals(f)?;
    }
    let mut proved = BTreeSet::new();
    let mut reports: BTreeMap<String, GoalReport> = BTreeMap::new();
    for stage in plan.stages()? {
        for chunk in stage.chunks(jobs.max(1)) {
            let done: Vec<GoalReport> = std::thread::scope(|s| {
                let handles: Vec<_> = chunk.iter().map(|g| s.spawn(|| prove(&p, g, &proved, cfg))).collect();
                handles.into_iter().map(|h| h.join().expect("verifier thread panicked")).collect()
            });
            for r in done {
                if r.verdict == Verdict::Sat {
                    proved.insert(r.goal.clone());
                }
                reports.insert(r.goal.clone(), r);
            }
        }
    }
    Ok(plan.goals.iter().map(|g| reports.remove(&g.goal).unwrap()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_dependencies_and_scripts() {
        let plan = VerifyPlan::parse(
            "program q.fun  # the program\nG1\nG2\nG5 after G1 G2 script g5.script\n",
            Path::new("/x"),
        )
        .unwrap();
        assert_eq!(plan.program, PathBuf::from("/x/q.fun"));
        assert_eq!(plan.goals[2].after, ["G1", "G2"]);
        assert_eq!(plan.goals[2].script, Some(PathBuf::from("/x/g5.script")));
        let stages: Vec<usize> = plan.stages().unwrap().iter().map(Vec::len).collect();
        assert_eq!(stages, [2, 1]);
    }

    #[test]
    fn rejects_cycles_and_unknown_dependencies() {
        let base = Path::new(".");
        assert!(VerifyPlan::parse("program p.chc\nA after B\nB after A\n", base).is_err());
        assert!(VerifyPlan::parse("program p.chc\nA after C\n", base).is_err());
        assert!(VerifyPlan::parse("G1\n", base).is_err());
        assert!(VerifyPlan::parse("program p.chc\nG1 script\n", base).is_err());
    }
}

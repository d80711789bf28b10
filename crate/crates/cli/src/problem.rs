//! Loading programs and goals from `.fun` sources or `.chc` clause files.

use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use chc_listrem::frontend::{parse_source_named, translate};
use chc_listrem::model::{Clause, ClauseSet};
use chc_listrem::syntax::{parse_chc_in, parse_chc_named};
use chc_listrem::transform::{infer_catamorphisms, Functionality, Lemma};

/// A program with its goals, ready for derivation.
#[derive(Debug, Clone)]
pub struct Problem {
    pub program: ClauseSet,
    pub goals: Vec<Clause>,
    pub functions: Functionality,
}

pub fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn is_source(path: &Path) -> bool {
    path.extension().is_some_and(|e| e == "fun" || e == "scala")
}

/// Reads a `.fun` source through the frontend, anything else as clauses.
/// Goals of a clause file are its `false :- ...` clauses; untagged ones are
/// named by position.
pub fn load(path: &Path) -> Result<Problem> {
    let text = read(path)?;
    let name = path.display().to_string();
    if is_source(path) {
        let fs = parse_source_named(&text, &name)?;
        let t = translate(&fs)?;
        return Ok(Problem { program: t.program, goals: t.goals, functions: t.functions });
    }
    let cs = parse_chc_named(&text, &name)?;
    let mut program = ClauseSet::new();
    for (p, sorts) in &cs.signatures {
        program.declare(p, sorts.clone())?;
    }
    let mut goals = Vec::new();
    for c in cs.clauses {
        if c.is_goal() {
            goals.push(c);
        } else {
            program.push(c)?;
        }
    }
    let functions = Functionality::infer(&program, &infer_catamorphisms(&program));
    let mut p = Problem { program, goals: Vec::new(), functions };
    p.add_goals(goals);
    Ok(p)
}

impl Problem {
    /// Adds the goals of a clause file read in the context of the program.
    pub fn load_goals(&mut self, path: &Path) -> Result<()> {
        let text = read(path)?;
        let mut goals = Vec::new();
        for c in parse_chc_in(&text, &path.display().to_string(), &self.program)?.clauses {
            if !c.is_goal() {
                bail!("{}: `{c}` is not a goal", path.display());
            }
            goals.push(c);
        }
        self.add_goals(goals);
        Ok(())
    }

    fn add_goals(&mut self, goals: Vec<Clause>) {
        for mut g in goals {
            if g.tag.is_none() {
                g.tag = Some(format!("goal{}", self.goals.len() + 1));
            }
            self.goals.push(g);
        }
    }

    pub fn goal(&self, tag: &str) -> Result<&Clause> {
        self.goals.iter().find(|g| g.tag.as_deref() == Some(tag)).ok_or_else(|| {
            let known: Vec<&str> = self.goals.iter().filter_map(|g| g.tag.as_deref()).collect();
            anyhow!("no goal `{tag}` (known: {})", known.join(", "))
        })
    }

    /// The property proved by a goal, read as a lemma.
    pub fn lemma(&self, tag: &str) -> Result<Lemma> {
        let catas = infer_catamorphisms(&self.program);
        Ok(Lemma::from_goal(tag, self.goal(tag)?, &catas)?)
    }
}

/// Clauses one per line, tagged ones prefixed with their tag.
pub fn render(clauses: &[Clause]) -> String {
    clauses
        .iter()
        .map(|c| match &c.tag {
            Some(t) => format!("{t}. {c}\n"),
            None => format!("{c}\n"),
        })
        .collect()
}

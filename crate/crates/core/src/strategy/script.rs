//! Derivation scripts: one transformation command per line.

use std::fmt;

use thiserror::Error;

use crate::transform::FoldMode;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Command {
    /// `define <clause>`
    Define(String),
    /// `unfold-def <def> [atom]`
    UnfoldDef { def: String, atom: Option<usize> },
    /// `unfold <clause-id> <atom>`
    Unfold { clause: String, atom: usize },
    /// `fold <clause-id> <def> [i,j,..]` or `gfold ...`
    Fold { clause: String, def: String, mode: FoldMode, pins: Option<Vec<usize>> },
    /// `lemma <clause-id> <lemma> [i,j,..]`
    Lemma { clause: String, lemma: String, pins: Option<Vec<usize>> },
    /// `total <clause-id> <pred> <params|-> <list-var>`
    Total { clause: String, pred: String, params: Vec<String>, list: String },
    /// `remove <clause-id> <anchor> [i,j,..]`
    Remove { clause: String, anchor: usize, companions: Vec<usize> },
    /// `cleanup`
    Cleanup,
    /// `emit <clause-id>`
    Emit { clause: String },
    /// `auto`
    Auto,
}

fn list(xs: &[usize]) -> String {
    xs.iter().map(usize::to_string).collect::<Vec<_>>().join(",")
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Command::Define(text) => write!(f, "define {text}"),
            Command::UnfoldDef { def, atom: None } => write!(f, "unfold-def {def}"),
            Command::UnfoldDef { def, atom: Some(i) } => write!(f, "unfold-def {def} {i}"),
            Command::Unfold { clause, atom } => write!(f, "unfold {clause} {atom}"),
            Command::Fold { clause, def, mode, pins } => {
                let kw = if *mode == FoldMode::Strict { "fold" } else { "gfold" };
                write!(f, "{kw} {clause} {def}")?;
                if let Some(p) = pins {
                    write!(f, " {}", list(p))?;
                }
                Ok(())
            }
            Command::Lemma { clause, lemma, pins } => {
                write!(f, "lemma {clause} {lemma}")?;
                if let Some(p) = pins {
                    write!(f, " {}", list(p))?;
                }
                Ok(())
            }
            Command::Total { clause, pred, params, list } => {
                let ps = if params.is_empty() { "-".to_string() } else { params.join(",") };
                write!(f, "total {clause} {pred} {ps} {list}")
            }
            Command::Remove { clause, anchor, companions } => {
                write!(f, "remove {clause} {anchor}")?;
                if !companions.is_empty() {
                    write!(f, " {}", list(companions))?;
                }
                Ok(())
            }
            Command::Cleanup => write!(f, "cleanup"),
            Command::Emit { clause } => write!(f, "emit {clause}"),
            Command::Auto => write!(f, "auto"),
        }
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("script line {line}: {message}")]
pub struct ScriptError {
    pub line: usize,
    pub message: String,
}

fn indices(s: &str) -> Result<Vec<usize>, String> {
    s.split(',').map(|x| x.trim().parse::<usize>().map_err(|_| format!("bad index list `{s}`"))).collect()
}

fn index(s: &str) -> Result<usize, String> {
    s.parse::<usize>().map_err(|_| format!("bad index `{s}`"))
}

impl Command {
    /// Parses one non-empty, non-comment line.
    pub fn parse(line: &str) -> Result<Command, String> {
        let line = line.trim();
        let (kw, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        let rest = rest.trim();
        let args: Vec<&str> = rest.split_whitespace().collect();
        let arity = |lo: usize, hi: usize| {
            if args.len() < lo || args.len() > hi {
                Err(format!("`{kw}` takes {lo} to {hi} arguments, got {}", args.len()))
            } else {
                Ok(())
            }
        };
        match kw {
            "define" => {
                if rest.is_empty() {
                    return Err("`define` needs a clause".into());
                }
                Ok(Command::Define(rest.to_string()))
            }
            "unfold-def" => {
                arity(1, 2)?;
                let atom = args.get(1).map(|a| index(a)).transpose()?;
                Ok(Command::UnfoldDef { def: args[0].to_string(), atom })
            }
            "unfold" => {
                arity(2, 2)?;
                Ok(Command::Unfold { clause: args[0].to_string(), atom: index(args[1])? })
            }
            "fold" | "gfold" => {
                arity(2, 3)?;
                let mode = if kw == "fold" { FoldMode::Strict } else { FoldMode::Generalizing };
                let pins = args.get(2).map(|a| indices(a)).transpose()?;
                Ok(Command::Fold { clause: args[0].to_string(), def: args[1].to_string(), mode, pins })
            }
            "lemma" => {
                arity(2, 3)?;
                let pins = args.get(2).map(|a| indices(a)).transpose()?;
                Ok(Command::Lemma { clause: args[0].to_string(), lemma: args[1].to_string(), pins })
            }
            "total" => {
                arity(4, 4)?;
                let params = if args[2] == "-" { vec![] } else { args[2].split(',').map(str::to_string).collect() };
                Ok(Command::Total {
                    clause: args[0].to_string(),
                    pred: args[1].to_string(),
                    params,
                    list: args[3].to_string(),
                })
            }
            "remove" => {
                arity(2, 3)?;
                let companions = args.get(2).map(|a| indices(a)).transpose()?.unwrap_or_default();
                Ok(Command::Remove { clause: args[0].to_string(), anchor: index(args[1])?, companions })
            }
            "cleanup" => {
                arity(0, 0)?;
                Ok(Command::Cleanup)
            }
            "emit" => {
                arity(1, 1)?;
                Ok(Command::Emit { clause: args[0].to_string() })
            }
            "auto" => {
                arity(0, 0)?;
                Ok(Command::Auto)
            }
            other => Err(format!("unknown command `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Script {
    pub commands: Vec<Command>,
}

impl Script {
    /// Blank lines and lines starting with `#` or `%` are skipped.
    pub fn parse(text: &str) -> Result<Script, ScriptError> {
        let mut commands = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let t = line.trim();
            if t.is_empty() || t.starts_with('#') || t.starts_with('%') {
                continue;
            }
            commands.push(Command::parse(t).map_err(|message| ScriptError { line: n + 1, message })?);
        }
        Ok(Script { commands })
    }
}

impl fmt::Display for Script {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.commands {
            writeln!(f, "{c}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn commands_round_trip() {
        let text = "define pl(A,B) :- partition(B,C,D,E), all_leq(B,E,A).\n\
                    fold c0 pl 0,1\ngfold c3 qss\nunfold-def pl\nunfold-def a 4\nunfold c1 0\n\
                    lemma c2 G2 0\ntotal c5 isSorted 0 F\ntotal c5 count - L\nremove c5 0 1,2\n\
                    remove c6 3\ncleanup\nemit c4\nauto\n";
        let s = Script::parse(text).unwrap();
        assert_eq!(s.commands.len(), 14);
        assert_eq!(s.to_string(), text);
    }

    #[test]
    fn comments_and_errors() {
        let s = Script::parse("# hello\n\n% also\nauto\n").unwrap();
        assert_eq!(s.commands, vec![Command::Auto]);
        let e = Script::parse("auto\nfrobnicate c1\n").unwrap_err();
        assert_eq!(e.line, 2);
        assert!(Script::parse("unfold c1 x").is_err());
        assert!(Script::parse("fold c1").is_err());
    }
}

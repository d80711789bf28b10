//! Line-by-line derivation session.

use std::io::{BufRead, Write};

use anyhow::Result;
use chc_listrem::strategy::{Command, DerivationState, Script};

const HELP: &str = "commands: any script command, `undo`, `show`, `freeze <file>`, `help`, `quit`";

/// Runs a session until end of input or `quit`. A command that does not apply
/// leaves the state unchanged.
pub fn run(initial: DerivationState, input: impl BufRead, mut out: impl Write) -> Result<DerivationState> {
    let mut history = vec![initial];
    writeln!(out, "{}", history[0])?;
    for line in input.lines() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with('%') {
            continue;
        }
        let (kw, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        match kw {
            "quit" | "exit" => break,
            "help" => writeln!(out, "{HELP}")?,
            "show" => writeln!(out, "{}", history.last().unwrap())?,
            "undo" => {
                if history.len() > 1 {
                    history.pop();
                    writeln!(out, "{}", history.last().unwrap())?;
                } else {
                    writeln!(out, "nothing to undo")?;
                }
            }
            "freeze" if !rest.trim().is_empty() => {
                let script = Script { commands: history.last().unwrap().trace.clone() };
                match std::fs::write(rest.trim(), script.to_string()) {
                    Ok(()) => writeln!(out, "wrote {} commands to {}", script.commands.len(), rest.trim())?,
                    Err(e) => writeln!(out, "error: {e}")?,
                }
            }
            _ => match Command::parse(line) {
                Err(e) => writeln!(out, "error: {e}")?,
                Ok(cmd) => {
                    let mut next = history.last().unwrap().clone();
                    match next.apply(&cmd) {
                        Ok(()) => {
                            writeln!(out, "{next}")?;
                            history.push(next);
                        }
                        Err(e) => writeln!(out, "error: {e}")?,
                    }
                }
            },
        }
    }
    Ok(history.pop().unwrap())
}

#[cfg(test)]
mod tests {
    use super::*;
    use chc_listrem::syntax::{parse_chc, parse_clause_in};

    const PROGRAM: &str = "
all_leq(X,[],B) :- X>=0, B=true.
all_leq(X,[Y|Ys],B) :- X>=0, Y>=0, X>Y, B=false.
all_leq(X,[Y|Ys],B) :- X=<Y, all_leq(X,Ys,B).
";

    fn state() -> DerivationState {
        let p = parse_chc(PROGRAM).unwrap();
        let g = parse_clause_in("false :- B=false, all_leq(X,[],B).", &p).unwrap();
        DerivationState::new(&p, g, vec![])
    }

    #[test]
    fn undo_restores_the_previous_state() {
        let mut out = Vec::new();
        let st = run(state(), "unfold c0 0\nundo\n".as_bytes(), &mut out).unwrap();
        assert!(st.trace.is_empty());
        let text = String::from_utf8(out).unwrap();
        let first = text.split("transformed:").next().unwrap().to_string();
        assert!(text.matches(&first).count() >= 2, "{text}");
    }

    #[test]
    fn bad_command_keeps_state() {
        let mut out = Vec::new();
        let st = run(state(), "fold c0 nope\nfrobnicate\n".as_bytes(), &mut out).unwrap();
        assert!(st.trace.is_empty());
        assert_eq!(String::from_utf8(out).unwrap().matches("error:").count(), 2);
    }
}

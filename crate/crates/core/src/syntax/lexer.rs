use std::fmt;
use std::path::PathBuf;
use std::sync::Arc;

/// Position of a token in a source file; line and column start at 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SourceSpan {
    pub file: Arc<PathBuf>,
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.file.display(), self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    /// Lowercase identifier: predicate, function or keyword.
    Ident(String),
    /// Uppercase or underscore identifier.
    Var(String),
    Int(i64),
    Sym(&'static str),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) | Tok::Var(s) => write!(f, "`{s}`"),
            Tok::Int(n) => write!(f, "`{n}`"),
            Tok::Sym(s) => write!(f, "`{s}`"),
            Tok::Eof => write!(f, "end of input"),
        }
    }
}

/// Longest symbols first so that `=<` wins over `=`.
const SYMBOLS: &[&str] = &[
    "=\\=", "=/=", "==>", ":-", "=<", ">=", "<=", "==", "!=", "=>", "&&", "||", "(", ")", "[", "]",
    "{", "}", "|", ",", ".", "=", "<", ">", "+", "-", "*", ":", "_",
];

#[derive(Debug, Clone)]
pub struct Token {
    pub tok: Tok,
    pub span: SourceSpan,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexError {
    pub span: SourceSpan,
    pub message: String,
}

/// Tokenizes text. `line_comment` is `%` for clauses and `//` for sources.
pub fn tokenize(text: &str, file: &Arc<PathBuf>, line_comment: &str) -> Result<Vec<Token>, LexError> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    let span = |line, column| SourceSpan { file: file.clone(), line, column };
    let comment: Vec<char> = line_comment.chars().collect();
    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if chars[i..].starts_with(&comment) {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let start = span(line, col);
        if c.is_ascii_digit() {
            let mut j = i;
            while j < chars.len() && chars[j].is_ascii_digit() {
                j += 1;
            }
            let s: String = chars[i..j].iter().collect();
            let n = s.parse::<i64>().map_err(|_| LexError {
                span: start.clone(),
                message: format!("integer literal {s} out of range"),
            })?;
            out.push(Token { tok: Tok::Int(n), span: start });
            col += j - i;
            i = j;
            continue;
        }
        if c.is_alphabetic() || (c == '_' && i + 1 < chars.len() && chars[i + 1].is_alphanumeric()) {
            let mut j = i;
            while j < chars.len() && (chars[j].is_alphanumeric() || chars[j] == '_') {
                j += 1;
            }
            let s: String = chars[i..j].iter().collect();
            let tok = if c.is_uppercase() || c == '_' { Tok::Var(s) } else { Tok::Ident(s) };
            out.push(Token { tok, span: start });
            col += j - i;
            i = j;
            continue;
        }
        let rest: String = chars[i..chars.len().min(i + 3)].iter().collect();
        match SYMBOLS.iter().find(|s| rest.starts_with(**s)) {
            Some(s) => {
                out.push(Token { tok: Tok::Sym(s), span: start });
                i += s.len();
                col += s.len();
            }
            None => {
                return Err(LexError { span: start, message: format!("unexpected character `{c}`") });
            }
        }
    }
    out.push(Token { tok: Tok::Eof, span: span(line, col) });
    Ok(out)
}

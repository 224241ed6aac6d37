use std::path::Path;

use crate::diag::{Diagnostic, SourceSpan};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Num(u64),
    Str(String),
    LBrace,
    RBrace,
    LParen,
    RParen,
    Comma,
    Semi,
    Colon,
    Dot,
    Arrow,
    DArrow,
    Amp,
    Bar,
    Bang,
    Eq,
    Neq,
    Le,
    Lt,
    Ge,
    Gt,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Num(n) => format!("number `{n}`"),
            Tok::Str(s) => format!("string \"{s}\""),
            Tok::Eof => "end of input".into(),
            other => format!("`{}`", other.text()),
        }
    }

    pub fn text(&self) -> &'static str {
        match self {
            Tok::LBrace => "{",
            Tok::RBrace => "}",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::Comma => ",",
            Tok::Semi => ";",
            Tok::Colon => ":",
            Tok::Dot => ".",
            Tok::Arrow => "->",
            Tok::DArrow => "<->",
            Tok::Amp => "&",
            Tok::Bar => "|",
            Tok::Bang => "!",
            Tok::Eq => "=",
            Tok::Neq => "!=",
            Tok::Le => "<=",
            Tok::Lt => "<",
            Tok::Ge => ">=",
            Tok::Gt => ">",
            _ => "",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Token {
    pub tok: Tok,
    pub line: usize,
    pub column: usize,
    pub length: usize,
}

impl Token {
    pub fn span(&self, file: &Path) -> SourceSpan {
        SourceSpan { file: file.to_path_buf(), line: self.line, column: self.column, length: self.length }
    }
}

pub fn lex(text: &str, file: &Path) -> Result<Vec<Token>, Diagnostic> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
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
        if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let start = i;
        let tok = if c.is_ascii_alphabetic() || c == '_' {
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            Tok::Ident(chars[start..i].iter().collect())
        } else if c.is_ascii_digit() {
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            match s.parse() {
                Ok(n) => Tok::Num(n),
                Err(_) => {
                    return Err(Diagnostic::error(
                        "syntax",
                        format!("number `{s}` is too large"),
                        Some(SourceSpan { file: file.to_path_buf(), line, column: col, length: i - start }),
                    ))
                }
            }
        } else if c == '"' {
            i += 1;
            while i < chars.len() && chars[i] != '"' && chars[i] != '\n' {
                i += 1;
            }
            if chars.get(i) != Some(&'"') {
                return Err(Diagnostic::error(
                    "syntax",
                    "unterminated string",
                    Some(SourceSpan { file: file.to_path_buf(), line, column: col, length: i - start }),
                ));
            }
            i += 1;
            Tok::Str(chars[start + 1..i - 1].iter().collect())
        } else {
            let two: String = chars[i..chars.len().min(i + 3)].iter().collect();
            let (tok, len) = if two.starts_with("<->") {
                (Tok::DArrow, 3)
            } else if two.starts_with("->") {
                (Tok::Arrow, 2)
            } else if two.starts_with("!=") {
                (Tok::Neq, 2)
            } else if two.starts_with("<=") {
                (Tok::Le, 2)
            } else if two.starts_with(">=") {
                (Tok::Ge, 2)
            } else {
                let t = match c {
                    '{' => Tok::LBrace,
                    '}' => Tok::RBrace,
                    '(' => Tok::LParen,
                    ')' => Tok::RParen,
                    ',' => Tok::Comma,
                    ';' => Tok::Semi,
                    ':' => Tok::Colon,
                    '.' => Tok::Dot,
                    '&' => Tok::Amp,
                    '|' => Tok::Bar,
                    '!' => Tok::Bang,
                    '=' => Tok::Eq,
                    '<' => Tok::Lt,
                    '>' => Tok::Gt,
                    _ => {
                        return Err(Diagnostic::error(
                            "syntax",
                            format!("unexpected character `{c}`"),
                            Some(SourceSpan { file: file.to_path_buf(), line, column: col, length: 1 }),
                        ))
                    }
                };
                (t, 1)
            };
            i += len;
            tok
        };
        let length = i - start;
        out.push(Token { tok, line, column: col, length });
        col += length;
    }
    out.push(Token { tok: Tok::Eof, line, column: col, length: 0 });
    Ok(out)
}

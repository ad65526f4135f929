//! Tokens for documents and kernel expressions.
//!
//! `⊥` and `_|_` both lex to the word `_|_`; `⊗` and `(x)` both lex to
//! [`Tok::Tensor`], the latter only in expression mode.

use std::fmt;

use crate::error::{ErrorKind, ParseError, Pos};

pub const BOTTOM: &str = "_|_";

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Word(String),
    Star,
    LBrace,
    RBrace,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Colon,
    Semi,
    Arrow,
    Equals,
    Slash,
    Tensor,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Word(w) => write!(f, "`{w}`"),
            Tok::Star => f.write_str("`*`"),
            Tok::LBrace => f.write_str("`{`"),
            Tok::RBrace => f.write_str("`}`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::LBracket => f.write_str("`[`"),
            Tok::RBracket => f.write_str("`]`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Colon => f.write_str("`:`"),
            Tok::Semi => f.write_str("`;`"),
            Tok::Arrow => f.write_str("`->`"),
            Tok::Equals => f.write_str("`=`"),
            Tok::Slash => f.write_str("`/`"),
            Tok::Tensor => f.write_str("`(x)`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    pub tok: Tok,
    pub pos: Pos,
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '_' | '\'' | '.')
}

/// Splits `text` into tokens ending with [`Tok::Eof`].
pub fn lex(text: &str, expr_mode: bool) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    let starts = |i: usize, s: &str| s.chars().enumerate().all(|(k, c)| chars.get(i + k) == Some(&c));
    while i < chars.len() {
        let pos = Pos { line, col };
        let c = chars[i];
        let (tok, len) = if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        } else if c.is_whitespace() {
            (None, 1)
        } else if c == '#' {
            let mut n = 0;
            while i + n < chars.len() && chars[i + n] != '\n' {
                n += 1;
            }
            (None, n)
        } else if starts(i, BOTTOM) || c == '⊥' {
            let n = if c == '⊥' { 1 } else { 3 };
            (Some(Tok::Word(BOTTOM.to_string())), n)
        } else if expr_mode && starts(i, "(x)") {
            (Some(Tok::Tensor), 3)
        } else if c == '⊗' {
            (Some(Tok::Tensor), 1)
        } else if starts(i, "->") {
            (Some(Tok::Arrow), 2)
        } else if c == '→' {
            (Some(Tok::Arrow), 1)
        } else if is_word_char(c) || (c == '-' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())) {
            let mut n = 1;
            while i + n < chars.len() && is_word_char(chars[i + n]) {
                n += 1;
            }
            (Some(Tok::Word(chars[i..i + n].iter().collect())), n)
        } else {
            let tok = match c {
                '*' | '×' => Tok::Star,
                '{' => Tok::LBrace,
                '}' => Tok::RBrace,
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                '[' => Tok::LBracket,
                ']' => Tok::RBracket,
                ',' => Tok::Comma,
                ':' => Tok::Colon,
                ';' => Tok::Semi,
                '=' => Tok::Equals,
                '/' => Tok::Slash,
                _ => {
                    return Err(ParseError::new(
                        ErrorKind::Lexical,
                        pos,
                        format!("unexpected character `{c}`"),
                    ))
                }
            };
            (Some(tok), 1)
        };
        if let Some(tok) = tok {
            out.push(Token { tok, pos });
        }
        i += len;
        col += len;
    }
    out.push(Token {
        tok: Tok::Eof,
        pos: Pos { line, col },
    });
    Ok(out)
}

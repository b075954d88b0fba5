//! Surface syntax.
//!
//! ```text
//! alt     := conj ('|' conj)*
//! conj    := cat ('&' cat)*
//! cat     := unary*
//! unary   := '~' unary | postfix
//! postfix := atom ('*' | '{' k '}')*
//! atom    := '(' alt ')' | '()' | '.' | '[' class ']' | '\' escape | char
//! ```
//!
//! `()` is ε, `[]` and `⊥` are the empty language, `.` is any character.
//! Unescaped whitespace is ignored. Escapes: `\d`, `\n`, `\t`, and `\c`
//! for any other `c` taken literally.

use thiserror::Error;

use crate::pred::Pred;
use crate::regex::{Interner, Re};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
#[error("at {pos}: {msg}")]
pub struct ParseError {
    /// Character offset.
    pub pos: usize,
    pub msg: String,
}

struct Parser<'a> {
    chars: Vec<char>,
    pos: usize,
    i: &'a mut Interner,
}

pub fn parse(i: &mut Interner, text: &str) -> Result<Re, ParseError> {
    let mut p = Parser {
        chars: text.chars().collect(),
        pos: 0,
        i,
    };
    let r = p.alt()?;
    p.skip_ws();
    if p.pos < p.chars.len() {
        return p.fail(format!("unexpected `{}`", p.chars[p.pos]));
    }
    Ok(r)
}

impl Parser<'_> {
    fn fail<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError {
            pos: self.pos,
            msg: msg.into(),
        })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn alt(&mut self) -> Result<Re, ParseError> {
        let mut items = vec![self.conj()?];
        while self.eat('|') {
            items.push(self.conj()?);
        }
        Ok(if items.len() == 1 { items[0] } else { self.i.or(&items) })
    }

    fn conj(&mut self) -> Result<Re, ParseError> {
        let mut items = vec![self.cat()?];
        while self.eat('&') {
            items.push(self.cat()?);
        }
        Ok(if items.len() == 1 { items[0] } else { self.i.and(&items) })
    }

    fn cat(&mut self) -> Result<Re, ParseError> {
        let mut parts = Vec::new();
        while let Some(c) = self.peek() {
            if matches!(c, '|' | '&' | ')') {
                break;
            }
            parts.push(self.unary()?);
        }
        if parts.is_empty() {
            return self.fail("expected an expression");
        }
        let mut r = Interner::EPS;
        for &p in parts.iter().rev() {
            r = self.i.concat(p, r);
        }
        Ok(r)
    }

    fn unary(&mut self) -> Result<Re, ParseError> {
        if self.eat('~') {
            let r = self.unary()?;
            return Ok(self.i.not(r));
        }
        self.postfix()
    }

    fn postfix(&mut self) -> Result<Re, ParseError> {
        let mut r = self.atom()?;
        loop {
            if self.eat('*') {
                r = self.i.star(r);
            } else if self.eat('{') {
                let k = self.number()?;
                if !self.eat('}') {
                    return self.fail("expected `}`");
                }
                r = self.i.power(r, k);
            } else {
                return Ok(r);
            }
        }
    }

    fn number(&mut self) -> Result<u32, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        match s.parse::<u32>() {
            Ok(k) if k <= 10_000 => Ok(k),
            _ => {
                self.pos = start;
                self.fail("expected a repetition count up to 10000")
            }
        }
    }

    fn atom(&mut self) -> Result<Re, ParseError> {
        let Some(c) = self.peek() else {
            return self.fail("unexpected end of input");
        };
        self.pos += 1;
        match c {
            '(' => {
                if self.eat(')') {
                    return Ok(Interner::EPS);
                }
                let r = self.alt()?;
                if !self.eat(')') {
                    return self.fail("expected `)`");
                }
                Ok(r)
            }
            '.' => Ok(self.i.top()),
            '⊥' => Ok(Interner::BOT),
            '[' => {
                let p = self.class()?;
                Ok(self.i.pred(p))
            }
            '\\' => {
                let p = self.escape()?;
                Ok(self.i.pred(p))
            }
            '*' | '{' | '}' | ']' => {
                self.pos -= 1;
                self.fail(format!("unexpected `{c}`"))
            }
            _ => match Pred::char(c) {
                Some(p) => Ok(self.i.pred(p)),
                None => {
                    self.pos -= 1;
                    self.fail(format!("`{c}` is outside the 7-bit alphabet"))
                }
            },
        }
    }

    fn escape(&mut self) -> Result<Pred, ParseError> {
        let Some(&c) = self.chars.get(self.pos) else {
            return self.fail("dangling `\\`");
        };
        self.pos += 1;
        let p = match c {
            'd' => Pred::digit(),
            'n' => Pred::char('\n').unwrap(),
            't' => Pred::char('\t').unwrap(),
            _ => match Pred::char(c) {
                Some(p) => p,
                None => return self.fail(format!("`{c}` is outside the 7-bit alphabet")),
            },
        };
        Ok(p)
    }

    /// After `[`; reads through the closing `]`.
    fn class(&mut self) -> Result<Pred, ParseError> {
        let negate = self.chars.get(self.pos) == Some(&'^');
        if negate {
            self.pos += 1;
        }
        let mut set = Pred::BOT;
        loop {
            let Some(&c) = self.chars.get(self.pos) else {
                return self.fail("unterminated class");
            };
            self.pos += 1;
            let lo = match c {
                ']' => break,
                '\\' => {
                    let p = self.escape()?;
                    if p.len() != 1 {
                        set = set.or(p);
                        continue;
                    }
                    p.min_char().unwrap()
                }
                _ => c,
            };
            if self.chars.get(self.pos) == Some(&'-') && self.chars.get(self.pos + 1).is_some_and(|&n| n != ']') {
                self.pos += 1;
                let mut hi = self.chars[self.pos];
                self.pos += 1;
                if hi == '\\' {
                    let p = self.escape()?;
                    hi = p.min_char().unwrap_or('\0');
                }
                if hi < lo {
                    return self.fail(format!("empty range {lo}-{hi}"));
                }
                set = set.or(Pred::range(lo, hi));
            } else {
                match Pred::char(lo) {
                    Some(p) => set = set.or(p),
                    None => return self.fail(format!("`{lo}` is outside the 7-bit alphabet")),
                }
            }
        }
        Ok(if negate { !set } else { set })
    }
}

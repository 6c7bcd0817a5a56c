//! A tiny expression language over intervals, e.g.
//! `join_k([0,0.3], [0.7,1])` or `is_consistent(meet_k([0.1,0.2],[0.3,0.4]))`.

use std::fmt;

use super::{and_ig, is_consistent, join_k, leq_b, leq_k, meet_k, or_ig, ProbInterval};
use crate::prob::parse_literal;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IalgValue {
    Interval(ProbInterval),
    Bool(bool),
}

impl fmt::Display for IalgValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IalgValue::Interval(i) if i.is_consistent() => write!(f, "{i}"),
            IalgValue::Interval(i) => write!(f, "{i} (inconsistent)"),
            IalgValue::Bool(b) => write!(f, "{b}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("at offset {offset}: {message}")]
pub struct IalgError {
    pub offset: usize,
    pub message: String,
}

pub const OPERATORS: &[&str] =
    &["leq_b", "leq_k", "meet_k", "join_k", "and_ig", "or_ig", "is_consistent"];

pub fn evaluate(text: &str) -> Result<IalgValue, IalgError> {
    let mut p = ExprParser { text, pos: 0 };
    let value = p.expr()?;
    p.skip_ws();
    if p.pos != text.len() {
        return Err(p.error("trailing input"));
    }
    Ok(value)
}

struct ExprParser<'a> {
    text: &'a str,
    pos: usize,
}

impl ExprParser<'_> {
    fn error(&self, message: impl Into<String>) -> IalgError {
        IalgError { offset: self.pos, message: message.into() }
    }

    fn skip_ws(&mut self) {
        let rest = &self.text[self.pos..];
        self.pos += rest.len() - rest.trim_start().len();
    }

    fn eat(&mut self, c: char) -> Result<(), IalgError> {
        self.skip_ws();
        if self.text[self.pos..].starts_with(c) {
            self.pos += c.len_utf8();
            Ok(())
        } else {
            Err(self.error(format!("expected `{c}`")))
        }
    }

    fn take_while(&mut self, pred: impl Fn(char) -> bool) -> &str {
        self.skip_ws();
        let start = self.pos;
        let len: usize = self.text[start..].chars().take_while(|&c| pred(c)).map(char::len_utf8).sum();
        self.pos += len;
        &self.text[start..self.pos]
    }

    fn number(&mut self) -> Result<crate::prob::Prob, IalgError> {
        let start = self.pos;
        let lit = self.take_while(|c| c.is_ascii_digit() || c == '.' || c == '/').to_string();
        parse_literal(&lit).map_err(|e| IalgError { offset: start, message: e.to_string() })
    }

    fn interval(&mut self) -> Result<ProbInterval, IalgError> {
        self.eat('[')?;
        let lo = self.number()?;
        self.eat(',')?;
        let hi = self.number()?;
        self.eat(']')?;
        ProbInterval::new(lo, hi).map_err(|e| self.error(e.to_string()))
    }

    fn interval_arg(&mut self) -> Result<ProbInterval, IalgError> {
        let at = self.pos;
        match self.expr()? {
            IalgValue::Interval(i) => Ok(i),
            IalgValue::Bool(_) => Err(IalgError { offset: at, message: "expected an interval".into() }),
        }
    }

    fn expr(&mut self) -> Result<IalgValue, IalgError> {
        self.skip_ws();
        if self.text[self.pos..].starts_with('[') {
            return self.interval().map(IalgValue::Interval);
        }
        let at = self.pos;
        let name = self.take_while(|c| c.is_ascii_alphanumeric() || c == '_').to_string();
        if name.is_empty() {
            return Err(self.error("expected an interval or an operator"));
        }
        self.eat('(')?;
        let first = self.interval_arg()?;
        if name == "is_consistent" {
            self.eat(')')?;
            return Ok(IalgValue::Bool(is_consistent(&first)));
        }
        self.eat(',')?;
        let second = self.interval_arg()?;
        self.eat(')')?;
        Ok(match name.as_str() {
            "leq_b" => IalgValue::Bool(leq_b(&first, &second)),
            "leq_k" => IalgValue::Bool(leq_k(&first, &second)),
            "meet_k" => IalgValue::Interval(meet_k(&first, &second)),
            "join_k" => IalgValue::Interval(join_k(&first, &second)),
            "and_ig" => IalgValue::Interval(and_ig(&first, &second)),
            "or_ig" => IalgValue::Interval(or_ig(&first, &second)),
            _ => {
                return Err(IalgError {
                    offset: at,
                    message: format!("unknown operator `{name}` (expected one of {})", OPERATORS.join(", ")),
                })
            }
        })
    }
}

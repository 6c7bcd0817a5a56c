//! Recursive-descent parser for programs, queries and evolution skeletons.

use crate::model::{
    AnnotatedFormula, BasicFormula, Calendar, CalendarError, CmpOp, Connective, ConstraintExpr, Diagnostic,
    DiagnosticKind, ObjTerm, SourceSpan, TAtom, TPAnnotation, TPClause, TemporalConstraint, TimeExpr, TimeTerm,
    WeightFunction,
};
use crate::prob::{parse_literal, Prob};

use super::lexer::{lex, Tok, Token};

pub(crate) type PResult<T> = Result<T, Diagnostic>;

const KEYWORDS: &[&str] = &["and", "or", "not"];

/// How the time position of a t-atom may be written.
#[derive(Clone, Copy, PartialEq, Eq)]
pub(crate) enum TimeSyntax {
    /// `@Y` or `@3`.
    Program,
    /// `@3` or `@*`; `*` becomes the variable `Y`.
    Query,
    /// Optional `@Y`; a missing time position becomes `Y`.
    Skeleton,
}

pub(crate) struct Parser {
    toks: Vec<Token>,
    pos: usize,
    pub diags: Vec<Diagnostic>,
    /// Set when the last parsed query atom used `*`.
    pub saw_wildcard: bool,
}

impl Parser {
    pub fn new(src: &str) -> Self {
        let (toks, diags) = lex(src);
        Parser { toks, pos: 0, diags, saw_wildcard: false }
    }

    pub fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, n: usize) -> &Tok {
        let i = (self.pos + n).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    pub fn span(&self) -> SourceSpan {
        self.toks[self.pos].span
    }

    fn prev_span(&self) -> SourceSpan {
        self.toks[self.pos.saturating_sub(1)].span
    }

    pub fn at_eof(&self) -> bool {
        matches!(self.peek(), Tok::Eof)
    }

    pub fn advance(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if !matches!(t.tok, Tok::Eof) {
            self.pos += 1;
        }
        t
    }

    pub fn error(&self, message: impl Into<String>) -> Diagnostic {
        Diagnostic::error(DiagnosticKind::Syntax, self.span(), message)
    }

    fn unexpected(&self, expected: &str) -> Diagnostic {
        self.error(format!("expected {expected}, found {}", self.peek().describe()))
    }

    pub fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.advance();
            true
        } else {
            false
        }
    }

    pub fn expect(&mut self, tok: Tok, what: &str) -> PResult<SourceSpan> {
        if *self.peek() == tok {
            Ok(self.advance().span)
        } else {
            Err(self.unexpected(what))
        }
    }

    fn eat_keyword(&mut self, kw: &str) -> bool {
        if matches!(self.peek(), Tok::Ident(s) if s == kw) {
            self.advance();
            true
        } else {
            false
        }
    }

    pub fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    /// Skips past the next top-level `.` so parsing can resume with the
    /// following clause.
    pub fn recover(&mut self) {
        loop {
            match self.advance().tok {
                Tok::Dot | Tok::Eof => return,
                _ => {}
            }
        }
    }

    fn int(&mut self) -> PResult<i64> {
        let negative = self.eat(&Tok::Minus);
        match self.peek().clone() {
            Tok::Int(text) => {
                let span = self.advance().span;
                let text = if negative { format!("-{text}") } else { text };
                text.parse().map_err(|_| Diagnostic::error(DiagnosticKind::Syntax, span, format!("integer `{text}` is out of range")))
            }
            _ => Err(self.unexpected("an integer")),
        }
    }

    pub fn calendar_decl(&mut self) -> PResult<Calendar> {
        let start = self.span();
        if !self.eat_keyword("calendar") {
            return Err(self.unexpected("`calendar FIRST..LAST.`"));
        }
        let first = self.int()?;
        self.expect(Tok::DotDot, "`..`")?;
        let last = self.int()?;
        self.expect(Tok::Dot, "`.`")?;
        Calendar::range(first, last).map_err(|e| {
            let kind = match e {
                CalendarError::Empty(..) => DiagnosticKind::Syntax,
                CalendarError::TooLarge(..) => DiagnosticKind::CalendarTooLarge,
            };
            Diagnostic::error(kind, start.to(self.prev_span()), e.to_string())
        })
    }

    pub fn clause(&mut self) -> PResult<TPClause> {
        let start = self.span();
        let head = self.tatom(TimeSyntax::Program)?;
        self.expect(Tok::Colon, "`:` before the head annotation")?;
        let head_annot = self.annotation()?;
        let mut body = Vec::new();
        if self.eat(&Tok::ColonDash) {
            loop {
                let formula = self.basic_formula(TimeSyntax::Program)?;
                self.expect(Tok::Colon, "`:` before an annotation")?;
                let annot = self.annotation()?;
                body.push(AnnotatedFormula { formula, annot });
                if !self.eat_keyword("and") {
                    break;
                }
            }
        }
        self.expect(Tok::Dot, "`.` at the end of the clause")?;
        Ok(TPClause { head, head_annot, body, span: start.to(self.prev_span()) })
    }

    pub fn tatom(&mut self, time: TimeSyntax) -> PResult<TAtom> {
        let start = self.span();
        let predicate = match self.peek().clone() {
            Tok::Ident(name) if !KEYWORDS.contains(&name.as_str()) => {
                self.advance();
                name
            }
            _ => return Err(self.unexpected("a predicate name")),
        };
        let mut args = Vec::new();
        if self.eat(&Tok::LParen) {
            loop {
                let term = match self.peek().clone() {
                    Tok::Ident(c) | Tok::Int(c) => ObjTerm::Const(c),
                    Tok::Var(v) => ObjTerm::Var(v),
                    _ => return Err(self.unexpected("a constant or an object variable")),
                };
                self.advance();
                args.push(term);
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
            self.expect(Tok::RParen, "`)`")?;
        }
        let time = match time {
            TimeSyntax::Skeleton => {
                if self.eat(&Tok::At) {
                    self.time_var()?;
                }
                TimeTerm::Var("Y".into())
            }
            TimeSyntax::Program => {
                self.expect(Tok::At, "`@` and a time position")?;
                if matches!(self.peek(), Tok::Var(_)) {
                    TimeTerm::Var(self.time_var()?)
                } else {
                    TimeTerm::Point(self.int()?)
                }
            }
            TimeSyntax::Query => {
                self.expect(Tok::At, "`@` and a time point or `*`")?;
                if self.eat(&Tok::Star) {
                    self.saw_wildcard = true;
                    TimeTerm::Var("Y".into())
                } else {
                    TimeTerm::Point(self.int()?)
                }
            }
        };
        Ok(TAtom { predicate, args, time, span: start.to(self.prev_span()) })
    }

    fn time_var(&mut self) -> PResult<String> {
        match self.peek().clone() {
            Tok::Var(v) if v.starts_with('Y') => {
                self.advance();
                Ok(v)
            }
            Tok::Var(v) => Err(self.error(format!("temporal variables start with `Y`, found `{v}`"))),
            _ => Err(self.unexpected("a temporal variable")),
        }
    }

    pub fn basic_formula(&mut self, time: TimeSyntax) -> PResult<BasicFormula> {
        let start = self.span();
        let mut atoms = vec![self.tatom(time)?];
        let mut connective = Connective::Single;
        loop {
            let next = if self.is_keyword("and") {
                Connective::And
            } else if self.is_keyword("or") {
                Connective::Or
            } else {
                break;
            };
            if connective != Connective::Single && connective != next {
                return Err(self.error("a compound formula must use a single connective"));
            }
            connective = next;
            self.advance();
            atoms.push(self.tatom(time)?);
        }
        Ok(BasicFormula { connective, atoms, span: start.to(self.prev_span()) })
    }

    pub fn annotation(&mut self) -> PResult<TPAnnotation> {
        let start = self.expect(Tok::Lt, "`<` opening an annotation")?;
        let cstart = self.span();
        let mut principal = None;
        let expr = self.constraint_or(&mut principal)?;
        let constraint = TemporalConstraint {
            principal: principal.expect("a constraint has at least one leaf"),
            expr,
            span: cstart.to(self.prev_span()),
        };
        self.expect(Tok::Comma, "`,` after the constraint")?;
        let lower = self.weights()?;
        self.expect(Tok::Comma, "`,` between weight functions")?;
        let upper = self.weights()?;
        self.expect(Tok::Gt, "`>` closing the annotation")?;
        Ok(TPAnnotation { constraint, lower, upper, span: start.to(self.prev_span()) })
    }

    fn constraint_or(&mut self, principal: &mut Option<String>) -> PResult<ConstraintExpr> {
        let mut lhs = self.constraint_and(principal)?;
        while self.eat_keyword("or") {
            let rhs = self.constraint_and(principal)?;
            lhs = ConstraintExpr::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn constraint_and(&mut self, principal: &mut Option<String>) -> PResult<ConstraintExpr> {
        let mut lhs = self.constraint_not(principal)?;
        while self.eat_keyword("and") {
            let rhs = self.constraint_not(principal)?;
            lhs = ConstraintExpr::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn constraint_not(&mut self, principal: &mut Option<String>) -> PResult<ConstraintExpr> {
        if self.eat_keyword("not") {
            return Ok(ConstraintExpr::not(self.constraint_not(principal)?));
        }
        if self.eat(&Tok::LParen) {
            let inner = self.constraint_or(principal)?;
            self.expect(Tok::RParen, "`)`")?;
            return Ok(inner);
        }
        self.constraint_leaf(principal)
    }

    fn constraint_leaf(&mut self, principal: &mut Option<String>) -> PResult<ConstraintExpr> {
        let var_span = self.span();
        let var = self.time_var()?;
        match principal {
            Some(p) if *p != var => {
                return Err(Diagnostic::error(
                    DiagnosticKind::TemporalVariableMismatch,
                    var_span,
                    format!("every comparison must constrain the principal variable {p}, found {var}"),
                ))
            }
            Some(_) => {}
            None => *principal = Some(var),
        }
        let op = match self.peek() {
            Tok::Le => CmpOp::Le,
            Tok::Lt => CmpOp::Lt,
            Tok::Eq => CmpOp::Eq,
            Tok::Ne => CmpOp::Ne,
            Tok::Gt => CmpOp::Gt,
            Tok::Ge => CmpOp::Ge,
            Tok::Colon => {
                self.advance();
                return self.range_rest();
            }
            Tok::ColonDash => {
                // `Y:-3~5`: split the `:-` token into `:` and `-`.
                let span = self.span();
                self.toks[self.pos] = Token { tok: Tok::Minus, span: SourceSpan { start: span.start + 1, column: span.column + 1, ..span } };
                return self.range_rest();
            }
            _ => return Err(self.unexpected("a comparison operator or `:`")),
        };
        self.advance();
        Ok(ConstraintExpr::Cmp(op, self.time_expr()?))
    }

    fn range_rest(&mut self) -> PResult<ConstraintExpr> {
        let lo = self.time_expr()?;
        self.expect(Tok::Tilde, "`~` in a range")?;
        let hi = self.time_expr()?;
        Ok(ConstraintExpr::Range(lo, hi))
    }

    fn time_expr(&mut self) -> PResult<TimeExpr> {
        let mut lhs = self.time_term()?;
        loop {
            if self.eat(&Tok::Plus) {
                lhs = TimeExpr::Add(Box::new(lhs), Box::new(self.time_term()?));
            } else if self.eat(&Tok::Minus) {
                lhs = TimeExpr::Sub(Box::new(lhs), Box::new(self.time_term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn time_term(&mut self) -> PResult<TimeExpr> {
        let mut lhs = self.time_factor()?;
        while self.eat(&Tok::Star) {
            lhs = TimeExpr::Mul(Box::new(lhs), Box::new(self.time_factor()?));
        }
        Ok(lhs)
    }

    fn time_factor(&mut self) -> PResult<TimeExpr> {
        match self.peek().clone() {
            Tok::Int(_) => Ok(TimeExpr::Int(self.int()?)),
            Tok::Minus if matches!(self.peek_at(1), Tok::Int(_)) => Ok(TimeExpr::Int(self.int()?)),
            Tok::Minus => {
                self.advance();
                Ok(TimeExpr::Neg(Box::new(self.time_factor()?)))
            }
            Tok::Var(_) => Ok(TimeExpr::Var(self.time_var()?)),
            Tok::LParen => {
                self.advance();
                let inner = self.time_expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            _ => Err(self.unexpected("a temporal term")),
        }
    }

    fn weights(&mut self) -> PResult<WeightFunction> {
        if self.eat(&Tok::Hash) {
            return Ok(WeightFunction::Sharp);
        }
        if self.eat_keyword("uniform") {
            return Ok(WeightFunction::Uniform);
        }
        self.expect(Tok::LBracket, "`#`, `uniform` or a `[...]` weight list")?;
        let mut values = vec![self.number()?];
        while self.eat(&Tok::Comma) {
            values.push(self.number()?);
        }
        self.expect(Tok::RBracket, "`]`")?;
        Ok(WeightFunction::List(values))
    }

    pub fn number(&mut self) -> PResult<Prob> {
        let start = self.span();
        let text = match self.peek().clone() {
            Tok::Decimal(d) => {
                self.advance();
                d
            }
            Tok::Int(n) => {
                self.advance();
                if self.eat(&Tok::Slash) {
                    match self.peek().clone() {
                        Tok::Int(d) => {
                            self.advance();
                            format!("{n}/{d}")
                        }
                        _ => return Err(self.unexpected("a denominator")),
                    }
                } else {
                    n
                }
            }
            _ => return Err(self.unexpected("a probability")),
        };
        let span = start.to(self.prev_span());
        parse_literal(&text).map_err(|e| Diagnostic::error(DiagnosticKind::BadLiteral, span, e.to_string()))
    }

    /// `$name` label used by skeleton files in place of an annotation.
    pub fn label(&mut self) -> PResult<String> {
        self.expect(Tok::Dollar, "`$label`")?;
        match self.peek().clone() {
            Tok::Ident(s) | Tok::Var(s) | Tok::Int(s) => {
                self.advance();
                Ok(s)
            }
            _ => Err(self.unexpected("a formula label")),
        }
    }
}

//! The `.tpl` program format, `.tpq` queries and the evolution skeleton
//! format.
//!
//! ```text
//! program  := "calendar" INT ".." INT "." clause*
//! clause   := tatom ":" annot ( ":-" bform ":" annot ( "and" bform ":" annot )* )? "."
//! tatom    := IDENT ( "(" term ( "," term )* ")" )? "@" ( TVAR | INT )
//! bform    := tatom ( ( "and" | "or" ) tatom )*          -- one connective only
//! annot    := "<" constr "," weights "," weights ">"
//! constr   := constr "or" constr | constr "and" constr | "not" constr
//!           | "(" constr ")" | TVAR OP iexpr | TVAR ":" iexpr "~" iexpr
//! weights  := "#" | "uniform" | "[" NUM ( "," NUM )* "]"
//! ```
//!
//! Constants start lowercase, object variables uppercase, temporal
//! variables with `Y`. `%` starts a comment. Inside a body, `and` between
//! two t-atoms builds a compound formula; `and` after an annotation starts
//! the next conjunct.

mod grammar;
mod lexer;
mod render;
mod skeleton;

use crate::model::{
    Diagnostic, DiagnosticKind, PTProgram, TPAnnotation, BasicFormula, TimePoint, TimeTerm,
};

use grammar::{Parser, TimeSyntax};

pub use render::{render, render_clause, render_unfolded};
pub use skeleton::parse_skeleton;

/// Parses and validates a program. On failure every syntax error and
/// validation diagnostic found is returned, not just the first.
pub fn parse_program(text: &str) -> Result<PTProgram, Vec<Diagnostic>> {
    parse_program_with_warnings(text).map(|(p, _)| p)
}

/// Like [`parse_program`], also returning the warnings of a valid program.
pub fn parse_program_with_warnings(text: &str) -> Result<(PTProgram, Vec<Diagnostic>), Vec<Diagnostic>> {
    let mut p = Parser::new(text);
    let calendar = match p.calendar_decl() {
        Ok(c) => Some(c),
        Err(d) => {
            p.diags.push(d);
            p.recover();
            None
        }
    };
    let mut clauses = Vec::new();
    while !p.at_eof() {
        match p.clause() {
            Ok(c) => clauses.push(c),
            Err(d) => {
                p.diags.push(d);
                p.recover();
            }
        }
    }
    let mut diags = std::mem::take(&mut p.diags);
    let Some(calendar) = calendar else {
        return Err(diags);
    };
    let program = PTProgram::new(calendar, clauses);
    diags.extend(program.validate());
    if diags.iter().any(Diagnostic::is_error) {
        diags.sort_by_key(|d| (d.span.start, d.kind));
        Err(diags)
    } else {
        Ok((program, diags))
    }
}

/// Where a tightening query is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TightenAt {
    Point(TimePoint),
    /// Every calendar point (`@*`).
    All,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Query {
    /// `?entail F : <C, wl, wu>.`
    Entail { formula: BasicFormula, annot: TPAnnotation },
    /// `?tighten F.` with atoms at a time point or at `*`.
    Tighten { formula: BasicFormula, at: TightenAt },
}

impl Query {
    pub fn formula(&self) -> &BasicFormula {
        match self {
            Query::Entail { formula, .. } | Query::Tighten { formula, .. } => formula,
        }
    }
}

pub fn parse_query(text: &str) -> Result<Query, Vec<Diagnostic>> {
    let mut p = Parser::new(text);
    let result = query(&mut p);
    let mut diags = std::mem::take(&mut p.diags);
    match result {
        Ok(q) if diags.is_empty() => Ok(q),
        Ok(_) => Err(diags),
        Err(d) => {
            diags.push(d);
            Err(diags)
        }
    }
}

fn query(p: &mut Parser) -> Result<Query, Diagnostic> {
    p.expect(lexer::Tok::Question, "`?entail` or `?tighten`")?;
    let q = if p.is_keyword("entail") {
        p.advance();
        let formula = p.basic_formula(TimeSyntax::Program)?;
        p.expect(lexer::Tok::Colon, "`:` before the annotation")?;
        let annot = p.annotation()?;
        for atom in &formula.atoms {
            if let TimeTerm::Var(v) = &atom.time {
                if v != annot.principal() {
                    return Err(Diagnostic::error(
                        DiagnosticKind::TemporalVariableMismatch,
                        atom.span,
                        format!("`{atom}` uses {v} but the annotation binds {}", annot.principal()),
                    ));
                }
            }
        }
        Query::Entail { formula, annot }
    } else if p.is_keyword("tighten") {
        p.advance();
        p.saw_wildcard = false;
        let formula = p.basic_formula(TimeSyntax::Query)?;
        let at = if p.saw_wildcard {
            TightenAt::All
        } else {
            TightenAt::Point(formula.atoms[0].time_point().expect("query atoms without `*` are ground in time"))
        };
        Query::Tighten { formula, at }
    } else {
        return Err(p.error("expected `entail` or `tighten` after `?`"));
    };
    p.expect(lexer::Tok::Dot, "`.` ending the query")?;
    if !p.at_eof() {
        return Err(p.error("only one query per input"));
    }
    if let Some(atom) = q.formula().atoms.iter().find(|a| !a.is_object_ground()) {
        return Err(Diagnostic::error(
            DiagnosticKind::NonGroundQuery,
            atom.span,
            format!("query atom `{atom}` must not contain object variables"),
        ));
    }
    Ok(q)
}

#[cfg(test)]
mod tests;

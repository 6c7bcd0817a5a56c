use crate::compression::{LabeledFormula, Skeleton, SkeletonClause};
use crate::model::{BasicFormula, Diagnostic};

use super::grammar::{PResult, Parser, TimeSyntax};
use super::lexer::Tok;

/// Parses an evolution skeleton: a calendar line followed by clauses whose
/// annotations are replaced by `$label` references into a slice table.
///
/// ```text
/// calendar 1..2.
/// arrived(letter, paris) : $h :- sent(letter, paris) : $b.
/// ```
pub fn parse_skeleton(text: &str) -> Result<Skeleton, Vec<Diagnostic>> {
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
        match clause(&mut p) {
            Ok(c) => clauses.push(c),
            Err(d) => {
                p.diags.push(d);
                p.recover();
            }
        }
    }
    let diags = std::mem::take(&mut p.diags);
    match calendar {
        Some(calendar) if diags.is_empty() => Ok(Skeleton { calendar, clauses }),
        _ => Err(diags),
    }
}

fn clause(p: &mut Parser) -> PResult<SkeletonClause> {
    let head_atom = p.tatom(TimeSyntax::Skeleton)?;
    p.expect(Tok::Colon, "`:` before the head label")?;
    let head = LabeledFormula { formula: BasicFormula::single(head_atom), label: p.label()? };
    let mut body = Vec::new();
    if p.eat(&Tok::ColonDash) {
        loop {
            let formula = p.basic_formula(TimeSyntax::Skeleton)?;
            p.expect(Tok::Colon, "`:` before a label")?;
            body.push(LabeledFormula { formula, label: p.label()? });
            if !p.is_keyword("and") {
                break;
            }
            p.advance();
        }
    }
    p.expect(Tok::Dot, "`.` at the end of the clause")?;
    Ok(SkeletonClause { head, body })
}

use std::fmt::Write;

use crate::ground::{PClause, PProgram};
use crate::model::{AnnotatedFormula, BasicFormula, Calendar, PTProgram, TPAnnotation, TPClause};

/// Writes a program back in the `.tpl` format. Parsing the output yields a
/// program equal to `p`.
pub fn render(p: &PTProgram) -> String {
    let mut out = format!("calendar {}.\n", p.calendar);
    for c in &p.clauses {
        out.push_str(&render_clause(c));
        out.push('\n');
    }
    out
}

pub fn render_clause(c: &TPClause) -> String {
    let mut s = format!("{} : {}", c.head, c.head_annot);
    for (i, b) in c.body.iter().enumerate() {
        s.push_str(if i == 0 { " :- " } else { " and " });
        write!(s, "{} : {}", b.formula, b.annot).unwrap();
    }
    s.push('.');
    s
}

/// Writes an unfolded program with one constant annotation `<Y=t, [lo], [hi]>`
/// per basic formula.
pub fn render_unfolded(pp: &PProgram, calendar: &Calendar) -> String {
    let clauses = pp.clauses.iter().map(as_tp_clause).collect();
    render(&PTProgram::new(*calendar, clauses))
}

fn as_tp_clause(c: &PClause) -> TPClause {
    let t = c.head.time_point().expect("unfolded heads are ground in time");
    TPClause::rule(
        c.head.clone(),
        TPAnnotation::constant_at("Y", t, &c.head_iv),
        c.body
            .iter()
            .map(|lit| AnnotatedFormula {
                formula: BasicFormula { span: Default::default(), ..lit.formula.clone() },
                annot: TPAnnotation::constant_at("Y", lit.time, &lit.interval),
            })
            .collect(),
    )
}

use proptest::prelude::*;

use super::*;
use crate::model::{
    AnnotatedFormula, Calendar, CmpOp, ConstraintExpr, DiagnosticKind, ObjTerm, TAtom, TPClause, TemporalConstraint,
    TimeExpr, WeightFunction,
};
use crate::prob::ratio;

const EXAMPLE1: &str = "
calendar 1..8.
arrived(Item,Place)@Y : <Y:3~5, [.25,.15,.1], [.4,.24,.16]> :- sent(Item,Place)@Y1 : <Y1=1, [0.9], #>.
arrived(Item,Place)@Y : <Y:6~8, [.15,0,.05], [.3,0,.1]> :- sent(Item,Place)@Y1 : <Y1=1, [0.9], #>.
arrived(Item,paris)@Y : <Y:3~4, [.3,.2], [.54,.36]> :-
    sent(Item,paris)@Y1 : <Y1=1, [.95], #> and express-mail(Item)@Y2 : <Y2=1, #, #>.
sent(shoes,rome)@Y : <Y=1, #, #>.
sent(letter,paris)@Y : <Y=1, #, #>.
express-mail(letter)@Y : <Y=1, #, #>.
";

fn kinds(diags: &[Diagnostic]) -> Vec<DiagnosticKind> {
    diags.iter().map(|d| d.kind).collect()
}

#[test]
fn parses_single_fact() {
    let p = parse_program("calendar 1..8. sent(shoes,rome)@Y : <Y=1, #, #>.").unwrap();
    assert_eq!(p.clauses.len(), 1);
    assert!(p.clauses[0].is_fact());
    assert_eq!(p.clauses[0].head, TAtom::new("sent", vec![ObjTerm::Const("shoes".into()), ObjTerm::Const("rome".into())], TimeTerm::Var("Y".into())));
    assert_eq!(p.calendar, Calendar::range(1, 8).unwrap());
}

#[test]
fn parses_example_program() {
    let p = parse_program(EXAMPLE1).unwrap();
    assert_eq!(p.clauses.len(), 6);
    let rule = &p.clauses[0];
    assert_eq!(rule.head_annot.lower, WeightFunction::List(vec![ratio(1, 4), ratio(3, 20), ratio(1, 10)]));
    assert_eq!(rule.body[0].annot.upper, WeightFunction::Sharp);
    assert_eq!(p.clauses[2].body.len(), 2);
    assert_eq!(p.clauses[2].body[1].formula.atoms[0].predicate, "express-mail");
    assert!(p.constants.contains("paris") && p.constants.contains("letter"));
}

#[test]
fn calendar_only_is_an_empty_program() {
    let (p, warnings) = parse_program_with_warnings("calendar 1..8.\n").unwrap();
    assert!(p.clauses.is_empty());
    assert!(warnings.is_empty());
}

#[test]
fn reports_every_annotation_problem() {
    let err = parse_program("calendar 1..8. a@Y : <Y:3~5, [0.5,0.5], #>.").unwrap_err();
    let k = kinds(&err);
    assert!(k.contains(&DiagnosticKind::LengthMismatch), "{k:?}");
    assert!(k.contains(&DiagnosticKind::SharpCardinality), "{k:?}");
}

#[test]
fn syntax_errors_recover_at_clause_boundaries() {
    let err = parse_program("calendar 1..3. a@Y : <Y=1 #, #>. b@Y : <Y=1, #, #>. c(@Y : <Y=1,#,#>.").unwrap_err();
    assert_eq!(kinds(&err), vec![DiagnosticKind::Syntax, DiagnosticKind::Syntax]);
    assert_eq!(err[0].span.line, 1);
    assert!(err[0].message.contains("`,`"));
}

#[test]
fn empty_solution_set_is_a_warning() {
    let (_, warnings) = parse_program_with_warnings("calendar 1..8. a@Y : <Y<1, uniform, uniform>.").unwrap();
    assert_eq!(kinds(&warnings), vec![DiagnosticKind::EmptySolutionSet]);
}

#[test]
fn lower_above_upper_is_rejected() {
    let err = parse_program("calendar 1..2. a@Y : <Y=1, [0.6], [0.5]>.").unwrap_err();
    assert_eq!(kinds(&err), vec![DiagnosticKind::LowerExceedsUpper]);
}

#[test]
fn principal_variable_must_match_atoms() {
    let err = parse_program("calendar 1..2. a@Y : <Y1=1, #, #>.").unwrap_err();
    assert_eq!(kinds(&err), vec![DiagnosticKind::TemporalVariableMismatch]);
}

#[test]
fn compound_formulas_are_homogeneous() {
    let p = parse_program("calendar 1..2. h@Y : <Y=1,#,#> :- a@Y1 or b@Y1 : <Y1=1, [0.5], #>.").unwrap();
    assert_eq!(p.clauses[0].body[0].formula.connective, crate::model::Connective::Or);
    assert!(parse_program("calendar 1..2. h@Y : <Y=1,#,#> :- a@Y1 or b@Y1 and c@Y1 : <Y1=1, #, #>.").is_err());
}

#[test]
fn and_between_conjuncts_and_inside_formulas() {
    let p = parse_program("calendar 1..2. h@Y : <Y=1,#,#> :- a@Y1 and b@Y1 : <Y1=1,#,#> and c@Y2 : <Y2=2,#,#>.").unwrap();
    let body = &p.clauses[0].body;
    assert_eq!(body.len(), 2);
    assert_eq!(body[0].formula.atoms.len(), 2);
    assert_eq!(body[1].formula.atoms.len(), 1);
}

#[test]
fn constraint_syntax() {
    let p = parse_program("calendar 1..8. a@Y : <Y >= 6 and not Y = 7, uniform, uniform>.").unwrap();
    assert_eq!(p.clauses[0].head_annot.solve(&p.calendar).unwrap(), vec![6, 8]);
    let p = parse_program("calendar -5..5. a@Y : <Y:-3~-2*1, uniform, uniform>.").unwrap();
    assert_eq!(p.clauses[0].head_annot.solve(&p.calendar).unwrap(), vec![-3, -2]);
    let p = parse_program("calendar 1..8. a@Y : <(Y=1 or Y=2) and Y!=2, [1/3], [1/2]>.").unwrap();
    assert_eq!(p.clauses[0].head_annot.lower, WeightFunction::List(vec![ratio(1, 3)]));
}

#[test]
fn rejects_overlong_decimals_and_ranges() {
    let err = parse_program("calendar 1..2. a@Y : <Y=1, [0.1234567891], #>.").unwrap_err();
    assert_eq!(kinds(&err), vec![DiagnosticKind::BadLiteral]);
    let err = parse_program("calendar 1..2. a@Y : <Y=1, [1.5], #>.").unwrap_err();
    assert_eq!(kinds(&err), vec![DiagnosticKind::ProbabilityOutOfRange]);
}

#[test]
fn time_points_must_be_in_the_calendar() {
    let err = parse_program("calendar 1..2. a@5 : <Y=1, #, #>.").unwrap_err();
    assert!(kinds(&err).contains(&DiagnosticKind::TimePointOutsideCalendar));
    let err = parse_program("calendar 1..2000000. a@Y : <Y=1, #, #>.").unwrap_err();
    assert_eq!(kinds(&err), vec![DiagnosticKind::CalendarTooLarge]);
}

#[test]
fn arity_is_fixed_per_predicate() {
    let err = parse_program("calendar 1..2. a(x)@Y : <Y=1,#,#>. a(x,y)@Y : <Y=1,#,#>.").unwrap_err();
    assert_eq!(kinds(&err), vec![DiagnosticKind::ArityMismatch]);
}

#[test]
fn parses_queries() {
    let q = parse_query("?entail arrived(letter,paris)@Y : <Y=3, [0.3], [0.4]>.").unwrap();
    let Query::Entail { formula, annot } = q else { panic!() };
    assert_eq!(formula.atoms[0].to_string(), "arrived(letter,paris)@Y");
    assert_eq!(annot.lower, WeightFunction::List(vec![ratio(3, 10)]));

    let q = parse_query("?tighten arrived(letter,paris)@3.").unwrap();
    assert_eq!(q, Query::Tighten { formula: BasicFormula::single(TAtom::ground("arrived", &["letter", "paris"], 3)), at: TightenAt::Point(3) });

    let q = parse_query("?tighten a@*.").unwrap();
    assert!(matches!(q, Query::Tighten { at: TightenAt::All, .. }));
}

#[test]
fn query_errors() {
    assert_eq!(kinds(&parse_query("?tighten a(X)@1.").unwrap_err()), vec![DiagnosticKind::NonGroundQuery]);
    assert!(parse_query("?tighten a@1. ?tighten b@1.").is_err());
    assert!(parse_query("?frobnicate a@1.").is_err());
    assert!(parse_query("").is_err());
}

#[test]
fn render_round_trips_the_example() {
    let p = parse_program(EXAMPLE1).unwrap();
    let text = render(&p);
    assert_eq!(parse_program(&text).unwrap(), p);
    assert!(text.starts_with("calendar 1..8.\narrived(Item,Place)@Y : <Y:3~5, [0.25,0.15,0.1], [0.4,0.24,0.16]>"), "{text}");
}

#[test]
fn render_of_empty_program() {
    let p = PTProgram::empty(Calendar::range(1, 8).unwrap());
    assert_eq!(render(&p), "calendar 1..8.\n");
}

#[test]
fn render_keeps_uniform() {
    let p = parse_program("calendar 1..4. a@Y : <Y:1~4, uniform, uniform>.").unwrap();
    let text = render(&p);
    assert!(text.contains("uniform, uniform"));
    assert_eq!(parse_program(&text).unwrap(), p);
}

#[test]
fn parses_skeletons() {
    let s = parse_skeleton("calendar 1..2.\na : $a.\nb@Y : $hb :- a and c : $ab and d : $d.").unwrap();
    assert_eq!(s.clauses.len(), 2);
    assert_eq!(s.clauses[1].head.label, "hb");
    assert_eq!(s.clauses[1].body[0].formula.atoms.len(), 2);
    assert_eq!(s.clauses[1].body[1].label, "d");
    assert!(parse_skeleton("calendar 1..2. a : <Y=1,#,#>.").is_err());
}

// Generators for well-formed programs.

fn time_expr(depth: u32) -> BoxedStrategy<TimeExpr> {
    let leaf = prop_oneof![(-3i64..12).prop_map(TimeExpr::Int)];
    if depth == 0 {
        return leaf.boxed();
    }
    prop_oneof![
        3 => leaf,
        1 => (time_expr(depth - 1), time_expr(depth - 1)).prop_map(|(a, b)| TimeExpr::Add(Box::new(a), Box::new(b))),
        1 => (time_expr(depth - 1), time_expr(depth - 1)).prop_map(|(a, b)| TimeExpr::Sub(Box::new(a), Box::new(b))),
        1 => (time_expr(depth - 1), time_expr(depth - 1)).prop_map(|(a, b)| TimeExpr::Mul(Box::new(a), Box::new(b))),
        1 => time_expr(depth - 1).prop_map(|a| TimeExpr::Neg(Box::new(a))),
    ]
    .boxed()
}

fn op() -> impl Strategy<Value = CmpOp> {
    prop_oneof![Just(CmpOp::Le), Just(CmpOp::Lt), Just(CmpOp::Eq), Just(CmpOp::Ne), Just(CmpOp::Gt), Just(CmpOp::Ge)]
}

fn constraint_expr(depth: u32) -> BoxedStrategy<ConstraintExpr> {
    let leaf = prop_oneof![
        (op(), time_expr(1)).prop_map(|(o, e)| ConstraintExpr::Cmp(o, e)),
        (time_expr(1), time_expr(1)).prop_map(|(a, b)| ConstraintExpr::Range(a, b)),
    ];
    if depth == 0 {
        return leaf.boxed();
    }
    let sub = constraint_expr(depth - 1);
    prop_oneof![
        2 => leaf,
        1 => (sub.clone(), sub.clone()).prop_map(|(a, b)| ConstraintExpr::and(a, b)),
        1 => (sub.clone(), sub.clone()).prop_map(|(a, b)| ConstraintExpr::or(a, b)),
        1 => sub.prop_map(ConstraintExpr::not),
    ]
    .boxed()
}

/// An annotation whose weights are valid for `principal` over `cal`.
fn annotation(principal: &'static str, cal: Calendar) -> impl Strategy<Value = TPAnnotation> {
    (constraint_expr(2), any::<u64>()).prop_map(move |(expr, seed)| {
        let constraint = TemporalConstraint::new(principal, expr);
        let n = constraint.solve(&cal).unwrap().len();
        let mut s = seed;
        let mut next = |m: i64| {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 33) % m as u64) as i64
        };
        let (lower, upper) = match (n, next(3)) {
            (1, 0) => (WeightFunction::Sharp, WeightFunction::Sharp),
            (0, _) | (_, 1) => (WeightFunction::Uniform, WeightFunction::Uniform),
            _ => {
                let mut lo = Vec::new();
                let mut hi = Vec::new();
                for _ in 0..n {
                    let a = next(101);
                    let b = a + next(101 - a);
                    let den = [100, 3, 7][next(3) as usize];
                    lo.push(ratio(a * den / 100, den));
                    hi.push(ratio(b, 100));
                }
                (WeightFunction::List(lo), WeightFunction::List(hi))
            }
        };
        TPAnnotation::new(constraint, lower, upper)
    })
}

const PREDICATES: &[(&str, usize)] = &[("a", 0), ("b", 1), ("c", 2), ("d-e", 1)];

fn atom(time: TimeTerm) -> impl Strategy<Value = TAtom> {
    let term = prop_oneof![
        prop_oneof![Just("x"), Just("y"), Just("zed")].prop_map(|c| ObjTerm::Const(c.into())),
        prop_oneof![Just("X"), Just("Item")].prop_map(|v| ObjTerm::Var(v.into())),
    ];
    (0..PREDICATES.len(), proptest::collection::vec(term, 2)).prop_map(move |(i, terms)| {
        let (name, arity) = PREDICATES[i];
        TAtom::new(name, terms[..arity].to_vec(), time.clone())
    })
}

fn time_term(var: &'static str, cal: Calendar) -> impl Strategy<Value = TimeTerm> {
    prop_oneof![3 => Just(TimeTerm::Var(var.into())), 1 => (cal.first()..=cal.last()).prop_map(TimeTerm::Point)]
}

fn clause(cal: Calendar) -> impl Strategy<Value = TPClause> {
    let conjunct = |var: &'static str| {
        (
            prop_oneof![Just(crate::model::Connective::And), Just(crate::model::Connective::Or)],
            proptest::collection::vec(time_term(var, cal).prop_flat_map(atom), 1..3),
            annotation(var, cal),
        )
            .prop_map(|(conn, atoms, annot)| {
                let formula = match conn {
                    crate::model::Connective::Or => BasicFormula::or(atoms),
                    _ => BasicFormula::and(atoms),
                };
                AnnotatedFormula { formula, annot }
            })
    };
    (
        time_term("Y", cal).prop_flat_map(atom),
        annotation("Y", cal),
        proptest::collection::vec(prop_oneof![conjunct("Y1"), conjunct("Y2")], 0..3),
    )
        .prop_map(|(head, head_annot, body)| TPClause::rule(head, head_annot, body))
}

fn program() -> impl Strategy<Value = PTProgram> {
    (-2i64..3, 1i64..8)
        .prop_flat_map(|(first, len)| {
            let cal = Calendar::range(first, first + len - 1).unwrap();
            (Just(cal), proptest::collection::vec(clause(cal), 0..5))
        })
        .prop_map(|(cal, clauses)| PTProgram::new(cal, clauses))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn render_then_parse_is_identity(p in program()) {
        let text = render(&p);
        let parsed = parse_program(&text);
        prop_assert!(parsed.is_ok(), "{text}\n{:?}", parsed.err());
        let parsed = parsed.unwrap();
        let again = parse_program(&render(&parsed)).unwrap();
        prop_assert_eq!(&again, &parsed);
        prop_assert_eq!(parsed.clauses.len(), p.clauses.len());
        for (a, b) in parsed.clauses.iter().zip(&p.clauses) {
            for (x, y) in a.annotations().zip(b.annotations()) {
                prop_assert_eq!(x.solve(&p.calendar).ok(), y.solve(&p.calendar).ok());
                prop_assert_eq!(&x.lower, &y.lower);
            }
        }
    }

    #[test]
    fn parsing_is_total(src in "(calendar 1\\.\\.[0-9]\\. )?([a-zY(),@:<>=~#\\[\\]0-9. -]|and|or|not|:-|uniform|\\$|%|\n){0,80}") {
        match parse_program(&src) {
            Ok(_) => {}
            Err(diags) => prop_assert!(!diags.is_empty()),
        }
        if let Err(diags) = parse_query(&src) {
            prop_assert!(!diags.is_empty());
        }
        if let Err(diags) = parse_skeleton(&src) {
            prop_assert!(!diags.is_empty());
        }
    }

    #[test]
    fn parsing_arbitrary_text_never_panics(src in "\\PC{0,60}") {
        let _ = parse_program(&src);
        let _ = parse_query(&src);
    }
}

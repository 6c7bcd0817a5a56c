use proptest::prelude::*;

use ptlogic::compression::{build_evolution_program, Slices};
use ptlogic::ground::{ground_program, unfold, GroundingMode, PProgram};
use ptlogic::interval::ProbInterval;
use ptlogic::model::{BasicFormula, TAtom};
use ptlogic::parser::{parse_program, parse_skeleton, render, render_unfolded};
use ptlogic::prob::ratio;
use ptlogic::psat::{check_consistency, formula_mass, ki_satisfies, tighten, LpMode, SolveOptions, Verdict};

const PROGRAMS: [(&str, &str); 7] = [
    ("example1", include_str!("../../../fixtures/example1.tpl")),
    ("letter", include_str!("../../../fixtures/letter.tpl")),
    ("p0", include_str!("../../../fixtures/p0.tpl")),
    ("p1", include_str!("../../../fixtures/p1.tpl")),
    ("mx", include_str!("../../../fixtures/mx.tpl")),
    ("empty", include_str!("../../../fixtures/empty.tpl")),
    ("boundary", include_str!("../../../fixtures/boundary.tpl")),
];

fn pp(src: &str) -> PProgram {
    unfold(&ground_program(&parse_program(src).unwrap(), GroundingMode::Relevant).unwrap()).unwrap()
}

#[test]
fn fixtures_survive_render_and_reparse() {
    for (name, src) in PROGRAMS {
        let p = parse_program(src).unwrap_or_else(|d| panic!("{name}: {d:?}"));
        assert_eq!(parse_program(&render(&p)).unwrap(), p, "{name}");
    }
}

#[test]
fn unfolded_programs_are_fixed_points() {
    for (name, src) in PROGRAMS {
        let p = parse_program(src).unwrap();
        let once = pp(src);
        let text = render_unfolded(&once, &p.calendar);
        let twice = pp(&text);
        assert_eq!(twice.clauses, once.clauses, "{name}\n{text}");
    }
}

#[test]
fn broken_fixture_is_rejected() {
    let diags = parse_program(include_str!("../../../fixtures/broken.tpl")).unwrap_err();
    assert!(diags.iter().filter(|d| d.is_error()).count() >= 2);
}

#[test]
fn float_and_exact_verdicts_agree_on_fixtures() {
    for (name, src) in PROGRAMS {
        if name == "example1" {
            continue;
        }
        let p = pp(src);
        let exact = check_consistency(&p, &SolveOptions::default()).unwrap();
        let float = check_consistency(&p, &SolveOptions { lp_mode: LpMode::Float, ..SolveOptions::default() }).unwrap();
        assert_eq!(exact.verdict, float.verdict, "{name}");
        if let Some(w) = &float.witness {
            assert!(ki_satisfies(&p, w).unwrap(), "{name}");
        }
    }
}

#[test]
fn example_one_is_consistent_with_a_checked_witness() {
    let p = pp(PROGRAMS[0].1);
    let c = check_consistency(&p, &SolveOptions::default()).unwrap();
    assert_eq!(c.verdict, Verdict::Consistent);
    assert!(ki_satisfies(&p, c.witness.as_ref().unwrap()).unwrap());
}

#[test]
fn evolution_programs_unfold_to_their_slices() {
    let sk = parse_skeleton(include_str!("../../../fixtures/two_slice.skel")).unwrap();
    let point = |n, d| ProbInterval::point(ratio(n, d)).unwrap();
    let slices: Slices = [("a".to_string(), [(1, point(3, 10)), (2, point(3, 5))].into())].into();
    let program = build_evolution_program(&sk, &slices).unwrap();
    let unfolded = unfold(&ground_program(&program, GroundingMode::Relevant).unwrap()).unwrap();
    let heads: Vec<(String, ProbInterval)> =
        unfolded.clauses.iter().map(|c| (c.head.to_string(), c.head_iv.clone())).collect();
    assert_eq!(heads, vec![("a@1".to_string(), point(3, 10)), ("a@2".to_string(), point(3, 5))]);
}

fn value() -> impl Strategy<Value = u8> {
    0u8..=10
}

fn interval() -> impl Strategy<Value = (u8, u8)> {
    (value(), value()).prop_map(|(a, b)| (a.min(b), a.max(b)))
}

fn tenths(x: u8) -> String {
    format!("{}", f64::from(x) / 10.0)
}

/// Facts and one-literal rules over `a@1`, `b@1`, `c@1`.
fn program() -> impl Strategy<Value = String> {
    let clause = (0..3usize, interval(), proptest::option::of((0..3usize, interval())));
    proptest::collection::vec(clause, 1..4).prop_map(|clauses| {
        let names = ["a", "b", "c"];
        let mut src = String::from("calendar 1..1.\n");
        for (h, (lo, hi), body) in clauses {
            src.push_str(&format!("{}@Y : <Y=1, [{}], [{}]>", names[h], tenths(lo), tenths(hi)));
            if let Some((b, (blo, bhi))) = body {
                src.push_str(&format!(" :- {}@Y1 : <Y1=1, [{}], [{}]>", names[b], tenths(blo), tenths(bhi)));
            }
            src.push_str(".\n");
        }
        src
    })
}

/// Rules over `p(X)`, `q(X)` and the never-produced `r(X)` with constants
/// `k` and `m`.
fn object_program() -> impl Strategy<Value = String> {
    let literal = (0..3usize, proptest::bool::ANY, interval());
    let clause = (0..2usize, 0..2usize, interval(), proptest::collection::vec(literal, 0..3));
    proptest::collection::vec(clause, 1..5).prop_map(|clauses| {
        let preds = ["p", "q", "r"];
        let mut src = String::from("calendar 1..1.\np(k)@Y : <Y=1, #, #>.\nq(m)@Y : <Y=1, [0.5], [1]>.\n");
        for (h, arg, (lo, hi), body) in clauses {
            let arg = ["k", "X"][arg];
            src.push_str(&format!("{}({arg})@Y : <Y=1, [{}], [{}]>", preds[h], tenths(lo), tenths(hi)));
            for (i, (b, var, (blo, bhi))) in body.into_iter().enumerate() {
                let barg = if var { "X" } else { "m" };
                src.push_str(if i == 0 { " :- " } else { " and " });
                src.push_str(&format!("{}({barg})@Y1 : <Y1=1, [{}], [{}]>", preds[b], tenths(blo), tenths(bhi)));
            }
            src.push_str(".\n");
        }
        src
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn relevant_and_full_grounding_agree_on_verdicts(src in object_program()) {
        let p = parse_program(&src).unwrap();
        let verdict = |mode| {
            let pp = unfold(&ground_program(&p, mode).unwrap()).unwrap();
            check_consistency(&pp, &SolveOptions::default()).unwrap().verdict
        };
        prop_assert_eq!(verdict(GroundingMode::Relevant), verdict(GroundingMode::Full), "{}", src);
    }

    #[test]
    fn witness_masses_lie_within_tightened_bounds(src in program()) {
        let p = pp(&src);
        let opts = SolveOptions::default();
        let c = check_consistency(&p, &opts).unwrap();
        prop_assume!(c.verdict == Verdict::Consistent);
        let w = c.witness.unwrap();
        for atom in p.base.atoms() {
            let f = BasicFormula::single(atom.clone());
            let mass = formula_mass(&w, &f, &p.base).unwrap();
            let bounds = tighten(&p, &f, &opts).unwrap().interval;
            prop_assert!(bounds.contains(&mass), "{atom}: {mass} outside {bounds}\n{src}");
        }
    }

    #[test]
    fn atoms_outside_the_program_are_unconstrained(src in program()) {
        let p = pp(&src);
        let opts = SolveOptions::default();
        prop_assume!(check_consistency(&p, &opts).unwrap().verdict == Verdict::Consistent);
        let fresh = BasicFormula::single(TAtom::ground("fresh", &[], 1));
        prop_assert_eq!(tighten(&p, &fresh, &opts).unwrap().interval, ProbInterval::unknown());
    }
}

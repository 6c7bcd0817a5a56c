use super::*;
use crate::ground::{ground_program, unfold, GroundingMode, HerbrandBase, PProgram};
use crate::interval::ProbInterval;
use crate::model::{BasicFormula, TAtom};
use crate::parser::{parse_program, parse_query, Query};
use crate::prob::{int, ratio, Prob};

const FIX_P0: &str = "calendar 1..2. a@Y : <Y=1, [0.5], [0.7]>. b@Y : <Y=1, [0.4], [0.6]> :- a@Y1 : <Y1=1, [0.5], [0.7]>.";
const FIX_P1: &str = "calendar 1..1. a@Y : <Y=1, [0], [0.2]>. a@Y : <Y=1, [0.5], [1]>.";
const FIX_MX: &str = "calendar 1..1. a@Y : <Y=1, [0.2], [0.8]>.";

fn pp(src: &str) -> PProgram {
    let p = parse_program(src).unwrap();
    unfold(&ground_program(&p, GroundingMode::Relevant).unwrap()).unwrap()
}

fn atom(name: &str, t: i64) -> TAtom {
    TAtom::ground(name, &[], t)
}

fn iv(lo: (i64, i64), hi: (i64, i64)) -> ProbInterval {
    ProbInterval::new(ratio(lo.0, lo.1), ratio(hi.0, hi.1)).unwrap()
}

/// Independent atoms with the given marginals over `base`.
fn product(base: &HerbrandBase, marginals: &[Prob]) -> WorldDistribution {
    let n = base.len();
    let entries = World::all(n).map(|w| {
        let p = (0..n).map(|i| if w.get(i) { marginals[i].clone() } else { int(1) - &marginals[i] }).product();
        (w, p)
    });
    WorldDistribution::new(n, entries).unwrap()
}

fn opts() -> SolveOptions {
    SolveOptions::default()
}

#[test]
fn world_truth() {
    let base = HerbrandBase::new([atom("a", 1), atom("b", 1)]);
    let w = World::from_atoms(&base, [&atom("a", 1)]).unwrap();
    assert!(world_satisfies(&w, &BasicFormula::single(atom("a", 1)), &base).unwrap());
    assert!(!world_satisfies(&w, &BasicFormula::and(vec![atom("a", 1), atom("b", 1)]), &base).unwrap());
    assert!(world_satisfies(&w, &BasicFormula::or(vec![atom("a", 1), atom("b", 1)]), &base).unwrap());
    assert!(matches!(
        world_satisfies(&w, &BasicFormula::single(atom("c", 1)), &base),
        Err(PsatError::AtomNotInBase(_))
    ));
}

#[test]
fn masses() {
    let base = HerbrandBase::new([atom("a", 1), atom("b", 1)]);
    let a = BasicFormula::single(atom("a", 1));
    assert_eq!(formula_mass(&WorldDistribution::uniform(2), &a, &base).unwrap(), ratio(1, 2));
    let none = WorldDistribution::point(World::empty(2));
    assert_eq!(formula_mass(&none, &BasicFormula::or(vec![atom("a", 1), atom("b", 1)]), &base).unwrap(), int(0));

    let base = HerbrandBase::new([atom("a", 1), atom("a", 2)]);
    let ki = WorldDistribution::new(
        2,
        [
            (World::empty(2), ratio(55, 100)),
            (World::from_atoms(&base, [&atom("a", 1)]).unwrap(), ratio(15, 100)),
            (World::from_atoms(&base, [&atom("a", 2)]).unwrap(), ratio(30, 100)),
        ],
    )
    .unwrap();
    let f = BasicFormula::or(vec![atom("a", 1), atom("a", 2)]);
    assert_eq!(formula_mass(&ki, &f, &base).unwrap(), ratio(45, 100));
}

#[test]
fn distributions_are_validated() {
    assert!(matches!(WorldDistribution::new(1, [(World::empty(1), ratio(1, 2))]), Err(DistributionError::NotNormalized(_))));
    assert_eq!(
        WorldDistribution::new(1, [(World::empty(1), ratio(3, 2)), (World::from_bits(1, 1), ratio(-1, 2))]),
        Err(DistributionError::Negative)
    );
    assert_eq!(WorldDistribution::new(1, [(World::empty(2), int(1))]), Err(DistributionError::MixedLengths));
    let d = WorldDistribution::new(1, [(World::empty(1), ratio(1, 2)), (World::empty(1), ratio(1, 2)), (World::from_bits(1, 1), int(0))]).unwrap();
    assert_eq!(d.support_len(), 1);
    assert!((WorldDistribution::uniform(3).entropy() - 8f64.ln()).abs() < 1e-12);
}

#[test]
fn satisfaction_of_fix_p0() {
    let p = pp(FIX_P0);
    assert_eq!(p.base.atoms(), &[atom("a", 1), atom("b", 1)]);
    assert!(ki_satisfies(&p, &product(&p.base, &[ratio(6, 10), ratio(5, 10)])).unwrap());
    assert!(!ki_satisfies(&p, &product(&p.base, &[ratio(6, 10), ratio(9, 10)])).unwrap());
    assert!(!ki_satisfies(&p, &product(&p.base, &[ratio(2, 10), ratio(5, 10)])).unwrap());
}

#[test]
fn fix_p0_is_consistent() {
    let p = pp(FIX_P0);
    let c = check_consistency(&p, &opts()).unwrap();
    assert_eq!(c.verdict, Verdict::Consistent);
    assert!(ki_satisfies(&p, c.witness.as_ref().unwrap()).unwrap());
    assert_eq!(c.choices, vec![BranchChoice::HeadIn, BranchChoice::HeadIn]);
}

#[test]
fn fix_p1_is_inconsistent() {
    let c = check_consistency(&pp(FIX_P1), &opts()).unwrap();
    assert_eq!(c.verdict, Verdict::Inconsistent);
    assert!(c.witness.is_none());
}

#[test]
fn empty_program_is_consistent() {
    let c = check_consistency(&pp("calendar 1..1."), &opts()).unwrap();
    assert!(c.is_consistent());
    assert_eq!(c.witness.unwrap().atoms(), 0);
}

#[test]
fn boundary_only_models_are_reported() {
    // The body must be pushed strictly below 0.5 while a fact pins it to
    // [0.5 - 1e-7, 0.5]: only ε = 0 closes the gap.
    let src = "calendar 1..1.
        a@Y : <Y=1, [0.4999999], [0.5]>.
        b@Y : <Y=1, [0], [0]> :- a@Y1 : <Y1=1, [0.5], [1]>.
        b@Y : <Y=1, [1], [1]>.";
    let c = check_consistency(&pp(src), &opts()).unwrap();
    assert_eq!(c.verdict, Verdict::UnknownEps);
    let coarse = SolveOptions { epsilon: ratio(1, 1_000_000_000), ..opts() };
    assert!(check_consistency(&pp(src), &coarse).unwrap().is_consistent());
}

#[test]
fn world_cap_is_enforced() {
    let p = pp("calendar 1..3. a@Y : <Y:1~3, uniform, uniform>.");
    let small = SolveOptions { max_world_atoms: 2, ..opts() };
    assert!(matches!(check_consistency(&p, &small), Err(PsatError::BaseTooLarge(_))));
    let bad = SolveOptions { epsilon: int(0), ..opts() };
    assert!(matches!(check_consistency(&p, &bad), Err(PsatError::InvalidOptions(_))));
    let huge = SolveOptions { max_world_atoms: MAX_SUPPORTED_WORLD_ATOMS + 1, ..opts() };
    assert!(matches!(check_consistency(&p, &huge), Err(PsatError::InvalidOptions(_))));
}

#[test]
fn tighten_examples() {
    let t = tighten(&pp(FIX_P0), &BasicFormula::single(atom("b", 1)), &opts()).unwrap();
    assert_eq!(t.interval, iv((4, 10), (6, 10)));
    let t = tighten(&pp(FIX_MX), &BasicFormula::single(atom("a", 1)), &opts()).unwrap();
    assert_eq!(t.interval, iv((2, 10), (8, 10)));
    // Atoms unknown to the program are unconstrained.
    let t = tighten(&pp(FIX_MX), &BasicFormula::single(atom("z", 1)), &opts()).unwrap();
    assert_eq!(t.interval, ProbInterval::unknown());
    let t = tighten(&pp(FIX_MX), &BasicFormula::and(vec![atom("a", 1), atom("z", 1)]), &opts()).unwrap();
    assert_eq!(t.interval, iv((0, 1), (8, 10)));
    assert_eq!(tighten(&pp(FIX_P1), &BasicFormula::single(atom("a", 1)), &opts()), Err(PsatError::InconsistentProgram));
}

#[test]
fn float_mode_agrees_on_fixtures() {
    let float = SolveOptions { lp_mode: LpMode::Float, ..opts() };
    let c = check_consistency(&pp(FIX_P0), &float).unwrap();
    assert!(c.is_consistent());
    assert!(ki_satisfies(&pp(FIX_P0), c.witness.as_ref().unwrap()).unwrap());
    assert_eq!(check_consistency(&pp(FIX_P1), &float).unwrap().verdict, Verdict::Inconsistent);
    let t = tighten(&pp(FIX_P0), &BasicFormula::single(atom("b", 1)), &float).unwrap();
    assert!((crate::prob::to_f64(t.interval.lo()) - 0.4).abs() < 1e-9);
    assert!((crate::prob::to_f64(t.interval.hi()) - 0.6).abs() < 1e-9);
}

fn entail_query(text: &str) -> (BasicFormula, crate::model::TPAnnotation) {
    match parse_query(text).unwrap() {
        Query::Entail { formula, annot } => (formula, annot),
        q => panic!("not an entail query: {q:?}"),
    }
}

#[test]
fn entailment() {
    let src = "calendar 1..2. a@Y : <Y:1~2, [0.5,0.6], [0.7,0.8]>.";
    let p = pp(src);
    let cal = parse_program(src).unwrap().calendar;
    let (f, a) = entail_query("?entail a@Y : <Y:1~2, [0.4,0.5], [0.7,0.9]>.");
    let e = entails(&p, &f, &a, &cal, &opts()).unwrap();
    assert!(e.holds);
    assert_eq!(e.points.len(), 2);
    assert_eq!(e.points[1].derived, iv((6, 10), (8, 10)));
    let (f, a) = entail_query("?entail a@Y : <Y:1~2, [0.55,0.5], [0.7,0.9]>.");
    let e = entails(&p, &f, &a, &cal, &opts()).unwrap();
    assert!(!e.holds);
    assert!(!e.points[0].holds && e.points[1].holds);
    let (f, a) = entail_query("?entail a@Y : <Y>2, [0.9], [0.9]>.");
    let e = entails(&p, &f, &a, &cal, &opts()).unwrap();
    assert!(e.holds && e.points.is_empty());
    assert_eq!(e.warnings.len(), 1);
    let (f, a) = entail_query("?entail a@Y : <Y=1, [0], [1]>.");
    assert_eq!(entails(&pp(FIX_P1), &f, &a, &cal, &opts()), Err(PsatError::InconsistentProgram));
}

#[test]
fn maxent_examples() {
    let m = max_entropy_model(&pp(FIX_MX), &opts()).unwrap();
    let a = BasicFormula::single(atom("a", 1));
    let base = pp(FIX_MX).base;
    assert_eq!(formula_mass(&m.distribution, &a, &base).unwrap(), ratio(1, 2));
    assert!((m.entropy - 2f64.ln()).abs() < 1e-9);

    let p = pp("calendar 1..1. a@Y : <Y=1, [0.9], [0.9]>.");
    let m = max_entropy_model(&p, &opts()).unwrap();
    let h2 = -(0.9f64 * 0.9f64.ln() + 0.1f64 * 0.1f64.ln());
    assert!((m.entropy - h2).abs() < 1e-6);
    assert!(ki_satisfies(&p, &m.distribution).unwrap());

    // A base with an unconstrained atom.
    let p = pp("calendar 1..1. a@Y : <Y=1, [0], [1]>.");
    let m = max_entropy_model(&p, &opts()).unwrap();
    assert_eq!(m.distribution, WorldDistribution::uniform(1));

    assert_eq!(max_entropy_model(&pp(FIX_P1), &opts()), Err(PsatError::InconsistentProgram));
}

#[test]
fn maxent_on_rules() {
    let p = pp(FIX_P0);
    let m = max_entropy_model(&p, &opts()).unwrap();
    assert!(ki_satisfies(&p, &m.distribution).unwrap());
    // Both marginals move to the interval point closest to 1/2, independently.
    let expected = -2.0 * (0.5f64 * 0.5f64.ln() + 0.5 * 0.5f64.ln());
    assert!((m.entropy - expected).abs() < 1e-6, "{}", m.entropy);
}

#[test]
fn maxent_sweep_limit() {
    let p = pp("calendar 1..2. a@Y : <Y=1, [0.1], [0.1]>. b@Y : <Y=1, [0.3], [0.3]> :- a@Y1 : <Y1=1, [0], [0.5]>. a@Y : <Y=2, [0.7], [0.7]>.");
    let tight = SolveOptions { max_sweeps: 1, ..opts() };
    assert_eq!(max_entropy_model(&p, &tight), Err(PsatError::NonConvergence(1)));
    let m = max_entropy_model(&p, &opts()).unwrap();
    assert!(ki_satisfies(&p, &m.distribution).unwrap());
}

#[test]
fn unfolded_and_tp_satisfaction_agree_on_fix_p0() {
    let src = parse_program(FIX_P0).unwrap();
    let p = pp(FIX_P0);
    for (a, b) in [((6, 10), (5, 10)), ((6, 10), (9, 10)), ((2, 10), (5, 10))] {
        let ki = product(&p.base, &[ratio(a.0, a.1), ratio(b.0, b.1)]);
        assert_eq!(ki_satisfies(&p, &ki).unwrap(), ki_satisfies_tp(&src, &p.base, &ki).unwrap());
    }
}

mod props {
    use super::*;
    use proptest::prelude::*;

    const ATOMS: [&str; 3] = ["a", "b", "c"];

    /// `(head, (lo, hi), body)` with intervals in tenths.
    type ClauseShape = (usize, (u8, u8), Vec<(usize, (u8, u8))>);

    fn interval() -> impl Strategy<Value = (u8, u8)> {
        (0u8..=10, 0u8..=10).prop_map(|(x, y)| (x.min(y), x.max(y)))
    }

    fn clause() -> impl Strategy<Value = ClauseShape> {
        (0..ATOMS.len(), interval(), proptest::collection::vec((0..ATOMS.len(), interval()), 0..2))
    }

    fn w(x: u8) -> String {
        format!("[{}]", x as f64 / 10.0)
    }

    fn source(clauses: &[ClauseShape]) -> String {
        let mut s = String::from("calendar 1..1.\n");
        for (h, (lo, hi), body) in clauses {
            s.push_str(&format!("{}@Y : <Y=1, {}, {}>", ATOMS[*h], w(*lo), w(*hi)));
            for (i, (b, (blo, bhi))) in body.iter().enumerate() {
                s.push_str(if i == 0 { " :- " } else { " and " });
                s.push_str(&format!("{}@Y{i} : <Y{i}=1, {}, {}>", ATOMS[*b], w(*blo), w(*bhi)));
            }
            s.push_str(".\n");
        }
        s
    }

    /// Searches the grid of distributions with masses in twentieths.
    fn grid_model_exists(p: &PProgram) -> bool {
        let n = p.base.len();
        let size = 1usize << n;
        let steps = 20u32;
        // contains[k] for each literal, k twentieths.
        let table = |i: &ProbInterval| -> Vec<bool> { (0..=steps).map(|k| i.contains(&ratio(k as i64, steps as i64))).collect() };
        let mask_of = |f: &BasicFormula| world::Mask::of(f, &p.base).unwrap();
        let clauses: Vec<_> = p
            .clauses
            .iter()
            .map(|c| {
                let head = (mask_of(&BasicFormula::single(c.head.clone())), table(&c.head_iv));
                let body: Vec<_> = c.body.iter().map(|l| (mask_of(&l.formula), table(&l.interval))).collect();
                (head, body)
            })
            .collect();
        let mut counts = vec![0u32; size];
        fn rec(i: usize, left: u32, counts: &mut Vec<u32>, check: &dyn Fn(&[u32]) -> bool) -> bool {
            if i + 1 == counts.len() {
                counts[i] = left;
                return check(counts);
            }
            for k in 0..=left {
                counts[i] = k;
                if rec(i + 1, left - k, counts, check) {
                    return true;
                }
            }
            false
        }
        let check = |counts: &[u32]| {
            let mass = |m: world::Mask| -> usize {
                counts.iter().enumerate().filter(|(w, _)| m.holds(*w as u64)).map(|(_, &c)| c as usize).sum()
            };
            clauses.iter().all(|((hm, ht), body)| ht[mass(*hm)] || body.iter().any(|(bm, bt)| !bt[mass(*bm)]))
        };
        rec(0, steps, &mut counts, &check)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn witnesses_are_models(clauses in proptest::collection::vec(clause(), 0..5)) {
            let p = pp(&source(&clauses));
            let c = check_consistency(&p, &opts()).unwrap();
            if let Some(w) = &c.witness {
                prop_assert!(ki_satisfies(&p, w).unwrap());
            }
        }

        #[test]
        fn grid_models_imply_consistency(clauses in proptest::collection::vec(clause(), 1..5)) {
            let p = pp(&source(&clauses));
            if grid_model_exists(&p) {
                prop_assert_eq!(check_consistency(&p, &opts()).unwrap().verdict, Verdict::Consistent);
            }
        }

        #[test]
        fn tighten_is_monotone(clauses in proptest::collection::vec(clause(), 1..4), extra in clause(), target in 0..ATOMS.len()) {
            let f = BasicFormula::single(atom(ATOMS[target], 1));
            let p = pp(&source(&clauses));
            let mut more = clauses.clone();
            more.push(extra);
            let q = pp(&source(&more));
            if check_consistency(&q, &opts()).unwrap().is_consistent() {
                let wide = tighten(&p, &f, &opts()).unwrap().interval;
                let narrow = tighten(&q, &f, &opts()).unwrap().interval;
                prop_assert!(narrow.is_within(&wide), "{narrow} not within {wide}");
                prop_assert!(wide.is_within(&ProbInterval::unknown()));
            }
        }

        #[test]
        fn lone_facts_tighten_to_themselves(i in interval()) {
            let p = pp(&source(&[(0, i, vec![])]));
            let t = tighten(&p, &BasicFormula::single(atom("a", 1)), &opts()).unwrap();
            prop_assert_eq!(t.interval, iv((i.0 as i64, 10), (i.1 as i64, 10)));
        }

        #[test]
        fn maxent_dominates_sampled_models(clauses in proptest::collection::vec(clause(), 1..4), seed in any::<u64>()) {
            use rand::{Rng, SeedableRng};
            let p = pp(&source(&clauses));
            let Ok(m) = max_entropy_model(&p, &opts()) else { return Ok(()) };
            prop_assert!(ki_satisfies(&p, &m.distribution).unwrap());
            let n = p.base.len();
            let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
            for _ in 0..100 {
                let raw: Vec<u64> = (0..1usize << n).map(|_| rng.gen_range(0..1000)).collect();
                let total: u64 = raw.iter().sum::<u64>().max(1);
                let entries = World::all(n).zip(raw.iter().map(|&r| ratio(r as i64, total as i64)));
                let Ok(ki) = WorldDistribution::new(n, entries) else { continue };
                if ki_satisfies(&p, &ki).unwrap() {
                    prop_assert!(ki.entropy() <= m.entropy + 1e-6);
                }
            }
        }

        #[test]
        fn entailment_survives_strengthening(clauses in proptest::collection::vec(clause(), 1..3), extra in clause(), target in 0..ATOMS.len()) {
            let src = source(&clauses);
            let p = pp(&src);
            if !check_consistency(&p, &opts()).unwrap().is_consistent() {
                return Ok(());
            }
            let cal = parse_program(&src).unwrap().calendar;
            let t = tighten(&p, &BasicFormula::single(atom(ATOMS[target], 1)), &opts()).unwrap().interval;
            let f = BasicFormula::single(TAtom::new(ATOMS[target], vec![], crate::model::TimeTerm::Var("Y".into())));
            let a = crate::model::TPAnnotation::constant_at("Y", 1, &t);
            if let Ok(e) = entails(&p, &f, &a, &cal, &opts()) {
                let mut more = clauses.clone();
                more.push(extra);
                let q = pp(&source(&more));
                if e.holds && check_consistency(&q, &opts()).unwrap().is_consistent() {
                    prop_assert!(entails(&q, &f, &a, &cal, &opts()).unwrap().holds);
                }
            }
        }
    }
}

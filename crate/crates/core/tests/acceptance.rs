//! Acceptance suite: every criterion prints one pass/fail line (run with
//! `cargo test --test acceptance -- --nocapture` to see them all).

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use lrank2::deriv;
use lrank2::eval::{self, EvalStatus};
use lrank2::harness::{self, GenConfig};
use lrank2::infer::{canonicalize, infer, infer_q};
use lrank2::syntax::{alpha_eq, parse, Term};
use lrank2::types::{parse_lin, parse_rank2, LinType, Rank2Type, TypeEnv, TypeSubst};
use lrank2::unify::{match_all, match_judgment, unify, unify_q, UnifProblem, UnifyOutcome};

struct Criterion {
    number: u32,
    what: &'static str,
    started: Instant,
    budget: Duration,
}

impl Criterion {
    fn start(number: u32, what: &'static str, budget_secs: u64) -> Criterion {
        Criterion {
            number,
            what,
            started: Instant::now(),
            budget: Duration::from_secs(budget_secs),
        }
    }

    fn pass(self) {
        let elapsed = self.started.elapsed();
        println!(
            "acceptance criterion {} ({}): PASS in {:.2?}",
            self.number, self.what, elapsed
        );
        assert!(
            elapsed < self.budget,
            "criterion {} exceeded its {}s budget: {:?}",
            self.number,
            self.budget.as_secs(),
            elapsed
        );
    }

    fn fail(self, detail: &str) -> ! {
        println!(
            "acceptance criterion {} ({}): FAIL — {}",
            self.number, self.what, detail
        );
        panic!("criterion {} failed: {}", self.number, detail);
    }
}

fn tm(s: &str) -> Term {
    parse(s).unwrap()
}

fn fixture(name: &str) -> deriv::Derivation {
    let path = format!("{}/tests/fixtures/{}", env!("CARGO_MANIFEST_DIR"), name);
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"));
    deriv::from_json(&text).unwrap_or_else(|e| panic!("{path}: {e}"))
}

const TIGHT_FIXTURES: [&str; 4] = [
    "tight_eval3.json",
    "tight_neutral.json",
    "tight_identity.json",
    "tight_one_step.json",
];

#[test]
fn criterion_1_golden_paper_examples() {
    let c = Criterion::start(1, "golden reproduction of the worked examples", 1);

    let r = infer(&tm("\\x. x x")).unwrap();
    if r.env != TypeEnv::empty() || r.ty != parse_rank2("(a0 -o a1) & a0 -> a1").unwrap() {
        c.fail(&format!("infer(λx.x x) gave {} : {}", r.env, r.ty));
    }

    let r = infer(&tm("(\\x. x x) (\\y. y)")).unwrap();
    if r.env != TypeEnv::empty() || r.ty != parse_rank2("a0 -o a0").unwrap() {
        c.fail(&format!("infer((λx.x x)(λy.y)) gave {} : {}", r.env, r.ty));
    }

    let r = infer_q(&tm("(\\x. x x) (\\y. y)")).unwrap();
    if r.steps != 2 {
        c.fail(&format!("quantitative index was {}", r.steps));
    }

    let p = UnifProblem::new(vec![(
        parse_lin("a1 -o a1").unwrap(),
        parse_lin("a2 -o a3").unwrap(),
    )]);
    let mut expected = TypeSubst::new();
    expected.bind("a1", parse_lin("a3").unwrap());
    expected.bind("a2", parse_lin("a3").unwrap());
    match unify(&p) {
        UnifyOutcome::Solved(s) if s == expected => {}
        other => c.fail(&format!("unify gave {other:?}")),
    }

    let p = UnifProblem::new(vec![
        (
            parse_lin("a1 -o a1").unwrap(),
            parse_lin("a3 -o a4").unwrap(),
        ),
        (parse_lin("a2 -o a2").unwrap(), parse_lin("a3").unwrap()),
    ]);
    let (outcome, count) = unify_q(&p);
    if outcome.solved().is_none() || count != 1 {
        c.fail(&format!("unify_q counter was {count}"));
    }

    let out = eval::normalize(&tm("(\\x1. (\\x2. x2 x1) x1) (\\y. y)"), 10_000);
    if out.status != EvalStatus::Normal || out.steps != 3 || !alpha_eq(&out.result, &tm("\\y. y"))
    {
        c.fail(&format!("normalization gave {} in {} steps", out.result, out.steps));
    }

    let d = fixture("tight_eval3.json");
    match deriv::check_q(&d) {
        Ok(j) if j.index == Some(3) && deriv::is_tight(&d) => {}
        other => c.fail(&format!("tight fixture check gave {other:?}")),
    }

    if infer(&tm("(\\x. x x) (\\f. \\x. f (f x))")).is_ok() {
        c.fail("the rank-3 application must not be typable");
    }

    c.pass();
}

fn soundness_corpus() -> Vec<Term> {
    harness::gen_terms(&GenConfig {
        max_size: 10,
        max_binder_reuse: 3,
        seed: 42,
        count: 1000,
    })
}

#[test]
fn criterion_2_soundness_by_construction() {
    let c = Criterion::start(2, "derivations built from inference check out", 30);
    let mut successes = 0;
    for t in soundness_corpus() {
        let Ok(r) = infer(&t) else { continue };
        successes += 1;
        let d = match deriv::build_from_inference(&t) {
            Ok(d) => d,
            Err(e) => c.fail(&format!("no derivation for {t}: {e}")),
        };
        let j = match deriv::check(&d) {
            Ok(j) => j,
            Err(v) => c.fail(&format!("derivation for {t} rejected: {v}")),
        };
        let (denv, dty) = canonicalize(&j.type_env(), &j.ty);
        if !denv.equiv(&r.env) {
            c.fail(&format!("environment mismatch for {t}: {denv} vs {}", r.env));
        }
        if dty != r.ty {
            c.fail(&format!("type mismatch for {t}: {dty} vs {}", r.ty));
        }
    }
    assert!(successes > 100, "the corpus must exercise inference");
    c.pass();
}

/// All closed terms with the given number of AST nodes, binders named by
/// depth.
fn closed_terms_of_size(n: usize, depth: usize) -> Vec<Term> {
    let mut out = Vec::new();
    if n == 0 {
        return out;
    }
    if n == 1 {
        for i in 0..depth {
            out.push(Term::var(format!("v{i}")));
        }
        return out;
    }
    for body in closed_terms_of_size(n - 1, depth + 1) {
        out.push(Term::abs(format!("v{depth}"), body));
    }
    for split in 1..n - 1 {
        for fun in closed_terms_of_size(split, depth) {
            for arg in closed_terms_of_size(n - 1 - split, depth) {
                out.push(Term::app(fun.clone(), arg.clone()));
            }
        }
    }
    out
}

/// Renames the type variables of a judgment into a pool disjoint from the
/// canonical `a` names, so matching bindings stay one-directional.
fn disjoint_rename(env: &TypeEnv, ty: &Rank2Type) -> (TypeEnv, Rank2Type) {
    let (env, ty) = canonicalize(env, ty);
    let mut map = BTreeMap::new();
    for (_, seq) in &env.decls {
        for item in seq.items() {
            for v in item.vars() {
                let fresh = LinType::var(format!("b{}", map.len()));
                map.entry(v).or_insert(fresh);
            }
        }
    }
    for v in ty.vars() {
        let fresh = LinType::var(format!("b{}", map.len()));
        map.entry(v).or_insert(fresh);
    }
    let s = TypeSubst::from_map(map);
    (s.apply_env(&env), s.apply_rank2(&ty))
}

#[test]
fn criterion_3_completeness_at_desk_scale() {
    let c = Criterion::start(3, "enumerated derivations are instances of inference", 300);
    let mut enumerated = 0;
    for size in 1..=7 {
        for t in closed_terms_of_size(size, 0) {
            let ds = deriv::enumerate_derivations(&t, 3, 64);
            if ds.is_empty() {
                continue;
            }
            let r = match infer(&t) {
                Ok(r) => r,
                Err(e) => c.fail(&format!("{t} has a derivation but inference failed: {e}")),
            };
            for d in &ds {
                enumerated += 1;
                if let Err(v) = deriv::check(d) {
                    c.fail(&format!("enumerated derivation for {t} rejected: {v}"));
                }
                let (tenv, tty) = disjoint_rename(&d.conclusion.type_env(), &d.conclusion.ty);
                if match_judgment((&r.env, &r.ty), (&tenv, &tty)).is_none() {
                    c.fail(&format!(
                        "{t}: enumerated {} : {} is not an instance of {} : {}",
                        tenv, tty, r.env, r.ty
                    ));
                }
            }
        }
    }
    // 28 of the 33 typable closed terms of size <= 7 have principal
    // types within depth 3; the other five need depth 4
    assert!(enumerated >= 25, "the enumerator must find derivations, got {enumerated}");
    c.pass();
}

#[test]
fn criterion_4_relevance() {
    let c = Criterion::start(4, "inferred environments declare exactly the free variables", 30);
    let mut corpus = soundness_corpus();
    // the generated corpus is closed; opening the top binders gives the
    // free-variable cases some teeth
    let opened: Vec<Term> = corpus
        .iter()
        .filter_map(|t| match t {
            Term::Abs(_, body) => Some((**body).clone()),
            _ => None,
        })
        .collect();
    corpus.extend(opened);
    for t in corpus {
        if let Ok(r) = infer(&t) {
            let dom: Vec<&str> = r.env.domain();
            let fv = t.fv();
            if dom != fv.iter().map(|s| s.as_str()).collect::<Vec<_>>() {
                c.fail(&format!("{t}: dom {dom:?} differs from fv {fv:?}"));
            }
        }
    }
    c.pass();
}

#[test]
fn criterion_5_most_general_unifiers() {
    use rand::Rng;
    use rand::SeedableRng;

    let c = Criterion::start(5, "unifiers are most general on planted problems", 5);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);

    fn rand_lin(rng: &mut impl Rng, vars: &[&str], depth: usize) -> LinType {
        if depth == 0 || rng.gen_bool(0.5) {
            LinType::var(vars[rng.gen_range(0..vars.len())])
        } else {
            LinType::lolli(
                rand_lin(rng, vars, depth - 1),
                rand_lin(rng, vars, depth - 1),
            )
        }
    }

    fn anti_instantiate(t: &LinType, planted: &TypeSubst, rng: &mut impl Rng) -> LinType {
        if rng.gen_bool(0.5) {
            for (v, image) in planted.iter() {
                if t == image {
                    return LinType::var(v.clone());
                }
            }
        }
        match t {
            LinType::Var(_) => t.clone(),
            LinType::Lolli(l, r) => LinType::lolli(
                anti_instantiate(l, planted, rng),
                anti_instantiate(r, planted, rng),
            ),
        }
    }

    for i in 0..500 {
        let dom = ["a0", "a1", "a2", "a3"];
        let base = ["b0", "b1", "b2"];
        let mut planted = TypeSubst::new();
        for v in dom {
            if rng.gen_bool(0.8) {
                planted.bind(v, rand_lin(&mut rng, &base, 2));
            }
        }
        let eqs = (0..rng.gen_range(1..4))
            .map(|_| {
                let ground = planted.apply_lin(&rand_lin(&mut rng, &dom, 2));
                (
                    anti_instantiate(&ground, &planted, &mut rng),
                    anti_instantiate(&ground, &planted, &mut rng),
                )
            })
            .collect();
        let problem = UnifProblem::new(eqs);
        let s = match unify(&problem) {
            UnifyOutcome::Solved(s) => s,
            UnifyOutcome::Failed(e) => c.fail(&format!("problem {i} unsolvable: {e}")),
        };
        for (l, r) in &problem.equations {
            if s.apply_lin(l) != s.apply_lin(r) {
                c.fail(&format!("problem {i}: result does not unify {l} = {r}"));
            }
        }
        let pairs: Vec<_> = problem
            .vars()
            .into_iter()
            .map(|v| {
                let v = LinType::Var(v);
                (s.apply_lin(&v), planted.apply_lin(&v))
            })
            .collect();
        let Some(s2) = match_all(&pairs) else {
            c.fail(&format!("problem {i}: planted unifier is not an instance"));
        };
        let composed = TypeSubst::compose(&s2, &s);
        for v in problem.vars() {
            let v = LinType::Var(v);
            if composed.apply_lin(&v) != planted.apply_lin(&v) {
                c.fail(&format!("problem {i}: composition misses the planted unifier"));
            }
        }
    }
    c.pass();
}

#[test]
fn criterion_6_tight_normal_forms_have_index_zero() {
    let c = Criterion::start(6, "tight derivations of normal forms have index 0", 5);
    let mut applicable = 0;
    for name in TIGHT_FIXTURES {
        let d = fixture(name);
        let j = match deriv::check_q(&d) {
            Ok(j) => j,
            Err(v) => c.fail(&format!("{name}: {v}")),
        };
        if deriv::is_tight(&d) && eval::is_normal(&j.term) {
            applicable += 1;
            if j.index != Some(0) {
                c.fail(&format!("{name}: normal subject with index {:?}", j.index));
            }
        }
    }
    assert!(applicable >= 2, "need normal-form fixtures");
    c.pass();
}

#[test]
fn criterion_7_tight_indices_count_evaluation_steps() {
    let c = Criterion::start(7, "tight indices equal leftmost-outermost step counts", 5);
    for name in TIGHT_FIXTURES {
        let d = fixture(name);
        let j = match deriv::check_q(&d) {
            Ok(j) => j,
            Err(v) => c.fail(&format!("{name}: {v}")),
        };
        if !deriv::is_tight(&d) {
            c.fail(&format!("{name} is not tight"));
        }
        let out = eval::normalize(&j.term, 10_000);
        if out.status != EvalStatus::Normal {
            c.fail(&format!("{name}: subject did not normalize"));
        }
        if Some(out.steps) != j.index {
            c.fail(&format!(
                "{name}: index {:?} but evaluation took {} steps",
                j.index, out.steps
            ));
        }
    }
    c.pass();
}

fn conjecture_campaign() -> harness::ConjectureReport {
    harness::run_conjecture(
        &GenConfig {
            max_size: 12,
            max_binder_reuse: 3,
            seed: 42,
            count: 10_000,
        },
        10_000,
    )
}

#[test]
fn criterion_8_conjecture_campaign() {
    let c = Criterion::start(8, "inferred indices match evaluation over the campaign", 300);
    let report = conjecture_campaign();
    if !report.accounting_holds() {
        c.fail("report accounting identity is broken");
    }
    assert!(report.typable > 1000, "the campaign must exercise inference");
    if report.mismatches.is_empty() {
        c.pass();
    } else {
        // a counterexample to the open question is a finding, not a build
        // failure: dump a replayable report and surface it
        let path = std::env::temp_dir().join("lrank2_conjecture_counterexamples.json");
        let _ = std::fs::write(&path, serde_json::to_string_pretty(&report).unwrap());
        println!(
            "acceptance criterion 8 (inferred indices match evaluation over the campaign): \
             FINDING — {} mismatching term(s), replayable report at {}",
            report.mismatches.len(),
            path.display()
        );
        for m in report.mismatches.iter().take(10) {
            println!(
                "  mismatch: {} inferred {} evaluated {}",
                m.term, m.b_inferred, m.steps_observed
            );
        }
    }
}

/// Strict profile: run with `cargo test --test acceptance -- --ignored`
/// to make any counterexample fail the suite.
#[test]
#[ignore]
fn conjecture_strict() {
    let report = conjecture_campaign();
    assert!(
        report.mismatches.is_empty(),
        "counterexamples found: {:?}",
        report.mismatches
    );
}


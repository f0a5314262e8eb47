//! Leftmost-outermost evaluation: normal/neutral predicates, the single
//! deterministic step and fuel-bounded normalization with an exact step
//! count.

use crate::syntax::Term;

/// Neutral terms: a variable, or a neutral term applied to a normal one.
/// Neutral terms never create a redex when applied.
pub fn is_neutral(t: &Term) -> bool {
    match t {
        Term::Var(_) => true,
        Term::App(fun, arg) => is_neutral(fun) && is_normal(arg),
        Term::Abs(_, _) => false,
    }
}

/// Leftmost-outermost normal forms: neutral terms and abstractions of
/// normal terms.
pub fn is_normal(t: &Term) -> bool {
    match t {
        Term::Abs(_, body) => is_normal(body),
        _ => is_neutral(t),
    }
}

/// Performs one leftmost-outermost step: fire a head β-redex, otherwise
/// descend under the abstraction, otherwise into a non-abstraction
/// function position, otherwise into the argument of a neutral head.
/// Returns `None` when the term is already normal.
pub fn lo_step(t: &Term) -> Option<Term> {
    match t {
        Term::Var(_) => None,
        Term::Abs(x, body) => lo_step(body).map(|b| Term::abs(x.clone(), b)),
        Term::App(fun, arg) => {
            if let Term::Abs(x, body) = &**fun {
                return Some(body.subst(arg, x));
            }
            if let Some(f) = lo_step(fun) {
                return Some(Term::app(f, (**arg).clone()));
            }
            // fun is normal and not an abstraction, hence neutral
            lo_step(arg).map(|a| Term::app((**fun).clone(), a))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalStatus {
    Normal,
    FuelExhausted,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvalOutcome {
    pub result: Term,
    pub steps: u64,
    pub status: EvalStatus,
}

/// Iterates [`lo_step`] up to `fuel` times; `steps` counts exactly the
/// β-reductions performed along the leftmost-outermost sequence.
pub fn normalize(t: &Term, fuel: u64) -> EvalOutcome {
    let mut current = t.clone();
    let mut steps = 0;
    while steps < fuel {
        match lo_step(&current) {
            Some(next) => {
                current = next;
                steps += 1;
            }
            None => {
                return EvalOutcome {
                    result: current,
                    steps,
                    status: EvalStatus::Normal,
                }
            }
        }
    }
    let status = if is_normal(&current) {
        EvalStatus::Normal
    } else {
        EvalStatus::FuelExhausted
    };
    EvalOutcome {
        result: current,
        steps,
        status,
    }
}

/// Intermediate terms after each step, for `--trace` output.
pub fn trace(t: &Term, fuel: u64) -> Vec<Term> {
    let mut current = t.clone();
    let mut out = Vec::new();
    for _ in 0..fuel {
        match lo_step(&current) {
            Some(next) => {
                out.push(next.clone());
                current = next;
            }
            None => break,
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{alpha_eq, parse};

    fn p(s: &str) -> Term {
        parse(s).unwrap()
    }

    #[test]
    fn neutral_and_normal_examples() {
        // x (λy.y) is neutral: x is neutral and λy.y is normal
        assert!(is_neutral(&p("x (\\y. y)")));
        assert!(is_normal(&p("x (\\y. y)")));
        assert!(is_normal(&p("\\x. x")));
        assert!(!is_neutral(&p("\\x. x")));
        let redex = p("(\\x. x) y");
        assert!(!is_neutral(&redex));
        assert!(!is_normal(&redex));
    }

    #[test]
    fn lo_step_follows_the_displayed_sequence() {
        let m = p("(\\x1. (\\x2. x2 x1) x1) (\\y. y)");
        let s1 = lo_step(&m).unwrap();
        assert!(alpha_eq(&s1, &p("(\\x2. x2 (\\y. y)) (\\y. y)")));
        let s2 = lo_step(&s1).unwrap();
        assert!(alpha_eq(&s2, &p("(\\y. y) (\\y. y)")));
        let s3 = lo_step(&s2).unwrap();
        assert!(alpha_eq(&s3, &p("\\y. y")));
        assert_eq!(lo_step(&p("\\x. x")), None);
    }

    #[test]
    fn normalize_examples() {
        let out = normalize(&p("(\\x1. (\\x2. x2 x1) x1) (\\y. y)"), 100);
        assert_eq!(out.status, EvalStatus::Normal);
        assert_eq!(out.steps, 3);
        assert!(alpha_eq(&out.result, &p("\\y. y")));

        let out = normalize(&p("(\\x. x x) (\\y. y)"), 100);
        assert_eq!(out.status, EvalStatus::Normal);
        assert_eq!(out.steps, 2);
        assert!(alpha_eq(&out.result, &p("\\y. y")));

        let omega = p("(\\x. x x) (\\x. x x)");
        let out = normalize(&omega, 50);
        assert_eq!(out.status, EvalStatus::FuelExhausted);
        assert_eq!(out.steps, 50);
    }

    #[test]
    fn normal_iff_no_step() {
        for s in ["x", "\\x. x", "x y", "x (\\y. y)", "(\\x. x) y", "\\x. (\\y. y) x"] {
            let t = p(s);
            assert_eq!(is_normal(&t), lo_step(&t).is_none(), "term {s}");
        }
    }

    /// Checks each LO rule's applicability independently of `lo_step`.
    pub(crate) fn applicable_rules(t: &Term) -> Vec<&'static str> {
        let mut rules = Vec::new();
        if let Term::App(fun, _) = t {
            if matches!(**fun, Term::Abs(_, _)) {
                rules.push("beta");
            }
        }
        if let Term::Abs(_, body) = t {
            if lo_step(body).is_some() {
                rules.push("under-abs");
            }
        }
        if let Term::App(fun, _) = t {
            if !matches!(**fun, Term::Abs(_, _)) && lo_step(fun).is_some() {
                rules.push("into-fun");
            }
        }
        if let Term::App(fun, arg) = t {
            if is_neutral(fun) && lo_step(arg).is_some() {
                rules.push("into-arg");
            }
        }
        rules
    }

    #[test]
    fn rule_selection_is_deterministic() {
        let cfg = crate::harness::GenConfig {
            max_size: 9,
            max_binder_reuse: 3,
            seed: 7,
            count: 10_000,
        };
        for t in crate::harness::gen_terms(&cfg) {
            let mut stack = vec![t];
            while let Some(u) = stack.pop() {
                let rules = applicable_rules(&u);
                assert!(rules.len() <= 1, "ambiguous rules {rules:?} for {u}");
                assert_eq!(rules.is_empty(), is_normal(&u), "term {u}");
                match u {
                    Term::Abs(_, b) => stack.push(*b),
                    Term::App(f, a) => {
                        stack.push(*f);
                        stack.push(*a);
                    }
                    Term::Var(_) => {}
                }
            }
        }
    }

    #[test]
    fn neutral_implies_normal() {
        for s in ["x", "x y", "x (\\y. y)", "x y z"] {
            assert!(is_neutral(&p(s)) && is_normal(&p(s)));
        }
    }
}

//! Random closed λI-term generation and the campaign comparing the
//! inferred index against the leftmost-outermost step count.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::eval::{normalize, EvalStatus};
use crate::infer::infer_q;
use crate::syntax::Term;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenConfig {
    /// Maximum AST node count per term.
    pub max_size: usize,
    /// Each binder occurs between 1 and this many times.
    pub max_binder_reuse: usize,
    pub seed: u64,
    pub count: usize,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            max_size: 12,
            max_binder_reuse: 3,
            seed: 42,
            count: 10_000,
        }
    }
}

/// Deterministic stream of closed λI-terms. Duplicates are allowed.
pub fn gen_terms(cfg: &GenConfig) -> Vec<Term> {
    assert!(cfg.max_size >= 1);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut out = Vec::with_capacity(cfg.count);
    while out.len() < cfg.count {
        if let Some(t) = gen_one(&mut rng, cfg.max_size, &mut Vec::new(), cfg.max_binder_reuse, 0)
        {
            if t.fv().is_empty() && t.is_lambda_i() && t.size() <= cfg.max_size {
                out.push(t);
            }
        }
    }
    out
}

/// One sampling attempt: 40% abstractions, 40% applications, 20%
/// variables, constrained by the size budget and the in-scope list.
fn gen_one(
    rng: &mut ChaCha8Rng,
    budget: usize,
    scope: &mut Vec<String>,
    max_reuse: usize,
    depth: usize,
) -> Option<Term> {
    if budget == 0 {
        return None;
    }
    if budget == 1 {
        if scope.is_empty() {
            return None;
        }
        let i = rng.gen_range(0..scope.len());
        return Some(Term::var(scope[i].clone()));
    }
    let roll: f64 = rng.gen();
    let can_app = budget >= 3;
    let pick_var = !scope.is_empty() && roll < 0.2;
    let pick_abs = roll < 0.6 || !can_app;
    if pick_var {
        let i = rng.gen_range(0..scope.len());
        Some(Term::var(scope[i].clone()))
    } else if pick_abs {
        let name = format!("x{depth}");
        scope.push(name.clone());
        // resample the body locally until the binder is used
        let mut body = None;
        for _ in 0..8 {
            if let Some(b) = gen_one(rng, budget - 1, scope, max_reuse, depth + 1) {
                let uses = b.free_occurrences(&name);
                if (1..=max_reuse).contains(&uses) {
                    body = Some(b);
                    break;
                }
            }
        }
        scope.pop();
        Some(Term::abs(name, body?))
    } else {
        let left = rng.gen_range(1..budget - 1);
        let fun = gen_one(rng, left, scope, max_reuse, depth)?;
        let arg = gen_one(rng, budget - 1 - left, scope, max_reuse, depth)?;
        Some(Term::app(fun, arg))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mismatch {
    pub term: String,
    pub b_inferred: u64,
    pub steps_observed: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConjectureReport {
    pub config: GenConfig,
    pub fuel: u64,
    pub total: usize,
    pub typable: usize,
    pub agreements: usize,
    pub mismatches: Vec<Mismatch>,
    pub diverged: usize,
}

impl ConjectureReport {
    /// typable = agreements + |mismatches| + diverged
    pub fn accounting_holds(&self) -> bool {
        self.typable == self.agreements + self.mismatches.len() + self.diverged
    }
}

/// Runs the index-vs-evaluation comparison over a generated corpus.
/// Fuel-exhausted terms are recorded as diverged, never as mismatches.
pub fn run_conjecture(cfg: &GenConfig, fuel: u64) -> ConjectureReport {
    run_conjecture_on(cfg.clone(), fuel, &gen_terms(cfg))
}

/// Same comparison over an explicit corpus, for fixtures and replays.
pub fn run_conjecture_on(cfg: GenConfig, fuel: u64, corpus: &[Term]) -> ConjectureReport {
    let mut report = ConjectureReport {
        config: cfg,
        fuel,
        total: corpus.len(),
        typable: 0,
        agreements: 0,
        mismatches: Vec::new(),
        diverged: 0,
    };
    for term in corpus {
        let Ok(result) = infer_q(term) else {
            continue;
        };
        report.typable += 1;
        let out = normalize(term, fuel);
        if out.status == EvalStatus::FuelExhausted {
            report.diverged += 1;
        } else if out.steps == result.steps {
            report.agreements += 1;
        } else {
            report.mismatches.push(Mismatch {
                term: term.to_string(),
                b_inferred: result.steps,
                steps_observed: out.steps,
            });
        }
    }
    debug_assert!(report.accounting_holds());
    report
}

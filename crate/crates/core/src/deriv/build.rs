//! Builds a plain-system derivation alongside inference, following the
//! constructive reading of the soundness argument: apply the matching
//! introduction/elimination rule, then Contraction and Exchange to merge
//! the variables that environment summing shares.

use crate::infer::{InferError, PathStep, TermPath, TyVarGen};
use crate::syntax::{NameGen, Term};
use crate::types::{LinType, Rank2Type, Seq, TypeSubst};
use crate::unify::{unify_q, UnifProblem, UnifyOutcome};

use super::{Decl, Derivation, Judgment, Rule};

/// For every term the inference algorithm types, returns a derivation the
/// plain checker accepts whose root judgment carries the same environment
/// and type.
pub fn build_from_inference(term: &Term) -> Result<Derivation, InferError> {
    let mut tygen = TyVarGen::new();
    let mut names = NameGen::new();
    build(term, &TermPath::default(), &mut tygen, &mut names)
}

fn plain_judgment(env: Vec<Decl>, term: Term, ty: Rank2Type) -> Judgment {
    Judgment {
        env,
        term,
        ty,
        multi: None,
        index: None,
    }
}

fn build(
    term: &Term,
    path: &TermPath,
    tygen: &mut TyVarGen,
    names: &mut NameGen,
) -> Result<Derivation, InferError> {
    match term {
        Term::Var(x) => {
            let alpha = tygen.fresh();
            Ok(Derivation::leaf(
                Rule::Axiom,
                plain_judgment(
                    vec![Decl::plain(x.clone(), Seq::singleton(alpha.clone()))],
                    term.clone(),
                    Rank2Type::Lin(alpha),
                ),
            ))
        }
        Term::Abs(x, body) => {
            let inner = build(body, &path.child(PathStep::Body), tygen, names)?;
            let position = inner
                .conclusion
                .env
                .iter()
                .position(|d| &d.var == x)
                .ok_or_else(|| InferError::NotLambdaI {
                    binder: x.clone(),
                    path: path.clone(),
                })?;
            let moved = move_to_last(inner, position);
            let decl = moved.conclusion.env.last().unwrap().clone();
            let mut env = moved.conclusion.env.clone();
            env.pop();
            let (rule, ty) = if decl.types.len() == 1 {
                (
                    Rule::LolliIntro,
                    Rank2Type::lolli(decl.types.items()[0].clone(), moved.conclusion.ty.clone()),
                )
            } else {
                (
                    Rule::ArrowIntro,
                    Rank2Type::arrow(decl.types.clone(), moved.conclusion.ty.clone()),
                )
            };
            let judgment = plain_judgment(env, term.clone(), ty);
            Ok(Derivation::node(rule, vec![moved], judgment))
        }
        Term::App(fun, arg) => {
            let head = build(fun, &path.child(PathStep::Fun), tygen, names)?;
            match head.conclusion.ty.clone() {
                Rank2Type::Lin(LinType::Var(alpha1)) => {
                    let argd = build(arg, &path.child(PathStep::Arg), tygen, names)?;
                    let tau2 = lin_type_of(&argd, path)?;
                    let alpha2 = tygen.fresh();
                    let alpha3 = tygen.fresh();
                    let problem = UnifProblem::new(vec![
                        (
                            LinType::var(alpha1),
                            LinType::lolli(alpha2.clone(), alpha3),
                        ),
                        (tau2, alpha2),
                    ]);
                    let subst = solve(problem, path)?;
                    join_lolli(term, head, argd, &subst, names, path)
                }
                Rank2Type::Arrow(seq, _) => {
                    let argd = build(arg, &path.child(PathStep::Arg), tygen, names)?;
                    lin_type_of(&argd, path)?;
                    let instances: Vec<Derivation> = (0..seq.len())
                        .map(|_| instantiate(&argd, tygen))
                        .collect();
                    let equations = instances
                        .iter()
                        .zip(seq.items())
                        .map(|(inst, expected)| {
                            (
                                inst.conclusion.ty.as_lin().unwrap().clone(),
                                expected.clone(),
                            )
                        })
                        .collect();
                    let subst = solve(UnifProblem::new(equations), path)?;
                    join_arrow(term, head, instances, &subst, names)
                }
                ref ty if ty.split_lolli().is_some() => {
                    let (tau, _) = ty.split_lolli().unwrap();
                    let argd = build(arg, &path.child(PathStep::Arg), tygen, names)?;
                    let tau2 = lin_type_of(&argd, path)?;
                    let subst = solve(UnifProblem::new(vec![(tau2, tau)]), path)?;
                    join_lolli(term, head, argd, &subst, names, path)
                }
                _ => Err(InferError::NoRule { path: path.clone() }),
            }
        }
    }
}

fn lin_type_of(d: &Derivation, path: &TermPath) -> Result<LinType, InferError> {
    d.conclusion
        .ty
        .as_lin()
        .cloned()
        .ok_or_else(|| InferError::NoRule { path: path.clone() })
}

fn solve(problem: UnifProblem, path: &TermPath) -> Result<TypeSubst, InferError> {
    match unify_q(&problem) {
        (UnifyOutcome::Solved(s), _) => Ok(s),
        (UnifyOutcome::Failed(e), _) => Err(InferError::Unification {
            path: path.clone(),
            source: e,
        }),
    }
}

/// Linear elimination followed by the contractions that restore the
/// variables shared between function and argument.
fn join_lolli(
    term: &Term,
    head: Derivation,
    argd: Derivation,
    subst: &TypeSubst,
    names: &mut NameGen,
    path: &TermPath,
) -> Result<Derivation, InferError> {
    let shared = shared_vars(&head.conclusion.env, &argd.conclusion.env);
    let mut head = head;
    let mut argd = argd;
    let mut pairs = Vec::new();
    for x in &shared {
        let y = names.fresh(x);
        let z = names.fresh(x);
        head = rename_term_var(&head, x, &y);
        argd = rename_term_var(&argd, x, &z);
        pairs.push((x.clone(), y, z));
    }
    head = map_types(&head, subst);
    argd = map_types(&argd, subst);
    let (_, sigma) = head
        .conclusion
        .ty
        .split_lolli()
        .ok_or_else(|| InferError::NoRule { path: path.clone() })?;
    let mut env = head.conclusion.env.clone();
    env.extend(argd.conclusion.env.iter().cloned());
    let subject = Term::app(head.conclusion.term.clone(), argd.conclusion.term.clone());
    let mut d = Derivation::node(
        Rule::LolliElim,
        vec![head, argd],
        plain_judgment(env, subject, sigma),
    );
    for (x, y, z) in pairs {
        d = contract_pair(d, &y, &z, &x);
    }
    debug_assert!(crate::syntax::alpha_eq(&d.conclusion.term, term));
    Ok(d)
}

/// Sequence elimination over n fresh instantiations of the argument
/// derivation, followed by the same contraction bookkeeping.
fn join_arrow(
    term: &Term,
    head: Derivation,
    instances: Vec<Derivation>,
    subst: &TypeSubst,
    names: &mut NameGen,
) -> Result<Derivation, InferError> {
    let shared = shared_vars(&head.conclusion.env, &instances[0].conclusion.env);
    let mut head = head;
    let mut instances = instances;
    let mut pairs = Vec::new();
    for x in &shared {
        let y = names.fresh(x);
        let z = names.fresh(x);
        head = rename_term_var(&head, x, &y);
        for inst in &mut instances {
            *inst = rename_term_var(inst, x, &z);
        }
        pairs.push((x.clone(), y, z));
    }
    head = map_types(&head, subst);
    for inst in &mut instances {
        *inst = map_types(inst, subst);
    }
    let sigma = match &head.conclusion.ty {
        Rank2Type::Arrow(_, sigma) => (**sigma).clone(),
        _ => unreachable!("the head keeps its arrow shape under substitution"),
    };
    let mut summed = instances[0].conclusion.env.clone();
    for inst in &instances[1..] {
        summed = super::denv_sum(&summed, &inst.conclusion.env);
    }
    let mut env = head.conclusion.env.clone();
    env.extend(summed);
    let subject = Term::app(
        head.conclusion.term.clone(),
        instances[0].conclusion.term.clone(),
    );
    let mut premises = vec![head];
    premises.extend(instances);
    let mut d = Derivation::node(
        Rule::ArrowElim,
        premises,
        plain_judgment(env, subject, sigma),
    );
    for (x, y, z) in pairs {
        d = contract_pair(d, &y, &z, &x);
    }
    debug_assert!(crate::syntax::alpha_eq(&d.conclusion.term, term));
    Ok(d)
}

fn shared_vars(a: &[Decl], b: &[Decl]) -> Vec<String> {
    a.iter()
        .filter(|d| b.iter().any(|e| e.var == d.var))
        .map(|d| d.var.clone())
        .collect()
}

/// Applies a type substitution to every judgment in the tree. Rule
/// instances stay valid: substitution preserves shapes, sequence lengths
/// and side conditions.
pub(super) fn map_types(d: &Derivation, subst: &TypeSubst) -> Derivation {
    Derivation {
        rule: d.rule,
        premises: d.premises.iter().map(|p| map_types(p, subst)).collect(),
        conclusion: Judgment {
            env: d
                .conclusion
                .env
                .iter()
                .map(|decl| Decl {
                    var: decl.var.clone(),
                    types: subst.apply_seq(&decl.types),
                    multi: decl.multi.clone(),
                })
                .collect(),
            term: d.conclusion.term.clone(),
            ty: subst.apply_rank2(&d.conclusion.ty),
            multi: d.conclusion.multi.clone(),
            index: d.conclusion.index,
        },
    }
}

/// Renames a free term variable throughout the tree: in each judgment the
/// declaration (when present) and the subject.
pub(super) fn rename_term_var(d: &Derivation, from: &str, to: &str) -> Derivation {
    Derivation {
        rule: d.rule,
        premises: d
            .premises
            .iter()
            .map(|p| rename_term_var(p, from, to))
            .collect(),
        conclusion: Judgment {
            env: d
                .conclusion
                .env
                .iter()
                .map(|decl| Decl {
                    var: if decl.var == from {
                        to.to_string()
                    } else {
                        decl.var.clone()
                    },
                    types: decl.types.clone(),
                    multi: decl.multi.clone(),
                })
                .collect(),
            term: d.conclusion.term.subst(&Term::var(to), from),
            ty: d.conclusion.ty.clone(),
            multi: d.conclusion.multi.clone(),
            index: d.conclusion.index,
        },
    }
}

/// One Exchange node swapping adjacent declarations i and i+1.
pub(super) fn exchange_once(d: Derivation, i: usize) -> Derivation {
    let mut judgment = d.conclusion.clone();
    judgment.env.swap(i, i + 1);
    Derivation::node(Rule::Exchange, vec![d], judgment)
}

/// Exchange chain moving the declaration at `from` to the end.
pub(super) fn move_to_last(d: Derivation, from: usize) -> Derivation {
    let last = d.conclusion.env.len() - 1;
    (from..last).fold(d, exchange_once)
}

/// Bubbles `z` next to `y`, then contracts the pair into `x`.
pub(super) fn contract_pair(d: Derivation, y: &str, z: &str, x: &str) -> Derivation {
    let env = &d.conclusion.env;
    let py = env.iter().position(|decl| decl.var == y).unwrap();
    let pz = env.iter().position(|decl| decl.var == z).unwrap();
    debug_assert!(py < pz);
    let mut d = d;
    for i in ((py + 1)..pz).rev() {
        d = exchange_once(d, i);
    }
    let premise_env = &d.conclusion.env;
    let merged = super::decl_merge(&premise_env[py], &premise_env[py + 1], x.to_string());
    let mut env = premise_env.clone();
    env.splice(py..=py + 1, [merged]);
    let term = d
        .conclusion
        .term
        .subst(&Term::var(x), y)
        .subst(&Term::var(x), z);
    let judgment = Judgment {
        env,
        term,
        ty: d.conclusion.ty.clone(),
        multi: d.conclusion.multi.clone(),
        index: d.conclusion.index,
    };
    Derivation::node(Rule::Contraction, vec![d], judgment)
}

/// Renames every type variable in the tree to fresh ones, giving a copy
/// sharing no variables with the original.
fn instantiate(d: &Derivation, tygen: &mut TyVarGen) -> Derivation {
    let mut vars = Vec::new();
    collect_tree_vars(d, &mut vars);
    let renaming = vars
        .into_iter()
        .map(|v| (v, tygen.fresh()))
        .collect::<std::collections::BTreeMap<_, _>>();
    map_types(d, &TypeSubst::from_map(renaming))
}

pub(super) fn collect_tree_vars(d: &Derivation, acc: &mut Vec<String>) {
    for decl in &d.conclusion.env {
        for item in decl.types.items() {
            for v in item.vars() {
                if !acc.contains(&v) {
                    acc.push(v);
                }
            }
        }
    }
    for v in d.conclusion.ty.vars() {
        if !acc.contains(&v) {
            acc.push(v);
        }
    }
    for p in &d.premises {
        collect_tree_vars(p, acc);
    }
}

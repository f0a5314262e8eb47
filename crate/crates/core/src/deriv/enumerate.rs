//! Bounded search for plain-system derivations, used as a brute-force
//! completeness oracle. The search works directly off the typing rules
//! with its own metavariable bindings, independently of the inference
//! algorithm it is used to test.

use std::collections::BTreeMap;

use crate::syntax::{NameGen, Term};
use crate::types::{LinType, Rank2Type, Seq, TypeSubst};

use super::build::{contract_pair, exchange_once, map_types};
use super::{check, Decl, Derivation, Judgment, Rule};

const MAX_SEQ_LEN: usize = 3;

#[derive(Debug, Clone, Default)]
struct SearchState {
    bindings: BTreeMap<String, LinType>,
    next_meta: u64,
}

impl SearchState {
    fn fresh_meta(&mut self) -> LinType {
        let v = LinType::var(format!("?{}", self.next_meta));
        self.next_meta += 1;
        v
    }

    fn resolve(&self, t: &LinType) -> LinType {
        match t {
            LinType::Var(v) => match self.bindings.get(v) {
                Some(bound) => self.resolve(bound),
                None => t.clone(),
            },
            LinType::Lolli(l, r) => LinType::lolli(self.resolve(l), self.resolve(r)),
        }
    }

    fn resolve_rank2(&self, t: &Rank2Type) -> Rank2Type {
        match t {
            Rank2Type::Lin(t) => Rank2Type::Lin(self.resolve(t)),
            Rank2Type::Lolli(l, r) => {
                Rank2Type::lolli(self.resolve(l), self.resolve_rank2(r))
            }
            Rank2Type::Arrow(seq, r) => Rank2Type::Arrow(
                Seq::new(seq.items().iter().map(|i| self.resolve(i)).collect()),
                Box::new(self.resolve_rank2(r)),
            ),
        }
    }

    fn unify(&mut self, a: &LinType, b: &LinType) -> bool {
        let a = self.resolve(a);
        let b = self.resolve(b);
        match (&a, &b) {
            (LinType::Var(x), LinType::Var(y)) if x == y => true,
            (LinType::Var(x), _) => {
                if b.contains_var(x) {
                    return false;
                }
                self.bindings.insert(x.clone(), b);
                true
            }
            (_, LinType::Var(y)) => {
                if a.contains_var(y) {
                    return false;
                }
                self.bindings.insert(y.clone(), a);
                true
            }
            (LinType::Lolli(a1, a2), LinType::Lolli(b1, b2)) => {
                self.unify(a1, b1) && self.unify(a2, b2)
            }
        }
    }
}

/// Exhaustively searches derivations of `term` whose types fit the depth
/// bound and whose sequences have length at most three, modulo canonical
/// variable naming. Only meant as a test oracle for small terms.
pub fn enumerate_derivations(
    term: &Term,
    type_depth_bound: usize,
    count_bound: usize,
) -> Vec<Derivation> {
    let mut names = NameGen::new();
    // rename shared free variables apart; they are contracted back at the root
    let mut renamed = term.clone();
    let mut groups = Vec::new();
    for v in term.fv() {
        if renamed.free_occurrences(&v) >= 2 {
            let mut occs = Vec::new();
            renamed = rename_occurrences(&renamed, &v, &mut names, &mut occs);
            groups.push((v, occs));
        }
    }
    let mut out: Vec<Derivation> = Vec::new();
    for (d, st) in search(&renamed, SearchState::default(), &mut names) {
        let mut current = Some(d);
        for (v, occs) in &groups {
            current = current.and_then(|d| contract_group(d, occs, v, &mut names));
        }
        let Some(d) = current else {
            continue;
        };
        if let Some(done) = materialize(&d, &st, type_depth_bound) {
            if !out.contains(&done) {
                out.push(done);
            }
        }
        if out.len() >= count_bound {
            break;
        }
    }
    out
}

fn search(
    term: &Term,
    st: SearchState,
    names: &mut NameGen,
) -> Vec<(Derivation, SearchState)> {
    match term {
        Term::Var(x) => {
            let mut st = st;
            let meta = st.fresh_meta();
            let judgment = Judgment {
                env: vec![Decl::plain(x.clone(), Seq::singleton(meta.clone()))],
                term: term.clone(),
                ty: Rank2Type::Lin(meta),
                multi: None,
                index: None,
            };
            vec![(Derivation::leaf(Rule::Axiom, judgment), st)]
        }
        Term::Abs(x, body) => {
            let occurrences = body.free_occurrences(x);
            if occurrences == 0 {
                return Vec::new();
            }
            let (body, occs) = if occurrences == 1 {
                (body.as_ref().clone(), vec![x.clone()])
            } else {
                let mut occs = Vec::new();
                let renamed = rename_occurrences(body, x, names, &mut occs);
                (renamed, occs)
            };
            let mut out = Vec::new();
            for (d, st1) in search(&body, st.clone(), names) {
                let Some(d) = contract_group(d, &occs, x, names) else {
                    continue;
                };
                if let Some(d) = intro_binder(d, x, term) {
                    out.push((d, st1));
                }
            }
            out
        }
        Term::App(fun, arg) => {
            let mut out = Vec::new();
            for (head, st1) in search(fun, st.clone(), names) {
                let head_ty = st1.resolve_rank2(&head.conclusion.ty);
                match head_ty {
                    Rank2Type::Lin(LinType::Var(beta)) => {
                        for (argd, mut st2) in search(arg, st1.clone(), names) {
                            let Some(tau) = argd.conclusion.ty.as_lin() else {
                                continue;
                            };
                            let dom = st2.fresh_meta();
                            let cod = st2.fresh_meta();
                            if !st2.unify(
                                &LinType::var(beta.clone()),
                                &LinType::lolli(dom.clone(), cod.clone()),
                            ) {
                                continue;
                            }
                            if !st2.unify(&tau.clone(), &dom) {
                                continue;
                            }
                            if let Some(d) =
                                elim_lolli(term, &head, &argd, Rank2Type::Lin(cod))
                            {
                                out.push((d, st2));
                            }
                        }
                    }
                    ref t if t.split_lolli().is_some() => {
                        let (dom, cod) = t.split_lolli().unwrap();
                        for (argd, mut st2) in search(arg, st1.clone(), names) {
                            let Some(tau) = argd.conclusion.ty.as_lin() else {
                                continue;
                            };
                            if !st2.unify(&tau.clone(), &dom) {
                                continue;
                            }
                            if let Some(d) = elim_lolli(term, &head, &argd, cod.clone()) {
                                out.push((d, st2));
                            }
                        }
                    }
                    Rank2Type::Arrow(seq, sigma) => {
                        for (args, st2) in search_many(arg, st1.clone(), names, seq.len()) {
                            let mut st3 = st2;
                            let mut ok = true;
                            for (argd, expected) in args.iter().zip(seq.items()) {
                                let Some(tau) = argd.conclusion.ty.as_lin() else {
                                    ok = false;
                                    break;
                                };
                                if !st3.unify(&tau.clone(), expected) {
                                    ok = false;
                                    break;
                                }
                            }
                            if !ok {
                                continue;
                            }
                            if let Some(d) = elim_arrow(term, &head, args, (*sigma).clone()) {
                                out.push((d, st3));
                            }
                        }
                    }
                    _ => {}
                }
            }
            out
        }
    }
}

fn search_many(
    term: &Term,
    st: SearchState,
    names: &mut NameGen,
    n: usize,
) -> Vec<(Vec<Derivation>, SearchState)> {
    if n == 0 {
        return vec![(Vec::new(), st)];
    }
    let mut out = Vec::new();
    for (d, st1) in search(term, st.clone(), names) {
        for (mut rest, st2) in search_many(term, st1, names, n - 1) {
            rest.insert(0, d.clone());
            out.push((rest, st2));
        }
    }
    out
}

/// Contracts the occurrence declarations left to right into `target`,
/// pruning when a merged sequence would exceed the length bound.
fn contract_group(
    mut d: Derivation,
    occs: &[String],
    target: &str,
    names: &mut NameGen,
) -> Option<Derivation> {
    if occs.len() == 1 {
        // the single occurrence already carries the target name
        return Some(d);
    }
    let mut current = occs[0].clone();
    for (i, next) in occs[1..].iter().enumerate() {
        let last = i == occs.len() - 2;
        let merged_name = if last {
            target.to_string()
        } else {
            names.fresh(target)
        };
        d = contract_pair(d, &current, next, &merged_name);
        let merged = d
            .conclusion
            .env
            .iter()
            .find(|decl| decl.var == merged_name)?;
        if merged.types.len() > MAX_SEQ_LEN {
            return None;
        }
        current = merged_name;
    }
    Some(d)
}

fn intro_binder(d: Derivation, x: &str, original: &Term) -> Option<Derivation> {
    let position = d.conclusion.env.iter().position(|decl| decl.var == x)?;
    let last = d.conclusion.env.len() - 1;
    let moved = (position..last).fold(d, exchange_once);
    let decl = moved.conclusion.env.last().unwrap().clone();
    if decl.types.len() > MAX_SEQ_LEN {
        return None;
    }
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
    let judgment = Judgment {
        env,
        term: original.clone(),
        ty,
        multi: None,
        index: None,
    };
    Some(Derivation::node(rule, vec![moved], judgment))
}

fn elim_lolli(
    term: &Term,
    head: &Derivation,
    argd: &Derivation,
    cod: Rank2Type,
) -> Option<Derivation> {
    let mut env = head.conclusion.env.clone();
    env.extend(argd.conclusion.env.iter().cloned());
    if !super::denv_consistent(&env) {
        return None;
    }
    let judgment = Judgment {
        env,
        term: term.clone(),
        ty: cod,
        multi: None,
        index: None,
    };
    Some(Derivation::node(
        Rule::LolliElim,
        vec![head.clone(), argd.clone()],
        judgment,
    ))
}

fn elim_arrow(
    term: &Term,
    head: &Derivation,
    args: Vec<Derivation>,
    cod: Rank2Type,
) -> Option<Derivation> {
    let mut summed = args[0].conclusion.env.clone();
    for a in &args[1..] {
        summed = super::denv_sum(&summed, &a.conclusion.env);
    }
    if summed.iter().any(|d| d.types.len() > MAX_SEQ_LEN) {
        return None;
    }
    let mut env = head.conclusion.env.clone();
    env.extend(summed);
    if !super::denv_consistent(&env) {
        return None;
    }
    let judgment = Judgment {
        env,
        term: term.clone(),
        ty: cod,
        multi: None,
        index: None,
    };
    let mut premises = vec![head.clone()];
    premises.extend(args);
    Some(Derivation::node(Rule::ArrowElim, premises, judgment))
}

/// Resolves the branch bindings into every judgment, renames the leftover
/// metavariables canonically and enforces the bounds. Search conclusions
/// store types pre-unification, so intermediate judgments are rebuilt from
/// the rules they instantiate.
fn materialize(d: &Derivation, st: &SearchState, depth_bound: usize) -> Option<Derivation> {
    let resolved = map_resolve(d, st);
    let mut vars = Vec::new();
    super::build::collect_tree_vars(&resolved, &mut vars);
    let renaming = vars
        .into_iter()
        .enumerate()
        .map(|(i, v)| (v, LinType::var(format!("a{i}"))))
        .collect::<BTreeMap<_, _>>();
    let canonical = map_types(&resolved, &TypeSubst::from_map(renaming));
    if !within_bounds(&canonical, depth_bound) {
        return None;
    }
    debug_assert!(
        check(&canonical).is_ok(),
        "enumerated derivation failed its own check: {:?}",
        check(&canonical)
    );
    Some(canonical)
}

fn map_resolve(d: &Derivation, st: &SearchState) -> Derivation {
    Derivation {
        rule: d.rule,
        premises: d.premises.iter().map(|p| map_resolve(p, st)).collect(),
        conclusion: Judgment {
            env: d
                .conclusion
                .env
                .iter()
                .map(|decl| Decl {
                    var: decl.var.clone(),
                    types: Seq::new(
                        decl.types.items().iter().map(|t| st.resolve(t)).collect(),
                    ),
                    multi: decl.multi.clone(),
                })
                .collect(),
            term: d.conclusion.term.clone(),
            ty: st.resolve_rank2(&d.conclusion.ty),
            multi: d.conclusion.multi.clone(),
            index: d.conclusion.index,
        },
    }
}

fn within_bounds(d: &Derivation, depth_bound: usize) -> bool {
    let j = &d.conclusion;
    let env_ok = j.env.iter().all(|decl| {
        decl.types.len() <= MAX_SEQ_LEN
            && decl.types.items().iter().all(|t| t.depth() <= depth_bound)
    });
    env_ok
        && j.ty.depth() <= depth_bound
        && d.premises.iter().all(|p| within_bounds(p, depth_bound))
}

/// Replaces free occurrences of `var` left to right with fresh names.
fn rename_occurrences(
    t: &Term,
    var: &str,
    names: &mut NameGen,
    acc: &mut Vec<String>,
) -> Term {
    match t {
        Term::Var(y) if y == var => {
            let o = names.fresh(var);
            acc.push(o.clone());
            Term::var(o)
        }
        Term::Var(_) => t.clone(),
        Term::Abs(y, _) if y == var => t.clone(),
        Term::Abs(y, body) => Term::abs(y.clone(), rename_occurrences(body, var, names, acc)),
        Term::App(f, a) => Term::app(
            rename_occurrences(f, var, names, acc),
            rename_occurrences(a, var, names, acc),
        ),
    }
}

//! First-order unification over linear types: the single-step
//! transformation relation, the unification algorithm and its
//! step-counting variant.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::types::{LinType, Rank2Type, TypeEnv, TypeSubst};

/// A finite set of equations between linear types, kept in order so step
/// traces are reproducible.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnifProblem {
    pub equations: Vec<(LinType, LinType)>,
}

impl UnifProblem {
    pub fn new(equations: Vec<(LinType, LinType)>) -> UnifProblem {
        UnifProblem { equations }
    }

    pub fn vars(&self) -> Vec<String> {
        let mut acc = Vec::new();
        for (l, r) in &self.equations {
            for v in l.vars().into_iter().chain(r.vars()) {
                if !acc.contains(&v) {
                    acc.push(v);
                }
            }
        }
        acc
    }

    /// Solved form: pairwise distinct variables on the left, none of which
    /// occurs in any right-hand side.
    pub fn is_solved_form(&self) -> bool {
        let mut lhs = Vec::new();
        for (l, _) in &self.equations {
            match l {
                LinType::Var(v) => {
                    if lhs.iter().any(|x| x == v) {
                        return false;
                    }
                    lhs.push(v.clone());
                }
                _ => return false,
            }
        }
        lhs.iter()
            .all(|v| self.equations.iter().all(|(_, r)| !r.contains_var(v)))
    }

    fn total_size(&self) -> usize {
        self.equations.iter().map(|(l, r)| l.size() + r.size()).sum()
    }

    /// Count of variables that are not yet solved: a variable is solved
    /// when its only occurrence is as the left side of one equation whose
    /// right side it does not contain.
    fn unsolved_vars(&self) -> usize {
        self.vars()
            .into_iter()
            .filter(|v| {
                let mut lhs_hits = 0usize;
                let mut other_hits = 0usize;
                for (l, r) in &self.equations {
                    match l {
                        LinType::Var(x) if x == v => lhs_hits += 1,
                        _ => {
                            if l.contains_var(v) {
                                other_hits += 1;
                            }
                        }
                    }
                    if r.contains_var(v) {
                        other_hits += 1;
                    }
                }
                !(lhs_hits == 1 && other_hits == 0)
            })
            .count()
    }

    fn unoriented(&self) -> usize {
        self.equations
            .iter()
            .filter(|(l, _)| !matches!(l, LinType::Var(_)))
            .count()
    }

    /// Lexicographic termination measure for the transformation relation.
    pub fn measure(&self) -> (usize, usize, usize) {
        (self.unsolved_vars(), self.total_size(), self.unoriented())
    }
}

impl fmt::Display for UnifProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (l, r)) in self.equations.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{l} = {r}")?;
        }
        write!(f, "}}")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum UnifyError {
    #[error("occurs check: {var} occurs in {ty}")]
    OccursCheck { var: String, ty: LinType },
    /// Reserved: a constructor clash cannot arise with a single type
    /// constructor, so this variant is never produced.
    #[error("constructor clash")]
    Clash,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepRule {
    Delete,
    Decompose,
    Orient,
    Eliminate,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Step {
    Next { problem: UnifProblem, rule: StepRule },
    Done,
    Fail(UnifyError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum UnifyOutcome {
    Solved(TypeSubst),
    Failed(UnifyError),
}

impl UnifyOutcome {
    pub fn solved(self) -> Option<TypeSubst> {
        match self {
            UnifyOutcome::Solved(s) => Some(s),
            UnifyOutcome::Failed(_) => None,
        }
    }
}

/// Applies one transformation to the leftmost equation any rule matches,
/// trying rules in the listed priority: delete, decompose, orient,
/// eliminate, occurs-fail. `Done` means no rule applies.
pub fn step(p: &UnifProblem) -> Step {
    for (i, (lhs, rhs)) in p.equations.iter().enumerate() {
        if lhs == rhs {
            let mut eqs = p.equations.clone();
            eqs.remove(i);
            return Step::Next {
                problem: UnifProblem::new(eqs),
                rule: StepRule::Delete,
            };
        }
        if let (LinType::Lolli(l1, l2), LinType::Lolli(r1, r2)) = (lhs, rhs) {
            let mut eqs = p.equations.clone();
            eqs.splice(
                i..=i,
                [((**l1).clone(), (**r1).clone()), ((**l2).clone(), (**r2).clone())],
            );
            return Step::Next {
                problem: UnifProblem::new(eqs),
                rule: StepRule::Decompose,
            };
        }
        if matches!(lhs, LinType::Lolli(_, _)) && matches!(rhs, LinType::Var(_)) {
            let mut eqs = p.equations.clone();
            eqs[i] = (rhs.clone(), lhs.clone());
            return Step::Next {
                problem: UnifProblem::new(eqs),
                rule: StepRule::Orient,
            };
        }
        if let LinType::Var(v) = lhs {
            if rhs.contains_var(v) {
                // lhs == rhs was excluded above, so the occurrence is proper
                return Step::Fail(UnifyError::OccursCheck {
                    var: v.clone(),
                    ty: rhs.clone(),
                });
            }
            let occurs_elsewhere = p
                .equations
                .iter()
                .enumerate()
                .any(|(j, (l, r))| j != i && (l.contains_var(v) || r.contains_var(v)));
            if occurs_elsewhere {
                let single = TypeSubst::from_solved(vec![(v.clone(), rhs.clone())]);
                let eqs = p
                    .equations
                    .iter()
                    .enumerate()
                    .map(|(j, (l, r))| {
                        if j == i {
                            (l.clone(), r.clone())
                        } else {
                            (single.apply_lin(l), single.apply_lin(r))
                        }
                    })
                    .collect();
                return Step::Next {
                    problem: UnifProblem::new(eqs),
                    rule: StepRule::Eliminate,
                };
            }
        }
    }
    Step::Done
}

fn run(p: &UnifProblem) -> (UnifyOutcome, u64) {
    let mut current = p.clone();
    let mut decompositions = 0;
    loop {
        match step(&current) {
            Step::Next { problem, rule } => {
                if rule == StepRule::Decompose {
                    decompositions += 1;
                }
                current = problem;
            }
            Step::Fail(e) => return (UnifyOutcome::Failed(e), decompositions),
            Step::Done => {
                if !current.is_solved_form() {
                    // unreachable with a single type constructor
                    return (UnifyOutcome::Failed(UnifyError::Clash), decompositions);
                }
                let pairs = current
                    .equations
                    .into_iter()
                    .map(|(l, r)| match l {
                        LinType::Var(v) => (v, r),
                        _ => unreachable!("solved form has variable left sides"),
                    })
                    .collect();
                return (UnifyOutcome::Solved(TypeSubst::from_solved(pairs)), decompositions);
            }
        }
    }
}

/// Iterates the transformation relation to a fixpoint and returns the MGU
/// when the problem is solvable.
pub fn unify(p: &UnifProblem) -> UnifyOutcome {
    run(p).0
}

/// Same substitution as [`unify`], together with the number of times the
/// arrow-decomposition transformation fired.
pub fn unify_q(p: &UnifProblem) -> (UnifyOutcome, u64) {
    run(p)
}

/// One-sided unification: finds a substitution over the pattern's
/// variables with `S(pattern) = target`.
pub fn match_lin(pattern: &LinType, target: &LinType) -> Option<TypeSubst> {
    let mut map = BTreeMap::new();
    fn go(p: &LinType, t: &LinType, map: &mut BTreeMap<String, LinType>) -> bool {
        match (p, t) {
            (LinType::Var(v), _) => match map.get(v) {
                Some(bound) => bound == t,
                None => {
                    map.insert(v.clone(), t.clone());
                    true
                }
            },
            (LinType::Lolli(p1, p2), LinType::Lolli(t1, t2)) => {
                go(p1, t1, map) && go(p2, t2, map)
            }
            _ => false,
        }
    }
    if go(pattern, target, &mut map) {
        Some(TypeSubst::from_map(map))
    } else {
        None
    }
}

/// Matching extended to a list of pattern/target pairs sharing bindings.
pub fn match_all(pairs: &[(LinType, LinType)]) -> Option<TypeSubst> {
    let mut subst = TypeSubst::new();
    let mut map = BTreeMap::new();
    for (p, t) in pairs {
        let s = match_lin(&subst_free(p, &subst), t)?;
        for (v, ty) in s.iter() {
            match map.get(v) {
                Some(old) if old != ty => return None,
                _ => {
                    map.insert(v.clone(), ty.clone());
                }
            }
        }
        subst = TypeSubst::from_map(map.clone());
    }
    Some(subst)
}

fn subst_free(t: &LinType, s: &TypeSubst) -> LinType {
    s.apply_lin(t)
}

fn match_lin_into(
    pattern: &LinType,
    target: &LinType,
    map: &mut BTreeMap<String, LinType>,
) -> bool {
    match (pattern, target) {
        (LinType::Var(v), _) => match map.get(v) {
            Some(bound) => bound == target,
            None => {
                map.insert(v.clone(), target.clone());
                true
            }
        },
        (LinType::Lolli(p1, p2), LinType::Lolli(t1, t2)) => {
            match_lin_into(p1, t1, map) && match_lin_into(p2, t2, map)
        }
        _ => false,
    }
}

fn match_rank2_into(
    pattern: &Rank2Type,
    target: &Rank2Type,
    map: &mut BTreeMap<String, LinType>,
) -> bool {
    match (pattern, target) {
        (Rank2Type::Lin(p), Rank2Type::Lin(t)) => match_lin_into(p, t, map),
        (Rank2Type::Lolli(pl, pr), Rank2Type::Lolli(tl, tr)) => {
            match_lin_into(pl, tl, map) && match_rank2_into(pr, tr, map)
        }
        (Rank2Type::Arrow(ps, pr), Rank2Type::Arrow(ts, tr)) => {
            ps.len() == ts.len()
                && ps
                    .items()
                    .iter()
                    .zip(ts.items())
                    .all(|(p, t)| match_lin_into(p, t, map))
                && match_rank2_into(pr, tr, map)
        }
        _ => false,
    }
}

/// Matches the items of a pattern sequence against some permutation of
/// the target's, since intersections are judged up to reordering.
fn match_seq_into(
    pattern: &[LinType],
    target: &[LinType],
    used: &mut Vec<bool>,
    map: &mut BTreeMap<String, LinType>,
) -> bool {
    let Some((first, rest)) = pattern.split_first() else {
        return true;
    };
    for i in 0..target.len() {
        if used[i] {
            continue;
        }
        let saved = map.clone();
        used[i] = true;
        if match_lin_into(first, &target[i], map)
            && match_seq_into(rest, target, used, map)
        {
            return true;
        }
        used[i] = false;
        *map = saved;
    }
    false
}

/// One-sided unification of rank-2 types.
pub fn match_rank2(pattern: &Rank2Type, target: &Rank2Type) -> Option<TypeSubst> {
    let mut map = BTreeMap::new();
    if match_rank2_into(pattern, target, &mut map) {
        Some(TypeSubst::from_map(map))
    } else {
        None
    }
}

/// Finds a substitution instantiating the pattern judgment to the target:
/// the types must match exactly and the environments up to reordering of
/// declarations and of the items inside each declared sequence.
pub fn match_judgment(
    pattern: (&TypeEnv, &Rank2Type),
    target: (&TypeEnv, &Rank2Type),
) -> Option<TypeSubst> {
    let (penv, pty) = pattern;
    let (tenv, tty) = target;
    if penv.decls.len() != tenv.decls.len() {
        return None;
    }
    let mut map = BTreeMap::new();
    if !match_rank2_into(pty, tty, &mut map) {
        return None;
    }
    for (x, pseq) in &penv.decls {
        let tseq = tenv.lookup(x)?;
        if pseq.len() != tseq.len() {
            return None;
        }
        let mut used = vec![false; tseq.len()];
        if !match_seq_into(pseq.items(), tseq.items(), &mut used, &mut map) {
            return None;
        }
    }
    Some(TypeSubst::from_map(map))
}

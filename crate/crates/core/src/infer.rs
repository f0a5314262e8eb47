//! Type inference for the linear rank-2 system, in plain and quantitative
//! (step-counting) variants.

use std::fmt;

use thiserror::Error;

use crate::syntax::Term;
use crate::types::{LinType, Rank2Type, Seq, TypeEnv, TypeSubst};
use crate::unify::{unify_q, UnifProblem, UnifyError, UnifyOutcome};

/// Generator of fresh type variables `a0, a1, ...` for one inference run.
#[derive(Debug, Default)]
pub struct TyVarGen {
    next: u64,
}

impl TyVarGen {
    pub fn new() -> TyVarGen {
        TyVarGen::default()
    }

    pub fn fresh(&mut self) -> LinType {
        let t = LinType::var(format!("a{}", self.next));
        self.next += 1;
        t
    }
}

/// Position of a subterm, recorded in failures for diagnostics.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TermPath(pub Vec<PathStep>);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathStep {
    Fun,
    Arg,
    Body,
}

impl TermPath {
    pub(crate) fn child(&self, step: PathStep) -> TermPath {
        let mut steps = self.0.clone();
        steps.push(step);
        TermPath(steps)
    }
}

impl fmt::Display for TermPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "root");
        }
        for (i, s) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ".")?;
            }
            match s {
                PathStep::Fun => write!(f, "fun")?,
                PathStep::Arg => write!(f, "arg")?,
                PathStep::Body => write!(f, "body")?,
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InferError {
    #[error("binder {binder} does not occur in its body (at {path})")]
    NotLambdaI { binder: String, path: TermPath },
    #[error("no inference rule applies (at {path})")]
    NoRule { path: TermPath },
    #[error("unification failed at {path}: {source}")]
    Unification {
        path: TermPath,
        #[source]
        source: UnifyError,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InferResult {
    pub env: TypeEnv,
    pub ty: Rank2Type,
    /// Quantitative index; always 0 for the plain algorithm.
    pub steps: u64,
}

impl fmt::Display for InferResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} : {}", self.env, self.ty)
    }
}

/// Infers the environment and linear rank-2 type of `term`, or fails on
/// terms the system does not type.
pub fn infer(term: &Term) -> Result<InferResult, InferError> {
    let mut gen = TyVarGen::new();
    let (env, ty, _) = engine(term, &TermPath::default(), &mut gen)?;
    let (env, ty) = canonicalize(&env, &ty);
    Ok(InferResult { env, ty, steps: 0 })
}

/// Same type and environment as [`infer`], plus the quantitative index.
pub fn infer_q(term: &Term) -> Result<InferResult, InferError> {
    let mut gen = TyVarGen::new();
    let (env, ty, steps) = engine(term, &TermPath::default(), &mut gen)?;
    let (env, ty) = canonicalize(&env, &ty);
    Ok(InferResult { env, ty, steps })
}

/// The shared inference engine. The plain algorithm is the quantitative
/// one with the index ignored.
fn engine(
    term: &Term,
    path: &TermPath,
    gen: &mut TyVarGen,
) -> Result<(TypeEnv, Rank2Type, u64), InferError> {
    match term {
        Term::Var(x) => {
            let alpha = gen.fresh();
            let env = TypeEnv::from_decls(vec![(x.clone(), Seq::singleton(alpha.clone()))]);
            Ok((env, Rank2Type::Lin(alpha), 0))
        }
        Term::Abs(x, body) => {
            let (env, ty, steps) = engine(body, &path.child(PathStep::Body), gen)?;
            match env.lookup(x) {
                None => Err(InferError::NotLambdaI {
                    binder: x.clone(),
                    path: path.clone(),
                }),
                Some(seq) if seq.len() == 1 => {
                    let tau = seq.items()[0].clone();
                    Ok((env.remove(x), Rank2Type::lolli(tau, ty), steps))
                }
                Some(seq) => {
                    let seq = seq.clone();
                    Ok((env.remove(x), Rank2Type::arrow(seq, ty), steps))
                }
            }
        }
        Term::App(fun, arg) => {
            let (env1, ty1, b1) = engine(fun, &path.child(PathStep::Fun), gen)?;
            match ty1 {
                // head is a type variable
                Rank2Type::Lin(LinType::Var(alpha1)) => {
                    let (env2, ty2, b2) = engine(arg, &path.child(PathStep::Arg), gen)?;
                    let tau2 = match ty2.as_lin() {
                        Some(t) => t.clone(),
                        None => return Err(InferError::NoRule { path: path.clone() }),
                    };
                    let alpha2 = gen.fresh();
                    let alpha3 = gen.fresh();
                    let problem = UnifProblem::new(vec![
                        (
                            LinType::var(alpha1),
                            LinType::lolli(alpha2.clone(), alpha3.clone()),
                        ),
                        (tau2, alpha2),
                    ]);
                    let subst = solve(problem, path)?.0;
                    Ok((
                        subst.apply_env(&env1.sum(&env2)),
                        Rank2Type::Lin(subst.apply_lin(&alpha3)),
                        b1 + b2,
                    ))
                }
                // head takes a sequence of n >= 2 copies of the argument
                Rank2Type::Arrow(seq, sigma) => {
                    let (env2, ty2, b2) = engine(arg, &path.child(PathStep::Arg), gen)?;
                    if ty2.as_lin().is_none() {
                        return Err(InferError::NoRule { path: path.clone() });
                    }
                    let base = InferResult {
                        env: env2,
                        ty: ty2,
                        steps: b2,
                    };
                    let instances: Vec<InferResult> = (0..seq.len())
                        .map(|_| fresh_instantiate(&base, gen))
                        .collect();
                    let equations = instances
                        .iter()
                        .zip(seq.items())
                        .map(|(inst, expected)| {
                            (inst.ty.as_lin().unwrap().clone(), expected.clone())
                        })
                        .collect();
                    let (subst, b3) = solve(UnifProblem::new(equations), path)?;
                    let mut env = env1;
                    let mut arg_steps = 0;
                    for inst in &instances {
                        env = env.sum(&inst.env);
                        arg_steps += inst.steps;
                    }
                    Ok((
                        subst.apply_env(&env),
                        subst.apply_rank2(&sigma),
                        b1 + arg_steps + b3 + 1,
                    ))
                }
                // head is a linear arrow
                ref head => match head.split_lolli() {
                    Some((tau, sigma)) => {
                        let (env2, ty2, b2) = engine(arg, &path.child(PathStep::Arg), gen)?;
                        let tau2 = match ty2.as_lin() {
                            Some(t) => t.clone(),
                            None => return Err(InferError::NoRule { path: path.clone() }),
                        };
                        let problem = UnifProblem::new(vec![(tau2, tau)]);
                        let (subst, b3) = solve(problem, path)?;
                        Ok((
                            subst.apply_env(&env1.sum(&env2)),
                            subst.apply_rank2(&sigma),
                            b1 + b2 + b3 + 1,
                        ))
                    }
                    None => Err(InferError::NoRule { path: path.clone() }),
                },
            }
        }
    }
}

fn solve(problem: UnifProblem, path: &TermPath) -> Result<(TypeSubst, u64), InferError> {
    match unify_q(&problem) {
        (UnifyOutcome::Solved(s), b) => Ok((s, b)),
        (UnifyOutcome::Failed(e), _) => Err(InferError::Unification {
            path: path.clone(),
            source: e,
        }),
    }
}

/// Renames every type variable in the result to a globally fresh one.
pub fn fresh_instantiate(r: &InferResult, gen: &mut TyVarGen) -> InferResult {
    let mut vars = Vec::new();
    for (_, seq) in &r.env.decls {
        for item in seq.items() {
            for v in item.vars() {
                if !vars.contains(&v) {
                    vars.push(v);
                }
            }
        }
    }
    for v in r.ty.vars() {
        if !vars.contains(&v) {
            vars.push(v);
        }
    }
    let mut renaming = std::collections::BTreeMap::new();
    for v in vars {
        renaming.insert(v, gen.fresh());
    }
    let subst = TypeSubst::from_map(renaming);
    InferResult {
        env: subst.apply_env(&r.env),
        ty: subst.apply_rank2(&r.ty),
        steps: r.steps,
    }
}

/// Renames type variables to `a0, a1, ...` in order of first occurrence
/// across the environment and then the type.
pub fn canonicalize(env: &TypeEnv, ty: &Rank2Type) -> (TypeEnv, Rank2Type) {
    let mut vars = Vec::new();
    for (_, seq) in &env.decls {
        for item in seq.items() {
            for v in item.vars() {
                if !vars.contains(&v) {
                    vars.push(v);
                }
            }
        }
    }
    for v in ty.vars() {
        if !vars.contains(&v) {
            vars.push(v);
        }
    }
    let renaming: std::collections::BTreeMap<String, LinType> = vars
        .into_iter()
        .enumerate()
        .map(|(i, v)| (v, LinType::var(format!("a{i}"))))
        .collect();
    let subst = TypeSubst::from_map(renaming);
    (subst.apply_env(env), subst.apply_rank2(ty))
}

//! Explicit typing-derivation trees for the plain and quantitative rank-2
//! systems, with rule-by-rule checkers, a constructive builder from
//! inference results, a bounded derivation enumerator and JSON
//! serialization for fixtures.

mod build;
mod enumerate;
mod json;

pub use build::build_from_inference;
pub use enumerate::enumerate_derivations;
pub use json::{from_json, to_json, to_json_value, JsonError};

use std::fmt;

use crate::syntax::{alpha_eq, Term, TermSubst};
use crate::types::{MRank2, MSeq, MultiType, Rank2Type, Seq, TypeEnv};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rule {
    Axiom,
    Exchange,
    Contraction,
    LolliIntro,
    ArrowIntro,
    LolliElim,
    ArrowElim,
    LolliIntroT,
    ArrowIntroT,
    LolliElimT,
    ArrowElimT,
}

impl Rule {
    pub fn name(&self) -> &'static str {
        match self {
            Rule::Axiom => "Axiom",
            Rule::Exchange => "Exchange",
            Rule::Contraction => "Contraction",
            Rule::LolliIntro => "LolliIntro",
            Rule::ArrowIntro => "ArrowIntro",
            Rule::LolliElim => "LolliElim",
            Rule::ArrowElim => "ArrowElim",
            Rule::LolliIntroT => "LolliIntroT",
            Rule::ArrowIntroT => "ArrowIntroT",
            Rule::LolliElimT => "LolliElimT",
            Rule::ArrowElimT => "ArrowElimT",
        }
    }

    pub fn from_name(name: &str) -> Option<Rule> {
        Some(match name {
            "Axiom" => Rule::Axiom,
            "Exchange" => Rule::Exchange,
            "Contraction" => Rule::Contraction,
            "LolliIntro" => Rule::LolliIntro,
            "ArrowIntro" => Rule::ArrowIntro,
            "LolliElim" => Rule::LolliElim,
            "ArrowElim" => Rule::ArrowElim,
            "LolliIntroT" => Rule::LolliIntroT,
            "ArrowIntroT" => Rule::ArrowIntroT,
            "LolliElimT" => Rule::LolliElimT,
            "ArrowElimT" => Rule::ArrowElimT,
            _ => return None,
        })
    }

    fn is_quantitative_only(&self) -> bool {
        matches!(
            self,
            Rule::LolliIntroT | Rule::ArrowIntroT | Rule::LolliElimT | Rule::ArrowElimT
        )
    }
}

/// One environment entry; the multi-sequence is present exactly in
/// quantitative derivations and has the same length as the type sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decl {
    pub var: String,
    pub types: Seq,
    pub multi: Option<MSeq>,
}

impl Decl {
    pub fn plain(var: impl Into<String>, types: Seq) -> Decl {
        Decl {
            var: var.into(),
            types,
            multi: None,
        }
    }

    pub fn quant(var: impl Into<String>, types: Seq, multi: MSeq) -> Decl {
        Decl {
            var: var.into(),
            types,
            multi: Some(multi),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Judgment {
    pub env: Vec<Decl>,
    pub term: Term,
    pub ty: Rank2Type,
    pub multi: Option<MRank2>,
    pub index: Option<u64>,
}

impl Judgment {
    pub fn type_env(&self) -> TypeEnv {
        TypeEnv::from_decls(
            self.env
                .iter()
                .map(|d| (d.var.clone(), d.types.clone()))
                .collect(),
        )
    }
}

impl fmt::Display for Judgment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, d) in self.env.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            match &d.multi {
                Some(m) => write!(f, "{}: ({}, {})", d.var, d.types, m)?,
                None => write!(f, "{}: {}", d.var, d.types)?,
            }
        }
        write!(f, "]")?;
        match self.index {
            Some(b) => write!(f, " |-({b}) ")?,
            None => write!(f, " |- ")?,
        }
        write!(f, "{} : {}", self.term, self.ty)?;
        if let Some(m) = &self.multi {
            write!(f, " | {m}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Derivation {
    pub rule: Rule,
    pub premises: Vec<Derivation>,
    pub conclusion: Judgment,
}

impl Derivation {
    pub fn leaf(rule: Rule, conclusion: Judgment) -> Derivation {
        Derivation {
            rule,
            premises: Vec::new(),
            conclusion,
        }
    }

    pub fn node(rule: Rule, premises: Vec<Derivation>, conclusion: Judgment) -> Derivation {
        Derivation {
            rule,
            premises,
            conclusion,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ViolationKind {
    PremiseCount { expected: &'static str, found: usize },
    RuleNotInSystem,
    MalformedJudgment(String),
    EnvMismatch(String),
    TermMismatch(String),
    TypeMismatch(String),
    MultiMismatch(String),
    IndexMismatch { expected: u64, found: u64 },
    SideCondition(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleViolation {
    /// Premise indices from the root to the offending node.
    pub path: Vec<usize>,
    pub kind: ViolationKind,
}

impl fmt::Display for RuleViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "at ")?;
        if self.path.is_empty() {
            write!(f, "root")?;
        } else {
            for (i, p) in self.path.iter().enumerate() {
                if i > 0 {
                    write!(f, ".")?;
                }
                write!(f, "{p}")?;
            }
        }
        write!(f, ": ")?;
        match &self.kind {
            ViolationKind::PremiseCount { expected, found } => {
                write!(f, "expected {expected} premises, found {found}")
            }
            ViolationKind::RuleNotInSystem => write!(f, "rule does not belong to this system"),
            ViolationKind::MalformedJudgment(m) => write!(f, "malformed judgment: {m}"),
            ViolationKind::EnvMismatch(m) => write!(f, "environment mismatch: {m}"),
            ViolationKind::TermMismatch(m) => write!(f, "term mismatch: {m}"),
            ViolationKind::TypeMismatch(m) => write!(f, "type mismatch: {m}"),
            ViolationKind::MultiMismatch(m) => write!(f, "multi-type mismatch: {m}"),
            ViolationKind::IndexMismatch { expected, found } => {
                write!(f, "index mismatch: expected {expected}, found {found}")
            }
            ViolationKind::SideCondition(m) => write!(f, "side condition failed: {m}"),
        }
    }
}

impl std::error::Error for RuleViolation {}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Mode {
    Plain,
    Quant,
}

/// Validates a plain-system derivation and returns its root judgment.
pub fn check(d: &Derivation) -> Result<Judgment, RuleViolation> {
    check_node(d, &mut Vec::new(), Mode::Plain)?;
    Ok(d.conclusion.clone())
}

/// Validates a quantitative derivation (types, multi-types and index
/// arithmetic) and returns its root judgment.
pub fn check_q(d: &Derivation) -> Result<Judgment, RuleViolation> {
    check_node(d, &mut Vec::new(), Mode::Quant)?;
    Ok(d.conclusion.clone())
}

/// True iff the root multi-type is a tight constant and every
/// multi-sequence in the root environment is all-tight.
pub fn is_tight(d: &Derivation) -> bool {
    let c = &d.conclusion;
    let root_tight = matches!(&c.multi, Some(m) if m.is_tight());
    root_tight
        && c.env
            .iter()
            .all(|decl| matches!(&decl.multi, Some(m) if m.is_tight()))
}

fn violation<T>(path: &[usize], kind: ViolationKind) -> Result<T, RuleViolation> {
    Err(RuleViolation {
        path: path.to_vec(),
        kind,
    })
}

fn denv_consistent(env: &[Decl]) -> bool {
    for (i, d) in env.iter().enumerate() {
        if env[i + 1..].iter().any(|e| e.var == d.var) {
            return false;
        }
    }
    true
}

fn decl_merge(a: &Decl, b: &Decl, var: String) -> Decl {
    let multi = match (&a.multi, &b.multi) {
        (Some(x), Some(y)) => Some(x.concat(y)),
        _ => None,
    };
    Decl {
        var,
        types: a.types.concat(&b.types),
        multi,
    }
}

/// Pointwise union with the left environment's order first.
fn denv_sum(a: &[Decl], b: &[Decl]) -> Vec<Decl> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    for d in a {
        match b.iter().find(|e| e.var == d.var) {
            Some(e) => out.push(decl_merge(d, e, d.var.clone())),
            None => out.push(d.clone()),
        }
    }
    for e in b {
        if !a.iter().any(|d| d.var == e.var) {
            out.push(e.clone());
        }
    }
    out
}

fn well_formed(j: &Judgment, mode: Mode, path: &[usize]) -> Result<(), RuleViolation> {
    if !denv_consistent(&j.env) {
        return violation(
            path,
            ViolationKind::MalformedJudgment("environment has duplicate variables".into()),
        );
    }
    match mode {
        Mode::Plain => {
            if j.multi.is_some() || j.index.is_some() || j.env.iter().any(|d| d.multi.is_some()) {
                return violation(
                    path,
                    ViolationKind::MalformedJudgment(
                        "plain judgments carry no multi-type or index".into(),
                    ),
                );
            }
        }
        Mode::Quant => {
            if j.multi.is_none() || j.index.is_none() {
                return violation(
                    path,
                    ViolationKind::MalformedJudgment(
                        "quantitative judgments need a multi-type and an index".into(),
                    ),
                );
            }
            for d in &j.env {
                match &d.multi {
                    None => {
                        return violation(
                            path,
                            ViolationKind::MalformedJudgment(format!(
                                "declaration of {} lacks a multi-sequence",
                                d.var
                            )),
                        )
                    }
                    Some(m) if m.len() != d.types.len() => {
                        return violation(
                            path,
                            ViolationKind::MalformedJudgment(format!(
                                "declaration of {} pairs {} types with {} multi-types",
                                d.var,
                                d.types.len(),
                                m.len()
                            )),
                        )
                    }
                    _ => {}
                }
            }
        }
    }
    Ok(())
}

fn expect_premises(
    d: &Derivation,
    expected: &'static str,
    ok: bool,
    path: &[usize],
) -> Result<(), RuleViolation> {
    if ok {
        Ok(())
    } else {
        violation(
            path,
            ViolationKind::PremiseCount {
                expected,
                found: d.premises.len(),
            },
        )
    }
}

fn check_node(d: &Derivation, path: &mut Vec<usize>, mode: Mode) -> Result<(), RuleViolation> {
    if mode == Mode::Plain && d.rule.is_quantitative_only() {
        return violation(path, ViolationKind::RuleNotInSystem);
    }
    well_formed(&d.conclusion, mode, path)?;
    for (i, p) in d.premises.iter().enumerate() {
        path.push(i);
        check_node(p, path, mode)?;
        path.pop();
    }
    let c = &d.conclusion;
    match d.rule {
        Rule::Axiom => {
            expect_premises(d, "0", d.premises.is_empty(), path)?;
            if c.env.len() != 1 {
                return violation(
                    path,
                    ViolationKind::EnvMismatch("axiom environment must be a single declaration".into()),
                );
            }
            let decl = &c.env[0];
            if decl.types.len() != 1 {
                return violation(
                    path,
                    ViolationKind::SideCondition(
                        "axiom declares a single linear type".into(),
                    ),
                );
            }
            if c.term != Term::Var(decl.var.clone()) {
                return violation(
                    path,
                    ViolationKind::TermMismatch("axiom subject must be the declared variable".into()),
                );
            }
            if c.ty != Rank2Type::Lin(decl.types.items()[0].clone()) {
                return violation(
                    path,
                    ViolationKind::TypeMismatch("axiom type must equal the declared type".into()),
                );
            }
            if mode == Mode::Quant {
                let t = decl.multi.as_ref().unwrap().items()[0].clone();
                if c.multi != Some(MRank2::M(t)) {
                    return violation(
                        path,
                        ViolationKind::MultiMismatch(
                            "axiom multi-type must equal the declared one".into(),
                        ),
                    );
                }
                if c.index != Some(0) {
                    return violation(
                        path,
                        ViolationKind::IndexMismatch {
                            expected: 0,
                            found: c.index.unwrap(),
                        },
                    );
                }
            }
            Ok(())
        }
        Rule::Exchange => {
            expect_premises(d, "1", d.premises.len() == 1, path)?;
            let p = &d.premises[0].conclusion;
            check_untouched(c, p, path)?;
            if p.env.len() != c.env.len() || p.env.len() < 2 {
                return violation(
                    path,
                    ViolationKind::EnvMismatch("exchange swaps two adjacent declarations".into()),
                );
            }
            let swapped = (0..p.env.len() - 1).any(|i| {
                let mut e = p.env.clone();
                e.swap(i, i + 1);
                e == c.env && p.env[i] != p.env[i + 1]
            });
            if !swapped {
                return violation(
                    path,
                    ViolationKind::EnvMismatch(
                        "conclusion is not an adjacent swap of the premise environment".into(),
                    ),
                );
            }
            Ok(())
        }
        Rule::Contraction => {
            expect_premises(d, "1", d.premises.len() == 1, path)?;
            let p = &d.premises[0].conclusion;
            if p.env.len() != c.env.len() + 1 {
                return violation(
                    path,
                    ViolationKind::EnvMismatch(
                        "contraction merges two declarations into one".into(),
                    ),
                );
            }
            if c.ty != p.ty || c.multi != p.multi || c.index != p.index {
                return violation(
                    path,
                    ViolationKind::TypeMismatch(
                        "contraction preserves type, multi-type and index".into(),
                    ),
                );
            }
            let found = (0..c.env.len()).any(|i| {
                if p.env[..i] != c.env[..i] || p.env[i + 2..] != c.env[i + 1..] {
                    return false;
                }
                let merged = decl_merge(&p.env[i], &p.env[i + 1], c.env[i].var.clone());
                if merged != c.env[i] {
                    return false;
                }
                let subst = TermSubst(vec![
                    (Term::var(c.env[i].var.clone()), p.env[i].var.clone()),
                    (Term::var(c.env[i].var.clone()), p.env[i + 1].var.clone()),
                ]);
                alpha_eq(&c.term, &subst.apply(&p.term))
            });
            if !found {
                return violation(
                    path,
                    ViolationKind::EnvMismatch(
                        "no adjacent pair contracts to the conclusion".into(),
                    ),
                );
            }
            Ok(())
        }
        Rule::LolliIntro | Rule::ArrowIntro | Rule::LolliIntroT | Rule::ArrowIntroT => {
            expect_premises(d, "1", d.premises.len() == 1, path)?;
            check_intro(d, path, mode)
        }
        Rule::LolliElim | Rule::LolliElimT => {
            expect_premises(d, "2", d.premises.len() == 2, path)?;
            check_lolli_elim(d, path, mode)
        }
        Rule::ArrowElim | Rule::ArrowElimT => {
            expect_premises(d, "1 + n (n >= 2)", d.premises.len() >= 3, path)?;
            check_arrow_elim(d, path, mode)
        }
    }
}

/// Exchange leaves everything but the environment unchanged.
fn check_untouched(c: &Judgment, p: &Judgment, path: &[usize]) -> Result<(), RuleViolation> {
    if !alpha_eq(&c.term, &p.term) {
        return violation(path, ViolationKind::TermMismatch("subject changed".into()));
    }
    if c.ty != p.ty {
        return violation(path, ViolationKind::TypeMismatch("type changed".into()));
    }
    if c.multi != p.multi {
        return violation(path, ViolationKind::MultiMismatch("multi-type changed".into()));
    }
    if c.index != p.index {
        return violation(
            path,
            ViolationKind::IndexMismatch {
                expected: p.index.unwrap_or(0),
                found: c.index.unwrap_or(0),
            },
        );
    }
    Ok(())
}

fn check_intro(d: &Derivation, path: &[usize], mode: Mode) -> Result<(), RuleViolation> {
    let c = &d.conclusion;
    let p = &d.premises[0].conclusion;
    let Some(decl) = p.env.last() else {
        return violation(
            path,
            ViolationKind::EnvMismatch("premise environment must end with the binder".into()),
        );
    };
    if c.env != p.env[..p.env.len() - 1] {
        return violation(
            path,
            ViolationKind::EnvMismatch(
                "conclusion environment must be the premise without its last declaration".into(),
            ),
        );
    }
    if !alpha_eq(&c.term, &Term::abs(decl.var.clone(), p.term.clone())) {
        return violation(
            path,
            ViolationKind::TermMismatch("subject must abstract the last declaration".into()),
        );
    }
    let is_arrow = matches!(d.rule, Rule::ArrowIntro | Rule::ArrowIntroT);
    if is_arrow {
        if decl.types.len() < 2 {
            return violation(
                path,
                ViolationKind::SideCondition("the arrow introduction needs n >= 2".into()),
            );
        }
        if c.ty != Rank2Type::arrow(decl.types.clone(), p.ty.clone()) {
            return violation(
                path,
                ViolationKind::TypeMismatch("conclusion type must be the sequence arrow".into()),
            );
        }
    } else {
        if decl.types.len() != 1 {
            return violation(
                path,
                ViolationKind::SideCondition(
                    "the linear introduction takes a single type".into(),
                ),
            );
        }
        if c.ty != Rank2Type::lolli(decl.types.items()[0].clone(), p.ty.clone()) {
            return violation(
                path,
                ViolationKind::TypeMismatch("conclusion type must be the linear arrow".into()),
            );
        }
    }
    if mode == Mode::Plain {
        return Ok(());
    }
    let (pb, cb) = (p.index.unwrap(), c.index.unwrap());
    let pm = p.multi.as_ref().unwrap();
    let cm = c.multi.as_ref().unwrap();
    let dm = decl.multi.as_ref().unwrap();
    match d.rule {
        Rule::LolliIntro => {
            let Some(ps) = pm.as_rank0() else {
                return violation(
                    path,
                    ViolationKind::MultiMismatch(
                        "t -o s needs a rank-0 premise multi-type".into(),
                    ),
                );
            };
            let want = MRank2::M(MultiType::lolli(dm.items()[0].clone(), ps.clone()));
            if *cm != want {
                return violation(
                    path,
                    ViolationKind::MultiMismatch(format!("expected {want}, found {cm}")),
                );
            }
            if cb != pb + 1 {
                return violation(
                    path,
                    ViolationKind::IndexMismatch {
                        expected: pb + 1,
                        found: cb,
                    },
                );
            }
        }
        Rule::ArrowIntro => {
            let want = MRank2::arrow(dm.clone(), pm.clone());
            if *cm != want {
                return violation(
                    path,
                    ViolationKind::MultiMismatch(format!("expected {want}, found {cm}")),
                );
            }
            if cb != pb + 1 {
                return violation(
                    path,
                    ViolationKind::IndexMismatch {
                        expected: pb + 1,
                        found: cb,
                    },
                );
            }
        }
        Rule::LolliIntroT | Rule::ArrowIntroT => {
            if !dm.is_tight() {
                return violation(
                    path,
                    ViolationKind::SideCondition(
                        "the binder's multi-sequence must be tight".into(),
                    ),
                );
            }
            if !pm.is_tight() {
                return violation(
                    path,
                    ViolationKind::SideCondition("the premise multi-type must be tight".into()),
                );
            }
            if *cm != MRank2::M(MultiType::Abs) {
                return violation(
                    path,
                    ViolationKind::MultiMismatch("tight introductions conclude Abs".into()),
                );
            }
            if cb != pb {
                return violation(
                    path,
                    ViolationKind::IndexMismatch {
                        expected: pb,
                        found: cb,
                    },
                );
            }
        }
        _ => unreachable!(),
    }
    Ok(())
}

fn check_lolli_elim(d: &Derivation, path: &[usize], mode: Mode) -> Result<(), RuleViolation> {
    let c = &d.conclusion;
    let head = &d.premises[0].conclusion;
    let arg = &d.premises[1].conclusion;
    let Some((tau, sigma)) = head.ty.split_lolli() else {
        return violation(
            path,
            ViolationKind::TypeMismatch("the head must have a linear arrow type".into()),
        );
    };
    if arg.ty != Rank2Type::Lin(tau) {
        return violation(
            path,
            ViolationKind::TypeMismatch("the argument type must match the arrow domain".into()),
        );
    }
    if c.ty != sigma {
        return violation(
            path,
            ViolationKind::TypeMismatch("the conclusion type must be the arrow codomain".into()),
        );
    }
    let mut env = head.env.clone();
    env.extend(arg.env.iter().cloned());
    if !denv_consistent(&env) {
        return violation(
            path,
            ViolationKind::EnvMismatch("premise environments share variables".into()),
        );
    }
    if c.env != env {
        return violation(
            path,
            ViolationKind::EnvMismatch(
                "conclusion environment must append the premise environments".into(),
            ),
        );
    }
    if !alpha_eq(&c.term, &Term::app(head.term.clone(), arg.term.clone())) {
        return violation(
            path,
            ViolationKind::TermMismatch("subject must apply the premises".into()),
        );
    }
    if mode == Mode::Plain {
        return Ok(());
    }
    let want_index = head.index.unwrap() + arg.index.unwrap();
    if c.index != Some(want_index) {
        return violation(
            path,
            ViolationKind::IndexMismatch {
                expected: want_index,
                found: c.index.unwrap(),
            },
        );
    }
    let hm = head.multi.as_ref().unwrap();
    let am = arg.multi.as_ref().unwrap();
    let cm = c.multi.as_ref().unwrap();
    match d.rule {
        Rule::LolliElim => {
            let Some(MultiType::Lolli(t, s)) = hm.as_rank0() else {
                return violation(
                    path,
                    ViolationKind::MultiMismatch("the head multi-type must be t -o s".into()),
                );
            };
            if am.as_rank0() != Some(&**t) {
                return violation(
                    path,
                    ViolationKind::MultiMismatch(
                        "the argument multi-type must match the domain".into(),
                    ),
                );
            }
            if *cm != MRank2::M((**s).clone()) {
                return violation(
                    path,
                    ViolationKind::MultiMismatch(
                        "the conclusion multi-type must be the codomain".into(),
                    ),
                );
            }
        }
        Rule::LolliElimT => {
            if hm.as_rank0() != Some(&MultiType::Neutral) {
                return violation(
                    path,
                    ViolationKind::SideCondition("the head multi-type must be Neutral".into()),
                );
            }
            if !matches!(am.as_rank0(), Some(t) if t.is_tight()) {
                return violation(
                    path,
                    ViolationKind::SideCondition("the argument multi-type must be tight".into()),
                );
            }
            if *cm != MRank2::M(MultiType::Neutral) {
                return violation(
                    path,
                    ViolationKind::MultiMismatch("the conclusion must be Neutral".into()),
                );
            }
        }
        _ => unreachable!(),
    }
    Ok(())
}

fn check_arrow_elim(d: &Derivation, path: &[usize], mode: Mode) -> Result<(), RuleViolation> {
    let c = &d.conclusion;
    let head = &d.premises[0].conclusion;
    let args: Vec<&Judgment> = d.premises[1..].iter().map(|p| &p.conclusion).collect();
    let n = args.len();
    let Rank2Type::Arrow(seq, sigma) = &head.ty else {
        return violation(
            path,
            ViolationKind::TypeMismatch("the head must have a sequence arrow type".into()),
        );
    };
    if seq.len() != n {
        return violation(
            path,
            ViolationKind::SideCondition(format!(
                "the head takes {} arguments but {} premises were given",
                seq.len(),
                n
            )),
        );
    }
    for (i, arg) in args.iter().enumerate() {
        if arg.ty != Rank2Type::Lin(seq.items()[i].clone()) {
            return violation(
                path,
                ViolationKind::TypeMismatch(format!(
                    "argument premise {} must be typed with sequence item {}",
                    i + 1,
                    i + 1
                )),
            );
        }
        if !alpha_eq(&arg.term, &args[0].term) {
            return violation(
                path,
                ViolationKind::TermMismatch("all argument premises share one subject".into()),
            );
        }
    }
    if c.ty != **sigma {
        return violation(
            path,
            ViolationKind::TypeMismatch("the conclusion type must be the arrow codomain".into()),
        );
    }
    let mut summed = args[0].env.clone();
    for arg in &args[1..] {
        summed = denv_sum(&summed, &arg.env);
    }
    let mut env = head.env.clone();
    env.extend(summed);
    if !denv_consistent(&env) {
        return violation(
            path,
            ViolationKind::EnvMismatch(
                "the head environment shares variables with the argument sum".into(),
            ),
        );
    }
    if c.env != env {
        return violation(
            path,
            ViolationKind::EnvMismatch(
                "conclusion environment must append the head and the summed arguments".into(),
            ),
        );
    }
    if !alpha_eq(&c.term, &Term::app(head.term.clone(), args[0].term.clone())) {
        return violation(
            path,
            ViolationKind::TermMismatch("subject must apply the premises".into()),
        );
    }
    if mode == Mode::Plain {
        return Ok(());
    }
    let want_index =
        head.index.unwrap() + args.iter().map(|a| a.index.unwrap()).sum::<u64>();
    if c.index != Some(want_index) {
        return violation(
            path,
            ViolationKind::IndexMismatch {
                expected: want_index,
                found: c.index.unwrap(),
            },
        );
    }
    let hm = head.multi.as_ref().unwrap();
    let cm = c.multi.as_ref().unwrap();
    match d.rule {
        Rule::ArrowElim => {
            let MRank2::Arrow(mseq, ms) = hm else {
                return violation(
                    path,
                    ViolationKind::MultiMismatch(
                        "the head multi-type must be a sequence arrow".into(),
                    ),
                );
            };
            if mseq.len() != n {
                return violation(
                    path,
                    ViolationKind::MultiMismatch(
                        "the head multi-sequence length must match the arity".into(),
                    ),
                );
            }
            for (i, arg) in args.iter().enumerate() {
                if arg.multi.as_ref().unwrap().as_rank0() != Some(&mseq.items()[i]) {
                    return violation(
                        path,
                        ViolationKind::MultiMismatch(format!(
                            "argument premise {} must carry multi-sequence item {}",
                            i + 1,
                            i + 1
                        )),
                    );
                }
            }
            if *cm != **ms {
                return violation(
                    path,
                    ViolationKind::MultiMismatch(
                        "the conclusion multi-type must be the arrow codomain".into(),
                    ),
                );
            }
        }
        Rule::ArrowElimT => {
            if hm.as_rank0() != Some(&MultiType::Neutral) {
                return violation(
                    path,
                    ViolationKind::SideCondition("the head multi-type must be Neutral".into()),
                );
            }
            for arg in &args {
                if !matches!(arg.multi.as_ref().unwrap().as_rank0(), Some(t) if t.is_tight()) {
                    return violation(
                        path,
                        ViolationKind::SideCondition(
                            "argument multi-types must be tight".into(),
                        ),
                    );
                }
            }
            if *cm != MRank2::M(MultiType::Neutral) {
                return violation(
                    path,
                    ViolationKind::MultiMismatch("the conclusion must be Neutral".into()),
                );
            }
        }
        _ => unreachable!(),
    }
    Ok(())
}

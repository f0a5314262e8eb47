//! Type grammars (linear, rank-1 sequences, linear rank-2, tight
//! multi-types), rank classifiers, type substitutions and environments.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

/// Linear types: variables and the linear arrow only.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LinType {
    Var(String),
    Lolli(Box<LinType>, Box<LinType>),
}

impl LinType {
    pub fn var(name: impl Into<String>) -> LinType {
        LinType::Var(name.into())
    }

    pub fn lolli(left: LinType, right: LinType) -> LinType {
        LinType::Lolli(Box::new(left), Box::new(right))
    }

    pub fn depth(&self) -> usize {
        match self {
            LinType::Var(_) => 0,
            LinType::Lolli(l, r) => 1 + l.depth().max(r.depth()),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            LinType::Var(_) => 1,
            LinType::Lolli(l, r) => 1 + l.size() + r.size(),
        }
    }

    pub fn contains_var(&self, name: &str) -> bool {
        match self {
            LinType::Var(v) => v == name,
            LinType::Lolli(l, r) => l.contains_var(name) || r.contains_var(name),
        }
    }

    fn collect_vars(&self, acc: &mut Vec<String>) {
        match self {
            LinType::Var(v) => {
                if !acc.iter().any(|a| a == v) {
                    acc.push(v.clone());
                }
            }
            LinType::Lolli(l, r) => {
                l.collect_vars(acc);
                r.collect_vars(acc);
            }
        }
    }

    pub fn vars(&self) -> Vec<String> {
        let mut acc = Vec::new();
        self.collect_vars(&mut acc);
        acc
    }
}

/// A non-empty intersection of linear types. Stored in order; structural
/// equality is positional, `equiv` compares as multisets.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Seq(Vec<LinType>);

impl Seq {
    pub fn new(items: Vec<LinType>) -> Seq {
        assert!(!items.is_empty(), "sequences are non-empty");
        Seq(items)
    }

    pub fn singleton(item: LinType) -> Seq {
        Seq(vec![item])
    }

    pub fn items(&self) -> &[LinType] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn concat(&self, other: &Seq) -> Seq {
        let mut items = self.0.clone();
        items.extend(other.0.iter().cloned());
        Seq(items)
    }

    /// Multiset equality of the items.
    pub fn equiv(&self, other: &Seq) -> bool {
        if self.0.len() != other.0.len() {
            return false;
        }
        let mut a = self.0.clone();
        let mut b = other.0.clone();
        a.sort();
        b.sort();
        a == b
    }
}

/// Linear rank-2 intersection types.
///
/// A type that happens to be linear is always represented as `Lin`;
/// construct arrows through [`Rank2Type::lolli`] and [`Rank2Type::arrow`]
/// to keep that form canonical.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Rank2Type {
    Lin(LinType),
    Lolli(LinType, Box<Rank2Type>),
    Arrow(Seq, Box<Rank2Type>),
}

impl Rank2Type {
    pub fn lolli(left: LinType, right: Rank2Type) -> Rank2Type {
        match right {
            Rank2Type::Lin(r) => Rank2Type::Lin(LinType::lolli(left, r)),
            r => Rank2Type::Lolli(left, Box::new(r)),
        }
    }

    pub fn arrow(left: Seq, right: Rank2Type) -> Rank2Type {
        assert!(left.len() >= 2, "rank-2 arrows take sequences of length >= 2");
        Rank2Type::Arrow(left, Box::new(right))
    }

    /// Views the type as `τ ⊸ σ` when it has that shape, whether it is a
    /// linear arrow or a proper rank-2 one.
    pub fn split_lolli(&self) -> Option<(LinType, Rank2Type)> {
        match self {
            Rank2Type::Lin(LinType::Lolli(l, r)) => {
                Some(((**l).clone(), Rank2Type::Lin((**r).clone())))
            }
            Rank2Type::Lolli(l, r) => Some((l.clone(), (**r).clone())),
            _ => None,
        }
    }

    pub fn as_lin(&self) -> Option<&LinType> {
        match self {
            Rank2Type::Lin(t) => Some(t),
            _ => None,
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Rank2Type::Lin(t) => t.depth(),
            Rank2Type::Lolli(l, r) => 1 + l.depth().max(r.depth()),
            Rank2Type::Arrow(seq, r) => {
                let l = seq.items().iter().map(LinType::depth).max().unwrap_or(0);
                1 + l.max(r.depth())
            }
        }
    }

    fn collect_vars(&self, acc: &mut Vec<String>) {
        match self {
            Rank2Type::Lin(t) => t.collect_vars(acc),
            Rank2Type::Lolli(l, r) => {
                l.collect_vars(acc);
                r.collect_vars(acc);
            }
            Rank2Type::Arrow(seq, r) => {
                for item in seq.items() {
                    item.collect_vars(acc);
                }
                r.collect_vars(acc);
            }
        }
    }

    pub fn vars(&self) -> Vec<String> {
        let mut acc = Vec::new();
        self.collect_vars(&mut acc);
        acc
    }
}

/// General intersection-type AST used only by the two rank classifiers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GeneralType {
    Var(String),
    Arrow(Vec<GeneralType>, Box<GeneralType>),
    Lolli(Box<GeneralType>, Box<GeneralType>),
}

impl GeneralType {
    pub fn var(name: impl Into<String>) -> GeneralType {
        GeneralType::Var(name.into())
    }

    pub fn arrow(left: Vec<GeneralType>, right: GeneralType) -> GeneralType {
        GeneralType::Arrow(left, Box::new(right))
    }

    pub fn lolli(left: GeneralType, right: GeneralType) -> GeneralType {
        GeneralType::Lolli(Box::new(left), Box::new(right))
    }
}

impl From<&LinType> for GeneralType {
    fn from(t: &LinType) -> GeneralType {
        match t {
            LinType::Var(v) => GeneralType::Var(v.clone()),
            LinType::Lolli(l, r) => GeneralType::lolli((&**l).into(), (&**r).into()),
        }
    }
}

impl From<&Rank2Type> for GeneralType {
    fn from(t: &Rank2Type) -> GeneralType {
        match t {
            Rank2Type::Lin(t) => t.into(),
            Rank2Type::Lolli(l, r) => GeneralType::lolli(l.into(), (&**r).into()),
            Rank2Type::Arrow(seq, r) => {
                GeneralType::arrow(seq.items().iter().map(Into::into).collect(), (&**r).into())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RankError {
    #[error("linear arrow is outside the classical intersection-type grammar")]
    LolliInClassical,
    #[error("one-element sequence arrows are not part of the linear grammar")]
    SingletonArrowInLinear,
    #[error("empty sequence on the left of an arrow")]
    EmptySequence,
}

/// Classical rank: simple types are rank 0 and each sequence on the left
/// of an arrow pushes the rank per the recursive definition. Rejects
/// types containing the linear arrow.
pub fn classical_rank(t: &GeneralType) -> Result<usize, RankError> {
    match t {
        GeneralType::Var(_) => Ok(0),
        GeneralType::Lolli(_, _) => Err(RankError::LolliInClassical),
        GeneralType::Arrow(left, right) => {
            if left.is_empty() {
                return Err(RankError::EmptySequence);
            }
            let mut lmax = 0;
            for item in left {
                lmax = lmax.max(classical_rank(item)?);
            }
            let r = classical_rank(right)?;
            if left.len() == 1 && lmax == 0 && r == 0 {
                Ok(0)
            } else if lmax == 0 {
                Ok(2.max(r))
            } else {
                Ok(r.max(lmax + 1))
            }
        }
    }
}

/// Linear rank: linear types are rank 0; arrows must carry sequences of
/// length at least two (a one-element sequence is the linear arrow case).
pub fn linear_rank(t: &GeneralType) -> Result<usize, RankError> {
    match t {
        GeneralType::Var(_) => Ok(0),
        GeneralType::Lolli(l, r) => {
            let ll = linear_rank(l)?;
            let rr = linear_rank(r)?;
            if ll == 0 && rr == 0 {
                Ok(0)
            } else if ll == 0 {
                Ok(2.max(rr))
            } else {
                Ok(rr.max(ll + 1))
            }
        }
        GeneralType::Arrow(left, right) => {
            if left.is_empty() {
                return Err(RankError::EmptySequence);
            }
            if left.len() == 1 {
                return Err(RankError::SingletonArrowInLinear);
            }
            let mut lmax = 0;
            for item in left {
                lmax = lmax.max(linear_rank(item)?);
            }
            let rr = linear_rank(right)?;
            if lmax == 0 {
                Ok(2.max(rr))
            } else {
                Ok(rr.max(lmax + 1))
            }
        }
    }
}

/// Rank 0/1/2 multi-types with the tight constants.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MultiType {
    Neutral,
    Abs,
    Var(String),
    Lolli(Box<MultiType>, Box<MultiType>),
}

impl MultiType {
    pub fn var(name: impl Into<String>) -> MultiType {
        MultiType::Var(name.into())
    }

    pub fn lolli(left: MultiType, right: MultiType) -> MultiType {
        MultiType::Lolli(Box::new(left), Box::new(right))
    }

    pub fn is_tight(&self) -> bool {
        matches!(self, MultiType::Neutral | MultiType::Abs)
    }
}

/// Non-empty sequence of rank-0 multi-types.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MSeq(Vec<MultiType>);

impl MSeq {
    pub fn new(items: Vec<MultiType>) -> MSeq {
        assert!(!items.is_empty(), "multi-type sequences are non-empty");
        MSeq(items)
    }

    pub fn singleton(item: MultiType) -> MSeq {
        MSeq(vec![item])
    }

    pub fn items(&self) -> &[MultiType] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn concat(&self, other: &MSeq) -> MSeq {
        let mut items = self.0.clone();
        items.extend(other.0.iter().cloned());
        MSeq(items)
    }

    pub fn is_tight(&self) -> bool {
        self.0.iter().all(MultiType::is_tight)
    }
}

/// Rank-2 multi-types.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum MRank2 {
    M(MultiType),
    Arrow(MSeq, Box<MRank2>),
}

impl MRank2 {
    pub fn arrow(left: MSeq, right: MRank2) -> MRank2 {
        MRank2::Arrow(left, Box::new(right))
    }

    pub fn as_rank0(&self) -> Option<&MultiType> {
        match self {
            MRank2::M(t) => Some(t),
            _ => None,
        }
    }

    pub fn is_tight(&self) -> bool {
        matches!(self, MRank2::M(t) if t.is_tight())
    }
}

/// A finite map from type variables to linear types, applied
/// simultaneously.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TypeSubst {
    map: BTreeMap<String, LinType>,
}

impl TypeSubst {
    pub fn new() -> TypeSubst {
        TypeSubst::default()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn get(&self, var: &str) -> Option<&LinType> {
        self.map.get(var)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &LinType)> {
        self.map.iter()
    }

    /// Adds a binding, resolving the right-hand side through the existing
    /// bindings and substituting it into them, so the map stays idempotent.
    /// Identity bindings are never stored.
    pub fn bind(&mut self, var: impl Into<String>, ty: LinType) {
        let var = var.into();
        let resolved = self.apply_lin(&ty);
        if resolved == LinType::Var(var.clone()) {
            return;
        }
        assert!(
            !resolved.contains_var(&var),
            "binding would not be idempotent: {var} occurs in {resolved}"
        );
        let single = TypeSubst {
            map: BTreeMap::from([(var.clone(), resolved.clone())]),
        };
        for rhs in self.map.values_mut() {
            *rhs = single.apply_lin(rhs);
        }
        self.map.insert(var, resolved);
    }

    /// Builds a substitution from a unification problem in solved form.
    pub(crate) fn from_solved(pairs: Vec<(String, LinType)>) -> TypeSubst {
        let map: BTreeMap<_, _> = pairs.into_iter().collect();
        debug_assert!(map.iter().all(|(v, t)| !t.contains_var(v)));
        TypeSubst { map }
    }

    /// Raw simultaneous map, for matching results whose bindings need not
    /// be idempotent.
    pub fn from_map(map: BTreeMap<String, LinType>) -> TypeSubst {
        let map = map
            .into_iter()
            .filter(|(v, t)| *t != LinType::Var(v.clone()))
            .collect();
        TypeSubst { map }
    }

    pub fn apply_lin(&self, t: &LinType) -> LinType {
        match t {
            LinType::Var(v) => self.map.get(v).cloned().unwrap_or_else(|| t.clone()),
            LinType::Lolli(l, r) => LinType::lolli(self.apply_lin(l), self.apply_lin(r)),
        }
    }

    pub fn apply_seq(&self, s: &Seq) -> Seq {
        Seq(s.0.iter().map(|t| self.apply_lin(t)).collect())
    }

    pub fn apply_rank2(&self, t: &Rank2Type) -> Rank2Type {
        match t {
            Rank2Type::Lin(t) => Rank2Type::Lin(self.apply_lin(t)),
            Rank2Type::Lolli(l, r) => {
                Rank2Type::lolli(self.apply_lin(l), self.apply_rank2(r))
            }
            Rank2Type::Arrow(seq, r) => {
                Rank2Type::Arrow(self.apply_seq(seq), Box::new(self.apply_rank2(r)))
            }
        }
    }

    pub fn apply_env(&self, env: &TypeEnv) -> TypeEnv {
        Env {
            decls: env
                .decls
                .iter()
                .map(|(x, seq)| (x.clone(), self.apply_seq(seq)))
                .collect(),
        }
    }

    /// Composition per the explicit construction: the result applied once
    /// has the same effect as applying `first`, then `second`.
    pub fn compose(second: &TypeSubst, first: &TypeSubst) -> TypeSubst {
        let mut map = BTreeMap::new();
        for (v, t) in &first.map {
            let t = second.apply_lin(t);
            if t != LinType::Var(v.clone()) {
                map.insert(v.clone(), t);
            }
        }
        for (v, t) in &second.map {
            if !first.map.contains_key(v) {
                map.insert(v.clone(), t.clone());
            }
        }
        TypeSubst { map }
    }
}

impl fmt::Display for TypeSubst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (v, t)) in self.map.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{t} / {v}")?;
        }
        write!(f, "}}")
    }
}

/// Declaration predicates that environments can carry.
pub trait Predicate: Clone + PartialEq {
    /// Pointwise union used by `+` on shared variables.
    fn merge(&self, other: &Self) -> Self;
    /// Equality up to reordering inside the predicate.
    fn equiv(&self, other: &Self) -> bool;
}

impl Predicate for Seq {
    fn merge(&self, other: &Seq) -> Seq {
        self.concat(other)
    }

    fn equiv(&self, other: &Seq) -> bool {
        Seq::equiv(self, other)
    }
}

impl Predicate for (Seq, MSeq) {
    fn merge(&self, other: &Self) -> Self {
        (self.0.concat(&other.0), self.1.concat(&other.1))
    }

    fn equiv(&self, other: &Self) -> bool {
        // the two sequences travel in lockstep, so compare paired items
        if self.0.len() != other.0.len() || self.1.len() != other.1.len() {
            return false;
        }
        let pair = |p: &Self| {
            let mut v: Vec<_> = p
                .0
                .items()
                .iter()
                .cloned()
                .zip(p.1.items().iter().cloned())
                .collect();
            v.sort();
            v
        };
        pair(self) == pair(other)
    }
}

/// An ordered, consistent list of declarations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Env<P> {
    pub decls: Vec<(String, P)>,
}

pub type TypeEnv = Env<Seq>;

impl<P: Predicate> Env<P> {
    pub fn empty() -> Env<P> {
        Env { decls: Vec::new() }
    }

    pub fn from_decls(decls: Vec<(String, P)>) -> Env<P> {
        let env = Env { decls };
        assert!(env.is_consistent(), "environment variables must be distinct");
        env
    }

    pub fn is_consistent(&self) -> bool {
        for (i, (x, _)) in self.decls.iter().enumerate() {
            if self.decls[i + 1..].iter().any(|(y, _)| y == x) {
                return false;
            }
        }
        true
    }

    pub fn lookup(&self, x: &str) -> Option<&P> {
        self.decls.iter().find(|(y, _)| y == x).map(|(_, p)| p)
    }

    pub fn domain(&self) -> Vec<&str> {
        self.decls.iter().map(|(x, _)| x.as_str()).collect()
    }

    /// Removal is a no-op when the variable is absent.
    pub fn remove(&self, x: &str) -> Env<P> {
        Env {
            decls: self
                .decls
                .iter()
                .filter(|(y, _)| y != x)
                .cloned()
                .collect(),
        }
    }

    /// Pointwise union: shared variables get merged predicates, ordering
    /// follows the left environment first, then new variables in the
    /// right one's order.
    pub fn sum(&self, other: &Env<P>) -> Env<P> {
        let mut decls = Vec::with_capacity(self.decls.len() + other.decls.len());
        for (x, p) in &self.decls {
            match other.lookup(x) {
                Some(q) => decls.push((x.clone(), p.merge(q))),
                None => decls.push((x.clone(), p.clone())),
            }
        }
        for (x, q) in &other.decls {
            if self.lookup(x).is_none() {
                decls.push((x.clone(), q.clone()));
            }
        }
        Env { decls }
    }

    /// Same declarations as multisets; predicates compared up to
    /// reordering of their items.
    pub fn equiv(&self, other: &Env<P>) -> bool {
        self.decls.len() == other.decls.len()
            && self.decls.iter().all(|(x, p)| {
                other.lookup(x).map(|q| p.equiv(q)).unwrap_or(false)
            })
    }
}

impl fmt::Display for TypeEnv {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, (x, seq)) in self.decls.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{x}: {seq}")?;
        }
        write!(f, "]")
    }
}

// --- printing -------------------------------------------------------------

impl fmt::Display for LinType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LinType::Var(v) => write!(f, "{v}"),
            LinType::Lolli(l, r) => {
                match **l {
                    LinType::Lolli(_, _) => write!(f, "({l}) -o {r}"),
                    _ => write!(f, "{l} -o {r}"),
                }
            }
        }
    }
}

impl fmt::Display for Seq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, t) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, " & ")?;
            }
            match t {
                LinType::Lolli(_, _) => write!(f, "({t})")?,
                _ => write!(f, "{t}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Display for Rank2Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rank2Type::Lin(t) => write!(f, "{t}"),
            Rank2Type::Lolli(l, r) => {
                match l {
                    LinType::Lolli(_, _) => write!(f, "({l}) -o {r}"),
                    _ => write!(f, "{l} -o {r}"),
                }
            }
            Rank2Type::Arrow(seq, r) => write!(f, "{seq} -> {r}"),
        }
    }
}

impl fmt::Display for MultiType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MultiType::Neutral => write!(f, "Neutral"),
            MultiType::Abs => write!(f, "Abs"),
            MultiType::Var(v) => write!(f, "{v}"),
            MultiType::Lolli(l, r) => {
                match **l {
                    MultiType::Lolli(_, _) => write!(f, "({l}) -o {r}"),
                    _ => write!(f, "{l} -o {r}"),
                }
            }
        }
    }
}

impl fmt::Display for MSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, t) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, " & ")?;
            }
            match t {
                MultiType::Lolli(_, _) => write!(f, "({t})")?,
                _ => write!(f, "{t}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Display for MRank2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MRank2::M(t) => write!(f, "{t}"),
            MRank2::Arrow(seq, r) => write!(f, "{seq} -> {r}"),
        }
    }
}

// --- parsing --------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("type parse error at byte {offset}: {message}")]
pub struct TypeParseError {
    pub offset: usize,
    pub message: String,
}

/// Surface syntax shared by all the type grammars: `&` binds tighter than
/// the arrows, arrows are right-associative.
#[derive(Debug, Clone)]
enum Surface {
    Atom(String),
    Lolli(Box<Surface>, Box<Surface>),
    Arrow(Vec<Surface>, Box<Surface>),
}

struct TyParser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> TyParser<'a> {
    fn err<T>(&self, message: impl Into<String>) -> Result<T, TypeParseError> {
        Err(TypeParseError {
            offset: self.pos,
            message: message.into(),
        })
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.src[self.pos..].chars().next() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn eat(&mut self, s: &str) -> bool {
        if self.src[self.pos..].starts_with(s) {
            self.pos += s.len();
            true
        } else {
            false
        }
    }

    fn ident(&mut self) -> Option<String> {
        let start = self.pos;
        match self.src[self.pos..].chars().next() {
            Some(c) if c.is_ascii_alphabetic() => self.pos += 1,
            _ => return None,
        }
        while let Some(c) = self.src[self.pos..].chars().next() {
            if c.is_ascii_alphanumeric() || c == '_' || c == '\'' {
                self.pos += 1;
            } else {
                break;
            }
        }
        Some(self.src[start..self.pos].to_string())
    }

    fn ty(&mut self) -> Result<Surface, TypeParseError> {
        let mut items = vec![self.atom()?];
        loop {
            self.skip_ws();
            if self.eat("&") {
                items.push(self.atom()?);
            } else {
                break;
            }
        }
        self.skip_ws();
        if self.eat("-o") {
            if items.len() != 1 {
                return self.err("a sequence cannot be on the left of -o");
            }
            let right = self.ty()?;
            Ok(Surface::Lolli(
                Box::new(items.pop().unwrap()),
                Box::new(right),
            ))
        } else if self.eat("->") {
            let right = self.ty()?;
            Ok(Surface::Arrow(items, Box::new(right)))
        } else if items.len() == 1 {
            Ok(items.pop().unwrap())
        } else {
            self.err("a sequence must be followed by ->")
        }
    }

    fn atom(&mut self) -> Result<Surface, TypeParseError> {
        self.skip_ws();
        if self.eat("(") {
            let t = self.ty()?;
            self.skip_ws();
            if !self.eat(")") {
                return self.err("expected ')'");
            }
            return Ok(t);
        }
        match self.ident() {
            Some(v) => Ok(Surface::Atom(v)),
            None => self.err("expected a type"),
        }
    }

    /// Sequence item: a linear-arrow chain without `&` or `->` at the top.
    fn lolli_item(&mut self) -> Result<Surface, TypeParseError> {
        let left = self.atom()?;
        self.skip_ws();
        if self.eat("-o") {
            let right = self.lolli_item()?;
            Ok(Surface::Lolli(Box::new(left), Box::new(right)))
        } else {
            Ok(left)
        }
    }
}

fn parse_surface(text: &str) -> Result<Surface, TypeParseError> {
    let mut p = TyParser { src: text, pos: 0 };
    let t = p.ty()?;
    p.skip_ws();
    if p.pos != text.len() {
        return p.err("unexpected trailing input");
    }
    Ok(t)
}

fn surface_to_lin(s: &Surface) -> Result<LinType, TypeParseError> {
    match s {
        Surface::Atom(v) => Ok(LinType::var(v.clone())),
        Surface::Lolli(l, r) => Ok(LinType::lolli(surface_to_lin(l)?, surface_to_lin(r)?)),
        Surface::Arrow(_, _) => Err(TypeParseError {
            offset: 0,
            message: "-> is not a linear type constructor".into(),
        }),
    }
}

fn surface_to_rank2(s: &Surface) -> Result<Rank2Type, TypeParseError> {
    match s {
        Surface::Atom(v) => Ok(Rank2Type::Lin(LinType::var(v.clone()))),
        Surface::Lolli(l, r) => {
            Ok(Rank2Type::lolli(surface_to_lin(l)?, surface_to_rank2(r)?))
        }
        Surface::Arrow(left, right) => {
            if left.len() < 2 {
                return Err(TypeParseError {
                    offset: 0,
                    message: "a -> type needs a sequence of length >= 2; use -o".into(),
                });
            }
            let items = left.iter().map(surface_to_lin).collect::<Result<_, _>>()?;
            Ok(Rank2Type::arrow(Seq::new(items), surface_to_rank2(right)?))
        }
    }
}

fn surface_to_multi(s: &Surface) -> Result<MultiType, TypeParseError> {
    match s {
        Surface::Atom(v) if v == "Neutral" => Ok(MultiType::Neutral),
        Surface::Atom(v) if v == "Abs" => Ok(MultiType::Abs),
        Surface::Atom(v) => Ok(MultiType::var(v.clone())),
        Surface::Lolli(l, r) => Ok(MultiType::lolli(surface_to_multi(l)?, surface_to_multi(r)?)),
        Surface::Arrow(_, _) => Err(TypeParseError {
            offset: 0,
            message: "-> is not a rank-0 multi-type constructor".into(),
        }),
    }
}

fn surface_to_mrank2(s: &Surface) -> Result<MRank2, TypeParseError> {
    match s {
        Surface::Arrow(left, right) => {
            if left.len() < 2 {
                return Err(TypeParseError {
                    offset: 0,
                    message: "a -> multi-type needs a sequence of length >= 2".into(),
                });
            }
            let items = left.iter().map(surface_to_multi).collect::<Result<_, _>>()?;
            Ok(MRank2::arrow(MSeq::new(items), surface_to_mrank2(right)?))
        }
        other => Ok(MRank2::M(surface_to_multi(other)?)),
    }
}

pub fn parse_lin(text: &str) -> Result<LinType, TypeParseError> {
    surface_to_lin(&parse_surface(text)?)
}

pub fn parse_rank2(text: &str) -> Result<Rank2Type, TypeParseError> {
    surface_to_rank2(&parse_surface(text)?)
}

pub fn parse_seq(text: &str) -> Result<Seq, TypeParseError> {
    let mut p = TyParser { src: text, pos: 0 };
    let mut items = vec![surface_to_lin(&p.lolli_item()?)?];
    loop {
        p.skip_ws();
        if p.eat("&") {
            items.push(surface_to_lin(&p.lolli_item()?)?);
        } else {
            break;
        }
    }
    p.skip_ws();
    if p.pos != text.len() {
        return p.err("unexpected trailing input");
    }
    Ok(Seq::new(items))
}

pub fn parse_mseq(text: &str) -> Result<MSeq, TypeParseError> {
    let mut p = TyParser { src: text, pos: 0 };
    let mut items = vec![surface_to_multi(&p.lolli_item()?)?];
    loop {
        p.skip_ws();
        if p.eat("&") {
            items.push(surface_to_multi(&p.lolli_item()?)?);
        } else {
            break;
        }
    }
    p.skip_ws();
    if p.pos != text.len() {
        return p.err("unexpected trailing input");
    }
    Ok(MSeq::new(items))
}

pub fn parse_mrank2(text: &str) -> Result<MRank2, TypeParseError> {
    surface_to_mrank2(&parse_surface(text)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lin(s: &str) -> LinType {
        parse_lin(s).unwrap()
    }

    fn r2(s: &str) -> Rank2Type {
        parse_rank2(s).unwrap()
    }

    #[test]
    fn type_syntax_round_trip() {
        for s in ["a", "a -o b", "(a -o b) -o c", "a -o b -o c"] {
            assert_eq!(lin(s).to_string(), s);
        }
        for s in ["(a -o b) & a -> b", "a & b & c -> d", "a -o b", "a & a -> b -o c"] {
            assert_eq!(r2(s).to_string(), s);
        }
    }

    #[test]
    fn rank2_smart_constructor_collapses_linear() {
        let t = Rank2Type::lolli(lin("a"), Rank2Type::Lin(lin("b")));
        assert_eq!(t, Rank2Type::Lin(lin("a -o b")));
        assert_eq!(r2("a -o b"), t);
    }

    #[test]
    fn singleton_arrow_is_rejected() {
        assert!(parse_rank2("a -> b").is_err());
    }

    #[test]
    fn classical_rank_examples() {
        // α1 ∩ (α1 → α2) → α2 has rank 2
        let t = GeneralType::arrow(
            vec![
                GeneralType::var("a1"),
                GeneralType::arrow(vec![GeneralType::var("a1")], GeneralType::var("a2")),
            ],
            GeneralType::var("a2"),
        );
        assert_eq!(classical_rank(&t), Ok(2));
        // (α1 ∩ α2 → α3) → α4 has rank 3
        let t = GeneralType::arrow(
            vec![GeneralType::arrow(
                vec![GeneralType::var("a1"), GeneralType::var("a2")],
                GeneralType::var("a3"),
            )],
            GeneralType::var("a4"),
        );
        assert_eq!(classical_rank(&t), Ok(3));
        assert_eq!(classical_rank(&GeneralType::var("a")), Ok(0));
        // simple types stay rank 0
        let t = GeneralType::arrow(
            vec![GeneralType::arrow(vec![GeneralType::var("a")], GeneralType::var("a"))],
            GeneralType::var("b"),
        );
        assert_eq!(classical_rank(&t), Ok(0));
    }

    #[test]
    fn classical_rank_rejects_linear_arrow() {
        let t = GeneralType::lolli(GeneralType::var("a"), GeneralType::var("b"));
        assert_eq!(classical_rank(&t), Err(RankError::LolliInClassical));
    }

    #[test]
    fn linear_rank_examples() {
        assert_eq!(linear_rank(&(&lin("a1 -o a2")).into()), Ok(0));
        // (α⊸α) ∩ α → α has linear rank 2
        assert_eq!(linear_rank(&(&r2("(a -o a) & a -> a")).into()), Ok(2));
        // the type needed for (λx.x x)(λf.λx.f (f x)): the argument gets the
        // rank-2 type ρ = (α⊸α) ∩ (α⊸α) → (α⊸α), so the head's sequence
        // contains ρ and the overall type is linear rank 3
        let rho = GeneralType::from(&r2("(a -o a) & (a -o a) -> a -o a"));
        let t = GeneralType::arrow(
            vec![
                rho,
                (&lin("a -o a")).into(),
                (&lin("a -o a")).into(),
            ],
            (&lin("a -o a")).into(),
        );
        assert_eq!(linear_rank(&t), Ok(3));
    }

    #[test]
    fn linear_rank_rejects_singleton_arrow() {
        let t = GeneralType::arrow(vec![GeneralType::var("a")], GeneralType::var("b"));
        assert_eq!(linear_rank(&t), Err(RankError::SingletonArrowInLinear));
    }

    #[test]
    fn apply_subst_examples() {
        let mut s = TypeSubst::new();
        s.bind("a1", lin("a3 -o a4"));
        assert_eq!(s.apply_lin(&lin("a1")), lin("a3 -o a4"));

        let id = TypeSubst::new();
        let sigma = r2("(a -o b) & a -> b");
        assert_eq!(id.apply_rank2(&sigma), sigma);

        let mut s = TypeSubst::new();
        s.bind("a", lin("b"));
        let env = TypeEnv::from_decls(vec![(
            "x".into(),
            Seq::new(vec![lin("a"), lin("a")]),
        )]);
        assert_eq!(
            s.apply_env(&env),
            TypeEnv::from_decls(vec![("x".into(), Seq::new(vec![lin("b"), lin("b")]))])
        );
    }

    #[test]
    fn compose_examples() {
        let mut s1 = TypeSubst::new();
        s1.bind("a1", lin("a2"));
        let mut s2 = TypeSubst::new();
        s2.bind("a2", lin("a3"));
        let c = TypeSubst::compose(&s2, &s1);
        assert_eq!(c.apply_lin(&lin("a1")), lin("a3"));

        // disjoint domains behave like union
        let mut s1 = TypeSubst::new();
        s1.bind("a", lin("c -o c"));
        let mut s2 = TypeSubst::new();
        s2.bind("b", lin("d"));
        let c = TypeSubst::compose(&s2, &s1);
        assert_eq!(c.apply_lin(&lin("a")), lin("c -o c"));
        assert_eq!(c.apply_lin(&lin("b")), lin("d"));

        // composing with an empty substitution changes nothing
        let c = TypeSubst::compose(&TypeSubst::new(), &s1);
        assert_eq!(c, s1);
    }

    #[test]
    fn env_sum_examples() {
        let g1 = TypeEnv::from_decls(vec![("x".into(), Seq::singleton(lin("a1")))]);
        let g2 = TypeEnv::from_decls(vec![("x".into(), Seq::singleton(lin("a2")))]);
        assert_eq!(
            g1.sum(&g2),
            TypeEnv::from_decls(vec![("x".into(), Seq::new(vec![lin("a1"), lin("a2")]))])
        );

        let g = TypeEnv::from_decls(vec![("y".into(), Seq::singleton(lin("b")))]);
        assert_eq!(TypeEnv::empty().sum(&g), g);

        let g1 = TypeEnv::from_decls(vec![("x".into(), Seq::singleton(lin("a")))]);
        let g2 = TypeEnv::from_decls(vec![("y".into(), Seq::singleton(lin("b")))]);
        let sum = g1.sum(&g2);
        assert_eq!(sum.domain(), vec!["x", "y"]);
    }

    #[test]
    fn env_equiv_examples() {
        let g1 = TypeEnv::from_decls(vec![
            ("x".into(), Seq::singleton(lin("a"))),
            ("y".into(), Seq::singleton(lin("b"))),
        ]);
        let g2 = TypeEnv::from_decls(vec![
            ("y".into(), Seq::singleton(lin("b"))),
            ("x".into(), Seq::singleton(lin("a"))),
        ]);
        assert!(g1.equiv(&g2));
        let g3 = TypeEnv::from_decls(vec![("x".into(), Seq::singleton(lin("b")))]);
        assert!(!g3.equiv(&TypeEnv::from_decls(vec![("x".into(), Seq::singleton(lin("a")))])));
        assert!(TypeEnv::empty().equiv(&TypeEnv::empty()));
    }

    #[test]
    fn env_remove_and_lookup() {
        let g = TypeEnv::from_decls(vec![
            ("x".into(), Seq::singleton(lin("a"))),
            ("y".into(), Seq::singleton(lin("b"))),
        ]);
        assert_eq!(
            g.remove("x"),
            TypeEnv::from_decls(vec![("y".into(), Seq::singleton(lin("b")))])
        );
        let g2 = TypeEnv::from_decls(vec![("y".into(), Seq::singleton(lin("b")))]);
        assert_eq!(g2.remove("x"), g2);
        let g3 = TypeEnv::from_decls(vec![("x".into(), Seq::new(vec![lin("a"), lin("b")]))]);
        assert_eq!(g3.lookup("x"), Some(&Seq::new(vec![lin("a"), lin("b")])));
        assert_eq!(g3.lookup("z"), None);
    }

    #[test]
    fn seq_equality_is_positional_equiv_is_multiset() {
        let ab = Seq::new(vec![lin("a"), lin("b")]);
        let ba = Seq::new(vec![lin("b"), lin("a")]);
        assert_ne!(ab, ba);
        assert!(ab.equiv(&ba));
        assert!(!ab.equiv(&Seq::new(vec![lin("a"), lin("a")])));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        pub(crate) fn arb_lin() -> impl Strategy<Value = LinType> {
            let leaf = prop_oneof![
                Just(LinType::var("a")),
                Just(LinType::var("b")),
                Just(LinType::var("c")),
                Just(LinType::var("d")),
            ];
            leaf.prop_recursive(4, 16, 2, |inner| {
                (inner.clone(), inner).prop_map(|(l, r)| LinType::lolli(l, r))
            })
        }

        fn arb_subst() -> impl Strategy<Value = TypeSubst> {
            proptest::collection::vec((prop_oneof![Just("a"), Just("b"), Just("c")], arb_lin()), 0..3)
                .prop_map(|pairs| {
                    let mut s = TypeSubst::new();
                    for (v, t) in pairs {
                        if !t.contains_var(v) {
                            let resolved = s.apply_lin(&t);
                            if s.get(v).is_none() && !resolved.contains_var(v) {
                                s.bind(v, t);
                            }
                        }
                    }
                    s
                })
        }

        proptest! {
            // the paper's composition law, checked extensionally
            #[test]
            fn compose_law(s1 in arb_subst(), s2 in arb_subst(), t in arb_lin()) {
                let c = TypeSubst::compose(&s2, &s1);
                prop_assert_eq!(c.apply_lin(&t), s2.apply_lin(&s1.apply_lin(&t)));
            }

            #[test]
            fn subst_distributes_over_sum(s in arb_subst(), t1 in arb_lin(), t2 in arb_lin()) {
                let g1 = TypeEnv::from_decls(vec![
                    ("x".into(), Seq::singleton(t1.clone())),
                    ("y".into(), Seq::singleton(t2.clone())),
                ]);
                let g2 = TypeEnv::from_decls(vec![("x".into(), Seq::singleton(t2))]);
                prop_assert!(s.apply_env(&g1.sum(&g2)).equiv(&s.apply_env(&g1).sum(&s.apply_env(&g2))));
            }

            #[test]
            fn env_sum_associative_up_to_equiv(t1 in arb_lin(), t2 in arb_lin(), t3 in arb_lin()) {
                let g1 = TypeEnv::from_decls(vec![("x".into(), Seq::singleton(t1))]);
                let g2 = TypeEnv::from_decls(vec![
                    ("x".into(), Seq::singleton(t2)),
                    ("y".into(), Seq::singleton(LinType::var("e"))),
                ]);
                let g3 = TypeEnv::from_decls(vec![("y".into(), Seq::singleton(t3))]);
                let left = g1.sum(&g2).sum(&g3);
                let right = g1.sum(&g2.sum(&g3));
                prop_assert!(left.equiv(&right));
                // the empty environment is an identity
                prop_assert!(TypeEnv::empty().sum(&left).equiv(&left));
                prop_assert!(left.sum(&TypeEnv::empty()).equiv(&left));
            }
        }
    }
}

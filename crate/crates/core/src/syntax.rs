//! λ-term syntax: parsing, printing, free variables, capture-avoiding
//! substitution, α-equivalence and the λI/linearity predicates.

use std::fmt;

use thiserror::Error;

/// A λ-calculus term with named variables.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Var(String),
    Abs(String, Box<Term>),
    App(Box<Term>, Box<Term>),
}

impl Term {
    pub fn var(name: impl Into<String>) -> Term {
        Term::Var(name.into())
    }

    pub fn abs(binder: impl Into<String>, body: Term) -> Term {
        Term::Abs(binder.into(), Box::new(body))
    }

    pub fn app(fun: Term, arg: Term) -> Term {
        Term::App(Box::new(fun), Box::new(arg))
    }

    /// Number of AST nodes.
    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) => 1,
            Term::Abs(_, body) => 1 + body.size(),
            Term::App(fun, arg) => 1 + fun.size() + arg.size(),
        }
    }

    /// Free variables in order of first free occurrence.
    pub fn fv(&self) -> Vec<String> {
        fn walk(t: &Term, bound: &mut Vec<String>, acc: &mut Vec<String>) {
            match t {
                Term::Var(x) => {
                    if !bound.iter().any(|b| b == x) && !acc.iter().any(|a| a == x) {
                        acc.push(x.clone());
                    }
                }
                Term::Abs(x, body) => {
                    bound.push(x.clone());
                    walk(body, bound, acc);
                    bound.pop();
                }
                Term::App(fun, arg) => {
                    walk(fun, bound, acc);
                    walk(arg, bound, acc);
                }
            }
        }
        let mut acc = Vec::new();
        walk(self, &mut Vec::new(), &mut acc);
        acc
    }

    /// Number of free occurrences of `x`.
    pub fn free_occurrences(&self, x: &str) -> usize {
        match self {
            Term::Var(y) => usize::from(y == x),
            Term::Abs(y, _) if y == x => 0,
            Term::Abs(_, body) => body.free_occurrences(x),
            Term::App(fun, arg) => fun.free_occurrences(x) + arg.free_occurrences(x),
        }
    }

    /// Substitutes `replacement` for each free occurrence of `target`,
    /// α-renaming binders of `self` that would capture free variables of
    /// the replacement.
    pub fn subst(&self, replacement: &Term, target: &str) -> Term {
        match self {
            Term::Var(y) if y == target => replacement.clone(),
            Term::Var(_) => self.clone(),
            Term::Abs(y, _) if y == target => self.clone(),
            Term::Abs(y, body) => {
                let captures = body.free_occurrences(target) > 0
                    && replacement.free_occurrences(y) > 0;
                if captures {
                    let mut avoid: Vec<String> = replacement.fv();
                    avoid.extend(body.fv());
                    avoid.push(target.to_string());
                    let fresh = fresh_name(y, &avoid);
                    let renamed = body.subst(&Term::var(fresh.clone()), y);
                    Term::abs(fresh, renamed.subst(replacement, target))
                } else {
                    Term::abs(y.clone(), body.subst(replacement, target))
                }
            }
            Term::App(fun, arg) => {
                Term::app(fun.subst(replacement, target), arg.subst(replacement, target))
            }
        }
    }

    /// True iff every abstraction binder occurs free in its body at least once.
    pub fn is_lambda_i(&self) -> bool {
        match self {
            Term::Var(_) => true,
            Term::Abs(x, body) => body.free_occurrences(x) >= 1 && body.is_lambda_i(),
            Term::App(fun, arg) => fun.is_lambda_i() && arg.is_lambda_i(),
        }
    }

    /// True iff every binder is used exactly once and every free variable
    /// occurs exactly once.
    pub fn is_linear(&self) -> bool {
        fn binders_linear(t: &Term) -> bool {
            match t {
                Term::Var(_) => true,
                Term::Abs(x, body) => body.free_occurrences(x) == 1 && binders_linear(body),
                Term::App(fun, arg) => binders_linear(fun) && binders_linear(arg),
            }
        }
        binders_linear(self) && self.fv().iter().all(|x| self.free_occurrences(x) == 1)
    }
}

/// Ordered list of (replacement, target) pairs, applied left to right.
#[derive(Debug, Clone, Default)]
pub struct TermSubst(pub Vec<(Term, String)>);

impl TermSubst {
    pub fn apply(&self, t: &Term) -> Term {
        self.0
            .iter()
            .fold(t.clone(), |acc, (n, x)| acc.subst(n, x))
    }
}

/// Smallest `stem#k` not occurring in `avoid`. The `#` character is not
/// accepted by the parser, so machine-generated names never collide with
/// user-written ones.
pub fn fresh_name(base: &str, avoid: &[String]) -> String {
    let stem = base.split('#').next().unwrap_or(base);
    (0..)
        .map(|k| format!("{stem}#{k}"))
        .find(|cand| !avoid.iter().any(|a| a == cand))
        .unwrap()
}

/// Generator of globally fresh term variables for one run.
#[derive(Debug, Default)]
pub struct NameGen {
    next: u64,
}

impl NameGen {
    pub fn new() -> Self {
        NameGen::default()
    }

    pub fn fresh(&mut self, base: &str) -> String {
        let stem = base.split('#').next().unwrap_or(base);
        let name = format!("{stem}#{}", self.next);
        self.next += 1;
        name
    }
}

/// True iff the two terms are equal up to consistent renaming of bound
/// variables.
pub fn alpha_eq(a: &Term, b: &Term) -> bool {
    fn walk(a: &Term, b: &Term, pairs: &mut Vec<(String, String)>) -> bool {
        match (a, b) {
            (Term::Var(x), Term::Var(y)) => {
                for (bx, by) in pairs.iter().rev() {
                    let hit_x = bx == x;
                    let hit_y = by == y;
                    if hit_x || hit_y {
                        return hit_x && hit_y;
                    }
                }
                x == y
            }
            (Term::Abs(x, bx), Term::Abs(y, by)) => {
                pairs.push((x.clone(), y.clone()));
                let r = walk(bx, by, pairs);
                pairs.pop();
                r
            }
            (Term::App(f1, a1), Term::App(f2, a2)) => {
                walk(f1, f2, pairs) && walk(a1, a2, pairs)
            }
            _ => false,
        }
    }
    walk(a, b, &mut Vec::new())
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at byte {offset}: {message}")]
pub struct ParseError {
    pub offset: usize,
    pub message: String,
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError {
            offset: self.pos,
            message: message.into(),
        })
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn ident(&mut self) -> Option<String> {
        let start = self.pos;
        match self.peek() {
            Some(c) if c.is_ascii_alphabetic() => self.pos += 1,
            _ => return None,
        }
        while let Some(c) = self.peek() {
            if c.is_ascii_alphanumeric() || c == '_' || c == '\'' {
                self.pos += 1;
            } else {
                break;
            }
        }
        Some(self.src[start..self.pos].to_string())
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        self.skip_ws();
        if self.peek() == Some('\\') || self.peek() == Some('λ') {
            return self.lambda();
        }
        let mut acc = self.atom()?;
        loop {
            self.skip_ws();
            match self.peek() {
                Some('\\') | Some('λ') => {
                    // an abstraction in argument position extends maximally right
                    let arg = self.lambda()?;
                    acc = Term::app(acc, arg);
                }
                Some(c) if c == '(' || c.is_ascii_alphabetic() => {
                    let arg = self.atom()?;
                    acc = Term::app(acc, arg);
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn lambda(&mut self) -> Result<Term, ParseError> {
        // caller saw '\' or 'λ'
        let c = self.peek().unwrap();
        self.pos += c.len_utf8();
        let mut binders = Vec::new();
        loop {
            self.skip_ws();
            match self.ident() {
                Some(x) => binders.push(x),
                None => break,
            }
        }
        if binders.is_empty() {
            return self.err("expected binder after abstraction sign");
        }
        self.skip_ws();
        if !self.eat('.') {
            return self.err("expected '.' after binders");
        }
        self.skip_ws();
        if self.peek().is_none() {
            return self.err("missing abstraction body");
        }
        let body = self.term()?;
        Ok(binders
            .into_iter()
            .rev()
            .fold(body, |acc, x| Term::abs(x, acc)))
    }

    fn atom(&mut self) -> Result<Term, ParseError> {
        self.skip_ws();
        if self.eat('(') {
            let t = self.term()?;
            self.skip_ws();
            if !self.eat(')') {
                return self.err("expected ')'");
            }
            return Ok(t);
        }
        match self.ident() {
            Some(x) => Ok(Term::var(x)),
            None => self.err("expected a term"),
        }
    }
}

/// Parses `term ::= var | '\' var+ '.' term | term term | '(' term ')'`;
/// application is left-associative and an abstraction body extends
/// maximally to the right. Both `\` and `λ` introduce abstractions.
pub fn parse(text: &str) -> Result<Term, ParseError> {
    let mut p = Parser { src: text, pos: 0 };
    let t = p.term()?;
    p.skip_ws();
    if p.pos != text.len() {
        return p.err("unexpected trailing input");
    }
    Ok(t)
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // precedence: 0 lambda, 1 application, 2 atom
        fn go(t: &Term, prec: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            match t {
                Term::Var(x) => write!(f, "{x}"),
                Term::Abs(x, body) => {
                    if prec > 0 {
                        write!(f, "(")?;
                    }
                    write!(f, "\\{x}. ")?;
                    go(body, 0, f)?;
                    if prec > 0 {
                        write!(f, ")")?;
                    }
                    Ok(())
                }
                Term::App(fun, arg) => {
                    if prec > 1 {
                        write!(f, "(")?;
                    }
                    go(fun, 1, f)?;
                    write!(f, " ")?;
                    go(arg, 2, f)?;
                    if prec > 1 {
                        write!(f, ")")?;
                    }
                    Ok(())
                }
            }
        }
        go(self, 0, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Term {
        parse(s).unwrap()
    }

    #[test]
    fn parse_self_application() {
        assert_eq!(
            p("\\x. x x"),
            Term::abs("x", Term::app(Term::var("x"), Term::var("x")))
        );
    }

    #[test]
    fn parse_application_of_abstractions() {
        assert_eq!(
            p("(\\x. x x) (\\y. y)"),
            Term::app(
                Term::abs("x", Term::app(Term::var("x"), Term::var("x"))),
                Term::abs("y", Term::var("y"))
            )
        );
    }

    #[test]
    fn parse_missing_body_is_an_error() {
        assert!(parse("\\x. \\y.").is_err());
    }

    #[test]
    fn parse_multi_binder_sugar() {
        assert_eq!(p("\\x y. x"), p("\\x. \\y. x"));
    }

    #[test]
    fn parse_lambda_sign_unicode() {
        assert_eq!(p("λx. x"), p("\\x. x"));
    }

    #[test]
    fn parse_application_left_associative() {
        assert_eq!(
            p("x y z"),
            Term::app(Term::app(Term::var("x"), Term::var("y")), Term::var("z"))
        );
    }

    #[test]
    fn parse_error_carries_offset() {
        let e = parse("\\x. (x").unwrap_err();
        assert_eq!(e.offset, 6);
    }

    #[test]
    fn fv_examples() {
        assert!(p("\\x. x x").fv().is_empty());
        assert_eq!(p("x y x").fv(), vec!["x".to_string(), "y".to_string()]);
        assert_eq!(p("\\x. x y").fv(), vec!["y".to_string()]);
    }

    #[test]
    fn subst_free_variable() {
        let n = p("\\z. z");
        assert_eq!(Term::var("x").subst(&n, "x"), n);
    }

    #[test]
    fn subst_shadowed_binder_is_identity() {
        let m = p("\\x. x y");
        assert_eq!(m.subst(&p("\\z. z"), "x"), m);
    }

    #[test]
    fn subst_avoids_capture() {
        // (\y. x y)[y/x] must rename the binder
        let m = p("\\y. x y");
        let r = m.subst(&Term::var("y"), "x");
        assert!(alpha_eq(&r, &p("\\w. y w")));
        assert_ne!(r, p("\\y. y y"));
    }

    #[test]
    fn alpha_eq_examples() {
        assert!(alpha_eq(&p("\\x. x"), &p("\\y. y")));
        assert!(!alpha_eq(&p("\\x. \\y. x"), &p("\\a. \\b. b")));
        assert!(!alpha_eq(&Term::var("x"), &Term::var("y")));
    }

    #[test]
    fn lambda_i_examples() {
        assert!(p("\\x. x x").is_lambda_i());
        assert!(!p("\\x. y").is_lambda_i());
        assert!(p("\\f. \\x. f (f x)").is_lambda_i());
    }

    #[test]
    fn linear_examples() {
        assert!(p("\\y. y").is_linear());
        assert!(!p("\\x. x x").is_linear());
        assert!(p("\\f. \\x. f x").is_linear());
        assert!(!p("x x").is_linear());
    }

    #[test]
    fn print_examples() {
        assert_eq!(p("\\x. x x").to_string(), "\\x. x x");
        assert_eq!(p("x y z").to_string(), "x y z");
        assert_eq!(p("(\\x. x) y").to_string(), "(\\x. x) y");
        assert_eq!(p("x (y z)").to_string(), "x (y z)");
    }

    #[test]
    fn term_subst_applies_left_to_right() {
        let s = TermSubst(vec![
            (Term::var("y"), "x".to_string()),
            (Term::var("z"), "y".to_string()),
        ]);
        assert_eq!(s.apply(&Term::var("x")), Term::var("z"));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn arb_term() -> impl Strategy<Value = Term> {
            let names = prop_oneof![
                Just("a".to_string()),
                Just("b".to_string()),
                Just("c".to_string()),
                Just("x".to_string()),
                Just("y".to_string()),
            ];
            let leaf = names.clone().prop_map(Term::var);
            leaf.prop_recursive(5, 24, 2, move |inner| {
                prop_oneof![
                    (names.clone(), inner.clone()).prop_map(|(x, b)| Term::abs(x, b)),
                    (inner.clone(), inner).prop_map(|(f, a)| Term::app(f, a)),
                ]
            })
        }

        proptest! {
            #[test]
            fn print_parse_round_trip(t in arb_term()) {
                let back = parse(&t.to_string()).unwrap();
                prop_assert!(alpha_eq(&back, &t));
            }

            #[test]
            fn subst_var_for_itself(t in arb_term()) {
                prop_assert!(alpha_eq(&t.subst(&Term::var("x"), "x"), &t));
            }

            #[test]
            fn fv_of_subst(t in arb_term(), n in arb_term()) {
                use std::collections::BTreeSet;
                if t.free_occurrences("x") > 0 {
                    let got: BTreeSet<_> = t.subst(&n, "x").fv().into_iter().collect();
                    let mut want: BTreeSet<_> = t.fv().into_iter().filter(|v| v != "x").collect();
                    want.extend(n.fv());
                    prop_assert_eq!(got, want);
                }
            }

            #[test]
            fn alpha_eq_reflexive(t in arb_term()) {
                prop_assert!(alpha_eq(&t, &t));
            }

            #[test]
            fn alpha_eq_symmetric(a in arb_term(), b in arb_term()) {
                prop_assert_eq!(alpha_eq(&a, &b), alpha_eq(&b, &a));
            }

            #[test]
            fn alpha_eq_transitive_on_renamed_copies(t in arb_term()) {
                let mut g1 = NameGen::new();
                let mut g2 = NameGen::new();
                g2.next = 1000;
                let u = freshen_binders(&t, &mut g1);
                let v = freshen_binders(&t, &mut g2);
                prop_assert!(alpha_eq(&t, &u));
                prop_assert!(alpha_eq(&u, &v));
                prop_assert!(alpha_eq(&t, &v));
            }
        }

        fn freshen_binders(t: &Term, gen: &mut NameGen) -> Term {
            match t {
                Term::Var(_) => t.clone(),
                Term::Abs(x, body) => {
                    let fresh = gen.fresh(x);
                    let renamed = body.subst(&Term::var(fresh.clone()), x);
                    Term::abs(fresh, freshen_binders(&renamed, gen))
                }
                Term::App(f, a) => {
                    Term::app(freshen_binders(f, gen), freshen_binders(a, gen))
                }
            }
        }
    }
}

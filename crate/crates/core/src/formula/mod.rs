//! First-order formulas: AST, text grammar, and the Gödel translation.
//!
//! Quantifiers carry explicit domain names that resolve to declared finite
//! families at evaluation time; terms are variables, named constants, or
//! exact rational literals.

mod parser;

pub use parser::parse;

use num_bigint::BigInt;
use num_rational::BigRational;
use std::collections::BTreeSet;
use std::fmt;

/// Names visible to the parser: declared constants and quantifier domains.
#[derive(Debug, Clone, Default)]
pub struct SymbolScope {
    pub constants: BTreeSet<String>,
    pub domains: BTreeSet<String>,
}

impl SymbolScope {
    pub fn new<C, D, S>(constants: C, domains: D) -> SymbolScope
    where
        C: IntoIterator<Item = S>,
        D: IntoIterator<Item = S>,
        S: Into<String>,
    {
        SymbolScope {
            constants: constants.into_iter().map(Into::into).collect(),
            domains: domains.into_iter().map(Into::into).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Var(String),
    Const(String),
    /// Stored in lowest terms with positive denominator (Ratio normalizes).
    Rational(BigRational),
}

impl Term {
    pub fn rational_from_parts(numer: i64, denom: i64) -> Term {
        Term::Rational(BigRational::new(BigInt::from(numer), BigInt::from(denom)))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Equals(Term, Term),
    Leq(Term, Term),
    In(Term, Term),
    Relation(String, Vec<Term>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Not(Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Forall(String, String, Box<Formula>),
    Exists(String, String, Box<Formula>),
}

impl Formula {
    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }
    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }
    #[allow(clippy::should_implement_trait)]
    pub fn not(a: Formula) -> Formula {
        Formula::Not(Box::new(a))
    }
    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }
    pub fn forall(var: &str, domain: &str, body: Formula) -> Formula {
        Formula::Forall(var.to_string(), domain.to_string(), Box::new(body))
    }
    pub fn exists(var: &str, domain: &str, body: Formula) -> Formula {
        Formula::Exists(var.to_string(), domain.to_string(), Box::new(body))
    }

    pub fn is_atomic(&self) -> bool {
        matches!(
            self,
            Formula::Equals(..) | Formula::Leq(..) | Formula::In(..) | Formula::Relation(..)
        )
    }

    /// The Gödel-Gentzen negative translation: atoms are double-negated,
    /// disjunction becomes `~(~a & ~b)`, the existential becomes `~forall~`,
    /// and the remaining connectives commute with the translation. The
    /// output contains no `|` and no `exists` nodes.
    pub fn godel_translate(&self) -> Formula {
        match self {
            f if f.is_atomic() => Formula::not(Formula::not(f.clone())),
            Formula::And(a, b) => Formula::and(a.godel_translate(), b.godel_translate()),
            Formula::Or(a, b) => Formula::not(Formula::and(
                Formula::not(a.godel_translate()),
                Formula::not(b.godel_translate()),
            )),
            Formula::Not(a) => Formula::not(a.godel_translate()),
            Formula::Implies(a, b) => {
                Formula::implies(a.godel_translate(), b.godel_translate())
            }
            Formula::Forall(v, d, body) => {
                Formula::Forall(v.clone(), d.clone(), Box::new(body.godel_translate()))
            }
            Formula::Exists(v, d, body) => Formula::not(Formula::Forall(
                v.clone(),
                d.clone(),
                Box::new(Formula::not(body.godel_translate())),
            )),
            _ => unreachable!("is_atomic covers the remaining variants"),
        }
    }

    /// Substitutes `replacement` for every free occurrence of the variable
    /// `var`. Used by comprehension, which instantiates a one-slot formula.
    pub fn substitute(&self, var: &str, replacement: &Term) -> Formula {
        let sub_term = |t: &Term| match t {
            Term::Var(v) if v == var => replacement.clone(),
            other => other.clone(),
        };
        match self {
            Formula::Equals(a, b) => Formula::Equals(sub_term(a), sub_term(b)),
            Formula::Leq(a, b) => Formula::Leq(sub_term(a), sub_term(b)),
            Formula::In(a, b) => Formula::In(sub_term(a), sub_term(b)),
            Formula::Relation(name, args) => {
                Formula::Relation(name.clone(), args.iter().map(sub_term).collect())
            }
            Formula::And(a, b) => {
                Formula::and(a.substitute(var, replacement), b.substitute(var, replacement))
            }
            Formula::Or(a, b) => {
                Formula::or(a.substitute(var, replacement), b.substitute(var, replacement))
            }
            Formula::Not(a) => Formula::not(a.substitute(var, replacement)),
            Formula::Implies(a, b) => Formula::implies(
                a.substitute(var, replacement),
                b.substitute(var, replacement),
            ),
            Formula::Forall(v, d, body) if v != var => Formula::Forall(
                v.clone(),
                d.clone(),
                Box::new(body.substitute(var, replacement)),
            ),
            Formula::Exists(v, d, body) if v != var => Formula::Exists(
                v.clone(),
                d.clone(),
                Box::new(body.substitute(var, replacement)),
            ),
            shadowed @ (Formula::Forall(..) | Formula::Exists(..)) => shadowed.clone(),
        }
    }

    /// Reinterprets a named constant as a free variable. Comprehension
    /// formulas have one free slot; the parser only accepts closed formulas,
    /// so the slot is declared as a constant and promoted afterwards.
    pub fn promote_const_to_var(&self, name: &str) -> Formula {
        let promote = |t: &Term| match t {
            Term::Const(c) if c == name => Term::Var(c.clone()),
            other => other.clone(),
        };
        match self {
            Formula::Equals(a, b) => Formula::Equals(promote(a), promote(b)),
            Formula::Leq(a, b) => Formula::Leq(promote(a), promote(b)),
            Formula::In(a, b) => Formula::In(promote(a), promote(b)),
            Formula::Relation(r, args) => {
                Formula::Relation(r.clone(), args.iter().map(promote).collect())
            }
            Formula::And(a, b) => {
                Formula::and(a.promote_const_to_var(name), b.promote_const_to_var(name))
            }
            Formula::Or(a, b) => {
                Formula::or(a.promote_const_to_var(name), b.promote_const_to_var(name))
            }
            Formula::Not(a) => Formula::not(a.promote_const_to_var(name)),
            Formula::Implies(a, b) => {
                Formula::implies(a.promote_const_to_var(name), b.promote_const_to_var(name))
            }
            Formula::Forall(v, d, body) => Formula::Forall(
                v.clone(),
                d.clone(),
                Box::new(body.promote_const_to_var(name)),
            ),
            Formula::Exists(v, d, body) => Formula::Exists(
                v.clone(),
                d.clone(),
                Box::new(body.promote_const_to_var(name)),
            ),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Formula::Forall(..) | Formula::Exists(..) => 0,
            Formula::Implies(..) => 1,
            Formula::Or(..) => 2,
            Formula::And(..) => 3,
            Formula::Not(..) => 4,
            _ => 5,
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        let prec = self.precedence();
        let parens = prec < min;
        if parens {
            write!(f, "(")?;
        }
        match self {
            Formula::Equals(a, b) => write!(f, "{a} = {b}")?,
            Formula::Leq(a, b) => write!(f, "{a} <= {b}")?,
            Formula::In(a, b) => write!(f, "{a} in {b}")?,
            Formula::Relation(name, args) => {
                write!(f, "{name}(")?;
                for (i, t) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{t}")?;
                }
                write!(f, ")")?;
            }
            Formula::And(a, b) => {
                // Left-associative: the right operand must bind tighter.
                a.fmt_prec(f, 3)?;
                write!(f, " & ")?;
                b.fmt_prec(f, 4)?;
            }
            Formula::Or(a, b) => {
                a.fmt_prec(f, 2)?;
                write!(f, " | ")?;
                b.fmt_prec(f, 3)?;
            }
            Formula::Implies(a, b) => {
                // Right-associative.
                a.fmt_prec(f, 2)?;
                write!(f, " -> ")?;
                b.fmt_prec(f, 1)?;
            }
            Formula::Not(a) => {
                write!(f, "~")?;
                a.fmt_prec(f, 4)?;
            }
            Formula::Forall(v, d, body) => {
                write!(f, "forall {v} in {d} . ")?;
                body.fmt_prec(f, 0)?;
            }
            Formula::Exists(v, d, body) => {
                write!(f, "exists {v} in {d} . ")?;
                body.fmt_prec(f, 0)?;
            }
        }
        if parens {
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => f.write_str(v),
            Term::Const(c) => f.write_str(c),
            Term::Rational(q) => {
                if q.is_integer() {
                    write!(f, "{}", q.numer())
                } else {
                    write!(f, "{}/{}", q.numer(), q.denom())
                }
            }
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scope() -> SymbolScope {
        SymbolScope::new(["a", "b", "c"], ["S", "D"])
    }

    fn atom(name1: &str, name2: &str) -> Formula {
        Formula::Equals(Term::Const(name1.into()), Term::Const(name2.into()))
    }

    #[test]
    fn parse_excluded_middle_shape() {
        let f = parse("a = b | ~(a = b)", &scope()).unwrap();
        assert_eq!(f, Formula::or(atom("a", "b"), Formula::not(atom("a", "b"))));
    }

    #[test]
    fn parse_forall_reflexivity() {
        let f = parse("forall x in S . x = x", &scope()).unwrap();
        assert_eq!(
            f,
            Formula::forall(
                "x",
                "S",
                Formula::Equals(Term::Var("x".into()), Term::Var("x".into()))
            )
        );
    }

    #[test]
    fn unbound_variable_is_rejected() {
        let err = parse("exists x in S . x = y", &scope()).unwrap_err();
        match err {
            crate::Error::UnboundVariable { name, .. } => assert_eq!(name, "y"),
            other => panic!("unexpected: {other}"),
        }
    }

    #[test]
    fn unknown_domain_is_rejected() {
        let err = parse("forall x in Zed . x = x", &scope()).unwrap_err();
        match err {
            crate::Error::UnknownDomainName { name, .. } => assert_eq!(name, "Zed"),
            other => panic!("unexpected: {other}"),
        }
    }

    #[test]
    fn syntax_error_reports_position() {
        let err = parse("a = ", &scope()).unwrap_err();
        match err {
            crate::Error::Parse { pos, .. } => assert_eq!(pos, 4),
            other => panic!("unexpected: {other}"),
        }
    }

    #[test]
    fn rational_literals_normalize() {
        let f = parse("2/4 <= a", &scope()).unwrap();
        match f {
            Formula::Leq(Term::Rational(q), _) => {
                assert_eq!(q, num_rational::BigRational::new(1.into(), 2.into()));
            }
            other => panic!("unexpected: {other}"),
        }
        assert!(parse("1/0 <= a", &scope()).is_err());
        let neg = parse("-3/6 <= a", &scope()).unwrap();
        assert_eq!(neg.to_string(), "-1/2 <= a");
    }

    #[test]
    fn precedence_matches_grammar() {
        let f = parse("a = b & b = c | a = c -> a = a", &scope()).unwrap();
        // ((a=b & b=c) | a=c) -> a=a
        assert_eq!(
            f,
            Formula::implies(
                Formula::or(Formula::and(atom("a", "b"), atom("b", "c")), atom("a", "c")),
                atom("a", "a")
            )
        );
        // Implication is right-associative.
        let g = parse("a = b -> b = c -> a = c", &scope()).unwrap();
        assert_eq!(
            g,
            Formula::implies(atom("a", "b"), Formula::implies(atom("b", "c"), atom("a", "c")))
        );
    }

    #[test]
    fn godel_translation_of_atom_is_double_negation() {
        let f = atom("a", "b");
        assert_eq!(
            f.godel_translate(),
            Formula::not(Formula::not(atom("a", "b")))
        );
    }

    #[test]
    fn godel_translation_removes_or_and_exists() {
        let f = parse("exists x in S . x = a | ~(x = b)", &scope()).unwrap();
        fn scan(f: &Formula) -> bool {
            match f {
                Formula::Or(..) | Formula::Exists(..) => false,
                Formula::And(a, b) | Formula::Implies(a, b) => scan(a) && scan(b),
                Formula::Not(a) | Formula::Forall(_, _, a) => scan(a),
                _ => true,
            }
        }
        assert!(!scan(&f));
        assert!(scan(&f.godel_translate()));
    }

    #[test]
    fn godel_translation_commutes_with_negation() {
        let f = Formula::not(atom("a", "b"));
        assert_eq!(f.godel_translate(), Formula::not(atom("a", "b").godel_translate()));
    }

    #[test]
    fn print_parse_round_trip_on_samples() {
        let texts = [
            "a = b | ~(a = b)",
            "forall x in S . exists y in D . x = y & ~(y = a)",
            "(a = b -> b = c) -> a = c",
            "R(a, b) & Q(c)",
            "-7/2 <= a & a <= 7/2",
            "~~(a = b)",
            "forall x in S . (x = a | x = b) -> x in c",
        ];
        for t in texts {
            let f = parse(t, &scope()).unwrap();
            let printed = f.to_string();
            let back = parse(&printed, &scope()).unwrap();
            assert_eq!(back, f, "round trip failed for `{t}` -> `{printed}`");
        }
    }
}

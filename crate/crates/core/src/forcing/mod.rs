//! Presheaves of finite structures and the Kripke-Joyal forcing evaluator.
//!
//! Forcing at a point is evaluated through minimal neighborhoods: on a finite
//! space the germ of a section at `x` is its restriction to the minimal open
//! neighborhood of `x`, and the neighborhood-quantified clauses for negation,
//! implication, and the universal quantifier reduce to that neighborhood.
//! The truth value of a formula on an open `u` is the set of points of `u`
//! it is forced at, which is itself always open.

mod presheaf;

pub use presheaf::{
    ExactnessProblem, ExactnessReport, ExactnessWitness, Presheaf, PresheafBuilder, SectionRef,
};

use crate::error::{Error, Result};
use crate::formula::{Formula, Term};
use crate::topology::{FiniteSpace, OpenSet, PointSet};
use num_rational::BigRational;
use std::collections::BTreeMap;

/// A structure whose elements can be forced over a finite space.
///
/// Elements play the role of local sections: each carries an open domain and
/// restricts to smaller opens. The atomic clauses (equality of germs,
/// relations, membership, order) are supplied by the implementation; the
/// evaluator provides the inductive clauses.
pub trait ForcingStructure {
    type Elem: Clone;

    fn space(&self) -> &FiniteSpace;

    /// The open domain the element is defined on.
    fn elem_domain(&self, elem: &Self::Elem) -> PointSet;

    /// Equality of germs at a point: both elements restricted to the minimal
    /// neighborhood of `x` coincide.
    fn germs_equal(&self, a: &Self::Elem, b: &Self::Elem, x: usize) -> bool;

    fn relation_at(&self, _name: &str, _args: &[Self::Elem], _x: usize) -> Result<bool> {
        Err(Error::UnsupportedAtom("relation"))
    }

    fn membership_at(&self, _a: &Self::Elem, _b: &Self::Elem, _x: usize) -> Result<bool> {
        Err(Error::UnsupportedAtom("in"))
    }

    fn leq_at(&self, _a: &Self::Elem, _b: &Self::Elem, _x: usize) -> Result<bool> {
        Err(Error::UnsupportedAtom("<="))
    }

    /// Resolves a declared quantifier domain to its finite family.
    fn domain_family(&self, name: &str) -> Result<Vec<Self::Elem>>;

    /// Resolves a named constant.
    fn constant(&self, name: &str) -> Result<Self::Elem>;

    /// Interprets a rational literal as an element, where meaningful.
    fn rational_elem(&self, _q: &BigRational) -> Result<Self::Elem> {
        Err(Error::UnsupportedAtom("rational literal"))
    }
}

/// Variable assignment used during evaluation.
pub type Env<E> = BTreeMap<String, E>;

fn term_value<S: ForcingStructure>(s: &S, term: &Term, env: &Env<S::Elem>) -> Result<S::Elem> {
    match term {
        Term::Var(v) => env
            .get(v)
            .cloned()
            .ok_or_else(|| Error::MissingEnv(v.clone())),
        Term::Const(c) => s.constant(c),
        Term::Rational(q) => s.rational_elem(q),
    }
}

fn check_defined<S: ForcingStructure>(s: &S, elem: &S::Elem, x: usize) -> Result<()> {
    if s.elem_domain(elem).contains(x) {
        Ok(())
    } else {
        Err(Error::SectionUndefined {
            id: "<element>".into(),
            open: s.space().set_label(PointSet::singleton(x)),
        })
    }
}

/// Whether `f` is forced at the point `x`.
///
/// Forcing at a point is absolute: it depends only on the element germs at
/// the minimal neighborhood of `x`, never on the open the caller is
/// collecting truth over.
pub fn forces_at<S: ForcingStructure>(
    s: &S,
    f: &Formula,
    env: &Env<S::Elem>,
    x: usize,
) -> Result<bool> {
    let space = s.space();
    match f {
        Formula::Equals(t1, t2) => {
            let a = term_value(s, t1, env)?;
            let b = term_value(s, t2, env)?;
            check_defined(s, &a, x)?;
            check_defined(s, &b, x)?;
            Ok(s.germs_equal(&a, &b, x))
        }
        Formula::Leq(t1, t2) => {
            let a = term_value(s, t1, env)?;
            let b = term_value(s, t2, env)?;
            check_defined(s, &a, x)?;
            check_defined(s, &b, x)?;
            s.leq_at(&a, &b, x)
        }
        Formula::In(t1, t2) => {
            let a = term_value(s, t1, env)?;
            let b = term_value(s, t2, env)?;
            check_defined(s, &a, x)?;
            check_defined(s, &b, x)?;
            s.membership_at(&a, &b, x)
        }
        Formula::Relation(name, terms) => {
            let args = terms
                .iter()
                .map(|t| term_value(s, t, env))
                .collect::<Result<Vec<_>>>()?;
            for a in &args {
                check_defined(s, a, x)?;
            }
            s.relation_at(name, &args, x)
        }
        Formula::And(a, b) => Ok(forces_at(s, a, env, x)? && forces_at(s, b, env, x)?),
        Formula::Or(a, b) => Ok(forces_at(s, a, env, x)? || forces_at(s, b, env, x)?),
        Formula::Not(a) => {
            for y in space.minimal_neighborhood(x).iter() {
                if forces_at(s, a, env, y)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        Formula::Implies(a, b) => {
            for y in space.minimal_neighborhood(x).iter() {
                if forces_at(s, a, env, y)? && !forces_at(s, b, env, y)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        Formula::Exists(var, domain, body) => {
            let family = s.domain_family(domain)?;
            for witness in family {
                if !s.elem_domain(&witness).contains(x) {
                    continue;
                }
                let mut env2 = env.clone();
                env2.insert(var.clone(), witness);
                if forces_at(s, body, &env2, x)? {
                    return Ok(true);
                }
            }
            Ok(false)
        }
        Formula::Forall(var, domain, body) => {
            let family = s.domain_family(domain)?;
            for y in space.minimal_neighborhood(x).iter() {
                for candidate in &family {
                    if !s.elem_domain(candidate).contains(y) {
                        continue;
                    }
                    let mut env2 = env.clone();
                    env2.insert(var.clone(), candidate.clone());
                    if !forces_at(s, body, &env2, y)? {
                        return Ok(false);
                    }
                }
            }
            Ok(true)
        }
    }
}

/// Truth value of `f` on the open `u`: the set of points of `u` where `f`
/// is forced. Always an open set of the structure's space.
pub fn truth_value<'a, S: ForcingStructure>(
    s: &'a S,
    f: &Formula,
    env: &Env<S::Elem>,
    u: OpenSet<'a>,
) -> Result<OpenSet<'a>> {
    let space = s.space();
    if space != u.space() {
        return Err(Error::SpaceMismatch);
    }
    for (name, elem) in env {
        if !u.members().is_subset(s.elem_domain(elem)) {
            return Err(Error::SectionUndefined {
                id: name.clone(),
                open: space.set_label(u.members()),
            });
        }
    }
    let mut value = PointSet::EMPTY;
    for x in u.members().iter() {
        if forces_at(s, f, env, x)? {
            value = value.union(PointSet::singleton(x));
        }
    }
    if !space.is_open(value) {
        return Err(Error::Internal(format!(
            "truth value {} of `{f}` is not open",
            space.set_label(value)
        )));
    }
    space.open(value)
}

/// Truth value over the full space.
pub fn truth_value_global<'a, S: ForcingStructure>(
    s: &'a S,
    f: &Formula,
    env: &Env<S::Elem>,
) -> Result<OpenSet<'a>> {
    let u = s.space().full_open();
    truth_value(s, f, env, u)
}

/// Whether `f` holds on all of `u` (the truth value is `u` itself).
pub fn forces_on<S: ForcingStructure>(
    s: &S,
    f: &Formula,
    env: &Env<S::Elem>,
    u: PointSet,
) -> Result<bool> {
    let space = s.space();
    let open = space.open(u)?;
    Ok(truth_value(s, f, env, open)?.members() == u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{parse, SymbolScope};

    fn fixture() -> Presheaf {
        crate::fixtures::non_hausdorff()
    }

    fn scope() -> SymbolScope {
        SymbolScope::new(["a", "b"], ["S"])
    }

    #[test]
    fn equality_truth_value_is_the_hausdorff_locus() {
        let p = fixture();
        let f = parse("a = b", &scope()).unwrap();
        let t = truth_value_global(&p, &f, &Env::new()).unwrap();
        assert_eq!(t.members(), PointSet::singleton(1));
    }

    #[test]
    fn excluded_middle_fails_at_the_non_hausdorff_point() {
        let p = fixture();
        let f = parse("a = b | ~(a = b)", &scope()).unwrap();
        let t = truth_value_global(&p, &f, &Env::new()).unwrap();
        assert_eq!(t.members(), PointSet::singleton(1));
        assert_ne!(t.members(), p.space().full_set());
    }

    #[test]
    fn forces_at_matches_the_pointwise_reading() {
        let p = fixture();
        let f = parse("a = b", &scope()).unwrap();
        assert!(!forces_at(&p, &f, &Env::new(), 0).unwrap());
        assert!(forces_at(&p, &f, &Env::new(), 1).unwrap());
        let dnr = parse("~~(a = a)", &scope()).unwrap();
        assert!(forces_at(&p, &dnr, &Env::new(), 0).unwrap());
    }

    #[test]
    fn reflexivity_is_forced_everywhere() {
        let p = fixture();
        let f = parse("a = a", &scope()).unwrap();
        for &u in p.space().opens() {
            let open = p.space().open(u).unwrap();
            let t = truth_value(&p, &f, &Env::new(), open).unwrap();
            assert_eq!(t.members(), u);
        }
    }

    #[test]
    fn truth_value_on_empty_open_is_empty() {
        let p = fixture();
        let f = parse("a = b", &scope()).unwrap();
        let t = truth_value(&p, &f, &Env::new(), p.space().empty_open()).unwrap();
        assert!(t.members().is_empty());
    }

    #[test]
    fn monotone_under_restriction() {
        let p = fixture();
        let formulas = ["a = b", "~(a = b)", "a = b | ~(a = b)", "~~(a = b)"];
        for text in formulas {
            let f = parse(text, &scope()).unwrap();
            let global = truth_value_global(&p, &f, &Env::new()).unwrap().members();
            for &v in p.space().opens() {
                let open = p.space().open(v).unwrap();
                let local = truth_value(&p, &f, &Env::new(), open).unwrap().members();
                assert_eq!(local, global.inter(v), "formula {text} on {v}");
            }
        }
    }

    #[test]
    fn quantifiers_over_declared_domains() {
        let p = fixture();
        let refl = parse("forall x in S . x = x", &scope()).unwrap();
        let t = truth_value_global(&p, &refl, &Env::new()).unwrap();
        assert_eq!(t.members(), p.space().full_set());

        // exists x . x = a holds everywhere (witness a itself).
        let ex = parse("exists x in S . x = a", &scope()).unwrap();
        let t = truth_value_global(&p, &ex, &Env::new()).unwrap();
        assert_eq!(t.members(), p.space().full_set());

        // forall x . x = a fails at 0 where a and b have distinct germs.
        let all = parse("forall x in S . x = a", &scope()).unwrap();
        let t = truth_value_global(&p, &all, &Env::new()).unwrap();
        assert_eq!(t.members(), PointSet::singleton(1));
    }

    #[test]
    fn unknown_domain_and_constant_error() {
        let p = fixture();
        let f = Formula::forall(
            "x",
            "Zed",
            Formula::Equals(Term::Var("x".into()), Term::Var("x".into())),
        );
        assert!(matches!(
            truth_value_global(&p, &f, &Env::new()),
            Err(Error::UnknownDomain(_))
        ));
        let g = Formula::Equals(Term::Const("zz".into()), Term::Const("zz".into()));
        assert!(matches!(
            truth_value_global(&p, &g, &Env::new()),
            Err(Error::UnknownConstant(_))
        ));
    }
}

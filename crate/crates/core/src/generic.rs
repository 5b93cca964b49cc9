//! Filters of opens, genericity, history filters, and the collapse of the
//! variable structure to classical models.
//!
//! On a finite space every filter is principal and the maximal proper
//! filters are exactly those generated by lattice atoms; both
//! characterizations are computed and cross-checked. The collapse along a
//! filter is the direct limit of sections modulo agreement on some member,
//! with relations holding when they hold on some member; evaluating a
//! formula in the collapse asks whether some member forces its Gödel
//! translation.

use crate::error::{Error, Result};
use crate::forcing::{self, Env, ForcingStructure, Presheaf, SectionRef};
use crate::formula::Formula;
use crate::quantum::{HermitianOperator, QuantumContext};
use crate::topology::{FiniteSpace, PointSet};
use crate::vset::{member_forced, VariableSet};
use std::collections::{BTreeMap, BTreeSet};

/// A filter of open sets: contains the full set, closed under intersection,
/// upward closed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OpenFilter<'a> {
    space: &'a FiniteSpace,
    members: BTreeSet<PointSet>,
}

impl<'a> OpenFilter<'a> {
    pub fn new<I>(space: &'a FiniteSpace, members: I) -> Result<OpenFilter<'a>>
    where
        I: IntoIterator<Item = PointSet>,
    {
        let members: BTreeSet<PointSet> = members.into_iter().collect();
        for &m in &members {
            if !space.is_open(m) {
                return Err(Error::InvalidFilter(format!(
                    "{} is not open",
                    space.set_label(m)
                )));
            }
        }
        if !members.contains(&space.full_set()) {
            return Err(Error::InvalidFilter(
                "the full set is not a member".into(),
            ));
        }
        let listing: Vec<PointSet> = members.iter().copied().collect();
        for (i, &u) in listing.iter().enumerate() {
            for &v in &listing[i..] {
                if !members.contains(&u.inter(v)) {
                    return Err(Error::InvalidFilter(format!(
                        "not closed under intersection: {} and {}",
                        space.set_label(u),
                        space.set_label(v)
                    )));
                }
            }
        }
        for &u in &listing {
            for &w in space.opens() {
                if u.is_subset(w) && !members.contains(&w) {
                    return Err(Error::InvalidFilter(format!(
                        "not upward closed: {} is missing above {}",
                        space.set_label(w),
                        space.set_label(u)
                    )));
                }
            }
        }
        Ok(OpenFilter { space, members })
    }

    /// The principal filter of an open: everything above it.
    pub fn principal(space: &'a FiniteSpace, generator: PointSet) -> Result<OpenFilter<'a>> {
        if !space.is_open(generator) {
            return Err(Error::InvalidFilter(format!(
                "{} is not open",
                space.set_label(generator)
            )));
        }
        Ok(OpenFilter {
            space,
            members: space
                .opens()
                .iter()
                .copied()
                .filter(|o| generator.is_subset(*o))
                .collect(),
        })
    }

    pub fn space(&self) -> &'a FiniteSpace {
        self.space
    }

    pub fn members(&self) -> impl Iterator<Item = PointSet> + '_ {
        self.members.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, open: PointSet) -> bool {
        self.members.contains(&open)
    }

    /// The intersection of all members; every finite filter is the
    /// principal filter of this open.
    pub fn core(&self) -> PointSet {
        self.members
            .iter()
            .fold(self.space.full_set(), |acc, &m| acc.inter(m))
    }

    pub fn is_proper(&self) -> bool {
        !self.members.contains(&PointSet::EMPTY)
    }

    /// Maximality among proper filters. Computed two ways — no proper
    /// extension exists, and the core is a lattice atom — which agree on
    /// every finite space.
    pub fn is_maximal(&self) -> bool {
        let by_extension = self.is_proper()
            && self.space.opens().iter().all(|&u| {
                self.members.contains(&u)
                    || self.members.iter().any(|&v| u.inter(v).is_empty())
            });
        let core = self.core();
        let by_atom = self
            .space
            .lattice_atoms()
            .iter()
            .any(|a| a.members() == core)
            && self.members.len()
                == self
                    .space
                    .opens()
                    .iter()
                    .filter(|o| core.is_subset(**o))
                    .count();
        assert_eq!(
            by_extension, by_atom,
            "maximality characterizations disagree"
        );
        by_extension
    }
}

/// All maximal filters of a finite space: principal filters whose
/// generator passes [`OpenFilter::is_maximal`].
pub fn enumerate_maximal_filters(space: &FiniteSpace) -> Vec<OpenFilter<'_>> {
    space
        .opens()
        .iter()
        .filter(|o| !o.is_empty())
        .map(|&o| OpenFilter::principal(space, o).expect("opens are open"))
        .filter(OpenFilter::is_maximal)
        .collect()
}

/// The history filter of an atom: all opens the atom belongs to (the opens
/// whose projection the atom's character maps to 1).
pub fn filter_at_history<'a>(ctx: &'a QuantumContext, atom: usize) -> Result<OpenFilter<'a>> {
    if atom >= ctx.atom_count() {
        return Err(Error::UnknownAtom(format!("#{atom}")));
    }
    OpenFilter::principal(ctx.space(), PointSet::singleton(atom))
}

/// One entry of a genericity suite: a closed formula with its environment.
pub struct SuiteEntry<E> {
    pub formula: Formula,
    pub env: Env<E>,
}

impl<E> SuiteEntry<E> {
    pub fn closed(formula: Formula) -> SuiteEntry<E> {
        SuiteEntry {
            formula,
            env: Env::new(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct GenericityEntryReport {
    pub formula: String,
    /// Condition (i): some member decides the formula. The witness carries
    /// the member and whether it forces the formula or its negation.
    pub decided: Option<(PointSet, bool)>,
    /// Condition (ii), existentials only: a member plus a domain witness
    /// forcing the matrix, when the existential is forced at all.
    pub witnessed: Option<(PointSet, usize)>,
    /// Whether condition (ii) applied (the formula is existential and is
    /// forced on some member).
    pub existential_applies: bool,
    pub pass: bool,
}

#[derive(Debug, Clone)]
pub struct GenericityReport {
    pub entries: Vec<GenericityEntryReport>,
}

impl GenericityReport {
    pub fn all_pass(&self) -> bool {
        self.entries.iter().all(|e| e.pass)
    }
}

/// Suite-wise genericity check: for every entry, (i) some member forces the
/// formula or its negation; for existential entries that are forced on some
/// member, (ii) some member carries a witness for the matrix.
pub fn genericity_check<S: ForcingStructure>(
    filter: &OpenFilter<'_>,
    suite: &[SuiteEntry<S::Elem>],
    structure: &S,
) -> Result<GenericityReport> {
    let mut entries = Vec::with_capacity(suite.len());
    for entry in suite {
        let formula = &entry.formula;
        let negated = Formula::not(formula.clone());
        let mut decided = None;
        for member in filter.members() {
            if eval_on(structure, formula, &entry.env, member)? {
                decided = Some((member, true));
                break;
            }
            if eval_on(structure, &negated, &entry.env, member)? {
                decided = Some((member, false));
                break;
            }
        }
        let mut existential_applies = false;
        let mut witnessed = None;
        if let Formula::Exists(var, domain, body) = formula {
            let forced_somewhere = filter
                .members()
                .map(|m| eval_on(structure, formula, &entry.env, m))
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .any(|b| b);
            if forced_somewhere {
                existential_applies = true;
                'search: for member in filter.members() {
                    let family = structure.domain_family(domain)?;
                    for (wi, witness) in family.into_iter().enumerate() {
                        if !member.is_subset(structure.elem_domain(&witness)) {
                            continue;
                        }
                        let mut env2 = entry.env.clone();
                        env2.insert(var.clone(), witness);
                        if eval_on(structure, body, &env2, member)? {
                            witnessed = Some((member, wi));
                            break 'search;
                        }
                    }
                }
            }
        }
        let pass = decided.is_some() && (!existential_applies || witnessed.is_some());
        entries.push(GenericityEntryReport {
            formula: formula.to_string(),
            decided,
            witnessed,
            existential_applies,
            pass,
        });
    }
    Ok(GenericityReport { entries })
}

fn eval_on<S: ForcingStructure>(
    structure: &S,
    formula: &Formula,
    env: &Env<S::Elem>,
    member: PointSet,
) -> Result<bool> {
    // Skip members the environment is not defined on; forcing there is not
    // meaningful for this entry.
    for elem in env.values() {
        if !member.is_subset(structure.elem_domain(elem)) {
            return Ok(false);
        }
    }
    forcing::forces_on(structure, formula, env, member)
}

#[derive(Debug, Clone)]
pub struct CollapseOutcome {
    pub holds: bool,
    /// A filter member forcing the Gödel translation, when one exists.
    pub witness: Option<PointSet>,
    /// Whether the filter is maximal; evaluation proceeds either way.
    pub filter_is_maximal: bool,
}

/// Truth in the collapsed classical model: some member of the filter forces
/// the Gödel translation of the formula.
pub fn collapse_eval<S: ForcingStructure>(
    filter: &OpenFilter<'_>,
    formula: &Formula,
    env: &Env<S::Elem>,
    structure: &S,
) -> Result<CollapseOutcome> {
    let translated = formula.godel_translate();
    let mut witness = None;
    for member in filter.members() {
        if eval_on(structure, &translated, env, member)? {
            witness = Some(member);
            break;
        }
    }
    Ok(CollapseOutcome {
        holds: witness.is_some(),
        witness,
        filter_is_maximal: filter.is_maximal(),
    })
}

/// The definite value of an observable in the collapsed universe of a
/// history: its character at the atom.
pub fn collapse_value(ctx: &QuantumContext, atom: usize, op: &HermitianOperator) -> Result<f64> {
    ctx.character_eval(atom, op)
}

/// A classical finite structure: germ classes, relations over class
/// indices, and constants.
#[derive(Debug, Clone)]
pub struct ClassicalStructure {
    pub elements: Vec<Vec<SectionRef>>,
    pub relations: BTreeMap<String, BTreeSet<Vec<usize>>>,
    pub constants: BTreeMap<String, usize>,
}

/// The direct limit of the presheaf along the filter: sections over members
/// modulo agreement on some member, relations holding when they hold on
/// some member, constants mapped to their classes.
pub fn collapse_structure(filter: &OpenFilter<'_>, p: &Presheaf) -> Result<ClassicalStructure> {
    if p.space() != filter.space() {
        return Err(Error::SpaceMismatch);
    }
    let mut germs: Vec<SectionRef> = Vec::new();
    for member in filter.members() {
        for id in p.section_ids(member) {
            germs.push(SectionRef::new(member, id.clone()));
        }
    }
    let equivalent = |a: &SectionRef, b: &SectionRef| -> bool {
        filter.members().any(|r| {
            r.is_subset(a.open)
                && r.is_subset(b.open)
                && p.restrict(a, r).expect("validated") == p.restrict(b, r).expect("validated")
        })
    };
    let mut classes: Vec<Vec<SectionRef>> = Vec::new();
    'next_germ: for germ in germs {
        for class in classes.iter_mut() {
            if equivalent(&germ, &class[0]) {
                class.push(germ);
                continue 'next_germ;
            }
        }
        classes.push(vec![germ]);
    }
    for class in classes.iter_mut() {
        class.sort();
    }
    classes.sort();
    let class_of = |sec: &SectionRef| -> usize {
        classes
            .iter()
            .position(|c| equivalent(sec, &c[0]))
            .expect("germ classes cover all sections over members")
    };

    // A tuple of classes is in the relation exactly when some member of the
    // filter carries representatives in the relation's table there.
    let mut relations: BTreeMap<String, BTreeSet<Vec<usize>>> = BTreeMap::new();
    let names: Vec<String> = p.relation_names().map(str::to_string).collect();
    for name in names {
        let mut tuples: BTreeSet<Vec<usize>> = BTreeSet::new();
        let Some(arity) = p.relation_arity(&name) else {
            relations.insert(name, tuples);
            continue;
        };
        for member in filter.members() {
            let ids = p.section_ids(member);
            if ids.is_empty() {
                continue;
            }
            let mut idx = vec![0usize; arity];
            loop {
                let tuple: Vec<String> = idx.iter().map(|&i| ids[i].clone()).collect();
                if p.relation_holds(&name, member, &tuple) {
                    tuples.insert(
                        tuple
                            .iter()
                            .map(|id| class_of(&SectionRef::new(member, id.clone())))
                            .collect(),
                    );
                }
                let mut k = 0;
                while k < arity {
                    idx[k] += 1;
                    if idx[k] < ids.len() {
                        break;
                    }
                    idx[k] = 0;
                    k += 1;
                }
                if k == arity {
                    break;
                }
            }
        }
        relations.insert(name, tuples);
    }

    let mut constants = BTreeMap::new();
    for (name, id) in p.constants() {
        let sec = SectionRef::new(p.space().full_set(), id.clone());
        constants.insert(name.clone(), class_of(&sec));
    }
    Ok(ClassicalStructure {
        elements: classes,
        relations,
        constants,
    })
}

/// Collapse of a finite family of variable sets along the filter: classes
/// modulo agreement on a member, membership holding when forced on a member.
#[derive(Debug, Clone)]
pub struct VsetCollapse {
    /// Classes as index lists into the input universe.
    pub classes: Vec<Vec<usize>>,
    /// Pairs (i, j) of class indices with class-i in class-j.
    pub membership: BTreeSet<(usize, usize)>,
}

pub fn collapse_vsets(
    filter: &OpenFilter<'_>,
    universe: &[VariableSet],
) -> Result<VsetCollapse> {
    let equivalent = |a: &VariableSet, b: &VariableSet| -> bool {
        filter.members().any(|r| {
            r.is_subset(a.domain()) && r.is_subset(b.domain()) && a.restrict(r) == b.restrict(r)
        })
    };
    let mut classes: Vec<Vec<usize>> = Vec::new();
    'next: for (i, v) in universe.iter().enumerate() {
        for class in classes.iter_mut() {
            if equivalent(v, &universe[class[0]]) {
                class.push(i);
                continue 'next;
            }
        }
        classes.push(vec![i]);
    }
    let mut membership = BTreeSet::new();
    for (ci, ca) in classes.iter().enumerate() {
        for (cj, cb) in classes.iter().enumerate() {
            let a = &universe[ca[0]];
            let b = &universe[cb[0]];
            let holds = filter.members().any(|u| {
                u.is_subset(a.domain())
                    && u.is_subset(b.domain())
                    && !u.is_empty()
                    && member_forced(a, b, u).unwrap_or(false)
            });
            if holds {
                membership.insert((ci, cj));
            }
        }
    }
    Ok(VsetCollapse {
        classes,
        membership,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::formula::{parse, SymbolScope};
    use crate::quantum::{build_context, Tolerances};

    fn scope() -> SymbolScope {
        SymbolScope::new(["a", "b"], ["S"])
    }

    #[test]
    fn filter_invariants_are_validated() {
        let sp = fixtures::sierpinski_space();
        // Missing the full set.
        assert!(matches!(
            OpenFilter::new(&sp, [PointSet::singleton(1)]),
            Err(Error::InvalidFilter(_))
        ));
        // Not upward closed is impossible to express here without also
        // breaking intersection closure; check intersection closure on the
        // Boolean square instead.
        let sq = FiniteSpace::power_set(vec!["x".into(), "y".into()]).unwrap();
        let err = OpenFilter::new(
            &sq,
            [
                sq.full_set(),
                PointSet::singleton(0),
                PointSet::singleton(1),
            ],
        )
        .unwrap_err();
        assert!(matches!(err, Error::InvalidFilter(_)));
    }

    #[test]
    fn maximality_on_boolean_and_sierpinski_spaces() {
        let sq = FiniteSpace::power_set(vec!["s1".into(), "s2".into()]).unwrap();
        let principal = OpenFilter::principal(&sq, PointSet::singleton(0)).unwrap();
        assert!(principal.is_maximal());
        let trivial = OpenFilter::principal(&sq, sq.full_set()).unwrap();
        assert!(!trivial.is_maximal());

        let sp = fixtures::sierpinski_space();
        let at_one = OpenFilter::principal(&sp, PointSet::singleton(1)).unwrap();
        assert!(at_one.is_maximal());
    }

    #[test]
    fn maximal_filters_enumerate_lattice_atoms() {
        for sp in [
            fixtures::sierpinski_space(),
            FiniteSpace::power_set(vec!["a".into(), "b".into(), "c".into()]).unwrap(),
        ] {
            let maximal = enumerate_maximal_filters(&sp);
            let atoms = sp.lattice_atoms();
            assert_eq!(maximal.len(), atoms.len());
            for (f, a) in maximal.iter().zip(&atoms) {
                assert_eq!(f.core(), a.members());
            }
        }
    }

    #[test]
    fn history_filters_are_maximal_and_count_supersets() {
        let a = HermitianOperator::diagonal("A", &[1.0, 1.0, -1.0, -1.0]);
        let b = HermitianOperator::diagonal("B", &[1.0, -1.0, 1.0, -1.0]);
        let ctx = build_context(vec![a, b], Tolerances::default()).unwrap();
        for atom in 0..ctx.atom_count() {
            let f = filter_at_history(&ctx, atom).unwrap();
            assert!(f.is_maximal());
            // all supersets of a singleton among 4 atoms
            assert_eq!(f.len(), 8);
        }
        assert!(matches!(
            filter_at_history(&ctx, 9),
            Err(Error::UnknownAtom(_))
        ));
    }

    #[test]
    fn genericity_fails_for_the_trivial_filter_on_the_fixture() {
        let p = fixtures::non_hausdorff();
        let space = p.space();
        let trivial = OpenFilter::principal(space, space.full_set()).unwrap();
        let suite = vec![SuiteEntry::closed(parse("a = b", &scope()).unwrap())];
        let report = genericity_check(&trivial, &suite, &p).unwrap();
        assert!(!report.all_pass());
        assert!(report.entries[0].decided.is_none());

        let maximal = OpenFilter::principal(space, PointSet::singleton(1)).unwrap();
        let report = genericity_check(&maximal, &suite, &p).unwrap();
        assert!(report.all_pass());
    }

    #[test]
    fn genericity_witnesses_existentials_on_maximal_filters() {
        let p = fixtures::non_hausdorff();
        let space = p.space();
        let maximal = OpenFilter::principal(space, PointSet::singleton(1)).unwrap();
        let suite = vec![
            SuiteEntry::closed(parse("exists x in S . x = a", &scope()).unwrap()),
            SuiteEntry::closed(parse("a = a", &scope()).unwrap()),
        ];
        let report = genericity_check(&maximal, &suite, &p).unwrap();
        assert!(report.all_pass(), "{report:?}");
        assert!(report.entries[0].existential_applies);
        assert!(report.entries[0].witnessed.is_some());
    }

    #[test]
    fn collapse_restores_excluded_middle_on_the_fixture() {
        let p = fixtures::non_hausdorff();
        let space = p.space();
        let filter = OpenFilter::principal(space, PointSet::singleton(1)).unwrap();
        let eq = parse("a = b", &scope()).unwrap();
        let em = parse("a = b | ~(a = b)", &scope()).unwrap();
        let outcome = collapse_eval(&filter, &eq, &Env::new(), &p).unwrap();
        assert!(outcome.holds);
        assert!(outcome.filter_is_maximal);
        let outcome = collapse_eval(&filter, &em, &Env::new(), &p).unwrap();
        assert!(outcome.holds);
        // Exactly one of the formula and its negation holds in the collapse.
        let neg = Formula::not(eq.clone());
        let pos = collapse_eval(&filter, &eq, &Env::new(), &p).unwrap().holds;
        let negv = collapse_eval(&filter, &neg, &Env::new(), &p).unwrap().holds;
        assert!(pos ^ negv);
    }

    #[test]
    fn collapse_structure_merges_sections_agreeing_on_the_core() {
        let p = fixtures::non_hausdorff();
        let space = p.space();
        let filter = OpenFilter::principal(space, PointSet::singleton(1)).unwrap();
        let c = collapse_structure(&filter, &p).unwrap();
        // a, b, and their common restriction collapse to one element.
        assert_eq!(c.elements.len(), 1);
        assert_eq!(c.constants["a"], c.constants["b"]);
    }

    #[test]
    fn collapse_structure_is_the_fiber_at_an_isolated_point() {
        let p = fixtures::double_gluing();
        let space = p.space();
        let filter = OpenFilter::principal(space, PointSet::singleton(0)).unwrap();
        let c = collapse_structure(&filter, &p).unwrap();
        // Γ({s1}) = {u1}; a and b both restrict to it: one class.
        assert_eq!(c.elements.len(), 1);
    }

    #[test]
    fn collapse_structure_on_trivial_filter_is_the_global_structure() {
        let p = fixtures::indiscrete_pair();
        let space = p.space();
        let filter = OpenFilter::principal(space, space.full_set()).unwrap();
        let c = collapse_structure(&filter, &p).unwrap();
        // Global sections a and b remain distinct.
        assert_eq!(c.elements.len(), 2);
    }

    #[test]
    fn collapse_vsets_identifies_restriction_equal_sets() {
        use crate::vset::{hat_embed, HfSet};
        let sp = fixtures::sierpinski_space();
        let full = sp.full_set();
        let one = PointSet::singleton(1);
        let filter = OpenFilter::principal(&sp, one).unwrap();
        let zero = HfSet::empty();
        let single = HfSet::from_members([zero.clone()]);
        let universe = vec![
            hat_embed(&zero, full, &sp, 3).unwrap(),
            hat_embed(&zero, one, &sp, 3).unwrap(),
            hat_embed(&single, full, &sp, 3).unwrap(),
        ];
        let collapse = collapse_vsets(&filter, &universe).unwrap();
        // The two empty-set hats agree on {1}; the singleton is separate.
        assert_eq!(collapse.classes.len(), 2);
        let empty_class = collapse
            .classes
            .iter()
            .position(|c| c.contains(&0))
            .unwrap();
        let single_class = collapse
            .classes
            .iter()
            .position(|c| c.contains(&2))
            .unwrap();
        assert!(collapse.classes[empty_class].contains(&1));
        assert!(collapse.membership.contains(&(empty_class, single_class)));
        assert!(!collapse.membership.contains(&(single_class, empty_class)));
    }
}

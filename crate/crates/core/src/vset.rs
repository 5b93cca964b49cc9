//! Bounded-rank cumulative hierarchy of variable sets over a finite space.
//!
//! A variable set over an open `U` maps every nonempty open `W` inside `U`
//! to a finite set of lower-rank variable sets over `W`, subject to
//! restriction closure and gluing (the hierarchy ranges over nonempty opens
//! only; forcing anything on the empty open is vacuous). Membership is forced literally: `f` belongs to `g`
//! on `U` when the restriction of `f` lives in `g`'s value at `U`. Equality
//! between variable sets is literal restricted-graph equality.

use crate::error::{Error, Result};
use crate::forcing::{self, Env, ForcingStructure};
use crate::formula::Formula;
use crate::topology::{FiniteSpace, PointSet};
use serde_json::{json, Value};
use std::collections::{BTreeMap, BTreeSet};

/// A hereditarily finite set, the classical side of the hat-embedding.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct HfSet(BTreeSet<HfSet>);

impl HfSet {
    pub fn empty() -> HfSet {
        HfSet::default()
    }

    pub fn from_members<I: IntoIterator<Item = HfSet>>(members: I) -> HfSet {
        HfSet(members.into_iter().collect())
    }

    pub fn members(&self) -> impl Iterator<Item = &HfSet> {
        self.0.iter()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn rank(&self) -> usize {
        self.0.iter().map(|m| m.rank() + 1).max().unwrap_or(0)
    }

    /// Every hereditarily finite set of rank at most `max_rank`
    /// (there are 1, 2, 4, 16, 65536, ... of them).
    pub fn all_of_rank_at_most(max_rank: usize) -> Vec<HfSet> {
        assert!(max_rank <= 3, "enumeration is doubly exponential");
        let mut current = vec![HfSet::empty()];
        for _ in 0..max_rank {
            let base = current;
            let mut next = Vec::with_capacity(1 << base.len());
            for code in 0u32..(1 << base.len()) {
                next.push(HfSet::from_members(
                    base.iter()
                        .enumerate()
                        .filter(|(i, _)| code >> i & 1 == 1)
                        .map(|(_, s)| s.clone()),
                ));
            }
            current = next;
        }
        current
    }
}

impl std::fmt::Display for HfSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{{")?;
        for (i, m) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{m}")?;
        }
        write!(f, "}}")
    }
}

/// An element of the cumulative hierarchy over some open of a finite space.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct VariableSet {
    domain: PointSet,
    graph: BTreeMap<PointSet, BTreeSet<VariableSet>>,
}

/// Outcome of [`VariableSet::validate`].
#[derive(Debug, Clone)]
pub enum ConditionWitness {
    /// Condition 1: a member's rank or domain does not fit the key.
    Shape { open: PointSet, detail: String },
    /// Condition 2: a member's restriction is missing below.
    Restriction {
        open: PointSet,
        smaller: PointSet,
        member: String,
    },
    /// Condition 3: a compatible family over a cover of `open` with no glue.
    Gluing {
        open: PointSet,
        cover: Vec<PointSet>,
        detail: String,
    },
}

impl VariableSet {
    /// Builds a variable set from its graph, checking only the structural
    /// shape (keys are exactly the nonempty opens inside the domain and
    /// members live over their key). Semantic conditions are checked by [`Self::validate`]
    /// so that deliberately broken graphs can be constructed and reported.
    pub fn new(
        domain: PointSet,
        graph: BTreeMap<PointSet, BTreeSet<VariableSet>>,
        space: &FiniteSpace,
    ) -> Result<VariableSet> {
        if !space.is_open(domain) {
            return Err(Error::MalformedVariableSet(format!(
                "domain {} is not open",
                space.set_label(domain)
            )));
        }
        for &w in space.opens() {
            if !w.is_empty() && w.is_subset(domain) && !graph.contains_key(&w) {
                return Err(Error::MalformedVariableSet(format!(
                    "graph is missing the open {}",
                    space.set_label(w)
                )));
            }
        }
        for (&w, members) in &graph {
            if w.is_empty() || !space.is_open(w) || !w.is_subset(domain) {
                return Err(Error::MalformedVariableSet(format!(
                    "graph key {} is not a nonempty open inside the domain",
                    space.set_label(w)
                )));
            }
            for m in members {
                if m.domain != w {
                    return Err(Error::MalformedVariableSet(format!(
                        "member over {} filed under {}",
                        space.set_label(m.domain),
                        space.set_label(w)
                    )));
                }
            }
        }
        Ok(VariableSet { domain, graph })
    }

    pub fn domain(&self) -> PointSet {
        self.domain
    }

    pub fn graph_at(&self, open: PointSet) -> &BTreeSet<VariableSet> {
        static EMPTY: std::sync::OnceLock<BTreeSet<VariableSet>> = std::sync::OnceLock::new();
        self.graph
            .get(&open)
            .unwrap_or_else(|| EMPTY.get_or_init(BTreeSet::new))
    }

    /// Hierarchy level: the empty-graph set sits at rank 1.
    pub fn rank(&self) -> usize {
        1 + self
            .graph
            .values()
            .flatten()
            .map(VariableSet::rank)
            .max()
            .unwrap_or(0)
    }

    /// Restriction to a smaller open: keep the graph below it.
    pub fn restrict(&self, to: PointSet) -> VariableSet {
        debug_assert!(to.is_subset(self.domain));
        VariableSet {
            domain: to,
            graph: self
                .graph
                .iter()
                .filter(|(w, _)| w.is_subset(to))
                .map(|(w, m)| (*w, m.clone()))
                .collect(),
        }
    }

    /// Checks the hierarchy conditions over the whole open lattice and
    /// returns the first violation: member shape (1), restriction closure
    /// (2), and gluing along every cover (3).
    pub fn validate(&self, space: &FiniteSpace) -> Option<ConditionWitness> {
        let opens_below: Vec<PointSet> = space
            .opens()
            .iter()
            .copied()
            .filter(|w| !w.is_empty() && w.is_subset(self.domain))
            .collect();
        // Condition 1: members recursively validate and sit strictly below
        // this set's rank (automatic for computed ranks, checked for shape).
        for &w in &opens_below {
            for m in self.graph_at(w) {
                if m.domain != w {
                    return Some(ConditionWitness::Shape {
                        open: w,
                        detail: format!(
                            "member over {} filed under {}",
                            space.set_label(m.domain),
                            space.set_label(w)
                        ),
                    });
                }
                if m.rank() >= self.rank() {
                    return Some(ConditionWitness::Shape {
                        open: w,
                        detail: "member rank not below the set's rank".into(),
                    });
                }
                if let Some(w) = m.validate(space) {
                    return Some(w);
                }
            }
        }
        // Condition 2: restrictions of members are members below.
        for &w in &opens_below {
            for &v in &opens_below {
                if !v.is_subset(w) || v == w {
                    continue;
                }
                for m in self.graph_at(w) {
                    if !self.graph_at(v).contains(&m.restrict(v)) {
                        return Some(ConditionWitness::Restriction {
                            open: w,
                            smaller: v,
                            member: format!("{m:?}"),
                        });
                    }
                }
            }
        }
        // Condition 3: compatible families over every cover glue.
        for &w in &opens_below {
            if w.is_empty() {
                continue;
            }
            let candidates: Vec<PointSet> = opens_below
                .iter()
                .copied()
                .filter(|c| !c.is_empty() && c.is_subset(w) && *c != w)
                .collect();
            if candidates.len() > 16 {
                // 2^|candidates| covers; beyond this the lattice is too
                // large for the exhaustive clause.
                continue;
            }
            for code in 1u32..(1 << candidates.len()) {
                let cover: Vec<PointSet> = candidates
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| code >> i & 1 == 1)
                    .map(|(_, &c)| c)
                    .collect();
                let union = cover
                    .iter()
                    .fold(PointSet::EMPTY, |acc, &c| acc.union(c));
                if union != w {
                    continue;
                }
                if let Some(witness) = self.search_unglued(w, &cover) {
                    return Some(witness);
                }
            }
        }
        None
    }

    fn search_unglued(&self, w: PointSet, cover: &[PointSet]) -> Option<ConditionWitness> {
        let mut family: Vec<VariableSet> = Vec::new();
        self.search_unglued_inner(w, cover, &mut family)
    }

    fn search_unglued_inner(
        &self,
        w: PointSet,
        cover: &[PointSet],
        family: &mut Vec<VariableSet>,
    ) -> Option<ConditionWitness> {
        let depth = family.len();
        if depth == cover.len() {
            let glued = self.graph_at(w).iter().any(|g| {
                family
                    .iter()
                    .zip(cover)
                    .all(|(m, &c)| g.restrict(c) == *m)
            });
            if !glued {
                return Some(ConditionWitness::Gluing {
                    open: w,
                    cover: cover.to_vec(),
                    detail: format!("compatible family of {} members", family.len()),
                });
            }
            return None;
        }
        for m in self.graph_at(cover[depth]) {
            let compatible = family.iter().zip(cover).all(|(f, &c)| {
                let overlap = c.inter(cover[depth]);
                f.restrict(overlap) == m.restrict(overlap)
            });
            if !compatible {
                continue;
            }
            family.push(m.clone());
            if let Some(w) = self.search_unglued_inner(w, cover, family) {
                return Some(w);
            }
            family.pop();
        }
        None
    }

    pub fn to_json(&self, space: &FiniteSpace) -> Value {
        let graph: serde_json::Map<String, Value> = self
            .graph
            .iter()
            .map(|(&w, members)| {
                (
                    space.set_key(w),
                    Value::Array(members.iter().map(|m| m.to_json(space)).collect()),
                )
            })
            .collect();
        json!({ "domain": space.set_key(self.domain), "graph": graph })
    }

    pub fn from_json(value: &Value, space: &FiniteSpace) -> Result<VariableSet> {
        let obj = value.as_object().ok_or_else(|| Error::Schema {
            pointer: "".into(),
            msg: "variable set must be an object".into(),
        })?;
        let domain = space.parse_set_key(obj.get("domain").and_then(Value::as_str).ok_or_else(
            || Error::Schema {
                pointer: "/domain".into(),
                msg: "missing domain key".into(),
            },
        )?)?;
        let mut graph: BTreeMap<PointSet, BTreeSet<VariableSet>> = BTreeMap::new();
        let graph_obj = obj
            .get("graph")
            .and_then(Value::as_object)
            .ok_or_else(|| Error::Schema {
                pointer: "/graph".into(),
                msg: "missing graph object".into(),
            })?;
        for (key, members) in graph_obj {
            let open = space.parse_set_key(key)?;
            let members = members.as_array().ok_or_else(|| Error::Schema {
                pointer: format!("/graph/{key}"),
                msg: "graph values must be arrays".into(),
            })?;
            let set = members
                .iter()
                .map(|m| VariableSet::from_json(m, space))
                .collect::<Result<BTreeSet<_>>>()?;
            graph.insert(open, set);
        }
        VariableSet::new(domain, graph, space)
    }
}

/// The constant embedding of a hereditarily finite set: its value at every
/// open is the embedding of its members there.
pub fn hat_embed(
    a: &HfSet,
    domain: PointSet,
    space: &FiniteSpace,
    rank_bound: usize,
) -> Result<VariableSet> {
    if a.rank() > rank_bound {
        return Err(Error::RankBound(a.rank(), rank_bound));
    }
    let mut graph: BTreeMap<PointSet, BTreeSet<VariableSet>> = BTreeMap::new();
    for &w in space.opens() {
        if w.is_empty() || !w.is_subset(domain) {
            continue;
        }
        let members = a
            .members()
            .map(|b| hat_embed(b, w, space, rank_bound))
            .collect::<Result<BTreeSet<_>>>()?;
        graph.insert(w, members);
    }
    VariableSet::new(domain, graph, space)
}

/// Membership forcing: `f` belongs to `g` on `u` exactly when the
/// restriction of `f` is a member of `g`'s value at `u`. On the empty open
/// everything is forced vacuously.
pub fn member_forced(f: &VariableSet, g: &VariableSet, u: PointSet) -> Result<bool> {
    if !u.is_subset(f.domain) || !u.is_subset(g.domain) {
        return Err(Error::IncompatibleDomains(
            format!("{:?}", f.domain),
            format!("{:?}", g.domain),
        ));
    }
    if u.is_empty() {
        return Ok(true);
    }
    Ok(g.graph_at(u).contains(&f.restrict(u)))
}

/// Variable sets exposed to the formula evaluator: equality is restricted
/// graph equality, membership is [`member_forced`] at the germ.
pub struct VsetStructure {
    space: FiniteSpace,
    constants: BTreeMap<String, VariableSet>,
    domains: BTreeMap<String, Vec<VariableSet>>,
}

impl VsetStructure {
    pub fn new(space: FiniteSpace) -> VsetStructure {
        VsetStructure {
            space,
            constants: BTreeMap::new(),
            domains: BTreeMap::new(),
        }
    }

    pub fn insert_constant(&mut self, name: &str, v: VariableSet) {
        self.constants.insert(name.to_string(), v);
    }

    pub fn declare_domain(&mut self, name: &str, members: Vec<VariableSet>) {
        self.domains.insert(name.to_string(), members);
    }
}

impl ForcingStructure for VsetStructure {
    type Elem = VariableSet;

    fn space(&self) -> &FiniteSpace {
        &self.space
    }

    fn elem_domain(&self, elem: &VariableSet) -> PointSet {
        elem.domain
    }

    fn germs_equal(&self, a: &VariableSet, b: &VariableSet, x: usize) -> bool {
        let n = self.space.minimal_neighborhood(x);
        a.restrict(n) == b.restrict(n)
    }

    fn membership_at(&self, a: &VariableSet, b: &VariableSet, x: usize) -> Result<bool> {
        let n = self.space.minimal_neighborhood(x);
        member_forced(a, b, n)
    }

    fn domain_family(&self, name: &str) -> Result<Vec<VariableSet>> {
        self.domains
            .get(name)
            .cloned()
            .ok_or_else(|| Error::UnknownDomain(name.to_string()))
    }

    fn constant(&self, name: &str) -> Result<VariableSet> {
        self.constants
            .get(name)
            .cloned()
            .ok_or_else(|| Error::UnknownConstant(name.to_string()))
    }
}

/// Comprehension: the variable set whose value at every open collects the
/// members of `z` there that force the formula on the whole open. The
/// formula's free slot is the variable `var`.
pub fn comprehend(
    z: &VariableSet,
    phi: &Formula,
    var: &str,
    structure: &VsetStructure,
) -> Result<VariableSet> {
    let space = &structure.space;
    let mut graph: BTreeMap<PointSet, BTreeSet<VariableSet>> = BTreeMap::new();
    for &w in space.opens() {
        if w.is_empty() || !w.is_subset(z.domain) {
            continue;
        }
        let mut selected = BTreeSet::new();
        for x in z.graph_at(w) {
            let mut env = Env::new();
            env.insert(var.to_string(), x.clone());
            if forcing::forces_on(structure, phi, &env, w)? {
                selected.insert(x.clone());
            }
        }
        graph.insert(w, selected);
    }
    let y = VariableSet::new(z.domain, graph, space)?;
    debug_assert!(y.validate(space).is_none());
    Ok(y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::formula::{parse, SymbolScope};

    const RANK_BOUND: usize = 3;

    fn space2() -> FiniteSpace {
        fixtures::sierpinski_space()
    }

    fn hf(members: &[HfSet]) -> HfSet {
        HfSet::from_members(members.iter().cloned())
    }

    #[test]
    fn hf_enumeration_counts() {
        assert_eq!(HfSet::all_of_rank_at_most(0).len(), 1);
        assert_eq!(HfSet::all_of_rank_at_most(1).len(), 2);
        assert_eq!(HfSet::all_of_rank_at_most(2).len(), 4);
        assert_eq!(HfSet::all_of_rank_at_most(3).len(), 16);
        assert!(HfSet::all_of_rank_at_most(3)
            .iter()
            .all(|s| s.rank() <= 3));
    }

    #[test]
    fn hat_embed_empty_set_everywhere_empty() {
        let sp = space2();
        let v = hat_embed(&HfSet::empty(), sp.full_set(), &sp, RANK_BOUND).unwrap();
        for &w in sp.opens() {
            assert!(v.graph_at(w).is_empty());
        }
        assert!(v.validate(&sp).is_none());
        assert_eq!(v.rank(), 1);
    }

    #[test]
    fn hat_embed_singleton_graph_shape() {
        let sp = space2();
        let one = hf(&[HfSet::empty()]);
        let v = hat_embed(&one, sp.full_set(), &sp, RANK_BOUND).unwrap();
        for &w in sp.opens() {
            if w.is_empty() {
                continue;
            }
            let expected = hat_embed(&HfSet::empty(), w, &sp, RANK_BOUND).unwrap();
            assert_eq!(v.graph_at(w).iter().collect::<Vec<_>>(), vec![&expected]);
        }
        // Restriction commutes with the embedding.
        let one_mask = PointSet::singleton(1);
        assert_eq!(
            v.restrict(one_mask),
            hat_embed(&one, one_mask, &sp, RANK_BOUND).unwrap()
        );
    }

    #[test]
    fn hat_embedding_is_injective_up_to_rank_3() {
        let sp = space2();
        let all = HfSet::all_of_rank_at_most(3);
        let embedded: Vec<VariableSet> = all
            .iter()
            .map(|a| hat_embed(a, sp.full_set(), &sp, RANK_BOUND).unwrap())
            .collect();
        for i in 0..embedded.len() {
            for j in i + 1..embedded.len() {
                assert_ne!(embedded[i], embedded[j], "{} vs {}", all[i], all[j]);
            }
        }
    }

    #[test]
    fn rank_bound_is_enforced() {
        let sp = space2();
        let mut deep = HfSet::empty();
        for _ in 0..4 {
            deep = hf(&[deep.clone()]);
        }
        assert!(matches!(
            hat_embed(&deep, sp.full_set(), &sp, RANK_BOUND),
            Err(Error::RankBound(4, RANK_BOUND))
        ));
    }

    #[test]
    fn member_forced_examples() {
        let sp = space2();
        let full = sp.full_set();
        let empty = hat_embed(&HfSet::empty(), full, &sp, RANK_BOUND).unwrap();
        let single = hat_embed(&hf(&[HfSet::empty()]), full, &sp, RANK_BOUND).unwrap();
        assert!(member_forced(&empty, &single, full).unwrap());
        assert!(!member_forced(&single, &empty, full).unwrap());
        // Restriction of a member is a member.
        assert!(member_forced(&empty, &single, PointSet::singleton(1)).unwrap());
    }

    #[test]
    fn broken_restriction_closure_is_witnessed() {
        let sp = space2();
        let full = sp.full_set();
        let one = PointSet::singleton(1);
        let empty_at = |w: PointSet| hat_embed(&HfSet::empty(), w, &sp, RANK_BOUND).unwrap();
        // Member over the full open whose restriction is missing below.
        let mut graph: BTreeMap<PointSet, BTreeSet<VariableSet>> = BTreeMap::new();
        graph.insert(full, [empty_at(full)].into());
        graph.insert(one, BTreeSet::new());
        let v = VariableSet::new(full, graph, &sp).unwrap();
        match v.validate(&sp) {
            Some(ConditionWitness::Restriction { open, smaller, .. }) => {
                assert_eq!(open, full);
                assert!(smaller.is_subset(full));
            }
            other => panic!("expected a restriction witness, got {other:?}"),
        }
    }

    #[test]
    fn broken_gluing_is_witnessed() {
        // Discrete 2-point space: singleton values hold the empty-set hat,
        // but the full open refuses the glue.
        let sp = FiniteSpace::power_set(vec!["s1".into(), "s2".into()]).unwrap();
        let full = sp.full_set();
        let s1 = PointSet::singleton(0);
        let s2 = PointSet::singleton(1);
        let empty_at = |w: PointSet| hat_embed(&HfSet::empty(), w, &sp, RANK_BOUND).unwrap();
        let mut graph: BTreeMap<PointSet, BTreeSet<VariableSet>> = BTreeMap::new();
        graph.insert(full, BTreeSet::new());
        graph.insert(s1, [empty_at(s1)].into());
        graph.insert(s2, [empty_at(s2)].into());
        let v = VariableSet::new(full, graph, &sp).unwrap();
        match v.validate(&sp) {
            Some(ConditionWitness::Gluing { open, .. }) => assert_eq!(open, full),
            other => panic!("expected a gluing witness, got {other:?}"),
        }
    }

    #[test]
    fn empty_set_law_is_forced_on_every_open() {
        let sp = space2();
        let full = sp.full_set();
        let empty_hat = hat_embed(&HfSet::empty(), full, &sp, RANK_BOUND).unwrap();
        let family: Vec<VariableSet> = HfSet::all_of_rank_at_most(2)
            .iter()
            .map(|a| hat_embed(a, full, &sp, RANK_BOUND).unwrap())
            .collect();
        let mut st = VsetStructure::new(sp.clone());
        st.insert_constant("empty", empty_hat);
        st.declare_domain("D", family);
        let phi = parse(
            "forall y in D . ~(y in empty)",
            &SymbolScope::new(["empty"], ["D"]),
        )
        .unwrap();
        for &u in sp.opens() {
            assert!(forcing::forces_on(&st, &phi, &Env::new(), u).unwrap());
        }
    }

    #[test]
    fn comprehension_tautology_and_contradiction() {
        let sp = space2();
        let full = sp.full_set();
        let z = hat_embed(
            &hf(&[HfSet::empty(), hf(&[HfSet::empty()])]),
            full,
            &sp,
            RANK_BOUND,
        )
        .unwrap();
        let st = VsetStructure::new(sp.clone());
        let scope = SymbolScope::new(["x"], [] as [&str; 0]);
        let taut = parse("x = x", &scope).unwrap().promote_const_to_var("x");
        let contra = parse("~(x = x)", &scope).unwrap().promote_const_to_var("x");
        let y = comprehend(&z, &taut, "x", &st).unwrap();
        assert_eq!(y, z);
        let n = comprehend(&z, &contra, "x", &st).unwrap();
        for &w in sp.opens() {
            assert!(n.graph_at(w).is_empty());
        }
    }

    #[test]
    fn comprehension_selects_forced_nonempty_members() {
        // z = hat {0, 1} (von Neumann style: {empty, {empty}}); the formula
        // "some member of the domain belongs to x" picks out {empty}.
        let sp = space2();
        let full = sp.full_set();
        let zero = HfSet::empty();
        let one = hf(&[zero.clone()]);
        let z = hat_embed(&hf(&[zero.clone(), one.clone()]), full, &sp, RANK_BOUND).unwrap();
        let mut st = VsetStructure::new(sp.clone());
        // Candidate witnesses on every open: the hats of the empty set.
        let witnesses: Vec<VariableSet> = sp
            .opens()
            .iter()
            .filter(|w| !w.is_empty())
            .map(|&w| hat_embed(&zero, w, &sp, RANK_BOUND).unwrap())
            .collect();
        st.declare_domain("W", witnesses);
        let scope = SymbolScope::new(["x"], ["W"]);
        let phi = parse("exists y in W . y in x", &scope)
            .unwrap()
            .promote_const_to_var("x");
        let y = comprehend(&z, &phi, "x", &st).unwrap();
        for &w in sp.opens() {
            if w.is_empty() {
                continue;
            }
            let expected = hat_embed(&one, w, &sp, RANK_BOUND).unwrap();
            assert_eq!(
                y.graph_at(w).iter().collect::<Vec<_>>(),
                vec![&expected],
                "at {}",
                sp.set_label(w)
            );
        }
        assert!(y.validate(&sp).is_none());
        // Comprehension biconditional, exhaustively over the open lattice.
        for &w in sp.opens() {
            for x in z.graph_at(w) {
                let mut env = Env::new();
                env.insert("x".to_string(), x.clone());
                let forced = forcing::forces_on(&st, &phi, &env, w).unwrap();
                assert_eq!(
                    member_forced(x, &y, w).unwrap(),
                    member_forced(x, &z, w).unwrap() && forced
                );
            }
        }
    }

    #[test]
    fn json_round_trip() {
        let sp = space2();
        let v = hat_embed(
            &hf(&[HfSet::empty(), hf(&[HfSet::empty()])]),
            sp.full_set(),
            &sp,
            RANK_BOUND,
        )
        .unwrap();
        let json = v.to_json(&sp);
        let back = VariableSet::from_json(&json, &sp).unwrap();
        assert_eq!(back, v);
    }
}

//! Presheaves of finite structures over a finite space.
//!
//! Sections are opaque identifiers per open; restriction maps, relation
//! tables, named constants, and declared quantifier domains complete the
//! structure. Construction validates the presheaf laws (identity and
//! composition of restrictions) and monotonicity of relation membership.

use super::ForcingStructure;
use crate::error::{Error, Result};
use crate::formula::Formula;
use crate::topology::{FiniteSpace, PointSet};
use num_rational::BigRational;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::collections::{BTreeMap, BTreeSet};

/// A section of a presheaf: an identifier living over an open domain.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct SectionRef {
    pub open: PointSet,
    pub id: String,
}

impl SectionRef {
    pub fn new(open: PointSet, id: impl Into<String>) -> SectionRef {
        SectionRef {
            open,
            id: id.into(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Presheaf {
    space: FiniteSpace,
    sections: BTreeMap<PointSet, Vec<String>>,
    /// (U, V, id over U) -> id over V, stored for V strictly below U.
    restrictions: BTreeMap<(PointSet, PointSet, String), String>,
    relations: BTreeMap<String, BTreeMap<PointSet, BTreeSet<Vec<String>>>>,
    constants: BTreeMap<String, String>,
    domains: BTreeMap<String, Vec<SectionRef>>,
}

pub struct PresheafBuilder {
    space: FiniteSpace,
    sections: BTreeMap<PointSet, Vec<String>>,
    restrictions: BTreeMap<(PointSet, PointSet, String), String>,
    relations: BTreeMap<String, BTreeMap<PointSet, BTreeSet<Vec<String>>>>,
    constants: BTreeMap<String, String>,
    domains: BTreeMap<String, Vec<SectionRef>>,
}

impl PresheafBuilder {
    pub fn new(space: FiniteSpace) -> PresheafBuilder {
        PresheafBuilder {
            space,
            sections: BTreeMap::new(),
            restrictions: BTreeMap::new(),
            relations: BTreeMap::new(),
            constants: BTreeMap::new(),
            domains: BTreeMap::new(),
        }
    }

    pub fn space(&self) -> &FiniteSpace {
        &self.space
    }

    pub fn sections<I, S>(&mut self, open: PointSet, ids: I) -> &mut Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.sections
            .entry(open)
            .or_default()
            .extend(ids.into_iter().map(Into::into));
        self
    }

    pub fn restriction(
        &mut self,
        from: PointSet,
        to: PointSet,
        id: impl Into<String>,
        image: impl Into<String>,
    ) -> &mut Self {
        self.restrictions
            .insert((from, to, id.into()), image.into());
        self
    }

    pub fn relation<I, S>(&mut self, name: &str, open: PointSet, tuple: I) -> &mut Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.relations
            .entry(name.to_string())
            .or_default()
            .entry(open)
            .or_default()
            .insert(tuple.into_iter().map(Into::into).collect());
        self
    }

    pub fn constant(&mut self, name: &str, id: impl Into<String>) -> &mut Self {
        self.constants.insert(name.to_string(), id.into());
        self
    }

    pub fn domain<I>(&mut self, name: &str, members: I) -> &mut Self
    where
        I: IntoIterator<Item = SectionRef>,
    {
        self.domains
            .entry(name.to_string())
            .or_default()
            .extend(members);
        self
    }

    /// Validates the presheaf laws and produces the presheaf.
    pub fn build(self) -> Result<Presheaf> {
        let mut sections = self.sections;
        for &open in self.space.opens() {
            sections.entry(open).or_default();
        }
        for (open, ids) in &sections {
            if !self.space.is_open(*open) {
                return Err(Error::MalformedPresheaf(format!(
                    "sections declared over non-open {}",
                    self.space.set_label(*open)
                )));
            }
            let mut seen = BTreeSet::new();
            for id in ids {
                if !seen.insert(id) {
                    return Err(Error::MalformedPresheaf(format!(
                        "duplicate section id `{id}` over {}",
                        self.space.set_label(*open)
                    )));
                }
            }
        }
        let p = Presheaf {
            space: self.space,
            sections,
            restrictions: self.restrictions,
            relations: self.relations,
            constants: self.constants,
            domains: self.domains,
        };
        p.validate()?;
        Ok(p)
    }
}

impl Presheaf {
    pub fn space(&self) -> &FiniteSpace {
        &self.space
    }

    pub fn section_ids(&self, open: PointSet) -> &[String] {
        self.sections
            .get(&open)
            .map(Vec::as_slice)
            .unwrap_or_default()
    }

    pub fn section(&self, open: PointSet, id: &str) -> Result<SectionRef> {
        if self.section_ids(open).iter().any(|s| s == id) {
            Ok(SectionRef::new(open, id))
        } else {
            Err(Error::SectionUndefined {
                id: id.to_string(),
                open: self.space.set_label(open),
            })
        }
    }

    pub fn constants(&self) -> &BTreeMap<String, String> {
        &self.constants
    }

    pub fn domains(&self) -> &BTreeMap<String, Vec<SectionRef>> {
        &self.domains
    }

    pub fn relation_names(&self) -> impl Iterator<Item = &str> {
        self.relations.keys().map(String::as_str)
    }

    /// Arity of a declared relation, when any tuple exists.
    pub fn relation_arity(&self, name: &str) -> Option<usize> {
        self.relations
            .get(name)?
            .values()
            .flat_map(|tuples| tuples.iter())
            .map(Vec::len)
            .next()
    }

    /// Whether the tuple is in the relation's table at the open.
    pub fn relation_holds(&self, name: &str, open: PointSet, tuple: &[String]) -> bool {
        self.relations
            .get(name)
            .and_then(|per_open| per_open.get(&open))
            .is_some_and(|set| set.contains(&tuple.to_vec()))
    }

    /// Restriction of a section to a smaller open.
    pub fn restrict(&self, sec: &SectionRef, to: PointSet) -> Result<SectionRef> {
        if to == sec.open {
            return Ok(sec.clone());
        }
        if !to.is_subset(sec.open) || !self.space.is_open(to) {
            return Err(Error::MalformedPresheaf(format!(
                "cannot restrict `{}` from {} to {}",
                sec.id,
                self.space.set_label(sec.open),
                self.space.set_label(to)
            )));
        }
        self.restrictions
            .get(&(sec.open, to, sec.id.clone()))
            .map(|image| SectionRef::new(to, image.clone()))
            .ok_or_else(|| {
                Error::MalformedPresheaf(format!(
                    "missing restriction of `{}` from {} to {}",
                    sec.id,
                    self.space.set_label(sec.open),
                    self.space.set_label(to)
                ))
            })
    }

    fn validate(&self) -> Result<()> {
        let opens = self.space.opens();
        // Restriction totality and target membership.
        for &u in opens {
            for id in self.section_ids(u) {
                let sec = SectionRef::new(u, id.clone());
                for &v in opens {
                    if v != u && v.is_subset(u) {
                        let img = self.restrict(&sec, v)?;
                        if !self.section_ids(v).contains(&img.id) {
                            return Err(Error::MalformedPresheaf(format!(
                                "restriction image `{}` of `{id}` is not a section over {}",
                                img.id,
                                self.space.set_label(v)
                            )));
                        }
                    }
                }
            }
        }
        // Composition: restricting in two steps equals restricting directly.
        for &u in opens {
            for id in self.section_ids(u) {
                let sec = SectionRef::new(u, id.clone());
                for &v in opens {
                    if !v.is_subset(u) || v == u {
                        continue;
                    }
                    let via = self.restrict(&sec, v)?;
                    for &w in opens {
                        if !w.is_subset(v) || w == v {
                            continue;
                        }
                        let two_step = self.restrict(&via, w)?;
                        let direct = self.restrict(&sec, w)?;
                        if two_step != direct {
                            return Err(Error::MalformedPresheaf(format!(
                                "restriction of `{id}` from {} to {} disagrees with the \
                                 composite through {}",
                                self.space.set_label(u),
                                self.space.set_label(w),
                                self.space.set_label(v)
                            )));
                        }
                    }
                }
            }
        }
        // Relation arity and monotonicity under restriction.
        for (name, per_open) in &self.relations {
            let mut arity = None;
            for (&u, tuples) in per_open {
                if !self.space.is_open(u) {
                    return Err(Error::MalformedPresheaf(format!(
                        "relation `{name}` declared over non-open {}",
                        self.space.set_label(u)
                    )));
                }
                for tuple in tuples {
                    match arity {
                        None => arity = Some(tuple.len()),
                        Some(a) if a == tuple.len() => {}
                        Some(a) => {
                            return Err(Error::MalformedPresheaf(format!(
                                "relation `{name}` mixes arities {a} and {}",
                                tuple.len()
                            )))
                        }
                    }
                    for id in tuple {
                        if !self.section_ids(u).iter().any(|s| s == id) {
                            return Err(Error::MalformedPresheaf(format!(
                                "relation `{name}` over {} mentions unknown section `{id}`",
                                self.space.set_label(u)
                            )));
                        }
                    }
                    for &v in opens {
                        if v == u || !v.is_subset(u) {
                            continue;
                        }
                        let restricted: Vec<String> = tuple
                            .iter()
                            .map(|id| {
                                self.restrict(&SectionRef::new(u, id.clone()), v)
                                    .map(|s| s.id)
                            })
                            .collect::<Result<_>>()?;
                        let present = per_open
                            .get(&v)
                            .is_some_and(|set| set.contains(&restricted));
                        if !present {
                            return Err(Error::MalformedPresheaf(format!(
                                "relation `{name}` is not preserved when restricting \
                                 ({}) from {} to {}",
                                tuple.join(","),
                                self.space.set_label(u),
                                self.space.set_label(v)
                            )));
                        }
                    }
                }
            }
        }
        // Constants are global sections.
        let full = self.space.full_set();
        for (name, id) in &self.constants {
            if !self.section_ids(full).iter().any(|s| s == id) {
                return Err(Error::MalformedPresheaf(format!(
                    "constant `{name}` refers to unknown global section `{id}`"
                )));
            }
        }
        // Domain families reference existing sections.
        for (name, members) in &self.domains {
            for m in members {
                self.section(m.open, &m.id).map_err(|_| {
                    Error::MalformedPresheaf(format!(
                        "domain `{name}` mentions unknown section `{}` over {}",
                        m.id,
                        self.space.set_label(m.open)
                    ))
                })?;
            }
        }
        Ok(())
    }

    /// Exactness: every compatible family of sections over every open cover
    /// glues uniquely. Covers are families of nonempty opens; on a finite
    /// space it suffices to check the canonical cover of each open by the
    /// minimal neighborhoods of its points, which is what the witness
    /// reports on failure.
    pub fn is_exact(&self) -> ExactnessReport {
        for &u in self.space.opens() {
            if u.is_empty() {
                continue;
            }
            let mut cover: Vec<PointSet> = u
                .iter()
                .map(|x| self.space.minimal_neighborhood(x))
                .collect();
            cover.sort_by(|a, b| a.canonical_cmp(*b));
            cover.dedup();

            // Uniqueness: two distinct sections over u with identical
            // restrictions along the cover are two gluings of one family.
            let ids = self.section_ids(u);
            for (i, a) in ids.iter().enumerate() {
                for b in &ids[i + 1..] {
                    let sa = SectionRef::new(u, a.clone());
                    let sb = SectionRef::new(u, b.clone());
                    let agree = cover.iter().all(|&n| {
                        self.restrict(&sa, n).expect("validated").id
                            == self.restrict(&sb, n).expect("validated").id
                    });
                    if agree {
                        let family = cover
                            .iter()
                            .map(|&n| self.restrict(&sa, n).expect("validated"))
                            .collect();
                        return ExactnessReport {
                            exact: false,
                            witness: Some(ExactnessWitness {
                                open: u,
                                cover,
                                family,
                                problem: ExactnessProblem::MultipleGluings(a.clone(), b.clone()),
                            }),
                        };
                    }
                }
            }

            // Existence: every compatible family over the canonical cover
            // must come from a section over u.
            let mut family: Vec<SectionRef> = Vec::new();
            if let Some(witness) = self.search_unglued_family(u, &cover, &mut family, 0) {
                return ExactnessReport {
                    exact: false,
                    witness: Some(witness),
                };
            }
        }
        ExactnessReport {
            exact: true,
            witness: None,
        }
    }

    fn search_unglued_family(
        &self,
        u: PointSet,
        cover: &[PointSet],
        family: &mut Vec<SectionRef>,
        depth: usize,
    ) -> Option<ExactnessWitness> {
        if depth == cover.len() {
            let glues = self
                .section_ids(u)
                .iter()
                .filter(|id| {
                    let sec = SectionRef::new(u, (*id).clone());
                    family
                        .iter()
                        .zip(cover)
                        .all(|(f, &n)| self.restrict(&sec, n).expect("validated") == *f)
                })
                .count();
            if glues == 0 {
                return Some(ExactnessWitness {
                    open: u,
                    cover: cover.to_vec(),
                    family: family.clone(),
                    problem: ExactnessProblem::NoGluing,
                });
            }
            return None;
        }
        let n = cover[depth];
        for id in self.section_ids(n) {
            let candidate = SectionRef::new(n, id.clone());
            let compatible = family.iter().zip(cover).all(|(f, &m)| {
                let overlap = m.inter(n);
                self.restrict(f, overlap).expect("validated")
                    == self.restrict(&candidate, overlap).expect("validated")
            });
            if !compatible {
                continue;
            }
            family.push(candidate);
            if let Some(w) = self.search_unglued_family(u, cover, family, depth + 1) {
                return Some(w);
            }
            family.pop();
        }
        None
    }

    /// Checks that the formula's named constants, domains, and relations all
    /// resolve in this presheaf. Used by the CLI for early diagnostics.
    pub fn check_formula_symbols(&self, f: &Formula) -> Result<()> {
        match f {
            Formula::Relation(name, _) if !self.relations.contains_key(name) => {
                Err(Error::UnknownRelation(name.clone()))
            }
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                self.check_formula_symbols(a)?;
                self.check_formula_symbols(b)
            }
            Formula::Not(a) => self.check_formula_symbols(a),
            Formula::Forall(_, d, body) | Formula::Exists(_, d, body) => {
                if !self.domains.contains_key(d) {
                    return Err(Error::UnknownDomain(d.clone()));
                }
                self.check_formula_symbols(body)
            }
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExactnessProblem {
    /// A compatible family with no gluing.
    NoGluing,
    /// Two distinct sections gluing the same family.
    MultipleGluings(String, String),
}

#[derive(Debug, Clone)]
pub struct ExactnessWitness {
    pub open: PointSet,
    pub cover: Vec<PointSet>,
    pub family: Vec<SectionRef>,
    pub problem: ExactnessProblem,
}

#[derive(Debug, Clone)]
pub struct ExactnessReport {
    pub exact: bool,
    pub witness: Option<ExactnessWitness>,
}

impl ForcingStructure for Presheaf {
    type Elem = SectionRef;

    fn space(&self) -> &FiniteSpace {
        &self.space
    }

    fn elem_domain(&self, elem: &SectionRef) -> PointSet {
        elem.open
    }

    fn germs_equal(&self, a: &SectionRef, b: &SectionRef, x: usize) -> bool {
        let n = self.space.minimal_neighborhood(x);
        self.restrict(a, n).expect("validated presheaf").id
            == self.restrict(b, n).expect("validated presheaf").id
    }

    fn relation_at(&self, name: &str, args: &[SectionRef], x: usize) -> Result<bool> {
        let per_open = self
            .relations
            .get(name)
            .ok_or_else(|| Error::UnknownRelation(name.to_string()))?;
        let n = self.space.minimal_neighborhood(x);
        let tuple: Vec<String> = args
            .iter()
            .map(|a| self.restrict(a, n).map(|s| s.id))
            .collect::<Result<_>>()?;
        Ok(per_open.get(&n).is_some_and(|set| set.contains(&tuple)))
    }

    fn domain_family(&self, name: &str) -> Result<Vec<SectionRef>> {
        self.domains
            .get(name)
            .cloned()
            .ok_or_else(|| Error::UnknownDomain(name.to_string()))
    }

    fn constant(&self, name: &str) -> Result<SectionRef> {
        let id = self
            .constants
            .get(name)
            .ok_or_else(|| Error::UnknownConstant(name.to_string()))?;
        Ok(SectionRef::new(self.space.full_set(), id.clone()))
    }

    fn rational_elem(&self, _q: &BigRational) -> Result<SectionRef> {
        Err(Error::UnsupportedAtom("rational literal"))
    }
}

// -- JSON schema ------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct SectionRefRepr {
    open: String,
    section: String,
}

#[derive(Serialize, Deserialize)]
struct PresheafRepr {
    space: FiniteSpace,
    sections: BTreeMap<String, Vec<String>>,
    restrictions: BTreeMap<String, BTreeMap<String, BTreeMap<String, String>>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    relations: BTreeMap<String, BTreeMap<String, Vec<Vec<String>>>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    constants: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    domains: BTreeMap<String, Vec<SectionRefRepr>>,
}

impl Serialize for Presheaf {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let space = &self.space;
        let sections = self
            .sections
            .iter()
            .map(|(&o, ids)| (space.set_key(o), ids.clone()))
            .collect();
        let mut restrictions: BTreeMap<String, BTreeMap<String, BTreeMap<String, String>>> =
            BTreeMap::new();
        for ((from, to, id), image) in &self.restrictions {
            restrictions
                .entry(space.set_key(*from))
                .or_default()
                .entry(space.set_key(*to))
                .or_default()
                .insert(id.clone(), image.clone());
        }
        let relations = self
            .relations
            .iter()
            .map(|(name, per_open)| {
                let per = per_open
                    .iter()
                    .map(|(&o, tuples)| {
                        (space.set_key(o), tuples.iter().cloned().collect::<Vec<_>>())
                    })
                    .collect();
                (name.clone(), per)
            })
            .collect();
        let domains = self
            .domains
            .iter()
            .map(|(name, members)| {
                let reprs = members
                    .iter()
                    .map(|m| SectionRefRepr {
                        open: space.set_key(m.open),
                        section: m.id.clone(),
                    })
                    .collect();
                (name.clone(), reprs)
            })
            .collect();
        PresheafRepr {
            space: self.space.clone(),
            sections,
            restrictions,
            relations,
            constants: self.constants.clone(),
            domains,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Presheaf {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = PresheafRepr::deserialize(deserializer)?;
        let space = repr.space;
        let mut b = PresheafBuilder::new(space);
        let key = |s: &PresheafBuilder, k: &str| {
            s.space()
                .parse_set_key(k)
                .map_err(|e| D::Error::custom(format!("bad open key `{k}`: {e}")))
        };
        for (k, ids) in &repr.sections {
            let open = key(&b, k)?;
            b.sections(open, ids.clone());
        }
        for (from_k, per_to) in &repr.restrictions {
            let from = key(&b, from_k)?;
            for (to_k, map) in per_to {
                let to = key(&b, to_k)?;
                for (id, image) in map {
                    b.restriction(from, to, id.clone(), image.clone());
                }
            }
        }
        for (name, per_open) in &repr.relations {
            for (k, tuples) in per_open {
                let open = key(&b, k)?;
                for tuple in tuples {
                    b.relation(name, open, tuple.clone());
                }
            }
        }
        for (name, id) in &repr.constants {
            b.constant(name, id.clone());
        }
        for (name, members) in &repr.domains {
            let refs = members
                .iter()
                .map(|m| Ok(SectionRef::new(key(&b, &m.open)?, m.section.clone())))
                .collect::<std::result::Result<Vec<_>, D::Error>>()?;
            b.domain(name, refs);
        }
        b.build().map_err(D::Error::custom)
    }
}

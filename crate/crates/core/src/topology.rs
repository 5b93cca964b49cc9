//! Finite topological spaces and the Heyting algebra of their open sets.
//!
//! Points are indexed 0..n and subsets are bit patterns over those indices.
//! A [`FiniteSpace`] validates at construction that its opens form a genuine
//! topology (empty and full sets present, closure under union and
//! intersection), so every downstream consumer can assume one.

use crate::error::{Error, Result};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// Hard cap on point count so subsets fit in a `u64`.
pub const MAX_POINTS: usize = 64;

/// A subset of the points of a space, encoded as a bit pattern.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct PointSet(pub u64);

impl PointSet {
    pub const EMPTY: PointSet = PointSet(0);

    pub fn full(n: usize) -> PointSet {
        debug_assert!(n <= MAX_POINTS);
        if n == 64 {
            PointSet(u64::MAX)
        } else {
            PointSet((1u64 << n) - 1)
        }
    }

    pub fn singleton(i: usize) -> PointSet {
        PointSet(1u64 << i)
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(indices: I) -> PointSet {
        let mut bits = 0u64;
        for i in indices {
            bits |= 1u64 << i;
        }
        PointSet(bits)
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 & (1u64 << i) != 0
    }

    pub fn union(self, other: PointSet) -> PointSet {
        PointSet(self.0 | other.0)
    }

    pub fn inter(self, other: PointSet) -> PointSet {
        PointSet(self.0 & other.0)
    }

    pub fn minus(self, other: PointSet) -> PointSet {
        PointSet(self.0 & !other.0)
    }

    pub fn is_subset(self, other: PointSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn card(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let i = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(i)
            }
        })
    }

    /// Canonical order: cardinality first, then lexicographic on the
    /// ascending index sequence. Used everywhere a deterministic listing of
    /// subsets is required.
    pub fn canonical_cmp(self, other: PointSet) -> std::cmp::Ordering {
        use std::cmp::Ordering;
        match self.card().cmp(&other.card()) {
            Ordering::Equal => {}
            ord => return ord,
        }
        if self == other {
            return Ordering::Equal;
        }
        // With equal cardinality, the set containing the lowest differing
        // index comes first in index-sequence lexicographic order.
        let diff = self.0 ^ other.0;
        let low = diff.trailing_zeros() as usize;
        if self.contains(low) {
            Ordering::Less
        } else {
            Ordering::Greater
        }
    }
}

impl fmt::Display for PointSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, i) in self.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}

/// A finite topological space: ordered point labels plus a validated set of
/// opens.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteSpace {
    points: Vec<String>,
    point_index: BTreeMap<String, usize>,
    opens: Vec<PointSet>,
    open_set: BTreeSet<PointSet>,
    min_neigh: Vec<PointSet>,
}

impl FiniteSpace {
    /// Builds a space from point labels and opens, validating the topology
    /// axioms. Fails eagerly with a witness pair on a closure violation.
    pub fn new<I>(points: Vec<String>, opens: I) -> Result<FiniteSpace>
    where
        I: IntoIterator<Item = PointSet>,
    {
        let n = points.len();
        if n > MAX_POINTS {
            return Err(Error::TooManyPoints(n, MAX_POINTS));
        }
        let mut point_index = BTreeMap::new();
        for (i, p) in points.iter().enumerate() {
            if point_index.insert(p.clone(), i).is_some() {
                return Err(Error::DuplicatePoint(p.clone()));
            }
        }
        let full = PointSet::full(n);
        let open_set: BTreeSet<PointSet> = opens.into_iter().collect();
        for &o in &open_set {
            if !o.is_subset(full) {
                return Err(Error::UnknownPoint(format!(
                    "open {o} mentions point indices outside 0..{n}"
                )));
            }
        }
        if !open_set.contains(&PointSet::EMPTY) || !open_set.contains(&full) {
            return Err(Error::MissingBoundaryOpens);
        }
        let listing: Vec<PointSet> = open_set.iter().copied().collect();
        for (i, &a) in listing.iter().enumerate() {
            for &b in &listing[i + 1..] {
                if !open_set.contains(&a.union(b)) {
                    return Err(Error::NotClosed {
                        op: "union",
                        a: a.to_string(),
                        b: b.to_string(),
                    });
                }
                if !open_set.contains(&a.inter(b)) {
                    return Err(Error::NotClosed {
                        op: "intersection",
                        a: a.to_string(),
                        b: b.to_string(),
                    });
                }
            }
        }
        Ok(Self::from_validated(points, point_index, open_set))
    }

    /// Builds a space from labeled opens (each open a list of point labels).
    pub fn from_labels(points: Vec<String>, opens: &[Vec<String>]) -> Result<FiniteSpace> {
        let mut index = BTreeMap::new();
        for (i, p) in points.iter().enumerate() {
            if index.insert(p.clone(), i).is_some() {
                return Err(Error::DuplicatePoint(p.clone()));
            }
        }
        let mut masks = Vec::with_capacity(opens.len());
        for open in opens {
            let mut mask = PointSet::EMPTY;
            for label in open {
                let i = index
                    .get(label)
                    .copied()
                    .ok_or_else(|| Error::UnknownPoint(label.clone()))?;
                mask = mask.union(PointSet::singleton(i));
            }
            masks.push(mask);
        }
        FiniteSpace::new(points, masks)
    }

    /// The discrete-with-all-subsets space: opens are every subset of the
    /// points. This is the Boolean topology of a quantum context; closure
    /// holds by construction so the quadratic validation is skipped.
    pub fn power_set(points: Vec<String>) -> Result<FiniteSpace> {
        let n = points.len();
        const POWER_SET_CAP: usize = 16;
        if n > POWER_SET_CAP {
            return Err(Error::TooManyPoints(n, POWER_SET_CAP));
        }
        let mut point_index = BTreeMap::new();
        for (i, p) in points.iter().enumerate() {
            if point_index.insert(p.clone(), i).is_some() {
                return Err(Error::DuplicatePoint(p.clone()));
            }
        }
        let open_set: BTreeSet<PointSet> = (0..(1u64 << n)).map(PointSet).collect();
        Ok(Self::from_validated(points, point_index, open_set))
    }

    fn from_validated(
        points: Vec<String>,
        point_index: BTreeMap<String, usize>,
        open_set: BTreeSet<PointSet>,
    ) -> FiniteSpace {
        let mut opens: Vec<PointSet> = open_set.iter().copied().collect();
        opens.sort_by(|a, b| a.canonical_cmp(*b));
        let n = points.len();
        let mut min_neigh = Vec::with_capacity(n);
        for x in 0..n {
            let mut neigh = PointSet::full(n);
            for &o in &opens {
                if o.contains(x) {
                    neigh = neigh.inter(o);
                }
            }
            // Intersection of finitely many opens containing x; open by closure.
            debug_assert!(open_set.contains(&neigh));
            min_neigh.push(neigh);
        }
        FiniteSpace {
            points,
            point_index,
            opens,
            open_set,
            min_neigh,
        }
    }

    pub fn point_count(&self) -> usize {
        self.points.len()
    }

    pub fn points(&self) -> &[String] {
        &self.points
    }

    pub fn point_name(&self, i: usize) -> &str {
        &self.points[i]
    }

    pub fn point_index(&self, name: &str) -> Result<usize> {
        self.point_index
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownPoint(name.to_string()))
    }

    pub fn full_set(&self) -> PointSet {
        PointSet::full(self.points.len())
    }

    /// Opens in canonical order (cardinality, then index-lexicographic).
    pub fn opens(&self) -> &[PointSet] {
        &self.opens
    }

    pub fn is_open(&self, s: PointSet) -> bool {
        self.open_set.contains(&s)
    }

    /// Checked open-set constructor.
    pub fn open(&self, members: PointSet) -> Result<OpenSet<'_>> {
        if self.is_open(members) {
            Ok(OpenSet {
                space: self,
                members,
            })
        } else {
            Err(Error::NotOpen(self.set_label(members)))
        }
    }

    pub fn open_from_labels(&self, labels: &[String]) -> Result<OpenSet<'_>> {
        let mut mask = PointSet::EMPTY;
        for label in labels {
            mask = mask.union(PointSet::singleton(self.point_index(label)?));
        }
        self.open(mask)
    }

    pub fn empty_open(&self) -> OpenSet<'_> {
        OpenSet {
            space: self,
            members: PointSet::EMPTY,
        }
    }

    pub fn full_open(&self) -> OpenSet<'_> {
        OpenSet {
            space: self,
            members: self.full_set(),
        }
    }

    /// Largest open contained in `s`; total on arbitrary subsets.
    pub fn interior(&self, s: PointSet) -> PointSet {
        let mut int = PointSet::EMPTY;
        for &o in &self.opens {
            if o.is_subset(s) {
                int = int.union(o);
            }
        }
        int
    }

    pub fn complement(&self, s: PointSet) -> PointSet {
        self.full_set().minus(s)
    }

    /// Heyting implication on masks: interior(complement(u) or v).
    pub fn heyting_impl_mask(&self, u: PointSet, v: PointSet) -> PointSet {
        self.interior(self.complement(u).union(v))
    }

    pub fn heyting_neg_mask(&self, u: PointSet) -> PointSet {
        self.heyting_impl_mask(u, PointSet::EMPTY)
    }

    /// Intersection of all opens containing `x`; open by finiteness.
    pub fn minimal_neighborhood(&self, x: usize) -> PointSet {
        self.min_neigh[x]
    }

    pub fn minimal_neighborhood_of(&self, name: &str) -> Result<OpenSet<'_>> {
        let i = self.point_index(name)?;
        Ok(OpenSet {
            space: self,
            members: self.min_neigh[i],
        })
    }

    /// Minimal nonempty opens, in canonical order.
    pub fn lattice_atoms(&self) -> Vec<OpenSet<'_>> {
        self.opens
            .iter()
            .filter(|&&o| {
                !o.is_empty()
                    && !self
                        .opens
                        .iter()
                        .any(|&p| !p.is_empty() && p != o && p.is_subset(o))
            })
            .map(|&o| OpenSet {
                space: self,
                members: o,
            })
            .collect()
    }

    /// True when every open's complement is also open (Boolean case).
    pub fn all_opens_clopen(&self) -> bool {
        self.opens.iter().all(|&o| self.is_open(self.complement(o)))
    }

    /// Human-readable label for a subset, e.g. `{p0,p1}`.
    pub fn set_label(&self, s: PointSet) -> String {
        let names: Vec<&str> = s.iter().map(|i| self.point_name(i)).collect();
        format!("{{{}}}", names.join(","))
    }

    /// Canonical key for a subset in JSON maps: point names joined by commas.
    pub fn set_key(&self, s: PointSet) -> String {
        let names: Vec<&str> = s.iter().map(|i| self.point_name(i)).collect();
        names.join(",")
    }

    /// Parses a key produced by [`FiniteSpace::set_key`].
    pub fn parse_set_key(&self, key: &str) -> Result<PointSet> {
        if key.is_empty() {
            return Ok(PointSet::EMPTY);
        }
        let mut mask = PointSet::EMPTY;
        for part in key.split(',') {
            mask = mask.union(PointSet::singleton(self.point_index(part)?));
        }
        Ok(mask)
    }

    pub fn set_to_labels(&self, s: PointSet) -> Vec<String> {
        s.iter().map(|i| self.points[i].clone()).collect()
    }
}

/// An open set of a specific space.
#[derive(Debug, Clone, Copy)]
pub struct OpenSet<'a> {
    space: &'a FiniteSpace,
    members: PointSet,
}

impl<'a> OpenSet<'a> {
    pub fn space(&self) -> &'a FiniteSpace {
        self.space
    }

    pub fn members(&self) -> PointSet {
        self.members
    }

    fn check_same_space(&self, other: &OpenSet<'a>) -> Result<()> {
        if std::ptr::eq(self.space, other.space) || self.space == other.space {
            Ok(())
        } else {
            Err(Error::SpaceMismatch)
        }
    }

    pub fn union(&self, other: &OpenSet<'a>) -> Result<OpenSet<'a>> {
        self.check_same_space(other)?;
        Ok(OpenSet {
            space: self.space,
            members: self.members.union(other.members),
        })
    }

    pub fn inter(&self, other: &OpenSet<'a>) -> Result<OpenSet<'a>> {
        self.check_same_space(other)?;
        Ok(OpenSet {
            space: self.space,
            members: self.members.inter(other.members),
        })
    }

    /// Heyting implication `self -> other`.
    pub fn heyting_impl(&self, other: &OpenSet<'a>) -> Result<OpenSet<'a>> {
        self.check_same_space(other)?;
        Ok(OpenSet {
            space: self.space,
            members: self.space.heyting_impl_mask(self.members, other.members),
        })
    }

    /// Heyting negation: `self -> empty`.
    pub fn heyting_neg(&self) -> OpenSet<'a> {
        OpenSet {
            space: self.space,
            members: self.space.heyting_neg_mask(self.members),
        }
    }
}

impl PartialEq for OpenSet<'_> {
    fn eq(&self, other: &Self) -> bool {
        self.members == other.members && self.space == other.space
    }
}
impl Eq for OpenSet<'_> {}

impl fmt::Display for OpenSet<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.space.set_label(self.members))
    }
}

// -- JSON form: {"points": [...], "opens": [[...], ...]} with opens sorted
//    by cardinality then lexicographically.

impl Serialize for FiniteSpace {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            points: &'a [String],
            opens: Vec<Vec<String>>,
        }
        let opens = self.opens.iter().map(|&o| self.set_to_labels(o)).collect();
        Repr {
            points: &self.points,
            opens,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for FiniteSpace {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            points: Vec<String>,
            opens: Vec<Vec<String>>,
        }
        let repr = Repr::deserialize(deserializer)?;
        FiniteSpace::from_labels(repr.points, &repr.opens).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sierpinski() -> FiniteSpace {
        // Points "0","1"; opens {}, {1}, X. The finite non-Hausdorff fixture base.
        FiniteSpace::new(
            vec!["0".into(), "1".into()],
            vec![PointSet::EMPTY, PointSet::singleton(1), PointSet::full(2)],
        )
        .unwrap()
    }

    #[test]
    fn canonical_order_sorts_by_cardinality_then_lex() {
        let a = PointSet::from_indices([0, 3]);
        let b = PointSet::from_indices([1, 2]);
        assert_eq!(a.canonical_cmp(b), std::cmp::Ordering::Less);
        let c = PointSet::from_indices([1]);
        assert_eq!(c.canonical_cmp(a), std::cmp::Ordering::Less);
    }

    #[test]
    fn rejects_non_closed_opens() {
        // {0} and {1} without {0,1}... union {0,1} = X is present, but
        // leaving out the intersection-closure is impossible for singletons;
        // instead drop the union of {0} and {1} in a 3-point space.
        let err = FiniteSpace::new(
            vec!["a".into(), "b".into(), "c".into()],
            vec![
                PointSet::EMPTY,
                PointSet::singleton(0),
                PointSet::singleton(1),
                PointSet::full(3),
            ],
        )
        .unwrap_err();
        match err {
            Error::NotClosed { op, .. } => assert_eq!(op, "union"),
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn rejects_missing_boundary_opens() {
        let err = FiniteSpace::new(
            vec!["a".into()],
            vec![PointSet::full(1)],
        )
        .unwrap_err();
        assert!(matches!(err, Error::MissingBoundaryOpens));
    }

    #[test]
    fn interior_on_sierpinski() {
        let sp = sierpinski();
        // s={0}: the only opens inside are empty.
        assert_eq!(sp.interior(PointSet::singleton(0)), PointSet::EMPTY);
        // s = full set is open already.
        assert_eq!(sp.interior(sp.full_set()), sp.full_set());
        // s = {1} is open already.
        assert_eq!(
            sp.interior(PointSet::singleton(1)),
            PointSet::singleton(1)
        );
    }

    #[test]
    fn heyting_impl_on_sierpinski() {
        let sp = sierpinski();
        let one = sp.open(PointSet::singleton(1)).unwrap();
        let empty = sp.empty_open();
        // {1} -> empty: interior of {0} is empty.
        assert_eq!(
            one.heyting_impl(&empty).unwrap().members(),
            PointSet::EMPTY
        );
        // u -> u = X for any open.
        for &o in sp.opens() {
            let u = sp.open(o).unwrap();
            assert_eq!(u.heyting_impl(&u).unwrap().members(), sp.full_set());
        }
        // empty -> v = X.
        let x = sp.full_open();
        assert_eq!(empty.heyting_impl(&x).unwrap().members(), sp.full_set());
    }

    #[test]
    fn heyting_impl_rejects_mismatched_spaces() {
        let sp1 = sierpinski();
        let sp2 = FiniteSpace::power_set(vec!["0".into(), "1".into()]).unwrap();
        let u = sp1.full_open();
        let v = sp2.full_open();
        assert!(matches!(u.heyting_impl(&v), Err(Error::SpaceMismatch)));
    }

    #[test]
    fn minimal_neighborhoods() {
        let sp = sierpinski();
        assert_eq!(sp.minimal_neighborhood(0), sp.full_set());
        assert_eq!(sp.minimal_neighborhood(1), PointSet::singleton(1));
        let disc = FiniteSpace::power_set(vec!["a".into(), "b".into(), "c".into()]).unwrap();
        for x in 0..3 {
            assert_eq!(disc.minimal_neighborhood(x), PointSet::singleton(x));
        }
        assert!(matches!(
            sp.minimal_neighborhood_of("zz"),
            Err(Error::UnknownPoint(_))
        ));
    }

    #[test]
    fn lattice_atoms_examples() {
        let disc = FiniteSpace::power_set(vec!["s1".into(), "s2".into()]).unwrap();
        let atoms: Vec<PointSet> = disc.lattice_atoms().iter().map(|a| a.members()).collect();
        assert_eq!(atoms, vec![PointSet::singleton(0), PointSet::singleton(1)]);

        let sp = sierpinski();
        let atoms: Vec<PointSet> = sp.lattice_atoms().iter().map(|a| a.members()).collect();
        assert_eq!(atoms, vec![PointSet::singleton(1)]);

        // opens {∅,{a},{b},{a,b},X} over 3 points.
        let sp3 = FiniteSpace::new(
            vec!["a".into(), "b".into(), "c".into()],
            vec![
                PointSet::EMPTY,
                PointSet::singleton(0),
                PointSet::singleton(1),
                PointSet::from_indices([0, 1]),
                PointSet::full(3),
            ],
        )
        .unwrap();
        let atoms: Vec<PointSet> = sp3.lattice_atoms().iter().map(|a| a.members()).collect();
        assert_eq!(atoms, vec![PointSet::singleton(0), PointSet::singleton(1)]);
    }

    #[test]
    fn minimal_neighborhood_union_recovers_open() {
        let sp = sierpinski();
        for &u in sp.opens() {
            let mut rebuilt = PointSet::EMPTY;
            for x in u.iter() {
                rebuilt = rebuilt.union(sp.minimal_neighborhood(x));
            }
            assert_eq!(rebuilt, u);
        }
    }

    #[test]
    fn clopen_detection() {
        assert!(!sierpinski().all_opens_clopen());
        assert!(FiniteSpace::power_set(vec!["a".into(), "b".into()])
            .unwrap()
            .all_opens_clopen());
    }

    #[test]
    fn json_round_trip_is_canonical() {
        let sp = sierpinski();
        let json = serde_json::to_string(&sp).unwrap();
        assert_eq!(
            json,
            r#"{"points":["0","1"],"opens":[[],["1"],["0","1"]]}"#
        );
        let back: FiniteSpace = serde_json::from_str(&json).unwrap();
        assert_eq!(back, sp);
    }

    #[test]
    fn set_key_round_trip() {
        let sp = sierpinski();
        let s = sp.full_set();
        assert_eq!(sp.set_key(s), "0,1");
        assert_eq!(sp.parse_set_key("0,1").unwrap(), s);
        assert_eq!(sp.parse_set_key("").unwrap(), PointSet::EMPTY);
    }
}

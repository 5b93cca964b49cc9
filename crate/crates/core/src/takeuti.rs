//! The two-way correspondence between self-adjoint operators in a context's
//! algebra and internal Dedekind reals over its Boolean base space.
//!
//! A cut is represented by one real value per atom (the locally constant
//! picture licensed by the continuous-function correspondence); the lower
//! and upper predicates are derived from it, and the cut axioms are checked
//! by exact rational interval logic on the finitely many thresholds rather
//! than by sampling. Rational-versus-eigenvalue comparisons snap values
//! within the clustering tolerance to equality, so boundary behavior is
//! deterministic.

use crate::error::{Error, Result};
use crate::forcing::ForcingStructure;
use crate::quantum::{HermitianOperator, QuantumContext, StateVector};
use crate::topology::{FiniteSpace, PointSet};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::collections::BTreeMap;

fn exact(v: f64) -> BigRational {
    BigRational::from_float(v).expect("finite value")
}

/// Three-way comparison of a rational against a float value, snapping
/// |q - v| <= tol to equality.
fn snap_cmp(q: &BigRational, v: f64, tol: f64) -> Ordering {
    let v = exact(v);
    let t = exact(tol);
    let diff = q - &v;
    if diff.abs() <= t {
        Ordering::Equal
    } else if diff < BigRational::from(BigInt::from(0)) {
        Ordering::Less
    } else {
        Ordering::Greater
    }
}

/// An increasing family of opens encoding a self-adjoint operator:
/// `proj_at(r)` is the largest level whose breakpoint lies at or below `r`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralFamily {
    breakpoints: Vec<f64>,
    levels: Vec<PointSet>,
    atom_count: usize,
    tol: f64,
}

impl SpectralFamily {
    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn levels(&self) -> &[PointSet] {
        &self.levels
    }

    /// P_r for a real threshold.
    pub fn proj_at(&self, r: f64) -> PointSet {
        self.proj_at_rational(&exact(r))
    }

    /// P_q for an exact rational threshold (with snapping at breakpoints).
    pub fn proj_at_rational(&self, q: &BigRational) -> PointSet {
        let mut current = PointSet::EMPTY;
        for (bp, &level) in self.breakpoints.iter().zip(&self.levels) {
            if snap_cmp(q, *bp, self.tol) != Ordering::Less {
                current = level;
            }
        }
        current
    }

    /// Verifies the four spectral-family axioms by exact set equality:
    /// meet-compatibility, empty intersection, full union, and right
    /// continuity at the breakpoints.
    pub fn check_axioms(&self) -> Result<()> {
        let full = PointSet::full(self.atom_count);
        for (i, w) in self.levels.windows(2).enumerate() {
            if !w[0].is_subset(w[1]) || w[0] == w[1] {
                return Err(Error::Internal(format!(
                    "levels are not strictly increasing at breakpoint {i}"
                )));
            }
        }
        // 1. P_q  ^ P_r = P_min(q,r) across representative thresholds.
        let reps = self.representative_thresholds();
        for q in &reps {
            for r in &reps {
                let lhs = self
                    .proj_at_rational(q)
                    .inter(self.proj_at_rational(r));
                let rhs = self.proj_at_rational(q.min(r));
                if lhs != rhs {
                    return Err(Error::Internal(format!(
                        "axiom 1 fails at q={q}, r={r}"
                    )));
                }
            }
        }
        // 2. The intersection over all thresholds is empty.
        let below_all = reps.first().expect("nonempty thresholds");
        if !self.proj_at_rational(below_all).is_empty() {
            return Err(Error::Internal("axiom 2 fails: intersection nonempty".into()));
        }
        // 3. The union over all thresholds is the full set.
        let above_all = reps.last().expect("nonempty thresholds");
        if self.proj_at_rational(above_all) != full {
            return Err(Error::Internal("axiom 3 fails: union not full".into()));
        }
        // 4. Right continuity: the intersection of P_r over r >= q is P_q.
        for q in &reps {
            let mut meet = full;
            for r in &reps {
                if r >= q {
                    meet = meet.inter(self.proj_at_rational(r));
                }
            }
            if meet != self.proj_at_rational(q) {
                return Err(Error::Internal(format!("axiom 4 fails at q={q}")));
            }
        }
        Ok(())
    }

    /// Rationals that separate every behavior of the step family: one below
    /// every breakpoint, one exactly at each, one in each gap, one above.
    pub fn representative_thresholds(&self) -> Vec<BigRational> {
        representative_rationals(&self.breakpoints)
    }
}

fn representative_rationals(sorted_values: &[f64]) -> Vec<BigRational> {
    let mut reps = Vec::new();
    if sorted_values.is_empty() {
        reps.push(BigRational::from(BigInt::from(0)));
        return reps;
    }
    let one = BigRational::from(BigInt::from(1));
    reps.push(exact(sorted_values[0]) - &one);
    for (i, &v) in sorted_values.iter().enumerate() {
        reps.push(exact(v));
        if let Some(&next) = sorted_values.get(i + 1) {
            let mid = (exact(v) + exact(next)) / BigRational::from(BigInt::from(2));
            reps.push(mid);
        }
    }
    reps.push(exact(sorted_values[sorted_values.len() - 1]) + one);
    reps
}

/// The rational line cut into the finitely many regions on which every
/// snapped comparison against the threshold values is constant.
///
/// Snapping makes every rational within `tol` of a threshold compare equal
/// to it, so the band around each threshold collapses to a single virtual
/// rational (the value itself); regions are those bands plus the open cells
/// between them. Quantifiers over the rationals then reduce to the regions
/// exactly. Thresholds are assumed separated by more than twice the
/// snapping width, which the clustering step guarantees for every cut this
/// crate produces; closer thresholds are merged conservatively.
struct RegionGrid {
    regions: Vec<Region>,
}

struct Region {
    rep: BigRational,
    /// Cell endpoints (`None` = unbounded); unused for bands.
    left: Option<BigRational>,
    right: Option<BigRational>,
    /// Bands act as a single virtual rational.
    is_point: bool,
}

impl RegionGrid {
    fn new(thresholds: &[f64], tol: f64) -> RegionGrid {
        let mut values: Vec<f64> = thresholds.iter().copied().filter(|v| v.is_finite()).collect();
        values.sort_by(|a, b| a.partial_cmp(b).unwrap());
        // Merge thresholds whose snap bands would overlap.
        let centers = cluster(values, 2.0 * tol);
        let mut regions = Vec::new();
        if centers.is_empty() {
            regions.push(Region {
                rep: BigRational::from(BigInt::from(0)),
                left: None,
                right: None,
                is_point: false,
            });
            return RegionGrid { regions };
        }
        let tol_q = exact(tol);
        let one = BigRational::from(BigInt::from(1));
        let two = BigRational::from(BigInt::from(2));
        let band = |c: f64| (exact(c) - &tol_q, exact(c) + &tol_q);
        let (first_left, _) = band(centers[0]);
        regions.push(Region {
            rep: &first_left - &one,
            left: None,
            right: Some(first_left),
            is_point: false,
        });
        for (i, &c) in centers.iter().enumerate() {
            let (lo, hi) = band(c);
            regions.push(Region {
                rep: exact(c),
                left: Some(lo),
                right: Some(hi.clone()),
                is_point: true,
            });
            if let Some(&next) = centers.get(i + 1) {
                let (next_lo, _) = band(next);
                regions.push(Region {
                    rep: (exact(c) + exact(next)) / &two,
                    left: Some(hi),
                    right: Some(next_lo),
                    is_point: false,
                });
            }
        }
        let (_, last_right) = band(centers[centers.len() - 1]);
        regions.push(Region {
            rep: &last_right + &one,
            left: Some(last_right),
            right: None,
            is_point: false,
        });
        RegionGrid { regions }
    }

    fn reps(&self) -> impl Iterator<Item = &BigRational> {
        self.regions.iter().map(|r| &r.rep)
    }

    /// Whether some rational strictly above `q` satisfies the predicate
    /// (bands count as their single virtual rational).
    fn exists_above(&self, q: &BigRational, pred: impl Fn(&BigRational) -> bool) -> bool {
        self.regions.iter().any(|r| {
            let reaches_above = if r.is_point {
                r.rep > *q
            } else {
                r.right.as_ref().is_none_or(|b| b > q)
            };
            reaches_above && pred(&r.rep)
        })
    }

    /// Whether some rational strictly below `q` satisfies the predicate.
    fn exists_below(&self, q: &BigRational, pred: impl Fn(&BigRational) -> bool) -> bool {
        self.regions.iter().any(|r| {
            let reaches_below = if r.is_point {
                r.rep < *q
            } else {
                r.left.as_ref().is_none_or(|b| b < q)
            };
            reaches_below && pred(&r.rep)
        })
    }

    /// Ordered representative pairs (q, r) standing for all rational pairs
    /// q < r: distinct region pairs plus the diagonal of every cell.
    fn ordered_pairs(&self) -> Vec<(&BigRational, &BigRational)> {
        let mut pairs = Vec::new();
        for (i, a) in self.regions.iter().enumerate() {
            if !a.is_point {
                pairs.push((&a.rep, &a.rep));
            }
            for b in &self.regions[i + 1..] {
                pairs.push((&a.rep, &b.rep));
            }
        }
        pairs
    }
}

/// Clusters sorted values whose gaps fall within `tol` (transitive closure)
/// and returns the cluster means.
fn cluster(mut values: Vec<f64>, tol: f64) -> Vec<f64> {
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut out = Vec::new();
    let mut start = 0;
    while start < values.len() {
        let mut end = start + 1;
        while end < values.len() && values[end] - values[end - 1] <= tol {
            end += 1;
        }
        out.push(values[start..end].iter().sum::<f64>() / (end - start) as f64);
        start = end;
    }
    out
}

/// The spectral family of an operator in the context's algebra: breakpoints
/// are its distinct (clustered) character values and `P_r` collects the
/// atoms with value at or below `r`.
pub fn spectral_family_of(
    op: &HermitianOperator,
    ctx: &QuantumContext,
) -> Result<SpectralFamily> {
    let tol = ctx.tolerances().eig;
    let raw = ctx.characters_of(op)?;
    let breakpoints = cluster(raw.clone(), tol);
    let snapped: Vec<f64> = raw
        .iter()
        .map(|&v| {
            *breakpoints
                .iter()
                .min_by(|a, b| (*a - v).abs().partial_cmp(&(*b - v).abs()).unwrap())
                .expect("nonempty breakpoints")
        })
        .collect();
    let levels = breakpoints
        .iter()
        .map(|&bp| {
            PointSet::from_indices(
                snapped
                    .iter()
                    .enumerate()
                    .filter(|(_, &v)| v <= bp)
                    .map(|(i, _)| i),
            )
        })
        .collect();
    Ok(SpectralFamily {
        breakpoints,
        levels,
        atom_count: ctx.atom_count(),
        tol,
    })
}

/// Predicate view of an internal real: lower and upper membership per open,
/// plus the finite threshold set that drives exact interval checks.
pub trait CutPredicates {
    fn in_lower(&self, q: &BigRational, open: PointSet) -> bool;
    fn in_upper(&self, q: &BigRational, open: PointSet) -> bool;
    fn thresholds(&self) -> Vec<f64>;
    /// Snapping width of rational-versus-value comparisons.
    fn snap_tol(&self) -> f64;
}

/// An internal Dedekind real over a quantum context, represented by one
/// value per atom. The derived predicates read: a rational is in the lower
/// set on `Q` when it sits strictly below the value at every atom of `Q`,
/// and dually for the upper set.
#[derive(Debug, Clone, PartialEq)]
pub struct DedekindCut {
    values: Vec<f64>,
    tol: f64,
}

impl DedekindCut {
    pub fn from_values(values: Vec<f64>, tol: f64) -> DedekindCut {
        DedekindCut { values, tol }
    }

    pub fn constant(value: f64, atom_count: usize, tol: f64) -> DedekindCut {
        DedekindCut {
            values: vec![value; atom_count],
            tol,
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn atom_count(&self) -> usize {
        self.values.len()
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    fn check_same_ctx(&self, other: &DedekindCut) -> Result<()> {
        if self.values.len() == other.values.len() {
            Ok(())
        } else {
            Err(Error::ContextMismatch)
        }
    }

    /// Pointwise sum.
    pub fn add(&self, other: &DedekindCut) -> Result<DedekindCut> {
        self.check_same_ctx(other)?;
        Ok(DedekindCut {
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a + b)
                .collect(),
            tol: self.tol,
        })
    }

    /// Pointwise scaling.
    pub fn scale(&self, factor: f64) -> DedekindCut {
        DedekindCut {
            values: self.values.iter().map(|v| factor * v).collect(),
            tol: self.tol,
        }
    }

    /// The largest open forcing `self <= other`: with per-atom values this
    /// is the set of atoms where the comparison holds (snapped).
    pub fn forced_leq(&self, other: &DedekindCut) -> Result<PointSet> {
        self.check_same_ctx(other)?;
        Ok(PointSet::from_indices(
            self.values
                .iter()
                .zip(&other.values)
                .enumerate()
                .filter(|(_, (a, b))| **a <= **b + self.tol)
                .map(|(i, _)| i),
        ))
    }

    /// The open where the two cuts agree (snapped per atom).
    pub fn forced_eq(&self, other: &DedekindCut) -> Result<PointSet> {
        Ok(self.forced_leq(other)?.inter(other.forced_leq(self)?))
    }
}

impl CutPredicates for DedekindCut {
    fn in_lower(&self, q: &BigRational, open: PointSet) -> bool {
        open.iter()
            .all(|i| snap_cmp(q, self.values[i], self.tol) == Ordering::Less)
    }

    fn in_upper(&self, q: &BigRational, open: PointSet) -> bool {
        open.iter()
            .all(|i| snap_cmp(q, self.values[i], self.tol) == Ordering::Greater)
    }

    fn thresholds(&self) -> Vec<f64> {
        cluster(self.values.clone(), self.tol)
    }

    fn snap_tol(&self) -> f64 {
        self.tol
    }
}

/// The literal reading of the upper-set display, `q` is in `U` on `Q` when
/// some atom of `Q` has a value below `q`. This variant violates the
/// hierarchy's restriction condition (membership is not preserved when
/// shrinking `Q`), which [`check_cut_axioms`] reports; the crate's own
/// [`DedekindCut`] uses the universally quantified reading instead.
#[derive(Debug, Clone)]
pub struct ExistentialUpperReading<'a>(pub &'a DedekindCut);

impl CutPredicates for ExistentialUpperReading<'_> {
    fn in_lower(&self, q: &BigRational, open: PointSet) -> bool {
        self.0.in_lower(q, open)
    }

    fn in_upper(&self, q: &BigRational, open: PointSet) -> bool {
        !open.is_empty()
            && open
                .iter()
                .any(|i| snap_cmp(q, self.0.values[i], self.0.tol) == Ordering::Greater)
    }

    fn thresholds(&self) -> Vec<f64> {
        self.0.thresholds()
    }

    fn snap_tol(&self) -> f64 {
        self.0.tol
    }
}

/// The cut of an operator: per-atom character values.
pub fn cut_of_operator(op: &HermitianOperator, ctx: &QuantumContext) -> Result<DedekindCut> {
    Ok(DedekindCut {
        values: ctx.characters_of(op)?,
        tol: ctx.tolerances().eig,
    })
}

/// The operator of a cut: levels are reconstructed from the upper predicate
/// (an atom enters `P_r` exactly when its value is at or below `r`) and the
/// operator is the sum of breakpoint times projection increment.
pub fn operator_of_cut(cut: &DedekindCut, ctx: &QuantumContext) -> Result<HermitianOperator> {
    if cut.atom_count() != ctx.atom_count() {
        return Err(Error::ContextMismatch);
    }
    if cut.values.iter().any(|v| !v.is_finite()) {
        return Err(Error::CutAxiomsFail("cut has non-finite values".into()));
    }
    let family = spectral_family_from_cut(cut, ctx)?;
    let mut previous = PointSet::EMPTY;
    let mut matrix = crate::linalg::CMatrix::zeros(ctx.dim(), ctx.dim());
    for (bp, &level) in family.breakpoints.iter().zip(&family.levels) {
        let increment = level.minus(previous);
        matrix = matrix.add(&ctx.projection_of(increment).matrix().scale(*bp));
        previous = level;
    }
    HermitianOperator::new("cut", matrix, ctx.tolerances())
}

/// The spectral family determined by a cut's predicates: `P_r` is the union
/// of the opens on which every rational above `r` lies in the upper set.
pub fn spectral_family_from_cut(
    cut: &DedekindCut,
    ctx: &QuantumContext,
) -> Result<SpectralFamily> {
    if cut.atom_count() != ctx.atom_count() {
        return Err(Error::ContextMismatch);
    }
    let tol = cut.tol;
    let breakpoints = cluster(cut.values.clone(), tol);
    let levels: Vec<PointSet> = breakpoints
        .iter()
        .map(|&bp| {
            PointSet::from_indices(
                cut.values
                    .iter()
                    .enumerate()
                    .filter(|(_, &v)| v <= bp + tol)
                    .map(|(i, _)| i),
            )
        })
        .collect();
    Ok(SpectralFamily {
        breakpoints,
        levels,
        atom_count: cut.atom_count(),
        tol,
    })
}

/// Literal form of the reconstruction lemma, used as an independent route:
/// the union of all opens `P` such that every rational above `r` is in the
/// upper set on `P` (quantified exactly over the region grid).
pub fn level_via_upper_predicate<P: CutPredicates>(
    pred: &P,
    space: &FiniteSpace,
    r: &BigRational,
) -> PointSet {
    let grid = RegionGrid::new(&pred.thresholds(), pred.snap_tol());
    let mut union = PointSet::EMPTY;
    for &p in space.opens() {
        if p.is_empty() {
            continue;
        }
        let qualifies = !grid.exists_above(r, |q| !pred.in_upper(q, p));
        if qualifies {
            union = union.union(p);
        }
    }
    union
}

/// Truth open of the interval proposition: `P_d \ P_c`, the paper's
/// convention for eigenvalues in the half-open interval `(c, d]`.
pub fn interval_truth(
    op: &HermitianOperator,
    c: &BigRational,
    d: &BigRational,
    ctx: &QuantumContext,
) -> Result<PointSet> {
    if c > d {
        return Err(Error::ReversedInterval {
            c: c.to_string(),
            d: d.to_string(),
        });
    }
    let family = spectral_family_of(op, ctx)?;
    Ok(family
        .proj_at_rational(d)
        .minus(family.proj_at_rational(c)))
}

/// Born weight of the interval proposition under the state.
pub fn interval_probability(
    op: &HermitianOperator,
    c: &BigRational,
    d: &BigRational,
    state: &StateVector,
    ctx: &QuantumContext,
) -> Result<f64> {
    let open = interval_truth(op, c, d, ctx)?;
    ctx.born_measure(state, open)
}

// -- Cut axiom checking -------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct AxiomResult {
    pub pass: bool,
    pub witness: Option<String>,
}

impl AxiomResult {
    fn pass() -> AxiomResult {
        AxiomResult {
            pass: true,
            witness: None,
        }
    }

    fn fail(witness: String) -> AxiomResult {
        AxiomResult {
            pass: false,
            witness: Some(witness),
        }
    }
}

/// Per-axiom outcome of [`check_cut_axioms`], with witnesses on failure.
#[derive(Debug, Clone, Serialize)]
pub struct CutAxiomReport {
    /// Presheaf restriction condition: membership survives shrinking the open.
    pub restriction_monotone: AxiomResult,
    /// 1. Every nonempty open has a cover with lower and upper witnesses.
    pub inhabited: AxiomResult,
    /// 2. Downward closure of the lower set, upward closure of the upper set.
    pub closed: AxiomResult,
    /// 3. Openness: every witness is beaten on a cover.
    pub open_sets: AxiomResult,
    /// 4. Locatedness: q < r splits every open into a lower and an upper part.
    pub located: AxiomResult,
    /// 5. Lower and upper sets are disjoint.
    pub disjoint: AxiomResult,
}

impl CutAxiomReport {
    pub fn all_pass(&self) -> bool {
        self.restriction_monotone.pass
            && self.inhabited.pass
            && self.closed.pass
            && self.open_sets.pass
            && self.located.pass
            && self.disjoint.pass
    }

    pub fn first_failure(&self) -> Option<(&'static str, &AxiomResult)> {
        [
            ("restriction monotonicity", &self.restriction_monotone),
            ("axiom 1 (inhabited)", &self.inhabited),
            ("axiom 2 (closure)", &self.closed),
            ("axiom 3 (openness)", &self.open_sets),
            ("axiom 4 (locatedness)", &self.located),
            ("axiom 5 (disjointness)", &self.disjoint),
        ]
        .into_iter()
        .find(|(_, r)| !r.pass)
    }
}

/// Verifies the five Dedekind-cut axioms for arbitrary lower/upper
/// predicates over the space's open lattice.
///
/// The check is exact: predicates derived from finitely many per-atom
/// values are piecewise constant in the rational argument, so evaluating
/// them at one representative per region (below, at, and between the
/// thresholds) decides every rational at once.
pub fn check_cut_axioms<P: CutPredicates>(pred: &P, space: &FiniteSpace) -> CutAxiomReport {
    let grid = RegionGrid::new(&pred.thresholds(), pred.snap_tol());
    let reps: Vec<&BigRational> = grid.reps().collect();
    let opens = space.opens();
    let label = |s: PointSet| space.set_label(s);

    let restriction_monotone = 'mono: {
        for &q in opens {
            for &t in opens {
                if !t.is_subset(q) || t == q {
                    continue;
                }
                for rep in &reps {
                    if pred.in_lower(rep, q) && !pred.in_lower(rep, t) {
                        break 'mono AxiomResult::fail(format!(
                            "{rep} is in L on {} but not on the smaller open {}",
                            label(q),
                            label(t)
                        ));
                    }
                    if pred.in_upper(rep, q) && !pred.in_upper(rep, t) {
                        break 'mono AxiomResult::fail(format!(
                            "{rep} is in U on {} but not on the smaller open {}",
                            label(q),
                            label(t)
                        ));
                    }
                }
            }
        }
        AxiomResult::pass()
    };

    // A point of q is covered for L (or U) when some open around it inside q
    // carries a witness; when `strict` is given, the witness must beat it.
    let point_covered = |q: PointSet, x: usize, upper: bool, strict: Option<&BigRational>| {
        opens.iter().any(|&w| {
            if w.is_empty() || !w.contains(x) || !w.is_subset(q) {
                return false;
            }
            match (strict, upper) {
                (None, false) => reps.iter().any(|rep| pred.in_lower(rep, w)),
                (None, true) => reps.iter().any(|rep| pred.in_upper(rep, w)),
                // Openness wants a strictly larger lower witness and a
                // strictly smaller upper witness.
                (Some(bound), false) => grid.exists_above(bound, |rep| pred.in_lower(rep, w)),
                (Some(bound), true) => grid.exists_below(bound, |rep| pred.in_upper(rep, w)),
            }
        })
    };

    let inhabited = 'inh: {
        for &q in opens {
            if q.is_empty() {
                continue;
            }
            for x in q.iter() {
                if !point_covered(q, x, false, None) {
                    break 'inh AxiomResult::fail(format!(
                        "no open around {} inside {} carries a lower witness",
                        space.point_name(x),
                        label(q)
                    ));
                }
                if !point_covered(q, x, true, None) {
                    break 'inh AxiomResult::fail(format!(
                        "no open around {} inside {} carries an upper witness",
                        space.point_name(x),
                        label(q)
                    ));
                }
            }
        }
        AxiomResult::pass()
    };

    let closed = 'cl: {
        for &q in opens {
            if q.is_empty() {
                continue;
            }
            for (lo, hi) in grid.ordered_pairs() {
                if pred.in_lower(hi, q) && !pred.in_lower(lo, q) {
                    break 'cl AxiomResult::fail(format!(
                        "L on {} contains {hi} but not the smaller {lo}",
                        label(q)
                    ));
                }
                if pred.in_upper(lo, q) && !pred.in_upper(hi, q) {
                    break 'cl AxiomResult::fail(format!(
                        "U on {} contains {lo} but not the larger {hi}",
                        label(q)
                    ));
                }
            }
        }
        AxiomResult::pass()
    };

    let open_sets = 'op: {
        for &q in opens {
            if q.is_empty() {
                continue;
            }
            for rep in &reps {
                if pred.in_lower(rep, q) {
                    for x in q.iter() {
                        if !point_covered(q, x, false, Some(rep)) {
                            break 'op AxiomResult::fail(format!(
                                "{rep} is in L on {} but no strictly larger witness \
                                 covers {}",
                                label(q),
                                space.point_name(x)
                            ));
                        }
                    }
                }
                if pred.in_upper(rep, q) {
                    for x in q.iter() {
                        if !point_covered(q, x, true, Some(rep)) {
                            break 'op AxiomResult::fail(format!(
                                "{rep} is in U on {} but no strictly smaller witness \
                                 covers {}",
                                label(q),
                                space.point_name(x)
                            ));
                        }
                    }
                }
            }
        }
        AxiomResult::pass()
    };

    let located = 'loc: {
        for &q in opens {
            if q.is_empty() {
                continue;
            }
            for (lo, hi) in grid.ordered_pairs() {
                let mut split = false;
                'outer: for &t1 in opens {
                    if !t1.is_subset(q) {
                        continue;
                    }
                    if !(t1.is_empty() || pred.in_lower(lo, t1)) {
                        continue;
                    }
                    let missing = q.minus(t1);
                    for &t2 in opens {
                        if t2.is_subset(q)
                            && missing.is_subset(t2)
                            && (t2.is_empty() || pred.in_upper(hi, t2))
                        {
                            split = true;
                            break 'outer;
                        }
                    }
                }
                if !split {
                    break 'loc AxiomResult::fail(format!(
                        "{lo} < {hi} but {} does not split into a lower part \
                         and an upper part",
                        label(q)
                    ));
                }
            }
        }
        AxiomResult::pass()
    };

    let disjoint = 'dis: {
        for &q in opens {
            if q.is_empty() {
                continue;
            }
            for rep in &reps {
                if pred.in_lower(rep, q) && pred.in_upper(rep, q) {
                    break 'dis AxiomResult::fail(format!(
                        "{rep} is in both L and U on {}",
                        label(q)
                    ));
                }
            }
        }
        AxiomResult::pass()
    };

    CutAxiomReport {
        restriction_monotone,
        inhabited,
        closed,
        open_sets,
        located,
        disjoint,
    }
}

// -- Cuts as a forcing structure ------------------------------------------

/// A cut restricted to an open: the forcing element of [`CutStructure`].
#[derive(Debug, Clone, PartialEq)]
pub struct CutElem {
    pub domain: PointSet,
    pub values: Vec<f64>,
}

/// Named cuts over a quantum context, exposed to the formula evaluator.
/// Constants are operator cuts (and any extra named cuts); rational
/// literals become constant cuts; `<=` is forced per atom.
pub struct CutStructure<'a> {
    ctx: &'a QuantumContext,
    constants: BTreeMap<String, DedekindCut>,
    domains: BTreeMap<String, Vec<String>>,
}

impl<'a> CutStructure<'a> {
    pub fn new(ctx: &'a QuantumContext) -> CutStructure<'a> {
        CutStructure {
            ctx,
            constants: BTreeMap::new(),
            domains: BTreeMap::new(),
        }
    }

    /// Registers every family member's cut under the operator's name.
    pub fn with_family_cuts(ctx: &'a QuantumContext) -> Result<CutStructure<'a>> {
        let mut s = CutStructure::new(ctx);
        for op in ctx.family() {
            s.insert_cut(op.name(), cut_of_operator(op, ctx)?)?;
        }
        Ok(s)
    }

    pub fn insert_cut(&mut self, name: &str, cut: DedekindCut) -> Result<()> {
        if cut.atom_count() != self.ctx.atom_count() {
            return Err(Error::ContextMismatch);
        }
        self.constants.insert(name.to_string(), cut);
        Ok(())
    }

    /// Declares a quantifier domain ranging over the named cuts.
    pub fn declare_domain(&mut self, name: &str, members: &[&str]) -> Result<()> {
        for m in members {
            if !self.constants.contains_key(*m) {
                return Err(Error::UnknownConstant((*m).to_string()));
            }
        }
        self.domains.insert(
            name.to_string(),
            members.iter().map(|s| s.to_string()).collect(),
        );
        Ok(())
    }

    pub fn ctx(&self) -> &'a QuantumContext {
        self.ctx
    }

    pub fn cut(&self, name: &str) -> Result<&DedekindCut> {
        self.constants
            .get(name)
            .ok_or_else(|| Error::UnknownConstant(name.to_string()))
    }

    fn elem_of(&self, cut: &DedekindCut) -> CutElem {
        CutElem {
            domain: self.ctx.space().full_set(),
            values: cut.values().to_vec(),
        }
    }
}

impl ForcingStructure for CutStructure<'_> {
    type Elem = CutElem;

    fn space(&self) -> &FiniteSpace {
        self.ctx.space()
    }

    fn elem_domain(&self, elem: &CutElem) -> PointSet {
        elem.domain
    }

    fn germs_equal(&self, a: &CutElem, b: &CutElem, x: usize) -> bool {
        (a.values[x] - b.values[x]).abs() <= self.ctx.tolerances().eig
    }

    fn leq_at(&self, a: &CutElem, b: &CutElem, x: usize) -> Result<bool> {
        Ok(a.values[x] <= b.values[x] + self.ctx.tolerances().eig)
    }

    fn domain_family(&self, name: &str) -> Result<Vec<CutElem>> {
        let names = self
            .domains
            .get(name)
            .ok_or_else(|| Error::UnknownDomain(name.to_string()))?;
        names
            .iter()
            .map(|n| self.cut(n).map(|c| self.elem_of(c)))
            .collect()
    }

    fn constant(&self, name: &str) -> Result<CutElem> {
        self.cut(name).map(|c| self.elem_of(c))
    }

    fn rational_elem(&self, q: &BigRational) -> Result<CutElem> {
        let v = q.to_f64().ok_or_else(|| Error::Internal(format!(
            "rational {q} does not fit in a float"
        )))?;
        Ok(CutElem {
            domain: self.ctx.space().full_set(),
            values: vec![v; self.ctx.atom_count()],
        })
    }
}

/// Spectral family JSON: breakpoints with their cumulative atom subsets.
#[derive(Serialize, Deserialize)]
pub struct SpectralFamilyFile {
    pub breakpoints: Vec<f64>,
    pub levels: Vec<Vec<String>>,
}

impl SpectralFamilyFile {
    pub fn new(family: &SpectralFamily, ctx: &QuantumContext) -> SpectralFamilyFile {
        SpectralFamilyFile {
            breakpoints: family.breakpoints.clone(),
            levels: family
                .levels
                .iter()
                .map(|&l| ctx.space().set_to_labels(l))
                .collect(),
        }
    }
}

/// Cut JSON: `{"context": ..., "values": {"a0": 1.0, ...}}`.
#[derive(Serialize, Deserialize)]
pub struct CutFile {
    pub context: QuantumContext,
    pub values: BTreeMap<String, f64>,
}

impl CutFile {
    pub fn new(ctx: &QuantumContext, cut: &DedekindCut) -> CutFile {
        CutFile {
            context: ctx.clone(),
            values: ctx
                .atoms()
                .iter()
                .zip(cut.values())
                .map(|(a, &v)| (a.label().to_string(), v))
                .collect(),
        }
    }

    pub fn into_cut(self) -> Result<(QuantumContext, DedekindCut)> {
        let mut values = vec![0.0; self.context.atom_count()];
        for (label, v) in &self.values {
            values[self.context.atom_index(label)?] = *v;
        }
        let tol = self.context.tolerances().eig;
        Ok((self.context, DedekindCut::from_values(values, tol)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{build_context, Tolerances};

    fn ctx_diag(values: &[f64]) -> QuantumContext {
        let a = HermitianOperator::diagonal("A", values);
        build_context(vec![a], Tolerances::default()).unwrap()
    }

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn spectral_family_of_two_level_operator() {
        let ctx = ctx_diag(&[1.0, -1.0]);
        let a = ctx.family_member("A").unwrap().clone();
        let fam = spectral_family_of(&a, &ctx).unwrap();
        assert_eq!(fam.breakpoints(), &[-1.0, 1.0]);
        // P_{-1} is the atom with character -1 (a1), P_1 is everything.
        assert_eq!(fam.proj_at(-1.0), PointSet::singleton(1));
        assert_eq!(fam.proj_at(1.0), ctx.space().full_set());
        assert_eq!(fam.proj_at(-2.0), PointSet::EMPTY);
        assert_eq!(fam.proj_at(0.0), PointSet::singleton(1));
        fam.check_axioms().unwrap();
    }

    #[test]
    fn spectral_family_of_scalar_operator_is_a_step() {
        let ctx = ctx_diag(&[3.0, 3.0]);
        let a = ctx.family_member("A").unwrap().clone();
        let fam = spectral_family_of(&a, &ctx).unwrap();
        assert_eq!(fam.breakpoints(), &[3.0]);
        assert_eq!(fam.proj_at(2.9), PointSet::EMPTY);
        assert_eq!(fam.proj_at(3.0), ctx.space().full_set());
        fam.check_axioms().unwrap();
    }

    #[test]
    fn cut_of_operator_examples() {
        let ctx = ctx_diag(&[1.0, -1.0]);
        let a = ctx.family_member("A").unwrap().clone();
        let cut = cut_of_operator(&a, &ctx).unwrap();
        assert_eq!(cut.values(), &[1.0, -1.0]);
        let zero = rat(0, 1);
        // 0 < 1 on the first atom only.
        assert!(cut.in_lower(&zero, PointSet::singleton(0)));
        assert!(!cut.in_lower(&zero, ctx.space().full_set()));
        // At the value itself neither side holds.
        let one = rat(1, 1);
        assert!(!cut.in_lower(&one, PointSet::singleton(0)));
        assert!(!cut.in_upper(&one, PointSet::singleton(0)));
    }

    #[test]
    fn constant_cut_has_global_interval_predicates() {
        let ctx = ctx_diag(&[2.0, 2.0]);
        let cut = DedekindCut::constant(2.0, ctx.atom_count(), ctx.tolerances().eig);
        for &q in ctx.space().opens() {
            if q.is_empty() {
                continue;
            }
            assert!(cut.in_upper(&rat(3, 1), q));
            assert!(!cut.in_upper(&rat(2, 1), q));
            assert!(cut.in_lower(&rat(1, 1), q));
        }
        // Equals the cut of 2*I.
        let a = ctx.family_member("A").unwrap().clone();
        assert_eq!(cut_of_operator(&a, &ctx).unwrap(), cut);
    }

    #[test]
    fn cut_axioms_pass_for_operator_cuts() {
        let ctx = ctx_diag(&[1.0, -1.0, 0.5, 2.5]);
        let a = ctx.family_member("A").unwrap().clone();
        let cut = cut_of_operator(&a, &ctx).unwrap();
        let report = check_cut_axioms(&cut, ctx.space());
        assert!(report.all_pass(), "{report:?}");
    }

    #[test]
    fn existential_upper_reading_fails_restriction_monotonicity() {
        let ctx = ctx_diag(&[1.0, -1.0]);
        let a = ctx.family_member("A").unwrap().clone();
        let cut = cut_of_operator(&a, &ctx).unwrap();
        let corrupted = ExistentialUpperReading(&cut);
        let report = check_cut_axioms(&corrupted, ctx.space());
        assert!(!report.restriction_monotone.pass);
        assert!(report.restriction_monotone.witness.is_some());
    }

    #[test]
    fn operator_cut_round_trip_on_diagonals() {
        let ctx = ctx_diag(&[1.0, -1.0]);
        let a = ctx.family_member("A").unwrap().clone();
        let cut = cut_of_operator(&a, &ctx).unwrap();
        let back = operator_of_cut(&cut, &ctx).unwrap();
        assert!(back.matrix().sub(a.matrix()).max_abs() < 1e-10);

        // Arbitrary per-atom values on a 4-atom context.
        let ctx4 = ctx_diag(&[1.0, 2.0, 3.0, 4.0]);
        let cut = DedekindCut::from_values(vec![2.0, 3.0, 5.0, 7.0], ctx4.tolerances().eig);
        let op = operator_of_cut(&cut, &ctx4).unwrap();
        let expected: Vec<f64> = (0..4)
            .map(|atom| {
                // atom order is by descending character of A
                let target = cut.values()[atom];
                let _ = atom;
                target
            })
            .collect();
        let round = cut_of_operator(&op, &ctx4).unwrap();
        for (got, want) in round.values().iter().zip(&expected) {
            assert!((got - want).abs() < 1e-10);
        }
    }

    #[test]
    fn constant_cut_reconstructs_scaled_identity() {
        let ctx = ctx_diag(&[1.0, -1.0]);
        let cut = DedekindCut::constant(0.75, 2, ctx.tolerances().eig);
        let op = operator_of_cut(&cut, &ctx).unwrap();
        let expected = crate::linalg::CMatrix::diag_real(&[0.75, 0.75]);
        assert!(op.matrix().sub(&expected).max_abs() < 1e-12);
    }

    #[test]
    fn reconstruction_lemma_route_agrees() {
        let ctx = ctx_diag(&[1.0, -1.0, 0.25]);
        let a = ctx.family_member("A").unwrap().clone();
        let cut = cut_of_operator(&a, &ctx).unwrap();
        let family = spectral_family_from_cut(&cut, &ctx).unwrap();
        for q in family.representative_thresholds() {
            let direct = family.proj_at_rational(&q);
            let via_lemma = level_via_upper_predicate(&cut, ctx.space(), &q);
            assert_eq!(direct, via_lemma, "at threshold {q}");
        }
    }

    #[test]
    fn forced_leq_examples() {
        let ctx = ctx_diag(&[1.0, -1.0]);
        let a = ctx.family_member("A").unwrap().clone();
        let x = cut_of_operator(&a, &ctx).unwrap();
        let zero = DedekindCut::constant(0.0, 2, ctx.tolerances().eig);
        // A <= 0 exactly on the atom with character -1 (index 1).
        assert_eq!(x.forced_leq(&zero).unwrap(), PointSet::singleton(1));
        // 0 <= A on the atom with character 1 (index 0).
        assert_eq!(zero.forced_leq(&x).unwrap(), PointSet::singleton(0));
        assert_eq!(x.forced_leq(&x).unwrap(), ctx.space().full_set());
        // Antisymmetry on the representation.
        let both = x.forced_leq(&zero).unwrap().inter(zero.forced_leq(&x).unwrap());
        assert_eq!(both, x.forced_eq(&zero).unwrap());
        assert!(both.is_empty());
    }

    #[test]
    fn interval_truth_examples() {
        let ctx = ctx_diag(&[1.0, -1.0]);
        let a = ctx.family_member("A").unwrap().clone();
        let open = interval_truth(&a, &rat(0, 1), &rat(2, 1), &ctx).unwrap();
        assert_eq!(open, PointSet::singleton(0));
        // Empty half-open interval.
        assert_eq!(
            interval_truth(&a, &rat(0, 1), &rat(0, 1), &ctx).unwrap(),
            PointSet::EMPTY
        );
        // Full range.
        assert_eq!(
            interval_truth(&a, &rat(-5, 1), &rat(5, 1), &ctx).unwrap(),
            ctx.space().full_set()
        );
        assert!(matches!(
            interval_truth(&a, &rat(2, 1), &rat(0, 1), &ctx),
            Err(Error::ReversedInterval { .. })
        ));
    }

    #[test]
    fn interval_probability_on_uniform_state() {
        let ctx = ctx_diag(&[1.0, -1.0]);
        let a = ctx.family_member("A").unwrap().clone();
        let h = StateVector::uniform(2);
        let p = interval_probability(&a, &rat(0, 1), &rat(2, 1), &h, &ctx).unwrap();
        assert!((p - 0.5).abs() < 1e-12);
        let all = interval_probability(&a, &rat(-2, 1), &rat(2, 1), &h, &ctx).unwrap();
        assert!((all - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cut_arithmetic() {
        let ctx = ctx_diag(&[1.0, -1.0]);
        let a = ctx.family_member("A").unwrap().clone();
        let x = cut_of_operator(&a, &ctx).unwrap();
        let zero = DedekindCut::constant(0.0, 2, ctx.tolerances().eig);
        assert_eq!(x.add(&zero).unwrap(), x);
        assert_eq!(x.scale(0.0), zero);
        let doubled = x.add(&x).unwrap();
        assert_eq!(doubled, x.scale(2.0));
        let other = DedekindCut::constant(0.0, 3, ctx.tolerances().eig);
        assert!(matches!(x.add(&other), Err(Error::ContextMismatch)));
    }
}

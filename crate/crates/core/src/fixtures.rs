//! Bundled fixtures and seeded random generators.
//!
//! The fixtures reproduce the worked behaviors the rest of the crate is
//! tested against: the two-point non-Hausdorff space where excluded middle
//! fails at the closed point, small exactness counterexamples, and random
//! topologies/presheaves for the law suites. Generated presheaves are built
//! stalk-first (a quotient of a fixed value set at every point, with
//! quotient maps along specialization), so they satisfy the presheaf laws
//! and exactness by construction.

use crate::forcing::{Presheaf, PresheafBuilder, SectionRef};
use crate::formula::Formula;
use crate::linalg::{orthonormalize_columns, vec_norm, CMatrix, C64};
use crate::quantum::{HermitianOperator, StateVector};
use crate::topology::{FiniteSpace, PointSet};
use rand::prelude::IndexedRandom;
use rand::Rng;
use std::collections::BTreeMap;

/// The two-point space with opens {}, {"1"}, {"0","1"}: the finite analog of
/// a line with a doubled origin seen from the bad point.
pub fn sierpinski_space() -> FiniteSpace {
    FiniteSpace::new(
        vec!["0".into(), "1".into()],
        vec![PointSet::EMPTY, PointSet::singleton(1), PointSet::full(2)],
    )
    .expect("valid fixture")
}

/// Two global sections `a`, `b` over [`sierpinski_space`] that agree on {1}
/// but have distinct germs at 0. Equality between them is forced exactly on
/// {1}, so excluded middle fails at 0.
pub fn non_hausdorff() -> Presheaf {
    let space = sierpinski_space();
    let one = PointSet::singleton(1);
    let full = space.full_set();
    let mut b = PresheafBuilder::new(space);
    b.sections(PointSet::EMPTY, ["e"]);
    b.sections(one, ["s"]);
    b.sections(full, ["a", "b"]);
    b.restriction(full, one, "a", "s");
    b.restriction(full, one, "b", "s");
    b.restriction(full, PointSet::EMPTY, "a", "e");
    b.restriction(full, PointSet::EMPTY, "b", "e");
    b.restriction(one, PointSet::EMPTY, "s", "e");
    b.constant("a", "a");
    b.constant("b", "b");
    b.domain(
        "S",
        [
            SectionRef::new(full, "a"),
            SectionRef::new(full, "b"),
        ],
    );
    b.build().expect("valid fixture")
}

/// Two global sections over the discrete two-point space restricting to the
/// same singleton sections: the compatible singleton family has two gluings,
/// so the presheaf is not exact.
pub fn double_gluing() -> Presheaf {
    let space = FiniteSpace::power_set(vec!["s1".into(), "s2".into()]).expect("valid fixture");
    let s1 = PointSet::singleton(0);
    let s2 = PointSet::singleton(1);
    let full = space.full_set();
    let mut b = PresheafBuilder::new(space);
    b.sections(PointSet::EMPTY, ["e"]);
    b.sections(s1, ["u1"]);
    b.sections(s2, ["u2"]);
    b.sections(full, ["a", "b"]);
    for id in ["a", "b"] {
        b.restriction(full, s1, id, "u1");
        b.restriction(full, s2, id, "u2");
        b.restriction(full, PointSet::EMPTY, id, "e");
    }
    b.restriction(s1, PointSet::EMPTY, "u1", "e");
    b.restriction(s2, PointSet::EMPTY, "u2", "e");
    b.build().expect("valid fixture")
}

/// A presheaf over the indiscrete two-point space; the only covers are
/// trivial, so exactness holds vacuously.
pub fn indiscrete_pair() -> Presheaf {
    let space = FiniteSpace::new(
        vec!["0".into(), "1".into()],
        vec![PointSet::EMPTY, PointSet::full(2)],
    )
    .expect("valid fixture");
    let full = space.full_set();
    let mut b = PresheafBuilder::new(space);
    b.sections(PointSet::EMPTY, ["e"]);
    b.sections(full, ["a", "b"]);
    b.restriction(full, PointSet::EMPTY, "a", "e");
    b.restriction(full, PointSet::EMPTY, "b", "e");
    b.constant("a", "a");
    b.constant("b", "b");
    b.build().expect("valid fixture")
}

/// Every topology on `n` labeled points (`p0..`), enumerated by filtering
/// all families of subsets that contain the empty and full sets for closure
/// under union and intersection. Feasible for `n <= 4`.
pub fn all_topologies(n: usize) -> Vec<FiniteSpace> {
    assert!(n <= 4, "exhaustive enumeration is for n <= 4");
    let points: Vec<String> = (0..n).map(|i| format!("p{i}")).collect();
    let subset_count = 1usize << n;
    let full = (subset_count - 1) as u64;
    // Candidate families are encoded as bit patterns over the 2^n subsets;
    // the empty set (subset 0) and the full set are forced members.
    let free = subset_count - 2;
    let mut spaces = Vec::new();
    for code in 0..(1u64 << free) {
        let mut member = vec![false; subset_count];
        member[0] = true;
        member[subset_count - 1] = true;
        let mut bit = 0;
        for (s, m) in member.iter_mut().enumerate() {
            if s == 0 || s == subset_count - 1 {
                continue;
            }
            *m = code >> bit & 1 == 1;
            bit += 1;
        }
        let opens: Vec<u64> = (0..subset_count as u64).filter(|&s| member[s as usize]).collect();
        let closed = opens.iter().all(|&a| {
            opens
                .iter()
                .all(|&b| member[(a | b) as usize] && member[(a & b) as usize])
        });
        if closed {
            debug_assert!(member[0] && member[full as usize]);
            spaces.push(
                FiniteSpace::new(points.clone(), opens.into_iter().map(PointSet))
                    .expect("closure checked"),
            );
        }
    }
    spaces
}

/// A random topology on 1..=max_points points: random generator subsets
/// closed under union and intersection.
pub fn random_topology<R: Rng>(rng: &mut R, max_points: usize) -> FiniteSpace {
    let n = rng.random_range(1..=max_points);
    let points: Vec<String> = (0..n).map(|i| format!("p{i}")).collect();
    let full = PointSet::full(n);
    let seeds = rng.random_range(0..=n + 1);
    let mut opens: Vec<PointSet> = vec![PointSet::EMPTY, full];
    for _ in 0..seeds {
        let mask = PointSet(rng.random_range(0..(1u64 << n)));
        if !opens.contains(&mask) {
            opens.push(mask);
        }
    }
    // Close under pairwise union/intersection to a fixpoint.
    loop {
        let mut added = false;
        let snapshot = opens.clone();
        for (i, &a) in snapshot.iter().enumerate() {
            for &b in &snapshot[i + 1..] {
                for c in [a.union(b), a.inter(b)] {
                    if !opens.contains(&c) {
                        opens.push(c);
                        added = true;
                    }
                }
            }
        }
        if !added {
            break;
        }
    }
    FiniteSpace::new(points, opens).expect("closure reached")
}

/// A presheaf generated stalk-first over `space`.
///
/// Every point carries a quotient of the value set `0..values`; quotients
/// coarsen along specialization, so quotient maps serve as germ restrictions
/// and sections over an open are the compatible families of classes. The
/// result is exact by construction and carries a unary relation `R` (classes
/// meeting a random base subset), constants `a`/`b` when global sections
/// exist, and the domain `S` of all global sections.
pub fn random_presheaf<R: Rng>(rng: &mut R, space: &FiniteSpace, values: usize) -> Presheaf {
    let n = space.point_count();
    debug_assert!((1..=9).contains(&values));

    // Random partition of 0..values per point, as class-of maps.
    let base: Vec<Vec<usize>> = (0..n)
        .map(|_| random_partition(rng, values))
        .collect();
    // theta[x] = common refinement of the base partitions of all points
    // whose minimal neighborhood sits inside that of x.
    let theta: Vec<Vec<usize>> = (0..n)
        .map(|x| {
            let nx = space.minimal_neighborhood(x);
            let sig: Vec<Vec<usize>> = base
                .iter()
                .enumerate()
                .filter(|(y, _)| space.minimal_neighborhood(*y).is_subset(nx))
                .map(|(_, m)| m.clone())
                .collect();
            refine_all(values, &sig)
        })
        .collect();
    // Canonical class representative: minimum member value.
    let class_rep = |x: usize, v: usize| -> usize {
        (0..values).find(|&w| theta[x][w] == theta[x][v]).unwrap()
    };

    // Sections over U: compatible class assignments, id = representative
    // digits at the points of U in order.
    let mut sections_by_open: BTreeMap<PointSet, Vec<Vec<usize>>> = BTreeMap::new();
    for &u in space.opens() {
        let pts: Vec<usize> = u.iter().collect();
        let mut found: Vec<Vec<usize>> = Vec::new();
        let mut assign: Vec<usize> = Vec::new();
        enumerate_sections(space, &theta, &class_rep, &pts, &mut assign, &mut found, values);
        sections_by_open.insert(u, found);
    }
    let id_of = |u: PointSet, assign: &[usize]| -> String {
        if assign.is_empty() {
            "e".to_string()
        } else {
            let digits: String = assign.iter().map(|c| c.to_string()).collect();
            let _ = u;
            format!("g{digits}")
        }
    };

    let mut b = PresheafBuilder::new(space.clone());
    for (&u, secs) in &sections_by_open {
        let ids: Vec<String> = secs.iter().map(|a| id_of(u, a)).collect();
        b.sections(u, ids);
    }
    // Restrictions: drop points.
    for (&u, secs) in &sections_by_open {
        let pts: Vec<usize> = u.iter().collect();
        for &v in space.opens() {
            if v == u || !v.is_subset(u) {
                continue;
            }
            for assign in secs {
                let sub: Vec<usize> = pts
                    .iter()
                    .zip(assign)
                    .filter(|(p, _)| v.contains(**p))
                    .map(|(_, &c)| c)
                    .collect();
                b.restriction(u, v, id_of(u, assign), id_of(v, &sub));
            }
        }
    }
    // Unary relation R from a random base subset of values, realized
    // pointwise: a section is in R over U when at every point of U its
    // class contains a base value.
    let rel_base: Vec<bool> = (0..values).map(|_| rng.random_bool(0.5)).collect();
    if rel_base.iter().any(|&t| t) {
        for (&u, secs) in &sections_by_open {
            let pts: Vec<usize> = u.iter().collect();
            for assign in secs {
                let holds = pts.iter().zip(assign).all(|(&x, &c)| {
                    (0..values).any(|v| theta[x][v] == theta[x][c] && rel_base[v])
                });
                if holds {
                    b.relation("R", u, [id_of(u, assign)]);
                }
            }
        }
    }
    // Constants and the domain of all global sections.
    let full = space.full_set();
    let globals = &sections_by_open[&full];
    if let Some(first) = globals.first() {
        b.constant("a", id_of(full, first));
        let second = globals.choose(rng).unwrap_or(first);
        b.constant("b", id_of(full, second));
        b.domain(
            "S",
            globals
                .iter()
                .map(|a| SectionRef::new(full, id_of(full, a))),
        );
    }
    b.build().expect("stalk-first construction is law-abiding")
}

/// A commuting Hermitian family together with the data it was built from:
/// the joint eigenbasis and each operator's eigenvalue per basis column.
/// The construction data serves as an oracle side independent of the
/// eigensolver pipeline.
pub struct GeneratedFamily {
    pub ops: Vec<HermitianOperator>,
    pub basis: CMatrix,
    /// `column_values[j][k]` is operator j's eigenvalue on basis column k.
    pub column_values: Vec<Vec<f64>>,
}

/// Random commuting family: a random orthonormal joint basis and integer
/// spectra constant on randomly chosen column groups.
pub fn random_commuting_family<R: Rng>(
    rng: &mut R,
    dim: usize,
    op_count: usize,
) -> GeneratedFamily {
    let mut raw = CMatrix::zeros(dim, dim);
    for i in 0..dim {
        for j in 0..dim {
            raw[(i, j)] = C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        }
    }
    let basis = orthonormalize_columns(&raw);
    let group_count = rng.random_range(1..=dim);
    let groups: Vec<usize> = (0..dim).map(|_| rng.random_range(0..group_count)).collect();
    let mut ops = Vec::with_capacity(op_count);
    let mut column_values = Vec::with_capacity(op_count);
    for j in 0..op_count {
        let per_group: Vec<f64> = (0..group_count)
            .map(|_| rng.random_range(-3i64..=3) as f64)
            .collect();
        let values: Vec<f64> = groups.iter().map(|&g| per_group[g]).collect();
        let m = basis
            .mul(&CMatrix::diag_real(&values))
            .mul(&basis.adjoint());
        // Symmetrize away the last float ulps so the Hermitian check is
        // exact at default tolerance.
        let m = m.add(&m.adjoint()).scale(0.5);
        ops.push(
            HermitianOperator::new(format!("O{j}"), m, &crate::quantum::Tolerances::default())
                .expect("construction is Hermitian"),
        );
        column_values.push(values);
    }
    GeneratedFamily {
        ops,
        basis,
        column_values,
    }
}

/// A random unit state vector.
pub fn random_state<R: Rng>(rng: &mut R, dim: usize) -> StateVector {
    loop {
        let amps: Vec<C64> = (0..dim)
            .map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        let norm = vec_norm(&amps);
        if norm > 1e-3 {
            return StateVector::new(amps.into_iter().map(|a| a / norm).collect(), 1e-9)
                .expect("normalized");
        }
    }
}

/// Atom shapes available to the random formula generator.
#[derive(Debug, Clone)]
pub struct FormulaGenConfig {
    pub constants: Vec<String>,
    pub domains: Vec<String>,
    /// Relation names with their arities.
    pub relations: Vec<(String, usize)>,
    /// Allow `<=` atoms and rational literals.
    pub with_order: bool,
    /// Allow `in` atoms.
    pub with_membership: bool,
}

/// A random closed formula over the configured symbols.
pub fn random_formula<R: Rng>(rng: &mut R, cfg: &FormulaGenConfig, depth: usize) -> Formula {
    let mut bound = Vec::new();
    random_formula_inner(rng, cfg, depth, &mut bound)
}

fn random_term<R: Rng>(rng: &mut R, cfg: &FormulaGenConfig, bound: &[String]) -> crate::formula::Term {
    use crate::formula::Term;
    assert!(!cfg.constants.is_empty(), "generator needs constants");
    loop {
        match rng.random_range(0..3) {
            0 => return Term::Const(cfg.constants.choose(rng).unwrap().clone()),
            1 if !bound.is_empty() => {
                return Term::Var(bound.choose(rng).unwrap().clone());
            }
            2 if cfg.with_order => {
                return Term::rational_from_parts(rng.random_range(-6..=6), rng.random_range(1..=3));
            }
            _ => continue,
        }
    }
}

fn random_atom<R: Rng>(rng: &mut R, cfg: &FormulaGenConfig, bound: &[String]) -> Formula {
    let mut kinds = vec![0];
    if cfg.with_order {
        kinds.push(1);
    }
    if cfg.with_membership {
        kinds.push(2);
    }
    if !cfg.relations.is_empty() {
        kinds.push(3);
    }
    match kinds.choose(rng).unwrap() {
        0 => Formula::Equals(random_term(rng, cfg, bound), random_term(rng, cfg, bound)),
        1 => Formula::Leq(random_term(rng, cfg, bound), random_term(rng, cfg, bound)),
        2 => Formula::In(random_term(rng, cfg, bound), random_term(rng, cfg, bound)),
        _ => {
            let (name, arity) = cfg.relations.choose(rng).unwrap();
            Formula::Relation(
                name.clone(),
                (0..*arity).map(|_| random_term(rng, cfg, bound)).collect(),
            )
        }
    }
}

fn random_formula_inner<R: Rng>(
    rng: &mut R,
    cfg: &FormulaGenConfig,
    depth: usize,
    bound: &mut Vec<String>,
) -> Formula {
    if depth == 0 {
        return random_atom(rng, cfg, bound);
    }
    match rng.random_range(0..8) {
        0 => random_atom(rng, cfg, bound),
        1 => Formula::and(
            random_formula_inner(rng, cfg, depth - 1, bound),
            random_formula_inner(rng, cfg, depth - 1, bound),
        ),
        2 => Formula::or(
            random_formula_inner(rng, cfg, depth - 1, bound),
            random_formula_inner(rng, cfg, depth - 1, bound),
        ),
        3 => Formula::not(random_formula_inner(rng, cfg, depth - 1, bound)),
        4 => Formula::implies(
            random_formula_inner(rng, cfg, depth - 1, bound),
            random_formula_inner(rng, cfg, depth - 1, bound),
        ),
        5 | 6 if !cfg.domains.is_empty() => {
            let var = format!("v{}", bound.len());
            let domain = cfg.domains.choose(rng).unwrap().clone();
            bound.push(var.clone());
            let body = random_formula_inner(rng, cfg, depth - 1, bound);
            bound.pop();
            if rng.random_bool(0.5) {
                Formula::Forall(var, domain, Box::new(body))
            } else {
                Formula::Exists(var, domain, Box::new(body))
            }
        }
        _ => random_atom(rng, cfg, bound),
    }
}

/// The family behind the two-level worked example: one observable with
/// eigenvalues 1 and -1.
pub fn takeuti_2dim_family() -> Vec<HermitianOperator> {
    vec![HermitianOperator::diagonal("A", &[1.0, -1.0])]
}

/// Two commuting four-level observables with the four joint sign patterns.
pub fn collapse_4dim_family() -> Vec<HermitianOperator> {
    vec![
        HermitianOperator::diagonal("A", &[1.0, 1.0, -1.0, -1.0]),
        HermitianOperator::diagonal("B", &[1.0, -1.0, 1.0, -1.0]),
    ]
}

fn random_partition<R: Rng>(rng: &mut R, values: usize) -> Vec<usize> {
    // class-of map onto a random number of blocks
    let blocks = rng.random_range(1..=values);
    (0..values)
        .map(|_| rng.random_range(0..blocks))
        .collect()
}

/// Common refinement of several class-of maps: two values are equivalent
/// when every map agrees on them.
fn refine_all(values: usize, maps: &[Vec<usize>]) -> Vec<usize> {
    let mut class_of = vec![usize::MAX; values];
    let mut next = 0;
    for v in 0..values {
        if class_of[v] != usize::MAX {
            continue;
        }
        class_of[v] = next;
        for w in v + 1..values {
            if class_of[w] == usize::MAX && maps.iter().all(|m| m[v] == m[w]) {
                class_of[w] = next;
            }
        }
        next += 1;
    }
    class_of
}

fn enumerate_sections(
    space: &FiniteSpace,
    theta: &[Vec<usize>],
    class_rep: &dyn Fn(usize, usize) -> usize,
    pts: &[usize],
    assign: &mut Vec<usize>,
    found: &mut Vec<Vec<usize>>,
    values: usize,
) {
    if assign.len() == pts.len() {
        found.push(assign.clone());
        return;
    }
    let x = pts[assign.len()];
    'candidate: for v in 0..values {
        let c = class_rep(x, v);
        if c != v {
            continue; // one candidate per class
        }
        // Compatibility with already-assigned points: when one minimal
        // neighborhood contains the other, the germ map (identity on
        // representatives, then reclassify) must match.
        for (k, &y) in pts[..assign.len()].iter().enumerate() {
            let ny = space.minimal_neighborhood(y);
            let nx = space.minimal_neighborhood(x);
            if nx.is_subset(ny) {
                // germ at y determines germ at x
                if theta[x][assign[k]] != theta[x][c] {
                    continue 'candidate;
                }
            }
            if ny.is_subset(nx) && theta[y][assign[k]] != theta[y][c] {
                continue 'candidate;
            }
        }
        assign.push(c);
        enumerate_sections(space, theta, class_rep, pts, assign, found, values);
        assign.pop();
    }
}

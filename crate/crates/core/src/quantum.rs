//! Finite quantum contexts built from commuting Hermitian observables.
//!
//! A context is the finite-dimensional Gelfand picture of the abelian
//! algebra the family generates: atoms are the joint eigenspaces, each atom
//! carries a character (one eigenvalue per family member), and the base
//! space has the atoms as points with every subset open. Opens correspond
//! to projections and a state vector induces the Born measure on them.

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, inner, vec_norm, CMatrix, C64};
use crate::topology::{FiniteSpace, PointSet};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::collections::BTreeMap;

/// Tolerances used along the numeric pipeline.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Tolerances {
    /// Accepted deviation from self-adjointness.
    pub herm: f64,
    /// Accepted pairwise commutator norm, also used for membership in the
    /// algebra (off-block mass in the joint basis).
    pub comm: f64,
    /// Eigenvalue clustering threshold; also the snapping width when
    /// comparing rationals against eigenvalues.
    pub eig: f64,
}

impl Default for Tolerances {
    fn default() -> Tolerances {
        Tolerances {
            herm: 1e-10,
            comm: 1e-9,
            eig: 1e-8,
        }
    }
}

/// A named self-adjoint operator.
#[derive(Debug, Clone)]
pub struct HermitianOperator {
    name: String,
    matrix: CMatrix,
}

impl HermitianOperator {
    pub fn new(name: impl Into<String>, matrix: CMatrix, tol: &Tolerances) -> Result<Self> {
        let name = name.into();
        if matrix.n_rows() != matrix.n_cols() {
            return Err(Error::DimMismatch {
                name,
                got: matrix.n_rows().max(matrix.n_cols()),
                expected: matrix.n_rows().min(matrix.n_cols()),
            });
        }
        let deviation = matrix.hermitian_deviation();
        if deviation > tol.herm {
            return Err(Error::NotHermitian {
                name,
                deviation,
                tol: tol.herm,
            });
        }
        Ok(HermitianOperator { name, matrix })
    }

    pub fn diagonal(name: impl Into<String>, values: &[f64]) -> Self {
        HermitianOperator {
            name: name.into(),
            matrix: CMatrix::diag_real(values),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.matrix.n_rows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// Product of commuting Hermitian operators (itself Hermitian).
    pub fn product(&self, other: &HermitianOperator) -> HermitianOperator {
        HermitianOperator {
            name: format!("{}*{}", self.name, other.name),
            matrix: self.matrix.mul(&other.matrix),
        }
    }

    pub fn sum(&self, other: &HermitianOperator) -> HermitianOperator {
        HermitianOperator {
            name: format!("{}+{}", self.name, other.name),
            matrix: self.matrix.add(&other.matrix),
        }
    }
}

/// A (by default normalized) Hilbert-space vector.
#[derive(Debug, Clone)]
pub struct StateVector {
    amplitudes: Vec<C64>,
}

impl StateVector {
    pub fn new(amplitudes: Vec<C64>, tol: f64) -> Result<StateVector> {
        let norm = vec_norm(&amplitudes);
        if (norm - 1.0).abs() > tol {
            return Err(Error::NotNormalized(norm));
        }
        Ok(StateVector { amplitudes })
    }

    /// Accepts any nonzero vector without normalizing it.
    pub fn new_unnormalized(amplitudes: Vec<C64>) -> StateVector {
        StateVector { amplitudes }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn uniform(dim: usize) -> StateVector {
        let a = 1.0 / (dim as f64).sqrt();
        StateVector {
            amplitudes: vec![C64::new(a, 0.0); dim],
        }
    }
}

/// A joint eigenspace of the family: an orthonormal basis block plus one
/// eigenvalue per family member.
#[derive(Debug, Clone)]
pub struct Atom {
    label: String,
    character: Vec<f64>,
    basis: Vec<Vec<C64>>,
    projector: CMatrix,
}

impl Atom {
    pub fn label(&self) -> &str {
        &self.label
    }

    /// One eigenvalue per family member, in family order.
    pub fn character(&self) -> &[f64] {
        &self.character
    }

    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<C64>] {
        &self.basis
    }

    pub fn projector(&self) -> &CMatrix {
        &self.projector
    }
}

#[derive(Debug, Clone)]
pub struct QuantumContext {
    dim: usize,
    family: Vec<HermitianOperator>,
    atoms: Vec<Atom>,
    space: FiniteSpace,
    tol: Tolerances,
}

/// Joint eigendecomposition of a pairwise-commuting Hermitian family and
/// the Boolean base space over its atoms.
pub fn build_context(family: Vec<HermitianOperator>, tol: Tolerances) -> Result<QuantumContext> {
    if family.is_empty() {
        return Err(Error::EmptyFamily);
    }
    let dim = family[0].dim();
    for op in &family {
        if op.dim() != dim {
            return Err(Error::DimMismatch {
                name: op.name.clone(),
                got: op.dim(),
                expected: dim,
            });
        }
        let deviation = op.matrix.hermitian_deviation();
        if deviation > tol.herm {
            return Err(Error::NotHermitian {
                name: op.name.clone(),
                deviation,
                tol: tol.herm,
            });
        }
    }
    for (i, a) in family.iter().enumerate() {
        for b in &family[i + 1..] {
            let norm = a.matrix.commutator_norm(&b.matrix);
            if norm > tol.comm {
                return Err(Error::NotCommuting {
                    a: a.name.clone(),
                    b: b.name.clone(),
                    norm,
                    tol: tol.comm,
                });
            }
        }
    }

    // Sequential refinement: each operator splits every current block into
    // eigenvalue clusters of its compression to that block.
    struct Block {
        basis: Vec<Vec<C64>>,
        character: Vec<f64>,
    }
    let identity = CMatrix::identity(dim);
    let mut blocks = vec![Block {
        basis: (0..dim).map(|j| identity.column(j)).collect(),
        character: Vec::new(),
    }];
    for op in &family {
        let mut refined = Vec::new();
        for block in &blocks {
            let q = CMatrix::from_columns(dim, &block.basis);
            let compressed = q.adjoint().mul(&op.matrix).mul(&q);
            let (values, w) = hermitian_eig(&compressed, 1e-12)?;
            let rotated = q.mul(&w);
            // Transitive-closure clustering on the sorted eigenvalues:
            // a gap above tol.eig starts a new cluster.
            let mut start = 0;
            while start < values.len() {
                let mut end = start + 1;
                while end < values.len() && values[end] - values[end - 1] <= tol.eig {
                    end += 1;
                }
                let mean = values[start..end].iter().sum::<f64>() / (end - start) as f64;
                let mut character = block.character.clone();
                character.push(mean);
                refined.push(Block {
                    basis: (start..end).map(|j| rotated.column(j)).collect(),
                    character,
                });
                start = end;
            }
        }
        blocks = refined;
    }

    // Deterministic atom order: lexicographic by character vector
    // (descending), original index as tie-break.
    let mut order: Vec<usize> = (0..blocks.len()).collect();
    order.sort_by(|&i, &j| {
        let (a, b) = (&blocks[i].character, &blocks[j].character);
        for (x, y) in a.iter().zip(b) {
            match y.partial_cmp(x).unwrap() {
                std::cmp::Ordering::Equal => continue,
                ord => return ord,
            }
        }
        i.cmp(&j)
    });

    let mut atoms = Vec::with_capacity(blocks.len());
    for (rank, &bi) in order.iter().enumerate() {
        let block = &blocks[bi];
        let q = CMatrix::from_columns(dim, &block.basis);
        let projector = q.mul(&q.adjoint());
        atoms.push(Atom {
            label: format!("a{rank}"),
            character: block.character.clone(),
            basis: block.basis.clone(),
            projector,
        });
    }
    let space = FiniteSpace::power_set(atoms.iter().map(|a| a.label.clone()).collect())
        .map_err(|e| match e {
            Error::TooManyPoints(n, cap) => Error::TooManyAtoms(n, cap),
            other => other,
        })?;
    Ok(QuantumContext {
        dim,
        family,
        atoms,
        space,
        tol,
    })
}

impl QuantumContext {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn family(&self) -> &[HermitianOperator] {
        &self.family
    }

    pub fn family_member(&self, name: &str) -> Result<&HermitianOperator> {
        self.family
            .iter()
            .find(|op| op.name == name)
            .ok_or_else(|| Error::UnknownConstant(name.to_string()))
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn atom_count(&self) -> usize {
        self.atoms.len()
    }

    pub fn atom_index(&self, label: &str) -> Result<usize> {
        self.atoms
            .iter()
            .position(|a| a.label == label)
            .ok_or_else(|| Error::UnknownAtom(label.to_string()))
    }

    /// The Boolean space whose points are atoms and whose opens are all
    /// atom subsets.
    pub fn space(&self) -> &FiniteSpace {
        &self.space
    }

    pub fn tolerances(&self) -> &Tolerances {
        &self.tol
    }

    /// Eigenvalue of `op` on the atom's joint eigenspace.
    ///
    /// `op` must lie in the context's algebra: block-diagonal in the joint
    /// basis with a constant value on every atom block.
    pub fn character_eval(&self, atom: usize, op: &HermitianOperator) -> Result<f64> {
        Ok(self.characters_of(op)?[atom])
    }

    /// All character values of `op` at once, validating membership in the
    /// algebra: compressions must be scalar on every atom block and the
    /// cross-block mass must vanish.
    pub fn characters_of(&self, op: &HermitianOperator) -> Result<Vec<f64>> {
        if op.dim() != self.dim {
            return Err(Error::DimMismatch {
                name: op.name.clone(),
                got: op.dim(),
                expected: self.dim,
            });
        }
        let mut values = Vec::with_capacity(self.atoms.len());
        let columns: Vec<(usize, Vec<C64>)> = self
            .atoms
            .iter()
            .enumerate()
            .flat_map(|(ai, a)| a.basis.iter().cloned().map(move |c| (ai, c)))
            .collect();
        // Images of all basis vectors under op, for off-block checks.
        let images: Vec<(usize, Vec<C64>)> = columns
            .iter()
            .map(|(ai, c)| (*ai, op.matrix.mul_vec(c)))
            .collect();
        for (ai, atom) in self.atoms.iter().enumerate() {
            let mut value = None;
            for (bi, (aj, img)) in images.iter().enumerate() {
                for (ci, (ak, col)) in columns.iter().enumerate() {
                    let amp = inner(col, img);
                    if *aj == ai && *ak == ai {
                        if bi == ci {
                            let v = amp.re;
                            if amp.im.abs() > self.tol.comm {
                                return Err(Error::NotInAlgebra {
                                    name: op.name.clone(),
                                    reason: format!(
                                        "complex diagonal value on atom {}",
                                        atom.label
                                    ),
                                });
                            }
                            match value {
                                None => value = Some(v),
                                Some(prev) if (prev - v).abs() <= self.tol.eig.max(self.tol.comm) => {}
                                Some(prev) => {
                                    return Err(Error::NotInAlgebra {
                                        name: op.name.clone(),
                                        reason: format!(
                                            "non-constant on atom {} ({prev} vs {v}); \
                                             the operator refines this context",
                                            atom.label
                                        ),
                                    });
                                }
                            }
                        } else if amp.norm() > self.tol.comm {
                            return Err(Error::NotInAlgebra {
                                name: op.name.clone(),
                                reason: format!(
                                    "not diagonal inside atom {} (entry {amp})",
                                    atom.label
                                ),
                            });
                        }
                    } else if *aj == ai && *ak != ai && amp.norm() > self.tol.comm {
                        return Err(Error::NotInAlgebra {
                            name: op.name.clone(),
                            reason: format!(
                                "couples atoms {} and {} (entry {amp})",
                                self.atoms[*aj].label, self.atoms[*ak].label
                            ),
                        });
                    }
                }
            }
            values.push(value.expect("atom blocks are nonempty"));
        }
        Ok(values)
    }

    /// Sum of atom projectors over the subset; an idempotent Hermitian
    /// operator named after the open.
    pub fn projection_of(&self, open: PointSet) -> HermitianOperator {
        let mut m = CMatrix::zeros(self.dim, self.dim);
        for i in open.iter() {
            m = m.add(&self.atoms[i].projector);
        }
        HermitianOperator {
            name: format!("P{}", self.space.set_label(open)),
            matrix: m,
        }
    }

    /// The Born measure of the open under the state: `||P' h||^2`.
    pub fn born_measure(&self, state: &StateVector, open: PointSet) -> Result<f64> {
        if state.dim() != self.dim {
            return Err(Error::StateDimMismatch {
                got: state.dim(),
                expected: self.dim,
            });
        }
        let projected = self.projection_of(open).matrix.mul_vec(state.amplitudes());
        Ok(projected.iter().map(|c| c.norm_sqr()).sum())
    }
}

// -- JSON schemas -------------------------------------------------------

fn matrix_to_json(m: &CMatrix) -> Vec<Vec<[f64; 2]>> {
    (0..m.n_rows())
        .map(|i| (0..m.n_cols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

fn matrix_from_json(rows: &[Vec<[f64; 2]>]) -> Result<CMatrix> {
    let n = rows.len();
    for (i, row) in rows.iter().enumerate() {
        if row.len() != n {
            return Err(Error::Schema {
                pointer: format!("/matrix/{i}"),
                msg: format!("row has {} entries, expected {n}", row.len()),
            });
        }
    }
    Ok(CMatrix::from_rows(
        rows.iter()
            .map(|row| row.iter().map(|&[re, im]| C64::new(re, im)).collect())
            .collect(),
    ))
}

#[derive(Serialize, Deserialize)]
struct OperatorRepr {
    name: String,
    matrix: Vec<Vec<[f64; 2]>>,
}

/// `{"dim": n, "operators": [{"name": ..., "matrix": [[[re,im],...],...]}]}`
#[derive(Serialize, Deserialize)]
pub struct ObservablesFile {
    pub dim: usize,
    operators: Vec<OperatorRepr>,
}

impl ObservablesFile {
    pub fn from_family(family: &[HermitianOperator]) -> ObservablesFile {
        ObservablesFile {
            dim: family.first().map_or(0, HermitianOperator::dim),
            operators: family
                .iter()
                .map(|op| OperatorRepr {
                    name: op.name.clone(),
                    matrix: matrix_to_json(&op.matrix),
                })
                .collect(),
        }
    }

    pub fn into_family(self, tol: &Tolerances) -> Result<Vec<HermitianOperator>> {
        let mut family = Vec::with_capacity(self.operators.len());
        for (i, op) in self.operators.into_iter().enumerate() {
            let matrix = matrix_from_json(&op.matrix).map_err(|e| match e {
                Error::Schema { pointer, msg } => Error::Schema {
                    pointer: format!("/operators/{i}{pointer}"),
                    msg,
                },
                other => other,
            })?;
            if matrix.n_rows() != self.dim {
                return Err(Error::Schema {
                    pointer: format!("/operators/{i}/matrix"),
                    msg: format!("operator is {}x{}, file says dim {}", matrix.n_rows(), matrix.n_cols(), self.dim),
                });
            }
            family.push(HermitianOperator::new(op.name, matrix, tol)?);
        }
        Ok(family)
    }
}

/// `{"amplitudes": [[re,im],...]}`
#[derive(Serialize, Deserialize)]
pub struct StateFile {
    amplitudes: Vec<[f64; 2]>,
}

impl StateFile {
    pub fn from_state(state: &StateVector) -> StateFile {
        StateFile {
            amplitudes: state.amplitudes().iter().map(|c| [c.re, c.im]).collect(),
        }
    }

    pub fn into_state(self, tol: f64, allow_unnormalized: bool) -> Result<StateVector> {
        let amps = self
            .amplitudes
            .into_iter()
            .map(|[re, im]| C64::new(re, im))
            .collect();
        if allow_unnormalized {
            Ok(StateVector::new_unnormalized(amps))
        } else {
            StateVector::new(amps, tol)
        }
    }
}

#[derive(Serialize, Deserialize)]
struct AtomRepr {
    label: String,
    character: BTreeMap<String, f64>,
    dimension: usize,
}

#[derive(Serialize, Deserialize)]
struct ContextRepr {
    dim: usize,
    operators: Vec<OperatorRepr>,
    atoms: Vec<AtomRepr>,
    space: FiniteSpace,
    tolerances: Tolerances,
}

impl Serialize for QuantumContext {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        ContextRepr {
            dim: self.dim,
            operators: self
                .family
                .iter()
                .map(|op| OperatorRepr {
                    name: op.name.clone(),
                    matrix: matrix_to_json(&op.matrix),
                })
                .collect(),
            atoms: self
                .atoms
                .iter()
                .map(|a| AtomRepr {
                    label: a.label.clone(),
                    character: self
                        .family
                        .iter()
                        .zip(&a.character)
                        .map(|(op, &v)| (op.name.clone(), v))
                        .collect(),
                    dimension: a.dimension(),
                })
                .collect(),
            space: self.space.clone(),
            tolerances: self.tol,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for QuantumContext {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = ContextRepr::deserialize(deserializer)?;
        let tols = repr.tolerances;
        let family = ObservablesFile {
            dim: repr.dim,
            operators: repr.operators,
        }
        .into_family(&tols)
        .map_err(D::Error::custom)?;
        // The atom table is derived data; rebuild and cross-check the labels.
        let ctx = build_context(family, tols).map_err(D::Error::custom)?;
        if ctx.atoms.len() != repr.atoms.len() {
            return Err(D::Error::custom(format!(
                "context file lists {} atoms but the operators produce {}",
                repr.atoms.len(),
                ctx.atoms.len()
            )));
        }
        Ok(ctx)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn two_level_context_from_diag() {
        let a = HermitianOperator::diagonal("A", &[1.0, -1.0]);
        let ctx = build_context(vec![a], tol()).unwrap();
        assert_eq!(ctx.atom_count(), 2);
        // Descending character order: (1) then (-1).
        assert_eq!(ctx.atoms()[0].character(), &[1.0]);
        assert_eq!(ctx.atoms()[1].character(), &[-1.0]);
        assert_eq!(ctx.atoms()[0].label(), "a0");
        assert_eq!(ctx.space().opens().len(), 4);
    }

    #[test]
    fn four_level_context_from_two_diagonals() {
        let a = HermitianOperator::diagonal("A", &[1.0, 1.0, -1.0, -1.0]);
        let b = HermitianOperator::diagonal("B", &[1.0, -1.0, 1.0, -1.0]);
        let ctx = build_context(vec![a, b], tol()).unwrap();
        assert_eq!(ctx.atom_count(), 4);
        let chars: Vec<Vec<f64>> = ctx.atoms().iter().map(|a| a.character().to_vec()).collect();
        assert_eq!(
            chars,
            vec![
                vec![1.0, 1.0],
                vec![1.0, -1.0],
                vec![-1.0, 1.0],
                vec![-1.0, -1.0]
            ]
        );
    }

    #[test]
    fn identity_context_has_one_atom() {
        let id = HermitianOperator::diagonal("I", &[1.0; 5]);
        let ctx = build_context(vec![id], tol()).unwrap();
        assert_eq!(ctx.atom_count(), 1);
        assert_eq!(ctx.atoms()[0].character(), &[1.0]);
        assert_eq!(ctx.atoms()[0].dimension(), 5);
    }

    #[test]
    fn non_commuting_family_is_rejected() {
        let x = HermitianOperator::new(
            "X",
            CMatrix::from_rows(vec![
                vec![C64::new(0.0, 0.0), C64::new(1.0, 0.0)],
                vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
            ]),
            &tol(),
        )
        .unwrap();
        let z = HermitianOperator::diagonal("Z", &[1.0, -1.0]);
        let err = build_context(vec![x, z], tol()).unwrap_err();
        assert!(matches!(err, Error::NotCommuting { .. }), "{err}");
    }

    #[test]
    fn non_hermitian_input_is_rejected() {
        let m = CMatrix::from_rows(vec![
            vec![C64::new(0.0, 0.0), C64::new(1.0, 0.0)],
            vec![C64::new(0.0, 0.0), C64::new(0.0, 0.0)],
        ]);
        assert!(matches!(
            HermitianOperator::new("N", m, &tol()),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn character_eval_examples() {
        let a = HermitianOperator::diagonal("A", &[1.0, -1.0]);
        let ctx = build_context(vec![a.clone()], tol()).unwrap();
        let a0 = ctx.atom_index("a0").unwrap();
        assert!((ctx.character_eval(a0, &a).unwrap() - 1.0).abs() < 1e-12);
        // The identity evaluates to 1 on every atom.
        let id = HermitianOperator::diagonal("I", &[1.0, 1.0]);
        for atom in 0..ctx.atom_count() {
            assert!((ctx.character_eval(atom, &id).unwrap() - 1.0).abs() < 1e-12);
        }
        // Multiplicativity: character of A*A is the square.
        let a2 = a.product(&a);
        for atom in 0..ctx.atom_count() {
            let v = ctx.character_eval(atom, &a).unwrap();
            let v2 = ctx.character_eval(atom, &a2).unwrap();
            assert!((v2 - v * v).abs() < 1e-9);
        }
    }

    #[test]
    fn operator_outside_algebra_is_rejected() {
        let a = HermitianOperator::diagonal("A", &[1.0, 1.0]);
        let ctx = build_context(vec![a], tol()).unwrap();
        // diag(1,-1) is diagonal in the joint basis but splits the single atom.
        let z = HermitianOperator::diagonal("Z", &[1.0, -1.0]);
        assert!(matches!(
            ctx.characters_of(&z),
            Err(Error::NotInAlgebra { .. })
        ));
    }

    #[test]
    fn projections_match_the_open_lattice() {
        let a = HermitianOperator::diagonal("A", &[1.0, -1.0]);
        let ctx = build_context(vec![a], tol()).unwrap();
        let zero = ctx.projection_of(PointSet::EMPTY);
        assert_eq!(zero.matrix().max_abs(), 0.0);
        let full = ctx.projection_of(ctx.space().full_set());
        assert!(full.matrix().sub(&CMatrix::identity(2)).max_abs() < 1e-12);
        // atom a1 has character -1, i.e. the second basis vector.
        let minus = ctx.projection_of(PointSet::singleton(1));
        assert!(minus.matrix().sub(&CMatrix::diag_real(&[0.0, 1.0])).max_abs() < 1e-12);
    }

    #[test]
    fn born_measure_examples() {
        let a = HermitianOperator::diagonal("A", &[1.0, -1.0]);
        let ctx = build_context(vec![a], tol()).unwrap();
        let h = StateVector::uniform(2);
        let plus = ctx.born_measure(&h, PointSet::singleton(0)).unwrap();
        assert!((plus - 0.5).abs() < 1e-12);
        assert!((ctx.born_measure(&h, ctx.space().full_set()).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(ctx.born_measure(&h, PointSet::EMPTY).unwrap(), 0.0);
        let bad = StateVector::uniform(3);
        assert!(matches!(
            ctx.born_measure(&bad, PointSet::EMPTY),
            Err(Error::StateDimMismatch { .. })
        ));
    }

    #[test]
    fn observables_file_round_trip() {
        let a = HermitianOperator::diagonal("A", &[2.0, -2.0]);
        let file = ObservablesFile::from_family(std::slice::from_ref(&a));
        let json = serde_json::to_string(&file).unwrap();
        let parsed: ObservablesFile = serde_json::from_str(&json).unwrap();
        let family = parsed.into_family(&tol()).unwrap();
        assert_eq!(family[0].name(), "A");
        assert!(family[0].matrix().sub(a.matrix()).max_abs() == 0.0);
    }
}

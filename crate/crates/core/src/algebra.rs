//! Graded nilpotent Lie algebras over ℚ: structure constants, validation and
//! gradings.
//!
//! Brackets are stored sparsely under the canonical key `(i, j)` with
//! `i < j`; `[e_j, e_i]` is synthesised by antisymmetry. Labels are only used
//! for display and parsing, all arithmetic is positional.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};
use thiserror::Error;

use crate::linalg::Matrix;
use crate::rational::{format_rational, int, Rational};

/// Sparse vector `k -> c^k`.
pub type SparseVec = BTreeMap<usize, Rational>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("algebra must have positive dimension")]
    EmptyBasis,
    #[error("duplicate basis label `{0}`")]
    DuplicateLabel(String),
    #[error("bracket index {0} out of range")]
    IndexOutOfRange(usize),
    #[error("bracket [{0}, {0}] must vanish")]
    SelfBracket(String),
    #[error("bracket [{0}, {1}] given twice")]
    DuplicateBracket(String, String),
    #[error("dimension {0} exceeds the supported maximum of {MAX_DIMENSION}")]
    TooLarge(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GradingError {
    #[error("grading has {got} weights for an algebra of dimension {expected}")]
    WrongLength { expected: usize, got: usize },
    #[error("weight of `{0}` is not positive")]
    NonPositiveWeight(String),
    #[error("[{i}, {j}] has a `{k}` component but w({i}) + w({j}) != w({k})")]
    IncompatibleGrading { i: String, j: String, k: String },
    #[error("not stratified: {0}")]
    NotStratified(String),
    #[error("algebra is invalid: {0}")]
    InvalidAlgebra(String),
}

/// Exterior monomials are bitmasks, so the dimension is bounded.
pub const MAX_DIMENSION: usize = 16;

/// Minimal commutative-ring interface used to evaluate brackets with
/// coefficients that are numbers or polynomials.
pub trait Scalar: Clone + Zero + for<'a> Add<&'a Self, Output = Self> + Neg<Output = Self>
where
    for<'a> &'a Self:
        Add<&'a Self, Output = Self> + Sub<&'a Self, Output = Self> + Mul<&'a Self, Output = Self>,
{
    fn scale(&self, c: &Rational) -> Self;
}

impl Scalar for Rational {
    fn scale(&self, c: &Rational) -> Self {
        self * c
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LieAlgebra {
    name: String,
    basis: Vec<String>,
    brackets: BTreeMap<(usize, usize), SparseVec>,
}

impl LieAlgebra {
    /// Builds an algebra from labelled brackets `[e_i, e_j] = Σ c^k e_k`.
    /// Pairs may be given in either order; zero coefficients are dropped.
    pub fn new<I>(
        name: impl Into<String>,
        basis: Vec<String>,
        brackets: I,
    ) -> Result<Self, AlgebraError>
    where
        I: IntoIterator<Item = (usize, usize, Vec<(usize, Rational)>)>,
    {
        let n = basis.len();
        if n == 0 {
            return Err(AlgebraError::EmptyBasis);
        }
        if n > MAX_DIMENSION {
            return Err(AlgebraError::TooLarge(n));
        }
        let mut seen = BTreeSet::new();
        for label in &basis {
            if !seen.insert(label.as_str()) {
                return Err(AlgebraError::DuplicateLabel(label.clone()));
            }
        }
        let mut table = BTreeMap::new();
        for (i, j, terms) in brackets {
            for idx in [i, j].into_iter().chain(terms.iter().map(|t| t.0)) {
                if idx >= n {
                    return Err(AlgebraError::IndexOutOfRange(idx));
                }
            }
            if i == j {
                if terms.iter().all(|(_, c)| c.is_zero()) {
                    continue;
                }
                return Err(AlgebraError::SelfBracket(basis[i].clone()));
            }
            let (key, sign) = if i < j {
                ((i, j), int(1))
            } else {
                ((j, i), int(-1))
            };
            if table.contains_key(&key) {
                return Err(AlgebraError::DuplicateBracket(
                    basis[key.0].clone(),
                    basis[key.1].clone(),
                ));
            }
            let mut vec = SparseVec::new();
            for (k, c) in terms {
                *vec.entry(k).or_insert_with(Rational::zero) += c * &sign;
            }
            vec.retain(|_, c| !c.is_zero());
            table.insert(key, vec);
        }
        table.retain(|_, v: &mut SparseVec| !v.is_empty());
        Ok(LieAlgebra {
            name: name.into(),
            basis,
            brackets: table,
        })
    }

    /// Convenience constructor from labels and integer structure constants.
    pub fn from_labels(
        name: &str,
        labels: &[&str],
        brackets: &[(&str, &str, &[(&str, i64)])],
    ) -> Result<Self, AlgebraError> {
        let basis: Vec<String> = labels.iter().map(|s| s.to_string()).collect();
        let idx = |l: &str| labels.iter().position(|x| *x == l).unwrap_or(usize::MAX);
        let brs = brackets.iter().map(|(a, b, terms)| {
            (
                idx(a),
                idx(b),
                terms.iter().map(|(k, c)| (idx(k), int(*c))).collect(),
            )
        });
        LieAlgebra::new(name, basis, brs)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[String] {
        &self.basis
    }

    pub fn label(&self, i: usize) -> &str {
        &self.basis[i]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.basis.iter().position(|l| l == label)
    }

    /// Nonzero brackets in canonical order, keyed by `(i, j)` with `i < j`.
    pub fn brackets(&self) -> &BTreeMap<(usize, usize), SparseVec> {
        &self.brackets
    }

    pub fn is_abelian(&self) -> bool {
        self.brackets.is_empty()
    }

    /// `[e_i, e_j]` with antisymmetry applied.
    pub fn bracket_basis(&self, i: usize, j: usize) -> SparseVec {
        match i.cmp(&j) {
            std::cmp::Ordering::Equal => SparseVec::new(),
            std::cmp::Ordering::Less => self.brackets.get(&(i, j)).cloned().unwrap_or_default(),
            std::cmp::Ordering::Greater => self
                .brackets
                .get(&(j, i))
                .map(|v| v.iter().map(|(k, c)| (*k, -c)).collect())
                .unwrap_or_default(),
        }
    }

    /// Structure constant `c_{ij}^k`.
    pub fn structure_constant(&self, i: usize, j: usize, k: usize) -> Rational {
        self.bracket_basis(i, j)
            .remove(&k)
            .unwrap_or_else(Rational::zero)
    }

    /// Bracket of coordinate vectors with coefficients in any [`Scalar`] ring.
    pub fn bracket<S>(&self, x: &[S], y: &[S]) -> Vec<S>
    where
        S: Scalar,
        for<'a> &'a S: Add<&'a S, Output = S> + Sub<&'a S, Output = S> + Mul<&'a S, Output = S>,
    {
        let mut out = vec![S::zero(); self.dim()];
        for (&(i, j), vec) in &self.brackets {
            let xy = &x[i] * &y[j];
            let yx = &x[j] * &y[i];
            let a = &xy - &yx;
            if a.is_zero() {
                continue;
            }
            for (&k, c) in vec {
                out[k] = out[k].clone() + &a.scale(c);
            }
        }
        out
    }

    fn bracket_sparse(&self, x: &SparseVec, y: &SparseVec) -> SparseVec {
        let mut out = SparseVec::new();
        for (&i, a) in x {
            for (&j, b) in y {
                for (k, c) in self.bracket_basis(i, j) {
                    *out.entry(k).or_insert_with(Rational::zero) += a * b * c;
                }
            }
        }
        out.retain(|_, c| !c.is_zero());
        out
    }

    /// Dimensions of the lower central series `g = g¹ ⊃ g² ⊃ …`, stopping at
    /// the first repeated or zero term.
    pub fn lower_central_series(&self) -> Vec<usize> {
        let n = self.dim();
        let mut current: Vec<Vec<Rational>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { int(1) } else { int(0) })
                    .collect()
            })
            .collect();
        let mut dims = vec![n];
        loop {
            let next = span_basis(n, &self.bracket_with_basis(&current));
            let d = next.len();
            let stable = d == *dims.last().unwrap();
            dims.push(d);
            if stable || d == 0 {
                return dims;
            }
            current = next;
        }
    }

    /// `span{[e_a, v] : a basis index, v ∈ vectors}` as raw vectors.
    fn bracket_with_basis(&self, vectors: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
        let n = self.dim();
        let mut out = Vec::new();
        for a in 0..n {
            let ea: Vec<Rational> = (0..n)
                .map(|j| if j == a { int(1) } else { int(0) })
                .collect();
            for v in vectors {
                out.push(self.bracket(&ea, v));
            }
        }
        out
    }

    /// Nilpotency step `r` (number of nonzero lower-central terms), or `None`
    /// when the series stabilises at a nonzero ideal.
    pub fn nilpotency_step(&self) -> Option<usize> {
        let dims = self.lower_central_series();
        (*dims.last().unwrap() == 0).then(|| dims.len() - 1)
    }

    pub fn is_nilpotent(&self) -> bool {
        self.nilpotency_step().is_some()
    }
}

/// Row-reduced basis of the span of `vectors` in `ℚⁿ`.
fn span_basis(n: usize, vectors: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    if vectors.is_empty() {
        return Vec::new();
    }
    let ech = Matrix::from_rows(vectors.to_vec()).rref();
    (0..ech.pivots.len())
        .map(|r| ech.matrix.row(r).to_vec())
        .filter(|row| row.len() == n)
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    Jacobi {
        i: usize,
        j: usize,
        k: usize,
        labels: [String; 3],
    },
    NotNilpotent {
        stable_dimension: usize,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Jacobi { labels, .. } => write!(
                f,
                "Jacobi identity fails for ({}, {}, {})",
                labels[0], labels[1], labels[2]
            ),
            Violation::NotNilpotent { stable_dimension } => write!(
                f,
                "not nilpotent: lower central series stabilises at dimension {stable_dimension}"
            ),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks the Jacobi identity on every basis triple and nilpotency.
pub fn validate(alg: &LieAlgebra) -> ValidationReport {
    let n = alg.dim();
    let unit = |i: usize| -> SparseVec { [(i, int(1))].into_iter().collect() };
    let mut violations = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let (ei, ej, ek) = (unit(i), unit(j), unit(k));
                let mut sum = alg.bracket_sparse(&ei, &alg.bracket_sparse(&ej, &ek));
                for (idx, c) in alg.bracket_sparse(&ej, &alg.bracket_sparse(&ek, &ei)) {
                    *sum.entry(idx).or_insert_with(Rational::zero) += c;
                }
                for (idx, c) in alg.bracket_sparse(&ek, &alg.bracket_sparse(&ei, &ej)) {
                    *sum.entry(idx).or_insert_with(Rational::zero) += c;
                }
                if sum.values().any(|c| !c.is_zero()) {
                    violations.push(Violation::Jacobi {
                        i,
                        j,
                        k,
                        labels: [
                            alg.label(i).into(),
                            alg.label(j).into(),
                            alg.label(k).into(),
                        ],
                    });
                }
            }
        }
    }
    let dims = alg.lower_central_series();
    let last = *dims.last().unwrap();
    if last != 0 {
        violations.push(Violation::NotNilpotent {
            stable_dimension: last,
        });
    }
    ValidationReport { violations }
}

/// Positive weights on the basis, compatible with the bracket.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Grading {
    weights: Vec<Rational>,
    is_carnot: bool,
    homogeneous_dim: Rational,
}

impl Grading {
    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    pub fn weight(&self, i: usize) -> &Rational {
        &self.weights[i]
    }

    pub fn is_carnot(&self) -> bool {
        self.is_carnot
    }

    /// Homogeneous dimension, the trace of the grading derivation.
    pub fn homogeneous_dim(&self) -> &Rational {
        &self.homogeneous_dim
    }

    /// Smallest basis weight.
    pub fn min_weight(&self) -> &Rational {
        self.weights.iter().min().expect("nonempty grading")
    }

    /// Largest basis weight; the step `r` for a Carnot grading.
    pub fn max_weight(&self) -> &Rational {
        self.weights.iter().max().expect("nonempty grading")
    }

    /// Weight of an exterior monomial given as a bitmask.
    pub fn mask_weight(&self, mask: u32) -> Rational {
        (0..self.weights.len())
            .filter(|i| mask & (1 << i) != 0)
            .fold(Rational::zero(), |acc, i| acc + &self.weights[i])
    }
}

fn require_valid(alg: &LieAlgebra) -> Result<(), GradingError> {
    let report = validate(alg);
    match report.violations.first() {
        None => Ok(()),
        Some(v) => Err(GradingError::InvalidAlgebra(v.to_string())),
    }
}

fn check_compatible(alg: &LieAlgebra, weights: &[Rational]) -> Result<(), GradingError> {
    for (&(i, j), vec) in alg.brackets() {
        for &k in vec.keys() {
            if &weights[i] + &weights[j] != weights[k] {
                return Err(GradingError::IncompatibleGrading {
                    i: alg.label(i).into(),
                    j: alg.label(j).into(),
                    k: alg.label(k).into(),
                });
            }
        }
    }
    Ok(())
}

/// Layers `g_1, g_2, …` generated by `layer1` via `g_{i+1} = [g_1, g_i]`,
/// each required to be a coordinate subspace; returns the layer index of
/// every basis vector.
fn stratify(alg: &LieAlgebra, layer1: &[usize]) -> Result<Vec<usize>, GradingError> {
    let n = alg.dim();
    let mut layer_of = vec![0usize; n];
    let first: BTreeSet<usize> = layer1.iter().copied().collect();
    if first.is_empty() {
        return Err(GradingError::NotStratified("first layer is empty".into()));
    }
    if let Some(&bad) = first.iter().find(|&&i| i >= n) {
        return Err(GradingError::NotStratified(format!(
            "index {bad} out of range"
        )));
    }
    let mut current = first.clone();
    let mut level = 1;
    loop {
        for &i in &current {
            if layer_of[i] != 0 {
                return Err(GradingError::NotStratified(format!(
                    "`{}` appears in layers {} and {level}",
                    alg.label(i),
                    layer_of[i]
                )));
            }
            layer_of[i] = level;
        }
        let mut spanned = Vec::new();
        for &a in &first {
            for &b in &current {
                let v = alg.bracket_basis(a, b);
                if !v.is_empty() {
                    spanned.push(
                        (0..n)
                            .map(|k| v.get(&k).cloned().unwrap_or_else(Rational::zero))
                            .collect(),
                    );
                }
            }
        }
        let basis = span_basis(n, &spanned);
        if basis.is_empty() {
            break;
        }
        let mut next = BTreeSet::new();
        for row in &basis {
            let support: Vec<usize> = (0..n).filter(|&k| !row[k].is_zero()).collect();
            if support.len() != 1 {
                return Err(GradingError::NotStratified(format!(
                    "layer {} is not spanned by basis vectors",
                    level + 1
                )));
            }
            next.insert(support[0]);
        }
        current = next;
        level += 1;
    }
    if let Some(missing) = (0..n).find(|&i| layer_of[i] == 0) {
        return Err(GradingError::NotStratified(format!(
            "`{}` is not generated by the first layer",
            alg.label(missing)
        )));
    }
    Ok(layer_of)
}

/// Carnot grading: weight `i` on the `i`-th layer generated by `layer1`.
pub fn carnot_grading(alg: &LieAlgebra, layer1: &[usize]) -> Result<Grading, GradingError> {
    require_valid(alg)?;
    let layers = stratify(alg, layer1)?;
    let weights: Vec<Rational> = layers.iter().map(|&l| int(l as i64)).collect();
    check_compatible(alg, &weights)
        .map_err(|e| GradingError::NotStratified(format!("layers are not graded: {e}")))?;
    let homogeneous_dim = weights.iter().fold(Rational::zero(), |a, w| a + w);
    Ok(Grading {
        weights,
        is_carnot: true,
        homogeneous_dim,
    })
}

/// Grading by a diagonal derivation with the given positive eigenvalues.
pub fn derivation_grading(
    alg: &LieAlgebra,
    weights: Vec<Rational>,
) -> Result<Grading, GradingError> {
    if weights.len() != alg.dim() {
        return Err(GradingError::WrongLength {
            expected: alg.dim(),
            got: weights.len(),
        });
    }
    if let Some(i) = weights.iter().position(|w| *w <= Rational::zero()) {
        return Err(GradingError::NonPositiveWeight(alg.label(i).into()));
    }
    check_compatible(alg, &weights)?;
    let layer1: Vec<usize> = (0..alg.dim()).filter(|&i| weights[i].is_one()).collect();
    let is_carnot = weights.iter().all(|w| w.is_integer())
        && !layer1.is_empty()
        && validate(alg).is_valid()
        && stratify(alg, &layer1)
            .map(|layers| {
                layers
                    .iter()
                    .zip(&weights)
                    .all(|(&l, w)| int(l as i64) == *w)
            })
            .unwrap_or(false);
    let homogeneous_dim = weights.iter().fold(Rational::zero(), |a, w| a + w);
    Ok(Grading {
        weights,
        is_carnot,
        homogeneous_dim,
    })
}

impl fmt::Display for Grading {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ws: Vec<String> = self.weights.iter().map(format_rational).collect();
        write!(f, "({})", ws.join(", "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    fn ints(ws: &[i64]) -> Vec<Rational> {
        ws.iter().map(|&w| int(w)).collect()
    }

    fn so3() -> LieAlgebra {
        LieAlgebra::from_labels(
            "so3",
            &["X", "Y", "Z"],
            &[
                ("X", "Y", &[("Z", 1)]),
                ("Y", "Z", &[("X", 1)]),
                ("Z", "X", &[("Y", 1)]),
            ],
        )
        .unwrap()
    }

    #[test]
    fn abelian_and_engel_are_valid() {
        assert!(validate(&corpus::abelian(4)).is_valid());
        assert!(validate(&corpus::engel()).is_valid());
    }

    #[test]
    fn so3_is_not_nilpotent() {
        let report = validate(&so3());
        assert_eq!(
            report.violations,
            vec![Violation::NotNilpotent {
                stable_dimension: 3
            }]
        );
        // Oracle: [so3, so3] = so3, so the series never drops.
        assert_eq!(so3().lower_central_series(), vec![3, 3]);
    }

    #[test]
    fn jacobi_violation_names_the_triple() {
        // [B,C]=A and [A,D]=E: the series is nilpotent but on (B,C,D) the
        // cyclic sum is [D,[B,C]] = -E.
        let bad = LieAlgebra::from_labels(
            "bad",
            &["A", "B", "C", "D", "E"],
            &[("B", "C", &[("A", 1)]), ("A", "D", &[("E", 1)])],
        )
        .unwrap();
        let report = validate(&bad);
        assert_eq!(report.violations.len(), 1);
        assert_eq!(
            report.violations[0].to_string(),
            "Jacobi identity fails for (B, C, D)"
        );
    }

    #[test]
    fn canonicalises_bracket_order() {
        let alg =
            LieAlgebra::from_labels("h", &["X", "Y", "Z"], &[("Y", "X", &[("Z", 1)])]).unwrap();
        assert_eq!(alg.structure_constant(0, 1, 2), int(-1));
        assert_eq!(alg.structure_constant(1, 0, 2), int(1));
    }

    #[test]
    fn constructor_errors() {
        let dup = LieAlgebra::from_labels("d", &["X", "X"], &[]);
        assert_eq!(dup, Err(AlgebraError::DuplicateLabel("X".into())));
        let twice = LieAlgebra::from_labels(
            "t",
            &["X", "Y", "Z"],
            &[("X", "Y", &[("Z", 1)]), ("Y", "X", &[("Z", 1)])],
        );
        assert!(matches!(twice, Err(AlgebraError::DuplicateBracket(..))));
        assert_eq!(
            LieAlgebra::new("e", vec![], Vec::new()),
            Err(AlgebraError::EmptyBasis)
        );
    }

    #[test]
    fn engel_carnot_weights() {
        let g = carnot_grading(&corpus::engel(), &[0, 1]).unwrap();
        assert_eq!(g.weights(), ints(&[1, 1, 2, 3]).as_slice());
        assert_eq!(*g.homogeneous_dim(), int(7));
        assert!(g.is_carnot());
    }

    #[test]
    fn heisenberg_carnot_weights() {
        let g = carnot_grading(&corpus::heisenberg(1), &[0, 1]).unwrap();
        assert_eq!(g.weights(), ints(&[1, 1, 2]).as_slice());
        assert_eq!(*g.homogeneous_dim(), int(4));
    }

    #[test]
    fn abelian_single_layer() {
        let alg = corpus::abelian(5);
        let g = carnot_grading(&alg, &[0, 1, 2, 3, 4]).unwrap();
        assert!(g.weights().iter().all(|w| w.is_one()));
        assert_eq!(*g.homogeneous_dim(), int(5));
    }

    #[test]
    fn not_stratified_layers() {
        let h = corpus::heisenberg(1);
        assert!(matches!(
            carnot_grading(&h, &[0, 2]),
            Err(GradingError::NotStratified(_))
        ));
        assert!(matches!(
            carnot_grading(&h, &[0, 1, 2]),
            Err(GradingError::NotStratified(_))
        ));
        assert!(matches!(
            carnot_grading(&so3(), &[0, 1]),
            Err(GradingError::InvalidAlgebra(_))
        ));
    }

    #[test]
    fn carnot_grading_is_idempotent() {
        for (_, alg, layer1) in corpus::carnot_corpus() {
            let g = carnot_grading(&alg, &layer1).unwrap();
            let again: Vec<usize> = (0..alg.dim()).filter(|&i| g.weight(i).is_one()).collect();
            assert_eq!(carnot_grading(&alg, &again).unwrap(), g);
        }
    }

    #[test]
    fn engel_derivation_gradings() {
        let e = corpus::engel();
        let g = derivation_grading(&e, ints(&[1, 2, 3, 4])).unwrap();
        assert_eq!(*g.homogeneous_dim(), int(10));
        assert!(!g.is_carnot());
        assert_eq!(
            derivation_grading(&e, ints(&[1, 1, 1, 1])),
            Err(GradingError::IncompatibleGrading {
                i: "X".into(),
                j: "Y".into(),
                k: "Z".into()
            })
        );
        let c = derivation_grading(&e, ints(&[1, 1, 2, 3])).unwrap();
        assert!(c.is_carnot());
        assert!(matches!(
            derivation_grading(&e, ints(&[1, 0, 1, 2])),
            Err(GradingError::NonPositiveWeight(_))
        ));
    }

    #[test]
    fn heisenberg_nonstandard_grading() {
        let g = derivation_grading(&corpus::heisenberg(1), ints(&[1, 2, 3])).unwrap();
        assert_eq!(*g.homogeneous_dim(), int(6));
    }

    #[test]
    fn nilpotency_steps() {
        assert_eq!(corpus::abelian(3).nilpotency_step(), Some(1));
        assert_eq!(corpus::heisenberg(2).nilpotency_step(), Some(2));
        assert_eq!(corpus::engel().nilpotency_step(), Some(3));
        assert_eq!(corpus::free_nilpotent_2_3().nilpotency_step(), Some(3));
        assert_eq!(so3().nilpotency_step(), None);
    }

    #[test]
    fn compatibility_holds_for_every_corpus_grading() {
        for (_, alg, layer1) in corpus::carnot_corpus() {
            let g = carnot_grading(&alg, &layer1).unwrap();
            for (&(i, j), v) in alg.brackets() {
                for &k in v.keys() {
                    assert!((g.weight(i) + g.weight(j) - g.weight(k)).is_zero());
                }
            }
            let q = g.weights().iter().fold(Rational::zero(), |a, w| a + w);
            assert_eq!(&q, g.homogeneous_dim());
        }
    }
}

//! Left-invariant forms `Λ•𝔤*` and the algebraic operators acting on them.
//!
//! Monomials `θ_I` are bitmasks over the basis; the monomial basis is taken
//! orthonormal, so `δ₀ = d₀ᵀ` and every projection stays rational. All
//! operators here preserve weight and are stored as weight blocks.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::algebra::{Grading, LieAlgebra};
use crate::linalg::{gram_schmidt, Matrix};
use crate::rational::{int, Exact, Rational};

/// Exterior monomial `θ_I`, stored as the bitmask of `I`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FormMonomial(pub u32);

impl FormMonomial {
    pub fn from_indices(indices: &[usize]) -> Self {
        FormMonomial(indices.iter().fold(0u32, |m, &i| m | (1 << i)))
    }

    pub fn mask(self) -> u32 {
        self.0
    }

    pub fn degree(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn indices(self) -> impl Iterator<Item = usize> {
        let mask = self.0;
        (0..32).filter(move |i| mask & (1 << i) != 0)
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 & (1 << i) != 0
    }

    pub fn weight(self, grading: &Grading) -> Rational {
        grading.mask_weight(self.0)
    }

    /// `θ_self ∧ θ_other = sign · θ_{self ∪ other}`, or `None` if they overlap.
    pub fn wedge(self, other: FormMonomial) -> Option<(i32, FormMonomial)> {
        if self.0 & other.0 != 0 {
            return None;
        }
        let swaps: u32 = self
            .indices()
            .map(|a| (other.0 & ((1u32 << a) - 1)).count_ones())
            .sum();
        let sign = if swaps.is_multiple_of(2) { 1 } else { -1 };
        Some((sign, FormMonomial(self.0 | other.0)))
    }

    pub fn display(self, alg: &LieAlgebra) -> String {
        if self.0 == 0 {
            return "1".into();
        }
        let parts: Vec<String> = self
            .indices()
            .map(|i| format!("θ_{}", alg.label(i)))
            .collect();
        parts.join("∧")
    }
}

/// All monomials of degree `k` in `n` generators, ascending by mask.
pub fn monomials(n: usize, k: usize) -> Vec<FormMonomial> {
    (0u32..(1u32 << n))
        .filter(|m| m.count_ones() as usize == k)
        .map(FormMonomial)
        .collect()
}

/// Left-invariant form of a fixed degree with rational coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvariantForm {
    degree: usize,
    coeffs: BTreeMap<FormMonomial, Rational>,
}

impl InvariantForm {
    pub fn zero(degree: usize) -> Self {
        InvariantForm {
            degree,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn monomial(m: FormMonomial, c: Rational) -> Self {
        let mut f = Self::zero(m.degree());
        f.add_term(m, c);
        f
    }

    pub fn basis(indices: &[usize]) -> Self {
        Self::monomial(FormMonomial::from_indices(indices), int(1))
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&FormMonomial, &Rational)> {
        self.coeffs.iter()
    }

    pub fn coefficient(&self, m: FormMonomial) -> Rational {
        self.coeffs.get(&m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn add_term(&mut self, m: FormMonomial, c: Rational) {
        assert_eq!(m.degree(), self.degree, "monomial degree mismatch");
        if c.is_zero() {
            return;
        }
        let entry = self.coeffs.entry(m).or_insert_with(Rational::zero);
        *entry += c;
        if entry.is_zero() {
            self.coeffs.remove(&m);
        }
    }

    pub fn add(&self, other: &InvariantForm) -> InvariantForm {
        let mut out = self.clone();
        for (m, c) in other.terms() {
            out.add_term(*m, c.clone());
        }
        out
    }

    pub fn scale(&self, c: &Rational) -> InvariantForm {
        let mut out = Self::zero(self.degree);
        for (m, v) in self.terms() {
            out.add_term(*m, v * c);
        }
        out
    }

    /// Distinct weights of the monomials present.
    pub fn weights(&self, grading: &Grading) -> Vec<Rational> {
        let mut ws: Vec<Rational> = self.coeffs.keys().map(|m| m.weight(grading)).collect();
        ws.sort();
        ws.dedup();
        ws
    }

    /// The weight, if every monomial has the same one.
    pub fn homogeneous_weight(&self, grading: &Grading) -> Option<Rational> {
        match self.weights(grading).as_slice() {
            [w] => Some(w.clone()),
            _ => None,
        }
    }

    pub fn wedge(&self, other: &InvariantForm) -> InvariantForm {
        let mut out = Self::zero(self.degree + other.degree);
        for (a, ca) in self.terms() {
            for (b, cb) in other.terms() {
                if let Some((s, m)) = a.wedge(*b) {
                    out.add_term(m, ca * cb * int(s as i64));
                }
            }
        }
        out
    }

    pub fn display(&self, alg: &LieAlgebra) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let parts: Vec<String> = self
            .terms()
            .map(|(m, c)| {
                if m.0 == 0 {
                    Exact(c).to_string()
                } else if c.is_one() {
                    m.display(alg)
                } else if *c == -Rational::one() {
                    format!("-{}", m.display(alg))
                } else {
                    format!("{}·{}", Exact(c), m.display(alg))
                }
            })
            .collect();
        parts.join(" + ")
    }
}

/// Coefficient vector of `form` over an ordered monomial list.
fn to_vector(form: &InvariantForm, basis: &[FormMonomial]) -> Vec<Rational> {
    basis.iter().map(|m| form.coefficient(*m)).collect()
}

fn from_vector(degree: usize, basis: &[FormMonomial], v: &[Rational]) -> InvariantForm {
    let mut f = InvariantForm::zero(degree);
    for (m, c) in basis.iter().zip(v) {
        f.add_term(*m, c.clone());
    }
    f
}

/// One weight block of a weight-preserving operator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightBlock {
    pub rows: Vec<FormMonomial>,
    pub cols: Vec<FormMonomial>,
    pub matrix: Matrix,
}

/// Weight-preserving linear map `Λ^source → Λ^target` as weight blocks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedOperator {
    pub source_degree: usize,
    pub target_degree: usize,
    pub blocks: BTreeMap<Rational, WeightBlock>,
}

impl GradedOperator {
    pub fn apply(&self, form: &InvariantForm) -> InvariantForm {
        assert_eq!(
            form.degree(),
            self.source_degree,
            "operator applied to wrong degree"
        );
        let mut out = InvariantForm::zero(self.target_degree);
        for block in self.blocks.values() {
            let v = to_vector(form, &block.cols);
            if v.iter().all(Zero::is_zero) {
                continue;
            }
            for (m, c) in block.rows.iter().zip(block.matrix.mul_vec(&v)) {
                out.add_term(*m, c);
            }
        }
        out
    }

    /// Source monomial → image terms; the form used when acting on
    /// polynomial coefficients.
    pub fn images(&self) -> BTreeMap<FormMonomial, Vec<(FormMonomial, Rational)>> {
        let mut out = BTreeMap::new();
        for block in self.blocks.values() {
            for (j, col) in block.cols.iter().enumerate() {
                let terms: Vec<(FormMonomial, Rational)> = block
                    .rows
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| !block.matrix[(*i, j)].is_zero())
                    .map(|(i, row)| (*row, block.matrix[(i, j)].clone()))
                    .collect();
                out.insert(*col, terms);
            }
        }
        out
    }

    pub fn rank(&self) -> usize {
        self.blocks.values().map(|b| b.matrix.rank()).sum()
    }

    pub fn transpose(&self) -> GradedOperator {
        GradedOperator {
            source_degree: self.target_degree,
            target_degree: self.source_degree,
            blocks: self
                .blocks
                .iter()
                .map(|(w, b)| {
                    (
                        w.clone(),
                        WeightBlock {
                            rows: b.cols.clone(),
                            cols: b.rows.clone(),
                            matrix: b.matrix.transpose(),
                        },
                    )
                })
                .collect(),
        }
    }

    /// `self ∘ other`, block by block.
    pub fn compose(&self, other: &GradedOperator) -> GradedOperator {
        assert_eq!(self.source_degree, other.target_degree);
        let mut blocks = BTreeMap::new();
        for (w, inner) in &other.blocks {
            let block = match self.blocks.get(w) {
                Some(outer) => {
                    assert_eq!(outer.cols, inner.rows);
                    WeightBlock {
                        rows: outer.rows.clone(),
                        cols: inner.cols.clone(),
                        matrix: outer.matrix.mul(&inner.matrix),
                    }
                }
                None => {
                    assert!(inner.rows.is_empty(), "missing weight block");
                    WeightBlock {
                        rows: Vec::new(),
                        cols: inner.cols.clone(),
                        matrix: Matrix::zeros(0, inner.cols.len()),
                    }
                }
            };
            blocks.insert(w.clone(), block);
        }
        for (w, outer) in &self.blocks {
            blocks.entry(w.clone()).or_insert_with(|| WeightBlock {
                rows: outer.rows.clone(),
                cols: Vec::new(),
                matrix: Matrix::zeros(outer.rows.len(), 0),
            });
        }
        GradedOperator {
            source_degree: other.source_degree,
            target_degree: self.target_degree,
            blocks,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.blocks.values().all(|b| b.matrix.is_zero())
    }

    /// The whole operator as one matrix over monomials ordered by mask.
    pub fn to_dense(&self, n: usize) -> Matrix {
        let rows = monomials(n, self.target_degree);
        let cols = monomials(n, self.source_degree);
        let mut m = Matrix::zeros(rows.len(), cols.len());
        for block in self.blocks.values() {
            for (i, r) in block.rows.iter().enumerate() {
                let ri = rows.binary_search(r).expect("row monomial");
                for (j, c) in block.cols.iter().enumerate() {
                    let cj = cols.binary_search(c).expect("column monomial");
                    m[(ri, cj)] = block.matrix[(i, j)].clone();
                }
            }
        }
        m
    }
}

/// The exterior algebra of a graded Lie algebra with its algebraic
/// operators.
#[derive(Debug, Clone)]
pub struct InvariantComplex {
    alg: LieAlgebra,
    grading: Grading,
    /// `d₀θ^k = −Σ_{i<j} c_{ij}^k θ^i∧θ^j` for each basis index `k`.
    d0_generators: Vec<InvariantForm>,
    /// Degree → weight → monomials.
    by_weight: Vec<BTreeMap<Rational, Vec<FormMonomial>>>,
}

impl InvariantComplex {
    pub fn new(alg: &LieAlgebra, grading: &Grading) -> Self {
        let n = alg.dim();
        let mut d0_generators = vec![InvariantForm::zero(2); n];
        for (&(i, j), vec) in alg.brackets() {
            for (&k, c) in vec {
                d0_generators[k].add_term(FormMonomial::from_indices(&[i, j]), -c);
            }
        }
        let by_weight = (0..=n)
            .map(|k| {
                let mut map: BTreeMap<Rational, Vec<FormMonomial>> = BTreeMap::new();
                for m in monomials(n, k) {
                    map.entry(m.weight(grading)).or_default().push(m);
                }
                map
            })
            .collect();
        InvariantComplex {
            alg: alg.clone(),
            grading: grading.clone(),
            d0_generators,
            by_weight,
        }
    }

    pub fn algebra(&self) -> &LieAlgebra {
        &self.alg
    }

    pub fn grading(&self) -> &Grading {
        &self.grading
    }

    pub fn dim(&self) -> usize {
        self.alg.dim()
    }

    /// Monomials of degree `k` grouped by weight.
    pub fn monomials_by_weight(&self, k: usize) -> &BTreeMap<Rational, Vec<FormMonomial>> {
        &self.by_weight[k]
    }

    fn block_monomials(&self, k: Option<usize>, w: &Rational) -> Vec<FormMonomial> {
        k.and_then(|k| self.by_weight.get(k))
            .and_then(|m| m.get(w))
            .cloned()
            .unwrap_or_default()
    }

    /// `d₀` on a single monomial, extended from the generators as an
    /// antiderivation.
    pub fn d0_monomial(&self, m: FormMonomial) -> InvariantForm {
        let mut out = InvariantForm::zero(m.degree() + 1);
        for (pos, i) in m.indices().enumerate() {
            let rest = FormMonomial(m.0 & !(1 << i));
            let sign = if pos % 2 == 0 { int(1) } else { int(-1) };
            for (pair, c) in self.d0_generators[i].terms() {
                if let Some((s, target)) = pair.wedge(rest) {
                    out.add_term(target, &sign * c * int(s as i64));
                }
            }
        }
        out
    }

    pub fn d0(&self, form: &InvariantForm) -> InvariantForm {
        let mut out = InvariantForm::zero(form.degree() + 1);
        for (m, c) in form.terms() {
            for (t, v) in self.d0_monomial(*m).terms() {
                out.add_term(*t, c * v);
            }
        }
        out
    }

    /// Matrix of `d₀ : Λ^k → Λ^{k+1}` in weight blocks.
    pub fn d0_matrix(&self, k: usize) -> GradedOperator {
        assert!(k <= self.dim(), "degree out of range");
        let blocks = self.by_weight[k]
            .par_iter()
            .map(|(w, cols)| {
                let rows = self.block_monomials(Some(k + 1), w);
                let mut matrix = Matrix::zeros(rows.len(), cols.len());
                for (j, col) in cols.iter().enumerate() {
                    for (t, c) in self.d0_monomial(*col).terms() {
                        let i = rows.binary_search(t).expect("d0 preserves weight");
                        matrix[(i, j)] = c.clone();
                    }
                }
                (
                    w.clone(),
                    WeightBlock {
                        rows,
                        cols: cols.clone(),
                        matrix,
                    },
                )
            })
            .collect::<Vec<_>>();
        let mut blocks: BTreeMap<_, _> = blocks.into_iter().collect();
        // weights present only in the target still get an (empty-column) block
        if let Some(targets) = self.by_weight.get(k + 1) {
            for (w, rows) in targets {
                blocks.entry(w.clone()).or_insert_with(|| WeightBlock {
                    rows: rows.clone(),
                    cols: Vec::new(),
                    matrix: Matrix::zeros(rows.len(), 0),
                });
            }
        }
        GradedOperator {
            source_degree: k,
            target_degree: k + 1,
            blocks,
        }
    }

    /// `δ₀ = d₀ᵀ : Λ^k → Λ^{k−1}`, for `k ≥ 1`.
    pub fn delta0_matrix(&self, k: usize) -> GradedOperator {
        assert!(k >= 1, "δ₀ is defined from degree 1");
        self.d0_matrix(k - 1).transpose()
    }

    /// Partial inverse `d₀⁻¹ : Λ^k → Λ^{k−1}`: zero on `ker δ₀`, and the
    /// inverse of `d₀ : Im δ₀ → Im d₀` on `Im d₀`. Blockwise this is the
    /// Moore–Penrose pseudo-inverse. Requires `k ≥ 1`.
    pub fn d0_pseudoinverse(&self, k: usize) -> GradedOperator {
        assert!(k >= 1, "d₀⁻¹ is defined from degree 1");
        let d = self.d0_matrix(k - 1);
        GradedOperator {
            source_degree: k,
            target_degree: k - 1,
            blocks: d
                .blocks
                .into_iter()
                .map(|(w, b)| {
                    (
                        w,
                        WeightBlock {
                            rows: b.cols,
                            cols: b.rows,
                            matrix: b.matrix.pseudo_inverse(),
                        },
                    )
                })
                .collect(),
        }
    }

    /// Orthogonal basis of `E₀^k = ker d₀ ∩ ker δ₀`, weight block by weight
    /// block (ascending weight), so every element is weight-homogeneous.
    pub fn e0_basis(&self, k: usize) -> Vec<InvariantForm> {
        let d = self.d0_matrix(k);
        let delta = (k >= 1).then(|| self.delta0_matrix(k));
        let mut out = Vec::new();
        for (w, cols) in &self.by_weight[k] {
            let mut stacked = d.blocks[w].matrix.clone();
            if let Some(delta) = &delta {
                if let Some(b) = delta.blocks.get(w) {
                    stacked = stacked.vstack(&b.matrix);
                }
            }
            let kernel = stacked.nullspace();
            for v in gram_schmidt(&kernel) {
                out.push(from_vector(k, cols, &v));
            }
        }
        out
    }

    /// Orthogonal projection `Π_{E₀}` on `Λ^k`.
    pub fn pi_e0(&self, k: usize) -> GradedOperator {
        let basis = self.e0_basis(k);
        let blocks = self.by_weight[k]
            .iter()
            .map(|(w, cols)| {
                let vecs: Vec<Vec<Rational>> = basis
                    .iter()
                    .filter(|f| f.homogeneous_weight(&self.grading).as_ref() == Some(w))
                    .map(|f| to_vector(f, cols))
                    .collect();
                let matrix = Matrix::from_columns(cols.len(), &vecs).column_projection();
                (
                    w.clone(),
                    WeightBlock {
                        rows: cols.clone(),
                        cols: cols.clone(),
                        matrix,
                    },
                )
            })
            .collect();
        GradedOperator {
            source_degree: k,
            target_degree: k,
            blocks,
        }
    }

    /// Orthogonal projection onto `Im d₀ ⊂ Λ^k` (zero for `k = 0`).
    pub fn projection_onto_image(&self, k: usize) -> GradedOperator {
        let d = (k >= 1).then(|| self.d0_matrix(k - 1));
        self.column_space_projection(k, |w| d.as_ref().map(|d| d.blocks[w].matrix.clone()))
    }

    /// Orthogonal projection onto `Im δ₀ ⊂ Λ^k` (zero for `k = n`).
    pub fn projection_onto_coimage(&self, k: usize) -> GradedOperator {
        let delta = (k < self.dim()).then(|| self.delta0_matrix(k + 1));
        self.column_space_projection(k, |w| delta.as_ref().map(|d| d.blocks[w].matrix.clone()))
    }

    /// Orthogonal projection onto `ker δ₀ ⊂ Λ^k` (identity for `k = 0`).
    pub fn projection_onto_ker_delta0(&self, k: usize) -> GradedOperator {
        let delta = (k >= 1).then(|| self.delta0_matrix(k));
        let blocks = self.by_weight[k]
            .iter()
            .map(|(w, cols)| {
                let matrix = match &delta {
                    None => Matrix::identity(cols.len()),
                    Some(delta) => {
                        let delta = &delta.blocks[w].matrix;
                        let kernel = delta.nullspace();
                        Matrix::from_columns(cols.len(), &kernel).column_projection()
                    }
                };
                (
                    w.clone(),
                    WeightBlock {
                        rows: cols.clone(),
                        cols: cols.clone(),
                        matrix,
                    },
                )
            })
            .collect();
        GradedOperator {
            source_degree: k,
            target_degree: k,
            blocks,
        }
    }

    fn column_space_projection<F>(&self, k: usize, spanning: F) -> GradedOperator
    where
        F: Fn(&Rational) -> Option<Matrix>,
    {
        let blocks = self.by_weight[k]
            .iter()
            .map(|(w, cols)| {
                let matrix = match spanning(w) {
                    Some(span) if span.cols() > 0 => span.column_projection(),
                    _ => Matrix::zeros(cols.len(), cols.len()),
                };
                (
                    w.clone(),
                    WeightBlock {
                        rows: cols.clone(),
                        cols: cols.clone(),
                        matrix,
                    },
                )
            })
            .collect();
        GradedOperator {
            source_degree: k,
            target_degree: k,
            blocks,
        }
    }

    /// Hodge star for the orthonormal monomial basis and orientation
    /// `θ_1∧…∧θ_n`: `θ_I ∧ ∗θ_I = vol`.
    pub fn hodge_star(&self, form: &InvariantForm) -> InvariantForm {
        let n = self.dim();
        let full = (1u32 << n) - 1;
        let mut out = InvariantForm::zero(n - form.degree());
        for (m, c) in form.terms() {
            let comp = FormMonomial(full & !m.0);
            let (s, _) = m.wedge(comp).expect("complement is disjoint");
            out.add_term(comp, c * int(s as i64));
        }
        out
    }

    pub fn volume(&self) -> InvariantForm {
        InvariantForm::monomial(FormMonomial((1u32 << self.dim()) - 1), Rational::one())
    }
}

impl fmt::Display for FormMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let idx: Vec<String> = self.indices().map(|i| i.to_string()).collect();
        write!(f, "θ[{}]", idx.join(","))
    }
}

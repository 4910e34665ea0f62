//! Calculus on the simply connected group in exponential coordinates.
//!
//! The group law is the Baker–Campbell–Hausdorff series in Dynkin form,
//! truncated at the nilpotency step. Left-invariant vector fields are
//! obtained by differentiating the law in its second argument, and
//! polynomial differential forms are written in the left-invariant coframe
//! `θ_I`, on which `d(f θ_I) = Σ_i (X_i f) θ^i ∧ θ_I + f d₀θ_I`.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::algebra::{Grading, LieAlgebra, Scalar};
use crate::forms::{monomials, FormMonomial, GradedOperator, InvariantComplex, InvariantForm};
use crate::poly::{monomials_up_to_weight, Exponent, Poly};
use crate::rational::{int, Rational};

/// Default cap on the nilpotency step accepted by the BCH law.
pub const DEFAULT_STEP_CAP: usize = 6;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("nilpotency step {step} exceeds the cap {cap}")]
    StepTooLarge { step: usize, cap: usize },
    #[error("algebra is not nilpotent")]
    NotNilpotent,
    #[error("form mixes coframe weights {0:?}")]
    NotHomogeneous(Vec<String>),
}

/// The BCH law `m(x, y) = log(exp x · exp y)` as a finite sum of nested
/// brackets `c_w [w_1, [w_2, … w_N]]` over words in `{x, y}`.
#[derive(Debug, Clone)]
pub struct BchLaw {
    step: usize,
    /// Word (false = x, true = y) → Dynkin coefficient, nonzero only.
    coefficients: BTreeMap<Vec<bool>, Rational>,
}

fn factorial(n: u32) -> Rational {
    (1..=n).fold(Rational::one(), |acc, k| acc * int(k as i64))
}

/// Dynkin coefficient of the word: `1/N Σ (−1)^{m−1}/m Π 1/(a_i! b_i!)` over
/// factorisations into `m` blocks of the form `x^a y^b`, `a + b > 0`.
fn dynkin_coefficient(word: &[bool]) -> Rational {
    // ways[pos] maps block count m → Σ Π 1/(a!b!) over factorisations of word[pos..]
    let len = word.len();
    let mut ways: Vec<BTreeMap<usize, Rational>> = vec![BTreeMap::new(); len + 1];
    ways[len].insert(0, Rational::one());
    for start in (0..len).rev() {
        let mut acc: BTreeMap<usize, Rational> = BTreeMap::new();
        let mut a = 0u32;
        let mut b = 0u32;
        for end in start..len {
            if word[end] {
                b += 1;
            } else if b > 0 {
                break; // an x after a y starts a new block
            } else {
                a += 1;
            }
            let weight = (factorial(a) * factorial(b)).recip();
            for (m, v) in &ways[end + 1] {
                *acc.entry(m + 1).or_insert_with(Rational::zero) += v * &weight;
            }
        }
        ways[start] = acc;
    }
    let total = ways[0].iter().fold(Rational::zero(), |sum, (&m, v)| {
        let sign = if m % 2 == 1 { int(1) } else { int(-1) };
        sum + sign * v / int(m as i64)
    });
    total / int(len as i64)
}

impl BchLaw {
    pub fn new(alg: &LieAlgebra, step_cap: usize) -> Result<Self, GroupError> {
        let step = alg.nilpotency_step().ok_or(GroupError::NotNilpotent)?;
        if step > step_cap {
            return Err(GroupError::StepTooLarge {
                step,
                cap: step_cap,
            });
        }
        let mut coefficients = BTreeMap::new();
        for len in 1..=step {
            for bits in 0u32..(1 << len) {
                let word: Vec<bool> = (0..len).map(|i| bits & (1 << i) != 0).collect();
                // the innermost bracket [w_{N-1}, w_N] vanishes when they agree
                if len >= 2 && word[len - 1] == word[len - 2] {
                    continue;
                }
                let c = dynkin_coefficient(&word);
                if !c.is_zero() {
                    coefficients.insert(word, c);
                }
            }
        }
        Ok(BchLaw { step, coefficients })
    }

    pub fn step(&self) -> usize {
        self.step
    }

    pub fn coefficient(&self, word: &[bool]) -> Rational {
        self.coefficients
            .get(word)
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    /// `m(x, y)` for coordinate vectors over any scalar ring.
    pub fn product<S>(&self, alg: &LieAlgebra, x: &[S], y: &[S]) -> Vec<S>
    where
        S: Scalar,
        for<'a> &'a S: std::ops::Add<&'a S, Output = S>
            + std::ops::Sub<&'a S, Output = S>
            + std::ops::Mul<&'a S, Output = S>,
    {
        let n = alg.dim();
        let mut out = vec![S::zero(); n];
        // nested[w] = [w_1, [w_2, … w_N]] built by prepending letters
        let mut stack: Vec<(Vec<bool>, Vec<S>)> =
            vec![(vec![false], x.to_vec()), (vec![true], y.to_vec())];
        while let Some((word, value)) = stack.pop() {
            if value.iter().all(Zero::is_zero) {
                continue;
            }
            if let Some(c) = self.coefficients.get(&word) {
                for (o, v) in out.iter_mut().zip(&value) {
                    *o = o.clone() + &v.scale(c);
                }
            }
            if word.len() < self.step {
                for (letter, vec) in [(false, x), (true, y)] {
                    let mut longer = Vec::with_capacity(word.len() + 1);
                    longer.push(letter);
                    longer.extend_from_slice(&word);
                    stack.push((longer, alg.bracket(vec, &value)));
                }
            }
        }
        out
    }

    /// The law as polynomials in `2n` variables: `x_j` is variable `j`,
    /// `y_j` is variable `n + j`.
    pub fn polynomial_law(&self, alg: &LieAlgebra) -> Vec<Poly> {
        let n = alg.dim();
        let x: Vec<Poly> = (0..n).map(Poly::var).collect();
        let y: Vec<Poly> = (0..n).map(|j| Poly::var(n + j)).collect();
        self.product(alg, &x, &y)
    }
}

/// Exact BCH product of two rational points.
pub fn bch_product(
    alg: &LieAlgebra,
    x: &[Rational],
    y: &[Rational],
) -> Result<Vec<Rational>, GroupError> {
    Ok(BchLaw::new(alg, DEFAULT_STEP_CAP)?.product(alg, x, y))
}

/// Polynomial vector field `Σ_j V_j ∂/∂x_j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyVectorField {
    pub components: Vec<Poly>,
}

impl PolyVectorField {
    pub fn apply(&self, f: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (j, c) in self.components.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let df = f.derivative(j);
            if !df.is_zero() {
                out = out + &(c * &df);
            }
        }
        out
    }

    /// Lie bracket `[V, W]_j = V(W_j) − W(V_j)`.
    pub fn commutator(&self, other: &PolyVectorField) -> PolyVectorField {
        PolyVectorField {
            components: self
                .components
                .iter()
                .zip(&other.components)
                .map(|(v, w)| &self.apply(w) - &other.apply(v))
                .collect(),
        }
    }

    pub fn linear_combination(
        fields: &[PolyVectorField],
        coeffs: &[(usize, Rational)],
        n: usize,
    ) -> PolyVectorField {
        let mut components = vec![Poly::zero(); n];
        for (k, c) in coeffs {
            for (slot, comp) in components.iter_mut().zip(&fields[*k].components) {
                *slot = slot.clone() + &comp.scale(c);
            }
        }
        PolyVectorField { components }
    }
}

/// Left-invariant fields `X_i = d/dt m(x, t e_i)|_{t=0}`.
pub fn left_invariant_fields(alg: &LieAlgebra, law: &BchLaw) -> Vec<PolyVectorField> {
    let n = alg.dim();
    let x: Vec<Poly> = (0..n).map(Poly::var).collect();
    let t = n; // auxiliary variable
    (0..n)
        .map(|i| {
            let y: Vec<Poly> = (0..n)
                .map(|j| if j == i { Poly::var(t) } else { Poly::zero() })
                .collect();
            let m = law.product(alg, &x, &y);
            PolyVectorField {
                components: m.iter().map(|p| p.coefficient_of_power(t, 1)).collect(),
            }
        })
        .collect()
}

/// Differential form with polynomial coefficients in the coframe `θ_I`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyForm {
    degree: usize,
    coeffs: BTreeMap<FormMonomial, Poly>,
}

impl PolyForm {
    pub fn zero(degree: usize) -> Self {
        PolyForm {
            degree,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn term(m: FormMonomial, p: Poly) -> Self {
        let mut f = Self::zero(m.degree());
        f.add_term(m, p);
        f
    }

    pub fn function(p: Poly) -> Self {
        Self::term(FormMonomial(0), p)
    }

    /// `P · α` for an invariant form `α`.
    pub fn from_invariant(alpha: &InvariantForm, p: &Poly) -> Self {
        let mut f = Self::zero(alpha.degree());
        for (m, c) in alpha.terms() {
            f.add_term(*m, p.scale(c));
        }
        f
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&FormMonomial, &Poly)> {
        self.coeffs.iter()
    }

    pub fn coefficient(&self, m: FormMonomial) -> Poly {
        self.coeffs.get(&m).cloned().unwrap_or_default()
    }

    pub fn add_term(&mut self, m: FormMonomial, p: Poly) {
        assert_eq!(m.degree(), self.degree, "monomial degree mismatch");
        if p.is_zero() {
            return;
        }
        let slot = self.coeffs.entry(m).or_default();
        *slot = std::mem::take(slot) + &p;
        if slot.is_zero() {
            self.coeffs.remove(&m);
        }
    }

    pub fn add(&self, other: &PolyForm) -> PolyForm {
        assert_eq!(self.degree, other.degree);
        let mut out = self.clone();
        for (m, p) in other.terms() {
            out.add_term(*m, p.clone());
        }
        out
    }

    pub fn sub(&self, other: &PolyForm) -> PolyForm {
        self.add(&other.scale(&-Rational::one()))
    }

    pub fn scale(&self, c: &Rational) -> PolyForm {
        let mut out = Self::zero(self.degree);
        for (m, p) in self.terms() {
            out.add_term(*m, p.scale(c));
        }
        out
    }

    /// Applies a constant linear map on `Λ` coefficientwise.
    pub fn apply_pointwise(&self, op: &PointwiseOperator) -> PolyForm {
        let mut out = Self::zero(op.target_degree);
        for (m, p) in self.terms() {
            if let Some(image) = op.images.get(m) {
                for (t, c) in image {
                    out.add_term(*t, p.scale(c));
                }
            }
        }
        out
    }

    /// Distinct coframe weights `w(I)` present, ascending.
    pub fn coframe_weights(&self, grading: &Grading) -> Vec<Rational> {
        let mut ws: Vec<Rational> = self.coeffs.keys().map(|m| m.weight(grading)).collect();
        ws.sort();
        ws.dedup();
        ws
    }

    /// Distinct total weights `w(β) + w(I)` of the terms `x^β θ_I`.
    pub fn total_weights(&self, grading: &Grading) -> Vec<Rational> {
        let mut ws = Vec::new();
        for (m, p) in self.terms() {
            let wi = m.weight(grading);
            for w in p.weights(grading.weights()) {
                ws.push(&w + &wi);
            }
        }
        ws.sort();
        ws.dedup();
        ws
    }

    /// Part of the form with coframe weight exactly `w`.
    pub fn coframe_component(&self, grading: &Grading, w: &Rational) -> PolyForm {
        PolyForm {
            degree: self.degree,
            coeffs: self
                .coeffs
                .iter()
                .filter(|(m, _)| m.weight(grading) == *w)
                .map(|(m, p)| (*m, p.clone()))
                .collect(),
        }
    }

    /// Pullback by the dilation `δ_t`: `x_j ↦ t^{w(j)} x_j`,
    /// `θ_I ↦ t^{w(I)} θ_I`. Needs integer weights.
    pub fn dilate(&self, grading: &Grading, t: &Rational) -> Option<PolyForm> {
        let pow = |w: &Rational| -> Option<Rational> {
            if !w.is_integer() {
                return None;
            }
            let e: i32 = w.to_integer().try_into().ok()?;
            Some(num_traits::pow::Pow::pow(t.clone(), e))
        };
        let factors: Option<Vec<Rational>> = grading.weights().iter().map(pow).collect();
        let factors = factors?;
        let mut out = Self::zero(self.degree);
        for (m, p) in self.terms() {
            let s = pow(&m.weight(grading))?;
            out.add_term(*m, p.scale_variables(&factors).scale(&s));
        }
        Some(out)
    }

    pub fn display(&self, alg: &LieAlgebra) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let names: Vec<String> = alg.basis().iter().map(|l| l.to_lowercase()).collect();
        let parts: Vec<String> = self
            .terms()
            .map(|(m, p)| {
                let coeff = p.display(&names);
                let coeff = if p.len() > 1 {
                    format!("({coeff})")
                } else {
                    coeff
                };
                if m.0 == 0 {
                    coeff
                } else if *p == Poly::one() {
                    m.display(alg)
                } else {
                    format!("{coeff}·{}", m.display(alg))
                }
            })
            .collect();
        parts.join(" + ")
    }
}

/// Constant linear map on `Λ` in the sparse "image of each monomial" form.
#[derive(Debug, Clone)]
pub struct PointwiseOperator {
    pub source_degree: usize,
    pub target_degree: usize,
    pub images: BTreeMap<FormMonomial, Vec<(FormMonomial, Rational)>>,
}

impl From<&GradedOperator> for PointwiseOperator {
    fn from(op: &GradedOperator) -> Self {
        PointwiseOperator {
            source_degree: op.source_degree,
            target_degree: op.target_degree,
            images: op.images(),
        }
    }
}

/// Group calculus for a graded algebra: fields, `d` and its weight pieces.
#[derive(Debug, Clone)]
pub struct GroupCalculus {
    complex: InvariantComplex,
    law: BchLaw,
    fields: Vec<PolyVectorField>,
    /// `d₀` on each degree, coefficientwise.
    d0: Vec<PointwiseOperator>,
}

impl GroupCalculus {
    pub fn new(alg: &LieAlgebra, grading: &Grading) -> Result<Self, GroupError> {
        Self::with_step_cap(alg, grading, DEFAULT_STEP_CAP)
    }

    pub fn with_step_cap(
        alg: &LieAlgebra,
        grading: &Grading,
        step_cap: usize,
    ) -> Result<Self, GroupError> {
        let law = BchLaw::new(alg, step_cap)?;
        let fields = left_invariant_fields(alg, &law);
        let complex = InvariantComplex::new(alg, grading);
        let n = alg.dim();
        let d0 = (0..=n)
            .map(|k| {
                let images = monomials(n, k)
                    .into_iter()
                    .map(|m| {
                        let image = complex.d0_monomial(m);
                        (m, image.terms().map(|(t, c)| (*t, c.clone())).collect())
                    })
                    .collect();
                PointwiseOperator {
                    source_degree: k,
                    target_degree: k + 1,
                    images,
                }
            })
            .collect();
        Ok(GroupCalculus {
            complex,
            law,
            fields,
            d0,
        })
    }

    pub fn complex(&self) -> &InvariantComplex {
        &self.complex
    }

    pub fn algebra(&self) -> &LieAlgebra {
        self.complex.algebra()
    }

    pub fn grading(&self) -> &Grading {
        self.complex.grading()
    }

    pub fn dim(&self) -> usize {
        self.complex.dim()
    }

    pub fn law(&self) -> &BchLaw {
        &self.law
    }

    pub fn fields(&self) -> &[PolyVectorField] {
        &self.fields
    }

    /// `X_i f`.
    pub fn apply_field(&self, i: usize, f: &Poly) -> Poly {
        self.fields[i].apply(f)
    }

    /// De Rham differential in the invariant coframe.
    pub fn d(&self, form: &PolyForm) -> PolyForm {
        let k = form.degree();
        let mut out = PolyForm::zero(k + 1);
        if k >= self.dim() {
            return out;
        }
        for (m, f) in form.terms() {
            for i in 0..self.dim() {
                if m.contains(i) {
                    continue;
                }
                let xf = self.apply_field(i, f);
                if xf.is_zero() {
                    continue;
                }
                let (s, target) = FormMonomial(1 << i).wedge(*m).expect("disjoint");
                out.add_term(target, xf.scale(&int(s as i64)));
            }
        }
        out.add(&form.apply_pointwise(&self.d0[k]))
    }

    /// Splits `d ω` by how much it raises the coframe weight of a
    /// coframe-homogeneous `ω`; only nonzero pieces are returned.
    pub fn weight_split(
        &self,
        form: &PolyForm,
    ) -> Result<BTreeMap<Rational, PolyForm>, GroupError> {
        let g = self.grading();
        let ws = form.coframe_weights(g);
        if ws.len() > 1 {
            return Err(GroupError::NotHomogeneous(
                ws.iter().map(crate::rational::format_rational).collect(),
            ));
        }
        let mut out = BTreeMap::new();
        let Some(w) = ws.first() else { return Ok(out) };
        let df = self.d(form);
        for target in df.coframe_weights(g) {
            out.insert(&target - w, df.coframe_component(g, &target));
        }
        Ok(out)
    }

    /// All `x^β θ_I` of degree `k` with `w(β) + w(I) ≤ cap`, sorted by total
    /// weight, then coframe monomial, then exponent.
    pub fn homogeneous_generators(&self, k: usize, cap: &Rational) -> Vec<PolyForm> {
        let g = self.grading();
        let mut out: Vec<(Rational, FormMonomial, Exponent)> = Vec::new();
        let monos = monomials_up_to_weight(g.weights(), cap, true);
        for m in monomials(self.dim(), k) {
            let wi = m.weight(g);
            if wi > *cap {
                continue;
            }
            for (wb, e) in &monos {
                let total = wb + &wi;
                if total <= *cap {
                    out.push((total, m, e.clone()));
                }
            }
        }
        out.sort();
        out.into_iter()
            .map(|(_, m, e)| PolyForm::term(m, Poly::term(e, Rational::one())))
            .collect()
    }
}

impl fmt::Display for PolyVectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .components
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(j, c)| format!("({})∂{j}", c.display(&[])))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{carnot_grading, derivation_grading};
    use crate::corpus;
    use crate::rational::ratio;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn calc(alg: &LieAlgebra, layer1: &[usize]) -> GroupCalculus {
        GroupCalculus::new(alg, &carnot_grading(alg, layer1).unwrap()).unwrap()
    }

    fn rat_vec(rng: &mut StdRng, n: usize) -> Vec<Rational> {
        (0..n)
            .map(|_| ratio(rng.gen_range(-9..10), rng.gen_range(1..6)))
            .collect()
    }

    #[test]
    fn dynkin_low_order_coefficients() {
        assert_eq!(dynkin_coefficient(&[false]), int(1));
        assert_eq!(dynkin_coefficient(&[false, true]), ratio(1, 4));
        assert_eq!(dynkin_coefficient(&[true, false]), ratio(-1, 4));
    }

    #[test]
    fn abelian_law_is_addition() {
        let a = corpus::abelian(3);
        let x = vec![int(1), ratio(1, 2), int(-3)];
        let y = vec![int(2), int(2), ratio(1, 3)];
        let m = bch_product(&a, &x, &y).unwrap();
        assert_eq!(m, vec![int(3), ratio(5, 2), ratio(-8, 3)]);
    }

    #[test]
    fn heisenberg_law_closed_form() {
        let h = corpus::heisenberg(1);
        let law = BchLaw::new(&h, DEFAULT_STEP_CAP)
            .unwrap()
            .polynomial_law(&h);
        // z₁ + z₂ + ½(x₁y₂ − y₁x₂) with x = vars 0..3, y = vars 3..6
        let v = Poly::var;
        let expected = &(&(&v(2) + &v(5)) + &(&v(0) * &v(4)).scale(&ratio(1, 2)))
            - &(&v(1) * &v(3)).scale(&ratio(1, 2));
        assert_eq!(law[2], expected);
        assert_eq!(law[0], &v(0) + &v(3));
    }

    #[test]
    fn law_is_unital_and_inverse_is_negation() {
        let mut rng = StdRng::seed_from_u64(7);
        for (_, alg, _) in corpus::carnot_corpus() {
            let n = alg.dim();
            let law = BchLaw::new(&alg, DEFAULT_STEP_CAP).unwrap();
            let zero = vec![Rational::zero(); n];
            for _ in 0..5 {
                let x = rat_vec(&mut rng, n);
                assert_eq!(law.product(&alg, &x, &zero), x);
                assert_eq!(law.product(&alg, &zero, &x), x);
                let neg: Vec<Rational> = x.iter().map(|v| -v).collect();
                assert_eq!(law.product(&alg, &x, &neg), zero);
            }
        }
    }

    #[test]
    fn engel_law_is_associative() {
        let e = corpus::engel();
        let law = BchLaw::new(&e, DEFAULT_STEP_CAP).unwrap();
        let mut rng = StdRng::seed_from_u64(11);
        for _ in 0..20 {
            let (a, b, c) = (
                rat_vec(&mut rng, 4),
                rat_vec(&mut rng, 4),
                rat_vec(&mut rng, 4),
            );
            let left = law.product(&e, &law.product(&e, &a, &b), &c);
            let right = law.product(&e, &a, &law.product(&e, &b, &c));
            assert_eq!(left, right);
        }
    }

    #[test]
    fn step_cap_is_enforced() {
        let e = corpus::engel();
        assert_eq!(
            BchLaw::new(&e, 2).unwrap_err(),
            GroupError::StepTooLarge { step: 3, cap: 2 }
        );
    }

    #[test]
    fn heisenberg_fields() {
        let c = calc(&corpus::heisenberg(1), &[0, 1]);
        let f = c.fields();
        let v = Poly::var;
        assert_eq!(
            f[0].components,
            vec![Poly::one(), Poly::zero(), v(1).scale(&ratio(-1, 2))]
        );
        assert_eq!(
            f[1].components,
            vec![Poly::zero(), Poly::one(), v(0).scale(&ratio(1, 2))]
        );
        assert_eq!(
            f[2].components,
            vec![Poly::zero(), Poly::zero(), Poly::one()]
        );
        assert_eq!(f[0].commutator(&f[1]), f[2]);
    }

    #[test]
    fn abelian_fields_are_coordinate_fields() {
        let c = calc(&corpus::abelian(3), &[0, 1, 2]);
        for (i, f) in c.fields().iter().enumerate() {
            for (j, comp) in f.components.iter().enumerate() {
                assert_eq!(*comp, if i == j { Poly::one() } else { Poly::zero() });
            }
        }
    }

    #[test]
    fn fields_realise_structure_constants() {
        for (_, alg, layer1) in corpus::carnot_corpus() {
            let c = calc(&alg, &layer1);
            let n = alg.dim();
            for i in 0..n {
                for j in 0..n {
                    let lhs = c.fields()[i].commutator(&c.fields()[j]);
                    let coeffs: Vec<(usize, Rational)> =
                        alg.bracket_basis(i, j).into_iter().collect();
                    let rhs = PolyVectorField::linear_combination(c.fields(), &coeffs, n);
                    assert_eq!(lhs, rhs, "{} [{i},{j}]", alg.name());
                }
            }
        }
    }

    #[test]
    fn fields_are_triangular_and_homogeneous() {
        let alg = corpus::engel();
        for g in [
            carnot_grading(&alg, &[0, 1]).unwrap(),
            derivation_grading(&alg, vec![int(1), int(2), int(3), int(4)]).unwrap(),
        ] {
            let c = GroupCalculus::new(&alg, &g).unwrap();
            for (i, f) in c.fields().iter().enumerate() {
                for (j, p) in f.components.iter().enumerate() {
                    if i == j {
                        assert_eq!(*p, Poly::one());
                        continue;
                    }
                    let expected = g.weight(j) - g.weight(i);
                    for w in p.weights(g.weights()) {
                        assert_eq!(w, expected);
                        assert!(w < *g.weight(j));
                    }
                }
            }
        }
    }

    #[test]
    fn heisenberg_differentials_of_coordinates() {
        let c = calc(&corpus::heisenberg(1), &[0, 1]);
        let x = PolyForm::function(Poly::var(0));
        assert_eq!(c.d(&x), PolyForm::term(FormMonomial(0b001), Poly::one()));
        // dz = θ_Z − (y/2)θ_X + (x/2)θ_Y
        let dz = c.d(&PolyForm::function(Poly::var(2)));
        let mut expected = PolyForm::term(FormMonomial(0b100), Poly::one());
        expected.add_term(FormMonomial(0b001), Poly::var(1).scale(&ratio(-1, 2)));
        expected.add_term(FormMonomial(0b010), Poly::var(0).scale(&ratio(1, 2)));
        assert_eq!(dz, expected);
        assert!(c.d(&dz).is_zero());
    }

    #[test]
    fn d_on_constant_forms_is_d0() {
        for (_, alg, layer1) in corpus::carnot_corpus().into_iter().take(10) {
            let c = calc(&alg, &layer1);
            for k in 0..alg.dim() {
                for m in monomials(alg.dim(), k) {
                    let alpha = InvariantForm::monomial(m, ratio(3, 2));
                    let lifted = PolyForm::from_invariant(&alpha, &Poly::one());
                    let expected = PolyForm::from_invariant(&c.complex().d0(&alpha), &Poly::one());
                    assert_eq!(c.d(&lifted), expected);
                }
            }
        }
    }

    #[test]
    fn weight_split_on_invariant_forms_is_d0_only() {
        let c = calc(&corpus::engel(), &[0, 1]);
        let theta_t = PolyForm::term(FormMonomial(0b1000), Poly::one());
        let split = c.weight_split(&theta_t).unwrap();
        assert_eq!(split.keys().cloned().collect::<Vec<_>>(), vec![int(0)]);
    }

    #[test]
    fn weight_split_heisenberg_horizontal_and_vertical() {
        let c = calc(&corpus::heisenberg(1), &[0, 1]);
        // f θ_Z with f = x + z·0 … take f = x·y? weight-1 f = x
        let f = Poly::var(0);
        let omega = PolyForm::term(FormMonomial(0b100), f.clone());
        let split = c.weight_split(&omega).unwrap();
        // d₁ = (X f) θ_X∧θ_Z + (Y f) θ_Y∧θ_Z; X x = 1, Y x = 0
        assert_eq!(
            split[&int(1)],
            PolyForm::term(FormMonomial(0b101), Poly::one())
        );
        assert!(!split.contains_key(&int(2)));
        // d₀ part: x · d₀θ_Z = −x θ_X∧θ_Y
        assert_eq!(split[&int(0)], PolyForm::term(FormMonomial(0b011), -f));
        let mixed = omega.add(
            &PolyForm::term(FormMonomial(0b001), Poly::one())
                .scale(&int(0))
                .add(&PolyForm::zero(1)),
        );
        assert!(c.weight_split(&mixed).is_ok());
        let mut bad = PolyForm::zero(1);
        bad.add_term(FormMonomial(0b001), Poly::one());
        bad.add_term(FormMonomial(0b100), Poly::one());
        assert!(matches!(
            c.weight_split(&bad),
            Err(GroupError::NotHomogeneous(_))
        ));
    }

    #[test]
    fn d_squared_vanishes_on_heisenberg_generators() {
        let c = calc(&corpus::heisenberg(1), &[0, 1]);
        for k in 0..=3 {
            for g in c.homogeneous_generators(k, &int(8)) {
                assert!(c.d(&c.d(&g)).is_zero(), "{}", g.display(c.algebra()));
            }
        }
    }

    #[test]
    fn d_preserves_total_weight_and_commutes_with_dilations() {
        let alg = corpus::engel();
        let c = calc(&alg, &[0, 1]);
        let g = c.grading().clone();
        let t = ratio(2, 3);
        for k in 0..=2 {
            for gen in c.homogeneous_generators(k, &int(6)) {
                let lam = gen.total_weights(&g);
                let dg = c.d(&gen);
                if !dg.is_zero() {
                    assert_eq!(dg.total_weights(&g), lam);
                }
                assert_eq!(
                    c.d(&gen.dilate(&g, &t).unwrap()),
                    dg.dilate(&g, &t).unwrap()
                );
            }
        }
    }

    #[test]
    fn components_beyond_step_vanish() {
        let c = calc(&corpus::engel(), &[0, 1]);
        for k in 0..=3 {
            for gen in c.homogeneous_generators(k, &int(7)) {
                let split = c.weight_split(&gen).unwrap();
                assert!(split.keys().all(|i| *i <= int(3)));
                let total = split
                    .values()
                    .fold(PolyForm::zero(k + 1), |acc, f| acc.add(f));
                assert_eq!(total, c.d(&gen));
            }
        }
    }
}

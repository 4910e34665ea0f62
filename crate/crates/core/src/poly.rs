//! Sparse multivariate polynomials with rational coefficients.
//!
//! Exponent vectors are stored with trailing zeros trimmed, so a polynomial
//! does not need to know how many variables exist and equality is
//! structural. Term order is lexicographic on exponent vectors.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::algebra::Scalar;
use crate::rational::{Exact, Rational};

/// Exponent vector of a monomial `x^β`, trailing zeros trimmed.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Exponent(Vec<u32>);

impl Exponent {
    pub fn new(mut powers: Vec<u32>) -> Self {
        while powers.last() == Some(&0) {
            powers.pop();
        }
        Exponent(powers)
    }

    pub fn one() -> Self {
        Exponent(Vec::new())
    }

    pub fn var(i: usize) -> Self {
        let mut v = vec![0; i + 1];
        v[i] = 1;
        Exponent(v)
    }

    pub fn power(&self, i: usize) -> u32 {
        self.0.get(i).copied().unwrap_or(0)
    }

    pub fn powers(&self) -> &[u32] {
        &self.0
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().sum()
    }

    /// Dilation weight `w(β) = Σ β_j w(j)`.
    pub fn weight(&self, weights: &[Rational]) -> Rational {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &p)| p > 0)
            .fold(Rational::zero(), |acc, (j, &p)| {
                acc + &weights[j] * Rational::from_integer(p.into())
            })
    }

    fn mul(&self, other: &Exponent) -> Exponent {
        let len = self.0.len().max(other.0.len());
        let v = (0..len).map(|i| self.power(i) + other.power(i)).collect();
        Exponent(v)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Poly {
    terms: BTreeMap<Exponent, Rational>,
}

impl Poly {
    pub fn constant(c: Rational) -> Self {
        Self::term(Exponent::one(), c)
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn var(i: usize) -> Self {
        Self::term(Exponent::var(i), Rational::one())
    }

    pub fn term(e: Exponent, c: Rational) -> Self {
        let mut p = Poly::default();
        p.add_term(e, c);
        p
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &Rational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, e: &Exponent) -> Rational {
        self.terms.get(e).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn add_term(&mut self, e: Exponent, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            Entry::Vacant(slot) => {
                slot.insert(c);
            }
            Entry::Occupied(mut slot) => {
                *slot.get_mut() += c;
                if slot.get().is_zero() {
                    slot.remove();
                }
            }
        }
    }

    fn add_scaled(&mut self, other: &Poly, c: &Rational) {
        for (e, v) in &other.terms {
            self.add_term(e.clone(), v * c);
        }
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        if c.is_zero() {
            return Poly::default();
        }
        Poly {
            terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect(),
        }
    }

    pub fn derivative(&self, var: usize) -> Poly {
        let mut out = Poly::default();
        for (e, c) in &self.terms {
            let p = e.power(var);
            if p == 0 {
                continue;
            }
            let mut powers = e.0.clone();
            powers[var] -= 1;
            out.add_term(Exponent::new(powers), c * Rational::from_integer(p.into()));
        }
        out
    }

    /// Largest power of `var` present.
    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.keys().map(|e| e.power(var)).max().unwrap_or(0)
    }

    /// Coefficient of `var^power`, as a polynomial in the other variables.
    pub fn coefficient_of_power(&self, var: usize, power: u32) -> Poly {
        let mut out = Poly::default();
        for (e, c) in &self.terms {
            if e.power(var) == power {
                let mut powers = e.0.clone();
                if var < powers.len() {
                    powers[var] = 0;
                }
                out.add_term(Exponent::new(powers), c.clone());
            }
        }
        out
    }

    pub fn evaluate(&self, point: &[Rational]) -> Rational {
        let mut acc = Rational::zero();
        for (e, c) in &self.terms {
            let mut v = c.clone();
            for (j, &p) in e.0.iter().enumerate() {
                for _ in 0..p {
                    v *= &point[j];
                }
            }
            acc += v;
        }
        acc
    }

    /// Substitutes polynomials for variables: `x_j ↦ values[j]`.
    pub fn compose(&self, values: &[Poly]) -> Poly {
        let mut out = Poly::default();
        for (e, c) in &self.terms {
            let mut m = Poly::constant(c.clone());
            for (j, &p) in e.0.iter().enumerate() {
                for _ in 0..p {
                    m = &m * &values[j];
                }
            }
            out.add_scaled(&m, &Rational::one());
        }
        out
    }

    /// `x_j ↦ factors[j] · x_j`.
    pub fn scale_variables(&self, factors: &[Rational]) -> Poly {
        let mut out = Poly::default();
        for (e, c) in &self.terms {
            let mut v = c.clone();
            for (j, &p) in e.0.iter().enumerate() {
                for _ in 0..p {
                    v *= &factors[j];
                }
            }
            out.add_term(e.clone(), v);
        }
        out
    }

    /// Distinct monomial weights present, ascending.
    pub fn weights(&self, weights: &[Rational]) -> Vec<Rational> {
        let mut ws: Vec<Rational> = self.terms.keys().map(|e| e.weight(weights)).collect();
        ws.sort();
        ws.dedup();
        ws
    }

    pub fn display(&self, names: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(e, c)| {
                let mono: Vec<String> =
                    e.0.iter()
                        .enumerate()
                        .filter(|(_, &p)| p > 0)
                        .map(|(j, &p)| {
                            let name = names.get(j).cloned().unwrap_or_else(|| format!("x{j}"));
                            if p == 1 {
                                name
                            } else {
                                format!("{name}^{p}")
                            }
                        })
                        .collect();
                if mono.is_empty() {
                    Exact(c).to_string()
                } else if c.is_one() {
                    mono.join("·")
                } else {
                    format!("{}·{}", Exact(c), mono.join("·"))
                }
            })
            .collect();
        parts.join(" + ")
    }
}

impl Zero for Poly {
    fn zero() -> Self {
        Poly::default()
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl Add<&Poly> for &Poly {
    type Output = Poly;

    fn add(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        out.add_scaled(rhs, &Rational::one());
        out
    }
}

impl Add<&Poly> for Poly {
    type Output = Poly;

    fn add(mut self, rhs: &Poly) -> Poly {
        self.add_scaled(rhs, &Rational::one());
        self
    }
}

impl Add for Poly {
    type Output = Poly;

    fn add(self, rhs: Poly) -> Poly {
        self + &rhs
    }
}

impl Sub<&Poly> for &Poly {
    type Output = Poly;

    fn sub(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        out.add_scaled(rhs, &-Rational::one());
        out
    }
}

impl Mul<&Poly> for &Poly {
    type Output = Poly;

    fn mul(self, rhs: &Poly) -> Poly {
        let mut out = Poly::default();
        for (a, ca) in &self.terms {
            for (b, cb) in &rhs.terms {
                out.add_term(a.mul(b), ca * cb);
            }
        }
        out
    }
}

impl Neg for Poly {
    type Output = Poly;

    fn neg(self) -> Poly {
        Poly {
            terms: self.terms.into_iter().map(|(e, c)| (e, -c)).collect(),
        }
    }
}

impl Scalar for Poly {
    fn scale(&self, c: &Rational) -> Self {
        Poly::scale(self, c)
    }
}

/// All exponents `β` over `weights.len()` variables with `0 < w(β) ≤ cap`
/// (plus `β = 0` when `include_one`), sorted by weight and then
/// lexicographically.
pub fn monomials_up_to_weight(
    weights: &[Rational],
    cap: &Rational,
    include_one: bool,
) -> Vec<(Rational, Exponent)> {
    fn rec(
        weights: &[Rational],
        var: usize,
        remaining: &Rational,
        current: &mut Vec<u32>,
        out: &mut Vec<Vec<u32>>,
    ) {
        if var == weights.len() {
            out.push(current.clone());
            return;
        }
        let mut used = Rational::zero();
        let mut p = 0;
        while &used <= remaining {
            current.push(p);
            rec(weights, var + 1, &(remaining - &used), current, out);
            current.pop();
            used += &weights[var];
            p += 1;
        }
    }
    let mut raw = Vec::new();
    rec(weights, 0, cap, &mut Vec::new(), &mut raw);
    let mut out: Vec<(Rational, Exponent)> = raw
        .into_iter()
        .map(Exponent::new)
        .filter(|e| include_one || !e.powers().is_empty())
        .map(|e| (e.weight(weights), e))
        .collect();
    out.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};
    use proptest::prelude::*;

    fn x() -> Poly {
        Poly::var(0)
    }
    fn y() -> Poly {
        Poly::var(1)
    }

    #[test]
    fn arithmetic_and_cancellation() {
        let p = &x() + &y();
        let q = &x() - &y();
        let prod = &p * &q; // x² − y²
        assert_eq!(prod.len(), 2);
        assert_eq!(prod.coefficient(&Exponent::new(vec![2])), int(1));
        assert_eq!(prod.coefficient(&Exponent::new(vec![0, 2])), int(-1));
        assert!((&p - &p).is_zero());
    }

    #[test]
    fn derivative_of_monomial() {
        let p = Poly::term(Exponent::new(vec![3, 1]), ratio(1, 2));
        let d = p.derivative(0);
        assert_eq!(d, Poly::term(Exponent::new(vec![2, 1]), ratio(3, 2)));
        assert!(p.derivative(2).is_zero());
    }

    #[test]
    fn trailing_zeros_are_canonical() {
        assert_eq!(Exponent::new(vec![1, 0, 0]), Exponent::var(0));
        assert_eq!(Poly::var(3).derivative(3), Poly::one());
    }

    #[test]
    fn monomial_enumeration_by_weight() {
        let ws = vec![int(1), int(1), int(2)];
        let ms = monomials_up_to_weight(&ws, &int(2), false);
        // weight 1: y, x; weight 2: z, y², xy, x²
        let shown: Vec<(i64, Vec<u32>)> = ms
            .iter()
            .map(|(w, e)| (w.to_integer().try_into().unwrap(), e.powers().to_vec()))
            .collect();
        assert_eq!(
            shown,
            vec![
                (1, vec![0, 1]),
                (1, vec![1]),
                (2, vec![0, 0, 1]),
                (2, vec![0, 2]),
                (2, vec![1, 1]),
                (2, vec![2]),
            ]
        );
        assert_eq!(monomials_up_to_weight(&ws, &int(0), true).len(), 1);
    }

    #[test]
    fn compose_and_evaluate() {
        let p = &(&x() * &x()) + &y();
        let sub = p.compose(&[&x() + &Poly::one(), Poly::constant(int(3))]);
        // (x+1)² + 3 at x = 2 is 12
        assert_eq!(sub.evaluate(&[int(2)]), int(12));
        assert_eq!(
            p.scale_variables(&[int(2), int(5)])
                .evaluate(&[int(1), int(1)]),
            int(9)
        );
    }

    fn small_poly() -> impl Strategy<Value = Poly> {
        proptest::collection::vec(((0u32..3, 0u32..3), -4i64..5), 0..5).prop_map(|terms| {
            let mut p = Poly::default();
            for ((a, b), c) in terms {
                p.add_term(Exponent::new(vec![a, b]), int(c));
            }
            p
        })
    }

    proptest! {
        #[test]
        fn ring_laws(a in small_poly(), b in small_poly(), c in small_poly()) {
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&a * &b, &b * &a);
            // Leibniz rule
            let lhs = (&a * &b).derivative(0);
            let rhs = &(&a.derivative(0) * &b) + &(&a * &b.derivative(0));
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn evaluation_is_a_ring_map(a in small_poly(), b in small_poly(), u in -5i64..5, v in -5i64..5) {
            let pt = [int(u), int(v)];
            prop_assert_eq!((&a * &b).evaluate(&pt), a.evaluate(&pt) * b.evaluate(&pt));
            prop_assert_eq!((&a + &b).evaluate(&pt), a.evaluate(&pt) + b.evaluate(&pt));
        }
    }
}

//! Weight-graded Lie algebra cohomology `H^{k,w}(𝔤)` and the weight-gap
//! quantities built from it.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{Grading, LieAlgebra};
use crate::forms::InvariantComplex;
use crate::rational::{self, Exact, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DegreeCohomology {
    pub degree: usize,
    pub betti: usize,
    /// Weight multiset of `H^k`, ascending.
    #[serde(with = "rational::as_string::vec")]
    pub weights: Vec<Rational>,
    #[serde(with = "rational::as_string::option")]
    pub w_min: Option<Rational>,
    #[serde(with = "rational::as_string::option")]
    pub w_max: Option<Rational>,
}

/// `δN_max(k)` and `δN_min(k)`; `None` when a neighbouring cohomology group
/// is zero and the weights are undefined.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WeightGap {
    pub degree: usize,
    #[serde(with = "rational::as_string::option")]
    pub delta_n_max: Option<Rational>,
    #[serde(with = "rational::as_string::option")]
    pub delta_n_min: Option<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CohomologyTable {
    pub algebra: String,
    pub dimension: usize,
    pub is_carnot: bool,
    #[serde(with = "rational::as_string")]
    pub homogeneous_dim: Rational,
    /// Degrees `0..=n`.
    pub degrees: Vec<DegreeCohomology>,
    /// Degrees `1..=n`.
    pub gaps: Vec<WeightGap>,
}

impl CohomologyTable {
    pub fn betti(&self, k: usize) -> usize {
        self.degrees[k].betti
    }

    pub fn weights(&self, k: usize) -> &[Rational] {
        &self.degrees[k].weights
    }

    pub fn w_min(&self, k: usize) -> Option<&Rational> {
        self.degrees[k].w_min.as_ref()
    }

    pub fn w_max(&self, k: usize) -> Option<&Rational> {
        self.degrees[k].w_max.as_ref()
    }

    /// `δN_max(k)` for `1 ≤ k ≤ n`.
    pub fn delta_n_max(&self, k: usize) -> Option<&Rational> {
        self.gaps[k - 1].delta_n_max.as_ref()
    }

    /// `δN_min(k)` for `1 ≤ k ≤ n`.
    pub fn delta_n_min(&self, k: usize) -> Option<&Rational> {
        self.gaps[k - 1].delta_n_min.as_ref()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.degrees
            .iter()
            .map(|d| {
                if d.degree % 2 == 0 {
                    d.betti as i64
                } else {
                    -(d.betti as i64)
                }
            })
            .sum()
    }

    /// `H^{k,w}` dimensions for one degree.
    pub fn weight_multiplicities(&self, k: usize) -> BTreeMap<Rational, usize> {
        let mut out = BTreeMap::new();
        for w in self.weights(k) {
            *out.entry(w.clone()).or_insert(0) += 1;
        }
        out
    }
}

/// Computes `dim H^{k,w} = dim ker(d₀|_{k,w}) − rank(d₀|_{k−1,w})` block by
/// block.
pub fn cohomology(alg: &LieAlgebra, grading: &Grading) -> CohomologyTable {
    let complex = InvariantComplex::new(alg, grading);
    cohomology_of(&complex)
}

pub fn cohomology_of(complex: &InvariantComplex) -> CohomologyTable {
    let n = complex.dim();
    // ranks[k][w] = rank of d₀ : Λ^{k,w} → Λ^{k+1,w}
    let ranks: Vec<BTreeMap<Rational, usize>> = (0..=n)
        .into_par_iter()
        .map(|k| {
            let op = complex.d0_matrix(k);
            op.blocks
                .into_par_iter()
                .map(|(w, b)| (w, b.matrix.rank()))
                .collect::<Vec<_>>()
                .into_iter()
                .collect()
        })
        .collect();
    let degrees: Vec<DegreeCohomology> = (0..=n)
        .map(|k| {
            let mut weights = Vec::new();
            for (w, monos) in complex.monomials_by_weight(k) {
                let out_rank = ranks[k].get(w).copied().unwrap_or(0);
                let in_rank = if k == 0 {
                    0
                } else {
                    ranks[k - 1].get(w).copied().unwrap_or(0)
                };
                let dim = monos.len() - out_rank - in_rank;
                weights.extend(std::iter::repeat_n(w.clone(), dim));
            }
            DegreeCohomology {
                degree: k,
                betti: weights.len(),
                w_min: weights.first().cloned(),
                w_max: weights.last().cloned(),
                weights,
            }
        })
        .collect();
    let gaps = (1..=n)
        .map(|k| {
            let (prev, cur) = (&degrees[k - 1], &degrees[k]);
            let delta_n_max = match (&cur.w_max, &prev.w_min) {
                (Some(a), Some(b)) => Some(a - b),
                _ => None,
            };
            let delta_n_min = match (&cur.w_min, &prev.w_max) {
                (Some(a), Some(b)) => Some(std::cmp::max(Rational::one(), a - b)),
                _ => None,
            };
            WeightGap {
                degree: k,
                delta_n_max,
                delta_n_min,
            }
        })
        .collect();
    CohomologyTable {
        algebra: complex.algebra().name().to_string(),
        dimension: n,
        is_carnot: complex.grading().is_carnot(),
        homogeneous_dim: complex.grading().homogeneous_dim().clone(),
        degrees,
        gaps,
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CheckReport {
    pub violations: Vec<String>,
}

impl CheckReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "ok");
        }
        write!(f, "{}", self.violations.join("; "))
    }
}

/// Poincaré duality `b_k = b_{n−k}` and weight duality
/// `W(H^{n−k}) = {Q − w : w ∈ W(H^k)}`.
pub fn check_duality(table: &CohomologyTable) -> CheckReport {
    let n = table.dimension;
    let q = &table.homogeneous_dim;
    let mut violations = Vec::new();
    for k in 0..=n {
        if table.betti(k) != table.betti(n - k) {
            violations.push(format!(
                "b_{k} = {} but b_{} = {}",
                table.betti(k),
                n - k,
                table.betti(n - k)
            ));
            continue;
        }
        let mut dual: Vec<Rational> = table.weights(k).iter().map(|w| q - w).collect();
        dual.sort();
        if dual != table.weights(n - k) {
            violations.push(format!(
                "weights of H^{} are not Q minus weights of H^{k}",
                n - k
            ));
        }
    }
    CheckReport { violations }
}

/// `w_max(k) − w_max(k−1) ≥ 1`, `w_min(k) − w_min(k−1) ≥ 1` and
/// `δN_max(k) ≥ δN_min(k) ≥ 1` for `k = 1..n`.
pub fn check_weight_steps(table: &CohomologyTable) -> CheckReport {
    let one = Rational::one();
    let mut violations = Vec::new();
    for k in 1..=table.dimension {
        let steps = [
            ("w_max", table.w_max(k), table.w_max(k - 1)),
            ("w_min", table.w_min(k), table.w_min(k - 1)),
        ];
        for (name, cur, prev) in steps {
            match (cur, prev) {
                (Some(c), Some(p)) if c - p >= one => {}
                (Some(c), Some(p)) => violations.push(format!(
                    "{name}({k}) - {name}({}) = {} < 1",
                    k - 1,
                    Exact(&(c - p))
                )),
                _ => violations.push(format!("{name} undefined around degree {k}")),
            }
        }
        match (table.delta_n_max(k), table.delta_n_min(k)) {
            (Some(hi), Some(lo)) if hi >= lo && *lo >= one => {}
            (Some(hi), Some(lo)) => violations.push(format!(
                "δN_max({k}) = {} and δN_min({k}) = {} out of order",
                Exact(hi),
                Exact(lo)
            )),
            _ => violations.push(format!("δN undefined in degree {k}")),
        }
    }
    CheckReport { violations }
}

/// `b_0 = 1` at weight 0, `b_n = 1` at weight `Q`, Euler characteristic 0.
pub fn check_extremes(table: &CohomologyTable) -> CheckReport {
    let n = table.dimension;
    let mut violations = Vec::new();
    if table.weights(0) != [Rational::zero()] {
        violations.push("H^0 is not one-dimensional of weight 0".into());
    }
    if table.weights(n) != [table.homogeneous_dim.clone()] {
        violations.push(format!("H^{n} is not one-dimensional of weight Q"));
    }
    if n >= 1 && table.euler_characteristic() != 0 {
        violations.push(format!(
            "Euler characteristic is {}",
            table.euler_characteristic()
        ));
    }
    CheckReport { violations }
}

/// Ordered `(k, value)` pairs of a per-degree quantity, as printed in tables.
pub fn row<F>(table: &CohomologyTable, f: F) -> Vec<Option<Rational>>
where
    F: Fn(&CohomologyTable, usize) -> Option<Rational>,
{
    (1..=table.dimension).map(|k| f(table, k)).collect()
}

impl fmt::Display for CohomologyTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cell = |q: Option<&Rational>| match q {
            Some(q) => Exact(q).to_string(),
            None => "undef".to_string(),
        };
        let ks: Vec<usize> = (1..=self.dimension).collect();
        let rows: Vec<(&str, Vec<String>)> = vec![
            ("k", ks.iter().map(|k| k.to_string()).collect()),
            (
                "w_max(k)",
                ks.iter().map(|&k| cell(self.w_max(k))).collect(),
            ),
            (
                "w_min(k)",
                ks.iter().map(|&k| cell(self.w_min(k))).collect(),
            ),
            (
                "dN_max(k)",
                ks.iter().map(|&k| cell(self.delta_n_max(k))).collect(),
            ),
            (
                "dN_min(k)",
                ks.iter().map(|&k| cell(self.delta_n_min(k))).collect(),
            ),
        ];
        let width = rows
            .iter()
            .flat_map(|(_, cells)| cells.iter().map(String::len))
            .max()
            .unwrap_or(1);
        for (i, (name, cells)) in rows.iter().enumerate() {
            let cells: Vec<String> = cells.iter().map(|c| format!("{c:>width$}")).collect();
            writeln!(f, "{name:<10}| {} |", cells.join(" | "))?;
            if i == 0 {
                let rule = "-".repeat(12 + cells.len() * (width + 3) - 1);
                writeln!(f, "{rule}")?;
            }
        }
        Ok(())
    }
}

/// Betti numbers and weight multisets, one line per degree.
pub fn spectrum_lines(table: &CohomologyTable) -> Vec<String> {
    table
        .degrees
        .iter()
        .map(|d| {
            let ws: Vec<String> = d.weights.iter().map(|w| Exact(w).to_string()).collect();
            format!(
                "H^{}: b = {}, weights {{{}}}",
                d.degree,
                d.betti,
                ws.join(", ")
            )
        })
        .collect()
}

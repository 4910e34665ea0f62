//! Exponent ranges read off a cohomology table: the vanishing threshold
//! `δN_max(k)/Q`, the non-vanishing thresholds `δN_min(k)/Q` and
//! `max{1, w_min(k) − w_max(k−1)}/T`, and the arithmetic criteria used by
//! the homogeneous-form construction.

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::cohomology::CohomologyTable;
use crate::rational::{format_rational, int, parse_rational, Rational};

/// An exponent `p ∈ (0, ∞]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpExponent {
    Finite(Rational),
    Infinity,
}

impl LpExponent {
    pub fn finite(q: Rational) -> Self {
        LpExponent::Finite(q)
    }

    /// `1/p`, with `1/∞ = 0`.
    pub fn reciprocal(&self) -> Rational {
        match self {
            LpExponent::Finite(p) => p.recip(),
            LpExponent::Infinity => Rational::zero(),
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, LpExponent::Finite(_))
    }

    /// `1 < p < ∞`.
    pub fn in_open_range(&self) -> bool {
        matches!(self, LpExponent::Finite(p) if *p > Rational::one())
    }

    /// `1 ≤ p ≤ ∞`.
    pub fn in_closed_range(&self) -> bool {
        match self {
            LpExponent::Finite(p) => *p >= Rational::one(),
            LpExponent::Infinity => true,
        }
    }

    /// `1 ≤ p < ∞`.
    pub fn in_half_open_range(&self) -> bool {
        self.is_finite() && self.in_closed_range()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExponentParseError {
    #[error("invalid exponent `{0}`: expected a positive rational or `inf`")]
    Invalid(String),
}

impl FromStr for LpExponent {
    type Err = ExponentParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        if matches!(t, "inf" | "infinity" | "∞" | "+inf") {
            return Ok(LpExponent::Infinity);
        }
        match parse_rational(t) {
            Ok(p) if p > Rational::zero() => Ok(LpExponent::Finite(p)),
            _ => Err(ExponentParseError::Invalid(s.to_string())),
        }
    }
}

impl fmt::Display for LpExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LpExponent::Finite(p) => f.write_str(&format_rational(p)),
            LpExponent::Infinity => f.write_str("inf"),
        }
    }
}

impl Serialize for LpExponent {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RangeQuery {
    pub degree: usize,
    pub p: LpExponent,
    pub q: LpExponent,
}

impl RangeQuery {
    pub fn new(degree: usize, p: LpExponent, q: LpExponent) -> Self {
        RangeQuery { degree, p, q }
    }

    /// `1/p − 1/q`.
    pub fn gap(&self) -> Rational {
        self.p.reciprocal() - self.q.reciprocal()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RangeError {
    #[error("exponents must satisfy p, q >= 1 (got p = {p}, q = {q})")]
    InvalidExponents { p: String, q: String },
    #[error("the classification needs a Carnot grading")]
    NotCarnot,
    #[error("degree {degree} outside 1..={dim}")]
    DegreeOutOfRange { degree: usize, dim: usize },
    #[error("weights undefined in degree {0}")]
    Undefined(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "result")]
pub enum Classification {
    Vanishes {
        #[serde(with = "crate::rational::as_string")]
        gap: Rational,
        #[serde(with = "crate::rational::as_string")]
        threshold: Rational,
    },
    DoesNotVanish {
        #[serde(with = "crate::rational::as_string")]
        gap: Rational,
        #[serde(with = "crate::rational::as_string")]
        threshold: Rational,
    },
    /// Neither branch applies; `interval` is `[non-vanishing, vanishing)`.
    Unknown {
        #[serde(with = "crate::rational::as_string")]
        gap: Rational,
        #[serde(with = "crate::rational::as_string::vec")]
        interval: Vec<Rational>,
        note: String,
    },
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Classification::Vanishes { gap, threshold } => write!(
                f,
                "Vanishes (gap {} ≥ {})",
                format_rational(gap),
                format_rational(threshold)
            ),
            Classification::DoesNotVanish { gap, threshold } => write!(
                f,
                "DoesNotVanish (gap {} < {})",
                format_rational(gap),
                format_rational(threshold)
            ),
            Classification::Unknown { gap, note, .. } => {
                write!(f, "Unknown (gap {}: {note})", format_rational(gap))
            }
        }
    }
}

fn check_degree(table: &CohomologyTable, k: usize) -> Result<(), RangeError> {
    if k == 0 || k > table.dimension {
        return Err(RangeError::DegreeOutOfRange {
            degree: k,
            dim: table.dimension,
        });
    }
    Ok(())
}

fn carnot_thresholds(
    table: &CohomologyTable,
    k: usize,
) -> Result<(Rational, Rational), RangeError> {
    check_degree(table, k)?;
    if !table.is_carnot {
        return Err(RangeError::NotCarnot);
    }
    let q = &table.homogeneous_dim;
    let dmax = table.delta_n_max(k).ok_or(RangeError::Undefined(k))?;
    let dmin = table.delta_n_min(k).ok_or(RangeError::Undefined(k))?;
    Ok((dmin / q, dmax / q))
}

/// Classifies a query against a Carnot table.
///
/// Vanishing needs `1 < p, q < ∞` and `1/p − 1/q ≥ δN_max(k)/Q`;
/// non-vanishing needs `1 ≤ p, q ≤ ∞` and `1/p − 1/q < δN_min(k)/Q`.
pub fn classify(table: &CohomologyTable, query: &RangeQuery) -> Result<Classification, RangeError> {
    let (low, high) = carnot_thresholds(table, query.degree)?;
    if !query.p.in_closed_range() || !query.q.in_closed_range() {
        return Err(RangeError::InvalidExponents {
            p: query.p.to_string(),
            q: query.q.to_string(),
        });
    }
    let gap = query.gap();
    let open = query.p.in_open_range() && query.q.in_open_range();
    if open && gap >= high {
        return Ok(Classification::Vanishes {
            gap,
            threshold: high,
        });
    }
    if gap < low {
        return Ok(Classification::DoesNotVanish {
            gap,
            threshold: low,
        });
    }
    let (l, h) = (format_rational(&low), format_rational(&high));
    let note = if gap < high {
        format!("in [{l}, {h}), not covered by either threshold")
    } else {
        format!("≥ {h} but vanishing needs 1 < p, q < ∞")
    };
    Ok(Classification::Unknown {
        gap,
        interval: vec![low, high],
        note,
    })
}

/// `max{1, w_min(k) − w_max(k−1)}`.
pub fn ws_lower_bound(table: &CohomologyTable, k: usize) -> Result<Rational, RangeError> {
    check_degree(table, k)?;
    let w_min = table.w_min(k).ok_or(RangeError::Undefined(k))?;
    let w_max = table.w_max(k - 1).ok_or(RangeError::Undefined(k - 1))?;
    Ok(std::cmp::max(int(1), w_min - w_max))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BestBound {
    pub grading: String,
    #[serde(with = "crate::rational::as_string")]
    pub threshold: Rational,
}

/// Largest `ws_lower_bound(k)/T` over the given gradings of one algebra;
/// the first grading wins ties. Tables with undefined weights are skipped.
pub fn best_nonvanishing<'a, I>(tables: I, k: usize) -> Option<BestBound>
where
    I: IntoIterator<Item = (&'a str, &'a CohomologyTable)>,
{
    let mut best: Option<BestBound> = None;
    for (name, table) in tables {
        let Ok(ws) = ws_lower_bound(table, k) else {
            continue;
        };
        let threshold = ws / &table.homogeneous_dim;
        if best.as_ref().is_none_or(|b| threshold > b.threshold) {
            best = Some(BestBound {
                grading: name.to_string(),
                threshold,
            });
        }
    }
    best
}

/// Sufficient condition `λ − w + T/p < 0` for a homogeneous form of
/// degree `λ` and weight `w` to be `L^p` away from the origin.
pub fn lp_membership(lambda: &Rational, w: &Rational, t: &Rational, p: &LpExponent) -> bool {
    lambda - w + t * p.reciprocal() < Rational::zero()
}

/// `(w + w′ − T)/T`.
pub fn pairing_gap_bound(w: &Rational, w_prime: &Rational, t: &Rational) -> Rational {
    (w + w_prime - t) / t
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DegreeRange {
    pub degree: usize,
    /// `δN_max(k)/Q`; Carnot tables only.
    #[serde(with = "crate::rational::as_string::option")]
    pub vanishing: Option<Rational>,
    /// `δN_min(k)/Q`; Carnot tables only.
    #[serde(with = "crate::rational::as_string::option")]
    pub nonvanishing: Option<Rational>,
    /// `max{1, w_min(k) − w_max(k−1)}/T`.
    #[serde(with = "crate::rational::as_string::option")]
    pub ws_bound: Option<Rational>,
}

impl DegreeRange {
    /// Gap values covered by neither threshold, as `[low, high)`.
    pub fn unknown_interval(&self) -> Option<(Rational, Rational)> {
        let low = self.best_nonvanishing()?;
        let high = self.vanishing.clone()?;
        (low < high).then_some((low, high))
    }

    fn best_nonvanishing(&self) -> Option<Rational> {
        match (&self.nonvanishing, &self.ws_bound) {
            (Some(a), Some(b)) => Some(std::cmp::max(a, b).clone()),
            (a, b) => a.clone().or_else(|| b.clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RangeReport {
    pub algebra: String,
    pub is_carnot: bool,
    #[serde(with = "crate::rational::as_string")]
    pub homogeneous_dim: Rational,
    pub degrees: Vec<DegreeRange>,
}

pub fn range_report(table: &CohomologyTable) -> RangeReport {
    let degrees = (1..=table.dimension)
        .map(|k| {
            let carnot = carnot_thresholds(table, k).ok();
            DegreeRange {
                degree: k,
                vanishing: carnot.as_ref().map(|(_, h)| h.clone()),
                nonvanishing: carnot.map(|(l, _)| l),
                ws_bound: ws_lower_bound(table, k)
                    .ok()
                    .map(|ws| ws / &table.homogeneous_dim),
            }
        })
        .collect();
    RangeReport {
        algebra: table.algebra.clone(),
        is_carnot: table.is_carnot,
        homogeneous_dim: table.homogeneous_dim.clone(),
        degrees,
    }
}

impl fmt::Display for RangeReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let opt = |q: &Option<Rational>| q.as_ref().map_or("-".to_string(), format_rational);
        writeln!(
            f,
            "{} ({}, homogeneous dimension {})",
            self.algebra,
            if self.is_carnot {
                "Carnot"
            } else {
                "non-Carnot"
            },
            format_rational(&self.homogeneous_dim)
        )?;
        writeln!(
            f,
            "k | vanishes if gap >= (1<p,q<inf) | nonzero if gap < (1<=p,q<=inf) | nonzero if gap < (1<=p,q<inf) | unknown"
        )?;
        for d in &self.degrees {
            let unknown = d.unknown_interval().map_or("-".to_string(), |(l, h)| {
                format!("[{}, {})", format_rational(&l), format_rational(&h))
            });
            writeln!(
                f,
                "{} | {} | {} | {} | {}",
                d.degree,
                opt(&d.vanishing),
                opt(&d.nonvanishing),
                opt(&d.ws_bound),
                unknown
            )?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{carnot_grading, derivation_grading};
    use crate::cohomology::cohomology;
    use crate::corpus;
    use crate::rational::ratio;
    use proptest::prelude::*;

    fn engel_tables() -> (CohomologyTable, CohomologyTable) {
        let e = corpus::engel();
        let carnot = cohomology(&e, &carnot_grading(&e, &[0, 1]).unwrap());
        let expanding = cohomology(
            &e,
            &derivation_grading(&e, vec![int(1), int(2), int(3), int(4)]).unwrap(),
        );
        (carnot, expanding)
    }

    fn fin(n: i64, d: i64) -> LpExponent {
        LpExponent::Finite(ratio(n, d))
    }

    #[test]
    fn engel_degree_two_endpoints() {
        let (t, _) = engel_tables();
        let c = classify(&t, &RangeQuery::new(2, fin(2, 1), fin(14, 1))).unwrap();
        assert_eq!(
            c,
            Classification::Vanishes {
                gap: ratio(3, 7),
                threshold: ratio(3, 7)
            }
        );
        assert_eq!(c.to_string(), "Vanishes (gap 3/7 ≥ 3/7)");
        let c = classify(&t, &RangeQuery::new(2, fin(2, 1), fin(3, 1))).unwrap();
        assert_eq!(
            c,
            Classification::DoesNotVanish {
                gap: ratio(1, 6),
                threshold: ratio(2, 7)
            }
        );
        // gap 1/3: p = 3/2, q = 3
        let c = classify(&t, &RangeQuery::new(2, fin(3, 2), fin(3, 1))).unwrap();
        assert!(
            matches!(c, Classification::Unknown { ref interval, .. } if *interval == vec![ratio(2, 7), ratio(3, 7)])
        );
        // exactly 2/7 is not strictly below the threshold
        let c = classify(&t, &RangeQuery::new(2, fin(7, 3), fin(7, 1))).unwrap();
        assert!(matches!(c, Classification::Unknown { .. }));
    }

    #[test]
    fn side_conditions() {
        let (t, _) = engel_tables();
        // p = 1, q = ∞: gap 1 ≥ 3/7, but vanishing needs the open range
        let c = classify(&t, &RangeQuery::new(2, fin(1, 1), LpExponent::Infinity)).unwrap();
        assert!(matches!(c, Classification::Unknown { .. }), "{c}");
        // p = q = ∞: gap 0 < 2/7, closed range allows ∞
        let c = classify(
            &t,
            &RangeQuery::new(2, LpExponent::Infinity, LpExponent::Infinity),
        )
        .unwrap();
        assert!(matches!(c, Classification::DoesNotVanish { .. }));
        // p > q is read by the non-vanishing branch
        let c = classify(&t, &RangeQuery::new(2, fin(4, 1), fin(2, 1))).unwrap();
        assert!(matches!(c, Classification::DoesNotVanish { .. }));
        assert!(matches!(
            classify(&t, &RangeQuery::new(2, fin(1, 2), fin(2, 1))),
            Err(RangeError::InvalidExponents { .. })
        ));
        assert!(matches!(
            classify(&t, &RangeQuery::new(5, fin(2, 1), fin(2, 1))),
            Err(RangeError::DegreeOutOfRange { .. })
        ));
    }

    #[test]
    fn non_carnot_table_is_rejected() {
        let (_, t) = engel_tables();
        assert_eq!(
            classify(&t, &RangeQuery::new(2, fin(2, 1), fin(3, 1))),
            Err(RangeError::NotCarnot)
        );
    }

    #[test]
    fn ws_bounds() {
        let (c, x) = engel_tables();
        assert_eq!(ws_lower_bound(&x, 2).unwrap(), int(3));
        assert_eq!(ws_lower_bound(&c, 1).unwrap(), int(1));
        assert_eq!(ws_lower_bound(&c, 4).unwrap(), int(1));
        for n in 1..=6 {
            let a = corpus::abelian(n);
            let t = cohomology(
                &a,
                &carnot_grading(&a, &(0..n).collect::<Vec<_>>()).unwrap(),
            );
            for k in 1..=n {
                assert_eq!(ws_lower_bound(&t, k).unwrap(), int(1));
            }
        }
    }

    #[test]
    fn best_over_both_engel_gradings() {
        let (c, x) = engel_tables();
        let best = best_nonvanishing([("carnot", &c), ("expanding", &x)], 2).unwrap();
        assert_eq!(
            best,
            BestBound {
                grading: "expanding".into(),
                threshold: ratio(3, 10)
            }
        );
        let only = best_nonvanishing([("carnot", &c)], 2).unwrap();
        assert_eq!(only.threshold, ratio(2, 7));
    }

    #[test]
    fn abelian_best_is_one_over_n() {
        for n in 1..=6 {
            let a = corpus::abelian(n);
            let t = cohomology(
                &a,
                &carnot_grading(&a, &(0..n).collect::<Vec<_>>()).unwrap(),
            );
            for k in 1..=n {
                assert_eq!(
                    best_nonvanishing([("carnot", &t)], k).unwrap().threshold,
                    ratio(1, n as i64)
                );
            }
        }
    }

    #[test]
    fn lp_membership_examples() {
        assert!(lp_membership(&int(-3), &int(1), &int(4), &fin(2, 1)));
        assert!(!lp_membership(
            &int(0),
            &int(0),
            &int(4),
            &LpExponent::Infinity
        ));
        // boundary λ = w − T/p
        assert!(!lp_membership(&int(-1), &int(1), &int(4), &fin(2, 1)));
    }

    #[test]
    fn pairing_gap_examples() {
        assert_eq!(pairing_gap_bound(&int(5), &int(8), &int(10)), ratio(3, 10));
        assert_eq!(pairing_gap_bound(&int(4), &int(6), &int(10)), int(0));
        assert_eq!(pairing_gap_bound(&int(3), &int(2), &int(4)), ratio(1, 4));
        // w = w′ = 3, T = 4 reproduces δN_min(2)/Q on h₃
        let h = corpus::heisenberg(1);
        let t = cohomology(&h, &carnot_grading(&h, &[0, 1]).unwrap());
        assert_eq!(*t.delta_n_min(2).unwrap(), int(2));
        assert_eq!(
            pairing_gap_bound(&int(3), &int(3), &int(4)),
            t.delta_n_min(2).unwrap() / int(4)
        );
    }

    #[test]
    fn report_layout_and_invariants() {
        let (c, x) = engel_tables();
        let r = range_report(&c);
        let d2 = &r.degrees[1];
        assert_eq!(d2.vanishing, Some(ratio(3, 7)));
        assert_eq!(d2.nonvanishing, Some(ratio(2, 7)));
        assert_eq!(d2.unknown_interval(), Some((ratio(2, 7), ratio(3, 7))));
        let r = range_report(&x);
        assert_eq!(r.degrees[1].vanishing, None);
        assert_eq!(r.degrees[1].ws_bound, Some(ratio(3, 10)));
        for (_, alg, layer1) in corpus::carnot_corpus() {
            let t = cohomology(&alg, &carnot_grading(&alg, &layer1).unwrap());
            for d in range_report(&t).degrees {
                assert!(d.nonvanishing <= d.vanishing);
                assert_eq!(d.nonvanishing, d.ws_bound);
            }
        }
    }

    #[test]
    fn exponent_parsing() {
        assert_eq!("inf".parse::<LpExponent>().unwrap(), LpExponent::Infinity);
        assert_eq!("7/2".parse::<LpExponent>().unwrap(), fin(7, 2));
        assert!("0".parse::<LpExponent>().is_err());
        assert!("x".parse::<LpExponent>().is_err());
    }

    fn carnot_tables() -> &'static [CohomologyTable] {
        static TABLES: std::sync::OnceLock<Vec<CohomologyTable>> = std::sync::OnceLock::new();
        TABLES.get_or_init(|| {
            corpus::carnot_corpus()
                .into_iter()
                .map(|(_, a, l)| cohomology(&a, &carnot_grading(&a, &l).unwrap()))
                .collect()
        })
    }

    proptest! {
        #[test]
        fn vanishing_is_monotone_in_q(
            which in 0usize..11,
            k_seed in 0usize..16,
            p in (1i64..40, 1i64..20),
            q in (1i64..80, 1i64..20),
            extra in (0i64..50, 1i64..10),
        ) {
            let tables = carnot_tables();
            let t = &tables[which % tables.len()];
            let k = 1 + k_seed % t.dimension;
            let p = ratio(p.0, p.1);
            let q = ratio(q.0, q.1);
            prop_assume!(p > int(1) && q > int(1));
            let q2 = &q + ratio(extra.0, extra.1);
            let first = classify(t, &RangeQuery::new(k, LpExponent::Finite(p.clone()), LpExponent::Finite(q))).unwrap();
            if matches!(first, Classification::Vanishes { .. }) {
                let second = classify(t, &RangeQuery::new(k, LpExponent::Finite(p), LpExponent::Finite(q2))).unwrap();
                prop_assert!(matches!(second, Classification::Vanishes { .. }), "{}", second);
            }
        }

        #[test]
        fn thresholds_are_ordered(which in 0usize..11) {
            let tables = carnot_tables();
            let t = &tables[which % tables.len()];
            for k in 1..=t.dimension {
                let (low, high) = carnot_thresholds(t, k).unwrap();
                prop_assert!(low <= high);
                prop_assert!(ws_lower_bound(t, k).unwrap() >= int(1));
                prop_assert_eq!(best_nonvanishing([("carnot", t)], k).unwrap().threshold, low);
            }
        }
    }
}

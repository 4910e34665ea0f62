//! The contracted complex: the retraction `r = 1 − d₀⁻¹d − dd₀⁻¹`, its
//! stable limit `Π_E`, and `d_c = Π_{E₀} d Π_E Π_{E₀}` acting on polynomial
//! forms. `d₀⁻¹` and `Π_{E₀}` act coefficientwise.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::One;
use rayon::prelude::*;
use thiserror::Error;

use crate::algebra::{Grading, LieAlgebra};
use crate::forms::{FormMonomial, InvariantForm};
use crate::group::{GroupCalculus, GroupError, PointwiseOperator, PolyForm};
use crate::poly::{monomials_up_to_weight, Poly};
use crate::rational::{ceil_to_int, format_rational, int, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ContractedError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error("retraction did not stabilise within {cap} iterations")]
    NonStabilizing { cap: usize },
    #[error("form is not fixed by Π_E0")]
    NotContracted,
    #[error("degree {degree} outside 1..={dim}")]
    DegreeOutOfRange { degree: usize, dim: usize },
    #[error("no non-closed contracted form P·α with polynomial weight ≤ {cap} in degree {degree}")]
    NotFound { degree: usize, cap: String },
}

/// A polynomial form whose value at every point lies in `E₀`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContractedForm(PolyForm);

impl ContractedForm {
    pub fn new(engine: &ContractedComplex, form: PolyForm) -> Result<Self, ContractedError> {
        if engine.pi_e0(&form) == form {
            Ok(ContractedForm(form))
        } else {
            Err(ContractedError::NotContracted)
        }
    }

    pub fn form(&self) -> &PolyForm {
        &self.0
    }

    pub fn into_form(self) -> PolyForm {
        self.0
    }
}

/// `Π_E ω` together with the number of retractions that changed the form.
#[derive(Debug, Clone)]
pub struct Stabilized {
    pub form: PolyForm,
    pub iterations: usize,
}

#[derive(Debug, Clone)]
pub struct ContractedComplex {
    calc: GroupCalculus,
    d0_inverse: Vec<Option<PointwiseOperator>>,
    pi_e0: Vec<PointwiseOperator>,
    e0: Vec<Vec<InvariantForm>>,
    iteration_cap: usize,
}

impl ContractedComplex {
    pub fn new(alg: &LieAlgebra, grading: &Grading) -> Result<Self, ContractedError> {
        let calc = GroupCalculus::new(alg, grading)?;
        let complex = calc.complex();
        let n = alg.dim();
        let d0_inverse = (0..=n)
            .map(|k| (k >= 1).then(|| PointwiseOperator::from(&complex.d0_pseudoinverse(k))))
            .collect();
        let pi_e0 = (0..=n)
            .map(|k| PointwiseOperator::from(&complex.pi_e0(k)))
            .collect();
        let e0 = (0..=n).map(|k| complex.e0_basis(k)).collect();
        let q = grading.homogeneous_dim();
        let w_min = grading.min_weight();
        let bound = if *w_min >= Rational::one() {
            q.clone()
        } else {
            Rational::from_integer(ceil_to_int(&(q / w_min)))
        };
        let iteration_cap = usize::try_from(ceil_to_int(&bound)).expect("small bound") + 1;
        Ok(ContractedComplex {
            calc,
            d0_inverse,
            pi_e0,
            e0,
            iteration_cap,
        })
    }

    pub fn calculus(&self) -> &GroupCalculus {
        &self.calc
    }

    pub fn grading(&self) -> &Grading {
        self.calc.grading()
    }

    pub fn algebra(&self) -> &LieAlgebra {
        self.calc.algebra()
    }

    pub fn dim(&self) -> usize {
        self.calc.dim()
    }

    pub fn iteration_cap(&self) -> usize {
        self.iteration_cap
    }

    pub fn e0_basis(&self, k: usize) -> &[InvariantForm] {
        &self.e0[k]
    }

    pub fn d(&self, form: &PolyForm) -> PolyForm {
        self.calc.d(form)
    }

    /// Coefficientwise `d₀⁻¹`; zero on functions.
    pub fn d0_inverse(&self, form: &PolyForm) -> PolyForm {
        match self.d0_inverse.get(form.degree()) {
            Some(Some(op)) => form.apply_pointwise(op),
            _ => PolyForm::zero(form.degree().saturating_sub(1)),
        }
    }

    /// Coefficientwise `Π_{E₀}`.
    pub fn pi_e0(&self, form: &PolyForm) -> PolyForm {
        match self.pi_e0.get(form.degree()) {
            Some(op) => form.apply_pointwise(op),
            None => PolyForm::zero(form.degree()),
        }
    }

    /// `r(ω) = ω − d₀⁻¹(dω) − d(d₀⁻¹ω)`.
    pub fn retraction(&self, form: &PolyForm) -> PolyForm {
        let k = form.degree();
        let mut out = form.clone();
        if k < self.dim() {
            out = out.sub(&self.d0_inverse(&self.d(form)));
        }
        if k >= 1 {
            out = out.sub(&self.d(&self.d0_inverse(form)));
        }
        out
    }

    /// Iterates `r` to its fixed point.
    pub fn pi_e(&self, form: &PolyForm) -> Result<Stabilized, ContractedError> {
        let mut current = form.clone();
        for iterations in 0..=self.iteration_cap {
            let next = self.retraction(&current);
            if next == current {
                return Ok(Stabilized {
                    form: current,
                    iterations,
                });
            }
            current = next;
        }
        Err(ContractedError::NonStabilizing {
            cap: self.iteration_cap,
        })
    }

    /// `d_c = Π_{E₀} d Π_E Π_{E₀}`.
    pub fn d_c(&self, form: &ContractedForm) -> Result<ContractedForm, ContractedError> {
        let lifted = self.pi_e(&self.pi_e0(form.form()))?.form;
        Ok(ContractedForm(self.pi_e0(&self.d(&lifted))))
    }

    /// `x^β α` for `α` in the `E₀^k` basis, total weight `≤ cap`, ordered by
    /// total weight, then exponent, then basis position.
    pub fn contracted_generators(
        &self,
        k: usize,
        cap: &Rational,
    ) -> Vec<(Rational, ContractedForm)> {
        let g = self.grading();
        let monos = monomials_up_to_weight(g.weights(), cap, true);
        let mut out = Vec::new();
        for (idx, alpha) in self.e0[k].iter().enumerate() {
            let wa = alpha
                .homogeneous_weight(g)
                .expect("E0 basis is weight-homogeneous");
            for (wb, e) in &monos {
                let total = wb + &wa;
                if total <= *cap {
                    let p = Poly::term(e.clone(), Rational::one());
                    out.push((total, e.clone(), idx, PolyForm::from_invariant(alpha, &p)));
                }
            }
        }
        out.sort_by(|a, b| (&a.0, &a.1, a.2).cmp(&(&b.0, &b.1, b.2)));
        out.into_iter()
            .map(|(w, _, _, f)| (w, ContractedForm(f)))
            .collect()
    }

    /// First `P·α₀` with `d_c(P·α₀) ≠ 0`, `α₀ ∈ E₀^{k−1}`, `0 < w(P) ≤ cap`,
    /// searching by polynomial weight, then exponent vector (ascending
    /// lexicographic), then `E₀` basis.
    pub fn find_nonclosed_witness(
        &self,
        k: usize,
        cap: &Rational,
    ) -> Result<Witness, ContractedError> {
        let n = self.dim();
        if k == 0 || k > n {
            return Err(ContractedError::DegreeOutOfRange { degree: k, dim: n });
        }
        let g = self.grading();
        for (poly_weight, e) in monomials_up_to_weight(g.weights(), cap, false) {
            let p = Poly::term(e, Rational::one());
            for alpha in &self.e0[k - 1] {
                let input = ContractedForm(PolyForm::from_invariant(alpha, &p));
                let output = self.d_c(&input)?.into_form();
                if !output.is_zero() {
                    return Ok(Witness {
                        degree: k,
                        poly: p,
                        poly_weight,
                        alpha: alpha.clone(),
                        output_weights: output.coframe_weights(g),
                        output,
                    });
                }
            }
        }
        Err(ContractedError::NotFound {
            degree: k,
            cap: format_rational(cap),
        })
    }

    /// Checks the projector identities on every `x^β θ_I` of total weight
    /// `≤ cap` (optionally one degree only).
    pub fn sweep_projectors(&self, cap: &Rational, degree: Option<usize>) -> ProjectorReport {
        let gens: Vec<PolyForm> = self
            .degrees(degree)
            .flat_map(|k| self.calc.homogeneous_generators(k, cap))
            .collect();
        let results: Vec<(usize, Vec<Failure>)> =
            gens.par_iter().map(|g| self.check_projectors(g)).collect();
        let mut report = ProjectorReport {
            weight_cap: cap.clone(),
            generators: gens.len(),
            iteration_cap: self.iteration_cap,
            max_iterations: 0,
            failures: Vec::new(),
        };
        for (it, fails) in results {
            report.max_iterations = report.max_iterations.max(it);
            report.failures.extend(fails);
        }
        report
    }

    fn check_projectors(&self, g: &PolyForm) -> (usize, Vec<Failure>) {
        let alg = self.algebra();
        let mut fails = Vec::new();
        let mut fail = |check: Check| {
            fails.push(Failure {
                check,
                form: g.display(alg),
            })
        };
        let lifted = match self.pi_e(g) {
            Ok(s) => s,
            Err(_) => {
                fail(Check::Stabilization);
                return (self.iteration_cap + 1, fails);
            }
        };
        let a = &lifted.form;
        let da = self.d(a);
        if !self.d0_inverse(a).is_zero() {
            fail(Check::InKernelOfD0Inverse);
        }
        if a.degree() < self.dim() && !self.d0_inverse(&da).is_zero() {
            fail(Check::InKernelOfD0InverseD);
        }
        match self.pi_e(a) {
            Ok(s) if s.form == *a => {}
            _ => fail(Check::Idempotence),
        }
        match self.pi_e(&self.d(g)) {
            Ok(s) if s.form == da => {}
            _ => fail(Check::CommutesWithD),
        }
        match self.pi_e(&self.pi_e0(a)) {
            Ok(s) if s.form == *a => {}
            _ => fail(Check::ConjugationE),
        }
        let b = self.pi_e0(g);
        match self.pi_e(&b) {
            Ok(s) if self.pi_e0(&s.form) == b => {}
            _ => fail(Check::ConjugationE0),
        }
        (lifted.iterations, fails)
    }

    /// Checks `d_c² = 0`, `Π_{E₀} d_c = d_c`, the weight increase, and (for
    /// Carnot gradings) that `d_c` on functions is the horizontal
    /// differential, on every contracted generator of weight `≤ cap`.
    pub fn sweep_dc(&self, cap: &Rational, degree: Option<usize>) -> DcReport {
        let gens: Vec<(usize, ContractedForm)> = self
            .degrees(degree)
            .flat_map(|k| {
                self.contracted_generators(k, cap)
                    .into_iter()
                    .map(move |(_, f)| (k, f))
            })
            .collect();
        let results: Vec<(usize, Option<Rational>, Vec<Failure>)> = gens
            .par_iter()
            .map(|(k, f)| {
                let (inc, fails) = self.check_dc(f);
                (*k, inc, fails)
            })
            .collect();
        let mut report = DcReport {
            weight_cap: cap.clone(),
            generators: gens.len(),
            min_weight_increase: BTreeMap::new(),
            failures: Vec::new(),
        };
        for (k, inc, fails) in results {
            if let Some(inc) = inc {
                let slot = report
                    .min_weight_increase
                    .entry(k)
                    .or_insert_with(|| inc.clone());
                if inc < *slot {
                    *slot = inc;
                }
            }
            report.failures.extend(fails);
        }
        report
    }

    fn check_dc(&self, f: &ContractedForm) -> (Option<Rational>, Vec<Failure>) {
        let g = self.grading();
        let alg = self.algebra();
        let mut fails = Vec::new();
        let mut fail = |check: Check| {
            fails.push(Failure {
                check,
                form: f.form().display(alg),
            })
        };
        let Ok(once) = self.d_c(f) else {
            fail(Check::Stabilization);
            return (None, fails);
        };
        match self.d_c(&once) {
            Ok(twice) if twice.form().is_zero() => {}
            Ok(_) => fail(Check::DcSquared),
            Err(_) => fail(Check::Stabilization),
        }
        if self.pi_e0(once.form()) != *once.form() {
            fail(Check::DcContracted);
        }
        if f.form().degree() == 0 && g.is_carnot() {
            let horizontal = self
                .calc
                .weight_split(f.form())
                .ok()
                .and_then(|mut s| s.remove(&int(1)));
            if *once.form() != horizontal.unwrap_or_else(|| PolyForm::zero(1)) {
                fail(Check::DcOnFunctions);
            }
        }
        let increase = once.form().coframe_weights(g).first().map(|w_out| {
            let w_in = &f.form().coframe_weights(g)[0];
            w_out - w_in
        });
        if let Some(inc) = &increase {
            if inc < g.min_weight() {
                fail(Check::WeightIncrease);
            }
        }
        (increase, fails)
    }

    fn degrees(&self, degree: Option<usize>) -> impl Iterator<Item = usize> {
        match degree {
            Some(k) => k..=k,
            None => 0..=self.dim(),
        }
    }
}

/// A contracted form `P·α₀` that is not `d_c`-closed.
#[derive(Debug, Clone)]
pub struct Witness {
    pub degree: usize,
    pub poly: Poly,
    pub poly_weight: Rational,
    pub alpha: InvariantForm,
    pub output: PolyForm,
    pub output_weights: Vec<Rational>,
}

impl Witness {
    pub fn display(&self, alg: &LieAlgebra) -> String {
        let names: Vec<String> = alg.basis().iter().map(|l| l.to_lowercase()).collect();
        let ws: Vec<String> = self.output_weights.iter().map(format_rational).collect();
        format!(
            "degree {}: P = {} (weight {}), alpha = {}\n  d_c(P alpha) = {}\n  output weights: {}",
            self.degree,
            self.poly.display(&names),
            format_rational(&self.poly_weight),
            self.alpha.display(alg),
            self.output.display(alg),
            ws.join(", ")
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Check {
    Stabilization,
    Idempotence,
    InKernelOfD0Inverse,
    InKernelOfD0InverseD,
    CommutesWithD,
    ConjugationE,
    ConjugationE0,
    DcSquared,
    DcContracted,
    DcOnFunctions,
    WeightIncrease,
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Check::Stabilization => "Pi_E stabilises",
            Check::Idempotence => "Pi_E Pi_E = Pi_E",
            Check::InKernelOfD0Inverse => "d0^-1 Pi_E = 0",
            Check::InKernelOfD0InverseD => "d0^-1 d Pi_E = 0",
            Check::CommutesWithD => "d Pi_E = Pi_E d",
            Check::ConjugationE => "Pi_E Pi_E0 Pi_E = Pi_E",
            Check::ConjugationE0 => "Pi_E0 Pi_E Pi_E0 = Pi_E0",
            Check::DcSquared => "d_c d_c = 0",
            Check::DcContracted => "Pi_E0 d_c = d_c",
            Check::DcOnFunctions => "d_c f = horizontal df",
            Check::WeightIncrease => "d_c raises weight",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Failure {
    pub check: Check,
    pub form: String,
}

#[derive(Debug, Clone)]
pub struct ProjectorReport {
    pub weight_cap: Rational,
    pub generators: usize,
    pub iteration_cap: usize,
    pub max_iterations: usize,
    pub failures: Vec<Failure>,
}

impl ProjectorReport {
    pub fn is_clean(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn failures_of(&self, check: Check) -> usize {
        self.failures.iter().filter(|f| f.check == check).count()
    }
}

#[derive(Debug, Clone)]
pub struct DcReport {
    pub weight_cap: Rational,
    pub generators: usize,
    /// Degree → smallest `(output coframe weight) − (input coframe weight)`
    /// over generators with `d_c ≠ 0`.
    pub min_weight_increase: BTreeMap<usize, Rational>,
    pub failures: Vec<Failure>,
}

impl DcReport {
    pub fn is_clean(&self) -> bool {
        self.failures.is_empty()
    }
}

fn summarize(f: &mut fmt::Formatter<'_>, failures: &[Failure]) -> fmt::Result {
    let mut counts: BTreeMap<Check, (usize, &str)> = BTreeMap::new();
    for fail in failures {
        counts.entry(fail.check).or_insert((0, &fail.form)).0 += 1;
    }
    for (check, (count, example)) in counts {
        writeln!(f, "  FAIL {check}: {count} generator(s), e.g. {example}")?;
    }
    Ok(())
}

impl fmt::Display for ProjectorReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "projectors: {} generators up to weight {}, max iterations {} (cap {})",
            self.generators,
            format_rational(&self.weight_cap),
            self.max_iterations,
            self.iteration_cap
        )?;
        summarize(f, &self.failures)
    }
}

impl fmt::Display for DcReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "d_c: {} contracted generators up to weight {}",
            self.generators,
            format_rational(&self.weight_cap)
        )?;
        for (k, inc) in &self.min_weight_increase {
            writeln!(
                f,
                "  degree {k}: min weight increase {}",
                format_rational(inc)
            )?;
        }
        summarize(f, &self.failures)
    }
}

/// Convenience: the monomial form `θ_I` with coefficient `p`.
pub fn poly_term(indices: &[usize], p: Poly) -> PolyForm {
    PolyForm::term(FormMonomial::from_indices(indices), p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{carnot_grading, derivation_grading};
    use crate::corpus;
    use crate::rational::ratio;

    fn engine(alg: &LieAlgebra, layer1: &[usize]) -> ContractedComplex {
        ContractedComplex::new(alg, &carnot_grading(alg, layer1).unwrap()).unwrap()
    }

    #[test]
    fn abelian_retraction_is_identity() {
        let e = engine(&corpus::abelian(3), &[0, 1, 2]);
        for k in 0..=3 {
            for g in e.calculus().homogeneous_generators(k, &int(3)) {
                assert_eq!(e.retraction(&g), g);
                assert_eq!(e.pi_e(&g).unwrap().iterations, 0);
            }
        }
    }

    #[test]
    fn invariant_e0_forms_are_fixed() {
        let e = engine(&corpus::engel(), &[0, 1]);
        for k in 0..=4 {
            for alpha in e.e0_basis(k) {
                let f = PolyForm::from_invariant(alpha, &Poly::one());
                assert_eq!(e.retraction(&f), f);
                let c = ContractedForm::new(&e, f).unwrap();
                assert!(e.d_c(&c).unwrap().form().is_zero());
            }
        }
    }

    #[test]
    fn heisenberg_retracts_exact_two_form() {
        let e = engine(&corpus::heisenberg(1), &[0, 1]);
        let theta_xy = poly_term(&[0, 1], Poly::one());
        assert!(e.pi_e0(&e.retraction(&theta_xy)).is_zero());
    }

    #[test]
    fn heisenberg_pi_e_lands_in_e() {
        let e = engine(&corpus::heisenberg(1), &[0, 1]);
        let omega = poly_term(&[0, 1], Poly::var(0));
        let s = e.pi_e(&omega).unwrap();
        assert!(s.iterations <= e.iteration_cap());
        assert!(e.d0_inverse(&s.form).is_zero());
        assert!(e.d0_inverse(&e.d(&s.form)).is_zero());
    }

    #[test]
    fn dc_on_functions_is_horizontal_differential() {
        let e = engine(&corpus::heisenberg(1), &[0, 1]);
        // f = z: X z = −y/2, Y z = x/2
        let f = ContractedForm::new(&e, PolyForm::function(Poly::var(2))).unwrap();
        let mut expected = poly_term(&[0], Poly::var(1).scale(&ratio(-1, 2)));
        expected.add_term(
            FormMonomial::from_indices(&[1]),
            Poly::var(0).scale(&ratio(1, 2)),
        );
        assert_eq!(e.d_c(&f).unwrap().into_form(), expected);
    }

    #[test]
    fn heisenberg_dc_is_second_order_in_degree_one() {
        let e = engine(&corpus::heisenberg(1), &[0, 1]);
        // y θ_X: first-order in y, so d_c (order 2) kills it
        let f = ContractedForm::new(&e, poly_term(&[0], Poly::var(1))).unwrap();
        assert!(e.d_c(&f).unwrap().form().is_zero());
        // y² θ_X is the first monomial multiple of θ_X with d_c ≠ 0
        let y2 = &Poly::var(1) * &Poly::var(1);
        let f = ContractedForm::new(&e, poly_term(&[0], y2)).unwrap();
        let out = e.d_c(&f).unwrap().into_form();
        assert!(!out.is_zero());
        assert_eq!(out.coframe_weights(e.grading()), vec![int(3)]);
    }

    #[test]
    fn non_contracted_input_is_rejected() {
        let e = engine(&corpus::heisenberg(1), &[0, 1]);
        let theta_z = poly_term(&[2], Poly::one());
        assert_eq!(
            ContractedForm::new(&e, theta_z),
            Err(ContractedError::NotContracted)
        );
    }

    #[test]
    fn heisenberg_projector_sweep() {
        let e = engine(&corpus::heisenberg(1), &[0, 1]);
        let report = e.sweep_projectors(&int(8), None);
        assert!(report.is_clean(), "{report}");
        assert!(report.max_iterations <= e.iteration_cap());
    }

    #[test]
    fn heisenberg_dc_sweep_and_weight_gap() {
        let e = engine(&corpus::heisenberg(1), &[0, 1]);
        let report = e.sweep_dc(&int(8), None);
        assert!(report.is_clean(), "{report}");
        assert_eq!(report.min_weight_increase[&0], int(1));
        assert_eq!(report.min_weight_increase[&1], int(2));
        assert_eq!(report.min_weight_increase[&2], int(1));
    }

    #[test]
    fn heisenberg_witnesses() {
        let e = engine(&corpus::heisenberg(1), &[0, 1]);
        for k in 1..=3 {
            let w = e.find_nonclosed_witness(k, &int(2)).unwrap();
            assert!(w.poly_weight <= int(2));
            assert!(!w.output.is_zero());
        }
        // degree 1: the search starts at weight 1; exponent vectors ascend,
        // so y = (0,1) comes before x = (1)
        let w = e.find_nonclosed_witness(1, &int(3)).unwrap();
        assert_eq!(w.poly, Poly::var(1));
        assert!(matches!(
            e.find_nonclosed_witness(0, &int(3)),
            Err(ContractedError::DegreeOutOfRange { .. })
        ));
    }

    #[test]
    fn witness_search_reports_not_found() {
        let e = engine(&corpus::heisenberg(1), &[0, 1]);
        assert!(matches!(
            e.find_nonclosed_witness(2, &int(1)),
            Err(ContractedError::NotFound { degree: 2, .. })
        ));
    }

    #[test]
    fn engel_witness_degree_two() {
        let e = engine(&corpus::engel(), &[0, 1]);
        let w = e.find_nonclosed_witness(2, &int(3)).unwrap();
        assert!(w.poly_weight <= int(3));
    }

    #[test]
    fn expanding_engel_grading_stabilises() {
        let alg = corpus::engel();
        let g = derivation_grading(&alg, vec![int(1), int(2), int(3), int(4)]).unwrap();
        let e = ContractedComplex::new(&alg, &g).unwrap();
        let report = e.sweep_projectors(&int(6), None);
        assert!(report.is_clean(), "{report}");
    }
}

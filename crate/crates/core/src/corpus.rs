//! Built-in algebras: abelian ℝⁿ, Heisenberg, Engel and the free nilpotent
//! algebras of rank 2 and step 2 or 3.

use crate::algebra::LieAlgebra;
use crate::rational::int;
use crate::spec_format::{AlgebraSpec, GradingSpec};

pub fn abelian(n: usize) -> LieAlgebra {
    let labels: Vec<String> = (1..=n).map(|i| format!("X{i}")).collect();
    LieAlgebra::new(format!("abelian{n}"), labels, Vec::new()).expect("abelian algebra")
}

/// Heisenberg algebra of dimension `2m + 1`: `[X_i, Y_i] = Z`.
pub fn heisenberg(m: usize) -> LieAlgebra {
    let n = 2 * m + 1;
    let labels: Vec<String> = if m == 1 {
        vec!["X".into(), "Y".into(), "Z".into()]
    } else {
        (1..=m)
            .flat_map(|i| [format!("X{i}"), format!("Y{i}")])
            .chain(std::iter::once("Z".to_string()))
            .collect()
    };
    let brackets = (0..m).map(|i| (2 * i, 2 * i + 1, vec![(n - 1, int(1))]));
    LieAlgebra::new(format!("heisenberg{n}"), labels, brackets).expect("heisenberg algebra")
}

/// `[X,Y] = Z`, `[X,Z] = T`.
pub fn engel() -> LieAlgebra {
    LieAlgebra::from_labels(
        "engel",
        &["X", "Y", "Z", "T"],
        &[("X", "Y", &[("Z", 1)]), ("X", "Z", &[("T", 1)])],
    )
    .expect("engel algebra")
}

/// Free nilpotent algebra of rank 2 and step 2 (isomorphic to h₃).
pub fn free_nilpotent_2_2() -> LieAlgebra {
    LieAlgebra::from_labels("free2_2", &["X", "Y", "Z"], &[("X", "Y", &[("Z", 1)])])
        .expect("free nilpotent algebra")
}

/// Free nilpotent algebra of rank 2 and step 3, Hall basis
/// `X, Y, [X,Y], [X,[X,Y]], [Y,[X,Y]]`.
pub fn free_nilpotent_2_3() -> LieAlgebra {
    LieAlgebra::from_labels(
        "free2_3",
        &["X", "Y", "Z", "U", "V"],
        &[
            ("X", "Y", &[("Z", 1)]),
            ("X", "Z", &[("U", 1)]),
            ("Y", "Z", &[("V", 1)]),
        ],
    )
    .expect("free nilpotent algebra")
}

fn carnot_spec(alg: LieAlgebra, layer1: &[&str]) -> AlgebraSpec {
    let layer1 = layer1
        .iter()
        .map(|l| alg.index_of(l).expect("layer label"))
        .collect();
    AlgebraSpec {
        algebra: alg,
        gradings: vec![("carnot".into(), GradingSpec::Layer1(layer1))],
    }
}

/// Every built-in algebra with its named gradings, in listing order.
pub fn specs() -> Vec<AlgebraSpec> {
    let mut out: Vec<AlgebraSpec> = (1..=6)
        .map(|n| {
            let alg = abelian(n);
            let layer1 = (0..n).collect();
            AlgebraSpec {
                algebra: alg,
                gradings: vec![("carnot".into(), GradingSpec::Layer1(layer1))],
            }
        })
        .collect();
    out.push(carnot_spec(heisenberg(1), &["X", "Y"]));
    out.push(carnot_spec(heisenberg(2), &["X1", "Y1", "X2", "Y2"]));
    let mut e = carnot_spec(engel(), &["X", "Y"]);
    e.gradings.push((
        "expanding".into(),
        GradingSpec::Weights(vec![int(1), int(2), int(3), int(4)]),
    ));
    out.push(e);
    out.push(carnot_spec(free_nilpotent_2_2(), &["X", "Y"]));
    out.push(carnot_spec(free_nilpotent_2_3(), &["X", "Y"]));
    out
}

/// Looks up a built-in algebra by name (`engel`, `heisenberg3`, `abelian4`, …).
pub fn lookup(name: &str) -> Option<AlgebraSpec> {
    specs().into_iter().find(|s| s.algebra.name() == name)
}

/// `(name, algebra, first layer)` for every built-in Carnot algebra.
pub fn carnot_corpus() -> Vec<(String, LieAlgebra, Vec<usize>)> {
    specs()
        .into_iter()
        .map(|s| {
            let layer1 = match &s.gradings[0].1 {
                GradingSpec::Layer1(l) => l.clone(),
                GradingSpec::Weights(_) => unreachable!("first corpus grading is Carnot"),
            };
            (s.algebra.name().to_string(), s.algebra, layer1)
        })
        .collect()
}

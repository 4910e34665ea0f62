//! Line-oriented text format for algebras and their gradings.
//!
//! ```text
//! spec     := line*
//! line     := ws* (directive)? ws* ("#" comment)? "\n"
//! directive:= "name" ident
//!           | "basis" label+
//!           | "bracket" label label ":" term+
//!           | "grading" ident "layer1" label+
//!           | "grading" ident "weights" term+
//! term     := label "=" rational
//! rational := "-"? digits ("/" digits)?
//! ```
//!
//! `name` and `basis` must appear once, before any bracket or grading.
//! A bracket `A B : C=1 D=-1/2` sets `[A, B] = C − ½D`; omitted brackets
//! are zero. A `weights` grading must give every basis label a weight.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use thiserror::Error;

use crate::algebra::{carnot_grading, derivation_grading, Grading, GradingError, LieAlgebra};
use crate::rational::{format_rational, is_positive, parse_rational, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpecError {
    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{0}")]
    Semantic(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GradingSpec {
    /// Carnot grading generated by these basis indices.
    Layer1(Vec<usize>),
    /// Derivation grading with one weight per basis vector.
    Weights(Vec<Rational>),
}

#[derive(Debug, Clone)]
pub struct AlgebraSpec {
    pub algebra: LieAlgebra,
    pub gradings: Vec<(String, GradingSpec)>,
}

impl AlgebraSpec {
    pub fn grading_names(&self) -> Vec<&str> {
        self.gradings.iter().map(|(n, _)| n.as_str()).collect()
    }

    pub fn grading_spec(&self, name: &str) -> Option<&GradingSpec> {
        self.gradings
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, g)| g)
    }

    /// Builds and checks the named grading.
    pub fn grading(&self, name: &str) -> Result<Grading, SpecGradingError> {
        match self.grading_spec(name) {
            None => Err(SpecGradingError::Unknown {
                name: name.to_string(),
                available: self.grading_names().join(", "),
            }),
            Some(GradingSpec::Layer1(l)) => Ok(carnot_grading(&self.algebra, l)?),
            Some(GradingSpec::Weights(w)) => Ok(derivation_grading(&self.algebra, w.clone())?),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpecGradingError {
    #[error("no grading named `{name}` (available: {available})")]
    Unknown { name: String, available: String },
    #[error(transparent)]
    Invalid(#[from] GradingError),
}

struct Token<'a> {
    text: &'a str,
    column: usize,
}

fn tokenize(line: &str) -> Vec<Token<'_>> {
    let content = match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    };
    let mut out = Vec::new();
    let mut start: Option<usize> = None;
    for (i, ch) in content.char_indices() {
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                out.push(Token {
                    text: &content[s..i],
                    column: content[..s].chars().count() + 1,
                });
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push(Token {
            text: &content[s..],
            column: content[..s].chars().count() + 1,
        });
    }
    out
}

fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

struct Parser {
    line: usize,
}

impl Parser {
    fn err(&self, column: usize, message: impl Into<String>) -> SpecError {
        SpecError::Parse {
            line: self.line,
            column,
            message: message.into(),
        }
    }

    fn ident<'a>(
        &self,
        tok: Option<&Token<'a>>,
        what: &str,
        eol: usize,
    ) -> Result<&'a str, SpecError> {
        match tok {
            None => Err(self.err(eol, format!("expected {what}"))),
            Some(t) if is_ident(t.text) => Ok(t.text),
            Some(t) => Err(self.err(t.column, format!("invalid {what} `{}`", t.text))),
        }
    }

    fn term<'a>(&self, tok: &Token<'a>) -> Result<(&'a str, Rational, usize), SpecError> {
        let Some((label, value)) = tok.text.split_once('=') else {
            return Err(self.err(
                tok.column,
                format!("expected label=value, found `{}`", tok.text),
            ));
        };
        if !is_ident(label) {
            return Err(self.err(tok.column, format!("invalid label `{label}`")));
        }
        let value_col = tok.column + label.chars().count() + 1;
        let q =
            parse_rational(value).map_err(|e| self.err(value_col, format!("{e}: `{value}`")))?;
        Ok((label, q, tok.column))
    }
}

type RawBracket = (String, String, Vec<(String, Rational)>);

/// Parses spec text into an algebra and its named gradings.
pub fn parse_spec(text: &str) -> Result<AlgebraSpec, SpecError> {
    let mut name: Option<String> = None;
    let mut basis: Option<Vec<String>> = None;
    let mut brackets: Vec<RawBracket> = Vec::new();
    let mut gradings: Vec<(String, GradingSpec)> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let p = Parser { line: idx + 1 };
        let toks = tokenize(raw);
        let Some(head) = toks.first() else { continue };
        let eol = raw.chars().count() + 1;
        match head.text {
            "name" => {
                if name.is_some() {
                    return Err(p.err(head.column, "duplicate `name`"));
                }
                name = Some(p.ident(toks.get(1), "algebra name", eol)?.to_string());
                if let Some(t) = toks.get(2) {
                    return Err(p.err(t.column, "unexpected token after name"));
                }
            }
            "basis" => {
                if basis.is_some() {
                    return Err(p.err(head.column, "duplicate `basis`"));
                }
                let mut labels = Vec::new();
                let mut seen = BTreeSet::new();
                for t in &toks[1..] {
                    let l = p.ident(Some(t), "basis label", eol)?;
                    if !seen.insert(l) {
                        return Err(SpecError::Semantic(format!("duplicate basis label `{l}`")));
                    }
                    labels.push(l.to_string());
                }
                if labels.is_empty() {
                    return Err(p.err(eol, "expected at least one basis label"));
                }
                basis = Some(labels);
            }
            "bracket" => {
                let Some(labels) = &basis else {
                    return Err(p.err(head.column, "`bracket` before `basis`"));
                };
                let a = p.ident(toks.get(1), "label", eol)?;
                let b = p.ident(toks.get(2), "label", eol)?;
                match toks.get(3) {
                    Some(t) if t.text == ":" => {}
                    Some(t) => {
                        return Err(p.err(t.column, format!("expected `:`, found `{}`", t.text)))
                    }
                    None => return Err(p.err(eol, "expected `:`")),
                }
                let mut terms = Vec::new();
                for t in &toks[4..] {
                    let (l, q, _) = p.term(t)?;
                    terms.push((l.to_string(), q));
                }
                if terms.is_empty() {
                    return Err(p.err(eol, "expected at least one term after `:`"));
                }
                for l in [a, b]
                    .into_iter()
                    .chain(terms.iter().map(|(l, _)| l.as_str()))
                {
                    if !labels.iter().any(|x| x == l) {
                        return Err(SpecError::Semantic(format!(
                            "unknown label `{l}` in bracket [{a}, {b}]"
                        )));
                    }
                }
                brackets.push((a.to_string(), b.to_string(), terms));
            }
            "grading" => {
                let Some(labels) = &basis else {
                    return Err(p.err(head.column, "`grading` before `basis`"));
                };
                let gname = p.ident(toks.get(1), "grading name", eol)?;
                if gradings.iter().any(|(n, _)| n == gname) {
                    return Err(SpecError::Semantic(format!("duplicate grading `{gname}`")));
                }
                let kind = toks
                    .get(2)
                    .ok_or_else(|| p.err(eol, "expected `layer1` or `weights`"))?;
                let index = |l: &str| {
                    labels.iter().position(|x| x == l).ok_or_else(|| {
                        SpecError::Semantic(format!("unknown label `{l}` in grading `{gname}`"))
                    })
                };
                let spec = match kind.text {
                    "layer1" => {
                        let mut layer = Vec::new();
                        for t in &toks[3..] {
                            let i = index(p.ident(Some(t), "label", eol)?)?;
                            if layer.contains(&i) {
                                return Err(SpecError::Semantic(format!(
                                    "label `{}` repeated in grading `{gname}`",
                                    t.text
                                )));
                            }
                            layer.push(i);
                        }
                        if layer.is_empty() {
                            return Err(p.err(eol, "expected at least one label"));
                        }
                        GradingSpec::Layer1(layer)
                    }
                    "weights" => {
                        let mut weights: Vec<Option<Rational>> = vec![None; labels.len()];
                        for t in &toks[3..] {
                            let (l, q, _) = p.term(t)?;
                            let i = index(l)?;
                            if !is_positive(&q) {
                                return Err(SpecError::Semantic(format!(
                                    "non-positive weight {} for `{l}` in grading `{gname}`",
                                    format_rational(&q)
                                )));
                            }
                            if weights[i].replace(q).is_some() {
                                return Err(SpecError::Semantic(format!(
                                    "label `{l}` repeated in grading `{gname}`"
                                )));
                            }
                        }
                        let missing: Vec<&str> = labels
                            .iter()
                            .zip(&weights)
                            .filter(|(_, w)| w.is_none())
                            .map(|(l, _)| l.as_str())
                            .collect();
                        if !missing.is_empty() {
                            return Err(SpecError::Semantic(format!(
                                "grading `{gname}` has no weight for {}",
                                missing.join(", ")
                            )));
                        }
                        GradingSpec::Weights(weights.into_iter().map(Option::unwrap).collect())
                    }
                    other => {
                        return Err(p.err(
                            kind.column,
                            format!("expected `layer1` or `weights`, found `{other}`"),
                        ))
                    }
                };
                gradings.push((gname.to_string(), spec));
            }
            other => return Err(p.err(head.column, format!("unknown directive `{other}`"))),
        }
    }

    let name = name.ok_or_else(|| SpecError::Semantic("missing `name`".into()))?;
    let basis = basis.ok_or_else(|| SpecError::Semantic("missing `basis`".into()))?;
    let idx = |l: &str| basis.iter().position(|x| x == l).expect("labels checked");
    let triples: Vec<(usize, usize, Vec<(usize, Rational)>)> = brackets
        .iter()
        .map(|(a, b, terms)| {
            (
                idx(a),
                idx(b),
                terms.iter().map(|(l, q)| (idx(l), q.clone())).collect(),
            )
        })
        .collect();
    let algebra = LieAlgebra::new(name, basis.clone(), triples)
        .map_err(|e| SpecError::Semantic(e.to_string()))?;
    Ok(AlgebraSpec { algebra, gradings })
}

/// Canonical text: brackets ordered by basis index with a positive leading
/// pair, zero coefficients dropped, gradings in declaration order.
pub fn serialize(spec: &AlgebraSpec) -> String {
    let alg = &spec.algebra;
    let mut out = String::new();
    writeln!(out, "name {}", alg.name()).unwrap();
    writeln!(out, "basis {}", alg.basis().join(" ")).unwrap();
    for ((i, j), v) in alg.brackets() {
        let terms: Vec<String> = v
            .iter()
            .map(|(k, c)| format!("{}={}", alg.label(*k), format_rational(c)))
            .collect();
        writeln!(
            out,
            "bracket {} {} : {}",
            alg.label(*i),
            alg.label(*j),
            terms.join(" ")
        )
        .unwrap();
    }
    for (name, g) in &spec.gradings {
        match g {
            GradingSpec::Layer1(l) => {
                let labels: Vec<&str> = l.iter().map(|&i| alg.label(i)).collect();
                writeln!(out, "grading {name} layer1 {}", labels.join(" ")).unwrap();
            }
            GradingSpec::Weights(w) => {
                let terms: Vec<String> = w
                    .iter()
                    .enumerate()
                    .map(|(i, q)| format!("{}={}", alg.label(i), format_rational(q)))
                    .collect();
                writeln!(out, "grading {name} weights {}", terms.join(" ")).unwrap();
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::rational::{int, ratio};
    use proptest::prelude::*;

    const ENGEL: &str = "\
# Engel algebra
name engel
basis X Y Z T
bracket X Y : Z=1
bracket X Z : T=1   # [X,Z] = T
grading carnot layer1 X Y
grading expanding weights X=1 Y=2 Z=3 T=4
";

    #[test]
    fn engel_spec_gives_both_gradings() {
        let spec = parse_spec(ENGEL).unwrap();
        assert_eq!(spec.algebra.dim(), 4);
        assert_eq!(spec.algebra.brackets().len(), 2);
        assert_eq!(*spec.grading("carnot").unwrap().homogeneous_dim(), int(7));
        assert_eq!(
            *spec.grading("expanding").unwrap().homogeneous_dim(),
            int(10)
        );
        assert!(matches!(
            spec.grading("nope"),
            Err(SpecGradingError::Unknown { .. })
        ));
    }

    #[test]
    fn unknown_label_is_semantic_error() {
        let text = "name a\nbasis X Y Z\nbracket X Y : W=1\n";
        match parse_spec(text) {
            Err(SpecError::Semantic(m)) => assert!(m.contains("`W`"), "{m}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn no_brackets_is_abelian() {
        let spec = parse_spec("name flat\nbasis A B C\ngrading g layer1 A B C\n").unwrap();
        assert!(spec.algebra.is_abelian());
        assert!(spec.grading("g").unwrap().is_carnot());
    }

    #[test]
    fn parse_errors_carry_positions() {
        let err = parse_spec("name a\nbasis X Y\nbracket X Y : X=1/0\n").unwrap_err();
        assert_eq!(
            err,
            SpecError::Parse {
                line: 3,
                column: 17,
                message: "zero denominator: `1/0`".into()
            }
        );
    }

    #[test]
    fn other_errors() {
        let cases = [
            ("basis X\nname a\nbracket X Y\n", "line 3"),
            ("name a\nbasis X X\n", "duplicate basis label"),
            (
                "name a\nbasis X Y\ngrading g weights X=1 Y=0\n",
                "non-positive",
            ),
            (
                "name a\nbasis X Y\ngrading g weights X=1\n",
                "no weight for Y",
            ),
            ("name a\nbasis X Y\nfrobnicate\n", "unknown directive"),
            (
                "name a\nbasis X Y\nbracket X Y : Y=1\nbracket Y X : X=1\n",
                "given twice",
            ),
            ("basis X Y\n", "missing `name`"),
        ];
        for (text, needle) in cases {
            let msg = parse_spec(text).unwrap_err().to_string();
            assert!(msg.contains(needle), "{text:?}: {msg}");
        }
    }

    #[test]
    fn corpus_round_trips() {
        for spec in corpus::specs() {
            let text = serialize(&spec);
            let back = parse_spec(&text).unwrap();
            assert_eq!(serialize(&back), text);
            assert_eq!(back.algebra, spec.algebra);
            assert_eq!(back.gradings, spec.gradings);
        }
    }

    #[test]
    fn serialization_is_canonical() {
        let a = parse_spec("name a\nbasis X Y Z\nbracket Y X : Z=-1/2\n").unwrap();
        assert_eq!(serialize(&a), "name a\nbasis X Y Z\nbracket X Y : Z=1/2\n");
        assert_eq!(a.algebra.structure_constant(0, 1, 2), ratio(1, 2));
    }

    proptest! {
        #[test]
        fn random_specs_round_trip(
            n in 2usize..6,
            raw in proptest::collection::vec((0usize..6, 0usize..6, 0usize..6, -5i64..6, 1i64..5), 0..8),
            weights in proptest::collection::vec((1i64..9, 1i64..4), 6),
        ) {
            let labels: Vec<String> = (0..n).map(|i| format!("E{i}")).collect();
            let mut text = format!("name rnd\nbasis {}\n", labels.join(" "));
            let mut used = BTreeSet::new();
            for (a, b, c, num, den) in raw {
                let (a, b, c) = (a % n, b % n, c % n);
                if a == b || num == 0 || !used.insert((a.min(b), a.max(b))) {
                    continue;
                }
                writeln!(text, "bracket {} {} : {}={}/{}", labels[a], labels[b], labels[c], num, den).unwrap();
            }
            let ws: Vec<String> = (0..n).map(|i| format!("{}={}/{}", labels[i], weights[i].0, weights[i].1)).collect();
            writeln!(text, "grading w weights {}", ws.join(" ")).unwrap();
            let spec = parse_spec(&text).unwrap();
            let canon = serialize(&spec);
            prop_assert_eq!(serialize(&parse_spec(&canon).unwrap()), canon);
        }
    }
}

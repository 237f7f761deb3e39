//! Distribution text format:
//!
//! ```text
//! # comment
//! var A 2
//! var B 3 lo mid hi
//! dense:
//! 0.1 0.1 0.1 0.2 0.2 0.3
//! ```
//!
//! or, after the `var` lines, `sparse:` followed by one `stateA stateB p`
//! line per non-zero row. States are labels or indices. Probabilities are
//! `num/den`, decimals or integers.

use std::fmt;
use std::str::FromStr;

use super::{strides_for, DiscreteDistribution, Scalar, VariableSpec};
use crate::error::{Error, Result};

enum Body {
    Header,
    Dense,
    Sparse,
}

impl<S: Scalar> FromStr for DiscreteDistribution<S> {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut vars: Vec<VariableSpec> = Vec::new();
        let mut body = Body::Header;
        let mut dense: Vec<S> = Vec::new();
        let mut sparse: Vec<(Vec<usize>, S)> = Vec::new();
        for (no, raw) in text.lines().enumerate() {
            let line = no + 1;
            let err = |message: String| Error::Parse { line, message };
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let toks: Vec<&str> = content.split_whitespace().collect();
            let number = |t: &str| S::parse(t).ok_or_else(|| err(format!("bad probability {t:?}")));
            match body {
                Body::Header => match toks.as_slice() {
                    ["dense:", rest @ ..] => {
                        body = Body::Dense;
                        for t in rest {
                            dense.push(number(t)?);
                        }
                    }
                    ["sparse:"] => body = Body::Sparse,
                    ["var", name, card, labels @ ..] => {
                        let card: usize = card
                            .parse()
                            .map_err(|_| err(format!("bad cardinality {card:?}")))?;
                        let mut spec = VariableSpec::new(name, card).map_err(|e| err(e.to_string()))?;
                        if !labels.is_empty() {
                            let labels = labels.iter().map(|s| s.to_string()).collect();
                            spec = spec.with_labels(labels).map_err(|e| err(e.to_string()))?;
                        }
                        vars.push(spec);
                    }
                    _ => return Err(err(format!("expected `var`, `dense:` or `sparse:`, got {content:?}"))),
                },
                Body::Dense => {
                    for t in &toks {
                        dense.push(number(t)?);
                    }
                }
                Body::Sparse => {
                    let Some((p, states)) = toks.split_last() else { continue };
                    if states.len() != vars.len() {
                        return Err(err(format!(
                            "expected {} states and a probability",
                            vars.len()
                        )));
                    }
                    let states = states
                        .iter()
                        .zip(&vars)
                        .map(|(s, v)| v.state(s))
                        .collect::<Result<Vec<_>>>()
                        .map_err(|e| err(e.to_string()))?;
                    sparse.push((states, number(p)?));
                }
            }
        }
        let at_end = |e: Error| Error::Parse {
            line: text.lines().count(),
            message: e.to_string(),
        };
        match body {
            Body::Header => Err(at_end(Error::InvalidDistribution(
                "missing `dense:` or `sparse:` section".into(),
            ))),
            Body::Dense => DiscreteDistribution::new(vars, dense).map_err(at_end),
            Body::Sparse => DiscreteDistribution::from_sparse(vars, sparse).map_err(at_end),
        }
    }
}

impl<S: Scalar> DiscreteDistribution<S> {
    fn write_header(&self, out: &mut String) {
        for v in &self.vars {
            out.push_str(&format!("var {} {}", v.name, v.cardinality));
            if let Some(labels) = &v.labels {
                for l in labels {
                    out.push(' ');
                    out.push_str(l);
                }
            }
            out.push('\n');
        }
    }

    /// Dense form, one row of the last variable per line.
    pub fn to_dense_text(&self) -> String {
        let mut out = String::new();
        self.write_header(&mut out);
        out.push_str("dense:\n");
        let width = self.vars.last().map_or(1, |v| v.cardinality);
        for row in self.probs.chunks(width) {
            let cells: Vec<String> = row.iter().map(Scalar::render).collect();
            out.push_str(&cells.join(" "));
            out.push('\n');
        }
        out
    }

    /// Sparse form listing non-zero rows by state label.
    pub fn to_sparse_text(&self) -> String {
        let mut out = String::new();
        self.write_header(&mut out);
        out.push_str("sparse:\n");
        let cards = self.cards();
        let (strides, _) = strides_for(&cards).expect("valid table");
        for (idx, p) in self.probs.iter().enumerate() {
            if p.is_zero() {
                continue;
            }
            for (k, v) in self.vars.iter().enumerate() {
                out.push_str(&v.label(idx / strides[k] % v.cardinality));
                out.push(' ');
            }
            out.push_str(&p.render());
            out.push('\n');
        }
        out
    }
}

impl<S: Scalar> fmt::Display for DiscreteDistribution<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let nonzero = self.probs.iter().filter(|p| !p.is_zero()).count();
        if nonzero * 2 < self.probs.len() {
            f.write_str(&self.to_sparse_text())
        } else {
            f.write_str(&self.to_dense_text())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::Exact;

    #[test]
    fn dense_round_trip() {
        let text = "# two binaries\nvar a 2\nvar b 2 lo hi\ndense:\n1/8 3/8\n1/4 1/4\n";
        let p: DiscreteDistribution<Exact> = text.parse().unwrap();
        assert_eq!(p.prob(&[0, 1]), &Exact::from_ratio(3, 8));
        assert_eq!(p.to_dense_text().parse::<DiscreteDistribution<Exact>>().unwrap(), p);
        assert_eq!(p.to_sparse_text().parse::<DiscreteDistribution<Exact>>().unwrap(), p);
    }

    #[test]
    fn sparse_with_labels() {
        let text = "var a 2 no yes\nvar b 3\nsparse:\nyes 2 0.5\nno 0 1/2\n";
        let p: DiscreteDistribution<f64> = text.parse().unwrap();
        assert_eq!(p.prob(&[1, 2]), &0.5);
        assert_eq!(p.prob(&[0, 1]), &0.0);
        assert_eq!(p.to_string(), "var a 2 no yes\nvar b 3\nsparse:\nno 0 0.5\nyes 2 0.5\n");
    }

    #[test]
    fn parse_errors_carry_lines() {
        let bad = "var a 2\ndense:\n0.5 x\n";
        assert!(matches!(bad.parse::<DiscreteDistribution<f64>>(), Err(Error::Parse { line: 3, .. })));
        let bad = "var a 2\nsparse:\nmaybe 1\n";
        assert!(matches!(bad.parse::<DiscreteDistribution<f64>>(), Err(Error::Parse { line: 3, .. })));
        let bad = "var a 2\n";
        assert!(bad.parse::<DiscreteDistribution<f64>>().is_err());
        let bad = "var a 2\ndense:\n0.5 0.4\n";
        assert!(bad.parse::<DiscreteDistribution<f64>>().is_err());
    }
}

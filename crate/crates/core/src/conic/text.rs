//! Plain-text problem dumps.
//!
//! ```text
//! conic-problem v1
//! var <name> scalar
//! var <name> cvec <len>
//! var <name> herm <n> psd|free
//! maximize <affine>
//! eq <affine>
//! ge <affine>
//! soc <affine> | <affine> | <affine> ...
//! psd <var-index>
//! ```
//!
//! An affine expression is its constant followed by `index:coef` pairs,
//! e.g. `1e0 0:2.5e0 3:-1e0`. Variables are laid out in declaration order.
//! The `psd` lines generated for PSD-tagged variables are written
//! explicitly, and declaring a `psd` variable while parsing does not add a
//! second copy.

use std::fmt;
use std::str::FromStr;

use super::expr::AffineExpr;
use super::problem::{ConicProblem, Constraint, VarId, VarKind};
use crate::Error;

const HEADER: &str = "conic-problem v1";

struct Affine<'a>(&'a AffineExpr);

impl fmt::Display for Affine<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:e}", self.0.constant)?;
        for (i, c) in &self.0.terms {
            write!(f, " {i}:{c:e}")?;
        }
        Ok(())
    }
}

impl fmt::Display for ConicProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{HEADER}")?;
        for v in &self.vars {
            match v.kind {
                VarKind::Scalar => writeln!(f, "var {} scalar", v.name)?,
                VarKind::ComplexVector(len) => writeln!(f, "var {} cvec {len}", v.name)?,
                VarKind::Hermitian { n, psd } => {
                    writeln!(f, "var {} herm {n} {}", v.name, if psd { "psd" } else { "free" })?
                }
            }
        }
        writeln!(f, "maximize {}", Affine(&self.objective))?;
        for c in &self.constraints {
            match c {
                Constraint::LinearEq(e) => writeln!(f, "eq {}", Affine(e))?,
                Constraint::LinearIneq(e) => writeln!(f, "ge {}", Affine(e))?,
                Constraint::SecondOrderCone { bound, vector } => {
                    write!(f, "soc {}", Affine(bound))?;
                    for v in vector {
                        write!(f, " | {}", Affine(v))?;
                    }
                    writeln!(f)?;
                }
                Constraint::Psd(id) => writeln!(f, "psd {}", id.0)?,
            }
        }
        Ok(())
    }
}

fn parse_affine(s: &str, line: usize) -> Result<AffineExpr, Error> {
    let err = |message: String| Error::Parse { line, message };
    let mut tokens = s.split_whitespace();
    let constant = tokens
        .next()
        .ok_or_else(|| err("empty affine expression".into()))?
        .parse::<f64>()
        .map_err(|e| err(format!("bad constant: {e}")))?;
    let mut terms = Vec::new();
    for t in tokens {
        let (i, c) = t.split_once(':').ok_or_else(|| err(format!("bad term {t:?}")))?;
        let i = i.parse::<usize>().map_err(|e| err(format!("bad index in {t:?}: {e}")))?;
        let c = c.parse::<f64>().map_err(|e| err(format!("bad coefficient in {t:?}: {e}")))?;
        terms.push((i, c));
    }
    Ok(AffineExpr { terms, constant })
}

impl FromStr for ConicProblem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let mut lines = s.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
        match lines.next() {
            Some((_, HEADER)) => {}
            _ => {
                return Err(Error::Parse {
                    line: 1,
                    message: format!("expected header {HEADER:?}"),
                })
            }
        }
        let mut p = ConicProblem::new();
        for (line, text) in lines {
            if text.is_empty() || text.starts_with('#') {
                continue;
            }
            let err = |message: String| Error::Parse { line, message };
            let (kw, rest) = text.split_once(' ').unwrap_or((text, ""));
            match kw {
                "var" => {
                    let parts: Vec<&str> = rest.split_whitespace().collect();
                    let size = |k: usize| -> Result<usize, Error> {
                        parts
                            .get(k)
                            .ok_or_else(|| err("missing size".into()))?
                            .parse::<usize>()
                            .map_err(|e| err(format!("bad size: {e}")))
                    };
                    match parts.as_slice() {
                        [name, "scalar"] => {
                            p.scalar(name);
                        }
                        [name, "cvec", _] => {
                            p.complex_vector(name, size(2)?);
                        }
                        [name, "herm", _, tag @ ("psd" | "free")] => {
                            let n = size(2)?;
                            let before = p.constraints.len();
                            p.hermitian(name, n, *tag == "psd");
                            p.constraints.truncate(before);
                        }
                        _ => return Err(err(format!("bad variable declaration {rest:?}"))),
                    }
                }
                "maximize" => p.objective = parse_affine(rest, line)?,
                "eq" => p.constraints.push(Constraint::LinearEq(parse_affine(rest, line)?)),
                "ge" => p.constraints.push(Constraint::LinearIneq(parse_affine(rest, line)?)),
                "soc" => {
                    let mut parts = rest.split('|');
                    let bound = parse_affine(parts.next().unwrap_or(""), line)?;
                    let vector = parts.map(|s| parse_affine(s, line)).collect::<Result<_, _>>()?;
                    p.constraints.push(Constraint::SecondOrderCone { bound, vector });
                }
                "psd" => {
                    let id = rest
                        .trim()
                        .parse::<usize>()
                        .map_err(|e| err(format!("bad variable index: {e}")))?;
                    p.constraints.push(Constraint::Psd(VarId(id)));
                }
                other => return Err(err(format!("unknown keyword {other:?}"))),
            }
        }
        p.validate()?;
        Ok(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::CMatrix;
    use crate::C64;

    fn sample() -> ConicProblem {
        let mut p = ConicProblem::new();
        let t = p.scalar("t");
        let w = p.complex_vector("w", 2);
        let x = p.hermitian("X", 2, true);
        let a = CMatrix::from_fn(2, 2, |i, j| C64::new(1.0 / (1 + i + j) as f64, (i as f64) - (j as f64)));
        p.maximize(t.expr() * 0.1 + x.trace_product(&a));
        p.ge0(t.expr() + 1e-17);
        p.eq0(x.trace() - std::f64::consts::PI);
        p.soc(t.expr() + 2.0, w.components());
        p
    }

    #[test]
    fn roundtrip_is_identical() {
        let p = sample();
        let text = p.to_string();
        let back: ConicProblem = text.parse().unwrap();
        assert_eq!(p, back);
        assert_eq!(text, back.to_string());
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let bad = "conic-problem v1\nvar t scalar\nge 1e0 0:abc\n";
        match bad.parse::<ConicProblem>() {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        assert!("nope".parse::<ConicProblem>().is_err());
        assert!("conic-problem v1\nge 0e0 4:1e0\n".parse::<ConicProblem>().is_err());
    }
}

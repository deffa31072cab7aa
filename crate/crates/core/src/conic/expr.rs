use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

/// `constant + sum(coef * x[index])` over the problem's real scalars.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct AffineExpr {
    pub terms: Vec<(usize, f64)>,
    pub constant: f64,
}

impl AffineExpr {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: f64) -> Self {
        Self {
            terms: Vec::new(),
            constant: c,
        }
    }

    pub fn var(index: usize) -> Self {
        Self::term(index, 1.0)
    }

    pub fn term(index: usize, coef: f64) -> Self {
        Self {
            terms: vec![(index, coef)],
            constant: 0.0,
        }
    }

    pub fn add_term(&mut self, index: usize, coef: f64) -> &mut Self {
        if coef != 0.0 {
            self.terms.push((index, coef));
        }
        self
    }

    pub fn add_expr(&mut self, other: &AffineExpr, scale: f64) -> &mut Self {
        for &(i, c) in &other.terms {
            self.add_term(i, scale * c);
        }
        self.constant += scale * other.constant;
        self
    }

    /// Merge repeated indices and drop exact zeros, sorting by index.
    pub fn canonical(&self) -> Self {
        let mut t = self.terms.clone();
        t.sort_by_key(|&(i, _)| i);
        let mut out: Vec<(usize, f64)> = Vec::with_capacity(t.len());
        for (i, c) in t {
            match out.last_mut() {
                Some((j, acc)) if *j == i => *acc += c,
                _ => out.push((i, c)),
            }
        }
        out.retain(|&(_, c)| c != 0.0);
        Self {
            terms: out,
            constant: self.constant,
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.constant + self.terms.iter().map(|&(i, c)| c * x[i]).sum::<f64>()
    }

    /// Largest absolute contribution, used to scale residuals.
    pub fn magnitude(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|&(i, c)| (c * x[i]).abs())
            .fold(self.constant.abs(), f64::max)
    }

    pub fn max_index(&self) -> Option<usize> {
        self.terms.iter().map(|&(i, _)| i).max()
    }
}

impl Add for AffineExpr {
    type Output = AffineExpr;
    fn add(mut self, rhs: AffineExpr) -> AffineExpr {
        self.add_expr(&rhs, 1.0);
        self
    }
}

impl Add<f64> for AffineExpr {
    type Output = AffineExpr;
    fn add(mut self, rhs: f64) -> AffineExpr {
        self.constant += rhs;
        self
    }
}

impl AddAssign for AffineExpr {
    fn add_assign(&mut self, rhs: AffineExpr) {
        self.add_expr(&rhs, 1.0);
    }
}

impl Sub for AffineExpr {
    type Output = AffineExpr;
    fn sub(mut self, rhs: AffineExpr) -> AffineExpr {
        self.add_expr(&rhs, -1.0);
        self
    }
}

impl Sub<f64> for AffineExpr {
    type Output = AffineExpr;
    fn sub(mut self, rhs: f64) -> AffineExpr {
        self.constant -= rhs;
        self
    }
}

impl Mul<f64> for AffineExpr {
    type Output = AffineExpr;
    fn mul(mut self, rhs: f64) -> AffineExpr {
        for t in &mut self.terms {
            t.1 *= rhs;
        }
        self.constant *= rhs;
        self
    }
}

impl Neg for AffineExpr {
    type Output = AffineExpr;
    fn neg(self) -> AffineExpr {
        self * -1.0
    }
}

/// Sum of expressions.
pub fn sum<I: IntoIterator<Item = AffineExpr>>(items: I) -> AffineExpr {
    let mut acc = AffineExpr::zero();
    for e in items {
        acc += e;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_and_canonical_form() {
        let e = (AffineExpr::var(2) * 3.0 + AffineExpr::var(0) - AffineExpr::term(2, 1.0)) + 4.0;
        let c = e.canonical();
        assert_eq!(c.terms, vec![(0, 1.0), (2, 2.0)]);
        assert_eq!(c.constant, 4.0);
        assert_eq!(e.eval(&[1.0, 0.0, 2.0]), 9.0);
        let z = (AffineExpr::var(1) - AffineExpr::var(1)).canonical();
        assert!(z.terms.is_empty());
    }
}

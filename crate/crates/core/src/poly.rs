//! Dense univariate polynomials over an arbitrary coefficient field.
//!
//! The same code builds the Lagrange basis in floating point and in exact
//! rational arithmetic, which gives an independent closed-form route to the
//! basis integrals.

use std::fmt::Debug;
use std::ops::Neg;

use num_rational::Ratio;
use num_traits::Num;

/// Coefficient field for [`Polynomial`].
pub trait Coefficient: Clone + Num + Neg<Output = Self> + Debug {
    fn from_int(n: i64) -> Self;
}

impl Coefficient for f64 {
    fn from_int(n: i64) -> Self {
        n as f64
    }
}

impl Coefficient for f32 {
    fn from_int(n: i64) -> Self {
        n as f32
    }
}

impl Coefficient for Ratio<i128> {
    fn from_int(n: i64) -> Self {
        Ratio::from_integer(n as i128)
    }
}

/// Exact rational type used for closed-form reference values.
pub type Rational = Ratio<i128>;

/// Polynomial with coefficients in ascending order of degree.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial<S> {
    coeffs: Vec<S>,
}

impl<S: Coefficient> Polynomial<S> {
    pub fn new(coeffs: Vec<S>) -> Self {
        let mut p = Polynomial { coeffs };
        p.trim();
        p
    }

    pub fn constant(c: S) -> Self {
        Self::new(vec![c])
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    fn trim(&mut self) {
        while self.coeffs.len() > 1 && self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
        if self.coeffs.is_empty() {
            self.coeffs.push(S::zero());
        }
    }

    /// Horner evaluation.
    pub fn eval(&self, x: S) -> S {
        self.coeffs
            .iter()
            .rev()
            .fold(S::zero(), |acc, c| acc * x.clone() + c.clone())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = vec![S::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        Self::new(out)
    }

    pub fn scale(&self, s: S) -> Self {
        Self::new(self.coeffs.iter().map(|c| c.clone() * s.clone()).collect())
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Self::constant(S::zero());
        }
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c.clone() * S::from_int(i as i64))
                .collect(),
        )
    }

    /// Antiderivative vanishing at zero.
    pub fn antiderivative(&self) -> Self {
        let mut out = vec![S::zero()];
        out.extend(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| c.clone() / S::from_int(i as i64 + 1)),
        );
        Self::new(out)
    }

    /// Definite integral over `[lo, hi]`.
    pub fn integrate(&self, lo: S, hi: S) -> S {
        let anti = self.antiderivative();
        anti.eval(hi) - anti.eval(lo)
    }
}

/// Lagrange cardinal polynomials for the given distinct nodes.
pub fn lagrange_basis<S: Coefficient>(nodes: &[S]) -> Vec<Polynomial<S>> {
    (0..nodes.len())
        .map(|j| {
            let mut poly = Polynomial::constant(S::one());
            for (m, xm) in nodes.iter().enumerate() {
                if m == j {
                    continue;
                }
                let denom = nodes[j].clone() - xm.clone();
                let factor = Polynomial::new(vec![-xm.clone() / denom.clone(), S::one() / denom]);
                poly = poly.mul(&factor);
            }
            poly
        })
        .collect()
}

/// Equispaced nodes on `[-1, 1]`; the midpoint for degree zero.
pub fn equispaced_nodes<S: Coefficient>(degree: usize) -> Vec<S> {
    if degree == 0 {
        return vec![S::zero()];
    }
    let k = S::from_int(degree as i64);
    (0..=degree)
        .map(|j| S::from_int(2 * j as i64) / k.clone() - S::one())
        .collect()
}

/// Exact weights `∫_{-1}^{1} φ_j` of the equispaced Lagrange basis.
pub fn exact_basis_integrals(degree: usize) -> Vec<Rational> {
    let nodes = equispaced_nodes::<Rational>(degree);
    lagrange_basis(&nodes)
        .iter()
        .map(|p| p.integrate(-Rational::from_int(1), Rational::from_int(1)))
        .collect()
}

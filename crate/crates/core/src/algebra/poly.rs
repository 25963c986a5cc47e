//! Dense univariate polynomials, coefficient i multiplies z^i.

use std::ops::{Add, Mul, Sub};

use ark_ff::PrimeField;

use crate::error::{ArcError, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polynomial<F: PrimeField> {
    coeffs: Vec<F>,
}

impl<F: PrimeField> Polynomial<F> {
    pub fn new(mut coeffs: Vec<F>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    pub fn zero() -> Self {
        Polynomial { coeffs: Vec::new() }
    }

    pub fn constant(c: F) -> Self {
        Self::new(vec![c])
    }

    /// `z^k`.
    pub fn monomial(k: usize, c: F) -> Self {
        let mut v = vec![F::zero(); k + 1];
        v[k] = c;
        Self::new(v)
    }

    pub fn coeffs(&self) -> &[F] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with the zero polynomial reported as 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn eval(&self, z: F) -> F {
        self.coeffs.iter().rev().fold(F::zero(), |acc, c| acc * z + c)
    }

    /// Quotient q with g(Z) - y = q(Z)(Z - x). Fails when g(x) != y.
    pub fn div_linear(&self, x: F, y: F) -> Result<Self> {
        if self.is_zero() {
            return if y.is_zero() { Ok(Self::zero()) } else { Err(ArcError::NonZeroRemainder) };
        }
        let mut c = self.coeffs.clone();
        c[0] -= y;
        // synthetic division from the top
        let n = c.len();
        let mut q = vec![F::zero(); n.saturating_sub(1)];
        let mut carry = F::zero();
        for i in (1..n).rev() {
            carry = c[i] + carry * x;
            q[i - 1] = carry;
        }
        let rem = c[0] + carry * x;
        if !rem.is_zero() {
            return Err(ArcError::NonZeroRemainder);
        }
        Ok(Self::new(q))
    }

    pub fn scale(&self, s: F) -> Self {
        Self::new(self.coeffs.iter().map(|c| *c * s).collect())
    }
}

impl<F: PrimeField> Add for &Polynomial<F> {
    type Output = Polynomial<F>;
    fn add(self, o: Self) -> Polynomial<F> {
        let n = self.coeffs.len().max(o.coeffs.len());
        let v = (0..n)
            .map(|i| {
                self.coeffs.get(i).copied().unwrap_or_default() + o.coeffs.get(i).copied().unwrap_or_default()
            })
            .collect();
        Polynomial::new(v)
    }
}

impl<F: PrimeField> Sub for &Polynomial<F> {
    type Output = Polynomial<F>;
    fn sub(self, o: Self) -> Polynomial<F> {
        self + &o.scale(-F::one())
    }
}

impl<F: PrimeField> Mul for &Polynomial<F> {
    type Output = Polynomial<F>;
    fn mul(self, o: Self) -> Polynomial<F> {
        if self.is_zero() || o.is_zero() {
            return Polynomial::zero();
        }
        let mut v = vec![F::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                v[i + j] += *a * b;
            }
        }
        Polynomial::new(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::field::F101;

    fn f(v: u64) -> F101 {
        F101::from(v)
    }

    #[test]
    fn eval_examples() {
        assert_eq!(Polynomial::<F101>::zero().eval(f(9)), f(0));
        assert_eq!(Polynomial::monomial(2, f(1)).eval(f(2)), f(4));
        assert_eq!(Polynomial::constant(f(3)).eval(f(0)), f(3));
    }

    #[test]
    fn div_examples() {
        let g = Polynomial::monomial(2, f(1));
        assert_eq!(g.div_linear(f(2), f(4)).unwrap(), Polynomial::new(vec![f(2), f(1)]));
        assert_eq!(Polynomial::constant(f(7)).div_linear(f(30), f(7)).unwrap(), Polynomial::zero());
        assert_eq!(g.div_linear(f(2), f(5)), Err(ArcError::NonZeroRemainder));
    }

    #[test]
    fn normalizes_trailing_zeros() {
        let g = Polynomial::new(vec![f(1), f(0), f(0)]);
        assert_eq!(g.degree(), 0);
        assert_eq!(g.coeffs().len(), 1);
    }
}

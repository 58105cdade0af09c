//! Truncated Taylor series in `x` with complex coefficients.
//!
//! A [`Jet`] of order `n` around a point `x0` stores `c_k = f^(k)(x0) / k!`
//! for `k = 0..=n`. Products, quotients, `exp` and `ln` follow the usual
//! power-series recurrences, so every derivative obtained from a jet is exact
//! up to rounding: no step size is involved anywhere.

use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    coeffs: Vec<Complex64>,
}

fn factorial(k: usize) -> f64 {
    (1..=k).fold(1.0, |acc, j| acc * j as f64)
}

impl Jet {
    pub fn from_coeffs(coeffs: Vec<Complex64>) -> Self {
        assert!(!coeffs.is_empty(), "a jet carries at least its value");
        Jet { coeffs }
    }

    pub fn constant(value: Complex64, order: usize) -> Self {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); order + 1];
        coeffs[0] = value;
        Jet { coeffs }
    }

    pub fn zero(order: usize) -> Self {
        Self::constant(Complex64::new(0.0, 0.0), order)
    }

    /// The independent variable `x0 + δ`.
    pub fn variable(x0: f64, order: usize) -> Self {
        let mut jet = Self::constant(Complex64::new(x0, 0.0), order);
        if order >= 1 {
            jet.coeffs[1] = Complex64::new(1.0, 0.0);
        }
        jet
    }

    /// Builds a jet from derivative values `f^(k)(x0)`.
    pub fn from_derivatives(derivs: &[Complex64]) -> Self {
        let coeffs = derivs
            .iter()
            .enumerate()
            .map(|(k, d)| d / factorial(k))
            .collect();
        Jet::from_coeffs(coeffs)
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn value(&self) -> Complex64 {
        self.coeffs[0]
    }

    /// `k`-th derivative at the expansion point.
    pub fn derivative(&self, k: usize) -> Complex64 {
        self.coeffs[k] * factorial(k)
    }

    pub fn truncate(&self, order: usize) -> Jet {
        let n = order.min(self.order());
        Jet::from_coeffs(self.coeffs[..=n].to_vec())
    }

    /// Jet of `f'`; loses one order.
    pub fn differentiate(&self) -> Jet {
        if self.order() == 0 {
            return Jet::zero(0);
        }
        let coeffs = self.coeffs[1..]
            .iter()
            .enumerate()
            .map(|(k, c)| c * (k + 1) as f64)
            .collect();
        Jet::from_coeffs(coeffs)
    }

    /// Jet of `F` with `F' = self` and `F(x0) = value`; gains one order.
    pub fn integrate(&self, value: Complex64) -> Jet {
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(value);
        coeffs.extend(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| c / (k + 1) as f64),
        );
        Jet::from_coeffs(coeffs)
    }

    /// Coefficient-wise conjugate: the jet of `f*` for a function of real `x`.
    pub fn conj(&self) -> Jet {
        Jet::from_coeffs(self.coeffs.iter().map(|c| c.conj()).collect())
    }

    pub fn re(&self) -> Jet {
        Jet::from_coeffs(
            self.coeffs
                .iter()
                .map(|c| Complex64::new(c.re, 0.0))
                .collect(),
        )
    }

    pub fn scale(&self, factor: Complex64) -> Jet {
        Jet::from_coeffs(self.coeffs.iter().map(|c| c * factor).collect())
    }

    pub fn scale_re(&self, factor: f64) -> Jet {
        Jet::from_coeffs(self.coeffs.iter().map(|c| c * factor).collect())
    }

    /// Largest coefficient modulus, used as a magnitude estimate.
    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    pub fn checked_div(&self, rhs: &Jet) -> Result<Jet> {
        let n = self.order().min(rhs.order());
        let b0 = rhs.coeffs[0];
        if b0.norm() == 0.0 {
            return Err(Error::domain("jet division by a series with zero value"));
        }
        let mut q = vec![Complex64::new(0.0, 0.0); n + 1];
        for k in 0..=n {
            let mut acc = self.coeffs[k];
            for j in 1..=k {
                acc -= rhs.coeffs[j] * q[k - j];
            }
            q[k] = acc / b0;
        }
        Ok(Jet::from_coeffs(q))
    }

    pub fn recip(&self) -> Result<Jet> {
        Jet::constant(Complex64::new(1.0, 0.0), self.order()).checked_div(self)
    }

    pub fn exp(&self) -> Jet {
        let n = self.order();
        let mut g = vec![Complex64::new(0.0, 0.0); n + 1];
        g[0] = self.coeffs[0].exp();
        for k in 1..=n {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 1..=k {
                acc += self.coeffs[j] * g[k - j] * j as f64;
            }
            g[k] = acc / k as f64;
        }
        Jet::from_coeffs(g)
    }

    /// Principal-branch logarithm. Only the value depends on the branch;
    /// all higher coefficients are those of `f'/f` integrated.
    pub fn ln(&self) -> Result<Jet> {
        let n = self.order();
        let g0 = self.coeffs[0];
        if g0.norm() == 0.0 {
            return Err(Error::domain("logarithm of a series with zero value"));
        }
        let mut f = vec![Complex64::new(0.0, 0.0); n + 1];
        f[0] = g0.ln();
        for k in 1..=n {
            let mut acc = self.coeffs[k] * k as f64;
            for j in 1..k {
                acc -= f[j] * self.coeffs[k - j] * j as f64;
            }
            f[k] = acc / (g0 * k as f64);
        }
        Ok(Jet::from_coeffs(f))
    }

    pub fn cosh(&self) -> Jet {
        let plus = self.exp();
        let minus = (-self).exp();
        (&plus + &minus).scale_re(0.5)
    }

    /// Sum of `terms[k] * self^k` by Horner's rule.
    pub fn polynomial(&self, terms: &[Complex64]) -> Jet {
        let order = self.order();
        let mut acc = Jet::zero(order);
        for c in terms.iter().rev() {
            acc = &(&acc * self) + &Jet::constant(*c, order);
        }
        acc
    }
}

impl Add for &Jet {
    type Output = Jet;
    fn add(self, rhs: &Jet) -> Jet {
        let n = self.order().min(rhs.order());
        Jet::from_coeffs((0..=n).map(|k| self.coeffs[k] + rhs.coeffs[k]).collect())
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, rhs: Jet) -> Jet {
        &self + &rhs
    }
}

impl AddAssign<&Jet> for Jet {
    fn add_assign(&mut self, rhs: &Jet) {
        *self = &*self + rhs;
    }
}

impl Sub for &Jet {
    type Output = Jet;
    fn sub(self, rhs: &Jet) -> Jet {
        let n = self.order().min(rhs.order());
        Jet::from_coeffs((0..=n).map(|k| self.coeffs[k] - rhs.coeffs[k]).collect())
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, rhs: Jet) -> Jet {
        &self - &rhs
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        Jet::from_coeffs(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        -&self
    }
}

impl Mul for &Jet {
    type Output = Jet;
    fn mul(self, rhs: &Jet) -> Jet {
        let n = self.order().min(rhs.order());
        let mut out = vec![Complex64::new(0.0, 0.0); n + 1];
        for (i, a) in self.coeffs[..=n].iter().enumerate() {
            for (j, b) in rhs.coeffs[..=n - i].iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Jet::from_coeffs(out)
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        &self * &rhs
    }
}

impl Mul<Complex64> for &Jet {
    type Output = Jet;
    fn mul(self, rhs: Complex64) -> Jet {
        self.scale(rhs)
    }
}

impl Mul<f64> for &Jet {
    type Output = Jet;
    fn mul(self, rhs: f64) -> Jet {
        self.scale_re(rhs)
    }
}

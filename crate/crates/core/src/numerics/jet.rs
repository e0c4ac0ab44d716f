use num_complex::Complex64;

use crate::error::{Error, Result};

/// Hard cap on jet order; derivative orders needed downstream are at most
/// N - 1 for desk-scale N.
pub const MAX_JET_ORDER: usize = 64;

/// Truncated Taylor series about z = 0 with exact truncation semantics:
/// every operation produces coefficients 0..=order equal to those of the
/// exact power series of the composite.
#[derive(Clone, Debug, PartialEq)]
pub struct Jet {
    coeffs: Vec<Complex64>,
}

impl Jet {
    pub fn from_coeffs(coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.is_empty() || coeffs.len() - 1 > MAX_JET_ORDER {
            return Err(Error::JetOrderOverflow {
                order: coeffs.len().saturating_sub(1),
                max: MAX_JET_ORDER,
            });
        }
        Ok(Jet { coeffs })
    }

    pub fn constant(c: Complex64, order: usize) -> Result<Self> {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); order + 1];
        coeffs[0] = c;
        Jet::from_coeffs(coeffs)
    }

    /// The jet of z itself (degenerates to the constant 0 at order 0).
    pub fn variable(order: usize) -> Result<Self> {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); order + 1];
        if order >= 1 {
            coeffs[1] = Complex64::new(1.0, 0.0);
        }
        Jet::from_coeffs(coeffs)
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, k: usize) -> Complex64 {
        self.coeffs.get(k).copied().unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn add(&self, rhs: &Jet) -> Jet {
        let order = self.order().min(rhs.order());
        let coeffs = (0..=order).map(|k| self.coeff(k) + rhs.coeff(k)).collect();
        Jet { coeffs }
    }

    pub fn scale(&self, c: Complex64) -> Jet {
        Jet {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    /// Cauchy product truncated to the shorter operand's order.
    pub fn mul(&self, rhs: &Jet) -> Jet {
        let order = self.order().min(rhs.order());
        let mut coeffs = vec![Complex64::new(0.0, 0.0); order + 1];
        for (k, c) in coeffs.iter_mut().enumerate() {
            for j in 0..=k {
                *c += self.coeff(j) * rhs.coeff(k - j);
            }
        }
        Jet { coeffs }
    }

    /// exp(f) = exp(f0) * sum_k (f - f0)^k / k!; the shifted jet is
    /// nilpotent, so the series terminates at the jet order.
    pub fn exp(&self) -> Jet {
        let order = self.order();
        let mut shifted = self.clone();
        shifted.coeffs[0] = Complex64::new(0.0, 0.0);
        let mut acc = Jet::constant(Complex64::new(1.0, 0.0), order).expect("order already valid");
        let mut term = acc.clone();
        for k in 1..=order {
            term = term.mul(&shifted).scale(Complex64::new(1.0 / k as f64, 0.0));
            acc = acc.add(&term);
        }
        acc.scale(self.coeff(0).exp())
    }

    /// 1/f by the standard recurrence; requires a nonzero leading coefficient.
    pub fn reciprocal(&self) -> Result<Jet> {
        let a0 = self.coeff(0);
        if a0.norm() == 0.0 {
            return Err(Error::ZeroLeadingCoefficient);
        }
        let order = self.order();
        let mut coeffs = vec![Complex64::new(0.0, 0.0); order + 1];
        coeffs[0] = a0.finv();
        for k in 1..=order {
            let mut s = Complex64::new(0.0, 0.0);
            for j in 1..=k {
                s += self.coeff(j) * coeffs[k - j];
            }
            coeffs[k] = -s * coeffs[0];
        }
        Ok(Jet { coeffs })
    }

    /// Principal branch square root; requires a nonzero leading coefficient.
    pub fn sqrt(&self) -> Result<Jet> {
        let a0 = self.coeff(0);
        if a0.norm() == 0.0 {
            return Err(Error::ZeroLeadingCoefficient);
        }
        let order = self.order();
        let mut coeffs = vec![Complex64::new(0.0, 0.0); order + 1];
        coeffs[0] = a0.sqrt();
        let half = (coeffs[0] * 2.0).finv();
        for k in 1..=order {
            let mut s = Complex64::new(0.0, 0.0);
            for j in 1..k {
                s += coeffs[j] * coeffs[k - j];
            }
            coeffs[k] = (self.coeff(k) - s) * half;
        }
        Ok(Jet { coeffs })
    }

    /// n-th derivative at z = 0, i.e. n! * coeffs[n].
    pub fn derivative_at_zero(&self, n: usize) -> Result<Complex64> {
        if n > self.order() {
            return Err(Error::JetOrderOverflow {
                order: n,
                max: self.order(),
            });
        }
        Ok(self.coeff(n) * factorial(n))
    }
}

pub fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

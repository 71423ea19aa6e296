//! Truncated univariate complex power series.
//!
//! A [`Series`] of order `N` holds the coefficients `c_0..=c_N` and stands for
//! the class of analytic functions agreeing with it modulo `z^(N+1)`. Binary
//! operations truncate to the smaller of the two orders.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Complex64>", into = "Vec<Complex64>")]
pub struct Series {
    coeffs: Vec<Complex64>,
}

impl TryFrom<Vec<Complex64>> for Series {
    type Error = Error;

    fn try_from(coeffs: Vec<Complex64>) -> Result<Self> {
        Series::new(coeffs)
    }
}

impl From<Series> for Vec<Complex64> {
    fn from(s: Series) -> Self {
        s.coeffs
    }
}

impl Series {
    /// Builds a series from `c_0..=c_N`; the order is `coeffs.len() - 1`.
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::EmptySeries);
        }
        if let Some(index) = coeffs.iter().position(|c| !c.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Series { coeffs })
    }

    pub fn from_real(coeffs: &[f64]) -> Result<Self> {
        Series::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn zero(order: usize) -> Self {
        Series {
            coeffs: vec![ZERO; order + 1],
        }
    }

    pub fn constant(c: Complex64, order: usize) -> Self {
        let mut s = Series::zero(order);
        s.coeffs[0] = c;
        s
    }

    pub fn one(order: usize) -> Self {
        Series::constant(ONE, order)
    }

    /// The series `z`.
    pub fn variable(order: usize) -> Self {
        let mut s = Series::zero(order);
        if order >= 1 {
            s.coeffs[1] = ONE;
        }
        s
    }

    /// `1 + z + z^2 + ... + z^order`, i.e. `1/(1-z)`.
    pub fn geometric(order: usize) -> Self {
        Series {
            coeffs: vec![ONE; order + 1],
        }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Coefficient of `z^n`; zero beyond the stored order.
    pub fn coeff(&self, n: usize) -> Complex64 {
        self.coeffs.get(n).copied().unwrap_or(ZERO)
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_finite())
    }

    /// `f(0) = 0` and `f'(0) = 1`, checked exactly.
    pub fn is_normalized(&self) -> bool {
        self.order() >= 1 && self.coeffs[0] == ZERO && self.coeffs[1] == ONE
    }

    pub fn truncate(&self, order: usize) -> Series {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(order + 1, ZERO);
        Series { coeffs }
    }

    pub fn scale(&self, k: Complex64) -> Series {
        Series {
            coeffs: self.coeffs.iter().map(|c| c * k).collect(),
        }
    }

    /// Cauchy product truncated to the smaller order.
    pub fn mul(&self, other: &Series) -> Series {
        let order = self.order().min(other.order());
        let a = &self.coeffs;
        let b = &other.coeffs;
        let coeffs = (0..=order)
            .map(|n| (0..=n).map(|k| a[k] * b[n - k]).sum())
            .collect();
        Series { coeffs }
    }

    fn zip_with(&self, other: &Series, op: impl Fn(Complex64, Complex64) -> Complex64) -> Series {
        let order = self.order().min(other.order());
        Series {
            coeffs: (0..=order)
                .map(|n| op(self.coeffs[n], other.coeffs[n]))
                .collect(),
        }
    }

    pub fn derivative(&self) -> Series {
        if self.order() == 0 {
            return Series::zero(0);
        }
        Series {
            coeffs: (1..=self.order())
                .map(|n| self.coeffs[n] * n as f64)
                .collect(),
        }
    }

    /// Substitutes `inner` into `self` by Horner's scheme.
    ///
    /// `inner` must have a zero constant term, otherwise the substitution
    /// would need coefficients beyond the truncation.
    pub fn compose(&self, inner: &Series) -> Result<Series> {
        if inner.coeffs[0] != ZERO {
            return Err(Error::ConstantTerm {
                op: "compose",
                expected: "0",
                got: inner.coeffs[0].to_string(),
            });
        }
        let order = self.order().min(inner.order());
        let inner = inner.truncate(order);
        let mut acc = Series::constant(self.coeffs[order], order);
        for k in (0..order).rev() {
            acc = acc.mul(&inner);
            acc.coeffs[0] += self.coeffs[k];
        }
        Ok(acc)
    }

    /// Principal logarithm of a series with constant term exactly 1,
    /// from `L' a = a'`.
    pub fn log(&self) -> Result<Series> {
        self.require_constant_one("log")?;
        let a = &self.coeffs;
        let order = self.order();
        let mut l = vec![ZERO; order + 1];
        for n in 1..=order {
            let mut acc = a[n] * n as f64;
            for k in 1..n {
                acc -= l[k] * a[n - k] * k as f64;
            }
            l[n] = acc / n as f64;
        }
        Ok(Series { coeffs: l })
    }

    /// Exponential of a series with zero constant term, from `E' = a' E`.
    pub fn exp(&self) -> Result<Series> {
        if self.coeffs[0] != ZERO {
            return Err(Error::ConstantTerm {
                op: "exp",
                expected: "0",
                got: self.coeffs[0].to_string(),
            });
        }
        let a = &self.coeffs;
        let order = self.order();
        let mut e = vec![ZERO; order + 1];
        e[0] = ONE;
        for n in 1..=order {
            let acc: Complex64 = (1..=n).map(|k| a[k] * k as f64 * e[n - k]).sum();
            e[n] = acc / n as f64;
        }
        Ok(Series { coeffs: e })
    }

    /// Square root with `s(0) = 1`, from `2 s s' = a'`.
    pub fn sqrt(&self) -> Result<Series> {
        self.require_constant_one("sqrt")?;
        let a = &self.coeffs;
        let order = self.order();
        let mut s = vec![ZERO; order + 1];
        s[0] = ONE;
        for n in 1..=order {
            // sum_{k=1}^{n} 2 k s_k s_{n-k} = n a_n, with s_0 = 1
            let mut acc = a[n] * n as f64;
            for k in 1..n {
                acc -= s[k] * s[n - k] * (2 * k) as f64;
            }
            s[n] = acc / (2 * n) as f64;
        }
        Ok(Series { coeffs: s })
    }

    /// Multiplicative inverse; the constant term must be nonzero.
    pub fn recip(&self) -> Result<Series> {
        let a0 = self.coeffs[0];
        if a0 == ZERO {
            return Err(Error::ConstantTerm {
                op: "recip",
                expected: "nonzero",
                got: a0.to_string(),
            });
        }
        let inv = a0.inv();
        let order = self.order();
        let mut b = vec![ZERO; order + 1];
        b[0] = inv;
        for n in 1..=order {
            let acc: Complex64 = (1..=n).map(|k| self.coeffs[k] * b[n - k]).sum();
            b[n] = -acc * inv;
        }
        Ok(Series { coeffs: b })
    }

    /// Principal power `self^p` for a series whose constant term `c` has
    /// `Re c > 0`, so the branch is fixed by the principal value of `c^p`.
    pub fn powf(&self, p: f64) -> Result<Series> {
        let c = self.coeffs[0];
        if c.re <= 0.0 {
            return Err(Error::ConstantTerm {
                op: "powf",
                expected: "positive real part",
                got: c.to_string(),
            });
        }
        let mut unit = self.scale(c.inv());
        unit.coeffs[0] = ONE;
        let mut out = unit.log()?.scale(Complex64::new(p, 0.0)).exp()?;
        out = out.scale(c.powf(p));
        Ok(out)
    }

    /// Evaluates the truncated polynomial at `z`.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(ZERO, |acc, &c| acc * z + c)
    }

    /// Max coefficient-wise distance over the common order.
    pub fn max_abs_diff(&self, other: &Series) -> f64 {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    fn require_constant_one(&self, op: &'static str) -> Result<()> {
        if self.coeffs[0] != ONE {
            return Err(Error::ConstantTerm {
                op,
                expected: "1",
                got: self.coeffs[0].to_string(),
            });
        }
        Ok(())
    }
}

impl Mul for &Series {
    type Output = Series;

    fn mul(self, rhs: &Series) -> Series {
        Series::mul(self, rhs)
    }
}

impl Add for &Series {
    type Output = Series;

    fn add(self, rhs: &Series) -> Series {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &Series {
    type Output = Series;

    fn sub(self, rhs: &Series) -> Series {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl Neg for &Series {
    type Output = Series;

    fn neg(self) -> Series {
        self.scale(-ONE)
    }
}

impl fmt::Display for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (n, c) in self.coeffs.iter().enumerate() {
            if *c == ZERO {
                continue;
            }
            write!(f, "({c})*z^{n} + ")?;
        }
        write!(f, "O(z^{})", self.order() + 1)
    }
}

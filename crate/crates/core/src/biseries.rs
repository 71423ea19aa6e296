//! Bivariate complex series truncated at a total degree.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::series::Series;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Coefficients of `t^p z^q` for `p + q <= total_degree`, stored by
/// increasing total degree.
#[derive(Clone, Debug, PartialEq)]
pub struct BiSeries {
    total_degree: usize,
    table: Vec<Complex64>,
}

fn index(p: usize, q: usize) -> usize {
    let d = p + q;
    d * (d + 1) / 2 + p
}

fn len_for(total_degree: usize) -> usize {
    (total_degree + 1) * (total_degree + 2) / 2
}

impl BiSeries {
    pub fn zero(total_degree: usize) -> Self {
        BiSeries {
            total_degree,
            table: vec![ZERO; len_for(total_degree)],
        }
    }

    pub fn total_degree(&self) -> usize {
        self.total_degree
    }

    /// Coefficient of `t^p z^q`; zero outside the stored triangle.
    pub fn get(&self, p: usize, q: usize) -> Complex64 {
        if p + q > self.total_degree {
            return ZERO;
        }
        self.table[index(p, q)]
    }

    /// Panics if `p + q` exceeds the total degree.
    pub fn set(&mut self, p: usize, q: usize, value: Complex64) {
        assert!(
            p + q <= self.total_degree,
            "index ({p}, {q}) beyond total degree {}",
            self.total_degree
        );
        self.table[index(p, q)] = value;
    }

    pub fn is_finite(&self) -> bool {
        self.table.iter().all(|c| c.is_finite())
    }

    /// Exact difference quotient `(f(t) - f(z)) / (t - z)` of the polynomial
    /// carried by `f`, truncated at `total_degree`. Needs `a_{total_degree+1}`.
    pub fn difference_quotient(f: &Series, total_degree: usize) -> Result<BiSeries> {
        if f.order() < total_degree + 1 {
            return Err(Error::InsufficientOrder {
                op: "difference_quotient",
                needed: total_degree + 1,
                got: f.order(),
            });
        }
        // (t^n - z^n)/(t - z) = sum_{i+j=n-1} t^i z^j
        let mut out = BiSeries::zero(total_degree);
        for n in 1..=total_degree + 1 {
            let a = f.coeff(n);
            for i in 0..n {
                out.table[index(i, n - 1 - i)] = a;
            }
        }
        Ok(out)
    }

    pub fn mul(&self, other: &BiSeries) -> BiSeries {
        let m = self.total_degree.min(other.total_degree);
        let mut out = BiSeries::zero(m);
        for d1 in 0..=m {
            for p1 in 0..=d1 {
                let a = self.table[index(p1, d1 - p1)];
                if a == ZERO {
                    continue;
                }
                for d2 in 0..=(m - d1) {
                    for p2 in 0..=d2 {
                        let b = other.table[index(p2, d2 - p2)];
                        out.table[index(p1 + p2, d1 + d2 - p1 - p2)] += a * b;
                    }
                }
            }
        }
        out
    }

    fn require_constant_one(&self) -> Result<()> {
        if self.table[0] != ONE {
            return Err(Error::ConstantTerm {
                op: "bivariate log",
                expected: "1",
                got: self.table[0].to_string(),
            });
        }
        Ok(())
    }

    /// Logarithm of a series with constant term exactly 1.
    ///
    /// The `q`-axis comes from the univariate recurrence in `z`; every other
    /// coefficient from `∂_t L · D = ∂_t D`, solved in order of total degree.
    pub fn log(&self) -> Result<BiSeries> {
        self.require_constant_one()?;
        let m = self.total_degree;
        let d = |p: usize, q: usize| self.table[index(p, q)];
        let mut l = BiSeries::zero(m);

        for q in 1..=m {
            let mut acc = d(0, q) * q as f64;
            for j in 1..q {
                acc -= l.table[index(0, j)] * d(0, q - j) * j as f64;
            }
            l.table[index(0, q)] = acc / q as f64;
        }
        for deg in 1..=m {
            for p in 1..=deg {
                let q = deg - p;
                let mut acc = d(p, q) * p as f64;
                for i in 1..=p {
                    for j in 0..=q {
                        if i == p && j == q {
                            continue;
                        }
                        acc -= l.table[index(i, j)] * d(p - i, q - j) * i as f64;
                    }
                }
                l.table[index(p, q)] = acc / p as f64;
            }
        }
        Ok(l)
    }

    /// Logarithm as the finite sum `sum_{k=1}^{M} (-1)^{k+1} u^k / k` over the
    /// nilpotent part `u = self - 1`.
    ///
    /// Algebraically identical to [`BiSeries::log`] but loses accuracy to
    /// cancellation once the coefficients of `u` are much larger than 1.
    pub fn log_power_sum(&self) -> Result<BiSeries> {
        self.require_constant_one()?;
        let mut u = self.clone();
        u.table[0] = ZERO;

        let mut out = BiSeries::zero(self.total_degree);
        let mut power = u.clone();
        for k in 1..=self.total_degree {
            let w = (if k % 2 == 1 { 1.0 } else { -1.0 }) / k as f64;
            for (o, x) in out.table.iter_mut().zip(&power.table) {
                *o += x * w;
            }
            if k < self.total_degree {
                power = power.mul(&u);
            }
        }
        Ok(out)
    }

    pub fn max_abs_diff(&self, other: &BiSeries) -> f64 {
        self.table
            .iter()
            .zip(&other.table)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_layout_is_dense() {
        let mut seen = vec![false; len_for(5)];
        for d in 0..=5 {
            for p in 0..=d {
                assert!(!seen[index(p, d - p)]);
                seen[index(p, d - p)] = true;
            }
        }
        assert!(seen.into_iter().all(|s| s));
    }

    #[test]
    fn difference_quotient_of_identity_is_one() {
        let z = Series::variable(5);
        let dq = BiSeries::difference_quotient(&z, 4).unwrap();
        assert_eq!(dq.get(0, 0), ONE);
        for d in 1..=4 {
            for p in 0..=d {
                assert_eq!(dq.get(p, d - p), ZERO);
            }
        }
    }

    #[test]
    fn difference_quotient_needs_next_coefficient() {
        let f = Series::variable(4);
        assert!(matches!(
            BiSeries::difference_quotient(&f, 4),
            Err(Error::InsufficientOrder { needed: 5, got: 4, .. })
        ));
    }

    #[test]
    fn log_of_one_minus_tz() {
        // log(1 - t z) = -sum (tz)^k / k
        let mut s = BiSeries::zero(8);
        s.set(0, 0, ONE);
        s.set(1, 1, -ONE);
        let l = s.log().unwrap();
        assert!(l.max_abs_diff(&s.log_power_sum().unwrap()) < 1e-15);
        for p in 0..=4 {
            for q in 0..=(8 - p) {
                let expected = if p == q && p >= 1 { -1.0 / p as f64 } else { 0.0 };
                assert!((l.get(p, q) - Complex64::new(expected, 0.0)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn mul_matches_brute_force() {
        let mut a = BiSeries::zero(4);
        let mut b = BiSeries::zero(4);
        a.set(0, 0, ONE);
        a.set(1, 0, Complex64::new(2.0, 0.0));
        a.set(0, 2, Complex64::new(0.0, 1.0));
        b.set(0, 0, ONE);
        b.set(1, 1, Complex64::new(-1.0, 0.0));
        b.set(2, 0, Complex64::new(3.0, 0.0));
        let c = a.mul(&b);
        // (1 + 2t + i z^2)(1 - tz + 3t^2)
        assert_eq!(c.get(0, 0), ONE);
        assert_eq!(c.get(1, 0), Complex64::new(2.0, 0.0));
        assert_eq!(c.get(2, 0), Complex64::new(3.0, 0.0));
        assert_eq!(c.get(3, 0), Complex64::new(6.0, 0.0));
        assert_eq!(c.get(2, 1), Complex64::new(-2.0, 0.0));
        assert_eq!(c.get(1, 3), Complex64::new(0.0, -1.0));
        assert_eq!(c.get(2, 2), Complex64::new(0.0, 3.0));
        assert_eq!(c.get(1, 1), Complex64::new(-1.0, 0.0));
    }

    #[test]
    fn log_rejects_bad_constant() {
        assert!(BiSeries::zero(3).log().is_err());
        assert!(BiSeries::zero(3).log_power_sum().is_err());
    }

    #[test]
    fn recurrence_agrees_with_power_sum() {
        // difference quotient of a polynomial with small coefficients
        let f = Series::new(vec![
            ZERO,
            ONE,
            Complex64::new(0.3, -0.2),
            Complex64::new(-0.1, 0.25),
            Complex64::new(0.05, 0.0),
            Complex64::new(0.0, -0.12),
            Complex64::new(0.07, 0.01),
            Complex64::new(-0.02, 0.03),
            Complex64::new(0.01, 0.0),
            Complex64::new(0.0, 0.004),
        ])
        .unwrap();
        let dq = BiSeries::difference_quotient(&f, 8).unwrap();
        let a = dq.log().unwrap();
        let b = dq.log_power_sum().unwrap();
        assert!(a.max_abs_diff(&b) < 1e-14);
    }

    #[test]
    fn log_of_koebe_quotient() {
        // (k(t) - k(z))/(t - z) = (1 - tz) / ((1 - t)^2 (1 - z)^2)
        let koebe = Series::from_real(&(0..=15).map(|n| n as f64).collect::<Vec<_>>()).unwrap();
        let l = BiSeries::difference_quotient(&koebe, 14).unwrap().log().unwrap();
        for p in 0..=7 {
            for q in 0..=7 {
                let expected = match (p, q) {
                    (0, 0) => 0.0,
                    (p, 0) => 2.0 / p as f64,
                    (0, q) => 2.0 / q as f64,
                    (p, q) if p == q => -1.0 / p as f64,
                    _ => 0.0,
                };
                assert!((l.get(p, q) - Complex64::new(expected, 0.0)).norm() < 1e-13);
            }
        }
    }
}

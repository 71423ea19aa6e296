//! Logarithmic coefficients, Grunsky tables and the coefficient identities
//! that tie them together.
//!
//! For a normalized `f`, the logarithmic coefficients are defined by
//! `log(f(z)/z) = 2 Σ γ_n z^n` and the Grunsky coefficients by
//! `log((f(t) - f(z))/(t - z)) = Σ ω_{p,q} t^p z^q`. The odd-index table of
//! the square-root transform `f_2(z) = sqrt(f(z^2))` expresses the low Taylor
//! coefficients of `f` polynomially; [`verify_coefficient_relations`] and
//! [`verify_gamma_omega`] check those expressions against the series route.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::biseries::BiSeries;
use crate::error::{Error, Result};
use crate::series::Series;
use crate::zoo::sqrt_transform;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Largest odd index the identity checks read (`ω_{1,7}`, `ω_{3,5}`).
pub const IDENTITY_ODD_PMAX: usize = 7;

/// Smallest order of `f` for which the identity checks are defined.
pub const IDENTITY_MIN_ORDER: usize = 8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogCoeffs {
    pub n_max: usize,
    /// `gamma[k]` is `γ_{k+1}`.
    pub gamma: Vec<Complex64>,
}

impl LogCoeffs {
    /// `γ_n` for `1 <= n <= n_max`.
    pub fn get(&self, n: usize) -> Complex64 {
        assert!(n >= 1 && n <= self.n_max, "γ_{n} outside 1..={}", self.n_max);
        self.gamma[n - 1]
    }
}

fn require_normalized(f: &Series) -> Result<()> {
    if f.is_normalized() {
        Ok(())
    } else {
        Err(Error::NotNormalized)
    }
}

/// `γ_n = ½ [z^n] log(f(z)/z)` for `n = 1..=n_max`; needs `a_{n_max+1}`.
pub fn log_coefficients(f: &Series, n_max: usize) -> Result<LogCoeffs> {
    require_normalized(f)?;
    if f.order() < n_max + 1 {
        return Err(Error::InsufficientOrder {
            op: "log_coefficients",
            needed: n_max + 1,
            got: f.order(),
        });
    }
    let quotient = Series::new(f.coeffs()[1..=n_max + 1].to_vec())?;
    let l = quotient.log()?;
    Ok(LogCoeffs {
        n_max,
        gamma: (1..=n_max).map(|n| l.coeff(n) * 0.5).collect(),
    })
}

/// Closed forms of `γ_1..γ_4` in the Taylor coefficients `a_2..a_5`.
pub fn gamma_from_taylor(
    a2: Complex64,
    a3: Complex64,
    a4: Complex64,
    a5: Complex64,
) -> [Complex64; 4] {
    let g1 = a2 / 2.0;
    let g2 = (a3 - a2 * a2 / 2.0) / 2.0;
    let g3 = (a4 - a2 * a3 + a2.powu(3) / 3.0) / 2.0;
    let g4 = (a5 - a2 * a4 - a3 * a3 / 2.0 + a2 * a2 * a3 - a2.powu(4) / 4.0) / 2.0;
    [g1, g2, g3, g4]
}

/// Symmetric table of `ω_{p,q}`, `0 <= p, q <= p_max`, with `ω_{0,0} = 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrunskyTable {
    pub p_max: usize,
    /// Set for the odd-index table of a square-root transform; entries with
    /// an even index `>= 2` are then absent.
    pub odd_only: bool,
    /// Largest `|ω_{p,q} - ω_{q,p}|` seen before symmetrization.
    pub asymmetry: f64,
    omega: Vec<Option<Complex64>>,
}

impl GrunskyTable {
    /// `ω_{p,q}` if it is stored.
    pub fn get(&self, p: usize, q: usize) -> Option<Complex64> {
        if p > self.p_max || q > self.p_max {
            return None;
        }
        self.omega[p * (self.p_max + 1) + q]
    }

    /// `ω_{p,q}`; panics if the entry is not stored.
    pub fn omega(&self, p: usize, q: usize) -> Complex64 {
        self.get(p, q)
            .unwrap_or_else(|| panic!("ω_({p},{q}) is not stored in this table"))
    }

    /// Stored entries in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        let n = self.p_max + 1;
        self.omega
            .iter()
            .enumerate()
            .filter_map(move |(i, w)| w.map(|w| (i / n, i % n, w)))
    }

    fn restrict_to_odd(mut self) -> GrunskyTable {
        let n = self.p_max + 1;
        for (i, w) in self.omega.iter_mut().enumerate() {
            let (p, q) = (i / n, i % n);
            let even = |k: usize| k >= 2 && k % 2 == 0;
            if even(p) || even(q) {
                *w = None;
            }
        }
        self.odd_only = true;
        self
    }
}

/// Grunsky coefficients of `f` from the bivariate logarithm of its exact
/// difference quotient. Needs `f.order() >= 2 * p_max + 1`.
pub fn grunsky_table(f: &Series, p_max: usize) -> Result<GrunskyTable> {
    require_normalized(f)?;
    let needed = 2 * p_max + 1;
    if f.order() < needed {
        return Err(Error::InsufficientOrder {
            op: "grunsky_table",
            needed,
            got: f.order(),
        });
    }
    let log = BiSeries::difference_quotient(f, 2 * p_max)?.log()?;
    if !log.is_finite() {
        return Err(Error::NonFinite { index: 0 });
    }

    let n = p_max + 1;
    let mut omega = vec![None; n * n];
    let mut asymmetry: f64 = 0.0;
    for p in 0..n {
        for q in 0..n {
            let (a, b) = (log.get(p, q), log.get(q, p));
            asymmetry = asymmetry.max((a - b).norm());
            omega[p * n + q] = Some(if p == 0 && q == 0 { ZERO } else { (a + b) * 0.5 });
        }
    }
    // exact symmetry as stored
    for p in 0..n {
        for q in 0..p {
            omega[p * n + q] = omega[q * n + p];
        }
    }
    Ok(GrunskyTable {
        p_max,
        odd_only: false,
        asymmetry,
        omega,
    })
}

/// Odd-index table `ω_{2p-1,2q-1}` of `f_2 = sqrt(f(z^2))`, stored at the
/// odd indices up to `p_max_odd`.
pub fn odd_grunsky(f: &Series, p_max_odd: usize) -> Result<GrunskyTable> {
    require_normalized(f)?;
    let f2 = sqrt_transform(f)?;
    if f2.order() < 2 * p_max_odd + 1 {
        return Err(Error::InsufficientOrder {
            op: "odd_grunsky",
            needed: p_max_odd + 1,
            got: f.order(),
        });
    }
    Ok(grunsky_table(&f2, p_max_odd)?.restrict_to_odd())
}

/// Named residual of one identity or inequality.
///
/// For inequalities `lhs <= rhs` the residual is `lhs - rhs`, so a
/// negative value is a margin and `pass` reads `residual <= tol` either way.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Residual {
    pub relation_id: String,
    pub residual: f64,
    pub tol: f64,
    pub pass: bool,
}

impl Residual {
    pub fn new(relation_id: impl Into<String>, residual: f64, tol: f64) -> Self {
        Residual {
            relation_id: relation_id.into(),
            residual,
            tol,
            pass: residual <= tol,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RelationReport {
    pub residuals: Vec<Residual>,
    pub pass: bool,
}

impl RelationReport {
    fn new(residuals: Vec<Residual>) -> Self {
        let pass = residuals.iter().all(|r| r.pass);
        RelationReport { residuals, pass }
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals
            .iter()
            .map(|r| r.residual)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

fn identity_table(f: &Series, op: &'static str) -> Result<GrunskyTable> {
    require_normalized(f)?;
    if f.order() < IDENTITY_MIN_ORDER {
        return Err(Error::InsufficientOrder {
            op,
            needed: IDENTITY_MIN_ORDER,
            got: f.order(),
        });
    }
    odd_grunsky(f, IDENTITY_ODD_PMAX)
}

/// Low odd-index coefficients read from an odd table.
#[derive(Clone, Copy, Debug)]
pub struct OddOmegas {
    pub w11: Complex64,
    pub w13: Complex64,
    pub w15: Complex64,
    pub w17: Complex64,
    pub w33: Complex64,
    pub w35: Complex64,
}

impl OddOmegas {
    pub fn from_table(t: &GrunskyTable) -> Self {
        OddOmegas {
            w11: t.omega(1, 1),
            w13: t.omega(1, 3),
            w15: t.omega(1, 5),
            w17: t.omega(1, 7),
            w33: t.omega(3, 3),
            w35: t.omega(3, 5),
        }
    }

    /// `a_2..a_5` expressed through the odd table.
    pub fn taylor(&self) -> [Complex64; 4] {
        let OddOmegas {
            w11,
            w13,
            w33,
            w35,
            ..
        } = *self;
        let a2 = w11 * 2.0;
        let a3 = w13 * 2.0 + w11 * w11 * 3.0;
        let a4 = w33 * 2.0 + w11 * w13 * 8.0 + w11.powu(3) * (10.0 / 3.0);
        let a5 = w35 * 2.0
            + w11 * w33 * 8.0
            + w13 * w13 * 5.0
            + w11 * w11 * w13 * 18.0
            + w11.powu(4) * (7.0 / 3.0);
        [a2, a3, a4, a5]
    }

    /// Right-hand sides of the two relations that vanish identically.
    pub fn vanishing(&self) -> [Complex64; 2] {
        let OddOmegas {
            w11,
            w13,
            w15,
            w17,
            w33,
            w35,
        } = *self;
        [
            w15 * 3.0 - w11 * w13 * 3.0 + w11.powu(3) - w33 * 3.0,
            w17 - w35 - w11 * w33 - w13 * w13 + w11.powu(4) / 3.0,
        ]
    }

    /// `γ_2, γ_3, γ_4` expressed through the odd table.
    pub fn gammas(&self) -> [Complex64; 3] {
        let OddOmegas {
            w11,
            w13,
            w15,
            w17,
            w33,
            ..
        } = *self;
        [
            w13 + w11 * w11 * 0.5,
            w33 + w11 * w13 * 2.0,
            w17 + w11 * w15 + w11 * w11 * w13 + w13 * w13 * 0.5 + w11.powu(4) * 0.25,
        ]
    }

    /// `ω_{3,3}` recovered from the first vanishing relation.
    pub fn w33_from_w15(&self) -> Complex64 {
        self.w15 - self.w11 * self.w13 + self.w11.powu(3) / 3.0
    }

    /// Slacks of the nested bounds on `|ω_11|, |ω_13|, |ω_15|, |ω_17|` that
    /// follow from the Grunsky inequality with `x_1 = 1`.
    pub fn nested_bound_slacks(&self) -> [f64; 4] {
        let m11 = self.w11.norm_sqr();
        let m13 = self.w13.norm_sqr();
        let m15 = self.w15.norm_sqr();
        let rad = |x: f64| x.max(0.0).sqrt();
        [
            1.0 - self.w11.norm(),
            rad((1.0 - m11) / 3.0) - self.w13.norm(),
            rad((1.0 - m11 - 3.0 * m13) / 5.0) - self.w15.norm(),
            rad((1.0 - m11 - 3.0 * m13 - 5.0 * m15) / 7.0) - self.w17.norm(),
        ]
    }
}

/// Residuals of the six polynomial relations between `a_2..a_5` and the odd
/// Grunsky table (the `a_5` relation carries the `5 ω_13^2` term).
pub fn verify_coefficient_relations(f: &Series, tol: f64) -> Result<RelationReport> {
    let table = identity_table(f, "verify_coefficient_relations")?;
    let w = OddOmegas::from_table(&table);
    let taylor = w.taylor();
    let mut residuals: Vec<Residual> = ["a2", "a3", "a4", "a5"]
        .iter()
        .zip(taylor)
        .enumerate()
        .map(|(i, (id, a))| Residual::new(*id, (f.coeff(i + 2) - a).norm(), tol))
        .collect();
    let [z1, z2] = w.vanishing();
    residuals.push(Residual::new("vanishing_omega15", z1.norm(), tol));
    residuals.push(Residual::new("vanishing_omega17", z2.norm(), tol));
    Ok(RelationReport::new(residuals))
}

/// `|γ_k(series) - γ_k(odd table)|` for `k = 2, 3, 4`.
pub fn verify_gamma_omega(f: &Series, tol: f64) -> Result<RelationReport> {
    let table = identity_table(f, "verify_gamma_omega")?;
    let gamma = log_coefficients(f, 4)?;
    let from_omega = OddOmegas::from_table(&table).gammas();
    let residuals = ["gamma2_omega", "gamma3_omega", "gamma4_omega"]
        .iter()
        .zip(from_omega)
        .enumerate()
        .map(|(i, (id, g))| Residual::new(*id, (gamma.get(i + 2) - g).norm(), tol))
        .collect();
    Ok(RelationReport::new(residuals))
}

/// Finitely supported vector `x_p` over odd indices.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestVector {
    entries: BTreeMap<usize, Complex64>,
}

impl TestVector {
    pub fn new(entries: BTreeMap<usize, Complex64>) -> Result<Self> {
        if let Some(p) = entries.keys().find(|&&p| p % 2 == 0) {
            return Err(Error::InvalidParameter(format!(
                "test vector index {p} is not odd"
            )));
        }
        if !entries.values().any(|x| *x != ZERO) {
            return Err(Error::InvalidParameter(
                "test vector needs a nonzero entry".into(),
            ));
        }
        Ok(TestVector { entries })
    }

    pub fn unit(p: usize) -> Result<Self> {
        TestVector::new(BTreeMap::from([(p, Complex64::new(1.0, 0.0))]))
    }

    pub fn entries(&self) -> &BTreeMap<usize, Complex64> {
        &self.entries
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FormSlack {
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
}

/// Odd Grunsky quadratic form at `x`, with the outer sum cut at the table range:
/// `lhs = Σ_q q |Σ_p ω_{p,q} x_p|^2`, `rhs = Σ_p |x_p|^2 / p` over odd `p, q`.
pub fn quadratic_form_slack(t: &GrunskyTable, x: &TestVector) -> Result<FormSlack> {
    if !t.odd_only {
        return Err(Error::InvalidParameter(
            "quadratic form needs an odd-index table".into(),
        ));
    }
    if let Some(&p) = x.entries.keys().find(|&&p| p > t.p_max) {
        return Err(Error::SupportOutsideTable { index: p, p_max: t.p_max });
    }
    let lhs = (1..=t.p_max)
        .step_by(2)
        .map(|q| {
            let inner: Complex64 = x.entries.iter().map(|(&p, &xp)| t.omega(p, q) * xp).sum();
            q as f64 * inner.norm_sqr()
        })
        .sum::<f64>();
    let rhs = x
        .entries
        .iter()
        .map(|(&p, xp)| xp.norm_sqr() / p as f64)
        .sum::<f64>();
    Ok(FormSlack {
        lhs,
        rhs,
        slack: rhs - lhs,
    })
}

//! Normalized univalent functions built from classical families and
//! class-preserving transforms.
//!
//! Every transform here (rotation, dilation, disk automorphism) is a
//! pre-composition with a Möbius self-map of the disk followed by an affine
//! renormalization. [`realize`] therefore keeps the accumulated pre-map as a
//! single Möbius matrix and expands the closed form of the base family around
//! its image, which is exact to rounding at any order. The standalone
//! [`rotate`], [`dilate`] and [`automorph`] operate on plain truncated series.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::Series;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Transform list cap used by [`realize`].
pub const DEFAULT_TRANSFORM_CAP: usize = 8;

/// Extra input terms [`automorph`] requires beyond the requested output order.
pub const AUTOMORPH_GUARD: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Family {
    Identity,
    Koebe,
    /// `z/(1-z)`
    Halfplane,
    /// `z/((1 - e^{iθ}z)(1 - e^{-iθ}z))`
    GenKoebe,
    /// `z (1-z)^{-2β}`
    StarlikePow,
}

impl Family {
    pub const ALL: [Family; 5] = [
        Family::Identity,
        Family::Koebe,
        Family::Halfplane,
        Family::GenKoebe,
        Family::StarlikePow,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Family::Identity => "identity",
            Family::Koebe => "koebe",
            Family::Halfplane => "halfplane",
            Family::GenKoebe => "genKoebe",
            Family::StarlikePow => "starlikePow",
        }
    }

    pub fn parse(s: &str) -> Result<Family> {
        Family::ALL
            .into_iter()
            .find(|f| f.as_str() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown family `{s}`")))
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "camelCase")]
pub enum Transform {
    /// `e^{-iθ} f(e^{iθ} z)`
    Rotate { theta: f64 },
    /// `f(r z) / r`
    Dilate { r: f64 },
    /// Koebe transform at the disk point `a`.
    Automorph { a: Complex64 },
}

impl Transform {
    fn validate(&self) -> Result<()> {
        match *self {
            Transform::Rotate { theta } if !theta.is_finite() => {
                Err(Error::InvalidParameter("rotate: theta must be finite".into()))
            }
            Transform::Dilate { r } if !(r > 0.0 && r <= 1.0) => Err(Error::InvalidParameter(
                format!("dilate: r must lie in (0, 1], got {r}"),
            )),
            Transform::Automorph { a } if !(a.norm() < 1.0) => Err(Error::InvalidParameter(
                format!("automorph: |a| must be < 1, got |a| = {}", a.norm()),
            )),
            _ => Ok(()),
        }
    }

    /// Disk self-map `T` such that the transformed function is an affine
    /// image of `f(T(z))`.
    fn premap(&self) -> Mobius {
        match *self {
            Transform::Rotate { theta } => Mobius::new(Complex64::from_polar(1.0, theta), ZERO, ZERO, ONE),
            Transform::Dilate { r } => Mobius::new(Complex64::new(r, 0.0), ZERO, ZERO, ONE),
            Transform::Automorph { a } => Mobius::new(ONE, a, a.conj(), ONE),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FamilySpec {
    pub family: Family,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default)]
    pub transforms: Vec<Transform>,
}

impl FamilySpec {
    pub fn new(family: Family) -> Self {
        FamilySpec {
            family,
            theta: None,
            beta: None,
            transforms: Vec::new(),
        }
    }

    pub fn gen_koebe(theta: f64) -> Self {
        FamilySpec {
            theta: Some(theta),
            ..FamilySpec::new(Family::GenKoebe)
        }
    }

    pub fn starlike_pow(beta: f64) -> Self {
        FamilySpec {
            beta: Some(beta),
            ..FamilySpec::new(Family::StarlikePow)
        }
    }

    pub fn with_transform(mut self, t: Transform) -> Self {
        self.transforms.push(t);
        self
    }

    pub fn validate(&self, transform_cap: usize) -> Result<()> {
        match self.family {
            Family::GenKoebe => match self.theta {
                Some(t) if t.is_finite() => {}
                _ => {
                    return Err(Error::InvalidParameter(
                        "genKoebe: theta is required and must be finite".into(),
                    ))
                }
            },
            Family::StarlikePow => match self.beta {
                Some(b) if (0.0..=1.0).contains(&b) => {}
                Some(b) => {
                    return Err(Error::InvalidParameter(format!(
                        "starlikePow: beta must lie in [0, 1], got {b}"
                    )))
                }
                None => return Err(Error::InvalidParameter("starlikePow: beta is required".into())),
            },
            _ => {}
        }
        if self.transforms.len() > transform_cap {
            return Err(Error::InvalidParameter(format!(
                "transform list has {} entries, cap is {transform_cap}",
                self.transforms.len()
            )));
        }
        self.transforms.iter().try_for_each(Transform::validate)
    }
}

/// `z ↦ (p z + q) / (r z + s)`
#[derive(Clone, Copy, Debug, PartialEq)]
struct Mobius {
    p: Complex64,
    q: Complex64,
    r: Complex64,
    s: Complex64,
}

impl Mobius {
    fn new(p: Complex64, q: Complex64, r: Complex64, s: Complex64) -> Self {
        Mobius { p, q, r, s }
    }

    fn identity() -> Self {
        Mobius::new(ONE, ZERO, ZERO, ONE)
    }

    /// `self ∘ inner`
    fn then_inner(&self, inner: &Mobius) -> Mobius {
        Mobius::new(
            self.p * inner.p + self.q * inner.r,
            self.p * inner.q + self.q * inner.s,
            self.r * inner.p + self.s * inner.r,
            self.r * inner.q + self.s * inner.s,
        )
    }

    fn expand(&self, order: usize) -> Result<Series> {
        let mut num = Series::zero(order).coeffs().to_vec();
        num[0] = self.q;
        let mut den = num.clone();
        den[0] = self.s;
        if order >= 1 {
            num[1] = self.p;
            den[1] = self.r;
        }
        let num = Series::new(num)?;
        let den = Series::new(den)?;
        Ok(&num * &den.recip()?)
    }
}

/// Expansion of the base family evaluated on the series `x`, whose constant
/// term lies in the open unit disk.
fn base_at(spec: &FamilySpec, x: &Series) -> Result<Series> {
    let order = x.order();
    let one_minus_x = &Series::one(order) - x;
    let out = match spec.family {
        Family::Identity => x.clone(),
        Family::Koebe => x * &(&one_minus_x * &one_minus_x).recip()?,
        Family::Halfplane => x * &one_minus_x.recip()?,
        Family::GenKoebe => {
            let c = 2.0 * spec.theta.unwrap_or(0.0).cos();
            let den = &(&Series::one(order) - &x.scale(Complex64::new(c, 0.0))) + &(x * x);
            x * &den.recip()?
        }
        Family::StarlikePow => {
            let beta = spec.beta.unwrap_or(0.0);
            x * &one_minus_x.powf(-2.0 * beta)?
        }
    };
    Ok(out)
}

/// Removes the constant and divides by the linear coefficient so that
/// `g(0) = 0` and `g'(0) = 1` hold bit-exactly.
fn renormalize(h: &Series) -> Result<Series> {
    let h1 = h.coeff(1);
    if h1 == ZERO || !h1.is_finite() {
        return Err(Error::InvalidParameter(
            "degenerate derivative at the origin".into(),
        ));
    }
    let inv = h1.inv();
    let mut c: Vec<Complex64> = h.coeffs().iter().map(|&x| x * inv).collect();
    c[0] = ZERO;
    c[1] = ONE;
    Series::new(c)
}

/// Normalized series of `spec` to the given order.
pub fn realize(spec: &FamilySpec, order: usize) -> Result<Series> {
    if order < 1 {
        return Err(Error::InvalidParameter("order must be at least 1".into()));
    }
    spec.validate(DEFAULT_TRANSFORM_CAP)?;

    let premap = spec
        .transforms
        .iter()
        .fold(Mobius::identity(), |m, t| m.then_inner(&t.premap()));
    let x = premap.expand(order)?;
    let h = base_at(spec, &x)?;
    renormalize(&h)
}

fn require_normalized(f: &Series) -> Result<()> {
    if f.is_normalized() {
        Ok(())
    } else {
        Err(Error::NotNormalized)
    }
}

/// `e^{-iθ} f(e^{iθ} z)`: `a_n ↦ e^{i(n-1)θ} a_n`.
pub fn rotate(f: &Series, theta: f64) -> Result<Series> {
    require_normalized(f)?;
    Transform::Rotate { theta }.validate()?;
    let c = f
        .coeffs()
        .iter()
        .enumerate()
        .map(|(n, &a)| match n {
            0 | 1 => a,
            _ => a * Complex64::from_polar(1.0, (n - 1) as f64 * theta),
        })
        .collect();
    Series::new(c)
}

/// `f(r z) / r`: `a_n ↦ r^{n-1} a_n`.
pub fn dilate(f: &Series, r: f64) -> Result<Series> {
    require_normalized(f)?;
    Transform::Dilate { r }.validate()?;
    let c = f
        .coeffs()
        .iter()
        .enumerate()
        .map(|(n, &a)| match n {
            0 | 1 => a,
            _ => a * r.powi(n as i32 - 1),
        })
        .collect();
    Series::new(c)
}

/// Koebe transform `(f(T(z)) - f(a)) / ((1 - |a|^2) f'(a))` with
/// `T(z) = (z + a)/(1 + ā z)`, treating `f` as the polynomial it stores.
///
/// The Taylor coefficients of `f` at `a` are those of the stored polynomial,
/// so the result is only as good as the truncation of `f` near `|z| = |a|`.
/// Requires `f.order() >= order + AUTOMORPH_GUARD`.
pub fn automorph(f: &Series, a: Complex64, order: usize) -> Result<Series> {
    require_normalized(f)?;
    Transform::Automorph { a }.validate()?;
    if f.order() < order + AUTOMORPH_GUARD {
        return Err(Error::InsufficientOrder {
            op: "automorph",
            needed: order + AUTOMORPH_GUARD,
            got: f.order(),
        });
    }

    // Taylor shift of the polynomial to the center a (synthetic division).
    let mut shifted = f.coeffs().to_vec();
    let n = shifted.len() - 1;
    for i in 0..n {
        for j in (i..n).rev() {
            let next = shifted[j + 1];
            shifted[j] += a * next;
        }
    }
    // drop f(a); the linear coefficient (1 - |a|^2) f'(a) is divided out below
    shifted[0] = ZERO;
    let around_a = Series::new(shifted)?;

    // T(z) - a = (1 - |a|^2) z / (1 + ā z)
    let k = 1.0 - a.norm_sqr();
    let mut w = vec![ZERO; order + 1];
    let mut term = Complex64::new(k, 0.0);
    for c in w.iter_mut().skip(1) {
        *c = term;
        term *= -a.conj();
    }
    let w = Series::new(w)?;

    renormalize(&around_a.compose(&w)?)
}

/// `f_2(z) = sqrt(f(z^2))`, the odd function of order `2 * f.order()`.
pub fn sqrt_transform(f: &Series) -> Result<Series> {
    require_normalized(f)?;
    let n = f.order();
    // f(z^2) = z^2 u(z^2) with u = f/z of order n - 1
    let mut u_sq = vec![ZERO; 2 * n - 1];
    for k in 0..n {
        u_sq[2 * k] = f.coeff(k + 1);
    }
    let s = Series::new(u_sq)?.sqrt()?;
    let mut out = vec![ZERO; 2 * n + 1];
    for (k, &c) in s.coeffs().iter().enumerate() {
        out[k + 1] = if k % 2 == 0 { c } else { ZERO };
    }
    Series::new(out)
}

/// Uniformly spaced genKoebe angles `π i / size`, `i = 0..size`.
pub fn theta_grid(size: usize) -> Vec<f64> {
    (0..size).map(|i| PI * i as f64 / size as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn koebe(order: usize) -> Series {
        realize(&FamilySpec::new(Family::Koebe), order).unwrap()
    }

    /// Binomial expansion of z (1-z)^-2: a_n = n.
    fn koebe_exact(order: usize) -> Series {
        Series::from_real(&(0..=order).map(|n| n as f64).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn identity_family() {
        let f = realize(&FamilySpec::new(Family::Identity), 10).unwrap();
        assert_eq!(f, Series::variable(10));
    }

    #[test]
    fn koebe_family() {
        let f = koebe(20);
        assert!(f.max_abs_diff(&koebe_exact(20)) < 1e-12);
    }

    #[test]
    fn halfplane_family() {
        let f = realize(&FamilySpec::new(Family::Halfplane), 10).unwrap();
        for n in 1..=10 {
            assert!((f.coeff(n) - ONE).norm() < 1e-14);
        }
    }

    #[test]
    fn gen_koebe_second_coefficient() {
        for theta in [0.0, 0.4, 1.3, PI / 2.0, 2.9] {
            let f = realize(&FamilySpec::gen_koebe(theta), 8).unwrap();
            assert!((f.coeff(2) - c(2.0 * theta.cos(), 0.0)).norm() < 1e-14);
        }
        // θ = 0 is the Koebe function
        let f = realize(&FamilySpec::gen_koebe(0.0), 12).unwrap();
        assert!(f.max_abs_diff(&koebe_exact(12)) < 1e-11);
    }

    #[test]
    fn starlike_pow_endpoints() {
        let id = realize(&FamilySpec::starlike_pow(0.0), 8).unwrap();
        assert!(id.max_abs_diff(&Series::variable(8)) < 1e-15);
        let k = realize(&FamilySpec::starlike_pow(1.0), 12).unwrap();
        assert!(k.max_abs_diff(&koebe_exact(12)) < 1e-11);
    }

    #[test]
    fn realize_rejects_bad_parameters() {
        let e = realize(&FamilySpec::starlike_pow(1.5), 8).unwrap_err();
        assert!(e.to_string().contains("beta"));
        let e = realize(&FamilySpec::new(Family::GenKoebe), 8).unwrap_err();
        assert!(e.to_string().contains("theta"));
        let spec = FamilySpec::new(Family::Koebe).with_transform(Transform::Dilate { r: 1.5 });
        assert!(realize(&spec, 8).unwrap_err().to_string().contains("dilate"));
        let spec = FamilySpec::new(Family::Koebe).with_transform(Transform::Automorph { a: c(0.6, 0.8) });
        assert!(realize(&spec, 8).unwrap_err().to_string().contains("automorph"));
        assert!(realize(&FamilySpec::new(Family::Koebe), 0).is_err());
        let mut spec = FamilySpec::new(Family::Koebe);
        spec.transforms = vec![Transform::Rotate { theta: 0.1 }; 3];
        assert!(spec.validate(2).is_err());
        assert!(spec.validate(3).is_ok());
    }

    #[test]
    fn rotate_rules() {
        let f = koebe(10);
        assert_eq!(rotate(&f, 0.0).unwrap(), f);
        let theta = 0.77;
        let g = rotate(&f, theta).unwrap();
        assert!((g.coeff(2) - Complex64::from_polar(2.0, theta)).norm() < 1e-14);
        assert!(rotate(&Series::geometric(4), 0.3).is_err());
    }

    #[test]
    fn dilate_rules() {
        let f = koebe(10);
        assert_eq!(dilate(&f, 1.0).unwrap(), f);
        let g = dilate(&f, 0.5).unwrap();
        for n in 1..=10 {
            assert_eq!(g.coeff(n), f.coeff(n) * 0.5f64.powi(n as i32 - 1));
        }
        assert!(dilate(&f, 0.0).is_err());
        assert!(dilate(&f, 1.01).is_err());
    }

    #[test]
    fn realized_transforms_match_series_transforms() {
        let base = FamilySpec::gen_koebe(0.9);
        let f = realize(&base, 14).unwrap();
        let spec = base
            .clone()
            .with_transform(Transform::Rotate { theta: 1.1 })
            .with_transform(Transform::Dilate { r: 0.7 });
        let direct = realize(&spec, 14).unwrap();
        let via_series = dilate(&rotate(&f, 1.1).unwrap(), 0.7).unwrap();
        assert!(direct.max_abs_diff(&via_series) < 1e-13);
    }

    #[test]
    fn automorph_identity_point() {
        let f = koebe(12);
        let g = automorph(&f, ZERO, 8).unwrap();
        assert!(g.max_abs_diff(&f.truncate(8)) < 1e-15);
    }

    #[test]
    fn automorph_koebe_half() {
        // a2(g) = (1-|a|^2) f''(a) / (2 f'(a)) - conj(a), f'(1/2) = 12, f''(1/2) = 80
        let a = c(0.5, 0.0);
        let expected = 0.75 * 80.0 / (2.0 * 12.0) - 0.5;
        assert_eq!(expected, 2.0);

        let exact = realize(&FamilySpec::new(Family::Koebe).with_transform(Transform::Automorph { a }), 10).unwrap();
        assert!((exact.coeff(2) - c(expected, 0.0)).norm() < 1e-12);

        // series route on a long polynomial truncation
        let g = automorph(&koebe_exact(160), a, 10).unwrap();
        assert!((g.coeff(2) - c(expected, 0.0)).norm() < 1e-10);
        assert!(g.max_abs_diff(&exact) < 1e-9);
    }

    #[test]
    fn automorph_series_route_converges_under_doubling() {
        let a = c(0.3, -0.4);
        let spec = FamilySpec::gen_koebe(1.2);
        let exact = realize(&spec.clone().with_transform(Transform::Automorph { a }), 12).unwrap();
        let coarse = automorph(&realize(&spec, 80).unwrap(), a, 12).unwrap();
        let fine = automorph(&realize(&spec, 160).unwrap(), a, 12).unwrap();
        assert!(coarse.max_abs_diff(&fine) < 1e-9);
        assert!(fine.max_abs_diff(&exact) < 1e-10);
    }

    #[test]
    fn automorph_errors() {
        let f = koebe(10);
        assert!(automorph(&f, c(1.0, 0.0), 4).is_err());
        assert!(matches!(
            automorph(&f, c(0.1, 0.0), 8),
            Err(Error::InsufficientOrder { needed: 12, got: 10, .. })
        ));
        assert!(automorph(&Series::geometric(12), c(0.1, 0.0), 4).is_err());
    }

    #[test]
    fn transforms_keep_normalization_exact() {
        let spec = FamilySpec::starlike_pow(0.35)
            .with_transform(Transform::Automorph { a: c(0.5, 0.6) })
            .with_transform(Transform::Rotate { theta: 2.0 });
        let g = realize(&spec, 16).unwrap();
        assert_eq!(g.coeff(0), ZERO);
        assert_eq!(g.coeff(1), ONE);
    }

    #[test]
    fn sqrt_transform_cases() {
        let id = sqrt_transform(&Series::variable(6)).unwrap();
        assert_eq!(id, Series::variable(12));

        // sqrt(z^2/(1-z^2)^2) = z/(1-z^2)
        let f2 = sqrt_transform(&koebe(10)).unwrap();
        assert_eq!(f2.order(), 20);
        for k in 0..=20 {
            let expected = if k % 2 == 1 { 1.0 } else { 0.0 };
            assert!((f2.coeff(k) - c(expected, 0.0)).norm() < 1e-12, "k = {k}");
        }
        assert!(sqrt_transform(&Series::geometric(4)).is_err());
    }

    #[test]
    fn sqrt_transform_squares_back() {
        let f = realize(
            &FamilySpec::gen_koebe(2.2).with_transform(Transform::Automorph { a: c(-0.4, 0.2) }),
            12,
        )
        .unwrap();
        let f2 = sqrt_transform(&f).unwrap();
        let sq = &f2 * &f2;
        for k in 0..=24 {
            let expected = if k % 2 == 0 { f.coeff(k / 2) } else { ZERO };
            assert!((sq.coeff(k) - expected).norm() < 1e-12);
        }
    }

    #[test]
    fn spec_json_schema() {
        let spec = FamilySpec::gen_koebe(0.5)
            .with_transform(Transform::Rotate { theta: 1.0 })
            .with_transform(Transform::Automorph { a: c(0.25, -0.5) });
        let json = serde_json::to_string(&spec).unwrap();
        assert_eq!(
            json,
            r#"{"family":"genKoebe","theta":0.5,"transforms":[{"kind":"rotate","theta":1.0},{"kind":"automorph","a":[0.25,-0.5]}]}"#
        );
        let back: FamilySpec = serde_json::from_str(&json).unwrap();
        assert_eq!(back, spec);
        let minimal: FamilySpec = serde_json::from_str(r#"{"family":"koebe"}"#).unwrap();
        assert_eq!(minimal, FamilySpec::new(Family::Koebe));
    }
}

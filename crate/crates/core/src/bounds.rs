//! The two auxiliary majorants of the consecutive-difference bounds, their
//! grid maximization, and a step-by-step audit of the estimate chains on a
//! concrete function.

use serde::{Deserialize, Serialize};

use crate::coefficients::{log_coefficients, odd_grunsky, OddOmegas};
use crate::error::{Error, Result};
use crate::series::Series;

/// Negative radicands down to this size are rounding dust and clamp to 0.
pub const RADICAND_TOL: f64 = 1e-12;

/// Values within this distance compare equal in [`maximize`].
pub const TIE_TOL: f64 = 1e-12;

pub const DEFAULT_GRID_STEP: f64 = 1e-3;
pub const DEFAULT_ROUNDS: u32 = 6;

/// Minimum order of `f` accepted by [`chain_slacks`].
pub const CHAIN_MIN_ORDER: usize = 16;

/// A 2-D region `x0 <= x <= x1`, `y0 <= y <= upper(x)` with an objective.
pub trait Objective {
    fn name(&self) -> &'static str;
    fn x_range(&self) -> (f64, f64);
    fn y_lower(&self) -> f64;
    fn y_upper(&self, x: f64) -> f64;
    /// Value at a point of the closed region.
    fn value(&self, x: f64, y: f64) -> f64;

    fn contains(&self, x: f64, y: f64) -> bool {
        let (x0, x1) = self.x_range();
        x >= x0 && x <= x1 && y >= self.y_lower() && y <= self.y_upper(x)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundObjective {
    /// `Φ(u, v)` on `0 <= u <= 1`, `0 <= v <= sqrt((1 - u^2)/3)`.
    Phi,
    /// `Ψ(s, t)` on `0 <= s <= 1`, `0 <= t <= (1 - s)/3`.
    Psi,
}

impl BoundObjective {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "phi" => Ok(BoundObjective::Phi),
            "psi" => Ok(BoundObjective::Psi),
            other => Err(Error::InvalidParameter(format!("unknown objective `{other}`"))),
        }
    }

    /// Closed-form maximum value, attained at the origin.
    pub fn bound(self) -> f64 {
        match self {
            BoundObjective::Phi => 1.0 / 5f64.sqrt(),
            BoundObjective::Psi => 1.0 / 7f64.sqrt(),
        }
    }

    fn radicand(self, x: f64, y: f64) -> f64 {
        match self {
            BoundObjective::Phi => 1.0 - x * x - 3.0 * y * y,
            BoundObjective::Psi => 1.0 - x - 3.0 * y,
        }
    }

    /// Like [`Objective::contains`] but admits rounding dust of `RADICAND_TOL`.
    fn contains_loosely(self, x: f64, y: f64) -> bool {
        x >= -RADICAND_TOL
            && y >= -RADICAND_TOL
            && x <= 1.0 + RADICAND_TOL
            && self.radicand(x, y) >= -RADICAND_TOL
    }

    /// Checked evaluation; points outside the domain beyond the rounding
    /// tolerance are rejected.
    pub fn eval(self, x: f64, y: f64) -> Result<f64> {
        if !(x.is_finite() && y.is_finite() && self.contains_loosely(x, y)) {
            return Err(Error::OutsideDomain {
                objective: self.name(),
                x,
                y,
            });
        }
        Ok(self.value(x, y))
    }
}

impl Objective for BoundObjective {
    fn name(&self) -> &'static str {
        match self {
            BoundObjective::Phi => "phi",
            BoundObjective::Psi => "psi",
        }
    }

    fn x_range(&self) -> (f64, f64) {
        (0.0, 1.0)
    }

    fn y_lower(&self) -> f64 {
        0.0
    }

    fn y_upper(&self, x: f64) -> f64 {
        match self {
            BoundObjective::Phi => ((1.0 - x * x) / 3.0).max(0.0).sqrt(),
            BoundObjective::Psi => ((1.0 - x) / 3.0).max(0.0),
        }
    }

    fn value(&self, x: f64, y: f64) -> f64 {
        let root = self.radicand(x, y).max(0.0).sqrt();
        match self {
            BoundObjective::Phi => root / 5f64.sqrt() + x.powi(3) / 6.0,
            BoundObjective::Psi => root / 7f64.sqrt() + y / 2.0 + x * x / 12.0,
        }
    }
}

/// `Φ(u, v) = sqrt(1 - u^2 - 3 v^2)/sqrt(5) + u^3/6`
pub fn phi(u: f64, v: f64) -> Result<f64> {
    BoundObjective::Phi.eval(u, v)
}

/// `Ψ(s, t) = sqrt(1 - s - 3 t)/sqrt(7) + t/2 + s^2/12`
pub fn psi(s: f64, t: f64) -> Result<f64> {
    BoundObjective::Psi.eval(s, t)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MaxResult {
    pub argmax: (f64, f64),
    pub value: f64,
    pub grid_step: f64,
    pub refinement_rounds: u32,
}

#[derive(Clone, Copy, Debug)]
struct Candidate {
    x: f64,
    y: f64,
    value: f64,
}

impl Candidate {
    fn beats(&self, other: &Candidate) -> bool {
        if self.value > other.value + TIE_TOL {
            return true;
        }
        (self.value - other.value).abs() <= TIE_TOL && (self.x, self.y) < (other.x, other.y)
    }
}

/// Grid points `lo, lo + h, ...` strictly below `hi`, then `hi` itself.
fn axis(lo: f64, hi: f64, h: f64) -> impl Iterator<Item = f64> {
    let n = ((hi - lo) / h).floor().max(0.0) as usize;
    (0..=n)
        .map(move |i| lo + i as f64 * h)
        .filter(move |&v| v < hi)
        .chain(std::iter::once(hi))
}

fn scan_box<O: Objective + ?Sized>(
    obj: &O,
    (x_lo, x_hi): (f64, f64),
    (y_lo, y_hi): (f64, f64),
    h: f64,
    best: &mut Option<Candidate>,
) {
    for x in axis(x_lo, x_hi, h) {
        let top = obj.y_upper(x);
        let lo = y_lo.max(obj.y_lower());
        if lo > top {
            continue;
        }
        let hi = y_hi.min(top);
        for y in axis(lo, hi, h) {
            let cand = Candidate {
                x,
                y,
                value: obj.value(x, y),
            };
            if best.as_ref().map_or(true, |b| cand.beats(b)) {
                *best = Some(cand);
            }
        }
    }
}

/// Dense feasible grid scan (domain boundary included) followed by `rounds`
/// of ten-fold refinement in a shrinking box around the incumbent.
///
/// Ties within `TIE_TOL` go to the lexicographically smallest point.
pub fn maximize<O: Objective + ?Sized>(obj: &O, grid_step: f64, rounds: u32) -> Result<MaxResult> {
    if !(grid_step > 0.0 && grid_step <= 0.1) {
        return Err(Error::InvalidParameter(format!(
            "grid step must lie in (0, 0.1], got {grid_step}"
        )));
    }
    if rounds < 1 {
        return Err(Error::InvalidParameter("at least one refinement round is required".into()));
    }

    let (x0, x1) = obj.x_range();
    let mut best = None;
    scan_box(obj, (x0, x1), (obj.y_lower(), f64::INFINITY), grid_step, &mut best);

    let mut h = grid_step;
    for _ in 0..rounds {
        let Some(c) = best else { break };
        let xs = ((c.x - h).max(x0), (c.x + h).min(x1));
        let ys = (c.y - h, c.y + h);
        h /= 10.0;
        scan_box(obj, xs, ys, h, &mut best);
    }

    let c = best.ok_or_else(|| Error::InvalidParameter(format!("{} has an empty domain", obj.name())))?;
    Ok(MaxResult {
        argmax: (c.x, c.y),
        value: obj.value(c.x, c.y),
        grid_step,
        refinement_rounds: rounds,
    })
}

/// One inequality `lhs <= rhs` of an estimate chain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainStep {
    pub chain: u8,
    pub step: String,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainAudit {
    pub steps: Vec<ChainStep>,
    /// `| |γ_3 - ω_11 γ_2| - |ω_15 - ω_11^3/6| |`
    pub chain1_equality_residual: f64,
    /// `| |γ_4 - ω_11 γ_3| - |ω_17 + ω_13^2/2 - ω_11^4/12| |`
    pub chain2_equality_residual: f64,
}

impl ChainAudit {
    pub fn min_slack(&self) -> f64 {
        self.steps.iter().map(|s| s.slack).fold(f64::INFINITY, f64::min)
    }

    pub fn min_slack_of(&self, chain: u8) -> f64 {
        self.steps
            .iter()
            .filter(|s| s.chain == chain)
            .map(|s| s.slack)
            .fold(f64::INFINITY, f64::min)
    }
}

fn push_chain(steps: &mut Vec<ChainStep>, chain: u8, values: &[(&str, f64)]) {
    for pair in values.windows(2) {
        let (_, lhs) = pair[0];
        let (label, rhs) = pair[1];
        steps.push(ChainStep {
            chain,
            step: label.to_string(),
            lhs,
            rhs,
            slack: rhs - lhs,
        });
    }
}

/// Evaluates every link of both difference estimates on `f`:
///
/// 1. `|γ_3| - |γ_2| <= |ω_15 - ω_11^3/6| <= |ω_15| + |ω_11|^3/6
///    <= Φ(|ω_11|, |ω_13|) <= 1/sqrt(5)`
/// 2. `|γ_4| - |γ_3| <= |γ_4 - ω_11 γ_3| <= |ω_17| + |ω_13|^2/2 + |ω_11|^4/12
///    <= sqrt(1 - |ω_11|^2 - 3|ω_13|^2 - 5|ω_15|^2)/sqrt(7) + ...
///    <= Ψ(|ω_11|^2, |ω_13|^2) <= 1/sqrt(7)`
///
/// The `γ` values come from the series logarithm, the `ω` values from the
/// odd Grunsky table.
pub fn chain_slacks(f: &Series) -> Result<ChainAudit> {
    if f.order() < CHAIN_MIN_ORDER {
        return Err(Error::InsufficientOrder {
            op: "chain_slacks",
            needed: CHAIN_MIN_ORDER,
            got: f.order(),
        });
    }
    let gamma = log_coefficients(f, 4)?;
    let w = OddOmegas::from_table(&odd_grunsky(f, 7)?);
    let (g2, g3, g4) = (gamma.get(2), gamma.get(3), gamma.get(4));
    let (m11, m13, m15, m17) = (w.w11.norm(), w.w13.norm(), w.w15.norm(), w.w17.norm());

    let mut steps = Vec::new();

    let reduced1 = (w.w15 - w.w11.powu(3) / 6.0).norm();
    let phi_value = phi(m11, m13)?;
    push_chain(
        &mut steps,
        1,
        &[
            ("difference", g3.norm() - g2.norm()),
            ("reverse_triangle", reduced1),
            ("triangle", m15 + m11.powi(3) / 6.0),
            ("omega15_bound", phi_value),
            ("phi_max", BoundObjective::Phi.bound()),
        ],
    );

    let combined = (g4 - w.w11 * g3).norm();
    let reduced2 = (w.w17 + w.w13 * w.w13 * 0.5 - w.w11.powu(4) / 12.0).norm();
    let tail = m13 * m13 / 2.0 + m11.powi(4) / 12.0;
    let with_w15 =
        (1.0 - m11 * m11 - 3.0 * m13 * m13 - 5.0 * m15 * m15).max(0.0).sqrt() / 7f64.sqrt() + tail;
    let psi_value = psi(m11 * m11, m13 * m13)?;
    push_chain(
        &mut steps,
        2,
        &[
            ("difference", g4.norm() - g3.norm()),
            ("reverse_triangle", combined),
            ("triangle", m17 + tail),
            ("omega17_bound", with_w15),
            ("drop_omega15", psi_value),
            ("psi_max", BoundObjective::Psi.bound()),
        ],
    );

    let combined1 = (g3 - w.w11 * g2).norm();
    Ok(ChainAudit {
        steps,
        chain1_equality_residual: (combined1 - reduced1).abs(),
        chain2_equality_residual: (combined - reduced2).abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zoo::{realize, Family, FamilySpec};

    struct ConstantBox(f64);

    impl Objective for ConstantBox {
        fn name(&self) -> &'static str {
            "constant"
        }
        fn x_range(&self) -> (f64, f64) {
            (-0.5, 0.5)
        }
        fn y_lower(&self) -> f64 {
            0.25
        }
        fn y_upper(&self, _x: f64) -> f64 {
            0.75
        }
        fn value(&self, _x: f64, _y: f64) -> f64 {
            self.0
        }
    }

    #[test]
    fn phi_values() {
        assert!((phi(0.0, 0.0).unwrap() - 0.447213595499958).abs() < 1e-15);
        assert!((phi(1.0, 0.0).unwrap() - 1.0 / 6.0).abs() < 1e-15);
        for u in [0.25, 0.5, 0.75] {
            let v = ((1.0 - u * u) / 3.0f64).sqrt();
            assert!((phi(u, v).unwrap() - u * u * u / 6.0).abs() < 1e-9);
        }
    }

    #[test]
    fn psi_values() {
        assert!((psi(0.0, 0.0).unwrap() - 1.0 / 7f64.sqrt()).abs() < 1e-15);
        assert!((psi(1.0, 0.0).unwrap() - 1.0 / 12.0).abs() < 1e-15);
        assert!((psi(0.0, 1.0 / 3.0).unwrap() - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn domain_checks() {
        assert!(phi(1.0 + 1e-13, 0.0).is_ok());
        assert!(phi(1.1, 0.0).is_err());
        assert!(phi(0.5, 0.6).is_err());
        assert!(phi(-0.1, 0.0).is_err());
        assert!(psi(0.5, 0.2).is_err());
        assert!(psi(f64::NAN, 0.0).is_err());
    }

    #[test]
    fn maximize_phi_and_psi() {
        let r = maximize(&BoundObjective::Phi, DEFAULT_GRID_STEP, DEFAULT_ROUNDS).unwrap();
        assert_eq!(r.argmax, (0.0, 0.0));
        assert!((r.value - 0.4472135955).abs() < 1e-6);
        let r = maximize(&BoundObjective::Psi, DEFAULT_GRID_STEP, DEFAULT_ROUNDS).unwrap();
        assert_eq!(r.argmax, (0.0, 0.0));
        assert!((r.value - 0.3779644730).abs() < 1e-6);
        assert_eq!(r.refinement_rounds, DEFAULT_ROUNDS);
    }

    #[test]
    fn maximize_constant_box_picks_lexicographic_corner() {
        let r = maximize(&ConstantBox(2.5), 0.05, 2).unwrap();
        assert_eq!(r.value, 2.5);
        assert_eq!(r.argmax, (-0.5, 0.25));
    }

    #[test]
    fn maximize_rejects_bad_parameters() {
        assert!(maximize(&BoundObjective::Phi, 0.0, 3).is_err());
        assert!(maximize(&BoundObjective::Phi, 0.2, 3).is_err());
        assert!(maximize(&BoundObjective::Phi, 0.01, 0).is_err());
    }

    #[test]
    fn axis_includes_both_ends() {
        let pts: Vec<f64> = axis(0.0, 0.25, 0.1).collect();
        assert_eq!(pts.len(), 4);
        assert_eq!(*pts.last().unwrap(), 0.25);
        let pts: Vec<f64> = axis(0.0, 0.0, 0.1).collect();
        assert_eq!(pts, vec![0.0]);
    }

    #[test]
    fn koebe_chain() {
        let f = realize(&FamilySpec::new(Family::Koebe), 16).unwrap();
        let audit = chain_slacks(&f).unwrap();
        assert!((audit.steps[0].lhs + 1.0 / 6.0).abs() < 1e-12);
        assert!(audit.min_slack() >= -1e-12);
        assert!(audit.chain2_equality_residual <= 1e-10);
        let second = audit.steps.iter().find(|s| s.chain == 2).unwrap();
        assert!((second.rhs - 1.0 / 12.0).abs() < 1e-12);
        assert_eq!(audit.steps.last().unwrap().rhs, 1.0 / 7f64.sqrt());
    }

    #[test]
    fn identity_chain() {
        let f = Series::variable(16);
        let audit = chain_slacks(&f).unwrap();
        for s in &audit.steps {
            if s.step == "difference" {
                assert_eq!(s.lhs, 0.0);
            }
        }
        // first links start from zero, so slack equals the running value
        let first = &audit.steps[0];
        assert_eq!(first.lhs, 0.0);
        assert_eq!(first.slack, first.rhs);
        assert_eq!(audit.chain1_equality_residual, 0.0);
        assert_eq!(audit.chain2_equality_residual, 0.0);
    }

    #[test]
    fn chain_needs_order() {
        let f = realize(&FamilySpec::new(Family::Koebe), 12).unwrap();
        assert!(matches!(
            chain_slacks(&f),
            Err(Error::InsufficientOrder { needed: 16, .. })
        ));
    }
}

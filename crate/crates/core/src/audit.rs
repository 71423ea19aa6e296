//! Per-function identity and inequality audit over a corpus.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{chain_slacks, CHAIN_MIN_ORDER};
use crate::coefficients::{
    grunsky_table, log_coefficients, odd_grunsky, quadratic_form_slack, verify_coefficient_relations,
    verify_gamma_omega, OddOmegas, Residual, TestVector, IDENTITY_ODD_PMAX,
};
use crate::error::{Error, Result};
use crate::scan::{function_id, Skipped};
use crate::series::Series;
use crate::zoo::{realize, FamilySpec};

/// Pre-symmetrization asymmetry and edge-consistency budget.
pub const TABLE_TOL: f64 = 1e-10;

/// Equality link inside the second estimate chain.
pub const CHAIN_EQUALITY_TOL: f64 = 1e-10;

pub const TEST_VECTORS_PER_FUNCTION: usize = 100;

/// Odd indices carrying random test-vector entries.
pub const TEST_VECTOR_SUPPORT: [usize; 4] = [1, 3, 5, 7];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditRecord {
    pub function_id: String,
    #[serde(flatten)]
    pub residual: Residual,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct AuditReport {
    pub records: Vec<AuditRecord>,
    pub skipped: Vec<Skipped>,
}

impl AuditReport {
    pub fn passed(&self) -> bool {
        self.records.iter().all(|r| r.residual.pass)
    }

    /// Largest residual per relation id.
    pub fn worst_by_relation(&self) -> BTreeMap<String, f64> {
        let mut out = BTreeMap::new();
        for r in &self.records {
            let e = out
                .entry(r.residual.relation_id.clone())
                .or_insert(f64::NEG_INFINITY);
            *e = f64::max(*e, r.residual.residual);
        }
        out
    }
}

/// Seeded test vectors supported on `{1, 3, 5, 7}`, entries in the unit square.
pub fn random_test_vectors(rng: &mut impl Rng, count: usize) -> Vec<TestVector> {
    (0..count)
        .map(|_| loop {
            let entries: BTreeMap<usize, Complex64> = TEST_VECTOR_SUPPORT
                .iter()
                .map(|&p| (p, Complex64::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0))))
                .collect();
            if let Ok(x) = TestVector::new(entries) {
                break x;
            }
        })
        .collect()
}

/// Smallest quadratic-form slack over the given vectors.
pub fn min_form_slack(f: &Series, vectors: &[TestVector]) -> Result<f64> {
    let table = odd_grunsky(f, IDENTITY_ODD_PMAX)?;
    vectors.iter().try_fold(f64::INFINITY, |m, x| {
        Ok(m.min(quadratic_form_slack(&table, x)?.slack))
    })
}

/// Every check for one function; inequality residuals are `lhs - rhs`.
pub fn audit_function(f: &Series, tol: f64, rng: &mut impl Rng) -> Result<Vec<Residual>> {
    if f.order() < CHAIN_MIN_ORDER {
        return Err(Error::InsufficientOrder {
            op: "audit",
            needed: CHAIN_MIN_ORDER,
            got: f.order(),
        });
    }
    let mut out = verify_coefficient_relations(f, tol)?.residuals;
    out.extend(verify_gamma_omega(f, tol)?.residuals);

    let odd = odd_grunsky(f, IDENTITY_ODD_PMAX)?;
    let w = OddOmegas::from_table(&odd);
    let bounds = w.nested_bound_slacks();
    for (id, slack) in ["omega11_bound", "omega13_bound", "omega15_bound", "omega17_bound"]
        .iter()
        .zip(bounds)
    {
        out.push(Residual::new(*id, -slack, tol));
    }
    out.push(Residual::new("omega33_relation", (w.w33 - w.w33_from_w15()).norm(), tol));

    let vectors = random_test_vectors(rng, TEST_VECTORS_PER_FUNCTION);
    out.push(Residual::new("grunsky_form", -min_form_slack(f, &vectors)?, tol));
    let unit = quadratic_form_slack(&odd, &TestVector::unit(1)?)?;
    out.push(Residual::new("grunsky_form_unit", -unit.slack, tol));

    let p_max = ((f.order() - 1) / 2).min(IDENTITY_ODD_PMAX);
    let full = grunsky_table(f, p_max)?;
    out.push(Residual::new("odd_table_symmetry", odd.asymmetry, TABLE_TOL));
    out.push(Residual::new("table_symmetry", full.asymmetry, TABLE_TOL));
    let gamma = log_coefficients(f, p_max)?;
    let edge = (1..=p_max)
        .map(|p| (full.omega(p, 0) - gamma.get(p) * 2.0).norm())
        .fold(0.0, f64::max);
    out.push(Residual::new("edge_log_coeff", edge, TABLE_TOL));

    let chains = chain_slacks(f)?;
    out.push(Residual::new("chain1_min_slack", -chains.min_slack_of(1), tol));
    out.push(Residual::new("chain2_min_slack", -chains.min_slack_of(2), tol));
    out.push(Residual::new(
        "chain2_equality",
        chains.chain2_equality_residual,
        CHAIN_EQUALITY_TOL,
    ));
    Ok(out)
}

/// Audits every corpus member at `order`; each member draws its test vectors
/// from its own stream of the seeded generator, so results do not depend on
/// scheduling.
pub fn audit_corpus(corpus: &[FamilySpec], order: usize, tol: f64, seed: u64) -> AuditReport {
    let results: Vec<Result<Vec<Residual>>> = corpus
        .par_iter()
        .enumerate()
        .map(|(i, spec)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let f = realize(spec, order)?;
            audit_function(&f, tol, &mut rng)
        })
        .collect();

    let mut report = AuditReport::default();
    for (i, (spec, r)) in corpus.iter().zip(results).enumerate() {
        match r {
            Ok(residuals) => report.records.extend(residuals.into_iter().map(|residual| AuditRecord {
                function_id: function_id(i),
                residual,
            })),
            Err(e) => report.skipped.push(Skipped {
                function_id: function_id(i),
                spec: spec.clone(),
                reason: e.to_string(),
            }),
        }
    }
    report
}

//! Seeded corpus of normalized univalent functions.

use std::f64::consts::TAU;
use std::path::Path;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::zoo::{theta_grid, Family, FamilySpec, Transform};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct FamilyCounts {
    #[serde(default)]
    pub identity: usize,
    #[serde(default)]
    pub koebe: usize,
    #[serde(default)]
    pub halfplane: usize,
    #[serde(default)]
    pub gen_koebe: usize,
    #[serde(default)]
    pub starlike_pow: usize,
}

impl FamilyCounts {
    pub fn get(&self, family: Family) -> usize {
        match family {
            Family::Identity => self.identity,
            Family::Koebe => self.koebe,
            Family::Halfplane => self.halfplane,
            Family::GenKoebe => self.gen_koebe,
            Family::StarlikePow => self.starlike_pow,
        }
    }

    pub fn total(&self) -> usize {
        Family::ALL.iter().map(|&f| self.get(f)).sum()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct CorpusSpec {
    pub seed: u64,
    pub counts: FamilyCounts,
    /// genKoebe angles are `π i / thetaGridSize`, cycled.
    pub theta_grid_size: usize,
    /// starlikePow exponents, cycled.
    pub beta_set: Vec<f64>,
    /// Dilation radii drawn for `dilate` transforms.
    pub r_set: Vec<f64>,
    /// Automorphism points; each draw is rotated by a random phase.
    pub automorph_points: Vec<Complex64>,
    pub transform_depth_cap: usize,
    /// Working truncation order.
    pub order: usize,
}

impl Default for CorpusSpec {
    fn default() -> Self {
        CorpusSpec {
            seed: 20_240_917,
            counts: FamilyCounts {
                identity: 2,
                koebe: 8,
                halfplane: 8,
                gen_koebe: 20,
                starlike_pow: 22,
            },
            theta_grid_size: 12,
            beta_set: vec![0.1, 0.25, 0.4, 0.5, 0.6, 0.75, 0.9, 1.0],
            r_set: vec![0.5, 0.8, 0.95, 1.0],
            automorph_points: vec![
                Complex64::new(0.3, 0.0),
                Complex64::new(0.5, 0.0),
                Complex64::new(0.8, 0.0),
                Complex64::new(0.3, 0.4),
                Complex64::new(-0.2, 0.6),
            ],
            transform_depth_cap: 2,
            order: 24,
        }
    }
}

impl CorpusSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        let spec: CorpusSpec =
            serde_json::from_str(text).map_err(|e| Error::Config(format!("corpus config: {e}")))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        CorpusSpec::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.counts.gen_koebe > 0 && self.theta_grid_size == 0 {
            return bad("thetaGridSize must be positive when genKoebe count > 0".into());
        }
        if self.counts.starlike_pow > 0 && self.beta_set.is_empty() {
            return bad("betaSet must be non-empty when starlikePow count > 0".into());
        }
        if let Some(b) = self.beta_set.iter().find(|b| !(0.0..=1.0).contains(*b)) {
            return bad(format!("betaSet entry {b} outside [0, 1]"));
        }
        if let Some(r) = self.r_set.iter().find(|&&r| !(r > 0.0 && r <= 1.0)) {
            return bad(format!("rSet entry {r} outside (0, 1]"));
        }
        if let Some(a) = self.automorph_points.iter().find(|a| !(a.norm() < 1.0)) {
            return bad(format!("automorphPoints entry {a} has |a| >= 1"));
        }
        if self.order < 1 {
            return bad("order must be at least 1".into());
        }
        Ok(())
    }

    /// Order requirement for scanning up to `γ_{n_max}`.
    pub fn validate_for(&self, n_max: usize) -> Result<()> {
        self.validate()?;
        let needed = 2 * n_max + 8;
        if self.order < needed {
            return Err(Error::Config(format!(
                "order {} too small for nmax {n_max}: need at least {needed}",
                self.order
            )));
        }
        Ok(())
    }
}

fn random_transform(spec: &CorpusSpec, rng: &mut ChaCha8Rng) -> Transform {
    let mut kinds = vec![0u8];
    if !spec.r_set.is_empty() {
        kinds.push(1);
    }
    if !spec.automorph_points.is_empty() {
        kinds.push(2);
    }
    match kinds[rng.gen_range(0..kinds.len())] {
        0 => Transform::Rotate {
            theta: rng.gen_range(0.0..TAU),
        },
        1 => Transform::Dilate {
            r: spec.r_set[rng.gen_range(0..spec.r_set.len())],
        },
        _ => {
            let base = spec.automorph_points[rng.gen_range(0..spec.automorph_points.len())];
            let phase = rng.gen_range(0.0..TAU);
            Transform::Automorph {
                a: base * Complex64::from_polar(1.0, phase),
            }
        }
    }
}

/// Deterministic list of specs: fixed parameter grids for the base families
/// plus seeded random transform lists of length at most the depth cap.
pub fn build_corpus(spec: &CorpusSpec) -> Result<Vec<FamilySpec>> {
    spec.validate()?;
    let thetas = theta_grid(spec.theta_grid_size);
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut out = Vec::with_capacity(spec.counts.total());

    for family in Family::ALL {
        for i in 0..spec.counts.get(family) {
            let mut f = match family {
                Family::GenKoebe => FamilySpec::gen_koebe(thetas[i % thetas.len()]),
                Family::StarlikePow => FamilySpec::starlike_pow(spec.beta_set[i % spec.beta_set.len()]),
                other => FamilySpec::new(other),
            };
            // the first member of every family stays untransformed
            let depth = if i == 0 {
                0
            } else {
                rng.gen_range(0..=spec.transform_depth_cap)
            };
            for _ in 0..depth {
                f.transforms.push(random_transform(spec, &mut rng));
            }
            f.validate(spec.transform_depth_cap)?;
            out.push(f);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic() {
        let spec = CorpusSpec::default();
        assert_eq!(build_corpus(&spec).unwrap(), build_corpus(&spec).unwrap());
        let other = CorpusSpec {
            seed: spec.seed + 1,
            ..spec.clone()
        };
        assert_ne!(build_corpus(&spec).unwrap(), build_corpus(&other).unwrap());
    }

    #[test]
    fn counts_add_up() {
        let spec = CorpusSpec::default();
        let corpus = build_corpus(&spec).unwrap();
        assert_eq!(corpus.len(), spec.counts.total());
        assert!(corpus.len() >= 50);
        for family in Family::ALL {
            let n = corpus.iter().filter(|f| f.family == family).count();
            assert_eq!(n, spec.counts.get(family));
        }
    }

    #[test]
    fn every_member_validates() {
        let spec = CorpusSpec::default();
        for f in build_corpus(&spec).unwrap() {
            f.validate(spec.transform_depth_cap).unwrap();
            for t in &f.transforms {
                if let Transform::Automorph { a } = t {
                    assert!(a.norm() <= 0.8 + 1e-15);
                }
            }
        }
    }

    #[test]
    fn rejects_bad_ranges() {
        let mut spec = CorpusSpec::default();
        spec.beta_set.push(1.5);
        assert!(build_corpus(&spec).is_err());

        let mut spec = CorpusSpec::default();
        spec.r_set = vec![0.0];
        assert!(spec.validate().is_err());

        let mut spec = CorpusSpec::default();
        spec.automorph_points = vec![Complex64::new(0.0, 1.0)];
        assert!(spec.validate().is_err());

        let spec = CorpusSpec {
            order: 20,
            ..CorpusSpec::default()
        };
        assert!(spec.validate_for(8).is_err());
        assert!(spec.validate_for(6).is_ok());
    }

    #[test]
    fn json_schema() {
        let spec = CorpusSpec::default();
        let json = serde_json::to_string_pretty(&spec).unwrap();
        for key in [
            "\"seed\"",
            "\"counts\"",
            "\"genKoebe\"",
            "\"starlikePow\"",
            "\"thetaGridSize\"",
            "\"betaSet\"",
            "\"rSet\"",
            "\"automorphPoints\"",
            "\"transformDepthCap\"",
            "\"order\"",
        ] {
            assert!(json.contains(key), "missing {key}");
        }
        assert_eq!(CorpusSpec::from_json(&json).unwrap(), spec);
        assert!(matches!(
            CorpusSpec::from_json(r#"{"seed": 1}"#),
            Err(Error::Config(_))
        ));
    }
}

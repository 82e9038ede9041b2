use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::arithmetic::{continued_fraction_exact, DiophantineProfile, ExactReal};
use crate::error::{Error, Result};
use crate::maps::{CircleMapSpec, ConjugacyDiffeo, GRID_CAP};

/// Perturbation family scanned by an experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", deny_unknown_fields)]
pub enum FamilySpec {
    /// Ladder entries are convergent indices `j`.
    AttractorRepeller {
        #[serde(default = "unit")]
        bump_strength: f64,
    },
    /// `R_{p_j/q_j}`; ladder entries are convergent indices.
    RationalSnap,
    /// Grid discretizations of a base map; ladder entries are grid sizes.
    Discretization { map: BaseMap },
}

fn unit() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", deny_unknown_fields)]
pub enum BaseMap {
    Rotation,
    Conjugated { h: ConjugacyDiffeo },
}

impl BaseMap {
    pub fn build(&self, alpha: f64) -> CircleMapSpec {
        match self {
            BaseMap::Rotation => CircleMapSpec::rotation(alpha),
            BaseMap::Conjugated { h } => CircleMapSpec::conjugated(alpha, h.clone()),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub csv: Option<PathBuf>,
    pub summary: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// `golden`, `silver`, `lacunary[:k]`, `p/q` or a decimal.
    pub alpha: String,
    pub family: FamilySpec,
    #[serde(default)]
    pub ladder: Vec<f64>,
    #[serde(default)]
    pub seed: u64,
    /// Continued-fraction depth used to build the profile.
    #[serde(default = "default_depth")]
    pub depth: usize,
    /// When set, convergent families also record the empirical orbit measure
    /// of this many points.
    #[serde(default)]
    pub orbit_len: Option<u64>,
    #[serde(default)]
    pub output: OutputSpec,
}

fn default_depth() -> usize {
    40
}

impl ExperimentConfig {
    pub fn from_json(s: &str) -> Result<Self> {
        let cfg: Self =
            serde_json::from_str(s).map_err(|e| Error::Config(format!("bad config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        ExactReal::from_str(&self.alpha).map_err(|e| Error::Config(e.to_string()))?;
        let l = &self.ladder;
        if l.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::Config(
                "ladder entries must be finite and non-negative".into(),
            ));
        }
        let up = l.windows(2).all(|w| w[0] < w[1]);
        let down = l.windows(2).all(|w| w[0] > w[1]);
        if !(up || down) {
            return Err(Error::Config("ladder must be strictly monotone".into()));
        }
        if l.iter().any(|v| v.fract() != 0.0) {
            return Err(Error::Config(
                "ladder entries are convergent indices or grid sizes and must be integers".into(),
            ));
        }
        match &self.family {
            FamilySpec::AttractorRepeller { bump_strength } => {
                if !(*bump_strength > 0.0 && *bump_strength <= 1.0) {
                    return Err(Error::Config("bump_strength must lie in (0, 1]".into()));
                }
            }
            FamilySpec::RationalSnap => {}
            FamilySpec::Discretization { .. } => {
                if let Some(&n) = l.iter().find(|&&n| n < 1.0 || n > GRID_CAP as f64) {
                    return Err(Error::Config(format!(
                        "grid size {n} outside 1..={GRID_CAP}"
                    )));
                }
            }
        }
        if self.orbit_len == Some(0) {
            return Err(Error::Config("orbit_len must be positive".into()));
        }
        Ok(())
    }

    pub fn alpha_value(&self) -> Result<f64> {
        let a = ExactReal::from_str(&self.alpha).map_err(|e| Error::Config(e.to_string()))?;
        Ok(a.to_f64())
    }

    pub fn profile(&self) -> Result<DiophantineProfile> {
        let a = ExactReal::from_str(&self.alpha).map_err(|e| Error::Config(e.to_string()))?;
        profile_to_depth(&a, self.depth)
    }
}

/// Continued fraction to `depth`, or to the full expansion when the binary
/// rational terminates earlier (at least 4 quotients are required).
pub fn profile_to_depth(alpha: &ExactReal, depth: usize) -> Result<DiophantineProfile> {
    match continued_fraction_exact(alpha, depth) {
        Err(Error::Truncated { achieved, .. }) if achieved >= 4 => {
            continued_fraction_exact(alpha, achieved)
        }
        r => r,
    }
}

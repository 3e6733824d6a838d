//! Experiment configuration (JSON) and the built-in suite configurations.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use angleapprox::smoothness::{ModulusConfig, ModulusSearchConfig};
use angleapprox::{LorentzIndex, SamplingConfig};

use crate::{HarnessError, Result};

/// Step-search parameters as they appear in config files.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchConfig {
    pub grid_points: usize,
    pub refine_levels: usize,
    pub include_negative: bool,
}

impl Default for SearchConfig {
    fn default() -> Self {
        let d = ModulusSearchConfig::default();
        SearchConfig {
            grid_points: d.grid_points,
            refine_levels: d.refine_levels,
            include_negative: d.include_negative,
        }
    }
}

/// One test-function family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum FamilySpec {
    /// Lacunary cosine series with `λ_ν̄ = Π 2^{−ν_j ρ_j}` over `ν_j ≤ v_j`.
    LacunaryGeometric { rho: Vec<f64>, vmax: Vec<u32> },
    /// Conjugate-symmetrized random spectrum on the band box with magnitudes
    /// `Π|k_j|^{−decay}` and pseudo-random phases.
    RandomBand { band: i64, decay: f64, count: usize },
    /// Tensor power of the fixed polynomial `Σ_{k=1}^{degree} cos(kθ)/k`.
    Product { degree: i64 },
}

/// Full experiment configuration; `suite` is a label echoed into reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub suite: String,
    pub dim: usize,
    /// `(p, τ)` pairs.
    pub lorentz: Vec<(f64, f64)>,
    /// Difference/derivative order vectors, each of length `dim`.
    pub alphas: Vec<Vec<f64>>,
    /// Cutoff schedule; theorem suites use `n̄ = (n, …, n)` per entry.
    pub n_schedule: Vec<i64>,
    pub families: Vec<FamilySpec>,
    pub seed: u64,
    #[serde(default)]
    pub search: SearchConfig,
    pub oversample: f64,
    pub min_grid: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub baseline: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        Self::from_json(&crate::read_file(path)?)
    }

    /// Check every parameter against the module preconditions it feeds.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(HarnessError::Config(msg));
        if self.dim == 0 || self.dim > 4 {
            return bad(format!("dim must be 1..=4, got {}", self.dim));
        }
        if self.lorentz.is_empty() {
            return bad("need at least one (p, tau) pair".into());
        }
        for &(p, tau) in &self.lorentz {
            LorentzIndex::new(p, tau)?;
        }
        for alpha in &self.alphas {
            if alpha.len() != self.dim {
                return bad(format!("order vector {:?} does not match dim", alpha));
            }
            if alpha.iter().any(|&a| !(a > 0.0) || !a.is_finite()) {
                return bad(format!("orders must be positive, got {:?}", alpha));
            }
        }
        for &n in &self.n_schedule {
            if n < 1 {
                return bad(format!("schedule entries must be >= 1, got {}", n));
            }
        }
        for fam in &self.families {
            match fam {
                FamilySpec::LacunaryGeometric { rho, vmax } => {
                    if rho.len() != self.dim || vmax.len() != self.dim {
                        return bad("lacunary family vectors must match dim".into());
                    }
                    if rho.iter().any(|&r| !(r > 0.0)) {
                        return bad("lacunary decay must be positive".into());
                    }
                }
                FamilySpec::RandomBand { band, decay, count } => {
                    if *band < 1 || !(*decay >= 0.0) || *count == 0 {
                        return bad("random family needs band >= 1, decay >= 0, count >= 1".into());
                    }
                }
                FamilySpec::Product { degree } => {
                    if *degree < 1 {
                        return bad("product family needs degree >= 1".into());
                    }
                }
            }
        }
        if self.search.grid_points < 2 {
            return bad("search.grid_points must be >= 2".into());
        }
        SamplingConfig::new(self.oversample, self.min_grid)?;
        Ok(())
    }

    pub fn sampling(&self) -> SamplingConfig {
        SamplingConfig {
            oversample: self.oversample,
            min_points: self.min_grid,
        }
    }

    pub fn search_config(&self) -> ModulusSearchConfig {
        ModulusSearchConfig {
            grid_points: self.search.grid_points,
            refine_levels: self.search.refine_levels,
            include_negative: self.search.include_negative,
        }
    }

    pub fn modulus_config(&self) -> ModulusConfig {
        ModulusConfig {
            search: self.search_config(),
            sampling: self.sampling(),
        }
    }
}

fn theorem_families() -> Vec<FamilySpec> {
    vec![
        FamilySpec::LacunaryGeometric {
            rho: vec![1.0, 1.0],
            vmax: vec![6, 6],
        },
        FamilySpec::RandomBand {
            band: 8,
            decay: 2.0,
            count: 1,
        },
        FamilySpec::Product { degree: 4 },
    ]
}

fn small_families() -> Vec<FamilySpec> {
    vec![
        FamilySpec::LacunaryGeometric {
            rho: vec![1.0, 1.0],
            vmax: vec![3, 3],
        },
        FamilySpec::RandomBand {
            band: 6,
            decay: 1.5,
            count: 1,
        },
        FamilySpec::Product { degree: 4 },
    ]
}

fn base(suite: &str) -> ExperimentConfig {
    ExperimentConfig {
        suite: suite.to_string(),
        dim: 2,
        lorentz: vec![(2.0, 2.0), (2.5, 1.5), (4.0, 3.0)],
        alphas: vec![vec![1.0, 1.0], vec![0.5, 0.5], vec![1.5, 0.7]],
        n_schedule: vec![2, 4, 8, 16, 32],
        families: theorem_families(),
        seed: 42,
        search: SearchConfig {
            grid_points: 8,
            refine_levels: 2,
            include_negative: true,
        },
        oversample: 2.0,
        min_grid: 64,
        baseline: Some(PathBuf::from(format!("baselines/{}.json", suite))),
        out: Some(PathBuf::from(format!("out/{}.csv", suite))),
    }
}

/// The checked-in configuration for each suite.
pub fn builtin_config(suite: &str) -> Option<ExperimentConfig> {
    match suite {
        "realization" => Some(base("realization")),
        "inverse-sharp" => Some(base("inverse-sharp")),
        "inverse-natural" => Some(ExperimentConfig {
            lorentz: vec![(2.0, 2.0), (2.5, 1.5)],
            alphas: vec![vec![1.0, 1.0], vec![0.5, 0.5]],
            n_schedule: vec![2, 4, 8, 16],
            ..base("inverse-natural")
        }),
        "direct" => Some(ExperimentConfig {
            lorentz: vec![(2.0, 2.0), (2.5, 1.5)],
            alphas: vec![vec![1.0, 1.0], vec![0.5, 0.5]],
            n_schedule: vec![2, 4, 8, 16],
            ..base("direct")
        }),
        "properties" => Some(ExperimentConfig {
            lorentz: vec![(2.0, 2.0), (2.5, 1.5)],
            alphas: vec![vec![1.0, 1.0], vec![0.5, 0.5]],
            n_schedule: vec![],
            families: small_families(),
            ..base("properties")
        }),
        "lacunary" => Some(ExperimentConfig {
            lorentz: vec![(2.0, 2.0), (4.0, 3.0), (1.8, 3.0)],
            alphas: vec![vec![1.0, 1.0], vec![0.5, 0.5]],
            families: vec![FamilySpec::LacunaryGeometric {
                rho: vec![1.0, 1.0],
                vmax: vec![6, 6],
            }],
            ..base("lacunary")
        }),
        "norms" => Some(ExperimentConfig {
            baseline: None,
            ..base("norms")
        }),
        _ => None,
    }
}

pub const SUITE_NAMES: &[&str] = &[
    "properties",
    "realization",
    "inverse-sharp",
    "inverse-natural",
    "direct",
    "lacunary",
    "norms",
];

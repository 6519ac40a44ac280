//! Run configuration: one JSON document per run, with flags overriding
//! scalar fields.

use std::path::{Path, PathBuf};

use cantorhull::export::GridSpec;
use serde::{Deserialize, Serialize};

use crate::exit::Failure;

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub construct: ConstructSection,
    pub verify: VerifySection,
    pub export: ExportSection,
    pub hm: HmSection,
    pub monodromy: MonodromySection,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConstructSection {
    pub depth: usize,
    /// Certification threshold; derived from the `D_0` grid solve when absent.
    pub c0: Option<f64>,
    /// γ_1, γ_2, ...; γ_n = n when absent.
    pub growth: Option<Vec<f64>>,
    pub shrink_factor: Option<f64>,
    pub max_halvings: Option<u32>,
    pub certify_walks: u64,
    pub c0_walks: u64,
    pub grid_resolution: usize,
}

impl Default for ConstructSection {
    fn default() -> Self {
        ConstructSection {
            depth: 6,
            c0: None,
            growth: None,
            shrink_factor: None,
            max_halvings: None,
            certify_walks: 300_000,
            c0_walks: 100_000,
            grid_resolution: 512,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifySection {
    pub state: Option<PathBuf>,
    pub walks: u64,
    pub tolerance_scale: f64,
    pub grid_resolution: usize,
    pub criteria: Option<Vec<u8>>,
}

impl Default for VerifySection {
    fn default() -> Self {
        VerifySection {
            state: None,
            walks: 100_000,
            tolerance_scale: 1.0,
            grid_resolution: 512,
            criteria: None,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExportSection {
    pub state: Option<PathBuf>,
    /// Stage to evaluate; the state depth when absent.
    pub stage: Option<usize>,
    pub grid: GridSpec,
    pub witness_z_grid: GridSpec,
    pub witness_w_grid: GridSpec,
    pub cover_grid: GridSpec,
    pub cover_margin: f64,
    pub witness_samples: usize,
}

impl Default for ExportSection {
    fn default() -> Self {
        ExportSection {
            state: None,
            stage: None,
            grid: GridSpec::new([-1.5, 1.5], [-1.5, 1.5], 121, 121),
            witness_z_grid: GridSpec::new([1.7, 2.3], [-0.3, 0.3], 9, 9),
            witness_w_grid: GridSpec::new([0.0, 2.0], [-1.0, 1.0], 21, 21),
            cover_grid: GridSpec::new([-1.2, 1.2], [-0.6, 0.6], 49, 25),
            cover_margin: 1e-3,
            witness_samples: 1024,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HmSection {
    /// `D_0` when absent.
    pub state: Option<PathBuf>,
    pub stage: Option<usize>,
    pub point: [f64; 2],
    pub walks: u64,
}

impl Default for HmSection {
    fn default() -> Self {
        HmSection {
            state: None,
            stage: None,
            point: [0.0, 0.0],
            walks: 100_000,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MonodromySection {
    pub state: Option<PathBuf>,
    pub stage: Option<usize>,
    /// Explicit polyline; a circle from the fields below when absent.
    pub path: Option<Vec<[f64; 2]>>,
    pub center: [f64; 2],
    pub radius: f64,
    pub vertices: usize,
}

impl Default for MonodromySection {
    fn default() -> Self {
        MonodromySection {
            state: None,
            stage: None,
            path: None,
            center: [0.0, 0.0],
            radius: 2.0,
            vertices: 64,
        }
    }
}

impl RunConfig {
    pub fn load(path: Option<&Path>) -> Result<RunConfig, Failure> {
        let Some(path) = path else {
            return Ok(RunConfig::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::config(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| Failure::config(format!("invalid config {}: {e}", path.display())))
    }

    pub fn require_seed(&self) -> Result<u64, Failure> {
        self.seed
            .ok_or_else(|| Failure::config("no seed given; pass --seed or set \"seed\" in the config"))
    }

    pub fn out_dir(&self) -> PathBuf {
        self.out.clone().unwrap_or_else(|| PathBuf::from("out"))
    }
}

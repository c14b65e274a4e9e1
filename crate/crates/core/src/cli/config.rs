//! TOML run configuration. Every field has a default; unknown keys are rejected.

use serde::{Deserialize, Serialize};

use crate::conclab::{CubeMeasureSpec, QRule};
use crate::error::{Error, Result};
use crate::surface::{make_coupled_factor, make_flat_factor, ConformalFactor, ProfileKind, SurfaceOfRevolution};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    /// worker threads; 0 lets rayon decide
    pub jobs: usize,
    pub out: String,
    pub surface: ProfileKind,
    pub factor: FactorConfig,
    pub grid: GridConfig,
    pub geodesic: GeodesicConfig,
    pub spectrum: SpectrumConfig,
    pub beam: BeamConfig,
    pub flow: FlowConfig,
    pub concentrate: ConcentrateConfig,
    pub doublewell: DoubleWellConfig,
    pub sampler: CubeMeasureSpec,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 0,
            jobs: 0,
            out: "out".into(),
            surface: ProfileKind::TorusOfRevolution { major: 2.0, minor: 1.0 },
            factor: FactorConfig::default(),
            grid: GridConfig::default(),
            geodesic: GeodesicConfig::default(),
            spectrum: SpectrumConfig::default(),
            beam: BeamConfig::default(),
            flow: FlowConfig::default(),
            concentrate: ConcentrateConfig::default(),
            doublewell: DoubleWellConfig::default(),
            sampler: CubeMeasureSpec::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FactorConfig {
    Zero,
    Constant {
        value: f64,
    },
    Flat {
        order: u32,
        amplitude: f64,
    },
    Coupled {
        order: u32,
        amplitude: f64,
        coupling: f64,
    },
    /// a draw from the cube measure of `[sampler]` with the run seed
    Sampled,
}

impl Default for FactorConfig {
    fn default() -> Self {
        FactorConfig::Flat {
            order: 8,
            amplitude: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub n_s: usize,
    pub n_phi: usize,
    pub t_points: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            n_s: 512,
            n_phi: 96,
            t_points: 11,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeodesicConfig {
    pub max_denominator: u32,
    pub tolerance: f64,
}

impl Default for GeodesicConfig {
    fn default() -> Self {
        GeodesicConfig {
            max_denominator: crate::geodesic::DEFAULT_MAX_DENOMINATOR,
            tolerance: crate::geodesic::DEFAULT_TOLERANCE,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BackendChoice {
    /// sectors when the factor allows it, the full grid otherwise
    Auto,
    Separable,
    Coupled,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpectrumConfig {
    pub backend: BackendChoice,
    /// separable cutoff `Lambda`
    pub lambda_max: f64,
    /// coupled: number of lowest eigenvalues
    pub count: usize,
    /// optional window `[lo, hi]`; replaces the cutoff or count when set
    pub window: Option<[f64; 2]>,
}

impl Default for SpectrumConfig {
    fn default() -> Self {
        SpectrumConfig {
            backend: BackendChoice::Auto,
            lambda_max: 20.0,
            count: 20,
            window: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BeamConfig {
    pub m_min: u32,
    pub m_max: u32,
    pub m1: u32,
    pub capture_c: f64,
}

impl Default for BeamConfig {
    fn default() -> Self {
        BeamConfig {
            m_min: 10,
            m_max: 40,
            m1: 0,
            capture_c: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FlowConfig {
    pub lambda_max: f64,
    pub t_points: usize,
    pub n_s: usize,
    pub delta: f64,
    pub probe_t: Vec<f64>,
    pub probe_branches: usize,
    pub gap_floor: f64,
}

impl Default for FlowConfig {
    fn default() -> Self {
        FlowConfig {
            lambda_max: 14.0,
            t_points: 101,
            n_s: 256,
            delta: 1e-3,
            probe_t: vec![0.2, 0.35, 0.5, 0.65, 0.8],
            probe_branches: 20,
            gap_floor: crate::flow::DEFAULT_GAP_FLOOR,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
pub enum SchemeConfig {
    Envelope { pad: f64 },
    ModeDefect { c: f64 },
    BeamDefect { c: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConcentrateConfig {
    pub m_min: u32,
    pub m_max: u32,
    /// keep every `thin`-th window
    pub thin: usize,
    pub epsilons: Vec<f64>,
    pub q_rule: QRule,
    pub scheme: SchemeConfig,
    pub backend: BackendChoice,
}

impl Default for ConcentrateConfig {
    fn default() -> Self {
        ConcentrateConfig {
            m_min: 10,
            m_max: 40,
            thin: 1,
            epsilons: crate::conclab::DEFAULT_EPSILONS.to_vec(),
            q_rule: QRule::InverseSqrt,
            scheme: SchemeConfig::Envelope { pad: 1e-8 },
            backend: BackendChoice::Auto,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DoubleWellConfig {
    pub hbar: Vec<f64>,
    pub x_cut: f64,
    pub n_x: usize,
    pub a: f64,
    pub b: f64,
}

impl Default for DoubleWellConfig {
    fn default() -> Self {
        DoubleWellConfig {
            hbar: vec![0.2, 0.15, 0.1, 0.08],
            x_cut: 3.0,
            n_x: crate::doublewell::MIN_GRID,
            a: 1.0,
            b: 1.0,
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn surface(&self) -> Result<SurfaceOfRevolution> {
        SurfaceOfRevolution::new(self.surface.clone()).map_err(as_config)
    }

    /// The configured factor; `sampled` draws with `seed`.
    pub fn factor(&self, surface: &SurfaceOfRevolution) -> Result<ConformalFactor> {
        let f = match &self.factor {
            FactorConfig::Zero => Ok(ConformalFactor::zero()),
            FactorConfig::Constant { value } => ConformalFactor::constant(*value),
            FactorConfig::Flat { order, amplitude } => make_flat_factor(surface, *order, *amplitude),
            FactorConfig::Coupled {
                order,
                amplitude,
                coupling,
            } => make_coupled_factor(surface, *order, *amplitude, *coupling),
            FactorConfig::Sampled => {
                return Ok(crate::conclab::sample_conformal_factor(surface, &self.sampler, self.seed)?.factor)
            }
        };
        f.map_err(as_config)
    }
}

fn as_config(e: Error) -> Error {
    match e {
        Error::InvalidSurface(m) | Error::InvalidFactor(m) => Error::Config(m),
        other => other,
    }
}

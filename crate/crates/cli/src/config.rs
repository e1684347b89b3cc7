//! Structured run configuration: one TOML file with full schema validation
//! drives every command, so each output is reproducible from the file.

use anyhow::{bail, Context};
use serde::{Deserialize, Serialize};
use stokes2p_core::bvp::{FluidParams, SolveMethod, SolverConfig};
use stokes2p_core::evolution::{Scheme, StepperConfig};
use stokes2p_core::grid::{Grid, InterfaceProfile, ProfileShape};
use stokes2p_core::quadrature::QuadratureConfig;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
#[derive(Default)]
pub struct RunConfig {
    /// Seed for probe vectors; a fixed seed makes runs fully deterministic.
    pub seed: u64,
    pub grid: GridSection,
    pub profile: ProfileSection,
    pub fluid: FluidSection,
    pub quadrature: QuadratureSection,
    pub solver: SolverSection,
    pub stepper: StepperSection,
    pub fields_scan: FieldsSection,
    pub spectrum: SpectrumSection,
    pub linearize: LinearizeSection,
}


#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridSection {
    pub half_width: f64,
    pub node_count: usize,
    pub decay_tol: f64,
}

impl Default for GridSection {
    fn default() -> Self {
        Self {
            half_width: 64.0,
            node_count: 1024,
            decay_tol: 1e-4,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProfileSection {
    /// zero | gaussian | wave | file
    pub preset: String,
    pub amplitude: f64,
    pub width: f64,
    pub wavenumber: f64,
    /// Two-column (xi, f) text table; used by preset = "file".
    pub path: String,
}

impl Default for ProfileSection {
    fn default() -> Self {
        Self {
            preset: "gaussian".into(),
            amplitude: 0.3,
            width: 1.0,
            wavenumber: 2.0,
            path: String::new(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FluidSection {
    pub mu_plus: f64,
    pub mu_minus: f64,
    pub sigma: f64,
}

impl Default for FluidSection {
    fn default() -> Self {
        Self {
            mu_plus: 2.0,
            mu_minus: 1.0,
            sigma: 1.0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QuadratureSection {
    pub diagonal_correction: bool,
    pub oracle_tolerance: f64,
    pub excision_sequence: Vec<f64>,
    pub dense_cap: usize,
}

impl Default for QuadratureSection {
    fn default() -> Self {
        let d = QuadratureConfig::default();
        Self {
            diagonal_correction: d.diagonal_correction,
            oracle_tolerance: d.oracle_tolerance,
            excision_sequence: d.excision_sequence,
            dense_cap: d.dense_cap,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverSection {
    /// krylov | dense
    pub method: String,
    pub residual_tol: f64,
    pub max_iterations: usize,
    pub restart: usize,
}

impl Default for SolverSection {
    fn default() -> Self {
        let d = SolverConfig::default();
        Self {
            method: "krylov".into(),
            residual_tol: d.residual_tol,
            max_iterations: d.max_iterations,
            restart: d.restart,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StepperSection {
    /// explicit_rk4 | imex
    pub scheme: String,
    pub dt_init: f64,
    pub dt_min: f64,
    pub dt_max: f64,
    pub adapt_tol: f64,
    pub horizon: f64,
    pub snapshot_stride: usize,
    pub slope_cap: f64,
}

impl Default for StepperSection {
    fn default() -> Self {
        let d = StepperConfig::default();
        Self {
            scheme: "explicit_rk4".into(),
            dt_init: d.dt_init,
            dt_min: d.dt_min,
            dt_max: d.dt_max,
            adapt_tol: d.adapt_tol,
            horizon: d.horizon,
            snapshot_stride: d.snapshot_stride,
            slope_cap: d.slope_cap,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FieldsSection {
    /// double | single
    pub layer: String,
    /// solved (density from the second-kind equation) | zero
    pub density: String,
    pub x1_min: f64,
    pub x1_max: f64,
    pub x1_count: usize,
    pub x2_min: f64,
    pub x2_max: f64,
    pub x2_count: usize,
}

impl Default for FieldsSection {
    fn default() -> Self {
        Self {
            layer: "double".into(),
            density: "solved".into(),
            x1_min: -4.0,
            x1_max: 4.0,
            x1_count: 33,
            x2_min: 1.0,
            x2_max: 5.0,
            x2_count: 17,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpectrumSection {
    pub lambdas: Vec<f64>,
    pub sizes: Vec<usize>,
    /// flat | weighted
    pub norm: String,
    pub s_exp: f64,
    pub adjoint: bool,
}

impl Default for SpectrumSection {
    fn default() -> Self {
        Self {
            lambdas: vec![0.6, -0.6],
            sizes: vec![256, 512],
            norm: "flat".into(),
            s_exp: 0.75,
            adjoint: false,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LinearizeSection {
    pub wavenumbers: Vec<f64>,
    pub packet_width: f64,
    pub packet_amplitude: f64,
    pub fd_epsilons: Vec<f64>,
}

impl Default for LinearizeSection {
    fn default() -> Self {
        Self {
            wavenumbers: vec![1.0, 2.0, 4.0],
            packet_width: 16.0,
            packet_amplitude: 1e-4,
            fd_epsilons: vec![0.3, 0.1, 0.03],
        }
    }
}

impl RunConfig {
    pub fn load(path: &std::path::Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let cfg: RunConfig = toml::from_str(&text)
            .with_context(|| format!("parsing config {}", path.display()))?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    /// FNV-1a hash of the effective configuration for the run manifest.
    pub fn hash(&self) -> u64 {
        let mut h: u64 = 0xcbf29ce484222325;
        for b in self.to_toml().bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x100000001b3);
        }
        h
    }

    pub fn build_grid(&self) -> anyhow::Result<Grid> {
        Ok(Grid::new(self.grid.half_width, self.grid.node_count)?)
    }

    pub fn build_profile(&self) -> anyhow::Result<InterfaceProfile> {
        let grid = self.build_grid()?;
        let p = &self.profile;
        let shape = match p.preset.as_str() {
            "zero" => ProfileShape::Zero,
            "gaussian" => ProfileShape::GaussianBump {
                amplitude: p.amplitude,
                width: p.width,
            },
            "wave" => ProfileShape::ModulatedWave {
                amplitude: p.amplitude,
                wavenumber: p.wavenumber,
                width: p.width,
            },
            "file" => {
                let text = std::fs::read_to_string(&p.path)
                    .with_context(|| format!("reading profile table {}", p.path))?;
                return Ok(InterfaceProfile::from_two_column_text(
                    grid,
                    &text,
                    self.grid.decay_tol,
                )?);
            }
            other => bail!("unknown profile preset '{other}' (zero|gaussian|wave|file)"),
        };
        Ok(InterfaceProfile::from_shape(
            grid,
            &shape,
            self.grid.decay_tol,
        )?)
    }

    pub fn build_fluid(&self) -> anyhow::Result<FluidParams> {
        Ok(FluidParams::new(
            self.fluid.mu_plus,
            self.fluid.mu_minus,
            self.fluid.sigma,
        )?)
    }

    pub fn build_quadrature(&self) -> anyhow::Result<QuadratureConfig> {
        let cfg = QuadratureConfig {
            diagonal_correction: self.quadrature.diagonal_correction,
            oracle_tolerance: self.quadrature.oracle_tolerance,
            excision_sequence: self.quadrature.excision_sequence.clone(),
            dense_cap: self.quadrature.dense_cap,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn build_solver(&self) -> anyhow::Result<SolverConfig> {
        let method = match self.solver.method.as_str() {
            "krylov" => SolveMethod::Krylov,
            "dense" => SolveMethod::Dense,
            other => bail!("unknown solver method '{other}' (krylov|dense)"),
        };
        let cfg = SolverConfig {
            method,
            residual_tol: self.solver.residual_tol,
            max_iterations: self.solver.max_iterations,
            restart: self.solver.restart,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn build_stepper(&self) -> anyhow::Result<StepperConfig> {
        let scheme = match self.stepper.scheme.as_str() {
            "explicit_rk4" => Scheme::ExplicitRk4,
            "imex" => Scheme::Imex,
            other => bail!("unknown stepper scheme '{other}' (explicit_rk4|imex)"),
        };
        let cfg = StepperConfig {
            scheme,
            dt_init: self.stepper.dt_init,
            dt_min: self.stepper.dt_min,
            dt_max: self.stepper.dt_max,
            adapt_tol: self.stepper.adapt_tol,
            horizon: self.stepper.horizon,
            snapshot_stride: self.stepper.snapshot_stride,
            slope_cap: self.stepper.slope_cap,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Validates every section without running anything.
    pub fn validate(&self) -> anyhow::Result<()> {
        self.build_profile()?;
        self.build_fluid()?;
        self.build_quadrature()?;
        self.build_solver()?;
        self.build_stepper()?;
        match self.fields_scan.layer.as_str() {
            "double" | "single" => {}
            other => bail!("unknown field layer '{other}' (double|single)"),
        }
        match self.fields_scan.density.as_str() {
            "solved" | "zero" => {}
            other => bail!("unknown field density '{other}' (solved|zero)"),
        }
        if self.fields_scan.x1_count == 0 || self.fields_scan.x2_count == 0 {
            bail!("field scan needs at least one point per axis");
        }
        match self.spectrum.norm.as_str() {
            "flat" | "weighted" => {}
            other => bail!("unknown spectrum norm '{other}' (flat|weighted)"),
        }
        if self.spectrum.lambdas.is_empty() || self.spectrum.sizes.is_empty() {
            bail!("spectrum scan needs lambdas and sizes");
        }
        if self.linearize.wavenumbers.is_empty() || self.linearize.fd_epsilons.is_empty() {
            bail!("linearize needs wavenumbers and fd epsilons");
        }
        Ok(())
    }
}

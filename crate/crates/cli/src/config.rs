//! Run configuration: TOML with one table per concern, unknown keys rejected.

use crate::error::CliError;
use karman_core::{RadialKernel, StreetGeometry};
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelName {
    Euler,
    Qgsw,
    Gsqg,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct KernelConfig {
    pub kind: KernelName,
    /// Deformation wavenumber, QGSW only.
    pub lambda: f64,
    /// Power-law exponent in (0, 1), gSQG only.
    pub beta: f64,
}

impl Default for KernelConfig {
    fn default() -> Self {
        KernelConfig { kind: KernelName::Euler, lambda: 1.0, beta: 0.5 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GeometryConfig {
    pub l: f64,
    pub h: f64,
    pub a: f64,
}

impl Default for GeometryConfig {
    fn default() -> Self {
        GeometryConfig { l: 1.0, h: 1.0, a: 0.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpeedConfig {
    /// Target accuracy of the lattice sum.
    pub tol: f64,
    /// Extra symmetric partial sums to report.
    pub partial_sums: Vec<usize>,
    /// Closed form against lattice sum (Euler only).
    pub agreement_tol: f64,
}

impl Default for SpeedConfig {
    fn default() -> Self {
        SpeedConfig { tol: 1e-12, partial_sums: vec![20, 40], agreement_tol: 1e-6 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolveConfig {
    /// Fourier modes N of the boundary map.
    pub modes: usize,
    /// Boundary grid M.
    pub grid: usize,
    /// Final patch size.
    pub eps: f64,
    /// Values the branch must land on exactly; empty means only `eps`.
    pub checkpoints: Vec<f64>,
    pub newton_tol: f64,
    pub max_iter: usize,
    pub fd_step: f64,
    pub eps_start: f64,
    pub initial_step: f64,
    pub min_step: f64,
    /// Nodes per patch in the written contour.
    pub contour_points: usize,
    /// Reference solution record to compare against.
    pub golden: Option<String>,
    pub golden_tol: f64,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            modes: 32,
            grid: 256,
            eps: 0.05,
            checkpoints: Vec::new(),
            newton_tol: 1e-11,
            max_iter: 25,
            fd_step: 1e-7,
            eps_start: 1e-4,
            initial_step: 1e-4,
            min_step: 1e-6,
            contour_points: 256,
            golden: None,
            golden_tol: 1e-10,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EvolveConfig {
    /// Boundary nodes per patch.
    pub grid: usize,
    /// Window length as a fraction of `l / |V|`.
    pub window_fraction: f64,
    /// RK4 steps over the window; 0 picks a fifth of the node-crossing time.
    pub steps: usize,
    pub record_every: usize,
    pub centroid_tol: f64,
    pub area_tol: f64,
    pub shape_tol: f64,
    pub flux_tol: f64,
}

impl Default for EvolveConfig {
    fn default() -> Self {
        EvolveConfig {
            grid: 128,
            window_fraction: 0.1,
            steps: 0,
            record_every: 100,
            centroid_tol: 1e-3,
            area_tol: 1e-6,
            shape_tol: 1e-3,
            flux_tol: 1e-8,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PointsMode {
    Pair,
    Street,
    Row,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PointsConfig {
    pub mode: PointsMode,
    pub gamma1: f64,
    pub gamma2: f64,
    /// Pair separation.
    pub d: f64,
    pub dt: f64,
    pub steps: usize,
    /// Lattice half-width K for street and row runs.
    pub truncation: usize,
    pub record_every: usize,
    pub distance_tol: f64,
    pub frequency_tol: f64,
    pub translation_tol: f64,
}

impl Default for PointsConfig {
    fn default() -> Self {
        PointsConfig {
            mode: PointsMode::Pair,
            gamma1: 1.0,
            gamma2: 1.0,
            d: 1.0,
            dt: 1e-3,
            steps: 1000,
            truncation: 50,
            record_every: 10,
            distance_tol: 1e-9,
            frequency_tol: 1e-6,
            translation_tol: 1e-8,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LinCheckConfig {
    pub modes: usize,
    pub grid: usize,
    pub fd_step: f64,
    /// Absolute tolerance for log kernels, relative for the power kernel.
    pub tol: f64,
    pub lambda_modes: usize,
    pub lambda_grid: usize,
}

impl Default for LinCheckConfig {
    fn default() -> Self {
        LinCheckConfig { modes: 16, grid: 128, fd_step: 1e-6, tol: 1e-8, lambda_modes: 8, lambda_grid: 256 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BesselConfig {
    pub points: Vec<f64>,
    /// Relative tolerance against the integral representation.
    pub tol: f64,
    pub asymptotic_point: f64,
    pub asymptotic_tol: f64,
}

impl Default for BesselConfig {
    fn default() -> Self {
        BesselConfig { points: vec![0.1, 0.5, 1.0, 2.0, 5.0, 10.0], tol: 1e-12, asymptotic_point: 50.0, asymptotic_tol: 0.01 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldSource {
    /// Circular patches of radius `eps`.
    Circle,
    /// The solved street from the `[solve]` table.
    Solution,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FieldConfig {
    pub source: FieldSource,
    pub eps: f64,
    pub grid: usize,
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub nx: usize,
    pub ny: usize,
    /// Central-difference spacing of the divergence check.
    pub divergence_step: f64,
    pub divergence_tol: f64,
}

impl Default for FieldConfig {
    fn default() -> Self {
        FieldConfig {
            source: FieldSource::Circle,
            eps: 0.05,
            grid: 128,
            x_min: -0.5,
            x_max: 0.5,
            y_min: -1.5,
            y_max: 0.5,
            nx: 21,
            ny: 41,
            divergence_step: 1e-4,
            divergence_tol: 1e-4,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    /// Worker threads; 0 uses every available core.
    pub threads: usize,
    pub kernel: KernelConfig,
    pub geometry: GeometryConfig,
    pub speed: SpeedConfig,
    pub solve: SolveConfig,
    pub evolve: EvolveConfig,
    pub points: PointsConfig,
    pub lincheck: LinCheckConfig,
    pub bessel: BesselConfig,
    pub field: FieldConfig,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Canonical TOML of every resolved value, defaults included.
    pub fn resolved(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }

    pub fn kernel(&self) -> Result<RadialKernel, CliError> {
        let k = &self.kernel;
        match k.kind {
            KernelName::Euler => Ok(RadialKernel::euler()),
            KernelName::Qgsw => RadialKernel::qgsw(k.lambda).map_err(|e| key_error("kernel.lambda", e)),
            KernelName::Gsqg => RadialKernel::gsqg(k.beta).map_err(|e| key_error("kernel.beta", e)),
        }
    }

    pub fn geometry(&self) -> Result<StreetGeometry, CliError> {
        let g = &self.geometry;
        StreetGeometry::new(g.l, g.h, g.a).map_err(|e| key_error("geometry", e))
    }

    fn validate(&self) -> Result<(), CliError> {
        self.kernel()?;
        self.geometry()?;
        let positive = [
            ("speed.tol", self.speed.tol),
            ("speed.agreement_tol", self.speed.agreement_tol),
            ("solve.eps", self.solve.eps),
            ("solve.newton_tol", self.solve.newton_tol),
            ("solve.fd_step", self.solve.fd_step),
            ("solve.eps_start", self.solve.eps_start),
            ("solve.initial_step", self.solve.initial_step),
            ("solve.min_step", self.solve.min_step),
            ("solve.golden_tol", self.solve.golden_tol),
            ("evolve.window_fraction", self.evolve.window_fraction),
            ("evolve.centroid_tol", self.evolve.centroid_tol),
            ("evolve.area_tol", self.evolve.area_tol),
            ("evolve.shape_tol", self.evolve.shape_tol),
            ("evolve.flux_tol", self.evolve.flux_tol),
            ("points.d", self.points.d),
            ("points.dt", self.points.dt),
            ("points.distance_tol", self.points.distance_tol),
            ("points.frequency_tol", self.points.frequency_tol),
            ("points.translation_tol", self.points.translation_tol),
            ("lincheck.fd_step", self.lincheck.fd_step),
            ("lincheck.tol", self.lincheck.tol),
            ("bessel.tol", self.bessel.tol),
            ("bessel.asymptotic_point", self.bessel.asymptotic_point),
            ("bessel.asymptotic_tol", self.bessel.asymptotic_tol),
            ("field.eps", self.field.eps),
            ("field.divergence_step", self.field.divergence_step),
            ("field.divergence_tol", self.field.divergence_tol),
        ];
        for (key, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(CliError::Config(format!("key `{key}` must be a positive finite number, got {v}")));
            }
        }
        let counts = [
            ("solve.modes", self.solve.modes),
            ("solve.grid", self.solve.grid),
            ("solve.max_iter", self.solve.max_iter),
            ("solve.contour_points", self.solve.contour_points),
            ("evolve.grid", self.evolve.grid),
            ("evolve.record_every", self.evolve.record_every),
            ("points.steps", self.points.steps),
            ("points.record_every", self.points.record_every),
            ("lincheck.modes", self.lincheck.modes),
            ("lincheck.grid", self.lincheck.grid),
            ("lincheck.lambda_modes", self.lincheck.lambda_modes),
            ("lincheck.lambda_grid", self.lincheck.lambda_grid),
            ("field.grid", self.field.grid),
            ("field.nx", self.field.nx),
            ("field.ny", self.field.ny),
        ];
        for (key, v) in counts {
            if v == 0 {
                return Err(CliError::Config(format!("key `{key}` must be at least 1")));
            }
        }
        if self.solve.checkpoints.iter().any(|e| !(*e > 0.0)) || self.solve.checkpoints.windows(2).any(|w| w[1] <= w[0]) {
            return Err(CliError::Config("key `solve.checkpoints` must be positive and strictly increasing".into()));
        }
        if self.bessel.points.iter().any(|x| !(*x > 0.0 && x.is_finite())) {
            return Err(CliError::Config("key `bessel.points` must hold positive finite arguments".into()));
        }
        let f = &self.field;
        if !(f.x_max >= f.x_min && f.y_max >= f.y_min) {
            return Err(CliError::Config("keys `field.x_min..x_max`, `field.y_min..y_max` must be ordered".into()));
        }
        Ok(())
    }
}

fn key_error(key: &str, e: karman_core::Error) -> CliError {
    CliError::Config(format!("key `{key}`: {e}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_takes_defaults() {
        let cfg = RunConfig::parse("").unwrap();
        assert_eq!(cfg, RunConfig::default());
        assert_eq!(cfg.solve.modes, 32);
        assert_eq!(cfg.solve.grid, 256);
    }

    #[test]
    fn unknown_key_is_rejected_with_location() {
        let err = RunConfig::parse("[solve]\nmodes = 8\nbogus = 1\n").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("bogus") && msg.contains("line 3"), "{msg}");
    }

    #[test]
    fn invalid_kernel_parameter_names_the_key() {
        let err = RunConfig::parse("[kernel]\nkind = \"gsqg\"\nbeta = 1.5\n").unwrap_err();
        assert!(err.to_string().contains("kernel.beta"), "{err}");
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn resolved_config_round_trips() {
        let cfg = RunConfig::parse("threads = 2\n[kernel]\nkind = \"qgsw\"\nlambda = 2.0\n[solve]\ngolden = \"ref.txt\"\n").unwrap();
        assert_eq!(RunConfig::parse(&cfg.resolved()).unwrap(), cfg);
    }

    #[test]
    fn unordered_checkpoints_are_rejected() {
        assert!(RunConfig::parse("[solve]\ncheckpoints = [0.02, 0.01]\n").is_err());
    }
}

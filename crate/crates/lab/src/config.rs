//! Scenario files: TOML with every key checked at load time.

use std::fmt;
use std::path::{Path, PathBuf};

use eps_core::dynamics::frames::AnalyticConstants;
use eps_core::dynamics::{Gauge, GridGeometry, InitialCondition, Interpolation};
use eps_core::gauge::{DriveRepresentation, HarmonicDrive, PhysicalParams};
use serde::Deserialize;

/// A load-time problem, located by dotted key and (when known) source line.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub struct ConfigError {
    pub key: String,
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.line, self.key.is_empty()) {
            (Some(line), false) => write!(f, "line {line}, key `{}`: {}", self.key, self.message),
            (Some(line), true) => write!(f, "line {line}: {}", self.message),
            (None, false) => write!(f, "key `{}`: {}", self.key, self.message),
            (None, true) => write!(f, "{}", self.message),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentName {
    CompareGauges,
    Transient,
    Convergence,
    DrudeSweep,
    AlgebraSelftest,
}

impl ExperimentName {
    pub const ALL: [ExperimentName; 5] = [
        ExperimentName::CompareGauges,
        ExperimentName::Transient,
        ExperimentName::Convergence,
        ExperimentName::DrudeSweep,
        ExperimentName::AlgebraSelftest,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ExperimentName::CompareGauges => "compare-gauges",
            ExperimentName::Transient => "transient",
            ExperimentName::Convergence => "convergence",
            ExperimentName::DrudeSweep => "drude-sweep",
            ExperimentName::AlgebraSelftest => "algebra-selftest",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|e| e.as_str() == name)
    }
}

impl fmt::Display for ExperimentName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GaugeChoice {
    A,
    Phi,
    #[default]
    Both,
}

impl GaugeChoice {
    pub fn gauges(self) -> Vec<Gauge> {
        match self {
            GaugeChoice::A => vec![Gauge::A],
            GaugeChoice::Phi => vec![Gauge::Phi],
            GaugeChoice::Both => vec![Gauge::A, Gauge::Phi],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverChoice {
    #[default]
    Characteristics,
    Grid,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RepresentationConfig {
    #[default]
    Real,
    Phasor,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InterpolationConfig {
    Linear,
    #[default]
    Cubic,
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ParamsConfig {
    pub m: f64,
    pub e: f64,
    pub c: f64,
    pub alpha: f64,
    pub hbar: f64,
    #[serde(rename = "N")]
    pub n: u32,
}

impl Default for ParamsConfig {
    fn default() -> Self {
        let p = PhysicalParams::default();
        ParamsConfig { m: p.m, e: p.e, c: p.c, alpha: p.alpha, hbar: p.hbar, n: p.n }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DriveConfig {
    #[serde(rename = "E0")]
    pub e0: f64,
    pub omega: f64,
    pub phase: f64,
    pub representation: RepresentationConfig,
}

impl Default for DriveConfig {
    fn default() -> Self {
        DriveConfig { e0: 0.1, omega: 2.0, phase: 0.0, representation: RepresentationConfig::Real }
    }
}

/// Initial Wigner function, given in the A-gauge; φ-gauge runs use the same
/// physical state, shifted by the gauge momentum offset at `t = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InitialConfig {
    Gaussian {
        #[serde(default)]
        q0: f64,
        #[serde(default)]
        p0: f64,
        #[serde(default = "one")]
        sq: f64,
        #[serde(default = "one")]
        sp: f64,
    },
    DeltaLine {
        #[serde(default = "one")]
        c_norm: f64,
        #[serde(default = "half")]
        k: f64,
        #[serde(default = "one")]
        a: f64,
        #[serde(default = "default_sp")]
        sp: f64,
    },
}

fn one() -> f64 {
    1.0
}
fn half() -> f64 {
    0.5
}
fn default_sp() -> f64 {
    AnalyticConstants::default().sp
}

impl Default for InitialConfig {
    fn default() -> Self {
        InitialConfig::Gaussian { q0: 0.0, p0: 0.0, sq: 1.0, sp: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    /// Size the domain so the packet stays `margin` widths inside it.
    pub auto: bool,
    pub margin: f64,
    pub nq: usize,
    pub np: usize,
    pub q_min: Option<f64>,
    pub q_max: Option<f64>,
    pub p_min: Option<f64>,
    pub p_max: Option<f64>,
    pub interpolation: InterpolationConfig,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            auto: true,
            margin: 8.0,
            nq: 128,
            np: 128,
            q_min: None,
            q_max: None,
            p_min: None,
            p_max: None,
            interpolation: InterpolationConfig::Cubic,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TimeConfig {
    /// Final time; defaults to the shortest horizon the fit window allows.
    pub horizon: Option<f64>,
    /// Step (grid) and sampling interval; defaults to `T/200` or `1/(200α)`.
    pub dt: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: PathBuf,
    /// Write final grids as CSV and binary dumps.
    pub grid_snapshots: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig { dir: PathBuf::from("out"), grid_snapshots: true }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub omegas: Vec<f64>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig { omegas: vec![0.0, 0.5, 1.0, 2.0, 4.0] }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConvergenceConfig {
    /// Points per axis at each level; each level halves the step.
    pub levels: Vec<usize>,
    /// Step at the coarsest level; defaults to `T/50` or `1/(50α)`.
    pub coarse_dt: Option<f64>,
}

impl Default for ConvergenceConfig {
    fn default() -> Self {
        ConvergenceConfig { levels: vec![64, 128, 256], coarse_dt: None }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub experiment: Option<ExperimentName>,
    pub gauge: GaugeChoice,
    pub solver: SolverChoice,
    /// Seed for randomized checks; echoed in reports.
    pub seed: Option<u64>,
    pub params: ParamsConfig,
    pub drive: DriveConfig,
    pub initial: InitialConfig,
    pub grid: GridConfig,
    pub time: TimeConfig,
    pub output: OutputConfig,
    pub sweep: SweepConfig,
    pub convergence: ConvergenceConfig,
}

impl ScenarioConfig {
    /// Parses and validates, resolving diagnostics against `source`.
    pub fn from_toml(source: &str) -> Result<Self, ConfigError> {
        let cfg: ScenarioConfig = toml::from_str(source).map_err(|e| parse_error(source, &e))?;
        cfg.validate().map_err(|(key, message)| ConfigError { line: locate_key(source, &key), key, message })?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let source =
            std::fs::read_to_string(path).map_err(|e| anyhow::anyhow!("cannot read config {}: {e}", path.display()))?;
        Self::from_toml(&source).map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))
    }

    pub fn physical_params(&self) -> PhysicalParams {
        let p = self.params;
        PhysicalParams { m: p.m, e: p.e, c: p.c, alpha: p.alpha, hbar: p.hbar, n: p.n }
    }

    pub fn harmonic_drive(&self) -> HarmonicDrive {
        let d = self.drive;
        HarmonicDrive {
            e0: d.e0,
            omega: d.omega,
            phase: d.phase,
            representation: match d.representation {
                RepresentationConfig::Real => DriveRepresentation::RealCosine,
                RepresentationConfig::Phasor => DriveRepresentation::ComplexPhasor,
            },
        }
    }

    pub fn initial_condition(&self) -> InitialCondition {
        match self.initial {
            InitialConfig::Gaussian { q0, p0, sq, sp } => InitialCondition::gaussian(q0, p0, sq, sp),
            InitialConfig::DeltaLine { c_norm, k, a, sp } => InitialCondition::MollifiedDeltaLine {
                constants: AnalyticConstants { c_norm, k, a, sp },
                params: self.physical_params(),
            },
        }
    }

    pub fn interpolation(&self) -> Interpolation {
        match self.grid.interpolation {
            InterpolationConfig::Linear => Interpolation::Linear,
            InterpolationConfig::Cubic => Interpolation::Cubic,
        }
    }

    /// The explicit geometry when `grid.auto = false`.
    pub fn fixed_geometry(&self) -> Option<GridGeometry> {
        let g = &self.grid;
        if g.auto {
            return None;
        }
        Some(GridGeometry { q_min: g.q_min?, q_max: g.q_max?, p_min: g.p_min?, p_max: g.p_max?, nq: g.nq, np: g.np })
    }

    /// Experiment to run: the override if given, else the configured one.
    pub fn resolve_experiment(&self, overridden: Option<ExperimentName>) -> Result<ExperimentName, ConfigError> {
        overridden.or(self.experiment).ok_or_else(|| ConfigError {
            key: "experiment".into(),
            line: None,
            message: "no experiment named in the config or on the command line".into(),
        })
    }

    /// Every module-level precondition, reported against its config key.
    pub fn validate(&self) -> Result<(), (String, String)> {
        let err = |key: &str, msg: &str| Err((key.to_string(), msg.to_string()));
        if let Err(eps_core::Error::InvalidParameter { name, reason }) = self.physical_params().validate() {
            return err(&format!("params.{name}"), reason);
        }
        if let Err(eps_core::Error::InvalidParameter { name, reason }) = self.harmonic_drive().validate() {
            return err(&format!("drive.{name}"), reason);
        }
        match self.initial {
            InitialConfig::Gaussian { q0, p0, sq, sp } => {
                if !(q0.is_finite() && p0.is_finite()) {
                    return err("initial.q0", "packet center must be finite");
                }
                if !(sq > 0.0 && sq.is_finite()) {
                    return err("initial.sq", "width must be positive");
                }
                if !(sp > 0.0 && sp.is_finite()) {
                    return err("initial.sp", "width must be positive");
                }
            }
            InitialConfig::DeltaLine { a, sp, .. } => {
                if a == 0.0 {
                    return err("initial.a", "a = 0 leaves the profile undefined");
                }
                if !(sp > 0.0) {
                    return err("initial.sp", "mollifier width must be positive");
                }
                if self.params.alpha <= 0.0 {
                    return err("params.alpha", "the delta-line profile needs alpha > 0");
                }
            }
        }
        let g = &self.grid;
        if g.nq < eps_core::dynamics::MIN_POINTS || g.np < eps_core::dynamics::MIN_POINTS {
            return err("grid.nq", "need at least 8 points per axis");
        }
        if !(g.margin > 0.0 && g.margin.is_finite()) {
            return err("grid.margin", "margin must be positive");
        }
        let bounds = [g.q_min, g.q_max, g.p_min, g.p_max];
        if g.auto {
            if bounds.iter().any(Option::is_some) {
                return err("grid.auto", "explicit bounds conflict with auto = true");
            }
        } else {
            for (name, b) in ["grid.q_min", "grid.q_max", "grid.p_min", "grid.p_max"].iter().zip(bounds) {
                if b.is_none() {
                    return err(name, "required when auto = false");
                }
            }
            if self.fixed_geometry().is_some_and(|geo| geo.validate().is_err()) {
                return err("grid", "bounds must be finite and strictly ordered");
            }
        }
        if let Some(h) = self.time.horizon {
            if !(h > 0.0 && h.is_finite()) {
                return err("time.horizon", "must be positive");
            }
        }
        if let Some(dt) = self.time.dt {
            if !(dt > 0.0 && dt.is_finite()) {
                return err("time.dt", "must be positive");
            }
        }
        if let Some(dt) = self.convergence.coarse_dt {
            if !(dt > 0.0 && dt.is_finite()) {
                return err("convergence.coarse_dt", "must be positive");
            }
        }
        if let Some(experiment) = self.experiment {
            self.validate_for(experiment)?;
        }
        Ok(())
    }

    /// Preconditions specific to one experiment.
    pub fn validate_for(&self, experiment: ExperimentName) -> Result<(), (String, String)> {
        let err = |key: &str, msg: &str| Err((key.to_string(), msg.to_string()));
        let needs_real = experiment != ExperimentName::AlgebraSelftest;
        if needs_real && self.drive.representation == RepresentationConfig::Phasor {
            return err("drive.representation", "simulations need a real drive; phasors are for algebra checks");
        }
        let is_delta = matches!(self.initial, InitialConfig::DeltaLine { .. });
        match experiment {
            ExperimentName::CompareGauges | ExperimentName::DrudeSweep => {
                if self.drive.e0 == 0.0 {
                    return err("drive.E0", "zero drive cannot define a conductivity");
                }
                if self.params.alpha <= 0.0 {
                    return err("params.alpha", "conductivity needs damping (alpha > 0)");
                }
                if experiment == ExperimentName::DrudeSweep {
                    if self.sweep.omegas.is_empty() {
                        return err("sweep.omegas", "frequency list is empty");
                    }
                    if self.sweep.omegas.iter().any(|w| !(*w >= 0.0 && w.is_finite())) {
                        return err("sweep.omegas", "frequencies must be non-negative and finite");
                    }
                    if self.sweep.omegas.contains(&0.0) && self.drive.phase.cos().abs() < 1e-12 {
                        return err("drive.phase", "static field E0*cos(phase) vanishes at omega = 0");
                    }
                } else if self.drive.omega == 0.0 && self.drive.phase.cos().abs() < 1e-12 {
                    return err("drive.phase", "static field E0*cos(phase) vanishes");
                }
            }
            ExperimentName::Transient => {
                if self.drive.e0 != 0.0 {
                    return err("drive.E0", "the transient experiment runs without drive (E0 = 0)");
                }
                if self.params.alpha <= 0.0 {
                    return err("params.alpha", "transient decay needs alpha > 0");
                }
            }
            ExperimentName::Convergence => {
                if self.convergence.levels.len() < 2 {
                    return err("convergence.levels", "need at least two refinement levels");
                }
                if self.convergence.levels.iter().any(|&n| n < eps_core::dynamics::MIN_POINTS) {
                    return err("convergence.levels", "need at least 8 points per axis");
                }
                if self.convergence.levels.windows(2).any(|w| w[1] <= w[0]) {
                    return err("convergence.levels", "levels must increase");
                }
                if is_delta && self.grid.auto {
                    return err("grid.auto", "automatic bounds need a Gaussian initial condition");
                }
            }
            ExperimentName::AlgebraSelftest => {}
        }
        if is_delta && self.grid.auto && experiment != ExperimentName::AlgebraSelftest {
            return err("grid.auto", "automatic bounds need a Gaussian initial condition");
        }
        Ok(())
    }
}

fn parse_error(source: &str, e: &toml::de::Error) -> ConfigError {
    let line = e.span().map(|s| line_of_offset(source, s.start));
    ConfigError { key: String::new(), line, message: e.message().trim().to_string() }
}

fn line_of_offset(source: &str, offset: usize) -> usize {
    source[..offset.min(source.len())].bytes().filter(|&b| b == b'\n').count() + 1
}

/// Line declaring a dotted key (`table.key`, or a bare top-level key), or the
/// line of its table header when the key itself was defaulted.
pub fn locate_key(source: &str, key: &str) -> Option<usize> {
    let (table, leaf) = match key.rsplit_once('.') {
        Some((t, l)) => (t, l),
        None => ("", key),
    };
    let mut current = String::new();
    let mut header_line = None;
    for (n, raw) in source.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            current = name.trim().to_string();
            if current == table || (table.is_empty() && current == key) {
                header_line = Some(n + 1);
            }
            continue;
        }
        if current == table {
            if let Some((k, _)) = line.split_once('=') {
                if k.trim().trim_matches('"') == leaf {
                    return Some(n + 1);
                }
            }
        }
    }
    header_line
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn locate_key_finds_table_entries() {
        let src = "experiment = \"transient\"\n[params]\nm = 1\nalpha = 0 # none\n[drive]\nE0 = 0\n";
        assert_eq!(locate_key(src, "params.alpha"), Some(4));
        assert_eq!(locate_key(src, "drive.E0"), Some(6));
        assert_eq!(locate_key(src, "drive.omega"), Some(5));
        assert_eq!(locate_key(src, "experiment"), Some(1));
        assert_eq!(locate_key(src, "grid.nq"), None);
    }
}

//! The named experiments. Each returns a serializable report with a built-in
//! pass/fail verdict; [`run`] writes the artifacts.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use eps_core::algebra::{
    build_sn_hamiltonian, build_wigner_hamiltonian, calibrate_sign, conjugate_by_wigner_unitary, sn_from_polynomial,
    transport_coefficients, wigner_from_polynomial, GeneratorSign, HamiltonianSpec, OperatorPolynomial,
    PhasePolynomial,
};
use eps_core::dynamics::{
    characteristics_on_grid, covering_geometry, DisplacementWarning, Ensemble, Gauge, GridGeometry, InitialCondition,
    Interpolation, PhaseGrid, SemiLagrangian, TransportField,
};
use eps_core::gauge::{gauge_momentum_shift, HarmonicDrive, PhysicalParams};
use eps_core::observables::{
    conductivity_timeseries, decay_rate, drude_conductivity, expectation, mean_velocity, minimum_horizon,
    ConductivityEstimate, State,
};
use eps_core::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::{ExperimentName, ScenarioConfig, SolverChoice};
use crate::io::{self, Float17, SeriesRow};

/// Gauge gap allowed between characteristic runs, relative to `|σ_ref|`.
pub const GAUGE_GAP_TOLERANCE_CHARACTERISTICS: f64 = 1e-6;
/// Gauge gap allowed between grid runs, relative to `|σ_ref|`.
pub const GAUGE_GAP_TOLERANCE_GRID: f64 = 1e-2;
/// Relative error allowed on the fitted transient decay rate.
pub const TRANSIENT_RATE_TOLERANCE: f64 = 5e-3;
/// Smallest acceptable observed order of the grid solver.
pub const MIN_CONVERGENCE_ORDER: f64 = 1.8;
/// Largest acceptable relative mass drift of the grid solver.
pub const MASS_DRIFT_TOLERANCE: f64 = 1e-6;
/// Sweep tolerance: relative on `|σ|`, absolute (radians) on its phase.
pub const SWEEP_TOLERANCE: f64 = 1e-2;
/// Coefficient tolerance of the operator-algebra checks.
pub const ALGEBRA_TOLERANCE: f64 = 1e-12;

/// Number of random times per gauge in the algebra self-test.
pub const SELFTEST_TIMES: usize = 10;
/// Number of random quadratic Hamiltonians in the algebra self-test.
pub const SELFTEST_QUADRATICS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Solver {
    Characteristics,
    Grid,
}

impl Solver {
    pub fn name(self) -> &'static str {
        match self {
            Solver::Characteristics => "characteristics",
            Solver::Grid => "grid",
        }
    }

    pub fn from_choice(choice: SolverChoice) -> Vec<Solver> {
        match choice {
            SolverChoice::Characteristics => vec![Solver::Characteristics],
            SolverChoice::Grid => vec![Solver::Grid],
            SolverChoice::Both => vec![Solver::Characteristics, Solver::Grid],
        }
    }
}

pub fn gauge_name(gauge: Gauge) -> &'static str {
    match gauge {
        Gauge::A => "A",
        Gauge::Phi => "phi",
        Gauge::Custom => "custom",
    }
}

fn serialize_gauge<S: serde::Serializer>(g: &Gauge, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(gauge_name(*g))
}

/// Sampling interval / grid step: `T/200`, or `1/(200α)` for a static field.
pub fn default_dt(drive: &HarmonicDrive, params: &PhysicalParams) -> f64 {
    match drive.period() {
        Some(t) => t / 200.0,
        None if params.alpha > 0.0 => 1.0 / (200.0 * params.alpha),
        None => 0.01,
    }
}

/// The same physical state in the requested gauge: the φ-gauge canonical
/// momentum exceeds the A-gauge one by the gauge momentum shift.
pub fn initial_for_gauge(
    w0: &InitialCondition,
    gauge: Gauge,
    drive: &HarmonicDrive,
    params: &PhysicalParams,
) -> anyhow::Result<InitialCondition> {
    match gauge {
        Gauge::Phi => {
            if drive.is_phasor() {
                bail!("matched initial data needs a real drive");
            }
            let shift = gauge_momentum_shift(drive, params, 0.0)?.re;
            Ok(w0.clone().translated(0.0, shift))
        }
        _ => Ok(w0.clone()),
    }
}

/// Configured bounds, or bounds that keep the packet inside through `horizon`.
pub fn geometry_for(
    cfg: &ScenarioConfig,
    w0: &InitialCondition,
    field: &TransportField,
    horizon: f64,
    nq: usize,
    np: usize,
) -> anyhow::Result<GridGeometry> {
    match cfg.fixed_geometry() {
        Some(g) => Ok(GridGeometry { nq, np, ..g }),
        None => {
            covering_geometry(w0, field, horizon, cfg.grid.margin, nq, np).context("sizing the grid around the packet")
        }
    }
}

/// A mean-value time series from one solver.
#[derive(Debug, Clone)]
pub struct Simulation {
    pub rows: Vec<SeriesRow>,
    pub final_grid: Option<PhaseGrid>,
    pub warnings: Vec<DisplacementWarning>,
    /// Largest relative mass change over the run (grid solver only).
    pub mass_drift: Option<f64>,
}

impl Simulation {
    pub fn velocity_samples(&self) -> Vec<(f64, f64)> {
        self.rows.iter().map(|r| (r.t, r.mean_qdot)).collect()
    }
}

/// Runs `solver` from `w0` to `horizon`, sampling every step.
///
/// The step is shrunk so that `horizon` is hit exactly.
pub fn simulate(
    field: &TransportField,
    w0: &InitialCondition,
    solver: Solver,
    geometry: GridGeometry,
    horizon: f64,
    dt: f64,
    interpolation: Interpolation,
) -> anyhow::Result<Simulation> {
    if !(horizon > 0.0 && dt > 0.0) {
        bail!("horizon and dt must be positive");
    }
    let steps = ((horizon / dt) - 1e-9).ceil().max(1.0) as usize;
    let dt = horizon / steps as f64;
    let drive = *field.drive();
    match solver {
        Solver::Characteristics => {
            let ensemble = Ensemble::sample(w0, &geometry)?;
            let rows = (0..=steps)
                .map(|k| {
                    let t = k as f64 * dt;
                    let (q, p) = ensemble.mean_position(field, t)?;
                    let v = mean_velocity(field, State::Ensemble(&ensemble, t))?;
                    Ok(SeriesRow { t, mean_q: q.re, mean_p: p.re, mean_qdot: v.re, e_of_t: drive.field(t).re })
                })
                .collect::<eps_core::Result<Vec<_>>>()?;
            Ok(Simulation { rows, final_grid: None, warnings: Vec::new(), mass_drift: None })
        }
        Solver::Grid => {
            let grid = PhaseGrid::from_fn(geometry, 0.0, |q, p| w0.evaluate_real(q, p))?;
            let mass0 = grid.mass();
            let row = |g: &PhaseGrid| -> eps_core::Result<SeriesRow> {
                Ok(SeriesRow {
                    t: g.t(),
                    mean_q: expectation(|q, _| q, g)?,
                    mean_p: expectation(|_, p| p, g)?,
                    mean_qdot: mean_velocity(field, State::Grid(g))?.re,
                    e_of_t: drive.field(g.t()).re,
                })
            };
            let mut rows = vec![row(&grid)?];
            let mut drift: f64 = 0.0;
            let evolution = SemiLagrangian::new(interpolation).run(&grid, field, dt, steps, |g| {
                drift = drift.max((g.mass() - mass0).abs() / mass0);
                rows.push(row(g)?);
                Ok(())
            })?;
            Ok(Simulation {
                rows,
                final_grid: Some(evolution.grid),
                warnings: evolution.warnings,
                mass_drift: Some(drift),
            })
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GeometryReport {
    pub q_min: Float17,
    pub q_max: Float17,
    pub p_min: Float17,
    pub p_max: Float17,
    pub nq: usize,
    pub np: usize,
}

impl From<&GridGeometry> for GeometryReport {
    fn from(g: &GridGeometry) -> Self {
        GeometryReport {
            q_min: Float17(g.q_min),
            q_max: Float17(g.q_max),
            p_min: Float17(g.p_min),
            p_max: Float17(g.p_max),
            nq: g.nq,
            np: g.np,
        }
    }
}

/// Conductivity of one run, in the documented summary layout.
#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    #[serde(serialize_with = "serialize_gauge")]
    pub gauge: Gauge,
    pub solver: Solver,
    pub sigma_re: Float17,
    pub sigma_im: Float17,
    pub magnitude: Float17,
    pub phase: Float17,
    pub residual: Float17,
    pub reference_re: Float17,
    pub reference_im: Float17,
    pub window: [Float17; 2],
    pub relative_error: Float17,
    pub noisy_fit: bool,
    pub displacement_warnings: usize,
    pub mass_drift: Option<Float17>,
    pub geometry: GeometryReport,
    /// Grid cells per packet width along the worse-resolved axis; below ~1
    /// the sampled packet no longer has the intended moments.
    pub cells_per_width: Option<Float17>,
}

impl RunSummary {
    fn new(
        est: &ConductivityEstimate,
        solver: Solver,
        sim: &Simulation,
        geometry: &GridGeometry,
        w0: &InitialCondition,
    ) -> Self {
        RunSummary {
            gauge: est.gauge,
            solver,
            sigma_re: Float17(est.sigma.re),
            sigma_im: Float17(est.sigma.im),
            magnitude: Float17(est.magnitude),
            phase: Float17(est.phase),
            residual: Float17(est.fit_residual),
            reference_re: Float17(est.reference.re),
            reference_im: Float17(est.reference.im),
            window: [Float17(est.window.0), Float17(est.window.1)],
            relative_error: Float17(est.relative_error()),
            noisy_fit: est.noisy_fit,
            displacement_warnings: sim.warnings.len(),
            mass_drift: sim.mass_drift.map(Float17),
            geometry: geometry.into(),
            cells_per_width: w0
                .gaussian_moments()
                .map(|(_, _, sq, sp)| Float17((sq / geometry.dq()).min(sp / geometry.dp()))),
        }
    }

    pub fn sigma(&self) -> Complex64 {
        Complex64::new(self.sigma_re.0, self.sigma_im.0)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GaugeGap {
    pub solver: Solver,
    pub relative_gap: Float17,
    pub tolerance: Float17,
    pub pass: bool,
}

/// An artifact produced alongside the JSON summary.
#[derive(Debug, Clone)]
pub enum Artifact {
    Series { name: String, rows: Vec<SeriesRow> },
    Grid { name: String, grid: PhaseGrid },
    Table { name: String, header: String, rows: Vec<Vec<f64>> },
}

#[derive(Debug, Clone, Serialize)]
pub struct CompareGaugesReport {
    pub experiment: &'static str,
    pub runs: Vec<RunSummary>,
    pub gaps: Vec<GaugeGap>,
    pub passed: bool,
    #[serde(skip)]
    pub artifacts: Vec<Artifact>,
}

struct Setup {
    params: PhysicalParams,
    drive: HarmonicDrive,
    w0: InitialCondition,
    horizon: f64,
    dt: f64,
}

fn setup(cfg: &ScenarioConfig, default_horizon: impl Fn(&HarmonicDrive, &PhysicalParams) -> f64) -> Setup {
    let params = cfg.physical_params();
    let drive = cfg.harmonic_drive();
    Setup {
        params,
        drive,
        w0: cfg.initial_condition(),
        horizon: cfg.time.horizon.unwrap_or_else(|| default_horizon(&drive, &params)),
        dt: cfg.time.dt.unwrap_or_else(|| default_dt(&drive, &params)),
    }
}

fn check(cfg: &ScenarioConfig, experiment: ExperimentName) -> anyhow::Result<()> {
    cfg.validate_for(experiment).map_err(|(key, msg)| anyhow::anyhow!("key `{key}`: {msg}"))
}

/// Runs one gauge with one solver and fits the conductivity.
#[allow(clippy::too_many_arguments)]
pub fn conductivity_run(
    cfg: &ScenarioConfig,
    params: &PhysicalParams,
    drive: &HarmonicDrive,
    w0: &InitialCondition,
    gauge: Gauge,
    solver: Solver,
    horizon: f64,
    dt: f64,
) -> anyhow::Result<(RunSummary, Simulation)> {
    let field = TransportField::for_gauge(gauge, *params, *drive).context("Kanai gauge expected")?;
    let w0g = initial_for_gauge(w0, gauge, drive, params)?;
    let geometry = geometry_for(cfg, &w0g, &field, horizon, cfg.grid.nq, cfg.grid.np)?;
    let sim = simulate(&field, &w0g, solver, geometry, horizon, dt, cfg.interpolation())
        .with_context(|| format!("{} gauge, {} solver", gauge_name(gauge), solver.name()))?;
    let est = conductivity_timeseries(&sim.velocity_samples(), drive, params, gauge, None)
        .with_context(|| format!("fitting the {} gauge {} run", gauge_name(gauge), solver.name()))?;
    Ok((RunSummary::new(&est, solver, &sim, &geometry, &w0g), sim))
}

pub fn compare_gauges(cfg: &ScenarioConfig) -> anyhow::Result<CompareGaugesReport> {
    check(cfg, ExperimentName::CompareGauges)?;
    let s = setup(cfg, minimum_horizon);
    let reference = drude_conductivity(&s.params, s.drive.omega)?;
    let mut runs = Vec::new();
    let mut artifacts = Vec::new();
    let solvers = Solver::from_choice(cfg.solver);
    for &solver in &solvers {
        for gauge in cfg.gauge.gauges() {
            let (summary, sim) = conductivity_run(cfg, &s.params, &s.drive, &s.w0, gauge, solver, s.horizon, s.dt)?;
            let tag = format!("{}_{}", gauge_name(gauge), solver.name());
            artifacts.push(Artifact::Series { name: format!("series_{tag}.csv"), rows: sim.rows });
            if let Some(grid) = sim.final_grid {
                if cfg.output.grid_snapshots {
                    artifacts.push(Artifact::Grid { name: format!("grid_{tag}"), grid });
                }
            }
            runs.push(summary);
        }
    }
    let gaps: Vec<GaugeGap> = solvers
        .iter()
        .filter_map(|&solver| {
            let a = runs.iter().find(|r| r.solver == solver && r.gauge == Gauge::A)?;
            let b = runs.iter().find(|r| r.solver == solver && r.gauge == Gauge::Phi)?;
            let gap = (a.sigma() - b.sigma()).norm() / reference.norm();
            let tolerance = match solver {
                Solver::Characteristics => GAUGE_GAP_TOLERANCE_CHARACTERISTICS,
                Solver::Grid => GAUGE_GAP_TOLERANCE_GRID,
            };
            Some(GaugeGap { solver, relative_gap: Float17(gap), tolerance: Float17(tolerance), pass: gap < tolerance })
        })
        .collect();
    let passed = gaps.iter().all(|g| g.pass);
    Ok(CompareGaugesReport { experiment: "compare-gauges", runs, gaps, passed, artifacts })
}

#[derive(Debug, Clone, Serialize)]
pub struct TransientRun {
    #[serde(serialize_with = "serialize_gauge")]
    pub gauge: Gauge,
    pub solver: Solver,
    pub rate: Float17,
    pub expected: Float17,
    pub relative_error: Float17,
    pub window: [Float17; 2],
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct TransientReport {
    pub experiment: &'static str,
    pub runs: Vec<TransientRun>,
    pub tolerance: Float17,
    pub passed: bool,
    #[serde(skip)]
    pub artifacts: Vec<Artifact>,
}

/// Undriven decay of `⟨q̇⟩`, fitted over `[1/α, 5/α]`.
pub fn transient(cfg: &ScenarioConfig) -> anyhow::Result<TransientReport> {
    check(cfg, ExperimentName::Transient)?;
    let s = setup(cfg, |_, p| 5.0 / p.alpha);
    let window = (1.0 / s.params.alpha, (5.0 / s.params.alpha).min(s.horizon));
    let mut runs = Vec::new();
    let mut artifacts = Vec::new();
    for solver in Solver::from_choice(cfg.solver) {
        for gauge in cfg.gauge.gauges() {
            let field = TransportField::for_gauge(gauge, s.params, s.drive).context("Kanai gauge expected")?;
            let geometry = geometry_for(cfg, &s.w0, &field, s.horizon, cfg.grid.nq, cfg.grid.np)?;
            let sim = simulate(&field, &s.w0, solver, geometry, s.horizon, s.dt, cfg.interpolation())?;
            let rate = decay_rate(&sim.velocity_samples(), window)
                .with_context(|| format!("fitting the decay of the {} run", solver.name()))?;
            let expected = -s.params.alpha;
            let rel = ((rate - expected) / expected).abs();
            runs.push(TransientRun {
                gauge,
                solver,
                rate: Float17(rate),
                expected: Float17(expected),
                relative_error: Float17(rel),
                window: [Float17(window.0), Float17(window.1)],
                pass: rel < TRANSIENT_RATE_TOLERANCE,
            });
            let tag = format!("{}_{}", gauge_name(gauge), solver.name());
            artifacts.push(Artifact::Series { name: format!("series_{tag}.csv"), rows: sim.rows });
        }
    }
    let passed = runs.iter().all(|r| r.pass);
    Ok(TransientReport {
        experiment: "transient",
        runs,
        tolerance: Float17(TRANSIENT_RATE_TOLERANCE),
        passed,
        artifacts,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceLevel {
    pub n: usize,
    pub dt: Float17,
    pub relative_l1_error: Float17,
    pub mass_drift: Float17,
    pub displacement_warnings: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceLadder {
    #[serde(serialize_with = "serialize_gauge")]
    pub gauge: Gauge,
    pub horizon: Float17,
    pub geometry: GeometryReport,
    /// Fraction of the initial packet inside the domain.
    pub initial_mass_inside: Option<Float17>,
    pub levels: Vec<ConvergenceLevel>,
    pub orders: Vec<Float17>,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceReport {
    pub experiment: &'static str,
    pub min_order: Float17,
    pub mass_drift_tolerance: Float17,
    pub ladders: Vec<ConvergenceLadder>,
    pub passed: bool,
    #[serde(skip)]
    pub artifacts: Vec<Artifact>,
}

/// Grid solver against characteristics on a fixed domain at each level.
pub fn convergence(cfg: &ScenarioConfig) -> anyhow::Result<ConvergenceReport> {
    check(cfg, ExperimentName::Convergence)?;
    let s = setup(cfg, |d, p| d.period().map_or(2.0 / p.alpha.max(1e-12), |t| 2.0 * t));
    let coarse_dt = cfg.convergence.coarse_dt.unwrap_or(s.dt * 4.0);
    let levels = &cfg.convergence.levels;
    let mut ladders = Vec::new();
    let mut artifacts = Vec::new();
    for gauge in cfg.gauge.gauges() {
        let field = TransportField::for_gauge(gauge, s.params, s.drive).context("Kanai gauge expected")?;
        let w0g = initial_for_gauge(&s.w0, gauge, &s.drive, &s.params)?;
        let base = geometry_for(cfg, &w0g, &field, s.horizon, levels[0], levels[0])?;
        let mut rows = Vec::new();
        for &n in levels {
            let geometry = GridGeometry { nq: n, np: n, ..base };
            let dt = coarse_dt * levels[0] as f64 / n as f64;
            let sim = simulate(&field, &w0g, Solver::Grid, geometry, s.horizon, dt, cfg.interpolation())?;
            let grid = sim.final_grid.as_ref().context("grid run without final grid")?;
            let exact = characteristics_on_grid(&w0g, &field, grid.t(), geometry)?;
            let err = grid.l1_distance(&exact)? / exact.l1_norm();
            rows.push(ConvergenceLevel {
                n,
                dt: Float17(s.horizon / sim.rows.len().saturating_sub(1).max(1) as f64),
                relative_l1_error: Float17(err),
                mass_drift: Float17(sim.mass_drift.unwrap_or(0.0)),
                displacement_warnings: sim.warnings.len(),
            });
        }
        let orders: Vec<f64> = rows
            .windows(2)
            .map(|w| (w[0].relative_l1_error.0 / w[1].relative_l1_error.0).ln() / (w[1].n as f64 / w[0].n as f64).ln())
            .collect();
        let pass = orders.iter().all(|o| *o >= MIN_CONVERGENCE_ORDER)
            && rows.iter().all(|r| r.mass_drift.0 < MASS_DRIFT_TOLERANCE);
        artifacts.push(Artifact::Table {
            name: format!("convergence_{}.csv", gauge_name(gauge)),
            header: "n,dt,relative_l1_error,mass_drift".into(),
            rows: rows.iter().map(|r| vec![r.n as f64, r.dt.0, r.relative_l1_error.0, r.mass_drift.0]).collect(),
        });
        ladders.push(ConvergenceLadder {
            gauge,
            horizon: Float17(s.horizon),
            geometry: (&base).into(),
            initial_mass_inside: w0g.mass_fraction_inside(&base).map(Float17),
            levels: rows,
            orders: orders.into_iter().map(Float17).collect(),
            pass,
        });
    }
    let passed = ladders.iter().all(|l| l.pass);
    Ok(ConvergenceReport {
        experiment: "convergence",
        min_order: Float17(MIN_CONVERGENCE_ORDER),
        mass_drift_tolerance: Float17(MASS_DRIFT_TOLERANCE),
        ladders,
        passed,
        artifacts,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepPoint {
    pub omega: Float17,
    #[serde(flatten)]
    pub run: RunSummary,
    pub reference_magnitude: Float17,
    pub reference_phase: Float17,
    pub magnitude_error: Float17,
    pub phase_error: Float17,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct DrudeSweepReport {
    pub experiment: &'static str,
    pub tolerance: Float17,
    pub points: Vec<SweepPoint>,
    pub passed: bool,
    #[serde(skip)]
    pub artifacts: Vec<Artifact>,
}

/// `σ(ω)` over the configured frequencies, each against the Drude value.
pub fn drude_sweep(cfg: &ScenarioConfig) -> anyhow::Result<DrudeSweepReport> {
    check(cfg, ExperimentName::DrudeSweep)?;
    let params = cfg.physical_params();
    let w0 = cfg.initial_condition();
    let mut points = Vec::new();
    for &omega in &cfg.sweep.omegas {
        let drive = HarmonicDrive { omega, ..cfg.harmonic_drive() };
        let horizon = cfg.time.horizon.unwrap_or_else(|| minimum_horizon(&drive, &params));
        let dt = cfg.time.dt.unwrap_or_else(|| default_dt(&drive, &params));
        for solver in Solver::from_choice(cfg.solver) {
            for gauge in cfg.gauge.gauges() {
                let (run, _) = conductivity_run(cfg, &params, &drive, &w0, gauge, solver, horizon, dt)
                    .with_context(|| format!("omega = {omega}"))?;
                let reference = drude_conductivity(&params, omega)?;
                let magnitude_error = (run.magnitude.0 - reference.norm()).abs() / reference.norm();
                let phase_error = (run.phase.0 - reference.arg()).abs();
                points.push(SweepPoint {
                    omega: Float17(omega),
                    reference_magnitude: Float17(reference.norm()),
                    reference_phase: Float17(reference.arg()),
                    magnitude_error: Float17(magnitude_error),
                    phase_error: Float17(phase_error),
                    pass: magnitude_error < SWEEP_TOLERANCE && phase_error < SWEEP_TOLERANCE,
                    run,
                });
            }
        }
    }
    let table = Artifact::Table {
        name: "drude_sweep.csv".into(),
        header: "omega,sigma_re,sigma_im,magnitude,phase,reference_re,reference_im,magnitude_error,phase_error".into(),
        rows: points
            .iter()
            .map(|p| {
                vec![
                    p.omega.0,
                    p.run.sigma_re.0,
                    p.run.sigma_im.0,
                    p.run.magnitude.0,
                    p.run.phase.0,
                    p.run.reference_re.0,
                    p.run.reference_im.0,
                    p.magnitude_error.0,
                    p.phase_error.0,
                ]
            })
            .collect(),
    };
    let passed = points.iter().all(|p| p.pass);
    Ok(DrudeSweepReport {
        experiment: "drude-sweep",
        tolerance: Float17(SWEEP_TOLERANCE),
        points,
        passed,
        artifacts: vec![table],
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct AlgebraCheck {
    pub name: &'static str,
    pub cases: usize,
    pub max_deviation: Float17,
    pub tolerance: Float17,
    pub pass: bool,
}

impl AlgebraCheck {
    fn new(name: &'static str, cases: usize, max_deviation: f64, tolerance: f64) -> Self {
        AlgebraCheck {
            name,
            cases,
            max_deviation: Float17(max_deviation),
            tolerance: Float17(tolerance),
            pass: max_deviation <= tolerance,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AlgebraReport {
    pub experiment: &'static str,
    pub seed: u64,
    pub generator_sign: &'static str,
    pub deviation_minus: Float17,
    pub deviation_plus: Float17,
    pub checks: Vec<AlgebraCheck>,
    pub passed: bool,
}

fn random_quadratic(rng: &mut ChaCha8Rng) -> PhasePolynomial {
    let keys = [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)];
    PhasePolynomial::from_terms(
        keys.iter().map(|&k| (k, Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))),
    )
}

/// Canonical commutators, Wigner-unitary equivalence, first-order structure
/// and ħ-independence of the transport field.
pub fn algebra_selftest(cfg: &ScenarioConfig) -> anyhow::Result<AlgebraReport> {
    check(cfg, ExperimentName::AlgebraSelftest)?;
    let seed = cfg.seed.unwrap_or(0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let params = cfg.physical_params();
    let drive = cfg.harmonic_drive();
    let hbar = params.hbar;
    let calibration = calibrate_sign(hbar)?;

    let ops = [
        OperatorPolynomial::q(hbar),
        OperatorPolynomial::p(hbar),
        OperatorPolynomial::pi_q(hbar),
        OperatorPolynomial::pi_p(hbar),
    ];
    let mut commutator_dev: f64 = 0.0;
    for (i, a) in ops.iter().enumerate() {
        for (j, b) in ops.iter().enumerate() {
            let expected = match (i, j) {
                (2, 0) | (3, 1) => OperatorPolynomial::constant(hbar, Complex64::new(0.0, -hbar)),
                (0, 2) | (1, 3) => OperatorPolynomial::constant(hbar, Complex64::new(0.0, hbar)),
                _ => OperatorPolynomial::zero(hbar),
            };
            let got = a.commutator(b)?;
            commutator_dev = commutator_dev.max(got.checked_sub(&expected)?.max_abs_coefficient());
        }
    }

    let mut checks = vec![AlgebraCheck::new("canonical_commutators", 16, commutator_dev, 0.0)];
    let mut max_pi_degree = 0u32;
    let mut hbar_dev: f64 = 0.0;
    let big = PhysicalParams { hbar: 10.0 * hbar, ..params };
    for (name, make) in [
        ("kanai_a_unitary_equivalence", HamiltonianSpec::kanai_a_gauge as fn(_, _) -> _),
        ("kanai_phi_unitary_equivalence", HamiltonianSpec::kanai_phi_gauge),
    ] {
        let spec = make(params, drive);
        let spec_big = make(big, drive);
        let mut dev: f64 = 0.0;
        for _ in 0..SELFTEST_TIMES {
            let t = rng.gen_range(0.0..10.0);
            let sn = build_sn_hamiltonian(&spec, t)?;
            let hw = build_wigner_hamiltonian(&spec, t)?;
            dev = dev.max(conjugate_by_wigner_unitary(&sn)?.max_relative_deviation(&hw));
            max_pi_degree = max_pi_degree.max(hw.max_pi_degree().unwrap_or(0));
            let f = transport_coefficients(&hw)?;
            let g = transport_coefficients(&build_wigner_hamiltonian(&spec_big, t)?)?;
            hbar_dev = hbar_dev.max(f.vq.max_relative_deviation(&g.vq)).max(f.vp.max_relative_deviation(&g.vp));
        }
        checks.push(AlgebraCheck::new(name, SELFTEST_TIMES, dev, ALGEBRA_TOLERANCE));
    }
    let mut quad_dev: f64 = 0.0;
    for _ in 0..SELFTEST_QUADRATICS {
        let h = random_quadratic(&mut rng);
        let hw = wigner_from_polynomial(&h, hbar);
        quad_dev =
            quad_dev.max(conjugate_by_wigner_unitary(&sn_from_polynomial(&h, hbar))?.max_relative_deviation(&hw));
        max_pi_degree = max_pi_degree.max(hw.max_pi_degree().unwrap_or(0));
        let f = transport_coefficients(&hw)?;
        let g = transport_coefficients(&wigner_from_polynomial(&h, 10.0 * hbar))?;
        hbar_dev = hbar_dev.max(f.vq.max_relative_deviation(&g.vq)).max(f.vp.max_relative_deviation(&g.vp));
    }
    let cases = 2 * SELFTEST_TIMES + SELFTEST_QUADRATICS;
    checks.push(AlgebraCheck::new(
        "random_quadratic_unitary_equivalence",
        SELFTEST_QUADRATICS,
        quad_dev,
        ALGEBRA_TOLERANCE,
    ));
    checks.push(AlgebraCheck::new(
        "wigner_pi_degree_above_one",
        cases,
        f64::from(max_pi_degree.saturating_sub(1)),
        0.0,
    ));
    checks.push(AlgebraCheck::new("transport_hbar_invariance", cases, hbar_dev, ALGEBRA_TOLERANCE));
    checks.push(AlgebraCheck::new(
        "generator_sign_calibration",
        1,
        calibration.deviation_minus.min(calibration.deviation_plus),
        ALGEBRA_TOLERANCE,
    ));
    let passed = checks.iter().all(|c| c.pass);
    Ok(AlgebraReport {
        experiment: "algebra-selftest",
        seed,
        generator_sign: match calibration.sign {
            GeneratorSign::Minus => "minus",
            GeneratorSign::Plus => "plus",
        },
        deviation_minus: Float17(calibration.deviation_minus),
        deviation_plus: Float17(calibration.deviation_plus),
        checks,
        passed,
    })
}

/// What a run produced.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub experiment: ExperimentName,
    pub passed: bool,
    pub summary_path: PathBuf,
    pub files: Vec<PathBuf>,
}

fn write_artifacts(dir: &Path, artifacts: &[Artifact], files: &mut Vec<PathBuf>) -> anyhow::Result<()> {
    for a in artifacts {
        match a {
            Artifact::Series { name, rows } => {
                let path = dir.join(name);
                io::write_series_csv(io::create(&path)?, rows)?;
                files.push(path);
            }
            Artifact::Grid { name, grid } => {
                let csv = dir.join(format!("{name}.csv"));
                io::write_grid_csv(io::create(&csv)?, grid)?;
                let bin = dir.join(format!("{name}.bin"));
                io::write_grid_binary(io::create(&bin)?, grid)?;
                files.extend([csv, bin]);
            }
            Artifact::Table { name, header, rows } => {
                let path = dir.join(name);
                let mut text = format!("{header}\n");
                for r in rows {
                    text.push_str(&r.iter().map(|x| io::fmt_f64(*x)).collect::<Vec<_>>().join(","));
                    text.push('\n');
                }
                std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
                files.push(path);
            }
        }
    }
    Ok(())
}

/// Runs `experiment` and writes `summary.json` plus its CSV/binary artifacts
/// into `out_dir`.
pub fn run(cfg: &ScenarioConfig, experiment: ExperimentName, out_dir: &Path) -> anyhow::Result<RunOutcome> {
    std::fs::create_dir_all(out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
    let mut files = Vec::new();
    let summary_path = out_dir.join("summary.json");
    let passed = match experiment {
        ExperimentName::CompareGauges => {
            let r = compare_gauges(cfg)?;
            write_artifacts(out_dir, &r.artifacts, &mut files)?;
            io::write_json(&summary_path, &r)?;
            r.passed
        }
        ExperimentName::Transient => {
            let r = transient(cfg)?;
            write_artifacts(out_dir, &r.artifacts, &mut files)?;
            io::write_json(&summary_path, &r)?;
            r.passed
        }
        ExperimentName::Convergence => {
            let r = convergence(cfg)?;
            write_artifacts(out_dir, &r.artifacts, &mut files)?;
            io::write_json(&summary_path, &r)?;
            r.passed
        }
        ExperimentName::DrudeSweep => {
            let r = drude_sweep(cfg)?;
            write_artifacts(out_dir, &r.artifacts, &mut files)?;
            io::write_json(&summary_path, &r)?;
            r.passed
        }
        ExperimentName::AlgebraSelftest => {
            let r = algebra_selftest(cfg)?;
            io::write_json(&summary_path, &r)?;
            r.passed
        }
    };
    files.push(summary_path.clone());
    Ok(RunOutcome { experiment, passed, summary_path, files })
}

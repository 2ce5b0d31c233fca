//! Expectation values, mean velocity and conductivity extraction.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::dynamics::{Ensemble, Gauge, PhaseGrid, TransportField};
use crate::gauge::{HarmonicDrive, PhysicalParams};
use crate::{relaxation, Error, Result};
#[allow(unused_imports)]
use num_traits::Float;

/// Fit residual above which an estimate is flagged as noisy.
pub const NOISY_FIT_THRESHOLD: f64 = 0.05;
/// Number of damping times discarded before fitting.
pub const TRANSIENT_DAMPING_TIMES: f64 = 5.0;
/// Full drive periods a fit window must span.
pub const MIN_FIT_PERIODS: f64 = 3.0;
/// Damping times a DC averaging window must span.
pub const MIN_DC_DAMPING_TIMES: f64 = 2.0;

/// `∫∫ O w / ∫∫ w` by the midpoint rule.
pub fn expectation<O: Fn(f64, f64) -> f64>(observable: O, grid: &PhaseGrid) -> Result<f64> {
    let mass = grid.mass();
    if !(mass > 0.0) {
        return Err(Error::DegenerateState { mass });
    }
    let weighted: f64 = grid.samples().map(|(q, p, w)| observable(q, p) * w).sum();
    Ok(weighted * grid.geometry().cell_area() / mass)
}

/// State over which a mean velocity is taken.
#[derive(Debug, Clone, Copy)]
pub enum State<'a> {
    /// A grid at its own time.
    Grid(&'a PhaseGrid),
    /// An initial ensemble transported to the given time.
    Ensemble(&'a Ensemble, f64),
}

/// `⟨q̇⟩ = ⟨∂H_w/∂π_q⟩`, with the velocity read off the Wigner generator.
pub fn mean_velocity(field: &TransportField, state: State<'_>) -> Result<Complex64> {
    match state {
        State::Grid(grid) => {
            let v = field.real_velocity(grid.t())?;
            Ok(expectation(|q, p| v.vq(q, p), grid)?.into())
        }
        State::Ensemble(ensemble, t) => {
            let mass = ensemble.mass();
            if !(mass > 0.0) {
                return Err(Error::DegenerateState { mass });
            }
            let snapshot = field.snapshot(t)?;
            let total: Complex64 = if snapshot.vq.degree().unwrap_or(0) <= 1 {
                // An affine velocity commutes with averaging.
                let (q, p) = ensemble.mean_position(field, t)?;
                snapshot.vq.evaluate(q, p) * mass
            } else {
                let positions = ensemble.positions_at(field, t)?;
                positions.iter().zip(ensemble.weights()).map(|(&(q, p), w)| snapshot.vq.evaluate(q, p) * *w).sum()
            };
            let v = total / mass;
            Ok(field.drive().project(v))
        }
    }
}

/// `Ne²/(m(α + iω))`.
pub fn drude_conductivity(params: &PhysicalParams, omega: f64) -> Result<Complex64> {
    if params.alpha == 0.0 && omega == 0.0 {
        return Err(Error::Divergent);
    }
    let n = f64::from(params.n);
    Ok(Complex64::new(n * params.e * params.e / params.m, 0.0) / relaxation(params.alpha, omega))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConductivityEstimate {
    pub sigma: Complex64,
    pub magnitude: f64,
    pub phase: f64,
    /// Relative RMS misfit of the model over the window.
    pub fit_residual: f64,
    /// Closed-form Drude value for the same parameters.
    pub reference: Complex64,
    pub gauge: Gauge,
    pub window: (f64, f64),
    pub noisy_fit: bool,
}

impl ConductivityEstimate {
    pub fn relative_error(&self) -> f64 {
        (self.sigma - self.reference).norm() / self.reference.norm()
    }
}

/// Default fit window `[max(5/α, 2T), horizon]` (burn-in `2T` when `α = 0`,
/// `5/α` for DC).
pub fn default_fit_window(drive: &HarmonicDrive, params: &PhysicalParams, horizon: f64) -> (f64, f64) {
    let transient = if params.alpha > 0.0 { TRANSIENT_DAMPING_TIMES / params.alpha } else { 0.0 };
    let burn_in = drive.period().map_or(0.0, |t| 2.0 * t);
    (transient.max(burn_in), horizon)
}

/// Shortest horizon whose default window satisfies the fit contract.
pub fn minimum_horizon(drive: &HarmonicDrive, params: &PhysicalParams) -> f64 {
    let (start, _) = default_fit_window(drive, params, 0.0);
    match drive.period() {
        Some(period) => start + MIN_FIT_PERIODS * period,
        None if params.alpha > 0.0 => start + MIN_DC_DAMPING_TIMES / params.alpha,
        None => start,
    }
}

/// Complex conductivity from a real-drive velocity series.
///
/// AC: least-squares fit `⟨q̇⟩ ≈ Re[V e^{i(ωt+φ)}]` and `σ = NeV/E₀`.
/// DC: window average and `σ = Ne⟨q̇⟩/(E₀cos φ)`.
pub fn conductivity_timeseries(
    samples: &[(f64, f64)],
    drive: &HarmonicDrive,
    params: &PhysicalParams,
    gauge: Gauge,
    window: Option<(f64, f64)>,
) -> Result<ConductivityEstimate> {
    if drive.is_phasor() {
        return Err(Error::InvalidParameter { name: "drive", reason: "conductivity fit needs a real drive" });
    }
    if drive.e0 == 0.0 {
        return Err(Error::InvalidParameter { name: "E0", reason: "zero drive cannot define a conductivity" });
    }
    let horizon = samples.iter().map(|s| s.0).fold(f64::NEG_INFINITY, f64::max);
    let window = window.unwrap_or_else(|| default_fit_window(drive, params, horizon));
    let used: Vec<(f64, f64)> = samples.iter().copied().filter(|&(t, _)| t >= window.0 && t <= window.1).collect();
    let available = match (used.first(), used.last()) {
        (Some(a), Some(b)) => b.0 - a.0,
        _ => 0.0,
    };
    let required = match drive.period() {
        Some(period) => MIN_FIT_PERIODS * period,
        None if params.alpha > 0.0 => MIN_DC_DAMPING_TIMES / params.alpha,
        None => 0.0,
    };
    // Each sample stands for one sampling interval, so n samples cover
    // `available + spacing`.
    let spacing = if used.len() > 1 { available / (used.len() - 1) as f64 } else { 0.0 };
    if used.len() < 3 || available + spacing < required * (1.0 - 1e-9) {
        return Err(Error::InsufficientData { required, available });
    }

    let n = f64::from(params.n);
    let scale = n * params.e / drive.e0;
    let norm_sq: f64 = used.iter().map(|s| s.1 * s.1).sum();
    let (sigma, misfit_sq) = if drive.omega > 0.0 {
        // v ≈ a cos θ − b sin θ with θ = ωt + φ, V = a + ib.
        let (mut cc, mut ss, mut cs, mut vc, mut vs) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for &(t, v) in &used {
            let (s, c) = (drive.omega * t + drive.phase).sin_cos();
            cc += c * c;
            ss += s * s;
            cs += c * s;
            vc += v * c;
            vs += v * s;
        }
        let det = cc * ss - cs * cs;
        // Normal equations for (a, −b).
        let a = (vc * ss - vs * cs) / det;
        let minus_b = (vs * cc - vc * cs) / det;
        let misfit: f64 = used
            .iter()
            .map(|&(t, v)| {
                let (s, c) = (drive.omega * t + drive.phase).sin_cos();
                let r = v - (a * c + minus_b * s);
                r * r
            })
            .sum();
        (Complex64::new(a, -minus_b) * scale, misfit)
    } else {
        // A static field is E₀cos φ, not E₀.
        let static_field = drive.e0 * drive.phase.cos();
        if static_field.abs() < 1e-12 * drive.e0.abs() {
            return Err(Error::InvalidParameter { name: "phase", reason: "static field E0*cos(phase) vanishes" });
        }
        let mean = used.iter().map(|s| s.1).sum::<f64>() / used.len() as f64;
        let misfit: f64 = used.iter().map(|s| (s.1 - mean).powi(2)).sum();
        (Complex64::new(mean * n * params.e / static_field, 0.0), misfit)
    };
    let fit_residual = if norm_sq > 0.0 { (misfit_sq / norm_sq).sqrt() } else { 0.0 };
    Ok(ConductivityEstimate {
        sigma,
        magnitude: sigma.norm(),
        phase: sigma.arg(),
        fit_residual,
        reference: drude_conductivity(params, drive.omega)?,
        gauge,
        window,
        noisy_fit: fit_residual > NOISY_FIT_THRESHOLD,
    })
}

/// Least-squares slope of `ln|v|` against `t` over the window.
pub fn decay_rate(samples: &[(f64, f64)], window: (f64, f64)) -> Result<f64> {
    let used: Vec<(f64, f64)> = samples
        .iter()
        .filter(|&&(t, v)| t >= window.0 && t <= window.1 && v != 0.0)
        .map(|&(t, v)| (t, v.abs().ln()))
        .collect();
    if used.len() < 2 {
        return Err(Error::InsufficientData { required: window.1 - window.0, available: 0.0 });
    }
    let n = used.len() as f64;
    let mt = used.iter().map(|s| s.0).sum::<f64>() / n;
    let my = used.iter().map(|s| s.1).sum::<f64>() / n;
    let sxy: f64 = used.iter().map(|s| (s.0 - mt) * (s.1 - my)).sum();
    let sxx: f64 = used.iter().map(|s| (s.0 - mt).powi(2)).sum();
    Ok(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::GridGeometry;
    use core::f64::consts::PI;

    fn gaussian_grid(q0: f64, p0: f64) -> PhaseGrid {
        let g = GridGeometry::new(q0 - 8.0, q0 + 8.0, p0 - 8.0, p0 + 8.0, 128, 128).unwrap();
        PhaseGrid::from_fn(g, 0.0, |q, p| (-(q - q0).powi(2) / 2.0 - (p - p0).powi(2) / 2.0).exp() / (2.0 * PI))
            .unwrap()
    }

    #[test]
    fn expectation_of_one_is_one() {
        let grid = gaussian_grid(0.3, -1.0);
        assert!((expectation(|_, _| 1.0, &grid).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn gaussian_moment() {
        let grid = gaussian_grid(0.3, -1.2);
        assert!((expectation(|_, p| p, &grid).unwrap() + 1.2).abs() < 1e-8);
        assert!((expectation(|q, _| q, &grid).unwrap() - 0.3).abs() < 1e-8);
    }

    #[test]
    fn expectation_rejects_empty_state() {
        let g = GridGeometry::new(0.0, 1.0, 0.0, 1.0, 8, 8).unwrap();
        let grid = PhaseGrid::zeros(g, 0.0).unwrap();
        assert!(matches!(expectation(|_, _| 1.0, &grid), Err(Error::DegenerateState { .. })));
    }

    #[test]
    fn drude_values() {
        let unit = PhysicalParams { alpha: 1.0, ..Default::default() };
        assert_eq!(drude_conductivity(&unit, 0.0).unwrap(), Complex64::new(1.0, 0.0));
        let half = PhysicalParams { alpha: 0.5, ..Default::default() };
        let s = drude_conductivity(&half, 2.0).unwrap();
        assert!((s.norm() - 0.485_071_250_072_665_9).abs() < 1e-12);
        assert!((s.arg() + 1.325_817_663_668_032_5).abs() < 1e-12);
        assert!(drude_conductivity(&half, 1e9).unwrap().norm() < 1e-8);
        let free = PhysicalParams { alpha: 0.0, ..Default::default() };
        assert_eq!(drude_conductivity(&free, 0.0), Err(Error::Divergent));
    }

    fn steady_series(params: &PhysicalParams, drive: &HarmonicDrive, scale: f64) -> Vec<(f64, f64)> {
        let v = Complex64::new(params.e * drive.e0 / params.m, 0.0) / relaxation(params.alpha, drive.omega);
        (0..4000)
            .map(|k| {
                let t = k as f64 * 0.01;
                (t, scale * (v * Complex64::from_polar(1.0, drive.omega * t + drive.phase)).re)
            })
            .collect()
    }

    #[test]
    fn exact_phasor_series_recovers_drude() {
        let params = PhysicalParams { alpha: 0.5, ..Default::default() };
        let drive = HarmonicDrive::real(0.1, 2.0, 0.3);
        let series = steady_series(&params, &drive, 1.0);
        let est = conductivity_timeseries(&series, &drive, &params, Gauge::A, None).unwrap();
        assert!(est.relative_error() < 1e-12);
        assert!(est.fit_residual < 1e-12);
        assert!(!est.noisy_fit);
        assert_eq!(est.window.0, 10.0);

        let doubled = PhysicalParams { n: 2, ..params };
        let est2 = conductivity_timeseries(&series, &drive, &doubled, Gauge::A, None).unwrap();
        assert!((est2.sigma - est.sigma * 2.0).norm() < 1e-14);
    }

    #[test]
    fn zero_series_gives_zero_sigma() {
        let params = PhysicalParams::default();
        let drive = HarmonicDrive::real(0.1, 2.0, 0.0);
        let series: Vec<(f64, f64)> = (0..3000).map(|k| (k as f64 * 0.01, 0.0)).collect();
        let est = conductivity_timeseries(&series, &drive, &params, Gauge::Phi, None).unwrap();
        assert_eq!(est.sigma.norm(), 0.0);
        assert_eq!(est.fit_residual, 0.0);
    }

    #[test]
    fn short_window_is_rejected() {
        let params = PhysicalParams::default();
        let drive = HarmonicDrive::real(0.1, 2.0, 0.0);
        let series: Vec<(f64, f64)> = (0..1500).map(|k| (k as f64 * 0.01, 1.0)).collect();
        assert!(matches!(
            conductivity_timeseries(&series, &drive, &params, Gauge::A, None),
            Err(Error::InsufficientData { .. })
        ));
        let off = HarmonicDrive::real(0.0, 2.0, 0.0);
        assert!(conductivity_timeseries(&series, &off, &params, Gauge::A, None).is_err());
    }

    #[test]
    fn noisy_fit_is_flagged() {
        let params = PhysicalParams::default();
        let drive = HarmonicDrive::real(0.1, 2.0, 0.0);
        let series: Vec<(f64, f64)> = (0..3000).map(|k| (k as f64 * 0.01, 0.01 + 0.002 * ((k % 7) as f64))).collect();
        let est = conductivity_timeseries(&series, &drive, &params, Gauge::A, None).unwrap();
        assert!(est.noisy_fit);
    }

    #[test]
    fn dc_average() {
        let params = PhysicalParams { alpha: 0.5, ..Default::default() };
        let drive = HarmonicDrive::real(0.1, 0.0, 0.0);
        let series: Vec<(f64, f64)> = (0..2000).map(|k| (k as f64 * 0.01, 0.2)).collect();
        let est = conductivity_timeseries(&series, &drive, &params, Gauge::A, None).unwrap();
        assert!((est.sigma - Complex64::new(2.0, 0.0)).norm() < 1e-12);
        assert!(est.relative_error() < 1e-12);
    }

    #[test]
    fn decay_rate_of_exponential() {
        let series: Vec<(f64, f64)> =
            (0..1000).map(|k| (k as f64 * 0.01, 3.0 * (-0.5 * k as f64 * 0.01).exp())).collect();
        assert!((decay_rate(&series, (2.0, 9.0)).unwrap() + 0.5).abs() < 1e-12);
    }

    #[test]
    fn window_helpers() {
        let params = PhysicalParams { alpha: 0.5, ..Default::default() };
        let drive = HarmonicDrive::real(0.1, 2.0, 0.0);
        assert_eq!(default_fit_window(&drive, &params, 30.0), (10.0, 30.0));
        assert!((minimum_horizon(&drive, &params) - (10.0 + 3.0 * PI)).abs() < 1e-12);
        let slow = HarmonicDrive::real(0.1, 0.5, 0.0);
        assert!((default_fit_window(&slow, &params, 0.0).0 - 8.0 * PI).abs() < 1e-12);
    }
}

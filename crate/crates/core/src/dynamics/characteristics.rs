use alloc::vec::Vec;

use num_complex::Complex64;
use num_traits::Zero;

use super::{Gauge, GridGeometry, InitialCondition, PhaseGrid, TransportField};
use crate::algebra::FieldSnapshot;
use crate::gauge::gauge_momentum_shift;
use crate::quadrature::integrate;
use crate::{relaxation, Error, Result};
#[allow(unused_imports)]
use num_traits::Float;

/// Relative accuracy of characteristic integrals evaluated by quadrature.
pub const CHARACTERISTIC_TOLERANCE: f64 = 1e-10;

/// `∫₀^t e^{zs} ds`, continuous through `z = 0`.
pub fn exp_integral(z: Complex64, t: f64) -> Complex64 {
    let zt = z * t;
    if zt.norm() < 1e-4 {
        // t·(1 + zt/2 + (zt)²/6 + (zt)³/24)
        t * (Complex64::new(1.0, 0.0) + zt / 2.0 + zt * zt / 6.0 + zt * zt * zt / 24.0)
    } else {
        ((zt).exp() - 1.0) / z
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FlowMethod {
    /// Closed form for phasor drives, adaptive quadrature for real drives.
    #[default]
    Auto,
    ClosedForm,
    Quadrature,
}

/// Characteristic map of a Kanai field from time 0 to some `t`:
/// `p(t) = p₀ + momentum_shift`, `q(t) = q₀ + drift_per_momentum·p₀ + drift`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFlow {
    pub momentum_shift: Complex64,
    pub drift_per_momentum: Complex64,
    pub drift: Complex64,
}

impl LinearFlow {
    pub fn forward(&self, q0: Complex64, p0: Complex64) -> (Complex64, Complex64) {
        (q0 + self.drift_per_momentum * p0 + self.drift, p0 + self.momentum_shift)
    }

    /// Foot point at time 0 of the characteristic through `(q, p)`.
    pub fn backward(&self, q: Complex64, p: Complex64) -> (Complex64, Complex64) {
        let p0 = p - self.momentum_shift;
        (q - self.drift_per_momentum * p0 - self.drift, p0)
    }
}

/// Exact characteristic map of an A- or φ-gauge Kanai field.
pub fn kanai_flow(field: &TransportField, t: f64, method: FlowMethod) -> Result<LinearFlow> {
    let params = *field.params();
    let drive = *field.drive();
    let gauge = field.gauge();
    if gauge == Gauge::Custom {
        return Err(Error::UnsupportedField("closed-form flow exists only for Kanai gauges"));
    }
    let alpha = params.alpha;
    let m = params.m;
    let s = exp_integral(Complex64::new(-alpha, 0.0), t) / m;
    let method = match method {
        FlowMethod::Auto if drive.is_phasor() => FlowMethod::ClosedForm,
        FlowMethod::Auto => FlowMethod::Quadrature,
        other => other,
    };
    if method == FlowMethod::Quadrature && drive.is_phasor() {
        return Err(Error::UnsupportedField("quadrature flow needs a real drive"));
    }
    let beta = relaxation(alpha, drive.omega);
    let amp = drive.complex_amplitude() * params.e;
    let i_omega = Complex64::new(0.0, drive.omega);
    let flow = match (gauge, method) {
        (Gauge::A, FlowMethod::ClosedForm) => {
            // Validates α + iω ≠ 0.
            gauge_momentum_shift(&drive, &params, 0.0)?;
            LinearFlow {
                momentum_shift: Complex64::zero(),
                drift_per_momentum: s,
                drift: drive.project(amp / (beta * m) * exp_integral(i_omega, t)),
            }
        }
        (Gauge::A, _) => {
            gauge_momentum_shift(&drive, &params, 0.0)?;
            let integrand = |u: f64| {
                let shift = gauge_momentum_shift(&drive, &params, u).map(|z| z.re).unwrap_or(f64::NAN);
                shift * (-alpha * u).exp()
            };
            let drift = integrate(integrand, 0.0, t, CHARACTERISTIC_TOLERANCE) / m;
            LinearFlow { momentum_shift: Complex64::zero(), drift_per_momentum: s, drift: drift.into() }
        }
        (Gauge::Phi, FlowMethod::ClosedForm) => {
            let momentum_shift = amp * exp_integral(beta, t);
            let drift = if beta.is_zero() {
                amp * (t * t / 2.0)
            } else {
                amp * (exp_integral(i_omega, t) - exp_integral(Complex64::new(-alpha, 0.0), t)) / beta
            } / m;
            LinearFlow {
                momentum_shift: drive.project(momentum_shift),
                drift_per_momentum: s,
                drift: drive.project(drift),
            }
        }
        (Gauge::Phi, _) => {
            // p-shift G(t) = ∫ g, q-drift = (1/m)∫₀^t g(u)(J(t) − J(u)) du with J(u) = ∫₀^u e^{−αs}ds.
            let g = |u: f64| params.e * drive.field(u).re * (alpha * u).exp();
            let j = |u: f64| exp_integral(Complex64::new(-alpha, 0.0), u).re;
            let jt = j(t);
            let shift = integrate(g, 0.0, t, CHARACTERISTIC_TOLERANCE);
            let drift = integrate(|u| g(u) * (jt - j(u)), 0.0, t, CHARACTERISTIC_TOLERANCE) / m;
            LinearFlow { momentum_shift: shift.into(), drift_per_momentum: s, drift: drift.into() }
        }
        (Gauge::Custom, _) => unreachable!(),
    };
    Ok(flow)
}

/// RK4 transport of points from `t_from` to `t_to` through a general field,
/// halving the step until successive answers agree.
fn trace_numeric(
    field: &TransportField,
    points: &[(Complex64, Complex64)],
    t_from: f64,
    t_to: f64,
) -> Result<Vec<(Complex64, Complex64)>> {
    if t_from == t_to {
        return Ok(points.to_vec());
    }
    let run = |steps: usize| -> Result<Vec<(Complex64, Complex64)>> {
        let h = (t_to - t_from) / steps as f64;
        let mut snaps: Vec<FieldSnapshot> = Vec::with_capacity(2 * steps + 1);
        for k in 0..=2 * steps {
            snaps.push(field.snapshot(t_from + 0.5 * h * k as f64)?);
        }
        let v = |s: &FieldSnapshot, q: Complex64, p: Complex64| (s.vq.evaluate(q, p), s.vp.evaluate(q, p));
        Ok(points
            .iter()
            .map(|&(mut q, mut p)| {
                for n in 0..steps {
                    let (s0, sm, s1) = (&snaps[2 * n], &snaps[2 * n + 1], &snaps[2 * n + 2]);
                    let k1 = v(s0, q, p);
                    let k2 = v(sm, q + k1.0 * (h / 2.0), p + k1.1 * (h / 2.0));
                    let k3 = v(sm, q + k2.0 * (h / 2.0), p + k2.1 * (h / 2.0));
                    let k4 = v(s1, q + k3.0 * h, p + k3.1 * h);
                    q += (k1.0 + k2.0 * 2.0 + k3.0 * 2.0 + k4.0) * (h / 6.0);
                    p += (k1.1 + k2.1 * 2.0 + k3.1 * 2.0 + k4.1) * (h / 6.0);
                }
                (q, p)
            })
            .collect())
    };
    let mut steps = 32;
    let mut previous = run(steps)?;
    while steps < (1 << 16) {
        steps *= 2;
        let next = run(steps)?;
        let worst = previous
            .iter()
            .zip(&next)
            .map(|(a, b)| ((a.0 - b.0).norm() + (a.1 - b.1).norm()) / (1.0 + b.0.norm() + b.1.norm()))
            .fold(0.0, f64::max);
        previous = next;
        if worst < CHARACTERISTIC_TOLERANCE {
            return Ok(previous);
        }
    }
    Err(Error::SeriesNotConverged { terms: steps })
}

/// Values of the transported Wigner function at query points.
#[derive(Debug, Clone, PartialEq)]
pub struct CharacteristicsOutput {
    pub values: Vec<Complex64>,
    /// `true` where the foot point fell outside the trust domain.
    pub extrapolated: Vec<bool>,
}

/// `w(q, p, t_final) = w₀(foot(q, p))` along exact characteristics.
pub fn evolve_characteristics(
    w0: &InitialCondition,
    field: &TransportField,
    t_final: f64,
    query: &[(f64, f64)],
    trust: Option<&GridGeometry>,
) -> Result<CharacteristicsOutput> {
    if !(t_final >= 0.0) {
        return Err(Error::InvalidParameter { name: "t_final", reason: "must be non-negative" });
    }
    w0.validate()?;
    let points: Vec<(Complex64, Complex64)> =
        query.iter().map(|&(q, p)| (Complex64::new(q, 0.0), Complex64::new(p, 0.0))).collect();
    let feet = match field.gauge() {
        Gauge::A | Gauge::Phi => {
            let flow = kanai_flow(field, t_final, FlowMethod::Auto)?;
            points.iter().map(|&(q, p)| flow.backward(q, p)).collect()
        }
        Gauge::Custom => trace_numeric(field, &points, t_final, 0.0)?,
    };
    let extrapolated = feet.iter().map(|(q, p)| trust.is_some_and(|g| !g.contains(q.re, p.re))).collect();
    let values = feet.iter().map(|&(q, p)| w0.evaluate(q, p)).collect();
    Ok(CharacteristicsOutput { values, extrapolated })
}

/// Characteristics solution sampled on every node of a geometry.
pub fn characteristics_on_grid(
    w0: &InitialCondition,
    field: &TransportField,
    t_final: f64,
    geometry: GridGeometry,
) -> Result<PhaseGrid> {
    let nodes: Vec<(f64, f64)> = geometry.nodes().collect();
    let out = evolve_characteristics(w0, field, t_final, &nodes, None)?;
    PhaseGrid::from_values(geometry, t_final, out.values.iter().map(|v| v.re).collect())
}

/// Weighted sample points of the initial state, carried forward along
/// characteristics. Averages over the ensemble equal phase-space averages of
/// the transported Wigner function because the flow preserves volume.
#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    nodes: Vec<(f64, f64)>,
    weights: Vec<f64>,
}

impl Ensemble {
    /// Midpoint-rule sampling of `w0` on the cells of `geometry`.
    pub fn sample(w0: &InitialCondition, geometry: &GridGeometry) -> Result<Self> {
        w0.validate()?;
        geometry.validate()?;
        let area = geometry.cell_area();
        let nodes: Vec<(f64, f64)> = geometry.nodes().collect();
        let weights = nodes.iter().map(|&(q, p)| w0.evaluate_real(q, p) * area).collect();
        Ok(Ensemble { nodes, weights })
    }

    pub fn from_parts(nodes: Vec<(f64, f64)>, weights: Vec<f64>) -> Result<Self> {
        if nodes.len() != weights.len() {
            return Err(Error::InvalidParameter { name: "ensemble", reason: "nodes and weights differ in length" });
        }
        Ok(Ensemble { nodes, weights })
    }

    /// Same weights, every node moved by `(dq, dp)`.
    pub fn translated(&self, dq: f64, dp: f64) -> Self {
        Ensemble { nodes: self.nodes.iter().map(|&(q, p)| (q + dq, p + dp)).collect(), weights: self.weights.clone() }
    }

    pub fn nodes(&self) -> &[(f64, f64)] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Weighted mean of the transported positions, `(⟨q⟩, ⟨p⟩)` at time `t`.
    pub fn mean_position(&self, field: &TransportField, t: f64) -> Result<(Complex64, Complex64)> {
        let mass = self.mass();
        if !(mass > 0.0) {
            return Err(Error::DegenerateState { mass });
        }
        let positions = self.positions_at(field, t)?;
        let (sq, sp) = positions
            .iter()
            .zip(&self.weights)
            .fold((Complex64::zero(), Complex64::zero()), |(aq, ap), (&(q, p), &w)| (aq + q * w, ap + p * w));
        Ok((sq / mass, sp / mass))
    }

    /// Positions at time `t` of the points that started at the nodes.
    pub fn positions_at(&self, field: &TransportField, t: f64) -> Result<Vec<(Complex64, Complex64)>> {
        let start: Vec<(Complex64, Complex64)> =
            self.nodes.iter().map(|&(q, p)| (Complex64::new(q, 0.0), Complex64::new(p, 0.0))).collect();
        match field.gauge() {
            Gauge::A | Gauge::Phi => {
                let flow = kanai_flow(field, t, FlowMethod::Auto)?;
                Ok(start.into_iter().map(|(q, p)| flow.forward(q, p)).collect())
            }
            Gauge::Custom => trace_numeric(field, &start, 0.0, t),
        }
    }
}

/// Bounds that keep a Gaussian packet `margin_sigmas` standard deviations
/// inside the domain for all `t ∈ [0, horizon]` under a Kanai field.
pub fn covering_geometry(
    w0: &InitialCondition,
    field: &TransportField,
    horizon: f64,
    margin_sigmas: f64,
    nq: usize,
    np: usize,
) -> Result<GridGeometry> {
    let (q0, p0, sq, sp) =
        w0.gaussian_moments().ok_or(Error::UnsupportedField("automatic bounds need a Gaussian initial condition"))?;
    const SAMPLES: usize = 512;
    let (mut q_lo, mut q_hi, mut p_lo, mut p_hi) = (q0, q0, p0, p0);
    let mut q_width = sq;
    for k in 0..=SAMPLES {
        let t = horizon * k as f64 / SAMPLES as f64;
        let flow = kanai_flow(field, t, FlowMethod::ClosedForm)?;
        let (q, p) = flow.forward(q0.into(), p0.into());
        q_lo = q_lo.min(q.re);
        q_hi = q_hi.max(q.re);
        p_lo = p_lo.min(p.re);
        p_hi = p_hi.max(p.re);
        q_width = q_width.max((sq * sq + (flow.drift_per_momentum.re * sp).powi(2)).sqrt());
    }
    GridGeometry::new(
        q_lo - margin_sigmas * q_width,
        q_hi + margin_sigmas * q_width,
        p_lo - margin_sigmas * sp,
        p_hi + margin_sigmas * sp,
        nq,
        np,
    )
}

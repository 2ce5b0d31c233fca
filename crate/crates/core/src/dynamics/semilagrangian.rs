use alloc::vec;
use alloc::vec::Vec;

use super::{Gauge, PhaseGrid, RealVelocity, TransportField};
use crate::{Error, Result};
#[allow(unused_imports)]
use num_traits::Float;

/// Per-step displacement, as a fraction of the domain extent, beyond which a
/// step is reported as inaccurate.
pub const DISPLACEMENT_WARNING_FRACTION: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Interpolation {
    Linear,
    #[default]
    Cubic,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DisplacementWarning {
    pub step: usize,
    pub t: f64,
    pub fraction: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Evolution {
    pub grid: PhaseGrid,
    pub warnings: Vec<DisplacementWarning>,
}

/// Back-trace-and-interpolate advection on a fixed grid.
///
/// Feet are found with the midpoint rule, `δ = Δt·v(x − δ/2, t + Δt/2)`,
/// solved by fixed-point iteration. Values outside the domain read as zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SemiLagrangian {
    pub interpolation: Interpolation,
    pub iterations: usize,
}

impl Default for SemiLagrangian {
    fn default() -> Self {
        SemiLagrangian { interpolation: Interpolation::Cubic, iterations: 2 }
    }
}

#[inline]
fn lagrange4(s: f64) -> [f64; 4] {
    [
        -s * (s - 1.0) * (s - 2.0) / 6.0,
        (s + 1.0) * (s - 1.0) * (s - 2.0) / 2.0,
        -(s + 1.0) * s * (s - 2.0) / 2.0,
        (s + 1.0) * s * (s - 1.0) / 6.0,
    ]
}

/// Interpolates `values` (row-major, `nq × np`) at fractional indices `(x, y)`.
#[inline]
fn sample(values: &[f64], nq: usize, np: usize, x: f64, y: f64, scheme: Interpolation) -> f64 {
    let (xi, yi) = (x.floor(), y.floor());
    let (sx, sy) = (x - xi, y - yi);
    let (xi, yi) = (xi as isize, yi as isize);
    let at = |i: isize, j: isize| -> f64 {
        if i < 0 || j < 0 || i >= nq as isize || j >= np as isize {
            0.0
        } else {
            values[i as usize * np + j as usize]
        }
    };
    match scheme {
        Interpolation::Linear => {
            let row = |i| at(i, yi) * (1.0 - sy) + at(i, yi + 1) * sy;
            row(xi) * (1.0 - sx) + row(xi + 1) * sx
        }
        Interpolation::Cubic => {
            let wx = lagrange4(sx);
            let wy = lagrange4(sy);
            if xi >= 1 && yi >= 1 && xi + 2 < nq as isize && yi + 2 < np as isize {
                // Whole stencil inside: no bounds checks per tap.
                let (x0, y0) = (xi as usize - 1, yi as usize - 1);
                let mut total = 0.0;
                for (a, wa) in wx.iter().enumerate() {
                    let r = &values[(x0 + a) * np + y0..(x0 + a) * np + y0 + 4];
                    total += wa * (wy[0] * r[0] + wy[1] * r[1] + wy[2] * r[2] + wy[3] * r[3]);
                }
                return total;
            }
            let mut total = 0.0;
            for (a, wa) in wx.iter().enumerate() {
                let i = xi - 1 + a as isize;
                if i < 0 || i >= nq as isize {
                    continue;
                }
                let mut row = 0.0;
                for (b, wb) in wy.iter().enumerate() {
                    row += wb * at(i, yi - 1 + b as isize);
                }
                total += wa * row;
            }
            total
        }
    }
}

impl SemiLagrangian {
    pub fn new(interpolation: Interpolation) -> Self {
        SemiLagrangian { interpolation, ..Default::default() }
    }

    /// Writes one step of `prev` into `next`; returns the largest displacement
    /// as a fraction of the domain extent.
    pub fn step_into(&self, prev: &PhaseGrid, next: &mut [f64], velocity: &RealVelocity, dt: f64) -> f64 {
        let g = *prev.geometry();
        let (dq, dp) = (g.dq(), g.dp());
        let (span_q, span_p) = (g.q_max - g.q_min, g.p_max - g.p_min);
        let values = prev.values();
        let iterations = self.iterations.max(1);
        let scheme = self.interpolation;
        let row = |i: usize, out: &mut [f64]| -> f64 {
            let q = g.q(i);
            let mut worst: f64 = 0.0;
            for (j, slot) in out.iter_mut().enumerate() {
                let p = g.p(j);
                let mut d = (dt * velocity.vq(q, p), dt * velocity.vp(q, p));
                for _ in 1..iterations {
                    let (qm, pm) = (q - 0.5 * d.0, p - 0.5 * d.1);
                    d = (dt * velocity.vq(qm, pm), dt * velocity.vp(qm, pm));
                }
                worst = worst.max((d.0 / span_q).abs()).max((d.1 / span_p).abs());
                *slot = sample(values, g.nq, g.np, i as f64 - d.0 / dq, j as f64 - d.1 / dp, scheme);
            }
            worst
        };
        #[cfg(feature = "parallel")]
        {
            use rayon::prelude::*;
            next.par_chunks_mut(g.np).enumerate().map(|(i, out)| row(i, out)).reduce(|| 0.0, f64::max)
        }
        #[cfg(not(feature = "parallel"))]
        {
            next.chunks_mut(g.np).enumerate().map(|(i, out)| row(i, out)).fold(0.0, f64::max)
        }
    }

    /// Advances `grid` by `steps` steps of `dt`, calling `observer` after each.
    pub fn run<F>(
        &self,
        grid: &PhaseGrid,
        field: &TransportField,
        dt: f64,
        steps: usize,
        mut observer: F,
    ) -> Result<Evolution>
    where
        F: FnMut(&PhaseGrid) -> Result<()>,
    {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidParameter { name: "dt", reason: "time step must be positive" });
        }
        if field.gauge() != Gauge::Custom && field.drive().is_phasor() {
            return Err(Error::UnsupportedField("grid evolution needs a real drive"));
        }
        let t0 = grid.t();
        let mut current = grid.clone();
        let mut scratch = vec![0.0; grid.geometry().len()];
        let mut warnings = Vec::new();
        for n in 0..steps {
            let t = t0 + dt * n as f64;
            let velocity = field.real_velocity(t + 0.5 * dt)?;
            if !velocity.is_zero() {
                let fraction = self.step_into(&current, &mut scratch, &velocity, dt);
                if fraction > DISPLACEMENT_WARNING_FRACTION {
                    warnings.push(DisplacementWarning { step: n, t, fraction });
                }
                core::mem::swap(&mut scratch, current.storage_mut());
            }
            current.set_t(t0 + dt * (n + 1) as f64);
            observer(&current)?;
        }
        Ok(Evolution { grid: current, warnings })
    }
}

/// `steps` semi-Lagrangian steps of size `dt` with the given interpolation.
pub fn evolve_semilagrangian(
    grid: &PhaseGrid,
    field: &TransportField,
    dt: f64,
    steps: usize,
    interpolation: Interpolation,
) -> Result<Evolution> {
    SemiLagrangian::new(interpolation).run(grid, field, dt, steps, |_| Ok(()))
}

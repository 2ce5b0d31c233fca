use alloc::vec::Vec;

use num_complex::Complex64;

use crate::algebra::{
    build_wigner_hamiltonian, transport_coefficients, FieldSnapshot, HamiltonianKind, HamiltonianSpec, PhasePolynomial,
};
use crate::gauge::{HarmonicDrive, PhysicalParams};
use crate::Result;
#[allow(unused_imports)]
use num_traits::Float;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Gauge {
    A,
    Phi,
    Custom,
}

/// Time-dependent advection field of the Wigner transport equation.
///
/// Snapshots are produced through the operator algebra: the Hamiltonian is
/// evaluated at `t`, turned into its Wigner generator, and the coefficients
/// of `π_q`, `π_p` are read off.
#[derive(Debug, Clone)]
pub struct TransportField {
    hamiltonian: HamiltonianSpec,
}

impl TransportField {
    pub fn new(hamiltonian: HamiltonianSpec) -> Self {
        TransportField { hamiltonian }
    }

    pub fn a_gauge(params: PhysicalParams, drive: HarmonicDrive) -> Self {
        Self::new(HamiltonianSpec::kanai_a_gauge(params, drive))
    }

    pub fn phi_gauge(params: PhysicalParams, drive: HarmonicDrive) -> Self {
        Self::new(HamiltonianSpec::kanai_phi_gauge(params, drive))
    }

    pub fn for_gauge(gauge: Gauge, params: PhysicalParams, drive: HarmonicDrive) -> Option<Self> {
        match gauge {
            Gauge::A => Some(Self::a_gauge(params, drive)),
            Gauge::Phi => Some(Self::phi_gauge(params, drive)),
            Gauge::Custom => None,
        }
    }

    pub fn gauge(&self) -> Gauge {
        match self.hamiltonian.kind() {
            HamiltonianKind::KanaiAGauge => Gauge::A,
            HamiltonianKind::KanaiPhiGauge => Gauge::Phi,
            HamiltonianKind::CustomPolynomial => Gauge::Custom,
        }
    }

    pub fn hamiltonian(&self) -> &HamiltonianSpec {
        &self.hamiltonian
    }

    pub fn params(&self) -> &PhysicalParams {
        self.hamiltonian.params()
    }

    pub fn drive(&self) -> &HarmonicDrive {
        self.hamiltonian.drive()
    }

    pub fn snapshot(&self, t: f64) -> Result<FieldSnapshot> {
        transport_coefficients(&build_wigner_hamiltonian(&self.hamiltonian, t)?)
    }

    /// `(dq/dt, dp/dt)` at a point.
    pub fn velocity(&self, q: Complex64, p: Complex64, t: f64) -> Result<(Complex64, Complex64)> {
        let s = self.snapshot(t)?;
        Ok((s.vq.evaluate(q, p), s.vp.evaluate(q, p)))
    }

    pub fn real_velocity(&self, t: f64) -> Result<RealVelocity> {
        Ok(RealVelocity::from_snapshot(&self.snapshot(t)?))
    }
}

/// Real projection of a snapshot, flattened for per-node evaluation.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RealVelocity {
    vq: Component,
    vp: Component,
}

/// One velocity component: `c₀ + c_q q + c_p p` when affine, else a term list.
#[derive(Debug, Clone, PartialEq)]
enum Component {
    Affine([f64; 3]),
    General(Vec<(i32, i32, f64)>),
}

impl Default for Component {
    fn default() -> Self {
        Component::Affine([0.0; 3])
    }
}

impl Component {
    fn from_poly(poly: &PhasePolynomial) -> Self {
        let terms: Vec<(i32, i32, f64)> =
            poly.terms().filter(|(_, c)| c.re != 0.0).map(|(&(a, b), c)| (a as i32, b as i32, c.re)).collect();
        if terms.iter().all(|&(a, b, _)| a + b <= 1) {
            let mut c = [0.0; 3];
            for (a, b, v) in terms {
                c[(a + 2 * b) as usize] = v;
            }
            Component::Affine(c)
        } else {
            Component::General(terms)
        }
    }

    fn is_zero(&self) -> bool {
        match self {
            Component::Affine(c) => c.iter().all(|&x| x == 0.0),
            Component::General(t) => t.is_empty(),
        }
    }

    #[inline]
    fn eval(&self, q: f64, p: f64) -> f64 {
        match self {
            Component::Affine(c) => c[0] + c[1] * q + c[2] * p,
            Component::General(t) => t.iter().map(|&(a, b, c)| c * q.powi(a) * p.powi(b)).sum(),
        }
    }
}

impl RealVelocity {
    pub fn from_snapshot(s: &FieldSnapshot) -> Self {
        RealVelocity { vq: Component::from_poly(&s.vq), vp: Component::from_poly(&s.vp) }
    }

    pub fn is_zero(&self) -> bool {
        self.vq.is_zero() && self.vp.is_zero()
    }

    #[inline]
    pub fn vq(&self, q: f64, p: f64) -> f64 {
        self.vq.eval(q, p)
    }

    #[inline]
    pub fn vp(&self, q: f64, p: f64) -> f64 {
        self.vp.eval(q, p)
    }
}

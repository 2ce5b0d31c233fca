use super::{OperatorPolynomial, PhasePolynomial};
use crate::{Error, Result};

/// Velocities of the first-order transport PDE encoded by a Wigner
/// generator `H_w = v_q(q,p) π_q + v_p(q,p) π_p`, at one instant.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FieldSnapshot {
    /// `dq/dt`.
    pub vq: PhasePolynomial,
    /// `dp/dt`.
    pub vp: PhasePolynomial,
}

impl FieldSnapshot {
    pub fn is_zero(&self) -> bool {
        self.vq.is_zero() && self.vp.is_zero()
    }
}

/// Source terms below this fraction of the largest coefficient count as
/// rounding residue.
const SOURCE_TOLERANCE: f64 = 1e-12;

/// Reads the advection velocities off a Wigner generator.
///
/// With `π = −iħ∂`, `iħ∂_t w = H_w w` becomes `∂_t w + v_q ∂_q w + v_p ∂_p w = 0`
/// where `v_q`, `v_p` are the coefficients of `π_q`, `π_p`; ħ cancels.
pub fn transport_coefficients(hw: &OperatorPolynomial) -> Result<FieldSnapshot> {
    if let Some(degree) = hw.max_pi_degree().filter(|&d| d > 1) {
        return Err(Error::NonTransportGenerator { pi_degree: degree });
    }
    let scale = hw.max_abs_coefficient();
    let mut out = FieldSnapshot::default();
    for (m, c) in hw.terms() {
        match (m.pi_q, m.pi_p) {
            (1, 0) => out.vq.add_term(m.q, m.p, *c),
            (0, 1) => out.vp.add_term(m.q, m.p, *c),
            _ => {
                if c.norm() > SOURCE_TOLERANCE * scale {
                    return Err(Error::NonTransportGenerator { pi_degree: 0 });
                }
            }
        }
    }
    Ok(out)
}

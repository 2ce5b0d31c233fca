use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;

use super::{OperatorPolynomial, PhasePolynomial};
use crate::gauge::{gauge_momentum_shift, HarmonicDrive, PhysicalParams};
use crate::Result;
#[allow(unused_imports)]
use num_traits::Float;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HamiltonianKind {
    KanaiAGauge,
    KanaiPhiGauge,
    CustomPolynomial,
}

type CoefficientFn = dyn Fn(f64) -> PhasePolynomial + Send + Sync;

/// A classical Hamiltonian `H(q, p, t)` with polynomial dependence on the
/// phase-space coordinates, evaluated at discrete times.
#[derive(Clone)]
pub struct HamiltonianSpec {
    kind: HamiltonianKind,
    params: PhysicalParams,
    drive: HarmonicDrive,
    custom: Option<Arc<CoefficientFn>>,
}

impl fmt::Debug for HamiltonianSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HamiltonianSpec")
            .field("kind", &self.kind)
            .field("params", &self.params)
            .field("drive", &self.drive)
            .finish_non_exhaustive()
    }
}

impl HamiltonianSpec {
    /// Kanai Hamiltonian with `φ = 0` and the vector potential of the drive.
    pub fn kanai_a_gauge(params: PhysicalParams, drive: HarmonicDrive) -> Self {
        HamiltonianSpec { kind: HamiltonianKind::KanaiAGauge, params, drive, custom: None }
    }

    /// Kanai Hamiltonian with `A = 0` and `φ = −qE(t)`.
    pub fn kanai_phi_gauge(params: PhysicalParams, drive: HarmonicDrive) -> Self {
        HamiltonianSpec { kind: HamiltonianKind::KanaiPhiGauge, params, drive, custom: None }
    }

    pub fn custom<F>(params: PhysicalParams, coefficients: F) -> Self
    where
        F: Fn(f64) -> PhasePolynomial + Send + Sync + 'static,
    {
        HamiltonianSpec {
            kind: HamiltonianKind::CustomPolynomial,
            params,
            drive: HarmonicDrive::off(),
            custom: Some(Arc::new(coefficients)),
        }
    }

    /// Time-independent custom Hamiltonian.
    pub fn constant(params: PhysicalParams, h: PhasePolynomial) -> Self {
        Self::custom(params, move |_| h.clone())
    }

    pub fn kind(&self) -> HamiltonianKind {
        self.kind
    }

    pub fn params(&self) -> &PhysicalParams {
        &self.params
    }

    pub fn drive(&self) -> &HarmonicDrive {
        &self.drive
    }

    /// Coefficients `c_ab(t)` of `H = Σ c_ab q^a p^b`.
    pub fn coefficients(&self, t: f64) -> Result<PhasePolynomial> {
        let PhysicalParams { m, e, alpha, .. } = self.params;
        let decay = (-alpha * t).exp();
        let kinetic = Complex64::new(decay / (2.0 * m), 0.0);
        match self.kind {
            HamiltonianKind::KanaiAGauge => {
                // (p − (e/c)A)² e^{−αt}/2m with −(e/c)A = Δp.
                let shift = gauge_momentum_shift(&self.drive, &self.params, t)?;
                Ok(PhasePolynomial::new().with_term(0, 2, kinetic).with_term(0, 1, kinetic * shift * 2.0).with_term(
                    0,
                    0,
                    kinetic * shift * shift,
                ))
            }
            HamiltonianKind::KanaiPhiGauge => {
                let potential = -self.drive.field(t) * (e * (alpha * t).exp());
                Ok(PhasePolynomial::new().with_term(0, 2, kinetic).with_term(1, 0, potential))
            }
            HamiltonianKind::CustomPolynomial => Ok((self.custom.as_ref().expect("custom coefficients"))(t)),
        }
    }
}

/// Operator for `q^a p^b` after substituting `q → q_op`, `p → p_op`, in
/// symmetric (Weyl) order: the mean over every arrangement of the factors.
fn weyl_monomial(q_op: &OperatorPolynomial, p_op: &OperatorPolynomial, a: u32, b: u32) -> OperatorPolynomial {
    let hbar = q_op.hbar();
    let mut sum = OperatorPolynomial::zero(hbar);
    let mut count = 0u64;
    let mut word = Vec::with_capacity((a + b) as usize);
    arrangements(a, b, &mut word, &mut |w| {
        let mut prod = OperatorPolynomial::one(hbar);
        for &is_q in w {
            prod = prod.multiply(if is_q { q_op } else { p_op }).expect("same hbar");
        }
        sum = sum.checked_add(&prod).expect("same hbar");
        count += 1;
    });
    sum.scale_real(1.0 / count as f64)
}

fn arrangements(a: u32, b: u32, word: &mut Vec<bool>, visit: &mut impl FnMut(&[bool])) {
    if a == 0 && b == 0 {
        visit(word);
        return;
    }
    if a > 0 {
        word.push(true);
        arrangements(a - 1, b, word, visit);
        word.pop();
    }
    if b > 0 {
        word.push(false);
        arrangements(a, b - 1, word, visit);
        word.pop();
    }
}

/// `H(q_op, p_op)` as an operator polynomial, Weyl-ordered per monomial.
pub fn substitute(h: &PhasePolynomial, q_op: &OperatorPolynomial, p_op: &OperatorPolynomial) -> OperatorPolynomial {
    let mut out = OperatorPolynomial::zero(q_op.hbar());
    for (&(a, b), c) in h.terms() {
        let mono = weyl_monomial(q_op, p_op, a, b).scale(*c);
        out = out.checked_add(&mono).expect("same hbar");
    }
    out
}

fn shifted(base: OperatorPolynomial, shift: OperatorPolynomial, factor: f64) -> OperatorPolynomial {
    base.checked_add(&shift.scale_real(factor)).expect("same hbar")
}

/// `H(p + π_q, q) − H(p, q + π_p)`.
pub fn sn_from_polynomial(h: &PhasePolynomial, hbar: f64) -> OperatorPolynomial {
    let q = OperatorPolynomial::q(hbar);
    let p = OperatorPolynomial::p(hbar);
    let forward = substitute(h, &q, &shifted(p.clone(), OperatorPolynomial::pi_q(hbar), 1.0));
    let backward = substitute(h, &shifted(q, OperatorPolynomial::pi_p(hbar), 1.0), &p);
    forward.checked_sub(&backward).expect("same hbar")
}

/// `H(p + π_q/2, q − π_p/2) − H(p − π_q/2, q + π_p/2)`.
pub fn wigner_from_polynomial(h: &PhasePolynomial, hbar: f64) -> OperatorPolynomial {
    let q = OperatorPolynomial::q(hbar);
    let p = OperatorPolynomial::p(hbar);
    let pi_q = OperatorPolynomial::pi_q(hbar);
    let pi_p = OperatorPolynomial::pi_p(hbar);
    let plus = substitute(h, &shifted(q.clone(), pi_p.clone(), -0.5), &shifted(p.clone(), pi_q.clone(), 0.5));
    let minus = substitute(h, &shifted(q, pi_p, 0.5), &shifted(p, pi_q, -0.5));
    plus.checked_sub(&minus).expect("same hbar")
}

/// SN extended Hamiltonian of `h` at time `t`.
pub fn build_sn_hamiltonian(h: &HamiltonianSpec, t: f64) -> Result<OperatorPolynomial> {
    Ok(sn_from_polynomial(&h.coefficients(t)?, h.params.hbar))
}

/// Wigner extended Hamiltonian of `h` at time `t`.
pub fn build_wigner_hamiltonian(h: &HamiltonianSpec, t: f64) -> Result<OperatorPolynomial> {
    Ok(wigner_from_polynomial(&h.coefficients(t)?, h.params.hbar))
}

/// Finite series `Σ_n (1/n!)(∂ⁿH/∂pⁿ π_qⁿ − ∂ⁿH/∂qⁿ π_pⁿ)`, valid term by
/// term when `H` has no mixed `q·p` monomials.
pub fn sn_series_form(h: &PhasePolynomial, hbar: f64) -> OperatorPolynomial {
    use super::Monomial;
    let mut out = OperatorPolynomial::zero(hbar);
    for (&(a, b), c) in h.terms() {
        // (1/n!) ∂ⁿ_p (q^a p^b) = C(b,n) q^a p^{b-n}
        let mut binom = 1.0;
        for n in 1..=b {
            binom = binom * f64::from(b - n + 1) / f64::from(n);
            out.accumulate(Monomial::new(a, b - n, n, 0), c * binom);
        }
        let mut binom = 1.0;
        for n in 1..=a {
            binom = binom * f64::from(a - n + 1) / f64::from(n);
            out.accumulate(Monomial::new(a - n, b, 0, n), -c * binom);
        }
    }
    out
}

use alloc::collections::BTreeMap;
use core::fmt;

use num_complex::Complex64;
use num_traits::Zero;

use crate::{Error, Result};

/// Exponents of `q^q p^p π_q^pi_q π_p^pi_p`, always read in that order.
///
/// The derived `Ord` sorts lexicographically over `(q, p, pi_q, pi_p)`, which
/// is the ordering used for dumps and term-by-term comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Monomial {
    pub q: u32,
    pub p: u32,
    pub pi_q: u32,
    pub pi_p: u32,
}

impl Monomial {
    pub const ONE: Monomial = Monomial::new(0, 0, 0, 0);

    pub const fn new(q: u32, p: u32, pi_q: u32, pi_p: u32) -> Self {
        Monomial { q, p, pi_q, pi_p }
    }

    pub fn pi_degree(&self) -> u32 {
        self.pi_q + self.pi_p
    }

    pub fn phase_degree(&self) -> u32 {
        self.q + self.p
    }

    pub fn exponents(&self) -> [u32; 4] {
        [self.q, self.p, self.pi_q, self.pi_p]
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut wrote = false;
        for (name, exp) in [("q", self.q), ("p", self.p), ("pi_q", self.pi_q), ("pi_p", self.pi_p)] {
            if exp == 0 {
                continue;
            }
            if wrote {
                f.write_str("*")?;
            }
            if exp == 1 {
                f.write_str(name)?;
            } else {
                write!(f, "{name}^{exp}")?;
            }
            wrote = true;
        }
        if !wrote {
            f.write_str("1")?;
        }
        Ok(())
    }
}

/// Normal-ordered polynomial over the extended-phase-space operators.
///
/// Every stored monomial has its `π` factors to the right of `q` and `p`.
/// Products are reduced with `[π_q, q] = [π_p, p] = -iħ`; every other pair
/// commutes. Terms whose coefficient becomes exactly zero are dropped.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorPolynomial {
    terms: BTreeMap<Monomial, Complex64>,
    hbar: f64,
}

impl OperatorPolynomial {
    pub fn zero(hbar: f64) -> Self {
        assert!(hbar > 0.0 && hbar.is_finite(), "hbar must be positive and finite");
        OperatorPolynomial { terms: BTreeMap::new(), hbar }
    }

    pub fn constant(hbar: f64, value: Complex64) -> Self {
        Self::term(hbar, Monomial::ONE, value)
    }

    pub fn one(hbar: f64) -> Self {
        Self::constant(hbar, Complex64::new(1.0, 0.0))
    }

    pub fn term(hbar: f64, monomial: Monomial, coefficient: Complex64) -> Self {
        let mut out = Self::zero(hbar);
        out.accumulate(monomial, coefficient);
        out
    }

    pub fn q(hbar: f64) -> Self {
        Self::term(hbar, Monomial::new(1, 0, 0, 0), Complex64::new(1.0, 0.0))
    }

    pub fn p(hbar: f64) -> Self {
        Self::term(hbar, Monomial::new(0, 1, 0, 0), Complex64::new(1.0, 0.0))
    }

    pub fn pi_q(hbar: f64) -> Self {
        Self::term(hbar, Monomial::new(0, 0, 1, 0), Complex64::new(1.0, 0.0))
    }

    pub fn pi_p(hbar: f64) -> Self {
        Self::term(hbar, Monomial::new(0, 0, 0, 1), Complex64::new(1.0, 0.0))
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in ascending monomial order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Complex64)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, monomial: Monomial) -> Complex64 {
        self.terms.get(&monomial).copied().unwrap_or_else(Complex64::zero)
    }

    pub fn max_pi_degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::pi_degree).max()
    }

    pub fn max_phase_degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::phase_degree).max()
    }

    pub fn max_abs_coefficient(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub(crate) fn accumulate(&mut self, monomial: Monomial, coefficient: Complex64) {
        if coefficient.is_zero() {
            return;
        }
        let slot = self.terms.entry(monomial).or_insert_with(Complex64::zero);
        *slot += coefficient;
        if slot.is_zero() {
            self.terms.remove(&monomial);
        }
    }

    fn check_hbar(&self, other: &Self) -> Result<()> {
        if self.hbar == other.hbar {
            Ok(())
        } else {
            Err(Error::HbarMismatch { lhs: self.hbar, rhs: other.hbar })
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check_hbar(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.accumulate(*m, *c);
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.check_hbar(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.accumulate(*m, -*c);
        }
        Ok(out)
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        let mut out = Self::zero(self.hbar);
        for (m, c) in &self.terms {
            out.accumulate(*m, *c * factor);
        }
        out
    }

    pub fn scale_real(&self, factor: f64) -> Self {
        self.scale(Complex64::new(factor, 0.0))
    }

    /// Normal-ordered product `self · rhs`.
    pub fn multiply(&self, rhs: &Self) -> Result<Self> {
        self.check_hbar(rhs)?;
        let mut out = Self::zero(self.hbar);
        for (lm, lc) in &self.terms {
            for (rm, rc) in &rhs.terms {
                multiply_monomials(self.hbar, *lm, *rm, lc * rc, &mut out);
            }
        }
        Ok(out)
    }

    /// `self · rhs − rhs · self`.
    pub fn commutator(&self, rhs: &Self) -> Result<Self> {
        self.multiply(rhs)?.checked_sub(&rhs.multiply(self)?)
    }

    pub fn pow(&self, exponent: u32) -> Self {
        let mut out = Self::one(self.hbar);
        for _ in 0..exponent {
            out = out.multiply(self).expect("same hbar");
        }
        out
    }

    /// Drops terms whose magnitude is at most `tolerance` times the largest.
    pub fn pruned(&self, tolerance: f64) -> Self {
        let cutoff = tolerance * self.max_abs_coefficient();
        let mut out = Self::zero(self.hbar);
        for (m, c) in &self.terms {
            if c.norm() > cutoff {
                out.accumulate(*m, *c);
            }
        }
        out
    }

    /// Largest coefficient difference, relative to the largest coefficient of
    /// either operand. Zero when both are zero.
    pub fn max_relative_deviation(&self, other: &Self) -> f64 {
        let scale = self.max_abs_coefficient().max(other.max_abs_coefficient());
        if scale == 0.0 {
            return 0.0;
        }
        let mut worst: f64 = 0.0;
        for (m, c) in &self.terms {
            worst = worst.max((*c - other.coefficient(*m)).norm());
        }
        for (m, c) in &other.terms {
            if !self.terms.contains_key(m) {
                worst = worst.max(c.norm());
            }
        }
        worst / scale
    }
}

impl fmt::Display for OperatorPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "({}{:+}i)*{}", c.re, c.im, m)?;
        }
        Ok(())
    }
}

fn falling(n: u32, k: u32) -> f64 {
    (0..k).map(|j| f64::from(n - j)).product()
}

fn binomial(n: u32, k: u32) -> f64 {
    falling(n, k) / falling(k, k)
}

/// Coefficients of `π^c x^a = Σ_k C(c,k) a!/(a−k)! (−iħ)^k x^{a−k} π^{c−k}`.
fn reorder_terms(hbar: f64, pi_exp: u32, x_exp: u32) -> impl Iterator<Item = (u32, Complex64)> {
    let minus_i_hbar = Complex64::new(0.0, -hbar);
    (0..=pi_exp.min(x_exp)).map(move |k| {
        let weight = binomial(pi_exp, k) * falling(x_exp, k);
        (k, minus_i_hbar.powu(k) * weight)
    })
}

fn multiply_monomials(hbar: f64, lhs: Monomial, rhs: Monomial, coefficient: Complex64, out: &mut OperatorPolynomial) {
    // π_q^c π_p^d q^a p^b = (π_q^c q^a)(π_p^d p^b); each factor reorders on its own.
    for (kq, cq) in reorder_terms(hbar, lhs.pi_q, rhs.q) {
        for (kp, cp) in reorder_terms(hbar, lhs.pi_p, rhs.p) {
            let m = Monomial {
                q: lhs.q + rhs.q - kq,
                p: lhs.p + rhs.p - kp,
                pi_q: lhs.pi_q + rhs.pi_q - kq,
                pi_p: lhs.pi_p + rhs.pi_p - kp,
            };
            out.accumulate(m, coefficient * cq * cp);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn pi_q_times_q_reorders() {
        let h = 0.7;
        let prod = OperatorPolynomial::pi_q(h).multiply(&OperatorPolynomial::q(h)).unwrap();
        let mut expected = OperatorPolynomial::term(h, Monomial::new(1, 0, 1, 0), c(1.0, 0.0));
        expected.accumulate(Monomial::ONE, c(0.0, -h));
        assert_eq!(prod, expected);
    }

    #[test]
    fn p_and_q_commute() {
        let h = 1.0;
        let pq = OperatorPolynomial::p(h).multiply(&OperatorPolynomial::q(h)).unwrap();
        let qp = OperatorPolynomial::q(h).multiply(&OperatorPolynomial::p(h)).unwrap();
        assert_eq!(pq, qp);
        assert_eq!(pq.coefficient(Monomial::new(1, 1, 0, 0)), c(1.0, 0.0));
        assert_eq!(pq.len(), 1);
    }

    #[test]
    fn pi_q_squared_times_q_squared() {
        let h = 1.0;
        let lhs = OperatorPolynomial::pi_q(h).pow(2);
        let rhs = OperatorPolynomial::q(h).pow(2);
        let prod = lhs.multiply(&rhs).unwrap();
        assert_eq!(prod.coefficient(Monomial::new(2, 0, 2, 0)), c(1.0, 0.0));
        assert_eq!(prod.coefficient(Monomial::new(1, 0, 1, 0)), c(0.0, -4.0 * h));
        assert_eq!(prod.coefficient(Monomial::ONE), c(-2.0 * h * h, 0.0));
        assert_eq!(prod.len(), 3);
    }

    #[test]
    fn canonical_commutators() {
        let h = 1.3;
        let [q, p, pq, pp] = [
            OperatorPolynomial::q(h),
            OperatorPolynomial::p(h),
            OperatorPolynomial::pi_q(h),
            OperatorPolynomial::pi_p(h),
        ];
        assert_eq!(pq.commutator(&q).unwrap(), OperatorPolynomial::constant(h, c(0.0, -h)));
        assert_eq!(pp.commutator(&p).unwrap(), OperatorPolynomial::constant(h, c(0.0, -h)));
        assert!(p.commutator(&q).unwrap().is_zero());
        assert!(pp.commutator(&pq).unwrap().is_zero());
        assert!(pq.commutator(&p).unwrap().is_zero());
        assert!(pp.commutator(&q).unwrap().is_zero());
    }

    #[test]
    fn leibniz_on_pi_product() {
        let h = 1.0;
        let pq_pp = OperatorPolynomial::pi_q(h).multiply(&OperatorPolynomial::pi_p(h)).unwrap();
        let out = pq_pp.commutator(&OperatorPolynomial::q(h)).unwrap();
        assert_eq!(out, OperatorPolynomial::pi_p(h).scale(c(0.0, -h)));
    }

    #[test]
    fn hbar_mismatch_is_rejected() {
        let err = OperatorPolynomial::q(1.0).multiply(&OperatorPolynomial::p(2.0)).unwrap_err();
        assert_eq!(err, Error::HbarMismatch { lhs: 1.0, rhs: 2.0 });
        assert!(OperatorPolynomial::q(1.0).checked_add(&OperatorPolynomial::p(2.0)).is_err());
    }

    #[test]
    fn cancellation_removes_terms() {
        let h = 1.0;
        let q = OperatorPolynomial::q(h);
        assert!(q.checked_sub(&q).unwrap().is_empty());
    }

    #[test]
    fn display_is_readable() {
        let h = 1.0;
        let x = OperatorPolynomial::term(h, Monomial::new(2, 0, 1, 0), c(2.0, -1.0));
        assert_eq!(alloc::format!("{x}"), "(2-1i)*q^2*pi_q");
    }
}

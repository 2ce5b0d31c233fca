use alloc::collections::BTreeMap;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use num_traits::Zero;

/// Commuting polynomial in the ordinary phase-space coordinates,
/// `Σ c_ab q^a p^b`, keyed by `(a, b)`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PhasePolynomial {
    terms: BTreeMap<(u32, u32), Complex64>,
}

impl PhasePolynomial {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_terms<I: IntoIterator<Item = ((u32, u32), Complex64)>>(terms: I) -> Self {
        let mut out = Self::new();
        for (k, c) in terms {
            out.add_term(k.0, k.1, c);
        }
        out
    }

    pub fn add_term(&mut self, q_exp: u32, p_exp: u32, coefficient: Complex64) {
        if coefficient.is_zero() {
            return;
        }
        let slot = self.terms.entry((q_exp, p_exp)).or_insert_with(Complex64::zero);
        *slot += coefficient;
        if slot.is_zero() {
            self.terms.remove(&(q_exp, p_exp));
        }
    }

    pub fn with_term(mut self, q_exp: u32, p_exp: u32, coefficient: Complex64) -> Self {
        self.add_term(q_exp, p_exp, coefficient);
        self
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32), &Complex64)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, q_exp: u32, p_exp: u32) -> Complex64 {
        self.terms.get(&(q_exp, p_exp)).copied().unwrap_or_else(Complex64::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|(a, b)| a + b).max()
    }

    pub fn evaluate(&self, q: Complex64, p: Complex64) -> Complex64 {
        self.terms.iter().map(|(&(a, b), c)| c * q.powu(a) * p.powu(b)).sum()
    }

    /// Real projection evaluated at a real point.
    pub fn evaluate_real(&self, q: f64, p: f64) -> f64 {
        self.terms.iter().map(|(&(a, b), c)| c.re * q.powi(a as i32) * p.powi(b as i32)).sum()
    }

    /// Largest coefficient difference relative to the largest coefficient.
    pub fn max_relative_deviation(&self, other: &Self) -> f64 {
        let scale = self.terms.values().chain(other.terms.values()).map(|c| c.norm()).fold(0.0, f64::max);
        if scale == 0.0 {
            return 0.0;
        }
        let keys = self.terms.keys().chain(other.terms.keys());
        keys.map(|&(a, b)| (self.coefficient(a, b) - other.coefficient(a, b)).norm()).fold(0.0, f64::max) / scale
    }
}

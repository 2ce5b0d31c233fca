//! Adaptive Simpson quadrature.

const MAX_DEPTH: u32 = 48;
#[allow(unused_imports)]
use num_traits::Float;

/// `∫_a^b f`, refined until each panel's Richardson estimate is below its
/// share of `tolerance`. The tolerance is relative to the magnitude of a
/// coarse first estimate (absolute when that estimate is tiny).
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tolerance: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    // Seed with several panels so oscillatory integrands are not sampled at
    // their zeros only.
    const SEEDS: usize = 16;
    let width = (b - a) / SEEDS as f64;
    let mut coarse = 0.0;
    let mut panels = [(0.0, 0.0, 0.0, 0.0, 0.0, 0.0); SEEDS];
    for (k, panel) in panels.iter_mut().enumerate() {
        let lo = a + width * k as f64;
        let hi = if k + 1 == SEEDS { b } else { lo + width };
        let mid = 0.5 * (lo + hi);
        let (flo, fmid, fhi) = (f(lo), f(mid), f(hi));
        let whole = (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi);
        coarse += whole.abs();
        *panel = (lo, hi, flo, fmid, fhi, whole);
    }
    let abs_tol = tolerance * coarse.max(1e-300);
    panels
        .iter()
        .map(|&(lo, hi, flo, fmid, fhi, whole)| {
            refine(&f, lo, hi, flo, fmid, fhi, whole, abs_tol / SEEDS as f64, MAX_DEPTH)
        })
        .sum()
}

#[allow(clippy::too_many_arguments)]
fn refine<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    refine(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) + refine(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let v = integrate(|x| 3.0 * x * x - x + 2.0, -1.0, 2.0, 1e-12);
        assert!((v - 13.5).abs() < 1e-13);
    }

    #[test]
    fn oscillatory_exponential() {
        let (a, w, t) = (0.5, 2.0, 19.0);
        let v = integrate(|s| (a * s).exp() * (w * s).cos(), 0.0, t, 1e-12);
        let exact = ((a * t).exp() * (a * (w * t).cos() + w * (w * t).sin()) - a) / (a * a + w * w);
        assert!((v - exact).abs() <= 1e-10 * exact.abs().max(1.0));
    }

    #[test]
    fn reversed_limits_flip_sign() {
        let f = |x: f64| x.exp();
        let v = integrate(f, 1.0, 0.0, 1e-12);
        assert!((v + (1f64.exp() - 1.0)).abs() < 1e-12);
        assert_eq!(integrate(f, 0.3, 0.3, 1e-12), 0.0);
    }
}

//! Adaptive quadrature for bath integrals.
//!
//! Every bath integral in this crate runs over a frequency window
//! `(ε, Λ)` fixed by [`QuadratureConfig`]. Infinite upper limits are mapped
//! onto the unit interval with `x = s + u/(1−u)`; finite windows are
//! integrated directly with 21-point Gauss–Kronrod panels under global
//! adaptive bisection. Principal values fold the integrand about the pole,
//! and oscillatory integrals are resolved on half-period panels.

mod gk;
mod oscillatory;
mod pv;

pub use oscillatory::{integrate_oscillatory, integrate_resolved, Weight};
pub use pv::{integrate_principal_value, PrincipalValue};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Upper limit Λ; may be `f64::INFINITY`.
    pub uv_cutoff: f64,
    /// Lower limit ε.
    pub ir_cutoff: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-8,
            uv_cutoff: f64::INFINITY,
            ir_cutoff: 0.0,
            max_subdivisions: 4000,
        }
    }
}

impl QuadratureConfig {
    /// Default window for a scenario whose physical frequencies span
    /// `[lowest, highest]`: Λ = 100·highest, ε = 1e-8·lowest.
    pub fn for_frequencies(lowest: f64, highest: f64) -> Self {
        Self { uv_cutoff: 100.0 * highest, ir_cutoff: 1e-8 * lowest, ..Self::default() }
    }

    pub fn with_cutoffs(mut self, ir: f64, uv: f64) -> Self {
        self.ir_cutoff = ir;
        self.uv_cutoff = uv;
        self
    }

    pub fn with_tolerances(mut self, abs_tol: f64, rel_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self.rel_tol = rel_tol;
        self
    }

    pub fn validate(&self) -> Result<(), QuadratureError> {
        let bad = |m: &str| Err(QuadratureError::InvalidConfig(m.to_string()));
        if !(self.abs_tol > 0.0) || !(self.rel_tol > 0.0) {
            return bad("tolerances must be positive");
        }
        if !(self.ir_cutoff >= 0.0) || !self.ir_cutoff.is_finite() {
            return bad("ir cutoff must be finite and non-negative");
        }
        if !(self.uv_cutoff > self.ir_cutoff) {
            return bad("uv cutoff must exceed ir cutoff");
        }
        if self.max_subdivisions == 0 {
            return bad("max_subdivisions must be positive");
        }
        Ok(())
    }
}

/// An integral value with its (non-negative) error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

impl Estimate {
    pub(crate) fn combine(self, other: Estimate) -> Estimate {
        Estimate {
            value: self.value + other.value,
            error: self.error + other.error,
            evaluations: self.evaluations + other.evaluations,
        }
    }

    pub(crate) fn scaled(self, k: f64) -> Estimate {
        Estimate { value: k * self.value, error: k.abs() * self.error, ..self }
    }

    pub(crate) fn zero() -> Estimate {
        Estimate { value: 0.0, error: 0.0, evaluations: 0 }
    }
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum QuadratureError {
    #[error("invalid quadrature configuration: {0}")]
    InvalidConfig(String),
    #[error("no convergence after {subdivisions} subdivisions: best estimate {estimate} ± {error}")]
    NotConverged { estimate: f64, error: f64, subdivisions: usize },
    #[error("integrand is not finite at x = {at}")]
    NonFinite { at: f64 },
    #[error("domain error: {0}")]
    Domain(String),
}

/// `∫ f` over the configured window `(ε, Λ)`.
pub fn integrate_semi_infinite<F>(f: F, cfg: &QuadratureConfig) -> Result<Estimate, QuadratureError>
where
    F: Fn(f64) -> f64,
{
    integrate_semi_infinite_hinted(f, &[], cfg)
}

/// Like [`integrate_semi_infinite`], with interior points where the
/// integrand has narrow structure (resonances, kinks).
pub fn integrate_semi_infinite_hinted<F>(
    f: F,
    points: &[f64],
    cfg: &QuadratureConfig,
) -> Result<Estimate, QuadratureError>
where
    F: Fn(f64) -> f64,
{
    cfg.validate()?;
    let (lo, hi) = (cfg.ir_cutoff, cfg.uv_cutoff);
    if hi.is_finite() {
        return integrate_interval_hinted(&f, lo, hi, points, cfg);
    }
    let inner: Vec<f64> = points.iter().copied().filter(|&p| p > lo && p.is_finite()).collect();
    match inner.iter().copied().fold(None, |m: Option<f64>, p| Some(m.map_or(p, |m| m.max(p)))) {
        None => integrate_tail(&f, lo, cfg),
        Some(split) => {
            // leave room past the last feature before mapping the tail
            let split = split + (split - lo).max(1.0);
            let head = integrate_interval_hinted(&f, lo, split, &inner, cfg)?;
            let tail = integrate_tail(&f, split, cfg)?;
            Ok(head.combine(tail))
        }
    }
}

/// `∫_a^b f` with the adaptive driver, no hints.
pub fn integrate_interval<F>(f: F, a: f64, b: f64, cfg: &QuadratureConfig) -> Result<Estimate, QuadratureError>
where
    F: Fn(f64) -> f64,
{
    integrate_interval_hinted(&f, a, b, &[], cfg)
}

pub(crate) fn integrate_interval_hinted<F>(
    f: &F,
    a: f64,
    b: f64,
    points: &[f64],
    cfg: &QuadratureConfig,
) -> Result<Estimate, QuadratureError>
where
    F: Fn(f64) -> f64,
{
    if !(a.is_finite() && b.is_finite()) {
        return Err(QuadratureError::Domain(format!("interval [{a}, {b}] must be finite")));
    }
    if a == b {
        return Ok(Estimate::zero());
    }
    if a > b {
        return integrate_interval_hinted(f, b, a, points, cfg).map(|e| e.scaled(-1.0));
    }
    let edges = edges_with_ladder(a, b, points);
    gk::adaptive(f, &edges, cfg)
}

/// `∫_s^∞ f` through `x = s + u/(1−u)`.
fn integrate_tail<F>(f: &F, s: f64, cfg: &QuadratureConfig) -> Result<Estimate, QuadratureError>
where
    F: Fn(f64) -> f64,
{
    let mapped = |u: f64| {
        let w = 1.0 - u;
        let x = s + u / w;
        if x.is_infinite() {
            0.0
        } else {
            f(x) / (w * w)
        }
    };
    gk::adaptive(&mapped, &[0.0, 0.5, 1.0], cfg)
}

/// Sorted breakpoints in `[a, b]`, plus a decade ladder above a small
/// positive lower limit so that 1/x-like behaviour near ε is resolved.
pub(crate) fn edges_with_ladder(a: f64, b: f64, points: &[f64]) -> Vec<f64> {
    let mut edges = vec![a, b];
    edges.extend(points.iter().copied().filter(|&p| p > a && p < b));
    if a > 0.0 && b / a > 1e3 {
        let mut x = 10.0 * a;
        while x < b / 10.0 {
            edges.push(x);
            x *= 10.0;
        }
    }
    edges.sort_by(f64::total_cmp);
    edges.dedup();
    edges
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn tight() -> QuadratureConfig {
        QuadratureConfig::default().with_tolerances(1e-12, 1e-11)
    }

    #[test]
    fn exponential_over_half_line() {
        let e = integrate_semi_infinite(|x: f64| (-x).exp(), &tight()).unwrap();
        assert!((e.value - 1.0).abs() < 1e-10, "{e:?}");
        assert!(e.error >= 0.0);
    }

    #[test]
    fn lorentzian_tail_gives_half_pi() {
        let e = integrate_semi_infinite(|x: f64| 1.0 / (1.0 + x * x), &tight()).unwrap();
        assert!((e.value - PI / 2.0).abs() < 1e-10);
    }

    #[test]
    fn finite_window_respects_cutoffs() {
        let cfg = tight().with_cutoffs(1.0, 3.0);
        let e = integrate_semi_infinite(|x: f64| x * x, &cfg).unwrap();
        assert!((e.value - 26.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn log_singular_lower_limit_is_resolved() {
        let cfg = QuadratureConfig::default().with_cutoffs(1e-8, 100.0);
        let e = integrate_semi_infinite(|x: f64| 1.0 / x, &cfg).unwrap();
        assert!((e.value - (1e10f64).ln()).abs() < 1e-8);
    }

    #[test]
    fn narrow_resonance_with_hint() {
        // ∫_0^∞ dx / ((1−x²)² + γ²x²) = π/(2γ)
        let g = 1e-3;
        let f = |x: f64| 1.0 / ((1.0 - x * x).powi(2) + g * g * x * x);
        let e = integrate_semi_infinite_hinted(f, &[1.0], &QuadratureConfig::default()).unwrap();
        assert!((e.value / (PI / (2.0 * g)) - 1.0).abs() < 1e-8, "{e:?}");
    }

    #[test]
    fn budget_exhaustion_reports_best_estimate() {
        let cfg = QuadratureConfig { max_subdivisions: 3, ..tight() }.with_cutoffs(0.0, 1.0);
        let r = integrate_semi_infinite(|x: f64| (50.0 * x).sin().abs(), &cfg);
        match r {
            Err(QuadratureError::NotConverged { estimate, error, .. }) => {
                assert!(estimate.is_finite() && error > 0.0)
            }
            other => panic!("expected NotConverged, got {other:?}"),
        }
    }

    #[test]
    fn invalid_windows_are_rejected() {
        let cfg = QuadratureConfig::default().with_cutoffs(2.0, 1.0);
        assert!(matches!(integrate_semi_infinite(|_| 1.0, &cfg), Err(QuadratureError::InvalidConfig(_))));
        let cfg = QuadratureConfig { rel_tol: 0.0, ..QuadratureConfig::default() };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn reversed_interval_flips_sign() {
        let e = integrate_interval(|x: f64| x, 1.0, 0.0, &tight()).unwrap();
        assert!((e.value + 0.5).abs() < 1e-14);
    }
}

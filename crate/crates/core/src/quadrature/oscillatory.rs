use std::f64::consts::PI;

use super::{edges_with_ladder, gk, Estimate, QuadratureConfig, QuadratureError};

/// Trigonometric weight of an oscillatory integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Weight {
    Cos,
    Sin,
}

const MAX_FINITE_PANELS: usize = 20_000_000;
const MAX_TAIL_PANELS: usize = 200_000;

/// `∫ g(x)·w(phase_freq·t·x) dx` over `(ε, Λ)` with `w` = cos or sin.
///
/// `g` should vary slowly on the scale of one period `2π/(phase_freq·t)`.
/// Accuracy is kept when `t·Λ ≫ 1` by integrating half-period panels.
pub fn integrate_oscillatory<G>(
    g: G,
    weight: Weight,
    phase_freq: f64,
    t: f64,
    cfg: &QuadratureConfig,
) -> Result<Estimate, QuadratureError>
where
    G: Fn(f64) -> f64,
{
    if t < 0.0 || t.is_nan() {
        return Err(QuadratureError::Domain(format!("time must be non-negative, got {t}")));
    }
    let nu = phase_freq * t;
    let h = |x: f64| {
        let arg = nu * x;
        g(x) * match weight {
            Weight::Cos => arg.cos(),
            Weight::Sin => arg.sin(),
        }
    };
    let period = if nu == 0.0 { f64::INFINITY } else { 2.0 * PI / nu.abs() };
    integrate_resolved(h, period, &[], cfg)
}

/// Integrates an arbitrary integrand that oscillates with the given period,
/// splitting `(ε, Λ)` into half-period panels aligned with `x = 0` plus the
/// supplied interior points. Infinite windows sum panels until the Wynn-ε
/// extrapolation of the partial sums settles.
pub fn integrate_resolved<H>(h: H, period: f64, points: &[f64], cfg: &QuadratureConfig) -> Result<Estimate, QuadratureError>
where
    H: Fn(f64) -> f64,
{
    cfg.validate()?;
    if !(period > 0.0) {
        return Err(QuadratureError::Domain(format!("period must be positive, got {period}")));
    }
    let (lo, hi) = (cfg.ir_cutoff, cfg.uv_cutoff);
    let half = 0.5 * period;
    if hi.is_finite() {
        return integrate_panels(&h, period, points, cfg);
    }
    if !period.is_finite() {
        return super::integrate_semi_infinite_hinted(h, points, cfg);
    }

    // Finite head up to the last hint, then panel-by-panel with extrapolation.
    let start = points.iter().copied().filter(|p| p.is_finite()).fold(lo, f64::max);
    let start = ((start / half).floor() + 1.0) * half;
    let head_cfg = QuadratureConfig { uv_cutoff: start, ..cfg.clone() };
    let head = integrate_panels(&h, period, points, &head_cfg)?;

    let mut partial = Vec::with_capacity(64);
    let mut sum = 0.0;
    let mut error = 0.0;
    let mut evaluations = 0;
    let mut last_extrapolation: Option<f64> = None;
    let mut settled = 0;
    for k in 0..MAX_TAIL_PANELS {
        let a = start + k as f64 * half;
        let panel = gk::adaptive(&h, &[a, a + half], cfg)?;
        sum += panel.value;
        error += panel.error;
        evaluations += panel.evaluations;
        partial.push(sum);
        if partial.len() < 8 {
            continue;
        }
        let window = &partial[partial.len().saturating_sub(21)..];
        let extrapolated = wynn_epsilon(window);
        let tol = cfg.abs_tol.max(cfg.rel_tol * (head.value + extrapolated).abs());
        if let Some(prev) = last_extrapolation {
            settled = if (extrapolated - prev).abs() <= tol { settled + 1 } else { 0 };
            if settled >= 3 {
                let tail = Estimate { value: extrapolated, error: error + (extrapolated - prev).abs(), evaluations };
                return Ok(head.combine(tail));
            }
        }
        last_extrapolation = Some(extrapolated);
    }
    Err(QuadratureError::NotConverged {
        estimate: head.value + last_extrapolation.unwrap_or(sum),
        error: head.error + error,
        subdivisions: MAX_TAIL_PANELS,
    })
}

fn integrate_panels<H>(h: &H, period: f64, points: &[f64], cfg: &QuadratureConfig) -> Result<Estimate, QuadratureError>
where
    H: Fn(f64) -> f64,
{
    let (lo, hi) = (cfg.ir_cutoff, cfg.uv_cutoff);
    let half = 0.5 * period;
    let panels = if period.is_finite() { ((hi - lo) / half).ceil() } else { 0.0 };
    if panels > MAX_FINITE_PANELS as f64 {
        return Err(QuadratureError::InvalidConfig(format!(
            "{panels} oscillation panels exceed the limit of {MAX_FINITE_PANELS}"
        )));
    }
    let mut edges = edges_with_ladder(lo, hi, points);
    if period.is_finite() {
        let first = (lo / half).floor() as i64 + 1;
        let last = (hi / half).ceil() as i64;
        edges.extend((first..last).map(|k| k as f64 * half).filter(|&x| x > lo && x < hi));
        edges.sort_by(f64::total_cmp);
        edges.dedup();
    }
    let budget = QuadratureConfig { max_subdivisions: cfg.max_subdivisions + edges.len(), ..cfg.clone() };
    gk::adaptive(h, &edges, &budget)
}

/// Wynn's ε-algorithm applied to a sequence of partial sums; returns the
/// highest-order even-column entry.
fn wynn_epsilon(seq: &[f64]) -> f64 {
    let n = seq.len();
    let mut prev = vec![0.0; n + 1]; // ε_{-1}
    let mut cur: Vec<f64> = seq.to_vec(); // ε_0
    let mut best = *seq.last().unwrap();
    let mut column = 0;
    while cur.len() > 1 {
        let mut next = Vec::with_capacity(cur.len() - 1);
        for i in 0..cur.len() - 1 {
            let diff = cur[i + 1] - cur[i];
            if diff == 0.0 || !diff.is_finite() {
                return best;
            }
            next.push(prev[i + 1] + 1.0 / diff);
        }
        column += 1;
        if column % 2 == 0 {
            let candidate = *next.last().unwrap();
            if !candidate.is_finite() {
                return best;
            }
            best = candidate;
        }
        prev = cur;
        cur = next;
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn damped_cosine_laplace_transform() {
        let cfg = QuadratureConfig::default().with_tolerances(1e-12, 1e-11);
        let e = integrate_oscillatory(|x: f64| (-x).exp(), Weight::Cos, 10.0, 1.0, &cfg).unwrap();
        assert!((e.value - 1.0 / 101.0).abs() < 1e-10, "{e:?}");
    }

    #[test]
    fn finite_dirichlet_integral() {
        // ∫_0^Λ sin(Λx)/x dx = Si(Λ²) → π/2
        let lambda = 1000.0f64;
        let cfg = QuadratureConfig::default().with_cutoffs(0.0, lambda);
        let sinc = |x: f64| if x == 0.0 { lambda } else { (lambda * x).sin() / x };
        let e = integrate_resolved(sinc, 2.0 * PI / lambda, &[], &cfg).unwrap();
        assert!((e.value - PI / 2.0).abs() < 1e-6, "{}", e.value - PI / 2.0);
        let e = integrate_oscillatory(|x: f64| 1.0 / x, Weight::Sin, lambda, 1.0, &cfg.clone().with_cutoffs(1e-300, lambda));
        assert!((e.unwrap().value - PI / 2.0).abs() < 1e-6);
    }

    #[test]
    fn sinc_squared_mass_approaches_two_pi_t() {
        let t = 200.0;
        let cfg = QuadratureConfig::default().with_cutoffs(0.0, 100.0);
        let s = |x: f64| {
            let u = 0.5 * (x - 1.0);
            if u == 0.0 {
                t * t
            } else {
                ((u * t).sin() / u).powi(2)
            }
        };
        let e = integrate_resolved(s, 2.0 * PI / t, &[1.0], &cfg).unwrap();
        assert!((e.value / (2.0 * PI * t) - 1.0).abs() < 0.01);
    }

    #[test]
    fn infinite_window_alternating_tail() {
        // ∫_0^∞ sin(x)/x dx = π/2 needs extrapolation of the partial sums
        let cfg = QuadratureConfig::default().with_tolerances(1e-9, 1e-9);
        let e = integrate_oscillatory(|x: f64| if x == 0.0 { 1.0 } else { 1.0 / x }, Weight::Sin, 1.0, 1.0, &cfg);
        let e = e.unwrap();
        assert!((e.value - PI / 2.0).abs() < 1e-7, "{}", e.value);
    }

    #[test]
    fn negative_time_is_a_domain_error() {
        let r = integrate_oscillatory(|_| 1.0, Weight::Cos, 1.0, -1.0, &QuadratureConfig::default());
        assert!(matches!(r, Err(QuadratureError::Domain(_))));
    }

    #[test]
    fn wynn_accelerates_leibniz_series() {
        let mut s = 0.0;
        let seq: Vec<f64> = (0..15)
            .map(|k| {
                s += if k % 2 == 0 { 1.0 } else { -1.0 } / (2 * k + 1) as f64;
                s
            })
            .collect();
        assert!((wynn_epsilon(&seq) - PI / 4.0).abs() < 1e-10);
    }
}

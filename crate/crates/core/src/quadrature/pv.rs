use super::{
    integrate_interval_hinted, integrate_semi_infinite_hinted, integrate_tail, Estimate, QuadratureConfig,
    QuadratureError,
};

/// Result of a principal-value integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrincipalValue {
    pub estimate: Estimate,
    /// `false` when the pole lies outside `(ε, Λ)`; the integral was then
    /// an ordinary one.
    pub pole_in_window: bool,
}

/// `PV ∫ g(x)/(x − pole) dx` over `(ε, Λ)`, with `g` smooth at the pole.
///
/// A symmetric neighbourhood `pole ± δ` is folded onto `∫_0^δ [g(c+u) −
/// g(c−u)]/u du`, which is the zero-radius limit of symmetric excision; the
/// remainder of the window is integrated normally.
pub fn integrate_principal_value<G>(g: G, pole: f64, cfg: &QuadratureConfig) -> Result<PrincipalValue, QuadratureError>
where
    G: Fn(f64) -> f64,
{
    cfg.validate()?;
    let (lo, hi) = (cfg.ir_cutoff, cfg.uv_cutoff);
    let full = |x: f64| g(x) / (x - pole);
    if !(pole > lo && pole < hi) {
        log::warn!("pole {pole} outside ({lo}, {hi}); ordinary integral used");
        let estimate = integrate_semi_infinite_hinted(full, &[], cfg)?;
        return Ok(PrincipalValue { estimate, pole_in_window: false });
    }
    let delta = 0.5 * (pole - lo).min(hi - pole);
    let folded = |u: f64| (g(pole + u) - g(pole - u)) / u;
    let mut estimate = integrate_interval_hinted(&folded, 0.0, delta, &[], cfg)?;
    estimate = estimate.combine(integrate_interval_hinted(&full, lo, pole - delta, &[], cfg)?);
    let upper = if hi.is_finite() {
        integrate_interval_hinted(&full, pole + delta, hi, &[], cfg)?
    } else {
        integrate_tail(&full, pole + delta, cfg)?
    };
    Ok(PrincipalValue { estimate: estimate.combine(upper), pole_in_window: true })
}

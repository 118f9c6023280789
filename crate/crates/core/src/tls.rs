//! Markovian dynamics of a two-level system coupled through its dipole
//! matrix element.
//!
//! Population: `⟨σ̇_z⟩ = −2μ(1 + ⟨σ_z⟩)`. Coherences, with `F = σ + σ†` and
//! `E = σ† − σ`:
//!
//! ```text
//! Ḟ = iΓE − 2μF,    Ė = iω₀F,    Γ = ω₀ − 2Δ₂ − 2Δ₁.
//! ```

use std::f64::consts::PI;
use std::path::Path;

use crate::quadrature::{integrate_principal_value, integrate_semi_infinite, QuadratureConfig};
use crate::reservoir::CouplingFunction;
use crate::table::TableWriter;
use crate::{require, Complex64, Error, Result, Vector3};

#[derive(Debug, Clone, PartialEq)]
pub struct TwoLevelParams {
    pub omega0: f64,
    pub x12: Vector3<f64>,
    pub coupling: CouplingFunction,
    /// Drop `|x₁₂|²` from μ (but not from the level shifts).
    pub strict_as_printed: bool,
}

impl TwoLevelParams {
    pub fn new(omega0: f64, x12: Vector3<f64>, coupling: CouplingFunction) -> Result<Self> {
        require(omega0 > 0.0 && omega0.is_finite(), || format!("ω₀ must be positive, got {omega0}"))?;
        require(x12.iter().all(|c| c.is_finite()), || "dipole matrix element must be finite".into())?;
        Ok(Self { omega0, x12, coupling, strict_as_printed: false })
    }

    /// Dipole along x with the given `|x₁₂|²`.
    pub fn with_dipole_squared(omega0: f64, x12_sq: f64, coupling: CouplingFunction) -> Result<Self> {
        require(x12_sq >= 0.0, || format!("|x12|² must be non-negative, got {x12_sq}"))?;
        Self::new(omega0, Vector3::new(x12_sq.sqrt(), 0.0, 0.0), coupling)
    }

    pub fn strict(mut self, on: bool) -> Self {
        self.strict_as_printed = on;
        self
    }

    fn prefactor(&self) -> f64 {
        4.0 * PI * PI * self.omega0.powi(6) * self.x12.norm_squared() / 3.0
    }
}

/// μ = (4π²ω₀⁶/3)|f(ω₀)|²|x₁₂|²; canonical coupling gives βω₀|x₁₂|².
pub fn decay_rate_mu(p: &TwoLevelParams) -> f64 {
    let dipole = if p.strict_as_printed { 1.0 } else { p.x12.norm_squared() };
    4.0 * PI * PI * p.omega0.powi(6) / 3.0 * p.coupling.weight(p.omega0) * dipole
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelShifts {
    pub delta1: f64,
    pub delta2: f64,
    /// Infrared cutoff the shifts were computed at.
    pub ir_cutoff: f64,
    pub uv_cutoff: f64,
}

impl LevelShifts {
    pub const ZERO: LevelShifts = LevelShifts { delta1: 0.0, delta2: 0.0, ir_cutoff: 0.0, uv_cutoff: f64::INFINITY };
}

/// Δ₁ (principal value through ω₀) and Δ₂ over `(ε, Λ)`.
///
/// `ir_cutoff` has no default: any coupling with a non-vanishing low
/// frequency spectral density makes both integrals diverge like `ln ε`.
pub fn level_shifts(p: &TwoLevelParams, ir_cutoff: f64, cfg: &QuadratureConfig) -> Result<LevelShifts> {
    if p.coupling.is_zero() {
        return Ok(LevelShifts { ir_cutoff, uv_cutoff: cfg.uv_cutoff, ..LevelShifts::ZERO });
    }
    if !(ir_cutoff > 0.0) {
        return Err(Error::InfraredDivergence(format!(
            "level shifts need an infrared cutoff ε > 0 (got {ir_cutoff}); the integrands grow like 1/ω near zero"
        )));
    }
    let uv = p.coupling.support_end().min(cfg.uv_cutoff);
    let window = cfg.clone().with_cutoffs(ir_cutoff, uv);
    let g = |w: f64| p.coupling.weight(w) * w.powi(4);
    let w0 = p.omega0;
    let pv = integrate_principal_value(g, w0, &window)?;
    let plus = integrate_semi_infinite(|w| g(w) / (w + w0), &window)?;
    let k = p.prefactor();
    Ok(LevelShifts { delta1: k * pv.estimate.value, delta2: k * plus.value, ir_cutoff, uv_cutoff: uv })
}

/// Which combination of the shifts renormalizes the coherence frequency.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GammaConvention {
    /// `Γ = ω₀ − 2Δ₂ − 2Δ₁`; the leading `ln ε` terms of Δ₁ and Δ₂ cancel.
    #[default]
    Printed,
    /// `Γ = ω₀ − 2Δ₁ + 2Δ₂`, as obtained by forming F and E from the
    /// equation for ⟨σ̇⟩ term by term.
    FromBloch,
}

pub fn gamma(omega0: f64, shifts: &LevelShifts, convention: GammaConvention) -> f64 {
    match convention {
        GammaConvention::Printed => omega0 - 2.0 * shifts.delta2 - 2.0 * shifts.delta1,
        GammaConvention::FromBloch => omega0 - 2.0 * shifts.delta1 + 2.0 * shifts.delta2,
    }
}

/// `⟨σ_z(t)⟩ = −1 + (1 + sz₀)e^{−2μt}`.
pub fn sigma_z_evolution(mu: f64, sz0: f64, t: f64) -> Result<f64> {
    require((-1.0..=1.0).contains(&sz0), || format!("σ_z(0) must lie in [−1, 1], got {sz0}"))?;
    require(mu >= 0.0, || format!("μ must be non-negative, got {mu}"))?;
    Ok(-1.0 + (1.0 + sz0) * (-2.0 * mu * t).exp())
}

/// Expectation values of σ_z, F and E.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochState {
    pub sz: f64,
    pub f: Complex64,
    pub e: Complex64,
}

impl BlochState {
    pub fn new(sz: f64, f: Complex64, e: Complex64) -> Result<Self> {
        require((-1.0..=1.0).contains(&sz), || format!("σ_z must lie in [−1, 1], got {sz}"))?;
        Ok(Self { sz, f, e })
    }

    pub fn excited() -> Self {
        Self { sz: 1.0, f: Complex64::new(0.0, 0.0), e: Complex64::new(0.0, 0.0) }
    }

    pub fn ground() -> Self {
        Self { sz: -1.0, ..Self::excited() }
    }
}

/// Closed-form solution of the linear F/E system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherenceModel {
    pub mu: f64,
    pub omega0: f64,
    pub gamma: f64,
    /// Ω± = iμ ± i√(μ² − ω₀Γ), so that `F ∝ e^{iΩt}`.
    pub omega_plus: Complex64,
    pub omega_minus: Complex64,
    /// Repeated or vanishing root; the secular form is used.
    pub degenerate: bool,
}

const DEGENERACY_TOL: f64 = 1e-9;

impl CoherenceModel {
    pub fn new(mu: f64, omega0: f64, gamma: f64) -> Self {
        let root = Complex64::new(mu * mu - omega0 * gamma, 0.0).sqrt();
        let i = Complex64::i();
        let omega_plus = i * mu + i * root;
        let omega_minus = i * mu - i * root;
        let scale = mu.abs().max((omega0 * gamma).abs().sqrt()).max(f64::MIN_POSITIVE);
        let degenerate = root.norm() <= DEGENERACY_TOL * scale
            || omega_plus.norm() <= DEGENERACY_TOL * scale
            || omega_minus.norm() <= DEGENERACY_TOL * scale;
        if degenerate {
            log::warn!("coherence roots are degenerate (μ = {mu}, ω₀Γ = {}); using the secular form", omega0 * gamma);
        }
        Self { mu, omega0, gamma, omega_plus, omega_minus, degenerate }
    }

    pub fn from_params(p: &TwoLevelParams, shifts: &LevelShifts, convention: GammaConvention) -> Self {
        Self::new(decay_rate_mu(p), p.omega0, gamma(p.omega0, shifts, convention))
    }

    /// `μ² − ω₀Γ`; negative means oscillation under an e^{−μt} envelope.
    pub fn discriminant(&self) -> f64 {
        self.mu * self.mu - self.omega0 * self.gamma
    }

    /// `(C₁, C₂)` fixed by `F(0) = C₁ + C₂`, `E(0) = (ω₀/Ω₊)C₁ + (ω₀/Ω₋)C₂`.
    pub fn amplitudes(&self, f0: Complex64, e0: Complex64) -> Result<(Complex64, Complex64)> {
        if self.degenerate {
            return Err(Error::Degenerate("repeated or vanishing coherence root".into()));
        }
        let (a, b) = (self.omega0 / self.omega_plus, self.omega0 / self.omega_minus);
        let det = b - a;
        let c1 = (b * f0 - e0) / det;
        let c2 = (e0 - a * f0) / det;
        Ok((c1, c2))
    }

    pub fn evolve(&self, f0: Complex64, e0: Complex64, t: f64) -> (Complex64, Complex64) {
        let i = Complex64::i();
        match self.amplitudes(f0, e0) {
            Ok((c1, c2)) => {
                let p = c1 * (i * self.omega_plus * t).exp();
                let m = c2 * (i * self.omega_minus * t).exp();
                (p + m, p * (self.omega0 / self.omega_plus) + m * (self.omega0 / self.omega_minus))
            }
            Err(_) => self.evolve_secular(f0, e0, t),
        }
    }

    /// `e^{At} = e^{−μt}[cosh(Rt)·1 + sinh(Rt)/R·(A + μ)]` with
    /// `A = [[−2μ, iΓ], [iω₀, 0]]`, `R² = μ² − ω₀Γ`; regular as R → 0.
    pub fn evolve_secular(&self, f0: Complex64, e0: Complex64, t: f64) -> (Complex64, Complex64) {
        let i = Complex64::i();
        let r = Complex64::new(self.discriminant(), 0.0).sqrt();
        let rt = r * t;
        let cosh = rt.cosh();
        let sinhc = if rt.norm() < 1e-4 { t * (1.0 + rt * rt / 6.0) } else { rt.sinh() / r };
        let mu = self.mu;
        let f = cosh * f0 + sinhc * (-mu * f0 + i * self.gamma * e0);
        let e = cosh * e0 + sinhc * (i * self.omega0 * f0 + mu * e0);
        let env = (-mu * t).exp();
        (f * env, e * env)
    }

    /// Right-hand side of the F/E system.
    pub fn derivative(&self, f: Complex64, e: Complex64) -> (Complex64, Complex64) {
        let i = Complex64::i();
        (i * self.gamma * e - 2.0 * self.mu * f, i * self.omega0 * f)
    }

    /// Largest |eigenvalue| of the combined σ_z and F/E system.
    pub fn spectral_radius(&self) -> f64 {
        let i = Complex64::i();
        (2.0 * self.mu).max((i * self.omega_plus).norm()).max((i * self.omega_minus).norm())
    }
}

/// F(t), E(t) from the closed form.
pub fn coherence_evolution(model: &CoherenceModel, f0: Complex64, e0: Complex64, t: f64) -> (Complex64, Complex64) {
    model.evolve(f0, e0, t)
}

/// Stability limit `h·λ_max` for the fixed-step RK4 integrator.
pub const RK4_STEP_LIMIT: f64 = 0.5;

#[derive(Debug, Clone, PartialEq)]
pub struct BlochHistory {
    pub t: Vec<f64>,
    pub states: Vec<BlochState>,
}

impl BlochHistory {
    pub fn write_csv(&self, path: impl AsRef<Path>, metadata: &[(String, String)]) -> Result<()> {
        let mut w = TableWriter::create(path, metadata, &["t", "sz", "ReF", "ImF"])?;
        for (t, s) in self.t.iter().zip(&self.states) {
            w.write_floats(&[*t, s.sz, s.f.re, s.f.im])?;
        }
        w.finish()?;
        Ok(())
    }
}

/// Integrates the Markovian Bloch equations with classical RK4 on a uniform
/// grid of `steps` steps of size `dt`.
///
/// `keep_every` thins the stored history (the final state is always kept).
pub fn evolve_bloch_markov(
    model: &CoherenceModel,
    initial: BlochState,
    dt: f64,
    steps: usize,
    keep_every: usize,
) -> Result<BlochHistory> {
    require(dt > 0.0, || format!("time step must be positive, got {dt}"))?;
    let lambda = model.spectral_radius();
    if dt * lambda > RK4_STEP_LIMIT {
        return Err(Error::StepSize(format!("dt·λ_max = {} exceeds {RK4_STEP_LIMIT}", dt * lambda)));
    }
    let keep_every = keep_every.max(1);
    let mu = model.mu;
    let mut s = initial;
    let mut hist = BlochHistory { t: vec![0.0], states: vec![s] };
    // 1 + sz obeys ẏ = −2μy; the increment vanishes exactly in the ground state
    let pop_factor = {
        let z = -2.0 * mu * dt;
        1.0 + z + z * z / 2.0 + z * z * z / 6.0 + z * z * z * z / 24.0
    };
    for n in 1..=steps {
        let (f, e) = (s.f, s.e);
        let (k1f, k1e) = model.derivative(f, e);
        let (k2f, k2e) = model.derivative(f + k1f * (dt / 2.0), e + k1e * (dt / 2.0));
        let (k3f, k3e) = model.derivative(f + k2f * (dt / 2.0), e + k2e * (dt / 2.0));
        let (k4f, k4e) = model.derivative(f + k3f * dt, e + k3e * dt);
        s.f = f + (k1f + 2.0 * k2f + 2.0 * k3f + k4f) * (dt / 6.0);
        s.e = e + (k1e + 2.0 * k2e + 2.0 * k3e + k4e) * (dt / 6.0);
        s.sz += (pop_factor - 1.0) * (1.0 + s.sz);
        if n % keep_every == 0 || n == steps {
            hist.t.push(n as f64 * dt);
            hist.states.push(s);
        }
    }
    Ok(hist)
}

/// Least-squares slope of `ln(1 + sz)` against t: minus the population
/// decay rate 2μ.
pub fn fitted_population_rate(t: &[f64], sz: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = t.iter().zip(sz).filter(|(_, &s)| s > -1.0).map(|(&t, &s)| (t, (1.0 + s).ln())).collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let (mx, my) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x / n, b + y / n));
    let num: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = pts.iter().map(|(x, _)| (x - mx).powi(2)).sum();
    Some(-num / den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn canonical(beta: f64) -> CouplingFunction {
        CouplingFunction::canonical(beta).unwrap()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn mu_examples() {
        let p = TwoLevelParams::with_dipole_squared(2.0, 0.25, canonical(0.1)).unwrap();
        assert_relative_eq!(decay_rate_mu(&p), 0.05, max_relative = 1e-14);
        assert_relative_eq!(decay_rate_mu(&p.clone().strict(true)), 0.2, max_relative = 1e-14);
        let zero = TwoLevelParams::with_dipole_squared(2.0, 0.25, CouplingFunction::Zero).unwrap();
        assert_eq!(decay_rate_mu(&zero), 0.0);
        let grid: Vec<f64> = (1..=300).map(|i| i as f64 * 0.01).collect();
        let tab = CouplingFunction::tabulate(grid, |w| canonical(0.1).eval(w)).unwrap();
        let pt = TwoLevelParams::with_dipole_squared(2.0, 0.25, tab).unwrap();
        assert!((decay_rate_mu(&pt) - 0.05).abs() < 1e-10);
    }

    #[test]
    fn mu_scaling() {
        let base = decay_rate_mu(&TwoLevelParams::with_dipole_squared(1.3, 0.2, canonical(0.1)).unwrap());
        let double_beta = decay_rate_mu(&TwoLevelParams::with_dipole_squared(1.3, 0.2, canonical(0.2)).unwrap());
        let p = TwoLevelParams::new(1.3, Vector3::new(0.2f64.sqrt() * 3.0, 0.0, 0.0), canonical(0.1)).unwrap();
        assert_relative_eq!(double_beta, 2.0 * base, max_relative = 1e-14);
        assert_relative_eq!(decay_rate_mu(&p), 9.0 * base, max_relative = 1e-13);
    }

    #[test]
    fn delta2_closed_form() {
        let (beta, w0, eps, lam) = (0.1, 1.0, 1e-3, 1e3);
        let p = TwoLevelParams::with_dipole_squared(w0, 1.0, canonical(beta)).unwrap();
        let cfg = QuadratureConfig::default().with_cutoffs(0.0, lam);
        let s = level_shifts(&p, eps, &cfg).unwrap();
        let k = p.prefactor();
        let closed = 3.0 * beta / (4.0 * PI * PI * w0) * (lam * (eps + w0) / (eps * (lam + w0))).ln();
        assert_relative_eq!(s.delta2 / k, closed, max_relative = 1e-8);
        let closed1 = 3.0 * beta / (4.0 * PI * PI * w0) * ((lam - w0) * eps / ((w0 - eps) * lam)).ln();
        assert_relative_eq!(s.delta1 / k, closed1, max_relative = 1e-8);
    }

    #[test]
    fn symmetric_weight_has_no_delta1() {
        // |f|²ω⁴ a tent even about ω₀ on [0, 2ω₀]; what remains is
        // interpolation error of the table
        let w0 = 1.5;
        let grid: Vec<f64> = (1..2000).map(|i| i as f64 * 2.0 * w0 / 2000.0).collect();
        let tent = |w: f64| (1.0 - (w - w0).abs() / w0).max(0.0);
        let tab = CouplingFunction::tabulate(grid, |w| (tent(w) / w.powi(4)).sqrt()).unwrap();
        let p = TwoLevelParams::with_dipole_squared(w0, 1.0, tab).unwrap();
        let cfg = QuadratureConfig::default().with_cutoffs(0.0, 2.0 * w0);
        let s = level_shifts(&p, 2.0 * w0 / 2000.0, &cfg).unwrap();
        assert!(s.delta1.abs() < 1e-5 * s.delta2.abs(), "{s:?}");
    }

    #[test]
    fn canonical_shift_signs_and_log_cancellation() {
        let p = TwoLevelParams::with_dipole_squared(1.0, 1.0, canonical(0.1)).unwrap();
        let cfg = QuadratureConfig::default().with_cutoffs(0.0, 1e4);
        let a = level_shifts(&p, 1e-4, &cfg).unwrap();
        let b = level_shifts(&p, 1e-6, &cfg).unwrap();
        assert!(a.delta1 < 0.0 && a.delta2 > 0.0);
        // the ln ε pieces cancel in Δ₁ + Δ₂
        let ga = gamma(1.0, &a, GammaConvention::Printed);
        let gb = gamma(1.0, &b, GammaConvention::Printed);
        assert!((ga - gb).abs() < 1e-3 * (a.delta2 - b.delta2).abs());
        assert!((gamma(1.0, &a, GammaConvention::FromBloch) - gamma(1.0, &b, GammaConvention::FromBloch)).abs() > 0.1);
    }

    #[test]
    fn level_shifts_need_an_ir_cutoff() {
        let p = TwoLevelParams::with_dipole_squared(1.0, 1.0, canonical(0.1)).unwrap();
        let cfg = QuadratureConfig::default().with_cutoffs(0.0, 100.0);
        assert!(matches!(level_shifts(&p, 0.0, &cfg), Err(Error::InfraredDivergence(_))));
    }

    #[test]
    fn population_closed_form() {
        assert_eq!(sigma_z_evolution(0.3, -1.0, 17.0).unwrap(), -1.0);
        let mu = 0.05;
        assert!(sigma_z_evolution(mu, 1.0, 2f64.ln() / (2.0 * mu)).unwrap().abs() < 1e-15);
        assert_eq!(sigma_z_evolution(mu, 0.4, f64::INFINITY).unwrap(), -1.0);
        assert!(sigma_z_evolution(mu, 1.5, 1.0).is_err());
    }

    #[test]
    fn closed_system_oscillates_at_omega0() {
        let m = CoherenceModel::new(0.0, 2.0, 2.0);
        assert!(!m.degenerate);
        let (f0, e0) = (c(1.0, 0.0), c(0.0, 0.0));
        for &t in &[0.3, 1.7, 25.0] {
            let (f, e) = m.evolve(f0, e0, t);
            assert!((f - c((2.0 * t).cos(), 0.0)).norm() < 1e-12);
            assert!((e - c(0.0, (2.0 * t).sin())).norm() < 1e-12);
            // conserved: |F|² + |E|² with Γ = ω₀
            assert_relative_eq!(f.norm_sqr() + e.norm_sqr(), 1.0, max_relative = 1e-12);
        }
    }

    #[test]
    fn amplitudes_reproduce_initial_data() {
        let m = CoherenceModel::new(0.07, 1.3, 1.1);
        let (f0, e0) = (c(0.3, -0.2), c(0.1, 0.9));
        let (f, e) = m.evolve(f0, e0, 0.0);
        assert!((f - f0).norm() < 1e-14 && (e - e0).norm() < 1e-14);
        let (fs, es) = m.evolve_secular(f0, e0, 3.7);
        let (fc, ec) = m.evolve(f0, e0, 3.7);
        assert!((fs - fc).norm() < 1e-12 && (es - ec).norm() < 1e-12);
    }

    #[test]
    fn degenerate_roots_use_secular_form() {
        // μ² = ω₀Γ
        let m = CoherenceModel::new(0.5, 1.0, 0.25);
        assert!(m.degenerate);
        let (f0, e0) = (c(1.0, 0.0), c(0.0, 0.5));
        let ode = evolve_bloch_markov(&m, BlochState::new(0.0, f0, e0).unwrap(), 1e-4, 50_000, 50_000).unwrap();
        let (f, e) = m.evolve(f0, e0, 5.0);
        let last = ode.states.last().unwrap();
        assert!((last.f - f).norm() < 1e-10 && (last.e - e).norm() < 1e-10);
    }

    #[test]
    fn ode_matches_population_and_coherence() {
        let m = CoherenceModel::new(0.05, 1.0, 0.9);
        let (f0, e0) = (c(1.0, 0.0), c(0.0, 0.0));
        let dt = 1e-3;
        let steps = (10.0 / m.mu / dt) as usize;
        let h = evolve_bloch_markov(&m, BlochState::new(1.0, f0, e0).unwrap(), dt, steps, 100).unwrap();
        let mut worst_sz = 0.0f64;
        let mut worst_f = 0.0f64;
        for (t, s) in h.t.iter().zip(&h.states) {
            worst_sz = worst_sz.max((s.sz - sigma_z_evolution(m.mu, 1.0, *t).unwrap()).abs());
            let (f, e) = m.evolve(f0, e0, *t);
            worst_f = worst_f.max((s.f - f).norm()).max((s.e - e).norm());
        }
        assert!(worst_sz < 1e-8, "{worst_sz}");
        assert!(worst_f < 1e-8, "{worst_f}");
    }

    #[test]
    fn ground_state_is_fixed() {
        let m = CoherenceModel::new(0.2, 1.0, 1.0);
        let h = evolve_bloch_markov(&m, BlochState::ground(), 1e-3, 1_000_000, 1_000_000).unwrap();
        assert_eq!(h.states.last().unwrap().sz, -1.0);
    }

    #[test]
    fn no_decay_keeps_population() {
        let m = CoherenceModel::new(0.0, 1.0, 1.0);
        let h = evolve_bloch_markov(&m, BlochState::new(0.3, c(0.0, 0.0), c(0.0, 0.0)).unwrap(), 1e-2, 1000, 1).unwrap();
        assert!(h.states.iter().all(|s| s.sz == 0.3));
    }

    #[test]
    fn emission_power_is_non_negative() {
        let mu = 0.1;
        let ts: Vec<f64> = (0..200).map(|i| i as f64 * 0.25).collect();
        for w in ts.windows(2) {
            let (a, b) = (sigma_z_evolution(mu, 1.0, w[0]).unwrap(), sigma_z_evolution(mu, 1.0, w[1]).unwrap());
            assert!(-(1.0 / 2.0) * (b - a) >= 0.0);
        }
    }

    #[test]
    fn oversized_step_rejected() {
        let m = CoherenceModel::new(0.1, 10.0, 10.0);
        assert!(matches!(evolve_bloch_markov(&m, BlochState::excited(), 0.1, 10, 1), Err(Error::StepSize(_))));
    }

    #[test]
    fn population_fit_recovers_rate() {
        let mu = 0.05;
        let t: Vec<f64> = (0..100).map(|i| i as f64).collect();
        let sz: Vec<f64> = t.iter().map(|&t| sigma_z_evolution(mu, 1.0, t).unwrap()).collect();
        assert_relative_eq!(fitted_population_rate(&t, &sz).unwrap(), 2.0 * mu, max_relative = 1e-10);
    }
}

//! Closed forms for the damped 3D harmonic oscillator `v = ½mω²x²` coupled
//! through the canonical coupling.

use std::f64::consts::PI;

use crate::langevin::Trajectory;
use crate::par::{self, Exec};
use crate::quadrature::{integrate_semi_infinite_hinted, QuadratureConfig};
use crate::reservoir::bose_einstein;
use crate::{require, Error, Result, Vector3};

/// Above this β/mω the small-damping asymptotics are flagged.
pub const SMALL_DAMPING_LIMIT: f64 = 0.3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscillatorParams {
    pub m: f64,
    pub omega: f64,
    pub beta: f64,
}

impl OscillatorParams {
    pub fn new(m: f64, omega: f64, beta: f64) -> Result<Self> {
        require(m > 0.0 && m.is_finite(), || format!("mass must be positive, got {m}"))?;
        require(omega > 0.0 && omega.is_finite(), || format!("frequency must be positive, got {omega}"))?;
        require(beta >= 0.0 && beta.is_finite(), || format!("friction must be non-negative, got {beta}"))?;
        Ok(Self { m, omega, beta })
    }

    /// Amplitude decay rate β/2m.
    pub fn decay(&self) -> f64 {
        self.beta / (2.0 * self.m)
    }

    /// β/mω, the small parameter of the asymptotic results.
    pub fn damping_ratio(&self) -> f64 {
        self.beta / (self.m * self.omega)
    }

    pub fn is_small_damping(&self) -> bool {
        self.damping_ratio() <= SMALL_DAMPING_LIMIT
    }
}

/// Occupations of the three Cartesian oscillator modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct FockTriple {
    pub n1: u32,
    pub n2: u32,
    pub n3: u32,
}

impl FockTriple {
    pub const GROUND: FockTriple = FockTriple { n1: 0, n2: 0, n3: 0 };

    pub fn new(n1: u32, n2: u32, n3: u32) -> Self {
        Self { n1, n2, n3 }
    }

    pub fn total(&self) -> u32 {
        self.n1 + self.n2 + self.n3
    }

    pub fn as_array(&self) -> [u32; 3] {
        [self.n1, self.n2, self.n3]
    }

    /// `n₁+n₂+n₃+3/2`.
    pub fn energy_quanta(&self) -> f64 {
        self.total() as f64 + 1.5
    }
}

impl std::str::FromStr for FockTriple {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        let bad = || Error::InvalidParameter(format!("expected three non-negative integers 'n1,n2,n3', got '{s}'"));
        if parts.len() != 3 {
            return Err(bad());
        }
        let mut n = [0u32; 3];
        for (slot, p) in n.iter_mut().zip(&parts) {
            *slot = p.parse().map_err(|_| bad())?;
        }
        Ok(Self::new(n[0], n[1], n[2]))
    }
}

impl std::fmt::Display for FockTriple {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{},{},{}", self.n1, self.n2, self.n3)
    }
}

/// ω₁ = √(ω² − β²/4m²).
pub fn damped_frequency(p: &OscillatorParams) -> Result<f64> {
    let critical = 2.0 * p.m * p.omega;
    if p.beta >= critical {
        return Err(Error::Overdamped { beta: p.beta, critical });
    }
    Ok((p.omega * p.omega - p.decay() * p.decay()).sqrt())
}

/// Mean position of the vacuum-averaged solution.
pub fn mean_trajectory(p: &OscillatorParams, x0: Vector3<f64>, p0: Vector3<f64>, t: f64) -> Result<Vector3<f64>> {
    Ok(mean_state(p, x0, p0, t)?.0)
}

/// Mean position and velocity at time `t`.
pub fn mean_state(
    p: &OscillatorParams,
    x0: Vector3<f64>,
    p0: Vector3<f64>,
    t: f64,
) -> Result<(Vector3<f64>, Vector3<f64>)> {
    let w1 = damped_frequency(p)?;
    let g = p.decay();
    let (s, c) = (w1 * t).sin_cos();
    let env = (-g * t).exp();
    let b = p0 / (p.m * w1) + x0 * (g / w1);
    let x = (x0 * c + b * s) * env;
    let v = ((b * w1 - x0 * g) * c - (x0 * w1 + b * g) * s) * env;
    Ok((x, v))
}

/// The closed-form mean trajectory sampled on `steps + 1` uniform points.
pub fn sample_mean_trajectory(
    p: &OscillatorParams,
    x0: Vector3<f64>,
    p0: Vector3<f64>,
    dt: f64,
    steps: usize,
) -> Result<Trajectory> {
    require(dt > 0.0, || format!("time step must be positive, got {dt}"))?;
    let mut tr = Trajectory { t: Vec::with_capacity(steps + 1), x: Vec::with_capacity(steps + 1), v: Vec::with_capacity(steps + 1) };
    for i in 0..=steps {
        let t = i as f64 * dt;
        let (x, v) = mean_state(p, x0, p0, t)?;
        tr.t.push(t);
        tr.x.push(x);
        tr.v.push(v);
    }
    Ok(tr)
}

/// Retarded response `G(t) = e^{−βt/2m} sin(ω₁t)/(mω₁)`: the displacement
/// produced by a unit impulse at t = 0. The reservoir drift term enters the
/// mean only through its convolution with `G`, which vanishes in vacuum and
/// thermal states.
pub fn response_function(p: &OscillatorParams, t: f64) -> Result<f64> {
    if t < 0.0 {
        return Ok(0.0);
    }
    let w1 = damped_frequency(p)?;
    Ok((-p.decay() * t).exp() * (w1 * t).sin() / (p.m * w1))
}

/// Long-time normal-ordered system energy in the two ways it can be written.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemEnergy {
    /// `⟨:½mẋ² + ½mω²x²:⟩ → 0`.
    pub velocity_form: f64,
    /// `⟨:p²/2m + ½mω²x²:⟩ → (β²/2m²ω)(n₁+n₂+n₃+3/2)`, the leftover of the
    /// canonical momentum `p = mẋ + R`.
    pub canonical_form: f64,
    pub small_damping: bool,
}

pub fn asymptotic_system_energy(p: &OscillatorParams, n: FockTriple) -> SystemEnergy {
    let small_damping = p.is_small_damping();
    if !small_damping {
        log::warn!("β/mω = {} exceeds {SMALL_DAMPING_LIMIT}; asymptotic energies are outside their regime", p.damping_ratio());
    }
    SystemEnergy {
        velocity_form: 0.0,
        canonical_form: p.beta * p.beta / (2.0 * p.m * p.m * p.omega) * n.energy_quanta(),
        small_damping,
    }
}

/// Long-time reservoir energy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReservoirEnergy {
    pub numeric: f64,
    pub residue_closed_form: f64,
    /// `I₀ = ∫₀^∞ dx/D(x)`, `D = (ω²−x²)² + β²x²/m²`.
    pub i0: f64,
    /// `I₂ = ∫₀^∞ x² dx/D(x)`.
    pub i2: f64,
}

pub fn lorentzian_denominator(p: &OscillatorParams, x: f64) -> f64 {
    let d = p.omega * p.omega - x * x;
    d * d + (p.beta * x / p.m).powi(2)
}

/// Energy transferred into the reservoir as t → ∞, from quadrature of the
/// Lorentzian integrals, together with the residue value `(n+3/2)ω`.
pub fn asymptotic_reservoir_energy(p: &OscillatorParams, n: FockTriple, cfg: &QuadratureConfig) -> Result<ReservoirEnergy> {
    if p.beta == 0.0 {
        return Err(Error::Degenerate("β = 0: the oscillator never relaxes into the reservoir".into()));
    }
    damped_frequency(p)?;
    if !p.is_small_damping() {
        log::warn!("β/mω = {} exceeds {SMALL_DAMPING_LIMIT}", p.damping_ratio());
    }
    let hints = resonance_hints(p);
    let i0 = integrate_semi_infinite_hinted(|x| 1.0 / lorentzian_denominator(p, x), &hints, cfg)?.value;
    let i2 = integrate_semi_infinite_hinted(|x| x * x / lorentzian_denominator(p, x), &hints, cfg)?.value;
    let q = n.energy_quanta();
    let (w, b, m) = (p.omega, p.beta, p.m);
    let numeric = b * w.powi(3) / (PI * m) * q * i0 + b * w / (PI * m) * q * i2;
    Ok(ReservoirEnergy { numeric, residue_closed_form: q * w, i0, i2 })
}

// Breakpoints bracketing the resonance at ±a few line widths.
fn resonance_hints(p: &OscillatorParams) -> Vec<f64> {
    let width = (p.beta / p.m).max(1e-300);
    let mut h: Vec<f64> = [-8.0, -1.0, 0.0, 1.0, 8.0]
        .iter()
        .map(|k| p.omega + k * width)
        .filter(|&x| x > 0.0)
        .collect();
    h.dedup();
    h
}

/// Thermal steady-state energy of the oscillator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermalEnergy {
    /// `(6β/πm²)[∫x n̄/D + ∫x³ n̄/D]`, evaluated exactly as written.
    pub printed: f64,
    /// Steady state of the oscillator driven by a discretized thermal bath.
    pub mode_sum: f64,
    /// `∫₀^∞ x n̄(x)/D(x) dx`.
    pub first_integral: f64,
    /// `∫₀^∞ x³ n̄(x)/D(x) dx`.
    pub third_integral: f64,
}

pub fn thermal_steady_energy(p: &OscillatorParams, kt: f64, cfg: &QuadratureConfig) -> Result<ThermalEnergy> {
    thermal_steady_energy_with(p, kt, cfg, Exec::default())
}

pub fn thermal_steady_energy_with(p: &OscillatorParams, kt: f64, cfg: &QuadratureConfig, exec: Exec) -> Result<ThermalEnergy> {
    require(kt > 0.0 && kt.is_finite(), || format!("temperature must be positive, got {kt}"))?;
    require(p.beta > 0.0, || "thermal steady state needs β > 0".into())?;
    let (first, third) = thermal_integrals(p, kt, cfg)?;
    let printed = 6.0 * p.beta / (PI * p.m * p.m) * (first + third);
    let mode_sum = thermal_mode_sum(p, kt, exec);
    Ok(ThermalEnergy { printed, mode_sum, first_integral: first, third_integral: third })
}

/// `(∫x n̄/D, ∫x³ n̄/D)` over the configured window.
pub fn thermal_integrals(p: &OscillatorParams, kt: f64, cfg: &QuadratureConfig) -> Result<(f64, f64)> {
    let n = |x: f64| if x == 0.0 { 0.0 } else { bose_einstein(x / kt) };
    let hints = resonance_hints(p);
    let first = integrate_semi_infinite_hinted(|x| x * n(x) / lorentzian_denominator(p, x), &hints, cfg)?.value;
    let third = integrate_semi_infinite_hinted(|x| x.powi(3) * n(x) / lorentzian_denominator(p, x), &hints, cfg)?.value;
    Ok((first, third))
}

/// Energy `3⟨½mẋ² + ½mω²x²⟩` of the oscillator in steady state with a bath
/// of discrete modes ν_j = (j+½)Δν. Each mode drives the particle with a
/// force of variance `(2β/π) ν_j n̄(ν_j) Δν` (the canonical spectral weight
/// with normal-ordered thermal occupation) and contributes its exact
/// stationary response `|X_j|² = σ_j² / (m² D(ν_j))`.
pub fn thermal_mode_sum(p: &OscillatorParams, kt: f64, exec: Exec) -> f64 {
    let width = (p.beta / p.m).min(p.omega);
    let dnu = width / 64.0;
    let top = (p.omega + 10.0 * width).max(60.0 * kt);
    let modes = (top / dnu).ceil() as usize;
    let sum = par::sum_range(exec, modes, |j| {
        let nu = (j as f64 + 0.5) * dnu;
        let var = 2.0 * p.beta / PI * nu * bose_einstein(nu / kt) * dnu;
        var * (nu * nu + p.omega * p.omega) / lorentzian_denominator(p, nu)
    });
    3.0 * sum / (2.0 * p.m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn params(m: f64, w: f64, b: f64) -> OscillatorParams {
        OscillatorParams::new(m, w, b).unwrap()
    }

    #[test]
    fn damped_frequency_values() {
        assert_eq!(damped_frequency(&params(1.0, 1.0, 0.0)).unwrap(), 1.0);
        assert_relative_eq!(damped_frequency(&params(1.0, 1.0, 1.0)).unwrap(), 0.866_025_403_784_438_6, max_relative = 1e-15);
        assert!(matches!(damped_frequency(&params(2.0, 3.0, 12.0)), Err(Error::Overdamped { .. })));
    }

    #[test]
    fn trajectory_examples() {
        let x0 = Vector3::new(1.0, 0.0, 0.0);
        let p = params(1.0, 1.0, 0.0);
        assert_eq!(mean_trajectory(&p, x0, Vector3::zeros(), 0.0).unwrap(), x0);
        let x = mean_trajectory(&p, x0, Vector3::zeros(), PI).unwrap();
        assert!((x - Vector3::new(-1.0, 0.0, 0.0)).norm() < 1e-15);

        let p = params(1.0, 1.0, 0.2);
        let w1 = damped_frequency(&p).unwrap();
        let x = mean_trajectory(&p, x0, Vector3::zeros(), 2.0 * PI / w1).unwrap();
        assert_relative_eq!(x[0], (-0.2 * PI / w1).exp(), max_relative = 1e-12);
        assert_relative_eq!(x[0], 0.5318, max_relative = 1e-3);
    }

    #[test]
    fn velocity_is_the_time_derivative() {
        let p = params(1.3, 0.8, 0.35);
        let (x0, p0) = (Vector3::new(0.4, -1.0, 2.0), Vector3::new(1.0, 0.5, -0.3));
        let h = 1e-5;
        for &t in &[0.0, 0.7, 4.2] {
            let (_, v) = mean_state(&p, x0, p0, t).unwrap();
            let fd = (mean_trajectory(&p, x0, p0, t + h).unwrap() - mean_trajectory(&p, x0, p0, t - h).unwrap()) / (2.0 * h);
            assert!((v - fd).norm() < 1e-8);
        }
        let (_, v0) = mean_state(&p, x0, p0, 0.0).unwrap();
        assert!((v0 - p0 / p.m).norm() < 1e-14);
    }

    #[test]
    fn response_function_is_the_impulse_response() {
        let p = params(2.0, 1.5, 0.4);
        let via_traj = mean_trajectory(&p, Vector3::zeros(), Vector3::new(1.0, 0.0, 0.0), 3.3).unwrap()[0];
        assert_relative_eq!(response_function(&p, 3.3).unwrap(), via_traj, max_relative = 1e-14);
        assert_eq!(response_function(&p, -1.0).unwrap(), 0.0);
    }

    #[test]
    fn system_energy_examples() {
        let e = asymptotic_system_energy(&params(1.0, 1.0, 0.1), FockTriple::GROUND);
        assert_relative_eq!(e.canonical_form, 0.0075, max_relative = 1e-14);
        assert_eq!(e.velocity_form, 0.0);
        assert_eq!(asymptotic_system_energy(&params(1.0, 1.0, 0.0), FockTriple::GROUND).canonical_form, 0.0);
        let e = asymptotic_system_energy(&params(2.0, 0.5, 0.1), FockTriple::new(1, 1, 0));
        assert_relative_eq!(e.canonical_form, 0.00875, max_relative = 1e-14);
        assert!(!asymptotic_system_energy(&params(1.0, 1.0, 0.5), FockTriple::GROUND).small_damping);
    }

    #[test]
    fn reservoir_energy_examples() {
        let cfg = QuadratureConfig::default();
        let e = asymptotic_reservoir_energy(&params(1.0, 1.0, 0.01), FockTriple::GROUND, &cfg).unwrap();
        assert_eq!(e.residue_closed_form, 1.5);
        assert!((e.numeric / 1.5 - 1.0).abs() < 1e-3);
        let e = asymptotic_reservoir_energy(&params(1.0, 2.0, 0.02), FockTriple::new(1, 0, 0), &cfg).unwrap();
        assert_eq!(e.residue_closed_form, 5.0);
        let e = asymptotic_reservoir_energy(&params(1.0, 1.0, 0.1), FockTriple::GROUND, &cfg).unwrap();
        assert!((e.i0 / 15.708 - 1.0).abs() < 0.01);
        assert!(matches!(
            asymptotic_reservoir_energy(&params(1.0, 1.0, 0.0), FockTriple::GROUND, &cfg),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn lorentzian_integrals_match_residues() {
        // I₀ = πm/(2βω²), I₂ = πm/(2β) for every underdamped β
        let cfg = QuadratureConfig::default().with_tolerances(1e-12, 1e-11);
        for &(m, w, b) in &[(1.0, 1.0, 1e-3), (2.0, 0.7, 0.05), (0.5, 3.0, 0.4)] {
            let p = params(m, w, b);
            let e = asymptotic_reservoir_energy(&p, FockTriple::GROUND, &cfg).unwrap();
            assert_relative_eq!(e.i0, PI * m / (2.0 * b * w * w), max_relative = 1e-8);
            assert_relative_eq!(e.i2, PI * m / (2.0 * b), max_relative = 1e-8);
        }
    }

    #[test]
    fn thermal_energy_freezes_out() {
        // modes below kT stay populated, so the approach is ∝ T² rather than
        // exponential
        let p = params(1.0, 1.0, 0.1);
        let cfg = QuadratureConfig::default();
        let a = thermal_steady_energy(&p, 1e-3, &cfg).unwrap();
        let b = thermal_steady_energy(&p, 5e-4, &cfg).unwrap();
        assert!(a.printed < 1e-6);
        assert_relative_eq!(a.printed / b.printed, 4.0, max_relative = 1e-3);
    }

    #[test]
    fn mode_sum_reaches_equipartition() {
        // high temperature: 3D oscillator holds 3kT
        let p = params(1.0, 1.0, 0.1);
        let kt = 50.0;
        let e = thermal_mode_sum(&p, kt, Exec::Serial);
        assert!((e / (3.0 * kt) - 1.0).abs() < 0.02, "{e}");
    }

    #[test]
    fn mode_sum_matches_consistent_prefactor() {
        let p = params(1.7, 1.2, 0.08);
        let e = thermal_steady_energy(&p, 0.9, &QuadratureConfig::default()).unwrap();
        let consistent = 3.0 * p.beta / (PI * p.m) * (p.omega * p.omega * e.first_integral + e.third_integral);
        assert!((e.mode_sum / consistent - 1.0).abs() < 1e-3, "{} vs {consistent}", e.mode_sum);
    }

    #[test]
    fn fock_triple_parsing() {
        let n: FockTriple = "2, 1,0".parse().unwrap();
        assert_eq!(n, FockTriple::new(2, 1, 0));
        assert_eq!(n.to_string(), "2,1,0");
        assert!("1,2".parse::<FockTriple>().is_err());
        assert!("1,-2,0".parse::<FockTriple>().is_err());
    }
}

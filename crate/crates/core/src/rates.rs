//! First-order transition probabilities of the oscillator into and out of
//! the reservoir, and their golden-rule limits.
//!
//! Only the rotating terms `a b†` and `a† b` survive; the probability of a
//! one-quantum emission after time t is
//!
//! ```text
//! P(t) = (2πω n / 3m) ∫ dω_k ω_k⁴ |f(ω_k)|² sin²((ω_k−ω)t/2) / ((ω_k−ω)/2)²
//! ```
//!
//! with `n = n₁+n₂+n₃`, and `sin²(xt/2)/(x/2)² → 2πt δ(x)` gives the rates.

use std::f64::consts::PI;

use crate::oscillator::{FockTriple, OscillatorParams};
use crate::quadrature::{integrate_resolved, QuadratureConfig};
use crate::reservoir::{bose_einstein, bose_einstein_plus_one, CouplingFunction, ReservoirState};
use crate::table::Cell;
use crate::{require, Error, Result};

/// Probabilities above this are flagged; first-order theory is doubtful.
pub const WARN_PROBABILITY: f64 = 0.1;

#[derive(Debug, Clone, PartialEq)]
pub struct RateRequest {
    pub params: OscillatorParams,
    pub n: FockTriple,
    pub reservoir: ReservoirState,
    pub coupling: CouplingFunction,
    /// Finite observation time; `None` asks for long-time rates.
    pub t: Option<f64>,
}

impl RateRequest {
    pub fn new(params: OscillatorParams, n: FockTriple, reservoir: ReservoirState, coupling: CouplingFunction) -> Self {
        Self { params, n, reservoir, coupling, t: None }
    }

    pub fn at_time(mut self, t: f64) -> Self {
        self.t = Some(t);
        self
    }
}

/// Long-time transition rates (probability per unit time).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rates {
    pub emission: f64,
    pub absorption: f64,
}

/// `ω_k⁴|f(ω_k)|²`, the per-mode weight in every rate.
fn mode_weight(c: &CouplingFunction, w: f64) -> f64 {
    w.powi(4) * c.weight(w)
}

/// Single-quantum vacuum emission rate per excitation, `4π²ω⁵|f(ω)|²/3m`.
pub fn unit_emission_rate(p: &OscillatorParams, c: &CouplingFunction) -> f64 {
    4.0 * PI * PI * p.omega * mode_weight(c, p.omega) / (3.0 * p.m)
}

/// First-order emission probability at finite time, without the
/// perturbative-validity guard. Linear in the coupling strength.
pub fn first_order_emission_probability(r: &RateRequest, cfg: &QuadratureConfig) -> Result<f64> {
    let t = r.t.ok_or_else(|| Error::InvalidParameter("finite-time probability needs a time".into()))?;
    require(t > 0.0 && t.is_finite(), || format!("observation time must be positive, got {t}"))?;
    require(
        matches!(r.reservoir, ReservoirState::Vacuum),
        || format!("finite-time emission is defined for the vacuum reservoir, got {}", r.reservoir.tag()),
    )?;
    let n = r.n.total();
    if n == 0 || r.coupling.is_zero() {
        return Ok(0.0);
    }
    let w = r.params.omega;
    let hi = r.coupling.support_end().min(cfg.uv_cutoff);
    if !hi.is_finite() {
        return Err(Error::InvalidParameter("finite-time probability needs a finite UV cutoff".into()));
    }
    let window = cfg.clone().with_cutoffs(cfg.ir_cutoff, hi);
    let sinc2 = |wk: f64| {
        let u = 0.5 * (wk - w);
        if u == 0.0 {
            t * t
        } else {
            ((u * t).sin() / u).powi(2)
        }
    };
    let integral = integrate_resolved(|wk| mode_weight(&r.coupling, wk) * sinc2(wk), 2.0 * PI / t, &[w], &window)?.value;
    Ok(2.0 * PI * w * n as f64 / (3.0 * r.params.m) * integral)
}

/// First-order emission probability at finite time from the vacuum.
///
/// Probabilities above [`WARN_PROBABILITY`] log a warning; above one the
/// expansion has failed and an error is returned.
pub fn finite_time_emission_probability(r: &RateRequest, cfg: &QuadratureConfig) -> Result<f64> {
    let p = first_order_emission_probability(r, cfg)?;
    guard_probability(p)
}

pub fn guard_probability(p: f64) -> Result<f64> {
    if p > 1.0 {
        return Err(Error::PerturbationViolated(p));
    }
    if p > WARN_PROBABILITY {
        log::warn!("transition probability {p} exceeds {WARN_PROBABILITY}; first-order theory is marginal");
    }
    Ok(p)
}

/// Vacuum rates: emission `n·4π²ω⁵|f(ω)|²/3m` (canonical: `nβ/m`),
/// absorption exactly zero.
pub fn rate_emission_vacuum(r: &RateRequest) -> Rates {
    Rates { emission: r.n.total() as f64 * unit_emission_rate(&r.params, &r.coupling), absorption: 0.0 }
}

/// Rates with a Fock reservoir. Emission is the vacuum value; absorption
/// collects the quanta resonant with ω, each weighted by its line weight.
pub fn rates_fock(r: &RateRequest) -> Result<Rates> {
    let ReservoirState::Fock(quanta) = &r.reservoir else {
        return Err(Error::InvalidParameter(format!("expected a Fock reservoir, got {}", r.reservoir.tag())));
    };
    let p = &r.params;
    let [n1, n2, n3] = r.n.as_array().map(|k| k as f64 + 1.0);
    let resonant: f64 = quanta
        .iter()
        .filter(|q| q.is_resonant(p.omega, crate::reservoir::RESONANCE_TOL))
        .map(|q| {
            let k = q.momentum;
            q.weight * (n1 * k[0] * k[0] + n2 * k[1] * k[1] + n3 * k[2] * k[2])
        })
        .sum();
    let prefactor = p.omega * PI / p.m * r.coupling.weight(p.omega);
    Ok(Rates { emission: rate_emission_vacuum(r).emission, absorption: prefactor * resonant })
}

/// Rates with a thermal reservoir: emission `n·Γ₁·(1 + n̄)`, absorption
/// `(n+3)·Γ₁·n̄`, with Γ₁ the single-quantum vacuum rate.
pub fn rates_thermal(r: &RateRequest) -> Result<Rates> {
    let ReservoirState::Thermal { kt } = r.reservoir else {
        return Err(Error::InvalidParameter(format!("expected a thermal reservoir, got {}", r.reservoir.tag())));
    };
    require(kt > 0.0, || format!("temperature must be positive, got {kt}"))?;
    let x = r.params.omega / kt;
    let unit = unit_emission_rate(&r.params, &r.coupling);
    let n = r.n.total() as f64;
    Ok(Rates { emission: n * unit * bose_einstein_plus_one(x), absorption: (n + 3.0) * unit * bose_einstein(x) })
}

/// Long-time rates for whichever reservoir the request carries.
pub fn rates(r: &RateRequest) -> Result<Rates> {
    match r.reservoir {
        ReservoirState::Vacuum => Ok(rate_emission_vacuum(r)),
        ReservoirState::Fock(_) => rates_fock(r),
        ReservoirState::Thermal { .. } => rates_thermal(r),
    }
}

pub const RATE_COLUMNS: [&str; 4] = ["n", "reservoir", "emission", "absorption"];

pub fn rate_row(r: &RateRequest, rates: &Rates) -> Vec<Cell> {
    vec![r.n.to_string().into(), r.reservoir.tag().into(), rates.emission.into(), rates.absorption.into()]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reservoir::Quantum;
    use crate::Vector3;
    use approx::assert_relative_eq;

    fn request(beta: f64, n: FockTriple, reservoir: ReservoirState) -> RateRequest {
        RateRequest::new(
            OscillatorParams::new(1.0, 1.0, beta).unwrap(),
            n,
            reservoir,
            CouplingFunction::canonical(beta).unwrap(),
        )
    }

    fn window() -> QuadratureConfig {
        QuadratureConfig::for_frequencies(1.0, 1.0)
    }

    #[test]
    fn vacuum_rates() {
        let r = request(0.1, FockTriple::new(1, 0, 0), ReservoirState::Vacuum);
        let rates = rate_emission_vacuum(&r);
        assert_relative_eq!(rates.emission, 0.1, max_relative = 1e-14);
        assert_eq!(rates.absorption, 0.0);
        assert_eq!(rate_emission_vacuum(&request(0.1, FockTriple::GROUND, ReservoirState::Vacuum)).emission, 0.0);
    }

    #[test]
    fn tabulated_canonical_gives_same_rate() {
        let beta = 0.1;
        let canon = CouplingFunction::canonical(beta).unwrap();
        let grid: Vec<f64> = (1..=400).map(|i| i as f64 * 0.01).collect();
        let tab = CouplingFunction::tabulate(grid, |w| canon.eval(w)).unwrap();
        let mut r = request(beta, FockTriple::new(2, 1, 0), ReservoirState::Vacuum);
        let a = rate_emission_vacuum(&r).emission;
        r.coupling = tab;
        let b = rate_emission_vacuum(&r).emission;
        assert_relative_eq!(a, 0.3, max_relative = 1e-14);
        assert!((a - b).abs() < 1e-10);
    }

    #[test]
    fn emission_is_linear_in_n() {
        let unit = rate_emission_vacuum(&request(0.07, FockTriple::new(1, 0, 0), ReservoirState::Vacuum)).emission;
        for n in [FockTriple::new(3, 0, 0), FockTriple::new(1, 4, 2), FockTriple::new(0, 0, 9)] {
            let e = rate_emission_vacuum(&request(0.07, n, ReservoirState::Vacuum)).emission;
            assert_relative_eq!(e, unit * n.total() as f64, max_relative = 1e-14);
        }
    }

    #[test]
    fn fock_absorption() {
        let (beta, w) = (0.2, 1.0);
        let quantum = Quantum::new(Vector3::new(w, 0.0, 0.0), 1.0).unwrap();
        let r = request(beta, FockTriple::GROUND, ReservoirState::Fock(vec![quantum]));
        let rates = rates_fock(&r).unwrap();
        assert_relative_eq!(rates.absorption, 3.0 * beta / (4.0 * PI * w * w), max_relative = 1e-14);
        assert_eq!(rates.emission, rate_emission_vacuum(&r).emission);

        let off = Quantum::new(Vector3::new(0.0, 1.3, 0.0), 1.0).unwrap();
        let r = request(beta, FockTriple::new(1, 0, 0), ReservoirState::Fock(vec![off]));
        assert_eq!(rates_fock(&r).unwrap().absorption, 0.0);
    }

    #[test]
    fn thermal_rates_at_ln2() {
        let params = OscillatorParams::new(1.0, 2f64.ln(), 0.1).unwrap();
        let r = RateRequest::new(
            params,
            FockTriple::new(1, 0, 0),
            ReservoirState::thermal(1.0).unwrap(),
            CouplingFunction::canonical(0.1).unwrap(),
        );
        let rates = rates_thermal(&r).unwrap();
        assert_relative_eq!(rates.emission, 0.2, max_relative = 1e-12);
        assert_relative_eq!(rates.absorption, 0.4, max_relative = 1e-12);

        let mut r3 = r.clone();
        r3.n = FockTriple::new(3, 0, 0);
        let rates = rates_thermal(&r3).unwrap();
        assert_relative_eq!(rates.emission / rates.absorption, 1.0, max_relative = 1e-12);
    }

    #[test]
    fn cold_bath_reduces_to_vacuum() {
        let r = request(0.1, FockTriple::new(2, 0, 1), ReservoirState::thermal(1.0 / 50.0).unwrap());
        let th = rates_thermal(&r).unwrap();
        let vac = rate_emission_vacuum(&r);
        assert!((th.emission / vac.emission - 1.0).abs() < 1e-15);
        assert!(th.absorption / vac.emission < 1e-15);
    }

    #[test]
    fn golden_rule_limit_at_wt_500() {
        let r = request(0.01, FockTriple::new(1, 0, 0), ReservoirState::Vacuum).at_time(500.0);
        let p = first_order_emission_probability(&r, &window()).unwrap();
        assert!((p / 500.0 / 0.01 - 1.0).abs() < 0.02, "{}", p / 5.0);
        // at this coupling the first-order probability exceeds one
        assert!(matches!(finite_time_emission_probability(&r, &window()), Err(Error::PerturbationViolated(_))));
    }

    #[test]
    fn nothing_to_emit() {
        let r = request(0.01, FockTriple::GROUND, ReservoirState::Vacuum).at_time(10.0);
        assert_eq!(finite_time_emission_probability(&r, &window()).unwrap(), 0.0);
    }

    #[test]
    fn quadratic_onset() {
        let ts: Vec<f64> = (0..6).map(|i| 1e-3 * 10f64.powf(i as f64 / 5.0)).collect();
        let pts: Vec<(f64, f64)> = ts
            .iter()
            .map(|&t| {
                let r = request(0.01, FockTriple::new(1, 0, 0), ReservoirState::Vacuum).at_time(t);
                (t.ln(), finite_time_emission_probability(&r, &window()).unwrap().ln())
            })
            .collect();
        let slope = fit_slope(&pts);
        assert!((slope - 2.0).abs() < 0.05, "{slope}");
    }

    fn fit_slope(pts: &[(f64, f64)]) -> f64 {
        let n = pts.len() as f64;
        let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
        let (mx, my) = (sx / n, sy / n);
        let num: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
        let den: f64 = pts.iter().map(|(x, _)| (x - mx).powi(2)).sum();
        num / den
    }

    #[test]
    fn finite_time_error_shrinks_with_time() {
        // sample at whole periods so the infrared remainder does not oscillate
        let err = |periods: f64| {
            let t = 2.0 * PI * periods;
            let r = request(1e-4, FockTriple::new(1, 0, 0), ReservoirState::Vacuum).at_time(t);
            let p = finite_time_emission_probability(&r, &window()).unwrap();
            (p / t / 1e-4 - 1.0).abs()
        };
        let (a, b) = (err(20.0), err(80.0));
        assert!(b < a, "{a} {b}");
    }

    #[test]
    fn energy_loss_matches_envelope_decay() {
        // nω quanta leaking at nβ/m lose energy at rate β/m relative
        let r = request(0.05, FockTriple::new(3, 0, 0), ReservoirState::Vacuum);
        let power = r.params.omega * rate_emission_vacuum(&r).emission;
        let energy = 3.0 * r.params.omega;
        let envelope = 2.0 * r.params.decay();
        assert_relative_eq!(power / energy, envelope, max_relative = 1e-12);
    }

    #[test]
    fn wrong_reservoir_kind() {
        let r = request(0.1, FockTriple::GROUND, ReservoirState::Vacuum);
        assert!(rates_fock(&r).is_err());
        assert!(rates_thermal(&r).is_err());
        let th = request(0.1, FockTriple::GROUND, ReservoirState::thermal(1.0).unwrap()).at_time(1.0);
        assert!(finite_time_emission_probability(&th, &window()).is_err());
    }
}

//! Bath description: coupling functions, reservoir states and the memory
//! kernel they induce.
//!
//! The reservoir enters the particle dynamics only through the spectral
//! weight of the coupling function,
//!
//! ```text
//! J(ω) = (8π/3) |f(ω)|² ω⁵,     γ(t) = ∫₀^∞ dω J(ω) cos ωt,
//! ```
//!
//! where the 8π/3 collects the angular integral `∫d³k G(ω) k_i k_j =
//! δ_ij (4π/3) ∫dω ω⁴ G(ω)` and the factor two from `R + R†`.

use std::f64::consts::PI;
use std::path::Path;

use crate::quadrature::{self, integrate_oscillatory, integrate_semi_infinite, QuadratureConfig, Weight};
use crate::{require, Error, Result, Vector3};

/// The coupling function `f(ω)`.
#[derive(Debug, Clone, PartialEq)]
pub enum CouplingFunction {
    /// `f(ω) = √(3β / (4π² ω⁵))`, which produces exactly Ohmic friction β.
    Canonical { beta: f64, uv_cutoff: Option<f64> },
    /// Log-log interpolation on a strictly increasing grid of positive
    /// frequencies (linear where a value is not positive). Below the first
    /// point the spectral density is held constant, `f ∝ ω^{-5/2}`; above
    /// the last point the coupling vanishes.
    Tabulated { omega: Vec<f64>, f: Vec<f64>, uv_cutoff: Option<f64> },
    /// `f ≡ 0`.
    Zero,
}

impl CouplingFunction {
    pub fn canonical(beta: f64) -> Result<Self> {
        require(beta > 0.0 && beta.is_finite(), || format!("canonical coupling needs β > 0, got {beta}"))?;
        Ok(Self::Canonical { beta, uv_cutoff: None })
    }

    pub fn tabulated(omega: Vec<f64>, f: Vec<f64>) -> Result<Self> {
        require(omega.len() == f.len(), || "frequency and coupling columns differ in length".into())?;
        require(omega.len() >= 2, || "a tabulated coupling needs at least two points".into())?;
        require(omega.windows(2).all(|w| w[1] > w[0]), || "frequency grid must be strictly increasing".into())?;
        require(omega[0] > 0.0, || "frequencies must be positive".into())?;
        require(f.iter().all(|v| v.is_finite()), || "coupling values must be finite".into())?;
        Ok(Self::Tabulated { omega, f, uv_cutoff: None })
    }

    /// Tabulate `f` on `omega`.
    pub fn tabulate(omega: Vec<f64>, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = omega.iter().map(|&w| f(w)).collect();
        Self::tabulated(omega, values)
    }

    /// Loads a two-column `ω f` text table; `#` starts a comment.
    pub fn load_table(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path.as_ref())?;
        Self::parse_table(&text)
    }

    pub fn parse_table(text: &str) -> Result<Self> {
        let mut omega = Vec::new();
        let mut f = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let cols: Vec<&str> = line.split(|c: char| c.is_whitespace() || c == ',').filter(|s| !s.is_empty()).collect();
            let parse = |s: &str| {
                s.parse::<f64>()
                    .map_err(|_| Error::InvalidParameter(format!("line {}: cannot parse '{s}' as a number", lineno + 1)))
            };
            if cols.len() != 2 {
                return Err(Error::InvalidParameter(format!(
                    "line {}: expected two columns, found {}",
                    lineno + 1,
                    cols.len()
                )));
            }
            omega.push(parse(cols[0])?);
            f.push(parse(cols[1])?);
        }
        Self::tabulated(omega, f)
    }

    pub fn with_uv_cutoff(mut self, cutoff: f64) -> Self {
        match &mut self {
            Self::Canonical { uv_cutoff, .. } | Self::Tabulated { uv_cutoff, .. } => *uv_cutoff = Some(cutoff),
            Self::Zero => {}
        }
        self
    }

    pub fn uv_cutoff(&self) -> Option<f64> {
        match self {
            Self::Canonical { uv_cutoff, .. } | Self::Tabulated { uv_cutoff, .. } => *uv_cutoff,
            Self::Zero => None,
        }
    }

    /// Largest frequency where the coupling can be non-zero.
    pub fn support_end(&self) -> f64 {
        let own = match self {
            Self::Canonical { .. } => f64::INFINITY,
            Self::Tabulated { omega, .. } => *omega.last().unwrap(),
            Self::Zero => 0.0,
        };
        self.uv_cutoff().map_or(own, |c| c.min(own))
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Self::Zero)
    }

    pub fn eval(&self, w: f64) -> f64 {
        if w <= 0.0 || self.uv_cutoff().is_some_and(|c| w > c) {
            return 0.0;
        }
        match self {
            Self::Canonical { beta, .. } => (3.0 * beta / (4.0 * PI * PI * w.powi(5))).sqrt(),
            Self::Tabulated { omega, f, .. } => interpolate(omega, f, w),
            Self::Zero => 0.0,
        }
    }

    /// `|f(ω)|²`.
    pub fn weight(&self, w: f64) -> f64 {
        match self {
            // avoids the square root round trip
            Self::Canonical { beta, .. } if w > 0.0 && !self.uv_cutoff().is_some_and(|c| w > c) => {
                3.0 * beta / (4.0 * PI * PI * w.powi(5))
            }
            _ => self.eval(w).powi(2),
        }
    }

    /// Spectral density `J(ω) = (8π/3)|f|²ω⁵`, so that γ(t) = ∫J cos ωt.
    pub fn spectral_density(&self, w: f64) -> f64 {
        2.0 * angular_reduce(|x| self.weight(x))(w) * w
    }
}

fn interpolate(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    if x > xs[xs.len() - 1] {
        return 0.0;
    }
    if x < xs[0] {
        return ys[0] * (xs[0] / x).powf(2.5);
    }
    let i = xs.partition_point(|&v| v <= x);
    if i == 0 {
        return ys[0];
    }
    if i >= xs.len() {
        return ys[xs.len() - 1];
    }
    let (x0, x1) = (xs[i - 1], xs[i]);
    let (y0, y1) = (ys[i - 1], ys[i]);
    if y0 > 0.0 && y1 > 0.0 {
        let s = (x / x0).ln() / (x1 / x0).ln();
        return y0 * (y1 / y0).powf(s);
    }
    let s = (x - x0) / (x1 - x0);
    y0 + s * (y1 - y0)
}

/// Reduces `∫d³k G(ω) k_i k_j` to the per-component radial integrand
/// `(4π/3) ω⁴ G(ω)`.
pub fn angular_reduce<G: Fn(f64) -> f64>(g: G) -> impl Fn(f64) -> f64 {
    move |w| 4.0 * PI / 3.0 * w.powi(4) * g(w)
}

/// A single reservoir quantum of a Fock state, with the line-width weight
/// that stands in for the resonance delta at exact resonance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quantum {
    pub momentum: Vector3<f64>,
    pub weight: f64,
}

impl Quantum {
    pub fn new(momentum: Vector3<f64>, weight: f64) -> Result<Self> {
        require(momentum.norm() > 0.0, || "reservoir quanta need non-zero momentum".into())?;
        require(weight >= 0.0 && weight.is_finite(), || format!("line weight must be non-negative, got {weight}"))?;
        Ok(Self { momentum, weight })
    }

    pub fn frequency(&self) -> f64 {
        self.momentum.norm()
    }

    pub fn is_resonant(&self, w: f64, rel_tol: f64) -> bool {
        (self.frequency() - w).abs() <= rel_tol * w.abs()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ReservoirState {
    Vacuum,
    Fock(Vec<Quantum>),
    /// Thermal state; `kt` is K·T in frequency units.
    Thermal { kt: f64 },
}

/// Relative tolerance for resonance selection of Fock quanta.
pub const RESONANCE_TOL: f64 = 1e-8;

impl ReservoirState {
    pub fn thermal(kt: f64) -> Result<Self> {
        require(kt > 0.0 && kt.is_finite(), || format!("temperature must be positive, got {kt}"))?;
        Ok(Self::Thermal { kt })
    }

    pub fn tag(&self) -> String {
        match self {
            Self::Vacuum => "vacuum".into(),
            Self::Fock(q) => format!("fock[{}]", q.len()),
            Self::Thermal { kt } => format!("thermal(kt={kt})"),
        }
    }
}

/// Mean occupation `⟨b†b⟩` at frequency `w`.
///
/// For a Fock state this is the summed line weight of the quanta resonant
/// with `w`; the delta functions themselves are never discretized.
pub fn occupation(state: &ReservoirState, w: f64) -> f64 {
    match state {
        ReservoirState::Vacuum => 0.0,
        ReservoirState::Thermal { kt } => bose_einstein(w / kt),
        ReservoirState::Fock(quanta) => quanta.iter().filter(|q| q.is_resonant(w, RESONANCE_TOL)).map(|q| q.weight).sum(),
    }
}

/// `1/(e^x − 1)`, accurate for small and large x.
pub fn bose_einstein(x: f64) -> f64 {
    if x > 745.0 {
        0.0
    } else {
        1.0 / x.exp_m1()
    }
}

/// `e^x/(e^x − 1) = 1 + n̄(x)`.
pub fn bose_einstein_plus_one(x: f64) -> f64 {
    -1.0 / (-x).exp_m1()
}

/// Memory kernel γ(t) = ∫ dω J(ω) cos ωt over the window `(ε, Λ)`, where Λ is
/// the smaller of the coupling's own cutoff and `cfg.uv_cutoff`.
///
/// The canonical coupling uses the closed form `(2β/π)(sin Λt − sin εt)/t`;
/// other couplings go through [`memory_kernel_quadrature`].
pub fn memory_kernel(c: &CouplingFunction, t: f64, cfg: &QuadratureConfig) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("memory kernel needs t ≥ 0, got {t}")));
    }
    match c {
        CouplingFunction::Zero => Ok(0.0),
        CouplingFunction::Canonical { beta, .. } => {
            let (lo, hi) = window(c, cfg)?;
            let j0 = 2.0 * beta / PI;
            Ok(if t == 0.0 { j0 * (hi - lo) } else { j0 * ((hi * t).sin() - (lo * t).sin()) / t })
        }
        CouplingFunction::Tabulated { .. } => memory_kernel_quadrature(c, t, cfg),
    }
}

/// γ(t) by direct oscillatory quadrature of the cosine transform.
pub fn memory_kernel_quadrature(c: &CouplingFunction, t: f64, cfg: &QuadratureConfig) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("memory kernel needs t ≥ 0, got {t}")));
    }
    if c.is_zero() {
        return Ok(0.0);
    }
    let (lo, hi) = window(c, cfg)?;
    let window_cfg = cfg.clone().with_cutoffs(lo, hi);
    Ok(integrate_oscillatory(|w| c.spectral_density(w), Weight::Cos, 1.0, t, &window_cfg)?.value)
}

fn window(c: &CouplingFunction, cfg: &QuadratureConfig) -> Result<(f64, f64)> {
    let hi = c.support_end().min(cfg.uv_cutoff);
    if !hi.is_finite() {
        return Err(Error::InvalidParameter(
            "memory kernel needs a finite UV cutoff (on the coupling or the quadrature window)".into(),
        ));
    }
    Ok((cfg.ir_cutoff.min(hi), hi))
}

/// Samples of γ on a uniform grid, as consumed by the Volterra solver.
#[derive(Debug, Clone, PartialEq)]
pub struct MemoryKernel {
    pub dt: f64,
    pub values: Vec<f64>,
    /// Markovian friction β_eff, when known.
    pub friction_limit: Option<f64>,
}

impl MemoryKernel {
    pub fn sample(c: &CouplingFunction, dt: f64, len: usize, cfg: &QuadratureConfig) -> Result<Self> {
        require(dt > 0.0, || format!("kernel step must be positive, got {dt}"))?;
        let values = crate::par::map_range(crate::par::Exec::default(), len, |i| memory_kernel(c, i as f64 * dt, cfg))
            .into_iter()
            .collect::<Result<Vec<_>>>()?;
        let friction_limit = match c {
            CouplingFunction::Canonical { beta, .. } => Some(*beta),
            CouplingFunction::Zero => Some(0.0),
            CouplingFunction::Tabulated { .. } => None,
        };
        Ok(Self { dt, values, friction_limit })
    }

    pub fn zero(dt: f64, len: usize) -> Self {
        Self { dt, values: vec![0.0; len], friction_limit: Some(0.0) }
    }

    pub fn from_fn(dt: f64, len: usize, f: impl Fn(f64) -> f64) -> Self {
        Self { dt, values: (0..len).map(|i| f(i as f64 * dt)).collect(), friction_limit: None }
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.values.len()).map(move |i| i as f64 * self.dt)
    }
}

/// Markovian friction `β_eff = lim_{T→∞} ∫₀^T γ(τ) dτ`.
///
/// Computed as `∫ J(ω) sin(ωT)/ω dω` over a geometric sweep of horizons T;
/// the sweep must reach a plateau, otherwise the bath has no local friction
/// limit. With the one-sided delta convention this equals `(π/2) J(0⁺)`.
pub fn friction_coefficient(c: &CouplingFunction, cfg: &QuadratureConfig) -> Result<f64> {
    if c.is_zero() {
        return Ok(0.0);
    }
    let (lo, hi) = window(c, cfg)?;
    let window_cfg = cfg.clone().with_cutoffs(lo, hi);
    let plateau_tol = 1e-6;
    let mut previous: Option<f64> = None;
    let mut horizon = 10.0 / hi;
    let mut history = Vec::new();
    // keep the number of half-period panels ΛT/π within reach
    while horizon * (hi - lo) < 1e7 {
        let value = quadrature::integrate_oscillatory(
            |w| if w == 0.0 { 0.0 } else { c.spectral_density(w) / w },
            Weight::Sin,
            1.0,
            horizon,
            &window_cfg,
        )?
        .value;
        history.push((horizon, value));
        if let Some(p) = previous {
            if (value - p).abs() <= plateau_tol * value.abs().max(p.abs()).max(f64::MIN_POSITIVE) {
                return Ok(value);
            }
        }
        previous = Some(value);
        horizon *= 4.0;
        // beyond T ~ 1/ε the infrared cutoff itself drains the integral
        if horizon * lo > 1e-2 {
            break;
        }
    }
    Err(Error::NonMarkovian(format!("∫γ dt did not settle over horizons {history:?}")))
}

/// Closed-form `(π/2)·J(0⁺)` reference for couplings with a finite
/// low-frequency spectral density.
pub fn friction_from_spectral_density(c: &CouplingFunction) -> f64 {
    match c {
        CouplingFunction::Canonical { beta, .. } => *beta,
        _ => PI / 2.0 * c.spectral_density(1e-9 * c.support_end().min(1.0)),
    }
}

/// The one-sided convolution `∫₀^t γ(t−τ) v(τ) dτ` for the canonical kernel
/// at cutoff Λ, integrated on oscillation-resolved panels.
pub fn kernel_convolution(
    c: &CouplingFunction,
    v: impl Fn(f64) -> f64,
    t: f64,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("convolution needs t ≥ 0, got {t}")));
    }
    if t == 0.0 || c.is_zero() {
        return Ok(0.0);
    }
    let (_, hi) = window(c, cfg)?;
    let lag_cfg = cfg.clone().with_cutoffs(0.0, t);
    let kernel = |tau: f64| memory_kernel(c, tau, cfg).unwrap_or(f64::NAN);
    let period = 2.0 * PI / hi;
    Ok(quadrature::integrate_resolved(|tau| kernel(tau) * v(t - tau), period, &[], &lag_cfg)?.value)
}

/// `∫_ε^Λ dω G(ω)` per Cartesian component after angular reduction.
pub fn reduced_integral(g: impl Fn(f64) -> f64, cfg: &QuadratureConfig) -> Result<f64> {
    Ok(integrate_semi_infinite(angular_reduce(g), cfg)?.value)
}

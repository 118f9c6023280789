//! Mean trajectories of the generalized Langevin equation
//!
//! ```text
//! m ẍ + ∫₀^t γ(t − t′) ẋ(t′) dt′ = −∇v(x)
//! ```
//!
//! and of its Markovian form `m ẍ + β ẋ = −∇v(x)`. The noise has zero mean
//! in every reservoir state considered here and drops out of the mean.

use std::fmt;
use std::path::Path;
use std::sync::Arc;

use crate::reservoir::MemoryKernel;
use crate::table::TableWriter;
use crate::{require, Error, Result, Vector3};

type Gradient = Arc<dyn Fn(&Vector3<f64>) -> Vector3<f64> + Send + Sync>;

/// External potential, described by its gradient.
#[derive(Clone)]
pub enum PotentialSpec {
    /// `v = ½ m ω² x²`.
    Harmonic { m: f64, omega: f64 },
    Custom(Gradient),
}

impl fmt::Debug for PotentialSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Harmonic { m, omega } => write!(f, "Harmonic {{ m: {m}, omega: {omega} }}"),
            Self::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

impl PotentialSpec {
    pub fn harmonic(m: f64, omega: f64) -> Result<Self> {
        require(m > 0.0, || format!("harmonic potential needs m > 0, got {m}"))?;
        require(omega >= 0.0, || format!("harmonic potential needs ω ≥ 0, got {omega}"))?;
        Ok(Self::Harmonic { m, omega })
    }

    pub fn free() -> Self {
        Self::Harmonic { m: 1.0, omega: 0.0 }
    }

    pub fn custom(gradient: impl Fn(&Vector3<f64>) -> Vector3<f64> + Send + Sync + 'static) -> Self {
        Self::Custom(Arc::new(gradient))
    }

    /// Force `−∇v`.
    pub fn force(&self, x: &Vector3<f64>) -> Vector3<f64> {
        match self {
            Self::Harmonic { m, omega } => -x * (m * omega * omega),
            Self::Custom(g) => -g(x),
        }
    }

    /// Potential energy, when it is known in closed form.
    pub fn energy(&self, x: &Vector3<f64>) -> Option<f64> {
        match self {
            Self::Harmonic { m, omega } => Some(0.5 * m * omega * omega * x.norm_squared()),
            Self::Custom(_) => None,
        }
    }

    fn stiffness_frequency(&self, m: f64) -> Option<f64> {
        match self {
            Self::Harmonic { m: mp, omega } => Some(omega * (mp / m).sqrt()),
            Self::Custom(_) => None,
        }
    }
}

/// Uniform grid `t_i = i·dt`, `i = 0..=steps`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    pub dt: f64,
    pub steps: usize,
}

impl TimeGrid {
    pub fn new(dt: f64, steps: usize) -> Result<Self> {
        require(dt > 0.0 && dt.is_finite(), || format!("time step must be positive, got {dt}"))?;
        Ok(Self { dt, steps })
    }

    /// Grid reaching `t_max` with step at most `dt_max`.
    pub fn spanning(t_max: f64, dt_max: f64) -> Result<Self> {
        require(t_max > 0.0, || format!("t_max must be positive, got {t_max}"))?;
        let steps = (t_max / dt_max).ceil() as usize;
        Self::new(t_max / steps as f64, steps)
    }

    pub fn t_max(&self) -> f64 {
        self.dt * self.steps as f64
    }

    pub fn time(&self, i: usize) -> f64 {
        i as f64 * self.dt
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub t: Vec<f64>,
    pub x: Vec<Vector3<f64>>,
    pub v: Vec<Vector3<f64>>,
}

impl Trajectory {
    fn with_capacity(n: usize) -> Self {
        Self { t: Vec::with_capacity(n), x: Vec::with_capacity(n), v: Vec::with_capacity(n) }
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn dt(&self) -> f64 {
        if self.t.len() < 2 {
            0.0
        } else {
            self.t[1] - self.t[0]
        }
    }

    /// Mechanical energy `½m v² + v(x)` per sample.
    pub fn energy(&self, m: f64, pot: &PotentialSpec) -> Option<Vec<f64>> {
        self.x
            .iter()
            .zip(&self.v)
            .map(|(x, v)| pot.energy(x).map(|e| e + 0.5 * m * v.norm_squared()))
            .collect()
    }

    /// Acceleration by central differences of the velocity (one-sided at the
    /// ends).
    pub fn acceleration(&self) -> Vec<Vector3<f64>> {
        let n = self.len();
        let h = self.dt();
        (0..n)
            .map(|i| match (i, n) {
                (_, 0 | 1) => Vector3::zeros(),
                (0, _) => (self.v[1] - self.v[0]) / h,
                (i, n) if i == n - 1 => (self.v[i] - self.v[i - 1]) / h,
                (i, _) => (self.v[i + 1] - self.v[i - 1]) / (2.0 * h),
            })
            .collect()
    }

    pub fn write_csv(&self, path: impl AsRef<Path>, metadata: &[(String, String)]) -> Result<()> {
        let mut w = TableWriter::create(path, metadata, &["t", "x1", "x2", "x3", "v1", "v2", "v3"])?;
        for i in 0..self.len() {
            let (x, v) = (&self.x[i], &self.v[i]);
            w.write_floats(&[self.t[i], x[0], x[1], x[2], v[0], v[1], v[2]])?;
        }
        w.finish()?;
        Ok(())
    }

    fn check_finite(&self, i: usize) -> Result<()> {
        if self.x[i].iter().chain(self.v[i].iter()).all(|c| c.is_finite()) {
            Ok(())
        } else {
            Err(Error::StepSize(format!("trajectory diverged at t = {}", self.t[i])))
        }
    }
}

// Velocity Verlet is unstable for hω > 2; keep a margin.
const STABILITY_LIMIT: f64 = 1.9;

fn check_step(m: f64, pot: &PotentialSpec, grid: &TimeGrid) -> Result<()> {
    require(m > 0.0, || format!("mass must be positive, got {m}"))?;
    if let Some(w) = pot.stiffness_frequency(m) {
        if grid.dt * w > STABILITY_LIMIT {
            return Err(Error::StepSize(format!("dt·ω = {} exceeds {STABILITY_LIMIT}", grid.dt * w)));
        }
    }
    Ok(())
}

/// Memory samples on the solver grid, truncated once the kernel has fallen
/// below `abs_tol·max|γ|` for good.
fn kernel_on_grid(kernel: &MemoryKernel, grid: &TimeGrid, abs_tol: f64) -> Result<Vec<f64>> {
    let ratio = grid.dt / kernel.dt;
    let stride = ratio.round();
    if stride < 1.0 || (ratio - stride).abs() > 1e-9 * ratio {
        return Err(Error::InvalidParameter(format!(
            "kernel step {} must divide the solver step {}",
            kernel.dt, grid.dt
        )));
    }
    let stride = stride as usize;
    let needed = grid.steps * stride + 1;
    if kernel.values.len() < needed {
        return Err(Error::InvalidParameter(format!(
            "kernel holds {} samples, the grid needs {needed}",
            kernel.values.len()
        )));
    }
    let mut g: Vec<f64> = kernel.values.iter().step_by(stride).take(grid.steps + 1).copied().collect();
    let peak = g.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let keep = g.iter().rposition(|v| v.abs() >= abs_tol * peak).map_or(0, |i| i + 1);
    g.truncate(keep);
    Ok(g)
}

/// Default relative threshold for memory truncation.
pub const MEMORY_TOL: f64 = 1e-10;

/// Integrates the mean generalized Langevin equation.
///
/// Positions advance with velocity Verlet; the memory force uses the
/// trapezoidal rule on the grid, with its `γ(0)·v_{n+1}` end point treated
/// implicitly so that sharply peaked kernels remain stable.
pub fn evolve_mean_volterra(
    m: f64,
    pot: &PotentialSpec,
    kernel: &MemoryKernel,
    x0: Vector3<f64>,
    v0: Vector3<f64>,
    grid: &TimeGrid,
) -> Result<Trajectory> {
    check_step(m, pot, grid)?;
    let g = kernel_on_grid(kernel, grid, MEMORY_TOL)?;
    let h = grid.dt;
    let gamma = |i: usize| g.get(i).copied().unwrap_or(0.0);
    let g0 = gamma(0);
    let implicit = 1.0 + h * h * g0 / (4.0 * m);

    let mut traj = Trajectory::with_capacity(grid.steps + 1);
    traj.t.push(0.0);
    traj.x.push(x0);
    traj.v.push(v0);
    let mut force = pot.force(&x0);
    // same end-point weight as every later step; O(h) for smooth kernels
    let mut accel = (force - v0 * (0.5 * h * g0)) / m;
    for n in 0..grid.steps {
        let (x, v) = (traj.x[n], traj.v[n]);
        let x_next = x + v * h + accel * (0.5 * h * h);
        force = pot.force(&x_next);
        // h[Σ_{j=1}^{n} γ_{n+1−j} v_j + γ_{n+1} v_0/2], restricted to memory
        let k = n + 1;
        let oldest = k.saturating_sub(g.len().saturating_sub(1)).max(1);
        let mut history = traj.v[0] * (0.5 * gamma(k));
        for j in oldest..k {
            history += traj.v[j] * gamma(k - j);
        }
        history *= h;
        let v_next = (v + accel * (0.5 * h) + (force - history) * (0.5 * h / m)) / implicit;
        accel = (force - history - v_next * (0.5 * h * g0)) / m;
        traj.t.push(grid.time(k));
        traj.x.push(x_next);
        traj.v.push(v_next);
        traj.check_finite(k)?;
    }
    Ok(traj)
}

/// Integrates `m ẍ + β ẋ = −∇v` with velocity Verlet and an implicit
/// trapezoidal friction term.
pub fn evolve_mean_markov(
    m: f64,
    pot: &PotentialSpec,
    beta: f64,
    x0: Vector3<f64>,
    v0: Vector3<f64>,
    grid: &TimeGrid,
) -> Result<Trajectory> {
    check_step(m, pot, grid)?;
    require(beta >= 0.0, || format!("friction must be non-negative, got {beta}"))?;
    let h = grid.dt;
    let implicit = 1.0 + h * beta / (2.0 * m);
    let mut traj = Trajectory::with_capacity(grid.steps + 1);
    traj.t.push(0.0);
    traj.x.push(x0);
    traj.v.push(v0);
    let mut accel = (pot.force(&x0) - v0 * beta) / m;
    for n in 0..grid.steps {
        let (x, v) = (traj.x[n], traj.v[n]);
        let x_next = x + v * h + accel * (0.5 * h * h);
        let force = pot.force(&x_next);
        let v_next = (v + accel * (0.5 * h) + force * (0.5 * h / m)) / implicit;
        accel = (force - v_next * beta) / m;
        traj.t.push(grid.time(n + 1));
        traj.x.push(x_next);
        traj.v.push(v_next);
        traj.check_finite(n + 1)?;
    }
    Ok(traj)
}

/// A discrete kernel whose trapezoidal memory sum equals `β v(t)` exactly:
/// a single sample `γ₀ = 2β/dt`, the grid image of the one-sided `2βδ(t)`.
pub fn local_friction_kernel(beta: f64, dt: f64, len: usize) -> MemoryKernel {
    let mut values = vec![0.0; len.max(1)];
    values[0] = 2.0 * beta / dt;
    MemoryKernel { dt, values, friction_limit: Some(beta) }
}

//! The reservoir as a massless Klein-Gordon field on a periodic box.
//!
//! Modes live on the lattice `k = n·Δk` with `0 < max|nᵢ| < N/2` (and
//! `|k| ≤ Λ` when a cutoff is set); the box has side `L = 2π/Δk` and volume
//! `V = L³`. Each mode carries a c-number amplitude `a_k`, the coherent
//! expectation value of `b_k·√Δk³`. Real-space fields sit on an `M³` grid.
//!
//! ```text
//! Y(x) = Σ (2Vω)^{-1/2} (a e^{ik·x} + a* e^{-ik·x})
//! Π(x) = i Σ (ω/2V)^{1/2} (a* e^{-ik·x} − a e^{ik·x})
//! ȧ_k  = −iω a_k + i c_k k·ẋ,   c_k = √Δk³ f(ω_k)
//! ```
//!
//! so that `∂ₜY = Π + 2ẋ·N`, `∂ₜΠ = ∇²Y + 2ẋ·M`.

use std::f64::consts::PI;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;
use std::sync::Arc;

use rustfft::{Fft, FftPlanner};

use crate::langevin::Trajectory;
use crate::par::{self, Exec};
use crate::quadrature::{integrate_resolved, QuadratureConfig};
use crate::reservoir::CouplingFunction;
use crate::table::TableWriter;
use crate::{require, Complex64, Error, Result, Vector3};

/// Largest real-space grid per axis.
pub const MAX_POINTS_PER_AXIS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldGrid {
    /// N: modes span `|nᵢ| < N/2` on each axis.
    pub modes_per_axis: usize,
    /// M: real-space points per axis.
    pub points_per_axis: usize,
    pub dk: f64,
    /// Spherical cutoff Λ on `|k|`; `f64::INFINITY` keeps the whole cube.
    pub cutoff: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeMode {
    pub n: [i32; 3],
    pub k: Vector3<f64>,
    pub omega: f64,
    /// Flat index of the matching FFT bin on the real-space grid.
    pub bin: usize,
}

impl FieldGrid {
    pub fn new(modes_per_axis: usize, points_per_axis: usize, dk: f64) -> Result<Self> {
        let g = Self { modes_per_axis, points_per_axis, dk, cutoff: f64::INFINITY };
        g.validate()?;
        Ok(g)
    }

    pub fn with_cutoff(mut self, cutoff: f64) -> Result<Self> {
        self.cutoff = cutoff;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let (n, m) = (self.modes_per_axis, self.points_per_axis);
        require(n >= 4 && n.is_power_of_two(), || format!("modes per axis must be a power of two ≥ 4, got {n}"))?;
        require(m.is_power_of_two(), || format!("grid points per axis must be a power of two, got {m}"))?;
        require(m <= MAX_POINTS_PER_AXIS, || format!("grid points per axis capped at {MAX_POINTS_PER_AXIS}, got {m}"))?;
        require(self.dk > 0.0 && self.dk.is_finite(), || format!("Δk must be positive, got {}", self.dk))?;
        require(self.cutoff > 0.0, || format!("cutoff must be positive, got {}", self.cutoff))?;
        // per axis Nyquist: the largest lattice component must stay below π/Δx
        if self.spacing() * self.k_axis_max() >= PI {
            return Err(Error::Domain(format!(
                "Nyquist violated: Δx·k_max = {} ≥ π (need M ≥ N, got M = {m}, N = {n})",
                self.spacing() * self.k_axis_max()
            )));
        }
        Ok(())
    }

    pub fn box_length(&self) -> f64 {
        2.0 * PI / self.dk
    }

    pub fn volume(&self) -> f64 {
        self.box_length().powi(3)
    }

    /// Δx.
    pub fn spacing(&self) -> f64 {
        self.box_length() / self.points_per_axis as f64
    }

    pub fn points(&self) -> usize {
        self.points_per_axis.pow(3)
    }

    pub fn k_axis_max(&self) -> f64 {
        (self.modes_per_axis as f64 / 2.0 - 1.0) * self.dk
    }

    pub fn position(&self, idx: usize) -> Vector3<f64> {
        let m = self.points_per_axis;
        let dx = self.spacing();
        Vector3::new((idx / (m * m)) as f64 * dx, ((idx / m) % m) as f64 * dx, (idx % m) as f64 * dx)
    }

    /// Lattice modes in lexicographic order of `n`.
    pub fn modes(&self) -> Vec<LatticeMode> {
        let half = (self.modes_per_axis / 2) as i32;
        let m = self.points_per_axis as i32;
        let wrap = |n: i32| n.rem_euclid(m) as usize;
        let mut out = Vec::new();
        for a in 1 - half..half {
            for b in 1 - half..half {
                for c in 1 - half..half {
                    if a == 0 && b == 0 && c == 0 {
                        continue;
                    }
                    let k = Vector3::new(a as f64, b as f64, c as f64) * self.dk;
                    let omega = k.norm();
                    if omega > self.cutoff {
                        continue;
                    }
                    let bin = (wrap(a) * m as usize + wrap(b)) * m as usize + wrap(c);
                    out.push(LatticeMode { n: [a, b, c], k, omega, bin });
                }
            }
        }
        out
    }

    pub fn max_frequency(&self) -> f64 {
        self.modes().iter().map(|m| m.omega).fold(0.0, f64::max)
    }

    /// Largest stable step for the real-space integrator: the CFL bound
    /// `Δx/√3` and the leapfrog bound `2/ω_max`, whichever is smaller.
    pub fn max_leapfrog_step(&self) -> f64 {
        (self.spacing() / 3f64.sqrt()).min(2.0 / self.max_frequency())
    }
}

/// Complex amplitude per lattice mode, aligned with [`FieldGrid::modes`].
#[derive(Debug, Clone, PartialEq)]
pub struct ModeAmplitudes {
    pub values: Vec<Complex64>,
}

impl ModeAmplitudes {
    pub fn zeros(g: &FieldGrid) -> Self {
        Self { values: vec![Complex64::new(0.0, 0.0); g.modes().len()] }
    }

    pub fn from_values(g: &FieldGrid, values: Vec<Complex64>) -> Result<Self> {
        let expected = g.modes().len();
        require(values.len() == expected, || format!("{} amplitudes for {expected} lattice modes", values.len()))?;
        require(values.iter().all(|v| v.re.is_finite() && v.im.is_finite()), || "amplitudes must be finite".into())?;
        Ok(Self { values })
    }

    /// One excited mode `n`.
    pub fn single(g: &FieldGrid, n: [i32; 3], value: Complex64) -> Result<Self> {
        let modes = g.modes();
        let i = modes
            .iter()
            .position(|m| m.n == n)
            .ok_or_else(|| Error::InvalidParameter(format!("mode {n:?} is not on the lattice")))?;
        let mut a = Self::zeros(g);
        a.values[i] = value;
        Ok(a)
    }
}

/// Real fields on the `M³` grid, row-major in (x, y, z).
#[derive(Debug, Clone, PartialEq)]
pub struct Fields {
    pub y: Vec<f64>,
    pub pi: Vec<f64>,
}

/// 3D complex FFT on an `M³` cube, unnormalized in both directions.
struct Fft3 {
    m: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl Fft3 {
    fn new(m: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self { m, fwd: planner.plan_fft_forward(m), inv: planner.plan_fft_inverse(m) }
    }

    fn run(&self, data: &mut [Complex64], inverse: bool, exec: Exec) {
        let m = self.m;
        let fft = if inverse { &self.inv } else { &self.fwd };
        let lines = |buf: &mut [Complex64]| par::for_each_chunk_mut(exec, buf, m, |line| fft.process(line));
        lines(data);
        let mut buf = vec![Complex64::new(0.0, 0.0); data.len()];
        // y lines: (i, j, k) ↔ (i, k, j)
        let swap_yz = |idx: usize| {
            let (i, r) = (idx / (m * m), idx % (m * m));
            i * m * m + (r % m) * m + r / m
        };
        par::for_each_mut(exec, &mut buf, |idx, v| *v = data[swap_yz(idx)]);
        lines(&mut buf);
        par::for_each_mut(exec, data, |idx, v| *v = buf[swap_yz(idx)]);
        // x lines: buffer index (j, k, i) holds data (i, j, k)
        par::for_each_mut(exec, &mut buf, |idx, v| {
            let (jk, i) = (idx / m, idx % m);
            *v = data[i * m * m + jk];
        });
        lines(&mut buf);
        par::for_each_mut(exec, data, |idx, v| {
            let (i, jk) = (idx / (m * m), idx % (m * m));
            *v = buf[jk * m + i];
        });
    }
}

/// Fourier coefficients `Σ_x u(x) e^{−ik·x} / M³` of a real field.
fn spectrum(u: &[f64], fft: &Fft3, exec: Exec) -> Vec<Complex64> {
    let scale = 1.0 / u.len() as f64;
    let mut c: Vec<Complex64> = u.iter().map(|&v| Complex64::new(v * scale, 0.0)).collect();
    fft.run(&mut c, false, exec);
    c
}

/// `Σ_bins coeff e^{ik·x}` on the grid.
fn synthesize(g: &FieldGrid, modes: &[LatticeMode], coeff: impl Fn(usize) -> Complex64, fft: &Fft3, exec: Exec) -> Vec<Complex64> {
    let mut c = vec![Complex64::new(0.0, 0.0); g.points()];
    for (i, m) in modes.iter().enumerate() {
        c[m.bin] += coeff(i);
    }
    fft.run(&mut c, true, exec);
    c
}

/// Y and Π from mode amplitudes.
pub fn field_from_modes(a: &ModeAmplitudes, g: &FieldGrid, exec: Exec) -> Result<Fields> {
    g.validate()?;
    let modes = g.modes();
    require(a.values.len() == modes.len(), || format!("{} amplitudes for {} modes", a.values.len(), modes.len()))?;
    let fft = Fft3::new(g.points_per_axis);
    let v = g.volume();
    let sy = synthesize(g, &modes, |i| a.values[i] / (2.0 * v * modes[i].omega).sqrt(), &fft, exec);
    let sp = synthesize(g, &modes, |i| a.values[i] * (modes[i].omega / (2.0 * v)).sqrt(), &fft, exec);
    Ok(Fields { y: sy.iter().map(|c| 2.0 * c.re).collect(), pi: sp.iter().map(|c| 2.0 * c.im).collect() })
}

/// Inverse of [`field_from_modes`]: `a = √(V/2)(√ω Ŷ + iΠ̂/√ω)`.
pub fn modes_from_fields(f: &Fields, g: &FieldGrid, exec: Exec) -> Result<ModeAmplitudes> {
    g.validate()?;
    require(f.y.len() == g.points() && f.pi.len() == g.points(), || "field arrays do not match the grid".into())?;
    let fft = Fft3::new(g.points_per_axis);
    Ok(modes_from_spectra(&spectrum(&f.y, &fft, exec), &spectrum(&f.pi, &fft, exec), g))
}

fn modes_from_spectra(yh: &[Complex64], ph: &[Complex64], g: &FieldGrid) -> ModeAmplitudes {
    let s = (g.volume() / 2.0).sqrt();
    let i = Complex64::i();
    let values = g
        .modes()
        .iter()
        .map(|m| {
            let rw = m.omega.sqrt();
            s * (yh[m.bin] * rw + i * ph[m.bin] / rw)
        })
        .collect();
    ModeAmplitudes { values }
}

/// `Σ_k ω_k |a_k|²`.
pub fn mode_energy(a: &ModeAmplitudes, g: &FieldGrid, exec: Exec) -> f64 {
    let omega: Vec<f64> = g.modes().iter().map(|m| m.omega).collect();
    par::sum_range(exec, omega.len(), |i| omega[i] * a.values[i].norm_sqr())
}

/// `Σ_x Δx³ (Π² + |∇Y|²)/2` with a spectral gradient.
pub fn lattice_energy(f: &Fields, g: &FieldGrid, exec: Exec) -> Result<f64> {
    require(f.y.len() == g.points() && f.pi.len() == g.points(), || "field arrays do not match the grid".into())?;
    let fft = Fft3::new(g.points_per_axis);
    let modes = g.modes();
    let yh = spectrum(&f.y, &fft, exec);
    let i = Complex64::i();
    let mut grad2 = vec![0.0; g.points()];
    for axis in 0..3 {
        let d = synthesize(g, &modes, |j| i * modes[j].k[axis] * yh[modes[j].bin], &fft, exec);
        grad2.iter_mut().zip(&d).for_each(|(s, c)| *s += c.re * c.re);
    }
    let dv = g.spacing().powi(3);
    Ok(0.5 * dv * par::sum_range(exec, g.points(), |j| f.pi[j] * f.pi[j] + grad2[j]))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityCheck {
    pub mode_energy: f64,
    pub lattice_energy: f64,
    pub residual: f64,
}

impl IdentityCheck {
    pub fn relative(&self) -> f64 {
        if self.mode_energy == 0.0 {
            self.residual
        } else {
            self.residual / self.mode_energy
        }
    }
}

/// Compares `Σ ω|a|²` with the real-space energy of the reconstructed field.
pub fn hamiltonian_identity_check(a: &ModeAmplitudes, g: &FieldGrid, exec: Exec) -> Result<IdentityCheck> {
    let f = field_from_modes(a, g, exec)?;
    let mode = mode_energy(a, g, exec);
    let lattice = lattice_energy(&f, g, exec)?;
    Ok(IdentityCheck { mode_energy: mode, lattice_energy: lattice, residual: (mode - lattice).abs() })
}

/// Source shapes sampled on the real-space grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceShapes {
    /// Weight of the ẋ source in `∂ₜΠ`.
    pub m: Vec<Vector3<f64>>,
    /// Weight of the ẋ term in `∂ₜY`; drives Y through ẍ·N.
    pub n: Vec<Vector3<f64>>,
}

fn couplings(c: &CouplingFunction, g: &FieldGrid) -> Vec<f64> {
    let w = g.dk.powi(3).sqrt();
    g.modes().iter().map(|m| w * c.eval(m.omega)).collect()
}

/// Lattice sums `M = Σ (ω/2V)^{1/2} c k cos(k·x)`, `N = −Σ (2Vω)^{-1/2} c k sin(k·x)`.
///
/// For real `f` the lattice is symmetric under `k → −k`, so `M` cancels
/// pairwise and comes out at rounding level.
pub fn source_shapes(c: &CouplingFunction, g: &FieldGrid, exec: Exec) -> Result<SourceShapes> {
    g.validate()?;
    let modes = g.modes();
    let ck = couplings(c, g);
    let fft = Fft3::new(g.points_per_axis);
    let v = g.volume();
    let mut m = vec![Vector3::zeros(); g.points()];
    let mut n = vec![Vector3::zeros(); g.points()];
    for axis in 0..3 {
        let sm = synthesize(g, &modes, |i| Complex64::from(ck[i] * modes[i].k[axis] * (modes[i].omega / (2.0 * v)).sqrt()), &fft, exec);
        let sn = synthesize(g, &modes, |i| Complex64::from(ck[i] * modes[i].k[axis] / (2.0 * v * modes[i].omega).sqrt()), &fft, exec);
        for j in 0..g.points() {
            m[j][axis] = sm[j].re;
            n[j][axis] = -sn[j].im;
        }
    }
    Ok(SourceShapes { m, n })
}

/// `j₁(x) = sin x/x² − cos x/x`.
pub fn spherical_j1(x: f64) -> f64 {
    if x.abs() < 1e-2 {
        let x2 = x * x;
        x / 3.0 * (1.0 - x2 / 10.0 * (1.0 - x2 / 28.0))
    } else {
        let (s, c) = x.sin_cos();
        s / (x * x) - c / x
    }
}

/// Radial component of the continuum `N(x)`:
/// `N_r(r) = −4π (2(2π)³)^{-1/2} ∫ k^{5/2} f(k) j₁(kr) dk`.
///
/// The continuum `M` vanishes for real `f` and is not returned.
pub fn radial_source_profile(c: &CouplingFunction, r: f64, cfg: &QuadratureConfig) -> Result<f64> {
    require(r >= 0.0, || format!("radius must be non-negative, got {r}"))?;
    let uv = c.support_end().min(cfg.uv_cutoff);
    if !uv.is_finite() {
        return Err(Error::Domain(
            "source shapes need a UV cutoff: the radial integrand of the canonical coupling does not decay".into(),
        ));
    }
    if r == 0.0 || c.is_zero() {
        return Ok(0.0);
    }
    let window = cfg.clone().with_cutoffs(cfg.ir_cutoff, uv);
    let h = |k: f64| k.powf(2.5) * c.eval(k) * spherical_j1(k * r);
    let knots = match c {
        CouplingFunction::Tabulated { omega, .. } => vec![omega[0], omega[omega.len() - 1]],
        _ => vec![],
    };
    let est = integrate_resolved(h, 2.0 * PI / r, &knots, &window)?;
    Ok(-4.0 * PI / (2.0 * (2.0 * PI).powi(3)).sqrt() * est.value)
}

/// Continuum `(M(x), N(x))`.
pub fn source_shape_at(c: &CouplingFunction, x: Vector3<f64>, cfg: &QuadratureConfig) -> Result<(Vector3<f64>, Vector3<f64>)> {
    let r = x.norm();
    let nr = radial_source_profile(c, r, cfg)?;
    let n = if r == 0.0 { Vector3::zeros() } else { x * (nr / r) };
    Ok((Vector3::zeros(), n))
}

/// `½(∂ₜY)² − ½|∇Y|² − 2(ẋ·N)∂ₜY + 2(ẋ·M)Y`.
pub fn lagrangian_density(ydot: f64, grad_y: Vector3<f64>, y: f64, xdot: Vector3<f64>, m: Vector3<f64>, n: Vector3<f64>) -> f64 {
    0.5 * ydot * ydot - 0.5 * grad_y.norm_squared() - 2.0 * xdot.dot(&n) * ydot + 2.0 * xdot.dot(&m) * y
}

/// `½(Π + 2ẋ·N)² + ½|∇Y|² − 2(ẋ·M)Y`.
pub fn hamiltonian_density(pi: f64, grad_y: Vector3<f64>, y: f64, xdot: Vector3<f64>, m: Vector3<f64>, n: Vector3<f64>) -> f64 {
    let p = pi + 2.0 * xdot.dot(&n);
    0.5 * p * p + 0.5 * grad_y.norm_squared() - 2.0 * xdot.dot(&m) * y
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FieldMethod {
    /// Exact per-mode propagation with the velocity linear over each step.
    #[default]
    ModeExact,
    /// Kick-drift-kick leapfrog on the real-space grid, spectral Laplacian.
    Leapfrog,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldRun {
    pub method: FieldMethod,
    pub exec: Exec,
    /// Record the field energy every this many steps (and at the end).
    pub record_every: usize,
}

impl Default for FieldRun {
    fn default() -> Self {
        Self { method: FieldMethod::ModeExact, exec: Exec::Parallel, record_every: 1 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FieldHistory {
    pub t: Vec<f64>,
    /// `Σ ω|a|²` at the recorded times.
    pub energy: Vec<f64>,
    pub modes: ModeAmplitudes,
    pub fields: Fields,
}

impl FieldHistory {
    pub fn write_energy_csv(&self, path: impl AsRef<Path>, metadata: &[(String, String)]) -> Result<()> {
        let mut w = TableWriter::create(path, metadata, &["t", "field_energy"])?;
        for (t, e) in self.t.iter().zip(&self.energy) {
            w.write_floats(&[*t, *e])?;
        }
        w.finish()?;
        Ok(())
    }
}

fn uniform_step(traj: &Trajectory) -> Result<f64> {
    require(traj.len() >= 2, || "trajectory needs at least two samples".into())?;
    let dt = traj.dt();
    require(dt > 0.0, || format!("trajectory time step must be positive, got {dt}"))?;
    for (i, t) in traj.t.iter().enumerate() {
        let expect = traj.t[0] + i as f64 * dt;
        require((t - expect).abs() <= 1e-9 * expect.abs().max(dt), || {
            format!("trajectory is not uniformly sampled at index {i}")
        })?;
    }
    Ok(dt)
}

/// `((e^z − 1)/z, (e^z − 1 − z)/z²)` at `z = −iφ`.
fn linear_drive_weights(phi: f64) -> (Complex64, Complex64) {
    let z = Complex64::new(0.0, -phi);
    if phi.abs() < 0.5 {
        let (mut w0, mut w1) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
        let mut term = Complex64::new(1.0, 0.0); // z^j / (j+1)!
        for j in 0..24 {
            w0 += term;
            w1 += term / (j as f64 + 2.0);
            term = term * z / (j as f64 + 2.0);
        }
        (w0, w1)
    } else {
        let ez = z.exp();
        ((ez - 1.0) / z, (ez - 1.0 - z) / (z * z))
    }
}

/// Evolves the field driven by a prescribed particle velocity.
///
/// The trajectory fixes the time grid. Both methods treat ẋ as linear
/// between samples (the leapfrog uses its midpoint value).
pub fn evolve_field_with_source(
    traj: &Trajectory,
    c: &CouplingFunction,
    g: &FieldGrid,
    initial: &ModeAmplitudes,
    run: &FieldRun,
) -> Result<FieldHistory> {
    g.validate()?;
    let h = uniform_step(traj)?;
    let cfl = g.spacing() / 3f64.sqrt();
    if h >= cfl {
        return Err(Error::StepSize(format!("CFL violated: Δt = {h} ≥ Δx/√3 = {cfl}")));
    }
    let modes = g.modes();
    require(initial.values.len() == modes.len(), || "initial amplitudes do not match the lattice".into())?;
    let exec = run.exec;
    let record_every = run.record_every.max(1);
    let ck = couplings(c, g);
    let steps = traj.len() - 1;
    let mut hist = FieldHistory {
        t: vec![traj.t[0]],
        energy: vec![mode_energy(initial, g, exec)],
        modes: initial.clone(),
        fields: Fields { y: vec![], pi: vec![] },
    };
    match run.method {
        FieldMethod::ModeExact => {
            let i = Complex64::i();
            let prop: Vec<(Complex64, Complex64, Complex64)> = par::map_range(exec, modes.len(), |j| {
                let phi = modes[j].omega * h;
                let (w0, w1) = linear_drive_weights(phi);
                (Complex64::new(0.0, -phi).exp(), (w0 - w1) * i * h * ck[j], w1 * i * h * ck[j])
            });
            let mut a = initial.values.clone();
            for s in 0..steps {
                let (v0, v1) = (traj.v[s], traj.v[s + 1]);
                par::for_each_mut(exec, &mut a, |j, aj| {
                    let (rot, p0, p1) = prop[j];
                    let k = modes[j].k;
                    *aj = rot * *aj + p0 * k.dot(&v0) + p1 * k.dot(&v1);
                });
                if (s + 1) % record_every == 0 || s + 1 == steps {
                    hist.t.push(traj.t[s + 1]);
                    hist.energy.push(par::sum_range(exec, a.len(), |j| modes[j].omega * a[j].norm_sqr()));
                }
            }
            if a.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
                return Err(Error::StepSize("non-finite mode amplitude".into()));
            }
            hist.modes = ModeAmplitudes { values: a };
            hist.fields = field_from_modes(&hist.modes, g, exec)?;
        }
        FieldMethod::Leapfrog => {
            let wmax = modes.iter().map(|m| m.omega).fold(0.0, f64::max);
            if h * wmax >= 2.0 {
                return Err(Error::StepSize(format!("leapfrog unstable: Δt·ω_max = {} ≥ 2", h * wmax)));
            }
            let fft = Fft3::new(g.points_per_axis);
            let mut minus_k2 = vec![0.0; g.points()];
            for m in &modes {
                minus_k2[m.bin] = -m.omega * m.omega;
            }
            let laplacian = |y: &[f64], out: &mut Vec<f64>| {
                let mut s = spectrum(y, &fft, exec);
                par::for_each_mut(exec, &mut s, |j, v| *v *= minus_k2[j]);
                fft.run(&mut s, true, exec);
                out.clear();
                out.extend(s.iter().map(|c| c.re));
            };
            let shapes = source_shapes(c, g, exec)?;
            let Fields { mut y, mut pi } = field_from_modes(initial, g, exec)?;
            let mut lap = Vec::with_capacity(g.points());
            laplacian(&y, &mut lap);
            for s in 0..steps {
                let vm = (traj.v[s] + traj.v[s + 1]) * 0.5;
                par::for_each_mut(exec, &mut pi, |j, p| *p += 0.5 * h * lap[j]);
                par::for_each_mut(exec, &mut y, |j, yj| *yj += h * (pi[j] + 2.0 * vm.dot(&shapes.n[j])));
                laplacian(&y, &mut lap);
                par::for_each_mut(exec, &mut pi, |j, p| *p += 0.5 * h * (lap[j] + 4.0 * vm.dot(&shapes.m[j])));
                if (s + 1) % record_every == 0 || s + 1 == steps {
                    let fields = Fields { y: y.clone(), pi: pi.clone() };
                    hist.t.push(traj.t[s + 1]);
                    hist.energy.push(mode_energy(&modes_from_fields(&fields, g, exec)?, g, exec));
                }
            }
            if y.iter().chain(&pi).any(|v| !v.is_finite()) {
                return Err(Error::StepSize("non-finite field value".into()));
            }
            hist.fields = Fields { y, pi };
            hist.modes = modes_from_fields(&hist.fields, g, exec)?;
        }
    }
    Ok(hist)
}

/// Flat binary snapshot: three little-endian u64 dimensions, the f64 grid
/// spacing, then the values row-major as little-endian f64.
pub fn write_snapshot(path: impl AsRef<Path>, g: &FieldGrid, values: &[f64]) -> Result<()> {
    require(values.len() == g.points(), || "snapshot size does not match the grid".into())?;
    let mut w = BufWriter::new(File::create(path)?);
    for _ in 0..3 {
        w.write_all(&(g.points_per_axis as u64).to_le_bytes())?;
    }
    w.write_all(&g.spacing().to_le_bytes())?;
    for v in values {
        w.write_all(&v.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a snapshot back as `(dims, spacing, values)`.
pub fn read_snapshot(path: impl AsRef<Path>) -> Result<([u64; 3], f64, Vec<f64>)> {
    let mut r = BufReader::new(File::open(path)?);
    let mut b8 = [0u8; 8];
    let mut dims = [0u64; 3];
    for d in &mut dims {
        r.read_exact(&mut b8)?;
        *d = u64::from_le_bytes(b8);
    }
    r.read_exact(&mut b8)?;
    let spacing = f64::from_le_bytes(b8);
    let n = dims.iter().product::<u64>() as usize;
    let mut values = Vec::with_capacity(n);
    for _ in 0..n {
        r.read_exact(&mut b8)?;
        values.push(f64::from_le_bytes(b8));
    }
    Ok((dims, spacing, values))
}

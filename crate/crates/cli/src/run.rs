use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use dissipon::field::{self, FieldGrid, FieldMethod, FieldRun, ModeAmplitudes};
use dissipon::langevin::{self, PotentialSpec, TimeGrid};
use dissipon::oscillator::{self, FockTriple, OscillatorParams};
use dissipon::par::{self, Exec};
use dissipon::quadrature::QuadratureConfig;
use dissipon::rates::{self, RateRequest, RATE_COLUMNS};
use dissipon::reservoir::{self, CouplingFunction, MemoryKernel, Quantum, ReservoirState};
use dissipon::table::{emit_table, Cell, TableWriter};
use dissipon::tls::{self, BlochState, CoherenceModel, GammaConvention, TwoLevelParams};
use dissipon::{Complex64, Vector3};

use crate::config::{Ini, Section};
use crate::keys::{self, Key};

#[derive(Debug)]
pub enum RunError {
    Usage(String),
    Physics(dissipon::Error),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Usage(_) | RunError::Physics(dissipon::Error::InvalidParameter(_)) => 2,
            RunError::Physics(_) => 1,
        }
    }
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunError::Usage(m) => write!(f, "{m}"),
            RunError::Physics(e) => write!(f, "{e}"),
        }
    }
}

impl From<dissipon::Error> for RunError {
    fn from(e: dissipon::Error) -> Self {
        RunError::Physics(e)
    }
}

impl From<std::io::Error> for RunError {
    fn from(e: std::io::Error) -> Self {
        RunError::Physics(e.into())
    }
}

type Result<T> = std::result::Result<T, RunError>;

fn usage(msg: impl Into<String>) -> RunError {
    RunError::Usage(msg.into())
}

/// Resolved values of one section, in table order.
#[derive(Debug, Clone, PartialEq)]
pub struct Params {
    pub section: String,
    pub values: Vec<(&'static str, String)>,
}

impl Params {
    /// Defaults, then command-line values, then the config section.
    pub fn resolve(section: &str, keys: &'static [Key], flags: &[(String, String)], config: Option<&Section>) -> Result<Self> {
        let mut p = Params { section: section.to_string(), values: keys.iter().map(|k| (k.name, k.default.to_string())).collect() };
        for (k, v) in flags {
            p.set(k, v)?;
        }
        if let Some(s) = config {
            for (k, v, _) in &s.entries {
                p.set(k, v)?;
            }
        }
        Ok(p)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match self.values.iter_mut().find(|(k, _)| *k == key) {
            Some(e) => {
                e.1 = value.to_string();
                Ok(())
            }
            None => Err(usage(format!("unknown parameter '{key}' for {}", self.section))),
        }
    }

    pub fn raw(&self, key: &str) -> &str {
        self.values.iter().find(|(k, _)| *k == key).map(|(_, v)| v.as_str()).unwrap_or("")
    }

    fn bad(&self, key: &str, what: &str) -> RunError {
        usage(format!("{}.{key}: '{}' is not {what}", self.section, self.raw(key)))
    }

    pub fn f64(&self, key: &str) -> Result<f64> {
        self.raw(key).trim().parse().map_err(|_| self.bad(key, "a number"))
    }

    pub fn opt_f64(&self, key: &str) -> Result<Option<f64>> {
        if self.raw(key).trim().is_empty() {
            Ok(None)
        } else {
            self.f64(key).map(Some)
        }
    }

    pub fn usize(&self, key: &str) -> Result<usize> {
        self.raw(key).trim().parse().map_err(|_| self.bad(key, "a non-negative integer"))
    }

    pub fn bool(&self, key: &str) -> Result<bool> {
        match self.raw(key).trim() {
            "true" | "yes" | "1" => Ok(true),
            "false" | "no" | "0" | "" => Ok(false),
            _ => Err(self.bad(key, "a boolean")),
        }
    }

    fn floats(&self, key: &str, n: usize) -> Result<Vec<f64>> {
        let v: Vec<f64> = self
            .raw(key)
            .split(',')
            .map(|s| s.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| self.bad(key, &format!("{n} comma-separated numbers")))?;
        if v.len() != n {
            return Err(self.bad(key, &format!("{n} comma-separated numbers")));
        }
        Ok(v)
    }

    pub fn vec3(&self, key: &str) -> Result<Vector3<f64>> {
        let v = self.floats(key, 3)?;
        Ok(Vector3::new(v[0], v[1], v[2]))
    }

    pub fn complex(&self, key: &str) -> Result<Complex64> {
        let v = self.floats(key, 2)?;
        Ok(Complex64::new(v[0], v[1]))
    }

    pub fn fock(&self, key: &str) -> Result<FockTriple> {
        self.raw(key).parse().map_err(|_| self.bad(key, "a Fock triple n1,n2,n3"))
    }

    fn metadata(&self) -> Vec<(String, String)> {
        self.values.iter().map(|(k, v)| (format!("{}.{k}", self.section), v.clone())).collect()
    }
}

/// A fully resolved run.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub experiment: &'static str,
    pub params: Params,
    pub quadrature: Params,
    /// Set for sweeps: the varied parameter and its values.
    pub sweep: Option<Params>,
}

impl Scenario {
    pub fn resolve(experiment: &str, flags: &[(String, String)], config: &Ini) -> Result<Self> {
        let exp = keys::experiment(experiment).ok_or_else(|| usage(format!("unknown experiment '{experiment}'")))?;
        Ok(Scenario {
            experiment: exp.name,
            params: Params::resolve(exp.name, exp.keys, flags, config.section(exp.name))?,
            quadrature: Params::resolve("quadrature", keys::QUADRATURE_KEYS, &[], config.section("quadrature"))?,
            sweep: None,
        })
    }

    /// The scenario as a config file that reproduces it.
    pub fn to_ini(&self) -> Ini {
        let mut ini = Ini::default();
        ini.set("", "experiment", if self.sweep.is_some() { "sweep" } else { self.experiment });
        if let Some(s) = &self.sweep {
            for (k, v) in &s.values {
                ini.set("sweep", k, v);
            }
        }
        for p in [&self.params, &self.quadrature] {
            for (k, v) in &p.values {
                ini.set(&p.section, k, v);
            }
        }
        ini
    }

    fn metadata(&self) -> Vec<(String, String)> {
        let mut m = vec![("experiment".to_string(), self.experiment.to_string())];
        m.extend(self.params.metadata());
        m.extend(self.quadrature.metadata());
        m
    }

    fn quadrature_config(&self, default: QuadratureConfig) -> Result<QuadratureConfig> {
        let q = &self.quadrature;
        let mut cfg = default.with_tolerances(q.f64("abs_tol")?, q.f64("rel_tol")?);
        if let Some(uv) = q.opt_f64("uv_cutoff")? {
            cfg.uv_cutoff = uv;
        }
        if let Some(ir) = q.opt_f64("ir_cutoff")? {
            cfg.ir_cutoff = ir;
        }
        cfg.max_subdivisions = q.usize("max_subdivisions")?;
        cfg.validate().map_err(|e| usage(format!("quadrature: {e}")))?;
        Ok(cfg)
    }
}

/// Scalar results of a run, in a fixed order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Summary {
    pub values: Vec<(String, f64)>,
    pub outputs: Vec<String>,
}

impl Summary {
    fn push(&mut self, k: &str, v: f64) {
        self.values.push((k.to_string(), v));
    }
}

struct Ctx<'a> {
    out: &'a Path,
    exec: Exec,
    meta: Vec<(String, String)>,
    summary: Summary,
}

impl Ctx<'_> {
    fn path(&mut self, name: &str) -> PathBuf {
        self.summary.outputs.push(name.to_string());
        self.out.join(name)
    }
}

fn coupling(p: &Params, cutoff: f64) -> Result<CouplingFunction> {
    let table = p.raw("table");
    let c = if table.is_empty() { CouplingFunction::canonical(p.f64("beta")?)? } else { CouplingFunction::load_table(table)? };
    Ok(if cutoff.is_finite() { c.with_uv_cutoff(cutoff) } else { c })
}

fn run_kernel(s: &Scenario, ctx: &mut Ctx) -> Result<()> {
    let p = &s.params;
    let cutoff = p.f64("cutoff")?;
    let c = coupling(p, cutoff)?;
    let cfg = s.quadrature_config(QuadratureConfig::default().with_cutoffs(0.0, cutoff))?;
    let dt = p.f64("dt")?;
    let k = MemoryKernel::sample(&c, dt, p.usize("samples")?, &cfg)?;
    let friction = reservoir::friction_coefficient(&c, &cfg)?;
    ctx.meta.push(("friction_limit".into(), friction.to_string()));
    let rows = k.times().zip(&k.values).map(|(t, g)| vec![Cell::Num(t), Cell::Num(*g)]);
    emit_table(ctx.path("kernel.csv"), &ctx.meta, &["t", "gamma"], rows)?;
    ctx.summary.push("gamma0", k.values.first().copied().unwrap_or(0.0));
    ctx.summary.push("friction_limit", friction);
    Ok(())
}

fn run_langevin(s: &Scenario, ctx: &mut Ctx) -> Result<()> {
    let p = &s.params;
    let (m, omega) = (p.f64("m")?, p.f64("omega")?);
    let cutoff = p.f64("cutoff")?;
    let c = coupling(p, cutoff)?;
    let cfg = s.quadrature_config(QuadratureConfig::default().with_cutoffs(0.0, cutoff))?;
    let pot = PotentialSpec::harmonic(m, omega)?;
    let grid = TimeGrid::spanning(p.f64("tmax")?, p.f64("dt")?)?;
    let (x0, v0) = (p.vec3("x0")?, p.vec3("v0")?);
    let beta = match c {
        CouplingFunction::Canonical { beta, .. } => beta,
        _ => reservoir::friction_coefficient(&c, &cfg)?,
    };
    let traj = match p.raw("method") {
        "volterra" => {
            let kernel = MemoryKernel::sample(&c, grid.dt, grid.steps + 1, &cfg)?;
            langevin::evolve_mean_volterra(m, &pot, &kernel, x0, v0, &grid)?
        }
        "markov" => langevin::evolve_mean_markov(m, &pot, beta, x0, v0, &grid)?,
        other => return Err(usage(format!("langevin.method: '{other}' is not volterra or markov"))),
    };
    traj.write_csv(ctx.path("trajectory.csv"), &ctx.meta)?;
    let last = traj.len() - 1;
    ctx.summary.push("x_final", traj.x[last].x);
    ctx.summary.push("beta_eff", beta);
    let op = OscillatorParams::new(m, omega, beta)?;
    if op.damping_ratio() < 1.0 {
        let mut dev = 0.0f64;
        for (t, x) in traj.t.iter().zip(&traj.x) {
            dev = dev.max((x - oscillator::mean_trajectory(&op, x0, v0 * m, *t)?).norm());
        }
        ctx.summary.push("closed_form_deviation", dev);
    }
    Ok(())
}

fn run_oscillator(s: &Scenario, ctx: &mut Ctx) -> Result<()> {
    let p = &s.params;
    let op = OscillatorParams::new(p.f64("m")?, p.f64("omega")?, p.f64("beta")?)?;
    let n = p.fock("n")?;
    let cfg = s.quadrature_config(QuadratureConfig::default())?;
    let dt = p.f64("dt")?;
    let steps = (p.f64("tmax")? / dt).round() as usize;
    let traj = oscillator::sample_mean_trajectory(&op, p.vec3("x0")?, p.vec3("p0")?, dt, steps)?;
    traj.write_csv(ctx.path("mean_trajectory.csv"), &ctx.meta)?;
    let sys = oscillator::asymptotic_system_energy(&op, n);
    let res = oscillator::asymptotic_reservoir_energy(&op, n, &cfg)?;
    let mut rows = vec![
        ("system_energy_canonical", sys.canonical_form),
        ("system_energy_velocity", sys.velocity_form),
        ("reservoir_energy_numeric", res.numeric),
        ("reservoir_energy_residue", res.residue_closed_form),
    ];
    let kt = p.f64("kt")?;
    if kt > 0.0 {
        let th = oscillator::thermal_steady_energy_with(&op, kt, &cfg, ctx.exec)?;
        rows.push(("thermal_energy_printed", th.printed));
        rows.push(("thermal_energy_mode_sum", th.mode_sum));
    }
    let cells = rows.iter().map(|(k, v)| vec![Cell::from(*k), Cell::Num(*v)]);
    emit_table(ctx.path("energies.csv"), &ctx.meta, &["quantity", "value"], cells)?;
    for (k, v) in rows {
        ctx.summary.push(k, v);
    }
    Ok(())
}

fn parse_quanta(p: &Params) -> Result<Vec<Quantum>> {
    p.raw("fock")
        .split(';')
        .filter(|s| !s.trim().is_empty())
        .map(|q| {
            let v: Vec<f64> = q.split(':').map(|x| x.trim().parse::<f64>()).collect::<std::result::Result<_, _>>().map_err(|_| p.bad("fock", "a list of kx:ky:kz quanta"))?;
            if v.len() != 3 {
                return Err(p.bad("fock", "a list of kx:ky:kz quanta"));
            }
            Ok(Quantum::new(Vector3::new(v[0], v[1], v[2]), 1.0)?)
        })
        .collect()
}

fn run_rates(s: &Scenario, ctx: &mut Ctx) -> Result<()> {
    let p = &s.params;
    let op = OscillatorParams::new(p.f64("m")?, p.f64("omega")?, p.f64("beta")?)?;
    let cutoff = p.opt_f64("cutoff")?.unwrap_or(100.0 * op.omega);
    let c = CouplingFunction::canonical(op.beta)?.with_uv_cutoff(cutoff);
    let quanta = parse_quanta(p)?;
    let state = if p.bool("thermal")? {
        if !quanta.is_empty() {
            return Err(usage("rates: --thermal and --fock are exclusive"));
        }
        ReservoirState::thermal(p.f64("kt")?)?
    } else if quanta.is_empty() {
        ReservoirState::Vacuum
    } else {
        ReservoirState::Fock(quanta)
    };
    let req = RateRequest::new(op, p.fock("n")?, state, c);
    let r = rates::rates(&req)?;
    let mut row = rates::rate_row(&req, &r);
    let mut columns: Vec<&str> = RATE_COLUMNS.to_vec();
    ctx.summary.push("emission", r.emission);
    ctx.summary.push("absorption", r.absorption);
    if let Some(t) = p.opt_f64("t")? {
        let cfg = s.quadrature_config(QuadratureConfig::for_frequencies(op.omega, op.omega).with_cutoffs(1e-8 * op.omega, cutoff))?;
        let prob = rates::finite_time_emission_probability(&req.clone().at_time(t), &cfg)?;
        columns.push("probability");
        row.push(Cell::Num(prob));
        ctx.summary.push("probability", prob);
    }
    emit_table(ctx.path("rates.csv"), &ctx.meta, &columns, [row])?;
    Ok(())
}

fn run_tls(s: &Scenario, ctx: &mut Ctx) -> Result<()> {
    let p = &s.params;
    let c = CouplingFunction::canonical(p.f64("beta")?)?;
    let tp = TwoLevelParams::with_dipole_squared(p.f64("omega0")?, p.f64("x12sq")?, c)?.strict(p.bool("strict")?);
    let convention = match p.raw("gamma") {
        "printed" => GammaConvention::Printed,
        "bloch" => GammaConvention::FromBloch,
        other => return Err(usage(format!("tls.gamma: '{other}' is not printed or bloch"))),
    };
    let cfg = s.quadrature_config(QuadratureConfig::default().with_cutoffs(0.0, p.f64("cutoff")?))?;
    let shifts = tls::level_shifts(&tp, p.f64("eps")?, &cfg)?;
    let model = CoherenceModel::from_params(&tp, &shifts, convention);
    let init = BlochState::new(p.f64("sz0")?, p.complex("f0")?, p.complex("e0")?)?;
    let tmax = p.f64("tmax")?;
    let rows = p.usize("samples")?.max(2) - 1;
    let h_max = p.opt_f64("dt")?.unwrap_or(0.05 / model.spectral_radius().max(1e-300));
    let per_row = ((tmax / rows as f64) / h_max).ceil().max(1.0) as usize;
    let steps = rows * per_row;
    let hist = tls::evolve_bloch_markov(&model, init, tmax / steps as f64, steps, per_row)?;
    let mut meta = ctx.meta.clone();
    for (k, v) in [("mu", model.mu), ("delta1", shifts.delta1), ("delta2", shifts.delta2), ("gamma", model.gamma)] {
        meta.push((k.into(), v.to_string()));
    }
    hist.write_csv(ctx.path("decay.csv"), &meta)?;
    let sz: Vec<f64> = hist.states.iter().map(|s| s.sz).collect();
    ctx.summary.push("mu", model.mu);
    ctx.summary.push("delta1", shifts.delta1);
    ctx.summary.push("delta2", shifts.delta2);
    ctx.summary.push("gamma", model.gamma);
    ctx.summary.push("discriminant", model.discriminant());
    ctx.summary.push("fitted_rate", tls::fitted_population_rate(&hist.t, &sz).unwrap_or(f64::NAN));
    Ok(())
}

fn run_field(s: &Scenario, ctx: &mut Ctx) -> Result<()> {
    let p = &s.params;
    let mut g = FieldGrid::new(p.usize("modes")?, p.usize("points")?, p.f64("dk")?)?;
    let cutoff = p.f64("cutoff")?;
    if cutoff.is_finite() {
        g = g.with_cutoff(cutoff)?;
    }
    let op = OscillatorParams::new(p.f64("m")?, p.f64("omega")?, p.f64("beta")?)?;
    let dt = p.f64("dt")?;
    let steps = (p.f64("tmax")? / dt).round() as usize;
    let traj = oscillator::sample_mean_trajectory(&op, p.vec3("x0")?, p.vec3("v0")? * op.m, dt, steps)?;
    let method = match p.raw("method") {
        "exact" => FieldMethod::ModeExact,
        "leapfrog" => FieldMethod::Leapfrog,
        other => return Err(usage(format!("field.method: '{other}' is not exact or leapfrog"))),
    };
    let run = FieldRun { method, exec: ctx.exec, record_every: p.usize("record_every")?.max(1) };
    let c = CouplingFunction::canonical(op.beta)?;
    let hist = field::evolve_field_with_source(&traj, &c, &g, &ModeAmplitudes::zeros(&g), &run)?;
    let mech = |i: usize| 0.5 * op.m * traj.v[i].norm_squared() + 0.5 * op.m * op.omega * op.omega * traj.x[i].norm_squared();
    let mut w = TableWriter::create(ctx.path("field_energy.csv"), &ctx.meta, &["t", "field_energy", "mechanical_loss"])?;
    for (t, e) in hist.t.iter().zip(&hist.energy) {
        let i = ((t - traj.t[0]) / dt).round() as usize;
        w.write_floats(&[*t, *e, mech(0) - mech(i)])?;
    }
    w.finish()?;
    field::write_snapshot(ctx.path("y_final.bin"), &g, &hist.fields.y)?;
    field::write_snapshot(ctx.path("pi_final.bin"), &g, &hist.fields.pi)?;
    let check = field::hamiltonian_identity_check(&hist.modes, &g, ctx.exec)?;
    let lost = mech(0) - mech(traj.len() - 1);
    let energy = *hist.energy.last().unwrap_or(&0.0);
    ctx.summary.push("field_energy", energy);
    ctx.summary.push("mechanical_loss", lost);
    ctx.summary.push("balance_ratio", energy / lost);
    ctx.summary.push("identity_residual", check.relative());
    Ok(())
}

/// Runs one scenario into `out`; writes `scenario.ini` alongside the data.
pub fn run_scenario(s: &Scenario, out: &Path, exec: Exec) -> Result<Summary> {
    fs::create_dir_all(out)?;
    let mut ctx = Ctx { out, exec, meta: s.metadata(), summary: Summary::default() };
    match s.experiment {
        "kernel" => run_kernel(s, &mut ctx)?,
        "langevin" => run_langevin(s, &mut ctx)?,
        "oscillator" => run_oscillator(s, &mut ctx)?,
        "rates" => run_rates(s, &mut ctx)?,
        "tls" => run_tls(s, &mut ctx)?,
        "field" => run_field(s, &mut ctx)?,
        other => return Err(usage(format!("unknown experiment '{other}'"))),
    }
    fs::write(ctx.path("scenario.ini"), s.to_ini().serialize())?;
    Ok(ctx.summary)
}

fn split_values(raw: &str) -> Vec<String> {
    let sep = if raw.contains(';') { ';' } else { ',' };
    raw.split(sep).map(|v| v.trim().to_string()).filter(|v| !v.is_empty()).collect()
}

/// Runs one scenario per value in parallel and merges the summaries into
/// `sweep.csv` in input order. Returns the number of failed runs.
pub fn run_sweep(s: &Scenario, out: &Path, exec: Exec) -> Result<(Summary, usize)> {
    let sweep = s.sweep.as_ref().ok_or_else(|| usage("not a sweep"))?;
    let param = sweep.raw("param").to_string();
    let values = split_values(sweep.raw("values"));
    if values.is_empty() {
        return Err(usage("sweep.values is empty"));
    }
    // validate the parameter up front so a typo is a usage error, not N failures
    s.params.clone().set(&param, &values[0])?;
    fs::create_dir_all(out)?;
    let inner = if exec.is_parallel() { Exec::Serial } else { exec };
    let results = par::map_range(exec, values.len(), |i| {
        let mut run = s.clone();
        run.sweep = None;
        run.params.set(&param, &values[i])?;
        run_scenario(&run, &out.join(format!("run_{i:04}")), inner)
    });
    let keys: Vec<String> = results
        .iter()
        .find_map(|r| r.as_ref().ok())
        .map(|sm| sm.values.iter().map(|(k, _)| k.clone()).collect())
        .unwrap_or_default();
    let mut columns = vec!["index", param.as_str(), "status"];
    columns.extend(keys.iter().map(String::as_str));
    let mut meta = s.metadata();
    meta.extend(sweep.metadata());
    let mut w = TableWriter::create(out.join("sweep.csv"), &meta, &columns)?;
    let mut failed = 0;
    for (i, r) in results.iter().enumerate() {
        let mut row = vec![Cell::from(i), Cell::from(values[i].as_str())];
        match r {
            Ok(sm) => {
                row.push("ok".into());
                row.extend(keys.iter().map(|k| Cell::Num(sm.values.iter().find(|(n, _)| n == k).map_or(f64::NAN, |(_, v)| *v))));
            }
            Err(e) => {
                failed += 1;
                log::error!("sweep run {i} ({param} = {}): {e}", values[i]);
                row.push(Cell::Text(format!("error: {e}")));
                row.extend(keys.iter().map(|_| Cell::Num(f64::NAN)));
            }
        }
        w.write_row(&row)?;
    }
    w.finish()?;
    fs::write(out.join("scenario.ini"), s.to_ini().serialize())?;
    let summary = Summary {
        values: vec![("runs".into(), values.len() as f64), ("failed".into(), failed as f64)],
        outputs: vec!["sweep.csv".into(), "scenario.ini".into()],
    };
    Ok((summary, failed))
}

/// `manifest.txt`: what ran, with which build, how long, and what it wrote.
pub fn write_manifest(out: &Path, s: &Scenario, summary: &Summary, started: SystemTime, clock: Instant, exec: Exec) -> Result<()> {
    let mut text = String::new();
    let unix = started.duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    text.push_str(&format!("# dissipon {} run manifest\n", env!("CARGO_PKG_VERSION")));
    text.push_str(&format!("version = {}\n", env!("CARGO_PKG_VERSION")));
    text.push_str(&format!("started_unix = {unix}\n"));
    text.push_str(&format!("wall_time_s = {:.3}\n", clock.elapsed().as_secs_f64()));
    text.push_str(&format!("execution = {}\n", if exec.is_parallel() { "parallel" } else { "serial" }));
    text.push_str(&format!("outputs = {}\n", summary.outputs.join(", ")));
    text.push_str("\n[results]\n");
    for (k, v) in &summary.values {
        text.push_str(&format!("{k} = {}\n", dissipon::table::format_float(*v)));
    }
    text.push_str("\n[scenario]\n");
    text.push_str(&s.to_ini().serialize());
    fs::create_dir_all(out)?;
    fs::write(out.join("manifest.txt"), text)?;
    Ok(())
}

//! Every parameter the runner accepts, with its default. The same tables
//! drive the command-line flags, config validation and serialization.

#[derive(Debug, Clone, Copy)]
pub struct Key {
    pub name: &'static str,
    pub default: &'static str,
    pub help: &'static str,
    /// Boolean switch (`--name`, value `true`/`false` in files).
    pub flag: bool,
}

const fn k(name: &'static str, default: &'static str, help: &'static str) -> Key {
    Key { name, default, help, flag: false }
}

const fn flag(name: &'static str, help: &'static str) -> Key {
    Key { name, default: "false", help, flag: true }
}

#[derive(Debug, Clone, Copy)]
pub struct Experiment {
    pub name: &'static str,
    pub about: &'static str,
    pub keys: &'static [Key],
}

pub const ROOT_KEYS: &[Key] = &[k("experiment", "", "experiment to run when no subcommand is given")];

pub const QUADRATURE_KEYS: &[Key] = &[
    k("abs_tol", "1e-10", "absolute quadrature tolerance"),
    k("rel_tol", "1e-8", "relative quadrature tolerance"),
    k("uv_cutoff", "", "upper integration limit Λ (empty: experiment default)"),
    k("ir_cutoff", "", "lower integration limit ε (empty: experiment default)"),
    k("max_subdivisions", "4000", "adaptive subdivision budget"),
];

pub const OUTPUT_KEYS: &[Key] = &[k("dir", "", "output directory (overrides --out)")];

pub const SWEEP_KEYS: &[Key] = &[
    k("experiment", "rates", "experiment to sweep"),
    k("param", "beta", "parameter to vary"),
    k("values", "0.05,0.1,0.2", "values, separated by ';' if any contains a comma"),
];

pub const EXPERIMENTS: &[Experiment] = &[
    Experiment {
        name: "kernel",
        about: "Sample the memory kernel γ(t) and its friction limit",
        keys: &[
            k("beta", "0.1", "friction coefficient β of the canonical coupling"),
            k("cutoff", "100", "UV cutoff Λ"),
            k("table", "", "two-column (ω, f) coupling table; replaces the canonical coupling"),
            k("dt", "0.01", "sample spacing"),
            k("samples", "2001", "number of samples"),
        ],
    },
    Experiment {
        name: "langevin",
        about: "Integrate the mean generalized Langevin equation in a harmonic well",
        keys: &[
            k("m", "1", "mass"),
            k("omega", "1", "oscillator frequency"),
            k("beta", "0.1", "friction coefficient"),
            k("cutoff", "200", "UV cutoff Λ of the kernel"),
            k("table", "", "coupling table; replaces the canonical coupling"),
            k("x0", "1,0,0", "initial position"),
            k("v0", "0,0,0", "initial velocity"),
            k("dt", "0.005", "time step"),
            k("tmax", "20", "final time"),
            k("method", "volterra", "volterra | markov"),
        ],
    },
    Experiment {
        name: "oscillator",
        about: "Damped 3D oscillator: mean trajectory and asymptotic energies",
        keys: &[
            k("m", "1", "mass"),
            k("omega", "1", "oscillator frequency"),
            k("beta", "0.1", "friction coefficient"),
            k("n", "0,0,0", "initial Fock occupation n1,n2,n3"),
            k("kt", "0", "reservoir temperature; 0 skips the thermal energy"),
            k("x0", "1,0,0", "initial mean position"),
            k("p0", "0,0,0", "initial mean momentum"),
            k("dt", "0.05", "output spacing of the trajectory"),
            k("tmax", "50", "final time"),
        ],
    },
    Experiment {
        name: "rates",
        about: "Golden-rule emission and absorption rates of the oscillator",
        keys: &[
            k("m", "1", "mass"),
            k("omega", "1", "oscillator frequency"),
            k("beta", "0.1", "friction coefficient"),
            k("n", "1,0,0", "Fock occupation n1,n2,n3"),
            flag("thermal", "thermal reservoir at temperature kt"),
            k("kt", "1", "reservoir temperature"),
            k("fock", "", "reservoir quanta as kx:ky:kz entries separated by ';'"),
            k("cutoff", "", "UV cutoff Λ (empty: 100ω)"),
            k("t", "", "also report the first-order probability at this time"),
        ],
    },
    Experiment {
        name: "tls",
        about: "Markovian decay and coherence of a two-level system",
        keys: &[
            k("omega0", "1", "level spacing ω₀"),
            k("beta", "0.1", "friction coefficient of the canonical coupling"),
            k("x12sq", "1", "squared dipole matrix element |x12|²"),
            flag("strict", "drop |x12|² from μ"),
            k("gamma", "printed", "printed (ω₀−2Δ₂−2Δ₁) | bloch (ω₀−2Δ₁+2Δ₂)"),
            k("eps", "1e-3", "infrared cutoff of the level shifts"),
            k("cutoff", "1000", "UV cutoff of the level shifts"),
            k("sz0", "1", "initial ⟨σz⟩"),
            k("f0", "0,0", "initial F as re,im"),
            k("e0", "0,0", "initial E as re,im"),
            k("tmax", "100", "final time"),
            k("dt", "", "time step (empty: automatic)"),
            k("samples", "1001", "output rows"),
        ],
    },
    Experiment {
        name: "field",
        about: "Drive the lattice reservoir field with the damped mean trajectory",
        keys: &[
            k("modes", "16", "lattice modes per axis N"),
            k("points", "16", "real-space points per axis M"),
            k("dk", "0.2", "lattice spacing Δk"),
            k("cutoff", "inf", "spherical cutoff Λ on |k|"),
            k("m", "1", "particle mass"),
            k("omega", "1", "oscillator frequency"),
            k("beta", "0.1", "friction coefficient"),
            k("x0", "1,0,0", "initial position"),
            k("v0", "0,0,0", "initial velocity"),
            k("dt", "0.05", "time step"),
            k("tmax", "20", "final time"),
            k("method", "exact", "exact | leapfrog"),
            k("record_every", "10", "energy trace stride"),
        ],
    },
];

pub fn experiment(name: &str) -> Option<&'static Experiment> {
    EXPERIMENTS.iter().find(|e| e.name == name)
}

pub fn section_keys(name: &str) -> Option<&'static [Key]> {
    match name {
        "" => Some(ROOT_KEYS),
        "quadrature" => Some(QUADRATURE_KEYS),
        "output" => Some(OUTPUT_KEYS),
        "sweep" => Some(SWEEP_KEYS),
        other => experiment(other).map(|e| e.keys),
    }
}

//! `dissipon`: runs named experiments from flags or a scenario file and
//! writes CSV tables, binary snapshots and a run manifest.

mod config;
mod keys;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Instant, SystemTime};

use clap::parser::ValueSource;
use clap::{Arg, ArgAction, ArgMatches, Command};
use dissipon::par::Exec;

use config::Ini;
use keys::{Key, EXPERIMENTS};
use run::{Params, RunError, Scenario};

fn key_args(keys: &'static [Key]) -> Vec<Arg> {
    keys.iter()
        .map(|k| {
            let a = Arg::new(k.name).long(k.name).help(k.help);
            if k.flag {
                a.action(ArgAction::SetTrue)
            } else {
                let a = a.value_name("VALUE").allow_hyphen_values(true);
                if k.default.is_empty() {
                    a
                } else {
                    a.help(format!("{} [default: {}]", k.help, k.default))
                }
            }
        })
        .collect()
}

fn command() -> Command {
    let mut cmd = Command::new("dissipon")
        .version(env!("CARGO_PKG_VERSION"))
        .about("Quantum dissipation experiments: memory kernels, Langevin dynamics, rates, two-level decay, reservoir field")
        .arg(Arg::new("config").long("config").short('c').value_name("FILE").global(true).help("scenario file; its values override flags"))
        .arg(Arg::new("out").long("out").short('o').value_name("DIR").global(true).help("output directory [default: out]"))
        .arg(Arg::new("serial").long("serial").action(ArgAction::SetTrue).global(true).help("run on one thread"))
        .subcommand_required(false)
        .arg_required_else_help(false);
    for e in EXPERIMENTS {
        cmd = cmd.subcommand(Command::new(e.name).about(e.about).args(key_args(e.keys)));
    }
    cmd.subcommand(
        Command::new("sweep")
            .about("Run one experiment over a list of values of one parameter, in parallel")
            .args(key_args(keys::SWEEP_KEYS))
            .arg(Arg::new("set").long("set").value_name("KEY=VALUE").action(ArgAction::Append).help("fix a parameter of the swept experiment")),
    )
}

/// Values given explicitly on the command line, in key-table order.
fn explicit(m: &ArgMatches, keys: &'static [Key]) -> Vec<(String, String)> {
    keys.iter()
        .filter(|k| m.value_source(k.name) == Some(ValueSource::CommandLine))
        .map(|k| {
            let v = if k.flag { m.get_flag(k.name).to_string() } else { m.get_one::<String>(k.name).cloned().unwrap_or_default() };
            (k.name.to_string(), v)
        })
        .collect()
}

fn load_config(path: Option<&String>) -> Result<Ini, RunError> {
    let Some(path) = path else { return Ok(Ini::default()) };
    let text = std::fs::read_to_string(path).map_err(|e| RunError::Usage(format!("{path}: {e}")))?;
    Ini::parse(&text).map_err(|e| RunError::Usage(format!("{path}: {e}")))
}

fn root_experiment(ini: &Ini) -> Option<String> {
    ini.root().and_then(|r| r.get("experiment")).map(str::to_string).filter(|s| !s.is_empty())
}

fn sweep_scenario(m: Option<&ArgMatches>, ini: &Ini) -> Result<Scenario, RunError> {
    let flags = m.map(|m| explicit(m, keys::SWEEP_KEYS)).unwrap_or_default();
    let sweep = Params::resolve("sweep", keys::SWEEP_KEYS, &flags, ini.section("sweep"))?;
    let sets: Vec<(String, String)> = m
        .and_then(|m| m.get_many::<String>("set"))
        .into_iter()
        .flatten()
        .map(|s| s.split_once('=').map(|(k, v)| (k.trim().to_string(), v.trim().to_string())).ok_or_else(|| RunError::Usage(format!("--set expects KEY=VALUE, got '{s}'"))))
        .collect::<Result<_, _>>()?;
    let mut s = Scenario::resolve(sweep.raw("experiment"), &sets, ini)?;
    s.sweep = Some(sweep);
    Ok(s)
}

fn execute() -> Result<(), RunError> {
    let mut cmd = command();
    let args: Vec<String> = std::env::args().collect();
    if args.len() <= 1 {
        cmd.print_help().ok();
        println!();
        return Err(RunError::Usage("no experiment given".into()));
    }
    let matches = cmd.try_get_matches_from_mut(&args).map_err(|e| {
        let code = e.exit_code();
        e.print().ok();
        if code == 0 {
            std::process::exit(0);
        }
        RunError::Usage(String::new())
    })?;

    let sub = matches.subcommand();
    // global args are propagated into the subcommand's matches
    let globals = sub.map(|(_, m)| m).unwrap_or(&matches);
    let ini = load_config(globals.get_one::<String>("config"))?;
    let exec = if globals.get_flag("serial") { Exec::Serial } else { Exec::Parallel };
    let out: PathBuf = ini
        .section("output")
        .and_then(|s| s.get("dir"))
        .filter(|d| !d.is_empty())
        .map(PathBuf::from)
        .or_else(|| globals.get_one::<String>("out").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"));

    let file_exp = root_experiment(&ini);
    let name = match (sub.map(|(n, _)| n), file_exp.as_deref()) {
        (Some(a), Some(b)) if a != b => {
            return Err(RunError::Usage(format!("subcommand '{a}' conflicts with experiment = {b} in the config file")));
        }
        (Some(a), _) => a.to_string(),
        (None, Some(b)) => b.to_string(),
        (None, None) => {
            command().print_help().ok();
            println!();
            return Err(RunError::Usage("the config file names no experiment".into()));
        }
    };

    let started = SystemTime::now();
    let clock = Instant::now();
    let sub_matches = sub.map(|(_, m)| m);
    if name == "sweep" {
        let s = sweep_scenario(sub_matches, &ini)?;
        let (summary, failed) = run::run_sweep(&s, &out, exec)?;
        run::write_manifest(&out, &s, &summary, started, clock, exec)?;
        log::info!("sweep finished: {} runs, {failed} failed", summary.values[0].1);
        if failed > 0 {
            return Err(RunError::Physics(dissipon::Error::Domain(format!("{failed} sweep run(s) failed; see sweep.csv"))));
        }
        return Ok(());
    }
    let exp = keys::experiment(&name).ok_or_else(|| RunError::Usage(format!("unknown experiment '{name}'")))?;
    let flags = sub_matches.map(|m| explicit(m, exp.keys)).unwrap_or_default();
    let s = Scenario::resolve(exp.name, &flags, &ini)?;
    let summary = run::run_scenario(&s, &out, exec)?;
    run::write_manifest(&out, &s, &summary, started, clock, exec)?;
    for (k, v) in &summary.values {
        println!("{k} = {}", dissipon::table::format_float(*v));
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match execute() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let msg = e.to_string();
            if !msg.is_empty() {
                eprintln!("error: {msg}");
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

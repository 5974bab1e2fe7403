//! The `prevlab` command line.
//!
//! Every run reads a flat key table (from `--config`, overridden by flags),
//! validates it before any computation, and writes `<out>.report.txt` and
//! `<out>.csv`. Exit codes: 0 success, 2 bad input, 3 numerical failure.

mod commands;
mod config;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::Path;

use clap::{Arg, ArgAction, ArgMatches};

pub use commands::{execute, Outputs, DEFAULT_CSV_N_MAX};
pub use config::{parse_config_text, Command, ExperimentConfig, COMMANDS};

use crate::error::{Error, Result};
use crate::seeding;

const SCHEMAS: &str = "\
CSV outputs start with `# schema=1 command=<name>` and a header row:
  shyness     predicate,probe,samples,holds,fails,undecided,failure_fraction,ci_lo,ci_hi,seed,box_radius
              (with --levels: level,cells,samples,fails,undecided,fraction,covered_cells,coverage,coverage_exact)
  tongues     omega,locked,period,multiplier
  hopf        mu0,x,y,omega,trace_mu_deriv,lyapunov,classification
  sets        a,b
  convolve    x1,...,xd,weight
  density     member,min,max
  dimension   scale,count

Exit codes: 0 success, 2 invalid input, 3 numerical failure.";

fn about(cmd: Command) -> &'static str {
    match cmd {
        Command::Shyness => "Estimate the failure measure of a predicate along a probe",
        Command::Tongues => "Locked fraction of the sine circle map at fixed eps",
        Command::Hopf => "Find and classify Hopf points of a planar family",
        Command::Sets => "Built-in open dense sets of small measure",
        Command::Convolve => "Convolve discrete measures",
        Command::Density => "Lower and upper densities of a set over a measure family",
        Command::Dimension => "Box-counting dimension and projection injectivity",
    }
}

fn flag(key: &str) -> String {
    key.replace('_', "-")
}

fn cli() -> clap::Command {
    let mut app = clap::Command::new("prevlab")
        .version(env!("CARGO_PKG_VERSION"))
        .about("Prevalence numerics: probes, failure measures, orbits, Hopf points")
        .after_help(SCHEMAS)
        .arg(Arg::new("config").long("config").global(true).value_name("FILE").help("key = value config file"))
        .arg(Arg::new("seed").long("seed").global(true).value_name("N").help("master seed (default 0)"))
        .arg(
            Arg::new("workers")
                .long("workers")
                .global(true)
                .value_name("N")
                .env("PREVLAB_WORKERS")
                .help("worker threads; results do not depend on it"),
        )
        .arg(Arg::new("out").long("out").global(true).value_name("PREFIX").help("output prefix"));
    for &name in COMMANDS {
        let cmd: Command = name.parse().expect("listed command");
        let (required, optional, _) = config::keys(cmd);
        let mut sub = clap::Command::new(name).about(about(cmd)).after_help(SCHEMAS);
        for &k in required.iter().chain(optional) {
            sub = sub.arg(Arg::new(k).long(flag(k)).value_name("VALUE").allow_hyphen_values(true));
        }
        if cmd == Command::Shyness {
            sub = sub.arg(
                Arg::new("p")
                    .short('p')
                    .value_name("KEY=VALUE")
                    .action(ArgAction::Append)
                    .help("predicate parameter"),
            );
        }
        app = app.subcommand(sub);
    }
    app
}

fn table_from_matches(m: &ArgMatches) -> Result<BTreeMap<String, String>> {
    let mut table = BTreeMap::new();
    let config_path = m.get_one::<String>("config").cloned().or_else(|| {
        m.subcommand().and_then(|(_, s)| s.get_one::<String>("config").cloned())
    });
    if let Some(p) = config_path {
        let text = fs::read_to_string(&p).map_err(|e| Error::Io(format!("{p}: {e}")))?;
        table = parse_config_text(&text).map_err(|e| match e {
            Error::Parse { line, msg } => Error::Parse { line, msg: format!("{p}: {msg}") },
            other => other,
        })?;
    }
    let mut globals = |src: &ArgMatches| {
        for k in ["seed", "workers", "out"] {
            if let Some(v) = src.get_one::<String>(k) {
                table.insert(k.to_string(), v.clone());
            }
        }
    };
    globals(m);
    if let Some((name, sub)) = m.subcommand() {
        globals(sub);
        if let Some(prev) = table.get("command") {
            if prev != name {
                return Err(Error::input(format!("config names command `{prev}` but `{name}` was given")));
            }
        }
        table.insert("command".into(), name.to_string());
        let cmd: Command = name.parse()?;
        let (required, optional, _) = config::keys(cmd);
        for &k in required.iter().chain(optional) {
            if let Some(v) = sub.get_one::<String>(k) {
                table.insert(k.to_string(), v.clone());
            }
        }
        if let Some(ps) = sub.try_get_many::<String>("p").ok().flatten() {
            for p in ps {
                let (k, v) = p.split_once('=').ok_or_else(|| Error::input(format!("-p expects KEY=VALUE, got `{p}`")))?;
                table.insert(format!("p.{}", k.trim()), v.trim().to_string());
            }
        }
    }
    Ok(table)
}

fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let io = |e: std::io::Error| Error::Io(format!("{}: {e}", path.display()));
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    fs::create_dir_all(dir).map_err(io)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(contents.as_bytes()).map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

/// Runs a validated config and writes both outputs. Nothing is written if
/// the computation fails.
pub fn run(cfg: &ExperimentConfig) -> Result<Outputs> {
    let out = seeding::with_workers(cfg.workers, || execute(cfg))?;
    write_atomic(&cfg.csv_path(), &out.csv(cfg.command))?;
    write_atomic(&cfg.report_path(), &out.report)?;
    Ok(out)
}

/// Entry point of the binary; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let matches = match cli().try_get_matches_from(args) {
        Ok(m) => m,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let result = table_from_matches(&matches).and_then(ExperimentConfig::from_table).and_then(|cfg| {
        let out = run(&cfg)?;
        Ok((cfg, out))
    });
    match result {
        Ok((cfg, out)) => {
            println!("{}: {} rows -> {}", cfg.command, out.rows.len(), cfg.csv_path().display());
            println!("report -> {}", cfg.report_path().display());
            0
        }
        Err(e) => {
            eprintln!("prevlab: {e}");
            if e.is_validation() {
                2
            } else {
                3
            }
        }
    }
}

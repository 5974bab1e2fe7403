use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Shyness,
    Tongues,
    Hopf,
    Sets,
    Convolve,
    Density,
    Dimension,
}

pub const COMMANDS: &[&str] = &["shyness", "tongues", "hopf", "sets", "convolve", "density", "dimension"];

impl FromStr for Command {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "shyness" => Command::Shyness,
            "tongues" => Command::Tongues,
            "hopf" => Command::Hopf,
            "sets" => Command::Sets,
            "convolve" => Command::Convolve,
            "density" => Command::Density,
            "dimension" => Command::Dimension,
            _ => return Err(Error::input(format!("unknown command `{s}`; expected one of {}", COMMANDS.join(", ")))),
        })
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(COMMANDS[*self as usize])
    }
}

/// Parameter keys per command: `(required, optional, inputs)`. Input keys
/// name files (comma separated where several are allowed).
pub(crate) fn keys(cmd: Command) -> (&'static [&'static str], &'static [&'static str], &'static [&'static str]) {
    match cmd {
        Command::Shyness => (
            &["predicate", "probe"],
            &["base", "samples", "radius", "translates", "levels", "samples_per_cell"],
            &["base", "probe"],
        ),
        Command::Tongues => (&["eps"], &["grid", "q_max", "burn_in"], &[]),
        Command::Hopf => (&["family"], &["box", "per_axis"], &["family"]),
        Command::Sets => (&["example"], &["m", "n_max", "csv_n_max", "c", "n", "q_max"], &[]),
        Command::Convolve => (&["measures"], &["box"], &["measures"]),
        Command::Density => (&["set", "grid"], &["family", "family_widths", "family_atoms", "period"], &["set", "family"]),
        Command::Dimension => (&["points", "scales"], &["map", "delta"], &["points", "map"]),
    }
}

/// One experiment: a command, its parameters and input files, the master
/// seed and the output prefix.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub command: Command,
    pub params: BTreeMap<String, String>,
    pub inputs: BTreeMap<String, Vec<PathBuf>>,
    pub seed: u64,
    pub output: PathBuf,
    /// Thread count; 0 picks the default. Never changes results.
    pub workers: usize,
}

/// `key = value` lines; `#` starts a comment.
pub fn parse_config_text(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| Error::parse(i + 1, "expected `key = value`"))?;
        let (k, v) = (k.trim(), v.trim());
        if k.is_empty() {
            return Err(Error::parse(i + 1, "empty key"));
        }
        if out.insert(k.to_string(), v.to_string()).is_some() {
            return Err(Error::parse(i + 1, format!("duplicate key `{k}`")));
        }
    }
    Ok(out)
}

impl ExperimentConfig {
    /// Builds and validates a config from a flat key table holding
    /// `command`, `seed`, `out`, `workers` and the command's parameters.
    /// Predicate parameters for `shyness` use the prefix `p.`.
    pub fn from_table(mut table: BTreeMap<String, String>) -> Result<Self> {
        let command: Command = table.remove("command").ok_or_else(|| Error::input("no command given"))?.parse()?;
        let seed = match table.remove("seed") {
            Some(s) => s.parse().map_err(|_| Error::input(format!("seed must be a nonnegative integer, got `{s}`")))?,
            None => 0,
        };
        let workers = match table.remove("workers") {
            Some(s) => s.parse().map_err(|_| Error::input(format!("workers must be a nonnegative integer, got `{s}`")))?,
            None => 0,
        };
        let output = PathBuf::from(table.remove("out").unwrap_or_else(|| command.to_string()));
        let (required, optional, input_keys) = keys(command);
        for k in table.keys() {
            let known = required.contains(&k.as_str())
                || optional.contains(&k.as_str())
                || (command == Command::Shyness && k.starts_with("p.") && k.len() > 2);
            if !known {
                return Err(Error::input(format!("unknown key `{k}` for command {command}")));
            }
        }
        if let Some(k) = required.iter().find(|k| !table.contains_key(**k)) {
            return Err(Error::input(format!("command {command} requires `{k}`")));
        }
        let mut inputs = BTreeMap::new();
        for &k in input_keys {
            if let Some(v) = table.get(k) {
                let is_builtin = (k == "base" && v == "zero") || (k == "probe" && v.contains(':'));
                if is_builtin {
                    continue;
                }
                let paths: Vec<PathBuf> = v.split(',').map(|p| PathBuf::from(p.trim())).collect();
                if let Some(p) = paths.iter().find(|p| !p.is_file()) {
                    return Err(Error::input(format!("input `{k}`: cannot read {}", p.display())));
                }
                inputs.insert(k.to_string(), paths);
                table.remove(k);
            }
        }
        Ok(ExperimentConfig { command, params: table, inputs, seed, output, workers })
    }

    pub fn report_path(&self) -> PathBuf {
        suffixed(&self.output, ".report.txt")
    }

    pub fn csv_path(&self) -> PathBuf {
        suffixed(&self.output, ".csv")
    }

    pub(crate) fn get(&self, k: &str) -> Option<&str> {
        self.params.get(k).map(String::as_str)
    }

    pub(crate) fn num<T: FromStr>(&self, k: &str, default: T) -> Result<T> {
        match self.get(k) {
            None => Ok(default),
            Some(v) => v.parse().map_err(|_| Error::input(format!("bad value for `{k}`: `{v}`"))),
        }
    }

    pub(crate) fn required<T: FromStr>(&self, k: &str) -> Result<T> {
        let v = self.get(k).ok_or_else(|| Error::input(format!("command {} requires `{k}`", self.command)))?;
        v.parse().map_err(|_| Error::input(format!("bad value for `{k}`: `{v}`")))
    }

    pub(crate) fn list(&self, k: &str) -> Result<Option<Vec<f64>>> {
        self.get(k)
            .map(|v| {
                v.split(',')
                    .map(|t| t.trim().parse::<f64>().map_err(|_| Error::input(format!("bad number in `{k}`: `{t}`"))))
                    .collect()
            })
            .transpose()
    }

    pub(crate) fn input(&self, k: &str) -> Option<&[PathBuf]> {
        self.inputs.get(k).map(Vec::as_slice)
    }
}

fn suffixed(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(pairs: &[(&str, &str)]) -> BTreeMap<String, String> {
        pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
    }

    #[test]
    fn config_text() {
        let t = parse_config_text("# x\ncommand = tongues\n eps=0.3 # comment\n\n").unwrap();
        assert_eq!(t, table(&[("command", "tongues"), ("eps", "0.3")]));
        assert!(parse_config_text("eps 0.3").is_err());
        assert!(parse_config_text("a=1\na=2").is_err());
    }

    #[test]
    fn validation() {
        let c = ExperimentConfig::from_table(table(&[("command", "tongues"), ("eps", "0.3"), ("seed", "4")])).unwrap();
        assert_eq!((c.command, c.seed, c.output.clone()), (Command::Tongues, 4, PathBuf::from("tongues")));
        assert_eq!(c.csv_path(), PathBuf::from("tongues.csv"));
        assert!(ExperimentConfig::from_table(table(&[("command", "tongues")])).is_err());
        assert!(ExperimentConfig::from_table(table(&[("command", "tongues"), ("eps", "1"), ("bogus", "1")])).is_err());
        assert!(ExperimentConfig::from_table(table(&[("command", "nope")])).is_err());
        assert!(ExperimentConfig::from_table(table(&[("command", "hopf"), ("family", "/no/such/file")])).is_err());
        let s = ExperimentConfig::from_table(table(&[
            ("command", "shyness"),
            ("predicate", "half-space"),
            ("probe", "constant:1"),
            ("p.coord", "0"),
        ]))
        .unwrap();
        assert!(s.inputs.is_empty());
        assert_eq!(s.get("p.coord"), Some("0"));
    }
}

//! Line-oriented `key = value` run configuration.
//!
//! Blank lines and lines starting with `#` are ignored. Keys are the long
//! flag names of the subcommands (`degree`, `box`, `margin`, ...); a flag
//! given on the command line wins over the file.

use std::collections::BTreeMap;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Config {
    values: BTreeMap<String, String>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Config> {
        let mut values = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| anyhow!("config line {}: expected `key = value`", i + 1))?;
            let k = k.trim();
            if k.is_empty() {
                bail!("config line {}: empty key", i + 1);
            }
            if values.insert(k.to_string(), v.trim().to_string()).is_some() {
                bail!("config line {}: `{k}` set twice", i + 1);
            }
        }
        Ok(Config { values })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.values.keys().map(String::as_str)
    }

    /// `flag` if given, else the file value for `key`.
    pub fn pick<T: FromStr>(&self, flag: Option<T>, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.get(key) {
            None => Ok(None),
            Some(s) => s
                .parse::<T>()
                .map(Some)
                .map_err(|e| anyhow!("{e}"))
                .with_context(|| format!("config key `{key}`")),
        }
    }

    /// Fails on keys outside `allowed`, so typos do not pass silently.
    pub fn check_keys(&self, allowed: &[&str]) -> Result<()> {
        for k in self.keys() {
            if !allowed.contains(&k) {
                bail!("unknown config key `{k}`");
            }
        }
        Ok(())
    }
}

/// Comma-separated floats.
pub fn parse_list(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|t| t.trim().parse::<f64>().with_context(|| format!("bad number `{}`", t.trim())))
        .collect()
}

/// `lo1,hi1,lo2,hi2,...` into per-axis bounds.
pub fn parse_box(s: &str) -> Result<(Vec<f64>, Vec<f64>)> {
    let v = parse_list(s)?;
    if v.is_empty() || v.len() % 2 != 0 {
        bail!("box needs lo,hi pairs");
    }
    Ok((v.iter().step_by(2).copied().collect(), v.iter().skip(1).step_by(2).copied().collect()))
}

/// `c1,c2;c1,c2;...` into points.
pub fn parse_points(s: &str) -> Result<Vec<Vec<f64>>> {
    s.split(';').filter(|t| !t.trim().is_empty()).map(parse_list).collect()
}

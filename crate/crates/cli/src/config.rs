//! Flat key=value run configuration for the moments command.

use std::fmt::Write as _;
use std::path::PathBuf;

use hecke_core::moments::{ScanConfig, DEFAULT_SCAN_TOL};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub grid: Vec<u64>,
    pub tol: f64,
    pub workers: usize,
    pub primary_only: bool,
    pub stretch: bool,
    pub timing: bool,
    pub out: PathBuf,
    pub json: bool,
    pub plot: bool,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            grid: vec![100, 1_000, 10_000],
            tol: DEFAULT_SCAN_TOL,
            workers: 1,
            primary_only: false,
            stretch: false,
            timing: false,
            out: PathBuf::from("."),
            json: true,
            plot: true,
            seed: 0,
        }
    }
}

fn parse_bool(key: &str, v: &str) -> Result<bool, String> {
    match v {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        _ => Err(format!("{key}: expected a boolean, got {v:?}")),
    }
}

/// One grid point; accepts `1000` or `1e3`.
pub fn parse_x(t: &str) -> Result<u64, String> {
    let t = t.trim();
    t.parse::<u64>()
        .or_else(|_| match t.parse::<f64>() {
            Ok(x) if x >= 0.0 && x.fract() == 0.0 && x < 1.8e19 => Ok(x as u64),
            _ => Err(()),
        })
        .map_err(|_| format!("cannot parse grid point {t:?}"))
}

pub fn parse_grid(v: &str) -> Result<Vec<u64>, String> {
    v.split(',').map(parse_x).collect()
}

impl RunConfig {
    /// Apply `key = value` lines; `#` starts a comment.
    pub fn apply_text(&mut self, text: &str) -> Result<(), String> {
        for (no, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| format!("line {}: expected key = value", no + 1))?;
            self.set(k.trim(), v.trim())
                .map_err(|e| format!("line {}: {e}", no + 1))?;
        }
        Ok(())
    }

    pub fn set(&mut self, key: &str, v: &str) -> Result<(), String> {
        let num = |what: &str| format!("{key}: cannot parse {what} from {v:?}");
        match key {
            "grid" => self.grid = parse_grid(v)?,
            "tol" => self.tol = v.parse().map_err(|_| num("a number"))?,
            "workers" => self.workers = v.parse().map_err(|_| num("an integer"))?,
            "primary_only" => self.primary_only = parse_bool(key, v)?,
            "stretch" => self.stretch = parse_bool(key, v)?,
            "timing" => self.timing = parse_bool(key, v)?,
            "out" => self.out = PathBuf::from(v),
            "json" => self.json = parse_bool(key, v)?,
            "plot" => self.plot = parse_bool(key, v)?,
            "seed" => self.seed = v.parse().map_err(|_| num("an integer"))?,
            _ => return Err(format!("unknown key {key:?}")),
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let grid: Vec<String> = self.grid.iter().map(u64::to_string).collect();
        let mut s = String::new();
        let _ = writeln!(s, "grid = {}", grid.join(","));
        let _ = writeln!(s, "tol = {:e}", self.tol);
        let _ = writeln!(s, "workers = {}", self.workers);
        let _ = writeln!(s, "primary_only = {}", self.primary_only);
        let _ = writeln!(s, "stretch = {}", self.stretch);
        let _ = writeln!(s, "timing = {}", self.timing);
        let _ = writeln!(s, "out = {}", self.out.display());
        let _ = writeln!(s, "json = {}", self.json);
        let _ = writeln!(s, "plot = {}", self.plot);
        let _ = writeln!(s, "seed = {}", self.seed);
        s
    }

    pub fn scan(&self) -> ScanConfig {
        ScanConfig {
            grid: self.grid.clone(),
            tol: self.tol,
            primary_only: self.primary_only,
            workers: self.workers,
            stretch: self.stretch,
            record_timing: self.timing,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let mut c = RunConfig {
            grid: vec![10, 200],
            tol: 1e-9,
            workers: 3,
            primary_only: true,
            out: PathBuf::from("/tmp/x"),
            ..RunConfig::default()
        };
        let text = c.to_text();
        let mut d = RunConfig::default();
        d.apply_text(&text).unwrap();
        assert_eq!(c, d);
        c.apply_text("# comment\n\n workers = 5 # trailing\n").unwrap();
        assert_eq!(c.workers, 5);
    }

    #[test]
    fn errors() {
        let mut c = RunConfig::default();
        assert!(c.apply_text("nope = 1").is_err());
        assert!(c.apply_text("workers").is_err());
        assert!(c.apply_text("stretch = maybe").is_err());
        assert_eq!(parse_grid("1e2, 1000").unwrap(), vec![100, 1000]);
    }
}

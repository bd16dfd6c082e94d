// Copyright 2026 The otto-dbn Authors
// SPDX-License-Identifier: Apache-2.0

//! Output directory, artifact bookkeeping, metadata sidecars and exit codes.

use std::fmt;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde::Serialize;
use serde_json::json;

use otto_dbn::cycle::Regime;
use otto_dbn::scan::io;
use otto_dbn::scan::{ScanOptions, ScanTable};
use otto_dbn::OttoError;

use crate::config::RunConfig;

pub const GIT_DESCRIBE: &str = env!("OTTO_DBN_GIT_DESCRIBE");

#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Convergence(String),
    Strict(String),
    Validation(String),
    Runtime(String),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Convergence(_) => 3,
            Failure::Strict(_) => 4,
            Failure::Validation(_) | Failure::Runtime(_) => 1,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) => write!(f, "usage: {m}"),
            Failure::Convergence(m) => write!(f, "convergence: {m}"),
            Failure::Strict(m) => write!(f, "strict check failed: {m}"),
            Failure::Validation(m) => write!(f, "validation failed: {m}"),
            Failure::Runtime(m) => write!(f, "{m}"),
        }
    }
}

impl From<OttoError> for Failure {
    fn from(e: OttoError) -> Self {
        match e {
            OttoError::InvalidConfig(_) => Failure::Usage(e.to_string()),
            _ if e.is_convergence_failure() => Failure::Convergence(e.to_string()),
            _ => Failure::Runtime(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

fn unix_now() -> f64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs_f64())
        .unwrap_or(0.0)
}

pub struct Context {
    pub cfg: RunConfig,
    pub out: PathBuf,
    pub regime: Option<Regime>,
    pub strict: bool,
    artifacts: Vec<String>,
    tables: Vec<serde_json::Value>,
    started_unix: f64,
    clock: Instant,
}

impl Context {
    pub fn new(cfg: RunConfig, out: PathBuf, regime: Option<Regime>, strict: bool) -> Result<Self, Failure> {
        std::fs::create_dir_all(&out)
            .map_err(|e| Failure::Usage(format!("cannot create output directory {}: {e}", out.display())))?;
        Ok(Context {
            cfg,
            out,
            regime,
            strict,
            artifacts: Vec::new(),
            tables: Vec::new(),
            started_unix: unix_now(),
            clock: Instant::now(),
        })
    }

    pub fn scan_options(&self) -> ScanOptions {
        ScanOptions::with_workers(self.cfg.workers)
    }

    fn register(&mut self, name: &str) -> PathBuf {
        self.artifacts.push(name.to_string());
        self.out.join(name)
    }

    pub fn write_json<T: Serialize + ?Sized>(&mut self, name: &str, value: &T) -> Result<PathBuf, Failure> {
        let p = self.register(name);
        io::write_json(&p, value)?;
        Ok(p)
    }

    pub fn write_table(&mut self, name: &str, table: &ScanTable) -> Result<PathBuf, Failure> {
        let p = self.register(name);
        io::write_table_file(table, &p)?;
        self.tables.push(json!({
            "file": name,
            "grid": table.grid,
            "base": table.base,
            "rows": table.rows.len(),
            "provenance": table.provenance,
        }));
        Ok(p)
    }

    pub fn write_numeric_csv(&mut self, name: &str, header: &[&str], rows: Vec<Vec<f64>>) -> Result<PathBuf, Failure> {
        let p = self.register(name);
        io::write_numeric_csv(&p, header, rows)?;
        Ok(p)
    }

    /// Writes `<stem>.meta.json` and the resolved `<stem>.config.toml`.
    pub fn finish(&mut self, stem: &str, command: &str) -> Result<(), Failure> {
        let toml = self.cfg.to_toml().map_err(|e| Failure::Runtime(e.to_string()))?;
        let cfg_name = format!("{stem}.config.toml");
        std::fs::write(self.out.join(&cfg_name), toml)?;
        self.artifacts.push(cfg_name.clone());
        let meta = json!({
            "command": command,
            "argv": std::env::args().collect::<Vec<_>>(),
            "version": env!("CARGO_PKG_VERSION"),
            "git_describe": GIT_DESCRIBE,
            "config": self.cfg,
            "config_file": cfg_name,
            "regime": self.regime.map(|r| r.name()),
            "strict": self.strict,
            "started_unix": self.started_unix,
            "finished_unix": unix_now(),
            "wall_seconds": self.clock.elapsed().as_secs_f64(),
            "tables": self.tables,
            "artifacts": self.artifacts,
        });
        io::write_json(&self.out.join(format!("{stem}.meta.json")), &meta)?;
        Ok(())
    }

    pub fn out_path(&self) -> &Path {
        &self.out
    }
}

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Parameters of a front simulation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    /// Right end of the space domain `[0, lx]`.
    pub lx: f64,
    /// Upper end of the trait domain `[1, theta_max]`.
    pub theta_max: f64,
    pub nx: usize,
    pub ntheta: usize,
    pub t_end: f64,
    pub h0: f64,
    pub h_min: f64,
    pub h_max: f64,
    pub tol_step: f64,
    /// Initial data is `amplitude` on `[0, x0_extent] × [1, 1 + theta0_extent]`.
    pub x0_extent: f64,
    pub theta0_extent: f64,
    pub amplitude: f64,
    /// Time between diagnostics records.
    pub diag_interval: f64,
    /// Time between field snapshots; `0` writes only the final state.
    pub snapshot_interval: f64,
    /// The run stops once the front passes this fraction of `lx`.
    pub front_stop: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            lx: 2000.0,
            theta_max: 100.0,
            nx: 768,
            ntheta: 192,
            t_end: 60.0,
            h0: 1e-3,
            h_min: 1e-9,
            h_max: 1.0,
            tol_step: 1e-4,
            x0_extent: 10.0,
            theta0_extent: 1.0,
            amplitude: 1.0,
            diag_interval: 0.5,
            snapshot_interval: 0.0,
            front_stop: 0.8,
        }
    }
}

impl SimConfig {
    /// Parses `key = value` lines over the defaults. Blank lines and lines
    /// starting with `#` are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = SimConfig::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected key = value", lineno + 1))
            })?;
            cfg.set(key.trim(), value.trim())
                .map_err(|e| Error::Config(format!("line {}: {e}", lineno + 1)))?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    fn set(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        fn real(v: &str) -> std::result::Result<f64, String> {
            v.parse().map_err(|_| format!("`{v}` is not a number"))
        }
        fn count(v: &str) -> std::result::Result<usize, String> {
            v.parse().map_err(|_| format!("`{v}` is not a nonnegative integer"))
        }
        match key {
            "lx" => self.lx = real(value)?,
            "theta_max" => self.theta_max = real(value)?,
            "nx" => self.nx = count(value)?,
            "ntheta" => self.ntheta = count(value)?,
            "t_end" => self.t_end = real(value)?,
            "h0" => self.h0 = real(value)?,
            "h_min" => self.h_min = real(value)?,
            "h_max" => self.h_max = real(value)?,
            "tol_step" => self.tol_step = real(value)?,
            "x0_extent" => self.x0_extent = real(value)?,
            "theta0_extent" => self.theta0_extent = real(value)?,
            "amplitude" => self.amplitude = real(value)?,
            "diag_interval" => self.diag_interval = real(value)?,
            "snapshot_interval" => self.snapshot_interval = real(value)?,
            "front_stop" => self.front_stop = real(value)?,
            _ => return Err(format!("unknown key `{key}`")),
        }
        Ok(())
    }

    /// Renders the configuration in the format accepted by [`SimConfig::parse`].
    pub fn to_text(&self) -> String {
        format!(
            "lx = {}\ntheta_max = {}\nnx = {}\nntheta = {}\nt_end = {}\nh0 = {}\nh_min = {}\n\
             h_max = {}\ntol_step = {}\nx0_extent = {}\ntheta0_extent = {}\namplitude = {}\n\
             diag_interval = {}\nsnapshot_interval = {}\nfront_stop = {}\n",
            self.lx,
            self.theta_max,
            self.nx,
            self.ntheta,
            self.t_end,
            self.h0,
            self.h_min,
            self.h_max,
            self.tol_step,
            self.x0_extent,
            self.theta0_extent,
            self.amplitude,
            self.diag_interval,
            self.snapshot_interval,
            self.front_stop
        )
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if !(self.lx > 0.0 && self.theta_max > 1.0) {
            return bad(format!("domain [0, {}] × [1, {}] is empty", self.lx, self.theta_max));
        }
        if self.nx < 3 || self.ntheta < 3 {
            return bad(format!("grid {}×{} is too small", self.nx, self.ntheta));
        }
        if !(self.t_end > 0.0) {
            return bad(format!("t_end = {} must be positive", self.t_end));
        }
        if !(self.h_min > 0.0 && self.h_min <= self.h0 && self.h0 <= self.h_max) {
            return bad(format!(
                "need 0 < h_min ≤ h0 ≤ h_max, got {} / {} / {}",
                self.h_min, self.h0, self.h_max
            ));
        }
        if !(self.tol_step > 0.0) {
            return bad(format!("tol_step = {} must be positive", self.tol_step));
        }
        if !(self.x0_extent > 0.0 && self.theta0_extent > 0.0 && self.amplitude > 0.0) {
            return bad("initial data extents and amplitude must be positive".into());
        }
        if !(self.diag_interval > 0.0) || !(self.snapshot_interval >= 0.0) {
            return bad("output intervals must be positive".into());
        }
        if !(self.front_stop > 0.0 && self.front_stop <= 1.0) {
            return bad(format!("front_stop = {} must lie in (0, 1]", self.front_stop));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips_through_text() {
        let cfg = SimConfig {
            nx: 64,
            tol_step: 3e-5,
            ..SimConfig::default()
        };
        assert_eq!(SimConfig::parse(&cfg.to_text()).unwrap(), cfg);
    }

    #[test]
    fn reports_bad_lines() {
        assert!(SimConfig::parse("nx = 12\nfoo = 1\n").is_err());
        assert!(SimConfig::parse("nx 12\n").is_err());
        assert!(SimConfig::parse("h0 = 10\n").is_err());
        let cfg = SimConfig::parse("# comment\n\n t_end = 5 \n").unwrap();
        assert_eq!(cfg.t_end, 5.0);
    }
}

//! Flat key-value run configuration and its content hash.

use mhd_core::params::ParamSet;
use mhd_core::{Error, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::fs;
use std::path::{Path, PathBuf};

/// Every key is optional; missing keys take the desk defaults.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub a: u64,
    pub b: u64,
    pub beta: f64,
    pub eta: f64,
    pub c_u: f64,
    pub c_b: f64,
    pub q_max: usize,
    pub grid_points_per_axis: usize,
    pub time_slices: usize,
    pub t_final_nondim: f64,
    pub t_pad_nondim: f64,
    pub strict_products: bool,
    pub strict_regime: bool,
    pub force_unresolved: bool,
    pub dump_fields: bool,
    pub emit_vtk: bool,
    pub output_dir: PathBuf,
    /// Allowed weak residual as a multiple of its time-differencing estimate.
    pub residual_tolerance_factor: f64,
    pub identity_tolerance_abs: f64,
    pub oracle_slope_tolerance: f64,
    pub oracle_seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        let p = ParamSet::default();
        RunConfig {
            a: p.a,
            b: p.b,
            beta: p.beta,
            eta: p.eta,
            c_u: p.c_u,
            c_b: p.c_b,
            q_max: p.q_max,
            grid_points_per_axis: p.grid_n,
            time_slices: p.time_n,
            t_final_nondim: p.t_final,
            t_pad_nondim: p.t_pad,
            strict_products: false,
            strict_regime: false,
            force_unresolved: true,
            dump_fields: false,
            emit_vtk: false,
            output_dir: PathBuf::from("mhd-out"),
            residual_tolerance_factor: 10.0,
            identity_tolerance_abs: 1e-10,
            oracle_slope_tolerance: 0.05,
            oracle_seed: 1,
        }
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let c: RunConfig =
            toml::from_str(text).map_err(|e| Error::Config(e.message().to_string()))?;
        c.check()?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn check(&self) -> Result<()> {
        for (name, v) in [
            ("residual_tolerance_factor", self.residual_tolerance_factor),
            ("identity_tolerance_abs", self.identity_tolerance_abs),
            ("oracle_slope_tolerance", self.oracle_slope_tolerance),
        ] {
            if !(v > 0.0) {
                return Err(Error::Config(format!("{name} must be positive")));
            }
        }
        self.params().check()
    }

    pub fn params(&self) -> ParamSet {
        ParamSet {
            a: self.a,
            b: self.b,
            beta: self.beta,
            eta: self.eta,
            c_u: self.c_u,
            c_b: self.c_b,
            q_max: self.q_max,
            grid_n: self.grid_points_per_axis,
            time_n: self.time_slices,
            t_final: self.t_final_nondim,
            t_pad: self.t_pad_nondim,
            strict: self.strict_regime,
        }
    }

    /// SHA-256 of the canonical serialization. The output location does not
    /// change the computation and is left out.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.output_dir = PathBuf::new();
        let text = toml::to_string(&c).expect("config serializes");
        Sha256::digest(text.as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }

    /// Create the output directory and confirm it accepts files.
    pub fn ensure_output_dir(&self) -> Result<()> {
        let probe = self.output_dir.join(".write-probe");
        fs::create_dir_all(&self.output_dir)
            .and_then(|_| fs::write(&probe, b""))
            .and_then(|_| fs::remove_file(&probe))
            .map_err(|e| {
                Error::Config(format!(
                    "output_dir {} is not writable: {e}",
                    self.output_dir.display()
                ))
            })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_is_default() {
        assert_eq!(RunConfig::parse("").unwrap(), RunConfig::default());
    }

    #[test]
    fn unknown_key_rejected() {
        assert!(matches!(
            RunConfig::parse("grid_n = 8"),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn hash_ignores_output_dir_only() {
        let a = RunConfig::parse("output_dir = \"x\"").unwrap();
        let b = RunConfig::parse("output_dir = \"y\"").unwrap();
        assert_eq!(a.hash(), b.hash());
        let c = RunConfig::parse("output_dir = \"x\"\na = 17").unwrap();
        assert_ne!(a.hash(), c.hash());
        assert_eq!(a.hash().len(), 64);
    }

    #[test]
    fn nonpositive_tolerance_rejected() {
        assert!(RunConfig::parse("identity_tolerance_abs = 0.0").is_err());
    }
}

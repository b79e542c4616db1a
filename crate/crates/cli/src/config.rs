use std::path::Path;

use metamorph_core::metamorph::{Tolerances, TransformContext};
use metamorph_core::signals::{Discretization, Hbar, Normalization};
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Contents of `--config run.json`; every field is optional.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Overrides the ħ carried by input files when set.
    pub hbar: Option<f64>,
    pub n: usize,
    pub window: f64,
    pub b: f64,
    pub r: f64,
    pub h_b: f64,
    pub h_r: f64,
    pub tolerances: Tolerances,
    pub normalization: Normalization,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            hbar: None,
            n: 512,
            window: 8.0,
            b: 0.0,
            r: 1.0,
            h_b: 1e-3,
            h_r: 1e-3,
            tolerances: Tolerances::default(),
            normalization: Normalization::Default,
        }
    }
}

impl RunConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let cfg = match path {
            None => Self::default(),
            Some(p) => {
                let text = crate::read(p)?;
                serde_json::from_str(&text).map_err(|e| CliError::invalid(format!("{}: {e}", p.display())))?
            }
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        Discretization::new(self.n, self.window)?;
        if let Some(h) = self.hbar {
            Hbar::new(h)?;
        }
        if !(self.r > 0.0) {
            return Err(CliError::invalid(format!("r must be positive, got {}", self.r)));
        }
        if !(self.h_b > 0.0 && self.h_r > 0.0) {
            return Err(CliError::invalid(format!("steps must be positive, got h_b={}, h_r={}", self.h_b, self.h_r)));
        }
        Ok(())
    }

    /// ħ for a run whose input files carry `found`.
    pub fn resolve_hbar(&self, found: Option<Hbar>) -> Result<Hbar, CliError> {
        match (self.hbar, found) {
            (Some(h), Some(f)) if h != f.get() => {
                Err(CliError::invalid(format!("input has hbar = {}, but the run config sets hbar = {h}", f.get())))
            }
            (Some(h), _) => Ok(Hbar::new(h)?),
            (None, Some(f)) => Ok(f),
            (None, None) => Ok(Hbar::default()),
        }
    }

    pub fn context(&self, hbar: Hbar) -> Result<TransformContext, CliError> {
        Ok(TransformContext::new(hbar, Discretization::new(self.n, self.window)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partial_config_keeps_defaults() {
        let cfg: RunConfig = serde_json::from_str(r#"{"n": 256, "tolerances": {"c1": 1e-5}}"#).unwrap();
        assert_eq!(cfg.n, 256);
        assert_eq!(cfg.window, 8.0);
        assert_eq!(cfg.tolerances.c1, 1e-5);
        assert_eq!(cfg.tolerances.c2, 1e-4);
        assert!(serde_json::from_str::<RunConfig>(r#"{"grid": 3}"#).is_err());
    }

    #[test]
    fn invalid_configs_are_rejected() {
        for bad in [
            RunConfig { n: 500, ..RunConfig::default() },
            RunConfig { window: 0.0, ..RunConfig::default() },
            RunConfig { r: -1.0, ..RunConfig::default() },
            RunConfig { hbar: Some(0.0), ..RunConfig::default() },
        ] {
            assert!(bad.validate().is_err(), "{bad:?}");
        }
    }

    #[test]
    fn hbar_resolution() {
        let cfg = RunConfig::default();
        let h = Hbar::new(0.5).unwrap();
        assert_eq!(cfg.resolve_hbar(Some(h)).unwrap(), h);
        let fixed = RunConfig { hbar: Some(2.0), ..cfg };
        assert!(fixed.resolve_hbar(Some(h)).is_err());
        assert_eq!(fixed.resolve_hbar(None).unwrap().get(), 2.0);
    }
}

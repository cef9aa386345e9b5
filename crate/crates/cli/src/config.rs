//! Settings resolution: flags beat the config file, which beats defaults.

use std::path::Path;

use serde::Deserialize;
use smolbgk::oracle::OracleConfig;
use smolbgk::QuadConfig;

use crate::failure::Failure;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    #[serde(default)]
    pub quad: Option<QuadConfig>,
    #[serde(default)]
    pub oracle: Option<OracleConfig>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, Failure> {
        let Some(path) = path else {
            return Ok(FileConfig::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::Io(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| Failure::Usage(format!("bad config {}: {e}", path.display())))
    }

    pub fn quad(&self, quad_tol: Option<f64>) -> Result<QuadConfig, Failure> {
        let mut q = self.quad.unwrap_or_default();
        if let Some(t) = quad_tol {
            q.abs_tol = t;
            q.rel_tol = t;
        }
        q.validate().map_err(|e| Failure::Usage(e.to_string()))?;
        Ok(q)
    }

    pub fn oracle(
        &self,
        n_mu: Option<usize>,
        n_x: Option<usize>,
        x_max: Option<f64>,
    ) -> Result<OracleConfig, Failure> {
        let mut c = self.oracle.unwrap_or_default();
        if let Some(n) = n_mu {
            c.n_mu = n;
        }
        if let Some(n) = n_x {
            c.n_x = n;
        }
        if let Some(x) = x_max {
            // Keep the fit window at the same fractions of the domain.
            let scale = x / c.x_max;
            c.fit_window = (c.fit_window.0 * scale, c.fit_window.1 * scale);
            c.x_max = x;
        }
        c.validate_production()
            .map_err(|e| Failure::Usage(e.to_string()))?;
        Ok(c)
    }
}

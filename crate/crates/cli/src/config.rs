//! Run configuration: a JSON document where every key is optional.

use std::path::{Path, PathBuf};

use ptscatter_core::{
    BigGammaConvention, DimerFamily, DimerParams, EnergyWindow, FitBand, HBAR2_OVER_2M_ELECTRON,
};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Geometry {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub v_barrier: f64,
    pub v_prime: f64,
}

impl Default for Geometry {
    fn default() -> Self {
        let p = DimerParams::reference();
        Self {
            a: p.a,
            b: p.b,
            c: p.c,
            v_barrier: p.v_barrier,
            v_prime: p.v_prime,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Convention {
    #[default]
    Identity,
    Formula,
}

impl From<Convention> for BigGammaConvention {
    fn from(c: Convention) -> Self {
        match c {
            Convention::Identity => BigGammaConvention::Identity,
            Convention::Formula => BigGammaConvention::Formula,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WindowConfig {
    pub e_min: f64,
    pub e_max: f64,
    pub n_points: usize,
}

impl Default for WindowConfig {
    fn default() -> Self {
        let w = EnergyWindow::default();
        Self {
            e_min: w.e_min,
            e_max: w.e_max,
            n_points: ptscatter_core::spectrum::DEFAULT_SWEEP_POINTS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WavefunctionConfig {
    pub n_points: usize,
    pub lead_padding: f64,
}

impl Default for WavefunctionConfig {
    fn default() -> Self {
        Self {
            n_points: 2001,
            lead_padding: ptscatter_core::wavefield::DEFAULT_LEAD_PADDING,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PhasesConfig {
    pub n_bins: usize,
    /// Half-width around ±π used for the concentration summary.
    pub pi_radius: f64,
}

impl Default for PhasesConfig {
    fn default() -> Self {
        Self {
            n_bins: ptscatter_core::phases::DEFAULT_HISTOGRAM_BINS,
            pi_radius: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EpConfig {
    pub gamma_lo: f64,
    pub gamma_hi: f64,
    pub tol_gamma: f64,
    pub trace_points: usize,
    /// The trace spans γ ∈ [0, trace_extent · γ_EP].
    pub trace_extent: f64,
    pub fit_min_detuning: f64,
    pub fit_max_detuning: f64,
}

impl Default for EpConfig {
    fn default() -> Self {
        let band = FitBand::default();
        Self {
            gamma_lo: 0.0,
            gamma_hi: 0.03,
            tol_gamma: ptscatter_core::eptrace::DEFAULT_TOL_GAMMA,
            trace_points: 121,
            trace_extent: 1.1,
            fit_min_detuning: band.min_detuning,
            fit_max_detuning: band.max_detuning,
        }
    }
}

impl EpConfig {
    pub fn band(&self) -> FitBand {
        FitBand {
            min_detuning: self.fit_min_detuning,
            max_detuning: self.fit_max_detuning,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub geometry: Geometry,
    pub hbar2_over_2m: f64,
    /// Gain/loss strengths γ in eV; defaults to `[0.0]`.
    pub gammas: Option<Vec<f64>>,
    /// Alternative to `gammas`, converted through the Γ convention.
    pub big_gammas: Option<Vec<f64>>,
    pub big_gamma_convention: Convention,
    /// Reference energy of the Γ map; defaults to the Hermitian doublet mean.
    pub energy_ref: Option<f64>,
    pub window: WindowConfig,
    /// Peak prominence threshold relative to the largest γ = 0 transmission.
    pub prominence_rel: f64,
    pub wavefunction: WavefunctionConfig,
    pub phases: PhasesConfig,
    pub ep: EpConfig,
    pub out_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            geometry: Geometry::default(),
            hbar2_over_2m: HBAR2_OVER_2M_ELECTRON,
            gammas: None,
            big_gammas: None,
            big_gamma_convention: Convention::default(),
            energy_ref: None,
            window: WindowConfig::default(),
            prominence_rel: ptscatter_core::spectrum::DEFAULT_PROMINENCE_REL,
            wavefunction: WavefunctionConfig::default(),
            phases: PhasesConfig::default(),
            ep: EpConfig::default(),
            out_dir: PathBuf::from("out"),
        }
    }
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let config: Self = serde_json::from_str(text)
            .map_err(|e| invalid(format!("line {}, column {}: {e}", e.line(), e.column())))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| invalid(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text).map_err(|e| match e {
            CliError::Config(msg) => invalid(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn params(&self) -> DimerParams {
        DimerParams {
            a: self.geometry.a,
            b: self.geometry.b,
            c: self.geometry.c,
            v_barrier: self.geometry.v_barrier,
            v_prime: self.geometry.v_prime,
            gamma: 0.0,
        }
    }

    pub fn family(&self) -> Result<DimerFamily, CliError> {
        DimerFamily::new(self.params(), self.hbar2_over_2m)
            .map_err(|e| invalid(format!("geometry: {e}")))
    }

    pub fn energy_window(&self) -> Result<EnergyWindow, CliError> {
        EnergyWindow::new(self.window.e_min, self.window.e_max)
            .map_err(|e| invalid(format!("window: {e}")))
    }

    /// Checks every value that can be checked without running a sweep.
    pub fn validate(&self) -> Result<(), CliError> {
        self.family()?;
        self.energy_window()?;
        if self.window.n_points < 3 {
            return Err(invalid(format!(
                "window.n_points must be at least 3, got {}",
                self.window.n_points
            )));
        }
        if self.gammas.is_some() && self.big_gammas.is_some() {
            return Err(invalid("set either gammas or big_gammas, not both"));
        }
        for (key, list) in [("gammas", &self.gammas), ("big_gammas", &self.big_gammas)] {
            if let Some(list) = list {
                if list.is_empty() {
                    return Err(invalid(format!("{key} must not be empty")));
                }
                if let Some(v) = list.iter().find(|v| !v.is_finite()) {
                    return Err(invalid(format!("{key} contains non-finite value {v}")));
                }
            }
        }
        if let Some(list) = &self.big_gammas {
            if let Some(v) = list.iter().find(|&&v| v < 0.0) {
                return Err(invalid(format!("big_gammas contains negative value {v}")));
            }
        }
        if let Some(e) = self.energy_ref {
            if !(e.is_finite() && e > self.geometry.v_prime) {
                return Err(invalid(format!(
                    "energy_ref must be finite and above v_prime, got {e}"
                )));
            }
        }
        if !(self.prominence_rel.is_finite() && self.prominence_rel > 0.0) {
            return Err(invalid(format!(
                "prominence_rel must be finite and positive, got {}",
                self.prominence_rel
            )));
        }
        if self.wavefunction.n_points < 14 {
            return Err(invalid(format!(
                "wavefunction.n_points must be at least 14, got {}",
                self.wavefunction.n_points
            )));
        }
        if !(self.wavefunction.lead_padding.is_finite() && self.wavefunction.lead_padding >= 0.0) {
            return Err(invalid(
                "wavefunction.lead_padding must be finite and non-negative",
            ));
        }
        if self.phases.n_bins < 2 {
            return Err(invalid(format!(
                "phases.n_bins must be at least 2, got {}",
                self.phases.n_bins
            )));
        }
        if !(self.phases.pi_radius > 0.0 && self.phases.pi_radius <= std::f64::consts::PI) {
            return Err(invalid("phases.pi_radius must lie in (0, pi]"));
        }
        let ep = &self.ep;
        if !(ep.gamma_lo.is_finite() && ep.gamma_hi.is_finite() && ep.gamma_lo < ep.gamma_hi) {
            return Err(invalid(format!(
                "ep needs gamma_lo < gamma_hi, got [{}, {}]",
                ep.gamma_lo, ep.gamma_hi
            )));
        }
        if !(ep.tol_gamma > 0.0 && ep.tol_gamma.is_finite()) {
            return Err(invalid("ep.tol_gamma must be finite and positive"));
        }
        if ep.trace_points < 2 {
            return Err(invalid("ep.trace_points must be at least 2"));
        }
        if !(ep.trace_extent > 0.0 && ep.trace_extent.is_finite()) {
            return Err(invalid("ep.trace_extent must be finite and positive"));
        }
        if !(0.0 <= ep.fit_min_detuning && ep.fit_min_detuning < ep.fit_max_detuning) {
            return Err(invalid("ep needs 0 <= fit_min_detuning < fit_max_detuning"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_gives_defaults() {
        assert_eq!(RunConfig::from_json("{}").unwrap(), RunConfig::default());
    }

    #[test]
    fn unknown_keys_are_rejected_with_position() {
        let err =
            RunConfig::from_json("{\n  \"geometry\": {\"a\": 1.0, \"d\": 2.0}\n}").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("unknown field `d`"), "{msg}");
        assert!(msg.contains("line 2"), "{msg}");
    }

    #[test]
    fn empty_gamma_list_is_rejected() {
        let err = RunConfig::from_json(r#"{"gammas": []}"#).unwrap_err();
        assert!(matches!(err, CliError::Config(_)));
    }

    #[test]
    fn invalid_values_are_rejected() {
        for doc in [
            r#"{"geometry": {"a": -1.0}}"#,
            r#"{"window": {"e_min": 0.3, "e_max": 0.2}}"#,
            r#"{"phases": {"n_bins": 1}}"#,
            r#"{"gammas": [0.0], "big_gammas": [0.0]}"#,
            r#"{"ep": {"gamma_lo": 0.03, "gamma_hi": 0.01}}"#,
            r#"{"prominence_rel": 0.0}"#,
            r#"{"big_gamma_convention": "other"}"#,
        ] {
            assert!(RunConfig::from_json(doc).is_err(), "{doc}");
        }
    }

    #[test]
    fn round_trips_through_json() {
        let config = RunConfig {
            gammas: Some(vec![0.0, 0.01]),
            big_gamma_convention: Convention::Formula,
            ..RunConfig::default()
        };
        let text = serde_json::to_string(&config).unwrap();
        assert_eq!(RunConfig::from_json(&text).unwrap(), config);
    }
}

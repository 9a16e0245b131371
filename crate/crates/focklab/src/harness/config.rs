//! Human-editable experiment configuration: a TOML file with nested
//! sections. Complex numbers and polynomials use the coefficient-list
//! grammar of the symbol parser, kept as strings here and parsed on use.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::operator::OperatorKind;
use crate::poly::{parse_complex, Poly};
use crate::spectrum::DiagnosticThresholds;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Weight parameter of the space.
    pub alpha: f64,
    /// Schatten exponent.
    pub p: f64,
    /// Operator kind token (`vg`, `ig`, `mg`, `igpsi`, `cgpsi`, `vgup`, `cgup`).
    pub op: String,
    /// Symbol g as a coefficient list, lowest degree first.
    pub g: String,
    /// Symbol ψ as a coefficient list; empty string means absent.
    pub psi: String,
    /// Truncation sizes for convergence diagnostics.
    pub sizes: Vec<usize>,
    /// Quadrature tolerance.
    pub tol: f64,
    pub sweep: SweepConfig,
    pub output: OutputConfig,
    pub thresholds: ThresholdConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            alpha: 1.0,
            p: 2.0,
            op: "igpsi".to_string(),
            g: "0,1".to_string(),
            psi: "0,0.5".to_string(),
            sizes: vec![32, 64, 128],
            tol: 1e-9,
            sweep: SweepConfig::default(),
            output: OutputConfig::default(),
            thresholds: ThresholdConfig::default(),
        }
    }
}

/// Symbol sweeps used by the scaling checks.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    /// Slopes `a` for the family ψ = a·z (complex literals).
    pub a_values: Vec<String>,
    /// Scalings `c` for g → c·g (complex literals).
    pub c_scalings: Vec<String>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            a_values: vec!["0.3".into(), "0.5".into(), "0.7".into()],
            c_scalings: vec!["2".into(), "5i".into()],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    /// Report path; empty writes nowhere (stdout summary only).
    pub path: String,
    /// `csv` or `json`.
    pub format: String,
    /// `none` zeroes the runtime column so identical configs produce
    /// byte-identical reports; `wall` records measured milliseconds.
    pub timing: String,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            path: String::new(),
            format: "csv".to_string(),
            timing: "none".to_string(),
        }
    }
}

/// Heuristic thresholds, all recorded into every result record.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ThresholdConfig {
    /// Relative plateau for convergence verdicts.
    pub plateau: f64,
    /// Log-log slope above which power sums count as diverging.
    pub slope: f64,
    /// Consecutive non-decaying annuli that trigger a divergence verdict.
    pub annulus_trigger: usize,
    /// Acceptable band for ratio diagnostics of two-sided estimates.
    pub ratio_band: [f64; 2],
}

impl Default for ThresholdConfig {
    fn default() -> Self {
        ThresholdConfig {
            plateau: 1e-8,
            slope: 0.05,
            annulus_trigger: 3,
            ratio_band: [1e-3, 1e3],
        }
    }
}

impl ThresholdConfig {
    pub fn diagnostics(&self) -> DiagnosticThresholds {
        DiagnosticThresholds {
            plateau_rtol: self.plateau,
            slope_threshold: self.slope,
        }
    }
}

/// A config field failed validation, with the field path and the complaint.
#[derive(Clone, Debug, PartialEq)]
pub struct ConfigError {
    pub field: String,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config field `{}`: {}", self.field, self.message)
    }
}

impl std::error::Error for ConfigError {}

fn err(field: &str, message: impl Into<String>) -> ConfigError {
    ConfigError {
        field: field.to_string(),
        message: message.into(),
    }
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let cfg: ExperimentConfig =
            toml::from_str(text).map_err(|e| err("<toml>", e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn serialize(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.alpha.is_finite() && self.alpha > 0.0) {
            return Err(err("alpha", format!("must be positive, got {}", self.alpha)));
        }
        if !(self.p.is_finite() && self.p > 0.0) {
            return Err(err("p", format!("must be positive, got {}", self.p)));
        }
        if OperatorKind::parse_token(&self.op).is_none() {
            return Err(err("op", format!("unknown operator kind `{}`", self.op)));
        }
        self.g
            .parse::<Poly>()
            .map_err(|e| err("g", e.to_string()))?;
        if !self.psi.is_empty() {
            self.psi
                .parse::<Poly>()
                .map_err(|e| err("psi", e.to_string()))?;
        }
        // convergence schedules additionally need >= 3 sizes; that is
        // enforced where schedules are consumed, not here, so single-matrix
        // commands can run with one size
        if self.sizes.is_empty() || self.sizes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(err(
                "sizes",
                format!("must be non-empty and strictly increasing, got {:?}", self.sizes),
            ));
        }
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(err("tol", format!("must be positive, got {}", self.tol)));
        }
        for (i, a) in self.sweep.a_values.iter().enumerate() {
            parse_complex(a).map_err(|e| err(&format!("sweep.a_values[{i}]"), e.to_string()))?;
        }
        for (i, c) in self.sweep.c_scalings.iter().enumerate() {
            parse_complex(c).map_err(|e| err(&format!("sweep.c_scalings[{i}]"), e.to_string()))?;
        }
        match self.output.format.as_str() {
            "csv" | "json" => {}
            other => return Err(err("output.format", format!("expected csv|json, got `{other}`"))),
        }
        match self.output.timing.as_str() {
            "none" | "wall" => {}
            other => return Err(err("output.timing", format!("expected none|wall, got `{other}`"))),
        }
        if self.thresholds.plateau <= 0.0 {
            return Err(err("thresholds.plateau", "must be positive"));
        }
        if self.thresholds.slope <= 0.0 {
            return Err(err("thresholds.slope", "must be positive"));
        }
        if self.thresholds.annulus_trigger < 2 {
            return Err(err("thresholds.annulus_trigger", "must be at least 2"));
        }
        let [lo, hi] = self.thresholds.ratio_band;
        if !(lo > 0.0 && hi > lo) {
            return Err(err("thresholds.ratio_band", "needs 0 < low < high"));
        }
        Ok(())
    }

    pub fn parsed_g(&self) -> Poly {
        self.g.parse().expect("validated")
    }

    pub fn parsed_psi(&self) -> Option<Poly> {
        if self.psi.is_empty() {
            None
        } else {
            Some(self.psi.parse().expect("validated"))
        }
    }

    pub fn parsed_op(&self) -> OperatorKind {
        OperatorKind::parse_token(&self.op).expect("validated")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        ExperimentConfig::default().validate().unwrap();
    }

    #[test]
    fn round_trip_is_idempotent() {
        let cfg = ExperimentConfig::default();
        let text = cfg.serialize();
        let reparsed = ExperimentConfig::parse(&text).unwrap();
        assert_eq!(cfg, reparsed);
        assert_eq!(text, reparsed.serialize());
    }

    #[test]
    fn partial_config_fills_defaults() {
        let cfg = ExperimentConfig::parse("alpha = 2.0\n[thresholds]\nslope = 0.1\n").unwrap();
        assert_eq!(cfg.alpha, 2.0);
        assert_eq!(cfg.thresholds.slope, 0.1);
        assert_eq!(cfg.p, 2.0);
        assert_eq!(cfg.thresholds.plateau, 1e-8);
    }

    #[test]
    fn field_errors_name_the_field() {
        let bad = ExperimentConfig {
            alpha: -1.0,
            ..ExperimentConfig::default()
        };
        let e = bad.validate().unwrap_err();
        assert_eq!(e.field, "alpha");

        let bad = ExperimentConfig {
            g: "1,2,zz".to_string(),
            ..ExperimentConfig::default()
        };
        assert_eq!(bad.validate().unwrap_err().field, "g");

        let bad = ExperimentConfig {
            sizes: vec![32, 16, 64],
            ..ExperimentConfig::default()
        };
        assert_eq!(bad.validate().unwrap_err().field, "sizes");

        let bad = ExperimentConfig {
            op: "qq".to_string(),
            ..ExperimentConfig::default()
        };
        assert_eq!(bad.validate().unwrap_err().field, "op");
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(ExperimentConfig::parse("alhpa = 1.0\n").is_err());
    }
}

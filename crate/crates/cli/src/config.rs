//! Experiment configuration: one JSON document, with CLI flags layered on
//! top. The config echoes into every report so a run is reproducible from
//! its own output.

use std::path::PathBuf;

use primecurve::{DensityProfile, Error, ProfileKind, Progression, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Curvature,
    SignChanges,
    DeltaSum,
    SingularSum,
    Census,
    BSet,
    Scattered,
    VerifyAll,
}

impl ExperimentKind {
    pub fn name(&self) -> &'static str {
        match self {
            ExperimentKind::Curvature => "curvature",
            ExperimentKind::SignChanges => "sign-changes",
            ExperimentKind::DeltaSum => "delta-sum",
            ExperimentKind::SingularSum => "singular-sum",
            ExperimentKind::Census => "census",
            ExperimentKind::BSet => "b-set",
            ExperimentKind::Scattered => "scattered",
            ExperimentKind::VerifyAll => "verify-all",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub q: u64,
    pub a: u64,
    /// Index budget N (curvature, delta-sum, sign-changes, b-set).
    pub n: usize,
    /// Upper limit x (census).
    pub x: u64,
    /// Window length H (census, singular-sum).
    pub h: u64,
    pub alpha: f64,
    /// Depth of the scattered construction.
    pub lmax: usize,
    pub profile: DensityProfile,
    /// Truncation prime for singular products.
    pub p_max: u64,
    /// Truncation for the series oracle inside verify-all.
    pub r_max: u64,
    /// How many census triples to list in the report (0 = none).
    pub dump_triples: usize,
    /// Optional newline-delimited prime subset replacing the progression
    /// as the sequence under study.
    pub subset_file: Option<PathBuf>,
    pub out_csv: Option<PathBuf>,
    pub out_json: Option<PathBuf>,
    /// 0 = library default thread count.
    pub workers: usize,
    /// Directory for the binary sieve cache.
    pub cache: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            kind: ExperimentKind::VerifyAll,
            q: 1,
            a: 1,
            n: 1000,
            x: 100_000,
            h: 50,
            alpha: 1.0,
            lmax: 4,
            profile: DensityProfile {
                kind: ProfileKind::Constant { delta0: 1.0 },
                x0: 3.0,
            },
            p_max: primecurve::DEFAULT_TRUNCATION_PRIME,
            r_max: 400_000,
            dump_triples: 0,
            subset_file: None,
            out_csv: None,
            out_json: None,
            workers: 0,
            cache: None,
        }
    }
}

impl ExperimentConfig {
    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let config: ExperimentConfig = serde_json::from_str(&text)
            .map_err(|e| Error::usage(format!("{}: {e}", path.display())))?;
        Ok(config)
    }

    pub fn progression(&self) -> Result<Progression> {
        Progression::new(self.q, self.a)
    }

    /// Field-level diagnostics before any work starts.
    pub fn validate(&self) -> Result<()> {
        self.progression()
            .map_err(|e| Error::usage(format!("field q/a: {e}")))?;
        self.profile
            .validate()
            .map_err(|e| Error::usage(format!("field profile: {e}")))?;
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::usage(format!(
                "field alpha: {} outside (0, 1]",
                self.alpha
            )));
        }
        if self.n == 0 {
            return Err(Error::usage("field n: must be positive"));
        }
        if self.h == 0 {
            return Err(Error::usage("field h: must be positive"));
        }
        if self.lmax == 0 {
            return Err(Error::usage("field lmax: must be positive"));
        }
        if self.p_max < 5 {
            return Err(Error::usage("field p_max: must be at least 5"));
        }
        if self.r_max == 0 {
            return Err(Error::usage("field r_max: must be positive"));
        }
        Ok(())
    }
}

/// Parse the --profile flag: `constant:<delta0>`, `reciprocal-log`,
/// `power-log:<c>:<beta>`, or `table:<path>` (JSON array of [x, delta]).
pub fn parse_profile(spec: &str) -> Result<ProfileKind> {
    let mut parts = spec.split(':');
    let head = parts.next().unwrap_or("");
    let kind = match head {
        "constant" => {
            let delta0 = parse_field(parts.next(), "constant:<delta0>")?;
            ProfileKind::Constant { delta0 }
        }
        "reciprocal-log" => ProfileKind::ReciprocalLog,
        "power-log" => {
            let c = parse_field(parts.next(), "power-log:<c>:<beta>")?;
            let beta = parse_field(parts.next(), "power-log:<c>:<beta>")?;
            ProfileKind::PowerLog { c, beta }
        }
        "table" => {
            let path = parts
                .next()
                .ok_or_else(|| Error::usage("table profile needs a path: table:<file>"))?;
            let text = std::fs::read_to_string(path)?;
            let points: Vec<(f64, f64)> =
                serde_json::from_str(&text).map_err(|e| Error::usage(format!("{path}: {e}")))?;
            ProfileKind::Table { points }
        }
        other => {
            return Err(Error::usage(format!(
                "unknown profile kind '{other}' (expected constant, reciprocal-log, \
                 power-log, or table)"
            )))
        }
    };
    Ok(kind)
}

fn parse_field(part: Option<&str>, shape: &str) -> Result<f64> {
    part.ok_or_else(|| Error::usage(format!("profile spec incomplete, expected {shape}")))?
        .parse()
        .map_err(|e| Error::usage(format!("profile spec: {e}")))
}

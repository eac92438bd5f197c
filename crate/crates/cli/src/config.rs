//! Run configuration: an optional JSON file overlaid by command-line flags.

use std::path::PathBuf;

use clap::{Args, ValueEnum};
use hiqec::qec::{DEFAULT_C0, DEFAULT_D_MAX, DEFAULT_D_MIN, DEFAULT_P_TH};
use hiqec::walsh::{DEFAULT_MAX_QUBITS, MAX_QUBITS};
use hiqec::{io, DiagonalObservable, NoiseVector, RealWavefunction, SurfaceCodeParams};
use serde::{Deserialize, Deserializer, Serialize};

use crate::CliError;

pub const MAX_QUBITS_ENV: &str = "HIQEC_MAX_QUBITS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum StateKind {
    Gaussian,
    Random,
    File,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Text,
    Json,
    Csv,
}

/// Flags shared by every subcommand. Every field is optional so that a config
/// file can supply it; flags take precedence.
#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Number of qubits
    #[arg(long)]
    pub n: Option<usize>,

    /// Wavefunction family
    #[arg(long, value_enum)]
    pub state: Option<StateKind>,

    /// Gaussian centre in grid units (accepts fractions such as 15/2); defaults to (2^n-1)/2
    #[arg(long, value_parser = parse_real, allow_hyphen_values = true)]
    #[serde(deserialize_with = "real_opt")]
    pub mu: Option<f64>,

    /// Gaussian width in grid units (accepts fractions such as 8/3)
    #[arg(long, value_parser = parse_real)]
    #[serde(deserialize_with = "real_opt")]
    pub sigma: Option<f64>,

    /// Seed for random states and randomized checks
    #[arg(long)]
    pub seed: Option<u64>,

    /// Amplitude file (JSON array or one value per line)
    #[arg(long)]
    pub state_file: Option<PathBuf>,

    /// `phi`, `identity`, or a path to a diagonal file
    #[arg(long)]
    pub observable: Option<String>,

    /// Power of the field operator
    #[arg(long)]
    pub power: Option<u32>,

    /// Per-qubit depolarizing probabilities, UV-first, comma separated; a single value applies to all qubits
    #[arg(long, value_delimiter = ',')]
    pub eta: Option<Vec<f64>>,

    /// Physical error rate
    #[arg(long)]
    pub p: Option<f64>,

    #[arg(long)]
    pub p_th: Option<f64>,

    #[arg(long)]
    pub c0: Option<f64>,

    #[arg(long)]
    pub n_cycles: Option<u64>,

    /// Target fractional error after all cycles
    #[arg(long)]
    pub epsilon: Option<f64>,

    /// Target per-cycle fractional error (overrides epsilon / n-cycles)
    #[arg(long)]
    pub eps_per_cycle: Option<f64>,

    #[arg(long)]
    pub d_min: Option<u32>,

    #[arg(long)]
    pub d_max: Option<u32>,

    #[arg(long, value_enum)]
    pub format: Option<Format>,

    /// Write the report here instead of stdout
    #[arg(long)]
    pub output: Option<PathBuf>,

    /// JSON config file; flags override its values
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

macro_rules! overlay {
    ($base:ident, $top:ident; $($field:ident),* $(,)?) => {
        $( if $top.$field.is_some() { $base.$field = $top.$field.clone(); } )*
    };
}

impl RunConfig {
    /// Loads `--config` (if any) and overlays the flags on top of it.
    pub fn load(flags: &RunConfig) -> Result<RunConfig, CliError> {
        let mut base = match &flags.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
                serde_json::from_str::<RunConfig>(&text)
                    .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?
            }
            None => RunConfig::default(),
        };
        base.overlay(flags);
        Ok(base)
    }

    pub fn overlay(&mut self, top: &RunConfig) {
        let base = self;
        overlay!(base, top; n, state, mu, sigma, seed, state_file, observable, power, eta, p, p_th, c0,
            n_cycles, epsilon, eps_per_cycle, d_min, d_max, format, output, config);
    }

    pub fn format(&self) -> Format {
        self.format.unwrap_or_default()
    }

    fn qubit_cap() -> Result<usize, CliError> {
        match std::env::var(MAX_QUBITS_ENV) {
            Ok(v) => {
                let cap: usize = v.trim().parse().map_err(|_| {
                    CliError::Validation(format!("{MAX_QUBITS_ENV}={v:?} is not an integer"))
                })?;
                if cap == 0 || cap > MAX_QUBITS {
                    return Err(CliError::Validation(format!(
                        "{MAX_QUBITS_ENV} must be in 1..={MAX_QUBITS}, got {cap}"
                    )));
                }
                Ok(cap)
            }
            Err(_) => Ok(DEFAULT_MAX_QUBITS),
        }
    }

    fn check_n(n: usize) -> Result<usize, CliError> {
        let cap = Self::qubit_cap()?;
        if n == 0 || n > cap {
            return Err(CliError::Validation(format!(
                "n = {n} outside 1..={cap} (raise {MAX_QUBITS_ENV} to allow more)"
            )));
        }
        Ok(n)
    }

    fn state_kind(&self) -> StateKind {
        match (self.state, &self.state_file) {
            (Some(kind), _) => kind,
            (None, Some(_)) => StateKind::File,
            (None, None) => StateKind::Gaussian,
        }
    }

    /// Builds the configured state; `n` is inferred from a state file when absent.
    pub fn wavefunction(&self) -> Result<RealWavefunction, CliError> {
        let w = match self.state_kind() {
            StateKind::File => {
                let path = self.state_file.as_ref().ok_or_else(|| {
                    CliError::Validation("--state file requires --state-file".into())
                })?;
                io::load_state(path)?
            }
            StateKind::Gaussian => {
                let n = self.required_n()?;
                let sigma = self.sigma.ok_or_else(|| {
                    CliError::Validation("gaussian state requires --sigma".into())
                })?;
                let mu = self.mu.unwrap_or(((1u64 << n) - 1) as f64 / 2.0);
                RealWavefunction::gaussian(n, mu, sigma)?
            }
            StateKind::Random => {
                RealWavefunction::random(self.required_n()?, self.seed.unwrap_or(0))?
            }
        };
        let n = Self::check_n(w.qubits())?;
        if let Some(want) = self.n {
            if want != n {
                return Err(CliError::Validation(format!(
                    "--n {want} does not match the {n}-qubit state"
                )));
            }
        }
        Ok(w)
    }

    pub fn required_n(&self) -> Result<usize, CliError> {
        let n = self
            .n
            .ok_or_else(|| CliError::Validation("--n is required".into()))?;
        Self::check_n(n)
    }

    pub fn observable(&self, n: usize) -> Result<DiagonalObservable, CliError> {
        let o = match self.observable.as_deref().unwrap_or("phi") {
            "phi" => DiagonalObservable::phi_power(n, self.power.unwrap_or(2))?,
            "identity" => DiagonalObservable::identity(n)?,
            path => io::load_observable(path.as_ref())?,
        };
        if o.qubits() != n {
            return Err(CliError::Validation(format!(
                "observable has {} qubits but the state has {n}",
                o.qubits()
            )));
        }
        Ok(o)
    }

    pub fn noise(&self, n: usize) -> Result<Option<NoiseVector>, CliError> {
        let Some(eta) = &self.eta else {
            return Ok(None);
        };
        let eta = match eta.as_slice() {
            [single] => vec![*single; n],
            many if many.len() == n => many.to_vec(),
            many => {
                return Err(CliError::Validation(format!(
                    "--eta has {} values for {n} qubits",
                    many.len()
                )))
            }
        };
        Ok(Some(NoiseVector::new(eta)?))
    }

    pub fn surface_code(&self) -> Result<SurfaceCodeParams, CliError> {
        let (epsilon, n_cycles) = match (self.eps_per_cycle, self.epsilon) {
            (Some(_), Some(_)) => {
                return Err(CliError::Validation(
                    "give either --eps-per-cycle or --epsilon, not both".into(),
                ))
            }
            (Some(per_cycle), None) => (per_cycle, 1),
            (None, eps) => (eps.unwrap_or(1e-5), self.n_cycles.unwrap_or(1)),
        };
        let params = SurfaceCodeParams {
            p: self.p.unwrap_or(1e-3),
            p_th: self.p_th.unwrap_or(DEFAULT_P_TH),
            c0: self.c0.unwrap_or(DEFAULT_C0),
            n_cycles,
            epsilon,
            d_min: self.d_min.unwrap_or(DEFAULT_D_MIN),
            d_max: self.d_max.unwrap_or(DEFAULT_D_MAX),
        };
        params.validate()?;
        Ok(params)
    }
}

/// Parses a decimal number or a fraction `a/b`.
pub fn parse_real(s: &str) -> Result<f64, String> {
    let value = match s.split_once('/') {
        Some((num, den)) => {
            let num: f64 = num.trim().parse().map_err(|e| format!("{s:?}: {e}"))?;
            let den: f64 = den.trim().parse().map_err(|e| format!("{s:?}: {e}"))?;
            num / den
        }
        None => s.trim().parse().map_err(|e| format!("{s:?}: {e}"))?,
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(format!("{s:?} is not a finite number"))
    }
}

fn real_opt<'de, D: Deserializer<'de>>(de: D) -> Result<Option<f64>, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Real {
        Number(f64),
        Text(String),
    }
    match Option::<Real>::deserialize(de)? {
        None => Ok(None),
        Some(Real::Number(x)) => Ok(Some(x)),
        Some(Real::Text(s)) => parse_real(&s).map(Some).map_err(serde::de::Error::custom),
    }
}

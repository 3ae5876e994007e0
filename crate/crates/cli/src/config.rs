//! Run configuration: a single JSON document.

use std::fmt;
use std::path::{Path, PathBuf};

use qpath::liouville::Representation;
use serde::Deserialize;

/// Largest Fock truncation accepted from a config file.
pub const MAX_FOCK_DIM: usize = 40;
/// Largest position grid accepted from a config file.
pub const MAX_GRID_POINTS: usize = 32;

/// A complex number written as `[re, im]`, or a bare real.
#[derive(Clone, Copy, Debug, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum ComplexSpec {
    Real(f64),
    Pair([f64; 2]),
}

impl ComplexSpec {
    pub fn value(self) -> qpath::C64 {
        match self {
            ComplexSpec::Real(x) => qpath::C64::new(x, 0.0),
            ComplexSpec::Pair([re, im]) => qpath::C64::new(re, im),
        }
    }
}

impl Default for ComplexSpec {
    fn default() -> Self {
        ComplexSpec::Real(1.0)
    }
}

fn unit() -> f64 {
    1.0
}

/// An operator on the configured representation.
#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum OperatorSpec {
    /// Explicit matrix, rows of `[re, im]` entries.
    Matrix(Vec<Vec<ComplexSpec>>),
    /// Tensor product of Paulis such as `"XZ"`, times `scale`.
    Pauli {
        label: String,
        #[serde(default)]
        scale: ComplexSpec,
    },
    /// Truncated annihilation operator `Σ √n |n-1⟩⟨n|`, times `scale`.
    Lowering {
        #[serde(default)]
        scale: ComplexSpec,
    },
    /// `p P + q Q` in the frame of mass `m` and frequency `omega`.
    Linear {
        #[serde(default)]
        p: Option<ComplexSpec>,
        #[serde(default)]
        q: Option<ComplexSpec>,
        #[serde(default = "unit")]
        m: f64,
        #[serde(default = "unit")]
        omega: f64,
    },
    /// `P²/2m + mω²Q²/2 + (μ/2)(PQ + QP)`.
    Harmonic {
        m: f64,
        omega: f64,
        #[serde(default)]
        mu: f64,
    },
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LindbladSpec {
    pub hamiltonian: OperatorSpec,
    #[serde(default)]
    pub operators: Vec<OperatorSpec>,
}

#[derive(Clone, Copy, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OscillatorSpec {
    pub m: f64,
    pub omega: f64,
    #[serde(default)]
    pub mu: f64,
    #[serde(default)]
    pub lambda: f64,
    #[serde(default)]
    pub d_qq: f64,
    #[serde(default)]
    pub d_pp: f64,
    #[serde(default)]
    pub d_pq: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AmplitudeSpec {
    pub a: [ComplexSpec; 2],
    pub b: [ComplexSpec; 2],
    pub m: f64,
    pub omega: f64,
    #[serde(default)]
    pub mu: f64,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum GeneratorSpec {
    Lindblad(LindbladSpec),
    Oscillator(OscillatorSpec),
    Amplitudes(AmplitudeSpec),
    /// An instantaneous gate `ρ ↦ UρU†` rather than a generator.
    Unitary(OperatorSpec),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// `I + τΛ` per slice.
    #[default]
    Linear,
    /// `exp(τΛ)` per slice.
    Exponential,
}

#[derive(Clone, Copy, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeSpec {
    #[serde(default)]
    pub t0: f64,
    pub t: f64,
    pub slices: usize,
    #[serde(default)]
    pub scheme: Scheme,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum StateSpec {
    /// Number state `|n⟩`.
    Fock(usize),
    /// Coherent state `|α⟩` of the oscillator frame.
    Coherent(ComplexSpec),
    /// Qubit state `(I + xX + yY + zZ)/2`.
    Bloch([f64; 3]),
    Matrix(Vec<Vec<ComplexSpec>>),
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "unit")]
    pub hbar: f64,
    pub representation: Representation,
    pub generator: GeneratorSpec,
    #[serde(default)]
    pub time: Option<TimeSpec>,
    #[serde(default)]
    pub initial_state: Option<StateSpec>,
    /// Artifact names to write; empty means every artifact of the subcommand.
    #[serde(default)]
    pub outputs: Vec<String>,
}

/// A config problem anchored to a line of the source file.
#[derive(Debug)]
pub struct ConfigError {
    pub path: PathBuf,
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.path.display(), self.line, self.message)
    }
}

impl std::error::Error for ConfigError {}

/// A loaded config together with its source text, for anchoring later errors.
#[derive(Debug)]
pub struct LoadedConfig {
    pub config: RunConfig,
    path: PathBuf,
    text: String,
}

impl LoadedConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError {
            path: path.to_owned(),
            line: 0,
            message: format!("cannot read config: {e}"),
        })?;
        Self::parse(path, text)
    }

    pub fn parse(path: &Path, text: String) -> Result<Self, ConfigError> {
        let config: RunConfig = serde_json::from_str(&text).map_err(|e| ConfigError {
            path: path.to_owned(),
            line: e.line(),
            message: strip_position(&e.to_string()),
        })?;
        let loaded = LoadedConfig { config, path: path.to_owned(), text };
        loaded.validate()?;
        Ok(loaded)
    }

    /// Error pointing at the first line that mentions `"key"`.
    pub fn error_at(&self, key: &str, message: impl Into<String>) -> ConfigError {
        let needle = format!("\"{key}\"");
        let line = self.text.lines().position(|l| l.contains(&needle)).map_or(1, |i| i + 1);
        ConfigError { path: self.path.clone(), line, message: message.into() }
    }

    fn validate(&self) -> Result<(), ConfigError> {
        let c = &self.config;
        if !(c.hbar.is_finite() && c.hbar > 0.0) {
            return Err(self.error_at("hbar", format!("hbar must be positive and finite, got {}", c.hbar)));
        }
        match c.representation {
            Representation::Fock { dim } if !(1..=MAX_FOCK_DIM).contains(&dim) => {
                return Err(self.error_at("fock", format!("fock dim must be in 1..={MAX_FOCK_DIM}, got {dim}")));
            }
            Representation::Grid { points, length } => {
                if !(2..=MAX_GRID_POINTS).contains(&points) || !points.is_power_of_two() {
                    return Err(self.error_at(
                        "grid",
                        format!("grid points must be a power of two in 2..={MAX_GRID_POINTS}, got {points}"),
                    ));
                }
                if !(length.is_finite() && length > 0.0) {
                    return Err(self.error_at("grid", format!("grid length must be positive, got {length}")));
                }
            }
            _ => {}
        }
        if let Some(t) = &c.time {
            if t.slices == 0 {
                return Err(self.error_at("slices", "slices must be at least 1"));
            }
            if !(t.t0.is_finite() && t.t.is_finite()) || t.t < t.t0 {
                return Err(self.error_at("time", format!("need finite t0 <= t, got t0 = {}, t = {}", t.t0, t.t)));
            }
        }
        Ok(())
    }
}

/// serde_json appends " at line L column C"; the line is reported separately.
fn strip_position(msg: &str) -> String {
    match msg.rfind(" at line ") {
        Some(i) => msg[..i].to_owned(),
        None => msg.to_owned(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<LoadedConfig, ConfigError> {
        LoadedConfig::parse(Path::new("run.json"), text.to_owned())
    }

    #[test]
    fn damped_qubit_config() {
        let c = parse(
            r#"{
  "representation": {"fock": {"dim": 2}},
  "generator": {"lindblad": {
    "hamiltonian": {"pauli": {"label": "Z", "scale": 0.5}},
    "operators": [{"lowering": {}}]
  }},
  "time": {"t": 1.0, "slices": 8},
  "initial_state": {"fock": 1}
}"#,
        )
        .unwrap();
        assert_eq!(c.config.hbar, 1.0);
        assert_eq!(c.config.time.unwrap().scheme, Scheme::Linear);
        assert_eq!(c.config.initial_state, Some(StateSpec::Fock(1)));
    }

    #[test]
    fn errors_carry_lines() {
        let e = parse("{\n  \"representation\": {\"fock\": {\"dim\": 2}},\n  \"generator\": {\"bogus\": 1}\n}").unwrap_err();
        assert_eq!(e.line, 3);
        let e = parse(
            "{\n  \"representation\": {\"fock\": {\"dim\": 2}},\n  \"generator\": {\"oscillator\": {\"m\": 1, \"omega\": 1}},\n  \"time\": {\"t\": 1,\n \"slices\": 0}\n}",
        )
        .unwrap_err();
        assert_eq!(e.line, 5);
        assert!(e.to_string().starts_with("run.json:5: slices"));
        let e = parse("{\"representation\": {\"grid\": {\"points\": 12, \"length\": 1}}, \"generator\": {\"oscillator\": {\"m\": 1, \"omega\": 1}}}")
            .unwrap_err();
        assert!(e.message.contains("power of two"));
    }
}

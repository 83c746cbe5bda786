//! Experiment specification files (TOML).

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::channels::{ChannelFamily, DensityMatrix, NoiseModel};
use crate::error::{Error, Result};
use crate::hamiltonian::Hamiltonian;
use crate::lab::scenario;
use crate::linalg::DenseOperator;
use crate::mitigation::MitigationMode;

pub const DEFAULT_SHOTS: usize = 100_000;

fn default_shots() -> usize {
    DEFAULT_SHOTS
}

fn default_state() -> String {
    "zero".into()
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AlgorithmKind {
    Trotter,
    Rlcu,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgorithmSpec {
    pub kind: AlgorithmKind,
    /// Product-formula order (Trotter).
    pub order: Option<u32>,
    /// Microsteps `N` (Trotter).
    pub steps: Option<usize>,
    /// Repetitions (RLCU).
    pub r: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSpec {
    #[serde(default = "default_family")]
    pub family: ChannelFamily,
    pub gamma: f64,
    /// Clifford-gate rate; defaults to `gamma`.
    pub gamma_c: Option<f64>,
    pub c_pec: Option<f64>,
    #[serde(default = "default_true")]
    pub noisy_ancilla: bool,
}

fn default_family() -> ChannelFamily {
    ChannelFamily::Depolarizing
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MitigationSpec {
    #[serde(default)]
    pub mode: MitigationMode,
    /// SNI segment count.
    pub segments: Option<usize>,
    /// Rate error of the PEC noise model.
    #[serde(default)]
    pub delta_gamma: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweepAxis {
    #[serde(rename = "d")]
    Depth,
    #[serde(rename = "N")]
    Steps,
    #[serde(rename = "r")]
    Repetitions,
    #[serde(rename = "epsilon", alias = "ε")]
    Epsilon,
    #[serde(rename = "gamma", alias = "γ")]
    Gamma,
    #[serde(rename = "t")]
    Time,
    #[serde(rename = "s")]
    Segments,
}

impl SweepAxis {
    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::Depth => "d",
            SweepAxis::Steps => "N",
            SweepAxis::Repetitions => "r",
            SweepAxis::Epsilon => "epsilon",
            SweepAxis::Gamma => "gamma",
            SweepAxis::Time => "t",
            SweepAxis::Segments => "s",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "d" => SweepAxis::Depth,
            "N" => SweepAxis::Steps,
            "r" => SweepAxis::Repetitions,
            "epsilon" | "eps" | "ε" => SweepAxis::Epsilon,
            "gamma" | "γ" => SweepAxis::Gamma,
            "t" => SweepAxis::Time,
            "s" => SweepAxis::Segments,
            other => return Err(Error::Config(format!("unknown sweep axis `{other}` (d, N, r, epsilon, gamma, t, s)"))),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub axis: SweepAxis,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CostSpec {
    pub epsilon: f64,
    /// Trotter prefactor; computed from the Hamiltonian when absent.
    pub alpha_k: Option<f64>,
    /// Constant for the higher-order prefactor.
    pub c_cal: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub name: String,
    /// Built-in scenario name (`pauli2`, `heis3`) or a Hamiltonian file path,
    /// relative to the spec file.
    pub hamiltonian: String,
    pub t: f64,
    pub algorithm: AlgorithmSpec,
    pub noise: Option<NoiseSpec>,
    #[serde(default)]
    pub mitigation: MitigationSpec,
    /// `[coefficient] <pauli-label>`; defaults to `Z` on qubit 0.
    pub observable: Option<String>,
    /// `zero`, `plus`, a per-qubit label over `0 1 + -`, or `file:<path>`
    /// holding amplitudes as `re im` lines.
    #[serde(default = "default_state")]
    pub initial_state: String,
    #[serde(default = "default_shots")]
    pub shots: usize,
    #[serde(default)]
    pub seed: u64,
    pub sweep: Option<SweepSpec>,
    pub cost: Option<CostSpec>,
}

/// A validated spec together with the objects it names.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub spec: ExperimentSpec,
    pub hamiltonian: Hamiltonian,
    pub observable: DenseOperator,
    pub observable_label: String,
    pub initial_state: DensityMatrix,
    pub noise: Option<NoiseModel>,
    /// SHA-256 of the spec text.
    pub spec_sha256: String,
}

impl Experiment {
    pub fn order(&self) -> u32 {
        self.spec.algorithm.order.unwrap_or(1)
    }

    pub fn steps(&self) -> usize {
        self.spec.algorithm.steps.unwrap_or(1)
    }

    pub fn repetitions(&self) -> usize {
        self.spec.algorithm.r.unwrap_or(1)
    }

    pub fn kind(&self) -> AlgorithmKind {
        self.spec.algorithm.kind
    }

    /// Noise model with both rates shifted by `delta_gamma`, for building a
    /// deliberately mismatched PEC model.
    pub fn model_noise(&self) -> Result<Option<NoiseModel>> {
        let dg = self.spec.mitigation.delta_gamma;
        match &self.noise {
            None => Ok(None),
            Some(n) if dg == 0.0 => Ok(Some(n.clone())),
            Some(n) => {
                let mut m = NoiseModel::new(n.family, n.gamma + dg, n.gamma_c + dg)?;
                m.noisy_ancilla = n.noisy_ancilla;
                m.c_pec = n.c_pec;
                Ok(Some(m))
            }
        }
    }
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

/// Parses spec text; relative paths resolve against `base_dir`.
pub fn parse_spec(text: &str, base_dir: &Path) -> Result<Experiment> {
    let spec: ExperimentSpec = toml::from_str(text).map_err(|e| Error::Parse {
        line: e.span().map(|s| line_of(text, s.start)).unwrap_or(0),
        message: e.message().to_string(),
    })?;
    let digest = hex::encode(Sha256::digest(text.as_bytes()));
    resolve(spec, base_dir, digest)
}

/// Reads and validates a spec file, filling defaults.
pub fn load_spec(path: &Path) -> Result<Experiment> {
    let text = std::fs::read_to_string(path)?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from("."));
    parse_spec(&text, &base)
}

fn config(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

fn resolve(spec: ExperimentSpec, base: &Path, spec_sha256: String) -> Result<Experiment> {
    let hamiltonian = match scenario::reference_hamiltonian(&spec.hamiltonian) {
        Some(h) => h,
        None => Hamiltonian::from_file(&base.join(&spec.hamiltonian))?,
    };
    let n = hamiltonian.n_qubits();
    if !(spec.t >= 0.0 && spec.t.is_finite()) {
        return Err(config(format!("t must be a nonnegative number, got {}", spec.t)));
    }
    if spec.shots == 0 {
        return Err(config("shots must be at least 1"));
    }
    let a = &spec.algorithm;
    match a.kind {
        AlgorithmKind::Trotter => {
            let k = a.order.unwrap_or(1);
            if !(k == 1 || (k >= 2 && k % 2 == 0)) {
                return Err(config(format!("order {k} is not supported: use 1 or an even order")));
            }
            if a.steps == Some(0) {
                return Err(config("steps must be at least 1"));
            }
            if a.r.is_some() {
                return Err(config("`r` applies to rlcu, not trotter"));
            }
        }
        AlgorithmKind::Rlcu => {
            if a.order.is_some() || a.steps.is_some() {
                return Err(config("`order` and `steps` apply to trotter, not rlcu"));
            }
            if a.r == Some(0) {
                return Err(config("r must be at least 1"));
            }
        }
    }
    let noise = match &spec.noise {
        None => None,
        Some(ns) => {
            let mut m = NoiseModel::new(ns.family, ns.gamma, ns.gamma_c.unwrap_or(ns.gamma))?;
            m.c_pec = ns.c_pec;
            m.noisy_ancilla = ns.noisy_ancilla;
            Some(m)
        }
    };
    let mit = &spec.mitigation;
    match mit.mode {
        MitigationMode::None => {
            if mit.segments.is_some() {
                return Err(config("`segments` needs mitigation mode sni"));
            }
        }
        MitigationMode::Pec => {
            if noise.is_none() {
                return Err(config("pec mitigation needs a [noise] section"));
            }
        }
        MitigationMode::Sni => {
            if noise.is_none() {
                return Err(config("sni mitigation needs stochastic Pauli noise: add a [noise] section"));
            }
            if a.kind == AlgorithmKind::Rlcu {
                return Err(config("sni mitigation is available for trotter circuits only"));
            }
            if mit.segments == Some(0) {
                return Err(config("segments must be at least 1"));
            }
        }
    }
    if !(mit.delta_gamma >= 0.0 && mit.delta_gamma < 0.5) {
        return Err(config(format!("delta_gamma {} outside [0, 0.5)", mit.delta_gamma)));
    }
    if mit.delta_gamma != 0.0 && (mit.mode != MitigationMode::Pec || a.kind == AlgorithmKind::Rlcu) {
        return Err(config("delta_gamma applies to pec mitigation of trotter circuits only"));
    }
    if let Some(sw) = &spec.sweep {
        if sw.values.is_empty() {
            return Err(config("sweep values must not be empty"));
        }
        check_axis(sw.axis, &spec)?;
    }
    let label = spec.observable.clone().unwrap_or_else(|| {
        let mut s = String::from("Z");
        s.push_str(&"I".repeat(n - 1));
        s
    });
    let observable = scenario::parse_observable(&label, n)?;
    let initial_state = parse_state(&spec.initial_state, n, base)?;
    Ok(Experiment { spec, hamiltonian, observable, observable_label: label, initial_state, noise, spec_sha256 })
}

pub(crate) fn check_axis(axis: SweepAxis, spec: &ExperimentSpec) -> Result<()> {
    let kind = spec.algorithm.kind;
    let ok = match axis {
        SweepAxis::Depth | SweepAxis::Steps => kind == AlgorithmKind::Trotter,
        SweepAxis::Repetitions => kind == AlgorithmKind::Rlcu,
        SweepAxis::Segments => kind == AlgorithmKind::Trotter && spec.noise.is_some(),
        SweepAxis::Gamma => spec.noise.is_some(),
        SweepAxis::Epsilon => spec.cost.is_some() || spec.noise.is_some(),
        SweepAxis::Time => true,
    };
    if ok {
        Ok(())
    } else {
        Err(config(format!("sweep axis `{}` does not apply to this experiment", axis.name())))
    }
}

fn parse_state(label: &str, n: usize, base: &Path) -> Result<DensityMatrix> {
    match label {
        "zero" => Ok(DensityMatrix::zero_state(n)),
        "plus" => Ok(DensityMatrix::plus_state(n)),
        _ => {
            if let Some(path) = label.strip_prefix("file:") {
                let text = std::fs::read_to_string(base.join(path.trim()))?;
                let mut amps = Vec::new();
                for (i, line) in text.lines().enumerate() {
                    let line = line.trim();
                    if line.is_empty() || line.starts_with('#') {
                        continue;
                    }
                    let parts: Vec<f64> = line
                        .split_whitespace()
                        .map(str::parse)
                        .collect::<std::result::Result<_, _>>()
                        .map_err(|e| Error::Parse { line: i + 1, message: format!("amplitude: {e}") })?;
                    match parts.as_slice() {
                        [re] => amps.push(Complex64::new(*re, 0.0)),
                        [re, im] => amps.push(Complex64::new(*re, *im)),
                        _ => return Err(Error::Parse { line: i + 1, message: "expected `re [im]`".into() }),
                    }
                }
                if amps.len() != 1 << n {
                    return Err(config(format!("state file has {} amplitudes, need {}", amps.len(), 1 << n)));
                }
                return DensityMatrix::from_pure(&amps);
            }
            if label.chars().count() != n {
                return Err(config(format!("initial state `{label}` does not name {n} qubits")));
            }
            DensityMatrix::from_label(label)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "name = \"m\"\nhamiltonian = \"pauli2\"\nt = 1.0\n[algorithm]\nkind = \"trotter\"\n";

    #[test]
    fn defaults_apply() {
        let e = parse_spec(MINIMAL, Path::new(".")).unwrap();
        assert_eq!(e.spec.shots, 100_000);
        assert_eq!(e.spec.seed, 0);
        assert_eq!(e.spec.initial_state, "zero");
        assert_eq!(e.order(), 1);
        assert_eq!(e.observable_label, "ZI");
    }

    #[test]
    fn unknown_field_is_named() {
        let err = parse_spec(&format!("{MINIMAL}bogus = 1\n"), Path::new(".")).unwrap_err();
        match err {
            Error::Parse { message, .. } => assert!(message.contains("bogus"), "{message}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn odd_order_rejected() {
        let text = MINIMAL.replace("kind = \"trotter\"\n", "kind = \"trotter\"\norder = 3\n");
        assert!(matches!(parse_spec(&text, Path::new(".")), Err(Error::Config(_))));
    }

    #[test]
    fn sni_needs_noise() {
        let text = format!("{MINIMAL}[mitigation]\nmode = \"sni\"\nsegments = 2\n");
        assert!(matches!(parse_spec(&text, Path::new(".")), Err(Error::Config(_))));
    }
}

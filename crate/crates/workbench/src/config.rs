//! JSON analysis configs.
//!
//! Parsing happens in two passes: serde checks the document shape and
//! reports the line and column of any syntax or type error, then
//! [`AnalysisConfig::violations`] collects every semantic problem together
//! with the dotted path of the offending field.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use gqm_core::Criterion;

use crate::model;

/// A complex number as `[re, im]`.
pub type ComplexRepr = [f64; 2];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub model: ModelSpec,
    pub histories: HistoriesSpec,
    #[serde(default)]
    pub analysis: AnalysisSpec,
    #[serde(default)]
    pub output: OutputSpec,
    /// Verdict a fixture is expected to produce; ignored by the analysis.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expect: Option<Expectation>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    /// qubit | spin-pair | lattice-particle
    pub kind: String,
    /// Number of lattice sites (lattice-particle only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sites: Option<usize>,
    pub hamiltonian: HamiltonianSpec,
    pub initial_state: StateSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum HamiltonianSpec {
    Zero,
    /// Σ coefficient · (σ_{ops[0]} ⊗ σ_{ops[1]} ⊗ …)
    Pauli(Vec<PauliTerm>),
    TightBinding(TightBinding),
    Matrix(Vec<Vec<ComplexRepr>>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PauliTerm {
    pub coefficient: f64,
    /// One of i, x, y, z per qubit, qubit 0 first.
    pub ops: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TightBinding {
    /// Off-diagonal element H[j][j+1] = H[j+1][j].
    pub hopping: f64,
    /// Close the chain into a ring (needs at least 3 sites).
    #[serde(default)]
    pub periodic: bool,
    /// On-site energies; zero when omitted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub potential: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum StateSpec {
    MaximallyMixed,
    /// |k⟩⟨k|
    Basis(usize),
    /// Pure state; normalized on load.
    Vector(Vec<ComplexRepr>),
    Diagonal(Vec<f64>),
    Matrix(Vec<Vec<ComplexRepr>>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HistoriesSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub paths: Option<PathSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coarse_graining: Option<CoarseGrainingSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub times: Vec<f64>,
    pub families: Vec<FamilySpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum FamilySpec {
    /// {I}
    Trivial,
    /// One projector per basis state.
    Computational,
    /// Eigenprojectors of one Pauli operator on one qubit, +1 first.
    Pauli {
        axis: String,
        #[serde(default)]
        qubit: usize,
    },
    /// Projectors onto groups of basis states.
    Regions(Vec<Vec<usize>>),
    /// Rank-one projectors onto the given (normalized on load) vectors.
    Vectors(Vec<Vec<ComplexRepr>>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathSpec {
    pub slices: usize,
    pub dt: f64,
    pub partition: PartitionSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum PartitionSpec {
    Regions(Vec<SliceRegions>),
    /// Classes by number of hops q_{k+1} ≠ q_k.
    Hops,
    /// Two classes: paths that ever visit the site, and the rest.
    Visits(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SliceRegions {
    pub slice: usize,
    pub regions: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum CoarseGrainingSpec {
    /// Merge everything into one class.
    All,
    /// Keep only these positions of each history label.
    Slots(Vec<usize>),
    /// Fine label → bar label.
    Explicit(BTreeMap<String, String>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisSpec {
    #[serde(default = "default_criterion")]
    pub criterion: String,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
}

fn default_criterion() -> String {
    "medium".to_string()
}

fn default_epsilon() -> f64 {
    gqm_core::Tolerances::default().decoherence_eps
}

impl Default for AnalysisSpec {
    fn default() -> Self {
        AnalysisSpec {
            criterion: default_criterion(),
            epsilon: default_epsilon(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

impl std::str::FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            other => Err(format!("unknown format {other:?} (expected json or csv)")),
        }
    }
}

impl OutputFormat {
    pub fn extension(self) -> &'static str {
        match self {
            OutputFormat::Json => "json",
            OutputFormat::Csv => "csv",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default)]
    pub format: OutputFormat,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expectation {
    pub decoherent: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub path: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.path, self.message)
    }
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{} schema violation(s):\n{}", .0.len(), .0.iter().map(|v| format!("  {v}")).collect::<Vec<_>>().join("\n"))]
    Invalid(Vec<Violation>),
}

impl ConfigError {
    pub fn violations(&self) -> &[Violation] {
        match self {
            ConfigError::Invalid(v) => v,
            ConfigError::Parse { .. } => &[],
        }
    }
}

pub(crate) struct Violations(pub Vec<Violation>);

impl Violations {
    pub fn push(&mut self, path: impl Into<String>, message: impl Into<String>) {
        self.0.push(Violation {
            path: path.into(),
            message: message.into(),
        });
    }
}

/// Parses and validates a config document.
pub fn load_config(text: &str) -> Result<AnalysisConfig, ConfigError> {
    let config: AnalysisConfig = serde_json::from_str(text).map_err(|e| ConfigError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    config.validate()?;
    Ok(config)
}

impl AnalysisConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(ConfigError::Invalid(v))
        }
    }

    /// Every schema violation, in document order.
    pub fn violations(&self) -> Vec<Violation> {
        let mut v = Violations(Vec::new());
        let dim = model::check_model(&self.model, &mut v);

        let h = &self.histories;
        match (&h.grid, &h.paths) {
            (Some(_), Some(_)) => v.push(
                "histories",
                "must contain exactly one of grid or paths, found both",
            ),
            (None, None) => v.push("histories", "must contain exactly one of grid or paths"),
            (Some(grid), None) => {
                if let Some(dim) = dim {
                    model::check_grid(grid, &self.model, dim, &mut v);
                }
            }
            (None, Some(paths)) => {
                if self.model.kind != "lattice-particle" {
                    v.push("histories.paths", "requires model.kind lattice-particle");
                } else if let Some(dim) = dim {
                    model::check_paths(paths, dim, &mut v);
                }
            }
        }

        if let Some(CoarseGrainingSpec::Slots(slots)) = &h.coarse_graining {
            let available = match (&h.grid, &h.paths) {
                (Some(g), _) => Some(g.families.len()),
                (
                    None,
                    Some(PathSpec {
                        partition: PartitionSpec::Regions(r),
                        ..
                    }),
                ) => Some(r.len()),
                _ => None,
            };
            match available {
                Some(n) => {
                    for (k, &s) in slots.iter().enumerate() {
                        if s >= n {
                            v.push(
                                format!("histories.coarse_graining.slots[{k}]"),
                                format!("slot {s} out of range for {n} slot(s)"),
                            );
                        }
                    }
                }
                None => v.push(
                    "histories.coarse_graining.slots",
                    "slot marginals need a grid or a region partition",
                ),
            }
        }
        if let Some(CoarseGrainingSpec::Explicit(m)) = &h.coarse_graining {
            if m.is_empty() {
                v.push(
                    "histories.coarse_graining.explicit",
                    "must assign at least one label",
                );
            }
        }

        if self.analysis.criterion.parse::<Criterion>().is_err() {
            v.push(
                "analysis.criterion",
                format!(
                    "unknown criterion {:?} (expected medium, weak or lp)",
                    self.analysis.criterion
                ),
            );
        }
        if !(self.analysis.epsilon > 0.0 && self.analysis.epsilon.is_finite()) {
            v.push("analysis.epsilon", "must be > 0");
        }
        if v.0.is_empty() {
            if let Err(e) = model::build(self) {
                v.push(e.context.clone(), e.source.to_string());
            }
        }
        v.0
    }

    pub fn criterion(&self) -> Criterion {
        self.analysis
            .criterion
            .parse()
            .expect("criterion checked by validate")
    }

    pub fn display_name(&self) -> &str {
        self.name.as_deref().unwrap_or("analysis")
    }
}

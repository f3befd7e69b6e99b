//! Runs a validated config through the core library.

use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use gqm_core::{
    build_d_pathsum, build_decoherence_functional, check_axioms, coarse_grain_d, decide,
    operator_equivalence_oracle, AxiomReport, CoarseGrainable, DecoherenceMatrix,
    DecoherenceVerdict, PathSumSet, Probability, Tolerances,
};

use crate::config::{AnalysisConfig, ComplexRepr, ConfigError};
use crate::model::{self, BuildError, BuiltHistories};

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Build(#[from] BuildError),
    #[error("{context}: {source}")]
    Core {
        context: &'static str,
        #[source]
        source: gqm_core::Error,
    },
    #[error("oracle needs a path-sum config with a region partition")]
    NoOracle,
}

fn at<T>(context: &'static str, r: gqm_core::Result<T>) -> Result<T, AnalysisError> {
    r.map_err(|source| AnalysisError::Core { context, source })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Formulation {
    Operator,
    PathSum,
}

/// D with complex entries as `[re, im]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixReport {
    pub labels: Vec<String>,
    pub entries: Vec<Vec<ComplexRepr>>,
}

impl MatrixReport {
    pub fn from_matrix(d: &DecoherenceMatrix) -> Self {
        let n = d.len();
        MatrixReport {
            labels: d.labels().to_vec(),
            entries: (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| {
                            let z = d.entry(i, j);
                            [z.re, z.im]
                        })
                        .collect()
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub elapsed_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub config: AnalysisConfig,
    pub formulation: Formulation,
    /// Number of fine-grained histories or path classes.
    pub fine_histories: usize,
    /// The functional the verdict was taken on (after coarse graining).
    pub decoherence: MatrixReport,
    /// Axioms checked on the fine-grained functional.
    pub axioms: AxiomReport,
    pub verdict: DecoherenceVerdict,
    pub timing: Timing,
}

impl AnalysisReport {
    pub fn probabilities(&self) -> Option<&[Probability]> {
        self.verdict.probabilities.as_deref()
    }
}

/// Validates `config` and runs it. Deterministic apart from `timing`.
pub fn run_analysis(config: &AnalysisConfig) -> Result<AnalysisReport, AnalysisError> {
    let start = Instant::now();
    config.validate()?;
    let tol = Tolerances::default();
    let built = model::build(config)?;

    let path_set;
    let (fine, formulation, source): (DecoherenceMatrix, Formulation, &dyn CoarseGrainable) =
        match &built.histories {
            BuiltHistories::Grid(grid) => (
                at(
                    "decoherence functional",
                    build_decoherence_functional(grid, &tol),
                )?,
                Formulation::Operator,
                grid,
            ),
            BuiltHistories::Paths {
                model, partition, ..
            } => {
                path_set = PathSumSet { model, partition };
                (
                    at("path sum", build_d_pathsum(model, partition))?,
                    Formulation::PathSum,
                    &path_set,
                )
            }
        };

    let extra: Vec<_> = built.coarse_graining.iter().cloned().collect();
    let axioms = at("axioms", check_axioms(&fine, Some(source), &extra, &tol))?;
    let d = match &built.coarse_graining {
        Some(map) => at("histories.coarse_graining", coarse_grain_d(&fine, map))?,
        None => fine.clone(),
    };
    let verdict = at(
        "analysis",
        decide(&d, config.criterion(), config.analysis.epsilon, &tol),
    )?;

    Ok(AnalysisReport {
        config: config.clone(),
        formulation,
        fine_histories: fine.len(),
        decoherence: MatrixReport::from_matrix(&d),
        axioms,
        verdict,
        timing: Timing {
            elapsed_seconds: start.elapsed().as_secs_f64(),
        },
    })
}

/// Max deviation between the path-sum and operator functionals.
pub fn run_oracle(config: &AnalysisConfig) -> Result<f64, AnalysisError> {
    config.validate()?;
    let built = model::build(config)?;
    match &built.histories {
        BuiltHistories::Paths {
            model,
            regions: Some(regions),
            ..
        } => at(
            "oracle",
            operator_equivalence_oracle(model, regions, &Tolerances::default()),
        ),
        _ => Err(AnalysisError::NoOracle),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::load_config;

    const XZ: &str = r#"{
        "model": {"kind": "qubit", "hamiltonian": "zero", "initial_state": {"basis": 0}},
        "histories": {"grid": {"times": [1.0, 2.0], "families": [{"pauli": {"axis": "x"}}, {"pauli": {"axis": "z"}}]}},
        "analysis": {"criterion": "medium", "epsilon": 1e-6}
    }"#;

    #[test]
    fn interference_not_decoherent() {
        let r = run_analysis(&load_config(XZ).unwrap()).unwrap();
        assert!(!r.verdict.decoherent);
        assert!((r.verdict.max_violation - 0.25).abs() < 1e-12);
        assert_eq!(r.decoherence.labels, ["0:0", "0:1", "1:0", "1:1"]);
        assert!(r.axioms.pass);
        assert_eq!(r.formulation, Formulation::Operator);
    }

    #[test]
    fn final_z_marginal_decoheres() {
        let text = XZ.replace(r#"]}},"#, r#"]}, "coarse_graining": {"slots": [1]}},"#);
        let r = run_analysis(&load_config(&text).unwrap()).unwrap();
        assert!(r.verdict.decoherent);
        assert_eq!(r.fine_histories, 4);
        assert!((r.verdict.probability("0").unwrap() - 1.0).abs() < 1e-12);
        assert!(r.verdict.probability("1").unwrap().abs() < 1e-12);
        assert_eq!(r.axioms.maps_checked, 5);
    }

    #[test]
    fn trivial_family_gives_unit_matrix() {
        let text = XZ
            .replace(
                r#"[{"pauli": {"axis": "x"}}, {"pauli": {"axis": "z"}}]"#,
                r#"["trivial"]"#,
            )
            .replace("[1.0, 2.0]", "[0.0]");
        let r = run_analysis(&load_config(&text).unwrap()).unwrap();
        assert_eq!(r.decoherence.entries, vec![vec![[1.0, 0.0]]]);
        assert_eq!(r.verdict.probability("0"), Some(1.0));
    }

    #[test]
    fn balanced_hop_lattice() {
        let text = r#"{
            "model": {"kind": "lattice-particle", "sites": 2,
                      "hamiltonian": {"tight_binding": {"hopping": 1.0}}, "initial_state": {"basis": 0}},
            "histories": {"paths": {"slices": 1, "dt": 0.7853981633974483,
                          "partition": {"regions": [{"slice": 1, "regions": [[0], [1]]}]}}}
        }"#;
        let c = load_config(text).unwrap();
        let r = run_analysis(&c).unwrap();
        assert_eq!(r.formulation, Formulation::PathSum);
        assert!(r.verdict.decoherent);
        for p in r.probabilities().unwrap() {
            assert!((p.p - 0.5).abs() < 1e-12);
        }
        assert!(run_oracle(&c).unwrap() < 1e-12);
    }

    #[test]
    fn oracle_refuses_grids() {
        assert!(matches!(
            run_oracle(&load_config(XZ).unwrap()),
            Err(AnalysisError::NoOracle)
        ));
    }
}

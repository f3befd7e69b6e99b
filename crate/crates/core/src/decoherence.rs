//! The decoherence functional, its axioms, and decoherence verdicts.
//!
//! Convention: D(α, α') = Tr(C_α ρ C_{α'}†). With class operators ordered
//! latest-time leftmost this puts the sequential (Copenhagen) probability on
//! the diagonal, and Σ_{α'} D(α, α') = Tr(C_α ρ) whenever Σ_α C_α = I.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::coarse::CoarseGrainingMap;
use crate::error::{Error, Result};
use crate::hilbert::{hermiticity_residual, trace, CMatrix, Tolerances};
use crate::histories::HistoryGrid;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    OperatorForm,
    PathSum,
    HandBuilt,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecoherenceMatrix {
    entries: CMatrix,
    labels: Vec<String>,
    provenance: Provenance,
}

impl DecoherenceMatrix {
    /// Wraps a square matrix with one label per row. Hermiticity is not
    /// enforced here; [`check_axioms`] reports it.
    pub fn from_entries(
        entries: CMatrix,
        labels: Vec<String>,
        provenance: Provenance,
    ) -> Result<Self> {
        if entries.nrows() != entries.ncols() {
            return Err(Error::NotSquare {
                rows: entries.nrows(),
                cols: entries.ncols(),
            });
        }
        if labels.len() != entries.nrows() {
            return Err(Error::LabelMismatch(format!(
                "{} labels for {} rows",
                labels.len(),
                entries.nrows()
            )));
        }
        let mut seen = std::collections::HashSet::new();
        if let Some(dup) = labels.iter().find(|l| !seen.insert(l.as_str())) {
            return Err(Error::LabelMismatch(format!("duplicate label {dup:?}")));
        }
        Ok(DecoherenceMatrix {
            entries,
            labels,
            provenance,
        })
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.entries[(row, col)]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn position(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Σ_{α,α'} D(α,α'), row-major.
    pub fn total(&self) -> Complex64 {
        let n = self.len();
        let mut s = Complex64::new(0.0, 0.0);
        for i in 0..n {
            for j in 0..n {
                s += self.entries[(i, j)];
            }
        }
        s
    }

    /// Σ_{α'} D(α,α') for each α.
    pub fn row_sums(&self) -> Vec<Complex64> {
        self.entries
            .row_iter()
            .map(|r| r.iter().sum::<Complex64>())
            .collect()
    }
}

/// D(α,α') = Tr(C_α ρ C_{α'}†) for the given class operators.
pub(crate) fn functional_from_operators(operators: &[CMatrix], rho: &CMatrix) -> CMatrix {
    let n = operators.len();
    let weighted: Vec<CMatrix> = operators.iter().map(|c| c * rho).collect();
    let mut d = CMatrix::zeros(n, n);
    for (i, x) in weighted.iter().enumerate() {
        for (j, c) in operators.iter().enumerate() {
            // Tr(X C†) = Σ_{kl} X_kl conj(C_kl)
            d[(i, j)] = x.iter().zip(c.iter()).map(|(a, b)| a * b.conj()).sum();
        }
    }
    d
}

fn require_complete(grid: &HistoryGrid, tol: &Tolerances) -> Result<()> {
    let residual = grid.completeness_check()?;
    if residual > tol.structural_tol {
        return Err(Error::IncompleteGrid { residual });
    }
    Ok(())
}

/// Decoherence functional of every history in the grid, in lexicographic
/// order. Refuses grids whose class operators do not sum to the identity.
pub fn build_decoherence_functional(
    grid: &HistoryGrid,
    tol: &Tolerances,
) -> Result<DecoherenceMatrix> {
    require_complete(grid, tol)?;
    let ops = grid.class_operators()?;
    DecoherenceMatrix::from_entries(
        functional_from_operators(&ops, grid.state().matrix()),
        grid.history_labels()?,
        Provenance::OperatorForm,
    )
}

/// D(ᾱ,ᾱ') = Σ_{α∈ᾱ} Σ_{α'∈ᾱ'} D(α,α'), accumulated in row-major fine order.
pub fn coarse_grain_d(d: &DecoherenceMatrix, map: &CoarseGrainingMap) -> Result<DecoherenceMatrix> {
    let cells = map.cells(d.labels())?;
    let k = cells.len();
    let mut out = CMatrix::zeros(k, k);
    for (i, &ci) in cells.cell_of.iter().enumerate() {
        for (j, &cj) in cells.cell_of.iter().enumerate() {
            out[(ci, cj)] += d.entries[(i, j)];
        }
    }
    DecoherenceMatrix::from_entries(out, cells.labels, d.provenance)
}

/// A fine-grained set that can rebuild the decoherence functional of any of
/// its coarse grainings from first principles, independently of
/// [`coarse_grain_d`].
pub trait CoarseGrainable {
    fn history_labels(&self) -> Result<Vec<String>>;

    fn coarse_grained_functional(
        &self,
        map: &CoarseGrainingMap,
        tol: &Tolerances,
    ) -> Result<DecoherenceMatrix>;

    /// Maps always checked by [`check_axioms`].
    fn standard_maps(&self) -> Result<Vec<CoarseGrainingMap>> {
        let labels = self.history_labels()?;
        Ok(vec![
            CoarseGrainingMap::identity(&labels)?,
            CoarseGrainingMap::all_to_one(&labels, "*")?,
        ])
    }
}

impl CoarseGrainable for HistoryGrid {
    fn history_labels(&self) -> Result<Vec<String>> {
        HistoryGrid::history_labels(self)
    }

    fn coarse_grained_functional(
        &self,
        map: &CoarseGrainingMap,
        tol: &Tolerances,
    ) -> Result<DecoherenceMatrix> {
        require_complete(self, tol)?;
        let coarse = self.coarse_grain_operators(map)?;
        DecoherenceMatrix::from_entries(
            functional_from_operators(&coarse.operators, self.state().matrix()),
            coarse.labels,
            Provenance::OperatorForm,
        )
    }

    /// Identity, all-to-one, and the marginal onto each single time slot.
    fn standard_maps(&self) -> Result<Vec<CoarseGrainingMap>> {
        let histories = self.enumerate_histories()?;
        let labels = HistoryGrid::history_labels(self)?;
        let mut maps = vec![
            CoarseGrainingMap::identity(&labels)?,
            CoarseGrainingMap::all_to_one(&labels, "*")?,
        ];
        for slot in 0..self.times().len() {
            maps.push(CoarseGrainingMap::marginal(&histories, &[slot])?);
        }
        Ok(maps)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AxiomReport {
    /// max |D(α,α') − D*(α',α)|
    pub hermiticity_residual: f64,
    /// |Σ D − 1|
    pub normalization_residual: f64,
    /// min Re D(α,α)
    pub positivity_min_diagonal: f64,
    /// max over maps of ‖coarse_grain_d − rebuilt coarse functional‖_max
    pub superposition_residual: f64,
    pub maps_checked: usize,
    pub pass: bool,
}

/// Checks Hermiticity, normalization, positivity and, when a fine-grained
/// `source` is given, consistency with superposition over its standard maps
/// plus `extra_maps`.
pub fn check_axioms(
    d: &DecoherenceMatrix,
    source: Option<&dyn CoarseGrainable>,
    extra_maps: &[CoarseGrainingMap],
    tol: &Tolerances,
) -> Result<AxiomReport> {
    let hermiticity_residual = hermiticity_residual(&d.entries);
    let normalization_residual = (d.total() - Complex64::new(1.0, 0.0)).norm();
    let positivity_min_diagonal = d
        .entries
        .diagonal()
        .iter()
        .map(|z| z.re)
        .fold(f64::INFINITY, f64::min);

    let mut superposition_residual = 0.0f64;
    let mut maps_checked = 0;
    if let Some(source) = source {
        let mut maps = source.standard_maps()?;
        maps.extend(extra_maps.iter().cloned());
        for map in &maps {
            let summed = coarse_grain_d(d, map)?;
            let rebuilt = source.coarse_grained_functional(map, tol)?;
            if summed.labels != rebuilt.labels {
                return Err(Error::LabelMismatch(
                    "coarse-grained labels differ between routes".into(),
                ));
            }
            let dev = crate::hilbert::max_abs(&(&summed.entries - &rebuilt.entries));
            superposition_residual = superposition_residual.max(dev);
            maps_checked += 1;
        }
    }

    let pass = hermiticity_residual <= tol.structural_tol
        && normalization_residual <= tol.structural_tol
        && positivity_min_diagonal >= -tol.structural_tol
        && superposition_residual <= tol.structural_tol;
    Ok(AxiomReport {
        hermiticity_residual,
        normalization_residual,
        positivity_min_diagonal,
        superposition_residual,
        maps_checked,
        pass,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Criterion {
    /// Every off-diagonal |D(α,α')| ≤ ε.
    Medium,
    /// Every off-diagonal |Re D(α,α')| ≤ ε.
    Weak,
    /// Every Re Tr(C_α ρ) ≥ −ε.
    #[serde(alias = "lp")]
    LinearPositivity,
}

impl FromStr for Criterion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "medium" => Ok(Criterion::Medium),
            "weak" => Ok(Criterion::Weak),
            "lp" | "linear-positivity" => Ok(Criterion::LinearPositivity),
            other => Err(Error::UnknownCriterion(other.to_string())),
        }
    }
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Criterion::Medium => "medium",
            Criterion::Weak => "weak",
            Criterion::LinearPositivity => "linear-positivity",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Probability {
    pub label: String,
    pub p: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecoherenceVerdict {
    pub criterion: Criterion,
    pub epsilon: f64,
    pub max_violation: f64,
    pub decoherent: bool,
    /// Present iff `decoherent`.
    pub probabilities: Option<Vec<Probability>>,
}

impl DecoherenceVerdict {
    pub fn probability(&self, label: &str) -> Option<f64> {
        self.probabilities
            .as_ref()?
            .iter()
            .find(|p| p.label == label)
            .map(|p| p.p)
    }
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "epsilon must be > 0, got {epsilon}"
        )));
    }
    Ok(())
}

fn verdict_from_candidates(
    criterion: Criterion,
    epsilon: f64,
    max_violation: f64,
    decoherent: bool,
    labels: &[String],
    candidates: impl Iterator<Item = f64>,
) -> DecoherenceVerdict {
    let probabilities = decoherent.then(|| {
        labels
            .iter()
            .cloned()
            .zip(candidates)
            .map(|(label, p)| Probability { label, p })
            .collect()
    });
    DecoherenceVerdict {
        criterion,
        epsilon,
        max_violation,
        decoherent,
        probabilities,
    }
}

fn linear_positivity_verdict(
    epsilon: f64,
    labels: &[String],
    candidates: Vec<f64>,
) -> DecoherenceVerdict {
    let min = candidates.iter().cloned().fold(f64::INFINITY, f64::min);
    let max_violation = (-min).max(0.0);
    verdict_from_candidates(
        Criterion::LinearPositivity,
        epsilon,
        max_violation,
        min >= -epsilon,
        labels,
        candidates.into_iter(),
    )
}

/// Decides whether `d` is decoherent under `criterion` at tolerance
/// `epsilon`. Probabilities are Re D(α,α) for medium and weak decoherence.
/// Linear positivity uses the row sums Re Σ_{α'} D(α,α'), which equal
/// Re Tr(C_α ρ) for a complete set.
pub fn decide(
    d: &DecoherenceMatrix,
    criterion: Criterion,
    epsilon: f64,
    tol: &Tolerances,
) -> Result<DecoherenceVerdict> {
    check_epsilon(epsilon)?;
    let residual = hermiticity_residual(&d.entries);
    if residual > tol.structural_tol {
        return Err(Error::NotHermitian {
            what: "decoherence matrix",
            residual,
        });
    }
    let n = d.len();
    let off_diagonal = |f: fn(Complex64) -> f64| {
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    worst = worst.max(f(d.entries[(i, j)]));
                }
            }
        }
        worst
    };
    let diagonal = || {
        d.entries
            .diagonal()
            .iter()
            .map(|z| z.re)
            .collect::<Vec<_>>()
    };
    Ok(match criterion {
        Criterion::Medium => {
            let v = off_diagonal(|z| z.norm());
            verdict_from_candidates(
                criterion,
                epsilon,
                v,
                v <= epsilon,
                &d.labels,
                diagonal().into_iter(),
            )
        }
        Criterion::Weak => {
            let v = off_diagonal(|z| z.re.abs());
            verdict_from_candidates(
                criterion,
                epsilon,
                v,
                v <= epsilon,
                &d.labels,
                diagonal().into_iter(),
            )
        }
        Criterion::LinearPositivity => linear_positivity_verdict(
            epsilon,
            &d.labels,
            d.row_sums().iter().map(|z| z.re).collect(),
        ),
    })
}

/// Linear-positivity verdict from the class operators directly:
/// p(α) = Re Tr(C_α ρ).
pub fn linear_positivity_probs(
    grid: &HistoryGrid,
    epsilon: f64,
    tol: &Tolerances,
) -> Result<DecoherenceVerdict> {
    check_epsilon(epsilon)?;
    require_complete(grid, tol)?;
    let rho = grid.state().matrix();
    let candidates = grid
        .class_operators()?
        .iter()
        .map(|c| trace(&(c * rho)).re)
        .collect();
    Ok(linear_positivity_verdict(
        epsilon,
        &grid.history_labels()?,
        candidates,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{CVector, DensityState, Hamiltonian, ProjectionFamily, Projector};
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn plus() -> CVector {
        CVector::from_vec(vec![c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0)])
    }

    fn x_family() -> ProjectionFamily {
        let s = FRAC_1_SQRT_2;
        ProjectionFamily::from_vectors(&[
            CVector::from_vec(vec![c(s, 0.0), c(s, 0.0)]),
            CVector::from_vec(vec![c(s, 0.0), c(-s, 0.0)]),
        ])
        .unwrap()
    }

    fn grid(families: Vec<ProjectionFamily>, state: DensityState) -> HistoryGrid {
        let times = (1..=families.len()).map(|k| k as f64).collect();
        HistoryGrid::new(
            times,
            families,
            Hamiltonian::zero(state.dimension()).unwrap(),
            state,
            &Tolerances::default(),
        )
        .unwrap()
    }

    fn interference_grid() -> HistoryGrid {
        grid(
            vec![
                x_family(),
                ProjectionFamily::computational_basis(2).unwrap(),
            ],
            DensityState::pure(&CVector::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0)])).unwrap(),
        )
    }

    fn hand_built(entries: &[f64]) -> DecoherenceMatrix {
        let n = (entries.len() as f64).sqrt() as usize;
        let m = CMatrix::from_row_slice(
            n,
            n,
            &entries.iter().map(|&x| c(x, 0.0)).collect::<Vec<_>>(),
        );
        DecoherenceMatrix::from_entries(
            m,
            (0..n).map(|k| k.to_string()).collect(),
            Provenance::HandBuilt,
        )
        .unwrap()
    }

    #[test]
    fn single_time_born_rule() {
        let g = grid(
            vec![ProjectionFamily::computational_basis(2).unwrap()],
            DensityState::pure(&plus()).unwrap(),
        );
        let d = build_decoherence_functional(&g, &Tolerances::default()).unwrap();
        assert!((d.entry(0, 0) - c(0.5, 0.0)).norm() < 1e-15);
        assert!((d.entry(1, 1) - c(0.5, 0.0)).norm() < 1e-15);
        assert!(d.entry(0, 1).norm() < 1e-15);
        let v = decide(&d, Criterion::Medium, 1e-8, &Tolerances::default()).unwrap();
        assert!(v.decoherent);
        assert!((v.probability("0").unwrap() - 0.5).abs() < 1e-15);
        assert!((v.probability("1").unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn interference_example_entries() {
        let d = build_decoherence_functional(&interference_grid(), &Tolerances::default()).unwrap();
        assert_eq!(d.labels(), &["0:0", "0:1", "1:0", "1:1"]);
        for k in 0..4 {
            assert!((d.entry(k, k).re - 0.25).abs() < 1e-15);
        }
        let plus0 = d.position("0:0").unwrap();
        let minus0 = d.position("1:0").unwrap();
        assert!((d.entry(plus0, minus0).norm() - 0.25).abs() < 1e-15);
        for (i, a) in d.labels().iter().enumerate() {
            for (j, b) in d.labels().iter().enumerate() {
                if a.ends_with('0') != b.ends_with('0') {
                    assert!(d.entry(i, j).norm() < 1e-15);
                }
            }
        }
        let v = decide(&d, Criterion::Medium, 1e-6, &Tolerances::default()).unwrap();
        assert!(!v.decoherent);
        assert!((v.max_violation - 0.25).abs() < 1e-15);
        assert!(v.probabilities.is_none());
    }

    #[test]
    fn interference_coarse_grained_by_final_value() {
        let g = interference_grid();
        let tol = Tolerances::default();
        let d = build_decoherence_functional(&g, &tol).unwrap();
        let map = CoarseGrainingMap::marginal(&g.enumerate_histories().unwrap(), &[1]).unwrap();
        let coarse = coarse_grain_d(&d, &map).unwrap();
        assert!((coarse.entry(0, 0) - c(1.0, 0.0)).norm() < 1e-15);
        assert!(coarse.entry(1, 1).norm() < 1e-15);
        assert!(coarse.entry(0, 1).norm() < 1e-15);
        let rebuilt = g.coarse_grained_functional(&map, &tol).unwrap();
        assert!(crate::hilbert::max_abs(&(coarse.entries() - rebuilt.entries())) < 1e-15);
        let v = decide(&coarse, Criterion::Medium, 1e-8, &tol).unwrap();
        assert!(v.decoherent);
        assert!((v.probability("0").unwrap() - 1.0).abs() < 1e-15);
        assert!(v.probability("1").unwrap().abs() < 1e-15);
    }

    #[test]
    fn trivial_family_gives_unit_functional() {
        let g = grid(
            vec![
                ProjectionFamily::trivial(3).unwrap(),
                ProjectionFamily::trivial(3).unwrap(),
            ],
            DensityState::diagonal(&[0.2, 0.3, 0.5], &Tolerances::default()).unwrap(),
        );
        let d = build_decoherence_functional(&g, &Tolerances::default()).unwrap();
        assert_eq!(d.len(), 1);
        assert!((d.entry(0, 0) - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn incomplete_grid_refused() {
        let partial =
            ProjectionFamily::new(vec![Projector::onto_basis_states(2, &[0], "0").unwrap()])
                .unwrap();
        let tol = Tolerances::default();
        let g = HistoryGrid::new_unvalidated(
            vec![0.0],
            vec![partial],
            Hamiltonian::zero(2).unwrap(),
            DensityState::pure(&plus()).unwrap(),
        )
        .unwrap();
        assert!(matches!(
            build_decoherence_functional(&g, &tol),
            Err(Error::IncompleteGrid { residual }) if (residual - 1.0).abs() < 1e-15
        ));
        assert!(matches!(
            linear_positivity_probs(&g, 1e-8, &tol),
            Err(Error::IncompleteGrid { .. })
        ));
    }

    #[test]
    fn axioms_on_built_functional() {
        let g = interference_grid();
        let tol = Tolerances::default();
        let d = build_decoherence_functional(&g, &tol).unwrap();
        let r = check_axioms(&d, Some(&g), &[], &tol).unwrap();
        assert!(r.pass, "{r:?}");
        assert_eq!(r.maps_checked, 4);
    }

    #[test]
    fn hand_built_axiom_failures() {
        let tol = Tolerances::default();
        let r = check_axioms(&hand_built(&[0.6, 0.0, 0.0, 0.5]), None, &[], &tol).unwrap();
        assert!((r.normalization_residual - 0.1).abs() < 1e-12);
        assert!(!r.pass);

        let r = check_axioms(&hand_built(&[0.35, 0.2, 0.1, 0.35]), None, &[], &tol).unwrap();
        assert!((r.hermiticity_residual - 0.1).abs() < 1e-12);
        assert!(!r.pass);

        let r = check_axioms(&hand_built(&[1.1, 0.0, 0.0, -0.1]), None, &[], &tol).unwrap();
        assert!((r.positivity_min_diagonal + 0.1).abs() < 1e-12);
        assert!(!r.pass);
    }

    #[test]
    fn coarse_grain_identity_and_all() {
        let d = build_decoherence_functional(&interference_grid(), &Tolerances::default()).unwrap();
        let id = coarse_grain_d(&d, &CoarseGrainingMap::identity(d.labels()).unwrap()).unwrap();
        assert_eq!(id, d);
        let all =
            coarse_grain_d(&d, &CoarseGrainingMap::all_to_one(d.labels(), "*").unwrap()).unwrap();
        assert!((all.entry(0, 0) - c(1.0, 0.0)).norm() < 1e-15);
        let partial = CoarseGrainingMap::identity(&d.labels()[..3]).unwrap();
        assert!(matches!(
            coarse_grain_d(&d, &partial),
            Err(Error::Coverage { .. })
        ));
    }

    #[test]
    fn linear_positivity_example() {
        let g = interference_grid();
        let tol = Tolerances::default();
        let v = linear_positivity_probs(&g, 1e-8, &tol).unwrap();
        assert!(v.decoherent);
        for (label, expected) in [("0:0", 0.5), ("1:0", 0.5), ("0:1", 0.0), ("1:1", 0.0)] {
            assert!(
                (v.probability(label).unwrap() - expected).abs() < 1e-15,
                "{label}"
            );
        }
        let d = build_decoherence_functional(&g, &tol).unwrap();
        let via_rows = decide(&d, Criterion::LinearPositivity, 1e-8, &tol).unwrap();
        for (a, b) in via_rows
            .probabilities
            .unwrap()
            .iter()
            .zip(v.probabilities.unwrap())
        {
            assert!((a.p - b.p).abs() < 1e-15);
        }
    }

    #[test]
    fn linear_positivity_can_fail() {
        // Row sums with a negative candidate.
        let d = hand_built(&[0.3, -0.4, -0.4, 1.5]);
        let v = decide(
            &d,
            Criterion::LinearPositivity,
            1e-8,
            &Tolerances::default(),
        )
        .unwrap();
        assert!(!v.decoherent);
        assert!((v.max_violation - 0.1).abs() < 1e-12);
    }

    #[test]
    fn weak_ignores_imaginary_offdiagonal() {
        let m =
            CMatrix::from_row_slice(2, 2, &[c(0.5, 0.0), c(0.0, 0.2), c(0.0, -0.2), c(0.5, 0.0)]);
        let d =
            DecoherenceMatrix::from_entries(m, vec!["a".into(), "b".into()], Provenance::HandBuilt)
                .unwrap();
        let tol = Tolerances::default();
        assert!(
            !decide(&d, Criterion::Medium, 1e-8, &tol)
                .unwrap()
                .decoherent
        );
        let weak = decide(&d, Criterion::Weak, 1e-8, &tol).unwrap();
        assert!(weak.decoherent);
        assert_eq!(weak.probability("a"), Some(0.5));
    }

    #[test]
    fn decide_rejects_bad_input() {
        let tol = Tolerances::default();
        assert!(matches!(
            decide(
                &hand_built(&[0.5, 0.2, 0.1, 0.5]),
                Criterion::Medium,
                1e-8,
                &tol
            ),
            Err(Error::NotHermitian { .. })
        ));
        assert!(decide(&hand_built(&[1.0]), Criterion::Medium, 0.0, &tol).is_err());
        assert!(matches!(
            "strong".parse::<Criterion>(),
            Err(Error::UnknownCriterion(_))
        ));
        assert_eq!(
            "lp".parse::<Criterion>().unwrap(),
            Criterion::LinearPositivity
        );
    }
}

//! History grids and class operators.
//!
//! A grid fixes times t_1 < … < t_n with one projection family per time.
//! The class operator of a history α = (α_1, …, α_n) is the time-ordered
//! product of Heisenberg projectors with the latest time leftmost:
//! C_α = P_{α_n}(t_n) ⋯ P_{α_1}(t_1).

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::coarse::CoarseGrainingMap;
use crate::error::{Error, Result};
use crate::hilbert::{
    heisenberg_projector, identity, max_abs, CMatrix, DensityState, Hamiltonian, ProjectionFamily,
    Projector, Tolerances,
};

/// Cap on the number of histories (or paths) enumerated explicitly.
pub const ENUMERATION_CAP: u128 = 1_000_000;

/// One alternative per time slot, in time order (α_1 first).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct HistoryIndex(Vec<usize>);

impl HistoryIndex {
    pub fn new(alphas: Vec<usize>) -> Self {
        HistoryIndex(alphas)
    }

    pub fn alphas(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Slots joined by ':' ("0:1" for α_1 = 0, α_2 = 1).
impl fmt::Display for HistoryIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, a) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(":")?;
            }
            write!(f, "{a}")?;
        }
        Ok(())
    }
}

/// All tuples over the given slot sizes, lexicographic with the first slot
/// most significant.
pub fn enumerate_indices(sizes: &[usize]) -> Result<Vec<HistoryIndex>> {
    let count = sizes.iter().map(|&s| s as u128).product::<u128>();
    if count > ENUMERATION_CAP {
        return Err(Error::TooMany {
            count,
            cap: ENUMERATION_CAP,
        });
    }
    let mut out = Vec::with_capacity(count as usize);
    if count == 0 {
        return Ok(out);
    }
    let mut current = vec![0usize; sizes.len()];
    loop {
        out.push(HistoryIndex(current.clone()));
        let mut slot = sizes.len();
        loop {
            if slot == 0 {
                return Ok(out);
            }
            slot -= 1;
            current[slot] += 1;
            if current[slot] < sizes[slot] {
                break;
            }
            current[slot] = 0;
        }
    }
}

#[derive(Debug, Clone)]
pub struct HistoryGrid {
    times: Vec<f64>,
    families: Vec<ProjectionFamily>,
    hamiltonian: Hamiltonian,
    state: DensityState,
    // Heisenberg-picture projectors, [slot][alternative]
    evolved: Vec<Vec<Projector>>,
}

/// Class operators of a coarse-grained set, one per bar label.
#[derive(Debug, Clone)]
pub struct CoarseOperators {
    pub labels: Vec<String>,
    pub operators: Vec<CMatrix>,
}

impl HistoryGrid {
    /// Builds a grid whose families all pass [`ProjectionFamily::validate`].
    pub fn new(
        times: Vec<f64>,
        families: Vec<ProjectionFamily>,
        hamiltonian: Hamiltonian,
        state: DensityState,
        tol: &Tolerances,
    ) -> Result<Self> {
        for (slot, family) in families.iter().enumerate() {
            let report = family.validate(tol);
            if !report.pass {
                return Err(Error::InvalidFamily {
                    slot,
                    completeness: report.completeness_residual,
                    exclusivity: report.exclusivity_residual,
                });
            }
        }
        Self::new_unvalidated(times, families, hamiltonian, state)
    }

    /// Like [`HistoryGrid::new`] but accepts families that are not
    /// exhaustive or not exclusive. Downstream functional construction still
    /// refuses incomplete grids.
    pub fn new_unvalidated(
        times: Vec<f64>,
        families: Vec<ProjectionFamily>,
        hamiltonian: Hamiltonian,
        state: DensityState,
    ) -> Result<Self> {
        if times.is_empty() {
            return Err(Error::EmptyGrid);
        }
        if times.len() != families.len() {
            return Err(Error::InvalidParameter(format!(
                "{} times but {} families",
                times.len(),
                families.len()
            )));
        }
        if times.iter().any(|t| !t.is_finite()) {
            return Err(Error::NonFinite("time"));
        }
        for (slot, w) in times.windows(2).enumerate() {
            if w[1] <= w[0] {
                return Err(Error::TimesNotIncreasing {
                    slot: slot + 1,
                    previous: w[0],
                    next: w[1],
                });
            }
        }
        let dim = hamiltonian.dimension();
        for f in &families {
            if f.dimension() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: f.dimension(),
                });
            }
        }
        if state.dimension() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: state.dimension(),
            });
        }
        let evolved = times
            .iter()
            .zip(&families)
            .map(|(&t, f)| {
                f.projectors()
                    .iter()
                    .map(|p| heisenberg_projector(p, &hamiltonian, t))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(HistoryGrid {
            times,
            families,
            hamiltonian,
            state,
            evolved,
        })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn families(&self) -> &[ProjectionFamily] {
        &self.families
    }

    pub fn hamiltonian(&self) -> &Hamiltonian {
        &self.hamiltonian
    }

    pub fn state(&self) -> &DensityState {
        &self.state
    }

    pub fn dimension(&self) -> usize {
        self.hamiltonian.dimension()
    }

    pub fn family_sizes(&self) -> Vec<usize> {
        self.families.iter().map(ProjectionFamily::len).collect()
    }

    /// P_k(t_j) for slot `j`, alternative `k`.
    pub fn heisenberg_projector(&self, slot: usize, alternative: usize) -> Option<&Projector> {
        self.evolved.get(slot)?.get(alternative)
    }

    pub fn enumerate_histories(&self) -> Result<Vec<HistoryIndex>> {
        enumerate_indices(&self.family_sizes())
    }

    pub fn history_labels(&self) -> Result<Vec<String>> {
        Ok(self
            .enumerate_histories()?
            .iter()
            .map(HistoryIndex::to_string)
            .collect())
    }

    fn check_index(&self, a: &HistoryIndex) -> Result<()> {
        if a.len() != self.times.len() {
            return Err(Error::InvalidIndex {
                index: a.to_string(),
                reason: format!("expected {} slots", self.times.len()),
            });
        }
        for (slot, (&alpha, family)) in a.alphas().iter().zip(&self.families).enumerate() {
            if alpha >= family.len() {
                return Err(Error::InvalidIndex {
                    index: a.to_string(),
                    reason: format!("slot {slot} has {} alternatives, got {alpha}", family.len()),
                });
            }
        }
        Ok(())
    }

    /// C_α = P_{α_n}(t_n) ⋯ P_{α_1}(t_1).
    pub fn class_operator(&self, a: &HistoryIndex) -> Result<CMatrix> {
        self.check_index(a)?;
        let mut slots = a.alphas().iter().enumerate();
        let (_, &first) = slots.next().expect("grid has at least one slot");
        let mut c = self.evolved[0][first].matrix().clone();
        for (slot, &alpha) in slots {
            c = self.evolved[slot][alpha].matrix() * c;
        }
        Ok(c)
    }

    /// All class operators in lexicographic history order.
    pub fn class_operators(&self) -> Result<Vec<CMatrix>> {
        self.enumerate_histories()?
            .iter()
            .map(|a| self.class_operator(a))
            .collect()
    }

    /// ‖Σ_α C_α − I‖_max.
    pub fn completeness_check(&self) -> Result<f64> {
        let n = self.dimension();
        let mut sum = CMatrix::zeros(n, n);
        for c in self.class_operators()? {
            sum += c;
        }
        Ok(max_abs(&(sum - identity(n))))
    }

    /// C_ᾱ = Σ_{α∈ᾱ} C_α, summed in lexicographic order of α.
    pub fn coarse_grain_operators(&self, map: &CoarseGrainingMap) -> Result<CoarseOperators> {
        let labels = self.history_labels()?;
        let cells = map.cells(&labels)?;
        let n = self.dimension();
        let mut operators = vec![CMatrix::zeros(n, n); cells.len()];
        for (c, &cell) in self.class_operators()?.into_iter().zip(&cells.cell_of) {
            operators[cell] += c;
        }
        Ok(CoarseOperators {
            labels: cells.labels,
            operators,
        })
    }
}

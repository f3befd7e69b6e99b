//! Records for pure initial states: orthogonal projectors that pick out
//! exactly one branch C_α|ψ⟩ of the state.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hilbert::{outer, CMatrix, CVector, Projector, Tolerances};
use crate::histories::HistoryGrid;

#[derive(Debug, Clone)]
pub struct BranchRecord {
    pub label: String,
    /// C_α|ψ⟩
    pub branch: CVector,
    /// Zero projector for null branches.
    pub record: Projector,
}

/// Branch vectors C_α|ψ⟩ in lexicographic history order.
pub fn branch_vectors(grid: &HistoryGrid, tol: &Tolerances) -> Result<Vec<(String, CVector)>> {
    let psi = grid.state().pure_vector(tol)?;
    let labels = grid.history_labels()?;
    let ops = grid.class_operators()?;
    Ok(labels
        .into_iter()
        .zip(ops.iter().map(|c| c * &psi))
        .collect())
}

/// Builds one record per history when the branches are pairwise orthogonal
/// to `epsilon`, i.e. |⟨C_α ψ|C_β ψ⟩| ≤ ε for α ≠ β. Branches with norm at
/// most `tol.structural_tol` get the zero projector. Directions are
/// orthonormalized in history order so the records are mutually orthogonal.
pub fn branch_records(
    grid: &HistoryGrid,
    epsilon: f64,
    tol: &Tolerances,
) -> Result<Vec<BranchRecord>> {
    let branches = branch_vectors(grid, tol)?;

    let mut worst: Option<(f64, f64, usize, usize)> = None;
    for i in 0..branches.len() {
        for j in (i + 1)..branches.len() {
            let overlap = branches[i].1.dotc(&branches[j].1).norm();
            if worst.is_none_or(|w| overlap > w.0) {
                let norms = branches[i].1.norm() * branches[j].1.norm();
                let normalized = if norms > 0.0 { overlap / norms } else { 0.0 };
                worst = Some((overlap, normalized, i, j));
            }
        }
    }
    if let Some((max_overlap, normalized_overlap, i, j)) = worst {
        if max_overlap > epsilon {
            return Err(Error::BranchesOverlap {
                max_overlap,
                normalized_overlap,
                first: branches[i].0.clone(),
                second: branches[j].0.clone(),
            });
        }
    }

    let dim = grid.dimension();
    let mut directions: Vec<CVector> = Vec::new();
    let mut out = Vec::with_capacity(branches.len());
    for (label, branch) in branches {
        let record = if branch.norm() <= tol.structural_tol {
            CMatrix::zeros(dim, dim)
        } else {
            let mut v = branch.clone();
            for e in &directions {
                let proj = e.dotc(&v);
                v -= e * proj;
            }
            let v = &v / Complex64::new(v.norm(), 0.0);
            let r = outer(&v);
            directions.push(v);
            r
        };
        out.push(BranchRecord {
            record: Projector::new_unchecked(record, label.clone()),
            label,
            branch,
        });
    }
    Ok(out)
}

//! Finite-dimensional Hilbert-space substrate: states, projectors,
//! Hamiltonians and unitary evolution with ħ = 1.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Largest supported Hilbert-space dimension.
pub const MAX_DIMENSION: usize = 64;

/// Numerical thresholds used by validity checks and decoherence verdicts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Threshold for structural identities (Hermiticity, idempotence, traces).
    pub structural_tol: f64,
    /// Default ε for "approximately diagonal" decoherence decisions.
    pub decoherence_eps: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            structural_tol: 1e-10,
            decoherence_eps: 1e-8,
        }
    }
}

impl Tolerances {
    pub fn new(structural_tol: f64, decoherence_eps: f64) -> Result<Self> {
        if !(structural_tol > 0.0 && structural_tol.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "structural_tol must be > 0, got {structural_tol}"
            )));
        }
        if !(decoherence_eps > 0.0 && decoherence_eps.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "decoherence_eps must be > 0, got {decoherence_eps}"
            )));
        }
        Ok(Tolerances {
            structural_tol,
            decoherence_eps,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HilbertSpace {
    dimension: usize,
    basis_labels: Vec<String>,
}

impl HilbertSpace {
    pub fn new(basis_labels: Vec<String>) -> Result<Self> {
        let dimension = basis_labels.len();
        check_dimension(dimension)?;
        let mut seen = std::collections::HashSet::new();
        for label in &basis_labels {
            if !seen.insert(label.as_str()) {
                return Err(Error::BadLabels(format!("duplicate label {label:?}")));
            }
        }
        Ok(HilbertSpace {
            dimension,
            basis_labels,
        })
    }

    /// Space with basis labels "0", "1", ..., "dimension-1".
    pub fn numbered(dimension: usize) -> Result<Self> {
        Self::new((0..dimension).map(|k| k.to_string()).collect())
    }

    /// Tensor product of `n` qubits, labelled by bit strings ("00", "01", ...).
    pub fn qubits(n: usize) -> Result<Self> {
        if n == 0 || n > 6 {
            return Err(Error::DimensionOutOfRange(
                1usize.checked_shl(n as u32).unwrap_or(0),
            ));
        }
        Self::new(
            (0..1usize << n)
                .map(|k| format!("{:0width$b}", k, width = n))
                .collect(),
        )
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn basis_labels(&self) -> &[String] {
        &self.basis_labels
    }

    pub fn basis_ket(&self, k: usize) -> Result<CVector> {
        basis_ket(self.dimension, k)
    }
}

pub(crate) fn check_dimension(dimension: usize) -> Result<()> {
    if dimension == 0 || dimension > MAX_DIMENSION {
        return Err(Error::DimensionOutOfRange(dimension));
    }
    Ok(())
}

fn check_square(m: &CMatrix) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    check_dimension(m.nrows())?;
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite("matrix"));
    }
    Ok(m.nrows())
}

fn check_same_dim(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// Max entrywise modulus, ‖·‖_max.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// ‖A - A†‖_max.
pub fn hermiticity_residual(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn identity(dimension: usize) -> CMatrix {
    CMatrix::identity(dimension, dimension)
}

pub fn basis_ket(dimension: usize, k: usize) -> Result<CVector> {
    if k >= dimension {
        return Err(Error::SiteOutOfRange {
            site: k,
            sites: dimension,
        });
    }
    let mut v = CVector::zeros(dimension);
    v[k] = Complex64::new(1.0, 0.0);
    Ok(v)
}

/// |v⟩⟨v|.
pub fn outer(v: &CVector) -> CMatrix {
    v * v.adjoint()
}

/// Sum of the diagonal.
pub fn trace(m: &CMatrix) -> Complex64 {
    m.diagonal().iter().sum()
}

/// The initial condition ρ: Hermitian, positive semidefinite, unit trace.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityState {
    matrix: CMatrix,
}

impl DensityState {
    pub fn new(matrix: CMatrix, tol: &Tolerances) -> Result<Self> {
        check_square(&matrix)?;
        let residual = hermiticity_residual(&matrix);
        if residual > tol.structural_tol {
            return Err(Error::NotHermitian {
                what: "density matrix",
                residual,
            });
        }
        let tr = trace(&matrix);
        if (tr - Complex64::new(1.0, 0.0)).norm() > tol.structural_tol {
            return Err(Error::TraceNotUnit { trace: tr.re });
        }
        let min_eigenvalue = hermitian_part(&matrix)
            .symmetric_eigenvalues()
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min);
        if min_eigenvalue < -tol.structural_tol {
            return Err(Error::NotPositive { min_eigenvalue });
        }
        Ok(DensityState { matrix })
    }

    /// Pure state |ψ⟩⟨ψ|; the vector is normalized first.
    pub fn pure(psi: &CVector) -> Result<Self> {
        check_dimension(psi.len())?;
        let norm = psi.norm();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::InvalidParameter("state vector has zero norm".into()));
        }
        let psi = psi / Complex64::new(norm, 0.0);
        Ok(DensityState {
            matrix: outer(&psi),
        })
    }

    /// Diagonal mixture with the given weights, which must sum to one.
    pub fn diagonal(weights: &[f64], tol: &Tolerances) -> Result<Self> {
        let m = CMatrix::from_diagonal(&CVector::from_iterator(
            weights.len(),
            weights.iter().map(|&w| Complex64::new(w, 0.0)),
        ));
        Self::new(m, tol)
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dimension(&self) -> usize {
        self.matrix.nrows()
    }

    /// The state vector when ρ has rank one to `tol`, else the
    /// second-largest eigenvalue as the error payload.
    pub fn pure_vector(&self, tol: &Tolerances) -> Result<CVector> {
        let eig = hermitian_part(&self.matrix).symmetric_eigen();
        let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
        let second = order.get(1).map(|&k| eig.eigenvalues[k]).unwrap_or(0.0);
        if second.abs() > tol.structural_tol
            || (eig.eigenvalues[order[0]] - 1.0).abs() > tol.structural_tol
        {
            return Err(Error::MixedState {
                second_eigenvalue: second,
            });
        }
        Ok(eig.eigenvectors.column(order[0]).into_owned())
    }
}

fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * Complex64::new(0.5, 0.0)
}

/// Orthogonal projector with a human-readable label.
#[derive(Debug, Clone, PartialEq)]
pub struct Projector {
    matrix: CMatrix,
    label: String,
}

impl Projector {
    pub fn new(matrix: CMatrix, label: impl Into<String>, tol: &Tolerances) -> Result<Self> {
        let label = label.into();
        check_square(&matrix)?;
        let residual = hermiticity_residual(&matrix);
        if residual > tol.structural_tol {
            return Err(Error::NotHermitian {
                what: "projector",
                residual,
            });
        }
        let residual = max_abs(&(&matrix * &matrix - &matrix));
        if residual > tol.structural_tol {
            return Err(Error::NotIdempotent { label, residual });
        }
        Ok(Projector { matrix, label })
    }

    pub(crate) fn new_unchecked(matrix: CMatrix, label: String) -> Self {
        Projector { matrix, label }
    }

    /// Projector onto the span of the listed computational-basis states.
    pub fn onto_basis_states(
        dimension: usize,
        states: &[usize],
        label: impl Into<String>,
    ) -> Result<Self> {
        check_dimension(dimension)?;
        let mut m = CMatrix::zeros(dimension, dimension);
        for &k in states {
            if k >= dimension {
                return Err(Error::SiteOutOfRange {
                    site: k,
                    sites: dimension,
                });
            }
            m[(k, k)] = Complex64::new(1.0, 0.0);
        }
        Ok(Projector {
            matrix: m,
            label: label.into(),
        })
    }

    /// Projector |v⟩⟨v| / ⟨v|v⟩.
    pub fn onto_vector(v: &CVector, label: impl Into<String>) -> Result<Self> {
        check_dimension(v.len())?;
        let norm = v.norm();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::InvalidParameter(
                "projector vector has zero norm".into(),
            ));
        }
        let v = v / Complex64::new(norm, 0.0);
        Ok(Projector {
            matrix: outer(&v),
            label: label.into(),
        })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dimension(&self) -> usize {
        self.matrix.nrows()
    }

    /// Tr P; equals the rank for an exact projector.
    pub fn trace(&self) -> f64 {
        trace(&self.matrix).re
    }
}

/// Hermitian generator of the dynamics (ħ = 1).
///
/// The eigendecomposition is computed once at construction and reused for
/// every evolution operator.
#[derive(Debug, Clone)]
pub struct Hamiltonian {
    matrix: CMatrix,
    eigenvalues: Vec<f64>,
    eigenvectors: CMatrix,
}

impl PartialEq for Hamiltonian {
    fn eq(&self, other: &Self) -> bool {
        self.matrix == other.matrix
    }
}

impl Hamiltonian {
    pub fn new(matrix: CMatrix, tol: &Tolerances) -> Result<Self> {
        check_square(&matrix)?;
        let residual = hermiticity_residual(&matrix);
        if residual > tol.structural_tol {
            return Err(Error::NotHermitian {
                what: "Hamiltonian",
                residual,
            });
        }
        let eig = hermitian_part(&matrix).symmetric_eigen();
        Ok(Hamiltonian {
            matrix,
            eigenvalues: eig.eigenvalues.iter().cloned().collect(),
            eigenvectors: eig.eigenvectors,
        })
    }

    pub fn zero(dimension: usize) -> Result<Self> {
        Self::new(CMatrix::zeros(dimension, dimension), &Tolerances::default())
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dimension(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }
}

/// U(t) = exp(-iHt), assembled as V exp(-iΛt) V† from the Hermitian
/// eigendecomposition of H.
pub fn evolution_operator(h: &Hamiltonian, t: f64) -> Result<CMatrix> {
    if !t.is_finite() {
        return Err(Error::NonFinite("time"));
    }
    if t == 0.0 {
        return Ok(identity(h.dimension()));
    }
    let v = &h.eigenvectors;
    let mut scaled = v.clone();
    for (k, &lambda) in h.eigenvalues.iter().enumerate() {
        let phase = Complex64::from_polar(1.0, -lambda * t);
        for z in scaled.column_mut(k).iter_mut() {
            *z *= phase;
        }
    }
    Ok(scaled * v.adjoint())
}

/// Heisenberg-picture projector P(t) = U†(t) P U(t).
pub fn heisenberg_projector(p: &Projector, h: &Hamiltonian, t: f64) -> Result<Projector> {
    check_same_dim(h.dimension(), p.dimension())?;
    let u = evolution_operator(h, t)?;
    let evolved = u.adjoint() * p.matrix() * &u;
    Ok(Projector::new_unchecked(evolved, p.label.clone()))
}

/// Completeness and exclusivity residuals of a candidate family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FamilyReport {
    /// ‖Σ_k P_k − I‖_max
    pub completeness_residual: f64,
    /// max_{j≠k} ‖P_j P_k‖_max
    pub exclusivity_residual: f64,
    pub pass: bool,
}

pub fn validate_family(ps: &[Projector], tol: &Tolerances) -> FamilyReport {
    let Some(first) = ps.first() else {
        return FamilyReport {
            completeness_residual: f64::INFINITY,
            exclusivity_residual: 0.0,
            pass: false,
        };
    };
    let n = first.dimension();
    if ps.iter().any(|p| p.dimension() != n) {
        return FamilyReport {
            completeness_residual: f64::INFINITY,
            exclusivity_residual: f64::INFINITY,
            pass: false,
        };
    }
    let mut sum = CMatrix::zeros(n, n);
    for p in ps {
        sum += p.matrix();
    }
    let completeness_residual = max_abs(&(sum - identity(n)));
    let mut exclusivity_residual = 0.0f64;
    for (j, pj) in ps.iter().enumerate() {
        for (k, pk) in ps.iter().enumerate() {
            if j != k {
                exclusivity_residual =
                    exclusivity_residual.max(max_abs(&(pj.matrix() * pk.matrix())));
            }
        }
    }
    FamilyReport {
        completeness_residual,
        exclusivity_residual,
        pass: completeness_residual <= tol.structural_tol
            && exclusivity_residual <= tol.structural_tol,
    }
}

/// The alternatives {P_k} available at one time.
///
/// Construction only checks that the family is nonempty and that the
/// dimensions agree; exhaustiveness and exclusivity are reported by
/// [`ProjectionFamily::validate`].
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionFamily {
    projectors: Vec<Projector>,
}

impl ProjectionFamily {
    pub fn new(projectors: Vec<Projector>) -> Result<Self> {
        let first = projectors.first().ok_or(Error::EmptyFamily)?;
        let n = first.dimension();
        for p in &projectors {
            check_same_dim(n, p.dimension())?;
        }
        Ok(ProjectionFamily { projectors })
    }

    /// The single-member family {I}.
    pub fn trivial(dimension: usize) -> Result<Self> {
        check_dimension(dimension)?;
        Self::new(vec![Projector::new_unchecked(
            identity(dimension),
            "I".to_string(),
        )])
    }

    /// One rank-one projector per computational-basis state.
    pub fn computational_basis(dimension: usize) -> Result<Self> {
        check_dimension(dimension)?;
        Self::new(
            (0..dimension)
                .map(|k| Projector::onto_basis_states(dimension, &[k], k.to_string()))
                .collect::<Result<_>>()?,
        )
    }

    /// Projectors onto groups of computational-basis states. The groups are
    /// not required to cover or be disjoint; see [`ProjectionFamily::validate`].
    pub fn from_regions(dimension: usize, regions: &[Vec<usize>]) -> Result<Self> {
        Self::new(
            regions
                .iter()
                .enumerate()
                .map(|(k, r)| Projector::onto_basis_states(dimension, r, k.to_string()))
                .collect::<Result<_>>()?,
        )
    }

    /// Rank-one projectors onto the given vectors.
    pub fn from_vectors(vectors: &[CVector]) -> Result<Self> {
        Self::new(
            vectors
                .iter()
                .enumerate()
                .map(|(k, v)| Projector::onto_vector(v, k.to_string()))
                .collect::<Result<_>>()?,
        )
    }

    pub fn projectors(&self) -> &[Projector] {
        &self.projectors
    }

    pub fn len(&self) -> usize {
        self.projectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.projectors.is_empty()
    }

    pub fn dimension(&self) -> usize {
        self.projectors[0].dimension()
    }

    pub fn validate(&self, tol: &Tolerances) -> FamilyReport {
        validate_family(&self.projectors, tol)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn ket_plus() -> CVector {
        CVector::from_vec(vec![c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0)])
    }

    #[test]
    fn zero_generator_gives_identity() {
        let h = Hamiltonian::zero(2).unwrap();
        let u = evolution_operator(&h, 1.7).unwrap();
        assert!(max_abs(&(u - identity(2))) < 1e-15);
    }

    #[test]
    fn phase_on_second_level() {
        let h = Hamiltonian::new(
            CMatrix::from_diagonal(&CVector::from_vec(vec![c(0.0, 0.0), c(1.0, 0.0)])),
            &Tolerances::default(),
        )
        .unwrap();
        let u = evolution_operator(&h, PI).unwrap();
        let expected = CMatrix::from_diagonal(&CVector::from_vec(vec![c(1.0, 0.0), c(-1.0, 0.0)]));
        assert!(max_abs(&(u - expected)) < 1e-14);
    }

    #[test]
    fn non_hermitian_hamiltonian_reports_residual() {
        let m =
            CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(0.5, 0.0), c(0.0, 0.0)]);
        match Hamiltonian::new(m, &Tolerances::default()) {
            Err(Error::NotHermitian { residual, .. }) => assert!((residual - 0.5).abs() < 1e-15),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn non_finite_time_rejected() {
        let h = Hamiltonian::zero(2).unwrap();
        assert!(evolution_operator(&h, f64::NAN).is_err());
    }

    #[test]
    fn heisenberg_projector_rotates_into_plus() {
        // H = -(π/4)σ_y: U(1) = (1/√2)[[1, 1], [-1, 1]], so U†(1)|0⟩ = |+⟩
        // and U†P₀U = |+⟩⟨+|.
        let sy =
            CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)]);
        let h = Hamiltonian::new(sy * c(-PI / 4.0, 0.0), &Tolerances::default()).unwrap();
        let u = evolution_operator(&h, 1.0).unwrap();
        let s = FRAC_1_SQRT_2;
        let expected_u =
            CMatrix::from_row_slice(2, 2, &[c(s, 0.0), c(s, 0.0), c(-s, 0.0), c(s, 0.0)]);
        assert!(max_abs(&(&u - expected_u)) < 1e-15);

        let p0 = Projector::onto_basis_states(2, &[0], "0").unwrap();
        let p1 = heisenberg_projector(&p0, &h, 1.0).unwrap();
        let expected = CMatrix::from_element(2, 2, c(0.5, 0.0));
        assert!(max_abs(&(p1.matrix() - expected)) < 1e-15);
        assert!(hermiticity_residual(p1.matrix()) < 1e-15);
        assert!(max_abs(&(p1.matrix() * p1.matrix() - p1.matrix())) < 1e-15);
    }

    #[test]
    fn heisenberg_trivial_cases() {
        let tol = Tolerances::default();
        let p = Projector::onto_vector(&ket_plus(), "+").unwrap();
        let h0 = Hamiltonian::zero(2).unwrap();
        assert_eq!(
            heisenberg_projector(&p, &h0, 3.3).unwrap().matrix(),
            p.matrix()
        );
        let h = Hamiltonian::new(
            CMatrix::from_row_slice(
                2,
                2,
                &[c(1.0, 0.0), c(0.3, -0.2), c(0.3, 0.2), c(-0.4, 0.0)],
            ),
            &tol,
        )
        .unwrap();
        assert_eq!(
            heisenberg_projector(&p, &h, 0.0).unwrap().matrix(),
            p.matrix()
        );
    }

    #[test]
    fn heisenberg_dimension_mismatch() {
        let p = Projector::onto_basis_states(3, &[0], "0").unwrap();
        let h = Hamiltonian::zero(2).unwrap();
        assert!(matches!(
            heisenberg_projector(&p, &h, 1.0),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn family_validation_examples() {
        let tol = Tolerances::default();
        let z = ProjectionFamily::computational_basis(2).unwrap();
        let r = z.validate(&tol);
        assert!(r.pass);
        assert_eq!(r.completeness_residual, 0.0);
        assert_eq!(r.exclusivity_residual, 0.0);

        let bad = vec![
            Projector::onto_basis_states(2, &[0], "0").unwrap(),
            Projector::onto_vector(&ket_plus(), "+").unwrap(),
        ];
        let r = validate_family(&bad, &tol);
        assert!(!r.pass);
        assert!((r.completeness_residual - 0.5).abs() < 1e-15);
        assert!((r.exclusivity_residual - 0.5).abs() < 1e-15);

        assert!(ProjectionFamily::trivial(3).unwrap().validate(&tol).pass);
    }

    #[test]
    fn density_state_checks() {
        let tol = Tolerances::default();
        assert!(matches!(
            DensityState::diagonal(&[0.6, 0.5], &tol),
            Err(Error::TraceNotUnit { .. })
        ));
        assert!(matches!(
            DensityState::diagonal(&[1.2, -0.2], &tol),
            Err(Error::NotPositive { .. })
        ));
        let mixed = DensityState::diagonal(&[0.5, 0.5], &tol).unwrap();
        assert!(matches!(
            mixed.pure_vector(&tol),
            Err(Error::MixedState { .. })
        ));
        let pure = DensityState::pure(&ket_plus()).unwrap();
        let v = pure.pure_vector(&tol).unwrap();
        assert!((v.dotc(&ket_plus()).norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn projector_checks() {
        let tol = Tolerances::default();
        let m =
            CMatrix::from_row_slice(2, 2, &[c(2.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        assert!(matches!(
            Projector::new(m, "x", &tol),
            Err(Error::NotIdempotent { .. })
        ));
        assert!(matches!(
            Projector::onto_basis_states(2, &[2], "x"),
            Err(Error::SiteOutOfRange { .. })
        ));
        assert!(matches!(
            ProjectionFamily::new(vec![]),
            Err(Error::EmptyFamily)
        ));
    }

    #[test]
    fn dimension_cap() {
        assert!(matches!(
            Hamiltonian::zero(65),
            Err(Error::DimensionOutOfRange(65))
        ));
        assert!(HilbertSpace::numbered(64).is_ok());
        assert!(HilbertSpace::new(vec!["a".into(), "a".into()]).is_err());
        assert_eq!(HilbertSpace::qubits(2).unwrap().basis_labels()[2], "10");
    }

    #[test]
    fn tolerances_must_be_positive() {
        assert!(Tolerances::new(0.0, 1e-8).is_err());
        assert!(Tolerances::new(1e-10, -1.0).is_err());
    }
}

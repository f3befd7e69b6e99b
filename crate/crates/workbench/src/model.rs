//! Turns config specs into core objects.

use gqm_core::{
    predicate_partition, region_partition, CMatrix, CVector, CoarseGrainingMap, Complex64,
    DensityState, Error, Hamiltonian, HilbertSpace, HistoryGrid, HistoryIndex, LatticeModel,
    PathPartition, ProjectionFamily, Projector, RegionSets, Tolerances,
};

use crate::config::{
    AnalysisConfig, CoarseGrainingSpec, ComplexRepr, FamilySpec, GridSpec, HamiltonianSpec,
    ModelSpec, PartitionSpec, PathSpec, StateSpec, Violations,
};

pub const MODEL_KINDS: [&str; 3] = ["qubit", "spin-pair", "lattice-particle"];

/// A core error together with the config path it came from.
#[derive(Debug, thiserror::Error)]
#[error("{context}: {source}")]
pub struct BuildError {
    pub context: String,
    #[source]
    pub source: Error,
}

fn at<T>(context: impl Into<String>, r: Result<T, Error>) -> Result<T, BuildError> {
    r.map_err(|source| BuildError {
        context: context.into(),
        source,
    })
}

pub enum BuiltHistories {
    Grid(HistoryGrid),
    Paths {
        model: LatticeModel,
        partition: PathPartition,
        /// Present for region partitions, which also have an operator form.
        regions: Option<RegionSets>,
    },
}

pub struct BuiltAnalysis {
    pub space: HilbertSpace,
    pub histories: BuiltHistories,
    pub coarse_graining: Option<CoarseGrainingMap>,
}

impl BuiltHistories {
    pub fn labels(&self) -> Result<Vec<String>, Error> {
        match self {
            BuiltHistories::Grid(g) => g.history_labels(),
            BuiltHistories::Paths { partition, .. } => Ok(partition.labels().to_vec()),
        }
    }

    /// Slot-indexed history keys, when the histories have slots.
    pub fn keys(&self) -> Result<Option<Vec<HistoryIndex>>, Error> {
        match self {
            BuiltHistories::Grid(g) => g.enumerate_histories().map(Some),
            BuiltHistories::Paths { partition, .. } => Ok(partition.keys().map(<[_]>::to_vec)),
        }
    }
}

fn build_coarse_graining(
    spec: &CoarseGrainingSpec,
    histories: &BuiltHistories,
) -> Result<CoarseGrainingMap, Error> {
    let labels = histories.labels()?;
    let map = match spec {
        CoarseGrainingSpec::All => CoarseGrainingMap::all_to_one(&labels, "all")?,
        CoarseGrainingSpec::Slots(slots) => match histories.keys()? {
            Some(keys) => CoarseGrainingMap::marginal(&keys, slots)?,
            None => {
                return Err(Error::InvalidParameter(
                    "slot marginals need slot-indexed histories".into(),
                ))
            }
        },
        CoarseGrainingSpec::Explicit(m) => CoarseGrainingMap::new(m.clone())?,
    };
    map.cells(&labels)?;
    Ok(map)
}

fn qubit_count(kind: &str) -> Option<usize> {
    match kind {
        "qubit" => Some(1),
        "spin-pair" => Some(2),
        _ => None,
    }
}

/// Checks the model block; returns the Hilbert-space dimension when it can
/// be determined.
pub(crate) fn check_model(spec: &ModelSpec, v: &mut Violations) -> Option<usize> {
    let dim = match spec.kind.as_str() {
        "qubit" | "spin-pair" => {
            if spec.sites.is_some() {
                v.push("model.sites", format!("not allowed for kind {}", spec.kind));
            }
            Some(1usize << qubit_count(&spec.kind).unwrap())
        }
        "lattice-particle" => match spec.sites {
            Some(m) if (1..=gqm_core::hilbert::MAX_DIMENSION).contains(&m) => Some(m),
            Some(m) => {
                v.push("model.sites", format!("must be in 1..=64, got {m}"));
                None
            }
            None => {
                v.push("model.sites", "required for kind lattice-particle");
                None
            }
        },
        other => {
            v.push(
                "model.kind",
                format!(
                    "unknown model kind {other:?} (expected one of {})",
                    MODEL_KINDS.join(", ")
                ),
            );
            None
        }
    };
    let dim = dim?;
    check_hamiltonian(&spec.hamiltonian, &spec.kind, dim, v);
    check_state(&spec.initial_state, dim, v);
    Some(dim)
}

fn check_matrix_shape(m: &[Vec<ComplexRepr>], dim: usize, path: &str, v: &mut Violations) {
    if m.len() != dim {
        v.push(path, format!("has {} rows, expected {dim}", m.len()));
        return;
    }
    for (i, row) in m.iter().enumerate() {
        if row.len() != dim {
            v.push(
                format!("{path}[{i}]"),
                format!("has {} entries, expected {dim}", row.len()),
            );
        }
    }
}

fn check_hamiltonian(h: &HamiltonianSpec, kind: &str, dim: usize, v: &mut Violations) {
    match h {
        HamiltonianSpec::Zero => {}
        HamiltonianSpec::Pauli(terms) => {
            let Some(n) = qubit_count(kind) else {
                v.push(
                    "model.hamiltonian.pauli",
                    "only available for qubit and spin-pair models",
                );
                return;
            };
            for (k, t) in terms.iter().enumerate() {
                let path = format!("model.hamiltonian.pauli[{k}].ops");
                if t.ops.chars().count() != n {
                    v.push(path, format!("needs {n} operator(s), got {:?}", t.ops));
                } else if let Some(bad) = t.ops.chars().find(|c| !"ixyz".contains(*c)) {
                    v.push(path, format!("unknown Pauli operator {bad:?}"));
                }
            }
        }
        HamiltonianSpec::TightBinding(tb) => {
            if kind != "lattice-particle" {
                v.push(
                    "model.hamiltonian.tight_binding",
                    "only available for lattice-particle models",
                );
                return;
            }
            if tb.periodic && dim < 3 {
                v.push(
                    "model.hamiltonian.tight_binding.periodic",
                    "a ring needs at least 3 sites",
                );
            }
            if let Some(p) = &tb.potential {
                if p.len() != dim {
                    v.push(
                        "model.hamiltonian.tight_binding.potential",
                        format!("has {} entries, expected {dim}", p.len()),
                    );
                }
            }
        }
        HamiltonianSpec::Matrix(m) => check_matrix_shape(m, dim, "model.hamiltonian.matrix", v),
    }
}

fn check_state(s: &StateSpec, dim: usize, v: &mut Violations) {
    match s {
        StateSpec::MaximallyMixed => {}
        StateSpec::Basis(k) => {
            if *k >= dim {
                v.push(
                    "model.initial_state.basis",
                    format!("state {k} out of range for dimension {dim}"),
                );
            }
        }
        StateSpec::Vector(x) => {
            if x.len() != dim {
                v.push(
                    "model.initial_state.vector",
                    format!("has {} entries, expected {dim}", x.len()),
                );
            }
        }
        StateSpec::Diagonal(w) => {
            if w.len() != dim {
                v.push(
                    "model.initial_state.diagonal",
                    format!("has {} entries, expected {dim}", w.len()),
                );
            }
        }
        StateSpec::Matrix(m) => check_matrix_shape(m, dim, "model.initial_state.matrix", v),
    }
}

fn check_regions(regions: &[Vec<usize>], dim: usize, path: &str, v: &mut Violations) {
    for (r, set) in regions.iter().enumerate() {
        for (k, &site) in set.iter().enumerate() {
            if site >= dim {
                v.push(
                    format!("{path}[{r}][{k}]"),
                    format!("state {site} out of range for dimension {dim}"),
                );
            }
        }
    }
}

pub(crate) fn check_grid(grid: &GridSpec, model: &ModelSpec, dim: usize, v: &mut Violations) {
    if grid.times.is_empty() {
        v.push("histories.grid.times", "must not be empty");
    }
    for (k, w) in grid.times.windows(2).enumerate() {
        if w[1] <= w[0] {
            v.push(
                format!("histories.grid.times[{}]", k + 1),
                "times must be strictly increasing",
            );
        }
    }
    if grid.times.len() != grid.families.len() {
        v.push(
            "histories.grid.families",
            format!(
                "{} families for {} times",
                grid.families.len(),
                grid.times.len()
            ),
        );
    }
    for (k, f) in grid.families.iter().enumerate() {
        let path = format!("histories.grid.families[{k}]");
        match f {
            FamilySpec::Trivial | FamilySpec::Computational => {}
            FamilySpec::Pauli { axis, qubit } => match qubit_count(&model.kind) {
                None => v.push(
                    format!("{path}.pauli"),
                    "only available for qubit and spin-pair models",
                ),
                Some(n) => {
                    if !matches!(axis.as_str(), "x" | "y" | "z") {
                        v.push(
                            format!("{path}.pauli.axis"),
                            format!("unknown axis {axis:?}"),
                        );
                    }
                    if *qubit >= n {
                        v.push(
                            format!("{path}.pauli.qubit"),
                            format!("qubit {qubit} out of range for {n} qubit(s)"),
                        );
                    }
                }
            },
            FamilySpec::Regions(r) => check_regions(r, dim, &format!("{path}.regions"), v),
            FamilySpec::Vectors(vs) => {
                for (j, x) in vs.iter().enumerate() {
                    if x.len() != dim {
                        v.push(
                            format!("{path}.vectors[{j}]"),
                            format!("has {} entries, expected {dim}", x.len()),
                        );
                    }
                }
            }
        }
    }
}

pub(crate) fn check_paths(paths: &PathSpec, dim: usize, v: &mut Violations) {
    if !paths.dt.is_finite() {
        v.push("histories.paths.dt", "must be finite");
    }
    match &paths.partition {
        PartitionSpec::Hops => {}
        PartitionSpec::Visits(site) => {
            if *site >= dim {
                v.push(
                    "histories.paths.partition.visits",
                    format!("site {site} out of range for {dim} sites"),
                );
            }
        }
        PartitionSpec::Regions(slices) => {
            let mut seen = std::collections::BTreeSet::new();
            for (k, s) in slices.iter().enumerate() {
                let path = format!("histories.paths.partition.regions[{k}]");
                if s.slice > paths.slices {
                    v.push(
                        format!("{path}.slice"),
                        format!("slice {} beyond final slice {}", s.slice, paths.slices),
                    );
                }
                if !seen.insert(s.slice) {
                    v.push(
                        format!("{path}.slice"),
                        format!("slice {} constrained twice", s.slice),
                    );
                }
                check_regions(&s.regions, dim, &format!("{path}.regions"), v);
            }
        }
    }
}

fn complex(z: &ComplexRepr) -> Complex64 {
    Complex64::new(z[0], z[1])
}

fn matrix(rows: &[Vec<ComplexRepr>]) -> CMatrix {
    let n = rows.len();
    CMatrix::from_fn(n, n, |i, j| complex(&rows[i][j]))
}

fn vector(x: &[ComplexRepr]) -> CVector {
    CVector::from_iterator(x.len(), x.iter().map(complex))
}

fn pauli(op: char) -> CMatrix {
    let o = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    match op {
        'x' => CMatrix::from_row_slice(2, 2, &[o, one, one, o]),
        'y' => CMatrix::from_row_slice(2, 2, &[o, -i, i, o]),
        'z' => CMatrix::from_row_slice(2, 2, &[one, o, o, -one]),
        _ => CMatrix::identity(2, 2),
    }
}

/// op on `qubit`, identity elsewhere; qubit 0 is the most significant bit.
fn embed(op: &CMatrix, qubit: usize, qubits: usize) -> CMatrix {
    (0..qubits).fold(CMatrix::identity(1, 1), |acc, k| {
        let factor = if k == qubit {
            op.clone()
        } else {
            CMatrix::identity(2, 2)
        };
        acc.kronecker(&factor)
    })
}

fn build_hamiltonian(spec: &ModelSpec, dim: usize, tol: &Tolerances) -> Result<Hamiltonian, Error> {
    let m = match &spec.hamiltonian {
        HamiltonianSpec::Zero => CMatrix::zeros(dim, dim),
        HamiltonianSpec::Pauli(terms) => {
            let mut h = CMatrix::zeros(dim, dim);
            for t in terms {
                let term = t
                    .ops
                    .chars()
                    .fold(CMatrix::identity(1, 1), |acc, c| acc.kronecker(&pauli(c)));
                h += term * Complex64::new(t.coefficient, 0.0);
            }
            h
        }
        HamiltonianSpec::TightBinding(tb) => {
            let mut h = CMatrix::zeros(dim, dim);
            let bonds = if tb.periodic {
                dim
            } else {
                dim.saturating_sub(1)
            };
            for j in 0..bonds {
                let k = (j + 1) % dim;
                h[(j, k)] += Complex64::new(tb.hopping, 0.0);
                h[(k, j)] += Complex64::new(tb.hopping, 0.0);
            }
            if let Some(p) = &tb.potential {
                for (j, &e) in p.iter().enumerate() {
                    h[(j, j)] += Complex64::new(e, 0.0);
                }
            }
            h
        }
        HamiltonianSpec::Matrix(rows) => matrix(rows),
    };
    Hamiltonian::new(m, tol)
}

fn build_state(spec: &StateSpec, dim: usize, tol: &Tolerances) -> Result<DensityState, Error> {
    match spec {
        StateSpec::MaximallyMixed => DensityState::diagonal(&vec![1.0 / dim as f64; dim], tol),
        StateSpec::Basis(k) => DensityState::pure(&gqm_core::hilbert::basis_ket(dim, *k)?),
        StateSpec::Vector(x) => DensityState::pure(&vector(x)),
        StateSpec::Diagonal(w) => DensityState::diagonal(w, tol),
        StateSpec::Matrix(rows) => DensityState::new(matrix(rows), tol),
    }
}

fn build_family(
    spec: &FamilySpec,
    kind: &str,
    dim: usize,
    tol: &Tolerances,
) -> Result<ProjectionFamily, Error> {
    match spec {
        FamilySpec::Trivial => ProjectionFamily::trivial(dim),
        FamilySpec::Computational => ProjectionFamily::computational_basis(dim),
        FamilySpec::Pauli { axis, qubit } => {
            let qubits = qubit_count(kind).unwrap_or(0);
            let sigma = embed(&pauli(axis.chars().next().unwrap_or('z')), *qubit, qubits);
            let id = CMatrix::identity(dim, dim);
            let half = Complex64::new(0.5, 0.0);
            let names = match axis.as_str() {
                "z" => ["0", "1"],
                "y" => ["+i", "-i"],
                _ => ["+", "-"],
            };
            ProjectionFamily::new(vec![
                Projector::new((&id + &sigma) * half, names[0], tol)?,
                Projector::new((&id - &sigma) * half, names[1], tol)?,
            ])
        }
        FamilySpec::Regions(r) => ProjectionFamily::from_regions(dim, r),
        FamilySpec::Vectors(vs) => {
            ProjectionFamily::from_vectors(&vs.iter().map(|x| vector(x)).collect::<Vec<_>>())
        }
    }
}

pub fn region_sets(slices: &[crate::config::SliceRegions]) -> RegionSets {
    slices
        .iter()
        .map(|s| (s.slice, s.regions.clone()))
        .collect()
}

fn space_for(spec: &ModelSpec, dim: usize) -> Result<HilbertSpace, Error> {
    match qubit_count(&spec.kind) {
        Some(n) => HilbertSpace::qubits(n),
        None => HilbertSpace::numbered(dim),
    }
}

/// Builds the grid or lattice described by a shape-checked config.
pub fn build(config: &AnalysisConfig) -> Result<BuiltAnalysis, BuildError> {
    let tol = Tolerances::default();
    let spec = &config.model;
    let dim = match qubit_count(&spec.kind) {
        Some(n) => 1 << n,
        None => spec.sites.unwrap_or(0),
    };
    let space = at("model", space_for(spec, dim))?;
    let hamiltonian = at("model.hamiltonian", build_hamiltonian(spec, dim, &tol))?;
    let state = at(
        "model.initial_state",
        build_state(&spec.initial_state, dim, &tol),
    )?;

    let histories = if let Some(grid) = &config.histories.grid {
        let families = grid
            .families
            .iter()
            .enumerate()
            .map(|(k, f)| {
                let path = format!("histories.grid.families[{k}]");
                let family = at(path.clone(), build_family(f, &spec.kind, dim, &tol))?;
                let report = family.validate(&tol);
                if !report.pass {
                    return Err(BuildError {
                        context: path,
                        source: Error::InvalidFamily {
                            slot: k,
                            completeness: report.completeness_residual,
                            exclusivity: report.exclusivity_residual,
                        },
                    });
                }
                Ok(family)
            })
            .collect::<Result<Vec<_>, _>>()?;
        BuiltHistories::Grid(at(
            "histories.grid",
            HistoryGrid::new(grid.times.clone(), families, hamiltonian, state, &tol),
        )?)
    } else if let Some(paths) = &config.histories.paths {
        let model = at(
            "histories.paths",
            LatticeModel::new(hamiltonian, paths.slices, paths.dt, state, &tol),
        )?;
        let (partition, regions) = match &paths.partition {
            PartitionSpec::Regions(slices) => {
                let regions = region_sets(slices);
                let p = at(
                    "histories.paths.partition",
                    region_partition(&model, &regions),
                )?;
                (p, Some(regions))
            }
            PartitionSpec::Hops => (
                at(
                    "histories.paths.partition",
                    predicate_partition(&model, |q| q.hops().to_string()),
                )?,
                None,
            ),
            PartitionSpec::Visits(site) => (
                at(
                    "histories.paths.partition",
                    predicate_partition(&model, |q| {
                        if q.visits(*site) { "visits" } else { "avoids" }.to_string()
                    }),
                )?,
                None,
            ),
        };
        BuiltHistories::Paths {
            model,
            partition,
            regions,
        }
    } else {
        return Err(BuildError {
            context: "histories".into(),
            source: Error::InvalidParameter("no grid or paths".into()),
        });
    };
    let coarse_graining = config
        .histories
        .coarse_graining
        .as_ref()
        .map(|c| {
            at(
                "histories.coarse_graining",
                build_coarse_graining(c, &histories),
            )
        })
        .transpose()?;
    Ok(BuiltAnalysis {
        space,
        histories,
        coarse_graining,
    })
}

//! Discrete sum over histories on a finite site lattice.
//!
//! A fine-grained history is a site sequence (q_0, …, q_N) over N time steps
//! of length dt. Its amplitude is the product of short-time propagator
//! elements K[q_{k+1}, q_k] with K = exp(−iH·dt), so the phase of the
//! product plays the role of the discretized action. Coarse-grained classes
//! are arbitrary partitions of the M^(N+1) paths.

use std::collections::{BTreeMap, HashMap};

use num_complex::Complex64;

use crate::coarse::CoarseGrainingMap;
use crate::decoherence::{
    build_decoherence_functional, CoarseGrainable, DecoherenceMatrix, Provenance,
};
use crate::error::{Error, Result};
use crate::hilbert::{
    evolution_operator, max_abs, CMatrix, DensityState, Hamiltonian, ProjectionFamily, Tolerances,
};
use crate::histories::{enumerate_indices, HistoryGrid, HistoryIndex, ENUMERATION_CAP};

#[derive(Debug, Clone)]
pub struct LatticeModel {
    hamiltonian: Hamiltonian,
    slice_count: usize,
    dt: f64,
    propagator: CMatrix,
    initial_state: DensityState,
}

impl LatticeModel {
    pub fn new(
        hamiltonian: Hamiltonian,
        slice_count: usize,
        dt: f64,
        initial_state: DensityState,
        tol: &Tolerances,
    ) -> Result<Self> {
        if !dt.is_finite() {
            return Err(Error::NonFinite("dt"));
        }
        if initial_state.dimension() != hamiltonian.dimension() {
            return Err(Error::DimensionMismatch {
                expected: hamiltonian.dimension(),
                found: initial_state.dimension(),
            });
        }
        let propagator = evolution_operator(&hamiltonian, dt)?;
        let m = hamiltonian.dimension();
        let unitarity = max_abs(&(propagator.adjoint() * &propagator - CMatrix::identity(m, m)));
        if unitarity > tol.structural_tol {
            return Err(Error::InvalidParameter(format!(
                "propagator not unitary: residual {unitarity:e}"
            )));
        }
        let model = LatticeModel {
            hamiltonian,
            slice_count,
            dt,
            propagator,
            initial_state,
        };
        model.path_count()?;
        Ok(model)
    }

    pub fn sites(&self) -> usize {
        self.hamiltonian.dimension()
    }

    pub fn slice_count(&self) -> usize {
        self.slice_count
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn hamiltonian(&self) -> &Hamiltonian {
        &self.hamiltonian
    }

    /// K[b, a] = ⟨b| exp(−iH·dt) |a⟩
    pub fn propagator(&self) -> &CMatrix {
        &self.propagator
    }

    pub fn initial_state(&self) -> &DensityState {
        &self.initial_state
    }

    /// M^(N+1), refused above the enumeration cap.
    pub fn path_count(&self) -> Result<usize> {
        let m = self.sites() as u128;
        let count = (0..=self.slice_count).try_fold(1u128, |acc, _| {
            acc.checked_mul(m).filter(|&c| c <= ENUMERATION_CAP)
        });
        match count {
            Some(c) => Ok(c as usize),
            None => Err(Error::TooMany {
                count: m.saturating_pow(self.slice_count as u32 + 1),
                cap: ENUMERATION_CAP,
            }),
        }
    }

    /// All paths, lexicographic with q_0 most significant.
    pub fn paths(&self) -> Result<PathIter> {
        self.path_count()?;
        Ok(PathIter {
            sites: self.sites(),
            current: Some(vec![0; self.slice_count + 1]),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FinePath(Vec<usize>);

impl FinePath {
    pub fn new(sites_at_slices: Vec<usize>) -> Self {
        FinePath(sites_at_slices)
    }

    pub fn sites(&self) -> &[usize] {
        &self.0
    }

    /// Number of steps with q_{k+1} ≠ q_k.
    pub fn hops(&self) -> usize {
        self.0.windows(2).filter(|w| w[0] != w[1]).count()
    }

    pub fn visits(&self, site: usize) -> bool {
        self.0.contains(&site)
    }
}

pub struct PathIter {
    sites: usize,
    current: Option<Vec<usize>>,
}

impl Iterator for PathIter {
    type Item = FinePath;

    fn next(&mut self) -> Option<FinePath> {
        let out = self.current.clone()?;
        let cur = self.current.as_mut().unwrap();
        let mut k = cur.len();
        loop {
            if k == 0 {
                self.current = None;
                break;
            }
            k -= 1;
            cur[k] += 1;
            if cur[k] < self.sites {
                break;
            }
            cur[k] = 0;
        }
        Some(FinePath(out))
    }
}

fn check_path(m: &LatticeModel, p: &FinePath) -> Result<()> {
    if p.0.len() != m.slice_count + 1 {
        return Err(Error::PathLength {
            expected: m.slice_count + 1,
            found: p.0.len(),
        });
    }
    if let Some(&site) = p.0.iter().find(|&&q| q >= m.sites()) {
        return Err(Error::SiteOutOfRange {
            site,
            sites: m.sites(),
        });
    }
    Ok(())
}

/// A[q] = Π_{k=0}^{N−1} K[q_{k+1}, q_k]; the empty product is 1.
pub fn path_amplitude(m: &LatticeModel, p: &FinePath) -> Result<Complex64> {
    check_path(m, p)?;
    Ok(amplitude_unchecked(&m.propagator, &p.0))
}

fn amplitude_unchecked(k: &CMatrix, q: &[usize]) -> Complex64 {
    q.windows(2)
        .fold(Complex64::new(1.0, 0.0), |acc, w| acc * k[(w[1], w[0])])
}

/// Regions per constrained slice; each entry must partition the sites.
pub type RegionSets = BTreeMap<usize, Vec<Vec<usize>>>;

/// An exhaustive, exclusive classification of every path of a model.
#[derive(Debug, Clone, PartialEq)]
pub struct PathPartition {
    sites: usize,
    slice_count: usize,
    labels: Vec<String>,
    // class of each path in lexicographic path order
    class_of: Vec<u32>,
    // region tuples behind the labels, for region partitions
    keys: Option<Vec<HistoryIndex>>,
}

impl PathPartition {
    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn class_count(&self) -> usize {
        self.labels.len()
    }

    pub fn keys(&self) -> Option<&[HistoryIndex]> {
        self.keys.as_deref()
    }

    /// Number of paths in each class.
    pub fn class_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.labels.len()];
        for &c in &self.class_of {
            sizes[c as usize] += 1;
        }
        sizes
    }

    pub fn class_of_path(&self, index: usize) -> Option<&str> {
        self.class_of
            .get(index)
            .map(|&c| self.labels[c as usize].as_str())
    }

    /// Paths of one class, in lexicographic order.
    pub fn members(&self, label: &str) -> Vec<FinePath> {
        let Some(c) = self.labels.iter().position(|l| l == label) else {
            return Vec::new();
        };
        PathIter {
            sites: self.sites,
            current: Some(vec![0; self.slice_count + 1]),
        }
        .zip(&self.class_of)
        .filter(|(_, &k)| k as usize == c)
        .map(|(p, _)| p)
        .collect()
    }

    /// Merges classes according to `map` (over this partition's labels).
    pub fn coarsen(&self, map: &CoarseGrainingMap) -> Result<PathPartition> {
        let cells = map.cells(&self.labels)?;
        Ok(PathPartition {
            sites: self.sites,
            slice_count: self.slice_count,
            labels: cells.labels,
            class_of: self
                .class_of
                .iter()
                .map(|&c| cells.cell_of[c as usize] as u32)
                .collect(),
            keys: None,
        })
    }

    fn check_model(&self, m: &LatticeModel) -> Result<()> {
        if self.sites != m.sites() || self.slice_count != m.slice_count {
            return Err(Error::Partition(format!(
                "partition built for {} sites and {} slices, model has {} and {}",
                self.sites,
                self.slice_count,
                m.sites(),
                m.slice_count
            )));
        }
        Ok(())
    }
}

fn validate_regions(m: &LatticeModel, regions: &RegionSets) -> Result<()> {
    for (&slice, sets) in regions {
        if slice > m.slice_count {
            return Err(Error::Partition(format!(
                "slice {slice} beyond final slice {}",
                m.slice_count
            )));
        }
        let mut owner = vec![None; m.sites()];
        for (r, set) in sets.iter().enumerate() {
            if set.is_empty() {
                return Err(Error::Partition(format!(
                    "slice {slice}: region {r} is empty"
                )));
            }
            for &site in set {
                if site >= m.sites() {
                    return Err(Error::SiteOutOfRange {
                        site,
                        sites: m.sites(),
                    });
                }
                if let Some(prev) = owner[site].replace(r) {
                    return Err(Error::Partition(format!(
                        "slice {slice}: site {site} in regions {prev} and {r}"
                    )));
                }
            }
        }
        if let Some(site) = owner.iter().position(Option::is_none) {
            return Err(Error::Partition(format!(
                "slice {slice}: site {site} in no region"
            )));
        }
    }
    Ok(())
}

/// Classifies each path by the regions it occupies at the constrained
/// slices. Labels are region-index tuples in slice order, enumerated
/// lexicographically like grid histories.
pub fn region_partition(m: &LatticeModel, regions: &RegionSets) -> Result<PathPartition> {
    validate_regions(m, regions)?;
    let slices: Vec<usize> = regions.keys().copied().collect();
    let sizes: Vec<usize> = regions.values().map(Vec::len).collect();
    let keys = enumerate_indices(&sizes)?;
    // site -> region index, per constrained slice
    let region_of: Vec<Vec<usize>> = regions
        .values()
        .map(|sets| {
            let mut of = vec![0; m.sites()];
            for (r, set) in sets.iter().enumerate() {
                for &s in set {
                    of[s] = r;
                }
            }
            of
        })
        .collect();
    let class_of = m
        .paths()?
        .map(|p| {
            slices
                .iter()
                .zip(&region_of)
                .zip(&sizes)
                .fold(0usize, |acc, ((&slice, of), &size)| {
                    acc * size + of[p.0[slice]]
                }) as u32
        })
        .collect();
    Ok(PathPartition {
        sites: m.sites(),
        slice_count: m.slice_count,
        labels: keys.iter().map(HistoryIndex::to_string).collect(),
        class_of,
        keys: Some(keys),
    })
}

/// Partition by an arbitrary labelling of whole paths, which need not refer
/// to definite times. Labels are ordered by first occurrence along the
/// lexicographic path enumeration.
pub fn predicate_partition<F>(m: &LatticeModel, mut labeler: F) -> Result<PathPartition>
where
    F: FnMut(&FinePath) -> String,
{
    let mut labels = Vec::new();
    let mut index: HashMap<String, u32> = HashMap::new();
    let class_of = m
        .paths()?
        .map(|p| {
            let label = labeler(&p);
            *index.entry(label).or_insert_with_key(|l| {
                labels.push(l.clone());
                (labels.len() - 1) as u32
            })
        })
        .collect();
    Ok(PathPartition {
        sites: m.sites(),
        slice_count: m.slice_count,
        labels,
        class_of,
        keys: None,
    })
}

/// D(α,α') = Σ_{q∈c_α} Σ_{q'∈c_α'} [q_N = q'_N] A[q] conj(A[q']) ρ[q_0, q'_0].
///
/// Amplitudes are first accumulated per (class, q_0, q_N) in lexicographic
/// path order; the double sum then runs over end points only.
pub fn build_d_pathsum(m: &LatticeModel, part: &PathPartition) -> Result<DecoherenceMatrix> {
    part.check_model(m)?;
    let sites = m.sites();
    let classes = part.class_count();
    // amp[class][q_N][q_0]
    let mut amp = vec![CMatrix::zeros(sites, sites); classes];
    for (p, &class) in m.paths()?.zip(&part.class_of) {
        let q = p.sites();
        let a = amplitude_unchecked(&m.propagator, q);
        amp[class as usize][(q[q.len() - 1], q[0])] += a;
    }
    let rho = m.initial_state.matrix();
    let mut d = CMatrix::zeros(classes, classes);
    for alpha in 0..classes {
        for beta in 0..classes {
            let mut s = Complex64::new(0.0, 0.0);
            for qf in 0..sites {
                for q0 in 0..sites {
                    let a = amp[alpha][(qf, q0)];
                    if a == Complex64::new(0.0, 0.0) {
                        continue;
                    }
                    for q0p in 0..sites {
                        s += a * amp[beta][(qf, q0p)].conj() * rho[(q0, q0p)];
                    }
                }
            }
            d[(alpha, beta)] = s;
        }
    }
    DecoherenceMatrix::from_entries(d, part.labels.clone(), Provenance::PathSum)
}

/// The same alternatives as a region partition, expressed as a history grid:
/// projectors onto region subspaces at times k·dt. A partition with no
/// constrained slice becomes the trivial family at t = 0.
pub fn region_grid(
    m: &LatticeModel,
    regions: &RegionSets,
    tol: &Tolerances,
) -> Result<HistoryGrid> {
    validate_regions(m, regions)?;
    let (times, families) = if regions.is_empty() {
        (vec![0.0], vec![ProjectionFamily::trivial(m.sites())?])
    } else {
        let mut times = Vec::new();
        let mut families = Vec::new();
        for (&slice, sets) in regions {
            times.push(slice as f64 * m.dt);
            families.push(ProjectionFamily::from_regions(m.sites(), sets)?);
        }
        (times, families)
    };
    HistoryGrid::new(
        times,
        families,
        m.hamiltonian.clone(),
        m.initial_state.clone(),
        tol,
    )
}

/// ‖D_pathsum − D_operator‖_max for a region partition.
pub fn operator_equivalence_oracle(
    m: &LatticeModel,
    regions: &RegionSets,
    tol: &Tolerances,
) -> Result<f64> {
    let path_d = build_d_pathsum(m, &region_partition(m, regions)?)?;
    let op_d = build_decoherence_functional(&region_grid(m, regions, tol)?, tol)?;
    if path_d.len() != op_d.len() {
        return Err(Error::LabelMismatch(format!(
            "{} path classes vs {} histories",
            path_d.len(),
            op_d.len()
        )));
    }
    Ok(max_abs(&(path_d.entries() - op_d.entries())))
}

/// A lattice model together with a partition of its paths.
pub struct PathSumSet<'a> {
    pub model: &'a LatticeModel,
    pub partition: &'a PathPartition,
}

impl CoarseGrainable for PathSumSet<'_> {
    fn history_labels(&self) -> Result<Vec<String>> {
        Ok(self.partition.labels.clone())
    }

    fn coarse_grained_functional(
        &self,
        map: &CoarseGrainingMap,
        _tol: &Tolerances,
    ) -> Result<DecoherenceMatrix> {
        build_d_pathsum(self.model, &self.partition.coarsen(map)?)
    }

    fn standard_maps(&self) -> Result<Vec<CoarseGrainingMap>> {
        let labels = &self.partition.labels;
        let mut maps = vec![
            CoarseGrainingMap::identity(labels)?,
            CoarseGrainingMap::all_to_one(labels, "*")?,
        ];
        if let Some(keys) = &self.partition.keys {
            let slots = keys.first().map_or(0, HistoryIndex::len);
            for slot in 0..slots {
                maps.push(CoarseGrainingMap::marginal(keys, &[slot])?);
            }
        }
        Ok(maps)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decoherence::check_axioms;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn balanced_hop(n: usize, state: DensityState) -> LatticeModel {
        // H = (π/4)σ_x, dt = 1 gives K = (1/√2)[[1, −i], [−i, 1]]
        let tol = Tolerances::default();
        let h = CMatrix::from_row_slice(
            2,
            2,
            &[c(0.0, 0.0), c(PI / 4.0, 0.0), c(PI / 4.0, 0.0), c(0.0, 0.0)],
        );
        LatticeModel::new(Hamiltonian::new(h, &tol).unwrap(), n, 1.0, state, &tol).unwrap()
    }

    fn free(sites: usize, n: usize, weights: &[f64]) -> LatticeModel {
        let tol = Tolerances::default();
        LatticeModel::new(
            Hamiltonian::zero(sites).unwrap(),
            n,
            0.5,
            DensityState::diagonal(weights, &tol).unwrap(),
            &tol,
        )
        .unwrap()
    }

    fn ground(sites: usize) -> DensityState {
        let mut w = vec![0.0; sites];
        w[0] = 1.0;
        DensityState::diagonal(&w, &Tolerances::default()).unwrap()
    }

    #[test]
    fn amplitude_examples() {
        let m = free(3, 2, &[1.0, 0.0, 0.0]);
        assert!(
            (path_amplitude(&m, &FinePath::new(vec![1, 1, 1])).unwrap() - c(1.0, 0.0)).norm()
                < 1e-15
        );
        assert!(
            path_amplitude(&m, &FinePath::new(vec![1, 2, 2]))
                .unwrap()
                .norm()
                < 1e-15
        );

        let m = balanced_hop(1, ground(2));
        let s = FRAC_1_SQRT_2;
        let expected =
            CMatrix::from_row_slice(2, 2, &[c(s, 0.0), c(0.0, -s), c(0.0, -s), c(s, 0.0)]);
        assert!(max_abs(&(m.propagator() - expected)) < 1e-15);
        let a = path_amplitude(&m, &FinePath::new(vec![0, 1])).unwrap();
        assert!((a - c(0.0, -s)).norm() < 1e-15);

        let m = balanced_hop(0, ground(2));
        assert_eq!(
            path_amplitude(&m, &FinePath::new(vec![1])).unwrap(),
            c(1.0, 0.0)
        );
    }

    #[test]
    fn amplitude_errors() {
        let m = balanced_hop(1, ground(2));
        assert!(matches!(
            path_amplitude(&m, &FinePath::new(vec![0, 2])),
            Err(Error::SiteOutOfRange { site: 2, .. })
        ));
        assert!(matches!(
            path_amplitude(&m, &FinePath::new(vec![0])),
            Err(Error::PathLength { .. })
        ));
    }

    #[test]
    fn enumeration_cap() {
        let tol = Tolerances::default();
        let r = LatticeModel::new(
            Hamiltonian::zero(10).unwrap(),
            6,
            0.1,
            DensityState::pure(&crate::hilbert::basis_ket(10, 0).unwrap()).unwrap(),
            &tol,
        );
        assert!(matches!(r, Err(Error::TooMany { .. })));
    }

    #[test]
    fn region_partition_counts() {
        let m = free(2, 2, &[1.0, 0.0]);
        let p = region_partition(&m, &RegionSets::new()).unwrap();
        assert_eq!(p.class_sizes(), vec![8]);

        let p = region_partition(&m, &RegionSets::from([(2, vec![vec![0], vec![1]])])).unwrap();
        assert_eq!(p.class_sizes(), vec![4, 4]);

        let m = free(3, 1, &[1.0, 0.0, 0.0]);
        let p = region_partition(&m, &RegionSets::from([(1, vec![vec![0, 1], vec![2]])])).unwrap();
        assert_eq!(p.class_sizes(), vec![6, 3]);
    }

    #[test]
    fn region_partition_errors() {
        let m = free(3, 1, &[1.0, 0.0, 0.0]);
        let overlap = RegionSets::from([(1, vec![vec![0, 1], vec![1, 2]])]);
        assert!(matches!(
            region_partition(&m, &overlap),
            Err(Error::Partition(_))
        ));
        let incomplete = RegionSets::from([(1, vec![vec![0, 1]])]);
        assert!(matches!(
            region_partition(&m, &incomplete),
            Err(Error::Partition(_))
        ));
        let late = RegionSets::from([(2, vec![vec![0, 1, 2]])]);
        assert!(matches!(
            region_partition(&m, &late),
            Err(Error::Partition(_))
        ));
    }

    #[test]
    fn predicate_partition_examples() {
        let m = free(2, 1, &[1.0, 0.0]);
        let p = predicate_partition(&m, |q| q.visits(0).to_string()).unwrap();
        assert_eq!(p.labels(), &["true", "false"]);
        let visits: Vec<_> = p
            .members("true")
            .into_iter()
            .map(|q| q.sites().to_vec())
            .collect();
        assert_eq!(visits, vec![vec![0, 0], vec![0, 1], vec![1, 0]]);
        assert_eq!(p.members("false"), vec![FinePath::new(vec![1, 1])]);

        assert_eq!(
            predicate_partition(&m, |_| "all".into())
                .unwrap()
                .class_count(),
            1
        );

        let m = free(2, 2, &[1.0, 0.0]);
        let p = predicate_partition(&m, |q| q.hops().to_string()).unwrap();
        assert_eq!(p.labels(), &["0", "1", "2"]);
        assert_eq!(p.class_sizes(), vec![2, 4, 2]);
    }

    #[test]
    fn free_particle_final_partition_is_diagonal() {
        let w = [0.2, 0.5, 0.3];
        let m = free(3, 2, &w);
        let part = region_partition(
            &m,
            &RegionSets::from([(2, vec![vec![0], vec![1], vec![2]])]),
        )
        .unwrap();
        let d = build_d_pathsum(&m, &part).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let expected = if i == j { w[i] } else { 0.0 };
                assert!((d.entry(i, j) - c(expected, 0.0)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn balanced_hop_final_partition() {
        let m = balanced_hop(1, ground(2));
        let regions = RegionSets::from([(1, vec![vec![0], vec![1]])]);
        let d = build_d_pathsum(&m, &region_partition(&m, &regions).unwrap()).unwrap();
        assert!((d.entry(0, 0) - c(0.5, 0.0)).norm() < 1e-15);
        assert!((d.entry(1, 1) - c(0.5, 0.0)).norm() < 1e-15);
        assert!(d.entry(0, 1).norm() < 1e-15);
        assert!(operator_equivalence_oracle(&m, &regions, &Tolerances::default()).unwrap() < 1e-15);
    }

    #[test]
    fn single_class_is_unit() {
        let m = balanced_hop(
            3,
            DensityState::diagonal(&[0.3, 0.7], &Tolerances::default()).unwrap(),
        );
        let d = build_d_pathsum(&m, &predicate_partition(&m, |_| "all".into()).unwrap()).unwrap();
        assert!((d.entry(0, 0) - c(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn free_particle_oracle() {
        let m = free(3, 3, &[0.2, 0.5, 0.3]);
        let regions = RegionSets::from([
            (1, vec![vec![0, 2], vec![1]]),
            (3, vec![vec![0], vec![1, 2]]),
        ]);
        assert!(
            operator_equivalence_oracle(&m, &regions, &Tolerances::default()).unwrap() <= 1e-15
        );
    }

    #[test]
    fn hopping_ring_oracle() {
        let tol = Tolerances::default();
        let mut h = CMatrix::zeros(4, 4);
        for j in 0..4 {
            h[(j, (j + 1) % 4)] = c(1.0, 0.0);
            h[((j + 1) % 4, j)] = c(1.0, 0.0);
        }
        let m =
            LatticeModel::new(Hamiltonian::new(h, &tol).unwrap(), 3, 0.4, ground(4), &tol).unwrap();
        let regions = RegionSets::from([
            (1, vec![vec![0, 2], vec![1, 3]]),
            (3, vec![vec![0], vec![1], vec![2], vec![3]]),
        ]);
        assert!(operator_equivalence_oracle(&m, &regions, &tol).unwrap() <= 1e-10);
        let part = region_partition(&m, &regions).unwrap();
        let d = build_d_pathsum(&m, &part).unwrap();
        let set = PathSumSet {
            model: &m,
            partition: &part,
        };
        let r = check_axioms(&d, Some(&set), &[], &tol).unwrap();
        assert!(r.pass, "{r:?}");
        assert_eq!(r.maps_checked, 4);
    }

    #[test]
    fn mismatched_partition_rejected() {
        let m = free(2, 2, &[1.0, 0.0]);
        let other = free(2, 1, &[1.0, 0.0]);
        let part = region_partition(&other, &RegionSets::new()).unwrap();
        assert!(matches!(
            build_d_pathsum(&m, &part),
            Err(Error::Partition(_))
        ));
    }
}

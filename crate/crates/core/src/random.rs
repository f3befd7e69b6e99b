//! Random models for property tests and randomized verification suites.
//!
//! Entries are drawn uniformly from [-1, 1]; none of the generators aim for
//! a particular invariant measure.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::Rng;

use crate::coarse::CoarseGrainingMap;
use crate::error::Result;
use crate::hilbert::{
    outer, CMatrix, CVector, DensityState, Hamiltonian, ProjectionFamily, Projector, Tolerances,
};
use crate::histories::HistoryGrid;
use crate::pathsum::{LatticeModel, RegionSets};

fn entry<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

pub fn complex_matrix<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMatrix {
    CMatrix::from_fn(n, n, |_, _| entry(rng))
}

pub fn hamiltonian<R: Rng + ?Sized>(rng: &mut R, n: usize, scale: f64) -> Result<Hamiltonian> {
    let a = complex_matrix(rng, n);
    let h = (&a + a.adjoint()) * Complex64::new(0.5 * scale, 0.0);
    Hamiltonian::new(h, &Tolerances::default())
}

/// Full-rank mixed state G G† + δI, normalized.
pub fn full_rank_density<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Result<DensityState> {
    let g = complex_matrix(rng, n);
    let mut m = &g * g.adjoint() + CMatrix::identity(n, n) * Complex64::new(0.05, 0.0);
    let tr: Complex64 = m.diagonal().iter().sum();
    m /= tr;
    // exact Hermitian symmetry
    let m = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
    DensityState::new(m, &Tolerances::default())
}

pub fn pure_density<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Result<DensityState> {
    DensityState::pure(&CVector::from_fn(n, |_, _| entry(rng)))
}

/// Unitary from Gram–Schmidt on the columns of a random complex matrix.
pub fn unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMatrix {
    loop {
        let a = complex_matrix(rng, n);
        let mut q = CMatrix::zeros(n, n);
        let mut ok = true;
        for j in 0..n {
            let mut v = a.column(j).into_owned();
            for k in 0..j {
                let e = q.column(k).into_owned();
                let proj = e.dotc(&v);
                v -= e * proj;
            }
            let norm = v.norm();
            if norm < 1e-6 {
                ok = false;
                break;
            }
            q.set_column(j, &(v / Complex64::new(norm, 0.0)));
        }
        if ok {
            return q;
        }
    }
}

/// Projectors onto random groupings of a random orthonormal basis, with
/// between `1` and `n` members.
pub fn family<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Result<ProjectionFamily> {
    let members = rng.random_range(1..=n);
    family_with_members(rng, n, members)
}

pub fn family_with_members<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    members: usize,
) -> Result<ProjectionFamily> {
    let u = unitary(rng, n);
    let groups = random_groups(rng, n, members);
    ProjectionFamily::new(
        groups
            .iter()
            .enumerate()
            .map(|(k, cols)| {
                let mut m = CMatrix::zeros(n, n);
                for &c in cols {
                    m += outer(&u.column(c).into_owned());
                }
                // symmetrize away rounding
                let m = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
                Projector::new(m, k.to_string(), &Tolerances::default())
            })
            .collect::<Result<_>>()?,
    )
}

/// Splits 0..n into `groups` nonempty groups, each element placed at random.
pub fn random_groups<R: Rng + ?Sized>(rng: &mut R, n: usize, groups: usize) -> Vec<Vec<usize>> {
    let groups = groups.clamp(1, n);
    let mut order: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        order.swap(i, rng.random_range(0..=i));
    }
    let mut out: Vec<Vec<usize>> = order[..groups].iter().map(|&k| vec![k]).collect();
    for &k in &order[groups..] {
        out[rng.random_range(0..groups)].push(k);
    }
    for g in &mut out {
        g.sort_unstable();
    }
    out
}

/// Random grid: `n` slots at increasing times in (0, 3n), random families.
pub fn grid<R: Rng + ?Sized>(
    rng: &mut R,
    dimension: usize,
    slots: usize,
    state: DensityState,
) -> Result<HistoryGrid> {
    let mut t = 0.0;
    let mut times = Vec::with_capacity(slots);
    for _ in 0..slots {
        t += rng.random_range(0.1..3.0);
        times.push(t);
    }
    let families = (0..slots)
        .map(|_| family(rng, dimension))
        .collect::<Result<Vec<_>>>()?;
    HistoryGrid::new(
        times,
        families,
        hamiltonian(rng, dimension, 1.5)?,
        state,
        &Tolerances::default(),
    )
}

/// Assigns each label to one of up to `max_cells` bar labels.
pub fn coarse_map<R: Rng + ?Sized>(
    rng: &mut R,
    labels: &[String],
    max_cells: usize,
) -> Result<CoarseGrainingMap> {
    let cells = rng.random_range(1..=max_cells.max(1));
    let assignment: BTreeMap<String, String> = labels
        .iter()
        .map(|l| (l.clone(), format!("c{}", rng.random_range(0..cells))))
        .collect();
    CoarseGrainingMap::new(assignment)
}

/// Random region partitions on a random subset of slices 0..=slice_count.
pub fn region_sets<R: Rng + ?Sized>(rng: &mut R, sites: usize, slice_count: usize) -> RegionSets {
    let mut out = RegionSets::new();
    for slice in 0..=slice_count {
        if rng.random_bool(0.5) {
            let groups = rng.random_range(1..=sites);
            out.insert(slice, random_groups(rng, sites, groups));
        }
    }
    out
}

pub fn lattice_model<R: Rng + ?Sized>(
    rng: &mut R,
    sites: usize,
    slice_count: usize,
) -> Result<LatticeModel> {
    let dt = rng.random_range(0.05..1.0);
    let h = hamiltonian(rng, sites, 2.0)?;
    let rho = full_rank_density(rng, sites)?;
    LatticeModel::new(h, slice_count, dt, rho, &Tolerances::default())
}

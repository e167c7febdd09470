//! Per-sector spectra of the generalized Laplacian and the UV/IR split.
//!
//! Each sector's pair `(L, W)` is reduced to the standard symmetric problem
//! `W^{-1/2} L W^{-1/2} u = λ u` (W is diagonal, so its Cholesky factor is a
//! square root) and solved densely; `v = W^{-1/2} u` is then `W`-orthonormal.
//! Analytic spaces skip the solver and carry `(eigenvalue, multiplicity)`
//! levels with no eigenvectors.

use num_complex::Complex;
use thiserror::Error;

use crate::algebra::{AlgebraElement, AlgebraError};
use crate::linalg::{LinalgError, Matrix, SymmetricEigen};
use crate::scalar::{czero, Real};
use crate::space::{generalized_laplacian, DiscreteSpace, LocusOperator, SectorChart, SpaceError};

/// Default relative tolerance for grouping degenerate eigenvalues.
pub const DEFAULT_CLUSTER_TOL: f64 = 1e-9;

/// Largest sector dimension the dense solver accepts.
pub const MAX_DENSE_DIM: usize = 2000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectralError {
    #[error("stiffness matrix is not symmetric (max |L - Lᵀ| = {0:e})")]
    NonSymmetric(f64),
    #[error("weights must be positive and match the operator dimension")]
    BadWeights,
    #[error("sector dimension {dim} exceeds the dense solver limit {limit}")]
    TooLarge { dim: usize, limit: usize },
    #[error("cutoff must be non-negative, got {0}")]
    NegativeCutoff(f64),
    #[error("sector {0} has no eigenvectors (analytic spectrum)")]
    MissingVectors(usize),
    #[error("unknown sector {0}")]
    UnknownSector(usize),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// A run of consecutive spectrum entries treated as one eigenspace.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Cluster<T> {
    /// Multiplicity-weighted mean of the member eigenvalues.
    pub eigenvalue: T,
    pub start: usize,
    pub end: usize,
}

impl<T> Cluster<T> {
    pub fn members(&self) -> std::ops::Range<usize> {
        self.start..self.end
    }
}

/// Spectrum of one sector. Entries are ascending; graph sectors have one
/// entry per mode, analytic sectors one entry per level.
#[derive(Clone, Debug, PartialEq)]
pub struct SectorModes<T> {
    eigenvalues: Vec<T>,
    multiplicities: Vec<usize>,
    vectors: Option<Matrix<T>>,
    weights: Vec<T>,
    clusters: Vec<Cluster<T>>,
    cluster_of: Vec<usize>,
}

impl<T: Real> SectorModes<T> {
    pub fn from_levels(levels: &[(T, usize)], rel_tol: T) -> Self {
        let mut sorted = levels.to_vec();
        sorted.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
        let eigenvalues: Vec<T> = sorted.iter().map(|l| l.0).collect();
        let multiplicities: Vec<usize> = sorted.iter().map(|l| l.1).collect();
        let mut out = Self {
            eigenvalues,
            multiplicities,
            vectors: None,
            weights: Vec::new(),
            clusters: Vec::new(),
            cluster_of: Vec::new(),
        };
        out.recluster(rel_tol);
        out
    }

    pub fn eigenvalues(&self) -> &[T] {
        &self.eigenvalues
    }

    pub fn multiplicities(&self) -> &[usize] {
        &self.multiplicities
    }

    pub fn entry_count(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Number of modes counted with multiplicity.
    pub fn mode_count(&self) -> usize {
        self.multiplicities.iter().sum()
    }

    pub fn vectors(&self) -> Option<&Matrix<T>> {
        self.vectors.as_ref()
    }

    pub fn has_vectors(&self) -> bool {
        self.vectors.is_some()
    }

    /// Eigenvector of entry `k` (graph sectors only).
    pub fn vector(&self, k: usize) -> Option<Vec<T>> {
        self.vectors.as_ref().map(|v| v.column(k))
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    /// Locus dimension (zero for analytic sectors).
    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn clusters(&self) -> &[Cluster<T>] {
        &self.clusters
    }

    pub fn cluster_of(&self, entry: usize) -> usize {
        self.cluster_of[entry]
    }

    pub fn lambda_max(&self) -> Option<T> {
        self.eigenvalues.last().copied()
    }

    /// Regroup entries with the greedy sweep
    /// `|λ_{i+1} − λ_i| ≤ rel_tol · max(1, λ_i)`.
    pub fn recluster(&mut self, rel_tol: T) {
        self.clusters = cluster_eigenvalues(&self.eigenvalues, &self.multiplicities, rel_tol);
        self.cluster_of = vec![0; self.eigenvalues.len()];
        for (c, cl) in self.clusters.iter().enumerate() {
            for i in cl.members() {
                self.cluster_of[i] = c;
            }
        }
    }

    /// Coefficients `c_k = v_kᵀ W a` of a locus function.
    pub fn coefficients(&self, a: &[Complex<T>]) -> Option<Vec<Complex<T>>> {
        let v = self.vectors.as_ref()?;
        let n = self.dim();
        Some(
            (0..self.entry_count())
                .map(|k| {
                    (0..n).fold(czero(), |acc, p| acc + a[p] * (v[(p, k)] * self.weights[p]))
                })
                .collect(),
        )
    }

    /// `Σ_k c_k v_k` over the given entries.
    pub fn synthesize(&self, coeffs: &[Complex<T>], entries: std::ops::Range<usize>) -> Option<Vec<Complex<T>>> {
        let v = self.vectors.as_ref()?;
        let n = self.dim();
        let mut out = vec![czero(); n];
        for k in entries {
            let c = coeffs[k];
            for (p, o) in out.iter_mut().enumerate() {
                *o += c * v[(p, k)];
            }
        }
        Some(out)
    }

    /// `Π_k = Σ_{members} v vᵀ W`, the `W`-orthogonal projector onto cluster `k`.
    pub fn cluster_projector(&self, k: usize) -> Option<Matrix<T>> {
        let v = self.vectors.as_ref()?;
        let n = self.dim();
        let cl = self.clusters.get(k)?;
        Some(Matrix::from_fn(n, n, |i, j| {
            cl.members()
                .map(|m| v[(i, m)] * v[(j, m)] * self.weights[j])
                .sum()
        }))
    }
}

fn cluster_eigenvalues<T: Real>(values: &[T], mult: &[usize], rel_tol: T) -> Vec<Cluster<T>> {
    let mut out = Vec::new();
    let mut start = 0;
    for i in 0..values.len() {
        let last = i + 1 == values.len();
        let breaks =
            last || (values[i + 1] - values[i]).abs() > rel_tol * T::one().max(values[i].abs());
        if breaks {
            let (mut num, mut den) = (T::zero(), T::zero());
            for k in start..=i {
                let m = T::from_usize_lossy(mult[k]);
                num += values[k] * m;
                den += m;
            }
            out.push(Cluster {
                eigenvalue: if den > T::zero() { num / den } else { values[start] },
                start,
                end: i + 1,
            });
            start = i + 1;
        }
    }
    out
}

/// Full generalized eigensystem of one sector, ascending, with
/// [`DEFAULT_CLUSTER_TOL`] clustering.
///
/// Eigenvalues within roundoff of zero are snapped to exactly zero so that
/// kernel modes sit on the IR side of a zero cutoff. Each eigenvector's first
/// clearly nonzero entry is made positive.
pub fn eigendecompose<T: Real>(op: &LocusOperator<T>) -> Result<SectorModes<T>, SpectralError> {
    let l = &op.stiffness;
    let n = op.dim();
    if l.rows() != n || l.cols() != n || op.weights.iter().any(|w| !(*w > T::zero())) {
        return Err(SpectralError::BadWeights);
    }
    if n > MAX_DENSE_DIM {
        return Err(SpectralError::TooLarge {
            dim: n,
            limit: MAX_DENSE_DIM,
        });
    }
    let scale = T::one().max(l.max_abs());
    let asym = l.asymmetry();
    if asym > T::lit(1e-10) * scale {
        return Err(SpectralError::NonSymmetric(asym.to_f64_lossy()));
    }

    let inv_sqrt: Vec<T> = op.weights.iter().map(|w| w.sqrt().recip()).collect();
    let reduced = Matrix::from_fn(n, n, |i, j| inv_sqrt[i] * l[(i, j)] * inv_sqrt[j]);
    let eig = SymmetricEigen::new(&reduced)?;

    let snap = T::lit(100.0) * T::from_usize_lossy(n.max(1)) * T::epsilon() * T::one().max(reduced.max_abs());
    let eigenvalues: Vec<T> = eig
        .eigenvalues
        .iter()
        .map(|&x| if x.abs() <= snap { T::zero() } else { x })
        .collect();

    let mut vectors = Matrix::from_fn(n, n, |i, k| inv_sqrt[i] * eig.vectors[(i, k)]);
    let sign_tol = T::epsilon().sqrt();
    for k in 0..n {
        let col = vectors.column(k);
        let biggest = col.iter().fold(T::zero(), |m, x| m.max(x.abs()));
        if let Some(first) = col.iter().find(|x| x.abs() > sign_tol * biggest) {
            if *first < T::zero() {
                for i in 0..n {
                    vectors[(i, k)] = -vectors[(i, k)];
                }
            }
        }
    }

    let mut out = SectorModes {
        eigenvalues,
        multiplicities: vec![1; n],
        vectors: Some(vectors),
        weights: op.weights.clone(),
        clusters: Vec::new(),
        cluster_of: Vec::new(),
    };
    out.recluster(T::lit(DEFAULT_CLUSTER_TOL));
    Ok(out)
}

/// Re-cluster a sector spectrum at a different tolerance.
pub fn cluster_modes<T: Real>(modes: &SectorModes<T>, rel_tol: T) -> SectorModes<T> {
    let mut out = modes.clone();
    out.recluster(rel_tol);
    out
}

/// Spectra of every sector.
#[derive(Clone, Debug, PartialEq)]
pub struct ModeBasis<T> {
    sectors: Vec<SectorModes<T>>,
    rel_tol: T,
}

impl<T: Real> ModeBasis<T> {
    pub fn from_operators(ops: &[LocusOperator<T>], rel_tol: T) -> Result<Self, SpectralError> {
        let sectors = ops
            .iter()
            .map(|op| eigendecompose(op).map(|m| cluster_modes(&m, rel_tol)))
            .collect::<Result<_, _>>()?;
        Ok(Self { sectors, rel_tol })
    }

    pub fn from_chart(
        space: &DiscreteSpace<T>,
        chart: &SectorChart<T>,
        rel_tol: T,
    ) -> Result<Self, SpectralError> {
        let ops = generalized_laplacian(space, chart)?;
        Self::from_operators(&ops, rel_tol)
    }

    /// Single-sector basis from a closed-form spectrum.
    pub fn analytic(space: &DiscreteSpace<T>, rel_tol: T) -> Option<Self> {
        let levels = space.closed_form_spectrum()?;
        Some(Self::from_sectors(
            vec![SectorModes::from_levels(&levels, rel_tol)],
            rel_tol,
        ))
    }

    pub fn from_sectors(sectors: Vec<SectorModes<T>>, rel_tol: T) -> Self {
        Self { sectors, rel_tol }
    }

    pub fn sectors(&self) -> &[SectorModes<T>] {
        &self.sectors
    }

    pub fn sector(&self, class: usize) -> Result<&SectorModes<T>, SpectralError> {
        self.sectors
            .get(class)
            .ok_or(SpectralError::UnknownSector(class))
    }

    pub fn len(&self) -> usize {
        self.sectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sectors.is_empty()
    }

    pub fn rel_tol(&self) -> T {
        self.rel_tol
    }

    /// Locus dimension per sector, the shape of compatible algebra elements.
    pub fn shape(&self) -> Vec<usize> {
        self.sectors.iter().map(SectorModes::dim).collect()
    }

    pub fn has_vectors(&self) -> bool {
        self.sectors.iter().all(SectorModes::has_vectors)
    }

    pub fn mode_count(&self) -> usize {
        self.sectors.iter().map(SectorModes::mode_count).sum()
    }

    pub fn lambda_max(&self) -> Option<T> {
        self.sectors
            .iter()
            .filter_map(SectorModes::lambda_max)
            .reduce(T::max)
    }

    /// Smallest strictly positive cluster eigenvalue over all sectors.
    pub fn lambda_min_positive(&self) -> Option<T> {
        self.sectors
            .iter()
            .flat_map(|s| s.clusters.iter().map(|c| c.eigenvalue))
            .filter(|&x| x > T::zero())
            .reduce(T::min)
    }

    /// Rows `(sector, entry, eigenvalue, cluster, multiplicity)` for export.
    pub fn spectrum_rows(&self) -> Vec<(usize, usize, T, usize, usize)> {
        self.sectors
            .iter()
            .enumerate()
            .flat_map(|(s, m)| {
                (0..m.entry_count()).map(move |k| {
                    (s, k, m.eigenvalues[k], m.cluster_of[k], m.multiplicities[k])
                })
            })
            .collect()
    }
}

/// Where the cutoff `Λ` cuts each sector's spectrum. Whole clusters go to one
/// side: IR iff the cluster eigenvalue is `≤ Λ`.
#[derive(Clone, Debug, PartialEq)]
pub struct ScaleSplit<T> {
    pub cutoff: T,
    /// Per sector, the first UV entry (entries before it are IR).
    pub first_uv: Vec<usize>,
    /// Per sector, the number of IR clusters.
    pub ir_clusters: Vec<usize>,
}

impl<T: Real> ScaleSplit<T> {
    /// IR modes of `sector`, counted with multiplicity.
    pub fn retained_modes(&self, modes: &ModeBasis<T>, sector: usize) -> usize {
        modes.sectors[sector].multiplicities[..self.first_uv[sector]]
            .iter()
            .sum()
    }

    pub fn retained_counts(&self, modes: &ModeBasis<T>) -> Vec<usize> {
        (0..modes.len())
            .map(|s| self.retained_modes(modes, s))
            .collect()
    }
}

pub fn scale_split<T: Real>(modes: &ModeBasis<T>, cutoff: T) -> Result<ScaleSplit<T>, SpectralError> {
    if !(cutoff >= T::zero()) {
        return Err(SpectralError::NegativeCutoff(cutoff.to_f64_lossy()));
    }
    let mut first_uv = Vec::with_capacity(modes.len());
    let mut ir_clusters = Vec::with_capacity(modes.len());
    for s in &modes.sectors {
        let k = s.clusters.partition_point(|c| c.eigenvalue <= cutoff);
        ir_clusters.push(k);
        first_uv.push(if k == 0 { 0 } else { s.clusters[k - 1].end });
    }
    Ok(ScaleSplit {
        cutoff,
        first_uv,
        ir_clusters,
    })
}

/// Apply the block-diagonal generalized Laplacian `W⁻¹L` to an element.
pub fn apply_laplacian<T: Real>(
    ops: &[LocusOperator<T>],
    a: &AlgebraElement<T>,
) -> Result<AlgebraElement<T>, SpectralError> {
    let shape: Vec<usize> = ops.iter().map(LocusOperator::dim).collect();
    a.check_shape(&shape)?;
    Ok(AlgebraElement::from_components(
        ops.iter()
            .zip(a.components())
            .map(|(op, c)| op.apply(c))
            .collect(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn circle_modes(n: usize) -> SectorModes<f64> {
        let s = DiscreteSpace::circle(n).unwrap();
        let locus = crate::space::FixedLocus {
            element: 0,
            points: (0..n).collect(),
            weights: vec![1.0; n],
        };
        eigendecompose(&crate::space::build_laplacian(&s, &locus).unwrap()).unwrap()
    }

    #[test]
    fn zero_operator_single_mode() {
        let op = LocusOperator::new(Matrix::zeros(1, 1), vec![1.0]);
        let m = eigendecompose(&op).unwrap();
        assert_eq!(m.eigenvalues(), &[0.0]);
    }

    #[test]
    fn circle8_closed_form_and_multiplicities() {
        let m = circle_modes(8);
        let mut expected: Vec<f64> = (0..8)
            .map(|j| 2.0 - 2.0 * (2.0 * PI * j as f64 / 8.0).cos())
            .collect();
        expected.sort_by(f64::total_cmp);
        for (a, b) in m.eigenvalues().iter().zip(&expected) {
            assert!((a - b).abs() < 1e-12);
        }
        let sizes: Vec<usize> = m.clusters().iter().map(|c| c.end - c.start).collect();
        assert_eq!(sizes, vec![1, 2, 2, 2, 1]);
    }

    #[test]
    fn diagonal_pair_gives_coordinate_vectors() {
        let op = LocusOperator::new(Matrix::from_diagonal(&[0.0f64, 1.0, 4.0]), vec![1.0; 3]);
        let m = eigendecompose(&op).unwrap();
        assert_eq!(m.eigenvalues(), &[0.0, 1.0, 4.0]);
        let v = m.vectors().unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let e = if i == j { 1.0 } else { 0.0 };
                assert!((v[(i, j)] - e).abs() < 1e-14);
            }
        }
        assert_eq!(m.clusters().len(), 3);
    }

    #[test]
    fn rejects_asymmetric() {
        let l = Matrix::from_row_major(2, 2, vec![1.0, -1.0, -0.5, 1.0]).unwrap();
        let op = LocusOperator::new(l, vec![1.0, 1.0]);
        assert!(matches!(
            eigendecompose(&op),
            Err(SpectralError::NonSymmetric(_))
        ));
    }

    #[test]
    fn projectors_resolve_identity() {
        let m = circle_modes(8);
        let mut sum = Matrix::zeros(8, 8);
        for k in 0..m.clusters().len() {
            sum = sum.add(&m.cluster_projector(k).unwrap()).unwrap();
        }
        let err = sum.sub(&Matrix::identity(8)).unwrap().max_abs();
        assert!(err < 1e-10);
    }

    #[test]
    fn splits() {
        let m = circle_modes(8);
        let basis = ModeBasis::from_sectors(vec![m], DEFAULT_CLUSTER_TOL);
        let s0 = scale_split(&basis, 0.0).unwrap();
        assert_eq!(s0.first_uv, vec![1]);
        let s1 = scale_split(&basis, 1.0).unwrap();
        assert_eq!(s1.first_uv, vec![3]);
        assert_eq!(s1.ir_clusters, vec![2]);
        let s_max = scale_split(&basis, 4.0).unwrap();
        assert_eq!(s_max.first_uv, vec![8]);
        assert!(scale_split(&basis, -1.0).is_err());
    }

    #[test]
    fn all_distinct_spectrum_clusters_individually() {
        let levels: Vec<(f64, usize)> = (0..5).map(|k| (k as f64, 1)).collect();
        let s = SectorModes::from_levels(&levels, 1e-9);
        assert_eq!(s.clusters().len(), 5);
    }

    #[test]
    fn near_degenerate_entries_merge() {
        let levels = vec![(1.0f64, 1), (1.0 + 1e-12, 1), (2.0, 1)];
        let s = SectorModes::from_levels(&levels, 1e-9);
        assert_eq!(s.clusters().len(), 2);
        assert!((s.clusters()[0].eigenvalue - (1.0 + 0.5e-12)).abs() < 1e-15);
    }

    #[test]
    fn empty_sector() {
        let op = LocusOperator::<f64>::new(Matrix::zeros(0, 0), vec![]);
        let m = eigendecompose(&op).unwrap();
        assert_eq!(m.mode_count(), 0);
        assert!(m.clusters().is_empty());
    }
}

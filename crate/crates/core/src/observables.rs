//! Partition functions, correlators, heat-trace fits and anomaly defects.
//!
//! The Hamiltonian is the generalized Laplacian; modes never mix sectors, so
//! every trace is computed block by block.

use num_complex::Complex;
use thiserror::Error;

use crate::algebra::{frobenius_pairing, trace, AlgebraElement, AlgebraError, PairingWeights};
use crate::group::FiniteGroupTable;
use crate::scalar::{creal, czero, Real};
use crate::space::{
    build_laplacian, sector_chart, DiscreteSpace, FixedLocus, GroupAction, SectorChart, SpaceError,
};
use crate::spectral::{eigendecompose, ModeBasis, SectorModes, SpectralError};

/// Smallest `β_min · λ_max` accepted by [`heat_fit`]; below it the truncated
/// spectrum, not the asymptotic law, dominates `Z`.
pub const HEAT_FIT_MIN_BETA_LAMBDA: f64 = 25.0;

/// Minimum number of samples in a heat-trace fit window.
pub const HEAT_FIT_MIN_SAMPLES: usize = 4;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ObservableError {
    #[error("β must be positive, got {0}")]
    NonPositiveBeta(f64),
    #[error("unknown class {class}; basis has {classes} sectors")]
    UnknownClass { class: usize, classes: usize },
    #[error("correlator needs at least one field")]
    NoFields,
    #[error("heat fit needs at least {need} samples in the window, got {got}")]
    InsufficientSamples { got: usize, need: usize },
    #[error(
        "fit window is truncation dominated: β_min·λ_max = {product:.3} < {bound} \
         (raise the spectral cutoff or move the window to larger β)"
    )]
    TruncationDominated { product: f64, bound: f64 },
    #[error("fit design is degenerate")]
    DegenerateFit,
    #[error("automorphism rejected: {0}")]
    Incompatible(String),
    #[error("partition-weighted observable needs a mode basis")]
    MissingModes,
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Space(#[from] SpaceError),
}

fn check_beta<T: Real>(beta: T) -> Result<(), ObservableError> {
    if beta > T::zero() {
        Ok(())
    } else {
        Err(ObservableError::NonPositiveBeta(beta.to_f64_lossy()))
    }
}

fn sector<'a, T: Real>(
    modes: &'a ModeBasis<T>,
    class: usize,
) -> Result<&'a SectorModes<T>, ObservableError> {
    modes.sectors().get(class).ok_or(ObservableError::UnknownClass {
        class,
        classes: modes.len(),
    })
}

fn sector_sum<T: Real>(s: &SectorModes<T>, beta: T) -> T {
    s.eigenvalues()
        .iter()
        .zip(s.multiplicities())
        .map(|(&l, &m)| T::from_usize_lossy(m) * (-beta * l).exp())
        .sum()
}

/// `Z(β) = Σ e^{−βλ}` over every mode of every sector.
pub fn partition_function<T: Real>(modes: &ModeBasis<T>, beta: T) -> Result<T, ObservableError> {
    check_beta(beta)?;
    Ok(modes
        .spectrum_rows()
        .into_iter()
        .map(|(_, _, l, _, m)| T::from_usize_lossy(m) * (-beta * l).exp())
        .sum())
}

/// `Z_[g](β)`: the same sum over one sector's modes.
pub fn sector_partition<T: Real>(
    modes: &ModeBasis<T>,
    class: usize,
    beta: T,
) -> Result<T, ObservableError> {
    check_beta(beta)?;
    Ok(sector_sum(sector(modes, class)?, beta))
}

/// Untwisted-style projection of a sector: `tr(e^{−βΔ} P_C)` with `P_C` the
/// average over the centralizer of the class representative acting on its locus.
pub fn invariant_sector_partition<T: Real>(
    modes: &ModeBasis<T>,
    chart: &SectorChart<T>,
    action: &GroupAction,
    class: usize,
    beta: T,
) -> Result<T, ObservableError> {
    check_beta(beta)?;
    let s = sector(modes, class)?;
    let v = s
        .vectors()
        .ok_or(SpectralError::MissingVectors(class))?;
    let sec = &chart.sectors()[class];
    let locus = &sec.locus;
    let moves: Vec<Vec<usize>> = sec
        .centralizer
        .iter()
        .map(|&c| {
            let perm = action.perm(c);
            locus
                .points
                .iter()
                .map(|&p| locus.position(perm[p]).expect("centralizer preserves the locus"))
                .collect()
        })
        .collect();
    let inv = T::from_usize_lossy(moves.len()).recip();
    let w = s.weights();
    let mut z = T::zero();
    for k in 0..s.entry_count() {
        let mut overlap = T::zero();
        for mv in &moves {
            for (p, &q) in mv.iter().enumerate() {
                overlap += v[(p, k)] * w[p] * v[(q, k)];
            }
        }
        z += (-beta * s.eigenvalues()[k]).exp() * overlap * inv;
    }
    Ok(z)
}

/// Total and per-class `Z` over a β-grid.
#[derive(Clone, Debug, PartialEq)]
pub struct PartitionTable<T> {
    pub betas: Vec<T>,
    pub total: Vec<T>,
    /// `per_class[i][c]` = `Z_[c](betas[i])`.
    pub per_class: Vec<Vec<T>>,
    pub lambda_max: Option<T>,
    pub mode_count: usize,
}

impl<T: Real> PartitionTable<T> {
    pub fn build(modes: &ModeBasis<T>, betas: &[T]) -> Result<Self, ObservableError> {
        let mut total = Vec::with_capacity(betas.len());
        let mut per_class = Vec::with_capacity(betas.len());
        for &b in betas {
            total.push(partition_function(modes, b)?);
            per_class.push(
                (0..modes.len())
                    .map(|c| sector_partition(modes, c, b))
                    .collect::<Result<_, _>>()?,
            );
        }
        Ok(Self {
            betas: betas.to_vec(),
            total,
            per_class,
            lambda_max: modes.lambda_max(),
            mode_count: modes.mode_count(),
        })
    }

    pub fn class_count(&self) -> usize {
        self.per_class.first().map_or(0, Vec::len)
    }

    /// Largest `|Z − Σ Z_[g]| / Z` over the grid.
    pub fn additivity_error(&self) -> T {
        self.total
            .iter()
            .zip(&self.per_class)
            .map(|(&z, parts)| {
                let s: T = parts.iter().copied().sum();
                (z - s).abs() / z.abs().max(T::min_positive_value())
            })
            .fold(T::zero(), T::max)
    }
}

/// `tr(e^{−βΔ} M_{Φ₁}⋯M_{Φ_m} e_[g])`.
pub fn sector_correlator<T: Real>(
    modes: &ModeBasis<T>,
    fields: &[AlgebraElement<T>],
    class: usize,
    beta: T,
) -> Result<Complex<T>, ObservableError> {
    check_beta(beta)?;
    if fields.is_empty() {
        return Err(ObservableError::NoFields);
    }
    let s = sector(modes, class)?;
    let shape = modes.shape();
    for f in fields {
        f.check_shape(&shape)?;
    }
    let v = s
        .vectors()
        .ok_or(SpectralError::MissingVectors(class))?;
    let n = s.dim();
    let product: Vec<Complex<T>> = (0..n)
        .map(|p| {
            fields
                .iter()
                .fold(creal(T::one()), |acc, f| acc * f.component(class)[p])
        })
        .collect();
    let w = s.weights();
    let mut acc = czero();
    for k in 0..s.entry_count() {
        let mut diag = czero();
        for p in 0..n {
            diag += product[p] * (v[(p, k)] * v[(p, k)] * w[p]);
        }
        acc += diag * (-beta * s.eigenvalues()[k]).exp();
    }
    Ok(acc)
}

/// Two-term small-β law `Z ≈ c₋₁ β^{−n/2} + c₀`.
#[derive(Clone, Debug, PartialEq)]
pub struct HeatFit<T> {
    pub dimension: usize,
    pub c_minus1: T,
    pub c0: T,
    /// Root-mean-square residual over the window.
    pub residual: T,
    pub samples: usize,
    pub window: (T, T),
}

/// Least-squares heat-trace fit over the table entries with `β ∈ [lo, hi]`.
pub fn heat_fit<T: Real>(
    table: &PartitionTable<T>,
    dimension: usize,
    window: (T, T),
) -> Result<HeatFit<T>, ObservableError> {
    let (lo, hi) = window;
    let pts: Vec<(T, T)> = table
        .betas
        .iter()
        .zip(&table.total)
        .filter(|(&b, _)| b >= lo && b <= hi)
        .map(|(&b, &z)| (b, z))
        .collect();
    if pts.len() < HEAT_FIT_MIN_SAMPLES {
        return Err(ObservableError::InsufficientSamples {
            got: pts.len(),
            need: HEAT_FIT_MIN_SAMPLES,
        });
    }
    let beta_min = pts.iter().map(|p| p.0).fold(T::infinity(), T::min);
    let product = beta_min * table.lambda_max.unwrap_or_else(T::zero);
    if product < T::lit(HEAT_FIT_MIN_BETA_LAMBDA) {
        return Err(ObservableError::TruncationDominated {
            product: product.to_f64_lossy(),
            bound: HEAT_FIT_MIN_BETA_LAMBDA,
        });
    }

    let power = -T::from_usize_lossy(dimension) / T::lit(2.0);
    let xs: Vec<T> = pts.iter().map(|p| p.0.powf(power)).collect();
    let m = T::from_usize_lossy(pts.len());
    let mean_x = xs.iter().copied().sum::<T>() / m;
    let mean_z = pts.iter().map(|p| p.1).sum::<T>() / m;
    let (mut sxx, mut sxz) = (T::zero(), T::zero());
    for (x, p) in xs.iter().zip(&pts) {
        sxx += (*x - mean_x) * (*x - mean_x);
        sxz += (*x - mean_x) * (p.1 - mean_z);
    }
    if !(sxx > T::epsilon() * mean_x * mean_x * m) {
        return Err(ObservableError::DegenerateFit);
    }
    let c_minus1 = sxz / sxx;
    let c0 = mean_z - c_minus1 * mean_x;
    let sq: T = xs
        .iter()
        .zip(&pts)
        .map(|(x, p)| {
            let r = p.1 - (c_minus1 * *x + c0);
            r * r
        })
        .sum();
    Ok(HeatFit {
        dimension,
        c_minus1,
        c0,
        residual: (sq / m).sqrt(),
        samples: pts.len(),
        window,
    })
}

/// A candidate symmetry: a map on group elements and a point bijection of the
/// ambient space with `s ∘ g ∘ s⁻¹ = π(g)` as permutations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AutomorphismSpec {
    pub group_map: Vec<usize>,
    pub point_map: Vec<usize>,
}

impl AutomorphismSpec {
    pub fn identity(order: usize, points: usize) -> Self {
        Self {
            group_map: (0..order).collect(),
            point_map: (0..points).collect(),
        }
    }
}

fn is_bijection(map: &[usize]) -> bool {
    let mut seen = vec![false; map.len()];
    map.iter().all(|&x| x < map.len() && !std::mem::replace(&mut seen[x], true))
}

/// A validated automorphism acting on sector components.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Automorphism {
    /// `class_map[c]`: class receiving the content of class `c`.
    class_map: Vec<usize>,
    /// `point_maps[c][p]`: position in the target locus of position `p` of locus `c`.
    point_maps: Vec<Vec<usize>>,
}

impl Automorphism {
    pub fn new<T: Real>(
        spec: &AutomorphismSpec,
        group: &FiniteGroupTable,
        action: &GroupAction,
        chart: &SectorChart<T>,
    ) -> Result<Self, ObservableError> {
        let n = group.order();
        let pi = &spec.group_map;
        let s = &spec.point_map;
        if pi.len() != n || !is_bijection(pi) {
            return Err(ObservableError::Incompatible(
                "group map is not a bijection of the elements".into(),
            ));
        }
        for g in 0..n {
            for h in 0..n {
                if pi[group.mul(g, h)] != group.mul(pi[g], pi[h]) {
                    return Err(ObservableError::Incompatible(format!(
                        "group map is not a homomorphism at ({g}, {h})"
                    )));
                }
            }
        }
        if s.len() != chart.point_count() || !is_bijection(s) {
            return Err(ObservableError::Incompatible(
                "point map is not a bijection of the space".into(),
            ));
        }
        for g in 0..n {
            let (pg, ppg) = (action.perm(g), action.perm(pi[g]));
            if let Some(x) = (0..s.len()).find(|&x| s[pg[x]] != ppg[s[x]]) {
                return Err(ObservableError::Incompatible(format!(
                    "s∘g ≠ π(g)∘s for element {g} at point {x}"
                )));
            }
        }

        let mut class_map = Vec::with_capacity(chart.len());
        let mut point_maps = Vec::with_capacity(chart.len());
        for sec in chart.sectors() {
            let image = pi[sec.representative];
            let target = chart.class_of_element(image);
            let rep = chart.sectors()[target].representative;
            let c = (0..n)
                .find(|&c| group.conjugate(image, c) == rep)
                .expect("image is conjugate to its class representative");
            let transport = action.perm(c);
            let locus: &FixedLocus<T> = &chart.sectors()[target].locus;
            let map = sec
                .locus
                .points
                .iter()
                .map(|&p| {
                    locus.position(transport[s[p]]).ok_or_else(|| {
                        ObservableError::Incompatible(format!("point {p} leaves the target locus"))
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            class_map.push(target);
            point_maps.push(map);
        }
        Ok(Self {
            class_map,
            point_maps,
        })
    }

    pub fn class_map(&self) -> &[usize] {
        &self.class_map
    }

    /// `σ(a)`: move each sector component to its image class along the point map.
    pub fn apply<T: Real>(&self, a: &AlgebraElement<T>) -> Result<AlgebraElement<T>, ObservableError> {
        let shape: Vec<usize> = self.point_maps.iter().map(Vec::len).collect();
        a.check_shape(&shape)?;
        let mut out = AlgebraElement::filled_zero(&shape);
        for (c, map) in self.point_maps.iter().enumerate() {
            let target = self.class_map[c];
            for (p, &q) in map.iter().enumerate() {
                out.component_mut(target)[q] = a.component(c)[p];
            }
        }
        Ok(out)
    }
}

/// The closed menu of observables for anomaly defects.
#[derive(Clone, Debug, PartialEq)]
pub enum ObservableKind<T> {
    Trace,
    PairingWith(AlgebraElement<T>),
    /// `Σ_[g] tr(e^{−βΔ} M_a e_[g])`.
    PartitionWeighted(T),
}

/// `𝒪(σ(a)) − 𝒪(a)`.
pub fn anomaly_defect<T: Real>(
    kind: &ObservableKind<T>,
    sigma: &Automorphism,
    a: &AlgebraElement<T>,
    weights: &PairingWeights<T>,
    modes: Option<&ModeBasis<T>>,
) -> Result<Complex<T>, ObservableError> {
    let moved = sigma.apply(a)?;
    let eval = |x: &AlgebraElement<T>| -> Result<Complex<T>, ObservableError> {
        match kind {
            ObservableKind::Trace => Ok(trace(x, weights)?),
            ObservableKind::PairingWith(b) => Ok(frobenius_pairing(x, b, weights)?),
            ObservableKind::PartitionWeighted(beta) => {
                let modes = modes.ok_or(ObservableError::MissingModes)?;
                (0..modes.len()).try_fold(czero(), |acc, c| {
                    Ok(acc + sector_correlator(modes, std::slice::from_ref(x), c, *beta)?)
                })
            }
        }
    };
    Ok(eval(&moved)? - eval(a)?)
}

/// Orbifold pipeline against the plain `G = {1}` pipeline on the same space.
#[derive(Clone, Debug, PartialEq)]
pub struct SmoothLimitReport<T> {
    pub betas: Vec<T>,
    /// `Z` of the space with no group.
    pub plain: Vec<T>,
    /// `Z_[1]` of the orbifold pipeline.
    pub untwisted: Vec<T>,
    /// Centralizer-invariant part of the untwisted sector; `None` for
    /// spectral-only spaces.
    pub invariant: Option<Vec<T>>,
    pub max_untwisted_diff: T,
    pub max_invariant_diff: Option<T>,
}

pub fn smooth_limit_compare<T: Real>(
    space: &DiscreteSpace<T>,
    group: &FiniteGroupTable,
    action: &GroupAction,
    betas: &[T],
    rel_tol: T,
) -> Result<SmoothLimitReport<T>, ObservableError> {
    let (plain, untwisted, invariant) = if space.is_spectral_only() {
        let only = || SpaceError::SpectralOnly(space.kind().name().to_string());
        if group.order() != 1 {
            return Err(only().into());
        }
        let direct = ModeBasis::analytic(space, rel_tol).ok_or_else(only)?;
        let orbifold = ModeBasis::analytic(space, rel_tol).ok_or_else(only)?;
        let plain = betas
            .iter()
            .map(|&b| partition_function(&direct, b))
            .collect::<Result<Vec<_>, _>>()?;
        let untwisted = betas
            .iter()
            .map(|&b| sector_partition(&orbifold, 0, b))
            .collect::<Result<Vec<_>, _>>()?;
        (plain, untwisted, None)
    } else {
        let everything = FixedLocus {
            element: 0,
            points: (0..space.point_count()).collect(),
            weights: space.weights().to_vec(),
        };
        let direct = ModeBasis::from_sectors(
            vec![crate::spectral::cluster_modes(
                &eigendecompose(&build_laplacian(space, &everything)?)?,
                rel_tol,
            )],
            rel_tol,
        );
        let chart = sector_chart(space, action, group)?;
        let orbifold = ModeBasis::from_chart(space, &chart, rel_tol)?;
        let one = chart.identity_class();
        let mut plain = Vec::with_capacity(betas.len());
        let mut untwisted = Vec::with_capacity(betas.len());
        let mut invariant = Vec::with_capacity(betas.len());
        for &b in betas {
            plain.push(partition_function(&direct, b)?);
            untwisted.push(sector_partition(&orbifold, one, b)?);
            invariant.push(invariant_sector_partition(&orbifold, &chart, action, one, b)?);
        }
        (plain, untwisted, Some(invariant))
    };
    let diff = |xs: &[T]| {
        xs.iter()
            .zip(&plain)
            .map(|(a, b)| (*a - *b).abs())
            .fold(T::zero(), T::max)
    };
    Ok(SmoothLimitReport {
        betas: betas.to_vec(),
        max_untwisted_diff: diff(&untwisted),
        max_invariant_diff: invariant.as_deref().map(diff),
        plain,
        untwisted,
        invariant,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::idempotent;
    use crate::spectral::DEFAULT_CLUSTER_TOL;

    fn z2_circle8() -> (DiscreteSpace<f64>, FiniteGroupTable, GroupAction, SectorChart<f64>, ModeBasis<f64>) {
        let s = DiscreteSpace::circle(8).unwrap();
        let g = FiniteGroupTable::cyclic(2);
        let a = GroupAction::preset("circle_reflection", &s, &g).unwrap();
        let ch = sector_chart(&s, &a, &g).unwrap();
        let m = ModeBasis::from_chart(&s, &ch, DEFAULT_CLUSTER_TOL).unwrap();
        (s, g, a, ch, m)
    }

    #[test]
    fn twisted_sector_counts_fixed_points() {
        let (.., m) = z2_circle8();
        for b in [1e-3, 0.5, 7.0] {
            assert_eq!(sector_partition(&m, 1, b).unwrap(), 2.0);
        }
        assert!(sector_partition(&m, 2, 1.0).is_err());
        assert!(partition_function(&m, 0.0).is_err());
    }

    #[test]
    fn sphere_series_oracle() {
        let s = DiscreteSpace::<f64>::sphere(40);
        let m = ModeBasis::analytic(&s, DEFAULT_CLUSTER_TOL).unwrap();
        let beta = 0.05;
        let oracle: f64 = (0..=40u32)
            .map(|l| (2 * l + 1) as f64 * (-beta * (l * (l + 1)) as f64).exp())
            .sum();
        assert!((partition_function(&m, beta).unwrap() - oracle).abs() < 1e-12 * oracle);
    }

    #[test]
    fn correlator_cases() {
        let (_, _, _, ch, m) = z2_circle8();
        let unit = AlgebraElement::unit(&ch);
        for c in 0..2 {
            let z = sector_partition(&m, c, 0.3).unwrap();
            let corr = sector_correlator(&m, &[unit.clone()], c, 0.3).unwrap();
            assert!((corr.re - z).abs() < 1e-12 && corr.im.abs() < 1e-15);
        }
        let e0 = idempotent(&ch, 0).unwrap();
        assert_eq!(sector_correlator(&m, &[e0], 1, 0.3).unwrap(), czero());
        let mut f = AlgebraElement::zero(&ch);
        f.component_mut(1)[0] = Complex::new(2.5, -1.0);
        let corr = sector_correlator(&m, &[f], 1, 0.3).unwrap();
        assert!((corr - Complex::new(2.5, -1.0)).norm() < 1e-14);
        assert!(sector_correlator(&m, &[], 0, 1.0).is_err());
    }

    #[test]
    fn even_mode_projection() {
        // Oracle: reflection-even modes of the 8-cycle are the constant, the
        // three cosines and the alternating mode.
        let (s, g, a, ch, m) = z2_circle8();
        let beta = 0.4;
        let even: f64 = (0..=4)
            .map(|j| (-beta * (2.0 - 2.0 * (std::f64::consts::PI * j as f64 / 4.0).cos())).exp())
            .sum();
        let inv = invariant_sector_partition(&m, &ch, &a, 0, beta).unwrap();
        assert!((inv - even).abs() < 1e-12);
        let rep = smooth_limit_compare(&s, &g, &a, &[beta], DEFAULT_CLUSTER_TOL).unwrap();
        assert!(rep.max_untwisted_diff < 1e-12);
        assert!(rep.max_invariant_diff.unwrap() > 0.1);
    }

    #[test]
    fn heat_fit_rejects_single_point() {
        let s = DiscreteSpace::from_graph(vec![1.0], vec![]).unwrap();
        let g = FiniteGroupTable::trivial();
        let a = GroupAction::identity(1, 1);
        let ch = sector_chart(&s, &a, &g).unwrap();
        let m = ModeBasis::from_chart(&s, &ch, DEFAULT_CLUSTER_TOL).unwrap();
        let betas: Vec<f64> = (1..=8).map(|k| k as f64 * 1e-3).collect();
        let t = PartitionTable::build(&m, &betas).unwrap();
        assert!(t.total.iter().all(|&z| z == 1.0));
        assert!(matches!(
            heat_fit(&t, 2, (1e-3, 1e-2)),
            Err(ObservableError::TruncationDominated { .. })
        ));
        assert!(matches!(
            heat_fit(&t, 2, (1e-3, 2e-3)),
            Err(ObservableError::InsufficientSamples { got: 2, .. })
        ));
    }

    #[test]
    fn identity_automorphism_is_exactly_invariant() {
        let (_, g, a, ch, m) = z2_circle8();
        let sigma = Automorphism::new(&AutomorphismSpec::identity(2, 8), &g, &a, &ch).unwrap();
        let w = PairingWeights::from_chart(&ch);
        let mut el = AlgebraElement::zero(&ch);
        el.component_mut(0)[3] = Complex::new(0.7, 0.2);
        el.component_mut(1)[1] = Complex::new(-1.1, 0.0);
        for kind in [
            ObservableKind::Trace,
            ObservableKind::PairingWith(el.clone()),
            ObservableKind::PartitionWeighted(0.5),
        ] {
            assert_eq!(anomaly_defect(&kind, &sigma, &el, &w, Some(&m)).unwrap(), czero());
        }
    }

    #[test]
    fn incompatible_point_map_rejected() {
        let (_, g, a, ch, _) = z2_circle8();
        // Rotation by one step does not commute with the reflection.
        let spec = AutomorphismSpec {
            group_map: vec![0, 1],
            point_map: (0..8).map(|p| (p + 1) % 8).collect(),
        };
        assert!(matches!(
            Automorphism::new(&spec, &g, &a, &ch),
            Err(ObservableError::Incompatible(_))
        ));
    }
}

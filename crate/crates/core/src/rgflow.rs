//! Spectral-cutoff flow `Φ_ℓ` with cutoff `Λ = 1/ℓ`.
//!
//! Two realizations are provided. [`rg_filter`] maps elements to elements by
//! dropping every UV cluster from each sector's eigen-expansion;
//! [`rg_compress`] maps an element to the compressed multiplication operator
//! `P_{≤Λ} M_a P_{≤Λ}` written in the retained `W`-orthonormal modes.

use num_complex::Complex;
use thiserror::Error;

use crate::algebra::{diagonal_product, fusion_product, AlgebraElement, AlgebraError, PairingWeights};
use crate::linalg::{LinalgError, Matrix};
use crate::scalar::{creal, czero, Real};
use crate::space::SectorChart;
use crate::spectral::{scale_split, ModeBasis, ScaleSplit, SpectralError};

/// Points in the default logarithmic ℓ-grid.
pub const DEFAULT_GRID_POINTS: usize = 33;

/// Default tolerance for RG-fixed detection.
pub const DEFAULT_FIXED_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RgError {
    #[error("scale ℓ must be positive, got {0}")]
    NonPositiveScale(f64),
    #[error("step δℓ must be positive, got {0}")]
    NonPositiveStep(f64),
    #[error("fusion commutation needs an abelian group")]
    NonAbelian,
    #[error("ℓ-grid is empty")]
    EmptyGrid,
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Mode data frozen at one scale.
#[derive(Clone, Debug)]
pub struct RGState<'a, T> {
    modes: &'a ModeBasis<T>,
    scale: T,
    cutoff: T,
    split: ScaleSplit<T>,
}

impl<'a, T: Real> RGState<'a, T> {
    pub fn new(modes: &'a ModeBasis<T>, scale: T) -> Result<Self, RgError> {
        if !(scale > T::zero()) {
            return Err(RgError::NonPositiveScale(scale.to_f64_lossy()));
        }
        let cutoff = scale.recip();
        let split = scale_split(modes, cutoff)?;
        Ok(Self {
            modes,
            scale,
            cutoff,
            split,
        })
    }

    pub fn modes(&self) -> &ModeBasis<T> {
        self.modes
    }

    pub fn scale(&self) -> T {
        self.scale
    }

    pub fn cutoff(&self) -> T {
        self.cutoff
    }

    pub fn split(&self) -> &ScaleSplit<T> {
        &self.split
    }

    pub fn retained_counts(&self) -> Vec<usize> {
        self.split.retained_counts(self.modes)
    }
}

pub fn pairing_weights<T: Real>(modes: &ModeBasis<T>) -> PairingWeights<T> {
    PairingWeights(modes.sectors().iter().map(|s| s.weights().to_vec()).collect())
}

fn check<T: Real>(modes: &ModeBasis<T>, a: &AlgebraElement<T>) -> Result<(), RgError> {
    a.check_shape(&modes.shape())?;
    if let Some(i) = modes.sectors().iter().position(|s| !s.has_vectors()) {
        return Err(SpectralError::MissingVectors(i).into());
    }
    Ok(())
}

/// Drop the UV clusters of every sector component.
pub fn rg_filter<T: Real>(
    state: &RGState<'_, T>,
    a: &AlgebraElement<T>,
) -> Result<AlgebraElement<T>, RgError> {
    check(state.modes, a)?;
    let comps = state
        .modes
        .sectors()
        .iter()
        .zip(a.components())
        .zip(&state.split.first_uv)
        .map(|((s, c), &cut)| {
            let coeffs = s.coefficients(c).expect("vectors checked");
            s.synthesize(&coeffs, 0..cut).expect("vectors checked")
        })
        .collect();
    Ok(AlgebraElement::from_components(comps))
}

/// `P_{≤Λ} M_a P_{≤Λ}` in the retained-mode basis, block-diagonal by sector.
pub fn rg_compress<T: Real>(
    state: &RGState<'_, T>,
    a: &AlgebraElement<T>,
) -> Result<Matrix<Complex<T>>, RgError> {
    check(state.modes, a)?;
    let counts = &state.split.first_uv;
    let total: usize = counts.iter().sum();
    let mut out = Matrix::zeros(total, total);
    let mut offset = 0;
    for ((s, c), &r) in state.modes.sectors().iter().zip(a.components()).zip(counts) {
        let v = s.vectors().expect("vectors checked");
        let w = s.weights();
        for k in 0..r {
            for l in 0..r {
                let mut acc = czero();
                for p in 0..s.dim() {
                    acc += c[p] * (v[(p, k)] * w[p] * v[(p, l)]);
                }
                out[(offset + k, offset + l)] = acc;
            }
        }
        offset += r;
    }
    Ok(out)
}

/// `‖Φ(ab) − Φ(a)Φ(b)‖` in operator norm, with the diagonal product.
pub fn multiplicativity_defect<T: Real>(
    state: &RGState<'_, T>,
    a: &AlgebraElement<T>,
    b: &AlgebraElement<T>,
) -> Result<T, RgError> {
    let ab = diagonal_product(a, b)?;
    let lhs = rg_compress(state, &ab)?;
    let rhs = rg_compress(state, a)?.matmul(&rg_compress(state, b)?)?;
    Ok(lhs.sub(&rhs)?.spectral_norm()?)
}

/// Finite-difference scale derivative `ℓ·(Φ_{ℓ+δℓ}(a) − Φ_ℓ(a))/δℓ`.
///
/// On a discrete spectrum this is `−(ℓ/δℓ)` times the components of `a` whose
/// cluster eigenvalue lies in `(1/(ℓ+δℓ), 1/ℓ]`, and zero otherwise.
pub fn beta_estimate<T: Real>(
    modes: &ModeBasis<T>,
    a: &AlgebraElement<T>,
    scale: T,
    step: T,
) -> Result<AlgebraElement<T>, RgError> {
    if !(step > T::zero()) {
        return Err(RgError::NonPositiveStep(step.to_f64_lossy()));
    }
    let here = rg_filter(&RGState::new(modes, scale)?, a)?;
    let there = rg_filter(&RGState::new(modes, scale + step)?, a)?;
    Ok(there.sub(&here)?.scale(creal(scale / step)))
}

#[derive(Clone, Debug, PartialEq)]
pub struct FixedVerdict<T> {
    pub fixed: bool,
    /// First grid scale where `‖Φ_ℓ(a) − a‖` exceeds the tolerance.
    pub witness: Option<T>,
    pub max_deviation: T,
}

/// `a` is RG-fixed on the grid when `‖Φ_ℓ(a) − a‖ ≤ tol` at every grid `ℓ`,
/// measured in the weighted norm `sqrt(Σ w|·|²)`.
pub fn is_rg_fixed<T: Real>(
    modes: &ModeBasis<T>,
    a: &AlgebraElement<T>,
    grid: &[T],
    tol: T,
) -> Result<FixedVerdict<T>, RgError> {
    if grid.is_empty() {
        return Err(RgError::EmptyGrid);
    }
    let weights = pairing_weights(modes);
    let mut witness = None;
    let mut max_dev = T::zero();
    for &l in grid {
        let filtered = rg_filter(&RGState::new(modes, l)?, a)?;
        let dev = filtered.sub(a)?.weighted_norm(&weights)?;
        max_dev = max_dev.max(dev);
        if dev > tol && witness.is_none() {
            witness = Some(l);
        }
    }
    Ok(FixedVerdict {
        fixed: witness.is_none(),
        witness,
        max_deviation: max_dev,
    })
}

/// `‖Φ(a ⋆ b) − Φ(a) ⋆ Φ(b)‖` for the fusion product `⋆`, in the weighted norm.
pub fn fusion_commutation_defect<T: Real>(
    state: &RGState<'_, T>,
    a: &AlgebraElement<T>,
    b: &AlgebraElement<T>,
    chart: &SectorChart<T>,
) -> Result<T, RgError> {
    if !chart.is_abelian() {
        return Err(RgError::NonAbelian);
    }
    let lhs = rg_filter(state, &fusion_product(a, b, chart)?)?;
    let rhs = fusion_product(&rg_filter(state, a)?, &rg_filter(state, b)?, chart)?;
    Ok(lhs.sub(&rhs)?.weighted_norm(&pairing_weights(state.modes))?)
}

/// Logarithmic grid from `1/(2λ_max)` to `2/λ_min⁺`. Spectra without a
/// positive eigenvalue get the grid `[1/2, 2]`.
pub fn default_grid<T: Real>(modes: &ModeBasis<T>, points: usize) -> Vec<T> {
    let two = T::lit(2.0);
    let (lo, hi) = match (modes.lambda_max(), modes.lambda_min_positive()) {
        (Some(max), Some(min)) if max > T::zero() => ((two * max).recip(), two / min),
        _ => (T::lit(0.5), two),
    };
    log_grid(lo, hi, points)
}

pub fn log_grid<T: Real>(lo: T, hi: T, points: usize) -> Vec<T> {
    match points {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let (a, b) = (lo.ln(), hi.ln());
            let last = T::from_usize_lossy(points - 1);
            (0..points)
                .map(|i| {
                    if i + 1 == points {
                        hi
                    } else {
                        (a + (b - a) * T::from_usize_lossy(i) / last).exp()
                    }
                })
                .collect()
        }
    }
}

/// Flow diagnostics over an ℓ-grid.
#[derive(Clone, Debug, PartialEq)]
pub struct FlowReport<T> {
    pub grid: Vec<T>,
    pub cutoffs: Vec<T>,
    /// `retained[i][s]`: IR modes of sector `s` at grid point `i`.
    pub retained: Vec<Vec<usize>>,
    /// Multiplicativity defect of the probe pair; `None` without eigenvectors.
    pub multiplicativity: Vec<Option<T>>,
    /// `max_[g] ‖Φ_ℓ(e_[g]) − e_[g]‖`; `None` without eigenvectors.
    pub idempotent_defect: Vec<Option<T>>,
    /// `fixed[i][s]`: whether `e_[s]` survives the filter at grid point `i`.
    pub idempotent_fixed: Vec<Vec<bool>>,
}

pub fn flow_sweep<T: Real>(
    modes: &ModeBasis<T>,
    grid: &[T],
    probes: Option<(&AlgebraElement<T>, &AlgebraElement<T>)>,
    tol: T,
) -> Result<FlowReport<T>, RgError> {
    let shape = modes.shape();
    let weights = pairing_weights(modes);
    let idempotents: Vec<AlgebraElement<T>> = (0..modes.len())
        .map(|s| {
            let mut e = AlgebraElement::filled_zero(&shape);
            e.component_mut(s).fill(creal(T::one()));
            e
        })
        .collect();
    let mut report = FlowReport {
        grid: grid.to_vec(),
        cutoffs: Vec::with_capacity(grid.len()),
        retained: Vec::with_capacity(grid.len()),
        multiplicativity: Vec::with_capacity(grid.len()),
        idempotent_defect: Vec::with_capacity(grid.len()),
        idempotent_fixed: Vec::with_capacity(grid.len()),
    };
    for &l in grid {
        let state = RGState::new(modes, l)?;
        report.cutoffs.push(state.cutoff());
        report.retained.push(state.retained_counts());
        if modes.has_vectors() {
            let mult = match probes {
                Some((a, b)) => Some(multiplicativity_defect(&state, a, b)?),
                None => None,
            };
            let mut worst = T::zero();
            let mut fixed = Vec::with_capacity(idempotents.len());
            for e in &idempotents {
                let d = rg_filter(&state, e)?.sub(e)?.weighted_norm(&weights)?;
                worst = worst.max(d);
                fixed.push(d <= tol);
            }
            report.multiplicativity.push(mult);
            report.idempotent_defect.push(Some(worst));
            report.idempotent_fixed.push(fixed);
        } else {
            report.multiplicativity.push(None);
            report.idempotent_defect.push(None);
            // Constants are kernel modes; analytic sectors keep λ = 0 at every scale.
            report.idempotent_fixed.push(vec![true; modes.len()]);
        }
    }
    Ok(report)
}

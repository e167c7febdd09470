//! Truncated ℂ/ℤ₂ model: parity-graded polynomials up to degree `N`, the
//! spectrum `λ(zⁿ) = n`, and a twisted scalar living on the fixed point `0`.
//!
//! The odd coefficients and the twisted scalar are independent data.

use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::algebra::AlgebraElement;
use crate::linalg::Matrix;
use crate::rgflow::{default_grid, rg_filter, RGState, RgError, DEFAULT_GRID_POINTS};
use crate::scalar::{czero, Real};
use crate::space::LocusOperator;
use crate::spectral::{ModeBasis, SpectralError, DEFAULT_CLUSTER_TOL};

/// Random trials per [`toy_cross_check`].
pub const TOY_TRIALS: usize = 50;

const TOY_SEED: u64 = 0x7a2;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ToyError {
    #[error("truncation degrees differ: {0} vs {1}")]
    DegreeMismatch(usize, usize),
    #[error("scale ℓ must be positive, got {0}")]
    NonPositiveScale(f64),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Rg(#[from] RgError),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ParityElement<T> {
    degree: usize,
    /// Coefficients of z⁰, z², z⁴, …
    even: Vec<Complex<T>>,
    /// Coefficients of z¹, z³, …
    odd: Vec<Complex<T>>,
    twisted: Complex<T>,
}

impl<T: Real> ParityElement<T> {
    pub fn zero(degree: usize) -> Self {
        Self {
            degree,
            even: vec![czero(); degree / 2 + 1],
            odd: vec![czero(); (degree + 1) / 2],
            twisted: czero(),
        }
    }

    pub fn from_parts(
        degree: usize,
        even: Vec<Complex<T>>,
        odd: Vec<Complex<T>>,
        twisted: Complex<T>,
    ) -> Option<Self> {
        (even.len() == degree / 2 + 1 && odd.len() == (degree + 1) / 2).then_some(Self {
            degree,
            even,
            odd,
            twisted,
        })
    }

    /// `e₊`: the even constant 1, twisted value 0.
    pub fn even_unit(degree: usize) -> Self {
        let mut e = Self::zero(degree);
        e.even[0] = Complex::new(T::one(), T::zero());
        e
    }

    /// `e₋`: the twisted scalar 1 and nothing else.
    pub fn twisted_unit(degree: usize) -> Self {
        let mut e = Self::zero(degree);
        e.twisted = Complex::new(T::one(), T::zero());
        e
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn even(&self) -> &[Complex<T>] {
        &self.even
    }

    pub fn odd(&self) -> &[Complex<T>] {
        &self.odd
    }

    pub fn twisted(&self) -> Complex<T> {
        self.twisted
    }

    /// Coefficient of `zⁿ` (zero above the truncation degree).
    pub fn coefficient(&self, n: usize) -> Complex<T> {
        let part = if n % 2 == 0 { &self.even } else { &self.odd };
        part.get(n / 2).copied().unwrap_or_else(czero)
    }

    /// Coefficients of z⁰..z^N in degree order.
    pub fn coefficients(&self) -> Vec<Complex<T>> {
        (0..=self.degree).map(|n| self.coefficient(n)).collect()
    }

    fn coefficient_mut(&mut self, n: usize) -> &mut Complex<T> {
        if n % 2 == 0 {
            &mut self.even[n / 2]
        } else {
            &mut self.odd[n / 2]
        }
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        let poly = (0..=self.degree.max(other.degree))
            .map(|n| (self.coefficient(n) - other.coefficient(n)).norm())
            .fold(T::zero(), T::max);
        poly.max((self.twisted - other.twisted).norm())
    }
}

/// Split `f = Σ cₙ zⁿ` into parity parts; the twisted scalar is `f(0) = c₀`.
/// An empty slice is the zero polynomial of degree 0.
pub fn parity_split<T: Real>(coeffs: &[Complex<T>]) -> ParityElement<T> {
    let degree = coeffs.len().saturating_sub(1);
    let mut out = ParityElement::zero(degree);
    for (n, &c) in coeffs.iter().enumerate() {
        *out.coefficient_mut(n) = c;
    }
    out.twisted = coeffs.first().copied().unwrap_or_else(czero);
    out
}

/// Truncated polynomial product; twisted values multiply.
pub fn toy_product<T: Real>(
    a: &ParityElement<T>,
    b: &ParityElement<T>,
) -> Result<ParityElement<T>, ToyError> {
    if a.degree != b.degree {
        return Err(ToyError::DegreeMismatch(a.degree, b.degree));
    }
    let n = a.degree;
    let mut out = ParityElement::zero(n);
    for i in 0..=n {
        let x = a.coefficient(i);
        if x == czero() {
            continue;
        }
        for j in 0..=n - i {
            *out.coefficient_mut(i + j) += x * b.coefficient(j);
        }
    }
    out.twisted = a.twisted * b.twisted;
    Ok(out)
}

/// Keep the monomials with `n ≤ 1/ℓ`; the twisted scalar (`λ = 0`) always stays.
pub fn toy_rg<T: Real>(a: &ParityElement<T>, scale: T) -> Result<ParityElement<T>, ToyError> {
    if !(scale > T::zero()) {
        return Err(ToyError::NonPositiveScale(scale.to_f64_lossy()));
    }
    let cutoff = scale.recip();
    let mut out = a.clone();
    for n in 0..=a.degree {
        if T::from_usize_lossy(n) > cutoff {
            *out.coefficient_mut(n) = czero();
        }
    }
    Ok(out)
}

/// The toy spectrum as a generic three-sector basis: even monomials, odd
/// monomials, and a single twisted point, each with unit weights and a
/// diagonal stiffness matrix.
pub fn toy_mode_basis<T: Real>(degree: usize) -> Result<ModeBasis<T>, SpectralError> {
    let diag = |levels: Vec<usize>| {
        let values: Vec<T> = levels.iter().map(|&n| T::from_usize_lossy(n)).collect();
        let dim = values.len();
        LocusOperator::new(Matrix::from_diagonal(&values), vec![T::one(); dim])
    };
    let ops = [
        diag((0..=degree).step_by(2).collect()),
        diag((1..=degree).step_by(2).collect()),
        LocusOperator::new(Matrix::zeros(1, 1), vec![T::one()]),
    ];
    ModeBasis::from_operators(&ops, T::lit(DEFAULT_CLUSTER_TOL))
}

fn to_generic<T: Real>(a: &ParityElement<T>) -> AlgebraElement<T> {
    AlgebraElement::from_components(vec![a.even.clone(), a.odd.clone(), vec![a.twisted]])
}

fn from_generic<T: Real>(degree: usize, a: &AlgebraElement<T>) -> ParityElement<T> {
    ParityElement {
        degree,
        even: a.component(0).to_vec(),
        odd: a.component(1).to_vec(),
        twisted: a.component(2)[0],
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ToyCrossCheck<T> {
    pub degree: usize,
    pub grid: Vec<T>,
    pub trials: usize,
    pub max_deviation: T,
    pub passed: bool,
}

/// Compare [`toy_rg`] with the generic filter on the equivalent mode basis
/// over every grid scale, for every monomial and [`TOY_TRIALS`] seeded random
/// elements. An empty grid uses the basis default grid.
pub fn toy_cross_check<T: Real>(degree: usize, grid: &[T], tol: T) -> Result<ToyCrossCheck<T>, ToyError> {
    let modes = toy_mode_basis::<T>(degree)?;
    let grid = if grid.is_empty() {
        default_grid(&modes, DEFAULT_GRID_POINTS)
    } else {
        grid.to_vec()
    };
    let mut probes: Vec<ParityElement<T>> = (0..=degree)
        .map(|n| {
            let mut c = vec![czero(); degree + 1];
            c[n] = Complex::new(T::one(), T::zero());
            let mut e = parity_split(&c);
            e.twisted = czero();
            e
        })
        .collect();
    probes.push(ParityElement::twisted_unit(degree));
    let mut rng = ChaCha8Rng::seed_from_u64(TOY_SEED ^ degree as u64);
    let shape = modes.shape();
    for _ in 0..TOY_TRIALS {
        probes.push(from_generic(degree, &AlgebraElement::random(&shape, &mut rng)));
    }

    let mut worst = T::zero();
    for &l in &grid {
        let state = RGState::new(&modes, l)?;
        for p in &probes {
            let toy = toy_rg(p, l)?;
            let generic = from_generic(degree, &rg_filter(&state, &to_generic(p))?);
            worst = worst.max(toy.max_abs_diff(&generic));
        }
    }
    Ok(ToyCrossCheck {
        degree,
        grid,
        trials: TOY_TRIALS,
        max_deviation: worst,
        passed: worst <= tol,
    })
}

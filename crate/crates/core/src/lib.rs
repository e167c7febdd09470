//! Sector algebras of finite group actions on discrete spaces.
//!
//! A finite group acts on a weighted graph by permutations. Each conjugacy
//! class contributes a sector supported on the fixed locus of its
//! representative; the sectors carry a diagonal and a fusion product, a
//! weighted pairing, and a block-diagonal Laplacian whose spectrum drives a
//! spectral-cutoff flow and the partition functions in [`observables`].
//!
//! Numerical code is generic over [`Real`] (`f32` or `f64`); the aliases below
//! fix `f64`. Ages are exact rationals.

pub mod algebra;
pub mod group;
pub mod linalg;
pub mod observables;
pub mod rgflow;
pub mod scalar;
pub mod space;
pub mod spectral;
pub mod toymodel;

pub use scalar::{Cplx, Real};

use thiserror::Error;

/// Any error raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error(transparent)]
    Group(#[from] group::GroupError),
    #[error(transparent)]
    Space(#[from] space::SpaceError),
    #[error(transparent)]
    Algebra(#[from] algebra::AlgebraError),
    #[error(transparent)]
    Spectral(#[from] spectral::SpectralError),
    #[error(transparent)]
    Rg(#[from] rgflow::RgError),
    #[error(transparent)]
    Observable(#[from] observables::ObservableError),
    #[error(transparent)]
    Toy(#[from] toymodel::ToyError),
    #[error(transparent)]
    Linalg(#[from] linalg::LinalgError),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Exact rational used for ages and rotation angles.
pub type Rational = num_rational::Ratio<i64>;

pub type Space = space::DiscreteSpace<f64>;
pub type Chart = space::SectorChart<f64>;
pub type Element = algebra::AlgebraElement<f64>;
pub type Weights = algebra::PairingWeights<f64>;
pub type Modes = spectral::ModeBasis<f64>;
pub type Split = spectral::ScaleSplit<f64>;
pub type Flow = rgflow::FlowReport<f64>;
pub type Partition = observables::PartitionTable<f64>;
pub type Fit = observables::HeatFit<f64>;
pub type Parity = toymodel::ParityElement<f64>;
pub type Complex = num_complex::Complex<f64>;

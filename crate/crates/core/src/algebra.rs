//! Elements of the sector algebra: one complex function per conjugacy class,
//! living on that class's fixed locus.
//!
//! Two products are provided. [`diagonal_product`] multiplies sector by
//! sector and has unit `Σ e_[g]`; it is the product behind the pairing,
//! trace and observables. [`fusion_product`] sends `[g]×[h]` content to
//! `[gh]` through the common fixed set `X^g ∩ X^h` and has unit `e_[1]`.

use std::collections::BTreeMap;

use num_complex::Complex;
use rand::Rng;
use serde::ser::{Serialize, SerializeMap, Serializer};
use thiserror::Error;

use crate::scalar::{cone, czero, Real};
use crate::space::SectorChart;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("sector shapes differ: {left:?} vs {right:?}")]
    ChartMismatch {
        left: Vec<usize>,
        right: Vec<usize>,
    },
    #[error("unknown class {class}; chart has {classes} classes")]
    UnknownClass { class: usize, classes: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraElement<T> {
    components: Vec<Vec<Complex<T>>>,
}

impl<T: Real> AlgebraElement<T> {
    /// Builds an element from per-class vectors, checking them against `chart`.
    pub fn new(chart: &SectorChart<T>, components: Vec<Vec<Complex<T>>>) -> Result<Self, AlgebraError> {
        let el = Self { components };
        el.check_shape(&chart.locus_sizes())?;
        Ok(el)
    }

    pub fn from_components(components: Vec<Vec<Complex<T>>>) -> Self {
        Self { components }
    }

    pub fn zero(chart: &SectorChart<T>) -> Self {
        Self::filled_zero(&chart.locus_sizes())
    }

    pub fn filled_zero(shape: &[usize]) -> Self {
        Self {
            components: shape.iter().map(|&n| vec![czero(); n]).collect(),
        }
    }

    /// `Σ_[g] e_[g]`, the unit of the diagonal product.
    pub fn unit(chart: &SectorChart<T>) -> Self {
        Self::ones(&chart.locus_sizes())
    }

    pub fn ones(shape: &[usize]) -> Self {
        Self {
            components: shape.iter().map(|&n| vec![cone(); n]).collect(),
        }
    }

    /// Entries drawn uniformly from `[-1, 1] + i[-1, 1]`.
    pub fn random<R: Rng + ?Sized>(shape: &[usize], rng: &mut R) -> Self {
        Self {
            components: shape
                .iter()
                .map(|&n| {
                    (0..n)
                        .map(|_| {
                            Complex::new(
                                T::lit(rng.gen_range(-1.0..=1.0)),
                                T::lit(rng.gen_range(-1.0..=1.0)),
                            )
                        })
                        .collect()
                })
                .collect(),
        }
    }

    /// Real-valued random element, used where Hermitian structure matters.
    pub fn random_real<R: Rng + ?Sized>(shape: &[usize], rng: &mut R) -> Self {
        Self {
            components: shape
                .iter()
                .map(|&n| {
                    (0..n)
                        .map(|_| Complex::new(T::lit(rng.gen_range(-1.0..=1.0)), T::zero()))
                        .collect()
                })
                .collect(),
        }
    }

    pub fn components(&self) -> &[Vec<Complex<T>>] {
        &self.components
    }

    pub fn component(&self, class: usize) -> &[Complex<T>] {
        &self.components[class]
    }

    pub fn component_mut(&mut self, class: usize) -> &mut [Complex<T>] {
        &mut self.components[class]
    }

    pub fn shape(&self) -> Vec<usize> {
        self.components.iter().map(Vec::len).collect()
    }

    pub fn check_shape(&self, shape: &[usize]) -> Result<(), AlgebraError> {
        let mine = self.shape();
        if mine == shape {
            Ok(())
        } else {
            Err(AlgebraError::ChartMismatch {
                left: mine,
                right: shape.to_vec(),
            })
        }
    }

    fn same_shape(&self, other: &Self) -> Result<(), AlgebraError> {
        other.check_shape(&self.shape())
    }

    pub fn add(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.zip(other, |a, b| a - b)
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        Self {
            components: self
                .components
                .iter()
                .map(|c| c.iter().map(|&x| x * s).collect())
                .collect(),
        }
    }

    fn zip(
        &self,
        other: &Self,
        f: impl Fn(Complex<T>, Complex<T>) -> Complex<T>,
    ) -> Result<Self, AlgebraError> {
        self.same_shape(other)?;
        Ok(Self {
            components: self
                .components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| a.iter().zip(b).map(|(&x, &y)| f(x, y)).collect())
                .collect(),
        })
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> T {
        self.components
            .iter()
            .flatten()
            .fold(T::zero(), |m, z| m.max(z.norm()))
    }

    /// `sqrt(Σ w |a|²)`, the norm induced by the sesquilinear version of the pairing.
    pub fn weighted_norm(&self, weights: &PairingWeights<T>) -> Result<T, AlgebraError> {
        self.check_shape(&weights.shape())?;
        Ok(self
            .components
            .iter()
            .zip(&weights.0)
            .flat_map(|(a, w)| a.iter().zip(w).map(|(z, &w)| w * z.norm_sqr()))
            .sum::<T>()
            .sqrt())
    }
}

/// Serializes as `{"<class index>": [[re, im], ...], ...}`.
impl<T: Real> Serialize for AlgebraElement<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.components.len()))?;
        for (i, c) in self.components.iter().enumerate() {
            let pairs: Vec<[f64; 2]> = c
                .iter()
                .map(|z| [z.re.to_f64_lossy(), z.im.to_f64_lossy()])
                .collect();
            map.serialize_entry(&i.to_string(), &pairs)?;
        }
        map.end()
    }
}

impl<T: Real> AlgebraElement<T> {
    /// Inverse of the serialized per-class map; classes must be `0..k`.
    pub fn from_serialized(map: &BTreeMap<String, Vec<[f64; 2]>>) -> Option<Self> {
        let mut comps: Vec<(usize, Vec<Complex<T>>)> = map
            .iter()
            .map(|(k, v)| {
                let idx = k.parse().ok()?;
                Some((
                    idx,
                    v.iter()
                        .map(|p| Complex::new(T::lit(p[0]), T::lit(p[1])))
                        .collect(),
                ))
            })
            .collect::<Option<_>>()?;
        comps.sort_by_key(|(i, _)| *i);
        if comps.iter().enumerate().any(|(pos, (i, _))| pos != *i) {
            return None;
        }
        Some(Self::from_components(
            comps.into_iter().map(|(_, c)| c).collect(),
        ))
    }
}

/// Quadrature weights of every fixed locus, the measure of the pairing.
#[derive(Clone, Debug, PartialEq)]
pub struct PairingWeights<T>(pub Vec<Vec<T>>);

impl<T: Real> PairingWeights<T> {
    pub fn from_chart(chart: &SectorChart<T>) -> Self {
        Self(
            chart
                .sectors()
                .iter()
                .map(|s| s.locus.weights.clone())
                .collect(),
        )
    }

    pub fn shape(&self) -> Vec<usize> {
        self.0.iter().map(Vec::len).collect()
    }

    pub fn min(&self) -> Option<T> {
        self.0.iter().flatten().copied().reduce(T::min)
    }
}

fn check_class<T>(chart: &SectorChart<T>, class: usize) -> Result<(), AlgebraError>
where
    T: Real,
{
    if class < chart.len() {
        Ok(())
    } else {
        Err(AlgebraError::UnknownClass {
            class,
            classes: chart.len(),
        })
    }
}

/// `e_[g]`: constant one on the locus of `class`, zero elsewhere.
pub fn idempotent<T: Real>(
    chart: &SectorChart<T>,
    class: usize,
) -> Result<AlgebraElement<T>, AlgebraError> {
    check_class(chart, class)?;
    let mut el = AlgebraElement::zero(chart);
    el.components[class].fill(cone());
    Ok(el)
}

/// Sector-by-sector pointwise product.
pub fn diagonal_product<T: Real>(
    a: &AlgebraElement<T>,
    b: &AlgebraElement<T>,
) -> Result<AlgebraElement<T>, AlgebraError> {
    a.zip(b, |x, y| x * y)
}

/// Fusion product: for each class pair, restrict both factors to the common
/// fixed set, multiply, and extend by zero into the product class locus.
pub fn fusion_product<T: Real>(
    a: &AlgebraElement<T>,
    b: &AlgebraElement<T>,
    chart: &SectorChart<T>,
) -> Result<AlgebraElement<T>, AlgebraError> {
    let shape = chart.locus_sizes();
    a.check_shape(&shape)?;
    b.check_shape(&shape)?;
    let mut out = AlgebraElement::zero(chart);
    for i in 0..chart.len() {
        for j in 0..chart.len() {
            let k = chart.product(i, j).class;
            for &(pi, pj, pk) in chart.fusion_map(i, j) {
                let v = a.components[i][pi] * b.components[j][pj];
                out.components[k][pk] += v;
            }
        }
    }
    Ok(out)
}

/// Bilinear (unconjugated) pairing `Σ_[g] Σ_x w(x) a(x) b(x)`.
pub fn frobenius_pairing<T: Real>(
    a: &AlgebraElement<T>,
    b: &AlgebraElement<T>,
    weights: &PairingWeights<T>,
) -> Result<Complex<T>, AlgebraError> {
    let shape = weights.shape();
    a.check_shape(&shape)?;
    b.check_shape(&shape)?;
    let mut acc = czero();
    for ((ca, cb), w) in a.components.iter().zip(&b.components).zip(&weights.0) {
        for ((&x, &y), &wt) in ca.iter().zip(cb).zip(w) {
            acc += x * y * wt;
        }
    }
    Ok(acc)
}

/// `τ(a) = ⟨a, 1⟩`.
pub fn trace<T: Real>(
    a: &AlgebraElement<T>,
    weights: &PairingWeights<T>,
) -> Result<Complex<T>, AlgebraError> {
    a.check_shape(&weights.shape())?;
    let mut acc = czero();
    for (ca, w) in a.components.iter().zip(&weights.0) {
        for (&x, &wt) in ca.iter().zip(w) {
            acc += x * wt;
        }
    }
    Ok(acc)
}

/// `e_[g] a e_[g]`: keep one sector, zero the rest.
pub fn sector_project<T: Real>(
    a: &AlgebraElement<T>,
    class: usize,
) -> Result<AlgebraElement<T>, AlgebraError> {
    if class >= a.components.len() {
        return Err(AlgebraError::UnknownClass {
            class,
            classes: a.components.len(),
        });
    }
    let mut out = AlgebraElement::filled_zero(&a.shape());
    out.components[class].clone_from(&a.components[class]);
    Ok(out)
}

//! Discrete stand-ins for the target space: weighted graphs with quadrature
//! weights, plus a few analytic spaces known only through their spectra.

mod action;
mod laplacian;
mod sectors;

pub use action::{validate_action, ActionReport, GroupAction, ACTION_PRESETS};
pub use laplacian::{build_laplacian, generalized_laplacian, LocusOperator};
pub use sectors::{fixed_locus, sector_chart, ClassProduct, FixedLocus, Sector, SectorChart};

use std::collections::{BTreeMap, HashSet};
use std::f64::consts::PI;

use thiserror::Error;

use crate::group::GroupError;
use crate::scalar::Real;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpaceError {
    #[error("invalid space: {0}")]
    InvalidSpace(String),
    #[error("point {point} out of range for a space of {count} points")]
    PointOutOfRange { point: usize, count: usize },
    #[error("action has {perms} permutations but the group has order {order}")]
    OrderMismatch { perms: usize, order: usize },
    #[error("invalid action: {0}")]
    InvalidAction(String),
    #[error("unknown action preset `{0}`")]
    UnknownPreset(String),
    #[error("action preset `{preset}` does not apply: {reason}")]
    PresetMismatch { preset: String, reason: String },
    #[error("space `{0}` is known only through its spectrum and has no points")]
    SpectralOnly(String),
    #[error("fixed loci violate X^g ∩ X^h ⊆ X^(gh) for elements {g}, {h} at point {point}")]
    InclusionViolated { g: usize, h: usize, point: usize },
    #[error(transparent)]
    Group(#[from] GroupError),
}

/// Which canonical construction, if any, produced a space.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpaceKind {
    /// Explicit points and edges.
    Graph,
    /// Cycle graph on `n` unit-weight points.
    Circle { n: usize },
    /// Periodic `n×n` grid; point `(x, y)` has id `x·n + y`.
    Torus { n: usize },
    /// Unit round sphere: levels `l(l+1)` with multiplicity `2l+1`, `l ≤ l_max`.
    Sphere { l_max: usize },
    /// Flat torus `(ℝ/2πℤ)²`: levels `j² + k²` over lattice points with `j² + k² ≤ k_max²`.
    FlatTorus { k_max: usize },
}

impl SpaceKind {
    pub fn name(&self) -> &'static str {
        match self {
            SpaceKind::Graph => "graph",
            SpaceKind::Circle { .. } => "circle",
            SpaceKind::Torus { .. } => "torus",
            SpaceKind::Sphere { .. } => "sphere",
            SpaceKind::FlatTorus { .. } => "flat_torus",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Edge<T> {
    pub a: usize,
    pub b: usize,
    pub weight: T,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteSpace<T> {
    kind: SpaceKind,
    weights: Vec<T>,
    edges: Vec<Edge<T>>,
}

impl<T: Real> DiscreteSpace<T> {
    /// Explicit weighted graph. Edges are stored with `a < b`.
    pub fn from_graph(weights: Vec<T>, edges: Vec<(usize, usize, T)>) -> Result<Self, SpaceError> {
        let n = weights.len();
        if let Some((i, w)) = weights
            .iter()
            .enumerate()
            .find(|(_, w)| !(w.is_finite() && **w > T::zero()))
        {
            return Err(SpaceError::InvalidSpace(format!(
                "point {i} has non-positive weight {w}"
            )));
        }
        let mut seen = HashSet::new();
        let mut out = Vec::with_capacity(edges.len());
        for (a, b, w) in edges {
            for p in [a, b] {
                if p >= n {
                    return Err(SpaceError::PointOutOfRange { point: p, count: n });
                }
            }
            if a == b {
                return Err(SpaceError::InvalidSpace(format!("self-loop at point {a}")));
            }
            if !(w.is_finite() && w > T::zero()) {
                return Err(SpaceError::InvalidSpace(format!(
                    "edge ({a}, {b}) has non-positive weight {w}"
                )));
            }
            let (a, b) = (a.min(b), a.max(b));
            if !seen.insert((a, b)) {
                return Err(SpaceError::InvalidSpace(format!("duplicate edge ({a}, {b})")));
            }
            out.push(Edge { a, b, weight: w });
        }
        Ok(Self {
            kind: SpaceKind::Graph,
            weights,
            edges: out,
        })
    }

    pub fn circle(n: usize) -> Result<Self, SpaceError> {
        if n < 3 {
            return Err(SpaceError::InvalidSpace(format!(
                "circle needs at least 3 points, got {n}"
            )));
        }
        let edges = (0..n).map(|i| (i, (i + 1) % n, T::one())).collect();
        let mut s = Self::from_graph(vec![T::one(); n], edges)?;
        s.kind = SpaceKind::Circle { n };
        Ok(s)
    }

    pub fn torus(n: usize) -> Result<Self, SpaceError> {
        if n < 3 {
            return Err(SpaceError::InvalidSpace(format!(
                "torus needs at least 3 points per side, got {n}"
            )));
        }
        let id = |x: usize, y: usize| (x % n) * n + (y % n);
        let mut edges = Vec::with_capacity(2 * n * n);
        for x in 0..n {
            for y in 0..n {
                edges.push((id(x, y), id(x + 1, y), T::one()));
                edges.push((id(x, y), id(x, y + 1), T::one()));
            }
        }
        let mut s = Self::from_graph(vec![T::one(); n * n], edges)?;
        s.kind = SpaceKind::Torus { n };
        Ok(s)
    }

    pub fn sphere(l_max: usize) -> Self {
        Self {
            kind: SpaceKind::Sphere { l_max },
            weights: Vec::new(),
            edges: Vec::new(),
        }
    }

    pub fn flat_torus(k_max: usize) -> Self {
        Self {
            kind: SpaceKind::FlatTorus { k_max },
            weights: Vec::new(),
            edges: Vec::new(),
        }
    }

    pub fn kind(&self) -> SpaceKind {
        self.kind
    }

    pub fn point_count(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn edges(&self) -> &[Edge<T>] {
        &self.edges
    }

    /// True for analytic spaces that carry a spectrum but no points.
    pub fn is_spectral_only(&self) -> bool {
        matches!(
            self.kind,
            SpaceKind::Sphere { .. } | SpaceKind::FlatTorus { .. }
        )
    }

    /// Manifold dimension the space discretizes, when it has one.
    pub fn dimension(&self) -> Option<usize> {
        match self.kind {
            SpaceKind::Graph => None,
            SpaceKind::Circle { .. } => Some(1),
            SpaceKind::Torus { .. } | SpaceKind::Sphere { .. } | SpaceKind::FlatTorus { .. } => {
                Some(2)
            }
        }
    }

    /// Closed-form spectrum as ascending `(eigenvalue, multiplicity)` pairs.
    ///
    /// Graph-backed tags (circle, torus) list every mode with multiplicity one;
    /// spectrum-only tags list distinct levels.
    pub fn closed_form_spectrum(&self) -> Option<Vec<(T, usize)>> {
        match self.kind {
            SpaceKind::Graph => None,
            SpaceKind::Circle { n } => {
                let mut vals: Vec<f64> = (0..n)
                    .map(|j| 2.0 - 2.0 * (2.0 * PI * j as f64 / n as f64).cos())
                    .collect();
                vals.sort_by(f64::total_cmp);
                Some(vals.into_iter().map(|v| (T::lit(v), 1)).collect())
            }
            SpaceKind::Torus { n } => {
                let c: Vec<f64> = (0..n)
                    .map(|j| 2.0 - 2.0 * (2.0 * PI * j as f64 / n as f64).cos())
                    .collect();
                let mut vals: Vec<f64> = c
                    .iter()
                    .flat_map(|a| c.iter().map(move |b| a + b))
                    .collect();
                vals.sort_by(f64::total_cmp);
                Some(vals.into_iter().map(|v| (T::lit(v), 1)).collect())
            }
            SpaceKind::Sphere { l_max } => Some(
                (0..=l_max)
                    .map(|l| (T::from_usize_lossy(l * (l + 1)), 2 * l + 1))
                    .collect(),
            ),
            SpaceKind::FlatTorus { k_max } => {
                let k = k_max as i64;
                let r2 = k * k;
                let mut counts: BTreeMap<i64, usize> = BTreeMap::new();
                for j in -k..=k {
                    for l in -k..=k {
                        let r = j * j + l * l;
                        if r <= r2 {
                            *counts.entry(r).or_default() += 1;
                        }
                    }
                }
                Some(
                    counts
                        .into_iter()
                        .map(|(r, m)| (T::lit(r as f64), m))
                        .collect(),
                )
            }
        }
    }

    /// Total quadrature weight for graphs, Riemannian area for analytic surfaces.
    pub fn volume(&self) -> T {
        match self.kind {
            SpaceKind::Sphere { .. } => T::lit(4.0 * PI),
            SpaceKind::FlatTorus { .. } => T::lit(4.0 * PI * PI),
            _ => self.weights.iter().copied().sum(),
        }
    }

    pub(crate) fn require_points(&self) -> Result<(), SpaceError> {
        if self.is_spectral_only() {
            Err(SpaceError::SpectralOnly(self.kind.name().to_string()))
        } else {
            Ok(())
        }
    }
}

use super::{DiscreteSpace, FixedLocus, SectorChart, SpaceError};
use crate::linalg::Matrix;
use crate::scalar::Real;

/// Generalized pair `(L, W)`: graph stiffness matrix and diagonal quadrature
/// weights. The operator `W⁻¹L` is self-adjoint in the `W`-weighted pairing.
#[derive(Clone, Debug, PartialEq)]
pub struct LocusOperator<T> {
    pub stiffness: Matrix<T>,
    pub weights: Vec<T>,
}

impl<T: Real> LocusOperator<T> {
    pub fn new(stiffness: Matrix<T>, weights: Vec<T>) -> Self {
        Self { stiffness, weights }
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    /// `W⁻¹ L x`
    pub fn apply<E>(&self, x: &[E]) -> Vec<E>
    where
        E: Copy + num_traits::Num + std::ops::Mul<T, Output = E>,
    {
        let n = self.dim();
        (0..n)
            .map(|i| {
                let acc = (0..n).fold(E::zero(), |acc, j| acc + x[j] * self.stiffness[(i, j)]);
                acc * (T::one() / self.weights[i])
            })
            .collect()
    }
}

/// Stiffness matrix (`degree − adjacency`) of the subgraph induced on the
/// locus, together with the locus weights. Empty loci give the 0×0 operator.
pub fn build_laplacian<T: Real>(
    space: &DiscreteSpace<T>,
    locus: &FixedLocus<T>,
) -> Result<LocusOperator<T>, SpaceError> {
    space.require_points()?;
    let n = space.point_count();
    let mut position = vec![usize::MAX; n];
    for (i, &p) in locus.points.iter().enumerate() {
        if p >= n {
            return Err(SpaceError::PointOutOfRange { point: p, count: n });
        }
        position[p] = i;
    }
    let m = locus.points.len();
    let mut l = Matrix::zeros(m, m);
    for e in space.edges() {
        let (i, j) = (position[e.a], position[e.b]);
        if i == usize::MAX || j == usize::MAX {
            continue;
        }
        l[(i, j)] -= e.weight;
        l[(j, i)] -= e.weight;
        l[(i, i)] += e.weight;
        l[(j, j)] += e.weight;
    }
    let weights = locus.points.iter().map(|&p| space.weights()[p]).collect();
    Ok(LocusOperator::new(l, weights))
}

/// Block-diagonal generalized Laplacian: one locus operator per sector.
pub fn generalized_laplacian<T: Real>(
    space: &DiscreteSpace<T>,
    chart: &SectorChart<T>,
) -> Result<Vec<LocusOperator<T>>, SpaceError> {
    chart
        .sectors()
        .iter()
        .map(|s| build_laplacian(space, &s.locus))
        .collect()
}

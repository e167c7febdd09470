use super::{DiscreteSpace, GroupAction, SpaceError};
use crate::group::{ConjugacyData, FiniteGroupTable};
use crate::scalar::Real;

/// Points fixed by one group element, in ambient order.
#[derive(Clone, Debug, PartialEq)]
pub struct FixedLocus<T> {
    pub element: usize,
    pub points: Vec<usize>,
    pub weights: Vec<T>,
}

impl<T: Real> FixedLocus<T> {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn total_weight(&self) -> T {
        self.weights.iter().copied().sum()
    }

    /// Position of an ambient point inside this locus.
    pub fn position(&self, point: usize) -> Option<usize> {
        self.points.binary_search(&point).ok()
    }
}

pub fn fixed_locus<T: Real>(
    space: &DiscreteSpace<T>,
    action: &GroupAction,
    g: usize,
) -> Result<FixedLocus<T>, SpaceError> {
    space.require_points()?;
    if g >= action.len() {
        return Err(SpaceError::InvalidAction(format!(
            "element {g} outside an action of {} elements",
            action.len()
        )));
    }
    let perm = action.perm(g);
    if perm.len() != space.point_count() {
        return Err(SpaceError::InvalidAction(format!(
            "permutation of element {g} has length {}, space has {} points",
            perm.len(),
            space.point_count()
        )));
    }
    let points: Vec<usize> = (0..perm.len()).filter(|&p| perm[p] == p).collect();
    let weights = points.iter().map(|&p| space.weights()[p]).collect();
    Ok(FixedLocus {
        element: g,
        points,
        weights,
    })
}

/// One twisted (or the untwisted) sector: a conjugacy class with the fixed
/// locus of its representative.
#[derive(Clone, Debug, PartialEq)]
pub struct Sector<T> {
    pub representative: usize,
    pub members: Vec<usize>,
    pub centralizer: Vec<usize>,
    pub locus: FixedLocus<T>,
}

/// How the class product `[g]·[h]` lands in the chart.
///
/// `rep(g)·rep(h)` lies in class `class`; `conjugator` is the smallest `c`
/// with `c·(rep(g)·rep(h))·c⁻¹ = rep(class)`, and `c` carries the fixed set of
/// the product onto the fixed set of the representative.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ClassProduct {
    pub class: usize,
    pub product: usize,
    pub conjugator: usize,
}

/// Per-class fixed loci and their pairwise intersection data.
#[derive(Clone, Debug, PartialEq)]
pub struct SectorChart<T> {
    sectors: Vec<Sector<T>>,
    products: Vec<Vec<ClassProduct>>,
    intersections: Vec<Vec<Vec<usize>>>,
    /// fusion[i][j]: (position in locus i, position in locus j, position in
    /// the product class locus) for every point of X^{rep i} ∩ X^{rep j}.
    fusion: Vec<Vec<Vec<(usize, usize, usize)>>>,
    abelian: bool,
    point_count: usize,
    conjugacy: ConjugacyData,
    identity_class: usize,
}

impl<T: Real> SectorChart<T> {
    pub fn sectors(&self) -> &[Sector<T>] {
        &self.sectors
    }

    pub fn len(&self) -> usize {
        self.sectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sectors.is_empty()
    }

    pub fn locus_sizes(&self) -> Vec<usize> {
        self.sectors.iter().map(|s| s.locus.len()).collect()
    }

    pub fn product(&self, i: usize, j: usize) -> ClassProduct {
        self.products[i][j]
    }

    /// Ambient points of `X^{rep i} ∩ X^{rep j}`.
    pub fn intersection(&self, i: usize, j: usize) -> &[usize] {
        &self.intersections[i][j]
    }

    pub fn fusion_map(&self, i: usize, j: usize) -> &[(usize, usize, usize)] {
        &self.fusion[i][j]
    }

    /// Class products depend on the chosen representatives unless the group
    /// is abelian.
    pub fn is_abelian(&self) -> bool {
        self.abelian
    }

    pub fn point_count(&self) -> usize {
        self.point_count
    }

    pub fn conjugacy(&self) -> &ConjugacyData {
        &self.conjugacy
    }

    /// Index of the untwisted sector `[1]`.
    pub fn identity_class(&self) -> usize {
        self.identity_class
    }

    pub fn class_of_element(&self, g: usize) -> usize {
        self.conjugacy.class_of(g)
    }

    pub fn min_weight(&self) -> Option<T> {
        self.sectors
            .iter()
            .flat_map(|s| s.locus.weights.iter().copied())
            .reduce(T::min)
    }
}

pub fn sector_chart<T: Real>(
    space: &DiscreteSpace<T>,
    action: &GroupAction,
    group: &FiniteGroupTable,
) -> Result<SectorChart<T>, SpaceError> {
    space.require_points()?;
    if action.len() != group.order() {
        return Err(SpaceError::OrderMismatch {
            perms: action.len(),
            order: group.order(),
        });
    }
    let order = group.order();
    let loci: Vec<FixedLocus<T>> = (0..order)
        .map(|g| fixed_locus(space, action, g))
        .collect::<Result<_, _>>()?;

    for g in 0..order {
        for h in 0..order {
            let gh = group.mul(g, h);
            for &p in &loci[g].points {
                if loci[h].position(p).is_some() && loci[gh].position(p).is_none() {
                    return Err(SpaceError::InclusionViolated { g, h, point: p });
                }
            }
        }
    }

    let conjugacy = group.conjugacy_classes();
    let sectors: Vec<Sector<T>> = (0..conjugacy.len())
        .map(|c| Sector {
            representative: conjugacy.representatives[c],
            members: conjugacy.classes[c].clone(),
            centralizer: conjugacy.centralizers[c].clone(),
            locus: loci[conjugacy.representatives[c]].clone(),
        })
        .collect();

    let k = sectors.len();
    let mut products = vec![Vec::with_capacity(k); k];
    let mut intersections = vec![Vec::with_capacity(k); k];
    let mut fusion = vec![Vec::with_capacity(k); k];
    for i in 0..k {
        for j in 0..k {
            let (ri, rj) = (sectors[i].representative, sectors[j].representative);
            let product = group.mul(ri, rj);
            let class = conjugacy.class_of(product);
            let target = conjugacy.representatives[class];
            let conjugator = (0..order)
                .find(|&c| group.conjugate(product, c) == target)
                .expect("product is conjugate to its class representative");
            products[i].push(ClassProduct {
                class,
                product,
                conjugator,
            });

            let shared: Vec<usize> = sectors[i]
                .locus
                .points
                .iter()
                .copied()
                .filter(|&p| sectors[j].locus.position(p).is_some())
                .collect();
            let transport = action.perm(conjugator);
            let map = shared
                .iter()
                .map(|&p| {
                    let q = transport[p];
                    let pk = sectors[class]
                        .locus
                        .position(q)
                        .expect("conjugator maps X^(gh) onto the representative locus");
                    (
                        sectors[i].locus.position(p).unwrap(),
                        sectors[j].locus.position(p).unwrap(),
                        pk,
                    )
                })
                .collect();
            intersections[i].push(shared);
            fusion[i].push(map);
        }
    }

    let identity_class = conjugacy.class_of(group.identity());
    Ok(SectorChart {
        sectors,
        products,
        intersections,
        fusion,
        abelian: group.is_abelian(),
        point_count: space.point_count(),
        conjugacy,
        identity_class,
    })
}

//! μ_m-valued 2-cocycles, stored additively as residues mod m.

use std::collections::BTreeSet;

use super::{FiniteGroupTable, GroupError};

/// Largest raw search space (`m^((|G|-1)²)` normalized tables, or the
/// matching cochain count) that [`h2_brute_force`] agrees to enumerate.
pub const H2_SEARCH_BOUND: u128 = 1 << 32;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct TwoCocycle {
    modulus: u32,
    order: usize,
    values: Vec<u32>,
}

impl TwoCocycle {
    pub fn new(modulus: u32, order: usize, values: Vec<u32>) -> Result<Self, GroupError> {
        if modulus == 0 {
            return Err(GroupError::InvalidModulus(0));
        }
        if values.len() != order * order {
            return Err(GroupError::CocycleShape {
                order,
                expected: order * order,
                got: values.len(),
            });
        }
        let values = values.into_iter().map(|v| v % modulus).collect();
        Ok(Self {
            modulus,
            order,
            values,
        })
    }

    pub fn zero(modulus: u32, order: usize) -> Result<Self, GroupError> {
        Self::new(modulus, order, vec![0; order * order])
    }

    pub fn from_fn(
        modulus: u32,
        order: usize,
        f: impl Fn(usize, usize) -> u32,
    ) -> Result<Self, GroupError> {
        let values = (0..order * order).map(|i| f(i / order, i % order)).collect();
        Self::new(modulus, order, values)
    }

    /// Coboundary `δβ(g,h) = β(g) + β(h) − β(g·h)`.
    pub fn coboundary(
        group: &FiniteGroupTable,
        modulus: u32,
        beta: &[u32],
    ) -> Result<Self, GroupError> {
        if modulus == 0 {
            return Err(GroupError::InvalidModulus(0));
        }
        let n = group.order();
        let m = u64::from(modulus);
        Self::from_fn(modulus, n, |g, h| {
            let b = |x: usize| u64::from(beta[x]) % m;
            ((b(g) + b(h) + m - b(group.mul(g, h))) % m) as u32
        })
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn get(&self, g: usize, h: usize) -> u32 {
        self.values[g * self.order + h]
    }

    pub fn values(&self) -> &[u32] {
        &self.values
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CocycleReport {
    pub passed: bool,
    /// First `(g, h, k)` in lexicographic order breaking the cocycle identity.
    pub first_violation: Option<(usize, usize, usize)>,
}

/// Check `α(g,h) + α(gh,k) ≡ α(g,hk) + α(h,k) (mod m)` over all triples.
pub fn validate_cocycle(
    group: &FiniteGroupTable,
    alpha: &TwoCocycle,
) -> Result<CocycleReport, GroupError> {
    if alpha.modulus == 0 {
        return Err(GroupError::InvalidModulus(0));
    }
    let n = group.order();
    if alpha.order != n {
        return Err(GroupError::CocycleShape {
            order: n,
            expected: n * n,
            got: alpha.values.len(),
        });
    }
    let m = u64::from(alpha.modulus);
    let a = |g: usize, h: usize| u64::from(alpha.get(g, h));
    for g in 0..n {
        for h in 0..n {
            for k in 0..n {
                let lhs = (a(g, h) + a(group.mul(g, h), k)) % m;
                let rhs = (a(g, group.mul(h, k)) + a(h, k)) % m;
                if lhs != rhs {
                    return Ok(CocycleReport {
                        passed: false,
                        first_violation: Some((g, h, k)),
                    });
                }
            }
        }
    }
    Ok(CocycleReport {
        passed: true,
        first_violation: None,
    })
}

/// Result of enumerating normalized μ_m-valued 2-cocycles.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CohomologySummary {
    pub modulus: u32,
    /// Normalized cocycles (`α(1,g) = α(g,1) = 0`).
    pub cocycle_count: usize,
    /// Distinct normalized coboundaries.
    pub coboundary_count: usize,
    /// `|H²(G, ℤ/m)|`.
    pub class_count: usize,
    /// Lexicographically smallest member of each class, sorted; the zero
    /// cocycle comes first.
    pub representatives: Vec<TwoCocycle>,
    /// Order of the image of `H²(G, μ_m) → H²(G, U(1))`, when the cochain
    /// search needed to decide it fits under [`H2_SEARCH_BOUND`].
    pub u1_image_order: Option<usize>,
}

impl CohomologySummary {
    /// True when some cocycle is not a coboundary.
    pub fn has_nontrivial_class(&self) -> bool {
        self.class_count > 1
    }
}

fn checked_power(base: u128, exp: usize) -> Option<u128> {
    let mut acc: u128 = 1;
    for _ in 0..exp {
        acc = acc.checked_mul(base)?;
    }
    Some(acc)
}

/// Visit every vector in `(ℤ/modulus)^len`, first coordinate fastest.
fn for_each_cochain(len: usize, modulus: u32, mut visit: impl FnMut(&[u32])) {
    let mut digits = vec![0u32; len];
    loop {
        visit(&digits);
        let mut i = 0;
        loop {
            if i == len {
                return;
            }
            digits[i] += 1;
            if digits[i] < modulus {
                break;
            }
            digits[i] = 0;
            i += 1;
        }
    }
}

fn full_beta(group: &FiniteGroupTable, free: &[u32]) -> Vec<u32> {
    let e = group.identity();
    let mut it = free.iter();
    (0..group.order())
        .map(|g| if g == e { 0 } else { *it.next().unwrap() })
        .collect()
}

/// Exhaustively compute `H²(G, ℤ/m)` for tiny groups by depth-first
/// enumeration of normalized tables, pruning each partial table as soon as a
/// cocycle triple is fully assigned.
pub fn h2_brute_force(group: &FiniteGroupTable, m: u32) -> Result<CohomologySummary, GroupError> {
    if m == 0 {
        return Err(GroupError::InvalidModulus(0));
    }
    let n = group.order();
    let e = group.identity();
    let free_cells: Vec<(usize, usize)> = (0..n)
        .flat_map(|g| (0..n).map(move |h| (g, h)))
        .filter(|&(g, h)| g != e && h != e)
        .collect();
    let size = checked_power(u128::from(m), free_cells.len()).unwrap_or(u128::MAX);
    if size > H2_SEARCH_BOUND {
        return Err(GroupError::SearchSpaceTooLarge {
            size,
            bound: H2_SEARCH_BOUND,
        });
    }

    let mut position = vec![usize::MAX; n * n];
    for (pos, &(g, h)) in free_cells.iter().enumerate() {
        position[g * n + h] = pos;
    }
    // checks[pos]: triples whose last free cell (in fill order) is `pos`.
    let mut checks: Vec<Vec<[usize; 4]>> = vec![Vec::new(); free_cells.len()];
    for g in 0..n {
        for h in 0..n {
            for k in 0..n {
                let cells = [
                    g * n + h,
                    group.mul(g, h) * n + k,
                    g * n + group.mul(h, k),
                    h * n + k,
                ];
                let last = cells
                    .iter()
                    .map(|&c| position[c])
                    .filter(|&p| p != usize::MAX)
                    .max();
                if let Some(p) = last {
                    checks[p].push(cells);
                }
            }
        }
    }

    let mut cocycles: Vec<Vec<u32>> = Vec::new();
    let mut values = vec![0u32; n * n];
    fill(
        0,
        m,
        &free_cells,
        &checks,
        n,
        &mut values,
        &mut cocycles,
    );

    let mut coboundaries: BTreeSet<Vec<u32>> = BTreeSet::new();
    for_each_cochain(n - 1, m, |free| {
        let beta = full_beta(group, free);
        let cb = TwoCocycle::coboundary(group, m, &beta).expect("valid modulus");
        coboundaries.insert(cb.values);
    });
    let coboundaries: Vec<Vec<u32>> = coboundaries.into_iter().collect();

    let mut canon: BTreeSet<Vec<u32>> = BTreeSet::new();
    for alpha in &cocycles {
        let best = coboundaries
            .iter()
            .map(|b| {
                alpha
                    .iter()
                    .zip(b)
                    .map(|(&x, &y)| (x + y) % m)
                    .collect::<Vec<u32>>()
            })
            .min()
            .expect("zero coboundary always present");
        canon.insert(best);
    }
    debug_assert_eq!(canon.len() * coboundaries.len(), cocycles.len());

    let representatives: Vec<TwoCocycle> = canon
        .into_iter()
        .map(|values| TwoCocycle {
            modulus: m,
            order: n,
            values,
        })
        .collect();

    let u1_image_order = u1_trivial_set(group, m).map(|trivial| {
        let kernel = representatives
            .iter()
            .filter(|r| trivial.contains(&r.values))
            .count();
        representatives.len() / kernel.max(1)
    });

    Ok(CohomologySummary {
        modulus: m,
        cocycle_count: cocycles.len(),
        coboundary_count: coboundaries.len(),
        class_count: representatives.len(),
        representatives,
        u1_image_order,
    })
}

fn fill(
    pos: usize,
    m: u32,
    free_cells: &[(usize, usize)],
    checks: &[Vec<[usize; 4]>],
    n: usize,
    values: &mut [u32],
    out: &mut Vec<Vec<u32>>,
) {
    if pos == free_cells.len() {
        out.push(values.to_vec());
        return;
    }
    let (g, h) = free_cells[pos];
    for v in 0..m {
        values[g * n + h] = v;
        let ok = checks[pos].iter().all(|c| {
            (values[c[0]] + values[c[1]]) % m == (values[c[2]] + values[c[3]]) % m
        });
        if ok {
            fill(pos + 1, m, free_cells, checks, n, values, out);
        }
    }
    values[g * n + h] = 0;
}

/// Normalized μ_m tables that become coboundaries in U(1). If α/m = δβ then
/// m·β is a homomorphism to ℝ/ℤ, so β can be taken in μ_{m·|G|}.
fn u1_trivial_set(group: &FiniteGroupTable, m: u32) -> Option<BTreeSet<Vec<u32>>> {
    let n = group.order();
    let big = m.checked_mul(u32::try_from(n).ok()?)?;
    let size = checked_power(u128::from(big), n - 1)?;
    if size > H2_SEARCH_BOUND {
        return None;
    }
    let step = n as u32;
    let mut set = BTreeSet::new();
    for_each_cochain(n - 1, big, |free| {
        let beta = full_beta(group, free);
        let cb = TwoCocycle::coboundary(group, big, &beta).expect("valid modulus");
        if cb.values.iter().all(|v| v % step == 0) {
            set.insert(cb.values.iter().map(|v| v / step).collect());
        }
    });
    Some(set)
}

//! Finite groups given by Cayley tables.
//!
//! Elements are dense indices `0..order`. Everything downstream (sectors,
//! fusion, cocycles) works on these indices directly.

mod age;
mod cohomology;

pub use age::{age, rotation_angles};
pub use cohomology::{
    h2_brute_force, validate_cocycle, CocycleReport, CohomologySummary, TwoCocycle,
    H2_SEARCH_BOUND,
};

use std::fmt;

use thiserror::Error;

/// Group axiom that a candidate table violates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axiom {
    Shape,
    LatinSquare,
    Identity,
    Inverse,
    Associativity,
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Axiom::Shape => "shape",
            Axiom::LatinSquare => "latin square",
            Axiom::Identity => "identity",
            Axiom::Inverse => "inverse",
            Axiom::Associativity => "associativity",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GroupError {
    #[error("not a group ({axiom}): {detail}")]
    NotAGroup { axiom: Axiom, detail: String },
    #[error("unknown group preset `{0}`")]
    UnknownPreset(String),
    #[error("invalid cocycle modulus {0}; must be positive")]
    InvalidModulus(u32),
    #[error("cocycle table has {got} entries, group order {order} needs {expected}")]
    CocycleShape {
        order: usize,
        expected: usize,
        got: usize,
    },
    #[error("cohomology search space {size} exceeds the bound {bound}")]
    SearchSpaceTooLarge { size: u128, bound: u128 },
    #[error("rotation angle {0} outside [0, 1)")]
    AngleOutOfRange(String),
    #[error("element index {index} out of range for group of order {order}")]
    ElementOutOfRange { index: usize, order: usize },
}

/// Group names understood by [`FiniteGroupTable::preset`].
pub const GROUP_PRESETS: [&str; 6] = ["trivial", "Z2", "Z3", "Z4", "Z2xZ2", "S3"];

/// A finite group as a validated multiplication table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGroupTable {
    order: usize,
    table: Vec<usize>,
    identity: usize,
    inverse: Vec<usize>,
}

impl FiniteGroupTable {
    /// Validate a row-major table (`rows[g][h] = g·h`), reporting the first
    /// violated axiom.
    pub fn from_rows(rows: &[Vec<usize>]) -> Result<Self, GroupError> {
        let order = rows.len();
        if order == 0 {
            return Err(not_a_group(Axiom::Shape, "empty table"));
        }
        if let Some((g, row)) = rows.iter().enumerate().find(|(_, r)| r.len() != order) {
            return Err(not_a_group(
                Axiom::Shape,
                format!("row {g} has {} entries, expected {order}", row.len()),
            ));
        }
        let table: Vec<usize> = rows.iter().flatten().copied().collect();
        Self::from_flat(order, table)
    }

    pub fn from_flat(order: usize, table: Vec<usize>) -> Result<Self, GroupError> {
        if order == 0 || table.len() != order * order {
            return Err(not_a_group(
                Axiom::Shape,
                format!("{} entries for order {order}", table.len()),
            ));
        }
        for g in 0..order {
            let mut row_seen = vec![false; order];
            let mut col_seen = vec![false; order];
            for h in 0..order {
                let r = table[g * order + h];
                let c = table[h * order + g];
                if r >= order || c >= order {
                    return Err(not_a_group(
                        Axiom::LatinSquare,
                        format!("entry out of range near ({g}, {h})"),
                    ));
                }
                if row_seen[r] {
                    return Err(not_a_group(
                        Axiom::LatinSquare,
                        format!("row {g} repeats element {r}"),
                    ));
                }
                if col_seen[c] {
                    return Err(not_a_group(
                        Axiom::LatinSquare,
                        format!("column {g} repeats element {c}"),
                    ));
                }
                row_seen[r] = true;
                col_seen[c] = true;
            }
        }

        let mul = |g: usize, h: usize| table[g * order + h];
        let identity = (0..order)
            .find(|&e| (0..order).all(|g| mul(e, g) == g && mul(g, e) == g))
            .ok_or_else(|| not_a_group(Axiom::Identity, "no two-sided identity"))?;

        let mut inverse = Vec::with_capacity(order);
        for g in 0..order {
            let inv = (0..order)
                .find(|&h| mul(g, h) == identity && mul(h, g) == identity)
                .ok_or_else(|| not_a_group(Axiom::Inverse, format!("element {g} has no inverse")))?;
            inverse.push(inv);
        }

        for g in 0..order {
            for h in 0..order {
                for k in 0..order {
                    if mul(mul(g, h), k) != mul(g, mul(h, k)) {
                        return Err(not_a_group(
                            Axiom::Associativity,
                            format!("({g}·{h})·{k} != {g}·({h}·{k})"),
                        ));
                    }
                }
            }
        }

        Ok(Self {
            order,
            table,
            identity,
            inverse,
        })
    }

    pub fn trivial() -> Self {
        Self::cyclic(1)
    }

    /// ℤ_n with element `k` standing for the residue `k`.
    pub fn cyclic(n: usize) -> Self {
        assert!(n > 0, "cyclic group needs positive order");
        let table = (0..n * n).map(|i| (i / n + i % n) % n).collect();
        Self::from_flat(n, table).expect("cyclic table is a group")
    }

    /// ℤ₂×ℤ₂ with element `i` standing for the bit pair `(i & 1, i >> 1)`.
    pub fn klein_four() -> Self {
        let table = (0..16).map(|i| (i / 4) ^ (i % 4)).collect();
        Self::from_flat(4, table).expect("Klein table is a group")
    }

    /// S₃ with elements the permutations of {0,1,2} in lexicographic order
    /// and product `(σ·τ)(x) = σ(τ(x))`.
    pub fn symmetric3() -> Self {
        let perms = s3_permutations();
        let index = |p: [usize; 3]| perms.iter().position(|q| *q == p).unwrap();
        let mut table = Vec::with_capacity(36);
        for s in &perms {
            for t in &perms {
                table.push(index([s[t[0]], s[t[1]], s[t[2]]]));
            }
        }
        Self::from_flat(6, table).expect("S3 table is a group")
    }

    pub fn preset(name: &str) -> Result<Self, GroupError> {
        match name {
            "trivial" => Ok(Self::trivial()),
            "Z2" => Ok(Self::cyclic(2)),
            "Z3" => Ok(Self::cyclic(3)),
            "Z4" => Ok(Self::cyclic(4)),
            "Z2xZ2" => Ok(Self::klein_four()),
            "S3" => Ok(Self::symmetric3()),
            other => Err(GroupError::UnknownPreset(other.to_string())),
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    #[inline]
    pub fn mul(&self, g: usize, h: usize) -> usize {
        self.table[g * self.order + h]
    }

    pub fn inverse(&self, g: usize) -> usize {
        self.inverse[g]
    }

    /// `c·g·c⁻¹`
    pub fn conjugate(&self, g: usize, c: usize) -> usize {
        self.mul(self.mul(c, g), self.inverse[c])
    }

    pub fn rows(&self) -> Vec<Vec<usize>> {
        self.table.chunks(self.order).map(<[usize]>::to_vec).collect()
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order).all(|g| (0..self.order).all(|h| self.mul(g, h) == self.mul(h, g)))
    }

    pub fn check_element(&self, g: usize) -> Result<(), GroupError> {
        if g < self.order {
            Ok(())
        } else {
            Err(GroupError::ElementOutOfRange {
                index: g,
                order: self.order,
            })
        }
    }

    pub fn conjugacy_classes(&self) -> ConjugacyData {
        ConjugacyData::new(self)
    }
}

/// Lexicographic list of the six permutations of {0,1,2}; the S₃ preset's
/// element order.
pub fn s3_permutations() -> [[usize; 3]; 6] {
    [
        [0, 1, 2],
        [0, 2, 1],
        [1, 0, 2],
        [1, 2, 0],
        [2, 0, 1],
        [2, 1, 0],
    ]
}

fn not_a_group(axiom: Axiom, detail: impl Into<String>) -> GroupError {
    GroupError::NotAGroup {
        axiom,
        detail: detail.into(),
    }
}

/// Conjugacy classes with minimal-index representatives, sorted by
/// representative, and the centralizer of each representative.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConjugacyData {
    pub classes: Vec<Vec<usize>>,
    pub representatives: Vec<usize>,
    pub centralizers: Vec<Vec<usize>>,
    class_of: Vec<usize>,
}

impl ConjugacyData {
    fn new(group: &FiniteGroupTable) -> Self {
        let n = group.order();
        let mut class_of = vec![usize::MAX; n];
        let mut classes = Vec::new();
        // Scanning in index order makes the first unseen element the minimum
        // of its class, so classes come out sorted by representative.
        for g in 0..n {
            if class_of[g] != usize::MAX {
                continue;
            }
            let mut members: Vec<usize> = (0..n).map(|c| group.conjugate(g, c)).collect();
            members.sort_unstable();
            members.dedup();
            for &m in &members {
                class_of[m] = classes.len();
            }
            classes.push(members);
        }
        let representatives: Vec<usize> = classes.iter().map(|c| c[0]).collect();
        let centralizers = representatives
            .iter()
            .map(|&r| {
                (0..n)
                    .filter(|&h| group.mul(h, r) == group.mul(r, h))
                    .collect()
            })
            .collect();
        Self {
            classes,
            representatives,
            centralizers,
            class_of,
        }
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    /// Index of the class containing element `g`.
    pub fn class_of(&self, g: usize) -> usize {
        self.class_of[g]
    }
}

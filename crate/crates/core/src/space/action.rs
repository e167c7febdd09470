use std::collections::HashMap;

use super::{DiscreteSpace, SpaceError, SpaceKind};
use crate::group::{s3_permutations, FiniteGroupTable};
use crate::scalar::Real;

/// Action presets understood by [`GroupAction::preset`].
pub const ACTION_PRESETS: [&str; 8] = [
    "identity",
    "circle_reflection",
    "circle_rotation",
    "torus_negation",
    "torus_quarter_turn",
    "torus_axis_flips",
    "torus_negation_swap",
    "s3_triangle",
];

/// A group acting on the points of a space: `perms[g][p]` is `g·p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupAction {
    perms: Vec<Vec<usize>>,
}

impl GroupAction {
    /// Wraps raw permutations; run [`validate_action`] before trusting them.
    pub fn new(perms: Vec<Vec<usize>>) -> Self {
        Self { perms }
    }

    pub fn identity(order: usize, points: usize) -> Self {
        Self::new(vec![(0..points).collect(); order])
    }

    pub fn perms(&self) -> &[Vec<usize>] {
        &self.perms
    }

    pub fn perm(&self, g: usize) -> &[usize] {
        &self.perms[g]
    }

    pub fn len(&self) -> usize {
        self.perms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perms.is_empty()
    }

    /// Named action, tied to the element encoding of the matching group preset.
    pub fn preset<T: Real>(
        name: &str,
        space: &DiscreteSpace<T>,
        group: &FiniteGroupTable,
    ) -> Result<Self, SpaceError> {
        let order = group.order();
        let mismatch = |reason: String| SpaceError::PresetMismatch {
            preset: name.to_string(),
            reason,
        };
        let need_order = |k: usize| {
            if order == k {
                Ok(())
            } else {
                Err(mismatch(format!("needs a group of order {k}, got {order}")))
            }
        };
        let circle_n = || match space.kind() {
            SpaceKind::Circle { n } => Ok(n),
            other => Err(mismatch(format!("needs a circle, got {}", other.name()))),
        };
        let torus_n = || match space.kind() {
            SpaceKind::Torus { n } => Ok(n),
            other => Err(mismatch(format!("needs a torus, got {}", other.name()))),
        };
        let torus_map = |n: usize, f: &dyn Fn(usize, usize) -> (usize, usize)| -> Vec<usize> {
            (0..n * n)
                .map(|p| {
                    let (x, y) = f(p / n, p % n);
                    (x % n) * n + (y % n)
                })
                .collect()
        };

        let perms = match name {
            "identity" => {
                space.require_points()?;
                return Ok(Self::identity(order, space.point_count()));
            }
            "circle_reflection" => {
                need_order(2)?;
                let n = circle_n()?;
                vec![(0..n).collect(), (0..n).map(|p| (n - p) % n).collect()]
            }
            "circle_rotation" => {
                let n = circle_n()?;
                if n % order != 0 {
                    return Err(mismatch(format!("group order {order} must divide {n}")));
                }
                let step = n / order;
                (0..order)
                    .map(|g| (0..n).map(|p| (p + g * step) % n).collect())
                    .collect()
            }
            "torus_negation" => {
                need_order(2)?;
                let n = torus_n()?;
                vec![
                    torus_map(n, &|x, y| (x, y)),
                    torus_map(n, &|x, y| (n - x, n - y)),
                ]
            }
            "torus_quarter_turn" => {
                need_order(4)?;
                let n = torus_n()?;
                let turn = |k: usize, x: usize, y: usize| {
                    (0..k).fold((x, y), |(x, y), _| ((n - y) % n, x))
                };
                (0..4)
                    .map(|k| torus_map(n, &|x, y| turn(k, x, y)))
                    .collect()
            }
            "torus_axis_flips" => {
                need_order(4)?;
                let n = torus_n()?;
                (0..4)
                    .map(|g| {
                        torus_map(n, &|x, y| {
                            let x = if g & 1 == 1 { n - x } else { x };
                            let y = if g & 2 == 2 { n - y } else { y };
                            (x, y)
                        })
                    })
                    .collect()
            }
            "torus_negation_swap" => {
                need_order(4)?;
                let n = torus_n()?;
                (0..4)
                    .map(|g| {
                        torus_map(n, &|x, y| {
                            let (x, y) = if g & 1 == 1 { (n - x, n - y) } else { (x, y) };
                            if g & 2 == 2 {
                                (y, x)
                            } else {
                                (x, y)
                            }
                        })
                    })
                    .collect()
            }
            "s3_triangle" => {
                need_order(6)?;
                if circle_n()? != 3 {
                    return Err(mismatch("needs circle(3)".to_string()));
                }
                s3_permutations().iter().map(|p| p.to_vec()).collect()
            }
            other => return Err(SpaceError::UnknownPreset(other.to_string())),
        };
        Ok(Self { perms })
    }
}

/// Outcome of checking that an action is a homomorphism into the
/// automorphisms of a space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ActionReport {
    pub passed: bool,
    pub first_violation: Option<String>,
}

impl ActionReport {
    fn fail(msg: String) -> Self {
        Self {
            passed: false,
            first_violation: Some(msg),
        }
    }
}

/// Checks permutation shape, identity, the homomorphism law, weight
/// preservation and edge preservation, in that order.
pub fn validate_action<T: Real>(
    space: &DiscreteSpace<T>,
    action: &GroupAction,
    group: &FiniteGroupTable,
) -> ActionReport {
    let n = space.point_count();
    let order = group.order();
    if action.len() != order {
        return ActionReport::fail(format!(
            "{} permutations for a group of order {order}",
            action.len()
        ));
    }
    for (g, perm) in action.perms.iter().enumerate() {
        if perm.len() != n {
            return ActionReport::fail(format!(
                "permutation of element {g} has length {}, space has {n} points",
                perm.len()
            ));
        }
        let mut seen = vec![false; n];
        for &q in perm {
            if q >= n || seen[q] {
                return ActionReport::fail(format!("element {g} does not permute the points"));
            }
            seen[q] = true;
        }
    }
    if action.perms[group.identity()]
        .iter()
        .enumerate()
        .any(|(p, &q)| p != q)
    {
        return ActionReport::fail("identity element acts non-trivially".to_string());
    }
    for g in 0..order {
        for h in 0..order {
            let gh = group.mul(g, h);
            for p in 0..n {
                if action.perms[gh][p] != action.perms[g][action.perms[h][p]] {
                    return ActionReport::fail(format!(
                        "homomorphism fails: perm[{g}·{h}] != perm[{g}]∘perm[{h}] at point {p}"
                    ));
                }
            }
        }
    }
    let weights = space.weights();
    for (g, perm) in action.perms.iter().enumerate() {
        if let Some(p) = (0..n).find(|&p| weights[perm[p]] != weights[p]) {
            return ActionReport::fail(format!(
                "element {g} moves point {p} to a point of different weight"
            ));
        }
    }
    let lookup: HashMap<(usize, usize), usize> = space
        .edges()
        .iter()
        .enumerate()
        .map(|(i, e)| ((e.a, e.b), i))
        .collect();
    for (g, perm) in action.perms.iter().enumerate() {
        for e in space.edges() {
            let (a, b) = (perm[e.a], perm[e.b]);
            match lookup.get(&(a.min(b), a.max(b))) {
                Some(&i) if space.edges()[i].weight == e.weight => {}
                _ => {
                    return ActionReport::fail(format!(
                        "element {g} maps edge ({}, {}) to a non-edge or an edge of different weight",
                        e.a, e.b
                    ))
                }
            }
        }
    }
    ActionReport {
        passed: true,
        first_violation: None,
    }
}

//! Scenario files: schema, parsing, and whole-file validation.

use std::path::Path;

use orbifold_lab::group::{FiniteGroupTable, GROUP_PRESETS};
use orbifold_lab::space::{validate_action, DiscreteSpace, GroupAction, ACTION_PRESETS};
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;

/// Analytic space tags accepted under `space.analytic`.
pub const SPACE_TAGS: [&str; 4] = ["circle", "torus", "sphere", "flat_torus"];

/// Scenarios shipped with the tool, by file stem.
pub const BUNDLED: [(&str, &str); 10] = [
    ("trivial_circle8", include_str!("../scenarios/trivial_circle8.json")),
    ("z2_circle8", include_str!("../scenarios/z2_circle8.json")),
    ("z3_tripod", include_str!("../scenarios/z3_tripod.json")),
    ("z4_torus4", include_str!("../scenarios/z4_torus4.json")),
    ("z2_torus4", include_str!("../scenarios/z2_torus4.json")),
    ("z2xz2_torus4", include_str!("../scenarios/z2xz2_torus4.json")),
    ("s3_triangle", include_str!("../scenarios/s3_triangle.json")),
    ("z2_line_toy", include_str!("../scenarios/z2_line_toy.json")),
    ("trivial_sphere", include_str!("../scenarios/trivial_sphere.json")),
    ("trivial_flat_torus", include_str!("../scenarios/trivial_flat_torus.json")),
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub schema: u32,
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub group: GroupSpec,
    pub space: SpaceSpec,
    pub action: ActionSpec,
    #[serde(default)]
    pub options: Options,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GroupSpec {
    Preset(String),
    Table(GroupTable),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupTable {
    pub order: usize,
    pub table: Vec<Vec<usize>>,
}

/// Either `{"analytic": tag, ...}` or `{"points": [[id, w]], "edges": [[i, j, w]]}`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub analytic: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l_max: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_max: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<(usize, f64)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edges: Option<Vec<(usize, usize, f64)>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ActionSpec {
    Preset(String),
    Perms(ActionPerms),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActionPerms {
    pub perms: Vec<Vec<usize>>,
}

/// Explicit values or `{"log": [lo, hi], "points": n}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GridSpec {
    Values(Vec<f64>),
    Log(LogGrid),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LogGrid {
    pub log: [f64; 2],
    pub points: usize,
}

impl GridSpec {
    pub fn values(&self) -> Vec<f64> {
        match self {
            GridSpec::Values(v) => v.clone(),
            GridSpec::Log(g) => orbifold_lab::rgflow::log_grid(g.log[0], g.log[1], g.points),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToyOptions {
    pub degree: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HeatOptions {
    pub window: [f64; 2],
    #[serde(default = "default_heat_points")]
    pub points: usize,
}

fn default_heat_points() -> usize {
    33
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Options {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cluster_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ell_grid: Option<GridSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta_grid: Option<GridSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub toy: Option<ToyOptions>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub heat: Option<HeatOptions>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cohomology_modulus: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

/// Default β-grid: 33 points from 10⁻² to 10.
pub fn default_beta_grid() -> Vec<f64> {
    orbifold_lab::rgflow::log_grid(1e-2, 10.0, 33)
}

/// A scenario with its group, space and action built and cross-checked.
#[derive(Clone, Debug)]
pub struct Loaded {
    pub scenario: Scenario,
    pub group: FiniteGroupTable,
    pub space: DiscreteSpace<f64>,
    pub action: GroupAction,
}

impl Loaded {
    pub fn cluster_tol(&self) -> f64 {
        self.scenario
            .options
            .cluster_tol
            .unwrap_or(orbifold_lab::spectral::DEFAULT_CLUSTER_TOL)
    }

    pub fn beta_grid(&self) -> Vec<f64> {
        self.scenario
            .options
            .beta_grid
            .as_ref()
            .map_or_else(default_beta_grid, GridSpec::values)
    }
}

pub fn parse_scenario(text: &str) -> Result<Scenario, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Validation(vec![format!("parse error: {e}")]))
}

pub fn load_scenario(path: &Path) -> Result<Loaded, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    validate(parse_scenario(&text)?)
}

pub fn bundled(name: &str) -> Option<&'static str> {
    BUNDLED.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

/// Build every piece and collect all violations instead of stopping at the first.
pub fn validate(scenario: Scenario) -> Result<Loaded, CliError> {
    let mut errs = Vec::new();
    if scenario.schema != SCHEMA_VERSION {
        errs.push(format!(
            "schema: expected {SCHEMA_VERSION}, found {}",
            scenario.schema
        ));
    }
    if scenario.name.trim().is_empty() {
        errs.push("name: must not be empty".into());
    }

    let group = match &scenario.group {
        GroupSpec::Preset(name) => FiniteGroupTable::preset(name)
            .map_err(|_| {
                errs.push(format!(
                    "group: unknown preset `{name}` (known: {})",
                    GROUP_PRESETS.join(", ")
                ))
            })
            .ok(),
        GroupSpec::Table(t) => {
            if t.table.len() != t.order {
                errs.push(format!(
                    "group: order {} but table has {} rows",
                    t.order,
                    t.table.len()
                ));
                None
            } else {
                FiniteGroupTable::from_rows(&t.table)
                    .map_err(|e| errs.push(format!("group: {e}")))
                    .ok()
            }
        }
    };

    let space = build_space(&scenario.space, &mut errs);

    let action = match (&scenario.action, &group, &space) {
        (ActionSpec::Preset(name), Some(g), Some(s)) => {
            if !ACTION_PRESETS.contains(&name.as_str()) {
                errs.push(format!(
                    "action: unknown preset `{name}` (known: {})",
                    ACTION_PRESETS.join(", ")
                ));
                None
            } else if s.is_spectral_only() {
                if name != "identity" || g.order() != 1 {
                    errs.push(format!(
                        "action: space `{}` is spectral-only and accepts only the trivial group with the identity action",
                        s.kind().name()
                    ));
                }
                Some(GroupAction::identity(g.order(), 0))
            } else {
                GroupAction::preset(name, s, g)
                    .map_err(|e| errs.push(format!("action: {e}")))
                    .ok()
            }
        }
        (ActionSpec::Preset(name), ..) => {
            if !ACTION_PRESETS.contains(&name.as_str()) {
                errs.push(format!("action: unknown preset `{name}`"));
            }
            None
        }
        (ActionSpec::Perms(p), g, s) => {
            if let Some(g) = g {
                if p.perms.len() != g.order() {
                    errs.push(format!(
                        "action: group order {} but {} permutations",
                        g.order(),
                        p.perms.len()
                    ));
                }
            }
            if let Some(s) = s {
                if s.is_spectral_only() {
                    errs.push("action: spectral-only spaces take the `identity` preset".into());
                }
            }
            Some(GroupAction::new(p.perms.clone()))
        }
    };

    if let (Some(g), Some(s), Some(a)) = (&group, &space, &action) {
        if !s.is_spectral_only() && a.len() == g.order() {
            let report = validate_action(s, a, g);
            if let Some(v) = report.first_violation {
                errs.push(format!("action: {v}"));
            } else if let Err(e) = orbifold_lab::space::sector_chart(s, a, g) {
                errs.push(format!("action: {e}"));
            }
        }
    }

    check_options(&scenario.options, &mut errs);

    if errs.is_empty() {
        Ok(Loaded {
            scenario,
            group: group.expect("no errors"),
            space: space.expect("no errors"),
            action: action.expect("no errors"),
        })
    } else {
        Err(CliError::Validation(errs))
    }
}

fn build_space(spec: &SpaceSpec, errs: &mut Vec<String>) -> Option<DiscreteSpace<f64>> {
    let graph = spec.points.is_some() || spec.edges.is_some();
    match (&spec.analytic, graph) {
        (Some(_), true) => {
            errs.push("space: give either `analytic` or `points`/`edges`, not both".into());
            None
        }
        (None, false) => {
            errs.push("space: missing `analytic` tag or `points`".into());
            None
        }
        (Some(tag), false) => {
            let need = |field: Option<usize>, key: &str, errs: &mut Vec<String>| {
                if field.is_none() {
                    errs.push(format!("space: `{tag}` needs `{key}`"));
                }
                field
            };
            let stray = |present: bool, key: &str, errs: &mut Vec<String>| {
                if present {
                    errs.push(format!("space: `{key}` does not apply to `{tag}`"));
                }
            };
            match tag.as_str() {
                "circle" | "torus" => {
                    stray(spec.l_max.is_some(), "l_max", errs);
                    stray(spec.k_max.is_some(), "k_max", errs);
                    let n = need(spec.n, "n", errs)?;
                    let built = if tag == "circle" {
                        DiscreteSpace::circle(n)
                    } else {
                        DiscreteSpace::torus(n)
                    };
                    built.map_err(|e| errs.push(format!("space: {e}"))).ok()
                }
                "sphere" => {
                    stray(spec.n.is_some(), "n", errs);
                    stray(spec.k_max.is_some(), "k_max", errs);
                    need(spec.l_max, "l_max", errs).map(DiscreteSpace::sphere)
                }
                "flat_torus" => {
                    stray(spec.n.is_some(), "n", errs);
                    stray(spec.l_max.is_some(), "l_max", errs);
                    need(spec.k_max, "k_max", errs).map(DiscreteSpace::flat_torus)
                }
                other => {
                    errs.push(format!(
                        "space: unknown analytic tag `{other}` (known: {})",
                        SPACE_TAGS.join(", ")
                    ));
                    None
                }
            }
        }
        (None, true) => {
            if spec.n.is_some() || spec.l_max.is_some() || spec.k_max.is_some() {
                errs.push("space: `n`, `l_max`, `k_max` apply only to analytic spaces".into());
            }
            let Some(points) = &spec.points else {
                errs.push("space: graph needs `points`".into());
                return None;
            };
            let count = points.len();
            let mut weights = vec![f64::NAN; count];
            let mut ok = true;
            for &(id, w) in points {
                if id >= count {
                    errs.push(format!("space: point id {id} outside 0..{count}"));
                    ok = false;
                } else if !weights[id].is_nan() {
                    errs.push(format!("space: point id {id} listed twice"));
                    ok = false;
                } else {
                    weights[id] = w;
                }
            }
            if !ok {
                return None;
            }
            DiscreteSpace::from_graph(weights, spec.edges.clone().unwrap_or_default())
                .map_err(|e| errs.push(format!("space: {e}")))
                .ok()
        }
    }
}

fn check_options(o: &Options, errs: &mut Vec<String>) {
    if let Some(t) = o.cluster_tol {
        if !(t > 0.0 && t < 1.0) {
            errs.push(format!("options.cluster_tol: must lie in (0, 1), got {t}"));
        }
    }
    for (key, grid) in [("ell_grid", &o.ell_grid), ("beta_grid", &o.beta_grid)] {
        if let Some(g) = grid {
            check_grid(key, g, errs);
        }
    }
    if let Some(h) = &o.heat {
        if !(h.window[0] > 0.0 && h.window[0] < h.window[1]) {
            errs.push(format!(
                "options.heat.window: need 0 < lo < hi, got [{}, {}]",
                h.window[0], h.window[1]
            ));
        }
        if h.points < orbifold_lab::observables::HEAT_FIT_MIN_SAMPLES {
            errs.push(format!(
                "options.heat.points: need at least {}, got {}",
                orbifold_lab::observables::HEAT_FIT_MIN_SAMPLES,
                h.points
            ));
        }
    }
    if o.cohomology_modulus == Some(0) {
        errs.push("options.cohomology_modulus: must be positive".into());
    }
}

fn check_grid(key: &str, g: &GridSpec, errs: &mut Vec<String>) {
    match g {
        GridSpec::Values(v) => {
            if v.is_empty() {
                errs.push(format!("options.{key}: empty grid"));
            }
            if v.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
                errs.push(format!("options.{key}: values must be positive and finite"));
            }
        }
        GridSpec::Log(l) => {
            if !(l.log[0] > 0.0 && l.log[0] <= l.log[1] && l.log[1].is_finite()) {
                errs.push(format!(
                    "options.{key}.log: need 0 < lo ≤ hi, got [{}, {}]",
                    l.log[0], l.log[1]
                ));
            }
            if l.points == 0 {
                errs.push(format!("options.{key}.points: must be positive"));
            }
        }
    }
}

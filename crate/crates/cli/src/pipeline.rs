//! Stage orchestration: sectors → spectra → flow / observables, plus the toy check.

use std::collections::BTreeSet;
use std::fmt;

use orbifold_lab::algebra::AlgebraElement;
use orbifold_lab::group::{h2_brute_force, GroupError};
use orbifold_lab::observables::{heat_fit, smooth_limit_compare, PartitionTable};
use orbifold_lab::rgflow::{
    default_grid, flow_sweep, fusion_commutation_defect, is_rg_fixed, RGState, DEFAULT_FIXED_TOL,
    DEFAULT_GRID_POINTS,
};
use orbifold_lab::rgflow::log_grid;
use orbifold_lab::space::{sector_chart, SectorChart};
use orbifold_lab::spectral::{ModeBasis, SpectralError};
use orbifold_lab::toymodel::toy_cross_check;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use crate::report::*;
use crate::scenario::Loaded;
use crate::CliError;

/// Cohomology modulus used when a scenario does not ask for one.
pub const DEFAULT_COHOMOLOGY_MODULUS: u32 = 2;

/// Tolerance for the toy cross-check.
pub const TOY_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Stage {
    Sectors,
    Spectra,
    Flow,
    Observables,
    Toy,
}

impl Stage {
    pub const ALL: [Stage; 5] = [
        Stage::Sectors,
        Stage::Spectra,
        Stage::Flow,
        Stage::Observables,
        Stage::Toy,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Stage::Sectors => "sectors",
            Stage::Spectra => "spectra",
            Stage::Flow => "flow",
            Stage::Observables => "observables",
            Stage::Toy => "toy",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|st| st.name() == s)
    }

    fn requires(self) -> &'static [Stage] {
        match self {
            Stage::Sectors | Stage::Toy => &[],
            Stage::Spectra => &[Stage::Sectors],
            Stage::Flow | Stage::Observables => &[Stage::Spectra],
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Requested stages plus everything they depend on, in execution order.
pub fn resolve_stages(requested: &[Stage]) -> Vec<Stage> {
    let mut set = BTreeSet::new();
    let mut todo: Vec<Stage> = requested.to_vec();
    while let Some(s) = todo.pop() {
        if set.insert(s) {
            todo.extend_from_slice(s.requires());
        }
    }
    set.into_iter().collect()
}

pub fn scenario_hash(loaded: &Loaded) -> String {
    let canonical = serde_json::to_vec(&loaded.scenario).expect("scenario serializes");
    hex::encode(Sha256::digest(canonical))
}

fn spectral_error(e: SpectralError) -> CliError {
    match e {
        SpectralError::TooLarge { dim, limit } => CliError::Guard(format!(
            "sector dimension {dim} exceeds the dense solver limit {limit}; use a smaller space"
        )),
        other => CliError::Compute(other.to_string()),
    }
}

fn compute(e: impl fmt::Display) -> CliError {
    CliError::Compute(e.to_string())
}

pub fn run(loaded: &Loaded, requested: &[Stage]) -> Result<RunReport, CliError> {
    let stages = resolve_stages(requested);
    let has = |s: Stage| stages.contains(&s);
    let mut report = RunReport {
        tool: crate::TOOL_NAME.to_string(),
        version: crate::VERSION.to_string(),
        scenario: loaded.scenario.name.clone(),
        scenario_hash: scenario_hash(loaded),
        stages: stages.iter().map(|s| s.name().to_string()).collect(),
        notices: Vec::new(),
        sectors: None,
        spectra: None,
        flow: None,
        observables: None,
        toymodel: None,
    };

    let spectral_only = loaded.space.is_spectral_only();
    let chart: Option<SectorChart<f64>> = if spectral_only {
        None
    } else {
        Some(sector_chart(&loaded.space, &loaded.action, &loaded.group).map_err(compute)?)
    };

    if has(Stage::Sectors) {
        report.sectors = Some(sectors_stage(loaded, chart.as_ref(), &mut report.notices)?);
    }

    let tol = loaded.cluster_tol();
    let modes = if has(Stage::Spectra) {
        let modes = match &chart {
            Some(c) => ModeBasis::from_chart(&loaded.space, c, tol).map_err(spectral_error)?,
            None => ModeBasis::analytic(&loaded.space, tol)
                .ok_or_else(|| compute("space has no closed-form spectrum"))?,
        };
        report.spectra = Some(spectra_section(&modes, tol));
        Some(modes)
    } else {
        None
    };

    if let (true, Some(modes)) = (has(Stage::Flow), &modes) {
        report.flow = Some(flow_stage(loaded, chart.as_ref(), modes)?);
    }
    if let (true, Some(modes)) = (has(Stage::Observables), &modes) {
        report.observables = Some(observables_stage(loaded, modes, &mut report.notices)?);
    }
    if has(Stage::Toy) {
        match &loaded.scenario.options.toy {
            Some(t) => {
                let grid = loaded
                    .scenario
                    .options
                    .ell_grid
                    .as_ref()
                    .map(|g| g.values())
                    .unwrap_or_default();
                let r = toy_cross_check(t.degree, &grid, TOY_TOL).map_err(compute)?;
                report.toymodel = Some(ToySection {
                    provenance: Provenance::new("toy", &[])
                        .with("degree", t.degree)
                        .with("tolerance", TOY_TOL),
                    degree: r.degree,
                    grid: r.grid,
                    trials: r.trials,
                    max_deviation: r.max_deviation,
                    passed: r.passed,
                });
            }
            None => report
                .notices
                .push("toy: scenario has no `options.toy`; stage skipped".into()),
        }
    }
    Ok(report)
}

fn sectors_stage(
    loaded: &Loaded,
    chart: Option<&SectorChart<f64>>,
    notices: &mut Vec<String>,
) -> Result<SectorsSection, CliError> {
    let group = &loaded.group;
    let mut warnings = Vec::new();
    let classes = match chart {
        Some(c) => c
            .sectors()
            .iter()
            .enumerate()
            .map(|(i, s)| ClassSummary {
                index: i,
                representative: s.representative,
                members: s.members.clone(),
                centralizer_order: s.centralizer.len(),
                locus_size: Some(s.locus.len()),
                locus_points: Some(s.locus.points.clone()),
            })
            .collect(),
        None => vec![ClassSummary {
            index: 0,
            representative: 0,
            members: vec![0],
            centralizer_order: 1,
            locus_size: None,
            locus_points: None,
        }],
    };
    if !group.is_abelian() {
        warnings.push(
            "non-abelian group: fusion products depend on the chosen class representatives".into(),
        );
    }

    let explicit = loaded.scenario.options.cohomology_modulus;
    let m = explicit.unwrap_or(DEFAULT_COHOMOLOGY_MODULUS);
    let cohomology = match h2_brute_force(group, m) {
        Ok(s) => Some(CohomologySection {
            modulus: s.modulus,
            cocycles: s.cocycle_count,
            coboundaries: s.coboundary_count,
            classes: s.class_count,
            u1_image_order: s.u1_image_order,
        }),
        Err(GroupError::SearchSpaceTooLarge { size, bound }) => {
            let msg = format!(
                "cohomology mod {m}: search space {size} exceeds the brute-force bound {bound}"
            );
            if explicit.is_some() {
                return Err(CliError::Guard(format!(
                    "{msg}; lower options.cohomology_modulus"
                )));
            }
            notices.push(format!("{msg}; skipped"));
            None
        }
        Err(e) => return Err(compute(e)),
    };

    Ok(SectorsSection {
        provenance: Provenance::new("sectors", &[]).with("cohomology_modulus", m),
        group_order: group.order(),
        abelian: group.is_abelian(),
        point_count: chart.map(SectorChart::point_count),
        classes,
        cohomology,
        warnings,
    })
}

fn spectra_section(modes: &ModeBasis<f64>, tol: f64) -> SpectraSection {
    let mut hasher = Sha256::new();
    for (s, k, l, _, m) in modes.spectrum_rows() {
        hasher.update((s as u64).to_le_bytes());
        hasher.update((k as u64).to_le_bytes());
        hasher.update(l.to_bits().to_le_bytes());
        hasher.update((m as u64).to_le_bytes());
    }
    SpectraSection {
        provenance: Provenance::new("spectra", &["sectors"]).with("cluster_tol", tol),
        digest: hex::encode(hasher.finalize()),
        analytic: !modes.has_vectors(),
        sectors: modes
            .sectors()
            .iter()
            .enumerate()
            .map(|(c, s)| SectorSpectrum {
                class: c,
                eigenvalues: s.eigenvalues().to_vec(),
                multiplicities: s.multiplicities().to_vec(),
                cluster_ids: (0..s.entry_count()).map(|k| s.cluster_of(k)).collect(),
            })
            .collect(),
    }
}

fn flow_stage(
    loaded: &Loaded,
    chart: Option<&SectorChart<f64>>,
    modes: &ModeBasis<f64>,
) -> Result<FlowSection, CliError> {
    let grid = loaded
        .scenario
        .options
        .ell_grid
        .as_ref()
        .map_or_else(|| default_grid(modes, DEFAULT_GRID_POINTS), |g| g.values());
    let seed = loaded.scenario.options.seed.unwrap_or(0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shape = modes.shape();
    let a = AlgebraElement::random_real(&shape, &mut rng);
    let b = AlgebraElement::random_real(&shape, &mut rng);
    let vectors = modes.has_vectors();
    let probes = vectors.then_some((&a, &b));
    let sweep = flow_sweep(modes, &grid, probes, DEFAULT_FIXED_TOL).map_err(compute)?;

    let mut rows = Vec::with_capacity(grid.len());
    for (i, &ell) in grid.iter().enumerate() {
        let fusion_defect = match chart {
            Some(c) if c.is_abelian() && vectors => {
                let state = RGState::new(modes, ell).map_err(compute)?;
                Some(fusion_commutation_defect(&state, &a, &b, c).map_err(compute)?)
            }
            _ => None,
        };
        rows.push(FlowRow {
            ell,
            cutoff: sweep.cutoffs[i],
            retained: sweep.retained[i].clone(),
            multiplicativity_defect: sweep.multiplicativity[i],
            idempotent_defect: sweep.idempotent_defect[i],
            fusion_defect,
        });
    }

    let idempotents_rg_fixed = if vectors {
        (0..modes.len())
            .map(|c| {
                let mut e = AlgebraElement::filled_zero(&shape);
                e.component_mut(c).fill(num_complex::Complex::new(1.0, 0.0));
                is_rg_fixed(modes, &e, &grid, DEFAULT_FIXED_TOL).map(|v| v.fixed)
            })
            .collect::<Result<_, _>>()
            .map_err(compute)?
    } else {
        vec![true; modes.len()]
    };

    // Defects in order of increasing Λ, i.e. decreasing ℓ.
    let by_cutoff: Option<Vec<(f64, f64)>> = rows
        .iter()
        .map(|r| r.multiplicativity_defect.map(|d| (r.cutoff, d)))
        .collect();
    let multiplicativity_monotone = by_cutoff.map(|mut v| {
        v.sort_by(|x, y| x.0.total_cmp(&y.0));
        v.windows(2).all(|w| w[1].1 <= w[0].1 + 1e-10)
    });

    Ok(FlowSection {
        provenance: Provenance::new("flow", &["spectra"])
            .with("grid_points", grid.len())
            .with("probe_seed", seed)
            .with("fixed_tol", DEFAULT_FIXED_TOL),
        rows,
        idempotents_rg_fixed,
        multiplicativity_monotone,
    })
}

fn observables_stage(
    loaded: &Loaded,
    modes: &ModeBasis<f64>,
    notices: &mut Vec<String>,
) -> Result<ObservablesSection, CliError> {
    let betas = loaded.beta_grid();
    let table = PartitionTable::build(modes, &betas).map_err(compute)?;
    let smooth = smooth_limit_compare(
        &loaded.space,
        &loaded.group,
        &loaded.action,
        &betas,
        loaded.cluster_tol(),
    )
    .map_err(compute)?;

    let heat_fit = match (&loaded.scenario.options.heat, loaded.space.dimension()) {
        (Some(h), Some(dim)) => {
            let window = log_grid(h.window[0], h.window[1], h.points);
            let t = PartitionTable::build(modes, &window).map_err(compute)?;
            match heat_fit(&t, dim, (h.window[0], h.window[1])) {
                Ok(f) => Some(HeatFitSection {
                    dimension: f.dimension,
                    window: h.window,
                    samples: f.samples,
                    c_minus1: f.c_minus1,
                    c0: f.c0,
                    residual: f.residual,
                }),
                Err(e) => {
                    notices.push(format!("observables: heat fit rejected: {e}"));
                    None
                }
            }
        }
        (Some(_), None) => {
            notices.push("observables: heat fit needs a space with a known dimension; skipped".into());
            None
        }
        (None, _) => None,
    };

    Ok(ObservablesSection {
        provenance: Provenance::new("observables", &["spectra"])
            .with("beta_points", betas.len())
            .with("cluster_tol", loaded.cluster_tol()),
        partition: PartitionSection {
            additivity_error: table.additivity_error(),
            mode_count: table.mode_count,
            betas: table.betas,
            total: table.total,
            per_class: table.per_class,
        },
        smooth_limit: SmoothLimitSection {
            plain: smooth.plain,
            untwisted: smooth.untwisted,
            invariant: smooth.invariant,
            max_untwisted_diff: smooth.max_untwisted_diff,
            max_invariant_diff: smooth.max_invariant_diff,
        },
        heat_fit,
    })
}

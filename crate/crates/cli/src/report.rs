//! Run reports: plain serializable data, one optional section per stage.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub tool: String,
    pub version: String,
    pub scenario: String,
    pub scenario_hash: String,
    pub stages: Vec<String>,
    pub notices: Vec<String>,
    pub sectors: Option<SectorsSection>,
    pub spectra: Option<SpectraSection>,
    pub flow: Option<FlowSection>,
    pub observables: Option<ObservablesSection>,
    pub toymodel: Option<ToySection>,
}

/// Where a section's numbers come from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub stage: String,
    pub depends_on: Vec<String>,
    pub parameters: BTreeMap<String, String>,
}

impl Provenance {
    pub fn new(stage: &str, depends_on: &[&str]) -> Self {
        Self {
            stage: stage.to_string(),
            depends_on: depends_on.iter().map(|s| s.to_string()).collect(),
            parameters: BTreeMap::new(),
        }
    }

    pub fn with(mut self, key: &str, value: impl ToString) -> Self {
        self.parameters.insert(key.to_string(), value.to_string());
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SectorsSection {
    pub provenance: Provenance,
    pub group_order: usize,
    pub abelian: bool,
    /// `None` for spectral-only spaces.
    pub point_count: Option<usize>,
    pub classes: Vec<ClassSummary>,
    pub cohomology: Option<CohomologySection>,
    pub warnings: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassSummary {
    pub index: usize,
    pub representative: usize,
    pub members: Vec<usize>,
    pub centralizer_order: usize,
    pub locus_size: Option<usize>,
    pub locus_points: Option<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CohomologySection {
    pub modulus: u32,
    pub cocycles: usize,
    pub coboundaries: usize,
    pub classes: usize,
    pub u1_image_order: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectraSection {
    pub provenance: Provenance,
    /// SHA-256 over the exact bits of every (class, entry, eigenvalue, multiplicity).
    pub digest: String,
    pub analytic: bool,
    pub sectors: Vec<SectorSpectrum>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SectorSpectrum {
    pub class: usize,
    pub eigenvalues: Vec<f64>,
    pub multiplicities: Vec<usize>,
    pub cluster_ids: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlowSection {
    pub provenance: Provenance,
    pub rows: Vec<FlowRow>,
    /// Per class: whether `e_[g]` is RG-fixed over the whole grid.
    pub idempotents_rg_fixed: Vec<bool>,
    /// Whether the multiplicativity defect never grows as Λ increases.
    pub multiplicativity_monotone: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlowRow {
    pub ell: f64,
    pub cutoff: f64,
    pub retained: Vec<usize>,
    pub multiplicativity_defect: Option<f64>,
    pub idempotent_defect: Option<f64>,
    pub fusion_defect: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObservablesSection {
    pub provenance: Provenance,
    pub partition: PartitionSection,
    pub smooth_limit: SmoothLimitSection,
    pub heat_fit: Option<HeatFitSection>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartitionSection {
    pub betas: Vec<f64>,
    pub total: Vec<f64>,
    /// `per_class[i][c]` at `betas[i]`.
    pub per_class: Vec<Vec<f64>>,
    pub additivity_error: f64,
    pub mode_count: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmoothLimitSection {
    pub plain: Vec<f64>,
    pub untwisted: Vec<f64>,
    pub invariant: Option<Vec<f64>>,
    pub max_untwisted_diff: f64,
    pub max_invariant_diff: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HeatFitSection {
    pub dimension: usize,
    pub window: [f64; 2],
    pub samples: usize,
    pub c_minus1: f64,
    pub c0: f64,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ToySection {
    pub provenance: Provenance,
    pub degree: usize,
    pub grid: Vec<f64>,
    pub trials: usize,
    pub max_deviation: f64,
    pub passed: bool,
}

pub fn to_json(report: &RunReport) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(report)
        .map_err(|e| CliError::Compute(format!("serializing report: {e}")))?;
    s.push('\n');
    Ok(s)
}

pub fn read_report(path: &Path) -> Result<RunReport, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Validation(vec![format!("report {}: {e}", path.display())]))
}

//! Writing reports to disk as one JSON file or a CSV bundle.

use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::report::{to_json, RunReport};
use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Serialize)]
struct Manifest<'a> {
    tool: &'a str,
    version: &'a str,
    scenario: &'a str,
    scenario_hash: &'a str,
    stages: &'a [String],
    files: Vec<String>,
}

fn io(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

/// Write `report` under `dir`, returning the files created.
pub fn emit(report: &RunReport, format: Format, dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    std::fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
    match format {
        Format::Json => {
            let path = dir.join(format!("{}.json", report.scenario));
            std::fs::write(&path, to_json(report)?).map_err(|e| io(&path, e))?;
            Ok(vec![path])
        }
        Format::Csv => emit_csv(report, dir),
    }
}

fn emit_csv(report: &RunReport, dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let mut files = Vec::new();

    if let Some(spectra) = &report.spectra {
        let path = dir.join("spectra.csv");
        let mut w = csv::Writer::from_path(&path).map_err(|e| io(&path, e))?;
        w.write_record(["sector", "mode_index", "eigenvalue", "cluster_id", "multiplicity"])
            .map_err(|e| io(&path, e))?;
        for s in &spectra.sectors {
            for k in 0..s.eigenvalues.len() {
                w.write_record([
                    s.class.to_string(),
                    k.to_string(),
                    s.eigenvalues[k].to_string(),
                    s.cluster_ids[k].to_string(),
                    s.multiplicities[k].to_string(),
                ])
                .map_err(|e| io(&path, e))?;
            }
        }
        w.flush().map_err(|e| io(&path, e))?;
        files.push(path);
    }

    if let Some(flow) = &report.flow {
        let path = dir.join("flow.csv");
        let mut w = csv::Writer::from_path(&path).map_err(|e| io(&path, e))?;
        let sectors = flow.rows.first().map_or(0, |r| r.retained.len());
        let mut header = vec!["ell".to_string(), "cutoff".to_string()];
        header.extend((0..sectors).map(|s| format!("retained_{s}")));
        header.extend(
            ["multiplicativity_defect", "idempotent_defect", "fusion_defect"].map(String::from),
        );
        w.write_record(&header).map_err(|e| io(&path, e))?;
        let opt = |x: Option<f64>| x.map_or_else(String::new, |v| v.to_string());
        for r in &flow.rows {
            let mut rec = vec![r.ell.to_string(), r.cutoff.to_string()];
            rec.extend(r.retained.iter().map(usize::to_string));
            rec.push(opt(r.multiplicativity_defect));
            rec.push(opt(r.idempotent_defect));
            rec.push(opt(r.fusion_defect));
            w.write_record(&rec).map_err(|e| io(&path, e))?;
        }
        w.flush().map_err(|e| io(&path, e))?;
        files.push(path);
    }

    if let Some(obs) = &report.observables {
        let path = dir.join("partition.csv");
        let mut w = csv::Writer::from_path(&path).map_err(|e| io(&path, e))?;
        let p = &obs.partition;
        let classes = p.per_class.first().map_or(0, Vec::len);
        let mut header = vec!["beta".to_string(), "Z".to_string()];
        header.extend((0..classes).map(|c| format!("Z_class_{c}")));
        w.write_record(&header).map_err(|e| io(&path, e))?;
        for (i, b) in p.betas.iter().enumerate() {
            let mut rec = vec![b.to_string(), p.total[i].to_string()];
            rec.extend(p.per_class[i].iter().map(f64::to_string));
            w.write_record(&rec).map_err(|e| io(&path, e))?;
        }
        w.flush().map_err(|e| io(&path, e))?;
        files.push(path);
    }

    let path = dir.join("manifest.json");
    let manifest = Manifest {
        tool: &report.tool,
        version: &report.version,
        scenario: &report.scenario,
        scenario_hash: &report.scenario_hash,
        stages: &report.stages,
        files: files
            .iter()
            .map(|f| f.file_name().unwrap().to_string_lossy().into_owned())
            .collect(),
    };
    let mut text = serde_json::to_string_pretty(&manifest).map_err(|e| io(&path, e))?;
    text.push('\n');
    std::fs::write(&path, text).map_err(|e| io(&path, e))?;
    files.push(path);
    Ok(files)
}

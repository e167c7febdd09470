use orbifold_lab_cli::scenario::bundled;
use orbifold_lab_cli::{emit, parse_scenario, read_report, report, run, validate, CliError, Format, Loaded, Stage};

fn load(name: &str) -> Loaded {
    validate(parse_scenario(bundled(name).unwrap()).unwrap()).unwrap()
}

fn load_text(text: &str) -> Loaded {
    validate(parse_scenario(text).unwrap()).unwrap()
}

#[test]
fn sectors_only_run() {
    let r = run(&load("z2_circle8"), &[Stage::Sectors]).unwrap();
    assert_eq!(r.stages, vec!["sectors"]);
    let s = r.sectors.unwrap();
    let sizes: Vec<_> = s.classes.iter().map(|c| c.locus_size.unwrap()).collect();
    assert_eq!(sizes, vec![8, 2]);
    assert_eq!(s.classes[1].locus_points.as_deref(), Some(&[0, 4][..]));
    let h2 = s.cohomology.unwrap();
    // H²(Z2; Z/2) = Z/2, but nothing survives into U(1).
    assert_eq!(h2.classes, 2);
    assert_eq!(h2.u1_image_order, Some(1));
    assert!(r.spectra.is_none() && r.flow.is_none());
}

#[test]
fn dependencies_are_pulled_in() {
    let r = run(&load("z2_circle8"), &[Stage::Flow]).unwrap();
    assert_eq!(r.stages, vec!["sectors", "spectra", "flow"]);
    let flow = r.flow.unwrap();
    assert!(flow.idempotents_rg_fixed.iter().all(|&b| b));
    assert!(flow.rows.iter().all(|row| row.fusion_defect.is_some()));
}

#[test]
fn toy_stage_without_options_leaves_a_notice() {
    let r = run(&load("z2_circle8"), &[Stage::Toy]).unwrap();
    assert!(r.toymodel.is_none());
    assert!(r.notices.iter().any(|n| n.starts_with("toy")));
    let r = run(&load("z2_line_toy"), &[Stage::Toy]).unwrap();
    let toy = r.toymodel.unwrap();
    assert!(toy.passed);
    assert_eq!(toy.degree, 8);
}

#[test]
fn klein_four_reports_a_nontrivial_class() {
    let r = run(&load("z2xz2_torus4"), &[Stage::Sectors]).unwrap();
    let h2 = r.sectors.unwrap().cohomology.unwrap();
    assert_eq!(h2.classes, 8);
    assert_eq!(h2.u1_image_order, Some(2));
}

#[test]
fn non_abelian_run_warns_and_skips_fusion() {
    let r = run(&load("s3_triangle"), &Stage::ALL).unwrap();
    assert!(!r.sectors.as_ref().unwrap().warnings.is_empty());
    assert!(r.flow.unwrap().rows.iter().all(|row| row.fusion_defect.is_none()));
}

#[test]
fn json_round_trip() {
    let r = run(&load("z4_torus4"), &Stage::ALL).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let files = emit(&r, Format::Json, dir.path()).unwrap();
    assert_eq!(files, vec![dir.path().join("z4_torus4.json")]);
    assert_eq!(read_report(&files[0]).unwrap(), r);
}

#[test]
fn csv_bundle_layout() {
    let r = run(&load("z2xz2_torus4"), &Stage::ALL).unwrap();
    let dir = tempfile::tempdir().unwrap();
    emit(&r, Format::Csv, dir.path()).unwrap();
    let mut rd = csv::Reader::from_path(dir.path().join("partition.csv")).unwrap();
    let header: Vec<String> = rd.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(header, ["beta", "Z", "Z_class_0", "Z_class_1", "Z_class_2", "Z_class_3"]);
    assert_eq!(rd.records().count(), 33);
    let mut rd = csv::Reader::from_path(dir.path().join("spectra.csv")).unwrap();
    let header: Vec<String> = rd.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(header, ["sector", "mode_index", "eigenvalue", "cluster_id", "multiplicity"]);
    // 16 + 8 + 8 + 4 fixed points.
    assert_eq!(rd.records().count(), 36);
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("manifest.json")).unwrap())
            .unwrap();
    assert_eq!(manifest["scenario_hash"], r.scenario_hash.as_str());
    assert_eq!(manifest["files"].as_array().unwrap().len(), 3);
}

#[test]
fn empty_stage_list_gives_manifest_only() {
    let r = run(&load("z2_circle8"), &[]).unwrap();
    assert!(r.stages.is_empty());
    let dir = tempfile::tempdir().unwrap();
    let files = emit(&r, Format::Csv, dir.path()).unwrap();
    assert_eq!(files, vec![dir.path().join("manifest.json")]);
}

#[test]
fn runs_are_deterministic() {
    let l = load("z2_line_toy");
    let a = report::to_json(&run(&l, &Stage::ALL).unwrap()).unwrap();
    let b = report::to_json(&run(&l, &Stage::ALL).unwrap()).unwrap();
    assert_eq!(a, b);
}

#[test]
fn guards() {
    let s3 = load_text(
        r#"{"schema":1,"name":"s3","group":"S3","space":{"analytic":"circle","n":3},
            "action":"s3_triangle","options":{"cohomology_modulus":3}}"#,
    );
    let e = run(&s3, &[Stage::Sectors]).unwrap_err();
    assert!(matches!(e, CliError::Guard(_)), "{e:?}");
    assert_eq!(e.exit_code(), 3);

    let big = load_text(
        r#"{"schema":1,"name":"big","group":"trivial","space":{"analytic":"circle","n":2001},
            "action":"identity"}"#,
    );
    let e = run(&big, &[Stage::Spectra]).unwrap_err();
    assert!(matches!(e, CliError::Guard(_)), "{e:?}");
    // Sectors alone stay cheap.
    assert!(run(&big, &[Stage::Sectors]).is_ok());
}

#[test]
fn analytic_heat_fit_in_report() {
    let r = run(&load("trivial_sphere"), &[Stage::Observables]).unwrap();
    let fit = r.observables.unwrap().heat_fit.unwrap();
    assert!((fit.c_minus1 - 1.0).abs() <= 5e-3);
    assert!((fit.c0 - 1.0 / 3.0).abs() <= 5e-3);
}

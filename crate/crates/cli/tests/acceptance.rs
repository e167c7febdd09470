//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use num_complex::Complex;
use orbifold_lab::algebra::{
    diagonal_product, frobenius_pairing, fusion_product, idempotent, sector_project, trace,
    AlgebraElement, PairingWeights,
};
use orbifold_lab::group::{h2_brute_force, validate_cocycle, FiniteGroupTable, TwoCocycle};
use orbifold_lab::observables::{heat_fit, smooth_limit_compare, PartitionTable};
use orbifold_lab::rgflow::{default_grid, log_grid, multiplicativity_defect, rg_filter, RGState};
use orbifold_lab::space::{build_laplacian, sector_chart, DiscreteSpace, GroupAction, SectorChart};
use orbifold_lab::spectral::{ModeBasis, DEFAULT_CLUSTER_TOL};
use orbifold_lab::toymodel::{parity_split, toy_cross_check, toy_product, toy_rg, ParityElement};
use orbifold_lab_cli::scenario::{GroupSpec, BUNDLED};
use orbifold_lab_cli::{parse_scenario, report, run, validate, Loaded, Stage};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn loaded_all() -> Vec<Loaded> {
    BUNDLED
        .iter()
        .map(|(_, t)| validate(parse_scenario(t).unwrap()).unwrap())
        .collect()
}

fn graph_charts() -> Vec<(String, Loaded, SectorChart<f64>)> {
    loaded_all()
        .into_iter()
        .filter(|l| !l.space.is_spectral_only())
        .map(|l| {
            let c = sector_chart(&l.space, &l.action, &l.group).unwrap();
            (l.scenario.name.clone(), l, c)
        })
        .collect()
}

fn dist(a: &AlgebraElement<f64>, b: &AlgebraElement<f64>) -> f64 {
    a.sub(b).unwrap().max_abs()
}

fn c1_algebra_laws() -> Check {
    let tol = 1e-10;
    let mut worst = 0.0f64;
    let mut scenarios = 0;
    for (name, _, chart) in graph_charts() {
        scenarios += 1;
        let w = PairingWeights::from_chart(&chart);
        let shape = chart.locus_sizes();
        let unit = AlgebraElement::unit(&chart);
        let mut rng = ChaCha8Rng::seed_from_u64(101);
        for _ in 0..200 {
            let a = AlgebraElement::random(&shape, &mut rng);
            let b = AlgebraElement::random(&shape, &mut rng);
            let c = AlgebraElement::random(&shape, &mut rng);
            let ab = diagonal_product(&a, &b).unwrap();
            let ba = diagonal_product(&b, &a).unwrap();
            let bc = diagonal_product(&b, &c).unwrap();
            let errs = [
                dist(&diagonal_product(&ab, &c).unwrap(), &diagonal_product(&a, &bc).unwrap()),
                dist(&ab, &ba),
                dist(&diagonal_product(&a, &unit).unwrap(), &a),
                dist(&diagonal_product(&unit, &a).unwrap(), &a),
                (frobenius_pairing(&ab, &c, &w).unwrap() - frobenius_pairing(&a, &bc, &w).unwrap())
                    .norm(),
                trace(&ab.sub(&ba).unwrap(), &w).unwrap().norm(),
            ];
            let e = errs.iter().copied().fold(0.0, f64::max);
            worst = worst.max(e);
            ensure(e <= tol, || format!("{name}: law error {e:e}"))?;
        }
        // Gram matrix of the pairing on point deltas; singular values by nalgebra.
        let n: usize = shape.iter().sum();
        let mut deltas = Vec::with_capacity(n);
        for (c, &len) in shape.iter().enumerate() {
            for p in 0..len {
                let mut d = AlgebraElement::filled_zero(&shape);
                d.component_mut(c)[p] = Complex::new(1.0, 0.0);
                deltas.push(d);
            }
        }
        let gram = DMatrix::from_fn(n, n, |i, j| frobenius_pairing(&deltas[i], &deltas[j], &w).unwrap().re);
        let smin = gram.singular_values().min();
        let wmin = w.min().unwrap();
        ensure(smin >= wmin * (1.0 - 1e-9), || {
            format!("{name}: Gram min singular value {smin} below min weight {wmin}")
        })?;
    }
    Ok(format!("{scenarios} scenarios x 200 triples, worst {worst:.1e}, Gram ok"))
}

fn c2_fusion() -> Check {
    const GROUPS: [&str; 4] = ["Z2", "Z3", "Z4", "Z2xZ2"];
    let preset = |l: &Loaded| match &l.scenario.group {
        GroupSpec::Preset(g) if GROUPS.contains(&g.as_str()) => Some(g.clone()),
        _ => None,
    };
    let mut worst = (0.0f64, 0.0f64);
    let mut tested = Vec::new();
    for (name, l, chart) in graph_charts() {
        let Some(group) = preset(&l) else { continue };
        tested.push(group);
        let shape = chart.locus_sizes();
        let e1 = idempotent(&chart, chart.identity_class()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(202);
        for _ in 0..100 {
            let a = AlgebraElement::random(&shape, &mut rng);
            let b = AlgebraElement::random(&shape, &mut rng);
            let c = AlgebraElement::random(&shape, &mut rng);
            let f = |x: &AlgebraElement<f64>, y: &AlgebraElement<f64>| fusion_product(x, y, &chart).unwrap();
            let assoc = dist(&f(&f(&a, &b), &c), &f(&a, &f(&b, &c)));
            let unit = dist(&f(&e1, &a), &a).max(dist(&f(&a, &e1), &a));
            worst = (worst.0.max(assoc), worst.1.max(unit));
            ensure(assoc <= 1e-10, || format!("{name}: associativity {assoc:e}"))?;
            ensure(unit <= 1e-12, || format!("{name}: unit {unit:e}"))?;
        }
    }
    for g in GROUPS {
        ensure(tested.iter().any(|t| t == g), || format!("no bundled scenario for {g}"))?;
    }
    Ok(format!(
        "{} scenarios x 100 triples, associativity {:.1e}, unit {:.1e}",
        tested.len(),
        worst.0,
        worst.1
    ))
}

fn c3_spectra() -> Check {
    let mut worst = (0.0f64, 0.0f64, 0.0f64);
    for n in [4usize, 8, 16] {
        let space = DiscreteSpace::<f64>::circle(n).unwrap();
        let g = FiniteGroupTable::trivial();
        let a = GroupAction::identity(1, n);
        let chart = sector_chart(&space, &a, &g).unwrap();
        let modes = ModeBasis::from_chart(&space, &chart, DEFAULT_CLUSTER_TOL).unwrap();
        let sec = &modes.sectors()[0];
        let mut expected: Vec<f64> = (0..n)
            .map(|j| 2.0 - 2.0 * (2.0 * std::f64::consts::PI * j as f64 / n as f64).cos())
            .collect();
        expected.sort_by(f64::total_cmp);
        let got = sec.eigenvalues();
        ensure(got.len() == n, || format!("n={n}: {} eigenvalues", got.len()))?;
        let ev = got.iter().zip(&expected).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        ensure(ev <= 1e-9, || format!("n={n}: eigenvalue error {ev:e}"))?;

        let op = build_laplacian(&space, &chart.sectors()[0].locus).unwrap();
        let v = sec.vectors().unwrap();
        let mut res = 0.0f64;
        for k in 0..n {
            let col = v.column(k);
            let lv = op.stiffness.matvec(&col).unwrap();
            for i in 0..n {
                res = res.max((lv[i] - got[k] * op.weights[i] * col[i]).abs());
            }
        }
        ensure(res <= 1e-8, || format!("n={n}: residual {res:e}"))?;

        let mut sum = orbifold_lab::linalg::Matrix::zeros(n, n);
        for k in 0..sec.clusters().len() {
            sum = sum.add(&sec.cluster_projector(k).unwrap()).unwrap();
        }
        let pi = sum.sub(&orbifold_lab::linalg::Matrix::identity(n)).unwrap().max_abs();
        ensure(pi <= 1e-8, || format!("n={n}: projector sum error {pi:e}"))?;
        worst = (worst.0.max(ev), worst.1.max(res), worst.2.max(pi));
    }
    Ok(format!(
        "n=4,8,16: eigenvalues {:.1e}, residual {:.1e}, sum of projectors {:.1e}",
        worst.0, worst.1, worst.2
    ))
}

fn c4_rg() -> Check {
    let tol = 1e-10;
    let mut count = 0;
    let mut worst_mult = 0.0f64;
    for (name, l, chart) in graph_charts() {
        let modes = ModeBasis::from_chart(&l.space, &chart, DEFAULT_CLUSTER_TOL).unwrap();
        let shape = chart.locus_sizes();
        let grid = default_grid(&modes, 33);
        let mut rng = ChaCha8Rng::seed_from_u64(404);
        let a = AlgebraElement::random(&shape, &mut rng);
        let b = AlgebraElement::random(&shape, &mut rng);
        for (i, &fine) in grid.iter().enumerate() {
            let sf = RGState::new(&modes, fine).unwrap();
            let once = rg_filter(&sf, &a).unwrap();
            let idem = dist(&rg_filter(&sf, &once).unwrap(), &once);
            ensure(idem <= tol, || format!("{name}: idempotence {idem:e} at ell={fine}"))?;
            for &coarse in &grid[i..] {
                let sc = RGState::new(&modes, coarse).unwrap();
                let c = rg_filter(&sc, &a).unwrap();
                let m = dist(&rg_filter(&sf, &c).unwrap(), &c).max(dist(&rg_filter(&sc, &once).unwrap(), &c));
                ensure(m <= tol, || format!("{name}: monotonicity {m:e} at {fine} < {coarse}"))?;
            }
            for k in 0..chart.len() {
                let p = sector_project(&once, k).unwrap();
                let q = rg_filter(&sf, &sector_project(&a, k).unwrap()).unwrap();
                let d = dist(&p, &q);
                ensure(d == 0.0, || format!("{name}: sector commutation {d:e}"))?;
                let e = idempotent(&chart, k).unwrap();
                let fixed = dist(&rg_filter(&sf, &e).unwrap(), &e);
                ensure(fixed <= tol, || format!("{name}: e_{k} moved by {fixed:e} at ell={fine}"))?;
            }
            count += 1;
        }
        let lmax = modes.lambda_max().unwrap();
        let mut ell = 1.0 / lmax;
        while 1.0 / ell < lmax {
            ell *= 1.0 - f64::EPSILON;
        }
        for scale in [ell, 0.5 * ell, 0.01 * ell] {
            let st = RGState::new(&modes, scale).unwrap();
            let d = multiplicativity_defect(&st, &a, &b).unwrap();
            worst_mult = worst_mult.max(d);
            ensure(d <= tol, || format!("{name}: multiplicativity {d:e} at Lambda={}", 1.0 / scale))?;
        }
    }
    Ok(format!("{count} (scenario, ell) points; multiplicativity at Lambda>=lambda_max {worst_mult:.1e}"))
}

fn c5_partition() -> Check {
    let mut worst = 0.0f64;
    for l in loaded_all() {
        let name = l.scenario.name.clone();
        let r = run(&l, &[Stage::Observables]).map_err(|e| format!("{name}: {e}"))?;
        let p = r.observables.unwrap().partition;
        ensure(p.betas.len() == 33, || format!("{name}: {} beta points", p.betas.len()))?;
        for (z, parts) in p.total.iter().zip(&p.per_class) {
            let rel = (z - parts.iter().sum::<f64>()).abs() / z.abs();
            worst = worst.max(rel);
            ensure(rel <= 1e-12, || format!("{name}: additivity {rel:e}"))?;
        }
        if name == "z2_circle8" {
            ensure(p.per_class.iter().all(|row| row[1] == 2.0), || {
                format!("twisted Z != 2: {:?}", p.per_class.iter().map(|r| r[1]).collect::<Vec<_>>())
            })?;
        }
    }
    Ok(format!("{} scenarios, relative additivity {worst:.1e}, Z2 twisted = 2", BUNDLED.len()))
}

fn c6_heat() -> Check {
    let betas = log_grid(1e-3, 1e-2, 33);
    let l_max = 2000usize;
    let sphere = ModeBasis::analytic(&DiscreteSpace::<f64>::sphere(l_max), DEFAULT_CLUSTER_TOL).unwrap();
    let table = PartitionTable::build(&sphere, &betas).unwrap();
    // Direct series, plus the Euler-Maclaurin form 1/β + 1/3 + β/15 with
    // an O(β²) remainder and the tail beyond l_max bounded by e^{-β l_max²}/β.
    for (&b, &z) in betas.iter().zip(&table.total) {
        let series: f64 = (0..=l_max as u64)
            .map(|l| (2 * l + 1) as f64 * (-b * (l * (l + 1)) as f64).exp())
            .sum();
        ensure((z - series).abs() <= 1e-10 * series, || format!("beta={b}: Z {z} vs series {series}"))?;
        let tail = (-b * (l_max * l_max) as f64).exp() / b;
        let em = 1.0 / b + 1.0 / 3.0 + b / 15.0;
        ensure((series - em).abs() <= 4.0 * b * b + tail, || {
            format!("beta={b}: series {series} vs expansion {em}")
        })?;
    }
    let fit = heat_fit(&table, 2, (1e-3, 1e-2)).map_err(|e| e.to_string())?;
    let (d1, d0) = ((fit.c_minus1 - 1.0).abs(), (fit.c0 - 1.0 / 3.0).abs());
    ensure(d1 <= 5e-3 && d0 <= 5e-3, || format!("sphere fit c-1={} c0={}", fit.c_minus1, fit.c0))?;

    let torus = ModeBasis::analytic(&DiscreteSpace::<f64>::flat_torus(400), DEFAULT_CLUSTER_TOL).unwrap();
    let tfit = heat_fit(&PartitionTable::build(&torus, &betas).unwrap(), 2, (1e-3, 1e-2))
        .map_err(|e| e.to_string())?;
    ensure(tfit.c0.abs() <= 5e-3, || format!("flat torus c0={}", tfit.c0))?;
    Ok(format!(
        "sphere c-1={:.6} c0={:.6}; flat torus c0={:.1e}",
        fit.c_minus1, fit.c0, tfit.c0
    ))
}

fn c7_smooth_limit() -> Check {
    let trivial = FiniteGroupTable::trivial();
    let mut worst = 0.0f64;
    for l in loaded_all() {
        let name = l.scenario.name.clone();
        let id = GroupAction::identity(1, l.space.point_count());
        let betas = l.beta_grid();
        let r = smooth_limit_compare(&l.space, &trivial, &id, &betas, DEFAULT_CLUSTER_TOL)
            .map_err(|e| format!("{name}: {e}"))?;
        for (p, u) in r.plain.iter().zip(&r.untwisted) {
            let rel = (p - u).abs() / p.abs();
            worst = worst.max(rel);
            ensure(rel <= 1e-12, || format!("{name}: {p} vs {u}"))?;
        }
        if let Some(inv) = &r.invariant {
            for (p, u) in r.plain.iter().zip(inv) {
                ensure((p - u).abs() <= 1e-12 * p.abs(), || format!("{name}: invariant {u} vs {p}"))?;
            }
        }
    }
    Ok(format!("{} spaces, relative difference {worst:.1e}", BUNDLED.len()))
}

fn c8_toy() -> Check {
    let one = Complex::new(1.0, 0.0);
    let zero = Complex::new(0.0, 0.0);
    for n in 0..=32usize {
        let mono = |k: usize| {
            let mut c = vec![zero; n + 1];
            c[k] = one;
            parity_split(&c)
        };
        for i in 0..=n {
            for j in 0..=n {
                let p = toy_product(&mono(i), &mono(j)).unwrap();
                for k in 0..=n {
                    let want = if k == i + j { one } else { zero };
                    ensure(p.coefficient(k) == want, || format!("N={n}: z^{i} z^{j} at z^{k}"))?;
                }
                let (ev, od) = (p.even(), p.odd());
                let parity_ok = if (i + j) % 2 == 0 {
                    od.iter().all(|x| *x == zero)
                } else {
                    ev.iter().all(|x| *x == zero)
                };
                ensure(parity_ok, || format!("N={n}: parity of z^{i} z^{j}"))?;
            }
        }
    }
    for ell in log_grid(1e-4, 1e2, 61) {
        let t = toy_rg(&ParityElement::<f64>::twisted_unit(16), ell).unwrap();
        ensure(t.twisted() == one, || format!("twisted scalar lost at ell={ell}"))?;
    }
    let mut worst = 0.0f64;
    for n in 0..=32 {
        let r = toy_cross_check::<f64>(n, &[], 1e-12).map_err(|e| e.to_string())?;
        worst = worst.max(r.max_deviation);
        ensure(r.passed && r.max_deviation <= 1e-12, || format!("N={n}: deviation {:e}", r.max_deviation))?;
    }
    Ok(format!("parity table exact for N<=32, twisted scalar fixed, cross-check {worst:.1e}"))
}

fn c9_cohomology() -> Check {
    let g = FiniteGroupTable::klein_four();
    let mut cocycles = 0usize;
    for bits in 0u32..(1 << 16) {
        let a = |x: usize, y: usize| (bits >> (x * 4 + y)) & 1;
        let ok = (0..64).all(|t| {
            let (x, y, z) = (t / 16, (t / 4) % 4, t % 4);
            (a(x, y) + a(g.mul(x, y), z)) % 2 == (a(x, g.mul(y, z)) + a(y, z)) % 2
        });
        cocycles += ok as usize;
    }
    let mut boundaries = std::collections::BTreeSet::new();
    for beta in 0u32..16 {
        let b = |x: usize| (beta >> x) & 1;
        let table: Vec<u32> = (0..16)
            .map(|i| (b(i / 4) + b(i % 4) + b(g.mul(i / 4, i % 4))) % 2)
            .collect();
        let cob = TwoCocycle::new(2, 4, table.clone()).map_err(|e| e.to_string())?;
        ensure(validate_cocycle(&g, &cob).map_err(|e| e.to_string())?.passed, || {
            format!("coboundary {beta:04b} failed validation")
        })?;
        boundaries.insert(table);
    }
    let oracle = cocycles / boundaries.len();
    let h2 = h2_brute_force(&g, 2).map_err(|e| e.to_string())?;
    ensure(h2.class_count == oracle, || format!("brute force {} vs oracle {oracle}", h2.class_count))?;
    ensure(h2.has_nontrivial_class(), || "no non-coboundary class".into())?;
    let t = h2_brute_force(&FiniteGroupTable::trivial(), 2).map_err(|e| e.to_string())?;
    ensure(t.class_count == 1, || format!("trivial group: {} classes", t.class_count))?;
    Ok(format!(
        "Z2xZ2: {cocycles} cocycles / {} coboundaries = {oracle} classes; trivial group 1",
        boundaries.len()
    ))
}

fn c10_determinism() -> Check {
    for l in loaded_all() {
        let a = report::to_json(&run(&l, &Stage::ALL).map_err(|e| e.to_string())?).unwrap();
        let b = report::to_json(&run(&l, &Stage::ALL).map_err(|e| e.to_string())?).unwrap();
        ensure(a == b, || format!("{}: reports differ", l.scenario.name))?;
    }
    Ok(format!("{} scenarios byte-identical", BUNDLED.len()))
}

fn main() {
    let checks: [(&str, &str, u64, fn() -> Check); 10] = [
        ("C1", "algebra laws", 5, c1_algebra_laws),
        ("C2", "fusion rules", 5, c2_fusion),
        ("C3", "spectral correctness", 10, c3_spectra),
        ("C4", "RG endomorphism", 10, c4_rg),
        ("C5", "sector partition function", 5, c5_partition),
        ("C6", "heat-trace fit", 10, c6_heat),
        ("C7", "smooth limit", 5, c7_smooth_limit),
        ("C8", "toy model", 5, c8_toy),
        ("C9", "group cohomology", 30, c9_cohomology),
        ("C10", "determinism", 0, c10_determinism),
    ];
    let mut failed = 0;
    for (id, title, budget, f) in checks {
        let t = Instant::now();
        let mut outcome = f();
        let took = t.elapsed();
        if budget > 0 && took > Duration::from_secs(budget) {
            outcome = Err(format!(
                "took {:.2}s, budget {budget}s ({})",
                took.as_secs_f64(),
                outcome.unwrap_or_else(|e| e)
            ));
        }
        let (tag, detail) = match &outcome {
            Ok(d) => ("PASS", d.as_str()),
            Err(d) => {
                failed += 1;
                ("FAIL", d.as_str())
            }
        };
        println!("{tag} {id:<3} {title:<26} {:>7.2}s  {detail}", took.as_secs_f64());
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}

//! End-to-end acceptance run. Prints one `[PASS]` or `[FAIL]` line per
//! criterion and exits non-zero if any fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use num_bigint::BigInt;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use subtree_spectra::analysis::{
    approximate_target_root, regions_for, scan_order, verify_root_free_intervals, ClosureTarget, ScanOptions,
    ScanReport, CROSS_CHECK_MAX_ORDER,
};
use subtree_spectra::cli::main_with_args;
use subtree_spectra::poly_core::ExactPolynomial;
use subtree_spectra::root_solver::{find_roots, global_radius, RegionKind};
use subtree_spectra::subtree_engine::{
    all_local_polynomials, brute_force_polynomial, closed_form, forest_polynomial, local_polynomial,
    max_independent_set, subtree_polynomial,
};
use subtree_spectra::tree_enum::{count_free_trees, enumerate_free_trees, prufer_dedup_oracle, prufer_dedup_oracle_degree_sorted};
use subtree_spectra::tree_model::{FamilySpec, Tree};

const SCAN_MAX: usize = 14;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn criterion_1() -> Outcome {
    let phi = subtree_polynomial(&FamilySpec::Star(4).build().unwrap());
    ensure(phi == ExactPolynomial::from_i64s(&[0, 4, 3, 3, 1]), || format!("polynomial {phi}"))?;
    let rs = find_roots(&phi).map_err(|e| e.to_string())?;
    let c = 3f64.cbrt();
    let s = 3f64.powf(5.0 / 6.0);
    let expected = [
        Complex64::new(0.0, 0.0),
        Complex64::new(-1.0 - c, 0.0),
        Complex64::new(-1.0 + c / 2.0, s / 2.0),
        Complex64::new(-1.0 + c / 2.0, -s / 2.0),
    ];
    let all = rs.all_roots();
    let mut worst: f64 = 0.0;
    for e in expected {
        let d = all.iter().map(|z| (z - e).norm()).fold(f64::INFINITY, f64::min);
        worst = worst.max(d);
    }
    ensure(all.len() == 4 && worst <= 1e-9, || format!("worst root distance {worst:e}"))?;
    Ok(format!("[0, 4, 3, 3, 1]; worst root error {worst:.1e}"))
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let mut trees = 0;
    for n in 1..=10 {
        let count = count_free_trees(n).map_err(|e| e.to_string())?;
        let oracle = if n <= 9 { prufer_dedup_oracle(n) } else { prufer_dedup_oracle_degree_sorted(n) }
            .map_err(|e| e.to_string())?;
        ensure(count == oracle, || format!("n = {n}: generator {count}, oracle {oracle}"))?;
        for (id, t) in enumerate_free_trees(n).map_err(|e| e.to_string())? {
            let brute = brute_force_polynomial(&t).map_err(|e| e.to_string())?;
            ensure(subtree_polynomial(&t) == brute, || format!("n = {n}, tree {id}"))?;
            trees += 1;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < 60.0, || format!("took {secs:.1}s"))?;
    Ok(format!("{trees} trees, n <= 10, {secs:.1}s"))
}

fn criterion_3(scans: &[ScanReport]) -> Outcome {
    let r = global_radius();
    let max = scans.iter().map(|s| s.max_root_modulus).fold(0.0, f64::max);
    ensure(max <= r + 1e-9, || format!("max modulus {max}"))?;
    let hits: Vec<_> = scans.iter().flat_map(|s| s.boundary_hits.iter()).filter(|h| h.region == RegionKind::DiskGlobal).collect();
    let violations: usize = scans.iter().map(|s| s.violation_count(RegionKind::DiskGlobal)).sum();
    ensure(violations == 0, || format!("{violations} roots outside the disk"))?;
    ensure(hits.len() == 1, || format!("{} boundary hits", hits.len()))?;
    let hit = hits[0];
    let tree = enumerate_free_trees(hit.tree.order)
        .unwrap()
        .nth(hit.tree.index)
        .map(|(_, t)| t)
        .unwrap();
    ensure(tree.degree_sequence() == vec![3, 1, 1, 1], || format!("boundary tree {:?}", tree.degree_sequence()))?;
    let trees: u64 = scans.iter().map(|s| s.tree_count).sum();
    Ok(format!("{trees} trees, max |z| = {max:.12}, one boundary root (the claw)"))
}

fn criterion_4(scans: &[ScanReport]) -> Outcome {
    for s in scans {
        let d = s.violation_count(RegionKind::DiskOrderN);
        let a = s.violation_count(RegionKind::AnnulusOrderN);
        ensure(d == 0 && a == 0, || format!("n = {}: {d} order-disk and {a} annulus violations", s.order))?;
    }
    let boundary: usize = scans.iter().map(|s| s.boundary_count(RegionKind::DiskOrderN)).sum();
    Ok(format!("no violations for n <= {SCAN_MAX}; {boundary} roots on order-disk boundaries"))
}

fn criterion_5(scans: &[ScanReport]) -> Outcome {
    let tol = 1e-9;
    let r = global_radius();
    for s in scans {
        for &x in &s.real_roots {
            let slack = tol * x.abs().max(1.0);
            ensure(!(x < -r - slack || (x >= -1.0 + slack && x < -slack) || x > slack), || {
                format!("n = {}: real root {x}", s.order)
            })?;
        }
    }
    let mut checks = 0;
    for n in 2..=SCAN_MAX {
        // 16 samples include -1 and -1/2
        let rep = verify_root_free_intervals(n, 16, None).map_err(|e| e.to_string())?;
        checks += rep.exact_checks;
    }
    Ok(format!("no forbidden real roots; {checks} exact sign checks"))
}

fn identities(t: &Tree) -> Result<(), String> {
    let phi = subtree_polynomial(t);
    let locals = all_local_polynomials(t);
    for (v, local) in locals.iter().enumerate() {
        let direct = local_polynomial(t, v).map_err(|e| e.to_string())?;
        ensure(&direct == local, || format!("rerooted local polynomial differs at {v}"))?;
        let rest = forest_polynomial(&t.delete_vertex(v).map_err(|e| e.to_string())?);
        ensure(local + &rest == phi, || format!("decomposition fails at vertex {v}"))?;
    }
    let sum: ExactPolynomial = locals.iter().sum();
    ensure(sum == phi.derivative().shift_up(1), || "sum of local polynomials".into())
}

fn criterion_6() -> Outcome {
    let mut count = 0;
    for n in 1..=10 {
        for (id, t) in enumerate_free_trees(n).unwrap() {
            identities(&t).map_err(|e| format!("n = {n}, tree {id}: {e}"))?;
            count += 1;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..200 {
        let n = rng.gen_range(1..=16);
        let t = Tree::random(n, &mut rng);
        identities(&t).map_err(|e| format!("random tree of order {n}: {e}"))?;
        count += 1;
    }
    let mut families = 0;
    let mut specs: Vec<FamilySpec> = (1..=16).flat_map(|n| [FamilySpec::Path(n), FamilySpec::Star(n)]).collect();
    specs.extend((1..=9).flat_map(|a| (1..=7).map(move |b| FamilySpec::Spider { a, b })));
    for spec in specs {
        let engine = subtree_polynomial(&spec.build().unwrap());
        ensure(closed_form(&spec).unwrap() == engine, || format!("closed form for {spec}"))?;
        families += 1;
    }
    Ok(format!("{count} trees, {families} family closed forms"))
}

fn criterion_7() -> Outcome {
    let mut count = 0;
    for n in 1..=12 {
        for (id, t) in enumerate_free_trees(n).unwrap() {
            let alpha = -subtree_polynomial(&t).eval_integer(&BigInt::from(-1));
            let dp = BigInt::from(max_independent_set(&t));
            ensure(alpha == dp, || format!("n = {n}, tree {id}: -Phi(-1) = {alpha}, tree program {dp}"))?;
            count += 1;
        }
    }
    Ok(format!("{count} trees"))
}

fn criterion_8() -> Outcome {
    let mut parts = Vec::new();
    for target in [-1.9, -1.5, -1.1] {
        let args = ["subtree-spectra", "closure", "--target", &target.to_string(), "--eps", "1e-2"];
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = main_with_args(args, &mut out, &mut err);
        ensure(code == 0, || format!("closure {target} exited {code}: {}", String::from_utf8_lossy(&err)))?;
        let w = approximate_target_root(ClosureTarget::new(target, 1e-2))
            .map_err(|e| e.to_string())?
            .result
            .unwrap();
        ensure((w.root - target).abs() <= 1e-2, || format!("{target}: root {}", w.root))?;
        if w.order <= CROSS_CHECK_MAX_ORDER {
            let d = w.solver_distance.unwrap();
            ensure(d <= 1e-8, || format!("{target}: solver disagrees by {d:e}"))?;
        }
        let (a, b) = w.legs();
        parts.push(format!("{target} -> spider({a},{b}) root {:.6}", w.root));
    }
    Ok(parts.join("; "))
}

fn criterion_9(scans: &[ScanReport]) -> Outcome {
    let recon = scans.iter().map(|s| s.max_reconstruction_error).fold(0.0, f64::max);
    let pairing = scans.iter().map(|s| s.max_pairing_error).fold(0.0, f64::max);
    let residual = scans.iter().map(|s| s.max_residual).fold(0.0, f64::max);
    ensure(recon <= 1e-8, || format!("reconstruction {recon:e}"))?;
    ensure(pairing <= 1e-10, || format!("pairing {pairing:e}"))?;
    Ok(format!("reconstruction {recon:.1e}, pairing {pairing:.1e}, residual {residual:.1e}"))
}

fn run(label: usize, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
        Err(p
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "panic".into()))
    });
    let secs = start.elapsed().as_secs_f64();
    match outcome {
        Ok(msg) => {
            println!("[PASS] criterion {label}: {msg} ({secs:.2}s)");
            true
        }
        Err(msg) => {
            println!("[FAIL] criterion {label}: {msg} ({secs:.2}s)");
            false
        }
    }
}

fn main() {
    let start = Instant::now();
    let kinds = [RegionKind::DiskGlobal, RegionKind::DiskOrderN, RegionKind::AnnulusOrderN];
    let scans: Vec<ScanReport> = (2..=SCAN_MAX)
        .map(|n| scan_order(n, &regions_for(n, &kinds), &ScanOptions::default()).expect("scan"))
        .collect();
    println!("scanned orders 2..={SCAN_MAX} in {:.2}s", start.elapsed().as_secs_f64());

    let results = [
        run(1, criterion_1),
        run(2, criterion_2),
        run(3, || criterion_3(&scans)),
        run(4, || criterion_4(&scans)),
        run(5, || criterion_5(&scans)),
        run(6, criterion_6),
        run(7, criterion_7),
        run(8, criterion_8),
        run(9, || criterion_9(&scans)),
    ];
    let passed = results.iter().filter(|&&ok| ok).count();
    println!("acceptance: {passed}/{} criteria passed", results.len());
    if passed != results.len() {
        std::process::exit(1);
    }
}

//! Acceptance suite. Runs as a plain binary and prints one line per
//! criterion; exits nonzero if any criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use cubeconn::analysis::{bracket_sets, pm_product_witness, pm_sign_check, Analyzer, CertifiedSets, ScanConfig, Verdict};
use cubeconn::cellset::CellSet;
use cubeconn::chessboard::{exhaustive_verify, randomized_verify, VerifyMode, DEFAULT_ENUM_GUARD};
use cubeconn::field::{Expr, ExprField, ScalarField};
use cubeconn::grid::GridSpec;
use cubeconn::oracle::{compare_with_engine, oracle_intersection_connects};
use cubeconn::synthesis::{build_function, ConnSepSpec, PrescribedSet};
use cubeconn::topology::{connects, separates};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn grid(n: usize, k: usize) -> GridSpec {
    GridSpec::new(n, k).unwrap()
}

fn steinhaus_exhaustive() -> Outcome {
    let start = Instant::now();
    let mut cases = Vec::new();
    for (n, k, expected) in [(2, 2, 16u64), (2, 3, 512), (2, 4, 65536), (3, 2, 6561)] {
        for mode in [VerifyMode::Plain, VerifyMode::Generalized] {
            let r = exhaustive_verify(n, k, mode, DEFAULT_ENUM_GUARD).map_err(|e| e.to_string())?;
            ensure(r.total == expected && r.failures == 0, || {
                format!("n={n} k={k} {mode:?}: {} failures of {} ({:?})", r.failures, r.total, r.failure_samples)
            })?;
            cases.push(r.total);
        }
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(60), || format!("took {elapsed:?}"))?;
    Ok(format!("{} labelings, 0 failures, {:.1}s", cases.iter().sum::<u64>(), elapsed.as_secs_f64()))
}

fn duality_n2() -> Outcome {
    let mut checked = 0;
    for k in [2, 3] {
        let spec = grid(2, k);
        for mask in 0..(1u64 << (k * k)) {
            let s = CellSet::from_mask(spec, mask);
            for (c, sep) in [(1, 2), (2, 1)] {
                let conn = connects(&s, c, 0).unwrap().is_some();
                let separ = separates(&s, sep).unwrap().is_some();
                ensure(conn == separ, || format!("k={k} set {:?}: connects({c}) = {conn}, separates({sep}) = {separ}", s.cells()))?;
            }
            checked += 1;
        }
    }
    Ok(format!("{checked} cell sets, 0 counterexamples"))
}

fn oracle_equivalence() -> Outcome {
    let mut checked = 0;
    for (n, k) in [(2, 1), (2, 2), (2, 3), (3, 2)] {
        let spec = grid(n, k);
        for mask in 0..(1u64 << spec.cell_count()) {
            let s = CellSet::from_mask(spec, mask);
            if let Some(m) = compare_with_engine(&s).map_err(|e| e.to_string())? {
                return Err(format!("n={n} k={k}: {}", m.what));
            }
            checked += 1;
        }
    }
    let spec = grid(3, 3);
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for _ in 0..1000 {
        let density: f64 = rng.gen_range(0.1..0.9);
        let s = CellSet::from_fn(spec, |_| rng.gen_bool(density));
        if let Some(m) = compare_with_engine(&s).map_err(|e| e.to_string())? {
            return Err(format!("n=3 k=3: {}", m.what));
        }
        checked += 1;
    }
    Ok(format!("{checked} cell sets (1000 random at n=3 k=3), 0 mismatches"))
}

fn separator_intersection() -> Outcome {
    let spec = grid(2, 2);
    let mut exhaustive = 0;
    for mask in 0..16u64 {
        let a = CellSet::from_mask(spec, mask);
        for (j, i) in [(1, 2), (2, 1)] {
            if separates(&a, j).unwrap().is_some() {
                exhaustive += 1;
                ensure(connects(&a, i, 0).unwrap().is_some(), || format!("{:?} separates {j} but misses {i}", a.cells()))?;
            }
        }
    }
    let spec = grid(3, 3);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut random = 0;
    let mut attempts = 0;
    let mut cell_level_gaps = 0;
    while random < 1000 {
        attempts += 1;
        ensure(attempts < 200_000, || format!("only {random} separating triples found"))?;
        let sets: Vec<CellSet> = (0..3)
            .map(|_| {
                let density: f64 = rng.gen_range(0.5..0.95);
                CellSet::from_fn(spec, |_| rng.gen_bool(density))
            })
            .collect();
        for i in 1..=3 {
            let others: Vec<usize> = (1..=3).filter(|&j| j != i).collect();
            if others.iter().all(|&j| separates(&sets[j - 1], j).unwrap().is_some()) {
                let pair = [sets[others[0] - 1].clone(), sets[others[1] - 1].clone()];
                ensure(oracle_intersection_connects(&pair, i).unwrap(), || {
                    format!("axis {i}: {:?} and {:?} meet without connecting", pair[0].cells(), pair[1].cells())
                })?;
                let meet = pair[0].intersection(&pair[1]);
                cell_level_gaps += usize::from(connects(&meet, i, 0).unwrap().is_none());
                random += 1;
            }
        }
    }
    Ok(format!("{exhaustive} exhaustive cases at n=2 k=2, {random} random triples at n=3 k=3, all connect \
         ({cell_level_gaps} of them only through faces shared across sets)"))
}

fn level_dichotomy() -> Outcome {
    let r = exhaustive_verify(2, 2, VerifyMode::Level, DEFAULT_ENUM_GUARD).map_err(|e| e.to_string())?;
    ensure(r.total == 81 && r.failures == 0, || format!("exhaustive: {} failures ({:?})", r.failures, r.failure_samples))?;
    let rr = randomized_verify(2, 5, VerifyMode::Level, 5, 10_000).map_err(|e| e.to_string())?;
    ensure(rr.total == 10_000 && rr.failures == 0, || format!("random: {} failures ({:?})", rr.failures, rr.failure_samples))?;
    Ok(format!(
        "{} Lipschitz fields of 81 candidates plus 10000 random at n=2 k=5, all branches verified",
        r.checked
    ))
}

fn synthesis_specs() -> Vec<(&'static str, ConnSepSpec)> {
    use PrescribedSet::{Empty, Interval as Iv, Point};
    let spec = |a: Vec<PrescribedSet>, b: Vec<PrescribedSet>| ConnSepSpec { n: 3, a, b };
    vec![
        ("empty A_1, full intervals", spec(vec![Empty, Iv(0.0, 1.0), Iv(0.0, 1.0)], vec![Iv(0.0, 1.0), Empty, Empty])),
        ("empty A_1, B_1 = A_j", spec(vec![Empty, Iv(0.2, 0.8), Iv(0.2, 0.8)], vec![Iv(0.2, 0.8), Empty, Empty])),
        ("empty A_2", spec(vec![Iv(0.1, 0.9), Empty, Iv(0.3, 0.7)], vec![Empty, Iv(0.35, 0.65), Empty])),
        ("all A = [0,1]", spec(vec![Iv(0.0, 1.0); 3], vec![Empty; 3])),
        ("points and one interval", spec(vec![Point(0.4), Iv(0.1, 0.9), Point(0.4)], vec![Point(0.4), Empty, Point(0.4)])),
        ("three intervals", spec(vec![Iv(0.2, 0.6), Iv(0.4, 0.9), Iv(0.3, 0.5)], vec![Empty; 3])),
    ]
}

fn synthesis_round_trip(scans: &mut Vec<(ConnSepSpec, CertifiedSets)>) -> Outcome {
    let start = Instant::now();
    let mut certified = 0usize;
    for (name, s) in synthesis_specs() {
        let f = build_function(&s).map_err(|e| format!("{name}: {e}"))?;
        let sets = bracket_sets(&f.scalar(), &ScanConfig::new(vec![1, 2, 3], vec![16, 32, 64], 0.01))
            .map_err(|e| format!("{name}: {e}"))?;
        for scan in &sets.scans {
            for lv in &scan.levels {
                for i in 0..3 {
                    let (a, b) = (&s.a[i], &s.b[i]);
                    let checks = [("conn", lv.conn[i], a), ("sep", lv.sep[i], b)];
                    for (what, v, set) in checks {
                        let bad = match v {
                            Verdict::In => !set.contains(lv.p),
                            Verdict::Out => set.contains(lv.p),
                            Verdict::Undetermined => false,
                        };
                        ensure(!bad, || {
                            format!("{name}: k={} level {} {what} axis {} is {v:?} against prescribed {set}", scan.k, lv.p, i + 1)
                        })?;
                        certified += usize::from(v != Verdict::Undetermined);
                    }
                }
            }
        }
        let fine = sets.finest();
        ensure(fine.k == 64, || "finest grid is not 64".into())?;
        let margin = 2.0 / 64.0;
        for i in 0..3 {
            if let PrescribedSet::Interval(lo, hi) = s.b[i] {
                for lv in fine.levels.iter().filter(|lv| lv.p > lo + margin && lv.p < hi - margin) {
                    ensure(lv.sep[i] == Verdict::In, || format!("{name}: level {} in B_{} not sep-certified at k=64", lv.p, i + 1))?;
                }
            }
        }
        ensure(sets.nesting_violations.is_empty(), || format!("{name}: {:?}", sets.nesting_violations))?;
        scans.push((s, sets));
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(300), || format!("took {elapsed:?}"))?;
    Ok(format!(
        "{} specs at k = 16, 32, 64: {certified} certified verdicts, 0 violations, nested, {:.1}s",
        scans.len(),
        elapsed.as_secs_f64()
    ))
}

/// `x_axis − c` plus a small piecewise-linear perturbation in the other
/// coordinates whose total amplitude stays below 0.08.
fn perturbed_coordinate(n: usize, axis: usize, c: f64, rng: Option<&mut ChaCha8Rng>) -> ScalarField {
    let mut terms = vec![Expr::sub(Expr::coord(axis), Expr::constant(c))];
    if let Some(rng) = rng {
        let bumps = rng.gen_range(1..=3);
        for _ in 0..bumps {
            let along = rng.gen_range(1..=n);
            let amp = 0.08 / bumps as f64 * rng.gen_range(0.2..1.0);
            let mut t: Vec<f64> = (0..3).map(|_| rng.gen_range(0.0..1.0)).collect();
            t.sort_by(f64::total_cmp);
            t.dedup();
            let knots = t.into_iter().map(|x| (x, rng.gen_range(-1.0..1.0))).collect();
            terms.push(Expr::Mul { args: vec![Expr::constant(amp), Expr::ramp(Expr::coord(along), knots)] });
        }
    }
    ExprField::new(n, Expr::sum(terms)).unwrap().into()
}

fn pm_product() -> Outcome {
    let mut cases = 0;
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let cs = [0.3, 0.5, 0.7];
    for n in [2usize, 3] {
        let spec = grid(n, 8);
        for i0 in 1..=n {
            let rest: Vec<usize> = (1..=n).filter(|&a| a != i0).collect();
            let sigmas: Vec<Vec<usize>> = if n == 2 { vec![rest.clone()] } else { vec![rest.clone(), vec![rest[1], rest[0]]] };
            for sigma in &sigmas {
                for combo in 0..cs.len().pow(n as u32 - 1) {
                    let shifts: Vec<f64> = (0..n - 1).map(|m| cs[combo / 3usize.pow(m as u32) % 3]).collect();
                    // one plain instance and one perturbed one per combination
                    for perturb in [false, true] {
                        let fields: Vec<ScalarField> = sigma
                            .iter()
                            .zip(&shifts)
                            .map(|(&ax, &c)| perturbed_coordinate(n, ax, c, perturb.then_some(&mut rng)))
                            .collect();
                        check_pm_case(&fields, sigma, i0, spec)?;
                        cases += 1;
                    }
                }
            }
        }
    }
    // top up the perturbed family to at least 100 instances on n = 3
    let spec = grid(3, 8);
    for _ in 0..100 {
        let i0 = rng.gen_range(1..=3);
        let mut sigma: Vec<usize> = (1..=3).filter(|&a| a != i0).collect();
        if rng.gen_bool(0.5) {
            sigma.swap(0, 1);
        }
        let fields: Vec<ScalarField> =
            sigma.iter().map(|&ax| perturbed_coordinate(3, ax, cs[rng.gen_range(0..3)], Some(&mut rng))).collect();
        check_pm_case(&fields, &sigma, i0, spec)?;
        cases += 1;
    }
    Ok(format!("{cases} instances at k=8: sign check, separation certificate and chain all hold"))
}

fn check_pm_case(fields: &[ScalarField], sigma: &[usize], i0: usize, spec: GridSpec) -> Result<(), String> {
    let levels = vec![0.0; fields.len()];
    let mut common = CellSet::full(spec);
    for (f, &ax) in fields.iter().zip(sigma) {
        ensure(pm_sign_check(f, spec, ax, 0.0).unwrap(), || format!("sign check fails on axis {ax}: {f:?}"))?;
        let an = Analyzer::new(f, spec).unwrap();
        ensure(an.certify_sep(0.0, ax).unwrap(), || format!("no separation certificate on axis {ax}: {f:?}"))?;
        common = common.intersection(&an.bracket(0.0).outer);
    }
    let chain = pm_product_witness(fields, &levels, sigma, i0, spec).map_err(|e| e.to_string())?;
    chain.verify(&common).map_err(|e| e.to_string())?;
    ensure(chain.axis == i0, || "chain on the wrong axis".into())
}

fn dichotomy_evidence(scans: &[(ConnSepSpec, CertifiedSets)]) -> Outcome {
    ensure(!scans.is_empty(), || "no synthesized scans available".into())?;
    let mut fields = 0;
    for (s, sets) in scans {
        let nondegenerate = s.a.iter().chain(&s.b).any(|x| matches!(x, PrescribedSet::Interval(..)));
        if !nondegenerate {
            continue;
        }
        fields += 1;
        let fine = sets.finest();
        for i in 0..s.n {
            let hit = fine.levels.iter().any(|lv| lv.conn[i] == Verdict::In || lv.sep[i] == Verdict::In);
            ensure(hit, || format!("spec {s:?}: nothing certified on axis {}", i + 1))?;
        }
    }
    // interval structure was enforced while scanning (a violation aborts the scan)
    Ok(format!("{fields} fields, every axis positively certified at k=64, interval structure holds"))
}

fn run(id: u8, name: &str, f: impl FnOnce() -> Outcome) -> bool {
    let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
        let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
        Err(format!("panic: {}", msg.unwrap_or_default()))
    });
    match &outcome {
        Ok(detail) => println!("criterion {id} {name}: PASS ({detail})"),
        Err(detail) => println!("criterion {id} {name}: FAIL ({detail})"),
    }
    outcome.is_ok()
}

fn main() {
    let mut scans = Vec::new();
    let results = [
        run(1, "steinhaus exhaustive", steinhaus_exhaustive),
        run(2, "n=2 duality", duality_n2),
        run(3, "oracle equivalence", oracle_equivalence),
        run(4, "separator intersection", separator_intersection),
        run(5, "level dichotomy", level_dichotomy),
        run(6, "synthesis round-trip", || synthesis_round_trip(&mut scans)),
        run(7, "product witness", pm_product),
        run(8, "dichotomy evidence", || dichotomy_evidence(&scans)),
    ];
    let passed = results.iter().filter(|&&ok| ok).count();
    println!("acceptance: {passed}/{} criteria passed", results.len());
    if passed != results.len() {
        std::process::exit(1);
    }
}

//! Acceptance suite: one PASS/FAIL line per criterion, with pinned time
//! limits. Run with `cargo test --test acceptance -- --nocapture` to see
//! the lines.

use operadkit::b_construction::{assemble_b_bar, cube_carriers, quotient_b};
use operadkit::classic_models::{
    build_complex, check_axioms, check_corrupted_triangle, Model, ModelId, Structure, DEFAULT_SEED,
};
use operadkit::complexes::{check_refinement, CellComplex, RefinementFailure};
use operadkit::tilde_models::{check_tilde_axioms, MetricTree, TildeModel, TILDE_SAMPLES};
use operadkit::towers::{delooping_ladder, schedule, TowerModel, EXCEPTIONAL_CELLS};
use operadkit::wb_construction::{assemble_wb_bar, quotient_wb, wb_cells};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::HashMap;
use std::process::Command;
use std::time::{Duration, Instant};

const BOUND: usize = 6;

type Check = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn binom(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Planar trees with `n` leaves and `v` inner vertices, each of valence ≥ 3,
/// counted by brute-force recursion over the root's children.
fn planar_trees(n: usize, v: usize, memo: &mut HashMap<(usize, usize), usize>) -> usize {
    if n == 1 && v == 0 {
        return 1;
    }
    if v == 0 || n < 2 {
        return 0;
    }
    if let Some(&c) = memo.get(&(n, v)) {
        return c;
    }
    // Forests of r ≥ 2 trees with n leaves and v − 1 vertices.
    let mut forests: HashMap<(usize, usize, usize), usize> = HashMap::new();
    forests.insert((0, 0, 0), 1);
    let mut total = 0;
    for r in 1..=n {
        for l in 0..=n {
            for w in 0..v {
                let mut c = 0;
                for l1 in 1..=l {
                    for w1 in 0..=w {
                        let prev = *forests.get(&(r - 1, l - l1, w - w1)).unwrap_or(&0);
                        if prev > 0 {
                            c += prev * planar_trees(l1, w1, memo);
                        }
                    }
                }
                if c > 0 {
                    forests.insert((r, l, w), c);
                }
            }
        }
        if r >= 2 {
            total += forests.get(&(r, n, v - 1)).copied().unwrap_or(0);
        }
    }
    memo.insert((n, v), total);
    total
}

fn boundary_squares_to_zero(cx: &CellComplex) -> bool {
    (0..cx.len()).all(|i| {
        let mut parity: HashMap<usize, u32> = HashMap::new();
        for &(j, m) in cx.boundary(i) {
            for &(k, m2) in cx.boundary(j) {
                *parity.entry(k).or_default() += m * m2;
            }
        }
        parity.values().all(|p| p % 2 == 0)
    })
}

fn criterion_1() -> Check {
    let mut memo = HashMap::new();
    for n in 0..=6 {
        let f = build_complex(Model::Triangle, n, BOUND).map_err(|e| e.to_string())?.f_vector().0;
        let want: Vec<usize> = (0..=n).map(|k| binom(n + 1, k + 1)).collect();
        ensure(f == want, || format!("simplex {n}: {f:?} vs {want:?}"))?;
    }
    for n in 1..=6 {
        let f = build_complex(Model::Square, n, BOUND).map_err(|e| e.to_string())?.f_vector().0;
        let m = n - 1;
        let want: Vec<usize> = (0..=m).map(|k| binom(m, k) << (m - k)).collect();
        ensure(f == want, || format!("cube {n}: {f:?} vs {want:?}"))?;
        ensure(f.iter().sum::<usize>() == 3usize.pow(m as u32), || format!("cube {n} total"))?;
    }
    for n in 2..=6 {
        let f = build_complex(Model::Pentagon, n, BOUND).map_err(|e| e.to_string())?.f_vector().0;
        let want: Vec<usize> = (0..=n - 2).map(|d| planar_trees(n, n - 1 - d, &mut memo)).collect();
        ensure(f == want, || format!("associahedron {n}: {f:?} vs {want:?}"))?;
        let catalan = binom(2 * (n - 1), n - 1) / n;
        ensure(f[0] == catalan, || format!("associahedron {n}: {} vertices", f[0]))?;
    }
    Ok("simplex, cube and associahedron f-vectors for n ≤ 6".into())
}

fn criterion_2() -> Check {
    for n in 1..=6 {
        let cx = assemble_wb_bar(n, BOUND).map_err(|e| e.to_string())?;
        let top = cx.cells_of_dim(n).len();
        ensure(top == 1 << (n - 1), || format!("n={n}: {top} top cells"))?;
        ensure(cx.top_dim() == Some(n), || format!("n={n}: top dimension {:?}", cx.top_dim()))?;
    }
    Ok("2^(n-1) prisms of dimension n for n ≤ 6".into())
}

fn criterion_3() -> Check {
    let mut built = 0;
    for n in 1..=5 {
        let complexes = [
            ("Wb□", quotient_wb(n, BOUND).map_err(|e| e.to_string())?),
            ("B̄⟊", assemble_b_bar(n, BOUND).map_err(|e| e.to_string())?),
            ("B⟊", quotient_b(n, BOUND).map_err(|e| e.to_string())?),
        ];
        for (name, cx) in &complexes {
            ensure(boundary_squares_to_zero(cx), || format!("{name}({n}): ∂² ≠ 0"))?;
            ensure(cx.euler_characteristic() == 1, || format!("{name}({n}): χ = {}", cx.euler_characteristic()))?;
            let h = cx.homology_mod2();
            let ok = h.first() == Some(&1) && h.iter().skip(1).all(|&b| b == 0);
            ensure(ok, || format!("{name}({n}): Betti {h:?}"))?;
            built += 1;
        }
        for m in [Model::Triangle, Model::Square, Model::SquareWithUnit, Model::Pentagon] {
            let cx = build_complex(m, n, BOUND).map_err(|e| e.to_string())?;
            ensure(boundary_squares_to_zero(&cx), || format!("{m}({n}): ∂² ≠ 0"))?;
            built += 1;
        }
    }
    Ok(format!("χ = 1, Betti (1,0,…) and ∂² = 0 on {built} complexes"))
}

fn criterion_4() -> Check {
    for n in 1..=4 {
        let wb = quotient_wb(n, BOUND).map_err(|e| e.to_string())?;
        let simplex = build_complex(Model::Triangle, n, BOUND).map_err(|e| e.to_string())?;
        let cells = wb_cells(n);
        check_refinement(&wb, &simplex, |c| cells.get(&c.label).map(|w| w.simplex_face().to_string()))
            .map_err(|e| format!("Wb□({n}) → △({n}): {e}"))?;
        let b = quotient_b(n, BOUND).map_err(|e| e.to_string())?;
        let cube = build_complex(Model::Square, n, BOUND).map_err(|e| e.to_string())?;
        let carriers = cube_carriers(n);
        check_refinement(&b, &cube, |c| carriers.get(&c.label).cloned())
            .map_err(|e| format!("B⟊({n}) → □({n}): {e}"))?;
    }
    Ok("Wb□ → △ and B⟊ → □ refine for n ≤ 4".into())
}

fn criterion_5() -> Check {
    let arity = 5;
    let mut reports = vec![
        check_axioms(ModelId::new(Model::Triangle, Structure::WeakBimodulePositive).unwrap(), arity, TILDE_SAMPLES, DEFAULT_SEED),
        check_axioms(ModelId::new(Model::Triangle, Structure::WeakBimodule).unwrap(), arity, TILDE_SAMPLES, DEFAULT_SEED),
        check_axioms(ModelId::new(Model::Square, Structure::BimodulePositive).unwrap(), arity, TILDE_SAMPLES, DEFAULT_SEED),
        check_axioms(ModelId::new(Model::SquareWithUnit, Structure::Bimodule).unwrap(), arity, TILDE_SAMPLES, DEFAULT_SEED),
        check_axioms(ModelId::new(Model::SquareWithUnit, Structure::BimoduleFull).unwrap(), arity, TILDE_SAMPLES, DEFAULT_SEED),
    ];
    for t in [TildeModel::Triangle, TildeModel::Square, TildeModel::Pentagon] {
        reports.push(check_tilde_axioms(t, arity, TILDE_SAMPLES, Some(DEFAULT_SEED)).expect("algebraic model"));
    }
    let mut instances = 0;
    for r in &reports {
        ensure(r.passed(), || format!("{}: failing {:?}", r.model, r.failing_axioms()))?;
        ensure(r.results.iter().all(|a| a.instances > 0), || format!("{}: an axiom was never instantiated", r.model))?;
        instances += r.total_instances();
    }
    let unit = reports[3].results.iter().chain(&reports[6].results).filter(|a| a.axiom.contains("unit")).count();
    ensure(unit > 0, || "unit law was not checked".into())?;
    Ok(format!("{} suites, {instances} instances, zero failures", reports.len()))
}

fn criterion_6() -> Check {
    let mut checked = 0;
    for model in TowerModel::ALL {
        let s = schedule(model, 6, BOUND).map_err(|e| e.to_string())?;
        let shift = match model {
            TowerModel::TriangleTilde | TowerModel::WbSquareTilde => Some(0),
            TowerModel::SquareTilde | TowerModel::BPentagonTilde => Some(1),
            TowerModel::PentagonTilde => Some(2),
            _ => None,
        };
        let Some(shift) = shift else {
            checked += 1;
            continue;
        };
        for n in shift.max(1)..=6 {
            ensure(s.stage_total(n) == 1 << n, || format!("{model} stage {n}: total {}", s.stage_total(n)))?;
            let recs: Vec<(usize, usize, usize)> = s.at_stage(n).iter().map(|r| (r.degree, r.dim, r.count)).collect();
            let want: Vec<(usize, usize, usize)> = (0..=n).map(|i| (n - i, n + i - shift, binom(n, i))).collect();
            ensure(recs == want, || format!("{model} stage {n}: {recs:?}"))?;
        }
        checked += 1;
    }
    Ok(format!("{checked} schedules equal their censuses up to stage 6"))
}

fn criterion_7() -> Check {
    let r = delooping_ladder(6);
    ensure(r.drops_by_one(), || "a matched cell does not drop by one".into())?;
    let matched: usize = r.steps.iter().map(|s| s.matched.len()).sum();
    ensure(r.unmatched() == EXCEPTIONAL_CELLS.to_vec(), || format!("unmatched {:?}", r.unmatched()))?;
    Ok(format!("{matched} matched pairs drop by one, {} exceptional cells", EXCEPTIONAL_CELLS.len()))
}

fn criterion_8() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(DEFAULT_SEED);
    let mut composite = 0;
    for k in 0..1000 {
        let raw = MetricTree::random_raw(&mut rng, 6, 2, 4);
        let t = raw.normalize();
        ensure(t.normalize() == t, || format!("tree {k}: normalization not idempotent on {t}"))?;
        let mut x = raw.clone();
        loop {
            let next = x.local_moves();
            if next.is_empty() {
                break;
            }
            x = next[rng.gen_range(0..next.len())].clone();
        }
        ensure(x == t, || format!("tree {k}: move order changes the normal form of {raw}"))?;
        if t.is_identity() {
            continue;
        }
        let d = t.prime_decompose().map_err(|e| e.to_string())?;
        ensure(d.recompose() == t, || format!("tree {k}: round trip fails on {t}"))?;
        composite += usize::from(d.components().len() > 1);
    }
    Ok(format!("1000 trees round-trip ({composite} composite)"))
}

fn criterion_9() -> Check {
    let r = check_corrupted_triangle(5, TILDE_SAMPLES, DEFAULT_SEED);
    ensure(r.failing_axioms() == vec!["3".to_string()], || format!("corrupted fixture fails {:?}", r.failing_axioms()))?;
    ensure(r.results.iter().any(|a| a.failures > 0 && a.counterexample.is_some()), || "no counterexample".into())?;
    let wb = quotient_wb(3, BOUND).map_err(|e| e.to_string())?;
    let simplex = build_complex(Model::Triangle, 3, BOUND).map_err(|e| e.to_string())?;
    let vertex = simplex.cell(simplex.cells_of_dim(0)[0]).label.clone();
    let bad = check_refinement(&wb, &simplex, |_| Some(vertex.clone()));
    ensure(matches!(bad, Err(RefinementFailure::DimensionRaised { .. })), || format!("accepted: {bad:?}"))?;
    let bin = env!("CARGO_BIN_EXE_operadkit");
    for args in [
        &["axioms", "--model", "corrupted-triangle"][..],
        &["refine", "--model", "dimension-raising", "--n", "3"][..],
    ] {
        let out = Command::new(bin).args(args).output().map_err(|e| e.to_string())?;
        ensure(out.status.code() == Some(2), || format!("{args:?} exited {:?}", out.status.code()))?;
        let first = String::from_utf8_lossy(&out.stdout).lines().next().unwrap_or("").to_string();
        ensure(first.starts_with("FAIL "), || format!("{args:?} printed {first}"))?;
    }
    Ok("corrupted action fails axiom 3 only; dimension-raising map rejected; exit code 2".into())
}

#[test]
fn acceptance() {
    let criteria: [(fn() -> Check, Duration); 9] = [
        (criterion_1, Duration::from_secs(10)),
        (criterion_2, Duration::from_secs(30)),
        (criterion_3, Duration::from_secs(120)),
        (criterion_4, Duration::from_secs(60)),
        (criterion_5, Duration::from_secs(60)),
        (criterion_6, Duration::from_secs(10)),
        (criterion_7, Duration::from_secs(5)),
        (criterion_8, Duration::from_secs(30)),
        (criterion_9, Duration::from_secs(60)),
    ];
    let mut failed = Vec::new();
    for (i, (check, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let elapsed = start.elapsed();
        let result = match result {
            Ok(msg) if elapsed > *limit => Err(format!("{msg}, but took {elapsed:.2?} (limit {limit:?})")),
            other => other,
        };
        match result {
            Ok(msg) => println!("criterion {}: PASS {msg} [{elapsed:.2?}]", i + 1),
            Err(msg) => {
                println!("criterion {}: FAIL {msg} [{elapsed:.2?}]", i + 1);
                failed.push(i + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
}

//! The twelve acceptance criteria, one PASS/FAIL line each.

use std::collections::BTreeSet;
use std::process::Command;
use std::time::{Duration, Instant};

use gpbg::suite::{run_target, SuiteConfig, Target};
use gpbg_core::board::{echelon_class_bound, partition_classes};
use gpbg_core::forest::build_forest;
use gpbg_core::kernel::{build_kernels, combine_factors, schedule_factor, DimMode, KernelExpr};
use gpbg_core::map::{enumerate_maps, map_count, CollisionMap};

type Outcome = Result<String, String>;

fn ensure(cond: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what())
    }
}

fn enumeration_counts() -> Outcome {
    for k in 1..=3 {
        for n in 1..=6 {
            let expected: usize = (0..n).map(|i| k + i).product();
            let got = enumerate_maps(k, n).map_err(|e| e.to_string())?.len();
            ensure(got == expected && map_count(k, n) == Some(expected as u128), || {
                format!("k={k} n={n}: {got} maps, expected {expected}")
            })?;
        }
    }
    Ok("18 sizes exact".into())
}

fn echelon_bound() -> Outcome {
    let mut worst = 0.0f64;
    for k in 1..=3 {
        for n in 1..=5 {
            let c = partition_classes(k, n).map_err(|e| e.to_string())?.len() as u128;
            let bound = echelon_class_bound(k, n);
            ensure(c <= bound, || format!("k={k} n={n}: {c} classes > {bound}"))?;
            worst = worst.max(c as f64 / bound as f64);
        }
    }
    Ok(format!("max count/bound = {worst:.4}"))
}

fn partition_exactness() -> Outcome {
    for k in 1..=2 {
        for n in 1..=5 {
            let maps = enumerate_maps(k, n).map_err(|e| e.to_string())?;
            let classes = partition_classes(k, n).map_err(|e| e.to_string())?;
            let mut seen = BTreeSet::new();
            for c in &classes {
                ensure(c.has_distinct_permutations(), || {
                    format!("k={k} n={n}: repeated permutation")
                })?;
                for (m, _) in &c.members {
                    ensure(seen.insert(m.clone()), || {
                        format!("k={k} n={n}: {:?} in two classes", m.mu())
                    })?;
                }
            }
            ensure(
                seen.len() == maps.len() && maps.iter().all(|m| seen.contains(m)),
                || format!("k={k} n={n}: {} of {} maps covered", seen.len(), maps.len()),
            )?;
        }
    }
    Ok("k<=2, n<=5 exhaustive".into())
}

fn worked_example() -> Outcome {
    let m = CollisionMap::new(2, vec![1, 2, 3, 3]).map_err(|e| e.to_string())?;
    let forest = build_forest(&m);
    let (t1, t2) = (forest.tree(1), forest.tree(2));
    ensure(t1.internal == [1, 3, 4] && t1.leaves == [1, 3, 5, 6], || {
        format!("tau1 = {t1:?}")
    })?;
    ensure(t2.internal == [2] && t2.leaves == [2, 4], || format!("tau2 = {t2:?}"))?;
    ensure(forest.distinguished_index() == 1, || "tau1 not distinguished".into())?;
    let fk = build_kernels(&forest).map_err(|e| e.to_string())?;
    let counts = |j: usize| -> Vec<usize> { fk.factor(j).theta.iter().rev().map(KernelExpr::len).collect() };
    ensure(counts(1) == [2, 4, 8] && counts(2) == [2], || {
        format!("term counts {:?} {:?}", counts(1), counts(2))
    })?;
    let bounds: Vec<_> = fk
        .factors
        .iter()
        .map(|f| schedule_factor(&fk.arena, f, DimMode::D3Plus))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    let total = combine_factors(&bounds, 2, 4).map_err(|e| e.to_string())?;
    let pretty = total.pretty();
    ensure(pretty == "2^4 (C T^ε)^3 ‖φ‖^12", || {
        format!("scheduler gave {pretty}")
    })?;
    Ok(pretty)
}

fn key_lemma() -> Outcome {
    let mut checked = 0;
    for k in 1..=3 {
        for n in 1..=5 {
            for c in partition_classes(k, n).map_err(|e| e.to_string())? {
                let rep = CollisionMap::from_matrix(&c.representative);
                let fk = build_kernels(&build_forest(&rep)).map_err(|e| e.to_string())?;
                for mode in DimMode::ALL {
                    let bounds: Vec<_> = fk
                        .factors
                        .iter()
                        .map(|f| schedule_factor(&fk.arena, f, mode))
                        .collect::<Result<_, _>>()
                        .map_err(|e| e.to_string())?;
                    let b = combine_factors(&bounds, k, n).map_err(|e| e.to_string())?;
                    ensure(
                        b.time_power as usize == n - 1 && b.phi_power as usize == 2 * (k + n),
                        || format!("{:?} {mode:?}: {}", rep.mu(), b.pretty()),
                    )?;
                    checked += 1;
                }
            }
        }
    }
    Ok(format!("{checked} class/mode pairs"))
}

fn numeric(target: Target) -> Outcome {
    let reports = run_target(target, &SuiteConfig::default()).map_err(|e| e.to_string())?;
    let worst = reports.iter().find(|r| !r.pass);
    match worst {
        Some(r) => Err(r.pretty()),
        None => {
            let summary: Vec<String> = reports
                .iter()
                .filter(|r| !r.check.ends_with("invariance") && r.check != "domain-union")
                .map(|r| format!("{}={:.3e}", r.check, r.value))
                .collect();
            Ok(format!("{} checks; {}", reports.len(), summary.join(", ")))
        }
    }
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut outputs = Vec::new();
    for run in 0..2 {
        let path = dir.path().join(format!("run{run}.json"));
        let status = Command::new(env!("CARGO_BIN_EXE_gpbg"))
            .args(["verify", "all", "--output"])
            .arg(&path)
            .status()
            .map_err(|e| e.to_string())?;
        ensure(status.code() == Some(0), || format!("run {run} exited with {status}"))?;
        outputs.push(std::fs::read(&path).map_err(|e| e.to_string())?);
    }
    ensure(outputs[0] == outputs[1], || "reports differ".into())?;
    Ok(format!("{} identical bytes", outputs[0].len()))
}

type Criterion = (u32, &'static str, Duration, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 12] = [
        (1, "enumeration counts", Duration::from_secs(10), enumeration_counts),
        (2, "echelon class bound", Duration::from_secs(60), echelon_bound),
        (3, "partition exactness", Duration::from_secs(600), partition_exactness),
        (4, "worked example", Duration::from_secs(1), worked_example),
        (5, "key lemma power counting", Duration::from_secs(120), key_lemma),
        (6, "oracle equivalence", Duration::from_secs(30), || {
            numeric(Target::Factorization)
        }),
        (7, "move invariance", Duration::from_secs(600), || {
            numeric(Target::Invariance)
        }),
        (8, "domain-union identity", Duration::from_secs(600), || {
            numeric(Target::DomainUnion)
        }),
        (9, "hierarchy residual", Duration::from_secs(120), || {
            numeric(Target::Hierarchy)
        }),
        (10, "dispersive ratio", Duration::from_secs(30), || {
            numeric(Target::Dispersive)
        }),
        (11, "trilinear ratios", Duration::from_secs(300), || {
            numeric(Target::Trilinear)
        }),
        (12, "determinism", Duration::from_secs(1200), determinism),
    ];
    let mut failed = 0;
    for (id, name, budget, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let (pass, detail) = match outcome {
            Ok(d) if elapsed <= budget => (true, d),
            Ok(d) => (false, format!("{d}; over budget {budget:?}")),
            Err(e) => (false, e),
        };
        failed += usize::from(!pass);
        println!(
            "criterion {id:>2} [{}] {name} ({:.2}s): {detail}",
            if pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64()
        );
    }
    println!("acceptance: {} passed, {failed} failed", 12 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}

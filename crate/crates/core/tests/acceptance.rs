//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Built with `harness = false` so lines print as they finish.

mod common;

use std::io::Write;
use std::time::{Duration, Instant};

use autov_core::autov::{
    autov_search, convergence_smoke, published_operator, EvalConfig, MatrixRow, MetaConfig,
    OperatorMatrix, ParentSetKind, WeightSampling, PUBLISHED_THRESHOLDS,
};
use autov_core::harness::{
    compare, comparison_csv, run_grid, trajectories_csv, with_threads, ExperimentConfig,
    ProblemSpec, RunRecord,
};
use autov_core::invariance::{classify, ClassifyConfig};
use autov_core::numerics::{median, rank_sum_test, RandomStream, Verdict};
use autov_core::operators::{OperatorConfig, OperatorRegistry};
use autov_core::problems::make_benchmark;

use common::*;

const TOL_INVARIANCE: f64 = 1e-9;
const TOL_FORMS: f64 = 1e-8;

struct Outcome {
    passed: bool,
    detail: String,
}

fn line(
    id: &str,
    title: &str,
    elapsed: Duration,
    limit: Option<Duration>,
    outcome: &Outcome,
) -> bool {
    let in_time = limit.is_none_or(|l| elapsed <= l);
    let ok = outcome.passed && in_time;
    let mut out = std::io::stdout().lock();
    let _ = writeln!(
        out,
        "criterion {id}: {} | {title} | {} | {:.1}s {}",
        if ok { "PASS" } else { "FAIL" },
        outcome.detail,
        elapsed.as_secs_f64(),
        limit.map_or("(no limit)".to_string(), |l| format!("of {}s", l.as_secs()))
    );
    let _ = out.flush();
    ok
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let t = Instant::now();
    let v = f();
    (v, t.elapsed())
}

// 1: classify matrix

fn invariance_matrix() -> Outcome {
    // (name, translation, scale, rotation); None = not part of the claim
    let expected: [(&str, bool, bool, Option<bool>); 5] = [
        ("sbx", true, true, Some(false)),
        ("sbx-prime", false, true, Some(false)),
        ("de", true, true, Some(true)),
        ("cmaes", true, true, Some(false)),
        ("fep", true, false, None),
    ];
    let registry = OperatorRegistry::with_builtins();
    let mut mismatches = Vec::new();
    for (name, t, s, r) in expected {
        let op = registry.create(name, &OperatorConfig::default()).unwrap();
        for dim in [2, 10, 30] {
            let mut cfg = ClassifyConfig::new(dim, 50);
            cfg.tolerance = TOL_INVARIANCE;
            let rep = classify(op.as_ref(), &cfg, &RandomStream::new(1000 + dim as u64)).unwrap();
            let got = (
                rep.translation.passed,
                rep.scale.passed,
                rep.rotation.passed,
            );
            if got.0 != t || got.1 != s || r.is_some_and(|r| r != got.2) {
                mismatches.push(format!("{name} D={dim} got {got:?}"));
            }
        }
    }
    Outcome {
        passed: mismatches.is_empty(),
        detail: if mismatches.is_empty() {
            "5 operators x D in {2,10,30} match".into()
        } else {
            mismatches.join("; ")
        },
    }
}

// 2: generic forms

fn form_suite() -> Outcome {
    let mut s = RandomStream::new(2);
    let dim = |s: &mut RandomStream| 1 + s.index(30);
    let (mut t_ok, mut ts_ok, mut tsr_ok, mut neg_ok) = (0, 0, 0, 0);
    for _ in 0..100 {
        let op = random_t_form(&mut s);
        let d = dim(&mut s);
        t_ok += (residuals(&op, d, &mut s).translation < TOL_FORMS) as usize;

        let op = random_ts_form(&mut s);
        let d = dim(&mut s);
        let r = residuals(&op, d, &mut s);
        ts_ok += (r.translation < TOL_FORMS && r.scale < TOL_FORMS) as usize;

        let op = random_tsr_form(&mut s);
        let d = dim(&mut s);
        let r = residuals(&op, d, &mut s);
        tsr_ok +=
            (r.translation < TOL_FORMS && r.scale < TOL_FORMS && r.rotation < TOL_FORMS) as usize;

        let op = random_non_affine_sum(&mut s);
        let d = dim(&mut s);
        neg_ok += (residuals(&op, d, &mut s).translation >= TOL_FORMS) as usize;
    }
    Outcome {
        passed: t_ok == 100 && ts_ok == 100 && tsr_ok == 100 && neg_ok == 100,
        detail: format!("T {t_ok}/100, TS {ts_ok}/100, TSR {tsr_ok}/100, sum!=1 failing translation {neg_ok}/100"),
    }
}

// 3: published operator

fn rastrigin_published(threads: usize) -> (Vec<RunRecord>, Vec<u8>) {
    let cfg = ExperimentConfig {
        problems: vec![ProblemSpec::new("Rastrigin", 30)],
        algorithms: vec!["autov-published".into()],
        population: 100,
        budget: 100 * 101,
        runs: 30,
        seed: 3,
        threads: Some(threads),
        ..Default::default()
    };
    let records = run_grid(&cfg).unwrap();
    let csv = trajectories_csv(&records).unwrap();
    (records, csv)
}

fn published_sanity(records: &[RunRecord]) -> Outcome {
    let m = published_operator();
    let back = OperatorMatrix::from_json(&m.to_json().unwrap()).unwrap();
    let bits =
        |m: &OperatorMatrix| -> Vec<u64> { m.to_genome().iter().map(|v| v.to_bits()).collect() };
    let round_trip = back == m && bits(&back) == bits(&m);

    let printed = [
        0.219, 0.436, 0.644, 0.802, 0.960, 0.992, 0.997, 0.998, 0.999,
    ];
    let thresholds = m.thresholds();
    let thresholds_ok = thresholds.len() == 10
        && printed
            .iter()
            .zip(&thresholds)
            .all(|(p, t)| (p - t).abs() < 1e-12)
        && PUBLISHED_THRESHOLDS
            .iter()
            .zip(&thresholds)
            .all(|(p, t)| (p - t).abs() < 1e-12);
    let text = m.render();
    let conditions_ok = text.contains("if p < 0.219")
        && printed
            .windows(2)
            .all(|w| text.contains(&format!("if {:.3} <= p < {:.3}", w[0], w[1])))
        && text.contains("if p >= 0.999");

    let finals: Vec<f64> = records.iter().map(|r| r.final_best).collect();
    let med = median(&finals).unwrap();
    Outcome {
        passed: round_trip && thresholds_ok && conditions_ok && med <= 30.0,
        detail: format!(
            "round trip {round_trip}, thresholds {thresholds_ok}, branches {conditions_ok}, Rastrigin D=30 median {med:.4e} (need <= 30)"
        ),
    }
}

// 4: direction tests

fn direction_config(
    algorithms: &[&str],
    problems: Vec<ProblemSpec>,
    seed: u64,
    threads: usize,
) -> ExperimentConfig {
    ExperimentConfig {
        problems,
        algorithms: algorithms.iter().map(|a| a.to_string()).collect(),
        population: 100,
        budget: 100 * 101,
        runs: 30,
        seed,
        alpha: 0.05,
        threads: Some(threads),
        ..Default::default()
    }
}

fn finals(records: &[RunRecord], algorithm: &str, problem: &str) -> Vec<f64> {
    records
        .iter()
        .filter(|r| r.algorithm == algorithm && r.problem == problem)
        .map(|r| r.final_best)
        .collect()
}

fn directions(threads: usize) -> (Outcome, Vec<u8>) {
    let mut csv = Vec::new();
    let g = ProblemSpec::new("Griewank", 30).domain(-10.0, 10.0);
    let a = compare(&direction_config(
        &["sbx", "sbx-prime"],
        vec![g.clone(), g.translated(6.0)],
        41,
        threads,
    ))
    .unwrap();
    let a_orig = a.cell(0, 1).marker;
    let a_shift = a.cell(1, 1).marker;
    let a_ok = a_orig == Some(Verdict::Better) && a_shift == Some(Verdict::Worse);
    csv.extend(comparison_csv(&a).unwrap());
    csv.extend(trajectories_csv(&a.records).unwrap());

    let s = ProblemSpec::new("Schwefel2.22", 30)
        .domain(-10.0, 10.0)
        .scaled(10.0);
    let b = compare(&direction_config(&["fep", "cmaes"], vec![s], 42, threads)).unwrap();
    let b_mark = b.cell(0, 1).marker;
    let b_ok = b_mark == Some(Verdict::Better);
    csv.extend(comparison_csv(&b).unwrap());
    csv.extend(trajectories_csv(&b.records).unwrap());

    let r = ProblemSpec::new("Rastrigin", 30).domain(-10.0, 10.0);
    let rot = r.clone().rotated(43);
    // mutation-only DE (CR = 1): binomial crossover works per coordinate and
    // tilts rotated runs a few percent worse
    let mut cfg = direction_config(&["de", "sbx"], vec![r.clone(), rot.clone()], 43, threads);
    cfg.algorithm_config.de_cr = 1.0;
    let records = run_grid(&cfg).unwrap();
    let (plain, turned) = (r.build().unwrap().label(), rot.build().unwrap().label());
    let de = rank_sum_test(
        &finals(&records, "de", &turned),
        &finals(&records, "de", &plain),
        0.05,
    )
    .unwrap();
    let ga = rank_sum_test(
        &finals(&records, "sbx", &turned),
        &finals(&records, "sbx", &plain),
        0.05,
    )
    .unwrap();
    let c_ok = de.decision == Verdict::Similar && ga.decision == Verdict::Worse;
    csv.extend(trajectories_csv(&records).unwrap());

    let mark = |v: Option<Verdict>| v.map(Verdict::marker).unwrap_or("?");
    (
        Outcome {
            passed: a_ok && b_ok && c_ok,
            detail: format!(
                "(a) SBX' vs SBX Griewank {} / translated {}; (b) CMA-ES vs FEP scaled Schwefel 2.22 {}; \
                 (c) mutation-only DE rotated vs original {} (p={:.3}), SBX-GA rotated vs original {} (p={:.2e})",
                mark(a_orig),
                mark(a_shift),
                mark(b_mark),
                de.decision.marker(),
                de.p_value,
                ga.decision.marker(),
                ga.p_value
            ),
        },
        csv,
    )
}

// 5: meta-search smoke

fn meta_config(seed: u64) -> MetaConfig {
    MetaConfig {
        population: 20,
        generations: 50,
        k: 10,
        kind: ParentSetKind::H3,
        sampling: WeightSampling::PerOffspring,
        eval: EvalConfig {
            population: 30,
            generations: 30,
            max_run: 3,
            problem: make_benchmark("Rastrigin", 10).unwrap(),
            seed,
        },
    }
}

fn meta_smoke(threads: usize) -> (Outcome, Vec<u8>) {
    let mut improved = 0;
    let mut monotone = 0;
    let mut records = Vec::new();
    for seed in 1..=10u64 {
        let cfg = meta_config(seed);
        let out = with_threads(Some(threads), || {
            autov_search(&cfg, &RandomStream::new(seed)).unwrap()
        })
        .unwrap();
        improved += (out.best_fitness < out.initial_best()) as usize;
        monotone += out.history.windows(2).all(|w| w[1] <= w[0]) as usize;
        let evals = (cfg.population * (cfg.generations + 1)) as u64;
        records.push(RunRecord::new(
            "autov-search",
            cfg.eval.problem.label(),
            seed,
            evals,
            out.history,
        ));
    }
    (
        Outcome {
            passed: improved >= 9 && monotone == 10,
            detail: format!(
                "improved {improved}/10 (need >= 9), non-increasing history {monotone}/10"
            ),
        },
        trajectories_csv(&records).unwrap(),
    )
}

// 7: rank-sum oracle

fn midrank(pooled: &[f64], v: f64) -> f64 {
    let less = pooled.iter().filter(|x| **x < v).count() as f64;
    let equal = pooled.iter().filter(|x| **x == v).count() as f64;
    less + (equal + 1.0) / 2.0
}

fn permutation_p(a: &[f64], b: &[f64]) -> f64 {
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let ranks: Vec<f64> = pooled.iter().map(|v| midrank(&pooled, *v)).collect();
    let (n, total) = (a.len(), pooled.len());
    let centre = n as f64 * (total as f64 + 1.0) / 2.0;
    let observed = (ranks[..n].iter().sum::<f64>() - centre).abs();
    let (mut extreme, mut all) = (0u64, 0u64);
    for mask in 0u32..(1 << total) {
        if mask.count_ones() as usize == n {
            let w: f64 = (0..total)
                .filter(|i| mask & (1 << i) != 0)
                .map(|i| ranks[i])
                .sum();
            all += 1;
            extreme += ((w - centre).abs() >= observed - 1e-9) as u64;
        }
    }
    extreme as f64 / all as f64
}

fn oracle_decision(a: &[f64], b: &[f64], alpha: f64) -> Verdict {
    if permutation_p(a, b) >= alpha {
        return Verdict::Similar;
    }
    let (ma, mb) = (median(a).unwrap(), median(b).unwrap());
    if ma < mb {
        Verdict::Better
    } else if ma > mb {
        Verdict::Worse
    } else {
        let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
        let ra = a.iter().map(|v| midrank(&pooled, *v)).sum::<f64>() / a.len() as f64;
        let rb = b.iter().map(|v| midrank(&pooled, *v)).sum::<f64>() / b.len() as f64;
        if ra < rb {
            Verdict::Better
        } else if ra > rb {
            Verdict::Worse
        } else {
            Verdict::Similar
        }
    }
}

fn rank_sum_oracle() -> Outcome {
    let mut s = RandomStream::new(7);
    let (mut checked, mut mismatched) = (0, 0);
    for n in 3..=8usize {
        for m in 3..=8usize {
            for case in 0..200 {
                // alternate continuous data, tie-heavy data and shifted samples
                let draw = |s: &mut RandomStream| -> f64 {
                    if case % 2 == 0 {
                        s.gaussian()
                    } else {
                        s.index(6) as f64
                    }
                };
                let shift = if case % 3 == 0 { 2.0 } else { 0.0 };
                let a: Vec<f64> = (0..n).map(|_| draw(&mut s)).collect();
                let b: Vec<f64> = (0..m).map(|_| draw(&mut s) + shift).collect();
                let got = rank_sum_test(&a, &b, 0.05).unwrap();
                checked += 1;
                if got.decision != oracle_decision(&a, &b, 0.05)
                    || (got.p_value - permutation_p(&a, &b)).abs() > 1e-9
                {
                    mismatched += 1;
                }
            }
        }
    }
    Outcome {
        passed: mismatched == 0,
        detail: format!("{checked} datasets over sizes 3..8 x 3..8, {mismatched} mismatches"),
    }
}

// 8: convergence witness

fn convergence_witness() -> Outcome {
    let stream = RandomStream::new(8);
    let de_like = OperatorMatrix::new(
        ParentSetKind::H4,
        vec![MatrixRow::new(vec![0.5, -0.5], vec![0.0, 0.0], 1.0)],
    )
    .unwrap();
    let identity = OperatorMatrix::new(
        ParentSetKind::H3,
        vec![MatrixRow::identity(ParentSetKind::H3, 1.0)],
    )
    .unwrap();
    let p = convergence_smoke(&published_operator(), &stream).unwrap();
    let d = convergence_smoke(&de_like, &stream).unwrap();
    let i = convergence_smoke(&identity, &stream).unwrap();
    Outcome {
        passed: p.passed && d.passed && !i.passed,
        detail: format!(
            "published {}/20, DE-emulating {}/20, identity {}/20 (pass needs >= 18)",
            p.successes, d.successes, i.successes
        ),
    }
}

fn main() {
    let mut all = true;
    let mins = |m: u64| Some(Duration::from_secs(60 * m));

    let (o, t) = timed(invariance_matrix);
    all &= line(
        "1",
        "invariance matrix",
        t,
        Some(Duration::from_secs(10)),
        &o,
    );

    let (o, t) = timed(form_suite);
    all &= line(
        "2",
        "generic form properties",
        t,
        Some(Duration::from_secs(30)),
        &o,
    );

    let ((records, csv3), t) = timed(|| rastrigin_published(8));
    all &= line(
        "3",
        "published operator",
        t,
        mins(2),
        &published_sanity(&records),
    );

    let ((o, csv4), t) = timed(|| directions(8));
    all &= line("4", "direction tests", t, mins(10), &o);

    let ((o, csv5), t) = timed(|| meta_smoke(8));
    all &= line("5", "meta-search smoke", t, mins(15), &o);

    let ((same3, same4, same5), t) = timed(|| {
        let (_, c3) = rastrigin_published(1);
        let (_, c4) = directions(1);
        let (_, c5) = meta_smoke(1);
        (c3 == csv3, c4 == csv4, c5 == csv5)
    });
    let o = Outcome {
        passed: same3 && same4 && same5,
        detail: format!(
            "byte-identical CSV with 1 vs 8 threads: criterion 3 {same3}, 4 {same4}, 5 {same5} ({} + {} + {} bytes)",
            csv3.len(),
            csv4.len(),
            csv5.len()
        ),
    };
    all &= line("6", "determinism", t, None, &o);

    let (o, t) = timed(rank_sum_oracle);
    all &= line("7", "rank-sum oracle", t, None, &o);

    let (o, t) = timed(convergence_witness);
    all &= line("8", "convergence witness", t, None, &o);

    if !all {
        std::process::exit(1);
    }
}

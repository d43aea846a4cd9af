//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use common::{random_connected, rng, LatticeOracle};
use gonlab::bounds::{
    full_report, ramanujan_lambda2, thm11_bound, thm13_bound, thm13_constant, thm14_constant, CheegerConstants,
    ReportBudget,
};
use gonlab::divisor::{fire_set, is_equivalent};
use gonlab::expansion::{b_u_profile, cheeger_profile, CheegerBudget, SeparatorBudget};
use gonlab::gonality::{exact_gonality, SearchBudget};
use gonlab::graph::{pappus, pappus_rings};
use gonlab::randgraph::{sample_for_index, ConfigModelParams, Mode};
use gonlab::reduction::{has_positive_rank, rank_at_least, v_reduce};
use gonlab::spectral::{algebraic_connectivity, spectral_gonality_bound, DEFAULT_TOL};
use gonlab::{Divisor, Multigraph, Rational};
use rand::Rng;
use serde_json::Value;

const LAMBDA2_TOL: f64 = 1e-6;
const SPECTRAL_BOUND: f64 = 5.04;
const SPECTRAL_BOUND_TOL: f64 = 0.01;
const CONSTANT_DECIMALS: i32 = 4;
const SINGLE_THREAD_LIMIT: Duration = Duration::from_secs(600);
const EIGHT_THREAD_LIMIT: Duration = Duration::from_secs(120);
const SANDWICH_LIMIT: Duration = Duration::from_secs(300);
const MIN_CORPUS: usize = 200;
const CORPUS_MAX_N: usize = 10;
const CHEEGER_MAX_N: usize = 16;

type Check = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Check + 'a>);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn r(p: i64, q: i64) -> Rational {
    Rational::new(p, q)
}

fn gonlab_bin(args: &[&str], threads: Option<&str>) -> Result<Vec<u8>, String> {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_gonlab"));
    cmd.args(args).env_remove("GONLAB_THREADS");
    if let Some(t) = threads {
        cmd.args(["--threads", t]);
    }
    let out = cmd.output().map_err(|e| e.to_string())?;
    ensure(out.status.success(), || format!("{args:?} exited with {}", out.status))?;
    Ok(out.stdout)
}

fn in_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(f)
}

fn table() -> Check {
    let raw = gonlab_bin(&["--json", "cheeger", "pappus"], None)?;
    let v: Value = serde_json::from_slice(&raw).map_err(|e| e.to_string())?;
    let rows = v["profile"]["rows"].as_array().ok_or("no profile rows")?;
    let expected = ["3", "2", "5/3", "3/2", "7/5", "1", "1", "1", "7/9"];
    ensure(v["profile"]["kind"] == "exact", || "profile is not exact".into())?;
    let got: Vec<&str> = rows.iter().map(|row| row["h_u"].as_str().unwrap_or("?")).collect();
    ensure(got == expected, || format!("h_u = {got:?}"))?;
    for (j, row) in rows.iter().enumerate() {
        ensure(row["u"] == format!("{}", r(j as i64 + 1, 18)), || format!("row {j} has u = {}", row["u"]))?;
    }
    Ok(format!("h_{{j/18}} = {}", got.join(", ")))
}

fn spectral() -> Check {
    let s = algebraic_connectivity(&pappus(), DEFAULT_TOL).map_err(|e| e.to_string())?;
    let want = 3.0 - 3f64.sqrt();
    ensure((s.lambda2 - want).abs() <= LAMBDA2_TOL, || format!("lambda2 = {}", s.lambda2))?;
    let b = spectral_gonality_bound(&s).map_err(|e| e.to_string())?;
    ensure((b.value - SPECTRAL_BOUND).abs() <= SPECTRAL_BOUND_TOL, || format!("bound = {}", b.value))?;
    ensure(b.ceiling == 6, || format!("ceiling = {}", b.ceiling))?;
    Ok(format!(
        "lambda2 = {:.10} (+/- {:.1e}), bound = {:.4}, certified = {:.4}, ceiling = {}",
        s.lambda2, s.error_bound, b.value, b.certified, b.ceiling
    ))
}

fn grid() -> Check {
    let g = pappus();
    let profile = cheeger_profile(&g, &CheegerBudget::default()).map_err(|e| e.to_string())?;
    let t13 = thm13_bound(&g, &profile).map_err(|e| e.to_string())?;
    ensure(t13.value == r(9, 2) && t13.argmax_u == r(1, 3), || {
        format!("best {} at u = {}", t13.value, t13.argmax_u)
    })?;
    let row = &t13.rows[5];
    ensure(row.u == r(1, 3) && row.row_min == r(9, 2), || format!("row u = 1/3 gives {}", row.row_min))?;
    let certs: Vec<_> = b_u_profile(&g, &SeparatorBudget::default())
        .into_iter()
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    let t11 = thm11_bound(&g, &profile, &certs).map_err(|e| e.to_string())?;
    Ok(format!(
        "h_u/(3+h_u)*n pipeline: {} at u = {}; with exact B_u: {} at u = {}",
        t13.value, t13.argmax_u, t11.value, t11.argmax_u
    ))
}

fn certificate() -> Check {
    let g = pappus();
    let d = Divisor::from_vertices(18, &pappus_rings::MIDDLE);
    ensure(has_positive_rank(&g, &d).map_err(|e| e.to_string())?, || "middle-ring divisor fails".into())?;
    let mut timings = Vec::new();
    for (threads, limit) in [(1, SINGLE_THREAD_LIMIT), (8, EIGHT_THREAD_LIMIT)] {
        let start = Instant::now();
        let cert = in_pool(threads, || exact_gonality(&g, &SearchBudget::default())).map_err(|e| e.to_string())?;
        let took = start.elapsed();
        ensure(cert.value == 6 && cert.exhaustive && cert.cleared_through == 5, || format!("{cert:?}"))?;
        ensure(took <= limit, || format!("{threads} threads took {took:?}"))?;
        timings.push(format!("{threads} thread(s) {:.2?} over {} candidates", took, cert.candidates_checked));
    }
    let raw = gonlab_bin(&["--json", "gonality", "pappus"], None)?;
    let v: Value = serde_json::from_slice(&raw).map_err(|e| e.to_string())?;
    ensure(v["gonality"]["value"] == 6, || format!("binary emitted {}", v["gonality"]["value"]))?;
    Ok(format!("degrees 1..=5 cleared, value 6; {}", timings.join(", ")))
}

fn truncate(x: f64, places: i32) -> f64 {
    let s = 10f64.powi(places);
    (x * s).floor() / s
}

fn constants() -> Check {
    let c = thm13_constant(&CheegerConstants::random_cubic());
    ensure(c == r(4, 55), || format!("cheeger constant {c}"))?;
    let cf = *c.numer() as f64 / *c.denom() as f64;
    ensure(truncate(cf, 3) == 0.072, || format!("{cf}"))?;
    let s = thm14_constant(ramanujan_lambda2(3.0), 3.0);
    ensure(truncate(s, CONSTANT_DECIMALS) == 0.0486, || format!("spectral constant {s}"))?;
    Ok(format!(
        "cheeger per-vertex = {c} = {cf:.6} (0.072 after truncation, 0.0727 rounded); spectral per-vertex = {s:.6}"
    ))
}

fn corpus() -> Vec<(String, Multigraph)> {
    let mut out = Vec::new();
    for k in 2..=4u32 {
        for mode in [Mode::Multigraph, Mode::Simple] {
            let mut taken = 0;
            for n in 3..=CORPUS_MAX_N {
                let p = ConfigModelParams { k, n, seed: 1000 + u64::from(k), mode };
                if p.validate().is_err() {
                    continue;
                }
                for i in 0..12 {
                    let g = sample_for_index(&p, i).unwrap();
                    if g.is_connected() && taken < 30 {
                        out.push((format!("config k={k} n={n} {mode:?} #{i}"), g));
                        taken += 1;
                    }
                }
            }
        }
    }
    let mut rand = rng(2024);
    for i in 0..60 {
        let n = rand.random_range(3..=CORPUS_MAX_N);
        let p = rand.random_range(0.2..0.8);
        out.push((format!("filler #{i}"), random_connected(&mut rand, n, p, i % 3 == 0)));
    }
    out
}

fn sandwich(corpus: &[(String, Multigraph)]) -> Check {
    ensure(corpus.len() >= MIN_CORPUS, || format!("only {} graphs", corpus.len()))?;
    let start = Instant::now();
    let mut violations = Vec::new();
    let mut tight = 0;
    for (name, g) in corpus {
        let rep = full_report(g, &ReportBudget::default()).map_err(|e| format!("{name}: {e}"))?;
        ensure(!rep.partial(), || format!("{name}: budget ran out"))?;
        let gon = exact_gonality(g, &SearchBudget::default()).map_err(|e| format!("{name}: {e}"))?.value as i64;
        let lowers = [
            ("thm11", rep.thm11.computed().map(|b| b.ceiling)),
            ("thm13", rep.thm13.computed().map(|b| b.ceiling)),
            ("thm14", rep.thm14.computed().map(|b| b.ceiling)),
        ];
        for (row, lo) in lowers {
            if let Some(lo) = lo.filter(|&lo| lo > gon) {
                violations.push(format!("{name}: {row} ceiling {lo} > gon {gon}"));
            }
        }
        let upper = rep.genus.value.min(rep.independence.value) as i64;
        if gon > upper {
            violations.push(format!("{name}: gon {gon} > upper {upper}"));
        }
        tight += usize::from(rep.bracket.lower == gon);
    }
    let took = start.elapsed();
    ensure(violations.is_empty(), || violations.join("; "))?;
    ensure(took <= SANDWICH_LIMIT, || format!("took {took:?}"))?;
    Ok(format!("{} graphs, 0 violations, lower bound tight on {tight}, {took:.2?}", corpus.len()))
}

fn reduction(corpus: &[(String, Multigraph)]) -> Check {
    let mut rand = rng(99);
    let mut checks = 0usize;
    let mut equivalent_pairs = 0usize;
    for (name, g) in corpus {
        let n = g.vertex_count();
        let oracle = LatticeOracle::new(g);
        for _ in 0..8 {
            let d = Divisor::from_chips((0..n).map(|_| rand.random_range(-1..=2)).collect());
            let v = rand.random_range(0..n);
            let red = v_reduce(g, &d, v).map_err(|e| e.to_string())?;
            ensure(v_reduce(g, &red, v).ok() == Some(red.clone()), || format!("{name}: not idempotent on {d:?}"))?;
            ensure(oracle.equivalent(red.chips(), d.chips()), || format!("{name}: reduction of {d:?} left its class"))?;

            let set: Vec<usize> = (0..n).filter(|_| rand.random_bool(0.5)).collect();
            let mut other = fire_set(g, &d, &set);
            if rand.random_bool(0.5) {
                let (a, b) = (rand.random_range(0..n), rand.random_range(0..n));
                other.add(a, 1);
                other.add(b, -1);
            }
            let same = oracle.equivalent(d.chips(), other.chips());
            equivalent_pairs += usize::from(same);
            let canon = v_reduce(g, &other, v).map_err(|e| e.to_string())? == red;
            ensure(canon == same && is_equivalent(g, &d, &other) == same, || {
                format!("{name}: {d:?} vs {other:?} oracle says {same}")
            })?;

            if d.degree() <= 6 {
                let pos = has_positive_rank(g, &d).map_err(|e| e.to_string())?;
                let q = rank_at_least(g, &d, 1, u64::MAX).map_err(|e| e.to_string())?;
                ensure(pos == q.holds, || format!("{name}: rank disagreement on {d:?}"))?;
            }
            checks += 1;
        }
    }
    Ok(format!("{checks} divisors on {} graphs ({equivalent_pairs} equivalent pairs), 0 violations", corpus.len()))
}

fn cheeger_inequalities() -> Check {
    let mut count = 0;
    let mut worst_lower = f64::INFINITY;
    let mut worst_upper = f64::INFINITY;
    for k in 2..=4u32 {
        for mode in [Mode::Multigraph, Mode::Simple] {
            for n in 2..=CHEEGER_MAX_N {
                let p = ConfigModelParams { k, n, seed: 7, mode };
                if p.validate().is_err() {
                    continue;
                }
                for i in 0..3 {
                    let g = sample_for_index(&p, i).unwrap();
                    if !g.is_connected() {
                        continue;
                    }
                    let h = cheeger_profile(&g, &CheegerBudget::default()).map_err(|e| e.to_string())?;
                    ensure(h.is_exact(), || "inexact profile".into())?;
                    let h = h.cheeger_constant();
                    let h = *h.numer() as f64 / *h.denom() as f64;
                    let s = algebraic_connectivity(&g, DEFAULT_TOL).map_err(|e| e.to_string())?;
                    let (lo, hi) = s.lambda2_interval();
                    ensure(0.5 * lo <= h, || format!("k={k} n={n} #{i}: lambda2/2 = {} > h = {h}", 0.5 * lo))?;
                    let cap = (2.0 * f64::from(k) * hi).sqrt();
                    ensure(h <= cap, || format!("k={k} n={n} #{i}: h = {h} > {cap}"))?;
                    worst_lower = worst_lower.min(h - 0.5 * lo);
                    worst_upper = worst_upper.min(cap - h);
                    count += 1;
                }
            }
        }
    }
    Ok(format!("{count} regular graphs, 0 violations, smallest slack {worst_lower:.4} / {worst_upper:.4}"))
}

fn determinism() -> Check {
    let args = ["random", "--k", "3", "--n", "100", "--samples", "10", "--seed", "42"];
    let mut json_args = vec!["--json"];
    json_args.extend(args);
    let mut digest = None;
    for a in [&args[..], &json_args[..]] {
        let reference = gonlab_bin(a, None)?;
        for threads in ["1", "2", "8", "1"] {
            let again = gonlab_bin(a, Some(threads))?;
            ensure(again == reference, || format!("output differs with --threads {threads}"))?;
        }
        ensure(gonlab_bin(a, None)? == reference, || "output differs between runs".into())?;
        digest.get_or_insert(reference.len());
    }
    Ok(format!("human and JSON output identical over 6 runs each, threads 1/2/8 ({} bytes)", digest.unwrap()))
}

fn main() -> ExitCode {
    let corpus = corpus();
    let criteria: Vec<Criterion> = vec![
        ("pappus u-cheeger table", Box::new(table)),
        ("pappus spectral bound", Box::new(spectral)),
        ("pappus grid bound at u = 1/3", Box::new(grid)),
        ("pappus gonality certificate", Box::new(certificate)),
        ("constant pipelines", Box::new(constants)),
        ("soundness sandwich", Box::new(|| sandwich(&corpus))),
        ("reduction engine properties", Box::new(|| reduction(&corpus))),
        ("cheeger inequalities", Box::new(cheeger_inequalities)),
        ("determinism", Box::new(determinism)),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or(p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        match result {
            Ok(detail) => println!("PASS {}. {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {}. {name}: {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

//! End-to-end acceptance checks. Runs without the libtest harness so that
//! every criterion prints exactly one `[PASS]` / `[FAIL]` line.

use std::panic::{self, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde_json::Value;
use tempfile::TempDir;

use rip_lab_core::format::serialize_matrix;
use rip_lab_core::{
    binomial, block_compose, block_rip, cholesky_psd, cholesky_reduce, clique_witness, coherence,
    exact_rip, gen_bernoulli_sensing, gen_gnp_half, gen_model_a, gen_model_b, lazy_certify,
    plant_clique, preset, run_distinguishing_experiment, spectral_clique_refuter, sym_eigenvalues,
    verify_violation, DenseMatrix, ExactOptions, ReductionParams, RefuterAnswer, Seed,
    DEFAULT_PSD_TOL,
};

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($msg)+));
        }
    };
}

fn gaussian_unit_columns(rows: usize, cols: usize, seed: u64) -> DenseMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut data: Vec<f64> = (0..rows * cols)
        .map(|_| rng.sample(StandardNormal))
        .collect();
    for j in 0..cols {
        let norm = (0..rows)
            .map(|i| data[i * cols + j].powi(2))
            .sum::<f64>()
            .sqrt();
        for i in 0..rows {
            data[i * cols + j] /= norm;
        }
    }
    DenseMatrix::from_row_major(rows, cols, data).unwrap()
}

fn to_na(m: &DenseMatrix) -> DMatrix<f64> {
    DMatrix::from_row_slice(m.rows(), m.cols(), m.as_slice())
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// `max_T max(σ_max² - 1, 1 - σ_min²)` with singular values from nalgebra.
fn svd_oracle(m: &DenseMatrix, k: usize) -> f64 {
    let full = to_na(m);
    combinations(m.cols(), k)
        .iter()
        .map(|t| {
            let sub = full.select_columns(t.iter());
            let sv = sub.singular_values();
            let smax = sv.max();
            let smin = sv.min();
            (smax * smax - 1.0).max(1.0 - smin * smin)
        })
        .fold(0.0, f64::max)
}

fn sylvester_hadamard(n: usize) -> Vec<Vec<f64>> {
    let mut h = vec![vec![1.0]];
    while h.len() < n {
        let m = h.len();
        let mut next = vec![vec![0.0; 2 * m]; 2 * m];
        for i in 0..m {
            for j in 0..m {
                next[i][j] = h[i][j];
                next[i][j + m] = h[i][j];
                next[i + m][j] = h[i][j];
                next[i + m][j + m] = -h[i][j];
            }
        }
        h = next;
    }
    h
}

/// `[I_n | H_n[:, ..extra] / √n]`, coherence `1/√n`.
fn identity_hadamard(n: usize, extra: usize) -> DenseMatrix {
    let h = sylvester_hadamard(n);
    let s = 1.0 / (n as f64).sqrt();
    DenseMatrix::from_fn(n, n + extra, |i, j| {
        if j < n {
            (i == j) as u8 as f64
        } else {
            h[i][j - n] * s
        }
    })
}

fn cli(args: &[&str]) -> Result<String, String> {
    let o = Command::new(env!("CARGO_BIN_EXE_rip-lab"))
        .args(args)
        .env_remove("RIP_LAB_THREADS")
        .output()
        .map_err(|e| e.to_string())?;
    if !o.status.success() {
        return Err(format!(
            "rip-lab {args:?} exited {:?}: {}",
            o.status.code(),
            String::from_utf8_lossy(&o.stderr)
        ));
    }
    Ok(String::from_utf8(o.stdout).unwrap())
}

fn key(line: &str, k: &str) -> Result<String, String> {
    line.split_whitespace()
        .find_map(|kv| kv.strip_prefix(k).and_then(|r| r.strip_prefix('=')))
        .map(str::to_string)
        .ok_or_else(|| format!("no {k}= in {line:?}"))
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn c1_exact_matches_svd_oracle() -> Outcome {
    let mut worst = 0.0f64;
    for seed in 0..50 {
        let m = gaussian_unit_columns(6, 12, seed);
        let (report, _) = exact_rip(&m, 3).map_err(|e| e.to_string())?;
        ensure!(
            report.subsets_examined == 220,
            "seed {seed}: {} subsets",
            report.subsets_examined
        );
        let oracle = svd_oracle(&m, 3);
        let diff = (report.value - oracle).abs();
        worst = worst.max(diff);
        ensure!(
            diff <= 1e-9,
            "seed {seed}: exact {} vs oracle {oracle}",
            report.value
        );
    }
    Ok(format!("50 matrices 6x12, k=3, max |diff| = {worst:.1e}"))
}

fn c2_order_two_is_coherence() -> Outcome {
    let mut worst = 0.0f64;
    for seed in 0..100 {
        let m = gaussian_unit_columns(6, 10, 1000 + seed);
        let (report, _) = exact_rip(&m, 2).map_err(|e| e.to_string())?;
        let mu = coherence(&m).map_err(|e| e.to_string())?;
        let diff = (report.value - mu).abs();
        worst = worst.max(diff);
        ensure!(
            diff <= 1e-10,
            "seed {seed}: delta_2 {} vs mu {mu}",
            report.value
        );
    }
    Ok(format!(
        "100 matrices 6x10, max |delta_2 - mu| = {worst:.1e}"
    ))
}

fn c3_order_lifting_bound() -> Outcome {
    let mut tightest = f64::INFINITY;
    for seed in 0..100 {
        let m = gaussian_unit_columns(8, 16, 2000 + seed);
        let mut delta = [0.0f64; 5];
        for (k, slot) in delta.iter_mut().enumerate().skip(2) {
            *slot = exact_rip(&m, k).map_err(|e| e.to_string())?.0.value;
        }
        for mm in 2..=4usize {
            for k in mm..=4usize {
                let bound = delta[mm] * (k - 1) as f64 / (mm - 1) as f64;
                ensure!(
                    delta[k] <= bound + 1e-12,
                    "seed {seed}: delta_{k} = {} > eps_{mm}(k-1)/(m-1) = {bound}",
                    delta[k]
                );
                if k > mm {
                    tightest = tightest.min(bound - delta[k]);
                }
            }
        }
    }
    Ok(format!(
        "100 matrices 8x16, 2<=m<=k<=4, zero violations, min slack {tightest:.3}"
    ))
}

fn c4_block_diagonal_law() -> Outcome {
    let mut worst = 0.0f64;
    for seed in 0..50 {
        let a = gaussian_unit_columns(4, 6, 3000 + 2 * seed);
        let b = gaussian_unit_columns(4, 6, 3001 + 2 * seed);
        let composed = block_compose(&a, &b);
        for k in [2, 3] {
            let whole = exact_rip(&composed, k).map_err(|e| e.to_string())?.0.value;
            let parts = svd_oracle(&a, k).max(svd_oracle(&b, k));
            let via_blocks = block_rip(&a, &b, k, &ExactOptions::default())
                .map_err(|e| e.to_string())?
                .0
                .value;
            let diff = (whole - parts).abs().max((via_blocks - whole).abs());
            worst = worst.max(diff);
            ensure!(
                diff <= 1e-10,
                "seed {seed} k={k}: composed {whole} vs max of blocks {parts}"
            );
        }
    }
    Ok(format!(
        "50 block pairs 4x6, k=2,3, max |diff| = {worst:.1e}"
    ))
}

fn c5_clique_witness_identity() -> Outcome {
    let (n, t, c, delta) = (200usize, 14usize, 0.3, 0.2);
    let expected = 1.0 + c * (t - 1) as f64 / (n as f64).sqrt();
    let params = ReductionParams::with_c(c);
    let mut nonzero = 0;
    let mut worst = 0.0f64;
    for seed in 0..20 {
        let seed = Seed::new(5000 + seed);
        let base = gen_gnp_half(n, seed).map_err(|e| e.to_string())?;
        let inst = plant_clique(&base, t, seed).map_err(|e| e.to_string())?;
        let cm = cholesky_reduce(&inst.graph, &params).map_err(|e| e.to_string())?;
        let w = clique_witness(&inst.graph, &inst.planted).map_err(|e| e.to_string())?;
        if !cm.is_zero() {
            nonzero += 1;
            let image = to_na(&cm) * DVector::from_vec(w.vector.clone());
            let diff = (image.norm_squared() - expected).abs();
            worst = worst.max(diff);
            ensure!(
                diff <= 1e-8,
                "||Cx||^2 = {} vs {expected}",
                image.norm_squared()
            );
        }
        let check = verify_violation(&cm, &w, delta, n, c).map_err(|e| e.to_string())?;
        ensure!(
            check.violates,
            "planted trial not flagged at delta = {delta}"
        );
    }
    let mut cfg = preset("desk-200").unwrap();
    cfg.trials = 20;
    cfg.base_seed = Seed::new(5);
    let report = run_distinguishing_experiment(&cfg).map_err(|e| e.to_string())?;
    let s = &report.separation;
    ensure!(
        s.true_positives == s.planted_trials && s.planted_trials == 20,
        "experiment flagged {}/{} planted trials",
        s.true_positives,
        s.planted_trials
    );
    Ok(format!(
        "{nonzero}/20 nonzero C(G), ||Cx||^2 = {expected:.5} within {worst:.1e}; 20/20 planted flagged"
    ))
}

fn c6_null_arm_concentration() -> Outcome {
    let n = 400usize;
    let limit = 3.0 * (n as f64).sqrt();
    let (mut psd, mut below, mut max_lambda) = (0, 0, 0.0f64);
    for seed in 0..20 {
        let seed = Seed::new(6000 + seed);
        let a = gen_model_a(n, seed).map_err(|e| e.to_string())?;
        let lambda1 = sym_eigenvalues(&a).map_err(|e| e.to_string())?.largest();
        max_lambda = max_lambda.max(lambda1);
        if lambda1 < limit {
            below += 1;
        }
        let b = gen_model_b(n, 0.3, seed).map_err(|e| e.to_string())?;
        if cholesky_psd(&b, DEFAULT_PSD_TOL)
            .map_err(|e| e.to_string())?
            .is_psd()
        {
            psd += 1;
        }
        if seed.value == 6000 {
            let oracle = SymmetricEigen::new(to_na(&a)).eigenvalues.max();
            ensure!(
                (oracle - lambda1).abs() <= 1e-9 * oracle.abs().max(1.0),
                "lambda1 {lambda1} vs nalgebra {oracle}"
            );
        }
    }
    ensure!(psd >= 18, "B PSD in only {psd}/20 trials");
    ensure!(
        below >= 18,
        "lambda_1 < 3 sqrt(n) in only {below}/20 trials"
    );
    Ok(format!(
        "n=400: PSD {psd}/20, lambda_1 < 60 in {below}/20 (max {max_lambda:.2})"
    ))
}

fn c7_spectral_refuter() -> Outcome {
    let (n, k) = (200usize, 35usize);
    let mut null_no = 0;
    for seed in 0..100 {
        let g = gen_gnp_half(n, Seed::new(7000 + seed)).map_err(|e| e.to_string())?;
        if spectral_clique_refuter(&g, k).map_err(|e| e.to_string())? == RefuterAnswer::NoClique {
            null_no += 1;
        }
    }
    let mut planted_yes = 0;
    for seed in 0..100 {
        let seed = Seed::new(7500 + seed);
        let base = gen_gnp_half(n, seed).map_err(|e| e.to_string())?;
        let inst = plant_clique(&base, k, seed).map_err(|e| e.to_string())?;
        if spectral_clique_refuter(&inst.graph, k).map_err(|e| e.to_string())? == RefuterAnswer::Yes
        {
            planted_yes += 1;
        }
    }
    ensure!(null_no >= 95, "no-clique on only {null_no}/100 null graphs");
    ensure!(
        planted_yes == 100,
        "yes on only {planted_yes}/100 planted graphs"
    );
    Ok(format!(
        "null no-clique {null_no}/100, planted yes {planted_yes}/100"
    ))
}

fn c8_lazy_consistency() -> Outcome {
    let dir = TempDir::new().unwrap();
    let delta = 0.5;
    let mut ks = Vec::new();
    for seed in 0..20u64 {
        let path = dir.path().join(format!("b{seed}.txt"));
        let s = (8000 + seed).to_string();
        cli(&[
            "generate",
            "bernoulli",
            "--dims",
            "64",
            "256",
            "--seed",
            &s,
            "--out",
            p(&path),
        ])?;
        let mu: f64 = key(cli(&["coherence", "--matrix", p(&path)])?.trim(), "mu")?
            .parse()
            .unwrap();
        let out = cli(&[
            "lazy",
            "--matrix",
            p(&path),
            "--probe-order",
            "2",
            "--delta",
            "0.5",
        ])?;
        let k_max: usize = key(out.trim(), "k_max")?.parse().unwrap();
        let expected = if mu > delta {
            0
        } else {
            (((delta / mu).floor() as usize) + 1).min(64)
        };
        ensure!(
            k_max == expected,
            "seed {seed}: k_max {k_max}, floor(delta/mu)+1 = {expected} (mu {mu})"
        );
        ks.push(k_max);
    }

    // Exhaustive check of soundness at the certified order.
    let mut small = Vec::new();
    let mut instances: Vec<DenseMatrix> = (0..10)
        .map(|s| gen_bernoulli_sensing(16, 24, Seed::new(8100 + s)).unwrap())
        .collect();
    instances.push(identity_hadamard(16, 8));
    for m in &instances {
        let (cert, _) = lazy_certify(m, 2, delta).map_err(|e| e.to_string())?;
        let k = cert.max_certified_order;
        if k >= 2 {
            let exact = exact_rip(m, k).map_err(|e| e.to_string())?.0.value;
            ensure!(
                exact <= delta + 1e-9,
                "16x24: exact delta_{k} = {exact} > {delta}"
            );
        }
        small.push(k);
    }
    let max_small = *small.iter().max().unwrap();
    ensure!(
        max_small >= 3,
        "no 16x24 instance certified beyond order 2: {small:?}"
    );
    Ok(format!(
        "64x256 k_max = {ks:?}; 16x24 certified orders {small:?} all sound"
    ))
}

fn c9_determinism() -> Outcome {
    let dir = TempDir::new().unwrap();
    let d = |name: &str| dir.path().join(name);
    let mut sections = Vec::new();
    for run in 0..2 {
        let g = d(&format!("g{run}.txt"));
        let m = d(&format!("m{run}.txt"));
        let reports: Vec<_> = (0..4).map(|i| d(&format!("r{run}_{i}.json"))).collect();
        cli(&[
            "generate",
            "planted",
            "--n",
            "200",
            "--t",
            "14",
            "--seed",
            "9",
            "--out",
            p(&g),
            "--report",
            p(&reports[0]),
        ])?;
        cli(&[
            "generate",
            "bernoulli",
            "--dims",
            "12",
            "24",
            "--seed",
            "9",
            "--out",
            p(&m),
        ])?;
        cli(&[
            "exact",
            "--matrix",
            p(&m),
            "--order",
            "3",
            "--out",
            p(&reports[1]),
        ])?;
        cli(&[
            "lazy",
            "--matrix",
            p(&m),
            "--probe-order",
            "2",
            "--delta",
            "0.9",
            "--out",
            p(&reports[2]),
        ])?;
        let threads = if run == 0 { "1" } else { "4" };
        let o = Command::new(env!("CARGO_BIN_EXE_rip-lab"))
            .args([
                "experiment",
                "--preset",
                "desk-200",
                "--seed",
                "9",
                "--trials",
                "4",
                "--out",
                p(&reports[3]),
            ])
            .env("RIP_LAB_THREADS", threads)
            .output()
            .map_err(|e| e.to_string())?;
        ensure!(o.status.success(), "experiment failed");
        let mut s: Vec<String> = reports
            .iter()
            .map(|r| read_json(r)["results"].to_string())
            .collect();
        s.push(std::fs::read_to_string(&g).unwrap());
        s.push(std::fs::read_to_string(&m).unwrap());
        sections.push(s);
    }
    ensure!(
        sections[0] == sections[1],
        "results sections differ between runs"
    );

    // Frozen outputs shared by every platform.
    let g = d("pinned.txt");
    cli(&["generate", "gnp", "--n", "4", "--seed", "0", "--out", p(&g)])?;
    ensure!(
        std::fs::read_to_string(&g).unwrap() == "4 3\n0 2\n0 3\n1 2\n",
        "gnp n=4 seed 0 drifted"
    );
    let line = cli(&[
        "generate",
        "planted",
        "--n",
        "200",
        "--t",
        "14",
        "--seed",
        "9",
        "--out",
        p(&g),
    ])?;
    ensure!(
        line.trim() == PINNED_PLANTED,
        "planted clique drifted: {line:?}"
    );
    Ok(
        "two runs byte-identical (threads 1 vs 4 for the experiment); pinned outputs unchanged"
            .into(),
    )
}

const PINNED_PLANTED: &str = "clique: 9 12 31 41 62 64 73 86 105 125 161 165 178 181";

fn c10_enumeration_savings() -> Outcome {
    let dir = TempDir::new().unwrap();
    let mut lines = Vec::new();
    let mut instances = Vec::new();
    for seed in 0..3u64 {
        let path = dir.path().join(format!("b{seed}.txt"));
        let s = (10_000 + seed).to_string();
        cli(&[
            "generate",
            "bernoulli",
            "--dims",
            "32",
            "64",
            "--seed",
            &s,
            "--out",
            p(&path),
        ])?;
        instances.push((format!("bernoulli seed {s}"), path));
    }
    let hadamard = dir.path().join("ih.txt");
    std::fs::write(&hadamard, serialize_matrix(&identity_hadamard(32, 32))).unwrap();
    instances.push(("[I | H/sqrt32]".into(), hadamard));

    let mut saw_large = false;
    for (name, path) in &instances {
        let report = dir.path().join("lazy.json");
        cli(&[
            "lazy",
            "--matrix",
            p(path),
            "--probe-order",
            "2",
            "--delta",
            "0.9",
            "--out",
            p(&report),
        ])?;
        let r = read_json(&report);
        let cert = &r["results"]["certificate"];
        let probe = cert["probe_subsets"].to_string();
        ensure!(probe == "2016", "{name}: probe_subsets = {probe}");
        ensure!(
            r["results"]["report"]["subsets_examined"].as_u64() == Some(2016),
            "{name}: subsets_examined differs from C(64,2)"
        );
        let k_max = cert["max_certified_order"].as_u64().unwrap() as usize;
        if k_max >= 2 {
            let naive = cert["naive_subsets"].to_string();
            ensure!(
                naive == binomial(64, k_max).unwrap().to_string(),
                "{name}: naive_subsets = {naive}"
            );
            let ratio: f64 = naive.parse::<f64>().unwrap() / 2016.0;
            if k_max >= 5 {
                saw_large = true;
                ensure!(ratio > 1e3, "{name}: k_max {k_max} but ratio {ratio}");
            }
            lines.push(format!("{name}: k_max={k_max} ratio={ratio:.0}"));
        } else {
            lines.push(format!("{name}: k_max=0"));
        }
    }
    ensure!(saw_large, "no instance reached k_max >= 5: {lines:?}");
    Ok(lines.join("; "))
}

struct Criterion {
    id: &'static str,
    limit: Duration,
    run: fn() -> Outcome,
}

fn main() {
    // Forwarded libtest flags (e.g. `--list`, filters) are accepted and
    // ignored; `--list` reports nothing so the target stays discoverable.
    if std::env::args().any(|a| a == "--list") {
        return;
    }
    let criteria = [
        Criterion {
            id: "C1 exact RIP vs SVD oracle",
            limit: Duration::from_secs(10),
            run: c1_exact_matches_svd_oracle,
        },
        Criterion {
            id: "C2 order-2 RIP equals coherence",
            limit: Duration::from_secs(5),
            run: c2_order_two_is_coherence,
        },
        Criterion {
            id: "C3 order lifting bound",
            limit: Duration::from_secs(60),
            run: c3_order_lifting_bound,
        },
        Criterion {
            id: "C4 block-diagonal RIP",
            limit: Duration::from_secs(30),
            run: c4_block_diagonal_law,
        },
        Criterion {
            id: "C5 clique witness identity",
            limit: Duration::from_secs(60),
            run: c5_clique_witness_identity,
        },
        Criterion {
            id: "C6 null-arm concentration",
            limit: Duration::from_secs(120),
            run: c6_null_arm_concentration,
        },
        Criterion {
            id: "C7 spectral refuter",
            limit: Duration::from_secs(120),
            run: c7_spectral_refuter,
        },
        Criterion {
            id: "C8 lazy certification consistency",
            limit: Duration::from_secs(60),
            run: c8_lazy_consistency,
        },
        Criterion {
            id: "C9 determinism",
            limit: Duration::from_secs(60),
            run: c9_determinism,
        },
        Criterion {
            id: "C10 lazy vs naive enumeration count",
            limit: Duration::from_secs(10),
            run: c10_enumeration_savings,
        },
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for c in &criteria {
        let start = Instant::now();
        let result = panic::catch_unwind(AssertUnwindSafe(c.run)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let elapsed = start.elapsed();
        let result = match result {
            Ok(detail) if elapsed >= c.limit => {
                Err(format!("{detail}; took {elapsed:.2?}, limit {:?}", c.limit))
            }
            other => other,
        };
        match result {
            Ok(detail) => println!("[PASS] {} ({elapsed:.2?} < {:?}): {detail}", c.id, c.limit),
            Err(why) => {
                failed += 1;
                println!("[FAIL] {} ({elapsed:.2?}): {why}", c.id);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}

//! Distinguishing experiments: random graphs versus graphs with a planted
//! clique, pushed through the Cholesky reduction.
//!
//! The planted arm is decided with the known clique witness and is always
//! flagged when `δ < c(t-1)/√n`. The null arm has no witness; it is decided
//! by a configurable statistic, either the spectral refuter or exact
//! enumeration with early exit for small instances.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::linalg::{self, norm_sq};
use crate::models::{gen_bernoulli_sensing, gen_gnp_half, plant_clique};
use crate::reduction::{
    cholesky_reduce_detailed, clique_witness, signed_adjacency, spectral_clique_refuter_detailed,
    verify_violation, ReductionParams, RefuterAnswer,
};
use crate::rip::{block_compose, exact_rip_with, Direction, ExactOptions, DEFAULT_BUDGET};
use crate::rng::{label, Seed};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NullStatistic {
    /// `λ_1(A) >= k - 1` means "possible clique", reported as a violation.
    SpectralRefuter,
    /// Exact RIP parameter of order `k` with early exit at `δ`.
    Exact,
}

/// Rectangular variant: `diag(C(G), B_n)` with `B_n` an `n × extra_cols`
/// Bernoulli sensing matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RectSpec {
    pub extra_cols: usize,
}

impl RectSpec {
    /// Total shape `2n × aspect·n`, i.e. `extra_cols = (aspect - 1) n`.
    pub fn with_aspect(n: usize, aspect: usize) -> Result<Self> {
        if aspect < 2 {
            return Err(invalid(format!(
                "aspect ratio must be at least 2, got {aspect}"
            )));
        }
        Ok(Self {
            extra_cols: (aspect - 1) * n,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub n: usize,
    pub clique_size: usize,
    pub k: usize,
    pub delta: f64,
    pub params: ReductionParams,
    pub trials: usize,
    pub base_seed: Seed,
    pub rect: Option<RectSpec>,
    pub null_statistic: NullStatistic,
    pub budget: u128,
}

impl ExperimentConfig {
    pub fn new(n: usize, clique_size: usize, k: usize, delta: f64) -> Self {
        Self {
            n,
            clique_size,
            k,
            delta,
            params: ReductionParams::default(),
            trials: 20,
            base_seed: Seed::new(0),
            rect: None,
            null_statistic: NullStatistic::SpectralRefuter,
            budget: DEFAULT_BUDGET,
        }
    }

    /// Support of the planted-arm witness: a `min(k, t)`-subset of the clique.
    pub fn witness_support(&self) -> usize {
        self.k.min(self.clique_size)
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if self.n < 2 {
            return Err(invalid(format!("n must be at least 2, got {}", self.n)));
        }
        if self.clique_size < 2 || self.clique_size > self.n {
            return Err(invalid(format!(
                "clique size must be in 2..={}, got {}",
                self.n, self.clique_size
            )));
        }
        if self.k < 2 || self.k > self.n {
            return Err(invalid(format!(
                "order k must be in 2..={}, got {}",
                self.n, self.k
            )));
        }
        if self.trials == 0 {
            return Err(invalid("need at least one trial"));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(invalid(format!(
                "delta must lie in (0, 1), got {}",
                self.delta
            )));
        }
        let reach = self.params.clique_deviation(self.n, self.witness_support());
        if self.delta >= reach {
            return Err(invalid(format!(
                "delta = {} is not below c(t-1)/sqrt(n) = {reach}; the planted arm would not be guaranteed to violate",
                self.delta
            )));
        }
        Ok(())
    }

    pub fn matrix_shape(&self) -> (usize, usize) {
        match self.rect {
            None => (self.n, self.n),
            Some(r) => (2 * self.n, self.n + r.extra_cols),
        }
    }
}

/// Named desk-scale configurations.
pub const PRESET_NAMES: &[&str] = &["desk-200", "desk-200-k35", "desk-400"];

/// Looks up a named preset. Trials and seed keep their defaults.
pub fn preset(name: &str) -> Option<ExperimentConfig> {
    match name {
        // k = t = 14 ≈ √200; witness deviation 0.3·13/√200 ≈ 0.276.
        "desk-200" => Some(ExperimentConfig::new(200, 14, 14, 0.2)),
        // k = 35 > 2√200, where the spectral refuter separates the arms.
        "desk-200-k35" => Some(ExperimentConfig::new(200, 35, 35, 0.5)),
        // Witness deviation 0.3·19/20 = 0.285.
        "desk-400" => Some(ExperimentConfig::new(400, 20, 20, 0.2)),
        _ => None,
    }
}

/// Exponent-driven parameters: clique size `n^{1/2-ε}`, order
/// `n^{(1-2ε)(1-ε)}` and violation parameter `n^{-ε}/4`.
///
/// At desk scale `n^{-ε}/4` can exceed the actual clique deviation
/// `c(t-1)/√n`, so `δ` is capped at 90% of the latter. The resulting run
/// demonstrates the mechanism, not the asymptotic regime.
pub fn exponent_preset(n: usize, epsilon: f64) -> Result<ExperimentConfig> {
    if !(epsilon > 0.0 && epsilon < 0.5) {
        return Err(invalid(format!(
            "epsilon must lie in (0, 1/2), got {epsilon}"
        )));
    }
    let nf = n as f64;
    let t = nf.powf(0.5 - epsilon).floor().max(2.0) as usize;
    let k = (nf.powf((1.0 - 2.0 * epsilon) * (1.0 - epsilon)).floor() as usize).clamp(t, n);
    let params = ReductionParams::default();
    let reach = params.clique_deviation(n, t);
    let delta = (nf.powf(-epsilon) / 4.0).min(0.9 * reach);
    Ok(ExperimentConfig::new(n, t, k, delta))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Arm {
    Null,
    Planted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Decision {
    ViolatesRip,
    RipPlausible,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub seed: Seed,
    pub arm: Arm,
    /// Planted arm: `||C'x||² - 1` for the clique witness. Null arm:
    /// `λ_1(A)` (spectral) or the RIP value found (exact).
    pub statistic: f64,
    pub decision: Decision,
    pub psd: bool,
    /// Planted vertices, planted arm only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub planted: Option<Vec<usize>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Separation {
    pub planted_trials: usize,
    pub null_trials: usize,
    /// Planted-arm trials flagged as violating.
    pub true_positives: usize,
    /// Null-arm trials flagged as violating.
    pub false_positives: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub n: usize,
    pub k: usize,
    pub clique_size: usize,
    pub c: f64,
    pub delta: f64,
    /// Threshold of the null statistic: `k - 1` for the refuter, `δ` for
    /// exact enumeration.
    pub threshold: f64,
    pub null_statistic: NullStatistic,
    pub matrix_rows: usize,
    pub matrix_cols: usize,
    pub trials: Vec<TrialRecord>,
    pub separation: Separation,
}

fn trial_seed(base: Seed, trial: usize, arm: Arm) -> Seed {
    let arm_bit = match arm {
        Arm::Null => 0,
        Arm::Planted => 1,
    };
    base.derive(label::TRIAL, 2 * trial as u64 + arm_bit)
}

/// Runs `trials` independent (null, planted) pairs. The report is
/// identical for any number of worker threads.
pub fn run_distinguishing_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let (rows, cols) = cfg.matrix_shape();
    let records: Vec<Result<[TrialRecord; 2]>> = (0..cfg.trials)
        .into_par_iter()
        .map(|trial| Ok([run_null(cfg, trial)?, run_planted(cfg, trial)?]))
        .collect();
    let mut trials = Vec::with_capacity(2 * cfg.trials);
    for pair in records {
        trials.extend(pair?);
    }
    let flagged = |arm: Arm| {
        trials
            .iter()
            .filter(|t| t.arm == arm && t.decision == Decision::ViolatesRip)
            .count()
    };
    let separation = Separation {
        planted_trials: cfg.trials,
        null_trials: cfg.trials,
        true_positives: flagged(Arm::Planted),
        false_positives: flagged(Arm::Null),
    };
    Ok(ExperimentReport {
        n: cfg.n,
        k: cfg.k,
        clique_size: cfg.clique_size,
        c: cfg.params.c,
        delta: cfg.delta,
        threshold: match cfg.null_statistic {
            NullStatistic::SpectralRefuter => (cfg.k - 1) as f64,
            NullStatistic::Exact => cfg.delta,
        },
        null_statistic: cfg.null_statistic,
        matrix_rows: rows,
        matrix_cols: cols,
        trials,
        separation,
    })
}

fn sensing_block(cfg: &ExperimentConfig, seed: Seed) -> Result<Option<linalg::DenseMatrix>> {
    cfg.rect
        .map(|r| gen_bernoulli_sensing(cfg.n, r.extra_cols, seed.derive(label::SENSING_BLOCK, 0)))
        .transpose()
}

fn run_planted(cfg: &ExperimentConfig, trial: usize) -> Result<TrialRecord> {
    let seed = trial_seed(cfg.base_seed, trial, Arm::Planted);
    let base = gen_gnp_half(cfg.n, seed)?;
    let inst = plant_clique(&base, cfg.clique_size, seed)?;
    let support = inst.planted.truncated(cfg.witness_support())?;
    let witness = clique_witness(&inst.graph, &support)?;
    let reduction = cholesky_reduce_detailed(&inst.graph, &cfg.params)?;
    let check = verify_violation(&reduction.matrix, &witness, cfg.delta, cfg.n, cfg.params.c)?;

    let deviation = match sensing_block(cfg, seed)? {
        None => check.deviation,
        Some(b) => {
            let composed = block_compose(&reduction.matrix, &b);
            let mut x = witness.vector.clone();
            x.resize(composed.cols(), 0.0);
            let image = composed.mul_vec(&x)?;
            (norm_sq(&image) - 1.0).abs()
        }
    };
    Ok(TrialRecord {
        trial,
        seed,
        arm: Arm::Planted,
        statistic: deviation,
        decision: if deviation > cfg.delta {
            Decision::ViolatesRip
        } else {
            Decision::RipPlausible
        },
        psd: reduction.psd,
        planted: Some(inst.planted.indices().to_vec()),
    })
}

fn run_null(cfg: &ExperimentConfig, trial: usize) -> Result<TrialRecord> {
    let seed = trial_seed(cfg.base_seed, trial, Arm::Null);
    let g = gen_gnp_half(cfg.n, seed)?;
    let (statistic, decision, psd) = match cfg.null_statistic {
        NullStatistic::SpectralRefuter => {
            // The refuter reads the graph; for the PSD flag only the sign of the
            // smallest eigenvalue of B matters, which follows from λ_min(A).
            let a = signed_adjacency(&g)?;
            let spectrum = linalg::sym_eigenvalues(&a)?;
            let scale = cfg.params.c / (cfg.n as f64).sqrt();
            let psd = 1.0 + scale * spectrum.smallest() >= -cfg.params.psd_tol;
            let refuted = spectral_clique_refuter_detailed(&g, cfg.k)?;
            let decision = if !psd || refuted.answer == RefuterAnswer::Yes {
                Decision::ViolatesRip
            } else {
                Decision::RipPlausible
            };
            (refuted.lambda_max, decision, psd)
        }
        NullStatistic::Exact => {
            let reduction = cholesky_reduce_detailed(&g, &cfg.params)?;
            let opts = ExactOptions {
                budget: cfg.budget,
                threshold: Some(cfg.delta),
            };
            let matrix = match sensing_block(cfg, seed)? {
                None => reduction.matrix,
                Some(b) => block_compose(&reduction.matrix, &b),
            };
            let (report, _) = exact_rip_with(&matrix, cfg.k, &opts)?;
            let decision = if !reduction.psd || report.direction == Direction::LowerBound {
                Decision::ViolatesRip
            } else {
                Decision::RipPlausible
            };
            (report.value, decision, reduction.psd)
        }
    };
    Ok(TrialRecord {
        trial,
        seed,
        arm: Arm::Null,
        statistic,
        decision,
        psd,
        planted: None,
    })
}

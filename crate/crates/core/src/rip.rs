//! Restricted isometry parameters: exact computation by subset
//! enumeration, the coherence bound, order lifting, lazy certification and
//! block-diagonal composition.
//!
//! For a column subset `T`, `δ_T = max |λ - 1|` over the eigenvalues `λ` of
//! the Gram matrix `Φ_Tᵀ Φ_T`. The RIP parameter of order `k` is the
//! maximum of `δ_T` over all `|T| = k`.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::combinatorics::{binomial, next_combination, unrank_combination, IndexSubset};
use crate::error::{invalid, Error, Result};
use crate::linalg::{self, gram_of_columns, norm_sq, DenseMatrix, EigenScratch};

/// Default cap on the number of subsets [`exact_rip`] will enumerate.
pub const DEFAULT_BUDGET: u128 = 100_000_000;

/// Column-norm tolerance for unit-column checks.
pub const UNIT_COLUMN_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    ExactMax,
    UpperBound,
    LowerBound,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Exhaustive,
    Lazy,
    #[serde(rename = "witness-lb")]
    WitnessLB,
    BlockCompose,
}

/// Outcome of a certification run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RipReport {
    pub order: usize,
    pub value: f64,
    pub direction: Direction,
    pub method: Method,
    pub subsets_examined: u128,
    /// Wall-clock time; excluded from serialized results so that reports
    /// are reproducible byte for byte.
    #[serde(skip)]
    pub elapsed_ns: u64,
}

/// A sparse unit vector together with the deviation it achieves.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub subset: IndexSubset,
    /// Full-length vector, zero outside `subset`.
    pub vector: Vec<f64>,
    /// `| ||Φx||² - 1 |`.
    pub deviation: f64,
}

impl Witness {
    /// Builds a witness for `phi` from a vector supported on `subset`,
    /// measuring the deviation directly.
    pub fn measure(phi: &DenseMatrix, subset: IndexSubset, vector: Vec<f64>) -> Result<Self> {
        if vector.len() != phi.cols() {
            return Err(invalid("witness length does not match column count"));
        }
        if vector
            .iter()
            .enumerate()
            .any(|(i, &v)| v != 0.0 && !subset.contains(i))
        {
            return Err(invalid("witness vector not supported on its subset"));
        }
        let image = phi.mul_vec(&vector)?;
        let deviation = (norm_sq(&image) - 1.0).abs();
        Ok(Self {
            subset,
            vector,
            deviation,
        })
    }

    /// Report stating the RIP parameter of order `order` is at least the
    /// achieved deviation. Requires `order >= |support|`.
    pub fn lower_bound_report(&self, order: usize) -> Result<RipReport> {
        if order < self.subset.len() {
            return Err(invalid(format!(
                "witness with support {} cannot bound order {order}",
                self.subset.len()
            )));
        }
        Ok(RipReport {
            order,
            value: self.deviation,
            direction: Direction::LowerBound,
            method: Method::WitnessLB,
            subsets_examined: 1,
            elapsed_ns: 0,
        })
    }
}

/// Result of the lazy certification algorithm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LazyCertificate {
    /// `m`.
    pub probe_order: usize,
    /// `ε`, the exact RIP parameter at the probe order.
    pub probe_parameter: f64,
    /// `δ`.
    pub target_parameter: f64,
    /// Largest certified order, 0 when none.
    pub max_certified_order: usize,
    /// `C(N, m)`, what the probe enumerated.
    pub probe_subsets: u128,
    /// `C(N, k_max)`, what exhaustive search at the certified order would
    /// enumerate. `None` when nothing is certified or it overflows.
    pub naive_subsets: Option<u128>,
}

impl LazyCertificate {
    /// `naive_subsets / probe_subsets`.
    pub fn enumeration_savings(&self) -> Option<f64> {
        self.naive_subsets
            .map(|naive| naive as f64 / self.probe_subsets as f64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactOptions {
    pub budget: u128,
    /// Stop at the first subset (lexicographic order) whose deviation
    /// exceeds this value and report a lower bound.
    pub threshold: Option<f64>,
}

impl Default for ExactOptions {
    fn default() -> Self {
        Self {
            budget: DEFAULT_BUDGET,
            threshold: None,
        }
    }
}

/// True iff every column norm lies in `[1 - tol, 1 + tol]`.
pub fn validate_unit_columns(phi: &DenseMatrix, tol: f64) -> bool {
    first_non_unit_column(phi, tol).is_none()
}

fn first_non_unit_column(phi: &DenseMatrix, tol: f64) -> Option<(usize, f64)> {
    (0..phi.cols())
        .map(|j| (j, phi.column_norm(j)))
        .find(|&(_, norm)| !((1.0 - tol..=1.0 + tol).contains(&norm)))
}

/// `max_{i≠j} |⟨u_i, u_j⟩|` over the columns of `phi`.
pub fn coherence(phi: &DenseMatrix) -> Result<f64> {
    let n = phi.cols();
    if n < 2 {
        return Err(invalid("coherence needs at least two columns"));
    }
    let g = ColumnGram::new(phi);
    let mut mu = 0.0f64;
    for i in 0..n {
        for j in i + 1..n {
            mu = mu.max(g.get(i, j).abs());
        }
    }
    Ok(mu)
}

/// `δ_T` for one column subset.
pub fn subset_deviation(phi: &DenseMatrix, subset: &IndexSubset) -> Result<f64> {
    subset.check_bound(phi.cols())?;
    let sub = phi.select_columns(subset.indices())?;
    linalg::spectral_deviation_from_identity(&linalg::gram(&sub))
}

/// Full Gram matrix of the columns, computed once and shared by workers.
struct ColumnGram {
    n: usize,
    data: Vec<f64>,
}

impl ColumnGram {
    fn new(phi: &DenseMatrix) -> Self {
        let cols: Vec<Vec<f64>> = (0..phi.cols()).map(|j| phi.column(j)).collect();
        let g = gram_of_columns(&cols);
        Self {
            n: phi.cols(),
            data: g.as_slice().to_vec(),
        }
    }

    #[inline]
    fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    fn deviation(&self, subset: &[usize], scratch: &mut EigenScratch) -> Result<f64> {
        let k = subset.len();
        let values = scratch.eigenvalues_of(k, |buf| {
            for (a, &i) in subset.iter().enumerate() {
                for (b, &j) in subset.iter().enumerate() {
                    buf[a * k + b] = self.get(i, j);
                }
            }
        })?;
        let hi = values[0];
        let lo = values[k - 1];
        Ok((hi - 1.0).abs().max((1.0 - lo).abs()))
    }
}

/// Best subset of one enumeration chunk.
#[derive(Debug, Clone)]
struct ChunkBest {
    value: f64,
    rank: u128,
    subset: Vec<usize>,
}

enum ChunkOutcome {
    Max(ChunkBest),
    /// First subset in the chunk exceeding the threshold.
    Violation(ChunkBest),
    /// Abandoned because an earlier chunk already found a violation.
    Abandoned,
}

fn better(a: ChunkBest, b: ChunkBest) -> ChunkBest {
    // Larger value wins; ties go to the lexicographically smaller subset.
    match a.value.total_cmp(&b.value) {
        std::cmp::Ordering::Greater => a,
        std::cmp::Ordering::Less => b,
        std::cmp::Ordering::Equal => {
            if a.rank <= b.rank {
                a
            } else {
                b
            }
        }
    }
}

/// Exact RIP parameter of order `k` with the default budget.
pub fn exact_rip(phi: &DenseMatrix, k: usize) -> Result<(RipReport, Witness)> {
    exact_rip_with(phi, k, &ExactOptions::default())
}

/// Exact RIP parameter of order `k` by enumeration of all `C(N, k)` column
/// subsets, in parallel over contiguous rank ranges.
///
/// The result does not depend on the number of worker threads: the
/// maximum is reduced with a total order (value, then smallest rank), and
/// with a threshold the reported violation is always the first one in
/// lexicographic order.
pub fn exact_rip_with(
    phi: &DenseMatrix,
    k: usize,
    opts: &ExactOptions,
) -> Result<(RipReport, Witness)> {
    let start = Instant::now();
    let big_n = phi.cols();
    if k == 0 || k > big_n {
        return Err(invalid(format!("order k = {k} must be in 1..={big_n}")));
    }
    let total = binomial(big_n, k);
    match total {
        Some(t) if t <= opts.budget => {}
        _ => {
            return Err(Error::BudgetExceeded {
                n: big_n,
                k,
                subsets: total,
                budget: opts.budget,
            })
        }
    }
    let total = total.expect("checked above");
    let gram = ColumnGram::new(phi);

    let workers = rayon::current_num_threads().max(1) as u128;
    let chunks = total.min(workers * 16).max(1);
    let chunk_len = total.div_ceil(chunks);
    let chunks = total.div_ceil(chunk_len) as usize;
    let first_violation = AtomicUsize::new(usize::MAX);

    let outcomes: Vec<Result<ChunkOutcome>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let lo = c as u128 * chunk_len;
            let hi = (lo + chunk_len).min(total);
            let mut combo = unrank_combination(big_n, k, lo)?;
            let mut scratch = EigenScratch::default();
            let mut best: Option<ChunkBest> = None;
            let mut rank = lo;
            while rank < hi {
                if opts.threshold.is_some()
                    && (rank - lo).is_multiple_of(1024)
                    && first_violation.load(Ordering::Relaxed) < c
                {
                    return Ok(ChunkOutcome::Abandoned);
                }
                let value = gram.deviation(&combo, &mut scratch)?;
                if let Some(th) = opts.threshold {
                    if value > th {
                        first_violation.fetch_min(c, Ordering::Relaxed);
                        return Ok(ChunkOutcome::Violation(ChunkBest {
                            value,
                            rank,
                            subset: combo,
                        }));
                    }
                }
                let improves = best.as_ref().is_none_or(|b| value > b.value);
                if improves {
                    best = Some(ChunkBest {
                        value,
                        rank,
                        subset: combo.clone(),
                    });
                }
                rank += 1;
                if rank < hi {
                    next_combination(&mut combo, big_n);
                }
            }
            Ok(ChunkOutcome::Max(best.expect("chunks are nonempty")))
        })
        .collect();

    let mut violation: Option<ChunkBest> = None;
    let mut max: Option<ChunkBest> = None;
    for outcome in outcomes {
        match outcome? {
            ChunkOutcome::Violation(v) => {
                if violation.as_ref().is_none_or(|w| v.rank < w.rank) {
                    violation = Some(v);
                }
            }
            ChunkOutcome::Max(b) => {
                max = Some(match max {
                    None => b,
                    Some(cur) => better(cur, b),
                });
            }
            ChunkOutcome::Abandoned => {}
        }
    }

    let (best, direction, examined) = match violation {
        Some(v) => {
            let examined = v.rank + 1;
            (v, Direction::LowerBound, examined)
        }
        None => (max.expect("at least one chunk"), Direction::ExactMax, total),
    };
    let witness = subset_witness(phi, &best.subset)?;
    let report = RipReport {
        order: k,
        value: best.value,
        direction,
        method: Method::Exhaustive,
        subsets_examined: examined,
        elapsed_ns: start.elapsed().as_nanos() as u64,
    };
    Ok((report, witness))
}

/// Extremal eigenvector of `Φ_Tᵀ Φ_T`, embedded as a full-length vector.
fn subset_witness(phi: &DenseMatrix, subset: &[usize]) -> Result<Witness> {
    let sub = phi.select_columns(subset)?;
    let eig = linalg::sym_eigen(&linalg::gram(&sub))?;
    let last = eig.values.len() - 1;
    let pick = if (eig.values[0] - 1.0).abs() >= (1.0 - eig.values[last]).abs() {
        0
    } else {
        last
    };
    let coeffs = eig.vector(pick);
    let norm = norm_sq(&coeffs).sqrt();
    let mut vector = vec![0.0; phi.cols()];
    for (&i, c) in subset.iter().zip(&coeffs) {
        vector[i] = c / norm;
    }
    Witness::measure(phi, IndexSubset::new(subset.to_vec())?, vector)
}

/// `ε (k - 1) / (m - 1)`: an order-`m` parameter lifted to order `k`.
pub fn lift_order(eps: f64, m: usize, k: usize) -> Result<f64> {
    if m < 2 || k < m {
        return Err(invalid(format!(
            "lift_order needs 2 <= m <= k, got m = {m}, k = {k}"
        )));
    }
    if !(eps >= 0.0 && eps.is_finite()) {
        return Err(invalid(format!(
            "parameter must be finite and >= 0, got {eps}"
        )));
    }
    if k == m {
        return Ok(eps);
    }
    Ok(eps * (k - 1) as f64 / (m - 1) as f64)
}

/// Lazy certification: compute the exact parameter `ε` at the probe order
/// `m`, then certify every order `k >= m` with `ε (k-1)/(m-1) <= δ`, capped
/// at `min(rows, cols)`.
pub fn lazy_certify(
    phi: &DenseMatrix,
    m: usize,
    delta: f64,
) -> Result<(LazyCertificate, RipReport)> {
    lazy_certify_with(phi, m, delta, DEFAULT_BUDGET)
}

pub fn lazy_certify_with(
    phi: &DenseMatrix,
    m: usize,
    delta: f64,
    budget: u128,
) -> Result<(LazyCertificate, RipReport)> {
    let start = Instant::now();
    if let Some((column, norm)) = first_non_unit_column(phi, UNIT_COLUMN_TOL) {
        return Err(Error::NotUnitColumns {
            column,
            norm,
            tol: UNIT_COLUMN_TOL,
        });
    }
    let cap = phi.rows().min(phi.cols());
    if m < 2 || m > cap {
        return Err(invalid(format!("probe order m = {m} must be in 2..={cap}")));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(invalid(format!("delta must lie in (0, 1), got {delta}")));
    }
    let opts = ExactOptions {
        budget,
        threshold: None,
    };
    let (probe, _) = exact_rip_with(phi, m, &opts)?;
    let eps = probe.value;
    let k_max = certified_order(eps, m, delta, cap)?;

    let probe_subsets = probe.subsets_examined;
    let cert = LazyCertificate {
        probe_order: m,
        probe_parameter: eps,
        target_parameter: delta,
        max_certified_order: k_max,
        probe_subsets,
        naive_subsets: if k_max > 0 {
            binomial(phi.cols(), k_max)
        } else {
            None
        },
    };
    let report = if k_max == 0 {
        RipReport {
            order: m,
            value: eps,
            direction: Direction::ExactMax,
            method: Method::Lazy,
            subsets_examined: probe_subsets,
            elapsed_ns: start.elapsed().as_nanos() as u64,
        }
    } else {
        RipReport {
            order: k_max,
            value: lift_order(eps, m, k_max)?,
            direction: Direction::UpperBound,
            method: Method::Lazy,
            subsets_examined: probe_subsets,
            elapsed_ns: start.elapsed().as_nanos() as u64,
        }
    };
    Ok((cert, report))
}

/// Relative slack on `lift_order(..) <= δ`, so that representation error
/// in decimal inputs (`0.05 · 6` rounds above `0.3`) does not cost an order.
const LIFT_REL_SLACK: f64 = 8.0 * f64::EPSILON;

/// Largest `k` in `m..=cap` with `lift_order(eps, m, k) <= delta`, or 0.
fn certified_order(eps: f64, m: usize, delta: f64, cap: usize) -> Result<usize> {
    if eps > delta {
        return Ok(0);
    }
    if eps == 0.0 {
        return Ok(cap);
    }
    let bound = delta * (1.0 + LIFT_REL_SLACK);
    let guess = (delta * (m - 1) as f64 / eps).floor() + 1.0;
    let mut k = if guess >= cap as f64 {
        cap
    } else {
        (guess as usize).max(m)
    };
    // The closed form can be off by one under rounding; settle on the
    // inequality itself.
    while k > m && lift_order(eps, m, k)? > bound {
        k -= 1;
    }
    while k < cap && lift_order(eps, m, k + 1)? <= bound {
        k += 1;
    }
    Ok(k)
}

/// `δ √(m n / (c ln(e N / m)))`, the order the lazy algorithm is expected to
/// certify on an `n × N` Bernoulli matrix, up to the unspecified absolute
/// constant `c_abs`.
pub fn predicted_certified_order(
    m: usize,
    n: usize,
    big_n: usize,
    delta: f64,
    c_abs: f64,
) -> Result<f64> {
    if m < 1 || big_n < m || n < 1 {
        return Err(invalid(format!(
            "need m >= 1, n >= 1, N >= m; got m = {m}, n = {n}, N = {big_n}"
        )));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(invalid(format!("delta must lie in (0, 1), got {delta}")));
    }
    if !(c_abs > 0.0 && c_abs.is_finite()) {
        return Err(invalid(format!(
            "absolute constant must be > 0, got {c_abs}"
        )));
    }
    let log_term = (std::f64::consts::E * big_n as f64 / m as f64).ln();
    Ok(delta * ((m * n) as f64 / (c_abs * log_term)).sqrt())
}

/// Probe order `⌈(ln N)³⌉` of the quasi-polynomial parameter choice.
pub fn quasi_polynomial_probe_order(big_n: usize) -> usize {
    (big_n as f64).ln().powi(3).ceil() as usize
}

/// Block-diagonal `diag(A, B)`.
pub fn block_compose(a: &DenseMatrix, b: &DenseMatrix) -> DenseMatrix {
    let (ra, ca) = (a.rows(), a.cols());
    DenseMatrix::from_fn(ra + b.rows(), ca + b.cols(), |i, j| {
        match (i < ra, j < ca) {
            (true, true) => a.get(i, j),
            (false, false) => b.get(i - ra, j - ca),
            _ => 0.0,
        }
    })
}

/// RIP parameter of `diag(A, B)` at order `k` as the larger of the two
/// blocks' exact parameters. Both blocks need at least `k` columns. The
/// witness is expressed in the coordinates of the composed matrix.
pub fn block_rip(
    a: &DenseMatrix,
    b: &DenseMatrix,
    k: usize,
    opts: &ExactOptions,
) -> Result<(RipReport, Witness)> {
    let start = Instant::now();
    if k > a.cols() || k > b.cols() {
        return Err(invalid(format!(
            "both blocks need at least k = {k} columns, got {} and {}",
            a.cols(),
            b.cols()
        )));
    }
    let (ra, wa) = exact_rip_with(a, k, opts)?;
    let (rb, wb) = exact_rip_with(b, k, opts)?;
    let composed = block_compose(a, b);
    let ca = a.cols();
    let lower_bound =
        ra.direction == Direction::LowerBound || rb.direction == Direction::LowerBound;
    let (value, witness) = if rb.value > ra.value {
        let mut vector = vec![0.0; ca];
        vector.extend_from_slice(&wb.vector);
        let subset = IndexSubset::new(wb.subset.indices().iter().map(|i| i + ca).collect())?;
        (rb.value, Witness::measure(&composed, subset, vector)?)
    } else {
        let mut vector = wa.vector.clone();
        vector.resize(ca + b.cols(), 0.0);
        (
            ra.value,
            Witness::measure(&composed, wa.subset.clone(), vector)?,
        )
    };
    let report = RipReport {
        order: k,
        value,
        direction: if lower_bound {
            Direction::LowerBound
        } else {
            Direction::ExactMax
        },
        method: Method::BlockCompose,
        subsets_examined: ra.subsets_examined + rb.subsets_examined,
        elapsed_ns: start.elapsed().as_nanos() as u64,
    };
    Ok((report, witness))
}

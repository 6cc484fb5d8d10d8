//! The Cholesky reduction from graphs to matrices.
//!
//! A graph `G` on `n` vertices with signed adjacency matrix `A` maps to
//! `C(G)`, any matrix with `C(G)ᵀ C(G) = B = I + c A / √n`, or to the zero
//! matrix when `B` is not PSD. A `k`-clique `H` gives the unit vector
//! `x_H = 1_H / √k` with `x_Hᵀ A x_H = k - 1`, hence
//! `||C x_H||² = 1 + c (k - 1) / √n`, a RIP violation for every
//! `δ < c (k - 1) / √n`.

use serde::{Deserialize, Serialize};

use crate::combinatorics::IndexSubset;
use crate::error::{invalid, Result};
use crate::graph::Graph;
use crate::linalg::{self, norm_sq, DenseMatrix, PsdOutcome, DEFAULT_PSD_TOL};
use crate::rip::Witness;

/// Tolerance for the witness identity `||Cx||² = 1 + c(k-1)/√n`.
pub const WITNESS_IDENTITY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReductionParams {
    pub c: f64,
    pub psd_tol: f64,
}

impl Default for ReductionParams {
    fn default() -> Self {
        Self {
            c: 0.3,
            psd_tol: DEFAULT_PSD_TOL,
        }
    }
}

impl ReductionParams {
    pub fn with_c(c: f64) -> Self {
        Self {
            c,
            ..Self::default()
        }
    }

    /// Rejects values the reduction cannot use at all.
    pub fn validate(&self) -> Result<()> {
        if !(self.c >= 0.0 && self.c.is_finite()) {
            return Err(invalid(format!(
                "reduction constant c must be finite and >= 0, got {}",
                self.c
            )));
        }
        if !(self.psd_tol >= 0.0 && self.psd_tol.is_finite()) {
            return Err(invalid(format!(
                "psd_tol must be finite and >= 0, got {}",
                self.psd_tol
            )));
        }
        Ok(())
    }

    /// Warning text when `c` is outside the `(0, 1/3)` range for which
    /// `B` is PSD with high probability on random graphs.
    pub fn policy_warning(&self) -> Option<String> {
        if 3.0 * self.c >= 1.0 {
            Some(format!(
                "c = {} violates 3c < 1; B = I + cA/sqrt(n) is likely not PSD on random graphs",
                self.c
            ))
        } else if self.c == 0.0 {
            Some("c = 0 makes the reduction the identity map".to_string())
        } else {
            None
        }
    }

    /// `c (k - 1) / √n`: the deviation a `k`-clique witness achieves.
    pub fn clique_deviation(&self, n: usize, k: usize) -> f64 {
        self.c * (k as f64 - 1.0) / (n as f64).sqrt()
    }
}

/// `0` on the diagonal, `+1` for edges, `-1` for non-edges.
pub fn signed_adjacency(g: &Graph) -> Result<DenseMatrix> {
    let n = g.vertex_count();
    if n < 2 {
        return Err(invalid(format!("signed adjacency needs n >= 2, got {n}")));
    }
    Ok(DenseMatrix::from_fn(n, n, |i, j| {
        if i == j {
            0.0
        } else if g.has_edge(i, j) {
            1.0
        } else {
            -1.0
        }
    }))
}

/// `I + (c/√n) A(G)`.
pub fn reduction_target(g: &Graph, params: &ReductionParams) -> Result<DenseMatrix> {
    params.validate()?;
    let a = signed_adjacency(g)?;
    let n = a.rows();
    let scale = params.c / (n as f64).sqrt();
    Ok(DenseMatrix::from_fn(n, n, |i, j| {
        if i == j {
            1.0
        } else {
            scale * a.get(i, j)
        }
    }))
}

/// Output of [`cholesky_reduce_detailed`].
#[derive(Debug, Clone)]
pub struct Reduction {
    /// `C(G)`; the zero matrix when `B` is not PSD.
    pub matrix: DenseMatrix,
    pub psd: bool,
    /// Smallest eigenvalue of `B`, only computed when `B` was rejected.
    pub smallest_eigenvalue: Option<f64>,
}

/// `C(G)` with `C(G)ᵀ C(G) = I + c A / √n`, or the zero matrix.
pub fn cholesky_reduce(g: &Graph, params: &ReductionParams) -> Result<DenseMatrix> {
    Ok(cholesky_reduce_detailed(g, params)?.matrix)
}

pub fn cholesky_reduce_detailed(g: &Graph, params: &ReductionParams) -> Result<Reduction> {
    let b = reduction_target(g, params)?;
    let n = b.rows();
    Ok(match linalg::cholesky_psd(&b, params.psd_tol)? {
        PsdOutcome::Factor(c) => Reduction {
            matrix: c,
            psd: true,
            smallest_eigenvalue: None,
        },
        PsdOutcome::NotPsd {
            smallest_eigenvalue,
        } => Reduction {
            matrix: DenseMatrix::zeros(n, n),
            psd: false,
            smallest_eigenvalue: Some(smallest_eigenvalue),
        },
    })
}

/// `x_H`: `1/√k` on the clique `H`, zero elsewhere.
///
/// `x_Hᵀ A x_H = k - 1` exactly: the `k(k-1)` ordered pairs of `H` all
/// contribute `+1/k`. The integer count is checked against the graph
/// rather than trusted. The returned deviation is the exact combinatorial
/// value `|x_Hᵀ A x_H|`, normalised so that it is the Rayleigh quotient of
/// `A` at `x_H`.
pub fn clique_witness(g: &Graph, clique: &IndexSubset) -> Result<Witness> {
    let k = clique.len();
    if k < 2 {
        return Err(invalid("a clique witness needs at least two vertices"));
    }
    g.check_clique(clique)?;
    let n = g.vertex_count();
    let amp = 1.0 / (k as f64).sqrt();
    let mut vector = vec![0.0; n];
    for &i in clique.indices() {
        vector[i] = amp;
    }
    let idx = clique.indices();
    let mut signed_pairs: i64 = 0;
    for &u in idx {
        for &v in idx {
            if u != v {
                signed_pairs += if g.has_edge(u, v) { 1 } else { -1 };
            }
        }
    }
    let quadratic = signed_pairs as f64 / k as f64;
    assert_eq!(
        quadratic,
        (k - 1) as f64,
        "clique quadratic form must equal k - 1"
    );
    Ok(Witness {
        subset: clique.clone(),
        vector,
        deviation: quadratic,
    })
}

/// `xᵀ A x` evaluated in floating point, for cross-checking.
pub fn quadratic_form(a: &DenseMatrix, x: &[f64]) -> Result<f64> {
    let ax = a.mul_vec(x)?;
    Ok(linalg::dot(x, &ax))
}

/// Outcome of [`verify_violation`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ViolationCheck {
    pub violates: bool,
    /// `||C x||²`.
    pub image_norm_sq: f64,
    /// `| ||C x||² - 1 |`.
    pub deviation: f64,
}

/// Checks whether the witness shows `C` violates the RIP with parameter
/// `delta` at order `|support|`.
///
/// When `C` is nonzero and the witness is a clique vector (`k` equal
/// entries `1/√k`), also asserts the identity
/// `||Cx||² = 1 + c(k-1)/√n` within [`WITNESS_IDENTITY_TOL`]; a mismatch
/// means `C` is not a factor of `I + cA/√n` and is reported as an error.
pub fn verify_violation(
    c_matrix: &DenseMatrix,
    witness: &Witness,
    delta: f64,
    n: usize,
    c: f64,
) -> Result<ViolationCheck> {
    if witness.vector.len() != c_matrix.cols() {
        return Err(invalid(format!(
            "witness length {} does not match {} columns",
            witness.vector.len(),
            c_matrix.cols()
        )));
    }
    let image = c_matrix.mul_vec(&witness.vector)?;
    let image_norm_sq = norm_sq(&image);
    let deviation = (image_norm_sq - 1.0).abs();

    if !c_matrix.is_zero() {
        if let Some(k) = clique_vector_size(witness) {
            let expected = 1.0 + c * (k as f64 - 1.0) / (n as f64).sqrt();
            if (image_norm_sq - expected).abs() > WITNESS_IDENTITY_TOL {
                return Err(invalid(format!(
                    "||Cx||^2 = {image_norm_sq} but a {k}-clique witness requires {expected}"
                )));
            }
        }
    }
    Ok(ViolationCheck {
        violates: deviation > delta,
        image_norm_sq,
        deviation,
    })
}

/// `Some(k)` if the vector has exactly `k` nonzero entries, all `1/√k`.
fn clique_vector_size(w: &Witness) -> Option<usize> {
    let k = w.subset.len();
    let amp = 1.0 / (k as f64).sqrt();
    let on_support = w
        .subset
        .indices()
        .iter()
        .all(|&i| w.vector.get(i) == Some(&amp));
    let support = w.vector.iter().filter(|&&v| v != 0.0).count();
    (k >= 2 && on_support && support == k).then_some(k)
}

/// Answer of the spectral refuter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RefuterAnswer {
    Yes,
    NoClique,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RefuterOutcome {
    pub answer: RefuterAnswer,
    pub lambda_max: f64,
    pub threshold: f64,
}

/// Rounding allowance when comparing a computed `λ_1` with `k - 1`.
///
/// A graph whose `k`-clique attains `λ_1 = k - 1` exactly (e.g. `K_k`)
/// must still be answered `Yes`, so the computed eigenvalue is allowed to
/// fall short of the threshold by a backward-error sized margin. This only
/// makes the refuter more willing to say `Yes`, which cannot break
/// soundness.
pub fn refuter_slack(n: usize) -> f64 {
    1e-9 * n as f64
}

/// "yes" iff `λ_1(A) >= k - 1` (up to [`refuter_slack`]). Every graph with a
/// `k`-clique gets "yes".
pub fn spectral_clique_refuter(g: &Graph, k: usize) -> Result<RefuterAnswer> {
    Ok(spectral_clique_refuter_detailed(g, k)?.answer)
}

pub fn spectral_clique_refuter_detailed(g: &Graph, k: usize) -> Result<RefuterOutcome> {
    if k < 2 {
        return Err(invalid(format!("refuter needs k >= 2, got {k}")));
    }
    let a = signed_adjacency(g)?;
    let lambda_max = linalg::sym_eigenvalues(&a)?.largest();
    let threshold = (k - 1) as f64;
    let answer = if lambda_max >= threshold - refuter_slack(g.vertex_count()) {
        RefuterAnswer::Yes
    } else {
        RefuterAnswer::NoClique
    };
    Ok(RefuterOutcome {
        answer,
        lambda_max,
        threshold,
    })
}

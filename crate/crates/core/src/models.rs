//! Seeded generators for the random objects: Bernoulli sensing matrices,
//! the symmetric sign matrices of Models A and B, `G(n, 1/2)` graphs and
//! planted cliques.
//!
//! All randomness is drawn through [`Seed`]. Entry `(i, j)` of a Bernoulli
//! matrix uses bit `i * N + j`; the upper-triangle pair `(i, j)` of Model A
//! and of `G(n, 1/2)` uses bit `pair_index(i, j)`. A set bit means `+1`
//! (or an edge), a clear bit `-1` (or a non-edge), so the signed adjacency
//! matrix of `gen_gnp_half(n, s)` equals `gen_model_a(n, s)` exactly.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::combinatorics::IndexSubset;
use crate::error::{invalid, Result};
use crate::graph::Graph;
use crate::linalg::DenseMatrix;
use crate::rng::{label, uniform_inclusive, Seed};

/// Offset of pair `(i, j)`, `i < j`, in row-major upper-triangle order.
#[inline]
fn pair_index(i: usize, j: usize, n: usize) -> u64 {
    debug_assert!(i < j && j < n);
    (i * n - i * (i + 1) / 2 + (j - i - 1)) as u64
}

/// Upper-triangle sign bits, one row per vertex (`row[i][j - i - 1]`).
fn upper_triangle_bits(n: usize, seed: Seed) -> Vec<Vec<bool>> {
    (0..n)
        .into_par_iter()
        .map(|i| {
            let mut row = vec![false; n - i - 1];
            if !row.is_empty() {
                seed.bits().fill(pair_index(i, i + 1, n), &mut row);
            }
            row
        })
        .collect()
}

/// `n × N` matrix with independent entries `±1/√n`.
pub fn gen_bernoulli_sensing(n: usize, big_n: usize, seed: Seed) -> Result<DenseMatrix> {
    if n == 0 || big_n == 0 {
        return Err(invalid("sensing matrix dimensions must be positive"));
    }
    let amp = 1.0 / (n as f64).sqrt();
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut bits = vec![false; big_n];
            seed.bits().fill((i * big_n) as u64, &mut bits);
            bits.into_iter()
                .map(|b| if b { amp } else { -amp })
                .collect()
        })
        .collect();
    DenseMatrix::from_row_major(n, big_n, rows.concat())
}

/// Symmetric `k × k` matrix, zero diagonal, independent `±1` above it.
pub fn gen_model_a(k: usize, seed: Seed) -> Result<DenseMatrix> {
    if k < 2 {
        return Err(invalid(format!("Model A needs k >= 2, got {k}")));
    }
    Ok(signs_to_matrix(k, &upper_triangle_bits(k, seed), 1.0, 0.0))
}

/// `I_n + (c/√n) A` with `A` from [`gen_model_a`] on the same seed.
pub fn gen_model_b(n: usize, c: f64, seed: Seed) -> Result<DenseMatrix> {
    if n < 2 {
        return Err(invalid(format!("Model B needs n >= 2, got {n}")));
    }
    if !(c > 0.0 && c.is_finite()) {
        return Err(invalid(format!("Model B needs c > 0, got {c}")));
    }
    let scale = c / (n as f64).sqrt();
    Ok(signs_to_matrix(
        n,
        &upper_triangle_bits(n, seed),
        scale,
        1.0,
    ))
}

fn signs_to_matrix(n: usize, rows: &[Vec<bool>], off: f64, diag: f64) -> DenseMatrix {
    let mut data = vec![0.0; n * n];
    for (i, row) in rows.iter().enumerate() {
        data[i * n + i] = diag;
        for (t, &b) in row.iter().enumerate() {
            let j = i + 1 + t;
            let v = if b { off } else { -off };
            data[i * n + j] = v;
            data[j * n + i] = v;
        }
    }
    DenseMatrix::from_row_major(n, n, data).expect("finite by construction")
}

/// Uniform sample from `G(n, 1/2)`.
pub fn gen_gnp_half(n: usize, seed: Seed) -> Result<Graph> {
    if n == 0 {
        return Err(invalid("graph needs at least one vertex"));
    }
    let mut g = Graph::empty(n);
    for (i, row) in upper_triangle_bits(n, seed).iter().enumerate() {
        for (t, &b) in row.iter().enumerate() {
            if b {
                g.set_edge(i, i + 1 + t);
            }
        }
    }
    Ok(g)
}

/// A graph together with the clique planted in it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlantedInstance {
    pub graph: Graph,
    pub planted: IndexSubset,
    pub size: usize,
}

/// Makes a uniformly random `t`-subset of the vertices a clique.
///
/// The subset comes from a partial Fisher–Yates shuffle on a substream of
/// `seed` reserved for planting, so passing the seed that generated `graph`
/// does not correlate the two.
pub fn plant_clique(graph: &Graph, t: usize, seed: Seed) -> Result<PlantedInstance> {
    let n = graph.vertex_count();
    if t == 0 || t > n {
        return Err(invalid(format!("clique size must be in 1..={n}, got {t}")));
    }
    let mut rng = seed.derive(label::PLANT, 0).rng();
    let mut vertices: Vec<usize> = (0..n).collect();
    for i in 0..t {
        let j = i + uniform_inclusive(&mut rng, (n - 1 - i) as u64) as usize;
        vertices.swap(i, j);
    }
    let planted = IndexSubset::from_unsorted(vertices[..t].to_vec())?;
    let mut out = graph.clone();
    let idx = planted.indices();
    for (a, &u) in idx.iter().enumerate() {
        for &v in &idx[a + 1..] {
            out.set_edge(u, v);
        }
    }
    Ok(PlantedInstance {
        graph: out,
        planted,
        size: t,
    })
}

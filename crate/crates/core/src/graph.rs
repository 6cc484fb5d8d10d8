//! Simple undirected graphs stored as packed adjacency bit rows.

use serde::{Deserialize, Serialize};

use crate::combinatorics::IndexSubset;
use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    n: usize,
    words_per_row: usize,
    bits: Vec<u64>,
}

impl Graph {
    /// Graph on `n` vertices with no edges.
    pub fn empty(n: usize) -> Self {
        let words_per_row = n.div_ceil(64);
        Self {
            n,
            words_per_row,
            bits: vec![0; n * words_per_row],
        }
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Self::empty(n);
        for u in 0..n {
            for v in u + 1..n {
                g.set_edge(u, v);
            }
        }
        g
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Self::empty(n);
        for &(u, v) in edges {
            if u == v {
                return Err(invalid(format!("self-loop at vertex {u}")));
            }
            if u >= n || v >= n {
                return Err(invalid(format!(
                    "edge ({u}, {v}) out of range for {n} vertices"
                )));
            }
            g.set_edge(u, v);
        }
        Ok(g)
    }

    #[inline]
    pub fn vertex_count(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        let w = self.bits[u * self.words_per_row + v / 64];
        (w >> (v % 64)) & 1 == 1
    }

    /// Adds edge `{u, v}`. Panics on a self-loop or out-of-range vertex.
    pub fn set_edge(&mut self, u: usize, v: usize) {
        assert!(u != v, "self-loops are not allowed");
        assert!(u < self.n && v < self.n, "vertex out of range");
        self.bits[u * self.words_per_row + v / 64] |= 1 << (v % 64);
        self.bits[v * self.words_per_row + u / 64] |= 1 << (u % 64);
    }

    pub fn edge_count(&self) -> usize {
        let total: u32 = self.bits.iter().map(|w| w.count_ones()).sum();
        total as usize / 2
    }

    /// Edges `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |u| {
            (u + 1..self.n)
                .filter(move |&v| self.has_edge(u, v))
                .map(move |v| (u, v))
        })
    }

    pub fn degree(&self, u: usize) -> usize {
        let row = &self.bits[u * self.words_per_row..(u + 1) * self.words_per_row];
        row.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// `Ok` if `subset` induces a clique, else the first missing edge.
    pub fn check_clique(&self, subset: &IndexSubset) -> Result<()> {
        subset.check_bound(self.n)?;
        let idx = subset.indices();
        for (a, &u) in idx.iter().enumerate() {
            for &v in &idx[a + 1..] {
                if !self.has_edge(u, v) {
                    return Err(Error::NotClique(u, v));
                }
            }
        }
        Ok(())
    }

    pub fn is_clique(&self, subset: &IndexSubset) -> bool {
        self.check_clique(subset).is_ok()
    }

    /// Whether every edge of `other` is an edge of `self`.
    pub fn contains_edges_of(&self, other: &Graph) -> bool {
        self.n == other.n && self.bits.iter().zip(&other.bits).all(|(a, b)| a & b == *b)
    }

    /// Checks symmetry and the empty diagonal.
    pub fn is_well_formed(&self) -> bool {
        (0..self.n).all(|u| {
            !self.has_edge(u, u) && (0..self.n).all(|v| self.has_edge(u, v) == self.has_edge(v, u))
        })
    }
}

/// Serialized as vertex count plus sorted edge list.
#[derive(Serialize, Deserialize)]
struct GraphRepr {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl Serialize for Graph {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        GraphRepr {
            n: self.n,
            edges: self.edges().collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Graph {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = GraphRepr::deserialize(d)?;
        Graph::from_edges(repr.n, &repr.edges).map_err(serde::de::Error::custom)
    }
}

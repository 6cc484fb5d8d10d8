//! Computing, bounding and certifying restricted isometry property (RIP)
//! parameters of real matrices, and the graph-to-matrix Cholesky reduction
//! under which planted cliques become RIP violations.
//!
//! A matrix `Φ` has the RIP of order `k` with parameter `δ` when
//! `(1-δ)||x||² <= ||Φx||² <= (1+δ)||x||²` for every `k`-sparse `x`.
//!
//! Module map:
//! - [`linalg`]: dense matrices, symmetric eigensolver, PSD Cholesky, Gram.
//! - [`rip`]: exact enumeration, coherence, order lifting, lazy certification.
//! - [`models`]: seeded Bernoulli / Model A / Model B / `G(n, 1/2)` generators.
//! - [`reduction`]: `G ↦ C(G)`, clique witnesses, the spectral refuter.
//! - [`experiment`]: null-versus-planted distinguishing runs.
//! - [`format`]: text file formats for matrices and graphs.

pub mod combinatorics;
pub mod error;
pub mod experiment;
pub mod format;
pub mod graph;
pub mod linalg;
pub mod models;
pub mod reduction;
pub mod rip;
pub mod rng;

pub use combinatorics::{binomial, IndexSubset};
pub use error::{Error, Result};
pub use experiment::{
    exponent_preset, preset, run_distinguishing_experiment, Arm, Decision, ExperimentConfig,
    ExperimentReport, NullStatistic, RectSpec, Separation, TrialRecord, PRESET_NAMES,
};
pub use graph::Graph;
pub use linalg::{
    cholesky_psd, gram, spectral_deviation_from_identity, sym_eigen, sym_eigenvalues, DenseMatrix,
    EigenDecomposition, PsdOutcome, Spectrum, DEFAULT_PSD_TOL,
};
pub use models::{
    gen_bernoulli_sensing, gen_gnp_half, gen_model_a, gen_model_b, plant_clique, PlantedInstance,
};
pub use reduction::{
    cholesky_reduce, cholesky_reduce_detailed, clique_witness, signed_adjacency,
    spectral_clique_refuter, spectral_clique_refuter_detailed, verify_violation, Reduction,
    ReductionParams, RefuterAnswer, RefuterOutcome, ViolationCheck,
};
pub use rip::{
    block_compose, block_rip, coherence, exact_rip, exact_rip_with, lazy_certify,
    lazy_certify_with, lift_order, predicted_certified_order, quasi_polynomial_probe_order,
    subset_deviation, validate_unit_columns, Direction, ExactOptions, LazyCertificate, Method,
    RipReport, Witness, DEFAULT_BUDGET, UNIT_COLUMN_TOL,
};
pub use rng::Seed;

//! Quasi-independence models on index sets: coordinate toric fiber products,
//! doubly chordal bipartite graphs, the rational-MLE reparametrization of
//! 2-way models, iterative proportional scaling, Lawrence lifts and slices.

pub mod chordal;
pub mod ctfp;
pub mod error;
pub mod facial;
pub mod fixtures;
pub mod lawrence;
pub mod linalg;
pub mod mle;
pub mod model;
pub mod poset;
pub mod reparam;

pub use chordal::{build_graph, is_doubly_chordal_bipartite, ml_degree_one_2way, BipartiteGraph, ChordalityWitness};
pub use ctfp::{factorize, find_ctfp, glue, CTFPFactorization, SplitSpec, SwapWitness};
pub use error::{Error, Result};
pub use model::{build_a_matrix, CountVector, IndexSet, MultipartitionMatrix, StarMatrix};
pub use poset::{build_poset, CliquePoset};
pub use reparam::{build_bar_matrix, ReparamMatrix};

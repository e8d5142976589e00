//! Task-aware node embeddings.
//!
//! This crate learns node representations whose geometry is shaped by a
//! downstream task. A small amount of supervision (sparse node labels, or
//! training edges) trains a boosted ensemble of per-relation regression
//! stumps over nine graph similarity signals; the ensemble scores how likely
//! a node pair is task-equivalent and picks the positive examples fed to an
//! InfoNCE-style contrastive loss, which trains a two-layer GCN encoder.
//! The tied stump weights double as interpretable importance weights for
//! each graph signal.
//!
//! The main pieces:
//!
//! - [`graph`]: graph data model, file formats, CSR sparse algebra, splits;
//! - [`relations`]: the nine similarity kernels and per-node thresholds;
//! - [`sampler`]: pair labeling, relation ordering, the second-order
//!   boosting fit, scoring, and top-B positive selection;
//! - [`encoder`]: two-layer GCN forward/backward and Adam;
//! - [`contrastive`]: the loss, the five positive-sampling strategies, and
//!   the training loop;
//! - [`eval`]: logistic-regression node classification, link-prediction
//!   AUC, and sampler-precision diagnostics;
//! - [`synth`]: label perturbation and synthetic graph generators;
//! - [`cli`]: the `taskcl` command-line pipeline.
//!
//! See the `examples/` directory for one runnable example per capability.

pub mod cli;
pub mod contrastive;
pub mod encoder;
pub mod error;
pub mod eval;
pub mod graph;
pub mod relations;
pub mod rng;
pub mod sampler;
pub mod synth;

pub use error::{Error, Result};
pub use graph::Graph;

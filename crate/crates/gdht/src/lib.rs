//! Joint estimation of a sparse coefficient matrix and a sparse precision
//! matrix for multivariate regression, by gradient descent with hard
//! thresholding.
//!
//! The model is `y = W^T x + e` with correlated noise `e ~ N(0, Sigma)` and
//! precision matrix `Omega = Sigma^{-1}`. The crate provides:
//!
//! - the sample negative log-likelihood and its gradients ([`objective`]),
//! - hard-thresholding projections onto entry budgets ([`threshold`]),
//! - the alternating gradient-descent solver with per-iterate support
//!   selection, an SPD safeguard on the precision iterate, and an optional
//!   sample-splitting schedule ([`solver`]),
//! - convex initializers: a coordinate-descent Lasso for `W` and a graphical
//!   Lasso for `Omega` ([`init`]),
//! - synthetic data generators for band, hub, and scale-free precision
//!   structures ([`synthetic`]),
//! - experiment harnesses for error curves, sample-size scaling, and
//!   initializer-versus-refinement comparisons ([`experiments`]),
//! - ingestion of price panels into lagged autoregression datasets
//!   ([`ingest`]),
//! - and a configuration-file driven CLI (`gdht` binary) that persists every
//!   matrix and trace as deterministic CSV ([`config`], [`io`], [`cli`]).

pub mod cli;
pub mod config;
pub mod error;
pub mod experiments;
pub mod ingest;
pub mod init;
pub mod io;
pub mod matrix;
pub mod model;
pub mod objective;
pub mod rng;
pub mod solver;
pub mod synthetic;
pub mod threshold;

pub use error::{Error, Result};

/// Compiles and runs every code block in the guide (`book/`) as a doc-test,
/// so the book cannot drift from the crate.
#[cfg(doctest)]
mod book {
    macro_rules! chapter {
        ($name:ident, $path:literal) => {
            #[doc = include_str!($path)]
            mod $name {}
        };
    }

    chapter!(introduction, "../../../book/src/introduction.md");
    chapter!(model, "../../../book/src/model.md");
    chapter!(thresholding, "../../../book/src/thresholding.md");
    chapter!(initialization, "../../../book/src/initialization.md");
    chapter!(solver, "../../../book/src/solver.md");
    chapter!(synthetic, "../../../book/src/synthetic.md");
    chapter!(experiments, "../../../book/src/experiments.md");
    chapter!(ingestion, "../../../book/src/ingestion.md");
    chapter!(cli, "../../../book/src/cli.md");
}

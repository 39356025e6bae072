//! Learning univariate probability densities from i.i.d. samples with
//! piecewise polynomial hypotheses.
//!
//! The crate fits a `t`-piecewise degree-`d` density to samples by solving
//! small linear programs over Chebyshev coefficients of a candidate CDF on
//! each candidate segment, then stitching segments together with a dynamic
//! program. The fit is semi-agnostic: its total variation error degrades
//! gracefully with the distance of the target from the hypothesis class.
//!
//! The main entry points are:
//!
//! - [`learner::learn_piecewise_poly`] — the full pipeline (heavy-atom
//!   removal, equal-mass partitioning, per-block LP fits, DP segmentation).
//! - [`learner::learn_wb_single_poly`] / [`learner::learn_wb_piecewise_poly`]
//!   — the same pipeline without atom removal, for atomless targets.
//! - [`zoo`] — synthetic target distributions and constructive structural
//!   approximations (piecewise-linear decompositions of log-concave
//!   densities, three-piece Gaussian approximants, hard instances).
//! - [`discrete`] — distributions on a `2N`-point grid and the
//!   discretize/continuize reduction that learns them at degree 0.
//! - [`experiment`] — seeded trial batteries with CSV/JSON output, also
//!   exposed through the `polydensity` binary.
//!
//! Every run is reproducible: all randomness flows through explicit
//! counter-based [`rng::SeedStream`]s.
//!
//! See the `examples/` directory for one runnable example per capability.

pub mod cheb;
pub mod discrete;
pub mod empirical;
pub mod experiment;
pub mod learner;
pub mod lp;
pub mod poly;
pub mod quadrature;
pub mod rng;
pub mod special;
pub mod zoo;

mod error;

pub use error::{Error, Result};
pub use poly::{ChebPoly, PiecewisePolynomial};
pub use rng::SeedStream;

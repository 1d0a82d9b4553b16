//! Visual saliency from spaces of background-based distribution.
//!
//! The pipeline has three stages:
//!
//! 1. [`sbd`] fits Gaussian models to four groups of border patches and scores
//!    every patch by its Mahalanobis distance, giving the coarse map.
//! 2. [`bayes`] treats the coarse map as a prior and updates it with Lab color
//!    histogram likelihoods of a foreground/background split.
//! 3. [`refine`] averages the posterior over superpixels and smooths it with
//!    weights that decay with geodesic color distance.
//!
//! [`eval`] scores maps against ground-truth masks, and [`pipeline`] ties the
//! stages together.

pub mod bayes;
pub mod error;
pub mod eval;
pub mod imagecore;
pub mod linalg;
pub mod pipeline;
pub mod refine;
pub mod sbd;

pub use error::{Error, Result, Stage};
pub use eval::{aggregate, evaluate, EvalReport};
pub use imagecore::{BinaryMask, RgbImage, SaliencyMap};
pub use pipeline::{run_pipeline, PipelineConfig, PipelineOutput};

//! Batched hit-and-run sampling of convex polytopes.
//!
//! A polytope is given in H-representation, `{x : A_in x <= b_in, A_eq x = b_eq}`.
//! Sampling starts from the Chebyshev center and runs `z` hit-and-run walks
//! at once as the columns of an `n x z` matrix, so that every iteration is a
//! handful of matrix-matrix products:
//!
//! ```
//! use mhar::{polytope::make_simplex, sampler::{run, SamplerConfig}};
//!
//! let simplex = make_simplex(4).unwrap();
//! let cfg = SamplerConfig::new(8, 27, 16, 7);
//! let out = run(&simplex, &cfg).unwrap();
//! assert_eq!(out.samples.shape(), (16, 4));
//! ```
//!
//! The [`stats`] module holds a Friedman-Rafsky two-sample test to check the
//! output against exact uniform draws, and [`bench`] measures throughput.

pub mod bench;
pub mod chebyshev;
pub mod error;
pub mod linalg;
pub mod polytope;
pub mod projection;
pub mod sampler;
pub mod stats;

pub use error::{Error, Result};
pub use linalg::Matrix;
pub use polytope::Polytope;

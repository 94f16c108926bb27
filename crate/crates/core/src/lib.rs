//! Curvature-regularized reconstruction of hidden scenes from under-sampled
//! confocal non-line-of-sight transients.
//!
//! The crate is organized around the confocal light-transport operator
//! ([`transport`]), the finite-difference and proximal kernels shared by the
//! solvers ([`diffops`]), and two ADMM solvers: an object-domain solver
//! ([`solver_object`]) that regularizes the albedo volume with a
//! curvature-weighted total variation, and a dual-domain solver
//! ([`solver_dual`]) that additionally inpaints and denoises the measured
//! transient. [`scenes`], [`metrics`] and [`io`] support simulation,
//! evaluation and file exchange; [`cli`] drives the pipeline.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod diffops;
pub mod error;
pub mod fft;
pub mod grid;
pub mod io;
pub mod metrics;
pub mod par;
pub mod pipeline;
pub mod scenes;
pub mod solver_dual;
pub mod solver_object;
pub mod transport;

pub use error::{Error, Result};

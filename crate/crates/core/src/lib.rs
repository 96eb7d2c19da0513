//! Quantum state tomography with informationally (over)complete measurements.
//!
//! This crate estimates a `d`-level quantum state from measurement counts and
//! quantifies how well a given measurement can do the job. It provides
//!
//! - [`opspace`]: the real vector space of Hermitian operators — operator
//!   kets, superoperators, pseudoinverses, and the traceless restriction;
//! - [`povm`]: measurement families (SIC, mutually unbiased bases, platonic
//!   solids, custom files) and their frame superoperators;
//! - [`estimators`]: the canonical linear estimator, the best linear unbiased
//!   estimator in three plug-in flavours, and a diluted maximum-likelihood
//!   iteration, together with scaled mean-square-error matrices and Fisher
//!   information;
//! - [`metrics`]: weighted mean-square errors for the Hilbert-Schmidt, Bures,
//!   quantum Chernoff, and custom monotone Riemannian metrics, plus the
//!   volume of the uncertainty ellipsoid;
//! - [`analytic`]: closed forms for the covariant measurement and the full
//!   qubit catalogue, used as oracles against the numeric pipeline;
//! - [`simulate`]: a seeded, parallel Monte Carlo harness with deterministic
//!   CSV output.
//!
//! The guide in `book/` walks through the concepts chapter by chapter; its
//! code snippets are compiled and run as doc-tests via [`guide`].

pub mod analytic;
pub mod error;
pub mod estimators;
pub mod guide;
pub mod metrics;
pub mod opspace;
pub mod povm;
pub mod simulate;

pub use error::{Error, Result};

//! Spectral laboratory for elliptic boundary problems exterior to the unit
//! disc, decomposed over Fourier modes of the boundary circle.
//!
//! The crate builds per-mode radial discretizations of -Δ + c0 (and of the
//! biharmonic Δ² + 1) under Dirichlet, Neumann, Robin and general
//! Neumann-type boundary conditions, exposes the rank-one resolvent
//! dictionary connecting them, and measures the resulting spectra: power-law
//! exponents of resolvent-difference singular values, superpolynomial decay
//! of far-field cutoffs, and eigenvalue clusters injected into the essential
//! spectrum by nonlocal boundary conditions.
//!
//! Modules:
//! * [`grid`] — radial meshes and the r dr quadrature,
//! * [`mode_ops`] — per-mode operator assembly and direct solvers,
//! * [`krein`] — boundary symbols, null data and resolvent formulas,
//! * [`spectra`] — eigen/singular value extraction, fits, cluster counts,
//! * [`experiments`] — named end-to-end scenarios with pass/fail criteria,
//! * [`manifest`] — batch configuration and report/series emission.

pub mod band;
pub mod error;
pub mod experiments;
pub mod grid;
pub mod krein;
pub mod linalg;
pub mod manifest;
pub mod mode_ops;
pub mod spectra;

pub use error::{Error, Result};

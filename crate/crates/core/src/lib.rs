//! Spiked heavy-tailed Wigner matrices.
//!
//! The crate samples symmetric matrices with regularly varying entries, adds a
//! rank-one spike `theta * v v^T`, and compares the largest eigenvalue with its
//! limiting laws. Alongside the simulation side it evaluates the combinatorial
//! sums and variational problems that determine those limits, using exact
//! arithmetic where the objects are integers or rationals.
//!
//! Modules:
//! - [`tail_sampler`]: entry distributions and the normalizer `b_n`.
//! - [`matrix_lab`]: matrices, spikes, spectra, truncation and trace inequalities.
//! - [`combinatorics`]: Catalan tables, convolutions, cycle classes, `s1`/`s2`/`s(p, M)`.
//! - [`limit_laws`]: limiting CDFs, `G1`/`G2`, `F` estimates and the variational suprema.
//! - [`monte_carlo`]: seeded experiments, empirical CDFs and KS distances.

pub mod combinatorics;
pub mod error;
pub mod limit_laws;
pub mod matrix_lab;
pub mod monte_carlo;
pub mod tail_sampler;

pub use error::{Error, Result};

//! Braiding topology of one-dimensional non-Hermitian two-band chains with
//! long-range asymmetric coupling.
//!
//! The crate is organised bottom-up:
//!
//! - [`model`]: Bloch and surrogate (complex-β) Hamiltonians, characteristic polynomials.
//! - [`polyalg`]: complex polynomial roots and modulus bookkeeping.
//! - [`spectra`]: dense complex eigensolver, PBC strands, finite chains, skin-effect statistics.
//! - [`braid`]: braiding index (winding integral and argument principle), braid words, phase diagrams.
//! - [`eps`]: exceptional points on phase boundaries and transition types.
//! - [`circuit`]: RLC synthesis, circuit Laplacians, Green's-function reconstruction, netlists.
//!
//! ```
//! use braidkit::{braid, model::ModelSpec};
//!
//! let hopf = ModelSpec::h1(1.0, 1.4, 1.6, 3, 1).unwrap();
//! let report = braid::analyze(&hopf, 512).unwrap();
//! assert_eq!(report.xi_roots, -2);
//! assert_eq!(report.knot.to_string(), "Hopf link");
//! ```

pub mod braid;
pub mod circuit;
pub mod eps;
mod error;
pub mod model;
pub mod polyalg;
pub mod spectra;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;

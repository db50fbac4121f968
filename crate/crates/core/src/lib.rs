//! Entanglement of multi-dimensional entangled coherent states under photon loss.
//!
//! The two-mode state `Σ_q f_q |α e^{-2πiq/M}⟩⊗|α e^{-2πiq/M}⟩` loses a
//! fraction `1 - η` of its photons in each mode. This crate evaluates the
//! logarithmic negativity of the result:
//!
//! - [`exact`]: the full `M² × M²` partial transpose in an orthonormalized
//!   branch basis;
//! - [`approx`]: closed forms valid when the branches are nearly orthogonal;
//! - [`fock`]: a brute-force number-basis oracle for small instances;
//! - [`experiments`]: sweeps and optimizers over `(M, |α|², η)`.

pub mod approx;
pub mod error;
pub mod exact;
pub mod experiments;
pub mod fock;
pub mod linalg;
pub mod params;
pub mod search;

pub use error::{Error, Result};
pub use exact::{ExactConfig, Method, NegativityResult};
pub use params::SystemParams;

//! Finite-scale additive combinatorics over F_q[t]: field and polynomial
//! arithmetic, Fourier analysis on G_N, Bohr sets, spectra, the density
//! increment engine, solution counting and search, and Bohr sets in Z/NZ.

pub mod bohr;
pub mod engine;
pub mod equations;
pub mod error;
pub mod field;
pub mod fourier;
pub mod group;
pub mod linalg;
pub mod poly;
pub mod spectral;
pub mod znz;

pub use error::{Error, Result};

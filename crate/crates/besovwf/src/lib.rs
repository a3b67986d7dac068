//! Besov regularity and wavefront-set analysis of sampled distributions.
//!
//! The crate works with complex fields sampled on a periodic grid (a torus
//! `[0,L)^d`, `d = 1` or `2`). On top of the discrete Fourier transform it
//! provides:
//!
//! - dyadic Littlewood-Paley partitions and block-based Besov norms ([`lp`]),
//! - local-means norms against compactly supported kernels with prescribed
//!   vanishing moments ([`localmeans`]),
//! - a directional singularity detector based on cone-restricted scaling
//!   tests, yielding per-point, per-direction regularity exponents
//!   ([`wavefront`]),
//! - order-zero cone localizers and elliptic multipliers with their
//!   characteristic sets ([`psido`]),
//! - a grid-free symbolic calculus on wavefront-set descriptions: pullback,
//!   tensor and pointwise products, kernel composition ([`wfalgebra`]),
//! - spectral evolution under first-order hyperbolic multipliers, Hamiltonian
//!   transport of singularities and heat smoothing ([`propagation`]).
//!
//! The `besovwf` binary exposes the toolkit behind a JSON-configured CLI; see
//! the crate README for recipes.

pub mod cli;
pub mod config;
pub mod corpus;
pub mod fit;
pub mod grid;
pub mod io;
pub mod localmeans;
pub mod lp;
pub mod propagation;
pub mod psido;
pub mod smooth;
pub mod wavefront;
pub mod wfalgebra;

mod error;

pub use error::{Error, Result};
pub use fit::{LambdaLadder, ScalingFit};
pub use grid::{Field, GridSpec, SpectralField, SynthKind};
pub use localmeans::Kernel;
pub use lp::{BesovParams, LPPartition};

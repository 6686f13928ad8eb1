//! Dirichlet character paths modulo odd primes and the random Fourier
//! process that describes their large-modulus statistics.
//!
//! The crate has three layers:
//!
//! * exact character arithmetic ([`dirichlet`]) and the polygonal paths
//!   built from normalised partial character sums ([`paths`]);
//! * reproducible Steinhaus random multiplicative functions
//!   ([`steinhaus`]) and the random series they drive ([`series`]);
//! * numerical comparison of the two worlds: joint moments via divisor
//!   sums ([`moments`]) and distributional statistics ([`stats`]).
//!
//! Everything is deterministic for a fixed seed: random phases come from a
//! keyed counter mixer, and all parallel reductions use fixed chunking, so
//! results are byte-identical regardless of thread count.

// divisibility tests read as modular arithmetic throughout
#![allow(clippy::manual_is_multiple_of)]

pub mod dirichlet;
pub mod export;
pub mod moments;
pub mod paths;
pub mod series;
pub mod stats;
pub mod steinhaus;
pub mod sums;
pub mod trig;
pub mod zeta;

pub use dirichlet::{CharFilter, Character, DirichletError, Parity, PrimeContext};
pub use num_complex::Complex64;
pub use paths::{CharacterPath, GridKind, PathGrid};
pub use series::{SeriesForm, SeriesSample, SeriesSpec, Truncation};
pub use steinhaus::{SeedSpec, SpfSieve, SteinhausError, SteinhausSampler, MIXER_ID};

//! Quantum LDPC codes assisted by reliable qubits, built from combinatorial
//! designs.
//!
//! The crate covers the full pipeline from design construction to decoder
//! benchmarking:
//!
//! - [`gf2`]: dense bit-packed linear algebra over GF(2) (rank, Gram rank,
//!   nullspace, minimum distance).
//! - [`galois`]: finite field arithmetic and the line designs of affine and
//!   projective geometries.
//! - [`designs`]: pairwise balanced designs, replication profiles, the Bose
//!   triple system construction, incidence matrices, and alist file I/O.
//! - [`analysis`]: structural verification of parity-check matrices — girth,
//!   even-freeness, forbidden configurations, rank predictions, and the
//!   degeneracy audit.
//! - [`qcode`]: assembly of parity-check matrices in standard and extended
//!   form and derivation of quantum code parameters for both assistance
//!   modes, plus a progressive edge-growth baseline generator.
//! - [`decode_sim`]: syndrome-based sum-product decoding over binary
//!   symmetric channels and a reproducible Monte Carlo block-error-rate
//!   harness.

pub mod analysis;
pub mod decode_sim;
pub mod designs;
pub mod galois;
pub mod gf2;
pub mod qcode;

pub use designs::PairwiseBalancedDesign;
pub use gf2::{BinaryMatrix, BinaryVector};

//! Numerical machinery for the Lie norm on `C^N` and the Monge-Ampère
//! measures of `log|Φ|_c` for holomorphic maps `Φ`.
//!
//! The crate is `#![no_std]` and needs only `alloc`. Everything that touches
//! files, threads or the command line lives in the companion `lienorm` crate.
//!
//! Layout:
//!
//!  - [`linalg`]: small dense complex vectors and matrices, the bilinear form
//!    `⟨z,w⟩ = Σ z_j w_j`, determinants and a Jacobi Hermitian eigensolver.
//!  - [`lie_norm`]: the polar decomposition `ζ = e^{iθ}(a+ib)`, the Lie norm
//!    `|a|+|b|` and the distance to `CR^N`.
//!  - [`regularization`]: the smooth family `v_ε`, `h_ε = log v_ε` and the
//!    closed-form Levi matrix of `h_ε` with its three-eigenvalue spectrum.
//!  - [`volume`]: `(θ,a,b)` and `(θ,a,β)` coordinates and their volume factor.
//!  - [`holo`]: polynomial holomorphic maps, bordered Jacobians, the
//!    ε-density of `(dd^c(h_ε∘Φ))^n` and the limiting density on `M`.
//!  - [`roots`]: the monic family `P_z`, roots, discriminants and the
//!    root-map Jacobian identity.
//!  - [`catalog`]: compact sets with explicit extremal functions and
//!    equilibrium densities.
//!  - [`quadrature`]: independent oracles (singular quadrature, Monte Carlo
//!    with a counter-based stream, finite-difference Levi matrices).
#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod catalog;
mod error;
pub mod holo;
pub mod lie_norm;
pub mod linalg;
pub mod quadrature;
pub mod regularization;
pub mod roots;
pub mod volume;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Volume of the unit ball in `R^n`.
pub fn unit_ball_volume(n: usize) -> f64 {
    match n {
        0 => 1.0,
        1 => 2.0,
        _ => 2.0 * core::f64::consts::PI / n as f64 * unit_ball_volume(n - 2),
    }
}

/// `n!` as a float.
pub fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

//! Ω-stability of matrices through LMI regions and dissipative-Hamiltonian
//! triplets, with a nearest-stable-matrix solver.
//!
//! - [`linalg`]: dense kernels (Jacobi Hermitian eigensolver, Hessenberg QR,
//!   Kronecker products, Cholesky solves).
//! - [`regions`]: the region catalog, intersections and complex transforms.
//! - [`dh`]: Kronecker LMIs, stability tests and certificates.
//! - [`conicqp`]: ADMM for strongly convex QPs with PSD constraints.
//! - [`nearstab`]: nearest Ω-stable matrix and instance generation.

pub mod conicqp;
pub mod dh;
pub mod error;
pub mod linalg;
pub mod nearstab;
pub mod regions;

pub use nalgebra::DMatrix;
pub use num_complex::Complex64;

pub use conicqp::{ConicConfig, Status};
pub use dh::{
    certify_stability, compose, is_stable_eig, triplet_from_certificate, CertifyOutcome, DhTriplet,
    StabilityCertificate, StabilityVerdict,
};
pub use error::{Error, Result};
pub use linalg::Scalar;
pub use nearstab::{gen_instance, solve_nearest, Instance, NearStabConfig, NearStabResult};
pub use regions::{intersect, Catalog, Descriptor, Mode, Region, Window};

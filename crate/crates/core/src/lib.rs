//! Computation with B-free integers in number fields.
//!
//! Given a monogenic order O = Z[θ] and a pairwise coprime family B of
//! ideals, an element is B-free when it lies in no ideal of B. This crate
//! sieves the B-free indicator η on coordinate boxes, evaluates exact
//! Mirsky cylinder measures, counts admissible patterns exactly, estimates
//! topological entropy, and evaluates the coding maps between the rotation
//! group ∏ O/b and configurations.

pub mod cache;
pub mod dynamics;
pub mod entropy;
pub mod error;
pub mod exact;
pub mod geometry;
pub mod measure;
pub mod ring;
pub mod sieve;

pub use error::{Error, Result};
pub use ring::{
    build_bfamily, crt, factor_rational_prime, make_order, BFamily, FamilySpec, FieldOrder, IdealLattice,
    OrderOptions, PrimeFactor, RingElement,
};
pub use dynamics::{
    check_phi_theta, crt_zero_classes, joining_fiber, phi_window, theta_window, zero_window_scan, FiberReport,
    GroupPoint, LevelFiber, ZeroScan,
};
pub use entropy::{
    count_admissible, entropy_estimate, entropy_formula, is_admissible, AdmissibleCount, CountMethod, CountOptions,
    EntropyEstimate, SVector,
};
pub use exact::Interval;
pub use geometry::{FolnerBox, LatticeBridge, Region};
pub use measure::{d_count, density, empirical_frequency, mirsky_cylinder, Pattern};
pub use sieve::{sieve_window, SieveOptions, Window};

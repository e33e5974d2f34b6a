//! Exact arithmetic in a monogenic order Z[θ]: elements, ideals as HNF
//! lattices, norms, sums and products, membership, residues, CRT, and the
//! splitting of rational primes used to build B-families.

mod factor;
mod family;
pub mod hnf;
mod ideal;
mod order;
pub mod poly_fp;

pub use factor::{factor_rational_prime, PrimeFactor};
pub use family::{build_bfamily, integer_root, prime_power_tail_bound, BFamily, FamilySpec};
pub use ideal::{crt, IdealLattice};
pub use order::{make_order, FieldOrder, OrderOptions, RingElement, DEFAULT_DEGREE_CAP};

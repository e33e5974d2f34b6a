//! Splitting of rational primes by Kummer–Dedekind.

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::Zero;

use super::ideal::IdealLattice;
use super::order::FieldOrder;
use super::poly_fp::{is_prime, Fp};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimeFactor {
    pub ideal: IdealLattice,
    /// ramification index
    pub e: u32,
    /// residue degree
    pub f: u32,
}

/// Factors (p) = ∏ P_i^e_i with P_i = (p, g_i(θ)) from f ≡ ∏ g_i^e_i mod p.
///
/// Valid when p does not divide the index [O_K : Z[θ]]; rejected with
/// `UnsafePrime` when p² | disc(f) unless the order is asserted maximal.
pub fn factor_rational_prime(p: u64, order: &Arc<FieldOrder>) -> Result<Vec<PrimeFactor>> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let p2 = BigInt::from(p) * BigInt::from(p);
    if !order.assume_maximal() && (order.discriminant() % &p2).is_zero() {
        return Err(Error::UnsafePrime(p));
    }
    let p_i64 = i64::try_from(p).map_err(|_| Error::Overflow("prime"))?;
    let fp = Fp::new(p);
    let mut out = Vec::new();
    for (g, e) in fp.factor(&fp.poly(order.coeffs())) {
        let lift: Vec<i64> = g.coeffs.iter().map(|&c| c as i64).collect();
        let g_theta = order.eval_poly(&lift)?;
        let gens = [order.from_int(p_i64), g_theta];
        let ideal = IdealLattice::from_generators(order, &gens)?;
        out.push(PrimeFactor { ideal, e, f: g.degree().unwrap() as u32 });
    }
    out.sort_by(|a, b| a.ideal.cmp(&b.ideal));
    Ok(out)
}

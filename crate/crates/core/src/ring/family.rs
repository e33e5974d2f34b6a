use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use super::factor::factor_rational_prime;
use super::ideal::IdealLattice;
use super::order::{FieldOrder, RingElement};
use super::poly_fp::primes_up_to;
use crate::error::{Error, Result};

/// How a family was produced.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FamilySpec {
    /// One generator list per ideal.
    Explicit(Vec<Vec<RingElement>>),
    /// All P^k with N(P^k) ≤ norm_bound, P prime.
    PrimePower { k: u32, norm_bound: u64 },
}

/// A pairwise coprime family of proper ideals, sorted by ascending norm with
/// lexicographic HNF tie-break. Level ℓ (0-based here) refers to this order.
///
/// A stored prefix stands in for a possibly infinite family; `tail_bound`
/// bounds Σ 1/N(b) over the ideals that were not stored.
#[derive(Clone, Debug)]
pub struct BFamily {
    order: Arc<FieldOrder>,
    ideals: Vec<IdealLattice>,
    partial_sum: BigRational,
    tail_bound: BigRational,
    spec: FamilySpec,
}

/// Σ 1/n over `norms`, summed pairwise without intermediate reduction.
fn reciprocal_sum(norms: &[u64]) -> BigRational {
    fn go(norms: &[u64]) -> (BigInt, BigInt) {
        match norms {
            [] => (BigInt::zero(), BigInt::from(1)),
            [n] => (BigInt::from(1), BigInt::from(*n)),
            _ => {
                let (a, b) = norms.split_at(norms.len() / 2);
                let ((n1, d1), (n2, d2)) = (go(a), go(b));
                (n1 * &d2 + n2 * &d1, d1 * d2)
            }
        }
    }
    let (num, den) = go(norms);
    BigRational::new(num, den)
}

/// floor(m^(1/k))
pub fn integer_root(m: u64, k: u32) -> u64 {
    if k == 1 {
        return m;
    }
    let mut r = (m as f64).powf(1.0 / k as f64) as u64;
    while r > 0 && (r as u128).checked_pow(k).map_or(true, |v| v > m as u128) {
        r -= 1;
    }
    while ((r + 1) as u128).checked_pow(k).is_some_and(|v| v <= m as u128) {
        r += 1;
    }
    r
}

impl BFamily {
    /// Validates and canonically orders `ideals`.
    pub fn from_ideals(
        order: &Arc<FieldOrder>,
        mut ideals: Vec<IdealLattice>,
        tail_bound: BigRational,
        spec: FamilySpec,
    ) -> Result<Self> {
        if ideals.is_empty() {
            return Err(Error::EmptyFamily);
        }
        for b in &ideals {
            if !b.order().same_as(order) {
                return Err(Error::OrderMismatch);
            }
            if b.is_unit() {
                return Err(Error::UnitIdeal);
            }
        }
        ideals.sort();
        if ideals.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::DuplicateIdeal);
        }
        for i in 0..ideals.len() {
            for j in i + 1..ideals.len() {
                if !ideals[i].is_coprime(&ideals[j])? {
                    return Err(Error::NotCoprime);
                }
            }
        }
        let norms: Vec<u64> = ideals.iter().map(|b| b.norm()).collect();
        let partial_sum = reciprocal_sum(&norms);
        Ok(BFamily { order: order.clone(), ideals, partial_sum, tail_bound, spec })
    }

    pub fn order(&self) -> &Arc<FieldOrder> {
        &self.order
    }

    pub fn ideals(&self) -> &[IdealLattice] {
        &self.ideals
    }

    pub fn len(&self) -> usize {
        self.ideals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ideals.is_empty()
    }

    pub fn prefix(&self, l: usize) -> &[IdealLattice] {
        &self.ideals[..l.min(self.ideals.len())]
    }

    pub fn spec(&self) -> &FamilySpec {
        &self.spec
    }

    /// Σ 1/N(b) over the stored ideals.
    pub fn partial_sum(&self) -> &BigRational {
        &self.partial_sum
    }

    /// Declared bound on Σ 1/N(b) over ideals beyond the stored list.
    pub fn tail_bound(&self) -> &BigRational {
        &self.tail_bound
    }

    /// Σ 1/N(b_ℓ) over stored levels ℓ ≥ l, plus the declared tail bound.
    pub fn tail_after(&self, l: usize) -> BigRational {
        let norms: Vec<u64> = self.ideals.iter().skip(l).map(|b| b.norm()).collect();
        let stored = reciprocal_sum(&norms);
        stored + &self.tail_bound
    }

    /// Number of stored ideals with norm ≤ cutoff.
    pub fn truncation_for_norm(&self, cutoff: u64) -> usize {
        self.ideals.partition_point(|b| b.norm() <= cutoff)
    }

    pub fn check_truncation(&self, l: usize) -> Result<()> {
        if l > self.ideals.len() {
            return Err(Error::InvalidArgument(format!(
                "truncation {l} exceeds family size {}",
                self.ideals.len()
            )));
        }
        Ok(())
    }
}

/// Builds a family from an explicit list or the prime-power construction.
pub fn build_bfamily(order: &Arc<FieldOrder>, spec: FamilySpec) -> Result<BFamily> {
    match &spec {
        FamilySpec::Explicit(lists) => {
            let ideals = lists
                .iter()
                .map(|gens| IdealLattice::from_generators(order, gens))
                .collect::<Result<Vec<_>>>()?;
            BFamily::from_ideals(order, ideals, BigRational::zero(), spec)
        }
        &FamilySpec::PrimePower { k, norm_bound } => {
            if k < 2 {
                return Err(Error::InvalidArgument("prime-power exponent must be at least 2".into()));
            }
            // N(P) ≥ p, so N(P^k) ≤ M forces p ≤ M^(1/k).
            let root = integer_root(norm_bound, k);
            let mut ideals = Vec::new();
            for p in primes_up_to(root) {
                for pf in factor_rational_prime(p, order)? {
                    let n = pf.ideal.norm();
                    if (n as u128).checked_pow(k).is_some_and(|v| v <= norm_bound as u128) {
                        let power = pf.ideal.pow(k)?;
                        debug_assert_eq!(power.norm() as u128, (n as u128).pow(k));
                        ideals.push(power);
                    }
                }
            }
            let tail = prime_power_tail_bound(order.degree() as u64, k, norm_bound);
            BFamily::from_ideals(order, ideals, tail, spec)
        }
    }
}

/// Bound on Σ 1/N(P)^k over prime ideals with N(P)^k > M.
///
/// At most d prime ideals share a given norm m, and N(P) = m ≥ t0 where
/// t0 = floor(M^(1/k)) + 1, so the sum is at most
/// d·Σ_{m ≥ t0} m^(-k) ≤ d / ((k-1)(t0-1)^(k-1)).
pub fn prime_power_tail_bound(degree: u64, k: u32, norm_bound: u64) -> BigRational {
    let t0_minus_1 = integer_root(norm_bound, k).max(1);
    let denom = BigInt::from(k - 1) * BigInt::from(t0_minus_1).pow(k - 1);
    BigRational::new(BigInt::from(degree), denom)
}

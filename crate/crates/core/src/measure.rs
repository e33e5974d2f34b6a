//! Cylinder sets, exact Mirsky measures with truncation tails, and empirical
//! frequencies along boxes.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exact::Interval;
use crate::ring::{BFamily, IdealLattice, RingElement};
use crate::sieve::Window;

/// Largest number of zero positions accepted by `mirsky_cylinder` and of
/// shape points accepted by `shape_histogram`.
pub const MAX_PATTERN_POINTS: usize = 20;

/// The cylinder C_{A,B}: configurations equal to 1 on A and 0 on B.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Pattern {
    ones: Vec<RingElement>,
    zeros: Vec<RingElement>,
}

impl Pattern {
    pub fn new(mut ones: Vec<RingElement>, mut zeros: Vec<RingElement>) -> Result<Self> {
        ones.sort();
        ones.dedup();
        zeros.sort();
        zeros.dedup();
        if ones.iter().any(|a| zeros.binary_search(a).is_ok()) {
            return Err(Error::NotDisjoint);
        }
        let dims: HashSet<usize> = ones.iter().chain(&zeros).map(|a| a.coords().len()).collect();
        if dims.len() > 1 {
            return Err(Error::InvalidArgument("pattern points have different dimensions".into()));
        }
        Ok(Pattern { ones, zeros })
    }

    /// The pattern on `shape` whose ones are the points selected by `mask`
    /// (bit j for shape[j]).
    pub fn from_mask(shape: &[RingElement], mask: u64) -> Result<Self> {
        let (mut ones, mut zeros) = (Vec::new(), Vec::new());
        for (j, a) in shape.iter().enumerate() {
            if mask >> j & 1 == 1 {
                ones.push(a.clone());
            } else {
                zeros.push(a.clone());
            }
        }
        Pattern::new(ones, zeros)
    }

    pub fn ones(&self) -> &[RingElement] {
        &self.ones
    }

    pub fn zeros(&self) -> &[RingElement] {
        &self.zeros
    }

    pub fn support(&self) -> Vec<RingElement> {
        self.ones.iter().chain(&self.zeros).cloned().collect()
    }

    pub fn len(&self) -> usize {
        self.ones.len() + self.zeros.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// D(b|A): the number of residue classes modulo b met by A.
pub fn d_count(b: &IdealLattice, a: &[RingElement]) -> Result<usize> {
    let mut seen = HashSet::new();
    for x in a {
        seen.insert(b.residue_rep(x)?);
    }
    Ok(seen.len())
}

/// ∏ (N - h)/N over (norm, h) pairs, reduced once at the end.
struct LevelProduct {
    num: BigInt,
    den: BigInt,
}

impl LevelProduct {
    fn new() -> Self {
        LevelProduct { num: BigInt::one(), den: BigInt::one() }
    }

    fn mul(&mut self, b: &IdealLattice, hits: usize) {
        self.num *= b.norm() - hits as u64;
        self.den *= b.norm();
    }

    fn finish(self) -> BigRational {
        BigRational::new(self.num, self.den)
    }
}

fn check_level(family: &BFamily, l: usize) -> Result<()> {
    family.check_truncation(l)
}

/// ν_η(C_{A,B}) through level `l`, by inclusion–exclusion over D ⊆ B of
/// (-1)^|D| ∏_ℓ (1 - D(b_ℓ|A∪D)/N(b_ℓ)).
///
/// The halfwidth is |A∪B| times the reciprocal-norm mass beyond level `l`
/// (stored levels plus the family's declared tail).
pub fn mirsky_cylinder(pattern: &Pattern, family: &BFamily, l: usize) -> Result<Interval> {
    check_level(family, l)?;
    let k = pattern.zeros().len();
    if k > MAX_PATTERN_POINTS {
        return Err(Error::BudgetExceeded { needed: 1u128 << k, budget: 1u128 << MAX_PATTERN_POINTS });
    }
    let ideals = family.prefix(l);
    let terms: Vec<BigRational> = (0..1u64 << k)
        .into_par_iter()
        .map(|mask| {
            let mut set = pattern.ones().to_vec();
            set.extend((0..k).filter(|j| mask >> j & 1 == 1).map(|j| pattern.zeros()[j].clone()));
            let mut acc = LevelProduct::new();
            for b in ideals {
                let hits = d_count(b, &set)?;
                if hits as u64 >= b.norm() {
                    return Ok(BigRational::zero());
                }
                acc.mul(b, hits);
            }
            let prod = acc.finish();
            Ok(if mask.count_ones() % 2 == 1 { -prod } else { prod })
        })
        .collect::<Result<_>>()?;
    let value: BigRational = terms.into_iter().sum();
    let halfwidth = if pattern.is_empty() {
        BigRational::zero()
    } else {
        family.tail_after(l) * BigInt::from(pattern.len())
    };
    Ok(Interval { value, halfwidth })
}

/// ∏_{ℓ ≤ l} (1 - s_ℓ/N(b_ℓ)): the density of F_n ∖ Z_L when A_ℓ has s_ℓ
/// classes, and the entropy of Y_{≥s}. Levels past `s.len()` use s_ℓ = 1.
/// The halfwidth covers the levels beyond `l`, where s_ℓ = 1.
pub fn product_formula(family: &BFamily, l: usize, s: &[u64]) -> Result<Interval> {
    check_level(family, l)?;
    let mut acc = LevelProduct::new();
    for (i, b) in family.prefix(l).iter().enumerate() {
        let si = s.get(i).copied().unwrap_or(1);
        if si == 0 || si > b.norm() {
            return Err(Error::InvalidArgument(format!("s at level {i} must lie in [1, {}]", b.norm())));
        }
        acc.mul(b, si as usize);
    }
    Ok(Interval { value: acc.finish(), halfwidth: family.tail_after(l) })
}

/// Density of B_l-free elements, ∏ (1 - 1/N(b_ℓ)).
pub fn density(family: &BFamily, l: usize) -> Result<Interval> {
    product_formula(family, l, &[])
}

/// Counts of every {0,1}-pattern on a finite shape over the window's interior
/// positions, i.e. those a with a + shape inside the window.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShapeHistogram {
    pub shape: Vec<RingElement>,
    /// Entry m counts positions whose pattern has ones exactly at the shape
    /// points selected by the bits of m.
    pub counts: Vec<u64>,
    pub interior: u64,
}

impl ShapeHistogram {
    pub fn frequency(&self, mask: u64) -> BigRational {
        BigRational::new(BigInt::from(self.counts[mask as usize]), BigInt::from(self.interior))
    }
}

pub fn shape_histogram(window: &Window, shape: &[RingElement]) -> Result<ShapeHistogram> {
    if shape.len() > MAX_PATTERN_POINTS {
        return Err(Error::BudgetExceeded { needed: 1u128 << shape.len(), budget: 1u128 << MAX_PATTERN_POINTS });
    }
    let region = window.region();
    let d = region.dim();
    if shape.iter().any(|s| s.coords().len() != d) {
        return Err(Error::DegreeMismatch { expected: d, found: shape[0].coords().len() });
    }
    let offsets: Vec<Vec<i64>> = shape.iter().map(|s| s.coords().to_vec()).collect();
    let interior = region.interior(&offsets).ok_or(Error::EmptyInterior)?;
    let strides = region.strides();
    let deltas: Vec<isize> =
        offsets.iter().map(|s| s.iter().zip(&strides).map(|(x, st)| *x as isize * *st as isize).sum()).collect();
    let bits = window.bits();
    let slabs = interior.slabs(rayon::current_num_threads() * 4);
    let partial: Vec<Vec<u64>> = slabs
        .par_iter()
        .map(|slab| {
            let mut counts = vec![0u64; 1 << shape.len()];
            for i in 0..slab.point_count() as usize {
                let base = region.index_of(&slab.point_at(i)).unwrap() as isize;
                let mut mask = 0usize;
                for (j, delta) in deltas.iter().enumerate() {
                    if bits[(base + delta) as usize] {
                        mask |= 1 << j;
                    }
                }
                counts[mask] += 1;
            }
            counts
        })
        .collect();
    let mut counts = vec![0u64; 1 << shape.len()];
    for p in partial {
        for (c, x) in counts.iter_mut().zip(p) {
            *c += x;
        }
    }
    Ok(ShapeHistogram { shape: shape.to_vec(), counts, interior: interior.point_count() as u64 })
}

/// Fraction of interior positions a at which the window matches the pattern
/// translated by a.
pub fn empirical_frequency(window: &Window, pattern: &Pattern) -> Result<BigRational> {
    let shape = pattern.support();
    if shape.is_empty() {
        if window.is_empty() {
            return Err(Error::EmptyInterior);
        }
        return Ok(BigRational::one());
    }
    let hist = shape_histogram(window, &shape)?;
    let mask = (0..pattern.ones().len()).fold(0u64, |m, j| m | 1 << j);
    Ok(hist.frequency(mask))
}

//! The B-free indicator η on coordinate boxes.
//!
//! Marking walks the coset c + b inside the box directly: the HNF basis is
//! upper triangular, so the last coordinate of a lattice point depends only
//! on the last basis coefficient, the one before on the last two, and so on.
//! Each ideal therefore costs O(points / N(b) + side) instead of a residue
//! test per point.

use bitvec::prelude::*;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{Region, DEFAULT_POINT_BUDGET};
use crate::ring::{BFamily, IdealLattice, RingElement};

pub type Bits = BitVec<u8, Lsb0>;

/// A {0,1}-configuration restricted to a box, in the box's row-major order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Window {
    region: Region,
    bits: Bits,
    truncation: Option<usize>,
}

impl Window {
    pub fn new(region: Region, bits: Bits) -> Result<Self> {
        if bits.len() as u128 != region.point_count() {
            return Err(Error::InvalidArgument(format!(
                "window has {} bits but the box has {} points",
                bits.len(),
                region.point_count()
            )));
        }
        Ok(Window { region, bits, truncation: None })
    }

    pub fn filled(region: Region, value: bool, budget: u64) -> Result<Self> {
        let n = region.check_budget(budget)?;
        Ok(Window { region, bits: BitVec::repeat(value, n), truncation: None })
    }

    /// Window from an indicator function of the points.
    pub fn from_fn(region: Region, budget: u64, mut f: impl FnMut(&[i64]) -> bool) -> Result<Self> {
        let n = region.check_budget(budget)?;
        let mut bits = Bits::with_capacity(n);
        for i in 0..n {
            bits.push(f(&region.point_at(i)));
        }
        Ok(Window { region, bits, truncation: None })
    }

    pub fn region(&self) -> &Region {
        &self.region
    }

    pub fn bits(&self) -> &BitSlice<u8, Lsb0> {
        &self.bits
    }

    pub fn into_bits(self) -> Bits {
        self.bits
    }

    /// Number of family levels used to sieve this window, if it was sieved.
    pub fn truncation(&self) -> Option<usize> {
        self.truncation
    }

    pub(crate) fn with_truncation(mut self, l: Option<usize>) -> Self {
        self.truncation = l;
        self
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn count_ones(&self) -> usize {
        self.bits.count_ones()
    }

    pub fn get(&self, x: &[i64]) -> Option<bool> {
        self.region.index_of(x).map(|i| self.bits[i])
    }

    pub fn set(&mut self, x: &[i64], value: bool) -> Result<()> {
        let i = self
            .region
            .index_of(x)
            .ok_or_else(|| Error::InvalidArgument("point outside the window".into()))?;
        self.bits.set(i, value);
        Ok(())
    }

    /// Coordinates of the 1-bits.
    pub fn support(&self) -> impl Iterator<Item = Vec<i64>> + '_ {
        self.bits.iter_ones().map(|i| self.region.point_at(i))
    }

    /// Restriction to a sub-box.
    pub fn restrict(&self, sub: &Region) -> Result<Window> {
        if !sub.is_subset_of(&self.region) || sub.dim() != self.region.dim() {
            return Err(Error::InvalidArgument("restriction box is not inside the window".into()));
        }
        let n = sub.point_count() as usize;
        let mut bits = Bits::with_capacity(n);
        for i in 0..n {
            bits.push(self.bits[self.region.index_of(&sub.point_at(i)).unwrap()]);
        }
        Ok(Window { region: sub.clone(), bits, truncation: self.truncation })
    }

    /// `x ≤ y` coordinatewise on a common box.
    pub fn is_below(&self, other: &Window) -> bool {
        self.region == other.region && self.bits.iter_ones().all(|i| other.bits[i])
    }
}

fn div_ceil(a: i64, b: i64) -> i64 {
    -((-a).div_euclid(b))
}

/// Calls `visit` with the row-major index of every point of `offset + b`
/// inside `region`. `offset` must already be reduced modulo b.
pub(crate) fn walk_coset(region: &Region, ideal: &IdealLattice, offset: &[i64], visit: &mut impl FnMut(usize)) {
    let strides = region.strides();
    walk_level(region, ideal.basis(), &strides, offset.len() - 1, offset, 0, visit);
}

fn walk_level(
    region: &Region,
    basis: &[Vec<i64>],
    strides: &[usize],
    t: usize,
    cur: &[i64],
    idx_base: usize,
    visit: &mut impl FnMut(usize),
) {
    let (lo, hi) = (region.lo()[t], region.hi()[t]);
    let diag = basis[t][t];
    let mut k = div_ceil(lo - cur[t], diag);
    loop {
        let x = cur[t] + k * diag;
        if x > hi {
            break;
        }
        let idx = idx_base + (x - lo) as usize * strides[t];
        if t == 0 {
            visit(idx);
        } else {
            let next: Vec<i64> = (0..t).map(|i| cur[i] + k * basis[i][t]).collect();
            walk_level(region, basis, strides, t - 1, &next, idx, visit);
        }
        k += 1;
    }
}

/// Options for sieving.
#[derive(Clone, Copy, Debug)]
pub struct SieveOptions {
    /// Maximum number of points in a window.
    pub budget: u64,
    /// Number of slabs along coordinate 0 processed in parallel; 0 picks a
    /// value from the thread pool size. The output does not depend on it.
    pub parts: usize,
}

impl Default for SieveOptions {
    fn default() -> Self {
        SieveOptions { budget: DEFAULT_POINT_BUDGET, parts: 0 }
    }
}

/// All-ones window with every coset `offsets[ℓ] + b_ℓ` cleared.
fn clear_cosets(region: &Region, ideals: &[IdealLattice], offsets: &[Vec<i64>], opts: SieveOptions) -> Result<Bits> {
    region.check_budget(opts.budget)?;
    let parts = if opts.parts == 0 { rayon::current_num_threads() * 4 } else { opts.parts };
    let slabs = region.slabs(parts);
    let pieces: Vec<Bits> = slabs
        .par_iter()
        .map(|slab| {
            let mut bits = Bits::repeat(true, slab.point_count() as usize);
            for (b, c) in ideals.iter().zip(offsets) {
                walk_coset(slab, b, c, &mut |i| bits.set(i, false));
            }
            bits
        })
        .collect();
    let mut out = Bits::with_capacity(region.point_count() as usize);
    for p in pieces {
        out.extend_from_bitslice(&p);
    }
    Ok(out)
}

/// η restricted to `region` for the first `l` ideals of the family:
/// bit 1 exactly at points lying in none of b_1, …, b_l.
pub fn sieve_window(family: &BFamily, region: &Region, l: usize) -> Result<Window> {
    sieve_window_with(family, region, l, SieveOptions::default())
}

pub fn sieve_window_with(family: &BFamily, region: &Region, l: usize, opts: SieveOptions) -> Result<Window> {
    family.check_truncation(l)?;
    check_dim(family, region)?;
    let ideals = family.prefix(l);
    let zero = vec![0i64; region.dim()];
    let offsets = vec![zero; ideals.len()];
    let bits = clear_cosets(region, ideals, &offsets, opts)?;
    Ok(Window { region: region.clone(), bits, truncation: Some(l) })
}

/// All-ones window with `offsets[ℓ] + b_ℓ` cleared; offsets are arbitrary
/// elements and get reduced here.
pub(crate) fn coset_window(
    family: &BFamily,
    region: &Region,
    offsets: &[RingElement],
    opts: SieveOptions,
) -> Result<Window> {
    check_dim(family, region)?;
    let ideals = family.prefix(offsets.len());
    let reduced = ideals
        .iter()
        .zip(offsets)
        .map(|(b, c)| b.residue_rep(c).map(|r| r.0))
        .collect::<Result<Vec<_>>>()?;
    let bits = clear_cosets(region, ideals, &reduced, opts)?;
    Ok(Window { region: region.clone(), bits, truncation: Some(offsets.len()) })
}

fn check_dim(family: &BFamily, region: &Region) -> Result<()> {
    let d = family.order().degree();
    if region.dim() != d {
        return Err(Error::DegreeMismatch { expected: d, found: region.dim() });
    }
    Ok(())
}

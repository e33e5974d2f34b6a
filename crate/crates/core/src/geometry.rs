//! Coordinate boxes in the order, Følner boxes H_n and their tiling, and the
//! identification between an abstract label lattice and the order.
//!
//! Points are power-basis coordinate vectors. Every box enumerates its points
//! in row-major order: coordinate 0 varies slowest and the last coordinate
//! fastest. Bit arrays over a box use the same order.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::exact::det_bareiss;
use crate::ring::{FieldOrder, IdealLattice, RingElement};
use num_bigint::BigInt;
use num_traits::Signed;

pub const DEFAULT_POINT_BUDGET: u64 = 100_000_000;

/// Axis-aligned box `lo[t] ≤ x[t] ≤ hi[t]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Region {
    lo: Vec<i64>,
    hi: Vec<i64>,
}

impl Region {
    pub fn new(lo: Vec<i64>, hi: Vec<i64>) -> Result<Self> {
        if lo.len() != hi.len() || lo.is_empty() {
            return Err(Error::InvalidArgument("box bounds must have equal nonzero length".into()));
        }
        if lo.iter().zip(&hi).any(|(a, b)| a > b) {
            return Err(Error::InvalidArgument("box lower bound exceeds upper bound".into()));
        }
        Ok(Region { lo, hi })
    }

    /// The cube of radius n around the origin, i.e. H_n.
    pub fn centered(dim: usize, n: i64) -> Self {
        Region { lo: vec![-n; dim], hi: vec![n; dim] }
    }

    /// The cube of radius n around `center`.
    pub fn cube_at(center: &[i64], n: i64) -> Self {
        Region { lo: center.iter().map(|c| c - n).collect(), hi: center.iter().map(|c| c + n).collect() }
    }

    /// One-dimensional segment `[lo, hi]`.
    pub fn segment(lo: i64, hi: i64) -> Result<Self> {
        Region::new(vec![lo], vec![hi])
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn lo(&self) -> &[i64] {
        &self.lo
    }

    pub fn hi(&self) -> &[i64] {
        &self.hi
    }

    pub fn side(&self, t: usize) -> u64 {
        (self.hi[t] - self.lo[t]) as u64 + 1
    }

    pub fn point_count(&self) -> u128 {
        (0..self.dim()).map(|t| self.side(t) as u128).product()
    }

    pub fn check_budget(&self, budget: u64) -> Result<usize> {
        let points = self.point_count();
        if points > budget as u128 {
            return Err(Error::SizeOverflow { points, budget });
        }
        Ok(points as usize)
    }

    /// Row-major strides (last coordinate has stride 1).
    pub fn strides(&self) -> Vec<usize> {
        let d = self.dim();
        let mut s = vec![1usize; d];
        for t in (0..d.saturating_sub(1)).rev() {
            s[t] = s[t + 1] * self.side(t + 1) as usize;
        }
        s
    }

    pub fn contains(&self, x: &[i64]) -> bool {
        x.len() == self.dim() && x.iter().zip(&self.lo).zip(&self.hi).all(|((v, l), h)| l <= v && v <= h)
    }

    pub fn index_of(&self, x: &[i64]) -> Option<usize> {
        if !self.contains(x) {
            return None;
        }
        let strides = self.strides();
        Some(x.iter().zip(&self.lo).zip(&strides).map(|((v, l), s)| (v - l) as usize * s).sum())
    }

    pub fn point_at(&self, mut idx: usize) -> Vec<i64> {
        let d = self.dim();
        let mut x = vec![0i64; d];
        for t in (0..d).rev() {
            let side = self.side(t) as usize;
            x[t] = self.lo[t] + (idx % side) as i64;
            idx /= side;
        }
        x
    }

    pub fn points(&self) -> impl Iterator<Item = Vec<i64>> + '_ {
        (0..self.point_count() as usize).map(move |i| self.point_at(i))
    }

    /// Visits every point in row-major order without allocating per point.
    pub fn for_each_point(&self, mut f: impl FnMut(usize, &[i64])) {
        let d = self.dim();
        let n = self.point_count() as usize;
        let mut x = self.lo.clone();
        for i in 0..n {
            f(i, &x);
            for t in (0..d).rev() {
                if x[t] < self.hi[t] {
                    x[t] += 1;
                    break;
                }
                x[t] = self.lo[t];
            }
        }
    }

    pub fn translate(&self, offset: &[i64]) -> Region {
        Region {
            lo: self.lo.iter().zip(offset).map(|(a, b)| a + b).collect(),
            hi: self.hi.iter().zip(offset).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn intersect(&self, other: &Region) -> Option<Region> {
        let lo: Vec<i64> = self.lo.iter().zip(&other.lo).map(|(a, b)| *a.max(b)).collect();
        let hi: Vec<i64> = self.hi.iter().zip(&other.hi).map(|(a, b)| *a.min(b)).collect();
        Region::new(lo, hi).ok()
    }

    pub fn is_subset_of(&self, other: &Region) -> bool {
        self.lo.iter().zip(&other.lo).all(|(a, b)| a >= b) && self.hi.iter().zip(&other.hi).all(|(a, b)| a <= b)
    }

    /// Positions `a` with `a + s` inside the box for every offset `s`.
    pub fn interior(&self, offsets: &[Vec<i64>]) -> Option<Region> {
        let d = self.dim();
        let mut lo = self.lo.clone();
        let mut hi = self.hi.clone();
        for s in offsets {
            for t in 0..d {
                lo[t] = lo[t].max(self.lo[t] - s[t]);
                hi[t] = hi[t].min(self.hi[t] - s[t]);
            }
        }
        Region::new(lo, hi).ok()
    }

    /// Splits along coordinate 0 into at most `parts` consecutive slabs.
    /// In row-major order each slab is a contiguous range of indices.
    pub fn slabs(&self, parts: usize) -> Vec<Region> {
        let side = self.side(0);
        let parts = (parts.max(1) as u64).min(side);
        let base = side / parts;
        let extra = side % parts;
        let mut out = Vec::with_capacity(parts as usize);
        let mut start = self.lo[0];
        for i in 0..parts {
            let len = base + u64::from(i < extra);
            let mut lo = self.lo.clone();
            let mut hi = self.hi.clone();
            lo[0] = start;
            hi[0] = start + len as i64 - 1;
            start += len as i64;
            out.push(Region { lo, hi });
        }
        out
    }
}

/// The Følner box H_n = {x : |x_t| ≤ n for all t}.
#[derive(Clone, Debug)]
pub struct FolnerBox {
    pub n: u64,
    order: Arc<FieldOrder>,
}

impl FolnerBox {
    pub fn new(order: &Arc<FieldOrder>, n: u64) -> Self {
        FolnerBox { n, order: order.clone() }
    }

    pub fn order(&self) -> &Arc<FieldOrder> {
        &self.order
    }

    pub fn region(&self) -> Region {
        Region::centered(self.order.degree(), self.n as i64)
    }

    pub fn point_count(&self) -> u128 {
        (2 * self.n as u128 + 1).pow(self.order.degree() as u32)
    }

    pub fn contains(&self, a: &RingElement) -> bool {
        a.coords().iter().all(|c| c.unsigned_abs() <= self.n)
    }
}

/// The points of H_n in row-major order, subject to a point budget.
pub fn box_points(fbox: &FolnerBox, budget: u64) -> Result<impl Iterator<Item = RingElement>> {
    let region = fbox.region();
    region.check_budget(budget)?;
    let n = region.point_count() as usize;
    Ok((0..n).map(move |i| RingElement(region.point_at(i))))
}

/// Centers n·(2j_t − m − 1), j_t = 1..m, of the m^d translates of H_n that
/// cover H_{nm}. Neighbouring translates share their boundary layer.
pub fn tile_translates(dim: usize, n: u64, m: u64) -> Vec<Vec<i64>> {
    let offsets: Vec<i64> = (1..=m as i64).map(|j| n as i64 * (2 * j - m as i64 - 1)).collect();
    let mut out = vec![Vec::new()];
    for _ in 0..dim {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                offsets.iter().map(move |&o| {
                    let mut v = prefix.clone();
                    v.push(o);
                    v
                })
            })
            .collect();
    }
    out
}

/// Group isomorphism j from a rank-d label lattice onto the order,
/// given by a unimodular matrix acting on coordinate vectors.
#[derive(Clone, Debug)]
pub struct LatticeBridge {
    order: Arc<FieldOrder>,
    matrix: Vec<Vec<i64>>,
}

impl LatticeBridge {
    pub fn identity(order: &Arc<FieldOrder>) -> Self {
        let d = order.degree();
        let matrix = (0..d).map(|i| (0..d).map(|j| i64::from(i == j)).collect()).collect();
        LatticeBridge { order: order.clone(), matrix }
    }

    pub fn new(order: &Arc<FieldOrder>, matrix: Vec<Vec<i64>>) -> Result<Self> {
        let d = order.degree();
        if matrix.len() != d || matrix.iter().any(|r| r.len() != d) {
            return Err(Error::InvalidArgument("bridge matrix must be d×d".into()));
        }
        let big: Vec<Vec<BigInt>> = matrix.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
        if det_bareiss(&big).abs() != BigInt::from(1) {
            return Err(Error::InvalidArgument("bridge matrix is not unimodular".into()));
        }
        Ok(LatticeBridge { order: order.clone(), matrix })
    }

    pub fn apply(&self, label: &[i64]) -> Result<RingElement> {
        let d = self.order.degree();
        let mut out = vec![0i64; d];
        for (i, row) in self.matrix.iter().enumerate() {
            let mut acc: i128 = 0;
            for (m, x) in row.iter().zip(label) {
                acc += *m as i128 * *x as i128;
            }
            out[i] = i64::try_from(acc).map_err(|_| Error::Overflow("bridge"))?;
        }
        Ok(RingElement(out))
    }

    /// The image of bΛ, verified to be an ideal; equals (b) for every bridge.
    pub fn bridge_ideal(&self, b: i64) -> Result<IdealLattice> {
        if b < 2 {
            return Err(Error::InvalidArgument("bridge scale must be at least 2".into()));
        }
        let d = self.order.degree();
        let columns = (0..d)
            .map(|j| {
                let mut e = vec![0i64; d];
                e[j] = b;
                self.apply(&e).map(|r| r.0)
            })
            .collect::<Result<Vec<_>>>()?;
        IdealLattice::from_lattice(&self.order, &columns)
    }
}

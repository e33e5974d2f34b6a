//! The coding map φ from the rotation group G = ∏ O/b_ℓ to configurations,
//! the missed-class map θ, proximality scans and joining fibers.
//!
//! Orientation: φ(g)(a) = 0 exactly when g_ℓ + a ∈ b_ℓ for some ℓ, so the
//! zeros of φ(g) at level ℓ form the coset -g_ℓ + b_ℓ. θ reports the g_ℓ whose
//! coset -g_ℓ + b_ℓ carries no 1-bit; the joining fiber reports c = -g_ℓ.

use std::collections::BTreeSet;

use rand::Rng;

use crate::error::{Error, Result};
use crate::geometry::Region;
use crate::ring::{BFamily, RingElement};
use crate::sieve::{coset_window, SieveOptions, Window};

/// Largest number of untested classes listed for one level.
pub const MAX_LISTED_CLASSES: u64 = 1 << 22;

/// A point of G_L = ∏_{ℓ<L} O/b_ℓ, stored as canonical residues.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GroupPoint {
    residues: Vec<RingElement>,
}

impl GroupPoint {
    /// Reduces each entry modulo its ideal.
    pub fn new(family: &BFamily, residues: &[RingElement]) -> Result<Self> {
        family.check_truncation(residues.len())?;
        let residues = family
            .ideals()
            .iter()
            .zip(residues)
            .map(|(b, r)| b.residue_rep(r))
            .collect::<Result<_>>()?;
        Ok(GroupPoint { residues })
    }

    pub fn zero(family: &BFamily, l: usize) -> Result<Self> {
        family.check_truncation(l)?;
        Ok(GroupPoint { residues: vec![family.order().zero(); l] })
    }

    /// Haar-uniform point of G_L.
    pub fn random(family: &BFamily, l: usize, rng: &mut impl Rng) -> Result<Self> {
        family.check_truncation(l)?;
        let residues = family
            .prefix(l)
            .iter()
            .map(|b| b.residues().nth(rng.gen_range(0..b.norm()) as usize).unwrap())
            .collect();
        Ok(GroupPoint { residues })
    }

    pub fn residues(&self) -> &[RingElement] {
        &self.residues
    }

    pub fn len(&self) -> usize {
        self.residues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.residues.is_empty()
    }

    /// T_a g = g + (a mod b_ℓ)_ℓ.
    pub fn rotate(&self, family: &BFamily, a: &RingElement) -> Result<Self> {
        let order = family.order();
        let residues = family
            .ideals()
            .iter()
            .zip(&self.residues)
            .map(|(b, g)| b.residue_rep(&order.add(g, a)?))
            .collect::<Result<_>>()?;
        Ok(GroupPoint { residues })
    }
}

/// φ(g) on a box.
pub fn phi_window(g: &GroupPoint, region: &Region, family: &BFamily) -> Result<Window> {
    phi_window_with(g, region, family, SieveOptions::default())
}

pub fn phi_window_with(g: &GroupPoint, region: &Region, family: &BFamily, opts: SieveOptions) -> Result<Window> {
    let order = family.order();
    let offsets = g.residues().iter().map(|r| order.neg(r)).collect::<Result<Vec<_>>>()?;
    coset_window(family, region, &offsets, opts)
}

/// Per-level residue sets of a θ or fiber scan.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelFiber {
    pub residues: Vec<RingElement>,
    /// Classes with no point inside the window; never listed in `residues`.
    pub untested: Vec<RingElement>,
}

impl LevelFiber {
    pub fn is_complete(&self) -> bool {
        self.untested.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiberReport {
    pub levels: Vec<LevelFiber>,
}

impl FiberReport {
    /// The unique residue at every level, when each level is complete and a
    /// singleton.
    pub fn singletons(&self) -> Option<Vec<RingElement>> {
        self.levels
            .iter()
            .map(|f| (f.is_complete() && f.residues.len() == 1).then(|| f.residues[0].clone()))
            .collect()
    }
}

/// Dense flags over the N(b) classes when N(b) is small, a set otherwise.
enum ClassSet {
    Dense(Vec<bool>),
    Sparse(BTreeSet<u64>),
}

impl ClassSet {
    fn new(norm: u64) -> Self {
        if norm <= 1 << 24 {
            ClassSet::Dense(vec![false; norm as usize])
        } else {
            ClassSet::Sparse(BTreeSet::new())
        }
    }

    fn insert(&mut self, k: u64) {
        match self {
            ClassSet::Dense(v) => v[k as usize] = true,
            ClassSet::Sparse(s) => {
                s.insert(k);
            }
        }
    }

    fn contains(&self, k: u64) -> bool {
        match self {
            ClassSet::Dense(v) => v[k as usize],
            ClassSet::Sparse(s) => s.contains(&k),
        }
    }

    fn members(&self) -> Vec<u64> {
        match self {
            ClassSet::Dense(v) => (0..v.len() as u64).filter(|&k| v[k as usize]).collect(),
            ClassSet::Sparse(s) => s.iter().copied().collect(),
        }
    }
}

fn decode(diag: &[i64], mut idx: u64) -> RingElement {
    let mut v = vec![0i64; diag.len()];
    for i in (0..diag.len()).rev() {
        v[i] = (idx % diag[i] as u64) as i64;
        idx /= diag[i] as u64;
    }
    RingElement(v)
}

fn fiber_report(w: &Window, family: &BFamily, l: usize, joining: bool) -> Result<FiberReport> {
    family.check_truncation(l)?;
    let region = w.region();
    let order = family.order();
    let d = order.degree();
    if region.dim() != d {
        return Err(Error::DegreeMismatch { expected: d, found: region.dim() });
    }
    let mut levels = Vec::with_capacity(l);
    for b in family.prefix(l) {
        let mut seen = ClassSet::new(b.norm());
        let mut hit = ClassSet::new(b.norm());
        let mut v = vec![0i64; d];
        let bits = w.bits();
        region.for_each_point(|i, x| {
            v.copy_from_slice(x);
            b.reduce_in_place(&mut v);
            let k = b.residue_index(&v);
            seen.insert(k);
            if bits[i] {
                hit.insert(k);
            }
        });
        let diag = b.diagonal();
        // class c is the coset -g + b, so g = -c
        let orient = |k: u64| -> Result<RingElement> {
            let c = decode(&diag, k);
            if joining {
                Ok(c)
            } else {
                b.residue_rep(&order.neg(&c)?)
            }
        };
        let members = seen.members();
        let seen_count = members.len() as u64;
        let mut residues = members.into_iter().filter(|&k| !hit.contains(k)).map(orient).collect::<Result<Vec<_>>>()?;
        residues.sort();
        let mut untested = Vec::new();
        if seen_count < b.norm() {
            if b.norm() - seen_count > MAX_LISTED_CLASSES {
                return Err(Error::BudgetExceeded {
                    needed: (b.norm() - seen_count) as u128,
                    budget: MAX_LISTED_CLASSES as u128,
                });
            }
            for k in 0..b.norm() {
                if !seen.contains(k) {
                    untested.push(orient(k)?);
                }
            }
        }
        untested.sort();
        levels.push(LevelFiber { residues, untested });
    }
    Ok(FiberReport { levels })
}

/// θ(w): for each level, the residues g with no 1-bit of w on -g + b_ℓ.
pub fn theta_window(w: &Window, family: &BFamily, l: usize) -> Result<FiberReport> {
    fiber_report(w, family, l, false)
}

/// F_ℓ(w) in the joining orientation: θ(w) with every residue negated.
pub fn joining_fiber(w: &Window, family: &BFamily, l: usize) -> Result<FiberReport> {
    fiber_report(w, family, l, true)
}

/// w ≤ φ(θ(w)) on the window's box. Fails with `Inconclusive(ℓ)` when θ is
/// not a complete singleton at level ℓ.
pub fn check_phi_theta(w: &Window, family: &BFamily, l: usize) -> Result<bool> {
    let theta = theta_window(w, family, l)?;
    let mut g = Vec::with_capacity(l);
    for (i, f) in theta.levels.iter().enumerate() {
        if !f.is_complete() || f.residues.len() != 1 {
            return Err(Error::Inconclusive(i));
        }
        g.push(f.residues[0].clone());
    }
    let g = GroupPoint::new(family, &g)?;
    let phi = phi_window(&g, w.region(), family)?;
    Ok(w.is_below(&phi))
}

/// All positions a with w ≡ 0 on the cube a + {0, …, side-1}^d, with gap
/// statistics per coordinate direction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZeroScan {
    pub side: u64,
    pub positions: Vec<Vec<i64>>,
    /// Number of positions examined.
    pub interior: u64,
    /// Per direction t: the largest distance between consecutive positions
    /// on a line parallel to axis t (None when no line has two positions).
    pub max_gap: Vec<Option<u64>>,
}

pub fn zero_window_scan(w: &Window, side: u64) -> Result<ZeroScan> {
    if side == 0 {
        return Err(Error::InvalidArgument("zero-window side must be positive".into()));
    }
    let region = w.region();
    let d = region.dim();
    let corner = Region::new(vec![0; d], vec![side as i64 - 1; d])?;
    let offsets: Vec<Vec<i64>> = corner.points().collect();
    let interior = region.interior(&[vec![0; d], vec![side as i64 - 1; d]]).ok_or(Error::EmptyInterior)?;
    let strides = region.strides();
    let deltas: Vec<usize> = offsets.iter().map(|s| s.iter().zip(&strides).map(|(x, st)| *x as usize * st).sum()).collect();
    let bits = w.bits();
    let mut positions = Vec::new();
    for i in 0..interior.point_count() as usize {
        let a = interior.point_at(i);
        let base = region.index_of(&a).unwrap();
        if deltas.iter().all(|dl| !bits[base + dl]) {
            positions.push(a);
        }
    }
    let max_gap = (0..d).map(|t| max_gap_along(&positions, t)).collect();
    Ok(ZeroScan { side, positions, interior: interior.point_count() as u64, max_gap })
}

fn max_gap_along(positions: &[Vec<i64>], t: usize) -> Option<u64> {
    // group by the other coordinates, then take consecutive differences
    let mut lines: Vec<(Vec<i64>, i64)> = positions
        .iter()
        .map(|p| {
            let mut key = p.clone();
            let x = key.remove(t);
            (key, x)
        })
        .collect();
    lines.sort();
    lines.windows(2).filter(|w| w[0].0 == w[1].0).map(|w| (w[1].1 - w[0].1) as u64).max()
}

/// The residue classes a mod ∏ b_ℓ forced onto zero windows by the CRT:
/// for each assignment of shape points to levels, the a with
/// a + shape[j] ∈ b_{σ(j)}. One canonical representative per class.
pub fn crt_zero_classes(family: &BFamily, l: usize, shape: &[RingElement]) -> Result<Vec<RingElement>> {
    family.check_truncation(l)?;
    let ideals = family.prefix(l);
    let k = shape.len();
    if k == 0 || k > ideals.len() {
        return Err(Error::InvalidArgument("shape must be nonempty and no larger than the family".into()));
    }
    let order = family.order();
    let mut out = BTreeSet::new();
    // injective maps from shape points to levels
    let mut assign = vec![0usize; k];
    loop {
        let distinct: BTreeSet<usize> = assign.iter().copied().collect();
        if distinct.len() == k {
            let residues = shape.iter().map(|s| order.neg(s)).collect::<Result<Vec<_>>>()?;
            let chosen: Vec<_> = assign.iter().map(|&i| ideals[i].clone()).collect();
            out.insert(crate::ring::crt(&residues, &chosen)?);
        }
        let mut j = 0;
        while j < k {
            assign[j] += 1;
            if assign[j] < ideals.len() {
                break;
            }
            assign[j] = 0;
            j += 1;
        }
        if j == k {
            break;
        }
    }
    Ok(out.into_iter().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{build_bfamily, make_order, FamilySpec, FieldOrder};
    use crate::sieve::sieve_window;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::sync::Arc;

    fn z() -> Arc<FieldOrder> {
        make_order(&[0, 1]).unwrap()
    }

    fn ints(o: &Arc<FieldOrder>, v: &[i64]) -> BFamily {
        build_bfamily(o, FamilySpec::Explicit(v.iter().map(|&n| vec![o.from_int(n)]).collect())).unwrap()
    }

    fn seg(a: i64, b: i64) -> Region {
        Region::segment(a, b).unwrap()
    }

    fn int(x: i64) -> RingElement {
        RingElement(vec![x])
    }

    #[test]
    fn phi_of_zero_is_eta() {
        let o = z();
        let fam = ints(&o, &[4, 9]);
        let g = GroupPoint::zero(&fam, 2).unwrap();
        assert_eq!(phi_window(&g, &seg(0, 11), &fam).unwrap(), sieve_window(&fam, &seg(0, 11), 2).unwrap());
    }

    #[test]
    fn phi_parity() {
        let o = z();
        let fam = ints(&o, &[2]);
        let g = GroupPoint::new(&fam, &[int(1)]).unwrap();
        let w = phi_window(&g, &seg(-5, 5), &fam).unwrap();
        for a in -5..=5 {
            assert_eq!(w.get(&[a]), Some(a % 2 == 0));
        }
        let th = theta_window(&w, &fam, 1).unwrap();
        assert_eq!(th.singletons(), Some(vec![int(1)]));
    }

    #[test]
    fn equivariance_on_small_box() {
        let o = z();
        let fam = ints(&o, &[4, 9, 25]);
        let region = seg(-8, 8);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let g = GroupPoint::random(&fam, 3, &mut rng).unwrap();
            let a = rng.gen_range(-2..=2);
            let w = phi_window(&g, &region, &fam).unwrap();
            let wa = phi_window(&g.rotate(&fam, &int(a)).unwrap(), &region, &fam).unwrap();
            for x in -8..=8 {
                if let Some(shifted) = w.get(&[x + a]) {
                    assert_eq!(wa.get(&[x]).unwrap(), shifted);
                }
            }
        }
    }

    #[test]
    fn theta_of_eta_and_zero_window() {
        let o = z();
        let fam = ints(&o, &[4, 9]);
        let eta = sieve_window(&fam, &seg(-100, 100), 2).unwrap();
        let th = theta_window(&eta, &fam, 2).unwrap();
        assert_eq!(th.singletons(), Some(vec![int(0), int(0)]));
        assert!(check_phi_theta(&eta, &fam, 2).unwrap());

        let zero = Window::filled(seg(-20, 20), false, 100).unwrap();
        let th = theta_window(&zero, &fam, 2).unwrap();
        assert_eq!(th.levels[0].residues.len(), 4);
        assert_eq!(th.levels[1].residues.len(), 9);
        assert_eq!(check_phi_theta(&zero, &fam, 2).unwrap_err(), Error::Inconclusive(0));

        let mut flipped = eta.clone();
        flipped.set(&[1], false).unwrap();
        assert!(check_phi_theta(&flipped, &fam, 2).unwrap());
    }

    #[test]
    fn untested_classes_are_flagged() {
        let o = z();
        let fam = ints(&o, &[4, 9]);
        let w = Window::filled(seg(0, 4), false, 100).unwrap();
        let th = theta_window(&w, &fam, 2).unwrap();
        assert!(th.levels[0].is_complete());
        assert_eq!(th.levels[1].untested.len(), 4);
        assert_eq!(th.levels[1].residues.len(), 5);
    }

    #[test]
    fn fibers_are_negated_theta() {
        let o = z();
        let fam = ints(&o, &[4, 9]);
        let mut w = Window::filled(seg(-40, 40), false, 1000).unwrap();
        w.set(&[0], true).unwrap();
        w.set(&[5], true).unwrap();
        let th = theta_window(&w, &fam, 2).unwrap();
        let fib = joining_fiber(&w, &fam, 2).unwrap();
        for (b, (t, f)) in fam.ideals().iter().zip(th.levels.iter().zip(&fib.levels)) {
            let mut neg: Vec<RingElement> = t.residues.iter().map(|g| b.residue_rep(&o.neg(g).unwrap()).unwrap()).collect();
            neg.sort();
            assert_eq!(neg, f.residues);
            assert!(!f.residues.contains(&int(0)));
        }
    }

    #[test]
    fn zero_scan_progression() {
        let o = z();
        let fam = ints(&o, &[4]);
        let w = sieve_window(&fam, &seg(0, 100), 1).unwrap();
        let scan = zero_window_scan(&w, 1).unwrap();
        assert!(scan.positions.iter().all(|p| p[0] % 4 == 0));
        assert_eq!(scan.positions.len(), 26);
        assert_eq!(scan.max_gap, vec![Some(4)]);
        assert_eq!(zero_window_scan(&w, 200).unwrap_err(), Error::EmptyInterior);
    }

    #[test]
    fn crt_classes_for_four_and_nine() {
        let o = z();
        let fam = ints(&o, &[4, 9]);
        let classes = crt_zero_classes(&fam, 2, &[int(0), int(1)]).unwrap();
        // a ≡ 0 (4), a ≡ -1 (9) gives 8; a ≡ 0 (9), a ≡ -1 (4) gives 27
        assert_eq!(classes, vec![int(8), int(27)]);
    }
}

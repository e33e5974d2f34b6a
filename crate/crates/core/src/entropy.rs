//! Admissibility, exact counts of admissible patterns on boxes, and entropy
//! estimates.
//!
//! A subset W of a box is counted when, at every level ℓ, it avoids at least
//! s_ℓ residue classes modulo b_ℓ. Writing E_ℓ(W) for the avoided classes,
//!
//!   [|E| ≥ s] = Σ_{T ⊆ E, |T| ≥ s} (-1)^{|T|-s} C(|T|-1, s-1),
//!
//! so the count is a signed sum over choices of class sets T_ℓ of
//! 2^{#points outside every chosen class}. Classes that do not meet the box
//! are avoided by every W; summing them out replaces s by max(0, s - e) where
//! e is their number, and a level with s ≤ e drops out entirely.

use std::collections::{BTreeMap, HashMap};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exact::{binomial, log2_bracket, Interval};
use crate::geometry::Region;
use crate::measure::product_formula;
use crate::ring::{BFamily, IdealLattice, RingElement};

pub const DEFAULT_TERM_BUDGET: u128 = 1 << 24;
pub const BRUTE_FORCE_MAX_POINTS: usize = 22;
const LOG_FRAC_BITS: u32 = 40;

/// Required numbers of avoided classes, s_ℓ, for the first levels of a
/// family. Levels past the end use s_ℓ = 1.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct SVector(Vec<u64>);

impl SVector {
    pub fn new(entries: Vec<u64>) -> Self {
        SVector(entries)
    }

    pub fn ones() -> Self {
        SVector(Vec::new())
    }

    pub fn entries(&self) -> &[u64] {
        &self.0
    }

    pub fn get(&self, level: usize) -> u64 {
        self.0.get(level).copied().unwrap_or(1)
    }

    /// Checks 1 ≤ s_ℓ ≤ N(b_ℓ) and that no entry lies past level `l`.
    pub fn validate(&self, family: &BFamily, l: usize) -> Result<()> {
        family.check_truncation(l)?;
        if self.0.len() > l {
            return Err(Error::InvalidArgument(format!("s-vector has {} entries for {l} levels", self.0.len())));
        }
        for (i, (&s, b)) in self.0.iter().zip(family.ideals()).enumerate() {
            if s == 0 || s > b.norm() {
                return Err(Error::InvalidArgument(format!("s at level {i} must lie in [1, {}]", b.norm())));
            }
        }
        Ok(())
    }
}

/// D(b_ℓ|A) ≤ N(b_ℓ) - s_ℓ for every ℓ < l.
pub fn is_admissible(a: &[RingElement], family: &BFamily, l: usize, s: &SVector) -> Result<bool> {
    s.validate(family, l)?;
    for (i, b) in family.prefix(l).iter().enumerate() {
        if crate::measure::d_count(b, a)? as u64 > b.norm() - s.get(i) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CountMethod {
    InclusionExclusion,
    BruteForce,
}

impl CountMethod {
    pub fn name(self) -> &'static str {
        match self {
            CountMethod::InclusionExclusion => "inclusion-exclusion",
            CountMethod::BruteForce => "brute-force",
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct CountOptions {
    pub term_budget: u128,
    /// `None` uses inclusion–exclusion and falls back to brute force on
    /// small boxes when the term budget is exceeded.
    pub method: Option<CountMethod>,
}

impl Default for CountOptions {
    fn default() -> Self {
        CountOptions { term_budget: DEFAULT_TERM_BUDGET, method: None }
    }
}

/// γ_l^{≥s} on a box.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdmissibleCount {
    pub region: Region,
    pub truncation: usize,
    pub s: SVector,
    pub count: BigUint,
    pub method: CountMethod,
}

/// Residue class of every box point at every level, as dense indices of
/// the classes that meet the box.
struct ClassTable {
    /// classes[ℓ][point]
    classes: Vec<Vec<u32>>,
    /// classes meeting the box, per level
    met: Vec<u32>,
}

fn class_table(region: &Region, ideals: &[IdealLattice]) -> ClassTable {
    let n = region.point_count() as usize;
    let mut classes = Vec::with_capacity(ideals.len());
    let mut met = Vec::with_capacity(ideals.len());
    for b in ideals {
        let mut dense: HashMap<u64, u32> = HashMap::new();
        let mut col = Vec::with_capacity(n);
        let mut v = vec![0i64; region.dim()];
        region.for_each_point(|_, x| {
            v.copy_from_slice(x);
            b.reduce_in_place(&mut v);
            let key = b.residue_index(&v);
            let next = dense.len() as u32;
            col.push(*dense.entry(key).or_insert(next));
        });
        met.push(dense.len() as u32);
        classes.push(col);
    }
    ClassTable { classes, met }
}

/// Exact number of subsets W of `region` with D(b_ℓ|W) ≤ N(b_ℓ) - s_ℓ for ℓ < l.
pub fn count_admissible(
    region: &Region,
    family: &BFamily,
    l: usize,
    s: &SVector,
    opts: CountOptions,
) -> Result<AdmissibleCount> {
    s.validate(family, l)?;
    let d = family.order().degree();
    if region.dim() != d {
        return Err(Error::DegreeMismatch { expected: d, found: region.dim() });
    }
    let points = region.point_count();
    let (count, method) = match opts.method {
        Some(CountMethod::BruteForce) => (brute_force(region, family, l, s)?, CountMethod::BruteForce),
        Some(CountMethod::InclusionExclusion) => {
            (inclusion_exclusion(region, family, l, s, opts.term_budget)?, CountMethod::InclusionExclusion)
        }
        None => match inclusion_exclusion(region, family, l, s, opts.term_budget) {
            Ok(c) => (c, CountMethod::InclusionExclusion),
            Err(Error::BudgetExceeded { .. }) if points <= BRUTE_FORCE_MAX_POINTS as u128 => {
                (brute_force(region, family, l, s)?, CountMethod::BruteForce)
            }
            Err(e) => return Err(e),
        },
    };
    Ok(AdmissibleCount { region: region.clone(), truncation: l, s: s.clone(), count, method })
}

struct Level {
    m: u32,
    r: u32,
    /// weight[j] for |T| = j
    weight: Vec<i128>,
}

fn signed_binomial(j: u32, r: u32) -> Result<i128> {
    // (-1)^{j-r} C(j-1, r-1)
    let c = binomial(j as u64 - 1, r as u64 - 1).to_i128().ok_or(Error::Overflow("inclusion-exclusion weight"))?;
    Ok(if (j - r) % 2 == 1 { -c } else { c })
}

fn inclusion_exclusion(region: &Region, family: &BFamily, l: usize, s: &SVector, budget: u128) -> Result<BigUint> {
    let ideals = family.prefix(l);
    let table = class_table(region, ideals);
    let mut levels = Vec::new();
    let mut active = Vec::new();
    let mut terms: u128 = 1;
    for (i, b) in ideals.iter().enumerate() {
        let m = table.met[i];
        let e = b.norm() - m as u64;
        let r = s.get(i).saturating_sub(e);
        if r == 0 {
            continue;
        }
        if r > m as u64 {
            return Ok(BigUint::zero());
        }
        let r = r as u32;
        if m >= 64 {
            return Err(Error::BudgetExceeded { needed: u128::MAX, budget });
        }
        let level_terms: u128 = (r..=m).map(|j| binomial(m as u64, j as u64).to_u128().unwrap_or(u128::MAX)).sum();
        terms = terms.saturating_mul(level_terms);
        if terms > budget {
            return Err(Error::BudgetExceeded { needed: terms, budget });
        }
        let mut weight = vec![0i128; m as usize + 1];
        for j in r..=m {
            weight[j as usize] = signed_binomial(j, r)?;
        }
        levels.push(Level { m, r, weight });
        active.push(i);
    }
    let n = region.point_count() as usize;
    if levels.is_empty() {
        return Ok(BigUint::one() << n);
    }

    // Points with identical classes on every active level behave alike.
    let mut cells: BTreeMap<Vec<u32>, u64> = BTreeMap::new();
    for p in 0..n {
        let key: Vec<u32> = active.iter().map(|&i| table.classes[i][p]).collect();
        *cells.entry(key).or_default() += 1;
    }
    let cells: Vec<(Vec<u32>, u64)> = cells.into_iter().collect();
    let all: Vec<usize> = (0..cells.len()).collect();

    let first = &levels[0];
    let first_masks: Vec<u64> = (first.r..=first.m).flat_map(|j| subsets_of_size(first.m, j)).collect();
    let partial: Vec<BTreeMap<u64, i128>> = first_masks
        .par_iter()
        .map(|&mask| {
            let mut acc = BTreeMap::new();
            let w = first.weight[mask.count_ones() as usize];
            let free: Vec<usize> = all.iter().copied().filter(|&c| mask >> cells[c].0[0] & 1 == 0).collect();
            descend(&levels, &cells, 1, &free, w, &mut acc)?;
            Ok(acc)
        })
        .collect::<Result<_>>()?;

    let mut by_free: BTreeMap<u64, BigInt> = BTreeMap::new();
    for map in partial {
        for (k, v) in map {
            *by_free.entry(k).or_default() += BigInt::from(v);
        }
    }
    let mut total = BigInt::zero();
    for (free, coef) in by_free {
        total += coef << free as usize;
    }
    debug_assert!(!total.is_negative());
    total.to_biguint().ok_or(Error::Overflow("negative inclusion-exclusion total"))
}

fn descend(
    levels: &[Level],
    cells: &[(Vec<u32>, u64)],
    depth: usize,
    free: &[usize],
    coef: i128,
    acc: &mut BTreeMap<u64, i128>,
) -> Result<()> {
    if depth == levels.len() {
        let n: u64 = free.iter().map(|&c| cells[c].1).sum();
        let slot = acc.entry(n).or_insert(0);
        *slot = slot.checked_add(coef).ok_or(Error::Overflow("inclusion-exclusion sum"))?;
        return Ok(());
    }
    let level = &levels[depth];
    for j in level.r..=level.m {
        let w = coef.checked_mul(level.weight[j as usize]).ok_or(Error::Overflow("inclusion-exclusion weight"))?;
        for mask in subsets_of_size(level.m, j) {
            let next: Vec<usize> = free.iter().copied().filter(|&c| mask >> cells[c].0[depth] & 1 == 0).collect();
            descend(levels, cells, depth + 1, &next, w, acc)?;
        }
    }
    Ok(())
}

/// All m-bit masks with exactly j bits set, in increasing order.
fn subsets_of_size(m: u32, j: u32) -> impl Iterator<Item = u64> {
    let limit = if m == 64 { u64::MAX } else { (1u64 << m) - 1 };
    let start = if j == 0 { 0 } else { u64::MAX >> (64 - j) };
    let mut cur = Some(start);
    std::iter::from_fn(move || {
        let x = cur?;
        if x > limit {
            return None;
        }
        cur = if x == 0 {
            None
        } else {
            // Gosper's hack
            let c = x & x.wrapping_neg();
            let r = x.checked_add(c);
            r.map(|r| (((r ^ x) >> 2) / c) | r)
        };
        Some(x)
    })
}

fn brute_force(region: &Region, family: &BFamily, l: usize, s: &SVector) -> Result<BigUint> {
    let n = region.point_count() as usize;
    if n > BRUTE_FORCE_MAX_POINTS {
        return Err(Error::BudgetExceeded { needed: 1u128 << n, budget: 1u128 << BRUTE_FORCE_MAX_POINTS });
    }
    // For each level: the point masks of the classes meeting the box, and
    // the largest number of them W may meet.
    let mut levels: Vec<(Vec<u32>, usize)> = Vec::new();
    for (i, b) in family.prefix(l).iter().enumerate() {
        let mut by_class: BTreeMap<RingElement, u32> = BTreeMap::new();
        for (p, x) in region.points().enumerate() {
            *by_class.entry(b.residue_rep(&RingElement(x))?).or_default() |= 1 << p;
        }
        let allowed = (b.norm() - s.get(i)) as usize;
        levels.push((by_class.into_values().collect(), allowed));
    }
    let total: u64 = (0..1u32 << n)
        .into_par_iter()
        .with_min_len(1 << 12)
        .filter(|&w| {
            levels.iter().all(|(masks, allowed)| masks.iter().filter(|&&m| m & w != 0).count() <= *allowed)
        })
        .count() as u64;
    Ok(BigUint::from(total))
}

/// (1/|box|) log₂ γ as a rigorous rational bracket.
#[derive(Clone, Debug)]
pub struct EntropyEstimate {
    pub count: AdmissibleCount,
    pub points: u64,
    pub lo: BigRational,
    pub hi: BigRational,
}

pub fn entropy_estimate(
    region: &Region,
    family: &BFamily,
    l: usize,
    s: &SVector,
    opts: CountOptions,
) -> Result<EntropyEstimate> {
    let count = count_admissible(region, family, l, s, opts)?;
    let points = region.point_count() as u64;
    let (lo, hi) = log2_bracket(&count.count, LOG_FRAC_BITS);
    let scale = BigRational::from_integer(BigInt::from(points));
    Ok(EntropyEstimate { count, points, lo: lo / &scale, hi: hi / scale })
}

/// h_top of Y_{≥s}: ∏ (1 - s_ℓ/N(b_ℓ)) over the first `l` levels, with the
/// tail halfwidth of the levels beyond.
pub fn entropy_formula(family: &BFamily, l: usize, s: &SVector) -> Result<Interval> {
    s.validate(family, l)?;
    product_formula(family, l, s.entries())
}

/// Upper bound on log₂ ∏_ℓ C(N(b_ℓ), s_ℓ), the number of ways to pick the
/// avoided classes. An entropy estimate on a box exceeds the formula by at
/// most this amount divided by the box size, up to boundary effects.
pub fn class_choice_log2(family: &BFamily, l: usize, s: &SVector) -> Result<BigRational> {
    s.validate(family, l)?;
    let mut prod = BigUint::one();
    for (i, b) in family.prefix(l).iter().enumerate() {
        prod *= binomial(b.norm(), s.get(i));
    }
    Ok(log2_bracket(&prod, LOG_FRAC_BITS).1)
}

/// Counts for every truncation 0..=family.len() on one box, and the least
/// L* from which the count no longer changes.
#[derive(Clone, Debug)]
pub struct Stabilization {
    pub counts: Vec<BigUint>,
    pub l_star: usize,
}

pub fn stabilization(region: &Region, family: &BFamily, s: &SVector, opts: CountOptions) -> Result<Stabilization> {
    let counts = (0..=family.len())
        .map(|l| {
            let sl = SVector(s.entries().iter().copied().take(l).collect());
            count_admissible(region, family, l, &sl, opts).map(|c| c.count)
        })
        .collect::<Result<Vec<_>>>()?;
    let last = counts.last().unwrap();
    let l_star = counts.iter().rposition(|c| c != last).map_or(0, |i| i + 1);
    Ok(Stabilization { counts, l_star })
}

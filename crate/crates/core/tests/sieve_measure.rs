use std::sync::Arc;

use bfree::exact::ratio;
use bfree::measure::{product_formula, shape_histogram};
use bfree::sieve::sieve_window_with;
use bfree::{
    build_bfamily, d_count, density, empirical_frequency, make_order, mirsky_cylinder, sieve_window, BFamily,
    FamilySpec, FieldOrder, OrderOptions, Pattern, Region, RingElement, SieveOptions,
};
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn z() -> Arc<FieldOrder> {
    make_order(&[0, 1]).unwrap()
}

fn gauss() -> Arc<FieldOrder> {
    Arc::new(FieldOrder::with_options(&[1, 0, 1], OrderOptions { assume_maximal: true, ..Default::default() }).unwrap())
}

fn ints(o: &Arc<FieldOrder>, v: &[i64]) -> BFamily {
    build_bfamily(o, FamilySpec::Explicit(v.iter().map(|&n| vec![o.from_int(n)]).collect())).unwrap()
}

fn int(x: i64) -> RingElement {
    RingElement(vec![x])
}

#[test]
fn sieve_agrees_with_membership_at_random_points() {
    let g = gauss();
    let fam = build_bfamily(&g, FamilySpec::PrimePower { k: 2, norm_bound: 2000 }).unwrap();
    let region = Region::centered(2, 120);
    let l = fam.len();
    let w = sieve_window(&fam, &region, l).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..1000 {
        let x: Vec<i64> = (0..2).map(|_| rng.gen_range(-120..=120)).collect();
        let member = fam.ideals().iter().any(|b| b.contains(&RingElement(x.clone())).unwrap());
        assert_eq!(w.get(&x).unwrap(), !member, "{x:?}");
        // and a random truncation
        let lr = rng.gen_range(0..=l);
        let wl = sieve_window(&fam, &Region::cube_at(&x, 0), lr).unwrap();
        let member = fam.prefix(lr).iter().any(|b| b.contains(&RingElement(x.clone())).unwrap());
        assert_eq!(wl.bits()[0], !member);
    }
}

#[test]
fn sieve_is_independent_of_partition() {
    let g = gauss();
    let fam = build_bfamily(&g, FamilySpec::PrimePower { k: 2, norm_bound: 5000 }).unwrap();
    let region = Region::new(vec![-90, -33], vec![77, 101]).unwrap();
    let reference =
        sieve_window_with(&fam, &region, fam.len(), SieveOptions { parts: 1, ..Default::default() }).unwrap();
    for parts in [2, 7, 64, 1000] {
        let w = sieve_window_with(&fam, &region, fam.len(), SieveOptions { parts, ..Default::default() }).unwrap();
        assert_eq!(w, reference);
    }
}

#[test]
fn cylinder_equals_frequency_over_one_period() {
    // With a finite family η is periodic modulo ∏ b_ℓ, and ν_η is the
    // uniform average over one period.
    let o = z();
    let fam = ints(&o, &[4, 9, 25]);
    let period = 900;
    let shape = [int(0), int(1), int(2), int(4)];
    let w = sieve_window(&fam, &Region::segment(0, period - 1 + 4).unwrap(), 3).unwrap();
    let hist = shape_histogram(&w, &shape).unwrap();
    assert_eq!(hist.interior, period as u64);
    for mask in 0..16 {
        let p = Pattern::from_mask(&shape, mask).unwrap();
        let exact = mirsky_cylinder(&p, &fam, 3).unwrap();
        assert_eq!(exact.value, hist.frequency(mask), "mask {mask}");
        assert!(exact.halfwidth.is_zero());
    }
}

#[test]
fn gaussian_cylinder_equals_frequency_over_one_period() {
    let g = gauss();
    let i1 = g.element(&[1, 1]).unwrap();
    let fam = build_bfamily(&g, FamilySpec::Explicit(vec![vec![g.mul(&i1, &i1).unwrap()], vec![g.from_int(3)]])).unwrap();
    // (2)(3) = (6): the period lattice is 6·Z[i]
    let w = sieve_window(&fam, &Region::new(vec![0, 0], vec![6, 6]).unwrap(), 2).unwrap();
    let shape = [RingElement(vec![0, 0]), RingElement(vec![1, 0]), RingElement(vec![0, 1])];
    let hist = shape_histogram(&w, &shape).unwrap();
    assert_eq!(hist.interior, 36);
    for mask in 0..8 {
        let p = Pattern::from_mask(&shape, mask).unwrap();
        assert_eq!(mirsky_cylinder(&p, &fam, 2).unwrap().value, hist.frequency(mask));
    }
}

#[test]
fn cylinders_partition_unity() {
    let g = gauss();
    let fam = build_bfamily(&g, FamilySpec::PrimePower { k: 2, norm_bound: 700 }).unwrap();
    let shape = [RingElement(vec![0, 0]), RingElement(vec![1, 0]), RingElement(vec![1, 1]), RingElement(vec![0, 2])];
    for l in [0, 2, fam.len()] {
        let mut total = BigRational::zero();
        let mut width = BigRational::zero();
        for mask in 0..16 {
            let c = mirsky_cylinder(&Pattern::from_mask(&shape, mask).unwrap(), &fam, l).unwrap();
            total += c.value;
            width += c.halfwidth;
        }
        assert_eq!(total, BigRational::one());
        assert!(width >= BigRational::zero());
    }
}

#[test]
fn more_ones_never_increase_the_measure() {
    let o = z();
    let fam = build_bfamily(&o, FamilySpec::PrimePower { k: 2, norm_bound: 1000 }).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..50 {
        let mut a: Vec<RingElement> = (0..rng.gen_range(0..4)).map(|_| int(rng.gen_range(-10..10))).collect();
        a.sort();
        a.dedup();
        let base = mirsky_cylinder(&Pattern::new(a.clone(), vec![]).unwrap(), &fam, fam.len()).unwrap();
        a.push(int(rng.gen_range(-10..10)));
        let bigger = mirsky_cylinder(&Pattern::new(a, vec![]).unwrap(), &fam, fam.len()).unwrap();
        assert!(bigger.value <= base.value);
    }
}

#[test]
fn density_and_cylinder_agree() {
    let o = z();
    let fam = ints(&o, &[4, 9]);
    let d = density(&fam, 2).unwrap();
    assert_eq!(d.value, ratio(2, 3));
    let c = mirsky_cylinder(&Pattern::new(vec![int(0)], vec![]).unwrap(), &fam, 2).unwrap();
    assert_eq!(c.value, d.value);
    assert_eq!(product_formula(&fam, 2, &[2, 1]).unwrap().value, ratio(4, 9));
}

#[test]
fn truncation_interval_contains_the_full_value() {
    // The value at L = 20 must lie in every earlier interval.
    let o = z();
    let fam = build_bfamily(&o, FamilySpec::PrimePower { k: 2, norm_bound: 6000 }).unwrap();
    let p = Pattern::new(vec![int(0), int(1)], vec![int(3)]).unwrap();
    let full = mirsky_cylinder(&p, &fam, 20).unwrap();
    for l in 0..20 {
        let c = mirsky_cylinder(&p, &fam, l).unwrap();
        assert!(c.contains(&full.value), "l = {l}");
    }
}

#[test]
fn eta_lies_in_y() {
    // η misses exactly one class modulo each b_ℓ
    let o = z();
    let fam = ints(&o, &[4, 9]);
    let w = sieve_window(&fam, &Region::centered(1, 10_000), 2).unwrap();
    let support: Vec<RingElement> = w.support().map(RingElement).collect();
    for b in fam.ideals() {
        assert_eq!(b.norm() as usize - d_count(b, &support).unwrap(), 1);
    }
}

#[test]
fn frequency_of_empty_pattern() {
    let o = z();
    let fam = ints(&o, &[4]);
    let w = sieve_window(&fam, &Region::segment(0, 10).unwrap(), 1).unwrap();
    assert_eq!(empirical_frequency(&w, &Pattern::new(vec![], vec![]).unwrap()).unwrap(), BigRational::one());
}

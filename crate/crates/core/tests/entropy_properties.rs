use std::sync::Arc;

use bfree::entropy::{class_choice_log2, stabilization};
use bfree::exact::to_f64;
use bfree::{
    build_bfamily, count_admissible, entropy_estimate, entropy_formula, is_admissible, make_order, sieve_window,
    BFamily, CountMethod, CountOptions, FamilySpec, FieldOrder, OrderOptions, Region, RingElement, SVector,
};
use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::Pow;

fn z() -> Arc<FieldOrder> {
    make_order(&[0, 1]).unwrap()
}

fn gauss() -> Arc<FieldOrder> {
    Arc::new(FieldOrder::with_options(&[1, 0, 1], OrderOptions { assume_maximal: true, ..Default::default() }).unwrap())
}

fn ints(o: &Arc<FieldOrder>, v: &[i64]) -> BFamily {
    build_bfamily(o, FamilySpec::Explicit(v.iter().map(|&n| vec![o.from_int(n)]).collect())).unwrap()
}

fn count(region: &Region, fam: &BFamily, l: usize, s: &SVector) -> BigUint {
    count_admissible(region, fam, l, s, CountOptions::default()).unwrap().count
}

/// Direct definition: subsets W with D(b_ℓ|W) ≤ N - s_ℓ, via is_admissible.
fn by_definition(region: &Region, fam: &BFamily, l: usize, s: &SVector) -> u64 {
    let pts: Vec<RingElement> = region.points().map(RingElement).collect();
    let n = pts.len();
    (0..1u32 << n)
        .filter(|w| {
            let sub: Vec<RingElement> = (0..n).filter(|j| w >> j & 1 == 1).map(|j| pts[j].clone()).collect();
            is_admissible(&sub, fam, l, s).unwrap()
        })
        .count() as u64
}

#[test]
fn counts_match_the_definition() {
    let o = z();
    let fam = ints(&o, &[4, 9, 5]);
    for (a, b) in [(0, 7), (-4, 6), (3, 13)] {
        let region = Region::segment(a, b).unwrap();
        for s in [vec![], vec![2], vec![1, 3, 2]] {
            let s = SVector::new(s);
            assert_eq!(count(&region, &fam, 3, &s), BigUint::from(by_definition(&region, &fam, 3, &s)));
        }
    }
}

#[test]
fn subadditivity_over_tilings() {
    // γ(nm) ≤ γ(n)^{m^d}
    let o = z();
    let fam = ints(&o, &[4, 9]);
    for n in 1..=3u64 {
        for m in 2..=3u64 {
            let small = count(&Region::centered(1, n as i64), &fam, 2, &SVector::ones());
            let big = count(&Region::centered(1, (n * m) as i64), &fam, 2, &SVector::ones());
            assert!(big <= small.pow(m as u32), "n={n} m={m}");
        }
    }
    let g = gauss();
    let i1 = g.element(&[1, 1]).unwrap();
    let gfam = build_bfamily(&g, FamilySpec::Explicit(vec![vec![i1], vec![g.from_int(3)]])).unwrap();
    for (n, m) in [(1i64, 2u32), (1, 3), (2, 2)] {
        let small = count(&Region::centered(2, n), &gfam, 2, &SVector::ones());
        let big = count(&Region::centered(2, n * m as i64), &gfam, 2, &SVector::ones());
        assert!(big <= small.pow(m * m), "n={n} m={m}");
    }
}

#[test]
fn counts_decrease_in_l_and_s() {
    let o = z();
    let fam = ints(&o, &[4, 9, 5]);
    let region = Region::segment(0, 59).unwrap();
    let by_l: Vec<BigUint> = (0..=3).map(|l| count(&region, &fam, l, &SVector::ones())).collect();
    assert!(by_l.windows(2).all(|w| w[0] >= w[1]));
    let mut prev = None;
    for s0 in 1..=4 {
        let c = count(&region, &fam, 3, &SVector::new(vec![s0, 1, 1]));
        if let Some(p) = prev {
            assert!(c <= p);
        }
        prev = Some(c);
    }
    assert_eq!(prev.unwrap(), BigUint::from(1u32));
}

#[test]
fn estimate_stays_in_the_counting_bracket() {
    // formula ≤ estimate ≤ formula + log2 ∏ C(N, s) / |box| on boxes tiled by periods
    let o = z();
    let fam = ints(&o, &[4, 9]);
    for s in [SVector::ones(), SVector::new(vec![2, 3])] {
        let h = entropy_formula(&fam, 2, &s).unwrap().value;
        let slack = class_choice_log2(&fam, 2, &s).unwrap();
        for size in [36i64, 72, 180] {
            let est = entropy_estimate(&Region::segment(0, size - 1).unwrap(), &fam, 2, &s, CountOptions::default())
                .unwrap();
            assert!(est.lo >= h, "size {size}");
            assert!(est.hi <= &h + &slack / BigRational::from_integer(size.into()), "size {size}");
        }
    }
}

#[test]
fn entropy_decreases_towards_formula() {
    let o = z();
    let fam = ints(&o, &[4]);
    let s = SVector::new(vec![2]);
    let mut prev = f64::INFINITY;
    for n in [4i64, 40, 400] {
        let est = entropy_estimate(&Region::segment(0, n - 1).unwrap(), &fam, 1, &s, CountOptions::default()).unwrap();
        let v = to_f64(&est.lo);
        assert!(v < prev && v >= 0.5);
        prev = v;
    }
    assert!(prev - 0.5 < 0.01);
}

#[test]
fn sieve_patterns_are_admissible() {
    // every window pattern of η is B-admissible
    let o = z();
    let fam = ints(&o, &[4, 9, 25]);
    let w = sieve_window(&fam, &Region::segment(0, 2000).unwrap(), 3).unwrap();
    for start in (0..1990).step_by(7) {
        let sub: Vec<RingElement> = (start..start + 12).filter(|&x| w.get(&[x]).unwrap()).map(|x| RingElement(vec![x])).collect();
        assert!(is_admissible(&sub, &fam, 3, &SVector::ones()).unwrap());
    }
}

#[test]
fn large_family_stabilizes() {
    let o = z();
    let fam = build_bfamily(&o, FamilySpec::PrimePower { k: 2, norm_bound: 10_000 }).unwrap();
    let st = stabilization(&Region::segment(0, 23).unwrap(), &fam, &SVector::ones(), CountOptions::default()).unwrap();
    // only 4 and 9 have all their classes inside 24 consecutive integers
    assert_eq!(st.l_star, 2);
    assert!(st.counts[2..].iter().all(|c| *c == st.counts[2]));
    assert!(st.counts[1] > st.counts[2]);
}

#[test]
fn brute_force_fallback_on_small_boxes() {
    let o = z();
    let fam = build_bfamily(&o, FamilySpec::PrimePower { k: 2, norm_bound: 400 }).unwrap();
    let region = Region::segment(0, 17).unwrap();
    let opts = CountOptions { term_budget: 100, method: None };
    let c = count_admissible(&region, &fam, fam.len(), &SVector::ones(), opts).unwrap();
    assert_eq!(c.method, CountMethod::BruteForce);
    let ie = count_admissible(&region, &fam, fam.len(), &SVector::ones(), CountOptions::default()).unwrap();
    assert_eq!(ie.method, CountMethod::InclusionExclusion);
    assert_eq!(c.count, ie.count);
}

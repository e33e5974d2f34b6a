use std::sync::Arc;

use bfree::ring::{hnf, integer_root};
use bfree::{
    build_bfamily, crt, factor_rational_prime, make_order, FamilySpec, FieldOrder, IdealLattice, OrderOptions,
    RingElement,
};
use num_integer::Integer;
use proptest::prelude::*;

// Maximal orders, so every nonzero ideal is invertible and norms multiply.
fn orders() -> Vec<Arc<FieldOrder>> {
    let gauss = FieldOrder::with_options(&[1, 0, 1], OrderOptions { assume_maximal: true, ..Default::default() });
    vec![
        Arc::new(gauss.unwrap()),
        make_order(&[5, 1, 1]).unwrap(),
        make_order(&[-1, -1, 0, 1]).unwrap(),
    ]
}

fn element(order: &FieldOrder, coords: &[i64]) -> RingElement {
    order.element(&coords[..order.degree()]).unwrap()
}

fn coords() -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-12i64..=12, 3)
}

fn nonzero_coords() -> impl Strategy<Value = Vec<i64>> {
    // nonzero in the first two coordinates, so also in every quadratic order
    coords().prop_filter("nonzero", |v| v[0] != 0 || v[1] != 0)
}

fn ideal(order: &Arc<FieldOrder>, a: &[i64], b: &[i64]) -> IdealLattice {
    let gens = [element(order, a), element(order, b)];
    IdealLattice::from_generators(order, &gens).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn hnf_is_idempotent(k in 0usize..3, a in nonzero_coords(), b in coords()) {
        let o = &orders()[k];
        let i = ideal(o, &a, &b);
        prop_assert!(hnf::is_canonical(i.basis()));
        let cols: Vec<Vec<i64>> = i.columns().into_iter().map(|c| c.0).collect();
        prop_assert_eq!(IdealLattice::from_lattice(o, &cols).unwrap(), i.clone());
        prop_assert_eq!(IdealLattice::from_generators(o, &i.columns()).unwrap(), i);
    }

    #[test]
    fn norms_multiply(k in 0usize..3, a in nonzero_coords(), b in coords(), c in nonzero_coords(), e in coords()) {
        let o = &orders()[k];
        let i = ideal(o, &a, &b);
        let j = ideal(o, &c, &e);
        let ij = i.product(&j).unwrap();
        prop_assert_eq!(ij.norm() as u128, i.norm() as u128 * j.norm() as u128);
        prop_assert_eq!(ij, j.product(&i).unwrap());
    }

    #[test]
    fn principal_norm_is_element_norm(k in 0usize..3, a in nonzero_coords()) {
        let o = &orders()[k];
        let x = element(o, &a);
        let n = IdealLattice::principal(o, &x).unwrap().norm();
        prop_assert_eq!(num_bigint::BigInt::from(n), num_traits::Signed::abs(&o.element_norm(&x)));
    }

    #[test]
    fn membership_matches_absorption(k in 0usize..3, a in nonzero_coords(), b in coords(), x in coords()) {
        // x ∈ I exactly when I + (x) = I
        let o = &orders()[k];
        let i = ideal(o, &a, &b);
        let xe = element(o, &x);
        let absorbed = if xe.is_zero() {
            true
        } else {
            i.sum(&IdealLattice::principal(o, &xe).unwrap()).unwrap() == i
        };
        prop_assert_eq!(i.contains(&xe).unwrap(), absorbed);
        prop_assert_eq!(i.residue_rep(&xe).unwrap().is_zero(), absorbed);
        let r = i.residue_rep(&xe).unwrap();
        prop_assert!(i.contains(&o.sub(&xe, &r).unwrap()).unwrap());
        prop_assert_eq!(i.residue_rep(&r).unwrap(), r);
    }

    #[test]
    fn crt_solves_congruences(
        k in 0usize..3,
        a in nonzero_coords(), b in coords(), c in nonzero_coords(), e in coords(),
        r in coords(), s in coords(),
    ) {
        let o = &orders()[k];
        let i = ideal(o, &a, &b);
        let j = ideal(o, &c, &e);
        let (ri, sj) = (element(o, &r), element(o, &s));
        match crt(&[ri.clone(), sj.clone()], &[i.clone(), j.clone()]) {
            Ok(x) => {
                prop_assert!(i.is_coprime(&j).unwrap());
                prop_assert!(i.contains(&o.sub(&x, &ri).unwrap()).unwrap());
                prop_assert!(j.contains(&o.sub(&x, &sj).unwrap()).unwrap());
            }
            Err(bfree::Error::NotCoprime) => prop_assert!(!i.is_coprime(&j).unwrap()),
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        }
    }
}

#[test]
fn prime_factorizations_multiply_back() {
    for o in orders() {
        let d = o.degree() as u32;
        for p in bfree::ring::poly_fp::primes_up_to(60) {
            let factors = match factor_rational_prime(p, &o) {
                Ok(f) => f,
                Err(bfree::Error::UnsafePrime(_)) => continue,
                Err(e) => panic!("{e}"),
            };
            let mut prod = IdealLattice::unit(&o);
            let mut ef = 0;
            for pf in &factors {
                assert_eq!(pf.ideal.norm(), p.pow(pf.f));
                prod = prod.product(&pf.ideal.pow(pf.e).unwrap()).unwrap();
                ef += pf.e * pf.f;
            }
            assert_eq!(ef, d, "p = {p}");
            assert_eq!(prod, IdealLattice::principal(&o, &o.from_int(p as i64)).unwrap(), "p = {p}");
        }
    }
}

#[test]
fn rational_integers_match_gcd_and_lcm() {
    let z = make_order(&[0, 1]).unwrap();
    let principal = |n: i64| IdealLattice::principal(&z, &z.from_int(n)).unwrap();
    let mut rng_state = 0x2545F4914F6CDD1Du64;
    let mut next = || {
        rng_state ^= rng_state << 13;
        rng_state ^= rng_state >> 7;
        rng_state ^= rng_state << 17;
        (rng_state % 5000) as i64 + 1
    };
    for _ in 0..1000 {
        let (a, b) = (next(), next());
        let (ia, ib) = (principal(a), principal(b));
        let g = a.gcd(&b);
        let sum = ia.sum(&ib).unwrap();
        assert_eq!(sum.norm() as i64, g);
        assert_eq!(ia.product(&ib).unwrap().norm() as i64, a * b);
        assert_eq!(ia.is_coprime(&ib).unwrap(), g == 1);
        // N(I ∩ J) = N(I) N(J) / N(I + J)
        assert_eq!(ia.norm() * ib.norm() / sum.norm(), a.lcm(&b) as u64);
        assert_eq!(ia.contains(&z.from_int(b)).unwrap(), b % a == 0);
    }
}

#[test]
fn family_order_does_not_depend_on_input_order() {
    let g = orders().remove(0);
    let gens: Vec<Vec<RingElement>> = [[1, 1], [3, 0], [2, 1], [2, -1], [7, 0]]
        .iter()
        .map(|c| vec![g.element(c).unwrap()])
        .collect();
    let base = build_bfamily(&g, FamilySpec::Explicit(gens.clone())).unwrap();
    let mut perm = gens.clone();
    for _ in 0..10 {
        perm.rotate_left(2);
        perm.swap(0, 3);
        let fam = build_bfamily(&g, FamilySpec::Explicit(perm.clone())).unwrap();
        assert_eq!(fam.ideals(), base.ideals());
    }
    let norms: Vec<u64> = base.ideals().iter().map(|b| b.norm()).collect();
    assert_eq!(norms, vec![2, 5, 5, 9, 49]);
}

#[test]
fn prime_power_family_matches_direct_enumeration() {
    // p^2 over Z with p^2 ≤ M, checked against trial division
    let z = make_order(&[0, 1]).unwrap();
    let m = 50_000u64;
    let fam = build_bfamily(&z, FamilySpec::PrimePower { k: 2, norm_bound: m }).unwrap();
    let direct: Vec<u64> = (2..=integer_root(m, 2)).filter(|&p| (2..p).all(|q| p % q != 0)).map(|p| p * p).collect();
    let got: Vec<u64> = fam.ideals().iter().map(|b| b.norm()).collect();
    assert_eq!(got, direct);
}

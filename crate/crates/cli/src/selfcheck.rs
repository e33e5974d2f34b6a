//! Seeded invariant suites over the configured order and family.

use std::panic::{catch_unwind, AssertUnwindSafe};

use bfree::cache::{decode, encode};
use bfree::ring::hnf::is_canonical;
use bfree::sieve::sieve_window_with;
use bfree::{
    count_admissible, crt, mirsky_cylinder, phi_window, sieve_window, theta_window, BFamily, CountMethod,
    CountOptions, GroupPoint, IdealLattice, Pattern, Region, RingElement, SVector, SieveOptions,
};
use num_rational::BigRational;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::config::Setup;
use crate::error::CliError;
use crate::report::Report;

/// Levels used by the suites; larger prefixes add cost and no coverage.
const MAX_LEVELS: usize = 16;

type Check = Result<u64, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn lib<T>(r: bfree::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

struct Ctx<'a> {
    family: &'a BFamily,
    levels: usize,
    /// Small box, a few thousand points at most.
    region: Region,
}

impl Ctx<'_> {
    fn ideals(&self) -> &[IdealLattice] {
        self.family.prefix(self.levels)
    }

    fn random_element(&self, rng: &mut ChaCha8Rng, r: i64) -> RingElement {
        let d = self.family.order().degree();
        RingElement((0..d).map(|_| rng.gen_range(-r..=r)).collect())
    }
}

fn hnf_canonical(c: &Ctx, _: &mut ChaCha8Rng) -> Check {
    let order = c.family.order();
    for b in c.ideals() {
        ensure(is_canonical(b.basis()), || format!("{:?} is not canonical", b.basis()))?;
        let cols: Vec<Vec<i64>> = b.columns().into_iter().map(|x| x.0).collect();
        ensure(lib(IdealLattice::from_lattice(order, &cols))? == *b, || "re-canonicalization changed a basis".into())?;
    }
    Ok(c.ideals().len() as u64)
}

fn norms_multiply(c: &Ctx, _: &mut ChaCha8Rng) -> Check {
    let mut n = 0;
    for (i, a) in c.ideals().iter().enumerate() {
        for b in &c.ideals()[i + 1..] {
            let (na, nb) = (a.norm() as u128, b.norm() as u128);
            if na * nb > i64::MAX as u128 {
                continue;
            }
            ensure(lib(a.product(b))?.norm() as u128 == na * nb, || format!("N({na}·{nb}) differs"))?;
            n += 1;
        }
    }
    Ok(n)
}

fn membership(c: &Ctx, rng: &mut ChaCha8Rng) -> Check {
    for _ in 0..200 {
        let x = c.random_element(rng, 50);
        for b in c.ideals() {
            let r = lib(b.residue_rep(&x))?;
            ensure(lib(b.contains(&x))? == r.is_zero(), || format!("{x:?}: membership and residue disagree"))?;
            ensure(lib(b.residue_rep(&r))? == r, || "residue representative is not canonical".into())?;
        }
    }
    Ok(200)
}

fn crt_congruences(c: &Ctx, rng: &mut ChaCha8Rng) -> Check {
    let order = c.family.order();
    let ideals = c.ideals();
    if ideals.len() < 2 {
        return Ok(0);
    }
    for _ in 0..100 {
        let pair: Vec<&IdealLattice> = ideals.choose_multiple(rng, 2).collect();
        let (ra, rb) = (c.random_element(rng, 30), c.random_element(rng, 30));
        let x = match crt(&[ra.clone(), rb.clone()], &[pair[0].clone(), pair[1].clone()]) {
            Ok(x) => x,
            Err(bfree::Error::Overflow(_)) => continue,
            Err(e) => return Err(e.to_string()),
        };
        ensure(lib(pair[0].contains(&lib(order.sub(&x, &ra))?))?, || "first congruence fails".into())?;
        ensure(lib(pair[1].contains(&lib(order.sub(&x, &rb))?))?, || "second congruence fails".into())?;
    }
    Ok(100)
}

fn sieve_membership(c: &Ctx, rng: &mut ChaCha8Rng) -> Check {
    let w = lib(sieve_window(c.family, &c.region, c.levels))?;
    for _ in 0..500 {
        let x: Vec<i64> = c.region.lo().iter().zip(c.region.hi()).map(|(&a, &b)| rng.gen_range(a..=b)).collect();
        let member = c
            .ideals()
            .iter()
            .map(|b| b.contains(&RingElement(x.clone())))
            .collect::<bfree::Result<Vec<_>>>()
            .map_err(|e| e.to_string())?
            .into_iter()
            .any(|m| m);
        ensure(w.get(&x) == Some(!member), || format!("bit at {x:?}"))?;
    }
    Ok(500)
}

fn partition_independence(c: &Ctx, _: &mut ChaCha8Rng) -> Check {
    let run = |parts| sieve_window_with(c.family, &c.region, c.levels, SieveOptions { parts, ..Default::default() });
    let reference = lib(run(1))?;
    for parts in [3, 7, 0] {
        ensure(lib(run(parts))? == reference, || format!("{parts} slabs differ from one"))?;
    }
    Ok(3)
}

fn cylinder_unity(c: &Ctx, rng: &mut ChaCha8Rng) -> Check {
    let l = c.levels.min(8);
    for _ in 0..10 {
        let mut shape: Vec<RingElement> = (0..3).map(|_| c.random_element(rng, 3)).collect();
        shape.sort();
        shape.dedup();
        let mut total = BigRational::from_integer(0.into());
        for mask in 0..1u64 << shape.len() {
            total += lib(mirsky_cylinder(&lib(Pattern::from_mask(&shape, mask))?, c.family, l))?.value;
        }
        ensure(total == BigRational::from_integer(1.into()), || format!("cylinders on {shape:?} sum to {total}"))?;
    }
    Ok(10)
}

/// Box with at most 12 points.
fn small_box(d: usize) -> Region {
    let hi = match d {
        1 => vec![11],
        2 => vec![3, 2],
        _ => (0..d).map(|t| (t < 3) as i64).collect(),
    };
    Region::new(vec![0; d], hi).expect("valid box")
}

fn counting_oracle(c: &Ctx, _: &mut ChaCha8Rng) -> Check {
    let l = c.levels.min(6);
    let region = small_box(c.family.order().degree());
    let mut n = 0;
    for s in [SVector::ones(), SVector::new(c.ideals()[..l].iter().map(|b| b.norm().min(2)).collect())] {
        let run = |m| count_admissible(&region, c.family, l, &s, CountOptions { method: Some(m), ..Default::default() });
        let ie = lib(run(CountMethod::InclusionExclusion))?.count;
        let bf = lib(run(CountMethod::BruteForce))?.count;
        ensure(ie == bf, || format!("inclusion-exclusion {ie} vs brute force {bf}"))?;
        n += 1;
    }
    Ok(n)
}

fn theta_phi(c: &Ctx, rng: &mut ChaCha8Rng) -> Check {
    let lf = c.family.truncation_for_norm(c.region.point_count() as u64).min(c.levels);
    for _ in 0..20 {
        let g = lib(GroupPoint::random(c.family, lf, rng))?;
        let w = lib(phi_window(&g, &c.region, c.family))?;
        let th = lib(theta_window(&w, c.family, lf))?;
        let ok = th.levels.iter().zip(g.residues()).all(|(f, r)| f.residues.contains(r) || f.untested.contains(r));
        ensure(ok, || "θ(φ(g)) misses g".into())?;
    }
    Ok(20)
}

fn cache_roundtrip(c: &Ctx, rng: &mut ChaCha8Rng) -> Check {
    let w = lib(sieve_window(c.family, &c.region, c.levels))?;
    let mut key = [0u8; 32];
    rng.fill(&mut key);
    let bytes = encode(&w, &key);
    ensure(lib(decode(&bytes, &key))? == w, || "decoded window differs".into())?;
    key[0] ^= 1;
    ensure(decode(&bytes, &key).is_err(), || "mismatched key accepted".into())?;
    Ok(1)
}

pub fn selfcheck_cmd(setup: &Setup) -> Result<Report, CliError> {
    let mut report = Report::new("selfcheck");
    let d = setup.degree();
    let radius = match d {
        1 => 500,
        2 => 20,
        3 => 6,
        _ => 2,
    };
    let ctx = Ctx { family: &setup.family, levels: setup.levels.min(MAX_LEVELS), region: Region::centered(d, radius) };
    let suites: [(&str, fn(&Ctx, &mut ChaCha8Rng) -> Check); 10] = [
        ("hnf_canonical", hnf_canonical),
        ("norms_multiply", norms_multiply),
        ("membership", membership),
        ("crt", crt_congruences),
        ("sieve_membership", sieve_membership),
        ("partition_independence", partition_independence),
        ("cylinder_unity", cylinder_unity),
        ("counting_oracle", counting_oracle),
        ("theta_phi", theta_phi),
        ("cache_roundtrip", cache_roundtrip),
    ];
    let mut rows = Vec::new();
    let mut all = true;
    for (i, (name, f)) in suites.iter().enumerate() {
        // one stream per suite, so suites do not perturb each other
        let mut rng = ChaCha8Rng::seed_from_u64(setup.seed);
        rng.set_stream(i as u64);
        let outcome = catch_unwind(AssertUnwindSafe(|| f(&ctx, &mut rng))).unwrap_or_else(|_| Err("panicked".into()));
        let row = match outcome {
            Ok(cases) => json!({ "name": name, "passed": true, "cases": cases }),
            Err(msg) => {
                all = false;
                json!({ "name": name, "passed": false, "detail": msg })
            }
        };
        rows.push(row);
    }
    report.set("levels", json!(ctx.levels));
    report.set("region", json!({ "lo": ctx.region.lo(), "hi": ctx.region.hi() }));
    report.set("checks", Value::Array(rows));
    report.set("passed", json!(all));
    Ok(report)
}

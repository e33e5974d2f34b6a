use std::path::Path;

use bfree::cache::{encode, read_window, write_window};
use bfree::entropy::class_choice_log2;
use bfree::exact::to_decimal;
use bfree::measure::shape_histogram;
use bfree::ring::poly_fp::primes_up_to;
use bfree::sieve::sieve_window_with;
use bfree::{
    check_phi_theta, crt_zero_classes, density, entropy_estimate, entropy_formula, factor_rational_prime,
    joining_fiber, mirsky_cylinder, phi_window, theta_window, zero_window_scan, CountOptions, Error, FiberReport,
    GroupPoint, Pattern, Region, RingElement, SVector, SieveOptions, Window,
};
use num_rational::BigRational;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::config::Setup;
use crate::error::CliError;
use crate::report::{exact, interval, point, Report, Table};

const CACHE_FILE: &str = "window.bin";
/// Largest shape whose 2^k cylinders are all listed.
const MAX_LISTED_SHAPE: usize = 12;
const MAX_CRT_ASSIGNMENTS: u128 = 1_000_000;
/// Residues printed per fiber level.
const MAX_LISTED_RESIDUES: usize = 16;

/// η on the configured region, from the cache directory when one is given.
fn window(setup: &Setup, cache: Option<&Path>, report: &mut Report) -> Result<Window, CliError> {
    let region = setup.region()?;
    let key = setup.window_key(&region);
    if let Some(dir) = cache {
        let path = dir.join(CACHE_FILE);
        if path.exists() {
            let w = read_window(&path, &key)?;
            report.run.insert("window_source".into(), json!("cache"));
            return Ok(w);
        }
    }
    let opts = SieveOptions { budget: setup.point_budget(), parts: 0 };
    let w = sieve_window_with(&setup.family, &region, setup.levels, opts)?;
    report.run.insert("window_source".into(), json!("sieve"));
    if let Some(dir) = cache {
        std::fs::create_dir_all(dir)?;
        write_window(&dir.join(CACHE_FILE), &w, &key)?;
    }
    Ok(w)
}

fn digits(setup: &Setup) -> usize {
    setup.config.digits
}

fn region_json(r: &Region) -> Value {
    json!({ "lo": r.lo(), "hi": r.hi(), "points": r.point_count().to_string() })
}

fn frequency(w: &Window) -> BigRational {
    BigRational::new((w.count_ones() as u64).into(), (w.len() as u64).into())
}

pub fn density_cmd(setup: &Setup, cache: Option<&Path>) -> Result<Report, CliError> {
    let mut report = Report::new("density");
    let dg = digits(setup);
    let l = setup.levels;
    let d = density(&setup.family, l)?;
    report.set("levels", json!(l));
    report.set("stored_levels", json!(setup.family.len()));
    report.set("density", interval(&d, dg));
    report.set("tail_after_levels", exact(&setup.family.tail_after(l), dg));
    if setup.config.region.is_some() {
        let w = window(setup, cache, &mut report)?;
        let f = frequency(&w);
        report.set(
            "empirical",
            json!({
                "region": region_json(w.region()),
                "ones": w.count_ones(),
                "frequency": exact(&f, dg),
                "difference": to_decimal(&(&f - &d.value), dg),
            }),
        );
    }
    Ok(report)
}

pub fn cylinder_cmd(setup: &Setup, cache: Option<&Path>) -> Result<Report, CliError> {
    let mut report = Report::new("cylinder");
    let dg = digits(setup);
    let (shape, masks): (Vec<RingElement>, Vec<u64>) = match &setup.config.pattern {
        Some(p) => {
            let mut shape = Vec::new();
            for (i, c) in p.ones.iter().enumerate() {
                shape.push(setup.point(&format!("pattern.ones[{i}]"), c)?);
            }
            for (i, c) in p.zeros.iter().enumerate() {
                shape.push(setup.point(&format!("pattern.zeros[{i}]"), c)?);
            }
            (shape, vec![(1u64 << p.ones.len()) - 1])
        }
        None => {
            let shape = setup.shape()?;
            if shape.is_empty() || shape.len() > MAX_LISTED_SHAPE {
                return Err(CliError::Config(format!(
                    "field `shape`: give 1 to {MAX_LISTED_SHAPE} points, or a `pattern`"
                )));
            }
            let masks = (0..1u64 << shape.len()).collect();
            (shape, masks)
        }
    };
    if shape.len() > 63 {
        return Err(CliError::Config("field `pattern`: too many points".into()));
    }
    let hist = match setup.config.region {
        Some(_) => {
            let w = window(setup, cache, &mut report)?;
            report.set("region", region_json(w.region()));
            Some(shape_histogram(&w, &shape)?)
        }
        None => None,
    };
    let mut table = Table::new(
        "patterns",
        &["mask", "ones", "zeros", "num", "den", "decimal", "halfwidth", "empirical", "difference"],
    );
    let mut rows = Vec::new();
    for &mask in &masks {
        let pattern = Pattern::from_mask(&shape, mask).map_err(|e| CliError::from_lib_in("pattern", e))?;
        let iv = mirsky_cylinder(&pattern, &setup.family, setup.levels)?;
        let emp = hist.as_ref().map(|h| h.frequency(mask));
        let pts = |v: &[RingElement]| v.iter().map(|a| point(a.coords())).collect::<Vec<_>>();
        let bits: String = (0..shape.len()).map(|j| if mask >> j & 1 == 1 { '1' } else { '0' }).collect();
        table.push(vec![
            bits.clone(),
            pts(pattern.ones()).join(" "),
            pts(pattern.zeros()).join(" "),
            iv.value.numer().to_string(),
            iv.value.denom().to_string(),
            to_decimal(&iv.value, dg),
            to_decimal(&iv.halfwidth, dg),
            emp.as_ref().map_or(String::new(), |e| to_decimal(e, dg)),
            emp.as_ref().map_or(String::new(), |e| to_decimal(&(e - &iv.value), dg)),
        ]);
        rows.push(json!({
            "mask": bits,
            "ones": pts(pattern.ones()),
            "zeros": pts(pattern.zeros()),
            "measure": interval(&iv, dg),
            "empirical": emp.map(|e| exact(&e, dg)),
        }));
    }
    report.set("levels", json!(setup.levels));
    report.set("shape", json!(shape.iter().map(|a| point(a.coords())).collect::<Vec<_>>()));
    if let Some(h) = &hist {
        report.set("positions", json!(h.interior));
    }
    report.set("cylinders", Value::Array(rows));
    report.tables.push(table);
    Ok(report)
}

pub fn entropy_cmd(setup: &Setup) -> Result<Report, CliError> {
    let mut report = Report::new("entropy");
    let dg = digits(setup);
    let (fam, l) = (&setup.family, setup.levels);
    let s = SVector::new(setup.config.s.clone());
    s.validate(fam, l).map_err(|e| CliError::from_lib_in("s", e))?;
    let formula = entropy_formula(fam, l, &s)?;
    let slack = class_choice_log2(fam, l, &s)?;
    let d = setup.degree();
    let mut boxes: Vec<(String, Region)> = setup
        .config
        .sizes
        .iter()
        .filter(|&&n| n > 0)
        .map(|&n| (n.to_string(), Region::new(vec![0; d], vec![n as i64 - 1; d]).expect("nonempty box")))
        .collect();
    if boxes.len() != setup.config.sizes.len() {
        return Err(CliError::Config("field `sizes`: sides must be positive".into()));
    }
    if boxes.is_empty() {
        boxes.push(("region".into(), setup.region()?));
    }
    let opts = CountOptions {
        term_budget: setup.config.term_budget.map_or(bfree::entropy::DEFAULT_TERM_BUDGET, u128::from),
        method: None,
    };
    let mut table = Table::new("series", &["side", "points", "count", "method", "lo", "hi", "formula", "excess"]);
    let mut rows = Vec::new();
    for (side, region) in boxes {
        region.check_budget(setup.point_budget())?;
        let est = entropy_estimate(&region, fam, l, &s, opts)?;
        table.push(vec![
            side.clone(),
            est.points.to_string(),
            est.count.count.to_string(),
            est.count.method.name().into(),
            to_decimal(&est.lo, dg),
            to_decimal(&est.hi, dg),
            to_decimal(&formula.value, dg),
            to_decimal(&(&est.hi - &formula.value), dg),
        ]);
        rows.push(json!({
            "side": side,
            "region": region_json(&region),
            "count": est.count.count.to_string(),
            "method": est.count.method.name(),
            "lo": exact(&est.lo, dg),
            "hi": exact(&est.hi, dg),
        }));
    }
    report.set("levels", json!(l));
    report.set("s", json!((0..l).map(|i| s.get(i)).collect::<Vec<_>>()));
    report.set("formula", interval(&formula, dg));
    report.set("class_choice_log2", exact(&slack, dg));
    report.set("estimates", Value::Array(rows));
    report.tables.push(table);
    Ok(report)
}

pub fn sieve_cmd(setup: &Setup, cache: Option<&Path>) -> Result<Report, CliError> {
    let mut report = Report::new("sieve");
    let w = window(setup, cache, &mut report)?;
    let key = setup.window_key(w.region());
    let digest = Sha256::digest(encode(&w, &key));
    report.set("levels", json!(setup.levels));
    report.set("region", region_json(w.region()));
    report.set("ones", json!(w.count_ones()));
    report.set("frequency", exact(&frequency(&w), digits(setup)));
    report.set("window_key", json!(hex::encode(key)));
    report.set("window_sha256", json!(hex::encode(digest)));
    Ok(report)
}

fn crt_section(setup: &Setup, w: &Window) -> Result<Value, CliError> {
    let shape = setup.shape()?;
    if shape.len() > setup.levels {
        // each shape point needs its own level, so nothing is forced
        return Ok(Value::Array(Vec::new()));
    }
    let l = setup.levels as u128;
    let assignments = l.checked_pow(shape.len() as u32).unwrap_or(u128::MAX);
    if assignments > MAX_CRT_ASSIGNMENTS {
        return Err(CliError::Budget(format!(
            "{assignments} level assignments for the CRT shape, budget {MAX_CRT_ASSIGNMENTS}"
        )));
    }
    let classes = crt_zero_classes(&setup.family, setup.levels, &shape).map_err(|e| CliError::from_lib_in("shape", e))?;
    let out: Vec<Value> = classes
        .iter()
        .map(|c| {
            // whether this representative is itself a zero position in the window
            let mut all = Some(true);
            for s in &shape {
                let x: Vec<i64> = c.coords().iter().zip(s.coords()).map(|(a, b)| a + b).collect();
                match w.get(&x) {
                    Some(true) => all = Some(false),
                    Some(false) => {}
                    None => {
                        all = None;
                        break;
                    }
                }
            }
            json!({ "class": point(c.coords()), "zero_in_window": all })
        })
        .collect();
    Ok(Value::Array(out))
}

pub fn scan_cmd(setup: &Setup, cache: Option<&Path>) -> Result<Report, CliError> {
    let mut report = Report::new("scan");
    let w = window(setup, cache, &mut report)?;
    let sides = if setup.config.sides.is_empty() { vec![1, 2, 3] } else { setup.config.sides.clone() };
    let mut summary = Table::new("sides", &["side", "found", "positions", "first", "max_gap"]);
    let mut positions = Table::new("positions", &["side", "position"]);
    let mut rows = Vec::new();
    for side in sides {
        let scan = zero_window_scan(&w, side).map_err(|e| CliError::from_lib_in("sides", e))?;
        let gaps: Vec<String> = scan.max_gap.iter().map(|g| g.map_or("-".into(), |g| g.to_string())).collect();
        summary.push(vec![
            side.to_string(),
            scan.positions.len().to_string(),
            scan.interior.to_string(),
            scan.positions.first().map_or(String::new(), |p| point(p)),
            gaps.join(" "),
        ]);
        for p in &scan.positions {
            positions.push(vec![side.to_string(), point(p)]);
        }
        rows.push(json!({
            "side": side,
            "found": scan.positions.len(),
            "positions": scan.interior,
            "first": scan.positions.iter().take(10).map(|p| point(p)).collect::<Vec<_>>(),
            "max_gap": scan.max_gap,
        }));
    }
    report.set("levels", json!(setup.levels));
    report.set("region", region_json(w.region()));
    report.set("scans", Value::Array(rows));
    if !setup.config.shape.is_empty() {
        report.set("crt_classes", crt_section(setup, &w)?);
    }
    report.tables.push(summary);
    report.tables.push(positions);
    Ok(report)
}

fn fiber_json(f: &FiberReport, setup: &Setup) -> Vec<Value> {
    f.levels
        .iter()
        .zip(setup.family.ideals())
        .enumerate()
        .map(|(i, (lvl, b))| {
            json!({
                "level": i,
                "norm": b.norm(),
                "count": lvl.residues.len(),
                "residues": lvl.residues.iter().take(MAX_LISTED_RESIDUES).map(|r| point(r.coords())).collect::<Vec<_>>(),
                "untested": lvl.untested.len(),
            })
        })
        .collect()
}

pub fn fibers_cmd(setup: &Setup, cache: Option<&Path>) -> Result<Report, CliError> {
    let mut report = Report::new("fibers");
    let w = window(setup, cache, &mut report)?;
    let fam = &setup.family;
    let points = w.region().point_count().min(u64::MAX as u128) as u64;
    // beyond this, a level has classes the window cannot test
    let lf = fam.truncation_for_norm(points).min(setup.levels);
    let theta = theta_window(&w, fam, lf)?;
    let joining = joining_fiber(&w, fam, lf)?;
    let phi_theta = match check_phi_theta(&w, fam, lf) {
        Ok(true) => json!("holds"),
        Ok(false) => json!("fails"),
        Err(Error::Inconclusive(i)) => json!(format!("inconclusive at level {i}")),
        Err(e) => return Err(e.into()),
    };
    let samples = setup.config.samples.unwrap_or(10);
    let mut rng = ChaCha8Rng::seed_from_u64(setup.seed);
    let (mut recovered, mut consistent) = (0, 0);
    for _ in 0..samples {
        let g = GroupPoint::random(fam, lf, &mut rng)?;
        let wg = phi_window(&g, w.region(), fam)?;
        let th = theta_window(&wg, fam, lf)?;
        if th.singletons().as_deref() == Some(g.residues()) {
            recovered += 1;
        }
        if th.levels.iter().zip(g.residues()).all(|(f, r)| f.residues.contains(r) || f.untested.contains(r)) {
            consistent += 1;
        }
    }
    let mut table = Table::new("levels", &["level", "norm", "theta", "joining", "untested"]);
    for (i, ((t, j), b)) in theta.levels.iter().zip(&joining.levels).zip(fam.ideals()).enumerate() {
        let list = |v: &[RingElement]| v.iter().take(MAX_LISTED_RESIDUES).map(|r| point(r.coords())).collect::<Vec<_>>().join(" ");
        table.push(vec![i.to_string(), b.norm().to_string(), list(&t.residues), list(&j.residues), t.untested.len().to_string()]);
    }
    report.set("levels", json!(setup.levels));
    report.set("fiber_levels", json!(lf));
    report.set("region", region_json(w.region()));
    report.set("theta", json!(fiber_json(&theta, setup)));
    report.set("joining", json!(fiber_json(&joining, setup)));
    report.set("theta_is_singleton", json!(theta.singletons().is_some()));
    report.set("phi_theta", phi_theta);
    report.set("random_points", json!({ "samples": samples, "recovered": recovered, "consistent": consistent }));
    report.tables.push(table);
    Ok(report)
}

pub fn factor_cmd(setup: &Setup) -> Result<Report, CliError> {
    let mut report = Report::new("factor");
    let primes = if setup.config.primes.is_empty() { primes_up_to(50) } else { setup.config.primes.clone() };
    let d = setup.degree() as u32;
    let mut table = Table::new("primes", &["p", "status", "e", "f", "norm", "hnf"]);
    let mut rows = Vec::new();
    for p in primes {
        match factor_rational_prime(p, &setup.order) {
            Ok(factors) => {
                let mut list = Vec::new();
                for pf in &factors {
                    let hnf = format!("{:?}", pf.ideal.basis());
                    table.push(vec![
                        p.to_string(),
                        "ok".into(),
                        pf.e.to_string(),
                        pf.f.to_string(),
                        pf.ideal.norm().to_string(),
                        hnf.clone(),
                    ]);
                    list.push(json!({ "e": pf.e, "f": pf.f, "norm": pf.ideal.norm(), "hnf": pf.ideal.basis() }));
                }
                let ef: u32 = factors.iter().map(|pf| pf.e * pf.f).sum();
                rows.push(json!({ "p": p, "status": "ok", "factors": list, "sum_ef_is_degree": ef == d }));
            }
            Err(Error::UnsafePrime(_)) => {
                table.push(vec![p.to_string(), "unsafe".into(), String::new(), String::new(), String::new(), String::new()]);
                rows.push(json!({ "p": p, "status": "unsafe" }));
            }
            Err(e) => return Err(CliError::from_lib_in("primes", e)),
        }
    }
    report.set("discriminant", json!(setup.order.discriminant().to_string()));
    report.set("primes", Value::Array(rows));
    report.tables.push(table);
    Ok(report)
}

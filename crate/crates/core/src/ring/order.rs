use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::poly_fp::{primes_up_to, Fp};
use crate::error::{Error, Result};
use crate::exact::det_bareiss;

pub const DEFAULT_DEGREE_CAP: usize = 6;

/// Element of a monogenic order, as coordinates over the power basis
/// `1, θ, …, θ^(d-1)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RingElement(pub Vec<i64>);

impl RingElement {
    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }
}

impl fmt::Display for RingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, &c) in self.0.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let sign = if c < 0 { "-" } else if first { "" } else { "+" };
            let mag = c.unsigned_abs();
            let term = match (i, mag) {
                (0, m) => m.to_string(),
                (1, 1) => "θ".to_string(),
                (1, m) => format!("{m}θ"),
                (k, 1) => format!("θ^{k}"),
                (k, m) => format!("{m}θ^{k}"),
            };
            write!(f, "{sign}{term}")?;
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug)]
pub struct OrderOptions {
    pub degree_cap: usize,
    /// Caller asserts Z[θ] is the full ring of integers, which makes
    /// Kummer–Dedekind valid at every prime.
    pub assume_maximal: bool,
}

impl Default for OrderOptions {
    fn default() -> Self {
        OrderOptions { degree_cap: DEFAULT_DEGREE_CAP, assume_maximal: false }
    }
}

/// The order Z[θ] = Z[x]/(f) for a monic irreducible f.
#[derive(Debug)]
pub struct FieldOrder {
    coeffs: Vec<i64>,
    degree: usize,
    /// `mul_table[i][j]` holds the coordinates of θ^i·θ^j.
    mul_table: Vec<Vec<Vec<i64>>>,
    discriminant: BigInt,
    assume_maximal: bool,
}

/// Builds the order for `f`, given by integer coefficients lowest degree first.
pub fn make_order(f_coeffs: &[i64]) -> Result<Arc<FieldOrder>> {
    FieldOrder::with_options(f_coeffs, OrderOptions::default()).map(Arc::new)
}

impl FieldOrder {
    pub fn with_options(f_coeffs: &[i64], opts: OrderOptions) -> Result<FieldOrder> {
        let mut coeffs = f_coeffs.to_vec();
        while coeffs.len() > 1 && coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        if coeffs.len() < 2 {
            return Err(Error::EmptyPolynomial);
        }
        let degree = coeffs.len() - 1;
        let lead = coeffs[degree];
        if lead != 1 {
            return Err(Error::NotMonic(lead));
        }
        if degree > opts.degree_cap {
            return Err(Error::DegreeTooLarge { degree, cap: opts.degree_cap });
        }
        let mul_table = build_mul_table(&coeffs)?;
        let discriminant = discriminant(&coeffs);
        if !is_irreducible(&coeffs, &discriminant) {
            return Err(Error::Reducible);
        }
        Ok(FieldOrder { coeffs, degree, mul_table, discriminant, assume_maximal: opts.assume_maximal })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn discriminant(&self) -> &BigInt {
        &self.discriminant
    }

    pub fn assume_maximal(&self) -> bool {
        self.assume_maximal
    }

    pub fn mul_table(&self) -> &[Vec<Vec<i64>>] {
        &self.mul_table
    }

    pub fn same_as(&self, other: &FieldOrder) -> bool {
        std::ptr::eq(self, other) || self.coeffs == other.coeffs
    }

    pub fn zero(&self) -> RingElement {
        RingElement(vec![0; self.degree])
    }

    pub fn one(&self) -> RingElement {
        self.from_int(1)
    }

    pub fn from_int(&self, n: i64) -> RingElement {
        let mut v = vec![0; self.degree];
        v[0] = n;
        RingElement(v)
    }

    /// θ^k for k < d.
    pub fn basis_element(&self, k: usize) -> RingElement {
        let mut v = vec![0; self.degree];
        v[k] = 1;
        RingElement(v)
    }

    pub fn element(&self, coords: &[i64]) -> Result<RingElement> {
        if coords.len() > self.degree {
            return Err(Error::DegreeMismatch { expected: self.degree, found: coords.len() });
        }
        let mut v = coords.to_vec();
        v.resize(self.degree, 0);
        Ok(RingElement(v))
    }

    pub fn check(&self, a: &RingElement) -> Result<()> {
        if a.0.len() != self.degree {
            return Err(Error::DegreeMismatch { expected: self.degree, found: a.0.len() });
        }
        Ok(())
    }

    pub fn add(&self, a: &RingElement, b: &RingElement) -> Result<RingElement> {
        self.check(a)?;
        self.check(b)?;
        a.0.iter()
            .zip(&b.0)
            .map(|(x, y)| x.checked_add(*y).ok_or(Error::Overflow("element addition")))
            .collect::<Result<Vec<_>>>()
            .map(RingElement)
    }

    pub fn sub(&self, a: &RingElement, b: &RingElement) -> Result<RingElement> {
        self.check(a)?;
        self.check(b)?;
        a.0.iter()
            .zip(&b.0)
            .map(|(x, y)| x.checked_sub(*y).ok_or(Error::Overflow("element subtraction")))
            .collect::<Result<Vec<_>>>()
            .map(RingElement)
    }

    pub fn neg(&self, a: &RingElement) -> Result<RingElement> {
        a.0.iter()
            .map(|x| x.checked_neg().ok_or(Error::Overflow("element negation")))
            .collect::<Result<Vec<_>>>()
            .map(RingElement)
    }

    /// Product reduced modulo f through the multiplication table.
    pub fn mul(&self, a: &RingElement, b: &RingElement) -> Result<RingElement> {
        self.check(a)?;
        self.check(b)?;
        let d = self.degree;
        let mut acc = vec![0i128; d];
        for i in 0..d {
            if a.0[i] == 0 {
                continue;
            }
            for j in 0..d {
                if b.0[j] == 0 {
                    continue;
                }
                let ab = a.0[i] as i128 * b.0[j] as i128;
                for (k, t) in self.mul_table[i][j].iter().enumerate() {
                    if *t != 0 {
                        let term = ab.checked_mul(*t as i128).ok_or(Error::Overflow("element product"))?;
                        acc[k] = acc[k].checked_add(term).ok_or(Error::Overflow("element product"))?;
                    }
                }
            }
        }
        acc.into_iter()
            .map(|x| i64::try_from(x).map_err(|_| Error::Overflow("element product")))
            .collect::<Result<Vec<_>>>()
            .map(RingElement)
    }

    /// Product in wide arithmetic; never overflows.
    pub fn mul_big(&self, a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
        let d = self.degree;
        let mut acc = vec![BigInt::zero(); d];
        for i in 0..d {
            if a[i].is_zero() {
                continue;
            }
            for j in 0..d {
                if b[j].is_zero() {
                    continue;
                }
                let ab = &a[i] * &b[j];
                for (k, t) in self.mul_table[i][j].iter().enumerate() {
                    if *t != 0 {
                        acc[k] += &ab * *t;
                    }
                }
            }
        }
        acc
    }

    /// Matrix of multiplication by `a` (column j = a·θ^j), in wide integers.
    pub fn mul_matrix(&self, a: &[BigInt]) -> Vec<Vec<BigInt>> {
        let d = self.degree;
        let cols: Vec<Vec<BigInt>> = (0..d)
            .map(|j| {
                let mut e = vec![BigInt::zero(); d];
                e[j] = BigInt::one();
                self.mul_big(a, &e)
            })
            .collect();
        (0..d).map(|r| (0..d).map(|c| cols[c][r].clone()).collect()).collect()
    }

    /// Field norm N_{K/Q}(a) as the determinant of multiplication by `a`.
    pub fn element_norm(&self, a: &RingElement) -> BigInt {
        let big: Vec<BigInt> = a.0.iter().map(|&x| BigInt::from(x)).collect();
        det_bareiss(&self.mul_matrix(&big))
    }

    /// Evaluates an integer polynomial (lowest degree first) at θ.
    pub fn eval_poly(&self, poly: &[i64]) -> Result<RingElement> {
        let theta = if self.degree == 1 {
            self.from_int(-self.coeffs[0])
        } else {
            self.basis_element(1)
        };
        let mut acc = self.zero();
        for &c in poly.iter().rev() {
            acc = self.mul(&acc, &theta)?;
            acc.0[0] = acc.0[0].checked_add(c).ok_or(Error::Overflow("polynomial evaluation"))?;
        }
        Ok(acc)
    }
}

fn build_mul_table(f: &[i64]) -> Result<Vec<Vec<Vec<i64>>>> {
    let d = f.len() - 1;
    if d == 1 {
        // Z[θ] = Z with θ = -f0; the basis is just 1.
        return Ok(vec![vec![vec![1]]]);
    }
    // powers θ^k for k ≤ 2d-2 as coordinate vectors
    let mut powers: Vec<Vec<i64>> = Vec::with_capacity(2 * d - 1);
    for k in 0..d {
        let mut v = vec![0; d];
        v[k] = 1;
        powers.push(v);
    }
    for k in d..=2 * d - 2 {
        let prev = &powers[k - 1];
        // θ·prev: shift up, then fold θ^d = -Σ f_i θ^i.
        let top = prev[d - 1];
        let mut next = vec![0i64; d];
        for i in (1..d).rev() {
            next[i] = prev[i - 1];
        }
        for i in 0..d {
            let t = top.checked_mul(f[i]).ok_or(Error::Overflow("multiplication table"))?;
            next[i] = next[i].checked_sub(t).ok_or(Error::Overflow("multiplication table"))?;
        }
        powers.push(next);
    }
    Ok((0..d).map(|i| (0..d).map(|j| powers[i + j].clone()).collect()).collect())
}

/// disc(f) as the determinant of the trace form Tr(θ^(i+j)), with power
/// sums from Newton's identities.
fn discriminant(f: &[i64]) -> BigInt {
    let d = f.len() - 1;
    let a: Vec<BigInt> = f.iter().map(|&c| BigInt::from(c)).collect();
    let mut s: Vec<BigInt> = vec![BigInt::from(d as i64)];
    for k in 1..=2 * d - 2 {
        let mut v = BigInt::zero();
        for i in 1..=k.min(d) {
            if i < k {
                v -= &a[d - i] * &s[k - i];
            } else {
                // i == k ≤ d
                v -= &a[d - k] * BigInt::from(k as i64);
            }
        }
        s.push(v);
    }
    let m: Vec<Vec<BigInt>> = (0..d).map(|i| (0..d).map(|j| s[i + j].clone()).collect()).collect();
    det_bareiss(&m)
}

// ---- irreducibility over Q ----

fn degree_pattern_mod_p(f: &[i64], p: u64) -> Vec<usize> {
    let fp = Fp::new(p);
    fp.factor(&fp.poly(f)).into_iter().map(|(g, _)| g.degree().unwrap()).collect()
}

fn subset_sums(parts: &[usize], max: usize) -> Vec<bool> {
    let mut reach = vec![false; max + 1];
    reach[0] = true;
    for &p in parts {
        for s in (p..=max).rev() {
            if reach[s - p] {
                reach[s] = true;
            }
        }
    }
    reach
}

fn is_irreducible(f: &[i64], disc: &BigInt) -> bool {
    let d = f.len() - 1;
    if d == 1 {
        return true;
    }
    if disc.is_zero() {
        // repeated factor over Q
        return false;
    }
    if f[0] == 0 {
        return false;
    }
    // Candidate degrees k ≤ d/2 of a rational factor, pruned by factorization
    // degree patterns modulo good primes.
    let mut candidate: Vec<bool> = (0..=d / 2).map(|k| k >= 1).collect();
    let mut tried = 0;
    for p in primes_up_to(2000) {
        if (disc % BigInt::from(p)).is_zero() {
            continue;
        }
        let sums = subset_sums(&degree_pattern_mod_p(f, p), d);
        for (k, c) in candidate.iter_mut().enumerate() {
            *c = *c && sums[k];
        }
        tried += 1;
        if !candidate.iter().any(|&c| c) || tried >= 40 {
            break;
        }
    }
    for k in 1..=d / 2 {
        if candidate[k] && has_factor_of_degree(f, k) {
            return false;
        }
    }
    true
}

fn eval_i128(f: &[i64], x: i64) -> Option<i128> {
    let mut acc: i128 = 0;
    for &c in f.iter().rev() {
        acc = acc.checked_mul(x as i128)?.checked_add(c as i128)?;
    }
    Some(acc)
}

fn divisors(n: i128) -> Vec<i128> {
    let n = n.abs();
    let mut out = Vec::new();
    let mut i = 1i128;
    while i * i <= n {
        if n % i == 0 {
            out.push(i);
            if i * i != n {
                out.push(n / i);
            }
        }
        i += 1;
    }
    out
}

/// Kronecker's method: a monic degree-k factor g is determined by its values
/// at k+1 points, each of which divides the value of f there.
fn has_factor_of_degree(f: &[i64], k: usize) -> bool {
    let mut pts: Vec<(i64, i128)> = Vec::new();
    let mut candidates: Vec<(i64, i128)> = (-30i64..=30)
        .filter_map(|x| eval_i128(f, x).map(|v| (x, v)))
        .collect();
    if candidates.iter().any(|&(_, v)| v == 0) {
        return true;
    }
    candidates.sort_by_key(|&(x, v)| (divisors(v).len(), x.abs()));
    pts.extend(candidates.into_iter().take(k + 1));
    let choices: Vec<Vec<i128>> = pts
        .iter()
        .map(|&(_, v)| divisors(v).into_iter().flat_map(|q| [q, -q]).collect())
        .collect();
    let mut idx = vec![0usize; k + 1];
    loop {
        let vals: Vec<i128> = idx.iter().zip(&choices).map(|(&i, c)| c[i]).collect();
        if let Some(g) = interpolate_monic(&pts, &vals, k) {
            if divides(&g, f) {
                return true;
            }
        }
        let mut pos = 0;
        loop {
            if pos > k {
                return false;
            }
            idx[pos] += 1;
            if idx[pos] < choices[pos].len() {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

/// Lagrange interpolation through (x_i, v_i); returns integer coefficients
/// when the interpolant is a monic integer polynomial of degree exactly k.
fn interpolate_monic(pts: &[(i64, i128)], vals: &[i128], k: usize) -> Option<Vec<BigInt>> {
    let mut coeffs = vec![BigRational::zero(); k + 1];
    for i in 0..=k {
        let xi = BigInt::from(pts[i].0);
        let mut basis = vec![BigRational::one()];
        let mut denom = BigInt::one();
        for (j, &(xj, _)) in pts.iter().enumerate().take(k + 1) {
            if j == i {
                continue;
            }
            let xj = BigInt::from(xj);
            let mut next = vec![BigRational::zero(); basis.len() + 1];
            for (t, c) in basis.iter().enumerate() {
                next[t + 1] += c.clone();
                next[t] -= c * BigRational::from_integer(xj.clone());
            }
            basis = next;
            denom *= &xi - &xj;
        }
        let scale = BigRational::new(BigInt::from(vals[i]), denom);
        for (t, c) in basis.into_iter().enumerate() {
            coeffs[t] += c * &scale;
        }
    }
    if !coeffs[k].is_one() {
        return None;
    }
    coeffs.into_iter().map(|c| c.is_integer().then(|| c.to_integer())).collect()
}

fn divides(g: &[BigInt], f: &[i64]) -> bool {
    // g monic; long division over Z
    let mut rem: Vec<BigInt> = f.iter().map(|&c| BigInt::from(c)).collect();
    let dg = g.len() - 1;
    for top in (dg..rem.len()).rev() {
        let c = rem[top].clone();
        if c.is_zero() {
            continue;
        }
        for (j, gj) in g.iter().enumerate() {
            rem[top - dg + j] -= &c * gj;
        }
    }
    rem.iter().take(dg).all(|c| c.is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_integers() {
        let o = make_order(&[1, 0, 1]).unwrap();
        assert_eq!(o.degree(), 2);
        assert_eq!(*o.discriminant(), BigInt::from(-4));
        let theta = o.basis_element(1);
        assert_eq!(o.mul(&theta, &theta).unwrap(), o.from_int(-1));
        let a = o.element(&[1, 1]).unwrap();
        let b = o.element(&[1, -1]).unwrap();
        assert_eq!(o.mul(&a, &b).unwrap(), o.from_int(2));
        assert_eq!(o.element_norm(&a), BigInt::from(2));
    }

    #[test]
    fn rational_integers() {
        let o = make_order(&[0, 1]).unwrap();
        assert_eq!(o.degree(), 1);
        assert_eq!(o.mul(&o.from_int(3), &o.from_int(4)).unwrap(), o.from_int(12));
        assert_eq!(*o.discriminant(), BigInt::from(1));
    }

    #[test]
    fn construction_errors() {
        assert_eq!(make_order(&[0, -1, 1]).unwrap_err(), Error::Reducible);
        assert_eq!(make_order(&[1, 0, 2]).unwrap_err(), Error::NotMonic(2));
        assert_eq!(make_order(&[5]).unwrap_err(), Error::EmptyPolynomial);
        assert!(matches!(
            make_order(&[1, 0, 0, 0, 0, 0, 0, 1]).unwrap_err(),
            Error::DegreeTooLarge { degree: 7, cap: 6 }
        ));
        // (x^2+1)(x^2+2): no rational root, reducible
        assert_eq!(make_order(&[2, 0, 3, 0, 1]).unwrap_err(), Error::Reducible);
        // (x^2+x+1)(x^3+x+1)
        assert_eq!(make_order(&[1, 2, 2, 2, 1, 1]).unwrap_err(), Error::Reducible);
        // x^4+1 is irreducible but reducible modulo every prime
        assert!(make_order(&[1, 0, 0, 0, 1]).is_ok());
        // squares of irreducibles have zero discriminant
        assert_eq!(make_order(&[1, 0, 2, 0, 1]).unwrap_err(), Error::Reducible);
    }

    #[test]
    fn discriminants() {
        let cases: &[(&[i64], i64)] = &[
            (&[-2, 0, 1], 8),
            (&[1, 1, 1], -3),
            (&[-2, 0, 0, 1], -108),
            (&[1, 0, 0, 0, 1], 256),
            (&[-1, -1, 0, 1], -23),
        ];
        for &(f, disc) in cases {
            assert_eq!(*make_order(f).unwrap().discriminant(), BigInt::from(disc), "{f:?}");
        }
    }

    #[test]
    fn mul_table_matches_reduction() {
        let o = make_order(&[-2, 0, 0, 1]).unwrap(); // θ^3 = 2
        let t = o.basis_element(1);
        let t2 = o.mul(&t, &t).unwrap();
        assert_eq!(t2, o.basis_element(2));
        assert_eq!(o.mul(&t2, &t).unwrap(), o.from_int(2));
        assert_eq!(o.mul(&t2, &t2).unwrap(), o.element(&[0, 2, 0]).unwrap());
    }

    #[test]
    fn display() {
        assert_eq!(RingElement(vec![1, -1]).to_string(), "1-θ");
        assert_eq!(RingElement(vec![0, 0, 3]).to_string(), "3θ^2");
        assert_eq!(RingElement(vec![0, 0]).to_string(), "0");
    }
}

//! Dense univariate polynomials over a prime field F_p and their factorization
//! (square-free decomposition, distinct-degree and equal-degree splitting).

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Coefficients lowest degree first, no trailing zeros. The zero polynomial is empty.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PolyFp {
    pub coeffs: Vec<u64>,
}

#[derive(Clone, Copy, Debug)]
pub struct Fp {
    pub p: u64,
}

impl Fp {
    pub fn new(p: u64) -> Self {
        Fp { p }
    }

    #[inline]
    pub fn add(self, a: u64, b: u64) -> u64 {
        let s = a as u128 + b as u128;
        (s % self.p as u128) as u64
    }

    #[inline]
    pub fn sub(self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            self.p - (b - a)
        }
    }

    #[inline]
    pub fn mul(self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.p as u128) as u64
    }

    pub fn pow(self, mut base: u64, mut exp: u64) -> u64 {
        let mut acc = 1 % self.p;
        base %= self.p;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    pub fn inv(self, a: u64) -> u64 {
        debug_assert!(a % self.p != 0);
        self.pow(a, self.p - 2)
    }

    pub fn from_i64(self, v: i64) -> u64 {
        v.rem_euclid(self.p as i64) as u64
    }

    pub fn poly(self, coeffs: &[i64]) -> PolyFp {
        PolyFp::from_vec(coeffs.iter().map(|&c| self.from_i64(c)).collect())
    }

    pub fn poly_add(self, a: &PolyFp, b: &PolyFp) -> PolyFp {
        let n = a.coeffs.len().max(b.coeffs.len());
        let v = (0..n).map(|i| self.add(a.get(i), b.get(i))).collect();
        PolyFp::from_vec(v)
    }

    pub fn poly_sub(self, a: &PolyFp, b: &PolyFp) -> PolyFp {
        let n = a.coeffs.len().max(b.coeffs.len());
        let v = (0..n).map(|i| self.sub(a.get(i), b.get(i))).collect();
        PolyFp::from_vec(v)
    }

    pub fn poly_mul(self, a: &PolyFp, b: &PolyFp) -> PolyFp {
        if a.is_zero() || b.is_zero() {
            return PolyFp::zero();
        }
        let mut out = vec![0u64; a.coeffs.len() + b.coeffs.len() - 1];
        for (i, &x) in a.coeffs.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.coeffs.iter().enumerate() {
                out[i + j] = self.add(out[i + j], self.mul(x, y));
            }
        }
        PolyFp::from_vec(out)
    }

    pub fn scale(self, a: &PolyFp, c: u64) -> PolyFp {
        PolyFp::from_vec(a.coeffs.iter().map(|&x| self.mul(x, c)).collect())
    }

    pub fn monic(self, a: &PolyFp) -> PolyFp {
        match a.lead() {
            None => PolyFp::zero(),
            Some(l) => self.scale(a, self.inv(l)),
        }
    }

    /// Quotient and remainder; `b` must be nonzero.
    pub fn divrem(self, a: &PolyFp, b: &PolyFp) -> (PolyFp, PolyFp) {
        let db = b.degree().expect("division by zero polynomial");
        let inv_lead = self.inv(b.lead().unwrap());
        let mut rem = a.coeffs.clone();
        if rem.len() <= db {
            return (PolyFp::zero(), a.clone());
        }
        let mut quot = vec![0u64; rem.len() - db];
        for k in (0..quot.len()).rev() {
            let c = self.mul(rem[k + db], inv_lead);
            quot[k] = c;
            if c == 0 {
                continue;
            }
            for (j, &bc) in b.coeffs.iter().enumerate() {
                rem[k + j] = self.sub(rem[k + j], self.mul(c, bc));
            }
        }
        rem.truncate(db);
        (PolyFp::from_vec(quot), PolyFp::from_vec(rem))
    }

    pub fn rem(self, a: &PolyFp, b: &PolyFp) -> PolyFp {
        self.divrem(a, b).1
    }

    /// Monic gcd.
    pub fn gcd(self, a: &PolyFp, b: &PolyFp) -> PolyFp {
        let (mut x, mut y) = (a.clone(), b.clone());
        while !y.is_zero() {
            let r = self.rem(&x, &y);
            x = y;
            y = r;
        }
        self.monic(&x)
    }

    pub fn derivative(self, a: &PolyFp) -> PolyFp {
        let v = a
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| self.mul(c, i as u64 % self.p))
            .collect();
        PolyFp::from_vec(v)
    }

    pub fn mulmod(self, a: &PolyFp, b: &PolyFp, m: &PolyFp) -> PolyFp {
        self.rem(&self.poly_mul(a, b), m)
    }

    /// `base^exp mod m` with a big exponent given as little-endian u64 limbs.
    pub fn powmod(self, base: &PolyFp, exp: &[u64], m: &PolyFp) -> PolyFp {
        let mut acc = PolyFp::constant(1);
        let base = self.rem(base, m);
        for &limb in exp.iter().rev() {
            for bit in (0..64).rev() {
                acc = self.mulmod(&acc, &acc, m);
                if (limb >> bit) & 1 == 1 {
                    acc = self.mulmod(&acc, &base, m);
                }
            }
        }
        acc
    }

    fn p_pow(self, k: usize) -> Vec<u64> {
        let mut limbs = vec![1u64];
        for _ in 0..k {
            let mut carry = 0u128;
            for limb in limbs.iter_mut() {
                let v = *limb as u128 * self.p as u128 + carry;
                *limb = v as u64;
                carry = v >> 64;
            }
            if carry > 0 {
                limbs.push(carry as u64);
            }
        }
        limbs
    }

    /// Square-free decomposition of a monic polynomial: pairs (g, e) with
    /// `a = prod g^e` and each `g` square-free (not necessarily irreducible).
    pub fn squarefree(self, a: &PolyFp) -> Vec<(PolyFp, u32)> {
        let mut out = Vec::new();
        self.squarefree_into(&self.monic(a), 1, &mut out);
        out
    }

    fn squarefree_into(self, f: &PolyFp, mult: u32, out: &mut Vec<(PolyFp, u32)>) {
        if f.degree().unwrap_or(0) == 0 {
            return;
        }
        let df = self.derivative(f);
        let mut c = self.gcd(f, &df);
        let mut w = self.divrem(f, &c).0;
        let mut i = 1u32;
        while w.degree().unwrap_or(0) > 0 {
            let y = self.gcd(&w, &c);
            let z = self.divrem(&w, &y).0;
            if z.degree().unwrap_or(0) > 0 {
                out.push((self.monic(&z), i * mult));
            }
            i += 1;
            w = y;
            c = self.divrem(&c, &w).0;
        }
        if c.degree().unwrap_or(0) > 0 {
            // c is a p-th power: take the p-th root coefficientwise.
            let root: Vec<u64> = c.coeffs.iter().step_by(self.p as usize).copied().collect();
            self.squarefree_into(&PolyFp::from_vec(root), mult * self.p as u32, out);
        }
    }

    /// Distinct-degree factorization of a monic square-free polynomial.
    pub fn distinct_degree(self, a: &PolyFp) -> Vec<(PolyFp, usize)> {
        let mut out = Vec::new();
        let mut f = self.monic(a);
        let x = PolyFp::from_vec(vec![0, 1]);
        let mut h = x.clone();
        let mut k = 0usize;
        while f.degree().unwrap_or(0) >= 2 * (k + 1) {
            k += 1;
            h = self.powmod(&h, &[self.p], &f);
            let g = self.gcd(&self.poly_sub(&h, &x), &f);
            if g.degree().unwrap_or(0) > 0 {
                f = self.divrem(&f, &g).0;
                h = self.rem(&h, &f);
                out.push((g, k));
            }
        }
        if let Some(deg) = f.degree() {
            if deg > 0 {
                out.push((f, deg));
            }
        }
        out
    }

    /// Splits a monic product of distinct irreducibles of common degree `k`.
    pub fn equal_degree(self, a: &PolyFp, k: usize, rng: &mut ChaCha8Rng) -> Vec<PolyFp> {
        let n = a.degree().unwrap_or(0);
        if n == k {
            return vec![self.monic(a)];
        }
        loop {
            let r = PolyFp::from_vec((0..n).map(|_| rng.gen_range(0..self.p)).collect());
            if r.degree().unwrap_or(0) == 0 {
                continue;
            }
            let candidate = if self.p == 2 {
                // Trace map r + r^2 + ... + r^(2^(k-1)).
                let mut t = r.clone();
                let mut acc = r.clone();
                for _ in 1..k {
                    t = self.mulmod(&t, &t, a);
                    acc = self.poly_add(&acc, &t);
                }
                acc
            } else {
                // r^((p^k - 1) / 2) - 1
                let mut e = self.p_pow(k);
                let mut borrow = 1u64;
                for limb in e.iter_mut() {
                    let (v, b) = limb.overflowing_sub(borrow);
                    *limb = v;
                    borrow = b as u64;
                    if borrow == 0 {
                        break;
                    }
                }
                let mut carry = 0u64;
                for limb in e.iter_mut().rev() {
                    let v = (*limb >> 1) | (carry << 63);
                    carry = *limb & 1;
                    *limb = v;
                }
                let pw = self.powmod(&r, &e, a);
                self.poly_sub(&pw, &PolyFp::constant(1))
            };
            let g = self.gcd(&candidate, a);
            let dg = g.degree().unwrap_or(0);
            if dg > 0 && dg < n {
                let h = self.divrem(a, &g).0;
                let mut out = self.equal_degree(&g, k, rng);
                out.extend(self.equal_degree(&self.monic(&h), k, rng));
                return out;
            }
        }
    }

    /// Full factorization of a nonzero polynomial into monic irreducibles with
    /// multiplicities, sorted by (degree, coefficients).
    pub fn factor(self, a: &PolyFp) -> Vec<(PolyFp, u32)> {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed ^ self.p);
        let mut out = Vec::new();
        for (sf, e) in self.squarefree(a) {
            for (block, k) in self.distinct_degree(&sf) {
                for g in self.equal_degree(&block, k, &mut rng) {
                    out.push((g, e));
                }
            }
        }
        out.sort_by(|x, y| {
            x.0.degree()
                .cmp(&y.0.degree())
                .then_with(|| x.0.coeffs.iter().rev().cmp(y.0.coeffs.iter().rev()))
        });
        out
    }
}

impl PolyFp {
    pub fn from_vec(mut coeffs: Vec<u64>) -> Self {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        PolyFp { coeffs }
    }

    pub fn zero() -> Self {
        PolyFp { coeffs: Vec::new() }
    }

    pub fn constant(c: u64) -> Self {
        PolyFp::from_vec(vec![c])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn lead(&self) -> Option<u64> {
        self.coeffs.last().copied()
    }

    fn get(&self, i: usize) -> u64 {
        self.coeffs.get(i).copied().unwrap_or(0)
    }
}

/// Deterministic Miller–Rabin for the full u64 range.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let f = Fp::new(n);
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = f.pow(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = f.mul(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Primes up to and including `limit` (sieve of Eratosthenes).
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if composite[i] {
            continue;
        }
        out.push(i as u64);
        let mut j = i * i;
        while j <= n {
            composite[j] = true;
            j += i;
        }
    }
    out
}

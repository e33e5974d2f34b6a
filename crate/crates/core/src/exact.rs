//! Exact integer and rational helpers shared by the algebra and counting layers.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Determinant of a square integer matrix by fraction-free (Bareiss) elimination.
pub fn det_bareiss(matrix: &[Vec<BigInt>]) -> BigInt {
    let n = matrix.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut m: Vec<Vec<BigInt>> = matrix.to_vec();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            let Some(swap) = (k + 1..n).find(|&i| !m[i][k].is_zero()) else {
                return BigInt::zero();
            };
            m.swap(k, swap);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = v / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    sign * m[n - 1][n - 1].clone()
}

pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

pub fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Renders `value` rounded half away from zero to `digits` decimal places.
pub fn to_decimal(value: &BigRational, digits: usize) -> String {
    let scale = BigInt::from(10u32).pow(digits as u32);
    let scaled = value * BigRational::from_integer(scale.clone());
    let neg = scaled.is_negative();
    let abs = scaled.abs();
    let (q, r) = abs.numer().div_rem(abs.denom());
    let rounded = if r * 2u32 >= *abs.denom() { q + 1u32 } else { q };
    let (int_part, frac_part) = rounded.div_rem(&scale);
    let mut out = String::new();
    if neg && !rounded.is_zero() {
        out.push('-');
    }
    out.push_str(&int_part.to_string());
    if digits > 0 {
        let frac = frac_part.to_string();
        out.push('.');
        out.extend(std::iter::repeat('0').take(digits - frac.len()));
        out.push_str(&frac);
    }
    out
}

/// Lossy conversion for reporting and tolerance checks.
pub fn to_f64(value: &BigRational) -> f64 {
    if let Some(v) = value.to_f64() {
        if v.is_finite() {
            return v;
        }
    }
    // Scale down both parts so the quotient survives the float conversion.
    let shift = value.numer().bits().max(value.denom().bits()).saturating_sub(1000);
    let n = (value.numer() >> shift).to_f64().unwrap_or(f64::NAN);
    let d = (value.denom() >> shift).to_f64().unwrap_or(f64::NAN);
    n / d
}

/// Rigorous rational bracket `lo <= log2(x) <= hi` for `x >= 1`.
///
/// The fractional part is refined by repeated squaring on lower and upper
/// fixed-point approximations; refinement stops when the two disagree or after
/// `frac_bits` bits, so `hi - lo <= 2^-frac_bits` in the typical case.
pub fn log2_bracket(x: &BigUint, frac_bits: u32) -> (BigRational, BigRational) {
    assert!(!x.is_zero(), "log2 of zero");
    let e = x.bits() - 1;
    let int = BigRational::from_integer(BigInt::from(e));
    if x.count_ones() == 1 {
        return (int.clone(), int);
    }
    let prec = 2 * frac_bits as u64 + 64;
    let one = BigUint::one() << prec;
    let two = BigUint::one() << (prec + 1);
    // y = x / 2^e in (1, 2), scaled by 2^prec.
    let shifted = x << prec;
    let mut lo = &shifted >> e;
    let mut hi = if (&lo << e) == shifted { lo.clone() } else { &lo + 1u32 };
    let mut bits = BigUint::zero();
    let mut known = 0u32;
    for _ in 0..frac_bits {
        lo = (&lo * &lo) >> prec;
        let sq = &hi * &hi;
        hi = &sq >> prec;
        if (&hi << prec) != sq {
            hi += 1u32;
        }
        let lo_bit = lo >= two;
        let hi_bit = hi >= two;
        if lo_bit != hi_bit {
            break;
        }
        bits <<= 1;
        if lo_bit {
            bits |= BigUint::one();
            lo >>= 1;
            hi = (&hi + 1u32) >> 1;
        }
        known += 1;
        debug_assert!(lo >= one);
    }
    let denom = BigInt::one() << known;
    let frac_lo = BigRational::new(BigInt::from_biguint(Sign::Plus, bits), denom.clone());
    let width = BigRational::new(BigInt::one(), denom);
    let lo_total = &int + &frac_lo;
    let hi_total = &lo_total + width;
    (lo_total, hi_total)
}

/// An exact value together with a bound on its distance from the quantity it
/// approximates: the truth lies in `[value - halfwidth, value + halfwidth]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    pub value: BigRational,
    pub halfwidth: BigRational,
}

impl Interval {
    pub fn exact(value: BigRational) -> Self {
        Interval { value, halfwidth: BigRational::zero() }
    }

    pub fn lo(&self) -> BigRational {
        &self.value - &self.halfwidth
    }

    pub fn hi(&self) -> BigRational {
        &self.value + &self.halfwidth
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        (x - &self.value).abs() <= self.halfwidth
    }

    /// Float containment check with slack, for comparison against constants
    /// known only as decimals.
    pub fn contains_f64(&self, x: f64, slack: f64) -> bool {
        to_f64(&self.lo()) - slack <= x && x <= to_f64(&self.hi()) + slack
    }
}

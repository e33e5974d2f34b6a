use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use super::hnf::{hnf, is_canonical, to_i64_matrix};
use super::order::{FieldOrder, RingElement};
use crate::error::{Error, Result};

/// A nonzero ideal of the order, stored as its canonical HNF basis.
///
/// `basis[i][j]` is row i, column j; the columns span the ideal over Z.
/// Equality, ordering and hashing use the basis only (plus the parent
/// polynomial for equality).
#[derive(Clone)]
pub struct IdealLattice {
    order: Arc<FieldOrder>,
    basis: Vec<Vec<i64>>,
    norm: u64,
}

impl PartialEq for IdealLattice {
    fn eq(&self, other: &Self) -> bool {
        self.order.same_as(&other.order) && self.basis == other.basis
    }
}

impl Eq for IdealLattice {}

impl Hash for IdealLattice {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.basis.hash(state);
    }
}

impl PartialOrd for IdealLattice {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Ascending norm, then lexicographic on the row-major basis.
impl Ord for IdealLattice {
    fn cmp(&self, other: &Self) -> Ordering {
        self.norm.cmp(&other.norm).then_with(|| self.basis.cmp(&other.basis))
    }
}

impl fmt::Debug for IdealLattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Ideal(N={}, hnf={:?})", self.norm, self.basis)
    }
}

impl fmt::Display for IdealLattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let gens = self.two_element_description();
        write!(f, "(")?;
        for (i, g) in gens.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{g}")?;
        }
        write!(f, ")")
    }
}

fn big_vec(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

impl IdealLattice {
    fn from_hnf(order: Arc<FieldOrder>, basis_big: &[Vec<BigInt>]) -> Result<Self> {
        let basis = to_i64_matrix(basis_big)?;
        let mut norm: u64 = 1;
        for (i, row) in basis.iter().enumerate() {
            norm = norm.checked_mul(row[i] as u64).ok_or(Error::Overflow("ideal norm"))?;
        }
        debug_assert!(is_canonical(&basis));
        Ok(IdealLattice { order, basis, norm })
    }

    /// The ideal generated by `gens`: the Z-span of g·θ^j over all g and j < d.
    pub fn from_generators(order: &Arc<FieldOrder>, gens: &[RingElement]) -> Result<Self> {
        let d = order.degree();
        let mut cols = Vec::with_capacity(gens.len() * d);
        for g in gens {
            order.check(g)?;
            let gb = big_vec(g.coords());
            for j in 0..d {
                let mut e = vec![BigInt::zero(); d];
                e[j] = BigInt::one();
                cols.push(order.mul_big(&gb, &e));
            }
        }
        if cols.iter().all(|c| c.iter().all(|x| x.is_zero())) {
            return Err(Error::ZeroElement);
        }
        let out = hnf(&cols, d, false)?;
        Self::from_hnf(order.clone(), &out.basis)
    }

    /// Builds an ideal from lattice generators (columns), verifying that the
    /// lattice is closed under multiplication by θ.
    pub fn from_lattice(order: &Arc<FieldOrder>, columns: &[Vec<i64>]) -> Result<Self> {
        let d = order.degree();
        let cols: Vec<Vec<BigInt>> = columns.iter().map(|c| big_vec(c)).collect();
        if cols.iter().any(|c| c.len() != d) {
            return Err(Error::DegreeMismatch { expected: d, found: columns[0].len() });
        }
        let out = hnf(&cols, d, false)?;
        let ideal = Self::from_hnf(order.clone(), &out.basis)?;
        if d > 1 {
            let theta = order.basis_element(1);
            for c in ideal.columns() {
                let prod = order.mul(&c, &theta)?;
                if !ideal.contains(&prod)? {
                    return Err(Error::NotAnIdeal("lattice is not closed under multiplication by θ"));
                }
            }
        }
        Ok(ideal)
    }

    pub fn principal(order: &Arc<FieldOrder>, a: &RingElement) -> Result<Self> {
        order.check(a)?;
        if a.is_zero() {
            return Err(Error::ZeroElement);
        }
        Self::from_generators(order, std::slice::from_ref(a))
    }

    pub fn unit(order: &Arc<FieldOrder>) -> Self {
        let d = order.degree();
        let basis = (0..d).map(|i| (0..d).map(|j| i64::from(i == j)).collect()).collect();
        IdealLattice { order: order.clone(), basis, norm: 1 }
    }

    pub fn order(&self) -> &Arc<FieldOrder> {
        &self.order
    }

    pub fn basis(&self) -> &[Vec<i64>] {
        &self.basis
    }

    pub fn norm(&self) -> u64 {
        self.norm
    }

    pub fn degree(&self) -> usize {
        self.basis.len()
    }

    pub fn diagonal(&self) -> Vec<i64> {
        (0..self.degree()).map(|i| self.basis[i][i]).collect()
    }

    pub fn columns(&self) -> Vec<RingElement> {
        let d = self.degree();
        (0..d).map(|c| RingElement((0..d).map(|r| self.basis[r][c]).collect())).collect()
    }

    pub fn is_unit(&self) -> bool {
        self.norm == 1
    }

    /// Re-canonicalizes the stored basis (identity on canonical input).
    pub fn recanonicalize(&self) -> Result<Self> {
        let cols: Vec<Vec<BigInt>> = self.columns().iter().map(|c| big_vec(c.coords())).collect();
        let out = hnf(&cols, self.degree(), false)?;
        Self::from_hnf(self.order.clone(), &out.basis)
    }

    fn same_order(&self, other: &IdealLattice) -> Result<()> {
        if self.order.same_as(&other.order) {
            Ok(())
        } else {
            Err(Error::OrderMismatch)
        }
    }

    pub fn sum(&self, other: &IdealLattice) -> Result<Self> {
        self.same_order(other)?;
        let cols: Vec<Vec<BigInt>> =
            self.columns().iter().chain(other.columns().iter()).map(|c| big_vec(c.coords())).collect();
        let out = hnf(&cols, self.degree(), false)?;
        Self::from_hnf(self.order.clone(), &out.basis)
    }

    pub fn is_coprime(&self, other: &IdealLattice) -> Result<bool> {
        self.same_order(other)?;
        if num_integer::gcd(self.norm, other.norm) == 1 {
            // a + b contains both norms, hence 1
            return Ok(true);
        }
        Ok(self.sum(other)?.is_unit())
    }

    pub fn product(&self, other: &IdealLattice) -> Result<Self> {
        self.same_order(other)?;
        let mut cols = Vec::new();
        for a in self.columns() {
            let ab = big_vec(a.coords());
            for b in other.columns() {
                cols.push(self.order.mul_big(&ab, &big_vec(b.coords())));
            }
        }
        let out = hnf(&cols, self.degree(), false)?;
        Self::from_hnf(self.order.clone(), &out.basis)
    }

    pub fn pow(&self, k: u32) -> Result<Self> {
        let mut acc = IdealLattice::unit(&self.order);
        for _ in 0..k {
            acc = acc.product(self)?;
        }
        Ok(acc)
    }

    /// Canonical representative: coordinate i lies in `[0, basis[i][i])`.
    pub fn residue_rep(&self, a: &RingElement) -> Result<RingElement> {
        self.order.check(a)?;
        let mut v = a.coords().to_vec();
        self.reduce_in_place(&mut v);
        Ok(RingElement(v))
    }

    /// Triangular reduction on raw coordinates. Every coordinate is first
    /// taken modulo the norm, which is harmless since N·O lies in the ideal.
    pub fn reduce_in_place(&self, v: &mut [i64]) {
        let n = self.norm as i128;
        let mut w: Vec<i128> = v.iter().map(|&x| (x as i128).rem_euclid(n)).collect();
        let d = self.degree();
        for i in (0..d).rev() {
            let diag = self.basis[i][i] as i128;
            let q = w[i].div_euclid(diag);
            if q != 0 {
                for k in 0..=i {
                    w[k] -= q * self.basis[k][i] as i128;
                }
                for x in w.iter_mut().take(i) {
                    *x = x.rem_euclid(n);
                }
            }
        }
        for (dst, src) in v.iter_mut().zip(w) {
            *dst = src as i64;
        }
    }

    fn reduce_big(&self, v: &[BigInt]) -> RingElement {
        let n = BigInt::from(self.norm);
        // each coordinate lands in [0, N), and N < 2^63
        let mut small: Vec<i64> = v.iter().map(|x| x.mod_floor(&n).to_i64().unwrap()).collect();
        self.reduce_in_place(&mut small);
        RingElement(small)
    }

    pub fn contains(&self, a: &RingElement) -> Result<bool> {
        Ok(self.residue_rep(a)?.is_zero())
    }

    /// All `N(b)` canonical representatives of O/b, in lexicographic order
    /// with the last coordinate varying fastest.
    pub fn residues(&self) -> impl Iterator<Item = RingElement> + '_ {
        let diag = self.diagonal();
        let total = self.norm;
        (0..total).map(move |mut idx| {
            let mut v = vec![0i64; diag.len()];
            for i in (0..diag.len()).rev() {
                let m = diag[i] as u64;
                v[i] = (idx % m) as i64;
                idx /= m;
            }
            RingElement(v)
        })
    }

    /// Index of a canonical representative in the enumeration of `residues`.
    pub fn residue_index(&self, rep: &[i64]) -> u64 {
        let mut idx = 0u64;
        for (i, &c) in rep.iter().enumerate() {
            idx = idx * self.basis[i][i] as u64 + c as u64;
        }
        idx
    }

    /// Short generating set for display: the least positive rational integer
    /// in the ideal plus the HNF columns that are not integers.
    fn two_element_description(&self) -> Vec<RingElement> {
        let d = self.degree();
        if d == 1 {
            return vec![RingElement(vec![self.basis[0][0]])];
        }
        let mut out = Vec::new();
        let first = self.basis[0][0];
        out.push(self.order.from_int(first));
        for c in self.columns().into_iter().skip(1) {
            if c.coords().iter().skip(1).any(|&x| x != 0) {
                out.push(c);
            }
        }
        out
    }
}

/// Chinese remainder: the canonical x modulo the product of `ideals` with
/// x ≡ residues[ℓ] mod ideals[ℓ].
pub fn crt(residues: &[RingElement], ideals: &[IdealLattice]) -> Result<RingElement> {
    if residues.len() != ideals.len() || ideals.is_empty() {
        return Err(Error::InvalidArgument("crt needs equal-length nonempty lists".into()));
    }
    let order = ideals[0].order().clone();
    let d = order.degree();
    let mut modulus = ideals[0].clone();
    let mut x: Vec<BigInt> = big_vec(ideals[0].residue_rep(&residues[0])?.coords());
    for (r, b) in residues.iter().zip(ideals).skip(1) {
        modulus.same_order(b)?;
        // 1 = u + v with u ∈ modulus, v ∈ b, from the transform of HNF([M | B]).
        let mut gens: Vec<Vec<BigInt>> = modulus.columns().iter().map(|c| big_vec(c.coords())).collect();
        gens.extend(b.columns().iter().map(|c| big_vec(c.coords())));
        let out = hnf(&gens, d, true)?;
        let is_identity = out
            .basis
            .iter()
            .enumerate()
            .all(|(i, row)| row.iter().enumerate().all(|(j, x)| *x == BigInt::from(i64::from(i == j))));
        if !is_identity {
            return Err(Error::NotCoprime);
        }
        let coef = &out.transform.unwrap()[0];
        let mut u = vec![BigInt::zero(); d];
        for (g, k) in gens.iter().take(d).zip(coef) {
            for (ui, gi) in u.iter_mut().zip(g) {
                *ui += gi * k;
            }
        }
        let mut v = vec![BigInt::zero(); d];
        for (g, k) in gens.iter().skip(d).zip(coef.iter().skip(d)) {
            for (vi, gi) in v.iter_mut().zip(g) {
                *vi += gi * k;
            }
        }
        let rb = big_vec(b.residue_rep(r)?.coords());
        // x' = x·v + r·u: ≡ x mod modulus (v ≡ 1), ≡ r mod b (u ≡ 1)
        let xv = order.mul_big(&x, &v);
        let ru = order.mul_big(&rb, &u);
        let sum: Vec<BigInt> = xv.iter().zip(&ru).map(|(a, c)| a + c).collect();
        modulus = modulus.product(b)?;
        x = big_vec(modulus.reduce_big(&sum).coords());
    }
    let out: Vec<i64> = x.iter().map(|c| c.to_i64().ok_or(Error::Overflow("crt"))).collect::<Result<_>>()?;
    Ok(RingElement(out))
}

#[cfg(test)]
mod tests {
    use super::super::order::make_order;
    use super::*;

    fn gauss() -> Arc<FieldOrder> {
        make_order(&[1, 0, 1]).unwrap()
    }

    fn z() -> Arc<FieldOrder> {
        make_order(&[0, 1]).unwrap()
    }

    fn pid(o: &Arc<FieldOrder>, c: &[i64]) -> IdealLattice {
        IdealLattice::principal(o, &o.element(c).unwrap()).unwrap()
    }

    #[test]
    fn principal_ideals_in_gaussian_integers() {
        let o = gauss();
        let two = pid(&o, &[2]);
        assert_eq!(two.basis(), &[vec![2, 0], vec![0, 2]]);
        assert_eq!(two.norm(), 4);
        let one_plus_i = pid(&o, &[1, 1]);
        assert_eq!(one_plus_i.norm(), 2);
        assert_eq!(
            IdealLattice::principal(&o, &o.zero()).unwrap_err(),
            Error::ZeroElement
        );
    }

    #[test]
    fn sums_and_coprimality() {
        let zo = z();
        let s = pid(&zo, &[2]).sum(&pid(&zo, &[3])).unwrap();
        assert!(s.is_unit());
        assert!(pid(&zo, &[2]).is_coprime(&pid(&zo, &[3])).unwrap());
        let s = pid(&zo, &[4]).sum(&pid(&zo, &[6])).unwrap();
        assert_eq!(s, pid(&zo, &[2]));
        assert!(!pid(&zo, &[4]).is_coprime(&pid(&zo, &[6])).unwrap());

        let o = gauss();
        let a = pid(&o, &[1, 1]);
        let b = pid(&o, &[1, -1]);
        assert_eq!(a, b);
        assert_eq!(a.sum(&b).unwrap(), a);
        assert!(!a.is_coprime(&b).unwrap());
    }

    #[test]
    fn products() {
        let zo = z();
        assert_eq!(pid(&zo, &[2]).product(&pid(&zo, &[3])).unwrap(), pid(&zo, &[6]));
        let o = gauss();
        let a = pid(&o, &[1, 1]);
        let sq = a.product(&a).unwrap();
        assert_eq!(sq, pid(&o, &[2]));
        assert_eq!(sq.norm(), 4);
        assert_eq!(a.pow(2).unwrap(), sq);
    }

    #[test]
    fn membership() {
        let zo = z();
        assert!(pid(&zo, &[2]).contains(&zo.from_int(6)).unwrap());
        let o = gauss();
        assert!(!pid(&o, &[2]).contains(&o.element(&[1, 1]).unwrap()).unwrap());
        assert!(pid(&o, &[1, 1]).contains(&o.from_int(2)).unwrap());
    }

    #[test]
    fn residues_and_reps() {
        let zo = z();
        assert_eq!(pid(&zo, &[2]).residue_rep(&zo.from_int(5)).unwrap(), zo.from_int(1));
        assert_eq!(pid(&zo, &[2]).residue_rep(&zo.from_int(-5)).unwrap(), zo.from_int(1));
        let o = gauss();
        let two = pid(&o, &[2]);
        assert_eq!(two.residue_rep(&o.basis_element(1)).unwrap().coords(), &[0, 1]);
        let all: Vec<Vec<i64>> = two.residues().map(|r| r.0).collect();
        assert_eq!(all, vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
        for r in two.residues() {
            assert_eq!(two.residue_rep(&r).unwrap(), r);
        }
    }

    #[test]
    fn crt_examples() {
        let zo = z();
        let x = crt(&[zo.from_int(1), zo.from_int(0)], &[pid(&zo, &[2]), pid(&zo, &[3])]).unwrap();
        assert_eq!(x, zo.from_int(3));
        let x = crt(&[zo.from_int(0), zo.from_int(0)], &[pid(&zo, &[2]), pid(&zo, &[3])]).unwrap();
        assert_eq!(x, zo.from_int(0));
        assert_eq!(
            crt(&[zo.from_int(1), zo.from_int(0)], &[pid(&zo, &[4]), pid(&zo, &[6])]).unwrap_err(),
            Error::NotCoprime
        );
    }

    #[test]
    fn lattice_must_be_ideal() {
        let o = gauss();
        // 2Z ⊕ Z·θ is not closed under θ: θ·θ = -1 is missing
        assert!(matches!(
            IdealLattice::from_lattice(&o, &[vec![2, 0], vec![0, 1]]),
            Err(Error::NotAnIdeal(_))
        ));
        let two = IdealLattice::from_lattice(&o, &[vec![2, 0], vec![0, 2]]).unwrap();
        assert_eq!(two, pid(&o, &[2]));
    }
}

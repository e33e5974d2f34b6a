//! Column-style Hermite Normal Form over the integers.
//!
//! Convention: the basis is upper triangular with columns spanning the
//! lattice, a positive diagonal, and every entry to the right of a diagonal
//! entry reduced into `[0, diagonal)`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

struct Column {
    v: Vec<BigInt>,
    /// Coefficients of this column over the original generators (when tracked).
    coef: Vec<BigInt>,
}

/// Result of an HNF computation: the basis as a row-major matrix and, when
/// requested, for each basis column the integer combination of the input
/// generators producing it.
pub struct HnfOutput {
    pub basis: Vec<Vec<BigInt>>,
    pub transform: Option<Vec<Vec<BigInt>>>,
}

fn combine(a: &Column, ca: &BigInt, b: &Column, cb: &BigInt) -> Column {
    Column {
        v: a.v.iter().zip(&b.v).map(|(x, y)| ca * x + cb * y).collect(),
        coef: a.coef.iter().zip(&b.coef).map(|(x, y)| ca * x + cb * y).collect(),
    }
}

/// HNF of the lattice spanned by `generators` (each of length `dim`).
/// Fails with `NotAnIdeal` if the generators do not span a full-rank lattice.
pub fn hnf(generators: &[Vec<BigInt>], dim: usize, track: bool) -> Result<HnfOutput> {
    let ng = generators.len();
    let mut cols: Vec<Column> = generators
        .iter()
        .enumerate()
        .map(|(k, g)| {
            debug_assert_eq!(g.len(), dim);
            let coef = if track {
                (0..ng).map(|j| if j == k { BigInt::one() } else { BigInt::zero() }).collect()
            } else {
                Vec::new()
            };
            Column { v: g.clone(), coef }
        })
        .filter(|c| c.v.iter().any(|x| !x.is_zero()))
        .collect();

    let mut pivots: Vec<Option<Column>> = (0..dim).map(|_| None).collect();
    for row in (0..dim).rev() {
        let mut idx: Vec<usize> = (0..cols.len()).filter(|&i| !cols[i].v[row].is_zero()).collect();
        if idx.is_empty() {
            return Err(Error::NotAnIdeal("generators are not of full rank"));
        }
        // Pivot on the smallest entry to keep growth down.
        idx.sort_by(|&a, &b| cols[a].v[row].abs().cmp(&cols[b].v[row].abs()));
        let mut pivot = cols.swap_remove(idx[0]);
        let rest: Vec<usize> = (0..cols.len()).filter(|&i| !cols[i].v[row].is_zero()).collect();
        for i in rest {
            let a = pivot.v[row].clone();
            let b = cols[i].v[row].clone();
            let ext = a.extended_gcd(&b);
            let (g, x, y) = (ext.gcd, ext.x, ext.y);
            let new_pivot = combine(&pivot, &x, &cols[i], &y);
            let other = combine(&pivot, &(&b / &g), &cols[i], &(-(&a / &g)));
            pivot = new_pivot;
            cols[i] = other;
        }
        if pivot.v[row].is_negative() {
            pivot.v.iter_mut().for_each(|x| *x = -x.clone());
            pivot.coef.iter_mut().for_each(|x| *x = -x.clone());
        }
        cols.retain(|c| c.v.iter().any(|x| !x.is_zero()));
        pivots[row] = Some(pivot);
    }
    let mut basis_cols: Vec<Column> = pivots.into_iter().map(|c| c.unwrap()).collect();
    for j in 0..dim {
        for i in (0..j).rev() {
            let diag = basis_cols[i].v[i].clone();
            let q = basis_cols[j].v[i].div_floor(&diag);
            if q.is_zero() {
                continue;
            }
            let (left, right) = basis_cols.split_at_mut(j);
            let col_i = &left[i];
            let col_j = &mut right[0];
            for (x, y) in col_j.v.iter_mut().zip(&col_i.v) {
                *x -= &q * y;
            }
            for (x, y) in col_j.coef.iter_mut().zip(&col_i.coef) {
                *x -= &q * y;
            }
        }
    }
    let basis = (0..dim).map(|r| (0..dim).map(|c| basis_cols[c].v[r].clone()).collect()).collect();
    let transform = track.then(|| basis_cols.into_iter().map(|c| c.coef).collect());
    Ok(HnfOutput { basis, transform })
}

/// Narrows a big-integer matrix to i64, failing on overflow.
pub fn to_i64_matrix(m: &[Vec<BigInt>]) -> Result<Vec<Vec<i64>>> {
    m.iter()
        .map(|row| row.iter().map(|x| x.to_i64().ok_or(Error::Overflow("hnf entry"))).collect())
        .collect()
}

pub fn is_canonical(m: &[Vec<i64>]) -> bool {
    let d = m.len();
    for i in 0..d {
        if m[i][i] <= 0 {
            return false;
        }
        for j in 0..d {
            if j < i && m[i][j] != 0 {
                return false;
            }
            if j > i && !(0..m[i][i]).contains(&m[i][j]) {
                return false;
            }
        }
    }
    true
}

//! Fixtures shared by the benchmarks.

use std::sync::Arc;

use bfree::{build_bfamily, make_order, BFamily, FamilySpec, FieldOrder, OrderOptions};

pub fn integers() -> Arc<FieldOrder> {
    make_order(&[0, 1]).expect("Z")
}

pub fn gaussian_integers() -> Arc<FieldOrder> {
    let opts = OrderOptions { assume_maximal: true, ..Default::default() };
    Arc::new(FieldOrder::with_options(&[1, 0, 1], opts).expect("Z[i]"))
}

/// All P^2 with N(P^2) ≤ bound.
pub fn squares(order: &Arc<FieldOrder>, bound: u64) -> BFamily {
    build_bfamily(order, FamilySpec::PrimePower { k: 2, norm_bound: bound }).expect("prime-square family")
}

pub fn explicit(order: &Arc<FieldOrder>, n: &[i64]) -> BFamily {
    let gens = n.iter().map(|&k| vec![order.from_int(k)]).collect();
    build_bfamily(order, FamilySpec::Explicit(gens)).expect("explicit family")
}

//! Integer lattices and finitely generated abelian groups.

mod group;
mod mat;

pub use group::{
    narrow_test, reduce_mod_p, FgEndo, FgGroup, GroupDescriptor, LatticeSub, NarrowVerdict, QuotientMap,
};
pub use mat::{hnf, hnf_rows, snf, IntMat};

use num_bigint::BigInt;

/// `[G : N]`; `None` stands for an infinite index.
pub fn subgroup_index(n: &LatticeSub) -> Option<BigInt> {
    n.index()
}

pub fn preimage(phi: &FgEndo, n: &LatticeSub) -> crate::error::Result<LatticeSub> {
    phi.preimage(n)
}

pub fn intersect(n: &LatticeSub, m: &LatticeSub) -> crate::error::Result<LatticeSub> {
    n.intersect(m)
}

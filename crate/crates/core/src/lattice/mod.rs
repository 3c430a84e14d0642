//! Lattice points relative to a finite set `A` of generators in Z^n.
//!
//! Everything in the crate is phrased in terms of the representations
//! `u in N^N` of a lattice point `beta` as `sum u_i a_i`: their minimal total
//! weight, the minimal representations, and whether those stay inside the box
//! `{0, ..., p-1}^N` (good) or whether every representation does (very good).
//!
//! Membership in the semigroup `NA` is only semi-decidable without extra
//! structure, so every search takes a weight cap. When `A` admits a strictly
//! positive linear form the cap needed for an exact answer is computed and the
//! search is a decision procedure; otherwise a negative answer carries an
//! explicit "up to cap" status.

mod aset;
mod goodness;
mod kernel;
mod search;

pub use aset::ASet;
pub use goodness::{
    candidate_points, classify_goodness, sigma_tau, Goodness, GoodnessCatalog, Verdict,
};
pub use kernel::{nonconfluence_form, relation_kernel_basis, RelationLattice};
pub use search::{
    enumerate_box, semigroup_member, weight_and_minimals, Membership, SearchStatus, WeightReport,
};

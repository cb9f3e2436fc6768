//! Subgroup zeta functions of the split metacyclic p-groups
//! `G(p,m,n,k) = <a, b | a^(p^m) = b^(p^n) = 1, b a b^-1 = a^k>`.
//!
//! The crate has two independent routes to the subgroup counts `a_{p^t}`:
//! closed formulas built on the kernel sizes of norm maps ([`zeta`]), and a
//! brute-force engine that builds the group and enumerates every subgroup
//! ([`oracle`]). [`lattice`] extracts subgroup lattices and decides lattice
//! isomorphism, and [`classify`] ties everything into reports and sweeps.

pub mod classify;
pub mod config;
pub mod error;
pub mod group;
pub mod lattice;
pub mod oracle;
pub mod padic;
pub mod zeta;

pub use classify::{classify, compare, sweep_verify, ClassificationReport, ClassifyOptions, Comparison, SweepSpec, SweepSummary};
pub use config::Limits;
pub use error::{Error, Result};
pub use group::{is_isomorphic, is_valid, iso_classes, valid_k_set, Base, GroupParams, KPartition, PartitionKind};
pub use lattice::{build_lattice, is_lattice_isomorphic, lattice_classes, SubgroupLattice};
pub use oracle::{build_group, enumerate_subgroups, subgroup_counts, ConcreteGroup, SubgroupSet};
pub use padic::Valuation;
pub use zeta::{coefficients, zeta_equal_by_theorem, ZetaCoefficients};

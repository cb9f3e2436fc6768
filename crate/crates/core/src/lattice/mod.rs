//! Subgroup lattices and lattice isomorphism.

mod iso;

use std::fmt::Write as _;

use serde::Serialize;

use crate::config::Limits;
use crate::error::Result;
use crate::group::{iso_classes, Base, KPartition, PartitionKind};
use crate::oracle::{build_group, enumerate_subgroups, SubgroupSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LatticeNode {
    /// Index into the [`SubgroupSet`] the lattice was built from.
    pub id: usize,
    pub order: u64,
    /// Length of the longest chain from the trivial subgroup; equals `log_p |T|` for p-groups.
    pub level: u32,
}

/// The subgroup lattice as a poset: nodes plus cover pairs `(lower, upper)`.
#[derive(Debug, Clone)]
pub struct SubgroupLattice {
    pub nodes: Vec<LatticeNode>,
    pub covers: Vec<(usize, usize)>,
    up: Vec<Vec<usize>>,
    down: Vec<Vec<usize>>,
    heights: Vec<u32>,
}

impl SubgroupLattice {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn bottom(&self) -> usize {
        0
    }

    pub fn top(&self) -> usize {
        self.nodes.len() - 1
    }

    /// Nodes covering `v`.
    pub fn upper_covers(&self, v: usize) -> &[usize] {
        &self.up[v]
    }

    /// Nodes covered by `v`.
    pub fn lower_covers(&self, v: usize) -> &[usize] {
        &self.down[v]
    }

    /// Number of nodes on each level.
    pub fn level_sizes(&self) -> Vec<usize> {
        let top = self.nodes.iter().map(|n| n.level).max().unwrap_or(0);
        let mut sizes = vec![0; top as usize + 1];
        for n in &self.nodes {
            sizes[n.level as usize] += 1;
        }
        sizes
    }

    fn graph(&self) -> iso::CoverGraph<'_> {
        iso::CoverGraph {
            up: &self.up,
            down: &self.down,
            height: &self.heights,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "nodes": self.nodes,
            "covers": self.covers,
        })
    }

    pub fn to_dot(&self, name: &str) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "digraph \"{name}\" {{");
        let _ = writeln!(out, "  rankdir=BT;");
        for n in &self.nodes {
            let _ = writeln!(out, "  n{} [label=\"{}\"];", n.id, n.order);
        }
        for (lo, hi) in &self.covers {
            let _ = writeln!(out, "  n{lo} -> n{hi};");
        }
        out.push_str("}\n");
        out
    }
}

/// Builds the lattice from a complete subgroup list (sorted by order, as the oracle returns it).
///
/// `H` is covered by `K` when it is maximal among the proper subgroups of `K`.
pub fn build_lattice(set: &SubgroupSet) -> SubgroupLattice {
    let subs = &set.subgroups;
    let n = subs.len();
    let mut up = vec![Vec::new(); n];
    let mut down = vec![Vec::new(); n];
    let mut covers = Vec::new();
    for top in 0..n {
        let mut maximal: Vec<usize> = Vec::new();
        // Larger candidates first: anything below an accepted maximal subgroup is not a cover.
        for cand in (0..n).rev() {
            let (h, k) = (&subs[cand], &subs[top]);
            if h.order >= k.order || k.order % h.order != 0 || !h.elements.is_subset(&k.elements) {
                continue;
            }
            if maximal.iter().any(|&mx| h.elements.is_subset(&subs[mx].elements)) {
                continue;
            }
            maximal.push(cand);
        }
        maximal.sort_unstable();
        for lo in maximal {
            covers.push((lo, top));
            up[lo].push(top);
            down[top].push(lo);
        }
    }
    covers.sort_unstable();
    for adj in up.iter_mut() {
        adj.sort_unstable();
    }
    // subgroups are sorted by order, so every lower cover precedes its upper node
    let mut heights = vec![0u32; n];
    for v in 0..n {
        heights[v] = down[v].iter().map(|&l| heights[l] + 1).max().unwrap_or(0);
    }
    let nodes = subs
        .iter()
        .enumerate()
        .map(|(id, s)| LatticeNode {
            id,
            order: s.order as u64,
            level: heights[id],
        })
        .collect();
    SubgroupLattice {
        nodes,
        covers,
        up,
        down,
        heights,
    }
}

/// An order isomorphism `l1 -> l2` as `map[node of l1] = node of l2`.
pub fn lattice_isomorphism(l1: &SubgroupLattice, l2: &SubgroupLattice) -> Option<Vec<usize>> {
    iso::find_isomorphism(&l1.graph(), &l2.graph())
}

/// Exact lattice-isomorphism test on the order relation alone (group data ignored).
pub fn is_lattice_isomorphic(l1: &SubgroupLattice, l2: &SubgroupLattice) -> bool {
    lattice_isomorphism(l1, l2).is_some()
}

/// Builds the subgroup lattice of `G(p,m,n,k)` for each `k` in `ks`.
pub fn lattices_for(base: Base, ks: &[u64], limits: &Limits) -> Result<Vec<SubgroupLattice>> {
    use rayon::prelude::*;
    ks.par_iter()
        .map(|&k| {
            let g = build_group(&base.params(k as i64), limits)?;
            Ok(build_lattice(&enumerate_subgroups(&g, limits)?))
        })
        .collect()
}

/// Partition of the valid `k` by lattice isomorphism. One representative per
/// isomorphism class is tested; isomorphic groups share their class.
pub fn lattice_classes(p: u64, m: u32, n: u32, limits: &Limits) -> Result<KPartition> {
    let iso = iso_classes(p, m, n, limits)?;
    let reps = iso.representatives();
    let lattices = lattices_for(iso.base, &reps, limits)?;
    let by_rep = KPartition::from_equivalence(iso.base, PartitionKind::Lattice, &reps, |a, b| {
        let ia = reps.binary_search(&a).expect("representative");
        let ib = reps.binary_search(&b).expect("representative");
        Ok(is_lattice_isomorphic(&lattices[ia], &lattices[ib]))
    })?;
    let blocks = by_rep
        .blocks
        .iter()
        .map(|block| {
            block
                .iter()
                .flat_map(|&r| iso.block_of(r).expect("representative").iter().copied())
                .collect()
        })
        .collect();
    Ok(KPartition::new(iso.base, PartitionKind::Lattice, blocks))
}

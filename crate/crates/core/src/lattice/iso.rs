//! Isomorphism of finite posets given by their cover digraphs.
//!
//! Colour refinement runs on the disjoint union of both graphs so that colour
//! ids are comparable across sides. Whenever refinement stalls with a
//! non-singleton class, one vertex on the left is individualized against each
//! same-coloured candidate on the right and the search recurses. A discrete
//! colouring is only accepted after every cover is checked.

use std::collections::{BTreeMap, HashSet};

/// Cover digraph: `up[v]` are the nodes covering `v`, `down[v]` those covered by `v`.
#[derive(Debug, Clone)]
pub(crate) struct CoverGraph<'a> {
    pub up: &'a [Vec<usize>],
    pub down: &'a [Vec<usize>],
    pub height: &'a [u32],
}

impl CoverGraph<'_> {
    fn len(&self) -> usize {
        self.up.len()
    }

    fn edge_count(&self) -> usize {
        self.up.iter().map(Vec::len).sum()
    }
}

struct Union {
    left: usize,
    up: Vec<Vec<usize>>,
    down: Vec<Vec<usize>>,
}

impl Union {
    fn new(a: &CoverGraph<'_>, b: &CoverGraph<'_>) -> Union {
        let left = a.len();
        let shift = |adj: &[Vec<usize>]| -> Vec<Vec<usize>> {
            adj.iter().map(|ns| ns.iter().map(|&v| v + left).collect()).collect()
        };
        let mut up = a.up.to_vec();
        up.extend(shift(b.up));
        let mut down = a.down.to_vec();
        down.extend(shift(b.down));
        Union { left, up, down }
    }

    fn len(&self) -> usize {
        self.up.len()
    }

    /// Refines `colors` to the coarsest equitable partition below it.
    fn refine(&self, colors: &mut [u32]) {
        let mut classes = count_classes(colors);
        loop {
            let signatures: Vec<(u32, Vec<u32>, Vec<u32>)> = (0..self.len())
                .map(|v| {
                    let mut ups: Vec<u32> = self.up[v].iter().map(|&x| colors[x]).collect();
                    let mut downs: Vec<u32> = self.down[v].iter().map(|&x| colors[x]).collect();
                    ups.sort_unstable();
                    downs.sort_unstable();
                    (colors[v], ups, downs)
                })
                .collect();
            let ids: BTreeMap<&(u32, Vec<u32>, Vec<u32>), u32> = {
                let mut uniq: Vec<&(u32, Vec<u32>, Vec<u32>)> = signatures.iter().collect();
                uniq.sort();
                uniq.dedup();
                uniq.into_iter().enumerate().map(|(i, s)| (s, i as u32)).collect()
            };
            for (v, sig) in signatures.iter().enumerate() {
                colors[v] = ids[sig];
            }
            let now = ids.len();
            if now == classes {
                return;
            }
            classes = now;
        }
    }

    /// Every colour occurs equally often on both sides.
    fn balanced(&self, colors: &[u32]) -> bool {
        let mut count: BTreeMap<u32, i64> = BTreeMap::new();
        for (v, &c) in colors.iter().enumerate() {
            *count.entry(c).or_default() += if v < self.left { 1 } else { -1 };
        }
        count.values().all(|&c| c == 0)
    }
}

fn count_classes(colors: &[u32]) -> usize {
    colors.iter().collect::<HashSet<_>>().len()
}

/// An order isomorphism `a -> b` as `map[node_of_a] = node_of_b`, if one exists.
pub(crate) fn find_isomorphism(a: &CoverGraph<'_>, b: &CoverGraph<'_>) -> Option<Vec<usize>> {
    if a.len() != b.len() || a.edge_count() != b.edge_count() {
        return None;
    }
    let union = Union::new(a, b);
    let initial: Vec<(u32, usize, usize)> = (0..union.len())
        .map(|v| {
            let h = if v < union.left { a.height[v] } else { b.height[v - union.left] };
            (h, union.up[v].len(), union.down[v].len())
        })
        .collect();
    let mut keys = initial.clone();
    keys.sort_unstable();
    keys.dedup();
    let colors: Vec<u32> = initial
        .iter()
        .map(|k| keys.binary_search(k).expect("present") as u32)
        .collect();
    let edges_b: HashSet<(usize, usize)> = (0..b.len())
        .flat_map(|v| b.up[v].iter().map(move |&w| (v, w)))
        .collect();
    search(&union, a, &edges_b, colors)
}

fn search(union: &Union, a: &CoverGraph<'_>, edges_b: &HashSet<(usize, usize)>, mut colors: Vec<u32>) -> Option<Vec<usize>> {
    union.refine(&mut colors);
    if !union.balanced(&colors) {
        return None;
    }
    let left = union.left;
    let mut members: BTreeMap<u32, (Vec<usize>, Vec<usize>)> = BTreeMap::new();
    for (v, &c) in colors.iter().enumerate() {
        let entry = members.entry(c).or_default();
        if v < left {
            entry.0.push(v);
        } else {
            entry.1.push(v - left);
        }
    }
    // Branch on the smallest non-singleton class.
    let target = members
        .iter()
        .filter(|(_, (l, _))| l.len() > 1)
        .min_by_key(|(&c, (l, _))| (l.len(), c));
    match target {
        None => {
            let mut map = vec![0; left];
            for (l, r) in members.values() {
                map[l[0]] = r[0];
            }
            let preserves = (0..left).all(|v| a.up[v].iter().all(|&w| edges_b.contains(&(map[v], map[w]))));
            preserves.then_some(map)
        }
        Some((_, (l, r))) => {
            let v = l[0];
            let fresh = colors.iter().max().copied().unwrap_or(0) + 1;
            for &w in r {
                let mut next = colors.clone();
                next[v] = fresh;
                next[w + left] = fresh;
                if let Some(map) = search(union, a, edges_b, next) {
                    return Some(map);
                }
            }
            None
        }
    }
}

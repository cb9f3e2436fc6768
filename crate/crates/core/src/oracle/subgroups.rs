use std::collections::{BTreeMap, HashMap};

use num_bigint::BigUint;
use num_traits::Zero;
use serde::Serialize;

use super::{build_group, ConcreteGroup, Element, GroupDescriptor};
use crate::config::Limits;
use crate::error::{Error, Result};
use crate::group::GroupParams;
use crate::zeta::DirichletSeries;

/// Fixed-size bitset over element ids.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ElementSet {
    words: Vec<u64>,
}

impl ElementSet {
    pub fn empty(universe: usize) -> ElementSet {
        ElementSet {
            words: vec![0; universe.div_ceil(64)],
        }
    }

    /// Returns true if `g` was not already present.
    pub fn insert(&mut self, g: Element) -> bool {
        let (w, b) = ((g / 64) as usize, g % 64);
        let fresh = self.words[w] & (1 << b) == 0;
        self.words[w] |= 1 << b;
        fresh
    }

    pub fn contains(&self, g: Element) -> bool {
        self.words[(g / 64) as usize] & (1 << (g % 64)) != 0
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn is_subset(&self, other: &ElementSet) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    pub fn intersection_len(&self, other: &ElementSet) -> usize {
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = Element> + '_ {
        self.words.iter().enumerate().flat_map(|(w, &bits)| {
            (0..64u32)
                .filter(move |b| bits & (1 << b) != 0)
                .map(move |b| w as u32 * 64 + b)
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subgroup {
    pub elements: ElementSet,
    pub order: usize,
    /// A generating set (not necessarily minimal).
    pub generators: Vec<Element>,
}

impl Subgroup {
    /// Sorted element ids; the canonical identity of the subgroup.
    pub fn element_ids(&self) -> Vec<Element> {
        self.elements.iter().collect()
    }

    pub fn contains(&self, g: Element) -> bool {
        self.elements.contains(g)
    }
}

/// Every subgroup of a group, sorted by `(order, element ids)`.
#[derive(Debug, Clone)]
pub struct SubgroupSet {
    pub group_order: usize,
    pub prime: Option<u64>,
    pub subgroups: Vec<Subgroup>,
}

impl SubgroupSet {
    pub fn len(&self) -> usize {
        self.subgroups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subgroups.is_empty()
    }

    /// `counts[t]` = number of subgroups of order `p^t`; needs a p-group.
    pub fn counts_by_log(&self) -> Result<Vec<BigUint>> {
        let p = self
            .prime
            .ok_or_else(|| Error::InvalidArgument("counts by log_p need a p-group".into()))?;
        let top = log_exact(self.group_order as u64, p).expect("p-group order is a power of p");
        let mut counts = vec![BigUint::zero(); top as usize + 1];
        for s in &self.subgroups {
            counts[log_exact(s.order as u64, p).expect("Lagrange") as usize] += 1u32;
        }
        Ok(counts)
    }

    /// Subgroup counts keyed by order, for any finite group.
    pub fn counts_by_order(&self) -> DirichletSeries {
        let mut out = DirichletSeries::new();
        for s in &self.subgroups {
            *out.entry(BigUint::from(s.order)).or_insert_with(BigUint::zero) += 1u32;
        }
        out
    }

    /// Index of the subgroup with exactly these elements.
    pub fn find(&self, elements: &ElementSet) -> Option<usize> {
        self.subgroups.iter().position(|s| &s.elements == elements)
    }
}

pub(crate) fn log_exact(mut x: u64, p: u64) -> Option<u32> {
    let mut t = 0;
    while x > 1 {
        if !x.is_multiple_of(p) {
            return None;
        }
        x /= p;
        t += 1;
    }
    (x == 1).then_some(t)
}

fn cyclic_subgroup(g: &ConcreteGroup, x: Element) -> Subgroup {
    let mut elements = ElementSet::empty(g.order());
    let mut y = 0;
    loop {
        elements.insert(y);
        y = g.mul(y, x);
        if y == 0 {
            break;
        }
    }
    let order = elements.len();
    Subgroup {
        elements,
        order,
        generators: vec![x],
    }
}

/// `<base, x>`: close `base`'s elements under right multiplication by all generators.
fn join(g: &ConcreteGroup, base: &Subgroup, x: Element) -> Subgroup {
    let mut elements = base.elements.clone();
    let mut queue: Vec<Element> = base.elements.iter().collect();
    let mut generators = base.generators.clone();
    generators.push(x);
    let mut next = 0;
    while next < queue.len() {
        let e = queue[next];
        next += 1;
        for &s in &generators {
            let prod = g.mul(e, s);
            if elements.insert(prod) {
                queue.push(prod);
            }
        }
    }
    Subgroup {
        order: queue.len(),
        elements,
        generators,
    }
}

/// All subgroups, by fixpoint join-closure: start from the cyclic subgroups and
/// keep adding `<A, x>` for known `A` and cyclic generators `x` until nothing new
/// appears. Makes no structural assumption about the group.
pub fn enumerate_subgroups(g: &ConcreteGroup, limits: &Limits) -> Result<SubgroupSet> {
    let mut index: HashMap<ElementSet, usize> = HashMap::new();
    let mut subgroups: Vec<Subgroup> = Vec::new();
    let mut cyclic_generators: Vec<Element> = Vec::new();

    let over_cap = || {
        Error::ResourceLimit(format!(
            "more than {} subgroups in {}",
            limits.max_subgroups,
            g.descriptor()
        ))
    };

    for x in g.elements() {
        let c = cyclic_subgroup(g, x);
        if !index.contains_key(&c.elements) {
            index.insert(c.elements.clone(), subgroups.len());
            cyclic_generators.push(x);
            subgroups.push(c);
            if subgroups.len() > limits.max_subgroups {
                return Err(over_cap());
            }
        }
    }

    let mut next = 0;
    while next < subgroups.len() {
        let current = subgroups[next].clone();
        next += 1;
        for &x in &cyclic_generators {
            if current.contains(x) {
                continue;
            }
            let joined = join(g, &current, x);
            if !index.contains_key(&joined.elements) {
                index.insert(joined.elements.clone(), subgroups.len());
                subgroups.push(joined);
                if subgroups.len() > limits.max_subgroups {
                    return Err(over_cap());
                }
            }
        }
    }

    let mut keyed: Vec<(usize, Vec<Element>, Subgroup)> = subgroups
        .into_iter()
        .map(|s| (s.order, s.element_ids(), s))
        .collect();
    keyed.sort_by(|a, b| (a.0, &a.1).cmp(&(b.0, &b.1)));
    Ok(SubgroupSet {
        group_order: g.order(),
        prime: g.prime(),
        subgroups: keyed.into_iter().map(|(_, _, s)| s).collect(),
    })
}

/// Subgroup counts by `t = log_p |T|` for a p-group.
pub fn subgroup_counts(g: &ConcreteGroup, limits: &Limits) -> Result<Vec<BigUint>> {
    enumerate_subgroups(g, limits)?.counts_by_log()
}

/// Census of subgroups `T` of `G(p,m,n,k)` by `(i, j)` where
/// `|T ∩ <a>| = p^i` and `|π(T)| = p^j`.
pub fn cocycle_census_of(g: &ConcreteGroup, set: &SubgroupSet) -> Result<BTreeMap<(u32, u32), u64>> {
    let p = match g.descriptor() {
        GroupDescriptor::Split { p, .. } => *p,
        other => return Err(Error::InvalidArgument(format!("census needs a split metacyclic group, got {other}"))),
    };
    let mut census = BTreeMap::new();
    for s in &set.subgroups {
        let meet = s.elements.iter().filter(|&e| g.in_cyclic_normal_factor(e)).count();
        let image = s.order / meet;
        let i = log_exact(meet as u64, p).expect("subgroup of a p-group");
        let j = log_exact(image as u64, p).expect("subgroup of a p-group");
        *census.entry((i, j)).or_insert(0) += 1;
    }
    Ok(census)
}

pub fn cocycle_subgroup_census(params: &GroupParams, limits: &Limits) -> Result<BTreeMap<(u32, u32), u64>> {
    let g = build_group(params, limits)?;
    let set = enumerate_subgroups(&g, limits)?;
    cocycle_census_of(&g, &set)
}

#[derive(Serialize)]
struct GroupExport<'a> {
    group: &'a GroupDescriptor,
    order: usize,
    elements: Vec<Vec<u64>>,
    multiplication_table: Vec<Vec<Element>>,
    subgroups: Vec<Vec<Element>>,
}

/// Multiplication table and subgroup list as JSON, for checking against an
/// external computer-algebra system. Element `i` has coordinates `elements[i]`.
pub fn export_json(g: &ConcreteGroup, set: &SubgroupSet) -> serde_json::Value {
    let export = GroupExport {
        group: g.descriptor(),
        order: g.order(),
        elements: g.elements().map(|e| g.coordinates(e)).collect(),
        multiplication_table: g
            .elements()
            .map(|a| g.elements().map(|b| g.mul(a, b)).collect())
            .collect(),
        subgroups: set.subgroups.iter().map(Subgroup::element_ids).collect(),
    };
    serde_json::to_value(export).expect("export is plain data")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::direct_product;
    use crate::zeta::MaxClassFamily;

    fn limits() -> Limits {
        Limits::default()
    }

    fn group(p: u64, m: u32, n: u32, k: i64) -> ConcreteGroup {
        build_group(&GroupParams::new(p, m, n, k).unwrap(), &limits()).unwrap()
    }

    fn counts(g: &ConcreteGroup) -> Vec<u64> {
        subgroup_counts(g, &limits())
            .unwrap()
            .iter()
            .map(|c| u64::try_from(c).unwrap())
            .collect()
    }

    fn assert_closed(g: &ConcreteGroup, set: &SubgroupSet) {
        for s in &set.subgroups {
            assert!(s.contains(0));
            for a in s.elements.iter() {
                assert!(s.contains(g.inverse(a)));
                for b in s.elements.iter() {
                    assert!(s.contains(g.mul(a, b)));
                }
            }
        }
    }

    #[test]
    fn dihedral_eight() {
        let g = group(2, 2, 1, 3);
        let set = enumerate_subgroups(&g, &limits()).unwrap();
        assert_eq!(set.len(), 10);
        assert_eq!(counts(&g), vec![1, 5, 3, 1]);
        assert_closed(&g, &set);
        assert_eq!(set.subgroups[0].order, 1);
        assert_eq!(set.subgroups.last().unwrap().order, 8);
    }

    #[test]
    fn klein_four() {
        let g = group(2, 1, 1, 1);
        assert_eq!(enumerate_subgroups(&g, &limits()).unwrap().len(), 5);
        assert_eq!(counts(&g), vec![1, 3, 1]);
    }

    #[test]
    fn quaternion_eight() {
        let q8 = ConcreteGroup::maximal_class(MaxClassFamily::Q, 3, &limits()).unwrap();
        assert_eq!(counts(&q8), vec![1, 1, 3, 1]);
    }

    #[test]
    fn odd_examples() {
        assert_eq!(counts(&group(3, 2, 1, 4)), vec![1, 4, 4, 1]);
        assert_eq!(counts(&group(3, 1, 1, 1)), vec![1, 4, 1]);
        assert_eq!(counts(&group(5, 2, 1, 6)), vec![1, 6, 6, 1]);
    }

    #[test]
    fn census_of_d8() {
        let census = cocycle_subgroup_census(&GroupParams::new(2, 2, 1, 3).unwrap(), &limits()).unwrap();
        assert_eq!(census[&(0, 1)], 4);
        for i in 0..=2 {
            assert_eq!(census[&(i, 0)], 1);
        }
        let total: u64 = census.values().sum();
        assert_eq!(total, 10);
    }

    #[test]
    fn product_with_z3() {
        let g = direct_product(&group(2, 2, 1, 3), 3, &limits()).unwrap();
        let set = enumerate_subgroups(&g, &limits()).unwrap();
        let by_order = set.counts_by_order();
        assert_eq!(by_order[&BigUint::from(6u32)], BigUint::from(5u32));
        assert_eq!(by_order[&BigUint::from(24u32)], BigUint::from(1u32));
        assert!(set.counts_by_log().is_err());
        assert_closed(&g, &set);
    }

    #[test]
    fn subgroup_cap() {
        let tight = Limits {
            max_subgroups: 4,
            ..limits()
        };
        let g = group(2, 2, 1, 3);
        assert!(matches!(enumerate_subgroups(&g, &tight), Err(Error::ResourceLimit(_))));
    }

    #[test]
    fn export_shape() {
        let g = group(2, 1, 1, 1);
        let set = enumerate_subgroups(&g, &limits()).unwrap();
        let v = export_json(&g, &set);
        assert_eq!(v["order"], 4);
        assert_eq!(v["multiplication_table"].as_array().unwrap().len(), 4);
        assert_eq!(v["subgroups"].as_array().unwrap().len(), 5);
        assert_eq!(v["group"]["kind"], "split");
    }

    #[test]
    fn element_set_ops() {
        let mut a = ElementSet::empty(130);
        assert!(a.insert(129));
        assert!(!a.insert(129));
        a.insert(3);
        let mut b = a.clone();
        b.insert(64);
        assert!(a.is_subset(&b));
        assert!(!b.is_subset(&a));
        assert_eq!(b.iter().collect::<Vec<_>>(), vec![3, 64, 129]);
        assert_eq!(a.intersection_len(&b), 2);
    }
}

//! Parameters of `G(p,m,n,k)`: validity, canonical form and the isomorphism
//! criterion `k2 = k1^v (mod p^m)` for a unit `v` modulo `p^n`.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::config::Limits;
use crate::error::{invalid, Error, Result};
use crate::padic::{check_prime, mod_pow_u64, mult_order_u64};

/// Largest modulus accepted for `p^m` and `p^n`; keeps residue products inside `u128`.
const MAX_MODULUS: u64 = 1 << 62;

/// The `(p, m, n)` triple shared by every group in a family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Base {
    pub p: u64,
    pub m: u32,
    pub n: u32,
}

impl Base {
    pub fn new(p: u64, m: u32, n: u32) -> Result<Base> {
        check_prime(p)?;
        if m == 0 || n == 0 {
            return invalid("m and n must be at least 1");
        }
        for e in [m, n] {
            match p.checked_pow(e) {
                Some(v) if v <= MAX_MODULUS => {}
                _ => return invalid(format!("{p}^{e} exceeds the 62-bit modulus bound")),
            }
        }
        Ok(Base { p, m, n })
    }

    /// `|H| = p^m`.
    pub fn h_order(&self) -> u64 {
        self.p.pow(self.m)
    }

    /// `|K| = p^n`.
    pub fn k_order(&self) -> u64 {
        self.p.pow(self.n)
    }

    /// `p^(m+n)`, or `None` when it overflows.
    pub fn group_order(&self) -> Option<u64> {
        self.p.checked_pow(self.m + self.n)
    }

    pub fn params(&self, k: i64) -> GroupParams {
        let h = self.h_order() as i128;
        GroupParams {
            base: *self,
            k: (k as i128).rem_euclid(h) as u64,
        }
    }
}

impl fmt::Display for Base {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.p, self.m, self.n)
    }
}

/// `(p, m, n, k)` with `k` stored as its residue in `[0, p^m)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupParams {
    base: Base,
    k: u64,
}

impl GroupParams {
    /// Negative or oversized `k` is reduced modulo `p^m`. Validity is not checked here.
    pub fn new(p: u64, m: u32, n: u32, k: i64) -> Result<GroupParams> {
        Ok(Base::new(p, m, n)?.params(k))
    }

    pub fn base(&self) -> Base {
        self.base
    }

    pub fn p(&self) -> u64 {
        self.base.p
    }

    pub fn m(&self) -> u32 {
        self.base.m
    }

    pub fn n(&self) -> u32 {
        self.base.n
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    pub fn with_k(&self, k: i64) -> GroupParams {
        self.base.params(k)
    }

    pub(crate) fn require_valid(&self) -> Result<()> {
        if is_valid(self) {
            Ok(())
        } else {
            invalid(format!("{self} is not valid: k^(p^n) != 1 mod p^m"))
        }
    }
}

impl fmt::Display for GroupParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "G({},{},{},{})", self.base.p, self.base.m, self.base.n, self.k)
    }
}

/// `k^(p^n) = 1 (mod p^m)`.
pub fn is_valid(params: &GroupParams) -> bool {
    let base = params.base;
    let h = base.h_order();
    // Raising to p^n is n successive p-th powers.
    let mut x = params.k % h;
    for _ in 0..base.n {
        x = mod_pow_u64(x, base.p, h);
        if x == 1 {
            return true;
        }
    }
    x == 1
}

/// Every `k` in `[0, p^m)` giving a valid presentation, ascending.
pub fn valid_k_set(p: u64, m: u32, n: u32, limits: &Limits) -> Result<Vec<u64>> {
    let base = Base::new(p, m, n)?;
    let h = base.h_order();
    if h > limits.max_residues {
        return Err(Error::ResourceLimit(format!(
            "p^m = {h} residues exceeds the enumeration bound {}",
            limits.max_residues
        )));
    }
    Ok((0..h)
        .filter(|&k| k % p != 0)
        .filter(|&k| is_valid(&GroupParams { base, k }))
        .collect())
}

fn require_same_base(a: &GroupParams, b: &GroupParams) -> Result<()> {
    if a.base != b.base {
        return invalid(format!("parameters {a} and {b} have different (p,m,n)"));
    }
    Ok(())
}

/// Exponents `v` to try: units modulo `ord(k)`. Since `ord(k)` divides `p^n`,
/// these are exactly the reductions of the units modulo `p^n`.
fn orbit_exponents(p: u64, order: u64) -> impl Iterator<Item = u64> {
    (1..=order).filter(move |v| v % p != 0 || order == 1)
}

fn orbit(params: &GroupParams) -> Result<BTreeSet<u64>> {
    let h = params.base.h_order();
    let order = mult_order_u64(params.k, h)?;
    Ok(orbit_exponents(params.p(), order)
        .map(|v| mod_pow_u64(params.k, v, h))
        .collect())
}

/// Whether `G(p,m,n,k1)` and `G(p,m,n,k2)` are isomorphic.
pub fn is_isomorphic(a: &GroupParams, b: &GroupParams) -> Result<bool> {
    require_same_base(a, b)?;
    a.require_valid()?;
    b.require_valid()?;
    let h = a.base.h_order();
    let order = mult_order_u64(a.k, h)?;
    Ok(orbit_exponents(a.p(), order).any(|v| mod_pow_u64(a.k, v, h) == b.k))
}

/// Second route to the isomorphism test: `<k1>` and `<k2>` coincide as
/// subgroups of the unit group modulo `p^m`.
pub fn same_cyclic_unit_subgroup(a: &GroupParams, b: &GroupParams) -> Result<bool> {
    require_same_base(a, b)?;
    a.require_valid()?;
    b.require_valid()?;
    let h = a.base.h_order();
    let powers = |k: u64| -> Result<BTreeSet<u64>> {
        let order = mult_order_u64(k, h)?;
        Ok((0..order).map(|e| mod_pow_u64(k, e, h)).collect())
    };
    Ok(powers(a.k)? == powers(b.k)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PartitionKind {
    Isomorphism,
    Zeta,
    Lattice,
}

impl fmt::Display for PartitionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PartitionKind::Isomorphism => "isomorphism",
            PartitionKind::Zeta => "zeta",
            PartitionKind::Lattice => "lattice",
        })
    }
}

/// A partition of the valid `k` for one `(p, m, n)`.
///
/// Blocks are sorted internally and ordered by their minimum, which serves as
/// the block's canonical representative.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KPartition {
    #[serde(flatten)]
    pub base: Base,
    pub kind: PartitionKind,
    pub blocks: Vec<Vec<u64>>,
}

impl KPartition {
    pub fn new(base: Base, kind: PartitionKind, mut blocks: Vec<Vec<u64>>) -> KPartition {
        for block in &mut blocks {
            block.sort_unstable();
        }
        blocks.retain(|b| !b.is_empty());
        blocks.sort_by_key(|b| b[0]);
        KPartition { base, kind, blocks }
    }

    /// Groups `items` by an equivalence relation, comparing each item against
    /// the first member of every existing block.
    pub fn from_equivalence<F>(base: Base, kind: PartitionKind, items: &[u64], mut equivalent: F) -> Result<KPartition>
    where
        F: FnMut(u64, u64) -> Result<bool>,
    {
        let mut blocks: Vec<Vec<u64>> = Vec::new();
        'items: for &k in items {
            for block in blocks.iter_mut() {
                if equivalent(block[0], k)? {
                    block.push(k);
                    continue 'items;
                }
            }
            blocks.push(vec![k]);
        }
        Ok(KPartition::new(base, kind, blocks))
    }

    /// Minimum of each block.
    pub fn representatives(&self) -> Vec<u64> {
        self.blocks.iter().map(|b| b[0]).collect()
    }

    pub fn block_of(&self, k: u64) -> Option<&[u64]> {
        self.blocks.iter().find(|b| b.binary_search(&k).is_ok()).map(Vec::as_slice)
    }

    pub fn representative_of(&self, k: u64) -> Option<u64> {
        self.block_of(k).map(|b| b[0])
    }

    pub fn elements(&self) -> Vec<u64> {
        let mut all: Vec<u64> = self.blocks.iter().flatten().copied().collect();
        all.sort_unstable();
        all
    }

    /// True when every block of `self` lies inside a single block of `coarser`.
    pub fn refines(&self, coarser: &KPartition) -> bool {
        self.blocks.iter().all(|block| {
            let target = coarser.representative_of(block[0]);
            target.is_some() && block.iter().all(|&k| coarser.representative_of(k) == target)
        })
    }

    /// Restricts to a subset of elements (e.g. the isomorphism-class representatives),
    /// dropping blocks that become empty.
    pub fn restrict(&self, keep: &[u64]) -> Vec<Vec<u64>> {
        self.blocks
            .iter()
            .map(|b| b.iter().copied().filter(|k| keep.contains(k)).collect::<Vec<_>>())
            .filter(|b| !b.is_empty())
            .collect()
    }
}

/// Orbits of `k -> k^v` on the valid set.
pub fn iso_classes(p: u64, m: u32, n: u32, limits: &Limits) -> Result<KPartition> {
    let base = Base::new(p, m, n)?;
    let valid = valid_k_set(p, m, n, limits)?;
    let mut seen = BTreeSet::new();
    let mut blocks = Vec::new();
    for &k in &valid {
        if seen.contains(&k) {
            continue;
        }
        let block: Vec<u64> = orbit(&base.params(k as i64))?.into_iter().collect();
        seen.extend(block.iter().copied());
        blocks.push(block);
    }
    Ok(KPartition::new(base, PartitionKind::Isomorphism, blocks))
}

/// Euler's totient of `p^n`: the size of the unit group acting on `k`.
pub fn unit_group_order(base: &Base) -> u64 {
    let q = base.k_order();
    q / base.p * (base.p - 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(p: u64, m: u32, n: u32, k: i64) -> GroupParams {
        GroupParams::new(p, m, n, k).unwrap()
    }

    #[test]
    fn validity_examples() {
        assert!(is_valid(&params(2, 5, 3, 7)));
        assert!(!is_valid(&params(2, 5, 3, 2)));
        assert!(is_valid(&params(3, 2, 1, 4)));
        assert!(!is_valid(&params(3, 2, 1, 2)));
        assert!(!is_valid(&params(3, 2, 1, 0)));
    }

    #[test]
    fn canonicalizes_negative_k() {
        assert_eq!(params(2, 5, 3, -1).k(), 31);
        assert_eq!(params(2, 5, 3, 33).k(), 1);
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(GroupParams::new(4, 2, 1, 1).is_err());
        assert!(GroupParams::new(2, 0, 1, 1).is_err());
        assert!(GroupParams::new(2, 70, 1, 1).is_err());
    }

    #[test]
    fn valid_sets() {
        let limits = Limits::default();
        let odd: Vec<u64> = (1..32).step_by(2).collect();
        assert_eq!(valid_k_set(2, 5, 3, &limits).unwrap(), odd);
        assert_eq!(valid_k_set(2, 1, 1, &limits).unwrap(), vec![1]);
        // brute force over residues mod 9
        let brute: Vec<u64> = (0..9u64).filter(|k| k.pow(3) % 9 == 1).collect();
        assert_eq!(brute, vec![1, 4, 7]);
        assert_eq!(valid_k_set(3, 2, 1, &limits).unwrap(), brute);
        let tight = Limits { max_residues: 16, ..Limits::default() };
        assert!(matches!(valid_k_set(2, 5, 3, &tight), Err(Error::ResourceLimit(_))));
    }

    #[test]
    fn isomorphism_examples() {
        assert!(is_isomorphic(&params(2, 5, 3, 3), &params(2, 5, 3, 11)).unwrap());
        assert!(!is_isomorphic(&params(2, 5, 3, 7), &params(2, 5, 3, 15)).unwrap());
        assert!(is_isomorphic(&params(3, 2, 1, 4), &params(3, 2, 1, 4)).unwrap());
        assert!(is_isomorphic(&params(2, 5, 3, 3), &params(2, 4, 3, 3)).is_err());
        assert!(is_isomorphic(&params(2, 5, 3, 3), &params(2, 5, 3, 2)).is_err());
    }

    #[test]
    fn iso_partition_253() {
        let part = iso_classes(2, 5, 3, &Limits::default()).unwrap();
        let expected: Vec<Vec<u64>> = vec![
            vec![1],
            vec![3, 11, 19, 27],
            vec![5, 13, 21, 29],
            vec![7, 23],
            vec![9, 25],
            vec![15],
            vec![17],
            vec![31],
        ];
        assert_eq!(part.blocks, expected);
        assert_eq!(part.representatives(), vec![1, 3, 5, 7, 9, 15, 17, 31]);
    }

    #[test]
    fn iso_partition_small() {
        let l = Limits::default();
        assert_eq!(iso_classes(2, 1, 1, &l).unwrap().blocks, vec![vec![1]]);
        // 4^2 = 16 = 7 (mod 9)
        assert_eq!(iso_classes(3, 2, 1, &l).unwrap().blocks, vec![vec![1], vec![4, 7]]);
    }

    #[test]
    fn partition_json_shape() {
        let part = iso_classes(3, 2, 1, &Limits::default()).unwrap();
        let json = serde_json::to_string(&part).unwrap();
        assert_eq!(json, r#"{"p":3,"m":2,"n":1,"kind":"isomorphism","blocks":[[1],[4,7]]}"#);
        let back: KPartition = serde_json::from_str(&json).unwrap();
        assert_eq!(back, part);
    }

    #[test]
    fn refinement_check() {
        let base = Base::new(2, 5, 3).unwrap();
        let fine = KPartition::new(base, PartitionKind::Isomorphism, vec![vec![1], vec![3], vec![5]]);
        let coarse = KPartition::new(base, PartitionKind::Zeta, vec![vec![1, 5], vec![3]]);
        assert!(fine.refines(&coarse));
        assert!(!coarse.refines(&fine));
    }
}

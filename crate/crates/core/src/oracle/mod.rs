//! Brute-force ground truth: explicit groups and exhaustive subgroup enumeration.
//!
//! Nothing here consults the closed formulas in [`crate::zeta`]; the two are
//! compared against each other by the sweeps.

mod omega;
mod subgroups;

use std::fmt;

use num_integer::Integer;
use serde::Serialize;

use crate::config::Limits;
use crate::error::{invalid, Error, Result};
use crate::group::GroupParams;
use crate::padic::{check_prime, mod_pow_u64};
use crate::zeta::MaxClassFamily;

pub use omega::{berkovich_shape, omega_profile, OmegaProfile, QuotientShape};
pub use subgroups::{
    cocycle_census_of, cocycle_subgroup_census, enumerate_subgroups, export_json, subgroup_counts, ElementSet,
    Subgroup, SubgroupSet,
};

/// Element ids are dense in `[0, order)`; the identity is always `0`.
pub type Element = u32;

/// How a [`ConcreteGroup`] was built.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GroupDescriptor {
    Split { p: u64, m: u32, n: u32, k: u64 },
    /// `a^(p^m) = 1, b^(p^n) = a^(p^lambda), b a b^-1 = a^k`.
    NonSplit { p: u64, m: u32, n: u32, lambda: u32, k: u64 },
    Cyclic { order: u64 },
    Product { factor: Box<GroupDescriptor>, q: u64 },
}

impl fmt::Display for GroupDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupDescriptor::Split { p, m, n, k } => write!(f, "G({p},{m},{n},{k})"),
            GroupDescriptor::NonSplit { p, m, n, lambda, k } => write!(f, "G({p},{m},{n},{lambda},{k})"),
            GroupDescriptor::Cyclic { order } => write!(f, "Z{order}"),
            GroupDescriptor::Product { factor, q } => write!(f, "{factor} x Z{q}"),
        }
    }
}

/// Normal form `a^x b^y`, id `x * kn + y`:
/// `(x1, y1)(x2, y2) = (x1 + k^y1 x2 [+ shift on carry], y1 + y2 mod kn)`.
#[derive(Debug, Clone)]
struct MetacyclicLaw {
    h: u64,
    kn: u64,
    /// `k^y mod h` for `y < kn`.
    powk: Vec<u64>,
    /// Exponent of `a` equal to `b^kn`; zero for split extensions.
    shift: u64,
}

impl MetacyclicLaw {
    fn new(h: u64, kn: u64, k: u64, shift: u64) -> MetacyclicLaw {
        let powk = (0..kn).map(|y| mod_pow_u64(k, y, h)).collect();
        MetacyclicLaw { h, kn, powk, shift }
    }

    fn mul(&self, a: u64, b: u64) -> u64 {
        let (x1, y1) = (a / self.kn, a % self.kn);
        let (x2, y2) = (b / self.kn, b % self.kn);
        let mut x = x1 + (self.powk[y1 as usize] as u128 * x2 as u128 % self.h as u128) as u64;
        let mut y = y1 + y2;
        if y >= self.kn {
            y -= self.kn;
            x += self.shift;
        }
        (x % self.h) * self.kn + y
    }
}

#[derive(Debug, Clone)]
enum Law {
    Metacyclic(MetacyclicLaw),
    /// Direct product with a cyclic group of order `q`; id `g * q + z`.
    Product { inner: Box<Law>, q: u64 },
}

impl Law {
    fn mul(&self, a: u64, b: u64) -> u64 {
        match self {
            Law::Metacyclic(law) => law.mul(a, b),
            Law::Product { inner, q } => {
                let g = inner.mul(a / q, b / q);
                g * q + (a % q + b % q) % q
            }
        }
    }

    fn coordinates(&self, id: u64) -> Vec<u64> {
        match self {
            Law::Metacyclic(law) => vec![id / law.kn, id % law.kn],
            Law::Product { inner, q } => {
                let mut c = inner.coordinates(id / q);
                c.push(id % q);
                c
            }
        }
    }
}

/// A finite group with an explicit element set and multiplication law.
/// Immutable after construction.
#[derive(Debug, Clone)]
pub struct ConcreteGroup {
    descriptor: GroupDescriptor,
    law: Law,
    order: usize,
    prime: Option<u64>,
    /// Number of elements of the normal cyclic subgroup `<a>` in the leading coordinate.
    h_order: u64,
}

fn prime_of_power(order: u64) -> Option<u64> {
    if order < 2 {
        return None;
    }
    let mut d = 2;
    while d * d <= order {
        if order.is_multiple_of(d) {
            break;
        }
        d += 1;
    }
    let p = if order.is_multiple_of(d) { d } else { order };
    let mut rest = order;
    while rest.is_multiple_of(p) {
        rest /= p;
    }
    (rest == 1).then_some(p)
}

fn check_order(order: u64, limits: &Limits) -> Result<()> {
    if order > limits.max_order {
        return Err(Error::ResourceLimit(format!(
            "group order {order} exceeds the oracle bound {}",
            limits.max_order
        )));
    }
    if order > u32::MAX as u64 {
        return invalid("group order must fit in 32 bits");
    }
    Ok(())
}

impl ConcreteGroup {
    fn metacyclic(descriptor: GroupDescriptor, h: u64, kn: u64, k: u64, shift: u64) -> ConcreteGroup {
        let order = h * kn;
        ConcreteGroup {
            descriptor,
            law: Law::Metacyclic(MetacyclicLaw::new(h, kn, k, shift)),
            order: order as usize,
            prime: prime_of_power(order),
            h_order: h,
        }
    }

    /// Cyclic group of the given order.
    pub fn cyclic(order: u64, limits: &Limits) -> Result<ConcreteGroup> {
        if order == 0 {
            return invalid("order must be positive");
        }
        check_order(order, limits)?;
        Ok(Self::metacyclic(GroupDescriptor::Cyclic { order }, order, 1, 1, 0))
    }

    /// The possibly non-split metacyclic group
    /// `<a, b | a^(p^m) = 1, b^(p^n) = a^(p^lambda), b a b^-1 = a^k>`.
    /// Valid iff `k^(p^n) = 1` and `p^lambda (k - 1) = 0` modulo `p^m`.
    pub fn nonsplit_metacyclic(p: u64, m: u32, n: u32, lambda: u32, k: i64, limits: &Limits) -> Result<ConcreteGroup> {
        check_prime(p)?;
        if lambda > m {
            return invalid("lambda must not exceed m");
        }
        let params = GroupParams::new(p, m, n, k)?;
        let base = params.base();
        let order = base
            .group_order()
            .ok_or_else(|| Error::ResourceLimit("group order overflows".into()))?;
        check_order(order, limits)?;
        let h = base.h_order();
        let shift = p.pow(lambda) % h;
        let k = params.k();
        if mod_pow_u64(k, base.k_order(), h) != 1 || !(shift as u128 * (k + h - 1) as u128).is_multiple_of(h as u128) {
            return invalid(format!("G({p},{m},{n},{lambda},{k}) is not a valid presentation"));
        }
        let descriptor = if shift == 0 {
            GroupDescriptor::Split { p, m, n, k }
        } else {
            GroupDescriptor::NonSplit { p, m, n, lambda, k }
        };
        Ok(Self::metacyclic(descriptor, h, base.k_order(), k, shift))
    }

    /// `D`, `Q` or `SD` of order `2^ell`.
    pub fn maximal_class(family: MaxClassFamily, ell: u32, limits: &Limits) -> Result<ConcreteGroup> {
        let min = if family == MaxClassFamily::SD { 4 } else { 3 };
        if ell < min {
            return invalid(format!("{family}_(2^{ell}) needs ell >= {min}"));
        }
        let half = 1i64 << (ell - 2);
        match family {
            MaxClassFamily::D => build_group(&GroupParams::new(2, ell - 1, 1, -1)?, limits),
            MaxClassFamily::SD => build_group(&GroupParams::new(2, ell - 1, 1, half - 1)?, limits),
            MaxClassFamily::Q => Self::nonsplit_metacyclic(2, ell - 1, 1, ell - 2, -1, limits),
        }
    }

    pub fn descriptor(&self) -> &GroupDescriptor {
        &self.descriptor
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// `Some(p)` when the order is a power of the prime `p`.
    pub fn prime(&self) -> Option<u64> {
        self.prime
    }

    pub fn identity(&self) -> Element {
        0
    }

    pub fn elements(&self) -> impl Iterator<Item = Element> {
        0..self.order as Element
    }

    pub fn mul(&self, a: Element, b: Element) -> Element {
        self.law.mul(a as u64, b as u64) as Element
    }

    /// Coordinates `(x, y)` of `a^x b^y`, with a trailing cofactor coordinate for products.
    pub fn coordinates(&self, g: Element) -> Vec<u64> {
        self.law.coordinates(g as u64)
    }

    pub fn element_order(&self, g: Element) -> usize {
        let mut x = g;
        let mut e = 1;
        while x != 0 {
            x = self.mul(x, g);
            e += 1;
        }
        e
    }

    pub fn pow(&self, g: Element, mut e: u64) -> Element {
        let mut result = 0;
        let mut base = g;
        while e > 0 {
            if e & 1 == 1 {
                result = self.mul(result, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        result
    }

    pub fn inverse(&self, g: Element) -> Element {
        self.pow(g, self.element_order(g) as u64 - 1)
    }

    /// Whether `g` lies in the normal cyclic factor `<a>` (the `H` coordinate).
    /// Only meaningful for metacyclic groups built without a cofactor.
    pub fn in_cyclic_normal_factor(&self, g: Element) -> bool {
        match &self.law {
            Law::Metacyclic(law) => (g as u64).is_multiple_of(law.kn),
            Law::Product { .. } => false,
        }
    }

    pub fn is_abelian(&self) -> bool {
        self.elements().all(|a| self.elements().all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    /// `|<a>|` for metacyclic groups.
    pub fn h_order(&self) -> u64 {
        self.h_order
    }
}

/// The split group `G(p,m,n,k)` with element `(x, y)` standing for `a^x b^y`.
pub fn build_group(params: &GroupParams, limits: &Limits) -> Result<ConcreteGroup> {
    params.require_valid()?;
    let base = params.base();
    let order = base
        .group_order()
        .ok_or_else(|| Error::ResourceLimit("group order overflows".into()))?;
    check_order(order, limits)?;
    let descriptor = GroupDescriptor::Split {
        p: base.p,
        m: base.m,
        n: base.n,
        k: params.k(),
    };
    Ok(ConcreteGroup::metacyclic(descriptor, base.h_order(), base.k_order(), params.k(), 0))
}

/// `g x Z_q` with `gcd(q, |g|) = 1`.
pub fn direct_product(g: &ConcreteGroup, q: u64, limits: &Limits) -> Result<ConcreteGroup> {
    if q == 0 {
        return invalid("cofactor order must be positive");
    }
    let n = g.order as u64;
    if n.gcd(&q) != 1 {
        return invalid(format!("cofactor order {q} is not coprime to |G| = {n}"));
    }
    let order = n
        .checked_mul(q)
        .ok_or_else(|| Error::ResourceLimit("product order overflows".into()))?;
    check_order(order, limits)?;
    if q == 1 {
        return Ok(g.clone());
    }
    Ok(ConcreteGroup {
        descriptor: GroupDescriptor::Product {
            factor: Box::new(g.descriptor.clone()),
            q,
        },
        law: Law::Product {
            inner: Box::new(g.law.clone()),
            q,
        },
        order: order as usize,
        prime: None,
        h_order: g.h_order,
    })
}

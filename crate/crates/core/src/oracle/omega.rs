use serde::Serialize;

use super::subgroups::{log_exact, ElementSet};
use super::{ConcreteGroup, Element};
use crate::error::{invalid, Error, Result};
use crate::zeta::{BerkovichShape, MaxClassFamily};

/// Isomorphism type of `G/R`, read off from element orders in the quotient.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum QuotientShape {
    Trivial,
    Cyclic { c: u32 },
    Dihedral { c: u32 },
    Quaternion { c: u32 },
    Semidihedral { c: u32 },
    Other { c: u32 },
}

#[derive(Debug, Clone, Serialize)]
pub struct OmegaProfile {
    /// `|Omega_i|` for `i = 0..=log2 |G|`.
    pub omega_sizes: Vec<u64>,
    pub w: u32,
    pub r_order: u64,
    #[serde(skip)]
    pub r: ElementSet,
    pub quotient_shape: QuotientShape,
}

/// Omega data of a 2-group: `Omega_i = {x : x^(2^i) = 1}`, `w` the largest `i`
/// with `|Omega_i| = 4^i`, `R = Omega_w`, and the shape of `G/R`.
pub fn omega_profile(g: &ConcreteGroup) -> Result<OmegaProfile> {
    if g.prime() != Some(2) {
        return invalid(format!("omega profile needs a 2-group, got {}", g.descriptor()));
    }
    let ell = log_exact(g.order() as u64, 2).expect("2-group");
    let orders: Vec<usize> = g.elements().map(|e| g.element_order(e)).collect();
    let omega_sizes: Vec<u64> = (0..=ell)
        .map(|i| orders.iter().filter(|&&o| (1usize << i).is_multiple_of(o)).count() as u64)
        .collect();
    let w = (0..=ell)
        .filter(|&i| omega_sizes[i as usize] == 1u64 << (2 * i))
        .max()
        .unwrap_or(0);

    let mut r = ElementSet::empty(g.order());
    for e in g.elements() {
        if (1usize << w).is_multiple_of(orders[e as usize]) {
            r.insert(e);
        }
    }
    for a in r.iter() {
        for b in r.iter() {
            if !r.contains(g.mul(a, b)) {
                return Err(Error::InternalInconsistency(format!(
                    "Omega_{w} of {} is not a subgroup",
                    g.descriptor()
                )));
            }
        }
    }
    let r_order = omega_sizes[w as usize];
    let quotient_shape = classify_quotient(g, &r, r_order);
    Ok(OmegaProfile {
        omega_sizes,
        w,
        r_order,
        r,
        quotient_shape,
    })
}

fn classify_quotient(g: &ConcreteGroup, r: &ElementSet, r_order: u64) -> QuotientShape {
    let q_order = g.order() as u64 / r_order;
    if q_order == 1 {
        return QuotientShape::Trivial;
    }
    let c = log_exact(q_order, 2).expect("2-group quotient");

    // coset[e] = index of the coset eR
    let mut coset = vec![usize::MAX; g.order()];
    let mut reps: Vec<Element> = Vec::new();
    for e in g.elements() {
        if coset[e as usize] != usize::MAX {
            continue;
        }
        for x in r.iter() {
            coset[g.mul(e, x) as usize] = reps.len();
        }
        reps.push(e);
    }
    let quotient_order = |e: Element| -> u64 {
        let mut x = e;
        let mut n = 1;
        while !r.contains(x) {
            x = g.mul(x, e);
            n += 1;
        }
        n
    };
    let orders: Vec<u64> = reps.iter().map(|&e| quotient_order(e)).collect();
    if orders.contains(&q_order) {
        return QuotientShape::Cyclic { c };
    }
    let abelian = reps
        .iter()
        .all(|&a| reps.iter().all(|&b| coset[g.mul(a, b) as usize] == coset[g.mul(b, a) as usize]));
    let has_index_two_cyclic = orders.contains(&(q_order / 2));
    if abelian || !has_index_two_cyclic || c < 3 {
        return QuotientShape::Other { c };
    }
    let involutions = orders.iter().filter(|&&o| o == 2).count() as u64;
    if involutions == (1 << (c - 1)) + 1 {
        QuotientShape::Dihedral { c }
    } else if involutions == 1 {
        QuotientShape::Quaternion { c }
    } else if c >= 4 && involutions == (1 << (c - 2)) + 1 {
        QuotientShape::Semidihedral { c }
    } else {
        QuotientShape::Other { c }
    }
}

/// Maps an omega profile to the structural case used by the closed count formulas.
pub fn berkovich_shape(profile: &OmegaProfile) -> Result<BerkovichShape> {
    let family = |shape: QuotientShape| match shape {
        QuotientShape::Dihedral { c } => Some((MaxClassFamily::D, c)),
        QuotientShape::Quaternion { c } => Some((MaxClassFamily::Q, c)),
        QuotientShape::Semidihedral { c } => Some((MaxClassFamily::SD, c)),
        _ => None,
    };
    let w = profile.w;
    let shape = profile.quotient_shape;
    if let QuotientShape::Other { c } = shape {
        return Err(Error::InternalInconsistency(format!(
            "G/R of order 2^{c} is not trivial, cyclic or of maximal class; input is not metacyclic"
        )));
    }
    Ok(match (w, shape) {
        (0, QuotientShape::Trivial) => BerkovichShape::Cyclic { ell: 0 },
        (0, QuotientShape::Cyclic { c }) => BerkovichShape::Cyclic { ell: c },
        (0, s) => {
            let (family, ell) = family(s).expect("maximal class");
            BerkovichShape::MaximalClass { family, ell }
        }
        (w, QuotientShape::Trivial) => BerkovichShape::OmegaIsWhole { w },
        (w, QuotientShape::Cyclic { c }) => BerkovichShape::CyclicQuotient { w, c },
        (w, s) => {
            let (family, c) = family(s).expect("maximal class");
            BerkovichShape::MaximalClassQuotient { family, w, c }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Limits;
    use crate::group::GroupParams;
    use crate::oracle::build_group;

    fn group(m: u32, n: u32, k: i64) -> ConcreteGroup {
        build_group(&GroupParams::new(2, m, n, k).unwrap(), &Limits::default()).unwrap()
    }

    #[test]
    fn dihedral_eight_profile() {
        let prof = omega_profile(&group(2, 1, 3)).unwrap();
        assert_eq!(prof.omega_sizes[1], 6);
        assert_eq!(prof.w, 0);
        assert_eq!(prof.r_order, 1);
        assert_eq!(prof.quotient_shape, QuotientShape::Dihedral { c: 3 });
        assert_eq!(
            berkovich_shape(&prof).unwrap(),
            BerkovichShape::MaximalClass { family: MaxClassFamily::D, ell: 3 }
        );
    }

    #[test]
    fn klein_four_profile() {
        let prof = omega_profile(&group(1, 1, 1)).unwrap();
        assert_eq!(prof.w, 1);
        assert_eq!(prof.r_order, 4);
        assert_eq!(prof.quotient_shape, QuotientShape::Trivial);
    }

    #[test]
    fn homocyclic_profile() {
        let prof = omega_profile(&group(2, 2, 1)).unwrap();
        assert_eq!(prof.omega_sizes[2], 16);
        assert_eq!(prof.w, 2);
        assert_eq!(berkovich_shape(&prof).unwrap(), BerkovichShape::OmegaIsWhole { w: 2 });
    }

    #[test]
    fn modular_sixteen_profile() {
        // <a, b | a^8, b^2, b a b^-1 = a^5>
        let prof = omega_profile(&group(3, 1, 5)).unwrap();
        assert_eq!(prof.w, 1);
        assert_eq!(prof.quotient_shape, QuotientShape::Cyclic { c: 2 });
    }

    #[test]
    fn odd_groups_rejected() {
        let g = build_group(&GroupParams::new(3, 1, 1, 1).unwrap(), &Limits::default()).unwrap();
        assert!(omega_profile(&g).is_err());
    }
}

//! Modular and p-adic integer arithmetic.
//!
//! Public entry points take arbitrary-precision integers; the `_u64`/`_i128`
//! variants are the fixed-width paths used inside the formula engine.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Add;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{invalid, Error, Result};

/// A p-adic valuation; `Infinite` is reserved for the valuation of zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Valuation {
    Finite(u32),
    Infinite,
}

impl Valuation {
    pub fn is_infinite(self) -> bool {
        matches!(self, Valuation::Infinite)
    }

    pub fn finite(self) -> Option<u32> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }

    /// `min(cap, self)` as a plain integer.
    pub fn capped(self, cap: u32) -> u32 {
        match self {
            Valuation::Finite(v) => v.min(cap),
            Valuation::Infinite => cap,
        }
    }
}

impl PartialOrd for Valuation {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Valuation {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Valuation::Finite(a), Valuation::Finite(b)) => a.cmp(b),
            (Valuation::Finite(_), Valuation::Infinite) => Ordering::Less,
            (Valuation::Infinite, Valuation::Finite(_)) => Ordering::Greater,
            (Valuation::Infinite, Valuation::Infinite) => Ordering::Equal,
        }
    }
}

impl Add for Valuation {
    type Output = Valuation;

    fn add(self, rhs: Valuation) -> Valuation {
        match (self, rhs) {
            (Valuation::Finite(a), Valuation::Finite(b)) => Valuation::Finite(a + b),
            _ => Valuation::Infinite,
        }
    }
}

impl From<u32> for Valuation {
    fn from(v: u32) -> Self {
        Valuation::Finite(v)
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for Valuation {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Valuation::Finite(v) => serializer.serialize_u32(*v),
            Valuation::Infinite => serializer.serialize_str("inf"),
        }
    }
}

/// Trial-division primality check.
pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    if p < 4 {
        return true;
    }
    if p.is_multiple_of(2) {
        return false;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

pub(crate) fn check_prime(p: u64) -> Result<()> {
    if is_prime(p) {
        Ok(())
    } else {
        invalid(format!("{p} is not prime"))
    }
}

/// Exact p-adic valuation of `d`; the sign of `d` is ignored.
pub fn vp(p: u64, d: &BigInt) -> Result<Valuation> {
    check_prime(p)?;
    Ok(vp_unchecked(p, d.magnitude()))
}

fn vp_unchecked(p: u64, d: &BigUint) -> Valuation {
    if d.is_zero() {
        return Valuation::Infinite;
    }
    if p == 2 {
        return Valuation::Finite(d.trailing_zeros().unwrap_or(0) as u32);
    }
    let p = BigUint::from(p);
    let mut rest = d.clone();
    let mut v = 0;
    loop {
        let (q, r) = rest.div_rem(&p);
        if !r.is_zero() {
            return Valuation::Finite(v);
        }
        rest = q;
        v += 1;
    }
}

/// Fixed-width valuation. `p` must be prime (not rechecked).
pub fn vp_i128(p: u64, d: i128) -> Valuation {
    let mut d = d.unsigned_abs();
    if d == 0 {
        return Valuation::Infinite;
    }
    if p == 2 {
        return Valuation::Finite(d.trailing_zeros());
    }
    let p = p as u128;
    let mut v = 0;
    while d.is_multiple_of(p) {
        d /= p;
        v += 1;
    }
    Valuation::Finite(v)
}

/// `base^exponent mod modulus` in `[0, modulus)`; negative bases are reduced first.
pub fn mod_pow(base: &BigInt, exponent: &BigUint, modulus: &BigUint) -> Result<BigUint> {
    if modulus.is_zero() {
        return invalid("modulus must be positive");
    }
    let reduced = canonical_residue(base, modulus);
    Ok(reduced.modpow(exponent, modulus))
}

/// Representative of `x` in `[0, modulus)`.
pub fn canonical_residue(x: &BigInt, modulus: &BigUint) -> BigUint {
    let m = BigInt::from_biguint(Sign::Plus, modulus.clone());
    x.mod_floor(&m).magnitude().clone()
}

pub fn mul_mod_u64(a: u64, b: u64, modulus: u64) -> u64 {
    ((a as u128 * b as u128) % modulus as u128) as u64
}

/// Square-and-multiply over `u64`, with 128-bit intermediate products.
pub fn mod_pow_u64(base: u64, mut exponent: u64, modulus: u64) -> u64 {
    assert!(modulus > 0, "modulus must be positive");
    if modulus == 1 {
        return 0;
    }
    let mut result = 1u64;
    let mut b = base % modulus;
    while exponent > 0 {
        if exponent & 1 == 1 {
            result = mul_mod_u64(result, b, modulus);
        }
        b = mul_mod_u64(b, b, modulus);
        exponent >>= 1;
    }
    result
}

fn factorize_u64(mut x: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d.saturating_mul(d) <= x {
        if x.is_multiple_of(d) {
            let mut e = 0;
            while x.is_multiple_of(d) {
                x /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if x > 1 {
        out.push((x, 1));
    }
    out
}

fn totient_u64(x: u64) -> u64 {
    factorize_u64(x)
        .into_iter()
        .fold(x, |acc, (q, _)| acc / q * (q - 1))
}

/// Multiplicative order of the unit `u` modulo `modulus`.
///
/// The modulus must fit in 64 bits; the order is found by stripping prime
/// factors from Euler's totient.
pub fn mult_order(u: &BigInt, modulus: &BigUint) -> Result<BigUint> {
    if modulus.is_zero() {
        return invalid("modulus must be positive");
    }
    let m = modulus
        .to_u64()
        .ok_or_else(|| Error::InvalidArgument("mult_order modulus exceeds 64 bits".into()))?;
    let residue = canonical_residue(u, modulus).to_u64().expect("residue below a u64 modulus");
    Ok(BigUint::from(mult_order_u64(residue, m)?))
}

pub fn mult_order_u64(u: u64, modulus: u64) -> Result<u64> {
    if modulus == 0 {
        return invalid("modulus must be positive");
    }
    if modulus == 1 {
        return Ok(1);
    }
    let u = u % modulus;
    if u.gcd(&modulus) != 1 {
        return invalid(format!("{u} is not a unit modulo {modulus}"));
    }
    let mut order = totient_u64(modulus);
    for (q, _) in factorize_u64(order) {
        while order.is_multiple_of(q) && mod_pow_u64(u, order / q, modulus) == 1 {
            order /= q;
        }
    }
    Ok(order)
}

/// `v_p(x^n - y^n)` by the lifting-the-exponent formulas.
///
/// Odd `p` needs `p | x - y` with `p` dividing neither `x` nor `y`; `p = 2`
/// needs `x` and `y` odd. Violated hypotheses give [`Error::Precondition`]
/// rather than a silent fallback. `x = y` (or `x = -y` with even `n` at `p = 2`)
/// yields `Infinite`.
pub fn lte_valuation(p: u64, x: &BigInt, y: &BigInt, n: u64) -> Result<Valuation> {
    check_prime(p)?;
    if n == 0 {
        return invalid("exponent n must be positive");
    }
    let pb = BigInt::from(p);
    let diff = x - y;
    let n_val = vp_i128(p, n as i128);
    if p == 2 {
        if x.is_even() || y.is_even() {
            return Err(Error::Precondition("p = 2 requires x and y odd".into()));
        }
        let base = vp_unchecked(2, diff.magnitude());
        if n % 2 == 1 {
            return Ok(base);
        }
        let sum = x + y;
        let total = base + vp_unchecked(2, sum.magnitude()) + n_val;
        return Ok(match total {
            Valuation::Finite(v) => Valuation::Finite(v - 1),
            Valuation::Infinite => Valuation::Infinite,
        });
    }
    if !(&diff % &pb).is_zero() {
        return Err(Error::Precondition(format!("{p} does not divide x - y")));
    }
    if (x % &pb).is_zero() || (y % &pb).is_zero() {
        return Err(Error::Precondition(format!("{p} divides x or y")));
    }
    Ok(vp_unchecked(p, diff.magnitude()) + n_val)
}

//! Closed-form subgroup counts.
//!
//! A subgroup `T` of `G = H ⋊ K` is determined by `A = T ∩ H`, `B = π(T)` and a
//! 1-cocycle `B -> H/A`. With `|A| = p^i`, `|B| = p^j`, the cocycles are counted
//! by the kernel of the norm map `x -> (1 + u + ... + u^(p^j - 1)) x` on
//! `Z/p^(m-i)`, where `u = k^(p^(n-j)) mod p^(m-i)`. Summing `|Ker|` over
//! `i + j = t` gives `a_{p^t}`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{invalid, Error, Result};
use crate::group::{Base, GroupParams};
use crate::padic::{check_prime, mod_pow_u64, vp_i128};

/// Exact subgroup counts `counts[t] = a_{p^t}` for `t = 0..=m+n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ZetaCoefficients {
    pub base: Base,
    pub counts: Vec<BigUint>,
}

#[derive(Serialize, Deserialize)]
struct ZetaCoefficientsRepr {
    p: u64,
    m: u32,
    n: u32,
    counts: Vec<String>,
}

impl Serialize for ZetaCoefficients {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        ZetaCoefficientsRepr {
            p: self.base.p,
            m: self.base.m,
            n: self.base.n,
            counts: self.counts.iter().map(|c| c.to_string()).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ZetaCoefficients {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = ZetaCoefficientsRepr::deserialize(deserializer)?;
        let base = Base::new(repr.p, repr.m, repr.n).map_err(D::Error::custom)?;
        let counts = repr
            .counts
            .iter()
            .map(|s| s.parse::<BigUint>().map_err(D::Error::custom))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        if counts.len() != (base.m + base.n + 1) as usize {
            return Err(D::Error::custom("counts length must be m + n + 1"));
        }
        Ok(ZetaCoefficients { base, counts })
    }
}

/// Finite Dirichlet series as a map `order -> count`.
pub type DirichletSeries = BTreeMap<BigUint, BigUint>;

impl ZetaCoefficients {
    /// Total number of subgroups.
    pub fn total(&self) -> BigUint {
        self.counts.iter().sum()
    }

    pub fn as_u64(&self) -> Option<Vec<u64>> {
        self.counts.iter().map(|c| u64::try_from(c).ok()).collect()
    }

    /// Nonzero coefficients keyed by subgroup order.
    pub fn to_series(&self) -> DirichletSeries {
        let p = BigUint::from(self.base.p);
        let mut order = BigUint::one();
        let mut out = BTreeMap::new();
        for c in &self.counts {
            if !c.is_zero() {
                out.insert(order.clone(), c.clone());
            }
            order *= &p;
        }
        out
    }
}

impl fmt::Display for ZetaCoefficients {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (t, c) in self.counts.iter().enumerate() {
            if t > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str("]")
    }
}

/// Norm-map data for one `(i, j)` cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct KernelProfile {
    pub i: u32,
    pub j: u32,
    /// `k^(p^(n-j))` reduced into `[0, p^(m-i))`.
    pub u: u64,
    /// `log_p |Ker N_{i,j}|`.
    pub kernel_log: u32,
}

fn check_indices(params: &GroupParams, i: u32, j: u32) -> Result<()> {
    if i > params.m() || j > params.n() {
        return invalid(format!(
            "index (i={i}, j={j}) outside 0..={} x 0..={}",
            params.m(),
            params.n()
        ));
    }
    Ok(())
}

/// `k^(p^e) mod modulus`, as `e` successive p-th powers.
fn pow_p_power(k: u64, p: u64, e: u32, modulus: u64) -> u64 {
    (0..e).fold(k % modulus, |x, _| mod_pow_u64(x, p, modulus))
}

/// `u_{i,j}`: the residue in `[0, p^(m-i))` of `k^(p^(n-j))`; zero when `i = m`.
pub fn u_ij(params: &GroupParams, i: u32, j: u32) -> Result<u64> {
    params.require_valid()?;
    check_indices(params, i, j)?;
    let modulus = params.p().pow(params.m() - i);
    if modulus == 1 {
        return Ok(0);
    }
    Ok(pow_p_power(params.k(), params.p(), params.n() - j, modulus))
}

/// `E_{i,j} = log_p |Ker N_{i,j}|`.
pub fn kernel_log(params: &GroupParams, i: u32, j: u32) -> Result<u32> {
    params.require_valid()?;
    check_indices(params, i, j)?;
    Ok(kernel_log_unchecked(params, i, j))
}

fn kernel_log_unchecked(params: &GroupParams, i: u32, j: u32) -> u32 {
    let r = params.m() - i;
    if r == 0 {
        return 0;
    }
    if params.p() != 2 {
        return r.min(j);
    }
    let modulus = 1u64 << r;
    let u = pow_p_power(params.k(), 2, params.n() - j, modulus);
    if u == 1 {
        return r.min(j);
    }
    // v2(u + 1) = min(r, v2(x + 1)) for any x = u mod 2^r; take x mod 2^m.
    let x = pow_p_power(params.k(), 2, params.n() - j, params.base().h_order());
    let s = vp_i128(2, x as i128 + 1).capped(r);
    r.min(s + j - 1)
}

pub fn kernel_profile(params: &GroupParams, i: u32, j: u32) -> Result<KernelProfile> {
    Ok(KernelProfile {
        i,
        j,
        u: u_ij(params, i, j)?,
        kernel_log: kernel_log(params, i, j)?,
    })
}

/// Signature of `k` that drives the `p = 2` criterion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TwoAdicSignature {
    /// `v2(k + 1)`, computed on the canonical residue.
    pub s2: u32,
    /// `min(m, v2(k - 1))`.
    pub cprime: u32,
    /// `s2 + n - 1`.
    pub sigma: u32,
}

fn require_two(params: &GroupParams) -> Result<()> {
    if params.p() != 2 {
        return invalid(format!("{params}: operation requires p = 2"));
    }
    Ok(())
}

pub fn two_adic_signature(params: &GroupParams) -> Result<TwoAdicSignature> {
    require_two(params)?;
    params.require_valid()?;
    let k = params.k() as i128;
    let s2 = vp_i128(2, k + 1)
        .finite()
        .expect("k + 1 is positive for a canonical residue");
    let cprime = vp_i128(2, k - 1).capped(params.m());
    Ok(TwoAdicSignature {
        s2,
        cprime,
        sigma: s2 + params.n() - 1,
    })
}

/// `(E_0, ..., E_{m-1})` with `E_i = E_{i,n}`, from the 2-adic signature alone.
pub fn e_sequence(params: &GroupParams) -> Result<Vec<u32>> {
    let sig = two_adic_signature(params)?;
    let (m, n) = (params.m(), params.n());
    Ok((0..m)
        .map(|i| {
            if i >= m - sig.cprime {
                (m - i).min(n)
            } else {
                (m - i).min(sig.sigma)
            }
        })
        .collect())
}

/// `a_{p^t} = sum over i of p^kernel(i, t - i)`, with a caller-supplied kernel function.
///
/// [`coefficients`] passes [`kernel_log`]; sweeps use this to inject faults.
pub fn coefficients_with<F>(params: &GroupParams, kernel: F) -> Result<ZetaCoefficients>
where
    F: Fn(&GroupParams, u32, u32) -> Result<u32>,
{
    params.require_valid()?;
    let (m, n) = (params.m(), params.n());
    let p = BigUint::from(params.p());
    let mut counts = Vec::with_capacity((m + n + 1) as usize);
    for t in 0..=m + n {
        let lo = t.saturating_sub(n);
        let hi = t.min(m);
        let mut total = BigUint::zero();
        for i in lo..=hi {
            total += p.pow(kernel(params, i, t - i)?);
        }
        counts.push(total);
    }
    Ok(ZetaCoefficients {
        base: params.base(),
        counts,
    })
}

pub fn coefficients(params: &GroupParams) -> Result<ZetaCoefficients> {
    coefficients_with(params, |g, i, j| Ok(kernel_log_unchecked(g, i, j)))
}

fn require_same_base(a: &GroupParams, b: &GroupParams) -> Result<()> {
    if a.base() != b.base() {
        return invalid(format!("parameters {a} and {b} have different (p,m,n)"));
    }
    Ok(())
}

/// Zeta equality decided from `v2(k+1)` alone (true for every odd `p`, and for
/// `p = 2` whenever `n >= m`).
pub fn zeta_equal_by_theorem(a: &GroupParams, b: &GroupParams) -> Result<bool> {
    require_same_base(a, b)?;
    a.require_valid()?;
    b.require_valid()?;
    if a.p() != 2 || a.n() >= a.m() {
        return Ok(true);
    }
    let threshold = a.m() - a.n();
    let s1 = two_adic_signature(a)?.s2;
    let s2 = two_adic_signature(b)?.s2;
    Ok((s1 == s2 && s1 <= threshold) || s1.min(s2) > threshold)
}

/// Zeta equality as equality of coefficient vectors.
pub fn zeta_equal_by_coefficients(a: &GroupParams, b: &GroupParams) -> Result<bool> {
    require_same_base(a, b)?;
    Ok(coefficients(a)? == coefficients(b)?)
}

fn geometric(p: &BigUint, top: u32) -> BigUint {
    // (p^(top+1) - 1) / (p - 1)
    (p.pow(top + 1) - 1u32) / (p - 1u32)
}

/// Subgroup counts of a quasi-regular metacyclic p-group of order `p^ell` and
/// exponent `p^e`, `e < ell`.
pub fn quasiregular_counts(p: u64, ell: u32, e: u32) -> Result<Vec<BigUint>> {
    check_prime(p)?;
    if p == 2 {
        return invalid("quasi-regular counts are for odd p");
    }
    if e == 0 || e >= ell {
        return invalid(format!("need 1 <= e < ell, got e={e}, ell={ell}"));
    }
    let f = ell - e;
    let pb = BigUint::from(p);
    Ok((0..=ell)
        .map(|t| {
            if t <= f {
                geometric(&pb, t)
            } else if t <= e {
                geometric(&pb, f)
            } else {
                geometric(&pb, ell - t)
            }
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MaxClassFamily {
    /// Dihedral `D_{2^l}`.
    D,
    /// Generalized quaternion `Q_{2^l}`.
    Q,
    /// Semidihedral `SD_{2^l}`.
    SD,
}

impl fmt::Display for MaxClassFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MaxClassFamily::D => "D",
            MaxClassFamily::Q => "Q",
            MaxClassFamily::SD => "SD",
        })
    }
}

/// Structural data of a metacyclic 2-group, in terms of `w` and `G/R`
/// where `R = Omega_w(G)` and `w` is the largest `i` with `|Omega_i| = 4^i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "case", rename_all = "snake_case")]
pub enum BerkovichShape {
    Cyclic { ell: u32 },
    /// `w = 0` and `G` itself dihedral, quaternion or semidihedral of order `2^ell`.
    MaximalClass { family: MaxClassFamily, ell: u32 },
    /// `w > 0` and `R = G`.
    OmegaIsWhole { w: u32 },
    /// `w > 0`, `G/R` cyclic of order `2^c`.
    CyclicQuotient { w: u32, c: u32 },
    /// `w > 0`, `G/R` of maximal class; no closed formula is provided.
    MaximalClassQuotient { family: MaxClassFamily, w: u32, c: u32 },
}

impl BerkovichShape {
    pub fn log_order(&self) -> u32 {
        match *self {
            BerkovichShape::Cyclic { ell } | BerkovichShape::MaximalClass { ell, .. } => ell,
            BerkovichShape::OmegaIsWhole { w } => 2 * w,
            BerkovichShape::CyclicQuotient { w, c } | BerkovichShape::MaximalClassQuotient { w, c, .. } => 2 * w + c,
        }
    }
}

fn pow2(e: u32) -> BigUint {
    BigUint::one() << e
}

/// Subgroup counts `a_{2^t}`, `t = 0..=log|G|`, for the shapes with closed formulas.
pub fn berkovich_counts(shape: BerkovichShape) -> Result<Vec<BigUint>> {
    let one = BigUint::one();
    match shape {
        BerkovichShape::Cyclic { ell } => Ok(vec![one; ell as usize + 1]),
        BerkovichShape::MaximalClass { family, ell } => {
            let min_ell = if family == MaxClassFamily::SD { 4 } else { 3 };
            if ell < min_ell {
                return invalid(format!("{family}_(2^{ell}) is not a group of maximal class"));
            }
            Ok((0..=ell)
                .map(|t| match t {
                    0 => one.clone(),
                    t if t == ell => one.clone(),
                    1 => match family {
                        MaxClassFamily::D => pow2(ell - 1) + 1u32,
                        MaxClassFamily::Q => one.clone(),
                        MaxClassFamily::SD => pow2(ell - 2) + 1u32,
                    },
                    t => pow2(ell - t) + 1u32,
                })
                .collect())
        }
        BerkovichShape::OmegaIsWhole { w } => {
            if w == 0 {
                return invalid("w must be positive");
            }
            Ok((0..=2 * w)
                .map(|t| if t <= w { pow2(t + 1) - 1u32 } else { pow2(2 * w - t + 1) - 1u32 })
                .collect())
        }
        BerkovichShape::CyclicQuotient { w, c } => {
            if w == 0 || c == 0 {
                return invalid("w and c must be positive");
            }
            Ok((0..=2 * w + c)
                .map(|t| {
                    if t <= w {
                        pow2(t + 1) - 1u32
                    } else if t < w + c {
                        pow2(w + 1) - 1u32
                    } else {
                        pow2(2 * w + c - t + 1) - 1u32
                    }
                })
                .collect())
        }
        BerkovichShape::MaximalClassQuotient { family, w, c } => Err(Error::UnsupportedCase(format!(
            "no closed formula for G/R = {family}_(2^{c}) with w = {w}; use the oracle"
        ))),
    }
}

/// Dirichlet convolution `out[n] = sum over d | n of z1[d] * z2[n/d]`.
pub fn dirichlet_multiply(z1: &DirichletSeries, z2: &DirichletSeries) -> DirichletSeries {
    let mut out = DirichletSeries::new();
    for (d1, c1) in z1 {
        for (d2, c2) in z2 {
            *out.entry(d1 * d2).or_insert_with(BigUint::zero) += c1 * c2;
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

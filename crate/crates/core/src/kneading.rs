//! Kneading numbers of unimodal maps and the invariants K1, K2.

use std::sync::OnceLock;

use num_rational::Ratio;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::combinatorics::{Combinatorics, CombinatoricsError, Shape};
use crate::real::Precision;

#[derive(Debug, Error)]
pub enum KneadingError {
    #[error(transparent)]
    Combinatorics(#[from] CombinatoricsError),
    #[error("kneading invariants need a unimodal, polynomial or co-polynomial shape; got {0}")]
    WrongShape(String),
    #[error("K1 differs along the list: {first} vs {other} at position {index}")]
    MismatchedK1 {
        first: String,
        other: String,
        index: usize,
    },
    #[error("kneading series overflowed exact arithmetic")]
    Overflow,
}

/// Orbit points closer than this to the critical point count as hitting it.
pub const SNAP: f64 = 1e-13;

pub fn default_terms(p: Precision) -> usize {
    match p {
        Precision::Double => 64,
        Precision::Extended => 128,
    }
}

/// A real map with one turning point `c1`, decreasing to its left when
/// `minus_plus` is true.
pub trait Unimodal {
    fn eval(&self, x: f64) -> f64;
    fn critical_point(&self) -> f64;
    fn minus_plus(&self) -> bool {
        true
    }
}

/// `F_s(x) = s|x| - 1`, entropy `log s` for `1 <= s <= 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantSlope {
    pub s: f64,
}

impl Unimodal for ConstantSlope {
    fn eval(&self, x: f64) -> f64 {
        self.s * x.abs() - 1.0
    }
    fn critical_point(&self) -> f64 {
        0.0
    }
}

/// `f_c(x) = x^2 - c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadratic {
    pub c: f64,
}

impl Unimodal for Quadratic {
    fn eval(&self, x: f64) -> f64 {
        x * x - self.c
    }
    fn critical_point(&self) -> f64 {
        0.0
    }
}

pub fn sigma<M: Unimodal + ?Sized>(x: f64, map: &M) -> i8 {
    let d = x - map.critical_point();
    if d.abs() < SNAP {
        return 0;
    }
    let s = if d > 0.0 { 1 } else { -1 };
    if map.minus_plus() {
        s
    } else {
        -s
    }
}

/// `sum_h sigma(x_0)...sigma(x_h) / 2^(h+1)`, truncated after `terms` terms
/// or ended at the first orbit point equal to `c1`.
pub fn kneading_number<M: Unimodal + ?Sized>(x0: f64, map: &M, terms: usize) -> f64 {
    let mut x = x0;
    let mut prod = 1.0;
    let mut weight = 0.5;
    let mut k = 0.0;
    for _ in 0..terms {
        let s = sigma(x, map);
        if s == 0 {
            break;
        }
        prod *= f64::from(s);
        k += prod * weight;
        weight *= 0.5;
        x = map.eval(x);
    }
    k
}

/// `K1(F) = -k(v1)` with `v1 = F(c1)`.
pub fn k1_of_map<M: Unimodal + ?Sized>(map: &M, terms: usize) -> f64 {
    -kneading_number(map.eval(map.critical_point()), map, terms)
}

fn ratio_str<S: Serializer>(r: &Option<Ratio<i128>>, s: S) -> Result<S::Ok, S::Error> {
    match r {
        Some(r) => s.serialize_str(&format!("{}/{}", r.numer(), r.denom())),
        None => s.serialize_none(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KneadingInvariants {
    pub k1: f64,
    pub k2: f64,
    pub exact: bool,
    /// Series terms summed; 0 for closed-form sums.
    pub truncation: usize,
    #[serde(serialize_with = "ratio_str", skip_serializing_if = "Option::is_none")]
    pub k1_exact: Option<Ratio<i128>>,
    #[serde(serialize_with = "ratio_str", skip_serializing_if = "Option::is_none")]
    pub k2_exact: Option<Ratio<i128>>,
}

fn to_f64(r: Ratio<i128>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

// Exact kneading number of marked point `x0` on a -+ oriented PL model with
// turning point `c1`. The orbit is eventually periodic, so the series is a
// finite sum plus a geometric tail.
fn symbolic_kneading(
    c: &Combinatorics,
    c1: usize,
    x0: usize,
) -> Result<Ratio<i128>, KneadingError> {
    let sign = |j: usize| -> i128 { (j as i128 - c1 as i128).signum() };
    let mut seen: Vec<usize> = Vec::new();
    let mut x = x0;
    while !seen.contains(&x) {
        seen.push(x);
        if x == c1 {
            break;
        }
        x = c.image(x);
    }
    let one = Ratio::from_integer(1i128);
    let mut sum = Ratio::from_integer(0i128);
    let mut prod = 1i128;
    let mut weight = Ratio::new(1i128, 2);
    let half = Ratio::new(1i128, 2);
    if *seen.last().unwrap() == c1 {
        for &p in &seen {
            prod *= sign(p);
            sum += weight * prod;
            weight *= half;
        }
        return Ok(sum);
    }
    let start = seen.iter().position(|&p| p == x).unwrap();
    if seen.len() > 120 {
        return Err(KneadingError::Overflow);
    }
    for &p in &seen[..start] {
        prod *= sign(p);
        sum += weight * prod;
        weight *= half;
    }
    let cycle = &seen[start..];
    let mut block = Ratio::from_integer(0i128);
    let mut cyc_prod = 1i128;
    let mut w = weight;
    for &p in cycle {
        cyc_prod *= sign(p);
        block += w * (prod * cyc_prod);
        w *= half;
    }
    // each further pass multiplies by cyc_prod / 2^period
    let ratio = Ratio::new(cyc_prod, 1i128 << cycle.len());
    Ok(sum + block / (one - ratio))
}

/// K1 and K2 of a unimodal, polynomial or co-polynomial combinatorics,
/// read off the orbits of the critical values on its -+ representative.
pub fn invariants_of_combinatorics(c: &Combinatorics) -> Result<KneadingInvariants, KneadingError> {
    let shape = c.shape()?;
    if matches!(shape, Shape::PlusMinusPlus | Shape::MinusPlusMinus) {
        return Err(KneadingError::WrongShape(shape.label().to_string()));
    }
    let o = c
        .oriented_minus_plus()
        .ok_or_else(|| KneadingError::WrongShape(shape.label().to_string()))?;
    let (jmax, jmin) = o.extreme_indices().expect("admissible");
    let k1 = -symbolic_kneading(&o, jmin, o.image(jmin))?;
    let k2 = -symbolic_kneading(&o, jmin, o.image(jmax))?;
    Ok(KneadingInvariants {
        k1: to_f64(k1),
        k2: to_f64(k2),
        exact: true,
        truncation: 0,
        k1_exact: Some(k1),
        k2_exact: Some(k2),
    })
}

/// True iff K2 strictly increases along `bone`, which must share K1.
pub fn k2_ordering_check(bone: &[Combinatorics]) -> Result<bool, KneadingError> {
    let inv = bone
        .iter()
        .map(invariants_of_combinatorics)
        .collect::<Result<Vec<_>, _>>()?;
    let Some(first) = inv.first() else {
        return Ok(true);
    };
    for (index, k) in inv.iter().enumerate() {
        if k.k1_exact != first.k1_exact {
            return Err(KneadingError::MismatchedK1 {
                first: format!("{}", first.k1),
                other: format!("{}", k.k1),
                index,
            });
        }
    }
    Ok(inv.windows(2).all(|w| w[0].k2_exact < w[1].k2_exact))
}

/// `lim_{s -> 1+} K1(F_s)`: largest K1 with zero entropy.
pub fn zero_entropy_threshold() -> f64 {
    static CACHE: OnceLock<f64> = OnceLock::new();
    *CACHE.get_or_init(|| {
        let mut prev = f64::NAN;
        for e in 4..48 {
            let s = 1.0 + 0.5f64.powi(e);
            let k = k1_of_map(&ConstantSlope { s }, 64);
            if (k - prev).abs() < 1e-15 {
                return k;
            }
            prev = k;
        }
        prev
    })
}

/// Topological entropy (nats) of a unimodal map with the given K1.
pub fn entropy_from_k1(k1: f64) -> f64 {
    if k1 >= 1.0 {
        return std::f64::consts::LN_2;
    }
    if k1 <= zero_entropy_threshold() {
        return 0.0;
    }
    let (mut lo, mut hi) = (1.0f64, 2.0f64);
    while hi.ln() - lo.ln() >= 1e-8 {
        let mid = 0.5 * (lo + hi);
        if k1_of_map(&ConstantSlope { s: mid }, 64) < k1 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (0.5 * (lo + hi)).ln()
}

// Partial products sigma(x_0)...sigma(x_h), ending with 0 if c1 is hit.
fn slope_products(s: f64, terms: usize) -> Vec<i8> {
    let f = ConstantSlope { s };
    let mut x = f.eval(0.0);
    let mut prod = 1i8;
    let mut out = Vec::with_capacity(terms);
    for _ in 0..terms {
        prod *= sigma(x, &f);
        out.push(prod);
        if prod == 0 {
            break;
        }
        x = f.eval(x);
    }
    out
}

fn symbolic_products(c: &Combinatorics, c1: usize, x0: usize, terms: usize) -> Vec<i8> {
    let mut x = x0;
    let mut prod = 1i8;
    let mut out = Vec::with_capacity(terms);
    for _ in 0..terms {
        prod *= (x as i64 - c1 as i64).signum() as i8;
        out.push(prod);
        if prod == 0 {
            break;
        }
        x = c.image(x);
    }
    out
}

/// Entropy of a unimodal combinatorics. Same bracketing as
/// `entropy_from_k1`, but `K1(F_s)` is compared with the exact kneading
/// sequence of the PL model term by term, using as many terms as the
/// floating orbit of `F_s` supports. Where `s -> K1(F_s)` is very flat the
/// 64-term `f64` comparison cannot separate nearby slopes.
pub fn entropy_of_combinatorics(c: &Combinatorics) -> Result<f64, KneadingError> {
    let inv = invariants_of_combinatorics(c)?;
    if inv.k1 >= 1.0 {
        return Ok(std::f64::consts::LN_2);
    }
    if inv.k1 <= zero_entropy_threshold() {
        return Ok(0.0);
    }
    let o = c.oriented_minus_plus().expect("checked by invariants");
    let (_, jmin) = o.extreme_indices().expect("admissible");
    let (mut lo, mut hi) = (1.0f64, 2.0f64);
    while hi.ln() - lo.ln() >= 1e-10 {
        let mid = 0.5 * (lo + hi);
        let terms = ((32.0 / mid.ln()) as usize).clamp(64, 20_000);
        let a = slope_products(mid, terms);
        let b = symbolic_products(&o, jmin, o.image(jmin), terms);
        // larger products sequence = larger k = smaller K1
        if a > b {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((0.5 * (lo + hi)).ln())
}

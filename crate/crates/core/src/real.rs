//! Scalar backends for the pullback: plain `f64` and a double-double type
//! built from error-free transformations (`mul_add` for exact products).

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Working precision of a pullback run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Precision {
    #[default]
    Double,
    /// About 31 significant digits.
    Extended,
}

impl FromStr for Precision {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "double" | "f64" => Ok(Precision::Double),
            "extended" | "double-double" | "dd" => Ok(Precision::Extended),
            other => Err(format!(
                "unknown precision `{other}` (expected double or extended)"
            )),
        }
    }
}

pub trait Real:
    Copy
    + Debug
    + PartialOrd
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// Relative resolution, used to stop bisection.
    const EPSILON: f64;

    fn from_f64(x: f64) -> Self;
    fn to_f64(self) -> f64;
    fn pi() -> Self;
    fn sin_cos(self) -> (Self, Self);
    fn atan2(self, x: Self) -> Self;
    fn sqrt(self) -> Self;

    fn zero() -> Self {
        Self::from_f64(0.0)
    }

    fn abs(self) -> Self {
        if self < Self::zero() {
            -self
        } else {
            self
        }
    }

    fn sin(self) -> Self {
        self.sin_cos().0
    }

    fn cos(self) -> Self {
        self.sin_cos().1
    }
}

impl Real for f64 {
    const EPSILON: f64 = f64::EPSILON;

    fn from_f64(x: f64) -> Self {
        x
    }
    fn to_f64(self) -> f64 {
        self
    }
    fn pi() -> Self {
        std::f64::consts::PI
    }
    fn sin_cos(self) -> (Self, Self) {
        f64::sin_cos(self)
    }
    fn atan2(self, x: Self) -> Self {
        f64::atan2(self, x)
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
}

/// Double-double scalar: an unevaluated sum `hi + lo` with `|lo| <= ulp(hi)/2`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct DoubleDouble {
    hi: f64,
    lo: f64,
}

const DD_PI: DoubleDouble = DoubleDouble {
    hi: std::f64::consts::PI,
    lo: 1.2246467991473532e-16,
};
const DD_FRAC_PI_2: DoubleDouble = DoubleDouble {
    hi: std::f64::consts::FRAC_PI_2,
    lo: 6.123233995736766e-17,
};

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl DoubleDouble {
    pub const fn new(hi: f64, lo: f64) -> Self {
        DoubleDouble { hi, lo }
    }

    pub fn hi(self) -> f64 {
        self.hi
    }

    pub fn lo(self) -> f64 {
        self.lo
    }

    fn renorm(hi: f64, lo: f64) -> Self {
        let (h, l) = quick_two_sum(hi, lo);
        DoubleDouble { hi: h, lo: l }
    }

    fn scale_f64(self, k: f64) -> Self {
        let (p, e) = two_prod(self.hi, k);
        Self::renorm(p, e + self.lo * k)
    }
}

impl Add for DoubleDouble {
    type Output = DoubleDouble;
    fn add(self, y: DoubleDouble) -> DoubleDouble {
        let (s, e) = two_sum(self.hi, y.hi);
        let (t, f) = two_sum(self.lo, y.lo);
        let (s, e) = quick_two_sum(s, e + t);
        DoubleDouble::renorm(s, e + f)
    }
}

impl Sub for DoubleDouble {
    type Output = DoubleDouble;
    fn sub(self, y: DoubleDouble) -> DoubleDouble {
        self + (-y)
    }
}

impl Mul for DoubleDouble {
    type Output = DoubleDouble;
    fn mul(self, y: DoubleDouble) -> DoubleDouble {
        let (p, e) = two_prod(self.hi, y.hi);
        DoubleDouble::renorm(p, e + (self.hi * y.lo + self.lo * y.hi))
    }
}

impl Div for DoubleDouble {
    type Output = DoubleDouble;
    fn div(self, y: DoubleDouble) -> DoubleDouble {
        let q1 = self.hi / y.hi;
        let r = self - y.scale_f64(q1);
        let q2 = r.hi / y.hi;
        let r = r - y.scale_f64(q2);
        let q3 = r.hi / y.hi;
        let (h, l) = quick_two_sum(q1, q2);
        DoubleDouble { hi: h, lo: l } + DoubleDouble::from_f64(q3)
    }
}

impl Neg for DoubleDouble {
    type Output = DoubleDouble;
    fn neg(self) -> DoubleDouble {
        DoubleDouble {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

// Taylor series on |r| <= pi/4; 16 terms reach below 1e-32.
fn dd_sin_cos_reduced(r: DoubleDouble) -> (DoubleDouble, DoubleDouble) {
    let r2 = r * r;
    let one = DoubleDouble::from_f64(1.0);
    let (mut s, mut c) = (r, one);
    let (mut ts, mut tc) = (r, one);
    for k in 1..=16 {
        let k = k as f64;
        ts = -(ts * r2) / DoubleDouble::from_f64((2.0 * k) * (2.0 * k + 1.0));
        tc = -(tc * r2) / DoubleDouble::from_f64((2.0 * k - 1.0) * (2.0 * k));
        s = s + ts;
        c = c + tc;
    }
    (s, c)
}

impl Real for DoubleDouble {
    const EPSILON: f64 = 1e-31;

    fn from_f64(x: f64) -> Self {
        DoubleDouble { hi: x, lo: 0.0 }
    }
    fn to_f64(self) -> f64 {
        self.hi + self.lo
    }
    fn pi() -> Self {
        DD_PI
    }
    fn sin_cos(self) -> (Self, Self) {
        if !self.hi.is_finite() {
            let nan = DoubleDouble::from_f64(f64::NAN);
            return (nan, nan);
        }
        let q = (self.hi / DD_FRAC_PI_2.hi).round();
        let r = self - DD_FRAC_PI_2.scale_f64(q);
        let (s, c) = dd_sin_cos_reduced(r);
        match (q as i64).rem_euclid(4) {
            0 => (s, c),
            1 => (c, -s),
            2 => (-s, -c),
            _ => (-c, s),
        }
    }
    fn atan2(self, x: Self) -> Self {
        if self.hi == 0.0 && x.hi == 0.0 {
            return DoubleDouble::from_f64(0.0f64.atan2(x.hi));
        }
        // Newton on the angle from the f64 estimate; each step doubles the digits.
        let mut a = DoubleDouble::from_f64(f64::atan2(self.hi, x.hi));
        for _ in 0..2 {
            let (s, c) = a.sin_cos();
            let num = self * c - x * s;
            let den = x * c + self * s;
            a = a + num / den;
        }
        a
    }
    fn sqrt(self) -> Self {
        if self.hi <= 0.0 {
            return DoubleDouble::from_f64(self.hi.sqrt());
        }
        let y = DoubleDouble::from_f64(self.hi.sqrt());
        y + (self - y * y) / y.scale_f64(2.0)
    }
}

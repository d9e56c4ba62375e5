//! Real quadratic rational maps in Epstein form
//! `f(x) = mu x / (x^2 + 2 kappa x + 1)`, their lift to the line through
//! `x = tan(pi t)`, and the canonical `(Sigma, Delta)` coordinates.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::real::Real;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuadError {
    #[error("critical values coincide ({0})")]
    DegenerateCriticalValues(f64),
    #[error("degenerate map: ad - bc = 0")]
    DegenerateMap,
    #[error("multiplier mu must be nonzero")]
    ZeroMultiplier,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpsteinParams {
    pub mu: f64,
    pub kappa: f64,
}

impl EpsteinParams {
    pub fn new(mu: f64, kappa: f64) -> Result<Self, QuadError> {
        if mu == 0.0 {
            return Err(QuadError::ZeroMultiplier);
        }
        Ok(EpsteinParams { mu, kappa })
    }

    /// Orientation reversal `x -> -x`.
    pub fn reversed(self) -> Self {
        EpsteinParams {
            mu: self.mu,
            kappa: -self.kappa,
        }
    }
}

/// Point of the real projective line as `x / y`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Proj {
    pub x: f64,
    pub y: f64,
}

impl Proj {
    pub const INFINITY: Proj = Proj { x: 1.0, y: 0.0 };

    pub fn finite(x: f64) -> Self {
        Proj { x, y: 1.0 }
    }

    pub fn is_infinite(self) -> bool {
        self.y == 0.0
    }

    /// Affine value; `inf` for the point at infinity.
    pub fn value(self) -> f64 {
        if self.y == 0.0 {
            f64::INFINITY
        } else {
            self.x / self.y
        }
    }

    fn det(self, other: Proj) -> f64 {
        self.x * other.y - self.y * other.x
    }
}

pub fn epstein_eval(p: EpsteinParams, x: f64) -> Proj {
    if x.is_infinite() {
        return Proj::finite(0.0);
    }
    Proj {
        x: p.mu * x,
        y: x * x + 2.0 * p.kappa * x + 1.0,
    }
}

/// `(f(-1), f(1))`.
pub fn critical_values(p: EpsteinParams) -> (Proj, Proj) {
    (
        Proj {
            x: p.mu,
            y: 2.0 * (p.kappa - 1.0),
        },
        Proj {
            x: p.mu,
            y: 2.0 * (p.kappa + 1.0),
        },
    )
}

pub fn params_from_critical_values(v1: f64, v2: f64) -> Result<EpsteinParams, QuadError> {
    if v1 == v2 {
        return Err(QuadError::DegenerateCriticalValues(v1));
    }
    let d = v1 - v2;
    EpsteinParams::new(4.0 * v1 * v2 / d, (v1 + v2) / d)
}

/// The lift `F(t) = arg(1 + kappa s + i mu s / 2) / pi`, `s = sin(2 pi t)`,
/// satisfying `tan(pi F(t)) = f(tan(pi t))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LiftedMap<R: Real = f64> {
    pub mu: R,
    pub kappa: R,
}

impl<R: Real> LiftedMap<R> {
    pub fn new(p: EpsteinParams) -> Self {
        LiftedMap {
            mu: R::from_f64(p.mu),
            kappa: R::from_f64(p.kappa),
        }
    }

    pub fn params(&self) -> EpsteinParams {
        EpsteinParams {
            mu: self.mu.to_f64(),
            kappa: self.kappa.to_f64(),
        }
    }

    pub fn eval(&self, t: R) -> R {
        let t = t - R::from_f64(t.to_f64().round());
        let two = R::from_f64(2.0);
        let s = (two * R::pi() * t).sin();
        let y = self.mu * s / two;
        let x = R::from_f64(1.0) + self.kappa * s;
        y.atan2(x) / R::pi()
    }

    /// `(F(-1/4), F(1/4))`.
    pub fn critical_values(&self) -> (R, R) {
        let q = R::from_f64(0.25);
        (self.eval(-q), self.eval(q))
    }

    /// Lifted map with `F(-1/4) = v1` and `F(1/4) = v2` modulo 1: both
    /// sides name the same points of the circle, but when `v1`, `v2` do not
    /// straddle 0 within distance 1 the lift shifts one of them by 1.
    pub fn from_critical_values(v1: R, v2: R) -> Result<Self, QuadError> {
        let pi = R::pi();
        let sd = (pi * (v1 - v2)).sin();
        if sd.abs() < R::from_f64(16.0 * R::EPSILON) {
            return Err(QuadError::DegenerateCriticalValues(v1.to_f64()));
        }
        let s1 = (pi * v1).sin();
        let s2 = (pi * v2).sin();
        let mu = R::from_f64(4.0) * s1 * s2 / sd;
        if mu == R::zero() {
            return Err(QuadError::ZeroMultiplier);
        }
        let kappa = (pi * (v1 + v2)).sin() / sd;
        Ok(LiftedMap { mu, kappa })
    }

    /// Closed image interval `F(R)`, bounded by the critical values.
    pub fn image(&self) -> (R, R) {
        let (a, b) = self.critical_values();
        if a < b {
            (a, b)
        } else {
            (b, a)
        }
    }
}

pub fn lifted_params_from_critical_values(v1: f64, v2: f64) -> Result<EpsteinParams, QuadError> {
    LiftedMap::<f64>::from_critical_values(v1, v2).map(|f| f.params())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FixedPoint {
    pub x: f64,
    pub multiplier: f64,
}

/// `mu + kappa^2 - 1`: positive with three real fixed points, negative with one.
pub fn discriminant(p: EpsteinParams) -> f64 {
    p.mu + p.kappa * p.kappa - 1.0
}

/// Real fixed points; a double root is listed once.
pub fn fixed_points(p: EpsteinParams) -> Vec<FixedPoint> {
    let mut out = vec![FixedPoint {
        x: 0.0,
        multiplier: p.mu,
    }];
    let d = discriminant(p);
    if d >= 0.0 {
        let r = d.sqrt();
        let roots = if d == 0.0 {
            vec![-p.kappa]
        } else {
            vec![-p.kappa - r, -p.kappa + r]
        };
        for x in roots {
            // at a fixed point x^2 + 2 kappa x + 1 = mu
            out.push(FixedPoint {
                x,
                multiplier: (1.0 - x * x) / p.mu,
            });
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CanonicalCoords {
    pub sigma: f64,
    pub delta: f64,
    #[serde(skip)]
    pub theta: f64,
    #[serde(skip)]
    pub eta: f64,
}

fn reduce_sigma(s: f64) -> f64 {
    let mut s = s % 2.0;
    if s <= -1.0 {
        s += 2.0;
    } else if s > 1.0 {
        s -= 2.0;
    }
    s
}

/// Distance between two values of Sigma on the circle R/2Z.
pub fn sigma_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(2.0);
    d.min(2.0 - d)
}

/// Canonical coordinates of `x -> (a x^2 + b) / (c x^2 + d)`.
pub fn canonical_form(a: f64, b: f64, c: f64, d: f64) -> Result<CanonicalCoords, QuadError> {
    let det = a * d - b * c;
    if det == 0.0 || !det.is_finite() {
        return Err(QuadError::DegenerateMap);
    }
    let (a, b, c, d) = if det < 0.0 {
        (-d, -c, b, a)
    } else {
        (a, b, c, d)
    };
    // g(u) = u^3 c^2 + u^2 a^2 - u d^2 - b^2 with u = lambda^2, increasing in u > 0
    let g = |lam: f64| {
        let l2 = lam * lam;
        lam.powi(3) * c * c + lam * a * a - d * d / lam - b * b / (lam * l2)
    };
    let (mut lo, mut hi) = (1.0f64, 1.0f64);
    if g(1.0) < 0.0 {
        while g(hi) < 0.0 {
            hi *= 2.0;
        }
        lo = hi / 2.0;
    } else {
        while g(lo) > 0.0 {
            lo /= 2.0;
        }
        hi = lo * 2.0;
    }
    while (hi - lo) > 1e-15 * hi {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let lam = 0.5 * (lo + hi);
    let big_a = lam * lam * a;
    let big_b = b;
    let big_c = lam.powi(3) * c;
    let big_d = lam * d;
    let mut theta = big_a.atan2(big_c) / PI;
    let eta = big_b.atan2(big_d) / PI;
    // sin(pi (theta - eta)) has the sign of AD - BC > 0
    while theta - eta <= 0.0 {
        theta += 2.0;
    }
    while theta - eta >= 2.0 {
        theta -= 2.0;
    }
    let delta = theta - eta;
    Ok(CanonicalCoords {
        sigma: reduce_sigma(theta + eta),
        delta,
        theta,
        eta,
    })
}

/// Conjugates by `L(x) = (1 + x) / (1 - x)` and reads off the canonical form.
pub fn sigma_delta(p: EpsteinParams) -> Result<CanonicalCoords, QuadError> {
    if p.mu == 0.0 {
        return Err(QuadError::ZeroMultiplier);
    }
    let pp = 2.0 * (1.0 + p.kappa);
    let qq = 2.0 * (1.0 - p.kappa);
    canonical_form(pp + p.mu, qq - p.mu, pp - p.mu, qq + p.mu)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AsymptoticEntry {
    pub mu: f64,
    pub sigma: f64,
    pub delta: f64,
    /// `(sign(mu)/2 - Sigma) / (1 - Delta)`, compared against `-kappa`.
    /// Numerically this tends to `-kappa` as `mu -> -inf` but to `+kappa`
    /// as `mu -> +inf`.
    pub ratio: f64,
    /// `|mu| (1 - Delta)`, which tends to `4 / pi`.
    pub product: f64,
    pub ratio_near_target: bool,
    pub product_near_target: bool,
}

pub fn asymptotic_check(kappa: f64, mus: &[f64]) -> Result<Vec<AsymptoticEntry>, QuadError> {
    let target = 4.0 / PI;
    mus.iter()
        .map(|&mu| {
            let cc = sigma_delta(EpsteinParams::new(mu, kappa)?)?;
            let half = if mu > 0.0 { 0.5 } else { -0.5 };
            let gap = 1.0 - cc.delta;
            let ratio = (half - cc.sigma) / gap;
            let product = mu.abs() * gap;
            let ratio_tol = if kappa == 0.0 {
                0.02
            } else {
                0.02 * kappa.abs()
            };
            Ok(AsymptoticEntry {
                mu,
                sigma: cc.sigma,
                delta: cc.delta,
                ratio,
                product,
                ratio_near_target: (ratio + kappa).abs() <= ratio_tol,
                product_near_target: (product - target).abs() <= 0.01 * target,
            })
        })
        .collect()
}

/// `(c1 - v1)(c2 - v2) / ((c1 - c2)(v1 - v2))`, evaluated projectively.
/// With this formula polynomial-like maps (`c_i = v_i`) give 0 and
/// co-polynomial ones (`v1 = c2`) give 1.
pub fn cross_ratio(c1: Proj, c2: Proj, v1: Proj, v2: Proj) -> f64 {
    c1.det(v1) * c2.det(v2) / (c1.det(c2) * v1.det(v2))
}

/// Cross-ratio of an Epstein map with critical points `-1`, `1`.
pub fn map_cross_ratio(p: EpsteinParams) -> f64 {
    let (v1, v2) = critical_values(p);
    cross_ratio(Proj::finite(-1.0), Proj::finite(1.0), v1, v2)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ShiftLocus {
    HyperbolicShift,
    ParabolicShiftBoundary,
    ChebyshevBoundary,
    Outside,
}

pub fn shift_locus_membership(p: EpsteinParams) -> ShiftLocus {
    let k = p.kappa.abs();
    if p.mu > 1.0 && k > 1.0 {
        ShiftLocus::HyperbolicShift
    } else if p.mu == 1.0 && k > 1.0 {
        ShiftLocus::ParabolicShiftBoundary
    } else if k == 1.0 && p.mu >= 1.0 {
        ShiftLocus::ChebyshevBoundary
    } else {
        ShiftLocus::Outside
    }
}

/// Parameter `c` of `x -> x^2 - c` conjugate to `mu x (1 - x)`.
pub fn logistic_mu_to_c(mu: f64) -> f64 {
    mu * mu / 4.0 - mu / 2.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::real::DoubleDouble;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ep(mu: f64, kappa: f64) -> EpsteinParams {
        EpsteinParams::new(mu, kappa).unwrap()
    }

    #[test]
    fn epstein_examples() {
        assert_eq!(epstein_eval(ep(-2.0, 0.0), 1.0).value(), -1.0);
        assert_eq!(epstein_eval(ep(-2.0, 0.0), -1.0).value(), 1.0);
        assert!(epstein_eval(ep(1.0, 1.0), -1.0).is_infinite());
        let (v1, v2) = critical_values(ep(-2.0, 0.0));
        assert_eq!((v1.value(), v2.value()), (1.0, -1.0));
        assert_eq!(
            params_from_critical_values(1.0, -1.0).unwrap(),
            ep(-2.0, 0.0)
        );
        assert!(params_from_critical_values(0.3, 0.3).is_err());
    }

    #[test]
    fn symmetry_and_round_trip_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let p = ep(rng.gen_range(-20.0..20.0), rng.gen_range(-5.0..5.0));
            let x: f64 = rng.gen_range(-10.0..10.0);
            if x.abs() < 1e-3 {
                continue;
            }
            let a = epstein_eval(p, x).value();
            let b = epstein_eval(p, 1.0 / x).value();
            assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0), "{p:?} {x}");
            let (v1, v2) = critical_values(p);
            if !v1.is_infinite() && !v2.is_infinite() && v1.value() != v2.value() {
                let q = params_from_critical_values(v1.value(), v2.value()).unwrap();
                assert!((q.mu - p.mu).abs() < 1e-10 * p.mu.abs().max(1.0));
                assert!((q.kappa - p.kappa).abs() < 1e-10 * p.kappa.abs().max(1.0));
            }
        }
    }

    #[test]
    fn lifted_examples() {
        let f = LiftedMap::<f64>::new(ep(-2.0, 0.0));
        assert_eq!(f.eval(0.0), 0.0);
        assert!((f.eval(0.25) + 0.25).abs() < 1e-15);
        assert!((f.eval(-0.25) - 0.25).abs() < 1e-15);
        let p = lifted_params_from_critical_values(0.25, -0.25).unwrap();
        assert!((p.mu + 2.0).abs() < 1e-14 && p.kappa.abs() < 1e-14);
        assert!(lifted_params_from_critical_values(0.1, 0.1).is_err());
        assert!(lifted_params_from_critical_values(0.1, 1.1).is_err());
        // (0.6, -0.6) names the same circle points as (-0.4, 0.4)
        let f = LiftedMap::<f64>::from_critical_values(0.6, -0.6).unwrap();
        let (w1, w2) = f.critical_values();
        assert!(
            (w1 + 0.4).abs() < 1e-14 && (w2 - 0.4).abs() < 1e-14,
            "{w1} {w2}"
        );
    }

    #[test]
    fn lifted_conjugacy_and_range() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..300 {
            let p = ep(rng.gen_range(-10.0..10.0), rng.gen_range(-3.0..3.0));
            let f = LiftedMap::<f64>::new(p);
            for i in 0..200 {
                let t = -1.0 + i as f64 / 100.0 + 1e-7;
                let ft = f.eval(t);
                let (v1, v2) = f.critical_values();
                let (lo, hi) = (v1.min(v2), v1.max(v2));
                assert!(hi - lo < 1.0);
                assert!(ft >= lo - 1e-12 && ft <= hi + 1e-12, "{p:?} t={t} F={ft}");
                if lo > -0.75 && hi < 0.75 {
                    assert!(ft > -0.75 && ft < 0.75);
                }
                assert!((f.eval(t + 1.0) - ft).abs() < 1e-12);
                let x = (PI * t).tan();
                let fx = epstein_eval(p, x).value();
                let lhs = (PI * ft).tan();
                if x.abs() < 1e6 && fx.abs() < 1e6 {
                    assert!((lhs - fx).abs() < 1e-9 * fx.abs().max(1.0), "{p:?} t={t}");
                }
            }
            // round trip through lifted critical values
            let (v1, v2) = f.critical_values();
            if (v1 - v2).abs() > 1e-6 {
                let g = LiftedMap::<f64>::from_critical_values(v1, v2).unwrap();
                let (w1, w2) = g.critical_values();
                assert!((w1 - v1).abs() < 1e-12 && (w2 - v2).abs() < 1e-12, "{p:?}");
            }
        }
    }

    #[test]
    fn lifted_monotone_on_thirds() {
        let f = LiftedMap::<f64>::new(ep(3.5, -0.7));
        for (a, b) in [(-0.75, -0.25), (-0.25, 0.25), (0.25, 0.75)] {
            let vals: Vec<f64> = (1..100)
                .map(|i| f.eval(a + (b - a) * i as f64 / 100.0))
                .collect();
            let inc = vals.windows(2).all(|w| w[1] > w[0]);
            let dec = vals.windows(2).all(|w| w[1] < w[0]);
            assert!(inc || dec);
        }
    }

    #[test]
    fn lifted_extended_matches_double() {
        let f64map = LiftedMap::<f64>::new(ep(-7.2407034, 1.097305));
        let ddmap = LiftedMap::<DoubleDouble>::new(ep(-7.2407034, 1.097305));
        for i in 0..50 {
            let t = -0.7 + i as f64 * 0.028;
            let a = f64map.eval(t);
            let b = ddmap.eval(DoubleDouble::from_f64(t)).to_f64();
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn fixed_point_examples() {
        let fp = fixed_points(ep(-2.0, 0.0));
        assert_eq!(fp.len(), 1);
        assert_eq!(discriminant(ep(-2.0, 0.0)), -3.0);
        let fp = fixed_points(ep(1.0, 0.0));
        assert_eq!(discriminant(ep(1.0, 0.0)), 0.0);
        assert_eq!(fp.len(), 2);
        assert!((fp[1].multiplier - 1.0).abs() < 1e-15);
    }

    #[test]
    fn multiplier_identity_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut count = 0;
        while count < 1000 {
            let p = ep(rng.gen_range(-10.0..10.0), rng.gen_range(-4.0..4.0));
            if discriminant(p) <= 1e-3 {
                continue;
            }
            let fp = fixed_points(p);
            assert_eq!(fp.len(), 3);
            let (m1, m2, m3) = (fp[0].multiplier, fp[1].multiplier, fp[2].multiplier);
            if (1.0 - m1 * m2).abs() < 1e-3 {
                continue;
            }
            let pred = (2.0 - m1 - m2) / (1.0 - m1 * m2);
            assert!((pred - m3).abs() < 1e-10 * m3.abs().max(1.0), "{p:?}");
            for f in &fp {
                assert!((epstein_eval(p, f.x).value() - f.x).abs() < 1e-9 * f.x.abs().max(1.0));
            }
            count += 1;
        }
    }

    #[test]
    fn canonical_examples() {
        let cc = canonical_form(1.0, 0.0, 0.0, 1.0).unwrap();
        assert!((cc.theta - 0.5).abs() < 1e-15 && cc.eta.abs() < 1e-15);
        assert!((cc.sigma - 0.5).abs() < 1e-15 && (cc.delta - 0.5).abs() < 1e-15);
        assert!(matches!(
            canonical_form(1.0, 1.0, 1.0, 1.0),
            Err(QuadError::DegenerateMap)
        ));
        let cc = sigma_delta(ep(-2.0, 0.0)).unwrap();
        assert!((cc.sigma + 0.5).abs() < 1e-12 && (cc.delta - 0.5).abs() < 1e-12);
        let cc = sigma_delta(ep(-7.2407034, 1.097305)).unwrap();
        assert!((cc.sigma + 0.338652).abs() < 1e-5, "{cc:?}");
        // the printed Delta of this row sits 1.7e-5 from its printed (mu, kappa)
        assert!((cc.delta - 0.836756).abs() < 2e-5, "{cc:?}");
        let cc = sigma_delta(ep(-2.0, -2f64.sqrt())).unwrap();
        assert!(sigma_distance(cc.sigma, 1.0) < 1e-5, "{cc:?}");
        assert!((cc.delta - 0.635940).abs() < 1e-5, "{cc:?}");
        let json = serde_json::to_string(&sigma_delta(ep(-2.0, 0.0)).unwrap()).unwrap();
        assert!(json.starts_with("{\"sigma\":") && !json.contains("theta"));
    }

    #[test]
    fn canonical_normalization_holds() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..500 {
            let (a, b, c, d): (f64, f64, f64, f64) = (
                rng.gen_range(-5.0..5.0),
                rng.gen_range(-5.0..5.0),
                rng.gen_range(-5.0..5.0),
                rng.gen_range(-5.0..5.0),
            );
            if (a * d - b * c).abs() < 1e-3 {
                continue;
            }
            let cc = canonical_form(a, b, c, d).unwrap();
            assert!(cc.delta > 0.0 && cc.delta < 1.0);
            assert!(cc.sigma > -1.0 && cc.sigma <= 1.0);
            // scaling all coefficients is the same map
            let cs = canonical_form(3.0 * a, 3.0 * b, 3.0 * c, 3.0 * d).unwrap();
            assert!(
                sigma_distance(cc.sigma, cs.sigma) < 1e-9 && (cc.delta - cs.delta).abs() < 1e-9
            );
            // conjugating by x -> k x leaves the invariants unchanged:
            // (a x^2 + b)/(c x^2 + d) becomes (a k x^2 + b/k)/(c k^2 x^2 + d)
            let k = rng.gen_range(0.2..5.0);
            let ck = canonical_form(a * k, b / k, c * k * k, d).unwrap();
            assert!(
                sigma_distance(cc.sigma, ck.sigma) < 1e-9,
                "{a} {b} {c} {d} {k}"
            );
            assert!((cc.delta - ck.delta).abs() < 1e-9);
        }
    }

    #[test]
    fn conjugation_formula_is_l_f_l_inverse() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..200 {
            let p = ep(rng.gen_range(-6.0..6.0), rng.gen_range(-3.0..3.0));
            let (pp, qq) = (2.0 * (1.0 + p.kappa), 2.0 * (1.0 - p.kappa));
            let (a, b, c, d) = (pp + p.mu, qq - p.mu, pp - p.mu, qq + p.mu);
            let y: f64 = rng.gen_range(-4.0..4.0);
            let x = (y - 1.0) / (y + 1.0);
            let fx = epstein_eval(p, x).value();
            let lhs = (1.0 + fx) / (1.0 - fx);
            let rhs = (a * y * y + b) / (c * y * y + d);
            if lhs.abs() < 1e6 {
                assert!((lhs - rhs).abs() < 1e-7 * lhs.abs().max(1.0));
            }
        }
    }

    #[test]
    fn reversal_preserves_delta() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..500 {
            let p = ep(rng.gen_range(-9.0..9.0), rng.gen_range(-3.0..3.0));
            let a = sigma_delta(p).unwrap();
            let b = sigma_delta(p.reversed()).unwrap();
            assert!((a.delta - b.delta).abs() < 1e-10, "{p:?}");
            let plus = sigma_distance(b.sigma, 1.0 - a.sigma);
            let minus = sigma_distance(b.sigma, -1.0 - a.sigma);
            assert!(plus.min(minus) < 1e-9, "{p:?} {a:?} {b:?}");
        }
    }

    #[test]
    fn table_rows_consistent() {
        // (mu, kappa, Sigma, Delta) rows whose printed values agree to 1e-6
        let rows = [
            (-1.270048, -1.351520, 0.893946, 0.561904),
            (-4.0, 1.0, -0.271699, 0.728301),
            (-2.594313, -1.637869, 1.0, 0.712071),
            (-4.0, -1.0, -0.728301, 0.728301),
            (-256.3050, -1.494245, -0.507393, 0.995033),
            (3.498562, 0.749281, 0.258130, 0.741869),
            (-5.538584, 1.769292, -0.182973, 0.817027),
            (3.890875, 0.945437, 0.223012, 0.776988),
            (3.236068, -0.618034, 0.712071, 0.712071),
            (-4.649436, -1.324718, -0.772304, 0.772304),
            (3.831874, -0.915937, 0.772304, 0.772304),
            (-18.46037, -1.433732, -0.592613, 0.932596),
            (-25.104560, -3.261693, -0.655923, 0.952150),
            (-1.295598, -1.191488, 1.0, 0.5),
            (-8.401378, 0.770864, -0.399338, 0.854152),
        ];
        for (mu, kappa, s, d) in rows {
            let cc = sigma_delta(ep(mu, kappa)).unwrap();
            assert!(sigma_distance(cc.sigma, s) < 2e-6, "{mu} {kappa} {cc:?}");
            assert!((cc.delta - d).abs() < 2e-6, "{mu} {kappa} {cc:?}");
        }
        // Delta agrees; the printed Sigma -0.892232 has its digits transposed
        let cc = sigma_delta(ep(-4.0 / 3.0, -1.0)).unwrap();
        assert!((cc.delta - 0.455511).abs() < 1e-6);
        assert!((cc.sigma + 0.892923).abs() < 1e-6);
    }

    #[test]
    fn asymptotics() {
        let r = asymptotic_check(0.5, &[1e2, 1e3, 1e4]).unwrap();
        let last = r.last().unwrap();
        assert!(last.product_near_target, "{last:?}");
        assert!((last.product - 4.0 / PI).abs() < 0.01 * 4.0 / PI);
        // mu -> +inf: the ratio tends to +kappa
        assert!((last.ratio - 0.5).abs() < 0.02 * 0.5, "{last:?}");
        assert!(!last.ratio_near_target);
        let neg = asymptotic_check(-1.494, &[-1e4]).unwrap()[0];
        assert!(neg.ratio_near_target && neg.product_near_target, "{neg:?}");
        for mu in [1e5, -1e5] {
            let e = asymptotic_check(0.0, &[mu]).unwrap()[0];
            assert!((e.sigma - 0.5 * mu.signum()).abs() < 1e-4);
            assert!(e.delta > 0.9999);
        }
    }

    #[test]
    fn cross_ratio_examples() {
        let rho = map_cross_ratio(ep(-1.295598, -1.191488));
        assert!(rho > 0.0 && rho < 1.0, "{rho}");
        let poly = cross_ratio(
            Proj::finite(-1.0),
            Proj::finite(0.0),
            Proj::finite(-1.0 / 3.0),
            Proj::finite(0.0),
        );
        assert_eq!(poly, 0.0);
        assert!((map_cross_ratio(ep(-2.0, 0.0)) - 1.0).abs() < 1e-15);
        // a point at infinity: kappa = 1 sends v1 to infinity
        let rho = map_cross_ratio(ep(3.0, 1.0));
        assert!(rho.is_finite());
    }

    #[test]
    fn shift_locus_examples() {
        assert_eq!(
            shift_locus_membership(ep(2.0, 1.5)),
            ShiftLocus::HyperbolicShift
        );
        assert_eq!(
            shift_locus_membership(ep(1.0, 2.0)),
            ShiftLocus::ParabolicShiftBoundary
        );
        assert_eq!(shift_locus_membership(ep(-2.0, 0.0)), ShiftLocus::Outside);
        assert_eq!(
            shift_locus_membership(ep(3.0, -1.0)),
            ShiftLocus::ChebyshevBoundary
        );
    }

    #[test]
    fn logistic_examples() {
        assert!((logistic_mu_to_c(3.236068) - 1.0).abs() < 1e-6);
        assert!((logistic_mu_to_c(3.831874) - 1.754878).abs() < 1e-6);
        assert_eq!(logistic_mu_to_c(2.0), 0.0);
    }

    proptest! {
        #[test]
        fn prop_lifted_roundtrip_mod_one(v1 in -0.74f64..0.74, v2 in -0.74f64..0.74) {
            prop_assume!((v1 - v2).abs() > 1e-3 && (v1 - v2).abs() < 0.999 && v1.abs() > 1e-3 && v2.abs() > 1e-3);
            let f = LiftedMap::<f64>::from_critical_values(v1, v2).unwrap();
            let (w1, w2) = f.critical_values();
            let frac = |x: f64| { let d = x.rem_euclid(1.0); d.min(1.0 - d) };
            prop_assert!(frac(w1 - v1) < 1e-12 && frac(w2 - v2) < 1e-12);
            let (lo, hi) = f.image();
            prop_assert!(hi - lo < 1.0 && lo <= 0.0 && hi >= 0.0);
        }

        #[test]
        fn prop_lifted_roundtrip_dd(v1 in -0.74f64..-0.01, v2 in 0.01f64..0.74) {
            prop_assume!(v2 - v1 < 0.99);
            let f = LiftedMap::<DoubleDouble>::from_critical_values(
                DoubleDouble::from_f64(v1), DoubleDouble::from_f64(v2)).unwrap();
            let (w1, w2) = f.critical_values();
            prop_assert!((w1.to_f64() - v1).abs() < 1e-14);
            prop_assert!((w2.to_f64() - v2).abs() < 1e-14);
        }
    }
}

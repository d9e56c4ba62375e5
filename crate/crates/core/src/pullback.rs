//! Thurston pullback on the lifted family: marked points `t_0 < ... < t_n`
//! in `(-3/4, 3/4)` are pulled back through the map whose critical values
//! are the current images `w_j = t_{m_j}`.

use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;

use crate::combinatorics::{Combinatorics, CombinatoricsError};
use crate::quadmap::{
    shift_locus_membership, sigma_delta, sigma_distance, CanonicalCoords, EpsteinParams, LiftedMap,
    QuadError, ShiftLocus,
};
use crate::real::{DoubleDouble, Precision, Real};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PullbackError {
    #[error(transparent)]
    Combinatorics(#[from] CombinatoricsError),
    #[error("invalid explicit start: {0}")]
    InvalidExplicitState(String),
    #[error("no fixed point between the critical indices of {0}")]
    NoFixedPointPair(Combinatorics),
    #[error("target {target} lies outside the image [{lo}, {hi}]")]
    TargetOutsideImage { target: f64, lo: f64, hi: f64 },
    #[error("marked points {index} and {} crossed at step {step}", index + 1)]
    OrderViolation { step: usize, index: usize },
    #[error(transparent)]
    Quad(#[from] QuadError),
    #[error("normal-form parameter v = {0} is outside (-1, 0)")]
    InvalidNormalForm(f64),
}

/// One of `I_1 = (-3/4, -1/4)`, `I_2 = (-1/4, 1/4)`, `I_3 = (1/4, 3/4)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Tag {
    I1,
    I2,
    I3,
}

impl Tag {
    pub fn bounds(self) -> (f64, f64) {
        match self {
            Tag::I1 => (-0.75, -0.25),
            Tag::I2 => (-0.25, 0.25),
            Tag::I3 => (0.25, 0.75),
        }
    }
}

/// Where the fixed point between the critical points sits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FixedPin {
    /// `m_p = p`, pinned at `t_p = 0`.
    Point(usize),
    /// `t_{p'} < 0 < t_{p''}` for consecutive `p' < p''`.
    Straddle(usize, usize),
}

/// Combinatorial data of the pullback, fixed at init.
#[derive(Debug, Clone, PartialEq)]
pub struct Layout {
    pub c: Combinatorics,
    pub j_minus: usize,
    pub j_plus: usize,
    pub fixed: FixedPin,
    pub tags: Vec<Tag>,
}

impl Layout {
    pub fn new(c: &Combinatorics) -> Result<Self, PullbackError> {
        c.require_admissible()?;
        let (j_minus, j_plus) = c
            .critical_indices()
            .expect("admissible has unique extremes");
        let m = c.entries();
        let d = |j: usize| m[j] as i64 - j as i64;
        let fixed = if let Some(p) = (j_minus + 1..j_plus).find(|&p| d(p) == 0) {
            FixedPin::Point(p)
        } else {
            let pairs: Vec<usize> = (j_minus..j_plus).collect();
            let strict = pairs.iter().find(|&&p| d(p) * d(p + 1) < 0);
            // a critical fixed point (polynomial case) gives a zero difference
            let weak = pairs.iter().find(|&&p| d(p) * d(p + 1) <= 0);
            match strict.or(weak) {
                Some(&p) => FixedPin::Straddle(p, p + 1),
                None => return Err(PullbackError::NoFixedPointPair(c.clone())),
            }
        };
        let tags = (0..=c.n())
            .map(|j| {
                if j < j_minus {
                    Tag::I1
                } else if j <= j_plus {
                    Tag::I2
                } else {
                    Tag::I3
                }
            })
            .collect();
        Ok(Layout {
            c: c.clone(),
            j_minus,
            j_plus,
            fixed,
            tags,
        })
    }

    pub fn n(&self) -> usize {
        self.c.n()
    }

    /// Critical indices and a pinned fixed point keep their positions.
    pub fn is_pinned(&self, j: usize) -> bool {
        j == self.j_minus || j == self.j_plus || self.fixed == FixedPin::Point(j)
    }

    /// Checks D-Xm (a)-(c) and the tags.
    pub fn check_state(&self, t: &[f64]) -> Result<(), String> {
        let n = self.n();
        if t.len() != n + 1 {
            return Err(format!("expected {} entries, got {}", n + 1, t.len()));
        }
        if t.iter().any(|x| !x.is_finite()) {
            return Err("non-finite entry".into());
        }
        if !(t[0] > -0.75 && t[n] < 0.75) {
            return Err("entries must lie in (-3/4, 3/4)".into());
        }
        if let Some(j) = (0..n).find(|&j| t[j] >= t[j + 1]) {
            return Err(format!("t_{j} >= t_{}", j + 1));
        }
        // x_n and x_0 are neighbours on the circle
        if t[n] - t[0] >= 1.0 {
            return Err("t_n - t_0 must be below 1".into());
        }
        if t[self.j_minus] != -0.25 || t[self.j_plus] != 0.25 {
            return Err(format!(
                "critical points t_{} and t_{} must be -1/4 and 1/4",
                self.j_minus, self.j_plus
            ));
        }
        match self.fixed {
            FixedPin::Point(p) if t[p] != 0.0 => {
                return Err(format!("fixed point t_{p} must be 0"))
            }
            FixedPin::Straddle(a, b) if !(t[a] < 0.0 && 0.0 < t[b]) => {
                return Err(format!("need t_{a} < 0 < t_{b}"))
            }
            _ => {}
        }
        Ok(())
    }

    /// A random valid start: every free point is drawn inside its segment
    /// from `uniform`, which must return values in `[0, 1)`.
    pub fn random_start(&self, mut uniform: impl FnMut() -> f64) -> Vec<f64> {
        let n = self.n();
        let (jm, jp) = (self.j_minus, self.j_plus);
        let mut t = self.equally_spaced();
        let mut sorted = |k: usize, a: f64, b: f64| {
            let mut xs: Vec<f64> = (0..k).map(|_| a + (b - a) * uniform()).collect();
            xs.sort_by(f64::total_cmp);
            xs
        };
        let outer: Vec<usize> = (jp + 1..=n).chain(0..jm).collect();
        for (&j, x) in outer.iter().zip(sorted(outer.len(), 0.25, 0.75)) {
            t[j] = if j < jm { x - 1.0 } else { x };
        }
        let (left, right) = match self.fixed {
            FixedPin::Point(p) => (jm + 1..p, p + 1..jp),
            FixedPin::Straddle(a, b) => (jm + 1..a + 1, b..jp),
        };
        for (j, x) in left.clone().zip(sorted(left.len(), -0.25, 0.0)) {
            t[j] = x;
        }
        for (j, x) in right.clone().zip(sorted(right.len(), 0.0, 0.25)) {
            t[j] = x;
        }
        t
    }

    /// Critical points at `-+1/4`, a pinned fixed point at 0, and the other
    /// points equally spaced inside their segments. Points of `I_3` and `I_1`
    /// share one half-circle and are spaced along it together.
    pub fn equally_spaced(&self) -> Vec<f64> {
        let n = self.n();
        let mut t = vec![0.0; n + 1];
        let mut fill = |range: std::ops::Range<usize>, a: f64, b: f64| {
            let k = range.len();
            for (i, j) in range.enumerate() {
                t[j] = a + (b - a) * (i + 1) as f64 / (k + 1) as f64;
            }
        };
        let (jm, jp) = (self.j_minus, self.j_plus);
        match self.fixed {
            FixedPin::Point(p) => {
                fill(jm + 1..p, -0.25, 0.0);
                fill(p + 1..jp, 0.0, 0.25);
            }
            FixedPin::Straddle(a, b) => {
                fill(jm + 1..a + 1, -0.25, 0.0);
                fill(b..jp, 0.0, 0.25);
            }
        }
        let outer = (n - jp) + jm;
        for (i, j) in (jp + 1..=n).chain(0..jm).enumerate() {
            let x = 0.25 + 0.5 * (i + 1) as f64 / (outer + 1) as f64;
            t[j] = if j < jm { x - 1.0 } else { x };
        }
        t[jm] = -0.25;
        t[jp] = 0.25;
        if let FixedPin::Point(p) = self.fixed {
            t[p] = 0.0;
        }
        t
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum InitStrategy {
    EquallySpaced,
    Explicit(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct MarkedState<R: Real = f64> {
    pub t: Vec<R>,
    /// `w_j = t_{m_j}`: the values the next map must hit.
    pub w: Vec<R>,
    pub step: usize,
    /// The map `F_step` (at step 0, the map the first step will use).
    pub params: EpsteinParams,
}

impl<R: Real> MarkedState<R> {
    pub fn t_f64(&self) -> Vec<f64> {
        self.t.iter().map(|x| x.to_f64()).collect()
    }
}

fn images<R: Real>(layout: &Layout, t: &[R]) -> Vec<R> {
    layout.c.entries().iter().map(|&k| t[k]).collect()
}

fn map_for<R: Real>(layout: &Layout, w: &[R]) -> Result<LiftedMap<R>, PullbackError> {
    Ok(LiftedMap::from_critical_values(
        w[layout.j_minus],
        w[layout.j_plus],
    )?)
}

pub fn init_state_with<R: Real>(
    layout: &Layout,
    strategy: &InitStrategy,
) -> Result<MarkedState<R>, PullbackError> {
    let t = match strategy {
        InitStrategy::EquallySpaced => layout.equally_spaced(),
        InitStrategy::Explicit(t) => {
            layout
                .check_state(t)
                .map_err(PullbackError::InvalidExplicitState)?;
            t.clone()
        }
    };
    let t: Vec<R> = t.into_iter().map(R::from_f64).collect();
    let w = images(layout, &t);
    let params = map_for(layout, &w)?.params();
    Ok(MarkedState {
        t,
        w,
        step: 0,
        params,
    })
}

pub fn init_state(c: &Combinatorics, strategy: InitStrategy) -> Result<MarkedState, PullbackError> {
    init_state_with(&Layout::new(c)?, &strategy)
}

/// The unique `t` in `I_tag` with `F(t)` equal to `target` modulo 1.
pub fn solve_branch<R: Real>(f: &LiftedMap<R>, target: R, tag: Tag) -> Result<R, PullbackError> {
    let (a0, b0) = tag.bounds();
    let (mut a, mut b) = (R::from_f64(a0), R::from_f64(b0));
    let (fa, fb) = (f.eval(a), f.eval(b));
    let (lo, hi) = if fa < fb { (fa, fb) } else { (fb, fa) };
    let one = R::from_f64(1.0);
    let slack = R::from_f64(64.0 * R::EPSILON);
    let mut y = target;
    while y > hi + slack {
        y = y - one;
    }
    while y < lo - slack {
        y = y + one;
    }
    if y > hi + slack {
        return Err(PullbackError::TargetOutsideImage {
            target: target.to_f64(),
            lo: lo.to_f64(),
            hi: hi.to_f64(),
        });
    }
    if y <= lo {
        return Ok(if fa < fb { a } else { b });
    }
    if y >= hi {
        return Ok(if fa < fb { b } else { a });
    }
    let increasing = fa < fb;
    let tol = R::from_f64(if R::EPSILON < 1e-20 { 1e-28 } else { 1e-15 });
    let half = R::from_f64(0.5);
    loop {
        let mid = (a + b) * half;
        if b - a <= tol || mid <= a || mid >= b {
            return Ok(mid);
        }
        let fm = f.eval(mid);
        if fm == y {
            return Ok(mid);
        }
        if (fm < y) == increasing {
            a = mid;
        } else {
            b = mid;
        }
    }
}

/// One pullback step: build `F` from the critical values of `w`, then pull
/// every non-pinned point back along its own branch.
pub fn step_with<R: Real>(
    layout: &Layout,
    state: &MarkedState<R>,
) -> Result<MarkedState<R>, PullbackError> {
    let f = map_for(layout, &state.w)?;
    let mut t = state.t.clone();
    for (j, tj) in t.iter_mut().enumerate() {
        if !layout.is_pinned(j) {
            *tj = solve_branch(&f, state.w[j], layout.tags[j])?;
        }
    }
    let step = state.step + 1;
    if let Some(index) = (0..layout.n()).find(|&j| t[j] >= t[j + 1]) {
        return Err(PullbackError::OrderViolation { step, index });
    }
    let w = images(layout, &t);
    Ok(MarkedState {
        t,
        w,
        step,
        params: f.params(),
    })
}

pub fn step(state: &MarkedState, c: &Combinatorics) -> Result<MarkedState, PullbackError> {
    step_with(&Layout::new(c)?, state)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PullbackConfig {
    pub max_iter: usize,
    pub tol_conv: f64,
    pub tol_sigma_delta: f64,
    pub mu_blowup: f64,
    pub gap_min: f64,
    pub precision: Precision,
}

impl Default for PullbackConfig {
    fn default() -> Self {
        PullbackConfig {
            max_iter: 10_000,
            tol_conv: 1e-9,
            tol_sigma_delta: 1e-7,
            mu_blowup: 1e7,
            gap_min: 1e-12,
            precision: Precision::Double,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Converged,
    WeaklyObstructed,
    StronglyObstructed,
    ExceptionalTwoCycle,
    MaxIterations,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrajectoryPoint {
    pub step: usize,
    pub mu: f64,
    pub kappa: f64,
    pub sigma: f64,
    pub delta: f64,
    pub shift_locus: ShiftLocus,
    pub t: Vec<f64>,
}

fn ser_sign<S: Serializer>(v: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(x) if *x > 0.0 => s.serialize_str("+inf"),
        Some(_) => s.serialize_str("-inf"),
        None => s.serialize_none(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PullbackOutcome {
    pub combinatorics: Combinatorics,
    pub verdict: Verdict,
    #[serde(rename = "final")]
    pub final_params: EpsteinParams,
    pub coords: Option<CanonicalCoords>,
    pub iterations: usize,
    /// Marked points of the last accepted state.
    pub t: Vec<f64>,
    /// Strong obstruction: the sign of the divergence of `mu`.
    #[serde(serialize_with = "ser_sign")]
    pub mu_limit: Option<f64>,
    pub simplified: Option<Combinatorics>,
    pub cycle_pair: Option<[EpsteinParams; 2]>,
    /// Two-cycle of the exceptional normal form parameter `v`.
    pub cycle_v: Option<[f64; 2]>,
    pub error: Option<String>,
    pub trajectory: Vec<TrajectoryPoint>,
}

impl PullbackOutcome {
    /// CSV with header `step,mu,kappa,sigma,delta,t0,...,tn`.
    pub fn trajectory_csv(&self) -> String {
        let n = self.combinatorics.n();
        let mut out = String::from("step,mu,kappa,sigma,delta");
        for j in 0..=n {
            out.push_str(&format!(",t{j}"));
        }
        out.push('\n');
        for p in &self.trajectory {
            out.push_str(&format!(
                "{},{:e},{:e},{:e},{:e}",
                p.step, p.mu, p.kappa, p.sigma, p.delta
            ));
            for x in &p.t {
                out.push_str(&format!(",{x:e}"));
            }
            out.push('\n');
        }
        out
    }

    /// First recorded step whose (Sigma, Delta) is within `tol` of the final
    /// coordinates.
    pub fn steps_to_within(&self, tol: f64) -> Option<usize> {
        let last = self.coords?;
        self.trajectory
            .iter()
            .find(|p| sigma_distance(p.sigma, last.sigma).hypot(p.delta - last.delta) < tol)
            .map(|p| p.step)
    }
}

fn min_gap(t: &[f64]) -> (f64, usize) {
    let n = t.len() - 1;
    let mut best = (t[0] + 1.0 - t[n], n);
    for j in 0..n {
        let g = t[j + 1] - t[j];
        if g < best.0 {
            best = (g, j);
        }
    }
    best
}

fn max_diff<R: Real>(a: &[R], b: &[R]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (*x - *y).abs().to_f64())
        .fold(0.0, f64::max)
}

// Points closer than this are not trusted to be distinct at convergence.
const GAP_SUSPECT: f64 = 1e-6;

struct Runner<'a> {
    layout: &'a Layout,
    cfg: PullbackConfig,
    exceptional_possible: bool,
    trajectory: Vec<TrajectoryPoint>,
}

impl Runner<'_> {
    fn record<R: Real>(&mut self, s: &MarkedState<R>) -> Option<CanonicalCoords> {
        let cc = sigma_delta(s.params).ok();
        self.trajectory.push(TrajectoryPoint {
            step: s.step,
            mu: s.params.mu,
            kappa: s.params.kappa,
            sigma: cc.map_or(f64::NAN, |c| c.sigma),
            delta: cc.map_or(f64::NAN, |c| c.delta),
            shift_locus: shift_locus_membership(s.params),
            t: s.t_f64(),
        });
        cc
    }

    fn realized<R: Real>(&self, s: &MarkedState<R>, tol: f64) -> bool {
        let f = LiftedMap::<R>::new(s.params);
        s.t.iter().zip(&s.w).all(|(&t, &w)| {
            let d = (f.eval(t) - w).to_f64().rem_euclid(1.0);
            d.min(1.0 - d) < tol
        })
    }

    fn run<R: Real>(mut self, init: MarkedState<R>) -> PullbackOutcome {
        let cfg = self.cfg;
        let mut prev2: Option<MarkedState<R>> = None;
        let mut prev = init;
        let mut prev_cc = self.record(&prev);
        let mut verdict = Verdict::MaxIterations;
        let mut error = None;
        let mut mu_limit = None;
        let mut simplified = None;
        let mut cycle_pair = None;
        for _ in 0..cfg.max_iter {
            let cur = match step_with(self.layout, &prev) {
                Ok(s) => s,
                Err(e) => {
                    error = Some(e.to_string());
                    break;
                }
            };
            let cc = self.record(&cur);
            let dt = max_diff(&cur.t, &prev.t);
            let dsd = match (cc, prev_cc) {
                (Some(a), Some(b)) => {
                    sigma_distance(a.sigma, b.sigma).max((a.delta - b.delta).abs())
                }
                _ => f64::INFINITY,
            };
            let (gap, _) = min_gap(&cur.t_f64());
            let blown =
                cur.params.mu.abs() > cfg.mu_blowup || cc.is_some_and(|c| c.delta > 1.0 - 1e-9);
            if blown {
                verdict = Verdict::StronglyObstructed;
                mu_limit = Some(cur.params.mu.signum());
            } else if let (true, Some(p2)) = (self.exceptional_possible, &prev2) {
                if max_diff(&cur.t, &p2.t) < cfg.tol_conv && dt >= cfg.tol_conv {
                    verdict = Verdict::ExceptionalTwoCycle;
                    cycle_pair = Some([prev.params, cur.params]);
                }
            }
            if verdict == Verdict::MaxIterations && dsd < cfg.tol_sigma_delta {
                if gap < cfg.gap_min {
                    verdict = Verdict::WeaklyObstructed;
                    simplified = self.layout.c.simplify().ok();
                } else if dt < cfg.tol_conv
                    && gap >= GAP_SUSPECT
                    && self.realized(&cur, 1e3 * cfg.tol_conv)
                {
                    verdict = Verdict::Converged;
                }
            }
            prev2 = Some(prev);
            prev = cur;
            prev_cc = cc;
            if verdict != Verdict::MaxIterations {
                break;
            }
        }
        let cycle_v = match cycle_pair {
            Some([a, b]) if self.layout.c.entries() == [1, 3, 4, 3, 1, 0] => {
                Some([exceptional_parameter(a).0, exceptional_parameter(b).0])
            }
            _ => None,
        };
        PullbackOutcome {
            combinatorics: self.layout.c.clone(),
            verdict,
            final_params: prev.params,
            coords: prev_cc,
            iterations: prev.step,
            t: prev.t_f64(),
            mu_limit,
            simplified,
            cycle_pair,
            cycle_v,
            error,
            trajectory: self.trajectory,
        }
    }
}

/// Runs the pullback from the equally spaced start.
pub fn run(c: &Combinatorics, config: &PullbackConfig) -> Result<PullbackOutcome, PullbackError> {
    run_from(c, config, &InitStrategy::EquallySpaced)
}

/// Runs the pullback. Invalid input is an error; failures during the
/// iteration end the run and are recorded in `PullbackOutcome::error`.
pub fn run_from(
    c: &Combinatorics,
    config: &PullbackConfig,
    start: &InitStrategy,
) -> Result<PullbackOutcome, PullbackError> {
    let layout = Layout::new(c)?;
    let exceptional_possible = c.orbifold_chi().map(|x| x == 0.into()).unwrap_or(false);
    let runner = Runner {
        layout: &layout,
        cfg: *config,
        exceptional_possible,
        trajectory: Vec::new(),
    };
    Ok(match config.precision {
        Precision::Double => runner.run(init_state_with::<f64>(&layout, start)?),
        Precision::Extended => runner.run(init_state_with::<DoubleDouble>(&layout, start)?),
    })
}

/// Member `f_{v,1/v}(x) = (w - v)(x + 1/x)/4 + (v + w)/2` of the exceptional
/// family, with its Epstein parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExceptionalMap {
    pub v: f64,
    pub w: f64,
    pub params: EpsteinParams,
}

impl ExceptionalMap {
    pub fn eval(&self, x: f64) -> f64 {
        (self.w - self.v) * (x + 1.0 / x) / 4.0 + (self.v + self.w) / 2.0
    }
}

/// Start for `(1,3,4,3,1,0)` read off the fixed point `v = 1 - sqrt 2` of the
/// exceptional normal form; pullback from it converges to `(-2, -sqrt 2)`.
pub fn exceptional_fixed_start() -> Vec<f64> {
    let (m, _) = exceptional_normal_form(1.0 - 2f64.sqrt()).expect("nondegenerate");
    let f = LiftedMap::<f64>::new(m.params);
    // x_5 = 1 -> x_0 -> x_1 -> x_3 = 0, and x_2 = -1 -> x_4 -> x_1
    vec![f.eval(0.25), -0.5, -0.25, 0.0, f.eval(-0.25), 0.25]
}

/// Normal form at `v` and the parameter `v' = (v + 1)/(v - 1)` of its pullback.
pub fn exceptional_normal_form(v: f64) -> Result<(ExceptionalMap, f64), PullbackError> {
    if !(v > -1.0 && v < 0.0) {
        return Err(PullbackError::InvalidNormalForm(v));
    }
    let w = 1.0 / v;
    // conjugate by x -> -1/x, which sends the critical points -1, 1 to 1, -1
    // and the fixed point at infinity to 0
    let mu = 4.0 / (w - v);
    let kappa = (v + w) / (v - w);
    Ok((
        ExceptionalMap {
            v,
            w,
            params: EpsteinParams { mu, kappa },
        },
        (v + 1.0) / (v - 1.0),
    ))
}

/// `(v, w)` of an Epstein map in the coordinates of the exceptional normal
/// form: `v = -1/f(1)`, `w = -1/f(-1)`.
pub fn exceptional_parameter(p: EpsteinParams) -> (f64, f64) {
    (-2.0 * (p.kappa + 1.0) / p.mu, -2.0 * (p.kappa - 1.0) / p.mu)
}

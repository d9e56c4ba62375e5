//! Piecewise-linear model `f: [0, n] -> [0, n]` with `f(j) = m_j`, its Markov
//! partition into edges `I(j) = [j-1, j]`, Levy-cycle search and entropy.

use num_integer::Integer;
use num_rational::Rational64;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::combinatorics::{Combinatorics, CombinatoricsError, Shape};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PlError {
    #[error(transparent)]
    Combinatorics(#[from] CombinatoricsError),
    #[error("x = {0} is outside [0, {1}]")]
    OutOfDomain(Rational64, usize),
    #[error("Levy search needs +-+ shape, got {0}")]
    WrongShape(&'static str),
    #[error("max_period must be at least 2")]
    BadPeriod,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Lap {
    pub start: usize,
    pub end: usize,
    /// +1 increasing, -1 decreasing.
    pub direction: i8,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlModel {
    c: Combinatorics,
    laps: Vec<Lap>,
    critical: (usize, usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LevyCertificate {
    pub period: usize,
    /// 1-based edge indices, sorted.
    pub intervals: Vec<usize>,
    #[serde(rename = "rotation", serialize_with = "serialize_rotation")]
    pub rotation_number: (usize, usize),
}

fn serialize_rotation<S: Serializer>(r: &(usize, usize), s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&format!("{}/{}", r.0, r.1))
}

impl PlModel {
    pub fn build(c: &Combinatorics) -> Result<Self, PlError> {
        c.require_admissible()?;
        let critical = c.critical_indices().expect("admissible");
        let m = c.entries();
        let bounds = [0, critical.0, critical.1, c.n()];
        let laps = bounds
            .windows(2)
            .filter(|w| w[1] > w[0])
            .map(|w| Lap {
                start: w[0],
                end: w[1],
                direction: if m[w[1]] > m[w[0]] { 1 } else { -1 },
            })
            .collect();
        Ok(PlModel {
            c: c.clone(),
            laps,
            critical,
        })
    }

    pub fn combinatorics(&self) -> &Combinatorics {
        &self.c
    }

    pub fn laps(&self) -> &[Lap] {
        &self.laps
    }

    pub fn critical_indices(&self) -> (usize, usize) {
        self.critical
    }

    pub fn n(&self) -> usize {
        self.c.n()
    }

    pub fn eval(&self, x: Rational64) -> Result<Rational64, PlError> {
        let n = self.n();
        if x < Rational64::from_integer(0) || x > Rational64::from_integer(n as i64) {
            return Err(PlError::OutOfDomain(x, n));
        }
        let m = self.c.entries();
        let j0 = (x.floor().to_integer() as usize).min(n - 1);
        let frac = x - Rational64::from_integer(j0 as i64);
        let a = m[j0] as i64;
        let b = m[j0 + 1] as i64;
        Ok(Rational64::from_integer(a) + frac * Rational64::from_integer(b - a))
    }

    /// Slope sign of edge `I(i)`, `1 <= i <= n`.
    pub fn edge_increasing(&self, i: usize) -> bool {
        let m = self.c.entries();
        m[i] > m[i - 1]
    }

    /// Edges `I(k)` covered by the image of `I(i)`.
    pub fn edge_cover(&self, i: usize) -> std::ops::RangeInclusive<usize> {
        let m = self.c.entries();
        let (lo, hi) = (m[i - 1].min(m[i]), m[i - 1].max(m[i]));
        lo + 1..=hi
    }

    /// `n x n` transition matrix; row and column `k` stand for `I(k + 1)`.
    pub fn markov_matrix(&self) -> Vec<Vec<u8>> {
        let n = self.n();
        (1..=n)
            .map(|i| {
                let cover = self.edge_cover(i);
                (1..=n).map(|k| u8::from(cover.contains(&k))).collect()
            })
            .collect()
    }

    /// Fixed points of the model, exactly.
    pub fn fixed_points(&self) -> Vec<Rational64> {
        let m = self.c.entries();
        let mut out = Vec::new();
        for j in 0..=self.n() {
            if m[j] == j {
                out.push(Rational64::from_integer(j as i64));
            }
            if j < self.n() {
                let g0 = m[j] as i64 - j as i64;
                let g1 = m[j + 1] as i64 - (j as i64 + 1);
                if (g0 < 0 && g1 > 0) || (g0 > 0 && g1 < 0) {
                    // g is linear on the edge: root at j + g0 / (g0 - g1)
                    out.push(Rational64::from_integer(j as i64) + Rational64::new(g0, g0 - g1));
                }
            }
        }
        out
    }

    /// Searches for a periodic cycle of edges in increasing laps that is
    /// pairwise disjoint and rotates rigidly around the increasing half-circle.
    pub fn find_levy_certificate(
        &self,
        max_period: usize,
    ) -> Result<Option<LevyCertificate>, PlError> {
        let shape = self.c.shape()?;
        if shape != Shape::PlusMinusPlus {
            return Err(PlError::WrongShape(shape.label()));
        }
        if max_period < 2 {
            return Err(PlError::BadPeriod);
        }
        let n = self.n();
        let nodes: Vec<usize> = (1..=n).filter(|&i| self.edge_increasing(i)).collect();
        let succ: Vec<Vec<usize>> = (0..=n)
            .map(|i| {
                if i == 0 || !self.edge_increasing(i) {
                    Vec::new()
                } else {
                    self.edge_cover(i)
                        .filter(|&k| self.edge_increasing(k))
                        .collect()
                }
            })
            .collect();
        let mut cycles = Vec::new();
        for &s in &nodes {
            let mut path = vec![s];
            self.dfs_cycles(s, &succ, max_period, &mut path, &mut cycles);
        }
        cycles.sort_by(|a: &Vec<usize>, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        for cyc in cycles {
            if let Some(cert) = self.certify(&cyc) {
                return Ok(Some(cert));
            }
        }
        Ok(None)
    }

    // Simple cycles through `start` that use only nodes greater than `start`.
    fn dfs_cycles(
        &self,
        start: usize,
        succ: &[Vec<usize>],
        max_period: usize,
        path: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        let last = *path.last().unwrap();
        for &k in &succ[last] {
            if k == start && path.len() >= 2 {
                out.push(path.clone());
            } else if k > start && !path.contains(&k) && path.len() < max_period {
                path.push(k);
                self.dfs_cycles(start, succ, max_period, path, out);
                path.pop();
            }
        }
    }

    fn certify(&self, cycle: &[usize]) -> Option<LevyCertificate> {
        let p = cycle.len();
        let mut sorted = cycle.to_vec();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[1] - w[0] < 2) {
            return None;
        }
        // Positive cyclic order on the increasing half-circle: the edges after
        // the right critical point come first, then those before the left one
        // (wrapping through infinity).
        let j_plus = self.critical.1;
        let mut order: Vec<usize> = sorted.iter().copied().filter(|&e| e > j_plus).collect();
        order.extend(sorted.iter().copied().filter(|&e| e <= j_plus));
        let pos = |e: usize| order.iter().position(|&x| x == e).unwrap();
        let shift = (pos(cycle[1]) + p - pos(cycle[0])) % p;
        for k in 0..p {
            let from = pos(cycle[k]);
            let to = pos(cycle[(k + 1) % p]);
            if to != (from + shift) % p {
                return None;
            }
        }
        let g = shift.gcd(&p);
        Some(LevyCertificate {
            period: p,
            intervals: sorted,
            rotation_number: (shift / g, p / g),
        })
    }

    /// Natural log of the spectral radius of the Markov matrix.
    pub fn transfer_entropy(&self) -> f64 {
        spectral_radius(&self.markov_matrix()).ln().max(0.0)
    }
}

/// Whether the map is +-+ with a critical point of exact period two.
pub fn period_two_critical_shortcut(c: &Combinatorics) -> bool {
    if c.shape().ok() != Some(Shape::PlusMinusPlus) {
        return false;
    }
    let (a, b) = c.critical_indices().unwrap();
    [a, b]
        .iter()
        .any(|&j| c.image(j) != j && c.image(c.image(j)) == j)
}

/// Perron root of a 0/1 matrix. Each strongly connected block is irreducible,
/// and power iteration on `A + I` converges for it; the root is the largest
/// block root.
pub fn spectral_radius(a: &[Vec<u8>]) -> f64 {
    let n = a.len();
    let mut reach = vec![vec![false; n]; n];
    for i in 0..n {
        for k in 0..n {
            reach[i][k] = a[i][k] != 0;
        }
        reach[i][i] = true;
    }
    for k in 0..n {
        for i in 0..n {
            if reach[i][k] {
                let row = reach[k].clone();
                for (r, &x) in reach[i].iter_mut().zip(&row) {
                    *r |= x;
                }
            }
        }
    }
    let mut assigned = vec![false; n];
    let mut best: f64 = 0.0;
    for i in 0..n {
        if assigned[i] {
            continue;
        }
        let block: Vec<usize> = (0..n).filter(|&j| reach[i][j] && reach[j][i]).collect();
        for &j in &block {
            assigned[j] = true;
        }
        let has_edge = block.iter().any(|&r| block.iter().any(|&s| a[r][s] != 0));
        if has_edge {
            best = best.max(block_radius(a, &block));
        }
    }
    best
}

fn block_radius(a: &[Vec<u8>], block: &[usize]) -> f64 {
    let k = block.len();
    let mut v = vec![1.0 / k as f64; k];
    let mut lambda = 0.0;
    for _ in 0..1_000_000 {
        let mut w = v.clone();
        for (r, &i) in block.iter().enumerate() {
            for (s, &j) in block.iter().enumerate() {
                if a[i][j] != 0 {
                    w[r] += v[s];
                }
            }
        }
        let norm: f64 = w.iter().sum();
        for x in w.iter_mut() {
            *x /= norm;
        }
        // v sums to one, so the norm of (A + I)v is the eigenvalue estimate
        let next = norm - 1.0;
        let done = (next - lambda).abs() <= 1e-10 * next.abs().max(1.0)
            && v.iter().zip(&w).all(|(x, y)| (x - y).abs() < 1e-13);
        lambda = next;
        v = w;
        if done {
            break;
        }
    }
    lambda
}

//! Combinatorics vectors `m = (m_0, ..., m_n)` of critically finite real
//! quadratic maps, with `x_j -> x_{m_j}` on marked points in positive cyclic
//! order.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use num_rational::Rational64;
use serde::{Serialize, Serializer};
use thiserror::Error;

/// Default cap on `n` for exhaustive enumeration.
pub const DEFAULT_ENUMERATION_BOUND: usize = 8;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CombinatoricsError {
    #[error("invalid token `{0}`")]
    InvalidToken(String),
    #[error("entry {value} at position {index} is outside [0, {n}]")]
    OutOfRange { index: usize, value: i64, n: usize },
    #[error("a combinatorics needs at least 2 entries, got {0}")]
    TooShort(usize),
    #[error("{0} is not admissible: {1}")]
    Inadmissible(Combinatorics, Violation),
    #[error("reduction of {from} gives inadmissible {to}")]
    ReductionInadmissible {
        from: Combinatorics,
        to: Combinatorics,
    },
    #[error("mapping pattern is not realized by any admissible combinatorics")]
    Incompatible,
    #[error("invalid mapping pattern: {0}")]
    InvalidPattern(String),
    #[error("FP(p, q) needs 0 < p < q with gcd(p, q) = 1, got p={p}, q={q}")]
    InvalidFilomPilgrim { p: usize, q: usize },
    #[error("enumeration for n={n} exceeds the bound {bound}")]
    BoundExceeded { n: usize, bound: usize },
    #[error("{0} does not have co-polynomial shape")]
    NotCoPolynomial(Combinatorics),
    #[error("{0} is not a polynomial combinatorics ending in its own length")]
    NotPolynomial(Combinatorics),
    #[error("({0}) is the Chebyshev or squaring extreme and has no co-polynomial partner")]
    ChebyshevOrSquareExcluded(String),
}

/// First admissibility condition that fails.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// `max - min` is neither `n` nor `n - 1`.
    Spread { spread: usize, n: usize },
    /// Case 2 with the outside critical point on the wrong end.
    Case2Placement { relabeled: Option<Combinatorics> },
    /// Not unimodal after rotating the minimum to the front.
    Unimodality(String),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Spread { spread, n } => write!(
                f,
                "Condition 1: max - min = {spread}, expected {n} or {}",
                n.saturating_sub(1)
            ),
            Violation::Case2Placement { relabeled } => {
                write!(
                    f,
                    "Condition 1 (Case 2): first entry must be n or last entry must be 0"
                )?;
                if let Some(r) = relabeled {
                    write!(f, "; the conforming relabeling is {r}")?;
                }
                Ok(())
            }
            Violation::Unimodality(why) => write!(f, "Condition 2: {why}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Shape {
    PlusMinusPlus,
    MinusPlusMinus,
    UnimodalPlusMinus,
    UnimodalMinusPlus,
    Polynomial,
    CoPolynomial,
}

impl Shape {
    pub fn label(self) -> &'static str {
        match self {
            Shape::PlusMinusPlus => "+-+",
            Shape::MinusPlusMinus => "-+-",
            Shape::UnimodalPlusMinus => "+-",
            Shape::UnimodalMinusPlus => "-+",
            Shape::Polynomial => "polynomial",
            Shape::CoPolynomial => "co-polynomial",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DynamicType {
    B,
    C,
    D,
    HalfHyperbolic,
    TotallyNonHyperbolic,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassificationReport {
    pub combinatorics: Combinatorics,
    pub admissible: bool,
    pub minimal: bool,
    pub expansive: bool,
    pub polynomial_shape: bool,
    pub copolynomial_shape: bool,
    pub shape: Shape,
    pub lap_signs: String,
    pub dynamic_type: DynamicType,
    pub n_pc: usize,
    #[serde(serialize_with = "serialize_ratio")]
    pub chi: Rational64,
    pub fixed_point_count: usize,
}

fn serialize_ratio<S: Serializer>(r: &Rational64, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

/// Validated vector with entries in `[0, n]`; admissibility is checked
/// separately by [`Combinatorics::check_admissible`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Combinatorics {
    m: Vec<usize>,
}

impl Serialize for Combinatorics {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.m.serialize(s)
    }
}

impl fmt::Display for Combinatorics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", join(&self.m))
    }
}

fn join(v: &[usize]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

impl FromStr for Combinatorics {
    type Err = CombinatoricsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Combinatorics::parse(s)
    }
}

impl Combinatorics {
    /// Parses comma-separated integers; surrounding brackets are ignored.
    pub fn parse(text: &str) -> Result<Self, CombinatoricsError> {
        let trimmed = text
            .trim()
            .trim_start_matches(['(', '<', '[', '⟨'])
            .trim_end_matches([')', '>', ']', '⟩']);
        let mut vals = Vec::new();
        for tok in trimmed.split(',') {
            let tok = tok.trim();
            let v: i64 = tok
                .parse()
                .map_err(|_| CombinatoricsError::InvalidToken(tok.to_string()))?;
            vals.push(v);
        }
        Self::from_signed(&vals)
    }

    fn from_signed(vals: &[i64]) -> Result<Self, CombinatoricsError> {
        if vals.len() < 2 {
            return Err(CombinatoricsError::TooShort(vals.len()));
        }
        let n = vals.len() - 1;
        let mut m = Vec::with_capacity(vals.len());
        for (index, &value) in vals.iter().enumerate() {
            if value < 0 || value as usize > n {
                return Err(CombinatoricsError::OutOfRange { index, value, n });
            }
            m.push(value as usize);
        }
        Ok(Combinatorics { m })
    }

    pub fn new(m: Vec<usize>) -> Result<Self, CombinatoricsError> {
        let vals: Vec<i64> = m.iter().map(|&x| x as i64).collect();
        Self::from_signed(&vals)
    }

    /// Like [`Combinatorics::new`] but also requires admissibility.
    pub fn admissible(m: Vec<usize>) -> Result<Self, CombinatoricsError> {
        let c = Self::new(m)?;
        c.require_admissible()?;
        Ok(c)
    }

    pub fn entries(&self) -> &[usize] {
        &self.m
    }

    pub fn n(&self) -> usize {
        self.m.len() - 1
    }

    pub fn image(&self, j: usize) -> usize {
        self.m[j]
    }

    fn unique_arg(&self, want_max: bool) -> Option<usize> {
        let target = if want_max {
            *self.m.iter().max()?
        } else {
            *self.m.iter().min()?
        };
        let mut hits = self.m.iter().enumerate().filter(|(_, &v)| v == target);
        let first = hits.next()?.0;
        if hits.next().is_some() {
            None
        } else {
            Some(first)
        }
    }

    /// Indices of the unique maximum and minimum, when both are unique.
    pub fn extreme_indices(&self) -> Option<(usize, usize)> {
        Some((self.unique_arg(true)?, self.unique_arg(false)?))
    }

    /// `(j_minus, j_plus)` with `j_minus < j_plus`.
    pub fn critical_indices(&self) -> Option<(usize, usize)> {
        let (a, b) = self.extreme_indices()?;
        Some((a.min(b), a.max(b)))
    }

    pub fn is_admissible(&self) -> bool {
        self.check_admissible().is_ok()
    }

    pub fn require_admissible(&self) -> Result<(), CombinatoricsError> {
        self.check_admissible()
            .map_err(|v| CombinatoricsError::Inadmissible(self.clone(), v))
    }

    /// Checks both admissibility conditions; the error names the first one
    /// that fails.
    pub fn check_admissible(&self) -> Result<(), Violation> {
        let n = self.n();
        let lo = *self.m.iter().min().unwrap();
        let hi = *self.m.iter().max().unwrap();
        let spread = hi - lo;
        if spread != n && spread + 1 != n {
            return Err(Violation::Spread { spread, n });
        }
        if spread + 1 == n && self.m[0] != n && self.m[n] != 0 {
            return Err(Violation::Case2Placement {
                relabeled: self.case2_relabeling(lo),
            });
        }
        self.check_unimodal()
    }

    fn check_unimodal(&self) -> Result<(), Violation> {
        let len = self.m.len();
        let start = self
            .unique_arg(false)
            .ok_or_else(|| Violation::Unimodality("minimum value occurs more than once".into()))?;
        let s: Vec<usize> = (0..len).map(|k| self.m[(start + k) % len]).collect();
        for v in 0..=self.n() {
            let count = s.iter().filter(|&&x| x == v).count();
            if count > 2 {
                return Err(Violation::Unimodality(format!(
                    "value {v} occurs {count} times"
                )));
            }
        }
        let mut k = 1;
        while k < len && s[k] > s[k - 1] {
            k += 1;
        }
        while k < len && s[k] < s[k - 1] {
            k += 1;
        }
        if k < len {
            return Err(Violation::Unimodality(format!(
                "rotated sequence {} is not increasing then decreasing",
                join(&s)
            )));
        }
        if s[len - 1] == s[0] {
            return Err(Violation::Unimodality(
                "sequence returns to its minimum".into(),
            ));
        }
        Ok(())
    }

    // In Case 2 the critical point outside f(R) sits on the left when its
    // value is the maximum and on the right when it is the minimum.
    fn case2_relabeling(&self, lo: usize) -> Option<Combinatorics> {
        let len = self.m.len();
        // old label j becomes (j + shift) mod len
        let shift = if lo == 1 { len - 1 } else { 1 };
        let mut out = vec![0; len];
        for j in 0..len {
            out[(j + shift) % len] = (self.m[j] + shift) % len;
        }
        let n = self.n();
        let c = Combinatorics { m: out };
        let placed = c.m[0] == n || c.m[n] == 0;
        (placed && c.check_unimodal().is_ok()).then_some(c)
    }

    /// Forward orbit `f(j), f^2(j), ...` up to the first repetition.
    pub fn forward_orbit(&self, j: usize) -> Vec<usize> {
        let mut seen = vec![false; self.m.len()];
        let mut out = Vec::new();
        let mut x = self.m[j];
        while !seen[x] {
            seen[x] = true;
            out.push(x);
            x = self.m[x];
        }
        out
    }

    pub fn is_periodic(&self, j: usize) -> bool {
        self.forward_orbit(j).contains(&j)
    }

    /// Points `f^k(c)` for `k >= 1` and both critical indices.
    pub fn postcritical_set(&self) -> BTreeSet<usize> {
        let mut p = BTreeSet::new();
        if let Some((a, b)) = self.critical_indices() {
            p.extend(self.forward_orbit(a));
            p.extend(self.forward_orbit(b));
        }
        p
    }

    fn interval_image(&self, lo: usize, hi: usize) -> (usize, usize) {
        let slice = &self.m[lo..=hi];
        (*slice.iter().min().unwrap(), *slice.iter().max().unwrap())
    }

    /// Whether some forward image of the edge `[j-1, j]` (including the edge
    /// itself) contains a critical index.
    pub fn edge_is_expansive(&self, j: usize) -> bool {
        let Some((a, b)) = self.critical_indices() else {
            return false;
        };
        let mut seen = BTreeSet::new();
        let mut iv = (j - 1, j);
        while seen.insert(iv) {
            if (iv.0..=iv.1).contains(&a) || (iv.0..=iv.1).contains(&b) {
                return true;
            }
            iv = self.interval_image(iv.0, iv.1);
        }
        false
    }

    pub fn is_expansive(&self) -> bool {
        (1..=self.n()).all(|j| self.edge_is_expansive(j))
    }

    fn all_postcritical(&self) -> bool {
        let Some((a, b)) = self.critical_indices() else {
            return false;
        };
        let p = self.postcritical_set();
        (0..=self.n()).all(|j| j == a || j == b || p.contains(&j))
    }

    pub fn check_minimal(&self) -> Result<bool, CombinatoricsError> {
        self.require_admissible()?;
        Ok(self.all_postcritical() && self.is_expansive())
    }

    pub fn is_nonpolynomial(&self) -> bool {
        self.m[0] > 0 && self.m[self.n()] < self.n()
    }

    pub fn is_polynomial_shape(&self) -> bool {
        match self.critical_indices() {
            Some((a, b)) => self.m[a] == a || self.m[b] == b,
            None => false,
        }
    }

    pub fn is_copolynomial_shape(&self) -> bool {
        match self.critical_indices() {
            Some((a, b)) => !self.is_polynomial_shape() && (self.m[a] == b || self.m[b] == a),
            None => false,
        }
    }

    /// Lap signs, e.g. `"+-+"`; a single lap gives `"+"` or `"-"`.
    pub fn lap_signs(&self) -> String {
        let (a, b) = match self.critical_indices() {
            Some(x) => x,
            None => return String::new(),
        };
        let bounds = [0, a, b, self.n()];
        let mut out = String::new();
        for w in bounds.windows(2) {
            if w[1] > w[0] {
                out.push(if self.m[w[1]] > self.m[w[0]] {
                    '+'
                } else {
                    '-'
                });
            }
        }
        out
    }

    pub fn shape(&self) -> Result<Shape, CombinatoricsError> {
        self.require_admissible()?;
        if self.is_polynomial_shape() {
            return Ok(Shape::Polynomial);
        }
        if self.is_copolynomial_shape() {
            return Ok(Shape::CoPolynomial);
        }
        Ok(match self.lap_signs().as_str() {
            "+-+" => Shape::PlusMinusPlus,
            "-+-" => Shape::MinusPlusMinus,
            "+-" => Shape::UnimodalPlusMinus,
            "-+" => Shape::UnimodalMinusPlus,
            other => unreachable!("admissible combinatorics with laps {other}"),
        })
    }

    /// True when the first lap is decreasing and the second (if any)
    /// increasing, with the minimum as the turning point.
    pub fn is_minus_plus_oriented(&self) -> bool {
        match self.extreme_indices() {
            Some((jmax, _)) => jmax == 0 || jmax == self.n(),
            None => false,
        }
    }

    pub fn dynamic_type(&self) -> Result<DynamicType, CombinatoricsError> {
        self.require_admissible()?;
        let (a, b) = self.critical_indices().unwrap();
        let (pa, pb) = (self.is_periodic(a), self.is_periodic(b));
        Ok(match (pa, pb) {
            (true, true) => {
                if self.forward_orbit(a).contains(&b) {
                    DynamicType::B
                } else {
                    DynamicType::D
                }
            }
            (true, false) | (false, true) => {
                let (p, q) = if pa { (a, b) } else { (b, a) };
                if self.forward_orbit(q).contains(&p) {
                    DynamicType::C
                } else {
                    DynamicType::HalfHyperbolic
                }
            }
            (false, false) => DynamicType::TotallyNonHyperbolic,
        })
    }

    /// Orbifold Euler characteristic `2 - sum (1 - 1/nu(x))` over the
    /// postcritical points.
    pub fn orbifold_chi(&self) -> Result<Rational64, CombinatoricsError> {
        self.require_admissible()?;
        let (a, b) = self.critical_indices().unwrap();
        let orbit_a: BTreeSet<usize> = self.forward_orbit(a).into_iter().collect();
        let orbit_b: BTreeSet<usize> = self.forward_orbit(b).into_iter().collect();
        let mut chi = Rational64::from_integer(2);
        for x in self.postcritical_set() {
            let in_cycle = (orbit_a.contains(&a) && orbit_a.contains(&x))
                || (orbit_b.contains(&b) && orbit_b.contains(&x));
            let weight = if in_cycle {
                Rational64::from_integer(1)
            } else if (orbit_a.contains(&b) && orbit_b.contains(&x))
                || (orbit_b.contains(&a) && orbit_a.contains(&x))
            {
                Rational64::new(3, 4)
            } else {
                Rational64::new(1, 2)
            };
            chi -= weight;
        }
        Ok(chi)
    }

    /// Number of fixed points of the piecewise-linear model. An edge on which
    /// the model is the identity contributes only its endpoints.
    pub fn fixed_point_count(&self) -> usize {
        let g: Vec<i64> = (0..self.m.len())
            .map(|j| self.m[j] as i64 - j as i64)
            .collect();
        let vertices = g.iter().filter(|&&v| v == 0).count();
        let crossings = g
            .windows(2)
            .filter(|w| (w[0] < 0 && w[1] > 0) || (w[0] > 0 && w[1] < 0))
            .count();
        vertices + crossings
    }

    pub fn classify(&self) -> Result<ClassificationReport, CombinatoricsError> {
        self.require_admissible()?;
        let expansive = self.is_expansive();
        Ok(ClassificationReport {
            combinatorics: self.clone(),
            admissible: true,
            minimal: expansive && self.all_postcritical(),
            expansive,
            polynomial_shape: self.is_polynomial_shape(),
            copolynomial_shape: self.is_copolynomial_shape(),
            shape: self.shape()?,
            lap_signs: self.lap_signs(),
            dynamic_type: self.dynamic_type()?,
            n_pc: self.postcritical_orbit_count(),
            chi: self.orbifold_chi()?,
            fixed_point_count: self.fixed_point_count(),
        })
    }

    /// Number of distinct points `f^k(c)`, `k >= 1`.
    pub fn postcritical_orbit_count(&self) -> usize {
        self.postcritical_set().len()
    }

    /// Orientation reversal `(n - m_n, ..., n - m_0)`.
    pub fn reversal(&self) -> Combinatorics {
        let n = self.n();
        Combinatorics {
            m: self.m.iter().rev().map(|&v| n - v).collect(),
        }
    }

    /// The `-+` oriented member of `{c, reversal(c)}`.
    pub fn oriented_minus_plus(&self) -> Option<Combinatorics> {
        if self.is_minus_plus_oriented() {
            Some(self.clone())
        } else {
            let r = self.reversal();
            r.is_minus_plus_oriented().then_some(r)
        }
    }

    fn restrict(&self, keep: &[usize]) -> Combinatorics {
        let pos = |v: usize| {
            keep.binary_search(&v)
                .expect("kept set is forward invariant")
        };
        Combinatorics {
            m: keep.iter().map(|&j| pos(self.m[j])).collect(),
        }
    }

    // Vertex classes joined by non-expansive edges; None if the map does
    // not descend to the quotient.
    fn collapse(&self) -> Option<Combinatorics> {
        let len = self.m.len();
        let mut class = vec![0usize; len];
        for j in 1..len {
            class[j] = if self.edge_is_expansive(j) {
                class[j - 1] + 1
            } else {
                class[j - 1]
            };
        }
        let classes = class[len - 1] + 1;
        let mut m = vec![usize::MAX; classes];
        for j in 0..len {
            let target = class[self.m[j]];
            if m[class[j]] == usize::MAX {
                m[class[j]] = target;
            } else if m[class[j]] != target {
                return None;
            }
        }
        Some(Combinatorics { m })
    }

    /// Removes non-postcritical vertices and collapses non-expansive edges
    /// until neither applies, then renumbers.
    pub fn simplify(&self) -> Result<Combinatorics, CombinatoricsError> {
        self.require_admissible()?;
        let mut cur = self.clone();
        while let Some((a, b)) = cur.critical_indices() {
            let mut keep = cur.postcritical_set();
            keep.insert(a);
            keep.insert(b);
            let keep: Vec<usize> = keep.into_iter().collect();
            let mut next = if keep.len() < cur.m.len() {
                cur.restrict(&keep)
            } else {
                cur.clone()
            };
            if next.critical_indices().is_some() && next.m.len() > 2 {
                match next.collapse() {
                    Some(c) => next = c,
                    None => break,
                }
            }
            if next == cur || next.m.len() < 2 {
                break;
            }
            cur = next;
        }
        if cur.is_admissible() {
            Ok(cur)
        } else {
            Err(CombinatoricsError::ReductionInadmissible {
                from: self.clone(),
                to: cur,
            })
        }
    }
}

/// Filom-Pilgrim combinatorics `(p, ..., q-1, 0, ..., p-1)` with `n = q - 1`.
pub fn filom_pilgrim(p: usize, q: usize) -> Result<Combinatorics, CombinatoricsError> {
    if p == 0 || p >= q || p.gcd(&q) != 1 {
        return Err(CombinatoricsError::InvalidFilomPilgrim { p, q });
    }
    Combinatorics::new((p..q).chain(0..p).collect())
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EnumerationFilter {
    pub minimal: bool,
    pub nonpolynomial: bool,
}

/// All admissible combinatorics with the given `n`, in lexicographic order.
pub fn enumerate_admissible(
    n: usize,
    filter: EnumerationFilter,
    bound: usize,
) -> Result<Vec<Combinatorics>, CombinatoricsError> {
    if n > bound {
        return Err(CombinatoricsError::BoundExceeded { n, bound });
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let len = n + 1;
    let mut found = BTreeSet::new();
    let ranges: [(usize, usize); 3] = [(0, n), (1, n), (0, n - 1)];
    for &(lo, hi) in ranges.iter().take(if n >= 2 { 3 } else { 1 }) {
        if hi <= lo {
            continue;
        }
        let inner: Vec<usize> = (lo + 1..hi).collect();
        // rising part: k values strictly between lo and hi; falling part: rest
        for k in 0..len - 1 {
            let rest = len - 2 - k;
            for up in subsets(&inner, k) {
                for down in subsets(&inner, rest) {
                    let mut s = Vec::with_capacity(len);
                    s.push(lo);
                    s.extend(up.iter().copied());
                    s.push(hi);
                    s.extend(down.iter().rev().copied());
                    for r in 0..len {
                        let m: Vec<usize> = (0..len).map(|j| s[(j + len - r) % len]).collect();
                        let c = Combinatorics { m };
                        if c.is_admissible() {
                            found.insert(c);
                        }
                    }
                }
            }
        }
    }
    let mut out = Vec::new();
    for c in found {
        if filter.nonpolynomial && !c.is_nonpolynomial() {
            continue;
        }
        if filter.minimal && !c.check_minimal()? {
            continue;
        }
        out.push(c);
    }
    Ok(out)
}

fn subsets(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    fn go(
        items: &[usize],
        k: usize,
        start: usize,
        cur: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..items.len() {
            if items.len() - i < k - cur.len() {
                break;
            }
            cur.push(items[i]);
            go(items, k, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k <= items.len() {
        go(items, k, 0, &mut Vec::new(), &mut out);
    }
    out
}

/// Co-polynomial combinatorics to its polynomial partner, both `-+`
/// oriented: `(m_0, ..., m_n)` becomes `(m_0, ..., m_n, n + 1)`.
pub fn copolynomial_to_polynomial(c: &Combinatorics) -> Result<Combinatorics, CombinatoricsError> {
    c.require_admissible()?;
    if !c.is_copolynomial_shape() {
        return Err(CombinatoricsError::NotCoPolynomial(c.clone()));
    }
    let oriented = c
        .oriented_minus_plus()
        .ok_or_else(|| CombinatoricsError::NotCoPolynomial(c.clone()))?;
    let mut m = oriented.m.clone();
    m.push(oriented.m.len());
    let p = Combinatorics::admissible(m)?;
    debug_assert!(p.is_polynomial_shape());
    Ok(p)
}

/// Inverse of [`copolynomial_to_polynomial`]. Accepts raw entries so that the
/// excluded extremes `(2,0,2)` and `(0,1)` can be named even though the first
/// is not a valid combinatorics.
pub fn polynomial_to_copolynomial(entries: &[usize]) -> Result<Combinatorics, CombinatoricsError> {
    const EXCLUDED: [&[usize]; 5] = [
        &[2, 0, 2],
        &[0, 2, 0],
        &[0, 1],
        &[2, 0, 2, 3],
        &[0, 2, 0, 3],
    ];
    if EXCLUDED.contains(&entries) {
        return Err(CombinatoricsError::ChebyshevOrSquareExcluded(join(entries)));
    }
    let c = Combinatorics::admissible(entries.to_vec())?;
    if !c.is_polynomial_shape() {
        return Err(CombinatoricsError::NotPolynomial(c));
    }
    let oriented = c
        .oriented_minus_plus()
        .ok_or_else(|| CombinatoricsError::NotPolynomial(c.clone()))?;
    let n = oriented.n();
    if oriented.m[n] != n {
        return Err(CombinatoricsError::NotPolynomial(c));
    }
    let head = oriented.m[..n].to_vec();
    if EXCLUDED.contains(&head.as_slice()) {
        return Err(CombinatoricsError::ChebyshevOrSquareExcluded(join(&head)));
    }
    let out = Combinatorics::new(head)?;
    if !out.is_admissible() || !out.is_copolynomial_shape() {
        return Err(CombinatoricsError::NotCoPolynomial(out));
    }
    Ok(out)
}

/// A map on marked points `0..=n` listed in positive cyclic order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MappingPattern {
    pub map: Vec<usize>,
    pub critical: [usize; 2],
}

impl MappingPattern {
    fn validate(&self) -> Result<(), CombinatoricsError> {
        let len = self.map.len();
        if len < 2 {
            return Err(CombinatoricsError::InvalidPattern(
                "fewer than two points".into(),
            ));
        }
        if self.map.iter().any(|&v| v >= len) {
            return Err(CombinatoricsError::InvalidPattern(
                "image outside the point set".into(),
            ));
        }
        let [a, b] = self.critical;
        if a == b || a >= len || b >= len {
            return Err(CombinatoricsError::InvalidPattern(
                "need two distinct critical points".into(),
            ));
        }
        Ok(())
    }
}

/// Realizes a mapping pattern as a combinatorics by choosing where to cut
/// the circle, or reports that no real quadratic map has it.
pub fn combinatorics_from_mapping_pattern(
    pattern: &MappingPattern,
) -> Result<Combinatorics, CombinatoricsError> {
    pattern.validate()?;
    let len = pattern.map.len();
    let [ca, cb] = pattern.critical;
    let (va, vb) = (pattern.map[ca], pattern.map[cb]);
    if va == vb {
        return Err(CombinatoricsError::Incompatible);
    }
    // The two critical values must be adjacent or separated by a lone
    // critical point.
    let arc = |from: usize, to: usize| -> Vec<usize> {
        let mut out = Vec::new();
        let mut x = (from + 1) % len;
        while x != to {
            out.push(x);
            x = (x + 1) % len;
        }
        out
    };
    let separated_ok =
        |gap: Vec<usize>| gap.is_empty() || (gap.len() == 1 && (gap[0] == ca || gap[0] == cb));
    if !separated_ok(arc(va, vb)) && !separated_ok(arc(vb, va)) {
        return Err(CombinatoricsError::Incompatible);
    }
    let mut candidates = BTreeSet::new();
    for r in 0..len {
        let pos = |x: usize| (x + len - r) % len;
        let first = r;
        let last = (r + len - 1) % len;
        let ends = [first, last];
        let has_ends = |p: usize, q: usize| (ends == [p, q]) || (ends == [q, p]);
        let both_values = has_ends(va, vb);
        let crit_and_value = [(ca, va, vb), (cb, vb, va)]
            .iter()
            .any(|&(c, v, other)| has_ends(c, v) && pos(other).abs_diff(pos(c)) == 1);
        if !both_values && !crit_and_value {
            continue;
        }
        let m: Vec<usize> = (0..len).map(|j| pos(pattern.map[(j + r) % len])).collect();
        let c = Combinatorics { m };
        if c.is_admissible() {
            let mut crit: Vec<usize> = c.critical_indices().map(|(x, y)| vec![x, y]).unwrap();
            let mut want = vec![pos(ca), pos(cb)];
            crit.sort();
            want.sort();
            if crit == want {
                candidates.insert(c);
            }
        }
    }
    candidates
        .into_iter()
        .next()
        .ok_or(CombinatoricsError::Incompatible)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(s: &str) -> Combinatorics {
        Combinatorics::parse(s).unwrap()
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(
            Combinatorics::parse("1,x"),
            Err(CombinatoricsError::InvalidToken(_))
        ));
        assert!(matches!(
            Combinatorics::parse("1,5"),
            Err(CombinatoricsError::OutOfRange { .. })
        ));
        assert!(matches!(
            Combinatorics::parse("0"),
            Err(CombinatoricsError::TooShort(1))
        ));
        assert_eq!(c("(5, 6,4,1,0,2,3)").entries(), &[5, 6, 4, 1, 0, 2, 3]);
        assert_eq!(c("5,6,4,1,0,2,3").to_string(), "(5,6,4,1,0,2,3)");
    }

    #[test]
    fn admissibility_examples() {
        assert!(c("5,6,4,1,0,2,3").is_admissible());
        assert!(c("1,2,3,2,0").is_admissible());
        let v = c("2,4,2,0,2").check_admissible().unwrap_err();
        assert!(matches!(v, Violation::Unimodality(_)), "{v}");
        assert!(v.to_string().starts_with("Condition 2"));
        match c("1,2,3,2").check_admissible().unwrap_err() {
            Violation::Case2Placement { relabeled } => {
                assert_eq!(relabeled, Some(c("1,2,1,0")));
            }
            other => panic!("unexpected {other}"),
        }
        assert!(matches!(
            c("0,0,3,1").check_admissible(),
            Err(Violation::Unimodality(_))
        ));
        assert_eq!(
            c("0,1,1,1").check_admissible(),
            Err(Violation::Spread { spread: 1, n: 3 })
        );
    }

    #[test]
    fn critical_indices_and_shape() {
        assert_eq!(c("5,6,4,1,0,2,3").critical_indices(), Some((1, 4)));
        assert_eq!(c("5,6,4,1,0,2,3").shape().unwrap(), Shape::PlusMinusPlus);
        assert_eq!(c("1,0,3,2").shape().unwrap(), Shape::MinusPlusMinus);
        assert_eq!(c("2,0,1").shape().unwrap(), Shape::CoPolynomial);
        assert_eq!(c("1,0,2").shape().unwrap(), Shape::Polynomial);
        assert_eq!(c("1,2,1,0").shape().unwrap(), Shape::UnimodalPlusMinus);
        assert_eq!(c("4,2,1,2,3").shape().unwrap(), Shape::UnimodalMinusPlus);
        assert_eq!(c("1,0").shape().unwrap(), Shape::CoPolynomial);
        assert_eq!(c("0,1").shape().unwrap(), Shape::Polynomial);
    }

    #[test]
    fn minimality_examples() {
        assert!(c("1,0").check_minimal().unwrap());
        assert!(!c("2,3,4,1,0").check_minimal().unwrap());
        assert!(!c("4,2,1,0,1").check_minimal().unwrap());
        // the collapsing edge is [1, 2], which maps to itself reversed
        assert!(!c("4,2,1,0,1").edge_is_expansive(2));
        assert!(c("4,2,1,0,1").edge_is_expansive(3));
        assert!(c("5,6,4,1,0,2,3").check_minimal().unwrap());
    }

    #[test]
    fn simplify_examples() {
        assert_eq!(c("2,3,4,1,0").simplify().unwrap(), c("1,2,0"));
        assert_eq!(c("4,2,1,0,1").simplify().unwrap(), c("3,1,0,1"));
        assert_eq!(c("3,5,3,2,1,0").simplify().unwrap(), c("2,3,2,0"));
        assert_eq!(c("3,4,3,2,1,0").simplify().unwrap(), c("2,3,2,1,0"));
        match c("3,5,3,2,0,2").simplify() {
            Err(CombinatoricsError::ReductionInadmissible { to, .. }) => {
                assert_eq!(to.entries(), &[2, 4, 2, 0, 2]);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn dynamic_type_examples() {
        assert_eq!(c("1,0").dynamic_type().unwrap(), DynamicType::B);
        assert_eq!(c("1,0,2").dynamic_type().unwrap(), DynamicType::D);
        assert_eq!(c("1,2,1,0").dynamic_type().unwrap(), DynamicType::C);
        assert_eq!(
            c("2,3,2,0").dynamic_type().unwrap(),
            DynamicType::TotallyNonHyperbolic
        );
        assert_eq!(
            c("1,3,4,3,1,0").dynamic_type().unwrap(),
            DynamicType::TotallyNonHyperbolic
        );
        assert_eq!(c("2,4,3,1,0").dynamic_type().unwrap(), DynamicType::B);
    }

    #[test]
    fn chi_examples() {
        assert_eq!(
            c("1,3,4,3,1,0").orbifold_chi().unwrap(),
            Rational64::from_integer(0)
        );
        assert_eq!(
            c("2,3,2,0").orbifold_chi().unwrap(),
            Rational64::from_integer(0)
        );
        assert_eq!(c("1,2,1,0").orbifold_chi().unwrap(), Rational64::new(-1, 2));
        assert_eq!(
            c("5,6,4,1,0,2,3").orbifold_chi().unwrap(),
            Rational64::from_integer(-5)
        );
        assert_eq!(
            c("1,0").orbifold_chi().unwrap(),
            Rational64::from_integer(0)
        );
    }

    #[test]
    fn fixed_points_and_reversal() {
        assert_eq!(c("1,0,3,2").fixed_point_count(), 3);
        assert_eq!(c("2,0,1").fixed_point_count(), 1);
        assert_eq!(c("1,2,0").reversal(), c("2,0,1"));
        assert_eq!(c("2,4,3,1,0").reversal(), c("4,3,1,0,2"));
    }

    #[test]
    fn filom_pilgrim_examples() {
        assert_eq!(filom_pilgrim(2, 5).unwrap(), c("2,3,4,0,1"));
        assert_eq!(filom_pilgrim(1, 2).unwrap(), c("1,0"));
        assert!(filom_pilgrim(2, 4).is_err());
        assert!(filom_pilgrim(3, 3).is_err());
        let fp = filom_pilgrim(8, 9).unwrap();
        assert_eq!(fp.n(), 8);
        assert!(fp.check_minimal().unwrap());
    }

    #[test]
    fn enumerate_small() {
        let all = enumerate_admissible(1, EnumerationFilter::default(), 8).unwrap();
        assert_eq!(all, vec![c("0,1"), c("1,0")]);
        let np = enumerate_admissible(
            1,
            EnumerationFilter {
                nonpolynomial: true,
                ..Default::default()
            },
            8,
        )
        .unwrap();
        assert_eq!(np, vec![c("1,0")]);
        assert!(matches!(
            enumerate_admissible(9, EnumerationFilter::default(), 8),
            Err(CombinatoricsError::BoundExceeded { .. })
        ));
    }

    // Oracle: every vector in [0, n]^(n+1), filtered by admissibility.
    fn brute_force(n: usize) -> Vec<Combinatorics> {
        let len = n + 1;
        let total = (n + 1).pow(len as u32);
        let mut out = Vec::new();
        for code in 0..total {
            let mut x = code;
            let mut m = vec![0; len];
            for slot in m.iter_mut().rev() {
                *slot = x % (n + 1);
                x /= n + 1;
            }
            let c = Combinatorics { m };
            if c.is_admissible() {
                out.push(c);
            }
        }
        out
    }

    #[test]
    fn enumeration_matches_brute_force() {
        for n in 1..=5 {
            let fast = enumerate_admissible(n, EnumerationFilter::default(), 8).unwrap();
            assert_eq!(fast, brute_force(n), "n={n}");
        }
    }

    #[test]
    fn copolynomial_pairing() {
        assert_eq!(
            copolynomial_to_polynomial(&c("3,2,0,1")).unwrap(),
            c("3,2,0,1,4")
        );
        assert_eq!(
            copolynomial_to_polynomial(&c("2,0,1")).unwrap(),
            c("2,0,1,3")
        );
        assert_eq!(
            copolynomial_to_polynomial(&c("1,2,0")).unwrap(),
            c("2,0,1,3")
        );
        assert_eq!(
            polynomial_to_copolynomial(&[3, 2, 0, 1, 4]).unwrap(),
            c("3,2,0,1")
        );
        assert_eq!(polynomial_to_copolynomial(&[1, 0, 2]).unwrap(), c("1,0"));
        assert!(matches!(
            polynomial_to_copolynomial(&[2, 0, 2]),
            Err(CombinatoricsError::ChebyshevOrSquareExcluded(_))
        ));
        assert!(matches!(
            polynomial_to_copolynomial(&[0, 1]),
            Err(CombinatoricsError::ChebyshevOrSquareExcluded(_))
        ));
        assert!(matches!(
            copolynomial_to_polynomial(&c("1,0,2")),
            Err(CombinatoricsError::NotCoPolynomial(_))
        ));
    }

    #[test]
    fn mapping_pattern_examples() {
        // x0 -> x3 -> x2 <-> x1, critical {x0, x2}
        let p = MappingPattern {
            map: vec![3, 2, 1, 2],
            critical: [0, 2],
        };
        assert_eq!(
            combinatorics_from_mapping_pattern(&p).unwrap(),
            c("3,2,1,2")
        );
        let swap = MappingPattern {
            map: vec![1, 0],
            critical: [0, 1],
        };
        assert_eq!(combinatorics_from_mapping_pattern(&swap).unwrap(), c("1,0"));
        // critical values 1 and 4 separated by {2,3} and {5,0}
        let bad = MappingPattern {
            map: vec![1, 2, 4, 5, 0, 3],
            critical: [0, 2],
        };
        assert_eq!(
            combinatorics_from_mapping_pattern(&bad),
            Err(CombinatoricsError::Incompatible)
        );
        // brute force agrees: no rotation yields an admissible combinatorics
        // with those critical points
        for r in 0..6 {
            let m: Vec<usize> = (0..6).map(|j| (bad.map[(j + r) % 6] + 6 - r) % 6).collect();
            let cc = Combinatorics { m };
            let ok = cc.is_admissible()
                && cc.critical_indices()
                    == Some((
                        ((6 - r) % 6).min((2 + 6 - r) % 6),
                        ((6 - r) % 6).max((2 + 6 - r) % 6),
                    ));
            assert!(!ok, "rotation {r} gives {cc}");
        }
    }

    #[test]
    fn mapping_pattern_roundtrip_on_enumeration() {
        for n in 1..=5 {
            for comb in enumerate_admissible(n, EnumerationFilter::default(), 8).unwrap() {
                let (a, b) = comb.critical_indices().unwrap();
                let p = MappingPattern {
                    map: comb.entries().to_vec(),
                    critical: [a, b],
                };
                let got = combinatorics_from_mapping_pattern(&p);
                // the cut is unique, so the pattern of a combinatorics gives it back
                assert_eq!(got.as_ref(), Ok(&comb), "{comb}");
            }
        }
    }

    fn admissible_strategy(max_n: usize) -> impl Strategy<Value = Combinatorics> {
        let pools: Vec<Vec<Combinatorics>> = (1..=max_n)
            .map(|n| enumerate_admissible(n, EnumerationFilter::default(), 8).unwrap())
            .collect();
        let flat: Vec<Combinatorics> = pools.into_iter().flatten().collect();
        proptest::sample::select(flat)
    }

    proptest! {
        #[test]
        fn prop_reversal_involution(comb in admissible_strategy(6)) {
            prop_assert_eq!(comb.reversal().reversal(), comb.clone());
            prop_assert!(comb.reversal().is_admissible());
            prop_assert_eq!(comb.reversal().check_minimal().unwrap(), comb.check_minimal().unwrap());
            prop_assert_eq!(comb.reversal().orbifold_chi().unwrap(), comb.orbifold_chi().unwrap());
            prop_assert_eq!(comb.reversal().dynamic_type().unwrap(), comb.dynamic_type().unwrap());
        }

        #[test]
        fn prop_critical_indices_ordered(comb in admissible_strategy(6)) {
            let (a, b) = comb.critical_indices().unwrap();
            prop_assert!(a < b);
            for v in 0..=comb.n() {
                prop_assert!(comb.entries().iter().filter(|&&x| x == v).count() <= 2);
            }
        }

        #[test]
        fn prop_simplify_idempotent_and_minimal(comb in admissible_strategy(6)) {
            if let Ok(s) = comb.simplify() {
                prop_assert!(s.check_minimal().unwrap(), "{} -> {}", comb, s);
                prop_assert_eq!(s.simplify().unwrap(), s.clone());
                prop_assert!(s.n() <= comb.n());
            }
            if comb.check_minimal().unwrap() {
                prop_assert_eq!(comb.simplify().unwrap(), comb.clone());
            }
        }

        #[test]
        fn prop_npc_matches_type_on_minimal(comb in admissible_strategy(6)) {
            if comb.check_minimal().unwrap() {
                let npc = comb.postcritical_orbit_count();
                match comb.dynamic_type().unwrap() {
                    DynamicType::B | DynamicType::D => prop_assert_eq!(npc, comb.n() + 1),
                    DynamicType::C | DynamicType::HalfHyperbolic => prop_assert_eq!(npc, comb.n()),
                    DynamicType::TotallyNonHyperbolic => {
                        prop_assert!(npc == comb.n() || npc + 1 == comb.n())
                    }
                }
            }
        }

        #[test]
        fn prop_copolynomial_type(comb in admissible_strategy(6)) {
            if comb.is_copolynomial_shape() {
                let t = comb.dynamic_type().unwrap();
                prop_assert!(t == DynamicType::B || t == DynamicType::TotallyNonHyperbolic);
                let p = copolynomial_to_polynomial(&comb).unwrap();
                prop_assert_eq!(polynomial_to_copolynomial(p.entries()).unwrap(), comb.oriented_minus_plus().unwrap());
            }
        }

        #[test]
        fn prop_fp_minimal(q in 2usize..12, p in 1usize..11) {
            prop_assume!(p < q && p.gcd(&q) == 1);
            let fp = filom_pilgrim(p, q).unwrap();
            prop_assert!(fp.check_minimal().unwrap());
        }
    }
}

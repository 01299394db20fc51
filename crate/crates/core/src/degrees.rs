//! Multidegrees in Z^d and the finite cell decompositions on which every
//! degreewise computation runs.
//!
//! A box module has infinitely many nonzero graded pieces, but the shape of
//! each piece only depends on which generators are "present" at a degree.
//! Presence changes only when a coordinate crosses a threshold derived from
//! the generator shifts and caps, so Z^d splits into finitely many boxes on
//! which all degreewise matrices are literally the same.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use itertools::Itertools;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Per-coordinate exponent cap of a generator. `None` is an infinite cap.
pub type Cap = Option<u64>;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Multidegree(pub Vec<i64>);

impl Multidegree {
    pub fn zero(d: usize) -> Self {
        Multidegree(vec![0; d])
    }

    /// The `axis`-th unit vector.
    pub fn unit(d: usize, axis: usize) -> Self {
        let mut v = vec![0; d];
        v[axis] = 1;
        Multidegree(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    /// True iff every coordinate is nonnegative.
    pub fn is_nonnegative(&self) -> bool {
        self.0.iter().all(|&c| c >= 0)
    }

    /// True iff every coordinate is nonpositive.
    pub fn is_nonpositive(&self) -> bool {
        self.0.iter().all(|&c| c <= 0)
    }

    /// The degree with coordinate `axis` deleted.
    pub fn without(&self, axis: usize) -> Self {
        let mut v = self.0.clone();
        v.remove(axis);
        Multidegree(v)
    }

    pub fn scaled(&self, s: i64) -> Self {
        Multidegree(self.0.iter().map(|&c| c * s).collect())
    }

    /// Coordinate-wise order relation, `None` on a dimension mismatch.
    pub fn partial_order(&self, other: &Self) -> Option<DegreeOrder> {
        if self.dim() != other.dim() {
            return None;
        }
        let le = self.0.iter().zip(&other.0).all(|(a, b)| a <= b);
        let ge = self.0.iter().zip(&other.0).all(|(a, b)| a >= b);
        Some(match (le, ge) {
            (true, true) => DegreeOrder::Equal,
            (true, false) => DegreeOrder::LessOrEqual,
            (false, true) => DegreeOrder::GreaterOrEqual,
            (false, false) => DegreeOrder::Incomparable,
        })
    }

    /// `self <= other` coordinate-wise.
    pub fn le(&self, other: &Self) -> bool {
        matches!(
            self.partial_order(other),
            Some(DegreeOrder::Equal | DegreeOrder::LessOrEqual)
        )
    }
}

impl From<Vec<i64>> for Multidegree {
    fn from(v: Vec<i64>) -> Self {
        Multidegree(v)
    }
}

impl fmt::Display for Multidegree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.0.iter().join(","))
    }
}

impl Add for &Multidegree {
    type Output = Multidegree;
    fn add(self, rhs: &Multidegree) -> Multidegree {
        debug_assert_eq!(self.dim(), rhs.dim());
        Multidegree(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &Multidegree {
    type Output = Multidegree;
    fn sub(self, rhs: &Multidegree) -> Multidegree {
        debug_assert_eq!(self.dim(), rhs.dim());
        Multidegree(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &Multidegree {
    type Output = Multidegree;
    fn neg(self) -> Multidegree {
        Multidegree(self.0.iter().map(|c| -c).collect())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DegreeOrder {
    Equal,
    LessOrEqual,
    GreaterOrEqual,
    Incomparable,
}

pub fn compare_degrees(a: &Multidegree, b: &Multidegree) -> Result<DegreeOrder> {
    a.partial_order(b).ok_or(Error::DimensionMismatch {
        expected: a.dim(),
        found: b.dim(),
    })
}

/// A nonnegative count that may be infinite.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ExtCount {
    Finite(u64),
    Infinite,
}

impl ExtCount {
    pub fn is_finite(&self) -> bool {
        matches!(self, ExtCount::Finite(_))
    }

    pub fn finite(&self) -> Option<u64> {
        match self {
            ExtCount::Finite(n) => Some(*n),
            ExtCount::Infinite => None,
        }
    }
}

impl PartialOrd for ExtCount {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtCount {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (ExtCount::Finite(a), ExtCount::Finite(b)) => a.cmp(b),
            (ExtCount::Finite(_), ExtCount::Infinite) => Ordering::Less,
            (ExtCount::Infinite, ExtCount::Finite(_)) => Ordering::Greater,
            (ExtCount::Infinite, ExtCount::Infinite) => Ordering::Equal,
        }
    }
}

impl fmt::Display for ExtCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtCount::Finite(n) => write!(f, "{n}"),
            ExtCount::Infinite => write!(f, "infinite"),
        }
    }
}

impl Serialize for ExtCount {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ExtCount::Finite(n) => s.serialize_u64(*n),
            ExtCount::Infinite => s.serialize_str("infinite"),
        }
    }
}

impl<'de> Deserialize<'de> for ExtCount {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(u64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Int(n) => Ok(ExtCount::Finite(n)),
            Raw::Text(t) if t == "infinite" => Ok(ExtCount::Infinite),
            Raw::Text(t) => Err(serde::de::Error::custom(format!("bad count {t:?}"))),
        }
    }
}

/// An integer interval; a missing bound is unbounded on that side.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Interval {
    pub lo: Option<i64>,
    pub hi: Option<i64>,
}

impl Interval {
    pub fn closed(lo: i64, hi: i64) -> Self {
        Interval { lo: Some(lo), hi: Some(hi) }
    }

    pub fn at_least(lo: i64) -> Self {
        Interval { lo: Some(lo), hi: None }
    }

    pub fn at_most(hi: i64) -> Self {
        Interval { lo: None, hi: Some(hi) }
    }

    pub fn everything() -> Self {
        Interval { lo: None, hi: None }
    }

    pub fn contains(&self, v: i64) -> bool {
        self.lo.is_none_or(|lo| lo <= v) && self.hi.is_none_or(|hi| v <= hi)
    }

    pub fn is_bounded(&self) -> bool {
        self.lo.is_some() && self.hi.is_some()
    }

    pub fn count(&self) -> ExtCount {
        match (self.lo, self.hi) {
            (Some(lo), Some(hi)) if hi >= lo => ExtCount::Finite((hi - lo + 1) as u64),
            (Some(_), Some(_)) => ExtCount::Finite(0),
            _ => ExtCount::Infinite,
        }
    }

    /// Lower corner when there is one, otherwise the upper end (or 0).
    pub fn representative(&self) -> i64 {
        self.lo.or(self.hi).unwrap_or(0)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.lo, self.hi) {
            (Some(lo), Some(hi)) => write!(f, "[{lo},{hi}]"),
            (Some(lo), None) => write!(f, "[{lo},inf)"),
            (None, Some(hi)) => write!(f, "(-inf,{hi}]"),
            (None, None) => write!(f, "(-inf,inf)"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cell {
    pub intervals: Vec<Interval>,
    pub representative: Multidegree,
}

impl Cell {
    pub fn contains(&self, m: &Multidegree) -> bool {
        m.dim() == self.intervals.len()
            && self.intervals.iter().zip(m.coords()).all(|(iv, &c)| iv.contains(c))
    }

    pub fn lattice_count(&self) -> ExtCount {
        cell_lattice_count(self)
    }
}

/// Number of lattice points of a cell; infinite iff some side is unbounded.
pub fn cell_lattice_count(cell: &Cell) -> ExtCount {
    let mut total: u64 = 1;
    for iv in &cell.intervals {
        match iv.count() {
            ExtCount::Infinite => return ExtCount::Infinite,
            ExtCount::Finite(n) => total = total.saturating_mul(n),
        }
    }
    ExtCount::Finite(total)
}

/// A partition of Z^d into products of intervals cut at per-coordinate
/// thresholds. Cells are stored in row-major order with coordinate 0 most
/// significant.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellDecomposition {
    pub thresholds: Vec<Vec<i64>>,
    pub cells: Vec<Cell>,
}

impl CellDecomposition {
    /// Decomposition induced by explicit threshold lists (sorted, deduplicated
    /// here). Each list of k thresholds yields k + 1 intervals.
    pub fn from_thresholds(mut thresholds: Vec<Vec<i64>>) -> Self {
        for th in &mut thresholds {
            th.sort_unstable();
            th.dedup();
        }
        let per_axis: Vec<Vec<Interval>> = thresholds.iter().map(|th| axis_intervals(th)).collect();
        let cells = per_axis
            .iter()
            .map(|ivs| ivs.iter().copied())
            .multi_cartesian_product()
            .map(|intervals| {
                let representative = Multidegree(intervals.iter().map(Interval::representative).collect());
                Cell { intervals, representative }
            })
            .collect::<Vec<_>>();
        // multi_cartesian_product yields nothing for zero factors
        let cells = if thresholds.is_empty() {
            vec![Cell { intervals: vec![], representative: Multidegree(vec![]) }]
        } else {
            cells
        };
        CellDecomposition { thresholds, cells }
    }

    pub fn dim(&self) -> usize {
        self.thresholds.len()
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Index of the unique cell containing `m`.
    pub fn locate(&self, m: &Multidegree) -> usize {
        debug_assert_eq!(m.dim(), self.dim());
        let mut index = 0;
        for (th, &c) in self.thresholds.iter().zip(m.coords()) {
            let k = th.partition_point(|&t| t <= c);
            index = index * (th.len() + 1) + k;
        }
        index
    }

    /// The common refinement of two decompositions of the same Z^d.
    pub fn refine(&self, other: &Self) -> Self {
        let merged = self
            .thresholds
            .iter()
            .zip(&other.thresholds)
            .map(|(a, b)| a.iter().chain(b).copied().collect())
            .collect();
        Self::from_thresholds(merged)
    }
}

fn axis_intervals(th: &[i64]) -> Vec<Interval> {
    if th.is_empty() {
        return vec![Interval::everything()];
    }
    let mut out = Vec::with_capacity(th.len() + 1);
    out.push(Interval::at_most(th[0] - 1));
    for w in th.windows(2) {
        out.push(Interval::closed(w[0], w[1] - 1));
    }
    out.push(Interval::at_least(th[th.len() - 1]));
    out
}

/// Cuts Z^d so that, for every generator j and every s in -2..=2, membership
/// of `m + s*t` in the box `[a_j, a_j + cap_j]` is constant on each cell.
pub fn build_cell_decomposition(shifts: &[Multidegree], caps: &[Vec<Cap>], t: &Multidegree) -> CellDecomposition {
    assert_eq!(shifts.len(), caps.len(), "one cap vector per shift");
    let d = t.dim();
    let mut thresholds = vec![Vec::new(); d];
    for (shift, cap) in shifts.iter().zip(caps) {
        for i in 0..d {
            for s in -2..=2 {
                let offset = s * t.0[i];
                thresholds[i].push(shift.0[i] + offset);
                if let Some(u) = cap[i] {
                    thresholds[i].push(shift.0[i] + u as i64 + 1 + offset);
                }
            }
        }
    }
    CellDecomposition::from_thresholds(thresholds)
}

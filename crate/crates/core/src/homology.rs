//! Degreewise homology `H(D)_m = ker δ_m / im δ_(m-t)` over a whole
//! cell decomposition, giving exact global answers from finitely many
//! rank computations.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::degrees::{CellDecomposition, ExtCount, Interval, Multidegree};
use crate::dmcore::BoxDifferentialModule;
use crate::error::{Error, Result};
use crate::exactla::{homology_dim, Scalar};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomologySummary {
    pub decomposition: CellDecomposition,
    /// Homology dimension on each cell, in decomposition order.
    pub dims: Vec<usize>,
    pub finite_length: bool,
    pub total_length: ExtCount,
    /// Smallest box containing the support; `None` when `H = 0`.
    pub support_box: Option<Vec<Interval>>,
}

/// Where the homology lives along one coordinate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum DirectionBound {
    Empty,
    Bounded { lo: i64, hi: i64 },
    Unbounded,
}

impl DirectionBound {
    pub fn is_bounded(&self) -> bool {
        !matches!(self, DirectionBound::Unbounded)
    }
}

impl HomologySummary {
    fn from_dims(decomposition: CellDecomposition, dims: Vec<usize>) -> Self {
        let mut total = ExtCount::Finite(0);
        let d = decomposition.dim();
        let mut support: Option<Vec<Interval>> = None;
        for (cell, &dim) in decomposition.cells.iter().zip(&dims) {
            if dim == 0 {
                continue;
            }
            total = match (total, cell.lattice_count()) {
                (ExtCount::Finite(acc), ExtCount::Finite(n)) => ExtCount::Finite(acc + dim as u64 * n),
                _ => ExtCount::Infinite,
            };
            let merged = match support.take() {
                None => cell.intervals.clone(),
                Some(prev) => prev
                    .iter()
                    .zip(&cell.intervals)
                    .map(|(a, b)| Interval {
                        lo: a.lo.zip(b.lo).map(|(x, y)| x.min(y)),
                        hi: a.hi.zip(b.hi).map(|(x, y)| x.max(y)),
                    })
                    .collect(),
            };
            support = Some(merged);
        }
        debug_assert!(support.as_ref().is_none_or(|s| s.len() == d));
        HomologySummary {
            decomposition,
            dims,
            finite_length: total.is_finite(),
            total_length: total,
            support_box: support,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.dims.iter().all(|&x| x == 0)
    }

    pub fn dimension_at(&self, m: &Multidegree) -> usize {
        self.dims[self.decomposition.locate(m)]
    }

    /// Same homology dimension at every degree.
    pub fn agrees_with(&self, other: &Self) -> bool {
        if self.decomposition.dim() != other.decomposition.dim() {
            return false;
        }
        self.decomposition
            .refine(&other.decomposition)
            .cells
            .iter()
            .all(|c| self.dimension_at(&c.representative) == other.dimension_at(&c.representative))
    }

    /// The summary of the same homology moved by `by` (degree `m` becomes
    /// `m + by`).
    pub fn shifted(&self, by: &Multidegree) -> Self {
        let thresholds = self
            .decomposition
            .thresholds
            .iter()
            .zip(by.coords())
            .map(|(th, &s)| th.iter().map(|x| x + s).collect())
            .collect();
        Self::from_dims(CellDecomposition::from_thresholds(thresholds), self.dims.clone())
    }

    /// Nonzero homology as `(degree, dimension)` pairs when the length is finite.
    pub fn support_points(&self) -> Option<Vec<(Multidegree, usize)>> {
        if !self.finite_length {
            return None;
        }
        let mut out = Vec::new();
        for (cell, &dim) in self.decomposition.cells.iter().zip(&self.dims) {
            if dim == 0 {
                continue;
            }
            let ranges: Vec<Vec<i64>> = cell
                .intervals
                .iter()
                .map(|iv| (iv.lo.expect("finite cell")..=iv.hi.expect("finite cell")).collect())
                .collect();
            if ranges.is_empty() {
                out.push((Multidegree(vec![]), dim));
                continue;
            }
            use itertools::Itertools;
            for p in ranges.into_iter().multi_cartesian_product() {
                out.push((Multidegree(p), dim));
            }
        }
        out.sort();
        Some(out)
    }
}

/// `dim_k H(D)_m`.
pub fn homology_at<K: Scalar>(module: &BoxDifferentialModule<K>, m: &Multidegree) -> Result<usize> {
    if m.dim() != module.d() {
        return Err(Error::DimensionMismatch { expected: module.d(), found: m.dim() });
    }
    let c = module.degree_component(m);
    homology_dim(&c.incoming, &c.outgoing).map_err(|e| match e {
        Error::NotAComplex(msg) => Error::NotAComplex(format!("degree {m}: {msg}")),
        other => other,
    })
}

/// Homology on every cell of the module's decomposition. Cells with the same
/// generator-membership patterns share one computation.
pub fn homology_summary<K: Scalar>(module: &BoxDifferentialModule<K>) -> Result<HomologySummary> {
    let entry_problems = module.entry_violations();
    if !entry_problems.is_empty() {
        return Err(Error::InvalidModule(entry_problems));
    }
    let decomposition = module.cell_decomposition();
    let t = module.diff_degree();
    let pattern = |m: &Multidegree| -> Vec<usize> {
        module.generators().iter().enumerate().filter(|(_, g)| g.present_at(m)).map(|(j, _)| j).collect()
    };
    let mut keys: HashMap<[Vec<usize>; 3], usize> = HashMap::new();
    let mut unique: Vec<Multidegree> = Vec::new();
    let cell_key: Vec<usize> = decomposition
        .cells
        .iter()
        .map(|cell| {
            let m = &cell.representative;
            let key = [pattern(&(m - t)), pattern(m), pattern(&(m + t))];
            *keys.entry(key).or_insert_with(|| {
                unique.push(m.clone());
                unique.len() - 1
            })
        })
        .collect();
    let values: Vec<usize> =
        unique.par_iter().map(|m| homology_at(module, m)).collect::<Result<Vec<_>>>()?;
    let dims = cell_key.iter().map(|&k| values[k]).collect();
    Ok(HomologySummary::from_dims(decomposition, dims))
}

/// Extent of the homology along coordinate `axis`.
pub fn bounded_in_direction(summary: &HomologySummary, axis: usize) -> DirectionBound {
    match &summary.support_box {
        None => DirectionBound::Empty,
        Some(b) => match (b[axis].lo, b[axis].hi) {
            (Some(lo), Some(hi)) => DirectionBound::Bounded { lo, hi },
            _ => DirectionBound::Unbounded,
        },
    }
}

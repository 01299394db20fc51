//! Gaussian cancellation of unit entries, minimization, and free flags.
//!
//! A unit entry `c_ij` (monomial 1) pairs `e_j` with `δ(e_j)`; the span of the
//! two is an acyclic differential submodule, and the quotient by it has the
//! same homology and two fewer generators. Repeating until no unit is left
//! gives a module with `δ(D) ⊆ 𝔪D`. For `t <= 0` the cancelled pairs and the
//! minimal core layer into a free flag.

use serde::{Deserialize, Serialize};

use crate::dmcore::BoxDifferentialModule;
use crate::error::{Error, Result};
use crate::exactla::{Scalar, ScalarMatrix};

/// Filtration level of every generator. A valid order has
/// `level(row) < level(col)` for each nonzero entry, so `δ(F^n) ⊆ F^(n-1)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FlagOrder {
    pub levels: Vec<usize>,
}

impl FlagOrder {
    pub fn new(levels: Vec<usize>) -> Self {
        FlagOrder { levels }
    }

    pub fn height(&self) -> usize {
        self.levels.iter().max().map_or(0, |&m| m + 1)
    }
}

/// Record of one cancellation of the pair `(row, col)` with `c_(row,col) = unit`.
#[derive(Clone, Debug, PartialEq)]
pub struct CancellationStep<K> {
    /// Indices in the module the step was applied to.
    pub row: usize,
    pub col: usize,
    /// Indices of the same generators in the module minimization started from.
    pub original: (usize, usize),
    pub unit: K,
    /// Rows `row` and `col` restricted to the surviving columns.
    pub pivot_rows: ScalarMatrix<K>,
    /// Columns `row` and `col` restricted to the surviving rows.
    pub pivot_cols: ScalarMatrix<K>,
}

#[derive(Clone, Debug)]
pub struct Minimization<K> {
    pub module: BoxDifferentialModule<K>,
    pub steps: Vec<CancellationStep<K>>,
    /// Original index of each surviving generator.
    pub survivors: Vec<usize>,
    /// The minimal module is a direct summand (guaranteed for `t <= 0`).
    pub direct_summand: bool,
}

/// A free flag on a module after a graded change of basis.
///
/// The columns of `basis` are the new basis vectors; `rebased` is the module
/// rewritten in that basis and `order` is a valid [`FlagOrder`] for it.
#[derive(Clone, Debug)]
pub struct FlagConstruction<K> {
    pub order: FlagOrder,
    pub basis: ScalarMatrix<K>,
    pub rebased: BoxDifferentialModule<K>,
    pub minimization: Minimization<K>,
}

impl<K: Scalar> FlagConstruction<K> {
    pub fn basis_is_identity(&self) -> bool {
        self.basis == ScalarMatrix::identity(self.basis.rows())
    }
}

fn is_unit_entry<K: Scalar>(m: &BoxDifferentialModule<K>, row: usize, col: usize) -> bool {
    !m.coefficient(row, col).is_zero() && m.entry_exponent(row, col).is_zero()
}

/// The lexicographically first off-diagonal `(row, col)` whose entry is a
/// nonzero scalar times 1. `None` means `δ(D) ⊆ 𝔪D`.
///
/// A diagonal unit never occurs alone in a valid module: its column then
/// holds another unit, so skipping the diagonal loses nothing.
pub fn find_unit_entry<K: Scalar>(module: &BoxDifferentialModule<K>) -> Result<Option<(usize, usize)>> {
    if !module.is_free() {
        return Err(Error::CapsPresent);
    }
    let n = module.rank();
    for row in 0..n {
        for col in 0..n {
            if row != col && is_unit_entry(module, row, col) {
                return Ok(Some((row, col)));
            }
        }
    }
    Ok(None)
}

/// Quotient by `span(e_col, δ(e_col))`, using `c_(row,col)` as the unit.
/// The remaining entries become `c_kl - c_(k,col) u⁻¹ c_(row,l)`.
pub fn cancel<K: Scalar>(
    module: &BoxDifferentialModule<K>,
    row: usize,
    col: usize,
) -> Result<(BoxDifferentialModule<K>, CancellationStep<K>)> {
    if !module.is_free() {
        return Err(Error::CapsPresent);
    }
    let n = module.rank();
    if row >= n || col >= n {
        return Err(Error::Shape(format!("pivot ({}, {}) outside {n} generators", row + 1, col + 1)));
    }
    if row == col || !is_unit_entry(module, row, col) {
        return Err(Error::NotAUnit { row: row + 1, col: col + 1 });
    }
    let unit = module.coefficient(row, col).clone();
    let inv = unit.inverse().expect("nonzero scalar");
    let rest: Vec<usize> = (0..n).filter(|&k| k != row && k != col).collect();
    let mut coeffs = module.coeffs().select(&rest, &rest);
    for (a, &k) in rest.iter().enumerate() {
        let left = module.coefficient(k, col);
        if left.is_zero() || !module.entry_exponent(k, col).is_nonnegative() {
            continue;
        }
        let left = left.clone() * inv.clone();
        for (b, &l) in rest.iter().enumerate() {
            let right = module.coefficient(row, l);
            if right.is_zero() || !module.entry_exponent(row, l).is_nonnegative() {
                continue;
            }
            let v = coeffs.get(a, b).clone() - left.clone() * right.clone();
            coeffs.set(a, b, v);
        }
    }
    let generators = rest.iter().map(|&k| module.generators()[k].clone()).collect();
    let reduced = BoxDifferentialModule::new(*module.ring(), generators, module.diff_degree().clone(), coeffs)?;
    let step = CancellationStep {
        row,
        col,
        original: (row, col),
        unit,
        pivot_rows: module.coeffs().select(&[row, col], &rest),
        pivot_cols: module.coeffs().select(&rest, &[row, col]),
    };
    Ok((reduced, step))
}

/// Cancels unit entries until none remain.
pub fn minimize<K: Scalar>(module: &BoxDifferentialModule<K>) -> Result<Minimization<K>> {
    let mut current = module.clone();
    let mut survivors: Vec<usize> = (0..module.rank()).collect();
    let mut steps = Vec::new();
    while let Some((row, col)) = find_unit_entry(&current)? {
        let (next, mut step) = cancel(&current, row, col)?;
        step.original = (survivors[row], survivors[col]);
        survivors.retain(|&k| k != step.original.0 && k != step.original.1);
        steps.push(step);
        current = next;
    }
    Ok(Minimization {
        module: current,
        steps,
        survivors,
        direct_summand: module.diff_degree().is_nonpositive(),
    })
}

/// Replays cancellations given as `(row, col)` pivots in order.
pub fn replay_cancellations<K: Scalar>(
    module: &BoxDifferentialModule<K>,
    pivots: &[(usize, usize)],
) -> Result<BoxDifferentialModule<K>> {
    let mut current = module.clone();
    for &(row, col) in pivots {
        current = cancel(&current, row, col)?.0;
    }
    Ok(current)
}

/// True iff `level(i) < level(j)` for every nonzero `c_ij`.
pub fn verify_flag<K: Scalar>(module: &BoxDifferentialModule<K>, order: &FlagOrder) -> bool {
    order.levels.len() == module.rank() && module.entries().all(|(i, j, _)| order.levels[i] < order.levels[j])
}

/// Longest-path layering of the dependency digraph `i -> j` for nonzero
/// `c_ij`; `None` when it has a cycle (including a nonzero diagonal).
fn layer_acyclic<K: Scalar>(module: &BoxDifferentialModule<K>) -> Option<Vec<usize>> {
    let n = module.rank();
    let mut indegree = vec![0usize; n];
    for (_, j, _) in module.entries() {
        indegree[j] += 1;
    }
    let mut ready: Vec<usize> = (0..n).filter(|&j| indegree[j] == 0).collect();
    let mut levels = vec![0usize; n];
    let mut seen = 0;
    while let Some(i) = ready.pop() {
        seen += 1;
        for j in 0..n {
            if module.coefficient(i, j).is_zero() {
                continue;
            }
            levels[j] = levels[j].max(levels[i] + 1);
            indegree[j] -= 1;
            if indegree[j] == 0 {
                ready.push(j);
            }
        }
    }
    (seen == n).then_some(levels)
}

/// Builds a free flag for a free module with `t <= 0`.
///
/// When the generators themselves layer, the basis is left alone. Otherwise
/// the `s`-th cancelled pair `(i, j)` gets levels `2s` and `2s + 1`, with
/// basis vector `i` replaced by the current image of `e_j`, and the minimal
/// core is layered above all pairs.
pub fn build_flag<K: Scalar>(module: &BoxDifferentialModule<K>) -> Result<FlagConstruction<K>> {
    if !module.diff_degree().is_nonpositive() {
        return Err(Error::PositiveDifferentialDegree(module.diff_degree().0.clone()));
    }
    if !module.is_free() {
        return Err(Error::CapsPresent);
    }
    let n = module.rank();
    if let Some(levels) = layer_acyclic(module) {
        let minimization = minimize(module)?;
        return Ok(FlagConstruction {
            order: FlagOrder::new(levels),
            basis: ScalarMatrix::identity(n),
            rebased: module.clone(),
            minimization,
        });
    }
    let mut basis = ScalarMatrix::identity(n);
    let mut levels = vec![0usize; n];
    let mut current = module.clone();
    let mut survivors: Vec<usize> = (0..n).collect();
    let mut steps = Vec::new();
    while let Some((row, col)) = find_unit_entry(&current)? {
        let s = steps.len();
        let (i, j) = (survivors[row], survivors[col]);
        for (k, &orig) in survivors.iter().enumerate() {
            basis.set(orig, i, current.coefficient(k, col).clone());
        }
        levels[i] = 2 * s;
        levels[j] = 2 * s + 1;
        let (next, mut step) = cancel(&current, row, col)?;
        step.original = (i, j);
        survivors.retain(|&k| k != i && k != j);
        steps.push(step);
        current = next;
    }
    let base = 2 * steps.len();
    let core = layer_acyclic(&current).ok_or_else(|| Error::Internal("minimal core is not layered".into()))?;
    for (k, level) in core.into_iter().enumerate() {
        levels[survivors[k]] = base + level;
    }
    let order = FlagOrder::new(levels);
    let rebased = if steps.is_empty() { module.clone() } else { module.change_basis(&basis)? };
    if !verify_flag(&rebased, &order) {
        return Err(Error::Internal("constructed flag fails verification".into()));
    }
    let minimization = Minimization { module: current, steps, survivors, direct_summand: true };
    Ok(FlagConstruction { order, basis, rebased, minimization })
}

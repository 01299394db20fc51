//! `Tor(k, D)` through the Koszul complex, Betti numbers, high-low
//! decompositions and the slice inequality for Tor lengths.

use serde::{Deserialize, Serialize};

use crate::degrees::ExtCount;
use crate::dmcore::{box_tensor, koszul, BoxDifferentialModule, TruncateSide};
use crate::error::{Error, Result};
use crate::exactla::{rank, Scalar};
use crate::homology::{bounded_in_direction, homology_summary, DirectionBound, HomologySummary};
use crate::structure::{replay_cancellations, verify_flag, FlagOrder};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BettiMethod {
    GradedTor,
    FlagReduction,
    Provenance,
}

impl BettiMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            BettiMethod::GradedTor => "graded-tor",
            BettiMethod::FlagReduction => "flag-reduction",
            BettiMethod::Provenance => "provenance",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BettiResult {
    pub value: usize,
    pub method: BettiMethod,
    /// `rank(C̄)` for the flag-reduction method.
    pub reduced_rank: Option<usize>,
}

/// `D` is obtained from `source` by cancelling `pivots` in order, and `flag`
/// is a flag order for `source`. Pivot indices are 0-based.
#[derive(Clone, Debug, PartialEq)]
pub struct CancellationProvenance<K> {
    pub source: BoxDifferentialModule<K>,
    pub flag: FlagOrder,
    pub pivots: Vec<(usize, usize)>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum BettiWitness<K> {
    Flag(FlagOrder),
    Provenance(CancellationProvenance<K>),
}

/// `H(K ⊠ D)` for the Koszul complex `K` on all variables.
pub fn tor_k<K: Scalar>(module: &BoxDifferentialModule<K>) -> Result<HomologySummary> {
    if !module.diff_degree().is_zero() {
        return Err(Error::NonzeroDifferentialDegree(module.diff_degree().0.clone()));
    }
    let axes: Vec<usize> = (0..module.d()).collect();
    let complex = koszul(*module.ring(), &axes)?;
    let summary = homology_summary(&box_tensor(&complex, module)?)?;
    if !summary.finite_length {
        return Err(Error::Internal("Tor against k has infinite length".into()));
    }
    Ok(summary)
}

fn finite(count: ExtCount) -> Result<usize> {
    count.finite().map(|n| n as usize).ok_or_else(|| Error::Internal("unexpected infinite length".into()))
}

/// `n - 2 rank(C̄)` after checking that `order` is a flag for `module`.
pub fn flag_reduction_betti<K: Scalar>(module: &BoxDifferentialModule<K>, order: &FlagOrder) -> Result<BettiResult> {
    if !module.is_free() {
        return Err(Error::CapsPresent);
    }
    if !verify_flag(module, order) {
        return Err(Error::InvalidFlag);
    }
    let r = rank(&module.reduced_matrix());
    Ok(BettiResult { value: module.rank() - 2 * r, method: BettiMethod::FlagReduction, reduced_rank: Some(r) })
}

/// `β(D) = dim_k Tor(k, D)`.
///
/// With `t = 0` this is the graded Tor; a flag witness is then cross-checked.
/// Otherwise a flag or cancellation provenance is required.
pub fn betti<K: Scalar>(module: &BoxDifferentialModule<K>, witness: Option<&BettiWitness<K>>) -> Result<BettiResult> {
    let graded = if module.diff_degree().is_zero() {
        let value = finite(tor_k(module)?.total_length)?;
        Some(BettiResult { value, method: BettiMethod::GradedTor, reduced_rank: None })
    } else {
        None
    };
    match witness {
        None => graded.ok_or_else(|| Error::Unsupported("supply a flag order or provenance".into())),
        Some(BettiWitness::Flag(order)) => {
            let flagged = flag_reduction_betti(module, order)?;
            if let Some(g) = graded {
                if g.value != flagged.value {
                    return Err(Error::Internal(format!(
                        "graded Tor gives {} but flag reduction gives {}",
                        g.value, flagged.value
                    )));
                }
            }
            Ok(flagged)
        }
        Some(BettiWitness::Provenance(p)) => {
            let replayed = replay_cancellations(&p.source, &p.pivots)?;
            if &replayed != module {
                return Err(Error::ProvenanceMismatch("replayed cancellations do not reproduce the module".into()));
            }
            let value = flag_reduction_betti(&p.source, &p.flag)?.value;
            if let Some(g) = graded {
                if g.value != value {
                    return Err(Error::Internal(format!(
                        "graded Tor gives {} but the provenance flag gives {value}",
                        g.value
                    )));
                }
            }
            Ok(BettiResult { value, method: BettiMethod::Provenance, reduced_rank: None })
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct HighLowDecomposition<K> {
    pub axis: usize,
    /// Least and greatest coordinate values carrying homology.
    pub low_value: i64,
    pub high_value: i64,
    pub truncated: BoxDifferentialModule<K>,
    pub low: BoxDifferentialModule<K>,
    pub high: BoxDifferentialModule<K>,
}

/// Truncates to the coordinate range `[a, b]` of the homology along `axis`
/// and slices at both ends.
pub fn high_low<K: Scalar>(module: &BoxDifferentialModule<K>, axis: usize) -> Result<HighLowDecomposition<K>> {
    if axis >= module.d() {
        return Err(Error::AxisOutOfRange { axis, d: module.d() });
    }
    if module.diff_degree().0[axis] != 0 {
        return Err(Error::NonzeroAxisDegree { axis });
    }
    let summary = homology_summary(module)?;
    let (a, b) = match bounded_in_direction(&summary, axis) {
        DirectionBound::Empty => return Err(Error::ZeroHomology),
        DirectionBound::Unbounded => return Err(Error::UnboundedHomology { axis }),
        DirectionBound::Bounded { lo, hi } => (lo, hi),
    };
    // The support box is exact per coordinate: its ends are attained by cells
    // with nonzero homology.
    let truncated = module.truncate(axis, a, TruncateSide::Below)?.truncate(axis, b, TruncateSide::Above)?;
    let low = truncated.slice(axis, a)?;
    let high = truncated.slice(axis, b)?;
    if low.rank() == 0 || high.rank() == 0 {
        return Err(Error::Internal("high-low slice has no generators".into()));
    }
    Ok(HighLowDecomposition { axis, low_value: a, high_value: b, truncated, low, high })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorInequalityReport {
    pub axis: usize,
    pub lhs: usize,
    pub rhs_low: usize,
    pub rhs_high: usize,
    pub holds: bool,
}

/// `λ(Tor(k, D′)) >= λ(Tor(k, D′_ℓ)) + λ(Tor(k, D′_h))` with `λ` the total length.
pub fn check_tor_inequality<K: Scalar>(module: &BoxDifferentialModule<K>, axis: usize) -> Result<TorInequalityReport> {
    if module.d() == 0 {
        return Err(Error::AxisOutOfRange { axis, d: 0 });
    }
    let hl = high_low(module, axis)?;
    let lhs = finite(tor_k(&hl.truncated)?.total_length)?;
    let rhs_low = finite(tor_k(&hl.low)?.total_length)?;
    let rhs_high = finite(tor_k(&hl.high)?.total_length)?;
    Ok(TorInequalityReport { axis, lhs, rhs_low, rhs_high, holds: lhs >= rhs_low + rhs_high })
}

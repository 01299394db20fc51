use serde::{Deserialize, Serialize};

use super::{BoxDifferentialModule, GeneratorSpec};
use crate::degrees::Multidegree;
use crate::error::{Error, Result};
use crate::exactla::{Scalar, ScalarMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TruncateSide {
    /// Keep degrees with coordinate `>= bound` (a submodule).
    Below,
    /// Keep degrees with coordinate `<= bound` (a quotient).
    Above,
}

impl<K: Scalar> BoxDifferentialModule<K> {
    /// The twist `D(n)`: every generator moves from degree `a` to `a - n`.
    pub fn twist(&self, n: &Multidegree) -> Result<Self> {
        if n.dim() != self.d() {
            return Err(Error::DimensionMismatch { expected: self.d(), found: n.dim() });
        }
        let generators = self
            .generators
            .iter()
            .map(|g| GeneratorSpec { shift: &g.shift - n, cap: g.cap.clone() })
            .collect();
        Self::new(self.ring, generators, self.diff_degree.clone(), self.coeffs.clone())
    }

    /// Generators concatenated, differential block-diagonal.
    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        if self.ring != other.ring || self.diff_degree != other.diff_degree {
            return Err(Error::Incompatible);
        }
        let generators = self.generators.iter().chain(&other.generators).cloned().collect();
        Self::new(self.ring, generators, self.diff_degree.clone(), self.coeffs.block_diagonal(&other.coeffs))
    }

    /// Rewrites δ in the basis given by the columns of `g`, a degree-0 monomial
    /// matrix (entry `(i, j)` carries `x^(a_j - a_i)`). The new coefficient
    /// matrix is `g⁻¹ c g`.
    pub fn change_basis(&self, g: &ScalarMatrix<K>) -> Result<Self> {
        if !self.is_free() {
            return Err(Error::CapsPresent);
        }
        let n = self.rank();
        if g.shape() != (n, n) {
            return Err(Error::Shape(format!("basis change must be {n}x{n}")));
        }
        for (i, j, _) in g.nonzero_entries() {
            if !(&self.generators[j].shift - &self.generators[i].shift).is_nonnegative() {
                return Err(Error::Shape(format!(
                    "basis change entry ({}, {}) has no degree-0 monomial",
                    i + 1,
                    j + 1
                )));
            }
        }
        let inv = g.inverse().ok_or(Error::NotInvertible)?;
        let coeffs = inv.mul(&self.coeffs)?.mul(g)?;
        Self::new(self.ring, self.generators.clone(), self.diff_degree.clone(), coeffs)
    }

    /// The piece `⊕_{m_axis = value} D_m` as a module over the ring without
    /// `x_axis`.
    pub fn slice(&self, axis: usize, value: i64) -> Result<Self> {
        self.check_axis(axis)?;
        if self.diff_degree.0[axis] != 0 {
            return Err(Error::NonzeroAxisDegree { axis });
        }
        let kept: Vec<usize> = (0..self.rank())
            .filter(|&j| {
                let g = &self.generators[j];
                let e = value - g.shift.0[axis];
                e >= 0 && g.cap[axis].is_none_or(|u| e <= u as i64)
            })
            .collect();
        let generators = kept
            .iter()
            .map(|&j| {
                let g = &self.generators[j];
                let mut cap = g.cap.clone();
                cap.remove(axis);
                GeneratorSpec { shift: g.shift.without(axis), cap }
            })
            .collect();
        // The x_axis-parts of source and target basis elements always match up
        // inside one slice, so every entry between kept generators survives.
        Self::new(
            self.ring.drop_variable(),
            generators,
            self.diff_degree.without(axis),
            self.coeffs.select(&kept, &kept),
        )
    }

    /// Restricts coordinate `axis` to `>= bound` (`Below`) or `<= bound`
    /// (`Above`). Generators left with no basis elements are dropped.
    pub fn truncate(&self, axis: usize, bound: i64, side: TruncateSide) -> Result<Self> {
        self.check_axis(axis)?;
        if self.diff_degree.0[axis] != 0 {
            return Err(Error::NonzeroAxisDegree { axis });
        }
        let mut kept = Vec::new();
        let mut generators = Vec::new();
        for (j, g) in self.generators.iter().enumerate() {
            let a = g.shift.0[axis];
            let cap = g.cap[axis];
            let mut g2 = g.clone();
            match side {
                TruncateSide::Below => {
                    let raise = (bound - a).max(0);
                    if cap.is_some_and(|u| (u as i64) < raise) {
                        continue;
                    }
                    g2.shift.0[axis] = a + raise;
                    g2.cap[axis] = cap.map(|u| u - raise as u64);
                }
                TruncateSide::Above => {
                    if bound < a {
                        continue;
                    }
                    let room = (bound - a) as u64;
                    g2.cap[axis] = Some(cap.map_or(room, |u| u.min(room)));
                }
            }
            kept.push(j);
            generators.push(g2);
        }
        Self::new(self.ring, generators, self.diff_degree.clone(), self.coeffs.select(&kept, &kept))
    }

    /// The scalar matrix of entries whose monomial is 1 (δ reduced mod 𝔪).
    pub fn reduced_matrix(&self) -> ScalarMatrix<K> {
        let n = self.rank();
        let mut out = ScalarMatrix::zeros(n, n);
        for (r, c, v) in self.entries() {
            if self.entry_exponent(r, c).is_zero() {
                out.set(r, c, v.clone());
            }
        }
        out
    }

    /// `δ(D) ⊆ 𝔪D`: no nonzero entry carries the monomial 1.
    pub fn is_minimal(&self) -> bool {
        self.entries().all(|(r, c, _)| !self.entry_exponent(r, c).is_zero())
    }

    /// True iff `δ = 0`.
    pub fn has_zero_differential(&self) -> bool {
        self.coeffs.nonzero_entries().next().is_none()
    }
}

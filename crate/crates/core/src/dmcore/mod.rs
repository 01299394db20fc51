//! Finely graded differential modules over `k[x_1, ..., x_d]`.
//!
//! A [`BoxDifferentialModule`] has finitely many generators. Generator `j`
//! sits in degree `a_j` and spans the monomials `x^e e_j` with
//! `0 <= e <= cap_j`; an infinite cap in every coordinate gives a free summand
//! `R(-a_j)`. The differential has a single degree `t`, so it is determined by
//! scalars `c_ij`: `δ(e_j)` contains `c_ij * x^(a_j + t - a_i) * e_i`.

mod complex;
mod ops;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::degrees::{build_cell_decomposition, Cap, CellDecomposition, Multidegree};
use crate::error::{Error, Result};
use crate::exactla::{FieldSpec, Scalar, ScalarMatrix};

pub use complex::{box_tensor, compress, koszul, ComplexLevel, GradedComplex};
pub use ops::TruncateSide;

/// The ring `k[x_1, ..., x_d]`. The maximal ideal is implicit: an entry lies in
/// it iff its monomial exponent is nonzero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RingContext {
    pub d: usize,
    pub field: FieldSpec,
}

impl RingContext {
    pub fn new(d: usize, field: FieldSpec) -> Self {
        RingContext { d, field }
    }

    /// The ring with one variable fewer.
    pub fn drop_variable(&self) -> Self {
        RingContext { d: self.d.saturating_sub(1), field: self.field }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub shift: Multidegree,
    pub cap: Vec<Cap>,
}

impl GeneratorSpec {
    pub fn free(shift: Multidegree) -> Self {
        let d = shift.dim();
        GeneratorSpec { shift, cap: vec![None; d] }
    }

    pub fn is_free(&self) -> bool {
        self.cap.iter().all(Option::is_none)
    }

    /// Exponent `m - a` of this generator's basis element in degree `m`, if
    /// that element exists.
    pub fn exponent_at(&self, m: &Multidegree) -> Option<Multidegree> {
        let e = m - &self.shift;
        let inside = e
            .coords()
            .iter()
            .zip(&self.cap)
            .all(|(&c, cap)| c >= 0 && cap.is_none_or(|u| c <= u as i64));
        inside.then_some(e)
    }

    pub fn present_at(&self, m: &Multidegree) -> bool {
        self.exponent_at(m).is_some()
    }
}

/// A basis element `x^exponent * e_generator` of one graded piece.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BasisLabel {
    pub generator: usize,
    pub exponent: Multidegree,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoxDifferentialModule<K> {
    ring: RingContext,
    generators: Vec<GeneratorSpec>,
    diff_degree: Multidegree,
    coeffs: ScalarMatrix<K>,
}

/// The two maps through degree `m`: `incoming = δ_(m-t)` and `outgoing = δ_m`.
#[derive(Clone, Debug)]
pub struct ComponentData<K> {
    pub degree: Multidegree,
    pub basis_prev: Vec<BasisLabel>,
    pub basis: Vec<BasisLabel>,
    pub basis_next: Vec<BasisLabel>,
    pub incoming: ScalarMatrix<K>,
    pub outgoing: ScalarMatrix<K>,
}

/// Why a module fails validation. Generator indices are 0-based.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Violation {
    Structure { message: String },
    MissingMonomial { row: usize, col: usize, exponent: Multidegree },
    CapIncompatible { row: usize, col: usize, axis: usize },
    SquareNonzero { degree: Multidegree, row: BasisLabel, col: BasisLabel, value: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Structure { message } => write!(f, "malformed module: {message}"),
            Violation::MissingMonomial { row, col, exponent } => write!(
                f,
                "entry ({}, {}) is nonzero but x^{exponent} does not exist",
                row + 1,
                col + 1
            ),
            Violation::CapIncompatible { row, col, axis } => write!(
                f,
                "entry ({}, {}) is not R-linear: cap of generator {} in coordinate {} is too small",
                row + 1,
                col + 1,
                col + 1,
                axis + 1
            ),
            Violation::SquareNonzero { degree, row, col, value } => write!(
                f,
                "δ² ≠ 0 at degree {degree}: x^{} e{} ↦ {value}·x^{} e{}",
                col.exponent,
                col.generator + 1,
                row.exponent,
                row.generator + 1
            ),
        }
    }
}

impl<K: Scalar> BoxDifferentialModule<K> {
    /// Checks shapes only; use [`validate`](Self::validate) for `δ² = 0`.
    pub fn new(
        ring: RingContext,
        generators: Vec<GeneratorSpec>,
        diff_degree: Multidegree,
        coeffs: ScalarMatrix<K>,
    ) -> Result<Self> {
        let n = generators.len();
        if coeffs.shape() != (n, n) {
            return Err(Error::Shape(format!(
                "{n} generators need a {n}x{n} coefficient matrix, got {}x{}",
                coeffs.rows(),
                coeffs.cols()
            )));
        }
        if diff_degree.dim() != ring.d {
            return Err(Error::DimensionMismatch { expected: ring.d, found: diff_degree.dim() });
        }
        for g in &generators {
            if g.shift.dim() != ring.d {
                return Err(Error::DimensionMismatch { expected: ring.d, found: g.shift.dim() });
            }
            if g.cap.len() != ring.d {
                return Err(Error::DimensionMismatch { expected: ring.d, found: g.cap.len() });
            }
        }
        if !K::supports(&ring.field) {
            return Err(Error::FieldMismatch(format!("scalar type cannot represent {}", ring.field)));
        }
        Ok(BoxDifferentialModule { ring, generators, diff_degree, coeffs })
    }

    /// The module with no generators.
    pub fn zero(ring: RingContext, diff_degree: Multidegree) -> Self {
        BoxDifferentialModule { ring, generators: vec![], diff_degree, coeffs: ScalarMatrix::zeros(0, 0) }
    }

    /// Free module with zero differential of degree `t`.
    pub fn free_with_zero_differential(ring: RingContext, shifts: Vec<Multidegree>, t: Multidegree) -> Result<Self> {
        let n = shifts.len();
        Self::new(ring, shifts.into_iter().map(GeneratorSpec::free).collect(), t, ScalarMatrix::zeros(n, n))
    }

    /// Builds a module from 0-based `(row, col, coefficient)` triples.
    pub fn from_entries(
        ring: RingContext,
        generators: Vec<GeneratorSpec>,
        diff_degree: Multidegree,
        entries: impl IntoIterator<Item = (usize, usize, K)>,
    ) -> Result<Self> {
        let n = generators.len();
        let mut coeffs = ScalarMatrix::zeros(n, n);
        for (r, c, v) in entries {
            if r >= n || c >= n {
                return Err(Error::Shape(format!("entry ({}, {}) outside {n} generators", r + 1, c + 1)));
            }
            coeffs.set(r, c, v);
        }
        Self::new(ring, generators, diff_degree, coeffs)
    }

    pub fn ring(&self) -> &RingContext {
        &self.ring
    }

    pub fn d(&self) -> usize {
        self.ring.d
    }

    pub fn field(&self) -> &FieldSpec {
        &self.ring.field
    }

    pub fn generators(&self) -> &[GeneratorSpec] {
        &self.generators
    }

    pub fn diff_degree(&self) -> &Multidegree {
        &self.diff_degree
    }

    pub fn coeffs(&self) -> &ScalarMatrix<K> {
        &self.coeffs
    }

    /// Number of generators (the R-rank when the module is free).
    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    pub fn is_free(&self) -> bool {
        self.generators.iter().all(GeneratorSpec::is_free)
    }

    pub fn shifts(&self) -> Vec<Multidegree> {
        self.generators.iter().map(|g| g.shift.clone()).collect()
    }

    pub fn coefficient(&self, row: usize, col: usize) -> &K {
        self.coeffs.get(row, col)
    }

    /// `a_col + t - a_row`: the exponent of the monomial carried by entry
    /// `(row, col)`.
    pub fn entry_exponent(&self, row: usize, col: usize) -> Multidegree {
        &(&self.generators[col].shift + &self.diff_degree) - &self.generators[row].shift
    }

    /// Nonzero entries `(row, col, coefficient)`.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &K)> + '_ {
        self.coeffs.nonzero_entries()
    }

    /// An element of `K` for the integer `n` in this module's field.
    pub fn scalar(&self, n: i64) -> K {
        K::from_int(n, &self.ring.field)
    }

    pub fn cell_decomposition(&self) -> CellDecomposition {
        let shifts = self.shifts();
        let caps: Vec<Vec<Cap>> = self.generators.iter().map(|g| g.cap.clone()).collect();
        build_cell_decomposition(&shifts, &caps, &self.diff_degree)
    }

    /// Basis of the graded piece in degree `m`, ordered by generator.
    pub fn basis_at(&self, m: &Multidegree) -> Vec<BasisLabel> {
        self.generators
            .iter()
            .enumerate()
            .filter_map(|(j, g)| g.exponent_at(m).map(|exponent| BasisLabel { generator: j, exponent }))
            .collect()
    }

    /// Matrix of δ from the piece spanned by `from` to the one spanned by `to`.
    pub fn map_matrix(&self, from: &[BasisLabel], to: &[BasisLabel]) -> ScalarMatrix<K> {
        let mut out = ScalarMatrix::zeros(to.len(), from.len());
        for (c, src) in from.iter().enumerate() {
            for (r, dst) in to.iter().enumerate() {
                let v = self.coeffs.get(dst.generator, src.generator);
                if !v.is_zero() && self.entry_exponent(dst.generator, src.generator).is_nonnegative() {
                    out.set(r, c, v.clone());
                }
            }
        }
        out
    }

    pub fn degree_component(&self, m: &Multidegree) -> ComponentData<K> {
        let prev = m - &self.diff_degree;
        let next = m + &self.diff_degree;
        let basis_prev = self.basis_at(&prev);
        let basis = self.basis_at(m);
        let basis_next = self.basis_at(&next);
        let incoming = self.map_matrix(&basis_prev, &basis);
        let outgoing = self.map_matrix(&basis, &basis_next);
        ComponentData { degree: m.clone(), basis_prev, basis, basis_next, incoming, outgoing }
    }

    /// Problems visible from single entries: a bad field, monomials that do
    /// not exist, and maps that are not R-linear because of caps.
    pub(crate) fn entry_violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if let Err(e) = self.ring.field.check() {
            out.push(Violation::Structure { message: e.to_string() });
            return out;
        }
        for (row, col, _) in self.entries() {
            let exponent = self.entry_exponent(row, col);
            if !exponent.is_nonnegative() {
                out.push(Violation::MissingMonomial { row, col, exponent });
                continue;
            }
            for axis in 0..self.d() {
                if let Some(src_cap) = self.generators[col].cap[axis] {
                    let ok = match self.generators[row].cap[axis] {
                        None => false,
                        Some(dst_cap) => src_cap as i64 + exponent.0[axis] >= dst_cap as i64,
                    };
                    if !ok {
                        out.push(Violation::CapIncompatible { row, col, axis });
                    }
                }
            }
        }
        out
    }

    /// Every way this module fails to be a differential module; empty when valid.
    pub fn violations(&self) -> Vec<Violation> {
        let mut out = self.entry_violations();
        if !out.is_empty() {
            return out;
        }
        let t = &self.diff_degree;
        for cell in &self.cell_decomposition().cells {
            let m = &cell.representative;
            let mid = m + t;
            let source = self.basis_at(m);
            let middle = self.basis_at(&mid);
            let target = self.basis_at(&(&mid + t));
            let square = self
                .map_matrix(&middle, &target)
                .mul(&self.map_matrix(&source, &middle))
                .expect("composable");
            for (r, c, v) in square.nonzero_entries() {
                out.push(Violation::SquareNonzero {
                    degree: m.clone(),
                    row: target[r].clone(),
                    col: source[c].clone(),
                    value: v.to_string(),
                });
            }
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidModule(v))
        }
    }

    fn check_axis(&self, axis: usize) -> Result<()> {
        if axis >= self.d() {
            return Err(Error::AxisOutOfRange { axis, d: self.d() });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactla::Rational;

    fn ring2() -> RingContext {
        RingContext::new(2, FieldSpec::Rationals)
    }

    fn md(v: &[i64]) -> Multidegree {
        Multidegree(v.to_vec())
    }

    fn scorpion0(c24: i64) -> BoxDifferentialModule<Rational> {
        let f = FieldSpec::Rationals;
        let gens = [[0, 0], [1, 0], [0, 1], [1, 1]].iter().map(|s| GeneratorSpec::free(md(s))).collect();
        let q = |n| Rational::from_int(n, &f);
        BoxDifferentialModule::from_entries(
            ring2(),
            gens,
            md(&[0, 0]),
            vec![(0, 1, q(1)), (0, 2, q(1)), (0, 3, q(1)), (2, 3, q(1)), (1, 3, q(c24))],
        )
        .unwrap()
    }

    #[test]
    fn deg0_scorpion_is_valid() {
        assert!(scorpion0(-1).violations().is_empty());
    }

    #[test]
    fn sign_flip_breaks_square_zero_at_one_one() {
        let v = scorpion0(1).violations();
        assert!(!v.is_empty());
        assert!(v.iter().all(|x| matches!(x, Violation::SquareNonzero { .. })));
        // δ²(e4) = 2xy e1 first shows up in degree (1,1)
        assert!(v.iter().any(|x| match x {
            Violation::SquareNonzero { degree, row, col, value } =>
                degree == &md(&[1, 1]) && row.generator == 0 && col.generator == 3 && value == "2",
            _ => false,
        }));
    }

    #[test]
    fn zero_differential_is_valid() {
        let m = BoxDifferentialModule::<Rational>::free_with_zero_differential(
            ring2(),
            vec![md(&[0, 0]), md(&[3, -1])],
            md(&[2, 1]),
        )
        .unwrap();
        assert!(m.violations().is_empty());
    }

    #[test]
    fn missing_monomial_is_reported() {
        let f = FieldSpec::Rationals;
        let m = BoxDifferentialModule::from_entries(
            ring2(),
            vec![GeneratorSpec::free(md(&[1, 0])), GeneratorSpec::free(md(&[0, 0]))],
            md(&[0, 0]),
            vec![(0, 1, Rational::from_int(1, &f))],
        )
        .unwrap();
        assert!(matches!(m.violations()[0], Violation::MissingMonomial { row: 0, col: 1, .. }));
    }

    #[test]
    fn components_of_deg0_scorpion() {
        let d = scorpion0(-1);
        let c = d.degree_component(&md(&[0, 0]));
        assert_eq!(c.basis.len(), 1);
        assert_eq!(c.basis[0].generator, 0);
        assert!(c.outgoing.is_zero());
        let c = d.degree_component(&md(&[1, 0]));
        assert_eq!(c.basis.iter().map(|b| b.generator).collect::<Vec<_>>(), vec![0, 1]);
        let f = FieldSpec::Rationals;
        let q = |n| Rational::from_int(n, &f);
        assert_eq!(c.outgoing, ScalarMatrix::from_rows(vec![vec![q(0), q(1)], vec![q(0), q(0)]]));
        let below = d.degree_component(&md(&[-1, 5]));
        assert!(below.basis.is_empty() && below.outgoing.shape() == (0, 0));
    }

    #[test]
    fn shape_errors() {
        let err = BoxDifferentialModule::<Rational>::new(
            ring2(),
            vec![GeneratorSpec::free(md(&[0, 0]))],
            md(&[0, 0]),
            ScalarMatrix::zeros(2, 2),
        );
        assert!(err.is_err());
        let err = BoxDifferentialModule::<Rational>::new(
            ring2(),
            vec![GeneratorSpec::free(md(&[0]))],
            md(&[0, 0]),
            ScalarMatrix::zeros(1, 1),
        );
        assert!(err.is_err());
    }
}

use itertools::Itertools;

use super::{BoxDifferentialModule, GeneratorSpec, RingContext};
use crate::degrees::Multidegree;
use crate::error::{Error, Result};
use crate::exactla::{Scalar, ScalarMatrix};

/// One homological degree of a [`GradedComplex`]: free generators and the
/// matrix of `∂` to the level below (rows: previous level's generators).
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexLevel<K> {
    pub generators: Vec<GeneratorSpec>,
    pub to_previous: ScalarMatrix<K>,
}

/// A bounded complex `C_0 <- C_1 <- ...` of finely graded free modules with
/// degree-0 differentials.
#[derive(Clone, Debug, PartialEq)]
pub struct GradedComplex<K> {
    ring: RingContext,
    levels: Vec<ComplexLevel<K>>,
}

impl<K: Scalar> GradedComplex<K> {
    pub fn new(ring: RingContext, levels: Vec<ComplexLevel<K>>) -> Result<Self> {
        let mut prev = 0;
        for (n, level) in levels.iter().enumerate() {
            let width = level.generators.len();
            if level.to_previous.shape() != (prev, width) {
                return Err(Error::Shape(format!(
                    "level {n}: matrix to previous level must be {prev}x{width}, got {}x{}",
                    level.to_previous.rows(),
                    level.to_previous.cols()
                )));
            }
            for g in &level.generators {
                if g.shift.dim() != ring.d || g.cap.len() != ring.d {
                    return Err(Error::DimensionMismatch { expected: ring.d, found: g.shift.dim() });
                }
                if !g.is_free() {
                    return Err(Error::CapsPresent);
                }
            }
            prev = width;
        }
        Ok(GradedComplex { ring, levels })
    }

    pub fn ring(&self) -> &RingContext {
        &self.ring
    }

    pub fn levels(&self) -> &[ComplexLevel<K>] {
        &self.levels
    }

    pub fn ranks(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.generators.len()).collect()
    }

    /// Homological degree of each generator in compression order.
    pub fn homological_levels(&self) -> Vec<usize> {
        self.levels
            .iter()
            .enumerate()
            .flat_map(|(n, l)| std::iter::repeat_n(n, l.generators.len()))
            .collect()
    }

    /// Monomial existence for every entry and `∂∂ = 0`.
    pub fn validate(&self) -> Result<()> {
        for (n, level) in self.levels.iter().enumerate().skip(1) {
            let below = &self.levels[n - 1].generators;
            for (r, c, _) in level.to_previous.nonzero_entries() {
                if !below[r].shift.le(&level.generators[c].shift) {
                    return Err(Error::Shape(format!(
                        "level {n}: entry ({}, {}) has no degree-0 monomial",
                        r + 1,
                        c + 1
                    )));
                }
            }
            if n >= 2 {
                let composite = self.levels[n - 1].to_previous.mul(&level.to_previous)?;
                if !composite.is_zero() {
                    return Err(Error::NotAComplex(format!("∂∂ ≠ 0 from level {n} to level {}", n - 2)));
                }
            }
        }
        Ok(())
    }

    /// The tensor product `X ⊗ Y` with `∂(f⊗g) = ∂f⊗g + (-1)^p f⊗∂g`.
    /// Generators of level `n` are ordered by `p`, then `f`, then `g`.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        if self.ring != other.ring {
            return Err(Error::Incompatible);
        }
        if self.levels.is_empty() || other.levels.is_empty() {
            return Self::new(self.ring, vec![]);
        }
        let top = self.levels.len() + other.levels.len() - 2;
        // (p, f, g) labels per level
        let labels: Vec<Vec<(usize, usize, usize)>> = (0..=top)
            .map(|n| {
                let mut v = Vec::new();
                for p in 0..=n {
                    let q = n - p;
                    if p >= self.levels.len() || q >= other.levels.len() {
                        continue;
                    }
                    for f in 0..self.levels[p].generators.len() {
                        for g in 0..other.levels[q].generators.len() {
                            v.push((p, f, g));
                        }
                    }
                }
                v
            })
            .collect();
        let mut levels = Vec::with_capacity(top + 1);
        for (n, labs) in labels.iter().enumerate() {
            let generators = labs
                .iter()
                .map(|&(p, f, g)| {
                    GeneratorSpec::free(
                        &self.levels[p].generators[f].shift + &other.levels[n - p].generators[g].shift,
                    )
                })
                .collect();
            let prev_len = if n == 0 { 0 } else { labels[n - 1].len() };
            let mut m = ScalarMatrix::<K>::zeros(prev_len, labs.len());
            if n > 0 {
                let position = |lab: (usize, usize, usize)| labels[n - 1].iter().position(|&x| x == lab);
                for (col, &(p, f, g)) in labs.iter().enumerate() {
                    let q = n - p;
                    if p > 0 {
                        let d = &self.levels[p].to_previous;
                        for f2 in 0..d.rows() {
                            let v = d.get(f2, f);
                            if !v.is_zero() {
                                let row = position((p - 1, f2, g)).expect("label exists");
                                m.set(row, col, m.get(row, col).clone() + v.clone());
                            }
                        }
                    }
                    if q > 0 {
                        let d = &other.levels[q].to_previous;
                        let sign = if p % 2 == 0 { K::one() } else { -K::one() };
                        for g2 in 0..d.rows() {
                            let v = d.get(g2, g);
                            if !v.is_zero() {
                                let row = position((p, f, g2)).expect("label exists");
                                m.set(row, col, m.get(row, col).clone() + sign.clone() * v.clone());
                            }
                        }
                    }
                }
            }
            levels.push(ComplexLevel { generators, to_previous: m });
        }
        Self::new(self.ring, levels)
    }
}

/// Koszul complex on the variables `axes` (0-based): level `n` is spanned by
/// the `n`-subsets `S`, and `∂(e_S) = Σ_{i∈S} (-1)^(pos(i,S)+1) x_i e_{S∖i}`
/// with positions counted from 1.
pub fn koszul<K: Scalar>(ring: RingContext, axes: &[usize]) -> Result<GradedComplex<K>> {
    let mut vars: Vec<usize> = axes.to_vec();
    vars.sort_unstable();
    vars.dedup();
    if vars.len() != axes.len() {
        return Err(Error::Shape("repeated variable in Koszul complex".into()));
    }
    if let Some(&bad) = vars.iter().find(|&&i| i >= ring.d) {
        return Err(Error::AxisOutOfRange { axis: bad, d: ring.d });
    }
    let subsets: Vec<Vec<Vec<usize>>> =
        (0..=vars.len()).map(|n| vars.iter().copied().combinations(n).collect()).collect();
    let shift_of = |s: &[usize]| {
        let mut v = vec![0i64; ring.d];
        for &i in s {
            v[i] += 1;
        }
        Multidegree(v)
    };
    let mut levels = Vec::with_capacity(subsets.len());
    for (n, level) in subsets.iter().enumerate() {
        let generators = level.iter().map(|s| GeneratorSpec::free(shift_of(s))).collect();
        let prev: &[Vec<usize>] = if n == 0 { &[] } else { &subsets[n - 1] };
        let mut m = ScalarMatrix::zeros(prev.len(), level.len());
        for (col, s) in level.iter().enumerate() {
            for pos in 0..s.len() {
                let face: Vec<usize> = s.iter().enumerate().filter(|&(k, _)| k != pos).map(|(_, &v)| v).collect();
                let row = prev.iter().position(|p| *p == face).expect("face is a subset");
                m.set(row, col, if pos % 2 == 0 { K::one() } else { -K::one() });
            }
        }
        levels.push(ComplexLevel { generators, to_previous: m });
    }
    GradedComplex::new(ring, levels)
}

/// The compression `⊕_n C_n` with differential `⊕_n ∂_n` (degree 0).
pub fn compress<K: Scalar>(complex: &GradedComplex<K>) -> Result<BoxDifferentialModule<K>> {
    complex.validate()?;
    let generators: Vec<GeneratorSpec> =
        complex.levels().iter().flat_map(|l| l.generators.iter().cloned()).collect();
    let n = generators.len();
    let mut coeffs = ScalarMatrix::zeros(n, n);
    let mut offset_prev = 0;
    let mut offset = 0;
    for level in complex.levels() {
        for (r, c, v) in level.to_previous.nonzero_entries() {
            coeffs.set(offset_prev + r, offset + c, v.clone());
        }
        offset_prev = offset;
        offset += level.generators.len();
    }
    BoxDifferentialModule::new(*complex.ring(), generators, Multidegree::zero(complex.ring().d), coeffs)
}

/// `X ⊠ D` for a module with differential degree 0: generators `(f, j)` in
/// order (level, complex generator, module generator) with shift `b_f + a_j`
/// and the cap of `j`; `δ(f⊗e) = ∂f⊗e + (-1)^n f⊗δe`.
pub fn box_tensor<K: Scalar>(
    complex: &GradedComplex<K>,
    module: &BoxDifferentialModule<K>,
) -> Result<BoxDifferentialModule<K>> {
    if !module.diff_degree().is_zero() {
        return Err(Error::NonzeroDifferentialDegree(module.diff_degree().0.clone()));
    }
    if complex.ring() != module.ring() {
        return Err(Error::Incompatible);
    }
    let width = module.rank();
    let mut offsets = Vec::with_capacity(complex.levels().len());
    let mut generators = Vec::new();
    for level in complex.levels() {
        offsets.push(generators.len());
        for f in &level.generators {
            for g in module.generators() {
                generators.push(GeneratorSpec { shift: &f.shift + &g.shift, cap: g.cap.clone() });
            }
        }
    }
    let total = generators.len();
    let mut coeffs = ScalarMatrix::zeros(total, total);
    for (n, level) in complex.levels().iter().enumerate() {
        let sign = if n % 2 == 0 { K::one() } else { -K::one() };
        for f in 0..level.generators.len() {
            let base = offsets[n] + f * width;
            for (i, j, c) in module.entries() {
                coeffs.set(base + i, base + j, sign.clone() * c.clone());
            }
        }
        if n > 0 {
            for (f2, f, v) in level.to_previous.nonzero_entries() {
                for j in 0..width {
                    coeffs.set(offsets[n - 1] + f2 * width + j, offsets[n] + f * width + j, v.clone());
                }
            }
        }
    }
    BoxDifferentialModule::new(*module.ring(), generators, Multidegree::zero(module.d()), coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactla::{FieldSpec, Rational};

    fn ring(d: usize) -> RingContext {
        RingContext::new(d, FieldSpec::Rationals)
    }

    #[test]
    fn koszul_ranks_and_validity() {
        let k0 = koszul::<Rational>(ring(2), &[]).unwrap();
        assert_eq!(k0.ranks(), vec![1]);
        let k2 = koszul::<Rational>(ring(2), &[0, 1]).unwrap();
        assert_eq!(k2.ranks(), vec![1, 2, 1]);
        k2.validate().unwrap();
        let k3 = koszul::<Rational>(ring(3), &[0, 1, 2]).unwrap();
        assert_eq!(k3.ranks(), vec![1, 3, 3, 1]);
        k3.validate().unwrap();
        assert!(koszul::<Rational>(ring(2), &[2]).is_err());
    }

    #[test]
    fn compressed_koszul_is_valid_with_expected_shifts() {
        let c = compress(&koszul::<Rational>(ring(2), &[0, 1]).unwrap()).unwrap();
        assert_eq!(c.rank(), 4);
        let shifts: Vec<Vec<i64>> = c.shifts().into_iter().map(|m| m.0).collect();
        assert_eq!(shifts, vec![vec![0, 0], vec![1, 0], vec![0, 1], vec![1, 1]]);
        assert!(c.violations().is_empty());
    }

    #[test]
    fn one_level_complex_compresses_to_zero_differential() {
        let level = ComplexLevel::<Rational> {
            generators: vec![GeneratorSpec::free(Multidegree(vec![0])), GeneratorSpec::free(Multidegree(vec![2]))],
            to_previous: ScalarMatrix::zeros(0, 2),
        };
        let c = compress(&GradedComplex::new(ring(1), vec![level]).unwrap()).unwrap();
        assert!(c.has_zero_differential());
    }

    #[test]
    fn box_tensor_with_rank_one_is_compression() {
        let k = koszul::<Rational>(ring(3), &[0, 1, 2]).unwrap();
        let r = BoxDifferentialModule::free_with_zero_differential(ring(3), vec![Multidegree::zero(3)], Multidegree::zero(3))
            .unwrap();
        assert_eq!(box_tensor(&k, &r).unwrap(), compress(&k).unwrap());
    }

    #[test]
    fn tensor_of_koszul_complexes_is_koszul() {
        let x = koszul::<Rational>(ring(2), &[0]).unwrap();
        let y = koszul::<Rational>(ring(2), &[1]).unwrap();
        let xy = x.tensor(&y).unwrap();
        xy.validate().unwrap();
        assert_eq!(xy.ranks(), vec![1, 2, 1]);
    }

    #[test]
    fn box_tensor_rejects_positive_degree() {
        let k = koszul::<Rational>(ring(1), &[0]).unwrap();
        let m = BoxDifferentialModule::<Rational>::zero(ring(1), Multidegree(vec![1]));
        assert!(matches!(box_tensor(&k, &m), Err(Error::NonzeroDifferentialDegree(_))));
    }
}

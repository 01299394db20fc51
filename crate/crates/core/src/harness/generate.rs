use itertools::Itertools;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::fixtures::fixture;
use crate::degrees::Multidegree;
use crate::dmcore::{box_tensor, compress, koszul, BoxDifferentialModule, ComplexLevel, GeneratorSpec, GradedComplex, RingContext};
use crate::error::{Error, Result};
use crate::exactla::{kernel_basis, rank, FieldSpec, Scalar, ScalarMatrix};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "strategy", rename_all = "kebab-case")]
pub enum Strategy {
    /// A complex built level by level from degreewise kernels, then compressed.
    ///
    /// With `complete`, level 0 is `R` and level 1 a random monomial ideal
    /// (each variable gets a pure power with high probability); every later
    /// level spans the whole kernel, so the complex resolves `R/I`. Without it,
    /// each level takes a few random kernel vectors. `perturb` adds a map from
    /// the top level two levels down; `trivial_pairs` inserts `R --1--> R` pairs.
    CompressedRandomComplex { width: usize, max_power: i64, complete: bool, perturb: bool, trivial_pairs: usize },
    ConjugatedFixture { fixture: String },
    DirectSum { parts: Vec<InstanceRecipe> },
    /// `K ⊠ D` for the Koszul complex `K` on `axes` (0-based).
    KoszulProduct { axes: Vec<usize>, base: Box<InstanceRecipe> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceRecipe {
    pub d: usize,
    #[serde(default)]
    pub field: FieldSpec,
    #[serde(flatten)]
    pub strategy: Strategy,
    pub seed: u64,
    /// Apply a random graded change of basis at the end.
    #[serde(default)]
    pub conjugate: bool,
}

impl InstanceRecipe {
    pub fn id(&self) -> String {
        let kind = match &self.strategy {
            Strategy::CompressedRandomComplex { complete: true, .. } => "resolution".to_string(),
            Strategy::CompressedRandomComplex { complete: false, .. } => "random-complex".to_string(),
            Strategy::ConjugatedFixture { fixture } => format!("conjugated-{fixture}"),
            Strategy::DirectSum { parts } => format!("sum{}", parts.len()),
            Strategy::KoszulProduct { axes, .. } => format!("koszul{}-product", axes.len()),
        };
        format!("d{}-{kind}-{:016x}", self.d, self.seed)
    }
}

fn nonzero<K: Scalar>(rng: &mut ChaCha8Rng, field: &FieldSpec) -> K {
    let v = K::from_int(*[1, -1, 2, -2].choose(rng).expect("nonempty"), field);
    if v.is_zero() {
        K::one()
    } else {
        v
    }
}

fn random_degree(rng: &mut ChaCha8Rng, d: usize, hi: i64) -> Multidegree {
    Multidegree((0..d).map(|_| rng.gen_range(0..=hi)).collect())
}

/// Level-by-level construction of a complex of free modules.
struct Builder<K> {
    d: usize,
    field: FieldSpec,
    shifts: Vec<Vec<Multidegree>>,
    /// `columns[n][c]` is `∂(generator c of level n)` in level `n - 1` coordinates.
    columns: Vec<Vec<Vec<K>>>,
}

impl<K: Scalar> Builder<K> {
    fn new(d: usize, field: FieldSpec) -> Self {
        Builder { d, field, shifts: vec![], columns: vec![] }
    }

    fn present(&self, level: usize, m: &Multidegree) -> Vec<usize> {
        (0..self.shifts[level].len()).filter(|&j| self.shifts[level][j].le(m)).collect()
    }

    /// Matrix of `∂_level` in degree `m`, with the supporting row and column indices.
    fn component(&self, level: usize, m: &Multidegree) -> (ScalarMatrix<K>, Vec<usize>, Vec<usize>) {
        let cols = self.present(level, m);
        let rows = if level == 0 { vec![] } else { self.present(level - 1, m) };
        let mut out = ScalarMatrix::zeros(rows.len(), cols.len());
        for (b, &c) in cols.iter().enumerate() {
            for (a, &r) in rows.iter().enumerate() {
                out.set(a, b, self.columns[level][c][r].clone());
            }
        }
        (out, rows, cols)
    }

    /// Basis of `ker ∂_level` in degree `m`, as full level-`level` vectors.
    fn kernel_at(&self, level: usize, m: &Multidegree) -> Vec<Vec<K>> {
        let width = self.shifts[level].len();
        let (mat, _, cols) = self.component(level, m);
        let basis = if level == 0 { ScalarMatrix::identity(cols.len()) } else { kernel_basis(&mat) };
        (0..basis.cols())
            .map(|k| {
                let mut v = vec![K::zero(); width];
                for (a, &c) in cols.iter().enumerate() {
                    v[c] = basis.get(a, k).clone();
                }
                v
            })
            .collect()
    }

    fn random_combination(&self, rng: &mut ChaCha8Rng, basis: &[Vec<K>], width: usize) -> Vec<K> {
        let mut v = vec![K::zero(); width];
        for b in basis {
            if rng.gen_bool(0.6) {
                let s: K = nonzero(rng, &self.field);
                for (x, y) in v.iter_mut().zip(b) {
                    *x = x.clone() + s.clone() * y.clone();
                }
            }
        }
        v
    }

    fn push_level(&mut self) {
        self.shifts.push(vec![]);
        self.columns.push(vec![]);
    }

    fn add(&mut self, level: usize, shift: Multidegree, column: Vec<K>) {
        self.shifts[level].push(shift);
        self.columns[level].push(column);
    }

    fn complex(&self) -> Result<GradedComplex<K>> {
        let levels = (0..self.shifts.len())
            .map(|n| {
                let rows = if n == 0 { 0 } else { self.shifts[n - 1].len() };
                let cols = self.shifts[n].len();
                let mut m = ScalarMatrix::zeros(rows, cols);
                for c in 0..cols {
                    for r in 0..rows {
                        m.set(r, c, self.columns[n][c][r].clone());
                    }
                }
                ComplexLevel { generators: self.shifts[n].iter().cloned().map(GeneratorSpec::free).collect(), to_previous: m }
            })
            .collect();
        GradedComplex::new(RingContext::new(self.d, self.field), levels)
    }
}

fn minimal_monomials(mut gens: Vec<Multidegree>) -> Vec<Multidegree> {
    gens.sort();
    gens.dedup();
    let all = gens.clone();
    gens.retain(|g| !all.iter().any(|h| h != g && h.le(g)));
    gens
}

fn resolution<K: Scalar>(rng: &mut ChaCha8Rng, d: usize, field: FieldSpec, width: usize, max_power: i64) -> Builder<K> {
    let max_power = max_power.max(1);
    let mut ideal = Vec::new();
    for axis in 0..d {
        if rng.gen_bool(0.85) {
            ideal.push(Multidegree::unit(d, axis).scaled(rng.gen_range(1..=max_power)));
        }
    }
    for _ in 0..rng.gen_range(0..=width) {
        let m = random_degree(rng, d, max_power);
        if !m.is_zero() {
            ideal.push(m);
        }
    }
    if ideal.is_empty() {
        ideal.push(Multidegree::unit(d, rng.gen_range(0..d)));
    }
    let ideal = minimal_monomials(ideal);
    let lcm = Multidegree((0..d).map(|i| ideal.iter().map(|g| g.0[i]).max().unwrap_or(0)).collect());
    let mut b = Builder::new(d, field);
    b.push_level();
    b.add(0, Multidegree::zero(d), vec![]);
    b.push_level();
    for g in ideal {
        let s: K = nonzero(rng, &field);
        b.add(1, g, vec![s]);
    }
    let degrees: Vec<Multidegree> = lcm
        .coords()
        .iter()
        .map(|&hi| 0..=hi)
        .multi_cartesian_product()
        .map(Multidegree)
        .sorted_by_key(|m| (m.coords().iter().sum::<i64>(), m.clone()))
        .collect();
    let mut level = 2;
    while !b.shifts[level - 1].is_empty() {
        b.push_level();
        for m in &degrees {
            let kernel = b.kernel_at(level - 1, m);
            if kernel.is_empty() {
                continue;
            }
            let (existing, rows, cols) = b.component(level, m);
            let mut current: Vec<Vec<K>> =
                (0..cols.len()).map(|c| rows.iter().enumerate().map(|(a, _)| existing.get(a, c).clone()).collect()).collect();
            let support = b.present(level - 1, m);
            let restrict = |v: &[K]| support.iter().map(|&r| v[r].clone()).collect::<Vec<K>>();
            let mut have = if current.is_empty() { 0 } else { rank(&ScalarMatrix::from_rows(current.clone())) };
            for v in kernel {
                let mut trial = current.clone();
                trial.push(restrict(&v));
                let r = rank(&ScalarMatrix::from_rows(trial.clone()));
                if r > have {
                    have = r;
                    current = trial;
                    b.add(level, m.clone(), v);
                }
            }
        }
        level += 1;
    }
    b.shifts.pop();
    b.columns.pop();
    b
}

fn sampled<K: Scalar>(rng: &mut ChaCha8Rng, d: usize, field: FieldSpec, width: usize, max_power: i64) -> Builder<K> {
    let width = width.max(1);
    let hi = max_power.max(1);
    let mut b = Builder::new(d, field);
    b.push_level();
    for _ in 0..rng.gen_range(1..=width) {
        b.add(0, random_degree(rng, d, hi), vec![]);
    }
    let levels = rng.gen_range(1..=3);
    for level in 1..=levels {
        b.push_level();
        let below = b.shifts[level - 1].len();
        for _ in 0..rng.gen_range(1..=width) {
            let m = random_degree(rng, d, hi * (level as i64 + 1));
            let kernel = b.kernel_at(level - 1, &m);
            let column = b.random_combination(rng, &kernel, below);
            b.add(level, m, column);
        }
    }
    b
}

fn insert_trivial_pairs<K: Scalar>(rng: &mut ChaCha8Rng, b: &mut Builder<K>, count: usize, hi: i64) {
    for _ in 0..count {
        let level = rng.gen_range(0..b.shifts.len());
        if level + 1 == b.shifts.len() {
            b.push_level();
        }
        let m = random_degree(rng, b.d, hi);
        let width = if level == 0 { 0 } else { b.shifts[level - 1].len() };
        b.add(level, m.clone(), vec![K::zero(); width]);
        let idx = b.shifts[level].len() - 1;
        for col in b.columns[level + 1].iter_mut() {
            col.push(K::zero());
        }
        let mut column = vec![K::zero(); idx + 1];
        column[idx] = nonzero(rng, &b.field);
        b.add(level + 1, m, column);
        if level + 2 < b.shifts.len() {
            // keep later columns the right length
            for col in b.columns[level + 2].iter_mut() {
                col.push(K::zero());
            }
        }
    }
}

/// Adds `h` from the top level `N` to level `N - 2` with `∂_(N-2) h = 0`.
fn perturbation<K: Scalar>(rng: &mut ChaCha8Rng, b: &Builder<K>) -> Vec<(usize, usize, K)> {
    let top = b.shifts.len().saturating_sub(1);
    if top < 2 {
        return vec![];
    }
    let offset = |n: usize| b.shifts[..n].iter().map(Vec::len).sum::<usize>();
    let mut out = Vec::new();
    for (c, m) in b.shifts[top].iter().enumerate() {
        if !rng.gen_bool(0.5) {
            continue;
        }
        let kernel = b.kernel_at(top - 2, m);
        let column = b.random_combination(rng, &kernel, b.shifts[top - 2].len());
        for (r, v) in column.into_iter().enumerate() {
            if !v.is_zero() {
                out.push((offset(top - 2) + r, offset(top) + c, v));
            }
        }
    }
    out
}

/// A random invertible degree-0 change of basis: signs on the diagonal and
/// scalars above it with respect to an order compatible with the shifts.
pub fn random_graded_basis<K: Scalar>(rng: &mut ChaCha8Rng, module: &BoxDifferentialModule<K>) -> ScalarMatrix<K> {
    let n = module.rank();
    let field = *module.field();
    let shifts = module.shifts();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&j| (shifts[j].coords().iter().sum::<i64>(), j));
    let mut g = ScalarMatrix::zeros(n, n);
    for j in 0..n {
        g.set(j, j, if rng.gen_bool(0.5) { K::one() } else { -K::one() });
    }
    for (p, &i) in order.iter().enumerate() {
        for &j in &order[p + 1..] {
            if shifts[i].le(&shifts[j]) && rng.gen_bool(0.35) {
                g.set(i, j, nonzero(rng, &field));
            }
        }
    }
    g
}

fn conjugate<K: Scalar>(rng: &mut ChaCha8Rng, module: &BoxDifferentialModule<K>) -> Result<BoxDifferentialModule<K>> {
    if module.rank() == 0 {
        return Ok(module.clone());
    }
    let g = random_graded_basis(rng, module);
    module.change_basis(&g)
}

/// Builds the instance described by `recipe`. Identical recipes give
/// identical modules.
pub fn generate<K: Scalar>(recipe: &InstanceRecipe) -> Result<BoxDifferentialModule<K>> {
    let mut rng = ChaCha8Rng::seed_from_u64(recipe.seed);
    let field = recipe.field;
    let d = recipe.d;
    let ring = RingContext::new(d, field);
    let module = match &recipe.strategy {
        Strategy::CompressedRandomComplex { width, max_power, complete, perturb, trivial_pairs } => {
            if d == 0 {
                return Err(Error::Unsupported("random complexes need d >= 1".into()));
            }
            let mut b = if *complete {
                resolution::<K>(&mut rng, d, field, *width, *max_power)
            } else {
                sampled::<K>(&mut rng, d, field, *width, *max_power)
            };
            insert_trivial_pairs(&mut rng, &mut b, *trivial_pairs, *max_power);
            let h = if *perturb { perturbation(&mut rng, &b) } else { vec![] };
            let base = compress(&b.complex()?)?;
            let mut coeffs = base.coeffs().clone();
            for (r, c, v) in h {
                coeffs.set(r, c, v);
            }
            BoxDifferentialModule::new(ring, base.generators().to_vec(), base.diff_degree().clone(), coeffs)?
        }
        Strategy::ConjugatedFixture { fixture: name } => {
            let f = fixture::<K>(name, field).ok_or_else(|| Error::Parse(format!("unknown fixture {name:?}")))?;
            if f.module.d() != d {
                return Err(Error::DimensionMismatch { expected: d, found: f.module.d() });
            }
            conjugate(&mut rng, &f.module)?
        }
        Strategy::DirectSum { parts } => {
            let mut acc = BoxDifferentialModule::zero(ring, Multidegree::zero(d));
            for p in parts {
                if p.d != d || p.field != field {
                    return Err(Error::Incompatible);
                }
                acc = acc.direct_sum(&generate::<K>(p)?)?;
            }
            acc
        }
        Strategy::KoszulProduct { axes, base } => {
            if base.d != d || base.field != field {
                return Err(Error::Incompatible);
            }
            box_tensor(&koszul(ring, axes)?, &generate::<K>(base)?)?
        }
    };
    let module = if recipe.conjugate { conjugate(&mut rng, &module)? } else { module };
    module.validate()?;
    Ok(module)
}

/// A random recipe from the mix used by the bound experiment.
pub fn random_recipe(rng: &mut ChaCha8Rng, d: usize, field: FieldSpec) -> InstanceRecipe {
    let max_power = if d >= 3 { 2 } else { 3 };
    let resolution = |rng: &mut ChaCha8Rng, width: usize| InstanceRecipe {
        d,
        field,
        strategy: Strategy::CompressedRandomComplex {
            width,
            max_power: rng.gen_range(1..=max_power),
            complete: true,
            perturb: rng.gen_bool(0.5),
            trivial_pairs: rng.gen_range(0..=1),
        },
        seed: rng.gen(),
        conjugate: rng.gen_bool(0.7),
    };
    let roll = rng.gen_range(0..100);
    match roll {
        0..=44 => resolution(rng, if d >= 3 { 1 } else { 2 }),
        45..=59 => InstanceRecipe {
            d,
            field,
            strategy: Strategy::CompressedRandomComplex {
                width: 2,
                max_power: 2,
                complete: false,
                perturb: rng.gen_bool(0.5),
                trivial_pairs: 0,
            },
            seed: rng.gen(),
            conjugate: rng.gen_bool(0.5),
        },
        60..=71 => {
            let mut names = vec![format!("koszul-{d}")];
            if d == 2 {
                names.push("deg0-scorpion".into());
            }
            let fixture = names.choose(rng).expect("nonempty").clone();
            InstanceRecipe { d, field, strategy: Strategy::ConjugatedFixture { fixture }, seed: rng.gen(), conjugate: false }
        }
        72..=85 => {
            let parts = vec![resolution(rng, 0), resolution(rng, 0)];
            InstanceRecipe { d, field, strategy: Strategy::DirectSum { parts }, seed: rng.gen(), conjugate: false }
        }
        _ => {
            let mut axes: Vec<usize> = (0..d).filter(|_| rng.gen_bool(0.5)).collect();
            if axes.is_empty() {
                axes.push(rng.gen_range(0..d));
            }
            if d >= 3 {
                axes.truncate(1);
            }
            let base = Box::new(resolution(rng, 0));
            InstanceRecipe { d, field, strategy: Strategy::KoszulProduct { axes, base }, seed: rng.gen(), conjugate: false }
        }
    }
}

#![allow(dead_code)]

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use diffmod::harness::{generate, random_recipe, InstanceRecipe};
use diffmod::{BoxDifferentialModule, FieldSpec, FlagOrder, GeneratorSpec, Multidegree, QModule, Rational, Scalar};

/// Rank of a rational matrix by fraction-free elimination over the integers.
pub fn integer_rank(rows: Vec<Vec<Rational>>) -> usize {
    let mut m: Vec<Vec<BigInt>> = rows
        .into_iter()
        .map(|row| {
            let lcm = row.iter().fold(BigInt::from(1), |acc, q| acc.lcm(q.denom()));
            row.iter().map(|q| q.numer() * (&lcm / q.denom())).collect()
        })
        .collect();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..m.len()).find(|&r| !m[r][c].is_zero()) else { continue };
        m.swap(rank, p);
        for r in rank + 1..m.len() {
            if m[r][c].is_zero() {
                continue;
            }
            let a = m[rank][c].clone();
            let b = m[r][c].clone();
            let pivot_row = m[rank].clone();
            let mut g = BigInt::zero();
            for (x, y) in m[r].iter_mut().zip(&pivot_row) {
                *x = &*x * &a - y * &b;
                g = g.gcd(x);
            }
            if !g.is_zero() && g.abs() != BigInt::from(1) {
                for x in m[r].iter_mut() {
                    *x = &*x / &g;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Generators whose box contains degree `m`, found by direct enumeration.
fn basis(module: &QModule, m: &[i64]) -> Vec<usize> {
    (0..module.rank())
        .filter(|&j| {
            let g = &module.generators()[j];
            (0..m.len()).all(|k| {
                let e = m[k] - g.shift.0[k];
                e >= 0 && g.cap[k].map_or(true, |u| e <= u as i64)
            })
        })
        .collect()
}

/// `δ` from degree `m` to `m + t`, built entry by entry from the coefficients.
fn map_at(module: &QModule, m: &[i64]) -> Vec<Vec<Rational>> {
    let t = &module.diff_degree().0;
    let target: Vec<i64> = m.iter().zip(t).map(|(a, b)| a + b).collect();
    let src = basis(module, m);
    let dst = basis(module, &target);
    dst.iter()
        .map(|&i| {
            src.iter()
                .map(|&j| {
                    let exp_ok = (0..m.len()).all(|k| {
                        module.generators()[j].shift.0[k] + t[k] - module.generators()[i].shift.0[k] >= 0
                    });
                    if exp_ok {
                        module.coefficient(i, j).clone()
                    } else {
                        Rational::zero()
                    }
                })
                .collect()
        })
        .collect()
}

/// `dim H(D)_m` by brute force.
pub fn oracle_homology(module: &QModule, m: &[i64]) -> usize {
    let t = &module.diff_degree().0;
    let prev: Vec<i64> = m.iter().zip(t).map(|(a, b)| a - b).collect();
    let n = basis(module, m).len();
    n - integer_rank(map_at(module, m)) - integer_rank(map_at(module, &prev))
}

/// Every point of `[lo, hi]^d`.
pub fn grid(d: usize, lo: i64, hi: i64) -> Vec<Vec<i64>> {
    let mut out = vec![vec![]];
    for _ in 0..d {
        out = out.into_iter().flat_map(|p| (lo..=hi).map(move |v| [p.clone(), vec![v]].concat())).collect();
    }
    out
}

/// First degree in `[lo, hi]^d` where the summary and the oracle disagree.
pub fn oracle_mismatch(module: &QModule, lo: i64, hi: i64) -> Option<(Vec<i64>, usize, usize)> {
    let summary = diffmod::homology_summary(module).expect("summary");
    grid(module.d(), lo, hi).into_iter().find_map(|p| {
        let fast = summary.dimension_at(&Multidegree(p.clone()));
        let slow = oracle_homology(module, &p);
        (fast != slow).then_some((p, fast, slow))
    })
}

pub fn recipe(seed: u64, d: usize) -> InstanceRecipe {
    random_recipe(&mut ChaCha8Rng::seed_from_u64(seed), d, FieldSpec::Rationals)
}

pub fn instance(seed: u64, d: usize) -> QModule {
    generate::<Rational>(&recipe(seed, d)).expect("generated instance")
}

/// Moves generator `j` by `level_j * s` and sets `t = -s`. Every entry keeps
/// its monomial or gains a power of `x^s`, so a flag order for the input
/// stays one and `δ² = 0` is preserved.
pub fn regrade<K: Scalar>(module: &BoxDifferentialModule<K>, order: &FlagOrder, s: &[i64]) -> BoxDifferentialModule<K> {
    let generators = module
        .generators()
        .iter()
        .zip(&order.levels)
        .map(|(g, &n)| {
            let shift = Multidegree(g.shift.0.iter().zip(s).map(|(a, b)| a + n as i64 * b).collect());
            GeneratorSpec { shift, cap: g.cap.clone() }
        })
        .collect();
    let t = Multidegree(s.iter().map(|x| -x).collect());
    BoxDifferentialModule::new(*module.ring(), generators, t, module.coeffs().clone()).expect("same shape")
}

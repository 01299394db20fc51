use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::fixtures::fixtures;
use super::generate::{generate, random_recipe, InstanceRecipe};
use crate::degrees::ExtCount;
use crate::dmcore::BoxDifferentialModule;
use crate::error::{Error, Result};
use crate::exactla::{FieldSpec, Rational, Scalar};
use crate::homology::homology_summary;
use crate::io::ModuleFile;
use crate::structure::build_flag;
use crate::torbetti::{flag_reduction_betti, tor_k};

/// Largest `rank * 2^d` for which the flag-reduction value is cross-checked
/// against graded Tor.
pub const TOR_CROSS_CHECK_LIMIT: usize = 256;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub id: String,
    pub rank: usize,
    pub betti: usize,
    pub homology_length: u64,
    pub d: usize,
    pub bound: u64,
    pub satisfied: bool,
    /// Whether `betti` was confirmed by graded Tor as well.
    pub tor_checked: bool,
    pub runtime_us: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Counterexample {
    pub id: String,
    pub recipe: Option<InstanceRecipe>,
    pub betti: usize,
    pub instance: ModuleFile,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundExperiment {
    pub d: usize,
    pub seed: u64,
    pub count: usize,
    pub reports: Vec<BoundReport>,
    pub discarded_zero: usize,
    pub discarded_infinite: usize,
    pub min_betti: Option<usize>,
    pub counterexamples: Vec<Counterexample>,
}

impl BoundExperiment {
    pub fn violations(&self) -> usize {
        self.reports.iter().filter(|r| !r.satisfied).count()
    }
}

enum Outcome {
    Zero,
    Infinite,
    Report(BoundReport, Option<Counterexample>),
}

fn examine<K: Scalar>(id: String, recipe: Option<InstanceRecipe>, module: &BoxDifferentialModule<K>) -> Result<Outcome> {
    let start = Instant::now();
    let summary = homology_summary(module)?;
    if summary.is_zero() {
        return Ok(Outcome::Zero);
    }
    let length = match summary.total_length {
        ExtCount::Infinite => return Ok(Outcome::Infinite),
        ExtCount::Finite(n) => n,
    };
    let flag = build_flag(module)?;
    let betti = flag_reduction_betti(&flag.rebased, &flag.order)?.value;
    if betti != flag.minimization.module.rank() {
        return Err(Error::Internal(format!("{id}: flag reduction disagrees with the minimal rank")));
    }
    let d = module.d();
    let tor_checked = module.rank() << d <= TOR_CROSS_CHECK_LIMIT;
    if tor_checked {
        let tor = tor_k(module)?.total_length;
        if tor != ExtCount::Finite(betti as u64) {
            return Err(Error::Internal(format!("{id}: graded Tor {tor} but flag reduction {betti}")));
        }
    }
    let bound = 1u64 << d;
    let satisfied = betti as u64 >= bound;
    let counterexample = (!satisfied).then(|| Counterexample {
        id: id.clone(),
        recipe: recipe.clone(),
        betti,
        instance: ModuleFile::from_module(module),
    });
    let report = BoundReport {
        id,
        rank: module.rank(),
        betti,
        homology_length: length,
        d,
        bound,
        satisfied,
        tor_checked,
        runtime_us: start.elapsed().as_micros() as u64,
    };
    Ok(Outcome::Report(report, counterexample))
}

/// The recipes drawn for `count` instances from `seed`.
pub fn experiment_recipes(count: usize, d: usize, seed: u64, field: FieldSpec) -> Vec<InstanceRecipe> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let sub: u64 = rng.gen();
            random_recipe(&mut ChaCha8Rng::seed_from_u64(sub), d, field)
        })
        .collect()
}

/// Tests `β >= 2^d` on the degree-0 fixtures in dimension `d` and on `count`
/// generated instances. Instances with zero or infinite-length homology are
/// counted and skipped.
pub fn run_bound_experiment_in<K: Scalar>(count: usize, d: usize, seed: u64, field: FieldSpec) -> Result<BoundExperiment> {
    if d == 0 {
        return Err(Error::Unsupported("the bound experiment needs d >= 1".into()));
    }
    let mut pool: Vec<(String, Option<InstanceRecipe>, BoxDifferentialModule<K>)> = fixtures::<K>(field)
        .into_iter()
        .filter(|f| f.module.d() == d && f.module.diff_degree().is_zero())
        .map(|f| (f.name, None, f.module))
        .collect();
    let recipes = experiment_recipes(count, d, seed, field);
    let generated: Vec<BoxDifferentialModule<K>> =
        recipes.par_iter().map(generate::<K>).collect::<Result<Vec<_>>>()?;
    pool.extend(recipes.into_iter().zip(generated).map(|(r, m)| (r.id(), Some(r), m)));
    let outcomes: Vec<Outcome> =
        pool.into_par_iter().map(|(id, recipe, m)| examine(id, recipe, &m)).collect::<Result<Vec<_>>>()?;
    let mut out = BoundExperiment {
        d,
        seed,
        count,
        reports: vec![],
        discarded_zero: 0,
        discarded_infinite: 0,
        min_betti: None,
        counterexamples: vec![],
    };
    for o in outcomes {
        match o {
            Outcome::Zero => out.discarded_zero += 1,
            Outcome::Infinite => out.discarded_infinite += 1,
            Outcome::Report(r, c) => {
                out.min_betti = Some(out.min_betti.map_or(r.betti, |m| m.min(r.betti)));
                out.reports.push(r);
                out.counterexamples.extend(c);
            }
        }
    }
    Ok(out)
}

pub fn run_bound_experiment(count: usize, d: usize, seed: u64) -> Result<BoundExperiment> {
    run_bound_experiment_in::<Rational>(count, d, seed, FieldSpec::Rationals)
}

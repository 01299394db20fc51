//! Fixtures, seeded instance generation and the `β >= 2^d` experiment.

mod experiment;
mod fixtures;
mod generate;

pub use experiment::{
    experiment_recipes, run_bound_experiment, run_bound_experiment_in, BoundExperiment, BoundReport, Counterexample,
    TOR_CROSS_CHECK_LIMIT,
};
pub use fixtures::{compressed_koszul, deg0_scorpion, fixture, fixtures, minimized_scorpion, scorpion, scorpion_flag, Fixture};
pub use generate::{generate, random_graded_basis, random_recipe, InstanceRecipe, Strategy};

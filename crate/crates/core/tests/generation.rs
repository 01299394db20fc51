use diffmod::harness::{experiment_recipes, generate, random_recipe, InstanceRecipe};
use diffmod::io::ModuleFile;
use diffmod::{homology_summary, FieldSpec, FpModule, QModule};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn recipe(seed: u64, d: usize, field: FieldSpec) -> InstanceRecipe {
    random_recipe(&mut ChaCha8Rng::seed_from_u64(seed), d, field)
}

#[test]
fn experiment_recipes_are_reproducible() {
    let a = experiment_recipes(30, 2, 11, FieldSpec::Rationals);
    let b = experiment_recipes(30, 2, 11, FieldSpec::Rationals);
    assert_eq!(a, b);
    assert_ne!(a, experiment_recipes(30, 2, 12, FieldSpec::Rationals));
    assert!(a.iter().all(|r| r.d == 2));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn same_recipe_same_bytes(seed in any::<u64>(), d in 1usize..=3) {
        let r = recipe(seed, d, FieldSpec::Rationals);
        let a: QModule = generate(&r).unwrap();
        let b: QModule = generate(&r).unwrap();
        prop_assert_eq!(ModuleFile::from_module(&a).to_json(), ModuleFile::from_module(&b).to_json());
    }

    #[test]
    fn generated_instances_are_valid_with_zero_degree(seed in any::<u64>(), d in 1usize..=3) {
        let r = recipe(seed, d, FieldSpec::Rationals);
        let m: QModule = generate(&r).unwrap();
        prop_assert!(m.violations().is_empty());
        prop_assert!(m.diff_degree().is_zero());
        prop_assert_eq!(m.d(), d);
        prop_assert!(m.generators().iter().all(|g| g.is_free()));
    }

    #[test]
    fn recipes_round_trip_through_json(seed in any::<u64>(), d in 1usize..=3) {
        let r = recipe(seed, d, FieldSpec::Rationals);
        let back: InstanceRecipe = serde_json::from_str(&serde_json::to_string(&r).unwrap()).unwrap();
        prop_assert_eq!(back, r);
    }

    #[test]
    fn module_files_round_trip(seed in any::<u64>(), d in 1usize..=3) {
        let m: QModule = generate(&recipe(seed, d, FieldSpec::Rationals)).unwrap();
        let text = ModuleFile::from_module(&m).to_json();
        let back: QModule = ModuleFile::parse(&text).unwrap().to_module(None).unwrap();
        prop_assert_eq!(back, m);
    }

    #[test]
    fn prime_field_instances_are_valid(seed in any::<u64>(), d in 1usize..=2) {
        let r = recipe(seed, d, FieldSpec::PrimeField(7));
        let m: FpModule = generate(&r).unwrap();
        prop_assert!(m.violations().is_empty());
        let s = homology_summary(&m).unwrap();
        prop_assert!(s.total_length.is_finite() || !s.finite_length);
    }
}

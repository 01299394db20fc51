mod common;

use common::{instance, regrade};
use diffmod::harness::{fixtures, scorpion};
use diffmod::structure::{build_flag, cancel, find_unit_entry, minimize, verify_flag};
use diffmod::torbetti::{betti, flag_reduction_betti, BettiWitness};
use diffmod::{homology_summary, FieldSpec, QModule, Rational};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn unit_entries(m: &QModule) -> Vec<(usize, usize)> {
    m.entries().filter(|&(r, c, _)| r != c && m.entry_exponent(r, c).is_zero()).map(|(r, c, _)| (r, c)).collect()
}

/// Cancels units chosen at random until none are left.
fn random_minimize(m: &QModule, seed: u64) -> QModule {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut current = m.clone();
    loop {
        let units = unit_entries(&current);
        let Some(&(r, c)) = units.choose(&mut rng) else { return current };
        current = cancel(&current, r, c).unwrap().0;
    }
}

#[test]
fn cancelling_the_scorpion_keeps_homology() {
    let f = scorpion::<Rational>(FieldSpec::Rationals);
    let (d, _) = cancel(&f, 0, 3).unwrap();
    assert!(homology_summary(&f).unwrap().agrees_with(&homology_summary(&d).unwrap()));
    let m = minimize(&f).unwrap();
    assert_eq!(m.module, d);
    assert!(!m.direct_summand);
}

#[test]
fn fixture_flags_are_rebuilt() {
    for f in fixtures::<Rational>(FieldSpec::Rationals) {
        if !f.module.diff_degree().is_nonpositive() {
            continue;
        }
        let flag = build_flag(&f.module).unwrap();
        assert!(flag.basis_is_identity(), "{}", f.name);
        assert!(verify_flag(&f.module, &flag.order), "{}", f.name);
        if let Some(BettiWitness::Flag(expected)) = &f.witness {
            assert_eq!(&flag.order, expected, "{}", f.name);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn every_cancellation_keeps_homology(seed in any::<u64>(), d in 1usize..=3) {
        let m = instance(seed, d);
        let before = homology_summary(&m).unwrap();
        for (r, c) in unit_entries(&m) {
            let (q, step) = cancel(&m, r, c).unwrap();
            prop_assert!(q.violations().is_empty());
            prop_assert_eq!(q.rank() + 2, m.rank());
            prop_assert_eq!((step.pivot_rows.shape(), step.pivot_cols.shape()), ((2, m.rank() - 2), (m.rank() - 2, 2)));
            prop_assert!(before.agrees_with(&homology_summary(&q).unwrap()));
        }
    }

    #[test]
    fn minimize_is_idempotent_and_counts_steps(seed in any::<u64>(), d in 1usize..=3) {
        let m = instance(seed, d);
        let r = minimize(&m).unwrap();
        prop_assert_eq!(find_unit_entry(&r.module).unwrap(), None);
        prop_assert_eq!(m.rank() - r.module.rank(), 2 * r.steps.len());
        prop_assert_eq!(r.survivors.len(), r.module.rank());
        let again = minimize(&r.module).unwrap();
        prop_assert!(again.steps.is_empty());
        prop_assert_eq!(again.module, r.module);
    }

    #[test]
    fn cancellation_order_does_not_matter(seed in any::<u64>(), order in any::<u64>(), d in 1usize..=2) {
        let m = instance(seed, d);
        let lex = minimize(&m).unwrap().module;
        let shuffled = random_minimize(&m, order);
        prop_assert_eq!(shuffled.rank(), lex.rank());
        prop_assert!(homology_summary(&shuffled).unwrap().agrees_with(&homology_summary(&lex).unwrap()));
    }

    #[test]
    fn flags_exist_for_nonpositive_degrees(seed in any::<u64>(), d in 1usize..=3, s in proptest::collection::vec(0i64..=2, 3)) {
        let m = instance(seed, d);
        let base = build_flag(&m).unwrap();
        prop_assert!(verify_flag(&base.rebased, &base.order));
        let regraded = regrade(&base.rebased, &base.order, &s[..d]);
        prop_assert!(regraded.violations().is_empty());
        let flag = build_flag(&regraded).unwrap();
        prop_assert!(verify_flag(&flag.rebased, &flag.order));
        let b = flag_reduction_betti(&flag.rebased, &flag.order).unwrap();
        prop_assert_eq!(b.value, flag.minimization.module.rank());
        prop_assert_eq!(b.value, regraded.rank() - 2 * flag.minimization.steps.len());
        let via_witness = betti(&regraded, Some(&BettiWitness::Flag(base.order.clone()))).unwrap();
        prop_assert_eq!(via_witness.value, b.value);
    }
}

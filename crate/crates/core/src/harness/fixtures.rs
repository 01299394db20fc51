use crate::degrees::Multidegree;
use crate::dmcore::{compress, koszul, BoxDifferentialModule, GeneratorSpec, RingContext};
use crate::exactla::{FieldSpec, Scalar};
use crate::structure::{cancel, FlagOrder};
use crate::torbetti::{BettiWitness, CancellationProvenance};

/// A named module with its known invariants.
#[derive(Clone, Debug)]
pub struct Fixture<K> {
    pub name: String,
    pub module: BoxDifferentialModule<K>,
    pub expected_rank: usize,
    pub expected_betti: usize,
    pub expected_length: u64,
    pub witness: Option<BettiWitness<K>>,
}

fn scorpion_entries<K: Scalar>(field: &FieldSpec) -> Vec<(usize, usize, K)> {
    let s = |n| K::from_int(n, field);
    vec![(0, 1, s(1)), (0, 2, s(1)), (0, 3, s(1)), (1, 3, s(-1)), (2, 3, s(1))]
}

fn free(shifts: &[[i64; 2]]) -> Vec<GeneratorSpec> {
    shifts.iter().map(|s| GeneratorSpec::free(Multidegree(s.to_vec()))).collect()
}

/// `R → R(1,0) ⊕ R(0,1) → R(1,1)` compressed: entries `x, y, xy` plus the
/// Koszul signs.
pub fn deg0_scorpion<K: Scalar>(field: FieldSpec) -> BoxDifferentialModule<K> {
    BoxDifferentialModule::from_entries(
        RingContext::new(2, field),
        free(&[[0, 0], [1, 0], [0, 1], [1, 1]]),
        Multidegree(vec![0, 0]),
        scorpion_entries(&field),
    )
    .expect("well-formed fixture")
}

/// Same matrix with `t = (1, 1)`; the entry `(1, 4)` is the unit 1.
pub fn scorpion<K: Scalar>(field: FieldSpec) -> BoxDifferentialModule<K> {
    BoxDifferentialModule::from_entries(
        RingContext::new(2, field),
        free(&[[0, 0], [0, -1], [-1, 0], [-1, -1]]),
        Multidegree(vec![1, 1]),
        scorpion_entries(&field),
    )
    .expect("well-formed fixture")
}

pub fn scorpion_flag() -> FlagOrder {
    FlagOrder::new(vec![0, 1, 1, 2])
}

/// The scorpion with its unit pair cancelled.
pub fn minimized_scorpion<K: Scalar>(field: FieldSpec) -> BoxDifferentialModule<K> {
    cancel(&scorpion::<K>(field), 0, 3).expect("unit entry").0
}

/// The compressed Koszul complex on all `d` variables.
pub fn compressed_koszul<K: Scalar>(d: usize, field: FieldSpec) -> BoxDifferentialModule<K> {
    let ring = RingContext::new(d, field);
    let axes: Vec<usize> = (0..d).collect();
    compress(&koszul(ring, &axes).expect("valid axes")).expect("Koszul complex is a complex")
}

pub fn fixtures<K: Scalar>(field: FieldSpec) -> Vec<Fixture<K>> {
    let mut out = vec![
        Fixture {
            name: "deg0-scorpion".into(),
            module: deg0_scorpion(field),
            expected_rank: 4,
            expected_betti: 4,
            expected_length: 1,
            witness: Some(BettiWitness::Flag(scorpion_flag())),
        },
        Fixture {
            name: "scorpion".into(),
            module: scorpion(field),
            expected_rank: 4,
            expected_betti: 2,
            expected_length: 1,
            witness: Some(BettiWitness::Flag(scorpion_flag())),
        },
        Fixture {
            name: "minimized-scorpion".into(),
            module: minimized_scorpion(field),
            expected_rank: 2,
            expected_betti: 2,
            expected_length: 1,
            witness: Some(BettiWitness::Provenance(CancellationProvenance {
                source: scorpion(field),
                flag: scorpion_flag(),
                pivots: vec![(0, 3)],
            })),
        },
    ];
    for d in 1..=4 {
        let module = compressed_koszul(d, field);
        let flag = FlagOrder::new((0..=d).flat_map(|n| std::iter::repeat_n(n, binomial(d, n))).collect());
        out.push(Fixture {
            name: format!("koszul-{d}"),
            module,
            expected_rank: 1 << d,
            expected_betti: 1 << d,
            expected_length: 1,
            witness: Some(BettiWitness::Flag(flag)),
        });
    }
    out
}

pub fn fixture<K: Scalar>(name: &str, field: FieldSpec) -> Option<Fixture<K>> {
    fixtures(field).into_iter().find(|f| f.name == name)
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

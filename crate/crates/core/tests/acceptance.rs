//! The acceptance criteria, one line each. Runs as a plain binary so the
//! verdicts are always printed.

mod common;

use std::process::ExitCode;

use common::{instance, oracle_mismatch, regrade};
use diffmod::harness::{compressed_koszul, deg0_scorpion, fixtures, run_bound_experiment, scorpion, scorpion_flag};
use diffmod::structure::{build_flag, cancel, minimize, verify_flag, FlagOrder};
use diffmod::torbetti::{betti, check_tor_inequality, BettiMethod, BettiWitness, CancellationProvenance};
use diffmod::{
    homology_summary, BoxDifferentialModule, Error, ExtCount, FieldSpec, Multidegree, QModule, QMatrix, Rational,
    Scalar,
};

type Check = Result<String, String>;

const QQ: FieldSpec = FieldSpec::Rationals;

fn q(n: i64) -> Rational {
    Rational::from_int(n, &QQ)
}

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn err(e: Error) -> String {
    e.to_string()
}

fn length(m: &QModule) -> Result<ExtCount, String> {
    Ok(homology_summary(m).map_err(err)?.total_length)
}

fn criterion_1() -> Check {
    let d = deg0_scorpion::<Rational>(QQ);
    d.validate().map_err(err)?;
    let s = homology_summary(&d).map_err(err)?;
    ensure(
        s.support_points() == Some(vec![(Multidegree(vec![0, 0]), 1)]),
        format!("homology support {:?}", s.support_points()),
    )?;
    let graded = betti(&d, None).map_err(err)?;
    let flagged = betti(&d, Some(&BettiWitness::Flag(scorpion_flag()))).map_err(err)?;
    ensure(graded.method == BettiMethod::GradedTor && graded.value == 4, format!("graded Tor gives {}", graded.value))?;
    ensure(flagged.value == 4 && flagged.reduced_rank == Some(0), format!("flag reduction gives {}", flagged.value))?;
    Ok("H = k at (0,0); betti 4 by graded Tor and by flag reduction".into())
}

fn criterion_2() -> Check {
    let f = scorpion::<Rational>(QQ);
    f.validate().map_err(err)?;
    ensure(f.diff_degree() == &Multidegree(vec![1, 1]), "t is not (1,1)")?;
    ensure(length(&f)? == ExtCount::Finite(1), "homology length is not 1")?;
    let b = betti(&f, Some(&BettiWitness::Flag(scorpion_flag()))).map_err(err)?;
    ensure(b.method == BettiMethod::FlagReduction && b.value == 2, format!("betti {}", b.value))?;
    Ok(format!("H length 1; betti 4 - 2*{} = 2 with levels 0,1,1,2", b.reduced_rank.unwrap_or(0)))
}

fn criterion_3() -> Check {
    let f = scorpion::<Rational>(QQ);
    let (d, step) = cancel(&f, 0, 3).map_err(err)?;
    ensure(d.rank() == 2 && step.unit == q(1), "cancellation did not leave two generators")?;
    // [[xy, -y^2], [x^2, -xy]] on the same generators
    let target = BoxDifferentialModule::new(
        *d.ring(),
        d.generators().to_vec(),
        d.diff_degree().clone(),
        QMatrix::from_rows(vec![vec![q(1), q(-1)], vec![q(1), q(-1)]]),
    )
    .map_err(err)?;
    let exps: Vec<Vec<i64>> = [(0, 0), (0, 1), (1, 0), (1, 1)].iter().map(|&(r, c)| target.entry_exponent(r, c).0).collect();
    ensure(exps == vec![vec![1, 1], vec![0, 2], vec![2, 0], vec![1, 1]], format!("monomials {exps:?}"))?;
    let signs = [(1, 1), (1, -1), (-1, 1), (-1, -1)];
    let iso = signs.iter().find(|&&(a, b)| {
        let g = QMatrix::from_rows(vec![vec![q(a), q(0)], vec![q(0), q(b)]]);
        d.change_basis(&g).map(|c| c == target).unwrap_or(false)
    });
    let (a, b) = *iso.ok_or("no sign change matches the expected matrix")?;
    ensure(length(&d)? == ExtCount::Finite(1), "homology length is not 1")?;
    let p = CancellationProvenance { source: f, flag: scorpion_flag(), pivots: vec![(0, 3)] };
    let r = betti(&d, Some(&BettiWitness::Provenance(p))).map_err(err)?;
    ensure(r.method == BettiMethod::Provenance && r.value == 2, format!("betti {}", r.value))?;
    Ok(format!("rank 2, signs ({a},{b}) give [[xy,-y^2],[x^2,-xy]]; H length 1; betti 2 by provenance"))
}

fn criterion_4() -> Check {
    let mut seen = Vec::new();
    for d in 1..=4 {
        let k = compressed_koszul::<Rational>(d, QQ);
        ensure(length(&k)? == ExtCount::Finite(1), format!("d={d}: homology length"))?;
        let b = betti(&k, None).map_err(err)?.value;
        ensure(b == 1 << d, format!("d={d}: betti {b}"))?;
        seen.push(b.to_string());
    }
    Ok(format!("H length 1 and betti {} for d = 1..4", seen.join(", ")))
}

fn criterion_5() -> Check {
    let mut checked = 0;
    for f in fixtures::<Rational>(QQ) {
        if let Some((p, fast, slow)) = oracle_mismatch(&f.module, -4, 6) {
            return Err(format!("{} at {p:?}: cells {fast}, brute force {slow}", f.name));
        }
        checked += 1;
    }
    for k in 0..20u64 {
        let d = 1 + (k % 3) as usize;
        let m = instance(5000 + k, d);
        if let Some((p, fast, slow)) = oracle_mismatch(&m, -4, 6) {
            return Err(format!("instance {k} (d={d}) at {p:?}: cells {fast}, brute force {slow}"));
        }
        checked += 1;
    }
    Ok(format!("{checked} modules agree at every degree of [-4,6]^d"))
}

fn t0_instances() -> Vec<QModule> {
    (0..100u64).map(|k| instance(9000 + k, 1 + (k % 3) as usize)).collect()
}

fn criterion_6() -> Check {
    let mut steps = 0;
    for (k, m) in t0_instances().iter().enumerate() {
        let r = minimize(m).map_err(err)?;
        ensure(r.module.is_minimal(), format!("instance {k}: unit entry left"))?;
        ensure(r.direct_summand, format!("instance {k}: not marked as a summand"))?;
        let before = homology_summary(m).map_err(err)?;
        let after = homology_summary(&r.module).map_err(err)?;
        ensure(before.agrees_with(&after), format!("instance {k}: homology changed"))?;
        let flag = build_flag(m).map_err(err)?;
        ensure(verify_flag(&flag.rebased, &flag.order), format!("instance {k}: flag rejected"))?;
        steps += r.steps.len();
    }
    Ok(format!("100 instances minimal after {steps} cancellations, homology kept, flags verified"))
}

fn criterion_7() -> Check {
    let mut witnessed: Vec<(String, QModule, FlagOrder)> = Vec::new();
    for f in fixtures::<Rational>(QQ) {
        if let Some(BettiWitness::Flag(order)) = &f.witness {
            witnessed.push((f.name.clone(), f.module.clone(), order.clone()));
        }
    }
    for (k, m) in t0_instances().into_iter().enumerate() {
        let flag = build_flag(&m).map_err(err)?;
        let s: Vec<i64> = (0..m.d()).map(|i| (k as i64 + i as i64) % 2).collect();
        witnessed.push((format!("regraded {k}"), regrade(&flag.rebased, &flag.order, &s), flag.order.clone()));
        witnessed.push((format!("instance {k}"), flag.rebased, flag.order));
    }
    let mut equalities = 0;
    for (name, m, order) in &witnessed {
        let b = betti(m, Some(&BettiWitness::Flag(order.clone()))).map_err(err)?.value;
        ensure(b <= m.rank(), format!("{name}: betti {b} > rank {}", m.rank()))?;
        if m.is_minimal() {
            ensure(b == m.rank(), format!("{name}: minimal but betti {b} != rank {}", m.rank()))?;
            equalities += 1;
        }
    }
    Ok(format!("betti <= rank on {} flagged modules; equality on all {equalities} minimal ones", witnessed.len()))
}

fn criterion_8() -> Check {
    let mut checks = 0;
    let mut run = |name: &str, m: &QModule| -> Result<(), String> {
        let s = homology_summary(m).map_err(err)?;
        if s.is_zero() || !s.finite_length {
            return Ok(());
        }
        for axis in 0..m.d() {
            if m.diff_degree().0[axis] != 0 {
                continue;
            }
            let r = check_tor_inequality(m, axis).map_err(err)?;
            ensure(r.holds, format!("{name}, direction {}: {} < {} + {}", axis + 1, r.lhs, r.rhs_low, r.rhs_high))?;
            checks += 1;
        }
        Ok(())
    };
    for f in fixtures::<Rational>(QQ) {
        run(&f.name, &f.module)?;
    }
    let mut used = 0;
    let mut k = 0u64;
    while used < 50 {
        let d = 1 + (k % 3) as usize;
        let m = instance(20000 + k, d);
        k += 1;
        let s = homology_summary(&m).map_err(err)?;
        if s.is_zero() || !s.finite_length {
            continue;
        }
        run(&format!("instance {k}"), &m)?;
        used += 1;
    }
    Ok(format!("{checks} direction checks on fixtures and 50 instances all hold"))
}

fn criterion_9() -> Check {
    let two = run_bound_experiment(200, 2, 42).map_err(err)?;
    let three = run_bound_experiment(100, 3, 7).map_err(err)?;
    ensure(two.violations() == 0, format!("d=2: {} violations", two.violations()))?;
    ensure(three.violations() == 0, format!("d=3: {} violations", three.violations()))?;
    ensure(two.min_betti == Some(4), format!("d=2 minimum {:?}", two.min_betti))?;
    ensure(three.min_betti.is_some_and(|b| b >= 8), format!("d=3 minimum {:?}", three.min_betti))?;
    Ok(format!(
        "d=2: {} tested, minimum {}; d=3: {} tested, minimum {}; no violations",
        two.reports.len(),
        two.min_betti.unwrap_or(0),
        three.reports.len(),
        three.min_betti.unwrap_or(0)
    ))
}

fn criterion_10() -> Check {
    let f = scorpion::<Rational>(QQ);
    ensure(!f.diff_degree().is_nonpositive(), "scorpion t is not positive")?;
    ensure(length(&f)? == ExtCount::Finite(1), "homology length is not 1")?;
    let b = betti(&f, Some(&BettiWitness::Flag(scorpion_flag()))).map_err(err)?.value;
    ensure(b == 2 && b < 4, format!("betti {b}"))?;
    ensure(matches!(betti(&f, None), Err(Error::Unsupported(_))), "betti without witness should be unsupported")?;
    ensure(matches!(build_flag(&f), Err(Error::PositiveDifferentialDegree(_))), "flag construction should refuse t > 0")?;
    Ok("t = (1,1): betti 2 < 4 = 2^d".into())
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Check); 10] = [
        ("deg-0 scorpion", criterion_1),
        ("scorpion", criterion_2),
        ("minimized scorpion", criterion_3),
        ("Koszul family", criterion_4),
        ("oracle equivalence", criterion_5),
        ("minimization and flags", criterion_6),
        ("betti <= rank", criterion_7),
        ("Tor inequality", criterion_8),
        ("bound experiment", criterion_9),
        ("positive degree control", criterion_10),
    ];
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", k + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why}", k + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

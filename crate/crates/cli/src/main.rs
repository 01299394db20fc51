use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use diffmod::harness::{fixtures, run_bound_experiment_in, BoundExperiment};
use diffmod::io::{parse_flag, BettiReport, ComplexFile, InputFile, ModuleFile, ProvenanceFile};
use diffmod::structure::{build_flag, minimize};
use diffmod::torbetti::{betti, check_tor_inequality, high_low, BettiWitness};
use diffmod::{
    compress, homology_summary, BoxDifferentialModule, Error, ExtCount, FieldSpec, Fp, HomologySummary, Rational,
    Scalar,
};

#[derive(Parser)]
#[command(name = "diffmod", version, about = "Homology, Tor and Betti numbers of multigraded differential modules")]
struct Cli {
    /// Coefficient field, overriding the one in the input file: QQ or Fp:<p>.
    #[arg(long, global = true)]
    field: Option<FieldSpec>,
    /// Machine-readable JSON output.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check that the entries exist and δ² = 0.
    Validate { file: PathBuf },
    /// Degreewise homology over the whole cell decomposition.
    Homology { file: PathBuf },
    /// Betti number by graded Tor, a flag order, or cancellation provenance.
    Betti {
        file: PathBuf,
        #[arg(long, conflicts_with = "provenance")]
        flag: Option<PathBuf>,
        #[arg(long)]
        provenance: Option<PathBuf>,
    },
    /// Cancel unit entries until the differential is minimal.
    Minimize { file: PathBuf },
    /// Build a free flag (differential degree <= 0).
    Flag { file: PathBuf },
    /// Compress a complex file into a differential module.
    Compress { file: PathBuf },
    /// High-low decomposition along coordinate `dir` (1-based).
    Highlow {
        file: PathBuf,
        #[arg(long)]
        dir: usize,
    },
    /// Tor length inequality for the high-low decomposition along `dir` (1-based).
    TorIneq {
        file: PathBuf,
        #[arg(long)]
        dir: usize,
    },
    /// List the built-in fixtures, optionally checking their invariants.
    Fixtures {
        #[arg(long)]
        check: bool,
    },
    /// Test β >= 2^d on seeded random instances.
    Experiment {
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long = "dim")]
        dim: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Directory for counterexample dumps.
        #[arg(long, default_value = "counterexamples")]
        out: PathBuf,
    },
}

/// A failed check (exit 1), as opposed to bad input (exit 2).
#[derive(Debug)]
struct CheckFailed;

impl std::fmt::Display for CheckFailed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "check failed")
    }
}

impl std::error::Error for CheckFailed {}

struct Output {
    json: bool,
}

impl Output {
    fn emit(&self, value: &impl Serialize, text: impl FnOnce() -> String) {
        if self.json {
            println!("{}", serde_json::to_string_pretty(value).expect("serializable"));
        } else {
            print!("{}", text());
        }
    }
}

fn read(path: &Path) -> anyhow::Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn load_module<K: Scalar>(path: &Path, field: Option<FieldSpec>) -> anyhow::Result<BoxDifferentialModule<K>> {
    match InputFile::parse(&read(path)?)? {
        InputFile::Module(m) => Ok(m.to_module(field)?),
        InputFile::Complex(c) => Ok(compress(&c.to_complex::<K>(field)?)?),
    }
}

fn monomial(e: &[i64]) -> String {
    const VARS: [&str; 3] = ["x", "y", "z"];
    let mut s = String::new();
    for (i, &k) in e.iter().enumerate() {
        if k == 0 {
            continue;
        }
        let name = if e.len() <= 3 { VARS[i].to_string() } else { format!("x{}", i + 1) };
        s.push_str(&name);
        if k != 1 {
            let _ = write!(s, "^{k}");
        }
    }
    s
}

fn entry_text<K: Scalar>(m: &BoxDifferentialModule<K>, r: usize, c: usize) -> String {
    let v = m.coefficient(r, c);
    if v.is_zero() {
        return "0".into();
    }
    let mono = monomial(&m.entry_exponent(r, c).0);
    let coeff = v.to_string();
    match (coeff.as_str(), mono.is_empty()) {
        (_, true) => coeff,
        ("1", false) => mono,
        ("-1", false) => format!("-{mono}"),
        _ => format!("{coeff}{mono}"),
    }
}

fn describe<K: Scalar>(m: &BoxDifferentialModule<K>) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "d = {}, field {}, t = {}, {} generator(s)", m.d(), m.field(), m.diff_degree(), m.rank());
    for (j, g) in m.generators().iter().enumerate() {
        let caps = if g.is_free() {
            String::new()
        } else {
            let c: Vec<String> = g.cap.iter().map(|c| c.map_or("inf".into(), |u| u.to_string())).collect();
            format!(" cap ({})", c.join(","))
        };
        let _ = writeln!(s, "  e{} shift {}{}", j + 1, g.shift, caps);
    }
    if m.rank() > 0 {
        let cells: Vec<Vec<String>> =
            (0..m.rank()).map(|r| (0..m.rank()).map(|c| entry_text(m, r, c)).collect()).collect();
        let width = cells.iter().flatten().map(|x| x.chars().count()).max().unwrap_or(1);
        for row in cells {
            let padded: Vec<String> = row.iter().map(|x| format!("{x:>width$}")).collect();
            let _ = writeln!(s, "  [ {} ]", padded.join("  "));
        }
    }
    s
}

fn summary_text(s: &HomologySummary) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "total length: {}", s.total_length);
    match s.support_points() {
        Some(points) => {
            for (m, dim) in points {
                let _ = writeln!(out, "  H at {m}: {dim}");
            }
        }
        None => {
            for (cell, &dim) in s.decomposition.cells.iter().zip(&s.dims) {
                if dim > 0 {
                    let iv: Vec<String> = cell.intervals.iter().map(|i| i.to_string()).collect();
                    let _ = writeln!(out, "  H on {}: {dim}", iv.join(" x "));
                }
            }
        }
    }
    out
}

fn summary_json(s: &HomologySummary) -> serde_json::Value {
    json!({
        "finite_length": s.finite_length,
        "total_length": s.total_length,
        "support": s.support_points().map(|p| p.into_iter().map(|(m, dim)| json!({"degree": m, "dim": dim})).collect::<Vec<_>>()),
        "support_box": s.support_box,
        "cells": s.decomposition.len(),
    })
}

fn axis(dir: usize, d: usize) -> anyhow::Result<usize> {
    if dir == 0 || dir > d {
        return Err(Error::AxisOutOfRange { axis: dir, d }.into());
    }
    Ok(dir - 1)
}

fn run<K: Scalar>(cli: &Cli, field: Option<FieldSpec>) -> anyhow::Result<()> {
    let out = Output { json: cli.json };
    match &cli.command {
        Command::Validate { file } => {
            let m = load_module::<K>(file, field)?;
            let v = m.violations();
            out.emit(&json!({"valid": v.is_empty(), "violations": v}), || {
                if v.is_empty() {
                    format!("valid: {} generator(s), t = {}\n", m.rank(), m.diff_degree())
                } else {
                    v.iter().map(|x| format!("{x}\n")).collect()
                }
            });
            if !v.is_empty() {
                return Err(CheckFailed.into());
            }
        }
        Command::Homology { file } => {
            let m = load_module::<K>(file, field)?;
            let s = homology_summary(&m)?;
            out.emit(&summary_json(&s), || summary_text(&s));
        }
        Command::Betti { file, flag, provenance } => {
            let m = load_module::<K>(file, field)?;
            m.validate()?;
            let witness = match (flag, provenance) {
                (Some(f), _) => Some(BettiWitness::Flag(parse_flag(&read(f)?)?)),
                (_, Some(p)) => Some(BettiWitness::Provenance(ProvenanceFile::parse(&read(p)?)?.to_provenance(field)?)),
                _ => None,
            };
            let result = betti(&m, witness.as_ref())?;
            let length = homology_summary(&m)?.total_length;
            let report = BettiReport::new(&result, m.rank(), length, m.d());
            out.emit(&report, || {
                let mut s = format!("betti {} ({})\n", report.betti, report.method);
                let _ = writeln!(s, "rank {}, homology length {}", report.rank, report.homology_length);
                let _ = writeln!(
                    s,
                    "2^d = {}: {}",
                    report.bound_2d,
                    if report.bound_satisfied { "bound met" } else { "below bound" }
                );
                s
            });
        }
        Command::Minimize { file } => {
            let m = load_module::<K>(file, field)?;
            let r = minimize(&m)?;
            let steps: Vec<serde_json::Value> = r
                .steps
                .iter()
                .map(|s| {
                    json!({"row": s.row + 1, "col": s.col + 1, "original": [s.original.0 + 1, s.original.1 + 1], "unit": s.unit.to_string()})
                })
                .collect();
            let value = json!({
                "module": ModuleFile::from_module(&r.module),
                "steps": steps,
                "survivors": r.survivors.iter().map(|k| k + 1).collect::<Vec<_>>(),
                "direct_summand": r.direct_summand,
            });
            out.emit(&value, || {
                let mut s = String::new();
                for st in &r.steps {
                    let _ = writeln!(s, "cancel e{} -> e{} (unit {})", st.original.1 + 1, st.original.0 + 1, st.unit);
                }
                let _ = writeln!(s, "{} step(s); minimal module:", r.steps.len());
                s + &describe(&r.module)
            });
        }
        Command::Flag { file } => {
            let m = load_module::<K>(file, field)?;
            let f = build_flag(&m)?;
            let identity = f.basis_is_identity();
            let value = json!({
                "flag": f.order,
                "basis_changed": !identity,
                "module": (!identity).then(|| ModuleFile::from_module(&f.rebased)),
            });
            out.emit(&value, || {
                let mut s = format!("levels {:?}\n", f.order.levels);
                if !identity {
                    s.push_str("after a graded change of basis:\n");
                    s.push_str(&describe(&f.rebased));
                }
                s
            });
        }
        Command::Compress { file } => {
            let c = ComplexFile::parse(&read(file)?)?;
            let m = compress(&c.to_complex::<K>(field)?)?;
            let value = ModuleFile::from_module(&m);
            out.emit(&value, || describe(&m));
        }
        Command::Highlow { file, dir } => {
            let m = load_module::<K>(file, field)?;
            let hl = high_low(&m, axis(*dir, m.d())?)?;
            let value = json!({
                "dir": dir,
                "a": hl.low_value,
                "b": hl.high_value,
                "truncated": ModuleFile::from_module(&hl.truncated),
                "low": ModuleFile::from_module(&hl.low),
                "high": ModuleFile::from_module(&hl.high),
            });
            out.emit(&value, || {
                format!(
                    "a = {}, b = {}\ntruncated:\n{}low slice:\n{}high slice:\n{}",
                    hl.low_value,
                    hl.high_value,
                    describe(&hl.truncated),
                    describe(&hl.low),
                    describe(&hl.high)
                )
            });
        }
        Command::TorIneq { file, dir } => {
            let m = load_module::<K>(file, field)?;
            let r = check_tor_inequality(&m, axis(*dir, m.d())?)?;
            let value = json!({"dir": dir, "lhs": r.lhs, "rhs_low": r.rhs_low, "rhs_high": r.rhs_high, "holds": r.holds});
            out.emit(&value, || {
                format!(
                    "{} >= {} + {}: {}\n",
                    r.lhs,
                    r.rhs_low,
                    r.rhs_high,
                    if r.holds { "holds" } else { "FAILS" }
                )
            });
            if !r.holds {
                return Err(CheckFailed.into());
            }
        }
        Command::Fixtures { check } => {
            let f = field.unwrap_or_default();
            let mut rows = Vec::new();
            let mut ok = true;
            for fx in fixtures::<K>(f) {
                let mut row = json!({
                    "name": fx.name,
                    "d": fx.module.d(),
                    "diff_degree": fx.module.diff_degree(),
                    "rank": fx.expected_rank,
                    "betti": fx.expected_betti,
                    "homology_length": fx.expected_length,
                });
                if *check {
                    let valid = fx.module.violations().is_empty();
                    let length = homology_summary(&fx.module)?.total_length;
                    let b = betti(&fx.module, fx.witness.as_ref())?;
                    let pass = valid
                        && fx.module.rank() == fx.expected_rank
                        && length == ExtCount::Finite(fx.expected_length)
                        && b.value == fx.expected_betti;
                    ok &= pass;
                    row["computed"] = json!({"valid": valid, "homology_length": length, "betti": b.value, "method": b.method});
                    row["pass"] = json!(pass);
                }
                rows.push(row);
            }
            out.emit(&rows, || {
                rows.iter()
                    .map(|r| {
                        let mut s = format!(
                            "{:<20} d={} rank={} betti={} H length={}",
                            r["name"].as_str().unwrap_or_default(),
                            r["d"],
                            r["rank"],
                            r["betti"],
                            r["homology_length"]
                        );
                        if let Some(p) = r.get("pass") {
                            s.push_str(if p.as_bool() == Some(true) { "  ok" } else { "  MISMATCH" });
                        }
                        s + "\n"
                    })
                    .collect()
            });
            if !ok {
                return Err(CheckFailed.into());
            }
        }
        Command::Experiment { count, dim, seed, out: dir } => {
            let e: BoundExperiment = run_bound_experiment_in::<K>(*count, *dim, *seed, field.unwrap_or_default())?;
            let mut written = Vec::new();
            if !e.counterexamples.is_empty() {
                std::fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
                for c in &e.counterexamples {
                    let path = dir.join(format!("{}.json", c.id));
                    std::fs::write(&path, c.instance.to_json()).with_context(|| format!("cannot write {}", path.display()))?;
                    written.push(path.display().to_string());
                }
            }
            let value = json!({
                "d": e.d,
                "seed": e.seed,
                "count": e.count,
                "tested": e.reports.len(),
                "discarded_zero": e.discarded_zero,
                "discarded_infinite": e.discarded_infinite,
                "min_betti": e.min_betti,
                "bound": 1u64 << e.d,
                "violations": e.violations(),
                "counterexample_files": written,
                "reports": e.reports,
            });
            out.emit(&value, || {
                let mut s = format!(
                    "d = {}, seed {}: {} tested, {} with zero homology, {} with infinite length\n",
                    e.d,
                    e.seed,
                    e.reports.len(),
                    e.discarded_zero,
                    e.discarded_infinite
                );
                let min = e.min_betti.map_or("-".into(), |m| m.to_string());
                let _ = writeln!(s, "minimum betti {min}, bound {}, violations {}", 1u64 << e.d, e.violations());
                for w in &written {
                    let _ = writeln!(s, "counterexample written to {w}");
                }
                s
            });
            if e.violations() > 0 {
                return Err(CheckFailed.into());
            }
        }
    }
    Ok(())
}

fn file_field(cli: &Cli) -> anyhow::Result<FieldSpec> {
    let path = match &cli.command {
        Command::Validate { file }
        | Command::Homology { file }
        | Command::Betti { file, .. }
        | Command::Minimize { file }
        | Command::Flag { file }
        | Command::Compress { file }
        | Command::Highlow { file, .. }
        | Command::TorIneq { file, .. } => file,
        Command::Fixtures { .. } | Command::Experiment { .. } => return Ok(FieldSpec::default()),
    };
    Ok(InputFile::parse(&read(path)?)?.field())
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.is::<CheckFailed>() {
        return 1;
    }
    match err.downcast_ref::<Error>() {
        Some(Error::Parse(_)) | Some(Error::NotPrime(_)) | Some(Error::FieldMismatch(_)) | None => 2,
        Some(_) => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let field = cli.field;
    let result = file_field(&cli).and_then(|from_file| match field.unwrap_or(from_file) {
        FieldSpec::Rationals => run::<Rational>(&cli, Some(FieldSpec::Rationals)),
        p @ FieldSpec::PrimeField(_) => run::<Fp>(&cli, Some(p)),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if !e.is::<CheckFailed>() {
                eprintln!("error: {e:#}");
            }
            ExitCode::from(exit_code(&e))
        }
    }
}

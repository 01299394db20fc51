//! JSON file formats. Generator indices in files are 1-based.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::degrees::{Cap, ExtCount, Multidegree};
use crate::dmcore::{BoxDifferentialModule, ComplexLevel, GeneratorSpec, GradedComplex, RingContext};
use crate::error::{Error, Result};
use crate::exactla::{FieldSpec, Scalar, ScalarMatrix};
use crate::structure::FlagOrder;
use crate::torbetti::{BettiResult, CancellationProvenance};

/// A coefficient written either as a JSON integer or as `"n"` / `"p/q"`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Coefficient {
    Int(i64),
    Text(String),
}

impl Coefficient {
    pub fn from_scalar<K: Scalar>(v: &K) -> Self {
        let text = v.to_string();
        text.parse::<i64>().map_or(Coefficient::Text(text), Coefficient::Int)
    }

    pub fn to_scalar<K: Scalar>(&self, field: &FieldSpec) -> Result<K> {
        match self {
            Coefficient::Int(n) => Ok(K::from_int(*n, field)),
            Coefficient::Text(t) => K::parse(t, field),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorRecord {
    pub shift: Vec<i64>,
    /// Per-coordinate caps, `null` meaning infinite; omitted for free generators.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cap: Option<Vec<Cap>>,
}

impl GeneratorRecord {
    fn from_spec(g: &GeneratorSpec) -> Self {
        GeneratorRecord { shift: g.shift.0.clone(), cap: (!g.is_free()).then(|| g.cap.clone()) }
    }

    fn to_spec(&self) -> GeneratorSpec {
        let d = self.shift.len();
        GeneratorSpec { shift: Multidegree(self.shift.clone()), cap: self.cap.clone().unwrap_or_else(|| vec![None; d]) }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntryRecord {
    pub row: usize,
    pub col: usize,
    pub coeff: Coefficient,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModuleFile {
    pub d: usize,
    #[serde(default)]
    pub field: FieldSpec,
    pub diff_degree: Vec<i64>,
    pub generators: Vec<GeneratorRecord>,
    #[serde(default)]
    pub entries: Vec<EntryRecord>,
}

impl ModuleFile {
    pub fn from_module<K: Scalar>(m: &BoxDifferentialModule<K>) -> Self {
        ModuleFile {
            d: m.d(),
            field: *m.field(),
            diff_degree: m.diff_degree().0.clone(),
            generators: m.generators().iter().map(GeneratorRecord::from_spec).collect(),
            entries: m
                .entries()
                .map(|(r, c, v)| EntryRecord { row: r + 1, col: c + 1, coeff: Coefficient::from_scalar(v) })
                .collect(),
        }
    }

    /// Builds the module over `field`, or over the file's own field when `None`.
    pub fn to_module<K: Scalar>(&self, field: Option<FieldSpec>) -> Result<BoxDifferentialModule<K>> {
        let field = field.unwrap_or(self.field);
        field.check()?;
        let ring = RingContext::new(self.d, field);
        let generators: Vec<GeneratorSpec> = self.generators.iter().map(GeneratorRecord::to_spec).collect();
        let n = generators.len();
        let mut seen = HashSet::new();
        let mut entries = Vec::with_capacity(self.entries.len());
        for e in &self.entries {
            if e.row == 0 || e.col == 0 || e.row > n || e.col > n {
                return Err(Error::Parse(format!("entry ({}, {}) outside 1..={n}", e.row, e.col)));
            }
            if !seen.insert((e.row, e.col)) {
                return Err(Error::Parse(format!("entry ({}, {}) given twice", e.row, e.col)));
            }
            entries.push((e.row - 1, e.col - 1, e.coeff.to_scalar::<K>(&field)?));
        }
        BoxDifferentialModule::from_entries(ring, generators, Multidegree(self.diff_degree.clone()), entries)
    }

    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelRecord {
    pub generators: Vec<GeneratorRecord>,
    /// Rows are the previous level's generators; empty for level 0.
    #[serde(default)]
    pub matrix_to_previous: Vec<Vec<Coefficient>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplexFile {
    pub d: usize,
    #[serde(default)]
    pub field: FieldSpec,
    pub levels: Vec<LevelRecord>,
}

impl ComplexFile {
    pub fn from_complex<K: Scalar>(c: &GradedComplex<K>) -> Self {
        ComplexFile {
            d: c.ring().d,
            field: c.ring().field,
            levels: c
                .levels()
                .iter()
                .map(|l| LevelRecord {
                    generators: l.generators.iter().map(GeneratorRecord::from_spec).collect(),
                    matrix_to_previous: (0..l.to_previous.rows())
                        .map(|r| l.to_previous.row(r).iter().map(Coefficient::from_scalar).collect())
                        .collect(),
                })
                .collect(),
        }
    }

    pub fn to_complex<K: Scalar>(&self, field: Option<FieldSpec>) -> Result<GradedComplex<K>> {
        let field = field.unwrap_or(self.field);
        field.check()?;
        let mut levels = Vec::with_capacity(self.levels.len());
        for (n, l) in self.levels.iter().enumerate() {
            let generators: Vec<GeneratorSpec> = l.generators.iter().map(GeneratorRecord::to_spec).collect();
            let cols = generators.len();
            let mut rows = Vec::with_capacity(l.matrix_to_previous.len());
            for row in &l.matrix_to_previous {
                if row.len() != cols {
                    return Err(Error::Parse(format!("level {n}: matrix row has {} entries, expected {cols}", row.len())));
                }
                rows.push(row.iter().map(|c| c.to_scalar::<K>(&field)).collect::<Result<Vec<K>>>()?);
            }
            let to_previous =
                if rows.is_empty() { ScalarMatrix::zeros(0, cols) } else { ScalarMatrix::from_rows(rows) };
            levels.push(ComplexLevel { generators, to_previous });
        }
        GradedComplex::new(RingContext::new(self.d, field), levels)
    }

    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }
}

/// Either a module or a complex, told apart by the `levels` key.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InputFile {
    Complex(ComplexFile),
    Module(ModuleFile),
}

impl InputFile {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn field(&self) -> FieldSpec {
        match self {
            InputFile::Complex(c) => c.field,
            InputFile::Module(m) => m.field,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PivotRecord {
    pub row: usize,
    pub col: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProvenanceFile {
    pub source: ModuleFile,
    pub flag: FlagOrder,
    pub steps: Vec<PivotRecord>,
}

impl ProvenanceFile {
    pub fn from_provenance<K: Scalar>(p: &CancellationProvenance<K>) -> Self {
        ProvenanceFile {
            source: ModuleFile::from_module(&p.source),
            flag: p.flag.clone(),
            steps: p.pivots.iter().map(|&(r, c)| PivotRecord { row: r + 1, col: c + 1 }).collect(),
        }
    }

    pub fn to_provenance<K: Scalar>(&self, field: Option<FieldSpec>) -> Result<CancellationProvenance<K>> {
        let mut pivots = Vec::with_capacity(self.steps.len());
        for s in &self.steps {
            if s.row == 0 || s.col == 0 {
                return Err(Error::Parse("pivot indices are 1-based".into()));
            }
            pivots.push((s.row - 1, s.col - 1));
        }
        Ok(CancellationProvenance { source: self.source.to_module(field)?, flag: self.flag.clone(), pivots })
    }

    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }
}

pub fn parse_flag(text: &str) -> Result<FlagOrder> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BettiReport {
    pub betti: usize,
    pub method: String,
    pub rank: usize,
    pub homology_length: ExtCount,
    pub bound_2d: u64,
    pub bound_satisfied: bool,
}

impl BettiReport {
    pub fn new(result: &BettiResult, rank: usize, homology_length: ExtCount, d: usize) -> Self {
        let bound = 1u64 << d;
        BettiReport {
            betti: result.value,
            method: result.method.as_str().to_string(),
            rank,
            homology_length,
            bound_2d: bound,
            bound_satisfied: result.value as u64 >= bound,
        }
    }
}

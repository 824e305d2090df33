//! On-disk formats.
//!
//! Every file carries [`SCHEMA_VERSION`] and the model point it was computed
//! at. Values are plain `f64`, written with the shortest representation that
//! parses back to the same bits. Parsers reject unknown fields, a different
//! schema version, and structurally inconsistent content.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::coeffs::ModelParams;
use crate::eigenpoly::{key_partition, PolynomialTable};
use crate::operators::{LatticeOperator, OperatorMatrix};
use crate::partitions::{binomial, LatticeBasis, Partition};
use crate::spectral::Spectrum;
use crate::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelRecord {
    pub n: usize,
    pub m: usize,
    pub g: f64,
    pub p: f64,
    pub alpha: f64,
    pub locked: bool,
}

impl ModelRecord {
    pub fn of(params: &ModelParams) -> Self {
        ModelRecord {
            n: params.n(),
            m: params.m(),
            g: params.g(),
            p: params.p(),
            alpha: params.alpha(),
            locked: params.is_locked(),
        }
    }

    fn check(&self) -> Result<()> {
        if self.n < 1 || self.m < 1 {
            return Err(Error::Parse(format!("n = {}, m = {} must be >= 1", self.n, self.m)));
        }
        if self.n > 32 || self.m > 1024 {
            return Err(Error::Parse("lattice dimensions out of range".into()));
        }
        for (name, v) in [("g", self.g), ("p", self.p), ("alpha", self.alpha)] {
            if !v.is_finite() {
                return Err(Error::Parse(format!("{name} is not finite")));
            }
        }
        Ok(())
    }

    fn dim(&self) -> Result<usize> {
        let d = binomial(self.n + self.m, self.n);
        if d == 0 || d > 1 << 20 {
            return Err(Error::Parse("lattice dimension out of range".into()));
        }
        Ok(d)
    }
}

fn check_version(v: u32) -> Result<()> {
    if v != SCHEMA_VERSION {
        return Err(Error::Parse(format!("schema version {v}, expected {SCHEMA_VERSION}")));
    }
    Ok(())
}

fn check_finite(values: impl IntoIterator<Item = f64>, what: &str) -> Result<()> {
    if values.into_iter().any(|x| !x.is_finite()) {
        return Err(Error::Parse(format!("{what} contains a non-finite value")));
    }
    Ok(())
}

fn parse<T: DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("schema types serialize");
    s.push('\n');
    s
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasisRow {
    pub index: usize,
    pub partition: Partition,
    pub delta: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasisFile {
    pub schema_version: u32,
    pub model: ModelRecord,
    pub rows: Vec<BasisRow>,
}

impl BasisFile {
    pub fn new(params: &ModelParams, basis: &LatticeBasis, weights: &[f64]) -> Self {
        let rows = basis
            .iter()
            .zip(weights)
            .map(|((index, partition), &delta)| BasisRow { index, partition: partition.clone(), delta })
            .collect();
        BasisFile { schema_version: SCHEMA_VERSION, model: ModelRecord::of(params), rows }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let f: BasisFile = parse(text)?;
        check_version(f.schema_version)?;
        f.model.check()?;
        if f.rows.len() != f.model.dim()? {
            return Err(Error::Parse("row count does not match the lattice".into()));
        }
        for (i, row) in f.rows.iter().enumerate() {
            if row.index != i {
                return Err(Error::Parse(format!("row {i} has index {}", row.index)));
            }
            if !row.partition.fits_in_box(f.model.n, f.model.m) {
                return Err(Error::Parse(format!("{} is outside the box", row.partition)));
            }
        }
        check_finite(f.rows.iter().map(|r| r.delta), "delta")?;
        Ok(f)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorFile {
    pub schema_version: u32,
    pub model: ModelRecord,
    /// `D`, `C` or `S`.
    pub kind: String,
    pub r: usize,
    pub symmetrized: bool,
    pub size: usize,
    /// Real parts, row-major.
    pub entries: Vec<Vec<f64>>,
    /// Imaginary parts, present only for complex operators.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub entries_im: Option<Vec<Vec<f64>>>,
}

fn rows_of(a: &DMatrix<f64>) -> Vec<Vec<f64>> {
    a.row_iter().map(|r| r.iter().copied().collect()).collect()
}

impl OperatorFile {
    pub fn new(params: &ModelParams, op: &LatticeOperator) -> Self {
        let (entries, entries_im) = match &op.matrix {
            OperatorMatrix::Real(a) => (rows_of(a), None),
            OperatorMatrix::Complex(a) => (rows_of(&a.map(|x| x.re)), Some(rows_of(&a.map(|x| x.im)))),
        };
        OperatorFile {
            schema_version: SCHEMA_VERSION,
            model: ModelRecord::of(params),
            kind: op.kind.symbol().to_string(),
            r: op.index,
            symmetrized: op.symmetrized,
            size: op.matrix.size(),
            entries,
            entries_im,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let f: OperatorFile = parse(text)?;
        check_version(f.schema_version)?;
        f.model.check()?;
        if !matches!(f.kind.as_str(), "D" | "C" | "S") {
            return Err(Error::Parse(format!("unknown operator kind {:?}", f.kind)));
        }
        if f.r < 1 || f.r > f.model.n {
            return Err(Error::Parse(format!("operator index {} outside 1..={}", f.r, f.model.n)));
        }
        if f.size != f.model.dim()? {
            return Err(Error::Parse(format!("size {} does not match the lattice", f.size)));
        }
        let square = |rows: &Vec<Vec<f64>>| rows.len() == f.size && rows.iter().all(|r| r.len() == f.size);
        if !square(&f.entries) || f.entries_im.as_ref().is_some_and(|im| !square(im)) {
            return Err(Error::Parse("entries are not a size × size matrix".into()));
        }
        check_finite(f.entries.iter().flatten().copied(), "entries")?;
        if let Some(im) = &f.entries_im {
            check_finite(im.iter().flatten().copied(), "entries_im")?;
        }
        Ok(f)
    }

    pub fn real_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.size, self.size, |i, j| self.entries[i][j])
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumRecord {
    pub nu: Partition,
    /// `(re, im)` of `e_1, …, e_n`.
    pub eigenvalues: Vec<[f64; 2]>,
    pub norm_hat: f64,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumPoint {
    pub p: f64,
    pub outside_proven_regime: bool,
    pub records: Vec<SpectrumRecord>,
}

impl SpectrumPoint {
    pub fn of(spectrum: &Spectrum) -> Self {
        let records = spectrum
            .data
            .iter()
            .map(|d| SpectrumRecord {
                nu: d.label.clone().unwrap_or_default(),
                eigenvalues: d.eigenvalues.iter().map(|e| [e.re, e.im]).collect(),
                norm_hat: d.norm_hat,
                residual: d.residual,
            })
            .collect();
        SpectrumPoint { p: spectrum.params.p(), outside_proven_regime: spectrum.outside_proven_regime(), records }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumFile {
    pub schema_version: u32,
    pub model: ModelRecord,
    pub points: Vec<SpectrumPoint>,
}

impl SpectrumFile {
    pub fn new(sweep: &[Spectrum]) -> Result<Self> {
        let first = sweep.first().ok_or_else(|| Error::InvalidArgument("empty sweep".into()))?;
        Ok(SpectrumFile {
            schema_version: SCHEMA_VERSION,
            model: ModelRecord::of(&first.params),
            points: sweep.iter().map(SpectrumPoint::of).collect(),
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let f: SpectrumFile = parse(text)?;
        check_version(f.schema_version)?;
        f.model.check()?;
        let dim = f.model.dim()?;
        for pt in &f.points {
            if !pt.p.is_finite() {
                return Err(Error::Parse("p is not finite".into()));
            }
            if pt.records.len() != dim {
                return Err(Error::Parse(format!("{} records at p = {}, expected {dim}", pt.records.len(), pt.p)));
            }
            for rec in &pt.records {
                if !rec.nu.fits_in_box(f.model.n, f.model.m) {
                    return Err(Error::Parse(format!("label {} outside the box", rec.nu)));
                }
                if rec.eigenvalues.len() != f.model.n {
                    return Err(Error::Parse(format!("label {} has {} eigenvalues", rec.nu, rec.eigenvalues.len())));
                }
                check_finite(rec.eigenvalues.iter().flatten().copied(), "eigenvalues")?;
                check_finite([rec.norm_hat, rec.residual], "record")?;
            }
        }
        Ok(f)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolyTriple {
    pub mu: Partition,
    pub nu: Partition,
    pub u: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolysFile {
    pub schema_version: u32,
    pub model: ModelRecord,
    pub triples: Vec<PolyTriple>,
}

impl PolysFile {
    /// Triples ordered by `μ` in basis order, then by `ν` in basis order.
    pub fn new(table: &PolynomialTable) -> Self {
        let mut triples = Vec::new();
        for p in &table.polys {
            let mut rows: Vec<(usize, PolyTriple)> = p
                .coeffs
                .iter()
                .map(|(k, &u)| {
                    let nu = key_partition(k);
                    let idx = table.basis.index_of(&nu).unwrap_or(usize::MAX);
                    (idx, PolyTriple { mu: p.mu.clone(), nu, u })
                })
                .collect();
            rows.sort_by_key(|(i, _)| *i);
            triples.extend(rows.into_iter().map(|(_, t)| t));
        }
        PolysFile { schema_version: SCHEMA_VERSION, model: ModelRecord::of(&table.params), triples }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let f: PolysFile = parse(text)?;
        check_version(f.schema_version)?;
        f.model.check()?;
        for t in &f.triples {
            for part in [&t.mu, &t.nu] {
                if !part.fits_in_box(f.model.n, f.model.m) {
                    return Err(Error::Parse(format!("{part} outside the box")));
                }
            }
        }
        check_finite(f.triples.iter().map(|t| t.u), "coefficients")?;
        Ok(f)
    }
}

/// Closed-form `p = 0` eigenvalues, one record per label.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrigRecord {
    pub nu: Partition,
    pub eigenvalues: Vec<[f64; 2]>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrigFile {
    pub schema_version: u32,
    pub model: ModelRecord,
    pub records: Vec<TrigRecord>,
}

impl TrigFile {
    pub fn new(params: &ModelParams, basis: &LatticeBasis) -> Result<Self> {
        let records = basis
            .partitions()
            .iter()
            .map(|nu| {
                let e = crate::macdonald::trig_joint_eigenvalues(nu, params)?;
                Ok(TrigRecord { nu: nu.clone(), eigenvalues: e.iter().map(|x| [x.re, x.im]).collect() })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(TrigFile { schema_version: SCHEMA_VERSION, model: ModelRecord::of(params), records })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let f: TrigFile = parse(text)?;
        check_version(f.schema_version)?;
        f.model.check()?;
        for rec in &f.records {
            if rec.eigenvalues.len() != f.model.n {
                return Err(Error::Parse(format!("label {} has {} eigenvalues", rec.nu, rec.eigenvalues.len())));
            }
            check_finite(rec.eigenvalues.iter().flatten().copied(), "eigenvalues")?;
        }
        Ok(f)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Relation {
    /// Passes when the value is below the tolerance.
    Below,
    /// Passes when the value is above the tolerance.
    Above,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckRecord {
    pub name: String,
    pub value: Option<f64>,
    pub relation: Relation,
    pub tolerance: f64,
    pub passed: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportFile {
    pub schema_version: u32,
    pub model: ModelRecord,
    pub outside_proven_regime: bool,
    pub seed: u64,
    pub checks: Vec<CheckRecord>,
    pub passed: bool,
    pub versions: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timings_ms: Option<BTreeMap<String, f64>>,
}

impl ReportFile {
    pub fn from_json(text: &str) -> Result<Self> {
        let f: ReportFile = parse(text)?;
        check_version(f.schema_version)?;
        f.model.check()?;
        for c in &f.checks {
            if let Some(v) = c.value {
                check_finite([v], &c.name)?;
            }
            if c.passed && c.error.is_some() {
                return Err(Error::Parse(format!("check {} passed with an error", c.name)));
            }
        }
        if f.passed != f.checks.iter().all(|c| c.passed) {
            return Err(Error::Parse("overall verdict disagrees with the checks".into()));
        }
        Ok(f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{build_d, build_s};
    use crate::spectral::label_spectrum;

    #[test]
    fn operator_roundtrip_is_bit_exact() {
        let params = ModelParams::new(2, 2, 0.7, 0.5).unwrap();
        let op = build_d(1, &params).unwrap();
        let f = OperatorFile::new(&params, &op);
        let back = OperatorFile::from_json(&to_json(&f)).unwrap();
        assert_eq!(back, f);
        let a = op.matrix.as_real().unwrap();
        let b = back.real_matrix();
        assert!(a.iter().zip(b.iter()).all(|(x, y)| x.to_bits() == y.to_bits()));

        let s = build_s(1, &params).unwrap();
        let f = OperatorFile::new(&params, &s);
        assert!(f.entries_im.is_some());
        assert_eq!(OperatorFile::from_json(&to_json(&f)).unwrap(), f);
    }

    #[test]
    fn spectrum_roundtrip() {
        let params = ModelParams::new(2, 1, 1.0, 0.2).unwrap();
        let s = label_spectrum(&params).unwrap();
        let f = SpectrumFile::new(&[s]).unwrap();
        assert_eq!(SpectrumFile::from_json(&to_json(&f)).unwrap(), f);
    }

    #[test]
    fn rejects_inconsistent_files() {
        let params = ModelParams::new(1, 1, 1.0, 0.0).unwrap();
        let f = OperatorFile::new(&params, &build_d(1, &params).unwrap());
        let good = to_json(&f);
        assert!(OperatorFile::from_json(&good.replace("\"schema_version\": 1", "\"schema_version\": 2")).is_err());
        assert!(OperatorFile::from_json(&good.replace("\"size\": 2", "\"size\": 3")).is_err());
        assert!(OperatorFile::from_json(&good.replace("\"kind\": \"D\"", "\"kind\": \"X\"")).is_err());
        assert!(OperatorFile::from_json(&good.replacen('{', "{\"extra\": 0,", 1)).is_err());
        assert!(OperatorFile::from_json("").is_err());
        assert!(BasisFile::from_json("{}").is_err());
        assert!(PolysFile::from_json("[]").is_err());
        assert!(ReportFile::from_json("null").is_err());
    }
}

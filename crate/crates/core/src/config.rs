//! Run configuration: model point or nome sweep, seed, tolerances and output.
//!
//! A configuration is assembled from layers. Parsed TOML files and command
//! line flags both produce a [`PartialConfig`]; later layers override earlier
//! ones, and [`PartialConfig::resolve`] validates the result.

use std::collections::BTreeMap;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::coeffs::ModelParams;
use crate::elliptic::NOME_CAP;
use crate::spectral::DEFAULT_SEED;
use crate::{Error, Result};

/// Longest accepted nome sweep.
pub const MAX_SWEEP_POINTS: usize = 100_000;

/// Residual bounds, one per verification check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub commutator: f64,
    pub adjoint: f64,
    pub truncation: f64,
    pub recurrence: f64,
    pub psi: f64,
    pub orthogonality: f64,
    pub unitarity: f64,
    pub pairing: f64,
    pub separation: f64,
    pub pieri: f64,
    pub dual_orthogonality: f64,
    pub reconstruction: f64,
    pub trig: f64,
    pub appendix: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            commutator: 1e-11,
            adjoint: 1e-11,
            truncation: 1e-12,
            recurrence: 1e-11,
            psi: 1e-11,
            orthogonality: 1e-9,
            unitarity: 1e-8,
            pairing: 1e-9,
            separation: 1e-6,
            pieri: 1e-8,
            dual_orthogonality: 1e-8,
            reconstruction: 1e-7,
            trig: 1e-8,
            appendix: 1e-12,
        }
    }
}

impl Tolerances {
    pub const NAMES: [&'static str; 14] = [
        "commutator",
        "adjoint",
        "truncation",
        "recurrence",
        "psi",
        "orthogonality",
        "unitarity",
        "pairing",
        "separation",
        "pieri",
        "dual_orthogonality",
        "reconstruction",
        "trig",
        "appendix",
    ];

    fn slot(&mut self, name: &str) -> Option<&mut f64> {
        Some(match name {
            "commutator" => &mut self.commutator,
            "adjoint" => &mut self.adjoint,
            "truncation" => &mut self.truncation,
            "recurrence" => &mut self.recurrence,
            "psi" => &mut self.psi,
            "orthogonality" => &mut self.orthogonality,
            "unitarity" => &mut self.unitarity,
            "pairing" => &mut self.pairing,
            "separation" => &mut self.separation,
            "pieri" => &mut self.pieri,
            "dual_orthogonality" => &mut self.dual_orthogonality,
            "reconstruction" => &mut self.reconstruction,
            "trig" => &mut self.trig,
            "appendix" => &mut self.appendix,
            _ => return None,
        })
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.clone().slot(name).map(|x| *x)
    }

    pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
        let slot = self
            .slot(name)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown tolerance {name:?}")))?;
        *slot = value;
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        for name in Self::NAMES {
            let v = self.get(name).expect("listed names exist");
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter(format!("tolerance {name} must be > 0, got {v}")));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            _ => Err(Error::Parse(format!("unknown format {s:?}, expected json or csv"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl Sweep {
    /// `start, start + step, …` up to `stop` inclusive.
    pub fn points(&self) -> Vec<f64> {
        let count = ((self.stop - self.start) / self.step + 1e-9).floor() as usize + 1;
        (0..count).map(|k| self.start + k as f64 * self.step).collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Nome {
    Single(f64),
    Sweep(Sweep),
}

impl Nome {
    pub fn points(&self) -> Vec<f64> {
        match self {
            Nome::Single(p) => vec![*p],
            Nome::Sweep(s) => s.points(),
        }
    }
}

/// One configuration layer; unset fields defer to earlier layers.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartialConfig {
    pub n: Option<usize>,
    pub m: Option<usize>,
    pub g: Option<f64>,
    pub p: Option<f64>,
    pub sweep: Option<Sweep>,
    pub seed: Option<u64>,
    /// Explicit period that bypasses the truncation lock.
    pub alpha: Option<f64>,
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
    pub output: Option<PathBuf>,
    pub format: Option<Format>,
}

impl PartialConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    /// `self` overridden by every field set in `over`. A single nome in `over`
    /// replaces a sweep in `self` and vice versa.
    pub fn merge(mut self, over: PartialConfig) -> PartialConfig {
        macro_rules! take {
            ($($f:ident),*) => { $( if over.$f.is_some() { self.$f = over.$f; } )* };
        }
        take!(n, m, g, seed, alpha, output, format);
        if over.p.is_some() {
            self.p = over.p;
            self.sweep = None;
        }
        if over.sweep.is_some() {
            self.sweep = over.sweep;
            self.p = None;
        }
        self.tolerances.extend(over.tolerances);
        self
    }

    pub fn resolve(self) -> Result<RunConfig> {
        let n = self.n.ok_or_else(|| Error::InvalidParameter("n is required".into()))?;
        let m = self.m.ok_or_else(|| Error::InvalidParameter("m is required".into()))?;
        let g = self.g.unwrap_or(1.0);
        let nome = match (self.p, self.sweep) {
            (Some(_), Some(_)) => {
                return Err(Error::InvalidParameter("give either p or a sweep, not both".into()))
            }
            (_, Some(s)) => Nome::Sweep(s),
            (p, None) => Nome::Single(p.unwrap_or(0.0)),
        };
        let mut tolerances = Tolerances::default();
        for (k, v) in &self.tolerances {
            tolerances.set(k, *v)?;
        }
        let cfg = RunConfig {
            n,
            m,
            g,
            nome,
            seed: self.seed.unwrap_or(DEFAULT_SEED),
            alpha: self.alpha,
            tolerances,
            output: self.output,
            format: self.format.unwrap_or_default(),
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub n: usize,
    pub m: usize,
    pub g: f64,
    pub nome: Nome,
    pub seed: u64,
    pub alpha: Option<f64>,
    pub tolerances: Tolerances,
    pub output: Option<PathBuf>,
    pub format: Format,
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n < 1 || self.m < 1 {
            return Err(Error::InvalidParameter(format!(
                "n and m must be >= 1, got n = {}, m = {}",
                self.n, self.m
            )));
        }
        if !(self.g.is_finite() && self.g > 0.0) {
            return Err(Error::InvalidParameter(format!("g must be > 0, got {}", self.g)));
        }
        let in_range = |p: f64| p.is_finite() && p.abs() <= NOME_CAP;
        match &self.nome {
            Nome::Single(p) if !in_range(*p) => {
                return Err(Error::InvalidParameter(format!("p = {p} outside [-{NOME_CAP}, {NOME_CAP}]")))
            }
            Nome::Sweep(s) => {
                if !(s.step.is_finite() && s.step > 0.0) {
                    return Err(Error::InvalidParameter(format!("sweep step must be > 0, got {}", s.step)));
                }
                if !(in_range(s.start) && in_range(s.stop)) {
                    return Err(Error::InvalidParameter(format!(
                        "sweep [{}, {}] leaves [-{NOME_CAP}, {NOME_CAP}]",
                        s.start, s.stop
                    )));
                }
                if s.stop < s.start {
                    return Err(Error::InvalidParameter("sweep stop must not precede start".into()));
                }
                if (s.stop - s.start) / s.step > MAX_SWEEP_POINTS as f64 {
                    return Err(Error::InvalidParameter(format!("sweep has more than {MAX_SWEEP_POINTS} points")));
                }
            }
            _ => {}
        }
        if let Some(a) = self.alpha {
            if !(a.is_finite() && a > 0.0) {
                return Err(Error::InvalidParameter(format!("alpha must be > 0, got {a}")));
            }
        }
        self.tolerances.validate()
    }

    /// Model parameters at nome `p`.
    pub fn params_at(&self, p: f64) -> Result<ModelParams> {
        match self.alpha {
            None => ModelParams::new(self.n, self.m, self.g, p),
            Some(a) => ModelParams::detuned(self.n, self.m, self.g, p, a),
        }
    }

    /// First nome of the run.
    pub fn params(&self) -> Result<ModelParams> {
        self.params_at(self.nome.points()[0])
    }
}

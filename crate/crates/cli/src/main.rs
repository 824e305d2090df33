//! `rlatt`: build, diagonalize and verify the truncated difference operators.
//!
//! Exit status is 0 on success, 1 when a verification check or a
//! computation fails, and 2 on a usage error.

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rlatt_core::config::{Format, PartialConfig, RunConfig, Sweep};
use rlatt_core::eigenpoly::build_polynomials;
use rlatt_core::operators::{build, symmetrize, OperatorFamily, OperatorKind};
use rlatt_core::report::verify;
use rlatt_core::schema::{to_json, BasisFile, OperatorFile, PolysFile, ReportFile, SpectrumFile, TrigFile};
use rlatt_core::spectral::{label_spectrum_seeded, label_sweep};
use rlatt_core::Error;

const SEED_ENV: &str = "RLATT_SEED";

#[derive(Parser)]
#[command(name = "rlatt", version, about = "Truncated elliptic Ruijsenaars operators on bounded partitions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the ordered basis with its weights.
    Enumerate(Common),
    /// Write one operator matrix.
    Operator(OperatorArgs),
    /// Diagonalize and label the joint spectrum.
    Spectrum(Common),
    /// Run every structural and spectral check.
    Verify(VerifyArgs),
    /// Write the coefficients of the spectral polynomials.
    Polys(Common),
    /// Write the closed-form spectrum at p = 0.
    Trig(Common),
}

#[derive(Args)]
struct OperatorArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    r: usize,
    #[arg(long, value_enum, default_value = "d")]
    kind: Kind,
    /// Conjugate by the square root of the weights.
    #[arg(long)]
    symmetrized: bool,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    common: Common,
    /// Include per-check wall-clock times (makes output non-reproducible).
    #[arg(long)]
    timings: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    #[value(name = "d", alias = "D")]
    D,
    #[value(name = "c", alias = "C")]
    C,
    #[value(name = "s", alias = "S")]
    S,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

#[derive(Args)]
struct Common {
    /// TOML configuration file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    g: Option<f64>,
    #[arg(long, allow_negative_numbers = true, conflicts_with_all = ["p_start", "p_stop", "p_step"])]
    p: Option<f64>,
    #[arg(long, allow_negative_numbers = true, requires_all = ["p_stop", "p_step"])]
    p_start: Option<f64>,
    #[arg(long, allow_negative_numbers = true, requires_all = ["p_start", "p_step"])]
    p_stop: Option<f64>,
    #[arg(long, requires_all = ["p_start", "p_stop"])]
    p_step: Option<f64>,
    /// Seed for the random Hermitian combination; RLATT_SEED overrides it.
    #[arg(long)]
    seed: Option<u64>,
    /// Explicit period, bypassing the truncation lock.
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    #[arg(long)]
    tol_commutator: Option<f64>,
    #[arg(long)]
    tol_adjoint: Option<f64>,
    #[arg(long)]
    tol_truncation: Option<f64>,
    #[arg(long)]
    tol_recurrence: Option<f64>,
    #[arg(long)]
    tol_psi: Option<f64>,
    #[arg(long)]
    tol_orthogonality: Option<f64>,
    #[arg(long)]
    tol_unitarity: Option<f64>,
    #[arg(long)]
    tol_pairing: Option<f64>,
    #[arg(long)]
    tol_separation: Option<f64>,
    #[arg(long)]
    tol_pieri: Option<f64>,
    #[arg(long)]
    tol_dual_orthogonality: Option<f64>,
    #[arg(long)]
    tol_reconstruction: Option<f64>,
    #[arg(long)]
    tol_trig: Option<f64>,
    #[arg(long)]
    tol_appendix: Option<f64>,
}

enum Failure {
    Usage(String),
    Run(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter(_) | Error::InvalidArgument(_) | Error::Parse(_) => Failure::Usage(e.to_string()),
            _ => Failure::Run(e.to_string()),
        }
    }
}

impl Common {
    fn flags(&self) -> PartialConfig {
        let tolerances: BTreeMap<String, f64> = [
            ("commutator", self.tol_commutator),
            ("adjoint", self.tol_adjoint),
            ("truncation", self.tol_truncation),
            ("recurrence", self.tol_recurrence),
            ("psi", self.tol_psi),
            ("orthogonality", self.tol_orthogonality),
            ("unitarity", self.tol_unitarity),
            ("pairing", self.tol_pairing),
            ("separation", self.tol_separation),
            ("pieri", self.tol_pieri),
            ("dual_orthogonality", self.tol_dual_orthogonality),
            ("reconstruction", self.tol_reconstruction),
            ("trig", self.tol_trig),
            ("appendix", self.tol_appendix),
        ]
        .into_iter()
        .filter_map(|(k, v)| v.map(|v| (k.to_string(), v)))
        .collect();
        let sweep = match (self.p_start, self.p_stop, self.p_step) {
            (Some(start), Some(stop), Some(step)) => Some(Sweep { start, stop, step }),
            _ => None,
        };
        PartialConfig {
            n: self.n,
            m: self.m,
            g: self.g,
            p: self.p,
            sweep,
            seed: self.seed,
            alpha: self.alpha,
            tolerances,
            output: self.out.clone(),
            format: self.format.map(|f| match f {
                FormatArg::Json => Format::Json,
                FormatArg::Csv => Format::Csv,
            }),
        }
    }

    fn resolve(&self) -> Result<RunConfig, Failure> {
        let base = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path)
                    .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
                PartialConfig::from_toml_str(&text)?
            }
            None => PartialConfig::default(),
        };
        let mut merged = base.merge(self.flags());
        if let Ok(v) = std::env::var(SEED_ENV) {
            let seed = v.trim().parse().map_err(|_| Failure::Usage(format!("{SEED_ENV}={v:?} is not a u64")))?;
            merged.seed = Some(seed);
        }
        Ok(merged.resolve()?)
    }
}

fn emit(cfg: &RunConfig, body: &str) -> Result<(), Failure> {
    match &cfg.output {
        Some(path) => fs::write(path, body).map_err(|e| Failure::Run(format!("cannot write {}: {e}", path.display()))),
        None => io::stdout().write_all(body.as_bytes()).map_err(|e| Failure::Run(e.to_string())),
    }
}

fn csv_body(header: &[&str], rows: Vec<Vec<String>>) -> Result<String, Failure> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let run = |e: csv::Error| Failure::Run(e.to_string());
    w.write_record(header).map_err(run)?;
    for row in rows {
        w.write_record(&row).map_err(run)?;
    }
    let bytes = w.into_inner().map_err(|e| Failure::Run(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Failure::Run(e.to_string()))
}

fn single_nome(cfg: &RunConfig, what: &str) -> Result<(), Failure> {
    if cfg.nome.points().len() != 1 {
        return Err(Failure::Usage(format!("{what} takes a single --p, not a sweep")));
    }
    Ok(())
}

fn cmd_enumerate(c: &Common) -> Result<(), Failure> {
    let cfg = c.resolve()?;
    single_nome(&cfg, "enumerate")?;
    let params = cfg.params()?;
    let family = OperatorFamily::new(&params)?;
    let file = BasisFile::new(&params, &family.basis, &family.weights);
    let body = match cfg.format {
        Format::Json => to_json(&file),
        Format::Csv => csv_body(
            &["index", "partition", "delta"],
            file.rows.iter().map(|r| vec![r.index.to_string(), r.partition.to_string(), r.delta.to_string()]).collect(),
        )?,
    };
    emit(&cfg, &body)
}

fn cmd_operator(a: &OperatorArgs) -> Result<(), Failure> {
    let cfg = a.common.resolve()?;
    single_nome(&cfg, "operator")?;
    let params = cfg.params()?;
    let kind = match a.kind {
        Kind::D => OperatorKind::Difference,
        Kind::C => OperatorKind::Cosine,
        Kind::S => OperatorKind::Sine,
    };
    let mut op = build(kind, a.r, &params)?;
    if a.symmetrized {
        op = symmetrize(&op, &params)?;
    }
    let file = OperatorFile::new(&params, &op);
    let body = match cfg.format {
        Format::Json => to_json(&file),
        Format::Csv => {
            let mut rows = Vec::new();
            for (i, row) in file.entries.iter().enumerate() {
                for (j, re) in row.iter().enumerate() {
                    let im = file.entries_im.as_ref().map_or(0.0, |m| m[i][j]);
                    rows.push(vec![i.to_string(), j.to_string(), re.to_string(), im.to_string()]);
                }
            }
            csv_body(&["row", "col", "re", "im"], rows)?
        }
    };
    emit(&cfg, &body)
}

fn cmd_spectrum(c: &Common) -> Result<(), Failure> {
    let cfg = c.resolve()?;
    let params = cfg.params()?;
    let points = cfg.nome.points();
    let sweep = if points.len() == 1 {
        vec![label_spectrum_seeded(&params, cfg.seed)?]
    } else {
        label_sweep(&params, &points, cfg.seed)?
    };
    let file = SpectrumFile::new(&sweep)?;
    for pt in &file.points {
        if pt.outside_proven_regime {
            eprintln!("warning: p = {} lies outside the range where positivity of the weights is proven", pt.p);
        }
    }
    let body = match cfg.format {
        Format::Json => to_json(&file),
        Format::Csv => {
            let mut rows = Vec::new();
            for pt in &file.points {
                for rec in &pt.records {
                    for (r, [re, im]) in rec.eigenvalues.iter().enumerate() {
                        rows.push(vec![
                            pt.p.to_string(),
                            rec.nu.to_string(),
                            (r + 1).to_string(),
                            re.to_string(),
                            im.to_string(),
                            rec.norm_hat.to_string(),
                            rec.residual.to_string(),
                        ]);
                    }
                }
            }
            csv_body(&["p", "nu", "r", "re", "im", "norm_hat", "residual"], rows)?
        }
    };
    emit(&cfg, &body)
}

fn cmd_verify(a: &VerifyArgs) -> Result<bool, Failure> {
    let cfg = a.common.resolve()?;
    let mut reports: Vec<ReportFile> = Vec::new();
    for p in cfg.nome.points() {
        let params = cfg.params_at(p)?;
        reports.push(verify(&params, &cfg.tolerances, cfg.seed, a.timings));
    }
    for r in &reports {
        for c in r.checks.iter().filter(|c| !c.passed) {
            eprintln!(
                "FAIL p = {}: {} value {:?} tolerance {:e}{}",
                r.model.p,
                c.name,
                c.value,
                c.tolerance,
                c.error.as_ref().map(|e| format!(" ({e})")).unwrap_or_default()
            );
        }
    }
    let passed = reports.iter().all(|r| r.passed);
    let body = match cfg.format {
        Format::Json if reports.len() == 1 => to_json(&reports[0]),
        Format::Json => to_json(&reports),
        Format::Csv => {
            let mut rows = Vec::new();
            for r in &reports {
                for c in &r.checks {
                    rows.push(vec![
                        r.model.p.to_string(),
                        c.name.clone(),
                        c.value.map(|v| v.to_string()).unwrap_or_default(),
                        format!("{:?}", c.relation).to_lowercase(),
                        c.tolerance.to_string(),
                        c.passed.to_string(),
                        c.error.clone().unwrap_or_default(),
                    ]);
                }
            }
            csv_body(&["p", "check", "value", "relation", "tolerance", "passed", "error"], rows)?
        }
    };
    emit(&cfg, &body)?;
    Ok(passed)
}

fn cmd_polys(c: &Common) -> Result<(), Failure> {
    let cfg = c.resolve()?;
    single_nome(&cfg, "polys")?;
    let table = build_polynomials(&cfg.params()?)?;
    let file = PolysFile::new(&table);
    let body = match cfg.format {
        Format::Json => to_json(&file),
        Format::Csv => csv_body(
            &["mu", "nu", "u"],
            file.triples.iter().map(|t| vec![t.mu.to_string(), t.nu.to_string(), t.u.to_string()]).collect(),
        )?,
    };
    emit(&cfg, &body)
}

fn cmd_trig(c: &Common) -> Result<(), Failure> {
    let cfg = c.resolve()?;
    single_nome(&cfg, "trig")?;
    let params = cfg.params()?.with_nome(0.0)?;
    let basis = rlatt_core::partitions::enumerate_lattice(params.n(), params.m())?;
    let file = TrigFile::new(&params, &basis)?;
    let body = match cfg.format {
        Format::Json => to_json(&file),
        Format::Csv => {
            let mut rows = Vec::new();
            for rec in &file.records {
                for (r, [re, im]) in rec.eigenvalues.iter().enumerate() {
                    rows.push(vec![rec.nu.to_string(), (r + 1).to_string(), re.to_string(), im.to_string()]);
                }
            }
            csv_body(&["nu", "r", "re", "im"], rows)?
        }
    };
    emit(&cfg, &body)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Enumerate(c) => cmd_enumerate(c).map(|_| true),
        Command::Operator(a) => cmd_operator(a).map(|_| true),
        Command::Spectrum(c) => cmd_spectrum(c).map(|_| true),
        Command::Verify(a) => cmd_verify(a),
        Command::Polys(c) => cmd_polys(c).map(|_| true),
        Command::Trig(c) => cmd_trig(c).map(|_| true),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Run(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

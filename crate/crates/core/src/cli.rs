//! Command-line front end. Exit codes: 0 success, 1 domain error (bad
//! prior, enumeration cap, failed conditions), 2 I/O or parse error.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::bench::{run_experiment, write_outputs, BenchError, ExperimentConfig};
use crate::certificates::{
    build_certificate, classify_active, default_active_tol, good_set_search, sign_vector, CertError, CertificateOptions,
};
use crate::linalg::io::{load_matrix, write_vector};
use crate::lp::write_lp_text;
use crate::models::{is_exact, load_instance, recover, reduce, relative_error, LoadError, Method, ModelError};
use crate::rip::{required_order, RipError, RipTable};

#[derive(Debug, Parser)]
#[command(
    name = "regmodbp",
    version,
    about = "Sparse recovery with partial support and signal-value priors"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Recover one signal and write x̂ as a one-column CSV.
    Solve {
        #[arg(long)]
        instance: PathBuf,
        /// bp, modcs, weighted_l1[:gamma] or regmodbp
        #[arg(long, default_value = "regmodbp")]
        method: Method,
        /// Override the instance's ρ.
        #[arg(long)]
        rho: Option<f64>,
        /// Output CSV; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the reduced linear program as text.
        #[arg(long)]
        dump_lp: Option<PathBuf>,
    },
    /// Exact RIC and ROC table up to order `smax`, as CSV `kind,s1,s2,value`.
    Rip {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        smax: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check the exact-recovery conditions for an instance with known
    /// `x_true` and build its dual certificate.
    Certify {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        rho: Option<f64>,
        /// JSON report; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Build the certificate even when the conditions fail.
        #[arg(long)]
        force: bool,
    },
    /// Run a Monte Carlo experiment and write trials.csv, summary.csv and
    /// n_exact.csv.
    Experiment {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads; all cores when absent. Output does not depend on it.
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long, default_value = "results")]
        out: PathBuf,
        /// Comma-separated γ values for weighted_l1.
        #[arg(long, value_delimiter = ',')]
        gamma: Option<Vec<f64>>,
        #[arg(long)]
        rho: Option<f64>,
    },
}

#[derive(Debug)]
pub enum CliError {
    Domain(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Domain(_) => 1,
            CliError::Io(_) => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Domain(s) | CliError::Io(s) => f.write_str(s),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<crate::linalg::io::CsvError> for CliError {
    fn from(e: crate::linalg::io::CsvError) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<LoadError> for CliError {
    fn from(e: LoadError) -> Self {
        match e {
            LoadError::Model(m) => CliError::Domain(m.to_string()),
            other => CliError::Io(other.to_string()),
        }
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        CliError::Domain(e.to_string())
    }
}

impl From<RipError> for CliError {
    fn from(e: RipError) -> Self {
        CliError::Domain(e.to_string())
    }
}

impl From<CertError> for CliError {
    fn from(e: CertError) -> Self {
        CliError::Domain(e.to_string())
    }
}

impl From<BenchError> for CliError {
    fn from(e: BenchError) -> Self {
        match e {
            BenchError::Io(_) | BenchError::Csv(_) | BenchError::Config(_) => CliError::Io(e.to_string()),
            BenchError::PriorViolation(_) | BenchError::Pool(_) => CliError::Domain(e.to_string()),
        }
    }
}

fn sink(out: &Option<PathBuf>) -> Result<Box<dyn Write>, CliError> {
    Ok(match out {
        Some(p) => Box::new(File::create(p).map_err(|e| CliError::Io(format!("cannot create {}: {e}", p.display())))?),
        None => Box::new(io::stdout().lock()),
    })
}

fn load_problem(
    path: &Path,
    rho: Option<f64>,
) -> Result<(crate::models::RecoveryInstance, crate::models::PriorKnowledge), CliError> {
    let (inst, prior) = load_instance(path)?;
    let prior = match rho {
        Some(r) => {
            let p = prior.with_rho(r)?;
            p.validate(&inst)?;
            p
        }
        None => prior,
    };
    Ok((inst, prior))
}

fn solve(
    instance: &Path,
    method: Method,
    rho: Option<f64>,
    out: &Option<PathBuf>,
    dump_lp: &Option<PathBuf>,
) -> Result<(), CliError> {
    let (inst, prior) = load_problem(instance, rho)?;
    if let Some(p) = dump_lp {
        let reduced = reduce(&inst, &prior, method)?;
        let mut f = File::create(p).map_err(|e| CliError::Io(format!("cannot create {}: {e}", p.display())))?;
        write_lp_text(&mut f, &reduced.lp)?;
    }
    let x_hat = recover(&inst, &prior, method)?;
    write_vector(sink(out)?, &x_hat)?;
    if let Some(x) = inst.x_true() {
        eprintln!(
            "{method}: relative error {:.3e}, exact {}",
            relative_error(&x_hat, x)?,
            is_exact(&x_hat, x)?
        );
    }
    Ok(())
}

fn rip(matrix: &Path, smax: usize, out: &Option<PathBuf>) -> Result<(), CliError> {
    let a = load_matrix(matrix)?;
    let table = RipTable::build(&a, smax)?;
    let mut w = csv::Writer::from_writer(sink(out)?);
    let csv_err = |e: csv::Error| CliError::Io(e.to_string());
    w.write_record(["kind", "s1", "s2", "value"]).map_err(csv_err)?;
    for (kind, s1, s2, v) in table.rows() {
        w.write_record([
            kind.to_string(),
            s1.to_string(),
            s2.map(|s| s.to_string()).unwrap_or_default(),
            format!("{v:.12e}"),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

fn certify(instance: &Path, rho: Option<f64>, out: &Option<PathBuf>, force: bool) -> Result<(), CliError> {
    let (inst, prior) = load_problem(instance, rho)?;
    let x = inst
        .x_true()
        .ok_or_else(|| CliError::Io("certify needs x_true in the instance".into()))?
        .to_vec();
    let a = inst.a();
    let delta = prior.delta(&inst);
    let partition = classify_active(&x, &prior, default_active_tol(prior.rho()))?;
    let sgn = sign_vector(&x, &delta);
    let good = good_set_search(a, &partition, &delta, &sgn)?;
    let (k, u) = (prior.k(), delta.len());
    let table = RipTable::build(a, required_order(k, u))?;
    let opts = CertificateOptions {
        force,
        ..Default::default()
    };
    let report = build_certificate(a, &partition, &good, &delta, &sgn, &table, &opts);
    let report = match report {
        Err(CertError::ConditionsFail(c)) => {
            eprintln!("k = {}, u = {}, k_b = {}", c.k, c.u, c.k_b);
            for ch in &c.checks {
                eprintln!(
                    "  {:<28} {:>12} < {}  {}",
                    ch.name,
                    fmt_opt(ch.value),
                    ch.threshold,
                    verdict(ch.pass)
                );
            }
            return Err(CliError::Domain("recovery conditions fail".into()));
        }
        other => other?,
    };
    eprintln!(
        "k = {}, u = {}, k_b = {}, |T_a| = {}, |T_g| = {}",
        report.k,
        report.u,
        report.k_b,
        report.partition.active().len(),
        report.t_a_plus_g.len() + report.t_a_minus_g.len()
    );
    for ch in &report.conditions.checks {
        eprintln!(
            "  {:<28} {:>12} < {}  {}",
            ch.name,
            fmt_opt(ch.value),
            ch.threshold,
            verdict(ch.pass)
        );
    }
    eprintln!("series terms: {}", report.series_terms);
    for ch in &report.lemma1.checks {
        eprintln!("  {:<28} {:>12}  {}", ch.name, fmt_opt(ch.value), verdict(ch.pass));
    }
    eprintln!("certificate: {}", report.lemma1.verdict);
    for d in &report.diagnostics {
        eprintln!("warning: {d}");
    }
    let mut w = sink(out)?;
    serde_json::to_writer_pretty(&mut w, &report).map_err(|e| CliError::Io(e.to_string()))?;
    writeln!(w)?;
    Ok(())
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.6}")).unwrap_or_else(|| "-".into())
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "ok"
    } else {
        "FAIL"
    }
}

fn experiment(
    config: &Path,
    seed: Option<u64>,
    workers: Option<usize>,
    out: &Path,
    gamma: Option<Vec<f64>>,
    rho: Option<f64>,
) -> Result<(), CliError> {
    let text =
        std::fs::read_to_string(config).map_err(|e| CliError::Io(format!("cannot read {}: {e}", config.display())))?;
    let mut cfg: ExperimentConfig =
        serde_json::from_str(&text).map_err(|e| CliError::Io(format!("invalid config {}: {e}", config.display())))?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    if let Some(g) = gamma {
        cfg.gamma_sweep = g;
    }
    if let Some(r) = rho {
        cfg.scenario = cfg.scenario.with_rho(r);
    }
    let result = run_experiment(&cfg, workers)?;
    write_outputs(out, &result)?;
    let mut so = io::stdout().lock();
    writeln!(
        so,
        "{:<16} {:>5} {:>8} {:>11} {:>8} {:>8} {:>8}",
        "method", "n", "p_exact", "nrmse", "|T_a|", "|T_g|", "|T_b|"
    )?;
    for r in &result.summary {
        let opt = |v: Option<f64>| v.map(|x| format!("{x:.2}")).unwrap_or_else(|| "-".into());
        let name = match r.gamma {
            Some(g) => format!("{}:{g}", r.method),
            None => r.method.to_string(),
        };
        writeln!(
            so,
            "{:<16} {:>5} {:>8.2} {:>11.4} {:>8.2} {:>8} {:>8}",
            name,
            r.n,
            r.p_exact,
            r.nrmse_mean,
            r.mean_ta,
            opt(r.mean_tg),
            opt(r.mean_tb)
        )?;
    }
    for r in &result.n_exact {
        match r.n_exact {
            Some(n) => writeln!(
                so,
                "n_exact {:<12} {n} ({:.2}m)",
                r.method,
                r.fraction.unwrap_or(f64::NAN)
            )?,
            None => writeln!(so, "n_exact {:<12} above grid", r.method)?,
        }
        for note in &r.notes {
            eprintln!("note: {}: {note}", r.method);
        }
    }
    if result.failures > 0 {
        eprintln!("warning: {} solves failed; see trials.csv", result.failures);
    }
    Ok(())
}

pub fn execute(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Solve {
            instance,
            method,
            rho,
            out,
            dump_lp,
        } => solve(&instance, method, rho, &out, &dump_lp),
        Command::Rip { matrix, smax, out } => rip(&matrix, smax, &out),
        Command::Certify {
            instance,
            rho,
            out,
            force,
        } => certify(&instance, rho, &out, force),
        Command::Experiment {
            config,
            seed,
            workers,
            out,
            gamma,
            rho,
        } => experiment(&config, seed, workers, &out, gamma, rho),
    }
}

/// Parses `args`, runs the subcommand and returns the process exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

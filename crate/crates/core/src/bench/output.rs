use std::fs::File;
use std::io::Write;
use std::path::Path;

use super::{BenchError, ExperimentResult, NExactResult, SummaryRow, TrialRecord};

fn opt_usize(v: Option<usize>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn opt_f64(v: Option<f64>) -> String {
    v.map(|x| format!("{x}")).unwrap_or_default()
}

/// `method,n,trial,exact,rel_err,Ta,Tg,Tb,gamma`; failed solves have
/// `exact = error`.
pub fn write_trials_csv<W: Write>(w: W, records: &[TrialRecord]) -> Result<(), BenchError> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["method", "n", "trial", "exact", "rel_err", "Ta", "Tg", "Tb", "gamma"])?;
    for r in records {
        let exact = match r.exact {
            Some(true) => "1",
            Some(false) => "0",
            None => "error",
        };
        out.write_record([
            r.method.to_string(),
            r.n.to_string(),
            r.trial.to_string(),
            exact.to_string(),
            format!("{:.6e}", r.rel_err),
            r.sizes.ta.to_string(),
            opt_usize(r.sizes.tg),
            opt_usize(r.sizes.tb),
            opt_f64(r.gamma),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// `method,n,p_exact,nrmse_mean,nrmse_agg,mean_Ta,mean_Tg,mean_Tb`
pub fn write_summary_csv<W: Write>(w: W, rows: &[SummaryRow]) -> Result<(), BenchError> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record([
        "method",
        "n",
        "p_exact",
        "nrmse_mean",
        "nrmse_agg",
        "mean_Ta",
        "mean_Tg",
        "mean_Tb",
    ])?;
    let f4 = |v: f64| format!("{v:.4}");
    for r in rows {
        out.write_record([
            r.method.to_string(),
            r.n.to_string(),
            f4(r.p_exact),
            format!("{:.6e}", r.nrmse_mean),
            format!("{:.6e}", r.nrmse_agg),
            f4(r.mean_ta),
            r.mean_tg.map(f4).unwrap_or_default(),
            r.mean_tb.map(f4).unwrap_or_default(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// `method,n_exact,n_exact_frac`; a method never exact on the grid gets
/// `above_grid`.
pub fn write_n_exact_csv<W: Write>(w: W, rows: &[NExactResult]) -> Result<(), BenchError> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["method", "n_exact", "n_exact_frac"])?;
    for r in rows {
        let (n, f) = match (r.n_exact, r.fraction) {
            (Some(n), Some(f)) => (n.to_string(), format!("{f:.2}")),
            _ => ("above_grid".to_string(), String::new()),
        };
        out.write_record([r.method.to_string(), n, f])?;
    }
    out.flush()?;
    Ok(())
}

/// Writes `trials.csv`, `summary.csv` and, when the search ran,
/// `n_exact.csv` into `dir`.
pub fn write_outputs(dir: &Path, result: &ExperimentResult) -> Result<(), BenchError> {
    std::fs::create_dir_all(dir)?;
    write_trials_csv(File::create(dir.join("trials.csv"))?, &result.records)?;
    write_summary_csv(File::create(dir.join("summary.csv"))?, &result.summary)?;
    if result.config.n_exact_search {
        write_n_exact_csv(File::create(dir.join("n_exact.csv"))?, &result.n_exact)?;
    }
    Ok(())
}

//! Subcommand bodies. Each one computes a report and hands it to [`emit`].

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde_json::{json, Value};
use symtop::classify::{count_report, endpoint_classification, level_normalizable, normalizable};
use symtop::hyper::scan_eta_hyper;
use symtop::io::{Field, Format, Table};
use symtop::qhj::{all_levels, anti_isospectral_pair, qs_table, Sector};
use symtop::spectrum::SpectrumScan;
use symtop::trig::{scan_eta, scan_eta_auto};
use symtop::verify::{reproduce_figure, run_all, SuiteOptions};
use symtop::TopKind;

use crate::args::{RunConfig, UsageError};

/// Why a command did not succeed, mapped onto exit codes 1, 2 and 3.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Compute(String),
    Verification(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Compute(_) => 2,
            Failure::Verification(_) => 3,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Compute(m) | Failure::Verification(m) => m,
        }
    }
}

impl From<UsageError> for Failure {
    fn from(e: UsageError) -> Self {
        Failure::Usage(e.0)
    }
}

impl From<symtop::Error> for Failure {
    fn from(e: symtop::Error) -> Self {
        Failure::Compute(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Compute(format!("I/O error: {e}"))
    }
}

/// A finished report: a flat table, or JSON records with a table fallback for CSV.
pub enum Report {
    Table(Table),
    Json { value: Value, table: Table },
}

/// Write a report to `path`, or to standard output.
pub fn emit(report: &Report, format: Format, path: Option<&Path>) -> Result<(), Failure> {
    let mut sink: Box<dyn Write> = match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(std::io::stdout().lock())),
    };
    match (report, format) {
        (Report::Table(t), f) | (Report::Json { table: t, .. }, f @ Format::Csv) => t.write(&mut sink, f)?,
        (Report::Json { value, .. }, Format::Json) => {
            serde_json::to_writer_pretty(&mut sink, value).map_err(|e| Failure::Compute(e.to_string()))?;
            writeln!(sink)?;
        }
    }
    sink.flush()?;
    Ok(())
}

pub fn spectrum(rc: &RunConfig) -> Result<(Report, Option<Failure>), Failure> {
    let etas = rc.eta.values();
    let scan = match rc.kind {
        TopKind::Trig => match rc.jmax {
            Some(j) => scan_eta(&rc.top, &etas, j, rc.count)?,
            None => scan_eta_auto(&rc.top, &etas, rc.count)?,
        },
        TopKind::Hyper => {
            let s = scan_eta_hyper(&rc.top, &etas, rc.n_basis, rc.count)?;
            if rc.negate_hyper {
                s.negated()
            } else {
                s
            }
        }
    };
    let failed: Vec<String> = scan
        .errors
        .iter()
        .zip(&scan.eta_grid)
        .filter_map(|(e, eta)| e.as_ref().map(|m| format!("eta = {eta}: {m}")))
        .collect();
    let problem = (!failed.is_empty()).then(|| Failure::Compute(failed.join("\n")));
    Ok((Report::Table(scan_table(&scan)), problem))
}

pub fn scan_table(scan: &SpectrumScan) -> Table {
    let mut t = Table::new(["eta", "kappa", "level_index", "energy", "converged"]);
    for (row, &eta) in scan.eta_grid.iter().enumerate() {
        for (i, &e) in scan.curves[row].iter().enumerate() {
            t.push(vec![eta.into(), scan.kappa(row).into(), i.into(), e.into(), scan.converged[row].into()]);
        }
    }
    t
}

pub fn qs_list(rc: &RunConfig) -> Report {
    let mut t = Table::new(["sector", "n", "eta", "kappa"]);
    for q in qs_table(&rc.top, rc.n_max) {
        t.push(vec![q.sector.to_string().into(), q.n.into(), q.eta.into(), q.kappa.into()]);
    }
    Report::Table(t)
}

pub fn algebraic(rc: &RunConfig) -> Result<Report, Failure> {
    let mut records = Vec::new();
    let mut table = Table::new([
        "sector",
        "n",
        "i",
        "eta",
        "kappa",
        "energy",
        "energy_im",
        "coeffs",
        "normalizable_trig",
        "normalizable_hyper",
    ]);
    for level in all_levels(&rc.top, rc.n_max)? {
        let hyper = anti_isospectral_pair(&level)?;
        let (norm_t, norm_h) = (level_normalizable(&level), level_normalizable(&hyper));
        let coeffs: Vec<[f64; 2]> = level.coeffs.iter().map(|c| [c.re, c.im]).collect();
        records.push(json!({
            "sector": level.sector.to_string(),
            "n": level.n,
            "i": level.i,
            "eta": level.config.eta,
            "kappa": level.kappa(),
            "energy": level.energy.re,
            "energy_im": level.energy.im,
            "coeffs": coeffs,
            "normalizable_trig": norm_t,
            "normalizable_hyper": norm_h,
        }));
        let joined = coeffs
            .iter()
            .map(|[re, im]| format!("{} {}", Field::from(*re), Field::from(*im)))
            .collect::<Vec<_>>()
            .join(";");
        table.push(vec![
            level.sector.to_string().into(),
            level.n.into(),
            level.i.into(),
            level.config.eta.into(),
            level.kappa().into(),
            level.energy.re.into(),
            level.energy.im.into(),
            joined.into(),
            norm_t.into(),
            norm_h.into(),
        ]);
    }
    Ok(Report::Json { value: Value::Array(records), table })
}

pub fn classify(rc: &RunConfig) -> Result<Report, Failure> {
    let (k, m) = (rc.top.kf(), rc.top.mf());
    let ec = endpoint_classification(k, m, rc.kind);
    let levels = symtop::classify::enumerate_levels(&rc.top, rc.n_max, rc.kind)?;
    let mut t = Table::new([
        "sector",
        "kind",
        "endpoint_zero",
        "endpoint_far",
        "normalizable",
        "normalizable_levels",
        "levels",
    ]);
    for sector in Sector::ALL {
        let mine: Vec<_> = levels.iter().filter(|l| l.sector == sector).collect();
        let good = mine.iter().filter(|l| level_normalizable(l)).count();
        t.push(vec![
            sector.to_string().into(),
            rc.kind.as_str().into(),
            ec.at_zero.to_string().into(),
            ec.at_far.to_string().into(),
            normalizable(sector, k, m, rc.kind).into(),
            good.into(),
            mine.len().into(),
        ]);
    }
    Ok(Report::Table(t))
}

pub fn count(rc: &RunConfig) -> Result<(Report, Option<Failure>), Failure> {
    let r = count_report(&rc.top, rc.n_max, rc.kind)?;
    let mut t = Table::new(["kind", "n_max", "formula", "enumerated", "plus_branch", "minus_branch"]);
    t.push(vec![
        r.kind.as_str().into(),
        r.n_max.into(),
        r.formula.into(),
        r.enumerated.into(),
        r.plus_branch.into(),
        r.minus_branch.into(),
    ]);
    let problem = (r.formula != r.enumerated)
        .then(|| Failure::Verification(format!("formula gives {} but {} levels were enumerated", r.formula, r.enumerated)));
    Ok((Report::Table(t), problem))
}

pub fn verify_all(rc: &RunConfig) -> Result<(Report, Option<Failure>), Failure> {
    let opts = SuiteOptions { n_max: rc.n_max, jmax: rc.jmax.unwrap_or(SuiteOptions::default().jmax), n_basis: rc.n_basis };
    let report = run_all(&rc.top, &opts)?;
    let passed = report.passed();
    let value = json!({
        "config": report.config,
        "passed": passed,
        "checks": report.checks,
    });
    let failed: Vec<&str> = report
        .checks
        .iter()
        .filter(|c| c.status == symtop::verify::Status::Fail)
        .map(|c| c.name.as_str())
        .collect();
    let problem = (!passed).then(|| Failure::Verification(format!("failed checks: {}", failed.join(", "))));
    Ok((Report::Json { value, table: report.to_table() }, problem))
}

pub fn figure(id: u32, out: &Path) -> Result<Vec<std::path::PathBuf>, Failure> {
    symtop::verify::figure_config(id).map_err(|e| Failure::Usage(e.to_string()))?;
    Ok(reproduce_figure(id, out)?)
}

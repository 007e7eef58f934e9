use std::path::{Path, PathBuf};

use super::{load_archive, parse_json, read_text, write_text, HarnessError, RunArchive};
use crate::metrics::{
    evaluate_global, evaluate_relative, EmpiricalCdf, PerformanceReport, ReferenceCdf,
    ReferenceKind, SolutionSet,
};

pub const REPORT_JSON: &str = "report.json";
pub const REPORT_CSV: &str = "report.csv";

/// Default tolerance for a value to count as lying on the reference.
pub const DEFAULT_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompareOptions {
    pub mode: ReferenceKind,
    /// Overrides the optimum stored in the archive (mode G).
    pub y_g: Option<f64>,
    pub eps: f64,
}

/// Per-solver sets of successful best values, in configuration order.
pub fn solution_sets(archive: &RunArchive) -> Result<Vec<SolutionSet>, HarnessError> {
    archive
        .meta
        .solvers
        .iter()
        .map(|label| {
            let values: Vec<f64> = archive
                .rows
                .iter()
                .filter(|r| &r.solver == label && r.is_ok())
                .map(|r| r.best_value_pu)
                .collect();
            if values.is_empty() {
                return Err(HarnessError::Inconsistent(format!("solver {label} has no successful runs")));
            }
            Ok(SolutionSet::new(label.clone(), values)?)
        })
        .collect()
}

/// Scores the archived solvers against the reference of `opts.mode`.
pub fn compare(
    archive: &RunArchive,
    opts: &CompareOptions,
) -> Result<(PerformanceReport, ReferenceCdf, Vec<EmpiricalCdf>), HarnessError> {
    let sets = solution_sets(archive)?;
    let result = match opts.mode {
        ReferenceKind::Global => {
            let y_g = opts
                .y_g
                .or(archive.meta.y_g)
                .ok_or_else(|| HarnessError::Config("mode G needs y_g".into()))?;
            evaluate_global(&sets, y_g, opts.eps)?
        }
        ReferenceKind::Relative => evaluate_relative(&sets, opts.eps)?,
    };
    Ok(result)
}

/// Loads the archive in `dir`, compares, and writes `report.json` and
/// `report.csv` into `out_dir`.
pub fn compare_archive(dir: &Path, opts: &CompareOptions, out_dir: &Path) -> Result<PerformanceReport, HarnessError> {
    let archive = load_archive(dir)?;
    let (report, _, _) = compare(&archive, opts)?;
    std::fs::create_dir_all(out_dir).map_err(|source| HarnessError::Io {
        path: out_dir.display().to_string(),
        source,
    })?;
    write_text(&out_dir.join(REPORT_JSON), &report.to_json())?;
    write_text(&out_dir.join(REPORT_CSV), &report.to_csv())?;
    Ok(report)
}

pub fn load_report(path: &Path) -> Result<PerformanceReport, HarnessError> {
    parse_json(path, &read_text(path)?)
}

fn cdf_csv(points: &[f64]) -> String {
    let h = points.len() as f64;
    let mut out = String::from("y,F\n");
    for (z, y) in points.iter().enumerate() {
        out.push_str(&format!("{},{}\n", y, (z + 1) as f64 / h));
    }
    out
}

/// Writes `cdf_<label>.csv` for every solver and `cdf_reference.csv` into
/// `out_dir`, rebuilding the reference the report was computed against.
pub fn emit_cdf_data(archive_dir: &Path, report_path: &Path, out_dir: &Path) -> Result<Vec<PathBuf>, HarnessError> {
    let archive = load_archive(archive_dir)?;
    let report = load_report(report_path)?;
    let opts = CompareOptions {
        mode: report.mode,
        y_g: report.reference.y_g,
        eps: DEFAULT_EPS,
    };
    let (_, reference, cdfs) = compare(&archive, &opts)?;
    if reference.digest() != report.reference.values_digest {
        return Err(HarnessError::Inconsistent("report does not match the archive".into()));
    }
    std::fs::create_dir_all(out_dir).map_err(|source| HarnessError::Io {
        path: out_dir.display().to_string(),
        source,
    })?;
    let mut written = Vec::new();
    for (label, cdf) in archive.meta.solvers.iter().zip(&cdfs) {
        let path = out_dir.join(format!("cdf_{label}.csv"));
        write_text(&path, &cdf_csv(cdf.values()))?;
        written.push(path);
    }
    let path = out_dir.join("cdf_reference.csv");
    write_text(&path, &cdf_csv(reference.values()))?;
    written.push(path);
    Ok(written)
}

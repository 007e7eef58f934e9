use serde::{Deserialize, Serialize};

use super::{
    build_cdf, reference_cdf_global, reference_cdf_relative, EmpiricalCdf, MetricsError,
    ReferenceCdf, ReferenceKind, SolutionSet,
};

/// Neumaier-compensated sum.
fn compensated_sum(values: impl Iterator<Item = f64>) -> f64 {
    let (mut sum, mut carry) = (0.0f64, 0.0f64);
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            carry += (sum - t) + v;
        } else {
            carry += (v - t) + sum;
        }
        sum = t;
    }
    sum + carry
}

/// Horizontal area between a test CDF and the reference:
/// `(1/H) Σ_z (y_s(z) − y_ref(z))`. For a global reference this is
/// `mean(y_s) − y_G`.
pub fn area_vs_reference(cdf: &EmpiricalCdf, reference: &ReferenceCdf) -> Result<f64, MetricsError> {
    if cdf.len() != reference.len() {
        return Err(MetricsError::UnequalLength {
            left: cdf.len(),
            right: reference.len(),
        });
    }
    let diffs = cdf.values().iter().zip(reference.values()).map(|(s, r)| s - r);
    let area = compensated_sum(diffs) / cdf.len() as f64;
    if area < 0.0 || area.is_nan() {
        return Err(MetricsError::NegativeArea(area));
    }
    Ok(area)
}

/// `1 / (1 + area)`, in `(0, 1]`.
pub fn opisd(area: f64) -> Result<f64, MetricsError> {
    if !(area >= 0.0) {
        return Err(MetricsError::NegativeArea(area));
    }
    Ok(1.0 / (1.0 + area))
}

/// Percentage of the solver's `H` values lying on the reference.
///
/// Global reference: values within `eps` of `y_G`. Relative reference:
/// size of the multiset match between the solver's values and the reference
/// points (each point consumed once), values matching within `eps`.
pub fn perc(cdf: &EmpiricalCdf, reference: &ReferenceCdf, eps: f64) -> Result<f64, MetricsError> {
    if cdf.len() != reference.len() {
        return Err(MetricsError::UnequalLength {
            left: cdf.len(),
            right: reference.len(),
        });
    }
    let hits = match reference.kind() {
        ReferenceKind::Global => {
            let y_g = reference.values()[0];
            cdf.values().iter().filter(|&&v| (v - y_g).abs() <= eps).count()
        }
        ReferenceKind::Relative => {
            let (s, r) = (cdf.values(), reference.values());
            let (mut i, mut j, mut hits) = (0, 0, 0);
            while i < s.len() && j < r.len() {
                if (s[i] - r[j]).abs() <= eps {
                    hits += 1;
                    i += 1;
                    j += 1;
                } else if s[i] < r[j] {
                    i += 1;
                } else {
                    j += 1;
                }
            }
            hits
        }
    };
    Ok(100.0 * hits as f64 / cdf.len() as f64)
}

/// Indicator inputs for one solver.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverScore {
    pub label: String,
    pub perc_pct: f64,
    pub area: f64,
    pub reference_digest: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverRecord {
    pub label: String,
    pub perc_pct: f64,
    pub area_pu: f64,
    pub opisd: f64,
    pub rank: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceSummary {
    pub kind: ReferenceKind,
    pub values_digest: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y_g: Option<f64>,
}

/// Indicators of every solver of one comparison, best first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerformanceReport {
    pub mode: ReferenceKind,
    #[serde(rename = "H")]
    pub h: usize,
    pub reference: ReferenceSummary,
    pub solvers: Vec<SolverRecord>,
}

impl PerformanceReport {
    /// Labels from the highest to the lowest OPISD.
    pub fn ranking(&self) -> Vec<&str> {
        self.solvers.iter().map(|s| s.label.as_str()).collect()
    }

    pub fn solver(&self, label: &str) -> Option<&SolverRecord> {
        self.solvers.iter().find(|s| s.label == label)
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("report serializes");
        text.push('\n');
        text
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("rank,label,perc_pct,area_pu,opisd\n");
        for s in &self.solvers {
            out.push_str(&format!("{},{},{},{},{}\n", s.rank, s.label, s.perc_pct, s.area_pu, s.opisd));
        }
        out
    }
}

/// Orders solvers by descending OPISD (ascending area), ties by label.
pub fn rank_solvers(reference: &ReferenceCdf, scores: Vec<SolverScore>) -> Result<PerformanceReport, MetricsError> {
    let digest = reference.digest();
    if scores.iter().any(|s| s.reference_digest != digest) {
        return Err(MetricsError::MixedReferences);
    }
    let mut records = scores
        .into_iter()
        .map(|s| {
            Ok(SolverRecord {
                opisd: opisd(s.area)?,
                label: s.label,
                perc_pct: s.perc_pct,
                area_pu: s.area,
                rank: 0,
            })
        })
        .collect::<Result<Vec<_>, MetricsError>>()?;
    records.sort_by(|a, b| b.opisd.total_cmp(&a.opisd).then_with(|| a.label.cmp(&b.label)));
    for (i, r) in records.iter_mut().enumerate() {
        r.rank = i + 1;
    }
    Ok(PerformanceReport {
        mode: reference.kind(),
        h: reference.len(),
        reference: ReferenceSummary {
            kind: reference.kind(),
            values_digest: digest,
            y_g: reference.y_g(),
        },
        solvers: records,
    })
}

/// Solutions within this distance below `y_G` are taken to be `y_G`.
pub const OPTIMUM_SLACK: f64 = 1e-9;

/// Case G comparison: every solver's CDF against the global optimum. All
/// sets must have the same number of values.
pub fn evaluate_global(
    sets: &[SolutionSet],
    y_g: f64,
    eps: f64,
) -> Result<(PerformanceReport, ReferenceCdf, Vec<EmpiricalCdf>), MetricsError> {
    let h = sets.first().ok_or(MetricsError::Empty)?.len();
    if let Some(bad) = sets.iter().find(|s| s.len() != h) {
        return Err(MetricsError::UnequalLength {
            left: h,
            right: bad.len(),
        });
    }
    let reference = reference_cdf_global(y_g, h)?;
    let mut cdfs = Vec::with_capacity(sets.len());
    let mut scores = Vec::with_capacity(sets.len());
    for set in sets {
        if let Some(&value) = set.values.iter().find(|&&v| v < y_g - OPTIMUM_SLACK) {
            return Err(MetricsError::BelowOptimum { value, y_g });
        }
        let snapped: Vec<f64> = set.values.iter().map(|&v| v.max(y_g)).collect();
        let cdf = build_cdf(&snapped)?;
        scores.push(SolverScore {
            label: set.label.clone(),
            perc_pct: perc(&cdf, &reference, eps)?,
            area: area_vs_reference(&cdf, &reference)?,
            reference_digest: reference.digest(),
        });
        cdfs.push(cdf);
    }
    Ok((rank_solvers(&reference, scores)?, reference, cdfs))
}

/// Case R comparison: trimmed solver CDFs against the pooled best-`H`
/// reference.
pub fn evaluate_relative(
    sets: &[SolutionSet],
    eps: f64,
) -> Result<(PerformanceReport, ReferenceCdf, Vec<EmpiricalCdf>), MetricsError> {
    let (reference, trimmed) = reference_cdf_relative(sets)?;
    let scores = sets
        .iter()
        .zip(&trimmed)
        .map(|(set, cdf)| {
            Ok(SolverScore {
                label: set.label.clone(),
                perc_pct: perc(cdf, &reference, eps)?,
                area: area_vs_reference(cdf, &reference)?,
                reference_digest: reference.digest(),
            })
        })
        .collect::<Result<Vec<_>, MetricsError>>()?;
    Ok((rank_solvers(&reference, scores)?, reference, trimmed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn set(label: &str, v: &[f64]) -> SolutionSet {
        SolutionSet::new(label, v.to_vec()).unwrap()
    }

    #[test]
    fn area_cases() {
        let r = reference_cdf_global(5.0, 2).unwrap();
        assert_eq!(area_vs_reference(&build_cdf(&[5.0, 5.0]).unwrap(), &r).unwrap(), 0.0);
        assert_eq!(area_vs_reference(&build_cdf(&[6.0, 8.0]).unwrap(), &r).unwrap(), 2.0);
        assert!(area_vs_reference(&build_cdf(&[6.0]).unwrap(), &r).is_err());

        let (rel, trimmed) = reference_cdf_relative(&[set("A", &[1.0, 3.0]), set("B", &[2.0, 4.0])]).unwrap();
        assert_eq!(area_vs_reference(&trimmed[0], &rel).unwrap(), 0.5);
        assert!(matches!(
            area_vs_reference(&build_cdf(&[4.0, 4.9]).unwrap(), &r),
            Err(MetricsError::NegativeArea(_))
        ));
    }

    #[test]
    fn opisd_values() {
        assert_eq!(opisd(0.0).unwrap(), 1.0);
        assert_abs_diff_eq!(opisd(0.0180).unwrap(), 0.9823, epsilon = 5e-5);
        assert_abs_diff_eq!(opisd(1.9533).unwrap(), 0.3386, epsilon = 5e-5);
        assert!(opisd(-0.1).is_err());
        assert!(opisd(f64::NAN).is_err());
    }

    #[test]
    fn perc_cases() {
        let g = reference_cdf_global(3.0, 3).unwrap();
        assert_eq!(perc(&build_cdf(&[3.0; 3]).unwrap(), &g, 0.0).unwrap(), 100.0);
        assert_abs_diff_eq!(perc(&build_cdf(&[3.0, 3.0, 4.0]).unwrap(), &g, 0.0).unwrap(), 200.0 / 3.0);
        assert_eq!(perc(&build_cdf(&[3.0 + 1e-10, 4.0, 4.0]).unwrap(), &g, 1e-9).unwrap(), 100.0 / 3.0);

        let (rel, trimmed) = reference_cdf_relative(&[set("A", &[1.0, 3.0]), set("B", &[2.0, 4.0])]).unwrap();
        assert_eq!(perc(&trimmed[0], &rel, 0.0).unwrap(), 50.0);
        assert_eq!(perc(&trimmed[1], &rel, 0.0).unwrap(), 50.0);
    }

    #[test]
    fn ranking_follows_areas() {
        let r = reference_cdf_global(0.0, 1).unwrap();
        let score = |label: &str, area: f64| SolverScore {
            label: label.into(),
            perc_pct: 0.0,
            area,
            reference_digest: r.digest(),
        };
        let report = rank_solvers(&r, vec![score("GA", 1.9533), score("SA", 0.0165), score("PSO", 0.0464)]).unwrap();
        assert_eq!(report.ranking(), vec!["SA", "PSO", "GA"]);
        assert_eq!(report.solvers[0].rank, 1);

        let single = rank_solvers(&r, vec![score("only", 0.2)]).unwrap();
        assert_eq!(single.ranking(), vec!["only"]);

        let tie = rank_solvers(&r, vec![score("b", 0.5), score("a", 0.5)]).unwrap();
        assert_eq!(tie.ranking(), vec!["a", "b"]);

        let mut foreign = score("x", 0.1);
        foreign.reference_digest = "other".into();
        assert_eq!(rank_solvers(&r, vec![foreign]), Err(MetricsError::MixedReferences));
    }

    #[test]
    fn relative_comparison_of_two_solvers() {
        let (report, _, _) = evaluate_relative(&[set("A", &[1.0, 3.0]), set("B", &[2.0, 4.0])], 0.0).unwrap();
        assert_eq!(report.ranking(), vec!["A", "B"]);
        let a = report.solver("A").unwrap();
        let b = report.solver("B").unwrap();
        assert_eq!((a.area_pu, b.area_pu), (0.5, 1.5));
        assert_abs_diff_eq!(a.opisd, 2.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(b.opisd, 0.4, epsilon = 1e-15);
    }

    #[test]
    fn strictly_dominating_solver_defines_the_reference() {
        let (report, reference, _) =
            evaluate_relative(&[set("A", &[1.0, 2.0]), set("B", &[3.0, 4.0]), set("C", &[5.0, 6.0])], 0.0).unwrap();
        assert_eq!(reference.values(), &[1.0, 2.0]);
        assert_eq!(report.solver("A").unwrap().opisd, 1.0);
        assert_eq!(report.solver("A").unwrap().perc_pct, 100.0);
    }

    #[test]
    fn global_comparison_checks_the_optimum() {
        let (report, _, _) = evaluate_global(&[set("A", &[2.0, 2.0]), set("B", &[2.0, 3.0])], 2.0, 0.0).unwrap();
        assert_eq!(report.solver("A").unwrap().opisd, 1.0);
        assert_eq!(report.solver("B").unwrap().perc_pct, 50.0);
        assert!(matches!(
            evaluate_global(&[set("A", &[1.0, 2.0])], 2.0, 0.0),
            Err(MetricsError::BelowOptimum { .. })
        ));
        assert!(evaluate_global(&[set("A", &[2.0]), set("B", &[2.0, 3.0])], 2.0, 0.0).is_err());
    }

    #[test]
    fn compensated_sum_is_exact_on_cancellation() {
        assert_eq!(compensated_sum([1e16, 1.0, -1e16].into_iter()), 1.0);
    }
}

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{EmpiricalCdf, MetricsError, SolutionSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ReferenceKind {
    /// Built from the known global optimum.
    #[serde(rename = "G")]
    Global,
    /// Built from the best solutions pooled across the compared solvers.
    #[serde(rename = "R")]
    Relative,
}

/// A dominating CDF with `H` points. For [`ReferenceKind::Global`] every
/// point equals `y_G`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceCdf {
    kind: ReferenceKind,
    sorted: Vec<f64>,
    y_g: Option<f64>,
    origins: Vec<usize>,
}

impl ReferenceCdf {
    pub fn kind(&self) -> ReferenceKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.sorted
    }

    pub fn y_g(&self) -> Option<f64> {
        self.y_g
    }

    /// For relative references, the index of the solver each point was
    /// drawn from (empty for global references).
    pub fn origins(&self) -> &[usize] {
        &self.origins
    }

    /// Number of reference points drawn from each of `solvers` solvers.
    /// The counts always sum to `H`.
    pub fn attribution(&self, solvers: usize) -> Vec<usize> {
        let mut counts = vec![0; solvers];
        for &s in &self.origins {
            counts[s] += 1;
        }
        counts
    }

    pub fn as_cdf(&self) -> EmpiricalCdf {
        EmpiricalCdf::from_sorted(self.sorted.clone())
    }

    /// `F_ref ≥ F_s` in elementwise form: `y_ref(z) ≤ y_s(z)` for all `z`.
    pub fn dominates(&self, cdf: &EmpiricalCdf) -> bool {
        self.sorted.len() == cdf.len() && self.sorted.iter().zip(cdf.values()).all(|(r, s)| r <= s)
    }

    /// SHA-256 over the little-endian bytes of the reference values.
    pub fn digest(&self) -> String {
        let mut hasher = Sha256::new();
        for v in &self.sorted {
            hasher.update(v.to_le_bytes());
        }
        hasher
            .finalize()
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}

/// Reference that is zero below `y_g` and jumps to one at `y_g`, discretized
/// into `h` identical points.
pub fn reference_cdf_global(y_g: f64, h: usize) -> Result<ReferenceCdf, MetricsError> {
    if h == 0 {
        return Err(MetricsError::Empty);
    }
    if !y_g.is_finite() {
        return Err(MetricsError::NonFinite);
    }
    Ok(ReferenceCdf {
        kind: ReferenceKind::Global,
        sorted: vec![y_g; h],
        y_g: Some(y_g),
        origins: Vec::new(),
    })
}

/// Pools the best `H = min H_s` values of every solver and keeps the best `H`
/// of the pool. Returns the reference and each solver's trimmed CDF (its best
/// `H` values). Ties at the cut are broken in pool order: solver order, then
/// ascending value within a solver.
pub fn reference_cdf_relative(
    sets: &[SolutionSet],
) -> Result<(ReferenceCdf, Vec<EmpiricalCdf>), MetricsError> {
    if sets.len() < 2 {
        return Err(MetricsError::TooFewSolvers(sets.len()));
    }
    let trimmed_all = sets.iter().map(SolutionSet::cdf).collect::<Result<Vec<_>, _>>()?;
    let h = trimmed_all.iter().map(EmpiricalCdf::len).min().expect("at least two sets");
    let trimmed: Vec<EmpiricalCdf> = trimmed_all
        .into_iter()
        .map(|c| EmpiricalCdf::from_sorted(c.values()[..h].to_vec()))
        .collect();

    let mut pool: Vec<(f64, usize)> = trimmed
        .iter()
        .enumerate()
        .flat_map(|(s, c)| c.values().iter().map(move |&v| (v, s)))
        .collect();
    // Stable: equal values keep pool order.
    pool.sort_by(|a, b| a.0.total_cmp(&b.0));
    pool.truncate(h);
    let reference = ReferenceCdf {
        kind: ReferenceKind::Relative,
        sorted: pool.iter().map(|p| p.0).collect(),
        y_g: None,
        origins: pool.iter().map(|p| p.1).collect(),
    };
    Ok((reference, trimmed))
}

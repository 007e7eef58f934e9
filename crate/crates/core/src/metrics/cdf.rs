use serde::{Deserialize, Serialize};

use super::MetricsError;

/// Objective values returned by `H_s` executions of one solver.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionSet {
    pub label: String,
    pub values: Vec<f64>,
}

impl SolutionSet {
    pub fn new(label: impl Into<String>, values: Vec<f64>) -> Result<Self, MetricsError> {
        if values.is_empty() {
            return Err(MetricsError::Empty);
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(MetricsError::NonFinite);
        }
        Ok(SolutionSet {
            label: label.into(),
            values,
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn cdf(&self) -> Result<EmpiricalCdf, MetricsError> {
        build_cdf(&self.values)
    }
}

/// Step CDF of `H` values: `F(y)` jumps by `1/H` at each sorted value.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalCdf {
    sorted: Vec<f64>,
}

/// Sorts ascending (stable under ties). Rejects empty or non-finite input.
pub fn build_cdf(values: &[f64]) -> Result<EmpiricalCdf, MetricsError> {
    if values.is_empty() {
        return Err(MetricsError::Empty);
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(MetricsError::NonFinite);
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(EmpiricalCdf { sorted })
}

impl EmpiricalCdf {
    pub(crate) fn from_sorted(sorted: Vec<f64>) -> Self {
        debug_assert!(sorted.windows(2).all(|w| w[0] <= w[1]));
        EmpiricalCdf { sorted }
    }

    /// H
    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    /// Vertical step width `1/H`.
    pub fn step(&self) -> f64 {
        1.0 / self.sorted.len() as f64
    }

    /// Ascending values `y(1) ≤ … ≤ y(H)`.
    pub fn values(&self) -> &[f64] {
        &self.sorted
    }

    /// `F(y)`: fraction of values `≤ y`.
    pub fn eval(&self, y: f64) -> f64 {
        self.sorted.partition_point(|&v| v <= y) as f64 / self.sorted.len() as f64
    }

    /// Plot-ready `(y(z), z/H)` pairs, one per step.
    pub fn breakpoints(&self) -> Vec<(f64, f64)> {
        let h = self.sorted.len() as f64;
        self.sorted
            .iter()
            .enumerate()
            .map(|(z, &y)| (y, (z + 1) as f64 / h))
            .collect()
    }

    pub fn mean(&self) -> f64 {
        self.sorted.iter().sum::<f64>() / self.sorted.len() as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sorts_values() {
        let cdf = build_cdf(&[3.0, 1.0, 2.0]).unwrap();
        assert_eq!(cdf.values(), &[1.0, 2.0, 3.0]);
        assert_eq!(cdf.len(), 3);
        assert!((cdf.step() * 3.0 - 1.0).abs() < 1e-15);
    }

    #[test]
    fn fifty_values_make_fifty_steps() {
        let values: Vec<f64> = (0..50).map(|i| ((i * 37) % 50) as f64 * 0.01).collect();
        let cdf = build_cdf(&values).unwrap();
        assert_eq!(cdf.breakpoints().len(), 50);
        assert_eq!(cdf.breakpoints().last().unwrap().1, 1.0);
    }

    #[test]
    fn equal_values_make_a_single_riser() {
        let cdf = build_cdf(&[2.5; 4]).unwrap();
        assert_eq!(cdf.eval(2.4), 0.0);
        assert_eq!(cdf.eval(2.5), 1.0);
        let ys: Vec<f64> = cdf.breakpoints().iter().map(|p| p.0).collect();
        assert_eq!(ys, vec![2.5; 4]);
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(build_cdf(&[]), Err(MetricsError::Empty));
        assert_eq!(build_cdf(&[1.0, f64::NAN]), Err(MetricsError::NonFinite));
        assert!(SolutionSet::new("x", vec![f64::INFINITY]).is_err());
    }
}

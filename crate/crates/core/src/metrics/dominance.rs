use super::{EmpiricalCdf, MetricsError, SolutionSet};

/// Every solution of `a` is strictly better than every solution of `b`.
pub fn deterministic_dominance(a: &SolutionSet, b: &SolutionSet) -> bool {
    let max_a = a.values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min_b = b.values.iter().copied().fold(f64::INFINITY, f64::min);
    !a.values.is_empty() && !b.values.is_empty() && max_a < min_b
}

fn same_length(a: &EmpiricalCdf, b: &EmpiricalCdf) -> Result<(), MetricsError> {
    if a.len() != b.len() {
        return Err(MetricsError::UnequalLength {
            left: a.len(),
            right: b.len(),
        });
    }
    Ok(())
}

/// `F_a(y) ≥ F_b(y)` everywhere with strict inequality somewhere. For step
/// CDFs with the same number of points this is `y_a(z) ≤ y_b(z)` for all `z`,
/// strict for at least one.
pub fn first_order_dominates(a: &EmpiricalCdf, b: &EmpiricalCdf) -> Result<bool, MetricsError> {
    same_length(a, b)?;
    let mut strict = false;
    for (&ya, &yb) in a.values().iter().zip(b.values()) {
        if ya > yb {
            return Ok(false);
        }
        strict |= ya < yb;
    }
    Ok(strict)
}

/// `∫ (F_a − F_b) ≥ 0` up to every `y`, strictly positive somewhere.
///
/// The integrand is piecewise constant, so the integral is piecewise linear
/// and only needs checking at the merged breakpoints. Rounding in the running
/// sum is absorbed by a tolerance scaled to `H` and the value range.
pub fn second_order_dominates(a: &EmpiricalCdf, b: &EmpiricalCdf) -> Result<bool, MetricsError> {
    same_length(a, b)?;
    let (va, vb) = (a.values(), b.values());
    let lo = va[0].min(vb[0]);
    let hi = va[va.len() - 1].max(vb[vb.len() - 1]);
    let tol = 1e-12 * va.len() as f64 * (hi - lo).max(f64::MIN_POSITIVE);

    // Running H·∫(F_a − F_b), advanced breakpoint by breakpoint.
    let (mut i, mut j) = (0usize, 0usize);
    let mut area = 0.0f64;
    let mut strict = false;
    let mut y = lo;
    while i < va.len() || j < vb.len() {
        let next = match (va.get(i), vb.get(j)) {
            (Some(&x), Some(&z)) => x.min(z),
            (Some(&x), None) => x,
            (None, Some(&z)) => z,
            (None, None) => unreachable!(),
        };
        area += (i as f64 - j as f64) * (next - y);
        if area < -tol {
            return Ok(false);
        }
        strict |= area > tol;
        y = next;
        while i < va.len() && va[i] <= y {
            i += 1;
        }
        while j < vb.len() && vb[j] <= y {
            j += 1;
        }
    }
    Ok(strict)
}

//! Uniform B-spline basis on an extended knot vector, evaluated with the
//! Cox–de Boor recursion (local de Boor triangle).

use serde::{Deserialize, Serialize};

use super::NetError;

/// Knot layout for every edge of a KAN layer: `G` uniform segments of
/// degree-`k` splines over `[lo, hi]`, with `k` extra knots beyond each end.
/// Exactly `G + k` basis functions are defined.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplineGrid {
    lo: f64,
    hi: f64,
    segments: usize,
    order: usize,
    knots: Vec<f64>,
}

impl SplineGrid {
    pub fn new(lo: f64, hi: f64, segments: usize, order: usize) -> Result<Self, NetError> {
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(NetError::BadGrid(format!("range [{lo}, {hi}] is not a valid interval")));
        }
        if segments == 0 || order == 0 {
            return Err(NetError::BadGrid("segments and order must be positive".into()));
        }
        if segments > 64 || order > 16 {
            return Err(NetError::BadGrid(format!(
                "grid {segments} segments / order {order} exceeds supported size"
            )));
        }
        let span = hi - lo;
        let knots = (0..=(segments + 2 * order))
            .map(|i| {
                let j = i as f64 - order as f64;
                lo + span * (j / segments as f64)
            })
            .collect();
        Ok(Self { lo, hi, segments, order, knots })
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn segments(&self) -> usize {
        self.segments
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    /// Number of basis functions, `G + k`.
    pub fn basis_count(&self) -> usize {
        self.segments + self.order
    }

    /// Knot interval containing `x`, or None outside the extended support.
    fn find_span(&self, x: f64) -> Option<usize> {
        let t = &self.knots;
        let last = t.len() - 1;
        if !(x >= t[0] && x <= t[last]) {
            return None;
        }
        if x >= t[last] {
            return Some(last - 1);
        }
        // intervals are half-open [t_i, t_{i+1})
        let mut i = 0;
        while i + 1 < last && x >= t[i + 1] {
            i += 1;
        }
        Some(i)
    }

    /// Writes all `G + k` basis values at `x` to `out` (zero outside the
    /// local support). Inside `[lo, hi]` the values are nonnegative and sum
    /// to one; outside, the same recursion applies with no clamping.
    pub fn eval_basis(&self, x: f64, out: &mut [f64]) {
        self.eval_impl(x, out, None);
    }

    /// Same as [`eval_basis`](Self::eval_basis) plus first derivatives.
    pub fn eval_basis_and_deriv(&self, x: f64, out: &mut [f64], dout: &mut [f64]) {
        self.eval_impl(x, out, Some(dout));
    }

    fn eval_impl(&self, x: f64, out: &mut [f64], dout: Option<&mut [f64]>) {
        let count = self.basis_count();
        debug_assert_eq!(out.len(), count);
        out.fill(0.0);
        let mut dout = dout;
        if let Some(d) = dout.as_deref_mut() {
            debug_assert_eq!(d.len(), count);
            d.fill(0.0);
        }
        let Some(span) = self.find_span(x) else { return };

        let k = self.order;
        let t = &self.knots;
        let m = self.segments + 2 * k; // number of degree-0 functions
        // Cox–de Boor triangle over the whole knot vector: work[i] holds
        // N_{i,d} after level d; in-place update reads only old entries.
        let mut work = [0.0f64; 97];
        let mut lower = [0.0f64; 97]; // degree k-1 row, for derivatives
        work[span] = 1.0;
        for d in 1..=k {
            if d == k {
                lower[..=(m - k)].copy_from_slice(&work[..=(m - k)]);
            }
            for i in 0..(m - d) {
                let den_a = t[i + d] - t[i];
                let a = if den_a != 0.0 { (x - t[i]) / den_a * work[i] } else { 0.0 };
                let den_b = t[i + d + 1] - t[i + 1];
                let b = if den_b != 0.0 { (t[i + d + 1] - x) / den_b * work[i + 1] } else { 0.0 };
                work[i] = a + b;
            }
        }
        out.copy_from_slice(&work[..count]);

        if let Some(d) = dout {
            // B'_{i,k} = k (N_{i,k-1}/(t_{i+k}-t_i) - N_{i+1,k-1}/(t_{i+k+1}-t_{i+1}))
            for i in 0..count {
                let d1 = t[i + k] - t[i];
                let d2 = t[i + k + 1] - t[i + 1];
                let a = if d1 != 0.0 { lower[i] / d1 } else { 0.0 };
                let b = if d2 != 0.0 { lower[i + 1] / d2 } else { 0.0 };
                d[i] = k as f64 * (a - b);
            }
        }
    }
}

/// `x / (1 + e^{-x})`, the base-term nonlinearity on every KAN edge.
pub fn silu(x: f64) -> f64 {
    x / (1.0 + (-x).exp())
}

/// Derivative of [`silu`].
pub fn silu_deriv(x: f64) -> f64 {
    let s = 1.0 / (1.0 + (-x).exp());
    s * (1.0 + x * (1.0 - s))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Direct recursive Cox–de Boor definition, independent of the
    /// triangle implementation above.
    fn naive_basis(t: &[f64], i: usize, p: usize, x: f64) -> f64 {
        if p == 0 {
            return if t[i] <= x && x < t[i + 1] { 1.0 } else { 0.0 };
        }
        let left = if t[i + p] == t[i] {
            0.0
        } else {
            (x - t[i]) / (t[i + p] - t[i]) * naive_basis(t, i, p - 1, x)
        };
        let right = if t[i + p + 1] == t[i + 1] {
            0.0
        } else {
            (t[i + p + 1] - x) / (t[i + p + 1] - t[i + 1]) * naive_basis(t, i + 1, p - 1, x)
        };
        left + right
    }

    #[test]
    fn partition_of_unity_at_boundaries_and_inside() {
        for (g, k) in [(5, 3), (5, 4), (3, 2), (10, 10), (7, 5)] {
            let grid = SplineGrid::new(-1.0, 1.0, g, k).unwrap();
            let mut out = vec![0.0; grid.basis_count()];
            for step in 0..=40 {
                let x = -1.0 + 2.0 * step as f64 / 40.0;
                grid.eval_basis(x, &mut out);
                let sum: f64 = out.iter().sum();
                assert!((sum - 1.0).abs() < 1e-12, "G={g} k={k} x={x}: sum={sum}");
                assert!(out.iter().all(|&v| v >= -1e-15));
            }
        }
    }

    #[test]
    fn local_support_bound() {
        let grid = SplineGrid::new(-1.0, 1.0, 5, 3).unwrap();
        let mut out = vec![0.0; grid.basis_count()];
        grid.eval_basis(0.0, &mut out);
        assert_eq!(out.len(), 8);
        let nonzero = out.iter().filter(|v| v.abs() > 1e-14).count();
        assert!(nonzero <= 4, "at most k+1 = 4 nonzero, got {nonzero}");
        let sum: f64 = out.iter().sum();
        assert!((sum - 1.0).abs() < 1e-12);
    }

    #[test]
    fn matches_naive_recursion() {
        let grid = SplineGrid::new(-1.0, 1.0, 5, 4).unwrap();
        let mut out = vec![0.0; grid.basis_count()];
        // deterministic pseudo-random interior points
        let mut s = 0x9e3779b97f4a7c15u64;
        for _ in 0..200 {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let x = -1.0 + 2.0 * ((s >> 11) as f64 / (1u64 << 53) as f64);
            grid.eval_basis(x, &mut out);
            for i in 0..grid.basis_count() {
                let want = naive_basis(grid.knots(), i, 4, x);
                assert!(
                    (out[i] - want).abs() < 1e-12,
                    "x={x} i={i}: {} vs naive {want}",
                    out[i]
                );
            }
        }
    }

    #[test]
    fn derivative_matches_central_difference() {
        let grid = SplineGrid::new(-1.0, 1.0, 6, 3).unwrap();
        let count = grid.basis_count();
        let mut b = vec![0.0; count];
        let mut db = vec![0.0; count];
        let mut plus = vec![0.0; count];
        let mut minus = vec![0.0; count];
        for step in 1..20 {
            let x = -0.95 + 1.9 * step as f64 / 20.0;
            grid.eval_basis_and_deriv(x, &mut b, &mut db);
            let h = 1e-6;
            grid.eval_basis(x + h, &mut plus);
            grid.eval_basis(x - h, &mut minus);
            for i in 0..count {
                let fd = (plus[i] - minus[i]) / (2.0 * h);
                assert!((db[i] - fd).abs() < 1e-6, "x={x} i={i}: {} vs fd {fd}", db[i]);
            }
        }
    }

    #[test]
    fn outside_extended_support_is_zero() {
        let grid = SplineGrid::new(-1.0, 1.0, 5, 3).unwrap();
        let mut out = vec![0.0; grid.basis_count()];
        grid.eval_basis(-10.0, &mut out);
        assert!(out.iter().all(|&v| v == 0.0));
        grid.eval_basis(10.0, &mut out);
        assert!(out.iter().all(|&v| v == 0.0));
        // just outside [lo, hi] the recursion still yields values (no clamping)
        grid.eval_basis(1.1, &mut out);
        let sum: f64 = out.iter().sum();
        assert!(sum > 0.0 && sum < 1.0);
    }

    #[test]
    fn rejects_degenerate_grids() {
        assert!(SplineGrid::new(1.0, -1.0, 5, 3).is_err());
        assert!(SplineGrid::new(-1.0, 1.0, 0, 3).is_err());
        assert!(SplineGrid::new(-1.0, 1.0, 5, 0).is_err());
    }
}

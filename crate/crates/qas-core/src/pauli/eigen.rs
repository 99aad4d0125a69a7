//! Dense symmetric/Hermitian eigenvalues via cyclic Jacobi rotations.
//!
//! Matrices here are at most 2^8 x 2^8, where Jacobi is simple and
//! numerically dependable.

use num_complex::Complex64;

/// Eigenvalues of a real symmetric matrix (row-major), ascending.
pub fn symmetric_eigenvalues(mut a: Vec<f64>, n: usize) -> Vec<f64> {
    assert_eq!(a.len(), n * n);
    if n == 1 {
        return vec![a[0]];
    }
    let scale: f64 = (0..n).map(|i| a[i * n + i].abs()).fold(1.0, f64::max);
    for _sweep in 0..100 {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[p * n + q] * a[p * n + q];
            }
        }
        if off.sqrt() <= 1e-14 * scale {
            break;
        }
        for p in 0..(n - 1) {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq.abs() <= 1e-300 {
                    continue;
                }
                let tau = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // A <- Gᵀ A G with G the (p,q) plane rotation
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut eigs: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
    eigs.sort_by(|x, y| x.partial_cmp(y).unwrap());
    eigs
}

/// Eigenvalues of a Hermitian matrix (row-major), ascending.
///
/// Uses the real embedding `[[Re, -Im], [Im, Re]]`, whose spectrum is that of
/// the Hermitian matrix with every eigenvalue doubled.
pub fn hermitian_eigenvalues(h: &[Complex64], dim: usize) -> Vec<f64> {
    assert_eq!(h.len(), dim * dim);
    let n = 2 * dim;
    let mut m = vec![0.0f64; n * n];
    for i in 0..dim {
        for j in 0..dim {
            let v = h[i * dim + j];
            m[i * n + j] = v.re;
            m[i * n + (dim + j)] = -v.im;
            m[(dim + i) * n + j] = v.im;
            m[(dim + i) * n + (dim + j)] = v.re;
        }
    }
    let doubled = symmetric_eigenvalues(m, n);
    doubled.into_iter().step_by(2).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_matrix() {
        let a = vec![3.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0, 0.0, 2.0];
        assert_eq!(symmetric_eigenvalues(a, 3), vec![-1.0, 2.0, 3.0]);
    }

    #[test]
    fn two_by_two_known() {
        // [[2,1],[1,2]] has eigenvalues 1 and 3
        let eigs = symmetric_eigenvalues(vec![2.0, 1.0, 1.0, 2.0], 2);
        assert!((eigs[0] - 1.0).abs() < 1e-12);
        assert!((eigs[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn hermitian_pauli_y() {
        let y = vec![
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, -1.0),
            Complex64::new(0.0, 1.0),
            Complex64::new(0.0, 0.0),
        ];
        let eigs = hermitian_eigenvalues(&y, 2);
        assert!((eigs[0] + 1.0).abs() < 1e-12);
        assert!((eigs[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn random_symmetric_reconstruction_invariants() {
        // trace and Frobenius norm match eigenvalue sums
        let n = 8;
        let mut a = vec![0.0; n * n];
        let mut seed = 0x2545f4914f6cdd1du64;
        let mut rng = move || {
            seed ^= seed << 13;
            seed ^= seed >> 7;
            seed ^= seed << 17;
            (seed >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        for i in 0..n {
            for j in 0..=i {
                let v = rng();
                a[i * n + j] = v;
                a[j * n + i] = v;
            }
        }
        let trace: f64 = (0..n).map(|i| a[i * n + i]).sum();
        let frob: f64 = a.iter().map(|x| x * x).sum();
        let eigs = symmetric_eigenvalues(a, n);
        let sum: f64 = eigs.iter().sum();
        let sq: f64 = eigs.iter().map(|x| x * x).sum();
        assert!((sum - trace).abs() < 1e-10);
        assert!((sq - frob).abs() < 1e-10);
    }
}

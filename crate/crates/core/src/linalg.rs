//! Small dense symmetric-matrix helpers.

use crate::scalar::Real;

/// Largest absolute asymmetry |m_ij - m_ji|.
pub fn asymmetry<T: Real>(m: &[Vec<T>]) -> T {
    let mut worst = T::zero();
    for i in 0..m.len() {
        for j in 0..i {
            worst = worst.max((m[i][j] - m[j][i]).abs());
        }
    }
    worst
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
pub fn symmetric_eigenvalues<T: Real>(m: &[Vec<T>]) -> Vec<T> {
    let n = m.len();
    let mut a: Vec<Vec<T>> = m.to_vec();
    for _sweep in 0..100 {
        let off: T = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| a[i][j] * a[i][j]).sum();
        let diag: T = (0..n).map(|i| a[i][i] * a[i][i]).sum();
        if off <= T::epsilon() * T::epsilon() * diag.max(T::min_positive_value()) {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q] == T::zero() {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (T::lit(2.0) * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let t = if theta == T::zero() { T::one() } else { t };
                let c = (t * t + T::one()).sqrt().recip();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut ev: Vec<T> = (0..n).map(|i| a[i][i]).collect();
    ev.sort_by(|x, y| x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal));
    ev
}

pub fn min_eigenvalue<T: Real>(m: &[Vec<T>]) -> T {
    symmetric_eigenvalues(m).first().copied().unwrap_or(T::zero())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_by_two() {
        let m = vec![vec![2.0, 1.0], vec![1.0, 2.0]];
        let ev = symmetric_eigenvalues(&m);
        assert!((ev[0] - 1.0f64).abs() < 1e-14 && (ev[1] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn trace_and_determinant_preserved() {
        let m = vec![vec![4.0, -1.0, 0.5], vec![-1.0, 3.0, 0.2], vec![0.5, 0.2, 1.0]];
        let ev = symmetric_eigenvalues(&m);
        let tr: f64 = ev.iter().sum();
        assert!((tr - 8.0).abs() < 1e-12);
        let det = 4.0 * (3.0 - 0.04) + 1.0 * (-1.0 - 0.1) + 0.5 * (-0.2 - 1.5);
        assert!((ev.iter().product::<f64>() - det).abs() < 1e-12);
    }
}

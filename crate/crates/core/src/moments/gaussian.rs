//! Joint moments E[X_1^{r_1} ... X_n^{r_n}] of a centered Gaussian vector, by
//! the closed coefficient formula and by brute-force pair matchings.

use crate::error::{domain, Error, Result};
use crate::scalar::{factorial, powi, Field};

/// Largest total order accepted by the matching oracle.
pub const WICK_MAX_ORDER: u32 = 12;

/// Exponents r and covariance matrix sigma (diagonal = variances).
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianMomentSpec<F> {
    r: Vec<u32>,
    sigma: Vec<Vec<F>>,
}

impl<F: Field + PartialOrd> GaussianMomentSpec<F> {
    /// Symmetry is checked to 1e-12 absolute; diagonals must be nonnegative.
    pub fn new(r: Vec<u32>, sigma: Vec<Vec<F>>) -> Result<Self> {
        let n = r.len();
        if n == 0 || sigma.len() != n || sigma.iter().any(|row| row.len() != n) {
            return Err(domain(format!("need n >= 1 exponents and an n x n covariance, n = {n}")));
        }
        let tol = F::from_f64(1e-12).expect("tolerance representable");
        for i in 0..n {
            if sigma[i][i] < F::zero() {
                return Err(domain(format!("variance sigma[{i}][{i}] is negative")));
            }
            for j in 0..i {
                let d = sigma[i][j].clone() - sigma[j][i].clone();
                let d = if d < F::zero() { F::zero() - d } else { d };
                if d > tol {
                    return Err(domain(format!("covariance is not symmetric at ({i}, {j})")));
                }
            }
        }
        Ok(GaussianMomentSpec { r, sigma })
    }
}

impl<F> GaussianMomentSpec<F> {
    pub fn r(&self) -> &[u32] {
        &self.r
    }

    pub fn sigma(&self) -> &[Vec<F>] {
        &self.sigma
    }

    pub fn order(&self) -> u32 {
        self.r.iter().sum()
    }
}

/// Sum over off-diagonal pair counts p_ij with r_m - |p|_m even and
/// nonnegative of
/// r! prod (sigma_mm)^{e_m} prod sigma_ij^{p_ij} / (2^{sum e} prod e_m! prod p_ij!),
/// e_m = (r_m - |p|_m)/2. Zero when |r| is odd.
pub fn gaussian_joint_moment<F: Field>(spec: &GaussianMomentSpec<F>) -> F {
    let r = &spec.r;
    let n = r.len();
    if spec.order() % 2 == 1 {
        return F::zero();
    }
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let r_fact = r.iter().fold(F::one(), |acc, &ri| acc * factorial::<F>(ri));
    let mut used = vec![0u32; n];
    let mut counts = vec![0u32; pairs.len()];
    let mut total = F::zero();
    enumerate(spec, &pairs, 0, &mut used, &mut counts, &mut |used, counts| {
        let mut num = r_fact.clone();
        let mut den = F::one();
        for m in 0..n {
            let e = (r[m] - used[m]) / 2;
            num = num * powi(&spec.sigma[m][m], e);
            den = den * factorial::<F>(e) * powi(&F::from_int(2), e);
        }
        for (idx, &(i, j)) in pairs.iter().enumerate() {
            num = num * powi(&spec.sigma[i][j], counts[idx]);
            den = den * factorial::<F>(counts[idx]);
        }
        total = total.clone() + num / den;
    });
    total
}

fn enumerate<F, G: FnMut(&[u32], &[u32])>(
    spec: &GaussianMomentSpec<F>,
    pairs: &[(usize, usize)],
    idx: usize,
    used: &mut [u32],
    counts: &mut [u32],
    visit: &mut G,
) {
    if idx == pairs.len() {
        if used.iter().zip(&spec.r).all(|(u, r)| (r - u) % 2 == 0) {
            visit(used, counts);
        }
        return;
    }
    let (i, j) = pairs[idx];
    // once the last pair touching i is placed, r_i - |p|_i must be even
    let last_for_i = pairs[idx + 1..].iter().all(|&(a, b)| a != i && b != i);
    let cap = (spec.r[i] - used[i]).min(spec.r[j] - used[j]);
    for c in 0..=cap {
        if last_for_i && (spec.r[i] - used[i] - c) % 2 == 1 {
            continue;
        }
        used[i] += c;
        used[j] += c;
        counts[idx] = c;
        enumerate(spec, pairs, idx + 1, used, counts, visit);
        used[i] -= c;
        used[j] -= c;
    }
    counts[idx] = 0;
}

/// Isserlis expansion: the sum over all perfect matchings of the |r| labeled
/// factors of the product of matched covariances.
pub fn gaussian_moment_wick_oracle<F: Field>(spec: &GaussianMomentSpec<F>) -> Result<F> {
    let order = spec.order();
    if order > WICK_MAX_ORDER {
        return Err(Error::Size(format!("matching enumeration needs |r| <= {WICK_MAX_ORDER}, got {order}")));
    }
    if order % 2 == 1 {
        return Ok(F::zero());
    }
    let labels: Vec<usize> = spec.r.iter().enumerate().flat_map(|(m, &c)| std::iter::repeat_n(m, c as usize)).collect();
    let mut remaining = labels;
    Ok(matchings(&spec.sigma, &mut remaining))
}

fn matchings<F: Field>(sigma: &[Vec<F>], items: &mut Vec<usize>) -> F {
    if items.is_empty() {
        return F::one();
    }
    let first = items.remove(0);
    let mut sum = F::zero();
    for k in 0..items.len() {
        let partner = items.remove(k);
        sum = sum + sigma[first][partner].clone() * matchings(sigma, items);
        items.insert(k, partner);
    }
    items.insert(0, first);
    sum
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;

    fn unit(n: usize, rho: f64) -> Vec<Vec<f64>> {
        (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { rho }).collect()).collect()
    }

    fn both(r: &[u32], sigma: Vec<Vec<f64>>) -> (f64, f64) {
        let s = GaussianMomentSpec::new(r.to_vec(), sigma).unwrap();
        (gaussian_joint_moment(&s), gaussian_moment_wick_oracle(&s).unwrap())
    }

    #[test]
    fn worked_values() {
        assert_eq!(both(&[2], vec![vec![2.5]]), (2.5, 2.5));
        assert_eq!(both(&[4], vec![vec![1.0]]), (3.0, 3.0));
        let rho = 0.3;
        let (f, w) = both(&[2, 2], unit(2, rho));
        assert!((f - (1.0 + 2.0 * rho * rho)).abs() < 1e-15 && (w - f).abs() < 1e-15);
        let (f, w) = both(&[3, 1], unit(2, rho));
        assert!((f - 3.0 * rho).abs() < 1e-15 && (w - f).abs() < 1e-15);
        let (f, w) = both(&[1, 1], unit(2, rho));
        assert!((f - rho).abs() < 1e-15 && (w - rho).abs() < 1e-15);
        let (f, w) = both(&[2, 2, 2], unit(3, -0.5));
        assert!((f - 1.5).abs() < 1e-14 && (w - 1.5).abs() < 1e-14);
        assert_eq!(both(&[2, 1], unit(2, rho)), (0.0, 0.0));
    }

    #[test]
    fn exact_rational_agreement() {
        let q = |n, d| Rational::new(n, d);
        let sigma = vec![
            vec![q(2, 1), q(1, 3), q(-1, 2)],
            vec![q(1, 3), q(1, 1), q(1, 5)],
            vec![q(-1, 2), q(1, 5), q(3, 2)],
        ];
        for r in [[2u32, 2, 2], [4, 1, 1], [3, 3, 0], [1, 2, 3], [0, 4, 2]] {
            let s = GaussianMomentSpec::new(r.to_vec(), sigma.clone()).unwrap();
            assert_eq!(gaussian_joint_moment(&s), gaussian_moment_wick_oracle(&s).unwrap(), "{r:?}");
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert!(GaussianMomentSpec::new(vec![2, 2], vec![vec![1.0, 0.5], vec![0.4, 1.0]]).is_err());
        assert!(GaussianMomentSpec::new(vec![2], vec![vec![-1.0]]).is_err());
        let big = GaussianMomentSpec::new(vec![14], vec![vec![1.0]]).unwrap();
        assert!(matches!(gaussian_moment_wick_oracle(&big), Err(Error::Size(_))));
        // the closed formula has no size limit: E[X^14] = 13!!
        assert_eq!(gaussian_joint_moment(&big), 135135.0);
    }
}

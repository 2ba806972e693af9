use crate::scalar::Real;

/// Kolmogorov distribution function K(x) = P(sup |B°| <= x).
///
/// Uses 1 - 2 sum (-1)^{k-1} exp(-2 k^2 x^2) for x >= 1 and the Jacobi-theta
/// dual sqrt(2 pi)/x sum exp(-(2k-1)^2 pi^2 / (8 x^2)) below, where the
/// alternating series needs many terms.
pub fn kolmogorov_cdf<T: Real>(x: T) -> T {
    if !(x > T::zero()) {
        return T::zero();
    }
    let tol = T::lit(1e-14);
    if x < T::one() {
        let c = -(T::PI() * T::PI()) / (T::lit(8.0) * x * x);
        let mut sum = T::zero();
        for k in 1..100 {
            let m = T::count(2 * k - 1);
            let term = (c * m * m).exp();
            sum = sum + term;
            if term < tol * sum.max(T::min_positive_value()) {
                break;
            }
        }
        let v = (T::lit(2.0) * T::PI()).sqrt() / x * sum;
        return v.min(T::one());
    }
    let mut sum = T::zero();
    let mut sign = T::one();
    for k in 1..100 {
        let kf = T::count(k);
        let term = (T::lit(-2.0) * kf * kf * x * x).exp();
        sum = sum + sign * term;
        sign = -sign;
        if term < tol {
            break;
        }
    }
    (T::one() - T::lit(2.0) * sum).max(T::zero()).min(T::one())
}

/// Inverse of [`kolmogorov_cdf`] by bisection, for p in (0, 1).
pub fn kolmogorov_quantile(p: f64) -> f64 {
    let (mut lo, mut hi) = (0.0f64, 10.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if kolmogorov_cdf(mid) < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

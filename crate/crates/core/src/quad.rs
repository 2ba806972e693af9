//! Numerical integration: adaptive Gauss-Kronrod (7/15) with global
//! subdivision, a tanh-sinh rule for endpoint singularities, and fixed
//! Gauss-Legendre panels for tabulation work.

use crate::scalar::Real;

// Gauss-Kronrod 15-point abscissae (non-negative half) and weights.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
// Gauss 7-point weights, paired with XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Result of a quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quad<T> {
    pub value: T,
    /// Estimated absolute error.
    pub error: T,
    pub evaluations: usize,
    /// Whether the requested tolerance was met before the interval budget ran out.
    pub converged: bool,
}

impl<T: Real> Quad<T> {
    fn zero() -> Self {
        Quad { value: T::zero(), error: T::zero(), evaluations: 0, converged: true }
    }

    fn add(self, other: Self) -> Self {
        Quad {
            value: self.value + other.value,
            error: self.error + other.error,
            evaluations: self.evaluations + other.evaluations,
            converged: self.converged && other.converged,
        }
    }
}

/// Tolerances for the adaptive rules.
#[derive(Debug, Clone, Copy)]
pub struct Tolerance<T> {
    pub abs: T,
    pub rel: T,
    pub max_intervals: usize,
}

impl<T: Real> Tolerance<T> {
    pub fn new(abs: T, rel: T) -> Self {
        Tolerance { abs, rel, max_intervals: 2000 }
    }

    pub fn rel(rel: T) -> Self {
        Self::new(T::zero(), rel)
    }
}

fn kronrod<T: Real, F: FnMut(T) -> T>(f: &mut F, a: T, b: T) -> (T, T) {
    let half = (b - a) * T::lit(0.5);
    let center = (a + b) * T::lit(0.5);
    let fc = f(center);
    let mut resk = fc * T::lit(WGK[7]);
    let mut resg = fc * T::lit(WG[3]);
    for j in 0..7 {
        let dx = half * T::lit(XGK[j]);
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        resk = resk + (f1 + f2) * T::lit(WGK[j]);
        if j % 2 == 1 {
            resg = resg + (f1 + f2) * T::lit(WG[j / 2]);
        }
    }
    let value = resk * half;
    let err = ((resk - resg) * half).abs();
    (value, err)
}

/// Adaptive Gauss-Kronrod on a finite interval `[a, b]`.
pub fn integrate<T: Real, F: FnMut(T) -> T>(mut f: F, a: T, b: T, tol: Tolerance<T>) -> Quad<T> {
    if a == b {
        return Quad::zero();
    }
    let (v, e) = kronrod(&mut f, a, b);
    let mut pieces = vec![(a, b, v, e)];
    let mut evaluations = 15;
    loop {
        let total: T = pieces.iter().map(|p| p.2).sum();
        let err: T = pieces.iter().map(|p| p.3).sum();
        let target = tol.abs.max(tol.rel * total.abs());
        let converged = err <= target;
        if converged || pieces.len() >= tol.max_intervals || !err.is_finite() {
            return Quad { value: total, error: err, evaluations, converged: converged && err.is_finite() };
        }
        let (idx, _) = pieces
            .iter()
            .enumerate()
            .fold((0, T::neg_infinity()), |acc, (i, p)| if p.3 > acc.1 { (i, p.3) } else { acc });
        let (lo, hi, _, _) = pieces.swap_remove(idx);
        let mid = (lo + hi) * T::lit(0.5);
        if mid <= lo || mid >= hi {
            // interval can no longer be split at this precision
            return Quad { value: total, error: err, evaluations, converged: false };
        }
        let (v1, e1) = kronrod(&mut f, lo, mid);
        let (v2, e2) = kronrod(&mut f, mid, hi);
        evaluations += 30;
        pieces.push((lo, mid, v1, e1));
        pieces.push((mid, hi, v2, e2));
    }
}

/// Integrates over consecutive panels `points[0]..points[1]..`, each adaptively.
pub fn integrate_panels<T: Real, F: FnMut(T) -> T>(mut f: F, points: &[T], tol: Tolerance<T>) -> Quad<T> {
    points
        .windows(2)
        .map(|w| integrate(&mut f, w[0], w[1], tol))
        .fold(Quad::zero(), Quad::add)
}

/// Integrates over `[a, inf)` with the map `x = a + scale * t / (1 - t)`.
pub fn integrate_to_infinity<T: Real, F: FnMut(T) -> T>(mut f: F, a: T, scale: T, tol: Tolerance<T>) -> Quad<T> {
    let one = T::one();
    integrate(
        |t: T| {
            let s = one - t;
            let x = a + scale * t / s;
            let jac = scale / (s * s);
            let y = f(x) * jac;
            if y.is_finite() { y } else { T::zero() }
        },
        T::zero(),
        one,
        tol,
    )
}

/// Tanh-sinh (double exponential) quadrature on `[a, b]`. The integrand is
/// evaluated through the distance to the nearer endpoint, so integrable
/// endpoint singularities never see `x = a` or `x = b`.
///
/// `f` receives `(x, distance_from_a, distance_from_b)`.
pub fn tanh_sinh<T: Real, F: FnMut(T, T, T) -> T>(mut f: F, a: T, b: T, rel_tol: T) -> Quad<T> {
    let half_len = (b - a) * T::lit(0.5);
    let pi_2 = T::FRAC_PI_2();
    let mut h = T::one();
    let t_max = T::lit(6.5);
    let mut evaluations = 0usize;
    let node = |t: T| {
        let u = pi_2 * t.sinh();
        let w = pi_2 * t.cosh() / (u.cosh() * u.cosh());
        // distance from the nearer endpoint, scaled by half_len
        let d = T::lit(2.0) / (T::one() + (T::lit(2.0) * u.abs()).exp());
        (w, d)
    };
    let mut sum = {
        let (w0, _) = node(T::zero());
        evaluations += 1;
        w0 * f((a + b) * T::lit(0.5), half_len, half_len)
    };
    let mut k = 1usize;
    loop {
        let t = h * T::count(k);
        if t > t_max {
            break;
        }
        let (w, d) = node(t);
        let dist = half_len * d;
        if dist <= T::zero() {
            break;
        }
        let far = b - a - dist;
        sum = sum + w * (f(a + dist, dist, far) + f(b - dist, far, dist));
        evaluations += 2;
        k += 1;
    }
    let mut estimate = sum * h * half_len;
    let mut error = estimate.abs();
    for _level in 0..8 {
        h = h * T::lit(0.5);
        let mut k = 1usize;
        let mut add = T::zero();
        loop {
            let t = h * T::count(k);
            if t > t_max {
                break;
            }
            let (w, d) = node(t);
            let dist = half_len * d;
            if dist > T::zero() {
                let far = b - a - dist;
                add = add + w * (f(a + dist, dist, far) + f(b - dist, far, dist));
                evaluations += 2;
            }
            k += 2;
        }
        sum = sum + add;
        let next = sum * h * half_len;
        error = (next - estimate).abs();
        estimate = next;
        if error <= rel_tol * estimate.abs() {
            return Quad { value: estimate, error, evaluations, converged: true };
        }
    }
    Quad { value: estimate, error, evaluations, converged: false }
}

/// 8-point Gauss-Legendre nodes and weights on `[-1, 1]`.
pub const GL8_NODES: [f64; 8] = [
    -0.960_289_856_497_536_3,
    -0.796_666_477_413_626_7,
    -0.525_532_409_916_329_0,
    -0.183_434_642_495_649_8,
    0.183_434_642_495_649_8,
    0.525_532_409_916_329_0,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
pub const GL8_WEIGHTS: [f64; 8] = [
    0.101_228_536_290_376_3,
    0.222_381_034_453_374_5,
    0.313_706_645_877_887_3,
    0.362_683_783_378_362_0,
    0.362_683_783_378_362_0,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

/// Fixed 8-point Gauss-Legendre on `[a, b]` (exact for degree <= 15).
pub fn gauss_legendre8<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64) -> f64 {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    GL8_NODES
        .iter()
        .zip(GL8_WEIGHTS.iter())
        .map(|(x, w)| w * f(mid + half * x))
        .sum::<f64>()
        * half
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let q = integrate(|x: f64| x * x * x - 2.0 * x, 0.0, 2.0, Tolerance::rel(1e-14));
        assert!((q.value - 0.0).abs() < 1e-13);
        assert!(q.converged);
        assert!((gauss_legendre8(|x| x.powi(15) + 1.0, 0.0, 1.0) - (1.0 / 16.0 + 1.0)).abs() < 1e-14);
    }

    #[test]
    fn semi_infinite_exponential() {
        let q = integrate_to_infinity(|x: f64| (-x).exp(), 0.0, 1.0, Tolerance::rel(1e-12));
        assert!((q.value - 1.0).abs() < 1e-11, "{q:?}");
    }

    #[test]
    fn tanh_sinh_handles_endpoint_singularity() {
        // int_0^1 x^{-1/2} dx = 2
        let q = tanh_sinh(|x: f64, _da, _db| x.powf(-0.5), 0.0, 1.0, 1e-12);
        assert!((q.value - 2.0).abs() < 1e-10, "{q:?}");
        // int_0^1 ln x dx = -1, using the endpoint distance
        let q = tanh_sinh(|_x: f64, da: f64, _db| da.ln(), 0.0, 1.0, 1e-12);
        assert!((q.value + 1.0).abs() < 1e-10, "{q:?}");
    }

    #[test]
    fn works_in_f32() {
        let q = integrate(|x: f32| x.sin(), 0.0, std::f32::consts::PI, Tolerance::rel(1e-5));
        assert!((q.value - 2.0).abs() < 1e-4);
    }
}

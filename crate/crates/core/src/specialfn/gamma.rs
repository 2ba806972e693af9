use crate::error::{domain, Error, Result};
use crate::scalar::Real;

use super::{is_nonpositive_integer, sin_pi};

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

// zeta(k) - 1 for k = 2..=40
const ZETA_MINUS_ONE: [f64; 39] = [
    6.44934066848226406e-01,
    2.02056903159594292e-01,
    8.23232337111381857e-02,
    3.69277551433699266e-02,
    1.73430619844491402e-02,
    8.34927738192282713e-03,
    4.07735619794433960e-03,
    2.00839282608221426e-03,
    9.94575127818085256e-04,
    4.94188604119464529e-04,
    2.46086553308048320e-04,
    1.22713347578489145e-04,
    6.12481350587048277e-05,
    3.05882363070204933e-05,
    1.52822594086518710e-05,
    7.63719763789976257e-06,
    3.81729326499984022e-06,
    1.90821271655393897e-06,
    9.53962033872796212e-07,
    4.76932986787806447e-07,
    2.38450502727733004e-07,
    1.19219925965311064e-07,
    5.96081890512594801e-08,
    2.98035035146522793e-08,
    1.49015548283650427e-08,
    7.45071178983543006e-09,
    3.72533402478845728e-09,
    1.86265972351304914e-09,
    9.31327432419668166e-10,
    4.65662906503378366e-10,
    2.32831183367650534e-10,
    1.16415501727005193e-10,
    5.82077208790270145e-11,
    2.91038504449710001e-11,
    1.45519218910419849e-11,
    7.27595983505748180e-12,
    3.63797954737865086e-12,
    1.81898965030706607e-12,
    9.09494784026388841e-13,
];

// B_{2k} / (2k (2k-1)) for the Stirling series, k = 1..=8
const STIRLING: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
];

/// ln Gamma(1 + e) for |e| <= 1/2, from the zeta series
/// ln Gamma(1+e) = -ln(1+e) + e(1-gamma) + sum_k (-1)^k (zeta(k)-1) e^k / k.
fn ln_gamma_1p<T: Real>(e: T) -> T {
    let mut sum = T::zero();
    let mut pow = -e;
    for (i, z) in ZETA_MINUS_ONE.iter().enumerate() {
        pow = -pow * e;
        let k = i + 2;
        let term = T::lit(*z) * pow / T::count(k);
        sum = sum + term;
        if term.abs() < T::epsilon() * T::lit(1e-3) * sum.abs().max(e.abs()) {
            break;
        }
    }
    sum + e * (T::one() - T::lit(EULER_GAMMA)) - e.ln_1p()
}

fn stirling<T: Real>(x: T) -> T {
    let half_ln_2pi = T::lit(0.918_938_533_204_672_7);
    let inv = x.recip();
    let inv2 = inv * inv;
    let mut corr = T::zero();
    let mut p = inv;
    for c in STIRLING {
        corr = corr + T::lit(c) * p;
        p = p * inv2;
    }
    (x - T::lit(0.5)) * x.ln() - x + half_ln_2pi + corr
}

/// ln Gamma(x) for x > 0.
pub fn log_gamma<T: Real>(x: T) -> Result<T> {
    if !(x > T::zero()) || !x.is_finite() {
        return Err(domain(format!("log_gamma requires x > 0, got {x}")));
    }
    Ok(log_gamma_pos(x))
}

pub(crate) fn log_gamma_pos<T: Real>(x: T) -> T {
    let half = T::lit(0.5);
    let one = T::one();
    if x < half {
        return ln_gamma_1p(x) - x.ln();
    }
    if x < T::lit(1.5) {
        return ln_gamma_1p(x - one);
    }
    if x < T::lit(2.5) {
        let e = x - T::lit(2.0);
        return e.ln_1p() + ln_gamma_1p(e);
    }
    if x >= T::lit(10.0) {
        return stirling(x);
    }
    let mut shifted = x;
    let mut prod = one;
    while shifted < T::lit(10.0) {
        prod = prod * shifted;
        shifted = shifted + one;
    }
    stirling(shifted) - prod.ln()
}

/// ln |Gamma(x)| and the sign of Gamma(x), for any real x off the poles.
pub fn ln_gamma_signed<T: Real>(x: T) -> Result<(T, T)> {
    if x.is_nan() {
        return Err(domain("ln_gamma_signed of NaN"));
    }
    if x > T::zero() {
        return Ok((log_gamma_pos(x), T::one()));
    }
    if is_nonpositive_integer(x) {
        return Err(Error::Pole(format!("Gamma has a pole at {x}")));
    }
    // Gamma(x) Gamma(1-x) = pi / sin(pi x)
    let s = sin_pi(x);
    let ln_abs = T::PI().ln() - s.abs().ln() - log_gamma_pos(T::one() - x);
    Ok((ln_abs, s.signum()))
}

/// Rising factorial (q)_n = q (q+1) ... (q+n-1), with (q)_0 = 1.
pub fn pochhammer<T: Real>(q: T, n: u32) -> T {
    if n <= 256 {
        let mut p = T::one();
        for i in 0..n {
            p = p * (q + T::count(i as usize));
        }
        return p;
    }
    match ln_pochhammer_signed(q, n) {
        (_, s) if s == T::zero() => T::zero(),
        (l, s) => s * l.exp(),
    }
}

/// ln |(q)_n| and its sign. The sign is 0 when the product vanishes.
pub fn ln_pochhammer_signed<T: Real>(q: T, n: u32) -> (T, T) {
    if n == 0 {
        return (T::zero(), T::one());
    }
    if is_nonpositive_integer(q) && T::count(n as usize) > -q {
        return (T::neg_infinity(), T::zero());
    }
    if n <= 64 {
        let mut l = T::zero();
        let mut s = T::one();
        for i in 0..n {
            let f = q + T::count(i as usize);
            l = l + f.abs().ln();
            if f < T::zero() {
                s = -s;
            }
        }
        return (l, s);
    }
    let end = q + T::count(n as usize);
    // both arguments are off the poles here
    let (l1, s1) = ln_gamma_signed(end).expect("pole excluded above");
    let (l0, s0) = ln_gamma_signed(q).expect("pole excluded above");
    (l1 - l0, s1 * s0)
}

/// Digamma function, used by the Bessel K series. Accurate for x > 0.
pub fn digamma<T: Real>(x: T) -> T {
    let mut x = x;
    let mut acc = T::zero();
    while x < T::lit(12.0) {
        acc = acc - x.recip();
        x = x + T::one();
    }
    let inv2 = (x * x).recip();
    // asymptotic: ln x - 1/(2x) - sum B_{2k} / (2k x^{2k})
    let series = inv2
        * (T::lit(1.0 / 12.0)
            - inv2 * (T::lit(1.0 / 120.0) - inv2 * (T::lit(1.0 / 252.0) - inv2 * (T::lit(1.0 / 240.0) - inv2 * (T::lit(1.0 / 132.0) - inv2 * T::lit(691.0 / 32760.0))))));
    acc + x.ln() - T::lit(0.5) / x - series
}

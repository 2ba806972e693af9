use std::fmt;
use std::sync::Arc;

use rand::Rng;
use rand_distr::{Distribution, Gamma};

use crate::error::{domain, Error, Result};
use crate::quad::{gauss_legendre8, integrate, Tolerance};

/// Uniform draw on the open interval (0, 1).
#[inline]
pub(crate) fn open01<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

/// The shape parameter rho_a of a Beta(rho_a, a) stick law, as a function of a.
#[derive(Clone)]
pub enum RhoFn {
    /// rho_a = a^gamma with 0 < gamma < 1.
    Power { gamma: f64 },
    /// rho_a = rho, independent of a.
    Constant { rho: f64 },
    /// Caller-provided map a -> rho_a > 0.
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl RhoFn {
    pub fn eval(&self, a: f64) -> f64 {
        match self {
            RhoFn::Power { gamma } => a.powf(*gamma),
            RhoFn::Constant { rho } => *rho,
            RhoFn::Custom(f) => f(a),
        }
    }

    /// Exponent k_p in E[v^p] ~ C_p a^{-k_p}, when known.
    fn k_exponent(&self, p: u32) -> Option<f64> {
        match self {
            RhoFn::Power { gamma } => Some(p as f64 * (1.0 - gamma)),
            RhoFn::Constant { .. } => Some(p as f64),
            RhoFn::Custom(_) => None,
        }
    }
}

impl fmt::Debug for RhoFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RhoFn::Power { gamma } => write!(f, "Power {{ gamma: {gamma} }}"),
            RhoFn::Constant { rho } => write!(f, "Constant {{ rho: {rho} }}"),
            RhoFn::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

/// A piecewise-linear density on [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedDensity {
    grid: Vec<f64>,
    values: Vec<f64>,
    /// CDF at the grid points.
    cdf: Vec<f64>,
}

impl TabulatedDensity {
    /// Validates grid and values: grid strictly increasing from 0 to 1,
    /// values nonnegative, trapezoid integral within 1e-8 of 1.
    pub fn new(grid: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if grid.len() < 2 || grid.len() != values.len() {
            return Err(domain("density table needs matching grid and values with at least 2 points"));
        }
        if grid[0] != 0.0 || *grid.last().unwrap() != 1.0 || grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(domain("density table grid must increase strictly from 0 to 1"));
        }
        if values.iter().any(|v| !(*v >= 0.0) || !v.is_finite()) {
            return Err(domain("density table values must be finite and nonnegative"));
        }
        let mut cdf = Vec::with_capacity(grid.len());
        cdf.push(0.0);
        for i in 1..grid.len() {
            let m = 0.5 * (values[i] + values[i - 1]) * (grid[i] - grid[i - 1]);
            cdf.push(cdf[i - 1] + m);
        }
        let total = *cdf.last().unwrap();
        if (total - 1.0).abs() > 1e-8 {
            return Err(domain(format!("density table integrates to {total}, not 1 (tolerance 1e-8)")));
        }
        Ok(TabulatedDensity { grid, values, cdf })
    }

    /// Tabulates `ln_pdf` on an `n`-point uniform grid over [0, 1] and
    /// normalizes the piecewise-linear interpolant to unit mass.
    pub fn from_log_pdf<F: Fn(f64) -> f64>(ln_pdf: F, n: usize) -> Result<Self> {
        let n = n.max(2);
        let grid: Vec<f64> = (0..n).map(|i| i as f64 / (n - 1) as f64).collect();
        let logs: Vec<f64> = grid.iter().map(|&x| ln_pdf(x)).collect();
        let peak = logs.iter().cloned().filter(|l| l.is_finite()).fold(f64::NEG_INFINITY, f64::max);
        if !peak.is_finite() {
            return Err(domain("density table log-pdf is nowhere finite"));
        }
        let mut values: Vec<f64> = logs.iter().map(|l| if l.is_finite() { (l - peak).exp() } else { 0.0 }).collect();
        let total: f64 = (1..n).map(|i| 0.5 * (values[i] + values[i - 1]) * (grid[i] - grid[i - 1])).sum();
        values.iter_mut().for_each(|v| *v /= total);
        Self::new(grid, values)
    }

    /// Beta(alpha, beta) tabulated on `n` points.
    pub fn beta(alpha: f64, beta: f64, n: usize) -> Result<Self> {
        Self::from_log_pdf(|x| (alpha - 1.0) * x.ln() + (beta - 1.0) * (-x).ln_1p(), n)
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn pdf(&self, x: f64) -> f64 {
        if !(0.0..=1.0).contains(&x) {
            return 0.0;
        }
        let i = self.grid.partition_point(|g| *g <= x).clamp(1, self.grid.len() - 1);
        let (x0, x1) = (self.grid[i - 1], self.grid[i]);
        let t = (x - x0) / (x1 - x0);
        self.values[i - 1] + t * (self.values[i] - self.values[i - 1])
    }

    pub fn moment(&self, p: u32) -> f64 {
        (1..self.grid.len())
            .map(|i| {
                let (x0, x1) = (self.grid[i - 1], self.grid[i]);
                let (f0, f1) = (self.values[i - 1], self.values[i]);
                gauss_legendre8(|x| x.powi(p as i32) * (f0 + (x - x0) / (x1 - x0) * (f1 - f0)), x0, x1)
            })
            .sum()
    }

    /// Exact inverse of the piecewise-quadratic CDF.
    pub fn quantile(&self, u: f64) -> f64 {
        let total = *self.cdf.last().unwrap();
        let target = u * total;
        let i = self.cdf.partition_point(|c| *c < target).clamp(1, self.grid.len() - 1);
        let (x0, x1) = (self.grid[i - 1], self.grid[i]);
        let (f0, f1) = (self.values[i - 1], self.values[i]);
        let h = x1 - x0;
        let r = target - self.cdf[i - 1];
        // mass on [x0, x0 + s] is f0 s + (f1 - f0) s^2 / (2h)
        let slope = (f1 - f0) / h;
        let s = if slope.abs() < 1e-300 {
            if f0 > 0.0 { r / f0 } else { 0.0 }
        } else {
            let disc = (f0 * f0 + 2.0 * slope * r).max(0.0);
            // stable root of (slope/2) s^2 + f0 s - r = 0
            2.0 * r / (f0 + disc.sqrt())
        };
        (x0 + s.clamp(0.0, h)).clamp(0.0, 1.0)
    }
}

/// How the table of a density-table family is obtained.
#[derive(Clone)]
pub enum TableSource {
    /// One table used for every a.
    Fixed(Arc<TabulatedDensity>),
    /// A table generated for each a (for families whose law depends on a).
    PerA(Arc<dyn Fn(f64) -> Result<TabulatedDensity> + Send + Sync>),
}

impl fmt::Debug for TableSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TableSource::Fixed(t) => write!(f, "Fixed({} points)", t.grid.len()),
            TableSource::PerA(_) => f.write_str("PerA(..)"),
        }
    }
}

/// Law of iid stick fractions, possibly depending on the concentration a.
#[derive(Debug, Clone)]
pub enum IidFamily {
    /// Beta(1, a).
    BetaOneA,
    /// Beta(rho_a, a).
    BetaRhoA(RhoFn),
    /// v = sum_l t_l u_l with independent u_l ~ Beta(1, a^{r_l}).
    BetaLinearCombo { t: Vec<f64>, r: Vec<f64> },
    /// Piecewise-constant density with b = 1/a and g(b) = exp(-b^{-epsilon}):
    /// (1 - g)/b on (0, b], g/(1 - b) on (b, 1].
    PiecewiseFb { epsilon: f64 },
    /// Piecewise-linear tabulated density.
    DensityTable(TableSource),
}

impl IidFamily {
    pub fn beta_rho_power(gamma: f64) -> Self {
        IidFamily::BetaRhoA(RhoFn::Power { gamma })
    }

    pub fn density_table(grid: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        Ok(IidFamily::DensityTable(TableSource::Fixed(Arc::new(TabulatedDensity::new(grid, values)?))))
    }

    pub fn density_table_fn<F>(f: F) -> Self
    where
        F: Fn(f64) -> Result<TabulatedDensity> + Send + Sync + 'static,
    {
        IidFamily::DensityTable(TableSource::PerA(Arc::new(f)))
    }

    /// Beta(a, a) tabulated per a; the standard family violating the
    /// vanishing-ratio condition.
    pub fn beta_a_a_table(points: usize) -> Self {
        Self::density_table_fn(move |a| TabulatedDensity::beta(a, a, points))
    }

    pub fn name(&self) -> &'static str {
        match self {
            IidFamily::BetaOneA => "beta_one_a",
            IidFamily::BetaRhoA(_) => "beta_rho_a",
            IidFamily::BetaLinearCombo { .. } => "beta_linear_combo",
            IidFamily::PiecewiseFb { .. } => "piecewise_fb",
            IidFamily::DensityTable(_) => "density_table",
        }
    }

    /// Checks the parameter invariants that do not depend on a.
    pub fn validate(&self) -> Result<()> {
        match self {
            IidFamily::BetaOneA => Ok(()),
            IidFamily::BetaRhoA(RhoFn::Power { gamma }) if !(*gamma > 0.0 && *gamma < 1.0) => {
                Err(domain(format!("rho_a = a^gamma needs 0 < gamma < 1, got {gamma}")))
            }
            IidFamily::BetaRhoA(RhoFn::Constant { rho }) if !(*rho > 0.0) => {
                Err(domain(format!("constant rho must be positive, got {rho}")))
            }
            IidFamily::BetaRhoA(_) => Ok(()),
            IidFamily::BetaLinearCombo { t, r } => {
                if t.is_empty() || t.len() != r.len() {
                    return Err(domain("linear combination needs matching, nonempty t and r"));
                }
                if t.iter().chain(r).any(|x| !(*x > 0.0) || !x.is_finite()) {
                    return Err(domain("linear combination weights and exponents must be positive"));
                }
                let s: f64 = t.iter().sum();
                if (s - 1.0).abs() > 1e-12 {
                    return Err(domain(format!("linear combination weights sum to {s}, not 1")));
                }
                Ok(())
            }
            IidFamily::PiecewiseFb { epsilon } if !(*epsilon > 0.0 && epsilon.is_finite()) => {
                Err(domain(format!("piecewise f_b needs epsilon > 0, got {epsilon}")))
            }
            IidFamily::PiecewiseFb { .. } | IidFamily::DensityTable(_) => Ok(()),
        }
    }

    /// Prepares the family at a given a.
    pub fn at(&self, a: f64) -> Result<IidLaw> {
        self.validate()?;
        if !(a > 0.0) || !a.is_finite() {
            return Err(domain(format!("concentration a must be positive, got {a}")));
        }
        Ok(match self {
            IidFamily::BetaOneA => IidLaw::BetaOneA { a },
            IidFamily::BetaRhoA(rho) => {
                let r = rho.eval(a);
                if !(r > 0.0) || !r.is_finite() {
                    return Err(domain(format!("rho_a({a}) = {r} is not positive")));
                }
                IidLaw::Beta { alpha: r, beta: a, x: Gamma::new(r, 1.0).unwrap(), y: Gamma::new(a, 1.0).unwrap() }
            }
            IidFamily::BetaLinearCombo { t, r } => {
                IidLaw::LinearCombo { t: t.clone(), shape: r.iter().map(|ri| a.powf(*ri)).collect() }
            }
            IidFamily::PiecewiseFb { epsilon } => {
                if !(a > 1.0) {
                    return Err(domain(format!("piecewise f_b uses b = 1/a and needs a > 1, got {a}")));
                }
                let b = 1.0 / a;
                IidLaw::Piecewise { b, g: (-b.powf(-epsilon)).exp() }
            }
            IidFamily::DensityTable(TableSource::Fixed(t)) => IidLaw::Table(t.clone()),
            IidFamily::DensityTable(TableSource::PerA(f)) => IidLaw::Table(Arc::new(f(a)?)),
        })
    }

    /// Known exponent k_p with E[v^p] ~ C_p a^{-k_p}.
    pub fn k_exponent(&self, p: u32) -> Option<f64> {
        match self {
            IidFamily::BetaOneA | IidFamily::PiecewiseFb { .. } => Some(p as f64),
            IidFamily::BetaRhoA(rho) => rho.k_exponent(p),
            IidFamily::BetaLinearCombo { r, .. } => Some(p as f64 * r.iter().cloned().fold(f64::INFINITY, f64::min)),
            IidFamily::DensityTable(_) => None,
        }
    }
}

/// An iid stick law at a fixed a, ready for sampling and moments.
#[derive(Debug, Clone)]
pub enum IidLaw {
    BetaOneA { a: f64 },
    Beta { alpha: f64, beta: f64, x: Gamma<f64>, y: Gamma<f64> },
    LinearCombo { t: Vec<f64>, shape: Vec<f64> },
    Piecewise { b: f64, g: f64 },
    Table(Arc<TabulatedDensity>),
}

fn beta_moment(alpha: f64, beta: f64, p: u32) -> f64 {
    (0..p).map(|i| (alpha + i as f64) / (alpha + beta + i as f64)).product()
}

/// Calls `f` with every composition (q_1, ..., q_s) of p into s nonnegative parts.
fn for_each_composition(p: u32, s: usize, f: &mut dyn FnMut(&[u32])) {
    fn rec(rem: u32, idx: usize, q: &mut Vec<u32>, f: &mut dyn FnMut(&[u32])) {
        if idx + 1 == q.len() {
            q[idx] = rem;
            f(q);
            return;
        }
        for k in 0..=rem {
            q[idx] = k;
            rec(rem - k, idx + 1, q, f);
        }
    }
    let mut q = vec![0; s];
    rec(p, 0, &mut q, f);
}

impl IidLaw {
    /// E[v^p].
    pub fn moment(&self, p: u32) -> f64 {
        match self {
            IidLaw::BetaOneA { a } => beta_moment(1.0, *a, p),
            IidLaw::Beta { alpha, beta, .. } => beta_moment(*alpha, *beta, p),
            IidLaw::LinearCombo { t, shape } => {
                let mut total = 0.0;
                let ln_pf: f64 = (1..=p).map(|k| (k as f64).ln()).sum();
                for_each_composition(p, t.len(), &mut |q| {
                    let mut ln_coef = ln_pf;
                    let mut prod = 1.0;
                    for (l, &ql) in q.iter().enumerate() {
                        ln_coef -= (1..=ql).map(|k| (k as f64).ln()).sum::<f64>();
                        prod *= t[l].powi(ql as i32) * beta_moment(1.0, shape[l], ql);
                    }
                    total += ln_coef.exp() * prod;
                });
                total
            }
            IidLaw::Piecewise { b, g } => {
                let pf = (p + 1) as f64;
                // (1 - g) b^p / (p+1) + g (1 - b^{p+1}) / ((1 - b)(p+1))
                let geometric: f64 = (0..=p).map(|i| b.powi(i as i32)).sum();
                ((1.0 - g) * b.powi(p as i32) + g * geometric) / pf
            }
            IidLaw::Table(t) => t.moment(p),
        }
    }

    /// E[v^p] by adaptive quadrature of the density, as an independent check.
    pub fn moment_quadrature(&self, p: u32) -> Result<f64> {
        let tol = Tolerance::new(1e-13, 1e-12);
        let pw = |x: f64| x.powi(p as i32);
        let q = match self {
            IidLaw::Piecewise { b, g } => {
                let lo = integrate(|x| pw(x) * (1.0 - g) / b, 0.0, *b, tol);
                let hi = integrate(|x| pw(x) * g / (1.0 - b), *b, 1.0, tol);
                lo.value + hi.value
            }
            IidLaw::Table(t) => {
                let g = t.grid();
                crate::quad::integrate_panels(|x| pw(x) * t.pdf(x), g, tol).value
            }
            IidLaw::BetaOneA { a } => {
                crate::quad::tanh_sinh(|x, _, d1| pw(x) * a * ((a - 1.0) * d1.ln()).exp(), 0.0, 1.0, 1e-13).value
            }
            _ => return Err(Error::Unsupported("quadrature moment only for beta_one_a, piecewise and table laws".into())),
        };
        Ok(q)
    }

    /// One draw, returned as (v, ln(1 - v)).
    #[inline]
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> (f64, f64) {
        match self {
            IidLaw::BetaOneA { a } => {
                let l = open01(rng).ln() / a;
                (-l.exp_m1(), l)
            }
            IidLaw::Beta { x, y, .. } => {
                let gx = x.sample(rng);
                let gy = y.sample(rng);
                let s = gx + gy;
                if s == 0.0 {
                    return (0.5, -std::f64::consts::LN_2);
                }
                (gx / s, gy.ln() - s.ln())
            }
            IidLaw::LinearCombo { t, shape } => {
                let v: f64 = t.iter().zip(shape).map(|(tl, sh)| tl * -(open01(rng).ln() / sh).exp_m1()).sum();
                (v, (-v).ln_1p())
            }
            IidLaw::Piecewise { b, g } => {
                let u = open01(rng);
                let v = if u < 1.0 - g { b * u / (1.0 - g) } else { b + (1.0 - b) * (u - (1.0 - g)) / g };
                (v, (-v).ln_1p())
            }
            IidLaw::Table(tab) => {
                let v = tab.quantile(open01(rng));
                (v, (-v).ln_1p())
            }
        }
    }
}

/// E[v^p] for an iid family at concentration a.
pub fn iid_moment(family: &IidFamily, a: f64, p: u32) -> Result<f64> {
    if p == 0 {
        return Err(domain("iid_moment needs p >= 1"));
    }
    Ok(family.at(a)?.moment(p))
}

/// `count` iid stick fractions.
pub fn sample_iid_sequence<R: Rng + ?Sized>(family: &IidFamily, a: f64, count: usize, rng: &mut R) -> Result<Vec<f64>> {
    if count == 0 {
        return Err(domain("sample_iid_sequence needs count >= 1"));
    }
    let law = family.at(a)?;
    Ok((0..count).map(|_| law.draw(rng).0).collect())
}

//! Exact samplers for the finite-dimensional laws (P(A_1), ..., P(A_n)).

use rand::Rng;
use rand_distr::{Distribution, Gamma, InverseGaussian};

use crate::error::{domain, Error, Result};
use crate::weights::WeightModel;

fn check_simplex(a: f64, h: &[f64]) -> Result<()> {
    if h.is_empty() {
        return Err(domain("partition needs at least one set"));
    }
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::Degenerate(format!("concentration must be positive, got {a}")));
    }
    if let Some(x) = h.iter().find(|&&x| !(a * x > 0.0) || !x.is_finite()) {
        return Err(Error::Degenerate(format!("a * h_j must be positive, got h_j = {x}")));
    }
    let s: f64 = h.iter().sum();
    if (s - 1.0).abs() > 1e-9 {
        return Err(domain(format!("set masses must sum to 1, got {s}")));
    }
    Ok(())
}

fn normalize(mut x: Vec<f64>) -> Vec<f64> {
    let s: f64 = x.iter().sum();
    x.iter_mut().for_each(|v| *v /= s);
    x
}

/// Dirichlet(a h_1, ..., a h_n) from normalized Gamma(a h_j, 1) variables.
pub fn sample_dirichlet_partition<R: Rng + ?Sized>(a: f64, h: &[f64], rng: &mut R) -> Result<Vec<f64>> {
    check_simplex(a, h)?;
    let g: Vec<f64> = h
        .iter()
        .map(|&x| Ok(Gamma::new(a * x, 1.0).map_err(|e| Error::Degenerate(e.to_string()))?.sample(rng)))
        .collect::<Result<_>>()?;
    Ok(normalize(g))
}

/// Normalized inverse Gaussian vector: independent inverse Gaussian masses
/// with Laplace transform exp{-a h_j (sqrt(1 + 2 lambda) - 1)}, i.e. mean
/// a h_j and shape (a h_j)^2, normalized by their sum.
pub fn sample_nig_partition<R: Rng + ?Sized>(a: f64, h: &[f64], rng: &mut R) -> Result<Vec<f64>> {
    check_simplex(a, h)?;
    let g: Vec<f64> = h
        .iter()
        .map(|&x| {
            let m = a * x;
            Ok(InverseGaussian::new(m, m * m).map_err(|e| Error::Degenerate(e.to_string()))?.sample(rng))
        })
        .collect::<Result<_>>()?;
    Ok(normalize(g))
}

/// GDP vector as a superposition: X_i = sum_{j=1}^r G_j^{(i)} with
/// G_j^{(i)} ~ Gamma(shape a h_i, rate j), normalized by sum_i X_i.
pub fn sample_gdp_partition<R: Rng + ?Sized>(a: f64, r: u32, h: &[f64], rng: &mut R) -> Result<Vec<f64>> {
    check_simplex(a, h)?;
    if r == 0 {
        return Err(domain("GDP r must be positive"));
    }
    let g: Vec<f64> = h
        .iter()
        .map(|&x| {
            let gamma = Gamma::new(a * x, 1.0).map_err(|e| Error::Degenerate(e.to_string()))?;
            Ok((1..=r).map(|j| gamma.sample(rng) / j as f64).sum())
        })
        .collect::<Result<_>>()?;
    Ok(normalize(g))
}

/// Which exact finite-dimensional sampler a model admits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FiniteDimSampler {
    Dirichlet { a: f64 },
    Nig { a: f64 },
    Gdp { a: f64, r: u32 },
}

impl FiniteDimSampler {
    pub fn for_model(model: &WeightModel) -> Result<Self> {
        match *model {
            WeightModel::Dp { a } => Ok(FiniteDimSampler::Dirichlet { a }),
            WeightModel::Pdp { a, b } if b == 0.0 => Ok(FiniteDimSampler::Dirichlet { a }),
            WeightModel::Nigp { a } => Ok(FiniteDimSampler::Nig { a }),
            WeightModel::Gdp { a, r } => Ok(FiniteDimSampler::Gdp { a, r }),
            _ => Err(Error::Unsupported(format!("no exact finite-dimensional sampler for {}", model.name()))),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, h: &[f64], rng: &mut R) -> Result<Vec<f64>> {
        match *self {
            FiniteDimSampler::Dirichlet { a } => sample_dirichlet_partition(a, h, rng),
            FiniteDimSampler::Nig { a } => sample_nig_partition(a, h, rng),
            FiniteDimSampler::Gdp { a, r } => sample_gdp_partition(a, r, h, rng),
        }
    }
}

/// (P(A_1), ..., P(A_n)) for a partition with H-masses `h`, drawn exactly.
pub fn sample_partition<R: Rng + ?Sized>(model: &WeightModel, h: &[f64], rng: &mut R) -> Result<Vec<f64>> {
    FiniteDimSampler::for_model(model)?.sample(h, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    #[test]
    fn draws_land_on_the_simplex() {
        let h = [0.2, 0.3, 0.5];
        for k in 0..200 {
            let mut rng = stream(4, k);
            for x in [
                sample_dirichlet_partition(3.0, &h, &mut rng).unwrap(),
                sample_nig_partition(3.0, &h, &mut rng).unwrap(),
                sample_gdp_partition(3.0, 3, &h, &mut rng).unwrap(),
            ] {
                assert!((x.iter().sum::<f64>() - 1.0).abs() < 1e-12);
                assert!(x.iter().all(|&v| v >= 0.0));
            }
        }
    }

    #[test]
    fn degenerate_inputs() {
        let mut rng = stream(0, 0);
        assert!(matches!(sample_dirichlet_partition(1.0, &[0.0, 1.0], &mut rng), Err(Error::Degenerate(_))));
        assert!(sample_nig_partition(1.0, &[0.3, 0.3], &mut rng).is_err());
        assert!(sample_partition(&WeightModel::nggp(0.5, 1.0).unwrap(), &[1.0], &mut rng).is_err());
    }
}

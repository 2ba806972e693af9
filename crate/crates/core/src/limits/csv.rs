//! CSV tables consumed by the plotting scripts. Callers prepend the
//! `#`-comment header block.

use std::io::{Result, Write};

use super::experiments::Report;
use crate::specialfn::kolmogorov_cdf;

fn covariance_rows<W: Write>(report: &Report, mut out: W, head: &str, with_stderr: bool, one_based: bool) -> Result<()> {
    writeln!(out, "{head}")?;
    for p in &report.points {
        let d = p.labels.len();
        for i in 0..d {
            for j in 0..d {
                let (li, lj) = if one_based { ((i + 1) as f64, (j + 1) as f64) } else { (p.labels[i], p.labels[j]) };
                let (e, t) = (p.emp_cov[i][j], p.target_cov[i][j]);
                write!(out, "{},{li},{lj},{e},{t},{}", p.a, (e - t).abs())?;
                if with_stderr {
                    write!(out, ",{}", p.cov_stderr[i][j])?;
                }
                writeln!(out)?;
            }
        }
    }
    Ok(())
}

/// `a,i,j,emp_cov,target_cov,abs_err,mc_stderr` with 1-based set indices.
pub fn write_clt_csv<W: Write>(report: &Report, out: W) -> Result<()> {
    covariance_rows(report, out, "a,i,j,emp_cov,target_cov,abs_err,mc_stderr", true, true)
}

/// Per-replicate standardized masses: `a,rep,i,value`.
pub fn write_clt_samples_csv<W: Write>(report: &Report, mut out: W) -> Result<()> {
    writeln!(out, "a,rep,i,value")?;
    for p in &report.points {
        for (r, row) in p.samples.iter().enumerate() {
            for (i, v) in row.iter().enumerate() {
                writeln!(out, "{},{r},{},{v}", p.a, i + 1)?;
            }
        }
    }
    Ok(())
}

/// `a,grid_u_i,grid_u_j,emp_cov,target_cov,abs_err`.
pub fn write_fclt_csv<W: Write>(report: &Report, out: W) -> Result<()> {
    covariance_rows(report, out, "a,grid_u_i,grid_u_j,emp_cov,target_cov,abs_err", false, false)
}

/// `a,rep,sup_value,grid_sup_value`: sup |Q| per replicate.
pub fn write_sup_csv<W: Write>(report: &Report, mut out: W) -> Result<()> {
    writeln!(out, "a,rep,sup_value,grid_sup_value")?;
    for p in &report.points {
        for (r, (s, g)) in p.sup_values.iter().zip(&p.grid_sup_values).enumerate() {
            writeln!(out, "{},{r},{s},{g}", p.a)?;
        }
    }
    Ok(())
}

/// `x,cdf` of the Kolmogorov law on `points` equispaced abscissae in (0, 3].
pub fn write_kolmogorov_csv<W: Write>(points: usize, mut out: W) -> Result<()> {
    writeln!(out, "x,cdf")?;
    for k in 1..=points {
        let x = 3.0 * k as f64 / points as f64;
        writeln!(out, "{x},{}", kolmogorov_cdf(x))?;
    }
    Ok(())
}

/// `n,a,median_abs_dev,p95_abs_dev,sup_median`.
pub fn write_lln_csv<W: Write>(report: &Report, mut out: W) -> Result<()> {
    writeln!(out, "n,a,median_abs_dev,p95_abs_dev,sup_median")?;
    for p in &report.lln_points {
        writeln!(out, "{},{},{},{},{}", p.n, p.a, p.median_abs_dev, p.p95_abs_dev, p.sup_median)?;
    }
    Ok(())
}

/// `a,s_i,s_j,emp_cov,target_cov,abs_err,mc_stderr`.
pub fn write_quantile_csv<W: Write>(report: &Report, out: W) -> Result<()> {
    covariance_rows(report, out, "a,s_i,s_j,emp_cov,target_cov,abs_err,mc_stderr", true, false)
}

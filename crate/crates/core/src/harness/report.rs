//! Experiment reports and their CSV/JSON emission.
//!
//! CSV cells hold floats with 17 significant digits, so emitting and
//! re-parsing a report reproduces it exactly.

use crate::chebyshev::{curve_to_csv, slice_curve_to_csv, CurvePoint};
use crate::error::{Error, Result};
use crate::optimize::RecoveryResult;
use crate::schedule::CertificateReport;
use crate::spline::PiecewiseLinear;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

/// One sample count of the rate experiment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateRow {
    pub m: usize,
    /// Largest gap between consecutive sites.
    pub h: f64,
    pub n: usize,
    pub mu: f64,
    pub l2_error: f64,
    /// The benchmark `h^s`.
    pub h_pow_s: f64,
    /// `l2_error / h_pow_s`; at or below 1 the recovery beats the benchmark.
    pub ratio: f64,
}

/// Recovery error versus sample count, rows in increasing-m order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateReport {
    pub rows: Vec<RateRow>,
}

impl RateReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("m,h,n,mu,l2_error,h_pow_s,ratio\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{:.16e},{},{:.16e},{:.16e},{:.16e},{:.16e}\n",
                r.m, r.h, r.n, r.mu, r.l2_error, r.h_pow_s, r.ratio
            ));
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        match lines.next() {
            Some("m,h,n,mu,l2_error,h_pow_s,ratio") => {}
            other => {
                return Err(Error::InvalidArgument(format!(
                    "expected the rate-report header, got {other:?}"
                )))
            }
        }
        let mut rows = Vec::new();
        for (i, line) in lines.enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 7 {
                return Err(Error::InvalidArgument(format!(
                    "row {}: expected 7 fields, got {}",
                    i + 2,
                    fields.len()
                )));
            }
            let bad = |e: &dyn std::fmt::Display| {
                Error::InvalidArgument(format!("row {}: {e}", i + 2))
            };
            rows.push(RateRow {
                m: fields[0].trim().parse().map_err(|e| bad(&e))?,
                h: fields[1].trim().parse().map_err(|e| bad(&e))?,
                n: fields[2].trim().parse().map_err(|e| bad(&e))?,
                mu: fields[3].trim().parse().map_err(|e| bad(&e))?,
                l2_error: fields[4].trim().parse().map_err(|e| bad(&e))?,
                h_pow_s: fields[5].trim().parse().map_err(|e| bad(&e))?,
                ratio: fields[6].trim().parse().map_err(|e| bad(&e))?,
            });
        }
        Ok(RateReport { rows })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// The same data solved with and without regularization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareReport {
    pub m: usize,
    pub n: usize,
    /// The scheduled weight used by the regularized arm.
    pub mu: f64,
    pub unregularized: RecoveryResult,
    pub regularized: RecoveryResult,
    pub unregularized_error: f64,
    pub regularized_error: f64,
    /// `unregularized_error / regularized_error`.
    pub ratio: f64,
}

impl CompareReport {
    pub fn to_csv(&self) -> String {
        let mut out =
            String::from("arm,m,n,mu,l2_error,data_term,penalty_term,loss,iterations,converged\n");
        for (arm, mu, res, err) in [
            ("unregularized", 0.0, &self.unregularized, self.unregularized_error),
            ("regularized", self.mu, &self.regularized, self.regularized_error),
        ] {
            out.push_str(&format!(
                "{},{},{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{},{}\n",
                arm,
                self.m,
                self.n,
                mu,
                err,
                res.data_term,
                res.penalty_term,
                res.loss,
                res.iterations,
                res.converged
            ));
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// One noise budget of the noisy experiment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoisyRow {
    pub gamma: f64,
    pub l2_error: f64,
    pub loss: f64,
}

/// Recovery error as the injected noise budget grows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoisyReport {
    pub m: usize,
    pub n: usize,
    pub mu: f64,
    pub tau: f64,
    pub rows: Vec<NoisyRow>,
}

impl NoisyReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("gamma,l2_error,loss\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{:.16e},{:.16e},{:.16e}\n",
                r.gamma, r.l2_error, r.loss
            ));
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Vec<NoisyRow>> {
        let mut lines = text.lines();
        match lines.next() {
            Some("gamma,l2_error,loss") => {}
            other => {
                return Err(Error::InvalidArgument(format!(
                    "expected the noisy-report header, got {other:?}"
                )))
            }
        }
        let mut rows = Vec::new();
        for (i, line) in lines.enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 3 {
                return Err(Error::InvalidArgument(format!(
                    "row {}: expected 3 fields, got {}",
                    i + 2,
                    fields.len()
                )));
            }
            let bad = |e: &dyn std::fmt::Display| {
                Error::InvalidArgument(format!("row {}: {e}", i + 2))
            };
            rows.push(NoisyRow {
                gamma: fields[0].trim().parse().map_err(|e| bad(&e))?,
                l2_error: fields[1].trim().parse().map_err(|e| bad(&e))?,
                loss: fields[2].trim().parse().map_err(|e| bad(&e))?,
            });
        }
        Ok(rows)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Output of a single recovery run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RecoverReport {
    /// Smoothness-ball recovery with its a posteriori certificate
    /// (`None` when the certificate degenerates).
    Sobolev {
        m: usize,
        n: usize,
        mu: f64,
        recovered: PiecewiseLinear,
        result: RecoveryResult,
        certificate: Option<CertificateReport>,
        l2_error: f64,
    },
    /// Finite-class recovery: the winner plus every candidate's descent
    /// result and its error against the target.
    Finite {
        m: usize,
        n: usize,
        best_member: usize,
        recovered: PiecewiseLinear,
        best: RecoveryResult,
        members: Vec<RecoveryResult>,
        l2_errors: Vec<f64>,
    },
}

impl RecoverReport {
    /// The recovered function.
    pub fn recovered(&self) -> &PiecewiseLinear {
        match self {
            RecoverReport::Sobolev { recovered, .. } => recovered,
            RecoverReport::Finite { recovered, .. } => recovered,
        }
    }

    /// CSV form: the recovered function's `knot,coeff` table.
    pub fn to_csv(&self) -> String {
        self.recovered().to_csv()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// The geometry demo's three curves.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChebDemoReport {
    pub resolution: usize,
    /// `(w, radius)` samples of the slice-radius curve; NaN radius marks an
    /// empty slice.
    pub slice: Vec<(f64, f64)>,
    /// For each center ŵ, the radius-vs-ε curve of the inflated sets.
    pub curves: Vec<(f64, Vec<CurvePoint>)>,
}

impl ChebDemoReport {
    pub fn slice_csv(&self) -> String {
        slice_curve_to_csv(&self.slice)
    }

    pub fn curve_csv(&self, index: usize) -> String {
        curve_to_csv(&self.curves[index].1)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }

    /// Write `slice_radius.csv` plus one `inflated_<w>.csv` per curve into
    /// `dir`, returning the paths written.
    pub fn write_to(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        let slice_path = dir.join("slice_radius.csv");
        std::fs::write(&slice_path, self.slice_csv())?;
        written.push(slice_path);
        for (i, (w_hat, _)) in self.curves.iter().enumerate() {
            let path = dir.join(format!("inflated_{w_hat}.csv"));
            std::fs::write(&path, self.curve_csv(i))?;
            written.push(path);
        }
        Ok(written)
    }
}

/// Least-squares slope of `ln y` against `ln x`; inputs must be positive.
pub fn log_log_slope(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::InvalidArgument(
            "slope needs two equal-length series of at least 2 points".into(),
        ));
    }
    if xs.iter().chain(ys.iter()).any(|&v| !(v > 0.0) || !v.is_finite()) {
        return Err(Error::InvalidArgument(
            "log-log regression needs positive finite values".into(),
        ));
    }
    let lx: Vec<f64> = xs.iter().map(|&x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|&y| y.ln()).collect();
    affine_fit(&lx, &ly).map(|(_, slope)| slope)
}

/// Least-squares affine fit `y ≈ a + b x`, returned as `(a, b)`.
pub fn affine_fit(xs: &[f64], ys: &[f64]) -> Result<(f64, f64)> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::InvalidArgument(
            "affine fit needs two equal-length series of at least 2 points".into(),
        ));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    if sxx == 0.0 {
        return Err(Error::InvalidArgument(
            "affine fit needs at least two distinct x values".into(),
        ));
    }
    let slope = sxy / sxx;
    Ok((my - slope * mx, slope))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_rate_report() -> RateReport {
        RateReport {
            rows: vec![
                RateRow {
                    m: 10,
                    h: 0.2168634217299234,
                    n: 20,
                    mu: 0.014677992676220695,
                    l2_error: 0.03177491,
                    h_pow_s: 0.2793540979138477,
                    ratio: 0.11374358718694668,
                },
                RateRow {
                    m: 20,
                    h: 0.10930173403997,
                    n: 40,
                    mu: 0.008237744862210327,
                    l2_error: 0.0112233,
                    h_pow_s: 0.15815418584257436,
                    ratio: 0.07096426949894624,
                },
            ],
        }
    }

    #[test]
    fn rate_report_round_trips_through_csv_exactly() {
        let report = sample_rate_report();
        let back = RateReport::from_csv(&report.to_csv()).unwrap();
        assert_eq!(back, report);
    }

    #[test]
    fn rate_report_round_trips_through_json() {
        let report = sample_rate_report();
        let back = RateReport::from_json(&report.to_json()).unwrap();
        assert_eq!(back, report);
    }

    #[test]
    fn rate_csv_rejects_foreign_headers_and_short_rows() {
        assert!(RateReport::from_csv("m,h\n").is_err());
        assert!(RateReport::from_csv("m,h,n,mu,l2_error,h_pow_s,ratio\n1,2\n").is_err());
    }

    #[test]
    fn noisy_rows_round_trip_through_csv() {
        let report = NoisyReport {
            m: 40,
            n: 80,
            mu: 0.0046232779857433084,
            tau: 0.5,
            rows: vec![
                NoisyRow {
                    gamma: 0.0,
                    l2_error: 0.0112,
                    loss: 0.019,
                },
                NoisyRow {
                    gamma: 0.05,
                    l2_error: 0.023_456_789_012_345_68,
                    loss: 0.031,
                },
            ],
        };
        let back = NoisyReport::from_csv(&report.to_csv()).unwrap();
        assert_eq!(back, report.rows);
    }

    #[test]
    fn log_log_slope_recovers_a_power_law() {
        let xs = [0.2f64, 0.1, 0.05, 0.025];
        let ys: Vec<f64> = xs.iter().map(|&x| 3.0 * x.powf(5.0 / 6.0)).collect();
        let slope = log_log_slope(&xs, &ys).unwrap();
        assert!((slope - 5.0 / 6.0).abs() < 1e-12, "slope {slope}");
        assert!(log_log_slope(&[1.0, -1.0], &[1.0, 1.0]).is_err());
        assert!(log_log_slope(&[1.0], &[1.0]).is_err());
    }

    #[test]
    fn affine_fit_recovers_intercept_and_slope() {
        let xs = [0.0, 0.01, 0.02, 0.03];
        let ys: Vec<f64> = xs.iter().map(|&x| 0.011 + 1.7 * x).collect();
        let (a, b) = affine_fit(&xs, &ys).unwrap();
        assert!((a - 0.011).abs() < 1e-12);
        assert!((b - 1.7).abs() < 1e-10);
        assert!(affine_fit(&[1.0, 1.0], &[0.0, 1.0]).is_err());
    }
}

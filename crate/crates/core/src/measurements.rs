//! Point samples on [0, 1], the weighted empirical norm, and bounded noise.
//!
//! The empirical norm `sqrt(mean(v_j^2))` is the natural scale for vectors of
//! point values: it makes the sampling map a contraction from the sup norm,
//! i.e. `empirical_norm(g(x) - h(x)) <= sup |g - h|` for any sites x.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Two sites closer than this are treated as the same point.
pub const SITE_DEDUP_TOL: f64 = 1e-12;

/// Weighted empirical l2 norm: `sqrt((1/m) sum v_j^2)`.
pub fn empirical_norm(v: &[f64]) -> Result<f64> {
    if v.is_empty() {
        return Err(Error::InvalidArgument(
            "empirical norm of an empty vector".into(),
        ));
    }
    let sum: f64 = v.iter().map(|x| x * x).sum();
    Ok((sum / v.len() as f64).sqrt())
}

/// Evaluate `g` at every site, failing on sites outside [0, 1].
pub fn apply_point_measurements<F: FnMut(f64) -> f64>(
    mut g: F,
    sites: &[f64],
) -> Result<Vec<f64>> {
    sites
        .iter()
        .map(|&x| {
            if !(0.0..=1.0).contains(&x) {
                Err(Error::OutOfDomain(x))
            } else {
                Ok(g(x))
            }
        })
        .collect()
}

/// Largest gap left uncovered by the sites, with the endpoints 0 and 1
/// included as virtual sites.
pub fn mesh_gap(sites: &[f64]) -> Result<f64> {
    if sites.is_empty() {
        return Err(Error::InvalidArgument("mesh gap of no sites".into()));
    }
    for pair in sites.windows(2) {
        if pair[1] <= pair[0] {
            return Err(Error::InvalidArgument(format!(
                "sites must be strictly increasing, got {} then {}",
                pair[0], pair[1]
            )));
        }
    }
    let first = sites[0];
    let last = sites[sites.len() - 1];
    if !(0.0..=1.0).contains(&first) || last > 1.0 {
        return Err(Error::OutOfDomain(if first < 0.0 { first } else { last }));
    }
    let mut h = first.max(1.0 - last);
    for pair in sites.windows(2) {
        h = h.max(pair[1] - pair[0]);
    }
    Ok(h)
}

/// Point samples `(x_j, w_j)` on [0, 1] with an optional noise bound gamma.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DataSample {
    sites: Vec<f64>,
    values: Vec<f64>,
    #[serde(rename = "gamma")]
    noise_bound: Option<f64>,
}

impl DataSample {
    /// Build a sample, sorting by site and merging duplicate sites.
    ///
    /// Duplicates (within [`SITE_DEDUP_TOL`]) with equal values collapse to
    /// one sample; with different values they are rejected.
    pub fn new(sites: Vec<f64>, values: Vec<f64>, noise_bound: Option<f64>) -> Result<Self> {
        if sites.len() != values.len() {
            return Err(Error::InvalidArgument(format!(
                "{} sites but {} values",
                sites.len(),
                values.len()
            )));
        }
        if let Some(g) = noise_bound {
            if !(g.is_finite() && g >= 0.0) {
                return Err(Error::InvalidArgument(format!(
                    "noise bound must be finite and nonnegative, got {g}"
                )));
            }
        }
        let mut pairs: Vec<(f64, f64)> = sites.into_iter().zip(values).collect();
        for &(x, v) in &pairs {
            if !(0.0..=1.0).contains(&x) {
                return Err(Error::OutOfDomain(x));
            }
            if !v.is_finite() {
                return Err(Error::InvalidArgument(format!("non-finite value {v}")));
            }
        }
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut dedup: Vec<(f64, f64)> = Vec::with_capacity(pairs.len());
        for (x, v) in pairs {
            match dedup.last() {
                Some(&(px, pv)) if x - px < SITE_DEDUP_TOL => {
                    if pv != v {
                        return Err(Error::InvalidArgument(format!(
                            "conflicting values {pv} and {v} at site {px}"
                        )));
                    }
                }
                _ => dedup.push((x, v)),
            }
        }
        if dedup.len() < 2 {
            return Err(Error::InvalidArgument(format!(
                "need at least 2 distinct sites, got {}",
                dedup.len()
            )));
        }
        Ok(DataSample {
            sites: dedup.iter().map(|&(x, _)| x).collect(),
            values: dedup.iter().map(|&(_, v)| v).collect(),
            noise_bound,
        })
    }

    pub fn sites(&self) -> &[f64] {
        &self.sites
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn noise_bound(&self) -> Option<f64> {
        self.noise_bound
    }

    /// Number of samples.
    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    /// Largest gap left by this sample's sites (endpoints included).
    pub fn mesh_gap(&self) -> f64 {
        mesh_gap(&self.sites).expect("sites validated at construction")
    }

    /// CSV with header `site,value`, 17 significant digits per entry.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("site,value\n");
        for (x, v) in self.sites.iter().zip(&self.values) {
            out.push_str(&format!("{x:.16e},{v:.16e}\n"));
        }
        out
    }

    /// Parse the `site,value` CSV emitted by [`DataSample::to_csv`].
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        match lines.next() {
            Some(h) if h.trim() == "site,value" => {}
            other => {
                return Err(Error::InvalidArgument(format!(
                    "expected header 'site,value', got {other:?}"
                )))
            }
        }
        let mut sites = Vec::new();
        let mut values = Vec::new();
        for (i, line) in lines.enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let mut fields = line.split(',');
            let (x, v) = match (fields.next(), fields.next(), fields.next()) {
                (Some(x), Some(v), None) => (x, v),
                _ => {
                    return Err(Error::InvalidArgument(format!(
                        "row {}: expected two fields, got '{line}'",
                        i + 2
                    )))
                }
            };
            let parse = |s: &str| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::InvalidArgument(format!("row {}: {e}", i + 2)))
            };
            sites.push(parse(x)?);
            values.push(parse(v)?);
        }
        DataSample::new(sites, values, None)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("sample serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: DataSample = serde_json::from_str(text)?;
        DataSample::new(raw.sites, raw.values, raw.noise_bound)
    }
}

/// A noise vector together with a bound gamma on its empirical norm.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseVector {
    entries: Vec<f64>,
    gamma: f64,
}

impl NoiseVector {
    /// Build a noise vector, checking `empirical_norm(entries) <= gamma`.
    ///
    /// Noise levels above 1 are rejected: the recovery bounds assume the
    /// noise is at most the scale of the model class.
    pub fn new(entries: Vec<f64>, gamma: f64) -> Result<Self> {
        if !(gamma.is_finite() && gamma >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "gamma must be finite and nonnegative, got {gamma}"
            )));
        }
        if gamma > 1.0 {
            return Err(Error::UnsupportedParameter(format!(
                "noise level gamma = {gamma} exceeds 1"
            )));
        }
        let norm = empirical_norm(&entries)?;
        if norm > gamma {
            return Err(Error::InvalidArgument(format!(
                "empirical norm {norm} exceeds declared gamma {gamma}"
            )));
        }
        Ok(NoiseVector { entries, gamma })
    }

    /// Rescale `direction` so its empirical norm is exactly `gamma`
    /// (`gamma = 0` gives the zero vector). The declared bound absorbs the
    /// final rounding so the construction invariant always holds.
    pub fn scaled_to(direction: &[f64], gamma: f64) -> Result<Self> {
        if !(gamma.is_finite() && gamma >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "gamma must be finite and nonnegative, got {gamma}"
            )));
        }
        if gamma > 1.0 {
            return Err(Error::UnsupportedParameter(format!(
                "noise level gamma = {gamma} exceeds 1"
            )));
        }
        let norm = empirical_norm(direction)?;
        if gamma > 0.0 && norm == 0.0 {
            return Err(Error::InvalidArgument(
                "cannot scale the zero direction to a positive noise level".into(),
            ));
        }
        let scale = if gamma == 0.0 { 0.0 } else { gamma / norm };
        let entries: Vec<f64> = direction.iter().map(|&d| d * scale).collect();
        let achieved = empirical_norm(&entries)?;
        Ok(NoiseVector {
            entries,
            gamma: gamma.max(achieved),
        })
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }
}

/// Add noise to a sample entrywise; the result's noise bound is the empirical
/// norm of the noise, rounded up to the next float so the bound is safe.
pub fn add_noise(sample: &DataSample, noise: &NoiseVector) -> Result<DataSample> {
    if noise.entries.len() != sample.len() {
        return Err(Error::InvalidArgument(format!(
            "noise has {} entries for {} samples",
            noise.entries.len(),
            sample.len()
        )));
    }
    let values: Vec<f64> = sample
        .values
        .iter()
        .zip(&noise.entries)
        .map(|(v, e)| v + e)
        .collect();
    let norm = empirical_norm(&noise.entries)?;
    let bound = if norm == 0.0 {
        0.0
    } else {
        f64::from_bits(norm.to_bits() + 1)
    };
    DataSample::new(sample.sites.clone(), values, Some(bound))
}

//! Deterministic site and noise generation.

use crate::error::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};

/// Minimum separation between generated sites; draws closer than this to an
/// already accepted site are rejected and redrawn.
const SITE_SEPARATION: f64 = 1e-9;

/// `m` sample sites in [0, 1] including both endpoints, sorted.
///
/// Sites are nested across sample counts: for the same seed, the sites for
/// a larger `m` are a superset of those for a smaller `m`, because sites
/// are accepted one by one from a single deterministic stream and
/// acceptance of a draw never depends on later draws.
pub fn nested_sites(seed: u64, m: usize) -> Result<Vec<f64>> {
    if m < 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least the two endpoint sites, got m = {m}"
        )));
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut sites = vec![0.0, 1.0];
    while sites.len() < m {
        let x: f64 = rng.random();
        if sites.iter().all(|&s| (s - x).abs() > SITE_SEPARATION) {
            sites.push(x);
        }
    }
    sites.sort_by(f64::total_cmp);
    Ok(sites)
}

/// A fixed-seed standard-normal direction vector of length `m`, used to
/// construct noise of a prescribed empirical norm.
pub fn noise_direction(seed: u64, m: usize) -> Vec<f64> {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    (0..m)
        .map(|_| StandardNormal.sample(&mut rng))
        .collect()
}

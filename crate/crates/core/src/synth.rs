//! Gaussian-niche community simulator.
//!
//! Each species responds to two environmental gradients `x` and `y` with a
//! bell-shaped (normal density) curve. Gaussian noise is added to each
//! response factor, the factors are multiplied, and the per-site relative
//! abundances are scaled to a carrying capacity and rounded up to integers.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::ordination::{CommunityTable, PredictorBlock};
use crate::rng::{stream, tag, StreamRng};
use crate::scalar::Scalar;

const MAX_SITE_REDRAWS: usize = 100;

/// Niche optimum of one species on the two gradients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpeciesNiche {
    pub x_opt: f64,
    pub y_opt: f64,
}

impl SpeciesNiche {
    pub fn new(x_opt: f64, y_opt: f64) -> Self {
        Self { x_opt, y_opt }
    }
}

/// Environmental values at one site.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SiteEnvironment {
    pub x: f64,
    pub y: f64,
}

/// Full parameterization of a synthetic scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub n_sites: usize,
    pub niches: Vec<SpeciesNiche>,
    /// Standard deviation of the species response curves.
    pub sigma_niche: f64,
    /// Standard deviation of the additive noise on each response factor.
    pub sigma_noise: f64,
    /// `y` is sampled on `[0, y_max]`.
    pub y_max: f64,
    pub carrying_capacity: u64,
    /// Number of replicate datasets (or bootstrap resamples) per scenario.
    pub replicates: usize,
    pub seed: u64,
}

impl ScenarioConfig {
    pub const DEFAULT_N_SITES: usize = 100;
    pub const DEFAULT_SIGMA_NICHE: f64 = 0.5;
    pub const DEFAULT_SIGMA_NOISE: f64 = 0.01;
    pub const DEFAULT_CARRYING_CAPACITY: u64 = 10_000;
    pub const DEFAULT_REPLICATES: usize = 200;
    pub const DEFAULT_Y2_OPT: f64 = 0.5;

    /// Two-species model: both species peak at `x = 0.5`; on `y` species 1
    /// peaks at 0 and species 2 at `y2_opt`.
    pub fn two_species(y2_opt: f64, seed: u64) -> Self {
        Self {
            n_sites: Self::DEFAULT_N_SITES,
            niches: two_species_niches(y2_opt),
            sigma_niche: Self::DEFAULT_SIGMA_NICHE,
            sigma_noise: Self::DEFAULT_SIGMA_NOISE,
            y_max: 1.0,
            carrying_capacity: Self::DEFAULT_CARRYING_CAPACITY,
            replicates: Self::DEFAULT_REPLICATES,
            seed,
        }
    }

    pub fn n_species(&self) -> usize {
        self.niches.len()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidInput(msg));
        if self.n_sites < 3 {
            return bad(format!("n_sites must be at least 3, got {}", self.n_sites));
        }
        if self.niches.len() < 2 {
            return bad(format!("need at least 2 species, got {}", self.niches.len()));
        }
        if let Some(i) = self
            .niches
            .iter()
            .position(|n| !n.x_opt.is_finite() || !n.y_opt.is_finite())
        {
            return bad(format!("species {} has a non-finite optimum", i + 1));
        }
        if !(self.sigma_niche > 0.0 && self.sigma_niche.is_finite()) {
            return bad(format!("sigma_niche must be positive, got {}", self.sigma_niche));
        }
        if !(self.sigma_noise >= 0.0 && self.sigma_noise.is_finite()) {
            return bad(format!("sigma_noise must be non-negative, got {}", self.sigma_noise));
        }
        if !(self.y_max > 0.0 && self.y_max <= 1.0) {
            return bad(format!("y_max must lie in (0, 1], got {}", self.y_max));
        }
        if self.carrying_capacity == 0 {
            return bad("carrying_capacity must be positive".into());
        }
        if self.replicates == 0 {
            return bad("replicates must be positive".into());
        }
        Ok(())
    }
}

pub fn two_species_niches(y2_opt: f64) -> Vec<SpeciesNiche> {
    vec![SpeciesNiche::new(0.5, 0.0), SpeciesNiche::new(0.5, y2_opt)]
}

/// Normal probability density with mean `opt` and standard deviation `sigma`.
pub fn gaussian_response<T: Scalar>(v: T, opt: T, sigma: T) -> T {
    let z = (v - opt) / sigma;
    let norm = sigma * (T::lit(2.0) * T::lit(std::f64::consts::PI)).sqrt();
    (-(z * z) / T::lit(2.0)).exp() / norm
}

/// Product of the two noisy response factors for one species at one site.
///
/// Each factor is clamped at zero before multiplication.
pub fn relative_abundance<R: Rng + ?Sized>(
    site: SiteEnvironment,
    niche: SpeciesNiche,
    sigma_niche: f64,
    sigma_noise: f64,
    rng: &mut R,
) -> f64 {
    let eps_x: f64 = rng.sample::<f64, _>(StandardNormal) * sigma_noise;
    let eps_y: f64 = rng.sample::<f64, _>(StandardNormal) * sigma_noise;
    let fx = (gaussian_response(site.x, niche.x_opt, sigma_niche) + eps_x).max(0.0);
    let fy = (gaussian_response(site.y, niche.y_opt, sigma_niche) + eps_y).max(0.0);
    fx * fy
}

/// Scales relative abundances to integer populations summing to about `k`.
///
/// `N_i = ⌈α_i / Σα · k⌉` for `α_i > 0` and 0 otherwise, so the total lies in
/// `[k, k + S)`. Returns `None` when every `α_i` is zero.
pub fn site_abundances(alphas: &[f64], k: u64) -> Option<Vec<u64>> {
    let total: f64 = alphas.iter().sum();
    if total.is_nan() || total <= 0.0 || !total.is_finite() {
        return None;
    }
    let kf = k as f64;
    Some(
        alphas
            .iter()
            .map(|&a| {
                if a <= 0.0 {
                    return 0;
                }
                let v = a * kf / total;
                let nearest = v.round();
                // absorb representation error so exact quotients are not bumped up
                let n = if (v - nearest).abs() <= 1e-9 * kf.max(1.0) {
                    nearest
                } else {
                    v.ceil()
                };
                (n as u64).max(1)
            })
            .collect(),
    )
}

/// Draws one site's environment and abundances from its own stream.
fn simulate_site(config: &ScenarioConfig, site: usize) -> Result<(SiteEnvironment, Vec<u64>)> {
    let mut rng: StreamRng = stream(config.seed, &[tag::SITE, site as u64]);
    let env = SiteEnvironment {
        x: rng.random::<f64>(),
        y: rng.random::<f64>() * config.y_max,
    };
    let mut alphas = vec![0.0; config.niches.len()];
    for _ in 0..MAX_SITE_REDRAWS {
        for (a, niche) in alphas.iter_mut().zip(&config.niches) {
            *a = relative_abundance(env, *niche, config.sigma_niche, config.sigma_noise, &mut rng);
        }
        if let Some(counts) = site_abundances(&alphas, config.carrying_capacity) {
            return Ok((env, counts));
        }
    }
    Err(Error::SiteRedrawExhausted {
        site,
        attempts: MAX_SITE_REDRAWS,
    })
}

/// Simulates a community table and its `env` block (columns `x`, `y`).
///
/// Identical configs produce bit-identical output.
pub fn generate_dataset<T: Scalar>(
    config: &ScenarioConfig,
) -> Result<(CommunityTable<T>, PredictorBlock<T>)> {
    config.validate()?;
    let n = config.n_sites;
    let p = config.n_species();
    let mut counts = Matrix::zeros(n, p);
    let mut env = Matrix::zeros(n, 2);
    for i in 0..n {
        let (site, n_i) = simulate_site(config, i)?;
        env[(i, 0)] = T::lit(site.x);
        env[(i, 1)] = T::lit(site.y);
        for (j, &c) in n_i.iter().enumerate() {
            counts[(i, j)] = T::lit(c as f64);
        }
    }
    let site_ids: Vec<String> = (1..=n).map(|i| format!("site{i}")).collect();
    let species_ids: Vec<String> = (1..=p).map(|j| format!("species{j}")).collect();
    let table = CommunityTable::new(site_ids.clone(), species_ids, counts)?;
    let block = PredictorBlock::new("env", site_ids, vec!["x".into(), "y".into()], env)?;
    Ok((table, block))
}

/// Niche optima drawn uniformly on `[0, 1]²`.
pub fn random_niches(n_species: usize, seed: u64) -> Vec<SpeciesNiche> {
    let mut rng = stream(seed, &[tag::NICHES]);
    (0..n_species)
        .map(|_| SpeciesNiche::new(rng.random::<f64>(), rng.random::<f64>()))
        .collect()
}

/// Config for the multi-species model: given niches, full `[0, 1]` ranges.
pub fn complex_config(
    n_sites: usize,
    niches: Vec<SpeciesNiche>,
    sigma_noise: f64,
    seed: u64,
) -> ScenarioConfig {
    ScenarioConfig {
        n_sites,
        niches,
        sigma_niche: ScenarioConfig::DEFAULT_SIGMA_NICHE,
        sigma_noise,
        y_max: 1.0,
        carrying_capacity: ScenarioConfig::DEFAULT_CARRYING_CAPACITY,
        replicates: ScenarioConfig::DEFAULT_REPLICATES,
        seed,
    }
}

/// Multi-species table with random niche optima.
pub fn generate_complex_dataset<T: Scalar>(
    n_sites: usize,
    n_species: usize,
    sigma_noise: f64,
    seed: u64,
) -> Result<(CommunityTable<T>, PredictorBlock<T>)> {
    if n_sites < 5 {
        return Err(Error::InvalidInput(format!(
            "multi-species model needs at least 5 sites, got {n_sites}"
        )));
    }
    let niches = random_niches(n_species, seed);
    generate_dataset(&complex_config(n_sites, niches, sigma_noise, seed))
}

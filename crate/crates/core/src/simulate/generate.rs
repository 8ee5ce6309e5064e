use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::normal::one_sided_pvalue;
use super::{Dependence, NullPlacement, ScenarioConfig};
use crate::error::Result;
use crate::pvalues::{PValueSample, Truth};

/// Random stream for one replication: a pure function of `(seed, replication)`.
pub fn substream(seed: u64, replication: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replication);
    rng
}

/// Standard normal noise with AR(1) correlation `ρ^|i−j|` inside consecutive
/// blocks of `block_size` (the last block may be short) and independence
/// across blocks. Each block starts from its stationary distribution, so every
/// coordinate has unit variance.
pub fn block_ar1_noise<R: Rng + ?Sized>(
    rng: &mut R,
    m: usize,
    block_size: usize,
    rho: f64,
) -> Vec<f64> {
    let innovation_scale = (1.0 - rho * rho).sqrt();
    let mut z = Vec::with_capacity(m);
    for i in 0..m {
        let e: f64 = rng.sample(StandardNormal);
        if i % block_size == 0 {
            z.push(e);
        } else {
            let prev = z[i - 1];
            z.push(rho * prev + innovation_scale * e);
        }
    }
    z
}

pub fn independent_noise<R: Rng + ?Sized>(rng: &mut R, m: usize) -> Vec<f64> {
    (0..m).map(|_| rng.sample(StandardNormal)).collect()
}

/// Truth labels, noise and test statistics for one replication.
pub fn generate_statistics_raw(
    cfg: &ScenarioConfig,
    replication: u64,
) -> Result<(Vec<Truth>, Vec<f64>)> {
    cfg.validate()?;
    let mut rng = substream(cfg.seed, replication);
    let m1 = cfg.m1();
    let mut truth: Vec<Truth> = (0..cfg.m)
        .map(|i| {
            if i < m1 {
                Truth::FalseNull
            } else {
                Truth::TrueNull
            }
        })
        .collect();
    if cfg.placement == NullPlacement::Random {
        truth.shuffle(&mut rng);
    }
    let noise = match cfg.dependence {
        Dependence::Independent => independent_noise(&mut rng, cfg.m),
        Dependence::BlockAr { block_size, rho } => {
            block_ar1_noise(&mut rng, cfg.m, block_size, rho)
        }
    };
    let stats = noise
        .into_iter()
        .zip(&truth)
        .map(|(z, t)| match t {
            Truth::FalseNull => cfg.mu + z,
            Truth::TrueNull => z,
        })
        .collect();
    Ok((truth, stats))
}

/// One-sided p-values `1 − Φ(X_i)` with truth labels attached.
pub fn generate_statistics(cfg: &ScenarioConfig, replication: u64) -> Result<PValueSample> {
    let (truth, stats) = generate_statistics_raw(cfg, replication)?;
    let pvalues = stats.into_iter().map(one_sided_pvalue).collect();
    PValueSample::with_truth(pvalues, truth)
}

//! Samplers for the product measure `ν_{O(n)} × γ_{Sym(n)} × λ` and for
//! affine flats, plus the sharded Monte Carlo driver every estimator uses.
//!
//! Reproducibility contract: an estimate depends only on `(seed, shards,
//! samples)`. Shard `i` draws from the ChaCha8 stream `i` of `seed`, and
//! shard accumulators are merged in index order, so the thread count never
//! changes a result.

mod flats;
pub(crate) mod group;
mod stats;

pub use flats::{sample_affine_flat, AffineFlat};
pub use group::{sample_group_element, translation_region, GroupElement};
pub use stats::{effective_sample_size, sigma_distance, EstimatorResult, RunningStats};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// The random stream type every sampler draws from.
pub type Stream = ChaCha8Rng;

pub const DEFAULT_SHARDS: u32 = 64;

/// Independent, reproducible stream number `shard` derived from `seed`.
pub fn shard_stream(seed: u64, shard: u64) -> Stream {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(shard);
    rng
}

/// Sample budget and seeding for one Monte Carlo estimate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct McPlan {
    pub samples: u64,
    pub seed: u64,
    pub shards: u32,
}

impl McPlan {
    pub fn new(samples: u64, seed: u64) -> Self {
        Self {
            samples,
            seed,
            shards: DEFAULT_SHARDS,
        }
    }

    pub fn with_shards(mut self, shards: u32) -> Self {
        self.shards = shards.max(1);
        self
    }

    /// Same budget on a different seed, for estimators that must be
    /// statistically independent of this one.
    pub fn reseeded(self, salt: u64) -> Self {
        Self {
            seed: self
                .seed
                .wrapping_mul(0x9E37_79B9_7F4A_7C15)
                .wrapping_add(salt.wrapping_mul(0xD1B5_4A32_D192_ED03) | 1),
            ..self
        }
    }

    fn shard_sizes(&self) -> Vec<u64> {
        let shards = self.shards.max(1) as u64;
        let base = self.samples / shards;
        let extra = self.samples % shards;
        (0..shards).map(|i| base + u64::from(i < extra)).collect()
    }

    /// Runs `draw` `samples` times across the shard plan and accumulates the
    /// returned values.
    pub fn run<F>(&self, draw: F) -> RunningStats
    where
        F: Fn(&mut Stream) -> f64 + Sync,
    {
        self.run_pairs(|rng| (draw(rng), 0.0)).0
    }

    /// Like [`run`](Self::run) but accumulates two values per draw.
    pub fn run_pairs<F>(&self, draw: F) -> (RunningStats, RunningStats)
    where
        F: Fn(&mut Stream) -> (f64, f64) + Sync,
    {
        let partials: Vec<(RunningStats, RunningStats)> = self
            .shard_sizes()
            .into_par_iter()
            .enumerate()
            .map(|(shard, size)| {
                let mut rng = shard_stream(self.seed, shard as u64);
                let mut a = RunningStats::new();
                let mut b = RunningStats::new();
                for _ in 0..size {
                    let (x, y) = draw(&mut rng);
                    a.push(x);
                    b.push(y);
                }
                (a, b)
            })
            .collect();
        partials.iter().fold(
            (RunningStats::new(), RunningStats::new()),
            |(mut a, mut b), (pa, pb)| {
                a.merge(pa);
                b.merge(pb);
                (a, b)
            },
        )
    }

    /// Fallible variant: the first error in shard order wins.
    pub fn try_run_pairs<F>(&self, draw: F) -> crate::Result<(RunningStats, RunningStats)>
    where
        F: Fn(&mut Stream) -> crate::Result<(f64, f64)> + Sync,
    {
        let partials: Vec<crate::Result<(RunningStats, RunningStats)>> = self
            .shard_sizes()
            .into_par_iter()
            .enumerate()
            .map(|(shard, size)| {
                let mut rng = shard_stream(self.seed, shard as u64);
                let mut a = RunningStats::new();
                let mut b = RunningStats::new();
                for _ in 0..size {
                    let (x, y) = draw(&mut rng)?;
                    a.push(x);
                    b.push(y);
                }
                Ok((a, b))
            })
            .collect();
        let mut a = RunningStats::new();
        let mut b = RunningStats::new();
        for p in partials {
            let (pa, pb) = p?;
            a.merge(&pa);
            b.merge(&pb);
        }
        Ok((a, b))
    }

    /// Fallible variant accumulating `width` values per draw.
    pub fn try_run_vec<F>(&self, width: usize, draw: F) -> crate::Result<Vec<RunningStats>>
    where
        F: Fn(&mut Stream, &mut [f64]) -> crate::Result<()> + Sync,
    {
        let partials: Vec<crate::Result<Vec<RunningStats>>> = self
            .shard_sizes()
            .into_par_iter()
            .enumerate()
            .map(|(shard, size)| {
                let mut rng = shard_stream(self.seed, shard as u64);
                let mut acc = vec![RunningStats::new(); width];
                let mut buf = vec![0.0; width];
                for _ in 0..size {
                    draw(&mut rng, &mut buf)?;
                    for (a, x) in acc.iter_mut().zip(&buf) {
                        a.push(*x);
                    }
                }
                Ok(acc)
            })
            .collect();
        let mut out = vec![RunningStats::new(); width];
        for p in partials {
            for (o, q) in out.iter_mut().zip(p?) {
                o.merge(&q);
            }
        }
        Ok(out)
    }

    /// Collects per-draw values in a deterministic order (for diagnostics
    /// that need the full sample, e.g. ESS).
    pub fn try_collect<T, F>(&self, draw: F) -> crate::Result<Vec<T>>
    where
        T: Send,
        F: Fn(&mut Stream) -> crate::Result<T> + Sync,
    {
        let shards: Vec<crate::Result<Vec<T>>> = self
            .shard_sizes()
            .into_par_iter()
            .enumerate()
            .map(|(shard, size)| {
                let mut rng = shard_stream(self.seed, shard as u64);
                (0..size).map(|_| draw(&mut rng)).collect()
            })
            .collect();
        let mut out = Vec::with_capacity(self.samples as usize);
        for s in shards {
            out.extend(s?);
        }
        Ok(out)
    }
}

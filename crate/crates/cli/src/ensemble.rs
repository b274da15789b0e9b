//! Parallel ensemble generation with one random stream per trajectory.

use rayon::prelude::*;

use levywalk::limit::limit_positions_both;
use levywalk::walk::{simulate_renewals, WaitingTimes};
use levywalk::{
    CoupledJumpList, CoupledJumpSampler, DirectionMeasure, HeavyTailLaw, MixingDensity, RngStream,
    Scenario, SubordinatorLaw, WalkKind, WalkPath,
};

use crate::error::{CliError, CliResult};

/// Worker pool of the requested size; `None` uses every available core.
pub fn pool(threads: Option<usize>) -> CliResult<rayon::ThreadPool> {
    let n = threads.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build()
        .map_err(|e| CliError::Other(format!("cannot start {n} worker threads: {e}")))
}

/// Runs `f(i, stream_i)` for `i in 0..n` on the pool and returns results in index order.
pub fn par_map<T, F>(
    pool: &rayon::ThreadPool,
    seed: u64,
    stage: &str,
    n: u64,
    f: F,
) -> CliResult<Vec<T>>
where
    T: Send,
    F: Fn(u64, RngStream) -> levywalk::Result<T> + Sync,
{
    pool.install(|| {
        (0..n)
            .into_par_iter()
            .map(|i| f(i, RngStream::for_stage(seed, stage, i)))
            .collect::<levywalk::Result<Vec<T>>>()
    })
    .map_err(CliError::from)
}

/// A pre-limit walk model.
#[derive(Debug, Clone)]
pub enum Walk {
    /// Pareto waits; positions are rescaled as `n^(−1/α) R(n^(1/α) t)`.
    Pareto {
        law: HeavyTailLaw,
        kind: WalkKind,
        n: f64,
    },
    /// Distributed-order waits at scale `n`.
    Conditional {
        mixing: MixingDensity,
        kind: WalkKind,
        n: u64,
    },
}

impl Walk {
    fn waits(&self) -> levywalk::Result<(WaitingTimes, f64)> {
        Ok(match self {
            Walk::Pareto { law, n, .. } => (WaitingTimes::pareto(*law), n.powf(1.0 / law.alpha())),
            Walk::Conditional { mixing, n, .. } => (WaitingTimes::conditional(*n, *mixing)?, 1.0),
        })
    }

    pub fn kind(&self) -> WalkKind {
        match self {
            Walk::Pareto { kind, .. } | Walk::Conditional { kind, .. } => *kind,
        }
    }

    /// One path on `[0, scale · t_max]` in physical (unrescaled) time.
    pub fn path(
        &self,
        lambda: &DirectionMeasure,
        t_max: f64,
        stream: RngStream,
    ) -> levywalk::Result<WalkPath> {
        let (waits, scale) = self.waits()?;
        let mut rng = stream.rng();
        Ok(simulate_renewals(&waits, lambda, scale * t_max, &mut rng)?.into_path(self.kind()))
    }

    /// Rescaled positions at `times`, row-major.
    pub fn positions(
        &self,
        lambda: &DirectionMeasure,
        times: &[f64],
        stream: RngStream,
    ) -> levywalk::Result<Vec<f64>> {
        let (_, scale) = self.waits()?;
        let t_max = times.last().copied().unwrap_or(0.0).max(f64::MIN_POSITIVE);
        let path = self.path(lambda, t_max, stream)?;
        let scaled: Vec<f64> = times.iter().map(|t| t * scale).collect();
        let mut x = path.positions_at(&scaled)?;
        x.iter_mut().for_each(|v| *v /= scale);
        Ok(x)
    }
}

/// A limit model sampled by compound-Poisson approximation.
#[derive(Debug, Clone)]
pub struct Limit {
    pub sampler: CoupledJumpSampler,
    /// Operational-time block for extending a path until it covers the last time.
    pub tau_step: f64,
}

impl Limit {
    pub fn new(
        law: SubordinatorLaw,
        lambda: DirectionMeasure,
        eps: f64,
        tau_step: f64,
    ) -> levywalk::Result<Self> {
        Ok(Self {
            sampler: CoupledJumpSampler::new(law, lambda, eps)?,
            tau_step,
        })
    }

    pub fn jumps(&self, level: f64, stream: RngStream) -> levywalk::Result<CoupledJumpList> {
        self.sampler
            .sample_covering(level, self.tau_step, &mut stream.rng())
    }

    /// Wait-first and jump-first positions at sorted `times`, row-major.
    pub fn positions_both(
        &self,
        times: &[f64],
        stream: RngStream,
    ) -> levywalk::Result<(Vec<f64>, Vec<f64>)> {
        let list = self.jumps(times.last().copied().unwrap_or(0.0), stream)?;
        limit_positions_both(&list, times)
    }

    pub fn positions(
        &self,
        times: &[f64],
        scenario: Scenario,
        stream: RngStream,
    ) -> levywalk::Result<Vec<f64>> {
        let (wf, jf) = self.positions_both(times, stream)?;
        Ok(match scenario {
            Scenario::WaitFirst => wf,
            Scenario::JumpFirst => jf,
        })
    }
}

//! Pre-limit coupled walks: Lévy walk (wait-first), overshooting Lévy walk
//! (jump-first) and their distributed-order generalizations.
//!
//! Each event draws a waiting time `T` and a unit direction `V`; the jump is
//! `J = V·T`, so its length always equals the waiting time it is paired
//! with. A wait-first walk sits still for `T_i` and then jumps by `J_i`; a
//! jump-first walk jumps by `J_i` immediately and then waits `T_i`.
//!
//! Paths are stored as event lists: the renewal epochs `0 = S_0 < S_1 < …`
//! and the position held on each interval `[S_k, S_{k+1})`. Events whose
//! waiting time is below the floating-point resolution of the current epoch
//! (tiny exponents in the distributed-order law make these common) are
//! folded into the current epoch so the stored epochs stay strictly
//! increasing.

use rand::Rng;
use rand_distr::Beta;
use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};
use crate::rng::open_unit;
use crate::sampling::{
    conditional_from_uniform, draw_open, pareto_from_uniform, DirectionMeasure, HeavyTailLaw,
    MixingDensity,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WalkKind {
    Lw,
    Olw,
    Glw,
    Golw,
}

impl WalkKind {
    pub fn is_jump_first(self) -> bool {
        matches!(self, WalkKind::Olw | WalkKind::Golw)
    }

    pub fn code(self) -> u16 {
        match self {
            WalkKind::Lw => 0,
            WalkKind::Olw => 1,
            WalkKind::Glw => 2,
            WalkKind::Golw => 3,
        }
    }

    pub fn from_code(code: u16) -> Option<Self> {
        Some(match code {
            0 => WalkKind::Lw,
            1 => WalkKind::Olw,
            2 => WalkKind::Glw,
            3 => WalkKind::Golw,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            WalkKind::Lw => "lw",
            WalkKind::Olw => "olw",
            WalkKind::Glw => "glw",
            WalkKind::Golw => "golw",
        }
    }
}

/// Source of the waiting times of a walk.
#[derive(Debug, Clone)]
pub enum WaitingTimes {
    /// `P(T > t) = t^(−α)`, `t ≥ 1`.
    Pareto(HeavyTailLaw),
    /// Exponent `β ~ p`, then `P(T > t | β) = t^(−β)/n` above `n^(−1/β)`.
    Conditional {
        n: u64,
        mixing: MixingDensity,
        beta: Beta<f64>,
    },
}

impl WaitingTimes {
    pub fn pareto(law: HeavyTailLaw) -> Self {
        WaitingTimes::Pareto(law)
    }

    pub fn conditional(n: u64, mixing: MixingDensity) -> Result<Self> {
        ensure(n >= 1, "n", || "scale parameter must be at least 1".into())?;
        Ok(WaitingTimes::Conditional {
            n,
            mixing,
            beta: mixing.distribution(),
        })
    }

    #[inline]
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            WaitingTimes::Pareto(law) => pareto_from_uniform(law.alpha(), open_unit(rng)),
            WaitingTimes::Conditional { n, beta, .. } => {
                let b = draw_open(beta, rng);
                conditional_from_uniform(*n as f64, b, open_unit(rng))
            }
        }
    }
}

/// Piecewise-constant trajectory of a pre-limit walk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WalkPath {
    pub kind: WalkKind,
    pub dim: usize,
    pub horizon: f64,
    /// Renewal epochs, strictly increasing, starting at 0; the last one is ≥ horizon.
    pub epochs: Vec<f64>,
    /// Row-major positions, `positions[k*dim..(k+1)*dim]` held on `[epochs[k], epochs[k+1])`.
    pub positions: Vec<f64>,
}

impl WalkPath {
    pub fn len(&self) -> usize {
        self.epochs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.epochs.is_empty()
    }

    pub fn position_row(&self, k: usize) -> &[f64] {
        &self.positions[k * self.dim..(k + 1) * self.dim]
    }

    fn index_at(&self, t: f64) -> Result<usize> {
        if !(0.0..=self.horizon).contains(&t) {
            return Err(Error::OutOfRange {
                t,
                horizon: self.horizon,
            });
        }
        // largest k with epochs[k] ≤ t (right-continuous)
        Ok(self.epochs.partition_point(|&e| e <= t) - 1)
    }

    /// Position at time `t ∈ [0, horizon]`.
    pub fn position_at(&self, t: f64) -> Result<Vec<f64>> {
        Ok(self.position_row(self.index_at(t)?).to_vec())
    }

    /// Epoch of the renewal following `t` (the `S_{N_t+1}` of the walk).
    pub fn next_epoch_after(&self, t: f64) -> Result<f64> {
        let k = self.index_at(t)?;
        Ok(self.epochs.get(k + 1).copied().unwrap_or(f64::INFINITY))
    }

    /// Positions at non-decreasing times, row-major.
    pub fn positions_at(&self, times: &[f64]) -> Result<Vec<f64>> {
        let mut out = Vec::with_capacity(times.len() * self.dim);
        let mut k = 0usize;
        let mut last = f64::NEG_INFINITY;
        for &t in times {
            if !(0.0..=self.horizon).contains(&t) {
                return Err(Error::OutOfRange {
                    t,
                    horizon: self.horizon,
                });
            }
            if t < last {
                return Err(Error::Input("query times must be non-decreasing".into()));
            }
            last = t;
            while k + 1 < self.epochs.len() && self.epochs[k + 1] <= t {
                k += 1;
            }
            out.extend_from_slice(self.position_row(k));
        }
        Ok(out)
    }
}

/// A simulated renewal sequence holding both the wait-first and the
/// jump-first reading of the same draws.
#[derive(Debug, Clone)]
pub struct Renewals {
    pub dim: usize,
    pub horizon: f64,
    pub epochs: Vec<f64>,
    wait_first: Vec<f64>,
    jump_first: Vec<f64>,
}

impl Renewals {
    /// Path for the requested scenario; LW/GLW read the wait-first positions.
    pub fn into_path(self, kind: WalkKind) -> WalkPath {
        let positions = if kind.is_jump_first() {
            self.jump_first
        } else {
            self.wait_first
        };
        WalkPath {
            kind,
            dim: self.dim,
            horizon: self.horizon,
            epochs: self.epochs,
            positions,
        }
    }

    /// Wait-first and jump-first positions at non-decreasing times in one sweep.
    pub fn positions_at(&self, times: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        let d = self.dim;
        let mut wf = Vec::with_capacity(times.len() * d);
        let mut jf = Vec::with_capacity(times.len() * d);
        let mut k = 0usize;
        let mut last = f64::NEG_INFINITY;
        for &t in times {
            if !(0.0..=self.horizon).contains(&t) {
                return Err(Error::OutOfRange {
                    t,
                    horizon: self.horizon,
                });
            }
            if t < last {
                return Err(Error::Input("query times must be non-decreasing".into()));
            }
            last = t;
            while k + 1 < self.epochs.len() && self.epochs[k + 1] <= t {
                k += 1;
            }
            wf.extend_from_slice(&self.wait_first[k * d..(k + 1) * d]);
            jf.extend_from_slice(&self.jump_first[k * d..(k + 1) * d]);
        }
        Ok((wf, jf))
    }

    /// Number of stored renewal epochs, including the origin.
    pub fn len(&self) -> usize {
        self.epochs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.epochs.is_empty()
    }
}

#[inline]
fn add_jump(pos: &mut [f64], dir: &[f64], t: f64) {
    for (p, v) in pos.iter_mut().zip(dir) {
        // 0·∞ would poison the coordinate with NaN
        if *v != 0.0 {
            *p += v * t;
        }
    }
}

/// Draws renewal events until the first epoch at or beyond `horizon`.
pub fn simulate_renewals<R: Rng + ?Sized>(
    waits: &WaitingTimes,
    lambda: &DirectionMeasure,
    horizon: f64,
    rng: &mut R,
) -> Result<Renewals> {
    ensure(horizon > 0.0 && horizon.is_finite(), "horizon", || {
        format!("must be positive and finite, got {horizon}")
    })?;
    let d = lambda.dim();
    let mut dir = vec![0.0; d];
    let mut cur = vec![0.0; d];
    let mut next = vec![0.0; d];
    let mut epochs = vec![0.0];
    let mut wait_first = vec![0.0; d];
    let mut jump_first = Vec::new();
    let mut s = 0.0f64;
    loop {
        let t = waits.draw(rng);
        lambda.sample_into(rng, &mut dir);
        if s >= horizon {
            // jump-first reading of the final interval needs the next jump
            next.copy_from_slice(&cur);
            add_jump(&mut next, &dir, t);
            jump_first.extend_from_slice(&next);
            break;
        }
        let advanced = s + t;
        if advanced > s {
            next.copy_from_slice(&cur);
            add_jump(&mut next, &dir, t);
            jump_first.extend_from_slice(&next);
            cur.copy_from_slice(&next);
            s = advanced;
            epochs.push(s);
            wait_first.extend_from_slice(&cur);
        } else {
            add_jump(&mut cur, &dir, t);
            let k = epochs.len() - 1;
            wait_first[k * d..(k + 1) * d].copy_from_slice(&cur);
        }
    }
    Ok(Renewals {
        dim: d,
        horizon,
        epochs,
        wait_first,
        jump_first,
    })
}

/// Lévy walk: wait `T_i`, then jump `V_i T_i`; starts at the origin.
pub fn simulate_lw<R: Rng + ?Sized>(
    law: &HeavyTailLaw,
    lambda: &DirectionMeasure,
    horizon: f64,
    rng: &mut R,
) -> Result<WalkPath> {
    Ok(
        simulate_renewals(&WaitingTimes::pareto(*law), lambda, horizon, rng)?
            .into_path(WalkKind::Lw),
    )
}

/// Overshooting Lévy walk: jump `V_i T_i` first, then wait `T_i`.
pub fn simulate_olw<R: Rng + ?Sized>(
    law: &HeavyTailLaw,
    lambda: &DirectionMeasure,
    horizon: f64,
    rng: &mut R,
) -> Result<WalkPath> {
    Ok(
        simulate_renewals(&WaitingTimes::pareto(*law), lambda, horizon, rng)?
            .into_path(WalkKind::Olw),
    )
}

/// Generalized (distributed-order) Lévy walk at scale `n`.
pub fn simulate_glw<R: Rng + ?Sized>(
    n: u64,
    p: &MixingDensity,
    lambda: &DirectionMeasure,
    horizon: f64,
    rng: &mut R,
) -> Result<WalkPath> {
    Ok(
        simulate_renewals(&WaitingTimes::conditional(n, *p)?, lambda, horizon, rng)?
            .into_path(WalkKind::Glw),
    )
}

/// Generalized overshooting Lévy walk at scale `n`.
pub fn simulate_golw<R: Rng + ?Sized>(
    n: u64,
    p: &MixingDensity,
    lambda: &DirectionMeasure,
    horizon: f64,
    rng: &mut R,
) -> Result<WalkPath> {
    Ok(
        simulate_renewals(&WaitingTimes::conditional(n, *p)?, lambda, horizon, rng)?
            .into_path(WalkKind::Golw),
    )
}

fn rescaled<R: Rng + ?Sized>(
    law: &HeavyTailLaw,
    lambda: &DirectionMeasure,
    n: f64,
    t: f64,
    jump_first: bool,
    rng: &mut R,
) -> Result<Vec<f64>> {
    ensure(n >= 1.0 && n.is_finite(), "n", || {
        format!("must be ≥ 1, got {n}")
    })?;
    ensure(t >= 0.0 && t.is_finite(), "t", || {
        format!("must be non-negative, got {t}")
    })?;
    if t == 0.0 && !jump_first {
        return Ok(vec![0.0; lambda.dim()]);
    }
    let scale = n.powf(1.0 / law.alpha());
    // t = 0 still needs a positive horizon for the jump-first reading
    let horizon = (scale * t).max(f64::MIN_POSITIVE);
    let r = simulate_renewals(&WaitingTimes::pareto(*law), lambda, horizon, rng)?;
    let kind = if jump_first {
        WalkKind::Olw
    } else {
        WalkKind::Lw
    };
    let mut x = r.into_path(kind).position_at(scale * t)?;
    x.iter_mut().for_each(|v| *v /= scale);
    Ok(x)
}

/// `n^(−1/α) R(n^(1/α) t)` for a freshly simulated Lévy walk.
pub fn rescaled_lw_position<R: Rng + ?Sized>(
    law: &HeavyTailLaw,
    lambda: &DirectionMeasure,
    n: f64,
    t: f64,
    rng: &mut R,
) -> Result<Vec<f64>> {
    rescaled(law, lambda, n, t, false, rng)
}

/// `n^(−1/α) R̃(n^(1/α) t)` for a freshly simulated overshooting Lévy walk.
pub fn rescaled_olw_position<R: Rng + ?Sized>(
    law: &HeavyTailLaw,
    lambda: &DirectionMeasure,
    n: f64,
    t: f64,
    rng: &mut R,
) -> Result<Vec<f64>> {
    rescaled(law, lambda, n, t, true, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;

    fn norm(x: &[f64]) -> f64 {
        x.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    fn law() -> HeavyTailLaw {
        HeavyTailLaw::new(0.5).unwrap()
    }

    #[test]
    fn lw_starts_at_origin_and_is_right_continuous() {
        let lambda = DirectionMeasure::uniform(2).unwrap();
        let p = simulate_lw(&law(), &lambda, 50.0, &mut RngStream::new(3, 0).rng()).unwrap();
        assert_eq!(p.position_at(0.0).unwrap(), vec![0.0, 0.0]);
        let t1 = p.epochs[1];
        if t1 <= 50.0 {
            assert_eq!(p.position_at(t1 * 0.999).unwrap(), vec![0.0, 0.0]);
            assert_eq!(p.position_at(t1).unwrap(), p.position_row(1).to_vec());
        }
        let last = p.epochs.partition_point(|&e| e <= 50.0) - 1;
        assert_eq!(p.position_at(50.0).unwrap(), p.position_row(last).to_vec());
        assert!(*p.epochs.last().unwrap() >= 50.0);
        assert!(p.position_at(50.1).is_err());
        assert!(p.position_at(-1e-9).is_err());
    }

    #[test]
    fn lw_replays_bit_identically() {
        let lambda = DirectionMeasure::point(vec![1.0]).unwrap();
        let a = simulate_lw(&law(), &lambda, 1e4, &mut RngStream::new(42, 0).rng()).unwrap();
        let b = simulate_lw(&law(), &lambda, 1e4, &mut RngStream::new(42, 0).rng()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn coupling_and_cone_bound() {
        let lambda = DirectionMeasure::uniform(3).unwrap();
        for i in 0..200 {
            let p = simulate_lw(&law(), &lambda, 1e3, &mut RngStream::new(1, i).rng()).unwrap();
            for k in 1..p.len() {
                let dj: Vec<f64> = p
                    .position_row(k)
                    .iter()
                    .zip(p.position_row(k - 1))
                    .map(|(a, b)| a - b)
                    .collect();
                let dt = p.epochs[k] - p.epochs[k - 1];
                assert!((norm(&dj) - dt).abs() <= 1e-9 * dt.max(1.0));
                assert!(norm(p.position_row(k - 1)) <= p.epochs[k] * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn olw_first_jump_is_immediate() {
        let lambda = DirectionMeasure::uniform(2).unwrap();
        let p = simulate_olw(&law(), &lambda, 100.0, &mut RngStream::new(8, 0).rng()).unwrap();
        let x0 = p.position_at(0.0).unwrap();
        assert!((norm(&x0) - p.epochs[1]).abs() < 1e-12 * p.epochs[1]);
        for k in 1..p.len() - 1 {
            let dj: Vec<f64> = p
                .position_row(k)
                .iter()
                .zip(p.position_row(k - 1))
                .map(|(a, b)| a - b)
                .collect();
            let dt = p.epochs[k + 1] - p.epochs[k];
            assert!((norm(&dj) - dt).abs() <= 1e-9 * dt.max(1.0));
        }
    }

    #[test]
    fn aligned_olw_sits_at_next_renewal() {
        let lambda = DirectionMeasure::point(vec![1.0]).unwrap();
        let p = simulate_olw(&law(), &lambda, 1e3, &mut RngStream::new(4, 0).rng()).unwrap();
        for &t in &[0.0, 0.5, 3.0, 77.0, 999.0] {
            let x = p.position_at(t).unwrap()[0];
            assert_eq!(x, p.next_epoch_after(t).unwrap());
        }
        let g = simulate_golw(
            100,
            &MixingDensity::new(0.5, 2.0).unwrap(),
            &lambda,
            1.0,
            &mut RngStream::new(4, 1).rng(),
        )
        .unwrap();
        for &t in &[0.0, 0.25, 0.5, 1.0] {
            let x = g.position_at(t).unwrap()[0];
            let next = g.next_epoch_after(t).unwrap();
            assert!((x - next).abs() <= 1e-12 * next, "{x} {next}");
        }
    }

    #[test]
    fn olw_within_next_renewal() {
        let lambda = DirectionMeasure::uniform(2).unwrap();
        for i in 0..100 {
            let p = simulate_olw(&law(), &lambda, 100.0, &mut RngStream::new(5, i).rng()).unwrap();
            for j in 0..=50 {
                let t = 2.0 * j as f64;
                let x = p.position_at(t).unwrap();
                assert!(norm(&x) <= p.next_epoch_after(t).unwrap() * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn glw_cone_bound_and_epochs_increase() {
        let p = MixingDensity::new(0.5, 2.0).unwrap();
        let lambda = DirectionMeasure::uniform(2).unwrap();
        for i in 0..200 {
            let w = simulate_glw(1000, &p, &lambda, 10.0, &mut RngStream::new(6, i).rng()).unwrap();
            assert_eq!(w.position_at(0.0).unwrap(), vec![0.0, 0.0]);
            assert!(w.epochs.windows(2).all(|e| e[1] > e[0]));
            for j in 0..=100 {
                let t = 0.1 * j as f64;
                assert!(norm(&w.position_at(t).unwrap()) <= t * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn glw_and_golw_share_draws() {
        let p = MixingDensity::new(1.0, 2.0).unwrap();
        let lambda = DirectionMeasure::symmetric_axis(1).unwrap();
        let a = simulate_glw(50, &p, &lambda, 2.0, &mut RngStream::new(10, 0).rng()).unwrap();
        let b = simulate_golw(50, &p, &lambda, 2.0, &mut RngStream::new(10, 0).rng()).unwrap();
        assert_eq!(a.epochs, b.epochs);
        // jump-first = wait-first + the pending jump
        let ta = 1.3;
        let k = a.epochs.partition_point(|&e| e <= ta) - 1;
        let gap = a.epochs[k + 1] - a.epochs[k];
        let diff = (b.position_at(ta).unwrap()[0] - a.position_at(ta).unwrap()[0]).abs();
        assert!((diff - gap).abs() <= 1e-9 * gap.max(1.0));
    }

    #[test]
    fn positions_at_matches_point_queries() {
        let lambda = DirectionMeasure::uniform(2).unwrap();
        let p = simulate_lw(&law(), &lambda, 100.0, &mut RngStream::new(2, 2).rng()).unwrap();
        let times: Vec<f64> = (0..=100).map(|i| i as f64).collect();
        let all = p.positions_at(&times).unwrap();
        for (i, &t) in times.iter().enumerate() {
            assert_eq!(&all[2 * i..2 * i + 2], p.position_at(t).unwrap().as_slice());
        }
        assert!(p.positions_at(&[2.0, 1.0]).is_err());
    }

    #[test]
    fn rescaled_positions() {
        let lambda = DirectionMeasure::uniform(2).unwrap();
        assert_eq!(
            rescaled_lw_position(&law(), &lambda, 100.0, 0.0, &mut RngStream::new(0, 0).rng())
                .unwrap(),
            vec![0.0, 0.0]
        );
        // n = 1 is the plain walk read at t
        let x = rescaled_lw_position(&law(), &lambda, 1.0, 7.0, &mut RngStream::new(0, 1).rng())
            .unwrap();
        let p = simulate_lw(&law(), &lambda, 7.0, &mut RngStream::new(0, 1).rng()).unwrap();
        assert_eq!(x, p.position_at(7.0).unwrap());
        for i in 0..200 {
            let x =
                rescaled_lw_position(&law(), &lambda, 1e3, 0.8, &mut RngStream::new(1, i).rng())
                    .unwrap();
            assert!(norm(&x) <= 0.8 * (1.0 + 1e-12));
        }
    }

    #[test]
    fn bad_horizon() {
        let lambda = DirectionMeasure::uniform(1).unwrap();
        assert!(simulate_lw(&law(), &lambda, 0.0, &mut RngStream::new(0, 0).rng()).is_err());
        assert!(simulate_glw(
            0,
            &MixingDensity::new(1.0, 2.0).unwrap(),
            &lambda,
            1.0,
            &mut RngStream::new(0, 0).rng()
        )
        .is_err());
    }
}

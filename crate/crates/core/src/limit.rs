//! Scaling limits: the coupled Lévy pair `(L, S)`, its inverse subordinator
//! and the subordinated wait-first and jump-first positions.
//!
//! Jumps above a cutoff `ε` are simulated exactly as a compound Poisson
//! process; jumps below it are replaced by their mean, a drift `drift_s` in
//! `S` and `ū·drift_s` in `L`, where `ū` is the mean jump direction. Every jump of
//! `L` is the matching jump of `S` times a unit direction.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};
use statrs::function::beta::ln_beta;
use statrs::function::gamma::gamma;
use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{ensure, Error, Result};
use crate::quad::{beta_weighted, BetaRule};
use crate::rng::open_unit;
use crate::sampling::{validate_mixing_density, DirectionMeasure, MixingDensity};

/// Which reading of the subordinated process is taken at a straddling jump.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    /// Wait, then jump: the pre-jump position `L(τ−)`.
    WaitFirst,
    /// Jump, then wait: the post-jump (overshoot) position `L(τ)`.
    JumpFirst,
}

/// Lévy measure of the subordinator, up to the coupling with directions.
///
/// `Stable` is `α t^(−α−1)/Γ(1−α) dt`; `Distributed` is
/// `∫₀¹ β t^(−β−1) p(β) dβ dt`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SubordinatorLaw {
    Stable { alpha: f64 },
    Distributed { mixing: MixingDensity },
}

const TAIL_RULE: BetaRule = BetaRule::Adaptive { rel_tol: 1e-10 };

impl SubordinatorLaw {
    pub fn stable(alpha: f64) -> Result<Self> {
        let law = SubordinatorLaw::Stable { alpha };
        law.validate()?;
        Ok(law)
    }

    pub fn distributed(mixing: MixingDensity) -> Result<Self> {
        let law = SubordinatorLaw::Distributed { mixing };
        law.validate()?;
        Ok(law)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            SubordinatorLaw::Stable { alpha } => {
                ensure(*alpha > 0.0 && *alpha < 1.0, "alpha", || {
                    format!("must lie in (0, 1), got {alpha}")
                })
            }
            SubordinatorLaw::Distributed { mixing } => validate_mixing_density(mixing).map(|_| ()),
        }
    }

    /// `ν((ε, ∞))`.
    pub fn tail_mass(&self, eps: f64) -> Result<f64> {
        check_eps(eps)?;
        Ok(match self {
            SubordinatorLaw::Stable { alpha } => eps.powf(-alpha) / gamma(1.0 - alpha),
            SubordinatorLaw::Distributed { mixing } => {
                let ln_eps = eps.ln();
                mixing_integral(mixing, 0.0, |b| (-b * ln_eps).exp())
            }
        })
    }

    /// `∫₀^ε t ν(dt)`.
    pub fn small_jump_drift(&self, eps: f64) -> Result<f64> {
        check_eps(eps)?;
        Ok(match self {
            SubordinatorLaw::Stable { alpha } => {
                alpha * eps.powf(1.0 - alpha) / ((1.0 - alpha) * gamma(1.0 - alpha))
            }
            SubordinatorLaw::Distributed { mixing } => {
                let ln_eps = eps.ln();
                // p(β)/(1−β) is a Beta(γ, b−1) weight
                mixing_integral(mixing, 1.0, |b| b * ((1.0 - b) * ln_eps).exp())
            }
        })
    }

    /// `∫₀^ε t² ν(dt)`.
    pub fn small_jump_second_moment(&self, eps: f64) -> Result<f64> {
        check_eps(eps)?;
        Ok(match self {
            SubordinatorLaw::Stable { alpha } => {
                alpha * eps.powf(2.0 - alpha) / ((2.0 - alpha) * gamma(1.0 - alpha))
            }
            SubordinatorLaw::Distributed { mixing } => {
                let ln_eps = eps.ln();
                mixing_integral(mixing, 0.0, |b| b * ((2.0 - b) * ln_eps).exp() / (2.0 - b))
            }
        })
    }

    /// Laplace exponent `∫(1 − e^(−λt)) ν(dt)`, i.e. `λ^α` or `∫ Γ(1−β) λ^β p(β) dβ`.
    pub fn laplace_exponent(&self, lambda: f64) -> Result<f64> {
        ensure(lambda >= 0.0 && lambda.is_finite(), "lambda", || {
            format!("must be non-negative, got {lambda}")
        })?;
        Ok(match self {
            SubordinatorLaw::Stable { alpha } => lambda.powf(*alpha),
            SubordinatorLaw::Distributed { mixing } => {
                if lambda == 0.0 {
                    return Ok(0.0);
                }
                let ln_l = lambda.ln();
                // Γ(1−β)(1−β) = Γ(2−β)
                mixing_integral(mixing, 1.0, |b| gamma(2.0 - b) * (b * ln_l).exp())
            }
        })
    }
}

fn check_eps(eps: f64) -> Result<()> {
    ensure(eps > 0.0 && eps.is_finite(), "eps", || {
        format!("must be positive and finite, got {eps}")
    })
}

/// `∫₀¹ g(β) p(β)/(1−β)^shift dβ` for `shift ∈ {0, 1}`.
fn mixing_integral(p: &MixingDensity, shift: f64, mut g: impl FnMut(f64) -> f64) -> f64 {
    let v = beta_weighted(
        |b| [Complex64::new(g(b), 0.0)],
        p.gamma(),
        p.b() - shift,
        TAIL_RULE,
    );
    v[0].re / p.ln_normalizer().exp()
}

pub fn tail_mass(law: &SubordinatorLaw, eps: f64) -> Result<f64> {
    law.tail_mass(eps)
}

pub fn small_jump_drift(law: &SubordinatorLaw, eps: f64) -> Result<f64> {
    law.small_jump_drift(eps)
}

/// Bound on `|E e^(−z S_ε(τ)) − E e^(−z S(τ))|` caused by replacing the
/// jumps below `ε` with their mean, for `Re z ≥ 0`:
/// `τ |z|²/2 · ∫₀^ε t² ν(dt)`.
///
/// With coupled directions `z = s − i⟨k, u⟩`, so `|s| + ‖k‖` bounds `|z|`.
pub fn truncation_bias(law: &SubordinatorLaw, eps: f64, z_abs: f64, tau: f64) -> Result<f64> {
    Ok(tau * 0.5 * z_abs * z_abs * law.small_jump_second_moment(eps)?)
}

/// Lévy triplet of `(L, S)` in `d + 1` dimensions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevyTriplet {
    /// `∫ x/(1 + ‖x‖²) ν(dx)`, with the time component last.
    pub drift: Vec<f64>,
    /// Always zero.
    pub gaussian: Vec<Vec<f64>>,
    pub law: SubordinatorLaw,
    pub lambda: DirectionMeasure,
}

impl LevyTriplet {
    pub fn new(law: SubordinatorLaw, lambda: DirectionMeasure) -> Result<Self> {
        law.validate()?;
        let d = lambda.dim();
        // x = (u t, t), ‖x‖² = 2t², ∫₀^∞ t^(−β)/(1+2t²) dt = 2^((β−1)/2) π / (2 cos(πβ/2))
        let kernel =
            |b: f64| 2f64.powf(0.5 * (b - 1.0)) * PI / (2.0 * (FRAC_PI_2 * (1.0 - b)).sin());
        let scalar = match law {
            SubordinatorLaw::Stable { alpha } => alpha / gamma(1.0 - alpha) * kernel(alpha),
            SubordinatorLaw::Distributed { mixing } => {
                // the 1/(1−β) pole of the kernel pairs with (1−β)^(b−1)
                mixing_integral(&mixing, 1.0, |b| {
                    let x = 1.0 - b;
                    let ratio = if x < 1e-8 {
                        1.0 / FRAC_PI_2
                    } else {
                        x / (FRAC_PI_2 * x).sin()
                    };
                    b * 2f64.powf(-0.5 * x) * PI * ratio / 2.0
                })
            }
        };
        let mut drift: Vec<f64> = lambda.mean_direction().iter().map(|u| u * scalar).collect();
        drift.push(scalar);
        Ok(Self {
            drift,
            gaussian: vec![vec![0.0; d + 1]; d + 1],
            law,
            lambda,
        })
    }
}

/// Finite-jump approximation of `(L, S)` on `[0, tau_max]`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoupledJumpList {
    dim: usize,
    tau_max: f64,
    eps: f64,
    epochs: Vec<f64>,
    magnitudes: Vec<f64>,
    directions: Vec<f64>,
    drift_s: f64,
    drift_l: Vec<f64>,
    cum_s: Vec<f64>,
    cum_l: Vec<f64>,
}

/// Where the subordinator first exceeds a level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Crossing {
    /// By the jump with this index, at its epoch.
    Jump(usize),
    /// By drift at operational time `tau`, after `jumps` jumps.
    Drift { tau: f64, jumps: usize },
}

impl CoupledJumpList {
    /// Builds a list from its parts, checking every structural invariant.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        dim: usize,
        tau_max: f64,
        eps: f64,
        epochs: Vec<f64>,
        magnitudes: Vec<f64>,
        directions: Vec<f64>,
        drift_s: f64,
        drift_l: Vec<f64>,
    ) -> Result<Self> {
        ensure(dim >= 1, "dim", || "dimension must be at least 1".into())?;
        ensure(tau_max > 0.0 && tau_max.is_finite(), "tau_max", || {
            format!("must be positive, got {tau_max}")
        })?;
        check_eps(eps)?;
        let n = epochs.len();
        ensure(
            magnitudes.len() == n && directions.len() == n * dim,
            "magnitudes",
            || "epochs, magnitudes and directions must have matching lengths".into(),
        )?;
        ensure(epochs.windows(2).all(|w| w[0] <= w[1]), "epochs", || {
            "must be sorted".into()
        })?;
        ensure(
            epochs.iter().all(|&e| (0.0..=tau_max).contains(&e)),
            "epochs",
            || format!("must lie in [0, {tau_max}]"),
        )?;
        ensure(magnitudes.iter().all(|&m| m > eps), "magnitudes", || {
            format!("every jump must exceed the cutoff {eps}")
        })?;
        for (i, u) in directions.chunks(dim).enumerate() {
            let norm = u.iter().map(|x| x * x).sum::<f64>().sqrt();
            ensure((norm - 1.0).abs() <= 1e-12, "directions", || {
                format!("direction {i} has norm {norm}")
            })?;
        }
        ensure(drift_s >= 0.0 && drift_s.is_finite(), "drift_s", || {
            format!("must be non-negative, got {drift_s}")
        })?;
        ensure(drift_l.len() == dim, "drift_l", || {
            format!("must have {dim} components")
        })?;
        let dl = drift_l.iter().map(|x| x * x).sum::<f64>().sqrt();
        ensure(dl <= drift_s * (1.0 + 1e-12), "drift_l", || {
            format!("norm {dl} exceeds drift_s {drift_s}")
        })?;
        Ok(Self::assemble(
            dim, tau_max, eps, epochs, magnitudes, directions, drift_s, drift_l,
        ))
    }

    #[allow(clippy::too_many_arguments)]
    fn assemble(
        dim: usize,
        tau_max: f64,
        eps: f64,
        epochs: Vec<f64>,
        magnitudes: Vec<f64>,
        directions: Vec<f64>,
        drift_s: f64,
        drift_l: Vec<f64>,
    ) -> Self {
        let mut list = Self {
            dim,
            tau_max,
            eps,
            epochs,
            magnitudes,
            directions,
            drift_s,
            drift_l,
            cum_s: Vec::new(),
            cum_l: Vec::new(),
        };
        list.rebuild();
        list
    }

    fn rebuild(&mut self) {
        let d = self.dim;
        let n = self.epochs.len();
        self.cum_s = Vec::with_capacity(n + 1);
        self.cum_l = Vec::with_capacity((n + 1) * d);
        self.cum_s.push(0.0);
        self.cum_l.extend(std::iter::repeat_n(0.0, d));
        for i in 0..n {
            let m = self.magnitudes[i];
            self.cum_s.push(self.cum_s[i] + m);
            for c in 0..d {
                let v = self.directions[i * d + c];
                let prev = self.cum_l[i * d + c];
                self.cum_l.push(if v == 0.0 { prev } else { prev + v * m });
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn tau_max(&self) -> f64 {
        self.tau_max
    }
    pub fn eps(&self) -> f64 {
        self.eps
    }
    pub fn epochs(&self) -> &[f64] {
        &self.epochs
    }
    pub fn magnitudes(&self) -> &[f64] {
        &self.magnitudes
    }
    /// Row-major unit directions, one row per jump.
    pub fn directions(&self) -> &[f64] {
        &self.directions
    }
    pub fn drift_s(&self) -> f64 {
        self.drift_s
    }
    pub fn drift_l(&self) -> &[f64] {
        &self.drift_l
    }
    pub fn len(&self) -> usize {
        self.epochs.len()
    }
    pub fn is_empty(&self) -> bool {
        self.epochs.is_empty()
    }

    fn jumps_through(&self, tau: f64) -> usize {
        self.epochs.partition_point(|&e| e <= tau)
    }

    /// `S(τ)`, right-continuous.
    pub fn subordinator_at(&self, tau: f64) -> f64 {
        self.drift_s * tau + self.cum_s[self.jumps_through(tau)]
    }

    /// `L(τ)`, right-continuous.
    pub fn levy_at(&self, tau: f64) -> Vec<f64> {
        self.levy_after(tau, self.jumps_through(tau))
    }

    fn levy_after(&self, tau: f64, jumps: usize) -> Vec<f64> {
        let d = self.dim;
        self.cum_l[jumps * d..(jumps + 1) * d]
            .iter()
            .zip(&self.drift_l)
            .map(|(c, v)| c + v * tau)
            .collect()
    }

    /// `S(tau_max)`.
    pub fn reached(&self) -> f64 {
        self.subordinator_at(self.tau_max)
    }

    /// Locates `inf{τ ≥ 0 : S(τ) > t}`.
    pub fn crossing(&self, t: f64) -> Result<Crossing> {
        ensure(t >= 0.0 && t.is_finite(), "t", || {
            format!("must be non-negative, got {t}")
        })?;
        let reached = self.reached();
        if reached <= t {
            return Err(Error::Coverage {
                level: t,
                reached,
                tau_max: self.tau_max,
            });
        }
        let n = self.epochs.len();
        // first jump after which S exceeds t
        let mut lo = 0usize;
        let mut hi = n;
        while lo < hi {
            let mid = (lo + hi) / 2;
            if self.drift_s * self.epochs[mid] + self.cum_s[mid + 1] > t {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        let j = lo;
        let base = self.cum_s[j];
        let tau_drift = if self.drift_s > 0.0 {
            (t - base) / self.drift_s
        } else {
            f64::INFINITY
        };
        let next_epoch = if j < n { self.epochs[j] } else { self.tau_max };
        if tau_drift < next_epoch || (j == n && tau_drift <= self.tau_max) {
            Ok(Crossing::Drift {
                tau: tau_drift.max(0.0),
                jumps: j,
            })
        } else if j < n {
            Ok(Crossing::Jump(j))
        } else {
            Err(Error::Coverage {
                level: t,
                reached,
                tau_max: self.tau_max,
            })
        }
    }

    /// `L` read at a crossing under the given scenario.
    pub fn position_at_crossing(&self, crossing: Crossing, scenario: Scenario) -> Vec<f64> {
        match crossing {
            Crossing::Drift { tau, jumps } => self.levy_after(tau, jumps),
            Crossing::Jump(j) => {
                let tau = self.epochs[j];
                match scenario {
                    Scenario::WaitFirst => self.levy_after(tau, j),
                    Scenario::JumpFirst => self.levy_after(tau, j + 1),
                }
            }
        }
    }
}

/// `S⁻¹(t) = inf{τ ≥ 0 : S(τ) > t}`, solved exactly on the piecewise-linear path.
pub fn inverse_subordinator(list: &CoupledJumpList, t: f64) -> Result<f64> {
    Ok(match list.crossing(t)? {
        Crossing::Jump(j) => list.epochs[j],
        Crossing::Drift { tau, .. } => tau,
    })
}

/// Subordinated position `L(S⁻¹(t))` with the straddling-jump convention of `scenario`.
pub fn limit_position(list: &CoupledJumpList, t: f64, scenario: Scenario) -> Result<Vec<f64>> {
    Ok(list.position_at_crossing(list.crossing(t)?, scenario))
}

/// Wait-first and jump-first positions at each time, row-major.
pub fn limit_positions_both(list: &CoupledJumpList, times: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut wf = Vec::with_capacity(times.len() * list.dim);
    let mut jf = Vec::with_capacity(times.len() * list.dim);
    for &t in times {
        let c = list.crossing(t)?;
        wf.extend(list.position_at_crossing(c, Scenario::WaitFirst));
        jf.extend(list.position_at_crossing(c, Scenario::JumpFirst));
    }
    Ok((wf, jf))
}

const CELLS: usize = 64;
const MAX_PROPOSALS: usize = 1_000_000;

/// Exact sampler for the tilted exponent density `∝ ε^(−β) p(β)`.
///
/// Piecewise envelope over 64 equal cells of (0, 1): constant on interior
/// cells, `∝ β^(γ−1)` on the first cell when `γ < 1`.
#[derive(Debug, Clone)]
struct TiltedExponent {
    gamma: f64,
    b: f64,
    c: f64,
    /// log envelope level per cell
    log_bound: Vec<f64>,
    cumulative: Vec<f64>,
    singular_first: bool,
}

impl TiltedExponent {
    fn new(p: &MixingDensity, eps: f64) -> Self {
        let (gamma, b) = (p.gamma(), p.b());
        let c = -eps.ln();
        let h = 1.0 / CELLS as f64;
        let singular_first = gamma < 1.0;
        let mut log_bound = Vec::with_capacity(CELLS);
        let mut log_mass = Vec::with_capacity(CELLS);
        for j in 0..CELLS {
            let (lo, hi) = (j as f64 * h, (j + 1) as f64 * h);
            // bound e^(cβ) and (1−β)^(b−1) by their cell maxima
            let tilt = if c >= 0.0 { c * hi } else { c * lo };
            let right = if b >= 1.0 {
                (b - 1.0) * (1.0 - lo).ln()
            } else {
                (b - 1.0) * (1.0 - hi).ln()
            };
            if j == 0 && singular_first {
                // envelope M β^(γ−1) on (0, h), mass M h^γ/γ
                let lb = tilt + right;
                log_bound.push(lb);
                log_mass.push(lb + gamma * h.ln() - gamma.ln());
            } else {
                let left = if gamma >= 1.0 {
                    (gamma - 1.0) * hi.ln()
                } else {
                    (gamma - 1.0) * lo.ln()
                };
                let lb = tilt + right + left;
                log_bound.push(lb);
                log_mass.push(lb + h.ln());
            }
        }
        let top = log_mass.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let mut cumulative = Vec::with_capacity(CELLS);
        let mut acc = 0.0;
        for lm in &log_mass {
            acc += (lm - top).exp();
            cumulative.push(acc);
        }
        Self {
            gamma,
            b,
            c,
            log_bound,
            cumulative,
            singular_first,
        }
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<f64> {
        let h = 1.0 / CELLS as f64;
        let total = *self.cumulative.last().unwrap();
        for _ in 0..MAX_PROPOSALS {
            let x = rng.random::<f64>() * total;
            let j = self.cumulative.partition_point(|&v| v <= x).min(CELLS - 1);
            let beta = if j == 0 && self.singular_first {
                h * open_unit(rng).powf(1.0 / self.gamma)
            } else {
                (j as f64 + rng.random::<f64>()) * h
            };
            if beta <= 0.0 || beta >= 1.0 {
                continue;
            }
            let mut log_target = self.c * beta + (self.b - 1.0) * (1.0 - beta).ln();
            if !(j == 0 && self.singular_first) {
                log_target += (self.gamma - 1.0) * beta.ln();
            }
            let log_accept = log_target - self.log_bound[j];
            if open_unit(rng).ln() <= log_accept {
                return Ok(beta);
            }
        }
        Err(Error::Configuration(format!(
            "tilted exponent sampler produced no draw after {MAX_PROPOSALS} proposals \
             (γ={}, b={}, ε={})",
            self.gamma,
            self.b,
            (-self.c).exp()
        )))
    }
}

/// Reusable sampler of coupled jump lists for one `(law, Λ, ε)`.
#[derive(Debug, Clone)]
pub struct CoupledJumpSampler {
    law: SubordinatorLaw,
    lambda: DirectionMeasure,
    eps: f64,
    mass: f64,
    drift_s: f64,
    drift_l: Vec<f64>,
    tilted: Option<TiltedExponent>,
}

impl CoupledJumpSampler {
    pub fn new(law: SubordinatorLaw, lambda: DirectionMeasure, eps: f64) -> Result<Self> {
        law.validate()?;
        check_eps(eps)?;
        let mass = law.tail_mass(eps)?;
        let drift_s = law.small_jump_drift(eps)?;
        let drift_l = lambda
            .mean_direction()
            .iter()
            .map(|u| u * drift_s)
            .collect();
        let tilted = match law {
            SubordinatorLaw::Stable { .. } => None,
            SubordinatorLaw::Distributed { mixing } => Some(TiltedExponent::new(&mixing, eps)),
        };
        Ok(Self {
            law,
            lambda,
            eps,
            mass,
            drift_s,
            drift_l,
            tilted,
        })
    }

    pub fn law(&self) -> &SubordinatorLaw {
        &self.law
    }
    pub fn lambda(&self) -> &DirectionMeasure {
        &self.lambda
    }
    pub fn eps(&self) -> f64 {
        self.eps
    }
    /// Jump intensity `ν((ε, ∞))` per unit operational time.
    pub fn intensity(&self) -> f64 {
        self.mass
    }
    pub fn drift_s(&self) -> f64 {
        self.drift_s
    }

    /// One magnitude from `ν` restricted to `(ε, ∞)` and normalized.
    pub fn sample_magnitude<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<f64> {
        let exponent = match (&self.law, &self.tilted) {
            (SubordinatorLaw::Stable { alpha }, _) => *alpha,
            (_, Some(t)) => t.sample(rng)?,
            _ => unreachable!("distributed law always carries a tilted sampler"),
        };
        // strictly above the cutoff even when u^(−1/β) rounds to 1
        let m = self.eps * open_unit(rng).powf(-1.0 / exponent);
        Ok(if m > self.eps { m } else { self.eps.next_up() })
    }

    /// Tilted tail exponent for the distributed law, `None` for the stable one.
    pub fn sample_tilted_exponent<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<Result<f64>> {
        self.tilted.as_ref().map(|t| t.sample(rng))
    }

    fn append_jumps<R: Rng + ?Sized>(
        &self,
        offset: f64,
        span: f64,
        rng: &mut R,
        epochs: &mut Vec<f64>,
        magnitudes: &mut Vec<f64>,
        directions: &mut Vec<f64>,
    ) -> Result<()> {
        let mean = self.mass * span;
        let count = if mean > 0.0 {
            Poisson::new(mean)
                .map_err(|e| Error::Configuration(format!("jump count with mean {mean}: {e}")))?
                .sample(rng) as usize
        } else {
            0
        };
        let start = epochs.len();
        for _ in 0..count {
            epochs.push(offset + span * rng.random::<f64>());
        }
        epochs[start..].sort_by(f64::total_cmp);
        let d = self.lambda.dim();
        let mut dir = vec![0.0; d];
        for _ in 0..count {
            magnitudes.push(self.sample_magnitude(rng)?);
            self.lambda.sample_into(rng, &mut dir);
            directions.extend_from_slice(&dir);
        }
        Ok(())
    }

    /// Compound-Poisson approximation of `(L, S)` on `[0, tau_max]`.
    pub fn sample<R: Rng + ?Sized>(&self, tau_max: f64, rng: &mut R) -> Result<CoupledJumpList> {
        ensure(tau_max > 0.0 && tau_max.is_finite(), "tau_max", || {
            format!("must be positive, got {tau_max}")
        })?;
        let (mut epochs, mut magnitudes, mut directions) = (Vec::new(), Vec::new(), Vec::new());
        self.append_jumps(
            0.0,
            tau_max,
            rng,
            &mut epochs,
            &mut magnitudes,
            &mut directions,
        )?;
        Ok(CoupledJumpList::assemble(
            self.lambda.dim(),
            tau_max,
            self.eps,
            epochs,
            magnitudes,
            directions,
            self.drift_s,
            self.drift_l.clone(),
        ))
    }

    /// Extends the operational-time horizon in blocks of `step` until `S`
    /// exceeds `level`, so the list covers every `t ≤ level`.
    pub fn sample_covering<R: Rng + ?Sized>(
        &self,
        level: f64,
        step: f64,
        rng: &mut R,
    ) -> Result<CoupledJumpList> {
        ensure(level >= 0.0 && level.is_finite(), "level", || {
            format!("must be non-negative, got {level}")
        })?;
        ensure(step > 0.0 && step.is_finite(), "step", || {
            format!("must be positive, got {step}")
        })?;
        let (mut epochs, mut magnitudes, mut directions) = (Vec::new(), Vec::new(), Vec::new());
        let mut tau_max = 0.0;
        loop {
            self.append_jumps(
                tau_max,
                step,
                rng,
                &mut epochs,
                &mut magnitudes,
                &mut directions,
            )?;
            tau_max += step;
            let reached = self.drift_s * tau_max + magnitudes.iter().sum::<f64>();
            if reached > level {
                break;
            }
        }
        Ok(CoupledJumpList::assemble(
            self.lambda.dim(),
            tau_max,
            self.eps,
            epochs,
            magnitudes,
            directions,
            self.drift_s,
            self.drift_l.clone(),
        ))
    }
}

/// One-shot wrapper around [`CoupledJumpSampler`].
pub fn simulate_coupled_jumps<R: Rng + ?Sized>(
    law: &SubordinatorLaw,
    lambda: &DirectionMeasure,
    eps: f64,
    tau_max: f64,
    rng: &mut R,
) -> Result<CoupledJumpList> {
    CoupledJumpSampler::new(*law, lambda.clone(), eps)?.sample(tau_max, rng)
}

/// Exact log-density of the tilted exponent law, for tests and diagnostics.
pub fn tilted_exponent_log_density(p: &MixingDensity, eps: f64, beta: f64) -> Result<f64> {
    let law = SubordinatorLaw::Distributed { mixing: *p };
    let z = law.tail_mass(eps)?;
    Ok(
        -beta * eps.ln() + (p.gamma() - 1.0) * beta.ln() + (p.b() - 1.0) * (1.0 - beta).ln()
            - ln_beta(p.gamma(), p.b())
            - z.ln(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;

    fn two_jump_list() -> CoupledJumpList {
        CoupledJumpList::new(
            1,
            3.0,
            1.0,
            vec![1.0, 2.0],
            vec![2.0, 3.0],
            vec![1.0, -1.0],
            0.0,
            vec![0.0],
        )
        .unwrap()
    }

    #[test]
    fn inverse_on_step_path() {
        let l = two_jump_list();
        assert_eq!(inverse_subordinator(&l, 1.0).unwrap(), 1.0);
        assert_eq!(inverse_subordinator(&l, 3.0).unwrap(), 2.0);
        assert_eq!(inverse_subordinator(&l, 0.0).unwrap(), 1.0);
        assert!(matches!(
            inverse_subordinator(&l, 5.0),
            Err(Error::Coverage { .. })
        ));
    }

    #[test]
    fn inverse_with_drift() {
        let l = CoupledJumpList::new(1, 3.0, 1.0, vec![1.0], vec![2.0], vec![1.0], 0.5, vec![0.5])
            .unwrap();
        assert_eq!(inverse_subordinator(&l, 0.0).unwrap(), 0.0);
        assert!((inverse_subordinator(&l, 0.25).unwrap() - 0.5).abs() < 1e-15);
        // S(1−) = 0.5, S(1) = 2.5
        assert_eq!(inverse_subordinator(&l, 1.0).unwrap(), 1.0);
        // S(τ) = 2 + 0.5τ on [1, 3]: crosses 3 at τ = 2
        assert!((inverse_subordinator(&l, 3.0).unwrap() - 2.0).abs() < 1e-15);
        assert!(inverse_subordinator(&l, 3.5).is_err());
    }

    #[test]
    fn straddling_positions() {
        let l = two_jump_list();
        assert_eq!(
            limit_position(&l, 1.0, Scenario::WaitFirst).unwrap(),
            vec![0.0]
        );
        assert_eq!(
            limit_position(&l, 1.0, Scenario::JumpFirst).unwrap(),
            vec![2.0]
        );
        assert_eq!(
            limit_position(&l, 3.0, Scenario::WaitFirst).unwrap(),
            vec![2.0]
        );
        assert_eq!(
            limit_position(&l, 3.0, Scenario::JumpFirst).unwrap(),
            vec![-1.0]
        );
    }

    #[test]
    fn tail_mass_and_drift_values() {
        let s = SubordinatorLaw::stable(0.5).unwrap();
        let rpi = PI.sqrt();
        assert!((s.tail_mass(1.0).unwrap() - 1.0 / rpi).abs() < 1e-13);
        assert!((s.small_jump_drift(0.01).unwrap() - 0.1 / rpi).abs() < 1e-13);
        let p = MixingDensity::new(1.0, 2.0).unwrap();
        let dl = SubordinatorLaw::distributed(p).unwrap();
        assert!((dl.tail_mass(1.0).unwrap() - 1.0).abs() < 1e-10);
        let e = std::f64::consts::E;
        assert!((dl.tail_mass(1.0 / e).unwrap() - 2.0 * (e - 2.0)).abs() < 1e-9);
        assert!((dl.small_jump_drift(1.0).unwrap() - 1.0).abs() < 1e-10);
        let mut prev = f64::INFINITY;
        for k in 0..8 {
            let v = dl.small_jump_drift(10f64.powi(-k)).unwrap();
            assert!(v < prev);
            prev = v;
        }
    }

    #[test]
    fn bias_shrinks_tenfold() {
        for law in [
            SubordinatorLaw::stable(0.8).unwrap(),
            SubordinatorLaw::distributed(MixingDensity::new(1.0, 2.0).unwrap()).unwrap(),
        ] {
            let a = truncation_bias(&law, 1e-3, 2.0, 1.0).unwrap();
            let b = truncation_bias(&law, 1e-4, 2.0, 1.0).unwrap();
            assert!(b * 10.0 <= a, "{a} {b}");
        }
    }

    #[test]
    fn triplet_drift_matches_quadrature() {
        let lambda = DirectionMeasure::point(vec![1.0]).unwrap();
        let t = LevyTriplet::new(SubordinatorLaw::stable(0.5).unwrap(), lambda.clone()).unwrap();
        // ∫ t/(1+2t²) · 0.5 t^(−1.5)/√π dt by direct quadrature
        let (v, _) = crate::quad::integrate_real(
            |x| {
                // t = x/(1−x)
                let t = x / (1.0 - x);
                t / (1.0 + 2.0 * t * t) * 0.5 * t.powf(-1.5) / PI.sqrt() / ((1.0 - x) * (1.0 - x))
            },
            0.0,
            1.0,
            crate::quad::QuadOptions::rel(1e-11),
        );
        assert!((t.drift[1] - v).abs() < 1e-8, "{} {v}", t.drift[1]);
        assert_eq!(t.drift[0], t.drift[1]);
        assert!(t.gaussian.iter().flatten().all(|&g| g == 0.0));
        let td = LevyTriplet::new(
            SubordinatorLaw::distributed(MixingDensity::new(1.0, 2.0).unwrap()).unwrap(),
            lambda,
        )
        .unwrap();
        assert!(td.drift[1].is_finite() && td.drift[1] > 0.0);
    }

    #[test]
    fn laplace_exponent_values() {
        let s = SubordinatorLaw::stable(0.3).unwrap();
        assert!((s.laplace_exponent(2.0).unwrap() - 2f64.powf(0.3)).abs() < 1e-15);
        let d = SubordinatorLaw::distributed(MixingDensity::new(1.0, 2.0).unwrap()).unwrap();
        // λ = 1: ∫ 2 Γ(2−β) dβ
        let (v, _) = crate::quad::integrate_real(
            |b| 2.0 * gamma(2.0 - b),
            0.0,
            1.0,
            crate::quad::QuadOptions::rel(1e-12),
        );
        assert!((d.laplace_exponent(1.0).unwrap() - v).abs() < 1e-9);
    }

    #[test]
    fn sampled_lists_are_coupled_and_dominated() {
        let lambda = DirectionMeasure::uniform(2).unwrap();
        for law in [
            SubordinatorLaw::stable(0.5).unwrap(),
            SubordinatorLaw::distributed(MixingDensity::new(0.5, 2.0).unwrap()).unwrap(),
        ] {
            let sampler = CoupledJumpSampler::new(law, lambda.clone(), 1e-3).unwrap();
            for i in 0..200 {
                let l = sampler
                    .sample(1.0, &mut RngStream::new(9, i).rng())
                    .unwrap();
                assert!(l.magnitudes().iter().all(|&m| m > 1e-3));
                assert!(l.epochs().windows(2).all(|w| w[0] <= w[1]));
                for (j, &tau) in l.epochs().iter().enumerate() {
                    // a single jump may overflow to ∞ for tiny exponents
                    if !l.subordinator_at(tau).is_finite() {
                        break;
                    }
                    let ls = l.levy_at(tau);
                    let nl = ls.iter().fold(0.0f64, |a, x| a.hypot(*x));
                    assert!(
                        nl <= l.subordinator_at(tau) * (1.0 + 1e-12),
                        "{nl} {} {:?} {i} {j}",
                        l.subordinator_at(tau),
                        law
                    );
                    let u = &l.directions()[2 * j..2 * j + 2];
                    assert!(((u[0] * u[0] + u[1] * u[1]).sqrt() - 1.0).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn aligned_list_l_equals_s() {
        let lambda = DirectionMeasure::point(vec![1.0]).unwrap();
        let l = simulate_coupled_jumps(
            &SubordinatorLaw::stable(0.5).unwrap(),
            &lambda,
            1e-2,
            2.0,
            &mut RngStream::new(1, 1).rng(),
        )
        .unwrap();
        for k in 0..=40 {
            let tau = 0.05 * k as f64;
            assert!(
                (l.levy_at(tau)[0] - l.subordinator_at(tau)).abs()
                    <= 1e-12 * l.subordinator_at(tau).max(1.0)
            );
        }
    }

    #[test]
    fn wait_first_cone_bound() {
        let lambda = DirectionMeasure::uniform(2).unwrap();
        let sampler =
            CoupledJumpSampler::new(SubordinatorLaw::stable(0.6).unwrap(), lambda, 1e-3).unwrap();
        for i in 0..200 {
            let l = sampler
                .sample_covering(5.0, 1.0, &mut RngStream::new(2, i).rng())
                .unwrap();
            for k in 0..=50 {
                let t = 0.1 * k as f64;
                let x = limit_position(&l, t, Scenario::WaitFirst).unwrap();
                assert!(x.iter().map(|v| v * v).sum::<f64>().sqrt() <= t * (1.0 + 1e-12) + 1e-300);
            }
        }
    }

    #[test]
    fn tilted_sampler_rejects_nothing_impossible() {
        let p = MixingDensity::new(0.5, 2.0).unwrap();
        let t = TiltedExponent::new(&p, 1e-6);
        let mut rng = RngStream::new(0, 0).rng();
        for _ in 0..10_000 {
            let b = t.sample(&mut rng).unwrap();
            assert!(b > 0.0 && b < 1.0);
        }
    }
}

//! Random variates for waiting times, tail exponents and jump directions.

use rand::Rng;
use rand_distr::{Beta, Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use statrs::function::beta::ln_beta;

use crate::error::{ensure, Error, Result};
use crate::rng::open_unit;

/// Pareto tail law `P(T > t) = t^(−α)` for `t ≥ 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HeavyTailLaw {
    alpha: f64,
}

impl HeavyTailLaw {
    pub fn new(alpha: f64) -> Result<Self> {
        ensure(alpha > 0.0 && alpha < 1.0, "alpha", || {
            format!("must lie in (0, 1), got {alpha}")
        })?;
        Ok(Self { alpha })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn survival(&self, t: f64) -> f64 {
        if t < 1.0 {
            1.0
        } else {
            t.powf(-self.alpha)
        }
    }
}

/// Inverse-CDF map of the Pareto waiting time: `u^(−1/α)`.
#[inline]
pub fn pareto_from_uniform(alpha: f64, u: f64) -> f64 {
    u.powf(-1.0 / alpha)
}

pub fn sample_pareto_waiting<R: Rng + ?Sized>(law: &HeavyTailLaw, rng: &mut R) -> f64 {
    pareto_from_uniform(law.alpha, open_unit(rng))
}

/// Inverse-CDF map of the conditional waiting time at scale `n` and
/// exponent `β`: `(n u)^(−1/β)`.
#[inline]
pub fn conditional_from_uniform(n: f64, beta: f64, u: f64) -> f64 {
    (n * u).powf(-1.0 / beta)
}

/// Survival function of the conditional waiting time:
/// 1 below `n^(−1/β)`, `t^(−β)/n` above.
pub fn conditional_survival(n: f64, beta: f64, t: f64) -> f64 {
    if t < n.powf(-1.0 / beta) {
        1.0
    } else {
        t.powf(-beta) / n
    }
}

/// Waiting time `T⁽ⁿ⁾` given the tail exponent `β`.
pub fn sample_conditional_waiting<R: Rng + ?Sized>(n: f64, beta: f64, rng: &mut R) -> f64 {
    debug_assert!(n >= 1.0 && beta > 0.0 && beta < 1.0);
    conditional_from_uniform(n, beta, open_unit(rng))
}

/// Beta-family mixing density `p(β) ∝ β^(γ−1) (1−β)^(b−1)` on (0, 1).
///
/// It is regularly varying at zero with exponent `γ − 1` and satisfies
/// `∫₀¹ p(β)/(1−β) dβ < ∞` exactly when `b > 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MixingDensity {
    gamma: f64,
    b: f64,
}

impl MixingDensity {
    /// A density that satisfies both hypotheses of the distributed-order model.
    pub fn new(gamma: f64, b: f64) -> Result<Self> {
        let p = Self::unchecked(gamma, b)?;
        validate_mixing_density(&p)?;
        Ok(p)
    }

    /// Any proper Beta density (γ, b > 0), without the β → 1 integrability check.
    pub fn unchecked(gamma: f64, b: f64) -> Result<Self> {
        ensure(gamma > 0.0 && gamma.is_finite(), "gamma", || {
            format!("must be positive, got {gamma}")
        })?;
        ensure(b > 0.0 && b.is_finite(), "b", || {
            format!("must be positive, got {b}")
        })?;
        Ok(Self { gamma, b })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn ln_normalizer(&self) -> f64 {
        ln_beta(self.gamma, self.b)
    }

    pub fn pdf(&self, beta: f64) -> f64 {
        if beta <= 0.0 || beta >= 1.0 {
            return 0.0;
        }
        ((self.gamma - 1.0) * beta.ln() + (self.b - 1.0) * (1.0 - beta).ln() - self.ln_normalizer())
            .exp()
    }

    pub fn mean(&self) -> f64 {
        self.gamma / (self.gamma + self.b)
    }

    pub(crate) fn distribution(&self) -> Beta<f64> {
        Beta::new(self.gamma, self.b).expect("validated Beta parameters")
    }
}

/// Tail exponent `β ~ p`.
pub fn sample_mixing_exponent<R: Rng + ?Sized>(p: &MixingDensity, rng: &mut R) -> f64 {
    let dist = p.distribution();
    draw_open(&dist, rng)
}

/// Beta draws can round to the closed endpoints for extreme parameters;
/// those are redrawn so every exponent is strictly inside (0, 1).
#[inline]
pub(crate) fn draw_open<R: Rng + ?Sized>(dist: &Beta<f64>, rng: &mut R) -> f64 {
    loop {
        let b = dist.sample(rng);
        if b > 0.0 && b < 1.0 {
            return b;
        }
    }
}

/// One probe of the regular-variation ratio.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RatioProbe {
    pub t: f64,
    pub lambda: f64,
    pub ratio: f64,
    pub target: f64,
}

/// Outcome of [`validate_mixing_density`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MixingReport {
    pub probes: Vec<RatioProbe>,
    /// Every probe within 1% of `λ^(γ−1)`.
    pub regularly_varying: bool,
    /// `∫₀¹ p(β)/(1−β) dβ < ∞`.
    pub integrable: bool,
}

impl MixingReport {
    pub fn is_valid(&self) -> bool {
        self.regularly_varying && self.integrable
    }
}

/// Checks the two hypotheses on the mixing density. Fails outright when
/// the β → 1 integrability condition does not hold.
pub fn validate_mixing_density(p: &MixingDensity) -> Result<MixingReport> {
    if p.b <= 1.0 {
        return Err(Error::MixingDensity {
            gamma: p.gamma,
            b: p.b,
        });
    }
    let mut probes = Vec::with_capacity(4);
    for &t in &[1e-3, 1e-5] {
        for &lambda in &[0.5, 2.0] {
            let ratio = p.pdf(lambda * t) / p.pdf(t);
            probes.push(RatioProbe {
                t,
                lambda,
                ratio,
                target: lambda.powf(p.gamma - 1.0),
            });
        }
    }
    let regularly_varying = probes
        .iter()
        .all(|q| (q.ratio / q.target - 1.0).abs() <= 0.01);
    Ok(MixingReport {
        probes,
        regularly_varying,
        integrable: true,
    })
}

/// Law Λ of the jump directions on the unit sphere.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DirectionSpec", into = "DirectionSpec")]
pub enum DirectionMeasure {
    /// Finitely many unit vectors with positive weights summing to one.
    Atoms {
        dim: usize,
        atoms: Vec<Vec<f64>>,
        weights: Vec<f64>,
        cumulative: Vec<f64>,
    },
    /// Uniform law on the sphere in `dim` dimensions.
    Uniform { dim: usize },
}

impl DirectionMeasure {
    pub fn atoms(atoms: Vec<Vec<f64>>, weights: Vec<f64>) -> Result<Self> {
        ensure(!atoms.is_empty(), "atoms", || {
            "at least one atom is required".into()
        })?;
        ensure(atoms.len() == weights.len(), "weights", || {
            format!("{} atoms but {} weights", atoms.len(), weights.len())
        })?;
        let dim = atoms[0].len();
        ensure(dim >= 1, "dim", || "dimension must be at least 1".into())?;
        for (j, u) in atoms.iter().enumerate() {
            ensure(u.len() == dim, "atoms", || {
                format!("atom {j} has dimension {}, expected {dim}", u.len())
            })?;
            let norm = u.iter().map(|x| x * x).sum::<f64>().sqrt();
            ensure((norm - 1.0).abs() <= 1e-12, "atoms", || {
                format!("atom {j} has norm {norm}, expected 1")
            })?;
        }
        ensure(
            weights.iter().all(|&w| w > 0.0 && w.is_finite()),
            "weights",
            || "weights must be positive".into(),
        )?;
        let total: f64 = weights.iter().sum();
        ensure((total - 1.0).abs() <= 1e-12, "weights", || {
            format!("weights sum to {total}, expected 1")
        })?;
        let cumulative = cumulative_of(&weights);
        Ok(Self::Atoms {
            dim,
            atoms,
            weights,
            cumulative,
        })
    }

    /// Point mass at a single unit vector.
    pub fn point(u: Vec<f64>) -> Result<Self> {
        Self::atoms(vec![u], vec![1.0])
    }

    /// `½(δ_{+e₁} + δ_{−e₁})` in `dim` dimensions.
    pub fn symmetric_axis(dim: usize) -> Result<Self> {
        ensure(dim >= 1, "dim", || "dimension must be at least 1".into())?;
        let mut e = vec![0.0; dim];
        e[0] = 1.0;
        let mut m = e.clone();
        m[0] = -1.0;
        Self::atoms(vec![e, m], vec![0.5, 0.5])
    }

    pub fn uniform(dim: usize) -> Result<Self> {
        ensure(dim >= 1, "dim", || "dimension must be at least 1".into())?;
        Ok(Self::Uniform { dim })
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Atoms { dim, .. } | Self::Uniform { dim } => *dim,
        }
    }

    /// Mean direction `∫ u Λ(du)`.
    pub fn mean_direction(&self) -> Vec<f64> {
        match self {
            Self::Atoms {
                dim,
                atoms,
                weights,
                ..
            } => {
                let mut m = vec![0.0; *dim];
                for (u, w) in atoms.iter().zip(weights) {
                    for (mi, ui) in m.iter_mut().zip(u) {
                        *mi += w * ui;
                    }
                }
                m
            }
            Self::Uniform { dim } => vec![0.0; *dim],
        }
    }

    /// Writes a direction drawn from Λ into `out` (length `dim`).
    #[inline]
    pub fn sample_into<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) {
        match self {
            Self::Atoms {
                atoms, cumulative, ..
            } => {
                let j = if atoms.len() == 1 {
                    0
                } else {
                    let u: f64 = rng.random();
                    cumulative.partition_point(|&c| c <= u).min(atoms.len() - 1)
                };
                out.copy_from_slice(&atoms[j]);
            }
            Self::Uniform { dim } => {
                if *dim == 1 {
                    out[0] = if rng.random::<bool>() { 1.0 } else { -1.0 };
                    return;
                }
                loop {
                    let mut n2 = 0.0;
                    for x in out.iter_mut() {
                        *x = rng.sample(StandardNormal);
                        n2 += *x * *x;
                    }
                    if n2 > 1e-300 {
                        let inv = 1.0 / n2.sqrt();
                        out.iter_mut().for_each(|x| *x *= inv);
                        return;
                    }
                }
            }
        }
    }

    /// Deterministic quadrature `(node, weight)` pairs for integrals against Λ.
    /// Atoms are returned verbatim. The uniform law uses `±1` in one
    /// dimension, `nodes` equally spaced angles (offset by half a step) in
    /// two, and the 26-point degree-7 Lebedev rule in three unless another
    /// node count is requested, in which case a Gauss–Legendre × trapezoid
    /// product rule with at least that many nodes is built.
    pub fn quadrature(&self, nodes: usize) -> Result<Vec<(Vec<f64>, f64)>> {
        match self {
            Self::Atoms { atoms, weights, .. } => {
                Ok(atoms.iter().cloned().zip(weights.iter().copied()).collect())
            }
            Self::Uniform { dim: 1 } => Ok(vec![(vec![1.0], 0.5), (vec![-1.0], 0.5)]),
            Self::Uniform { dim: 2 } => {
                ensure(nodes >= 1, "nodes", || "need at least one node".into())?;
                let w = 1.0 / nodes as f64;
                Ok((0..nodes)
                    .map(|j| {
                        let th = std::f64::consts::TAU * (j as f64 + 0.5) * w;
                        (vec![th.cos(), th.sin()], w)
                    })
                    .collect())
            }
            Self::Uniform { dim: 3 } if nodes == 26 => Ok(lebedev26()),
            Self::Uniform { dim: 3 } => {
                ensure(nodes >= 2, "nodes", || "need at least two nodes".into())?;
                let m = ((nodes as f64 / 2.0).sqrt().ceil() as usize).max(1);
                let (z, wz) = crate::quad::gauss_legendre(m);
                let naz = 2 * m;
                let mut out = Vec::with_capacity(m * naz);
                for (zi, wi) in z.iter().zip(&wz) {
                    let r = (1.0 - zi * zi).sqrt();
                    for j in 0..naz {
                        let ph = std::f64::consts::TAU * (j as f64 + 0.5) / naz as f64;
                        out.push((vec![r * ph.cos(), r * ph.sin(), *zi], wi / 2.0 / naz as f64));
                    }
                }
                Ok(out)
            }
            Self::Uniform { dim } => Err(Error::InvalidParameter {
                name: "direction",
                reason: format!("no sphere quadrature for the uniform law in {dim} dimensions"),
            }),
        }
    }

    /// Default quadrature: 64 angles in two dimensions, 26 nodes in three.
    pub fn default_quadrature(&self) -> Result<Vec<(Vec<f64>, f64)>> {
        let nodes = match self.dim() {
            3 => 26,
            _ => 64,
        };
        self.quadrature(nodes)
    }
}

/// Serialized form of [`DirectionMeasure`].
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum DirectionSpec {
    Atoms {
        atoms: Vec<Vec<f64>>,
        weights: Vec<f64>,
    },
    Uniform {
        dim: usize,
    },
}

impl TryFrom<DirectionSpec> for DirectionMeasure {
    type Error = Error;

    fn try_from(spec: DirectionSpec) -> Result<Self> {
        match spec {
            DirectionSpec::Atoms { atoms, weights } => Self::atoms(atoms, weights),
            DirectionSpec::Uniform { dim } => Self::uniform(dim),
        }
    }
}

impl From<DirectionMeasure> for DirectionSpec {
    fn from(m: DirectionMeasure) -> Self {
        match m {
            DirectionMeasure::Atoms { atoms, weights, .. } => {
                DirectionSpec::Atoms { atoms, weights }
            }
            DirectionMeasure::Uniform { dim } => DirectionSpec::Uniform { dim },
        }
    }
}

fn cumulative_of(weights: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    weights
        .iter()
        .map(|w| {
            acc += w;
            acc
        })
        .collect()
}

fn lebedev26() -> Vec<(Vec<f64>, f64)> {
    let mut out = Vec::with_capacity(26);
    for axis in 0..3 {
        for sign in [1.0, -1.0] {
            let mut u = vec![0.0; 3];
            u[axis] = sign;
            out.push((u, 1.0 / 21.0));
        }
    }
    let h = std::f64::consts::FRAC_1_SQRT_2;
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        for si in [1.0, -1.0] {
            for sj in [1.0, -1.0] {
                let mut u = vec![0.0; 3];
                u[i] = si * h;
                u[j] = sj * h;
                out.push((u, 4.0 / 105.0));
            }
        }
    }
    let c = 1.0 / 3f64.sqrt();
    for sx in [1.0, -1.0] {
        for sy in [1.0, -1.0] {
            for sz in [1.0, -1.0] {
                out.push((vec![sx * c, sy * c, sz * c], 9.0 / 280.0));
            }
        }
    }
    out
}

/// Direction `u ~ Λ` as an owned vector.
pub fn sample_direction<R: Rng + ?Sized>(lambda: &DirectionMeasure, rng: &mut R) -> Vec<f64> {
    let mut out = vec![0.0; lambda.dim()];
    lambda.sample_into(rng, &mut out);
    out
}

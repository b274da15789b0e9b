//! Ensemble statistics: empirical characteristic functions, numerical
//! Laplace transforms, mean-square displacement, Hill tail index, distances.

use std::collections::BTreeMap;
use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Where an ensemble came from.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub model: String,
    pub parameters: BTreeMap<String, f64>,
    pub seed: u64,
}

/// `N` positions in `d` dimensions at a common time `t`, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    dim: usize,
    pub t: f64,
    samples: Vec<f64>,
    pub meta: Provenance,
}

impl Ensemble {
    pub fn new(dim: usize, t: f64, samples: Vec<f64>, meta: Provenance) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Input("ensemble dimension must be at least 1".into()));
        }
        if samples.is_empty() {
            return Err(Error::Input("ensemble is empty".into()));
        }
        if samples.len() % dim != 0 {
            return Err(Error::Input(format!(
                "{} values do not form rows of length {dim}",
                samples.len()
            )));
        }
        Ok(Self {
            dim,
            t,
            samples,
            meta,
        })
    }

    pub fn from_rows(t: f64, rows: &[Vec<f64>], meta: Provenance) -> Result<Self> {
        let dim = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::Input("rows have differing dimensions".into()));
        }
        Self::new(dim, t, rows.concat(), meta)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.samples.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.samples.chunks(self.dim)
    }
}

/// A Monte Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate<T> {
    pub value: T,
    pub stderr: f64,
}

/// Euclidean norm that stays finite as long as the true norm does.
pub fn euclidean_norm(x: &[f64]) -> f64 {
    x.iter().fold(0.0f64, |a, v| a.hypot(*v))
}

/// `e^(i⟨k, x⟩)` for one sample.
///
/// Coordinates with `k_j = 0` are skipped, so an infinite coordinate only
/// matters when it is actually probed; an infinite or undefined phase is
/// read as a uniformly spread one and contributes 0.
#[inline]
pub fn phase_factor(k: &[f64], x: &[f64]) -> Complex64 {
    let mut theta = 0.0;
    for (kj, xj) in k.iter().zip(x) {
        if *kj != 0.0 {
            theta += kj * xj;
        }
    }
    if theta.is_finite() {
        let (s, c) = theta.sin_cos();
        Complex64::new(c, s)
    } else {
        Complex64::new(0.0, 0.0)
    }
}

/// `(1/N) Σ e^(i⟨k, x_j⟩)` with standard error `√((1 − |ECF|²)/N)`.
pub fn empirical_cf(e: &Ensemble, k: &[f64]) -> Result<Estimate<Complex64>> {
    if k.len() != e.dim {
        return Err(Error::Input(format!(
            "k has {} components, ensemble has dimension {}",
            k.len(),
            e.dim
        )));
    }
    let n = e.len() as f64;
    let sum: Complex64 = e.rows().map(|x| phase_factor(k, x)).sum();
    let value = sum / n;
    let stderr = ((1.0 - value.norm_sqr()).max(0.0) / n).sqrt();
    Ok(Estimate { value, stderr })
}

/// Laplace transform of samples `f(t_m)` on the uniform grid `t_m = m T/M`:
/// trapezoid rule on `[0, T]` plus the constant tail `f(T) e^(−sT)/s`.
pub fn numerical_laplace(values: &[Complex64], horizon: f64, s: Complex64) -> Result<Complex64> {
    if s.re.is_nan() || s.re <= 0.0 {
        return Err(Error::Domain(s.re));
    }
    if values.len() < 3 {
        return Err(Error::Input(format!(
            "need at least 3 grid values (M ≥ 2), got {}",
            values.len()
        )));
    }
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(Error::Input(format!(
            "horizon must be positive, got {horizon}"
        )));
    }
    let m = values.len() - 1;
    let h = horizon / m as f64;
    let step = (-s * h).exp();
    let mut damp = Complex64::new(1.0, 0.0);
    let mut acc = Complex64::new(0.0, 0.0);
    for (j, &f) in values.iter().enumerate() {
        let w = if j == 0 || j == m { 0.5 } else { 1.0 };
        acc += f * damp * w;
        // recompute exactly every 256 steps to keep rounding from accumulating
        damp = if (j + 1) % 256 == 0 {
            (-s * (h * (j + 1) as f64)).exp()
        } else {
            damp * step
        };
    }
    let tail = values[m] * (-s * horizon).exp() / s;
    Ok(acc * h + tail)
}

/// Mean of `‖x‖²` with its standard error.
pub fn msd(e: &Ensemble) -> Estimate<f64> {
    let n = e.len() as f64;
    let sq: Vec<f64> = e.rows().map(|x| x.iter().map(|v| v * v).sum()).collect();
    let mean = sq.iter().sum::<f64>() / n;
    let var = if e.len() > 1 {
        sq.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    Estimate {
        value: mean,
        stderr: (var / n).sqrt(),
    }
}

/// Empirical second-moment matrix `(1/N) Σ x xᵀ`, row-major `d × d`.
pub fn second_moment_matrix(e: &Ensemble) -> Vec<f64> {
    let d = e.dim;
    let mut m = vec![0.0; d * d];
    for x in e.rows() {
        for i in 0..d {
            for j in 0..d {
                m[i * d + j] += x[i] * x[j];
            }
        }
    }
    let n = e.len() as f64;
    m.iter_mut().for_each(|v| *v /= n);
    m
}

/// Hill estimate of the tail index from the `m` largest samples.
pub fn hill_tail_index(samples: &[f64], m: usize) -> Result<f64> {
    if m == 0 || m >= samples.len() {
        return Err(Error::Input(format!(
            "need 0 < m < N, got m = {m} with N = {}",
            samples.len()
        )));
    }
    if let Some(bad) = samples.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
        return Err(Error::Input(format!(
            "samples must be positive and finite, found {bad}"
        )));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let threshold = sorted[m].ln();
    let mean = sorted[..m].iter().map(|x| x.ln() - threshold).sum::<f64>() / m as f64;
    if mean <= 0.0 {
        return Err(Error::Input(
            "degenerate sample: the top order statistics coincide".into(),
        ));
    }
    Ok(1.0 / mean)
}

/// `max_k |ECF_a(k) − ECF_b(k)|` over a grid of wave vectors.
pub fn ecf_distance(a: &Ensemble, b: &Ensemble, kgrid: &[Vec<f64>]) -> Result<f64> {
    if a.dim != b.dim {
        return Err(Error::Input(format!(
            "dimension mismatch: {} vs {}",
            a.dim, b.dim
        )));
    }
    if kgrid.is_empty() {
        return Err(Error::Input("empty k-grid".into()));
    }
    let mut worst: f64 = 0.0;
    for k in kgrid {
        let d = (empirical_cf(a, k)?.value - empirical_cf(b, k)?.value).norm();
        worst = worst.max(d);
    }
    Ok(worst)
}

/// One-sample Kolmogorov–Smirnov statistic against a continuous CDF.
pub fn ks_statistic(samples: &[f64], cdf: impl Fn(f64) -> f64) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::Input("no samples".into()));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in sorted.iter().enumerate() {
        let f = cdf(x);
        d = d.max((i + 1) as f64 / n - f).max(f - i as f64 / n);
    }
    Ok(d)
}

/// CSV `k_1..k_d, ecf_re, ecf_im, stderr`.
pub fn write_ecf_csv<W: Write>(
    rows: &[(Vec<f64>, Estimate<Complex64>)],
    mut out: W,
) -> std::io::Result<()> {
    let dim = rows.first().map_or(1, |r| r.0.len());
    let mut header: Vec<String> = (1..=dim).map(|i| format!("k_{i}")).collect();
    header.extend(["ecf_re", "ecf_im", "stderr"].map(String::from));
    writeln!(out, "{}", header.join(","))?;
    for (k, e) in rows {
        let mut cells: Vec<String> = k.iter().map(|v| format!("{v:e}")).collect();
        cells.push(format!("{:e}", e.value.re));
        cells.push(format!("{:e}", e.value.im));
        cells.push(format!("{:e}", e.stderr));
        writeln!(out, "{}", cells.join(","))?;
    }
    Ok(())
}

/// CSV `t, msd, stderr`.
pub fn write_msd_csv<W: Write>(rows: &[(f64, Estimate<f64>)], mut out: W) -> std::io::Result<()> {
    writeln!(out, "t,msd,stderr")?;
    for (t, e) in rows {
        writeln!(out, "{t:e},{:e},{:e}", e.value, e.stderr)?;
    }
    Ok(())
}

/// A complex number as a JSON-friendly pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexValue {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for ComplexValue {
    fn from(z: Complex64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

impl From<f64> for ComplexValue {
    fn from(x: f64) -> Self {
        Self { re: x, im: 0.0 }
    }
}

/// One probe of a verification suite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationRecord {
    pub suite: String,
    pub model: String,
    pub point: BTreeMap<String, f64>,
    pub theory: ComplexValue,
    pub monte_carlo: ComplexValue,
    pub stderr: f64,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl VerificationRecord {
    /// `pass` is set from `|theory − monte_carlo| ≤ tolerance`.
    pub fn absolute(
        suite: &str,
        model: &str,
        point: BTreeMap<String, f64>,
        theory: Complex64,
        monte_carlo: Complex64,
        stderr: f64,
        tolerance: f64,
    ) -> Self {
        let pass = (theory - monte_carlo).norm() <= tolerance;
        Self {
            suite: suite.into(),
            model: model.into(),
            point,
            theory: theory.into(),
            monte_carlo: monte_carlo.into(),
            stderr,
            tolerance,
            pass,
            note: None,
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

//! Fourier–Laplace symbols of the fractional material derivative and the
//! transformed densities of the wait-first and jump-first limits.
//!
//! Conventions: `k` is the Fourier variable, `s` the Laplace variable with
//! `Re s > 0`, `a = ⟨k, u⟩` for a direction `u`. Complex powers use the
//! principal branch, which is unambiguous because `Re(s − i a) = Re s > 0`.

use std::io::Write;

use num_complex::Complex64;
use statrs::function::gamma::gamma;

use crate::error::{ensure, Error, Result};
use crate::limit::{Scenario, SubordinatorLaw};
use crate::quad::{beta_weighted, BetaRule};
use crate::sampling::DirectionMeasure;

/// Quadrature settings for symbol evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlQuadrature {
    /// Nodes for a uniform sphere law; `None` picks 64 (d = 2) or 26 (d = 3).
    pub sphere_nodes: Option<usize>,
    pub beta: BetaRule,
}

impl Default for FlQuadrature {
    fn default() -> Self {
        Self {
            sphere_nodes: None,
            beta: BetaRule::Adaptive { rel_tol: 1e-8 },
        }
    }
}

/// Everything needed to evaluate ψ and the transformed densities.
#[derive(Debug, Clone, PartialEq)]
pub struct FLModelSpec {
    pub kind: SubordinatorLaw,
    pub lambda: DirectionMeasure,
    pub scenario: Scenario,
    pub quadrature: FlQuadrature,
}

impl FLModelSpec {
    pub fn new(
        kind: SubordinatorLaw,
        lambda: DirectionMeasure,
        scenario: Scenario,
    ) -> Result<Self> {
        kind.validate()?;
        Ok(Self {
            kind,
            lambda,
            scenario,
            quadrature: FlQuadrature::default(),
        })
    }

    pub fn with_quadrature(mut self, quadrature: FlQuadrature) -> Self {
        self.quadrature = quadrature;
        self
    }

    fn directions(&self) -> Result<Vec<(Vec<f64>, f64)>> {
        match (&self.lambda, self.quadrature.sphere_nodes) {
            (DirectionMeasure::Uniform { .. }, Some(n)) => self.lambda.quadrature(n),
            _ => self.lambda.default_quadrature(),
        }
    }

    /// `(⟨k, u⟩, weight)` over the atoms or quadrature nodes of Λ.
    fn projections(&self, k: &[f64]) -> Result<Vec<(f64, f64)>> {
        ensure(k.len() == self.lambda.dim(), "k", || {
            format!(
                "has {} components, direction law has dimension {}",
                k.len(),
                self.lambda.dim()
            )
        })?;
        Ok(self
            .directions()?
            .into_iter()
            .map(|(u, w)| (u.iter().zip(k).map(|(a, b)| a * b).sum(), w))
            .collect())
    }
}

/// A Fourier–Laplace evaluation point.
#[derive(Debug, Clone, PartialEq)]
pub struct FLPoint {
    pub k: Vec<f64>,
    pub s: Complex64,
}

impl FLPoint {
    pub fn new(k: Vec<f64>, s: Complex64) -> Result<Self> {
        if s.re.is_nan() || s.re <= 0.0 {
            return Err(Error::Domain(s.re));
        }
        Ok(Self { k, s })
    }

    pub fn real(k: Vec<f64>, s: f64) -> Result<Self> {
        Self::new(k, Complex64::new(s, 0.0))
    }
}

/// Principal branch `z^p = |z|^p e^(i p arg z)`.
#[inline]
pub fn principal_pow(z: Complex64, p: f64) -> Complex64 {
    let r = z.norm();
    if r == 0.0 {
        return if p > 0.0 {
            Complex64::new(0.0, 0.0)
        } else if p == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(f64::INFINITY, 0.0)
        };
    }
    Complex64::from_polar(r.powf(p), p * z.arg())
}

/// `(e^w − 1)/w` without cancellation for small `w`.
fn expm1_over(w: Complex64) -> Complex64 {
    if w.norm() < 1e-4 {
        // 1 + w/2 + w²/6 + w³/24
        Complex64::new(1.0, 0.0) + w * (0.5 + w * (1.0 / 6.0 + w / 24.0))
    } else {
        (w.exp() - 1.0) / w
    }
}

fn check_point(pt: &FLPoint) -> Result<()> {
    if pt.s.re.is_nan() || pt.s.re <= 0.0 {
        return Err(Error::Domain(pt.s.re));
    }
    Ok(())
}

fn inv_normalizer(law: &SubordinatorLaw) -> f64 {
    match law {
        SubordinatorLaw::Distributed { mixing } => (-mixing.ln_normalizer()).exp(),
        SubordinatorLaw::Stable { .. } => 1.0,
    }
}

/// ψ(k, s): `∫ (s − i⟨k,u⟩)^α Λ(du)` or `∫₀¹ ∫ (s − i⟨k,u⟩)^β Γ(1−β) Λ(du) p(β) dβ`.
pub fn fl_exponent(model: &FLModelSpec, pt: &FLPoint) -> Result<Complex64> {
    check_point(pt)?;
    let proj = model.projections(&pt.k)?;
    let s = pt.s;
    Ok(match model.kind {
        SubordinatorLaw::Stable { alpha } => proj
            .iter()
            .map(|&(a, w)| principal_pow(s - Complex64::i() * a, alpha) * w)
            .sum(),
        SubordinatorLaw::Distributed { mixing } => {
            // Γ(1−β)(1−β)^(b−1) = Γ(2−β)(1−β)^(b−2): a Beta(γ, b−1) weight
            let v = beta_weighted(
                |b| [sphere_sum(&proj, s, b) * gamma(2.0 - b)],
                mixing.gamma(),
                mixing.b() - 1.0,
                model.quadrature.beta,
            );
            v[0] * inv_normalizer(&model.kind)
        }
    })
}

fn sphere_sum(proj: &[(f64, f64)], s: Complex64, beta: f64) -> Complex64 {
    proj.iter()
        .map(|&(a, w)| principal_pow(s - Complex64::i() * a, beta) * w)
        .sum()
}

/// The material derivative acts as multiplication by ψ in FL space.
pub fn apply_material_derivative_fl(
    model: &FLModelSpec,
    pt: &FLPoint,
    phat: Complex64,
) -> Result<Complex64> {
    Ok(fl_exponent(model, pt)? * phat)
}

/// Wait-first transformed density: `s^(α−1)/ψ` or `∫Γ(1−β) s^(β−1) p(β) dβ / ψ`.
pub fn theoretical_p1_fl(model: &FLModelSpec, pt: &FLPoint) -> Result<Complex64> {
    check_point(pt)?;
    let s = pt.s;
    match model.kind {
        SubordinatorLaw::Stable { alpha } => {
            Ok(principal_pow(s, alpha - 1.0) / fl_exponent(model, pt)?)
        }
        SubordinatorLaw::Distributed { mixing } => {
            let proj = model.projections(&pt.k)?;
            // numerator and ψ share one node set, so k = 0 gives exactly 1/s up to rounding
            let v = beta_weighted(
                |b| {
                    let g = gamma(2.0 - b);
                    [principal_pow(s, b - 1.0) * g, sphere_sum(&proj, s, b) * g]
                },
                mixing.gamma(),
                mixing.b() - 1.0,
                model.quadrature.beta,
            );
            Ok(v[0] / v[1])
        }
    }
}

fn singular_check(proj: &[(f64, f64)], k: &[f64]) -> Result<()> {
    let scale = k.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    for (j, &(a, _)) in proj.iter().enumerate() {
        if scale == 0.0 || a.abs() <= 1e-14 * scale {
            return Err(Error::SingularConfiguration { atom: j });
        }
    }
    Ok(())
}

/// FL transform of the jump-first source term, per unit weight of Λ.
///
/// Stable: `α [(−ia)^(α−1) − (s−ia)^(α−1)] / s`; distributed:
/// `∫₀¹ Γ(1−β) [(−ia)^(β−1) − (s−ia)^(β−1)] p(β) dβ / s`.
pub fn jump_first_source_fl(model: &FLModelSpec, pt: &FLPoint) -> Result<Complex64> {
    check_point(pt)?;
    let proj = model.projections(&pt.k)?;
    singular_check(&proj, &pt.k)?;
    let s = pt.s;
    let i = Complex64::i();
    Ok(match model.kind {
        SubordinatorLaw::Stable { alpha } => {
            let sum: Complex64 = proj
                .iter()
                .map(|&(a, w)| {
                    (principal_pow(-i * a, alpha - 1.0) - principal_pow(s - i * a, alpha - 1.0)) * w
                })
                .sum();
            sum * alpha / s
        }
        SubordinatorLaw::Distributed { mixing } => {
            let logs: Vec<(Complex64, Complex64, f64)> = proj
                .iter()
                .map(|&(a, w)| ((-i * a).ln(), (s - i * a).ln(), w))
                .collect();
            // with x = 1−β, d = L₂ − L₁:
            // Γ(1−β)[e^(−xL₁) − e^(−xL₂)] = Γ(2−β) e^(−xL₂) d (e^(xd) − 1)/(xd)
            let v = beta_weighted(
                |b| {
                    let x = 1.0 - b;
                    let g = gamma(2.0 - b);
                    let total: Complex64 = logs
                        .iter()
                        .map(|&(l1, l2, w)| {
                            let d = l2 - l1;
                            (-l2 * x).exp() * d * expm1_over(d * x) * w
                        })
                        .sum();
                    [total * g]
                },
                mixing.gamma(),
                mixing.b(),
                model.quadrature.beta,
            );
            v[0] * inv_normalizer(&model.kind) / s
        }
    })
}

/// Jump-first transformed density: the source term divided by ψ.
///
/// Undefined when `⟨k, u⟩ = 0` on any direction, `k = 0` included.
pub fn theoretical_p2_fl(model: &FLModelSpec, pt: &FLPoint) -> Result<Complex64> {
    let num = jump_first_source_fl(model, pt)?;
    Ok(num / fl_exponent(model, pt)?)
}

/// p̂₁ or p̂₂ according to the model's scenario.
pub fn theoretical_density_fl(model: &FLModelSpec, pt: &FLPoint) -> Result<Complex64> {
    match model.scenario {
        Scenario::WaitFirst => theoretical_p1_fl(model, pt),
        Scenario::JumpFirst => theoretical_p2_fl(model, pt),
    }
}

/// One row of a symbol table.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolRow {
    pub k: Vec<f64>,
    pub s: Complex64,
    pub psi: Complex64,
    pub p1: Complex64,
    /// `None` where the jump-first density is singular.
    pub p2: Option<Complex64>,
}

/// Evaluates ψ, p̂₁ and p̂₂ over the product of a k-grid and an s-grid.
pub fn symbol_table(
    model: &FLModelSpec,
    kgrid: &[Vec<f64>],
    sgrid: &[Complex64],
) -> Result<Vec<SymbolRow>> {
    let mut rows = Vec::with_capacity(kgrid.len() * sgrid.len());
    for k in kgrid {
        for &s in sgrid {
            let pt = FLPoint::new(k.clone(), s)?;
            let p2 = match theoretical_p2_fl(model, &pt) {
                Ok(v) => Some(v),
                Err(Error::SingularConfiguration { .. }) => None,
                Err(e) => return Err(e),
            };
            rows.push(SymbolRow {
                k: k.clone(),
                s,
                psi: fl_exponent(model, &pt)?,
                p1: theoretical_p1_fl(model, &pt)?,
                p2,
            });
        }
    }
    Ok(rows)
}

/// CSV with columns `k_1..k_d, s_re, s_im, psi_re, psi_im, p1_re, p1_im, p2_re, p2_im`.
pub fn write_symbol_table<W: Write>(rows: &[SymbolRow], mut out: W) -> std::io::Result<()> {
    let dim = rows.first().map_or(1, |r| r.k.len());
    let mut header: Vec<String> = (1..=dim).map(|i| format!("k_{i}")).collect();
    header.extend(
        [
            "s_re", "s_im", "psi_re", "psi_im", "p1_re", "p1_im", "p2_re", "p2_im",
        ]
        .map(String::from),
    );
    writeln!(out, "{}", header.join(","))?;
    for r in rows {
        let mut cells: Vec<String> = r.k.iter().map(|v| format!("{v:e}")).collect();
        let p2 = r.p2.unwrap_or(Complex64::new(f64::NAN, f64::NAN));
        for z in [r.s, r.psi, r.p1, p2] {
            cells.push(format!("{:e}", z.re));
            cells.push(format!("{:e}", z.im));
        }
        writeln!(out, "{}", cells.join(","))?;
    }
    Ok(())
}

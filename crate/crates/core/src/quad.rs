//! Numerical quadrature: adaptive Gauss–Kronrod (7/15) for vector-valued
//! complex integrands, fixed Gauss–Legendre rules, and integrals against
//! Beta-type weights `β^(a−1) (1−β)^(c−1)` on (0, 1).
//!
//! The weighted form is handled by splitting at ½ and substituting
//! `β = u^(1/a)` on the left half and `1 − β = v^(1/c)` on the right half.
//! Both endpoint singularities are absorbed into the Jacobian, so the
//! transformed integrands stay smooth whenever the remaining factor is.

use num_complex::Complex64;

#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Tolerances for [`integrate`].
#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-14,
            max_intervals: 2000,
        }
    }
}

impl QuadOptions {
    pub fn rel(rel_tol: f64) -> Self {
        Self {
            rel_tol,
            ..Self::default()
        }
    }
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct Integral<const N: usize> {
    pub value: [Complex64; N],
    /// Largest component-wise error estimate.
    pub abs_err: f64,
    pub intervals: usize,
    pub converged: bool,
}

struct Piece<const N: usize> {
    a: f64,
    b: f64,
    value: [Complex64; N],
    err: f64,
}

fn kronrod<const N: usize, F>(f: &mut F, a: f64, b: f64) -> Piece<N>
where
    F: FnMut(f64) -> [Complex64; N],
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let zero = Complex64::new(0.0, 0.0);
    let fc = f(center);
    let mut rk = [zero; N];
    let mut rg = [zero; N];
    for c in 0..N {
        rk[c] = fc[c] * WGK[7];
        rg[c] = fc[c] * WG[3];
    }
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        for c in 0..N {
            let s = f1[c] + f2[c];
            rk[c] += s * WGK[j];
            if j % 2 == 1 {
                rg[c] += s * WG[j / 2];
            }
        }
    }
    let mut err = 0.0f64;
    let mut value = [zero; N];
    for c in 0..N {
        value[c] = rk[c] * half;
        err = err.max(((rk[c] - rg[c]) * half).norm());
    }
    Piece { a, b, value, err }
}

/// Adaptive 15-point Gauss–Kronrod integration of a vector of complex
/// functions over `[a, b]`, bisecting the worst interval until the summed
/// error estimate meets `max(abs_tol, rel_tol · max|I_c|)`.
pub fn integrate<const N: usize, F>(mut f: F, a: f64, b: f64, opts: QuadOptions) -> Integral<N>
where
    F: FnMut(f64) -> [Complex64; N],
{
    let mut pieces = vec![kronrod(&mut f, a, b)];
    loop {
        let zero = Complex64::new(0.0, 0.0);
        let mut total = [zero; N];
        let mut err = 0.0;
        for p in &pieces {
            for (t, v) in total.iter_mut().zip(&p.value) {
                *t += v;
            }
            err += p.err;
        }
        let scale = total.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let target = opts.abs_tol.max(opts.rel_tol * scale);
        if err <= target || pieces.len() >= opts.max_intervals {
            return Integral {
                value: total,
                abs_err: err,
                intervals: pieces.len(),
                converged: err <= target,
            };
        }
        let (worst, _) =
            pieces.iter().enumerate().fold(
                (0, -1.0),
                |acc, (i, p)| if p.err > acc.1 { (i, p.err) } else { acc },
            );
        let p = pieces.swap_remove(worst);
        let mid = 0.5 * (p.a + p.b);
        if mid <= p.a || mid >= p.b {
            // interval exhausted at machine resolution
            return Integral {
                value: total,
                abs_err: err,
                intervals: pieces.len() + 1,
                converged: false,
            };
        }
        pieces.push(kronrod(&mut f, p.a, mid));
        pieces.push(kronrod(&mut f, mid, p.b));
    }
}

/// Real-valued convenience wrapper around [`integrate`]; returns `(value, error)`.
pub fn integrate_real<F>(mut f: F, a: f64, b: f64, opts: QuadOptions) -> (f64, f64)
where
    F: FnMut(f64) -> f64,
{
    let r = integrate(|x| [Complex64::new(f(x), 0.0)], a, b, opts);
    (r.value[0].re, r.abs_err)
}

/// Nodes and weights of the `n`-point Gauss–Legendre rule on [−1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "Gauss–Legendre rule needs at least one node");
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    let nf = n as f64;
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { z } else { p1 };
            let pn1 = if n == 1 { 1.0 } else { p0 };
            dp = nf * (z * pn - pn1) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        if n == 1 {
            dp = 1.0;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

/// How the β-integrals of the distributed-order model are evaluated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BetaRule {
    /// Adaptive Gauss–Kronrod to the given relative tolerance.
    Adaptive { rel_tol: f64 },
    /// Fixed Gauss–Legendre rule with this many nodes on each half of (0, 1).
    Fixed { nodes: usize },
}

impl Default for BetaRule {
    fn default() -> Self {
        BetaRule::Adaptive { rel_tol: 1e-8 }
    }
}

/// ∫₀¹ f(β) β^(a−1) (1−β)^(c−1) dβ for a, c > 0, with all components of `f`
/// evaluated on one shared node set.
pub fn beta_weighted<const N: usize, F>(mut f: F, a: f64, c: f64, rule: BetaRule) -> [Complex64; N]
where
    F: FnMut(f64) -> [Complex64; N],
{
    debug_assert!(a > 0.0 && c > 0.0);
    let zero = Complex64::new(0.0, 0.0);
    // β = u^q near 0 and 1 − β = w^r near 1 turn the endpoint powers into
    // u^(qa−1), w^(rc−1) with large exponents, smooth enough for Gauss rules
    let q = (8.0 / a).ceil().max(1.0);
    let r = (8.0 / c).ceil().max(1.0);
    let mut left = |u: f64| {
        let beta = u.powf(q);
        let w = q * u.powf(q * a - 1.0) * (1.0 - beta).powf(c - 1.0);
        let mut y = f(beta);
        for z in y.iter_mut() {
            *z *= w;
        }
        y
    };
    let u_max = 0.5f64.powf(1.0 / q);
    let left_val = match rule {
        BetaRule::Adaptive { rel_tol } => {
            integrate(&mut left, 0.0, u_max, QuadOptions::rel(rel_tol)).value
        }
        BetaRule::Fixed { nodes } => fixed(&mut left, 0.0, u_max, nodes),
    };
    let mut right = |v: f64| {
        let one_minus = v.powf(r);
        let beta = 1.0 - one_minus;
        let w = r * v.powf(r * c - 1.0) * beta.powf(a - 1.0);
        let mut y = f(beta);
        for z in y.iter_mut() {
            *z *= w;
        }
        y
    };
    let v_max = 0.5f64.powf(1.0 / r);
    let right_val = match rule {
        BetaRule::Adaptive { rel_tol } => {
            integrate(&mut right, 0.0, v_max, QuadOptions::rel(rel_tol)).value
        }
        BetaRule::Fixed { nodes } => fixed(&mut right, 0.0, v_max, nodes),
    };
    let mut out = [zero; N];
    for i in 0..N {
        out[i] = left_val[i] + right_val[i];
    }
    out
}

fn fixed<const N: usize, F>(f: &mut F, a: f64, b: f64, nodes: usize) -> [Complex64; N]
where
    F: FnMut(f64) -> [Complex64; N],
{
    let (x, w) = gauss_legendre(nodes);
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut out = [Complex64::new(0.0, 0.0); N];
    for (xi, wi) in x.iter().zip(&w) {
        let y = f(mid + half * xi);
        for c in 0..N {
            out[c] += y[c] * (wi * half);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use statrs::function::beta::beta;

    #[test]
    fn kronrod_polynomial_exact() {
        let (v, _) = integrate_real(
            |x| x.powi(9) - 3.0 * x * x,
            0.0,
            2.0,
            QuadOptions::default(),
        );
        assert!((v - (1024.0 / 10.0 - 8.0)).abs() < 1e-12);
    }

    #[test]
    fn adaptive_handles_sqrt_singularity() {
        let (v, _) = integrate_real(|x| 1.0 / x.sqrt(), 0.0, 1.0, QuadOptions::rel(1e-10));
        assert!((v - 2.0).abs() < 1e-8, "{v}");
    }

    #[test]
    fn oscillatory_complex() {
        // ∫₀^π e^{ix} dx = 2i
        let r = integrate(
            |x| [Complex64::new(0.0, x).exp()],
            0.0,
            std::f64::consts::PI,
            QuadOptions::default(),
        );
        assert!((r.value[0] - Complex64::new(0.0, 2.0)).norm() < 1e-12);
        assert!(r.converged);
    }

    #[test]
    fn legendre_rules() {
        for n in [1usize, 2, 5, 16, 64] {
            let (x, w) = gauss_legendre(n);
            let sw: f64 = w.iter().sum();
            assert!((sw - 2.0).abs() < 1e-13, "n={n}");
            // exact for degree 2n−1
            let deg = 2 * n - 1;
            let s: f64 = x
                .iter()
                .zip(&w)
                .map(|(x, w)| w * x.powi(deg as i32 - 1))
                .sum();
            let exact = if (deg - 1) % 2 == 0 {
                2.0 / deg as f64
            } else {
                0.0
            };
            assert!((s - exact).abs() < 1e-12, "n={n} {s} {exact}");
        }
    }

    #[test]
    fn beta_weight_normalizer() {
        for (a, c) in [(0.5, 2.0), (1.0, 1.0), (0.3, 1.2), (2.0, 1.5), (50.0, 2.0)] {
            let v = beta_weighted(|_| [Complex64::new(1.0, 0.0)], a, c, BetaRule::default());
            assert!((v[0].re / beta(a, c) - 1.0).abs() < 1e-9, "a={a} c={c}");
            let v = beta_weighted(
                |_| [Complex64::new(1.0, 0.0)],
                a,
                c,
                BetaRule::Fixed { nodes: 32 },
            );
            assert!(
                (v[0].re / beta(a, c) - 1.0).abs() < 1e-9,
                "fixed a={a} c={c}"
            );
        }
    }

    #[test]
    fn beta_weight_first_moment() {
        // E β under Beta(a, c) = a/(a+c)
        let (a, c) = (0.5, 1.3);
        let v = beta_weighted(|b| [Complex64::new(b, 0.0)], a, c, BetaRule::default());
        assert!((v[0].re / beta(a, c) - a / (a + c)).abs() < 1e-9);
    }
}

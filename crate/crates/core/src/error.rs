use thiserror::Error;

/// Errors raised by the simulation and evaluation routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A parameter lies outside its admissible range.
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// The mixing density violates the integrability condition at β → 1.
    #[error(
        "mixing density Beta(γ={gamma}, b={b}) violates the integrability condition \
         ∫₀¹ p(β)/(1−β) dβ < ∞ (requires b > 1)"
    )]
    MixingDensity { gamma: f64, b: f64 },

    /// A time argument fell outside the range a path was simulated for.
    #[error("time {t} outside the simulated range [0, {horizon}]")]
    OutOfRange { t: f64, horizon: f64 },

    /// The subordinator path never exceeded the requested level.
    #[error(
        "subordinator reaches only {reached} by operational time {tau_max}, below level {level}; \
         extend tau_max"
    )]
    Coverage {
        level: f64,
        reached: f64,
        tau_max: f64,
    },

    /// The Laplace variable must lie in the open right half-plane.
    #[error("Laplace variable must have positive real part, got Re(s) = {0}")]
    Domain(f64),

    /// ⟨k, u⟩ vanishes on an atom of the direction measure.
    #[error(
        "⟨k, u⟩ = 0 on direction atom {atom}: the jump-first source term is not defined \
         for wave vectors orthogonal to a jump direction"
    )]
    SingularConfiguration { atom: usize },

    /// Bad data handed to an estimator.
    #[error("invalid input: {0}")]
    Input(String),

    /// A sampler could not produce a draw.
    #[error("configuration error: {0}")]
    Configuration(String),

    /// Encoding or decoding of an interchange file failed.
    #[error("format error: {0}")]
    Format(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn ensure(
    cond: bool,
    name: &'static str,
    reason: impl FnOnce() -> String,
) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            reason: reason(),
        })
    }
}

//! Simulation and Fourier–Laplace verification of coupled Lévy walks.
//!
//! The crate covers four pre-limit walks (wait-first and jump-first, with a
//! fixed or a randomly mixed tail exponent), the coupled Lévy pairs `(L, S)`
//! that describe their scaling limits, the symbols of the fractional
//! material derivative, and the ensemble statistics that tie the two sides
//! together.
//!
//! ```
//! use levywalk::{simulate_lw, DirectionMeasure, HeavyTailLaw, RngStream};
//!
//! let law = HeavyTailLaw::new(0.5)?;
//! let lambda = DirectionMeasure::uniform(2)?;
//! let path = simulate_lw(&law, &lambda, 100.0, &mut RngStream::new(42, 0).rng())?;
//! let x = path.position_at(100.0)?;
//! assert!(x.iter().map(|v| v * v).sum::<f64>().sqrt() <= 100.0);
//! # Ok::<(), levywalk::Error>(())
//! ```

pub mod error;
pub mod fl;
pub mod io;
pub mod limit;
pub mod quad;
pub mod rng;
pub mod sampling;
pub mod stats;
pub mod walk;

pub use error::{Error, Result};
pub use fl::{
    apply_material_derivative_fl, fl_exponent, theoretical_p1_fl, theoretical_p2_fl, FLModelSpec,
    FLPoint, FlQuadrature,
};
pub use limit::{
    inverse_subordinator, limit_position, simulate_coupled_jumps, small_jump_drift, tail_mass,
    truncation_bias, CoupledJumpList, CoupledJumpSampler, LevyTriplet, Scenario, SubordinatorLaw,
};
pub use rng::RngStream;
pub use sampling::{
    sample_conditional_waiting, sample_direction, sample_mixing_exponent, sample_pareto_waiting,
    validate_mixing_density, DirectionMeasure, HeavyTailLaw, MixingDensity,
};
pub use stats::{ecf_distance, empirical_cf, hill_tail_index, msd, numerical_laplace, Ensemble};
pub use walk::{
    rescaled_lw_position, rescaled_olw_position, simulate_glw, simulate_golw, simulate_lw,
    simulate_olw, WalkKind, WalkPath,
};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/sampling.md")]
    mod sampling {}
    #[doc = include_str!("../../../book/src/walks.md")]
    mod walks {}
    #[doc = include_str!("../../../book/src/limits.md")]
    mod limits {}
    #[doc = include_str!("../../../book/src/fl-calculus.md")]
    mod fl_calculus {}
    #[doc = include_str!("../../../book/src/statistics.md")]
    mod statistics {}
}

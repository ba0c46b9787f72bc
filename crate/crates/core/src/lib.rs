//! Convergent Laurent (WTC) series solutions of the generalized nonlinear
//! Schrodinger equation
//!
//! ```text
//! i u_t + u_xx = 2 |u|^2 u + a(x, t) u,
//! a(x, t) = x^2 (q'/2 - q^2) + x p1 + p0 + i q,
//! ```
//!
//! expanded about the movable singularity manifold `x + psi(t) = 0`.
//!
//! * [`jet`]: truncated Taylor series in `t`, the representation of every
//!   `t`-dependent coefficient.
//! * [`potential`]: the admissible potential and its expansion in `Psi`.
//! * [`recursion`]: the coefficient recursion with its two resonances.
//! * [`verify`]: coefficient residuals, conjugacy, pointwise PDE residuals and
//!   growth / radius estimates.
//!
//! The algebra is generic over [`Scalar`] (`f32`, `f64`, [`BigRational`]);
//! sampling and fitting need [`Real`]. Aliases for the common instantiations
//! are exported below.

pub mod corpus;
pub mod error;
pub mod jet;
pub mod potential;
pub mod recursion;
pub mod scalar;
pub mod verify;

pub use error::{Result, WtcError};
pub use jet::Jet;
pub use num_complex::Complex;
pub use num_rational::BigRational;
pub use potential::{
    expand_potential, potential_identity_defect, PotentialExpansion, PotentialSpec,
};
pub use recursion::{
    convolution_b, generate, generate_with, plan_order_budget, seed_low_orders, solve_resonance3,
    solve_resonance4, step_j, CompatDefects, FreeData, ResonanceDiagnostics, ResonanceStep,
    Tolerances, WtcSeries,
};
pub use scalar::{Real, Scalar};

pub type Jet64 = Jet<f64>;
pub type Jet32 = Jet<f32>;
pub type JetQ = Jet<BigRational>;
pub type Complex64 = Complex<f64>;
pub type ComplexQ = Complex<BigRational>;
pub type PotentialSpec64 = PotentialSpec<f64>;
pub type PotentialSpecQ = PotentialSpec<BigRational>;
pub type FreeData64 = FreeData<f64>;
pub type FreeDataQ = FreeData<BigRational>;
pub type Series64 = WtcSeries<f64>;
pub type SeriesQ = WtcSeries<BigRational>;

//! The admissible potential
//!
//! ```text
//! a(x, t) = x^2 (q'/2 - q^2) + x p1 + p0 + i q
//! ```
//!
//! with real-valued `p0`, `p1`, `q`, together with the real function `psi`
//! that places the singularity manifold at `x + psi(t) = 0`. The recursion
//! consumes `a` re-expanded in powers of `Psi = x + psi`.

use num_complex::Complex;

use crate::error::{Result, WtcError};
use crate::jet::Jet;
use crate::scalar::{imag_unit, Scalar};

/// Real-valued jets defining the potential and the singularity manifold.
#[derive(Clone, Debug, PartialEq)]
pub struct PotentialSpec<T> {
    pub p0: Jet<T>,
    pub p1: Jet<T>,
    pub q: Jet<T>,
    pub psi: Jet<T>,
}

impl<T: Scalar> PotentialSpec<T> {
    /// Validates that all four jets are real-valued and share base and order.
    pub fn new(p0: Jet<T>, p1: Jet<T>, q: Jet<T>, psi: Jet<T>) -> Result<Self> {
        let spec = Self { p0, p1, q, psi };
        spec.validate()?;
        Ok(spec)
    }

    /// Builds the spec from ascending polynomial coefficients in `(t - t0)`.
    pub fn from_polys(base: T, p0: &[T], p1: &[T], q: &[T], psi: &[T], order: usize) -> Self {
        Self {
            p0: Jet::from_real_poly(base.clone(), p0, order),
            p1: Jet::from_real_poly(base.clone(), p1, order),
            q: Jet::from_real_poly(base.clone(), q, order),
            psi: Jet::from_real_poly(base, psi, order),
        }
    }

    /// The zero potential with `psi = 0`, whose WTC solution is `u = 1/x`.
    pub fn zero(base: T, order: usize) -> Self {
        Self::from_polys(base, &[], &[], &[], &[], order)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, jet) in self.named() {
            jet.ensure_real(name)?;
            if jet.base() != self.psi.base() {
                return Err(WtcError::BaseMismatch {
                    left: jet.base().to_float(),
                    right: self.psi.base().to_float(),
                });
            }
            if jet.order() != self.psi.order() {
                return Err(WtcError::Precondition(format!(
                    "{name} has order {} but psi has order {}",
                    jet.order(),
                    self.psi.order()
                )));
            }
        }
        Ok(())
    }

    pub fn base(&self) -> &T {
        self.psi.base()
    }

    pub fn order(&self) -> usize {
        self.psi.order()
    }

    pub fn truncate(&self, order: usize) -> Self {
        Self {
            p0: self.p0.truncate(order),
            p1: self.p1.truncate(order),
            q: self.q.truncate(order),
            psi: self.psi.truncate(order),
        }
    }

    /// Largest coefficient modulus over the four jets.
    pub fn magnitude(&self) -> f64 {
        self.named()
            .iter()
            .map(|(_, j)| j.max_abs())
            .fold(0.0, f64::max)
    }

    fn named(&self) -> [(&'static str, &Jet<T>); 4] {
        [
            ("p0", &self.p0),
            ("p1", &self.p1),
            ("q", &self.q),
            ("psi", &self.psi),
        ]
    }

    /// The coefficient `q'/2 - q^2` of `x^2`.
    pub fn quadratic_coefficient(&self) -> Result<Jet<T>> {
        let half_dq = self.q.differentiate()?.scale(&half());
        Ok(&half_dq - &(&self.q * &self.q))
    }
}

/// `a(x,t) = a0 + a1 Psi + a2 Psi^2`, the conjugate coefficients, `psi'` and
/// `phi = i psi' / 2`.
#[derive(Clone, Debug, PartialEq)]
pub struct PotentialExpansion<T> {
    pub a0: Jet<T>,
    pub a1: Jet<T>,
    pub a2: Jet<T>,
    pub abar0: Jet<T>,
    pub abar1: Jet<T>,
    pub abar2: Jet<T>,
    pub phi: Jet<T>,
    pub psi_prime: Jet<T>,
}

impl<T: Scalar> PotentialExpansion<T> {
    pub fn a(&self, k: usize) -> &Jet<T> {
        [&self.a0, &self.a1, &self.a2][k]
    }

    pub fn abar(&self, k: usize) -> &Jet<T> {
        [&self.abar0, &self.abar1, &self.abar2][k]
    }

    pub fn order(&self) -> usize {
        self.a0.order()
    }
}

fn half<T: Scalar>() -> Complex<T> {
    Complex::new(T::one() / T::from_integer(2), T::zero())
}

/// Substitutes `x = Psi - psi` into the quadratic potential.
pub fn expand_potential<T: Scalar>(spec: &PotentialSpec<T>) -> Result<PotentialExpansion<T>> {
    spec.validate()?;
    let a2 = spec.quadratic_coefficient()?;
    let psi = &spec.psi;
    let a1 = &spec.p1 - &(psi * &a2).scale_int(2);
    let a0 = &(&(&(psi * psi) * &a2) - &(psi * &spec.p1)) + &(&spec.p0 + &spec.q.times_i());
    let psi_prime = psi.differentiate()?;
    let phi = psi_prime.scale(&(imag_unit::<T>() * half::<T>()));
    // q' and psi' cost one order; align everything to it.
    let order = a2.order();
    let (a0, a1) = (a0.truncate(order), a1.truncate(order));
    Ok(PotentialExpansion {
        abar0: a0.bar(),
        abar1: a1.bar(),
        abar2: a2.bar(),
        a0,
        a1,
        a2,
        phi,
        psi_prime,
    })
}

/// `(i/2)(a0 - abar0)' - (1/2)(a0 - abar0)^2 + a2 + abar2`.
///
/// This vanishes identically for every admissible potential and is what makes
/// the second resonance compatible.
pub fn potential_identity_defect<T: Scalar>(exp: &PotentialExpansion<T>) -> Result<Jet<T>> {
    let diff = &exp.a0 - &exp.abar0;
    let first = diff
        .differentiate()?
        .scale(&(imag_unit::<T>() * half::<T>()));
    let second = (&diff * &diff).scale(&half());
    Ok(&(&first - &second) + &(&exp.a2 + &exp.abar2))
}

//! Truncated Taylor series ("jets") in one real variable `t` with complex
//! coefficients.
//!
//! A jet of order `K` about `t0` stores `c_0 .. c_K` with `c_m = f^(m)(t0) / m!`.
//! Binary operations truncate to the smaller operand order and never pad: a
//! result only carries coefficients that are determined by its inputs.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Result, WtcError};
use crate::scalar::{cint, imag_unit, modulus, Scalar};

#[derive(Clone, Debug, PartialEq)]
pub struct Jet<T> {
    base: T,
    coeffs: Vec<Complex<T>>,
}

impl<T: Scalar> Jet<T> {
    /// Builds a jet from its coefficients; the order is `coeffs.len() - 1`.
    ///
    /// # Panics
    ///
    /// Panics if `coeffs` is empty.
    pub fn new(base: T, coeffs: Vec<Complex<T>>) -> Self {
        assert!(!coeffs.is_empty(), "a jet needs at least one coefficient");
        Self { base, coeffs }
    }

    pub fn zero(base: T, order: usize) -> Self {
        Self::constant(base, Complex::zero(), order)
    }

    pub fn constant(base: T, value: Complex<T>, order: usize) -> Self {
        let mut coeffs = vec![Complex::zero(); order + 1];
        coeffs[0] = value;
        Self { base, coeffs }
    }

    /// The identity function `t`, i.e. `t0 + (t - t0)`.
    pub fn variable(base: T, order: usize) -> Self {
        let mut jet = Self::constant(base.clone(), Complex::new(base, T::zero()), order);
        if order >= 1 {
            jet.coeffs[1] = Complex::one();
        }
        jet
    }

    /// A real polynomial given by ascending coefficients in `(t - t0)`.
    ///
    /// Coefficients beyond `order` are dropped; missing ones are zero, which is
    /// exact for a polynomial.
    pub fn from_real_poly(base: T, poly: &[T], order: usize) -> Self {
        let coeffs = (0..=order)
            .map(|m| Complex::new(poly.get(m).cloned().unwrap_or_else(T::zero), T::zero()))
            .collect();
        Self { base, coeffs }
    }

    pub fn base(&self) -> &T {
        &self.base
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Complex<T>] {
        &self.coeffs
    }

    /// Coefficient `m`; zero beyond the order.
    pub fn coeff(&self, m: usize) -> Complex<T> {
        self.coeffs.get(m).cloned().unwrap_or_else(Complex::zero)
    }

    /// Value at the base point.
    pub fn value(&self) -> &Complex<T> {
        &self.coeffs[0]
    }

    pub fn truncate(&self, order: usize) -> Self {
        let keep = order.min(self.order()) + 1;
        Self {
            base: self.base.clone(),
            coeffs: self.coeffs[..keep].to_vec(),
        }
    }

    fn check_base(&self, other: &Self) -> Result<()> {
        if self.base == other.base {
            Ok(())
        } else {
            Err(WtcError::BaseMismatch {
                left: self.base.to_float(),
                right: other.base.to_float(),
            })
        }
    }

    fn zip_with(&self, other: &Self, f: impl Fn(&Complex<T>, &Complex<T>) -> Complex<T>) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| f(a, b))
            .collect();
        Self {
            base: self.base.clone(),
            coeffs,
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_base(other)?;
        Ok(self.zip_with(other, |a, b| a.clone() + b.clone()))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check_base(other)?;
        Ok(self.zip_with(other, |a, b| a.clone() - b.clone()))
    }

    /// Cauchy product truncated to the smaller operand order.
    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_base(other)?;
        let order = self.order().min(other.order());
        let coeffs = (0..=order)
            .map(|m| {
                (0..=m).fold(Complex::zero(), |acc: Complex<T>, i| {
                    acc + self.coeffs[i].clone() * other.coeffs[m - i].clone()
                })
            })
            .collect();
        Ok(Self {
            base: self.base.clone(),
            coeffs,
        })
    }

    pub fn scale(&self, factor: &Complex<T>) -> Self {
        Self {
            base: self.base.clone(),
            coeffs: self
                .coeffs
                .iter()
                .map(|c| c.clone() * factor.clone())
                .collect(),
        }
    }

    pub fn scale_int(&self, factor: i64) -> Self {
        self.scale(&cint(factor))
    }

    /// Multiplication by `i`.
    pub fn times_i(&self) -> Self {
        self.scale(&imag_unit())
    }

    /// `d/dt`; the result has order one less than the input.
    pub fn differentiate(&self) -> Result<Self> {
        if self.order() == 0 {
            return Err(WtcError::InsufficientOrder {
                context: "differentiate".into(),
                needed: 1,
                available: 0,
            });
        }
        let coeffs = self.coeffs[1..]
            .iter()
            .enumerate()
            .map(|(m, c)| c.clone() * cint::<T>(m as i64 + 1))
            .collect();
        Ok(Self {
            base: self.base.clone(),
            coeffs,
        })
    }

    /// Coefficientwise complex conjugate: the holomorphic extension of
    /// `t -> conj(f(t))` for real `t` about a real base point.
    pub fn bar(&self) -> Self {
        Self {
            base: self.base.clone(),
            coeffs: self.coeffs.iter().map(Complex::conj).collect(),
        }
    }

    /// Coefficientwise real part, i.e. `(f + bar f) / 2`.
    pub fn re(&self) -> Self {
        Self {
            base: self.base.clone(),
            coeffs: self
                .coeffs
                .iter()
                .map(|c| Complex::new(c.re.clone(), T::zero()))
                .collect(),
        }
    }

    /// Coefficientwise imaginary part as a real-valued jet.
    pub fn im(&self) -> Self {
        Self {
            base: self.base.clone(),
            coeffs: self
                .coeffs
                .iter()
                .map(|c| Complex::new(c.im.clone(), T::zero()))
                .collect(),
        }
    }

    /// Horner evaluation of `sum c_m (t - t0)^m`.
    pub fn evaluate(&self, t: &Complex<T>) -> Complex<T> {
        let dt = t.clone() - Complex::new(self.base.clone(), T::zero());
        self.coeffs
            .iter()
            .rev()
            .fold(Complex::zero(), |acc: Complex<T>, c| {
                acc * dt.clone() + c.clone()
            })
    }

    /// Largest coefficient modulus.
    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(modulus).fold(0.0, f64::max)
    }

    /// Largest imaginary part in absolute value.
    pub fn max_abs_imag(&self) -> f64 {
        self.coeffs
            .iter()
            .map(|c| c.im.to_float().abs())
            .fold(0.0, f64::max)
    }

    /// Largest real part in absolute value.
    pub fn max_abs_real(&self) -> f64 {
        self.coeffs
            .iter()
            .map(|c| c.re.to_float().abs())
            .fold(0.0, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Errors unless every coefficient has an exactly zero imaginary part.
    pub fn ensure_real(&self, name: &str) -> Result<()> {
        match self.coeffs.iter().position(|c| !c.im.is_zero()) {
            None => Ok(()),
            Some(index) => Err(WtcError::NotRealValued {
                name: name.to_string(),
                index,
                imag: self.coeffs[index].im.to_float(),
            }),
        }
    }
}

// Operator forms panic on base mismatch; they are for code paths whose inputs
// were validated up front. Use the `try_*` methods otherwise.

impl<T: Scalar> Add for &Jet<T> {
    type Output = Jet<T>;

    fn add(self, rhs: Self) -> Jet<T> {
        self.try_add(rhs).expect("jet base mismatch")
    }
}

impl<T: Scalar> Sub for &Jet<T> {
    type Output = Jet<T>;

    fn sub(self, rhs: Self) -> Jet<T> {
        self.try_sub(rhs).expect("jet base mismatch")
    }
}

impl<T: Scalar> Mul for &Jet<T> {
    type Output = Jet<T>;

    fn mul(self, rhs: Self) -> Jet<T> {
        self.try_mul(rhs).expect("jet base mismatch")
    }
}

impl<T: Scalar> Neg for &Jet<T> {
    type Output = Jet<T>;

    fn neg(self) -> Jet<T> {
        self.scale_int(-1)
    }
}

impl<T: Scalar> Add for Jet<T> {
    type Output = Jet<T>;

    fn add(self, rhs: Self) -> Jet<T> {
        &self + &rhs
    }
}

impl<T: Scalar> Sub for Jet<T> {
    type Output = Jet<T>;

    fn sub(self, rhs: Self) -> Jet<T> {
        &self - &rhs
    }
}

impl<T: Scalar> Mul for Jet<T> {
    type Output = Jet<T>;

    fn mul(self, rhs: Self) -> Jet<T> {
        &self * &rhs
    }
}

impl<T: Scalar> Neg for Jet<T> {
    type Output = Jet<T>;

    fn neg(self) -> Jet<T> {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    fn real(poly: &[f64], order: usize) -> Jet<f64> {
        Jet::from_real_poly(0.0, poly, order)
    }

    #[test]
    fn add_is_coefficientwise() {
        let sum = real(&[1.0, 2.0], 1)
            .try_add(&real(&[3.0, -1.0], 1))
            .unwrap();
        assert_eq!(sum, real(&[4.0, 1.0], 1));

        let f = real(&[1.0, 2.0, 3.0], 2);
        assert_eq!(f.try_add(&Jet::zero(0.0, 1)).unwrap(), real(&[1.0, 2.0], 1));

        let cancel = real(&[0.0, 0.0, 1.0], 2)
            .try_add(&real(&[0.0, 0.0, -1.0], 2))
            .unwrap();
        assert!(cancel.is_zero());
        assert_eq!(cancel.order(), 2);
    }

    #[test]
    fn mul_truncates_to_common_order() {
        let p = real(&[1.0, 1.0], 2)
            .try_mul(&real(&[1.0, -1.0], 2))
            .unwrap();
        assert_eq!(p, real(&[1.0, 0.0, -1.0], 2));

        let f = Jet::new(0.0, vec![c(1.0, 2.0), c(-0.5, 0.0)]);
        assert_eq!(f.try_mul(&Jet::constant(0.0, c(1.0, 0.0), 1)).unwrap(), f);

        let sq = real(&[1.0, 1.0], 1);
        assert_eq!(sq.try_mul(&sq).unwrap(), real(&[1.0, 2.0], 1));
    }

    #[test]
    fn base_mismatch_is_rejected() {
        let a = Jet::from_real_poly(0.0, &[1.0], 1);
        let b = Jet::from_real_poly(0.5, &[1.0], 1);
        assert!(matches!(a.try_add(&b), Err(WtcError::BaseMismatch { .. })));
        assert!(matches!(a.try_mul(&b), Err(WtcError::BaseMismatch { .. })));
    }

    #[test]
    fn differentiate_power_rule() {
        let d = real(&[1.0, 3.0, 1.0], 2).differentiate().unwrap();
        assert_eq!(d, real(&[3.0, 2.0], 1));

        let d = real(&[5.0], 1).differentiate().unwrap();
        assert_eq!(d.order(), 0);
        assert!(d.is_zero());

        assert!(matches!(
            real(&[1.0], 0).differentiate(),
            Err(WtcError::InsufficientOrder { .. })
        ));
    }

    #[test]
    fn bar_conjugates_entrywise() {
        let f = Jet::new(0.0, vec![c(0.0, 1.0), c(1.0, -1.0)]);
        assert_eq!(f.bar(), Jet::new(0.0, vec![c(0.0, -1.0), c(1.0, 1.0)]));
        assert_eq!(f.bar().bar(), f);
        let r = real(&[1.0, -2.0, 0.5], 2);
        assert_eq!(r.bar(), r);
    }

    #[test]
    fn evaluate_by_horner() {
        assert_eq!(real(&[1.0, 2.0], 1).evaluate(&c(0.5, 0.0)), c(2.0, 0.0));
        let f = Jet::from_real_poly(0.25, &[7.0, 3.0], 1);
        assert_eq!(f.evaluate(&c(0.25, 0.0)), c(7.0, 0.0));
        assert_eq!(
            real(&[0.0, 0.0, 1.0], 2).evaluate(&c(0.0, 1.0)),
            c(-1.0, 0.0)
        );
    }

    #[test]
    fn ensure_real_flags_imaginary_parts() {
        assert!(real(&[1.0, 2.0], 1).ensure_real("p0").is_ok());
        let f = Jet::new(0.0, vec![c(1.0, 0.0), c(0.0, 1e-300)]);
        let err = f.ensure_real("q").unwrap_err();
        assert!(matches!(err, WtcError::NotRealValued { index: 1, .. }));
    }

    #[test]
    fn variable_and_truncate() {
        let t = Jet::variable(2.0, 3);
        assert_eq!(
            t.coeffs(),
            &[c(2.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]
        );
        assert_eq!(t.truncate(1).order(), 1);
        assert_eq!(t.truncate(10).order(), 3);
    }
}

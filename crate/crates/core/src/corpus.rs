//! Polynomial problem data and random admissible instances.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::jet::Jet;
use crate::potential::PotentialSpec;
use crate::recursion::FreeData;
use crate::scalar::Real;

/// A problem given by polynomials in `(t - t0)` (ascending coefficients).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolynomialProblem {
    pub t0: f64,
    pub theta: f64,
    pub p0: Vec<f64>,
    pub p1: Vec<f64>,
    pub q: Vec<f64>,
    pub psi: Vec<f64>,
    pub s3: Vec<f64>,
    pub s4: Vec<f64>,
}

impl PolynomialProblem {
    /// `u = 1/x`: zero potential, `psi = 0`, `u0 = 1`, no resonance data.
    pub fn inverse_x() -> Self {
        Self {
            t0: 0.0,
            theta: 0.0,
            p0: vec![],
            p1: vec![],
            q: vec![],
            psi: vec![],
            s3: vec![],
            s4: vec![],
        }
    }

    /// Draws every polynomial with degree `<= max_degree` and coefficients
    /// uniform in `[-1, 1]`; `theta` uniform in `[0, 2 pi)`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, max_degree: usize) -> Self {
        let poly = |rng: &mut R| -> Vec<f64> {
            let degree = rng.gen_range(0..=max_degree);
            (0..=degree).map(|_| rng.gen_range(-1.0..=1.0)).collect()
        };
        Self {
            t0: 0.0,
            theta: rng.gen_range(0.0..std::f64::consts::TAU),
            p0: poly(rng),
            p1: poly(rng),
            q: poly(rng),
            psi: poly(rng),
            s3: poly(rng),
            s4: poly(rng),
        }
    }

    pub fn spec<T: Real>(&self, order: usize) -> PotentialSpec<T> {
        let conv = |p: &[f64]| p.iter().map(|&c| T::from_float(c)).collect::<Vec<_>>();
        PotentialSpec::from_polys(
            T::from_float(self.t0),
            &conv(&self.p0),
            &conv(&self.p1),
            &conv(&self.q),
            &conv(&self.psi),
            order,
        )
    }

    pub fn free<T: Real>(&self, order: usize) -> FreeData<T> {
        let base = T::from_float(self.t0);
        let jet = |p: &[f64]| {
            let coeffs: Vec<T> = p.iter().map(|&c| T::from_float(c)).collect();
            Jet::from_real_poly(base, &coeffs, order)
        };
        FreeData::from_angle(T::from_float(self.theta), jet(&self.s3), jet(&self.s4))
    }

    /// Largest coefficient magnitude over all input polynomials.
    pub fn magnitude(&self) -> f64 {
        [&self.p0, &self.p1, &self.q, &self.psi, &self.s3, &self.s4]
            .iter()
            .flat_map(|p| p.iter())
            .fold(0.0, |m, c| m.max(c.abs()))
    }
}

//! Independent checks on a computed series.
//!
//! Nothing here reuses the recursion's algebra: the coefficient residual
//! re-derives both equations of the conjugate system order by order from the
//! raw triple sums, the pointwise residual samples the scalar equation with
//! finite differences, and the growth fit reads only `|u_j(t0)|`.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Result, WtcError};
use crate::jet::Jet;
use crate::potential::{PotentialExpansion, PotentialSpec};
use crate::recursion::{CompatDefects, WtcSeries};
use crate::scalar::{modulus, Real, Scalar};

/// `2 sum_{a+b+c=j} x_a y_b z_c` over all triples, including those with an
/// index equal to `j`.
fn cubic_term<T: Scalar>(j: usize, x: &[Jet<T>], y: &[Jet<T>], z: &[Jet<T>]) -> Jet<T> {
    let mut acc: Option<Jet<T>> = None;
    for a in 0..=j {
        for b in 0..=j - a {
            let term = &(&x[a] * &y[b]) * &z[j - a - b];
            acc = Some(match acc {
                None => term,
                Some(s) => &s + &term,
            });
        }
    }
    acc.expect("j >= 0 has at least one triple").scale_int(2)
}

fn derivative_or_context<T: Scalar>(jet: &Jet<T>, what: impl FnOnce() -> String) -> Result<Jet<T>> {
    jet.differentiate().map_err(|e| match e {
        WtcError::InsufficientOrder {
            needed, available, ..
        } => WtcError::InsufficientOrder {
            context: what(),
            needed,
            available,
        },
        other => other,
    })
}

/// Defect of the `Psi^(j-3)` coefficient of both equations, for `j = 0..=n`.
///
/// Entry `j` is the larger of the two sup-norms of `LHS - RHS`, where
///
/// ```text
/// LHS_u = (j-1)(j-2) u_j + i (j-2) u_{j-1} psi' + i u_{j-2}'
/// RHS_u = 2 sum_{a+b+c=j} u_a u_b v_c + sum_k a_k u_{j-k-2}
/// ```
///
/// and the `v` equation is the mirror image with `-i` and `abar`.
pub fn coefficient_residual<T: Scalar>(
    series: &WtcSeries<T>,
    exp: &PotentialExpansion<T>,
) -> Result<Vec<f64>> {
    let (u, v) = (&series.u, &series.v);
    let psi_p = &exp.psi_prime;
    let mut defects = Vec::with_capacity(series.n + 1);
    for j in 0..=series.n {
        let jj = j as i64;
        let mut lhs_u = u[j].scale_int((jj - 1) * (jj - 2));
        let mut lhs_v = v[j].scale_int((jj - 1) * (jj - 2));
        if j >= 1 {
            lhs_u = &lhs_u + &(&u[j - 1] * psi_p).scale_int(jj - 2).times_i();
            lhs_v = &lhs_v - &(&v[j - 1] * psi_p).scale_int(jj - 2).times_i();
        }
        if j >= 2 {
            let du = derivative_or_context(&u[j - 2], || format!("u_{}' in residual", j - 2))?;
            let dv = derivative_or_context(&v[j - 2], || format!("v_{}' in residual", j - 2))?;
            lhs_u = &lhs_u + &du.times_i();
            lhs_v = &lhs_v - &dv.times_i();
        }

        let mut rhs_u = cubic_term(j, u, u, v);
        let mut rhs_v = cubic_term(j, u, v, v);
        if j >= 2 {
            for k in 0..=(j - 2).min(2) {
                rhs_u = &rhs_u + &(exp.a(k) * &u[j - 2 - k]);
                rhs_v = &rhs_v + &(exp.abar(k) * &v[j - 2 - k]);
            }
        }
        let du = (&lhs_u - &rhs_u).max_abs();
        let dv = (&lhs_v - &rhs_v).max_abs();
        defects.push(du.max(dv));
    }
    Ok(defects)
}

/// `max_j |bar(u_j) - v_j| / max(1, |u_j|)` with sup-norms over jet coefficients.
pub fn conjugacy_defect<T: Scalar>(series: &WtcSeries<T>) -> f64 {
    crate::recursion::conjugacy_defect(&series.u, &series.v)
}

/// Geometric fit `|u_j(t0)| ~ C^j` over a tail window.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthEstimate {
    /// `exp(slope)` of the least-squares line through `ln |u_j(t0)|`.
    pub growth_c: f64,
    /// `1 / growth_c`; infinite when the tail is identically zero.
    pub radius: f64,
    /// Coefficient of determination of the fit (linearity score).
    pub r_squared: f64,
    /// Nonzero coefficients entering the fit.
    pub points: usize,
    /// False when fewer than four nonzero coefficients were available.
    pub reliable: bool,
    /// Every coefficient in the window vanished exactly.
    pub terminating: bool,
}

/// Fits `ln m_j = ln c + j ln C` over `j` in `window` (inclusive), skipping
/// zero magnitudes.
pub fn fit_growth(magnitudes: &[f64], window: std::ops::RangeInclusive<usize>) -> GrowthEstimate {
    let points: Vec<(f64, f64)> = window
        .filter_map(|j| magnitudes.get(j).map(|&m| (j, m)))
        .filter(|&(_, m)| m > 0.0 && m.is_finite())
        .map(|(j, m)| (j as f64, m.ln()))
        .collect();
    let count = points.len();
    if count == 0 {
        return GrowthEstimate {
            growth_c: 0.0,
            radius: f64::INFINITY,
            r_squared: 1.0,
            points: 0,
            reliable: false,
            terminating: true,
        };
    }
    let n = count as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = mean_y - slope * mean_x;
    let ss_tot: f64 = points.iter().map(|p| (p.1 - mean_y).powi(2)).sum();
    let ss_res: f64 = points
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum();
    let r_squared = if ss_tot > 0.0 {
        1.0 - ss_res / ss_tot
    } else {
        1.0
    };
    GrowthEstimate {
        growth_c: slope.exp(),
        radius: (-slope).exp(),
        r_squared,
        points: count,
        reliable: count >= 4,
        terminating: false,
    }
}

/// Growth constant and Cauchy-Hadamard radius in `Psi` at the base point,
/// fitted over `j` in `[n/2, n]`.
pub fn estimate_growth<T: Scalar>(series: &WtcSeries<T>) -> GrowthEstimate {
    let n = series.n;
    let mut est = fit_growth(&series.leading_magnitudes(), n / 2..=n);
    if n < 10 {
        est.reliable = false;
    }
    est
}

/// Rectangular `(x, t)` sampling grid restricted to an annulus in `Psi`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub dx: f64,
    pub t_min: f64,
    pub t_max: f64,
    pub dt: f64,
    /// Points with `|Psi| < r_min` are skipped (they approach the singularity).
    pub r_min: f64,
    /// Points with `|Psi| > r_max` are skipped.
    pub r_max: f64,
    /// Largest admissible `|t - t0|`, stencil included; `None` selects
    /// [`default_trust_radius`].
    #[serde(default)]
    pub trust: Option<f64>,
}

impl GridSpec {
    /// Grid lines along one axis; a degenerate range gives a single line.
    fn axis(lo: f64, hi: f64, step: f64) -> Vec<f64> {
        let count = ((hi - lo) / step + 1e-9).floor() as usize;
        (0..=count).map(|i| lo + i as f64 * step).collect()
    }

    pub fn xs(&self) -> Vec<f64> {
        Self::axis(self.x_min, self.x_max, self.dx)
    }

    pub fn ts(&self) -> Vec<f64> {
        Self::axis(self.t_min, self.t_max, self.dt)
    }

    /// Same window with both spacings halved.
    pub fn refined(&self) -> Self {
        Self {
            dx: self.dx / 2.0,
            dt: self.dt / 2.0,
            ..*self
        }
    }
}

/// `0.25 / max(1, largest input coefficient)`: the `t` distance over which
/// the truncated jets are trusted.
pub fn default_trust_radius<T: Scalar>(spec: &PotentialSpec<T>) -> f64 {
    0.25 / spec.magnitude().max(1.0)
}

/// Pointwise evaluation of the truncated series and the potential.
struct Field<'a, T> {
    series: &'a WtcSeries<T>,
    spec: &'a PotentialSpec<T>,
    dq: Jet<T>,
    n_used: usize,
}

impl<'a, T: Real> Field<'a, T> {
    fn new(series: &'a WtcSeries<T>, spec: &'a PotentialSpec<T>, n_used: usize) -> Result<Self> {
        Ok(Self {
            series,
            spec,
            dq: spec.q.differentiate()?,
            n_used: n_used.min(series.n),
        })
    }

    fn big_psi(&self, x: T, t: T) -> Complex<T> {
        Complex::new(x, T::zero()) + self.spec.psi.evaluate(&Complex::new(t, T::zero()))
    }

    /// `u = Psi^-1 sum_{j <= n_used} u_j(t) Psi^j`, Horner in `Psi`.
    fn u(&self, x: T, t: T) -> Complex<T> {
        let tc = Complex::new(t, T::zero());
        let z = self.big_psi(x, t);
        let sum = self.series.u[..=self.n_used]
            .iter()
            .rev()
            .fold(Complex::new(T::zero(), T::zero()), |acc, uj| {
                acc * z + uj.evaluate(&tc)
            });
        sum / z
    }

    /// `a(x, t)` straight from its defining polynomial in `x`.
    fn a(&self, x: T, t: T) -> Complex<T> {
        let tc = Complex::new(t, T::zero());
        let q = self.spec.q.evaluate(&tc);
        let half = T::from_float(0.5);
        let quad = self.dq.evaluate(&tc) * half - q * q;
        let xc = Complex::new(x, T::zero());
        xc * xc * quad
            + xc * self.spec.p1.evaluate(&tc)
            + self.spec.p0.evaluate(&tc)
            + q * Complex::i()
    }

    /// `i u_t + u_xx - 2|u|^2 u - a u` with a fourth-order central stencil in
    /// `x` and a second-order central stencil in `t`.
    fn residual(&self, x: T, t: T, dx: T, dt: T) -> Complex<T> {
        let two = T::from_float(2.0);
        let u = self.u(x, t);
        let ut = (self.u(x, t + dt) - self.u(x, t - dt)) / (two * dt);
        let uxx = (self.u(x + two * dx, t) * T::from_float(-1.0)
            + self.u(x + dx, t) * T::from_float(16.0)
            + u * T::from_float(-30.0)
            + self.u(x - dx, t) * T::from_float(16.0)
            + self.u(x - two * dx, t) * T::from_float(-1.0))
            / (T::from_float(12.0) * dx * dx);
        let mod2 = (u * u.conj()).re;
        ut * Complex::i() + uxx - u * (two * mod2) - self.a(x, t) * u
    }
}

/// One grid point of a sampled solution.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FieldSample<T> {
    pub x: T,
    pub t: T,
    pub u: Complex<T>,
    pub big_psi: f64,
    pub residual: f64,
}

fn check_grid<T: Scalar>(grid: &GridSpec, spec: &PotentialSpec<T>) -> Result<()> {
    let bad = |msg: String| Err(WtcError::Grid(msg));
    if !(grid.dx > 0.0 && grid.dt > 0.0) {
        return bad(format!(
            "spacings must be positive (dx = {}, dt = {})",
            grid.dx, grid.dt
        ));
    }
    if !(grid.x_min <= grid.x_max && grid.t_min <= grid.t_max) {
        return bad("ranges must be ordered".into());
    }
    if !(grid.r_min > 0.0 && grid.r_min < grid.r_max) {
        return bad(format!(
            "need 0 < r_min < r_max, got {} and {}",
            grid.r_min, grid.r_max
        ));
    }
    if 2.0 * grid.dx >= grid.r_min {
        return bad(format!(
            "x stencil width {} reaches r_min {}",
            2.0 * grid.dx,
            grid.r_min
        ));
    }
    let t0 = spec.base().to_float();
    let trust = grid.trust.unwrap_or_else(|| default_trust_radius(spec));
    let reach = (grid.t_min - t0).abs().max((grid.t_max - t0).abs()) + grid.dt;
    if reach > trust {
        return bad(format!(
            "t stencil reaches |t - t0| = {reach}, beyond trust radius {trust}"
        ));
    }
    Ok(())
}

/// Samples the truncated series on the grid, skipping points outside the
/// annulus `r_min <= |Psi| <= r_max`.
pub fn sample_field<T: Real>(
    series: &WtcSeries<T>,
    spec: &PotentialSpec<T>,
    grid: &GridSpec,
    n_used: usize,
) -> Result<Vec<FieldSample<T>>> {
    check_grid(grid, spec)?;
    if spec.base() != series.base() {
        return Err(WtcError::BaseMismatch {
            left: spec.base().to_float(),
            right: series.base().to_float(),
        });
    }
    let field = Field::new(series, spec, n_used)?;
    let (dx, dt) = (T::from_float(grid.dx), T::from_float(grid.dt));
    let mut out = Vec::new();
    for &t in &grid.ts() {
        for &x in &grid.xs() {
            let (x, t) = (T::from_float(x), T::from_float(t));
            let r = modulus(&field.big_psi(x, t));
            if r < grid.r_min || r > grid.r_max {
                continue;
            }
            out.push(FieldSample {
                x,
                t,
                u: field.u(x, t),
                big_psi: r,
                residual: modulus(&field.residual(x, t, dx, dt)),
            });
        }
    }
    Ok(out)
}

/// Largest modulus of the finite-difference residual of the scalar equation
/// over the admissible grid points.
pub fn pointwise_residual<T: Real>(
    series: &WtcSeries<T>,
    spec: &PotentialSpec<T>,
    grid: &GridSpec,
    n_used: usize,
) -> Result<f64> {
    let samples = sample_field(series, spec, grid, n_used)?;
    if samples.is_empty() {
        return Err(WtcError::Grid(
            "no grid point lies in the r_min..r_max annulus".into(),
        ));
    }
    Ok(samples.iter().map(|s| s.residual).fold(0.0, f64::max))
}

/// One row of the pointwise convergence table.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointwiseRow {
    pub n_used: usize,
    pub dx: f64,
    pub dt: f64,
    pub max_residual: f64,
}

/// Everything the verifier measures.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    /// Per-order coefficient defect, both equations.
    pub coeff_residual: Vec<f64>,
    pub conjugacy_defect: f64,
    /// Absent when the series has no resonance diagnostics.
    pub compat: Option<CompatDefects>,
    pub growth: GrowthEstimate,
    pub pointwise: Vec<PointwiseRow>,
}

/// Thresholds a report is judged against.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct VerifyTolerances {
    pub coeff_residual: f64,
    pub conjugacy: f64,
    pub compatibility: f64,
    /// Optional bound on the finest pointwise residual.
    pub pointwise: Option<f64>,
}

impl Default for VerifyTolerances {
    fn default() -> Self {
        Self {
            coeff_residual: 1e-10,
            conjugacy: 1e-9,
            compatibility: 1e-9,
            pointwise: None,
        }
    }
}

impl VerificationReport {
    pub fn max_coeff_residual(&self) -> f64 {
        self.coeff_residual.iter().copied().fold(0.0, f64::max)
    }

    /// Human-readable descriptions of every exceeded tolerance.
    pub fn failures(&self, tol: &VerifyTolerances) -> Vec<String> {
        let mut out = Vec::new();
        let mut exceed = |name: &str, value: f64, limit: f64| {
            if !(value <= limit) {
                out.push(format!("{name} = {value:e} exceeds {limit:e}"));
            }
        };
        exceed(
            "coefficient residual",
            self.max_coeff_residual(),
            tol.coeff_residual,
        );
        exceed("conjugacy defect", self.conjugacy_defect, tol.conjugacy);
        if let Some(c) = &self.compat {
            exceed("max |r1 - r2|", c.r1_minus_r2, tol.compatibility);
            exceed("max |Im r1|", c.im_r1, tol.compatibility);
            exceed("max |R1 + R2|", c.r1_plus_r2_big, tol.compatibility);
            exceed("max |Re R1|", c.re_r1_big, tol.compatibility);
        }
        if let (Some(limit), Some(last)) = (tol.pointwise, self.pointwise.last()) {
            exceed("pointwise residual", last.max_residual, limit);
        }
        out
    }
}

/// Runs every check. With a grid, the pointwise table holds the residual at
/// `n/2` and `n` terms, plus `n` terms at half spacing.
///
/// The grid's `r_max` must stay below a reliable radius estimate.
pub fn verify_series<T: Real>(
    series: &WtcSeries<T>,
    spec: &PotentialSpec<T>,
    exp: &PotentialExpansion<T>,
    grid: Option<&GridSpec>,
) -> Result<VerificationReport> {
    let coeff_residual = coefficient_residual(series, exp)?;
    let growth = estimate_growth(series);
    let mut pointwise = Vec::new();
    if let Some(grid) = grid {
        if growth.reliable && grid.r_max >= growth.radius {
            return Err(WtcError::Grid(format!(
                "r_max {} is not below the estimated radius {}",
                grid.r_max, growth.radius
            )));
        }
        let n = series.n;
        for (n_used, g) in [(n / 2, *grid), (n, *grid), (n, grid.refined())] {
            pointwise.push(PointwiseRow {
                n_used,
                dx: g.dx,
                dt: g.dt,
                max_residual: pointwise_residual(series, spec, &g, n_used)?,
            });
        }
    }
    Ok(VerificationReport {
        coeff_residual,
        conjugacy_defect: conjugacy_defect(series),
        compat: series.diagnostics.as_ref().map(|d| d.defects()),
        growth,
        pointwise,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::expand_potential;
    use crate::recursion::{generate, plan_order_budget, FreeData};

    fn inverse_x(n: usize) -> (WtcSeries<f64>, PotentialSpec<f64>) {
        let k0 = plan_order_budget(n, 2);
        let spec = PotentialSpec::zero(0.0, k0);
        let series = generate(&spec, &FreeData::trivial(0.0, k0), n, 2).unwrap();
        (series, spec)
    }

    #[test]
    fn inverse_x_has_no_defects() {
        let (series, spec) = inverse_x(12);
        let exp = expand_potential(&spec).unwrap();
        let defects = coefficient_residual(&series, &exp).unwrap();
        assert_eq!(defects.len(), 13);
        assert!(defects.iter().all(|&d| d <= 1e-14));
        assert_eq!(conjugacy_defect(&series), 0.0);
    }

    #[test]
    fn growth_of_terminating_series() {
        let (series, _) = inverse_x(20);
        let g = estimate_growth(&series);
        assert!(g.terminating && g.radius.is_infinite());
        assert!(!g.reliable);
    }

    #[test]
    fn growth_of_geometric_sequence() {
        let mags: Vec<f64> = (0..=40).map(|j| 2f64.powi(j)).collect();
        let g = fit_growth(&mags, 20..=40);
        assert!((g.growth_c - 2.0).abs() < 1e-6);
        assert!((g.radius - 0.5).abs() < 1e-6);
        assert!(g.reliable && g.r_squared > 1.0 - 1e-12);
    }

    #[test]
    fn growth_needs_four_points() {
        let mut mags = vec![0.0; 21];
        mags[18] = 1e-3;
        mags[20] = 1e-4;
        let g = fit_growth(&mags, 10..=20);
        assert_eq!(g.points, 2);
        assert!(!g.reliable && !g.terminating);
    }

    #[test]
    fn field_matches_inverse_x() {
        let (series, spec) = inverse_x(10);
        let grid = GridSpec {
            x_min: 0.5,
            x_max: 1.5,
            dx: 1e-2,
            t_min: 0.0,
            t_max: 0.0,
            dt: 1e-3,
            r_min: 0.1,
            r_max: 2.0,
            trust: None,
        };
        let samples = sample_field(&series, &spec, &grid, 10).unwrap();
        assert_eq!(samples.len(), 101);
        for s in &samples {
            assert!((s.u.re - 1.0 / s.x).abs() <= 1e-12 && s.u.im == 0.0);
        }
    }

    #[test]
    fn grid_preconditions() {
        let (series, spec) = inverse_x(6);
        let base = GridSpec {
            x_min: 0.5,
            x_max: 1.5,
            dx: 1e-2,
            t_min: 0.0,
            t_max: 0.0,
            dt: 1e-3,
            r_min: 0.1,
            r_max: 2.0,
            trust: None,
        };
        let cases = [
            GridSpec { r_min: 0.0, ..base },
            GridSpec { r_min: 3.0, ..base },
            GridSpec { dx: 0.0, ..base },
            GridSpec { dx: 0.06, ..base },
            GridSpec { t_max: 1.0, ..base },
            GridSpec {
                x_min: 5.0,
                x_max: 6.0,
                ..base
            },
        ];
        for grid in cases {
            assert!(
                matches!(
                    pointwise_residual(&series, &spec, &grid, 6),
                    Err(WtcError::Grid(_))
                ),
                "{grid:?}"
            );
        }
    }

    #[test]
    fn report_failures_respect_tolerances() {
        let (series, spec) = inverse_x(10);
        let exp = expand_potential(&spec).unwrap();
        let report = verify_series(&series, &spec, &exp, None).unwrap();
        assert!(report.failures(&VerifyTolerances::default()).is_empty());
        let mut bad = report.clone();
        bad.conjugacy_defect = 1.0;
        assert_eq!(bad.failures(&VerifyTolerances::default()).len(), 1);
    }
}

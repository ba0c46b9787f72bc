//! Coefficient recursion for the WTC expansion
//!
//! ```text
//! u = sum_j u_j(t) Psi^(j-1),   v = sum_j v_j(t) Psi^(j-1),   Psi = x + psi(t)
//! ```
//!
//! of the conjugate system
//!
//! ```text
//!  i u_t + u_xx = 2 u^2 v + a u
//! -i v_t + v_xx = 2 u v^2 + abar v
//! ```
//!
//! Orders 0..2 have closed forms, orders 3 and 4 are resonances where one real
//! combination is free and the other is fixed by a compatibility-checked
//! scalar equation, and every order from 5 on solves an invertible 2x2 system.

use num_complex::Complex;
use num_traits::One;

use crate::error::{Result, WtcError};
use crate::jet::Jet;
use crate::potential::{expand_potential, PotentialExpansion, PotentialSpec};
use crate::scalar::{modulus, Real, Scalar};

/// Free data of the solution family: the unimodular constant `u0` and the two
/// real functions entering at the resonances,
/// `s3 = Im(u3 conj(u0))` and `s4 = Re(u4 conj(u0))`.
#[derive(Clone, Debug, PartialEq)]
pub struct FreeData<T> {
    pub u0: Complex<T>,
    pub s3: Jet<T>,
    pub s4: Jet<T>,
}

impl<T: Real> FreeData<T> {
    /// `u0 = exp(i theta)`.
    pub fn from_angle(theta: T, s3: Jet<T>, s4: Jet<T>) -> Self {
        Self {
            u0: Complex::new(theta.cos(), theta.sin()),
            s3,
            s4,
        }
    }
}

impl<T: Scalar> FreeData<T> {
    /// Accepts an explicit `u0`, which must have modulus one.
    pub fn with_unit(u0: Complex<T>, s3: Jet<T>, s4: Jet<T>) -> Result<Self> {
        let defect = (modulus(&u0) - 1.0).abs();
        if defect > 4.0 * f64::EPSILON {
            return Err(WtcError::Precondition(format!(
                "|u0| must be 1, got {}",
                modulus(&u0)
            )));
        }
        Ok(Self { u0, s3, s4 })
    }

    /// `u0 = 1` and vanishing resonance data.
    pub fn trivial(base: T, order: usize) -> Self {
        Self {
            u0: Complex::one(),
            s3: Jet::zero(base.clone(), order),
            s4: Jet::zero(base, order),
        }
    }

    pub fn v0(&self) -> Complex<T> {
        self.u0.conj()
    }

    fn validate(&self, base: &T) -> Result<()> {
        for (name, jet) in [("s3", &self.s3), ("s4", &self.s4)] {
            jet.ensure_real(name)?;
            if jet.base() != base {
                return Err(WtcError::BaseMismatch {
                    left: jet.base().to_float(),
                    right: base.to_float(),
                });
            }
        }
        Ok(())
    }
}

/// Thresholds for the internal consistency checks run by [`generate_with`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    /// Absolute bound on resonance compatibility defects, multiplied by the
    /// input scale (see [`input_scale`]).
    pub compatibility: f64,
    /// Bound on `|bar(u_j) - v_j|` relative to `max(1, |u_j|)`.
    pub conjugacy: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            compatibility: 1e-10,
            conjugacy: 1e-9,
        }
    }
}

/// Right-hand sides of the two resonance equations, kept for reporting.
///
/// At order 3 both equations read `-2(u3 v0 + u0 v3) = r1 = r2`; at order 4
/// they read `2(u4 v0 - u0 v4) = big_r1 = -big_r2`.
#[derive(Clone, Debug, PartialEq)]
pub struct ResonanceDiagnostics<T> {
    pub r1: Jet<T>,
    pub r2: Jet<T>,
    pub big_r1: Jet<T>,
    pub big_r2: Jet<T>,
}

/// Sup-norm defects of the four resonance identities.
#[derive(Clone, Copy, Debug, Default, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct CompatDefects {
    /// `max |r1 - r2|`
    pub r1_minus_r2: f64,
    /// `max |Im r1|`
    pub im_r1: f64,
    /// `max |R1 + R2|`
    pub r1_plus_r2_big: f64,
    /// `max |Re R1|`
    pub re_r1_big: f64,
}

impl CompatDefects {
    pub fn max(&self) -> f64 {
        self.r1_minus_r2
            .max(self.im_r1)
            .max(self.r1_plus_r2_big)
            .max(self.re_r1_big)
    }
}

impl<T: Scalar> ResonanceDiagnostics<T> {
    pub fn defects(&self) -> CompatDefects {
        CompatDefects {
            r1_minus_r2: (&self.r1 - &self.r2).max_abs(),
            im_r1: self.r1.max_abs_imag(),
            r1_plus_r2_big: (&self.big_r1 + &self.big_r2).max_abs(),
            re_r1_big: self.big_r1.max_abs_real(),
        }
    }
}

/// Coefficient pairs `(u_j, v_j)` for `j = 0..=n`.
#[derive(Clone, Debug, PartialEq)]
pub struct WtcSeries<T> {
    pub n: usize,
    pub u: Vec<Jet<T>>,
    pub v: Vec<Jet<T>>,
    /// Guaranteed jet order of each coefficient pair.
    pub valid_order: Vec<usize>,
    /// Present for series produced by [`generate`]; absent for series read
    /// back from files or assembled by hand.
    pub diagnostics: Option<ResonanceDiagnostics<T>>,
}

impl<T: Scalar> WtcSeries<T> {
    /// Assembles a series from coefficient lists, deriving the valid orders.
    pub fn from_coefficients(u: Vec<Jet<T>>, v: Vec<Jet<T>>) -> Result<Self> {
        if u.is_empty() || u.len() != v.len() {
            return Err(WtcError::Precondition(format!(
                "need equally many u and v coefficients, got {} and {}",
                u.len(),
                v.len()
            )));
        }
        let valid_order = u
            .iter()
            .zip(&v)
            .map(|(a, b)| a.order().min(b.order()))
            .collect();
        Ok(Self {
            n: u.len() - 1,
            u,
            v,
            valid_order,
            diagnostics: None,
        })
    }

    pub fn u0(&self) -> &Complex<T> {
        self.u[0].value()
    }

    pub fn base(&self) -> &T {
        self.u[0].base()
    }

    /// `|u_j(t0)|` for every index.
    pub fn leading_magnitudes(&self) -> Vec<f64> {
        self.u.iter().map(|j| modulus(j.value())).collect()
    }

    /// The first `n_used + 1` coefficient pairs.
    pub fn truncated(&self, n_used: usize) -> Self {
        let keep = n_used.min(self.n) + 1;
        Self {
            n: keep - 1,
            u: self.u[..keep].to_vec(),
            v: self.v[..keep].to_vec(),
            valid_order: self.valid_order[..keep].to_vec(),
            diagnostics: self.diagnostics.clone(),
        }
    }
}

/// Initial jet order needed so that every `u_j`, `j <= n`, still carries order
/// `k_target` after all differentiations in the recursion.
///
/// Each step consumes one order from the lane two indices back, and the setup
/// (`psi'`, `q'`, and the derivative inside the order-3 equation) costs two more.
pub fn plan_order_budget(n: usize, k_target: usize) -> usize {
    k_target + n.div_ceil(2) + 2
}

/// Largest modulus among the input coefficients, floored at one. The
/// compatibility tolerance is scaled by its cube, the degree of the cubic
/// nonlinearity.
pub fn input_scale<T: Scalar>(spec: &PotentialSpec<T>, free: &FreeData<T>) -> f64 {
    spec.magnitude()
        .max(free.s3.max_abs())
        .max(free.s4.max_abs())
        .max(1.0)
}

fn const_jet<T: Scalar>(like: &Jet<T>, value: Complex<T>) -> Jet<T> {
    Jet::constant(like.base().clone(), value, like.order())
}

fn ratio<T: Scalar>(num: i64, den: i64) -> Complex<T> {
    Complex::new(T::from_integer(num) / T::from_integer(den), T::zero())
}

fn with_context<T>(res: Result<T>, context: impl FnOnce() -> String) -> Result<T> {
    res.map_err(|e| match e {
        WtcError::InsufficientOrder {
            needed, available, ..
        } => WtcError::InsufficientOrder {
            context: context(),
            needed,
            available,
        },
        other => other,
    })
}

/// `(u0, u1, u2)` and `(v0, v1, v2)` from their closed forms:
/// `u1 = -u0 phi`, `u2 = (u0/6)(2 phi^2 - 2 a0 + abar0)` and the mirrored
/// expressions for `v`.
pub fn seed_low_orders<T: Scalar>(
    exp: &PotentialExpansion<T>,
    free: &FreeData<T>,
) -> (Vec<Jet<T>>, Vec<Jet<T>>) {
    let phi = &exp.phi;
    let u0 = const_jet(phi, free.u0.clone());
    let v0 = const_jet(phi, free.v0());
    let u1 = -(&u0 * phi);
    let v1 = &v0 * phi;
    let phi2 = (phi * phi).scale_int(2);
    let u2 = (&u0 * &(&(&phi2 - &exp.a0.scale_int(2)) + &exp.abar0)).scale(&ratio(1, 6));
    let v2 = (&v0 * &(&(&phi2 + &exp.a0) - &exp.abar0.scale_int(2))).scale(&ratio(1, 6));
    (vec![u0, u1, u2], vec![v0, v1, v2])
}

/// Cubic interaction term `B_j(u, v) = sum 2 u_a u_b v_c` over index triples
/// with `a + b + c = j` and every index below `j`.
///
/// Only `u[..j]` and `v[..j]` are read. The sum runs over `(j-1)(j+4)/2`
/// triples.
///
/// # Panics
///
/// Panics if `j == 0` or fewer than `j` coefficients are supplied.
pub fn convolution_b<T: Scalar>(j: usize, u: &[Jet<T>], v: &[Jet<T>]) -> Jet<T> {
    assert!(j >= 1, "B_j is defined for j >= 1");
    assert!(u.len() >= j && v.len() >= j, "B_{j} needs {j} coefficients");
    let (u, v) = (&u[..j], &v[..j]);
    let order = u.iter().chain(v).map(Jet::order).min().unwrap_or(0);
    let zero = Jet::zero(u[0].base().clone(), order);

    // pair[k] = sum of u_a u_b over a + b = k with a, b < j
    let pair = |k: usize| -> Jet<T> {
        let lo = k.saturating_sub(j - 1);
        let hi = k.min(j - 1);
        (lo..=hi).fold(zero.clone(), |acc, a| &acc + &(&u[a] * &u[k - a]))
    };
    let sum = (0..j).fold(zero.clone(), |acc, c| &acc + &(&pair(j - c) * &v[c]));
    sum.scale_int(2)
}

/// `sum_{k=0}^{min(top, 2)} a_k w_{top - k}`
fn potential_sum<T: Scalar>(a: impl Fn(usize) -> Jet<T>, w: &[Jet<T>], top: usize) -> Jet<T> {
    (0..=top.min(2))
        .map(|k| &a(k) * &w[top - k])
        .reduce(|acc, term| &acc + &term)
        .expect("at least one potential term")
}

/// `(u_j, v_j, rhs_u, rhs_v)` at a resonant order.
pub type ResonanceStep<T> = (Jet<T>, Jet<T>, Jet<T>, Jet<T>);

/// Order-3 resonance. Returns `(u3, v3, r1, r2)`.
///
/// `r1 = i phi' - a0 phi + abar0 phi + a1` is the simplified right-hand side
/// of the `u` equation; `r2` is evaluated from the unsimplified `v` equation
/// so that `r1 = r2` (and `r1` real) is a genuine cross-check.
pub fn solve_resonance3<T: Scalar>(
    exp: &PotentialExpansion<T>,
    free: &FreeData<T>,
    u: &[Jet<T>],
    v: &[Jet<T>],
    tolerance: f64,
) -> Result<ResonanceStep<T>> {
    assert!(u.len() >= 3 && v.len() >= 3);
    let phi = &exp.phi;
    let dphi = with_context(phi.differentiate(), || {
        "phi' at the order-3 resonance".into()
    })?;
    let r1 = &(&dphi.times_i() + &(&(&exp.abar0 - &exp.a0) * phi)) + &exp.a1;

    let u0 = &u[0];
    let dv1 = with_context(v[1].differentiate(), || {
        "v1' at the order-3 resonance".into()
    })?;
    let r2 = [
        (u0 * &dv1).times_i(),
        (&(u0 * &v[2]) * &exp.psi_prime).times_i(),
        u0 * &convolution_b(3, v, u),
        &(&exp.abar0 * u0) * &v[1],
        exp.abar1.clone(),
    ]
    .into_iter()
    .reduce(|a, b| &a + &b)
    .unwrap();

    check("r1 - r2", (&r1 - &r2).max_abs(), tolerance)?;
    check("Im r1", r1.max_abs_imag(), tolerance)?;

    // -4 Re(u3 v0) = r1, Im(u3 v0) = s3, and u3 = (u3 v0) u0.
    let order = r1.order();
    let u3v0 = &r1.re().scale(&ratio(-1, 4)) + &free.s3.truncate(order).times_i();
    let u3 = &u3v0 * &u0.truncate(order);
    let v3 = u3.bar();
    Ok((u3, v3, r1, r2))
}

/// Order-4 resonance. Returns `(u4, v4, R1, R2)`, both right-hand sides
/// evaluated from their unsimplified forms.
pub fn solve_resonance4<T: Scalar>(
    exp: &PotentialExpansion<T>,
    free: &FreeData<T>,
    u: &[Jet<T>],
    v: &[Jet<T>],
    tolerance: f64,
) -> Result<ResonanceStep<T>> {
    assert!(u.len() >= 4 && v.len() >= 4);
    let (u0, v0) = (&u[0], &v[0]);
    let du2 = with_context(u[2].differentiate(), || {
        "u2' at the order-4 resonance".into()
    })?;
    let dv2 = with_context(v[2].differentiate(), || {
        "v2' at the order-4 resonance".into()
    })?;
    let psi_p = &exp.psi_prime;

    let big_r1 = [
        -(&du2 * v0).times_i(),
        -(&(&u[3] * v0) * psi_p).scale_int(2).times_i(),
        v0 * &convolution_b(4, u, v),
        &potential_sum(|k| exp.a(k).clone(), u, 2) * v0,
    ]
    .into_iter()
    .reduce(|a, b| &a + &b)
    .unwrap();
    let big_r2 = [
        (u0 * &dv2).times_i(),
        (&(u0 * &v[3]) * psi_p).scale_int(2).times_i(),
        u0 * &convolution_b(4, v, u),
        &potential_sum(|k| exp.abar(k).clone(), v, 2) * u0,
    ]
    .into_iter()
    .reduce(|a, b| &a + &b)
    .unwrap();

    check("R1 + R2", (&big_r1 + &big_r2).max_abs(), tolerance)?;
    check("Re R1", big_r1.max_abs_real(), tolerance)?;

    // 4i Im(u4 v0) = R1, Re(u4 v0) = s4.
    let order = big_r1.order();
    let u4v0 = &free.s4.truncate(order) + &big_r1.im().scale(&ratio(1, 4)).times_i();
    let u4 = &u4v0 * &u0.truncate(order);
    let v4 = u4.bar();
    Ok((u4, v4, big_r1, big_r2))
}

/// Solves the non-resonant order `j >= 5`:
///
/// ```text
/// [ j^2-3j-2   -2 u0^2  ] [u_j]   [F_j]
/// [ -2 v0^2   j^2-3j-2  ] [v_j] = [G_j]
/// ```
///
/// whose determinant is `(j+1) j (j-3) (j-4)`.
pub fn step_j<T: Scalar>(
    j: usize,
    exp: &PotentialExpansion<T>,
    u: &[Jet<T>],
    v: &[Jet<T>],
) -> Result<(Jet<T>, Jet<T>)> {
    if j < 5 {
        return Err(WtcError::Precondition(format!(
            "step_j needs j >= 5 (orders 3 and 4 are resonant), got {j}"
        )));
    }
    if u.len() < j || v.len() < j {
        return Err(WtcError::Precondition(format!(
            "step_j({j}) needs u_0..u_{} and v_0..v_{}",
            j - 1,
            j - 1
        )));
    }
    let du = with_context(u[j - 2].differentiate(), || {
        format!("u_{}' at order {j}", j - 2)
    })?;
    let dv = with_context(v[j - 2].differentiate(), || {
        format!("v_{}' at order {j}", j - 2)
    })?;
    let jj = j as i64;
    let psi_p = &exp.psi_prime;

    let f = [
        convolution_b(j, u, v),
        -du.times_i(),
        -(&u[j - 1] * psi_p).scale_int(jj - 2).times_i(),
        potential_sum(|k| exp.a(k).clone(), &u[..j - 1], j - 2),
    ]
    .into_iter()
    .reduce(|a, b| &a + &b)
    .unwrap();
    let g = [
        convolution_b(j, v, u),
        dv.times_i(),
        (&v[j - 1] * psi_p).scale_int(jj - 2).times_i(),
        potential_sum(|k| exp.abar(k).clone(), &v[..j - 1], j - 2),
    ]
    .into_iter()
    .reduce(|a, b| &a + &b)
    .unwrap();

    let det = determinant(jj);
    let delta = ratio::<T>(jj * jj - 3 * jj - 2, det);
    let u0 = u[0].value().clone();
    let v0 = v[0].value().clone();
    let eps = u0.clone() * u0 * ratio::<T>(2, det);
    let eps_prime = v0.clone() * v0 * ratio::<T>(2, det);

    let uj = &f.scale(&delta) + &g.scale(&eps);
    let vj = &f.scale(&eps_prime) + &g.scale(&delta);
    Ok((uj, vj))
}

/// Determinant `(j+1) j (j-3) (j-4)` of the order-`j` system; it vanishes
/// exactly at the leading order and the two resonances.
pub fn determinant(j: i64) -> i64 {
    (j + 1) * j * (j - 3) * (j - 4)
}

fn check(name: &str, defect: f64, tolerance: f64) -> Result<()> {
    if defect <= tolerance {
        Ok(())
    } else {
        Err(WtcError::Inconsistent {
            check: name.to_string(),
            defect,
            tolerance,
        })
    }
}

/// Relative conjugacy defect `max_j |bar(u_j) - v_j| / max(1, |u_j|)`.
pub fn conjugacy_defect<T: Scalar>(u: &[Jet<T>], v: &[Jet<T>]) -> f64 {
    u.iter()
        .zip(v)
        .map(|(uj, vj)| (&uj.bar() - vj).max_abs() / uj.max_abs().max(1.0))
        .fold(0.0, f64::max)
}

/// [`generate_with`] using default tolerances.
pub fn generate<T: Scalar>(
    spec: &PotentialSpec<T>,
    free: &FreeData<T>,
    n: usize,
    k_target: usize,
) -> Result<WtcSeries<T>> {
    generate_with(spec, free, n, k_target, &Tolerances::default())
}

/// Computes `(u_j, v_j)` for `j = 0..=n`.
///
/// Every input jet must carry at least [`plan_order_budget`]`(n, k_target)`
/// orders; inputs are truncated to exactly that budget.
pub fn generate_with<T: Scalar>(
    spec: &PotentialSpec<T>,
    free: &FreeData<T>,
    n: usize,
    k_target: usize,
    tol: &Tolerances,
) -> Result<WtcSeries<T>> {
    spec.validate()?;
    free.validate(spec.base())?;
    let budget = plan_order_budget(n, k_target);
    let available = spec.order().min(free.s3.order()).min(free.s4.order());
    if available < budget {
        return Err(WtcError::InsufficientOrder {
            context: format!("input jets for n = {n}, k_target = {k_target}"),
            needed: budget,
            available,
        });
    }
    let spec = spec.truncate(budget);
    let free = FreeData {
        u0: free.u0.clone(),
        s3: free.s3.truncate(budget),
        s4: free.s4.truncate(budget),
    };

    let exp = expand_potential(&spec)?;
    let compat_tol = tol.compatibility * input_scale(&spec, &free).powi(3);

    let (mut u, mut v) = seed_low_orders(&exp, &free);
    u.truncate(n + 1);
    v.truncate(n + 1);
    let mut diagnostics = None;
    if n >= 3 {
        let (u3, v3, r1, r2) = solve_resonance3(&exp, &free, &u, &v, compat_tol)?;
        u.push(u3);
        v.push(v3);
        if n >= 4 {
            let (u4, v4, big_r1, big_r2) = solve_resonance4(&exp, &free, &u, &v, compat_tol)?;
            u.push(u4);
            v.push(v4);
            diagnostics = Some(ResonanceDiagnostics {
                r1,
                r2,
                big_r1,
                big_r2,
            });
        }
    }
    for j in 5..=n {
        let (uj, vj) = step_j(j, &exp, &u, &v)?;
        u.push(uj);
        v.push(vj);
    }

    check("conjugacy", conjugacy_defect(&u, &v), tol.conjugacy)?;
    let mut series = WtcSeries::from_coefficients(u, v)?;
    series.diagnostics = diagnostics;
    Ok(series)
}

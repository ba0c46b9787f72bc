//! JSON run configuration.

use std::path::Path;

use anyhow::{bail, Context};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use wtc_nls::corpus::PolynomialProblem;
use wtc_nls::verify::{GridSpec, VerifyTolerances};
use wtc_nls::{plan_order_budget, FreeData64, PotentialSpec64, Tolerances};

/// Potential polynomials, ascending in `(t - t0)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialConfig {
    pub p0: Vec<f64>,
    pub p1: Vec<f64>,
    pub q: Vec<f64>,
    pub psi: Vec<f64>,
}

/// Output file names, relative to the output directory.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Outputs {
    pub coefficients: String,
    pub summary: String,
    pub report: String,
    pub samples: String,
}

impl Default for Outputs {
    fn default() -> Self {
        Self {
            coefficients: "coefficients.csv".into(),
            summary: "summary.json".into(),
            report: "report.json".into(),
            samples: "samples.csv".into(),
        }
    }
}

fn default_k_target() -> usize {
    2
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub potential: PotentialConfig,
    #[serde(default)]
    pub t0: f64,
    #[serde(default)]
    pub theta: f64,
    #[serde(default)]
    pub s3: Vec<f64>,
    #[serde(default)]
    pub s4: Vec<f64>,
    pub n: usize,
    #[serde(default = "default_k_target")]
    pub k_target: usize,
    /// Jet order the inputs are expanded to; defaults to the planned budget.
    #[serde(default)]
    pub jet_order: Option<usize>,
    #[serde(default)]
    pub tolerances: VerifyTolerances,
    #[serde(default)]
    pub grid: Option<GridSpec>,
    #[serde(default)]
    pub outputs: Outputs,
}

impl RunConfig {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("invalid config {}", path.display()))
    }

    pub fn parse(text: &str) -> anyhow::Result<Self> {
        let config: Self = serde_json::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    /// Random admissible problem (degree <= 4, coefficients in `[-1, 1]`).
    pub fn random(seed: u64, n: usize) -> Self {
        let p = PolynomialProblem::random(&mut ChaCha8Rng::seed_from_u64(seed), 4);
        Self {
            potential: PotentialConfig {
                p0: p.p0,
                p1: p.p1,
                q: p.q,
                psi: p.psi,
            },
            t0: p.t0,
            theta: p.theta,
            s3: p.s3,
            s4: p.s4,
            n,
            k_target: default_k_target(),
            jet_order: None,
            tolerances: VerifyTolerances::default(),
            grid: None,
            outputs: Outputs::default(),
        }
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        if self.n < 5 {
            bail!("n must be at least 5, got {}", self.n);
        }
        let tol = &self.tolerances;
        for (name, value) in [
            ("tolerances.coeff_residual", tol.coeff_residual),
            ("tolerances.conjugacy", tol.conjugacy),
            ("tolerances.compatibility", tol.compatibility),
            ("tolerances.pointwise", tol.pointwise.unwrap_or(1.0)),
        ] {
            if !(value > 0.0) {
                bail!("{name} must be positive, got {value}");
            }
        }
        if let Some(order) = self.jet_order {
            let needed = self.required_order();
            if order < needed {
                bail!(
                    "jet_order {order} is below the required K0 = {needed} for n = {}, k_target = {}",
                    self.n,
                    self.k_target
                );
            }
        }
        if let Some(grid) = &self.grid {
            if !(grid.r_min > 0.0) {
                bail!("grid.r_min must be positive, got {}", grid.r_min);
            }
        }
        Ok(())
    }

    pub fn required_order(&self) -> usize {
        plan_order_budget(self.n, self.k_target)
    }

    pub fn order(&self) -> usize {
        self.jet_order.unwrap_or_else(|| self.required_order())
    }

    pub fn problem(&self) -> PolynomialProblem {
        PolynomialProblem {
            t0: self.t0,
            theta: self.theta,
            p0: self.potential.p0.clone(),
            p1: self.potential.p1.clone(),
            q: self.potential.q.clone(),
            psi: self.potential.psi.clone(),
            s3: self.s3.clone(),
            s4: self.s4.clone(),
        }
    }

    pub fn spec(&self) -> PotentialSpec64 {
        self.problem().spec(self.order())
    }

    pub fn free(&self) -> FreeData64 {
        self.problem().free(self.order())
    }

    pub fn generation_tolerances(&self) -> Tolerances {
        Tolerances {
            compatibility: self.tolerances.compatibility,
            conjugacy: self.tolerances.conjugacy,
        }
    }
}

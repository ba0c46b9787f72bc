//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wtc_nls::corpus::PolynomialProblem;
use wtc_nls::verify::*;
use wtc_nls::*;

const CORPUS_SIZE: u64 = 100;
const CORPUS_N: usize = 30;
const K_TARGET: usize = 2;

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: String) -> Self {
        Self { pass, detail }
    }
}

struct Run {
    series: Series64,
    spec: PotentialSpec64,
    exp: PotentialExpansion<f64>,
}

fn run(p: &PolynomialProblem, n: usize) -> Run {
    let order = plan_order_budget(n, K_TARGET);
    let spec = p.spec::<f64>(order);
    let series = generate(&spec, &p.free(order), n, K_TARGET).expect("admissible input");
    let exp = expand_potential(&spec).expect("admissible input");
    Run { series, spec, exp }
}

fn corpus() -> Vec<PolynomialProblem> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    (0..CORPUS_SIZE)
        .map(|_| PolynomialProblem::random(&mut rng, 4))
        .collect()
}

fn exact_solution() -> Outcome {
    let p = PolynomialProblem::inverse_x();
    let r = run(&p, 40);
    let coeff_max = (1..=40)
        .map(|j| r.series.u[j].max_abs().max(r.series.v[j].max_abs()))
        .fold(0.0, f64::max);
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
    let modulus_err = sample_field(&r.series, &r.spec, &grid, 40)
        .expect("grid is valid")
        .iter()
        .map(|s| (s.u.norm() - 1.0 / s.x).abs())
        .fold(0.0, f64::max);
    Outcome::new(
        coeff_max <= 1e-12 && modulus_err <= 1e-6,
        format!("max coeff (j>=1) {coeff_max:.2e}, max ||u|-1/x| {modulus_err:.2e}"),
    )
}

fn compatibility(runs: &[Run]) -> Outcome {
    let worst = runs
        .iter()
        .map(|r| {
            r.series
                .diagnostics
                .as_ref()
                .expect("N >= 4")
                .defects()
                .max()
        })
        .fold(0.0, f64::max);
    Outcome::new(
        worst <= 1e-9,
        format!("{} configs, worst defect {worst:.2e}", runs.len()),
    )
}

fn conjugacy(runs: &[Run]) -> Outcome {
    let worst = runs
        .iter()
        .map(|r| conjugacy_defect(&r.series))
        .fold(0.0, f64::max);
    Outcome::new(worst <= 1e-9, format!("worst relative defect {worst:.2e}"))
}

fn residual_and_mutation(runs: &[Run]) -> Outcome {
    let mut worst: f64 = 0.0;
    let mut weakest_detection = f64::INFINITY;
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for r in runs {
        let defects = coefficient_residual(&r.series, &r.exp).expect("orders suffice");
        worst = defects.iter().copied().fold(worst, f64::max);

        let j = rng.gen_range(1..=CORPUS_N);
        let mut tampered = r.series.clone();
        let target = if rng.gen_bool(0.5) {
            &mut tampered.u[j]
        } else {
            &mut tampered.v[j]
        };
        let mut coeffs = target.coeffs().to_vec();
        let m = rng.gen_range(0..coeffs.len());
        coeffs[m] += 1e-3 * target.max_abs().max(1.0);
        *target = Jet::new(*target.base(), coeffs);
        let detected = coefficient_residual(&tampered, &r.exp).expect("orders suffice")[j];
        weakest_detection = weakest_detection.min(detected);
    }
    Outcome::new(
        worst <= 1e-10 && weakest_detection >= 1e-5,
        format!("worst residual {worst:.2e}, weakest mutation defect {weakest_detection:.2e}"),
    )
}

fn convergence(problems: &[PolynomialProblem]) -> Outcome {
    let mut checked = 0;
    let mut worst_ratio: f64 = 0.0;
    let mut worst_r2: f64 = 1.0;
    for p in problems.iter().take(10) {
        let r = run(p, 40);
        let g = estimate_growth(&r.series);
        worst_r2 = worst_r2.min(g.r_squared);
        if !g.reliable || !g.radius.is_finite() {
            continue;
        }
        // window radius/4 <= |Psi| <= radius/2 at t0, so radius = 2 max|Psi|
        let r_max = g.radius / 2.0;
        let centre = -p.psi.first().copied().unwrap_or(0.0);
        let grid = GridSpec {
            x_min: centre - r_max,
            x_max: centre + r_max,
            dx: 1e-3,
            t_min: p.t0,
            t_max: p.t0,
            dt: 1e-4,
            r_min: r_max / 2.0,
            r_max,
            trust: None,
        };
        let res10 = pointwise_residual(&r.series, &r.spec, &grid, 10).expect("grid is valid");
        let res20 = pointwise_residual(&r.series, &r.spec, &grid, 20).expect("grid is valid");
        worst_ratio = worst_ratio.max(res20 / res10);
        checked += 1;
    }
    Outcome::new(
        checked > 0 && worst_ratio <= 0.1 && worst_r2 >= 0.9,
        format!(
            "{checked} configs, worst res(20)/res(10) {worst_ratio:.2e}, min R^2 {worst_r2:.3}"
        ),
    )
}

fn free_family(base: &PolynomialProblem) -> Outcome {
    let other = PolynomialProblem {
        s3: vec![0.3, -0.7, 0.2],
        ..base.clone()
    };
    let (a, b) = (run(base, CORPUS_N), run(&other, CORPUS_N));
    let order = a.series.u[3].order();
    let ds3 =
        Jet::from_real_poly(0.0, &other.s3, order) - Jet::from_real_poly(0.0, &base.s3, order);
    let expected = ds3.times_i().scale(a.series.u0());
    let shift_err = (&(&b.series.u[3] - &a.series.u[3]) - &expected).max_abs();
    let both_pass = [&a, &b].iter().all(|r| {
        compatibility(std::slice::from_ref(r)).pass
            && conjugacy(std::slice::from_ref(r)).pass
            && coefficient_residual(&r.series, &r.exp)
                .expect("orders suffice")
                .iter()
                .all(|&d| d <= 1e-10)
    });
    Outcome::new(
        shift_err <= 1e-12 && both_pass,
        format!("u3 shift error {shift_err:.2e}, both runs pass 2-4: {both_pass}"),
    )
}

fn random_jet(rng: &mut ChaCha8Rng, order: usize) -> Jet64 {
    let coeffs = (0..=order)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    Jet::new(0.5, coeffs)
}

#[allow(clippy::needless_range_loop)]
fn b_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    let mut counts_ok = true;
    for j in 1..=12 {
        let u: Vec<Jet64> = (0..j).map(|_| random_jet(&mut rng, 6)).collect();
        let v: Vec<Jet64> = (0..j).map(|_| random_jet(&mut rng, 6)).collect();
        let mut brute = Jet::zero(0.5, 6);
        let mut count = 0;
        for a in 0..j {
            for b in 0..j {
                for c in 0..j {
                    if a + b + c == j {
                        brute = &brute + &(&(&u[a] * &u[b]) * &v[c]);
                        count += 1;
                    }
                }
            }
        }
        brute = brute.scale_int(2);
        let fast = convolution_b(j, &u, &v);
        worst = worst.max((&fast - &brute).max_abs() / brute.max_abs().max(1.0));
        counts_ok &= count == (j - 1) * (j + 4) / 2;
    }
    Outcome::new(
        worst <= 1e-13 && counts_ok,
        format!("worst difference {worst:.2e}, triple counts match: {counts_ok}"),
    )
}

fn jet_algebra() -> Outcome {
    const REL: f64 = 1e-13;
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst: f64 = 0.0;
    let mut record = |lhs: &Jet64, rhs: &Jet64, scale: f64| {
        let d = (lhs - rhs).max_abs() / scale.max(1.0);
        worst = worst.max(d);
    };
    for _ in 0..1000 {
        let order = rng.gen_range(1..12);
        let f = random_jet(&mut rng, order);
        let g = random_jet(&mut rng, order);
        let h = random_jet(&mut rng, order);
        let k = (order + 1) as f64;
        let fg = k * f.max_abs() * g.max_abs();
        let fh = k * f.max_abs() * h.max_abs();

        record(&(&f * &g), &(&g * &f), fg);
        record(&(&(&f * &g) * &h), &(&f * &(&g * &h)), k * fg * h.max_abs());
        record(&(&f * &(&g + &h)), &(&(&f * &g) + &(&f * &h)), fg + fh);
        record(&(&(&f + &g) + &h), &(&f + &(&g + &h)), 1.0);

        let d = order - 1;
        let lhs = (&f * &g).differentiate().expect("order >= 1");
        let rhs = &(&f.differentiate().expect("order >= 1") * &g.truncate(d))
            + &(&f.truncate(d) * &g.differentiate().expect("order >= 1"));
        record(&lhs, &rhs, k * fg);

        record(&(&f * &g).bar(), &(&f.bar() * &g.bar()), fg);
        record(&(&f + &g).bar(), &(&f.bar() + &g.bar()), 1.0);
        record(
            &f.differentiate().expect("order >= 1").bar(),
            &f.bar().differentiate().expect("order >= 1"),
            1.0,
        );
    }
    Outcome::new(
        worst <= REL,
        format!("1000 jets, worst relative defect {worst:.2e}"),
    )
}

fn main() {
    let problems = corpus();
    let runs: Vec<Run> = problems.iter().map(|p| run(p, CORPUS_N)).collect();

    type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);
    let criteria: [Criterion; 8] = [
        ("exact solution u = 1/x", Box::new(exact_solution)),
        (
            "compatibility identities",
            Box::new(|| compatibility(&runs)),
        ),
        ("conjugacy", Box::new(|| conjugacy(&runs))),
        (
            "coefficient residual and mutation",
            Box::new(|| residual_and_mutation(&runs)),
        ),
        ("convergence behaviour", Box::new(|| convergence(&problems))),
        ("free family in s3", Box::new(|| free_family(&problems[0]))),
        ("B_j oracle", Box::new(b_oracle)),
        ("jet algebra", Box::new(jet_algebra)),
    ];

    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = check();
        let status = if outcome.pass { "PASS" } else { "FAIL" };
        println!("criterion {}: {status} {name}: {}", i + 1, outcome.detail);
        failed += usize::from(!outcome.pass);
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}

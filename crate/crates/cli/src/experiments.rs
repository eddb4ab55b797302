//! The experiment registry. Every experiment reads the resolved [`Config`],
//! writes its CSVs through the [`Report`] and records one check per claim.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use triangulab_core::grid::Grid;
use triangulab_core::operators::{
    build_difference_operator, build_ebeta_operator, build_fractional, build_fractional_imaginary,
    build_multiplication, build_volterra, jialpha_kernel, jialpha_primitive, split_given_basis, ComplexFn, OperatorMatrix, Provenance,
    SplitPair,
};
use triangulab_core::resolvent::{self, fit_power, LevinsonVerdict, ProfileOptions, ResolventProfile, YLadder};
use triangulab_core::specfun::{self, EbetaSpec};
use triangulab_core::spectral::{self, default_contour, AnalyticFn, SCHATTEN_P};
use triangulab_core::symbol::{self, DeltaSide, WitnessVerdict};
use triangulab_core::{linalg, CMatrix, Error, C64};

use crate::config::{Config, Phi};
use crate::report::{num, Report};

pub const KERNEL_KINDS: [&str; 6] = ["fractional", "ebeta", "jialpha", "constant", "linear", "inverse-sqrt"];

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("invalid value: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(#[from] Error),
    #[error("cannot write output: {0}")]
    Io(#[from] std::io::Error),
}

type Outcome = Result<(), RunError>;
type Runner = fn(&Config, &mut Report, &mut ChaCha8Rng) -> Outcome;

pub struct Experiment {
    pub name: &'static str,
    pub description: &'static str,
    run: Runner,
}

pub const REGISTRY: [Experiment; 15] = [
    Experiment { name: "sigma-equality", description: "sigma(T) = sigma(S) for Schur splits of random matrices (samples, n = largest size)", run: sigma_equality },
    Experiment { name: "spectral-mapping", description: "sigma(f(T)) = f(sigma(T)) and quasinilpotent V_f for T = phi + J^beta", run: spectral_mapping },
    Experiment { name: "macaev-norms", description: "Macaev and Schatten norms of random n x n matrices and of J^beta", run: macaev_norms },
    Experiment { name: "resolvent-profile", description: "c_n, r_n, N(y), M(y) tables, resolvent envelope and Neumann expansion for phi + V", run: resolvent_profile },
    Experiment { name: "levinson", description: "Levinson-condition verdict from the ln N(y) exponent", run: levinson },
    Experiment { name: "fractional-powers", description: "J^b J^b -> J^2b under refinement and ||(J^b)^m|| <= w^mb / Gamma(mb+1)", run: fractional_powers },
    Experiment { name: "ebeta-asymptotics", description: "E_beta small-x asymptotics, lower bound, moment finiteness and growth", run: ebeta_asymptotics },
    Experiment { name: "semigroup-ebeta", description: "V_a V_b = V_(a+b) defect under refinement", run: semigroup_ebeta },
    Experiment { name: "growth-frac", description: "N(y) ~ |y|^(-1/beta), power norm bound and log-resolvent envelope for phi + J^beta", run: growth_frac },
    Experiment { name: "growth-ebeta", description: "ln N(y) ~ |y|^(-1/beta) for phi + V_beta and the simplified kernel bound", run: growth_ebeta },
    Experiment { name: "symbol-trace", description: "s~, s~1 and g(xi) = -i xi s~1(xi) along a signed xi ladder", run: symbol_trace },
    Experiment { name: "prop54", description: "||T e^(-ix xi) - g(xi) e^(-ix xi)|| along the xi ladder", run: prop54 },
    Experiment { name: "boundedness", description: "sup |xi s~(xi)| and its growth trend", run: boundedness },
    Experiment { name: "annulus-jialpha", description: "discrete spectrum and symbol limits of J^(i alpha) against the annulus radii", run: annulus_jialpha },
    Experiment { name: "witness", description: "non-(S+V)-triangularity witness from the limit sets of g", run: witness },
];

pub fn find(name: &str) -> Option<&'static Experiment> {
    REGISTRY.iter().find(|e| e.name == name)
}

impl Experiment {
    pub fn run(&self, cfg: &Config, report: &mut Report) -> Outcome {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        (self.run)(cfg, report, &mut rng)
    }
}

/// Per-experiment defaults for the keys a config may leave out.
pub struct Defaults {
    pub n: usize,
    pub samples: usize,
    pub kind: &'static str,
    pub beta: f64,
    pub orders: &'static [f64],
    pub phi: Phi,
    pub xi: Vec<f64>,
    pub distance: f64,
    pub relative: f64,
    pub band: f64,
}

pub fn defaults(name: &str) -> Option<Defaults> {
    find(name)?;
    let mut d = Defaults {
        n: 64,
        samples: 20,
        kind: "fractional",
        beta: 0.5,
        orders: &[0.5, 1.0],
        phi: Phi::Constant(0.5),
        xi: symbol::default_xi_magnitudes(),
        distance: 1e-8,
        relative: 0.02,
        band: 0.4,
    };
    match name {
        "sigma-equality" => d.samples = 100,
        "spectral-mapping" => {
            d.n = 32;
            d.phi = Phi::Named("x".into());
            d.distance = 1e-6;
        }
        "macaev-norms" => {
            d.n = 16;
            d.samples = 50;
            d.distance = 1e-10;
        }
        "resolvent-profile" => d.n = 128,
        "levinson" | "growth-ebeta" => {
            d.n = 128;
            d.kind = "ebeta";
            d.beta = 2.0;
        }
        "fractional-powers" => d.n = 512,
        "ebeta-asymptotics" => d.orders = &[1.0, 2.0],
        "semigroup-ebeta" => {
            d.n = 256;
            d.orders = &[0.5, 1.0, 1.5];
            d.relative = 5e-2;
        }
        "growth-frac" => d.n = 256,
        "prop54" => {
            d.n = 2048;
            d.kind = "jialpha";
            d.xi = vec![32.0, 64.0, 128.0];
        }
        "annulus-jialpha" => {
            d.n = 2048;
            d.kind = "jialpha";
            d.xi = vec![1e4];
        }
        "symbol-trace" | "witness" => d.kind = "jialpha",
        "boundedness" => {
            d.kind = "jialpha";
            d.xi = (0..=13).map(|k| 2f64.powi(k)).collect();
        }
        _ => {}
    }
    Some(d)
}

fn grid(cfg: &Config, n: usize) -> Result<Grid, RunError> {
    Ok(Grid::new(cfg.omega, n)?)
}

fn random_matrix(rng: &mut ChaCha8Rng, n: usize) -> CMatrix {
    CMatrix::from_fn(n, n, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
}

fn multiplication(cfg: &Config, g: &Grid) -> Result<OperatorMatrix, RunError> {
    let phi = cfg.phi.clone();
    Ok(build_multiplication(g, move |x| phi.eval(x))?)
}

/// The Volterra part selected by `kernel.kind` and `kernel.beta`.
fn volterra_part(cfg: &Config, g: &Grid, beta: f64) -> Result<OperatorMatrix, RunError> {
    match cfg.kernel_kind.as_str() {
        "fractional" => Ok(build_fractional(g, beta)?),
        "ebeta" => Ok(build_ebeta_operator(g, &EbetaSpec::new(beta, cfg.c)?)?),
        other => Err(RunError::Config(format!("kernel.kind = \"{other}\" is not a Volterra kernel; use \"fractional\" or \"ebeta\""))),
    }
}

/// Difference kernel `s` with its primitive, selected by `kernel.kind`.
fn difference_kernel(cfg: &Config) -> Result<(ComplexFn, ComplexFn), RunError> {
    let c = |x: f64| C64::new(x, 0.0);
    Ok(match cfg.kernel_kind.as_str() {
        "jialpha" => (jialpha_kernel(cfg.alpha)?, jialpha_primitive(cfg.alpha)?),
        "constant" => (Arc::new(move |_| c(1.0)), Arc::new(c)),
        "linear" => (Arc::new(c), Arc::new(move |t| c(t * t / 2.0))),
        "inverse-sqrt" => (Arc::new(move |t: f64| c(t.powf(-0.5))), Arc::new(move |t: f64| c(2.0 * t.sqrt()))),
        other => return Err(RunError::Config(format!("kernel.kind = \"{other}\" is not a difference kernel"))),
    })
}

fn profile_options(cfg: &Config) -> ProfileOptions {
    ProfileOptions {
        y_ladder: if cfg.y.is_empty() { YLadder::Adaptive { points: cfg.y_points } } else { YLadder::Explicit(cfg.y.clone()) },
        x_points: cfg.x_points,
        x_margin: 1.0,
        n_max: Some(cfg.n_max.min(cfg.n)),
        min_count: cfg.min_count,
    }
}

fn construction(cfg: &Config, g: &Grid, beta: f64) -> Result<SplitPair, RunError> {
    Ok(SplitPair::from_construction(multiplication(cfg, g)?, volterra_part(cfg, g, beta)?)?)
}

fn fmt_list(xs: &[f64]) -> String {
    xs.iter().map(|x| format!("{x:e}")).collect::<Vec<_>>().join(";")
}

fn sigma_equality(cfg: &Config, report: &mut Report, rng: &mut ChaCha8Rng) -> Outcome {
    let mut csv = String::from("index,n,distance\n");
    let mut worst: f64 = 0.0;
    for k in 0..cfg.samples {
        let n = rng.gen_range(2..=cfg.n);
        let t = OperatorMatrix::new(&grid(cfg, n)?, random_matrix(rng, n), Provenance::Derived("random".into()))?;
        let d = spectral::verify_sigma_equality(&t)?.distance;
        worst = worst.max(d);
        let _ = writeln!(csv, "{k},{n},{d:e}");
    }
    report.csv("sigma_equality.csv", &csv)?;
    report.check(
        "max distance between sigma(T) and sigma(S)",
        "spectrum of a triangular operator equals the spectrum of its diagonal part",
        num(worst),
        num(cfg.tolerances.distance),
        worst <= cfg.tolerances.distance,
    );
    Ok(())
}

fn spectral_mapping(cfg: &Config, report: &mut Report, _: &mut ChaCha8Rng) -> Outcome {
    let g = grid(cfg, cfg.n)?;
    let t = multiplication(cfg, &g)?.add(&build_fractional(&g, cfg.beta)?)?;
    let contour = default_contour(&linalg::eigenvalues(t.entries())?);
    let fs: [(&str, AnalyticFn); 3] = [("z", &|z| z), ("z^2+1", &|z| z * z + 1.0), ("z/(z-5)", &|z| z / (z - 5.0))];
    let mut csv = String::from("f,distance,v_f_radius\n");
    for (name, f) in fs {
        let rep = spectral::verify_spectral_mapping(&t, f, &[contour], cfg.tolerances.quasinilpotent)?;
        let _ = writeln!(csv, "{name},{:e},{:e}", rep.distance, rep.v_f_radius);
        report.check(
            &format!("distance(sigma(f(T)), f(sigma(T))) for f = {name}"),
            "spectral mapping theorem for the Riesz calculus",
            num(rep.distance),
            num(cfg.tolerances.distance),
            rep.distance <= cfg.tolerances.distance,
        );
        report.check(
            &format!("spectral radius of V_f for f = {name}"),
            "f(T) - f(S) is quasinilpotent",
            num(rep.v_f_radius),
            num(cfg.tolerances.quasinilpotent),
            rep.v_f_quasinilpotent,
        );
    }
    report.csv("spectral_mapping.csv", &csv)?;
    Ok(())
}

fn macaev_norms(cfg: &Config, report: &mut Report, rng: &mut ChaCha8Rng) -> Outcome {
    let slack = cfg.tolerances.distance;
    let mut worst_gap = f64::NEG_INFINITY;
    let mut worst_monotone = f64::NEG_INFINITY;
    let mut csv = String::from("index,omega_norm,p1,p2,p3,p4,pinf\n");
    for k in 0..cfg.samples {
        let s = linalg::singular_values(&random_matrix(rng, cfg.n))?;
        let omega = spectral::macaev_from_s(&s);
        let norms: Vec<f64> = SCHATTEN_P.iter().map(|&p| spectral::schatten_norm(&s, p)).collect();
        worst_gap = worst_gap.max(omega - norms[0]);
        worst_monotone = norms.windows(2).map(|w| w[1] - w[0]).fold(worst_monotone, f64::max);
        let _ = writeln!(csv, "{k},{omega:e},{}", norms.iter().map(|x| format!("{x:e}")).collect::<Vec<_>>().join(","));
    }
    report.csv("random_norms.csv", &csv)?;

    let op = spectral::spectrum(&build_fractional(&grid(cfg, cfg.n)?, cfg.beta)?)?;
    let mut csv = String::from("p,norm\n");
    let _ = writeln!(csv, "omega,{:e}", op.macaev_omega);
    for (p, v) in &op.schatten {
        let _ = writeln!(csv, "{p},{v:e}");
    }
    report.csv("fractional_norms.csv", &csv)?;
    let op_gap = op.macaev_omega - op.schatten[0].1;

    report.check(
        "max(||B||_omega - ||B||_1) over random matrices and J^beta",
        "Macaev ideal contains the trace class",
        num(worst_gap.max(op_gap)),
        num(slack),
        worst_gap.max(op_gap) <= slack,
    );
    report.check(
        "max increase of ||B||_p along p = 1, 2, 3, 4, inf",
        "Schatten classes are nested",
        num(worst_monotone),
        num(slack),
        worst_monotone <= slack,
    );
    Ok(())
}

fn resolvent_profile(cfg: &Config, report: &mut Report, rng: &mut ChaCha8Rng) -> Outcome {
    let g = grid(cfg, cfg.n)?;
    let split = construction(cfg, &g, cfg.beta)?;
    let prof = resolvent::profile(&split, &profile_options(cfg))?;
    report.csv("profile_summary.csv", &prof.summary_csv())?;
    report.csv("r_profile.csv", &prof.r_csv())?;
    report.check(
        "max_y [ln M(y) - ln((C/|y|)(max(||V||,|y|)/|y|)^N(y))], C = 2 + n_max",
        "resolvent envelope in terms of N(y)",
        num(prof.envelope_log_excess),
        num(0.0),
        prof.envelope_log_excess <= 0.0,
    );
    let monotone = prof.y_grid.iter().zip(&prof.count_n).all(|(y, n)| {
        prof.y_grid.iter().zip(&prof.count_n).all(|(y2, n2)| y2.abs() >= y.abs() || n2 >= n)
    });
    report.check(
        "N(y) non-decreasing as |y| decreases",
        "definition of N(y) through r_n(y) > |y|/2",
        json!(monotone),
        json!(true),
        monotone,
    );

    let small = grid(cfg, cfg.n.min(32))?;
    // the given-basis split moves V's diagonal into S, so V is nilpotent and
    // the expansion terminates after `dim` terms
    let small_t = multiplication(cfg, &small)?.add(&volterra_part(cfg, &small, cfg.beta)?)?;
    let small_split = split_given_basis(&small_t)?;
    let t = small_t.entries().clone();
    let dim = t.nrows();
    let (lo, hi) = {
        let d = small_split.s_part.entries().diagonal();
        let re = d.iter().map(|z| z.re);
        (re.clone().fold(f64::INFINITY, f64::min) - 0.5, re.fold(f64::NEG_INFINITY, f64::max) + 0.5)
    };
    let mut worst: f64 = 0.0;
    let mut csv = String::from("re,im,relative_error\n");
    for _ in 0..cfg.samples {
        let y = rng.gen_range(0.1..1.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let lambda = C64::new(rng.gen_range(lo..hi), y);
        let direct = linalg::inverse(&(&t - CMatrix::identity(dim, dim) * lambda))?;
        let series = resolvent::neumann_resolvent(&small_split, lambda, dim)?;
        let err = (&series - &direct).norm() / direct.norm();
        worst = worst.max(err);
        let _ = writeln!(csv, "{:e},{:e},{err:e}", lambda.re, lambda.im);
    }
    report.csv("neumann.csv", &csv)?;
    report.check(
        &format!("relative error of the truncated Neumann expansion (n = {dim}, {} points)", cfg.samples),
        "resolvent as a Neumann series in c_n",
        num(worst),
        num(cfg.tolerances.distance),
        worst <= cfg.tolerances.distance,
    );
    Ok(())
}

fn expected_levinson(cfg: &Config, beta: f64) -> LevinsonVerdict {
    // ln N(y) ~ |y|^(-1/beta) for the E_beta kernels; for J^beta N itself is
    // a power, so ln N grows slower than any power
    let p = if cfg.kernel_kind == "fractional" { 0.0 } else { 1.0 / beta };
    if p < 1.0 - resolvent::LEVINSON_MARGIN {
        LevinsonVerdict::Integrable
    } else if p > 1.0 + resolvent::LEVINSON_MARGIN {
        LevinsonVerdict::Divergent
    } else {
        LevinsonVerdict::Inconclusive
    }
}

fn levinson(cfg: &Config, report: &mut Report, _: &mut ChaCha8Rng) -> Outcome {
    let g = grid(cfg, cfg.n)?;
    let prof = resolvent::profile(&construction(cfg, &g, cfg.beta)?, &profile_options(cfg))?;
    report.csv("profile_summary.csv", &prof.summary_csv())?;
    let rep = resolvent::levinson_classify(&prof)?;
    let want = expected_levinson(cfg, cfg.beta);
    report.check(
        &format!("Levinson verdict (ln N exponent {:.4} from {} points, margin {})", rep.p, rep.points, resolvent::LEVINSON_MARGIN),
        "integrable ln ln M(y) implies strong decomposability",
        json!(format!("{:?}", rep.verdict)),
        json!(format!("{want:?}")),
        rep.verdict == want,
    );
    Ok(())
}

fn fractional_powers(cfg: &Config, report: &mut Report, _: &mut ChaCha8Rng) -> Outcome {
    let b = cfg.beta;
    let levels: Vec<usize> = (0..4).rev().map(|k| cfg.n >> k).filter(|&n| n >= 2).collect();
    let mut csv = String::from("n,defect\n");
    let mut defects = Vec::new();
    for &n in &levels {
        let g = grid(cfg, n)?;
        let jb = build_fractional(&g, b)?;
        let d = jb.mul(&jb)?.sub(&build_fractional(&g, 2.0 * b)?)?.operator_norm()?;
        let _ = writeln!(csv, "{n},{d:e}");
        defects.push(d);
    }
    report.csv("power_law.csv", &csv)?;
    let worst_factor = defects.windows(2).map(|w| w[0] / w[1]).fold(f64::INFINITY, f64::min);
    report.check(
        &format!("smallest defect reduction per grid doubling of ||(J^{b})^2 - J^{}||", 2.0 * b),
        "J^a J^b = J^(a+b)",
        num(worst_factor),
        num(1.5),
        worst_factor >= 1.5,
    );

    let g = grid(cfg, cfg.n)?;
    for &beta in &cfg.orders {
        let jb = build_fractional(&g, beta)?;
        for m in [2u32, 3] {
            let norm = jb.pow(m).operator_norm()?;
            let bound = cfg.omega.powf(m as f64 * beta) / specfun::gamma(m as f64 * beta + 1.0)?;
            report.check(
                &format!("||(J^{beta})^{m}|| / (w^(m beta) / Gamma(m beta + 1))"),
                "norm bound for powers of the fractional integral",
                num(norm / bound),
                num(1.05),
                norm <= 1.05 * bound,
            );
        }
    }
    Ok(())
}

fn ebeta_asymptotics(cfg: &Config, report: &mut Report, _: &mut ChaCha8Rng) -> Outcome {
    let mut csv = String::from("beta,x,e_beta,ratio\n");
    for &beta in &cfg.orders {
        let spec = EbetaSpec::new(beta, cfg.c)?;
        let g1 = specfun::gamma(beta + 1.0)?;
        let ratio = |x: f64| -> Result<f64, Error> { Ok(specfun::e_beta(x, &spec)? * x * (-x.ln()).powf(beta + 1.0) / g1) };
        let mut min_ratio = f64::INFINITY;
        for k in 1..=12 {
            let x = 10f64.powi(-k);
            let r = ratio(x)?;
            min_ratio = min_ratio.min(r);
            let _ = writeln!(csv, "{beta},{x:e},{:e},{r:e}", specfun::e_beta(x, &spec)?);
        }
        for (x, lo, hi) in [(1e-6, 0.8, 1.2), (1e-8, 0.9, 1.1)] {
            let r = ratio(x)?;
            report.check(
                &format!("E_{beta}(x) x |ln x|^(beta+1) / Gamma(beta+1) at x = {x:e}"),
                "small-x asymptotics of E_beta",
                num(r),
                json!([lo, hi]),
                (lo..=hi).contains(&r),
            );
        }
        report.check(
            &format!("min over x in [1e-12, 0.1] of E_{beta}(x) x |ln x|^(beta+1)"),
            "lower bound for E_beta near zero",
            num(min_ratio),
            num(0.0),
            min_ratio > 0.0,
        );
        let m = specfun::m_moment(&spec, cfg.omega)?;
        report.check(
            &format!("m({beta}) = (1/Gamma(beta)) int_0^w E_beta"),
            "E_beta is integrable",
            num(m),
            json!("finite and positive"),
            m.is_finite() && m > 0.0,
        );
        let growth = |k: u32| -> Result<f64, Error> {
            let nb = k as f64 * beta;
            Ok(specfun::moment_growth_constant(nb, specfun::ln_m_moment(&spec.with_beta(nb)?, cfg.omega)?))
        };
        let fitted = [4, 8, 16].iter().map(|&k| growth(k)).collect::<Result<Vec<_>, _>>()?.into_iter().fold(0.0, f64::max);
        let later = [32, 64].iter().map(|&k| growth(k)).collect::<Result<Vec<_>, _>>()?.into_iter().fold(0.0, f64::max);
        report.check(
            &format!("ln(n beta) m(n beta)^(1/(n beta)) at n = 32, 64 against the max over n = 4, 8, 16 (beta = {beta})"),
            "m(n beta) <= (M / ln(n beta))^(n beta)",
            num(later),
            num(fitted),
            later <= fitted,
        );
    }
    report.csv("ebeta_ratio.csv", &csv)?;
    Ok(())
}

fn semigroup_ebeta(cfg: &Config, report: &mut Report, _: &mut ChaCha8Rng) -> Outcome {
    let levels: Vec<usize> = (0..3).rev().map(|k| cfg.n >> k).filter(|&n| n >= 2).collect();
    let mut cache: Vec<((usize, u64), OperatorMatrix)> = Vec::new();
    let mut op = |n: usize, b: f64| -> Result<OperatorMatrix, RunError> {
        if let Some((_, m)) = cache.iter().find(|(k, _)| *k == (n, b.to_bits())) {
            return Ok(m.clone());
        }
        let m = build_ebeta_operator(&grid(cfg, n)?, &EbetaSpec::new(b, cfg.c)?)?;
        cache.push(((n, b.to_bits()), m.clone()));
        Ok(m)
    };
    let mut csv = String::from("alpha,beta,n,defect,relative\n");
    let mut level_max = vec![0.0f64; levels.len()];
    for &a in &cfg.orders {
        for &b in &cfg.orders {
            let mut rel = Vec::new();
            for &n in &levels {
                let sum = op(n, a + b)?;
                let defect = op(n, a)?.mul(&op(n, b)?)?.sub(&sum)?.operator_norm()?;
                let r = defect / sum.operator_norm()?;
                let _ = writeln!(csv, "{a},{b},{n},{defect:e},{r:e}");
                level_max[rel.len()] = level_max[rel.len()].max(defect);
                rel.push(r);
            }
            let finest = *rel.last().unwrap();
            report.check(
                &format!("||V_{a} V_{b} - V_{}|| / ||V_{}|| at n = {}", a + b, a + b, cfg.n),
                "V_a V_b = V_(a+b)",
                num(finest),
                num(cfg.tolerances.relative),
                finest <= cfg.tolerances.relative,
            );
            let decreasing = rel.windows(2).all(|w| w[1] < w[0]);
            report.check(
                &format!("defect strictly decreasing over n = {levels:?} for ({a}, {b})"),
                "V_a V_b = V_(a+b)",
                json!(rel.iter().map(|&x| num(x)).collect::<Vec<Value>>()),
                json!("strictly decreasing"),
                decreasing,
            );
        }
    }
    for (n, d) in levels.iter().zip(&level_max) {
        report.check(
            &format!("max over orders of ||V_a V_b - V_(a+b)|| at n = {n}"),
            "V_a V_b = V_(a+b)",
            num(*d),
            json!("reported per refinement level"),
            d.is_finite(),
        );
    }
    report.csv("semigroup.csv", &csv)?;
    Ok(())
}

fn growth_frac(cfg: &Config, report: &mut Report, _: &mut ChaCha8Rng) -> Outcome {
    if cfg.kernel_kind != "fractional" {
        return Err(RunError::Config("growth-frac needs kernel.kind = \"fractional\"".into()));
    }
    let g = grid(cfg, cfg.n)?;
    for &beta in &cfg.orders {
        let split = construction(cfg, &g, beta)?;
        let prof = resolvent::profile(&split, &profile_options(cfg))?;
        report.csv(&format!("profile_beta_{beta}.csv"), &prof.summary_csv())?;
        let p = prof.n_exponent.unwrap_or(f64::NAN);
        report.check(
            &format!("exponent p of N(y) ~ |y|^(-p) for J^{beta} ({} fit points)", prof.fit_points),
            "N(y) <= C |y|^(-1/beta)",
            num(p),
            json!([1.0 / beta - cfg.tolerances.band, 1.0 / beta + cfg.tolerances.band]),
            (p - 1.0 / beta).abs() <= cfg.tolerances.band,
        );

        let ln_norms = resolvent::ln_power_norms(split.n_part.entries(), 8)?;
        let worst = ln_norms
            .iter()
            .enumerate()
            .map(|(k, ln)| {
                let nb = (k + 1) as f64 * beta;
                ln - (nb * cfg.omega.ln() - specfun::ln_gamma(nb + 1.0))
            })
            .fold(f64::NEG_INFINITY, f64::max);
        report.check(
            &format!("max_n ||(J^{beta})^n|| / (w^(n beta) / Gamma(n beta + 1)), n <= 8"),
            "||c_n|| <= ||V^n|| <= w^(n beta) / Gamma(n beta + 1)",
            num(worst.exp()),
            num(1.05),
            worst.exp() <= 1.05,
        );

        log_envelope_check(report, &prof, 1.0 / beta, &format!("J^{beta}"))?;
    }
    Ok(())
}

fn log_envelope_check(report: &mut Report, prof: &ResolventProfile, exponent: f64, label: &str) -> Outcome {
    let (c, slope) = prof
        .log_envelope_fit(exponent)
        .ok_or_else(|| Error::InsufficientData("too few finite ln M(y) samples with |y| < 1".into()))?;
    report.check(
        &format!("trend of ln M(y) / (|y|^(-{exponent}) |ln|y||) along the ladder for {label} (fitted C = {c:.4})"),
        "ln ||R_lambda|| <= C |y|^(-1/beta) |ln |y||",
        num(slope),
        num(0.1),
        slope <= 0.1,
    );
    Ok(())
}

fn growth_ebeta(cfg: &Config, report: &mut Report, _: &mut ChaCha8Rng) -> Outcome {
    if cfg.kernel_kind != "ebeta" {
        return Err(RunError::Config("growth-ebeta needs kernel.kind = \"ebeta\"".into()));
    }
    let beta = cfg.beta;
    let g = grid(cfg, cfg.n)?;
    let split = construction(cfg, &g, beta)?;
    let prof = resolvent::profile(&split, &profile_options(cfg))?;
    report.csv("profile_summary.csv", &prof.summary_csv())?;
    let band = [f64::NEG_INFINITY, 1.0 / beta + cfg.tolerances.band];
    let p = prof.log_n_exponent.unwrap_or(f64::NAN);
    report.check(
        &format!("exponent of ln N(y) ~ |y|^(-p) for V_{beta}"),
        "ln N(y) <= C (2M/|y|)^(1/beta)",
        num(p),
        json!(band[1]),
        p <= band[1],
    );

    let spec = EbetaSpec::new(beta, cfg.c)?;
    let ln_norms = resolvent::ln_power_norms(split.n_part.entries(), 8)?;
    let mut worst = f64::NEG_INFINITY;
    for (k, ln) in ln_norms.iter().enumerate() {
        let m = specfun::ln_m_moment(&spec.with_beta((k + 1) as f64 * beta)?, cfg.omega)?;
        worst = worst.max(ln - m);
    }
    report.check(
        &format!("max_n ||V_{beta}^n|| / m(n beta), n <= 8"),
        "|c_n| <= m(n beta)",
        num(worst.exp()),
        num(1.05),
        worst.exp() <= 1.05,
    );

    // the bound of the c_n estimate turned into a bound on ln N
    let growth = [4u32, 8, 16]
        .iter()
        .map(|&k| {
            let nb = k as f64 * beta;
            Ok(specfun::moment_growth_constant(nb, specfun::ln_m_moment(&spec.with_beta(nb)?, cfg.omega)?))
        })
        .collect::<Result<Vec<_>, Error>>()?
        .into_iter()
        .fold(0.0, f64::max);
    let mut csv = String::from("y,N,ln_N_bound_shape\n");
    let mut ratios = Vec::new();
    let mut ys = Vec::new();
    for (y, n) in prof.y_grid.iter().zip(&prof.count_n) {
        let shape = resolvent::cn_bound_to_n_bound(beta, growth, *y)?;
        let _ = writeln!(csv, "{y:e},{n},{shape:e}");
        // same window as the exponent fit: small counts are dominated by the
        // pre-asymptotic regime
        if *n >= cfg.min_count.max(2) && *n < prof.n_max {
            ratios.push((*n as f64).ln() / shape);
            ys.push(*y);
        }
    }
    report.csv("n_bound.csv", &csv)?;
    let c_fit = ratios.iter().copied().fold(0.0, f64::max);
    let trend = fit_power(&ys, &ratios).unwrap_or(f64::NAN);
    report.check(
        &format!("trend of ln N(y) / (2M/|y|)^(1/beta) over N(y) >= {} (M = {growth:.4}, fitted C = {c_fit:.4})", cfg.min_count),
        "ln N(y) <= C (2M/|y|)^(1/beta)",
        num(trend),
        num(cfg.tolerances.band),
        trend <= cfg.tolerances.band,
    );

    // the simplified kernel bound M / ((x - t)(|ln(x - t)|^(beta+1) + 1))
    let v = build_volterra(&g, move |x, t| {
        let d = x - t;
        C64::new(1.0 / (d * (d.ln().abs().powf(beta + 1.0) + 1.0)), 0.0)
    })?;
    let simple = SplitPair::from_construction(multiplication(cfg, &g)?, v)?;
    let prof = resolvent::profile(&simple, &profile_options(cfg))?;
    report.csv("profile_simplified_kernel.csv", &prof.summary_csv())?;
    let p = prof.log_n_exponent.unwrap_or(f64::NAN);
    report.check(
        "exponent of ln N(y) for the kernel 1/((x-t)(|ln(x-t)|^(beta+1) + 1))",
        "the E_beta kernel bound may be replaced by its small-argument form",
        num(p),
        json!(band[1]),
        p <= band[1],
    );
    Ok(())
}

fn side_modulus(s: &ComplexFn, omega: f64, xi: f64) -> Result<f64, Error> {
    let (s1, _) = symbol::transform(s.as_ref(), omega, xi)?;
    Ok((C64::new(0.0, -xi) * s1).norm())
}

fn symbol_trace(cfg: &Config, report: &mut Report, _: &mut ChaCha8Rng) -> Outcome {
    let (s, _) = difference_kernel(cfg)?;
    let tr = symbol::trace_kernel(&s, cfg.omega, &cfg.xi)?;
    report.csv("symbol_trace.csv", &tr.to_csv())?;
    let def = tr
        .xi_samples
        .iter()
        .zip(tr.g.iter().zip(&tr.s_tilde1))
        .map(|(x, (g, s1))| (g - C64::new(0.0, -x) * s1).norm())
        .fold(0.0, f64::max);
    report.check("max |g - (-i xi s~1)|", "definition of the symbol g", num(def), num(1e-12), def <= 1e-12);

    let top = cfg.xi.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    match cfg.kernel_kind.as_str() {
        "jialpha" => {
            for (xi, want) in [(top, (-cfg.alpha * PI / 2.0).exp()), (-top, (cfg.alpha * PI / 2.0).exp())] {
                let m = side_modulus(&s, cfg.omega, xi)?;
                report.check(
                    &format!("|g({xi:e})| / e^(-+alpha pi/2)"),
                    "limit sets of J^(i alpha) lie on the circles |z| = e^(-+alpha pi/2)",
                    num(m / want),
                    json!([1.0 - cfg.tolerances.relative, 1.0 + cfg.tolerances.relative]),
                    (m / want - 1.0).abs() <= cfg.tolerances.relative,
                );
            }
        }
        "constant" => {
            let rep = symbol::delta_estimate(&tr, 0.05)?;
            for (side, d) in [("+", rep.plus), ("-", rep.minus)] {
                let dist = match d {
                    DeltaSide::Convergent { beta, .. } => (beta - 1.0).norm(),
                    _ => f64::INFINITY,
                };
                report.check(
                    &format!("distance of the {side} limit of g from 1 (s = 1)"),
                    "the identity has symbol 1",
                    num(dist),
                    num(0.05),
                    dist <= 0.05,
                );
            }
        }
        _ => {}
    }
    if cfg.kernel_kind != "jialpha" || cfg.alpha == 0.0 {
        let sym = tr
            .xi_samples
            .iter()
            .zip(&tr.s_tilde)
            .filter_map(|(x, a)| {
                let j = tr.xi_samples.iter().position(|y| *y == -x)?;
                Some((a - tr.s_tilde[j].conj()).norm())
            })
            .fold(0.0, f64::max);
        report.check("max |s~(-xi) - conj s~(xi)| (real kernel)", "Hermitian symmetry of the transform", num(sym), num(1e-8), sym <= 1e-8);
    }
    Ok(())
}

fn prop54(cfg: &Config, report: &mut Report, _: &mut ChaCha8Rng) -> Outcome {
    let g = grid(cfg, cfg.n)?;
    if let Some(x) = cfg.xi.iter().find(|x| x.abs() > g.max_frequency()) {
        return Err(RunError::Config(format!("ladder.xi contains {x}, above the aliasing limit pi/(4h) = {}", g.max_frequency())));
    }
    let (s, primitive) = difference_kernel(cfg)?;
    let t = if cfg.kernel_kind == "jialpha" {
        build_fractional_imaginary(&g, cfg.alpha)?
    } else {
        build_difference_operator(&g, s.clone(), Some(primitive))?
    };
    let mut csv = String::from("xi,residual\n");
    let mut res = Vec::new();
    for &xi in &cfg.xi {
        let r = symbol::prop54_residual(&t, s.as_ref(), xi)?;
        let _ = writeln!(csv, "{xi:e},{r:e}");
        res.push(r);
    }
    report.csv("prop54.csv", &csv)?;
    let decreasing = res.windows(2).all(|w| w[1] < w[0]);
    report.check(
        &format!("residual strictly decreasing along xi = [{}]", fmt_list(&cfg.xi)),
        "T e^(-ix xi) - g(xi) e^(-ix xi) -> 0",
        json!(res.iter().map(|&r| num(r)).collect::<Vec<_>>()),
        json!("strictly decreasing"),
        decreasing,
    );
    Ok(())
}

fn boundedness(cfg: &Config, report: &mut Report, _: &mut ChaCha8Rng) -> Outcome {
    let (s, _) = difference_kernel(cfg)?;
    let rep = symbol::boundedness_indicator(s.as_ref(), cfg.omega, &cfg.xi)?;
    let mut csv = String::from("xi,abs_xi_s_tilde\n");
    for (x, v) in &rep.samples {
        let _ = writeln!(csv, "{x:e},{v:e}");
    }
    report.csv("boundedness.csv", &csv)?;
    let expect_bounded = cfg.kernel_kind != "inverse-sqrt";
    report.check(
        &format!("growth slope of |xi s~(xi)| (sup {:.4}); expected {}", rep.sup, if expect_bounded { "bounded" } else { "growing" }),
        "T is bounded when xi s~(xi) is bounded",
        num(rep.slope),
        num(symbol::GROWTH_SLOPE),
        rep.bounded == expect_bounded,
    );
    Ok(())
}

fn annulus_jialpha(cfg: &Config, report: &mut Report, _: &mut ChaCha8Rng) -> Outcome {
    let g = grid(cfg, cfg.n)?;
    let t = build_fractional_imaginary(&g, cfg.alpha)?;
    let eig = linalg::eigenvalues(t.entries())?;
    let max_mod = eig.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let min_mod = eig.iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min);
    let (inner, outer) = symbol::jialpha_annulus(cfg.alpha);
    let s = jialpha_kernel(cfg.alpha)?;
    let top = cfg.xi.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let g_plus = side_modulus(&s, cfg.omega, top)?;
    let g_minus = side_modulus(&s, cfg.omega, -top)?;
    let (want_plus, want_minus) = ((-cfg.alpha * PI / 2.0).exp(), (cfg.alpha * PI / 2.0).exp());

    let mut csv = String::from("quantity,value,reference\n");
    for (q, v, r) in [
        ("max_eigenvalue_modulus", max_mod, outer),
        ("min_eigenvalue_modulus", min_mod, inner),
        ("abs_g_plus", g_plus, want_plus),
        ("abs_g_minus", g_minus, want_minus),
    ] {
        let _ = writeln!(csv, "{q},{v:e},{r:e}");
    }
    report.csv("annulus.csv", &csv)?;

    report.check(
        "spectrum inside the outer circle: max eigenvalue modulus / e^(|alpha| pi/2)",
        "spectrum of J^(i alpha) is the annulus e^(-|alpha| pi/2) <= |z| <= e^(|alpha| pi/2)",
        num(max_mod / outer),
        json!("<= 1.05"),
        max_mod <= 1.05 * outer,
    );
    report.check(
        "spectrum reaches the outer circle: max eigenvalue modulus / e^(|alpha| pi/2)",
        "spectrum of J^(i alpha) is the annulus e^(-|alpha| pi/2) <= |z| <= e^(|alpha| pi/2)",
        num(max_mod / outer),
        json!(">= 0.85"),
        max_mod >= 0.85 * outer,
    );
    for (label, m, want) in [("+", g_plus, want_plus), ("-", g_minus, want_minus)] {
        report.check(
            &format!("|g| on the {label} side at |xi| = {top:e}, relative to e^(-+alpha pi/2)"),
            "limit sets of J^(i alpha) lie on the boundary circles",
            num(m / want),
            json!([1.0 - cfg.tolerances.relative, 1.0 + cfg.tolerances.relative]),
            (m / want - 1.0).abs() <= cfg.tolerances.relative,
        );
    }
    Ok(())
}

fn witness(cfg: &Config, report: &mut Report, _: &mut ChaCha8Rng) -> Outcome {
    let (s, _) = difference_kernel(cfg)?;
    let tr = symbol::trace_kernel(&s, cfg.omega, &cfg.xi)?;
    report.csv("symbol_trace.csv", &tr.to_csv())?;
    let verdict = symbol::non_triangular_witness(&tr, cfg.tolerances.witness)?;
    let expect_fire = cfg.kernel_kind == "jialpha" && cfg.alpha != 0.0;
    let fired = matches!(verdict, WitnessVerdict::NotSvTriangular { .. });
    report.check(
        &format!("witness verdict for the configured kernel: {verdict:?}"),
        "two distinct points in Delta rule out (S+V)-triangularity",
        json!(if fired { "NotSvTriangular" } else { "Inconclusive" }),
        json!(if expect_fire { "NotSvTriangular" } else { "Inconclusive" }),
        fired == expect_fire,
    );
    let control = symbol::trace(&|_| C64::new(1.0, 0.0), cfg.omega, &cfg.xi)?;
    let v = symbol::non_triangular_witness(&control, cfg.tolerances.witness)?;
    report.check(
        "witness verdict for s = 1 (the identity)",
        "a single-point Delta gives no witness",
        json!(format!("{v:?}")),
        json!("Inconclusive"),
        v == WitnessVerdict::Inconclusive,
    );
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_is_complete_and_unique() {
        let mut names: Vec<&str> = REGISTRY.iter().map(|e| e.name).collect();
        names.sort();
        names.dedup();
        assert_eq!(names.len(), 15);
        for n in names {
            assert!(defaults(n).is_some());
        }
        assert!(defaults("unknown").is_none());
    }
}

//! Symbols of difference-kernel operators `T f = d/dx ∫₀ˣ s(x − t) f(t) dt`.
//!
//! `s̃₁(ξ) = ∫₀^ω e^{itξ} s(t)(1 − t/ω) dt`, `s̃(ξ) = ∫₀^ω e^{itξ} s(t) dt`
//! and `g(ξ) = −iξ s̃₁(ξ)`. The limit sets `Δ±` of `g` along `ξ → ±∞` lie in
//! `σ(T)`; two distinct points in `Δ` rule out `(S+V)`-triangularity along
//! the chain of subspaces `L²(x, ω)`.

use std::f64::consts::PI;
use std::fmt::Write as _;

use rayon::prelude::*;

use crate::grid::{sample_exponential, Sign};
use crate::operators::{ComplexFn, OperatorMatrix};
use crate::quad::gauss_legendre8;
use crate::{Error, Result, C64};

/// Trailing samples per side used for the limit-set summaries.
pub const TRAILING_WINDOW: usize = 16;

/// Panels are graded geometrically toward `t = 0` down to `2^{-GRADING}`
/// times the first uniform panel; the neglected head is below `1e−18·ω` in
/// length.
const GRADING: i32 = 60;

/// `±ξ` magnitudes: `2^k` for `k = 0..=9`, then quarter-octave steps up to
/// `2^{14}` so the trailing window spans almost four octaves.
pub fn default_xi_magnitudes() -> Vec<f64> {
    (0..=9).map(|k| 2f64.powi(k)).chain((0..=16).map(|j| 2f64.powf(10.0 + j as f64 / 4.0))).collect()
}

fn breakpoints(omega: f64, xi: f64) -> Vec<f64> {
    let h_base = omega / 64.0;
    let width = if xi == 0.0 { h_base } else { h_base.min(1.0 / (4.0 * xi.abs())) };
    let cells = (omega / width).ceil() as usize;
    let w = omega / cells as f64;
    let mut pts: Vec<f64> = (0..=GRADING).rev().map(|k| w * 2f64.powi(-k)).collect();
    pts.extend((2..=cells).map(|k| k as f64 * w));
    *pts.last_mut().unwrap() = omega;
    pts
}

/// `(s̃₁(ξ), s̃(ξ))` by Gauss–Legendre panels no wider than
/// `min(ω/64, 1/(4|ξ|))`, graded toward the possibly singular endpoint 0.
pub fn transform(s: &(dyn Fn(f64) -> C64 + Sync), omega: f64, xi: f64) -> Result<(C64, C64)> {
    if !(omega > 0.0 && omega.is_finite()) || !xi.is_finite() {
        return Err(Error::InvalidArgument(format!("need omega > 0 and finite xi, got {omega}, {xi}")));
    }
    let pts = breakpoints(omega, xi);
    let (mut s1, mut s0) = (C64::new(0.0, 0.0), C64::new(0.0, 0.0));
    for w in pts.windows(2) {
        let plain = gauss_legendre8(&|t| C64::from_polar(1.0, t * xi) * s(t), w[0], w[1]);
        let moment = gauss_legendre8(&|t| C64::from_polar(t / omega, t * xi) * s(t), w[0], w[1]);
        s0 += plain;
        s1 += plain - moment;
    }
    if !(s0.re.is_finite() && s0.im.is_finite() && s1.re.is_finite() && s1.im.is_finite()) {
        return Err(Error::Numerical(format!("transform of s diverges at xi = {xi}")));
    }
    Ok((s1, s0))
}

/// Summary of the last [`TRAILING_WINDOW`] samples on one side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowSummary {
    pub mean: C64,
    pub mean_modulus: f64,
    /// `max |g − mean|`.
    pub spread: f64,
    /// `max |g| − min |g|`.
    pub modulus_spread: f64,
    /// Range of the unwrapped argument.
    pub arg_drift: f64,
}

fn summarise(g: &[C64]) -> WindowSummary {
    let k = g.len() as f64;
    let mean = g.iter().sum::<C64>() / k;
    let mods: Vec<f64> = g.iter().map(|z| z.norm()).collect();
    let mean_modulus = mods.iter().sum::<f64>() / k;
    let spread = g.iter().map(|z| (z - mean).norm()).fold(0.0, f64::max);
    let modulus_spread =
        mods.iter().copied().fold(f64::NEG_INFINITY, f64::max) - mods.iter().copied().fold(f64::INFINITY, f64::min);
    let mut unwrapped = Vec::with_capacity(g.len());
    let mut prev: Option<f64> = None;
    for z in g {
        let mut a = z.arg();
        if let Some(p) = prev {
            while a - p > PI {
                a -= 2.0 * PI;
            }
            while a - p < -PI {
                a += 2.0 * PI;
            }
        }
        unwrapped.push(a);
        prev = Some(a);
    }
    let arg_drift = unwrapped.iter().copied().fold(f64::NEG_INFINITY, f64::max)
        - unwrapped.iter().copied().fold(f64::INFINITY, f64::min);
    WindowSummary { mean, mean_modulus, spread, modulus_spread, arg_drift }
}

#[derive(Debug, Clone)]
pub struct SymbolTrace {
    pub omega: f64,
    /// Ascending, both signs.
    pub xi_samples: Vec<f64>,
    pub s_tilde: Vec<C64>,
    pub s_tilde1: Vec<C64>,
    pub g: Vec<C64>,
    pub window_plus: Option<WindowSummary>,
    pub window_minus: Option<WindowSummary>,
}

/// Evaluates the transforms on `±magnitudes`.
pub fn trace(s: &(dyn Fn(f64) -> C64 + Sync), omega: f64, magnitudes: &[f64]) -> Result<SymbolTrace> {
    if magnitudes.iter().any(|m| !(*m > 0.0 && m.is_finite())) {
        return Err(Error::InvalidArgument("xi magnitudes must be positive and finite".into()));
    }
    let mut xi: Vec<f64> = magnitudes.iter().flat_map(|&m| [m, -m]).collect();
    xi.sort_by(f64::total_cmp);
    xi.dedup();
    let pairs = xi.par_iter().map(|&x| transform(s, omega, x)).collect::<Result<Vec<_>>>()?;
    let s_tilde1: Vec<C64> = pairs.iter().map(|p| p.0).collect();
    let s_tilde: Vec<C64> = pairs.iter().map(|p| p.1).collect();
    let g: Vec<C64> = xi.iter().zip(&s_tilde1).map(|(&x, s1)| C64::new(0.0, -x) * s1).collect();
    let mut t = SymbolTrace { omega, xi_samples: xi, s_tilde, s_tilde1, g, window_plus: None, window_minus: None };
    t.window_plus = t.side_window(Sign::Plus, TRAILING_WINDOW);
    t.window_minus = t.side_window(Sign::Minus, TRAILING_WINDOW);
    Ok(t)
}

impl SymbolTrace {
    /// `g` on one side ordered by increasing `|ξ|`.
    pub fn side(&self, sign: Sign) -> Vec<(f64, C64)> {
        let mut out: Vec<(f64, C64)> =
            self.xi_samples.iter().zip(&self.g).filter(|(x, _)| x.signum() == sign.as_f64()).map(|(x, g)| (*x, *g)).collect();
        out.sort_by(|a, b| a.0.abs().total_cmp(&b.0.abs()));
        out
    }

    pub fn side_window(&self, sign: Sign, window: usize) -> Option<WindowSummary> {
        let side = self.side(sign);
        (window > 0 && side.len() >= window)
            .then(|| summarise(&side[side.len() - window..].iter().map(|p| p.1).collect::<Vec<_>>()))
    }

    /// Columns `xi,re_s_tilde,im_s_tilde,re_s_tilde1,im_s_tilde1,re_g,im_g,abs_g`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("xi,re_s_tilde,im_s_tilde,re_s_tilde1,im_s_tilde1,re_g,im_g,abs_g\n");
        for i in 0..self.xi_samples.len() {
            let (s, s1, g) = (self.s_tilde[i], self.s_tilde1[i], self.g[i]);
            let _ = writeln!(
                out,
                "{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e}",
                self.xi_samples[i],
                s.re,
                s.im,
                s1.re,
                s1.im,
                g.re,
                g.im,
                g.norm()
            );
        }
        out
    }
}

/// Estimated limit set of `g` on one side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DeltaSide {
    /// The trailing window clusters at one point.
    Convergent { beta: C64, spread: f64 },
    /// `|g|` settles while `arg g` keeps drifting: a circle.
    LimitSet { modulus: f64, spread: f64, arg_drift: f64 },
    /// Neither pattern within the tolerance.
    Unresolved { summary: WindowSummary },
}

impl DeltaSide {
    /// Modulus of the representative point(s).
    pub fn modulus(&self) -> f64 {
        match self {
            DeltaSide::Convergent { beta, .. } => beta.norm(),
            DeltaSide::LimitSet { modulus, .. } => *modulus,
            DeltaSide::Unresolved { summary } => summary.mean_modulus,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaReport {
    pub plus: DeltaSide,
    pub minus: DeltaSide,
    pub tol: f64,
}

// The circle test goes first: a circle of radius below `tol` also passes the
// point test, and a drifting argument at a settled, nonzero modulus is never
// a point limit.
fn classify(w: &WindowSummary, tol: f64) -> DeltaSide {
    if w.modulus_spread < tol && w.arg_drift > PI / 2.0 && w.mean_modulus > w.modulus_spread {
        DeltaSide::LimitSet { modulus: w.mean_modulus, spread: w.modulus_spread, arg_drift: w.arg_drift }
    } else if w.spread < tol {
        DeltaSide::Convergent { beta: w.mean, spread: w.spread }
    } else {
        DeltaSide::Unresolved { summary: *w }
    }
}

pub fn delta_estimate(trace: &SymbolTrace, tol: f64) -> Result<DeltaReport> {
    delta_estimate_with_window(trace, tol, TRAILING_WINDOW)
}

pub fn delta_estimate_with_window(trace: &SymbolTrace, tol: f64, window: usize) -> Result<DeltaReport> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidArgument(format!("tol must be positive, got {tol}")));
    }
    let get = |sign| {
        trace.side_window(sign, window).ok_or_else(|| {
            Error::InsufficientData(format!("{} samples on the {sign:?} side, need {window}", trace.side(sign).len()))
        })
    };
    let (p, m) = (get(Sign::Plus)?, get(Sign::Minus)?);
    Ok(DeltaReport { plus: classify(&p, tol), minus: classify(&m, tol), tol })
}

/// `0.05 · max(|Δ⁺|, |Δ⁻|)` from the raw trailing windows.
pub fn default_tol(trace: &SymbolTrace) -> Result<f64> {
    let (p, m) = match (trace.window_plus, trace.window_minus) {
        (Some(p), Some(m)) => (p, m),
        _ => return Err(Error::InsufficientData(format!("need {TRAILING_WINDOW} samples per side"))),
    };
    Ok((0.05 * p.mean_modulus.max(m.mean_modulus)).max(f64::MIN_POSITIVE))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WitnessVerdict {
    /// `Δ` holds two points at least `separation` apart.
    NotSvTriangular { separation: f64 },
    Inconclusive,
}

/// Lower bound on the distance between points of `Δ⁺ ∪ Δ⁻`, or within one
/// circular side. `None` when a side is unresolved.
fn separation(report: &DeltaReport) -> Option<f64> {
    let chord = |side: &DeltaSide| match side {
        DeltaSide::LimitSet { modulus, arg_drift, .. } => 2.0 * modulus * (arg_drift.min(PI) / 2.0).sin(),
        _ => 0.0,
    };
    let between = match (&report.plus, &report.minus) {
        (DeltaSide::Convergent { beta: a, .. }, DeltaSide::Convergent { beta: b, .. }) => (a - b).norm(),
        (DeltaSide::Unresolved { .. }, _) | (_, DeltaSide::Unresolved { .. }) => 0.0,
        (a, b) => (a.modulus() - b.modulus()).abs(),
    };
    let best = between.max(chord(&report.plus)).max(chord(&report.minus));
    (best > 0.0).then_some(best)
}

/// Fires only on positive evidence; never asserts triangularity. `tol`
/// defaults to [`default_tol`].
pub fn non_triangular_witness(trace: &SymbolTrace, tol: Option<f64>) -> Result<WitnessVerdict> {
    let tol = match tol {
        Some(t) => t,
        None => default_tol(trace)?,
    };
    let report = delta_estimate(trace, tol)?;
    Ok(match separation(&report) {
        Some(d) if d > tol => WitnessVerdict::NotSvTriangular { separation: d },
        _ => WitnessVerdict::Inconclusive,
    })
}

/// `‖T e^{−ixξ} − g(ξ) e^{−ixξ}‖` in the discrete `L²` norm.
pub fn prop54_residual(t: &OperatorMatrix, s: &(dyn Fn(f64) -> C64 + Sync), xi: f64) -> Result<f64> {
    let grid = t.grid();
    let e = sample_exponential(grid, xi, Sign::Minus)?;
    let (s1, _) = transform(s, grid.omega(), xi)?;
    let g = C64::new(0.0, -xi) * s1;
    Ok(t.apply(&e)?.sub(&e.scale(g))?.l2_norm())
}

#[derive(Debug, Clone)]
pub struct BoundednessReport {
    /// `(ξ, |ξ s̃(ξ)|)` over both signs.
    pub samples: Vec<(f64, f64)>,
    pub sup: f64,
    /// Slope of `ln|ξ s̃|` against `ln|ξ|` over the upper half of the ladder.
    pub slope: f64,
    pub bounded: bool,
}

/// Slopes above this count as growth.
pub const GROWTH_SLOPE: f64 = 0.2;

pub fn boundedness_indicator(s: &(dyn Fn(f64) -> C64 + Sync), omega: f64, magnitudes: &[f64]) -> Result<BoundednessReport> {
    let tr = trace(s, omega, magnitudes)?;
    let samples: Vec<(f64, f64)> = tr.xi_samples.iter().zip(&tr.s_tilde).map(|(&x, st)| (x, (x * st).norm())).collect();
    let sup = samples.iter().map(|p| p.1).fold(0.0, f64::max);
    let mut mags: Vec<f64> = magnitudes.to_vec();
    mags.sort_by(f64::total_cmp);
    let cut = mags[mags.len() / 2];
    let upper: Vec<&(f64, f64)> = samples.iter().filter(|p| p.0.abs() >= cut && p.1 > 0.0).collect();
    let slope = if upper.len() >= 2 {
        let xs: Vec<f64> = upper.iter().map(|p| p.0.abs().ln()).collect();
        let ys: Vec<f64> = upper.iter().map(|p| p.1.ln()).collect();
        let k = xs.len() as f64;
        let (mx, my) = (xs.iter().sum::<f64>() / k, ys.iter().sum::<f64>() / k);
        let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
        let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        if sxx > 0.0 { sxy / sxx } else { 0.0 }
    } else {
        0.0
    };
    Ok(BoundednessReport { samples, sup, slope, bounded: slope <= GROWTH_SLOPE })
}

/// Inner and outer radius of the spectral annulus of `J^{iα}`.
pub fn jialpha_annulus(alpha: f64) -> (f64, f64) {
    let r = (alpha.abs() * PI / 2.0).exp();
    (1.0 / r, r)
}

/// Convenience wrapper for kernels held as [`ComplexFn`].
pub fn trace_kernel(s: &ComplexFn, omega: f64, magnitudes: &[f64]) -> Result<SymbolTrace> {
    trace(s.as_ref(), omega, magnitudes)
}

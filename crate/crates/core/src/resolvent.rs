//! Resolvent growth: `‖R_λ(T)‖`, the powers `c_n(λ) = (−y (S − λ)^{-1} V)^n`
//! with `y = Im λ`, their root profile `r_n(y) = sup_x ‖c_n(x + iy)‖^{1/n}`,
//! the counts `N(y) = #{n : r_n(y) > |y|/2}`, the envelope
//! `M(y) = sup_x ‖R_{x+iy}(T)‖`, and the Levinson-condition classifier.
//!
//! Power norms are accumulated in log space with per-step renormalisation:
//! `‖c_n‖` spans hundreds of orders of magnitude over `n ≤ 256`.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::linalg;
use crate::operators::SplitPair;
use crate::{CMatrix, CVector, Error, Result, C64};

/// Exponent margin of the Levinson verdict.
pub const LEVINSON_MARGIN: f64 = 0.15;

/// Counts below this are excluded from exponent fits: an integer count of
/// `N` carries a relative quantisation error of `1/N`, and the power laws
/// are statements about `N → ∞`.
pub const DEFAULT_MIN_COUNT: usize = 16;

// Far from σ(T) the resolvent is nearly scalar and its singular values
// cluster; 1e−10 in the norm is far below anything the profile resolves.
const RESOLVENT_REL_TOL: f64 = 1e-10;

/// `1/σ_min(λI − T)`; fails with [`Error::NearSingular`] when `σ_min` is
/// below `1e−14·‖T‖_F`.
pub fn resolvent_norm(t: &CMatrix, lambda: C64) -> Result<f64> {
    let ln = ln_resolvent_norm(t, lambda)?;
    let sigma_min = (-ln).exp();
    let scale = t.norm().max(1.0);
    if sigma_min < 1e-14 * scale {
        return Err(Error::NearSingular { re: lambda.re, im: lambda.im, sigma_min });
    }
    Ok(ln.exp())
}

/// `ln ‖(λI − T)^{-1}‖`, `+∞` when the norm exceeds the floating-point range.
pub fn ln_resolvent_norm(t: &CMatrix, lambda: C64) -> Result<f64> {
    ln_resolvent_norm_tol(t, lambda, RESOLVENT_REL_TOL)
}

fn ln_resolvent_norm_tol(t: &CMatrix, lambda: C64, rel_tol: f64) -> Result<f64> {
    let n = t.nrows();
    let a = CMatrix::identity(n, n) * lambda - t;
    let singular = || Error::NearSingular { re: lambda.re, im: lambda.im, sigma_min: 0.0 };
    let top = if linalg::is_lower_triangular(&a) {
        if a.diagonal().iter().any(|d| *d == C64::new(0.0, 0.0)) {
            return Err(singular());
        }
        linalg::top_singular_value_op_with(
            n,
            |v| a.solve_lower_triangular(v).ok_or_else(singular),
            |v| a.ad_solve_lower_triangular(v).ok_or_else(singular),
            rel_tol,
            300,
        )?
    } else {
        let lu = a.clone().lu();
        let lu_adj = a.adjoint().lu();
        linalg::top_singular_value_op_with(
            n,
            |v| lu.solve(v).ok_or_else(singular),
            |v| lu_adj.solve(v).ok_or_else(singular),
            rel_tol,
            300,
        )?
    };
    Ok(top.ln())
}

fn check_split(split: &SplitPair) -> Result<Vec<f64>> {
    let s = split.s_part.entries();
    if !split.s_part.is_diagonal() {
        return Err(Error::Precondition("S must be diagonal".into()));
    }
    let scale = s.diagonal().iter().map(|z| z.norm()).fold(1.0, f64::max);
    s.diagonal()
        .iter()
        .map(|z| {
            if z.im.abs() > 1e-12 * scale {
                Err(Error::Precondition(format!("S must be self-adjoint; diagonal entry {z}")))
            } else {
                Ok(z.re)
            }
        })
        .collect()
}

/// `ln ‖B^k‖` for `k = 1..=n_max`, renormalising by the Frobenius norm after
/// every product. Zero powers give `−∞`.
pub fn ln_power_norms(b: &CMatrix, n_max: usize) -> Result<Vec<f64>> {
    if let Some(col) = lower_toeplitz_column(b) {
        return ln_toeplitz_power_norms(&col, n_max);
    }
    let mut out = Vec::with_capacity(n_max);
    let mut p = b.clone();
    let mut acc = 0.0;
    for k in 1..=n_max {
        if k > 1 {
            p = &p * b;
        }
        let fro = p.norm();
        if fro == 0.0 {
            out.resize(n_max, f64::NEG_INFINITY);
            break;
        }
        p *= C64::new(fro.recip(), 0.0);
        acc += fro.ln();
        let top = linalg::top_singular_value_op(p.nrows(), |v| Ok(&p * v), |v| Ok(p.ad_mul(v)))?;
        out.push(acc + top.ln());
    }
    Ok(out)
}

/// First column when `b` is lower-triangular Toeplitz (every operator built
/// on a uniform grid from a convolution kernel).
fn lower_toeplitz_column(b: &CMatrix) -> Option<Vec<C64>> {
    let n = b.nrows();
    if n == 0 || b.ncols() != n || !linalg::is_lower_triangular(b) {
        return None;
    }
    let col: Vec<C64> = b.column(0).iter().copied().collect();
    for j in 1..n {
        for i in j..n {
            if b[(i, j)] != col[i - j] {
                return None;
            }
        }
    }
    Some(col)
}

// truncated convolution: the first column of the product of two lower
// triangular Toeplitz matrices
fn toeplitz_mul(a: &[C64], b: &[C64]) -> Vec<C64> {
    (0..a.len()).map(|i| (0..=i).map(|k| a[i - k] * b[k]).sum()).collect()
}

fn ln_toeplitz_power_norms(col: &[C64], n_max: usize) -> Result<Vec<f64>> {
    let n = col.len();
    let mut out = Vec::with_capacity(n_max);
    let mut p = col.to_vec();
    let mut acc = 0.0;
    for k in 1..=n_max {
        if k > 1 {
            p = toeplitz_mul(&p, col);
        }
        let scale = p.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if scale == 0.0 {
            out.resize(n_max, f64::NEG_INFINITY);
            break;
        }
        p.iter_mut().for_each(|z| *z *= scale.recip());
        acc += scale.ln();
        let conj: Vec<C64> = p.iter().map(|z| z.conj()).collect();
        let top = linalg::top_singular_value_op(
            n,
            |v| Ok(CVector::from_vec(toeplitz_mul(&p, v.as_slice()))),
            // the adjoint is upper Toeplitz: reverse, convolve, reverse
            |v| {
                let rev: Vec<C64> = v.iter().rev().copied().collect();
                Ok(CVector::from_iterator(n, toeplitz_mul(&conj, &rev).into_iter().rev()))
            },
        )?;
        out.push(acc + top.ln());
    }
    Ok(out)
}

fn v1_matrix(s_diag: &[f64], v: &CMatrix, lambda: C64) -> CMatrix {
    let y = lambda.im;
    let mut b = v.clone();
    for (j, &s) in s_diag.iter().enumerate() {
        let f = -y / (s - lambda);
        for k in 0..b.ncols() {
            b[(j, k)] *= f;
        }
    }
    b
}

/// `ln ‖c_n(λ)‖`.
pub fn ln_c_norm(split: &SplitPair, lambda: C64, n: usize) -> Result<f64> {
    if lambda.im == 0.0 {
        return Err(Error::Precondition("c_n needs Im lambda != 0".into()));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    let s = check_split(split)?;
    let b = v1_matrix(&s, split.n_part.entries(), lambda);
    Ok(*ln_power_norms(&b, n)?.last().unwrap())
}

pub fn c_norm(split: &SplitPair, lambda: C64, n: usize) -> Result<f64> {
    Ok(ln_c_norm(split, lambda, n)?.exp())
}

/// `(I + Σ_{n ≤ n_max} c_n(λ)/y^n)(S − λI)^{-1}`, the truncated expansion of
/// `(T − λI)^{-1}` in the split basis.
pub fn neumann_resolvent(split: &SplitPair, lambda: C64, n_max: usize) -> Result<CMatrix> {
    let s = check_split(split)?;
    let y = lambda.im;
    if y == 0.0 {
        return Err(Error::Precondition("expansion needs Im lambda != 0".into()));
    }
    let dim = s.len();
    let b = v1_matrix(&s, split.n_part.entries(), lambda) / C64::new(y, 0.0);
    let mut sum = CMatrix::identity(dim, dim);
    let mut p = CMatrix::identity(dim, dim);
    for _ in 0..n_max {
        p = &p * &b;
        sum += &p;
    }
    let inv_diag = CVector::from_iterator(dim, s.iter().map(|&x| (C64::new(x, 0.0) - lambda).inv()));
    Ok(sum * CMatrix::from_diagonal(&inv_diag))
}

/// Choice of `Im λ` samples.
#[derive(Debug, Clone, PartialEq)]
pub enum YLadder {
    Explicit(Vec<f64>),
    /// `2^{−k}` for `k = kmin..=kmax`.
    Dyadic { kmin: i32, kmax: i32 },
    /// Geometric, `points` samples between `2·ρ_{n_max}` and `2·ρ_1` with
    /// `ρ_k = ‖V^k‖^{1/k}`: the band where `N(y)` moves between `n_max`
    /// and 0.
    Adaptive { points: usize },
}

impl YLadder {
    pub fn dyadic_default() -> Self {
        YLadder::Dyadic { kmin: 2, kmax: 9 }
    }
}

#[derive(Debug, Clone)]
pub struct ProfileOptions {
    pub y_ladder: YLadder,
    pub x_points: usize,
    pub x_margin: f64,
    /// Defaults to the matrix dimension.
    pub n_max: Option<usize>,
    pub min_count: usize,
}

impl Default for ProfileOptions {
    fn default() -> Self {
        Self { y_ladder: YLadder::Adaptive { points: 16 }, x_points: 64, x_margin: 1.0, n_max: None, min_count: DEFAULT_MIN_COUNT }
    }
}

#[derive(Debug, Clone)]
pub struct ResolventProfile {
    pub split: SplitPair,
    pub y_grid: Vec<f64>,
    pub x_window: (f64, f64),
    /// Uniform window samples plus every distinct point of `σ(S)`.
    pub x_grid: Vec<f64>,
    pub n_max: usize,
    /// `ln ‖c_n(x + iy)‖` indexed `[y][x][n − 1]`.
    pub ln_c_norms: Vec<Vec<Vec<f64>>>,
    /// `r_n(y)` indexed `[y][n − 1]`.
    pub r: Vec<Vec<f64>>,
    pub count_n: Vec<usize>,
    /// `ln M(y)`; `+∞` where the resolvent norm leaves the floating range.
    pub ln_envelope_m: Vec<f64>,
    /// Exponent `p` of `N(y) ~ |y|^{−p}`.
    pub n_exponent: Option<f64>,
    /// Exponent `p` of `ln N(y) ~ |y|^{−p}`.
    pub log_n_exponent: Option<f64>,
    /// Exponent of `ln M(y) ~ |y|^{−q}`.
    pub ln_m_exponent: Option<f64>,
    /// Exponent of `ln ln M(y) ~ |y|^{−q}`.
    pub lnln_m_exponent: Option<f64>,
    /// Points entering the count fits.
    pub fit_points: usize,
    /// `max_y [ln M(y) − ln((C/|y|)(M_V/|y|)^{N(y)})]` with `C = 2 + n_max`,
    /// `M_V = max(‖V‖, |y|)`; non-positive when the envelope holds.
    pub envelope_log_excess: f64,
    pub metadata: String,
}

/// Least-squares slope of `ln v` against `ln(1/|y|)`.
pub fn fit_power(ys: &[f64], vals: &[f64]) -> Option<f64> {
    if ys.len() < 2 {
        return None;
    }
    let xs: Vec<f64> = ys.iter().map(|y| -y.abs().ln()).collect();
    let ls: Vec<f64> = vals.iter().map(|v| v.ln()).collect();
    let n = xs.len() as f64;
    let (mx, ml) = (xs.iter().sum::<f64>() / n, ls.iter().sum::<f64>() / n);
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxl: f64 = xs.iter().zip(&ls).map(|(x, l)| (x - mx) * (l - ml)).sum();
    Some(sxl / sxx)
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![0.5 * (a + b)];
    }
    (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect()
}

/// `max_x ln ‖R_{x+iy}‖`. Lanczos estimates are lower bounds that settle
/// slowly where the singular values cluster (far from `σ(T)`), so a loose
/// pass over all of `xs` is followed by a tight one on the candidates within
/// `1e−3` of the loose maximum.
fn ln_sup_resolvent(t: &CMatrix, xs: &[f64], y: f64) -> Result<f64> {
    let coarse = xs.par_iter().map(|&x| ln_resolvent_norm_tol(t, C64::new(x, y), 1e-6)).collect::<Result<Vec<_>>>()?;
    let top = coarse.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !top.is_finite() {
        return Ok(top);
    }
    xs.iter()
        .zip(&coarse)
        .filter(|(_, c)| **c >= top - 1e-3)
        .map(|(&x, _)| ln_resolvent_norm(t, C64::new(x, y)))
        .try_fold(f64::NEG_INFINITY, |m, v| Ok(m.max(v?)))
}

/// Fills every table of [`ResolventProfile`].
pub fn profile(split: &SplitPair, opts: &ProfileOptions) -> Result<ResolventProfile> {
    let s = check_split(split)?;
    let v = split.n_part.entries();
    let dim = s.len();
    let n_max = opts.n_max.unwrap_or(dim);
    if n_max == 0 {
        return Err(Error::InvalidArgument("n_max must be positive".into()));
    }

    let ln_v_powers = ln_power_norms(v, n_max)?;
    let y_grid: Vec<f64> = match &opts.y_ladder {
        YLadder::Explicit(ys) => ys.clone(),
        YLadder::Dyadic { kmin, kmax } => (*kmin..=*kmax).map(|k| 2f64.powi(-k)).collect(),
        YLadder::Adaptive { points } => {
            let rho = |k: usize| (ln_v_powers[k - 1] / k as f64).exp();
            let (lo, hi) = (2.0 * rho(n_max), 2.0 * rho(1));
            if hi > 0.0 && lo > 0.0 && hi > lo {
                let (l0, l1) = (hi.ln(), lo.ln());
                linspace(l0, l1, *points).into_iter().map(f64::exp).collect()
            } else {
                (2..=9).map(|k| 2f64.powi(-k)).collect()
            }
        }
    };
    if y_grid.iter().any(|y| *y == 0.0 || !y.is_finite()) {
        return Err(Error::InvalidArgument("y ladder must be finite and nonzero".into()));
    }

    let (smin, smax) = s.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
    let x_window = (smin - opts.x_margin, smax + opts.x_margin);
    let mut x_grid = linspace(x_window.0, x_window.1, opts.x_points);
    x_grid.extend(&s);
    x_grid.sort_by(f64::total_cmp);
    x_grid.dedup();

    // a scalar S factors out of c_n: ‖c_n‖ = (|y|/|s − λ|)^n ‖V^n‖
    let scalar = s.iter().all(|&x| x == s[0]);
    let pairs: Vec<(usize, usize)> = (0..y_grid.len()).flat_map(|iy| (0..x_grid.len()).map(move |ix| (iy, ix))).collect();
    let flat: Vec<Vec<f64>> = pairs
        .par_iter()
        .map(|&(iy, ix)| {
            let lambda = C64::new(x_grid[ix], y_grid[iy]);
            if scalar {
                let ratio = (y_grid[iy].abs() / (C64::new(s[0], 0.0) - lambda).norm()).ln();
                Ok(ln_v_powers.iter().enumerate().map(|(k, lv)| (k + 1) as f64 * ratio + lv).collect())
            } else {
                ln_power_norms(&v1_matrix(&s, v, lambda), n_max)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let mut ln_c_norms: Vec<Vec<Vec<f64>>> = vec![Vec::with_capacity(x_grid.len()); y_grid.len()];
    for ((iy, _), row) in pairs.iter().zip(flat) {
        ln_c_norms[*iy].push(row);
    }

    let r: Vec<Vec<f64>> = ln_c_norms
        .iter()
        .map(|per_x| {
            (0..n_max)
                .map(|k| per_x.iter().map(|row| (row[k] / (k + 1) as f64).exp()).fold(0.0, f64::max))
                .collect()
        })
        .collect();
    let count_n: Vec<usize> =
        y_grid.iter().zip(&r).map(|(y, rn)| rn.iter().filter(|&&v| v > 0.5 * y.abs()).count()).collect();

    let t = split.reconstruct();
    let ln_envelope_m: Vec<f64> = y_grid.iter().map(|&y| ln_sup_resolvent(&t, &x_grid, y)).collect::<Result<Vec<_>>>()?;

    let window: Vec<usize> = (0..y_grid.len()).filter(|&i| count_n[i] >= opts.min_count.max(1) && count_n[i] < n_max).collect();
    let pick = |idx: &[usize], f: &dyn Fn(usize) -> f64| -> (Vec<f64>, Vec<f64>) {
        (idx.iter().map(|&i| y_grid[i]).collect(), idx.iter().map(|&i| f(i)).collect())
    };
    let (wy, wn) = pick(&window, &|i| count_n[i] as f64);
    let n_exponent = fit_power(&wy, &wn);
    let log_window: Vec<usize> = window.iter().copied().filter(|&i| count_n[i] > 1).collect();
    let (ly, ln_) = pick(&log_window, &|i| (count_n[i] as f64).ln());
    let log_n_exponent = fit_power(&ly, &ln_);
    let m_idx: Vec<usize> = (0..y_grid.len()).filter(|&i| ln_envelope_m[i].is_finite() && ln_envelope_m[i] > 0.0).collect();
    let (my, mv) = pick(&m_idx, &|i| ln_envelope_m[i]);
    let ln_m_exponent = fit_power(&my, &mv);
    let mm_idx: Vec<usize> = m_idx.iter().copied().filter(|&i| ln_envelope_m[i] > 1.0).collect();
    let (mmy, mmv) = pick(&mm_idx, &|i| ln_envelope_m[i].ln());
    let lnln_m_exponent = fit_power(&mmy, &mmv);

    let v_norm = linalg::operator_norm(v)?;
    let c_const = 2.0 + n_max as f64;
    let envelope_log_excess = y_grid
        .iter()
        .enumerate()
        .filter(|(i, _)| ln_envelope_m[*i].is_finite())
        .map(|(i, &y)| {
            let m = v_norm.max(y.abs());
            let bound = (c_const / y.abs()).ln() + count_n[i] as f64 * (m / y.abs()).ln();
            ln_envelope_m[i] - bound
        })
        .fold(f64::NEG_INFINITY, f64::max);

    let mut metadata = String::new();
    let _ = write!(
        metadata,
        "x_window=[min sigma(S) - {m}, max sigma(S) + {m}] = [{:.6}, {:.6}] with {} uniform points plus sigma(S); \
         n_max={n_max}; min_count={}; scalar_S={scalar}; ladder={:?}",
        x_window.0,
        x_window.1,
        opts.x_points,
        opts.min_count,
        opts.y_ladder,
        m = opts.x_margin
    );

    Ok(ResolventProfile {
        split: split.clone(),
        y_grid,
        x_window,
        x_grid,
        n_max,
        ln_c_norms,
        r,
        count_n,
        ln_envelope_m,
        n_exponent,
        log_n_exponent,
        ln_m_exponent,
        lnln_m_exponent,
        fit_points: window.len(),
        envelope_log_excess,
        metadata,
    })
}

impl ResolventProfile {
    /// Columns `y,N,M,lnM`.
    pub fn summary_csv(&self) -> String {
        let mut out = String::from("y,N,M,lnM\n");
        for (i, y) in self.y_grid.iter().enumerate() {
            let lm = self.ln_envelope_m[i];
            let _ = writeln!(out, "{y:e},{},{:e},{lm:e}", self.count_n[i], lm.exp());
        }
        out
    }

    /// Columns `n,y,r_n`.
    pub fn r_csv(&self) -> String {
        let mut out = String::from("n,y,r_n\n");
        for (i, y) in self.y_grid.iter().enumerate() {
            for (k, r) in self.r[i].iter().enumerate() {
                let _ = writeln!(out, "{},{y:e},{r:e}", k + 1);
            }
        }
        out
    }

    /// Largest `C/(|y|^{−e}|ln|y||)`-normalised value of `ln M(y)` over the
    /// ladder points with `|y| < 1`, and the slope of that ratio against
    /// `ln(1/|y|)` (near zero or negative when the envelope shape holds).
    pub fn log_envelope_fit(&self, exponent: f64) -> Option<(f64, f64)> {
        let (ys, ratios): (Vec<f64>, Vec<f64>) = self
            .y_grid
            .iter()
            .zip(&self.ln_envelope_m)
            .filter(|(y, lm)| y.abs() < 1.0 && lm.is_finite() && **lm > 0.0)
            .map(|(y, lm)| (*y, lm / (y.abs().powf(-exponent) * y.abs().ln().abs())))
            .unzip();
        let c = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Some((c, fit_power(&ys, &ratios)?))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LevinsonVerdict {
    Integrable,
    Divergent,
    Inconclusive,
}

#[derive(Debug, Clone)]
pub struct LevinsonReport {
    pub verdict: LevinsonVerdict,
    /// Exponent of `ln N(y) ~ |y|^{−p}`.
    pub p: f64,
    /// Exponent of `ln ln M(y) ~ |y|^{−q}` when enough finite samples exist.
    pub q: Option<f64>,
    pub points: usize,
    /// Only set for [`LevinsonVerdict::Integrable`].
    pub conclusion: Option<&'static str>,
}

/// `∫₀^ε ln N(y) dy` converges when `ln N ~ |y|^{−p}` with `p < 1`. The
/// verdict never claims non-decomposability: `Divergent` only says the
/// sufficient condition is not met.
pub fn levinson_classify(profile: &ResolventProfile) -> Result<LevinsonReport> {
    if profile.y_grid.len() < 4 {
        return Err(Error::InsufficientData(format!("{} ladder points, need at least 4", profile.y_grid.len())));
    }
    let integrable = |p: f64, q: Option<f64>, points: usize| LevinsonReport {
        verdict: LevinsonVerdict::Integrable,
        p,
        q,
        points,
        conclusion: Some("Levinson-type integrability holds on the ladder: evidence that T is strongly decomposable"),
    };
    if profile.count_n.iter().all(|&c| c == 0) {
        return Ok(integrable(0.0, None, profile.y_grid.len()));
    }
    let points = profile.count_n.iter().filter(|&&c| c > 1 && c < profile.n_max).count();
    let p = match profile.log_n_exponent {
        Some(p) if points >= 4 => p,
        _ => {
            return Err(Error::InsufficientData(format!("{points} usable ladder points for the ln N fit, need at least 4")))
        }
    };
    let q = profile.lnln_m_exponent;
    Ok(if p < 1.0 - LEVINSON_MARGIN {
        integrable(p, q, points)
    } else if p > 1.0 + LEVINSON_MARGIN {
        LevinsonReport { verdict: LevinsonVerdict::Divergent, p, q, points, conclusion: None }
    } else {
        LevinsonReport { verdict: LevinsonVerdict::Inconclusive, p, q, points, conclusion: None }
    })
}

/// `(2M/|y|)^{1/α}`, the bound on `ln N(y)` implied by
/// `‖c_n‖ ≤ (M/ln(n+1)^α)^n`.
pub fn cn_bound_to_n_bound(alpha: f64, m: f64, y: f64) -> Result<f64> {
    if !(alpha > 0.0 && m > 0.0 && y != 0.0) {
        return Err(Error::InvalidArgument("need alpha > 0, M > 0, y != 0".into()));
    }
    Ok((2.0 * m / y.abs()).powf(1.0 / alpha))
}

//! Dense complex linear algebra on top of `nalgebra`.
//!
//! Triangular inputs take exact shortcuts (eigenvalues off the diagonal,
//! inverses by substitution) so that structural zeros survive: the inverse of a
//! lower-triangular matrix is lower-triangular to the bit, which keeps the
//! spectra of nilpotent remainders at exactly zero.

use std::cmp::Ordering;

use nalgebra::linalg::{Schur, SymmetricEigen, SVD};
use nalgebra::DMatrix;

use crate::{CMatrix, CVector, Error, Result, C64};

const SCHUR_EPS: f64 = 1e-15;
const SCHUR_MAX_ITER: usize = 0; // nalgebra: 0 means "until convergence"
const DENSE_SVD_LIMIT: usize = 1024;

pub fn is_lower_triangular(m: &CMatrix) -> bool {
    (0..m.ncols()).all(|k| (0..k).all(|j| m[(j, k)] == C64::new(0.0, 0.0)))
}

pub fn is_upper_triangular(m: &CMatrix) -> bool {
    (0..m.ncols()).all(|k| (k + 1..m.nrows()).all(|j| m[(j, k)] == C64::new(0.0, 0.0)))
}

pub fn is_triangular(m: &CMatrix) -> bool {
    is_lower_triangular(m) || is_upper_triangular(m)
}

/// Singular values, descending.
pub fn singular_values(m: &CMatrix) -> Result<Vec<f64>> {
    let svd = SVD::try_new(m.clone(), false, false, f64::EPSILON, 0)
        .ok_or_else(|| Error::Numerical("SVD did not converge".into()))?;
    let mut s: Vec<f64> = svd.singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    Ok(s)
}

/// Largest singular value. Dense SVD below 1024, Lanczos on `T*T` above.
pub fn operator_norm(m: &CMatrix) -> Result<f64> {
    if m.nrows() == 0 {
        return Ok(0.0);
    }
    if m.nrows() < DENSE_SVD_LIMIT {
        Ok(singular_values(m)?[0])
    } else {
        lanczos_norm(m)
    }
}

/// Lanczos with full reorthogonalisation on `T*T`; converged when the top Ritz
/// value moves by less than 1e−12 relative between steps.
fn lanczos_norm(m: &CMatrix) -> Result<f64> {
    let n = m.ncols();
    let adj = m.adjoint();
    let mut q = CVector::from_fn(n, |k, _| C64::new(1.0 + (k as f64 * 0.618_033_988_75).fract(), 0.0));
    q /= C64::new(q.norm(), 0.0);
    let mut basis: Vec<CVector> = vec![q.clone()];
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut prev = 0.0;
    for step in 0..n.min(400) {
        let mut w = &adj * (m * &basis[step]);
        alpha.push(basis[step].dotc(&w).re);
        for _ in 0..2 {
            for b in &basis {
                let c = b.dotc(&w);
                w -= b * c;
            }
        }
        let k = alpha.len();
        let tri = DMatrix::<f64>::from_fn(k, k, |i, j| match i.abs_diff(j) {
            0 => alpha[i],
            1 => beta[i.min(j)],
            _ => 0.0,
        });
        let top = SymmetricEigen::new(tri).eigenvalues.iter().copied().fold(0.0, f64::max);
        let b = w.norm();
        if (top - prev).abs() <= 1e-12 * top || b <= 1e-14 * top.max(f64::MIN_POSITIVE) {
            return Ok(top.sqrt());
        }
        prev = top;
        beta.push(b);
        basis.push(w / C64::new(b, 0.0));
    }
    Err(Error::Numerical("Lanczos norm estimate did not converge".into()))
}

/// Largest singular value of a linear map given by its action and the
/// action of its adjoint (Golub–Kahan–Lanczos with full reorthogonalisation).
/// Works with `‖A‖` rather than `‖A‖²`, so values up to ~1e300 are safe;
/// returns `+∞` on overflow.
pub fn top_singular_value_op(
    n: usize,
    apply: impl Fn(&CVector) -> Result<CVector>,
    apply_adj: impl Fn(&CVector) -> Result<CVector>,
) -> Result<f64> {
    top_singular_value_op_with(n, apply, apply_adj, 1e-13, 300)
}

/// [`top_singular_value_op`] with an explicit relative stopping tolerance
/// and step limit; clustered top singular values (non-compact operators)
/// need looser settings.
pub fn top_singular_value_op_with(
    n: usize,
    apply: impl Fn(&CVector) -> Result<CVector>,
    apply_adj: impl Fn(&CVector) -> Result<CVector>,
    rel_tol: f64,
    max_steps: usize,
) -> Result<f64> {
    let mut v = CVector::from_fn(n, |k, _| C64::new(1.0 + (k as f64 * 0.618_033_988_75).fract(), 0.0));
    v /= C64::new(v.norm(), 0.0);
    let mut us: Vec<CVector> = Vec::new();
    let mut vs: Vec<CVector> = vec![v];
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut prev = 0.0;
    for k in 0..n.min(max_steps) {
        let mut u = apply(&vs[k])?;
        for q in &us {
            let c = q.dotc(&u);
            u -= q * c;
        }
        let a = scaled_norm(&u);
        if !a.is_finite() {
            return Ok(f64::INFINITY);
        }
        if a == 0.0 && k == 0 {
            return Ok(0.0);
        }
        alpha.push(a);
        let top = bidiagonal_top(&alpha, &beta);
        if a <= 1e-14 * top {
            return Ok(top);
        }
        us.push(u * C64::new(a.recip(), 0.0));
        let mut w = apply_adj(&us[k])?;
        for _ in 0..2 {
            for q in &vs {
                let c = q.dotc(&w);
                w -= q * c;
            }
        }
        let b = scaled_norm(&w);
        if !b.is_finite() {
            return Ok(f64::INFINITY);
        }
        if (top - prev).abs() <= rel_tol * top || b <= 1e-14 * top || k + 1 == n {
            return Ok(top);
        }
        prev = top;
        beta.push(b);
        vs.push(w * C64::new(b.recip(), 0.0));
    }
    Err(Error::Numerical("bidiagonalisation did not converge".into()))
}

// `‖v‖₂` without squaring overflow.
fn scaled_norm(v: &CVector) -> f64 {
    let m = v.iter().map(|z| z.re.abs().max(z.im.abs())).fold(0.0, f64::max);
    if m == 0.0 || !m.is_finite() {
        return m;
    }
    m * v.iter().map(|z| (z / m).norm_sqr()).sum::<f64>().sqrt()
}

// Largest singular value of the upper bidiagonal matrix (alpha on the
// diagonal, beta above it): bisection on the Sturm count of the tridiagonal
// BᵀB, after scaling the entries to at most 1.
fn bidiagonal_top(alpha: &[f64], beta: &[f64]) -> f64 {
    let k = alpha.len();
    let scale = alpha.iter().chain(beta).copied().fold(0.0, f64::max);
    if scale == 0.0 {
        return 0.0;
    }
    let a: Vec<f64> = alpha.iter().map(|x| x / scale).collect();
    let b: Vec<f64> = (0..k).map(|i| beta.get(i).map_or(0.0, |x| x / scale)).collect();
    let d: Vec<f64> = (0..k).map(|i| a[i] * a[i] + if i > 0 { b[i - 1] * b[i - 1] } else { 0.0 }).collect();
    let e2: Vec<f64> = (0..k.saturating_sub(1)).map(|i| (a[i] * b[i]).powi(2)).collect();
    let below = |x: f64| {
        let mut count = 0;
        let mut q = 1.0;
        for i in 0..k {
            q = d[i] - x - if i > 0 { e2[i - 1] / q } else { 0.0 };
            if q == 0.0 {
                q = -f64::EPSILON * (x.abs() + f64::MIN_POSITIVE);
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    };
    let mut hi = (0..k)
        .map(|i| d[i] + if i > 0 { e2[i - 1].sqrt() } else { 0.0 } + if i + 1 < k { e2[i].sqrt() } else { 0.0 })
        .fold(0.0, f64::max);
    let mut lo = 0.0;
    while hi - lo > 1e-16 * hi {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if below(mid) == k {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    scale * hi.sqrt()
}

/// Smallest singular value.
pub fn smallest_singular_value(m: &CMatrix) -> Result<f64> {
    Ok(*singular_values(m)?.last().unwrap_or(&0.0))
}

/// Eigenvalues with multiplicity (diagonal for triangular input).
pub fn eigenvalues(m: &CMatrix) -> Result<Vec<C64>> {
    if is_triangular(m) {
        return Ok(m.diagonal().iter().copied().collect());
    }
    let (_, r) = schur_unordered(m)?;
    Ok(r.diagonal().iter().copied().collect())
}

/// Eigenvalues from the Schur form of the transpose: an independent route
/// that never takes the triangular shortcut.
pub fn eigenvalues_via_transpose(m: &CMatrix) -> Result<Vec<C64>> {
    let (_, r) = general_schur(&m.transpose())?;
    Ok(r.diagonal().iter().copied().collect())
}

/// Ordering used for reproducible Schur forms: ascending real part, then
/// ascending imaginary part.
pub fn eig_order(a: &C64, b: &C64) -> Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

/// Unitary `Q` and upper-triangular `R` with `Q* M Q = R`, diagonal sorted by
/// [`eig_order`].
pub fn schur(m: &CMatrix) -> Result<(CMatrix, CMatrix)> {
    let (mut q, mut r) = schur_unordered(m)?;
    sort_schur(&mut q, &mut r);
    Ok((q, r))
}

fn schur_unordered(m: &CMatrix) -> Result<(CMatrix, CMatrix)> {
    let n = m.nrows();
    if is_upper_triangular(m) {
        return Ok((CMatrix::identity(n, n), m.clone()));
    }
    if is_lower_triangular(m) {
        // the reversal permutation turns lower into upper triangular
        let p = CMatrix::from_fn(n, n, |i, j| if i + j + 1 == n { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) });
        let r = &p * m * &p;
        return Ok((p, r));
    }
    general_schur(m)
}

fn general_schur(m: &CMatrix) -> Result<(CMatrix, CMatrix)> {
    let n = m.nrows();
    let (q, mut r) = Schur::try_new(m.clone(), SCHUR_EPS, SCHUR_MAX_ITER)
        .ok_or_else(|| Error::Numerical("Schur iteration did not converge".into()))?
        .unpack();
    let scale = r.norm().max(f64::MIN_POSITIVE);
    for k in 0..n {
        for j in k + 1..n {
            if r[(j, k)].norm() > 1e-10 * scale {
                return Err(Error::Numerical(format!("Schur form not triangular at ({j}, {k})")));
            }
            r[(j, k)] = C64::new(0.0, 0.0);
        }
    }
    Ok((q, r))
}

/// `(c, s)` with `[c s; −s̄ c]·[f; g] = [·; 0]`, `c` real.
fn givens(f: C64, g: C64) -> (f64, C64) {
    if g == C64::new(0.0, 0.0) {
        return (1.0, C64::new(0.0, 0.0));
    }
    if f == C64::new(0.0, 0.0) {
        return (0.0, g.conj() / g.norm());
    }
    let norm = f.norm().hypot(g.norm());
    (f.norm() / norm, (f / f.norm()) * g.conj() / norm)
}

/// `x ← c x + s y`, `y ← c y − s̄ x` over paired entries.
fn rot(x: &mut [C64], y: &mut [C64], c: f64, s: C64) {
    for (a, b) in x.iter_mut().zip(y.iter_mut()) {
        let (xa, yb) = (*a, *b);
        *a = xa * c + s * yb;
        *b = yb * c - s.conj() * xa;
    }
}

/// Swap the adjacent diagonal entries `k`, `k+1` of an upper-triangular `r`
/// by a unitary rotation, updating `q` so that `Q* M Q = R` is preserved.
fn swap_adjacent(q: &mut CMatrix, r: &mut CMatrix, k: usize) {
    let n = r.nrows();
    let (t11, t22) = (r[(k, k)], r[(k + 1, k + 1)]);
    let (c, s) = givens(r[(k, k + 1)], t22 - t11);

    // rows k, k+1 from column k+2 on
    if k + 2 < n {
        let mut xa: Vec<C64> = (k + 2..n).map(|j| r[(k, j)]).collect();
        let mut yb: Vec<C64> = (k + 2..n).map(|j| r[(k + 1, j)]).collect();
        rot(&mut xa, &mut yb, c, s);
        for (i, j) in (k + 2..n).enumerate() {
            r[(k, j)] = xa[i];
            r[(k + 1, j)] = yb[i];
        }
    }
    // columns k, k+1 above row k
    let mut xa: Vec<C64> = (0..k).map(|i| r[(i, k)]).collect();
    let mut yb: Vec<C64> = (0..k).map(|i| r[(i, k + 1)]).collect();
    rot(&mut xa, &mut yb, c, s.conj());
    for i in 0..k {
        r[(i, k)] = xa[i];
        r[(i, k + 1)] = yb[i];
    }
    r[(k, k)] = t22;
    r[(k + 1, k + 1)] = t11;

    let mut xa: Vec<C64> = q.column(k).iter().copied().collect();
    let mut yb: Vec<C64> = q.column(k + 1).iter().copied().collect();
    rot(&mut xa, &mut yb, c, s.conj());
    q.column_mut(k).copy_from_slice(&xa);
    q.column_mut(k + 1).copy_from_slice(&yb);
}

fn sort_schur(q: &mut CMatrix, r: &mut CMatrix) {
    let n = r.nrows();
    // bubble sort: every exchange is a single adjacent swap
    for pass in 0..n {
        let mut swapped = false;
        for k in 0..n.saturating_sub(1 + pass) {
            if eig_order(&r[(k, k)], &r[(k + 1, k + 1)]) == Ordering::Greater {
                swap_adjacent(q, r, k);
                swapped = true;
            }
        }
        if !swapped {
            break;
        }
    }
}

/// Inverse; triangular inputs use substitution and keep their zero pattern.
pub fn inverse(m: &CMatrix) -> Result<CMatrix> {
    let n = m.nrows();
    let id = CMatrix::identity(n, n);
    let singular = || Error::Numerical("matrix is singular".into());
    if is_lower_triangular(m) {
        return m.solve_lower_triangular(&id).ok_or_else(singular);
    }
    if is_upper_triangular(m) {
        return m.solve_upper_triangular(&id).ok_or_else(singular);
    }
    m.clone().lu().try_inverse().ok_or_else(singular)
}

/// Solves `m x = b` (triangular shortcut as in [`inverse`]).
pub fn solve(m: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    let singular = || Error::Numerical("matrix is singular".into());
    if is_lower_triangular(m) {
        return m.solve_lower_triangular(b).ok_or_else(singular);
    }
    if is_upper_triangular(m) {
        return m.solve_upper_triangular(b).ok_or_else(singular);
    }
    m.clone().lu().solve(b).ok_or_else(singular)
}

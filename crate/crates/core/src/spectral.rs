//! Spectra, s-numbers, Macaev/Schatten norms and the Riesz–Dunford calculus.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::linalg;
use crate::operators::{split_given_basis, split_schur, OperatorMatrix, Provenance};
use crate::{CMatrix, Error, Result, C64};

/// Schatten exponents reported by [`spectrum`].
pub const SCHATTEN_P: [f64; 5] = [1.0, 2.0, 3.0, 4.0, f64::INFINITY];

#[derive(Debug, Clone)]
pub struct SpectralReport {
    pub eigenvalues: Vec<C64>,
    pub spectral_radius: f64,
    /// Descending.
    pub s_numbers: Vec<f64>,
    /// `(p, ‖·‖_p)` for each entry of [`SCHATTEN_P`].
    pub schatten: Vec<(f64, f64)>,
    pub macaev_omega: f64,
    pub quasinilpotent: bool,
    pub tol_q: f64,
}

impl SpectralReport {
    pub fn schatten_norm(&self, p: f64) -> Option<f64> {
        self.schatten.iter().find(|(q, _)| *q == p).map(|(_, v)| *v)
    }

    /// Flat `key=value` record, one field per line. Field names: `n`,
    /// `spectral_radius`, `operator_norm`, `macaev_omega`, `schatten_<p>`,
    /// `quasinilpotent`, `tol_q`, `eigenvalue_<k>` (`re im`), `s_<k>`.
    pub fn to_record(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "n={}", self.eigenvalues.len());
        let _ = writeln!(out, "spectral_radius={:e}", self.spectral_radius);
        let _ = writeln!(out, "operator_norm={:e}", self.s_numbers.first().copied().unwrap_or(0.0));
        let _ = writeln!(out, "macaev_omega={:e}", self.macaev_omega);
        for (p, v) in &self.schatten {
            let key = if p.is_infinite() { "inf".to_string() } else { format!("{p}") };
            let _ = writeln!(out, "schatten_{key}={v:e}");
        }
        let _ = writeln!(out, "quasinilpotent={}", self.quasinilpotent);
        let _ = writeln!(out, "tol_q={:e}", self.tol_q);
        for (k, z) in self.eigenvalues.iter().enumerate() {
            let _ = writeln!(out, "eigenvalue_{k}={:e} {:e}", z.re, z.im);
        }
        for (k, s) in self.s_numbers.iter().enumerate() {
            let _ = writeln!(out, "s_{k}={s:e}");
        }
        out
    }
}

/// Default quasinilpotency tolerance for an `n × n` discretization.
pub fn default_tol_q(n: usize) -> f64 {
    10.0 / n as f64
}

pub fn spectrum(t: &OperatorMatrix) -> Result<SpectralReport> {
    spectrum_with_tol(t.entries(), default_tol_q(t.n()))
}

pub fn spectrum_with_tol(m: &CMatrix, tol_q: f64) -> Result<SpectralReport> {
    let eigenvalues = linalg::eigenvalues(m)?;
    let spectral_radius = eigenvalues.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let s_numbers = linalg::singular_values(m)?;
    let schatten = SCHATTEN_P.iter().map(|&p| (p, schatten_norm(&s_numbers, p))).collect();
    Ok(SpectralReport {
        macaev_omega: macaev_from_s(&s_numbers),
        eigenvalues,
        spectral_radius,
        s_numbers,
        schatten,
        quasinilpotent: spectral_radius <= tol_q,
        tol_q,
    })
}

/// `Σ s_k / (2k − 1)` over descending s-numbers.
pub fn macaev_from_s(s: &[f64]) -> f64 {
    s.iter().enumerate().map(|(k, v)| v / (2 * k + 1) as f64).sum()
}

pub fn macaev_norm(t: &OperatorMatrix) -> Result<f64> {
    Ok(macaev_from_s(&linalg::singular_values(t.entries())?))
}

/// `(Σ s_k^p)^{1/p}`; `p = ∞` gives `s_1`. Scaled by `s_1` to avoid overflow.
pub fn schatten_norm(s: &[f64], p: f64) -> f64 {
    let top = s.iter().copied().fold(0.0, f64::max);
    if top == 0.0 {
        return 0.0;
    }
    if p.is_infinite() {
        return top;
    }
    top * s.iter().map(|v| (v / top).powf(p)).sum::<f64>().powf(1.0 / p)
}

/// Hausdorff distance between two finite point sets.
pub fn hausdorff(a: &[C64], b: &[C64]) -> f64 {
    let one_way = |x: &[C64], y: &[C64]| {
        x.iter().map(|p| y.iter().map(|q| (p - q).norm()).fold(f64::INFINITY, f64::min)).fold(0.0, f64::max)
    };
    if a.is_empty() && b.is_empty() {
        return 0.0;
    }
    one_way(a, b).max(one_way(b, a))
}

/// Largest pair distance of a greedy multiset matching (closest pairs first);
/// infinite when the multisets differ in size.
pub fn matching_distance(a: &[C64], b: &[C64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let mut pairs: Vec<(f64, usize, usize)> =
        a.iter().enumerate().flat_map(|(i, p)| b.iter().enumerate().map(move |(j, q)| ((p - q).norm(), i, j))).collect();
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)).then(x.2.cmp(&y.2)));
    let (mut used_a, mut used_b) = (vec![false; a.len()], vec![false; b.len()]);
    let mut worst: f64 = 0.0;
    for (d, i, j) in pairs {
        if !used_a[i] && !used_b[j] {
            used_a[i] = true;
            used_b[j] = true;
            worst = worst.max(d);
        }
    }
    worst
}

/// Spectral set distance: Hausdorff, tightened by the multiset matching so
/// multiplicity mismatches register.
pub fn spectral_distance(a: &[C64], b: &[C64]) -> f64 {
    hausdorff(a, b).max(matching_distance(a, b))
}

#[derive(Debug, Clone)]
pub struct SigmaEqualityReport {
    pub sigma_t: Vec<C64>,
    pub sigma_s: Vec<C64>,
    pub distance: f64,
}

/// `σ(T)` against `σ(S)` of the Schur split. `σ(T)` is computed on a separate
/// route (Schur form of `Tᵀ`; the diagonal for triangular `T`).
pub fn verify_sigma_equality(t: &OperatorMatrix) -> Result<SigmaEqualityReport> {
    let split = split_schur(t)?;
    let sigma_s: Vec<C64> = split.s_part.entries().diagonal().iter().copied().collect();
    let sigma_t = if linalg::is_triangular(t.entries()) {
        t.entries().diagonal().iter().copied().collect()
    } else {
        linalg::eigenvalues_via_transpose(t.entries())?
    };
    Ok(SigmaEqualityReport { distance: spectral_distance(&sigma_t, &sigma_s), sigma_t, sigma_s })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Circle {
    pub center: C64,
    pub radius: f64,
}

/// Circle around the eigenvalue centroid, radius 1.5× the spread (1 when all
/// eigenvalues coincide).
pub fn default_contour(eigenvalues: &[C64]) -> Circle {
    let n = eigenvalues.len().max(1) as f64;
    let center = eigenvalues.iter().sum::<C64>() / n;
    let spread = eigenvalues.iter().map(|z| (z - center).norm()).fold(0.0, f64::max);
    Circle { center, radius: if spread > 0.0 { 1.5 * spread } else { 1.0 } }
}

const RIESZ_START: usize = 256;
const RIESZ_MAX: usize = 1 << 16;
const RIESZ_TOL: f64 = 1e-8;

/// Scalar function usable from worker threads.
pub type AnalyticFn<'a> = &'a (dyn Fn(C64) -> C64 + Sync);

/// `(1/2πi) ∮ f(λ)(λI − T)^{-1} dλ` over the union of circles by the
/// trapezoidal rule, doubling nodes until successive results differ by at
/// most 1e−8 (relative to `max(1, ‖result‖)`).
pub fn riesz_calculus(t: &OperatorMatrix, f: AnalyticFn, contours: &[Circle]) -> Result<OperatorMatrix> {
    let m = t.entries();
    let n = t.n();
    if contours.is_empty() {
        return Err(Error::Contract("no contour given".into()));
    }
    let eig = linalg::eigenvalues(m)?;
    let scale = eig.iter().map(|z| z.norm()).fold(1.0, f64::max);
    for z in &eig {
        let inside = contours.iter().any(|c| (z - c.center).norm() < c.radius);
        let gap = contours.iter().map(|c| ((z - c.center).norm() - c.radius).abs()).fold(f64::INFINITY, f64::min);
        if !inside || gap < 1e-6 * scale {
            return Err(Error::Contract(format!("eigenvalue {z} is not strictly inside the contour")));
        }
    }

    let mut total = CMatrix::zeros(n, n);
    for c in contours {
        let node_sum = |count: usize, stride: usize, offset: usize| -> Result<CMatrix> {
            let terms: Vec<CMatrix> = (0..count)
                .into_par_iter()
                .map(|k| {
                    let theta = 2.0 * std::f64::consts::PI * (k * stride + offset) as f64 / (count * stride) as f64;
                    let dz = C64::from_polar(c.radius, theta);
                    let lambda = c.center + dz;
                    let shifted = CMatrix::identity(n, n) * lambda - m;
                    let r = linalg::inverse(&shifted)
                        .map_err(|_| Error::Contract(format!("resolvent singular on the contour at {lambda}")))?;
                    let fz = f(lambda);
                    if !(fz.re.is_finite() && fz.im.is_finite()) {
                        return Err(Error::Contract(format!("f is not analytic at contour node {lambda}")));
                    }
                    Ok(r * (fz * dz))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(terms.into_iter().fold(CMatrix::zeros(n, n), |acc, x| acc + x))
        };
        let mut count = RIESZ_START;
        let mut sum = node_sum(count, 1, 0)?;
        let mut current = &sum / C64::new(count as f64, 0.0);
        loop {
            // the doubled rule reuses the existing nodes: add the midpoints
            let mid = node_sum(count, 2, 1)?;
            sum += mid;
            count *= 2;
            let next = &sum / C64::new(count as f64, 0.0);
            let change = (&next - &current).norm();
            current = next;
            if change <= RIESZ_TOL * current.norm().max(1.0) {
                break;
            }
            if count >= RIESZ_MAX {
                return Err(Error::Contract(format!(
                    "contour quadrature did not settle: change {change:e} with {count} nodes"
                )));
            }
        }
        total += current;
    }
    OperatorMatrix::new(t.grid(), total, Provenance::Derived(format!("f({})", t.provenance())))
}

#[derive(Debug, Clone)]
pub struct MappingReport {
    /// Distance between `σ(f(T))` and `f(σ(T))`.
    pub distance: f64,
    /// `ρ(V_f)` with `V_f = f(T) − f(S)` in the split basis.
    pub v_f_radius: f64,
    pub v_f_quasinilpotent: bool,
    pub tol_q: f64,
    pub f_t: OperatorMatrix,
}

/// Checks `σ(f(T)) = f(σ(T))` and that `f(T) − f(S)` is quasinilpotent. `T` is
/// split in the given basis when lower-triangular, otherwise by Schur; `f(S)`
/// is the exact diagonal `f(s_kk)`.
pub fn verify_spectral_mapping(
    t: &OperatorMatrix,
    f: AnalyticFn,
    contours: &[Circle],
    tol_q: f64,
) -> Result<MappingReport> {
    let split = if t.is_lower_triangular() { split_given_basis(t)? } else { split_schur(t)? };
    let t_split = OperatorMatrix::new(t.grid(), split.reconstruct(), Provenance::Derived("T in split basis".into()))?;
    let f_t = riesz_calculus(&t_split, f, contours)?;

    let sigma_ft = linalg::eigenvalues(f_t.entries())?;
    let f_sigma: Vec<C64> = linalg::eigenvalues(t_split.entries())?.into_iter().map(f).collect();
    let distance = spectral_distance(&sigma_ft, &f_sigma);

    let f_s = CMatrix::from_diagonal(&split.s_part.entries().diagonal().map(f));
    let v_f = f_t.entries() - f_s;
    let v_f_radius = linalg::eigenvalues(&v_f)?.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let f_t = OperatorMatrix::new(
        t.grid(),
        &split.unitary * f_t.entries() * split.unitary.adjoint(),
        Provenance::Derived(format!("f({})", t.provenance())),
    )?;
    Ok(MappingReport { distance, v_f_radius, v_f_quasinilpotent: v_f_radius <= tol_q, tol_q, f_t })
}

/// `‖N^k‖^{1/k}` for `k = 1..=kmax`.
pub fn power_root_profile(m: &CMatrix, kmax: usize) -> Result<Vec<f64>> {
    let n = m.nrows();
    let mut p = CMatrix::identity(n, n);
    let mut out = Vec::with_capacity(kmax);
    for k in 1..=kmax {
        p = &p * m;
        out.push(linalg::operator_norm(&p)?.powf(1.0 / k as f64));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use crate::operators::{build_fractional, build_multiplication, build_volterra};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn random_op(n: usize, seed: u64) -> OperatorMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = Grid::new(1.0, n).unwrap();
        let m = CMatrix::from_fn(n, n, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        OperatorMatrix::new(&g, m, Provenance::Derived("random".into())).unwrap()
    }

    fn op(n: usize, vals: &[f64]) -> OperatorMatrix {
        let g = Grid::new(1.0, n).unwrap();
        let m = CMatrix::from_row_slice(n, n, &vals.iter().map(|&x| c(x)).collect::<Vec<_>>());
        OperatorMatrix::new(&g, m, Provenance::Derived("fixed".into())).unwrap()
    }

    /// Roots of `z³ + a z² + b z + c` by Cardano, polished with Newton.
    fn cubic_roots(a: C64, b: C64, cc: C64) -> [C64; 3] {
        let p = b - a * a / 3.0;
        let q = a * a * a * (2.0 / 27.0) - a * b / 3.0 + cc;
        let disc = (q * q / 4.0 + p * p * p / 27.0).sqrt();
        let mut u = (-q / 2.0 + disc).cbrt();
        if u.norm() < 1e-300 {
            u = (-q / 2.0 - disc).cbrt();
        }
        let w = C64::new(-0.5, 3f64.sqrt() / 2.0);
        let mut roots = [c(0.0); 3];
        for (k, r) in roots.iter_mut().enumerate() {
            let uk = u * w.powi(k as i32);
            let y = if uk.norm() == 0.0 { c(0.0) } else { uk - p / (uk * 3.0) };
            let mut z = y - a / 3.0;
            for _ in 0..5 {
                let fz = ((z + a) * z + b) * z + cc;
                let dz = (z * 3.0 + a * 2.0) * z + b;
                if dz.norm() > 0.0 {
                    z -= fz / dz;
                }
            }
            *r = z;
        }
        roots
    }

    #[test]
    fn spectrum_examples() {
        let g = Grid::new(1.0, 16).unwrap();
        let strict = build_volterra(&g, |x, t| if t > x - 0.3 * g.h() { c(0.0) } else { c(1.0) }).unwrap();
        let r = spectrum(&strict).unwrap();
        assert!(r.eigenvalues.iter().all(|z| *z == c(0.0)));
        assert!(r.quasinilpotent);

        let d = op(3, &[1.0, 0.0, 0.0, 0.0, 2.0, 0.0, 0.0, 0.0, 3.0]);
        let r = spectrum(&d).unwrap();
        assert_eq!(r.eigenvalues, vec![c(1.0), c(2.0), c(3.0)]);
        for (s, want) in r.s_numbers.iter().zip([3.0, 2.0, 1.0]) {
            assert!((s - want).abs() < 1e-14);
        }
        assert!(r.to_record().contains("spectral_radius=3e0"));
    }

    #[test]
    fn spectrum_matches_cubic_oracle() {
        for seed in 0..20 {
            let t = random_op(3, seed);
            let m = t.entries();
            let tr = m.trace();
            let minors = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)] + m[(0, 0)] * m[(2, 2)] - m[(0, 2)] * m[(2, 0)]
                + m[(1, 1)] * m[(2, 2)]
                - m[(1, 2)] * m[(2, 1)];
            let det = m.determinant();
            let roots = cubic_roots(-tr, minors, -det);
            let eig = spectrum(&t).unwrap().eigenvalues;
            assert!(spectral_distance(&eig, &roots) < 1e-8, "seed {seed}: {eig:?} vs {roots:?}");
        }
    }

    #[test]
    fn macaev_examples() {
        let p = op(3, &[1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        assert!((macaev_norm(&p).unwrap() - 1.0).abs() < 1e-14);
        let d = op(3, &[3.0, 0.0, 0.0, 0.0, 2.0, 0.0, 0.0, 0.0, 1.0]);
        assert!((macaev_norm(&d).unwrap() - (3.0 + 2.0 / 3.0 + 0.2)).abs() < 1e-13);

        let cs: f64 = (1..=8).map(|k| ((2 * k - 1) as f64).powi(-2)).sum::<f64>().sqrt();
        for seed in 0..20 {
            let r = spectrum(&random_op(8, 100 + seed)).unwrap();
            let s1 = r.schatten_norm(1.0).unwrap();
            let s2 = r.schatten_norm(2.0).unwrap();
            assert!(r.macaev_omega <= s1 + 1e-12);
            assert!(r.macaev_omega <= s2 * cs + 1e-12);
        }
    }

    #[test]
    fn sigma_equality_examples() {
        let g = Grid::new(1.0, 64).unwrap();
        let t = build_multiplication(&g, |x| x).unwrap().add(&build_volterra(&g, |x, t| c((x - t).cos())).unwrap()).unwrap();
        assert!(verify_sigma_equality(&t).unwrap().distance <= 1e-10);
        let id = crate::OperatorMatrix::identity(&g);
        assert_eq!(verify_sigma_equality(&id).unwrap().distance, 0.0);
        for seed in 0..10 {
            let n = 4 + 6 * seed as usize;
            assert!(verify_sigma_equality(&random_op(n, seed)).unwrap().distance <= 1e-8);
        }
    }

    #[test]
    fn riesz_examples() {
        let t = random_op(4, 3);
        let eig = linalg::eigenvalues(t.entries()).unwrap();
        let contour = [default_contour(&eig)];
        let id = riesz_calculus(&t, &|z| z, &contour).unwrap();
        assert!((id.entries() - t.entries()).norm() < 1e-8);
        let sq = riesz_calculus(&t, &|z| z * z, &contour).unwrap();
        assert!((sq.entries() - t.entries() * t.entries()).norm() < 1e-8);

        let shifted = OperatorMatrix::new(t.grid(), t.entries() + CMatrix::identity(4, 4) * c(5.0), Provenance::Derived("s".into())).unwrap();
        let eig = linalg::eigenvalues(shifted.entries()).unwrap();
        let inv = riesz_calculus(&shifted, &|z| z.inv(), &[default_contour(&eig)]).unwrap();
        let direct = linalg::inverse(shifted.entries()).unwrap();
        assert!((inv.entries() - direct).norm() < 1e-6);

        let tiny = [Circle { center: c(0.0), radius: 1e-3 }];
        assert!(matches!(riesz_calculus(&t, &|z| z, &tiny), Err(Error::Contract(_))));
    }

    #[test]
    fn riesz_is_linear() {
        let t = random_op(5, 8);
        let contour = [default_contour(&linalg::eigenvalues(t.entries()).unwrap())];
        let a = C64::new(0.3, -1.2);
        let b = c(2.5);
        let f = |z: C64| z.exp();
        let g = |z: C64| z * z * z;
        let lhs = riesz_calculus(&t, &|z| a * f(z) + b * g(z), &contour).unwrap();
        let rf = riesz_calculus(&t, &f, &contour).unwrap();
        let rg = riesz_calculus(&t, &g, &contour).unwrap();
        assert!((lhs.entries() - (rf.entries() * a + rg.entries() * b)).norm() < 1e-7);
    }

    #[test]
    fn spectral_mapping_examples() {
        let g = Grid::new(1.0, 32).unwrap();
        let t = build_multiplication(&g, |x| x).unwrap().add(&build_fractional(&g, 0.5).unwrap()).unwrap();
        let contour = [default_contour(&linalg::eigenvalues(t.entries()).unwrap())];
        let id = verify_spectral_mapping(&t, &|z| z, &contour, 1e-6).unwrap();
        assert!(id.distance < 1e-12);
        let split = split_given_basis(&t).unwrap();
        assert!((id.f_t.entries() - t.entries()).norm() < 1e-8);
        assert!(split.n_part.is_strictly_lower_triangular());

        let poly = verify_spectral_mapping(&t, &|z| z * z + 1.0, &contour, 1e-6).unwrap();
        assert!(poly.distance <= 1e-6 && poly.v_f_radius <= 1e-6, "{} {}", poly.distance, poly.v_f_radius);
        let rat = verify_spectral_mapping(&t, &|z| z / (z - 5.0), &contour, 1e-6).unwrap();
        assert!(rat.distance <= 1e-6 && rat.v_f_quasinilpotent);
    }

    #[test]
    fn spectral_mapping_non_triangular() {
        let t = random_op(6, 21);
        let contour = [default_contour(&linalg::eigenvalues(t.entries()).unwrap())];
        let r = verify_spectral_mapping(&t, &|z| z * z + 1.0, &contour, 1e-6).unwrap();
        assert!(r.distance <= 1e-6 && r.v_f_quasinilpotent);
        assert!((r.f_t.entries() - (t.entries() * t.entries() + CMatrix::identity(6, 6))).norm() < 1e-7);
    }

    #[test]
    fn nilpotent_power_roots() {
        let g = Grid::new(1.0, 12).unwrap();
        let n = split_given_basis(&build_fractional(&g, 0.5).unwrap()).unwrap().n_part;
        let prof = power_root_profile(n.entries(), 12).unwrap();
        assert!(prof.windows(2).all(|w| w[1] <= w[0] + 1e-12), "{prof:?}");
        assert_eq!(prof[11], 0.0);
    }

    #[test]
    fn quasinilpotency_is_basis_independent() {
        let g = Grid::new(1.0, 8).unwrap();
        let n = split_given_basis(&build_fractional(&g, 1.0).unwrap()).unwrap().n_part;
        let q = linalg::schur(random_op(8, 5).entries()).unwrap().0;
        let conj = OperatorMatrix::new(&g, &q * n.entries() * q.adjoint(), Provenance::Derived("conj".into())).unwrap();
        assert!(spectrum(&n).unwrap().quasinilpotent);
        assert!(spectrum(&conj).unwrap().quasinilpotent);
        let split = split_schur(&conj).unwrap();
        assert!(spectrum(&split.s_part).unwrap().quasinilpotent);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn radius_below_norm(seed in 0u64..10_000, n in 2usize..12) {
            let r = spectrum(&random_op(n, seed)).unwrap();
            prop_assert!(r.spectral_radius <= r.s_numbers[0] * (1.0 + 1e-12));
            prop_assert!(r.s_numbers.windows(2).all(|w| w[0] >= w[1]));
            let norms: Vec<f64> = r.schatten.iter().map(|x| x.1).collect();
            prop_assert!(norms.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12)));
        }

        #[test]
        fn hausdorff_is_symmetric(xs in proptest::collection::vec(-5.0..5.0f64, 1..8), ys in proptest::collection::vec(-5.0..5.0f64, 1..8)) {
            let a: Vec<C64> = xs.iter().map(|&x| C64::new(x, x.sin())).collect();
            let b: Vec<C64> = ys.iter().map(|&y| C64::new(y, -y)).collect();
            prop_assert_eq!(hausdorff(&a, &b), hausdorff(&b, &a));
            prop_assert_eq!(hausdorff(&a, &a), 0.0);
        }
    }

    #[test]
    fn matching_sees_multiplicity() {
        let a = [c(1.0), c(1.0), c(2.0)];
        let b = [c(1.0), c(2.0), c(2.0)];
        assert_eq!(hausdorff(&a, &b), 0.0);
        assert_eq!(spectral_distance(&a, &b), 1.0);
    }
}

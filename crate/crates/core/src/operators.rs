//! Operator constructors on a [`Grid`], the `S + N` splits and the maximal
//! chain `E_t` (projection onto functions supported in `(ω − t, ω)`).
//!
//! Every Volterra-type constructor is lower-triangular with an exact zero
//! pattern; translation-invariant kernels produce Toeplitz matrices from a
//! single weight vector.

use std::fmt;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::sync::Arc;

use rayon::prelude::*;

use crate::grid::{Grid, GridFunction};
use crate::linalg;
use crate::quad;
use crate::specfun::{self, EbetaSpec};
use crate::{CMatrix, CVector, Error, Result, C64};

pub type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
pub type ComplexFn = Arc<dyn Fn(f64) -> C64 + Send + Sync>;
pub type KernelFn = Arc<dyn Fn(f64, f64) -> C64 + Send + Sync>;

/// Closed-form descriptor of an operator family.
#[derive(Clone)]
pub enum KernelSpec {
    /// `(Sf)(x) = φ(x) f(x)` with real bounded `φ`.
    Multiplication { phi: RealFn },
    /// `∫₀ˣ v(x, t) f(t) dt`.
    Volterra { v: KernelFn },
    /// Riemann–Liouville `J^β`.
    Fractional { beta: f64 },
    /// Convolution with `E_β / Γ(β)`.
    Ebeta(EbetaSpec),
    /// `d/dx ∫₀ˣ s(x − t) f(t) dt`; the primitive `∫₀^a s` is used when given.
    Difference { s: ComplexFn, primitive: Option<ComplexFn> },
    /// `J^{iα}`, i.e. the difference kernel `s(t) = t^{iα}/Γ(1 + iα)`.
    FractionalImaginary { alpha: f64 },
}

impl fmt::Debug for KernelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KernelSpec::Multiplication { .. } => write!(f, "Multiplication"),
            KernelSpec::Volterra { .. } => write!(f, "Volterra"),
            KernelSpec::Fractional { beta } => write!(f, "Fractional(beta={beta})"),
            KernelSpec::Ebeta(s) => write!(f, "Ebeta(beta={}, C={})", s.beta, s.c),
            KernelSpec::Difference { primitive, .. } => {
                write!(f, "Difference(primitive={})", primitive.is_some())
            }
            KernelSpec::FractionalImaginary { alpha } => write!(f, "FractionalImaginary(alpha={alpha})"),
        }
    }
}

impl KernelSpec {
    pub fn build(&self, grid: &Grid) -> Result<OperatorMatrix> {
        match self {
            KernelSpec::Multiplication { phi } => build_multiplication(grid, |x| phi(x)),
            KernelSpec::Volterra { v } => build_volterra(grid, |x, t| v(x, t)),
            KernelSpec::Fractional { beta } => build_fractional(grid, *beta),
            KernelSpec::Ebeta(spec) => build_ebeta_operator(grid, spec),
            KernelSpec::Difference { s, primitive } => {
                build_difference_operator(grid, s.clone(), primitive.clone())
            }
            KernelSpec::FractionalImaginary { alpha } => build_fractional_imaginary(grid, *alpha),
        }
    }
}

/// Where a matrix came from.
#[derive(Debug, Clone, PartialEq)]
pub enum Provenance {
    Multiplication,
    Volterra,
    Fractional { beta: f64 },
    Ebeta { beta: f64, c: f64 },
    Difference,
    FractionalImaginary { alpha: f64 },
    ChainProjection { t: f64 },
    /// Arithmetic on other matrices, split parts, loaded files.
    Derived(String),
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::Multiplication => write!(f, "multiplication"),
            Provenance::Volterra => write!(f, "volterra"),
            Provenance::Fractional { beta } => write!(f, "fractional(beta={beta})"),
            Provenance::Ebeta { beta, c } => write!(f, "ebeta(beta={beta}, C={c})"),
            Provenance::Difference => write!(f, "difference"),
            Provenance::FractionalImaginary { alpha } => write!(f, "fractional_imaginary(alpha={alpha})"),
            Provenance::ChainProjection { t } => write!(f, "chain_projection(t={t})"),
            Provenance::Derived(s) => write!(f, "{s}"),
        }
    }
}

/// Dense `n × n` matrix tied to the grid it discretizes.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    grid: Grid,
    entries: CMatrix,
    provenance: Provenance,
}

impl OperatorMatrix {
    pub fn new(grid: &Grid, entries: CMatrix, provenance: Provenance) -> Result<Self> {
        if entries.nrows() != grid.n() || entries.ncols() != grid.n() {
            return Err(Error::InvalidArgument(format!(
                "matrix is {}x{}, grid has {} cells",
                entries.nrows(),
                entries.ncols(),
                grid.n()
            )));
        }
        Ok(Self { grid: grid.clone(), entries, provenance })
    }

    pub fn identity(grid: &Grid) -> Self {
        let n = grid.n();
        Self { grid: grid.clone(), entries: CMatrix::identity(n, n), provenance: Provenance::Derived("identity".into()) }
    }

    pub fn zeros(grid: &Grid) -> Self {
        let n = grid.n();
        Self { grid: grid.clone(), entries: CMatrix::zeros(n, n), provenance: Provenance::Derived("zero".into()) }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn into_entries(self) -> CMatrix {
        self.entries
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn n(&self) -> usize {
        self.grid.n()
    }

    pub fn is_lower_triangular(&self) -> bool {
        linalg::is_lower_triangular(&self.entries)
    }

    pub fn is_strictly_lower_triangular(&self) -> bool {
        self.is_lower_triangular() && self.entries.diagonal().iter().all(|d| *d == C64::new(0.0, 0.0))
    }

    pub fn is_diagonal(&self) -> bool {
        linalg::is_lower_triangular(&self.entries) && linalg::is_upper_triangular(&self.entries)
    }

    fn same_grid(&self, other: &OperatorMatrix) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::InvalidArgument("operators live on different grids".into()));
        }
        Ok(())
    }

    fn derived(&self, entries: CMatrix, tag: String) -> Self {
        Self { grid: self.grid.clone(), entries, provenance: Provenance::Derived(tag) }
    }

    pub fn add(&self, other: &OperatorMatrix) -> Result<Self> {
        self.same_grid(other)?;
        Ok(self.derived(&self.entries + &other.entries, format!("({}) + ({})", self.provenance, other.provenance)))
    }

    pub fn sub(&self, other: &OperatorMatrix) -> Result<Self> {
        self.same_grid(other)?;
        Ok(self.derived(&self.entries - &other.entries, format!("({}) - ({})", self.provenance, other.provenance)))
    }

    pub fn mul(&self, other: &OperatorMatrix) -> Result<Self> {
        self.same_grid(other)?;
        Ok(self.derived(&self.entries * &other.entries, format!("({}) * ({})", self.provenance, other.provenance)))
    }

    pub fn scale(&self, a: C64) -> Self {
        self.derived(&self.entries * a, format!("{a} * ({})", self.provenance))
    }

    pub fn pow(&self, m: u32) -> Self {
        let n = self.n();
        let mut acc = CMatrix::identity(n, n);
        for _ in 0..m {
            acc = &acc * &self.entries;
        }
        self.derived(acc, format!("({})^{m}", self.provenance))
    }

    /// Largest singular value.
    pub fn operator_norm(&self) -> Result<f64> {
        linalg::operator_norm(&self.entries)
    }

    pub fn apply(&self, f: &GridFunction) -> Result<GridFunction> {
        if f.grid() != &self.grid {
            return Err(Error::InvalidArgument("function lives on a different grid".into()));
        }
        let v = &self.entries * CVector::from_column_slice(f.values());
        GridFunction::new(&self.grid, v.iter().copied().collect())
    }

    /// Writes `rows cols omega` then row-major `re im` pairs, one row per line.
    pub fn save(&self, path: &Path) -> Result<()> {
        let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
        writeln!(out, "{} {} {:e}", self.n(), self.n(), self.grid.omega())?;
        for j in 0..self.n() {
            let row: Vec<String> =
                self.entries.row(j).iter().map(|z| format!("{:e} {:e}", z.re, z.im)).collect();
            writeln!(out, "{}", row.join(" "))?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let reader = BufReader::new(std::fs::File::open(path)?);
        let mut tokens: Vec<String> = Vec::new();
        for line in reader.lines() {
            tokens.extend(line?.split_whitespace().map(str::to_owned));
        }
        let parse = |s: &str| s.parse::<f64>().map_err(|e| Error::Parse(format!("{s:?}: {e}")));
        if tokens.len() < 3 {
            return Err(Error::Parse("missing header `rows cols omega`".into()));
        }
        let rows: usize = tokens[0].parse().map_err(|e| Error::Parse(format!("rows: {e}")))?;
        let cols: usize = tokens[1].parse().map_err(|e| Error::Parse(format!("cols: {e}")))?;
        let omega = parse(&tokens[2])?;
        if rows != cols {
            return Err(Error::Parse(format!("matrix must be square, got {rows}x{cols}")));
        }
        if tokens.len() != 3 + 2 * rows * cols {
            return Err(Error::Parse(format!("expected {} numbers, got {}", 2 * rows * cols, tokens.len() - 3)));
        }
        let grid = Grid::new(omega, rows)?;
        let vals = tokens[3..].chunks(2).map(|p| Ok(C64::new(parse(&p[0])?, parse(&p[1])?))).collect::<Result<Vec<_>>>()?;
        let entries = CMatrix::from_row_slice(rows, cols, &vals);
        Self::new(&grid, entries, Provenance::Derived(format!("loaded from {}", path.display())))
    }
}

fn lower_toeplitz(n: usize, weights: &[C64]) -> CMatrix {
    CMatrix::from_fn(n, n, |j, k| if k <= j { weights[j - k] } else { C64::new(0.0, 0.0) })
}

fn check_finite(values: &[C64], what: &str) -> Result<()> {
    match values.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
        Some(i) => Err(Error::Construction(format!("{what}: non-finite value at index {i}"))),
        None => Ok(()),
    }
}

pub fn build_multiplication(grid: &Grid, phi: impl Fn(f64) -> f64) -> Result<OperatorMatrix> {
    let d: Vec<C64> = grid.nodes().iter().map(|&x| C64::new(phi(x), 0.0)).collect();
    check_finite(&d, "multiplication symbol")?;
    let entries = CMatrix::from_diagonal(&CVector::from_vec(d));
    OperatorMatrix::new(grid, entries, Provenance::Multiplication)
}

/// Nyström matrix: `h·v(x_j, x_k)` below the diagonal; the diagonal uses the
/// midpoint of the half cell `[x_j − h/2, x_j]`, weight `h/2`.
pub fn build_volterra(grid: &Grid, v: impl Fn(f64, f64) -> C64) -> Result<OperatorMatrix> {
    let (n, h, x) = (grid.n(), grid.h(), grid.nodes());
    let mut entries = CMatrix::zeros(n, n);
    for j in 0..n {
        for k in 0..j {
            entries[(j, k)] = v(x[j], x[k]) * h;
        }
        entries[(j, j)] = v(x[j], x[j] - 0.25 * h) * (0.5 * h);
    }
    check_finite(entries.as_slice(), "volterra kernel")?;
    OperatorMatrix::new(grid, entries, Provenance::Volterra)
}

/// Product integration of `J^β`: exact cell integrals of `(x_j − t)^{β−1}/Γ(β)`.
pub fn build_fractional(grid: &Grid, beta: f64) -> Result<OperatorMatrix> {
    if !(beta.is_finite() && beta > 0.0) {
        return Err(Error::InvalidArgument(format!("beta must be positive, got {beta}")));
    }
    let h = grid.h();
    let g = specfun::gamma(beta + 1.0)?;
    let w: Vec<C64> = (0..grid.n())
        .map(|d| {
            let val = if d == 0 {
                (0.5 * h).powf(beta)
            } else {
                ((d as f64 + 0.5) * h).powf(beta) - ((d as f64 - 0.5) * h).powf(beta)
            };
            C64::new(val / g, 0.0)
        })
        .collect();
    OperatorMatrix::new(grid, lower_toeplitz(grid.n(), &w), Provenance::Fractional { beta })
}

/// `V_β f = (1/Γ(β)) ∫₀ˣ E_β(x − t) f(t) dt`, cell integrals taken from the
/// exact primitive of `E_β`.
pub fn build_ebeta_operator(grid: &Grid, spec: &EbetaSpec) -> Result<OperatorMatrix> {
    let (n, h) = (grid.n(), grid.h());
    let g = specfun::gamma(spec.beta)?;
    // primitive at the half-integer offsets (d + ½)h, d = 0..n−1
    let prim: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|d| specfun::e_beta_primitive((d as f64 + 0.5) * h, spec))
        .collect::<Result<Vec<_>>>()
        .map_err(|e| Error::Construction(format!("E_beta cell integrals: {e}")))?;
    let w: Vec<C64> = (0..n)
        .map(|d| C64::new(if d == 0 { prim[0] } else { prim[d] - prim[d - 1] } / g, 0.0))
        .collect();
    check_finite(&w, "E_beta weights")?;
    OperatorMatrix::new(grid, lower_toeplitz(n, &w), Provenance::Ebeta { beta: spec.beta, c: spec.c })
}

/// `d/dx ∫₀ˣ s(x − t) f(t) dt`: the convolution `F` is integrated exactly per
/// cell and sampled at the right cell edges `(j+1)h`, then differenced
/// backwards. With `I` the primitive of `s` and `d = j − k`, the entry is
/// `[I((d+1)h) − 2I(dh) + I((d−1)h)]/h`, and `I(h)/h` on the diagonal.
pub fn build_difference_operator(
    grid: &Grid,
    s: ComplexFn,
    primitive: Option<ComplexFn>,
) -> Result<OperatorMatrix> {
    let (n, h) = (grid.n(), grid.h());
    let big_i: Vec<C64> = match primitive {
        Some(p) => (0..=n).map(|k| if k == 0 { C64::new(0.0, 0.0) } else { p(k as f64 * h) }).collect(),
        None => {
            let cells: Vec<C64> = (0..n)
                .into_par_iter()
                .map(|k| {
                    let (a, b) = (k as f64 * h, (k + 1) as f64 * h);
                    let re = quad::integrate_rel(&|t| s(t).re, a, b, 1e-12)?;
                    let im = quad::integrate_rel(&|t| s(t).im, a, b, 1e-12)?;
                    Ok(C64::new(re, im))
                })
                .collect::<Result<Vec<_>>>()
                .map_err(|e| Error::Construction(format!("cell integral of s: {e}")))?;
            std::iter::once(C64::new(0.0, 0.0))
                .chain(cells.iter().scan(C64::new(0.0, 0.0), |acc, c| {
                    *acc += c;
                    Some(*acc)
                }))
                .collect()
        }
    };
    check_finite(&big_i, "primitive of s")?;
    let w: Vec<C64> = (0..n)
        .map(|d| {
            if d == 0 {
                big_i[1] / h
            } else {
                (big_i[d + 1] - big_i[d] * 2.0 + big_i[d - 1]) / h
            }
        })
        .collect();
    check_finite(&w, "difference weights")?;
    OperatorMatrix::new(grid, lower_toeplitz(n, &w), Provenance::Difference)
}

/// Kernel of `J^{iα}`: `t^{iα}/Γ(1 + iα)`.
pub fn jialpha_kernel(alpha: f64) -> Result<ComplexFn> {
    let g = specfun::gamma_complex(C64::new(1.0, alpha))?;
    Ok(Arc::new(move |t: f64| C64::new(0.0, alpha * t.ln()).exp() / g))
}

/// Primitive of [`jialpha_kernel`]: `a^{1+iα}/Γ(2 + iα)`.
pub fn jialpha_primitive(alpha: f64) -> Result<ComplexFn> {
    let g = specfun::gamma_complex(C64::new(2.0, alpha))?;
    Ok(Arc::new(move |a: f64| C64::new(a.ln(), alpha * a.ln()).exp() / g))
}

pub fn build_fractional_imaginary(grid: &Grid, alpha: f64) -> Result<OperatorMatrix> {
    if !alpha.is_finite() {
        return Err(Error::InvalidArgument(format!("alpha must be finite, got {alpha}")));
    }
    let t = build_difference_operator(grid, jialpha_kernel(alpha)?, Some(jialpha_primitive(alpha)?))?;
    Ok(OperatorMatrix { provenance: Provenance::FractionalImaginary { alpha }, ..t })
}

/// `T = S + N` in some orthonormal basis `unitary`: `Q* T Q = S + N`.
#[derive(Debug, Clone)]
pub struct SplitPair {
    pub s_part: OperatorMatrix,
    pub n_part: OperatorMatrix,
    pub unitary: CMatrix,
}

impl SplitPair {
    /// Pairs a multiplication operator with a Volterra part as constructed,
    /// in the given basis. The Volterra part keeps its own diagonal (a
    /// product-integration weight, vanishing as `h → 0`), so it is
    /// lower-triangular but not necessarily strictly so.
    pub fn from_construction(s_part: OperatorMatrix, v_part: OperatorMatrix) -> Result<Self> {
        s_part.same_grid(&v_part)?;
        if !s_part.is_diagonal() {
            return Err(Error::Precondition("S must be diagonal".into()));
        }
        if !v_part.is_lower_triangular() {
            return Err(Error::Precondition("V must be lower-triangular".into()));
        }
        let n = s_part.n();
        Ok(Self { s_part, n_part: v_part, unitary: CMatrix::identity(n, n) })
    }

    /// `S + N` in the split basis.
    pub fn reconstruct(&self) -> CMatrix {
        self.s_part.entries() + self.n_part.entries()
    }

    /// `Q (S + N) Q*`, i.e. `T` in the original basis.
    pub fn reconstruct_original(&self) -> CMatrix {
        &self.unitary * self.reconstruct() * self.unitary.adjoint()
    }
}

pub fn split_given_basis(t: &OperatorMatrix) -> Result<SplitPair> {
    if !t.is_lower_triangular() {
        return Err(Error::Precondition("matrix is not lower-triangular in the given basis; use split_schur".into()));
    }
    let n = t.n();
    let diag = CMatrix::from_diagonal(&t.entries.diagonal());
    let strict = &t.entries - &diag;
    Ok(SplitPair {
        s_part: t.derived(diag, format!("diag({})", t.provenance)),
        n_part: t.derived(strict, format!("strict_lower({})", t.provenance)),
        unitary: CMatrix::identity(n, n),
    })
}

/// Unitary triangularisation with the diagonal sorted by ascending real part,
/// then imaginary part.
pub fn split_schur(t: &OperatorMatrix) -> Result<SplitPair> {
    let (q, r) = linalg::schur(&t.entries)?;
    let diag = CMatrix::from_diagonal(&r.diagonal());
    let strict = &r - &diag;
    Ok(SplitPair {
        s_part: t.derived(diag, format!("schur_diag({})", t.provenance)),
        n_part: t.derived(strict, format!("schur_strict({})", t.provenance)),
        unitary: q,
    })
}

/// `E_t`: projection onto the nodes in `(ω − t, ω)`.
pub fn chain_projection(grid: &Grid, t_param: f64) -> Result<OperatorMatrix> {
    let omega = grid.omega();
    if !(0.0..=omega).contains(&t_param) {
        return Err(Error::InvalidArgument(format!("t must lie in [0, {omega}], got {t_param}")));
    }
    let d: Vec<C64> = grid
        .nodes()
        .iter()
        .map(|&x| if x > omega - t_param { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) })
        .collect();
    OperatorMatrix::new(grid, CMatrix::from_diagonal(&CVector::from_vec(d)), Provenance::ChainProjection { t: t_param })
}

/// `‖E T E − T E‖`; `e` must be an orthogonal projection.
pub fn chain_invariance_residual(t: &OperatorMatrix, e: &OperatorMatrix) -> Result<f64> {
    t.same_grid(e)?;
    let em = e.entries();
    let scale = em.norm().max(1.0);
    if (em * em - em).norm() > 1e-12 * scale || (em - em.adjoint()).norm() > 1e-12 * scale {
        return Err(Error::Precondition("e is not an orthogonal projection".into()));
    }
    let te = t.entries() * em;
    linalg::operator_norm(&(em * &te - &te))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn multiplication_examples() {
        let g = Grid::new(1.0, 4).unwrap();
        let zero = build_multiplication(&g, |_| 0.0).unwrap();
        assert_eq!(zero.entries(), &CMatrix::zeros(4, 4));
        let s = build_multiplication(&g, |x| x).unwrap();
        assert!(s.is_diagonal());
        let d: Vec<f64> = s.entries().diagonal().iter().map(|z| z.re).collect();
        assert_eq!(d, vec![0.125, 0.375, 0.625, 0.875]);
        let eig = linalg::eigenvalues(s.entries()).unwrap();
        assert_eq!(eig.iter().map(|z| z.re).collect::<Vec<_>>(), d);
        assert!(build_multiplication(&g, |x| 1.0 / (x - 0.125)).is_err());
    }

    #[test]
    fn volterra_examples() {
        let g = Grid::new(1.0, 512).unwrap();
        let t = build_volterra(&g, |_, _| c(1.0)).unwrap();
        assert!(t.is_lower_triangular());
        let norm = t.operator_norm().unwrap();
        assert!((norm - 2.0 / PI).abs() < 2e-3, "{norm}");

        let g = Grid::new(1.0, 8).unwrap();
        assert_eq!(build_volterra(&g, |_, _| c(0.0)).unwrap().entries(), &CMatrix::zeros(8, 8));
        let strict = build_volterra(&g, |x, t| if x == t { c(0.0) } else { c(x - t) }).unwrap();
        let strict = strict.sub(&split_given_basis(&strict).unwrap().s_part).unwrap();
        assert_eq!(strict.pow(8).entries(), &CMatrix::zeros(8, 8));
        assert!(matches!(build_volterra(&g, |x, t| c(1.0 / (x - t - 0.25 * g.h()))), Err(Error::Construction(_))));
    }

    #[test]
    fn fractional_examples() {
        let g = Grid::new(1.0, 6).unwrap();
        let j1 = build_fractional(&g, 1.0).unwrap();
        for j in 0..6 {
            for k in 0..6 {
                let want = if k < j { g.h() } else if k == j { 0.5 * g.h() } else { 0.0 };
                assert!((j1.entries()[(j, k)] - c(want)).norm() < 1e-15);
            }
        }
        assert!(matches!(build_fractional(&g, 0.0), Err(Error::InvalidArgument(_))));

        let g = Grid::new(1.0, 256).unwrap();
        let norm = build_fractional(&g, 0.5).unwrap().operator_norm().unwrap();
        assert!(norm <= 1.0 / specfun::gamma(1.5).unwrap(), "{norm}");
    }

    #[test]
    fn fractional_half_squared_is_integration() {
        let mut errs = Vec::new();
        for n in [128, 256, 512] {
            let g = Grid::new(1.0, n).unwrap();
            let jh = build_fractional(&g, 0.5).unwrap();
            let one = g.constant(c(1.0));
            let lhs = jh.apply(&jh.apply(&one).unwrap()).unwrap();
            let rhs = build_fractional(&g, 1.0).unwrap().apply(&one).unwrap();
            errs.push(lhs.sub(&rhs).unwrap().l2_norm());
        }
        assert!(errs[2] <= 1e-2, "{errs:?}");
        assert!(errs.windows(2).all(|w| w[1] < w[0]), "{errs:?}");
    }

    #[test]
    fn ebeta_examples() {
        let g = Grid::new(1.0, 256).unwrap();
        let spec = EbetaSpec::new(1.0, 0.0).unwrap();
        let v1 = build_ebeta_operator(&g, &spec).unwrap();
        assert!(v1.is_lower_triangular());
        let m = specfun::m_moment(&spec, 1.0).unwrap();
        assert!(v1.operator_norm().unwrap() <= m);

        let mut errs = Vec::new();
        for n in [64, 128, 256] {
            let g = Grid::new(1.0, n).unwrap();
            let v1 = build_ebeta_operator(&g, &spec).unwrap();
            let v2 = build_ebeta_operator(&g, &spec.with_beta(2.0).unwrap()).unwrap();
            errs.push(v1.mul(&v1).unwrap().sub(&v2).unwrap().operator_norm().unwrap());
        }
        assert!(errs[2] <= 5e-2, "{errs:?}");
        assert!(errs.windows(2).all(|w| w[1] < w[0]), "{errs:?}");
    }

    #[test]
    fn difference_trivial_kernels() {
        let g = Grid::new(1.0, 64).unwrap();
        let id = build_difference_operator(&g, Arc::new(|_| c(1.0)), None).unwrap();
        assert!((id.entries() - CMatrix::identity(64, 64)).norm() < 1e-10);
        let lin = build_difference_operator(&g, Arc::new(c), None).unwrap();
        let j1 = build_fractional(&g, 1.0).unwrap();
        assert!((lin.entries() - j1.entries()).norm() < 1e-10);
        let lin_exact = build_difference_operator(&g, Arc::new(c), Some(Arc::new(|a| c(0.5 * a * a)))).unwrap();
        assert!((lin_exact.entries() - j1.entries()).norm() < 1e-14);
        assert!(matches!(
            build_difference_operator(&g, Arc::new(|t| c(1.0 / t)), None),
            Err(Error::Construction(_))
        ));
    }

    #[test]
    fn difference_quadrature_matches_supplied_primitive() {
        let g = Grid::new(1.0, 32).unwrap();
        let alpha = 1.0;
        let exact = build_fractional_imaginary(&g, alpha).unwrap();
        let quadr = build_difference_operator(&g, jialpha_kernel(alpha).unwrap(), None).unwrap();
        assert!((exact.entries() - quadr.entries()).norm() < 1e-9 * exact.entries().norm());
    }

    /// A lower-triangular Toeplitz discretization has one eigenvalue, its
    /// diagonal `h^{iα}/Γ(2+iα)`, of modulus `1/|Γ(2+iα)|` at every n. The
    /// operator norm is what approaches `e^{|α|π/2}` from below.
    #[test]
    fn jialpha_discretization() {
        let target = FRAC_PI_2.exp();
        let radius = 1.0 / specfun::gamma_complex(C64::new(2.0, 1.0)).unwrap().norm();
        let mut norms = Vec::new();
        for n in [128, 256, 512] {
            let g = Grid::new(1.0, n).unwrap();
            let t = build_fractional_imaginary(&g, 1.0).unwrap();
            assert!(t.is_lower_triangular());
            let eig = linalg::eigenvalues(t.entries()).unwrap();
            assert!(eig.iter().all(|z| (z.norm() - radius).abs() < 1e-12));
            norms.push(t.operator_norm().unwrap());
        }
        assert!(norms.windows(2).all(|w| w[0] < w[1] && w[1] < target), "{norms:?}");
        assert!(norms[2] >= target - 0.5 && norms[2] <= target + 0.15);

        let g = Grid::new(1.0, 16).unwrap();
        let j0 = build_fractional_imaginary(&g, 0.0).unwrap();
        assert!((j0.entries() - CMatrix::identity(16, 16)).norm() < 1e-14);
    }

    #[test]
    fn given_basis_split() {
        let g = Grid::new(1.0, 2).unwrap();
        let t = OperatorMatrix::new(&g, CMatrix::from_row_slice(2, 2, &[c(1.0), c(0.0), c(1.0), c(2.0)]), Provenance::Derived("t".into())).unwrap();
        let sp = split_given_basis(&t).unwrap();
        assert_eq!(sp.s_part.entries(), &CMatrix::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c(2.0)]));
        assert_eq!(sp.n_part.entries(), &CMatrix::from_row_slice(2, 2, &[c(0.0), c(0.0), c(1.0), c(0.0)]));
        assert_eq!(sp.reconstruct(), *t.entries());
        assert_eq!(sp.n_part.pow(2).entries(), &CMatrix::zeros(2, 2));
        let mut st = linalg::eigenvalues(t.entries()).unwrap();
        st.sort_by(linalg::eig_order);
        assert_eq!(st, vec![c(1.0), c(2.0)]);

        let u = OperatorMatrix::new(&g, CMatrix::from_row_slice(2, 2, &[c(1.0), c(1.0), c(0.0), c(2.0)]), Provenance::Derived("u".into())).unwrap();
        assert!(matches!(split_given_basis(&u), Err(Error::Precondition(_))));
    }

    /// Newton's identities: the power sums `tr(T^k)`, k = 1..n, determine the
    /// eigenvalue multiset.
    fn power_sums_match(t: &CMatrix, eig: &[C64], tol: f64) -> bool {
        let n = t.nrows();
        let mut p = CMatrix::identity(n, n);
        (1..=n as i32).all(|k| {
            p = &p * t;
            let lhs = p.trace();
            let rhs: C64 = eig.iter().map(|z| z.powi(k)).sum();
            (lhs - rhs).norm() <= tol * (1.0 + lhs.norm())
        })
    }

    #[test]
    fn schur_split_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in [3, 8] {
            let g = Grid::new(1.0, n).unwrap();
            let m = CMatrix::from_fn(n, n, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
            let t = OperatorMatrix::new(&g, m.clone(), Provenance::Derived("random".into())).unwrap();
            let sp = split_schur(&t).unwrap();
            assert!((sp.reconstruct_original() - &m).norm() <= 1e-10 * m.norm());
            assert!((sp.unitary.adjoint() * &sp.unitary - CMatrix::identity(n, n)).norm() <= 1e-12);
            assert!(sp.n_part.is_strictly_lower_triangular() || linalg::is_upper_triangular(sp.n_part.entries()));
            let d: Vec<C64> = sp.s_part.entries().diagonal().iter().copied().collect();
            assert!(power_sums_match(&m, &d, 1e-8));
        }

        let g = Grid::new(1.0, 3).unwrap();
        let diag = build_multiplication(&g, |x| x * x).unwrap();
        assert_eq!(split_schur(&diag).unwrap().n_part.entries(), &CMatrix::zeros(3, 3));

        let g = Grid::new(1.0, 2).unwrap();
        let nil = OperatorMatrix::new(&g, CMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(0.0), c(0.0)]), Provenance::Derived("nil".into())).unwrap();
        let sp = split_schur(&nil).unwrap();
        assert_eq!(sp.s_part.entries(), &CMatrix::zeros(2, 2));
    }

    #[test]
    fn chain_examples() {
        let g = Grid::new(1.0, 8).unwrap();
        assert_eq!(chain_projection(&g, 0.0).unwrap().entries(), &CMatrix::zeros(8, 8));
        assert_eq!(chain_projection(&g, 1.0).unwrap().entries(), &CMatrix::identity(8, 8));
        assert!(chain_projection(&g, 1.5).is_err());
        let rank = |t: f64| chain_projection(&g, t).unwrap().entries().trace().re.round() as i64;
        for k in 0..8 {
            let t = k as f64 * g.h();
            assert_eq!(rank(t + g.h()) - rank(t), 1);
        }

        let t = build_fractional(&g, 0.5).unwrap().add(&build_multiplication(&g, |x| x).unwrap()).unwrap();
        let s = build_multiplication(&g, |x| x.sin()).unwrap();
        let mut u = t.clone().into_entries();
        u[(1, 5)] = c(0.3);
        let u = OperatorMatrix::new(&g, u, Provenance::Derived("upper".into())).unwrap();
        for k in 0..=8 {
            let e = chain_projection(&g, k as f64 * g.h()).unwrap();
            assert!(chain_invariance_residual(&t, &e).unwrap() <= 1e-12);
            assert_eq!(chain_invariance_residual(&s, &e).unwrap(), 0.0);
        }
        let e = chain_projection(&g, 0.5).unwrap();
        assert!(chain_invariance_residual(&u, &e).unwrap() > 0.1);
        let not_proj = t.clone();
        assert!(matches!(chain_invariance_residual(&t, &not_proj), Err(Error::Precondition(_))));
    }

    #[test]
    fn save_load_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("j.txt");
        let g = Grid::new(2.5, 7).unwrap();
        let t = build_fractional_imaginary(&g, 0.7).unwrap();
        t.save(&path).unwrap();
        let back = OperatorMatrix::load(&path).unwrap();
        assert_eq!(back.grid(), t.grid());
        assert_eq!(back.entries(), t.entries());
        std::fs::write(&path, "2 2 1\n1 0 0 0\n").unwrap();
        assert!(matches!(OperatorMatrix::load(&path), Err(Error::Parse(_))));
    }

    #[test]
    fn semigroup_small_lattice_improves() {
        let spec = EbetaSpec::default();
        for (a, b) in [(0.5, 1.0), (1.5, 0.5)] {
            let errs: Vec<f64> = [64, 128]
                .iter()
                .map(|&n| {
                    let g = Grid::new(1.0, n).unwrap();
                    let va = build_ebeta_operator(&g, &spec.with_beta(a).unwrap()).unwrap();
                    let vb = build_ebeta_operator(&g, &spec.with_beta(b).unwrap()).unwrap();
                    let vab = build_ebeta_operator(&g, &spec.with_beta(a + b).unwrap()).unwrap();
                    va.mul(&vb).unwrap().sub(&vab).unwrap().operator_norm().unwrap()
                })
                .collect();
            assert!(errs[1] < errs[0], "({a}, {b}): {errs:?}");
        }
    }

    #[test]
    fn fractional_power_norms_within_bound() {
        for (beta, m) in [(0.5, 2u32), (1.0, 3)] {
            let g = Grid::new(1.0, 128).unwrap();
            let p = build_fractional(&g, beta).unwrap().pow(m);
            let bound = 1.0 / specfun::gamma(m as f64 * beta + 1.0).unwrap();
            assert!(p.operator_norm().unwrap() <= bound * 1.05);
        }
    }
}

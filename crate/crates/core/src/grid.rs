//! Uniform midpoint discretization of `L²(0, ω)`.
//!
//! Nodes sit at cell midpoints `x_k = (k + ½)h`, so no kernel is ever
//! evaluated at `x − t = 0` or at the origin.

use std::f64::consts::PI;

use crate::{Error, Result, C64};

#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    omega: f64,
    n: usize,
    h: f64,
    nodes: Vec<f64>,
}

impl Grid {
    /// `make_grid`: `n` cells of width `omega / n`.
    pub fn new(omega: f64, n: usize) -> Result<Self> {
        if !(omega.is_finite() && omega > 0.0) {
            return Err(Error::InvalidArgument(format!("omega must be positive, got {omega}")));
        }
        if n < 2 {
            return Err(Error::InvalidArgument(format!("need at least 2 cells, got {n}")));
        }
        let h = omega / n as f64;
        let nodes = (0..n).map(|k| (k as f64 + 0.5) * h).collect();
        Ok(Self { omega, n, h, nodes })
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Largest frequency a sampled exponential may carry: `π / (4h)`.
    pub fn max_frequency(&self) -> f64 {
        PI / (4.0 * self.h)
    }

    /// Aliasing guard shared by every operation that takes a frequency.
    pub fn check_frequency(&self, xi: f64) -> Result<()> {
        let limit = self.max_frequency();
        if !xi.is_finite() || xi.abs() > limit {
            return Err(Error::Range { xi, limit });
        }
        Ok(())
    }

    pub fn sample<F: Fn(f64) -> C64>(&self, f: F) -> GridFunction {
        GridFunction { grid: self.clone(), values: self.nodes.iter().map(|&x| f(x)).collect() }
    }

    pub fn sample_real<F: Fn(f64) -> f64>(&self, f: F) -> GridFunction {
        self.sample(|x| C64::new(f(x), 0.0))
    }

    pub fn constant(&self, c: C64) -> GridFunction {
        GridFunction { grid: self.clone(), values: vec![c; self.n] }
    }
}

/// Samples of a function at the grid midpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    grid: Grid,
    values: Vec<C64>,
}

impl GridFunction {
    pub fn new(grid: &Grid, values: Vec<C64>) -> Result<Self> {
        if values.len() != grid.n() {
            return Err(Error::InvalidArgument(format!(
                "expected {} samples, got {}",
                grid.n(),
                values.len()
            )));
        }
        Ok(Self { grid: grid.clone(), values })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<C64> {
        self.values
    }

    /// Discrete L² norm `sqrt(h Σ|f_k|²)`.
    pub fn l2_norm(&self) -> f64 {
        l2_norm(self)
    }

    pub fn scale(&self, a: C64) -> GridFunction {
        GridFunction { grid: self.grid.clone(), values: self.values.iter().map(|v| v * a).collect() }
    }

    /// Pointwise difference; both functions must live on the same grid.
    pub fn sub(&self, other: &GridFunction) -> Result<GridFunction> {
        if self.grid != other.grid {
            return Err(Error::InvalidArgument("grid mismatch".into()));
        }
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect();
        Ok(GridFunction { grid: self.grid.clone(), values })
    }
}

pub fn l2_norm(f: &GridFunction) -> f64 {
    let sum: f64 = f.values.iter().map(|v| v.norm_sqr()).sum();
    (f.grid.h * sum).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn as_f64(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// Samples `e^{±i x ξ}` after enforcing the aliasing guard.
pub fn sample_exponential(grid: &Grid, xi: f64, sign: Sign) -> Result<GridFunction> {
    grid.check_frequency(xi)?;
    Ok(sample_exponential_unchecked(grid, xi, sign))
}

/// Same as [`sample_exponential`] without the band check; used to probe the
/// Nyquist edge deliberately.
pub fn sample_exponential_unchecked(grid: &Grid, xi: f64, sign: Sign) -> GridFunction {
    let s = sign.as_f64();
    grid.sample(|x| C64::from_polar(1.0, s * x * xi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn midpoint_nodes() {
        let g = Grid::new(1.0, 4).unwrap();
        assert_eq!(g.nodes(), &[0.125, 0.375, 0.625, 0.875]);
        assert_eq!(g.h(), 0.25);

        let g = Grid::new(2.0, 2).unwrap();
        assert_eq!(g.nodes(), &[0.5, 1.5]);
        assert_eq!(g.h(), 1.0);
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(matches!(Grid::new(1.0, 0), Err(Error::InvalidArgument(_))));
        assert!(matches!(Grid::new(1.0, 1), Err(Error::InvalidArgument(_))));
        assert!(matches!(Grid::new(0.0, 8), Err(Error::InvalidArgument(_))));
        assert!(matches!(Grid::new(-1.0, 8), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn grid_invariants() {
        for &(omega, n) in &[(1.0, 3), (0.7, 1000), (13.0, 17)] {
            let g = Grid::new(omega, n).unwrap();
            assert!((g.h() * n as f64 - omega).abs() <= f64::EPSILON * omega);
            assert!(g.nodes().windows(2).all(|w| w[0] < w[1]));
            assert!(g.nodes()[0] > 0.0 && *g.nodes().last().unwrap() < omega);
        }
    }

    #[test]
    fn norms_of_simple_functions() {
        let g = Grid::new(1.0, 16).unwrap();
        assert!((g.constant(C64::new(1.0, 0.0)).l2_norm() - 1.0).abs() < 1e-15);
        assert_eq!(g.constant(C64::new(0.0, 0.0)).l2_norm(), 0.0);

        let g = Grid::new(1.0, 1024).unwrap();
        let f = g.sample_real(|x| x);
        assert!((f.l2_norm() - 1.0 / 3f64.sqrt()).abs() < 1e-3);
    }

    #[test]
    fn exponential_samples() {
        let g = Grid::new(1.0, 32).unwrap();
        let one = sample_exponential(&g, 0.0, Sign::Plus).unwrap();
        assert!(one.values().iter().all(|v| (v - C64::new(1.0, 0.0)).norm() < 1e-15));

        let e = sample_exponential(&g, 17.3, Sign::Minus).unwrap();
        assert!(e.values().iter().all(|v| (v.norm() - 1.0).abs() < 1e-14));

        // Nyquist: consecutive samples differ by a phase of π.
        let nyq = std::f64::consts::PI / g.h();
        assert!(matches!(sample_exponential(&g, nyq, Sign::Plus), Err(Error::Range { .. })));
        let alt = sample_exponential_unchecked(&g, nyq, Sign::Plus);
        for w in alt.values().windows(2) {
            assert!((w[1] + w[0]).norm() < 1e-12);
        }
    }

    #[test]
    fn refinement_consistency() {
        let f = |x: f64| (3.0 * x).sin() * x.exp();
        let exact = {
            // ∫₀¹ sin²(3x) e^{2x} dx in closed form
            let e2 = 2f64.exp();
            let a = (e2 - 1.0) / 4.0;
            let b = (e2 * (2.0 * (6f64).cos() + 6.0 * (6f64).sin()) - 2.0) / 80.0;
            (a - b).sqrt()
        };
        let mut errs = Vec::new();
        for n in [32, 64, 128, 256] {
            let g = Grid::new(1.0, n).unwrap();
            errs.push((g.sample_real(f).l2_norm() - exact).abs());
        }
        for w in errs.windows(2) {
            // second order: error ratio about 4 per doubling
            assert!(w[0] / w[1] > 3.5, "{errs:?}");
        }
    }

    proptest! {
        #[test]
        fn norm_is_absolutely_homogeneous(re in -5.0..5.0f64, im in -5.0..5.0f64, n in 2usize..64) {
            let g = Grid::new(1.3, n).unwrap();
            let f = g.sample(|x| C64::new(x.cos(), x * x));
            let a = C64::new(re, im);
            let lhs = f.scale(a).l2_norm();
            let rhs = a.norm() * f.l2_norm();
            prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + rhs));
        }

        #[test]
        fn exponential_norm_is_sqrt_omega(xi in -40.0..40.0f64, omega in 0.5..3.0f64) {
            let g = Grid::new(omega, 128).unwrap();
            let e = sample_exponential_unchecked(&g, xi, Sign::Plus);
            prop_assert!((e.l2_norm() - omega.sqrt()).abs() < 1e-12);
        }
    }
}

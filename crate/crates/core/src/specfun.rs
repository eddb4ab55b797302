//! Special functions: complex gamma, the `E_β` kernel and its moments.
//!
//! `E_β(x) = ∫₀^∞ e^{−Cs} s^{β−1} x^{s−1} / Γ(s) ds` is evaluated through the
//! Mellin-type integral
//!
//! ```text
//! K(p, L) = ∫₀^∞ s^{p−1} e^{(L−C)s} / Γ(s+1) ds
//! ```
//!
//! using `1/Γ(s) = s/Γ(s+1)`: `E_β(x) = K(β+1, ln x)/x` and the primitive
//! `∫₀^a E_β = K(β, ln a)`. Both integrands are smooth on `(0, ∞)` apart from
//! the algebraic factor at the origin, and decay super-exponentially because of
//! `Γ(s+1)`.

use std::f64::consts::PI;

use crate::quad;
use crate::{Error, Result, C64};

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

fn is_nonpositive_integer(z: C64) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re.fract() == 0.0
}

/// `ln Γ(z)` on some branch; only its exponential is meaningful off the real
/// axis.
pub fn ln_gamma_complex(z: C64) -> Result<C64> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::Domain(format!("gamma of non-finite argument {z}")));
    }
    if is_nonpositive_integer(z) {
        return Err(Error::Domain(format!("gamma has a pole at {}", z.re)));
    }
    Ok(ln_gamma_unchecked(z))
}

fn ln_gamma_unchecked(z: C64) -> C64 {
    if z.re < 0.5 {
        // reflection: Γ(z)Γ(1−z) = π / sin(πz)
        C64::new(PI.ln(), 0.0) - ln_sin_pi(z) - ln_gamma_unchecked(C64::new(1.0, 0.0) - z)
    } else {
        let z = z - 1.0;
        let mut acc = C64::new(LANCZOS[0], 0.0);
        for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
            acc += c / (z + i as f64);
        }
        let t = z + LANCZOS_G + 0.5;
        (z + 0.5) * t.ln() - t + LN_SQRT_2PI + acc.ln()
    }
}

/// `ln sin(πz)` without overflow for large `|Im z|`.
fn ln_sin_pi(z: C64) -> C64 {
    if z.im < 0.0 {
        return ln_sin_pi(z.conj()).conj();
    }
    // sin(πz) = e^{−iπz} (1 − e^{2iπz}) / (2i), and |e^{2iπz}| ≤ 1 here
    let i = C64::new(0.0, 1.0);
    let w = (i * 2.0 * PI * z).exp();
    -i * PI * z + (C64::new(1.0, 0.0) - w).ln() - C64::new(0.0, -2.0).ln()
}

/// Euler `Γ(z)` for complex `z` off the non-positive integers.
pub fn gamma_complex(z: C64) -> Result<C64> {
    Ok(ln_gamma_complex(z)?.exp())
}

/// `ln Γ(x)` for real `x > 0`.
pub fn ln_gamma(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    ln_gamma_unchecked(C64::new(x, 0.0)).re
}

/// Real `Γ(x)`; negative non-integers go through reflection.
pub fn gamma(x: f64) -> Result<f64> {
    let z = C64::new(x, 0.0);
    if is_nonpositive_integer(z) {
        return Err(Error::Domain(format!("gamma has a pole at {x}")));
    }
    if x >= 0.5 {
        Ok(ln_gamma(x).exp())
    } else {
        Ok(PI / ((PI * x).sin() * gamma(1.0 - x)?))
    }
}

/// `Γ(x+1) / [√(2πx) (x/e)^x]`, evaluated in log space.
pub fn stirling_gamma_check(nbeta: f64) -> Result<f64> {
    if !(nbeta.is_finite() && nbeta >= 1.0) {
        return Err(Error::InvalidArgument(format!("need nbeta >= 1, got {nbeta}")));
    }
    let stirling = 0.5 * (2.0 * PI * nbeta).ln() + nbeta * (nbeta.ln() - 1.0);
    Ok((ln_gamma(nbeta + 1.0) - stirling).exp())
}

/// Parameters of the `E_β` kernel: order `β > 0` and the real constant `C`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EbetaSpec {
    pub beta: f64,
    pub c: f64,
}

impl EbetaSpec {
    pub fn new(beta: f64, c: f64) -> Result<Self> {
        if !(beta.is_finite() && beta > 0.0) {
            return Err(Error::InvalidArgument(format!("beta must be positive, got {beta}")));
        }
        if !c.is_finite() {
            return Err(Error::InvalidArgument(format!("C must be a finite real, got {c}")));
        }
        Ok(Self { beta, c })
    }

    /// Same `C`, different order.
    pub fn with_beta(&self, beta: f64) -> Result<Self> {
        Self::new(beta, self.c)
    }
}

impl Default for EbetaSpec {
    fn default() -> Self {
        Self { beta: 1.0, c: 0.0 }
    }
}

/// `ln K(p, L)` with `K(p, L) = ∫₀^∞ s^{p−1} e^{(L−C)s} / Γ(s+1) ds`.
fn ln_mellin(p: f64, log_x: f64, c: f64) -> Result<f64> {
    let rate = log_x - c;
    let psi = |s: f64| (p - 1.0) * s.ln() + rate * s - ln_gamma(s + 1.0);

    // Breakpoints: a head piece resolving e^{rate·s} near the origin, then
    // doubling pieces until the integrand is negligible and decreasing.
    let head = (1.0 / rate.abs().max(1.0)).min(1.0);
    let mut breaks = vec![0.0, head];
    let mut peak = f64::NEG_INFINITY;
    loop {
        let s = *breaks.last().unwrap();
        let v = psi(s);
        peak = peak.max(v).max(psi(0.5 * s));
        let next = 2.0 * s;
        if v < peak - 60.0 && psi(next) < v && s > 2.0 * p {
            break;
        }
        if breaks.len() > 200 {
            return Err(Error::Numerical("E_beta integrand tail did not decay".into()));
        }
        breaks.push(next);
    }
    let shift = peak;
    let f = move |s: f64| if s <= 0.0 { 0.0 } else { (psi(s) - shift).exp() };

    let pieces: Vec<(f64, f64)> = breaks.windows(2).map(|w| (w[0], w[1])).collect();
    let coarse: f64 = pieces
        .iter()
        .map(|&(a, b)| quad::integrate(&f, a, b, 1e-6 * (b - a)))
        .sum::<Result<f64>>()?;
    if coarse.is_nan() || coarse <= 0.0 {
        return Err(Error::Numerical(format!("E_beta integral vanished (p={p}, L={log_x})")));
    }
    let tol = 1e-13 * coarse / pieces.len() as f64;
    let fine: f64 = pieces.iter().map(|&(a, b)| quad::integrate(&f, a, b, tol)).sum::<Result<f64>>()?;
    Ok(shift + fine.ln())
}

/// `E_β(x)` for `x > 0`.
pub fn e_beta(x: f64, spec: &EbetaSpec) -> Result<f64> {
    Ok(ln_e_beta(x, spec)?.exp())
}

pub fn ln_e_beta(x: f64, spec: &EbetaSpec) -> Result<f64> {
    if !(x.is_finite() && x > 0.0) {
        return Err(Error::Domain(format!("E_beta needs x > 0, got {x}")));
    }
    ln_e_beta_log(x.ln(), spec)
}

/// `ln E_β(e^L)`; reaches arguments far below the smallest positive double.
pub fn ln_e_beta_log(log_x: f64, spec: &EbetaSpec) -> Result<f64> {
    Ok(ln_mellin(spec.beta + 1.0, log_x, spec.c)? - log_x)
}

/// `∫₀^a E_β(u) du`.
pub fn e_beta_primitive(a: f64, spec: &EbetaSpec) -> Result<f64> {
    if a == 0.0 {
        return Ok(0.0);
    }
    if !(a.is_finite() && a > 0.0) {
        return Err(Error::Domain(format!("primitive needs a >= 0, got {a}")));
    }
    Ok(ln_mellin(spec.beta, a.ln(), spec.c)?.exp())
}

/// `m(β) = (1/Γ(β)) ∫₀^ω E_β(x) dx`.
pub fn m_moment(spec: &EbetaSpec, omega: f64) -> Result<f64> {
    Ok(ln_m_moment(spec, omega)?.exp())
}

/// `ln m(β)`; stays finite where `m(β)` itself under- or overflows.
pub fn ln_m_moment(spec: &EbetaSpec, omega: f64) -> Result<f64> {
    if !(omega.is_finite() && omega > 0.0) {
        return Err(Error::InvalidArgument(format!("omega must be positive, got {omega}")));
    }
    Ok(ln_mellin(spec.beta, omega.ln(), spec.c)? - ln_gamma(spec.beta))
}

/// Smallest `M` with `m(nβ) ≤ (M / ln(nβ))^{nβ}`, i.e. `ln(nβ)·m(nβ)^{1/(nβ)}`.
pub fn moment_growth_constant(nbeta: f64, ln_m: f64) -> f64 {
    nbeta.ln() * (ln_m / nbeta).exp()
}

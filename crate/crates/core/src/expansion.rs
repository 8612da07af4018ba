//! Expansion coefficients `C_{m n_r}` of the initial packet in the
//! `(H, l_z)` eigenbasis.
//!
//! Closed forms are evaluated as log-magnitude plus sign. The projection
//! integral is evaluated independently by a periodic trapezoid in `φ` and
//! Gauss-Laguerre in `u = ρ̃²`, and serves as the oracle for the closed forms.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use crate::error::{Error, Result};
use crate::specialfn::{gauss_laguerre, laguerre_unchecked, log_factorial};
use crate::states::{Chirality, ModeIndex, PacketParams};

/// Largest explicit `n_max` accepted by [`build_table`].
pub const MAX_TABLE_N: u32 = 10_000;

/// Poisson tail target for automatic truncation, before the safety margin.
pub const AUTO_TAIL_TARGET: f64 = 1e-13;

/// Extra shells added beyond the Poisson tail target.
pub const AUTO_MARGIN: u32 = 4;

/// `ln|x^k|` with `0^0 = 1`; `None` for an exact zero.
fn log_pow(x: f64, k: u32) -> Option<f64> {
    if k == 0 {
        Some(0.0)
    } else if x == 0.0 {
        None
    } else {
        Some(k as f64 * x.abs().ln())
    }
}

fn pow_sign(x: f64, k: u32) -> f64 {
    if x < 0.0 && k % 2 == 1 {
        -1.0
    } else {
        1.0
    }
}

/// Circular-orbit coefficient `ξ₀^m e^{-ξ₀²/2} / √(m!)` (retarded, `η₀ = ξ₀`).
pub fn coeff_circular(xi0: f64, mode: ModeIndex) -> f64 {
    if mode.m < 0 || mode.n_r > 0 {
        return 0.0;
    }
    let m = mode.m as u32;
    match log_pow(xi0, m) {
        Some(lp) => (lp - 0.5 * xi0 * xi0 - 0.5 * log_factorial(m as u64)).exp(),
        None => 0.0,
    }
}

/// Elliptic-orbit coefficient, valid for any `(ξ₀, η₀)` and either chirality.
///
/// For `m >= 0`: `(-1)^{n_r} [n_r!(m+n_r)!]^{-1/2} e^{-ξ₀²/2} e^{AB} A^{n_r} B^{m+n_r}`;
/// for `m < 0` the roles of `A` and `B` swap. Advanced chirality reads the
/// retarded value at `(-m, n_r)`.
pub fn coeff_elliptic(params: &PacketParams, mode: ModeIndex) -> f64 {
    let mode = match params.chirality {
        Chirality::Retarded => mode,
        Chirality::Advanced => mode.mirrored(),
    };
    let (a, b) = (params.a(), params.b());
    let n_r = mode.n_r;
    let abs_m = mode.abs_m();
    let (x, y) = if mode.m >= 0 { (a, b) } else { (b, a) };
    let (Some(lx), Some(ly)) = (log_pow(x, n_r), log_pow(y, abs_m + n_r)) else {
        return 0.0;
    };
    let log_mag = lx + ly + a * b - 0.5 * params.xi0 * params.xi0
        - 0.5 * (log_factorial(n_r as u64) + log_factorial((abs_m + n_r) as u64));
    let sign = if n_r % 2 == 0 { 1.0 } else { -1.0 } * pow_sign(x, n_r) * pow_sign(y, abs_m + n_r);
    sign * log_mag.exp()
}

/// `∫₀^{2π} exp[ξ₀ξ ± iη₀η] e^{-imφ} dφ` on the circle of radius `rho_tilde`,
/// by its power series `2π Σ_k (Aρ̃)^k (Bρ̃)^{k+m} / (k!(k+m)!)`.
pub fn angular_integral(m: i32, params: &PacketParams, rho_tilde: f64) -> Complex64 {
    let m = match params.chirality {
        Chirality::Retarded => m,
        Chirality::Advanced => -m,
    };
    let (a, b) = (params.a(), params.b());
    let (x, y) = if m >= 0 { (a, b) } else { (b, a) };
    let abs_m = m.unsigned_abs();
    let Some(lead) = log_pow(y * rho_tilde, abs_m) else {
        return Complex64::new(0.0, 0.0);
    };
    let mut term = pow_sign(y, abs_m) * (lead - log_factorial(abs_m as u64)).exp();
    let mut sum = term;
    let ratio = x * y * rho_tilde * rho_tilde;
    let mut k = 0u32;
    while term != 0.0 {
        term *= ratio / ((k as f64 + 1.0) * (k as f64 + abs_m as f64 + 1.0));
        sum += term;
        k += 1;
        let shrinking = (k as f64) * (k as f64 + abs_m as f64) > ratio.abs();
        if shrinking && term.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    Complex64::new(2.0 * PI * sum, 0.0)
}

/// The same angular integral by an `points`-node periodic trapezoid rule.
pub fn angular_integral_trapezoid(m: i32, params: &PacketParams, rho_tilde: f64, points: usize) -> Complex64 {
    let s = params.chirality.sign();
    let h = 2.0 * PI / points as f64;
    let total: Complex64 = (0..points)
        .map(|j| {
            let phi = h * j as f64;
            let (sin, cos) = phi.sin_cos();
            let re = params.xi0 * rho_tilde * cos;
            let im = s * params.eta0 * rho_tilde * sin - m as f64 * phi;
            Complex64::from_polar(re.exp(), im)
        })
        .sum();
    total * h
}

/// Node counts for [`coeff_quadrature`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuadratureSettings {
    pub radial_order: usize,
    pub angular_points: usize,
}

impl QuadratureSettings {
    /// Recommended minimum for `mode` in a table truncated at `n_max`.
    pub fn minimum(mode: ModeIndex, n_max: u32) -> Self {
        Self {
            radial_order: (n_max / 2 + mode.abs_m() + 8) as usize,
            angular_points: (4 * mode.abs_m() + 32) as usize,
        }
    }

    /// Settings that reach ~1e-13 accuracy for amplitudes up to a few units.
    pub fn for_mode(params: &PacketParams, mode: ModeIndex) -> Self {
        let amp = params.max_amplitude();
        let min = Self::minimum(mode, mode.principal());
        let reach = amp * (0.5 * amp + 6.0);
        let angular = min.angular_points + 32 + (2.0 * std::f64::consts::E * reach).ceil() as usize;
        Self {
            radial_order: (min.radial_order + 40 + (8.0 * amp).ceil() as usize).min(crate::specialfn::MAX_QUADRATURE_ORDER),
            angular_points: angular + angular % 2,
        }
    }
}

/// Result of a numerical projection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Projection {
    pub value: Complex64,
    /// Set when the node counts fall below [`QuadratureSettings::minimum`].
    pub degraded: bool,
}

/// Projection `∫∫ ψ_c ψ*_{m n_r} ρ̃ dρ̃ dφ` by direct quadrature.
///
/// With `u = ρ̃²` the Gaussian factors of both states combine into `e^{-u}`
/// and `ρ̃ dρ̃ = du/2`, so the radial integral is a Gauss-Laguerre sum.
pub fn coeff_quadrature(params: &PacketParams, mode: ModeIndex, radial_order: usize, angular_points: usize) -> Result<Projection> {
    let min = QuadratureSettings::minimum(mode, mode.principal());
    let degraded = radial_order < min.radial_order || angular_points < min.angular_points;
    let rule = gauss_laguerre(radial_order)?;
    let abs_m = mode.abs_m();
    let log_norm = 0.5 * (log_factorial(mode.n_r as u64) - log_factorial((abs_m + mode.n_r) as u64))
        - PI.ln()
        - 0.5 * params.xi0 * params.xi0;
    let mut total = Complex64::new(0.0, 0.0);
    for (&u, &w) in rule.nodes().iter().zip(rule.weights()) {
        if w == 0.0 {
            continue;
        }
        let rho = u.sqrt();
        let radial = (log_norm + 0.5 * abs_m as f64 * u.ln()).exp()
            * laguerre_unchecked(mode.n_r as usize, abs_m as f64, u);
        let angular = angular_integral_trapezoid(mode.m, params, rho, angular_points);
        total += 0.5 * w * radial * angular;
    }
    Ok(Projection { value: total, degraded })
}

/// [`coeff_quadrature`] with [`QuadratureSettings::for_mode`].
pub fn coeff_quadrature_auto(params: &PacketParams, mode: ModeIndex) -> Result<Complex64> {
    let s = QuadratureSettings::for_mode(params, mode);
    coeff_quadrature(params, mode, s.radial_order, s.angular_points).map(|p| p.value)
}

/// `Σ_{N > n_max} e^{-s} s^N / N!`, summed directly.
pub fn poisson_tail(mean: f64, n_max: u32) -> f64 {
    if mean == 0.0 {
        return 0.0;
    }
    let mut n = n_max as u64 + 1;
    let mut term = (n as f64 * mean.ln() - mean - log_factorial(n)).exp();
    let mut sum = 0.0;
    loop {
        sum += term;
        n += 1;
        term *= mean / n as f64;
        if (n as f64) > mean && term <= 1e-20 * sum {
            break sum;
        }
        if sum == 0.0 && (n as f64) > mean {
            break 0.0;
        }
    }
}

/// `e^{-s} s^n / n!`.
pub fn poisson_pmf(mean: f64, n: u32) -> f64 {
    if mean == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    (n as f64 * mean.ln() - mean - log_factorial(n as u64)).exp()
}

/// Smallest `N*` with Poisson tail below [`AUTO_TAIL_TARGET`], plus [`AUTO_MARGIN`].
pub fn auto_n_max(params: &PacketParams) -> u32 {
    let mean = params.mean_principal();
    let mut n = 0;
    while poisson_tail(mean, n) >= AUTO_TAIL_TARGET {
        n += 1;
    }
    n + AUTO_MARGIN
}

/// Truncated expansion of the initial packet over all modes with `N <= n_max`.
///
/// Modes whose coefficient vanishes exactly are not stored.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientTable {
    pub params: PacketParams,
    pub n_max: u32,
    entries: BTreeMap<ModeIndex, f64>,
    pub tail_mass: f64,
}

impl CoefficientTable {
    /// Entries in `(N, m)` order.
    pub fn iter(&self) -> impl Iterator<Item = (ModeIndex, f64)> + '_ {
        self.entries.iter().map(|(k, v)| (*k, *v))
    }

    pub fn get(&self, mode: ModeIndex) -> f64 {
        self.entries.get(&mode).copied().unwrap_or(0.0)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn sum_squares(&self) -> f64 {
        self.entries.values().map(|c| c * c).sum()
    }
}

/// Builds the table from the closed form. `tail_mass` is the exact Poisson
/// weight of the discarded shells, since `P(N)` is Poisson with mean
/// `(ξ₀² + η₀²)/2`.
pub fn build_table(params: &PacketParams, n_max: Option<u32>) -> Result<CoefficientTable> {
    build_table_with(params, n_max, coeff_elliptic)
}

/// [`build_table`] with a caller-supplied coefficient formula.
pub fn build_table_with<F>(params: &PacketParams, n_max: Option<u32>, coefficient: F) -> Result<CoefficientTable>
where
    F: Fn(&PacketParams, ModeIndex) -> f64,
{
    let n_max = match n_max {
        Some(n) if n > MAX_TABLE_N => return Err(Error::TableTooLarge(n as usize)),
        Some(n) => n,
        None => auto_n_max(params),
    };
    let entries = ModeIndex::up_to(n_max)
        .map(|mode| (mode, coefficient(params, mode)))
        .filter(|(_, c)| *c != 0.0)
        .collect();
    Ok(CoefficientTable {
        params: *params,
        n_max,
        entries,
        tail_mass: poisson_tail(params.mean_principal(), n_max),
    })
}

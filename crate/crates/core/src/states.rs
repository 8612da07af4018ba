//! Closed-form wavefunctions of the 2D isotropic oscillator.
//!
//! Internal units are ħ = M = ω = 1, so lengths are the dimensionless
//! `ξ = αx`, `η = αy` and times are measured in units of `1/ω`.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specialfn::{laguerre_unchecked, log_factorial};

/// Eigenstate label `(m, n_r)` of the joint `(H, l_z)` eigenbasis.
///
/// Orders by principal number `N`, then by `m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ModeIndex {
    pub m: i32,
    pub n_r: u32,
}

impl ModeIndex {
    pub fn new(m: i32, n_r: u32) -> Self {
        Self { m, n_r }
    }

    /// Principal number `N = 2 n_r + |m|`.
    pub fn principal(&self) -> u32 {
        2 * self.n_r + self.m.unsigned_abs()
    }

    pub fn abs_m(&self) -> u32 {
        self.m.unsigned_abs()
    }

    pub fn mirrored(&self) -> Self {
        Self::new(-self.m, self.n_r)
    }

    /// All modes with `N <= n_max`, ordered by `(N, m)`.
    pub fn up_to(n_max: u32) -> impl Iterator<Item = ModeIndex> {
        (0..=n_max).flat_map(Self::shell)
    }

    /// The `N + 1` degenerate modes with principal number `n`, ordered by `m`.
    pub fn shell(n: u32) -> impl Iterator<Item = ModeIndex> {
        let n = n as i32;
        (0..=n).map(move |k| {
            let m = -n + 2 * k;
            ModeIndex::new(m, ((n - m.abs()) / 2) as u32)
        })
    }
}

impl Ord for ModeIndex {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.principal(), self.m).cmp(&(other.principal(), other.m))
    }
}

impl PartialOrd for ModeIndex {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for ModeIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(m={}, n_r={})", self.m, self.n_r)
    }
}

/// Sign of the π/2 relative phase between the y and x packets.
///
/// `Retarded` circulates counter-clockwise (support on `m >= 0` for circular
/// orbits); `Advanced` circulates clockwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Chirality {
    #[default]
    Retarded,
    Advanced,
}

impl Chirality {
    pub fn sign(self) -> f64 {
        match self {
            Chirality::Retarded => 1.0,
            Chirality::Advanced => -1.0,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Chirality::Retarded => Chirality::Advanced,
            Chirality::Advanced => Chirality::Retarded,
        }
    }

    /// Constant phase `e^{±iπ/4}` carried by the time-dependent packet.
    pub fn constant_phase(self) -> Complex64 {
        Complex64::from_polar(1.0, self.sign() * FRAC_PI_4)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Chirality::Retarded => "retarded",
            Chirality::Advanced => "advanced",
        }
    }
}

impl fmt::Display for Chirality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Chirality {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "retarded" => Ok(Chirality::Retarded),
            "advanced" => Ok(Chirality::Advanced),
            other => Err(format!("unknown chirality '{other}' (expected retarded or advanced)")),
        }
    }
}

/// Dimensionless packet amplitudes and phase convention.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PacketParams {
    pub xi0: f64,
    pub eta0: f64,
    pub chirality: Chirality,
    pub omega: f64,
}

fn check_amplitude(what: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value >= 0.0 {
        Ok(())
    } else {
        Err(Error::Negative { what, value })
    }
}

impl PacketParams {
    pub fn new(xi0: f64, eta0: f64) -> Result<Self> {
        check_amplitude("xi0", xi0)?;
        check_amplitude("eta0", eta0)?;
        Ok(Self {
            xi0,
            eta0,
            chirality: Chirality::Retarded,
            omega: 1.0,
        })
    }

    pub fn circular(xi0: f64) -> Result<Self> {
        Self::new(xi0, xi0)
    }

    pub fn with_chirality(mut self, chirality: Chirality) -> Self {
        self.chirality = chirality;
        self
    }

    /// `A = (ξ₀ - η₀)/2`.
    pub fn a(&self) -> f64 {
        0.5 * (self.xi0 - self.eta0)
    }

    /// `B = (ξ₀ + η₀)/2`.
    pub fn b(&self) -> f64 {
        0.5 * (self.xi0 + self.eta0)
    }

    /// Mean principal number `(ξ₀² + η₀²)/2`.
    pub fn mean_principal(&self) -> f64 {
        0.5 * (self.xi0 * self.xi0 + self.eta0 * self.eta0)
    }

    pub fn max_amplitude(&self) -> f64 {
        self.xi0.max(self.eta0)
    }
}

/// Physical oscillator parameters, converted by [`to_dimensionless`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalUnits {
    pub mass: f64,
    pub omega: f64,
    pub hbar: f64,
    pub x0: f64,
    pub y0: f64,
}

impl PhysicalUnits {
    /// Inverse oscillator length `α = √(Mω/ħ)`.
    pub fn alpha(&self) -> f64 {
        (self.mass * self.omega / self.hbar).sqrt()
    }
}

pub fn to_dimensionless(units: &PhysicalUnits) -> Result<PacketParams> {
    for (what, value) in [("mass", units.mass), ("omega", units.omega), ("hbar", units.hbar)] {
        if !(value.is_finite() && value > 0.0) {
            return Err(Error::NonPositive { what, value });
        }
    }
    check_amplitude("x0", units.x0)?;
    check_amplitude("y0", units.y0)?;
    let alpha = units.alpha();
    let mut params = PacketParams::new(alpha * units.x0, alpha * units.y0)?;
    params.omega = units.omega;
    Ok(params)
}

/// Uniform rectangular grid over `(ξ, η)` carrying complex samples,
/// row-major with `ξ` as the slow index.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid2D {
    xi_axis: Vec<f64>,
    eta_axis: Vec<f64>,
    pub values: Vec<Complex64>,
}

pub const DEFAULT_GRID_POINTS: usize = 257;
pub const GRID_MARGIN: f64 = 6.0;

impl Grid2D {
    /// Square grid on `[-half_width, half_width]²` with `points` samples per axis.
    pub fn centered(half_width: f64, points: usize) -> Result<Self> {
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(Error::InvalidGrid(format!("half-width must be positive, got {half_width}")));
        }
        if points < 2 {
            return Err(Error::InvalidGrid(format!("need at least 2 points per axis, got {points}")));
        }
        let axis = linspace(half_width, points);
        Ok(Self {
            values: vec![Complex64::new(0.0, 0.0); points * points],
            xi_axis: axis.clone(),
            eta_axis: axis,
        })
    }

    pub fn from_axes(xi_axis: Vec<f64>, eta_axis: Vec<f64>) -> Result<Self> {
        for axis in [&xi_axis, &eta_axis] {
            if axis.len() < 2 || axis.windows(2).any(|w| w[1].partial_cmp(&w[0]) != Some(std::cmp::Ordering::Greater)) {
                return Err(Error::InvalidGrid("axes need >= 2 strictly increasing points".into()));
            }
        }
        Ok(Self {
            values: vec![Complex64::new(0.0, 0.0); xi_axis.len() * eta_axis.len()],
            xi_axis,
            eta_axis,
        })
    }

    /// Default grid for a packet: half-width `max(ξ₀, η₀) + 6`, 257 points.
    pub fn for_params(params: &PacketParams) -> Self {
        Self::centered(params.max_amplitude() + GRID_MARGIN, DEFAULT_GRID_POINTS)
            .expect("default grid is valid")
    }

    pub fn xi_axis(&self) -> &[f64] {
        &self.xi_axis
    }

    pub fn eta_axis(&self) -> &[f64] {
        &self.eta_axis
    }

    pub fn d_xi(&self) -> f64 {
        self.xi_axis[1] - self.xi_axis[0]
    }

    pub fn d_eta(&self) -> f64 {
        self.eta_axis[1] - self.eta_axis[0]
    }

    pub fn cell_area(&self) -> f64 {
        self.d_xi() * self.d_eta()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Coordinates of the flat sample index `k`.
    pub fn coords(&self, k: usize) -> (f64, f64) {
        let n_eta = self.eta_axis.len();
        (self.xi_axis[k / n_eta], self.eta_axis[k % n_eta])
    }

    /// Smallest `|ξ|`, `|η|` extent covered on both axes.
    pub fn half_span(&self) -> f64 {
        let ends = [
            self.xi_axis[0].abs(),
            self.xi_axis[self.xi_axis.len() - 1].abs(),
            self.eta_axis[0].abs(),
            self.eta_axis[self.eta_axis.len() - 1].abs(),
        ];
        ends.into_iter().fold(f64::INFINITY, f64::min)
    }

    /// Riemann-sum norm `Σ|ψ|² dξ dη`.
    pub fn norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.cell_area()
    }
}

/// Uniform axis on `[-half_width, half_width]`, exactly antisymmetric.
fn linspace(half_width: f64, points: usize) -> Vec<f64> {
    let step = 2.0 * half_width / (points - 1) as f64;
    let mut axis: Vec<f64> = (0..points).map(|i| -half_width + step * i as f64).collect();
    for i in 0..points / 2 {
        axis[points - 1 - i] = -axis[i];
    }
    if points % 2 == 1 {
        axis[points / 2] = 0.0;
    }
    axis
}

/// Radial part `[n_r!/(π(|m|+n_r)!)]^{1/2} ρ̃^{|m|} e^{-ρ̃²/2} L_{n_r}^{|m|}(ρ̃²)`.
pub fn radial_part(mode: ModeIndex, rho_tilde: f64) -> f64 {
    let abs_m = mode.abs_m();
    let n_r = mode.n_r;
    let u = rho_tilde * rho_tilde;
    let log_norm =
        0.5 * (log_factorial(n_r as u64) - log_factorial((abs_m + n_r) as u64) - PI.ln());
    let power = if abs_m == 0 {
        0.0
    } else if rho_tilde == 0.0 {
        return 0.0;
    } else {
        abs_m as f64 * rho_tilde.ln()
    };
    (log_norm + power - 0.5 * u).exp() * laguerre_unchecked(n_r as usize, abs_m as f64, u)
}

/// Normalized joint eigenstate `ψ_{m n_r}(ρ̃, φ)`.
pub fn eigenstate(mode: ModeIndex, rho_tilde: f64, phi: f64) -> Complex64 {
    Complex64::from_polar(1.0, mode.m as f64 * phi) * radial_part(mode, rho_tilde)
}

/// Energy `(N + 1)` in units of ħω.
pub fn energy(mode: ModeIndex) -> f64 {
    (mode.principal() + 1) as f64
}

/// 1D coherent packet of amplitude `xi0` at time `t`.
pub fn coherent_1d(xi0: f64, xi: f64, t: f64) -> Complex64 {
    let i = Complex64::i();
    let rot = Complex64::from_polar(1.0, -t);
    let rot2 = Complex64::from_polar(1.0, 2.0 * t);
    let exponent = -i * (0.5 * t) - 0.5 * xi * xi - 0.25 * xi0 * xi0 * (1.0 + rot2) + xi0 * xi * rot;
    PI.powf(-0.25) * exponent.exp()
}

/// y packet shifted in phase by ∓π/2 relative to the x packet.
fn coherent_1d_quadrature(eta0: f64, eta: f64, t: f64, chirality: Chirality) -> Complex64 {
    let i = Complex64::i();
    let s = chirality.sign();
    let rot = Complex64::from_polar(1.0, -t);
    let rot2 = Complex64::from_polar(1.0, 2.0 * t);
    let exponent = -i * (0.5 * (t - s * FRAC_PI_2)) - 0.5 * eta * eta
        - 0.25 * eta0 * eta0 * (1.0 - rot2)
        + i * (s * eta0 * eta) * rot;
    PI.powf(-0.25) * exponent.exp()
}

/// 2D coherent state at time `t`, including the constant phase `e^{±iπ/4}`.
pub fn coherent_2d(params: &PacketParams, xi: f64, eta: f64, t: f64) -> Complex64 {
    coherent_1d(params.xi0, xi, t) * coherent_1d_quadrature(params.eta0, eta, t, params.chirality)
}

/// Initial wavefunction with the constant phase dropped.
pub fn initial_state(params: &PacketParams, xi: f64, eta: f64) -> Complex64 {
    let s = params.chirality.sign();
    let re = -0.5 * (xi * xi + eta * eta) - 0.5 * params.xi0 * params.xi0 + params.xi0 * xi;
    let im = s * params.eta0 * eta;
    Complex64::from_polar(re.exp() / PI.sqrt(), im)
}

/// Classical orbit `(ξ₀ cos t, ±η₀ sin t)`.
pub fn classical_center(params: &PacketParams, t: f64) -> (f64, f64) {
    (params.xi0 * t.cos(), params.chirality.sign() * params.eta0 * t.sin())
}

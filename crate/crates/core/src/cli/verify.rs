//! One-shot verification suite: closed forms against independent oracles.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::dynamics::{evolve_closed_form, evolve_spectral, phase_aligned_max_error, signed_area, trace_orbit, TrajectorySample};
use crate::expansion::{build_table_with, coeff_elliptic, coeff_quadrature_auto, poisson_pmf, CoefficientTable};
use crate::observables::{closed_form_energy, closed_form_lz, compute_report, marginals, partial_moment_identities, MomentIdentities};
use crate::specialfn::verify_laguerre_integral;
use crate::states::{classical_center, Chirality, Grid2D, ModeIndex, PacketParams};
use crate::Result;

/// Coefficient formula under test.
pub type CoefficientFn = fn(&PacketParams, ModeIndex) -> f64;

pub const ORACLE_PARAMS: [(f64, f64); 5] = [(1.0, 1.0), (2.0, 2.0), (1.5, 0.5), (1.0, 0.0), (0.3, 2.1)];
pub const ORACLE_MAX_N: u32 = 16;
pub const SWEEP_VALUES: [f64; 6] = [0.0, 0.5, 1.0, 1.5, 2.0, 3.0];
pub const ORBIT_PARAMS: [(f64, f64); 3] = [(1.5, 0.5), (2.0, 1.0), (1.0, 1.0)];
pub const SPECTRAL_TIMES: [f64; 4] = [0.0, 0.7, PI, 5.1];
pub const ORBIT_TIMES: usize = 64;

pub const TOL_COEFF: f64 = 1e-10;
pub const TOL_IMAG: f64 = 1e-12;
pub const TOL_SUPPORT: f64 = 1e-12;
pub const TOL_NORM: f64 = 1e-12;
pub const TOL_POISSON: f64 = 1e-10;
pub const TOL_MOMENT: f64 = 1e-9;
pub const TOL_LAGUERRE: f64 = 1e-10;
pub const TOL_ORBIT: f64 = 1e-6;
/// Relative mismatch `|A₊ + A₋| / |A₊|` of the two signed orbit areas.
pub const TOL_ORIENTATION: f64 = 1e-9;
pub const TOL_SPECTRAL: f64 = 1e-8;
pub const TOL_SPECTRAL_TAIL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    fn at_most(name: &str, residual: f64, tolerance: f64) -> Self {
        Self {
            name: name.to_string(),
            residual,
            tolerance,
            passed: residual <= tolerance,
        }
    }

    fn with(name: &str, residual: f64, tolerance: f64, passed: bool) -> Self {
        Self {
            name: name.to_string(),
            residual,
            tolerance,
            passed: passed && residual <= tolerance,
        }
    }

    fn failed(name: &str, tolerance: f64) -> Self {
        Self::with(name, f64::INFINITY, tolerance, false)
    }
}

/// Packet and grid settings for the config-specific checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TargetConfig {
    pub params: PacketParams,
    pub n_max: Option<u32>,
    pub grid_half_width: f64,
    pub grid_points: usize,
    pub t_max: f64,
    pub t_steps: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct VerifySuite {
    pub coefficient: CoefficientFn,
}

impl Default for VerifySuite {
    fn default() -> Self {
        Self {
            coefficient: coeff_elliptic,
        }
    }
}

fn max_abs<I: IntoIterator<Item = f64>>(it: I) -> f64 {
    it.into_iter().fold(0.0, |a, b| if b.is_nan() { f64::INFINITY } else { a.max(b.abs()) })
}

fn packet(xi0: f64, eta0: f64, chirality: Chirality) -> PacketParams {
    PacketParams::new(xi0, eta0)
        .expect("sweep amplitudes are non-negative")
        .with_chirality(chirality)
}

fn orbit_times(t_max: f64, steps: usize) -> Vec<f64> {
    (0..steps).map(|k| t_max * k as f64 / steps as f64).collect()
}

impl VerifySuite {
    fn table(&self, params: &PacketParams, n_max: Option<u32>) -> Result<CoefficientTable> {
        build_table_with(params, n_max, self.coefficient)
    }

    /// Runs every suite plus the checks for `target`.
    pub fn run(&self, target: &TargetConfig) -> Vec<Check> {
        let mut checks = vec![self.laguerre_identity()];
        checks.extend(self.coefficient_oracle());
        checks.extend(self.circular_support());
        checks.extend(self.normalization());
        checks.extend(self.moment_identities());
        checks.extend(self.orbit());
        checks.push(self.spectral_completeness());
        checks.extend(self.target(target));
        checks
    }

    pub fn laguerre_identity(&self) -> Check {
        let mut worst = 0.0f64;
        let mut zeros_ok = true;
        for n in 0..=6 {
            for mu in 0..=4 {
                for lambda in 0..=6 {
                    match verify_laguerre_integral(n, mu, lambda) {
                        Ok(v) => {
                            worst = worst.max(v.residual());
                            if lambda == mu && n >= 1 {
                                zeros_ok &= v.closed_form == 0.0 && v.quadrature.abs() <= TOL_LAGUERRE;
                            }
                        }
                        Err(_) => return Check::failed("laguerre_integral_identity", TOL_LAGUERRE),
                    }
                }
            }
        }
        Check::with("laguerre_integral_identity", worst, TOL_LAGUERRE, zeros_ok)
    }

    fn oracle_residuals(&self, params: &PacketParams, max_n: u32) -> Result<(f64, f64)> {
        let modes: Vec<ModeIndex> = ModeIndex::up_to(max_n).collect();
        let pairs: Vec<(f64, f64)> = modes
            .par_iter()
            .map(|&mode| {
                let q = coeff_quadrature_auto(params, mode)?;
                Ok(((self.coefficient)(params, mode) - q.re, q.im))
            })
            .collect::<Result<_>>()?;
        Ok((max_abs(pairs.iter().map(|p| p.0)), max_abs(pairs.iter().map(|p| p.1))))
    }

    pub fn coefficient_oracle(&self) -> Vec<Check> {
        let mut re = 0.0f64;
        let mut im = 0.0f64;
        for (xi0, eta0) in ORACLE_PARAMS {
            match self.oracle_residuals(&packet(xi0, eta0, Chirality::Retarded), ORACLE_MAX_N) {
                Ok((r, i)) => {
                    re = re.max(r);
                    im = im.max(i);
                }
                Err(_) => return vec![Check::failed("coefficient_oracle", TOL_COEFF)],
            }
        }
        vec![
            Check::at_most("coefficient_oracle", re, TOL_COEFF),
            Check::at_most("coefficient_oracle_imaginary", im, TOL_IMAG),
        ]
    }

    /// Quadrature coefficients off the circular support must vanish.
    pub fn circular_support(&self) -> Vec<Check> {
        let mut out = Vec::new();
        for chirality in [Chirality::Retarded, Chirality::Advanced] {
            let mut worst = 0.0f64;
            for xi0 in [1.0, 2.0] {
                let p = packet(xi0, xi0, chirality);
                let off: Vec<ModeIndex> = ModeIndex::up_to(ORACLE_MAX_N)
                    .filter(|m| {
                        let on = m.n_r == 0
                            && match chirality {
                                Chirality::Retarded => m.m >= 0,
                                Chirality::Advanced => m.m <= 0,
                            };
                        !on
                    })
                    .collect();
                let vals: Result<Vec<f64>> = off
                    .par_iter()
                    .map(|&m| coeff_quadrature_auto(&p, m).map(|c| c.norm()))
                    .collect();
                match vals {
                    Ok(v) => worst = worst.max(max_abs(v)),
                    Err(_) => worst = f64::INFINITY,
                }
            }
            out.push(Check::at_most(&format!("circular_support_{chirality}"), worst, TOL_SUPPORT));
        }
        out
    }

    pub fn normalization(&self) -> Vec<Check> {
        let mut deficit = 0.0f64;
        let mut poisson = 0.0f64;
        for &xi0 in &SWEEP_VALUES {
            for &eta0 in &SWEEP_VALUES {
                let p = packet(xi0, eta0, Chirality::Retarded);
                let Ok(table) = self.table(&p, None) else {
                    return vec![Check::failed("normalization", TOL_NORM)];
                };
                deficit = deficit.max(1.0 - table.sum_squares());
                let marg = marginals(&table);
                let s = p.mean_principal();
                for n in 0..=20u32 {
                    let got = marg.p_n.get(&n).copied().unwrap_or(0.0);
                    poisson = poisson.max((got - poisson_pmf(s, n)).abs());
                }
            }
        }
        vec![
            Check::at_most("normalization", deficit.max(0.0), TOL_NORM),
            Check::at_most("poisson_marginal", poisson, TOL_POISSON),
        ]
    }

    pub fn moment_identities(&self) -> Vec<Check> {
        let mut lz = 0.0f64;
        let mut energy = 0.0f64;
        let mut partial = 0.0f64;
        let mut circular = 0.0f64;
        for &xi0 in &SWEEP_VALUES {
            for &eta0 in &SWEEP_VALUES {
                let p = packet(xi0, eta0, Chirality::Retarded);
                let Ok(table) = self.table(&p, None) else {
                    return vec![Check::failed("moment_identities", TOL_MOMENT)];
                };
                let (Ok(r), Ok(ids)) = (compute_report(&table), partial_moment_identities(&table)) else {
                    return vec![Check::failed("moment_identities", TOL_MOMENT)];
                };
                lz = lz.max((r.mean_lz - closed_form_lz(&p)).abs());
                energy = energy.max((r.mean_energy - closed_form_energy(&p)).abs());
                partial = partial.max(ids.max_abs_diff(&MomentIdentities::expected(&p)));
                if xi0 == eta0 {
                    circular = circular
                        .max((r.mean_m - xi0 * xi0).abs())
                        .max((r.mean_energy - (r.mean_m + 1.0)).abs());
                }
            }
        }
        vec![
            Check::at_most("mean_lz_identity", lz, TOL_MOMENT),
            Check::at_most("mean_energy_identity", energy, TOL_MOMENT),
            Check::at_most("partial_moment_identities", partial, TOL_MOMENT),
            Check::at_most("circular_moments", circular, TOL_MOMENT),
        ]
    }

    pub fn orbit(&self) -> Vec<Check> {
        let times = orbit_times(2.0 * PI, ORBIT_TIMES);
        let mut worst = OrbitResiduals::default();
        let mut orientation_ok = true;
        let mut asymmetry = 0.0f64;
        for (xi0, eta0) in ORBIT_PARAMS {
            let ret = packet(xi0, eta0, Chirality::Retarded);
            let grid = Grid2D::for_params(&ret);
            let (Ok(a), Ok(b)) = (
                trace_orbit(&ret, &times, &grid),
                trace_orbit(&ret.with_chirality(Chirality::Advanced), &times, &grid),
            ) else {
                return vec![Check::failed("orbit_centroid", TOL_ORBIT)];
            };
            worst = worst.max(&OrbitResiduals::of(&ret, &a));
            worst = worst.max(&OrbitResiduals::of(&ret.with_chirality(Chirality::Advanced), &b));
            let (sa, sb) = (signed_area(&a), signed_area(&b));
            orientation_ok &= sa > 0.0 && sb < 0.0;
            asymmetry = asymmetry.max((sa + sb).abs() / sa.abs());
        }
        vec![
            Check::at_most("orbit_centroid", worst.centroid, TOL_ORBIT),
            Check::at_most("orbit_nonspreading", worst.variance, TOL_ORBIT),
            Check::at_most("orbit_ellipse", worst.ellipse, TOL_ORBIT),
            Check::with("orbit_orientation", asymmetry, TOL_ORIENTATION, orientation_ok),
        ]
    }

    pub fn spectral_completeness(&self) -> Check {
        let p = packet(1.5, 0.5, Chirality::Retarded);
        let Ok(table) = self.table(&p, None) else {
            return Check::failed("spectral_completeness", TOL_SPECTRAL);
        };
        let grid = Grid2D::for_params(&p);
        let err = max_abs(SPECTRAL_TIMES.iter().map(|&t| {
            let a = evolve_spectral(&table, grid.clone(), t);
            let b = evolve_closed_form(&p, grid.clone(), t);
            phase_aligned_max_error(&a, &b)
        }));
        Check::with("spectral_completeness", err, TOL_SPECTRAL, table.tail_mass < TOL_SPECTRAL_TAIL)
    }

    /// Oracle, moment and orbit checks for the configured packet.
    pub fn target(&self, target: &TargetConfig) -> Vec<Check> {
        let p = target.params;
        let Ok(table) = self.table(&p, target.n_max) else {
            return vec![Check::failed("target_table", TOL_COEFF)];
        };
        let mut out = Vec::new();
        let oracle_n = table.n_max.min(ORACLE_MAX_N);
        out.push(match self.oracle_residuals(&p, oracle_n) {
            Ok((re, im)) => Check::with("target_coefficient_oracle", re, TOL_COEFF, im <= TOL_IMAG),
            Err(_) => Check::failed("target_coefficient_oracle", TOL_COEFF),
        });
        let moment_tol = TOL_MOMENT.max(10.0 * table.tail_mass);
        out.push(match compute_report(&table) {
            Ok(r) => {
                let diff = (r.mean_lz - closed_form_lz(&p))
                    .abs()
                    .max((r.mean_energy - closed_form_energy(&p)).abs());
                Check::at_most("target_moments", diff, moment_tol)
            }
            Err(_) => Check::failed("target_moments", moment_tol),
        });
        let grid = Grid2D::centered(target.grid_half_width, target.grid_points);
        let times = orbit_times(target.t_max, target.t_steps);
        out.push(match grid.map(|g| trace_orbit(&p, &times, &g)) {
            Ok(Ok(samples)) => {
                let r = OrbitResiduals::of(&p, &samples);
                Check::at_most("target_orbit", r.centroid.max(r.variance).max(r.ellipse), TOL_ORBIT)
            }
            _ => Check::failed("target_orbit", TOL_ORBIT),
        });
        out
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
struct OrbitResiduals {
    centroid: f64,
    variance: f64,
    ellipse: f64,
}

impl OrbitResiduals {
    fn of(params: &PacketParams, samples: &[TrajectorySample]) -> Self {
        let mut r = Self::default();
        for s in samples {
            let (cx, cy) = classical_center(params, s.t);
            r.centroid = r.centroid.max(max_abs([s.centroid_xi - cx, s.centroid_eta - cy]));
            r.variance = r.variance.max(max_abs([s.var_xi - 0.5, s.var_eta - 0.5]));
            if params.xi0 > 0.0 && params.eta0 > 0.0 {
                let e = (s.centroid_xi / params.xi0).powi(2) + (s.centroid_eta / params.eta0).powi(2) - 1.0;
                r.ellipse = r.ellipse.max(e.abs());
            }
        }
        r
    }

    fn max(&self, other: &Self) -> Self {
        Self {
            centroid: self.centroid.max(other.centroid),
            variance: self.variance.max(other.variance),
            ellipse: self.ellipse.max(other.ellipse),
        }
    }
}

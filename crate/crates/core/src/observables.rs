//! Angular-momentum and energy structure of a coefficient table.
//!
//! Every moment is a direct weighted sum `Σ |C_{m n_r}|² f(m, n_r)` over the
//! table; closed forms are provided separately for comparison.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::expansion::CoefficientTable;
use crate::states::{Chirality, PacketParams};

/// Largest tail mass for which [`compute_report`] trusts the moments.
pub const REPORT_TAIL_LIMIT: f64 = 1e-6;

/// Largest tail mass accepted by [`partial_moment_identities`].
pub const IDENTITY_TAIL_LIMIT: f64 = 1e-9;

/// Partial sums split by the sign of `m`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PartialMoments {
    /// `Σ_{m>=0} |C|² n_r`
    pub nr_nonneg_m: f64,
    /// `Σ_{m<0} |C|² n_r`
    pub nr_neg_m: f64,
    /// `Σ_{m>=0} |C|² (m + n_r)`
    pub m_plus_nr_nonneg_m: f64,
    /// `Σ_{m<0} |C|² (-m + n_r)`
    pub neg_m_plus_nr_neg_m: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ObservableReport {
    pub mean_m: f64,
    pub mean_abs_m: f64,
    pub mean_nr: f64,
    /// Units of ħ.
    pub mean_lz: f64,
    /// Units of ħω.
    pub mean_energy: f64,
    pub norm_deficit: f64,
    pub partials: PartialMoments,
}

fn check_tail(table: &CoefficientTable, limit: f64) -> Result<()> {
    if table.tail_mass > limit {
        Err(Error::TailTooLarge {
            tail_mass: table.tail_mass,
            limit,
        })
    } else {
        Ok(())
    }
}

pub fn compute_report(table: &CoefficientTable) -> Result<ObservableReport> {
    check_tail(table, REPORT_TAIL_LIMIT)?;
    let mut mean_m = 0.0;
    let mut mean_abs_m = 0.0;
    let mut mean_nr = 0.0;
    let mut mean_energy = 0.0;
    let mut partials = PartialMoments {
        nr_nonneg_m: 0.0,
        nr_neg_m: 0.0,
        m_plus_nr_nonneg_m: 0.0,
        neg_m_plus_nr_neg_m: 0.0,
    };
    for (mode, c) in table.iter() {
        let w = c * c;
        let m = mode.m as f64;
        let n_r = mode.n_r as f64;
        mean_m += w * m;
        mean_abs_m += w * m.abs();
        mean_nr += w * n_r;
        mean_energy += w * (mode.principal() + 1) as f64;
        if mode.m >= 0 {
            partials.nr_nonneg_m += w * n_r;
            partials.m_plus_nr_nonneg_m += w * (m + n_r);
        } else {
            partials.nr_neg_m += w * n_r;
            partials.neg_m_plus_nr_neg_m += w * (-m + n_r);
        }
    }
    Ok(ObservableReport {
        mean_m,
        mean_abs_m,
        mean_nr,
        mean_lz: mean_m,
        mean_energy,
        norm_deficit: 1.0 - table.sum_squares(),
        partials,
    })
}

/// `⟨l_z⟩ = ±ξ₀η₀` in units of ħ (`ξ₀²` on a circular orbit).
pub fn closed_form_lz(params: &PacketParams) -> f64 {
    params.chirality.sign() * params.xi0 * params.eta0
}

/// `⟨H⟩ = (ξ₀² + η₀²)/2 + 1` in units of ħω.
pub fn closed_form_energy(params: &PacketParams) -> f64 {
    params.mean_principal() + 1.0
}

/// Left-hand sides of the partial-moment identities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentIdentities {
    /// `n̄_r(m>=0) + (−m+n_r)‾(m<0)`, expected `A²`.
    pub lhs18: f64,
    /// `n̄_r(m<0) + (m+n_r)‾(m>=0)`, expected `B²`.
    pub lhs19: f64,
    /// `2 n̄_r + ⟨|m|⟩`, expected `A² + B²`.
    pub lhs20: f64,
    /// `m̄`, expected `B² − A²`.
    pub lhs21: f64,
}

impl MomentIdentities {
    /// Closed-form right-hand sides. The advanced packet mirrors `m`, which
    /// swaps the roles of `A²` and `B²`.
    pub fn expected(params: &PacketParams) -> Self {
        let a2 = params.a() * params.a();
        let b2 = params.b() * params.b();
        let (lhs18, lhs19) = match params.chirality {
            Chirality::Retarded => (a2, b2),
            Chirality::Advanced => (b2, a2),
        };
        Self {
            lhs18,
            lhs19,
            lhs20: a2 + b2,
            lhs21: lhs19 - lhs18,
        }
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        [
            self.lhs18 - other.lhs18,
            self.lhs19 - other.lhs19,
            self.lhs20 - other.lhs20,
            self.lhs21 - other.lhs21,
        ]
        .into_iter()
        .fold(0.0, |acc, d| acc.max(d.abs()))
    }
}

pub fn partial_moment_identities(table: &CoefficientTable) -> Result<MomentIdentities> {
    check_tail(table, IDENTITY_TAIL_LIMIT)?;
    let r = compute_report(table)?;
    let p = r.partials;
    Ok(MomentIdentities {
        lhs18: p.nr_nonneg_m + p.neg_m_plus_nr_neg_m,
        lhs19: p.nr_neg_m + p.m_plus_nr_nonneg_m,
        lhs20: 2.0 * r.mean_nr + r.mean_abs_m,
        lhs21: r.mean_m,
    })
}

/// Distributions of `m` and of the principal number `N`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Marginals {
    pub p_m: BTreeMap<i32, f64>,
    pub p_n: BTreeMap<u32, f64>,
}

pub fn marginals(table: &CoefficientTable) -> Marginals {
    let mut out = Marginals::default();
    for (mode, c) in table.iter() {
        *out.p_m.entry(mode.m).or_default() += c * c;
        *out.p_n.entry(mode.principal()).or_default() += c * c;
    }
    out
}

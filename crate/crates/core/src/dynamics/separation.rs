//! Endpoint separation of the two arms in the quadratic potential and the
//! single-kick compensation at the π pulse.

use super::hyper;
use crate::error::Result;
use crate::pulse::PulseSequence;
use crate::quadrature::{integrate_piecewise, QuadOptions};
use crate::scenario::Scenario;

use super::phase::sin_phi1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadraticSeparation {
    /// Δz(2T) = v_r ∫ sin φ1 cosh √γ(2T − t), m.
    pub dz: f64,
    /// Δp(2T) = m v_r √γ ∫ sin φ1 sinh √γ(2T − t), kg·m/s.
    pub dp: f64,
    /// v_r γ ∫ (2T − t) S
    pub dz_first_order: f64,
    /// m v_r γ ∫ S
    pub dp_first_order: f64,
    /// v_r γ T³
    pub dz_leading: f64,
    /// m v_r γ T²
    pub dp_leading: f64,
    /// mΔz/Δp from the first-order integrals; `None` when Δp vanishes.
    pub ratio_time: Option<f64>,
}

pub fn separation_quadratic(seq: &PulseSequence, s: &Scenario, opts: &QuadOptions) -> Result<QuadraticSeparation> {
    let (gamma, m, vr) = (s.pot.gamma, s.atom.mass, s.recoil_velocity());
    let end = seq.total_time();
    let t = seq.t_half();
    let knots = seq.knots();
    // cosh = 1 + γQ keeps the γ-linear part free of cancellation
    let [iq, is1] = integrate_piecewise(
        |u| {
            let h = hyper(gamma, end - u);
            let sn = sin_phi1(seq, u);
            [sn * h.q, sn * h.s1]
        },
        0.0,
        end,
        &knots,
        opts,
    )?;
    let s_end = seq.sensitivity_primitive(end)?;
    let [m0, m1] = integrate_piecewise(
        |u| {
            let sp = seq.sensitivity_primitive(u).unwrap_or(0.0);
            [sp, (end - u) * sp]
        },
        0.0,
        end,
        &knots,
        opts,
    )?;
    let dp_first = m * vr * gamma * m0;
    let dz_first = vr * gamma * m1;
    Ok(QuadraticSeparation {
        dz: vr * (s_end + gamma * iq),
        dp: m * vr * gamma * is1,
        dz_first_order: dz_first,
        dp_first_order: dp_first,
        dz_leading: vr * gamma * t.powi(3),
        dp_leading: m * vr * gamma * t * t,
        ratio_time: (dp_first != 0.0).then(|| m * dz_first / dp_first),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadraticCompensation {
    /// Relative change of k at the π pulse, −γT²/2.
    pub delta_k_over_k: f64,
    /// δv_r/v_r = 2δk/k = −γT²
    pub delta_vr_over_vr: f64,
    pub dz_before: f64,
    pub dp_before: f64,
    /// Leading-order model with δv_r added to the second-half relative velocity.
    pub dz_after: f64,
    pub dp_after: f64,
    /// Same kick propagated through the exact quadratic separation.
    pub dz_after_exact: f64,
    pub dp_after_exact: f64,
}

pub fn compensation_quadratic(seq: &PulseSequence, s: &Scenario, opts: &QuadOptions) -> Result<QuadraticCompensation> {
    let t = seq.t_half();
    let gamma = s.pot.gamma;
    let vr = s.recoil_velocity();
    let m = s.atom.mass;
    let dk = -0.5 * gamma * t * t;
    let dvr_rel = 2.0 * dk;
    let dv = dvr_rel * vr;
    let sep = separation_quadratic(seq, s, opts)?;
    let h = hyper(gamma, t);
    Ok(QuadraticCompensation {
        delta_k_over_k: dk,
        delta_vr_over_vr: dvr_rel,
        dz_before: sep.dz_leading,
        dp_before: sep.dp_leading,
        dz_after: sep.dz_leading + dv * t,
        dp_after: sep.dp_leading + m * dv,
        dz_after_exact: sep.dz + dv * h.s1,
        dp_after_exact: sep.dp + m * dv * h.c,
    })
}

/// Δz − Δt_d Δp/m: separation left at detection a time `delay` after 2T.
pub fn contrast_condition(dz: f64, dp: f64, mass: f64, delay: f64) -> f64 {
    dz - delay * dp / mass
}
